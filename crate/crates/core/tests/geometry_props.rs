mod common;

use common::*;
use proptest::prelude::*;
use riesz_tiler::geometry::{cell_decompose, normalize_box_union, Region};
use riesz_tiler::lattice::{density_check, Lattice};
use riesz_tiler::riesz::{riesz_bounds, ShiftVectors};
use riesz_tiler::tiling::{profiles, split, verify_tiling};
use riesz_tiler::{BoxUnion, CellComplex, LatticeVector, Rational};

fn complex_of(region: &Region<Rational>) -> CellComplex {
    cell_decompose(&region.reduce_mod_unit_lattice(), region.dim())
}

/// `{t ∈ ℤ^d : x + t ∈ Ω}` by exhaustive search over the bounding box.
fn brute_translates(region: &Region<Rational>, x: &[Rational]) -> Vec<LatticeVector> {
    let ranges = region.translate_range();
    let mut out = Vec::new();
    let total: i64 = ranges.iter().map(|(l, h)| h - l + 1).product();
    for flat in 0..total {
        let mut rem = flat;
        let mut t = vec![0i64; ranges.len()];
        for a in (0..ranges.len()).rev() {
            let span = ranges[a].1 - ranges[a].0 + 1;
            t[a] = ranges[a].0 + rem % span;
            rem /= span;
        }
        let p: Vec<Rational> = x.iter().zip(&t).map(|(xi, &ti)| xi + q(ti, 1)).collect();
        if region.contains(&p) {
            out.push(LatticeVector(t));
        }
    }
    out.sort();
    out
}

fn boxes_of(region: &Region<Rational>) -> &BoxUnion {
    match region {
        Region::Boxes(b) => b,
        Region::Polygon(_) => panic!("box region expected"),
    }
}

#[test]
fn translate_lists_match_brute_force_on_fixed_geometries() {
    let mut r = rng(11);
    for g in test_geometries() {
        for _ in 0..60 {
            let den = rand::Rng::random_range(&mut r, 1..40i64);
            let x: Vec<Rational> = (0..g.dim()).map(|_| q(rand::Rng::random_range(&mut r, 0..den), den)).collect();
            let cell = g.complex.locate(&x).unwrap();
            assert_eq!(g.complex.cells()[cell].translates, brute_translates(&g.region, &x), "{} at {:?}", g.name, x);
        }
    }
}

#[test]
fn hexagon_level_equals_area() {
    let g = test_geometries().into_iter().find(|g| g.name == "hexagon").unwrap();
    assert_eq!(g.measure, q(5, 1));
    assert_eq!(g.k, 5);
    let verdict = density_check(&g.measure, &Lattice::integer(2), Some(g.k as u64));
    assert!(verdict.pass);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generated_tiles_match_brute_force(seed in any::<u64>(), d in 1usize..=2, k in 1usize..=4, den in 1i64..=4) {
        let mut r = rng(seed);
        let region = random_multi_tile(&mut r, d, k, den);
        let complex = complex_of(&region);
        let verdict = verify_tiling(&complex, None);
        prop_assert_eq!(verdict.level, Some(k));
        for _ in 0..20 {
            let pden = rand::Rng::random_range(&mut r, 1..30i64);
            let x: Vec<Rational> = (0..d).map(|_| q(rand::Rng::random_range(&mut r, 0..pden), pden)).collect();
            let cell = complex.locate(&x).unwrap();
            prop_assert_eq!(&complex.cells()[cell].translates, &brute_translates(&region, &x));
        }
    }

    #[test]
    fn mass_identity_holds_for_any_box_union(seed in any::<u64>(), d in 1usize..=2, k in 1usize..=3, den in 1i64..=4) {
        let mut r = rng(seed);
        let full = random_multi_tile(&mut r, d, k, den);
        let kept: Vec<_> = boxes_of(&full).boxes().iter().filter(|_| rand::Rng::random_bool(&mut r, 0.6)).cloned().collect();
        prop_assume!(!kept.is_empty());
        let region = Region::Boxes(normalize_box_union(kept).unwrap());
        let verdict = verify_tiling(&complex_of(&region), None);
        prop_assert_eq!(verdict.total_mass, region.measure());
        if verdict.level.is_none() {
            prop_assert_eq!(verdict.violations.len(), complex_of(&region).len());
        }
    }

    #[test]
    fn splitting_parts_are_fundamental_domains(seed in any::<u64>(), d in 1usize..=2, k in 1usize..=4, den in 1i64..=4) {
        let region = random_multi_tile(&mut rng(seed), d, k, den);
        let complex = complex_of(&region);
        let s = split(&complex, k).unwrap();
        let mut total = q(0, 1);
        for j in 0..k {
            prop_assert_eq!(s.part_measure(&complex, j), q(1, 1));
            total += s.part_measure(&complex, j);
            // Ω_j reduced mod ℤ^d: pairwise disjoint pieces of total measure 1
            let cells: Vec<_> = s.parts[j].iter().map(|p| complex.cells()[p.cell].shape.clone()).collect();
            let reduced: Vec<_> = cells.iter().map(|c| match c {
                riesz_tiler::geometry::Shape::Box(b) => b.clone(),
                riesz_tiler::geometry::Shape::Polygon(_) => unreachable!(),
            }).collect();
            let union = normalize_box_union(reduced).unwrap();
            prop_assert_eq!(union.measure(), q(1, 1));
        }
        prop_assert_eq!(total, region.measure());
    }

    #[test]
    fn lattice_shift_invariance(seed in any::<u64>(), d in 1usize..=2, k in 1usize..=3, shift in -3i64..=3) {
        let mut r = rng(seed);
        let region = random_multi_tile(&mut r, d, k, 2);
        let lambda: Vec<i64> = (0..d).map(|a| if a == 0 { shift } else { -shift }).collect();
        let moved = region.translated(&lambda);
        let p0 = profiles(&complex_of(&region), k).unwrap();
        let p1 = profiles(&complex_of(&moved), k).unwrap();
        let expected: Vec<_> = p0.profiles.iter().map(|p| p.shifted(&LatticeVector(lambda.clone()))).collect();
        prop_assert_eq!(&p1.profiles, &expected);
        let shifts: Vec<Vec<f64>> = (0..k).map(|_| (0..d).map(|_| rand::Rng::random::<f64>(&mut r)).collect()).collect();
        let s = ShiftVectors::new(shifts, 0);
        let b0 = riesz_bounds(&p0.profiles, &s, 0.0).unwrap();
        let b1 = riesz_bounds(&p1.profiles, &s, 0.0).unwrap();
        prop_assert!((b0.a1 - b1.a1).abs() <= 1e-12 * b0.a1.max(1.0));
        prop_assert!((b0.a2 - b1.a2).abs() <= 1e-12 * b0.a2.max(1.0));
    }

    #[test]
    fn disjoint_union_levels_add(seed in any::<u64>(), d in 1usize..=2, k1 in 1usize..=3, k2 in 1usize..=3) {
        let mut r = rng(seed);
        let a = random_multi_tile(&mut r, d, k1, 2);
        let b = random_multi_tile(&mut r, d, k2, 4).translated(&(0..d).map(|i| if i == 0 { 10 } else { 0 }).collect::<Vec<_>>());
        let union = Region::Boxes(boxes_of(&a).disjoint_union(boxes_of(&b)).unwrap());
        prop_assert_eq!(verify_tiling(&complex_of(&union), None).level, Some(k1 + k2));
    }
}
