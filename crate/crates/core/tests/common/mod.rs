#![allow(dead_code)]

use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use riesz_tiler::geometry::{cell_decompose, normalize_box_union, HalfOpenBox, Polygon2D, Region};
use riesz_tiler::lattice::{normalize_instance, Lattice};
use riesz_tiler::tiling::{profiles, verify_tiling};
use riesz_tiler::transform::{build_grid, GridFunction, Transform};
use riesz_tiler::{CellComplex, ExactScalar, LatticeVector, ProfileSet, Rational, ShiftVectors};

pub fn q(n: i64, d: i64) -> Rational {
    Rational::from_fraction(n, d)
}

pub fn boxes(spec: &[(&[Rational], &[Rational])]) -> Region<Rational> {
    let bs = spec.iter().map(|(lo, hi)| HalfOpenBox::new(lo.to_vec(), hi.to_vec()).unwrap()).collect();
    Region::Boxes(normalize_box_union(bs).unwrap())
}

pub fn intervals(spec: &[(Rational, Rational)]) -> Region<Rational> {
    let bs = spec.iter().map(|(l, h)| HalfOpenBox::new(vec![l.clone()], vec![h.clone()]).unwrap()).collect();
    Region::Boxes(normalize_box_union(bs).unwrap())
}

pub fn unit_cube(d: usize) -> Region<Rational> {
    Region::Boxes(normalize_box_union(vec![HalfOpenBox::unit(d)]).unwrap())
}

pub fn polygon(vertices: &[(i64, i64)]) -> Region<Rational> {
    Region::Polygon(Polygon2D::from_integer_vertices(vertices).unwrap())
}

pub fn hexagon() -> Region<Rational> {
    polygon(&[(0, 0), (2, 0), (3, 1), (3, 2), (1, 2), (0, 1)])
}

/// A named instance with everything the numeric stages need.
pub struct Geometry {
    pub name: String,
    pub complex: CellComplex,
    pub k: usize,
    pub profiles: ProfileSet,
    pub measure: Rational,
    pub is_boxes: bool,
    /// The region in normalized coordinates.
    pub region: Region<Rational>,
}

impl Geometry {
    pub fn new(name: &str, region: Region<Rational>, lattice: Lattice<Rational>) -> Self {
        let (normalized, _) = normalize_instance(&region, &lattice).unwrap();
        let complex = cell_decompose(&normalized.reduce_mod_unit_lattice(), normalized.dim());
        let k = verify_tiling(&complex, None).level.unwrap_or_else(|| panic!("{name} is not a tiling"));
        let profiles = profiles(&complex, k).unwrap();
        Self {
            name: name.to_string(),
            complex,
            k,
            profiles,
            measure: normalized.measure(),
            is_boxes: matches!(normalized, Region::Boxes(_)),
            region: normalized,
        }
    }

    pub fn integer(name: &str, region: Region<Rational>) -> Self {
        let d = region.dim();
        Self::new(name, region, Lattice::integer(d))
    }

    pub fn dim(&self) -> usize {
        self.complex.dim()
    }

    /// Smallest valid resolution not below `at_least`.
    pub fn resolution(&self, at_least: usize) -> usize {
        let m = riesz_tiler::transform::required_multiple(&self.complex) as usize;
        at_least.div_ceil(m) * m
    }

    pub fn transform(&self, resolution: usize, shifts: &ShiftVectors) -> Transform<f64> {
        let grid = build_grid(&self.complex, resolution).unwrap();
        Transform::new(&grid, &self.profiles, shifts, 1e-6).unwrap()
    }
}

/// Every fixed test geometry: boxes in d = 1, 2, 3, polygons, non-trivial
/// lattices and the integer hexagon.
pub fn test_geometries() -> Vec<Geometry> {
    let z = |n| q(n, 1);
    vec![
        Geometry::integer("unit interval", unit_cube(1)),
        Geometry::integer("unit square", unit_cube(2)),
        Geometry::integer("unit cube", unit_cube(3)),
        Geometry::integer("[0,2)", intervals(&[(z(0), z(2))])),
        Geometry::integer("[0,1)u[2,3)", intervals(&[(z(0), z(1)), (z(2), z(3))])),
        Geometry::integer("[0,3/2)u[5/2,3)", intervals(&[(z(0), q(3, 2)), (q(5, 2), z(3))])),
        Geometry::integer("[0,2)x[0,1)", boxes(&[(&[z(0), z(0)], &[z(2), z(1)])])),
        Geometry::integer(
            "L-tromino",
            boxes(&[(&[z(0), z(0)], &[z(1), z(2)]), (&[z(1), z(0)], &[z(2), z(1)])]),
        ),
        Geometry::integer(
            "staggered boxes",
            boxes(&[
                (&[z(0), z(0)], &[q(3, 2), q(1, 2)]),
                (&[q(1, 2), q(1, 2)], &[q(3, 2), z(1)]),
                (&[z(3), q(1, 2)], &[q(7, 2), z(1)]),
                (&[q(5, 2), z(0)], &[z(3), z(1)]),
            ]),
        ),
        Geometry::new(
            "[0,4)x[0,1) over 2Z x Z",
            boxes(&[(&[z(0), z(0)], &[z(4), z(1)])]),
            Lattice::from_columns(vec![vec![z(2), z(0)], vec![z(0), z(1)]]).unwrap(),
        ),
        Geometry::integer("parallelogram", polygon(&[(0, 0), (2, 0), (3, 1), (1, 1)])),
        Geometry::integer(
            "slanted unit parallelogram",
            Region::Polygon(
                Polygon2D::new(vec![[z(0), z(0)], [z(1), z(0)], [q(3, 2), z(1)], [q(1, 2), z(1)]]).unwrap(),
            ),
        ),
        Geometry::new(
            "parallelogram over skew lattice",
            polygon(&[(0, 0), (2, 0), (3, 1), (1, 1)]),
            Lattice::from_columns(vec![vec![z(1), z(0)], vec![z(1), z(1)]]).unwrap(),
        ),
        Geometry::integer("hexagon", hexagon()),
    ]
}

/// Union of `k` integer translates of every box of a random grid partition
/// of `[0,1)^d`: a level-`k` multi-tile whose breakpoints have denominators
/// dividing `denominator`.
pub fn random_multi_tile(rng: &mut ChaCha8Rng, d: usize, k: usize, denominator: i64) -> Region<Rational> {
    let cuts: Vec<Vec<i64>> = (0..d)
        .map(|_| {
            let mut c: Vec<i64> = (1..denominator).filter(|_| rng.random_bool(0.5)).collect();
            c.insert(0, 0);
            c.push(denominator);
            c
        })
        .collect();
    let counts: Vec<usize> = cuts.iter().map(|c| c.len() - 1).collect();
    let total: usize = counts.iter().product();
    let mut out = Vec::new();
    for flat in 0..total {
        let mut rem = flat;
        let mut lo = vec![q(0, 1); d];
        let mut hi = vec![q(0, 1); d];
        for a in (0..d).rev() {
            let i = rem % counts[a];
            rem /= counts[a];
            lo[a] = q(cuts[a][i], denominator);
            hi[a] = q(cuts[a][i + 1], denominator);
        }
        let mut translates: Vec<Vec<i64>> = Vec::new();
        while translates.len() < k {
            let t: Vec<i64> = (0..d).map(|_| rng.random_range(-2..3)).collect();
            if !translates.contains(&t) {
                translates.push(t);
            }
        }
        for t in translates {
            out.push(HalfOpenBox::new(lo.clone(), hi.clone()).unwrap().translated(&t));
        }
    }
    Region::Boxes(normalize_box_union(out).unwrap())
}

pub fn random_function(rng: &mut ChaCha8Rng, len: usize) -> GridFunction<f64> {
    GridFunction::new((0..len).map(|_| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect())
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `e(θ) = exp(2πiθ)`, computed independently of the library.
pub fn e(theta: f64) -> Complex<f64> {
    let a = 2.0 * std::f64::consts::PI * theta;
    Complex::new(a.cos(), a.sin())
}

/// `S[i, (j, m)] = e((a_j + m)·p_i)` over every sample `p_i` of `Ω` and every
/// window frequency, columns ordered `j`-major then row-major in `m`.
pub fn dense_synthesis(t: &Transform<f64>, shifts: &ShiftVectors, dim: usize) -> DMatrix<Complex<f64>> {
    let m = t.resolution();
    let per = m.pow(dim as u32);
    let n = t.omega_len();
    let start = -((m / 2) as i64);
    let mut s = DMatrix::zeros(n, n);
    for i in 0..n {
        let p = t.omega_point(i);
        for (j, a) in shifts.shifts().iter().enumerate() {
            for idx in 0..per {
                let mut rem = idx;
                let mut freq = vec![0i64; dim];
                for axis in (0..dim).rev() {
                    freq[axis] = start + (rem % m) as i64;
                    rem /= m;
                }
                let theta: f64 = (0..dim).map(|ax| (a[ax] + freq[ax] as f64) * p[ax]).sum();
                s[(i, j * per + idx)] = e(theta);
            }
        }
    }
    s
}

pub fn permutations(k: usize) -> Vec<(Vec<usize>, f64)> {
    fn go(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, f64)>) {
        if rest.is_empty() {
            let mut inversions = 0;
            for i in 0..prefix.len() {
                for j in i + 1..prefix.len() {
                    if prefix[i] > prefix[j] {
                        inversions += 1;
                    }
                }
            }
            out.push((prefix.clone(), if inversions % 2 == 0 { 1.0 } else { -1.0 }));
            return;
        }
        for i in 0..rest.len() {
            let v = rest.remove(i);
            prefix.push(v);
            go(prefix, rest, out);
            prefix.pop();
            rest.insert(i, v);
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut (0..k).collect(), &mut out);
    out
}

/// `Σ_π sgn(π) e(Σ_r a_{π(r)}·t_r)`
pub fn permutation_sum(translates: &[LatticeVector], shifts: &[Vec<f64>]) -> Complex<f64> {
    permutations(translates.len()).into_iter().fold(Complex::new(0.0, 0.0), |acc, (pi, sign)| {
        let theta: f64 = translates
            .iter()
            .enumerate()
            .map(|(r, t)| shifts[pi[r]].iter().zip(t.as_slice()).map(|(a, &ti)| a * ti as f64).sum::<f64>())
            .sum();
        acc + e(theta) * sign
    })
}

/// Gaussian elimination with partial pivoting.
pub fn eliminate_det(mut a: Vec<Vec<Complex<f64>>>) -> Complex<f64> {
    let n = a.len();
    let mut det = Complex::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n).max_by(|&x, &y| a[x][col].norm().total_cmp(&a[y][col].norm())).unwrap();
        if a[pivot][col].norm() == 0.0 {
            return Complex::new(0.0, 0.0);
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for c in col..n {
                let v = a[col][c];
                a[row][c] -= factor * v;
            }
        }
    }
    det
}

