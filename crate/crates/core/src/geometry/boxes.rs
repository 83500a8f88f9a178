use crate::scalar::ExactScalar;

use super::{format_point, GeometryError, LatticeVector, Piece, Shape};

/// `∏ [lo_i, hi_i)` with `lo_i < hi_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HalfOpenBox<S> {
    lo: Vec<S>,
    hi: Vec<S>,
}

impl<S: ExactScalar> HalfOpenBox<S> {
    pub fn new(lo: Vec<S>, hi: Vec<S>) -> Result<Self, GeometryError> {
        if lo.len() != hi.len() {
            return Err(GeometryError::DimensionMismatch { expected: lo.len(), found: hi.len() });
        }
        if lo.is_empty() {
            return Err(GeometryError::DimensionMismatch { expected: 1, found: 0 });
        }
        for (axis, (l, h)) in lo.iter().zip(&hi).enumerate() {
            if l >= h {
                return Err(GeometryError::EmptyBox { axis, lo: l.to_string(), hi: h.to_string() });
            }
        }
        Ok(Self { lo, hi })
    }

    /// `[0,1)^d`
    pub fn unit(dim: usize) -> Self {
        Self { lo: vec![S::zero(); dim], hi: vec![S::one(); dim] }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[S] {
        &self.lo
    }

    pub fn hi(&self) -> &[S] {
        &self.hi
    }

    pub fn measure(&self) -> S {
        self.lo.iter().zip(&self.hi).fold(S::one(), |acc, (l, h)| acc * (h.clone() - l.clone()))
    }

    pub fn contains(&self, point: &[S]) -> bool {
        point.len() == self.dim() && self.lo.iter().zip(&self.hi).zip(point).all(|((l, h), x)| l <= x && x < h)
    }

    pub fn center(&self) -> Vec<S> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| (l.clone() + h.clone()) * S::half()).collect()
    }

    /// Intersection, if it has positive measure.
    pub fn intersection(&self, other: &Self) -> Option<Self> {
        if self.dim() != other.dim() {
            return None;
        }
        let lo: Vec<S> = self.lo.iter().zip(&other.lo).map(|(a, b)| a.max(b).clone()).collect();
        let hi: Vec<S> = self.hi.iter().zip(&other.hi).map(|(a, b)| a.min(b).clone()).collect();
        if lo.iter().zip(&hi).all(|(l, h)| l < h) {
            Some(Self { lo, hi })
        } else {
            None
        }
    }

    pub fn translated(&self, t: &[i64]) -> Self {
        Self { lo: super::shift_point(&self.lo, t), hi: super::shift_point(&self.hi, t) }
    }

    /// Split along integer hyperplanes; each part is moved into `[0,1)^d`.
    fn reduce_mod_unit_lattice(&self) -> Vec<Piece<S>> {
        // per axis: (integer shift, [lo, hi) relative to the shift)
        let per_axis: Vec<Vec<(i64, S, S)>> = self
            .lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| {
                (l.floor_i64()..h.ceil_i64())
                    .filter_map(|n| {
                        let base = S::from_i64(n);
                        let a = l.clone().max(base.clone()) - base.clone();
                        let b = h.clone().min(base.clone() + S::one()) - base;
                        (a < b).then_some((n, a, b))
                    })
                    .collect()
            })
            .collect();

        let mut out = Vec::new();
        let mut idx = vec![0usize; self.dim()];
        if per_axis.iter().any(|v| v.is_empty()) {
            return out;
        }
        loop {
            let mut lo = Vec::with_capacity(self.dim());
            let mut hi = Vec::with_capacity(self.dim());
            let mut t = Vec::with_capacity(self.dim());
            for (axis, &i) in idx.iter().enumerate() {
                let (n, a, b) = &per_axis[axis][i];
                t.push(*n);
                lo.push(a.clone());
                hi.push(b.clone());
            }
            out.push(Piece { shape: Shape::Box(HalfOpenBox { lo, hi }), translate: LatticeVector(t) });

            // odometer, last axis fastest
            let mut axis = self.dim();
            loop {
                if axis == 0 {
                    return out;
                }
                axis -= 1;
                idx[axis] += 1;
                if idx[axis] < per_axis[axis].len() {
                    break;
                }
                idx[axis] = 0;
            }
        }
    }
}

/// A finite union of pairwise disjoint half-open boxes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxUnion<S> {
    dim: usize,
    boxes: Vec<HalfOpenBox<S>>,
}

/// Validate that `boxes` are pairwise disjoint and put them in canonical order.
///
/// Touching boxes are disjoint under the half-open convention; a positive
/// measure overlap is reported with a witness point inside it.
pub fn normalize_box_union<S: ExactScalar>(boxes: Vec<HalfOpenBox<S>>) -> Result<BoxUnion<S>, GeometryError> {
    let dim = boxes.first().ok_or(GeometryError::EmptyRegion)?.dim();
    for b in &boxes {
        if b.dim() != dim {
            return Err(GeometryError::DimensionMismatch { expected: dim, found: b.dim() });
        }
    }
    for i in 0..boxes.len() {
        for j in i + 1..boxes.len() {
            if let Some(common) = boxes[i].intersection(&boxes[j]) {
                return Err(GeometryError::Overlap {
                    first: i,
                    second: j,
                    witness: format_point(&common.center()),
                });
            }
        }
    }
    let mut boxes = boxes;
    boxes.sort_by(|a, b| a.lo.cmp(&b.lo).then_with(|| a.hi.cmp(&b.hi)));
    Ok(BoxUnion { dim, boxes })
}

impl<S: ExactScalar> BoxUnion<S> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn boxes(&self) -> &[HalfOpenBox<S>] {
        &self.boxes
    }

    pub fn measure(&self) -> S {
        self.boxes.iter().map(|b| b.measure()).fold(S::zero(), |a, b| a + b)
    }

    pub fn contains(&self, point: &[S]) -> bool {
        self.boxes.iter().any(|b| b.contains(point))
    }

    pub fn bounding_box(&self) -> (Vec<S>, Vec<S>) {
        let mut lo = self.boxes[0].lo.clone();
        let mut hi = self.boxes[0].hi.clone();
        for b in &self.boxes[1..] {
            for i in 0..self.dim {
                if b.lo[i] < lo[i] {
                    lo[i] = b.lo[i].clone();
                }
                if b.hi[i] > hi[i] {
                    hi[i] = b.hi[i].clone();
                }
            }
        }
        (lo, hi)
    }

    pub fn translated(&self, t: &[i64]) -> Self {
        Self { dim: self.dim, boxes: self.boxes.iter().map(|b| b.translated(t)).collect() }
    }

    /// Union with a disjoint box union.
    pub fn disjoint_union(&self, other: &Self) -> Result<Self, GeometryError> {
        let mut all = self.boxes.clone();
        all.extend(other.boxes.iter().cloned());
        normalize_box_union(all)
    }

    pub(super) fn reduce_mod_unit_lattice(&self) -> Vec<Piece<S>> {
        self.boxes.iter().flat_map(|b| b.reduce_mod_unit_lattice()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn iv(lo: i64, hi: i64) -> HalfOpenBox<Rational> {
        HalfOpenBox::new(vec![Rational::from_i64(lo)], vec![Rational::from_i64(hi)]).unwrap()
    }

    #[test]
    fn single_unit_interval() {
        let u = normalize_box_union(vec![iv(0, 1)]).unwrap();
        assert_eq!(u.measure(), Rational::from_i64(1));
    }

    #[test]
    fn touching_squares_are_disjoint() {
        let a = HalfOpenBox::new(vec![Rational::from_i64(0); 2], vec![Rational::from_i64(1); 2]).unwrap();
        let b = a.translated(&[1, 0]);
        let u = normalize_box_union(vec![a, b]).unwrap();
        assert_eq!(u.measure(), Rational::from_i64(2));
    }

    #[test]
    fn overlap_reports_midpoint_witness() {
        let err = normalize_box_union(vec![iv(0, 2), iv(1, 3)]).unwrap_err();
        match err {
            GeometryError::Overlap { witness, .. } => assert_eq!(witness, "(3/2)"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_box_is_rejected() {
        let err = HalfOpenBox::new(vec![Rational::from_i64(1)], vec![Rational::from_i64(1)]).unwrap_err();
        assert!(matches!(err, GeometryError::EmptyBox { axis: 0, .. }));
    }

    #[test]
    fn half_open_membership() {
        let b = iv(0, 1);
        assert!(b.contains(&[Rational::from_i64(0)]));
        assert!(!b.contains(&[Rational::from_i64(1)]));
    }

    #[test]
    fn reduction_splits_a_square_into_four() {
        let half = Rational::from_fraction(1, 2);
        let b = HalfOpenBox::new(vec![half.clone(), half.clone()], vec![half.clone() + Rational::from_i64(1); 2])
            .unwrap();
        let pieces = b.reduce_mod_unit_lattice();
        assert_eq!(pieces.len(), 4);
        let total: Rational = pieces.iter().map(|p| p.shape.measure()).sum();
        assert_eq!(total, Rational::from_i64(1));
    }
}
