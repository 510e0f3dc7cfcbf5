//! Axis-aligned boxes inside the unit cube.

/// An axis-aligned trust region, always stored clipped to `[0,1]^D`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrustRegion {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl TrustRegion {
    /// Build from explicit corners, clipping to the unit cube.
    /// Panics if lengths differ or any `lo > hi` after clipping.
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        assert_eq!(lo.len(), hi.len(), "corner length mismatch");
        let lo: Vec<f64> = lo.iter().map(|&v| v.clamp(0.0, 1.0)).collect();
        let hi: Vec<f64> = hi.iter().map(|&v| v.clamp(0.0, 1.0)).collect();
        for (l, h) in lo.iter().zip(&hi) {
            assert!(l <= h, "empty trust region: lo {l} > hi {h}");
        }
        Self { lo, hi }
    }

    /// The whole unit cube.
    pub fn unit(dim: usize) -> Self {
        Self { lo: vec![0.0; dim], hi: vec![1.0; dim] }
    }

    /// Tight bounding box of a non-empty point collection, clipped to the cube.
    pub fn bounding_box<'a>(points: impl IntoIterator<Item = &'a [f64]>) -> Self {
        let mut iter = points.into_iter();
        let first = iter.next().expect("bounding box of an empty point set");
        let mut lo = first.to_vec();
        let mut hi = first.to_vec();
        for p in iter {
            assert_eq!(p.len(), lo.len(), "point dimension mismatch");
            for j in 0..lo.len() {
                lo[j] = lo[j].min(p[j]);
                hi[j] = hi[j].max(p[j]);
            }
        }
        Self::new(lo, hi)
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn width(&self, j: usize) -> f64 {
        self.hi[j] - self.lo[j]
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim()
            && p.iter()
                .enumerate()
                .all(|(j, &v)| v >= self.lo[j] && v <= self.hi[j])
    }

    /// Map a unit-cube point into this box coordinate-wise.
    /// Clamped so results stay inside even under floating-point rounding.
    pub fn rescale(&self, u: &[f64]) -> Vec<f64> {
        assert_eq!(u.len(), self.dim());
        (0..self.dim())
            .map(|j| (self.lo[j] + u[j] * self.width(j)).clamp(self.lo[j], self.hi[j]))
            .collect()
    }
}
