//! Matérn-5/2 kernel with automatic relevance determination.
//!
//! `k(a, b) = s2 * (1 + sqrt(5) d + 5 d^2 / 3) * exp(-sqrt(5) d)` where
//! `d^2 = sum_j (a_j - b_j)^2 / l_j^2`. The helpers expose the pieces the
//! marginal-likelihood gradient needs so the expensive pairwise pass over the
//! data happens once.

pub const SQRT5: f64 = 2.23606797749979;

#[derive(Debug, Clone, PartialEq)]
pub struct Matern52Ard {
    pub lengthscales: Vec<f64>,
    pub signal_variance: f64,
}

impl Matern52Ard {
    /// Scaled distance between two points.
    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), self.lengthscales.len());
        debug_assert_eq!(b.len(), self.lengthscales.len());
        let mut d2 = 0.0;
        for j in 0..a.len() {
            let r = (a[j] - b[j]) / self.lengthscales[j];
            d2 += r * r;
        }
        d2.sqrt()
    }

    /// Kernel value at scaled distance `d`.
    pub fn value_at(&self, d: f64) -> f64 {
        self.signal_variance * (1.0 + SQRT5 * d + 5.0 * d * d / 3.0) * (-SQRT5 * d).exp()
    }

    pub fn value(&self, a: &[f64], b: &[f64]) -> f64 {
        self.value_at(self.distance(a, b))
    }

    /// Common factor of the lengthscale derivatives at scaled distance `d`:
    /// `dk/d(log l_j) = grad_factor(d) * (a_j - b_j)^2 / l_j^2`.
    pub fn grad_factor(&self, d: f64) -> f64 {
        (5.0 / 3.0) * self.signal_variance * (1.0 + SQRT5 * d) * (-SQRT5 * d).exp()
    }
}
