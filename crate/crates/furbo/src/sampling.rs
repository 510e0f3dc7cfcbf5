//! Seeded randomness and space-filling sample generation.
//!
//! All stochastic components draw from [`RngStream`]s: counter-based ChaCha12
//! generators addressed by `(seed, stream_id)`. Two streams with the same
//! address produce bit-identical sequences; distinct addresses are
//! statistically independent. Single-threaded consumers therefore replay
//! runs exactly.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::region::TrustRegion;

/// Address of a deterministic random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// Instantiate the generator for this address.
    pub fn rng(&self) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Hard limits of the underlying Owen-scrambled Sobol generator.
const SOBOL_MAX_POINTS: usize = 1 << 16;
const SOBOL_MAX_DIM: usize = 256;

/// `n` points of an Owen-scrambled Sobol sequence in `[0,1)^dim`.
///
/// The scramble seed is drawn from `rng`, so repeated calls on one stream
/// yield fresh, decorrelated designs while staying fully reproducible.
pub fn sobol_doe(n: usize, dim: usize, rng: &mut impl RngCore) -> Result<Vec<Vec<f64>>> {
    if n > SOBOL_MAX_POINTS {
        return Err(Error::SobolLimit(format!("{n} points > {SOBOL_MAX_POINTS}")));
    }
    if dim > SOBOL_MAX_DIM {
        return Err(Error::SobolLimit(format!("{dim} dimensions > {SOBOL_MAX_DIM}")));
    }
    let scramble: u32 = rng.next_u32();
    let n_chunks = dim.div_ceil(4);
    let mut points = Vec::with_capacity(n);
    for i in 0..n {
        let mut p = Vec::with_capacity(dim);
        for chunk in 0..n_chunks {
            let vals = sobol_burley::sample_4d(i as u32, chunk as u32, scramble);
            for comp in 0..4 {
                if p.len() < dim {
                    p.push(vals[comp] as f64);
                }
            }
        }
        points.push(p);
    }
    Ok(points)
}

/// Uniform points in the unit cube (plain Monte Carlo, for random search).
pub fn uniform_points(n: usize, dim: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..dim).map(|_| rng.random_range(0.0..1.0)).collect())
        .collect()
}

/// `n` points in the ball of radius `radius` around `center`, clipped to the
/// unit cube.
///
/// Each point is built as an isotropic Gaussian draw (scale `sigma`)
/// normalized to the unit sphere, scaled by an independent uniform radius in
/// `[0, radius]`, and translated to `center`. The radial profile is uniform
/// in distance (center-biased relative to volume-uniform sampling), which is
/// intentional: inspectors should probe near the incumbent more densely.
/// Before clipping, every point satisfies `|p - center| <= radius`.
pub fn sample_ball(
    center: &[f64],
    radius: f64,
    n: usize,
    sigma: f64,
    rng: &mut impl Rng,
) -> Vec<Vec<f64>> {
    assert!(radius >= 0.0 && sigma > 0.0);
    let dim = center.len();
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        let mut dir = vec![0.0_f64; dim];
        loop {
            let mut norm_sq = 0.0;
            for d in dir.iter_mut() {
                let g: f64 = rng.sample(StandardNormal);
                *d = sigma * g;
                norm_sq += *d * *d;
            }
            if norm_sq > 0.0 {
                let norm = norm_sq.sqrt();
                for d in dir.iter_mut() {
                    *d /= norm;
                }
                break;
            }
        }
        let scale = rng.random_range(0.0..=radius);
        let p: Vec<f64> = center
            .iter()
            .zip(&dir)
            .map(|(&c, &d)| (c + scale * d).clamp(0.0, 1.0))
            .collect();
        points.push(p);
    }
    points
}

/// Scrambled-Sobol candidate set rescaled into a trust region.
///
/// Zero-width dimensions collapse to the region's coordinate; every returned
/// point lies inside `tr` exactly (rescaling clamps against rounding).
pub fn candidates_in_tr(
    tr: &TrustRegion,
    r_count: usize,
    rng: &mut impl RngCore,
) -> Result<Vec<Vec<f64>>> {
    let base = sobol_doe(r_count, tr.dim(), rng)?;
    Ok(base.iter().map(|u| tr.rescale(u)).collect())
}
