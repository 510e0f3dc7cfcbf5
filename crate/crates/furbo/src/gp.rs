//! Gaussian-process surrogate with Matérn-5/2 ARD kernel.
//!
//! One independent model per output (objective or constraint). Targets are
//! standardized internally; all posterior quantities are reported back in
//! original units. Hyperparameters are chosen by maximizing the log marginal
//! likelihood with projected gradient ascent in log-space from a default
//! start plus a few random restarts.
//!
//! Numerical policy: the training kernel matrix gets an absolute jitter
//! ladder (1e-8..1e-4) if factorization fails; posterior covariances for
//! joint sampling get a jitter ladder *relative* to their diagonal scale, so
//! a numerically-zero covariance degenerates to drawing the mean instead of
//! erroring out.

use faer::{Accum, Mat, Par};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::kernel::Matern52Ard;
use crate::linalg;

/// Smallest admissible observation-noise variance.
pub const NOISE_FLOOR: f64 = 1e-6;
const NOISE_CEIL: f64 = 1.0;
const LENGTHSCALE_BOUNDS: (f64, f64) = (5e-3, 10.0);
const SIGNAL_BOUNDS: (f64, f64) = (5e-2, 20.0);

#[derive(Debug, Clone, PartialEq)]
pub struct GpHyperparams {
    pub lengthscales: Vec<f64>,
    pub signal_variance: f64,
    pub noise_variance: f64,
}

impl GpHyperparams {
    /// Optimizer starting point: moderate lengthscales, unit signal, small noise.
    pub fn default_for_dim(dim: usize) -> Self {
        Self { lengthscales: vec![0.5; dim], signal_variance: 1.0, noise_variance: 1e-4 }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        if self.lengthscales.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: self.lengthscales.len() });
        }
        let ok = self.lengthscales.iter().all(|v| v.is_finite() && *v > 0.0)
            && self.signal_variance.is_finite()
            && self.signal_variance > 0.0
            && self.noise_variance.is_finite()
            && self.noise_variance >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig("hyperparameters must be positive and finite".into()))
        }
    }

    fn to_log(&self) -> Vec<f64> {
        let mut theta: Vec<f64> = self.lengthscales.iter().map(|v| v.ln()).collect();
        theta.push(self.signal_variance.ln());
        theta.push(self.noise_variance.ln());
        theta
    }

    fn from_log(dim: usize, theta: &[f64]) -> Self {
        Self {
            lengthscales: theta[..dim].iter().map(|v| v.exp()).collect(),
            signal_variance: theta[dim].exp(),
            noise_variance: theta[dim + 1].exp(),
        }
    }

    /// Project log-parameters into the admissible box.
    fn clamp_log(dim: usize, theta: &mut [f64]) {
        for t in theta[..dim].iter_mut() {
            *t = t.clamp(LENGTHSCALE_BOUNDS.0.ln(), LENGTHSCALE_BOUNDS.1.ln());
        }
        theta[dim] = theta[dim].clamp(SIGNAL_BOUNDS.0.ln(), SIGNAL_BOUNDS.1.ln());
        theta[dim + 1] = theta[dim + 1].clamp(NOISE_FLOOR.ln(), NOISE_CEIL.ln());
    }
}

#[derive(Debug, Clone)]
pub struct GpFitConfig {
    /// Random restarts in addition to the default start.
    pub restarts: usize,
    /// Gradient-ascent step budget per start.
    pub max_steps: usize,
    /// Stop when the gradient norm falls below this.
    pub grad_tol: f64,
}

impl Default for GpFitConfig {
    fn default() -> Self {
        Self { restarts: 3, max_steps: 200, grad_tol: 1e-5 }
    }
}

/// Joint posterior over a finite query set, in original output units.
#[derive(Debug, Clone)]
pub struct PosteriorBatch {
    pub mean: Vec<f64>,
    pub cov: Mat<f64>,
}

impl PosteriorBatch {
    /// Draw joint realizations; each draw is one function over the query set.
    pub fn sample(&self, n_draws: usize, rng: &mut impl Rng) -> Result<Vec<Vec<f64>>> {
        let m = self.mean.len();
        if m == 0 || n_draws == 0 {
            return Ok(vec![Vec::new(); n_draws]);
        }
        let (l, _) = linalg::cholesky_rel_jitter(&self.cov)?;
        // One standard-normal column per draw, drawn in draw-major order.
        let mut z = Mat::<f64>::zeros(m, n_draws);
        for d in 0..n_draws {
            for i in 0..m {
                z[(i, d)] = rng.sample(StandardNormal);
            }
        }
        let corr = &l * &z;
        Ok((0..n_draws)
            .map(|d| (0..m).map(|i| self.mean[i] + corr[(i, d)]).collect())
            .collect())
    }
}

/// A fitted Gaussian-process surrogate for one output.
pub struct SurrogateModel {
    kernel: Matern52Ard,
    noise_variance: f64,
    x: Vec<Vec<f64>>,
    y_mean: f64,
    y_std: f64,
    chol: Mat<f64>,
    alpha: Mat<f64>,
    jitter: f64,
}

impl SurrogateModel {
    /// Fit hyperparameters by marginal-likelihood ascent, then factorize.
    pub fn fit(
        x: &[Vec<f64>],
        y: &[f64],
        cfg: &GpFitConfig,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        let dim = validate_data(x, y)?;
        let data = Dataset::new(x, y);

        let mut starts = vec![GpHyperparams::default_for_dim(dim)];
        for _ in 0..cfg.restarts {
            starts.push(random_start(dim, rng));
        }

        let mut best: Option<(f64, GpHyperparams)> = None;
        for start in starts {
            match maximize_lml(&start, &data, cfg) {
                Ok((lml, hp)) if lml.is_finite() => {
                    if best.as_ref().is_none_or(|(b, _)| lml > *b) {
                        best = Some((lml, hp));
                    }
                }
                _ => {} // a failed start is skipped, not fatal
            }
        }
        let (_, hp) = best
            .ok_or_else(|| Error::InvalidData("marginal-likelihood ascent failed from every start".into()))?;
        Self::with_hyperparams(x, y, hp)
    }

    /// Build a model at fixed hyperparameters (no fitting).
    pub fn with_hyperparams(x: &[Vec<f64>], y: &[f64], hp: GpHyperparams) -> Result<Self> {
        let dim = validate_data(x, y)?;
        hp.validate(dim)?;
        let noise_variance = hp.noise_variance.max(NOISE_FLOOR);
        let kernel =
            Matern52Ard { lengthscales: hp.lengthscales, signal_variance: hp.signal_variance };

        let (y_mean, y_std) = standardize_params(y);
        let n = y.len();
        let ys = Mat::<f64>::from_fn(n, 1, |i, _| (y[i] - y_mean) / y_std);

        let (kf, _) = build_kernel_matrices(&kernel, x);
        let mut k = kf;
        for i in 0..n {
            k[(i, i)] += noise_variance;
        }
        let (chol, jitter) = linalg::cholesky_abs_jitter(&k)?;
        let alpha = linalg::chol_solve(&chol, &ys);

        Ok(Self { kernel, noise_variance, x: x.to_vec(), y_mean, y_std, chol, alpha, jitter })
    }

    pub fn hyperparams(&self) -> GpHyperparams {
        GpHyperparams {
            lengthscales: self.kernel.lengthscales.clone(),
            signal_variance: self.kernel.signal_variance,
            noise_variance: self.noise_variance,
        }
    }

    pub fn train_len(&self) -> usize {
        self.x.len()
    }

    pub fn dim(&self) -> usize {
        self.kernel.lengthscales.len()
    }

    /// Jitter that was needed to factorize the training matrix (usually 0).
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    fn check_query(&self, query: &[Vec<f64>]) -> Result<()> {
        for q in query {
            if q.len() != self.dim() {
                return Err(Error::DimensionMismatch { expected: self.dim(), got: q.len() });
            }
        }
        Ok(())
    }

    /// Posterior mean only; cheaper than [`Self::posterior`] by a factor of
    /// the query count.
    pub fn posterior_mean(&self, query: &[Vec<f64>]) -> Result<Vec<f64>> {
        self.check_query(query)?;
        Ok(query
            .iter()
            .map(|q| {
                let mut acc = 0.0;
                for (j, xj) in self.x.iter().enumerate() {
                    acc += self.kernel.value(q, xj) * self.alpha[(j, 0)];
                }
                self.y_mean + self.y_std * acc
            })
            .collect())
    }

    /// Full joint posterior (mean vector and covariance matrix) at the query
    /// points, in original units.
    pub fn posterior(&self, query: &[Vec<f64>]) -> Result<PosteriorBatch> {
        self.check_query(query)?;
        let m = query.len();
        let n = self.x.len();
        if m == 0 {
            return Ok(PosteriorBatch { mean: Vec::new(), cov: Mat::zeros(0, 0) });
        }

        let kstar = Mat::<f64>::from_fn(m, n, |i, j| self.kernel.value(&query[i], &self.x[j]));
        let mean_std = &kstar * &self.alpha;
        let mean: Vec<f64> =
            (0..m).map(|i| self.y_mean + self.y_std * mean_std[(i, 0)]).collect();

        // cov = y_std^2 (K** - V^T V) with V = L^{-1} K*^T.
        let mut v = kstar.transpose().to_owned();
        linalg::solve_lower_in_place(&self.chol, &mut v);
        let mut cov = Mat::<f64>::zeros(m, m);
        for i in 0..m {
            cov[(i, i)] = self.kernel.signal_variance;
            for j in (i + 1)..m {
                let val = self.kernel.value(&query[i], &query[j]);
                cov[(i, j)] = val;
                cov[(j, i)] = val;
            }
        }
        faer::linalg::matmul::matmul(
            cov.as_mut(),
            Accum::Add,
            v.transpose(),
            v.as_ref(),
            -1.0,
            Par::Seq,
        );
        let s2 = self.y_std * self.y_std;
        for i in 0..m {
            for j in 0..m {
                cov[(i, j)] *= s2;
            }
        }
        linalg::symmetrize_in_place(&mut cov);
        for i in 0..m {
            // Round-off can push a deterministic prediction slightly negative.
            if cov[(i, i)] < 0.0 {
                cov[(i, i)] = 0.0;
            }
        }
        Ok(PosteriorBatch { mean, cov })
    }

    /// Draw `n_draws` joint realizations over the query set.
    pub fn sample_joint(
        &self,
        query: &[Vec<f64>],
        n_draws: usize,
        rng: &mut impl Rng,
    ) -> Result<Vec<Vec<f64>>> {
        self.posterior(query)?.sample(n_draws, rng)
    }
}

/// Log marginal likelihood of `y` under the GP at `hp`, plus its gradient
/// with respect to the log-hyperparameters, ordered
/// `(log l_1 .. log l_D, log signal_variance, log noise_variance)`.
///
/// Operates on `y` exactly as given; standardization is the caller's choice.
pub fn log_marginal_likelihood(
    hp: &GpHyperparams,
    x: &[Vec<f64>],
    y: &[f64],
) -> Result<(f64, Vec<f64>)> {
    let dim = validate_data(x, y)?;
    hp.validate(dim)?;
    let data = Dataset::raw(x, y);
    lml_and_grad(hp, &data)
}

/// Training data with the target column already standardized (or not, for
/// the public likelihood entry point).
struct Dataset {
    x: Vec<Vec<f64>>,
    x_mat: Mat<f64>,
    y: Mat<f64>,
}

impl Dataset {
    fn new(x: &[Vec<f64>], y: &[f64]) -> Self {
        let (y_mean, y_std) = standardize_params(y);
        let std_y: Vec<f64> = y.iter().map(|v| (v - y_mean) / y_std).collect();
        Self::raw(x, &std_y)
    }

    fn raw(x: &[Vec<f64>], y: &[f64]) -> Self {
        let n = x.len();
        let dim = x[0].len();
        Self {
            x: x.to_vec(),
            x_mat: Mat::from_fn(n, dim, |i, j| x[i][j]),
            y: Mat::from_fn(n, 1, |i, _| y[i]),
        }
    }

    fn len(&self) -> usize {
        self.x.len()
    }

    fn dim(&self) -> usize {
        self.x[0].len()
    }
}

fn validate_data(x: &[Vec<f64>], y: &[f64]) -> Result<usize> {
    if x.is_empty() {
        return Err(Error::InvalidData("empty training set".into()));
    }
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
    }
    let dim = x[0].len();
    if dim == 0 {
        return Err(Error::InvalidData("zero-dimensional inputs".into()));
    }
    for row in x {
        if row.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: row.len() });
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidData("non-finite training input".into()));
        }
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidData("non-finite training target".into()));
    }
    Ok(dim)
}

/// Mean and scale used for target standardization. The scale falls back to 1
/// for singleton or constant targets.
fn standardize_params(y: &[f64]) -> (f64, f64) {
    let n = y.len();
    let mean = y.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 1.0);
    }
    let var = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    let std = var.sqrt();
    if std > 1e-12 {
        (mean, std)
    } else {
        (mean, 1.0)
    }
}

fn random_start(dim: usize, rng: &mut impl Rng) -> GpHyperparams {
    let mut draw = |lo: f64, hi: f64| rng.random_range(lo.ln()..hi.ln()).exp();
    let lengthscales = (0..dim).map(|_| draw(0.05, 2.0)).collect();
    let signal_variance = draw(0.2, 5.0);
    let noise_variance = draw(1e-6, 1e-2);
    GpHyperparams { lengthscales, signal_variance, noise_variance }
}

/// Kernel matrix (signal part only, no noise) and pairwise scaled distances.
fn build_kernel_matrices(kernel: &Matern52Ard, x: &[Vec<f64>]) -> (Mat<f64>, Mat<f64>) {
    let n = x.len();
    let mut kf = Mat::<f64>::zeros(n, n);
    let mut dist = Mat::<f64>::zeros(n, n);
    for i in 0..n {
        kf[(i, i)] = kernel.signal_variance;
        for j in (i + 1)..n {
            let d = kernel.distance(&x[i], &x[j]);
            let v = kernel.value_at(d);
            dist[(i, j)] = d;
            dist[(j, i)] = d;
            kf[(i, j)] = v;
            kf[(j, i)] = v;
        }
    }
    (kf, dist)
}

/// Likelihood value only (used by the line search).
fn lml_value(hp: &GpHyperparams, data: &Dataset) -> Result<f64> {
    let n = data.len();
    let kernel = Matern52Ard {
        lengthscales: hp.lengthscales.clone(),
        signal_variance: hp.signal_variance,
    };
    let (mut k, _) = build_kernel_matrices(&kernel, &data.x);
    for i in 0..n {
        k[(i, i)] += hp.noise_variance;
    }
    let (chol, _) = linalg::cholesky_abs_jitter(&k)?;
    let alpha = linalg::chol_solve(&chol, &data.y);
    let mut fit_term = 0.0;
    let mut logdet_half = 0.0;
    for i in 0..n {
        fit_term += data.y[(i, 0)] * alpha[(i, 0)];
        logdet_half += chol[(i, i)].ln();
    }
    Ok(-0.5 * fit_term - logdet_half - 0.5 * n as f64 * (2.0 * std::f64::consts::PI).ln())
}

/// Likelihood value and gradient w.r.t. log-hyperparameters.
///
/// Uses W = alpha alpha^T - K^{-1}; the lengthscale components collapse to
/// one elementwise pass plus a single (N x N)(N x D) product:
///   g_j = (1 / l_j^2) * sum_i x_ij^2 s_i - x_ij (E x_col_j)_i,
/// with E = W .* grad_factor(dist) and s the row sums of E.
fn lml_and_grad(hp: &GpHyperparams, data: &Dataset) -> Result<(f64, Vec<f64>)> {
    let n = data.len();
    let dim = data.dim();
    let kernel = Matern52Ard {
        lengthscales: hp.lengthscales.clone(),
        signal_variance: hp.signal_variance,
    };
    let (kf, dist) = build_kernel_matrices(&kernel, &data.x);
    let mut k = kf.clone();
    for i in 0..n {
        k[(i, i)] += hp.noise_variance;
    }
    let (chol, _) = linalg::cholesky_abs_jitter(&k)?;
    let alpha = linalg::chol_solve(&chol, &data.y);

    let mut fit_term = 0.0;
    let mut logdet_half = 0.0;
    for i in 0..n {
        fit_term += data.y[(i, 0)] * alpha[(i, 0)];
        logdet_half += chol[(i, i)].ln();
    }
    let lml = -0.5 * fit_term - logdet_half - 0.5 * n as f64 * (2.0 * std::f64::consts::PI).ln();

    let kinv = linalg::chol_solve(&chol, &Mat::<f64>::identity(n, n));
    let mut e = Mat::<f64>::zeros(n, n);
    let mut grad_signal = 0.0;
    let mut trace_w = 0.0;
    for i in 0..n {
        for j in 0..n {
            let w = alpha[(i, 0)] * alpha[(j, 0)] - kinv[(i, j)];
            e[(i, j)] = w * kernel.grad_factor(dist[(i, j)]);
            grad_signal += w * kf[(i, j)];
            if i == j {
                trace_w += w;
            }
        }
    }
    grad_signal *= 0.5;
    let grad_noise = 0.5 * hp.noise_variance * trace_w;

    let ex = &e * &data.x_mat;
    let mut row_sums = vec![0.0_f64; n];
    for i in 0..n {
        let mut s = 0.0;
        for j in 0..n {
            s += e[(i, j)];
        }
        row_sums[i] = s;
    }
    let mut grad = Vec::with_capacity(dim + 2);
    for j in 0..dim {
        let lj2 = hp.lengthscales[j] * hp.lengthscales[j];
        let mut acc = 0.0;
        for i in 0..n {
            let xij = data.x[i][j];
            acc += xij * xij * row_sums[i] - xij * ex[(i, j)];
        }
        grad.push(acc / lj2);
    }
    grad.push(grad_signal);
    grad.push(grad_noise);
    Ok((lml, grad))
}

/// Projected gradient ascent with a backtracking line search. Stops on the
/// gradient-norm tolerance, the step budget, or a fully collapsed step.
fn maximize_lml(
    start: &GpHyperparams,
    data: &Dataset,
    cfg: &GpFitConfig,
) -> Result<(f64, GpHyperparams)> {
    let dim = data.dim();
    let mut theta = start.to_log();
    GpHyperparams::clamp_log(dim, &mut theta);

    let (mut current, mut grad) = lml_and_grad(&GpHyperparams::from_log(dim, &theta), data)?;
    if !current.is_finite() {
        return Err(Error::InvalidData("non-finite likelihood at start".into()));
    }
    let mut step = 0.1;
    for _ in 0..cfg.max_steps {
        let grad_norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if grad_norm < cfg.grad_tol {
            break;
        }
        // Backtrack along the (normalized) gradient until the likelihood improves.
        let dir: Vec<f64> = grad.iter().map(|g| g / grad_norm).collect();
        let mut t = step;
        let mut accepted = false;
        while t >= 1e-12 {
            let mut trial = theta.clone();
            for (v, d) in trial.iter_mut().zip(&dir) {
                *v += t * d;
            }
            GpHyperparams::clamp_log(dim, &mut trial);
            let hp_trial = GpHyperparams::from_log(dim, &trial);
            if let Ok(value) = lml_value(&hp_trial, data) {
                if value.is_finite() && value > current {
                    theta = trial;
                    let refreshed = lml_and_grad(&GpHyperparams::from_log(dim, &theta), data)?;
                    current = refreshed.0;
                    grad = refreshed.1;
                    step = (t * 2.0).min(1.0);
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break; // no improving step in any admissible direction scale
        }
    }
    Ok((current, GpHyperparams::from_log(dim, &theta)))
}
