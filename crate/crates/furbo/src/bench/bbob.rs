//! Self-contained constrained test instances on classic BBOB-style functions.
//!
//! Each instance pairs a shifted (optionally rotated) base function on
//! `[-5,5]^D` with a set of `K` linear constraints built around a feasible
//! anchor `x_c`: the first constraint gradient is the negated objective
//! gradient at `x_c` (making `x_c` a KKT point of the active set), further
//! active constraints are rotations of it within 80 degrees, and inactive
//! constraints get a uniform positive slack. Severity levels scale the
//! total and active constraint counts. Generation rejection-samples `x_c`
//! until the feasible region is demonstrably non-degenerate.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::problem::Problem;
use crate::sampling::RngStream;

/// Base objective, evaluated on `z = R (x - x_opt)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseFunction {
    Sphere,
    Ellipsoid,
    Linear,
    ElliRot,
    Discus,
    BentCigar,
    DiffPower,
    Rastrigin,
    RastRot,
}

impl BaseFunction {
    pub const ALL: [BaseFunction; 9] = [
        BaseFunction::Sphere,
        BaseFunction::Ellipsoid,
        BaseFunction::Linear,
        BaseFunction::ElliRot,
        BaseFunction::Discus,
        BaseFunction::BentCigar,
        BaseFunction::DiffPower,
        BaseFunction::Rastrigin,
        BaseFunction::RastRot,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            BaseFunction::Sphere => "sphere",
            BaseFunction::Ellipsoid => "ellipsoid",
            BaseFunction::Linear => "linear",
            BaseFunction::ElliRot => "elli_rot",
            BaseFunction::Discus => "discus",
            BaseFunction::BentCigar => "bent_cigar",
            BaseFunction::DiffPower => "diff_power",
            BaseFunction::Rastrigin => "rastrigin",
            BaseFunction::RastRot => "rast_rot",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|f| f.name() == name)
    }

    /// Whether instances apply a random rotation (otherwise `R = I`).
    pub fn rotated(&self) -> bool {
        matches!(self, BaseFunction::ElliRot | BaseFunction::RastRot)
    }

    /// Conditioning exponent helper: `base^{(i-1)/(D-1)}`, with the 1-D
    /// degenerate case mapped to exponent zero.
    fn power(i: usize, dim: usize, exponent: f64) -> f64 {
        if dim <= 1 {
            1.0
        } else {
            10f64.powf(exponent * i as f64 / (dim - 1) as f64)
        }
    }

    /// Canonical value at `z`; zero at `z = 0` for every variant.
    pub fn value(&self, z: &[f64]) -> f64 {
        let d = z.len();
        match self {
            BaseFunction::Sphere => z.iter().map(|v| v * v).sum(),
            BaseFunction::Ellipsoid | BaseFunction::ElliRot => z
                .iter()
                .enumerate()
                .map(|(i, v)| Self::power(i, d, 6.0) * v * v)
                .sum(),
            BaseFunction::Linear => z
                .iter()
                .enumerate()
                .map(|(i, v)| Self::power(i, d, 1.0) * v)
                .sum(),
            BaseFunction::Discus => {
                1e6 * z[0] * z[0] + z.iter().skip(1).map(|v| v * v).sum::<f64>()
            }
            BaseFunction::BentCigar => {
                z[0] * z[0] + 1e6 * z.iter().skip(1).map(|v| v * v).sum::<f64>()
            }
            BaseFunction::DiffPower => z
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let p = if d <= 1 { 2.0 } else { 2.0 + 4.0 * i as f64 / (d - 1) as f64 };
                    v.abs().powf(p)
                })
                .sum(),
            BaseFunction::Rastrigin | BaseFunction::RastRot => {
                let cos_sum: f64 = z.iter().map(|v| (2.0 * std::f64::consts::PI * v).cos()).sum();
                10.0 * (d as f64 - cos_sum) + z.iter().map(|v| v * v).sum::<f64>()
            }
        }
    }

    /// Gradient with respect to `z`.
    pub fn gradient(&self, z: &[f64]) -> Vec<f64> {
        let d = z.len();
        match self {
            BaseFunction::Sphere => z.iter().map(|v| 2.0 * v).collect(),
            BaseFunction::Ellipsoid | BaseFunction::ElliRot => z
                .iter()
                .enumerate()
                .map(|(i, v)| 2.0 * Self::power(i, d, 6.0) * v)
                .collect(),
            BaseFunction::Linear => {
                (0..d).map(|i| Self::power(i, d, 1.0)).collect()
            }
            BaseFunction::Discus => z
                .iter()
                .enumerate()
                .map(|(i, v)| if i == 0 { 2e6 * v } else { 2.0 * v })
                .collect(),
            BaseFunction::BentCigar => z
                .iter()
                .enumerate()
                .map(|(i, v)| if i == 0 { 2.0 * v } else { 2e6 * v })
                .collect(),
            BaseFunction::DiffPower => z
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let p = if d <= 1 { 2.0 } else { 2.0 + 4.0 * i as f64 / (d - 1) as f64 };
                    if *v == 0.0 { 0.0 } else { p * v.abs().powf(p - 1.0) * v.signum() }
                })
                .collect(),
            BaseFunction::Rastrigin | BaseFunction::RastRot => z
                .iter()
                .map(|v| {
                    20.0 * std::f64::consts::PI * (2.0 * std::f64::consts::PI * v).sin() + 2.0 * v
                })
                .collect(),
        }
    }
}

/// Total and active constraint counts for a severity level (0..=5).
pub fn severity_counts(severity: usize, dim: usize) -> Result<(usize, usize)> {
    if severity > 5 {
        return Err(Error::InvalidConfig(format!("severity {severity} out of range 0..=5")));
    }
    let total = match severity {
        0 => 1,
        1 => 3,
        2 => 9,
        3 => 9 + 3 * dim / 4,
        4 => 9 + 3 * dim / 2,
        _ => 9 + 9 * dim / 2,
    };
    let active = match severity {
        0 => 1,
        1 => 2,
        2 => 6,
        3 => 6 + dim / 2,
        4 => 6 + dim,
        _ => 6 + 3 * dim,
    };
    Ok((total, active.min(total)))
}

const DOMAIN: (f64, f64) = (-5.0, 5.0);
const MAX_ATTEMPTS: usize = 100;
const VOLUME_SAMPLES: usize = 100_000;
/// Accept when at least 0.01% of the volume samples are feasible.
const VOLUME_MIN_HITS: usize = VOLUME_SAMPLES / 10_000;
const BALL_SAMPLES: usize = 1000;
const BALL_RADIUS: f64 = 0.1; // 1% of the domain width
const MAX_ACTIVE_ANGLE_DEG: f64 = 80.0;

/// One generated constrained instance, fully determined by
/// `(function, dim, severity, seed)`.
#[derive(Debug, Clone)]
pub struct BbobInstance {
    function: BaseFunction,
    dim: usize,
    severity: usize,
    seed: u64,
    /// Row-major rotation matrix, `None` for unrotated functions.
    rotation: Option<Vec<Vec<f64>>>,
    x_opt: Vec<f64>,
    x_c: Vec<f64>,
    /// K x D constraint gradients in native coordinates.
    gradients: Vec<Vec<f64>>,
    /// Non-negative offsets; zero marks an active constraint.
    offsets: Vec<f64>,
    n_active: usize,
    f_at_xc: f64,
}

impl BbobInstance {
    pub fn generate(
        function: BaseFunction,
        dim: usize,
        severity: usize,
        seed: u64,
    ) -> Result<Self> {
        assert!(dim >= 1, "instance dimension must be positive");
        let (k_total, n_active) = severity_counts(severity, dim)?;
        let mut rng = RngStream::new(seed, 0).rng();

        let x_opt: Vec<f64> = (0..dim).map(|_| rng.random_range(-4.0..4.0)).collect();
        let rotation = function.rotated().then(|| random_orthogonal(dim, &mut rng));

        let geometry = InstanceGeometry { function, rotation: &rotation, x_opt: &x_opt };
        for _ in 0..MAX_ATTEMPTS {
            let x_c: Vec<f64> = (0..dim).map(|_| rng.random_range(-2.5..2.5)).collect();
            let grad_f = geometry.gradient(&x_c);
            let g1_norm = norm(&grad_f);
            if g1_norm < 1e-9 {
                continue; // stationary anchor; constraints would be degenerate
            }
            let g1: Vec<f64> = grad_f.iter().map(|v| -v).collect();
            let e1: Vec<f64> = g1.iter().map(|v| v / g1_norm).collect();

            let mut gradients = Vec::with_capacity(k_total);
            let mut offsets = Vec::with_capacity(k_total);
            gradients.push(g1.clone());
            offsets.push(0.0);
            for _ in 1..n_active {
                gradients.push(angled_direction(&e1, g1_norm, &mut rng));
                offsets.push(0.0);
            }
            for _ in n_active..k_total {
                let dir = random_unit(dim, &mut rng);
                gradients.push(dir.iter().map(|v| v * g1_norm).collect());
                offsets.push(rng.random_range(0.1..1.0));
            }

            if feasible_region_viable(&gradients, &offsets, &x_c, dim, &mut rng) {
                let f_at_xc = geometry.value(&x_c);
                return Ok(Self {
                    function,
                    dim,
                    severity,
                    seed,
                    rotation,
                    x_opt,
                    x_c,
                    gradients,
                    offsets,
                    n_active,
                    f_at_xc,
                });
            }
        }
        Err(Error::DegenerateConstraints { attempts: MAX_ATTEMPTS })
    }

    pub fn function(&self) -> BaseFunction {
        self.function
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn severity(&self) -> usize {
        self.severity
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n_constraints(&self) -> usize {
        self.gradients.len()
    }

    pub fn n_active(&self) -> usize {
        self.n_active
    }

    /// Feasible anchor in native coordinates.
    pub fn x_c(&self) -> &[f64] {
        &self.x_c
    }

    /// Objective value at the anchor; used as the loss reference.
    pub fn f_at_xc(&self) -> f64 {
        self.f_at_xc
    }

    pub fn constraint_gradients(&self) -> &[Vec<f64>] {
        &self.gradients
    }

    /// Objective at a native-coordinate point.
    pub fn objective(&self, x: &[f64]) -> f64 {
        InstanceGeometry { function: self.function, rotation: &self.rotation, x_opt: &self.x_opt }
            .value(x)
    }

    /// Constraint values at a native-coordinate point.
    pub fn constraints(&self, x: &[f64]) -> Vec<f64> {
        eval_linear_constraints(&self.gradients, &self.offsets, &self.x_c, x)
    }

    /// Package as a [`Problem`] on `[-5,5]^D` with the anchor value as the
    /// loss reference.
    pub fn problem(&self) -> Problem {
        let name = format!(
            "{}_d{}_s{}_i{}",
            self.function.name(),
            self.dim,
            self.severity,
            self.seed
        );
        let for_objective = self.clone();
        let for_constraints = self.clone();
        Problem::new(
            name,
            vec![DOMAIN; self.dim],
            self.n_constraints(),
            move |x| for_objective.objective(x),
            move |x| for_constraints.constraints(x),
        )
        .with_optimum(self.f_at_xc)
    }
}

/// Shift/rotation plumbing shared by generation and evaluation.
struct InstanceGeometry<'a> {
    function: BaseFunction,
    rotation: &'a Option<Vec<Vec<f64>>>,
    x_opt: &'a [f64],
}

impl InstanceGeometry<'_> {
    fn to_z(&self, x: &[f64]) -> Vec<f64> {
        let shifted: Vec<f64> = x.iter().zip(self.x_opt).map(|(a, b)| a - b).collect();
        match self.rotation {
            Some(r) => r.iter().map(|row| dot(row, &shifted)).collect(),
            None => shifted,
        }
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.function.value(&self.to_z(x))
    }

    /// Native-space gradient: `R^T (dF/dz)`.
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let gz = self.function.gradient(&self.to_z(x));
        match self.rotation {
            Some(r) => {
                let d = gz.len();
                (0..d).map(|j| (0..d).map(|i| r[i][j] * gz[i]).sum()).collect()
            }
            None => gz,
        }
    }
}

fn eval_linear_constraints(
    gradients: &[Vec<f64>],
    offsets: &[f64],
    x_c: &[f64],
    x: &[f64],
) -> Vec<f64> {
    let dx: Vec<f64> = x.iter().zip(x_c).map(|(a, b)| a - b).collect();
    gradients
        .iter()
        .zip(offsets)
        .map(|(g, b)| dot(g, &dx) - b)
        .collect()
}

/// Accept an anchor when the global feasible volume clears 0.01% of the
/// domain, or failing that, when a small ball around `x_c` still contains
/// feasible points (high-severity instances can be viable yet tiny).
fn feasible_region_viable(
    gradients: &[Vec<f64>],
    offsets: &[f64],
    x_c: &[f64],
    dim: usize,
    rng: &mut impl Rng,
) -> bool {
    let mut hits = 0usize;
    for _ in 0..VOLUME_SAMPLES {
        let x: Vec<f64> = (0..dim).map(|_| rng.random_range(DOMAIN.0..DOMAIN.1)).collect();
        if eval_linear_constraints(gradients, offsets, x_c, &x).iter().all(|&c| c <= 0.0) {
            hits += 1;
            if hits >= VOLUME_MIN_HITS {
                return true;
            }
        }
    }
    for _ in 0..BALL_SAMPLES {
        let dir = random_unit(dim, rng);
        let r = rng.random_range(0.0..=BALL_RADIUS);
        let x: Vec<f64> = x_c.iter().zip(&dir).map(|(c, d)| c + r * d).collect();
        if r > 0.0
            && eval_linear_constraints(gradients, offsets, x_c, &x).iter().all(|&c| c <= 0.0)
        {
            return true;
        }
    }
    false
}

/// Unit vector at an angle uniform in (0, 80) degrees from `e1`, scaled to
/// `magnitude`. Guarantees the angle bound by explicit construction.
fn angled_direction(e1: &[f64], magnitude: f64, rng: &mut impl Rng) -> Vec<f64> {
    let dim = e1.len();
    if dim == 1 {
        return e1.iter().map(|v| v * magnitude).collect();
    }
    let perp = loop {
        let p = random_unit(dim, rng);
        let along = dot(&p, e1);
        let perp: Vec<f64> = p.iter().zip(e1).map(|(pi, ei)| pi - along * ei).collect();
        let n = norm(&perp);
        if n > 1e-9 {
            break perp.iter().map(|v| v / n).collect::<Vec<f64>>();
        }
    };
    let theta = rng.random_range(0.0..MAX_ACTIVE_ANGLE_DEG.to_radians());
    let (sin, cos) = theta.sin_cos();
    e1.iter()
        .zip(&perp)
        .map(|(e, p)| magnitude * (cos * e + sin * p))
        .collect()
}

fn random_unit(dim: usize, rng: &mut impl Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let n = norm(&v);
        if n > 1e-12 {
            return v.iter().map(|x| x / n).collect();
        }
    }
}

/// Random orthogonal matrix: modified Gram-Schmidt on a Gaussian matrix.
fn random_orthogonal(dim: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    loop {
        let mut rows: Vec<Vec<f64>> = (0..dim)
            .map(|_| (0..dim).map(|_| rng.sample(StandardNormal)).collect())
            .collect();
        let mut ok = true;
        for i in 0..dim {
            for j in 0..i {
                let proj = dot(&rows[i], &rows[j]);
                for k in 0..dim {
                    rows[i][k] -= proj * rows[j][k];
                }
            }
            let n = norm(&rows[i]);
            if n < 1e-9 {
                ok = false; // numerically dependent draw; retry wholesale
                break;
            }
            for v in rows[i].iter_mut() {
                *v /= n;
            }
        }
        if ok {
            return rows;
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_values_at_unit_vectors() {
        // bent cigar at z = e2 hits the 1e6 conditioning term.
        assert_eq!(BaseFunction::BentCigar.value(&[0.0, 1.0, 0.0]), 1e6);
        assert_eq!(BaseFunction::BentCigar.value(&[1.0, 0.0, 0.0]), 1.0);
        assert_eq!(BaseFunction::Discus.value(&[1.0, 0.0]), 1e6);
        assert_eq!(BaseFunction::Sphere.value(&[3.0, 4.0]), 25.0);
        // ellipsoid: 10^{6 * i/(D-1)} weights = 1, 1e3, 1e6 at D = 3... wait i/(D-1): 0, 3, 6.
        let e = BaseFunction::Ellipsoid.value(&[1.0, 1.0, 1.0]);
        assert!((e - (1.0 + 1e3 + 1e6)).abs() < 1e-6);
    }

    #[test]
    fn base_functions_vanish_at_origin() {
        for f in BaseFunction::ALL {
            assert_eq!(f.value(&[0.0; 4]), 0.0, "{}", f.name());
        }
    }

    #[test]
    fn rastrigin_reduces_to_sphere_on_the_integer_lattice() {
        // cos(2 pi z) = 1 on integers, so only the quadratic term remains.
        let z = [1.0, -2.0, 3.0];
        assert!((BaseFunction::Rastrigin.value(&z) - 14.0).abs() < 1e-9);
    }

    #[test]
    fn gradients_match_finite_differences() {
        let z = [0.7, -1.3, 2.1, 0.4];
        // A wider step keeps cancellation noise manageable on the
        // 1e6-conditioned functions while truncation error stays small.
        let h = 1e-4;
        for f in BaseFunction::ALL {
            let grad = f.gradient(&z);
            for j in 0..z.len() {
                let mut up = z;
                let mut dn = z;
                up[j] += h;
                dn[j] -= h;
                let fd = (f.value(&up) - f.value(&dn)) / (2.0 * h);
                let tol = 2e-4 * fd.abs().max(1.0);
                assert!(
                    (grad[j] - fd).abs() < tol,
                    "{} coord {j}: analytic {} vs fd {fd}",
                    f.name(),
                    grad[j]
                );
            }
        }
    }

    #[test]
    fn severity_counts_follow_the_table() {
        assert_eq!(severity_counts(0, 10).unwrap(), (1, 1));
        assert_eq!(severity_counts(1, 10).unwrap(), (3, 2));
        assert_eq!(severity_counts(2, 10).unwrap(), (9, 6));
        assert_eq!(severity_counts(3, 10).unwrap(), (16, 11));
        assert_eq!(severity_counts(4, 10).unwrap(), (24, 16));
        assert_eq!(severity_counts(5, 10).unwrap(), (54, 36));
        // Active counts truncate to the total.
        assert_eq!(severity_counts(5, 2).unwrap(), (18, 12));
        assert!(severity_counts(6, 10).is_err());
    }

    #[test]
    fn generation_is_deterministic_in_the_seed() {
        let a = BbobInstance::generate(BaseFunction::Sphere, 5, 2, 11).unwrap();
        let b = BbobInstance::generate(BaseFunction::Sphere, 5, 2, 11).unwrap();
        assert_eq!(a.x_c, b.x_c);
        assert_eq!(a.gradients, b.gradients);
        assert_eq!(a.offsets, b.offsets);
        let c = BbobInstance::generate(BaseFunction::Sphere, 5, 2, 12).unwrap();
        assert_ne!(a.x_c, c.x_c);
    }

    #[test]
    fn anchor_is_feasible_with_active_constraints_tight() {
        for seed in 0..5 {
            let inst = BbobInstance::generate(BaseFunction::Rastrigin, 4, 3, seed).unwrap();
            let c = inst.constraints(inst.x_c());
            for (k, &v) in c.iter().enumerate() {
                if k < inst.n_active() {
                    assert_eq!(v, 0.0, "active constraint {k} must be tight at x_c");
                } else {
                    assert!((-1.0..=-0.1).contains(&v), "inactive slack {v} out of range");
                }
            }
        }
    }

    #[test]
    fn first_constraint_gradient_opposes_objective_gradient() {
        let inst = BbobInstance::generate(BaseFunction::Ellipsoid, 3, 1, 7).unwrap();
        let geom = InstanceGeometry {
            function: inst.function,
            rotation: &inst.rotation,
            x_opt: &inst.x_opt,
        };
        let grad_f = geom.gradient(&inst.x_c);
        for (g, f) in inst.gradients[0].iter().zip(&grad_f) {
            assert!((g + f).abs() < 1e-12);
        }
    }

    #[test]
    fn active_gradients_stay_within_eighty_degrees_of_the_first() {
        for seed in 0..5 {
            let inst = BbobInstance::generate(BaseFunction::Sphere, 6, 4, 100 + seed).unwrap();
            let g1 = &inst.gradients[0];
            let n1 = norm(g1);
            for k in 1..inst.n_active() {
                let gk = &inst.gradients[k];
                let cos = dot(g1, gk) / (n1 * norm(gk));
                let angle = cos.clamp(-1.0, 1.0).acos().to_degrees();
                assert!(angle < 80.0, "active constraint {k} at {angle} degrees");
            }
        }
    }

    #[test]
    fn constraints_are_linear_on_random_triples() {
        let inst = BbobInstance::generate(BaseFunction::BentCigar, 5, 2, 3).unwrap();
        let mut rng = RngStream::new(42, 0).rng();
        for _ in 0..50 {
            let x: Vec<f64> = (0..5).map(|_| rng.random_range(-5.0..5.0)).collect();
            let y: Vec<f64> = (0..5).map(|_| rng.random_range(-5.0..5.0)).collect();
            let a: f64 = rng.random_range(0.0..1.0);
            let mix: Vec<f64> =
                x.iter().zip(&y).map(|(xi, yi)| a * xi + (1.0 - a) * yi).collect();
            let cm = inst.constraints(&mix);
            let cx = inst.constraints(&x);
            let cy = inst.constraints(&y);
            for k in 0..cm.len() {
                let want = a * cx[k] + (1.0 - a) * cy[k];
                let tol = 1e-9 * want.abs().max(1.0);
                assert!((cm[k] - want).abs() < tol);
            }
        }
    }

    #[test]
    fn rotation_matrices_are_orthogonal() {
        let inst = BbobInstance::generate(BaseFunction::ElliRot, 6, 0, 9).unwrap();
        let r = inst.rotation.as_ref().expect("rotated function must carry a rotation");
        for i in 0..6 {
            for j in 0..6 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot(&r[i], &r[j]) - want).abs() < 1e-10);
            }
        }
        // Unrotated functions stay identity-mapped.
        let plain = BbobInstance::generate(BaseFunction::Ellipsoid, 6, 0, 9).unwrap();
        assert!(plain.rotation.is_none());
    }

    #[test]
    fn problem_reports_anchor_as_optimum() {
        let inst = BbobInstance::generate(BaseFunction::Sphere, 3, 1, 21).unwrap();
        let p = inst.problem();
        assert_eq!(p.dim(), 3);
        assert_eq!(p.n_constraints(), 3);
        assert_eq!(p.optimum_value(), Some(inst.f_at_xc()));
        // Unit-cube center maps to the native origin.
        let s = p.evaluate(&vec![0.5; 3]).unwrap();
        assert!((s.f - inst.objective(&[0.0, 0.0, 0.0])).abs() < 1e-9);
    }

    #[test]
    fn feasible_volume_shrinks_with_severity_on_10d_sphere() {
        let mut medians = Vec::new();
        for severity in 0..=5 {
            let mut volumes = Vec::new();
            for seed in 0..10 {
                let inst =
                    BbobInstance::generate(BaseFunction::Sphere, 10, severity, 500 + seed)
                        .unwrap();
                let mut rng = RngStream::new(9000 + seed, severity as u64).rng();
                let hits = (0..100_000)
                    .filter(|_| {
                        let x: Vec<f64> =
                            (0..10).map(|_| rng.random_range(-5.0..5.0)).collect();
                        inst.constraints(&x).iter().all(|&c| c <= 0.0)
                    })
                    .count();
                volumes.push(hits as f64 / 100_000.0);
            }
            volumes.sort_by(f64::total_cmp);
            medians.push(0.5 * (volumes[4] + volumes[5]));
        }
        // Strict decrease while the sampler can resolve the volume; once an
        // estimate bottoms out at zero, later severities must stay there.
        for w in medians.windows(2) {
            if w[0] > 0.0 {
                assert!(w[1] < w[0], "volume must shrink with severity: {medians:?}");
            } else {
                assert_eq!(w[1], 0.0, "volume must stay degenerate: {medians:?}");
            }
        }
        assert!(medians[0] > 0.05, "severity 0 should leave ample volume: {medians:?}");
    }
}
