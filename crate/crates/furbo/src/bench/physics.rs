//! Engineering design benchmarks with simulation-style constraints.
//!
//! Five classic constrained problems: tension/compression spring, welded
//! beam, pressure vessel (with its discrete plate-thickness grid), speed
//! reducer, and the Keane bump function at configurable dimension. All are
//! exposed through [`Problem`] on the unit cube; the formulas below work in
//! native engineering units.

use crate::problem::Problem;

/// Canonical problem names accepted by [`physics_problem`]; Keane bump also
/// accepts a `keane_bump_<dim>` suffix form.
pub const PHYSICS_NAMES: [&str; 5] = [
    "tension_spring",
    "welded_beam",
    "pressure_vessel",
    "speed_reducer",
    "keane_bump_30",
];

/// Look up a physics benchmark by name. `keane_bump_<dim>` selects the bump
/// function at an arbitrary dimension.
pub fn physics_problem(name: &str) -> Option<Problem> {
    match name {
        "tension_spring" => return Some(tension_spring()),
        "welded_beam" => return Some(welded_beam()),
        "pressure_vessel" => return Some(pressure_vessel()),
        "speed_reducer" => return Some(speed_reducer()),
        _ => {}
    }
    let dim: usize = name.strip_prefix("keane_bump_")?.parse().ok()?;
    (dim >= 1).then(|| keane_bump(dim))
}

/// Minimize the mass of a coil spring subject to deflection, shear stress,
/// surge frequency, and geometry limits. Variables: wire diameter, coil
/// diameter, number of active coils.
pub fn tension_spring() -> Problem {
    Problem::new(
        "tension_spring",
        vec![(0.05, 2.0), (0.25, 1.3), (2.0, 15.0)],
        4,
        |x| spring_raw(x).0,
        |x| spring_raw(x).1,
    )
}

fn spring_raw(x: &[f64]) -> (f64, Vec<f64>) {
    let (d, dc, n) = (x[0], x[1], x[2]);
    let f = (n + 2.0) * dc * d * d;
    let g = vec![
        1.0 - dc.powi(3) * n / (71785.0 * d.powi(4)),
        (4.0 * dc * dc - d * dc) / (12566.0 * (dc * d.powi(3) - d.powi(4)))
            + 1.0 / (5108.0 * d * d)
            - 1.0,
        1.0 - 140.45 * d / (dc * dc * n),
        (d + dc) / 1.5 - 1.0,
    ];
    (f, g)
}

/// Minimize the fabrication cost of a welded cantilever beam under shear
/// stress, bending stress, buckling load, and deflection limits. Variables:
/// weld height, weld length, bar thickness, bar breadth.
pub fn welded_beam() -> Problem {
    Problem::new(
        "welded_beam",
        vec![(0.125, 10.0), (0.1, 10.0), (0.1, 10.0), (0.1, 10.0)],
        5,
        |x| welded_raw(x).0,
        |x| welded_raw(x).1,
    )
}

fn welded_raw(x: &[f64]) -> (f64, Vec<f64>) {
    let (h, l, t, b) = (x[0], x[1], x[2], x[3]);
    let p = 6000.0;
    let big_l = 14.0;
    let e = 30e6;
    let g_mod = 12e6;

    let tau_p = p / (std::f64::consts::SQRT_2 * h * l);
    let m = p * (big_l + l / 2.0);
    let r = (l * l / 4.0 + ((h + t) / 2.0).powi(2)).sqrt();
    let j = 2.0 * (std::f64::consts::SQRT_2 * h * l * (l * l / 12.0 + ((h + t) / 2.0).powi(2)));
    let tau_pp = m * r / j;
    let tau = (tau_p * tau_p + 2.0 * tau_p * tau_pp * l / (2.0 * r) + tau_pp * tau_pp).sqrt();
    let sigma = 6.0 * p * big_l / (b * t * t);
    let delta = 4.0 * p * big_l.powi(3) / (e * t.powi(3) * b);
    let p_c = 4.013 * e * (t * t * b.powi(6) / 36.0).sqrt() / (big_l * big_l)
        * (1.0 - t / (2.0 * big_l) * (e / (4.0 * g_mod)).sqrt());

    let f = 1.10471 * h * h * l + 0.04811 * t * b * (14.0 + l);
    let g = vec![tau - 13600.0, sigma - 30000.0, h - b, 6000.0 - p_c, delta - 0.25];
    (f, g)
}

/// Plate thicknesses come in 0.0625-inch increments; requested values snap
/// to the nearest multiple, ties rounding up.
pub const VESSEL_THICKNESS_STEP: f64 = 0.0625;

pub fn snap_thickness(v: f64) -> f64 {
    (v / VESSEL_THICKNESS_STEP + 0.5).floor() * VESSEL_THICKNESS_STEP
}

/// Minimize the material cost of a cylindrical pressure vessel. Shell and
/// head thicknesses are discrete (snapped to the plate grid); radius and
/// length are continuous.
pub fn pressure_vessel() -> Problem {
    Problem::new(
        "pressure_vessel",
        vec![(0.0625, 5.0), (0.0625, 5.0), (10.0, 200.0), (10.0, 200.0)],
        4,
        |x| vessel_raw(x).0,
        |x| vessel_raw(x).1,
    )
}

fn vessel_raw(x: &[f64]) -> (f64, Vec<f64>) {
    let ts = snap_thickness(x[0]);
    let th = snap_thickness(x[1]);
    let (r, l) = (x[2], x[3]);
    let pi = std::f64::consts::PI;
    let f = 0.6224 * ts * r * l + 1.7781 * th * r * r + 3.1661 * ts * ts * l + 19.84 * ts * ts * r;
    let g = vec![
        -ts + 0.0193 * r,
        -th + 0.00954 * r,
        -pi * r * r * l - 4.0 / 3.0 * pi * r.powi(3) + 1_296_000.0,
        l - 240.0,
    ];
    (f, g)
}

/// Minimize the weight of a gear-train speed reducer under eleven stress,
/// deflection, and dimensional constraints. Variables: face width, tooth
/// module, pinion teeth, shaft lengths, shaft diameters.
pub fn speed_reducer() -> Problem {
    Problem::new(
        "speed_reducer",
        vec![
            (2.6, 3.6),
            (0.7, 0.8),
            (17.0, 28.0),
            (7.3, 8.3),
            (7.8, 8.3),
            (2.9, 3.9),
            (5.0, 5.5),
        ],
        11,
        |x| reducer_raw(x).0,
        |x| reducer_raw(x).1,
    )
}

fn reducer_raw(x: &[f64]) -> (f64, Vec<f64>) {
    let (b, m, n, l1, l2, d1, d2) = (x[0], x[1], x[2], x[3], x[4], x[5], x[6]);
    let f = 0.7854 * b * m * m * (3.3333 * n * n + 14.9334 * n - 43.0934)
        - 1.508 * b * (d1 * d1 + d2 * d2)
        + 7.4777 * (d1.powi(3) + d2.powi(3))
        + 0.7854 * (l1 * d1 * d1 + l2 * d2 * d2);
    let g = vec![
        27.0 / (b * m * m * n) - 1.0,
        397.5 / (b * m * m * n * n) - 1.0,
        1.93 * l1.powi(3) / (m * n * d1.powi(4)) - 1.0,
        1.93 * l2.powi(3) / (m * n * d2.powi(4)) - 1.0,
        ((745.0 * l1 / (m * n)).powi(2) + 16.9e6).sqrt() / (110.0 * d1.powi(3)) - 1.0,
        ((745.0 * l2 / (m * n)).powi(2) + 157.5e6).sqrt() / (85.0 * d2.powi(3)) - 1.0,
        m * n / 40.0 - 1.0,
        5.0 * m / b - 1.0,
        b / (12.0 * m) - 1.0,
        (1.5 * d1 + 1.9) / l1 - 1.0,
        (1.1 * d2 + 1.9) / l2 - 1.0,
    ];
    (f, g)
}

/// Keane's bump function: a highly multimodal maximization problem posed
/// here as minimization of the negated absolute bump, with a product lower
/// bound and a sum upper bound on the variables.
pub fn keane_bump(dim: usize) -> Problem {
    assert!(dim >= 1, "keane bump needs at least one variable");
    Problem::new(
        format!("keane_bump_{dim}"),
        vec![(0.0, 10.0); dim],
        2,
        |x| keane_raw(x).0,
        |x| keane_raw(x).1,
    )
}

fn keane_raw(x: &[f64]) -> (f64, Vec<f64>) {
    let cos_quart: f64 = x.iter().map(|v| v.cos().powi(4)).sum();
    let cos_sq_prod: f64 = x.iter().map(|v| v.cos().powi(2)).product();
    let denom_sq: f64 = x.iter().enumerate().map(|(i, v)| (i + 1) as f64 * v * v).sum();
    // The all-zero corner zeroes the denominator; the bump value there is 0.
    let f = if denom_sq > 0.0 {
        -((cos_quart - 2.0 * cos_sq_prod) / denom_sq.sqrt()).abs()
    } else {
        0.0
    };
    let prod: f64 = x.iter().product();
    let sum: f64 = x.iter().sum();
    let g = vec![0.75 - prod, sum - 7.5 * x.len() as f64];
    (f, g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn to_unit(x: &[f64], bounds: &[(f64, f64)]) -> Vec<f64> {
        x.iter()
            .zip(bounds)
            .map(|(v, (lo, hi))| (v - lo) / (hi - lo))
            .collect()
    }

    fn assert_close(got: f64, want: f64, what: &str) {
        let tol = 1e-9 * want.abs().max(1.0);
        assert!((got - want).abs() < tol, "{what}: got {got}, want {want}");
    }

    #[test]
    fn problem_shapes_and_bounds() {
        let cases: [(Problem, usize, usize); 5] = [
            (tension_spring(), 3, 4),
            (welded_beam(), 4, 5),
            (pressure_vessel(), 4, 4),
            (speed_reducer(), 7, 11),
            (keane_bump(30), 30, 2),
        ];
        for (p, dim, k) in cases {
            assert_eq!(p.dim(), dim, "{}", p.name());
            assert_eq!(p.n_constraints(), k, "{}", p.name());
            for (lo, hi) in p.bounds() {
                assert!(lo < hi);
            }
        }
        assert_eq!(speed_reducer().bounds()[2], (17.0, 28.0));
        assert_eq!(speed_reducer().bounds()[0], (2.6, 3.6));
    }

    #[test]
    fn registry_resolves_all_names() {
        for name in PHYSICS_NAMES {
            assert!(physics_problem(name).is_some(), "{name}");
        }
        assert_eq!(physics_problem("keane_bump_7").unwrap().dim(), 7);
        assert!(physics_problem("keane_bump_0").is_none());
        assert!(physics_problem("unobtainium").is_none());
    }

    #[test]
    fn spring_value_regression() {
        let (f, g) = spring_raw(&[0.1, 0.8, 8.0]);
        assert_close(f, 0.08000000000000002, "spring f");
        let want = [
            0.4294072577836595,
            -0.69848293748687,
            -1.7431640624999996,
            -0.4,
        ];
        for (k, (got, want)) in g.iter().zip(want).enumerate() {
            assert_close(*got, want, &format!("spring g{k}"));
        }
    }

    #[test]
    fn welded_value_regression() {
        let (f, g) = welded_raw(&[0.3, 5.0, 7.0, 0.4]);
        assert_close(f, 3.0565715000000004, "welded f");
        let want = [
            -4978.904007076579,
            -4285.714285714286,
            -0.10000000000000003,
            -30798.414106960212,
            -0.23399999999999999,
        ];
        for (k, (got, want)) in g.iter().zip(want).enumerate() {
            assert_close(*got, want, &format!("welded g{k}"));
        }
    }

    #[test]
    fn vessel_value_regression_applies_the_thickness_grid() {
        // The requested shell thickness 0.09 is not manufacturable; the
        // model must price the snapped 0.0625 plate instead.
        let (f, g) = vessel_raw(&[0.09, 1.0, 50.0, 100.0]);
        assert_close(f, 4644.8617578125, "vessel f");
        let want = [0.9025000000000001, -0.523, -12996.938995747129, -140.0];
        for (k, (got, want)) in g.iter().zip(want).enumerate() {
            assert_close(*got, want, &format!("vessel g{k}"));
        }
    }

    #[test]
    fn thickness_snap_rounds_to_grid_with_ties_up() {
        assert_eq!(snap_thickness(0.09), 0.0625);
        assert_eq!(snap_thickness(0.1), 0.125);
        // Exact midpoint between 0.0625 and 0.125 rounds up.
        assert_eq!(snap_thickness(0.09375), 0.125);
        assert_eq!(snap_thickness(0.0625), 0.0625);
        assert_eq!(snap_thickness(1.0), 1.0);
    }

    #[test]
    fn reducer_value_regression() {
        let (f, g) = reducer_raw(&[3.0, 0.75, 20.0, 7.8, 8.0, 3.4, 5.25]);
        assert_close(f, 3548.819855105, "reducer f");
        let want = [
            -0.19999999999999996,
            -0.4111111111111111,
            -0.5430862896756504,
            -0.9132840877343631,
            -0.044933177876954944,
            0.02084779883523291,
            -0.625,
            0.25,
            -0.6666666666666667,
            -0.10256410256410253,
            -0.04062499999999991,
        ];
        for (k, (got, want)) in g.iter().zip(want).enumerate() {
            assert_close(*got, want, &format!("reducer g{k}"));
        }
    }

    #[test]
    fn keane_value_regression() {
        let (f4, g4) = keane_raw(&[2.0, 2.0, 2.0, 2.0]);
        assert_close(f4, -0.018683346570458625, "keane4 f");
        assert_close(g4[0], -15.25, "keane4 g0");
        assert_close(g4[1], -22.0, "keane4 g1");

        let (f2, c2) = keane_raw(&[3.0, 1.0]);
        assert_close(f2, -0.1427843774426231, "keane2 f");
        assert_close(c2[0], -2.25, "keane2 g0");
        assert_close(c2[1], -11.0, "keane2 g1");

        // Equal coordinates in two dimensions cancel the numerator exactly.
        let (f_eq, c_eq) = keane_raw(&[1.0, 1.0]);
        assert!(f_eq.abs() < 1e-12);
        assert_close(c_eq[0], -0.25, "keane eq g0");
        assert_close(c_eq[1], -13.0, "keane eq g1");

        // The degenerate corner is defined as zero, not NaN.
        assert_eq!(keane_raw(&[0.0, 0.0, 0.0]).0, 0.0);
    }

    #[test]
    fn feasible_fixtures_stay_feasible_through_the_unit_interface() {
        struct Fixture {
            problem: Problem,
            x_native: Vec<f64>,
            f: f64,
        }
        let fixtures = [
            Fixture {
                problem: tension_spring(),
                x_native: vec![0.05641139233488558, 0.4697052294573443, 7.553922783157239],
                f: 0.014280412758130667,
            },
            Fixture {
                problem: welded_beam(),
                x_native: vec![
                    0.1541855617536016,
                    6.999707703175933,
                    9.771453635742413,
                    0.20529543421098362,
                ],
                f: 2.2105184952629644,
            },
            Fixture {
                problem: pressure_vessel(),
                x_native: vec![
                    1.1179284624729229,
                    0.479781610170348,
                    52.21940578652464,
                    87.68980126571847,
                ],
                f: 7293.223533909966,
            },
            Fixture {
                problem: speed_reducer(),
                x_native: vec![
                    3.5683576041644525,
                    0.711971499690666,
                    17.008239693629996,
                    8.046089889859587,
                    8.082084189405768,
                    3.521972415177745,
                    5.377634112261994,
                ],
                f: 3198.646930399499,
            },
        ];
        for fx in fixtures {
            let u = to_unit(&fx.x_native, fx.problem.bounds());
            let s = fx.problem.evaluate(&u).unwrap();
            assert!(
                s.is_feasible(),
                "{} fixture infeasible: {:?}",
                fx.problem.name(),
                s.c
            );
            assert_close(s.f, fx.f, fx.problem.name());
        }
    }

    #[test]
    fn keane_feasible_region_is_mild() {
        // Unlike the engineering problems, most of the Keane domain is
        // feasible; spot-check the unit-cube center.
        let p = keane_bump(30);
        let s = p.evaluate(&vec![0.5; 30]).unwrap();
        assert!(s.is_feasible());
        assert!(s.f <= 0.0);
    }
}
