//! Adaptive Gauss–Kronrod quadrature for the distance expectations and the
//! semi-infinite repulsion integral.
//!
//! A 15-point Kronrod rule with embedded 7-point Gauss rule supplies the
//! per-panel error estimate; the driver bisects the worst panel until the
//! summed estimate meets tolerance. Semi-infinite integrals map `[0, inf)`
//! onto `(0, 1]` through `r = (1-t)/t`; the rule never evaluates endpoints,
//! so integrable endpoint behavior needs no special casing.

use thiserror::Error;

/// Result of one quadrature evaluation.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    /// Estimated absolute error bound.
    pub est_error: f64,
    /// Number of integrand evaluations consumed.
    pub evaluations: usize,
}

#[derive(Debug, Clone, Error)]
pub enum QuadError {
    #[error(
        "quadrature did not converge: best estimate {value:.6e} with estimated error {est_error:.3e} after {evaluations} evaluations"
    )]
    NonConvergence {
        value: f64,
        est_error: f64,
        evaluations: usize,
    },
}

impl QuadError {
    /// The best estimate computed before giving up.
    pub fn best(&self) -> QuadResult {
        let QuadError::NonConvergence {
            value,
            est_error,
            evaluations,
        } = *self;
        QuadResult {
            value,
            est_error,
            evaluations,
        }
    }
}

/// Default relative tolerance; keeps quadrature error invisible at the
/// three-decimal resolution of probability plots with large margin.
pub const DEFAULT_REL_TOL: f64 = 1e-8;
/// Default absolute tolerance floor.
pub const DEFAULT_ABS_TOL: f64 = 1e-10;

/// Panel budget; bisection stops and reports non-convergence beyond this.
const MAX_PANELS: usize = 2000;

// 15-point Kronrod abscissae (positive half), interleaving the 7-point Gauss
// nodes at odd indices. Standard double-precision values.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One Gauss–Kronrod panel: returns (kronrod value, error estimate).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let f_center = f(center);
    let mut res_kronrod = f_center * WGK[7];
    let mut res_gauss = f_center * WG[3];
    let mut res_abs = res_kronrod.abs();
    let mut fv1 = [0.0f64; 7];
    let mut fv2 = [0.0f64; 7];

    for j in 0..7 {
        let x = half * XGK[j];
        let v1 = f(center - x);
        let v2 = f(center + x);
        fv1[j] = v1;
        fv2[j] = v2;
        let sum = v1 + v2;
        res_kronrod += WGK[j] * sum;
        res_abs += WGK[j] * (v1.abs() + v2.abs());
        if j % 2 == 1 {
            res_gauss += WG[j / 2] * sum;
        }
    }

    let mean = res_kronrod * 0.5;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let err = ((res_kronrod - res_gauss) * half).abs();
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();

    // Magnitude-aware rescaling of the raw Kronrod-Gauss difference.
    let mut scaled_err = err;
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        scaled_err = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    let floor = 50.0 * f64::EPSILON * res_abs;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) && floor > scaled_err {
        scaled_err = floor;
    }

    (res_kronrod * half, scaled_err)
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

/// Integrates `f` over the finite interval `[a, b]` to the requested
/// tolerances by adaptive bisection.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<QuadResult, QuadError> {
    assert!(a <= b, "inverted interval [{a}, {b}]");
    assert!(rel_tol > 0.0 && abs_tol > 0.0, "tolerances must be positive");
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            est_error: 0.0,
            evaluations: 0,
        });
    }

    let (value, error) = gk15(&f, a, b);
    let mut evaluations = 15;
    let mut panels = vec![Panel { a, b, value, error }];

    loop {
        let mut total = 0.0;
        let mut total_err = 0.0;
        for p in &panels {
            total += p.value;
            total_err += p.error;
        }
        let tol = abs_tol.max(rel_tol * total.abs());
        if total_err <= tol {
            return Ok(QuadResult {
                value: total,
                est_error: total_err,
                evaluations,
            });
        }
        if panels.len() >= MAX_PANELS {
            return Err(QuadError::NonConvergence {
                value: total,
                est_error: total_err,
                evaluations,
            });
        }

        let mut worst = 0;
        for (i, p) in panels.iter().enumerate() {
            if p.error > panels[worst].error {
                worst = i;
            }
        }
        let Panel { a, b, .. } = panels.swap_remove(worst);
        let mid = 0.5 * (a + b);
        let (v1, e1) = gk15(&f, a, mid);
        let (v2, e2) = gk15(&f, mid, b);
        evaluations += 30;
        panels.push(Panel {
            a,
            b: mid,
            value: v1,
            error: e1,
        });
        panels.push(Panel {
            a: mid,
            b,
            value: v2,
            error: e2,
        });
    }
}

/// Integrates `f` over `[0, inf)` via the substitution `r = (1-t)/t`,
/// which maps the domain onto `(0, 1]` with `dr = dt/t^2`.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(
    f: F,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<QuadResult, QuadError> {
    integrate(
        |t| {
            let r = (1.0 - t) / t;
            f(r) / (t * t)
        },
        0.0,
        1.0,
        rel_tol,
        abs_tol,
    )
}

/// Expectation `E[h(U)]` for `U` unit-exponential: `int_0^inf h(u) e^-u du`,
/// evaluated as `int_0^inf h(t^2) e^{-t^2} 2t dt`.
///
/// The square substitution regularizes integrands with an integrable
/// power-law shoulder `u^-a`, `a <= 1/2`, at the origin — the shape the
/// detection probabilities produce through their fractional `m_r` power —
/// which otherwise exhausts the panel budget before reaching tolerance.
pub fn exponential_expectation<F: Fn(f64) -> f64>(
    h: F,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<QuadResult, QuadError> {
    integrate_semi_infinite(|t| 2.0 * t * h(t * t) * (-t * t).exp(), rel_tol, abs_tol)
}

/// Expectation of `g(R0)` under the serving-distance density
/// `f_R0(x) = 2 pi b lambda x exp(-pi b lambda x^2)`.
///
/// The substitution `u = pi b lambda x^2` turns the weight into a unit
/// exponential, removing all density scale from the quadrature.
pub fn expect_r0<F: Fn(f64) -> f64>(
    g: F,
    lambda: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<QuadResult, QuadError> {
    let scale = std::f64::consts::PI * b * lambda;
    exponential_expectation(|u| g((u / scale).sqrt()), rel_tol, abs_tol)
}

/// Expectation of `g(rho)` under the nearest-interferer density
/// `f_rho(r) = 2 pi lambda r exp(-pi lambda r^2)`.
pub fn expect_rho<F: Fn(f64) -> f64>(
    g: F,
    lambda: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<QuadResult, QuadError> {
    expect_r0(g, lambda, 1.0, rel_tol, abs_tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const LAMBDA: f64 = 1e-5;
    const B: f64 = 1.3;

    #[test]
    fn kronrod_weights_sum_to_interval_length() {
        let wk: f64 = WGK[7] + 2.0 * WGK[..7].iter().sum::<f64>();
        let wg: f64 = WG[3] + 2.0 * WG[..3].iter().sum::<f64>();
        assert_relative_eq!(wk, 2.0, epsilon = 1e-14);
        assert_relative_eq!(wg, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn kronrod_rule_exact_through_degree_22() {
        // A single 15-point Kronrod panel integrates polynomials up to
        // degree 22 exactly; this pins every abscissa and weight at once.
        for k in 0..=22u32 {
            let (value, _) = gk15(&|x: f64| x.powi(k as i32), 0.0, 1.0);
            assert_relative_eq!(value, 1.0 / (k as f64 + 1.0), max_relative = 1e-13);
        }
    }

    #[test]
    fn exponential_tail() {
        let r = integrate_semi_infinite(|r| (-r).exp(), 1e-10, 1e-12).unwrap();
        assert_relative_eq!(r.value, 1.0, max_relative = 1e-9);
        assert!(r.est_error < 1e-8);
    }

    #[test]
    fn nearest_interferer_density_normalized() {
        let f = |r: f64| {
            2.0 * std::f64::consts::PI * LAMBDA * r
                * (-std::f64::consts::PI * LAMBDA * r * r).exp()
        };
        let r = integrate_semi_infinite(f, 1e-10, 1e-12).unwrap();
        assert_relative_eq!(r.value, 1.0, max_relative = 1e-9);
    }

    #[test]
    fn oscillation_free_finite_interval() {
        let r = integrate(|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-12, 1e-14).unwrap();
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-11);
    }

    #[test]
    fn expect_r0_normalization() {
        let r = expect_r0(|_| 1.0, LAMBDA, B, 1e-10, 1e-12).unwrap();
        assert_relative_eq!(r.value, 1.0, max_relative = 1e-9);
    }

    #[test]
    fn expect_r0_second_moment() {
        let r = expect_r0(|x| x * x, LAMBDA, B, 1e-10, 1e-12).unwrap();
        assert_relative_eq!(
            r.value,
            1.0 / (std::f64::consts::PI * B * LAMBDA),
            max_relative = 1e-9
        );
    }

    #[test]
    fn expect_r0_median_indicator() {
        let median = (2f64.ln() / (std::f64::consts::PI * B * LAMBDA)).sqrt();
        let r = expect_r0(
            |x| if x <= median { 1.0 } else { 0.0 },
            LAMBDA,
            B,
            1e-8,
            1e-10,
        )
        .unwrap();
        assert_relative_eq!(r.value, 0.5, max_relative = 1e-7);
    }

    #[test]
    fn expect_rho_normalization_and_moments() {
        let r = expect_rho(|_| 1.0, LAMBDA, 1e-10, 1e-12).unwrap();
        assert_relative_eq!(r.value, 1.0, max_relative = 1e-9);

        let r = expect_rho(|x| x * x, LAMBDA, 1e-10, 1e-12).unwrap();
        assert_relative_eq!(r.value, 1.0 / (std::f64::consts::PI * LAMBDA), max_relative = 1e-9);

        // E[exp(-pi lambda rho^2)] = 1/2: the Gaussian weight doubles the rate.
        let r = expect_rho(
            |x| (-std::f64::consts::PI * LAMBDA * x * x).exp(),
            LAMBDA,
            1e-10,
            1e-12,
        )
        .unwrap();
        assert_relative_eq!(r.value, 0.5, max_relative = 1e-9);
    }

    #[test]
    fn linearity_on_random_combinations() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..20 {
            let a: f64 = rng.gen_range(-3.0..3.0);
            let b: f64 = rng.gen_range(-3.0..3.0);
            let f = |r: f64| (-r).exp();
            let g = |r: f64| r * (-2.0 * r).exp();
            let lhs = integrate_semi_infinite(|r| a * f(r) + b * g(r), 1e-10, 1e-12)
                .unwrap()
                .value;
            let rhs = a * integrate_semi_infinite(f, 1e-10, 1e-12).unwrap().value
                + b * integrate_semi_infinite(g, 1e-10, 1e-12).unwrap().value;
            assert_relative_eq!(lhs, rhs, epsilon = 1e-9);
        }
    }

    #[test]
    fn domain_extension_monotone_for_positive_integrand() {
        let f = |r: f64| (-r).exp() / (1.0 + r);
        let mut prev = 0.0;
        for cut in [1.0, 2.0, 5.0, 10.0, 20.0] {
            let val = integrate(f, 0.0, cut, 1e-10, 1e-12).unwrap().value;
            assert!(val > prev);
            prev = val;
        }
        let full = integrate_semi_infinite(f, 1e-10, 1e-12).unwrap().value;
        assert!(full >= prev);
    }

    #[test]
    fn repulsion_inner_integrand_against_dense_trapezoid() {
        // The radial integrand of the soft-core interference exponent at
        // s = 1e8: s r^(1-eta) / (1 + s r^-eta) * (1 - exp(-3 sqrt(lambda) r)),
        // eta = 4. The trapezoid oracle uses 1e7 panels on [0, 2.4e5]; the
        // truncated tail is below 9e-4 in absolute terms (bounded by
        // s/(2 R^2)), which is under 1e-7 of the total.
        let s = 1e8f64;
        let eta = 4.0f64;
        let q = |r: f64| {
            if r == 0.0 {
                return 0.0;
            }
            s * r.powf(1.0 - eta) / (1.0 + s * r.powf(-eta))
                * -(-3.0 * LAMBDA.sqrt() * r).exp_m1()
        };
        let adaptive = integrate_semi_infinite(&q, 1e-10, 1e-12).unwrap();

        let r_max = 2.4e5;
        let n = 10_000_000usize;
        let h = r_max / n as f64;
        let mut sum = 0.5 * (q(0.0) + q(r_max));
        for i in 1..n {
            sum += q(i as f64 * h);
        }
        let oracle = sum * h + s / (2.0 * r_max * r_max); // integral + tail estimate
        assert_relative_eq!(adaptive.value, oracle, max_relative = 1e-6);
    }

    #[test]
    fn nonconvergence_carries_best_estimate() {
        // A needle too sharp for the panel budget at an absurd tolerance.
        let needle = |x: f64| 1.0 / ((x - 0.31830988618).powi(2) + 1e-28);
        let err = integrate(needle, 0.0, 1.0, 1e-15, 1e-300).unwrap_err();
        let best = err.best();
        assert!(best.value.is_finite());
        assert!(best.est_error > 0.0);
        assert!(best.evaluations > 1000);
    }
}
