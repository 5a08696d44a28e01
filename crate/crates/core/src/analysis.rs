//! The analytical probability engine.
//!
//! Five success probabilities describe the typical cell. The typical UE
//! decodes the downlink; the typical BS, receiving the uplink message and the
//! radar echo superposed, processes them by successive interference
//! cancellation in one of two orders ([`SuicOrder`]): decode the uplink first
//! and then detect the echo, or detect first and then decode. Stage-2
//! probabilities come both conditioned on stage-1 success and as the joint
//! probability of the full two-stage event, the joint being the exact product
//! of the two stages.
//!
//! Every probability is an expectation of Laplace-transform products over the
//! serving distance `R0` and (when intercell interference is enabled) the
//! nearest-interferer distance `rho`, the two treated as independent with
//! `rho` integrated outermost. With intercell interference disabled every
//! transform factor is 1, the `rho` expectation reduces to the identity, and
//! residual self-interference, noise, and intracell terms are retained.

use std::cell::RefCell;

use crate::interference::{self, LtContext, RepulsionTable};
use crate::params::{FadingConstants, NetworkParams, ProbabilityEstimate, Scenario};
use crate::quad::{self, QuadError, QuadResult};

/// Which signal the BS runs through the first SuIC stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuicOrder {
    /// Decode the uplink message first, then detect the radar echo.
    DecodeFirst,
    /// Detect the radar echo first, then decode the uplink message.
    DetectFirst,
}

/// Success probabilities of one SuIC order, plus the UE-side downlink
/// probability which is order-independent.
#[derive(Debug, Clone, Copy)]
pub struct AnalysisReport {
    pub p_decode_ue: ProbabilityEstimate,
    /// First-stage success: decoding for `DecodeFirst`, detection for
    /// `DetectFirst`.
    pub p_stage1: ProbabilityEstimate,
    /// Second-stage success given the first stage succeeded and its signal
    /// was removed.
    pub p_stage2_given: ProbabilityEstimate,
    /// Joint two-stage success, exactly `p_stage1 * p_stage2_given`.
    pub p_stage2_joint: ProbabilityEstimate,
    pub order: SuicOrder,
}

/// The five quantities a parameter sweep reports: the UE-side decode, each
/// order's stage-1 marginal, and each order's joint stage-2 outcome.
#[derive(Debug, Clone, Copy)]
pub struct QuantitySet {
    pub decode_ue: ProbabilityEstimate,
    pub decode_bs_first: ProbabilityEstimate,
    pub detect_bs_second_joint: ProbabilityEstimate,
    pub detect_bs_first: ProbabilityEstimate,
    pub decode_bs_second_joint: ProbabilityEstimate,
}

/// Scenario field a crossover search varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossoverVariable {
    R1,
    Pu,
}

/// Inner (serving-distance) quadrature runs tighter than the outer
/// nearest-interferer one so its noise stays invisible to the outer
/// convergence test.
const INNER_REL_TOL: f64 = 1e-9;
const INNER_ABS_TOL: f64 = 1e-12;

/// Crossover roots are bisected until the bracket shrinks below this
/// fraction of the root.
const CROSSOVER_REL_TOL: f64 = 1e-3;

fn estimate(raw: QuadResult) -> ProbabilityEstimate {
    debug_assert!(
        (-1e-4..=1.0 + 1e-4).contains(&raw.value),
        "probability far outside [0,1]: {}",
        raw.value
    );
    ProbabilityEstimate {
        value: raw.value.clamp(0.0, 1.0),
        error: raw.est_error,
    }
}

fn complement(raw: QuadResult) -> ProbabilityEstimate {
    estimate(QuadResult {
        value: 1.0 - raw.value,
        ..raw
    })
}

fn product(a: ProbabilityEstimate, b: ProbabilityEstimate) -> ProbabilityEstimate {
    ProbabilityEstimate {
        value: a.value * b.value,
        error: a.error * b.value + b.error * a.value + a.error * b.error,
    }
}

/// Evaluates the five decoding/detection probabilities of a scenario in
/// closed form. Holds the precomputed soft-core interference table, so one
/// engine serves every scenario sharing the same `lambda` and `eta`.
pub struct AnalysisEngine {
    ctx: LtContext,
    rep: RepulsionTable,
    fc: &'static FadingConstants,
}

impl AnalysisEngine {
    pub fn new(params: &NetworkParams) -> Result<Self, QuadError> {
        debug_assert!(params.validate().is_ok());
        let ctx = LtContext::from(params);
        let rep = RepulsionTable::new(&ctx)?;
        Ok(AnalysisEngine {
            ctx,
            rep,
            fc: FadingConstants::get(),
        })
    }

    fn check(&self, sc: &Scenario) {
        debug_assert!(sc.validate().is_ok());
        assert!(
            sc.params.lambda == self.ctx.lambda && sc.params.eta == self.ctx.eta,
            "scenario density or path-loss exponent differs from the engine's precomputed context"
        );
    }

    /// Downlink decoding at the typical UE: the BS-field transform is taken
    /// outside the serving distance, the UE field is the soft-core process,
    /// and the UE's own uplink leaks back as `p_u zeta`.
    pub fn p_decode_ue(&self, sc: &Scenario) -> Result<ProbabilityEstimate, QuadError> {
        self.check(sc);
        let p = sc.params;
        let th = sc.theta_b;
        let eta = p.eta;
        let self_noise = th * (p.sigma2 + p.p_u * p.zeta) / p.p_b;
        let raw = if sc.intercell {
            quad::expect_r0(
                |x| {
                    let xe = x.powf(eta);
                    interference::lt_unconditioned(th * xe, x, &self.ctx)
                        * self.rep.eval(th * p.p_u * xe / p.p_b)
                        * (-self_noise * xe).exp()
                },
                p.lambda,
                self.fc.b,
                quad::DEFAULT_REL_TOL,
                quad::DEFAULT_ABS_TOL,
            )?
        } else {
            quad::expect_r0(
                |x| (-self_noise * x.powf(eta)).exp(),
                p.lambda,
                self.fc.b,
                quad::DEFAULT_REL_TOL,
                quad::DEFAULT_ABS_TOL,
            )?
        };
        Ok(estimate(raw))
    }

    /// Serving-distance expectation common to uplink decoding in either SuIC
    /// position: transforms of both interferer fields (when enabled), the
    /// RSI/noise factor, and — only when the echo has not been removed —
    /// the radar fading transform of the intracell echo.
    fn decode_bs_expect_r0(
        &self,
        sc: &Scenario,
        rho: Option<f64>,
        include_echo: bool,
        rel_tol: f64,
        abs_tol: f64,
    ) -> Result<QuadResult, QuadError> {
        let p = sc.params;
        let th = sc.theta_u;
        let eta = p.eta;
        let echo_scale = th * p.p_b / (p.p_u * sc.r1.powf(2.0 * eta));
        let self_noise = th * (p.sigma2 + p.p_b * p.zeta) / p.p_u;
        quad::expect_r0(
            |x| {
                let xe = x.powf(eta);
                let mut f = (-self_noise * xe).exp();
                if let Some(rho) = rho {
                    f *= interference::lt_conditioned(th * xe * p.p_b / p.p_u, rho, &self.ctx)
                        * interference::lt_unconditioned(th * xe, rho / 2.0, &self.ctx);
                }
                if include_echo {
                    f *= interference::lt_h1_squared(echo_scale * xe);
                }
                f
            },
            p.lambda,
            self.fc.b,
            rel_tol,
            abs_tol,
        )
    }

    fn decode_bs(&self, sc: &Scenario, include_echo: bool) -> Result<ProbabilityEstimate, QuadError> {
        self.check(sc);
        if !sc.intercell {
            let raw = self.decode_bs_expect_r0(
                sc,
                None,
                include_echo,
                quad::DEFAULT_REL_TOL,
                quad::DEFAULT_ABS_TOL,
            )?;
            return Ok(estimate(raw));
        }
        let inner_failure = RefCell::new(None);
        let inner_error = RefCell::new(0.0f64);
        let outer = quad::expect_rho(
            |rho| {
                match self.decode_bs_expect_r0(sc, Some(rho), include_echo, INNER_REL_TOL, INNER_ABS_TOL)
                {
                    Ok(r) => {
                        let mut worst = inner_error.borrow_mut();
                        *worst = worst.max(r.est_error);
                        r.value
                    }
                    Err(e) => {
                        let best = e.best().value;
                        inner_failure.replace(Some(e));
                        best
                    }
                }
            },
            sc.params.lambda,
            quad::DEFAULT_REL_TOL,
            quad::DEFAULT_ABS_TOL,
        );
        if let Some(e) = inner_failure.into_inner() {
            return Err(e);
        }
        let mut raw = outer?;
        raw.est_error += inner_error.into_inner();
        Ok(estimate(raw))
    }

    /// Uplink decoding at the BS in the first SuIC position: the unremoved
    /// radar echo contributes its fading transform as intracell interference.
    pub fn p_decode_bs_first(&self, sc: &Scenario) -> Result<ProbabilityEstimate, QuadError> {
        self.decode_bs(sc, true)
    }

    /// Uplink decoding after the echo has been detected and removed.
    pub fn p_decode_bs_second_given(&self, sc: &Scenario) -> Result<ProbabilityEstimate, QuadError> {
        self.decode_bs(sc, false)
    }

    /// Complement `1 - A` of the single-look success factor `A` of the
    /// detection probabilities: interferer-field transforms and the RSI/noise
    /// factor, plus — when the uplink has not been removed (detect-first) —
    /// the fading divisor of the intracell uplink signal at serving distance
    /// `r0`. Combines the exponential factors into one exponent and uses
    /// `expm1`, so the complement keeps full relative precision even when `A`
    /// sits within machine epsilon of 1; the callers raise it to `m_r`, where
    /// any noise would otherwise be amplified and stall the quadrature.
    fn detect_miss_single(&self, sc: &Scenario, rho: Option<f64>, r0: Option<f64>) -> f64 {
        let p = sc.params;
        let s = self.fc.eps_r * sc.theta_b * sc.r1.powf(2.0 * p.eta);
        let mut t = s * (p.p_b * p.zeta + p.sigma2) / p.p_b;
        let z_up = match r0 {
            Some(x) => s * p.p_u / (p.p_b * x.powf(p.eta)),
            None => 0.0,
        };
        let z_cnd = match rho {
            Some(rho) => {
                t += interference::lt_unconditioned_exponent(s, rho, &self.ctx)
                    + interference::lt_unconditioned_exponent(
                        s * p.p_u / p.p_b,
                        rho / 2.0,
                        &self.ctx,
                    );
                s * rho.powf(-p.eta)
            }
            None => 0.0,
        };
        // 1 - exp(-t)/D with D = (1 + z_up)(1 + z_cnd), as ((D-1) + (1 -
        // exp(-t)))/D; every addend is non-negative, so nothing cancels.
        let d_m1 = z_up + z_cnd + z_up * z_cnd;
        if !d_m1.is_finite() {
            return 1.0;
        }
        (d_m1 - (-t).exp_m1()) / (1.0 + d_m1)
    }

    /// Echo detection after the uplink has been decoded and removed.
    pub fn p_detect_bs_second_given(&self, sc: &Scenario) -> Result<ProbabilityEstimate, QuadError> {
        self.check(sc);
        let m_r = self.fc.m_r;
        if !sc.intercell {
            let value = 1.0 - self.detect_miss_single(sc, None, None).powf(m_r);
            return Ok(ProbabilityEstimate { value, error: 0.0 });
        }
        let raw = quad::expect_rho(
            |rho| self.detect_miss_single(sc, Some(rho), None).powf(m_r),
            sc.params.lambda,
            quad::DEFAULT_REL_TOL,
            quad::DEFAULT_ABS_TOL,
        )?;
        Ok(complement(raw))
    }

    /// Echo detection in the first SuIC position: the unremoved uplink
    /// signal joins the interference, bringing the serving distance into the
    /// expectation.
    pub fn p_detect_bs_first(&self, sc: &Scenario) -> Result<ProbabilityEstimate, QuadError> {
        self.check(sc);
        let p = sc.params;
        let m_r = self.fc.m_r;
        if !sc.intercell {
            let raw = quad::expect_r0(
                |x| self.detect_miss_single(sc, None, Some(x)).powf(m_r),
                p.lambda,
                self.fc.b,
                quad::DEFAULT_REL_TOL,
                quad::DEFAULT_ABS_TOL,
            )?;
            return Ok(complement(raw));
        }
        let inner_failure = RefCell::new(None);
        let inner_error = RefCell::new(0.0f64);
        let outer = quad::expect_rho(
            |rho| {
                let inner = quad::expect_r0(
                    |x| self.detect_miss_single(sc, Some(rho), Some(x)).powf(m_r),
                    p.lambda,
                    self.fc.b,
                    INNER_REL_TOL,
                    INNER_ABS_TOL,
                );
                match inner {
                    Ok(r) => {
                        let mut worst = inner_error.borrow_mut();
                        *worst = worst.max(r.est_error);
                        r.value
                    }
                    Err(e) => {
                        let best = e.best().value;
                        inner_failure.replace(Some(e));
                        best
                    }
                }
            },
            p.lambda,
            quad::DEFAULT_REL_TOL,
            quad::DEFAULT_ABS_TOL,
        );
        if let Some(e) = inner_failure.into_inner() {
            return Err(e);
        }
        let mut raw = outer?;
        raw.est_error += inner_error.into_inner();
        Ok(complement(raw))
    }

    /// Both stages of one SuIC order, with the joint second-stage outcome
    /// formed as the exact product of the stage marginals.
    pub fn evaluate_order(&self, sc: &Scenario, order: SuicOrder) -> Result<AnalysisReport, QuadError> {
        let p_decode_ue = self.p_decode_ue(sc)?;
        let (p_stage1, p_stage2_given) = match order {
            SuicOrder::DecodeFirst => (
                self.p_decode_bs_first(sc)?,
                self.p_detect_bs_second_given(sc)?,
            ),
            SuicOrder::DetectFirst => (
                self.p_detect_bs_first(sc)?,
                self.p_decode_bs_second_given(sc)?,
            ),
        };
        Ok(AnalysisReport {
            p_decode_ue,
            p_stage1,
            p_stage2_given,
            p_stage2_joint: product(p_stage1, p_stage2_given),
            order,
        })
    }

    /// The five curve quantities, evaluating each underlying probability
    /// once.
    pub fn quantities(&self, sc: &Scenario) -> Result<QuantitySet, QuadError> {
        let decode_ue = self.p_decode_ue(sc)?;
        let decode_bs_first = self.p_decode_bs_first(sc)?;
        let detect_given = self.p_detect_bs_second_given(sc)?;
        let detect_bs_first = self.p_detect_bs_first(sc)?;
        let decode_given = self.p_decode_bs_second_given(sc)?;
        Ok(QuantitySet {
            decode_ue,
            decode_bs_first,
            detect_bs_second_joint: product(decode_bs_first, detect_given),
            detect_bs_first,
            decode_bs_second_joint: product(detect_bs_first, decode_given),
        })
    }

    fn with_variable(template: &Scenario, var: CrossoverVariable, value: f64) -> Scenario {
        let mut sc = *template;
        match var {
            CrossoverVariable::R1 => sc.r1 = value,
            CrossoverVariable::Pu => sc.params.p_u = value,
        }
        sc
    }

    /// Sign of detect-first minus the decode-first order's joint detection.
    fn order_gap(&self, sc: &Scenario) -> Result<f64, QuadError> {
        let detect_first = self.p_detect_bs_first(sc)?;
        let joint = product(self.p_decode_bs_first(sc)?, self.p_detect_bs_second_given(sc)?);
        Ok(detect_first.value - joint.value)
    }

    /// Searches the grid for a sign change of detect-first minus joint
    /// detect-second and bisects the first bracketing interval to 1e-3
    /// relative. `None` means the same order is superior over the whole
    /// grid.
    pub fn find_crossover(
        &self,
        template: &Scenario,
        var: CrossoverVariable,
        grid: &[f64],
    ) -> Result<Option<f64>, QuadError> {
        assert!(grid.len() >= 2, "crossover search needs at least 2 grid points");
        assert!(
            grid.windows(2).all(|w| w[0] > 0.0 && w[0] < w[1]),
            "crossover grid must be positive and strictly increasing"
        );
        let gap = |value: f64| self.order_gap(&Self::with_variable(template, var, value));
        let mut lo = grid[0];
        let mut g_lo = gap(lo)?;
        let mut bracket = None;
        for &hi in &grid[1..] {
            let g_hi = gap(hi)?;
            if g_lo == 0.0 {
                return Ok(Some(lo));
            }
            if g_lo.signum() != g_hi.signum() {
                bracket = Some((lo, g_lo, hi));
                break;
            }
            lo = hi;
            g_lo = g_hi;
        }
        let Some((mut lo, g_lo, mut hi)) = bracket else {
            return Ok(None);
        };
        let mut lo_sign = g_lo.signum();
        while hi - lo > CROSSOVER_REL_TOL * 0.5 * (hi + lo) {
            let mid = 0.5 * (lo + hi);
            let g_mid = gap(mid)?;
            if g_mid == 0.0 {
                return Ok(Some(mid));
            }
            if g_mid.signum() == lo_sign {
                lo = mid;
                lo_sign = g_mid.signum();
            } else {
                hi = mid;
            }
        }
        Ok(Some(0.5 * (lo + hi)))
    }
}
