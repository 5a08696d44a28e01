//! Laplace transforms of intercell interference under the three guard-zone
//! geometries, plus the radar fading model.
//!
//! Every transform is `E[exp(-s I)]` for the aggregate interference `I` of a
//! unit-power field; callers fold transmit powers into `s`. Three field
//! geometries appear:
//!
//! * unconditioned — a Poisson field outside a guard disk of radius `psi`;
//! * conditioned — the same field with one interferer guaranteed exactly on
//!   the guard boundary (the nearest-interferer conditioning);
//! * repulsion — the soft-core field of one-user-per-cell uplink
//!   transmitters, with radial intensity `lambda (1 - exp(-3 sqrt(lambda) r))`
//!   around the receiving BS.
//!
//! The radar echo fades as `h1^2` with `h1` unit-exponential (the two-way
//! channel), with exact CDF `1 - exp(-sqrt(x))`; the analysis engine uses the
//! tractable approximation `(1 - exp(-eps_r x))^m_r` alongside the exact
//! Laplace transform `sqrt(pi) a erfcx(a)`, `a = 1/(2 sqrt(s))`.

use crate::params::{FadingConstants, NetworkParams};
use crate::quad::{self, QuadError};
use crate::specfun;

use std::f64::consts::PI;

/// Field intensity and path-loss context shared by all transforms.
#[derive(Debug, Clone, Copy)]
pub struct LtContext {
    pub lambda: f64,
    pub eta: f64,
    pub delta: f64,
}

impl LtContext {
    pub fn new(lambda: f64, eta: f64) -> Self {
        LtContext {
            lambda,
            eta,
            delta: 2.0 / eta,
        }
    }
}

impl From<&NetworkParams> for LtContext {
    fn from(p: &NetworkParams) -> Self {
        LtContext::new(p.lambda, p.eta)
    }
}

/// Which node is receiving.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Receiver {
    TypicalBs,
    TypicalUe,
}

/// Which field of transmitters is interfering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldSource {
    BsField,
    UeField,
}

/// Laplace transform of the interference from a Poisson field of unit-power
/// interferers kept outside the guard radius `psi`:
/// `exp(-2 pi lambda s / ((eta-2) psi^(eta-2)) 2F1(1, 1-d; 2-d; -s/psi^eta))`.
///
/// At `eta = 4` the hypergeometric factor reduces to an arctangent and the
/// exponent becomes `pi lambda sqrt(s) atan(sqrt(s)/psi^2)`; the reduction is
/// used as a fast path.
pub fn lt_unconditioned(s: f64, psi: f64, ctx: &LtContext) -> f64 {
    (-lt_unconditioned_exponent(s, psi, ctx)).exp()
}

/// Negated logarithm of `lt_unconditioned`, i.e. the non-negative exponent `E`
/// with `lt = exp(-E)`. Exposed so callers that need `1 - lt` for nearly
/// transparent interference (`E` far below machine epsilon) can combine
/// exponents and use `expm1` instead of subtracting from 1.
pub fn lt_unconditioned_exponent(s: f64, psi: f64, ctx: &LtContext) -> f64 {
    debug_assert!(s >= 0.0 && psi > 0.0);
    if s == 0.0 {
        return 0.0;
    }
    if ctx.eta == 4.0 {
        let sq = s.sqrt();
        PI * ctx.lambda * sq * (sq / (psi * psi)).atan()
    } else {
        let z = -s / psi.powf(ctx.eta);
        2.0 * PI * ctx.lambda * s / ((ctx.eta - 2.0) * psi.powf(ctx.eta - 2.0))
            * specfun::hyp2f1_interference(z, ctx.delta)
    }
}

/// As `lt_unconditioned`, evaluated through the general hypergeometric path
/// regardless of `eta`. Exists to cross-validate the `eta = 4` reduction.
pub fn lt_unconditioned_general(s: f64, psi: f64, ctx: &LtContext) -> f64 {
    if s == 0.0 {
        return 1.0;
    }
    let z = -s / psi.powf(ctx.eta);
    let exponent = 2.0 * PI * ctx.lambda * s / ((ctx.eta - 2.0) * psi.powf(ctx.eta - 2.0))
        * specfun::hyp2f1_interference(z, ctx.delta);
    (-exponent).exp()
}

/// Laplace transform with the nearest interferer conditioned to sit exactly
/// at distance `psi`: the unconditioned transform times the Rayleigh-fading
/// factor `1/(1 + s psi^-eta)` of that guaranteed interferer.
pub fn lt_conditioned(s: f64, psi: f64, ctx: &LtContext) -> f64 {
    debug_assert!(s >= 0.0 && psi > 0.0);
    if s == 0.0 {
        return 1.0;
    }
    lt_unconditioned(s, psi, ctx) / (1.0 + s * psi.powf(-ctx.eta))
}

/// Radial integral in the exponent of the repulsion transform:
/// `J(s) = int_0^inf s r^(1-eta) / (1 + s r^-eta) (1 - e^(-3 sqrt(lambda) r)) dr`.
fn repulsion_exponent_integral(s: f64, ctx: &LtContext) -> Result<f64, QuadError> {
    let eta = ctx.eta;
    let rate = 3.0 * ctx.lambda.sqrt();
    let res = quad::integrate_semi_infinite(
        |r| {
            if r <= 0.0 {
                return 0.0;
            }
            let pl = s * r.powf(-eta);
            pl * r / (1.0 + pl) * -(-rate * r).exp_m1()
        },
        1e-9,
        1e-290,
    )?;
    Ok(res.value)
}

/// Laplace transform of the interference from the one-user-per-cell uplink
/// field around the typical BS, evaluated by direct quadrature:
/// `exp(-2 pi lambda J(s))`.
pub fn lt_repulsion(s: f64, ctx: &LtContext) -> Result<f64, QuadError> {
    debug_assert!(s >= 0.0);
    if s == 0.0 {
        return Ok(1.0);
    }
    let j = repulsion_exponent_integral(s, ctx)?;
    Ok((-2.0 * PI * ctx.lambda * j).exp())
}

/// Precomputed log-log interpolation table for the repulsion exponent.
///
/// The integral `J(s)` depends only on `(lambda, eta)` and is smooth and
/// asymptotically power-law in `s` at both ends (`s^min(1, 3/eta)` at small
/// `s`, `s^delta` at large `s`), so `ln J` is interpolated in `ln s` by a
/// Catmull-Rom cubic on a uniform grid of 32 points per decade. Below the
/// grid the end slope extrapolates (the transform there is within 1e-7 of 1);
/// above it the transform has decayed below representable magnitude and 0 is
/// returned.
pub struct RepulsionTable {
    ln_s0: f64,
    step: f64,
    ln_j: Vec<f64>,
    s_min: f64,
    s_max: f64,
    two_pi_lambda: f64,
}

impl RepulsionTable {
    pub fn new(ctx: &LtContext) -> Result<Self, QuadError> {
        // Scale anchor: the repulsion hole radius 1/(3 sqrt(lambda)) raised
        // to the path-loss power, the natural unit of s.
        let r_c = 1.0 / (3.0 * ctx.lambda.sqrt());
        let s_min = 1e-10 * r_c.powf(ctx.eta);
        let s_max = 1e16 * r_c.powf(ctx.eta);
        let per_decade = 32.0;
        let decades = (s_max / s_min).log10();
        let n = (decades * per_decade).ceil() as usize + 1;
        let ln_s0 = s_min.ln();
        let step = (s_max.ln() - ln_s0) / (n - 1) as f64;
        let mut ln_j = Vec::with_capacity(n);
        for i in 0..n {
            let s = (ln_s0 + step * i as f64).exp();
            ln_j.push(repulsion_exponent_integral(s, ctx)?.ln());
        }
        Ok(RepulsionTable {
            ln_s0,
            step,
            ln_j,
            s_min,
            s_max,
            two_pi_lambda: 2.0 * PI * ctx.lambda,
        })
    }

    /// Interpolated transform value.
    pub fn eval(&self, s: f64) -> f64 {
        debug_assert!(s >= 0.0);
        if s == 0.0 {
            return 1.0;
        }
        if s <= self.s_min {
            let slope = (self.ln_j[1] - self.ln_j[0]) / self.step;
            let ln_j = self.ln_j[0] + slope * (s.ln() - self.ln_s0);
            return (-self.two_pi_lambda * ln_j.exp()).exp();
        }
        if s >= self.s_max {
            return 0.0;
        }
        let x = (s.ln() - self.ln_s0) / self.step;
        let k = (x as usize).min(self.ln_j.len() - 2);
        let t = x - k as f64;
        let at = |i: isize| {
            let i = i.clamp(0, self.ln_j.len() as isize - 1) as usize;
            self.ln_j[i]
        };
        let (p0, p1, p2, p3) = (at(k as isize - 1), at(k as isize), at(k as isize + 1), at(k as isize + 2));
        let m1 = 0.5 * (p2 - p0);
        let m2 = 0.5 * (p3 - p1);
        let t2 = t * t;
        let t3 = t2 * t;
        let ln_j = (2.0 * t3 - 3.0 * t2 + 1.0) * p1
            + (t3 - 2.0 * t2 + t) * m1
            + (-2.0 * t3 + 3.0 * t2) * p2
            + (t3 - t2) * m2;
        (-self.two_pi_lambda * ln_j.exp()).exp()
    }
}

/// CDF of the joint radar fading coefficient in its tractable approximate
/// form `(1 - exp(-eps_r x))^m_r`.
pub fn cdf_hjr(x: f64, fc: &FadingConstants) -> f64 {
    debug_assert!(x >= 0.0);
    (-(-fc.eps_r * x).exp_m1()).powf(fc.m_r)
}

/// Exact CDF of `h1^2` for `h1` unit-exponential: `1 - exp(-sqrt(x))`.
pub fn cdf_h1_squared_exact(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    -(-x.sqrt()).exp_m1()
}

/// Exact Laplace transform of `h1^2`: `sqrt(pi) a erfcx(a)` with
/// `a = 1/(2 sqrt(s))`; equals 1 at `s = 0` by continuity.
pub fn lt_h1_squared(s: f64) -> f64 {
    debug_assert!(s >= 0.0);
    if s == 0.0 {
        return 1.0;
    }
    let a = 0.5 / s.sqrt();
    PI.sqrt() * a * specfun::erfcx(a)
}

/// Table-driven dispatch of the guard-zone transform for a receiver/source
/// pair: the typical BS sees the BS field conditioned at `rho` and the UE
/// field outside `rho/2`; the typical UE sees the BS field outside `r0` and
/// the soft-core UE field. `conditioning` carries `rho` at the BS and `r0`
/// at the UE. With intercell interference disabled every transform is 1.
pub fn lt_for_receiver(
    receiver: Receiver,
    source: FieldSource,
    s: f64,
    conditioning: f64,
    ctx: &LtContext,
    intercell: bool,
) -> Result<f64, QuadError> {
    if !intercell {
        return Ok(1.0);
    }
    match (receiver, source) {
        (Receiver::TypicalBs, FieldSource::BsField) => Ok(lt_conditioned(s, conditioning, ctx)),
        (Receiver::TypicalBs, FieldSource::UeField) => {
            Ok(lt_unconditioned(s, conditioning / 2.0, ctx))
        }
        (Receiver::TypicalUe, FieldSource::BsField) => {
            Ok(lt_unconditioned(s, conditioning, ctx))
        }
        (Receiver::TypicalUe, FieldSource::UeField) => lt_repulsion(s, ctx),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ctx() -> LtContext {
        LtContext::new(1e-5, 4.0)
    }

    #[test]
    fn unconditioned_at_zero_is_one() {
        assert_eq!(lt_unconditioned(0.0, 100.0, &ctx()), 1.0);
    }

    #[test]
    fn unconditioned_closed_form_value() {
        // eta=4, lambda=1e-5, psi=100, s=1e8: the exponent reduces to
        // pi lambda sqrt(s) atan(sqrt(s)/psi^2) = pi^2/40.
        let got = lt_unconditioned(1e8, 100.0, &ctx());
        let want = (-PI * PI / 40.0).exp();
        assert_relative_eq!(got, want, max_relative = 1e-14);
        assert_relative_eq!(got, 0.78134373054744425, max_relative = 1e-12);
    }

    #[test]
    fn conditioned_halves_at_unit_boundary_loss() {
        // Same point: s psi^-eta = 1, so the guaranteed interferer
        // contributes exactly 1/2.
        let got = lt_conditioned(1e8, 100.0, &ctx());
        assert_relative_eq!(got, 0.39067186527372213, max_relative = 1e-12);
    }

    #[test]
    fn conditioned_vanishes_at_large_s() {
        let c = ctx();
        assert!(lt_conditioned(1e30, 100.0, &c) < 1e-12);
    }

    #[test]
    fn eta4_reduction_matches_general_path() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let s = 10f64.powf(rng.gen_range(-2.0..12.0));
            let psi = 10f64.powf(rng.gen_range(0.0..3.5));
            let fast = lt_unconditioned(s, psi, &c);
            let general = lt_unconditioned_general(s, psi, &c);
            assert_relative_eq!(fast, general, max_relative = 1e-10);
        }
    }

    #[test]
    fn transforms_decrease_in_s_and_grow_with_guard() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let psi = 10f64.powf(rng.gen_range(0.5..3.0));
            let s1 = 10f64.powf(rng.gen_range(0.0..9.0));
            let s2 = s1 * rng.gen_range(1.5..50.0);
            assert!(lt_unconditioned(s2, psi, &c) <= lt_unconditioned(s1, psi, &c));
            assert!(lt_conditioned(s2, psi, &c) <= lt_conditioned(s1, psi, &c));
            assert!(lt_conditioned(s1, psi, &c) <= lt_unconditioned(s1, psi, &c));
            assert!(
                lt_unconditioned(s1, psi * 2.0, &c) >= lt_unconditioned(s1, psi, &c),
                "guard growth must not increase interference"
            );
            let v = lt_unconditioned(s1, psi, &c);
            assert!(v > 0.0 && v <= 1.0);
        }
    }

    #[test]
    fn repulsion_at_zero_and_vanishing_density() {
        let c = ctx();
        assert_eq!(lt_repulsion(0.0, &c).unwrap(), 1.0);
        let sparse = LtContext::new(1e-30, 4.0);
        let v = lt_repulsion(1e8, &sparse).unwrap();
        assert_relative_eq!(v, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn repulsion_monotone_in_s() {
        let c = ctx();
        let mut prev = 1.0;
        for k in 0..14 {
            let s = 10f64.powf(k as f64);
            let v = lt_repulsion(s, &c).unwrap();
            assert!(v <= prev && v > 0.0 && v <= 1.0, "s={s} v={v} prev={prev}");
            prev = v;
        }
    }

    #[test]
    fn repulsion_table_matches_direct_evaluation() {
        let c = ctx();
        let table = RepulsionTable::new(&c).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let s = 10f64.powf(rng.gen_range(-2.0..13.0));
            let direct = lt_repulsion(s, &c).unwrap();
            let interp = table.eval(s);
            if direct > 1e-290 {
                assert_relative_eq!(interp, direct, max_relative = 1e-6);
            } else {
                assert!(interp <= 1e-290);
            }
        }
    }

    #[test]
    fn repulsion_table_extrapolation_regions() {
        let c = ctx();
        let table = RepulsionTable::new(&c).unwrap();
        // Far below the grid the transform is indistinguishable from 1.
        let tiny = table.eval(1e-14 * (1.0 / (3.0 * c.lambda.sqrt())).powf(c.eta));
        assert_relative_eq!(tiny, 1.0, epsilon = 1e-6);
        assert_eq!(table.eval(1e40), 0.0);
        assert_eq!(table.eval(0.0), 1.0);
    }

    #[test]
    fn hjr_cdf_endpoints_and_monotonicity() {
        let fc = FadingConstants::get();
        assert_eq!(cdf_hjr(0.0, fc), 0.0);
        assert!(cdf_hjr(1e9, fc) > 1.0 - 1e-12);
        let mut prev = 0.0;
        for k in 1..=500 {
            let x = k as f64 * 0.2;
            let v = cdf_hjr(x, fc);
            assert!((0.0..=1.0).contains(&v) && v >= prev);
            prev = v;
        }
        assert_eq!(cdf_h1_squared_exact(0.0), 0.0);
        assert_relative_eq!(cdf_h1_squared_exact(4.0), 1.0 - (-2.0f64).exp());
    }

    #[test]
    fn h1_squared_transform_reference_values() {
        assert_eq!(lt_h1_squared(0.0), 1.0);
        // Frozen from 40-digit arithmetic on sqrt(pi) e^(1/(4s)) erfc(1/(2 sqrt(s))) / (2 sqrt(s)).
        assert_relative_eq!(lt_h1_squared(0.1), 0.86539258651510230, max_relative = 1e-12);
        assert_relative_eq!(lt_h1_squared(1.0), 0.54564136076504704, max_relative = 1e-12);
        assert_relative_eq!(lt_h1_squared(10.0), 0.23650238570629742, max_relative = 1e-12);
        assert!(lt_h1_squared(1e12) < 1e-5);
    }

    #[test]
    fn h1_squared_transform_continuous_near_zero() {
        // The erfcx form must glide into the s -> 0 limit without a jump.
        assert_relative_eq!(lt_h1_squared(1e-12), 1.0, epsilon = 1e-5);
        let mut prev = 1.0;
        for k in -40..=40 {
            let s = 10f64.powf(k as f64 * 0.25);
            let v = lt_h1_squared(s);
            assert!(v <= prev && v > 0.0, "not monotone at s={s}");
            prev = v;
        }
    }

    #[test]
    fn receiver_dispatch_follows_guard_table() {
        let c = ctx();
        let s = 3.3e7;
        let rho = 200.0;
        let r0 = 140.0;
        assert_relative_eq!(
            lt_for_receiver(Receiver::TypicalBs, FieldSource::BsField, s, rho, &c, true).unwrap(),
            lt_conditioned(s, rho, &c)
        );
        // The closest interfering UE cannot be nearer than half the
        // BS-to-BS spacing.
        assert_relative_eq!(
            lt_for_receiver(Receiver::TypicalBs, FieldSource::UeField, s, rho, &c, true).unwrap(),
            lt_unconditioned(s, 100.0, &c)
        );
        assert_relative_eq!(
            lt_for_receiver(Receiver::TypicalUe, FieldSource::BsField, s, r0, &c, true).unwrap(),
            lt_unconditioned(s, r0, &c)
        );
        assert_relative_eq!(
            lt_for_receiver(Receiver::TypicalUe, FieldSource::UeField, s, r0, &c, true).unwrap(),
            lt_repulsion(s, &c).unwrap()
        );
        for (rx, src) in [
            (Receiver::TypicalBs, FieldSource::BsField),
            (Receiver::TypicalBs, FieldSource::UeField),
            (Receiver::TypicalUe, FieldSource::BsField),
            (Receiver::TypicalUe, FieldSource::UeField),
        ] {
            assert_eq!(lt_for_receiver(rx, src, s, rho, &c, false).unwrap(), 1.0);
        }
    }
}
