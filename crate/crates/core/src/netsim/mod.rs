//! Monte-Carlo simulator of the full-duplex ISAC network.
//!
//! Each realization draws a Poisson field of interfering base stations around
//! the typical BS at the origin, places one active uplink user uniformly in
//! every Voronoi cell (the typical user in the origin cell), draws
//! per-link Rayleigh fading — with the exact squared-exponential law for the
//! radar round trip — and evaluates the five SINRs and both joint
//! interference-cancellation outcomes within the same realization.
//!
//! Randomness is organized so that estimates are reproducible bit-for-bit:
//! every realization index owns a block of counter-mode RNG streams, the
//! per-realization draw schedule is fixed, and parallel aggregation only sums
//! integer counts. Enlarging the window appends generation shells without
//! disturbing the streams of the inner ones, so a window-doubling study sees
//! each realization extended rather than resampled.

pub mod geometry;

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Poisson};
use rayon::prelude::*;

use crate::params::{NetworkParams, Scenario};
use geometry::{sample_uniform, square_around, voronoi_cell, Point, Polygon};

/// Generation window for the Poisson field.
///
/// Base stations are generated out to the last shell radius; everything
/// generated interferes. The region beyond `r_win` is a guard ring whose
/// purpose is to close the Voronoi cells near the window edge so users can
/// be placed in them. Cells are clipped to a square of half-side
/// `clip_half_side` around the origin.
#[derive(Debug, Clone)]
pub struct SimWindow {
    pub r_win: f64,
    pub guard: f64,
    /// Outer radii of the concentric generation shells, increasing; each
    /// shell draws from its own RNG stream (at most three shells).
    pub shells: Vec<f64>,
    pub clip_half_side: f64,
}

impl SimWindow {
    /// Default window: interference radius 10/sqrt(pi lambda) (about one
    /// hundred interferers in expectation) plus a guard ring of width
    /// 2/sqrt(pi lambda).
    pub fn for_density(lambda: f64) -> Self {
        let unit = 1.0 / (PI * lambda).sqrt();
        let r_win = 10.0 * unit;
        let guard = 2.0 * unit;
        SimWindow {
            r_win,
            guard,
            shells: vec![r_win + guard],
            clip_half_side: 2.0 * r_win,
        }
    }

    /// The same window with the interference radius doubled. The original
    /// generation region stays as the first shell, so for a fixed
    /// (seed, index) the realization is the original one plus extra far
    /// interferers, not an unrelated resample.
    pub fn doubled(&self) -> Self {
        let r_win = 2.0 * self.r_win;
        let mut shells = self.shells.clone();
        shells.push(r_win + self.guard);
        SimWindow {
            r_win,
            guard: self.guard,
            shells,
            clip_half_side: 2.0 * r_win,
        }
    }

    /// Degenerate window generating no interferers at all; the typical user
    /// is placed uniformly in the clip square. Exercises the zero-interferer
    /// code path.
    pub fn empty(clip_half_side: f64) -> Self {
        SimWindow {
            r_win: 0.0,
            guard: 0.0,
            shells: vec![0.0],
            clip_half_side,
        }
    }
}

/// Per-link fading draws of one realization. Vectors are indexed like
/// `bs_points`/`ue_points`; `h1_sq` is the radar round-trip coefficient
/// h1^2 with h1 unit-exponential (exact law, not the tractable
/// approximation used by the analytical engine).
#[derive(Debug, Clone)]
pub struct LinkFading {
    pub h0: f64,
    pub h1_sq: f64,
    pub bs_to_bs: Vec<f64>,
    pub bs_to_ue: Vec<f64>,
    pub ue_to_bs: Vec<f64>,
    pub ue_to_ue: Vec<f64>,
}

/// One draw of the network: interferer geometry, user placement, and fading.
/// The typical BS sits at the origin and is not part of `bs_points`.
#[derive(Debug, Clone)]
pub struct NetworkRealization {
    /// Interfering base stations.
    pub bs_points: Vec<Point>,
    /// The active uplink user of each interfering cell (same index).
    pub ue_points: Vec<Point>,
    /// The typical user, uniform in the origin cell.
    pub tue: Point,
    /// Distance from the origin to the nearest interfering BS; infinite when
    /// there are none.
    pub rho: f64,
    /// Serving distance origin -> typical user.
    pub r0: f64,
    pub fading: LinkFading,
}

/// Number of RNG streams reserved per realization index.
const STREAMS_PER_REALIZATION: u64 = 8;
const SLOT_CELL: u64 = 3;
const SLOT_UES: u64 = 4;
const SLOT_FADING: u64 = 5;

fn stream_rng(seed: u64, index: u64, slot: u64) -> ChaCha8Rng {
    debug_assert!(slot < STREAMS_PER_REALIZATION);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index * STREAMS_PER_REALIZATION + slot);
    rng
}

/// Draws one network realization for `(seed, index)`.
///
/// The draw schedule is fixed: shell k of BS positions on stream k; the
/// intracell draws (h0, h1, then the typical user's position) on one stream;
/// interfering users on another, three draws per cell in BS index order; and
/// per-link fading on a fourth, four draws per interferer. Identical
/// `(seed, index)` therefore reproduce the realization exactly, and windows
/// that extend the shell list only append to it.
pub fn generate_realization(
    params: &NetworkParams,
    window: &SimWindow,
    seed: u64,
    index: u64,
) -> NetworkRealization {
    assert!(window.shells.len() as u64 <= SLOT_CELL);
    let mut bs_points: Vec<Point> = Vec::new();
    let mut r_in: f64 = 0.0;
    for (shell, &r_out) in window.shells.iter().enumerate() {
        let mut rng = stream_rng(seed, index, shell as u64);
        let mean = params.lambda * PI * (r_out * r_out - r_in * r_in);
        let count = if mean > 0.0 {
            Poisson::new(mean).expect("positive mean").sample(&mut rng) as u64
        } else {
            0
        };
        for _ in 0..count {
            let r = (r_in * r_in + rng.gen::<f64>() * (r_out * r_out - r_in * r_in)).sqrt();
            let phi = rng.gen::<f64>() * (2.0 * PI);
            bs_points.push(Point::new(r * phi.cos(), r * phi.sin()));
        }
        r_in = r_out;
    }

    let bound: Polygon = square_around(Point::ORIGIN, window.clip_half_side);

    let mut cell_rng = stream_rng(seed, index, SLOT_CELL);
    let h0: f64 = Exp1.sample(&mut cell_rng);
    let h1: f64 = Exp1.sample(&mut cell_rng);
    let origin_cell = voronoi_cell(Point::ORIGIN, &bs_points, &bound);
    let tue = sample_uniform(&origin_cell, &mut cell_rng);

    let mut ue_rng = stream_rng(seed, index, SLOT_UES);
    let mut ue_points = Vec::with_capacity(bs_points.len());
    let mut neighbors: Vec<Point> = Vec::with_capacity(bs_points.len());
    for i in 0..bs_points.len() {
        neighbors.clear();
        neighbors.push(Point::ORIGIN);
        neighbors.extend_from_slice(&bs_points[..i]);
        neighbors.extend_from_slice(&bs_points[i + 1..]);
        let cell = voronoi_cell(bs_points[i], &neighbors, &bound);
        ue_points.push(sample_uniform(&cell, &mut ue_rng));
    }

    let mut fade_rng = stream_rng(seed, index, SLOT_FADING);
    let n = bs_points.len();
    let mut fading = LinkFading {
        h0,
        h1_sq: h1 * h1,
        bs_to_bs: Vec::with_capacity(n),
        bs_to_ue: Vec::with_capacity(n),
        ue_to_bs: Vec::with_capacity(n),
        ue_to_ue: Vec::with_capacity(n),
    };
    for _ in 0..n {
        fading.bs_to_bs.push(Exp1.sample(&mut fade_rng));
        fading.bs_to_ue.push(Exp1.sample(&mut fade_rng));
        fading.ue_to_bs.push(Exp1.sample(&mut fade_rng));
        fading.ue_to_ue.push(Exp1.sample(&mut fade_rng));
    }

    let rho = bs_points
        .iter()
        .map(|p| p.norm())
        .fold(f64::INFINITY, f64::min);

    NetworkRealization {
        r0: tue.norm(),
        bs_points,
        ue_points,
        tue,
        rho,
        fading,
    }
}

/// The per-realization quantities the SINRs are built from: link distances,
/// intracell fading, and the four unit-power interference sums (BS field and
/// UE field, each seen at the typical BS and at the typical user). Power
/// levels, thresholds, RSI, and noise enter only afterwards, so one geometry
/// ensemble serves every sweep that keeps `lambda` and `eta` fixed.
#[derive(Debug, Clone, Copy)]
pub struct RealizationStats {
    pub r0: f64,
    pub rho: f64,
    pub h0: f64,
    pub h1_sq: f64,
    /// BS-field interference at the typical BS.
    pub i_o_b: f64,
    /// UE-field interference at the typical BS.
    pub i_o_u: f64,
    /// BS-field interference at the typical user.
    pub i_u_b: f64,
    /// UE-field interference at the typical user.
    pub i_u_u: f64,
}

fn path_gain(d2: f64, eta: f64) -> f64 {
    if eta == 4.0 {
        1.0 / (d2 * d2)
    } else {
        d2.powf(-0.5 * eta)
    }
}

/// Reduces a realization to its interference sums for path-loss exponent
/// `eta`.
pub fn stats_of(real: &NetworkRealization, eta: f64) -> RealizationStats {
    let mut st = RealizationStats {
        r0: real.r0,
        rho: real.rho,
        h0: real.fading.h0,
        h1_sq: real.fading.h1_sq,
        i_o_b: 0.0,
        i_o_u: 0.0,
        i_u_b: 0.0,
        i_u_u: 0.0,
    };
    for (i, &bs) in real.bs_points.iter().enumerate() {
        st.i_o_b += real.fading.bs_to_bs[i] * path_gain(bs.dist2(Point::ORIGIN), eta);
        st.i_u_b += real.fading.bs_to_ue[i] * path_gain(bs.dist2(real.tue), eta);
    }
    for (i, &ue) in real.ue_points.iter().enumerate() {
        st.i_o_u += real.fading.ue_to_bs[i] * path_gain(ue.dist2(Point::ORIGIN), eta);
        st.i_u_u += real.fading.ue_to_ue[i] * path_gain(ue.dist2(real.tue), eta);
    }
    st
}

/// The five SINRs of one realization and the two joint SuIC outcomes.
#[derive(Debug, Clone, Copy)]
pub struct SinrSample {
    /// Downlink at the typical user.
    pub sinr_ue: f64,
    /// Uplink at the BS with the radar echo still present (decode first).
    pub sinr_bs_decode1: f64,
    /// Echo at the BS after the uplink has been removed (detect second).
    pub sinr_bs_detect2: f64,
    /// Echo at the BS with the uplink still present (detect first).
    pub sinr_bs_detect1: f64,
    /// Uplink at the BS after the echo has been removed (decode second).
    pub sinr_bs_decode2: f64,
    /// Both stages of the decode-first order succeeded.
    pub decode1_then_detect2: bool,
    /// Both stages of the detect-first order succeeded.
    pub detect1_then_decode2: bool,
}

/// Evaluates the five SINRs of a reduced realization under a scenario.
/// With intercell interference disabled the four field sums are dropped and
/// only intracell terms, RSI, and noise remain.
pub fn sinrs_from_stats(st: &RealizationStats, sc: &Scenario) -> SinrSample {
    let p = &sc.params;
    let (i_o_b, i_o_u, i_u_b, i_u_u) = if sc.intercell {
        (st.i_o_b, st.i_o_u, st.i_u_b, st.i_u_u)
    } else {
        (0.0, 0.0, 0.0, 0.0)
    };
    let gain_r0 = path_gain(st.r0 * st.r0, p.eta);
    let sig_dl = p.p_b * st.h0 * gain_r0;
    let sig_ul = p.p_u * st.h0 * gain_r0;
    let echo = p.p_b * st.h1_sq * path_gain(sc.r1 * sc.r1, 2.0 * p.eta);
    let den_ue = p.p_b * i_u_b + p.p_u * i_u_u + p.p_u * p.zeta + p.sigma2;
    let den_bs = p.p_b * i_o_b + p.p_u * i_o_u + p.p_b * p.zeta + p.sigma2;

    let sinr_ue = sig_dl / den_ue;
    let sinr_bs_decode1 = sig_ul / (echo + den_bs);
    let sinr_bs_detect2 = echo / den_bs;
    let sinr_bs_detect1 = echo / (sig_ul + den_bs);
    let sinr_bs_decode2 = sig_ul / den_bs;
    SinrSample {
        sinr_ue,
        sinr_bs_decode1,
        sinr_bs_detect2,
        sinr_bs_detect1,
        sinr_bs_decode2,
        decode1_then_detect2: sinr_bs_decode1 > sc.theta_u && sinr_bs_detect2 > sc.theta_b,
        detect1_then_decode2: sinr_bs_detect1 > sc.theta_b && sinr_bs_decode2 > sc.theta_u,
    }
}

/// Evaluates the SINRs of a full realization under a scenario.
pub fn sample_sinrs(real: &NetworkRealization, sc: &Scenario) -> SinrSample {
    sinrs_from_stats(&stats_of(real, sc.params.eta), sc)
}

/// A geometry ensemble: reduced realizations tied to the density and
/// path-loss exponent they were generated under.
#[derive(Debug, Clone)]
pub struct StatsEnsemble {
    pub lambda: f64,
    pub eta: f64,
    pub stats: Vec<RealizationStats>,
}

impl StatsEnsemble {
    fn check(&self, sc: &Scenario) {
        assert_eq!(
            (self.lambda, self.eta),
            (sc.params.lambda, sc.params.eta),
            "ensemble was generated under different lambda/eta"
        );
    }
}

/// Generates `n_reps` realizations in parallel and reduces each to its
/// interference sums. Realization `i` uses RNG streams derived from
/// `(seed, i)` only, so the result is identical for any worker count.
pub fn collect_stats(
    params: &NetworkParams,
    window: &SimWindow,
    n_reps: u64,
    seed: u64,
) -> StatsEnsemble {
    let stats: Vec<RealizationStats> = (0..n_reps)
        .into_par_iter()
        .map(|i| stats_of(&generate_realization(params, window, seed, i), params.eta))
        .collect();
    StatsEnsemble {
        lambda: params.lambda,
        eta: params.eta,
        stats,
    }
}

/// A Monte-Carlo frequency estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    /// Fraction of realizations in which the event occurred.
    pub value: f64,
    /// Binomial standard error sqrt(p(1-p)/n).
    pub stderr: f64,
    pub n: u64,
}

impl McEstimate {
    fn from_count(count: u64, n: u64) -> Self {
        let value = count as f64 / n as f64;
        McEstimate {
            value,
            stderr: (value * (1.0 - value) / n as f64).sqrt(),
            n,
        }
    }
}

/// Monte-Carlo estimates of the seven event probabilities of one scenario:
/// the five SINR marginals and the two joint SuIC orders. The stage-2
/// marginals (`detect_bs_second`, `decode_bs_second`) are unconditional
/// frequencies of the stage-2 SINR exceeding its threshold, the quantities
/// the post-cancellation formulas describe; the joint fields count both
/// stages succeeding in the same realization.
#[derive(Debug, Clone, Copy)]
pub struct McReport {
    pub n: u64,
    pub decode_ue: McEstimate,
    pub decode_bs_first: McEstimate,
    pub detect_bs_second: McEstimate,
    pub detect_bs_first: McEstimate,
    pub decode_bs_second: McEstimate,
    pub detect_bs_second_joint: McEstimate,
    pub decode_bs_second_joint: McEstimate,
}

/// Counts the seven events of `sc` over an existing ensemble.
pub fn estimate_from_stats(ens: &StatsEnsemble, sc: &Scenario) -> McReport {
    ens.check(sc);
    let n = ens.stats.len() as u64;
    assert!(n >= 1);
    let mut counts = [0u64; 7];
    for st in &ens.stats {
        let s = sinrs_from_stats(st, sc);
        counts[0] += (s.sinr_ue > sc.theta_b) as u64;
        counts[1] += (s.sinr_bs_decode1 > sc.theta_u) as u64;
        counts[2] += (s.sinr_bs_detect2 > sc.theta_b) as u64;
        counts[3] += (s.sinr_bs_detect1 > sc.theta_b) as u64;
        counts[4] += (s.sinr_bs_decode2 > sc.theta_u) as u64;
        counts[5] += s.decode1_then_detect2 as u64;
        counts[6] += s.detect1_then_decode2 as u64;
    }
    McReport {
        n,
        decode_ue: McEstimate::from_count(counts[0], n),
        decode_bs_first: McEstimate::from_count(counts[1], n),
        detect_bs_second: McEstimate::from_count(counts[2], n),
        detect_bs_first: McEstimate::from_count(counts[3], n),
        decode_bs_second: McEstimate::from_count(counts[4], n),
        detect_bs_second_joint: McEstimate::from_count(counts[5], n),
        decode_bs_second_joint: McEstimate::from_count(counts[6], n),
    }
}

/// Estimates all seven event probabilities with an explicit window.
pub fn estimate_windowed(sc: &Scenario, n_reps: u64, seed: u64, window: &SimWindow) -> McReport {
    estimate_from_stats(&collect_stats(&sc.params, window, n_reps, seed), sc)
}

/// Estimates all seven event probabilities under the default window.
pub fn estimate(sc: &Scenario, n_reps: u64, seed: u64) -> McReport {
    estimate_windowed(sc, n_reps, seed, &SimWindow::for_density(sc.params.lambda))
}

fn mean_and_stderr(samples: &[f64]) -> McEstimate {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    McEstimate {
        value: mean,
        stderr: (var / n).sqrt(),
        n: samples.len() as u64,
    }
}

/// Truncation radius for the interference-field samplers: far enough that
/// the neglected tail shifts the transform by about half a Monte-Carlo
/// standard error. The variance of `exp(-s I)` is `L(2s) - L(s)^2`, so the
/// anticipated transform values at `s` and `2s` size the window; they play
/// no role in the comparison itself.
fn truncation_radius(
    s: f64,
    lambda: f64,
    eta: f64,
    floor: f64,
    n: u64,
    hint: f64,
    hint_2s: f64,
) -> f64 {
    let value = hint.clamp(1e-12, 1.0);
    let var = (hint_2s.clamp(0.0, 1.0) - value * value).max(1e-12);
    let beta = (0.5 * (var / n as f64).sqrt() / value).clamp(1e-6, 0.05);
    let r = (2.0 * PI * lambda * s / ((eta - 2.0) * beta)).powf(1.0 / (eta - 2.0));
    r.max(1.5 * floor)
}

/// Empirical `E[exp(-s I)]` where `I` is drawn from the field model behind
/// `lt_unconditioned`: a homogeneous Poisson field of unit-power Rayleigh
/// interferers outside guard radius `psi`. The anticipated transform values
/// at `s` and `2s` (closed forms being validated are the natural choice)
/// only size the truncation window.
pub fn mc_lt_unconditioned(
    s: f64,
    psi: f64,
    lambda: f64,
    eta: f64,
    n_draws: u64,
    seed: u64,
    hint: f64,
    hint_2s: f64,
) -> McEstimate {
    let r_max = truncation_radius(s, lambda, eta, psi, n_draws, hint, hint_2s);
    let samples: Vec<f64> = (0..n_draws)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i, 0);
            (-s * annulus_interference(&mut rng, lambda, eta, psi, r_max)).exp()
        })
        .collect();
    mean_and_stderr(&samples)
}

/// As `mc_lt_unconditioned`, with one additional interferer pinned at
/// distance exactly `psi` (the conditioned-nearest-interferer model).
pub fn mc_lt_conditioned(
    s: f64,
    psi: f64,
    lambda: f64,
    eta: f64,
    n_draws: u64,
    seed: u64,
    hint: f64,
    hint_2s: f64,
) -> McEstimate {
    let r_max = truncation_radius(s, lambda, eta, psi, n_draws, hint, hint_2s);
    let pinned_gain = psi.powf(-eta);
    let samples: Vec<f64> = (0..n_draws)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i, 0);
            let mut interference = annulus_interference(&mut rng, lambda, eta, psi, r_max);
            let h: f64 = Exp1.sample(&mut rng);
            interference += h * pinned_gain;
            (-s * interference).exp()
        })
        .collect();
    mean_and_stderr(&samples)
}

/// Empirical `E[exp(-s I)]` for the field model behind `lt_repulsion`: an
/// inhomogeneous Poisson field of unit-power Rayleigh interferers whose
/// density rises from zero as `lambda (1 - exp(-3 sqrt(lambda) r))`,
/// realized by thinning a homogeneous field.
pub fn mc_lt_repulsion(
    s: f64,
    lambda: f64,
    eta: f64,
    n_draws: u64,
    seed: u64,
    hint: f64,
    hint_2s: f64,
) -> McEstimate {
    let r_max = truncation_radius(s, lambda, eta, 0.0, n_draws, hint, hint_2s);
    let rate = 3.0 * lambda.sqrt();
    let samples: Vec<f64> = (0..n_draws)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i, 0);
            let mean = lambda * PI * r_max * r_max;
            let count = Poisson::new(mean).expect("positive mean").sample(&mut rng) as u64;
            let mut interference = 0.0;
            for _ in 0..count {
                let r = (rng.gen::<f64>() * r_max * r_max).sqrt();
                if rng.gen::<f64>() < (-rate * r).exp() {
                    continue;
                }
                let h: f64 = Exp1.sample(&mut rng);
                interference += h * r.powf(-eta);
            }
            (-s * interference).exp()
        })
        .collect();
    mean_and_stderr(&samples)
}

/// Empirical `E[exp(-s h1^2)]` with `h1` unit-exponential, for validating
/// the radar round-trip fading transform.
pub fn mc_lt_h1_squared(s: f64, n_draws: u64, seed: u64) -> McEstimate {
    let samples: Vec<f64> = (0..n_draws)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i, 0);
            let h: f64 = Exp1.sample(&mut rng);
            (-s * h * h).exp()
        })
        .collect();
    mean_and_stderr(&samples)
}

/// Kolmogorov–Smirnov distance between a sample and a reference CDF
/// (sorts the sample in place).
pub fn ks_distance(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    assert!(!samples.is_empty());
    samples.sort_unstable_by(f64::total_cmp);
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - f).abs());
    }
    d
}

fn annulus_interference(
    rng: &mut ChaCha8Rng,
    lambda: f64,
    eta: f64,
    r_min: f64,
    r_max: f64,
) -> f64 {
    debug_assert!(r_max > r_min);
    let mean = lambda * PI * (r_max * r_max - r_min * r_min);
    let count = if mean > 0.0 {
        Poisson::new(mean).expect("positive mean").sample(rng) as u64
    } else {
        0
    };
    let mut total = 0.0;
    for _ in 0..count {
        let r2 = r_min * r_min + rng.gen::<f64>() * (r_max * r_max - r_min * r_min);
        let h: f64 = Exp1.sample(rng);
        total += h * path_gain(r2, eta);
    }
    total
}
