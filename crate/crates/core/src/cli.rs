//! Command-line front end: scenario configuration, parameter sweeps,
//! analysis-vs-simulation verification, SuIC-order crossover search, and
//! raw-sample dumps.
//!
//! Unit conventions at this boundary: SINR thresholds are taken in dB and
//! target distances in multiples of the reference length
//! `v = 1/(60 sqrt(lambda))`; everything is converted to linear units once,
//! on entry. CSV output is
//! comma-delimited with a mandatory header row, `.` decimal separator, no
//! locale dependence, and every numeric cell printed to 10 significant
//! digits (a cell is left blank when its engine or SuIC order is disabled).
//!
//! Exit codes: 0 on success, [`EXIT_VERIFY_FAILURE`] when `verify` finds a
//! discrepancy above tolerance, [`EXIT_CONFIG_ERROR`] for configuration,
//! sweep-specification, or output-path problems (clap reports usage errors
//! with the same code), [`EXIT_RUNTIME_ERROR`] when an engine fails to
//! evaluate. Invalid specifications and unwritable output paths are
//! reported before any computation starts.
//!
//! Analytic sweep points are dispatched to the rayon worker pool and merged
//! back in sweep order; the simulator draws one statistics ensemble per
//! sweep and re-thresholds it at every point, since the swept variables
//! leave the network geometry untouched. `RAYON_NUM_THREADS` overrides the
//! worker count, and output is bit-identical at any setting.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use thiserror::Error;

use crate::analysis::{AnalysisEngine, CrossoverVariable, QuantitySet};
use crate::netsim::{self, McEstimate, McReport, SimWindow};
use crate::params::{db_to_linear, load_config, ConfigError, Scenario};
use crate::quad::QuadError;

/// `verify` found a discrepancy above tolerance.
pub const EXIT_VERIFY_FAILURE: u8 = 1;
/// Configuration file, sweep specification, or output path is unusable.
pub const EXIT_CONFIG_ERROR: u8 = 2;
/// An engine failed at runtime (quadrature non-convergence, I/O mid-write).
pub const EXIT_RUNTIME_ERROR: u8 = 3;

/// Simulations default to the repetition count the probabilities were
/// validated at.
pub const DEFAULT_REPS: u64 = 10_000;
/// Fixed default seed, so unseeded runs are reproducible.
pub const DEFAULT_SEED: u64 = 6;

/// The five reported quantities, in column order: the UE-side decode, then
/// stage-1 marginal and joint stage-2 outcome of each SuIC order.
pub const QUANTITY_NAMES: [&str; 5] = [
    "decode_ue",
    "decode_bs_1st",
    "detect_bs_2nd_joint",
    "detect_bs_1st",
    "decode_bs_2nd_joint",
];

/// Raw-dump column order: serving and nearest-interferer distances, the
/// five SINRs in linear units, then the two joint success flags as 0/1.
pub const DUMP_COLUMNS: [&str; 9] = [
    "r0",
    "rho",
    "sinr_ue",
    "sinr_bs_decode1",
    "sinr_bs_detect2",
    "sinr_bs_detect1",
    "sinr_bs_decode2",
    "decode1_then_detect2",
    "detect1_then_decode2",
];

/// Anything that can stop a subcommand, tagged with its exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("invalid sweep: {0}")]
    Spec(String),
    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),
    #[error(transparent)]
    Eval(#[from] QuadError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Spec(_) | CliError::Output(_) => EXIT_CONFIG_ERROR,
            CliError::Eval(_) => EXIT_RUNTIME_ERROR,
        }
    }
}

/// Scenario field a sweep varies. Threshold variables are in dB (`theta_db`
/// moves both thresholds together); `r1` is in multiples of the reference
/// length; `p_u` and `zeta` are linear.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepVariable {
    #[value(name = "theta_db")]
    ThetaDb,
    #[value(name = "theta_u_db")]
    ThetaUDb,
    #[value(name = "theta_b_db")]
    ThetaBDb,
    #[value(name = "r1")]
    R1,
    #[value(name = "p_u")]
    Pu,
    #[value(name = "zeta")]
    Zeta,
}

impl SweepVariable {
    /// Name of the sweep-value CSV column.
    pub fn column(self) -> &'static str {
        match self {
            SweepVariable::ThetaDb => "theta_db",
            SweepVariable::ThetaUDb => "theta_u_db",
            SweepVariable::ThetaBDb => "theta_b_db",
            SweepVariable::R1 => "r1",
            SweepVariable::Pu => "p_u",
            SweepVariable::Zeta => "zeta",
        }
    }

    /// Returns `template` with this variable set to `x` (in boundary units).
    pub fn apply(self, template: &Scenario, x: f64) -> Scenario {
        let mut sc = *template;
        match self {
            SweepVariable::ThetaDb => {
                sc.theta_b = db_to_linear(x);
                sc.theta_u = db_to_linear(x);
            }
            SweepVariable::ThetaUDb => sc.theta_u = db_to_linear(x),
            SweepVariable::ThetaBDb => sc.theta_b = db_to_linear(x),
            SweepVariable::R1 => sc.r1 = x * template.params.v(),
            SweepVariable::Pu => sc.params.p_u = x,
            SweepVariable::Zeta => sc.params.zeta = x,
        }
        sc
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Spacing {
    Linear,
    Log,
}

/// Which engine(s) fill the value columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineChoice {
    Analysis,
    Sim,
    Both,
}

impl EngineChoice {
    fn analysis(self) -> bool {
        matches!(self, EngineChoice::Analysis | EngineChoice::Both)
    }

    fn sim(self) -> bool {
        matches!(self, EngineChoice::Sim | EngineChoice::Both)
    }
}

/// Which SuIC order(s) fill the BS-side columns; the UE-side decode is
/// order-independent and always reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderChoice {
    DecodeFirst,
    DetectFirst,
    Both,
}

impl OrderChoice {
    /// Inclusion mask over [`QUANTITY_NAMES`].
    fn mask(self) -> [bool; 5] {
        let df = matches!(self, OrderChoice::DecodeFirst | OrderChoice::Both);
        let dt = matches!(self, OrderChoice::DetectFirst | OrderChoice::Both);
        [true, df, df, dt, dt]
    }
}

/// A validated sweep request: variable, grid, and engine/order selection.
#[derive(Debug, Clone, Copy)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub spacing: Spacing,
    pub engine: EngineChoice,
    pub order: OrderChoice,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        let fail = |msg: &str| Err(CliError::Spec(msg.into()));
        if !self.start.is_finite() || !self.stop.is_finite() {
            return fail("range endpoints must be finite");
        }
        if self.start >= self.stop {
            return fail("range start must be below its stop");
        }
        if self.points < 2 {
            return fail("a sweep needs at least 2 points");
        }
        if self.spacing == Spacing::Log && self.start <= 0.0 {
            return fail("log spacing requires positive endpoints");
        }
        Ok(())
    }

    /// The sweep grid, endpoints exact.
    pub fn grid(&self) -> Vec<f64> {
        grid_points(self.start, self.stop, self.points, self.spacing)
    }
}

/// `points` values from `start` to `stop` inclusive, linearly or
/// geometrically spaced.
pub fn grid_points(start: f64, stop: f64, points: usize, spacing: Spacing) -> Vec<f64> {
    assert!(points >= 2);
    (0..points)
        .map(|i| {
            if i == 0 {
                return start;
            }
            if i == points - 1 {
                return stop;
            }
            let t = i as f64 / (points - 1) as f64;
            match spacing {
                Spacing::Linear => start + t * (stop - start),
                Spacing::Log => (start.ln() * (1.0 - t) + stop.ln() * t).exp(),
            }
        })
        .collect()
}

/// One evaluated sweep point; a side is `None` when its engine is disabled.
#[derive(Debug, Clone, Copy)]
pub struct SweepRow {
    pub x: f64,
    pub analytic: Option<QuantitySet>,
    pub mc: Option<McReport>,
}

/// A computed sweep, ready to render.
#[derive(Debug, Clone)]
pub struct SweepTable {
    pub variable: SweepVariable,
    pub order: OrderChoice,
    pub rows: Vec<SweepRow>,
}

/// Evaluates a sweep with the selected engines.
///
/// The analytic engine is built once (the swept variables never change
/// `lambda` or `eta`) and the points run on the worker pool; the simulator
/// draws a single ensemble of `reps` network realizations and re-thresholds
/// it at every point.
pub fn compute_sweep(
    template: &Scenario,
    spec: &SweepSpec,
    reps: u64,
    seed: u64,
) -> Result<SweepTable, CliError> {
    spec.validate()?;
    let grid = spec.grid();
    let scenarios: Vec<Scenario> = grid.iter().map(|&x| spec.variable.apply(template, x)).collect();
    for sc in &scenarios {
        sc.validate().map_err(|e| CliError::Spec(e.to_string()))?;
    }

    let analytic: Vec<Option<QuantitySet>> = if spec.engine.analysis() {
        let engine = AnalysisEngine::new(&template.params)?;
        scenarios
            .par_iter()
            .map(|sc| engine.quantities(sc).map(Some))
            .collect::<Result<_, _>>()?
    } else {
        vec![None; grid.len()]
    };

    let mc: Vec<Option<McReport>> = if spec.engine.sim() {
        let ens = netsim::collect_stats(
            &template.params,
            &SimWindow::for_density(template.params.lambda),
            reps,
            seed,
        );
        scenarios
            .iter()
            .map(|sc| Some(netsim::estimate_from_stats(&ens, sc)))
            .collect()
    } else {
        vec![None; grid.len()]
    };

    let rows = grid
        .iter()
        .zip(analytic)
        .zip(mc)
        .map(|((&x, analytic), mc)| SweepRow { x, analytic, mc })
        .collect();
    Ok(SweepTable {
        variable: spec.variable,
        order: spec.order,
        rows,
    })
}

/// Formats a value to exactly 10 significant digits, round-trippable
/// through `str::parse::<f64>` at that precision.
pub fn sig10(x: f64) -> String {
    format!("{x:.9e}")
}

fn push_cell(line: &mut String, included: bool, value: Option<f64>) {
    line.push(',');
    if included {
        if let Some(v) = value {
            line.push_str(&sig10(v));
        }
    }
}

/// Renders a sweep as CSV: the sweep value, then analytic value, MC value,
/// and MC standard error for each of [`QUANTITY_NAMES`] in order.
pub fn render_csv(table: &SweepTable) -> String {
    let mask = table.order.mask();
    let mut out = String::from(table.variable.column());
    for name in QUANTITY_NAMES {
        out.push_str(&format!(",{name}_analytic,{name}_mc,{name}_mc_stderr"));
    }
    out.push('\n');
    for row in &table.rows {
        let mut line = sig10(row.x);
        let a = row.analytic.map(|q| analytic_values(&q));
        let m = row.mc.map(|r| mc_values(&r));
        for (i, &included) in mask.iter().enumerate() {
            push_cell(&mut line, included, a.map(|v| v[i]));
            push_cell(&mut line, included, m.map(|v| v[i].value));
            push_cell(&mut line, included, m.map(|v| v[i].stderr));
        }
        line.push('\n');
        out.push_str(&line);
    }
    out
}

/// The five analytic values in [`QUANTITY_NAMES`] order.
pub fn analytic_values(q: &QuantitySet) -> [f64; 5] {
    [
        q.decode_ue.value,
        q.decode_bs_first.value,
        q.detect_bs_second_joint.value,
        q.detect_bs_first.value,
        q.decode_bs_second_joint.value,
    ]
}

/// The five Monte-Carlo estimates in [`QUANTITY_NAMES`] order.
pub fn mc_values(r: &McReport) -> [McEstimate; 5] {
    [
        r.decode_ue,
        r.decode_bs_first,
        r.detect_bs_second_joint,
        r.detect_bs_first,
        r.decode_bs_second_joint,
    ]
}

/// The threshold lattice the `verify` command sweeps:
/// -60 dB to 0 dB in 5 dB steps.
pub fn verify_grid() -> Vec<f64> {
    (0..13).map(|i| -60.0 + 5.0 * i as f64).collect()
}

/// Both engines evaluated at one verification point.
#[derive(Debug, Clone, Copy)]
pub struct VerifyRow {
    pub theta_db: f64,
    pub analytic: QuantitySet,
    pub mc: McReport,
}

/// Outcome of a verification run: per-point values, the worst gap per
/// quantity, and the verdict.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub rows: Vec<VerifyRow>,
    pub tolerance: f64,
    /// Max |analytic - MC| over the grid, per quantity.
    pub max_gap: [f64; 5],
    pub pass: bool,
}

/// Runs both engines over the verification grid (both thresholds coupled)
/// and compares them pointwise.
pub fn verify_report(
    template: &Scenario,
    reps: u64,
    seed: u64,
    tolerance: f64,
) -> Result<VerifyReport, CliError> {
    let spec = SweepSpec {
        variable: SweepVariable::ThetaDb,
        start: -60.0,
        stop: 0.0,
        points: 13,
        spacing: Spacing::Linear,
        engine: EngineChoice::Both,
        order: OrderChoice::Both,
    };
    let table = compute_sweep(template, &spec, reps, seed)?;
    let rows: Vec<VerifyRow> = table
        .rows
        .iter()
        .map(|row| VerifyRow {
            theta_db: row.x,
            analytic: row.analytic.expect("both engines requested"),
            mc: row.mc.expect("both engines requested"),
        })
        .collect();
    let mut max_gap = [0.0f64; 5];
    for row in &rows {
        let a = analytic_values(&row.analytic);
        let m = mc_values(&row.mc);
        for i in 0..5 {
            max_gap[i] = max_gap[i].max((a[i] - m[i].value).abs());
        }
    }
    let pass = max_gap.iter().all(|&g| g <= tolerance);
    Ok(VerifyReport {
        rows,
        tolerance,
        max_gap,
        pass,
    })
}

impl VerifyReport {
    /// Human-readable summary: one line per quantity, then per-point
    /// diagnostics for every breach, then the verdict.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, name) in QUANTITY_NAMES.iter().enumerate() {
            out.push_str(&format!(
                "{name:<20} max |analytic - mc| = {}\n",
                sig10(self.max_gap[i])
            ));
        }
        if !self.pass {
            for row in &self.rows {
                let a = analytic_values(&row.analytic);
                let m = mc_values(&row.mc);
                for i in 0..5 {
                    let gap = (a[i] - m[i].value).abs();
                    if gap > self.tolerance {
                        out.push_str(&format!(
                            "breach at theta_db = {}: {} analytic = {}, mc = {}, gap = {}\n",
                            row.theta_db,
                            QUANTITY_NAMES[i],
                            sig10(a[i]),
                            sig10(m[i].value),
                            sig10(gap)
                        ));
                    }
                }
            }
        }
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        out.push_str(&format!("verify: {verdict} (tolerance {})\n", self.tolerance));
        out
    }
}

/// Variable a crossover search varies, in boundary units (`r1` in
/// multiples of the reference length, `p_u` linear).
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CrossoverArg {
    #[value(name = "r1")]
    R1,
    #[value(name = "p_u")]
    Pu,
}

/// Searches `[start, stop]` for the SuIC-order crossover of `template`.
/// Returns the root in the same units as the inputs.
pub fn run_crossover(
    template: &Scenario,
    var: CrossoverArg,
    start: f64,
    stop: f64,
    points: usize,
) -> Result<Option<f64>, CliError> {
    if !(start > 0.0) || !(stop > start) || points < 2 {
        return Err(CliError::Spec(
            "crossover range must satisfy 0 < start < stop with at least 2 points".into(),
        ));
    }
    let scale = match var {
        CrossoverArg::R1 => template.params.v(),
        CrossoverArg::Pu => 1.0,
    };
    let inner = match var {
        CrossoverArg::R1 => CrossoverVariable::R1,
        CrossoverArg::Pu => CrossoverVariable::Pu,
    };
    let grid: Vec<f64> = grid_points(start, stop, points, Spacing::Linear)
        .iter()
        .map(|x| x * scale)
        .collect();
    let engine = AnalysisEngine::new(&template.params)?;
    Ok(engine.find_crossover(template, inner, &grid)?.map(|r| r / scale))
}

/// Writes one raw-sample row per realization in [`DUMP_COLUMNS`] order and
/// returns the aggregate frequency report of the same ensemble.
pub fn dump_samples(
    sc: &Scenario,
    reps: u64,
    seed: u64,
    out: &mut dyn Write,
) -> Result<McReport, CliError> {
    let ens = netsim::collect_stats(
        &sc.params,
        &SimWindow::for_density(sc.params.lambda),
        reps,
        seed,
    );
    writeln!(out, "{}", DUMP_COLUMNS.join(","))?;
    for st in &ens.stats {
        let s = netsim::sinrs_from_stats(st, sc);
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            sig10(st.r0),
            sig10(st.rho),
            sig10(s.sinr_ue),
            sig10(s.sinr_bs_decode1),
            sig10(s.sinr_bs_detect2),
            sig10(s.sinr_bs_detect1),
            sig10(s.sinr_bs_decode2),
            s.decode1_then_detect2 as u8,
            s.detect1_then_decode2 as u8,
        )?;
    }
    Ok(netsim::estimate_from_stats(&ens, sc))
}

#[derive(Debug, Parser)]
#[command(
    name = "fdisac",
    version,
    about = "Decoding and detection probabilities in a full-duplex ISAC cellular network",
    long_about = "Evaluates decoding and detection probabilities of a full-duplex \
ISAC cellular network with an analytical engine and a Monte-Carlo network \
simulator. Thresholds are given in dB and target distances in multiples of \
the reference length v = 1/(60 sqrt(lambda)). RAYON_NUM_THREADS overrides \
the worker count; results are bit-identical at any setting."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep one scenario variable and write per-point probabilities as CSV.
    Sweep {
        /// Scenario configuration file (defaults to the reference scenario).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Variable to sweep; thresholds in dB, r1 in multiples of v.
        #[arg(long, value_enum)]
        variable: SweepVariable,
        /// First grid value.
        #[arg(long, allow_negative_numbers = true)]
        start: f64,
        /// Last grid value.
        #[arg(long, allow_negative_numbers = true)]
        stop: f64,
        /// Grid size including both endpoints.
        #[arg(long, default_value_t = 13)]
        points: usize,
        /// Grid spacing; log requires positive endpoints.
        #[arg(long, value_enum, default_value_t = Spacing::Linear)]
        spacing: Spacing,
        /// Engine(s) to run; disabled engines leave their columns blank.
        #[arg(long, value_enum, default_value_t = EngineChoice::Both)]
        engine: EngineChoice,
        /// SuIC order(s) to report; the excluded order's columns stay blank.
        #[arg(long, value_enum, default_value_t = OrderChoice::Both)]
        order: OrderChoice,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Monte-Carlo repetitions.
        #[arg(long, default_value_t = DEFAULT_REPS)]
        reps: u64,
        /// Monte-Carlo seed.
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Run both engines over the reference threshold grid and compare.
    Verify {
        /// Scenario configuration file (defaults to the reference scenario).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Largest acceptable |analytic - mc| per quantity.
        #[arg(long, default_value_t = 0.03)]
        tolerance: f64,
        /// Monte-Carlo repetitions.
        #[arg(long, default_value_t = DEFAULT_REPS)]
        reps: u64,
        /// Monte-Carlo seed.
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Locate the SuIC-order crossover along r1 or p_u.
    Crossover {
        /// Scenario configuration file (defaults to the reference scenario).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Variable to search; r1 in multiples of v, p_u linear.
        #[arg(long, value_enum)]
        variable: CrossoverArg,
        /// Search range start (must be positive).
        #[arg(long, allow_negative_numbers = true)]
        start: f64,
        /// Search range stop.
        #[arg(long, allow_negative_numbers = true)]
        stop: f64,
        /// Scan grid size used to bracket the sign change.
        #[arg(long, default_value_t = 23)]
        points: usize,
    },
    /// Simulate and dump one raw-sample row per network realization.
    Simulate {
        /// Scenario configuration file (defaults to the reference scenario).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output path for the raw-sample table.
        #[arg(long)]
        out: PathBuf,
        /// Monte-Carlo repetitions.
        #[arg(long, default_value_t = DEFAULT_REPS)]
        reps: u64,
        /// Monte-Carlo seed.
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

fn scenario_from(config: &Option<PathBuf>) -> Result<Scenario, CliError> {
    match config {
        Some(path) => Ok(load_config(path)?),
        None => Ok(Scenario::default()),
    }
}

fn dispatch(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Sweep {
            config,
            variable,
            start,
            stop,
            points,
            spacing,
            engine,
            order,
            out,
            reps,
            seed,
        } => {
            let sc = scenario_from(&config)?;
            let spec = SweepSpec {
                variable,
                start,
                stop,
                points,
                spacing,
                engine,
                order,
            };
            spec.validate()?;
            let mut file = BufWriter::new(File::create(&out)?);
            let table = compute_sweep(&sc, &spec, reps, seed)?;
            file.write_all(render_csv(&table).as_bytes())?;
            file.flush()?;
            println!(
                "sweep: wrote {} rows over {} to {}",
                table.rows.len(),
                variable.column(),
                out.display()
            );
            Ok(0)
        }
        Command::Verify {
            config,
            tolerance,
            reps,
            seed,
        } => {
            let sc = scenario_from(&config)?;
            let report = verify_report(&sc, reps, seed, tolerance)?;
            print!("{}", report.render());
            Ok(if report.pass { 0 } else { EXIT_VERIFY_FAILURE })
        }
        Command::Crossover {
            config,
            variable,
            start,
            stop,
            points,
        } => {
            let sc = scenario_from(&config)?;
            match run_crossover(&sc, variable, start, stop, points)? {
                Some(root) => {
                    let unit = match variable {
                        CrossoverArg::R1 => " v",
                        CrossoverArg::Pu => "",
                    };
                    let name = match variable {
                        CrossoverArg::R1 => "r1",
                        CrossoverArg::Pu => "p_u",
                    };
                    println!("crossover: {name} = {}{unit}", sig10(root));
                }
                None => println!("crossover: none"),
            }
            Ok(0)
        }
        Command::Simulate {
            config,
            out,
            reps,
            seed,
        } => {
            let sc = scenario_from(&config)?;
            let mut file = BufWriter::new(File::create(&out)?);
            let report = dump_samples(&sc, reps, seed, &mut file)?;
            file.flush()?;
            println!(
                "simulate: wrote {reps} rows to {}; frequencies: decode_ue = {}, \
                 decode_bs_1st = {}, detect_bs_2nd_joint = {}, detect_bs_1st = {}, \
                 decode_bs_2nd_joint = {}",
                out.display(),
                sig10(report.decode_ue.value),
                sig10(report.decode_bs_first.value),
                sig10(report.detect_bs_second_joint.value),
                sig10(report.detect_bs_first.value),
                sig10(report.decode_bs_second_joint.value),
            );
            Ok(0)
        }
    }
}

/// Runs a parsed command line to completion and maps the outcome to an
/// exit code.
pub fn run(cli: Cli) -> ExitCode {
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ProbabilityEstimate;

    #[test]
    fn verify_grid_is_the_thirteen_point_five_db_lattice() {
        let g = verify_grid();
        assert_eq!(g.len(), 13);
        assert_eq!(g[0], -60.0);
        assert_eq!(g[12], 0.0);
        assert!(g.windows(2).all(|w| w[1] - w[0] == 5.0));
    }

    #[test]
    fn grids_hit_their_endpoints_exactly() {
        let lin = grid_points(-60.0, 0.0, 7, Spacing::Linear);
        assert_eq!((lin[0], lin[6]), (-60.0, 0.0));
        let log = grid_points(1e-12, 1e-3, 10, Spacing::Log);
        assert_eq!((log[0], log[9]), (1e-12, 1e-3));
        let ratios: Vec<f64> = log.windows(2).map(|w| w[1] / w[0]).collect();
        for r in &ratios {
            assert!((r / ratios[0] - 1.0).abs() < 1e-9, "log grid must be geometric");
        }
    }

    fn spec(start: f64, stop: f64, points: usize, spacing: Spacing) -> SweepSpec {
        SweepSpec {
            variable: SweepVariable::Zeta,
            start,
            stop,
            points,
            spacing,
            engine: EngineChoice::Analysis,
            order: OrderChoice::Both,
        }
    }

    #[test]
    fn degenerate_sweep_specs_are_rejected() {
        assert!(spec(1.0, 1.0, 5, Spacing::Linear).validate().is_err());
        assert!(spec(2.0, 1.0, 5, Spacing::Linear).validate().is_err());
        assert!(spec(0.0, 1.0, 1, Spacing::Linear).validate().is_err());
        assert!(spec(0.0, 1.0, 5, Spacing::Log).validate().is_err());
        assert!(spec(1e-12, 1e-3, 5, Spacing::Log).validate().is_ok());
    }

    #[test]
    fn coupled_threshold_sweep_moves_both_thresholds() {
        let sc = Scenario::default();
        let moved = SweepVariable::ThetaDb.apply(&sc, -30.0);
        assert_eq!(moved.theta_b, db_to_linear(-30.0));
        assert_eq!(moved.theta_u, db_to_linear(-30.0));
        let only_u = SweepVariable::ThetaUDb.apply(&sc, -10.0);
        assert_eq!(only_u.theta_b, sc.theta_b);
        assert_eq!(only_u.theta_u, db_to_linear(-10.0));
        let only_b = SweepVariable::ThetaBDb.apply(&sc, -10.0);
        assert_eq!(only_b.theta_u, sc.theta_u);
        assert_eq!(only_b.theta_b, db_to_linear(-10.0));
    }

    #[test]
    fn distance_sweep_is_in_reference_length_units() {
        let sc = Scenario::default();
        let moved = SweepVariable::R1.apply(&sc, 7.0);
        assert_eq!(moved.r1, 7.0 * sc.params.v());
    }

    #[test]
    fn sig10_round_trips_to_the_printed_precision() {
        for &x in &[0.0, 1.0, -0.25, 0.987654321012345, 1.3e-12, 2.7e8, 5e-324] {
            let printed = sig10(x);
            let back: f64 = printed.parse().unwrap();
            assert_eq!(sig10(back), printed, "second print must not drift for {x}");
            if x != 0.0 {
                assert!(((back - x) / x).abs() < 1e-9, "{x} -> {printed} -> {back}");
            }
        }
    }

    fn fake_quantities(base: f64) -> QuantitySet {
        let q = |v: f64| ProbabilityEstimate {
            value: v,
            error: 1e-9,
        };
        QuantitySet {
            decode_ue: q(base),
            decode_bs_first: q(base / 2.0),
            detect_bs_second_joint: q(base / 3.0),
            detect_bs_first: q(base / 4.0),
            decode_bs_second_joint: q(base / 5.0),
        }
    }

    #[test]
    fn csv_header_names_the_five_quantities_in_contract_order() {
        let table = SweepTable {
            variable: SweepVariable::ThetaDb,
            order: OrderChoice::Both,
            rows: vec![SweepRow {
                x: -30.0,
                analytic: Some(fake_quantities(0.9)),
                mc: None,
            }],
        };
        let csv = render_csv(&table);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "theta_db,decode_ue_analytic,decode_ue_mc,decode_ue_mc_stderr,\
             decode_bs_1st_analytic,decode_bs_1st_mc,decode_bs_1st_mc_stderr,\
             detect_bs_2nd_joint_analytic,detect_bs_2nd_joint_mc,detect_bs_2nd_joint_mc_stderr,\
             detect_bs_1st_analytic,detect_bs_1st_mc,detect_bs_1st_mc_stderr,\
             decode_bs_2nd_joint_analytic,decode_bs_2nd_joint_mc,decode_bs_2nd_joint_mc_stderr"
        );
        let row = lines.next().unwrap();
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells.len(), 16);
        assert_eq!(cells[1].parse::<f64>().unwrap(), 0.9);
        // Disabled simulator leaves the mc and stderr cells blank.
        assert_eq!(cells[2], "");
        assert_eq!(cells[3], "");
        assert_eq!(cells[4].parse::<f64>().unwrap(), 0.45);
    }

    #[test]
    fn order_restriction_blanks_the_other_orders_columns() {
        let table = SweepTable {
            variable: SweepVariable::R1,
            order: OrderChoice::DetectFirst,
            rows: vec![SweepRow {
                x: 5.0,
                analytic: Some(fake_quantities(0.8)),
                mc: None,
            }],
        };
        let csv = render_csv(&table);
        let row = csv.lines().nth(1).unwrap();
        let cells: Vec<&str> = row.split(',').collect();
        // decode_ue stays, decode-first columns (1..=6) blank out, and the
        // detect-first group (10..=12 analytic cell) survives.
        assert!(!cells[1].is_empty());
        assert!(cells[4].is_empty() && cells[7].is_empty());
        assert_eq!(cells[10].parse::<f64>().unwrap(), 0.2);
        assert_eq!(cells[13].parse::<f64>().unwrap(), 0.16);
    }

    #[test]
    fn config_class_errors_share_the_config_exit_code() {
        let spec_err = CliError::Spec("start above stop".into());
        assert_eq!(spec_err.exit_code(), EXIT_CONFIG_ERROR);
        let cfg_err = CliError::Config(crate::params::parse_config("nonsense = 1").unwrap_err());
        assert_eq!(cfg_err.exit_code(), EXIT_CONFIG_ERROR);
        let io_err = CliError::Output(std::io::Error::other("disk gone"));
        assert_eq!(io_err.exit_code(), EXIT_CONFIG_ERROR);
    }

    #[test]
    fn analytic_sweep_reports_probabilities_at_every_point() {
        let spec = SweepSpec {
            variable: SweepVariable::ThetaDb,
            start: -40.0,
            stop: -20.0,
            points: 3,
            spacing: Spacing::Linear,
            engine: EngineChoice::Analysis,
            order: OrderChoice::Both,
        };
        let table = compute_sweep(&Scenario::default(), &spec, 10, 1).unwrap();
        assert_eq!(table.rows.len(), 3);
        for row in &table.rows {
            let q = row.analytic.expect("analysis enabled");
            assert!(row.mc.is_none());
            for v in analytic_values(&q) {
                assert!((0.0..=1.0).contains(&v));
            }
        }
    }
}
