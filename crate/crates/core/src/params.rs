//! Network constants, scenario definitions, unit conventions, and validation.
//!
//! All quantities are carried in linear units internally; decibels appear only
//! at the CLI boundary. Distances are absolute lengths, with the convenience
//! multiplier `v = 1/(60 sqrt(lambda))` available so that target distances can
//! be written as multiples of a density-scaled reference length.

use std::collections::HashSet;
use std::path::Path;
use std::sync::OnceLock;

use thiserror::Error;

use crate::specfun;

/// Static constants of the cellular network model.
///
/// Base stations form a homogeneous Poisson point process of intensity
/// `lambda`; signals decay as `r^-eta`; each full-duplex node cancels its own
/// transmission down to the residual fraction `zeta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkParams {
    /// BS intensity in points per unit area (> 0).
    pub lambda: f64,
    /// Path-loss exponent (> 2, required for interference convergence).
    pub eta: f64,
    /// BS transmit power in linear units (> 0).
    pub p_b: f64,
    /// UE transmit power in linear units (> 0).
    pub p_u: f64,
    /// Residual self-interference fraction after cancellation (>= 0).
    pub zeta: f64,
    /// Noise power in linear units (>= 0).
    pub sigma2: f64,
}

impl Default for NetworkParams {
    /// The reference operating point: `lambda = 1e-5`, `eta = 4`, `p_b = 1`,
    /// `p_u = 0.2`, `zeta = 1e-12`, and the interference-limited regime
    /// `sigma2 = 0`.
    fn default() -> Self {
        NetworkParams {
            lambda: 1e-5,
            eta: 4.0,
            p_b: 1.0,
            p_u: 0.2,
            zeta: 1e-12,
            sigma2: 0.0,
        }
    }
}

impl NetworkParams {
    /// Checks every model invariant, reporting the first violation by name.
    pub fn validate(&self) -> Result<(), ParamError> {
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(ParamError::new("lambda must be positive"));
        }
        if !(self.eta > 2.0) || !self.eta.is_finite() {
            return Err(ParamError::new("eta must exceed 2"));
        }
        if !(self.p_b > 0.0) || !self.p_b.is_finite() {
            return Err(ParamError::new("p_b must be positive"));
        }
        if !(self.p_u > 0.0) || !self.p_u.is_finite() {
            return Err(ParamError::new("p_u must be positive"));
        }
        if !(self.zeta >= 0.0) || !self.zeta.is_finite() {
            return Err(ParamError::new("zeta must be non-negative"));
        }
        if !(self.sigma2 >= 0.0) || !self.sigma2.is_finite() {
            return Err(ParamError::new("sigma2 must be non-negative"));
        }
        Ok(())
    }

    /// `delta = 2/eta`, the stable exponent of the interference tail; lies in
    /// (0, 1) whenever the params validate.
    pub fn delta(&self) -> f64 {
        2.0 / self.eta
    }

    /// The density-scaled reference length `v = 1/(60 sqrt(lambda))`.
    pub fn v(&self) -> f64 {
        1.0 / (60.0 * self.lambda.sqrt())
    }
}

/// A probability with an attached accuracy measure: a quadrature error bound
/// for analytical values, a standard error for Monte-Carlo estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityEstimate {
    /// The probability, clamped to [0, 1].
    pub value: f64,
    /// One-sided accuracy measure in absolute probability units.
    pub error: f64,
}

/// A fully specified evaluation point: network constants plus the target
/// range, both SINR thresholds, and the intercell-interference toggle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub params: NetworkParams,
    /// Distance from the typical BS to its sensing target (> 0). The radar
    /// echo traverses this distance twice, attenuating as `r1^-2eta`.
    pub r1: f64,
    /// SINR threshold for radar-mode detection and for downlink decoding at
    /// the UE (linear, > 0).
    pub theta_b: f64,
    /// SINR threshold for uplink decoding at the BS (linear, > 0).
    pub theta_u: f64,
    /// When false, intercell interference is removed from both engines while
    /// RSI, noise, and intracell terms are retained.
    pub intercell: bool,
}

impl Scenario {
    pub fn validate(&self) -> Result<(), ParamError> {
        self.params.validate()?;
        if !(self.r1 > 0.0) || !self.r1.is_finite() {
            return Err(ParamError::new("r1 must be positive"));
        }
        if !(self.theta_b > 0.0) || !self.theta_b.is_finite() {
            return Err(ParamError::new("theta_b must be positive"));
        }
        if !(self.theta_u > 0.0) || !self.theta_u.is_finite() {
            return Err(ParamError::new("theta_u must be positive"));
        }
        Ok(())
    }
}

impl Default for Scenario {
    /// Default params with `r1 = 5v`, both thresholds at -40 dB, and
    /// intercell interference enabled.
    fn default() -> Self {
        let params = NetworkParams::default();
        Scenario {
            params,
            r1: 5.0 * params.v(),
            theta_b: db_to_linear(-40.0),
            theta_u: db_to_linear(-40.0),
            intercell: true,
        }
    }
}

/// Constants of the radar fading model and the typical-cell distance law.
///
/// The joint radar fading coefficient `h_jr = h1^2` (with `h1` a unit
/// exponential) is approximated by the CDF `(1 - exp(-eps_r x))^m_r` with
/// `m_r = sqrt(3/20)` and `eps_r = H(m_r)/2`; this pins the approximate mean
/// to the exact `E[h_jr] = 2`. The factor `b = 13/10` corrects the Rayleigh
/// distance law for the typical cell being smaller than the 0-cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingConstants {
    /// Shape constant `sqrt(3/20)`.
    pub m_r: f64,
    /// Rate constant `H(m_r)/2`, `H` the generalized harmonic number.
    pub eps_r: f64,
    /// Typical-cell correction factor in the serving distance density
    /// `f_R0(x) = 2 pi b lambda x exp(-pi b lambda x^2)`.
    pub b: f64,
}

impl FadingConstants {
    pub fn new() -> Self {
        let m_r = (3.0f64 / 20.0).sqrt();
        FadingConstants {
            m_r,
            eps_r: specfun::harmonic_generalized(m_r) / 2.0,
            b: 13.0 / 10.0,
        }
    }

    /// Shared instance; the harmonic-number evaluation runs once.
    pub fn get() -> &'static FadingConstants {
        static CACHE: OnceLock<FadingConstants> = OnceLock::new();
        CACHE.get_or_init(FadingConstants::new)
    }
}

impl Default for FadingConstants {
    fn default() -> Self {
        FadingConstants::new()
    }
}

/// Converts a decibel value to the linear scale: `10^(x/10)`.
pub fn db_to_linear(x_db: f64) -> f64 {
    10f64.powf(x_db / 10.0)
}

/// Converts a linear value to decibels: `10 log10(x)`.
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// A violated model constraint, named after the offending field.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{msg}")]
pub struct ParamError {
    msg: String,
}

impl ParamError {
    fn new(msg: &str) -> Self {
        ParamError { msg: msg.into() }
    }
}

/// Errors arising while reading a scenario configuration file.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: invalid value for `{key}`: {reason}")]
    BadValue {
        line: usize,
        key: String,
        reason: String,
    },
    #[error("invalid configuration: {0}")]
    Invalid(#[from] ParamError),
}

const CONFIG_KEYS: [&str; 10] = [
    "lambda",
    "eta",
    "p_b",
    "p_u",
    "zeta",
    "sigma2",
    "r1",
    "theta_b_db",
    "theta_u_db",
    "intercell",
];

/// Parses a flat key/value scenario configuration.
///
/// One `key = value` pair per line; `#` starts a comment; every key is
/// optional and falls back to the scenario defaults. The `r1` value accepts a
/// trailing `v` (as in `r1 = 5v`) meaning multiples of the reference length
/// derived from the configured `lambda`. Unknown keys are errors.
pub fn parse_config(text: &str) -> Result<Scenario, ConfigError> {
    let mut params = NetworkParams::default();
    let mut theta_b_db = -40.0f64;
    let mut theta_u_db = -40.0f64;
    let mut intercell = true;
    let mut r1_spec: Option<(f64, bool)> = None; // (value, in units of v)
    let mut seen: HashSet<String> = HashSet::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = match content.split_once('=') {
            Some((k, v)) => (k.trim(), v.trim()),
            None => {
                return Err(ConfigError::Syntax {
                    line,
                    text: content.into(),
                })
            }
        };
        if !CONFIG_KEYS.contains(&key) {
            return Err(ConfigError::UnknownKey {
                line,
                key: key.into(),
            });
        }
        if !seen.insert(key.to_string()) {
            return Err(ConfigError::DuplicateKey {
                line,
                key: key.into(),
            });
        }
        let bad = |reason: &str| ConfigError::BadValue {
            line,
            key: key.into(),
            reason: reason.into(),
        };
        let parse_f64 = |v: &str| v.parse::<f64>().map_err(|e| bad(&e.to_string()));
        match key {
            "lambda" => params.lambda = parse_f64(value)?,
            "eta" => params.eta = parse_f64(value)?,
            "p_b" => params.p_b = parse_f64(value)?,
            "p_u" => params.p_u = parse_f64(value)?,
            "zeta" => params.zeta = parse_f64(value)?,
            "sigma2" => params.sigma2 = parse_f64(value)?,
            "theta_b_db" => theta_b_db = parse_f64(value)?,
            "theta_u_db" => theta_u_db = parse_f64(value)?,
            "intercell" => {
                intercell = match value {
                    "true" => true,
                    "false" => false,
                    _ => return Err(bad("expected true or false")),
                }
            }
            "r1" => {
                // Resolved after all lines are read, since the `v` unit
                // depends on the configured lambda.
                if let Some(num) = value.strip_suffix('v') {
                    r1_spec = Some((parse_f64(num.trim())?, true));
                } else {
                    r1_spec = Some((parse_f64(value)?, false));
                }
            }
            _ => unreachable!("key membership checked above"),
        }
    }

    params.validate()?;
    let r1 = match r1_spec {
        Some((x, true)) => x * params.v(),
        Some((x, false)) => x,
        None => 5.0 * params.v(),
    };
    let scenario = Scenario {
        params,
        r1,
        theta_b: db_to_linear(theta_b_db),
        theta_u: db_to_linear(theta_u_db),
        intercell,
    };
    scenario.validate()?;
    Ok(scenario)
}

/// Reads and parses a scenario configuration file.
pub fn load_config(path: &Path) -> Result<Scenario, ConfigError> {
    parse_config(&std::fs::read_to_string(path)?)
}
