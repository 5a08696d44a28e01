//! Decoding and detection probabilities in a large full-duplex ISAC cellular
//! network, evaluated two independent ways.
//!
//! A base station in full-duplex integrated-sensing-and-communication
//! operation receives, simultaneously, the uplink message of its own user and
//! the radar echo of its own downlink waveform off a target. After
//! self-interference cancellation it must recover both by successive
//! interference cancellation, and the order — decode the uplink first or
//! detect the echo first — changes both success probabilities. This crate
//! evaluates the five relevant probabilities (decoding at the UE, each SuIC
//! stage at the BS for both orders) over a Poisson cellular network with one
//! active uplink user per cell:
//!
//! * [`analysis`] — closed-form evaluation built on Laplace transforms of
//!   the intercell interference ([`interference`]), special functions
//!   ([`specfun`]), and adaptive quadrature ([`quad`]);
//! * [`netsim`] — a Monte-Carlo network simulator sampling explicit network
//!   realizations, used to validate the analysis (and vice versa);
//! * [`cli`] — parameter sweeps, engine cross-verification, SuIC-order
//!   crossover search, and raw-sample dumps over both engines.
//!
//! Parameters and scenario plumbing live in [`params`].

pub mod analysis;
pub mod cli;
pub mod interference;
pub mod netsim;
pub mod params;
pub mod quad;
pub mod specfun;
