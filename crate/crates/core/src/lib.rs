//! Two-way relaying with amplify-and-forward relays: analog network coding
//! (ANC) and time division broadcasting (TDBC).
//!
//! The crate covers the instantaneous SNR models of both protocols, closed-form
//! outage lower bounds and their Monte Carlo cross-checks, finite-SNR
//! diversity-multiplexing tradeoff (DMT) curves with their crossing point, and
//! the closed-form power allocation / relay combining rules together with the
//! numerical searches that certify them.
//!
//! All quantities are linear (not dB) and rates are in bits per channel use.

pub mod channel;
pub mod dmt;
mod error;
pub mod experiment;
pub mod optimize;
pub mod outage;
pub mod protocols;
mod roots;
pub mod stream;
pub mod validate;

pub use error::{Error, Result};

/// Converts a power ratio in dB to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear power ratio to dB.
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}
