//! Outage probability: closed-form lower bounds, Monte Carlo estimators of the
//! true protocols, and a Monte Carlo simulation of the min-SNR surrogate system
//! for which the lower bounds are exact.
//!
//! A protocol is in outage when either flow's mutual information is strictly
//! below `R/2`. All estimators partition trials by realization index, so their
//! output is independent of the number of worker threads.

use rayon::prelude::*;

use crate::channel::{ChannelRealization, ChannelSampler, FadingProfile};
use crate::error::{invalid, Result};
use crate::optimize::{anc_optimal_allocation, tdbc_optimal_xi};
use crate::protocols::{
    anc_snr, mutual_information, tdbc_snr, CombiningWeight, PowerAllocation, Protocol, SnrMode,
    SnrPair,
};

/// Below this `|3 Og (Oh + Of) - Oh Of| / (Oh Of)` the TDBC bound is evaluated
/// at its removable singularity.
pub const TDBC_SINGULARITY_TOLERANCE: f64 = 1e-9;

/// Realizations per parallel work item.
const CHUNK: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageQuery {
    rate_r: f64,
    profile: FadingProfile,
}

impl OutageQuery {
    /// `rate_r` is the network rate; each flow targets `rate_r / 2`.
    pub fn new(rate_r: f64, profile: FadingProfile) -> Result<Self> {
        if !(rate_r.is_finite() && rate_r >= 0.0) {
            return Err(invalid(format!("rate must be nonnegative, got {rate_r}")));
        }
        Ok(Self { rate_r, profile })
    }

    pub fn rate(&self) -> f64 {
        self.rate_r
    }

    pub fn profile(&self) -> &FadingProfile {
        &self.profile
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEstimate {
    pub probability: f64,
    pub trials: u64,
    /// Standard error of `probability`. Binomial for indicator estimators,
    /// the sample standard error for the conditional estimator.
    pub stderr: f64,
}

impl OutageEstimate {
    fn from_count(outages: u64, trials: u64) -> Self {
        let p = outages as f64 / trials as f64;
        Self {
            probability: p,
            trials,
            stderr: (p * (1.0 - p) / trials as f64).sqrt(),
        }
    }
}

/// `1 - exp(-2 (Oh + Of) (2^R - 1) / (E Oh Of))`.
pub fn anc_outage_lower_bound(query: &OutageQuery) -> f64 {
    let p = &query.profile;
    let t = Protocol::Anc.snr_threshold(query.rate_r);
    let rate = 2.0 * (p.omega_h() + p.omega_f()) / (p.energy() * p.omega_h() * p.omega_f());
    -(-rate * t).exp_m1()
}

/// TDBC lower bound at `xi = 1/2`.
///
/// With a direct link this is the distribution function of `Z + min(X, Y)/3`
/// at `(2^{1.5R} - 1)/E`, a sum of exponentials with rates `1/Og` and
/// `3 (Oh + Of) / (Oh Of)`. Without one it reduces to the relayed term alone.
pub fn tdbc_outage_lower_bound(query: &OutageQuery) -> f64 {
    let p = &query.profile;
    let t = Protocol::Tdbc.snr_threshold(query.rate_r) / p.energy();
    let (oh, of) = (p.omega_h(), p.omega_f());
    let relay_rate = 3.0 * (oh + of) / (oh * of);
    if !p.has_direct_link() {
        return -(-relay_rate * t).exp_m1();
    }
    let direct_rate = 1.0 / p.omega_g();
    let lo = direct_rate.min(relay_rate);
    let delta = (direct_rate - relay_rate).abs();
    let denominator = 3.0 * p.omega_g() * (oh + of) - oh * of;
    // (1 - e^{-delta t}) / delta, whose limit at the singularity is t.
    let spread = if denominator.abs() < TDBC_SINGULARITY_TOLERANCE * oh * of || delta == 0.0 {
        t
    } else {
        -(-delta * t).exp_m1() / delta
    };
    let prob = -(-lo * t).exp_m1() - lo * (-lo * t).exp() * spread;
    prob.clamp(0.0, 1.0)
}

/// Closed-form lower bound of `protocol` (TDBC at `xi = 1/2`).
pub fn outage_lower_bound(protocol: Protocol, query: &OutageQuery) -> f64 {
    match protocol {
        Protocol::Anc => anc_outage_lower_bound(query),
        Protocol::Tdbc => tdbc_outage_lower_bound(query),
    }
}

/// How transmit powers and the relay combining weight are chosen on each
/// realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Strategy {
    /// ANC, every terminal at `E`.
    AncEqual,
    AncFixed(PowerAllocation),
    /// ANC with the closed-form optimal allocation for each realization.
    AncOptimal,
    /// TDBC at equal power with a fixed combining weight.
    TdbcFixed(CombiningWeight),
    /// TDBC at equal power with the closed-form optimal weight per realization.
    TdbcOptimalXi,
}

impl Strategy {
    pub fn protocol(&self) -> Protocol {
        match self {
            Strategy::AncEqual | Strategy::AncFixed(_) | Strategy::AncOptimal => Protocol::Anc,
            Strategy::TdbcFixed(_) | Strategy::TdbcOptimalXi => Protocol::Tdbc,
        }
    }

    /// SNRs on one realization. Realizations on which the adaptive rules are
    /// undefined (a dead relay link) carry zero SNR.
    pub fn snr(&self, r: &ChannelRealization, profile: &FadingProfile, mode: SnrMode) -> SnrPair {
        const DEAD: SnrPair = SnrPair {
            gamma1: 0.0,
            gamma2: 0.0,
        };
        match *self {
            Strategy::AncEqual => anc_snr(r, &PowerAllocation::equal(profile), mode),
            Strategy::AncFixed(a) => anc_snr(r, &a, mode),
            Strategy::AncOptimal => match anc_optimal_allocation(r.mag_h(), r.mag_f(), profile) {
                Ok(a) => anc_snr(r, &a, mode),
                Err(_) => DEAD,
            },
            Strategy::TdbcFixed(w) => tdbc_snr(r, profile, w, mode),
            Strategy::TdbcOptimalXi => match tdbc_optimal_xi(r.mag_h(), r.mag_f()) {
                Ok(w) => tdbc_snr(r, profile, w, mode),
                Err(_) => DEAD,
            },
        }
    }
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        Err(invalid("trials must be at least 1"))
    } else {
        Ok(())
    }
}

fn chunks(trials: u64) -> Vec<(u64, u64)> {
    (0..trials.div_ceil(CHUNK))
        .map(|k| (k * CHUNK, ((k + 1) * CHUNK).min(trials)))
        .collect()
}

/// Number of realizations in `0..trials` satisfying `event`.
fn count_events<F>(sampler: &ChannelSampler, trials: u64, event: F) -> u64
where
    F: Fn(&ChannelRealization) -> bool + Sync,
{
    chunks(trials)
        .into_par_iter()
        .map(|(start, end)| sampler.range(start..end).filter(|r| event(r)).count() as u64)
        .sum()
}

/// Sample mean and standard error of `value` over realizations `0..trials`.
fn mean_of<F>(sampler: &ChannelSampler, trials: u64, value: F) -> (f64, f64)
where
    F: Fn(&ChannelRealization) -> f64 + Sync,
{
    // Partial sums are combined in chunk order, so the float result is
    // reproducible regardless of scheduling.
    let partial: Vec<(f64, f64)> = chunks(trials)
        .into_par_iter()
        .map(|(start, end)| {
            sampler.range(start..end).fold((0.0, 0.0), |(s, s2), r| {
                let v = value(&r);
                (s + v, s2 + v * v)
            })
        })
        .collect();
    let (sum, sum_sq) = partial
        .iter()
        .fold((0.0, 0.0), |(a, b), &(s, s2)| (a + s, b + s2));
    let n = trials as f64;
    let mean = sum / n;
    let var = if trials > 1 {
        ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    (mean, (var / n).sqrt())
}

fn in_outage(snr: &SnrPair, protocol: Protocol, rate_r: f64) -> bool {
    mutual_information(snr, protocol).min() < 0.5 * rate_r
}

/// Fraction of realizations in outage under `strategy`.
pub fn monte_carlo_outage(
    query: &OutageQuery,
    strategy: Strategy,
    mode: SnrMode,
    trials: u64,
    seed: u64,
) -> Result<OutageEstimate> {
    check_trials(trials)?;
    let sampler = ChannelSampler::new(&query.profile, seed);
    let protocol = strategy.protocol();
    let profile = query.profile;
    let rate = query.rate_r;
    let outages = count_events(&sampler, trials, |r| {
        in_outage(&strategy.snr(r, &profile, mode), protocol, rate)
    });
    Ok(OutageEstimate::from_count(outages, trials))
}

/// Conditional Monte Carlo outage of the true protocol in approximate-SNR mode.
///
/// For ANC at a fixed allocation, both SNRs increase with `|f|^2`, so outage
/// given `|h|^2` is an exponential tail in `|f|^2`. For TDBC at equal power
/// both SNRs are `E|g|^2` plus a relayed term, so outage given the relay gains
/// is an exponential distribution function in `|g|^2`. Averaging these
/// conditional probabilities over the remaining gains estimates the same
/// quantity as [`monte_carlo_outage`] with far smaller variance at high SNR.
///
/// Adaptive strategies are not supported.
pub fn conditional_outage(
    query: &OutageQuery,
    strategy: Strategy,
    trials: u64,
    seed: u64,
) -> Result<OutageEstimate> {
    check_trials(trials)?;
    let profile = query.profile;
    let sampler = ChannelSampler::new(&profile, seed);
    let t = strategy.protocol().snr_threshold(query.rate_r);
    let (mean, stderr) = match strategy {
        Strategy::AncEqual | Strategy::AncFixed(_) => {
            let a = match strategy {
                Strategy::AncFixed(a) => a,
                _ => PowerAllocation::equal(&profile),
            };
            let omega_f = profile.omega_f();
            mean_of(&sampler, trials, |r| {
                anc_outage_given_h(r.gain_h2, &a, t, omega_f)
            })
        }
        Strategy::TdbcFixed(w) => {
            let e = profile.energy();
            let omega_g = profile.omega_g();
            mean_of(&sampler, trials, |r| {
                let relay_only = ChannelRealization {
                    gain_g2: 0.0,
                    ..*r
                };
                let weakest = tdbc_snr(&relay_only, &profile, w, SnrMode::Approximate).min();
                let shortfall = (t - weakest).max(0.0) / e;
                if omega_g > 0.0 {
                    -(-shortfall / omega_g).exp_m1()
                } else if shortfall > 0.0 {
                    1.0
                } else {
                    0.0
                }
            })
        }
        Strategy::AncOptimal | Strategy::TdbcOptimalXi => {
            return Err(invalid(
                "conditional outage requires a fixed allocation or combining weight",
            ))
        }
    };
    Ok(OutageEstimate {
        probability: mean,
        trials,
        stderr,
    })
}

/// `P(gamma1 < t or gamma2 < t | |h|^2 = x)` for ANC in approximate mode.
fn anc_outage_given_h(x: f64, a: &PowerAllocation, t: f64, omega_f: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let PowerAllocation { e1, e2, er } = *a;
    // gamma1 >= t  <=>  y (er e2 x - t e2) >= t (er + e1) x
    let slope1 = e2 * (er * x - t);
    // gamma2 >= t  <=>  y (er e1 x - t (er + e2)) >= t e1 x
    let slope2 = er * e1 * x - t * (er + e2);
    if slope1 <= 0.0 || slope2 <= 0.0 {
        return 1.0;
    }
    let y_min = (t * (er + e1) * x / slope1).max(t * e1 * x / slope2);
    -(-y_min / omega_f).exp_m1()
}

/// Monte Carlo outage of the surrogate system whose SNRs replace each relayed
/// harmonic-mean term by the corresponding minimum:
/// ANC `(E/2) min(2X, Y)` and `(E/2) min(2Y, X)`;
/// TDBC `EZ + (E/3) min(3Y, X)` and `EZ + (E/3) min(3X, Y)`.
/// The closed-form lower bounds are the exact outage probabilities of this
/// system.
pub fn bounded_system_outage_oracle(
    protocol: Protocol,
    query: &OutageQuery,
    trials: u64,
    seed: u64,
) -> Result<OutageEstimate> {
    check_trials(trials)?;
    let sampler = ChannelSampler::new(&query.profile, seed);
    let e = query.profile.energy();
    let rate = query.rate_r;
    let outages = count_events(&sampler, trials, |r| {
        let (x, y, z) = (r.gain_h2, r.gain_f2, r.gain_g2);
        let snr = match protocol {
            Protocol::Anc => SnrPair {
                gamma1: 0.5 * e * (2.0 * x).min(y),
                gamma2: 0.5 * e * (2.0 * y).min(x),
            },
            Protocol::Tdbc => SnrPair {
                gamma1: e * z + e / 3.0 * (3.0 * y).min(x),
                gamma2: e * z + e / 3.0 * (3.0 * x).min(y),
            },
        };
        in_outage(&snr, protocol, rate)
    });
    Ok(OutageEstimate::from_count(outages, trials))
}
