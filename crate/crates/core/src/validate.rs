//! Brute-force oracles for the closed forms, and the battery of checks run by
//! the `validate` subcommand.
//!
//! The oracles only evaluate SNRs, mutual information and outage bounds; none
//! of them goes through the closed-form optimizers or tradeoff curves they
//! are compared against.

use crate::channel::{ChannelRealization, ChannelSampler, FadingProfile};
use crate::dmt::{
    anchor_residuals, crossing_point_approx, crossing_point_exact, dmt_anc, dmt_tdbc, TaylorVariant,
};
use crate::error::{invalid, Result};
use crate::optimize::{
    anc_equalization_check, anc_optimal_allocation, tdbc_optimal_xi, total_mi_stationarity_check, Optimum,
};
use crate::outage::{
    bounded_system_outage_oracle, monte_carlo_outage, outage_lower_bound, OutageQuery, Strategy,
};
use crate::protocols::{
    anc_snr, mutual_information, tdbc_snr, CombiningWeight, PowerAllocation, Protocol, SnrMode,
};

/// Best points of an exhaustive `(alpha, beta)` simplex grid for ANC.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexGridResult {
    pub density: usize,
    pub best_minimax: f64,
    pub worst_minimax: f64,
    pub argmax_minimax: (f64, f64),
    pub best_total_mi: f64,
    pub worst_total_mi: f64,
    pub argmax_total_mi: (f64, f64),
}

/// Scans `alpha = i/N`, `beta = j/N` for all `i + j <= N`, boundary included.
pub fn anc_simplex_grid(
    realization: &ChannelRealization,
    profile: &FadingProfile,
    density: usize,
) -> Result<SimplexGridResult> {
    if density == 0 {
        return Err(invalid("grid density must be positive"));
    }
    let n = density;
    let scale = 3.0 * profile.energy();
    let mut out = SimplexGridResult {
        density,
        best_minimax: f64::NEG_INFINITY,
        worst_minimax: f64::INFINITY,
        argmax_minimax: (0.0, 0.0),
        best_total_mi: f64::NEG_INFINITY,
        worst_total_mi: f64::INFINITY,
        argmax_total_mi: (0.0, 0.0),
    };
    for i in 0..=n {
        for j in 0..=n - i {
            let (alpha, beta) = (i as f64 / n as f64, j as f64 / n as f64);
            let a = PowerAllocation {
                e1: scale * alpha,
                e2: scale * beta,
                er: scale * (n - i - j) as f64 / n as f64,
            };
            let snr = anc_snr(realization, &a, SnrMode::Approximate);
            let mm = snr.min();
            let mi = mutual_information(&snr, Protocol::Anc).total;
            if mm > out.best_minimax {
                out.best_minimax = mm;
                out.argmax_minimax = (alpha, beta);
            }
            if mi > out.best_total_mi {
                out.best_total_mi = mi;
                out.argmax_total_mi = (alpha, beta);
            }
            out.worst_minimax = out.worst_minimax.min(mm);
            out.worst_total_mi = out.worst_total_mi.min(mi);
        }
    }
    Ok(out)
}

/// Best points of a uniform `xi` grid for TDBC at equal power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiGridResult {
    pub argmax_minimax: f64,
    pub best_minimax: f64,
    pub argmax_total_mi: f64,
    pub best_total_mi: f64,
    /// Sign changes of `gamma1 - gamma2` along the grid.
    pub sign_changes: usize,
}

pub fn tdbc_xi_grid(realization: &ChannelRealization, profile: &FadingProfile, points: usize) -> Result<XiGridResult> {
    if points < 2 {
        return Err(invalid("xi grid needs at least two points"));
    }
    let mut out = XiGridResult {
        argmax_minimax: 0.0,
        best_minimax: f64::NEG_INFINITY,
        argmax_total_mi: 0.0,
        best_total_mi: f64::NEG_INFINITY,
        sign_changes: 0,
    };
    let mut last_sign = 0.0;
    for k in 0..points {
        let xi = k as f64 / (points - 1) as f64;
        let snr = tdbc_snr(realization, profile, CombiningWeight::new(xi)?, SnrMode::Approximate);
        let mm = snr.min();
        let mi = mutual_information(&snr, Protocol::Tdbc).total;
        if mm > out.best_minimax {
            out.best_minimax = mm;
            out.argmax_minimax = xi;
        }
        if mi > out.best_total_mi {
            out.best_total_mi = mi;
            out.argmax_total_mi = xi;
        }
        let diff = snr.gamma1 - snr.gamma2;
        let sign = if diff > 0.0 { 1.0 } else if diff < 0.0 { -1.0 } else { 0.0 };
        if sign != 0.0 {
            if last_sign != 0.0 && sign != last_sign {
                out.sign_changes += 1;
            }
            last_sign = sign;
        }
    }
    Ok(out)
}

/// `-d ln P / d ln E` of the outage lower bound at rate `r log2(1+E)`, by a
/// central difference of step `log_step` in `ln E`.
pub fn fd_diversity(protocol: Protocol, r: f64, profile: &FadingProfile, log_step: f64) -> Result<f64> {
    let log_bound = |log_e: f64| -> Result<f64> {
        let e = log_e.exp();
        let p = profile.with_energy(e)?;
        let q = OutageQuery::new(r * e.ln_1p() / std::f64::consts::LN_2, p)?;
        Ok(outage_lower_bound(protocol, &q).ln())
    };
    let l = profile.energy().ln();
    Ok(-(log_bound(l + log_step)? - log_bound(l - log_step)?) / (2.0 * log_step))
}

/// Crossing of the two tradeoff curves located by a sign scan of
/// `d_ANC - d_TDBC` with spacing `step` on `(0, 2/3)`; the sign change
/// nearest `1/2` is reported as its midpoint.
pub fn crossing_grid_scan(profile: &FadingProfile, step: f64) -> Result<Option<f64>> {
    let n = (2.0 / 3.0 / step).floor() as usize;
    let gap = |r: f64| -> Result<f64> { Ok(dmt_anc(r, profile)?.div_d - dmt_tdbc(r, profile)?.div_d) };
    let mut best: Option<f64> = None;
    let mut prev = gap(step)?;
    for k in 2..n {
        let r = k as f64 * step;
        let cur = gap(r)?;
        if prev * cur <= 0.0 && prev != cur {
            let mid = r - 0.5 * step;
            if best.is_none_or(|b| (mid - 0.5).abs() < (b - 0.5).abs()) {
                best = Some(mid);
            }
        }
        prev = cur;
    }
    Ok(best)
}

/// One row of the validation table. `pass` is `value <= threshold`.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            threshold,
            pass: value <= threshold,
        }
    }
}

const VALIDATION_REALIZATIONS: u64 = 20;

/// Runs the oracle battery on the symmetric geometry (relay midway, path-loss
/// exponent 4) at `E = 10` and `R = 1`.
pub fn run_validation(trials: u64, seed: u64) -> Result<Vec<Check>> {
    let profile = FadingProfile::from_geometry(0.5, 4.0, 10.0)?;
    let query = OutageQuery::new(1.0, profile)?;
    let mut checks = Vec::new();

    for (protocol, strategy) in [
        (Protocol::Anc, Strategy::AncEqual),
        (Protocol::Tdbc, Strategy::TdbcFixed(CombiningWeight::HALF)),
    ] {
        let bound = outage_lower_bound(protocol, &query);
        let oracle = bounded_system_outage_oracle(protocol, &query, trials, seed)?;
        checks.push(Check::at_most(
            &format!("{} bounded system vs bound (stderrs)", protocol.name()),
            (oracle.probability - bound).abs() / oracle.stderr.max(f64::MIN_POSITIVE),
            3.0,
        ));
        let mc = monte_carlo_outage(&query, strategy, SnrMode::Approximate, trials, seed)?;
        checks.push(Check::at_most(
            &format!("{} bound excess over simulation (stderrs)", protocol.name()),
            (bound - mc.probability) / mc.stderr.max(f64::MIN_POSITIVE),
            3.0,
        ));
    }

    for (protocol, r_max) in [(Protocol::Anc, 1.0), (Protocol::Tdbc, 2.0 / 3.0)] {
        let mut worst: f64 = 0.0;
        for k in 1..=20 {
            let r = r_max * k as f64 / 21.0;
            let closed = match protocol {
                Protocol::Anc => dmt_anc(r, &profile)?.div_d,
                Protocol::Tdbc => dmt_tdbc(r, &profile)?.div_d,
            };
            let fd = fd_diversity(protocol, r, &profile, 1e-4)?;
            worst = worst.max((closed - fd).abs() / closed.abs());
        }
        checks.push(Check::at_most(
            &format!("{} diversity vs log-derivative (rel)", protocol.name()),
            worst,
            1e-5,
        ));
    }

    let exact = crossing_point_exact(&profile)?;
    let scanned = crossing_grid_scan(&profile, 1e-5)?.unwrap_or(f64::NAN);
    checks.push(Check::at_most("crossing vs grid scan", (exact - scanned).abs(), 1e-5));
    let mut q_max = f64::NEG_INFINITY;
    for e in [1.0, 3.0, 10.0, 30.0, 100.0, 1e3, 1e6] {
        q_max = q_max.max(crossing_point_approx(&profile.with_energy(e)?, TaylorVariant::Corrected)?);
    }
    checks.push(Check::at_most("linearized crossing max", q_max, 0.5 + 1e-9));
    let (mu_res, nu_res) = anchor_residuals(&profile, TaylorVariant::Corrected)?;
    checks.push(Check::at_most("anchor identity (rel)", mu_res.max(nu_res), 1e-9));

    let sampler = ChannelSampler::new(&profile, seed);
    let density = 100;
    let (mut anc_short, mut anc_cell, mut anc_eq, mut anc_grad) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let (mut xi_cell, mut xi_eq, mut xi_grad, mut crossings) = (0.0f64, 0.0f64, 0.0f64, 0usize);
    for realization in sampler.range(0..VALIDATION_REALIZATIONS) {
        let a = anc_optimal_allocation(realization.mag_h(), realization.mag_f(), &profile)?;
        let snr = anc_snr(&realization, &a, SnrMode::Approximate);
        let mi = mutual_information(&snr, Protocol::Anc).total;
        let grid = anc_simplex_grid(&realization, &profile, density)?;
        anc_short = anc_short
            .max((grid.best_minimax - snr.min()) / (grid.best_minimax - grid.worst_minimax))
            .max((grid.best_total_mi - mi) / (grid.best_total_mi - grid.worst_total_mi));
        anc_cell = anc_cell
            .max(grid.best_minimax / snr.min() - 1.0)
            .max(grid.best_total_mi / mi - 1.0);
        anc_eq = anc_eq.max(anc_equalization_check(&a, &realization, &profile));
        anc_grad = anc_grad.max(total_mi_stationarity_check(&Optimum::Anc(a), &realization, &profile)?);

        let w = tdbc_optimal_xi(realization.mag_h(), realization.mag_f())?;
        let xi_grid = tdbc_xi_grid(&realization, &profile, 10_001)?;
        xi_cell = xi_cell
            .max((xi_grid.argmax_minimax - w.xi()).abs())
            .max((xi_grid.argmax_total_mi - w.xi()).abs());
        let s = tdbc_snr(&realization, &profile, w, SnrMode::Approximate);
        xi_eq = xi_eq.max((s.gamma1 - s.gamma2).abs() / s.gamma1.max(s.gamma2));
        xi_grad = xi_grad.max(total_mi_stationarity_check(&Optimum::Tdbc(w), &realization, &profile)?);
        crossings = crossings.max(xi_grid.sign_changes);
    }
    checks.push(Check::at_most("ANC allocation shortfall vs simplex grid", anc_short, 2.0 / density as f64));
    checks.push(Check::at_most("ANC best grid point over closed form (rel)", anc_cell, 1e-12));
    checks.push(Check::at_most("ANC equalization gap", anc_eq, 1e-12));
    checks.push(Check::at_most("ANC total MI gradient", anc_grad, 1e-4));
    checks.push(Check::at_most("TDBC xi grid argmax distance", xi_cell, 1e-4));
    checks.push(Check::at_most("TDBC equalization gap", xi_eq, 1e-12));
    checks.push(Check::at_most("TDBC total MI gradient", xi_grad, 1e-4));
    checks.push(Check::at_most("TDBC SNR crossings in xi", crossings as f64, 1.0));
    Ok(checks)
}
