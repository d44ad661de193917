//! Power allocation and relay combining.
//!
//! Closed forms: for ANC the allocation `Er = 3E/2`, `E1 : E2 = |f| : |h|`
//! maximizes both `min(gamma1, gamma2)` and `I1 + I2`; for TDBC at equal
//! power the weight `xi = |h| / (|h| + |f|)` does the same. Jointly
//! optimizing TDBC powers and `xi` has no closed form and is done numerically.
//! All objectives use the approximate SNR forms.

use crate::channel::{ChannelRealization, FadingProfile};
use crate::error::{invalid, Error, Result};
use crate::protocols::{
    anc_snr, mutual_information, tdbc_snr, tdbc_snr_with_powers, CombiningWeight, PowerAllocation,
    Protocol, SnrMode, SnrPair,
};

/// Step of the central differences in [`total_mi_stationarity_check`].
pub const STATIONARITY_STEP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ClosedForm,
    Grid,
    Refined,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Argument {
    Allocation(PowerAllocation),
    Weight(CombiningWeight),
    Joint(PowerAllocation, CombiningWeight),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizationResult {
    pub argument: Argument,
    /// `min(gamma1, gamma2)` at `argument`.
    pub objective_minimax: f64,
    /// `I1 + I2` at `argument`, bits per channel use.
    pub objective_total_mi: f64,
    pub method: Method,
}

impl OptimizationResult {
    /// Evaluates both objectives at `argument`.
    pub fn evaluate(
        argument: Argument,
        realization: &ChannelRealization,
        profile: &FadingProfile,
        method: Method,
    ) -> Self {
        let (snr, protocol) = match argument {
            Argument::Allocation(a) => (anc_snr(realization, &a, SnrMode::Approximate), Protocol::Anc),
            Argument::Weight(w) => (
                tdbc_snr(realization, profile, w, SnrMode::Approximate),
                Protocol::Tdbc,
            ),
            Argument::Joint(a, w) => (
                tdbc_snr_with_powers(realization, &a, w, SnrMode::Approximate),
                Protocol::Tdbc,
            ),
        };
        Self {
            argument,
            objective_minimax: snr.min(),
            objective_total_mi: mutual_information(&snr, protocol).total,
            method,
        }
    }
}

fn check_magnitudes(mag_h: f64, mag_f: f64) -> Result<()> {
    if !(mag_h.is_finite() && mag_f.is_finite() && mag_h >= 0.0 && mag_f >= 0.0) {
        return Err(invalid(format!(
            "channel magnitudes must be nonnegative, got |h| = {mag_h}, |f| = {mag_f}"
        )));
    }
    Ok(())
}

/// `Er = 3E/2`, `E1 = 3|f|E / (2(|h|+|f|))`, `E2 = 3|h|E / (2(|h|+|f|))`.
///
/// A dead relay link would leave one source silent and both flows in outage,
/// so `|h| = 0` or `|f| = 0` is rejected.
pub fn anc_optimal_allocation(mag_h: f64, mag_f: f64, profile: &FadingProfile) -> Result<PowerAllocation> {
    check_magnitudes(mag_h, mag_f)?;
    if mag_h == 0.0 || mag_f == 0.0 {
        return Err(Error::DegenerateChannel(format!(
            "ANC allocation needs |h| > 0 and |f| > 0, got |h| = {mag_h}, |f| = {mag_f}"
        )));
    }
    let e = profile.energy();
    let total = mag_h + mag_f;
    Ok(PowerAllocation {
        e1: 1.5 * e * mag_f / total,
        e2: 1.5 * e * mag_h / total,
        er: 1.5 * e,
    })
}

pub fn anc_closed_form(realization: &ChannelRealization, profile: &FadingProfile) -> Result<OptimizationResult> {
    let a = anc_optimal_allocation(realization.mag_h(), realization.mag_f(), profile)?;
    Ok(OptimizationResult::evaluate(
        Argument::Allocation(a),
        realization,
        profile,
        Method::ClosedForm,
    ))
}

/// `|gamma1 - gamma2| / max(gamma1, gamma2)` in approximate mode; zero when
/// both SNRs vanish.
pub fn anc_equalization_check(
    allocation: &PowerAllocation,
    realization: &ChannelRealization,
    _profile: &FadingProfile,
) -> f64 {
    let s = anc_snr(realization, allocation, SnrMode::Approximate);
    let top = s.gamma1.max(s.gamma2);
    if top == 0.0 {
        0.0
    } else {
        (s.gamma1 - s.gamma2).abs() / top
    }
}

/// `xi = |h| / (|h| + |f|)`.
pub fn tdbc_optimal_xi(mag_h: f64, mag_f: f64) -> Result<CombiningWeight> {
    check_magnitudes(mag_h, mag_f)?;
    if mag_h + mag_f == 0.0 {
        return Err(Error::DegenerateChannel(
            "TDBC combining weight needs |h| + |f| > 0".into(),
        ));
    }
    CombiningWeight::new(mag_h / (mag_h + mag_f))
}

pub fn tdbc_closed_form(realization: &ChannelRealization, profile: &FadingProfile) -> Result<OptimizationResult> {
    let w = tdbc_optimal_xi(realization.mag_h(), realization.mag_f())?;
    Ok(OptimizationResult::evaluate(
        Argument::Weight(w),
        realization,
        profile,
        Method::ClosedForm,
    ))
}

/// A point whose total-MI stationarity is checked.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Optimum {
    Anc(PowerAllocation),
    Tdbc(CombiningWeight),
}

/// Largest central-difference partial derivative of `I1 + I2` at `optimum`,
/// in the free coordinates `(alpha, beta)` for ANC and `xi` for TDBC.
pub fn total_mi_stationarity_check(
    optimum: &Optimum,
    realization: &ChannelRealization,
    profile: &FadingProfile,
) -> Result<f64> {
    let h = STATIONARITY_STEP;
    match *optimum {
        Optimum::Anc(a) => {
            let (alpha, beta) = a.simplex(profile);
            if alpha <= h || beta <= h || alpha + beta >= 1.0 - 2.0 * h {
                return Err(Error::BoundaryPoint(format!(
                    "ANC allocation at simplex point ({alpha}, {beta})"
                )));
            }
            let mi = |al: f64, be: f64| -> Result<f64> {
                let a = PowerAllocation::from_simplex(al, be, profile)?;
                Ok(mutual_information(&anc_snr(realization, &a, SnrMode::Approximate), Protocol::Anc).total)
            };
            let d_alpha = (mi(alpha + h, beta)? - mi(alpha - h, beta)?) / (2.0 * h);
            let d_beta = (mi(alpha, beta + h)? - mi(alpha, beta - h)?) / (2.0 * h);
            Ok(d_alpha.abs().max(d_beta.abs()))
        }
        Optimum::Tdbc(w) => {
            let xi = w.xi();
            if xi <= h || xi >= 1.0 - h {
                return Err(Error::BoundaryPoint(format!("TDBC weight xi = {xi}")));
            }
            let mi = |x: f64| -> Result<f64> {
                let w = CombiningWeight::new(x)?;
                Ok(mutual_information(&tdbc_snr(realization, profile, w, SnrMode::Approximate), Protocol::Tdbc).total)
            };
            Ok(((mi(xi + h)? - mi(xi - h)?) / (2.0 * h)).abs())
        }
    }
}

/// Optima of the joint TDBC power/combining problem under each objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointOptimum {
    pub minimax: OptimizationResult,
    pub total_mi: OptimizationResult,
}

/// Point of the joint search: `(alpha, beta, xi)` with powers
/// `3E (alpha, beta, 1 - alpha - beta)`.
type Point = [f64; 3];

fn feasible(p: &Point) -> bool {
    p[0] > 0.0 && p[1] > 0.0 && p[0] + p[1] < 1.0 && (0.0..=1.0).contains(&p[2])
}

fn joint_snr(p: &Point, realization: &ChannelRealization, profile: &FadingProfile) -> SnrPair {
    let scale = 3.0 * profile.energy();
    let a = PowerAllocation {
        e1: scale * p[0],
        e2: scale * p[1],
        er: scale * (1.0 - p[0] - p[1]),
    };
    tdbc_snr_with_powers(realization, &a, CombiningWeight(p[2]), SnrMode::Approximate)
}

/// For fixed powers `gamma1` falls and `gamma2` rises with `xi`, so the
/// weight maximizing their minimum is their crossing (or an end point).
fn minimax_xi(alpha: f64, beta: f64, realization: &ChannelRealization, profile: &FadingProfile) -> f64 {
    let gap = |xi: f64| {
        let s = joint_snr(&[alpha, beta, xi], realization, profile);
        s.gamma1 - s.gamma2
    };
    if gap(0.0) <= 0.0 {
        return 0.0;
    }
    if gap(1.0) >= 0.0 {
        return 1.0;
    }
    crate::roots::bisect(&gap, 0.0, 1.0, 1e-15).unwrap_or(0.5)
}

/// Coordinate pattern search over the neighbours `{-1, 0, 1}^dims` of the
/// current point, halving the step whenever no neighbour improves.
fn pattern_search<F: Fn(&Point) -> Option<f64>>(
    objective: F,
    start: Point,
    dims: usize,
    initial_step: f64,
    halvings: usize,
) -> (Point, f64) {
    let mut best = start;
    let mut best_value = objective(&start).unwrap_or(f64::NEG_INFINITY);
    let mut step = initial_step;
    let directions: Vec<[i8; 3]> = (0..3i32.pow(dims as u32))
        .map(|k| {
            let mut d = [0i8; 3];
            let mut rest = k;
            for slot in d.iter_mut().take(dims) {
                *slot = (rest % 3) as i8 - 1;
                rest /= 3;
            }
            d
        })
        .filter(|d| d.iter().any(|&c| c != 0))
        .collect();
    let mut remaining = halvings;
    // Each successful sweep strictly improves the objective; cap the total
    // work all the same.
    let mut budget = 200 * (halvings + 1);
    while remaining > 0 && budget > 0 {
        budget -= 1;
        let mut improved = false;
        for d in &directions {
            let mut cand = best;
            for (c, &dc) in cand.iter_mut().zip(d.iter()) {
                *c += f64::from(dc) * step;
            }
            if let Some(v) = objective(&cand) {
                if v > best_value {
                    best = cand;
                    best_value = v;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
            remaining -= 1;
        }
    }
    (best, best_value)
}

/// Joint optimization of TDBC powers and combining weight for one
/// realization.
///
/// Minimax: `xi` is solved exactly for each power split (see the crossing
/// argument above), the split is scanned on the simplex grid of spacing
/// `1/grid_density` and refined by pattern search. Total MI: `(alpha, beta, xi)`
/// is scanned on the grid of the same spacing and refined likewise.
/// `refine_iterations` is the number of step halvings. The equal-power point
/// with the closed-form weight is always a candidate, so neither result falls
/// below it.
pub fn tdbc_joint_numerical(
    realization: &ChannelRealization,
    profile: &FadingProfile,
    grid_density: usize,
    refine_iterations: usize,
) -> Result<JointOptimum> {
    if grid_density < 8 {
        return Err(invalid(format!("grid density must be at least 8, got {grid_density}")));
    }
    let n = grid_density;
    let step = 1.0 / n as f64;
    let third = 1.0 / 3.0;
    let xi_star = tdbc_optimal_xi(realization.mag_h(), realization.mag_f())
        .map(|w| w.xi())
        .unwrap_or(0.5);

    // Minimax over (alpha, beta) with xi eliminated.
    let minimax_value = |p: &Point| -> Option<f64> {
        let q = [p[0], p[1], 0.5];
        if !feasible(&q) {
            return None;
        }
        let xi = minimax_xi(p[0], p[1], realization, profile);
        Some(joint_snr(&[p[0], p[1], xi], realization, profile).min())
    };
    let mut start: Point = [third, third, 0.0];
    let mut start_value = joint_snr(&[third, third, xi_star], realization, profile)
        .min()
        .max(minimax_value(&start).unwrap_or(f64::NEG_INFINITY));
    for i in 1..n {
        for j in 1..n - i {
            let p = [i as f64 * step, j as f64 * step, 0.0];
            if let Some(v) = minimax_value(&p) {
                if v > start_value {
                    start = p;
                    start_value = v;
                }
            }
        }
    }
    let (best, _) = pattern_search(minimax_value, start, 2, step, refine_iterations);
    let xi = minimax_xi(best[0], best[1], realization, profile);
    let mut minimax_point = [best[0], best[1], xi];
    let heuristic = [third, third, xi_star];
    if joint_snr(&heuristic, realization, profile).min() > joint_snr(&minimax_point, realization, profile).min() {
        minimax_point = heuristic;
    }

    // Total mutual information over (alpha, beta, xi).
    let mi_value = |p: &Point| -> Option<f64> {
        feasible(p).then(|| mutual_information(&joint_snr(p, realization, profile), Protocol::Tdbc).total)
    };
    let mut start = heuristic;
    let mut start_value = mi_value(&heuristic).unwrap_or(f64::NEG_INFINITY);
    for i in 1..n {
        for j in 1..n - i {
            for k in 0..=n {
                let p = [i as f64 * step, j as f64 * step, k as f64 * step];
                if let Some(v) = mi_value(&p) {
                    if v > start_value {
                        start = p;
                        start_value = v;
                    }
                }
            }
        }
    }
    let (mi_point, _) = pattern_search(mi_value, start, 3, step, refine_iterations);

    let method = if refine_iterations > 0 { Method::Refined } else { Method::Grid };
    let to_result = |p: Point| {
        let scale = 3.0 * profile.energy();
        let a = PowerAllocation {
            e1: scale * p[0],
            e2: scale * p[1],
            er: scale * (1.0 - p[0] - p[1]),
        };
        OptimizationResult::evaluate(
            Argument::Joint(a, CombiningWeight(p[2].clamp(0.0, 1.0))),
            realization,
            profile,
            method,
        )
    };
    Ok(JointOptimum {
        minimax: to_result(minimax_point),
        total_mi: to_result(mi_point),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn profile(e: f64) -> FadingProfile {
        FadingProfile::new(1.0, 1.0, 1.0, e).unwrap()
    }

    #[test]
    fn symmetric_channels_split_evenly() {
        let e = 2.0;
        let a = anc_optimal_allocation(1.3, 1.3, &profile(e)).unwrap();
        assert_relative_eq!(a.e1, 0.75 * e);
        assert_relative_eq!(a.e2, 0.75 * e);
        assert_relative_eq!(a.er, 1.5 * e);
    }

    #[test]
    fn asymmetric_allocation() {
        let a = anc_optimal_allocation(2.0, 1.0, &profile(1.0)).unwrap();
        assert_relative_eq!(a.e1, 0.5, max_relative = 1e-15);
        assert_relative_eq!(a.e2, 1.0, max_relative = 1e-15);
        assert_eq!(a.er, 1.5);
        assert_relative_eq!(a.total(), 3.0, max_relative = 1e-15);
    }

    #[test]
    fn degenerate_anc_channels_rejected() {
        let p = profile(1.0);
        assert!(matches!(anc_optimal_allocation(0.0, 0.0, &p), Err(Error::DegenerateChannel(_))));
        assert!(matches!(anc_optimal_allocation(1.0, 0.0, &p), Err(Error::DegenerateChannel(_))));
        assert!(anc_optimal_allocation(-1.0, 1.0, &p).is_err());
    }

    #[test]
    fn closed_form_equalizes_anc() {
        let p = profile(3.0);
        let r = ChannelRealization::from_magnitudes(0.4, 1.9, 0.0).unwrap();
        let a = anc_optimal_allocation(0.4, 1.9, &p).unwrap();
        assert!(anc_equalization_check(&a, &r, &p) < 1e-12);
    }

    #[test]
    fn equal_power_does_not_equalize_unequal_channels() {
        let p = profile(3.0);
        let r = ChannelRealization::from_magnitudes(2.0, 1.0, 0.0).unwrap();
        assert!(anc_equalization_check(&PowerAllocation::equal(&p), &r, &p) > 0.01);
    }

    #[test]
    fn xi_values() {
        assert_eq!(tdbc_optimal_xi(1.0, 1.0).unwrap().xi(), 0.5);
        assert_eq!(tdbc_optimal_xi(3.0, 1.0).unwrap().xi(), 0.75);
        assert_eq!(tdbc_optimal_xi(0.0, 2.0).unwrap().xi(), 0.0);
        assert!(matches!(tdbc_optimal_xi(0.0, 0.0), Err(Error::DegenerateChannel(_))));
    }

    #[test]
    fn xi_star_equalizes_tdbc() {
        let p = profile(5.0);
        let r = ChannelRealization::from_magnitudes(3.0, 1.0, 0.7).unwrap();
        let w = tdbc_optimal_xi(3.0, 1.0).unwrap();
        let s = tdbc_snr(&r, &p, w, SnrMode::Approximate);
        assert!((s.gamma1 - s.gamma2).abs() / s.gamma1.max(s.gamma2) < 1e-12);
    }

    #[test]
    fn stationarity_at_closed_forms() {
        let p = profile(1.0);
        let r = ChannelRealization::from_magnitudes(1.0, 1.0, 1.0).unwrap();
        let a = anc_optimal_allocation(1.0, 1.0, &p).unwrap();
        assert!(total_mi_stationarity_check(&Optimum::Anc(a), &r, &p).unwrap() < 1e-4);
        let g_opt = total_mi_stationarity_check(&Optimum::Tdbc(CombiningWeight::HALF), &r, &p).unwrap();
        assert!(g_opt < 1e-4);
        let off = CombiningWeight::new(0.6).unwrap();
        let g_off = total_mi_stationarity_check(&Optimum::Tdbc(off), &r, &p).unwrap();
        assert!(g_off > g_opt);
    }

    #[test]
    fn stationarity_rejects_boundary() {
        let p = profile(1.0);
        let r = ChannelRealization::from_magnitudes(1.0, 1.0, 1.0).unwrap();
        let edge = PowerAllocation::from_simplex(0.0, 0.5, &p).unwrap();
        assert!(matches!(
            total_mi_stationarity_check(&Optimum::Anc(edge), &r, &p),
            Err(Error::BoundaryPoint(_))
        ));
        let w = CombiningWeight::new(1.0).unwrap();
        assert!(total_mi_stationarity_check(&Optimum::Tdbc(w), &r, &p).is_err());
    }

    #[test]
    fn joint_beats_heuristic() {
        let p = FadingProfile::from_geometry(0.5, 4.0, 10.0).unwrap();
        let r = ChannelRealization::new(3.0, 20.0, 0.4).unwrap();
        let joint = tdbc_joint_numerical(&r, &p, 16, 30).unwrap();
        let heur = tdbc_closed_form(&r, &p).unwrap();
        assert!(joint.minimax.objective_minimax >= heur.objective_minimax);
        assert!(joint.total_mi.objective_total_mi >= heur.objective_total_mi);
        assert_eq!(joint.minimax.method, Method::Refined);
    }

    #[test]
    fn joint_rejects_coarse_grid() {
        let p = profile(1.0);
        let r = ChannelRealization::new(1.0, 1.0, 1.0).unwrap();
        assert!(tdbc_joint_numerical(&r, &p, 7, 10).is_err());
    }

    #[test]
    fn joint_objectives_are_recomputed_from_argument() {
        let p = profile(4.0);
        let r = ChannelRealization::new(0.5, 2.0, 0.1).unwrap();
        let j = tdbc_joint_numerical(&r, &p, 10, 20).unwrap();
        let again = OptimizationResult::evaluate(j.minimax.argument, &r, &p, j.minimax.method);
        assert_eq!(again, j.minimax);
        if let Argument::Joint(a, _) = j.total_mi.argument {
            assert_relative_eq!(a.total(), 12.0, max_relative = 1e-12);
        } else {
            panic!("joint result without joint argument");
        }
    }
}
