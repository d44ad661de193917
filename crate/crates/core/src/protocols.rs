//! Instantaneous SNR and mutual-information kernels for ANC and TDBC.
//!
//! Exact forms keep every `+1` noise term of the amplify-and-forward gains;
//! approximate forms replace the relay gains by their high-SNR values while
//! keeping the destination noise, which is what the closed-form bounds and
//! optimizers are built on.

use crate::channel::{ChannelRealization, FadingProfile};
use crate::error::{invalid, Result};

/// Relative tolerance on `e1 + e2 + er = 3E`.
pub const POWER_SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Protocol {
    Anc,
    Tdbc,
}

impl Protocol {
    /// Fraction of the time slots each flow occupies: 1/2 for ANC, 1/3 for TDBC.
    pub fn prelog(self) -> f64 {
        match self {
            Protocol::Anc => 0.5,
            Protocol::Tdbc => 1.0 / 3.0,
        }
    }

    /// SNR a single flow needs to carry `rate_r / 2` bits per channel use.
    pub fn snr_threshold(self, rate_r: f64) -> f64 {
        (rate_r / (2.0 * self.prelog())).exp2() - 1.0
    }

    /// Largest multiplexing gain of the protocol.
    pub fn max_multiplexing_gain(self) -> f64 {
        match self {
            Protocol::Anc => 1.0,
            Protocol::Tdbc => 2.0 / 3.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Protocol::Anc => "ANC",
            Protocol::Tdbc => "TDBC",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SnrMode {
    Exact,
    #[default]
    Approximate,
}

/// Transmit powers of S1, S2 and the relay (linear).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerAllocation {
    pub e1: f64,
    pub e2: f64,
    pub er: f64,
}

impl PowerAllocation {
    /// Checks nonnegativity and the `3E` sum constraint of `profile`.
    pub fn new(e1: f64, e2: f64, er: f64, profile: &FadingProfile) -> Result<Self> {
        for (name, v) in [("e1", e1), ("e2", e2), ("er", er)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(format!("{name} must be nonnegative, got {v}")));
            }
        }
        let budget = 3.0 * profile.energy();
        if ((e1 + e2 + er) - budget).abs() > POWER_SUM_TOLERANCE * budget {
            return Err(invalid(format!(
                "powers sum to {}, expected 3E = {budget}",
                e1 + e2 + er
            )));
        }
        Ok(Self { e1, e2, er })
    }

    pub fn equal(profile: &FadingProfile) -> Self {
        let e = profile.energy();
        Self {
            e1: e,
            e2: e,
            er: e,
        }
    }

    /// `e1 = 3*alpha*E`, `e2 = 3*beta*E`, `er = 3*(1 - alpha - beta)*E`.
    pub fn from_simplex(alpha: f64, beta: f64, profile: &FadingProfile) -> Result<Self> {
        if !(alpha >= 0.0 && beta >= 0.0 && alpha + beta <= 1.0 + 1e-15) {
            return Err(invalid(format!(
                "simplex coordinates ({alpha}, {beta}) outside alpha, beta >= 0, alpha + beta <= 1"
            )));
        }
        let scale = 3.0 * profile.energy();
        Ok(Self {
            e1: scale * alpha,
            e2: scale * beta,
            er: scale * (1.0 - alpha - beta).max(0.0),
        })
    }

    /// `(alpha, beta)` with respect to the budget `3E`.
    pub fn simplex(&self, profile: &FadingProfile) -> (f64, f64) {
        let scale = 3.0 * profile.energy();
        (self.e1 / scale, self.e2 / scale)
    }

    pub fn total(&self) -> f64 {
        self.e1 + self.e2 + self.er
    }
}

/// Relay combining weight `xi`: the share of relay power spent forwarding S1's
/// signal.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct CombiningWeight(pub(crate) f64);

impl CombiningWeight {
    pub const HALF: CombiningWeight = CombiningWeight(0.5);

    pub fn new(xi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&xi) {
            return Err(invalid(format!("combining weight must lie in [0, 1], got {xi}")));
        }
        Ok(Self(xi))
    }

    pub fn xi(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrPair {
    /// SNR at S1 (of the flow S2 -> S1).
    pub gamma1: f64,
    /// SNR at S2 (of the flow S1 -> S2).
    pub gamma2: f64,
}

impl SnrPair {
    pub fn min(&self) -> f64 {
        self.gamma1.min(self.gamma2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MutualInfoPair {
    pub i1: f64,
    pub i2: f64,
    pub total: f64,
}

impl MutualInfoPair {
    pub fn min(&self) -> f64 {
        self.i1.min(self.i2)
    }
}

/// `num / den`, with `0` when the numerator vanishes (broken relay link).
#[inline]
fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// ANC SNRs under an arbitrary power allocation.
pub fn anc_snr(
    realization: &ChannelRealization,
    allocation: &PowerAllocation,
    mode: SnrMode,
) -> SnrPair {
    let x = realization.gain_h2;
    let y = realization.gain_f2;
    let PowerAllocation { e1, e2, er } = *allocation;
    let xy = x * y;
    // rho^2 = 1 / (e1 x + e2 y [+ 1]); the S1 and S2 noise terms stay.
    let relay_noise = match mode {
        SnrMode::Exact => 1.0,
        SnrMode::Approximate => 0.0,
    };
    SnrPair {
        gamma1: ratio(er * e2 * xy, (er + e1) * x + e2 * y + relay_noise),
        gamma2: ratio(er * e1 * xy, (er + e2) * y + e1 * x + relay_noise),
    }
}

/// ANC SNRs with every terminal transmitting at `E`.
pub fn anc_snr_equal(
    realization: &ChannelRealization,
    profile: &FadingProfile,
    mode: SnrMode,
) -> SnrPair {
    anc_snr(realization, &PowerAllocation::equal(profile), mode)
}

/// TDBC SNRs with every terminal transmitting at `E`.
pub fn tdbc_snr(
    realization: &ChannelRealization,
    profile: &FadingProfile,
    weight: CombiningWeight,
    mode: SnrMode,
) -> SnrPair {
    tdbc_snr_with_powers(realization, &PowerAllocation::equal(profile), weight, mode)
}

/// TDBC SNRs under an arbitrary power allocation.
///
/// The relay scales its two receptions by
/// `eta1^2 = xi / (e1 |h|^2 [+ 1])` and `eta2^2 = (1 - xi) / (e2 |f|^2 [+ 1])`
/// and each source adds the direct-link reception by maximum ratio combining.
pub fn tdbc_snr_with_powers(
    realization: &ChannelRealization,
    allocation: &PowerAllocation,
    weight: CombiningWeight,
    mode: SnrMode,
) -> SnrPair {
    let x = realization.gain_h2;
    let y = realization.gain_f2;
    let z = realization.gain_g2;
    let xi = weight.xi();
    let PowerAllocation { e1, e2, er } = *allocation;
    let xy = x * y;
    match mode {
        SnrMode::Exact => {
            let eta1_sq = ratio(xi, e1 * x + 1.0);
            let eta2_sq = ratio(1.0 - xi, e2 * y + 1.0);
            let sum = eta1_sq + eta2_sq;
            SnrPair {
                gamma1: e2 * z + ratio(er * e2 * eta2_sq * xy, er * x * sum + 1.0),
                gamma2: e1 * z + ratio(er * e1 * eta1_sq * xy, er * y * sum + 1.0),
            }
        }
        SnrMode::Approximate => {
            // Grouped so that the two flows mirror each other term by term;
            // at equal powers gamma1(xi = 0) and gamma2(xi = 1) agree bitwise.
            let relayed1 = ratio(
                er * e1 * e2 * (1.0 - xi) * xy,
                y * (e2 * (er * xi + e1)) + x * (er * e1 * (1.0 - xi)),
            );
            let relayed2 = ratio(
                er * e1 * e2 * xi * xy,
                x * (e1 * (er * (1.0 - xi) + e2)) + y * (er * e2 * xi),
            );
            SnrPair {
                gamma1: e2 * z + relayed1,
                gamma2: e1 * z + relayed2,
            }
        }
    }
}

/// `I_k = prelog * log2(1 + gamma_k)`.
pub fn mutual_information(snr: &SnrPair, protocol: Protocol) -> MutualInfoPair {
    let prelog = protocol.prelog();
    let i1 = prelog * snr.gamma1.ln_1p() / std::f64::consts::LN_2;
    let i2 = prelog * snr.gamma2.ln_1p() / std::f64::consts::LN_2;
    MutualInfoPair {
        i1,
        i2,
        total: i1 + i2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn profile(e: f64) -> FadingProfile {
        FadingProfile::new(1.0, 1.0, 1.0, e).unwrap()
    }

    fn real(x: f64, y: f64, z: f64) -> ChannelRealization {
        ChannelRealization::new(x, y, z).unwrap()
    }

    #[test]
    fn anc_equal_power_approximation() {
        let p = profile(5.0);
        let r = real(0.7, 2.3, 0.0);
        let s = anc_snr_equal(&r, &p, SnrMode::Approximate);
        let (x, y, e) = (0.7, 2.3, 5.0);
        assert_relative_eq!(s.gamma1, e * x * y / (2.0 * x + y), max_relative = 1e-15);
        assert_relative_eq!(s.gamma2, e * x * y / (2.0 * y + x), max_relative = 1e-15);
    }

    #[test]
    fn anc_equal_power_exact_matches_relay_gain_form() {
        let (x, y, e) = (0.7, 2.3, 5.0);
        let s = anc_snr_equal(&real(x, y, 0.0), &profile(e), SnrMode::Exact);
        let rho2 = 1.0 / (e * x + e * y + 1.0);
        assert_relative_eq!(
            s.gamma1,
            rho2 * x * y * e * e / (e * rho2 * x + 1.0),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            s.gamma2,
            rho2 * x * y * e * e / (e * rho2 * y + 1.0),
            max_relative = 1e-14
        );
    }

    #[test]
    fn broken_relay_link_gives_zero() {
        let p = profile(10.0);
        let r = real(0.0, 1.0, 0.0);
        for mode in [SnrMode::Exact, SnrMode::Approximate] {
            let s = anc_snr_equal(&r, &p, mode);
            assert_eq!((s.gamma1, s.gamma2), (0.0, 0.0));
        }
    }

    #[test]
    fn anc_exact_close_to_approximate_at_high_power() {
        let p = profile(1000.0);
        let r = real(1.0, 1.0, 0.0);
        let ex = anc_snr_equal(&r, &p, SnrMode::Exact).gamma1;
        let ap = anc_snr_equal(&r, &p, SnrMode::Approximate).gamma1;
        assert!(((ap - ex) / ap).abs() < 5e-3);
    }

    #[test]
    fn tdbc_xi_zero() {
        let p = profile(4.0);
        let (x, y, z) = (1.5, 0.4, 0.9);
        let s = tdbc_snr(&real(x, y, z), &p, CombiningWeight::new(0.0).unwrap(), SnrMode::Approximate);
        assert_relative_eq!(s.gamma1, 4.0 * z + 4.0 * x * y / (y + x), max_relative = 1e-15);
        assert_eq!(s.gamma2, 4.0 * z);
    }

    #[test]
    fn tdbc_equal_power_matches_closed_forms() {
        let (x, y, z, e, xi) = (1.5, 0.4, 0.9, 7.0, 0.3);
        let w = CombiningWeight::new(xi).unwrap();
        let r = real(x, y, z);
        let s = tdbc_snr(&r, &profile(e), w, SnrMode::Approximate);
        let g1 = e * z + (1.0 - xi) * e * x * y / (y * (xi + 1.0) + (1.0 - xi) * x);
        let g2 = e * z + xi * e * x * y / (x * (2.0 - xi) + xi * y);
        assert_relative_eq!(s.gamma1, g1, max_relative = 1e-14);
        assert_relative_eq!(s.gamma2, g2, max_relative = 1e-14);

        let s = tdbc_snr(&r, &profile(e), w, SnrMode::Exact);
        let eta1 = xi / (e * x + 1.0);
        let eta2 = (1.0 - xi) / (e * y + 1.0);
        let g1 = e * z + e * e * eta2 * x * y / (e * x * (eta1 + eta2) + 1.0);
        let g2 = e * z + e * e * eta1 * x * y / (e * y * (eta1 + eta2) + 1.0);
        assert_relative_eq!(s.gamma1, g1, max_relative = 1e-14);
        assert_relative_eq!(s.gamma2, g2, max_relative = 1e-14);
    }

    #[test]
    fn tdbc_without_direct_link_is_relay_only() {
        let p = profile(3.0);
        let r = real(1.0, 2.0, 0.0);
        let s = tdbc_snr(&r, &p, CombiningWeight::HALF, SnrMode::Approximate);
        let relayed = 0.5 * 3.0 * 2.0 / (2.0 * 1.5 + 0.5);
        assert_relative_eq!(s.gamma1, relayed, max_relative = 1e-15);
    }

    #[test]
    fn combining_weight_bounds() {
        assert!(CombiningWeight::new(-0.1).is_err());
        assert!(CombiningWeight::new(1.1).is_err());
        assert!(CombiningWeight::new(f64::NAN).is_err());
        assert!(CombiningWeight::new(1.0).is_ok());
    }

    #[test]
    fn power_allocation_sum_constraint() {
        let p = profile(2.0);
        assert!(PowerAllocation::new(1.0, 2.0, 3.0, &p).is_ok());
        assert!(PowerAllocation::new(1.0, 2.0, 3.1, &p).is_err());
        assert!(PowerAllocation::new(-1.0, 4.0, 3.0, &p).is_err());
        let a = PowerAllocation::from_simplex(0.25, 0.25, &p).unwrap();
        assert_eq!((a.e1, a.e2, a.er), (1.5, 1.5, 3.0));
        assert_eq!(a.simplex(&p), (0.25, 0.25));
    }

    #[test]
    fn mutual_information_values() {
        let m = mutual_information(&SnrPair { gamma1: 3.0, gamma2: 3.0 }, Protocol::Anc);
        assert_relative_eq!(m.i1, 1.0, max_relative = 1e-15);
        assert_relative_eq!(m.total, 2.0, max_relative = 1e-15);
        let m = mutual_information(&SnrPair { gamma1: 7.0, gamma2: 7.0 }, Protocol::Tdbc);
        assert_relative_eq!(m.i1, 1.0, max_relative = 1e-15);
        assert_relative_eq!(m.i2, 1.0, max_relative = 1e-15);
        let m = mutual_information(&SnrPair { gamma1: 0.0, gamma2: 0.0 }, Protocol::Anc);
        assert_eq!((m.i1, m.i2, m.total), (0.0, 0.0, 0.0));
    }

    #[test]
    fn thresholds() {
        assert_relative_eq!(Protocol::Anc.snr_threshold(1.0), 1.0);
        assert_relative_eq!(Protocol::Tdbc.snr_threshold(1.0), 2f64.powf(1.5) - 1.0);
        assert_eq!(Protocol::Anc.snr_threshold(0.0), 0.0);
    }
}
