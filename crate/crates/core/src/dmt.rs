//! Finite-SNR diversity-multiplexing tradeoff.
//!
//! The diversity gain at multiplexing gain `r` and power `E` is
//! `d(r, E) = -d ln P(r log2(1 + E)) / d ln E` evaluated on the closed-form
//! outage lower bounds (array gain 1). Both curves are available in closed
//! form; this module also locates their crossing point `Q(E)` numerically and
//! through a first-order expansion around `r = 1/2`.

use crate::channel::FadingProfile;
use crate::error::{invalid, Error, Result};
use crate::outage::TDBC_SINGULARITY_TOLERANCE;
use crate::roots::{bisect, scan_brackets};

/// Below this `r` the closed forms are 0/0 and their analytic limits are used.
pub const SMALL_MUX_LIMIT: f64 = 1e-8;

/// Slack accepted on the upper end of the multiplexing-gain domains.
const DOMAIN_SLACK: f64 = 1e-12;

/// Bracket scan resolution and bisection tolerance for `Q(E)`.
const CROSSING_SCAN_POINTS: usize = 64;
const CROSSING_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DmtPoint {
    pub mux_r: f64,
    pub div_d: f64,
    pub energy_e: f64,
}

/// `1 / (1 - e^x)` for `x > 0` without overflowing `e^x`.
fn inv_one_minus_exp(x: f64) -> f64 {
    if x > 1.0 {
        (-x).exp() / (-x).exp_m1()
    } else {
        -1.0 / x.exp_m1()
    }
}

/// `d(0, E)` of a bound that behaves like `(r ln(1+E))^k` as `r -> 0`,
/// normalized by the diversity order `k`.
fn small_mux_limit(energy: f64) -> f64 {
    let u = 1.0 + energy;
    1.0 - energy / (u * energy.ln_1p())
}

fn check_mux(r: f64, max: f64) -> Result<f64> {
    if !(r >= 0.0 && r <= max + DOMAIN_SLACK) {
        return Err(invalid(format!(
            "multiplexing gain must lie in [0, {max}], got {r}"
        )));
    }
    Ok(r.min(max))
}

/// ANC tradeoff curve, `0 <= r <= 1`.
pub fn dmt_anc(r: f64, profile: &FadingProfile) -> Result<DmtPoint> {
    let r = check_mux(r, 1.0)?;
    let e = profile.energy();
    Ok(DmtPoint {
        mux_r: r,
        div_d: anc_diversity(r, e, profile.omega_h(), profile.omega_f()),
        energy_e: e,
    })
}

fn anc_diversity(r: f64, e: f64, oh: f64, of: f64) -> f64 {
    if r < SMALL_MUX_LIMIT {
        return small_mux_limit(e);
    }
    let k = 2.0 * (oh + of) / (oh * of);
    let u = 1.0 + e;
    let log_u = e.ln_1p();
    let ur = u.powf(r);
    let ur_m1 = if r * log_u < 0.5 {
        (r * log_u).exp_m1()
    } else {
        ur - 1.0
    };
    // 1 + r E (1+E)^{r-1} - (1+E)^r
    let numerator = r * e * (ur / u) - ur_m1;
    k / e * numerator * inv_one_minus_exp(k * ur_m1 / e)
}

/// TDBC tradeoff curve, `0 <= r <= 2/3`; uses the no-direct-link form when
/// `omega_g == 0`.
pub fn dmt_tdbc(r: f64, profile: &FadingProfile) -> Result<DmtPoint> {
    let r = check_mux(r, 2.0 / 3.0)?;
    Ok(DmtPoint {
        mux_r: r,
        div_d: tdbc_diversity(r, profile),
        energy_e: profile.energy(),
    })
}

fn tdbc_diversity(r: f64, profile: &FadingProfile) -> f64 {
    let e = profile.energy();
    let (og, oh, of) = (profile.omega_g(), profile.omega_h(), profile.omega_f());
    if r < SMALL_MUX_LIMIT {
        let order = if og > 0.0 { 2.0 } else { 1.0 };
        return order * small_mux_limit(e);
    }
    let u = 1.0 + e;
    let log_u = e.ln_1p();
    let lambda = u.powf(1.5 * r);
    let s = if 1.5 * r * log_u < 0.5 {
        (1.5 * r * log_u).exp_m1()
    } else {
        lambda - 1.0
    };
    // lambda (3 r E - 2E - 2) + 2E + 2
    let g = lambda * (3.0 * r * e - 2.0 * e - 2.0) + 2.0 * e + 2.0;
    let relay_rate = 3.0 * (oh + of) / (e * oh * of);
    let eb = (-relay_rate * s).exp();
    if og == 0.0 {
        return 3.0 * (oh + of) * g * eb / (2.0 * e * u * oh * of * (-relay_rate * s).exp_m1());
    }
    let direct_rate = 1.0 / (e * og);
    let a_coef = 3.0 * og * (oh + of);
    let b_coef = oh * of;
    if (a_coef - b_coef).abs() < TDBC_SINGULARITY_TOLERANCE * b_coef {
        // Equal exponents: the bound is 1 - e^{-w}(1 + w) with w = a s.
        let w = direct_rate * s;
        let bound = -(-w).exp_m1() - w * (-w).exp();
        return -w * (-w).exp() * g / (2.0 * u * e * og * bound);
    }
    let ea = (-direct_rate * s).exp();
    let d1 = 3.0 * (oh + of) * g * (eb - ea);
    let d2 = 2.0 * e * u * (a_coef * -(-direct_rate * s).exp_m1() - b_coef * -(-relay_rate * s).exp_m1());
    d1 / d2
}

/// Exact crossing `Q(E)` of the two curves on `(0, 2/3)`; requires a direct
/// link. The root nearest `1/2` is returned if several exist.
pub fn crossing_point_exact(profile: &FadingProfile) -> Result<f64> {
    if !profile.has_direct_link() {
        return Err(invalid("crossing point requires omega_g > 0"));
    }
    let gap = |r: f64| anc_diversity(r, profile.energy(), profile.omega_h(), profile.omega_f()) - tdbc_diversity(r, profile);
    let brackets = scan_brackets(&gap, 0.0, 2.0 / 3.0, CROSSING_SCAN_POINTS);
    let mut best: Option<f64> = None;
    for (lo, hi) in brackets {
        let root = bisect(&gap, lo, hi, CROSSING_TOLERANCE)?;
        if best.is_none_or(|b| (root - 0.5).abs() < (b - 0.5).abs()) {
            best = Some(root);
        }
    }
    best.ok_or(Error::NoCrossing {
        energy: profile.energy(),
    })
}

/// Which closed forms the expansion coefficients are evaluated with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum TaylorVariant {
    /// Coefficients transcribed literally: `c3` with `E * omega_g` in the
    /// exponent and `nu1`, `nu2` as published.
    #[default]
    Printed,
    /// `c3 = exp(3 (Oh+Of) (1 - (1+E)^{3/4}) / (E Oh Of))`, `nu1` the TDBC curve
    /// at `r = 1/2` (the published form is four times larger), and `nu2` its
    /// `r`-derivative there.
    Corrected,
}

/// First-order expansion `d_ANC ~ mu1 + mu2 (r - 1/2)`,
/// `d_TDBC ~ nu1 + nu2 (r - 1/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaylorCoefficients {
    pub mu1: f64,
    pub mu2: f64,
    pub nu1: f64,
    pub nu2: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub variant: TaylorVariant,
}

impl TaylorCoefficients {
    /// `1/2 - (nu1 - mu1) / (nu2 - mu2)`.
    pub fn crossing(&self) -> Result<f64> {
        let slope_gap = self.nu2 - self.mu2;
        if slope_gap.abs() < 1e-12 {
            return Err(Error::DegenerateLinearization { slope_gap });
        }
        Ok(0.5 - (self.nu1 - self.mu1) / slope_gap)
    }
}

pub fn taylor_coefficients(profile: &FadingProfile, variant: TaylorVariant) -> Result<TaylorCoefficients> {
    if !profile.has_direct_link() {
        return Err(invalid("Taylor crossing point requires omega_g > 0"));
    }
    let e = profile.energy();
    let (og, oh, of) = (profile.omega_g(), profile.omega_h(), profile.omega_f());
    let sum = oh + of;
    let prod = oh * of;
    let u = 1.0 + e;
    let log_u = e.ln_1p();
    let sqrt_u = u.sqrt();
    let q = u.powf(0.25);
    let u34 = u.powf(0.75);

    let c1 = (2.0 * sum * (sqrt_u - 1.0) / (e * prod)).exp();
    let c2 = ((1.0 - u34) / (e * og)).exp();
    let c3 = match variant {
        TaylorVariant::Printed => (3.0 * sum * (1.0 - u34) / (e * og)).exp(),
        TaylorVariant::Corrected => (3.0 * sum * (1.0 - u34) / (e * prod)).exp(),
    };

    let mu1 = 2.0 * sum * (e / (2.0 * sqrt_u) + 1.0 - sqrt_u) / (e * prod * (1.0 - c1));
    let mu2 = 2.0 * sum / (e * prod * (1.0 - c1))
        * ((e * log_u + 2.0 * e) / (2.0 * sqrt_u) - sqrt_u * log_u
            + c1 * sum * (e - 2.0 * sqrt_u + 2.0) * log_u / (e * prod * (c1 - 1.0)));

    let mix = 3.0 * og * sum * (1.0 - c2) - prod * (1.0 - c3);
    let (nu1, nu2) = match variant {
        TaylorVariant::Printed => {
            let nu1 = 3.0 * (c3 - c2) * sum * (4.0 * q - e - 4.0) / (e * q * mix);
            let nu2 = 3.0 * sum / (e * q)
                * ((c3 - c2) * (e - 0.25 * (e + 4.0) * log_u)
                    + log_u / (2.0 * e) * (c2 / og - 3.0 * c3 * sum / prod) * u34 * (2.0 * q - e / 2.0 - 2.0))
                + 9.0 * (c2 - c3).powi(2) * sum * sum * (e + 4.0 - 4.0 * q) * u34 * log_u
                    / (4.0 * e * e * q * (3.0 * og * sum * (c2 - 1.0) + prod * (1.0 - c3)));
            (nu1, nu2)
        }
        TaylorVariant::Corrected => {
            let nu1 = 3.0 * (c3 - c2) * sum * (4.0 * q - e - 4.0) / (4.0 * e * q * mix);
            // Quotient rule on d1/d2 at r = 1/2, lambda = (1+E)^{3/4}.
            let direct_rate = 1.0 / (e * og);
            let relay_rate = 3.0 * sum / (e * prod);
            let lambda = u34;
            let dlambda = 1.5 * log_u * lambda;
            let g = 2.0 * u - lambda * (e + 4.0) / 2.0;
            let dg = -dlambda * (e + 4.0) / 2.0 + 3.0 * e * lambda;
            let dnum = 3.0 * sum * (dg * (c3 - c2) + g * dlambda * (direct_rate * c2 - relay_rate * c3));
            let den = 2.0 * e * u * mix;
            let dden = 2.0 * u * dlambda * 3.0 * sum * (c2 - c3);
            (nu1, (dnum - nu1 * dden) / den)
        }
    };
    Ok(TaylorCoefficients {
        mu1,
        mu2,
        nu1,
        nu2,
        c1,
        c2,
        c3,
        variant,
    })
}

/// Approximate crossing point `1/2 - (nu1 - mu1) / (nu2 - mu2)`.
pub fn crossing_point_approx(profile: &FadingProfile, variant: TaylorVariant) -> Result<f64> {
    taylor_coefficients(profile, variant)?.crossing()
}

/// Relative residuals of the anchor identities `mu1 = d_ANC(1/2)` and
/// `nu1 = d_TDBC(1/2)` for the given variant.
pub fn anchor_residuals(profile: &FadingProfile, variant: TaylorVariant) -> Result<(f64, f64)> {
    let c = taylor_coefficients(profile, variant)?;
    let anc = dmt_anc(0.5, profile)?.div_d;
    let tdbc = dmt_tdbc(0.5, profile)?.div_d;
    Ok(((c.mu1 - anc).abs() / anc.abs(), (c.nu1 - tdbc).abs() / tdbc.abs()))
}
