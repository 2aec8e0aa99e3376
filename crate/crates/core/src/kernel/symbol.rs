use std::f64::consts::{PI, TAU};

use rayon::prelude::*;

use super::quad;
use super::{validate_profile, KernelError, KernelProfile, Verdict};

/// Fourier multiplier of the nonlocal operator, tabulated at a sorted list of wavenumber magnitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct DissipationSymbol {
    kappas: Vec<f64>,
    sigmas: Vec<f64>,
    profile: KernelProfile,
}

impl DissipationSymbol {
    pub fn kappas(&self) -> &[f64] {
        &self.kappas
    }

    pub fn sigmas(&self) -> &[f64] {
        &self.sigmas
    }

    pub fn profile(&self) -> &KernelProfile {
        &self.profile
    }

    /// Exact-match lookup; `None` if kappa was not tabulated.
    pub fn get(&self, kappa: f64) -> Option<f64> {
        self.kappas.binary_search_by(|k| k.total_cmp(&kappa)).ok().map(|i| self.sigmas[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.kappas.iter().copied().zip(self.sigmas.iter().copied())
    }
}

/// σ(κ) = 2π ∫_0^∞ (1 − J0(κr)) / (r m(r)) dr for each requested κ (duplicates collapse).
pub fn compute_symbol(profile: &KernelProfile, kappas: &[f64]) -> Result<DissipationSymbol, KernelError> {
    if let Some(&bad) = kappas.iter().find(|k| !(k.is_finite() && **k >= 0.0)) {
        return Err(KernelError::InvalidWavenumber(bad));
    }
    if validate_profile(profile)?.verdict == Verdict::Rejected {
        return Err(KernelError::Inadmissible);
    }
    let mut ks = kappas.to_vec();
    ks.sort_by(f64::total_cmp);
    ks.dedup();
    let sigmas =
        ks.par_iter().map(|&k| if k == 0.0 { Ok(0.0) } else { sigma_at(profile, k) }).collect::<Result<Vec<_>, _>>()?;
    Ok(DissipationSymbol { kappas: ks, sigmas, profile: profile.clone() })
}

/// Power-law reference C(α) κ^{2α}, with C(α) from the Mellin transform of 1 − J0.
pub fn closed_form_fractional_symbol(alpha: f64, kappa: f64) -> Result<f64, KernelError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(KernelError::AlphaOutOfRange(alpha));
    }
    if !(kappa.is_finite() && kappa >= 0.0) {
        return Err(KernelError::InvalidWavenumber(kappa));
    }
    if kappa == 0.0 {
        return Ok(0.0);
    }
    let c = TAU * libm::tgamma(1.0 - alpha) / ((2.0 * alpha + 1.0).exp2() * alpha * libm::tgamma(1.0 + alpha));
    Ok(c * kappa.powf(2.0 * alpha))
}

// First zero of J0; the inner region ends here.
const S_STAR: f64 = 2.404_825_557_695_773;

fn j0(s: f64) -> Result<f64, KernelError> {
    let v = libm::j0(s);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(KernelError::BesselEvalFailure(s))
    }
}

/// ln(1 − J0(s)) for small s from the even power series, safe when s underflows.
fn ln_one_minus_j0_small(t: f64) -> f64 {
    let x = (2.0 * t).exp() / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 1..12 {
        term *= -x / ((j + 1) as f64).powi(2);
        sum += term;
    }
    2.0 * t - 4f64.ln() + sum.ln()
}

/// Approximate j-th zero of J0 (McMahon), used only as panel breakpoints.
fn j0_zero(m: usize) -> f64 {
    if m == 1 {
        return S_STAR;
    }
    let b = (m as f64 - 0.25) * PI;
    b + 1.0 / (8.0 * b) - 31.0 / (384.0 * b.powi(3))
}

/// In s = κr: σ = 2π [ ∫_0^{s*} (1 − J0(s)) w(s) ds + ∫_{s*}^∞ w(s) ds − ∫_{s*}^∞ J0(s) w(s) ds ],
/// with w(s) ds = ds / (s m(s/κ)).
fn sigma_at(p: &KernelProfile, kappa: f64) -> Result<f64, KernelError> {
    let lk = kappa.ln();
    let nonconv = |reason| KernelError::QuadratureNonConvergent { kappa, reason };
    let ln2 = std::f64::consts::LN_2;

    // Inner part in t = ln s: integrand (1 − J0(e^t)) / m(e^t/κ), summed over dyadic shells downward.
    let ts = S_STAR.ln();
    let inner_f = |t: f64| {
        let s = t.exp();
        let lm = p.log_m(t - lk);
        if s < 0.5 {
            (ln_one_minus_j0_small(t) - lm).exp()
        } else {
            (1.0 - libm::j0(s)) * (-lm).exp()
        }
    };
    let mut inner = 0.0;
    let mut prev = f64::NAN;
    let mut done = false;
    for i in 0..6000 {
        let b = ts - i as f64 * ln2;
        let c = quad::adaptive(&inner_f, b - ln2, b, 1e-13, 0.0).value;
        if !c.is_finite() {
            return Err(nonconv("inner integrand not finite"));
        }
        inner += c;
        if i >= 8 {
            let r = c / prev;
            if r < 1.0 && c * r / (1.0 - r) < 1e-14 * inner {
                inner += c * r / (1.0 - r);
                done = true;
                break;
            }
        }
        prev = c;
    }
    if !done {
        return Err(nonconv("inner shells do not decay"));
    }

    // Non-oscillatory outer part in t = ln s on panels of doubling width.
    let outer_f = |t: f64| (-p.log_m(t - lk)).exp();
    let mut outer = 0.0;
    let mut prev = f64::NAN;
    let mut lo = ts;
    let mut width = 1.0;
    done = false;
    for k in 0..1000 {
        let hi = lo + width;
        let c = quad::adaptive(&outer_f, lo, hi, 1e-13, 0.0).value;
        if !c.is_finite() {
            return Err(nonconv("outer integrand not finite"));
        }
        outer += c;
        if k >= 4 {
            let r = c / prev;
            if r < 1.0 {
                let tail = c * r / (1.0 - r);
                if tail < 1e-12 * (inner + outer) {
                    outer += tail;
                    done = true;
                    break;
                }
            } else if k >= 60 {
                return Err(nonconv("tail not summable"));
            }
        }
        prev = c;
        lo = hi;
        width *= 2.0;
    }
    if !done {
        return Err(nonconv("outer panels exhausted"));
    }

    // Oscillatory part: half-period panels, partial sums smoothed by repeated averaging.
    let osc_f = |s: f64| libm::j0(s) * (-s.ln() - p.log_m(s.ln() - lk)).exp();
    let scale = inner + outer;
    let mut partial = 0.0;
    let mut sums: Vec<f64> = Vec::new();
    let mut last_est = f64::NAN;
    let mut osc = None;
    for m in 1..4000 {
        let (a, b) = (j0_zero(m), j0_zero(m + 1));
        let c = quad::adaptive(&osc_f, a, b, 1e-14, 0.0).value;
        j0(b)?;
        if !c.is_finite() {
            return Err(nonconv("oscillatory integrand not finite"));
        }
        partial += c;
        sums.push(partial);
        if sums.len() >= 40 {
            let est = euler_average(&sums[sums.len() - 13..]);
            if (est - last_est).abs() < 1e-14 * scale {
                osc = Some(est);
                break;
            }
            last_est = est;
        }
    }
    let osc = osc.ok_or_else(|| nonconv("oscillatory tail did not settle"))?;

    let sigma = TAU * (inner + outer - osc);
    if sigma.is_finite() && sigma > 0.0 {
        Ok(sigma)
    } else {
        Err(nonconv("non-positive result"))
    }
}

/// Repeated pairwise averaging of alternating partial sums.
fn euler_average(sums: &[f64]) -> f64 {
    let mut v = sums.to_vec();
    while v.len() > 1 {
        v = v.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    }
    v[0]
}
