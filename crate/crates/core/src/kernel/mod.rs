//! Radial kernel profiles m(r), their admissibility checks, and the Fourier
//! symbol of the induced nonlocal operator.

pub mod quad;
mod symbol;
mod validate;

pub use symbol::{closed_form_fractional_symbol, compute_symbol, DissipationSymbol};
pub use validate::{validate_profile, ValidationReport, Verdict};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("radius {r} outside tabulated range [{lo}, {hi}]")]
    TabulatedOutOfRange { r: f64, lo: f64, hi: f64 },
    #[error("profile evaluation failed at r = {0}")]
    EvaluationFailure(f64),
    #[error("profile rejected by validation; symbol undefined")]
    Inadmissible,
    #[error("wavenumber must be finite and non-negative, got {0}")]
    InvalidWavenumber(f64),
    #[error("symbol quadrature did not converge at kappa = {kappa}: {reason}")]
    QuadratureNonConvergent { kappa: f64, reason: &'static str },
    #[error("Bessel evaluation failed at argument {0}")]
    BesselEvalFailure(f64),
    #[error("alpha must lie in (0, 1), got {0}")]
    AlphaOutOfRange(f64),
}

/// Tabulated profile samples, kept alongside their logarithms.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    radii: Vec<f64>,
    values: Vec<f64>,
    log_r: Vec<f64>,
    log_m: Vec<f64>,
}

impl Table {
    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn log_m_at(&self, t: f64) -> f64 {
        let n = self.log_r.len();
        let seg = if t <= self.log_r[0] {
            0
        } else if t >= self.log_r[n - 1] {
            n - 2
        } else {
            self.log_r.partition_point(|&x| x <= t) - 1
        };
        let (x0, x1) = (self.log_r[seg], self.log_r[seg + 1]);
        let (y0, y1) = (self.log_m[seg], self.log_m[seg + 1]);
        y0 + (y1 - y0) * (t - x0) / (x1 - x0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    PowerLaw { alpha: f64 },
    LogWeak { eps1: f64, eps2: f64 },
    Tabulated(Table),
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelProfile {
    family: Family,
    override_weak: bool,
}

impl KernelProfile {
    /// m(r) = r^{2 alpha}.
    pub fn power_law(alpha: f64, override_weak: bool) -> Result<Self, KernelError> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(KernelError::InvalidProfile(format!("alpha must be positive, got {alpha}")));
        }
        Ok(Self { family: Family::PowerLaw { alpha }, override_weak })
    }

    /// m(r) = [log(e + 1/r)]^{-(1+eps1)} [1 + log(1 + r)]^{1+eps2}.
    pub fn log_weak(eps1: f64, eps2: f64, override_weak: bool) -> Result<Self, KernelError> {
        for (name, v) in [("eps1", eps1), ("eps2", eps2)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(KernelError::InvalidProfile(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self { family: Family::LogWeak { eps1, eps2 }, override_weak })
    }

    /// Samples interpolated linearly in (log r, log m).
    pub fn tabulated(radii: Vec<f64>, values: Vec<f64>, override_weak: bool) -> Result<Self, KernelError> {
        if radii.len() != values.len() {
            return Err(KernelError::InvalidProfile("radii and values differ in length".into()));
        }
        if radii.len() < 2 {
            return Err(KernelError::InvalidProfile("a table needs at least two samples".into()));
        }
        if radii.iter().chain(&values).any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(KernelError::InvalidProfile("radii and values must be positive and finite".into()));
        }
        if radii.windows(2).any(|w| w[0] >= w[1]) {
            return Err(KernelError::InvalidProfile("radii must be strictly ascending".into()));
        }
        let log_r = radii.iter().map(|r| r.ln()).collect();
        let log_m = values.iter().map(|m| m.ln()).collect();
        Ok(Self { family: Family::Tabulated(Table { radii, values, log_r, log_m }), override_weak })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn override_weak(&self) -> bool {
        self.override_weak
    }

    pub fn family_name(&self) -> &'static str {
        match self.family {
            Family::PowerLaw { .. } => "power_law",
            Family::LogWeak { .. } => "log_weak",
            Family::Tabulated(_) => "tabulated",
        }
    }

    /// log m(e^t) for any real t. Tables extrapolate along their end slopes without bound.
    pub fn log_m(&self, t: f64) -> f64 {
        match &self.family {
            Family::PowerLaw { alpha } => 2.0 * alpha * t,
            Family::LogWeak { eps1, eps2 } => {
                // log(e + e^{-t}) and log(1 + e^t) without overflow
                let a = if t < 0.0 { -t + (1.0 + t).exp().ln_1p() } else { 1.0 + (-t - 1.0).exp().ln_1p() };
                let b = if t > 0.0 { t + (-t).exp().ln_1p() } else { t.exp().ln_1p() };
                -(1.0 + eps1) * a.ln() + (1.0 + eps2) * b.ln_1p()
            }
            Family::Tabulated(tab) => tab.log_m_at(t),
        }
    }

    /// m(r) with the domain checks of the public contract.
    pub fn evaluate_m(&self, r: f64) -> Result<f64, KernelError> {
        if !(r > 0.0) {
            return Err(KernelError::NonPositiveRadius(r));
        }
        if let Family::Tabulated(tab) = &self.family {
            let lo = tab.radii[0] / 2.0;
            let hi = tab.radii[tab.radii.len() - 1] * 2.0;
            if r < lo || r > hi {
                return Err(KernelError::TabulatedOutOfRange { r, lo, hi });
            }
        }
        let m = self.log_m(r.ln()).exp();
        if m.is_finite() && m > 0.0 {
            Ok(m)
        } else {
            Err(KernelError::EvaluationFailure(r))
        }
    }

    /// ∫_0^rho r/m(r) dr, the weight of the quadratic Taylor surrogate on a small disc.
    pub fn near_origin_moment(&self, rho: f64) -> Result<f64, KernelError> {
        if !(rho > 0.0) {
            return Err(KernelError::NonPositiveRadius(rho));
        }
        // In t = ln r the integrand is exp(2t - log m(e^t)); sum shells of width ln 2 downward.
        let top = rho.ln();
        let g = |t: f64| (2.0 * t - self.log_m(t)).exp();
        let w = std::f64::consts::LN_2;
        let mut total = 0.0;
        for i in 0..4000 {
            let b = top - i as f64 * w;
            let q = quad::adaptive(&g, b - w, b, 1e-12, 0.0);
            total += q.value;
            if !q.value.is_finite() {
                break;
            }
            if i > 4 && q.value <= 1e-15 * total {
                return Ok(total);
            }
        }
        Err(KernelError::QuadratureNonConvergent { kappa: 0.0, reason: "near-origin moment diverges" })
    }
}
