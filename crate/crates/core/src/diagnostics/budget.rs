use super::{DiagnosticsError, DiagnosticsRecord};

pub const ENERGY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyVerdict {
    pub pass: bool,
    /// max_t |E(0) − E(t) − D(t)| / E(0) (absolute when E(0) = 0).
    pub max_residual: f64,
    /// max_t (E(t) + D(t)) / E(0) − 1.
    pub max_excess: f64,
}

/// E(t) + D(t) ≤ E(0)(1 + 1e-6) at every sample.
pub fn energy_budget(records: &[DiagnosticsRecord]) -> Result<EnergyVerdict, DiagnosticsError> {
    if records.len() < 2 {
        return Err(DiagnosticsError::InsufficientSamples { need: 2, got: records.len() });
    }
    let e0 = records[0].energy() + records[0].dissipated();
    let scale = if e0 > 0.0 { e0 } else { 1.0 };
    let mut pass = true;
    let mut max_residual = 0.0f64;
    let mut max_excess = f64::NEG_INFINITY;
    for r in records {
        let total = r.energy() + r.dissipated();
        pass &= total <= e0 * (1.0 + ENERGY_TOL) && total.is_finite();
        max_residual = max_residual.max((e0 - total).abs() / scale);
        max_excess = max_excess.max((total - e0) / scale);
    }
    Ok(EnergyVerdict { pass, max_residual, max_excess })
}

/// max residual of a coarse run over that of a run with half the step.
pub fn residual_ratio(coarse: &[DiagnosticsRecord], fine: &[DiagnosticsRecord]) -> Result<f64, DiagnosticsError> {
    Ok(energy_budget(coarse)?.max_residual / energy_budget(fine)?.max_residual)
}

/// Relative size below which an interval's enstrophy increment counts as time-integration noise.
pub const ENSTROPHY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnstrophyVerdict {
    pub pass: bool,
    /// Smallest C with ΔY + ∫d_total + 2∫‖∇j‖² ≤ C ∫‖ω‖²‖j‖² on every sample interval,
    /// ignoring increments below ENSTROPHY_TOL·Y.
    pub c_fit: f64,
    /// max_t (Z − Y(0) exp(C_fit ∫‖j‖²)) / Y(0) with Z = Y + ∫d_total + 2∫‖∇j‖².
    pub gronwall_excess: f64,
}

/// Enstrophy–current ledger Y = ‖ω‖² + ‖j‖² with interval-wise fitted constant.
pub fn enstrophy_budget(records: &[DiagnosticsRecord]) -> Result<EnstrophyVerdict, DiagnosticsError> {
    if records.len() < 2 {
        return Err(DiagnosticsError::InsufficientSamples { need: 2, got: records.len() });
    }
    let y = |r: &DiagnosticsRecord| r.enstrophy + r.current_sq;
    let mut c_fit = 0.0f64;
    for w in records.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let h = b.t - a.t;
        let lhs = y(b) - y(a) + 2.0 * (b.grad_j_cum - a.grad_j_cum) + (b.d_total_cum - a.d_total_cum);
        let rhs = 0.5 * h * (a.enstrophy * a.current_sq + b.enstrophy * b.current_sq);
        if lhs > ENSTROPHY_TOL * y(a).max(y(b)) {
            c_fit = c_fit.max(if rhs > 0.0 { lhs / rhs } else { f64::INFINITY });
        }
    }
    let (r0, y0) = (&records[0], y(&records[0]));
    let scale = if y0 > 0.0 { y0 } else { 1.0 };
    let mut jint = 0.0;
    let mut slack = 0.0;
    let mut gronwall_excess = f64::NEG_INFINITY;
    let mut pass = c_fit.is_finite();
    for (i, r) in records.iter().enumerate() {
        if i > 0 {
            let p = &records[i - 1];
            jint += 0.5 * (r.t - p.t) * (p.current_sq + r.current_sq);
            slack += ENSTROPHY_TOL * y(p).max(y(r));
        }
        let z = y(r) + (r.d_total_cum - r0.d_total_cum) + 2.0 * (r.grad_j_cum - r0.grad_j_cum);
        let bound = y0 * (c_fit * jint).exp();
        gronwall_excess = gronwall_excess.max((z - bound) / scale);
        pass &= z <= bound + slack;
    }
    Ok(EnstrophyVerdict { pass, c_fit, gronwall_excess })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BkmReport {
    pub integral: f64,
    pub blowup_flag: bool,
}

/// ∫‖ω‖_∞ by trapezoid; flags unresolved tails or a tenfold jump between samples.
pub fn bkm_monitor(records: &[DiagnosticsRecord]) -> BkmReport {
    let mut integral = 0.0;
    let mut flag = records.iter().any(|r| r.tail_ratio > 0.1 || !r.lp_omega.inf.is_finite());
    for w in records.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        integral += 0.5 * (b.t - a.t) * (a.lp_omega.inf + b.lp_omega.inf);
        if b.lp_omega.inf > 10.0 * a.lp_omega.inf && a.lp_omega.inf > 0.0 {
            flag = true;
        }
    }
    BkmReport { integral, blowup_flag: flag }
}
