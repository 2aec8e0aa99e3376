use super::quad;
use super::{Family, KernelError, KernelProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Admissible,
    WeakOnly,
    Rejected,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Admissible => "admissible",
            Verdict::WeakOnly => "weak_only",
            Verdict::Rejected => "rejected",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub monotone_ok: bool,
    /// sup m(2r)/m(r) over the probe radii; `None` when it is not finite.
    pub doubling_constant: Option<f64>,
    /// ∫_0^1 m(r)/r dr, `f64::INFINITY` when the shell sums do not settle.
    pub dini_integral: f64,
    pub limit_zero_ok: bool,
    pub verdict: Verdict,
}

const SHELLS: usize = 61;
const TAIL_WINDOW: usize = 10;
const MONO_TOL: f64 = 1e-12;

pub fn validate_profile(profile: &KernelProfile) -> Result<ValidationReport, KernelError> {
    let monotone_ok = monotone(profile)?;
    let doubling_constant = doubling(profile)?;
    let dini_integral = dini(profile)?;
    let limit_zero_ok = limit_zero(profile)?;

    let admissible = monotone_ok && doubling_constant.is_some() && dini_integral.is_finite();
    let verdict = if admissible {
        Verdict::Admissible
    } else if profile.override_weak() && monotone_ok && limit_zero_ok {
        Verdict::WeakOnly
    } else {
        Verdict::Rejected
    };
    Ok(ValidationReport { monotone_ok, doubling_constant, dini_integral, limit_zero_ok, verdict })
}

fn monotone(p: &KernelProfile) -> Result<bool, KernelError> {
    // 8 probes per octave over [2^-61, 2^11], plus every table knot inside that range.
    let mut radii: Vec<f64> = (-61 * 8..=11 * 8).map(|i| (i as f64 / 8.0).exp2()).collect();
    if let Family::Tabulated(tab) = p.family() {
        radii.extend(tab.radii().iter().copied().filter(|&r| (-61f64.exp2()..=11f64.exp2()).contains(&r)));
        radii.sort_by(f64::total_cmp);
    }
    let mut prev = p.evaluate_m(radii[0])?;
    for &r in &radii[1..] {
        let m = p.evaluate_m(r)?;
        if m < prev * (1.0 - MONO_TOL) {
            return Ok(false);
        }
        prev = m;
    }
    Ok(true)
}

fn doubling(p: &KernelProfile) -> Result<Option<f64>, KernelError> {
    let mut c = 0.0f64;
    for e in -40..=10 {
        let r = (e as f64).exp2();
        c = c.max(p.evaluate_m(2.0 * r)? / p.evaluate_m(r)?);
    }
    Ok(c.is_finite().then_some(c))
}

/// Shell sums s_n = ∫ m(r)/r dr over [2^{-n-1}, 2^{-n}], n = 0..60. The tail is accepted either
/// as geometric (power-type profiles) or as algebraic s_n ~ n^{-p} with p > 1
/// (logarithmic profiles, whose shells shrink like n^{-(1+eps)}).
fn dini(p: &KernelProfile) -> Result<f64, KernelError> {
    // Touch both shell endpoints so range errors surface as in evaluate_m.
    p.evaluate_m(1.0)?;
    p.evaluate_m((-(SHELLS as f64)).exp2())?;
    let ln2 = std::f64::consts::LN_2;
    let f = |t: f64| p.log_m(t).exp();
    let mut shells = Vec::with_capacity(SHELLS);
    for n in 0..SHELLS {
        let b = -(n as f64) * ln2;
        let q = quad::adaptive(&f, b - ln2, b, 1e-12, 0.0);
        if !q.value.is_finite() {
            return Err(KernelError::EvaluationFailure((-(n as f64)).exp2()));
        }
        shells.push(q.value);
    }
    let partial: f64 = shells.iter().sum();
    let tail = &shells[SHELLS - TAIL_WINDOW - 1..];
    if tail.windows(2).any(|w| !(w[1] < w[0])) {
        return Ok(f64::INFINITY);
    }
    let last = shells[SHELLS - 1];

    // Pick the tail model that fits the window better: ln s_n linear in n (geometric)
    // or linear in ln n (algebraic).
    let window = SHELLS - TAIL_WINDOW..SHELLS;
    let geo_pts: Vec<(f64, f64)> = window.clone().map(|n| (n as f64, shells[n].ln())).collect();
    let alg_pts: Vec<(f64, f64)> = window.map(|n| ((n as f64 + 0.5).ln(), shells[n].ln())).collect();
    let (geo_slope, geo_res) = fit_line(&geo_pts);
    let (alg_slope, alg_res) = fit_line(&alg_pts);
    if geo_res <= alg_res {
        let ratio = geo_slope.exp();
        if ratio < 0.999 {
            return Ok(partial + last * ratio / (1.0 - ratio));
        }
    } else {
        let expo = -alg_slope;
        if expo > 1.05 {
            let n_last = (SHELLS - 1) as f64 + 0.5;
            return Ok(partial + last * n_last / (expo - 1.0));
        }
    }
    Ok(f64::INFINITY)
}

fn limit_zero(p: &KernelProfile) -> Result<bool, KernelError> {
    let m1 = p.evaluate_m(1.0)?;
    let vals: Vec<f64> = (1..=60).map(|k| p.evaluate_m((-(k as f64)).exp2())).collect::<Result<_, _>>()?;
    if vals.windows(2).any(|w| w[1] > w[0] * (1.0 + MONO_TOL)) || !(vals[59] < vals[0]) {
        return Ok(false);
    }
    if vals[59] < 1e-6 * m1 {
        return Ok(true);
    }
    // Slowly decaying profiles: require a visible algebraic decay of m(2^{-k}) in k.
    let pts: Vec<(f64, f64)> = (30..=60).map(|k| ((k as f64).ln(), vals[k - 1].ln())).collect();
    Ok(-fit_line(&pts).0 >= 0.5)
}

/// Least-squares slope and residual sum of squares.
fn fit_line(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let res = pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
    (slope, res)
}
