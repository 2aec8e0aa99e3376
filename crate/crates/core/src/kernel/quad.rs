//! Adaptive Gauss–Kronrod quadrature used by the validator and the symbol integrals.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for the 7-point rule embedded at the odd Kronrod nodes.
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// One 15-point Kronrod panel: returns (kronrod estimate, |kronrod - gauss|).
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = WGK[7] * fc;
    let mut rg = WG[3] * fc;
    for i in 0..7 {
        let x = h * XGK[i];
        let s = f(c - x) + f(c + x);
        rk += WGK[i] * s;
        if i % 2 == 1 {
            rg += WG[i / 2] * s;
        }
    }
    (rk * h, ((rk - rg) * h).abs())
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Quad {
    pub value: f64,
    pub converged: bool,
}

/// Recursive bisection until each panel's error estimate meets `max(abs_tol, rel_tol*|panel|)`.
pub fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Quad {
    let (v, e) = gk15(f, a, b);
    let mut converged = true;
    let value = refine(f, a, b, v, e, rel_tol, abs_tol, 40, &mut converged);
    Quad { value, converged }
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    v: f64,
    e: f64,
    rel_tol: f64,
    abs_tol: f64,
    depth: u32,
    converged: &mut bool,
) -> f64 {
    if !v.is_finite() {
        *converged = false;
        return v;
    }
    if e <= abs_tol.max(rel_tol * v.abs()) {
        return v;
    }
    if depth == 0 {
        *converged = false;
        return v;
    }
    let m = 0.5 * (a + b);
    let (vl, el) = gk15(f, a, m);
    let (vr, er) = gk15(f, m, b);
    let half_abs = 0.5 * abs_tol;
    refine(f, a, m, vl, el, rel_tol, half_abs, depth - 1, converged)
        + refine(f, m, b, vr, er, rel_tol, half_abs, depth - 1, converged)
}
