use std::f64::consts::PI;

use super::DiagnosticsError;
use crate::kernel::{DissipationSymbol, KernelProfile};
use crate::spectral::{PhysicalField, SpectralField, SpectralGrid, VectorField};

pub const MAX_D_POINTS: usize = 16;

/// Norms of a vector field by grid quadrature of |G|.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GNorms {
    pub l2: f64,
    pub l4: f64,
    pub l8: f64,
    pub inf: f64,
}

/// (b·∇)v_i with both factors in real space, dealiased.
fn advect(grid: &SpectralGrid, b: &[PhysicalField; 2], v: &SpectralField) -> SpectralField {
    let d1 = grid.inverse(&grid.d1(v));
    let d2 = grid.inverse(&grid.d2(v));
    let p = PhysicalField((0..grid.physical_len()).map(|i| b[0].0[i] * d1.0[i] + b[1].0[i] * d2.0[i]).collect());
    let mut s = grid.forward(&p);
    grid.dealias_in_place(&mut s);
    s
}

/// G = Δb + (b·∇)u and its L², L⁴, L⁸, L^∞ norms.
pub fn structural_g(grid: &SpectralGrid, u: &VectorField, b: &VectorField) -> (VectorField, GNorms) {
    let bp = grid.inverse_vector(b);
    let g = VectorField {
        x1: grid.laplacian(&b.x1).add(&advect(grid, &bp, &u.x1)),
        x2: grid.laplacian(&b.x2).add(&advect(grid, &bp, &u.x2)),
    };
    let [g1, g2] = grid.inverse_vector(&g);
    let a = grid.dx() * grid.dx();
    let (mut s2, mut s4, mut s8, mut inf) = (0.0, 0.0, 0.0, 0.0f64);
    for (x, y) in g1.0.iter().zip(&g2.0) {
        let q = x * x + y * y;
        s2 += q;
        s4 += q * q;
        s8 += (q * q) * (q * q);
        inf = inf.max(q.sqrt());
    }
    let norms = GNorms { l2: (a * s2).sqrt(), l4: (a * s4).powf(0.25), l8: (a * s8).powf(0.125), inf };
    (g, norms)
}

/// f = b1 G2 − b2 G1 on the grid, with its sup norm.
pub fn forcing_f(grid: &SpectralGrid, u: &VectorField, b: &VectorField) -> (PhysicalField, f64) {
    let (g, _) = structural_g(grid, u, b);
    let [g1, g2] = grid.inverse_vector(&g);
    let [b1, b2] = grid.inverse_vector(b);
    let f = PhysicalField((0..grid.physical_len()).map(|i| b1.0[i] * g2.0[i] - b2.0[i] * g1.0[i]).collect());
    let inf = f.max_abs();
    (f, inf)
}

/// f = b1(Δb2 + b·∇u2) − b2(Δb1 + b·∇u1) assembled independently: Δb from the current
/// (Δb1 = −∂2 j, Δb2 = ∂1 j) and b·∇u in divergence form ∂k(bk u).
pub fn forcing_f_direct(grid: &SpectralGrid, u: &VectorField, b: &VectorField) -> PhysicalField {
    let j = grid.curl_2d(b);
    let lap_b1 = grid.inverse(&grid.d2(&j).scale(-1.0));
    let lap_b2 = grid.inverse(&grid.d1(&j));
    let [b1, b2] = grid.inverse_vector(b);
    let [u1, u2] = grid.inverse_vector(u);
    let div_form = |v: &PhysicalField| {
        let p1 = grid.forward(&b1.mul(v));
        let p2 = grid.forward(&b2.mul(v));
        let mut s = grid.d1(&p1).add(&grid.d2(&p2));
        grid.dealias_in_place(&mut s);
        grid.inverse(&s)
    };
    let a1 = div_form(&u1);
    let a2 = div_form(&u2);
    PhysicalField(
        (0..grid.physical_len())
            .map(|i| b1.0[i] * (lap_b2.0[i] + a2.0[i]) - b2.0[i] * (lap_b1.0[i] + a1.0[i]))
            .collect(),
    )
}

/// ∫ |ω|^{p−2} ω 𝓛ω dx by the grid sum.
pub fn positivity_check(
    grid: &SpectralGrid,
    omega_hat: &SpectralField,
    sym: &DissipationSymbol,
    p: u32,
) -> Result<f64, DiagnosticsError> {
    if p < 2 || p % 2 != 0 {
        return Err(DiagnosticsError::OddP(p));
    }
    let lw = grid.inverse(&grid.apply_symbol(omega_hat, sym)?);
    let w = grid.inverse(omega_hat);
    let a = grid.dx() * grid.dx();
    Ok(a * w.0.iter().zip(&lw.0).map(|(x, l)| x.powi(p as i32 - 1) * l).sum::<f64>())
}

/// Lattice offsets with Δx ≤ |y| ≤ π and their kernel weights Δx²/(|y|² m(|y|)).
fn offsets(grid: &SpectralGrid, profile: &KernelProfile) -> Vec<(i64, i64, f64)> {
    let n = grid.n() as i64;
    let dx = grid.dx();
    let mut out = Vec::new();
    for a in -n / 2..n / 2 {
        for b in -n / 2..n / 2 {
            let r = dx * ((a * a + b * b) as f64).sqrt();
            if r == 0.0 || r > PI {
                continue;
            }
            let m = profile.log_m(r.ln()).exp();
            out.push((a, b, dx * dx / (r * r * m)));
        }
    }
    out
}

struct DContext {
    w: PhysicalField,
    grad_sq: PhysicalField,
    offsets: Vec<(i64, i64, f64)>,
    near: f64,
}

fn d_context(
    grid: &SpectralGrid,
    omega_hat: &SpectralField,
    profile: &KernelProfile,
) -> Result<DContext, DiagnosticsError> {
    let g1 = grid.inverse(&grid.d1(omega_hat));
    let g2 = grid.inverse(&grid.d2(omega_hat));
    Ok(DContext {
        w: grid.inverse(omega_hat),
        grad_sq: PhysicalField(g1.0.iter().zip(&g2.0).map(|(a, b)| a * a + b * b).collect()),
        offsets: offsets(grid, profile),
        // ∫_{|y|<Δx} (∇ω·y)² /(|y|² m) dy = π |∇ω|² ∫_0^Δx r/m dr
        near: PI * profile.near_origin_moment(grid.dx())?,
    })
}

fn d_at(grid: &SpectralGrid, ctx: &DContext, j1: usize, j2: usize) -> f64 {
    let n = grid.n() as i64;
    let x = j2 * grid.n() + j1;
    let wx = ctx.w.0[x];
    let mut sum = ctx.near * ctx.grad_sq.0[x];
    for &(a, b, k) in &ctx.offsets {
        let y1 = (j1 as i64 - a).rem_euclid(n) as usize;
        let y2 = (j2 as i64 - b).rem_euclid(n) as usize;
        let d = wx - ctx.w.0[y2 * grid.n() + y1];
        sum += k * d * d;
    }
    sum
}

/// D(x) = ∫_{|y|≤π} (ω(x) − ω(x−y))² / (|y|² m(|y|)) dy at grid points (j1, j2).
pub fn pointwise_d(
    grid: &SpectralGrid,
    omega_hat: &SpectralField,
    profile: &KernelProfile,
    points: &[(usize, usize)],
) -> Result<Vec<f64>, DiagnosticsError> {
    if points.len() > MAX_D_POINTS {
        return Err(DiagnosticsError::TooManyPoints { max: MAX_D_POINTS, got: points.len() });
    }
    if let Some(&(a, b)) = points.iter().find(|(a, b)| *a >= grid.n() || *b >= grid.n()) {
        return Err(DiagnosticsError::PointOutOfRange(a, b));
    }
    let ctx = d_context(grid, omega_hat, profile)?;
    Ok(points.iter().map(|&(a, b)| d_at(grid, &ctx, a, b)).collect())
}

/// The same quadrature at every grid point (row-major like other real-space fields).
pub fn d_field(
    grid: &SpectralGrid,
    omega_hat: &SpectralField,
    profile: &KernelProfile,
) -> Result<PhysicalField, DiagnosticsError> {
    let ctx = d_context(grid, omega_hat, profile)?;
    let n = grid.n();
    Ok(PhysicalField((0..n * n).map(|x| d_at(grid, &ctx, x % n, x / n)).collect()))
}
