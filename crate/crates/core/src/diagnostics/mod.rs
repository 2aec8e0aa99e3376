//! Norms, budget ledgers and monitors sampled along a run.

mod budget;
mod fields;

pub use budget::{
    bkm_monitor, energy_budget, enstrophy_budget, residual_ratio, BkmReport, EnergyVerdict, EnstrophyVerdict,
    ENERGY_TOL, ENSTROPHY_TOL,
};
pub use fields::{
    d_field, forcing_f, forcing_f_direct, pointwise_d, positivity_check, structural_g, GNorms, MAX_D_POINTS,
};

use std::f64::consts::TAU;
use std::sync::Arc;

use thiserror::Error;

use crate::dynamics::{SimState, Sink, SinkError};
use crate::kernel::{DissipationSymbol, KernelError};
use crate::spectral::{PhysicalField, SpectralError, SpectralField, SpectralGrid};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticsError {
    #[error("need at least {need} samples, got {got}")]
    InsufficientSamples { need: usize, got: usize },
    #[error("positivity exponent must be an even integer >= 2, got {0}")]
    OddP(u32),
    #[error("at most {max} sample points allowed, got {got}")]
    TooManyPoints { max: usize, got: usize },
    #[error("sample point ({0}, {1}) outside the grid")]
    PointOutOfRange(usize, usize),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// ‖f‖ for p = 2, 4, 8, ∞ by grid quadrature.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LpNorms {
    pub p2: f64,
    pub p4: f64,
    pub p8: f64,
    pub inf: f64,
}

impl LpNorms {
    pub fn of(grid: &SpectralGrid, f: &PhysicalField) -> Self {
        let a = grid.dx() * grid.dx();
        let (mut s2, mut s4, mut s8, mut inf) = (0.0, 0.0, 0.0, 0.0f64);
        for &v in &f.0 {
            let q = v * v;
            s2 += q;
            s4 += q * q;
            s8 += (q * q) * (q * q);
            inf = inf.max(v.abs());
        }
        Self { p2: (a * s2).sqrt(), p4: (a * s4).powf(0.25), p8: (a * s8).powf(0.125), inf }
    }
}

/// One time sample of every tracked quantity.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub energy_u: f64,
    pub energy_b: f64,
    pub diss_u_cum: f64,
    pub diss_b_cum: f64,
    pub enstrophy: f64,
    pub current_sq: f64,
    pub grad_j_cum: f64,
    pub lp_omega: LpNorms,
    pub lp_j: LpNorms,
    pub b_inf: f64,
    pub grad_b_lp: f64,
    pub g_l2: f64,
    pub g_inf: f64,
    pub f_inf: f64,
    pub d_total: f64,
    pub bkm_integral: f64,
    pub tail_ratio: f64,
    /// ∫₀ᵗ d_total dτ, carried by the stepper.
    pub d_total_cum: f64,
}

pub const N_COLUMNS: usize = 25;

/// Column names, in serialization order.
pub const CSV_COLUMNS: [&str; N_COLUMNS] = [
    "t",
    "energy_u",
    "energy_b",
    "diss_u_cum",
    "diss_b_cum",
    "enstrophy",
    "current_sq",
    "grad_j_cum",
    "lp_omega_2",
    "lp_omega_4",
    "lp_omega_8",
    "lp_omega_inf",
    "lp_j_2",
    "lp_j_4",
    "lp_j_8",
    "lp_j_inf",
    "b_inf",
    "grad_b_lp",
    "g_l2",
    "g_inf",
    "f_inf",
    "d_total",
    "bkm_integral",
    "tail_ratio",
    "d_total_cum",
];

impl DiagnosticsRecord {
    pub fn values(&self) -> [f64; N_COLUMNS] {
        [
            self.t,
            self.energy_u,
            self.energy_b,
            self.diss_u_cum,
            self.diss_b_cum,
            self.enstrophy,
            self.current_sq,
            self.grad_j_cum,
            self.lp_omega.p2,
            self.lp_omega.p4,
            self.lp_omega.p8,
            self.lp_omega.inf,
            self.lp_j.p2,
            self.lp_j.p4,
            self.lp_j.p8,
            self.lp_j.inf,
            self.b_inf,
            self.grad_b_lp,
            self.g_l2,
            self.g_inf,
            self.f_inf,
            self.d_total,
            self.bkm_integral,
            self.tail_ratio,
            self.d_total_cum,
        ]
    }

    pub fn from_values(v: &[f64; N_COLUMNS]) -> Self {
        let lp = |o: usize| LpNorms { p2: v[o], p4: v[o + 1], p8: v[o + 2], inf: v[o + 3] };
        Self {
            t: v[0],
            energy_u: v[1],
            energy_b: v[2],
            diss_u_cum: v[3],
            diss_b_cum: v[4],
            enstrophy: v[5],
            current_sq: v[6],
            grad_j_cum: v[7],
            lp_omega: lp(8),
            lp_j: lp(12),
            b_inf: v[16],
            grad_b_lp: v[17],
            g_l2: v[18],
            g_inf: v[19],
            f_inf: v[20],
            d_total: v[21],
            bkm_integral: v[22],
            tail_ratio: v[23],
            d_total_cum: v[24],
        }
    }

    pub fn energy(&self) -> f64 {
        self.energy_u + self.energy_b
    }

    pub fn dissipated(&self) -> f64 {
        self.diss_u_cum + self.diss_b_cum
    }
}

/// Fraction of (|ω̂|² + |ĵ|²)/|k|² held by retained modes with max(|k1|, |k2|) above two thirds
/// of the dealiasing cutoff.
pub fn tail_ratio(grid: &SpectralGrid, omega_hat: &SpectralField, j_hat: &SpectralField) -> f64 {
    let cut = (grid.n() / 3) as f64;
    let edge = 2.0 * cut / 3.0;
    let (mut top, mut total) = (0.0, 0.0);
    for i in 0..grid.spectral_len() {
        let ksq = grid.k_sq()[i];
        if ksq == 0.0 || !grid.dealias_mask()[i] {
            continue;
        }
        let e = grid.weights()[i] * (omega_hat.0[i].norm_sqr() + j_hat.0[i].norm_sqr()) / ksq;
        total += e;
        if grid.k1()[i].abs().max(grid.k2()[i].abs()) > edge {
            top += e;
        }
    }
    if total > 0.0 {
        top / total
    } else {
        0.0
    }
}

/// Evaluates records on a fixed grid and symbol.
pub struct Diagnostics {
    grid: Arc<SpectralGrid>,
    sigma: Vec<f64>,
}

impl Diagnostics {
    pub fn new(grid: Arc<SpectralGrid>, sym: &DissipationSymbol) -> Result<Self, DiagnosticsError> {
        let sigma = grid.mode_symbol(sym)?;
        Ok(Self { grid, sigma })
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    /// 2 Σ σ |ω̂|² over the torus, i.e. ∫ D dx.
    pub fn d_total(&self, omega_hat: &SpectralField) -> f64 {
        2.0 * TAU * TAU * self.grid.weighted_sum(omega_hat, |i| self.sigma[i])
    }

    /// Rates of the cumulative columns at a state: 2Σσ|û|², 2‖∇b‖², ‖∇j‖², d_total.
    pub fn ledger_rates(&self, state: &SimState) -> [f64; 4] {
        let g = &*self.grid;
        let c = TAU * TAU;
        let ksq = g.k_sq();
        let du = g.weighted_sum(&state.omega_hat, |i| if ksq[i] == 0.0 { 0.0 } else { self.sigma[i] / ksq[i] });
        [
            2.0 * c * du,
            2.0 * c * g.weighted_sum(&state.j_hat, |_| 1.0),
            c * g.weighted_sum(&state.j_hat, |i| ksq[i]),
            self.d_total(&state.omega_hat),
        ]
    }

    /// Every column except `bkm_integral`, which depends on the sample history.
    pub fn record(&self, state: &SimState) -> Result<DiagnosticsRecord, DiagnosticsError> {
        let g = &*self.grid;
        let c = TAU * TAU;
        let ksq = g.k_sq();
        let inv_k = |i: usize| if ksq[i] == 0.0 { 0.0 } else { 1.0 / ksq[i] };
        let (w, j) = (&state.omega_hat, &state.j_hat);
        let u = g.biot_savart(w)?;
        let b = g.biot_savart(j)?;

        let wp = g.inverse(w);
        let jp = g.inverse(j);
        let [b1, b2] = g.inverse_vector(&b);
        let b_inf = b1.0.iter().zip(&b2.0).fold(0.0f64, |m, (x, y)| m.max(x.hypot(*y)));

        let grads: Vec<PhysicalField> =
            [&b.x1, &b.x2].iter().flat_map(|bc| [g.inverse(&g.d1(bc)), g.inverse(&g.d2(bc))]).collect();
        let area = g.dx() * g.dx();
        let s4: f64 = (0..g.physical_len())
            .map(|i| {
                let f2: f64 = grads.iter().map(|d| d.0[i] * d.0[i]).sum();
                f2 * f2
            })
            .sum();

        let (_, gn) = structural_g(g, &u, &b);
        let (_, f_inf) = forcing_f(g, &u, &b);

        Ok(DiagnosticsRecord {
            t: state.t,
            energy_u: c * g.weighted_sum(w, inv_k),
            energy_b: c * g.weighted_sum(j, inv_k),
            diss_u_cum: state.ledger.diss_u,
            diss_b_cum: state.ledger.diss_b,
            enstrophy: g.l2_sq(w),
            current_sq: g.l2_sq(j),
            grad_j_cum: state.ledger.grad_j,
            lp_omega: LpNorms::of(g, &wp),
            lp_j: LpNorms::of(g, &jp),
            b_inf,
            grad_b_lp: (area * s4).powf(0.25),
            g_l2: gn.l2,
            g_inf: gn.inf,
            f_inf,
            d_total: self.d_total(w),
            bkm_integral: 0.0,
            tail_ratio: tail_ratio(g, w, j),
            d_total_cum: state.ledger.diss_w,
        })
    }
}

/// Fills `bkm_integral` by the trapezoid rule over the sample times.
pub fn accumulate_bkm(records: &mut [DiagnosticsRecord]) {
    let mut acc = 0.0;
    for i in 0..records.len() {
        if i > 0 {
            let (a, b) = (&records[i - 1], &records[i]);
            acc += 0.5 * (b.t - a.t) * (a.lp_omega.inf + b.lp_omega.inf);
        }
        records[i].bkm_integral = acc;
    }
}

/// Sink that evaluates a record at every sample it is handed.
pub struct Recorder {
    diag: Diagnostics,
    records: Vec<DiagnosticsRecord>,
}

impl Recorder {
    pub fn new(diag: Diagnostics) -> Self {
        Self { diag, records: Vec::new() }
    }

    pub fn records(&self) -> &[DiagnosticsRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<DiagnosticsRecord> {
        self.records
    }
}

impl Sink for Recorder {
    fn sample(&mut self, _step: u64, state: &SimState) -> Result<(), SinkError> {
        let mut r = self.diag.record(state)?;
        if let Some(p) = self.records.last() {
            r.bkm_integral = p.bkm_integral + 0.5 * (r.t - p.t) * (p.lp_omega.inf + r.lp_omega.inf);
        }
        self.records.push(r);
        Ok(())
    }
}
