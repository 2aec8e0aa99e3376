//! Vorticity–current right-hand side and the integrating-factor RK4 stepper.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use thiserror::Error;

use crate::diagnostics::tail_ratio;
use crate::kernel::DissipationSymbol;
use crate::spectral::{PhysicalField, SpectralError, SpectralField, SpectralGrid, VectorField};

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("step size or fields invalid at t = {t}: {reason}")]
    CflViolation { t: f64, reason: &'static str },
    #[error("blow-up at t = {}: max|omega| = {}, tail ratio = {}", .0.t, .0.omega_inf, .0.tail_ratio)]
    Blowup(BlowupReport),
    #[error("t_end = {t_end} precedes the state time {t}")]
    InvalidHorizon { t_end: f64, t: f64 },
    #[error("output sink failed: {0}")]
    Sink(String),
    #[error("invalid stepper configuration: {0}")]
    InvalidConfig(String),
}

/// Last valid state summary emitted when a run aborts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlowupReport {
    pub t: f64,
    pub omega_inf: f64,
    pub tail_ratio: f64,
}

/// Time integrals carried along with the fields.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Ledger {
    /// ∫ 2 Σ σ |û|² dτ
    pub diss_u: f64,
    /// 2 ∫ ‖∇b‖² dτ
    pub diss_b: f64,
    /// ∫ ‖∇j‖² dτ
    pub grad_j: f64,
    /// ∫ 2 Σ σ |ω̂|² dτ
    pub diss_w: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: f64,
    pub omega_hat: SpectralField,
    pub j_hat: SpectralField,
    pub ledger: Ledger,
}

impl SimState {
    /// Fresh state at t = 0 from mean-zero spectral vorticity and current.
    pub fn new(grid: &SpectralGrid, omega_hat: SpectralField, j_hat: SpectralField) -> Result<Self, SpectralError> {
        grid.check_len(&omega_hat)?;
        grid.check_len(&j_hat)?;
        for f in [&omega_hat, &j_hat] {
            grid.biot_savart(f)?;
        }
        let mut s = Self { t: 0.0, omega_hat, j_hat, ledger: Ledger::default() };
        s.omega_hat.0[0] = Complex64::new(0.0, 0.0);
        s.j_hat.0[0] = Complex64::new(0.0, 0.0);
        Ok(s)
    }

    /// Initial state from velocity and magnetic fields through their curls.
    pub fn from_fields(grid: &SpectralGrid, u: &VectorField, b: &VectorField) -> Result<Self, SpectralError> {
        Self::new(grid, grid.curl_2d(u), grid.curl_2d(b))
    }
}

/// Switches for isolating parts of the system in tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Hooks {
    pub nonlinear: bool,
    pub t_term: bool,
    pub dissipation: bool,
    pub resistive: bool,
    pub dealias: bool,
}

impl Default for Hooks {
    fn default() -> Self {
        Self { nonlinear: true, t_term: true, dissipation: true, resistive: true, dealias: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    #[default]
    IfRk4,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepperConfig {
    pub cfl: f64,
    pub dt_max: f64,
    pub scheme: Scheme,
    pub hooks: Hooks,
}

impl Default for StepperConfig {
    fn default() -> Self {
        Self { cfl: 0.5, dt_max: 0.01, scheme: Scheme::IfRk4, hooks: Hooks::default() }
    }
}

/// u = BS(ω), b = BS(j).
pub fn reconstruct(grid: &SpectralGrid, state: &SimState) -> Result<(VectorField, VectorField), SpectralError> {
    Ok((grid.biot_savart(&state.omega_hat)?, grid.biot_savart(&state.j_hat)?))
}

/// T(∇u, ∇b) = 2 ∂1b1 (∂1u2 + ∂2u1) + 2 ∂2u2 (∂1b2 + ∂2b1), dealiased.
pub fn t_term(grid: &SpectralGrid, u: &VectorField, b: &VectorField) -> SpectralField {
    let mut t = grid.forward(&t_term_physical(grid, u, b));
    grid.dealias_in_place(&mut t);
    t
}

fn t_term_physical(grid: &SpectralGrid, u: &VectorField, b: &VectorField) -> PhysicalField {
    let d1b1 = grid.inverse(&grid.d1(&b.x1));
    let d2u2 = grid.inverse(&grid.d2(&u.x2));
    let su = grid.inverse(&grid.d1(&u.x2).add(&grid.d2(&u.x1)));
    let sb = grid.inverse(&grid.d1(&b.x2).add(&grid.d2(&b.x1)));
    PhysicalField((0..grid.physical_len()).map(|i| 2.0 * d1b1.0[i] * su.0[i] + 2.0 * d2u2.0[i] * sb.0[i]).collect())
}

pub struct Stepper {
    grid: Arc<SpectralGrid>,
    cfg: StepperConfig,
    sigma: Vec<f64>,
    lam_w: Vec<f64>,
    lam_j: Vec<f64>,
}

/// One nonlinear evaluation plus the sup norms of u and b it needed anyway.
struct Eval {
    dw: SpectralField,
    dj: SpectralField,
    u_inf: f64,
    b_inf: f64,
}

impl Stepper {
    pub fn new(grid: Arc<SpectralGrid>, sym: &DissipationSymbol, cfg: StepperConfig) -> Result<Self, DynamicsError> {
        if !(cfg.cfl > 0.0 && cfg.cfl <= 1.0) {
            return Err(DynamicsError::InvalidConfig(format!("cfl must lie in (0, 1], got {}", cfg.cfl)));
        }
        if !(cfg.dt_max > 0.0 && cfg.dt_max.is_finite()) {
            return Err(DynamicsError::InvalidConfig(format!("dt_max must be positive, got {}", cfg.dt_max)));
        }
        let sigma = grid.mode_symbol(sym)?;
        let lam_w = if cfg.hooks.dissipation { sigma.clone() } else { vec![0.0; sigma.len()] };
        let lam_j = if cfg.hooks.resistive { grid.k_sq().to_vec() } else { vec![0.0; sigma.len()] };
        Ok(Self { grid, cfg, sigma, lam_w, lam_j })
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn grid_arc(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    pub fn config(&self) -> &StepperConfig {
        &self.cfg
    }

    /// σ(|k|) per stored coefficient, independent of hooks.
    pub fn mode_sigma(&self) -> &[f64] {
        &self.sigma
    }

    /// Nonlinear tendencies (the dissipative terms are left to the integrating factor).
    pub fn rhs(&self, omega_hat: &SpectralField, j_hat: &SpectralField) -> (SpectralField, SpectralField) {
        let e = self.eval(omega_hat, j_hat);
        (e.dw, e.dj)
    }

    fn eval(&self, w: &SpectralField, j: &SpectralField) -> Eval {
        let g = &*self.grid;
        let u = g.biot_savart_unchecked(w);
        let b = g.biot_savart_unchecked(j);
        let [u1, u2] = g.inverse_vector(&u);
        let [b1, b2] = g.inverse_vector(&b);
        let mag =
            |a: &PhysicalField, c: &PhysicalField| a.0.iter().zip(&c.0).fold(0.0f64, |m, (x, y)| m.max(x.hypot(*y)));
        let u_inf = mag(&u1, &u2);
        let b_inf = mag(&b1, &b2);
        if !self.cfg.hooks.nonlinear {
            return Eval { dw: g.zeros(), dj: g.zeros(), u_inf, b_inf };
        }
        let wp = g.inverse(w);
        let jp = g.inverse(j);
        let np = g.physical_len();
        let mut q1 = vec![0.0; np];
        let mut q2 = vec![0.0; np];
        let mut r1 = vec![0.0; np];
        let mut r2 = vec![0.0; np];
        for i in 0..np {
            q1[i] = b1.0[i] * jp.0[i] - u1.0[i] * wp.0[i];
            q2[i] = b2.0[i] * jp.0[i] - u2.0[i] * wp.0[i];
            r1[i] = b1.0[i] * wp.0[i] - u1.0[i] * jp.0[i];
            r2[i] = b2.0[i] * wp.0[i] - u2.0[i] * jp.0[i];
        }
        let q1 = g.forward(&PhysicalField(q1));
        let q2 = g.forward(&PhysicalField(q2));
        let r1 = g.forward(&PhysicalField(r1));
        let r2 = g.forward(&PhysicalField(r2));
        let t = if self.cfg.hooks.t_term { Some(g.forward(&t_term_physical(g, &u, &b))) } else { None };
        let (k1, k2) = (g.k1(), g.k2());
        let ik = |i: usize, a: &SpectralField, c: &SpectralField| {
            Complex64::new(0.0, 1.0) * (k1[i] * a.0[i] + k2[i] * c.0[i])
        };
        let mut dw = SpectralField((0..g.spectral_len()).map(|i| ik(i, &q1, &q2)).collect());
        let mut dj = SpectralField((0..g.spectral_len()).map(|i| ik(i, &r1, &r2)).collect());
        if let Some(t) = t {
            for (d, t) in dj.0.iter_mut().zip(&t.0) {
                *d += t;
            }
        }
        if self.cfg.hooks.dealias {
            g.dealias_in_place(&mut dw);
            g.dealias_in_place(&mut dj);
        }
        Eval { dw, dj, u_inf, b_inf }
    }

    /// Instantaneous rates of the three ledger integrals.
    fn ledger_rates(&self, w: &SpectralField, j: &SpectralField) -> [f64; 4] {
        let g = &*self.grid;
        let ksq = g.k_sq();
        let c = std::f64::consts::TAU.powi(2);
        let du = g.weighted_sum(w, |i| if ksq[i] == 0.0 { 0.0 } else { self.lam_w[i] / ksq[i] });
        let db = if self.cfg.hooks.resistive { g.weighted_sum(j, |_| 1.0) } else { 0.0 };
        let gj = g.weighted_sum(j, |i| ksq[i]);
        let dw = g.weighted_sum(w, |i| self.lam_w[i]);
        [2.0 * c * du, 2.0 * c * db, c * gj, 2.0 * c * dw]
    }

    fn dt_from(&self, u_inf: f64, b_inf: f64, t: f64) -> Result<f64, DynamicsError> {
        if !(u_inf.is_finite() && b_inf.is_finite()) {
            return Err(DynamicsError::CflViolation { t, reason: "non-finite velocity or magnetic field" });
        }
        let dt = self.cfg.dt_max.min(self.cfg.cfl * self.grid.dx() / u_inf.max(b_inf).max(1e-12));
        if dt > 0.0 && dt.is_finite() {
            Ok(dt)
        } else {
            Err(DynamicsError::CflViolation { t, reason: "non-positive step" })
        }
    }

    /// dt the CFL rule would pick for this state.
    pub fn choose_dt(&self, s: &SimState) -> Result<f64, DynamicsError> {
        let e = self.eval(&s.omega_hat, &s.j_hat);
        self.dt_from(e.u_inf, e.b_inf, s.t)
    }

    /// One step with the CFL-chosen dt, capped so that t does not pass `t_cap`.
    pub fn step(&self, s: &SimState) -> Result<SimState, DynamicsError> {
        self.step_capped(s, f64::INFINITY)
    }

    pub fn step_capped(&self, s: &SimState, t_cap: f64) -> Result<SimState, DynamicsError> {
        let a = self.eval(&s.omega_hat, &s.j_hat);
        let mut dt = self.dt_from(a.u_inf, a.b_inf, s.t)?;
        let remaining = t_cap - s.t;
        let land = dt >= remaining * (1.0 - 1e-12);
        if land {
            dt = remaining;
        }
        let mut next = self.advance(s, a, dt)?;
        if land {
            next.t = t_cap;
        }
        Ok(next)
    }

    /// One step of prescribed size.
    pub fn step_dt(&self, s: &SimState, dt: f64) -> Result<SimState, DynamicsError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(DynamicsError::CflViolation { t: s.t, reason: "non-positive step" });
        }
        let a = self.eval(&s.omega_hat, &s.j_hat);
        self.advance(s, a, dt)
    }

    fn advance(&self, s: &SimState, a: Eval, dt: f64) -> Result<SimState, DynamicsError> {
        let len = self.grid.spectral_len();
        let factors = |lam: &[f64]| -> (Vec<f64>, Vec<f64>) {
            (lam.iter().map(|l| (-l * dt).exp()).collect(), lam.iter().map(|l| (-0.5 * l * dt).exp()).collect())
        };
        let (ew, ehw) = factors(&self.lam_w);
        let (ej, ehj) = factors(&self.lam_j);
        let h2 = 0.5 * dt;
        let (w0, j0) = (&s.omega_hat.0, &s.j_hat.0);

        let r0 = self.ledger_rates(&s.omega_hat, &s.j_hat);
        let wa = SpectralField((0..len).map(|i| ehw[i] * (w0[i] + h2 * a.dw.0[i])).collect());
        let ja = SpectralField((0..len).map(|i| ehj[i] * (j0[i] + h2 * a.dj.0[i])).collect());
        let ra = self.ledger_rates(&wa, &ja);
        let b = self.eval(&wa, &ja);
        let wb = SpectralField((0..len).map(|i| ehw[i] * w0[i] + h2 * b.dw.0[i]).collect());
        let jb = SpectralField((0..len).map(|i| ehj[i] * j0[i] + h2 * b.dj.0[i]).collect());
        let rb = self.ledger_rates(&wb, &jb);
        let c = self.eval(&wb, &jb);
        let wc = SpectralField((0..len).map(|i| ew[i] * w0[i] + dt * ehw[i] * c.dw.0[i]).collect());
        let jc = SpectralField((0..len).map(|i| ej[i] * j0[i] + dt * ehj[i] * c.dj.0[i]).collect());
        let rc = self.ledger_rates(&wc, &jc);
        let d = self.eval(&wc, &jc);

        let h6 = dt / 6.0;
        let combine = |v0: &[Complex64],
                       e: &[f64],
                       eh: &[f64],
                       ka: &SpectralField,
                       kb: &SpectralField,
                       kc: &SpectralField,
                       kd: &SpectralField| {
            let mut out: Vec<Complex64> = (0..len)
                .map(|i| e[i] * v0[i] + h6 * (e[i] * ka.0[i] + 2.0 * eh[i] * (kb.0[i] + kc.0[i]) + kd.0[i]))
                .collect();
            out[0] = Complex64::new(0.0, 0.0);
            SpectralField(out)
        };
        let w1 = combine(w0, &ew, &ehw, &a.dw, &b.dw, &c.dw, &d.dw);
        let j1 = combine(j0, &ej, &ehj, &a.dj, &b.dj, &c.dj, &d.dj);
        let mut ledger = s.ledger;
        ledger.diss_u += h6 * (r0[0] + 2.0 * ra[0] + 2.0 * rb[0] + rc[0]);
        ledger.diss_b += h6 * (r0[1] + 2.0 * ra[1] + 2.0 * rb[1] + rc[1]);
        ledger.grad_j += h6 * (r0[2] + 2.0 * ra[2] + 2.0 * rb[2] + rc[2]);
        ledger.diss_w += h6 * (r0[3] + 2.0 * ra[3] + 2.0 * rb[3] + rc[3]);

        let finite = w1.0.iter().chain(&j1.0).all(|c| c.re.is_finite() && c.im.is_finite())
            && [ledger.diss_u, ledger.diss_b, ledger.grad_j, ledger.diss_w].iter().all(|v| v.is_finite());
        if !finite {
            return Err(DynamicsError::CflViolation { t: s.t + dt, reason: "non-finite field" });
        }
        Ok(SimState { t: s.t + dt, omega_hat: w1, j_hat: j1, ledger })
    }

    /// Steps to `t_end`, feeding every `sample_every`-th state (and the first and last) to the sinks.
    pub fn run(
        &self,
        initial: SimState,
        t_end: f64,
        sample_every: u64,
        sinks: &mut [&mut dyn Sink],
    ) -> Result<RunOutcome, DynamicsError> {
        if !(t_end >= initial.t) {
            return Err(DynamicsError::InvalidHorizon { t_end, t: initial.t });
        }
        if sample_every == 0 {
            return Err(DynamicsError::InvalidConfig("sample_every must be at least 1".into()));
        }
        if t_end == initial.t {
            return Ok(RunOutcome { state: initial, steps: 0 });
        }
        let emit = |sinks: &mut [&mut dyn Sink], step: u64, s: &SimState| -> Result<(), DynamicsError> {
            for sink in sinks.iter_mut() {
                sink.sample(step, s).map_err(|e| DynamicsError::Sink(e.to_string()))?;
            }
            Ok(())
        };
        emit(sinks, 0, &initial)?;
        let mut state = initial;
        let mut steps = 0u64;
        while state.t < t_end {
            let next = match self.step_capped(&state, t_end) {
                Ok(n) => n,
                Err(DynamicsError::CflViolation { .. }) => {
                    return Err(DynamicsError::Blowup(self.blowup_report(&state)))
                }
                Err(e) => return Err(e),
            };
            state = next;
            steps += 1;
            if steps % sample_every == 0 || state.t >= t_end {
                emit(sinks, steps, &state)?;
            }
        }
        Ok(RunOutcome { state, steps })
    }

    fn blowup_report(&self, s: &SimState) -> BlowupReport {
        BlowupReport {
            t: s.t,
            omega_inf: self.grid.inverse(&s.omega_hat).max_abs(),
            tail_ratio: tail_ratio(&self.grid, &s.omega_hat, &s.j_hat),
        }
    }
}

pub struct RunOutcome {
    pub state: SimState,
    pub steps: u64,
}

pub type SinkError = Box<dyn std::error::Error + Send + Sync>;

/// Receives read-only states during a run.
pub trait Sink {
    fn sample(&mut self, step: u64, state: &SimState) -> Result<(), SinkError>;
}

impl<F: FnMut(u64, &SimState) -> Result<(), SinkError>> Sink for F {
    fn sample(&mut self, step: u64, state: &SimState) -> Result<(), SinkError> {
        self(step, state)
    }
}
