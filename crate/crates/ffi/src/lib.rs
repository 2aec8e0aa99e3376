//! C interface to the gmhd solver.
//!
//! Every function returns a [`GmhdStatus`]; on failure the message is kept per thread and can be
//! read with [`gmhd_last_error_message`]. Handles are opaque and must be released with the
//! matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;
use std::sync::Arc;

use gmhd::config::{parse_config_str, ConfigError};
use gmhd::diagnostics::{Diagnostics, CSV_COLUMNS, N_COLUMNS};
use gmhd::dynamics::{DynamicsError, SimState, Stepper};
use gmhd::kernel::{
    closed_form_fractional_symbol, compute_symbol, validate_profile, DissipationSymbol, KernelError, KernelProfile,
    Verdict,
};
use gmhd::spectral::SpectralGrid;

/// Number of values written by [`gmhd_simulation_diagnostics`].
pub const GMHD_DIAGNOSTICS_COLUMNS: usize = 25;

const _: () = assert!(GMHD_DIAGNOSTICS_COLUMNS == N_COLUMNS);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GmhdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Kernel = 3,
    Config = 4,
    Blowup = 5,
    BufferTooSmall = 6,
    Internal = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GmhdVerdict {
    Admissible = 0,
    WeakOnly = 1,
    Rejected = 2,
}

/// Result of [`gmhd_profile_validate`]. `doubling_constant` is negative when absent and
/// `dini_integral` is +inf when divergent.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct GmhdValidationReport {
    pub monotone_ok: bool,
    pub doubling_constant: f64,
    pub dini_integral: f64,
    pub limit_zero_ok: bool,
    pub verdict: GmhdVerdict,
}

pub struct GmhdProfile(KernelProfile);

pub struct GmhdSymbol(DissipationSymbol);

pub struct GmhdSimulation {
    grid: Arc<SpectralGrid>,
    stepper: Stepper,
    diag: Diagnostics,
    state: SimState,
    omega_inf: f64,
    bkm: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn fail(status: GmhdStatus, msg: impl ToString) -> GmhdStatus {
    set_error(msg.to_string());
    status
}

fn kernel_status(e: KernelError) -> GmhdStatus {
    fail(GmhdStatus::Kernel, e)
}

fn guard(f: impl FnOnce() -> GmhdStatus) -> GmhdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(GmhdStatus::Ok) => {
            set_error(String::new());
            GmhdStatus::Ok
        }
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(GmhdStatus::Internal, msg)
        }
    }
}

macro_rules! deref {
    ($p:expr) => {
        match unsafe { $p.as_ref() } {
            Some(v) => v,
            None => return fail(GmhdStatus::NullPointer, concat!(stringify!($p), " is null")),
        }
    };
}

macro_rules! deref_mut {
    ($p:expr) => {
        match unsafe { $p.as_mut() } {
            Some(v) => v,
            None => return fail(GmhdStatus::NullPointer, concat!(stringify!($p), " is null")),
        }
    };
}

unsafe fn input<'a>(p: *const f64, len: usize) -> Option<&'a [f64]> {
    if len == 0 {
        Some(&[])
    } else if p.is_null() {
        None
    } else {
        Some(slice::from_raw_parts(p, len))
    }
}

fn boxed<T>(out: *mut *mut T, v: T) -> GmhdStatus {
    unsafe { *out = Box::into_raw(Box::new(v)) };
    GmhdStatus::Ok
}

/// Copies the last error message of this thread, NUL terminated and truncated to `cap` bytes.
/// Returns the full message length excluding the terminator.
///
/// # Safety
/// `buf` must be null or point to `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn gmhd_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        if !buf.is_null() && cap > 0 {
            let n = e.len().min(cap - 1);
            std::ptr::copy_nonoverlapping(e.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        e.len()
    })
}

/// Static, NUL-terminated name of diagnostics column `index`, or null when out of range.
#[no_mangle]
pub extern "C" fn gmhd_diagnostics_column_name(index: usize) -> *const c_char {
    static NAMES: [&[u8]; N_COLUMNS] = [
        b"t\0",
        b"energy_u\0",
        b"energy_b\0",
        b"diss_u_cum\0",
        b"diss_b_cum\0",
        b"enstrophy\0",
        b"current_sq\0",
        b"grad_j_cum\0",
        b"lp_omega_2\0",
        b"lp_omega_4\0",
        b"lp_omega_8\0",
        b"lp_omega_inf\0",
        b"lp_j_2\0",
        b"lp_j_4\0",
        b"lp_j_8\0",
        b"lp_j_inf\0",
        b"b_inf\0",
        b"grad_b_lp\0",
        b"g_l2\0",
        b"g_inf\0",
        b"f_inf\0",
        b"d_total\0",
        b"bkm_integral\0",
        b"tail_ratio\0",
        b"d_total_cum\0",
    ];
    debug_assert!(NAMES.iter().zip(CSV_COLUMNS).all(|(a, b)| &a[..a.len() - 1] == b.as_bytes()));
    NAMES.get(index).map_or(std::ptr::null(), |c| c.as_ptr() as *const c_char)
}

/// m(r) = r^{2α}.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn gmhd_profile_power_law(
    alpha: f64,
    override_weak: bool,
    out: *mut *mut GmhdProfile,
) -> GmhdStatus {
    guard(|| {
        if out.is_null() {
            return fail(GmhdStatus::NullPointer, "out is null");
        }
        match KernelProfile::power_law(alpha, override_weak) {
            Ok(p) => boxed(out, GmhdProfile(p)),
            Err(e) => kernel_status(e),
        }
    })
}

/// m(r) = [log(e + 1/r)]^{−(1+eps1)} [1 + log(1 + r)]^{1+eps2}.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn gmhd_profile_log_weak(
    eps1: f64,
    eps2: f64,
    override_weak: bool,
    out: *mut *mut GmhdProfile,
) -> GmhdStatus {
    guard(|| {
        if out.is_null() {
            return fail(GmhdStatus::NullPointer, "out is null");
        }
        match KernelProfile::log_weak(eps1, eps2, override_weak) {
            Ok(p) => boxed(out, GmhdProfile(p)),
            Err(e) => kernel_status(e),
        }
    })
}

/// Profile interpolated log-log through `len` samples (radii strictly increasing, values positive).
///
/// # Safety
/// `radii` and `values` must point to `len` readable doubles; `out` to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn gmhd_profile_tabulated(
    radii: *const f64,
    values: *const f64,
    len: usize,
    override_weak: bool,
    out: *mut *mut GmhdProfile,
) -> GmhdStatus {
    guard(|| {
        let (Some(r), Some(v)) = (input(radii, len), input(values, len)) else {
            return fail(GmhdStatus::NullPointer, "radii or values is null");
        };
        if out.is_null() {
            return fail(GmhdStatus::NullPointer, "out is null");
        }
        match KernelProfile::tabulated(r.to_vec(), v.to_vec(), override_weak) {
            Ok(p) => boxed(out, GmhdProfile(p)),
            Err(e) => kernel_status(e),
        }
    })
}

/// # Safety
/// `p` must be null or a handle from a `gmhd_profile_*` constructor, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gmhd_profile_free(p: *mut GmhdProfile) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `p` must be a live profile handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gmhd_profile_evaluate(p: *const GmhdProfile, r: f64, out: *mut f64) -> GmhdStatus {
    guard(|| {
        let p = deref!(p);
        let out = deref_mut!(out);
        match p.0.evaluate_m(r) {
            Ok(v) => {
                *out = v;
                GmhdStatus::Ok
            }
            Err(e) => kernel_status(e),
        }
    })
}

/// # Safety
/// `p` must be a live profile handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gmhd_profile_validate(p: *const GmhdProfile, out: *mut GmhdValidationReport) -> GmhdStatus {
    guard(|| {
        let p = deref!(p);
        let out = deref_mut!(out);
        match validate_profile(&p.0) {
            Ok(r) => {
                *out = GmhdValidationReport {
                    monotone_ok: r.monotone_ok,
                    doubling_constant: r.doubling_constant.unwrap_or(-1.0),
                    dini_integral: r.dini_integral,
                    limit_zero_ok: r.limit_zero_ok,
                    verdict: match r.verdict {
                        Verdict::Admissible => GmhdVerdict::Admissible,
                        Verdict::WeakOnly => GmhdVerdict::WeakOnly,
                        Verdict::Rejected => GmhdVerdict::Rejected,
                    },
                };
                GmhdStatus::Ok
            }
            Err(e) => kernel_status(e),
        }
    })
}

/// σ at each of the `len` wavenumbers; fails with `GMHD_STATUS_KERNEL` for rejected profiles.
///
/// # Safety
/// `p` must be a live profile handle, `kappas` must point to `len` doubles, `out` to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn gmhd_symbol_compute(
    p: *const GmhdProfile,
    kappas: *const f64,
    len: usize,
    out: *mut *mut GmhdSymbol,
) -> GmhdStatus {
    guard(|| {
        let p = deref!(p);
        let Some(k) = input(kappas, len) else {
            return fail(GmhdStatus::NullPointer, "kappas is null");
        };
        if out.is_null() {
            return fail(GmhdStatus::NullPointer, "out is null");
        }
        match compute_symbol(&p.0, k) {
            Ok(s) => boxed(out, GmhdSymbol(s)),
            Err(e) => kernel_status(e),
        }
    })
}

/// Number of distinct wavenumbers held by the symbol.
///
/// # Safety
/// `s` must be a live symbol handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gmhd_symbol_len(s: *const GmhdSymbol, out: *mut usize) -> GmhdStatus {
    guard(|| {
        *deref_mut!(out) = deref!(s).0.kappas().len();
        GmhdStatus::Ok
    })
}

/// σ(kappa) for a wavenumber the symbol was computed at.
///
/// # Safety
/// `s` must be a live symbol handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gmhd_symbol_get(s: *const GmhdSymbol, kappa: f64, out: *mut f64) -> GmhdStatus {
    guard(|| {
        let s = deref!(s);
        let out = deref_mut!(out);
        match s.0.get(kappa) {
            Some(v) => {
                *out = v;
                GmhdStatus::Ok
            }
            None => fail(GmhdStatus::InvalidArgument, format!("no value at kappa = {kappa}")),
        }
    })
}

/// Copies the sorted wavenumbers and their σ into two arrays of capacity `cap`.
///
/// # Safety
/// `s` must be a live symbol handle; `kappas` and `sigmas` must each hold `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn gmhd_symbol_values(
    s: *const GmhdSymbol,
    kappas: *mut f64,
    sigmas: *mut f64,
    cap: usize,
) -> GmhdStatus {
    guard(|| {
        let s = deref!(s);
        let n = s.0.kappas().len();
        if cap < n {
            return fail(GmhdStatus::BufferTooSmall, format!("need {n} slots, got {cap}"));
        }
        if n > 0 && (kappas.is_null() || sigmas.is_null()) {
            return fail(GmhdStatus::NullPointer, "output array is null");
        }
        for (i, (k, v)) in s.0.iter().enumerate() {
            *kappas.add(i) = k;
            *sigmas.add(i) = v;
        }
        GmhdStatus::Ok
    })
}

/// # Safety
/// `s` must be null or a handle from [`gmhd_symbol_compute`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gmhd_symbol_free(s: *mut GmhdSymbol) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// C(α) κ^{2α}, the exact symbol of the power-law profile.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gmhd_closed_form_symbol(alpha: f64, kappa: f64, out: *mut f64) -> GmhdStatus {
    guard(|| {
        let out = deref_mut!(out);
        match closed_form_fractional_symbol(alpha, kappa) {
            Ok(v) => {
                *out = v;
                GmhdStatus::Ok
            }
            Err(e) => kernel_status(e),
        }
    })
}

/// Builds a simulation at t = 0 from a TOML run configuration (the same format the CLI reads).
///
/// # Safety
/// `config_toml` must be a NUL-terminated UTF-8 string and `out` a handle slot.
#[no_mangle]
pub unsafe extern "C" fn gmhd_simulation_new(config_toml: *const c_char, out: *mut *mut GmhdSimulation) -> GmhdStatus {
    guard(|| {
        if config_toml.is_null() || out.is_null() {
            return fail(GmhdStatus::NullPointer, "config_toml or out is null");
        }
        let Ok(text) = CStr::from_ptr(config_toml).to_str() else {
            return fail(GmhdStatus::InvalidArgument, "config is not UTF-8");
        };
        let cfg = match parse_config_str(text) {
            Ok(c) => c,
            Err(ConfigError::Kernel(e)) => return kernel_status(e),
            Err(e) => return fail(GmhdStatus::Config, e),
        };
        let built = gmhd::cli::prepare(&cfg).and_then(|(grid, sym, state)| {
            let stepper = Stepper::new(grid.clone(), &sym, cfg.stepper_config())?;
            let diag = Diagnostics::new(grid.clone(), &sym)?;
            let omega_inf = grid.inverse(&state.omega_hat).max_abs();
            Ok(GmhdSimulation { grid, stepper, diag, state, omega_inf, bkm: 0.0 })
        });
        match built {
            Ok(sim) => boxed(out, sim),
            Err(gmhd::Error::Kernel(e)) => kernel_status(e),
            Err(e) => fail(GmhdStatus::Config, e),
        }
    })
}

/// # Safety
/// `s` must be null or a handle from [`gmhd_simulation_new`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gmhd_simulation_free(s: *mut GmhdSimulation) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

impl GmhdSimulation {
    fn step_to(&mut self, t_cap: f64) -> GmhdStatus {
        match self.stepper.step_capped(&self.state, t_cap) {
            Ok(next) => {
                let w = self.grid.inverse(&next.omega_hat).max_abs();
                self.bkm += 0.5 * (next.t - self.state.t) * (self.omega_inf + w);
                self.omega_inf = w;
                self.state = next;
                GmhdStatus::Ok
            }
            Err(DynamicsError::CflViolation { t, reason }) => {
                fail(GmhdStatus::Blowup, format!("blow-up after t = {}: {reason} at t = {t}", self.state.t))
            }
            Err(e) => fail(GmhdStatus::Internal, e),
        }
    }
}

/// One CFL-limited step. On `GMHD_STATUS_BLOWUP` the state is left at the last valid time.
///
/// # Safety
/// `s` must be a live simulation handle.
#[no_mangle]
pub unsafe extern "C" fn gmhd_simulation_step(s: *mut GmhdSimulation) -> GmhdStatus {
    guard(|| deref_mut!(s).step_to(f64::INFINITY))
}

/// Steps until the time reaches `t_end` exactly; the number of steps taken goes to `steps` if non-null.
///
/// # Safety
/// `s` must be a live simulation handle; `steps` null or writable.
#[no_mangle]
pub unsafe extern "C" fn gmhd_simulation_advance(s: *mut GmhdSimulation, t_end: f64, steps: *mut u64) -> GmhdStatus {
    guard(|| {
        let sim = deref_mut!(s);
        if !(t_end.is_finite() && t_end >= sim.state.t) {
            return fail(GmhdStatus::InvalidArgument, format!("t_end = {t_end} precedes t = {}", sim.state.t));
        }
        let mut n = 0u64;
        let mut status = GmhdStatus::Ok;
        while sim.state.t < t_end {
            status = sim.step_to(t_end);
            if status != GmhdStatus::Ok {
                break;
            }
            n += 1;
        }
        if let Some(out) = steps.as_mut() {
            *out = n;
        }
        status
    })
}

/// # Safety
/// `s` must be a live simulation handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gmhd_simulation_time(s: *const GmhdSimulation, out: *mut f64) -> GmhdStatus {
    guard(|| {
        *deref_mut!(out) = deref!(s).state.t;
        GmhdStatus::Ok
    })
}

/// Grid points per side.
///
/// # Safety
/// `s` must be a live simulation handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gmhd_simulation_grid_size(s: *const GmhdSimulation, out: *mut usize) -> GmhdStatus {
    guard(|| {
        *deref_mut!(out) = deref!(s).grid.n();
        GmhdStatus::Ok
    })
}

/// Writes the current diagnostics record, in CSV column order, into `GMHD_DIAGNOSTICS_COLUMNS`
/// doubles. `bkm_integral` is accumulated over every step taken through this handle.
///
/// # Safety
/// `s` must be a live simulation handle; `out` must hold `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn gmhd_simulation_diagnostics(
    s: *const GmhdSimulation,
    out: *mut f64,
    cap: usize,
) -> GmhdStatus {
    guard(|| {
        let sim = deref!(s);
        if cap < N_COLUMNS {
            return fail(GmhdStatus::BufferTooSmall, format!("need {N_COLUMNS} slots, got {cap}"));
        }
        if out.is_null() {
            return fail(GmhdStatus::NullPointer, "out is null");
        }
        match sim.diag.record(&sim.state) {
            Ok(mut r) => {
                r.bkm_integral = sim.bkm;
                slice::from_raw_parts_mut(out, N_COLUMNS).copy_from_slice(&r.values());
                GmhdStatus::Ok
            }
            Err(e) => fail(GmhdStatus::Internal, e),
        }
    })
}

/// Real-space ω and j, n² values each, row-major with x2 as the row index.
///
/// # Safety
/// `s` must be a live simulation handle; `omega` and `j` must each hold `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn gmhd_simulation_fields(
    s: *const GmhdSimulation,
    omega: *mut f64,
    j: *mut f64,
    cap: usize,
) -> GmhdStatus {
    guard(|| {
        let sim = deref!(s);
        let len = sim.grid.physical_len();
        if cap < len {
            return fail(GmhdStatus::BufferTooSmall, format!("need {len} slots, got {cap}"));
        }
        if omega.is_null() || j.is_null() {
            return fail(GmhdStatus::NullPointer, "output array is null");
        }
        slice::from_raw_parts_mut(omega, len).copy_from_slice(&sim.grid.inverse(&sim.state.omega_hat).0);
        slice::from_raw_parts_mut(j, len).copy_from_slice(&sim.grid.inverse(&sim.state.j_hat).0);
        GmhdStatus::Ok
    })
}
