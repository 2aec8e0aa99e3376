//! The C ABI exercised from Rust through raw pointers.

use std::ffi::{c_char, CStr, CString};
use std::ptr;

use gmhd::diagnostics::CSV_COLUMNS;
use gmhd_ffi::*;

const CONFIG: &str = "[grid]\nn = 32\n[time]\nt_end = 0.1\n[kernel]\nfamily = \"log_weak\"\neps1 = 1.0\neps2 = 1.0\n[init]\npreset = \"orszag_tang\"\n";

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 512];
    unsafe { gmhd_last_error_message(buf.as_mut_ptr(), buf.len()) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

fn simulation(text: &str) -> *mut GmhdSimulation {
    let c = CString::new(text).unwrap();
    let mut sim = ptr::null_mut();
    assert_eq!(unsafe { gmhd_simulation_new(c.as_ptr(), &mut sim) }, GmhdStatus::Ok, "{}", last_error());
    sim
}

#[test]
fn profile_round_trip() {
    unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(gmhd_profile_log_weak(1.0, 1.0, false, &mut p), GmhdStatus::Ok);
        let mut m = 0.0;
        assert_eq!(gmhd_profile_evaluate(p, 1.0, &mut m), GmhdStatus::Ok);
        let want = (std::f64::consts::E + 1.0).ln().powf(-2.0) * (1.0 + 2f64.ln()).powi(2);
        assert!((m - want).abs() < 1e-14);
        let mut rep = std::mem::zeroed::<GmhdValidationReport>();
        assert_eq!(gmhd_profile_validate(p, &mut rep), GmhdStatus::Ok);
        assert_eq!(rep.verdict, GmhdVerdict::Admissible);
        assert!(rep.monotone_ok && rep.limit_zero_ok && rep.doubling_constant > 0.0);

        let ks = [0.0, 1.0, 2.0];
        let mut s = ptr::null_mut();
        assert_eq!(gmhd_symbol_compute(p, ks.as_ptr(), ks.len(), &mut s), GmhdStatus::Ok);
        let mut n = 0;
        assert_eq!(gmhd_symbol_len(s, &mut n), GmhdStatus::Ok);
        assert_eq!(n, 3);
        let (mut kk, mut ss) = ([0.0; 3], [0.0; 3]);
        assert_eq!(gmhd_symbol_values(s, kk.as_mut_ptr(), ss.as_mut_ptr(), 2), GmhdStatus::BufferTooSmall);
        assert_eq!(gmhd_symbol_values(s, kk.as_mut_ptr(), ss.as_mut_ptr(), 3), GmhdStatus::Ok);
        assert_eq!(kk, ks);
        assert!((ss[1] - 5.550_353_299_084_878).abs() < 1e-7);
        let mut v = 0.0;
        assert_eq!(gmhd_symbol_get(s, 3.0, &mut v), GmhdStatus::InvalidArgument);
        gmhd_symbol_free(s);
        gmhd_profile_free(p);
    }
}

#[test]
fn rejected_table_gives_kernel_status() {
    let radii: Vec<f64> = (-70..=14).map(|i| (i as f64).exp2()).collect();
    let values: Vec<f64> = radii.iter().map(|r| 1.0 / (std::f64::consts::E + 1.0 / r).ln()).collect();
    unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(gmhd_profile_tabulated(radii.as_ptr(), values.as_ptr(), radii.len(), false, &mut p), GmhdStatus::Ok);
        let mut rep = std::mem::zeroed::<GmhdValidationReport>();
        assert_eq!(gmhd_profile_validate(p, &mut rep), GmhdStatus::Ok);
        assert_eq!(rep.verdict, GmhdVerdict::Rejected);
        assert!(rep.dini_integral.is_infinite());
        let mut s = ptr::null_mut();
        assert_eq!(gmhd_symbol_compute(p, [1.0].as_ptr(), 1, &mut s), GmhdStatus::Kernel);
        assert!(s.is_null());
        assert!(!last_error().is_empty());
        gmhd_profile_free(p);
    }
}

#[test]
fn null_and_bad_arguments() {
    unsafe {
        assert_eq!(gmhd_profile_power_law(0.5, false, ptr::null_mut()), GmhdStatus::NullPointer);
        assert_eq!(gmhd_profile_evaluate(ptr::null(), 1.0, &mut 0.0), GmhdStatus::NullPointer);
        assert_eq!(gmhd_simulation_step(ptr::null_mut()), GmhdStatus::NullPointer);
        assert_eq!(
            gmhd_profile_tabulated(ptr::null(), ptr::null(), 3, false, &mut ptr::null_mut()),
            GmhdStatus::NullPointer
        );
        let mut p = ptr::null_mut();
        assert_eq!(gmhd_profile_power_law(f64::NAN, false, &mut p), GmhdStatus::Kernel);
        assert!(last_error().contains("alpha"));
        assert_eq!(gmhd_closed_form_symbol(1.5, 1.0, &mut 0.0), GmhdStatus::Kernel);
        gmhd_profile_free(ptr::null_mut());
        gmhd_symbol_free(ptr::null_mut());
        gmhd_simulation_free(ptr::null_mut());

        let bad = CString::new(CONFIG.replace("n = 32", "n = 33")).unwrap();
        let mut sim = ptr::null_mut();
        assert_eq!(gmhd_simulation_new(bad.as_ptr(), &mut sim), GmhdStatus::Config);
        assert!(last_error().contains("even"));
    }
}

#[test]
fn error_message_truncates() {
    unsafe {
        gmhd_profile_power_law(-1.0, false, &mut ptr::null_mut());
        let full = gmhd_last_error_message(ptr::null_mut(), 0);
        let mut buf = [0x7f as c_char; 5];
        assert_eq!(gmhd_last_error_message(buf.as_mut_ptr(), buf.len()), full);
        assert_eq!(buf[4], 0);
        assert_eq!(CStr::from_ptr(buf.as_ptr()).to_bytes().len(), 4);
    }
}

#[test]
fn column_names_match_the_csv() {
    for (i, name) in CSV_COLUMNS.iter().enumerate() {
        let c = unsafe { CStr::from_ptr(gmhd_diagnostics_column_name(i)) };
        assert_eq!(c.to_str().unwrap(), *name);
    }
    assert!(gmhd_diagnostics_column_name(CSV_COLUMNS.len()).is_null());
    assert_eq!(GMHD_DIAGNOSTICS_COLUMNS, CSV_COLUMNS.len());
}

#[test]
fn simulation_matches_the_library_run() {
    let cfg = gmhd::config::parse_config_str(CONFIG).unwrap();
    let (grid, sym, state) = gmhd::cli::prepare(&cfg).unwrap();
    let stepper = gmhd::dynamics::Stepper::new(grid.clone(), &sym, cfg.stepper_config()).unwrap();
    let lib = stepper.run(state, 0.1, 1000, &mut []).unwrap();

    let sim = simulation(CONFIG);
    unsafe {
        let mut steps = 0u64;
        assert_eq!(gmhd_simulation_advance(sim, 0.1, &mut steps), GmhdStatus::Ok);
        assert_eq!(steps, lib.steps);
        let mut t = 0.0;
        gmhd_simulation_time(sim, &mut t);
        assert_eq!(t, 0.1);
        let mut n = 0;
        gmhd_simulation_grid_size(sim, &mut n);
        assert_eq!(n, 32);

        let (mut w, mut j) = (vec![0.0; n * n], vec![0.0; n * n]);
        assert_eq!(gmhd_simulation_fields(sim, w.as_mut_ptr(), j.as_mut_ptr(), n * n - 1), GmhdStatus::BufferTooSmall);
        assert_eq!(gmhd_simulation_fields(sim, w.as_mut_ptr(), j.as_mut_ptr(), n * n), GmhdStatus::Ok);
        assert_eq!(w, grid.inverse(&lib.state.omega_hat).0);
        assert_eq!(j, grid.inverse(&lib.state.j_hat).0);

        let mut d = [0.0; GMHD_DIAGNOSTICS_COLUMNS];
        assert_eq!(gmhd_simulation_diagnostics(sim, d.as_mut_ptr(), d.len()), GmhdStatus::Ok);
        let diag = gmhd::diagnostics::Diagnostics::new(grid.clone(), &sym).unwrap();
        let want = diag.record(&lib.state).unwrap().values();
        for (i, (a, b)) in d.iter().zip(want).enumerate() {
            if CSV_COLUMNS[i] != "bkm_integral" {
                assert_eq!(*a, b, "{}", CSV_COLUMNS[i]);
            }
        }
        // trapezoid over steps of a sup norm that stays near its initial value 2
        assert!(d[22] > 0.1 * 1.5 && d[22] < 0.1 * 3.0, "{}", d[22]);

        assert_eq!(gmhd_simulation_advance(sim, 0.05, ptr::null_mut()), GmhdStatus::InvalidArgument);
        assert_eq!(gmhd_simulation_step(sim), GmhdStatus::Ok);
        gmhd_simulation_time(sim, &mut t);
        assert!(t > 0.1);
        gmhd_simulation_free(sim);
    }
}

#[test]
fn overflow_is_reported_as_blowup() {
    let sim = simulation(&CONFIG.replace("preset = \"orszag_tang\"", "preset = \"single_mode\"\namplitude = 1e300"));
    unsafe {
        let mut t0 = 0.0;
        gmhd_simulation_time(sim, &mut t0);
        let mut steps = 0;
        assert_eq!(gmhd_simulation_advance(sim, 1.0, &mut steps), GmhdStatus::Blowup);
        assert!(last_error().contains("blow-up"));
        let mut t = 0.0;
        gmhd_simulation_time(sim, &mut t);
        assert!(t < 1.0);
        gmhd_simulation_free(sim);
    }
}
