//! Subcommand implementations. Each returns the process exit code.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::config::RunConfig;
use crate::diagnostics::{
    accumulate_bkm, bkm_monitor, energy_budget, enstrophy_budget, Diagnostics, DiagnosticsRecord, Recorder,
};
use crate::dynamics::{DynamicsError, SimState, Sink, SinkError, Stepper};
use crate::io::csv::{fmt_g17, write_diagnostics, write_symbol};
use crate::io::snapshot::{snapshot_name, Snapshot};
use crate::kernel::{compute_symbol, validate_profile, DissipationSymbol, Verdict};
use crate::presets::initial_state;
use crate::spectral::{SpectralField, SpectralGrid};
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_WARN: i32 = 1;
pub const EXIT_ERROR: i32 = 2;
pub const EXIT_BLOWUP: i32 = 3;

pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";

/// Prints the validation report as key=value lines; exit 0/1/2 for admissible/weak-only/rejected.
pub fn cmd_validate_kernel(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, Error> {
    let profile = cfg.profile()?;
    let r = validate_profile(&profile)?;
    writeln!(out, "family={}", profile.family_name())?;
    writeln!(out, "override_weak={}", profile.override_weak())?;
    writeln!(out, "monotone_ok={}", r.monotone_ok)?;
    match r.doubling_constant {
        Some(c) => writeln!(out, "doubling_constant={}", fmt_g17(c))?,
        None => writeln!(out, "doubling_constant=absent")?,
    }
    writeln!(out, "dini_integral={}", fmt_g17(r.dini_integral))?;
    writeln!(out, "limit_zero_ok={}", r.limit_zero_ok)?;
    writeln!(out, "verdict={}", r.verdict.as_str())?;
    Ok(match r.verdict {
        Verdict::Admissible => EXIT_OK,
        Verdict::WeakOnly => EXIT_WARN,
        Verdict::Rejected => EXIT_ERROR,
    })
}

/// `kappa,sigma` rows for every grid |k| ≤ kappa_max (all of them when absent).
pub fn cmd_symbol(cfg: &RunConfig, kappa_max: Option<f64>, out: &mut dyn Write) -> Result<i32, Error> {
    let grid = SpectralGrid::new(cfg.grid.n)?;
    let kappas: Vec<f64> = grid.kappas().into_iter().filter(|k| kappa_max.is_none_or(|m| *k <= m)).collect();
    let sym = compute_symbol(&cfg.profile()?, &kappas)?;
    write_symbol(out, sym.iter())?;
    Ok(EXIT_OK)
}

struct SnapshotSink {
    dir: PathBuf,
    grid: Arc<SpectralGrid>,
    count: u64,
}

impl Sink for SnapshotSink {
    fn sample(&mut self, _step: u64, state: &SimState) -> Result<(), SinkError> {
        let snap = Snapshot {
            n: self.grid.n(),
            t: state.t,
            omega: self.grid.inverse(&state.omega_hat).0,
            j: self.grid.inverse(&state.j_hat).0,
        };
        snap.write(&self.dir.join(snapshot_name(self.count)))?;
        self.count += 1;
        Ok(())
    }
}

/// Grid, symbol and initial state shared by `run` and the FFI.
pub fn prepare(cfg: &RunConfig) -> Result<(Arc<SpectralGrid>, DissipationSymbol, SimState), Error> {
    let grid = Arc::new(SpectralGrid::new(cfg.grid.n)?);
    let sym = compute_symbol(&cfg.profile()?, &grid.kappas())?;
    let state = initial_state(&grid, &cfg.preset()?)?;
    Ok((grid, sym, state))
}

/// Runs the configured simulation, writing `diagnostics.csv` (and snapshots) to the output dir.
pub fn cmd_run(cfg: &RunConfig, out_dir: Option<&Path>, out: &mut dyn Write) -> Result<i32, Error> {
    let dir = out_dir.map(Path::to_path_buf).unwrap_or_else(|| cfg.output.dir.clone());
    fs::create_dir_all(&dir)?;
    let (grid, sym, state) = prepare(cfg)?;
    let stepper = Stepper::new(grid.clone(), &sym, cfg.stepper_config())?;
    let mut recorder = Recorder::new(Diagnostics::new(grid.clone(), &sym)?);
    let mut snaps = SnapshotSink { dir: dir.clone(), grid: grid.clone(), count: 0 };

    let result = {
        let mut sinks: Vec<&mut dyn Sink> = vec![&mut recorder];
        if cfg.output.snapshots {
            sinks.push(&mut snaps);
        }
        stepper.run(state, cfg.time.t_end, cfg.time.sample_every, &mut sinks)
    };
    let records = recorder.into_records();
    let mut csv = BufWriter::new(File::create(dir.join(DIAGNOSTICS_FILE))?);
    write_diagnostics(&mut csv, &records)?;
    csv.flush()?;

    match result {
        Ok(outcome) => {
            writeln!(out, "steps={}", outcome.steps)?;
            summarize(&records, out)
        }
        Err(DynamicsError::Blowup(rep)) => {
            writeln!(out, "blowup=true")?;
            writeln!(out, "blowup_t={}", fmt_g17(rep.t))?;
            writeln!(out, "blowup_omega_inf={}", fmt_g17(rep.omega_inf))?;
            writeln!(out, "blowup_tail_ratio={}", fmt_g17(rep.tail_ratio))?;
            Ok(EXIT_BLOWUP)
        }
        Err(e) => Err(e.into()),
    }
}

fn summarize(records: &[DiagnosticsRecord], out: &mut dyn Write) -> Result<i32, Error> {
    let Some(last) = records.last() else {
        writeln!(out, "samples=0")?;
        return Ok(EXIT_OK);
    };
    let bkm = bkm_monitor(records);
    let max_w = records.iter().fold(0.0f64, |m, r| m.max(r.lp_omega.inf));
    writeln!(out, "samples={}", records.len())?;
    writeln!(out, "final_energy={}", fmt_g17(last.energy()))?;
    writeln!(out, "max_omega_inf={}", fmt_g17(max_w))?;
    writeln!(out, "bkm_integral={}", fmt_g17(bkm.integral))?;
    writeln!(out, "blowup_flag={}", bkm.blowup_flag)?;
    if records.len() < 2 {
        return Ok(EXIT_OK);
    }
    let e = energy_budget(records)?;
    let z = enstrophy_budget(records)?;
    writeln!(out, "energy_budget={}", if e.pass { "pass" } else { "fail" })?;
    writeln!(out, "energy_max_residual={}", fmt_g17(e.max_residual))?;
    writeln!(out, "enstrophy_budget={}", if z.pass { "pass" } else { "fail" })?;
    writeln!(out, "enstrophy_c_fit={}", fmt_g17(z.c_fit))?;
    Ok(if e.pass && z.pass && !bkm.blowup_flag { EXIT_OK } else { EXIT_WARN })
}

/// Recomputes records from snapshot files. Instantaneous columns come from each snapshot; the
/// cumulative columns are rebuilt by re-advancing the stepper from every snapshot to the next, which
/// repeats the step sequence and ledger quadrature of the run that wrote them.
pub fn diag_records(cfg: &RunConfig, paths: &[PathBuf]) -> Result<Vec<DiagnosticsRecord>, Error> {
    let grid = Arc::new(SpectralGrid::new(cfg.grid.n)?);
    let sym = compute_symbol(&cfg.profile()?, &grid.kappas())?;
    let diag = Diagnostics::new(grid.clone(), &sym)?;
    let stepper = Stepper::new(grid.clone(), &sym, cfg.stepper_config())?;
    let mut records: Vec<DiagnosticsRecord> = Vec::with_capacity(paths.len());
    let mut prev: Option<SimState> = None;
    for p in paths {
        let snap = Snapshot::read(p)?;
        if snap.n != grid.n() {
            return Err(Error::Usage(format!("{} has n = {}, config has n = {}", p.display(), snap.n, grid.n())));
        }
        let mut state = SimState {
            t: snap.t,
            omega_hat: to_mean_zero(grid.forward(&crate::spectral::PhysicalField(snap.omega))),
            j_hat: to_mean_zero(grid.forward(&crate::spectral::PhysicalField(snap.j))),
            ledger: Default::default(),
        };
        if let Some(mut s) = prev.take() {
            if !(state.t >= s.t) {
                return Err(Error::Usage(format!(
                    "{} at t = {} precedes the previous snapshot (t = {})",
                    p.display(),
                    state.t,
                    s.t
                )));
            }
            while s.t < state.t {
                s = stepper.step_capped(&s, state.t)?;
            }
            state.ledger = s.ledger;
        }
        records.push(diag.record(&state)?);
        prev = Some(state);
    }
    accumulate_bkm(&mut records);
    Ok(records)
}

fn to_mean_zero(mut s: SpectralField) -> SpectralField {
    s.0[0] = Default::default();
    s
}

pub fn cmd_diag(cfg: &RunConfig, paths: &[PathBuf], out: &mut dyn Write) -> Result<i32, Error> {
    let records = diag_records(cfg, paths)?;
    write_diagnostics(out, &records)?;
    Ok(EXIT_OK)
}
