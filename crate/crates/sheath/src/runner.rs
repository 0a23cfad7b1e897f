//! Runs a configuration and writes its files.
//!
//! Output directory layout:
//!
//! - `snapshot_<step>.csv` at each snapshot (step zero-padded to 8 digits)
//! - `final.csv` for the last state, or `last_good.csv` after an instability
//! - `summary.json`

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use sheath_core::mesh::{Mesh, PlasmaState};
use sheath_core::scheme::{Integrator, RunFailure, RunObserver, RunOutcome};

use crate::config::RunConfig;
use crate::snapshot::write_snapshot;
use crate::summary::{write_summary, RunStatus, RunSummary};
use crate::Error;

/// Runs `cfg` from the uniform initial state without touching the disk.
pub fn simulate(cfg: &RunConfig, observer: &mut dyn RunObserver) -> Result<RunOutcome, RunFailure> {
    let mut state = PlasmaState::init_uniform(&cfg.mesh);
    let mut integ = match Integrator::new(cfg.mesh, cfg.params, cfg.scheme) {
        Ok(i) => i,
        Err(error) => return Err(RunFailure { error, last_good: state, steps: 0, warnings: Default::default() }),
    };
    if let Err(error) = integ.prepare(&mut state) {
        return Err(RunFailure { error, last_good: state, steps: 0, warnings: integ.warnings() });
    }
    integ.run(state, observer)
}

struct SnapshotWriter<'a> {
    dir: &'a Path,
    mesh: Mesh,
    written: Vec<PathBuf>,
    error: Option<Error>,
}

impl RunObserver for SnapshotWriter<'_> {
    fn on_snapshot(&mut self, step: u64, state: &PlasmaState) {
        if self.error.is_some() {
            return;
        }
        let path = self.dir.join(format!("snapshot_{step:08}.csv"));
        match write_snapshot(state, &self.mesh, &path) {
            Ok(()) => self.written.push(path),
            Err(e) => self.error = Some(e),
        }
    }
}

#[derive(Debug)]
pub struct Execution {
    pub summary: RunSummary,
    /// Every file written, in order.
    pub files: Vec<PathBuf>,
}

impl Execution {
    pub fn unstable(&self) -> bool {
        self.summary.status == RunStatus::Unstable
    }
}

/// Runs `cfg` and writes snapshots, the final state and the summary into `dir`.
pub fn execute(cfg: &RunConfig, dir: &Path) -> Result<Execution, Error> {
    fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.to_path_buf(), source })?;
    let mut writer = SnapshotWriter { dir, mesh: cfg.mesh, written: Vec::new(), error: None };
    let started = Instant::now();
    let result = simulate(cfg, &mut writer);
    let wall_clock = started.elapsed().as_secs_f64();
    if let Some(e) = writer.error {
        return Err(e);
    }
    let mut files = writer.written;

    let (name, last) = match &result {
        Ok(out) => ("final.csv", &out.state),
        Err(fail) => ("last_good.csv", &fail.last_good),
    };
    let path = dir.join(name);
    write_snapshot(last, &cfg.mesh, &path)?;
    files.push(path);

    let summary = RunSummary::new(cfg, &result, wall_clock);
    let path = dir.join("summary.json");
    write_summary(&summary, &path)?;
    files.push(path);
    Ok(Execution { summary, files })
}
