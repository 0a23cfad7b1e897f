//! CSV profile snapshots.
//!
//! One header line `x,ne,ni,ue,ui,flux_e,flux_i,phi`, then one row per cell
//! in order of increasing `x`. Every value is written as `{:.16e}`, which
//! keeps 17 significant digits and reads back to the same `f64`. The
//! velocities are `flux / n` and are informational; a reader rebuilds the
//! state from the densities, fluxes and potential.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use sheath_core::mesh::{Mesh, PlasmaState, SpeciesState};

use crate::Error;

pub const HEADER: &str = "x,ne,ni,ue,ui,flux_e,flux_i,phi";

/// A snapshot read back from disk. `nu_iz` and `time` are not stored and
/// come back as zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub x: Vec<f64>,
    pub state: PlasmaState,
}

pub fn format_snapshot(state: &PlasmaState, mesh: &Mesh) -> String {
    let (e, i) = (&state.electrons, &state.ions);
    let mut out = String::with_capacity(HEADER.len() + 1 + mesh.n_cells() * 8 * 25);
    out.push_str(HEADER);
    out.push('\n');
    for (j, x) in mesh.centers().enumerate() {
        let row = [
            x,
            e.density[j],
            i.density[j],
            e.momentum[j] / e.density[j],
            i.momentum[j] / i.density[j],
            e.momentum[j],
            i.momentum[j],
            state.phi[j],
        ];
        for (k, v) in row.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            let _ = write!(out, "{v:.16e}");
        }
        out.push('\n');
    }
    out
}

pub fn write_snapshot(state: &PlasmaState, mesh: &Mesh, path: &Path) -> Result<(), Error> {
    fs::write(path, format_snapshot(state, mesh)).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

pub fn parse_snapshot(text: &str, path: &Path) -> Result<Snapshot, Error> {
    let fail = |line: usize, message: String| Error::Snapshot { path: path.to_path_buf(), line, message };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end() == HEADER => {}
        _ => return Err(fail(1, format!("expected header `{HEADER}`"))),
    }
    let mut x = Vec::new();
    let mut electrons = SpeciesState { density: Vec::new(), momentum: Vec::new() };
    let mut ions = electrons.clone();
    let mut phi = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let values = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| fail(line_no, e.to_string()))?;
        if values.len() != 8 {
            return Err(fail(line_no, format!("expected 8 columns, found {}", values.len())));
        }
        x.push(values[0]);
        electrons.density.push(values[1]);
        ions.density.push(values[2]);
        electrons.momentum.push(values[5]);
        ions.momentum.push(values[6]);
        phi.push(values[7]);
    }
    Ok(Snapshot { x, state: PlasmaState { electrons, ions, phi, nu_iz: 0.0, time: 0.0 } })
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot, Error> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    parse_snapshot(&text, path)
}
