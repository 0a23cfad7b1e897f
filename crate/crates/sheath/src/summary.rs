//! The JSON run summary.
//!
//! Non-finite numbers (for example an infinite source time step in a
//! collisionless run at rest) are written as `null`.

use std::fs;
use std::path::Path;

use serde::Serialize;
use sheath_core::diagnostics::{bulk_density_fit, Diagnostics, DiagnosticsRecord};
use sheath_core::mesh::PlasmaState;
use sheath_core::params::theoretical_targets;
use sheath_core::scheme::{RunFailure, RunOutcome, TimeStepBudget, Warnings};

use crate::config::RunConfig;
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    /// Reached `t_final`.
    Completed,
    /// Stopped early on the steady-state criterion.
    Steady,
    /// Stopped on a non-finite state.
    Unstable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetSummary {
    pub dt_convective: f64,
    pub dt_source: f64,
    pub dt_plasma: f64,
    pub dt_chosen: f64,
    pub cap_exceeds_budget: bool,
}

impl From<TimeStepBudget> for BudgetSummary {
    fn from(b: TimeStepBudget) -> Self {
        BudgetSummary {
            dt_convective: b.dt_convective,
            dt_source: b.dt_source,
            dt_plasma: b.dt_plasma,
            dt_chosen: b.dt_chosen,
            cap_exceeds_budget: b.cap_exceeds_budget,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsSummary {
    pub ambipolarity_err: f64,
    pub phi_peak: f64,
    pub phi_peak_rel_err: f64,
    pub ion_total: f64,
    pub steady_residual: f64,
    pub dt_budget: Option<BudgetSummary>,
    pub sheath_diffusion_estimate: Vec<f64>,
    pub oscillation_index: f64,
    pub ion_mach_sheath_edge: f64,
}

impl From<Diagnostics> for DiagnosticsSummary {
    fn from(d: Diagnostics) -> Self {
        DiagnosticsSummary {
            ambipolarity_err: d.ambipolarity_err,
            phi_peak: d.phi_peak,
            phi_peak_rel_err: d.phi_peak_rel_err,
            ion_total: d.ion_total,
            steady_residual: d.steady_residual,
            dt_budget: d.dt_budget.map(Into::into),
            sheath_diffusion_estimate: d.sheath_diffusion_estimate,
            oscillation_index: d.oscillation_index,
            ion_mach_sheath_edge: d.ion_mach_sheath_edge,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecordSummary {
    pub step: u64,
    pub time: f64,
    pub dt: f64,
    pub ambipolarity_err: f64,
    pub phi_peak: f64,
    pub ion_total: f64,
    pub steady_residual: f64,
    pub oscillation_index: f64,
}

impl From<&DiagnosticsRecord> for RecordSummary {
    fn from(r: &DiagnosticsRecord) -> Self {
        RecordSummary {
            step: r.step,
            time: r.time,
            dt: r.dt,
            ambipolarity_err: r.ambipolarity_err,
            phi_peak: r.phi_peak,
            ion_total: r.ion_total,
            steady_residual: r.steady_residual,
            oscillation_index: r.oscillation_index,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TargetsSummary {
    pub v_f: f64,
    pub v_s: f64,
    pub phi_peak: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WarningsSummary {
    pub degenerate_boundary_steps: u64,
    pub subsonic_ion_boundary_steps: u64,
    pub dt_cap_violations: u64,
    pub poisson_underresolved: bool,
}

impl From<Warnings> for WarningsSummary {
    fn from(w: Warnings) -> Self {
        WarningsSummary {
            degenerate_boundary_steps: w.degenerate_boundary_steps,
            subsonic_ion_boundary_steps: w.subsonic_ion_boundary_steps,
            dt_cap_violations: w.dt_cap_violations,
            poisson_underresolved: w.poisson_underresolved,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    /// The configuration text exactly as it was parsed.
    pub text: String,
    pub overrides: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub scenario: String,
    pub status: RunStatus,
    /// Set when the run failed.
    pub error: Option<String>,
    pub steps: u64,
    pub final_time: f64,
    pub steady_residual: f64,
    pub wall_clock_seconds: f64,
    pub diagnostics: DiagnosticsSummary,
    pub targets: TargetsSummary,
    pub warnings: WarningsSummary,
    pub history: Vec<RecordSummary>,
    pub checks: Vec<CheckResult>,
    pub config: ConfigEcho,
}

impl RunSummary {
    /// Summarises a finished run. For a failed run the diagnostics describe
    /// the last finite state and the steady residual is unknown.
    pub fn new(cfg: &RunConfig, result: &Result<RunOutcome, RunFailure>, wall_clock_seconds: f64) -> Self {
        let (state, steps, residual, budget, history, warnings, status, error) = match result {
            Ok(out) => (
                &out.state,
                out.steps,
                out.steady_residual,
                out.last_budget,
                out.trace.iter().map(Into::into).collect(),
                out.warnings,
                if out.steady { RunStatus::Steady } else { RunStatus::Completed },
                None,
            ),
            Err(fail) => (
                &fail.last_good,
                fail.steps,
                f64::NAN,
                None,
                Vec::new(),
                fail.warnings,
                RunStatus::Unstable,
                Some(fail.error.to_string()),
            ),
        };
        let diagnostics = Diagnostics::measure(state, &cfg.mesh, &cfg.params, residual, budget);
        let targets = theoretical_targets(&cfg.params);
        RunSummary {
            scenario: cfg.name.clone(),
            status,
            error,
            steps,
            final_time: state.time,
            steady_residual: residual,
            wall_clock_seconds,
            checks: evaluate_checks(cfg, state, &diagnostics),
            diagnostics: diagnostics.into(),
            targets: TargetsSummary { v_f: targets.v_f, v_s: targets.v_s, phi_peak: targets.phi_peak },
            warnings: warnings.into(),
            history,
            config: ConfigEcho { text: cfg.source.clone(), overrides: cfg.overrides.clone() },
        }
    }

    pub fn all_checks_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("summary serializes");
        text.push('\n');
        text
    }
}

/// Evaluates the thresholds enabled in `cfg.checks` on `state`.
pub fn evaluate_checks(cfg: &RunConfig, state: &PlasmaState, d: &Diagnostics) -> Vec<CheckResult> {
    let c = &cfg.checks;
    let mut out = Vec::new();
    let mut push = |name, value: f64, threshold: Option<f64>| {
        if let Some(threshold) = threshold {
            out.push(CheckResult { name, value, threshold, passed: value <= threshold });
        }
    };
    push("ambipolarity_err", d.ambipolarity_err, c.ambipolarity_max);
    push("phi_peak_rel_err", d.phi_peak_rel_err.abs(), c.phi_peak_rel_tol);
    push("oscillation_index", d.oscillation_index, c.oscillation_max);
    if c.bulk_fit_residual_max.is_some() {
        let fit = bulk_density_fit(state, &cfg.mesh, cfg.params.chi);
        push("bulk_fit_residual", fit.max_relative_residual, c.bulk_fit_residual_max);
    }
    out
}

pub fn write_summary(summary: &RunSummary, path: &Path) -> Result<(), Error> {
    fs::write(path, summary.to_json()).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}
