//! Time integration: the classical Lie splitting, the modified Lie splitting
//! with controlled density diffusion, and a Strang splitting with RK2 source
//! half steps around a MUSCL-Hancock convective step.
//!
//! Classical Lie, one step of size `dt`:
//!
//! 1. convective step for both species (state `*`);
//! 2. potential from the `*` densities (labelled `n+1`);
//! 3. ionization rate refilling the ions lost in step 1;
//! 4. sources with the new potential.
//!
//! Modified Lie keeps steps 1–2, applies only the momentum sources, then
//! rebuilds the densities from time `n` using the new momenta as particle
//! fluxes (with the species' density-flux diffusion), and finally applies the
//! ionization closure to those densities.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::boundary::{electron_ghosts, ion_ghosts, ElectronBc, Ghosts};
use crate::diagnostics::DiagnosticsRecord;
use crate::mesh::{Mesh, PlasmaState, Species, SpeciesState};
use crate::params::NondimParams;
use crate::poisson::{poisson_resolution_check, solve_poisson, ResolutionCheck};
use crate::riemann::{convective_dt, physical_flux, ConservedPair, FluxContext, FluxPolicy, FluxScheme};
use crate::sources::{
    collision_rates, ionization_rate_i0, ionization_rate_i1, source_dt, source_terms, SourceContext,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Splitting {
    LieClassical,
    LieModified,
    Strang,
}

impl Splitting {
    pub fn name(self) -> &'static str {
        match self {
            Splitting::LieClassical => "lie-classical",
            Splitting::LieModified => "lie-modified",
            Splitting::Strang => "strang",
        }
    }
}

impl fmt::Display for Splitting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Splitting {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lie-classical" => Ok(Splitting::LieClassical),
            "lie-modified" => Ok(Splitting::LieModified),
            "strang" => Ok(Splitting::Strang),
            other => Err(Error::Configuration(format!("unknown splitting `{other}`"))),
        }
    }
}

/// How often the run loop hands a snapshot to its observer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cadence {
    Steps(u64),
    Time(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    pub splitting: Splitting,
    pub electron_flux: FluxScheme,
    pub ion_flux: FluxScheme,
    pub electron_bc: ElectronBc,
    /// Safety factor applied to the stability budget, in `(0, 1]`.
    pub cfl_safety: f64,
    pub t_final: f64,
    /// Fixed time step; replaces the adaptive choice when set.
    pub dt_cap: Option<f64>,
    /// Steady when `max |Δn / Δt|` stays below this for `steady_window` steps.
    pub steady_tol: f64,
    pub steady_window: u64,
    pub ion_diffusion_tuning: f64,
    pub cadence: Option<Cadence>,
    /// Stride of the diagnostics trace, in steps.
    pub trace_every: u64,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        SchemeConfig {
            splitting: Splitting::LieModified,
            electron_flux: FluxScheme::ControlledRusanov,
            ion_flux: FluxScheme::ScaledFixedHll,
            electron_bc: ElectronBc::Consistent,
            cfl_safety: 0.9,
            t_final: 4.0,
            dt_cap: None,
            steady_tol: 1e-6,
            steady_window: 100,
            ion_diffusion_tuning: crate::riemann::DEFAULT_ION_DIFFUSION_TUNING,
            cadence: None,
            trace_every: 1000,
        }
    }
}

impl SchemeConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: alloc::string::String| Err(Error::Configuration(msg));
        if !self.electron_flux.allowed_for(Species::Electron) {
            return bad(format!("electron_flux = {} is an ion-only solver", self.electron_flux));
        }
        if !self.ion_flux.allowed_for(Species::Ion) {
            return bad(format!("ion_flux = {} is an electron-only solver", self.ion_flux));
        }
        if self.electron_flux == FluxScheme::ControlledRusanov && self.splitting != Splitting::LieModified {
            return bad(format!(
                "electron_flux = controlled-rusanov needs splitting = lie-modified, got {}",
                self.splitting
            ));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return bad(format!("cfl_safety must lie in (0, 1], got {}", self.cfl_safety));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return bad(format!("t_final must be finite and non-negative, got {}", self.t_final));
        }
        if let Some(dt) = self.dt_cap {
            if !(dt > 0.0 && dt.is_finite()) {
                return bad(format!("dt_cap must be positive, got {dt}"));
            }
        }
        if !(self.steady_tol > 0.0) {
            return bad(format!("steady_tol must be positive, got {}", self.steady_tol));
        }
        if self.steady_window == 0 || self.trace_every == 0 {
            return bad("steady_window and trace_every must be at least 1".into());
        }
        match self.cadence {
            Some(Cadence::Steps(0)) => return bad("snapshot step cadence must be at least 1".into()),
            Some(Cadence::Time(t)) if !(t > 0.0) => return bad(format!("snapshot time cadence must be positive, got {t}")),
            _ => {}
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeStepBudget {
    pub dt_convective: f64,
    /// Ionization and collision limits.
    pub dt_source: f64,
    /// `sqrt(ε χ)`.
    pub dt_plasma: f64,
    pub dt_chosen: f64,
    /// A fixed step was requested that exceeds `cfl_safety × min(budgets)`.
    pub cap_exceeds_budget: bool,
}

impl TimeStepBudget {
    pub fn limit(&self) -> f64 {
        self.dt_convective.min(self.dt_source).min(self.dt_plasma)
    }
}

/// Counters of non-fatal conditions met during a run.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Warnings {
    /// Steps where a consistent electron ghost exponent was clamped.
    pub degenerate_boundary_steps: u64,
    /// Steps where an ion boundary cell was slower than the ion thermal speed.
    pub subsonic_ion_boundary_steps: u64,
    /// Steps taken with a fixed step larger than the stability budget.
    pub dt_cap_violations: u64,
    pub poisson_underresolved: bool,
}

/// Intermediate quantities of one step, for invariant checks.
#[derive(Debug, Clone, PartialEq)]
pub struct StepTrace {
    /// Densities right before the final density source (electrons, ions).
    pub electron_star: Vec<f64>,
    pub ion_star: Vec<f64>,
    pub nu_iz: f64,
}

/// Result of a conservative convective update of one species.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvectiveOutcome {
    pub state: SpeciesState,
    /// Numerical flux through the left wall face.
    pub left_flux: ConservedPair,
    /// Numerical flux through the right wall face.
    pub right_flux: ConservedPair,
}

#[inline]
fn face_states(species: &SpeciesState, ghosts: &Ghosts, k: usize) -> (ConservedPair, ConservedPair) {
    let n = species.len();
    let l = if k == 0 { ghosts.left } else { species.cell(k - 1) };
    let r = if k == n { ghosts.right } else { species.cell(k) };
    (l, r)
}

fn apply_fluxes(species: &SpeciesState, fluxes: &[ConservedPair], ratio: f64) -> ConvectiveOutcome {
    let n = species.len();
    let mut state = species.clone();
    for j in 0..n {
        let diff = fluxes[j + 1] - fluxes[j];
        state.density[j] -= ratio * diff.n;
        state.momentum[j] -= ratio * diff.m;
    }
    ConvectiveOutcome { state, left_flux: fluxes[0], right_flux: fluxes[n] }
}

/// First-order finite-volume update `U_j − dt/dx (F_{j+½} − F_{j−½})`.
pub fn convective_step(species: &SpeciesState, ghosts: &Ghosts, policy: &FluxPolicy, dt: f64, dx: f64) -> ConvectiveOutcome {
    let fluxes: Vec<ConservedPair> = (0..=species.len())
        .map(|k| {
            let (l, r) = face_states(species, ghosts, k);
            policy.flux(l, r)
        })
        .collect();
    apply_fluxes(species, &fluxes, dt / dx)
}

/// Density-only update driven by the given momenta. Interface states pair the
/// old densities with the new momenta; only the density component of the
/// numerical flux is used. Returns the densities and the two wall fluxes.
pub fn density_convective_step(
    density: &[f64],
    momentum: &[f64],
    ghosts: &Ghosts,
    policy: &FluxPolicy,
    dt: f64,
    dx: f64,
) -> (Vec<f64>, (f64, f64)) {
    let n = density.len();
    let cell = |k: usize| ConservedPair::new(density[k], momentum[k]);
    let fluxes: Vec<f64> = (0..=n)
        .map(|k| {
            let l = if k == 0 { ghosts.left } else { cell(k - 1) };
            let r = if k == n { ghosts.right } else { cell(k) };
            policy.flux(l, r).n
        })
        .collect();
    let ratio = dt / dx;
    let out = (0..n).map(|j| density[j] - ratio * (fluxes[j + 1] - fluxes[j])).collect();
    (out, (fluxes[0], fluxes[n]))
}

#[inline]
pub fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

/// Left and right face states of a cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceStates {
    pub left: ConservedPair,
    pub right: ConservedPair,
}

/// Minmod-limited face states of the centre cell of `window`, before the
/// half-step predictor.
pub fn limited_faces(window: [ConservedPair; 3]) -> FaceStates {
    let [a, c, b] = window;
    let slope = ConservedPair::new(minmod(c.n - a.n, b.n - c.n), minmod(c.m - a.m, b.m - c.m));
    FaceStates { left: c - 0.5 * slope, right: c + 0.5 * slope }
}

/// MUSCL-Hancock reconstruction: limited faces advanced by half a time step
/// with the physical flux difference across the cell.
pub fn muscl_reconstruct(window: [ConservedPair; 3], v_th: f64, dt: f64, dx: f64) -> FaceStates {
    let faces = limited_faces(window);
    predict(faces, v_th, 0.5 * dt / dx)
}

#[inline]
fn predict(faces: FaceStates, v_th: f64, half_ratio: f64) -> FaceStates {
    let change = half_ratio * (physical_flux(faces.left, v_th) - physical_flux(faces.right, v_th));
    FaceStates { left: faces.left + change, right: faces.right + change }
}

/// Second-order MUSCL-Hancock update. The wall cells take their slopes
/// against the ghost states.
pub fn muscl_convective_step(
    species: &SpeciesState,
    ghosts: &Ghosts,
    policy: &FluxPolicy,
    dt: f64,
    dx: f64,
) -> ConvectiveOutcome {
    let n = species.len();
    let v_th = policy.thermal_speed();
    let half_ratio = 0.5 * dt / dx;
    let faces: Vec<FaceStates> = (0..n)
        .map(|j| {
            let l = if j == 0 { ghosts.left } else { species.cell(j - 1) };
            let r = if j + 1 == n { ghosts.right } else { species.cell(j + 1) };
            predict(limited_faces([l, species.cell(j), r]), v_th, half_ratio)
        })
        .collect();
    let fluxes: Vec<ConservedPair> = (0..=n)
        .map(|k| {
            let l = if k == 0 { ghosts.left } else { faces[k - 1].right };
            let r = if k == n { ghosts.right } else { faces[k].left };
            policy.flux(l, r)
        })
        .collect();
    apply_fluxes(species, &fluxes, dt / dx)
}

fn add_scaled(state: &SpeciesState, scale: f64, rate: &[ConservedPair]) -> SpeciesState {
    SpeciesState {
        density: state.density.iter().zip(rate).map(|(n, s)| n + scale * s.n).collect(),
        momentum: state.momentum.iter().zip(rate).map(|(m, s)| m + scale * s.m).collect(),
    }
}

/// Receives progress from [`Integrator::run`].
pub trait RunObserver {
    fn on_step(&mut self, _step: u64, _state: &PlasmaState, _budget: &TimeStepBudget) {}
    fn on_snapshot(&mut self, _step: u64, _state: &PlasmaState) {}
}

/// Observer that ignores everything.
pub struct NullObserver;

impl RunObserver for NullObserver {}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub state: PlasmaState,
    pub steps: u64,
    /// Stopped because the steady-state criterion held.
    pub steady: bool,
    /// `max |Δn / Δt|` of the last step (zero when no step was taken).
    pub steady_residual: f64,
    pub last_budget: Option<TimeStepBudget>,
    pub trace: Vec<DiagnosticsRecord>,
    pub warnings: Warnings,
}

/// A failed run, with the last state that was still finite.
#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure {
    pub error: Error,
    pub last_good: PlasmaState,
    pub steps: u64,
    pub warnings: Warnings,
}

/// Steps a [`PlasmaState`] with one of the splittings.
#[derive(Debug, Clone)]
pub struct Integrator {
    mesh: Mesh,
    params: NondimParams,
    config: SchemeConfig,
    electron_flux: FluxPolicy,
    ion_flux: FluxPolicy,
    warnings: Warnings,
}

impl Integrator {
    pub fn new(mesh: Mesh, params: NondimParams, config: SchemeConfig) -> Result<Self> {
        config.validate()?;
        let dx = mesh.dx();
        let tuning = config.ion_diffusion_tuning;
        let electron_flux = FluxPolicy::new(
            config.electron_flux,
            Species::Electron,
            &FluxContext::for_species(Species::Electron, &params, dx, tuning),
        )?;
        let ion_flux =
            FluxPolicy::new(config.ion_flux, Species::Ion, &FluxContext::for_species(Species::Ion, &params, dx, tuning))?;
        let warnings = Warnings {
            poisson_underresolved: poisson_resolution_check(dx, params.chi) != ResolutionCheck::Ok,
            ..Warnings::default()
        };
        Ok(Integrator { mesh, params, config, electron_flux, ion_flux, warnings })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn params(&self) -> &NondimParams {
        &self.params
    }

    pub fn config(&self) -> &SchemeConfig {
        &self.config
    }

    pub fn warnings(&self) -> Warnings {
        self.warnings
    }

    fn electron_ghosts_for(&mut self, electrons: &SpeciesState, phi: &[f64], nu_iz: f64) -> Ghosts {
        let (g, clamped) = electron_ghosts(electrons, phi, self.config.electron_bc, &self.params, nu_iz, self.mesh.dx());
        if clamped {
            self.warnings.degenerate_boundary_steps += 1;
        }
        g
    }

    fn check_ion_boundary(&mut self, ions: &SpeciesState) {
        let v_th = self.params.ion_thermal_speed();
        let last = ions.len() - 1;
        if ions.cell(0).velocity().abs() < v_th || ions.cell(last).velocity().abs() < v_th {
            self.warnings.subsonic_ion_boundary_steps += 1;
        }
    }

    /// Makes the state ready for stepping: the Strang splitting needs the
    /// potential consistent with the initial densities.
    pub fn prepare(&self, state: &mut PlasmaState) -> Result<()> {
        if self.config.splitting == Splitting::Strang {
            state.phi = solve_poisson(&state.electrons.density, &state.ions.density, self.params.chi, self.mesh.dx())?;
        }
        Ok(())
    }

    pub fn step(&mut self, state: &PlasmaState, dt: f64) -> Result<PlasmaState> {
        self.step_traced(state, dt).map(|(s, _)| s)
    }

    pub fn step_traced(&mut self, state: &PlasmaState, dt: f64) -> Result<(PlasmaState, StepTrace)> {
        match self.config.splitting {
            Splitting::LieClassical => self.step_lie_classical(state, dt),
            Splitting::LieModified => self.step_lie_modified(state, dt),
            Splitting::Strang => self.step_strang(state, dt),
        }
    }

    /// Convective step shared by both Lie splittings.
    fn lie_convective(&mut self, state: &PlasmaState, dt: f64) -> (SpeciesState, SpeciesState) {
        let dx = self.mesh.dx();
        let ge = self.electron_ghosts_for(&state.electrons, &state.phi, state.nu_iz);
        let gi = ion_ghosts(&state.ions);
        self.check_ion_boundary(&state.ions);
        let e = convective_step(&state.electrons, &ge, &self.electron_flux.full_state(), dt, dx).state;
        let i = convective_step(&state.ions, &gi, &self.ion_flux, dt, dx).state;
        (e, i)
    }

    pub fn step_lie_classical(&mut self, state: &PlasmaState, dt: f64) -> Result<(PlasmaState, StepTrace)> {
        let p = self.params;
        let dx = self.mesh.dx();
        let (e, i) = self.lie_convective(state, dt);
        let phi = solve_poisson(&e.density, &i.density, p.chi, dx)?;
        let nu_iz = ionization_rate_i0(&state.ions.density, &e.density, &i.density, dt)?;
        let se = source_terms(Species::Electron, &e, &e.density, &phi, nu_iz, &p, dx);
        let si = source_terms(Species::Ion, &i, &e.density, &phi, nu_iz, &p, dx);
        let next = PlasmaState {
            electrons: add_scaled(&e, dt, &se),
            ions: add_scaled(&i, dt, &si),
            phi,
            nu_iz,
            time: state.time + dt,
        };
        let trace = StepTrace { electron_star: e.density, ion_star: i.density, nu_iz };
        Ok((next, trace))
    }

    pub fn step_lie_modified(&mut self, state: &PlasmaState, dt: f64) -> Result<(PlasmaState, StepTrace)> {
        let p = self.params;
        let dx = self.mesh.dx();

        // steps 1-2: unchanged convective step and potential
        let (e, i) = self.lie_convective(state, dt);
        let phi = solve_poisson(&e.density, &i.density, p.chi, dx)?;

        // step 3: momentum sources only
        let se = source_terms(Species::Electron, &e, &e.density, &phi, 0.0, &p, dx);
        let si = source_terms(Species::Ion, &i, &e.density, &phi, 0.0, &p, dx);
        let momentum_e: Vec<f64> = e.momentum.iter().zip(&se).map(|(m, s)| m + dt * s.m).collect();
        let momentum_i: Vec<f64> = i.momentum.iter().zip(&si).map(|(m, s)| m + dt * s.m).collect();

        // step 4: densities from time n, driven by the new momenta
        let mixed_e = SpeciesState { density: state.electrons.density.clone(), momentum: momentum_e };
        let mixed_i = SpeciesState { density: state.ions.density.clone(), momentum: momentum_i };
        let ge = self.electron_ghosts_for(&mixed_e, &phi, state.nu_iz);
        let gi = ion_ghosts(&mixed_i);
        let (ne, _) = density_convective_step(&mixed_e.density, &mixed_e.momentum, &ge, &self.electron_flux, dt, dx);
        let (ni, _) = density_convective_step(&mixed_i.density, &mixed_i.momentum, &gi, &self.ion_flux, dt, dx);

        // steps 5-6: ionization closure on the rebuilt densities
        let nu_iz = ionization_rate_i0(&state.ions.density, &ne, &ni, dt)?;
        let electrons = SpeciesState {
            density: ne.iter().map(|n| n + dt * nu_iz * n).collect(),
            momentum: mixed_e.momentum,
        };
        let ions = SpeciesState {
            density: ni.iter().zip(&ne).map(|(n, e)| n + dt * nu_iz * e).collect(),
            momentum: mixed_i.momentum,
        };
        let next = PlasmaState { electrons, ions, phi, nu_iz, time: state.time + dt };
        Ok((next, StepTrace { electron_star: ne, ion_star: ni, nu_iz }))
    }

    /// RK2 (midpoint) integration of the sources over `dt/2` with a frozen
    /// potential and the wall-flux ionization rate. Returns the new states and
    /// the last ionization rate used.
    fn source_half_step(
        &self,
        e: &SpeciesState,
        i: &SpeciesState,
        phi: &[f64],
        dt: f64,
    ) -> Result<(SpeciesState, SpeciesState, f64)> {
        let p = &self.params;
        let dx = self.mesh.dx();
        let last = i.len() - 1;
        let rate = |e: &SpeciesState, i: &SpeciesState| {
            ionization_rate_i1((i.momentum[0], i.momentum[last]), &e.density, dx)
        };
        let nu0 = rate(e, i)?;
        let e1 = add_scaled(e, 0.25 * dt, &source_terms(Species::Electron, e, &e.density, phi, nu0, p, dx));
        let i1 = add_scaled(i, 0.25 * dt, &source_terms(Species::Ion, i, &e.density, phi, nu0, p, dx));
        let nu1 = rate(&e1, &i1)?;
        let e2 = add_scaled(e, 0.5 * dt, &source_terms(Species::Electron, &e1, &e1.density, phi, nu1, p, dx));
        let i2 = add_scaled(i, 0.5 * dt, &source_terms(Species::Ion, &i1, &e1.density, phi, nu1, p, dx));
        Ok((e2, i2, nu1))
    }

    pub fn step_strang(&mut self, state: &PlasmaState, dt: f64) -> Result<(PlasmaState, StepTrace)> {
        let p = self.params;
        let dx = self.mesh.dx();
        let (e2, i2, _) = self.source_half_step(&state.electrons, &state.ions, &state.phi, dt)?;

        let ge = self.electron_ghosts_for(&e2, &state.phi, state.nu_iz);
        let gi = ion_ghosts(&i2);
        self.check_ion_boundary(&i2);
        let e3 = muscl_convective_step(&e2, &ge, &self.electron_flux, dt, dx).state;
        let i3 = muscl_convective_step(&i2, &gi, &self.ion_flux, dt, dx).state;

        let phi = solve_poisson(&e3.density, &i3.density, p.chi, dx)?;
        let (electrons, ions, nu_iz) = self.source_half_step(&e3, &i3, &phi, dt)?;
        let next = PlasmaState { electrons, ions, phi, nu_iz, time: state.time + dt };
        Ok((next, StepTrace { electron_star: e3.density, ion_star: i3.density, nu_iz }))
    }

    /// Stability budget for the next step.
    pub fn choose_dt(&self, state: &PlasmaState) -> TimeStepBudget {
        let p = &self.params;
        let dx = self.mesh.dx();
        let (ge, _) = electron_ghosts(&state.electrons, &state.phi, self.config.electron_bc, p, state.nu_iz, dx);
        let gi = ion_ghosts(&state.ions);
        let n = state.n_cells();
        let dt_convective = convective_dt(
            (&self.electron_flux, (0..=n).map(|k| face_states(&state.electrons, &ge, k))),
            (&self.ion_flux, (0..=n).map(|k| face_states(&state.ions, &gi, k))),
            dx,
        );
        let ctx = SourceContext {
            nu_iz: state.nu_iz,
            nu_e: p.nu_e,
            nu_i: collision_rates(Species::Ion, &state.ions, p),
            plasma_period: f64::INFINITY,
        };
        let dt_source = source_dt(&ctx);
        let dt_plasma = p.plasma_period();
        let safe = self.config.cfl_safety * dt_convective.min(dt_source).min(dt_plasma);
        let (dt_chosen, cap_exceeds_budget) = match self.config.dt_cap {
            Some(cap) => (cap, cap > safe),
            None => (safe, false),
        };
        TimeStepBudget { dt_convective, dt_source, dt_plasma, dt_chosen, cap_exceeds_budget }
    }

    /// Steps until the time reaches `t_final` (the last step may overshoot it
    /// by less than one step) or until the densities are steady.
    pub fn run(&mut self, state: PlasmaState, observer: &mut dyn RunObserver) -> core::result::Result<RunOutcome, RunFailure> {
        let mut state = state;
        if let Err(error) = self.prepare(&mut state) {
            return Err(RunFailure { error, last_good: state, steps: 0, warnings: self.warnings });
        }
        let t_final = self.config.t_final;
        let mut steps = 0u64;
        let mut quiet_steps = 0u64;
        let mut residual = 0.0;
        let mut last_budget = None;
        let mut trace = Vec::new();
        let mut next_snapshot_time = match self.config.cadence {
            Some(Cadence::Time(dt)) => state.time + dt,
            _ => f64::INFINITY,
        };
        let mut steady = false;

        loop {
            let budget = self.choose_dt(&state);
            // full steps only: a truncated last step would knock a stiff
            // split state off its discrete equilibrium
            if t_final - state.time <= 1e-9 * budget.dt_chosen {
                break;
            }
            let dt = budget.dt_chosen;
            if budget.cap_exceeds_budget {
                self.warnings.dt_cap_violations += 1;
            }
            let next = match self.step(&state, dt) {
                Ok(next) if next.is_finite() => next,
                // non-finite fields, or densities driven to a non-positive total
                Ok(_) | Err(Error::DegenerateState(_)) => {
                    let error = Error::Instability { step: steps + 1, time: state.time + dt };
                    return Err(RunFailure { error, last_good: state, steps, warnings: self.warnings });
                }
                Err(error) => return Err(RunFailure { error, last_good: state, steps, warnings: self.warnings }),
            };
            residual = density_change_rate(&state, &next, dt);
            state = next;
            steps += 1;
            last_budget = Some(budget);
            observer.on_step(steps, &state, &budget);

            let snapshot = match self.config.cadence {
                Some(Cadence::Steps(k)) => steps.is_multiple_of(k),
                Some(Cadence::Time(every)) if state.time >= next_snapshot_time => {
                    while next_snapshot_time <= state.time {
                        next_snapshot_time += every;
                    }
                    true
                }
                _ => false,
            };
            if snapshot {
                observer.on_snapshot(steps, &state);
            }
            if steps.is_multiple_of(self.config.trace_every) {
                trace.push(DiagnosticsRecord::measure(steps, &state, &self.mesh, residual, dt));
            }

            quiet_steps = if residual < self.config.steady_tol { quiet_steps + 1 } else { 0 };
            if quiet_steps >= self.config.steady_window {
                steady = true;
                break;
            }
        }
        if trace.last().is_none_or(|r| r.step != steps) {
            let dt = last_budget.map_or(0.0, |b| b.dt_chosen);
            trace.push(DiagnosticsRecord::measure(steps, &state, &self.mesh, residual, dt));
        }
        Ok(RunOutcome { state, steps, steady, steady_residual: residual, last_budget, trace, warnings: self.warnings })
    }
}

/// `max_j |n^{new} − n^{old}| / dt` over both species.
pub fn density_change_rate(old: &PlasmaState, new: &PlasmaState, dt: f64) -> f64 {
    let species = [
        (&old.electrons.density, &new.electrons.density),
        (&old.ions.density, &new.ions.density),
    ];
    species
        .iter()
        .flat_map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| (y - x).abs()))
        .fold(0.0, f64::max)
        / dt
}
