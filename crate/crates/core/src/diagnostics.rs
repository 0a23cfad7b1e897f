//! Measurements on snapshots: ambipolarity, potential peak, sheath
//! oscillations, numerical-diffusion indicator and bulk profile fits.

use alloc::vec::Vec;

use crate::mesh::{Mesh, PlasmaState, SpeciesState};
use crate::params::{theoretical_targets, NondimParams};
use crate::scheme::TimeStepBudget;

/// Sheath half-width in Debye lengths used for region masks.
pub const SHEATH_WIDTH_DEBYE: f64 = 5.0;

/// `F_e − F_i` in every cell.
pub fn particle_flux_mismatch(state: &PlasmaState) -> Vec<f64> {
    state.electrons.momentum.iter().zip(&state.ions.momentum).map(|(e, i)| e - i).collect()
}

/// `max |F_e − F_i| / max |F_i|`, zero when the ions are at rest.
pub fn ambipolarity_error(state: &PlasmaState) -> f64 {
    let scale = state.ions.momentum.iter().fold(0.0f64, |a, m| a.max(m.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    particle_flux_mismatch(state).iter().fold(0.0f64, |a, d| a.max(d.abs())) / scale
}

/// Cell where `|F_e − F_i|` is largest (first one on ties).
pub fn mismatch_peak(state: &PlasmaState) -> usize {
    let d = particle_flux_mismatch(state);
    let mut best = 0;
    for (j, v) in d.iter().enumerate() {
        if v.abs() > d[best].abs() {
            best = j;
        }
    }
    best
}

/// Cells within `SHEATH_WIDTH_DEBYE` Debye lengths of either wall.
pub fn sheath_mask(mesh: &Mesh, chi: f64) -> Vec<bool> {
    let width = SHEATH_WIDTH_DEBYE * libm::sqrt(chi);
    mesh.centers().map(|x| x < width || 1.0 - x < width).collect()
}

/// Share of the second-difference energy in a momentum field, in `[0, 1]`:
/// `Σ (m_{j+1} − 2 m_j + m_{j−1})² / (4 Σ (m_j − m̄)²)`.
pub fn oscillation_index(momentum: &[f64]) -> f64 {
    const FLOOR: f64 = 1e-30;
    let n = momentum.len();
    if n < 3 {
        return 0.0;
    }
    let mean = momentum.iter().sum::<f64>() / n as f64;
    let spread: f64 = momentum.iter().map(|m| (m - mean) * (m - mean)).sum();
    let rough: f64 = momentum
        .windows(3)
        .map(|w| {
            let d = w[2] - 2.0 * w[1] + w[0];
            d * d
        })
        .sum();
    (rough / (4.0 * spread + FLOOR)).min(1.0)
}

/// `n_e dx / sqrt(ε χ)` per cell: size of the electron diffusion that a
/// Rusanov flux adds relative to the field coupling.
pub fn numerical_diffusion_estimate(electrons: &SpeciesState, p: &NondimParams, dx: f64) -> Vec<f64> {
    let scale = dx / p.plasma_period();
    electrons.density.iter().map(|n| n * scale).collect()
}

pub fn phi_peak(state: &PlasmaState) -> f64 {
    state.phi.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Mean `|u_i|` over the two cells just outside the sheath masks.
pub fn ion_mach_at_sheath_edge(state: &PlasmaState, mesh: &Mesh, p: &NondimParams) -> f64 {
    let mask = sheath_mask(mesh, p.chi);
    let n = mask.len();
    let left = mask.iter().position(|m| !m).unwrap_or(n / 2);
    let right = mask.iter().rposition(|m| !m).unwrap_or(n / 2);
    let u = |j: usize| state.ions.cell(j).velocity().abs();
    0.5 * (u(left) + u(right)) / p.bohm_speed()
}

/// Mean momentum jump between the two outermost cells at each wall.
pub fn wall_momentum_jump(species: &SpeciesState) -> f64 {
    let n = species.len();
    let m = &species.momentum;
    0.5 * ((m[1] - m[0]).abs() + (m[n - 1] - m[n - 2]).abs())
}

/// Least-squares fit of `a cos(b (x − ½))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosineFit {
    pub amplitude: f64,
    pub wavenumber: f64,
    /// `max |y − fit| / max |y|`.
    pub max_relative_residual: f64,
}

impl CosineFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.amplitude * libm::cos(self.wavenumber * (x - 0.5))
    }
}

/// Fits `a cos(b (x − ½))` with `b ∈ (0, 2π]`. For each `b` the amplitude
/// is linear least squares; `b` is found by a grid search refined with a
/// golden-section search.
pub fn fit_cosine(x: &[f64], y: &[f64]) -> CosineFit {
    let sse = |b: f64| {
        let (mut cy, mut cc) = (0.0, 0.0);
        for (xi, yi) in x.iter().zip(y) {
            let c = libm::cos(b * (xi - 0.5));
            cy += c * yi;
            cc += c * c;
        }
        let a = if cc > 0.0 { cy / cc } else { 0.0 };
        let r: f64 = x.iter().zip(y).map(|(xi, yi)| {
            let d = yi - a * libm::cos(b * (xi - 0.5));
            d * d
        }).sum();
        (r, a)
    };
    let upper = 2.0 * core::f64::consts::PI;
    const GRID: usize = 400;
    let h = upper / GRID as f64;
    let mut best = 1;
    let mut best_r = f64::INFINITY;
    for k in 1..=GRID {
        let r = sse(k as f64 * h).0;
        if r < best_r {
            best_r = r;
            best = k;
        }
    }
    let (mut lo, mut hi) = ((best as f64 - 1.0) * h, ((best as f64 + 1.0) * h).min(upper));
    let g = 0.5 * (libm::sqrt(5.0) - 1.0);
    for _ in 0..80 {
        let c = hi - g * (hi - lo);
        let d = lo + g * (hi - lo);
        if sse(c).0 < sse(d).0 {
            hi = d;
        } else {
            lo = c;
        }
    }
    let b = 0.5 * (lo + hi);
    let (_, a) = sse(b);
    let fit = CosineFit { amplitude: a, wavenumber: b, max_relative_residual: 0.0 };
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let worst = x.iter().zip(y).fold(0.0f64, |m, (xi, yi)| m.max((yi - fit.eval(*xi)).abs()));
    CosineFit { max_relative_residual: if scale > 0.0 { worst / scale } else { 0.0 }, ..fit }
}

/// Fit of the ion density outside the sheath masks.
pub fn bulk_density_fit(state: &PlasmaState, mesh: &Mesh, chi: f64) -> CosineFit {
    let mask = sheath_mask(mesh, chi);
    let (x, y): (Vec<f64>, Vec<f64>) = mesh
        .centers()
        .zip(&state.ions.density)
        .zip(&mask)
        .filter(|(_, &m)| !m)
        .map(|((x, n), _)| (x, *n))
        .unzip();
    fit_cosine(&x, &y)
}

/// Post-run measurements of one state.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub ambipolarity_err: f64,
    pub phi_peak: f64,
    /// `(φ_peak − target) / target`.
    pub phi_peak_rel_err: f64,
    pub ion_total: f64,
    pub steady_residual: f64,
    pub dt_budget: Option<TimeStepBudget>,
    pub sheath_diffusion_estimate: Vec<f64>,
    pub oscillation_index: f64,
    pub ion_mach_sheath_edge: f64,
}

impl Diagnostics {
    pub fn measure(
        state: &PlasmaState,
        mesh: &Mesh,
        p: &NondimParams,
        steady_residual: f64,
        dt_budget: Option<TimeStepBudget>,
    ) -> Self {
        let peak = phi_peak(state);
        let target = theoretical_targets(p).phi_peak;
        Diagnostics {
            ambipolarity_err: ambipolarity_error(state),
            phi_peak: peak,
            phi_peak_rel_err: (peak - target) / target,
            ion_total: state.ions.total(mesh.dx()),
            steady_residual,
            dt_budget,
            sheath_diffusion_estimate: numerical_diffusion_estimate(&state.electrons, p, mesh.dx()),
            oscillation_index: oscillation_index(&state.ions.momentum),
            ion_mach_sheath_edge: ion_mach_at_sheath_edge(state, mesh, p),
        }
    }
}

/// Scalar diagnostics recorded along a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord {
    pub step: u64,
    pub time: f64,
    pub dt: f64,
    pub ambipolarity_err: f64,
    pub phi_peak: f64,
    pub ion_total: f64,
    pub steady_residual: f64,
    pub oscillation_index: f64,
}

impl DiagnosticsRecord {
    pub fn measure(step: u64, state: &PlasmaState, mesh: &Mesh, steady_residual: f64, dt: f64) -> Self {
        DiagnosticsRecord {
            step,
            time: state.time,
            dt,
            ambipolarity_err: ambipolarity_error(state),
            phi_peak: phi_peak(state),
            ion_total: state.ions.total(mesh.dx()),
            steady_residual,
            oscillation_index: oscillation_index(&state.ions.momentum),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn state_with_fluxes(fe: Vec<f64>, fi: Vec<f64>) -> PlasmaState {
        let mesh = Mesh::new(fe.len()).unwrap();
        let mut s = PlasmaState::init_uniform(&mesh);
        s.electrons.momentum = fe;
        s.ions.momentum = fi;
        s
    }

    #[test]
    fn ambipolarity_cases() {
        let f = vec![-1.0, -0.5, 0.0, 0.5, 1.0, 0.2];
        assert_eq!(ambipolarity_error(&state_with_fluxes(f.clone(), f.clone())), 0.0);
        assert_eq!(ambipolarity_error(&state_with_fluxes(vec![0.0; 6], vec![0.0; 6])), 0.0);
        let mut fe = f.clone();
        fe[3] += 0.1;
        let s = state_with_fluxes(fe, f);
        assert_relative_eq!(ambipolarity_error(&s), 0.1, max_relative = 1e-14);
        assert_eq!(mismatch_peak(&s), 3);
    }

    #[test]
    fn oscillation_cases() {
        let linear: Vec<f64> = (0..32).map(|j| 0.1 * j as f64 - 1.0).collect();
        assert!(oscillation_index(&linear) < 1e-28);
        assert_eq!(oscillation_index(&[0.7; 32]), 0.0);
        let saw: Vec<f64> = (0..32).map(|j| if j % 2 == 0 { 1.0 } else { -1.0 }).collect();
        // 16 (N − 2) / (4 N) = 3.75 before the clamp
        assert_eq!(oscillation_index(&saw), 1.0);
        let smooth: Vec<f64> = (0..256).map(|j| libm::tanh((j as f64 - 128.0) / 20.0)).collect();
        assert!(oscillation_index(&smooth) < 0.01);
    }

    #[test]
    fn diffusion_estimate() {
        let p = NondimParams::new(1.0 / 1836.0, 0.0025, 4e-4, 0.0, 0.1).unwrap();
        let e = SpeciesState::uniform(4, 1.0);
        let est = numerical_diffusion_estimate(&e, &p, 1.0 / 256.0);
        assert_relative_eq!(est[0], 8.368861439698652, max_relative = 1e-12);
        let half = numerical_diffusion_estimate(&e, &p, 1.0 / 512.0);
        assert_relative_eq!(half[0], 0.5 * est[0], max_relative = 1e-15);
        assert_eq!(numerical_diffusion_estimate(&SpeciesState::uniform(4, 0.0), &p, 0.01)[0], 0.0);
    }

    #[test]
    fn mask_width() {
        let mesh = Mesh::new(256).unwrap();
        let mask = sheath_mask(&mesh, 4e-4);
        // 5 sqrt(χ) = 0.1 → cells with centre below 0.1: 26 per wall
        assert_eq!(mask.iter().filter(|m| **m).count(), 52);
        assert!(mask[0] && mask[255] && !mask[128]);
    }

    #[test]
    fn recovers_cosine() {
        let x: Vec<f64> = (0..100).map(|j| 0.1 + 0.8 * j as f64 / 99.0).collect();
        let y: Vec<f64> = x.iter().map(|x| 0.8 * libm::cos(2.5 * (x - 0.5))).collect();
        let fit = fit_cosine(&x, &y);
        assert_relative_eq!(fit.amplitude, 0.8, max_relative = 1e-6);
        assert_relative_eq!(fit.wavenumber, 2.5, max_relative = 1e-6);
        assert!(fit.max_relative_residual < 1e-6);

        let flat = vec![1.0; 100];
        assert!(fit_cosine(&x, &flat).max_relative_residual < 1e-3);
    }

    #[test]
    fn wall_jump() {
        let s = SpeciesState { density: vec![1.0; 4], momentum: vec![-2.0, -1.0, 1.0, 1.5] };
        assert_eq!(wall_momentum_jump(&s), 0.75);
    }

    proptest! {
        #[test]
        fn oscillation_shift_and_sign_invariant(
            m in proptest::collection::vec(-3.0f64..3.0, 8..64), c in -10.0f64..10.0,
        ) {
            let a = oscillation_index(&m);
            let shifted: Vec<f64> = m.iter().map(|v| v + c).collect();
            let flipped: Vec<f64> = m.iter().map(|v| -v).collect();
            prop_assert!((0.0..=1.0).contains(&a));
            prop_assert!((oscillation_index(&shifted) - a).abs() <= 1e-9 * (1.0 + a));
            prop_assert_eq!(oscillation_index(&flipped), a);
        }

        #[test]
        fn ambipolarity_mirror_invariant(
            fe in proptest::collection::vec(-3.0f64..3.0, 8), fi in proptest::collection::vec(-3.0f64..3.0, 8),
        ) {
            let s = state_with_fluxes(fe, fi);
            let a = ambipolarity_error(&s);
            prop_assert!(a >= 0.0);
            prop_assert_eq!(ambipolarity_error(&s.mirrored()), a);
        }
    }
}
