//! Ionization closure, neutral collisions, Lorentz force and the time-step
//! limits they impose.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::boundary::potential_ghost;
use crate::mesh::{Species, SpeciesState};
use crate::params::NondimParams;
use crate::riemann::ConservedPair;
use crate::{Error, Result};

/// Ionization rate that refills exactly the ions lost over one step:
/// `ν = (Σ n_i^old − Σ n_i^new) / (dt Σ n_e^new)`.
///
/// The numerator is accumulated cell by cell, which keeps it accurate when the
/// loss is small compared to the inventory.
pub fn ionization_rate_i0(n_i_old: &[f64], n_e_star: &[f64], n_i_star: &[f64], dt: f64) -> Result<f64> {
    let electrons: f64 = n_e_star.iter().sum();
    // NaN passes through so that a blown-up state is caught as non-finite
    if electrons <= 0.0 {
        return Err(Error::DegenerateState("no electrons left for the ionization closure"));
    }
    if !(dt > 0.0) {
        return Err(Error::ParameterDomain { name: "dt", value: dt });
    }
    let lost: f64 = n_i_old.iter().zip(n_i_star).map(|(a, b)| a - b).sum();
    Ok(lost / (dt * electrons))
}

/// Ionization rate from the net ion flux through the walls:
/// `ν = ((n u)_N − (n u)_1) / (Σ n_e dx)`.
pub fn ionization_rate_i1(boundary_ion_momenta: (f64, f64), n_e: &[f64], dx: f64) -> Result<f64> {
    let electrons: f64 = n_e.iter().sum::<f64>() * dx;
    if electrons <= 0.0 {
        return Err(Error::DegenerateState("no electrons left for the ionization closure"));
    }
    let (first, last) = boundary_ion_momenta;
    Ok((last - first) / electrons)
}

/// Ion–neutral collision rate for constant cross sections,
/// `(L0/λ_i) sqrt(8κ/π + (π²/4) u²)`.
#[inline]
pub fn ion_collision_rate(u: f64, kappa: f64, macro_to_mfp: f64) -> f64 {
    if macro_to_mfp == 0.0 {
        return 0.0;
    }
    macro_to_mfp * libm::sqrt(8.0 * kappa / PI + 0.25 * PI * PI * u * u)
}

/// Centred potential gradient at cell `j`, using the grounded-wall ghosts.
#[inline]
pub fn potential_gradient(phi: &[f64], j: usize, dx: f64) -> f64 {
    let n = phi.len();
    let left = if j == 0 { potential_ghost(phi[0]) } else { phi[j - 1] };
    let right = if j + 1 == n { potential_ghost(phi[n - 1]) } else { phi[j + 1] };
    (right - left) / (2.0 * dx)
}

/// Momentum source of one cell: Lorentz force plus neutral friction.
///
/// Electrons: `n ∂φ / ε − ν_e m`; ions: `−n ∂φ − ν_i m`.
#[inline]
pub fn momentum_source(
    cell: ConservedPair,
    species: Species,
    phi_left: f64,
    phi_right: f64,
    dx: f64,
    collision_rate: f64,
    p: &NondimParams,
) -> f64 {
    let grad = (phi_right - phi_left) / (2.0 * dx);
    field_and_friction(cell, species, grad, collision_rate, p)
}

#[inline]
fn field_and_friction(cell: ConservedPair, species: Species, grad: f64, collision_rate: f64, p: &NondimParams) -> f64 {
    match species {
        Species::Electron => cell.n * grad / p.eps - collision_rate * cell.m,
        Species::Ion => -cell.n * grad - collision_rate * cell.m,
    }
}

/// Per-cell collision rates for a species state.
pub fn collision_rates(species: Species, state: &SpeciesState, p: &NondimParams) -> Vec<f64> {
    match species {
        Species::Electron => alloc::vec![p.nu_e; state.len()],
        Species::Ion => (0..state.len())
            .map(|j| ion_collision_rate(state.cell(j).velocity(), p.kappa, p.macro_to_mfp))
            .collect(),
    }
}

/// Full source vector `(ν n_e, momentum source)` of every cell of one species.
pub fn source_terms(
    species: Species,
    state: &SpeciesState,
    electron_density: &[f64],
    phi: &[f64],
    nu_iz: f64,
    p: &NondimParams,
    dx: f64,
) -> Vec<ConservedPair> {
    (0..state.len())
        .map(|j| {
            let cell = state.cell(j);
            let rate = match species {
                Species::Electron => p.nu_e,
                Species::Ion => ion_collision_rate(cell.velocity(), p.kappa, p.macro_to_mfp),
            };
            let grad = potential_gradient(phi, j, dx);
            ConservedPair::new(
                nu_iz * electron_density[j],
                field_and_friction(cell, species, grad, rate, p),
            )
        })
        .collect()
}

/// Inputs of the source-side stability limits.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceContext {
    pub nu_iz: f64,
    pub nu_e: f64,
    /// Ion collision rate of every cell.
    pub nu_i: Vec<f64>,
    /// `sqrt(ε χ)`.
    pub plasma_period: f64,
}

/// `min(1/ν_iz, 1/max(ν_e, ν_i), sqrt(ε χ))`; the ionization limit is skipped
/// while the rate is not positive.
pub fn source_dt(ctx: &SourceContext) -> f64 {
    let mut dt = ctx.plasma_period;
    if ctx.nu_iz > 0.0 {
        dt = dt.min(1.0 / ctx.nu_iz);
    }
    let collisions = ctx.nu_i.iter().copied().fold(ctx.nu_e, f64::max);
    if collisions > 0.0 {
        dt = dt.min(1.0 / collisions);
    }
    dt
}
