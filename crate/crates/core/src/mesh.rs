//! Uniform cell-centred grid on `[0, 1]` and the evolving plasma state.
//!
//! Fields are stored one sequence per conserved quantity. Cell indices are
//! zero-based here: cell `j` spans `[j dx, (j+1) dx]`.

use alloc::vec;
use alloc::vec::Vec;

use crate::riemann::ConservedPair;
use crate::{Error, Result};

/// Densities below this are treated as this value whenever we divide by them.
/// The floor is never written back into the conserved fields.
pub const DENSITY_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Species {
    Electron,
    Ion,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mesh {
    n_cells: usize,
    dx: f64,
}

impl Mesh {
    pub fn new(n_cells: usize) -> Result<Self> {
        if n_cells < 4 {
            return Err(Error::ParameterDomain { name: "n_cells", value: n_cells as f64 });
        }
        Ok(Mesh { n_cells, dx: 1.0 / n_cells as f64 })
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Centre of cell `j`, `(j + ½) dx`.
    pub fn center(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.dx
    }

    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_cells).map(move |j| self.center(j))
    }
}

/// Conserved fields `(n, n u)` of one species.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeciesState {
    pub density: Vec<f64>,
    pub momentum: Vec<f64>,
}

impl SpeciesState {
    pub fn uniform(n_cells: usize, density: f64) -> Self {
        SpeciesState { density: vec![density; n_cells], momentum: vec![0.0; n_cells] }
    }

    pub fn len(&self) -> usize {
        self.density.len()
    }

    pub fn is_empty(&self) -> bool {
        self.density.is_empty()
    }

    pub fn cell(&self, j: usize) -> ConservedPair {
        ConservedPair::new(self.density[j], self.momentum[j])
    }

    /// Velocity of cell `j`. Unlike the floored division used inside the
    /// schemes this refuses densities below [`DENSITY_FLOOR`].
    pub fn velocity(&self, j: usize) -> Result<f64> {
        let n = self.density[j];
        if !(n >= DENSITY_FLOOR) {
            return Err(Error::DegenerateState("density below floor"));
        }
        Ok(self.momentum[j] / n)
    }

    /// `Σ n_j dx`.
    pub fn total(&self, dx: f64) -> f64 {
        self.density.iter().sum::<f64>() * dx
    }

    /// Reflection about `x = ½`: cells reversed, momenta negated.
    pub fn mirrored(&self) -> Self {
        SpeciesState {
            density: self.density.iter().rev().copied().collect(),
            momentum: self.momentum.iter().rev().map(|m| -m).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.density.iter().chain(&self.momentum).all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlasmaState {
    pub electrons: SpeciesState,
    pub ions: SpeciesState,
    /// Potential at cell centres.
    pub phi: Vec<f64>,
    /// Ionization rate from the last completed step.
    pub nu_iz: f64,
    pub time: f64,
}

impl PlasmaState {
    /// Neutral plasma at rest with unit densities.
    pub fn init_uniform(mesh: &Mesh) -> Self {
        let n = mesh.n_cells();
        PlasmaState {
            electrons: SpeciesState::uniform(n, 1.0),
            ions: SpeciesState::uniform(n, 1.0),
            phi: vec![0.0; n],
            nu_iz: 0.0,
            time: 0.0,
        }
    }

    pub fn n_cells(&self) -> usize {
        self.phi.len()
    }

    pub fn mirrored(&self) -> Self {
        PlasmaState {
            electrons: self.electrons.mirrored(),
            ions: self.ions.mirrored(),
            phi: self.phi.iter().rev().copied().collect(),
            nu_iz: self.nu_iz,
            time: self.time,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.electrons.is_finite()
            && self.ions.is_finite()
            && self.phi.iter().all(|v| v.is_finite())
            && self.nu_iz.is_finite()
    }

    /// Largest pointwise deviation from mirror symmetry, over all fields.
    pub fn mirror_defect(&self) -> f64 {
        let m = self.mirrored();
        let pairs = [
            (&self.electrons.density, &m.electrons.density),
            (&self.electrons.momentum, &m.electrons.momentum),
            (&self.ions.density, &m.ions.density),
            (&self.ions.momentum, &m.ions.momentum),
            (&self.phi, &m.phi),
        ];
        pairs
            .iter()
            .flat_map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }
}
