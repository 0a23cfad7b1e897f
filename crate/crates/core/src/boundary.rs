//! Ghost cells at the two walls.
//!
//! Ions leave supersonically and are simply extrapolated. Electrons are
//! subsonic at the wall, so only their velocity is imposed (the outgoing
//! thermal flux); the density either is extrapolated (`classical`) or follows
//! from the non-conservative electron momentum balance across the wall face
//! (`consistent`). The potential is zero on both wall faces.

use alloc::format;
use core::fmt;
use core::str::FromStr;

use crate::mesh::SpeciesState;
use crate::params::NondimParams;
use crate::riemann::ConservedPair;
use crate::{Error, Result};

/// Limit on the magnitude of the consistent-ghost exponent.
pub const GHOST_EXPONENT_LIMIT: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WallSide {
    Left,
    Right,
}

impl WallSide {
    /// Outward normal: −1 on the left wall, +1 on the right wall.
    pub fn outward_sign(self) -> f64 {
        match self {
            WallSide::Left => -1.0,
            WallSide::Right => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElectronBc {
    Classical,
    Consistent,
}

impl ElectronBc {
    pub fn name(self) -> &'static str {
        match self {
            ElectronBc::Classical => "classical",
            ElectronBc::Consistent => "consistent",
        }
    }
}

impl fmt::Display for ElectronBc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ElectronBc {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classical" => Ok(ElectronBc::Classical),
            "consistent" => Ok(ElectronBc::Consistent),
            other => Err(Error::Configuration(format!("unknown electron boundary condition `{other}`"))),
        }
    }
}

pub fn ion_ghost(boundary_cell: ConservedPair) -> ConservedPair {
    boundary_cell
}

/// Grounded wall: the potential averages to zero on the wall face.
#[inline]
pub fn potential_ghost(phi_boundary: f64) -> f64 {
    -phi_boundary
}

/// Extrapolated density; momentum chosen so the face average equals
/// `e_n n_B u_wall`.
pub fn electron_ghost_classical(boundary_cell: ConservedPair, side: WallSide, u_wall: f64) -> ConservedPair {
    let n = boundary_cell.n;
    ConservedPair::new(n, 2.0 * side.outward_sign() * n * u_wall - boundary_cell.m)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsistentGhost {
    pub cell: ConservedPair,
    pub phi: f64,
    /// The density exponent hit [`GHOST_EXPONENT_LIMIT`] and was clamped.
    pub clamped: bool,
}

/// Ghost from the steady electron momentum balance across the wall face.
///
/// The velocity averages to `e_n u_wall` on the face, the potential to zero,
/// and the density satisfies
/// `n_G = n_B exp(−ε/2 (u_G² − u_B²) + (φ_G − φ_B) − dx ε (ν_e + ν_iz) u_wall)`.
pub fn electron_ghost_consistent(
    boundary_cell: ConservedPair,
    phi_boundary: f64,
    side: WallSide,
    p: &NondimParams,
    nu_iz: f64,
    dx: f64,
) -> ConsistentGhost {
    let u_wall = p.wall_speed();
    let u_b = boundary_cell.velocity();
    let u_g = 2.0 * side.outward_sign() * u_wall - u_b;
    let phi_g = potential_ghost(phi_boundary);
    let exponent = -0.5 * p.eps * (u_g * u_g - u_b * u_b) + (phi_g - phi_boundary)
        - dx * p.eps * (p.nu_e + nu_iz) * u_wall;
    let clamped = !(exponent.abs() <= GHOST_EXPONENT_LIMIT);
    let exponent = if exponent.is_nan() { 0.0 } else { exponent.clamp(-GHOST_EXPONENT_LIMIT, GHOST_EXPONENT_LIMIT) };
    let n_g = boundary_cell.n * libm::exp(exponent);
    ConsistentGhost { cell: ConservedPair::new(n_g, n_g * u_g), phi: phi_g, clamped }
}

/// Ghost states on both sides of one species.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ghosts {
    pub left: ConservedPair,
    pub right: ConservedPair,
}

pub fn ion_ghosts(ions: &SpeciesState) -> Ghosts {
    Ghosts { left: ion_ghost(ions.cell(0)), right: ion_ghost(ions.cell(ions.len() - 1)) }
}

/// Electron ghosts for the configured condition. The flag reports whether a
/// consistent-ghost exponent had to be clamped on either wall.
pub fn electron_ghosts(
    electrons: &SpeciesState,
    phi: &[f64],
    bc: ElectronBc,
    p: &NondimParams,
    nu_iz: f64,
    dx: f64,
) -> (Ghosts, bool) {
    let last = electrons.len() - 1;
    match bc {
        ElectronBc::Classical => {
            let u_wall = p.wall_speed();
            let ghosts = Ghosts {
                left: electron_ghost_classical(electrons.cell(0), WallSide::Left, u_wall),
                right: electron_ghost_classical(electrons.cell(last), WallSide::Right, u_wall),
            };
            (ghosts, false)
        }
        ElectronBc::Consistent => {
            let l = electron_ghost_consistent(electrons.cell(0), phi[0], WallSide::Left, p, nu_iz, dx);
            let r = electron_ghost_consistent(electrons.cell(last), phi[last], WallSide::Right, p, nu_iz, dx);
            (Ghosts { left: l.cell, right: r.cell }, l.clamped || r.clamped)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn hydrogen() -> NondimParams {
        NondimParams::new(1.0 / 1836.0, 0.0025, 4e-4, 0.0, 0.1).unwrap()
    }

    #[test]
    fn ion_ghost_copies() {
        let c = ConservedPair::new(0.3, 0.5);
        assert_eq!(ion_ghost(c), c);
        assert_eq!(ion_ghost(ion_ghost(c)), c);
    }

    #[test]
    fn potential_ghost_values() {
        assert_eq!(potential_ghost(3.0), -3.0);
        assert_eq!(potential_ghost(0.0), 0.0);
        assert_eq!(potential_ghost(potential_ghost(1.7)), 1.7);
    }

    #[test]
    fn classical_electron_ghost() {
        let p = hydrogen();
        let g = electron_ghost_classical(ConservedPair::new(0.1, 1.0), WallSide::Right, p.wall_speed());
        assert_eq!(g.n, 0.1);
        assert_relative_eq!(g.m, 2.4188212911278053, max_relative = 1e-13);

        let g = electron_ghost_classical(ConservedPair::new(0.4, 0.25), WallSide::Left, 0.0);
        assert_eq!(g.m, -0.25);
    }

    #[test]
    fn consistent_ghost_fixed_point() {
        let p = hydrogen();
        let n_b = 0.37;
        let cell = ConservedPair::new(n_b, n_b * p.wall_speed());
        let g = electron_ghost_consistent(cell, 0.0, WallSide::Right, &p, 0.0, 1.0 / 256.0);
        assert_relative_eq!(g.cell.n, n_b, max_relative = 1e-14);
        assert!(!g.clamped);
    }

    #[test]
    fn consistent_ghost_regression_pin() {
        // u_G = 2 u_wall − 10 = 24.188212911278; exponent = −(ε/2)(u_G² − 100) + 5.6
        let p = hydrogen();
        let cell = ConservedPair::new(0.05, 0.5);
        let g = electron_ghost_consistent(cell, -2.8, WallSide::Right, &p, 0.0, 1.0 / 256.0);
        assert_relative_eq!(g.cell.velocity(), 24.18821291127805, max_relative = 1e-13);
        assert_relative_eq!(g.cell.n, 11.848107500602516, max_relative = 1e-12);
        assert_eq!(g.phi, 2.8);
    }

    #[test]
    fn consistent_ghost_small_mass_limit() {
        // ε u_wall² = 1/(2π) for every ε, so a resting boundary cell keeps a
        // finite kinetic drop exp(−1/π) while the friction term vanishes
        for eps in [1.0 / 1836.0, 1e-12, 1e-300] {
            let p = NondimParams::new(eps, 0.0025, 4e-4, 0.0, 0.1).unwrap();
            let cell = ConservedPair::new(0.8, 0.0);
            let g = electron_ghost_consistent(cell, 0.0, WallSide::Left, &p, 3.0, 0.01);
            let friction = 0.01 * eps * 3.0 * p.wall_speed();
            assert_relative_eq!(g.cell.n, 0.8 * libm::exp(-1.0 / core::f64::consts::PI - friction), max_relative = 1e-12);
        }
    }

    #[test]
    fn consistent_ghost_clamps_exponent() {
        let p = hydrogen();
        let g = electron_ghost_consistent(ConservedPair::new(1.0, 0.0), 40.0, WallSide::Right, &p, 0.0, 0.01);
        assert!(g.clamped);
        assert_relative_eq!(g.cell.n, libm::exp(-50.0), max_relative = 1e-14);
    }

    #[test]
    fn names() {
        assert_eq!("classical".parse::<ElectronBc>().unwrap(), ElectronBc::Classical);
        assert_eq!("consistent".parse::<ElectronBc>().unwrap(), ElectronBc::Consistent);
        assert!("reflective".parse::<ElectronBc>().is_err());
    }

    proptest! {
        #[test]
        fn classical_face_momentum(n in 1e-6f64..3.0, m in -20.0f64..20.0) {
            let p = hydrogen();
            let u_wall = p.wall_speed();
            for side in [WallSide::Left, WallSide::Right] {
                let b = ConservedPair::new(n, m);
                let g = electron_ghost_classical(b, side, u_wall);
                let face = 0.5 * (b.m + g.m);
                let want = side.outward_sign() * n * u_wall;
                prop_assert!((face - want).abs() <= 1e-13 * (1.0 + want.abs() + m.abs()));
            }
        }

        #[test]
        fn ghosts_respect_mirror_symmetry(
            n in 1e-3f64..3.0, m in -20.0f64..20.0, phi in -5.0f64..5.0, nu in 0.0f64..10.0,
        ) {
            let p = NondimParams::new(1.0 / 1836.0, 0.0025, 4e-4, 10.0, 0.1).unwrap();
            let right = ConservedPair::new(n, m);
            let left = right.mirror();
            let gr = electron_ghost_consistent(right, phi, WallSide::Right, &p, nu, 0.01);
            let gl = electron_ghost_consistent(left, phi, WallSide::Left, &p, nu, 0.01);
            prop_assert_eq!(gl.cell, gr.cell.mirror());
            prop_assert_eq!(gl.phi, gr.phi);
            let cr = electron_ghost_classical(right, WallSide::Right, p.wall_speed());
            let cl = electron_ghost_classical(left, WallSide::Left, p.wall_speed());
            prop_assert_eq!(cl, cr.mirror());
        }
    }
}
