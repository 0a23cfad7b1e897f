//! Implicit potential solve with the walls grounded at the cell faces.
//!
//! Discretization: `(φ_{j+1} − 2φ_j + φ_{j−1}) / dx² = (n_e − n_i)_j / χ`,
//! with ghosts `φ_0 = −φ_1` and `φ_{N+1} = −φ_N`, which turns the first and
//! last rows into `(φ_2 − 3φ_1) / dx²` and `(φ_{N−1} − 3φ_N) / dx²`.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// A tridiagonal system `sub[j] x[j−1] + diag[j] x[j] + sup[j] x[j+1] = rhs[j]`.
/// `sub[0]` and `sup[N−1]` are unused.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl TridiagonalSystem {
    /// The grounded-wall Poisson system for the given densities.
    pub fn poisson(n_e: &[f64], n_i: &[f64], chi: f64, dx: f64) -> Result<Self> {
        if !(chi > 0.0) {
            return Err(Error::ParameterDomain { name: "chi", value: chi });
        }
        let n = n_e.len();
        if n < 2 || n_i.len() != n {
            return Err(Error::Configuration(alloc::format!(
                "poisson needs two equal-length density fields of at least 2 cells, got {} and {}",
                n,
                n_i.len()
            )));
        }
        let scale = dx * dx / chi;
        let mut diag = vec![-2.0; n];
        diag[0] = -3.0;
        diag[n - 1] = -3.0;
        Ok(TridiagonalSystem {
            sub: vec![1.0; n],
            diag,
            sup: vec![1.0; n],
            rhs: n_e.iter().zip(n_i).map(|(e, i)| (e - i) * scale).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Thomas elimination. No pivoting: relies on diagonal dominance.
    pub fn solve(&self) -> Vec<f64> {
        let n = self.len();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        c[0] = self.sup[0] / self.diag[0];
        d[0] = self.rhs[0] / self.diag[0];
        for j in 1..n {
            let denom = self.diag[j] - self.sub[j] * c[j - 1];
            c[j] = if j + 1 < n { self.sup[j] / denom } else { 0.0 };
            d[j] = (self.rhs[j] - self.sub[j] * d[j - 1]) / denom;
        }
        let mut x = d;
        for j in (0..n - 1).rev() {
            x[j] -= c[j] * x[j + 1];
        }
        x
    }

    /// Max-norm residual `|A x − rhs|`.
    pub fn residual(&self, x: &[f64]) -> f64 {
        let n = self.len();
        (0..n)
            .map(|j| {
                let mut ax = self.diag[j] * x[j];
                if j > 0 {
                    ax += self.sub[j] * x[j - 1];
                }
                if j + 1 < n {
                    ax += self.sup[j] * x[j + 1];
                }
                (ax - self.rhs[j]).abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn is_diagonally_dominant(&self) -> bool {
        let n = self.len();
        (0..n).all(|j| {
            let off = if j > 0 { self.sub[j].abs() } else { 0.0 } + if j + 1 < n { self.sup[j].abs() } else { 0.0 };
            let d = self.diag[j].abs();
            if j == 0 || j + 1 == n {
                d > off
            } else {
                d >= off
            }
        })
    }
}

/// Potential at cell centres for the given electron and ion densities.
pub fn solve_poisson(n_e: &[f64], n_i: &[f64], chi: f64, dx: f64) -> Result<Vec<f64>> {
    Ok(TridiagonalSystem::poisson(n_e, n_i, chi, dx)?.solve())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResolutionCheck {
    Ok,
    /// The cell is wider than a Debye length; runs may survive but stability
    /// is not guaranteed.
    Underresolved { dx: f64, debye_length: f64 },
}

/// `dx <= sqrt(χ)`.
pub fn poisson_resolution_check(dx: f64, chi: f64) -> ResolutionCheck {
    let debye_length = libm::sqrt(chi);
    if dx <= debye_length {
        ResolutionCheck::Ok
    } else {
        ResolutionCheck::Underresolved { dx, debye_length }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn neutral_plasma_has_zero_potential() {
        let n = vec![0.7; 32];
        let phi = solve_poisson(&n, &n, 4e-4, 1.0 / 32.0).unwrap();
        assert!(phi.iter().all(|&p| p == 0.0));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(solve_poisson(&[1.0; 4], &[1.0; 4], 0.0, 0.25), Err(Error::ParameterDomain { .. })));
        assert!(solve_poisson(&[1.0; 4], &[1.0; 4], -1.0, 0.25).is_err());
        assert!(solve_poisson(&[1.0; 4], &[1.0; 3], 1.0, 0.25).is_err());
    }

    fn manufactured_error(n: usize) -> f64 {
        // rhs (n_e − n_i)/χ = sin(πx), exact φ = −sin(πx)/π²
        let dx = 1.0 / n as f64;
        let x: Vec<f64> = (0..n).map(|j| (j as f64 + 0.5) * dx).collect();
        let ne: Vec<f64> = x.iter().map(|x| libm::sin(PI * x)).collect();
        let ni = vec![0.0; n];
        let phi = solve_poisson(&ne, &ni, 1.0, dx).unwrap();
        x.iter()
            .zip(&phi)
            .map(|(x, p)| (p + libm::sin(PI * x) / (PI * PI)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn manufactured_second_order() {
        let e64 = manufactured_error(64);
        let e128 = manufactured_error(128);
        let e256 = manufactured_error(256);
        for ratio in [e64 / e128, e128 / e256] {
            assert!((ratio - 4.0).abs() <= 0.3, "ratio {ratio}");
        }
    }

    #[test]
    fn residual_and_dominance() {
        let n = 200;
        let ne: Vec<f64> = (0..n).map(|j| 1.0 + 0.3 * libm::sin(j as f64)).collect();
        let ni: Vec<f64> = (0..n).map(|j| 1.0 + 0.2 * libm::cos(0.7 * j as f64)).collect();
        let sys = TridiagonalSystem::poisson(&ne, &ni, 4e-4, 1.0 / n as f64).unwrap();
        assert!(sys.is_diagonally_dominant());
        let x = sys.solve();
        let scale = sys.rhs.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        assert!(sys.residual(&x) <= 1e-10 * scale);
    }

    #[test]
    fn symmetric_rhs_gives_symmetric_potential() {
        let n = 128;
        let ne: Vec<f64> = (0..n).map(|j| {
            let x = (j as f64 + 0.5) / n as f64;
            libm::exp(-((x - 0.5) * (x - 0.5)) / 0.01)
        }).collect();
        let ni = vec![1.0; n];
        let phi = solve_poisson(&ne, &ni, 4e-4, 1.0 / n as f64).unwrap();
        let scale = phi.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        for j in 0..n {
            assert!((phi[j] - phi[n - 1 - j]).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn resolution_check() {
        assert_eq!(poisson_resolution_check(1.0 / 256.0, 4e-4), ResolutionCheck::Ok);
        assert!(matches!(poisson_resolution_check(0.05, 4e-4), ResolutionCheck::Underresolved { .. }));
        assert_eq!(poisson_resolution_check(0.25, 0.0625), ResolutionCheck::Ok);
    }

    proptest::proptest! {
        #[test]
        fn electron_excess_gives_non_positive_potential(
            excess in proptest::collection::vec(0.0f64..2.0, 4..64),
        ) {
            let n = excess.len();
            let ni = vec![1.0; n];
            let ne: Vec<f64> = excess.iter().map(|e| 1.0 + e).collect();
            let phi = solve_poisson(&ne, &ni, 1e-3, 1.0 / n as f64).unwrap();
            proptest::prop_assert!(phi.iter().all(|&p| p <= 1e-15));
        }
    }
}
