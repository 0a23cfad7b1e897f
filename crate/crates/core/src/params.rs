//! Physical and non-dimensional parameter sets.
//!
//! The solver consumes [`NondimParams`] only. [`PhysicalSetup`] and
//! [`derive_nondim`] exist to get from laboratory numbers to the three small
//! parameters (mass ratio, temperature ratio, squared normalized Debye length).

use core::f64::consts::PI;

use crate::{Error, Result};

/// CODATA 2018 exact / recommended values, SI units.
pub mod constants {
    pub const BOLTZMANN: f64 = 1.380_649e-23;
    pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
    pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
    pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
}

/// Laboratory description of the discharge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalSetup {
    /// Reference (mean ion) number density, m⁻³.
    pub n0: f64,
    /// Electron temperature, K.
    pub te: f64,
    /// Ion temperature, K.
    pub ti: f64,
    /// Electron-to-ion mass ratio `m_e / m_i`.
    pub mass_ratio: f64,
    /// Wall gap, m.
    pub l0: f64,
    /// Wall gap over the ion mean free path; zero means collisionless.
    pub macro_to_mfp: f64,
    /// Electron-neutral over ion-neutral cross section.
    pub sigma_ratio: f64,
}

impl PhysicalSetup {
    pub fn validate(&self) -> Result<()> {
        positive("n0", self.n0)?;
        positive("te", self.te)?;
        positive("ti", self.ti)?;
        positive("mass_ratio", self.mass_ratio)?;
        if self.mass_ratio > 1.0 {
            return Err(Error::ParameterDomain { name: "mass_ratio", value: self.mass_ratio });
        }
        positive("l0", self.l0)?;
        non_negative("macro_to_mfp", self.macro_to_mfp)?;
        positive("sigma_ratio", self.sigma_ratio)?;
        Ok(())
    }

    /// Debye length `sqrt(k_B T_e ε0 / (e² n0))`, m.
    pub fn debye_length(&self) -> f64 {
        use constants::*;
        libm::sqrt(BOLTZMANN * self.te * VACUUM_PERMITTIVITY
            / (ELEMENTARY_CHARGE * ELEMENTARY_CHARGE * self.n0))
    }

    /// Same gas and neutral background, different wall gap: the ion mean free
    /// path is held fixed, so `macro_to_mfp` scales with the gap.
    pub fn with_wall_gap(&self, l0: f64) -> Self {
        PhysicalSetup {
            l0,
            macro_to_mfp: self.macro_to_mfp * l0 / self.l0,
            ..*self
        }
    }
}

/// The non-dimensional parameter set the schemes run on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NondimParams {
    /// Mass ratio ε = m_e / m_i.
    pub eps: f64,
    /// Temperature ratio κ = T_i / T_e.
    pub kappa: f64,
    /// χ = (λ_D / L0)².
    pub chi: f64,
    /// Constant electron-neutral collision rate ν̄_e.
    pub nu_e: f64,
    pub macro_to_mfp: f64,
    pub sigma_ratio: f64,
}

impl NondimParams {
    /// Builds the set, deriving the electron collision rate from the
    /// collisionality inputs.
    pub fn new(eps: f64, kappa: f64, chi: f64, macro_to_mfp: f64, sigma_ratio: f64) -> Result<Self> {
        positive("eps", eps)?;
        if eps > 1.0 {
            return Err(Error::ParameterDomain { name: "eps", value: eps });
        }
        positive("kappa", kappa)?;
        positive("chi", chi)?;
        non_negative("macro_to_mfp", macro_to_mfp)?;
        positive("sigma_ratio", sigma_ratio)?;
        Ok(NondimParams {
            eps,
            kappa,
            chi,
            nu_e: electron_collision_rate(eps, macro_to_mfp, sigma_ratio),
            macro_to_mfp,
            sigma_ratio,
        })
    }

    pub fn electron_thermal_speed(&self) -> f64 {
        1.0 / libm::sqrt(self.eps)
    }

    pub fn ion_thermal_speed(&self) -> f64 {
        libm::sqrt(self.kappa)
    }

    /// The Bohm speed is the velocity unit.
    pub fn bohm_speed(&self) -> f64 {
        1.0
    }

    /// Speed of the outgoing thermal electron flux at a wall, `1/sqrt(2π ε)`.
    pub fn wall_speed(&self) -> f64 {
        1.0 / libm::sqrt(2.0 * PI * self.eps)
    }

    /// Inverse normalized electron plasma frequency, `sqrt(ε χ)`.
    pub fn plasma_period(&self) -> f64 {
        libm::sqrt(self.eps * self.chi)
    }

    /// Normalized Debye length `sqrt(χ)`.
    pub fn debye_length(&self) -> f64 {
        libm::sqrt(self.chi)
    }

    pub fn is_collisionless(&self) -> bool {
        self.macro_to_mfp == 0.0
    }
}

/// ν̄_e = (σ_en/σ_in) (L0/λ_i) sqrt(8 / (π ε)).
pub fn electron_collision_rate(eps: f64, macro_to_mfp: f64, sigma_ratio: f64) -> f64 {
    sigma_ratio * macro_to_mfp * libm::sqrt(8.0 / (PI * eps))
}

/// Scales a laboratory setup onto the Bohm-speed / wall-gap units.
pub fn derive_nondim(setup: &PhysicalSetup) -> Result<NondimParams> {
    use constants::*;
    setup.validate()?;
    let chi = BOLTZMANN * setup.te * VACUUM_PERMITTIVITY
        / (ELEMENTARY_CHARGE * ELEMENTARY_CHARGE * setup.n0 * setup.l0 * setup.l0);
    NondimParams::new(
        setup.mass_ratio,
        setup.ti / setup.te,
        chi,
        setup.macro_to_mfp,
        setup.sigma_ratio,
    )
}

/// Collisionless floating-wall potential drops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoreticalTargets {
    /// Sheath drop `½ ln(2π ε)` (negative).
    pub v_f: f64,
    /// Pre-sheath drop, ½.
    pub v_s: f64,
    /// Expected potential at the centre of the gap relative to the walls.
    pub phi_peak: f64,
}

pub fn theoretical_targets(p: &NondimParams) -> TheoreticalTargets {
    let v_f = 0.5 * libm::log(2.0 * PI * p.eps);
    let v_s = 0.5;
    TheoreticalTargets { v_f, v_s, phi_peak: v_s - v_f }
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::ParameterDomain { name, value })
    }
}

fn non_negative(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::ParameterDomain { name, value })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn lab() -> PhysicalSetup {
        PhysicalSetup {
            n0: 1e15,
            te: 1.2e5,
            ti: 300.0,
            mass_ratio: 1.0 / 1836.0,
            l0: 0.04,
            macro_to_mfp: 0.0,
            sigma_ratio: 0.1,
        }
    }

    #[test]
    fn debye_ratio_sets_chi() {
        let mut s = lab();
        s.l0 = s.debye_length() / 0.02;
        let p = derive_nondim(&s).unwrap();
        assert_relative_eq!(p.chi, 4e-4, max_relative = 1e-12);
        // about 0.8 mm for these plasma conditions
        assert!((s.debye_length() - 7.5596e-4).abs() < 1e-7);
        assert_relative_eq!(p.kappa, 0.0025, max_relative = 1e-12);
    }

    #[test]
    fn collisionless_has_no_electron_collisions() {
        let p = NondimParams::new(1.0 / 1836.0, 0.0025, 4e-4, 0.0, 0.1).unwrap();
        assert_eq!(p.nu_e, 0.0);
        assert!(p.is_collisionless());
    }

    #[test]
    fn collisional_electron_rate() {
        let p = NondimParams::new(1.0 / 1836.0, 0.0025, 4e-4, 1e3, 0.1).unwrap();
        assert_relative_eq!(p.nu_e, 6837.64258225561, max_relative = 1e-12);
    }

    #[test]
    fn rejects_out_of_domain() {
        assert!(NondimParams::new(0.0, 0.0025, 4e-4, 0.0, 0.1).is_err());
        assert!(NondimParams::new(2.0, 0.0025, 4e-4, 0.0, 0.1).is_err());
        assert!(NondimParams::new(1e-3, -1.0, 4e-4, 0.0, 0.1).is_err());
        assert!(NondimParams::new(1e-3, 0.1, 0.0, 0.0, 0.1).is_err());
        assert!(NondimParams::new(1e-3, 0.1, 1e-4, -1.0, 0.1).is_err());
        assert!(NondimParams::new(1e-3, 0.1, f64::NAN, 0.0, 0.1).is_err());
        let mut s = lab();
        s.te = -1.0;
        assert!(matches!(derive_nondim(&s), Err(Error::ParameterDomain { name: "te", .. })));
    }

    #[test]
    fn derived_speeds() {
        let p = NondimParams::new(1.0 / 1836.0, 0.0025, 4e-4, 0.0, 0.1).unwrap();
        assert_relative_eq!(p.electron_thermal_speed(), 1836f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(p.ion_thermal_speed(), 0.05, max_relative = 1e-14);
        assert_relative_eq!(p.wall_speed(), 17.094106455639025, max_relative = 1e-13);
        assert_relative_eq!(p.plasma_period(), 4.6676002800933664e-4, max_relative = 1e-13);
        assert!(p.wall_speed() < p.electron_thermal_speed());
        assert!(p.ion_thermal_speed() < p.bohm_speed());
    }

    #[test]
    fn target_values() {
        let unit = NondimParams::new(1.0, 0.0025, 4e-4, 0.0, 0.1).unwrap();
        assert_relative_eq!(theoretical_targets(&unit).v_f, 0.918_938_533_204_672_7, max_relative = 1e-14);

        let h = NondimParams::new(1.0 / 1836.0, 0.0025, 4e-4, 0.0, 0.1).unwrap();
        let t = theoretical_targets(&h);
        assert_relative_eq!(t.v_f, -2.838733752385545, max_relative = 1e-13);
        assert_relative_eq!(t.phi_peak, 3.338733752385545, max_relative = 1e-13);

        let ar = NondimParams::new(1.36e-5, 0.0025, 4e-4, 0.0, 0.1).unwrap();
        let t = theoretical_targets(&ar);
        assert_relative_eq!(t.v_f, -4.683781849406461, max_relative = 1e-13);
        assert_relative_eq!(t.phi_peak, 5.183781849406461, max_relative = 1e-13);
        assert!(t.v_f < 0.0 && t.phi_peak > 0.0);
    }

    #[test]
    fn wall_gap_scaling() {
        let s = PhysicalSetup { macro_to_mfp: 250.0, ..lab() };
        let base = derive_nondim(&s).unwrap();
        for c in [0.5, 2.0, 7.3] {
            let scaled = derive_nondim(&s.with_wall_gap(s.l0 * c)).unwrap();
            assert_relative_eq!(scaled.chi, base.chi / (c * c), max_relative = 1e-12);
            assert_relative_eq!(scaled.macro_to_mfp, base.macro_to_mfp * c, max_relative = 1e-12);
            assert_eq!(scaled.eps, base.eps);
            assert_eq!(scaled.kappa, base.kappa);
        }
    }

    proptest::proptest! {
        #[test]
        fn floating_drop_increases_with_mass_ratio(a in 1e-6f64..0.5, b in 1e-6f64..0.5) {
            proptest::prop_assume!(a < b);
            let pa = NondimParams::new(a, 0.01, 1e-4, 0.0, 0.1).unwrap();
            let pb = NondimParams::new(b, 0.01, 1e-4, 0.0, 0.1).unwrap();
            proptest::prop_assert!(theoretical_targets(&pa).v_f < theoretical_targets(&pb).v_f);
        }
    }
}
