//! Interface fluxes for the isothermal Euler subsystems.
//!
//! All solvers share the physical flux `F(n, m) = (m, m²/n + n v_th²)`. They
//! differ only in their wave-speed estimates:
//!
//! | variant               | speeds                                              |
//! |-----------------------|-----------------------------------------------------|
//! | `rusanov`             | `λ = max(|u_L|, |u_R|) + v_th`                       |
//! | `controlled-rusanov`  | `λ = sqrt(ε χ) (max(|u_L|, |u_R|) + v_th)`           |
//! | `hll`                 | `b± = u_Roe ± v_th`                                  |
//! | `fixed-hll`           | `b± = u_Roe ± u_B`                                   |
//! | `scaled-fixed-hll`    | `b± = u_Roe ± max(M u_B, v_th)`, `M = 1/(1 + c dx ν_i)` |
//!
//! HLL speeds are clamped so that `b- <= 0 <= b+`.

use alloc::format;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};
use core::str::FromStr;

use crate::mesh::{Species, DENSITY_FLOOR};
use crate::params::NondimParams;
use crate::sources::ion_collision_rate;
use crate::{Error, Result};

/// One cell's conserved pair `(n, n u)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ConservedPair {
    pub n: f64,
    pub m: f64,
}

impl ConservedPair {
    pub const fn new(n: f64, m: f64) -> Self {
        ConservedPair { n, m }
    }

    /// `m / n`, dividing by the floored density.
    #[inline]
    pub fn velocity(self) -> f64 {
        self.m / self.n.max(DENSITY_FLOOR)
    }

    /// The same cell seen from the other wall.
    pub fn mirror(self) -> Self {
        ConservedPair { n: self.n, m: -self.m }
    }
}

impl Add for ConservedPair {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        ConservedPair::new(self.n + o.n, self.m + o.m)
    }
}

impl Sub for ConservedPair {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        ConservedPair::new(self.n - o.n, self.m - o.m)
    }
}

impl Mul<ConservedPair> for f64 {
    type Output = ConservedPair;
    fn mul(self, u: ConservedPair) -> ConservedPair {
        ConservedPair::new(self * u.n, self * u.m)
    }
}

impl Neg for ConservedPair {
    type Output = Self;
    fn neg(self) -> Self {
        ConservedPair::new(-self.n, -self.m)
    }
}

#[inline]
pub fn physical_flux(u: ConservedPair, v_th: f64) -> ConservedPair {
    ConservedPair::new(u.m, u.m * u.m / u.n.max(DENSITY_FLOOR) + u.n * v_th * v_th)
}

/// Rusanov (local Lax–Friedrichs) flux with an explicit diffusion speed.
#[inline]
pub fn rusanov_flux_with(left: ConservedPair, right: ConservedPair, v_th: f64, lambda: f64) -> ConservedPair {
    let avg = 0.5 * (physical_flux(left, v_th) + physical_flux(right, v_th));
    avg - (0.5 * lambda) * (right - left)
}

pub fn rusanov_flux(left: ConservedPair, right: ConservedPair, v_th: f64) -> ConservedPair {
    let lambda = left.velocity().abs().max(right.velocity().abs()) + v_th;
    rusanov_flux_with(left, right, v_th, lambda)
}

/// HLL flux for given bounding speeds `b- <= 0 <= b+`.
#[inline]
pub fn hll_flux(left: ConservedPair, right: ConservedPair, v_th: f64, b_minus: f64, b_plus: f64) -> ConservedPair {
    let fl = physical_flux(left, v_th);
    let fr = physical_flux(right, v_th);
    let span = b_plus - b_minus;
    if span == 0.0 {
        return 0.5 * (fl + fr);
    }
    let upwind = (1.0 / span) * (b_plus * fl - b_minus * fr);
    upwind + (b_plus * b_minus / span) * (right - left)
}

/// Roe-averaged velocity `(√n_L u_L + √n_R u_R) / (√n_L + √n_R)`.
#[inline]
pub fn roe_velocity(left: ConservedPair, right: ConservedPair) -> f64 {
    let sl = libm::sqrt(left.n.max(DENSITY_FLOOR));
    let sr = libm::sqrt(right.n.max(DENSITY_FLOOR));
    (sl * left.velocity() + sr * right.velocity()) / (sl + sr)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WaveSpeeds {
    /// Rusanov-type symmetric diffusion speed.
    Symmetric { lambda_max: f64 },
    /// HLL-type bounds.
    Bounded { b_minus: f64, b_plus: f64 },
}

impl WaveSpeeds {
    fn bounded(lower: f64, upper: f64) -> Self {
        WaveSpeeds::Bounded { b_minus: lower.min(0.0), b_plus: upper.max(0.0) }
    }

    /// Fastest signal magnitude, as used by the CFL bound.
    pub fn max_abs(&self) -> f64 {
        match *self {
            WaveSpeeds::Symmetric { lambda_max } => lambda_max,
            WaveSpeeds::Bounded { b_minus, b_plus } => b_plus.max(-b_minus),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FluxScheme {
    Rusanov,
    Hll,
    FixedHll,
    ScaledFixedHll,
    ControlledRusanov,
}

impl FluxScheme {
    pub const ALL: [FluxScheme; 5] = [
        FluxScheme::Rusanov,
        FluxScheme::Hll,
        FluxScheme::FixedHll,
        FluxScheme::ScaledFixedHll,
        FluxScheme::ControlledRusanov,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FluxScheme::Rusanov => "rusanov",
            FluxScheme::Hll => "hll",
            FluxScheme::FixedHll => "fixed-hll",
            FluxScheme::ScaledFixedHll => "scaled-fixed-hll",
            FluxScheme::ControlledRusanov => "controlled-rusanov",
        }
    }

    /// Whether the variant may be used for the given species.
    pub fn allowed_for(self, species: Species) -> bool {
        match self {
            FluxScheme::ControlledRusanov => species == Species::Electron,
            FluxScheme::FixedHll | FluxScheme::ScaledFixedHll => species == Species::Ion,
            FluxScheme::Rusanov | FluxScheme::Hll => true,
        }
    }
}

impl fmt::Display for FluxScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FluxScheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FluxScheme::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::Configuration(format!("unknown flux solver `{s}`")))
    }
}

/// Everything a flux variant may need beyond the two cell states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxContext {
    pub v_th: f64,
    /// `sqrt(ε χ)`, for the controlled-diffusion electron flux.
    pub plasma_period: Option<f64>,
    /// Cell width, for the scaled ion diffusion.
    pub dx: Option<f64>,
    /// `(κ, L0/λ_i)` for the ion collision rate inside the scaling factor.
    pub ion_collisions: Option<(f64, f64)>,
    /// The constant `c` in `M = 1/(1 + c dx ν_i)`.
    pub ion_diffusion_tuning: f64,
}

pub const DEFAULT_ION_DIFFUSION_TUNING: f64 = 30.0;

/// Velocity unit.
const BOHM_SPEED: f64 = 1.0;

impl FluxContext {
    /// Full context for one species of the given parameter set.
    pub fn for_species(species: Species, p: &NondimParams, dx: f64, ion_diffusion_tuning: f64) -> Self {
        match species {
            Species::Electron => FluxContext {
                v_th: p.electron_thermal_speed(),
                plasma_period: Some(p.plasma_period()),
                dx: Some(dx),
                ion_collisions: None,
                ion_diffusion_tuning,
            },
            Species::Ion => FluxContext {
                v_th: p.ion_thermal_speed(),
                plasma_period: None,
                dx: Some(dx),
                ion_collisions: Some((p.kappa, p.macro_to_mfp)),
                ion_diffusion_tuning,
            },
        }
    }
}

/// A flux variant bound to a species and its context. Construction checks
/// that the variant is legal for the species and that its context is complete,
/// so the per-interface methods are infallible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxPolicy {
    scheme: FluxScheme,
    species: Species,
    v_th: f64,
    plasma_period: f64,
    dx: f64,
    kappa: f64,
    macro_to_mfp: f64,
    tuning: f64,
}

impl FluxPolicy {
    pub fn new(scheme: FluxScheme, species: Species, ctx: &FluxContext) -> Result<Self> {
        if !scheme.allowed_for(species) {
            return Err(Error::Configuration(format!(
                "flux solver `{scheme}` cannot be used for {species:?} species"
            )));
        }
        let missing = |what: &str| Error::Configuration(format!("flux solver `{scheme}` needs {what}"));
        let mut policy = FluxPolicy {
            scheme,
            species,
            v_th: ctx.v_th,
            plasma_period: 1.0,
            dx: 0.0,
            kappa: 0.0,
            macro_to_mfp: 0.0,
            tuning: ctx.ion_diffusion_tuning,
        };
        match scheme {
            FluxScheme::ControlledRusanov => {
                policy.plasma_period = ctx.plasma_period.ok_or_else(|| missing("sqrt(eps chi)"))?;
            }
            FluxScheme::ScaledFixedHll => {
                policy.dx = ctx.dx.ok_or_else(|| missing("the cell width"))?;
                let (kappa, mfp) = ctx.ion_collisions.ok_or_else(|| missing("the ion collision parameters"))?;
                policy.kappa = kappa;
                policy.macro_to_mfp = mfp;
                if !(policy.tuning >= 0.0) {
                    return Err(Error::Configuration(format!(
                        "ion_diffusion_tuning must be non-negative, got {}",
                        policy.tuning
                    )));
                }
            }
            _ => {}
        }
        Ok(policy)
    }

    pub fn scheme(&self) -> FluxScheme {
        self.scheme
    }

    pub fn species(&self) -> Species {
        self.species
    }

    pub fn thermal_speed(&self) -> f64 {
        self.v_th
    }

    /// The variant used for full-state (density + momentum) convective steps.
    /// Controlled diffusion only ever applies to density fluxes.
    pub fn full_state(&self) -> FluxPolicy {
        match self.scheme {
            FluxScheme::ControlledRusanov => FluxPolicy { scheme: FluxScheme::Rusanov, ..*self },
            _ => *self,
        }
    }

    /// Scaling factor `M = 1/(1 + c dx ν_i)` of the scaled fixed-HLL ion flux.
    pub fn ion_diffusion_scale(&self, velocity: f64) -> f64 {
        let nu_i = ion_collision_rate(velocity, self.kappa, self.macro_to_mfp);
        1.0 / (1.0 + self.tuning * self.dx * nu_i)
    }

    #[inline]
    pub fn wave_speeds(&self, left: ConservedPair, right: ConservedPair) -> WaveSpeeds {
        match self.scheme {
            FluxScheme::Rusanov => WaveSpeeds::Symmetric {
                lambda_max: left.velocity().abs().max(right.velocity().abs()) + self.v_th,
            },
            FluxScheme::ControlledRusanov => WaveSpeeds::Symmetric {
                lambda_max: self.plasma_period
                    * (left.velocity().abs().max(right.velocity().abs()) + self.v_th),
            },
            FluxScheme::Hll => {
                let u = roe_velocity(left, right);
                WaveSpeeds::bounded(u - self.v_th, u + self.v_th)
            }
            FluxScheme::FixedHll => {
                let u = roe_velocity(left, right);
                WaveSpeeds::bounded(u - BOHM_SPEED, u + BOHM_SPEED)
            }
            FluxScheme::ScaledFixedHll => {
                let u = roe_velocity(left, right);
                // ν_i evaluated at the Roe velocity of the interface
                let c = (self.ion_diffusion_scale(u) * BOHM_SPEED).max(self.v_th);
                WaveSpeeds::bounded(u - c, u + c)
            }
        }
    }

    /// Physical signal speed bound for the CFL condition. Diffusion rescaling
    /// (controlled Rusanov, the ion scaling factor) does not change it.
    #[inline]
    pub fn signal_speed(&self, left: ConservedPair, right: ConservedPair) -> f64 {
        match self.scheme {
            FluxScheme::ControlledRusanov => {
                left.velocity().abs().max(right.velocity().abs()) + self.v_th
            }
            FluxScheme::ScaledFixedHll => {
                let u = roe_velocity(left, right);
                WaveSpeeds::bounded(u - BOHM_SPEED, u + BOHM_SPEED).max_abs()
            }
            _ => self.wave_speeds(left, right).max_abs(),
        }
    }

    #[inline]
    pub fn flux(&self, left: ConservedPair, right: ConservedPair) -> ConservedPair {
        match self.wave_speeds(left, right) {
            WaveSpeeds::Symmetric { lambda_max } => rusanov_flux_with(left, right, self.v_th, lambda_max),
            WaveSpeeds::Bounded { b_minus, b_plus } => hll_flux(left, right, self.v_th, b_minus, b_plus),
        }
    }
}

/// Largest stable convective step `dx / (2 max λ)` over the given interfaces
/// of both species. Each iterator yields `(left, right)` interface states.
pub fn convective_dt<I, J>(electrons: (&FluxPolicy, I), ions: (&FluxPolicy, J), dx: f64) -> f64
where
    I: IntoIterator<Item = (ConservedPair, ConservedPair)>,
    J: IntoIterator<Item = (ConservedPair, ConservedPair)>,
{
    let fastest = |policy: &FluxPolicy, faces: &mut dyn Iterator<Item = (ConservedPair, ConservedPair)>| {
        faces.map(|(l, r)| policy.signal_speed(l, r)).fold(0.0, f64::max)
    };
    let se = fastest(electrons.0, &mut electrons.1.into_iter());
    let si = fastest(ions.0, &mut ions.1.into_iter());
    let s = se.max(si);
    if s > 0.0 {
        dx / (2.0 * s)
    } else {
        f64::INFINITY
    }
}
