use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sheath_core::boundary::{electron_ghosts, ion_ghosts, ElectronBc};
use sheath_core::mesh::{Mesh, PlasmaState, Species, SpeciesState};
use sheath_core::params::NondimParams;
use sheath_core::riemann::{FluxContext, FluxPolicy, FluxScheme};
use sheath_core::scheme::{convective_step, muscl_convective_step, Integrator, SchemeConfig, Splitting};
use sheath_core::sources::{ionization_rate_i0, ionization_rate_i1};

fn hydrogen() -> NondimParams {
    NondimParams::new(1.0 / 1836.0, 0.0025, 4e-4, 0.0, 0.1).unwrap()
}

fn random_species(rng: &mut ChaCha8Rng, n: usize, max_speed: f64) -> SpeciesState {
    let density: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..1.5)).collect();
    let momentum = density.iter().map(|d| d * rng.gen_range(-max_speed..max_speed)).collect();
    SpeciesState { density, momentum }
}

/// Symmetric, non-uniform start: a bump in both densities, outward drifts.
fn symmetric_state(mesh: &Mesh) -> PlasmaState {
    let mut s = PlasmaState::init_uniform(mesh);
    let n = mesh.n_cells();
    for j in 0..n {
        let x = mesh.center(j);
        let y = mesh.center(n - 1 - j);
        let bump = 0.2 * ((-(x - 0.5) * (x - 0.5) / 0.02).exp() + (-(y - 0.5) * (y - 0.5) / 0.02).exp());
        let drift = 0.3 * ((x - 0.5) - (y - 0.5));
        s.ions.density[j] = 1.0 + bump;
        s.electrons.density[j] = 1.0 + bump;
        s.ions.momentum[j] = s.ions.density[j] * drift;
        s.electrons.momentum[j] = s.electrons.density[j] * drift;
    }
    s
}

fn config(splitting: Splitting) -> SchemeConfig {
    match splitting {
        Splitting::LieModified => SchemeConfig::default(),
        Splitting::LieClassical => SchemeConfig {
            splitting,
            electron_flux: FluxScheme::Rusanov,
            ion_flux: FluxScheme::Rusanov,
            electron_bc: ElectronBc::Classical,
            ..SchemeConfig::default()
        },
        Splitting::Strang => SchemeConfig {
            splitting,
            electron_flux: FluxScheme::Rusanov,
            ion_flux: FluxScheme::FixedHll,
            ..SchemeConfig::default()
        },
    }
}

#[test]
fn convective_updates_telescope() {
    let p = hydrogen();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = 64;
    let dx = 1.0 / n as f64;
    for _ in 0..20 {
        let e = random_species(&mut rng, n, 30.0);
        let i = random_species(&mut rng, n, 2.0);
        let phi: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..3.0)).collect();
        let (ge, _) = electron_ghosts(&e, &phi, ElectronBc::Consistent, &p, 0.5, dx);
        let gi = ion_ghosts(&i);
        for (species, state, ghosts) in [(Species::Electron, &e, ge), (Species::Ion, &i, gi)] {
            for scheme in FluxScheme::ALL.into_iter().filter(|s| s.allowed_for(species)) {
                let pol = FluxPolicy::new(scheme, species, &FluxContext::for_species(species, &p, dx, 30.0)).unwrap();
                let dt = 1e-5;
                for out in [
                    convective_step(state, &ghosts, &pol, dt, dx),
                    muscl_convective_step(state, &ghosts, &pol, dt, dx),
                ] {
                    let before = state.total(dx);
                    let after = out.state.total(dx);
                    let through = dt * (out.right_flux.n - out.left_flux.n);
                    assert!(((after - before) + through).abs() <= 1e-12 * before, "{scheme}");

                    let mb: f64 = state.momentum.iter().sum::<f64>() * dx;
                    let ma: f64 = out.state.momentum.iter().sum::<f64>() * dx;
                    let scale: f64 = state.momentum.iter().map(|m| m.abs()).sum::<f64>() * dx;
                    let through = dt * (out.right_flux.m - out.left_flux.m);
                    assert!(((ma - mb) + through).abs() <= 1e-12 * scale.max(through.abs()), "{scheme}");
                }
            }
        }
    }
}

#[test]
fn lie_steps_keep_the_ion_inventory() {
    let p = hydrogen();
    let mesh = Mesh::new(128).unwrap();
    for splitting in [Splitting::LieClassical, Splitting::LieModified] {
        let mut integ = Integrator::new(mesh, p, config(splitting)).unwrap();
        let mut state = symmetric_state(&mesh);
        let start = state.ions.total(mesh.dx());
        for _ in 0..2000 {
            let dt = integ.choose_dt(&state).dt_chosen;
            let next = integ.step(&state, dt).unwrap();
            let a = state.ions.total(mesh.dx());
            let b = next.ions.total(mesh.dx());
            assert!((a - b).abs() <= 1e-12 * a);
            state = next;
        }
        let end = state.ions.total(mesh.dx());
        assert!((end - start).abs() <= 1e-12 * start, "{splitting}: {start} -> {end}");
    }
}

#[test]
fn ionization_adds_the_same_density_to_both_species() {
    let p = hydrogen();
    let mesh = Mesh::new(128).unwrap();
    for splitting in [Splitting::LieClassical, Splitting::LieModified] {
        let mut integ = Integrator::new(mesh, p, config(splitting)).unwrap();
        let mut state = symmetric_state(&mesh);
        for step in 0..500 {
            let dt = integ.choose_dt(&state).dt_chosen;
            let (next, trace) = integ.step_traced(&state, dt).unwrap();
            for j in 0..mesh.n_cells() {
                let after = next.electrons.density[j] - next.ions.density[j];
                let star = trace.electron_star[j] - trace.ion_star[j];
                assert!((after - star).abs() <= 1e-12, "{splitting} step {step} cell {j}");
            }
            state = next;
        }
    }
}

#[test]
fn mirror_symmetry_survives_long_runs() {
    let p = NondimParams::new(1.0 / 1836.0, 0.0025, 4e-4, 1e3, 0.1).unwrap();
    let mesh = Mesh::new(128).unwrap();
    for splitting in [Splitting::LieClassical, Splitting::LieModified, Splitting::Strang] {
        let mut integ = Integrator::new(mesh, p, config(splitting)).unwrap();
        let mut state = symmetric_state(&mesh);
        integ.prepare(&mut state).unwrap();
        for _ in 0..10_000 {
            let dt = integ.choose_dt(&state).dt_chosen;
            state = integ.step(&state, dt).unwrap();
        }
        let defect = state.mirror_defect();
        assert!(defect <= 1e-10, "{splitting}: {defect}");
    }
}

#[test]
fn wall_flux_and_inventory_rates_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let n = rng.gen_range(4..12);
        let dx = 1.0 / n as f64;
        let ions = random_species(&mut rng, n, 1.5);
        let n_e_star: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.2)).collect();
        let ctx = FluxContext::for_species(Species::Ion, &hydrogen(), dx, 30.0);
        for scheme in [FluxScheme::Rusanov, FluxScheme::FixedHll, FluxScheme::ScaledFixedHll] {
            let pol = FluxPolicy::new(scheme, Species::Ion, &ctx).unwrap();
            // Courant number at most 0.25
            let dt = 0.1 * dx;
            let star = convective_step(&ions, &ion_ghosts(&ions), &pol, dt, dx).state;
            let i0 = ionization_rate_i0(&ions.density, &n_e_star, &star.density, dt).unwrap();
            let i1 = ionization_rate_i1((ions.momentum[0], ions.momentum[n - 1]), &n_e_star, dx).unwrap();
            assert!((i0 - i1).abs() <= 1e-12 * i1.abs().max(1e-300), "{scheme}: {i0} vs {i1}");
        }
    }
}

#[test]
fn mirrored_start_gives_mirrored_step() {
    let p = hydrogen();
    let mesh = Mesh::new(64).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let state = PlasmaState {
        electrons: random_species(&mut rng, 64, 20.0),
        ions: random_species(&mut rng, 64, 1.0),
        phi: (0..64).map(|_| rng.gen_range(0.0..2.0)).collect(),
        nu_iz: 0.3,
        time: 0.0,
    };
    for splitting in [Splitting::LieClassical, Splitting::LieModified, Splitting::Strang] {
        let mut a = Integrator::new(mesh, p, config(splitting)).unwrap();
        let mut b = a.clone();
        let x = a.step(&state, 1e-6).unwrap();
        let y = b.step(&state.mirrored(), 1e-6).unwrap().mirrored();
        let scale = x.electrons.momentum.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let gap = |u: &[f64], v: &[f64]| u.iter().zip(v).fold(0.0f64, |m, (s, t)| m.max((s - t).abs()));
        assert!(gap(&x.electrons.density, &y.electrons.density) <= 1e-12);
        assert!(gap(&x.ions.density, &y.ions.density) <= 1e-12);
        assert!(gap(&x.electrons.momentum, &y.electrons.momentum) <= 1e-12 * scale);
        assert!(gap(&x.ions.momentum, &y.ions.momentum) <= 1e-12);
        assert!(gap(&x.phi, &y.phi) <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn first_order_ion_step_telescopes(
        dens in proptest::collection::vec(0.05f64..2.0, 4..40),
        speeds in proptest::collection::vec(-3.0f64..3.0, 40),
        dt in 1e-6f64..1e-3,
    ) {
        let n = dens.len();
        let dx = 1.0 / n as f64;
        let s = SpeciesState { momentum: dens.iter().zip(&speeds).map(|(d, u)| d * u).collect(), density: dens };
        let ctx = FluxContext::for_species(Species::Ion, &hydrogen(), dx, 30.0);
        let pol = FluxPolicy::new(FluxScheme::FixedHll, Species::Ion, &ctx).unwrap();
        let out = convective_step(&s, &ion_ghosts(&s), &pol, dt, dx);
        let before = s.total(dx);
        let change = out.state.total(dx) - before + dt * (out.right_flux.n - out.left_flux.n);
        prop_assert!(change.abs() <= 1e-12 * before);
    }
}
