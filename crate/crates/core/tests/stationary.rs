use phasefield::dynamics::{Stepper, StepperConfig};
use phasefield::stationary::{separation_bound, solve_equilibrium, stationary_residual, Seed, SolverOptions};
use phasefield::{
    BoundaryMode, DiffusionSpec, DiscreteModel, Field, Grid, KernelSpec, MobilitySpec, ModelConfig, PotentialSpec,
};

fn pot() -> PotentialSpec<f64> {
    PotentialSpec::logarithmic(0.3, 1.0).unwrap()
}

fn ch() -> ModelConfig<f64> {
    ModelConfig::ch_nonlinear(1.0, 1e-3, pot(), MobilitySpec::constant(1.0).unwrap(), DiffusionSpec::constant(1.0).unwrap())
        .unwrap()
}

fn layer_seed() -> Seed<f64> {
    Seed::TanhLayers { centers: vec![0.5], width: 0.05, amplitude: 0.8 }
}

fn layer(n: usize, k: f64) -> phasefield::EquilibriumState64 {
    let g = Grid::new_1d(n, 1.0, BoundaryMode::Neumann).unwrap();
    let s = layer_seed();
    let guess = s.field(g, k, pot().bound()).unwrap();
    solve_equilibrium(&ch(), k, &guess, &SolverOptions::default(), &s.id()).unwrap()
}

fn is_fixed_point(m: &ModelConfig<f64>, e: &phasefield::EquilibriumState64, dt: f64) -> f64 {
    let g = *e.phi_inf.grid();
    let st = Stepper::new(DiscreteModel::new(m, g).unwrap(), StepperConfig::default()).unwrap();
    let s = st.initial_state(e.phi_inf.clone()).unwrap();
    let out = st.step(&s, dt).unwrap();
    phasefield::norm_l2(&out.state.phi.sub(&e.phi_inf).unwrap())
}

#[test]
fn residual_vanishes_on_constants() {
    let g = Grid::new_1d(20, 1.0, BoundaryMode::Neumann).unwrap();
    let p = pot();
    let k = -0.3;
    let r = stationary_residual(&ch(), &Field::constant(g, k), p.df(k) - k).unwrap();
    assert!(r.sup_norm() < 1e-14);
    let zero = KernelSpec::tophat(0.0, 0.1).unwrap();
    let nl = ModelConfig::nonlocal_ch(1.0, p.clone(), MobilitySpec::constant(1.0).unwrap(), zero, false).unwrap();
    let r = stationary_residual(&nl, &Field::constant(g, k), p.df(k)).unwrap();
    assert!(r.sup_norm() < 1e-14);
}

#[test]
fn deep_quench_layer_equilibrium() {
    let e = layer(128, 0.0);
    assert!(e.residual_l2 <= 1e-10);
    assert!(e.phi_inf.mean().abs() < 1e-12);
    assert!(e.delta > 0.0);
    // Non-constant with a single interior transition.
    let v = e.phi_inf.values();
    assert!(v[0] < -0.9 && v[127] > 0.9);
    let mu = phasefield::chemical_potential(&ch(), &e.phi_inf).unwrap();
    assert!((mu.mean() - e.mu_inf).abs() < 1e-10);
    let m = ch();
    let e_inf = phasefield::energy(&m, &e.phi_inf).unwrap();
    let e_zero = phasefield::energy(&m, &Field::constant(*e.phi_inf.grid(), 0.0)).unwrap();
    assert!(e_inf < e_zero);
    for dt in [1e-4, 1e-2] {
        let d = is_fixed_point(&m, &e, dt);
        assert!(d < 1e-8, "dt {dt}: moved {d}");
    }
}

#[test]
fn continuation_in_mass() {
    let mut prev = layer(128, 0.0);
    for k in [0.05, 0.1] {
        let e = solve_equilibrium(&ch(), k, &prev.phi_inf, &SolverOptions::default(), "continuation").unwrap();
        assert!(e.newton_iters <= 10, "k {k}: {} iterations", e.newton_iters);
        assert!((e.phi_inf.mean() - k).abs() < 1e-12);
        prev = e;
    }
}

#[test]
fn separation_stable_under_refinement() {
    let a = layer(128, 0.0);
    let b = layer(256, 0.0);
    assert!((a.delta - b.delta).abs() < 1e-6, "{} vs {}", a.delta, b.delta);
}

#[test]
fn conserved_ac_equilibrium_is_fixed_point() {
    let g = Grid::new_1d(64, 1.0, BoundaryMode::Neumann).unwrap();
    let m = ModelConfig::conserved_ac(1.0, 1e-3, pot()).unwrap();
    let s = layer_seed();
    let e = solve_equilibrium(&m, 0.1, &s.field(g, 0.1, pot().bound()).unwrap(), &SolverOptions::default(), &s.id())
        .unwrap();
    assert!(is_fixed_point(&m, &e, 1e-2) < 1e-8);
}

#[test]
fn nonlocal_gradient_bound() {
    let g = Grid::new_1d(96, 1.0, BoundaryMode::Neumann).unwrap();
    // Unit-mass Gaussian, strong enough to separate the phases.
    let sd = 0.05;
    let k = KernelSpec::gaussian(1.0 / ((2.0 * std::f64::consts::PI).sqrt() * sd), sd).unwrap();
    let m = ModelConfig::nonlocal_ch(1.0, pot(), MobilitySpec::constant(1.0).unwrap(), k, false).unwrap();
    let s = layer_seed();
    let e = solve_equilibrium(&m, 0.0, &s.field(g, 0.0, pot().bound()).unwrap(), &SolverOptions::default(), &s.id())
        .unwrap();
    assert!(e.residual_l2 < 1e-10);
    let rep = separation_bound(&m, &e);
    assert!(rep.delta > 0.0 && rep.delta < 0.5, "{rep:?}");
    assert_eq!(rep.grad_bound_holds, Some(true), "{rep:?}");
    assert!(is_fixed_point(&m, &e, 1e-4) < 1e-8);
}
