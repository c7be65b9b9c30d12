use phasefield::analysis::{
    analyze, classify_good_times, degiorgi_from_snapshots, level_set_measure, level_set_series, lojasiewicz_fit_series,
    omega_from_trajectory, AnalysisConfig, LojasiewiczOptions, Side,
};
use phasefield::dynamics::{run, RunStatus, StepperConfig, Trajectory};
use phasefield::{BoundaryMode, DiffusionSpec, Field, Grid, MobilitySpec, ModelConfig, PotentialSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pot() -> PotentialSpec<f64> {
    PotentialSpec::logarithmic(0.3, 1.0).unwrap()
}

fn ch() -> ModelConfig<f64> {
    ModelConfig::ch_nonlinear(1.0, 0.01, pot(), MobilitySpec::constant(1.0).unwrap(), DiffusionSpec::constant(1.0).unwrap())
        .unwrap()
}

fn relax(m: &ModelConfig<f64>, t_max: f64) -> Trajectory<f64> {
    let g = Grid::new_1d(64, 1.0, BoundaryMode::Neumann).unwrap();
    let phi0 = Field::from_fn(g, |x| 0.1 * (std::f64::consts::PI * x[0]).cos());
    let cfg = StepperConfig { dt_max: 1.0, snapshot_every: 2, ..StepperConfig::default() };
    run(m, phi0, t_max, &cfg).unwrap()
}

#[test]
fn good_time_bound_on_a_real_run() {
    let tr = relax(&ch(), 30.0);
    let mut prev: Option<Vec<bool>> = None;
    let mut prev_bad = f64::INFINITY;
    for m in [0.1, 1.0, 10.0] {
        let set = classify_good_times(&tr, m, 0.0).unwrap();
        assert!(set.bad_measure <= set.bound.unwrap());
        assert!(set.bad_measure <= prev_bad);
        if let Some(p) = &prev {
            assert!(p.iter().zip(&set.mask).all(|(&a, &b)| !a || b), "masks must grow with M");
        }
        prev_bad = set.bad_measure;
        prev = Some(set.mask);
    }
}

#[test]
fn allen_cahn_separates_and_certifies() {
    let tr = relax(&ModelConfig::conserved_ac(1.0, 0.01, pot()).unwrap(), 100.0);
    assert!(matches!(tr.status, RunStatus::SteadyState | RunStatus::Completed));
    let rep = level_set_series(&tr.snapshots, 0.05, 0.5).unwrap();
    let d = rep.delta_star.expect("separated");
    assert!(d >= 1e-3, "delta_star {d}");
    let start = tr.t_end() * 0.5;
    for s in tr.snapshots.iter().filter(|s| s.t >= start) {
        assert_eq!(level_set_measure(&s.phi, d), 0.0);
    }
    let first = tr.snapshots[0].t;
    let tau = (tr.t_end() - first) / 6.0;
    for side in [Side::Positive, Side::Negative] {
        let it = degiorgi_from_snapshots(&tr.snapshots, 0.9 * d, tau, tr.t_end(), 12, side).unwrap();
        assert!(it.certified());
    }
}

#[test]
fn converged_run_has_a_single_limit() {
    let m = ch();
    let tr = relax(&m, 60.0);
    let est = omega_from_trajectory(&tr, None, 5, 1e-5, Some(&m)).unwrap();
    assert!(est.singleton, "dispersion {}", est.dispersion);
    let near = est.nearest.expect("polish");
    assert!(near.residual < 1e-8);
    assert!(near.distance_l2 < 1e-6);
}

#[test]
fn full_report_on_ch_run() {
    let m = ch();
    let tr = relax(&m, 60.0);
    let rep = analyze(&tr, Some(&m), &AnalysisConfig::default());
    assert_eq!(rep.good_times_all.len(), 3);
    assert!(rep.good_times_all.iter().all(|g| g.ok));
    assert!(rep.separation.as_ref().and_then(|s| s.delta_star).is_some());
    assert!(rep.degiorgi.as_ref().is_some_and(|d| d.certified));
    assert!(rep.omega.as_ref().is_some_and(|o| o.singleton));
    let json = serde_json::to_value(&rep).unwrap();
    assert!(json["good_times"]["M"].is_number());
    assert!(json["separation"]["T_star"].is_number());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn level_set_measure_is_monotone(seed in any::<u64>(), d1 in 0.0f64..0.5, d2 in 0.0f64..0.5) {
        let g = Grid::new_2d(9, 7, 1.0, 1.0, BoundaryMode::Neumann).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = Field::new(g, (0..63).map(|_| rng.gen_range(-0.999..0.999)).collect()).unwrap();
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        prop_assert!(level_set_measure(&phi, lo) <= level_set_measure(&phi, hi));
    }

    #[test]
    fn lojasiewicz_fit_ignores_time_units(
        scale in 0.01f64..100.0,
        rate in 0.1f64..3.0,
        power in 1.5f64..3.0,
    ) {
        // E − E∞ = g(t), ‖∇μ‖ = g^{1/power}: ϑ = 1 − 1/power regardless of how time is measured.
        let times: Vec<f64> = (0..200).map(|i| i as f64 * 0.05).collect();
        let gap: Vec<f64> = times.iter().map(|t| (-rate * t).exp()).collect();
        let norms: Vec<f64> = gap.iter().map(|g| g.powf(1.0 / power)).collect();
        let opts = LojasiewiczOptions { e_inf: Some(0.0), window: 1.0, ..LojasiewiczOptions::default() };
        let a = lojasiewicz_fit_series(&times, &gap, &norms, None, &opts).unwrap();
        let scaled: Vec<f64> = times.iter().map(|t| t * scale).collect();
        let b = lojasiewicz_fit_series(&scaled, &gap, &norms, None, &opts).unwrap();
        prop_assert!((a.theta - b.theta).abs() < 1e-12);
        prop_assert!((a.c - b.c).abs() <= 1e-12 * a.c);
        prop_assert!((a.decay_rate - b.decay_rate * scale).abs() <= 1e-9 * a.decay_rate);
        prop_assert!((a.theta_raw - (1.0 - 1.0 / power)).abs() < 1e-9);
    }
}
