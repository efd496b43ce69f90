use momentcert::boundedness::classify;
use momentcert::catalog;
use momentcert::moments::{check_theorem1, check_theorem2, Theorem1Outcome, Theorem2Outcome};
use momentcert::network::ReactionNetwork;
use momentcert::rational::{rat, ratio};
use momentcert::simulation::{
    estimate_moments, integrate_forward_equations, simulate, slope_halves, TrajectoryStatus, MASS_BALANCE_TOL,
};

/// `S -> 2S` at rate 1.
fn yule() -> ReactionNetwork {
    let mut net = ReactionNetwork::with_species_count(1);
    net.add_mass_action("split", &[1], &[2], rat(1)).unwrap();
    net
}

/// `S1 -> 2 S1`, `S1 <-> S2` with unit rates: linear, growing.
fn branching_pair() -> ReactionNetwork {
    let mut net = ReactionNetwork::with_species_count(2);
    net.add_mass_action("split", &[1, 0], &[2, 0], rat(1)).unwrap();
    net.add_mass_action("to2", &[1, 0], &[0, 1], ratio(1, 2)).unwrap();
    net.add_mass_action("to1", &[0, 1], &[1, 0], ratio(1, 2)).unwrap();
    net
}

#[test]
fn identical_seeds_give_identical_paths() {
    let net = catalog::example4();
    let a = simulate(&net, &[10, 10], 2.0, 99, 100_000).unwrap();
    let b = simulate(&net, &[10, 10], 2.0, 99, 100_000).unwrap();
    assert_eq!(a, b);
    let c = simulate(&net, &[10, 10], 2.0, 100, 100_000).unwrap();
    assert_ne!(a.times, c.times);
}

#[test]
fn ensemble_is_independent_of_thread_count() {
    let net = catalog::example2();
    let grid = [0.1, 0.2, 0.3];
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| estimate_moments(&net, &[2, 2], &grid, &[1, 2], 64, 0x51, 50_000).unwrap())
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn visited_states_stay_on_the_lattice() {
    for (net, x0) in [
        (catalog::example2(), vec![1, 1]),
        (catalog::example4(), vec![10, 10]),
        (catalog::dimerization(ratio(1, 2), rat(1)), vec![6, 0]),
        (catalog::complex_formation(rat(1), rat(1)), vec![3, 3, 0]),
    ] {
        for seed in 0..20 {
            let tr = simulate(&net, &x0, 1.0, seed, 20_000).unwrap();
            assert!((0..=tr.n_jumps()).all(|k| tr.state(k).iter().all(|&v| v >= 0)));
        }
    }
}

#[test]
fn example5_explodes_past_the_event_cap() {
    let net = catalog::example5();
    let censored = (0..40)
        .filter(|&seed| simulate(&net, &[10, 10], 2.0, seed, 10_000).unwrap().status == TrajectoryStatus::Censored)
        .count();
    assert!(censored >= 38, "only {censored} of 40 censored");
}

#[test]
fn conversion_pair_matches_forward_equations() {
    let net = catalog::conversion_pair(rat(1), rat(1));
    let stats = estimate_moments(&net, &[5, 0], &[1.0], &[2], 4_000, 0x5151, 1_000_000).unwrap();
    let dist = integrate_forward_equations(&net, &[5, 0], 1.0, &[5, 5]).unwrap();
    assert!(dist.mass_balance_error() < MASS_BALANCE_TOL);
    let row = stats.row(0, 2).unwrap();
    let (mean, se) = (row.mean.unwrap(), row.stderr.unwrap());
    assert!(
        (mean - dist.moment(2)).abs() <= 3.0 * se.max(1e-12),
        "{mean} vs {}",
        dist.moment(2)
    );
}

#[test]
fn forward_oracles_match_closed_forms() {
    // two-state symmetric chain
    let d = integrate_forward_equations(&catalog::conversion_pair(rat(1), rat(1)), &[1, 0], 20.0, &[1, 1]).unwrap();
    assert!((d.probability(&[1, 0]) - 0.5).abs() < 1e-6);
    assert!((d.probability(&[0, 1]) - 0.5).abs() < 1e-6);
    let t = 0.7f64;
    let d = integrate_forward_equations(&catalog::conversion_pair(rat(1), rat(1)), &[1, 0], t, &[1, 1]).unwrap();
    assert!((d.probability(&[1, 0]) - (1.0 + (-2.0 * t).exp()) / 2.0).abs() < 1e-8);
    // independent exponential deaths
    let d = integrate_forward_equations(&catalog::pure_death(rat(1)), &[2], 1.0, &[2]).unwrap();
    let p = 1.0 - (-1.0f64).exp();
    assert!((d.probability(&[0]) - p * p).abs() < 1e-6);
    assert!((d.probability(&[2]) - (-2.0f64).exp()).abs() < 1e-6);
}

#[test]
fn certified_growth_rates_are_stable() {
    let grid: Vec<f64> = (1..=8).map(|k| 0.25 * k as f64).collect();
    for (name, net, x0) in [("yule", yule(), vec![10]), ("branching", branching_pair(), vec![5, 5])] {
        let part = classify(&net);
        let t1 = matches!(check_theorem1(&net, &part), Theorem1Outcome::Certified(_));
        let t2 = matches!(check_theorem2(&net), Theorem2Outcome::Certified(_));
        assert!(t1 || t2, "{name} has no moment certificate");
        let stats = estimate_moments(&net, &x0, &grid, &[1, 2, 3], 2_000, 0x6A0, 1_000_000).unwrap();
        for r in [1, 2, 3] {
            let means: Vec<f64> = stats.series(r).iter().map(|row| row.mean.unwrap()).collect();
            let (s1, s2) = slope_halves(&grid, &means).unwrap();
            assert!(s1.is_finite() && s2.is_finite());
            let rel = (s1 - s2).abs() / s1.abs().max(s2.abs());
            assert!(rel < 0.5, "{name} r={r}: slopes {s1:.3} and {s2:.3}");
        }
    }
}

#[test]
fn censoring_is_reported_not_dropped() {
    let stats = estimate_moments(&catalog::example5(), &[10, 10], &[0.01, 2.0], &[1], 30, 0xCE, 5_000).unwrap();
    let last = stats.row(1, 1).unwrap();
    assert_eq!(
        stats.status_counts.censored + stats.status_counts.absorbed + stats.status_counts.time_reached,
        30
    );
    assert!(last.censored_frac > 0.9);
    assert_eq!(last.n_effective, 30 - (last.censored_frac * 30.0).round() as usize);
    assert!(last.biased_low || last.n_effective == 30);
}
