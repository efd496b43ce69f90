//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. Thresholds marked "frozen" come from the
//! ignored pilot runs in `tests/pilots.rs` (different seeds).

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use momentcert::boundedness::{
    certificate_for, classify, decide_all_species, explore_accessible, threshold_holds, unboundedness_threshold,
    witness_for, ExplorationCaps, SpeciesBoundedness,
};
use momentcert::catalog;
use momentcert::matrix::IntMatrix;
use momentcert::moments::{
    blowup_lower_bound, check_theorem1, check_theorem2, check_theorem3, verify_theorem1, verify_theorem2,
    verify_theorem3, Theorem1Outcome, Theorem2Outcome, Theorem3Outcome,
};
use momentcert::network::{weighted_drift, ReactionNetwork};
use momentcert::polynomial::Monomial;
use momentcert::rational::{format_rational, rat, ratio, Rational};
use momentcert::simulation::{estimate_moments, integrate_forward_grid, MASS_BALANCE_TOL};

/// Pilot: n = 10^4, seed 0xA40001, mean 16.4241, SE 0.23864; mean + 5 SE.
const EX4_SECOND_MOMENT_THRESHOLD: f64 = 17.6173;
/// Pilot: 400 of 400 trajectories censored by t = 0.5 (seed 0xA50001);
/// 0.99 is below the one-sided 95% lower confidence bound 0.9925.
const EX5_CENSORED_AT_T2_THRESHOLD: f64 = 0.99;

struct Outcome {
    pass: bool,
    details: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            pass: true,
            details: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        self.details
            .push(format!("{} {what}", if ok { "ok  " } else { "FAIL" }));
        self.pass &= ok;
    }

    fn info(&mut self, what: impl Into<String>) {
        self.details.push(format!("info {}", what.into()));
    }
}

fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn rats(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| rat(x)).collect()
}

fn show(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(format_rational).collect();
    format!("({})", parts.join(", "))
}

fn show_int(v: &[BigInt]) -> String {
    let parts: Vec<String> = v.iter().map(BigInt::to_string).collect();
    format!("({})", parts.join(", "))
}

fn criterion_1(o: &mut Outcome) {
    let net = catalog::example1();
    let sample = explore_accessible(&net, &[1, 1], ExplorationCaps::default());
    o.check(
        sample.states == vec![vec![1, 1]] && sample.frontier_exhausted && !sample.cap_hit,
        format!("accessible set from (1,1) is {:?}", sample.states),
    );
    for (i, s) in decide_all_species(net.stoich()).iter().enumerate() {
        match s {
            SpeciesBoundedness::Unbounded(w) => {
                let change = w.net_change(net.stoich());
                o.check(
                    w.w == ints(&[1, 1]) && change == ints(&[1, 1]) && w.verify(net.stoich()),
                    format!(
                        "species {} unbounded, w = {}, nu w = {}",
                        i + 1,
                        show_int(&w.w),
                        show_int(&change)
                    ),
                );
            }
            SpeciesBoundedness::Bounded(_) => o.check(false, format!("species {} reported bounded", i + 1)),
        }
    }
}

fn criterion_2(o: &mut Outcome) {
    let net = catalog::conversion_pair(rat(1), rat(1));
    for (i, s) in decide_all_species(net.stoich()).iter().enumerate() {
        match s {
            SpeciesBoundedness::Bounded(c) => o.check(
                c.alpha == ints(&[1, 1]) && c.verify(net.stoich()),
                format!("species {} bounded, alpha = {}", i + 1, show_int(&c.alpha)),
            ),
            SpeciesBoundedness::Unbounded(_) => o.check(false, format!("species {} reported unbounded", i + 1)),
        }
    }
    let grid = [0.1, 0.5, 1.0, 2.0, 5.0];
    let stats = estimate_moments(&net, &[3, 2], &grid, &[1], 20_000, 0xC2, 1_000_000).expect("simulation");
    let exact = stats
        .rows
        .iter()
        .all(|r| r.mean == Some(5.0) && r.stderr == Some(0.0) && r.n_effective == 20_000);
    o.check(
        exact,
        "20000 trajectories: mean |X(t)|_1 = 5 with zero variance at every grid time",
    );
}

fn criterion_3(o: &mut Outcome) {
    let net = catalog::example2();
    let part = classify(&net);
    o.check(
        part.critical_species == vec![0, 1] && part.critical_reactions == vec![0],
        format!(
            "critical species {:?}, critical reactions {:?} (0-based)",
            part.critical_species, part.critical_reactions
        ),
    );
    match check_theorem1(&net, &part) {
        Theorem1Outcome::Certified(c) => {
            o.check(
                verify_theorem1(&net, &part, &c),
                format!("T1 feasible, gamma = {}", show(&c.gamma)),
            );
            let mut given = c.clone();
            given.gamma = rats(&[1, 3]);
            let s = part.nuc.get(0, 0) + 3 * part.nuc.get(1, 0);
            o.check(
                verify_theorem1(&net, &part, &given) && s == -1,
                "gamma = (1,3) accepted by the verifier, gamma^T nu^c = -1",
            );
        }
        Theorem1Outcome::Infeasible(_) => o.check(false, "T1 reported infeasible"),
    }
}

fn criterion_4(o: &mut Outcome) {
    let net = catalog::example3(1);
    let part = classify(&net);
    let vacuous = matches!(check_theorem1(&net, &part), Theorem1Outcome::Certified(c) if c.vacuous);
    o.check(
        part.critical_reactions.is_empty() && vacuous,
        "m=1: no critical reactions, T1 vacuous",
    );

    let net = catalog::example3(2);
    let part = classify(&net);
    let t1 = matches!(check_theorem1(&net, &part), Theorem1Outcome::Infeasible(_));
    match check_theorem2(&net) {
        Theorem2Outcome::Certified(c) => {
            let g = weighted_drift(&net, &c.gamma).expect("gamma > 0");
            o.check(
                t1 && c.gamma == rats(&[1]) && g.to_string() == "-x1^2" && verify_theorem2(&net, &c),
                format!("m=2: T1 infeasible, T2 gamma = {}, gamma^T F = {g}", show(&c.gamma)),
            );
        }
        Theorem2Outcome::Inapplicable(i) => o.check(false, format!("m=2: T2 inapplicable: {}", i.reason)),
    }

    let net = catalog::example3(3);
    let part = classify(&net);
    let t1 = matches!(check_theorem1(&net, &part), Theorem1Outcome::Infeasible(_));
    let t2 = matches!(check_theorem2(&net), Theorem2Outcome::Inapplicable(i) if i.high_degree_reactions == vec![0, 1]);
    o.check(
        t1 && t2,
        "m=3: T1 infeasible, T2 inapplicable (both reactions of degree 3)",
    );
}

fn criterion_5(o: &mut Outcome) {
    let net = catalog::example4();
    match check_theorem2(&net) {
        Theorem2Outcome::Certified(c) => {
            let g = weighted_drift(&net, &c.gamma).expect("gamma > 0");
            let x1x2 = g.coefficient(&Monomial::new(vec![1, 1]));
            o.check(
                verify_theorem2(&net, &c) && x1x2 <= rat(0),
                format!("T2 gamma = {}, gamma^T F = {g}", show(&c.gamma)),
            );
            o.check(
                c.gamma != rats(&[1, 1]) || g.to_string() == "-2*x1*x2",
                "gamma = (1,1) gives gamma^T F = -2*x1*x2",
            );
        }
        Theorem2Outcome::Inapplicable(i) => o.check(false, format!("T2 inapplicable: {}", i.reason)),
    }
    let stats = estimate_moments(&net, &[10, 10], &[5.0], &[2], 10_000, 0xC5, 1_000_000).expect("simulation");
    let row = stats.row(0, 2).expect("row");
    let m = row.mean.unwrap_or(f64::INFINITY);
    o.check(
        m <= EX4_SECOND_MOMENT_THRESHOLD && row.censored_frac == 0.0,
        format!(
            "E|X(5)|_1^2 estimate {m:.4} (SE {:.4}) <= frozen threshold {EX4_SECOND_MOMENT_THRESHOLD}",
            row.stderr.unwrap_or(f64::NAN)
        ),
    );
}

fn criterion_6(o: &mut Outcome) {
    let net = catalog::example5();
    let part = classify(&net);
    o.check(
        matches!(check_theorem1(&net, &part), Theorem1Outcome::Infeasible(_)),
        "T1 infeasible",
    );
    o.check(
        matches!(check_theorem2(&net), Theorem2Outcome::Inapplicable(_)),
        "T2 inapplicable",
    );
    let x0 = [10, 10];
    let cert = match check_theorem3(&net, &x0) {
        Theorem3Outcome::Certified(c) => c,
        Theorem3Outcome::Inapplicable(i) => {
            o.check(false, format!("T3 inapplicable: {}", i.reason));
            return;
        }
    };
    o.check(
        cert.gamma == rats(&[2, 3])
            && cert.alpha_exp == 2
            && cert.r_min == 2
            && cert.constant == ratio(1, 2)
            && verify_theorem3(&net, &x0, &cert),
        format!(
            "T3 gamma = {}, alpha_exp = {}, r_min = {}, C = {}",
            show(&cert.gamma),
            cert.alpha_exp,
            cert.r_min,
            cert.constant
        ),
    );

    let mut grid: Vec<f64> = (1..=20).map(|k| k as f64 * 0.005).collect();
    grid.extend([0.2, 0.5, 1.0, 2.0]);
    let stats = estimate_moments(&net, &x0, &grid, &[1], 500, 0xC6, 1_000_000).expect("simulation");
    let c = 0.5;
    let phi0 = 20.0;
    let prefix: Vec<_> = stats.series(1).into_iter().filter(|r| r.censored_frac < 0.01).collect();
    let mut worst: Option<(f64, f64, f64)> = None;
    let mut dominated = true;
    for r in &prefix {
        let phi = blowup_lower_bound(phi0, c, 2.0, r.t);
        if !phi.is_finite() {
            continue;
        }
        let (m, se) = (r.mean.expect("uncensored"), r.stderr.unwrap_or(0.0));
        if m + 3.0 * se < phi {
            dominated = false;
            worst.get_or_insert((r.t, m, phi));
        }
    }
    let t_max = prefix.last().map_or(0.0, |r| r.t);
    o.check(
        dominated,
        match worst {
            None => format!("mean |X(t)|_1 + 3 SE >= phi(t), phi' = phi^2/2, phi(0) = 20, on the prefix t <= {t_max}"),
            Some((t, m, phi)) => format!(
                "mean |X(t)|_1 + 3 SE >= phi(t), phi' = phi^2/2, phi(0) = 20: first violation at t = {t}: mean {m:.3} < phi {phi:.3}"
            ),
        },
    );
    // the weighted norm gamma^T x satisfies d/dt E gamma^T X >= C (E|X|_1)^2 >= (C/9)(E gamma^T X)^2
    // and |x|_1 >= gamma^T x / 3
    let weighted_ok = prefix.iter().all(|r| {
        let psi = blowup_lower_bound(50.0, c / 9.0, 2.0, r.t);
        r.mean.expect("uncensored") + 3.0 * r.stderr.unwrap_or(0.0) >= psi / 3.0
    });
    o.info(format!(
        "weighted-norm comparison (psi' = psi^2/18, psi(0) = 50, E|X|_1 >= psi/3) holds on the prefix: {weighted_ok}"
    ));
    let cf = stats.censored_fractions();
    let last = *cf.last().expect("grid");
    o.check(
        last >= EX5_CENSORED_AT_T2_THRESHOLD && cf.windows(2).all(|w| w[0] <= w[1]),
        format!("censored fraction nondecreasing, {last} at t = 2 (frozen threshold {EX5_CENSORED_AT_T2_THRESHOLD})"),
    );
}

fn random_matrix(rng: &mut ChaCha8Rng) -> IntMatrix {
    let n = rng.gen_range(1..=4);
    let m = rng.gen_range(1..=4);
    let rows: Vec<Vec<i64>> = (0..n)
        .map(|_| (0..m).map(|_| rng.gen_range(-3..=3)).collect())
        .collect();
    IntMatrix::from_rows(&rows)
}

/// Species `i` is boundable by some `alpha` in `{0..=6}^N` with `alpha_i >= 1`.
fn brute_force_boundable(nu: &IntMatrix) -> Vec<bool> {
    let n = nu.nrows();
    let mut out = vec![false; n];
    for alpha in momentcert::network::lattice_box(&vec![6; n]) {
        let ok = (0..nu.ncols()).all(|j| (0..n).map(|i| alpha[i] * nu.get(i, j)).sum::<i64>() <= 0);
        if ok {
            for i in 0..n {
                out[i] |= alpha[i] >= 1;
            }
        }
    }
    out
}

fn criterion_7(o: &mut Outcome) {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC7);
    let (mut exclusive, mut verified, mut agree) = (0, 0, 0);
    let mut species_total = 0;
    let mut oracle_feasible = 0;
    for _ in 0..200 {
        let nu = random_matrix(&mut rng);
        let oracle = brute_force_boundable(&nu);
        for (i, outcome) in decide_all_species(&nu).iter().enumerate() {
            species_total += 1;
            let cert = certificate_for(&nu, &[i]);
            let wit = witness_for(&nu, &[i]);
            if cert.is_some() != wit.is_some() {
                exclusive += 1;
            }
            if outcome.verify(&nu) {
                verified += 1;
            }
            if oracle[i] {
                oracle_feasible += 1;
                if outcome.is_bounded() {
                    agree += 1;
                }
            }
        }
    }
    o.check(
        exclusive == species_total,
        format!("exactly one of certificate/witness for {exclusive}/{species_total} species"),
    );
    o.check(
        verified == species_total,
        format!("{verified}/{species_total} outcomes re-verify exactly"),
    );
    o.check(
        agree == oracle_feasible,
        format!("{agree}/{oracle_feasible} oracle-feasible species reported bounded"),
    );
}

fn oracle_agreement(o: &mut Outcome, name: &str, net: &ReactionNetwork, x0: &[i64], bounds: &[i64], seed: u64) {
    let grid = [0.2, 0.5, 1.0, 2.0, 4.0];
    let dists = integrate_forward_grid(net, x0, &grid, bounds).expect("integrator");
    let stats = estimate_moments(net, x0, &grid, &[1, 2], 20_000, seed, 1_000_000).expect("simulation");
    let mut worst_z: f64 = 0.0;
    let mut ok = true;
    for (k, d) in dists.iter().enumerate() {
        ok &= d.leaked == 0.0 && d.mass_balance_error() <= MASS_BALANCE_TOL;
        for r in [1, 2] {
            let row = stats.row(k, r).expect("row");
            let exact = d.moment(r);
            let (m, se) = (row.mean.expect("no censoring"), row.stderr.expect("n >= 2"));
            let z = (m - exact).abs() / se;
            worst_z = worst_z.max(z);
            ok &= se > 0.0 && z <= 4.0;
        }
    }
    o.check(
        ok,
        format!("{name}: max |SSA - oracle| / SE = {worst_z:.3} over 5 times x orders 1,2; mass balance <= 1e-9"),
    );
}

fn criterion_8(o: &mut Outcome) {
    oracle_agreement(
        o,
        "decay chain S1 -> S2 -> 0 from (6,0)",
        &catalog::decay_chain(rat(1), ratio(1, 2)),
        &[6, 0],
        &[6, 6],
        0xC81,
    );
    oracle_agreement(
        o,
        "dimerization 2A <-> B from (6,0)",
        &catalog::dimerization(ratio(1, 2), rat(1)),
        &[6, 0],
        &[6, 3],
        0xC82,
    );
    oracle_agreement(
        o,
        "complex formation A + B <-> C from (3,3,0)",
        &catalog::complex_formation(rat(1), rat(1)),
        &[3, 3, 0],
        &[3, 3, 3],
        0xC83,
    );
}

fn criterion_9(o: &mut Outcome) {
    let net = catalog::example2();
    let w = ints(&[2, 3]);
    let (x_bar, seq) = unboundedness_threshold(net.stoich(), &w);
    o.check(
        threshold_holds(net.stoich(), &x_bar, &seq) && seq.is_valid(),
        format!("threshold x_bar = {x_bar:?} verified for w = (2,3)"),
    );
    let x0: Vec<i64> = x_bar.iter().map(|v| v + 5).collect();
    let caps = ExplorationCaps {
        max_states: 100_000,
        max_coord: 30,
    };
    let sample = explore_accessible(&net, &x0, caps);
    let best = sample.states.iter().map(|s| s[0]).max().unwrap_or(0);
    let idx = sample.states.iter().position(|s| s[0] > 20);
    let path_ok = idx.is_some_and(|k| {
        let path = sample.path_to(k);
        let mut x = x0.clone();
        for &j in &path {
            if net.reactions()[j].propensity.eval(&x).expect("arity") <= rat(0) {
                return false;
            }
            for (xi, d) in x.iter_mut().zip(net.stoich().column(j)) {
                *xi += d;
            }
            if x.iter().any(|&v| v < 0) {
                return false;
            }
        }
        x == sample.states[k]
    });
    o.check(
        idx.is_some() && path_ok,
        format!("BFS from {x0:?} reaches first coordinate {best} > 20 with a valid firing path"),
    );
}

fn main() -> ExitCode {
    type Criterion = (u32, &'static str, Duration, fn(&mut Outcome));
    let criteria: [Criterion; 9] = [
        (
            1,
            "example 1: trivial accessible set, joint witness (1,1)",
            Duration::from_secs(1),
            criterion_1,
        ),
        (
            2,
            "conversion pair: certificate (1,1), conserved 1-norm in SSA",
            Duration::from_secs(10),
            criterion_2,
        ),
        (3, "example 2: partition and T1", Duration::from_secs(1), criterion_3),
        (
            4,
            "example 3: m = 1, 2, 3 dichotomy",
            Duration::from_secs(1),
            criterion_4,
        ),
        (
            5,
            "example 4: T2 certificate and second-moment threshold",
            Duration::from_secs(120),
            criterion_5,
        ),
        (
            6,
            "example 5: blow-up certificate and censoring",
            Duration::from_secs(300),
            criterion_6,
        ),
        (
            7,
            "exclusivity on 200 random matrices with brute-force oracle",
            Duration::from_secs(30),
            criterion_7,
        ),
        (
            8,
            "SSA vs truncated forward equations",
            Duration::from_secs(120),
            criterion_8,
        ),
        (
            9,
            "threshold state and accessible growth for example 2",
            Duration::from_secs(10),
            criterion_9,
        ),
    ];
    let mut failed = 0;
    for (n, name, limit, run) in criteria {
        let mut o = Outcome::new();
        let start = Instant::now();
        run(&mut o);
        let elapsed = start.elapsed();
        o.check(elapsed <= limit, format!("runtime {elapsed:.2?} <= {limit:?}"));
        println!(
            "{} criterion {n}: {name} ({elapsed:.2?})",
            if o.pass { "PASS" } else { "FAIL" }
        );
        for d in &o.details {
            println!("    {d}");
        }
        if !o.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
