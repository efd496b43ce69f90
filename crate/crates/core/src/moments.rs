//! Certificates for moment growth bounds and moment blow-up.
//!
//! Three checkers, each an exact LP over a weight vector `gamma`:
//!
//! * [`check_theorem1`]: `gamma > 0` on the critical species with
//!   `gamma^T nu^c <= 0`. All moments then grow at most exponentially.
//! * [`check_theorem2`]: every monomial of degree >= 2 in `gamma^T F` has a
//!   nonpositive coefficient and reactions of degree > 2 leave `gamma^T x`
//!   unchanged, so `gamma^T F(x) <= C (|x|_1 + 1)`. Same conclusion.
//! * [`check_theorem3`]: every coefficient of `gamma^T F` is nonnegative
//!   and each species carries pure-power mass of degree >= `alpha_exp`, so
//!   `gamma^T F(x) >= C |x|_1^alpha_exp` on the lattice and the moment of
//!   order `max_j deg a_j` is infinite at some finite time.
//!
//! T2 and T3 use coefficientwise sufficient conditions: an `Inapplicable`
//! outcome means the checker cannot certify, not that the hypothesis fails.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::boundedness::{decide_subset_boundedness, CriticalPartition};
use crate::feasibility::{integerize, solve, DualRay, FeasibilityOutcome, FeasibilitySystem};
use crate::network::{linear_drift, ReactionNetwork};
use crate::polynomial::{Monomial, Polynomial};
use crate::rational::{rat, Rational};

/// Lattice points drawn for the independent soundness re-check.
pub const SPOT_CHECKS: usize = 200;
/// Spot-check points are drawn from `{0..=SPOT_CHECK_BOX}^N`.
pub const SPOT_CHECK_BOX: i64 = 50;
const SPOT_CHECK_SEED: u64 = 0x5EED_CE27;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Theorem {
    T1,
    T2,
    T3,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentCertificate {
    pub theorem: Theorem,
    /// T1: weights on the critical species (integers). T2: weights on all species.
    pub gamma: Vec<Rational>,
    /// T1 only: weighted norm on all species, critical block `gamma + beta_1`
    /// and non-critical block `beta_2` from a boundedness certificate.
    pub full_norm: Option<Vec<BigInt>>,
    /// T2 only: `gamma^T F(x) <= C (|x|_1 + 1)`.
    pub constant: Option<Rational>,
    /// T2 only: reactions with `gamma^T nu_j = 0`.
    pub zero_drift_reactions: Vec<usize>,
    /// T1 with no critical reactions.
    pub vacuous: bool,
    pub spot_checks: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlowupCertificate {
    pub gamma: Vec<Rational>,
    pub alpha_exp: u32,
    /// `gamma^T F(x) >= C |x|_1^alpha_exp` with `C = N^(1 - alpha_exp)`.
    pub constant: Rational,
    /// Smallest moment order claimed infinite, `max_j deg a_j`.
    pub r_min: u32,
    pub notes: String,
    pub spot_checks: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Theorem1Outcome {
    Certified(MomentCertificate),
    Infeasible(DualRay),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Inapplicable {
    pub reason: String,
    pub ray: Option<DualRay>,
    /// Reactions of degree above two (T2) that were forced to zero drift.
    pub high_degree_reactions: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Theorem2Outcome {
    Certified(MomentCertificate),
    Inapplicable(Inapplicable),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Theorem3Outcome {
    Certified(BlowupCertificate),
    Inapplicable(Inapplicable),
}

fn gamma_dot_column(gamma: &[Rational], net: &ReactionNetwork, j: usize) -> Rational {
    gamma
        .iter()
        .enumerate()
        .fold(Rational::zero(), |s, (i, g)| s + g * rat(net.stoich().get(i, j)))
}

fn int_dot_column(gamma: &[BigInt], net: &ReactionNetwork, j: usize) -> BigInt {
    gamma.iter().enumerate().map(|(i, g)| g * net.stoich().get(i, j)).sum()
}

fn l1(x: &[i64]) -> Rational {
    rat(x.iter().sum())
}

fn random_points(n: usize, count: usize) -> Vec<Vec<i64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(SPOT_CHECK_SEED);
    (0..count)
        .map(|_| (0..n).map(|_| rng.gen_range(0..=SPOT_CHECK_BOX)).collect())
        .collect()
}

/// Checks the T1 hypothesis `{gamma >= 1, gamma^T nu^c <= 0}` on the
/// critical block.
pub fn check_theorem1(net: &ReactionNetwork, partition: &CriticalPartition) -> Theorem1Outcome {
    let nc = partition.n_critical_species();
    let gamma: Vec<BigInt> = if partition.n_critical_reactions() == 0 {
        vec![BigInt::one(); nc]
    } else {
        let mut sys = FeasibilitySystem::new(nc);
        for k in 0..nc {
            sys.add_lower_bound(k, Rational::one()).expect("arity");
        }
        for j in 0..partition.nuc.ncols() {
            sys.add_le_int(&partition.nuc.column(j), 0).expect("arity");
        }
        match solve(&sys).expect("well-formed") {
            FeasibilityOutcome::Feasible(p) => {
                let all: Vec<usize> = (0..nc).collect();
                integerize(&p, &all).expect("gamma >= 1")
            }
            FeasibilityOutcome::Infeasible(ray) => return Theorem1Outcome::Infeasible(ray),
        }
    };
    let full_norm = full_weighted_norm(net, partition, &gamma);
    let mut cert = MomentCertificate {
        theorem: Theorem::T1,
        gamma: gamma.iter().cloned().map(Rational::from_integer).collect(),
        full_norm: Some(full_norm),
        constant: None,
        zero_drift_reactions: Vec::new(),
        vacuous: partition.n_critical_reactions() == 0,
        spot_checks: 0,
    };
    debug_assert!(verify_theorem1(net, partition, &cert));
    // can only fail when some propensity is negative on the lattice, which is reported separately
    cert.spot_checks = spot_check_theorem1(net, partition, &cert).unwrap_or(0);
    Theorem1Outcome::Certified(cert)
}

/// Evaluates the critical-reaction drift of the weighted norm,
/// `sum_{j critical} a_j(x) full_norm^T nu_j <= 0`, at random lattice points.
pub fn spot_check_theorem1(
    net: &ReactionNetwork,
    partition: &CriticalPartition,
    cert: &MomentCertificate,
) -> Result<usize, Vec<i64>> {
    let Some(full) = &cert.full_norm else { return Ok(0) };
    let steps: Vec<(usize, Rational)> = partition
        .critical_reactions
        .iter()
        .map(|&j| (j, Rational::from_integer(int_dot_column(full, net, j))))
        .collect();
    let pts = random_points(net.n_species(), SPOT_CHECKS);
    for x in &pts {
        let drift = steps.iter().fold(Rational::zero(), |s, (j, d)| {
            s + net.reactions()[*j].propensity.eval(x).expect("arity") * d
        });
        if drift.is_positive() {
            return Err(x.clone());
        }
    }
    Ok(pts.len())
}

/// `(gamma_1, gamma_2) = (beta_1 + alpha, beta_2)` where `beta` certifies
/// boundedness of every non-critical species; indexed by original species.
fn full_weighted_norm(net: &ReactionNetwork, partition: &CriticalPartition, alpha: &[BigInt]) -> Vec<BigInt> {
    let n = net.n_species();
    let beta = if partition.noncritical_species.is_empty() {
        vec![BigInt::zero(); n]
    } else {
        decide_subset_boundedness(net.stoich(), &partition.noncritical_species)
            .expect("non-critical species are bounded by definition")
            .alpha
    };
    let mut full = beta;
    for (k, &i) in partition.critical_species.iter().enumerate() {
        full[i] += &alpha[k];
    }
    full
}

pub fn verify_theorem1(net: &ReactionNetwork, partition: &CriticalPartition, cert: &MomentCertificate) -> bool {
    let nc = partition.n_critical_species();
    if cert.theorem != Theorem::T1 || cert.gamma.len() != nc {
        return false;
    }
    if !cert.gamma.iter().all(|g| g.is_integer() && *g >= Rational::one()) {
        return false;
    }
    let gamma_ok = (0..partition.nuc.ncols()).all(|j| {
        let s = (0..nc).fold(Rational::zero(), |s, k| {
            s + &cert.gamma[k] * rat(partition.nuc.get(k, j))
        });
        !s.is_positive()
    });
    let norm_ok = match &cert.full_norm {
        Some(full) => {
            full.len() == net.n_species()
                && full.iter().all(Signed::is_positive)
                && partition
                    .critical_reactions
                    .iter()
                    .all(|&j| !int_dot_column(full, net, j).is_positive())
        }
        None => false,
    };
    gamma_ok && norm_ok
}

/// Monomials appearing in any drift component, with the per-species
/// coefficient vectors `c_m` so that `coef_m(gamma^T F) = c_m . gamma`.
fn drift_coefficient_rows(net: &ReactionNetwork) -> Vec<(Monomial, Vec<Rational>)> {
    let n = net.n_species();
    let components: Vec<Polynomial> = (0..n)
        .map(|i| {
            let mut e = vec![Rational::zero(); n];
            e[i] = Rational::one();
            linear_drift(net, &e)
        })
        .collect();
    let monomials: BTreeSet<Monomial> = components
        .iter()
        .flat_map(|p| p.terms().map(|(m, _)| m.clone()))
        .collect();
    monomials
        .into_iter()
        .map(|m| {
            let row = components.iter().map(|p| p.coefficient(&m)).collect();
            (m, row)
        })
        .collect()
}

fn linear_part_bound(g: &Polynomial) -> Rational {
    g.terms()
        .filter(|(m, _)| m.degree() <= 1)
        .fold(Rational::zero(), |s, (_, c)| s + c.abs())
}

/// Checks the T2 hypothesis coefficientwise and, on success, emits `gamma`
/// with the linear-growth constant `C`.
pub fn check_theorem2(net: &ReactionNetwork) -> Theorem2Outcome {
    let n = net.n_species();
    let high_degree: Vec<usize> = net
        .reactions()
        .iter()
        .enumerate()
        .filter(|(_, r)| r.propensity.degree() > 2)
        .map(|(j, _)| j)
        .collect();
    let mut sys = FeasibilitySystem::new(n);
    for i in 0..n {
        sys.add_lower_bound(i, Rational::one()).expect("arity");
    }
    for (m, row) in drift_coefficient_rows(net) {
        if m.degree() >= 2 {
            sys.add_le(row, Rational::zero()).expect("arity");
        }
    }
    for &j in &high_degree {
        sys.add_eq_int(&net.stoich().column(j), 0).expect("arity");
    }
    let gamma = match solve(&sys).expect("well-formed") {
        FeasibilityOutcome::Feasible(p) => p,
        FeasibilityOutcome::Infeasible(ray) => {
            let reason = if high_degree.is_empty() {
                "no gamma >= 1 makes every coefficient of degree >= 2 in gamma^T F nonpositive".to_string()
            } else {
                format!(
                    "no gamma >= 1 makes every coefficient of degree >= 2 in gamma^T F nonpositive \
                     while reactions {:?} (degree > 2) keep gamma^T nu_j = 0",
                    high_degree.iter().map(|j| j + 1).collect::<Vec<_>>()
                )
            };
            return Theorem2Outcome::Inapplicable(Inapplicable {
                reason,
                ray: Some(ray),
                high_degree_reactions: high_degree,
            });
        }
    };
    let g = linear_drift(net, &gamma);
    let s = linear_part_bound(&g);
    let constant = if s.is_positive() { s } else { Rational::one() };
    let zero_drift_reactions = (0..net.n_reactions())
        .filter(|&j| gamma_dot_column(&gamma, net, j).is_zero())
        .collect();
    let mut cert = MomentCertificate {
        theorem: Theorem::T2,
        gamma,
        full_norm: None,
        constant: Some(constant),
        zero_drift_reactions,
        vacuous: false,
        spot_checks: 0,
    };
    cert.spot_checks = spot_check_theorem2(net, &cert).expect("certificate sound by construction");
    Theorem2Outcome::Certified(cert)
}

pub fn verify_theorem2(net: &ReactionNetwork, cert: &MomentCertificate) -> bool {
    if cert.theorem != Theorem::T2 || cert.gamma.len() != net.n_species() {
        return false;
    }
    if !cert.gamma.iter().all(Signed::is_positive) {
        return false;
    }
    let Some(c) = &cert.constant else { return false };
    let g = linear_drift(net, &cert.gamma);
    let high_ok = g.terms().all(|(m, coef)| m.degree() < 2 || !coef.is_positive());
    let deg_ok = net
        .reactions()
        .iter()
        .enumerate()
        .all(|(j, r)| r.propensity.degree() <= 2 || gamma_dot_column(&cert.gamma, net, j).is_zero());
    high_ok && deg_ok && c.is_positive() && *c >= linear_part_bound(&g)
}

/// Evaluates `gamma^T F(x) <= C (|x|_1 + 1)` exactly at random lattice
/// points. Returns the number of points checked, or the first failure.
pub fn spot_check_theorem2(net: &ReactionNetwork, cert: &MomentCertificate) -> Result<usize, Vec<i64>> {
    let g = linear_drift(net, &cert.gamma);
    let c = cert.constant.clone().unwrap_or_else(Rational::zero);
    let pts = random_points(net.n_species(), SPOT_CHECKS);
    for x in &pts {
        let lhs = g.eval(x).expect("arity");
        if lhs > &c * (l1(x) + Rational::one()) {
            return Err(x.clone());
        }
    }
    Ok(pts.len())
}

/// Looks for a blow-up certificate. `x0` is the deterministic initial state.
pub fn check_theorem3(net: &ReactionNetwork, x0: &[i64]) -> Theorem3Outcome {
    let n = net.n_species();
    assert_eq!(x0.len(), n, "initial state arity");
    let inapplicable = |reason: String, ray: Option<DualRay>| {
        Theorem3Outcome::Inapplicable(Inapplicable {
            reason,
            ray,
            high_degree_reactions: Vec::new(),
        })
    };
    let origin = vec![0i64; n];
    let origin_absorbing = net
        .reactions()
        .iter()
        .all(|r| !r.propensity.eval(&origin).expect("arity").is_positive());
    if x0 == origin.as_slice() && origin_absorbing {
        return inapplicable("0 is both the initial and an absorbing state".to_string(), None);
    }
    let r_min = net.max_propensity_degree();
    if r_min < 2 {
        return inapplicable(
            "all propensities have degree < 2; no superlinear lower bound is possible".to_string(),
            None,
        );
    }
    let rows = drift_coefficient_rows(net);
    let mut best: Option<(u32, Vec<Rational>)> = None;
    let mut last_ray = None;
    for alpha_exp in 2..=r_min {
        let mut sys = FeasibilitySystem::new(n);
        for i in 0..n {
            sys.add_lower_bound(i, Rational::one()).expect("arity");
        }
        for (_, row) in &rows {
            sys.add_ge(row.clone(), Rational::zero()).expect("arity");
        }
        for i in 0..n {
            let mut mass = vec![Rational::zero(); n];
            for (m, row) in &rows {
                if m.pure_power_of() == Some(i) && m.degree() >= alpha_exp {
                    for (acc, v) in mass.iter_mut().zip(row) {
                        *acc += v;
                    }
                }
            }
            sys.add_ge(mass, Rational::one()).expect("arity");
        }
        match solve(&sys).expect("well-formed") {
            FeasibilityOutcome::Feasible(p) => best = Some((alpha_exp, p)),
            // pure-power mass at a higher exponent is a subset of the mass at a lower one
            FeasibilityOutcome::Infeasible(ray) => {
                last_ray = Some(ray);
                break;
            }
        }
    }
    let Some((alpha_exp, gamma)) = best else {
        return inapplicable(
            "no gamma >= 1 makes gamma^T F coefficientwise nonnegative with pure-power mass >= 1 \
             of degree >= 2 in every species"
                .to_string(),
            last_ray,
        );
    };
    let constant = Rational::new(
        BigInt::one(),
        num_traits::pow(BigInt::from(n), (alpha_exp - 1) as usize),
    );
    let notes = if x0 != origin.as_slice() {
        "initial state is nonzero".to_string()
    } else {
        "initial state is 0 but 0 is not absorbing".to_string()
    };
    let mut cert = BlowupCertificate {
        gamma,
        alpha_exp,
        constant,
        r_min,
        notes,
        spot_checks: 0,
    };
    cert.spot_checks = spot_check_theorem3(net, &cert).expect("certificate sound by construction");
    Theorem3Outcome::Certified(cert)
}

pub fn verify_theorem3(net: &ReactionNetwork, x0: &[i64], cert: &BlowupCertificate) -> bool {
    let n = net.n_species();
    if cert.gamma.len() != n || !cert.gamma.iter().all(Signed::is_positive) || cert.alpha_exp < 2 {
        return false;
    }
    let origin = vec![0i64; n];
    let origin_ok = x0 != origin.as_slice()
        || net
            .reactions()
            .iter()
            .any(|r| r.propensity.eval(&origin).expect("arity").is_positive());
    let g = linear_drift(net, &cert.gamma);
    let nonneg = g.terms().all(|(_, c)| !c.is_negative());
    let n_pow = Rational::from_integer(num_traits::pow(BigInt::from(n), (cert.alpha_exp - 1) as usize));
    let required = &cert.constant * n_pow;
    let mass_ok = (0..n).all(|i| {
        let mass = g
            .terms()
            .filter(|(m, _)| m.pure_power_of() == Some(i) && m.degree() >= cert.alpha_exp)
            .fold(Rational::zero(), |s, (_, c)| s + c);
        mass >= required
    });
    origin_ok && nonneg && mass_ok && cert.constant.is_positive() && cert.r_min == net.max_propensity_degree()
}

/// Evaluates `gamma^T F(x) >= C |x|_1^alpha_exp` exactly at random lattice points.
pub fn spot_check_theorem3(net: &ReactionNetwork, cert: &BlowupCertificate) -> Result<usize, Vec<i64>> {
    let g = linear_drift(net, &cert.gamma);
    let pts = random_points(net.n_species(), SPOT_CHECKS);
    for x in &pts {
        let lhs = g.eval(x).expect("arity");
        let rhs = &cert.constant * num_traits::pow(l1(x), cert.alpha_exp as usize);
        if lhs < rhs {
            return Err(x.clone());
        }
    }
    Ok(pts.len())
}

/// Solution of `phi' = C phi^alpha`, `phi(0) = phi0`, for `alpha > 1`;
/// infinite from the blow-up time `phi0^(1-alpha) / (C (alpha-1))` on.
pub fn blowup_lower_bound(phi0: f64, c: f64, alpha: f64, t: f64) -> f64 {
    let base = phi0.powf(1.0 - alpha) - c * (alpha - 1.0) * t;
    if base <= 0.0 {
        f64::INFINITY
    } else {
        base.powf(1.0 / (1.0 - alpha))
    }
}
