//! Stoichiometric boundedness, critical species/reactions and accessibility.
//!
//! Species `i` is stoichiometrically bounded iff some `alpha >= 0` with
//! `alpha_i > 0` satisfies `alpha^T nu <= 0`; otherwise some `w >= 0` has
//! `nu w >= 0` and `(nu w)_i > 0`. Both sides are decided with the exact
//! solver in [`crate::feasibility`] and only depend on `nu`, never on an
//! initial state.

use std::collections::{HashMap, VecDeque};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::feasibility::{alternative_witness, integerize, solve, FeasibilityOutcome, FeasibilitySystem};
use crate::matrix::IntMatrix;
use crate::network::ReactionNetwork;
use crate::rational::gcd_of;

/// `alpha >= 0`, `alpha_i >= 1` for `i` in `covered`, `alpha^T nu <= 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundednessCertificate {
    pub alpha: Vec<BigInt>,
    pub covered: Vec<usize>,
}

impl BoundednessCertificate {
    pub fn verify(&self, nu: &IntMatrix) -> bool {
        self.alpha.len() == nu.nrows()
            && self.alpha.iter().all(|a| !a.is_negative())
            && self
                .covered
                .iter()
                .all(|&i| i < nu.nrows() && self.alpha[i] >= BigInt::one())
            && (0..nu.ncols()).all(|j| {
                let s: BigInt = (0..nu.nrows()).map(|i| &self.alpha[i] * nu.get(i, j)).sum();
                !s.is_positive()
            })
    }

    /// Certificates add: the sum covers the union.
    pub fn combine(&self, other: &BoundednessCertificate) -> BoundednessCertificate {
        let mut covered: Vec<usize> = self.covered.iter().chain(&other.covered).copied().collect();
        covered.sort_unstable();
        covered.dedup();
        BoundednessCertificate {
            alpha: self.alpha.iter().zip(&other.alpha).map(|(a, b)| a + b).collect(),
            covered,
        }
    }
}

/// `w >= 0` with `nu w >= 0` and `(nu w)_i >= 1` for every `i` in `species`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnboundednessWitness {
    pub w: Vec<BigInt>,
    pub species: Vec<usize>,
}

impl UnboundednessWitness {
    pub fn net_change(&self, nu: &IntMatrix) -> Vec<BigInt> {
        (0..nu.nrows())
            .map(|i| (0..nu.ncols()).map(|j| &self.w[j] * nu.get(i, j)).sum())
            .collect()
    }

    pub fn verify(&self, nu: &IntMatrix) -> bool {
        if self.w.len() != nu.ncols() || self.w.iter().any(Signed::is_negative) {
            return false;
        }
        let nw = self.net_change(nu);
        nw.iter().all(|v| !v.is_negative()) && self.species.iter().all(|&i| i < nu.nrows() && nw[i] >= BigInt::one())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpeciesBoundedness {
    Bounded(BoundednessCertificate),
    Unbounded(UnboundednessWitness),
}

impl SpeciesBoundedness {
    pub fn is_bounded(&self) -> bool {
        matches!(self, SpeciesBoundedness::Bounded(_))
    }

    pub fn verify(&self, nu: &IntMatrix) -> bool {
        match self {
            SpeciesBoundedness::Bounded(c) => c.verify(nu),
            SpeciesBoundedness::Unbounded(w) => w.verify(nu),
        }
    }
}

/// Divides out the common factor of a nonzero integer vector.
fn primitive(v: Vec<BigInt>) -> Vec<BigInt> {
    let g = gcd_of(&v);
    if g.is_zero() || g.is_one() {
        v
    } else {
        v.into_iter().map(|x| x / &g).collect()
    }
}

fn certificate_system(nu: &IntMatrix, covered: &[usize]) -> FeasibilitySystem {
    let mut sys = FeasibilitySystem::new(nu.nrows());
    for &i in covered {
        let mut row = vec![0; nu.nrows()];
        row[i] = 1;
        sys.add_ge_int(&row, 1).expect("arity");
    }
    for j in 0..nu.ncols() {
        sys.add_le_int(&nu.column(j), 0).expect("arity");
    }
    sys
}

/// Searches for one `alpha` covering every species in `covered`.
pub fn certificate_for(nu: &IntMatrix, covered: &[usize]) -> Option<BoundednessCertificate> {
    match solve(&certificate_system(nu, covered)).expect("well-formed") {
        FeasibilityOutcome::Feasible(p) => {
            let alpha = primitive(integerize(&p, covered).expect("alpha >= 1 on covered species"));
            let cert = BoundednessCertificate {
                alpha,
                covered: covered.to_vec(),
            };
            debug_assert!(cert.verify(nu));
            Some(cert)
        }
        FeasibilityOutcome::Infeasible(_) => None,
    }
}

/// Searches for one `w` growing every species in `species` at once.
pub fn witness_for(nu: &IntMatrix, species: &[usize]) -> Option<UnboundednessWitness> {
    let w = if species.len() == 1 {
        alternative_witness(nu, species[0])?
    } else {
        let mut sys = FeasibilitySystem::new(nu.ncols());
        for i in 0..nu.nrows() {
            sys.add_ge_int(nu.row(i), i64::from(species.contains(&i)))
                .expect("arity");
        }
        match solve(&sys).expect("well-formed") {
            FeasibilityOutcome::Feasible(p) => integerize(&p, &[]).expect("nonnegative"),
            FeasibilityOutcome::Infeasible(_) => return None,
        }
    };
    let out = UnboundednessWitness {
        w: primitive(w),
        species: species.to_vec(),
    };
    debug_assert!(out.verify(nu));
    Some(out)
}

/// Decides boundedness of one species. Exactly one outcome exists.
pub fn decide_species_boundedness(nu: &IntMatrix, species: usize) -> SpeciesBoundedness {
    assert!(species < nu.nrows(), "species index out of range");
    if let Some(c) = certificate_for(nu, &[species]) {
        return SpeciesBoundedness::Bounded(c);
    }
    let w = witness_for(nu, &[species]).expect("theorem of alternatives: a witness must exist");
    SpeciesBoundedness::Unbounded(w)
}

/// Decides every species, then reports one shared certificate for all
/// bounded species and one shared witness for all unbounded ones.
pub fn decide_all_species(nu: &IntMatrix) -> Vec<SpeciesBoundedness> {
    let single: Vec<SpeciesBoundedness> = (0..nu.nrows()).map(|i| decide_species_boundedness(nu, i)).collect();
    let bounded: Vec<usize> = (0..nu.nrows()).filter(|&i| single[i].is_bounded()).collect();
    let unbounded: Vec<usize> = (0..nu.nrows()).filter(|&i| !single[i].is_bounded()).collect();
    let joint_cert = if bounded.is_empty() {
        None
    } else {
        Some(certificate_for(nu, &bounded).expect("certificates add"))
    };
    let joint_witness = if unbounded.is_empty() {
        None
    } else {
        Some(witness_for(nu, &unbounded).expect("witnesses add"))
    };
    (0..nu.nrows())
        .map(|i| {
            if single[i].is_bounded() {
                SpeciesBoundedness::Bounded(joint_cert.clone().expect("nonempty"))
            } else {
                SpeciesBoundedness::Unbounded(joint_witness.clone().expect("nonempty"))
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetRefusal {
    /// Members of the requested subset that are individually unbounded.
    pub unbounded: Vec<usize>,
    /// The largest certifiable part of the requested subset.
    pub boundable: Vec<usize>,
}

pub fn decide_subset_boundedness(nu: &IntMatrix, subset: &[usize]) -> Result<BoundednessCertificate, SubsetRefusal> {
    assert!(!subset.is_empty(), "subset must be nonempty");
    if let Some(c) = certificate_for(nu, subset) {
        return Ok(c);
    }
    let (boundable, unbounded) = subset
        .iter()
        .partition(|&&i| decide_species_boundedness(nu, i).is_bounded());
    Err(SubsetRefusal { unbounded, boundable })
}

/// Critical species are the stoichiometrically unbounded ones; a reaction
/// is critical when its propensity has degree at least two in them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalPartition {
    pub critical_species: Vec<usize>,
    pub noncritical_species: Vec<usize>,
    pub critical_reactions: Vec<usize>,
    pub noncritical_reactions: Vec<usize>,
    /// Critical rows, all columns.
    pub nu1: IntMatrix,
    /// Non-critical rows, all columns.
    pub nu2: IntMatrix,
    /// Critical rows by critical columns.
    pub nuc: IntMatrix,
    /// Position `k` of the reordered system holds original species `species_order[k]`.
    pub species_order: Vec<usize>,
    pub reaction_order: Vec<usize>,
    /// Reactions whose propensity has negative coefficients; their
    /// classification is by degree only.
    pub sign_mixed_reactions: Vec<usize>,
    pub species_outcomes: Vec<SpeciesBoundedness>,
}

impl CriticalPartition {
    pub fn n_critical_species(&self) -> usize {
        self.critical_species.len()
    }

    pub fn n_critical_reactions(&self) -> usize {
        self.critical_reactions.len()
    }

    /// Inverse of `species_order`: original index to reordered position.
    pub fn species_position(&self) -> Vec<usize> {
        let mut pos = vec![0; self.species_order.len()];
        for (k, &i) in self.species_order.iter().enumerate() {
            pos[i] = k;
        }
        pos
    }
}

pub fn classify(net: &ReactionNetwork) -> CriticalPartition {
    let nu = net.stoich();
    let species_outcomes = decide_all_species(nu);
    let critical_species: Vec<usize> = (0..net.n_species())
        .filter(|&i| !species_outcomes[i].is_bounded())
        .collect();
    let noncritical_species: Vec<usize> = (0..net.n_species())
        .filter(|&i| species_outcomes[i].is_bounded())
        .collect();
    let mut critical_reactions = Vec::new();
    let mut noncritical_reactions = Vec::new();
    let mut sign_mixed_reactions = Vec::new();
    for (j, r) in net.reactions().iter().enumerate() {
        let p = if r.propensity.has_negative_coefficient() {
            sign_mixed_reactions.push(j);
            r.propensity.abs_coefficients()
        } else {
            r.propensity.clone()
        };
        if p.max_degree_in(&critical_species) >= 2 {
            critical_reactions.push(j);
        } else {
            noncritical_reactions.push(j);
        }
    }
    let all_cols: Vec<usize> = (0..net.n_reactions()).collect();
    CriticalPartition {
        nu1: nu.submatrix(&critical_species, &all_cols),
        nu2: nu.submatrix(&noncritical_species, &all_cols),
        nuc: nu.submatrix(&critical_species, &critical_reactions),
        species_order: critical_species.iter().chain(&noncritical_species).copied().collect(),
        reaction_order: critical_reactions
            .iter()
            .chain(&noncritical_reactions)
            .copied()
            .collect(),
        critical_species,
        noncritical_species,
        critical_reactions,
        noncritical_reactions,
        sign_mixed_reactions,
        species_outcomes,
    }
}

/// Positive integer weights whose weighted 1-norm never increases along
/// the jumps in `reactions`, or `None` if no such weights exist.
pub fn construct_monotone_norm(nu: &IntMatrix, reactions: &[usize]) -> Option<Vec<BigInt>> {
    let n = nu.nrows();
    let mut sys = FeasibilitySystem::new(n);
    for i in 0..n {
        let mut row = vec![0; n];
        row[i] = 1;
        sys.add_ge_int(&row, 1).expect("arity");
    }
    for &j in reactions {
        sys.add_le_int(&nu.column(j), 0).expect("arity");
    }
    let p = solve(&sys).expect("well-formed").point()?.to_vec();
    let all: Vec<usize> = (0..n).collect();
    Some(integerize(&p, &all).expect("weights >= 1"))
}

/// Checks `alpha > 0` and `alpha^T nu_j <= 0` for the listed reactions.
pub fn is_monotone_norm(nu: &IntMatrix, reactions: &[usize], alpha: &[BigInt]) -> bool {
    alpha.len() == nu.nrows()
        && alpha.iter().all(Signed::is_positive)
        && reactions.iter().all(|&j| {
            let s: BigInt = (0..nu.nrows()).map(|i| &alpha[i] * nu.get(i, j)).sum();
            !s.is_positive()
        })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplorationCaps {
    pub max_states: usize,
    pub max_coord: i64,
}

impl Default for ExplorationCaps {
    fn default() -> Self {
        ExplorationCaps {
            max_states: 100_000,
            max_coord: 1_000,
        }
    }
}

/// Breadth-first sample of the accessible set with a firing path per state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AccessibleSetSample {
    pub states: Vec<Vec<i64>>,
    /// Predecessor index and fired reaction; `None` for the initial state.
    pub parents: Vec<Option<(usize, usize)>>,
    pub frontier_exhausted: bool,
    pub cap_hit: bool,
}

impl AccessibleSetSample {
    pub fn index_of(&self, state: &[i64]) -> Option<usize> {
        self.states.iter().position(|s| s == state)
    }

    pub fn contains(&self, state: &[i64]) -> bool {
        self.index_of(state).is_some()
    }

    /// Reactions fired from the initial state to `states[idx]`, in order.
    pub fn path_to(&self, idx: usize) -> Vec<usize> {
        let mut path = Vec::new();
        let mut cur = idx;
        while let Some((parent, j)) = self.parents[cur] {
            path.push(j);
            cur = parent;
        }
        path.reverse();
        path
    }

    /// Complete only when the frontier emptied without touching a cap.
    pub fn is_complete(&self) -> bool {
        self.frontier_exhausted && !self.cap_hit
    }
}

fn enabled(prop: &crate::polynomial::CompiledPoly, x: &[i64]) -> bool {
    prop.eval(x) > 0.0
}

pub fn explore_accessible(net: &ReactionNetwork, x0: &[i64], caps: ExplorationCaps) -> AccessibleSetSample {
    assert_eq!(x0.len(), net.n_species(), "initial state arity");
    let props = net.compiled_propensities();
    let columns = net.stoich().columns();
    let mut states = vec![x0.to_vec()];
    let mut parents = vec![None];
    let mut seen: HashMap<Vec<i64>, usize> = HashMap::from([(x0.to_vec(), 0)]);
    let mut queue = VecDeque::from([0usize]);
    let mut cap_hit = false;
    'bfs: while let Some(idx) = queue.pop_front() {
        let x = states[idx].clone();
        for (j, col) in columns.iter().enumerate() {
            if !enabled(&props[j], &x) {
                continue;
            }
            let y: Vec<i64> = x.iter().zip(col).map(|(a, b)| a + b).collect();
            if y.iter().any(|&v| v < 0) {
                // improper jump; excluded by precondition
                continue;
            }
            if seen.contains_key(&y) {
                continue;
            }
            if y.iter().any(|&v| v > caps.max_coord) {
                cap_hit = true;
                continue;
            }
            if states.len() >= caps.max_states {
                cap_hit = true;
                break 'bfs;
            }
            seen.insert(y.clone(), states.len());
            queue.push_back(states.len());
            states.push(y);
            parents.push(Some((idx, j)));
        }
    }
    AccessibleSetSample {
        states,
        parents,
        frontier_exhausted: queue.is_empty(),
        cap_hit,
    }
}

/// Incremental firing schedule: `u_1 = 0` and each step adds one unit
/// vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountingSequence {
    pub firings: Vec<usize>,
    pub partial_sums: Vec<Vec<i64>>,
}

impl CountingSequence {
    pub fn is_valid(&self) -> bool {
        let Some(first) = self.partial_sums.first() else {
            return false;
        };
        if first.iter().any(|&v| v != 0) || self.partial_sums.len() != self.firings.len() + 1 {
            return false;
        }
        self.partial_sums.windows(2).zip(&self.firings).all(|(w, &j)| {
            w[1].iter()
                .zip(&w[0])
                .enumerate()
                .all(|(k, (b, a))| b - a == i64::from(k == j))
        })
    }
}

/// Threshold state from a witness: firing reactions in ascending index
/// order, each `w_j` times, keeps every partial state on the lattice when
/// started from any `x >= x_bar`.
pub fn unboundedness_threshold(nu: &IntMatrix, w: &[BigInt]) -> (Vec<i64>, CountingSequence) {
    assert_eq!(w.len(), nu.ncols(), "witness arity");
    let counts: Vec<i64> = w
        .iter()
        .map(|v| {
            v.to_i64()
                .filter(|&c| c >= 0)
                .expect("witness entries must be small nonnegative integers")
        })
        .collect();
    let mut firings = Vec::new();
    for (j, &c) in counts.iter().enumerate() {
        firings.extend(std::iter::repeat_n(j, c as usize));
    }
    let mut u = vec![0i64; nu.ncols()];
    let mut partial_sums = vec![u.clone()];
    let mut x_bar = vec![0i64; nu.nrows()];
    let mut state = vec![0i64; nu.nrows()];
    for &j in &firings {
        u[j] += 1;
        partial_sums.push(u.clone());
        for (i, s) in state.iter_mut().enumerate() {
            *s += nu.get(i, j);
            x_bar[i] = x_bar[i].max(-*s);
        }
    }
    let seq = CountingSequence { firings, partial_sums };
    debug_assert!(threshold_holds(nu, &x_bar, &seq));
    (x_bar, seq)
}

/// Every partial state `x_bar + nu u_l` is nonnegative.
pub fn threshold_holds(nu: &IntMatrix, x_bar: &[i64], seq: &CountingSequence) -> bool {
    seq.partial_sums.iter().all(|u| {
        let u128: Vec<i128> = u.iter().map(|&v| i128::from(v)).collect();
        nu.mul_vec(&u128)
            .iter()
            .zip(x_bar)
            .all(|(d, &x)| i128::from(x) + d >= 0)
    })
}
