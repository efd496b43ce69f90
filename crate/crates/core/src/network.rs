//! Reaction networks `(nu, a)`: stoichiometry plus polynomial propensities.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::IntMatrix;
use crate::polynomial::{CompiledPoly, Polynomial};
use crate::rational::{format_rational, rat, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetworkError {
    #[error("expected {expected} entries, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("rate must be positive, got {0}")]
    NonPositiveRate(String),
    #[error("weight {index} must be positive")]
    NonPositiveWeight { index: usize },
    #[error("propensity of reaction '{0}' has the wrong number of variables")]
    PropensityArity(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PropensityKind {
    /// `rate * prod_i x_i (x_i - 1) ... (x_i - r_i + 1)`.
    MassAction {
        rate: Rational,
    },
    Raw,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reaction {
    pub name: String,
    /// Reactant multiplicities per species.
    pub reactants: Vec<u32>,
    pub products: Vec<u32>,
    pub kind: PropensityKind,
    pub propensity: Polynomial,
}

impl Reaction {
    pub fn is_mass_action(&self) -> bool {
        matches!(self.kind, PropensityKind::MassAction { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReactionNetwork {
    species: Vec<String>,
    reactions: Vec<Reaction>,
    stoich: IntMatrix,
    /// Initial state from the model file, if any.
    pub init: Option<Vec<i64>>,
}

/// Stoichiometric column and mass-action propensity for one reaction.
pub fn build_mass_action(
    reactants: &[u32],
    products: &[u32],
    rate: &Rational,
) -> Result<(Vec<i64>, Polynomial), NetworkError> {
    if reactants.len() != products.len() {
        return Err(NetworkError::DimensionMismatch {
            expected: reactants.len(),
            got: products.len(),
        });
    }
    if !rate.is_positive() {
        return Err(NetworkError::NonPositiveRate(format_rational(rate)));
    }
    let n = reactants.len();
    let column = reactants
        .iter()
        .zip(products)
        .map(|(&r, &p)| i64::from(p) - i64::from(r))
        .collect();
    let mut prop = Polynomial::constant(n, rate.clone());
    for (i, &r) in reactants.iter().enumerate() {
        if r > 0 {
            prop = prop.mul(&Polynomial::falling_factorial(n, i, r)).expect("same arity");
        }
    }
    Ok((column, prop))
}

impl ReactionNetwork {
    pub fn new(species: Vec<String>) -> Self {
        let n = species.len();
        ReactionNetwork {
            species,
            reactions: Vec::new(),
            stoich: IntMatrix::zeros(n, 0),
            init: None,
        }
    }

    /// Species named `S1..SN`.
    pub fn with_species_count(n: usize) -> Self {
        ReactionNetwork::new((1..=n).map(|i| format!("S{i}")).collect())
    }

    fn push(&mut self, reaction: Reaction, column: Vec<i64>) {
        let mut cols = self.stoich.columns();
        cols.push(column);
        self.stoich = IntMatrix::from_columns(self.species.len(), &cols);
        self.reactions.push(reaction);
    }

    fn check_len(&self, len: usize) -> Result<(), NetworkError> {
        if len != self.species.len() {
            return Err(NetworkError::DimensionMismatch {
                expected: self.species.len(),
                got: len,
            });
        }
        Ok(())
    }

    pub fn add_mass_action(
        &mut self,
        name: &str,
        reactants: &[u32],
        products: &[u32],
        rate: Rational,
    ) -> Result<(), NetworkError> {
        self.check_len(reactants.len())?;
        let (column, propensity) = build_mass_action(reactants, products, &rate)?;
        self.push(
            Reaction {
                name: name.to_string(),
                reactants: reactants.to_vec(),
                products: products.to_vec(),
                kind: PropensityKind::MassAction { rate },
                propensity,
            },
            column,
        );
        Ok(())
    }

    /// Reaction with complexes given explicitly and an arbitrary polynomial
    /// propensity. Properness is not implied; see [`validate_properness`].
    pub fn add_raw(
        &mut self,
        name: &str,
        reactants: &[u32],
        products: &[u32],
        propensity: Polynomial,
    ) -> Result<(), NetworkError> {
        self.check_len(reactants.len())?;
        self.check_len(products.len())?;
        if propensity.nvars() != self.species.len() {
            return Err(NetworkError::PropensityArity(name.to_string()));
        }
        let column = reactants
            .iter()
            .zip(products)
            .map(|(&r, &p)| i64::from(p) - i64::from(r))
            .collect();
        self.push(
            Reaction {
                name: name.to_string(),
                reactants: reactants.to_vec(),
                products: products.to_vec(),
                kind: PropensityKind::Raw,
                propensity,
            },
            column,
        );
        Ok(())
    }

    /// Raw reaction specified by its jump vector alone.
    pub fn add_jump(&mut self, name: &str, column: &[i64], propensity: Polynomial) -> Result<(), NetworkError> {
        self.check_len(column.len())?;
        let reactants: Vec<u32> = column.iter().map(|&v| (-v).max(0) as u32).collect();
        let products: Vec<u32> = column.iter().map(|&v| v.max(0) as u32).collect();
        self.add_raw(name, &reactants, &products, propensity)
    }

    pub fn n_species(&self) -> usize {
        self.species.len()
    }

    pub fn n_reactions(&self) -> usize {
        self.reactions.len()
    }

    pub fn species_names(&self) -> &[String] {
        &self.species
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    pub fn stoich(&self) -> &IntMatrix {
        &self.stoich
    }

    pub fn propensities(&self) -> Vec<&Polynomial> {
        self.reactions.iter().map(|r| &r.propensity).collect()
    }

    pub fn compiled_propensities(&self) -> Vec<CompiledPoly> {
        self.reactions.iter().map(|r| r.propensity.compile()).collect()
    }

    /// Highest total degree among the propensities.
    pub fn max_propensity_degree(&self) -> u32 {
        self.reactions.iter().map(|r| r.propensity.degree()).max().unwrap_or(0)
    }

    /// Relabels species and reactions: new species `k` is old
    /// `species_order[k]`, likewise for reactions.
    pub fn permuted(&self, species_order: &[usize], reaction_order: &[usize]) -> ReactionNetwork {
        let n = self.n_species();
        let mut out = ReactionNetwork::new(species_order.iter().map(|&i| self.species[i].clone()).collect());
        for &j in reaction_order {
            let r = &self.reactions[j];
            let mut terms = Vec::new();
            for (m, c) in r.propensity.terms() {
                let exps: Vec<u32> = species_order.iter().map(|&i| m.exponents()[i]).collect();
                terms.push((exps, c.clone()));
            }
            let prop = Polynomial::from_terms(n, terms);
            let reactants: Vec<u32> = species_order.iter().map(|&i| r.reactants[i]).collect();
            let products: Vec<u32> = species_order.iter().map(|&i| r.products[i]).collect();
            let column: Vec<i64> = species_order.iter().map(|&i| self.stoich.get(i, j)).collect();
            out.push(
                Reaction {
                    name: r.name.clone(),
                    reactants,
                    products,
                    kind: r.kind.clone(),
                    propensity: prop,
                },
                column,
            );
        }
        out.init = self
            .init
            .as_ref()
            .map(|x| species_order.iter().map(|&i| x[i]).collect());
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ProperVerdict {
    Proper,
    Improper { species: usize, witness: Vec<i64> },
}

impl ProperVerdict {
    pub fn is_proper(&self) -> bool {
        matches!(self, ProperVerdict::Proper)
    }
}

/// Exact properness: for every consumed species `i` the propensity must be
/// divisible by the falling factorial of `x_i` of order `-nu_ij`.
pub fn validate_properness(net: &ReactionNetwork) -> Vec<ProperVerdict> {
    let nu = net.stoich();
    net.reactions()
        .iter()
        .enumerate()
        .map(|(j, r)| {
            for i in 0..net.n_species() {
                let need = -nu.get(i, j);
                if need <= 0 {
                    continue;
                }
                let ok = r
                    .propensity
                    .divisible_by_falling_factorial(i, need as u32)
                    .expect("species index in range");
                if ok {
                    continue;
                }
                // some hyperplane x_i = k (k < need) carries a nonzero restriction
                for k in 0..need {
                    let restricted = r.propensity.substitute(i, &rat(k));
                    if let Some(mut x) = restricted.nonvanishing_point() {
                        x[i] = k;
                        return ProperVerdict::Improper { species: i, witness: x };
                    }
                }
                unreachable!("non-divisible polynomial must be nonzero on some hyperplane");
            }
            ProperVerdict::Proper
        })
        .collect()
}

/// Iterates the lattice box `prod_i {0..=bounds_i}` in lexicographic order
/// with the first coordinate varying fastest.
pub fn lattice_box(bounds: &[i64]) -> impl Iterator<Item = Vec<i64>> + '_ {
    let mut cur = Some(vec![0i64; bounds.len()]);
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let mut next = out.clone();
        let mut i = 0;
        loop {
            if i == bounds.len() {
                cur = None;
                break;
            }
            if next[i] < bounds[i] {
                next[i] += 1;
                cur = Some(next);
                break;
            }
            next[i] = 0;
            i += 1;
        }
        Some(out)
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// Jump stays on the lattice but the propensity is zero.
    ZeroWhenEnabled,
    Negative,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularityViolation {
    pub state: Vec<i64>,
    pub kind: ViolationKind,
}

/// At most this many violating states are kept per reaction.
pub const MAX_RECORDED_VIOLATIONS: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RegularityVerdict {
    /// Mass-action reaction whose reactant requirements equal its
    /// consumption: positive exactly where the jump is admissible.
    RegularAnalytic,
    RegularOnBox {
        bound: i64,
    },
    Violation {
        bound: i64,
        count: usize,
        examples: Vec<RegularityViolation>,
    },
}

impl RegularityVerdict {
    pub fn is_regular(&self) -> bool {
        !matches!(self, RegularityVerdict::Violation { .. })
    }
}

fn analytic_regular(net: &ReactionNetwork, j: usize) -> bool {
    let r = &net.reactions()[j];
    r.is_mass_action() && (0..net.n_species()).all(|i| i64::from(r.reactants[i]) == (-net.stoich().get(i, j)).max(0))
}

/// Checks "`a_j(x) > 0` whenever `x + nu_j` is on the lattice" on the box
/// `{0..=bound}^N`. Negative values found on the way are reported too.
pub fn check_regularity(net: &ReactionNetwork, bound: i64) -> Vec<RegularityVerdict> {
    let n = net.n_species();
    let bounds = vec![bound; n];
    (0..net.n_reactions())
        .map(|j| {
            if analytic_regular(net, j) {
                return RegularityVerdict::RegularAnalytic;
            }
            let a = &net.reactions()[j].propensity;
            let col = net.stoich().column(j);
            let mut count = 0;
            let mut examples = Vec::new();
            for x in lattice_box(&bounds) {
                let v = a.eval(&x).expect("arity");
                let admissible = x.iter().zip(&col).all(|(xi, c)| xi + c >= 0);
                let kind = if v.is_negative() {
                    Some(ViolationKind::Negative)
                } else if admissible && v.is_zero() {
                    Some(ViolationKind::ZeroWhenEnabled)
                } else {
                    None
                };
                if let Some(kind) = kind {
                    count += 1;
                    if examples.len() < MAX_RECORDED_VIOLATIONS {
                        examples.push(RegularityViolation { state: x, kind });
                    }
                }
            }
            if count == 0 {
                RegularityVerdict::RegularOnBox { bound }
            } else {
                RegularityVerdict::Violation { bound, count, examples }
            }
        })
        .collect()
}

/// First state in `{0..=bound}^N` where a raw propensity is negative.
/// Mass-action propensities are nonnegative on the lattice and are skipped.
pub fn check_nonnegativity(net: &ReactionNetwork, bound: i64) -> Vec<Option<Vec<i64>>> {
    let bounds = vec![bound; net.n_species()];
    net.reactions()
        .iter()
        .map(|r| {
            if r.is_mass_action() || !r.propensity.has_negative_coefficient() {
                return None;
            }
            lattice_box(&bounds).find(|x| r.propensity.eval(x).expect("arity").is_negative())
        })
        .collect()
}

/// Symbolic drift `F(x) = sum_j nu_j a_j(x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DriftVector {
    pub components: Vec<Polynomial>,
}

impl DriftVector {
    pub fn eval(&self, x: &[i64]) -> Vec<Rational> {
        self.components.iter().map(|p| p.eval(x).expect("arity")).collect()
    }
}

pub fn drift(net: &ReactionNetwork) -> DriftVector {
    let n = net.n_species();
    let nu = net.stoich();
    let components = (0..n)
        .map(|i| {
            net.reactions()
                .iter()
                .enumerate()
                .fold(Polynomial::zero(n), |acc, (j, r)| {
                    let c = nu.get(i, j);
                    if c == 0 {
                        acc
                    } else {
                        acc.add(&r.propensity.scale(&rat(c))).expect("arity")
                    }
                })
        })
        .collect();
    DriftVector { components }
}

/// `gamma^T F(x)`; requires `gamma > 0` componentwise.
pub fn weighted_drift(net: &ReactionNetwork, gamma: &[Rational]) -> Result<Polynomial, NetworkError> {
    if gamma.len() != net.n_species() {
        return Err(NetworkError::DimensionMismatch {
            expected: net.n_species(),
            got: gamma.len(),
        });
    }
    if let Some(index) = gamma.iter().position(|g| !g.is_positive()) {
        return Err(NetworkError::NonPositiveWeight { index });
    }
    Ok(linear_drift(net, gamma))
}

/// `sum_j (w^T nu_j) a_j` for any weight vector `w`.
pub(crate) fn linear_drift(net: &ReactionNetwork, w: &[Rational]) -> Polynomial {
    let n = net.n_species();
    let nu = net.stoich();
    net.reactions()
        .iter()
        .enumerate()
        .fold(Polynomial::zero(n), |acc, (j, r)| {
            let s = (0..n).fold(Rational::zero(), |s, i| s + &w[i] * rat(nu.get(i, j)));
            if s.is_zero() {
                acc
            } else {
                acc.add(&r.propensity.scale(&s)).expect("arity")
            }
        })
}

pub fn ones(n: usize) -> Vec<Rational> {
    vec![Rational::one(); n]
}
