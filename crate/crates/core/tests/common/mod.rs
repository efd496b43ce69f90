//! Shared proptest strategies.
#![allow(dead_code)]

use momentcert::matrix::IntMatrix;
use momentcert::network::ReactionNetwork;
use momentcert::polynomial::Polynomial;
use momentcert::rational::{ratio, Rational};
use proptest::prelude::*;

pub fn arb_rational() -> impl Strategy<Value = Rational> {
    (-4i64..=4, 1i64..=3).prop_map(|(n, d)| ratio(n, d))
}

/// Up to `max_terms` terms, each exponent at most `max_exp`.
pub fn arb_poly(nvars: usize, max_terms: usize, max_exp: u32) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(
        (prop::collection::vec(0..=max_exp, nvars), arb_rational()),
        0..=max_terms,
    )
    .prop_map(move |terms| Polynomial::from_terms(nvars, terms))
}

pub fn arb_point(nvars: usize, max: i64) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(0..=max, nvars)
}

pub fn arb_matrix(max_rows: usize, max_cols: usize, bound: i64) -> impl Strategy<Value = IntMatrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(move |(n, m)| {
        prop::collection::vec(prop::collection::vec(-bound..=bound, m), n).prop_map(|rows| IntMatrix::from_rows(&rows))
    })
}

/// Mass-action network with `n` species; complexes have at most two
/// molecules of each species.
pub fn arb_mass_action(max_species: usize, max_reactions: usize) -> impl Strategy<Value = ReactionNetwork> {
    (1..=max_species, 1..=max_reactions).prop_flat_map(|(n, m)| {
        let complex = move || prop::collection::vec(0u32..=2, n);
        prop::collection::vec((complex(), complex(), 1i64..=5), m).prop_map(move |rs| {
            let mut net = ReactionNetwork::with_species_count(n);
            for (j, (lhs, rhs, k)) in rs.into_iter().enumerate() {
                net.add_mass_action(&format!("r{}", j + 1), &lhs, &rhs, ratio(k, 1))
                    .expect("well-formed reaction");
            }
            net
        })
    })
}

/// Pure-birth networks with one power-law reaction per species plus
/// optional cross terms; all drift coefficients are nonnegative.
pub fn arb_explosive(max_species: usize) -> impl Strategy<Value = ReactionNetwork> {
    (1..=max_species).prop_flat_map(|n| {
        let column = move || prop::collection::vec(0i64..=2, n).prop_filter("nonzero", |c| c.iter().any(|&v| v > 0));
        let extra = move || prop::collection::vec((prop::collection::vec(0u32..=2, n), 0i64..=3), 0..=2);
        prop::collection::vec((column(), 2u32..=3, 1i64..=4, extra()), n).prop_map(move |rs| {
            let mut net = ReactionNetwork::with_species_count(n);
            for (i, (col, d, c, extra)) in rs.into_iter().enumerate() {
                let mut exps = vec![0; n];
                exps[i] = d;
                let mut terms = vec![(exps, ratio(c, 1))];
                terms.extend(extra.into_iter().map(|(e, k)| (e, ratio(k, 1))));
                net.add_jump(&format!("r{}", i + 1), &col, Polynomial::from_terms(n, terms))
                    .expect("well-formed reaction");
            }
            net
        })
    })
}
