//! Small reference networks used throughout the tests, the acceptance
//! suite and the README walkthrough.

use crate::network::ReactionNetwork;
use crate::polynomial::Polynomial;
use crate::rational::{rat, Rational};

fn poly(src: &str, n: usize) -> Polynomial {
    Polynomial::parse(src, n, &[]).expect("catalog polynomial")
}

/// `2 S2 -> 3 S1`, `2 S1 -> 3 S2` (jumps `(3,-2)` and `(-2,3)`), mass action.
/// From `(1,1)` neither reaction can fire.
pub fn example1() -> ReactionNetwork {
    let mut net = ReactionNetwork::with_species_count(2);
    net.add_mass_action("r1", &[0, 2], &[3, 0], rat(1)).expect("valid");
    net.add_mass_action("r2", &[2, 0], &[0, 3], rat(1)).expect("valid");
    net
}

/// Jumps `(2,-1)` at rate `x2^2` and `(-1,1)` at rate `x1`.
pub fn example2() -> ReactionNetwork {
    let mut net = ReactionNetwork::with_species_count(2);
    net.add_jump("r1", &[2, -1], poly("x2^2", 2)).expect("valid");
    net.add_jump("r2", &[-1, 1], poly("x1", 2)).expect("valid");
    net
}

/// Birth/death with birth rate `x^m` and death rate `2 x^m`.
pub fn example3(m: u32) -> ReactionNetwork {
    let mut net = ReactionNetwork::with_species_count(1);
    let x_m = poly(&format!("x1^{m}"), 1);
    net.add_jump("birth", &[1], x_m.clone()).expect("valid");
    net.add_jump("death", &[-1], x_m.scale(&rat(2))).expect("valid");
    net
}

/// `S1+S2 -> 2S1+S2`, `S1+S2 -> S1+2S2` at rate 1 and `S1+S2 -> 0` at rate 2.
pub fn example4() -> ReactionNetwork {
    let mut net = ReactionNetwork::with_species_count(2);
    net.add_mass_action("r1", &[1, 1], &[2, 1], rat(1)).expect("valid");
    net.add_mass_action("r2", &[1, 1], &[1, 2], rat(1)).expect("valid");
    net.add_mass_action("r3", &[1, 1], &[0, 0], rat(2)).expect("valid");
    net
}

/// Jumps `(2,-1)` at rate `x2^2` and `(-1,1)` at rate `x1^2`.
pub fn example5() -> ReactionNetwork {
    let mut net = ReactionNetwork::with_species_count(2);
    net.add_jump("r1", &[2, -1], poly("x2^2", 2)).expect("valid");
    net.add_jump("r2", &[-1, 1], poly("x1^2", 2)).expect("valid");
    net
}

/// `S1 <-> S2` with mass-action rates `c1`, `c2`.
pub fn conversion_pair(c1: Rational, c2: Rational) -> ReactionNetwork {
    let mut net = ReactionNetwork::with_species_count(2);
    net.add_mass_action("forward", &[1, 0], &[0, 1], c1).expect("valid");
    net.add_mass_action("backward", &[0, 1], &[1, 0], c2).expect("valid");
    net
}

/// `S1 -> 0` at the given rate.
pub fn pure_death(rate: Rational) -> ReactionNetwork {
    let mut net = ReactionNetwork::with_species_count(1);
    net.add_mass_action("death", &[1], &[0], rate).expect("valid");
    net
}

/// `2 A <-> B`.
pub fn dimerization(k_on: Rational, k_off: Rational) -> ReactionNetwork {
    let mut net = ReactionNetwork::new(vec!["A".into(), "B".into()]);
    net.add_mass_action("bind", &[2, 0], &[0, 1], k_on).expect("valid");
    net.add_mass_action("unbind", &[0, 1], &[2, 0], k_off).expect("valid");
    net
}

/// `A + B <-> C`.
pub fn complex_formation(k_on: Rational, k_off: Rational) -> ReactionNetwork {
    let mut net = ReactionNetwork::new(vec!["A".into(), "B".into(), "C".into()]);
    net.add_mass_action("bind", &[1, 1, 0], &[0, 0, 1], k_on)
        .expect("valid");
    net.add_mass_action("unbind", &[0, 0, 1], &[1, 1, 0], k_off)
        .expect("valid");
    net
}

/// `S1 -> S2 -> 0`.
pub fn decay_chain(k1: Rational, k2: Rational) -> ReactionNetwork {
    let mut net = ReactionNetwork::with_species_count(2);
    net.add_mass_action("convert", &[1, 0], &[0, 1], k1).expect("valid");
    net.add_mass_action("decay", &[0, 1], &[0, 0], k2).expect("valid");
    net
}
