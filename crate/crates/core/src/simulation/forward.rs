use serde::{Deserialize, Serialize};

use super::SimulationError;
use crate::network::{lattice_box, ReactionNetwork};

/// Required agreement between `sum p + leaked` and 1.
pub const MASS_BALANCE_TOL: f64 = 1e-9;
const RTOL: f64 = 1e-10;
const ATOL: f64 = 1e-14;
const MAX_STEPS: usize = 5_000_000;
const LEAK_WARNING: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ForwardStatus {
    Ok,
    /// More than half the mass left the box.
    BoxTooSmall,
}

/// `p(t; x)` on the box `{0..=bounds[i]}`, plus the mass that has flowed out.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncatedDistribution {
    pub bounds: Vec<i64>,
    pub t: f64,
    /// Indexed like [`lattice_box`]: first coordinate fastest.
    pub probs: Vec<f64>,
    pub leaked: f64,
    pub status: ForwardStatus,
}

impl TruncatedDistribution {
    pub fn index_of(&self, x: &[i64]) -> Option<usize> {
        state_index(&self.bounds, x)
    }

    pub fn probability(&self, x: &[i64]) -> f64 {
        self.index_of(x).map_or(0.0, |k| self.probs[k])
    }

    pub fn mass_in_box(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn mass_balance_error(&self) -> f64 {
        (self.mass_in_box() + self.leaked - 1.0).abs()
    }

    /// `sum_x ||x||_1^r p(t; x)` over the box; a lower bound on the true
    /// moment whenever mass has leaked.
    pub fn moment(&self, r: u32) -> f64 {
        lattice_box(&self.bounds)
            .zip(&self.probs)
            .map(|(x, p)| (x.iter().sum::<i64>() as f64).powi(r as i32) * p)
            .sum()
    }

    pub fn moments_are_lower_bounds(&self) -> bool {
        self.leaked > 0.0
    }
}

fn state_index(bounds: &[i64], x: &[i64]) -> Option<usize> {
    if x.len() != bounds.len() {
        return None;
    }
    let mut idx = 0usize;
    let mut stride = 1usize;
    for (&xi, &b) in x.iter().zip(bounds) {
        if xi < 0 || xi > b {
            return None;
        }
        idx += xi as usize * stride;
        stride *= (b + 1) as usize;
    }
    Some(idx)
}

/// `(from, to, rate)`; `to == n_states` is the leak state.
type Transition = (usize, usize, f64);

fn generator(net: &ReactionNetwork, bounds: &[i64]) -> Result<(usize, Vec<Transition>), SimulationError> {
    let props = net.compiled_propensities();
    let columns = net.stoich().columns();
    let n_states: usize = bounds.iter().map(|&b| (b + 1) as usize).product();
    let mut transitions = Vec::new();
    for (from, x) in lattice_box(bounds).enumerate() {
        for (j, (p, col)) in props.iter().zip(&columns).enumerate() {
            let a = p.eval(&x);
            if a < 0.0 {
                return Err(SimulationError::NegativePropensity {
                    state: x,
                    reaction: j,
                    value: a,
                });
            }
            if a == 0.0 {
                continue;
            }
            let y: Vec<i64> = x.iter().zip(col).map(|(a, b)| a + b).collect();
            if y.iter().any(|&v| v < 0) {
                return Err(SimulationError::LeavesOrthant { state: x, reaction: j });
            }
            let to = state_index(bounds, &y).unwrap_or(n_states);
            transitions.push((from, to, a));
        }
    }
    Ok((n_states, transitions))
}

fn apply(transitions: &[Transition], p: &[f64], dp: &mut [f64]) {
    dp.iter_mut().for_each(|v| *v = 0.0);
    for &(from, to, rate) in transitions {
        let flow = rate * p[from];
        dp[from] -= flow;
        dp[to] += flow;
    }
}

// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct Integrator<'a> {
    transitions: &'a [Transition],
    k: Vec<Vec<f64>>,
    tmp: Vec<f64>,
    h: f64,
    steps: usize,
}

impl<'a> Integrator<'a> {
    fn new(transitions: &'a [Transition], dim: usize) -> Self {
        let max_rate = transitions.iter().map(|t| t.2).fold(0.0, f64::max);
        Integrator {
            transitions,
            k: vec![vec![0.0; dim]; 7],
            tmp: vec![0.0; dim],
            h: if max_rate > 0.0 { 0.1 / max_rate } else { 1.0 },
            steps: 0,
        }
    }

    /// Advances `y` from `t0` to `t1` in place.
    fn advance(&mut self, y: &mut [f64], t0: f64, t1: f64) -> Result<(), SimulationError> {
        if self.transitions.is_empty() {
            return Ok(());
        }
        let mut t = t0;
        apply(self.transitions, y, &mut self.k[0]);
        while t < t1 {
            self.steps += 1;
            if self.steps > MAX_STEPS {
                return Err(SimulationError::StepLimit(MAX_STEPS));
            }
            let last = t + self.h >= t1;
            let h = if last { t1 - t } else { self.h };
            for s in 1..7 {
                let (done, rest) = self.k.split_at_mut(s);
                for (i, (slot, &yi)) in self.tmp.iter_mut().zip(y.iter()).enumerate() {
                    let mut acc = yi;
                    for (r, a) in A[s][..s].iter().enumerate() {
                        acc += h * a * done[r][i];
                    }
                    *slot = acc;
                }
                apply(self.transitions, &self.tmp, &mut rest[0]);
            }
            // tmp now holds the 5th-order solution (row 6 of A equals b).
            let mut err = 0.0f64;
            for (i, (yi, zi)) in y.iter().zip(&self.tmp).enumerate() {
                let e: f64 = (0..7).map(|s| E[s] * self.k[s][i]).sum::<f64>() * h;
                let scale = ATOL + RTOL * yi.abs().max(zi.abs());
                err = err.max((e / scale).abs());
            }
            if err <= 1.0 {
                t = if last { t1 } else { t + h };
                y.copy_from_slice(&self.tmp);
                let (first, rest) = self.k.split_at_mut(1);
                first[0].copy_from_slice(&rest[5]);
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if !(last && err <= 1.0) {
                self.h = h * factor;
            }
        }
        Ok(())
    }
}

/// Integrates the forward equations restricted to the box from a point mass
/// at `x0`, returning the distribution at each (increasing) time in `times`.
pub fn integrate_forward_grid(
    net: &ReactionNetwork,
    x0: &[i64],
    times: &[f64],
    bounds: &[i64],
) -> Result<Vec<TruncatedDistribution>, SimulationError> {
    if bounds.len() != net.n_species() || x0.len() != net.n_species() {
        return Err(SimulationError::DimensionMismatch {
            expected: net.n_species(),
            got: if bounds.len() != net.n_species() {
                bounds.len()
            } else {
                x0.len()
            },
        });
    }
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) || times.windows(2).any(|w| w[0] > w[1]) {
        return Err(SimulationError::InvalidArgument(
            "times must be finite, >= 0 and nondecreasing".to_string(),
        ));
    }
    let start = state_index(bounds, x0).ok_or_else(|| SimulationError::InitialOutsideBox(x0.to_vec()))?;
    let (n_states, transitions) = generator(net, bounds)?;
    let mut y = vec![0.0; n_states + 1];
    y[start] = 1.0;
    let mut integrator = Integrator::new(&transitions, n_states + 1);
    let mut t = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        if target > t {
            integrator.advance(&mut y, t, target)?;
            t = target;
        }
        let leaked = y[n_states];
        out.push(TruncatedDistribution {
            bounds: bounds.to_vec(),
            t: target,
            probs: y[..n_states].to_vec(),
            leaked,
            status: if leaked > LEAK_WARNING {
                ForwardStatus::BoxTooSmall
            } else {
                ForwardStatus::Ok
            },
        });
    }
    Ok(out)
}

pub fn integrate_forward_equations(
    net: &ReactionNetwork,
    x0: &[i64],
    t_end: f64,
    bounds: &[i64],
) -> Result<TruncatedDistribution, SimulationError> {
    Ok(integrate_forward_grid(net, x0, &[t_end], bounds)?.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::rational::rat;

    #[test]
    fn pure_death_from_two() {
        let net = catalog::pure_death(rat(1));
        let d = integrate_forward_equations(&net, &[2], 1.0, &[2]).unwrap();
        let want = (1.0 - (-1.0f64).exp()).powi(2);
        assert!((d.probability(&[0]) - want).abs() < 1e-9);
        assert!((d.probability(&[0]) - 0.39958).abs() < 1e-5);
        assert!(d.mass_balance_error() < MASS_BALANCE_TOL);
        assert_eq!(d.leaked, 0.0);
    }

    #[test]
    fn symmetric_two_state_chain() {
        let net = catalog::conversion_pair(rat(1), rat(1));
        let ds = integrate_forward_grid(&net, &[1, 0], &[0.5, 20.0], &[1, 1]).unwrap();
        let want = (1.0 + (-1.0f64).exp()) / 2.0;
        assert!((ds[0].probability(&[1, 0]) - want).abs() < 1e-9);
        assert!((ds[1].probability(&[1, 0]) - 0.5).abs() < 1e-6);
        assert!((ds[1].probability(&[0, 1]) - 0.5).abs() < 1e-6);
    }

    #[test]
    fn zero_time_is_point_mass() {
        let net = catalog::example4();
        let d = integrate_forward_equations(&net, &[2, 3], 0.0, &[5, 5]).unwrap();
        assert_eq!(d.probability(&[2, 3]), 1.0);
        assert_eq!(d.mass_in_box(), 1.0);
    }

    #[test]
    fn leak_is_tracked() {
        let net = catalog::example5();
        let d = integrate_forward_equations(&net, &[1, 1], 5.0, &[4, 4]).unwrap();
        assert!(d.leaked > 0.5);
        assert_eq!(d.status, ForwardStatus::BoxTooSmall);
        assert!(d.moments_are_lower_bounds());
        assert!(d.mass_balance_error() < MASS_BALANCE_TOL);
    }

    #[test]
    fn initial_state_must_be_in_box() {
        let net = catalog::example4();
        assert!(matches!(
            integrate_forward_equations(&net, &[6, 0], 1.0, &[5, 5]),
            Err(SimulationError::InitialOutsideBox(_))
        ));
    }
}
