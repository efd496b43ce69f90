use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::SimulationError;
use crate::network::ReactionNetwork;
use crate::polynomial::CompiledPoly;

pub const DEFAULT_EVENT_CAP: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TrajectoryStatus {
    Absorbed,
    TimeReached,
    Censored,
}

/// A single sample path. `times[0] = 0` and `state(0)` is the initial state;
/// entry `k > 0` is the `k`-th jump and the state right after it.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub n_species: usize,
    pub times: Vec<f64>,
    states: Vec<i64>,
    /// Reaction fired at each jump, `fired.len() == times.len() - 1`.
    pub fired: Vec<usize>,
    /// `R_j` over the whole path.
    pub event_counts: Vec<u64>,
    pub status: TrajectoryStatus,
    /// The path is known on `[0, end_time]` (absorbed, time reached) or
    /// `[0, end_time)` (censored: `end_time` is the jump the cap forbade).
    pub end_time: f64,
}

impl Trajectory {
    pub fn n_jumps(&self) -> usize {
        self.fired.len()
    }

    pub fn state(&self, k: usize) -> &[i64] {
        &self.states[k * self.n_species..(k + 1) * self.n_species]
    }

    pub fn final_state(&self) -> &[i64] {
        self.state(self.n_jumps())
    }

    fn known_at(&self, t: f64) -> bool {
        match self.status {
            TrajectoryStatus::Censored => t < self.end_time,
            _ => t <= self.end_time,
        }
    }

    /// Index of the last jump at or before `t`.
    fn index_at(&self, t: f64) -> usize {
        self.times.partition_point(|&s| s <= t).saturating_sub(1)
    }

    /// `X(t)`, or `None` if the path is not known at `t`.
    pub fn state_at(&self, t: f64) -> Option<&[i64]> {
        self.known_at(t).then(|| self.state(self.index_at(t)))
    }

    /// `R_j(t)` for every reaction.
    pub fn counts_at(&self, t: f64) -> Option<Vec<u64>> {
        if !self.known_at(t) {
            return None;
        }
        let mut counts = vec![0u64; self.event_counts.len()];
        for &j in &self.fired[..self.index_at(t)] {
            counts[j] += 1;
        }
        Some(counts)
    }
}

/// Compiled propensities and stoichiometric columns for the direct method.
pub(crate) struct Engine {
    props: Vec<CompiledPoly>,
    columns: Vec<Vec<i64>>,
    n: usize,
}

pub(crate) struct RunEnd {
    pub status: TrajectoryStatus,
    pub end_time: f64,
}

impl Engine {
    pub fn new(net: &ReactionNetwork) -> Self {
        Engine {
            props: net.compiled_propensities(),
            columns: net.stoich().columns(),
            n: net.n_species(),
        }
    }

    pub fn check_state(&self, x0: &[i64]) -> Result<(), SimulationError> {
        if x0.len() != self.n {
            return Err(SimulationError::DimensionMismatch {
                expected: self.n,
                got: x0.len(),
            });
        }
        if x0.iter().any(|&v| v < 0) {
            return Err(SimulationError::InvalidArgument(format!(
                "initial state {x0:?} has a negative coordinate"
            )));
        }
        Ok(())
    }

    /// Runs the direct method, calling `on_jump(t, state_after, j)` per event.
    pub fn run<F: FnMut(f64, &[i64], usize)>(
        &self,
        x0: &[i64],
        t_end: f64,
        event_cap: u64,
        rng: &mut ChaCha8Rng,
        mut on_jump: F,
    ) -> Result<RunEnd, SimulationError> {
        let mut x = x0.to_vec();
        let mut a = vec![0.0; self.props.len()];
        let mut t = 0.0;
        let mut events = 0u64;
        loop {
            let mut a0 = 0.0;
            for (j, p) in self.props.iter().enumerate() {
                let v = p.eval(&x);
                if v < 0.0 {
                    return Err(SimulationError::NegativePropensity {
                        state: x,
                        reaction: j,
                        value: v,
                    });
                }
                a[j] = v;
                a0 += v;
            }
            if a0 == 0.0 {
                return Ok(RunEnd {
                    status: TrajectoryStatus::Absorbed,
                    end_time: t_end,
                });
            }
            let u: f64 = rng.sample(Open01);
            let tau = -u.ln() / a0;
            if t + tau > t_end {
                return Ok(RunEnd {
                    status: TrajectoryStatus::TimeReached,
                    end_time: t_end,
                });
            }
            if events >= event_cap {
                return Ok(RunEnd {
                    status: TrajectoryStatus::Censored,
                    end_time: t + tau,
                });
            }
            t += tau;
            let target = rng.gen::<f64>() * a0;
            let mut acc = 0.0;
            let mut chosen = None;
            for (j, &v) in a.iter().enumerate() {
                if v > 0.0 {
                    chosen = Some(j);
                    acc += v;
                    if target < acc {
                        break;
                    }
                }
            }
            let j = chosen.expect("a0 > 0");
            for (xi, d) in x.iter_mut().zip(&self.columns[j]) {
                *xi += d;
            }
            if x.iter().any(|&v| v < 0) {
                for (xi, d) in x.iter_mut().zip(&self.columns[j]) {
                    *xi -= d;
                }
                return Err(SimulationError::LeavesOrthant { state: x, reaction: j });
            }
            events += 1;
            on_jump(t, &x, j);
        }
    }
}

/// Gillespie direct method from `x0` until `t_end`, absorption, or
/// `event_cap` events.
pub fn simulate(
    net: &ReactionNetwork,
    x0: &[i64],
    t_end: f64,
    seed: u64,
    event_cap: u64,
) -> Result<Trajectory, SimulationError> {
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(SimulationError::InvalidArgument(format!(
            "t_end must be finite and >= 0, got {t_end}"
        )));
    }
    if event_cap == 0 {
        return Err(SimulationError::InvalidArgument("event cap must be >= 1".to_string()));
    }
    let engine = Engine::new(net);
    engine.check_state(x0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut times = vec![0.0];
    let mut states = x0.to_vec();
    let mut fired = Vec::new();
    let mut event_counts = vec![0u64; net.n_reactions()];
    let end = engine.run(x0, t_end, event_cap, &mut rng, |t, x, j| {
        times.push(t);
        states.extend_from_slice(x);
        fired.push(j);
        event_counts[j] += 1;
    })?;
    Ok(Trajectory {
        n_species: net.n_species(),
        times,
        states,
        fired,
        event_counts,
        status: end.status,
        end_time: end.end_time,
    })
}
