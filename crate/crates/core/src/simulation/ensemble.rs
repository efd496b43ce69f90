use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ssa::{Engine, TrajectoryStatus};
use super::SimulationError;
use crate::network::ReactionNetwork;

/// Empirical `E ||X(t)||_1^r` at one grid time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentRow {
    pub t: f64,
    pub r: u32,
    /// Over trajectories still known at `t`; `None` if there are none.
    pub mean: Option<f64>,
    /// `None` with fewer than two trajectories known at `t`.
    pub stderr: Option<f64>,
    pub n_effective: usize,
    pub censored_frac: f64,
    /// Set whenever some trajectory was censored by `t`.
    pub biased_low: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub grid: Vec<f64>,
    pub orders: Vec<u32>,
    pub n_traj: usize,
    pub master_seed: u64,
    pub event_cap: u64,
    pub norm: String,
    /// Grid-major: all orders for `grid[0]`, then `grid[1]`, ...
    pub rows: Vec<MomentRow>,
    pub status_counts: StatusCounts,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatusCounts {
    pub absorbed: usize,
    pub time_reached: usize,
    pub censored: usize,
}

impl EnsembleStats {
    pub fn row(&self, grid_index: usize, r: u32) -> Option<&MomentRow> {
        let k = self.orders.iter().position(|&o| o == r)?;
        self.rows.get(grid_index * self.orders.len() + k)
    }

    /// Rows for order `r` in grid order.
    pub fn series(&self, r: u32) -> Vec<&MomentRow> {
        (0..self.grid.len()).filter_map(|i| self.row(i, r)).collect()
    }

    pub fn censored_fractions(&self) -> Vec<f64> {
        let m = self.orders.len().max(1);
        self.rows.iter().step_by(m).map(|row| row.censored_frac).collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "r", "mean", "stderr", "n_effective", "censored_frac"])?;
        let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
        for row in &self.rows {
            w.write_record([
                row.t.to_string(),
                row.r.to_string(),
                opt(row.mean),
                opt(row.stderr),
                row.n_effective.to_string(),
                row.censored_frac.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("ascii")
    }
}

struct PathSample {
    /// `||X(t_k)||_1` at each grid time, `None` once censored.
    norms: Vec<Option<f64>>,
    status: TrajectoryStatus,
}

fn sample_on_grid(
    engine: &Engine,
    x0: &[i64],
    grid: &[f64],
    event_cap: u64,
    rng: &mut ChaCha8Rng,
) -> Result<PathSample, SimulationError> {
    let t_end = grid.last().copied().unwrap_or(0.0);
    let mut norms = vec![None; grid.len()];
    let mut k = 0;
    let mut current = x0.iter().sum::<i64>() as f64;
    let end = engine.run(x0, t_end, event_cap, rng, |t, x, _| {
        while k < grid.len() && grid[k] < t {
            norms[k] = Some(current);
            k += 1;
        }
        current = x.iter().sum::<i64>() as f64;
    })?;
    let censored = end.status == TrajectoryStatus::Censored;
    while k < grid.len() && (!censored || grid[k] < end.end_time) {
        norms[k] = Some(current);
        k += 1;
    }
    Ok(PathSample {
        norms,
        status: end.status,
    })
}

fn trajectory_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Runs `n_traj` independent trajectories and summarizes `||X(t)||_1^r` on
/// the grid. Trajectory `i` uses stream `i` of a generator keyed by
/// `master_seed`, and reductions run in index order, so results do not
/// depend on thread scheduling.
pub fn estimate_moments(
    net: &ReactionNetwork,
    x0: &[i64],
    grid: &[f64],
    orders: &[u32],
    n_traj: usize,
    master_seed: u64,
    event_cap: u64,
) -> Result<EnsembleStats, SimulationError> {
    if n_traj < 2 {
        return Err(SimulationError::InvalidArgument(format!(
            "need at least 2 trajectories, got {n_traj}"
        )));
    }
    if event_cap == 0 {
        return Err(SimulationError::InvalidArgument("event cap must be >= 1".to_string()));
    }
    if grid.is_empty() || grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SimulationError::InvalidArgument(
            "grid must be a nonempty strictly increasing list of finite times >= 0".to_string(),
        ));
    }
    if orders.is_empty() {
        return Err(SimulationError::InvalidArgument(
            "no moment orders requested".to_string(),
        ));
    }
    let engine = Engine::new(net);
    engine.check_state(x0)?;
    let samples: Vec<PathSample> = (0..n_traj as u64)
        .into_par_iter()
        .map(|i| sample_on_grid(&engine, x0, grid, event_cap, &mut trajectory_rng(master_seed, i)))
        .collect::<Result<_, _>>()?;

    let mut status_counts = StatusCounts::default();
    for s in &samples {
        match s.status {
            TrajectoryStatus::Absorbed => status_counts.absorbed += 1,
            TrajectoryStatus::TimeReached => status_counts.time_reached += 1,
            TrajectoryStatus::Censored => status_counts.censored += 1,
        }
    }
    let mut rows = Vec::with_capacity(grid.len() * orders.len());
    for (k, &t) in grid.iter().enumerate() {
        let known: Vec<f64> = samples.iter().filter_map(|s| s.norms[k]).collect();
        let n_eff = known.len();
        let censored_frac = (n_traj - n_eff) as f64 / n_traj as f64;
        for &r in orders {
            let values: Vec<f64> = known.iter().map(|v| v.powi(r as i32)).collect();
            let (mean, stderr) = mean_and_stderr(&values);
            rows.push(MomentRow {
                t,
                r,
                mean,
                stderr,
                n_effective: n_eff,
                censored_frac,
                biased_low: n_eff < n_traj,
            });
        }
    }
    Ok(EnsembleStats {
        grid: grid.to_vec(),
        orders: orders.to_vec(),
        n_traj,
        master_seed,
        event_cap,
        norm: "l1".to_string(),
        rows,
        status_counts,
    })
}

fn mean_and_stderr(values: &[f64]) -> (Option<f64>, Option<f64>) {
    let n = values.len();
    if n == 0 {
        return (None, None);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (Some(mean), None);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (Some(mean), Some((ss / (n - 1) as f64 / n as f64).sqrt()))
}

/// Least-squares slope of `ln(1 + m)` against `t`.
pub fn log_slope(ts: &[f64], means: &[f64]) -> Option<f64> {
    if ts.len() != means.len() || ts.len() < 2 {
        return None;
    }
    let ys: Vec<f64> = means.iter().map(|m| m.ln_1p()).collect();
    let n = ts.len() as f64;
    let tbar = ts.iter().sum::<f64>() / n;
    let ybar = ys.iter().sum::<f64>() / n;
    let sxx: f64 = ts.iter().map(|t| (t - tbar).powi(2)).sum();
    let sxy: f64 = ts.iter().zip(&ys).map(|(t, y)| (t - tbar) * (y - ybar)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Slopes of `ln(1 + m)` fitted separately on the first and second half of
/// the grid (the middle point is shared when the length is odd).
pub fn slope_halves(ts: &[f64], means: &[f64]) -> Option<(f64, f64)> {
    let n = ts.len();
    if n < 4 || means.len() != n {
        return None;
    }
    let mid = n / 2;
    let first = log_slope(&ts[..mid + n % 2], &means[..mid + n % 2])?;
    let second = log_slope(&ts[mid..], &means[mid..])?;
    Some((first, second))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::rational::rat;

    #[test]
    fn conservation_gives_exact_mean() {
        let net = catalog::conversion_pair(rat(1), rat(1));
        let grid = [0.0, 0.5, 1.0, 2.0];
        let stats = estimate_moments(&net, &[3, 2], &grid, &[1], 200, 9, 1_000_000).unwrap();
        for row in &stats.rows {
            assert_eq!(row.mean, Some(5.0));
            assert_eq!(row.stderr, Some(0.0));
            assert_eq!(row.censored_frac, 0.0);
        }
    }

    #[test]
    fn deterministic_statistics() {
        let net = catalog::example4();
        let grid = [0.5, 1.0];
        let a = estimate_moments(&net, &[10, 10], &grid, &[1, 2], 64, 5, 100_000).unwrap();
        let b = estimate_moments(&net, &[10, 10], &grid, &[1, 2], 64, 5, 100_000).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_csv_string(), b.to_csv_string());
    }

    #[test]
    fn csv_columns() {
        let net = catalog::conversion_pair(rat(1), rat(1));
        let stats = estimate_moments(&net, &[3, 2], &[1.0], &[1, 2], 10, 1, 1000).unwrap();
        let csv = stats.to_csv_string();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("t,r,mean,stderr,n_effective,censored_frac"));
        assert_eq!(lines.next(), Some("1,1,5,0,10,0"));
        assert_eq!(lines.next(), Some("1,2,25,0,10,0"));
    }

    #[test]
    fn censoring_is_reported() {
        let net = catalog::example5();
        let stats = estimate_moments(&net, &[10, 10], &[0.0, 0.01, 2.0], &[1], 20, 3, 2000).unwrap();
        let cf = stats.censored_fractions();
        assert_eq!(cf[0], 0.0);
        assert_eq!(cf[2], 1.0);
        assert!(stats.rows[2].mean.is_none());
        assert!(stats.rows[2].biased_low);
    }

    #[test]
    fn rejects_small_ensembles() {
        let net = catalog::example4();
        assert!(estimate_moments(&net, &[1, 1], &[1.0], &[1], 1, 0, 10).is_err());
        assert!(estimate_moments(&net, &[1, 1], &[1.0, 0.5], &[1], 4, 0, 10).is_err());
    }

    #[test]
    fn slopes_of_exponential() {
        let ts: Vec<f64> = (0..10).map(|k| k as f64 * 0.1).collect();
        let ms: Vec<f64> = ts.iter().map(|t| (2.0 * t).exp() - 1.0).collect();
        let (a, b) = slope_halves(&ts, &ms).unwrap();
        assert!((a - 2.0).abs() < 1e-9 && (b - 2.0).abs() < 1e-9);
    }
}
