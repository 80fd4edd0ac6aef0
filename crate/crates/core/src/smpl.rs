//! Semi-autonomous switching max-plus linear systems and their simulation.
//!
//! The state update is `x(k) = A^(l(k)) ⊗ x(k-1)` with the mode `l(k)` drawn
//! from a finite set; there are no additive inputs. State coordinates are
//! event times (daters), so trajectories are monotone in the initial state
//! and homogeneous under uniform time shifts.

use std::io::Write;

use crate::error::{Error, Result};
use crate::matrix::{MpMatrix, MpVector};

/// A semi-autonomous SMPL system: `n_L` square mode matrices of a common size.
///
/// Every row of every mode must contain a finite entry, so finite states map
/// to finite states; violations are rejected at construction time.
#[derive(Debug, Clone)]
pub struct SmplSystem {
    dim: usize,
    modes: Vec<MpMatrix>,
}

/// A simulated trajectory: states `x(0) ... x(K)` and the 1-based mode
/// sequence `l(1) ... l(K)` that produced them.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<MpVector>,
    pub switching: Vec<usize>,
}

/// Trajectory statistics backing the empirical stability notions: projective
/// norms per step (buffer spread), first-difference extremes (cycle-to-cycle
/// delays), per-coordinate growth rates, and lagged second differences.
#[derive(Debug, Clone)]
pub struct EmpiricalMetrics {
    pub proj_norm_trace: Vec<f64>,
    pub delta_min: f64,
    pub delta_max: f64,
    /// `x_i(K) / K` per coordinate.
    pub growth_rate_estimates: Vec<f64>,
    /// `x(k+c) - 2 x(k) + x(k-c)` per step `k = c ..= K-c`, per coordinate;
    /// empty when the trajectory is too short for the requested lag.
    pub second_difference_trace: Vec<Vec<f64>>,
    pub lag: usize,
}

impl SmplSystem {
    pub fn new(modes: Vec<MpMatrix>) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::EmptyFamily);
        }
        let dim = modes[0].rows();
        for (idx, a) in modes.iter().enumerate() {
            a.require_square()?;
            if a.rows() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "mode {} is {}x{}, expected {dim}x{dim}",
                    idx + 1,
                    a.rows(),
                    a.cols()
                )));
            }
            for i in 0..dim {
                if (0..dim).all(|j| a.get(i, j).is_epsilon()) {
                    return Err(Error::RowAllEpsilon { mode: idx + 1, row: i });
                }
            }
        }
        Ok(SmplSystem { dim, modes })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    /// Mode matrix for a 1-based mode index.
    pub fn mode(&self, l: usize) -> Result<&MpMatrix> {
        if l == 0 || l > self.modes.len() {
            return Err(Error::InvalidMode { mode: l, n_modes: self.modes.len() });
        }
        Ok(&self.modes[l - 1])
    }

    pub fn modes(&self) -> &[MpMatrix] {
        &self.modes
    }

    /// The max-plus sum of all mode matrices, the standard candidate
    /// generating matrix for a common invariant slice space.
    pub fn mode_sum(&self) -> MpMatrix {
        let mut acc = self.modes[0].clone();
        for a in &self.modes[1..] {
            acc = acc.oplus(a).expect("modes share dimensions");
        }
        acc
    }

    /// One event step under mode `l` (1-based).
    pub fn step(&self, x: &MpVector, l: usize) -> Result<MpVector> {
        if !x.is_finite() {
            return Err(Error::EpsilonEntry("states are finite event-time vectors".into()));
        }
        let next = self.mode(l)?.otimes_vec(x)?;
        if !next.is_finite() {
            // Unreachable for systems accepted by `new`, kept as a guard.
            return Err(Error::Argument(format!("mode {l} produced a non-finite state")));
        }
        Ok(next)
    }

    /// Iterates the recurrence along a switching sequence.
    pub fn simulate(&self, x0: &MpVector, switching: &[usize]) -> Result<Trajectory> {
        let mut states = Vec::with_capacity(switching.len() + 1);
        states.push(x0.clone());
        let mut x = x0.clone();
        for &l in switching {
            x = self.step(&x, l)?;
            states.push(x.clone());
        }
        Ok(Trajectory { states, switching: switching.to_vec() })
    }
}

/// Simulates many independent runs. With the `parallel` feature the runs are
/// fanned out with rayon; each run is self-contained, so the result is the
/// same ordered vector either way.
#[cfg(feature = "parallel")]
pub fn simulate_batch(
    sys: &SmplSystem,
    runs: &[(MpVector, Vec<usize>)],
) -> Result<Vec<Trajectory>> {
    use rayon::prelude::*;
    runs.par_iter().map(|(x0, switching)| sys.simulate(x0, switching)).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn simulate_batch(
    sys: &SmplSystem,
    runs: &[(MpVector, Vec<usize>)],
) -> Result<Vec<Trajectory>> {
    simulate_batch_seq(sys, runs)
}

/// Sequential reference implementation of [`simulate_batch`]; also the
/// baseline side of the benchmark suite.
pub fn simulate_batch_seq(
    sys: &SmplSystem,
    runs: &[(MpVector, Vec<usize>)],
) -> Result<Vec<Trajectory>> {
    runs.iter().map(|(x0, switching)| sys.simulate(x0, switching)).collect()
}

impl Trajectory {
    /// Number of event steps `K` (states minus one).
    pub fn steps(&self) -> usize {
        self.switching.len()
    }

    /// Recomputes the recurrence from the stored initial state and switching
    /// sequence and compares; `true` when every state reproduces exactly.
    pub fn verify(&self, sys: &SmplSystem) -> Result<bool> {
        let replay = sys.simulate(&self.states[0], &self.switching)?;
        Ok(replay.states == self.states)
    }

    /// Writes the trace as CSV: `k,l,x_1,...,x_n,proj_norm`, one row per
    /// event step; `l` is 0 on the initial row. Epsilon renders as `-inf`
    /// (never in state columns for systems accepted by `SmplSystem::new`).
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let n = self.states.first().map_or(0, MpVector::len);
        let header: Vec<String> = std::iter::once("k".to_string())
            .chain(std::iter::once("l".to_string()))
            .chain((1..=n).map(|i| format!("x_{i}")))
            .chain(std::iter::once("proj_norm".to_string()))
            .collect();
        writeln!(w, "{}", header.join(","))?;
        for (k, x) in self.states.iter().enumerate() {
            let l = if k == 0 { 0 } else { self.switching[k - 1] };
            let mut row = vec![k.to_string(), l.to_string()];
            row.extend(x.iter().map(|e| e.to_string()));
            let pn = x.projective_norm().map(|p| p.to_string()).unwrap_or_else(|_| "-inf".into());
            row.push(pn);
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Computes [`EmpiricalMetrics`] for a trajectory of at least two states.
/// Second differences need `2*lag + 1` states and are left empty otherwise.
pub fn metrics(traj: &Trajectory, lag: usize) -> Result<EmpiricalMetrics> {
    if lag == 0 {
        return Err(Error::Argument("second-difference lag must be at least 1".into()));
    }
    if traj.states.len() < 2 {
        return Err(Error::TrajectoryTooShort { need: 2, got: traj.states.len() });
    }
    let finite: Vec<Vec<f64>> = traj
        .states
        .iter()
        .map(|x| {
            x.as_finite().ok_or_else(|| {
                Error::EpsilonEntry("metrics are defined for finite trajectories".into())
            })
        })
        .collect::<Result<_>>()?;

    let proj_norm_trace =
        traj.states.iter().map(MpVector::projective_norm).collect::<Result<Vec<_>>>()?;

    let mut delta_min = f64::INFINITY;
    let mut delta_max = f64::NEG_INFINITY;
    for k in 1..finite.len() {
        for i in 0..finite[k].len() {
            let d = finite[k][i] - finite[k - 1][i];
            delta_min = delta_min.min(d);
            delta_max = delta_max.max(d);
        }
    }

    let big_k = finite.len() - 1;
    let growth_rate_estimates =
        finite[big_k].iter().map(|&xi| xi / big_k as f64).collect::<Vec<_>>();

    let mut second_difference_trace = Vec::new();
    if finite.len() >= 2 * lag + 1 {
        for k in lag..finite.len() - lag {
            let row: Vec<f64> = (0..finite[k].len())
                .map(|i| finite[k + lag][i] - 2.0 * finite[k][i] + finite[k - lag][i])
                .collect();
            second_difference_trace.push(row);
        }
    }

    Ok(EmpiricalMetrics {
        proj_norm_trace,
        delta_min,
        delta_max,
        growth_rate_estimates,
        second_difference_trace,
        lag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const NEG_INF: f64 = f64::NEG_INFINITY;

    fn m(rows: &[&[f64]]) -> MpMatrix {
        MpMatrix::from_extended_rows(rows).unwrap()
    }

    fn v(entries: &[f64]) -> MpVector {
        MpVector::from_extended(entries).unwrap()
    }

    pub(crate) fn example_system() -> SmplSystem {
        SmplSystem::new(vec![
            m(&[&[4.0, NEG_INF], &[1.0, 1.0]]),
            m(&[&[3.0, 3.0], &[NEG_INF, 6.0]]),
        ])
        .unwrap()
    }

    #[test]
    fn step_applies_the_selected_mode() {
        let sys = example_system();
        let x0 = v(&[0.0, 0.0]);
        assert_eq!(sys.step(&x0, 1).unwrap(), v(&[4.0, 1.0]));
        assert_eq!(sys.step(&x0, 2).unwrap(), v(&[3.0, 6.0]));
        assert!(matches!(sys.step(&x0, 3), Err(Error::InvalidMode { mode: 3, .. })));

        let id_sys = SmplSystem::new(vec![MpMatrix::identity(2)]).unwrap();
        assert_eq!(id_sys.step(&v(&[5.0, -2.0]), 1).unwrap(), v(&[5.0, -2.0]));
    }

    #[test]
    fn row_finiteness_is_checked_at_load() {
        let bad = SmplSystem::new(vec![m(&[&[NEG_INF, NEG_INF], &[1.0, 1.0]])]);
        assert!(matches!(bad, Err(Error::RowAllEpsilon { mode: 1, row: 0 })));
    }

    #[test]
    fn simulate_iterates_the_recurrence() {
        let sys = example_system();
        let traj = sys.simulate(&v(&[0.0, 0.0]), &[1, 1]).unwrap();
        assert_eq!(traj.states, vec![v(&[0.0, 0.0]), v(&[4.0, 1.0]), v(&[8.0, 5.0])]);
        assert!(traj.verify(&sys).unwrap());

        let empty = sys.simulate(&v(&[0.0, 0.0]), &[]).unwrap();
        assert_eq!(empty.states, vec![v(&[0.0, 0.0])]);

        let two = sys.simulate(&v(&[0.0, 0.0]), &[2]).unwrap();
        assert_eq!(two.states, vec![v(&[0.0, 0.0]), v(&[3.0, 6.0])]);
    }

    #[test]
    fn metrics_hand_computed_example() {
        let sys = example_system();
        let traj = sys.simulate(&v(&[0.0, 0.0]), &[1, 1]).unwrap();
        let stats = metrics(&traj, 1).unwrap();
        assert_eq!(stats.proj_norm_trace, vec![0.0, 3.0, 3.0]);
        assert_eq!(stats.delta_min, 1.0);
        assert_eq!(stats.delta_max, 4.0);
        assert_eq!(stats.growth_rate_estimates, vec![4.0, 2.5]);
        assert_eq!(stats.second_difference_trace, vec![vec![0.0, 3.0]]);
    }

    #[test]
    fn metrics_on_linear_growth_are_flat() {
        let states: Vec<MpVector> = (0..6).map(|k| v(&[2.0 * k as f64, 2.0 * k as f64])).collect();
        let traj = Trajectory { states, switching: vec![1; 5] };
        let stats = metrics(&traj, 1).unwrap();
        assert!(stats.proj_norm_trace.iter().all(|&p| p == 0.0));
        assert_eq!((stats.delta_min, stats.delta_max), (2.0, 2.0));
        assert!(stats.second_difference_trace.iter().flatten().all(|&d| d == 0.0));
    }

    #[test]
    fn short_trajectories_reject_second_differences_only() {
        let sys = example_system();
        let one_step = sys.simulate(&v(&[0.0, 0.0]), &[1]).unwrap();
        let stats = metrics(&one_step, 1).unwrap();
        assert_eq!((stats.delta_min, stats.delta_max), (1.0, 4.0));
        assert!(stats.second_difference_trace.is_empty());

        let no_step = sys.simulate(&v(&[0.0, 0.0]), &[]).unwrap();
        assert!(matches!(metrics(&no_step, 1), Err(Error::TrajectoryTooShort { .. })));
    }

    #[test]
    fn csv_trace_has_fixed_column_count() {
        let sys = example_system();
        let traj = sys.simulate(&v(&[0.0, 0.0]), &[1, 2]).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "k,l,x_1,x_2,proj_norm");
        assert_eq!(lines.len(), 4);
        assert!(lines.iter().all(|l| l.split(',').count() == 5));
        assert_eq!(lines[1], "0,0,0,0,0");
        assert_eq!(lines[2], "1,1,4,1,3");
        assert!(!text.contains("-inf"));
    }

    #[test]
    fn batch_matches_sequential_reference() {
        let sys = example_system();
        let runs: Vec<(MpVector, Vec<usize>)> = (0..16)
            .map(|i| {
                (v(&[i as f64, 0.0]), crate::switching::random_switching(2, 64, i as u64))
            })
            .collect();
        let par = simulate_batch(&sys, &runs).unwrap();
        let seq = simulate_batch_seq(&sys, &runs).unwrap();
        assert_eq!(par.len(), seq.len());
        for (a, b) in par.iter().zip(&seq) {
            assert_eq!(a.states, b.states);
        }
    }
}
