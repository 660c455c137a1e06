//! Quenched walks, the rescaled-walk stopping times `T_k`, exact small-horizon
//! laws, covariance and limiting-covariance estimates, and `T_1` statistics.

use crate::env::Environment;
use crate::error::{Error, Result};
use crate::rng::{stream_rng, WalkRng};
use crate::stats::{batch_means_stderr, kahan_sum, mean_stderr, KahanSum};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};

pub const DEFAULT_MAX_STEPS: usize = 10_000_000;

/// One nearest-neighbour move `±e_axis`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Step {
    pub axis: u8,
    pub positive: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StopOutcome {
    /// The stop rule fired.
    Stopped,
    /// `max_steps` was reached first.
    Timeout,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub start: Vec<i64>,
    pub steps: Vec<Step>,
    pub outcome: StopOutcome,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn positions(&self) -> Vec<Vec<i64>> {
        let mut out = Vec::with_capacity(self.steps.len() + 1);
        let mut x = self.start.clone();
        out.push(x.clone());
        for s in &self.steps {
            x[s.axis as usize] += if s.positive { 1 } else { -1 };
            out.push(x.clone());
        }
        out
    }

    pub fn end(&self) -> Vec<i64> {
        let mut x = self.start.clone();
        for s in &self.steps {
            x[s.axis as usize] += if s.positive { 1 } else { -1 };
        }
        x
    }

    /// `α(n)`, the coordinate changed by step `n` (1-based in the usual
    /// notation, stored 0-based here).
    pub fn alphas(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.axis as usize).collect()
    }
}

/// When a walk stops.
#[derive(Debug, Clone, Copy)]
pub enum StopRule<'a> {
    /// After exactly this many steps.
    Steps(usize),
    /// On the first visit to a site whose entry in the mask (indexed by the
    /// environment box) is `false`. The start site is not tested.
    ExitMask(&'a [bool]),
}

/// Samples a direction from a site's axis weights with `u ∈ [0, 1)`.
#[inline]
pub fn sample_step(weights: &[f64], u: f64) -> Step {
    let mut acc = 0.0;
    let mut last = None;
    for (axis, &p) in weights.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        acc += p;
        if u < acc {
            return Step { axis: axis as u8, positive: true };
        }
        acc += p;
        last = Some(axis);
        if u < acc {
            return Step { axis: axis as u8, positive: false };
        }
    }
    // rounding: u landed in the last ulp of mass
    Step {
        axis: last.expect("site with no positive weight") as u8,
        positive: false,
    }
}

fn escape(env: &Environment, idx: usize, step: Step) -> Error {
    let mut site = env.bounds().coords(idx);
    site[step.axis as usize] += if step.positive { 1 } else { -1 };
    Error::BoxEscape { site }
}

pub fn run_walk(
    env: &Environment,
    start: &[i64],
    rule: StopRule<'_>,
    seed: u64,
    max_steps: usize,
) -> Result<Trajectory> {
    let mut rng = stream_rng(seed, 0);
    run_walk_with(env, start, rule, &mut rng, max_steps)
}

pub fn run_walk_with(
    env: &Environment,
    start: &[i64],
    rule: StopRule<'_>,
    rng: &mut WalkRng,
    max_steps: usize,
) -> Result<Trajectory> {
    let b = env.bounds();
    let mut idx = b.index(start).ok_or_else(|| Error::BoxEscape { site: start.to_vec() })?;
    let mut steps = Vec::new();
    let limit = match rule {
        StopRule::Steps(n) => n.min(max_steps),
        StopRule::ExitMask(_) => max_steps,
    };
    if let StopRule::ExitMask(mask) = rule {
        if mask.len() != b.len() {
            return Err(Error::Argument("exit mask does not match the environment box".into()));
        }
    }
    let mut stopped = matches!(rule, StopRule::Steps(0));
    while steps.len() < limit {
        let step = sample_step(env.weights(idx), rng.gen::<f64>());
        idx = b
            .neighbor(idx, step.axis as usize, step.positive)
            .ok_or_else(|| escape(env, idx, step))?;
        steps.push(step);
        match rule {
            StopRule::Steps(n) if steps.len() == n => stopped = true,
            StopRule::ExitMask(mask) if !mask[idx] => stopped = true,
            _ => {}
        }
        if stopped {
            break;
        }
    }
    Ok(Trajectory {
        start: start.to_vec(),
        steps,
        outcome: if stopped { StopOutcome::Stopped } else { StopOutcome::Timeout },
    })
}

/// Stopping times of the rescaled walk.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RescaledTimes {
    /// `T_0 = 0 < T_1 < ...`, all within the trajectory.
    pub times: Vec<usize>,
    /// False when steps after the last `T_k` did not yet cover every axis.
    pub completed: bool,
}

pub fn rescaled_times(traj: &Trajectory, d: usize) -> RescaledTimes {
    let full: u64 = if d >= 64 { u64::MAX } else { (1u64 << d) - 1 };
    let mut times = vec![0];
    let mut seen = 0u64;
    for (t, s) in traj.steps.iter().enumerate() {
        seen |= 1 << s.axis;
        if seen == full {
            times.push(t + 1);
            seen = 0;
        }
    }
    let completed = *times.last().unwrap() == traj.steps.len();
    RescaledTimes { times, completed }
}

/// Exact law of `X_n` under `P_ω^start`, keyed by box index.
pub fn exact_distribution_indexed(env: &Environment, start: &[i64], n: usize) -> Result<HashMap<usize, f64>> {
    let b = env.bounds();
    let s = b.index(start).ok_or_else(|| Error::BoxEscape { site: start.to_vec() })?;
    let mut cur: HashMap<usize, f64> = HashMap::from([(s, 1.0)]);
    for _ in 0..n {
        let mut next: HashMap<usize, f64> = HashMap::with_capacity(cur.len() * 2);
        for (&idx, &mass) in &cur {
            for (axis, &p) in env.weights(idx).iter().enumerate() {
                if p <= 0.0 {
                    continue;
                }
                for positive in [true, false] {
                    let j = b
                        .neighbor(idx, axis, positive)
                        .ok_or_else(|| escape(env, idx, Step { axis: axis as u8, positive }))?;
                    *next.entry(j).or_insert(0.0) += mass * p;
                }
            }
        }
        cur = next;
    }
    Ok(cur)
}

/// Exact law of `X_n` by dynamic programming over one-step kernels.
pub fn exact_walk_distribution(env: &Environment, start: &[i64], n: usize) -> Result<BTreeMap<Vec<i64>, f64>> {
    let b = env.bounds();
    Ok(exact_distribution_indexed(env, start, n)?
        .into_iter()
        .map(|(i, p)| (b.coords(i), p))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CovarianceMethod {
    Exact,
    MonteCarlo { samples: usize, seed: u64 },
}

/// `Q̂(x, n)_{ij} = E[(X_n(i) - x_i)(X_n(j) - x_j)] / n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CovarianceEstimate {
    pub matrix: Vec<Vec<f64>>,
    /// Per-entry standard errors (Monte Carlo only).
    pub stderr: Option<Vec<Vec<f64>>>,
    pub horizon: usize,
    pub method: CovarianceMethod,
}

impl CovarianceEstimate {
    pub fn trace(&self) -> f64 {
        (0..self.matrix.len()).map(|i| self.matrix[i][i]).sum()
    }
}

pub fn covariance_estimate(
    env: &Environment,
    x: &[i64],
    n: usize,
    method: CovarianceMethod,
) -> Result<CovarianceEstimate> {
    if n == 0 {
        return Err(Error::Argument("covariance horizon must be positive".into()));
    }
    let d = env.dim();
    let b = env.bounds();
    match method {
        CovarianceMethod::Exact => {
            let dist = exact_distribution_indexed(env, x, n)?;
            let mut entries: Vec<(Vec<i64>, f64)> = dist.into_iter().map(|(i, p)| (b.coords(i), p)).collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            let mut matrix = vec![vec![0.0; d]; d];
            for i in 0..d {
                for j in 0..d {
                    matrix[i][j] = kahan_sum(
                        entries
                            .iter()
                            .map(|(y, p)| p * ((y[i] - x[i]) * (y[j] - x[j])) as f64),
                    ) / n as f64;
                }
            }
            Ok(CovarianceEstimate {
                matrix,
                stderr: None,
                horizon: n,
                method,
            })
        }
        CovarianceMethod::MonteCarlo { samples, seed } => {
            if samples < 2 {
                return Err(Error::SampleSize("Monte Carlo covariance needs at least 2 samples".into()));
            }
            let ends: Vec<Vec<i64>> = (0..samples)
                .into_par_iter()
                .map(|k| {
                    let mut rng = stream_rng(seed, k as u64);
                    run_walk_with(env, x, StopRule::Steps(n), &mut rng, n).map(|t| t.end())
                })
                .collect::<Result<_>>()?;
            let mut matrix = vec![vec![0.0; d]; d];
            let mut stderr = vec![vec![0.0; d]; d];
            for i in 0..d {
                for j in 0..d {
                    let vals: Vec<f64> = ends
                        .iter()
                        .map(|y| ((y[i] - x[i]) * (y[j] - x[j])) as f64 / n as f64)
                        .collect();
                    let (m, se) = mean_stderr(&vals);
                    matrix[i][j] = m;
                    stderr[i][j] = se;
                }
            }
            Ok(CovarianceEstimate {
                matrix,
                stderr: Some(stderr),
                horizon: n,
                method,
            })
        }
    }
}

/// Time-average estimate of the diagonal limiting covariance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaEstimate {
    pub diag: Vec<f64>,
    pub stderr: Vec<f64>,
    pub run_length: usize,
    pub burn_in: usize,
    /// True when the walk ran on the box with periodic wrap-around.
    pub wrap: bool,
}

const SIGMA_BATCHES: usize = 20;

/// `Σ̂_ii = 2 · mean of ω(X_k, e_i)` over `k ∈ (burn_in, run_length]`, i.e.
/// the environment seen from the particle sampled along one long walk.
pub fn estimate_sigma(
    env: &Environment,
    start: &[i64],
    run_length: usize,
    burn_in: usize,
    seed: u64,
    wrap: bool,
) -> Result<SigmaEstimate> {
    if run_length <= burn_in {
        return Err(Error::Argument(format!(
            "run_length ({run_length}) must exceed burn_in ({burn_in})"
        )));
    }
    let d = env.dim();
    let b = env.bounds();
    let mut idx = b.index(start).ok_or_else(|| Error::BoxEscape { site: start.to_vec() })?;
    let mut rng = stream_rng(seed, 0);
    let kept = run_length - burn_in;
    let mut series: Vec<Vec<f64>> = vec![Vec::with_capacity(kept); d];
    for k in 1..=run_length {
        let step = sample_step(env.weights(idx), rng.gen::<f64>());
        idx = if wrap {
            b.neighbor_wrapped(idx, step.axis as usize, step.positive)
        } else {
            b.neighbor(idx, step.axis as usize, step.positive)
                .ok_or_else(|| escape(env, idx, step))?
        };
        if k > burn_in {
            for (i, s) in series.iter_mut().enumerate() {
                s.push(2.0 * env.weight(idx, i));
            }
        }
    }
    let diag = series.iter().map(|s| kahan_sum(s.iter().copied()) / kept as f64).collect();
    let stderr = series
        .iter()
        .map(|s| {
            let se = batch_means_stderr(s, SIGMA_BATCHES);
            if se.is_nan() {
                0.0
            } else {
                se
            }
        })
        .collect();
    Ok(SigmaEstimate {
        diag,
        stderr,
        run_length,
        burn_in,
        wrap,
    })
}

/// First rescaled time from `start`; `None` when censored at `horizon`.
pub fn sample_t1(env: &Environment, start_idx: usize, horizon: usize, rng: &mut WalkRng) -> Result<Option<usize>> {
    let d = env.dim();
    let full: u64 = (1u64 << d) - 1;
    let b = env.bounds();
    let mut idx = start_idx;
    let mut seen = 0u64;
    for t in 1..=horizon {
        let step = sample_step(env.weights(idx), rng.gen::<f64>());
        idx = b
            .neighbor(idx, step.axis as usize, step.positive)
            .ok_or_else(|| escape(env, idx, step))?;
        seen |= 1 << step.axis;
        if seen == full {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailPoint {
    pub n: usize,
    pub p_hat: f64,
    pub stderr: f64,
    pub censored_frac: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SiteT1 {
    pub site: Vec<i64>,
    pub samples: usize,
    pub censored: usize,
    /// Mean of the uncensored samples (`NaN` if all were censored).
    pub mean_uncensored: f64,
    /// Every sample hit the horizon: `T_1 = ∞` is plausible here.
    pub infinite_t1_suspect: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct T1Statistics {
    /// Pooled `P̂(T_1 > n)` for `n = 0..=horizon`.
    pub tail: Vec<TailPoint>,
    pub sites: Vec<SiteT1>,
    pub horizon: usize,
    /// Exponent used for `lp_average`.
    pub p: f64,
    /// Average over non-suspect sites of `Ê[T_1]^p`.
    pub lp_average: f64,
    pub total_samples: usize,
    pub total_censored: usize,
}

impl T1Statistics {
    /// `P̂(T_1 > n)` pooled over sites, censored samples counted as `> n`.
    pub fn tail_at(&self, n: usize) -> f64 {
        self.tail.get(n).map_or(self.total_censored as f64 / self.total_samples as f64, |t| t.p_hat)
    }

    pub fn any_infinite_suspect(&self) -> bool {
        self.sites.iter().any(|s| s.infinite_t1_suspect)
    }
}

const T1_BLOCK: usize = 1024;

/// Samples of `T_1` (censored as `None`) from one site, in a fixed order.
pub fn t1_samples(env: &Environment, site: &[i64], samples: usize, seed: u64, horizon: usize) -> Result<Vec<Option<usize>>> {
    let idx = env
        .bounds()
        .index(site)
        .ok_or_else(|| Error::BoxEscape { site: site.to_vec() })?;
    let blocks = samples.div_ceil(T1_BLOCK);
    let chunks: Vec<Vec<Option<usize>>> = (0..blocks)
        .into_par_iter()
        .map(|blk| {
            let mut rng = stream_rng(seed, blk as u64);
            let count = T1_BLOCK.min(samples - blk * T1_BLOCK);
            (0..count).map(|_| sample_t1(env, idx, horizon, &mut rng)).collect()
        })
        .collect::<Result<_>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

pub fn t1_statistics(
    env: &Environment,
    sites: &[Vec<i64>],
    samples: usize,
    seed: u64,
    horizon: usize,
    p: f64,
) -> Result<T1Statistics> {
    if samples == 0 || sites.is_empty() {
        return Err(Error::SampleSize("t1 statistics need at least one site and one sample".into()));
    }
    let per_site: Vec<Vec<Option<usize>>> = sites
        .iter()
        .enumerate()
        .map(|(k, x)| t1_samples(env, x, samples, crate::rng::derive_seed(seed, k as u64), horizon))
        .collect::<Result<_>>()?;

    // counts[n] = number of samples with T_1 == n (uncensored)
    let mut counts = vec![0usize; horizon + 1];
    let mut total_censored = 0;
    let mut site_stats = Vec::with_capacity(sites.len());
    for (x, s) in sites.iter().zip(&per_site) {
        let finite: Vec<f64> = s.iter().filter_map(|t| t.map(|v| v as f64)).collect();
        let censored = s.len() - finite.len();
        total_censored += censored;
        for t in s.iter().flatten() {
            counts[*t] += 1;
        }
        site_stats.push(SiteT1 {
            site: x.clone(),
            samples: s.len(),
            censored,
            mean_uncensored: if finite.is_empty() {
                f64::NAN
            } else {
                kahan_sum(finite.iter().copied()) / finite.len() as f64
            },
            infinite_t1_suspect: finite.is_empty(),
        });
    }
    let total = samples * sites.len();
    let censored_frac = total_censored as f64 / total as f64;
    let mut tail = Vec::with_capacity(horizon + 1);
    let mut remaining = total;
    for (n, c) in counts.iter().enumerate() {
        remaining -= c;
        let p_hat = remaining as f64 / total as f64;
        tail.push(TailPoint {
            n,
            p_hat,
            stderr: (p_hat * (1.0 - p_hat) / total as f64).sqrt(),
            censored_frac,
        });
    }
    let finite_means: Vec<f64> = site_stats
        .iter()
        .filter(|s| !s.infinite_t1_suspect)
        .map(|s| s.mean_uncensored.powf(p))
        .collect();
    let lp_average = if finite_means.is_empty() {
        f64::INFINITY
    } else {
        finite_means.iter().copied().collect::<KahanSum>().value() / finite_means.len() as f64
    };
    Ok(T1Statistics {
        tail,
        sites: site_stats,
        horizon,
        p,
        lp_average,
        total_samples: total,
        total_censored,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{make_law, sample_environment, LawSpec};
    use crate::lattice::LatticeBox;

    fn srw(d: usize, half: i64) -> Environment {
        Environment::constant(LatticeBox::centered(d, half).unwrap(), &vec![0.5 / d as f64; d], "srw")
    }

    #[test]
    fn two_step_srw_1d_law() {
        let env = srw(1, 4);
        let dist = exact_walk_distribution(&env, &[0], 2).unwrap();
        assert_eq!(dist.len(), 3);
        assert_eq!(dist[&vec![-2]], 0.25);
        assert_eq!(dist[&vec![0]], 0.5);
        assert_eq!(dist[&vec![2]], 0.25);
        let zero = exact_walk_distribution(&env, &[1], 0).unwrap();
        assert_eq!(zero, BTreeMap::from([(vec![1], 1.0)]));
    }

    #[test]
    fn exact_law_detects_escape() {
        let env = srw(1, 1);
        assert!(matches!(exact_walk_distribution(&env, &[0], 2), Err(Error::BoxEscape { .. })));
    }

    #[test]
    fn exact_law_matches_path_enumeration() {
        let law = make_law(&LawSpec::AxisChoice { dim: 2 }).unwrap();
        let env = sample_environment(&law, &LatticeBox::centered(2, 2).unwrap(), 17).unwrap();
        // oracle: enumerate all 4^2 signed-axis sequences and weight them
        let mut oracle: BTreeMap<Vec<i64>, f64> = BTreeMap::new();
        let dirs = [(0, 1), (0, -1), (1, 1), (1, -1)];
        for a in dirs {
            for b in dirs {
                let mut x = vec![0i64, 0];
                let mut p = 1.0;
                for (axis, sign) in [a, b] {
                    p *= env.weights_at(&x).unwrap()[axis];
                    x[axis] += sign;
                }
                if p > 0.0 {
                    *oracle.entry(x).or_insert(0.0) += p;
                }
            }
        }
        let dist = exact_walk_distribution(&env, &[0, 0], 2).unwrap();
        assert_eq!(dist.len(), oracle.len());
        for (k, v) in &oracle {
            assert!((dist[k] - v).abs() < 1e-15);
        }
    }

    #[test]
    fn forced_horizontal_moves() {
        let env = Environment::constant(LatticeBox::centered(2, 30).unwrap(), &[0.5, 0.0], "horizontal");
        let t = run_walk(&env, &[0, 0], StopRule::Steps(20), 5, 100).unwrap();
        assert_eq!(t.len(), 20);
        assert!(t.alphas().iter().all(|&a| a == 0));
        assert_eq!(t.outcome, StopOutcome::Stopped);
    }

    #[test]
    fn walk_is_deterministic_per_seed() {
        let env = srw(2, 50);
        let a = run_walk(&env, &[0, 0], StopRule::Steps(100), 11, 1000).unwrap();
        let b = run_walk(&env, &[0, 0], StopRule::Steps(100), 11, 1000).unwrap();
        assert_eq!(a, b);
        let c = run_walk(&env, &[0, 0], StopRule::Steps(100), 12, 1000).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn exit_mask_and_timeout() {
        let env = srw(1, 10);
        let b = env.bounds();
        let mask: Vec<bool> = (0..b.len()).map(|i| b.coord(i, 0).abs() < 3).collect();
        let t = run_walk(&env, &[0], StopRule::ExitMask(&mask), 3, 10_000).unwrap();
        assert_eq!(t.outcome, StopOutcome::Stopped);
        assert_eq!(t.end()[0].abs(), 3);
        let t = run_walk(&env, &[0], StopRule::ExitMask(&mask), 3, 1).unwrap();
        assert_eq!(t.outcome, StopOutcome::Timeout);
    }

    #[test]
    fn rescaled_times_examples() {
        let mk = |axes: &[u8]| Trajectory {
            start: vec![0, 0],
            steps: axes.iter().map(|&a| Step { axis: a, positive: true }).collect(),
            outcome: StopOutcome::Stopped,
        };
        let r = rescaled_times(&mk(&[0, 0, 1]), 2);
        assert_eq!(r.times, vec![0, 3]);
        assert!(r.completed);
        let r = rescaled_times(&mk(&[0, 1, 1, 1, 0, 0]), 2);
        assert_eq!(r.times, vec![0, 2, 5]);
        assert!(!r.completed);
        let one_d = Trajectory {
            start: vec![0],
            steps: vec![Step { axis: 0, positive: true }; 4],
            outcome: StopOutcome::Stopped,
        };
        assert_eq!(rescaled_times(&one_d, 1).times, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn exact_covariance_of_srw() {
        let env = srw(2, 8);
        let q = covariance_estimate(&env, &[0, 0], 6, CovarianceMethod::Exact).unwrap();
        assert!((q.matrix[0][0] - 0.5).abs() < 1e-14);
        assert!((q.matrix[1][1] - 0.5).abs() < 1e-14);
        assert!(q.matrix[0][1].abs() < 1e-14);
        assert!((q.trace() - 1.0).abs() < 1e-14);

        let h = Environment::constant(LatticeBox::centered(2, 8).unwrap(), &[0.5, 0.0], "horizontal");
        let q = covariance_estimate(&h, &[0, 0], 4, CovarianceMethod::Exact).unwrap();
        assert_eq!(q.matrix, vec![vec![1.0, 0.0], vec![0.0, 0.0]]);
    }

    #[test]
    fn monte_carlo_covariance_is_close() {
        let env = srw(2, 20);
        let q = covariance_estimate(&env, &[0, 0], 10, CovarianceMethod::MonteCarlo { samples: 20_000, seed: 1 }).unwrap();
        let se = q.stderr.as_ref().unwrap();
        for i in 0..2 {
            assert!((q.matrix[i][i] - 0.5).abs() < 4.0 * se[i][i]);
        }
        assert!(q.matrix[0][1].abs() < 4.0 * se[0][1]);
    }

    #[test]
    fn sigma_of_constant_law_is_exact() {
        let env = srw(2, 10);
        let s = estimate_sigma(&env, &[0, 0], 5000, 100, 3, true).unwrap();
        assert_eq!(s.diag, vec![0.5, 0.5]);
        assert!(s.wrap);
        assert!(estimate_sigma(&env, &[0, 0], 10, 10, 3, true).is_err());
        // without wrap a long walk leaves a small box
        assert!(matches!(
            estimate_sigma(&env, &[0, 0], 100_000, 0, 3, false),
            Err(Error::BoxEscape { .. })
        ));
    }

    #[test]
    fn t1_censoring() {
        let h = Environment::constant(LatticeBox::centered(2, 60).unwrap(), &[0.5, 0.0], "horizontal");
        let st = t1_statistics(&h, &[vec![0, 0]], 50, 1, 30, 1.0).unwrap();
        assert!(st.sites[0].infinite_t1_suspect);
        assert_eq!(st.total_censored, 50);
        assert_eq!(st.tail_at(30), 1.0);

        let line = srw(1, 10);
        let st = t1_statistics(&line, &[vec![0]], 100, 1, 5, 2.0).unwrap();
        assert_eq!(st.tail_at(0), 1.0);
        assert!(st.tail[1..].iter().all(|t| t.p_hat == 0.0));
        assert_eq!(st.lp_average, 1.0);
    }

    #[test]
    fn t1_tail_is_nonincreasing() {
        let env = srw(2, 40);
        let st = t1_statistics(&env, &[vec![0, 0], vec![1, 1]], 2000, 9, 20, 1.0).unwrap();
        assert!(st.tail.windows(2).all(|w| w[1].p_hat <= w[0].p_hat));
    }
}
