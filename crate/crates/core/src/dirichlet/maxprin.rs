use super::exposed::{exposed_points, ExposedSet};
use crate::env::Environment;
use crate::error::{Error, Result};
use crate::rng::derive_seed;
use crate::walk::t1_samples;
use serde::Serialize;
use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RescaledGenerator {
    /// `h(z) - E^z[h(X_{min(T_1, k)})]`.
    pub value: f64,
    pub expected_stop: f64,
    /// `P^z(T_1 > k)`.
    pub tail: f64,
}

/// Exact `L^{(N)}_ω h(z)` by dynamic programming over
/// (position, set of moved axes) for `min(T_1, k)` steps.
pub fn rescaled_generator(env: &Environment, h: impl Fn(&[i64]) -> f64, z: &[i64], k: usize) -> Result<RescaledGenerator> {
    if k == 0 {
        return Err(Error::Argument("rescaled generator needs k ≥ 1".into()));
    }
    let b = env.bounds();
    let d = env.dim();
    let full: u32 = (1u32 << d) - 1;
    let start = b.index(z).ok_or_else(|| Error::BoxEscape { site: z.to_vec() })?;
    let mut layer: HashMap<(usize, u32), f64> = HashMap::from([((start, 0), 1.0)]);
    let mut eh = 0.0;
    let mut estop = 0.0;
    for t in 1..=k {
        let mut next: HashMap<(usize, u32), f64> = HashMap::with_capacity(layer.len() * 2);
        let mut states: Vec<_> = layer.into_iter().collect();
        states.sort_by_key(|s| s.0);
        for ((idx, seen), mass) in states {
            for (axis, &p) in env.weights(idx).iter().enumerate() {
                if p <= 0.0 {
                    continue;
                }
                for positive in [true, false] {
                    let j = b.neighbor(idx, axis, positive).ok_or_else(|| {
                        let mut site = b.coords(idx);
                        site[axis] += if positive { 1 } else { -1 };
                        Error::BoxEscape { site }
                    })?;
                    let s2 = seen | (1 << axis);
                    let m = mass * p;
                    if s2 == full {
                        eh += m * h(&b.coords(j));
                        estop += m * t as f64;
                    } else {
                        *next.entry((j, s2)).or_insert(0.0) += m;
                    }
                }
            }
        }
        layer = next;
    }
    let mut tail = 0.0;
    for ((idx, _), mass) in layer {
        eh += mass * h(&b.coords(idx));
        estop += mass * k as f64;
        tail += mass;
    }
    Ok(RescaledGenerator {
        value: h(z) - eh,
        expected_stop: estop,
        tail,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaxPrincipleOptions {
    /// Exponent in the first applicability condition.
    pub kappa: f64,
    pub t1_samples: usize,
    pub seed: u64,
}

impl Default for MaxPrincipleOptions {
    fn default() -> Self {
        Self {
            kappa: 2.0,
            t1_samples: 1000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaxPrincipleCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    /// All three empirical conditions hold at every site of `Q`.
    pub applicable: bool,
    /// Per condition: holds at every site.
    pub conditions: [bool; 3],
    pub exposed: ExposedSet,
    /// `L^{(N)}_ω h` at each exposed site, in `exposed` order.
    pub generator: Vec<f64>,
}

/// Both sides of the rescaled maximum principle on `Q`, plus the empirical
/// applicability conditions.
pub fn check_max_principle(
    env: &Environment,
    h: impl Fn(&[i64]) -> f64 + Copy,
    q: &[Vec<i64>],
    n: usize,
    k: usize,
    opts: &MaxPrincipleOptions,
) -> Result<MaxPrincipleCheck> {
    if q.is_empty() {
        return Err(Error::Domain("Q is empty".into()));
    }
    // the widened boundary is empty for k = 1, leaving its maximum undefined
    if k < 2 || k >= n {
        return Err(Error::Argument(format!("need 2 <= k < N, got k={k}, N={n}")));
    }
    let diam2 = q
        .iter()
        .flat_map(|x| q.iter().map(move |y| x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<i64>()))
        .max()
        .unwrap_or(0);
    if (diam2 as f64).sqrt() > n as f64 + 1e-9 {
        return Err(Error::Argument(format!(
            "Q has diameter {:.3} exceeding N={n}",
            (diam2 as f64).sqrt()
        )));
    }
    let d = env.dim() as f64;
    let exposed = exposed_points(h, q, k);
    let generator: Vec<f64> = exposed
        .exposed()
        .map(|s| rescaled_generator(env, h, &s.site, k).map(|g| g.value))
        .collect::<Result<_>>()?;
    let sum: f64 = generator.iter().map(|v| v.abs().powf(d)).sum();
    let rhs = 6.0 * n as f64 * sum.powf(1.0 / d);
    let max_q = q.iter().map(|x| h(x)).fold(f64::NEG_INFINITY, f64::max);
    let ring = super::domain::widened_boundary(q, k);
    let max_ring = ring.iter().map(|x| h(x)).fold(f64::NEG_INFINITY, f64::max);
    let lhs = max_q - max_ring;

    let log_n = (n as f64).ln();
    let cut1 = log_n.powf(opts.kappa).floor() as usize;
    let eps2 = (-log_n * log_n).exp();
    let eps3 = (-log_n.powi(3)).exp();
    let horizon = cut1.max(k) + 1;
    let mut conditions = [true; 3];
    for (i, z) in q.iter().enumerate() {
        let samples = t1_samples(env, z, opts.t1_samples, derive_seed(opts.seed, i as u64), horizon)?;
        let m = samples.len() as f64;
        let over_cut1 = samples.iter().filter(|t| t.is_none_or(|v| v > cut1)).count() as f64 / m;
        let over_k = samples.iter().filter(|t| t.is_none_or(|v| v > k)).count() as f64 / m;
        // censored samples make the truncated mean unbounded
        let censored = samples.iter().any(|t| t.is_none());
        let trunc_mean = if censored {
            f64::INFINITY
        } else {
            samples.iter().flatten().filter(|&&v| v > k).map(|&v| v as f64).sum::<f64>() / m
        };
        conditions[0] &= over_cut1 < eps2;
        conditions[1] &= trunc_mean < eps2;
        conditions[2] &= over_k < eps3;
    }
    Ok(MaxPrincipleCheck {
        lhs,
        rhs,
        holds: lhs <= rhs,
        applicable: conditions.iter().all(|&c| c),
        conditions,
        exposed,
        generator,
    })
}
