use crate::dirichlet::{harmonic_measure, ExitTargets, LatticeDomain, SolveOptions};
use crate::env::Environment;
use crate::error::{Error, Result};
use crate::lattice::ball_sites;
use crate::rng::stream_rng;
use rand::seq::index::sample;
use rayon::prelude::*;
use serde::Serialize;

/// `½ Σ |p_i - q_i|`.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SourceSet {
    All,
    /// `count` sites drawn without replacement from `B_R`.
    Subsample { count: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscillationMeasurement {
    pub radius: f64,
    pub psi: f64,
    pub law: String,
    pub seed: u64,
    /// Largest total-variation distance between exit laws from `∂B_{ΨR}`.
    pub upsilon_hat: f64,
    pub argmax: (Vec<i64>, Vec<i64>),
    pub n_sources: usize,
    pub subsampled: bool,
}

/// Exit laws from the closed ball `B_{ΨR}` started at sites of the closed
/// ball `B_R`, and the largest pairwise total variation among them.
pub fn oscillation_constant(env: &Environment, radius: f64, psi: f64, sources: SourceSet) -> Result<OscillationMeasurement> {
    if !(psi > 1.0) {
        return Err(Error::Argument(format!("Ψ must exceed 1, got {psi}")));
    }
    let d = env.dim();
    let dom = LatticeDomain::closed_ball(psi * radius, &vec![0.0; d])?;
    let all = ball_sites(&vec![0; d], radius);
    let (src, subsampled) = match sources {
        SourceSet::All => (all, false),
        SourceSet::Subsample { count, seed } if count < all.len() => {
            let mut rng = stream_rng(seed, 0);
            let mut pick = sample(&mut rng, all.len(), count).into_vec();
            pick.sort_unstable();
            (pick.into_iter().map(|i| all[i].clone()).collect(), true)
        }
        SourceSet::Subsample { .. } => (all, false),
    };
    let h = harmonic_measure(env, &dom, &src, ExitTargets::Sites, SolveOptions::default())?;
    let (upsilon_hat, i, j) = (0..src.len())
        .into_par_iter()
        .map(|i| {
            (i + 1..src.len())
                .map(|j| (total_variation(h.row(i), h.row(j)), i, j))
                .fold((0.0, i, i), |a, b| if b.0 > a.0 { b } else { a })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((0.0, 0, 0), |a, b| if b.0 > a.0 { b } else { a });
    Ok(OscillationMeasurement {
        radius,
        psi,
        law: env.law_name().to_string(),
        seed: env.seed(),
        upsilon_hat: upsilon_hat.clamp(0.0, 1.0),
        argmax: (src[i].clone(), src[j].clone()),
        n_sources: src.len(),
        subsampled,
    })
}
