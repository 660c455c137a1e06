use super::graph::{build_digraph, find_sinks, DirectedLatticeGraph, SinkDecomposition};
use crate::env::Environment;
use crate::error::{Error, Result};
use crate::lattice::{norm1, norm_inf, LatticeBox};
use crate::rng::stream_rng;
use crate::stats::{nondecreasing_within_ci, nonincreasing_within_ci, Proportion};
use rand::Rng;
use serde::Serialize;
use std::collections::VecDeque;

/// Seeds required per size before `sink_stats` reports a frequency.
pub const MIN_SINK_SEEDS: usize = 30;

/// Sub-cubes per axis in the ubiquity report.
pub const SUBCUBES_PER_AXIS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SinkRow {
    pub seed: u64,
    pub n: i64,
    #[serde(rename = "A_n")]
    pub a_n: usize,
    pub sink_density: f64,
    pub subcube_hit_frac: f64,
}

/// Fraction of the `k^d` sub-cubes of `bbox` that meet `mask`. Site `x`
/// falls in bin `floor((x_i - lo_i) k / n_i)` along each axis; `k` is capped
/// at the side length so no bin is empty of sites.
pub fn subcube_hit_fraction(bbox: &LatticeBox, mask: &[bool], k: usize) -> f64 {
    let d = bbox.dim();
    let ks: Vec<usize> = (0..d).map(|a| k.min(bbox.extent(a))).collect();
    let total: usize = ks.iter().product();
    let mut hit = vec![false; total];
    let mut x = vec![0; d];
    for (i, _) in mask.iter().enumerate().filter(|(_, &m)| m) {
        bbox.coords_into(i, &mut x);
        let mut bin = 0;
        for a in 0..d {
            let b = (x[a] - bbox.lo()[a]) as usize * ks[a] / bbox.extent(a);
            bin = bin * ks[a] + b;
        }
        hit[bin] = true;
    }
    hit.iter().filter(|&&h| h).count() as f64 / total as f64
}

/// `A(n)`, density and sub-cube report on concentric cubes of each side in
/// `sizes`, all cut from the one environment.
pub fn nested_sink_rows(env: &Environment, sizes: &[i64]) -> Result<Vec<SinkRow>> {
    sizes
        .iter()
        .map(|&n| {
            let b = LatticeBox::cube_of_side(env.dim(), n)?;
            let g = build_digraph(env, &b)?;
            let s = find_sinks(&g);
            let mask = s.main_sink_mask();
            Ok(SinkRow {
                seed: env.seed(),
                n,
                a_n: s.count(),
                sink_density: s.main_sink().len() as f64 / b.len() as f64,
                subcube_hit_frac: subcube_hit_fraction(&b, &mask, SUBCUBES_PER_AXIS),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SinkSizeSummary {
    pub n: i64,
    pub seeds: usize,
    /// `P̂(A(n) = 1)`.
    pub unique: Proportion,
    pub min_density: f64,
    pub mean_density: f64,
    pub mean_subcube_hit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SinkStats {
    /// Ordered by increasing `n`.
    pub per_n: Vec<SinkSizeSummary>,
    pub unique_nondecreasing: bool,
}

pub fn sink_stats(rows: &[SinkRow]) -> Result<SinkStats> {
    let mut sizes: Vec<i64> = rows.iter().map(|r| r.n).collect();
    sizes.sort_unstable();
    sizes.dedup();
    let mut per_n = Vec::with_capacity(sizes.len());
    for n in sizes {
        let rs: Vec<&SinkRow> = rows.iter().filter(|r| r.n == n).collect();
        if rs.len() < MIN_SINK_SEEDS {
            return Err(Error::SampleSize(format!(
                "{} seeds at n = {n}, need at least {MIN_SINK_SEEDS}",
                rs.len()
            )));
        }
        let m = rs.len() as f64;
        per_n.push(SinkSizeSummary {
            n,
            seeds: rs.len(),
            unique: Proportion::new(rs.iter().filter(|r| r.a_n == 1).count(), rs.len()),
            min_density: rs.iter().map(|r| r.sink_density).fold(f64::INFINITY, f64::min),
            mean_density: rs.iter().map(|r| r.sink_density).sum::<f64>() / m,
            mean_subcube_hit: rs.iter().map(|r| r.subcube_hit_frac).sum::<f64>() / m,
        });
    }
    let ps: Vec<Proportion> = per_n.iter().map(|s| s.unique).collect();
    Ok(SinkStats {
        unique_nondecreasing: nondecreasing_within_ci(&ps),
        per_n,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HoleShape {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
    pub size: usize,
}

impl HoleShape {
    pub fn bbox_volume(&self) -> usize {
        self.lo.iter().zip(&self.hi).map(|(l, h)| (h - l + 1) as usize).product()
    }

    pub fn is_rectangle(&self) -> bool {
        self.size == self.bbox_volume()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HoleReport {
    /// Nearest-neighbour components of the box minus the main sink.
    pub components: usize,
    /// Components not touching the box edge.
    pub holes: Vec<HoleShape>,
    pub rectangles: usize,
    pub all_rectangles: bool,
    pub max_hole_area: usize,
    pub counterexamples: Vec<HoleShape>,
}

/// Compares each interior component of `box \ sink` with its bounding box.
pub fn holes_are_rectangles(g: &DirectedLatticeGraph, sinks: &SinkDecomposition) -> Result<HoleReport> {
    let b = g.bbox();
    if b.dim() != 2 {
        return Err(Error::Argument("hole analysis is defined for d = 2 only".into()));
    }
    let sink = sinks.main_sink_mask();
    let mut comp = vec![u32::MAX; b.len()];
    let mut components = 0;
    let mut holes = Vec::new();
    for start in 0..b.len() {
        if sink[start] || comp[start] != u32::MAX {
            continue;
        }
        let id = components as u32;
        components += 1;
        comp[start] = id;
        let mut queue = VecDeque::from([start]);
        let (mut lo, mut hi) = (b.coords(start), b.coords(start));
        let mut size = 0;
        let mut touches = false;
        while let Some(v) = queue.pop_front() {
            size += 1;
            touches |= b.on_face(v);
            for a in 0..2 {
                lo[a] = lo[a].min(b.coord(v, a));
                hi[a] = hi[a].max(b.coord(v, a));
                for s in [true, false] {
                    if let Some(w) = b.neighbor(v, a, s) {
                        if !sink[w] && comp[w] == u32::MAX {
                            comp[w] = id;
                            queue.push_back(w);
                        }
                    }
                }
            }
        }
        if !touches {
            holes.push(HoleShape { lo, hi, size });
        }
    }
    let counterexamples: Vec<HoleShape> = holes.iter().filter(|h| !h.is_rectangle()).cloned().collect();
    Ok(HoleReport {
        components,
        rectangles: holes.len() - counterexamples.len(),
        all_rectangles: counterexamples.is_empty(),
        max_hole_area: holes.iter().map(|h| h.size).max().unwrap_or(0),
        holes,
        counterexamples,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistanceSample {
    /// `‖x - y‖₁`.
    pub bucket: i64,
    pub distance: u32,
}

/// For each of `pairs` sink sites `x`, draws one sink site `y` per bucket
/// with `‖x - y‖₁` equal to the bucket and records `d_ω(x, y)`. Buckets
/// with no such `y` are skipped for that `x`.
pub fn sample_sink_distances(
    g: &DirectedLatticeGraph,
    sinks: &SinkDecomposition,
    buckets: &[i64],
    pairs: usize,
    seed: u64,
) -> Vec<DistanceSample> {
    let b = g.bbox();
    let sink = sinks.main_sink();
    let mut rng = stream_rng(seed, 0);
    let mut out = Vec::new();
    let coords: Vec<Vec<i64>> = sink.iter().map(|&i| b.coords(i)).collect();
    for _ in 0..pairs {
        let xi = rng.gen_range(0..sink.len());
        let dist = g.bfs(sink[xi], None);
        for &bucket in buckets {
            let ys: Vec<usize> = (0..sink.len())
                .filter(|&j| norm1(&crate::lattice::diff(&coords[j], &coords[xi])) == bucket)
                .collect();
            if ys.is_empty() {
                continue;
            }
            let y = sink[ys[rng.gen_range(0..ys.len())]];
            debug_assert_ne!(dist[y], u32::MAX, "sink sites are mutually reachable");
            out.push(DistanceSample { bucket, distance: dist[y] });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistTailRow {
    pub bucket: i64,
    #[serde(rename = "C")]
    pub c: f64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    #[serde(skip)]
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceTail {
    pub rows: Vec<DistTailRow>,
    /// Per `C`: the tail is nonincreasing over buckets within CI.
    pub decreasing: Vec<(f64, bool)>,
}

/// `P̂[d_ω(x, y) > C ‖x - y‖₁]` per bucket and `C`.
pub fn distance_tail(samples: &[DistanceSample], buckets: &[i64], cs: &[f64]) -> Result<DistanceTail> {
    let mut rows = Vec::new();
    let mut decreasing = Vec::new();
    for &c in cs {
        let mut ps = Vec::new();
        for &bucket in buckets {
            let s: Vec<&DistanceSample> = samples.iter().filter(|s| s.bucket == bucket).collect();
            if s.is_empty() {
                return Err(Error::SampleSize(format!("no sink pairs at distance {bucket}")));
            }
            let hits = s.iter().filter(|s| s.distance as f64 > c * bucket as f64).count();
            let p = Proportion::new(hits, s.len());
            rows.push(DistTailRow {
                bucket,
                c,
                p_hat: p.p_hat,
                ci_lo: p.ci_lo,
                ci_hi: p.ci_hi,
                samples: s.len(),
            });
            ps.push(p);
        }
        decreasing.push((c, nonincreasing_within_ci(&ps)));
    }
    Ok(DistanceTail { rows, decreasing })
}

/// Per `k`: some `x` with `‖x‖∞ = k`, reachable from the origin and outside
/// the main sink.
pub fn reach_outside_sink(g: &DirectedLatticeGraph, sinks: &SinkDecomposition, ks: &[i64]) -> Result<Vec<bool>> {
    let b = g.bbox();
    let o = b
        .index(&vec![0; b.dim()])
        .ok_or_else(|| Error::Argument("origin outside the graph box".into()))?;
    let sink = sinks.main_sink_mask();
    let dist = g.bfs(o, None);
    let mut found = vec![false; ks.len()];
    let mut x = vec![0; b.dim()];
    for i in (0..b.len()).filter(|&i| dist[i] != u32::MAX && !sink[i]) {
        b.coords_into(i, &mut x);
        let r = norm_inf(&x);
        for (f, &k) in found.iter_mut().zip(ks) {
            *f |= r == k;
        }
    }
    Ok(found)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReachRow {
    pub k: i64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReachTail {
    pub rows: Vec<ReachRow>,
    pub decreasing: bool,
}

/// Aggregates per-seed outcomes of [`reach_outside_sink`].
pub fn reach_outside_sink_tail(events: &[Vec<bool>], ks: &[i64]) -> Result<ReachTail> {
    if events.is_empty() {
        return Err(Error::SampleSize("no environments".into()));
    }
    let ps: Vec<Proportion> = (0..ks.len())
        .map(|j| Proportion::new(events.iter().filter(|e| e[j]).count(), events.len()))
        .collect();
    Ok(ReachTail {
        rows: ks
            .iter()
            .zip(&ps)
            .map(|(&k, p)| ReachRow {
                k,
                p_hat: p.p_hat,
                ci_lo: p.ci_lo,
                ci_hi: p.ci_hi,
                trials: p.trials,
            })
            .collect(),
        decreasing: nonincreasing_within_ci(&ps),
    })
}
