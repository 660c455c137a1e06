//! One function per experiment kind. Each builds its tasks, runs them on the
//! shared pool and returns the tables to write.

use super::config::config_err;
use super::{fmt_f, CsvTable, Ctx, ExperimentKind, Task};
use crate::dirichlet::{
    boundary_values, check_max_principle, harmonic_measure, solve_dirichlet, ExitTargets, LatticeDomain,
    MaxPrincipleOptions, SolveOptions, SolverTag,
};
use crate::env::{sample_environment, save_environment, validate_environment, Environment};
use crate::error::{Error, Result};
use crate::harnack::{harnack_ratio, oscillation_constant, BoundaryFamily, SourceSet};
use crate::homog::{
    exit_law_discrepancy, homogenization_error, reference_sigma, CellSet, ExitTargetSet, PolyKind,
    SigmaHarmonicFunction, SpherePartition, WosOptions,
};
use crate::lattice::LatticeBox;
use crate::perc::{
    build_digraph, distance_tail, es_stair, find_sinks, holes_are_rectangles, nested_sink_rows,
    reach_outside_sink, reach_outside_sink_tail, sample_sink_distances, sink_stats, tadpole, Heading, MIN_SINK_SEEDS,
};
use crate::rng::{derive_seed, stream_rng};
use crate::stats::mean_stderr;
use crate::walk::{estimate_sigma, t1_samples};
use rand::Rng;
use std::path::PathBuf;

type Outputs = (Vec<CsvTable>, Vec<PathBuf>);

// Sub-streams of a task seed; stream 0 is the environment itself.
const WALK_STREAM: u64 = 1;
const AUX_STREAM: u64 = 2;

pub(crate) fn dispatch(ctx: &Ctx) -> Result<Outputs> {
    match ctx.cfg.kind {
        ExperimentKind::GenEnv => gen_env(ctx),
        ExperimentKind::T1 => t1(ctx),
        ExperimentKind::Sigma => sigma(ctx),
        ExperimentKind::Dirichlet => dirichlet(ctx),
        ExperimentKind::Homog => homog(ctx),
        ExperimentKind::ExitLaw => exit_law(ctx),
        ExperimentKind::Sinks => sinks(ctx),
        ExperimentKind::Stairs => stairs(ctx),
        ExperimentKind::Holes => holes(ctx),
        ExperimentKind::DistTail => dist_tail(ctx),
        ExperimentKind::Harnack => harnack(ctx),
        ExperimentKind::Osc => osc(ctx),
        ExperimentKind::AbpCheck => abp_check(ctx),
    }
}

fn env_on(ctx: &Ctx, bounds: &LatticeBox, seed: u64) -> Result<Environment> {
    sample_environment(&ctx.law, bounds, seed)
}

/// Cube large enough to hold the closed ball of radius `r`.
fn ball_box(d: usize, r: f64) -> Result<LatticeBox> {
    LatticeBox::centered(d, r.ceil() as i64 + 1)
}

fn size(t: &Task) -> i64 {
    t.size.expect("size task")
}

fn radius(t: &Task) -> f64 {
    t.radius.expect("radius task")
}

fn coords(x: &[i64]) -> String {
    x.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

fn require_2d(ctx: &Ctx) -> Result<()> {
    if ctx.cfg.dim != 2 {
        return Err(config_err("dim", format!("{} is defined for d = 2 only", ctx.cfg.kind)));
    }
    Ok(())
}

fn sigma_for(ctx: &Ctx) -> Result<Vec<f64>> {
    let estimate: Option<Vec<f64>> = match ctx.cfg.raw.get("sigma") {
        Some(_) => Some(ctx.cfg.raw.list_or("sigma", &[])?),
        None => None,
    };
    if let Some(e) = &estimate {
        if e.len() != ctx.cfg.dim || e.iter().any(|&v| !(v > 0.0)) {
            return Err(config_err("sigma", format!("need {} positive diagonal entries", ctx.cfg.dim)));
        }
    }
    reference_sigma(&ctx.law, estimate.as_deref())
        .map(|(s, _)| s)
        .ok_or_else(|| config_err("sigma", "law has no symmetry-exact Σ; supply `sigma = s1, s2, ...`"))
}

fn gen_env(ctx: &Ctx) -> Result<Outputs> {
    let out = &ctx.cfg.out;
    let results = ctx.run(ctx.per_seed_size(), |t| {
        let env = env_on(ctx, &LatticeBox::centered(ctx.cfg.dim, size(t))?, t.seed)?;
        let path = out.join(format!("env_s{}_n{}.rwre", t.seed, size(t)));
        save_environment(&env, &path)?;
        let v = validate_environment(&env);
        Ok((path, env.bounds().len(), v.balanced, v.genuinely_d_dimensional()))
    });
    let mut table = CsvTable::new("env_summary.csv", &["seed", "n", "sites", "balanced", "d_dimensional"]);
    let mut files = Vec::new();
    for (t, (path, sites, balanced, full)) in results {
        table.push(vec![
            t.seed.to_string(),
            size(&t).to_string(),
            sites.to_string(),
            balanced.to_string(),
            full.to_string(),
        ]);
        files.push(path);
    }
    Ok((vec![table], files))
}

/// `P̂(T_1 > n)` at the origin, pooled over environments.
fn t1(ctx: &Ctx) -> Result<Outputs> {
    let horizon: usize = ctx.cfg.raw.parse_or("horizon", 16)?;
    let samples: usize = ctx.cfg.raw.parse_or("samples", 10_000)?;
    if horizon == 0 || samples == 0 {
        return Err(config_err("samples", "horizon and samples must be positive"));
    }
    let origin = vec![0; ctx.cfg.dim];
    let results = ctx.run(ctx.per_seed(), |t| {
        let env = env_on(ctx, &LatticeBox::centered(ctx.cfg.dim, horizon as i64 + 1)?, t.seed)?;
        t1_samples(&env, &origin, samples, derive_seed(t.seed, WALK_STREAM), horizon)
    });
    let pooled: Vec<Option<usize>> = results.into_iter().flat_map(|(_, s)| s).collect();
    let mut table = CsvTable::new("t1_tail.csv", &["n", "p_hat", "stderr", "censored_frac"]);
    if pooled.is_empty() {
        return Ok((vec![table], Vec::new()));
    }
    let total = pooled.len() as f64;
    let censored = pooled.iter().filter(|t| t.is_none()).count() as f64 / total;
    for n in 0..=horizon {
        let over = pooled.iter().filter(|t| t.is_none_or(|v| v > n)).count() as f64;
        let p = over / total;
        table.push(vec![
            n.to_string(),
            fmt_f(p),
            fmt_f((p * (1.0 - p) / total).sqrt()),
            fmt_f(censored),
        ]);
    }
    Ok((vec![table], Vec::new()))
}

/// Environment-from-the-particle estimate of `diag Σ`, averaged over tasks.
fn sigma(ctx: &Ctx) -> Result<Outputs> {
    let run_length: usize = ctx.cfg.raw.parse_or("run_length", 1_000_000)?;
    let burn_in: usize = ctx.cfg.raw.parse_or("burn_in", 10_000)?;
    let wrap = ctx.cfg.raw.bool_or("wrap", true)?;
    if run_length <= burn_in {
        return Err(config_err("run_length", "run_length must exceed burn_in"));
    }
    let d = ctx.cfg.dim;
    let results = ctx.run(ctx.per_seed_size(), |t| {
        let env = env_on(ctx, &LatticeBox::cube_of_side(d, size(t))?, t.seed)?;
        estimate_sigma(&env, &vec![0; d], run_length, burn_in, derive_seed(t.seed, WALK_STREAM), wrap)
    });
    let mut table = CsvTable::new("sigma.csv", &["axis", "sigma_hat", "stderr", "wrap"]);
    if results.is_empty() {
        return Ok((vec![table], Vec::new()));
    }
    for axis in 0..d {
        let vals: Vec<f64> = results.iter().map(|(_, s)| s.diag[axis]).collect();
        let (mean, se) = if vals.len() >= 2 {
            mean_stderr(&vals)
        } else {
            (vals[0], results[0].1.stderr[axis])
        };
        table.push(vec![axis.to_string(), fmt_f(mean), fmt_f(se), wrap.to_string()]);
    }
    Ok((vec![table], Vec::new()))
}

/// Dirichlet solves on `B_R^dis` with data `half` (indicator of `x_0 > 0`) or
/// `linear` (`x_0 / R`).
fn dirichlet(ctx: &Ctx) -> Result<Outputs> {
    let data = ctx.cfg.raw.get("data").unwrap_or("half").to_string();
    if data != "half" && data != "linear" {
        return Err(config_err("data", format!("expected half or linear, got `{data}`")));
    }
    let dump = ctx.cfg.raw.bool_or("dump", false)?;
    let dump_exit = ctx.cfg.raw.bool_or("dump_exit", false)?;
    let d = ctx.cfg.dim;
    let opts = SolveOptions::with_tol(ctx.cfg.tol);
    let out = &ctx.cfg.out;
    let results = ctx.run(ctx.per_seed_radius(), |t| {
        let r = radius(t);
        let env = env_on(ctx, &ball_box(d, r)?, t.seed)?;
        let dom = LatticeDomain::discrete_ball(r, &vec![0.0; d])?;
        let g = boundary_values(&dom, |x| if data == "half" { f64::from(u8::from(x[0] > 0)) } else { x[0] as f64 / r });
        let sol = solve_dirichlet(&env, &dom, &g, opts)?;
        let mut files = Vec::new();
        if dump {
            let mut tab = CsvTable::new(format!("dirichlet_s{}_R{r}.csv", t.seed), &["site", "value"]);
            for (x, v) in dom.interior_sites().iter().zip(&sol.interior) {
                tab.push(vec![coords(x), fmt_f(*v)]);
            }
            for (x, v) in dom.boundary_sites().iter().zip(&sol.boundary) {
                tab.push(vec![coords(x), fmt_f(*v)]);
            }
            files.push(tab.write(out)?);
        }
        if dump_exit {
            let origin = vec![0; d];
            let h = harmonic_measure(&env, &dom, &[origin], ExitTargets::Sites, opts)?;
            let mut tab = CsvTable::new(format!("exit_dist_s{}_R{r}.csv", t.seed), &["source", "target_label", "probability"]);
            for (b, x) in dom.boundary_sites().iter().enumerate() {
                tab.push(vec![coords(&h.sources[0]), coords(x), fmt_f(h.row(0)[b])]);
            }
            files.push(tab.write(out)?);
        }
        Ok((env.law_name().to_string(), dom.n_interior(), dom.n_boundary(), sol, files))
    });
    let mut table = CsvTable::new(
        "dirichlet.csv",
        &["law", "seed", "R", "interior", "boundary", "solver", "residual", "min", "max"],
    );
    let mut files = Vec::new();
    for (t, (law, ni, nb, sol, mut f)) in results {
        table.push(vec![
            law,
            t.seed.to_string(),
            fmt_f(radius(&t)),
            ni.to_string(),
            nb.to_string(),
            match sol.solver {
                SolverTag::Direct => "direct".into(),
                SolverTag::Iterative => "iterative".into(),
            },
            fmt_f(sol.residual),
            fmt_f(sol.min()),
            fmt_f(sol.max()),
        ]);
        files.append(&mut f);
    }
    Ok((vec![table], files))
}

fn homog(ctx: &Ctx) -> Result<Outputs> {
    let sigma = sigma_for(ctx)?;
    let kind = PolyKind::parse(ctx.cfg.raw.get("poly").unwrap_or("quad:0,1")).map_err(|e| config_err("poly", e.to_string()))?;
    let f = SigmaHarmonicFunction::new(&sigma, kind).map_err(|e| config_err("poly", e.to_string()))?;
    let opts = SolveOptions::with_tol(ctx.cfg.tol);
    let d = ctx.cfg.dim;
    let results = ctx.run(ctx.per_seed_radius(), |t| {
        let env = env_on(ctx, &ball_box(d, radius(t))?, t.seed)?;
        homogenization_error(&env, &f, radius(t), opts)
    });
    let mut table = CsvTable::new("homog_error.csv", &["law", "seed", "R", "F_kind", "err", "residual"]);
    for (t, h) in results {
        table.push(vec![h.law, t.seed.to_string(), fmt_f(h.radius), h.f_kind, fmt_f(h.error), fmt_f(h.residual)]);
    }
    Ok((vec![table], Vec::new()))
}

/// Per task, the cell table at the worst source goes to its own file
/// (`exit_law.csv` when there is a single task).
fn exit_law(ctx: &Ctx) -> Result<Outputs> {
    let sigma = sigma_for(ctx)?;
    let d = ctx.cfg.dim;
    let r: f64 = ctx.cfg.raw.parse_or("r", 0.0)?;
    if !(0.0..1.0).contains(&r) {
        return Err(config_err("r", format!("r must lie in [0, 1), got {r}")));
    }
    let targets = match ctx.cfg.raw.get("target").unwrap_or("half") {
        "half" => {
            let mut normal = vec![0.0; d];
            normal[0] = 1.0;
            ExitTargetSet::Single(CellSet::HalfSpace { normal })
        }
        "partition" => {
            let mesh: f64 = ctx.cfg.raw.parse_or("mesh", 0.5)?;
            ExitTargetSet::Partition(SpherePartition::new(d, mesh).map_err(|e| config_err("mesh", e.to_string()))?)
        }
        other => return Err(config_err("target", format!("expected half or partition, got `{other}`"))),
    };
    let replicates: usize = ctx.cfg.raw.parse_or("replicates", WosOptions::default().replicates)?;
    if replicates == 0 {
        return Err(config_err("replicates", "need at least one replicate"));
    }
    let tasks = ctx.per_seed_radius();
    let single = tasks.len() == 1;
    let results = ctx.run(tasks, |t| {
        let env = env_on(ctx, &ball_box(d, radius(t))?, t.seed)?;
        let wos = WosOptions {
            replicates,
            seed: derive_seed(t.seed, WALK_STREAM),
            ..WosOptions::default()
        };
        exit_law_discrepancy(&env, &sigma, radius(t), r, &targets, &wos)
    });
    let mut tables = Vec::new();
    let mut summary = CsvTable::new(
        "exit_law_summary.csv",
        &["law", "seed", "R", "max_discrepancy", "worst_source", "n_sources"],
    );
    for (t, e) in results {
        let name = if single {
            "exit_law.csv".to_string()
        } else {
            format!("exit_law_s{}_R{}.csv", t.seed, radius(&t))
        };
        let mut cells = CsvTable::new(name, &["cell_index", "quenched", "continuum", "abs_diff", "stderr"]);
        for row in &e.rows {
            cells.push(vec![
                row.cell_index.to_string(),
                fmt_f(row.quenched),
                fmt_f(row.continuum),
                fmt_f(row.abs_diff),
                fmt_f(row.stderr),
            ]);
        }
        tables.push(cells);
        summary.push(vec![
            ctx.law.name().to_string(),
            t.seed.to_string(),
            fmt_f(radius(&t)),
            fmt_f(e.max_discrepancy),
            coords(&e.worst_source),
            e.n_sources.to_string(),
        ]);
    }
    tables.push(summary);
    Ok((tables, Vec::new()))
}

/// One environment per seed; every size is a concentric cube cut from it.
fn sinks(ctx: &Ctx) -> Result<Outputs> {
    let sizes = ctx.cfg.sizes.clone();
    let max = *sizes.iter().max().expect("sizes nonempty");
    let d = ctx.cfg.dim;
    let results = ctx.run(ctx.per_seed(), |t| {
        let env = env_on(ctx, &LatticeBox::cube_of_side(d, max)?, t.seed)?;
        nested_sink_rows(&env, &sizes)
    });
    let rows: Vec<_> = results.into_iter().flat_map(|(_, r)| r).collect();
    let mut table = CsvTable::new("sinks.csv", &["seed", "n", "A_n", "sink_density", "subcube_hit_frac"]);
    for r in &rows {
        table.push(vec![
            r.seed.to_string(),
            r.n.to_string(),
            r.a_n.to_string(),
            fmt_f(r.sink_density),
            fmt_f(r.subcube_hit_frac),
        ]);
    }
    let mut tables = vec![table];
    if ctx.cfg.seeds.len() >= MIN_SINK_SEEDS {
        match sink_stats(&rows) {
            Ok(s) => {
                let mut summary = CsvTable::new(
                    "sinks_summary.csv",
                    &["n", "seeds", "unique_p_hat", "unique_ci_lo", "unique_ci_hi", "min_density", "mean_density", "mean_subcube_hit"],
                );
                for p in &s.per_n {
                    summary.push(vec![
                        p.n.to_string(),
                        p.seeds.to_string(),
                        fmt_f(p.unique.p_hat),
                        fmt_f(p.unique.ci_lo),
                        fmt_f(p.unique.ci_hi),
                        fmt_f(p.min_density),
                        fmt_f(p.mean_density),
                        fmt_f(p.mean_subcube_hit),
                    ]);
                }
                tables.push(summary);
            }
            Err(e) => ctx.fail("sinks summary", &e),
        }
    }
    Ok((tables, Vec::new()))
}

fn heading_name(h: Heading) -> &'static str {
    match h {
        Heading::East => "east",
        Heading::North => "north",
    }
}

/// Stairs and tadpoles from the origin, both headings. The box has half-width
/// `margin · n`.
fn stairs(ctx: &Ctx) -> Result<Outputs> {
    require_2d(ctx)?;
    let margin: i64 = ctx.cfg.raw.parse_or("margin", 4)?;
    if margin < 1 {
        return Err(config_err("margin", "margin must be at least 1"));
    }
    let results = ctx.run(ctx.per_seed_size(), |t| {
        let n = size(t);
        let bbox = LatticeBox::centered(2, margin * n)?;
        let env = env_on(ctx, &bbox, t.seed)?;
        let g = build_digraph(&env, &bbox)?;
        [Heading::East, Heading::North]
            .into_iter()
            .map(|h| Ok((h, es_stair(&g, &[0, 0], h)?, tadpole(&g, &[0, 0], n, h)?)))
            .collect::<Result<Vec<_>>>()
    });
    let mut st = CsvTable::new(
        "stairs.csv",
        &["seed", "n", "heading", "v0", "es_length", "en_length", "e_length", "identity_holds", "bubble_size", "bubble_bound_holds"],
    );
    let mut tp = CsvTable::new("tadpole.csv", &["seed", "n", "heading", "size", "e_paths", "connected_within"]);
    for (t, per) in results {
        for (h, s, tad) in per {
            st.push(vec![
                t.seed.to_string(),
                size(&t).to_string(),
                heading_name(h).into(),
                s.es.v0.to_string(),
                s.es.length.to_string(),
                s.en.length.to_string(),
                s.e_length.to_string(),
                s.identity_holds().to_string(),
                s.bubble.len().to_string(),
                s.bubble_bound_holds().to_string(),
            ]);
            tp.push(vec![
                t.seed.to_string(),
                size(&t).to_string(),
                heading_name(h).into(),
                tad.size().to_string(),
                (tad.anchors.len() - 1).to_string(),
                tad.connected_within.to_string(),
            ]);
        }
    }
    Ok((vec![st, tp], Vec::new()))
}

fn holes(ctx: &Ctx) -> Result<Outputs> {
    require_2d(ctx)?;
    let results = ctx.run(ctx.per_seed_size(), |t| {
        let bbox = LatticeBox::cube_of_side(2, size(t))?;
        let env = env_on(ctx, &bbox, t.seed)?;
        let g = build_digraph(&env, &bbox)?;
        holes_are_rectangles(&g, &find_sinks(&g))
    });
    let mut table = CsvTable::new("holes.csv", &["seed", "n", "holes", "rectangles", "max_hole_area"]);
    for (t, r) in results {
        table.push(vec![
            t.seed.to_string(),
            size(&t).to_string(),
            r.holes.len().to_string(),
            r.rectangles.to_string(),
            r.max_hole_area.to_string(),
        ]);
    }
    Ok((vec![table], Vec::new()))
}

/// Sink distance tails pooled over tasks, plus the per-seed event that the
/// origin reaches a non-sink site at sup-distance `k`.
fn dist_tail(ctx: &Ctx) -> Result<Outputs> {
    let buckets: Vec<i64> = ctx.cfg.raw.list_or("buckets", &[4, 8, 16])?;
    let cs: Vec<f64> = ctx.cfg.raw.list_or("c", &[2.0])?;
    let pairs: usize = ctx.cfg.raw.parse_or("pairs", 20)?;
    let ks: Vec<i64> = ctx.cfg.raw.list_or("ks", &buckets)?;
    if buckets.is_empty() || buckets.iter().any(|&b| b <= 0) {
        return Err(config_err("buckets", "buckets must be positive"));
    }
    if cs.is_empty() {
        return Err(config_err("c", "at least one C is required"));
    }
    let d = ctx.cfg.dim;
    let results = ctx.run(ctx.per_seed_size(), |t| {
        let bbox = LatticeBox::centered(d, size(t) / 2)?;
        let env = env_on(ctx, &bbox, t.seed)?;
        let g = build_digraph(&env, &bbox)?;
        let s = find_sinks(&g);
        let samples = sample_sink_distances(&g, &s, &buckets, pairs, derive_seed(t.seed, AUX_STREAM));
        Ok((samples, reach_outside_sink(&g, &s, &ks)?))
    });
    let mut samples = Vec::new();
    let mut events = Vec::new();
    for (_, (s, e)) in results {
        samples.extend(s);
        events.push(e);
    }
    let mut dt = CsvTable::new("dist_tail.csv", &["bucket", "C", "p_hat", "ci_lo", "ci_hi"]);
    let mut rt = CsvTable::new("reach_tail.csv", &["k", "p_hat", "ci_lo", "ci_hi", "trials"]);
    match distance_tail(&samples, &buckets, &cs) {
        Ok(tail) => {
            for r in tail.rows {
                dt.push(vec![r.bucket.to_string(), fmt_f(r.c), fmt_f(r.p_hat), fmt_f(r.ci_lo), fmt_f(r.ci_hi)]);
            }
        }
        Err(e) => ctx.fail("distance tail", &e),
    }
    match reach_outside_sink_tail(&events, &ks) {
        Ok(tail) => {
            for r in tail.rows {
                rt.push(vec![r.k.to_string(), fmt_f(r.p_hat), fmt_f(r.ci_lo), fmt_f(r.ci_hi), r.trials.to_string()]);
            }
        }
        Err(e) => ctx.fail("reach tail", &e),
    }
    Ok((vec![dt, rt], Vec::new()))
}

fn harnack(ctx: &Ctx) -> Result<Outputs> {
    let d = ctx.cfg.dim;
    let tol = ctx.cfg.tol;
    let results = ctx.run(ctx.per_seed_radius(), |t| {
        let env = env_on(ctx, &ball_box(d, 2.0 * radius(t))?, t.seed)?;
        harnack_ratio(&env, radius(t), &BoundaryFamily::PointMasses, tol)
    });
    let mut table = CsvTable::new("harnack.csv", &["law", "seed", "R", "ratio", "classical_ref", "zero_inf_frac"]);
    for (t, h) in results {
        table.push(vec![
            h.law,
            t.seed.to_string(),
            fmt_f(h.radius),
            fmt_f(h.ratio),
            fmt_f(h.classical_ref),
            fmt_f(h.zero_inf_frac),
        ]);
    }
    Ok((vec![table], Vec::new()))
}

fn osc(ctx: &Ctx) -> Result<Outputs> {
    let psi: f64 = ctx.cfg.raw.parse_or("psi", 2.0)?;
    if !(psi > 1.0) {
        return Err(config_err("psi", format!("Ψ must exceed 1, got {psi}")));
    }
    let subsample: usize = ctx.cfg.raw.parse_or("subsample", 0)?;
    let d = ctx.cfg.dim;
    let results = ctx.run(ctx.per_seed_radius(), |t| {
        let env = env_on(ctx, &ball_box(d, psi * radius(t))?, t.seed)?;
        let sources = if subsample == 0 {
            SourceSet::All
        } else {
            SourceSet::Subsample {
                count: subsample,
                seed: derive_seed(t.seed, AUX_STREAM),
            }
        };
        oscillation_constant(&env, radius(t), psi, sources)
    });
    let mut table = CsvTable::new("osc.csv", &["law", "seed", "R", "psi", "upsilon_hat"]);
    for (t, o) in results {
        table.push(vec![o.law, t.seed.to_string(), fmt_f(o.radius), fmt_f(o.psi), fmt_f(o.upsilon_hat)]);
    }
    Ok((vec![table], Vec::new()))
}

/// `h(x) = Σ a_ij x_i x_j + ⟨b, x⟩` with coefficients uniform in `[-1, 1]`.
fn random_quadratic(d: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut rng = stream_rng(seed, AUX_STREAM);
    let a = (0..d).map(|_| (0..d).map(|_| rng.gen_range(-1.0..=1.0)).collect()).collect();
    let b = (0..d).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    (a, b)
}

/// Rescaled maximum principle on the largest cube of diameter at most `N`.
fn abp_check(ctx: &Ctx) -> Result<Outputs> {
    let d = ctx.cfg.dim;
    let kappa: f64 = ctx.cfg.raw.parse_or("kappa", 2.0)?;
    let t1_samples: usize = ctx.cfg.raw.parse_or("t1_samples", 1000)?;
    let k_fixed: Option<usize> = match ctx.cfg.raw.get("k") {
        Some(_) => Some(ctx.cfg.raw.parse_or("k", 1)?),
        None => None,
    };
    let results = ctx.run(ctx.per_seed_size(), |t| {
        let n = size(t) as usize;
        let k = k_fixed.unwrap_or((n / 4).max(2));
        if k == 0 || k >= n {
            return Err(Error::Argument(format!("need 0 < k < N, got k={k}, N={n}")));
        }
        let half = ((n as f64) / (2.0 * (d as f64).sqrt())).floor() as i64;
        let q: Vec<Vec<i64>> = LatticeBox::centered(d, half)?.iter_coords().collect();
        let cut1 = (n as f64).ln().powf(kappa).floor() as i64;
        let reach = half + cut1.max(k as i64) + k as i64 + 2;
        let env = env_on(ctx, &LatticeBox::centered(d, reach)?, t.seed)?;
        let (a, b) = random_quadratic(d, t.seed);
        let h = |x: &[i64]| {
            let mut v = 0.0;
            for i in 0..d {
                v += b[i] * x[i] as f64;
                for j in 0..d {
                    v += a[i][j] * (x[i] * x[j]) as f64;
                }
            }
            v
        };
        let opts = MaxPrincipleOptions {
            kappa,
            t1_samples,
            seed: derive_seed(t.seed, WALK_STREAM),
        };
        Ok((k, check_max_principle(&env, &h, &q, n, k, &opts)?))
    });
    let mut table = CsvTable::new("abp.csv", &["seed", "N", "k", "lhs", "rhs", "holds", "applicable", "exposed"]);
    for (t, (k, c)) in results {
        table.push(vec![
            t.seed.to_string(),
            size(&t).to_string(),
            k.to_string(),
            fmt_f(c.lhs),
            fmt_f(c.rhs),
            c.holds.to_string(),
            c.applicable.to_string(),
            c.exposed.count().to_string(),
        ]);
    }
    Ok((vec![table], Vec::new()))
}
