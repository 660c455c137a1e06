use super::*;
use crate::dirichlet::{solve_dirichlet, LatticeDomain, SolveOptions};
use crate::env::{make_law, sample_environment, Environment, LawSpec};
use crate::homog::{direction, SpherePartition};
use crate::lattice::{ball_sites, LatticeBox};
use crate::walk::{run_walk, StopRule};

fn srw(d: usize, half: i64) -> Environment {
    Environment::constant(LatticeBox::centered(d, half).unwrap(), &vec![0.5 / d as f64; d], "srw")
}

#[test]
fn classical_constants() {
    assert_eq!(classical_harnack_constant(1, 0.5).unwrap(), 3.0);
    assert_eq!(classical_harnack_constant(2, 0.5).unwrap(), 9.0);
    assert!((classical_harnack_constant(3, 1e-9).unwrap() - 1.0).abs() < 1e-8);
    assert!(classical_harnack_constant(2, 1.0).is_err());
}

#[test]
fn one_dimensional_ratio_is_three() {
    for r in [3.0, 5.0, 10.0] {
        let h = harnack_ratio(&srw(1, 2 * r as i64), r, &BoundaryFamily::PointMasses, ZERO_INF_TOL).unwrap();
        assert!((h.ratio - 3.0).abs() < 1e-12, "R = {r}: {}", h.ratio);
        assert_eq!(h.zero_inf_frac, 0.0);
        assert_eq!(h.data, 2);
    }
}

#[test]
fn constant_data_and_scaling() {
    let env = srw(2, 8);
    let dom = LatticeDomain::closed_ball(8.0, &[0.0, 0.0]).unwrap();
    let nb = dom.n_boundary();
    let ones = vec![1.0; nb];
    let h = harnack_ratio(&env, 4.0, &BoundaryFamily::Custom(vec![ones]), ZERO_INF_TOL).unwrap();
    assert!((h.ratio - 1.0).abs() < 1e-10);
    let g: Vec<f64> = (0..nb).map(|i| 1.0 + (i % 7) as f64).collect();
    let base = harnack_ratio(&env, 4.0, &BoundaryFamily::Custom(vec![g.clone()]), ZERO_INF_TOL).unwrap();
    let scaled: Vec<f64> = g.iter().map(|v| 37.5 * v).collect();
    let s = harnack_ratio(&env, 4.0, &BoundaryFamily::Custom(vec![scaled]), ZERO_INF_TOL).unwrap();
    assert!((base.ratio - s.ratio).abs() < 10.0 * SolveOptions::default().tol);
    assert!(base.ratio >= 1.0);
}

#[test]
fn unreachable_point_masses_are_counted() {
    // horizontal-only rows from height 6 up: the top cap is never reached
    let env = Environment::from_fn(LatticeBox::centered(2, 8).unwrap(), "capped", |x| {
        if x[1] >= 6 {
            vec![0.5, 0.0]
        } else {
            vec![0.25, 0.25]
        }
    });
    let h = harnack_ratio(&env, 4.0, &BoundaryFamily::PointMasses, ZERO_INF_TOL).unwrap();
    assert!(h.zero_inf_frac > 0.0 && h.zero_inf_frac < 1.0);
    assert_eq!(h.zero_infimum.len() as f64 / h.data as f64, h.zero_inf_frac);
}

#[test]
fn one_dimensional_oscillation_is_half() {
    for r in [2.0, 6.0] {
        let o = oscillation_constant(&srw(1, 2 * r as i64), r, 2.0, SourceSet::All).unwrap();
        assert!((o.upsilon_hat - 0.5).abs() < 1e-12);
        let mut pair = [o.argmax.0[0], o.argmax.1[0]];
        pair.sort();
        assert_eq!(pair, [-(r as i64), r as i64]);
    }
}

#[test]
fn oscillation_bounds_harmonic_functions() {
    let law = make_law(&LawSpec::AxisChoice { dim: 2 }).unwrap();
    let env = sample_environment(&law, &LatticeBox::centered(2, 8).unwrap(), 3).unwrap();
    let o = oscillation_constant(&env, 4.0, 2.0, SourceSet::All).unwrap();
    assert!((0.0..=1.0).contains(&o.upsilon_hat));
    let dom = LatticeDomain::closed_ball(8.0, &[0.0, 0.0]).unwrap();
    let inner = ball_sites(&[0, 0], 4.0);
    for k in 0..5u64 {
        let g: Vec<f64> = (0..dom.n_boundary())
            .map(|i| crate::rng::unit_interval(crate::rng::hash_words(k, [i as u64])))
            .collect();
        let sol = solve_dirichlet(&env, &dom, &g, SolveOptions::default()).unwrap();
        let vals: Vec<f64> = inner.iter().map(|x| sol.value(&dom, x).unwrap()).collect();
        let osc_in = vals.iter().cloned().fold(f64::MIN, f64::max) - vals.iter().cloned().fold(f64::MAX, f64::min);
        let osc_out = g.iter().cloned().fold(f64::MIN, f64::max) - g.iter().cloned().fold(f64::MAX, f64::min);
        assert!(osc_in <= o.upsilon_hat * osc_out + 10.0 * SolveOptions::default().tol);
    }
    let single = oscillation_constant(&env, 0.5, 2.0, SourceSet::All).unwrap();
    assert_eq!((single.n_sources, single.upsilon_hat), (1, 0.0));
    let sub = oscillation_constant(&env, 4.0, 2.0, SourceSet::Subsample { count: 10, seed: 1 }).unwrap();
    assert!(sub.subsampled && sub.upsilon_hat <= o.upsilon_hat + 1e-12);
}

#[test]
fn coupling_of_equal_starts_always_succeeds() {
    let env = srw(2, 12);
    let p = SpherePartition::new(2, 0.25).unwrap();
    let opts = CouplingOptions {
        replicates: 500,
        ..Default::default()
    };
    let c = basic_coupling(&env, &[0, 0], 4.0, &[1, 1], &[1, 1], &CouplingCells::Partition(p), 3.0, &opts).unwrap();
    assert_eq!(c.success_frequency(), 1.0);
    assert!(c.tv.abs() < 1e-12);
}

#[test]
fn coupling_success_matches_total_variation() {
    let env = srw(2, 12);
    let p = SpherePartition::new(2, 0.25).unwrap();
    let opts = CouplingOptions {
        replicates: 10_000,
        seed: 9,
        trajectories: false,
    };
    let c = basic_coupling(&env, &[0, 0], 4.0, &[-3, 0], &[3, 2], &CouplingCells::Partition(p), 3.0, &opts).unwrap();
    let sd = c.success.stderr().max(1e-3);
    assert!((c.success_frequency() + c.tv - 1.0).abs() < 3.0 * sd, "{} + {}", c.success_frequency(), c.tv);
    for r in &c.runs {
        assert!(!r.success || r.y_cell == r.z_cell);
    }
}

#[test]
fn coupling_marginal_matches_direct_simulation() {
    let env = srw(2, 12);
    let p = SpherePartition::new(2, 0.5).unwrap();
    let n = 4000;
    let opts = CouplingOptions {
        replicates: n,
        seed: 4,
        trajectories: false,
    };
    let y = [-2i64, 1];
    let c = basic_coupling(&env, &[0, 0], 4.0, &y, &[2, -1], &CouplingCells::Partition(p.clone()), 2.5, &opts).unwrap();
    let dom = LatticeDomain::closed_ball(10.0, &[0.0, 0.0]).unwrap();
    let mask = dom.interior_mask(env.bounds());
    let mut direct = vec![0usize; p.n_cells()];
    for s in 0..n as u64 {
        let t = run_walk(&env, &y, StopRule::ExitMask(&mask), 1000 + s, 1_000_000).unwrap();
        direct[p.cell_of(&direction(&t.end()))] += 1;
    }
    let coupled = c.y_cell_counts();
    for (k, (&a, &b)) in coupled.iter().zip(&direct).enumerate() {
        let (pa, pb) = (a as f64 / n as f64, b as f64 / n as f64);
        let pm = 0.5 * (pa + pb);
        let sd = (2.0 * pm * (1.0 - pm) / n as f64).sqrt().max(1e-3);
        assert!((pa - pb).abs() < 4.0 * sd, "cell {k}: {pa} vs {pb}");
    }
}

#[test]
fn conditioned_trajectories_exit_in_their_cells() {
    let law = make_law(&LawSpec::AxisChoice { dim: 2 }).unwrap();
    let env = sample_environment(&law, &LatticeBox::centered(2, 10).unwrap(), 8).unwrap();
    let p = SpherePartition::new(2, 0.5).unwrap();
    let opts = CouplingOptions {
        replicates: 50,
        seed: 2,
        trajectories: true,
    };
    let c = basic_coupling(&env, &[0, 0], 3.0, &[0, 0], &[2, 1], &CouplingCells::Partition(p.clone()), 3.0, &opts).unwrap();
    for r in &c.runs {
        assert_eq!(p.cell_of(&direction(&r.y_exit)), r.y_cell);
        assert_eq!(p.cell_of(&direction(&r.z_exit)), r.z_cell);
        let path = r.y_path.as_ref().unwrap();
        for w in path.windows(2) {
            let step: i64 = w[0].iter().zip(&w[1]).map(|(a, b)| (a - b).abs()).sum();
            assert_eq!(step, 1);
            let axis = (0..2).find(|&a| w[0][a] != w[1][a]).unwrap();
            assert!(env.weights_at(&w[0]).unwrap()[axis] > 0.0);
        }
    }
}

#[test]
fn deterministic_across_calls() {
    let env = srw(2, 12);
    let opts = CouplingOptions {
        replicates: 200,
        seed: 5,
        trajectories: false,
    };
    let run = || basic_coupling(&env, &[0, 0], 4.0, &[0, 0], &[1, 0], &CouplingCells::Sites, 2.0, &opts).unwrap();
    assert_eq!(run(), run());
}
