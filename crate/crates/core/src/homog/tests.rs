use super::*;
use crate::dirichlet::{apply_generator, SolveOptions};
use crate::env::{make_law, sample_environment, Environment, LawSpec};
use crate::lattice::LatticeBox;

fn axis_choice(half: i64, seed: u64) -> Environment {
    let law = make_law(&LawSpec::AxisChoice { dim: 2 }).unwrap();
    sample_environment(&law, &LatticeBox::centered(2, half).unwrap(), seed).unwrap()
}

#[test]
fn linear_reference_is_reproduced() {
    let env = axis_choice(20, 5);
    let f = SigmaHarmonicFunction::new(&[0.5, 0.5], PolyKind::Linear(vec![1.0, -2.0])).unwrap();
    let res = homogenization_error(&env, &f, 16.0, SolveOptions::default()).unwrap();
    assert!(res.error <= 1e-8, "{res:?}");
}

#[test]
fn srw_reference_error_is_rounding_level() {
    let f = SigmaHarmonicFunction::new(&[0.5, 0.5], PolyKind::Quad(0, 1)).unwrap();
    for r in [8.0, 16.0, 32.0] {
        let env = Environment::constant(LatticeBox::centered(2, 40).unwrap(), &[0.25, 0.25], "srw");
        let e = homogenization_error(&env, &f, r, SolveOptions::default()).unwrap().error;
        // second differences are exact on polynomials of degree ≤ 3, so only rounding remains
        assert!(e < 1e-8, "R={r}: {e}");
    }
    let cubic = SigmaHarmonicFunction::new(&[0.5, 0.5], PolyKind::parse("custom:3,0=1;1,2=-3").unwrap()).unwrap();
    let env = Environment::constant(LatticeBox::centered(2, 40).unwrap(), &[0.25, 0.25], "srw");
    assert!(homogenization_error(&env, &cubic, 16.0, SolveOptions::default()).unwrap().error < 1e-8);
}

#[test]
fn rescaled_quadratic_is_flat() {
    let env = axis_choice(40, 11);
    let f = SigmaHarmonicFunction::new(&[0.5, 0.5], PolyKind::Quad(0, 1)).unwrap();
    let r = 24.0;
    let bound = f.delta2 / (r * r) + 4.0 * f.delta3 / (r * r * r);
    for x in LatticeBox::centered(2, 20).unwrap().iter_coords() {
        let v = apply_generator(&env, |y| Some(f.eval_scaled(y, r)), &x).unwrap();
        assert!(v.abs() <= bound + 1e-15);
    }
}

#[test]
fn one_dimensional_exit_law_is_exact() {
    let env = Environment::constant(LatticeBox::centered(1, 20).unwrap(), &[0.5], "srw");
    let right = CellSet::HalfSpace { normal: vec![1.0] };
    let res = exit_law_discrepancy(&env, &[1.0], 10.0, 0.0, &ExitTargetSet::Single(right), &WosOptions::default()).unwrap();
    assert!((res.rows[0].quenched - 0.5).abs() < 1e-12);
    assert_eq!(res.rows[0].continuum, 0.5);
    assert!(res.max_discrepancy < 1e-12);
    let sweep = exit_law_discrepancy(
        &env,
        &[1.0],
        10.0,
        0.5,
        &ExitTargetSet::Partition(SpherePartition::new(1, 1.0).unwrap()),
        &WosOptions::default(),
    )
    .unwrap();
    // B_10 has boundary {-9, 9}: gambler's ruin gives (9 + x)/18 against (1 + x/10)/2
    let want = (-4..=4)
        .map(|x| ((9.0 + x as f64) / 18.0 - (1.0 + x as f64 / 10.0) / 2.0).abs())
        .fold(0.0, f64::max);
    assert!((sweep.max_discrepancy - want).abs() < 1e-12, "{sweep:?}");
    assert_eq!(sweep.n_sources, 9);
}

#[test]
fn whole_sphere_discrepancy_vanishes() {
    let env = axis_choice(12, 1);
    let res = exit_law_discrepancy(
        &env,
        &[0.5, 0.5],
        8.0,
        0.3,
        &ExitTargetSet::Single(CellSet::Whole),
        &WosOptions::default(),
    )
    .unwrap();
    assert!(res.max_discrepancy < 1e-10);
}

#[test]
fn partition_tables_sum_to_one() {
    let env = axis_choice(12, 2);
    let wos = WosOptions { replicates: 2000, ..Default::default() };
    let res = exit_law_discrepancy(
        &env,
        &[0.5, 0.5],
        8.0,
        0.0,
        &ExitTargetSet::Partition(SpherePartition::new(2, 0.8).unwrap()),
        &wos,
    )
    .unwrap();
    assert!(res.quenched_sum_error < 1e-10);
    assert!(res.continuum_sum_error < 1e-12);
    assert_eq!(res.rows.len(), 12);
}
