use rwre::dirichlet::{solve_dirichlet, LatticeDomain, SolveOptions};
use rwre::env::Environment;
use rwre::homog::{bm_exit_probability, CellSet, WosOptions};
use rwre::LatticeBox;

/// Finite-difference harmonic measure on the isotropic image of the unit
/// ball: the ellipse `y₁² + y₂²/4 < 1` discretized with spacing `1/m`, where
/// the 5-point Laplacian is the simple random walk generator.
fn fd_quarter_arc(m: i64) -> f64 {
    let bbox = LatticeBox::new(vec![-m, -2 * m], vec![m, 2 * m]).unwrap();
    let mf = m as f64;
    let member: Vec<bool> = bbox
        .iter_coords()
        .map(|p| {
            let (a, b) = (p[0] as f64 / mf, p[1] as f64 / mf);
            a * a + b * b / 4.0 < 1.0
        })
        .collect();
    let dom = LatticeDomain::from_closure(bbox.clone(), &member).unwrap();
    let env = Environment::constant(bbox, &[0.25, 0.25], "srw");
    // back in the original frame x = (a, b/2); the cap is x₁ ≥ |x₂|
    let g: Vec<f64> = dom
        .boundary_sites()
        .iter()
        .map(|p| f64::from(u8::from(2 * p[0] >= p[1].abs())))
        .collect();
    let sol = solve_dirichlet(&env, &dom, &g, SolveOptions::default()).unwrap();
    sol.value(&dom, &[0, 0]).unwrap()
}

#[test]
fn anisotropic_quarter_arc_matches_finite_differences() {
    let oracle = fd_quarter_arc(40);
    let coarse = fd_quarter_arc(20);
    let cap = CellSet::Cap {
        center: vec![1.0, 0.0],
        angle: std::f64::consts::FRAC_PI_4,
    };
    let opts = WosOptions {
        replicates: 40_000,
        seed: 17,
        ..Default::default()
    };
    let wos = bm_exit_probability(&[1.0, 0.25], &cap, &[0.0, 0.0], &opts).unwrap();
    // discretization bound: twice the change from halving the mesh, at least 0.02
    let disc = (2.0 * (oracle - coarse).abs()).max(0.02);
    assert!(
        (wos.p - oracle).abs() <= 3.0 * wos.stderr + disc,
        "wos {} ± {} vs fd {oracle} (coarse {coarse})",
        wos.p,
        wos.stderr
    );
}
