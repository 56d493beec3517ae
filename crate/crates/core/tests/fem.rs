mod common;

use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use supg_recovery::fem::{self, assemble_supg, norm_energy, solve, DeltaRule, P1Function, ProblemSpec};
use supg_recovery::problems::{example1, example2, exact_errors, manufactured_smooth};

#[test]
fn example1_unit_eps_matches_hand_assembled_oracle() {
    let prob = example1(1.0).unwrap();
    for mesh in [prob.initial_mesh().unwrap(), prob.initial_mesh().unwrap().uniform_refine().unwrap()] {
        for c in [0.0, 1.0, 4.0] {
            let u_h = solve(&mesh, &prob.spec, DeltaRule::new(c)).unwrap();
            let oracle = common::supg_oracle(&mesh, &prob.spec, DeltaRule::new(c));
            for (a, b) in u_h.values().iter().zip(&oracle) {
                assert!((a - b).abs() < 1e-8, "{a} vs {b}");
            }
        }
    }
}

#[test]
fn stabilization_is_a_small_perturbation_for_unit_eps() {
    let prob = example1(1.0).unwrap();
    let mesh = prob.initial_mesh().unwrap().uniform_refine().unwrap().uniform_refine().unwrap();
    let galerkin = solve(&mesh, &prob.spec, DeltaRule::galerkin()).unwrap();
    let supg = solve(&mesh, &prob.spec, DeltaRule::new(1.0)).unwrap();
    let diff = galerkin.values().iter().zip(supg.values()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(diff < 1e-2, "max nodal difference {diff}");
}

#[test]
fn example2_overshoot_is_reported_and_bounded() {
    let prob = example2(1e-3).unwrap();
    let mut mesh = prob.initial_mesh().unwrap();
    for _ in 0..3 {
        mesh = mesh.uniform_refine().unwrap();
    }
    let u_h = solve(&mesh, &prob.spec, DeltaRule::new(16.0)).unwrap();
    let lo = u_h.values().iter().copied().fold(f64::INFINITY, f64::min);
    let hi = u_h.values().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let overshoot = (-lo).max(hi - 100.0).max(0.0);
    println!("example2 overshoot on a uniform 512-element mesh: {overshoot:.4}");
    assert!(overshoot.is_finite() && overshoot < 100.0);
}

#[test]
fn galerkin_orthogonality_of_the_solve() {
    let prob = example1(1e-3).unwrap();
    let mesh = prob.initial_mesh().unwrap().uniform_refine().unwrap().uniform_refine().unwrap();
    let sys = assemble_supg(&mesh, &prob.spec, DeltaRule::new(4.0)).unwrap();
    let u_h = fem::solve_system(&mesh, &sys).unwrap();
    let reduced: Vec<f64> = (0..mesh.n_vertices()).filter_map(|v| sys.unknown[v].map(|_| u_h.values()[v])).collect();
    let ax = sys.matrix.mul_vec(&reduced);
    let norm = sys.rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
    for (a, b) in ax.iter().zip(&sys.rhs) {
        assert!((a - b).abs() <= 1e-8 * norm);
    }
}

#[test]
fn dirichlet_nodes_carry_boundary_data() {
    let prob = example2(1e-2).unwrap();
    let mesh = prob.initial_mesh().unwrap().uniform_refine().unwrap();
    let sys = assemble_supg(&mesh, &prob.spec, DeltaRule::new(16.0)).unwrap();
    let u_h = fem::solve_system(&mesh, &sys).unwrap();
    for v in 0..mesh.n_vertices() {
        if let Some(d) = sys.dirichlet.values[v] {
            assert_eq!(u_h.values()[v], d);
        }
    }
    assert_eq!(sys.dirichlet.corner_conflicts.len(), 2);
}

#[test]
fn delta_constraint_recorded() {
    let prob = example2(1e-3).unwrap();
    let mesh = prob.initial_mesh().unwrap();
    for c in [1.0, 4.0, 16.0] {
        let sys = assemble_supg(&mesh, &prob.spec, DeltaRule::new(c)).unwrap();
        let a_norm = 5f64.sqrt();
        assert!((sys.delta_ratio - c * a_norm).abs() < 1e-12);
        assert!(sys.delta_ratio <= 16.0 * a_norm + 1e-12);
    }
}

#[test]
fn energy_error_first_order_in_h() {
    let prob = manufactured_smooth();
    let mut mesh = prob.initial_mesh().unwrap().uniform_refine().unwrap().uniform_refine().unwrap();
    let (mut hs, mut errs) = (Vec::new(), Vec::new());
    for _ in 0..4 {
        let u_h = solve(&mesh, &prob.spec, DeltaRule::new(1.0)).unwrap();
        hs.push(mesh.h_max());
        errs.push(exact_errors(&u_h, &prob.spec, DeltaRule::new(1.0)).unwrap().energy);
        mesh = mesh.uniform_refine().unwrap();
    }
    let order = common::loglog_slope(&hs, &errs);
    assert!((order - 1.0).abs() <= 0.15, "observed order {order}");
}

#[test]
fn energy_norm_of_zero_and_coordinate() {
    let prob = ProblemSpec::new(1.0).with_constant_coefficients([0.0, 0.0], 1.0, 1.0, 1.0);
    let mesh = example1(1.0).unwrap().initial_mesh().unwrap();
    assert_eq!(norm_energy(&P1Function::zero(&mesh), &prob).unwrap(), 0.0);
    let x = P1Function::interpolate(&mesh, |p| p[0]);
    assert!((norm_energy(&x, &prob).unwrap() - (4.0f64 / 3.0).sqrt()).abs() < 1e-13);
}

#[test]
fn gradient_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mesh = example1(1.0).unwrap().initial_mesh().unwrap().uniform_refine().unwrap();
    let u = P1Function::new(&mesh, common::random_values(&mut rng, mesh.n_vertices())).unwrap();
    let hstep = 1e-6;
    for t in 0..mesh.n_triangles() {
        let c = mesh.centroid(t);
        let g = u.gradient(t);
        let dx = (u.eval(t, [c[0] + hstep, c[1]]) - u.eval(t, [c[0] - hstep, c[1]])) / (2.0 * hstep);
        let dy = (u.eval(t, [c[0], c[1] + hstep]) - u.eval(t, [c[0], c[1] - hstep])) / (2.0 * hstep);
        assert!((g[0] - dx).abs() < 1e-9 && (g[1] - dy).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn solution_is_linear_in_the_data(s in -5.0f64..5.0, eps in 1e-4f64..1.0) {
        let base = example1(eps).unwrap();
        let mut scaled = base.spec.clone();
        let f = base.spec.source.clone();
        scaled.source = Arc::new(move |x| s * f(x));
        let mesh = base.initial_mesh().unwrap().uniform_refine().unwrap();
        let u = solve(&mesh, &base.spec, DeltaRule::new(4.0)).unwrap();
        let us = solve(&mesh, &scaled, DeltaRule::new(4.0)).unwrap();
        let scale = u.values().iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (a, b) in u.values().iter().zip(us.values()) {
            prop_assert!((s * a - b).abs() <= 1e-8 * scale * s.abs().max(1.0));
        }
    }

    #[test]
    fn p1_evaluation_is_barycentric_interpolation(seed in any::<u64>(), l1 in 0.0f64..1.0, l2 in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mesh = example1(1.0).unwrap().initial_mesh().unwrap();
        let u = P1Function::new(&mesh, common::random_values(&mut rng, mesh.n_vertices())).unwrap();
        let (l1, l2) = if l1 + l2 > 1.0 { (1.0 - l1, 1.0 - l2) } else { (l1, l2) };
        let bary = [1.0 - l1 - l2, l1, l2];
        for t in 0..mesh.n_triangles() {
            let tri = mesh.triangle(t);
            let want: f64 = (0..3).map(|k| bary[k] * u.values()[tri[k]]).sum();
            prop_assert!((u.eval(t, mesh.map_point(t, bary)) - want).abs() < 1e-13);
        }
    }
}
