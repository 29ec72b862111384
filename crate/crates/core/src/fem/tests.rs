use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::geometry::{validate_pair, StarShape};
use crate::mesh::build_annular_mesh;

fn concentric_mesh(radius: f64, n_theta: usize, n_radial: usize) -> AnnularMesh {
    let pair = validate_pair(
        StarShape::circle([0.0, 0.0], 1.0).unwrap(),
        StarShape::circle([0.0, 0.0], radius).unwrap(),
    )
    .unwrap();
    build_annular_mesh(&pair, n_theta, n_radial).unwrap()
}

fn pp(p: f64, beta: f64) -> ProblemParams {
    ProblemParams::new(2, p, beta).unwrap()
}

#[test]
fn constant_field_energy() {
    let mesh = concentric_mesh(2.0, 64, 8);
    let ones = vec![1.0; mesh.node_count()];
    let params = pp(2.0, 1.5);
    let e = discrete_energy(&mesh, &ones, &params, 0.0).unwrap();
    assert!((e - 1.5 * mesh.outer_perimeter()).abs() < 1e-12 * e);
    let e = discrete_energy(&mesh, &ones, &params, 0.1).unwrap();
    let expected = 1.5 * mesh.outer_perimeter() + 0.01 * mesh.meshed_area();
    assert!((e - expected).abs() < 1e-12 * e);
}

#[test]
fn size_mismatch_rejected() {
    let mesh = concentric_mesh(2.0, 32, 2);
    assert!(matches!(
        discrete_energy(&mesh, &[1.0; 3], &pp(2.0, 1.0), 0.0),
        Err(Error::SizeMismatch { .. })
    ));
}

#[test]
fn constant_field_gradient_signs() {
    let mesh = concentric_mesh(2.0, 64, 4);
    let ones = vec![1.0; mesh.node_count()];
    let g = discrete_gradient(&mesh, &ones, &pp(2.5, 1.0), 0.0).unwrap();
    for i in 0..mesh.node_count() {
        let level = mesh.level_of(i);
        if level == mesh.n_radial {
            assert!(g[i] > 0.0);
        } else {
            assert!(g[i].abs() < 1e-14, "node {i}: {}", g[i]);
        }
    }
}

#[test]
fn gradient_matches_central_differences() {
    let pair = validate_pair(
        StarShape::new([0.0, 0.0], 1.0, vec![0.0, 0.1], vec![0.05]).unwrap(),
        StarShape::new([0.1, 0.0], 2.0, vec![0.1], vec![0.0, 0.0, 0.1]).unwrap(),
    )
    .unwrap();
    let mesh = build_annular_mesh(&pair, 24, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for state in 0..20 {
        let p = [1.5, 2.0, 3.0, 4.5][state % 4];
        let eps = [0.0, 1e-2][state % 2];
        let params = pp(p, rng.gen_range(0.3..3.0));
        let mut v: Vec<f64> = (0..mesh.node_count()).map(|_| rng.gen_range(0.1..1.0)).collect();
        for &i in &mesh.inner_nodes {
            v[i] = 1.0;
        }
        let g = discrete_gradient(&mesh, &v, &params, eps).unwrap();
        let h = 1e-6;
        for _ in 0..10 {
            let i = rng.gen_range(mesh.n_theta..mesh.node_count());
            let mut plus = v.clone();
            let mut minus = v.clone();
            plus[i] += h;
            minus[i] -= h;
            let fd = (discrete_energy(&mesh, &plus, &params, eps).unwrap()
                - discrete_energy(&mesh, &minus, &params, eps).unwrap())
                / (2.0 * h);
            assert!(
                (fd - g[i]).abs() <= 1e-6 * g[i].abs().max(1e-3),
                "state {state} node {i}: fd {fd} vs {}",
                g[i]
            );
        }
    }
}

#[test]
fn radial_interpolant_energy_close_to_closed_form() {
    let params = pp(2.0, 1.0);
    let mesh = concentric_mesh(2.0, 256, 32);
    let u = radial_interpolant(&mesh, &params, 2.0).unwrap();
    let e = discrete_energy(&mesh, &u, &params, 0.0).unwrap();
    let exact = 2.0 * PI / (0.5 + 2f64.ln());
    assert!((exact - 5.2661).abs() < 1e-4);
    assert!((e - exact).abs() < 0.01 * exact, "{e} vs {exact}");
}

#[test]
fn solve_concentric_moderate_mesh() {
    let params = pp(2.0, 1.0);
    let mesh = concentric_mesh(2.0, 96, 12);
    let options = SolveOptions {
        record_trace: true,
        ..SolveOptions::default()
    };
    let sol = solve(&mesh, &params, &options).unwrap();
    assert!(sol.converged, "gradient {}", sol.final_gradient_norm);
    let exact = radial::ball_energy(&params, 2.0).unwrap();
    assert!((sol.energy_total - exact).abs() < 0.02 * exact);
    assert!((sol.energy_total - sol.energy_gradient_part - sol.energy_boundary_part).abs() < 1e-14 * exact);
    for &i in &mesh.inner_nodes {
        assert_eq!(sol.values[i], 1.0);
    }
    assert!(sol.values.iter().all(|v| (0.0..=1.0).contains(v)));
    assert!(sol.unclamped_range.1 <= 1.0 + 1e-12);
    assert!(sol.unclamped_range.0 >= sol.min_outer_value() - 1e-12);
    for stage in &sol.energy_trace {
        for w in stage.windows(2) {
            assert!(w[1] <= w[0] + ENERGY_ROUNDOFF_SLACK * w[0].abs());
        }
    }
    let id = robin_identity_check(&sol);
    assert!(id.relative_gap() < 0.02);
}

#[test]
fn energy_nondecreasing_in_beta() {
    let mesh = concentric_mesh(2.0, 64, 8);
    let mut last = 0.0;
    for beta in [0.5, 1.0, 2.0] {
        let sol = solve(&mesh, &pp(2.0, beta), &SolveOptions::default()).unwrap();
        assert!(sol.energy_total >= last);
        last = sol.energy_total;
    }
}

#[test]
fn rejects_bad_schedule() {
    let mesh = concentric_mesh(2.0, 32, 2);
    let options = SolveOptions {
        epsilon_schedule: vec![1e-4, 1e-2],
        ..SolveOptions::default()
    };
    assert!(solve(&mesh, &pp(2.0, 1.0), &options).is_err());
}

#[test]
fn coincident_pair() {
    let unit = StarShape::new([0.0, 0.0], 1.0, vec![0.0, 0.1], vec![]).unwrap();
    let pair = validate_pair(unit.clone(), unit.clone()).unwrap();
    let e = coincident_pair_energy(&pair, &pp(2.0, 3.0)).unwrap();
    assert_eq!(e, 3.0 * unit.perimeter());
}

#[test]
fn convergence_study_single_level_has_no_error() {
    let pair = validate_pair(
        StarShape::circle([0.0, 0.0], 1.0).unwrap(),
        StarShape::circle([0.0, 0.0], 2.0).unwrap(),
    )
    .unwrap();
    let study = convergence_study(&pair, &pp(2.0, 1.0), &[(32, 4)], None, &SolveOptions::default()).unwrap();
    assert_eq!(study.rows.len(), 1);
    assert!(study.rows[0].error.is_none());
    assert!(study.observed_orders.is_empty());
}
