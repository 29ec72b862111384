use robin_pcap::fem::{solve, FemSolution, SolveOptions};
use robin_pcap::geometry::{validate_pair, ShapePair, StarShape};
use robin_pcap::hfunction::{
    centroid_drift, derearranged_phi, h_scan, lemma2_search, radial_ratio_distribution, superlevel_distribution,
    weighted_h_integral, PhiField, SuperlevelAreaTable, r_of_t,
};
use robin_pcap::mesh::build_annular_mesh;
use robin_pcap::radial::{ball_lower_bound, level_radius};
use robin_pcap::ProblemParams;

fn solved(pair: &ShapePair, params: &ProblemParams, n_theta: usize, n_radial: usize) -> FemSolution {
    let mesh = build_annular_mesh(pair, n_theta, n_radial).unwrap();
    let sol = solve(&mesh, params, &SolveOptions::default()).unwrap();
    assert!(sol.converged);
    sol
}

fn concentric() -> ShapePair {
    validate_pair(
        StarShape::circle([0.0, 0.0], 1.0).unwrap(),
        StarShape::circle([0.0, 0.0], 2.0).unwrap(),
    )
    .unwrap()
}

fn perturbed() -> ShapePair {
    validate_pair(
        StarShape::new([0.0, 0.0], 1.0, vec![0.0, 0.08], vec![0.0, 0.0, 0.05]).unwrap(),
        StarShape::new([0.1, 0.05], 2.0, vec![0.0, 0.0, 0.1], vec![]).unwrap(),
    )
    .unwrap()
}

#[test]
fn solution_ratio_scan_is_flat_at_energy() {
    let params = ProblemParams::new(2, 2.0, 1.0).unwrap();
    for pair in [concentric(), perturbed()] {
        let sol = solved(&pair, &params, 256, 32);
        let phi = PhiField::solution_ratio(&sol);
        let scan = h_scan(&sol, &phi, &params).unwrap();
        assert_eq!(scan.len(), 200);
        // Skip the levels next to u = 1 and to the outer boundary, where a
        // level curve crosses only a layer of elements.
        for e in &scan[5..195] {
            let rel = (e.h_value - sol.energy_total) / sol.energy_total;
            assert!(rel.abs() < 0.02, "t = {}: rel {rel:e}", e.t);
        }
    }
}

#[test]
fn constant_field_has_a_level_below_energy() {
    for p in [1.5, 2.0, 3.0] {
        let params = ProblemParams::new(2, p, 1.0).unwrap();
        let sol = solved(&perturbed(), &params, 128, 16);
        for c in [params.beta_root(), 0.5 * params.beta_root()] {
            let phi = PhiField::constant(c, sol.mesh.triangles.len());
            let (_, h) = lemma2_search(&sol, &params, &phi).unwrap();
            assert!(h <= sol.energy_total * (1.0 + 2e-2), "p = {p}, c = {c}");
        }
    }
}

#[test]
fn weighted_integral_signs_on_solution() {
    let params = ProblemParams::new(2, 2.0, 1.0).unwrap();
    let sol = solved(&concentric(), &params, 256, 32);
    let phi = PhiField::solution_ratio(&sol);
    let exact = weighted_h_integral(&sol, &params, &phi).unwrap();
    assert!(exact.abs() < 1e-2 * sol.energy_total, "{exact:e}");
    let over = weighted_h_integral(&sol, &params, &phi.scaled(1.1)).unwrap();
    assert!(over < 0.0);
}

#[test]
fn derearranged_field_on_concentric_pair_is_the_solution_ratio() {
    let params = ProblemParams::new(2, 2.0, 2.0).unwrap();
    let sol = solved(&concentric(), &params, 256, 32);
    let bound = ball_lower_bound(&params, 4.0 * std::f64::consts::PI).unwrap();
    assert!((bound.radius - 2.0).abs() < 1e-12);
    let de = derearranged_phi(&sol, &params, bound.radius).unwrap();
    assert!(de.hypothesis_holds);
    let ratio = PhiField::solution_ratio(&sol);
    let mut worst: f64 = 0.0;
    for (a, b) in de.phi.per_triangle.iter().zip(&ratio.per_triangle) {
        worst = worst.max((a - b).abs() / b.abs().max(1e-12));
    }
    assert!(worst < 0.03, "worst relative mismatch {worst:e}");
}

#[test]
fn derearranged_field_is_equimeasurable() {
    let params = ProblemParams::new(2, 2.0, 2.0).unwrap();
    let sol = solved(&perturbed(), &params, 256, 32);
    let radius = ball_lower_bound(&params, 4.0 * std::f64::consts::PI).unwrap().radius;
    let de = derearranged_phi(&sol, &params, radius).unwrap();
    let table = SuperlevelAreaTable::new(&sol).unwrap();
    let b = params.beta_root();
    let thresholds: Vec<f64> = (1..10).map(|k| b * k as f64 / 10.0).collect();
    for t in [0.3, 0.5, 0.7] {
        let r = r_of_t(table.area(t), 2).unwrap().clamp(1.0, radius);
        let ours = superlevel_distribution(&sol, &de.phi, t, &thresholds).unwrap();
        let reference = radial_ratio_distribution(&params, radius, r, &thresholds).unwrap();
        let scale = reference.iter().copied().fold(0.0, f64::max).max(1e-12);
        for (a, e) in ours.iter().zip(&reference) {
            assert!((a - e).abs() <= 0.03 * scale, "t = {t}: {a} vs {e}");
        }
    }
}

#[test]
fn derearranged_scan_stays_above_ball_bound() {
    let params = ProblemParams::new(2, 2.0, 2.0).unwrap();
    let sol = solved(&perturbed(), &params, 256, 32);
    let bound = ball_lower_bound(&params, 4.0 * std::f64::consts::PI).unwrap();
    let de = derearranged_phi(&sol, &params, bound.radius).unwrap();
    for e in h_scan(&sol, &de.phi, &params).unwrap() {
        assert!(e.h_value >= bound.energy * 0.98, "t = {}: {}", e.t, e.h_value);
    }
}

#[test]
fn centroid_drift_detects_asymmetry() {
    let params = ProblemParams::new(2, 2.0, 1.0).unwrap();
    let centered = centroid_drift(&solved(&concentric(), &params, 128, 16)).unwrap();
    let shifted_pair = validate_pair(
        StarShape::circle([0.0, 0.0], 1.0).unwrap(),
        StarShape::circle([0.5, 0.0], 2.0).unwrap(),
    )
    .unwrap();
    let shifted = centroid_drift(&solved(&shifted_pair, &params, 128, 16)).unwrap();
    assert!(centered < 1e-10, "{centered:e}");
    assert!(shifted > 1e-2, "{shifted:e}");
}

#[test]
fn superlevel_areas_follow_radial_levels() {
    let params = ProblemParams::new(2, 2.0, 1.0).unwrap();
    let sol = solved(&concentric(), &params, 256, 32);
    let table = SuperlevelAreaTable::new(&sol).unwrap();
    for t in [0.5, 0.6, 0.8, 0.95] {
        let r = level_radius(&params, 2.0, t).unwrap();
        let exact = std::f64::consts::PI * r * r;
        assert!((table.area(t) - exact).abs() < 2e-3 * exact, "t = {t}");
    }
}
