//! Batch drivers behind the `robin-pcap` binary. Each command returns a plain
//! report; rendering to text and CSV is kept separate so tests can inspect
//! the numbers directly.

pub mod campaign;
pub mod config;
pub mod csv;
pub mod hscan;

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::fem::{self, coincident_pair_energy, robin_identity_check, FemSolution, SolveOptions};
use crate::mesh::build_annular_mesh;
use crate::params::ProblemParams;
use crate::radial::{self, BallEnergyCurve, Regime, RegimeReport};

pub use campaign::{cmd_verify, CampaignRecord, CampaignReport, CampaignSettings};
pub use config::PairConfig;
pub use csv::{fmt_f64, CsvTable};
pub use hscan::{cmd_hscan, HScanReport, PhiMode};

pub fn cmd_regimes(params: &ProblemParams) -> Result<RegimeReport> {
    radial::regime_classify(params)
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub fn regimes_csv(report: &RegimeReport) -> String {
    let mut t = CsvTable::new(&[
        "n",
        "p",
        "beta",
        "regime",
        "alpha",
        "beta1",
        "beta2",
        "critical_radius",
        "limit_at_infinity",
        "unit_pair_optimal",
    ]);
    let p = &report.params;
    t.row(&[
        p.n().to_string(),
        fmt_f64(p.p()),
        fmt_f64(p.beta()),
        report.regime.name().to_string(),
        fmt_f64(report.alpha),
        fmt_f64(report.beta1),
        fmt_f64(report.beta2),
        opt(report.critical_radius),
        fmt_f64(report.limit_at_infinity),
        (report.regime == Regime::MinAtOne).to_string(),
    ]);
    t.finish("ok")
}

pub fn regimes_summary(report: &RegimeReport) -> String {
    let p = &report.params;
    let mut s = String::new();
    let _ = writeln!(s, "n = {}, p = {}, beta = {}", p.n(), p.p(), p.beta());
    let _ = writeln!(s, "regime            {}", report.regime);
    let _ = writeln!(s, "alpha             {:.6}", report.alpha);
    let _ = writeln!(s, "beta1             {:.6}", report.beta1);
    let _ = writeln!(s, "beta2             {:.6}", report.beta2);
    match report.critical_radius {
        Some(r) => {
            let _ = writeln!(s, "critical radius   {r:.10}");
        }
        None => {
            let _ = writeln!(s, "critical radius   -");
        }
    }
    let _ = writeln!(s, "E(B_1, B_inf)     {:.6}", report.limit_at_infinity);
    let _ = writeln!(s, "E(B_1, B_1)       {:.6}", p.sphere_area() * p.beta());
    if report.regime == Regime::MinAtOne {
        let _ = writeln!(s, "the minimum is always given by the pair (B_1,B_1)");
    }
    s
}

pub fn cmd_curve(params: &ProblemParams, betas: &[f64], r_min: f64, r_max: f64, samples: usize) -> Result<Vec<BallEnergyCurve>> {
    if betas.is_empty() {
        return Err(Error::InvalidParams("empty beta list".into()));
    }
    betas
        .iter()
        .map(|&b| BallEnergyCurve::uniform(&params.with_beta(b)?, r_min, r_max, samples))
        .collect()
}

pub fn curve_csv(curves: &[BallEnergyCurve]) -> String {
    let mut t = CsvTable::new(&["beta", "r", "energy"]);
    for c in curves {
        let beta = fmt_f64(c.params.beta());
        for (r, e) in c.radii.iter().zip(&c.energies) {
            t.row(&[beta.clone(), fmt_f64(*r), fmt_f64(*e)]);
        }
    }
    t.finish("ok")
}

/// Outcome of a single-instance solve. A pair with `K = Ω` has no annulus to
/// mesh and carries no solution.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub energy_total: f64,
    pub energy_gradient_part: f64,
    pub energy_boundary_part: f64,
    pub robin_flux: f64,
    pub robin_gap: f64,
    pub converged: bool,
    pub solution: Option<FemSolution>,
}

pub fn cmd_solve(config: &PairConfig, options: &SolveOptions) -> Result<SolveReport> {
    let params = &config.params;
    if config.pair.is_degenerate() {
        let e = coincident_pair_energy(&config.pair, params)?;
        return Ok(SolveReport {
            energy_total: e,
            energy_gradient_part: 0.0,
            energy_boundary_part: e,
            robin_flux: e,
            robin_gap: 0.0,
            converged: true,
            solution: None,
        });
    }
    let mesh = build_annular_mesh(&config.pair, config.n_theta, config.n_radial)?;
    let solution = fem::solve(&mesh, params, options)?;
    let robin = robin_identity_check(&solution);
    Ok(SolveReport {
        energy_total: solution.energy_total,
        energy_gradient_part: solution.energy_gradient_part,
        energy_boundary_part: solution.energy_boundary_part,
        robin_flux: solution.robin_flux,
        robin_gap: robin.relative_gap(),
        converged: solution.converged,
        solution: Some(solution),
    })
}

impl SolveReport {
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "energy            {:.10}", self.energy_total);
        let _ = writeln!(s, "  gradient part   {:.10}", self.energy_gradient_part);
        let _ = writeln!(s, "  boundary part   {:.10}", self.energy_boundary_part);
        let _ = writeln!(s, "robin flux        {:.10}", self.robin_flux);
        let _ = writeln!(s, "robin gap         {:.3e}", self.robin_gap);
        match &self.solution {
            Some(sol) => {
                let m = &sol.mesh;
                let _ = writeln!(
                    s,
                    "mesh              {}x{}, {} nodes, {} triangles, h = {:.4e}",
                    m.n_theta,
                    m.n_radial,
                    m.node_count(),
                    m.triangles.len(),
                    m.max_edge_length()
                );
                let _ = writeln!(
                    s,
                    "solver            {} iterations, |g| = {:.3e}, eps = {:.1e}, converged = {}",
                    sol.iterations, sol.final_gradient_norm, sol.epsilon_final, sol.converged
                );
            }
            None => {
                let _ = writeln!(s, "mesh              none (K = Omega)");
            }
        }
        s
    }

    /// Nodal values as `x,y,u`.
    pub fn field_csv(&self) -> String {
        let mut t = CsvTable::new(&["x", "y", "u"]);
        if let Some(sol) = &self.solution {
            for (x, u) in sol.mesh.nodes.iter().zip(&sol.values) {
                t.row(&[fmt_f64(x[0]), fmt_f64(x[1]), fmt_f64(*u)]);
            }
        }
        t.note("energy", &fmt_f64(self.energy_total));
        t.note("robin_gap", &fmt_f64(self.robin_gap));
        t.finish(if self.converged { "ok" } else { "not_converged" })
    }
}
