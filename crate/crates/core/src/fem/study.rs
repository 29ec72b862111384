use crate::error::{Error, Result};
use crate::geometry::ShapePair;
use crate::mesh::build_annular_mesh;
use crate::params::ProblemParams;

use super::{solve, SolveOptions};

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n_theta: usize,
    pub n_radial: usize,
    /// Longest mesh edge.
    pub h: f64,
    pub energy: f64,
    pub converged: bool,
    /// `|energy - reference|`; empty when there is nothing to compare with.
    pub error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub rows: Vec<ConvergenceRow>,
    /// `log(e_k / e_{k+1}) / log(h_k / h_{k+1})` between consecutive rows.
    pub observed_orders: Vec<f64>,
}

/// Solves on each `(n_theta, n_radial)` level. Errors are measured against
/// `reference` when given, otherwise against the finest level (whose own
/// error is then empty).
pub fn convergence_study(
    pair: &ShapePair,
    params: &ProblemParams,
    levels: &[(usize, usize)],
    reference: Option<f64>,
    options: &SolveOptions,
) -> Result<ConvergenceStudy> {
    if levels.is_empty() {
        return Err(Error::Domain("convergence study needs at least one level".into()));
    }
    let mut rows = Vec::with_capacity(levels.len());
    for &(n_theta, n_radial) in levels {
        let mesh = build_annular_mesh(pair, n_theta, n_radial)?;
        let h = mesh.max_edge_length();
        let sol = solve(&mesh, params, options)?;
        rows.push(ConvergenceRow {
            n_theta,
            n_radial,
            h,
            energy: sol.energy_total,
            converged: sol.converged,
            error: None,
        });
    }
    let (target, skip_last) = match reference {
        Some(r) => (Some(r), false),
        None if rows.len() > 1 => (rows.last().map(|r| r.energy), true),
        None => (None, true),
    };
    if let Some(target) = target {
        let n = rows.len() - usize::from(skip_last);
        for row in rows.iter_mut().take(n) {
            row.error = Some((row.energy - target).abs());
        }
    }
    let observed_orders = rows
        .windows(2)
        .filter_map(|w| match (w[0].error, w[1].error) {
            (Some(e0), Some(e1)) if e0 > 0.0 && e1 > 0.0 => Some((e0 / e1).ln() / (w[0].h / w[1].h).ln()),
            _ => None,
        })
        .collect();
    Ok(ConvergenceStudy { rows, observed_orders })
}
