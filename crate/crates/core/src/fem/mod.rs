//! P1 minimization of `J(v) = ∫ |∇v|^p + β ∮_{∂Ω} |v|^p` over the annulus,
//! with `v = 1` imposed on the inner boundary by elimination.
//!
//! The p-Dirichlet term is regularized as `(|∇v|^2 + ε^2)^(p/2)` and `ε` is
//! driven to zero through a continuation schedule; reported energies are
//! always evaluated at `ε = 0`.

mod assembly;
mod descent;
mod study;

pub use assembly::{EnergyParts, P1Assembler};
pub use study::{convergence_study, ConvergenceRow, ConvergenceStudy};

use log::{debug, warn};

use crate::error::{Error, Result};
use crate::geometry::ShapePair;
use crate::mesh::AnnularMesh;
use crate::params::ProblemParams;
use crate::radial;
use descent::{minimize, DescentSettings};

pub(crate) use assembly::CompensatedSum;
pub use descent::ROUNDOFF_SLACK as ENERGY_ROUNDOFF_SLACK;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub epsilon_schedule: Vec<f64>,
    /// Stop once the free gradient norm falls below this fraction of its
    /// value at the initial guess.
    pub gradient_tolerance: f64,
    pub max_iterations: usize,
    pub quadrature_order_boundary: usize,
    /// Curvature pairs kept by the descent; zero means plain two-point steps.
    pub history: usize,
    /// Keep the accepted energies of every stage in the solution.
    pub record_trace: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            epsilon_schedule: vec![1e-2, 1e-4, 1e-6, 1e-8],
            gradient_tolerance: 1e-10,
            max_iterations: 5000,
            quadrature_order_boundary: 4,
            history: 8,
            record_trace: false,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if self.epsilon_schedule.is_empty()
            || self.epsilon_schedule.iter().any(|e| !(e.is_finite() && *e > 0.0))
            || self.epsilon_schedule.windows(2).any(|w| w[1] >= w[0])
        {
            return Err(Error::Domain(
                "epsilon schedule must be non-empty, positive and strictly decreasing".into(),
            ));
        }
        if !(self.gradient_tolerance > 0.0) || self.max_iterations == 0 || self.quadrature_order_boundary == 0 {
            return Err(Error::Domain("invalid solver tolerances".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FemSolution {
    pub mesh: AnnularMesh,
    pub params: ProblemParams,
    pub values: Vec<f64>,
    pub energy_total: f64,
    /// `∫ |∇u|^p`.
    pub energy_gradient_part: f64,
    /// `β ∮ u^p`.
    pub energy_boundary_part: f64,
    /// `β ∮ u^(p-1)`.
    pub robin_flux: f64,
    pub iterations: usize,
    pub final_gradient_norm: f64,
    pub epsilon_final: f64,
    pub converged: bool,
    /// Extremes of the free nodal values before the final clamp to `[0, 1]`.
    pub unclamped_range: (f64, f64),
    /// Accepted energies per continuation stage, when recorded.
    pub energy_trace: Vec<Vec<f64>>,
    pub quadrature_order_boundary: usize,
}

/// Regularized discrete energy of `values`.
pub fn discrete_energy(mesh: &AnnularMesh, values: &[f64], params: &ProblemParams, epsilon: f64) -> Result<f64> {
    P1Assembler::new(mesh, SolveOptions::default().quadrature_order_boundary).energy(values, params, epsilon)
}

/// Gradient of [`discrete_energy`] with respect to the free nodal values;
/// entries of inner (Dirichlet) nodes are zero.
pub fn discrete_gradient(
    mesh: &AnnularMesh,
    values: &[f64],
    params: &ProblemParams,
    epsilon: f64,
) -> Result<Vec<f64>> {
    let assembler = P1Assembler::new(mesh, SolveOptions::default().quadrature_order_boundary);
    let mut g = vec![0.0; values.len()];
    assembler.energy_and_gradient(values, params, epsilon, &mut g)?;
    for &i in &mesh.inner_nodes {
        g[i] = 0.0;
    }
    Ok(g)
}

/// Starting field: 1 on `∂K`, linear in the transfinite coordinate down to
/// the radial minimizer's outer value for the equal-area concentric pair.
pub fn initial_guess(mesh: &AnnularMesh, params: &ProblemParams) -> Vec<f64> {
    let (inner_area, _) = mesh.compact_polygon();
    let (outer_area, _) = mesh.domain_polygon();
    let scale = (inner_area / std::f64::consts::PI).sqrt();
    let ratio = (outer_area / inner_area).sqrt();
    // a disk of radius `scale` rescales to the unit disk with beta * scale^(p-1)
    let outer = ProblemParams::new(2, params.p(), params.beta() * scale.powf(params.p() - 1.0))
        .ok()
        .filter(|_| ratio > 1.0 + 1e-9)
        .and_then(|pp| radial::u_star(&pp, ratio, ratio).ok())
        .unwrap_or(0.5)
        .clamp(0.05, 1.0);
    (0..mesh.node_count())
        .map(|i| {
            let s = mesh.transfinite_coordinate(i);
            1.0 - s * (1.0 - outer)
        })
        .collect()
}

fn require_planar(params: &ProblemParams) -> Result<()> {
    if params.n() != 2 {
        return Err(Error::InvalidParams(format!(
            "finite elements are planar; got dimension {}",
            params.n()
        )));
    }
    Ok(())
}

fn free_mask(mesh: &AnnularMesh) -> Vec<bool> {
    (0..mesh.node_count()).map(|i| !mesh.is_inner(i)).collect()
}

/// Energy of a nodal field at `ε = 0`, with the Robin flux.
fn evaluate(
    assembler: &P1Assembler,
    values: &[f64],
    params: &ProblemParams,
) -> Result<(EnergyParts, f64)> {
    let parts = assembler.energy_parts(values, params, 0.0)?;
    let flux = params.beta() * assembler.boundary_power_integral(values, params.p() - 1.0)?;
    Ok((parts, flux))
}

/// Minimizes the discrete energy on `mesh`.
///
/// Non-convergence is not an error: the best iterate is returned with
/// `converged == false`.
pub fn solve(mesh: &AnnularMesh, params: &ProblemParams, options: &SolveOptions) -> Result<FemSolution> {
    require_planar(params)?;
    options.validate()?;
    let assembler = P1Assembler::new(mesh, options.quadrature_order_boundary);
    let free = free_mask(mesh);
    let mut values = initial_guess(mesh, params);

    let mut scratch = vec![0.0; values.len()];
    assembler.energy_and_gradient(&values, params, options.epsilon_schedule[0], &mut scratch)?;
    let initial_norm = scratch
        .iter()
        .zip(&free)
        .filter(|(_, f)| **f)
        .map(|(g, _)| g * g)
        .sum::<f64>()
        .sqrt();
    let threshold = options.gradient_tolerance * initial_norm.max(f64::MIN_POSITIVE);

    let mut iterations = 0;
    let mut trace = Vec::new();
    let mut last = None;
    for &epsilon in &options.epsilon_schedule {
        let outcome = minimize(
            &mut values,
            &free,
            DescentSettings {
                max_iterations: options.max_iterations,
                gradient_threshold: threshold,
                history: options.history,
                record_trace: options.record_trace,
            },
            |x, g| assembler.energy_and_gradient(x, params, epsilon, g),
        )?;
        iterations += outcome.iterations;
        debug!(
            "eps {epsilon:e}: energy {:.12e} after {} iterations",
            outcome.energy, outcome.iterations
        );
        if options.record_trace {
            trace.push(outcome.trace.clone());
        }
        last = Some((epsilon, outcome));
    }
    let (epsilon_final, outcome) = last.expect("schedule is non-empty");
    if !outcome.converged {
        warn!(
            "p-Laplacian descent stopped at gradient norm {:e} (target {:e})",
            outcome.gradient_norm, threshold
        );
    }

    let (lo, hi) = values
        .iter()
        .zip(&free)
        .filter(|(_, f)| **f)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (v, _)| (lo.min(*v), hi.max(*v)));
    values.iter_mut().for_each(|v| *v = v.clamp(0.0, 1.0));
    let (parts, flux) = evaluate(&assembler, &values, params)?;
    Ok(FemSolution {
        mesh: mesh.clone(),
        params: *params,
        values,
        energy_total: parts.total(),
        energy_gradient_part: parts.gradient,
        energy_boundary_part: parts.boundary,
        robin_flux: flux,
        iterations,
        final_gradient_norm: outcome.gradient_norm,
        epsilon_final,
        converged: outcome.converged,
        unclamped_range: (lo, hi),
        energy_trace: trace,
        quadrature_order_boundary: options.quadrature_order_boundary,
    })
}

impl FemSolution {
    /// Wraps an arbitrary field (e.g. an interpolant) as a solution, with
    /// energies evaluated at `ε = 0`.
    pub fn from_values(mesh: &AnnularMesh, params: &ProblemParams, values: Vec<f64>) -> Result<Self> {
        require_planar(params)?;
        let order = SolveOptions::default().quadrature_order_boundary;
        let assembler = P1Assembler::new(mesh, order);
        let (parts, flux) = evaluate(&assembler, &values, params)?;
        let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(*v), hi.max(*v))
        });
        Ok(Self {
            mesh: mesh.clone(),
            params: *params,
            values,
            energy_total: parts.total(),
            energy_gradient_part: parts.gradient,
            energy_boundary_part: parts.boundary,
            robin_flux: flux,
            iterations: 0,
            final_gradient_norm: 0.0,
            epsilon_final: 0.0,
            converged: true,
            unclamped_range: (lo, hi),
            energy_trace: Vec::new(),
            quadrature_order_boundary: order,
        })
    }

    /// Minimum of the trace on `∂Ω`.
    pub fn min_outer_value(&self) -> f64 {
        self.mesh
            .outer_nodes()
            .map(|i| self.values[i])
            .fold(f64::INFINITY, f64::min)
    }
}

/// Both sides of `E = β ∮ u^(p-1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobinIdentity {
    pub lhs: f64,
    pub rhs: f64,
    pub converged: bool,
}

impl RobinIdentity {
    pub fn relative_gap(&self) -> f64 {
        (self.lhs - self.rhs).abs() / self.lhs.abs().max(f64::MIN_POSITIVE)
    }
}

pub fn robin_identity_check(solution: &FemSolution) -> RobinIdentity {
    if !solution.converged {
        warn!("Robin identity evaluated on an unconverged solution");
    }
    RobinIdentity {
        lhs: solution.energy_total,
        rhs: solution.robin_flux,
        converged: solution.converged,
    }
}

/// Energy of the degenerate pair `K = Ω`: the Robin term of `v ≡ 1`.
pub fn coincident_pair_energy(pair: &ShapePair, params: &ProblemParams) -> Result<f64> {
    if !pair.is_degenerate() {
        return Err(Error::Domain("K and Omega differ".into()));
    }
    Ok(params.beta() * pair.domain().perimeter())
}

/// Nodal interpolant of the radial minimizer on a mesh of concentric circles
/// about the origin with inner radius one.
pub fn radial_interpolant(mesh: &AnnularMesh, params: &ProblemParams, radius: f64) -> Result<Vec<f64>> {
    mesh.nodes
        .iter()
        .map(|x| {
            let r = x[0].hypot(x[1]).clamp(0.0, radius);
            radial::u_star(params, radius, r)
        })
        .collect()
}

#[cfg(test)]
mod tests;
