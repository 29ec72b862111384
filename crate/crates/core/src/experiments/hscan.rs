//! Level scans of `H(t, φ)` on a solved configuration.

use std::fmt::Write;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fem::SolveOptions;
use crate::hfunction::{derearranged_phi, h_scan, HEvaluation, PhiField};
use crate::params::ProblemParams;
use crate::radial::{ball_lower_bound, critical_radius, regime, BallBound, Regime};

use super::config::PairConfig;
use super::csv::{fmt_f64, CsvTable};
use super::{cmd_solve, SolveReport};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhiMode {
    /// `|∇u|/u` of the computed solution.
    SolutionRatio,
    /// A constant field; `constant` alone means `β^(1/(p-1))`.
    Constant(Option<f64>),
    /// The radial ratio transplanted along the level sets of `u`.
    Derearranged,
}

impl FromStr for PhiMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "solution_ratio" => Ok(PhiMode::SolutionRatio),
            "derearranged" => Ok(PhiMode::Derearranged),
            "constant" => Ok(PhiMode::Constant(None)),
            other => match other.strip_prefix("constant:") {
                Some(c) => c
                    .trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|c| c.is_finite())
                    .map(|c| PhiMode::Constant(Some(c)))
                    .ok_or_else(|| Error::Config(format!("bad constant in phi mode {other:?}"))),
                None => Err(Error::Config(format!(
                    "unknown phi mode {other:?} (solution_ratio, constant[:c], derearranged)"
                ))),
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct HScanReport {
    pub mode: PhiMode,
    pub solve: SolveReport,
    pub bound: BallBound,
    /// Outer radius of the reference annulus, derearranged mode only.
    pub reference_radius: Option<f64>,
    pub evaluations: Vec<HEvaluation>,
}

/// Reference annulus for the derearranged field: the optimal ball radius
/// under the volume cap, or the critical radius when `(B_1, B_1)` wins in
/// the bump regime.
pub fn reference_radius(params: &ProblemParams, volume_cap: f64) -> Result<f64> {
    let bound = ball_lower_bound(params, volume_cap)?;
    if bound.radius > 1.0 {
        return Ok(bound.radius);
    }
    match regime(params) {
        Regime::BumpThenDecreasing => critical_radius(params),
        r => Err(Error::WrongRegime {
            expected: Regime::BumpThenDecreasing.name(),
            actual: r.name(),
        }),
    }
}

pub fn cmd_hscan(config: &PairConfig, mode: PhiMode, options: &SolveOptions) -> Result<HScanReport> {
    let params = &config.params;
    let bound = ball_lower_bound(params, config.volume_cap)?;
    let solve = cmd_solve(config, options)?;
    let solution = solve
        .solution
        .as_ref()
        .ok_or_else(|| Error::Domain("K = Omega has no level sets to scan".into()))?;
    let triangles = solution.mesh.triangles.len();
    let (phi, reference_radius) = match mode {
        PhiMode::SolutionRatio => (PhiField::solution_ratio(solution), None),
        PhiMode::Constant(c) => (PhiField::constant(c.unwrap_or(params.beta_root()), triangles), None),
        PhiMode::Derearranged => {
            let r = reference_radius(params, config.volume_cap)?;
            (derearranged_phi(solution, params, r)?.phi, Some(r))
        }
    };
    let evaluations = h_scan(solution, &phi, params)?;
    Ok(HScanReport {
        mode,
        solve,
        bound,
        reference_radius,
        evaluations,
    })
}

impl HScanReport {
    pub fn min_h(&self) -> Option<&HEvaluation> {
        self.evaluations.iter().min_by(|a, b| a.h_value.total_cmp(&b.h_value))
    }

    pub fn to_csv(&self) -> String {
        let mut t = CsvTable::new(&["t", "H", "internal", "area", "external"]);
        for e in &self.evaluations {
            t.row(&[
                fmt_f64(e.t),
                fmt_f64(e.h_value),
                fmt_f64(e.internal),
                fmt_f64(e.area),
                fmt_f64(e.external),
            ]);
        }
        t.note("energy", &fmt_f64(self.solve.energy_total));
        t.note("ball_bound", &fmt_f64(self.bound.energy));
        t.finish(if self.solve.converged { "ok" } else { "not_converged" })
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "energy            {:.10}", self.solve.energy_total);
        let _ = writeln!(s, "ball bound        {:.10}", self.bound.energy);
        if let Some(r) = self.reference_radius {
            let _ = writeln!(s, "reference radius  {r:.10}");
        }
        if let Some(m) = self.min_h() {
            let _ = writeln!(s, "min H             {:.10} at t = {:.6}", m.h_value, m.t);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_modes() {
        assert_eq!("solution_ratio".parse::<PhiMode>().unwrap(), PhiMode::SolutionRatio);
        assert_eq!("derearranged".parse::<PhiMode>().unwrap(), PhiMode::Derearranged);
        assert_eq!("constant".parse::<PhiMode>().unwrap(), PhiMode::Constant(None));
        assert_eq!("constant:0.5".parse::<PhiMode>().unwrap(), PhiMode::Constant(Some(0.5)));
        assert!("constant:x".parse::<PhiMode>().is_err());
        assert!("gradient".parse::<PhiMode>().is_err());
    }

    #[test]
    fn reference_radius_choices() {
        let p = ProblemParams::new(2, 2.0, 2.0).unwrap();
        let r = reference_radius(&p, 4.0 * std::f64::consts::PI).unwrap();
        assert!((r - 2.0).abs() < 1e-12);
        // (3, 2, 1.5): bump regime with critical radius 2; a cap below the
        // critical radius keeps (B_1, B_1) optimal.
        let p = ProblemParams::new(3, 2.0, 1.5).unwrap();
        let cap = p.omega() * 1.5f64.powi(3);
        assert!((reference_radius(&p, cap).unwrap() - 2.0).abs() < 1e-9);
    }
}
