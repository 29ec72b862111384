//! Seeded comparison of FEM energies on random star-shaped pairs against the
//! concentric-ball lower bound.

use log::warn;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fem::{self, SolveOptions};
use crate::geometry::sample_random_pair;
use crate::hfunction::centroid_drift;
use crate::mesh::build_annular_mesh;
use crate::params::ProblemParams;
use crate::radial::{ball_lower_bound, BallBound};

use super::config::{DEFAULT_N_RADIAL, DEFAULT_N_THETA};
use super::csv::{fmt_f64, CsvTable};

/// Relative shortfall below the ball bound that counts as a violation.
pub const VIOLATION_TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignSettings {
    pub params: ProblemParams,
    pub volume_cap: f64,
    pub count: usize,
    pub seed: u64,
    pub amplitude: f64,
    pub n_theta: usize,
    pub n_radial: usize,
    pub options: SolveOptions,
    /// Worker cap; `None` reads `PCAP_THREADS`, falling back to all cores.
    pub threads: Option<usize>,
}

impl CampaignSettings {
    pub fn new(params: ProblemParams, volume_cap: f64, count: usize, seed: u64, amplitude: f64) -> Self {
        Self {
            params,
            volume_cap,
            count,
            seed,
            amplitude,
            n_theta: DEFAULT_N_THETA,
            n_radial: DEFAULT_N_RADIAL,
            options: SolveOptions::default(),
            threads: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignRecord {
    pub seed: u64,
    pub area_compact: f64,
    pub area_domain: f64,
    pub fem_energy: f64,
    pub ball_bound: f64,
    /// `fem_energy - ball_bound`.
    pub margin: f64,
    pub relative_margin: f64,
    pub centroid_drift: f64,
    pub converged: bool,
    /// Set when the instance could not be sampled, meshed or solved; the
    /// numeric fields are then NaN.
    pub error: Option<String>,
}

impl CampaignRecord {
    fn failed(seed: u64, ball_bound: f64, error: Error) -> Self {
        Self {
            seed,
            area_compact: f64::NAN,
            area_domain: f64::NAN,
            fem_energy: f64::NAN,
            ball_bound,
            margin: f64::NAN,
            relative_margin: f64::NAN,
            centroid_drift: f64::NAN,
            converged: false,
            error: Some(error.to_string()),
        }
    }

    pub fn is_violation(&self) -> bool {
        self.error.is_none() && self.relative_margin < -VIOLATION_TOLERANCE
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignReport {
    pub params: ProblemParams,
    pub volume_cap: f64,
    pub amplitude: f64,
    pub bound: BallBound,
    /// False when `β^(1/(p-1)) <= (n-p)/(p-1)`; the campaign is then only
    /// exploratory.
    pub hypothesis_holds: bool,
    /// Ordered by seed.
    pub records: Vec<CampaignRecord>,
}

fn thread_cap(explicit: Option<usize>) -> usize {
    explicit
        .or_else(|| std::env::var("PCAP_THREADS").ok().and_then(|v| v.trim().parse().ok()))
        .unwrap_or(0)
}

fn run_instance(settings: &CampaignSettings, seed: u64, bound: BallBound) -> Result<CampaignRecord> {
    let pair = sample_random_pair(seed, settings.volume_cap, settings.amplitude)?;
    let mesh = build_annular_mesh(&pair, settings.n_theta, settings.n_radial)?;
    let solution = fem::solve(&mesh, &settings.params, &settings.options)?;
    let drift = centroid_drift(&solution)?;
    let margin = solution.energy_total - bound.energy;
    Ok(CampaignRecord {
        seed,
        area_compact: pair.compact().area(),
        area_domain: pair.domain().area(),
        fem_energy: solution.energy_total,
        ball_bound: bound.energy,
        margin,
        relative_margin: margin / bound.energy,
        centroid_drift: drift,
        converged: solution.converged,
        error: None,
    })
}

pub fn cmd_verify(settings: &CampaignSettings) -> Result<CampaignReport> {
    let params = &settings.params;
    if params.n() != 2 {
        return Err(Error::InvalidParams(format!(
            "the campaign samples planar pairs; n = {} is not supported",
            params.n()
        )));
    }
    if !(settings.amplitude.is_finite() && settings.amplitude >= 0.0) {
        return Err(Error::InvalidParams(format!("amplitude {} must be non-negative", settings.amplitude)));
    }
    settings.options.validate()?;
    let bound = ball_lower_bound(params, settings.volume_cap)?;
    let hypothesis_holds = params.beta_root() > (params.dim() - params.p()) / (params.p() - 1.0);
    if !hypothesis_holds {
        warn!("beta^(1/(p-1)) <= (n-p)/(p-1): theorem hypothesis violated, running as exploration");
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_cap(settings.threads))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let seeds: Vec<u64> = (0..settings.count as u64).map(|k| settings.seed.wrapping_add(k)).collect();
    let records = pool.install(|| {
        seeds
            .par_iter()
            .map(|&seed| {
                run_instance(settings, seed, bound).unwrap_or_else(|e| {
                    warn!("instance {seed} failed: {e}");
                    CampaignRecord::failed(seed, bound.energy, e)
                })
            })
            .collect::<Vec<_>>()
    });

    Ok(CampaignReport {
        params: *params,
        volume_cap: settings.volume_cap,
        amplitude: settings.amplitude,
        bound,
        hypothesis_holds,
        records,
    })
}

impl CampaignReport {
    fn successful(&self) -> impl Iterator<Item = &CampaignRecord> {
        self.records.iter().filter(|r| r.error.is_none())
    }

    pub fn min_margin(&self) -> Option<f64> {
        self.successful().map(|r| r.margin).min_by(f64::total_cmp)
    }

    pub fn min_relative_margin(&self) -> Option<f64> {
        self.successful().map(|r| r.relative_margin).min_by(f64::total_cmp)
    }

    pub fn violations(&self) -> usize {
        self.records.iter().filter(|r| r.is_violation()).count()
    }

    pub fn failures(&self) -> usize {
        self.records.len() - self.successful().count()
    }

    pub fn all_converged(&self) -> bool {
        self.records.iter().all(|r| r.converged)
    }

    pub fn to_csv(&self) -> String {
        let mut t = CsvTable::new(&[
            "seed",
            "area_K",
            "area_Omega",
            "fem_energy",
            "ball_bound",
            "margin",
            "relative_margin",
            "centroid_drift",
            "converged",
            "error",
        ]);
        for r in &self.records {
            let error = r.error.as_deref().unwrap_or("").replace([',', '\n'], ";");
            t.row(&[
                r.seed.to_string(),
                fmt_f64(r.area_compact),
                fmt_f64(r.area_domain),
                fmt_f64(r.fem_energy),
                fmt_f64(r.ball_bound),
                fmt_f64(r.margin),
                fmt_f64(r.relative_margin),
                fmt_f64(r.centroid_drift),
                r.converged.to_string(),
                error,
            ]);
        }
        t.note("p", &fmt_f64(self.params.p()));
        t.note("beta", &fmt_f64(self.params.beta()));
        t.note("M", &fmt_f64(self.volume_cap));
        t.note("amplitude", &fmt_f64(self.amplitude));
        t.note("ball_radius", &fmt_f64(self.bound.radius));
        t.note("min_margin", &self.min_margin().map(fmt_f64).unwrap_or_default());
        t.note("violations", &self.violations().to_string());
        t.note("failures", &self.failures().to_string());
        t.finish("ok")
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "{} instances, ball bound {:.8} at R = {:.6}\n",
            self.records.len(),
            self.bound.energy,
            self.bound.radius
        );
        if !self.hypothesis_holds {
            s.push_str("warning: beta^(1/(p-1)) <= (n-p)/(p-1), results are exploratory\n");
        }
        if let (Some(m), Some(rel)) = (self.min_margin(), self.min_relative_margin()) {
            s.push_str(&format!("min margin {m:.6e} (relative {rel:.3e})\n"));
        }
        s.push_str(&format!("violations {}, failures {}\n", self.violations(), self.failures()));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_campaign() {
        let params = ProblemParams::new(2, 2.0, 2.0).unwrap();
        let settings = CampaignSettings::new(params, 4.0 * std::f64::consts::PI, 0, 7, 0.15);
        let report = cmd_verify(&settings).unwrap();
        assert!(report.records.is_empty());
        assert_eq!(report.violations(), 0);
        assert_eq!(report.min_margin(), None);
        let csv = report.to_csv();
        assert!(csv.starts_with("seed,"));
        assert!(csv.ends_with("# status,ok\n"));
    }

    #[test]
    fn rejects_non_planar() {
        let params = ProblemParams::new(3, 2.0, 2.0).unwrap();
        let settings = CampaignSettings::new(params, 100.0, 1, 0, 0.1);
        assert!(cmd_verify(&settings).is_err());
    }

    #[test]
    fn coarse_instances_respect_bound() {
        let params = ProblemParams::new(2, 2.0, 2.0).unwrap();
        let mut settings = CampaignSettings::new(params, 4.0 * std::f64::consts::PI, 3, 11, 0.15);
        settings.n_theta = 64;
        settings.n_radial = 8;
        let report = cmd_verify(&settings).unwrap();
        assert_eq!(report.failures(), 0);
        assert_eq!(report.violations(), 0);
        let seeds: Vec<u64> = report.records.iter().map(|r| r.seed).collect();
        assert_eq!(seeds, vec![11, 12, 13]);
        for r in &report.records {
            assert!((r.area_compact - std::f64::consts::PI).abs() < 1e-8 * std::f64::consts::PI);
            assert!(r.area_domain <= settings.volume_cap * (1.0 + 1e-8));
        }
    }
}
