//! Shape-pair config files.
//!
//! ```toml
//! [params]
//! p = 2.0
//! beta = 1.0
//! M = 12.566370614359172   # optional, defaults to the area of Omega
//!
//! [mesh]                   # optional
//! n_theta = 256
//! n_radial = 32
//!
//! [K]
//! center = [0.0, 0.0]
//! a0 = 1.0
//! cos = [0.0, 0.05]        # optional, modes 1, 2, ...
//! sin = []                 # optional
//!
//! [Omega]
//! center = [0.0, 0.0]
//! a0 = 2.0
//! ```

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::geometry::{validate_pair, ShapePair, StarShape};
use crate::params::ProblemParams;

pub const DEFAULT_N_THETA: usize = 256;
pub const DEFAULT_N_RADIAL: usize = 32;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    #[serde(default = "two")]
    n: u32,
    p: f64,
    beta: f64,
    #[serde(rename = "M")]
    volume_cap: Option<f64>,
}

fn two() -> u32 {
    2
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMesh {
    n_theta: Option<usize>,
    n_radial: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawShape {
    #[serde(default)]
    center: [f64; 2],
    a0: f64,
    #[serde(default)]
    cos: Vec<f64>,
    #[serde(default)]
    sin: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    params: RawParams,
    mesh: Option<RawMesh>,
    #[serde(rename = "K")]
    compact: RawShape,
    #[serde(rename = "Omega")]
    domain: RawShape,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairConfig {
    pub params: ProblemParams,
    pub volume_cap: f64,
    pub pair: ShapePair,
    pub n_theta: usize,
    pub n_radial: usize,
}

impl RawShape {
    fn build(self, which: &str) -> Result<StarShape> {
        StarShape::new(self.center, self.a0, self.cos, self.sin).map_err(|e| Error::Config(format!("[{which}]: {e}")))
    }
}

impl PairConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if raw.params.n != 2 {
            return Err(Error::Config(format!(
                "shape pairs are planar; n = {} is not supported",
                raw.params.n
            )));
        }
        let params = ProblemParams::new(raw.params.n, raw.params.p, raw.params.beta)
            .map_err(|e| Error::Config(e.to_string()))?;
        let compact = raw.compact.build("K")?;
        let domain = raw.domain.build("Omega")?;
        let pair = validate_pair(compact, domain).map_err(|e| Error::Config(e.to_string()))?;
        let volume_cap = match raw.params.volume_cap {
            Some(m) if m.is_finite() && m > 0.0 => m,
            Some(m) => return Err(Error::Config(format!("M = {m} must be positive"))),
            None => pair.domain().area(),
        };
        let mesh = raw.mesh.unwrap_or(RawMesh {
            n_theta: None,
            n_radial: None,
        });
        Ok(Self {
            params,
            volume_cap,
            pair,
            n_theta: mesh.n_theta.unwrap_or(DEFAULT_N_THETA),
            n_radial: mesh.n_radial.unwrap_or(DEFAULT_N_RADIAL),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CONCENTRIC: &str = r#"
[params]
p = 2.0
beta = 1.0

[K]
center = [0.0, 0.0]
a0 = 1.0

[Omega]
center = [0.0, 0.0]
a0 = 2.0
"#;

    #[test]
    fn parses_minimal_config() {
        let cfg = PairConfig::parse(CONCENTRIC).unwrap();
        assert_eq!(cfg.params.p(), 2.0);
        assert_eq!(cfg.n_theta, DEFAULT_N_THETA);
        assert!((cfg.volume_cap - 4.0 * std::f64::consts::PI).abs() < 1e-12);
        assert!(!cfg.pair.is_degenerate());
    }

    #[test]
    fn parses_full_config() {
        let text = r#"
[params]
n = 2
p = 3.0
beta = 0.5
M = 20.0
[mesh]
n_theta = 64
n_radial = 8
[K]
a0 = 1.0
cos = [0.0, 0.05]
sin = [0.02]
[Omega]
center = [0.1, 0.0]
a0 = 2.2
"#;
        let cfg = PairConfig::parse(text).unwrap();
        assert_eq!(cfg.volume_cap, 20.0);
        assert_eq!((cfg.n_theta, cfg.n_radial), (64, 8));
        assert_eq!(cfg.pair.compact().cos_coefficients(), &[0.0, 0.05]);
    }

    #[test]
    fn rejects_malformed() {
        assert!(matches!(PairConfig::parse("not toml ["), Err(Error::Config(_))));
        assert!(matches!(
            PairConfig::parse(&CONCENTRIC.replace("beta = 1.0", "beta = -1.0")),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            PairConfig::parse(&CONCENTRIC.replace("a0 = 2.0", "a0 = 0.5")),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            PairConfig::parse(&CONCENTRIC.replace("p = 2.0", "p = 2.0\ngamma = 1")),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            PairConfig::parse(&CONCENTRIC.replace("p = 2.0", "p = 2.0\nn = 3")),
            Err(Error::Config(_))
        ));
    }
}
