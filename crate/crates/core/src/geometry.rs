//! Star-shaped planar curves given by a trigonometric radius function.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::quadrature::periodic_trapezoid;
use crate::roots::bisect;

/// Angular resolution for quadrature and positivity/containment checks.
pub const ANGULAR_SAMPLES: usize = 4096;
const RAY_SAMPLES: usize = 96;
const RAY_TOL: f64 = 1e-12;
const MAX_SAMPLING_RETRIES: usize = 100;
const RANDOM_MODES: usize = 6;

pub type Point = [f64; 2];

/// Closed curve `center + rho(theta) (cos theta, sin theta)` with
/// `rho(theta) = a0 + sum_k (a_k cos k theta + b_k sin k theta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StarShape {
    center: Point,
    a0: f64,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl StarShape {
    /// `cos[k-1]` and `sin[k-1]` are the coefficients of mode `k`; the shorter
    /// list is padded with zeros.
    pub fn new(center: Point, a0: f64, cos: Vec<f64>, sin: Vec<f64>) -> Result<Self> {
        let modes = cos.len().max(sin.len());
        let mut cos = cos;
        let mut sin = sin;
        cos.resize(modes, 0.0);
        sin.resize(modes, 0.0);
        let shape = Self { center, a0, cos, sin };
        shape.validate()?;
        Ok(shape)
    }

    pub fn circle(center: Point, radius: f64) -> Result<Self> {
        Self::new(center, radius, Vec::new(), Vec::new())
    }

    fn validate(&self) -> Result<()> {
        let finite = self.center.iter().all(|c| c.is_finite())
            && self.a0.is_finite()
            && self.cos.iter().chain(&self.sin).all(|c| c.is_finite());
        if !finite {
            return Err(Error::InvalidShape("non-finite coefficient".into()));
        }
        let spread: f64 = self.cos.iter().chain(&self.sin).map(|c| c.abs()).sum();
        if self.a0 > spread {
            return Ok(());
        }
        let h = 2.0 * PI / ANGULAR_SAMPLES as f64;
        for i in 0..ANGULAR_SAMPLES {
            let theta = h * i as f64;
            if self.radius(theta) <= 0.0 {
                return Err(Error::InvalidShape(format!(
                    "radius function not positive at angle {theta:.6}"
                )));
            }
        }
        Ok(())
    }

    pub fn center(&self) -> Point {
        self.center
    }

    pub fn mean_radius(&self) -> f64 {
        self.a0
    }

    pub fn cos_coefficients(&self) -> &[f64] {
        &self.cos
    }

    pub fn sin_coefficients(&self) -> &[f64] {
        &self.sin
    }

    pub fn modes(&self) -> usize {
        self.cos.len()
    }

    /// Upper bound of the radius function.
    pub fn max_radius_bound(&self) -> f64 {
        self.a0 + self.cos.iter().chain(&self.sin).map(|c| c.abs()).sum::<f64>()
    }

    fn series(&self, theta: f64) -> (f64, f64) {
        let (s1, c1) = theta.sin_cos();
        let (mut sk, mut ck) = (s1, c1);
        let mut value = self.a0;
        let mut derivative = 0.0;
        for (k, (a, b)) in self.cos.iter().zip(&self.sin).enumerate() {
            let kf = (k + 1) as f64;
            value += a * ck + b * sk;
            derivative += kf * (b * ck - a * sk);
            let next_c = ck * c1 - sk * s1;
            sk = sk * c1 + ck * s1;
            ck = next_c;
        }
        (value, derivative)
    }

    pub fn radius(&self, theta: f64) -> f64 {
        self.series(theta).0
    }

    pub fn radius_derivative(&self, theta: f64) -> f64 {
        self.series(theta).1
    }

    pub fn point(&self, theta: f64) -> Point {
        let r = self.radius(theta);
        [self.center[0] + r * theta.cos(), self.center[1] + r * theta.sin()]
    }

    /// Enclosed area `1/2 ∫ rho^2`.
    pub fn area(&self) -> f64 {
        0.5 * periodic_trapezoid(ANGULAR_SAMPLES, |t| self.radius(t).powi(2))
    }

    /// Arc length `∫ sqrt(rho^2 + rho'^2)`.
    pub fn perimeter(&self) -> f64 {
        periodic_trapezoid(ANGULAR_SAMPLES, |t| {
            let (r, dr) = self.series(t);
            r.hypot(dr)
        })
    }

    /// Rescales about the center so that the enclosed area equals `target`.
    pub fn normalize_area(&self, target: f64) -> Result<Self> {
        if !(target.is_finite() && target > 0.0) {
            return Err(Error::Domain(format!("target area {target} must be positive")));
        }
        Ok(self.scaled((target / self.area()).sqrt()))
    }

    fn scaled(&self, factor: f64) -> Self {
        Self {
            center: self.center,
            a0: self.a0 * factor,
            cos: self.cos.iter().map(|c| c * factor).collect(),
            sin: self.sin.iter().map(|c| c * factor).collect(),
        }
    }

    /// The same curve rotated by `angle` about its center.
    pub fn rotated(&self, angle: f64) -> Self {
        // rho_new(theta) = rho(theta - angle)
        let mut cos = Vec::with_capacity(self.modes());
        let mut sin = Vec::with_capacity(self.modes());
        for (k, (a, b)) in self.cos.iter().zip(&self.sin).enumerate() {
            let (s, c) = ((k + 1) as f64 * angle).sin_cos();
            cos.push(a * c - b * s);
            sin.push(a * s + b * c);
        }
        Self {
            center: self.center,
            a0: self.a0,
            cos,
            sin,
        }
    }

    /// Signed gap `|x - c| - rho(angle(x - c))`; negative strictly inside.
    pub fn level(&self, x: Point) -> f64 {
        let dx = x[0] - self.center[0];
        let dy = x[1] - self.center[1];
        dx.hypot(dy) - self.radius(dy.atan2(dx))
    }

    fn same_curve(&self, other: &Self) -> bool {
        self.center == other.center && self.a0 == other.a0 && self.cos == other.cos && self.sin == other.sin
    }
}

/// A validated pair `K ⊆ closure(Ω)` with `Ω` star-shaped about the center of `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapePair {
    compact: StarShape,
    domain: StarShape,
}

impl ShapePair {
    pub fn compact(&self) -> &StarShape {
        &self.compact
    }

    pub fn domain(&self) -> &StarShape {
        &self.domain
    }

    /// True when `K` and `Ω` are the same curve.
    pub fn is_degenerate(&self) -> bool {
        self.compact.same_curve(&self.domain)
    }

    /// Radius of `∂Ω` along the ray from the center of `K` at `theta`.
    pub fn domain_radius_about_compact(&self, theta: f64) -> Result<f64> {
        ray_exit(&self.domain, self.compact.center, theta)
    }

    /// Point of `∂Ω` hit by the ray from the center of `K` at `theta`.
    pub fn domain_point_about_compact(&self, theta: f64) -> Result<Point> {
        let r = self.domain_radius_about_compact(theta)?;
        let c = self.compact.center;
        Ok([c[0] + r * theta.cos(), c[1] + r * theta.sin()])
    }
}

/// Distance from `origin` to `∂shape` along direction `theta`, requiring the
/// ray to cross the curve exactly once.
fn ray_exit(shape: &StarShape, origin: Point, theta: f64) -> Result<f64> {
    if origin == shape.center {
        return Ok(shape.radius(theta));
    }
    let dir = [theta.cos(), theta.sin()];
    let at = |r: f64| shape.level([origin[0] + r * dir[0], origin[1] + r * dir[1]]);
    if at(0.0) >= 0.0 {
        return Err(Error::ContainmentViolation { angle: theta });
    }
    let offset = (origin[0] - shape.center[0]).hypot(origin[1] - shape.center[1]);
    let far = 1.01 * (offset + shape.max_radius_bound()) + 1e-9;
    let h = far / RAY_SAMPLES as f64;
    let mut crossing = None;
    let mut prev = at(0.0);
    for i in 1..=RAY_SAMPLES {
        let r = h * i as f64;
        let cur = at(r);
        if (prev < 0.0) != (cur < 0.0) {
            if crossing.is_some() {
                return Err(Error::NotStarShapedAboutCenter { angle: theta });
            }
            crossing = Some((r - h, r));
        }
        prev = cur;
    }
    let (lo, hi) = crossing.ok_or(Error::NotStarShapedAboutCenter { angle: theta })?;
    bisect(at, lo, hi, RAY_TOL)
}

/// Checks `K ⊆ closure(Ω)` on [`ANGULAR_SAMPLES`] rays from the center of `K`.
pub fn validate_pair(compact: StarShape, domain: StarShape) -> Result<ShapePair> {
    let h = 2.0 * PI / ANGULAR_SAMPLES as f64;
    if !compact.same_curve(&domain) {
        for i in 0..ANGULAR_SAMPLES {
            let theta = h * i as f64;
            let outer = ray_exit(&domain, compact.center, theta)?;
            let inner = compact.radius(theta);
            if inner > outer * (1.0 + RAY_TOL) + RAY_TOL {
                return Err(Error::ContainmentViolation { angle: theta });
            }
        }
    }
    Ok(ShapePair { compact, domain })
}

fn random_shape(rng: &mut ChaCha8Rng, center: Point, mean: f64, amplitude: f64) -> Result<StarShape> {
    let mut draw = || {
        if amplitude > 0.0 {
            mean * rng.gen_range(-amplitude..=amplitude)
        } else {
            0.0
        }
    };
    let cos: Vec<f64> = (0..RANDOM_MODES).map(|_| draw()).collect();
    let sin: Vec<f64> = (0..RANDOM_MODES).map(|_| draw()).collect();
    StarShape::new(center, mean, cos, sin)
}

/// Seeded random pair: `K` a perturbed unit circle rescaled to area `pi`,
/// `Ω` a perturbed circle of area `M` around an offset center. Fourier modes
/// `1..=6` carry relative coefficients uniform in `[-amplitude, amplitude]`.
pub fn sample_random_pair(seed: u64, volume_cap: f64, amplitude: f64) -> Result<ShapePair> {
    if !(volume_cap.is_finite() && volume_cap > PI) {
        return Err(Error::Domain(format!("volume cap {volume_cap} must exceed pi")));
    }
    if !(amplitude.is_finite() && amplitude >= 0.0) {
        return Err(Error::Domain(format!("amplitude {amplitude} must be non-negative")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let outer_mean = (volume_cap / PI).sqrt();
    for _ in 0..MAX_SAMPLING_RETRIES {
        let offset = if amplitude > 0.0 {
            [
                rng.gen_range(-amplitude..=amplitude),
                rng.gen_range(-amplitude..=amplitude),
            ]
        } else {
            [0.0, 0.0]
        };
        let compact = match random_shape(&mut rng, [0.0, 0.0], 1.0, amplitude) {
            Ok(s) => s.normalize_area(PI)?,
            Err(_) => continue,
        };
        let domain = match random_shape(&mut rng, offset, outer_mean, amplitude) {
            Ok(s) => s.normalize_area(volume_cap)?,
            Err(_) => continue,
        };
        if let Ok(pair) = validate_pair(compact, domain) {
            return Ok(pair);
        }
    }
    Err(Error::SamplingExhausted(MAX_SAMPLING_RETRIES))
}
