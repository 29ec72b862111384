//! Closed-form quantities for concentric balls `(B_1, B_R)`.
//!
//! Everything here is expressed through the radial kernel `phi` and the
//! denominator `D(R) = phi'(R) + beta^(1/(p-1)) (phi(R) - phi(1))`, in terms
//! of which the minimizer is affine in `phi` and the energy is
//! `n omega_n beta / D(R)^(p-1)`.

use std::fmt;

use crate::error::{Error, Result};
use crate::params::ProblemParams;
use crate::roots::bisect;

/// Grid size used by [`lemma5_predicate`] for both sweeps.
pub const LEMMA5_GRID: usize = 2048;
const LEMMA5_SLACK: f64 = 1e-12;
const CRITICAL_RADIUS_TOL: f64 = 1e-12;
const MAX_DOUBLINGS: i32 = 60;

fn check_radius(rho: f64) -> Result<()> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::Domain(format!("radius {rho} must be finite and positive")));
    }
    Ok(())
}

/// Exponent `(n-p)/(p-1)` of the power-law kernel.
fn kernel_exponent(params: &ProblemParams) -> f64 {
    (params.dim() - params.p()) / (params.p() - 1.0)
}

/// Radial potential kernel: `log(rho)` when `p = n`, otherwise
/// `-((p-1)/(n-p)) rho^(-(n-p)/(p-1))`.
pub fn phi(params: &ProblemParams, rho: f64) -> Result<f64> {
    check_radius(rho)?;
    if params.is_conformal() {
        return Ok(rho.ln());
    }
    let e = kernel_exponent(params);
    Ok(-rho.powf(-e) / e)
}

/// Derivative of [`phi`], `rho^(-(n-1)/(p-1))` for every `p`.
pub fn phi_prime(params: &ProblemParams, rho: f64) -> Result<f64> {
    check_radius(rho)?;
    Ok(phi_prime_unchecked(params, rho))
}

fn phi_prime_unchecked(params: &ProblemParams, rho: f64) -> f64 {
    rho.powf(-(params.dim() - 1.0) / (params.p() - 1.0))
}

/// `phi(rho) - phi(1)`, evaluated without cancellation near `rho = 1`.
fn phi_increment(params: &ProblemParams, rho: f64) -> f64 {
    let log_rho = rho.ln();
    if params.is_conformal() {
        return log_rho;
    }
    let e = kernel_exponent(params);
    -(-e * log_rho).exp_m1() / e
}

/// `phi(outer) - phi(r)` for `r <= outer`, computed directly so that it stays
/// accurate when it is tiny compared with either term.
fn phi_difference(params: &ProblemParams, r: f64, outer: f64) -> f64 {
    let log_ratio = (outer / r).ln();
    if params.is_conformal() {
        return log_ratio;
    }
    let e = kernel_exponent(params);
    -r.powf(-e) * (-e * log_ratio).exp_m1() / e
}

/// The denominator `D(R)` shared by the minimizer and the energy. `D(1) = 1`.
pub fn denominator(params: &ProblemParams, radius: f64) -> Result<f64> {
    check_radius(radius)?;
    Ok(denominator_unchecked(params, radius))
}

fn denominator_unchecked(params: &ProblemParams, radius: f64) -> f64 {
    phi_prime_unchecked(params, radius) + params.beta_root() * phi_increment(params, radius)
}

/// Energy `E(B_1, B_R)` for `R >= 1`; at `R = 1` this is the Robin term alone,
/// `n omega_n beta`.
pub fn ball_energy(params: &ProblemParams, radius: f64) -> Result<f64> {
    if !(radius.is_finite() && radius >= 1.0) {
        return Err(Error::Domain(format!("outer radius {radius} must be >= 1")));
    }
    let scale = params.sphere_area() * params.beta();
    if radius == 1.0 {
        return Ok(scale);
    }
    Ok(scale * (-(params.p() - 1.0) * log_denominator(params, radius)).exp())
}

/// `ln beta^(1/(p-1))`, finite even when the root itself over- or underflows.
fn log_beta_root(params: &ProblemParams) -> f64 {
    params.beta().ln() / (params.p() - 1.0)
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln D(R)` for `R > 1`, summed in log space so that neither term can
/// overflow or vanish.
fn log_denominator(params: &ProblemParams, radius: f64) -> f64 {
    let k = (params.dim() - 1.0) / (params.p() - 1.0);
    log_add_exp(-k * radius.ln(), log_beta_root(params) + phi_increment(params, radius).ln())
}

fn check_annulus(radius: f64, r: f64, inner: f64) -> Result<()> {
    if !(radius.is_finite() && radius > 1.0) {
        return Err(Error::Domain(format!("outer radius {radius} must be > 1")));
    }
    if !(r >= inner && r <= radius) {
        return Err(Error::Domain(format!("r={r} outside [{inner}, {radius}]")));
    }
    Ok(())
}

/// The minimizer on `(B_1, B_R)` at distance `r` from the center.
pub fn u_star(params: &ProblemParams, radius: f64, r: f64) -> Result<f64> {
    check_annulus(radius, r, 0.0)?;
    if r <= 1.0 {
        return Ok(1.0);
    }
    let d = denominator_unchecked(params, radius);
    Ok((phi_prime_unchecked(params, radius) + params.beta_root() * phi_difference(params, r, radius)) / d)
}

/// Radial derivative `du*/dr` (non-positive) on `[0, R]`.
pub fn u_star_derivative(params: &ProblemParams, radius: f64, r: f64) -> Result<f64> {
    check_annulus(radius, r, 0.0)?;
    if r < 1.0 {
        return Ok(0.0);
    }
    let d = denominator_unchecked(params, radius);
    Ok(-params.beta_root() * phi_prime_unchecked(params, r) / d)
}

/// `|grad u*| / u*` on the annulus `1 <= r <= R`.
pub fn gradient_ratio(params: &ProblemParams, radius: f64, r: f64) -> Result<f64> {
    check_annulus(radius, r, 1.0)?;
    Ok(gradient_ratio_unchecked(params, radius, r))
}

pub(crate) fn gradient_ratio_unchecked(params: &ProblemParams, radius: f64, r: f64) -> f64 {
    let b = params.beta_root();
    if r >= radius {
        return b;
    }
    if b.is_infinite() {
        return 1.0 / ratio_gap_kernel(params, radius, r);
    }
    b * normalized_ratio(params, radius, r)
}

/// `J(r) = (phi(R) - phi(r)) / phi'(r)` in closed form.
fn ratio_gap_kernel(params: &ProblemParams, radius: f64, r: f64) -> f64 {
    let log_ratio = (radius / r).ln();
    if params.is_conformal() {
        r * log_ratio
    } else {
        let e = kernel_exponent(params);
        -r * (-e * log_ratio).exp_m1() / e
    }
}

/// `(|grad u*| / u*) / beta^(1/(p-1))` written as `1 / ((R/r)^(-k) + b J(r))`,
/// which stays finite when `phi'` underflows or `b` leaves the float range
/// (p close to 1).
fn normalized_ratio(params: &ProblemParams, radius: f64, r: f64) -> f64 {
    if r >= radius {
        return 1.0;
    }
    let k = (params.dim() - 1.0) / (params.p() - 1.0);
    let decay = (-k * (radius / r).ln()).exp();
    let pull = (log_beta_root(params) + ratio_gap_kernel(params, radius, r).ln()).exp();
    1.0 / (decay + pull)
}

/// Inverse of `u*` on the annulus: the radius `rho in [1, R]` with
/// `u*(rho) = t`, for `t in [u*(R), 1]`.
pub fn level_radius(params: &ProblemParams, radius: f64, t: f64) -> Result<f64> {
    let outer = u_star(params, radius, radius)?;
    if !(t >= outer && t <= 1.0) {
        return Err(Error::Domain(format!("level {t} outside [{outer}, 1]")));
    }
    let d = denominator_unchecked(params, radius);
    let y = (1.0 - t) * d / params.beta_root();
    let rho = if params.is_conformal() {
        y.exp()
    } else {
        let e = kernel_exponent(params);
        (-(-y * e).ln_1p() / e).exp()
    };
    Ok(rho.clamp(1.0, radius))
}

/// Shape of `R -> E(B_1, B_R)` on `[1, inf)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// Decreasing on all of `[1, inf)`.
    MonotoneDecreasing,
    /// Increasing up to `alpha`, decreasing after; returns to `E(1)` at the
    /// critical radius.
    BumpThenDecreasing,
    /// Never below its value at `R = 1`.
    MinAtOne,
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::MonotoneDecreasing => "MonotoneDecreasing",
            Regime::BumpThenDecreasing => "BumpThenDecreasing",
            Regime::MinAtOne => "MinAtOne",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeReport {
    pub params: ProblemParams,
    pub regime: Regime,
    /// Turning point `((n-1)/(p-1)) beta^(-1/(p-1))`.
    pub alpha: f64,
    /// `((n-p)/(p-1))^(p-1)` for `p < n`, zero otherwise.
    pub beta1: f64,
    /// `((n-1)/(p-1))^(p-1)`.
    pub beta2: f64,
    pub critical_radius: Option<f64>,
    pub limit_at_infinity: f64,
}

fn lower_threshold(params: &ProblemParams) -> f64 {
    (params.dim() - params.p()) / (params.p() - 1.0)
}

fn upper_threshold(params: &ProblemParams) -> f64 {
    (params.dim() - 1.0) / (params.p() - 1.0)
}

/// Turning point `alpha` of the ball energy curve.
pub fn alpha(params: &ProblemParams) -> f64 {
    upper_threshold(params) / params.beta_root()
}

/// Regime of `R -> E(B_1, B_R)`. Exact ties at the upper threshold count as
/// monotone, ties at the lower threshold as minimum-at-one.
pub fn regime(params: &ProblemParams) -> Regime {
    let b = params.beta_root();
    if b >= upper_threshold(params) {
        Regime::MonotoneDecreasing
    } else if b <= lower_threshold(params) {
        Regime::MinAtOne
    } else {
        Regime::BumpThenDecreasing
    }
}

/// `lim_{R -> inf} E(B_1, B_R)`.
pub fn limit_at_infinity(params: &ProblemParams) -> f64 {
    if params.p() < params.dim() {
        params.sphere_area() * lower_threshold(params).powf(params.p() - 1.0)
    } else {
        0.0
    }
}

pub fn regime_classify(params: &ProblemParams) -> Result<RegimeReport> {
    let regime = regime(params);
    let critical_radius = match regime {
        Regime::BumpThenDecreasing => Some(critical_radius(params)?),
        _ => None,
    };
    let pm1 = params.p() - 1.0;
    let beta1 = if params.p() < params.dim() {
        lower_threshold(params).powf(pm1)
    } else {
        0.0
    };
    Ok(RegimeReport {
        params: *params,
        regime,
        alpha: alpha(params),
        beta1,
        beta2: upper_threshold(params).powf(pm1),
        critical_radius,
        limit_at_infinity: limit_at_infinity(params),
    })
}

/// The radius beyond `alpha` at which the ball energy falls back to `E(1)`.
///
/// `E(R) = E(1)` is equivalent to `D(R) = 1`, and `D` is increasing past
/// `alpha`, so the root is bracketed by doubling from `alpha` and bisected.
pub fn critical_radius(params: &ProblemParams) -> Result<f64> {
    let regime = regime(params);
    if regime != Regime::BumpThenDecreasing {
        return Err(Error::WrongRegime {
            expected: Regime::BumpThenDecreasing.name(),
            actual: regime.name(),
        });
    }
    let a = alpha(params);
    let f = |r: f64| denominator_unchecked(params, r) - 1.0;
    let mut hi = 2.0 * a;
    let mut doublings = 1;
    while f(hi) <= 0.0 {
        if doublings >= MAX_DOUBLINGS {
            return Err(Error::BracketNotFound { limit: hi });
        }
        hi *= 2.0;
        doublings += 1;
    }
    bisect(f, a, hi, CRITICAL_RADIUS_TOL)
}

/// Evaluates both sides of the gradient-ratio criterion on `(B_1, B_R)`:
/// whether `|grad u*|/u* <= beta^(1/(p-1))` on the annulus, and whether
/// `E(B_1, B_rho) >= E(B_1, B_R)` for every `rho in [1, R]`. The two agree.
pub fn lemma5_predicate(params: &ProblemParams, radius: f64) -> Result<(bool, bool)> {
    if !(radius.is_finite() && radius > 1.0) {
        return Err(Error::Domain(format!("outer radius {radius} must be > 1")));
    }
    let grid = lemma5_grid(radius);
    let max_ratio = grid
        .iter()
        .map(|&r| normalized_ratio(params, radius, r))
        .fold(f64::NEG_INFINITY, f64::max);
    let e_outer = ball_energy(params, radius)?;
    let mut min_energy = f64::INFINITY;
    for &rho in &grid {
        min_energy = min_energy.min(ball_energy(params, rho)?);
    }
    Ok((
        max_ratio <= 1.0 + LEMMA5_SLACK,
        min_energy >= e_outer * (1.0 - LEMMA5_SLACK),
    ))
}

fn lemma5_grid(radius: f64) -> Vec<f64> {
    let mut grid = Vec::with_capacity(LEMMA5_GRID + 2);
    grid.push(1.0);
    let h = (radius - 1.0) / (LEMMA5_GRID + 1) as f64;
    grid.extend((1..=LEMMA5_GRID).map(|i| 1.0 + h * i as f64));
    grid.push(radius);
    grid
}

/// Smallest ball energy among admissible `(B_1, B_R)` with `|B_R| <= M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallBound {
    pub energy: f64,
    /// The minimizing outer radius; `1.0` means the pair `(B_1, B_1)`.
    pub radius: f64,
}

/// Minimum of `E(B_1, B_R)` over `1 <= R <= (M/omega_n)^(1/n)`, read off
/// from the regime structure.
pub fn ball_lower_bound(params: &ProblemParams, volume_cap: f64) -> Result<BallBound> {
    let omega = params.omega();
    if !(volume_cap.is_finite() && volume_cap >= omega * (1.0 - 1e-12)) {
        return Err(Error::Domain(format!(
            "volume cap {volume_cap} below the unit ball volume {omega}"
        )));
    }
    let r_max = (volume_cap / omega).powf(1.0 / params.dim()).max(1.0);
    let at_one = BallBound {
        energy: ball_energy(params, 1.0)?,
        radius: 1.0,
    };
    if r_max == 1.0 {
        return Ok(at_one);
    }
    let at_cap = BallBound {
        energy: ball_energy(params, r_max)?,
        radius: r_max,
    };
    Ok(match regime(params) {
        Regime::MonotoneDecreasing => at_cap,
        Regime::MinAtOne => at_one,
        Regime::BumpThenDecreasing => match critical_radius(params) {
            Ok(rc) if r_max >= rc => at_cap,
            Ok(_) | Err(Error::BracketNotFound { .. }) => at_one,
            Err(e) => return Err(e),
        },
    })
}

/// Samples of `R -> E(B_1, B_R)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BallEnergyCurve {
    pub params: ProblemParams,
    pub radii: Vec<f64>,
    pub energies: Vec<f64>,
}

impl BallEnergyCurve {
    /// Uniform samples on `[r_min, r_max]`, endpoints included.
    pub fn uniform(params: &ProblemParams, r_min: f64, r_max: f64, samples: usize) -> Result<Self> {
        if !(r_min >= 1.0 && r_max > r_min && r_max.is_finite()) {
            return Err(Error::Domain(format!(
                "need 1 <= r_min < r_max, got [{r_min}, {r_max}]"
            )));
        }
        if samples < 2 {
            return Err(Error::Domain("need at least two samples".into()));
        }
        let h = (r_max - r_min) / (samples - 1) as f64;
        let radii: Vec<f64> = (0..samples)
            .map(|i| if i + 1 == samples { r_max } else { r_min + h * i as f64 })
            .collect();
        let energies = radii
            .iter()
            .map(|&r| ball_energy(params, r))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            params: *params,
            radii,
            energies,
        })
    }
}
