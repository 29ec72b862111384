//! The level-set functional on concentric balls, where the superlevel sets of
//! the minimizer are balls and every term has a one-dimensional form.

use crate::error::{Error, Result};
use crate::params::ProblemParams;
use crate::quadrature::GaussLegendre;
use crate::radial::{ball_energy, gradient_ratio_unchecked, level_radius, u_star};

const PANELS: usize = 32;
const ORDER: usize = 10;

/// `∫_{B_r} (|∇u*|/u*)^p` for `1 <= r <= R`; the ratio vanishes inside `B_1`.
pub fn ratio_power_integral(params: &ProblemParams, radius: f64, r: f64) -> Result<f64> {
    if !(radius > 1.0 && (1.0..=radius).contains(&r)) {
        return Err(Error::Domain(format!("r={r} outside [1, {radius}]")));
    }
    if r == 1.0 {
        return Ok(0.0);
    }
    let p = params.p();
    let n = params.dim();
    let rule = GaussLegendre::new(ORDER);
    Ok(params.sphere_area()
        * rule.integrate_composite(1.0, r, PANELS, |s| {
            s.powf(n - 1.0) * gradient_ratio_unchecked(params, radius, s).powf(p)
        }))
}

/// `H(t, scale * |∇u*|/u*)` on `(B_1, B_R)` for any `t in (0, 1)`.
///
/// For `t <= u*(R)` the superlevel set is all of `B_R`: no internal boundary
/// and the whole sphere `∂B_R` as external boundary.
pub fn h_radial(params: &ProblemParams, radius: f64, t: f64, scale: f64) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Domain(format!("level {t} outside (0, 1)")));
    }
    let p = params.p();
    let n = params.dim();
    let outer = u_star(params, radius, radius)?;
    if t <= outer {
        let area = ratio_power_integral(params, radius, radius)?;
        return Ok(-(p - 1.0) * scale.powf(p) * area
            + params.beta() * params.sphere_area() * radius.powf(n - 1.0));
    }
    let rho = level_radius(params, radius, t)?;
    let g = gradient_ratio_unchecked(params, radius, rho);
    let internal = params.sphere_area() * rho.powf(n - 1.0) * (scale * g).powf(p - 1.0);
    let area = ratio_power_integral(params, radius, rho)?;
    Ok(internal - (p - 1.0) * scale.powf(p) * area)
}

/// `H*(t, |∇u*|/u*)` for `t in (u*(R), 1)`, where the level sphere lies
/// strictly inside `B_R`. Equal to `E(B_1, B_R)` for every such `t`.
pub fn h_star_radial(params: &ProblemParams, radius: f64, t: f64) -> Result<f64> {
    let outer = u_star(params, radius, radius)?;
    if !(t > outer && t < 1.0) {
        return Err(Error::Domain(format!("level {t} outside ({outer}, 1)")));
    }
    h_radial(params, radius, t, 1.0)
}

/// `∫_0^1 t^(p-1) (H(t, scale |∇u*|/u*) - E(B_1, B_R)) dt`.
pub fn weighted_h_integral_radial(params: &ProblemParams, radius: f64, scale: f64) -> Result<f64> {
    let p = params.p();
    let energy = ball_energy(params, radius)?;
    let outer = u_star(params, radius, radius)?;
    // H is constant below u*(R)
    let h0 = h_radial(params, radius, 0.5 * outer, scale)?;
    let low = outer.powf(p) / p * (h0 - energy);
    let rule = GaussLegendre::new(8);
    let mut err = None;
    let high = rule.integrate_composite(outer, 1.0, 64, |t| {
        match h_radial(params, radius, t, scale) {
            Ok(h) => t.powf(p - 1.0) * (h - energy),
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(low + high),
    }
}
