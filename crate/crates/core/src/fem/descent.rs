//! Gradient descent with two-point (Barzilai–Borwein) step scaling, an
//! optional limited-memory quasi-Newton correction, and backtracking.

use std::collections::VecDeque;

use crate::error::{Error, Result};

const ARMIJO: f64 = 1e-4;
const WOLFE_LOW: f64 = 0.9;
const WOLFE_HIGH: f64 = 0.8;
/// Energy increase tolerated by the approximate-Wolfe acceptance, relative
/// to the current energy.
pub const ROUNDOFF_SLACK: f64 = 1e-14;
const MAX_BACKTRACKS: usize = 60;

#[derive(Debug, Clone, Copy)]
pub(crate) struct DescentSettings {
    pub max_iterations: usize,
    /// Absolute threshold on the Euclidean norm of the free gradient.
    pub gradient_threshold: f64,
    /// Number of stored curvature pairs; zero gives pure two-point steps.
    pub history: usize,
    pub record_trace: bool,
}

#[derive(Debug, Clone)]
pub(crate) struct DescentOutcome {
    pub energy: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Minimizes `objective` over the entries of `x` with `free[i]`; the others
/// are left untouched and their gradient entries ignored. `objective` writes
/// the full gradient into its second argument and returns the energy.
pub(crate) fn minimize<F>(
    x: &mut [f64],
    free: &[bool],
    settings: DescentSettings,
    mut objective: F,
) -> Result<DescentOutcome>
where
    F: FnMut(&[f64], &mut [f64]) -> Result<f64>,
{
    let n = x.len();
    let mut g = vec![0.0; n];
    let mut eval = |x: &[f64], g: &mut [f64]| -> Result<f64> {
        let f = objective(x, g)?;
        for (gi, &fr) in g.iter_mut().zip(free) {
            if !fr {
                *gi = 0.0;
            }
        }
        Ok(f)
    };
    let mut f = eval(x, &mut g)?;
    if !f.is_finite() {
        return Err(Error::NonFinite { iteration: 0 });
    }
    let mut trace = Vec::new();
    if settings.record_trace {
        trace.push(f);
    }
    let mut pairs: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut scale = None::<f64>;
    let mut trial = vec![0.0; n];
    let mut g_trial = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut iterations = 0;
    let mut gnorm = norm(&g);

    while iterations < settings.max_iterations {
        if gnorm <= settings.gradient_threshold {
            return Ok(DescentOutcome {
                energy: f,
                gradient_norm: gnorm,
                iterations,
                converged: true,
                trace,
            });
        }
        let gamma = scale.unwrap_or(1.0 / gnorm.max(1e-300));
        direction(&g, &pairs, gamma, &mut d);
        let mut slope = dot(&g, &d);
        if !(slope < 0.0) {
            pairs.clear();
            d.iter_mut().zip(&g).for_each(|(di, gi)| *di = -gamma * gi);
            slope = dot(&g, &d);
        }

        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            for i in 0..n {
                trial[i] = x[i] + step * d[i];
            }
            let ft = eval(&trial, &mut g_trial)?;
            if ft.is_finite() {
                let armijo = ft <= f + ARMIJO * step * slope;
                let approx_wolfe = ft <= f + ROUNDOFF_SLACK * f.abs() && {
                    let s_new = dot(&g_trial, &d);
                    s_new >= WOLFE_LOW * slope && s_new <= -WOLFE_HIGH * slope
                };
                if armijo || approx_wolfe {
                    accepted = Some(ft);
                    break;
                }
            }
            step *= 0.5;
        }
        let Some(ft) = accepted else {
            // no acceptable step at machine resolution
            break;
        };
        iterations += 1;

        let s: Vec<f64> = (0..n).map(|i| trial[i] - x[i]).collect();
        let y: Vec<f64> = (0..n).map(|i| g_trial[i] - g[i]).collect();
        let sy = dot(&s, &y);
        let yy = dot(&y, &y);
        x.copy_from_slice(&trial);
        std::mem::swap(&mut g, &mut g_trial);
        f = ft;
        gnorm = norm(&g);
        if !f.is_finite() || !gnorm.is_finite() {
            return Err(Error::NonFinite { iteration: iterations });
        }
        if settings.record_trace {
            trace.push(f);
        }
        if sy > 1e-300 && yy > 0.0 {
            scale = Some(sy / yy);
            if settings.history > 0 {
                if pairs.len() == settings.history {
                    pairs.pop_front();
                }
                pairs.push_back((s, y, 1.0 / sy));
            }
        }
    }
    Ok(DescentOutcome {
        energy: f,
        gradient_norm: gnorm,
        iterations,
        converged: gnorm <= settings.gradient_threshold,
        trace,
    })
}

/// Two-loop recursion: `d = -H g` with `H_0 = gamma I`.
fn direction(g: &[f64], pairs: &VecDeque<(Vec<f64>, Vec<f64>, f64)>, gamma: f64, d: &mut [f64]) {
    d.iter_mut().zip(g).for_each(|(di, gi)| *di = -gi);
    let mut alphas = Vec::with_capacity(pairs.len());
    for (s, y, rho) in pairs.iter().rev() {
        let a = rho * dot(s, d);
        d.iter_mut().zip(y).for_each(|(di, yi)| *di -= a * yi);
        alphas.push(a);
    }
    d.iter_mut().for_each(|di| *di *= gamma);
    for ((s, y, rho), a) in pairs.iter().zip(alphas.into_iter().rev()) {
        let b = rho * dot(y, d);
        d.iter_mut().zip(s).for_each(|(di, si)| *di += (a - b) * si);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadratic(diag: &[f64]) -> impl FnMut(&[f64], &mut [f64]) -> Result<f64> + '_ {
        move |x, g| {
            let mut f = 0.0;
            for i in 0..x.len() {
                g[i] = diag[i] * (x[i] - 1.0);
                f += 0.5 * diag[i] * (x[i] - 1.0).powi(2);
            }
            Ok(f)
        }
    }

    #[test]
    fn minimizes_ill_conditioned_quadratic() {
        let diag: Vec<f64> = (0..50).map(|i| 1.0 + 10.0 * i as f64).collect();
        for history in [0, 6] {
            let mut x = vec![0.0; 50];
            let free = vec![true; 50];
            let out = minimize(
                &mut x,
                &free,
                DescentSettings {
                    max_iterations: 5000,
                    gradient_threshold: 1e-10,
                    history,
                    record_trace: true,
                },
                quadratic(&diag),
            )
            .unwrap();
            assert!(out.converged, "history {history}");
            assert!(x.iter().all(|v| (v - 1.0).abs() < 1e-9));
            for w in out.trace.windows(2) {
                assert!(w[1] <= w[0] + ROUNDOFF_SLACK * w[0].abs());
            }
        }
    }

    #[test]
    fn fixed_entries_untouched() {
        let diag = vec![1.0, 2.0, 3.0];
        let mut x = vec![0.0, 5.0, 0.0];
        let free = vec![true, false, true];
        minimize(
            &mut x,
            &free,
            DescentSettings {
                max_iterations: 100,
                gradient_threshold: 1e-12,
                history: 3,
                record_trace: false,
            },
            quadratic(&diag),
        )
        .unwrap();
        assert_eq!(x[1], 5.0);
        assert!((x[0] - 1.0).abs() < 1e-10);
    }
}
