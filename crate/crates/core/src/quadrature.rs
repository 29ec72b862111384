//! Gauss–Legendre rules on [-1, 1] and composite integration helpers.

use std::f64::consts::PI;

#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the `order`-point rule by Newton iteration on the Legendre
    /// polynomial, starting from the Chebyshev-like initial guesses.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "quadrature order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integrates `f` over `[a, b]` with a single application of the rule.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// Composite rule on `panels` equal subintervals of `[a, b]`.
    pub fn integrate_composite<F: FnMut(f64) -> f64>(
        &self,
        a: f64,
        b: f64,
        panels: usize,
        mut f: F,
    ) -> f64 {
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|k| {
                let lo = a + h * k as f64;
                self.integrate(lo, lo + h, &mut f)
            })
            .sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Trapezoid rule for the periodic integrand sampled on `samples` equispaced
/// angles in `[0, 2 pi)`. Spectrally accurate for trigonometric polynomials.
pub fn periodic_trapezoid<F: FnMut(f64) -> f64>(samples: usize, mut f: F) -> f64 {
    let h = 2.0 * PI / samples as f64;
    (0..samples).map(|i| f(h * i as f64)).sum::<f64>() * h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        for order in 1..=20 {
            let rule = GaussLegendre::new(order);
            let s: f64 = rule.weights().iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "order {order}: {s}");
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        for order in 1..=10 {
            let rule = GaussLegendre::new(order);
            for deg in 0..(2 * order) {
                let exact = (2.0f64.powi(deg as i32 + 1) - 0.0) / (deg as f64 + 1.0);
                let got = rule.integrate(0.0, 2.0, |x| x.powi(deg as i32));
                assert!(
                    (got - exact).abs() < 1e-11 * exact.max(1.0),
                    "order {order} deg {deg}: {got} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn four_point_nodes() {
        let rule = GaussLegendre::new(4);
        let a = (3.0 / 7.0 - 2.0 / 7.0 * (6.0f64 / 5.0).sqrt()).sqrt();
        let b = (3.0 / 7.0 + 2.0 / 7.0 * (6.0f64 / 5.0).sqrt()).sqrt();
        assert!((rule.nodes()[3] - b).abs() < 1e-15);
        assert!((rule.nodes()[2] - a).abs() < 1e-15);
        assert!((rule.nodes()[0] + b).abs() < 1e-15);
    }

    #[test]
    fn composite_smooth() {
        let rule = GaussLegendre::new(8);
        let got = rule.integrate_composite(0.0, PI, 16, f64::sin);
        assert!((got - 2.0).abs() < 1e-14);
    }

    #[test]
    fn trapezoid_periodic() {
        let got = periodic_trapezoid(64, |t| (3.0 * t).cos().powi(2));
        assert!((got - PI).abs() < 1e-13);
    }
}
