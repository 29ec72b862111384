use crate::error::{Error, Result};
use crate::mesh::AnnularMesh;
use crate::params::ProblemParams;
use crate::quadrature::GaussLegendre;

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

#[derive(Debug, Clone, Copy)]
struct ElementGeometry {
    area: f64,
    /// Gradients of the three barycentric basis functions.
    grads: [[f64; 2]; 3],
}

/// Energy terms of a nodal field, before summing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyParts {
    /// `Σ |T| (|∇v|^2 + ε^2)^(p/2)`.
    pub gradient: f64,
    /// `β ∮ |v|^p`.
    pub boundary: f64,
}

impl EnergyParts {
    pub fn total(&self) -> f64 {
        self.gradient + self.boundary
    }
}

/// Precomputed P1 data for one mesh.
#[derive(Debug, Clone)]
pub struct P1Assembler {
    elements: Vec<ElementGeometry>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<(usize, usize, f64)>,
    node_count: usize,
    rule_nodes: Vec<f64>,
    rule_weights: Vec<f64>,
}

impl P1Assembler {
    /// `boundary_order` is the number of Gauss–Legendre points per outer edge.
    pub fn new(mesh: &AnnularMesh, boundary_order: usize) -> Self {
        let elements = mesh
            .triangles
            .iter()
            .map(|&[a, b, c]| {
                let (p0, p1, p2) = (mesh.nodes[a], mesh.nodes[b], mesh.nodes[c]);
                let twice = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
                let inv = 1.0 / twice;
                ElementGeometry {
                    area: 0.5 * twice,
                    grads: [
                        [(p1[1] - p2[1]) * inv, (p2[0] - p1[0]) * inv],
                        [(p2[1] - p0[1]) * inv, (p0[0] - p2[0]) * inv],
                        [(p0[1] - p1[1]) * inv, (p1[0] - p0[0]) * inv],
                    ],
                }
            })
            .collect();
        let rule = GaussLegendre::new(boundary_order.max(1));
        // map to [0, 1]
        let rule_nodes = rule.nodes().iter().map(|x| 0.5 * (x + 1.0)).collect();
        let rule_weights = rule.weights().iter().map(|w| 0.5 * w).collect();
        Self {
            elements,
            triangles: mesh.triangles.clone(),
            edges: mesh.outer_edges.iter().map(|e| (e.a, e.b, e.length)).collect(),
            node_count: mesh.node_count(),
            rule_nodes,
            rule_weights,
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    fn check(&self, values: &[f64]) -> Result<()> {
        if values.len() != self.node_count {
            return Err(Error::SizeMismatch {
                expected: self.node_count,
                actual: values.len(),
            });
        }
        Ok(())
    }

    /// Constant gradient of the P1 field on triangle `t`.
    pub fn element_gradient(&self, t: usize, values: &[f64]) -> [f64; 2] {
        let e = &self.elements[t];
        let tri = &self.triangles[t];
        let mut g = [0.0; 2];
        for k in 0..3 {
            g[0] += values[tri[k]] * e.grads[k][0];
            g[1] += values[tri[k]] * e.grads[k][1];
        }
        g
    }

    /// `Σ_edges ∫ |v|^q` along `∂Ω` with `v` linear on each edge.
    pub fn boundary_power_integral(&self, values: &[f64], q: f64) -> Result<f64> {
        self.check(values)?;
        let mut acc = CompensatedSum::default();
        for &(a, b, len) in &self.edges {
            let (va, vb) = (values[a], values[b]);
            let mut s = 0.0;
            for (x, w) in self.rule_nodes.iter().zip(&self.rule_weights) {
                s += w * ((1.0 - x) * va + x * vb).abs().powf(q);
            }
            acc.add(len * s);
        }
        Ok(acc.value())
    }

    /// Regularized discrete energy, split into its two terms.
    pub fn energy_parts(&self, values: &[f64], params: &ProblemParams, epsilon: f64) -> Result<EnergyParts> {
        self.check(values)?;
        let half_p = 0.5 * params.p();
        let eps2 = epsilon * epsilon;
        let mut grad = CompensatedSum::default();
        for t in 0..self.elements.len() {
            let g = self.element_gradient(t, values);
            let q = g[0] * g[0] + g[1] * g[1] + eps2;
            grad.add(self.elements[t].area * q.powf(half_p));
        }
        let boundary = params.beta() * self.boundary_power_integral(values, params.p())?;
        Ok(EnergyParts {
            gradient: grad.value(),
            boundary,
        })
    }

    pub fn energy(&self, values: &[f64], params: &ProblemParams, epsilon: f64) -> Result<f64> {
        Ok(self.energy_parts(values, params, epsilon)?.total())
    }

    /// Energy and its gradient with respect to every nodal value (including
    /// nodes the caller later treats as fixed).
    pub fn energy_and_gradient(
        &self,
        values: &[f64],
        params: &ProblemParams,
        epsilon: f64,
        gradient: &mut [f64],
    ) -> Result<f64> {
        self.check(values)?;
        self.check(gradient)?;
        gradient.iter_mut().for_each(|g| *g = 0.0);
        let p = params.p();
        let half_p = 0.5 * p;
        let eps2 = epsilon * epsilon;
        let mut energy = CompensatedSum::default();
        for (t, tri) in self.triangles.iter().enumerate() {
            let e = &self.elements[t];
            let g = self.element_gradient(t, values);
            let q = g[0] * g[0] + g[1] * g[1] + eps2;
            energy.add(e.area * q.powf(half_p));
            if q > 0.0 {
                let coef = e.area * p * q.powf(half_p - 1.0);
                for k in 0..3 {
                    gradient[tri[k]] += coef * (g[0] * e.grads[k][0] + g[1] * e.grads[k][1]);
                }
            }
        }
        let beta = params.beta();
        let mut boundary = CompensatedSum::default();
        for &(a, b, len) in &self.edges {
            let (va, vb) = (values[a], values[b]);
            let (mut s, mut da, mut db) = (0.0, 0.0, 0.0);
            for (x, w) in self.rule_nodes.iter().zip(&self.rule_weights) {
                let v = (1.0 - x) * va + x * vb;
                let av = v.abs();
                s += w * av.powf(p);
                if av > 0.0 {
                    let dv = w * p * av.powf(p - 1.0) * v.signum();
                    da += dv * (1.0 - x);
                    db += dv * x;
                }
            }
            boundary.add(len * s);
            gradient[a] += beta * len * da;
            gradient[b] += beta * len * db;
        }
        energy.add(beta * boundary.value());
        Ok(energy.value())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        s.add(1.0);
        for _ in 0..1000 {
            s.add(1e-17);
        }
        s.add(-1.0);
        assert!((s.value() - 1e-14).abs() < 1e-20);
    }
}
