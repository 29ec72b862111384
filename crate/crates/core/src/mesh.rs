//! Structured triangulation of the annular region between `∂K` and `∂Ω`.
//!
//! Nodes sit on `n_radial + 1` levels of the transfinite map
//! `x(theta, s) = (1 - s) gamma_K(theta) + s gamma_Omega(theta)`, where both
//! curves are parametrized by the angle about the center of `K`. Node
//! `(i, j)` (angle index `i`, level `j`) has index `j * n_theta + i`.

use std::collections::HashSet;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{Point, ShapePair};

const DEGENERATE_AREA: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuterEdge {
    pub a: usize,
    pub b: usize,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnularMesh {
    pub nodes: Vec<Point>,
    /// Counter-clockwise vertex triples.
    pub triangles: Vec<[usize; 3]>,
    /// Nodes on `∂K`, in angular order.
    pub inner_nodes: Vec<usize>,
    /// Edges on `∂Ω`, in angular order.
    pub outer_edges: Vec<OuterEdge>,
    pub n_theta: usize,
    pub n_radial: usize,
}

fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

fn dist(a: Point, b: Point) -> f64 {
    (b[0] - a[0]).hypot(b[1] - a[1])
}

/// Area and centroid of a closed polygon given by its vertices.
pub fn polygon_area_centroid(points: &[Point]) -> (f64, Point) {
    let n = points.len();
    let mut area = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    for i in 0..n {
        let a = points[i];
        let b = points[(i + 1) % n];
        let cross = a[0] * b[1] - b[0] * a[1];
        area += cross;
        cx += (a[0] + b[0]) * cross;
        cy += (a[1] + b[1]) * cross;
    }
    area *= 0.5;
    if area == 0.0 {
        return (0.0, points.first().copied().unwrap_or([0.0, 0.0]));
    }
    (area, [cx / (6.0 * area), cy / (6.0 * area)])
}

pub fn build_annular_mesh(pair: &ShapePair, n_theta: usize, n_radial: usize) -> Result<AnnularMesh> {
    if pair.is_degenerate() {
        return Err(Error::Mesh("K and Omega coincide; there is no annulus to mesh".into()));
    }
    if n_theta < 16 || n_radial < 2 {
        return Err(Error::Mesh(format!(
            "need n_theta >= 16 and n_radial >= 2, got {n_theta} x {n_radial}"
        )));
    }
    let compact = pair.compact();
    let mut inner = Vec::with_capacity(n_theta);
    let mut outer = Vec::with_capacity(n_theta);
    for i in 0..n_theta {
        let theta = 2.0 * PI * i as f64 / n_theta as f64;
        inner.push(compact.point(theta));
        outer.push(pair.domain_point_about_compact(theta)?);
    }

    let mut nodes = Vec::with_capacity(n_theta * (n_radial + 1));
    for j in 0..=n_radial {
        let s = j as f64 / n_radial as f64;
        for i in 0..n_theta {
            nodes.push(if j == 0 {
                inner[i]
            } else if j == n_radial {
                outer[i]
            } else {
                [
                    (1.0 - s) * inner[i][0] + s * outer[i][0],
                    (1.0 - s) * inner[i][1] + s * outer[i][1],
                ]
            });
        }
    }

    let idx = |i: usize, j: usize| j * n_theta + (i % n_theta);
    let mut triangles = Vec::with_capacity(2 * n_theta * n_radial);
    for j in 0..n_radial {
        for i in 0..n_theta {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            let quad = if dist(nodes[a], nodes[c]) <= dist(nodes[b], nodes[d]) {
                [[a, b, c], [a, c, d]]
            } else {
                [[a, b, d], [b, c, d]]
            };
            for mut tri in quad {
                if signed_area(nodes[tri[0]], nodes[tri[1]], nodes[tri[2]]) < 0.0 {
                    tri.swap(1, 2);
                }
                triangles.push(tri);
            }
        }
    }

    let inner_nodes = (0..n_theta).map(|i| idx(i, 0)).collect();
    let outer_edges = (0..n_theta)
        .map(|i| {
            let (a, b) = (idx(i, n_radial), idx(i + 1, n_radial));
            OuterEdge {
                a,
                b,
                length: dist(nodes[a], nodes[b]),
            }
        })
        .collect();

    let mesh = AnnularMesh {
        nodes,
        triangles,
        inner_nodes,
        outer_edges,
        n_theta,
        n_radial,
    };
    mesh.check_invariants()?;
    Ok(mesh)
}

impl AnnularMesh {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Radial level `j` of a node; `0` on `∂K`, `n_radial` on `∂Ω`.
    pub fn level_of(&self, node: usize) -> usize {
        node / self.n_theta
    }

    /// Transfinite coordinate `s in [0, 1]` of a node.
    pub fn transfinite_coordinate(&self, node: usize) -> f64 {
        self.level_of(node) as f64 / self.n_radial as f64
    }

    pub fn is_inner(&self, node: usize) -> bool {
        node < self.n_theta
    }

    pub fn outer_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.outer_edges.iter().map(|e| e.a)
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.nodes[a], self.nodes[b], self.nodes[c]]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_points(t);
        signed_area(a, b, c)
    }

    /// Area of the triangulated annulus.
    pub fn meshed_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    pub fn outer_perimeter(&self) -> f64 {
        self.outer_edges.iter().map(|e| e.length).sum()
    }

    /// Area and centroid of the polygon spanned by the inner nodes.
    pub fn compact_polygon(&self) -> (f64, Point) {
        let pts: Vec<Point> = self.inner_nodes.iter().map(|&i| self.nodes[i]).collect();
        polygon_area_centroid(&pts)
    }

    pub fn domain_polygon(&self) -> (f64, Point) {
        let pts: Vec<Point> = self.outer_nodes().map(|i| self.nodes[i]).collect();
        polygon_area_centroid(&pts)
    }

    /// Longest triangle edge.
    pub fn max_edge_length(&self) -> f64 {
        self.triangles
            .iter()
            .flat_map(|&[a, b, c]| [(a, b), (b, c), (c, a)])
            .map(|(a, b)| dist(self.nodes[a], self.nodes[b]))
            .fold(0.0, f64::max)
    }

    fn bbox_diag_sq(&self) -> f64 {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in &self.nodes {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (hi[0] - lo[0]).powi(2) + (hi[1] - lo[1]).powi(2)
    }

    fn edge_set(&self) -> HashSet<(usize, usize)> {
        self.triangles
            .iter()
            .flat_map(|&[a, b, c]| [(a, b), (b, c), (c, a)])
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect()
    }

    /// Number of distinct edges in the triangulation.
    pub fn edge_count(&self) -> usize {
        self.edge_set().len()
    }

    /// Checks orientation and non-degeneracy, closure of both boundary
    /// polygons and the Euler characteristic of an annulus.
    pub fn check_invariants(&self) -> Result<()> {
        let tol = DEGENERATE_AREA * self.bbox_diag_sq();
        for t in 0..self.triangles.len() {
            let area = self.triangle_area(t);
            if !(area > tol) {
                return Err(Error::Mesh(format!("degenerate or inverted triangle {t} (area {area:e})")));
            }
        }
        let m = self.outer_edges.len();
        for (k, e) in self.outer_edges.iter().enumerate() {
            if e.b != self.outer_edges[(k + 1) % m].a {
                return Err(Error::Mesh("outer boundary edges do not close".into()));
            }
        }
        let inner: HashSet<usize> = self.inner_nodes.iter().copied().collect();
        if inner.len() != self.n_theta {
            return Err(Error::Mesh("inner boundary nodes are not distinct".into()));
        }
        let edges = self.edge_set();
        for k in 0..self.inner_nodes.len() {
            let a = self.inner_nodes[k];
            let b = self.inner_nodes[(k + 1) % self.inner_nodes.len()];
            if !edges.contains(&(a.min(b), a.max(b))) {
                return Err(Error::Mesh("inner boundary nodes do not form a closed polygon".into()));
            }
        }
        let euler = self.nodes.len() as i64 - edges.len() as i64 + self.triangles.len() as i64;
        if euler != 0 {
            return Err(Error::Mesh(format!("Euler characteristic {euler}, expected 0")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{validate_pair, StarShape};

    fn concentric(r: f64) -> ShapePair {
        validate_pair(
            StarShape::circle([0.0, 0.0], 1.0).unwrap(),
            StarShape::circle([0.0, 0.0], r).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn counts() {
        let mesh = build_annular_mesh(&concentric(2.0), 64, 8).unwrap();
        assert_eq!(mesh.node_count(), 64 * 9);
        assert_eq!(mesh.triangles.len(), 64 * 8 * 2);
        assert_eq!(mesh.inner_nodes.len(), 64);
        assert_eq!(mesh.outer_edges.len(), 64);
        assert_eq!(
            mesh.node_count() as i64 - mesh.edge_count() as i64 + mesh.triangles.len() as i64,
            0
        );
    }

    #[test]
    fn area_and_perimeter_converge() {
        let mesh = build_annular_mesh(&concentric(2.0), 256, 8).unwrap();
        let exact = 3.0 * PI;
        assert!((mesh.meshed_area() - exact).abs() < 1e-3 * exact);
        assert!((mesh.outer_perimeter() - 4.0 * PI).abs() < 1e-3 * 4.0 * PI);
    }

    #[test]
    fn boundary_nodes_on_curves() {
        let k = StarShape::new([0.1, 0.0], 1.0, vec![0.05, 0.0, 0.08], vec![0.0, 0.03]).unwrap();
        let o = StarShape::new([0.0, 0.2], 2.2, vec![0.0, 0.1], vec![0.05]).unwrap();
        let pair = validate_pair(k, o).unwrap();
        let mesh = build_annular_mesh(&pair, 64, 4).unwrap();
        for &i in &mesh.inner_nodes {
            assert!(pair.compact().level(mesh.nodes[i]).abs() < 1e-12);
        }
        for i in mesh.outer_nodes() {
            assert!(pair.domain().level(mesh.nodes[i]).abs() < 1e-11);
        }
        let (area, _) = mesh.compact_polygon();
        let (outer, _) = mesh.domain_polygon();
        assert!((mesh.meshed_area() - (outer - area)).abs() < 1e-12 * outer);
    }

    #[test]
    fn rejects_bad_resolution_and_degenerate_pair() {
        assert!(build_annular_mesh(&concentric(2.0), 8, 4).is_err());
        assert!(build_annular_mesh(&concentric(2.0), 32, 1).is_err());
        let unit = StarShape::circle([0.0, 0.0], 1.0).unwrap();
        let pair = validate_pair(unit.clone(), unit).unwrap();
        assert!(build_annular_mesh(&pair, 32, 4).is_err());
    }

    #[test]
    fn polygon_centroid_square() {
        let (a, c) = polygon_area_centroid(&[[0.0, 0.0], [2.0, 0.0], [2.0, 2.0], [0.0, 2.0]]);
        assert_eq!(a, 4.0);
        assert_eq!(c, [1.0, 1.0]);
    }
}
