//! The level-set functional
//! `H(t, φ) = ∫_{∂_i U_t} |φ|^(p-1) - (p-1) ∫_{U_t} |φ|^p + β H^1(∂_e U_t)`
//! with `U_t = {u > t}`, `∂_i U_t` the part of its boundary inside `Ω` and
//! `∂_e U_t` the part on `∂Ω`.
//!
//! Discrete solutions are piecewise linear, so `U_t` is cut out of each
//! triangle exactly and `∂_i U_t` is a union of straight segments. Test
//! fields `φ` are constant per triangle, with a separate value on `K`.

pub mod radial;

use log::warn;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fem::{CompensatedSum, FemSolution};
use crate::geometry::Point;
use crate::params::{unit_ball_volume, ProblemParams};
use crate::radial::{gradient_ratio_unchecked, lemma5_predicate};

pub use radial::{h_radial, h_star_radial, ratio_power_integral, weighted_h_integral_radial};

/// Number of levels in a `t`-scan.
pub const SCAN_LEVELS: usize = 200;
/// Shift applied to a level that coincides with a nodal value.
pub const TIE_SHIFT: f64 = 1e-12;
const AREA_TABLE_LEVELS: usize = 4096;

/// A test field, constant on each triangle of the annulus and on `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiField {
    pub per_triangle: Vec<f64>,
    pub on_compact: f64,
}

impl PhiField {
    pub fn constant(value: f64, triangles: usize) -> Self {
        Self {
            per_triangle: vec![value; triangles],
            on_compact: value,
        }
    }

    /// `|∇u| / u` per triangle, with `u` taken as the vertex mean; zero on `K`.
    pub fn solution_ratio(solution: &FemSolution) -> Self {
        let mesh = &solution.mesh;
        let per_triangle = (0..mesh.triangles.len())
            .map(|t| {
                let pts = mesh.triangle_points(t);
                let vals = triangle_values(solution, t);
                let g = p1_gradient(&pts, &vals);
                let mean = (vals[0] + vals[1] + vals[2]) / 3.0;
                let norm = g[0].hypot(g[1]);
                if norm == 0.0 {
                    0.0
                } else {
                    norm / mean.max(f64::MIN_POSITIVE)
                }
            })
            .collect();
        Self {
            per_triangle,
            on_compact: 0.0,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            per_triangle: self.per_triangle.iter().map(|v| v * factor).collect(),
            on_compact: self.on_compact * factor,
        }
    }
}

fn triangle_values(solution: &FemSolution, t: usize) -> [f64; 3] {
    let [a, b, c] = solution.mesh.triangles[t];
    [solution.values[a], solution.values[b], solution.values[c]]
}

fn p1_gradient(pts: &[Point; 3], vals: &[f64; 3]) -> [f64; 2] {
    let [p0, p1, p2] = *pts;
    let twice = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
    let (d1, d2) = (vals[1] - vals[0], vals[2] - vals[0]);
    [
        (d1 * (p2[1] - p0[1]) - d2 * (p1[1] - p0[1])) / twice,
        (d2 * (p1[0] - p0[0]) - d1 * (p2[0] - p0[0])) / twice,
    ]
}

fn tri_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])).abs()
}

fn lerp(a: Point, b: Point, s: f64) -> Point {
    [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
}

/// Part of one triangle where the linear field exceeds `t`.
#[derive(Debug, Clone, Copy, Default)]
struct Piece {
    area: f64,
    moment: [f64; 2],
    segment: Option<(Point, Point)>,
}

fn add_triangle(piece: &mut Piece, a: Point, b: Point, c: Point, sign: f64) {
    let area = tri_area(a, b, c);
    piece.area += sign * area;
    piece.moment[0] += sign * area * (a[0] + b[0] + c[0]) / 3.0;
    piece.moment[1] += sign * area * (a[1] + b[1] + c[1]) / 3.0;
}

fn clip(pts: &[Point; 3], vals: &[f64; 3], t: f64) -> Piece {
    let above: Vec<usize> = (0..3).filter(|&k| vals[k] > t).collect();
    let mut piece = Piece::default();
    let crossing = |i: usize, j: usize| lerp(pts[i], pts[j], (t - vals[i]) / (vals[j] - vals[i]));
    match above.len() {
        0 => {}
        3 => add_triangle(&mut piece, pts[0], pts[1], pts[2], 1.0),
        1 => {
            let a = above[0];
            let (b, c) = ((a + 1) % 3, (a + 2) % 3);
            let (qb, qc) = (crossing(a, b), crossing(a, c));
            add_triangle(&mut piece, pts[a], qb, qc, 1.0);
            piece.segment = Some((qb, qc));
        }
        _ => {
            let below = (0..3).find(|&k| vals[k] <= t).expect("one vertex below");
            let (b, c) = ((below + 1) % 3, (below + 2) % 3);
            let (qb, qc) = (crossing(below, b), crossing(below, c));
            add_triangle(&mut piece, pts[0], pts[1], pts[2], 1.0);
            add_triangle(&mut piece, pts[below], qb, qc, -1.0);
            piece.segment = Some((qb, qc));
        }
    }
    piece
}

fn seg_len(s: &(Point, Point)) -> f64 {
    (s.1[0] - s.0[0]).hypot(s.1[1] - s.0[1])
}

/// Moves `t` off every nodal value.
pub fn effective_level(values: &[f64], t: f64) -> f64 {
    let mut level = t;
    while values.contains(&level) {
        level += TIE_SHIFT;
    }
    level
}

/// A level segment of `∂_i U_t`, tagged with the triangle containing it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelSegment {
    pub triangle: usize,
    pub a: Point,
    pub b: Point,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelSetGeometry {
    /// The level actually used, after any tie shift.
    pub t: f64,
    pub internal_curves: Vec<LevelSegment>,
    /// `H^1(∂_i U_t)`.
    pub internal_length: f64,
    /// `|U_t|`, including `K`.
    pub superlevel_area: f64,
    /// `H^1(∂_e U_t)`.
    pub external_length: f64,
    pub centroid: Point,
    /// `|U_t ∩ T|` for every triangle `T` of the mesh.
    pub clipped_area: Vec<f64>,
    pub from_converged: bool,
}

/// Exact superlevel geometry of the piecewise-linear field at level `t`.
pub fn extract_level_set(solution: &FemSolution, t: f64) -> Result<LevelSetGeometry> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Domain(format!("level {t} outside (0, 1)")));
    }
    if !solution.converged {
        warn!("extracting level {t} from an unconverged solution");
    }
    let level = effective_level(&solution.values, t);
    let mesh = &solution.mesh;
    let (k_area, k_centroid) = mesh.compact_polygon();

    let mut area = CompensatedSum::default();
    area.add(k_area);
    let mut moment = [k_area * k_centroid[0], k_area * k_centroid[1]];
    let mut internal = CompensatedSum::default();
    let mut segments = Vec::new();
    let mut clipped_area = Vec::with_capacity(mesh.triangles.len());
    for tri in 0..mesh.triangles.len() {
        let piece = clip(&mesh.triangle_points(tri), &triangle_values(solution, tri), level);
        area.add(piece.area);
        moment[0] += piece.moment[0];
        moment[1] += piece.moment[1];
        clipped_area.push(piece.area);
        if let Some(seg) = piece.segment {
            internal.add(seg_len(&seg));
            segments.push(LevelSegment {
                triangle: tri,
                a: seg.0,
                b: seg.1,
            });
        }
    }

    let mut external = CompensatedSum::default();
    for e in &mesh.outer_edges {
        let (va, vb) = (solution.values[e.a], solution.values[e.b]);
        let fraction = match (va > level, vb > level) {
            (true, true) => 1.0,
            (false, false) => 0.0,
            (true, false) => (va - level) / (va - vb),
            (false, true) => (vb - level) / (vb - va),
        };
        external.add(e.length * fraction);
    }

    let total = area.value();
    Ok(LevelSetGeometry {
        t: level,
        internal_curves: segments,
        internal_length: internal.value(),
        superlevel_area: total,
        external_length: external.value(),
        centroid: [moment[0] / total, moment[1] / total],
        clipped_area,
        from_converged: solution.converged,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HEvaluation {
    pub t: f64,
    pub h_value: f64,
    /// `∫_{∂_i U_t} |φ|^(p-1)`.
    pub internal: f64,
    /// `-(p-1) ∫_{U_t} |φ|^p`.
    pub area: f64,
    /// `β H^1(∂_e U_t)`.
    pub external: f64,
}

fn check_phi(solution: &FemSolution, phi: &PhiField) -> Result<()> {
    let expected = solution.mesh.triangles.len();
    if phi.per_triangle.len() != expected {
        return Err(Error::SizeMismatch {
            expected,
            actual: phi.per_triangle.len(),
        });
    }
    Ok(())
}

/// `H(t, φ)` evaluated on a precomputed level set.
pub fn h_from_geometry(
    geometry: &LevelSetGeometry,
    k_area: f64,
    phi: &PhiField,
    params: &ProblemParams,
) -> HEvaluation {
    let p = params.p();
    let mut internal = CompensatedSum::default();
    for seg in &geometry.internal_curves {
        let len = (seg.b[0] - seg.a[0]).hypot(seg.b[1] - seg.a[1]);
        internal.add(phi.per_triangle[seg.triangle].abs().powf(p - 1.0) * len);
    }
    let mut bulk = CompensatedSum::default();
    bulk.add(phi.on_compact.abs().powf(p) * k_area);
    for (a, v) in geometry.clipped_area.iter().zip(&phi.per_triangle) {
        if *a != 0.0 {
            bulk.add(v.abs().powf(p) * a);
        }
    }
    let internal = internal.value();
    let area = -(p - 1.0) * bulk.value();
    let external = params.beta() * geometry.external_length;
    HEvaluation {
        t: geometry.t,
        h_value: internal + area + external,
        internal,
        area,
        external,
    }
}

pub fn h_function(solution: &FemSolution, t: f64, phi: &PhiField, params: &ProblemParams) -> Result<HEvaluation> {
    check_phi(solution, phi)?;
    let geometry = extract_level_set(solution, t)?;
    let (k_area, _) = solution.mesh.compact_polygon();
    Ok(h_from_geometry(&geometry, k_area, phi, params))
}

/// Smallest nodal value; by the maximum principle it sits on `∂Ω`.
fn field_min(solution: &FemSolution) -> f64 {
    solution.values.iter().copied().fold(f64::INFINITY, f64::min)
}

/// [`SCAN_LEVELS`] equispaced levels strictly inside `(min u, 1)`.
pub fn scan_levels(solution: &FemSolution) -> Vec<f64> {
    let lo = field_min(solution);
    if !(lo < 1.0) {
        return Vec::new();
    }
    let h = (1.0 - lo) / (SCAN_LEVELS + 1) as f64;
    (1..=SCAN_LEVELS).map(|k| lo + h * k as f64).collect()
}

/// `H(t, φ)` on every level of [`scan_levels`].
pub fn h_scan(solution: &FemSolution, phi: &PhiField, params: &ProblemParams) -> Result<Vec<HEvaluation>> {
    check_phi(solution, phi)?;
    let (k_area, _) = solution.mesh.compact_polygon();
    scan_levels(solution)
        .into_par_iter()
        .map(|t| {
            let geometry = extract_level_set(solution, t)?;
            Ok(h_from_geometry(&geometry, k_area, phi, params))
        })
        .collect()
}

/// The scanned level minimizing `H(t, φ)`; a level with
/// `H(t, φ) <= E` is guaranteed in the continuum.
pub fn lemma2_search(solution: &FemSolution, params: &ProblemParams, phi: &PhiField) -> Result<(f64, f64)> {
    let scan = h_scan(solution, phi, params)?;
    scan.iter()
        .min_by(|a, b| a.h_value.total_cmp(&b.h_value))
        .map(|e| (e.t, e.h_value))
        .ok_or_else(|| Error::Domain("empty level scan (field is identically one)".into()))
}

/// `∫_0^1 t^(p-1) (H(t, φ) - E) dt` with `E` the discrete energy.
///
/// Below the field minimum `U_t` is the whole domain and `H` is constant;
/// above it the scan is integrated with the trapezoid rule up to `1^-`.
pub fn weighted_h_integral(solution: &FemSolution, params: &ProblemParams, phi: &PhiField) -> Result<f64> {
    check_phi(solution, phi)?;
    let p = params.p();
    let energy = solution.energy_total;
    let lo = field_min(solution);
    let (k_area, _) = solution.mesh.compact_polygon();
    let eval = |t: f64| -> Result<f64> {
        let geometry = extract_level_set(solution, t)?;
        Ok(h_from_geometry(&geometry, k_area, phi, params).h_value)
    };
    let h_low = eval((0.5 * lo).max(f64::MIN_POSITIVE))?;
    let mut total = lo.powf(p) / p * (h_low - energy);

    let mut levels = vec![lo];
    levels.extend(scan_levels(solution));
    levels.push(1.0 - 1e-9);
    let values: Vec<f64> = levels
        .par_iter()
        .map(|&t| eval(t).map(|h| t.powf(p - 1.0) * (h - energy)))
        .collect::<Result<_>>()?;
    for k in 1..levels.len() {
        total += 0.5 * (levels[k] - levels[k - 1]) * (values[k] + values[k - 1]);
    }
    Ok(total)
}

/// Largest distance between the centroid of a scanned `U_t` and that of the
/// mid-scan level; zero when the field is identically one.
pub fn centroid_drift(solution: &FemSolution) -> Result<f64> {
    let levels = scan_levels(solution);
    if levels.is_empty() {
        return Ok(0.0);
    }
    let mid = 0.5 * (field_min(solution) + 1.0);
    let reference = extract_level_set(solution, mid)?.centroid;
    let drifts: Vec<f64> = levels
        .par_iter()
        .map(|&t| {
            extract_level_set(solution, t).map(|g| (g.centroid[0] - reference[0]).hypot(g.centroid[1] - reference[1]))
        })
        .collect::<Result<_>>()?;
    Ok(drifts.into_iter().fold(0.0, f64::max))
}

/// Volume radius `(|U| / ω_n)^(1/n)`.
pub fn r_of_t(superlevel_volume: f64, n: u32) -> Result<f64> {
    if !(superlevel_volume >= 0.0 && superlevel_volume.is_finite()) {
        return Err(Error::Domain(format!("volume {superlevel_volume} must be non-negative")));
    }
    Ok((superlevel_volume / unit_ball_volume(n)).powf(1.0 / n as f64))
}

/// `t -> |U_t|` tabulated on a uniform grid and interpolated linearly.
#[derive(Debug, Clone)]
pub struct SuperlevelAreaTable {
    lo: f64,
    step: f64,
    areas: Vec<f64>,
}

impl SuperlevelAreaTable {
    pub fn new(solution: &FemSolution) -> Result<Self> {
        let lo = field_min(solution);
        let (k_area, _) = solution.mesh.compact_polygon();
        let (domain_area, _) = solution.mesh.domain_polygon();
        if !(lo < 1.0) {
            return Ok(Self {
                lo: 1.0,
                step: 1.0,
                areas: vec![domain_area, k_area],
            });
        }
        let step = (1.0 - lo) / AREA_TABLE_LEVELS as f64;
        let mut areas: Vec<f64> = (0..=AREA_TABLE_LEVELS)
            .into_par_iter()
            .map(|k| {
                if k == 0 {
                    return Ok(domain_area);
                }
                if k == AREA_TABLE_LEVELS {
                    return Ok(k_area);
                }
                extract_level_set(solution, lo + step * k as f64).map(|g| g.superlevel_area)
            })
            .collect::<Result<_>>()?;
        // enforce monotonicity against summation noise
        for k in 1..areas.len() {
            areas[k] = areas[k].min(areas[k - 1]);
        }
        Ok(Self { lo, step, areas })
    }

    pub fn area(&self, t: f64) -> f64 {
        if t <= self.lo {
            return self.areas[0];
        }
        let x = (t - self.lo) / self.step;
        let k = (x.floor() as usize).min(self.areas.len() - 2);
        let s = (x - k as f64).clamp(0.0, 1.0);
        self.areas[k] * (1.0 - s) + self.areas[k + 1] * s
    }
}

/// The field `φ(x) = (|∇u*|/u*)(r(u(x)))` transplanted from `(B_1, B_R)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerearrangedPhi {
    pub phi: PhiField,
    pub reference_radius: f64,
    /// Triangles whose volume radius fell outside `[1, R]` and was clamped.
    pub clamped: usize,
    /// Whether `|∇u*|/u* <= β^(1/(p-1))` holds on the reference annulus; the
    /// field is then clipped to `[0, β^(1/(p-1))]`.
    pub hypothesis_holds: bool,
}

/// Derearranged test field: each triangle takes the level `t` of its vertex
/// mean, the volume radius `r(t)` of `U_t`, and the radial ratio there.
pub fn derearranged_phi(solution: &FemSolution, params: &ProblemParams, reference_radius: f64) -> Result<DerearrangedPhi> {
    let hypothesis_holds = lemma5_predicate(params, reference_radius)?.0;
    let table = SuperlevelAreaTable::new(solution)?;
    let b = params.beta_root();
    let n = params.n();
    let mut clamped = 0;
    let mut per_triangle = Vec::with_capacity(solution.mesh.triangles.len());
    for tri in 0..solution.mesh.triangles.len() {
        let vals = triangle_values(solution, tri);
        let t = (vals[0] + vals[1] + vals[2]) / 3.0;
        let r = r_of_t(table.area(t), n)?;
        let rc = r.clamp(1.0, reference_radius);
        if rc != r {
            clamped += 1;
        }
        let mut g = gradient_ratio_unchecked(params, reference_radius, rc);
        if hypothesis_holds {
            g = g.clamp(0.0, b);
        }
        per_triangle.push(g);
    }
    if clamped > 0 {
        warn!("{clamped} triangles had a volume radius outside [1, {reference_radius}]");
    }
    Ok(DerearrangedPhi {
        phi: PhiField {
            per_triangle,
            on_compact: 0.0,
        },
        reference_radius,
        clamped,
        hypothesis_holds,
    })
}

/// `|U_t ∩ {φ > s}|` for each threshold `s`.
pub fn superlevel_distribution(solution: &FemSolution, phi: &PhiField, t: f64, thresholds: &[f64]) -> Result<Vec<f64>> {
    check_phi(solution, phi)?;
    let geometry = extract_level_set(solution, t)?;
    let (k_area, _) = solution.mesh.compact_polygon();
    Ok(thresholds
        .iter()
        .map(|&s| {
            let mut acc = CompensatedSum::default();
            if phi.on_compact > s {
                acc.add(k_area);
            }
            for (a, v) in geometry.clipped_area.iter().zip(&phi.per_triangle) {
                if *v > s {
                    acc.add(*a);
                }
            }
            acc.value()
        })
        .collect())
}

/// `|B_r ∩ {|∇u*|/u* > s}|` on `(B_1, B_R)` for each threshold `s`, by
/// midpoint integration over `[1, r]`.
pub fn radial_ratio_distribution(params: &ProblemParams, radius: f64, r: f64, thresholds: &[f64]) -> Result<Vec<f64>> {
    if !(radius > 1.0 && (1.0..=radius).contains(&r)) {
        return Err(Error::Domain(format!("r={r} outside [1, {radius}]")));
    }
    const CELLS: usize = 20_000;
    let h = (r - 1.0) / CELLS as f64;
    let n = params.dim();
    let shell: Vec<(f64, f64)> = (0..CELLS)
        .map(|i| {
            let s = 1.0 + h * (i as f64 + 0.5);
            (gradient_ratio_unchecked(params, radius, s), params.sphere_area() * s.powf(n - 1.0) * h)
        })
        .collect();
    Ok(thresholds
        .iter()
        .map(|&s| shell.iter().filter(|(g, _)| *g > s).map(|(_, w)| w).sum())
        .collect())
}

/// `p/(p-1) a (a^(p-1) - b^(p-1)) - (a^p - b^p)`, non-negative for
/// `a, b >= 0` and zero only at `a = b`.
pub fn convexity_gap(a: f64, b: f64, p: f64) -> f64 {
    p / (p - 1.0) * a * (a.powf(p - 1.0) - b.powf(p - 1.0)) - (a.powf(p) - b.powf(p))
}
