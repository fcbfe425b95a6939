//! Infinite-N bodies built from product states, their closed-form boundary
//! sheets and a 3D convex hull.

mod hull;

pub use hull::{convex_hull, HullFailure, HullMesh, PERTURBATION};

use std::f64::consts::PI;
use std::fmt;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::spinops::Model;
use crate::sweep::{dot3, norm3, DirectionGrid, Plane};

/// Analytic membership tolerance.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeanFieldError {
    #[error("Bloch vector {0:?} is not a unit vector")]
    NotUnit([f64; 3]),
    #[error("{model} hull is degenerate: {reason}")]
    DegenerateHull { model: String, reason: String },
    #[error("point {point:?} is {membership} for the {model} body, not on a boundary sheet")]
    NotOnBoundary { model: Model, point: [f64; 3], membership: Membership },
    #[error("anchor {anchor:?} is not on the {piece} of the {model} body")]
    AnchorOffSheet { model: Model, piece: Membership, anchor: [f64; 3] },
    #[error("the {piece} of the {model} body has no distinguished ruling")]
    NoRuling { model: Model, piece: Membership },
    #[error("ruling parameter {0} outside [0, 1]")]
    ParameterOutOfRange(f64),
}

/// Pure single-qubit state direction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlochVector([f64; 3]);

impl BlochVector {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self, MeanFieldError> {
        let v = [a, b, c];
        if (norm3(v) - 1.0).abs() > 1e-12 {
            return Err(MeanFieldError::NotUnit(v));
        }
        Ok(Self(v))
    }

    pub fn from_angles(theta: f64, phi: f64) -> Self {
        Self([theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()])
    }

    pub fn components(self) -> [f64; 3] {
        self.0
    }
}

/// Image of the product state `|alpha>^N` in the limit coordinates.
pub fn extreme_point(model: Model, alpha: BlochVector) -> [f64; 3] {
    let [a, b, c] = alpha.0;
    match model {
        Model::Ising => [a * a, c, a],
        Model::Xy => [a * a, b * b, c],
    }
}

/// Position of a point relative to a limit body's closed-form boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    /// Ising: the curve where both ruled sheets meet. XY: the sheet `x + y + z^2 = 1`.
    OnCurvedPiece,
    /// Ising: `x = z^2`. XY: the plane `x = 0`.
    OnRuledPiece1,
    /// Ising: `x + y^2 = 1`. XY: the plane `y = 0`.
    OnRuledPiece2,
    Interior,
    Exterior,
}

impl fmt::Display for Membership {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Membership::OnCurvedPiece => "curved piece",
            Membership::OnRuledPiece1 => "first ruled piece",
            Membership::OnRuledPiece2 => "second ruled piece",
            Membership::Interior => "interior",
            Membership::Exterior => "exterior",
        })
    }
}

pub fn boundary_membership(model: Model, p: [f64; 3], tol: f64) -> Membership {
    let [x, y, z] = p;
    match model {
        Model::Ising => {
            let blue = x - z * z;
            let green = 1.0 - y * y - x;
            if blue < -tol || green < -tol {
                Membership::Exterior
            } else {
                match (blue.abs() <= tol, green.abs() <= tol) {
                    (true, true) => Membership::OnCurvedPiece,
                    (true, false) => Membership::OnRuledPiece1,
                    (false, true) => Membership::OnRuledPiece2,
                    (false, false) => Membership::Interior,
                }
            }
        }
        Model::Xy => {
            let sheet = 1.0 - x - y - z * z;
            if x < -tol || y < -tol || sheet < -tol {
                Membership::Exterior
            } else if sheet.abs() <= tol {
                Membership::OnCurvedPiece
            } else if x.abs() <= tol {
                Membership::OnRuledPiece1
            } else if y.abs() <= tol {
                Membership::OnRuledPiece2
            } else {
                Membership::Interior
            }
        }
    }
}

/// Plane `normal . p + offset = 0` with the body on the side `>= 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SupportingPlane {
    pub normal: [f64; 3],
    pub offset: f64,
}

impl SupportingPlane {
    pub fn signed_value(&self, p: [f64; 3]) -> f64 {
        dot3(self.normal, p) + self.offset
    }

    pub fn signed_distance(&self, p: [f64; 3]) -> f64 {
        self.signed_value(p) / norm3(self.normal)
    }

    pub fn coefficients(&self) -> [f64; 4] {
        [self.normal[0], self.normal[1], self.normal[2], self.offset]
    }
}

/// Tangent plane of the boundary sheet through `p`.
pub fn supporting_plane(model: Model, p: [f64; 3]) -> Result<SupportingPlane, MeanFieldError> {
    let membership = boundary_membership(model, p, MEMBERSHIP_TOL);
    let [x0, y0, z0] = p;
    let plane = |normal, offset| Ok(SupportingPlane { normal, offset });
    match (model, membership) {
        (_, Membership::Interior | Membership::Exterior) => {
            Err(MeanFieldError::NotOnBoundary { model, point: p, membership })
        }
        (Model::Ising, Membership::OnRuledPiece1) => plane([1.0, 0.0, -2.0 * z0], x0),
        // both sheets support the body along their common curve
        (Model::Ising, Membership::OnRuledPiece2 | Membership::OnCurvedPiece) => {
            plane([-1.0, -2.0 * y0, 0.0], 2.0 - x0)
        }
        (Model::Xy, Membership::OnCurvedPiece) => plane([-1.0, -1.0, -2.0 * z0], 2.0 - x0 - y0),
        (Model::Xy, Membership::OnRuledPiece1) => plane([1.0, 0.0, 0.0], 0.0),
        (Model::Xy, Membership::OnRuledPiece2) => plane([0.0, 1.0, 0.0], 0.0),
    }
}

/// Point at parameter `t` on the ruling segment through `anchor`.
pub fn ruling_line(model: Model, piece: Membership, anchor: [f64; 3], t: f64) -> Result<[f64; 3], MeanFieldError> {
    if !(0.0..=1.0).contains(&t) {
        return Err(MeanFieldError::ParameterOutOfRange(t));
    }
    let [x0, y0, z0] = anchor;
    let off = || MeanFieldError::AnchorOffSheet { model, piece, anchor };
    let inside = boundary_membership(model, anchor, MEMBERSHIP_TOL) != Membership::Exterior;
    match (model, piece) {
        (Model::Ising, Membership::OnRuledPiece1) => {
            if !inside || (x0 - z0 * z0).abs() > MEMBERSHIP_TOL {
                return Err(off());
            }
            let w = (1.0 - z0 * z0).max(0.0).sqrt();
            Ok([x0, -w + 2.0 * t * w, z0])
        }
        (Model::Ising, Membership::OnRuledPiece2) => {
            if !inside || (x0 + y0 * y0 - 1.0).abs() > MEMBERSHIP_TOL {
                return Err(off());
            }
            let w = (1.0 - y0 * y0).max(0.0).sqrt();
            Ok([x0, y0, -w + 2.0 * t * w])
        }
        (Model::Xy, Membership::OnCurvedPiece) => {
            if !inside || (x0 + y0 + z0 * z0 - 1.0).abs() > MEMBERSHIP_TOL {
                return Err(off());
            }
            let span = 1.0 - z0 * z0;
            Ok([t * span, span - t * span, z0])
        }
        _ => Err(MeanFieldError::NoRuling { model, piece }),
    }
}

/// Origin of a hull.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Provenance {
    FiniteN { model: Model, n: usize },
    MeanField { model: Model },
}

/// Triangulated convex body with outward-oriented facets.
#[derive(Clone, Debug, Serialize)]
pub struct ConvexBody3 {
    pub vertices: Vec<[f64; 3]>,
    pub facets: Vec<[usize; 3]>,
    pub provenance: Provenance,
}

impl ConvexBody3 {
    pub fn from_points(points: &[[f64; 3]], provenance: Provenance) -> Result<Self, MeanFieldError> {
        let model = match &provenance {
            Provenance::FiniteN { model, .. } | Provenance::MeanField { model } => *model,
        };
        let mesh = convex_hull(points).map_err(|failure| MeanFieldError::DegenerateHull {
            model: model.to_string(),
            reason: match failure {
                HullFailure::TooFewPoints(k) => format!("only {k} distinct points"),
                HullFailure::Coplanar => "all points are coplanar".into(),
            },
        })?;
        Ok(Self { vertices: mesh.vertices, facets: mesh.facets, provenance })
    }

    /// Unnormalized outward normal (twice the area vector).
    pub fn facet_normal(&self, f: usize) -> [f64; 3] {
        let [a, b, c] = self.facets[f].map(|i| self.vertices[i]);
        let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
        [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]]
    }

    pub fn facet_area(&self, f: usize) -> f64 {
        0.5 * norm3(self.facet_normal(f))
    }

    pub fn surface_area(&self) -> f64 {
        (0..self.facets.len()).map(|f| self.facet_area(f)).sum()
    }

    /// Largest signed distance of `p` above any facet plane (positive outside).
    pub fn outside_distance(&self, p: [f64; 3]) -> f64 {
        (0..self.facets.len())
            .filter_map(|f| {
                let n = self.facet_normal(f);
                let len = norm3(n);
                (len > 0.0).then(|| {
                    let a = self.vertices[self.facets[f][0]];
                    dot3(n, [p[0] - a[0], p[1] - a[1], p[2] - a[2]]) / len
                })
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Worst violation of "every vertex below every facet plane".
    pub fn max_vertex_violation(&self) -> f64 {
        self.vertices.iter().map(|&v| self.outside_distance(v)).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn edge_count(&self) -> usize {
        let mut edges: Vec<(usize, usize)> = self
            .facets
            .iter()
            .flat_map(|t| (0..3).map(move |k| (t[k].min(t[(k + 1) % 3]), t[k].max(t[(k + 1) % 3]))))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges.len()
    }

    /// `V - E + F`; equals 2 for a closed convex polyhedron.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edge_count() as i64 + self.facets.len() as i64
    }

    pub fn write_obj<W: Write>(&self, out: &mut W) -> io::Result<()> {
        for [x, y, z] in &self.vertices {
            writeln!(out, "v {x} {y} {z}")?;
        }
        for [a, b, c] in &self.facets {
            writeln!(out, "f {} {} {}", a + 1, b + 1, c + 1)?;
        }
        Ok(())
    }
}

/// Product-state images for `sample_count` Fibonacci Bloch directions.
pub fn sample_extreme_points(model: Model, sample_count: usize) -> Vec<[f64; 3]> {
    match DirectionGrid::fibonacci(sample_count) {
        Ok(grid) => {
            grid.directions().par_iter().map(|&[a, b, c]| extreme_point(model, BlochVector([a, b, c]))).collect()
        }
        Err(_) => Vec::new(),
    }
}

pub fn limit_body(model: Model, sample_count: usize) -> Result<ConvexBody3, MeanFieldError> {
    ConvexBody3::from_points(&sample_extreme_points(model, sample_count), Provenance::MeanField { model })
}

/// Boundary of the limit body projected onto `plane`, as a closed polyline
/// (last vertex not repeated) with `samples` points on each curved arc.
pub fn limit_outline(model: Model, plane: Plane, samples: usize) -> Vec<[f64; 2]> {
    let samples = samples.max(2);
    let arc = |f: &dyn Fn(f64) -> [f64; 2]| -> Vec<[f64; 2]> {
        (0..samples).map(|i| f(-1.0 + 2.0 * i as f64 / (samples - 1) as f64)).collect()
    };
    match (model, plane) {
        // 0 <= x <= 1 - y^2, closed along x = 0
        (Model::Ising, Plane::Xy) => arc(&|y| [1.0 - y * y, y]),
        // z^2 <= x <= 1, closed along x = 1
        (Model::Ising, Plane::Xz) => arc(&|z| [z * z, z]),
        (Model::Ising, Plane::Yz) => {
            (0..samples).map(|i| 2.0 * PI * i as f64 / samples as f64).map(|t| [t.cos(), t.sin()]).collect()
        }
        (Model::Xy, Plane::Xy) => vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
        // x + z^2 <= 1 with x >= 0, closed along x = 0 (same for y)
        (Model::Xy, Plane::Xz | Plane::Yz) => arc(&|z| [1.0 - z * z, z]),
    }
}

/// Minimum of `lambda . extreme_point(alpha)` over the Bloch sphere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeanFieldMinimum {
    pub alpha: BlochVector,
    pub point: [f64; 3],
    pub energy: f64,
}

fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - ratio * (hi - lo);
    let mut b = lo + ratio * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > tol {
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - ratio * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + ratio * (hi - lo);
            fb = f(b);
        }
    }
    0.5 * (lo + hi)
}

/// Dense angle grid followed by alternating golden-section refinement.
pub fn mean_field_minimum(model: Model, lambda: [f64; 3]) -> MeanFieldMinimum {
    let energy = |theta: f64, phi: f64| dot3(lambda, extreme_point(model, BlochVector::from_angles(theta, phi)));
    let (rows, cols) = (181, 360);
    let mut best = (0.0, 0.0, f64::INFINITY);
    for r in 0..rows {
        let theta = PI * r as f64 / (rows - 1) as f64;
        for c in 0..cols {
            let phi = 2.0 * PI * c as f64 / cols as f64;
            let e = energy(theta, phi);
            if e < best.2 {
                best = (theta, phi, e);
            }
        }
    }
    let (mut theta, mut phi, mut value) = best;
    let mut half = PI / (rows - 1) as f64;
    for _ in 0..200 {
        let t = golden_section(|t| energy(t, phi), theta - half, theta + half, 1e-12);
        let p = golden_section(|p| energy(t, p), phi - 2.0 * half, phi + 2.0 * half, 1e-12);
        let next = energy(t, p);
        let improvement = value - next;
        if next <= value {
            theta = t;
            phi = p;
            value = next;
        }
        if improvement.abs() < 1e-14 {
            half *= 0.5;
            if half < 1e-10 {
                break;
            }
        }
    }
    let alpha = BlochVector::from_angles(theta, phi);
    MeanFieldMinimum { alpha, point: extreme_point(model, alpha), energy: value }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close3(a: [f64; 3], b: [f64; 3], tol: f64) -> bool {
        (0..3).all(|i| (a[i] - b[i]).abs() <= tol)
    }

    #[test]
    fn extreme_point_examples() {
        let v = |a, b, c| BlochVector::new(a, b, c).unwrap();
        assert_eq!(extreme_point(Model::Ising, v(1.0, 0.0, 0.0)), [1.0, 0.0, 1.0]);
        assert_eq!(extreme_point(Model::Ising, v(0.0, 0.0, 1.0)), [0.0, 1.0, 0.0]);
        let p = extreme_point(Model::Ising, v(0.6, 0.0, 0.8));
        assert!(close3(p, [0.36, 0.8, 0.6], 1e-15));
        assert!((p[0] - p[2] * p[2]).abs() < 1e-15 && (p[1] * p[1] + p[2] * p[2] - 1.0).abs() < 1e-15);
        let s = 0.5f64.sqrt();
        let q = extreme_point(Model::Xy, v(0.5, 0.5, s));
        assert!(close3(q, [0.25, 0.25, std::f64::consts::FRAC_1_SQRT_2], 1e-15));
        assert!((q[0] + q[1] + q[2] * q[2] - 1.0).abs() < 1e-15);
        assert!(BlochVector::new(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn membership_examples() {
        assert_eq!(boundary_membership(Model::Ising, [0.25, 0.0, 0.5], 1e-9), Membership::OnRuledPiece1);
        assert_eq!(boundary_membership(Model::Ising, [0.75, 0.5, 0.0], 1e-9), Membership::OnRuledPiece2);
        // x >= z^2 >= 0 on the whole body, so the origin sits on the x = z^2 sheet
        assert_eq!(boundary_membership(Model::Ising, [0.0, 0.0, 0.0], 1e-9), Membership::OnRuledPiece1);
        assert_eq!(boundary_membership(Model::Ising, [0.5, 0.0, 0.0], 1e-9), Membership::Interior);
        assert_eq!(boundary_membership(Model::Ising, [0.36, 0.8, 0.6], 1e-9), Membership::OnCurvedPiece);
        assert_eq!(boundary_membership(Model::Ising, [0.0, 0.0, 0.5], 1e-9), Membership::Exterior);
        assert_eq!(boundary_membership(Model::Xy, [0.25, 0.25, 0.5f64.sqrt()], 1e-9), Membership::OnCurvedPiece);
        assert_eq!(boundary_membership(Model::Xy, [0.0, 0.3, 0.1], 1e-9), Membership::OnRuledPiece1);
        assert_eq!(boundary_membership(Model::Xy, [0.3, 0.0, 0.1], 1e-9), Membership::OnRuledPiece2);
        assert_eq!(boundary_membership(Model::Xy, [0.2, 0.2, 0.1], 1e-9), Membership::Interior);
        assert_eq!(boundary_membership(Model::Xy, [-0.1, 0.2, 0.1], 1e-9), Membership::Exterior);
    }

    #[test]
    fn supporting_plane_examples() {
        let p = supporting_plane(Model::Ising, [0.25, 0.0, 0.5]).unwrap();
        assert_eq!(p.coefficients(), [1.0, 0.0, -1.0, 0.25]);
        let g = supporting_plane(Model::Ising, [0.0, 1.0, 0.0]).unwrap();
        assert_eq!(g.coefficients(), [-1.0, -2.0, 0.0, 2.0]);
        let s = 0.5f64.sqrt();
        let x = supporting_plane(Model::Xy, [0.25, 0.25, s]).unwrap();
        let scaled = x.coefficients().map(|c| -c);
        assert!((scaled[0] - 1.0).abs() < 1e-15 && (scaled[1] - 1.0).abs() < 1e-15);
        assert!((scaled[2] - 2f64.sqrt()).abs() < 1e-15 && (scaled[3] + 1.5).abs() < 1e-15);
        assert!(matches!(supporting_plane(Model::Ising, [0.5, 0.0, 0.0]), Err(MeanFieldError::NotOnBoundary { .. })));
    }

    #[test]
    fn ruling_line_examples() {
        let p = ruling_line(Model::Ising, Membership::OnRuledPiece1, [0.25, 0.0, 0.5], 1.0).unwrap();
        assert!(close3(p, [0.25, 0.75f64.sqrt(), 0.5], 1e-15));
        let lo = ruling_line(Model::Ising, Membership::OnRuledPiece2, [1.0, 0.0, 0.0], 0.0).unwrap();
        let hi = ruling_line(Model::Ising, Membership::OnRuledPiece2, [1.0, 0.0, 0.0], 1.0).unwrap();
        assert_eq!((lo, hi), ([1.0, 0.0, -1.0], [1.0, 0.0, 1.0]));
        let q = ruling_line(Model::Xy, Membership::OnCurvedPiece, [0.5, 0.25, 0.5], 0.0).unwrap();
        assert!(close3(q, [0.0, 0.75, 0.5], 1e-15));
        assert!(matches!(
            ruling_line(Model::Ising, Membership::OnRuledPiece1, [0.5, 0.0, 0.5], 0.5),
            Err(MeanFieldError::AnchorOffSheet { .. })
        ));
        assert!(matches!(
            ruling_line(Model::Xy, Membership::OnRuledPiece1, [0.0, 0.5, 0.5], 0.5),
            Err(MeanFieldError::NoRuling { .. })
        ));
    }

    #[test]
    fn ruling_points_stay_on_their_sheet() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let z0: f64 = rng.gen_range(-1.0..1.0);
            let t: f64 = rng.gen_range(0.0..=1.0);
            let blue = ruling_line(Model::Ising, Membership::OnRuledPiece1, [z0 * z0, 0.0, z0], t).unwrap();
            assert!(matches!(
                boundary_membership(Model::Ising, blue, 1e-9),
                Membership::OnRuledPiece1 | Membership::OnCurvedPiece
            ));
            let green = ruling_line(Model::Ising, Membership::OnRuledPiece2, [1.0 - z0 * z0, z0, 0.0], t).unwrap();
            assert!(matches!(
                boundary_membership(Model::Ising, green, 1e-9),
                Membership::OnRuledPiece2 | Membership::OnCurvedPiece
            ));
            let xy = ruling_line(Model::Xy, Membership::OnCurvedPiece, [1.0 - z0 * z0, 0.0, z0], t).unwrap();
            assert_eq!(boundary_membership(Model::Xy, xy, 1e-9), Membership::OnCurvedPiece);
        }
    }

    #[test]
    fn supporting_planes_never_cut_the_body() {
        for model in Model::ALL {
            let samples = sample_extreme_points(model, 10_000);
            let mut rng = ChaCha8Rng::seed_from_u64(8);
            for _ in 0..50 {
                let anchor = samples[rng.gen_range(0..samples.len())];
                let plane = match supporting_plane(model, anchor) {
                    Ok(p) => p,
                    Err(_) => continue,
                };
                let worst = samples.iter().map(|&p| plane.signed_distance(p)).fold(f64::INFINITY, f64::min);
                assert!(worst >= -1e-9, "{model} anchor {anchor:?}: {worst}");
            }
        }
    }

    #[test]
    fn tiny_sample_counts_are_degenerate() {
        for model in Model::ALL {
            let err = limit_body(model, 3).unwrap_err();
            assert!(err.to_string().contains(model.name()), "{err}");
        }
    }

    #[test]
    fn limit_bodies_are_valid_polyhedra() {
        for model in Model::ALL {
            let body = limit_body(model, 2000).unwrap();
            assert_eq!(body.euler_characteristic(), 2);
            assert!(body.max_vertex_violation() <= 1e-9);
            let mut obj = Vec::new();
            body.write_obj(&mut obj).unwrap();
            let text = String::from_utf8(obj).unwrap();
            assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), body.vertices.len());
            assert!(text.lines().filter(|l| l.starts_with("f ")).all(|l| !l.contains(" 0")));
        }
    }

    #[test]
    fn mean_field_minimum_matches_closed_forms() {
        // Ising ferromagnet: minimum -1 at a = +-1
        let m = mean_field_minimum(Model::Ising, [-1.0, 0.0, 0.0]);
        assert!((m.energy + 1.0).abs() < 1e-10);
        // Ising with transverse field, J = 1, Bx = -1: min of a^2 - a is -1/4
        let m = mean_field_minimum(Model::Ising, [1.0, 0.0, -1.0]);
        assert!((m.energy + 0.25).abs() < 1e-10, "{}", m.energy);
        // XY with field only: c = -1
        let m = mean_field_minimum(Model::Xy, [0.0, 0.0, 1.0]);
        assert!((m.energy + 1.0).abs() < 1e-10);
        // J = -1, Bz = 1 Ising: min of -a^2 + c over a^2 + c^2 <= 1 is -5/4
        let m = mean_field_minimum(Model::Ising, [-1.0, 1.0, 0.0]);
        assert!((m.energy + 1.25).abs() < 1e-10, "{}", m.energy);
    }

    #[test]
    fn outlines_match_projected_sample_hulls() {
        for model in Model::ALL {
            let pts = sample_extreme_points(model, 5000);
            for plane in Plane::ALL {
                let projected: Vec<[f64; 2]> = pts.iter().map(|p| plane.project(*p)).collect();
                let hull = crate::sweep::convex_hull_2d(&projected);
                let d = crate::ruling::convergence_metric(&hull, &limit_outline(model, plane, 400)).unwrap();
                assert!(d < 1e-2, "{model} {plane}: {d}");
            }
        }
    }
}
