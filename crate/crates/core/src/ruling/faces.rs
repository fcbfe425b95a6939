use std::collections::HashMap;

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use serde::Serialize;

use super::RulingError;
use crate::meanfield::ConvexBody3;
use crate::sweep::{dot3, norm3};

/// Clusters smaller than this fraction of the surface are discarded.
pub const MIN_AREA_FRACTION: f64 = 0.01;

/// Largest angle between adjacent facet normals inside one cluster. Creases
/// sharper than this separate clusters.
pub const MAX_BEND: f64 = 0.5;

/// A ruled cluster must extend along its ruling direction by at least this
/// fraction of its diameter.
pub const MIN_RULING_EXTENT: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusterKind {
    /// Facet normals concentrated around one direction.
    Planar,
    /// Facet normals confined to a great circle: a cylinder-like sheet swept
    /// by parallel segments along `ruling_direction`.
    Ruled,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FaceCluster {
    pub kind: ClusterKind,
    pub facets: Vec<usize>,
    pub area: f64,
    pub area_fraction: f64,
    /// Best-fit plane `normal . p = offset` (area-weighted).
    pub normal: [f64; 3],
    pub offset: f64,
    /// Unit ruling direction with a non-negative leading nonzero component.
    pub ruling_direction: Option<[f64; 3]>,
    /// Root-mean-square angle between facet normals and `normal`.
    pub planar_residual: f64,
    /// Root-mean-square component of the facet normals along the ruling direction.
    pub ruling_residual: f64,
    /// Largest angle between a facet normal and `normal`.
    pub normal_spread: f64,
}

fn canonical_direction(v: [f64; 3]) -> [f64; 3] {
    let lead = v.iter().copied().find(|x| x.abs() > 1e-12).unwrap_or(1.0);
    if lead < 0.0 {
        v.map(|x| -x)
    } else {
        v
    }
}

fn unit(v: [f64; 3]) -> [f64; 3] {
    let len = norm3(v);
    v.map(|x| x / len)
}

/// Area-weighted normal statistics of a growing cluster.
#[derive(Default)]
struct NormalMoments {
    area: f64,
    sum: [f64; 3],
    outer: Matrix3<f64>,
}

impl NormalMoments {
    fn add(&mut self, n: [f64; 3], w: f64) {
        let v = Vector3::from(n);
        self.area += w;
        self.outer += v * v.transpose() * w;
        for (s, x) in self.sum.iter_mut().zip(n) {
            *s += w * x;
        }
    }

    fn mean(&self) -> [f64; 3] {
        unit(self.sum)
    }

    /// Eigenvalues ascending with their eigenvectors, normalized by area.
    fn spectrum(&self) -> [(f64, [f64; 3]); 3] {
        let eig = SymmetricEigen::new(self.outer / self.area);
        let mut pairs =
            [0, 1, 2].map(|i| (eig.eigenvalues[i].max(0.0), eig.eigenvectors.column(i).into_owned().into()));
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        pairs
    }
}

struct Surface<'a> {
    body: &'a ConvexBody3,
    areas: Vec<f64>,
    normals: Vec<Option<[f64; 3]>>,
    neighbors: Vec<Vec<usize>>,
}

impl<'a> Surface<'a> {
    fn new(body: &'a ConvexBody3) -> Self {
        let nf = body.facets.len();
        let areas: Vec<f64> = (0..nf).map(|f| body.facet_area(f)).collect();
        let total: f64 = areas.iter().sum();
        let normals = (0..nf)
            .map(|f| {
                let n = body.facet_normal(f);
                (areas[f] > 1e-14 * total && norm3(n) > 0.0).then(|| unit(n))
            })
            .collect();
        let mut edge_owner: HashMap<(usize, usize), usize> = HashMap::new();
        let mut neighbors = vec![Vec::new(); nf];
        for (f, tri) in body.facets.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                if let Some(g) = edge_owner.insert((a.min(b), a.max(b)), f) {
                    neighbors[f].push(g);
                    neighbors[g].push(f);
                }
            }
        }
        Self { body, areas, normals, neighbors }
    }

    /// Connected components of the facet graph whose edges join facets
    /// bending by at most [`MAX_BEND`], in order of their lowest facet index.
    fn smooth_components(&self) -> Vec<Vec<usize>> {
        let nf = self.areas.len();
        let cos_bend = MAX_BEND.cos();
        let mut component = vec![usize::MAX; nf];
        let mut out = Vec::new();
        for start in 0..nf {
            if component[start] != usize::MAX || self.normals[start].is_none() {
                continue;
            }
            let id = out.len();
            component[start] = id;
            let mut members = vec![start];
            let mut next = 0;
            while next < members.len() {
                let f = members[next];
                next += 1;
                let nf = self.normals[f].expect("members have normals");
                for &g in &self.neighbors[f] {
                    if component[g] == usize::MAX && self.normals[g].is_some_and(|ng| dot3(nf, ng) >= cos_bend) {
                        component[g] = id;
                        members.push(g);
                    }
                }
            }
            out.push(members);
        }
        out
    }

    fn describe(&self, facets: Vec<usize>, total: f64, tol: f64) -> Option<FaceCluster> {
        let mut moments = NormalMoments::default();
        let mut centroid = [0.0; 3];
        for &f in &facets {
            let w = self.areas[f];
            moments.add(self.normals[f]?, w);
            let tri = self.body.facets[f].map(|i| self.body.vertices[i]);
            for i in 0..3 {
                centroid[i] += w * (tri[0][i] + tri[1][i] + tri[2][i]) / 3.0;
            }
        }
        let area = moments.area;
        let normal = moments.mean();
        let centroid = centroid.map(|x| x / area);
        let [(low, direction), (mid, _), _] = moments.spectrum();
        let planar_residual = (low + mid).sqrt();
        let ruling_residual = low.sqrt();
        let normal_spread =
            facets.iter().map(|&f| dot3(self.normals[f].unwrap(), normal).clamp(-1.0, 1.0).acos()).fold(0.0, f64::max);
        let kind = if planar_residual <= tol {
            ClusterKind::Planar
        } else if ruling_residual <= tol && self.extent_ratio(&facets, direction) >= MIN_RULING_EXTENT {
            ClusterKind::Ruled
        } else {
            return None;
        };
        Some(FaceCluster {
            kind,
            facets,
            area,
            area_fraction: area / total,
            normal,
            offset: dot3(normal, centroid),
            ruling_direction: (kind == ClusterKind::Ruled).then(|| canonical_direction(direction)),
            planar_residual,
            ruling_residual,
            normal_spread,
        })
    }

    /// Width of the cluster along `d` over its diameter.
    fn extent_ratio(&self, facets: &[usize], d: [f64; 3]) -> f64 {
        let mut ids: Vec<usize> = facets.iter().flat_map(|&f| self.body.facets[f]).collect();
        ids.sort_unstable();
        ids.dedup();
        let pts: Vec<[f64; 3]> = ids.iter().map(|&i| self.body.vertices[i]).collect();
        let (lo, hi) = pts
            .iter()
            .map(|p| dot3(*p, d))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
        // bounding-box diagonal bounds the diameter within a factor sqrt(3)
        let mut bb = [(f64::INFINITY, f64::NEG_INFINITY); 3];
        for p in &pts {
            for i in 0..3 {
                bb[i] = (bb[i].0.min(p[i]), bb[i].1.max(p[i]));
            }
        }
        let diag = norm3(bb.map(|(a, b)| b - a));
        if diag > 0.0 {
            (hi - lo) / diag
        } else {
            0.0
        }
    }
}

/// Splits the hull surface at creases into smooth facet clusters and keeps
/// those whose normals concentrate within `angle_tol` of a point (planar) or
/// of a great circle (ruled). Clusters below [`MIN_AREA_FRACTION`] of the
/// surface are dropped.
pub fn detect_flat_faces(body: &ConvexBody3, angle_tol: f64) -> Result<Vec<FaceCluster>, RulingError> {
    if body.facets.is_empty() {
        return Err(RulingError::EmptyBody);
    }
    if !(angle_tol > 0.0 && angle_tol <= 0.1) {
        return Err(RulingError::InvalidAngleTolerance(angle_tol));
    }
    let surface = Surface::new(body);
    let total: f64 = surface.areas.iter().sum();
    let mut clusters: Vec<FaceCluster> = surface
        .smooth_components()
        .into_iter()
        .filter(|facets| facets.iter().map(|&f| surface.areas[f]).sum::<f64>() >= MIN_AREA_FRACTION * total)
        .filter_map(|facets| surface.describe(facets, total, angle_tol))
        .collect();
    clusters.sort_by(|a, b| b.area.total_cmp(&a.area));
    Ok(clusters)
}

/// Angle between two lines (directions up to sign).
pub fn line_angle(a: [f64; 3], b: [f64; 3]) -> f64 {
    (dot3(a, b).abs() / (norm3(a) * norm3(b))).clamp(0.0, 1.0).acos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meanfield::{limit_body, ConvexBody3, Provenance};
    use crate::spinops::Model;
    use crate::sweep::DirectionGrid;

    #[test]
    fn sphere_has_no_flat_faces() {
        let pts: Vec<[f64; 3]> = DirectionGrid::fibonacci(3000).unwrap().directions().to_vec();
        let body = ConvexBody3::from_points(&pts, Provenance::MeanField { model: Model::Ising }).unwrap();
        assert!(detect_flat_faces(&body, 0.02).unwrap().is_empty());
    }

    #[test]
    fn cube_has_six_planar_faces() {
        let mut pts = Vec::new();
        for i in 0..11 {
            for j in 0..11 {
                for k in 0..11 {
                    pts.push([i as f64 / 10.0, j as f64 / 10.0, k as f64 / 10.0]);
                }
            }
        }
        let body = ConvexBody3::from_points(&pts, Provenance::MeanField { model: Model::Xy }).unwrap();
        let clusters = detect_flat_faces(&body, 0.02).unwrap();
        assert_eq!(clusters.len(), 6);
        assert!(clusters.iter().all(|c| c.kind == ClusterKind::Planar && (c.area - 1.0).abs() < 1e-9));
    }

    #[test]
    fn ising_body_has_two_ruled_sheets() {
        let body = limit_body(Model::Ising, 10_000).unwrap();
        let clusters = detect_flat_faces(&body, 0.02).unwrap();
        let ruled: Vec<&FaceCluster> = clusters.iter().filter(|c| c.kind == ClusterKind::Ruled).collect();
        assert_eq!(ruled.len(), 2, "{}", clusters.len());
        let mut angles: Vec<(f64, f64)> = ruled
            .iter()
            .map(|c| {
                let d = c.ruling_direction.unwrap();
                (line_angle(d, [0.0, 1.0, 0.0]), line_angle(d, [0.0, 0.0, 1.0]))
            })
            .collect();
        angles.sort_by(|a, b| a.0.total_cmp(&b.0));
        assert!(angles[0].0 <= 0.02 && angles[1].1 <= 0.02, "{angles:?}");
    }

    #[test]
    fn xy_body_has_sheet_and_two_planes() {
        let body = limit_body(Model::Xy, 10_000).unwrap();
        let clusters = detect_flat_faces(&body, 0.02).unwrap();
        assert_eq!(clusters.len(), 3, "{clusters:#?}");
        let ruled: Vec<&FaceCluster> = clusters.iter().filter(|c| c.kind == ClusterKind::Ruled).collect();
        assert_eq!(ruled.len(), 1);
        let d = ruled[0].ruling_direction.unwrap();
        assert!(line_angle(d, [1.0, -1.0, 0.0]) <= 0.02, "{d:?}");
        let planes: Vec<[f64; 3]> =
            clusters.iter().filter(|c| c.kind == ClusterKind::Planar).map(|c| c.normal).collect();
        assert!(planes.iter().any(|n| line_angle(*n, [1.0, 0.0, 0.0]) <= 0.02));
        assert!(planes.iter().any(|n| line_angle(*n, [0.0, 1.0, 0.0]) <= 0.02));
    }

    #[test]
    fn argument_checks() {
        let body = limit_body(Model::Xy, 200).unwrap();
        assert!(matches!(detect_flat_faces(&body, 0.0), Err(RulingError::InvalidAngleTolerance(_))));
        assert!(matches!(detect_flat_faces(&body, 0.2), Err(RulingError::InvalidAngleTolerance(_))));
        let empty =
            ConvexBody3 { vertices: vec![], facets: vec![], provenance: Provenance::MeanField { model: Model::Xy } };
        assert!(matches!(detect_flat_faces(&empty, 0.02), Err(RulingError::EmptyBody)));
    }
}
