use serde::Serialize;

use super::{BoundaryPoint, Plane, SweepError};

/// Points dropped onto a coordinate plane together with their convex hull.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Projection {
    pub plane: Plane,
    pub points: Vec<[f64; 2]>,
    /// Hull vertices, counterclockwise, without a repeated closing vertex.
    pub hull: Vec<[f64; 2]>,
    /// Set when fewer than three non-collinear points exist.
    pub degenerate: bool,
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Andrew's monotone chain; collinear points are dropped from the hull.
pub fn convex_hull_2d(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts: Vec<[f64; 2]> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Projects every face vertex of the points (the point itself when the face
/// is a singleton) onto `plane`.
pub fn project_2d(points: &[BoundaryPoint], plane: Plane) -> Result<Projection, SweepError> {
    let projected: Vec<[f64; 2]> =
        points.iter().flat_map(|p| p.face_vertices.iter().map(move |&v| plane.project(v))).collect();
    project_points(&projected, plane)
}

pub fn project_points(points: &[[f64; 2]], plane: Plane) -> Result<Projection, SweepError> {
    if points.is_empty() {
        return Err(SweepError::EmptyInput);
    }
    let hull = convex_hull_2d(points);
    Ok(Projection { plane, points: points.to_vec(), degenerate: hull.len() < 3, hull })
}

/// Twice the signed area of a closed polygon.
pub fn signed_area2(polygon: &[[f64; 2]]) -> f64 {
    (0..polygon.len())
        .map(|i| {
            let a = polygon[i];
            let b = polygon[(i + 1) % polygon.len()];
            a[0] * b[1] - a[1] * b[0]
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn triangle_from_vertex_samples() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.5, 0.5], [0.2, 0.2], [0.0, 0.5]];
        let p = project_points(&pts, Plane::Xy).unwrap();
        assert_eq!(p.hull, vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        assert!(!p.degenerate);
        assert!(signed_area2(&p.hull) > 0.0);
    }

    #[test]
    fn degenerate_inputs_are_flagged() {
        assert!(project_points(&[[0.3, 0.3]], Plane::Xy).unwrap().degenerate);
        assert!(project_points(&[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]], Plane::Xy).unwrap().degenerate);
        assert!(matches!(project_points(&[], Plane::Xy), Err(SweepError::EmptyInput)));
    }

    proptest! {
        #[test]
        fn hull_is_ccw_and_contains_all_points(pts in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 3..60)) {
            let pts: Vec<[f64; 2]> = pts.into_iter().map(|(a, b)| [a, b]).collect();
            let hull = convex_hull_2d(&pts);
            prop_assume!(hull.len() >= 3);
            prop_assert!(signed_area2(&hull) > 0.0);
            for i in 0..hull.len() {
                let a = hull[i];
                let b = hull[(i + 1) % hull.len()];
                for &p in &pts {
                    prop_assert!(cross(a, b, p) >= -1e-12);
                }
            }
        }
    }
}
