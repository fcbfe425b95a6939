//! Incremental 3D quickhull.
//!
//! Input points are deduplicated, shifted by a deterministic pseudo-random
//! perturbation of relative size 1e-12 so that no four are coplanar, and
//! hulled with exact orientation predicates. Facets are reported on the
//! original (unperturbed) coordinates.

use std::collections::HashMap;

use robust::{orient3d, Coord3D};

/// Perturbation amplitude relative to the bounding-box size.
pub const PERTURBATION: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HullFailure {
    TooFewPoints(usize),
    Coplanar,
}

/// Hull of a point set: `vertices` are original input points, `facets`
/// index into `vertices` and are counterclockwise seen from outside.
#[derive(Clone, Debug)]
pub struct HullMesh {
    pub vertices: Vec<[f64; 3]>,
    pub facets: Vec<[usize; 3]>,
}

fn coord(p: [f64; 3]) -> Coord3D<f64> {
    Coord3D { x: p[0], y: p[1], z: p[2] }
}

/// Negative when `d` lies on the outer side of the counterclockwise facet `abc`.
fn orient(a: [f64; 3], b: [f64; 3], c: [f64; 3], d: [f64; 3]) -> f64 {
    orient3d(coord(a), coord(b), coord(c), coord(d))
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn splitmix(state: &mut u64) -> f64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    (z >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
}

struct Face {
    v: [usize; 3],
    alive: bool,
    conflicts: Vec<usize>,
    /// Unnormalized outward normal and offset for ranking conflict points.
    normal: [f64; 3],
}

struct Builder<'a> {
    pts: &'a [[f64; 3]],
    faces: Vec<Face>,
    edges: HashMap<(usize, usize), usize>,
}

impl Builder<'_> {
    fn visible(&self, f: usize, p: usize) -> bool {
        let [a, b, c] = self.faces[f].v;
        orient(self.pts[a], self.pts[b], self.pts[c], self.pts[p]) < 0.0
    }

    fn height(&self, f: usize, p: usize) -> f64 {
        let face = &self.faces[f];
        dot(face.normal, sub(self.pts[p], self.pts[face.v[0]]))
    }

    fn add_face(&mut self, v: [usize; 3]) -> usize {
        let id = self.faces.len();
        let normal = cross(sub(self.pts[v[1]], self.pts[v[0]]), sub(self.pts[v[2]], self.pts[v[0]]));
        for k in 0..3 {
            self.edges.insert((v[k], v[(k + 1) % 3]), id);
        }
        self.faces.push(Face { v, alive: true, conflicts: Vec::new(), normal });
        id
    }

    fn kill_face(&mut self, f: usize) -> Vec<usize> {
        let v = self.faces[f].v;
        for k in 0..3 {
            if self.edges.get(&(v[k], v[(k + 1) % 3])) == Some(&f) {
                self.edges.remove(&(v[k], v[(k + 1) % 3]));
            }
        }
        self.faces[f].alive = false;
        std::mem::take(&mut self.faces[f].conflicts)
    }

    fn assign(&mut self, candidates: &[usize], points: impl IntoIterator<Item = usize>) {
        for p in points {
            if let Some(&f) = candidates.iter().find(|&&f| self.visible(f, p)) {
                self.faces[f].conflicts.push(p);
            }
        }
    }
}

/// Initial simplex: four affinely independent points, or the failure reason.
fn initial_simplex(pts: &[[f64; 3]]) -> Result<[usize; 4], HullFailure> {
    let n = pts.len();
    let extremes: Vec<usize> = (0..3)
        .flat_map(|axis| {
            let order = |i: &usize, j: &usize| pts[*i][axis].total_cmp(&pts[*j][axis]);
            [(0..n).min_by(order).unwrap(), (0..n).max_by(order).unwrap()]
        })
        .collect();
    let mut best = (0, 0, -1.0);
    for &i in &extremes {
        for &j in &extremes {
            let d = dot(sub(pts[i], pts[j]), sub(pts[i], pts[j]));
            if d > best.2 {
                best = (i, j, d);
            }
        }
    }
    let (a, b) = (best.0, best.1);
    if a == b {
        return Err(HullFailure::Coplanar);
    }
    let ab = sub(pts[b], pts[a]);
    let c = (0..n)
        .max_by(|&i, &j| {
            let di = dot(cross(ab, sub(pts[i], pts[a])), cross(ab, sub(pts[i], pts[a])));
            let dj = dot(cross(ab, sub(pts[j], pts[a])), cross(ab, sub(pts[j], pts[a])));
            di.total_cmp(&dj)
        })
        .unwrap();
    let normal = cross(ab, sub(pts[c], pts[a]));
    let d = (0..n)
        .max_by(|&i, &j| dot(normal, sub(pts[i], pts[a])).abs().total_cmp(&dot(normal, sub(pts[j], pts[a])).abs()))
        .unwrap();
    if orient(pts[a], pts[b], pts[c], pts[d]) == 0.0 {
        return Err(HullFailure::Coplanar);
    }
    Ok([a, b, c, d])
}

pub fn convex_hull(points: &[[f64; 3]]) -> Result<HullMesh, HullFailure> {
    let mut unique: Vec<[f64; 3]> = points.to_vec();
    unique.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])).then(a[2].total_cmp(&b[2])));
    unique.dedup();
    if unique.len() < 4 {
        return Err(HullFailure::TooFewPoints(unique.len()));
    }
    // Reject exactly flat input before perturbation can invent a volume.
    initial_simplex(&unique)?;
    let extent = (0..3)
        .map(|axis| {
            let lo = unique.iter().map(|p| p[axis]).fold(f64::INFINITY, f64::min);
            let hi = unique.iter().map(|p| p[axis]).fold(f64::NEG_INFINITY, f64::max);
            hi - lo
        })
        .fold(0.0, f64::max);
    let mut state = 0x00C0_FFEE_u64;
    let pts: Vec<[f64; 3]> =
        unique.iter().map(|p| p.map(|x| x + PERTURBATION * extent * splitmix(&mut state))).collect();

    let [a, b, c, d] = initial_simplex(&pts)?;
    let mut builder = Builder { pts: &pts, faces: Vec::new(), edges: HashMap::new() };
    let mut tetra = [[a, b, c], [a, c, d], [a, d, b], [b, d, c]];
    if orient(pts[a], pts[b], pts[c], pts[d]) < 0.0 {
        // d is outside abc: flip every face
        for f in &mut tetra {
            f.swap(1, 2);
        }
    }
    let initial: Vec<usize> = tetra.iter().map(|&f| builder.add_face(f)).collect();
    let rest: Vec<usize> = (0..pts.len()).filter(|&i| ![a, b, c, d].contains(&i)).collect();
    builder.assign(&initial, rest);

    let mut stack: Vec<usize> = initial.clone();
    while let Some(f) = stack.pop() {
        if !builder.faces[f].alive || builder.faces[f].conflicts.is_empty() {
            continue;
        }
        let eye = *builder.faces[f]
            .conflicts
            .iter()
            .max_by(|&&p, &&q| builder.height(f, p).total_cmp(&builder.height(f, q)).then(q.cmp(&p)))
            .unwrap();

        // visible region by flood fill from f
        let mut visible = vec![f];
        let mut marked: HashMap<usize, bool> = HashMap::from([(f, true)]);
        let mut horizon: Vec<(usize, usize)> = Vec::new();
        let mut k = 0;
        while k < visible.len() {
            let g = visible[k];
            k += 1;
            let v = builder.faces[g].v;
            for e in 0..3 {
                let (u, w) = (v[e], v[(e + 1) % 3]);
                let nb = builder.edges[&(w, u)];
                let is_visible = *marked.entry(nb).or_insert_with(|| builder.visible(nb, eye));
                if is_visible {
                    if !visible.contains(&nb) {
                        visible.push(nb);
                    }
                } else {
                    horizon.push((u, w));
                }
            }
        }

        let mut orphans = Vec::new();
        for &g in &visible {
            orphans.extend(builder.kill_face(g));
        }
        let created: Vec<usize> = horizon.iter().map(|&(u, w)| builder.add_face([u, w, eye])).collect();
        orphans.retain(|&p| p != eye);
        orphans.sort_unstable();
        orphans.dedup();
        builder.assign(&created, orphans);
        stack.extend(created);
    }

    // Snap back to the original coordinates and compact the vertex list.
    let mut remap: HashMap<usize, usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut facets = Vec::new();
    for face in builder.faces.iter().filter(|f| f.alive) {
        let tri = face.v.map(|i| {
            *remap.entry(i).or_insert_with(|| {
                vertices.push(unique[i]);
                vertices.len() - 1
            })
        });
        facets.push(tri);
    }
    Ok(HullMesh { vertices, facets })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube() -> Vec<[f64; 3]> {
        let mut pts = Vec::new();
        for i in 0..8 {
            pts.push([(i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64]);
        }
        pts
    }

    fn check(mesh: &HullMesh, input: &[[f64; 3]]) {
        let v = mesh.vertices.len() as i64;
        let f = mesh.facets.len() as i64;
        assert_eq!(3 * f % 2, 0);
        assert_eq!(v - 3 * f / 2 + f, 2, "Euler relation");
        for tri in &mesh.facets {
            let [a, b, c] = tri.map(|i| mesh.vertices[i]);
            let n = cross(sub(b, a), sub(c, a));
            let len = dot(n, n).sqrt();
            if len == 0.0 {
                continue;
            }
            for p in input {
                assert!(dot(n, sub(*p, a)) / len <= 1e-9);
            }
        }
    }

    #[test]
    fn cube_with_face_and_interior_points() {
        let mut pts = cube();
        pts.extend([[0.5, 0.5, 0.5], [0.5, 0.5, 0.0], [0.5, 0.0, 0.5], [0.25, 0.75, 1.0], [1.0, 0.3, 0.3]]);
        pts.push([1.0, 1.0, 1.0]);
        let mesh = convex_hull(&pts).unwrap();
        check(&mesh, &pts);
        // coplanar face points may survive as vertices, interior points never do
        assert!(!mesh.vertices.contains(&[0.5, 0.5, 0.5]));
        for corner in cube() {
            assert!(mesh.vertices.contains(&corner));
        }
    }

    #[test]
    fn sphere_points_are_all_vertices() {
        let n = 400;
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        let pts: Vec<[f64; 3]> = (0..n)
            .map(|i| {
                let z = 1.0 - (2 * i + 1) as f64 / n as f64;
                let r = (1.0 - z * z).sqrt();
                let phi = golden * i as f64;
                [r * phi.cos(), r * phi.sin(), z]
            })
            .collect();
        let mesh = convex_hull(&pts).unwrap();
        assert_eq!(mesh.vertices.len(), n);
        check(&mesh, &pts);
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(
            convex_hull(&[[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]).unwrap_err(),
            HullFailure::TooFewPoints(3)
        );
        let flat: Vec<[f64; 3]> = (0..20).map(|i| [i as f64, (i * i) as f64, 0.0]).collect();
        assert_eq!(convex_hull(&flat).unwrap_err(), HullFailure::Coplanar);
        let dup = vec![[1.0, 2.0, 3.0]; 10];
        assert_eq!(convex_hull(&dup).unwrap_err(), HullFailure::TooFewPoints(1));
    }

    #[test]
    fn grid_points_with_many_coplanar_quadruples() {
        let mut pts = Vec::new();
        for i in 0..6 {
            for j in 0..6 {
                for k in 0..6 {
                    pts.push([i as f64, j as f64, k as f64]);
                }
            }
        }
        let mesh = convex_hull(&pts).unwrap();
        check(&mesh, &pts);
    }
}
