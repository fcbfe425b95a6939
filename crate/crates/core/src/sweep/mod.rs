//! Supporting-hyperplane sweeps over the boundary of the projected 2-RDM set.

mod grid;
mod io;
mod projection;
mod rdm;

pub use grid::{DirectionGrid, Plane, Scheme};
pub use io::{write_boundary_csv, write_faces_csv, write_jumps_csv, BOUNDARY_COLUMNS};
pub use projection::{convex_hull_2d, project_2d, project_points, signed_area2, Projection};
pub use rdm::{build_two_rdm, kron, pair_operator, pauli, TwoRDM};

pub(crate) use grid::{dot3, norm3};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::eigen::{lowest_eigenpairs_with, EigenError, EigenOptions, GroundSolution};
use crate::spinops::{assemble_hamiltonian, build_operator, BandedHermitian, Model, OperatorKind, SpinOpsError};

/// Largest ground-space dimension handled by [`resolve_exposed_face`].
pub const MAX_FACE_DIM: usize = 64;

/// Distinct face points closer than this are merged.
pub const FACE_DEDUP: f64 = 1e-7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SweepError {
    #[error(transparent)]
    Operator(#[from] SpinOpsError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error("state has dimension {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("ground space of dimension {0} exceeds the face-resolution cap of {MAX_FACE_DIM}")]
    FaceTooLarge(usize),
    #[error("secondary direction count {0} is below the minimum of 8")]
    TooFewSecondaryDirections(usize),
    #[error("two-particle reduced state needs at least 2 particles, got {0}")]
    TooFewParticles(usize),
    #[error("coupling direction {0:?} is zero or not finite")]
    InvalidDirection([f64; 3]),
    #[error("invalid direction grid: {0}")]
    InvalidGrid(String),
    #[error("no input points")]
    EmptyInput,
}

/// The three scaled observables of a model: `coords = (f_i/N) <H_i>`.
#[derive(Clone, Debug)]
pub struct Observables {
    n: usize,
    ops: [BandedHermitian; 3],
    scales: [f64; 3],
}

impl Observables {
    pub fn new(model: Model, n: usize) -> Result<Self, SweepError> {
        Self::from_terms(model.terms(), n)
    }

    pub fn from_terms(terms: [OperatorKind; 3], n: usize) -> Result<Self, SweepError> {
        let build = |k: OperatorKind| build_operator(k, n);
        let ops = [build(terms[0])?, build(terms[1])?, build(terms[2])?];
        let scales = terms.map(|k| k.scaling(n) / n as f64);
        Ok(Self { n, ops, scales })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coords(&self, state: &[Complex64]) -> Result<[f64; 3], SweepError> {
        if state.len() != self.n + 1 {
            return Err(SweepError::DimensionMismatch { expected: self.n + 1, got: state.len() });
        }
        Ok([0, 1, 2].map(|i| self.scales[i] * self.ops[i].expectation(state)))
    }

    /// The scaled observables compressed to `span(vectors)`.
    pub fn compress(&self, vectors: &[Vec<Complex64>]) -> Result<[DMatrix<Complex64>; 3], SweepError> {
        for v in vectors {
            if v.len() != self.n + 1 {
                return Err(SweepError::DimensionMismatch { expected: self.n + 1, got: v.len() });
            }
        }
        let d = vectors.len();
        Ok([0, 1, 2].map(|i| {
            let images: Vec<Vec<Complex64>> = vectors.iter().map(|v| self.ops[i].apply(v)).collect();
            let mut m = DMatrix::from_fn(d, d, |a, b| {
                vectors[a].iter().zip(&images[b]).map(|(x, y)| x.conj() * y).sum::<Complex64>() * self.scales[i]
            });
            // exact Hermitian symmetry
            let adj = m.adjoint();
            m = (m + adj) * Complex64::from(0.5);
            m
        }))
    }
}

/// `(f_i/N) <H_i>` for a normalized Dicke-basis state.
pub fn observable_coords(model: Model, n: usize, state: &[Complex64]) -> Result<[f64; 3], SweepError> {
    Observables::new(model, n)?.coords(state)
}

/// Extreme points of the joint numerical range of the observables compressed
/// to the span of `ground` (the exposed face of a degenerate direction).
pub fn resolve_exposed_face(
    ground: &[Vec<Complex64>],
    model: Model,
    n: usize,
    secondary_count: usize,
) -> Result<Vec<[f64; 3]>, SweepError> {
    resolve_face_with(&Observables::new(model, n)?, ground, secondary_count)
}

pub fn resolve_face_with(
    observables: &Observables,
    ground: &[Vec<Complex64>],
    secondary_count: usize,
) -> Result<Vec<[f64; 3]>, SweepError> {
    let d = ground.len();
    if d == 0 {
        return Err(SweepError::EmptyInput);
    }
    if d > MAX_FACE_DIM {
        return Err(SweepError::FaceTooLarge(d));
    }
    if secondary_count < 8 {
        return Err(SweepError::TooFewSecondaryDirections(secondary_count));
    }
    if d == 1 {
        return Ok(vec![observables.coords(&ground[0])?]);
    }
    let [a, b, c] = observables.compress(ground)?;
    let scale = [&a, &b, &c].iter().map(|m| m.iter().map(|z| z.norm()).fold(0.0, f64::max)).fold(0.0, f64::max);
    let split_tol = 1e-9 * scale.max(f64::MIN_POSITIVE);
    let point_of = |w: &nalgebra::DVector<Complex64>| -> [f64; 3] { [&a, &b, &c].map(|m| w.dotc(&(m * w)).re) };
    let mut points: Vec<[f64; 3]> = Vec::new();
    let push = |p: [f64; 3], points: &mut Vec<[f64; 3]>| {
        let close = points.iter().any(|q| norm3([p[0] - q[0], p[1] - q[1], p[2] - q[2]]) <= FACE_DEDUP);
        if !close {
            points.push(p);
        }
    };
    for u in DirectionGrid::fibonacci(secondary_count)?.directions() {
        let m = &a * Complex64::from(u[0]) + &b * Complex64::from(u[1]) + &c * Complex64::from(u[2]);
        let eig = SymmetricEigen::new(m);
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
        if eig.eigenvalues[order[0]] - eig.eigenvalues[order[1]] <= split_tol {
            continue;
        }
        push(point_of(&eig.eigenvectors.column(order[0]).into_owned()), &mut points);
    }
    if points.is_empty() {
        // every direction degenerate: the compressed observables are scalar
        push(observables.coords(&ground[0])?, &mut points);
    }
    Ok(points)
}

#[derive(Clone, Debug)]
pub struct SweepOptions {
    pub tol_residual: f64,
    /// Eigenpairs requested first; doubled while the ground multiplet fills them.
    pub initial_levels: usize,
    pub secondary_count: usize,
    pub eigen: EigenOptions,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { tol_residual: 1e-10, initial_levels: 4, secondary_count: 64, eigen: EigenOptions::default() }
    }
}

/// One exposed point of the projected set together with its spectral data.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryPoint {
    pub lambda: [f64; 3],
    pub n_particles: usize,
    pub coords: [f64; 3],
    pub energy_per_particle: f64,
    pub gap01: f64,
    pub gap12: f64,
    pub degeneracy: usize,
    pub face_vertices: Vec<[f64; 3]>,
}

/// Ground multiplet with enough extra levels to bound it from above.
pub fn solve_ground(h: &BandedHermitian, options: &SweepOptions) -> Result<GroundSolution, SweepError> {
    let dim = h.dim();
    let mut m = options.initial_levels.clamp(1, dim);
    loop {
        let sol = lowest_eigenpairs_with(h, m, options.tol_residual, &options.eigen)?;
        if sol.degeneracy < m || m == dim {
            return Ok(sol);
        }
        m = (2 * m).min(dim);
    }
}

pub fn boundary_point(
    model: Model,
    n: usize,
    lambda: [f64; 3],
    options: &SweepOptions,
) -> Result<BoundaryPoint, SweepError> {
    boundary_point_with(&Observables::new(model, n)?, model, lambda, options)
}

fn boundary_point_with(
    observables: &Observables,
    model: Model,
    lambda: [f64; 3],
    options: &SweepOptions,
) -> Result<BoundaryPoint, SweepError> {
    let norm = norm3(lambda);
    if !norm.is_finite() || norm == 0.0 {
        return Err(SweepError::InvalidDirection(lambda));
    }
    let n = observables.n();
    let h = assemble_hamiltonian(&model.spec(lambda, n)?)?;
    let sol = solve_ground(&h, options)?;
    let face_vertices = if sol.degeneracy == 1 {
        vec![observables.coords(sol.ground_state())?]
    } else {
        resolve_face_with(observables, sol.ground_space(), options.secondary_count)?
    };
    let count = face_vertices.len() as f64;
    let coords = [0, 1, 2].map(|i| face_vertices.iter().map(|v| v[i]).sum::<f64>() / count);
    Ok(BoundaryPoint {
        lambda,
        n_particles: n,
        coords,
        energy_per_particle: sol.ground_energy() / n as f64,
        gap01: sol.gap01,
        gap12: sol.gap12,
        degeneracy: sol.degeneracy,
        face_vertices,
    })
}

/// Boundary points for every grid direction, in grid order. Directions are
/// solved in parallel; a failing direction does not stop the others.
pub fn trace_boundary(
    model: Model,
    n: usize,
    grid: &DirectionGrid,
    options: &SweepOptions,
) -> Result<Vec<Result<BoundaryPoint, SweepError>>, SweepError> {
    let observables = Observables::new(model, n)?;
    Ok(grid.directions().par_iter().map(|&lambda| boundary_point_with(&observables, model, lambda, options)).collect())
}

/// Distance between the points of consecutive directions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Jump {
    pub from: usize,
    pub to: usize,
    pub distance: f64,
}

/// Coordinate jumps between successive successful directions; `closed`
/// also links the last direction back to the first.
pub fn coordinate_jumps(points: &[Result<BoundaryPoint, SweepError>], closed: bool) -> Vec<Jump> {
    let ok: Vec<(usize, [f64; 3])> =
        points.iter().enumerate().filter_map(|(i, p)| p.as_ref().ok().map(|p| (i, p.coords))).collect();
    let mut jumps: Vec<Jump> =
        ok.windows(2).map(|w| Jump { from: w[0].0, to: w[1].0, distance: distance3(w[0].1, w[1].1) }).collect();
    if closed && ok.len() > 2 {
        let (first, last) = (ok[0], ok[ok.len() - 1]);
        jumps.push(Jump { from: last.0, to: first.0, distance: distance3(last.1, first.1) });
    }
    jumps
}

pub(crate) fn distance3(a: [f64; 3], b: [f64; 3]) -> f64 {
    norm3([a[0] - b[0], a[1] - b[1], a[2] - b[2]])
}
