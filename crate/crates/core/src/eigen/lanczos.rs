//! Thick-restart block Lanczos with full reorthogonalization.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::spinops::BandedHermitian;

pub(crate) struct LanczosParams {
    pub block: usize,
    pub max_basis: usize,
    pub max_restarts: usize,
    pub seed: u64,
}

pub(crate) enum LanczosOutcome {
    Converged { energies: Vec<f64>, vectors: Vec<Vec<Complex64>> },
    NotConverged { best_residual: f64, restarts: usize },
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
}

fn axpy(alpha: Complex64, x: &[Complex64], y: &mut [Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Classical Gram-Schmidt applied twice against `basis`, then normalized.
/// Returns `None` when the remainder is below `drop_tol` of the input norm.
fn orthonormalize(mut v: Vec<Complex64>, basis: &[Vec<Complex64>], drop_tol: f64) -> Option<Vec<Complex64>> {
    let start = norm(&v);
    if start == 0.0 {
        return None;
    }
    for _ in 0..2 {
        let coeffs: Vec<Complex64> = basis.iter().map(|b| dot(b, &v)).collect();
        for (c, b) in coeffs.iter().zip(basis) {
            axpy(-c, b, &mut v);
        }
    }
    let rest = norm(&v);
    if rest <= drop_tol * start {
        return None;
    }
    v.iter_mut().for_each(|x| *x /= rest);
    Some(v)
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize, complex: bool) -> Vec<Complex64> {
    (0..n)
        .map(|_| {
            let re = rng.gen_range(-1.0..1.0);
            let im = if complex { rng.gen_range(-1.0..1.0) } else { 0.0 };
            Complex64::new(re, im)
        })
        .collect()
}

/// Combination `sum_k coeffs[k] * vectors[k]`.
fn combine(vectors: &[Vec<Complex64>], coeffs: impl Iterator<Item = Complex64>) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); vectors[0].len()];
    for (c, v) in coeffs.zip(vectors) {
        if c != Complex64::new(0.0, 0.0) {
            axpy(c, v, &mut out);
        }
    }
    out
}

struct Basis<'a> {
    h: &'a BandedHermitian,
    v: Vec<Vec<Complex64>>,
    hv: Vec<Vec<Complex64>>,
}

impl Basis<'_> {
    fn push(&mut self, v: Vec<Complex64>) {
        self.hv.push(self.h.apply(&v));
        self.v.push(v);
    }

    /// Appends what survives orthogonalization; returns the number added.
    fn extend(&mut self, candidates: Vec<Vec<Complex64>>) -> usize {
        let mut added = 0;
        for c in candidates {
            if let Some(q) = orthonormalize(c, &self.v, 1e-10) {
                self.push(q);
                added += 1;
            }
        }
        added
    }

    fn rayleigh_ritz(&self) -> (Vec<f64>, DMatrix<Complex64>) {
        let k = self.v.len();
        let mut t = DMatrix::<Complex64>::zeros(k, k);
        for i in 0..k {
            for j in i..k {
                let z = dot(&self.v[i], &self.hv[j]);
                t[(i, j)] = z;
                t[(j, i)] = z.conj();
            }
            t[(i, i)] = Complex64::new(t[(i, i)].re, 0.0);
        }
        let eig = SymmetricEigen::new(t);
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = DMatrix::from_fn(k, k, |r, c| eig.eigenvectors[(r, order[c])]);
        (values, vectors)
    }
}

pub(crate) fn block_lanczos(h: &BandedHermitian, m: usize, tol: f64, params: &LanczosParams) -> LanczosOutcome {
    let n = h.dim();
    let hnorm = h.norm_bound();
    let threshold = tol * hnorm;
    let complex = !h.is_real();
    let block = params.block.clamp(1, n);
    let max_basis = params.max_basis.clamp((m + 2 * block).min(n), n);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut basis = Basis { h, v: Vec::new(), hv: Vec::new() };
    let mut frontier: Vec<usize> = Vec::new();

    let seed_block = |basis: &mut Basis, rng: &mut ChaCha8Rng, want: usize| -> Vec<usize> {
        let mut fresh = Vec::new();
        let mut attempts = 0;
        while fresh.len() < want && basis.v.len() < n && attempts < 4 * want + 8 {
            attempts += 1;
            let before = basis.v.len();
            if basis.extend(vec![random_vector(rng, n, complex)]) == 1 {
                fresh.push(before);
            }
        }
        fresh
    };

    frontier.extend(seed_block(&mut basis, &mut rng, block));
    let mut best_residual = f64::INFINITY;

    for restart in 0..=params.max_restarts {
        while basis.v.len() < max_basis {
            let candidates: Vec<Vec<Complex64>> = frontier.iter().map(|&i| basis.hv[i].clone()).collect();
            let before = basis.v.len();
            let room = max_basis - before;
            let added = basis.extend(candidates.into_iter().take(room).collect());
            frontier = (before..before + added).collect();
            if added == 0 {
                // invariant subspace: continue from fresh random directions
                let room = max_basis - basis.v.len();
                frontier = seed_block(&mut basis, &mut rng, block.min(room));
                if frontier.is_empty() {
                    break;
                }
            }
        }

        let (values, s) = basis.rayleigh_ritz();
        let k = basis.v.len();
        let wanted = m.min(k);
        let mut residuals = Vec::with_capacity(wanted);
        let mut ritz = Vec::with_capacity(wanted);
        for (j, &value) in values.iter().enumerate().take(wanted) {
            let col = s.column(j);
            let y = combine(&basis.v, col.iter().copied());
            let mut r = combine(&basis.hv, col.iter().copied());
            axpy(Complex64::new(-value, 0.0), &y, &mut r);
            residuals.push(norm(&r));
            ritz.push((y, r));
        }
        let worst = residuals.iter().copied().fold(0.0, f64::max);
        best_residual = best_residual.min(worst / hnorm.max(f64::MIN_POSITIVE));
        if worst <= threshold || k == n {
            let vectors = ritz.into_iter().map(|(y, _)| y).collect();
            return LanczosOutcome::Converged { energies: values[..wanted].to_vec(), vectors };
        }
        if restart == params.max_restarts {
            break;
        }

        // Thick restart: keep the lowest Ritz vectors, then extend with the
        // residuals of the unconverged ones.
        let keep = (m + block).max(k / 2).min(k - block);
        let kept: Vec<Vec<Complex64>> = (0..keep).map(|j| combine(&basis.v, s.column(j).iter().copied())).collect();
        basis.v.clear();
        basis.hv.clear();
        // Re-orthonormalize against rounding drift in the recombination.
        basis.extend(kept);

        let mut pending: Vec<Vec<Complex64>> =
            ritz.into_iter().zip(&residuals).filter(|(_, &res)| res > threshold).map(|((_, r), _)| r).collect();
        pending.truncate(block);
        let before = basis.v.len();
        let added = basis.extend(pending);
        frontier = (before..before + added).collect();
        if frontier.is_empty() {
            frontier = seed_block(&mut basis, &mut rng, block);
        }
    }
    LanczosOutcome::NotConverged { best_residual, restarts: params.max_restarts }
}
