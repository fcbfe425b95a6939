//! Lowest eigenpairs of banded Hermitian matrices.
//!
//! Matrices up to [`DENSE_CUTOFF`] rows use a direct band solver; larger ones
//! use a restarted block Lanczos iteration with full reorthogonalization.

mod band;
mod lanczos;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::spinops::BandedHermitian;
use lanczos::{block_lanczos, LanczosOutcome, LanczosParams};

/// Largest dimension handled by the direct solver.
pub const DENSE_CUTOFF: usize = 2001;

/// Seed for iterative start vectors.
pub const DEFAULT_SEED: u64 = 0x5EE_D0FD_1C4E;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EigenError {
    #[error("requested {requested} eigenpairs from a matrix of dimension {dim}")]
    InvalidCount { requested: usize, dim: usize },
    #[error("residual tolerance {0} outside (0, 1e-4]")]
    InvalidTolerance(f64),
    #[error("dimension {dim} exceeds the dense cutoff {cutoff}; use lowest_eigenpairs instead")]
    AboveDenseCutoff { dim: usize, cutoff: usize },
    #[error("eigensolver did not converge after {iterations} restarts (best relative residual {best_residual:.3e})")]
    NotConverged { best_residual: f64, iterations: usize },
}

/// Which solver to use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    /// Direct solver up to the dense cutoff, iterative above.
    #[default]
    Auto,
    Dense,
    Iterative,
}

#[derive(Clone, Debug)]
pub struct EigenOptions {
    pub strategy: Strategy,
    pub dense_cutoff: usize,
    /// Absolute degeneracy tolerance; `None` selects `1e-8 * max(1, |E0|)`.
    pub tol_deg: Option<f64>,
    pub seed: u64,
    pub max_restarts: usize,
    /// Krylov block width; `None` uses `max(m, 2)`.
    pub block_size: Option<usize>,
    /// Basis size before a restart; `None` picks from `m`.
    pub max_basis: Option<usize>,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            strategy: Strategy::Auto,
            dense_cutoff: DENSE_CUTOFF,
            tol_deg: None,
            seed: DEFAULT_SEED,
            max_restarts: 500,
            block_size: None,
            max_basis: None,
        }
    }
}

/// Degeneracy tolerance used when none is supplied.
pub fn default_tol_deg(e0: f64) -> f64 {
    1e-8 * e0.abs().max(1.0)
}

/// Lowest part of a spectrum together with its eigenvectors.
#[derive(Clone, Debug, Serialize)]
pub struct GroundSolution {
    pub energies: Vec<f64>,
    #[serde(skip)]
    pub vectors: Vec<Vec<Complex64>>,
    /// `E1 - E0`, NaN when fewer than two levels were computed.
    pub gap01: f64,
    /// `E2 - E1`, NaN when fewer than three levels were computed.
    pub gap12: f64,
    pub degeneracy: usize,
    pub tol_deg: f64,
}

impl GroundSolution {
    fn from_pairs(energies: Vec<f64>, vectors: Vec<Vec<Complex64>>, tol_deg: Option<f64>) -> Self {
        let e0 = energies[0];
        let tol_deg = tol_deg.unwrap_or_else(|| default_tol_deg(e0));
        let gap = |i: usize| energies.get(i + 1).map_or(f64::NAN, |e| (e - energies[i]).max(0.0));
        let gap01 = gap(0);
        let gap12 = gap(1);
        let degeneracy = energies.iter().filter(|&&e| e - e0 <= tol_deg).count();
        Self { energies, vectors, gap01, gap12, degeneracy, tol_deg }
    }

    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }

    pub fn ground_state(&self) -> &[Complex64] {
        &self.vectors[0]
    }

    /// Eigenvectors spanning the (numerically) degenerate ground space.
    pub fn ground_space(&self) -> &[Vec<Complex64>] {
        &self.vectors[..self.degeneracy]
    }

    /// True when every computed level is inside the ground multiplet, so the
    /// multiplet may extend past what was computed.
    pub fn degeneracy_saturated(&self) -> bool {
        self.degeneracy == self.energies.len()
    }
}

/// `‖H v − E v‖₂`.
pub fn residual_norm(h: &BandedHermitian, energy: f64, v: &[Complex64]) -> f64 {
    h.apply(v).iter().zip(v).map(|(hv, x)| (hv - x * energy).norm_sqr()).sum::<f64>().sqrt()
}

pub fn lowest_eigenpairs(h: &BandedHermitian, m: usize, tol_residual: f64) -> Result<GroundSolution, EigenError> {
    lowest_eigenpairs_with(h, m, tol_residual, &EigenOptions::default())
}

pub fn lowest_eigenpairs_with(
    h: &BandedHermitian,
    m: usize,
    tol_residual: f64,
    options: &EigenOptions,
) -> Result<GroundSolution, EigenError> {
    let dim = h.dim();
    if m == 0 || m > dim {
        return Err(EigenError::InvalidCount { requested: m, dim });
    }
    if !(tol_residual > 0.0 && tol_residual <= 1e-4) {
        return Err(EigenError::InvalidTolerance(tol_residual));
    }
    let dense = match options.strategy {
        Strategy::Auto => dim <= options.dense_cutoff,
        Strategy::Dense => true,
        Strategy::Iterative => false,
    };
    let (energies, vectors) = if dense {
        let (energies, vectors) = band::banded_lowest(h, m);
        let threshold = tol_residual * h.norm_bound();
        let worst = energies.iter().zip(&vectors).map(|(&e, v)| residual_norm(h, e, v)).fold(0.0, f64::max);
        if worst > threshold {
            return Err(EigenError::NotConverged { best_residual: worst / h.norm_bound(), iterations: 0 });
        }
        (energies, vectors)
    } else {
        let block = options.block_size.unwrap_or(m.max(2));
        let params = LanczosParams {
            block,
            max_basis: options.max_basis.unwrap_or((4 * m + 4 * block).max(64)),
            max_restarts: options.max_restarts,
            seed: options.seed,
        };
        match block_lanczos(h, m, tol_residual, &params) {
            LanczosOutcome::Converged { energies, vectors } => (energies, vectors),
            LanczosOutcome::NotConverged { best_residual, restarts } => {
                return Err(EigenError::NotConverged { best_residual, iterations: restarts })
            }
        }
    };
    Ok(GroundSolution::from_pairs(energies, vectors, options.tol_deg))
}

/// Every eigenvalue in ascending order.
pub fn spectrum_full(h: &BandedHermitian) -> Result<Vec<f64>, EigenError> {
    spectrum_full_with_cutoff(h, DENSE_CUTOFF)
}

pub fn spectrum_full_with_cutoff(h: &BandedHermitian, cutoff: usize) -> Result<Vec<f64>, EigenError> {
    if h.dim() > cutoff {
        return Err(EigenError::AboveDenseCutoff { dim: h.dim(), cutoff });
    }
    Ok(band::banded_eigenvalues(h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spinops::{assemble_hamiltonian, build_operator, Model, OperatorKind};
    use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest, ProptestConfig};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ham(model: Model, lambda: [f64; 3], n: usize) -> BandedHermitian {
        assemble_hamiltonian(&model.spec(lambda, n).unwrap()).unwrap()
    }

    fn assert_close(got: &[f64], want: &[f64], tol: f64) {
        assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() <= tol, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn ising_zero_field_levels() {
        let sol = lowest_eigenpairs(&ham(Model::Ising, [1.0, 0.0, 0.0], 4), 5, 1e-10).unwrap();
        assert_close(&sol.energies, &[0.0, 1.0, 1.0, 4.0, 4.0], 1e-12);
        assert_eq!(sol.degeneracy, 1);
        assert!((sol.gap01 - 1.0).abs() < 1e-12);
        assert!(sol.gap12.abs() < 1e-12);
    }

    #[test]
    fn ising_transverse_field_minimum() {
        let sol = lowest_eigenpairs(&ham(Model::Ising, [1.0, 0.0, -1.0], 100), 2, 1e-10).unwrap();
        assert!((sol.energies[0] + 25.0).abs() < 1e-9, "{}", sol.energies[0]);
    }

    #[test]
    fn zero_matrix_is_fully_degenerate() {
        let sol = lowest_eigenpairs(&BandedHermitian::zeros(6), 3, 1e-10).unwrap();
        assert_eq!(sol.energies, vec![0.0; 3]);
        assert_eq!(sol.degeneracy, 3);
        assert!(sol.degeneracy_saturated());
    }

    #[test]
    fn full_spectra() {
        assert_close(&spectrum_full(&ham(Model::Xy, [1.0, 1.0, 0.0], 4)).unwrap(), &[2.0, 2.0, 5.0, 5.0, 6.0], 1e-12);
        let jz = build_operator(OperatorKind::Jz, 2).unwrap();
        assert_close(&spectrum_full(&jz).unwrap(), &[-2.0, 0.0, 2.0], 0.0);
        let e = spectrum_full(&ham(Model::Ising, [-1.0, 0.0, 0.0], 10)).unwrap();
        assert!((e[0] + 10.0).abs() < 1e-12 && (e[1] + 10.0).abs() < 1e-12 && e[2] > -9.0);
    }

    #[test]
    fn spectrum_full_rejects_large() {
        let err = spectrum_full(&BandedHermitian::zeros(DENSE_CUTOFF + 1)).unwrap_err();
        assert!(err.to_string().contains("lowest_eigenpairs"));
    }

    #[test]
    fn argument_validation() {
        let h = BandedHermitian::zeros(3);
        assert!(matches!(lowest_eigenpairs(&h, 0, 1e-10), Err(EigenError::InvalidCount { .. })));
        assert!(matches!(lowest_eigenpairs(&h, 4, 1e-10), Err(EigenError::InvalidCount { .. })));
        assert!(matches!(lowest_eigenpairs(&h, 1, 1e-3), Err(EigenError::InvalidTolerance(_))));
        assert!(matches!(lowest_eigenpairs(&h, 1, 0.0), Err(EigenError::InvalidTolerance(_))));
    }

    #[test]
    fn iterative_non_convergence_reports_residual() {
        let h = ham(Model::Ising, [1.0, 0.3, -0.7], 400);
        let options = EigenOptions {
            strategy: Strategy::Iterative,
            max_restarts: 0,
            max_basis: Some(8),
            ..EigenOptions::default()
        };
        match lowest_eigenpairs_with(&h, 2, 1e-12, &options) {
            Err(EigenError::NotConverged { best_residual, .. }) => {
                assert!(best_residual.is_finite() && best_residual > 1e-12)
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    fn random_lambda(rng: &mut ChaCha8Rng) -> [f64; 3] {
        [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]
    }

    #[test]
    fn strategies_agree_on_random_specs() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let iterative = EigenOptions { strategy: Strategy::Iterative, ..EigenOptions::default() };
        for trial in 0..50 {
            let model = if trial % 2 == 0 { Model::Ising } else { Model::Xy };
            let n = rng.gen_range(20..=300);
            let h = ham(model, random_lambda(&mut rng), n);
            let dense = lowest_eigenpairs(&h, 3, 1e-10).unwrap();
            let iter = lowest_eigenpairs_with(&h, 3, 1e-10, &iterative).unwrap();
            assert_close(&iter.energies, &dense.energies, 1e-9);
        }
    }

    #[test]
    fn eigenvectors_orthonormal_with_small_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for strategy in [Strategy::Dense, Strategy::Iterative] {
            let options = EigenOptions { strategy, ..EigenOptions::default() };
            for model in Model::ALL {
                let h = ham(model, random_lambda(&mut rng), 150);
                let sol = lowest_eigenpairs_with(&h, 4, 1e-10, &options).unwrap();
                assert!(sol.energies.windows(2).all(|w| w[0] <= w[1]));
                for (i, a) in sol.vectors.iter().enumerate() {
                    assert!(residual_norm(&h, sol.energies[i], a) <= 1e-10 * h.norm_bound());
                    for (j, b) in sol.vectors.iter().enumerate() {
                        let d: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
                        let want = if i == j { 1.0 } else { 0.0 };
                        assert!((d - want).norm() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn iterative_is_deterministic() {
        let h = ham(Model::Xy, [-0.4, 0.9, 0.2], 3000);
        let a = lowest_eigenpairs(&h, 2, 1e-10).unwrap();
        let b = lowest_eigenpairs(&h, 2, 1e-10).unwrap();
        assert_eq!(a.energies, b.energies);
        assert_eq!(a.vectors, b.vectors);
    }

    #[test]
    fn variational_bound_on_random_vectors() {
        let h = ham(Model::Ising, [0.7, -0.2, 0.5], 60);
        let e0 = lowest_eigenpairs(&h, 1, 1e-10).unwrap().energies[0];
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..100 {
            let mut v: Vec<Complex64> =
                (0..61).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let norm = v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
            assert!(e0 <= h.expectation(&v) + 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn degeneracy_consistent_with_energies(
            j in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0, n in 2usize..80, xy in any::<bool>()
        ) {
            let model = if xy { Model::Xy } else { Model::Ising };
            let sol = lowest_eigenpairs(&ham(model, [j, b, c], n), 3, 1e-10).unwrap();
            let e0 = sol.energies[0];
            let count = sol.energies.iter().filter(|&&e| e - e0 <= sol.tol_deg).count();
            prop_assert_eq!(sol.degeneracy, count);
            prop_assert!(sol.degeneracy >= 1);
            prop_assert!(sol.gap01 >= 0.0 && sol.gap12 >= 0.0);
            prop_assert!((sol.tol_deg - default_tol_deg(e0)).abs() == 0.0);
        }
    }
}
