use nalgebra::{Matrix2, Matrix4, SymmetricEigen};
use num_complex::Complex64;

use super::SweepError;
use crate::spinops::{build_operator, OperatorKind};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Single-qubit Pauli matrices in the order I, X, Y, Z; `|0>` has `Z = +1`.
pub fn pauli(index: usize) -> Matrix2<Complex64> {
    match index {
        0 => Matrix2::new(ONE, ZERO, ZERO, ONE),
        1 => Matrix2::new(ZERO, ONE, ONE, ZERO),
        2 => Matrix2::new(ZERO, -I, I, ZERO),
        3 => Matrix2::new(ONE, ZERO, ZERO, -ONE),
        _ => panic!("Pauli index {index} out of range"),
    }
}

pub fn kron(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>) -> Matrix4<Complex64> {
    Matrix4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

/// Two-particle operator whose expectation in the 2-RDM equals the
/// coordinate contributed by a collective term.
pub fn pair_operator(kind: OperatorKind, n: usize) -> Matrix4<Complex64> {
    let n = n as f64;
    let id = kron(&pauli(0), &pauli(0));
    let single = |a: usize| (kron(&pauli(a), &pauli(0)) + kron(&pauli(0), &pauli(a))) * Complex64::from(0.5);
    let pair = |a: usize| id * Complex64::from(1.0 / n) + kron(&pauli(a), &pauli(a)) * Complex64::from((n - 1.0) / n);
    match kind {
        OperatorKind::Jx => single(1),
        OperatorKind::Jy => single(2),
        OperatorKind::Jz => single(3),
        OperatorKind::Jx2 => pair(1),
        OperatorKind::Jy2 => pair(2),
        OperatorKind::Jz2 => pair(3),
        OperatorKind::Identity => id * Complex64::from(1.0 / n),
    }
}

/// Two-qubit reduced density matrix of a permutation-symmetric state.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoRDM {
    pub matrix: Matrix4<Complex64>,
}

impl TwoRDM {
    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn expectation(&self, op: &Matrix4<Complex64>) -> f64 {
        (self.matrix * op).trace().re
    }

    /// `<sigma_a (x) sigma_b>` with indices into I, X, Y, Z.
    pub fn pauli_expectation(&self, a: usize, b: usize) -> f64 {
        self.expectation(&kron(&pauli(a), &pauli(b)))
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        let mut e: Vec<f64> = SymmetricEigen::new(self.matrix).eigenvalues.iter().copied().collect();
        e.sort_by(f64::total_cmp);
        [e[0], e[1], e[2], e[3]]
    }

    /// The matrix with its two tensor factors exchanged.
    pub fn swapped(&self) -> Matrix4<Complex64> {
        let perm = [0, 2, 1, 3];
        Matrix4::from_fn(|r, c| self.matrix[(perm[r], perm[c])])
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (self.matrix - self.matrix.adjoint()).map(|z| z.norm()).max()
    }
}

/// Builds the 2-RDM of a state in the Dicke basis from collective moments.
pub fn build_two_rdm(n: usize, state: &[Complex64]) -> Result<TwoRDM, SweepError> {
    if n < 2 {
        return Err(SweepError::TooFewParticles(n));
    }
    if state.len() != n + 1 {
        return Err(SweepError::DimensionMismatch { expected: n + 1, got: state.len() });
    }
    let ops = [OperatorKind::Jx, OperatorKind::Jy, OperatorKind::Jz].map(|k| build_operator(k, n).expect("n >= 2"));
    let images: Vec<Vec<Complex64>> = ops.iter().map(|op| op.apply(state)).collect();
    let inner = |a: &[Complex64], b: &[Complex64]| -> Complex64 { a.iter().zip(b).map(|(x, y)| x.conj() * y).sum() };
    let nf = n as f64;
    let pairs = nf * (nf - 1.0);
    // corr[a][b] = <sigma_a (x) sigma_b> with a, b in 0..4 (0 = identity)
    let mut corr = [[0.0; 4]; 4];
    corr[0][0] = inner(state, state).re;
    for a in 0..3 {
        let single = inner(state, &images[a]).re / nf;
        corr[a + 1][0] = single;
        corr[0][a + 1] = single;
        for b in a..3 {
            // <J_a J_b> symmetrized: Re <J_a v, J_b v>
            let moment = inner(&images[a], &images[b]).re;
            let value = if a == b { (moment - nf) / pairs } else { moment / pairs };
            corr[a + 1][b + 1] = value;
            corr[b + 1][a + 1] = value;
        }
    }
    let mut matrix = Matrix4::zeros();
    for (a, row) in corr.iter().enumerate() {
        for (b, &value) in row.iter().enumerate() {
            matrix += kron(&pauli(a), &pauli(b)) * Complex64::from(value / 4.0);
        }
    }
    Ok(TwoRDM { matrix })
}
