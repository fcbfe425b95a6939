//! Reference results built without the banded machinery: collective
//! operators as explicit Pauli sums on the full `2^N` space, projected onto
//! the symmetric subspace, plus closed-form spectra of the solvable families.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use thiserror::Error;

use crate::spinops::{Model, OperatorKind};

/// Largest particle number accepted by [`FullSpaceModel`].
pub const MAX_ORACLE_N: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("full-space oracle supports 1 <= N <= {MAX_ORACLE_N}, got {0}")]
    UnsupportedSize(usize),
    #[error("closed form needs a nonzero coupling")]
    ZeroCoupling,
    #[error("closed form needs N >= 1")]
    EmptySystem,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    /// Image of basis state `b`: amplitude and new index. Bit 0 is spin up (`Z = +1`).
    fn apply(self, site: usize, b: usize) -> (Complex64, usize) {
        let bit = (b >> site) & 1;
        let flipped = b ^ (1 << site);
        match (self, bit) {
            (Pauli::X, _) => (Complex64::new(1.0, 0.0), flipped),
            (Pauli::Y, 0) => (Complex64::new(0.0, 1.0), flipped),
            (Pauli::Y, _) => (Complex64::new(0.0, -1.0), flipped),
            (Pauli::Z, 0) => (Complex64::new(1.0, 0.0), b),
            (Pauli::Z, _) => (Complex64::new(-1.0, 0.0), b),
        }
    }
}

/// `coef * prod_k sigma_{site_k}`.
#[derive(Clone, Debug, PartialEq)]
struct PauliString {
    coef: f64,
    factors: Vec<(usize, Pauli)>,
}

fn collective(kind: OperatorKind, n: usize, coef: f64) -> Vec<PauliString> {
    let single = |p: Pauli| (0..n).map(|i| PauliString { coef, factors: vec![(i, p)] }).collect::<Vec<_>>();
    let pairs = |p: Pauli| {
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let factors = if i == j { vec![] } else { vec![(i, p), (j, p)] };
                out.push(PauliString { coef, factors });
            }
        }
        out
    };
    match kind {
        OperatorKind::Jx => single(Pauli::X),
        OperatorKind::Jy => single(Pauli::Y),
        OperatorKind::Jz => single(Pauli::Z),
        OperatorKind::Jx2 => pairs(Pauli::X),
        OperatorKind::Jy2 => pairs(Pauli::Y),
        OperatorKind::Jz2 => pairs(Pauli::Z),
        OperatorKind::Identity => vec![PauliString { coef, factors: vec![] }],
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Energy scaling of a collective term: `1/N` for quadratic terms.
fn term_scale(kind: OperatorKind, n: usize) -> f64 {
    match kind {
        OperatorKind::Jx2 | OperatorKind::Jy2 | OperatorKind::Jz2 => 1.0 / n as f64,
        _ => 1.0,
    }
}

/// A Pauli-sum Hamiltonian on `N` qubits, applied matrix-free, with the
/// Dicke basis of its symmetric subspace.
#[derive(Clone, Debug)]
pub struct FullSpaceModel {
    n: usize,
    hamiltonian: Vec<PauliString>,
    /// Dicke vector `i` holds `N - i` flipped spins (so `Jz = 2i - N`).
    symmetric_basis: Vec<Vec<f64>>,
}

impl FullSpaceModel {
    pub fn new(terms: &[(OperatorKind, f64)], n: usize) -> Result<Self, OracleError> {
        if n == 0 || n > MAX_ORACLE_N {
            return Err(OracleError::UnsupportedSize(n));
        }
        let hamiltonian = terms
            .iter()
            .filter(|(_, c)| *c != 0.0)
            .flat_map(|&(kind, c)| collective(kind, n, c * term_scale(kind, n)))
            .collect();
        let dim = 1usize << n;
        let symmetric_basis = (0..=n)
            .map(|i| {
                let flips = n - i;
                let amp = binomial(n, flips).sqrt().recip();
                (0..dim).map(|b| if b.count_ones() as usize == flips { amp } else { 0.0 }).collect()
            })
            .collect();
        Ok(Self { n, hamiltonian, symmetric_basis })
    }

    pub fn for_model(model: Model, lambda: [f64; 3], n: usize) -> Result<Self, OracleError> {
        let terms = model.terms();
        Self::new(&[(terms[0], lambda[0]), (terms[1], lambda[1]), (terms[2], lambda[2])], n)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn symmetric_basis(&self) -> &[Vec<f64>] {
        &self.symmetric_basis
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        for term in &self.hamiltonian {
            for (b, &amp) in v.iter().enumerate() {
                if amp == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let (mut phase, mut idx) = (Complex64::new(term.coef, 0.0), b);
                for &(site, p) in &term.factors {
                    let (f, next) = p.apply(site, idx);
                    phase *= f;
                    idx = next;
                }
                out[idx] += phase * amp;
            }
        }
        out
    }

    fn images(&self) -> Vec<Vec<Complex64>> {
        self.symmetric_basis
            .iter()
            .map(|d| self.apply(&d.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>()))
            .collect()
    }

    fn project_images(&self, images: &[Vec<Complex64>]) -> DMatrix<Complex64> {
        let m = self.n + 1;
        DMatrix::from_fn(m, m, |a, b| self.symmetric_basis[a].iter().zip(&images[b]).map(|(&d, &h)| h * d).sum())
    }

    /// `<D_a| H |D_b>`.
    pub fn projected(&self) -> DMatrix<Complex64> {
        self.project_images(&self.images())
    }

    /// Largest norm of `(I - P) H |D_b>` over the Dicke vectors.
    pub fn closure_residual(&self) -> f64 {
        let images = self.images();
        let projected = self.project_images(&images);
        images
            .iter()
            .enumerate()
            .map(|(b, img)| {
                let mut rest = img.clone();
                for (a, d) in self.symmetric_basis.iter().enumerate() {
                    for (r, &x) in rest.iter_mut().zip(d) {
                        *r -= projected[(a, b)] * x;
                    }
                }
                rest.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
            })
            .fold(0.0, f64::max)
    }
}

/// Ground data from a dense solve in the symmetric subspace.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleGround {
    pub energy: f64,
    /// `(f_i/N) <H_i>` in the lowest eigenvector.
    pub coords: [f64; 3],
    pub spectrum: Vec<f64>,
}

pub fn brute_force_ground(model: Model, lambda: [f64; 3], n: usize) -> Result<OracleGround, OracleError> {
    let full = FullSpaceModel::for_model(model, lambda, n)?;
    let eig = SymmetricEigen::new(full.projected());
    let mut order: Vec<usize> = (0..=n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let ground = eig.eigenvectors.column(order[0]).into_owned();
    // a unit coupling carries the term's scaling, so <.> / N is the coordinate
    let coords = [0, 1, 2].map(|i| {
        let mut unit = [0.0; 3];
        unit[i] = 1.0;
        let h = FullSpaceModel::for_model(model, unit, n).expect("size already checked").projected();
        ground.dotc(&(h * &ground)).re / n as f64
    });
    Ok(OracleGround {
        energy: eig.eigenvalues[order[0]],
        coords,
        spectrum: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SolvableFamily {
    /// `(J/N) Jx^2`: `E_k = (J/N) k^2`.
    IsingZeroField { j: f64, n: usize },
    /// `(J/N) Jx^2 + Bx Jx`: `E_k = (J/N)(k + N Bx / 2J)^2 - N Bx^2 / 4J`.
    IsingBx { j: f64, bx: f64, n: usize },
    /// `(J1/N)(Jx^2 + Jy^2)`: `E_k = (J1/N)(N(N+2) - k^2)`.
    XyEqual { j1: f64, n: usize },
}

/// Closed-form levels over `k = -N, -N+2, ..., N`, ascending.
pub fn analytic_spectrum(family: SolvableFamily) -> Result<Vec<f64>, OracleError> {
    let n = match family {
        SolvableFamily::IsingZeroField { n, .. }
        | SolvableFamily::IsingBx { n, .. }
        | SolvableFamily::XyEqual { n, .. } => n,
    };
    if n == 0 {
        return Err(OracleError::EmptySystem);
    }
    let nf = n as f64;
    let level: Box<dyn Fn(f64) -> f64> = match family {
        SolvableFamily::IsingZeroField { j, .. } => Box::new(move |k| j / nf * k * k),
        SolvableFamily::IsingBx { j, bx, .. } => {
            if j == 0.0 {
                return Err(OracleError::ZeroCoupling);
            }
            Box::new(move |k| j / nf * (k + nf * bx / (2.0 * j)).powi(2) - nf * bx * bx / (4.0 * j))
        }
        SolvableFamily::XyEqual { j1, .. } => Box::new(move |k| j1 / nf * (nf * (nf + 2.0) - k * k)),
    };
    let mut levels: Vec<f64> = (0..=n).map(|i| level(2.0 * i as f64 - nf)).collect();
    levels.sort_by(f64::total_cmp);
    Ok(levels)
}
