//! Collective spin operators and two-mode Hamiltonians in the symmetric
//! (Dicke) subspace of `N` qubits.
//!
//! Basis vectors are ordered by ascending collective `J_z` eigenvalue
//! `k = -N, -N + 2, ..., N`; basis index `i` carries `k = 2i - N`. All
//! collective operators use the Pauli normalization `J_a = sum_i sigma_a^i`,
//! i.e. twice the angular-momentum operator of total spin `N/2`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpinOpsError {
    #[error("particle number must be at least 1, got {0}")]
    InvalidParticleNumber(usize),
    #[error("unknown model preset `{name}`; valid presets: {valid}")]
    UnknownPreset { name: String, valid: String },
    #[error("unknown operator `{0}`; valid operators: Jx, Jy, Jz, Jx2, Jy2, Jz2, Identity")]
    UnknownOperator(String),
    #[error("malformed band storage: {0}")]
    MalformedBands(String),
}

/// Hermitian matrix stored as its main diagonal and super-diagonals.
#[derive(Clone, Debug, PartialEq)]
pub struct BandedHermitian {
    dim: usize,
    /// `bands[d][i]` is the entry at row `i`, column `i + d`.
    bands: Vec<Vec<Complex64>>,
    real: bool,
}

impl BandedHermitian {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, bands: vec![vec![Complex64::new(0.0, 0.0); dim]], real: true }
    }

    pub fn identity(dim: usize) -> Self {
        Self { dim, bands: vec![vec![Complex64::new(1.0, 0.0); dim]], real: true }
    }

    /// Builds a matrix from explicit upper bands. Trailing all-zero bands are
    /// trimmed; the diagonal must be real.
    pub fn from_bands(mut bands: Vec<Vec<Complex64>>) -> Result<Self, SpinOpsError> {
        let dim = bands.first().map(Vec::len).ok_or_else(|| SpinOpsError::MalformedBands("no diagonal".into()))?;
        for (d, band) in bands.iter().enumerate() {
            if band.len() != dim.saturating_sub(d) {
                return Err(SpinOpsError::MalformedBands(format!(
                    "band {d} has length {}, expected {}",
                    band.len(),
                    dim.saturating_sub(d)
                )));
            }
        }
        if bands[0].iter().any(|z| z.im != 0.0) {
            return Err(SpinOpsError::MalformedBands("diagonal has a nonzero imaginary part".into()));
        }
        while bands.len() > 1 && bands.last().is_some_and(|b| b.iter().all(|z| *z == Complex64::new(0.0, 0.0))) {
            bands.pop();
        }
        let real = bands.iter().flatten().all(|z| z.im == 0.0);
        Ok(Self { dim, bands, real })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored super-diagonals.
    pub fn bandwidth(&self) -> usize {
        self.bands.len() - 1
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    /// Super-diagonal `d` (`d = 0` is the main diagonal).
    pub fn band(&self, d: usize) -> &[Complex64] {
        &self.bands[d]
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let (lo, hi, conj) = if i <= j { (i, j, false) } else { (j, i, true) };
        let d = hi - lo;
        if d >= self.bands.len() {
            return Complex64::new(0.0, 0.0);
        }
        let z = self.bands[d][lo];
        if conj {
            z.conj()
        } else {
            z
        }
    }

    /// `out = self * v`.
    pub fn matvec_into(&self, v: &[Complex64], out: &mut [Complex64]) {
        assert_eq!(v.len(), self.dim);
        assert_eq!(out.len(), self.dim);
        for (o, (d, x)) in out.iter_mut().zip(self.bands[0].iter().zip(v)) {
            *o = d.re * x;
        }
        for (d, band) in self.bands.iter().enumerate().skip(1) {
            for (i, &a) in band.iter().enumerate() {
                out[i] += a * v[i + d];
                out[i + d] += a.conj() * v[i];
            }
        }
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        self.matvec_into(v, &mut out);
        out
    }

    /// Real part of `v^H M v` (the imaginary part vanishes for Hermitian `M`).
    pub fn expectation(&self, v: &[Complex64]) -> f64 {
        let mv = self.apply(v);
        v.iter().zip(&mv).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// `self += alpha * other`.
    pub fn add_scaled(&mut self, alpha: f64, other: &BandedHermitian) {
        assert_eq!(self.dim, other.dim);
        if other.bands.len() > self.bands.len() {
            for d in self.bands.len()..other.bands.len() {
                self.bands.push(vec![Complex64::new(0.0, 0.0); self.dim - d]);
            }
        }
        for (mine, theirs) in self.bands.iter_mut().zip(&other.bands) {
            for (a, b) in mine.iter_mut().zip(theirs) {
                *a += alpha * b;
            }
        }
        while self.bands.len() > 1
            && self.bands.last().is_some_and(|b| b.iter().all(|z| *z == Complex64::new(0.0, 0.0)))
        {
            self.bands.pop();
        }
        self.real = self.bands.iter().flatten().all(|z| z.im == 0.0);
    }

    /// Entry `(i, j)` of the product `self * other`.
    pub fn product_entry(&self, other: &BandedHermitian, i: usize, j: usize) -> Complex64 {
        let reach = self.bandwidth();
        let lo = i.saturating_sub(reach);
        let hi = (i + reach).min(self.dim - 1);
        (lo..=hi).map(|k| self.get(i, k) * other.get(k, j)).sum()
    }

    /// Upper bound on the spectral norm (maximum absolute row sum).
    pub fn norm_bound(&self) -> f64 {
        (0..self.dim)
            .map(|i| {
                let lo = i.saturating_sub(self.bandwidth());
                let hi = (i + self.bandwidth()).min(self.dim - 1);
                (lo..=hi).map(|j| self.get(i, j).norm()).sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OperatorKind {
    Jx,
    Jy,
    Jz,
    Jx2,
    Jy2,
    Jz2,
    Identity,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 7] = [
        OperatorKind::Jx,
        OperatorKind::Jy,
        OperatorKind::Jz,
        OperatorKind::Jx2,
        OperatorKind::Jy2,
        OperatorKind::Jz2,
        OperatorKind::Identity,
    ];

    pub fn is_two_body(self) -> bool {
        matches!(self, OperatorKind::Jx2 | OperatorKind::Jy2 | OperatorKind::Jz2)
    }

    /// Energy scaling factor: `1` for single-particle terms, `1/N` for two-body terms.
    pub fn scaling(self, n: usize) -> f64 {
        if self.is_two_body() {
            1.0 / n as f64
        } else {
            1.0
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            OperatorKind::Jx => "Jx",
            OperatorKind::Jy => "Jy",
            OperatorKind::Jz => "Jz",
            OperatorKind::Jx2 => "Jx2",
            OperatorKind::Jy2 => "Jy2",
            OperatorKind::Jz2 => "Jz2",
            OperatorKind::Identity => "Identity",
        };
        f.write_str(s)
    }
}

impl FromStr for OperatorKind {
    type Err = SpinOpsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OperatorKind::ALL
            .into_iter()
            .find(|k| k.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| SpinOpsError::UnknownOperator(s.to_string()))
    }
}

/// `sqrt((N - i)(i + 1))`: the `(i, i+1)` entry of the Pauli-normalized `J_x`.
fn ladder(n: usize, i: usize) -> f64 {
    (((n - i) * (i + 1)) as f64).sqrt()
}

fn real_band(values: impl Iterator<Item = f64>) -> Vec<Complex64> {
    values.map(|x| Complex64::new(x, 0.0)).collect()
}

/// Matrix of a collective operator on `n` particles in the Dicke basis.
pub fn build_operator(kind: OperatorKind, n: usize) -> Result<BandedHermitian, SpinOpsError> {
    if n == 0 {
        return Err(SpinOpsError::InvalidParticleNumber(n));
    }
    let dim = n + 1;
    let k = |i: usize| 2.0 * i as f64 - n as f64;
    let bands = match kind {
        OperatorKind::Identity => return Ok(BandedHermitian::identity(dim)),
        OperatorKind::Jz => vec![real_band((0..dim).map(k))],
        OperatorKind::Jz2 => vec![real_band((0..dim).map(|i| k(i) * k(i)))],
        OperatorKind::Jx => vec![vec![Complex64::new(0.0, 0.0); dim], real_band((0..n).map(|i| ladder(n, i)))],
        OperatorKind::Jy => {
            vec![vec![Complex64::new(0.0, 0.0); dim], (0..n).map(|i| Complex64::new(0.0, ladder(n, i))).collect()]
        }
        OperatorKind::Jx2 | OperatorKind::Jy2 => {
            // (i, i) sums the two squared ladder entries touching row i; they
            // are integers, so form them exactly.
            let diag = (0..dim).map(|i| {
                let below = if i > 0 { (n - i + 1) * i } else { 0 };
                let above = if i < n { (n - i) * (i + 1) } else { 0 };
                (below + above) as f64
            });
            let sign = if kind == OperatorKind::Jx2 { 1.0 } else { -1.0 };
            vec![
                real_band(diag),
                vec![Complex64::new(0.0, 0.0); n],
                real_band((0..n.saturating_sub(1)).map(|i| sign * ladder(n, i) * ladder(n, i + 1))),
            ]
        }
    };
    BandedHermitian::from_bands(bands)
}

/// Three observable terms with coefficients; the Hamiltonian is
/// `sum_i lambda_i f_i(N) H_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec {
    pub terms: [OperatorKind; 3],
    pub lambda: [f64; 3],
    pub n: usize,
}

impl HamiltonianSpec {
    pub fn new(terms: [OperatorKind; 3], lambda: [f64; 3], n: usize) -> Result<Self, SpinOpsError> {
        if n == 0 {
            return Err(SpinOpsError::InvalidParticleNumber(n));
        }
        Ok(Self { terms, lambda, n })
    }

    pub fn scaling(&self, term: usize) -> f64 {
        self.terms[term].scaling(self.n)
    }
}

pub fn assemble_hamiltonian(spec: &HamiltonianSpec) -> Result<BandedHermitian, SpinOpsError> {
    if spec.n == 0 {
        return Err(SpinOpsError::InvalidParticleNumber(spec.n));
    }
    let mut h = BandedHermitian::zeros(spec.n + 1);
    for (i, (&kind, &coef)) in spec.terms.iter().zip(&spec.lambda).enumerate() {
        if coef == 0.0 {
            continue;
        }
        let op = build_operator(kind, spec.n)?;
        h.add_scaled(coef * spec.scaling(i), &op);
    }
    Ok(h)
}

/// The two Hamiltonian families studied here.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// `(J/N) Jx^2 + Bz Jz + Bx Jx`, lambda = (J, Bz, Bx).
    Ising,
    /// `(J1 Jx^2 + J2 Jy^2)/N + Bz Jz`, lambda = (J1, J2, Bz).
    Xy,
}

impl Model {
    pub const ALL: [Model; 2] = [Model::Ising, Model::Xy];

    pub fn terms(self) -> [OperatorKind; 3] {
        match self {
            Model::Ising => [OperatorKind::Jx2, OperatorKind::Jz, OperatorKind::Jx],
            Model::Xy => [OperatorKind::Jx2, OperatorKind::Jy2, OperatorKind::Jz],
        }
    }

    /// Physical names of (lambda0, lambda1, lambda2).
    pub fn parameter_names(self) -> [&'static str; 3] {
        match self {
            Model::Ising => ["J", "Bz", "Bx"],
            Model::Xy => ["J1", "J2", "Bz"],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Model::Ising => "ising",
            Model::Xy => "xy",
        }
    }

    pub fn spec(self, lambda: [f64; 3], n: usize) -> Result<HamiltonianSpec, SpinOpsError> {
        HamiltonianSpec::new(self.terms(), lambda, n)
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = SpinOpsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        model_preset(s)
    }
}

pub fn model_preset(name: &str) -> Result<Model, SpinOpsError> {
    Model::ALL.into_iter().find(|m| m.name().eq_ignore_ascii_case(name.trim())).ok_or_else(|| {
        SpinOpsError::UnknownPreset { name: name.to_string(), valid: Model::ALL.map(Model::name).join(", ") }
    })
}
