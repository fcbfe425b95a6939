//! Direct eigensolver for banded Hermitian matrices.
//!
//! The band is reduced to Hermitian tridiagonal form with Givens rotations
//! and bulge chasing (O(n^2 b) work), the off-diagonal phases are absorbed
//! into a diagonal unitary, eigenvalues of the real tridiagonal matrix come
//! from Sturm-sequence bisection and eigenvectors from inverse iteration.
//! Eigenvectors of the original matrix are recovered by replaying the stored
//! rotations backwards.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::spinops::BandedHermitian;

pub(crate) trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self> + AddAssign + Send + Sync
{
    fn zero() -> Self;
    fn from_re(x: f64) -> Self;
    fn conj(self) -> Self;
    fn abs(self) -> f64;
    fn scale(self, x: f64) -> Self;
    fn from_complex(z: Complex64) -> Self;
    fn to_complex(self) -> Complex64;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_re(x: f64) -> Self {
        x
    }
    fn conj(self) -> Self {
        self
    }
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    fn scale(self, x: f64) -> Self {
        self * x
    }
    fn from_complex(z: Complex64) -> Self {
        z.re
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn from_re(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn abs(self) -> f64 {
        self.norm()
    }
    fn scale(self, x: f64) -> Self {
        self * x
    }
    fn from_complex(z: Complex64) -> Self {
        z
    }
    fn to_complex(self) -> Complex64 {
        self
    }
}

/// Square matrix holding entries with `|i - j| <= width`.
struct BandWork<S> {
    n: usize,
    width: usize,
    stride: usize,
    data: Vec<S>,
}

impl<S: Scalar> BandWork<S> {
    fn from_banded(h: &BandedHermitian, width: usize) -> Self {
        let n = h.dim();
        let stride = 2 * width + 1;
        let mut work = Self { n, width, stride, data: vec![S::zero(); n * stride] };
        for d in 0..=h.bandwidth() {
            for (i, &z) in h.band(d).iter().enumerate() {
                let z = S::from_complex(z);
                work.set(i, i + d, z);
                work.set(i + d, i, z.conj());
            }
        }
        work
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.stride + (j + self.width - i)
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> S {
        if i.abs_diff(j) > self.width {
            S::zero()
        } else {
            self.data[self.idx(i, j)]
        }
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, z: S) {
        let k = self.idx(i, j);
        self.data[k] = z;
    }

    /// Similarity transform `A <- G A G^H` with `G` acting on indices `(p, p+1)`
    /// as `[[c, s], [-conj(s), c]]`.
    fn rotate(&mut self, p: usize, c: f64, s: S) {
        let q = p + 1;
        let lo = q.saturating_sub(self.width);
        let hi = (p + self.width).min(self.n - 1);
        for j in lo..=hi {
            let a = self.get(p, j);
            let b = self.get(q, j);
            self.set(p, j, a.scale(c) + s * b);
            self.set(q, j, -(s.conj() * a) + b.scale(c));
        }
        for i in lo..=hi {
            let a = self.get(i, p);
            let b = self.get(i, q);
            self.set(i, p, a.scale(c) + b * s.conj());
            self.set(i, q, -(a * s) + b.scale(c));
        }
    }
}

/// Rotation zeroing `y` against `x`: returns `(c, s)`.
fn givens<S: Scalar>(x: S, y: S) -> Option<(f64, S)> {
    let ax = x.abs();
    let ay = y.abs();
    if ay == 0.0 {
        return None;
    }
    if ax == 0.0 {
        return Some((0.0, S::from_re(1.0)));
    }
    let rho = ax.hypot(ay);
    Some((ax / rho, (x * y.conj()).scale(1.0 / (ax * rho))))
}

/// Real symmetric tridiagonal matrix plus the unitary that maps it back.
pub(crate) struct Tridiagonalized<S> {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
    phases: Vec<S>,
    rotations: Vec<(usize, f64, S)>,
}

impl<S: Scalar> Tridiagonalized<S> {
    pub fn reduce(h: &BandedHermitian) -> Self {
        let n = h.dim();
        let b = h.bandwidth();
        let mut work = BandWork::<S>::from_banded(h, b + 1);
        let mut rotations = Vec::new();
        if b >= 2 {
            for j in 0..n.saturating_sub(2) {
                let last = (j + b).min(n - 1);
                for r in (j + 2..=last).rev() {
                    let mut p = r - 1;
                    let mut col = j;
                    loop {
                        if let Some((c, s)) = givens(work.get(p, col), work.get(p + 1, col)) {
                            work.rotate(p, c, s);
                            rotations.push((p, c, s));
                        }
                        let bulge_row = p + 1 + b;
                        if bulge_row >= n {
                            break;
                        }
                        col = p;
                        p = bulge_row - 1;
                    }
                }
            }
        }
        let diag: Vec<f64> = (0..n).map(|i| work.get(i, i).to_complex().re).collect();
        let sub: Vec<S> = (0..n.saturating_sub(1)).map(|i| work.get(i + 1, i)).collect();
        let mut phases = Vec::with_capacity(n);
        let mut offdiag = Vec::with_capacity(sub.len());
        let mut phase = S::from_re(1.0);
        phases.push(phase);
        for &e in &sub {
            let a = e.abs();
            if a > 0.0 {
                phase = phase * e.scale(1.0 / a);
            }
            offdiag.push(a);
            phases.push(phase);
        }
        Self { diag, offdiag, phases, rotations }
    }

    /// Maps an eigenvector of the real tridiagonal matrix back to the original basis.
    pub fn back_transform(&self, y: &[f64]) -> Vec<S> {
        let mut v: Vec<S> = y.iter().zip(&self.phases).map(|(&x, &d)| d.scale(x)).collect();
        for &(p, c, s) in self.rotations.iter().rev() {
            let a = v[p];
            let b = v[p + 1];
            v[p] = a.scale(c) - s * b;
            v[p + 1] = s.conj() * a + b.scale(c);
        }
        v
    }
}

/// Real symmetric tridiagonal matrix with diagonal `d` and off-diagonal `e`.
pub(crate) struct Tridiagonal<'a> {
    d: &'a [f64],
    e: &'a [f64],
}

/// A maximal unreduced diagonal block `[start, end)`.
#[derive(Clone, Copy, Debug)]
struct Block {
    start: usize,
    end: usize,
}

impl<'a> Tridiagonal<'a> {
    pub fn new(d: &'a [f64], e: &'a [f64]) -> Self {
        Self { d, e }
    }

    fn norm(&self) -> f64 {
        let n = self.d.len();
        (0..n)
            .map(|i| {
                let left = if i > 0 { self.e[i - 1] } else { 0.0 };
                let right = if i + 1 < n { self.e[i] } else { 0.0 };
                self.d[i].abs() + left + right
            })
            .fold(0.0, f64::max)
    }

    fn blocks(&self, norm: f64) -> Vec<Block> {
        let n = self.d.len();
        let tiny = f64::EPSILON * norm;
        let mut blocks = Vec::new();
        let mut start = 0;
        for i in 0..n.saturating_sub(1) {
            if self.e[i] <= tiny {
                blocks.push(Block { start, end: i + 1 });
                start = i + 1;
            }
        }
        if n > 0 {
            blocks.push(Block { start, end: n });
        }
        blocks
    }

    /// Number of eigenvalues of the block strictly below `x`.
    fn count_below(&self, block: Block, x: f64, pivmin: f64) -> usize {
        let mut count = 0;
        let mut q = self.d[block.start] - x;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
        for i in block.start + 1..block.end {
            let e = self.e[i - 1];
            q = self.d[i] - x - e * e / q;
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self, block: Block) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in block.start..block.end {
            let left = if i > block.start { self.e[i - 1] } else { 0.0 };
            let right = if i + 1 < block.end { self.e[i] } else { 0.0 };
            lo = lo.min(self.d[i] - left - right);
            hi = hi.max(self.d[i] + left + right);
        }
        (lo, hi)
    }

    /// The `index`-th smallest eigenvalue of the block (0-based) by bisection.
    fn bisect(&self, block: Block, index: usize, pivmin: f64) -> f64 {
        let (mut lo, mut hi) = self.gershgorin(block);
        let pad = 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) + pivmin;
        lo -= pad;
        hi += pad;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) + pivmin {
                break;
            }
            if self.count_below(block, mid, pivmin) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Solves `(T_block - shift) x = rhs` in place by Gaussian elimination
    /// with partial pivoting; zero pivots are replaced by `pivmin`.
    fn shifted_solve(&self, block: Block, shift: f64, rhs: &mut [f64], pivmin: f64) {
        let m = block.end - block.start;
        if m == 1 {
            let mut p = self.d[block.start] - shift;
            if p.abs() < pivmin {
                p = pivmin;
            }
            rhs[0] /= p;
            return;
        }
        // Rows of U carry up to two super-diagonals after pivoting.
        let mut u0 = vec![0.0; m];
        let mut u1 = vec![0.0; m];
        let mut u2 = vec![0.0; m];
        let mut mult = vec![0.0; m];
        let mut swapped = vec![false; m];
        let d = &self.d[block.start..block.end];
        let e = &self.e[block.start..block.end - 1];
        // current row i: (a, b, c) at columns i, i+1, i+2
        let mut a = d[0] - shift;
        let mut b = e[0];
        let mut c = 0.0;
        for i in 0..m - 1 {
            let lower = e[i];
            let next_diag = d[i + 1] - shift;
            let next_super = if i + 1 < m - 1 { e[i + 1] } else { 0.0 };
            if lower.abs() > a.abs() {
                // swap rows i and i+1
                swapped[i] = true;
                let factor = a / lower;
                mult[i] = factor;
                u0[i] = lower;
                u1[i] = next_diag;
                u2[i] = next_super;
                a = b - factor * next_diag;
                b = c - factor * next_super;
                c = 0.0;
            } else {
                let pivot = if a.abs() < pivmin { pivmin.copysign(if a == 0.0 { 1.0 } else { a }) } else { a };
                let factor = lower / pivot;
                mult[i] = factor;
                u0[i] = pivot;
                u1[i] = b;
                u2[i] = c;
                a = next_diag - factor * b;
                b = next_super - factor * c;
                c = 0.0;
            }
        }
        u0[m - 1] = if a.abs() < pivmin { pivmin.copysign(if a == 0.0 { 1.0 } else { a }) } else { a };
        // forward substitution with the recorded row swaps
        for i in 0..m - 1 {
            if swapped[i] {
                rhs.swap(i, i + 1);
            }
            rhs[i + 1] -= mult[i] * rhs[i];
        }
        // back substitution
        for i in (0..m).rev() {
            let mut x = rhs[i];
            if i + 1 < m {
                x -= u1[i] * rhs[i + 1];
            }
            if i + 2 < m {
                x -= u2[i] * rhs[i + 2];
            }
            rhs[i] = x / u0[i];
        }
    }

    /// Lowest `count` eigenvalues overall, with the block that owns each.
    fn lowest(&self, count: usize, norm: f64, pivmin: f64) -> Vec<(f64, Block)> {
        let mut all = Vec::new();
        for block in self.blocks(norm) {
            let size = block.end - block.start;
            if size == 1 {
                all.push((self.d[block.start], block));
                continue;
            }
            for k in 0..size.min(count) {
                all.push((self.bisect(block, k, pivmin), block));
            }
        }
        all.sort_by(|a, b| a.0.total_cmp(&b.0));
        all.truncate(count);
        all
    }

    /// All eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let norm = self.norm();
        let pivmin = pivmin(norm);
        self.lowest(self.d.len(), norm, pivmin).into_iter().map(|(x, _)| x).collect()
    }

    /// Lowest `count` eigenpairs; vectors are orthonormal and zero outside
    /// the unreduced block that owns them.
    pub fn lowest_pairs(&self, count: usize) -> Vec<(f64, Vec<f64>)> {
        let n = self.d.len();
        let norm = self.norm();
        let pivmin = pivmin(norm);
        let selected = self.lowest(count, norm, pivmin);
        let cluster_gap = 1e-3 * norm;
        let mut out: Vec<(f64, Vec<f64>, Block)> = Vec::with_capacity(selected.len());
        let mut seed: u64 = 0x9E37_79B9_7F4A_7C15;
        for (lambda, block) in selected {
            let m = block.end - block.start;
            // earlier vectors of the same block close in energy
            let cluster: Vec<usize> = out
                .iter()
                .enumerate()
                .filter(|(_, (mu, _, b))| b.start == block.start && (lambda - mu).abs() <= cluster_gap)
                .map(|(k, _)| k)
                .collect();
            let mut x: Vec<f64> = (0..m)
                .map(|_| {
                    seed ^= seed << 13;
                    seed ^= seed >> 7;
                    seed ^= seed << 17;
                    (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
                })
                .collect();
            normalize(&mut x);
            let growth_target = 1.0 / (10.0 * (m as f64).sqrt() * f64::EPSILON * norm.max(pivmin));
            let mut extra = 1;
            for _ in 0..8 {
                self.shifted_solve(block, lambda, &mut x, pivmin);
                for &k in &cluster {
                    let prev = &out[k].1[block.start..block.end];
                    let dot: f64 = prev.iter().zip(&x).map(|(a, b)| a * b).sum();
                    for (xi, pi) in x.iter_mut().zip(prev) {
                        *xi -= dot * pi;
                    }
                }
                let growth = normalize(&mut x);
                if growth >= growth_target {
                    if extra == 0 {
                        break;
                    }
                    extra -= 1;
                }
            }
            let mut full = vec![0.0; n];
            full[block.start..block.end].copy_from_slice(&x);
            out.push((lambda, full, block));
        }
        out.into_iter().map(|(l, v, _)| (l, v)).collect()
    }
}

fn pivmin(norm: f64) -> f64 {
    (f64::MIN_POSITIVE * 1e4).max(f64::EPSILON * f64::EPSILON * norm * norm)
}

fn normalize(x: &mut [f64]) -> f64 {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        for v in x.iter_mut() {
            *v /= norm;
        }
    }
    norm
}

/// Lowest `m` eigenpairs of a banded Hermitian matrix.
pub(crate) fn banded_lowest(h: &BandedHermitian, m: usize) -> (Vec<f64>, Vec<Vec<Complex64>>) {
    fn run<S: Scalar>(h: &BandedHermitian, m: usize) -> (Vec<f64>, Vec<Vec<Complex64>>) {
        let tri = Tridiagonalized::<S>::reduce(h);
        let pairs = Tridiagonal::new(&tri.diag, &tri.offdiag).lowest_pairs(m);
        let energies = pairs.iter().map(|(e, _)| *e).collect();
        let vectors =
            pairs.iter().map(|(_, y)| tri.back_transform(y).into_iter().map(Scalar::to_complex).collect()).collect();
        (energies, vectors)
    }
    if h.is_real() {
        run::<f64>(h, m)
    } else {
        run::<Complex64>(h, m)
    }
}

/// All eigenvalues of a banded Hermitian matrix, ascending.
pub(crate) fn banded_eigenvalues(h: &BandedHermitian) -> Vec<f64> {
    fn run<S: Scalar>(h: &BandedHermitian) -> Vec<f64> {
        let tri = Tridiagonalized::<S>::reduce(h);
        Tridiagonal::new(&tri.diag, &tri.offdiag).eigenvalues()
    }
    if h.is_real() {
        run::<f64>(h)
    } else {
        run::<Complex64>(h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spinops::{assemble_hamiltonian, HamiltonianSpec, OperatorKind};
    use nalgebra::{DMatrix, SymmetricEigen};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_banded(rng: &mut ChaCha8Rng, n: usize, b: usize, complex: bool) -> BandedHermitian {
        let mut bands = vec![(0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0)).collect::<Vec<_>>()];
        for d in 1..=b.min(n - 1) {
            bands.push(
                (0..n - d)
                    .map(|_| {
                        let im = if complex { rng.gen_range(-1.0..1.0) } else { 0.0 };
                        Complex64::new(rng.gen_range(-1.0..1.0), im)
                    })
                    .collect(),
            );
        }
        BandedHermitian::from_bands(bands).unwrap()
    }

    fn dense_eigenvalues(h: &BandedHermitian) -> Vec<f64> {
        let mut e: Vec<f64> = SymmetricEigen::new(h.to_dense()).eigenvalues.iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }

    #[test]
    fn reduction_preserves_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &(n, b, complex) in
            &[(1, 0, false), (2, 1, true), (5, 2, false), (30, 2, true), (41, 3, false), (60, 5, true)]
        {
            let h = random_banded(&mut rng, n, b, complex);
            let got = banded_eigenvalues(&h);
            let want = dense_eigenvalues(&h);
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() < 1e-12, "n={n} b={b}: {g} vs {w}");
            }
        }
    }

    #[test]
    fn eigenvectors_have_small_residuals_and_are_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &(n, b, complex) in &[(3, 2, true), (50, 2, false), (80, 2, true)] {
            let h = random_banded(&mut rng, n, b, complex);
            let (energies, vectors) = banded_lowest(&h, 6.min(n));
            for (e, v) in energies.iter().zip(&vectors) {
                let hv = h.apply(v);
                let res: f64 = hv.iter().zip(v).map(|(a, b)| (a - b * e).norm_sqr()).sum::<f64>().sqrt();
                assert!(res < 1e-12, "residual {res}");
            }
            for (i, a) in vectors.iter().enumerate() {
                for (j, b) in vectors.iter().enumerate() {
                    let dot: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((dot - want).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn exact_degeneracy_across_decoupled_blocks() {
        // -(1/N) Jx^2 couples only same-parity basis states; the k = +-N pair
        // of Jx is exactly degenerate.
        let spec = HamiltonianSpec::new([OperatorKind::Jx2, OperatorKind::Jz, OperatorKind::Jx], [-1.0, 0.0, 0.0], 10)
            .unwrap();
        let h = assemble_hamiltonian(&spec).unwrap();
        let (energies, vectors) = banded_lowest(&h, 3);
        assert!((energies[0] + 10.0).abs() < 1e-12);
        assert!((energies[1] + 10.0).abs() < 1e-12);
        let dot: Complex64 = vectors[0].iter().zip(&vectors[1]).map(|(x, y)| x.conj() * y).sum();
        assert!(dot.norm() < 1e-12);
    }

    #[test]
    fn diagonal_and_tiny_inputs() {
        let h = BandedHermitian::from_bands(vec![vec![
            Complex64::new(2.0, 0.0),
            Complex64::new(-2.0, 0.0),
            Complex64::new(0.0, 0.0),
        ]])
        .unwrap();
        assert_eq!(banded_eigenvalues(&h), vec![-2.0, 0.0, 2.0]);
        let z = BandedHermitian::zeros(4);
        let (e, v) = banded_lowest(&z, 3);
        assert_eq!(e, vec![0.0; 3]);
        assert_eq!(v.len(), 3);
    }

    #[test]
    fn dense_reference_matches_on_clustered_spectrum() {
        // Near-degenerate ground doublet (tunnelling splitting ~1e-7).
        let spec = HamiltonianSpec::new([OperatorKind::Jx2, OperatorKind::Jz, OperatorKind::Jx], [-1.0, 1.0, 0.0], 40)
            .unwrap();
        let h = assemble_hamiltonian(&spec).unwrap();
        let (e, v) = banded_lowest(&h, 4);
        let dense = DMatrix::from_fn(41, 41, |i, j| h.get(i, j).re);
        let mut want: Vec<f64> = SymmetricEigen::new(dense).eigenvalues.iter().copied().collect();
        want.sort_by(f64::total_cmp);
        for (a, b) in e.iter().zip(&want) {
            assert!((a - b).abs() < 1e-11);
        }
        for (x, vec) in e.iter().zip(&v) {
            let hv = h.apply(vec);
            let res: f64 = hv.iter().zip(vec).map(|(a, b)| (a - b * x).norm_sqr()).sum::<f64>().sqrt();
            assert!(res < 1e-11);
        }
    }
}
