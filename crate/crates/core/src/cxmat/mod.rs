//! Complex matrices and the real inner product structure on them.
//!
//! `C^{n x t}` carries the Hermitian inner product `<A, B> = Tr(A B*)`; its
//! real part `q(A, B) = Re <A, B>` turns the space into `R^{2nt}` with the
//! standard Euclidean form, which is the geometry every distance computation
//! in this crate lives in. The module provides dense matrices, that pairing,
//! deterministic SVD factorizations, Haar-random unitaries, and the
//! skew-Hermitian bases used to generate unitary orbit tangents.

mod json;
mod svd;

pub use svd::{random_unitary, svd, SvdFactors};
pub(crate) use svd::svd_for_real;

use num_complex::Complex;

/// Double-precision complex scalar used throughout the crate.
pub type C64 = Complex<f64>;

/// Errors from matrix construction and decompositions.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CxmatError {
    /// Two operands had incompatible shapes.
    #[error("shape mismatch: {lhs_rows}x{lhs_cols} vs {rhs_rows}x{rhs_cols}")]
    ShapeMismatch {
        lhs_rows: usize,
        lhs_cols: usize,
        rhs_rows: usize,
        rhs_cols: usize,
    },
    /// A square matrix was required.
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    /// An entry was NaN or infinite.
    #[error("non-finite entry at ({row},{col})")]
    NonFinite { row: usize, col: usize },
    /// Jacobi sweeps did not reach the off-diagonal target.
    #[error("SVD did not converge within {sweeps} sweeps")]
    ConvergenceFailure { sweeps: usize },
    /// A dimension exceeded the supported range.
    #[error("dimension {dim} outside supported range 1..={max}")]
    DimensionRange { dim: usize, max: usize },
}

/// Largest matrix side length the dense kernels are tuned for.
pub const MAX_DIM: usize = 64;

/// Dense complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMat {
    /// Builds a matrix from row-major entries, rejecting non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self, CxmatError> {
        assert_eq!(data.len(), rows * cols, "entry count must equal rows*cols");
        for (k, z) in data.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(CxmatError::NonFinite {
                    row: k / cols.max(1),
                    col: k % cols.max(1),
                });
            }
        }
        Ok(CMat { rows, cols, data })
    }

    /// All-zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    /// Identity matrix of side `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Builds entries from a closure over `(row, col)`.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMat { rows, cols, data }
    }

    /// Square diagonal matrix with real entries.
    pub fn diag(entries: &[f64]) -> Self {
        let n = entries.len();
        CMat::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(entries[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// Square diagonal matrix with complex entries.
    pub fn diag_complex(entries: &[C64]) -> Self {
        let n = entries.len();
        CMat::from_fn(
            n,
            n,
            |i, j| {
                if i == j {
                    entries[i]
                } else {
                    C64::new(0.0, 0.0)
                }
            },
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.data[i * self.cols + j] = value;
    }

    /// Row-major entry slice.
    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    /// `self + rhs`.
    pub fn add(&self, rhs: &CMat) -> Result<CMat, CxmatError> {
        self.check_same_shape(rhs)?;
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(CMat {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// `self - rhs`.
    pub fn sub(&self, rhs: &CMat) -> Result<CMat, CxmatError> {
        self.check_same_shape(rhs)?;
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(CMat {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// `c * self` for a complex scalar.
    pub fn scale(&self, c: C64) -> CMat {
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    /// Matrix product `self * rhs`.
    pub fn matmul(&self, rhs: &CMat) -> Result<CMat, CxmatError> {
        if self.cols != rhs.rows {
            return Err(CxmatError::ShapeMismatch {
                lhs_rows: self.rows,
                lhs_cols: self.cols,
                rhs_rows: rhs.rows,
                rhs_cols: rhs.cols,
            });
        }
        let mut out = CMat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose `A*`.
    pub fn adjoint(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    /// Transpose without conjugation.
    pub fn transpose(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Entrywise conjugate.
    pub fn conj(&self) -> CMat {
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    /// Frobenius norm.
    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Defect `|self*self^* - I|_F` measuring how far rows are from
    /// orthonormal; for square matrices this is the unitarity defect.
    pub fn unitarity_defect(&self) -> f64 {
        let gram = self.matmul(&self.adjoint()).expect("shapes agree");
        let mut sum = 0.0;
        for i in 0..gram.rows {
            for j in 0..gram.cols {
                let target = if i == j { 1.0 } else { 0.0 };
                let d = gram.get(i, j) - C64::new(target, 0.0);
                sum += d.norm_sqr();
            }
        }
        sum.sqrt()
    }

    /// Flattens to interleaved real coordinates
    /// `[Re a_00, Im a_00, Re a_01, ...]` of length `2 rows cols`.
    pub fn real_coords(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * self.data.len());
        for z in &self.data {
            out.push(z.re);
            out.push(z.im);
        }
        out
    }

    /// Inverse of [`CMat::real_coords`].
    pub fn from_real_coords(rows: usize, cols: usize, coords: &[f64]) -> Self {
        assert_eq!(coords.len(), 2 * rows * cols);
        let data = coords
            .chunks_exact(2)
            .map(|c| C64::new(c[0], c[1]))
            .collect();
        CMat { rows, cols, data }
    }

    fn check_same_shape(&self, rhs: &CMat) -> Result<(), CxmatError> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(CxmatError::ShapeMismatch {
                lhs_rows: self.rows,
                lhs_cols: self.cols,
                rhs_rows: rhs.rows,
                rhs_cols: rhs.cols,
            });
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

/// Real diagonal rectangular matrix `diag(d)` in `R^{rows x cols}`; the
/// embedding of a slice point into matrix space.
#[derive(Debug, Clone, PartialEq)]
pub struct RealDiag {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<f64>,
}

impl RealDiag {
    /// Builds the diagonal; `entries.len()` must equal `min(rows, cols)`.
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Self {
        assert_eq!(entries.len(), rows.min(cols), "diagonal length mismatch");
        RealDiag {
            rows,
            cols,
            entries,
        }
    }

    /// Embeds as a dense complex matrix.
    pub fn to_cmat(&self) -> CMat {
        let mut m = CMat::zeros(self.rows, self.cols);
        for (i, &d) in self.entries.iter().enumerate() {
            m.set(i, i, C64::new(d, 0.0));
        }
        m
    }
}

/// Hermitian inner product `<A, B> = Tr(A B*)`.
///
/// Conjugate-linear in `B`: `<A, B> = conj(<B, A>)`, and `<A, A> = |A|_F^2`.
pub fn hermitian_inner(a: &CMat, b: &CMat) -> Result<C64, CxmatError> {
    a.check_same_shape(b)?;
    let mut acc = C64::new(0.0, 0.0);
    for (x, y) in a.data.iter().zip(&b.data) {
        acc += x * y.conj();
    }
    Ok(acc)
}

/// Real inner product `q(A, B) = Re Tr(A B*)`, the Euclidean form on the
/// realification `R^{2nt}`.
pub fn q_inner(a: &CMat, b: &CMat) -> Result<f64, CxmatError> {
    Ok(hermitian_inner(a, b)?.re)
}

/// Splits a square matrix as `A = H + K` with `H` Hermitian and `K`
/// skew-Hermitian.
///
/// `H` and `K` satisfy their symmetry exactly (entries are mirrored, not
/// recomputed); `H + K` recovers `A` to machine precision, exactly when the
/// paired entries share a binade. The two parts are `q`-orthogonal.
pub fn herm_skew_split(a: &CMat) -> Result<(CMat, CMat), CxmatError> {
    if a.rows != a.cols {
        return Err(CxmatError::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    let n = a.rows;
    let mut h = CMat::zeros(n, n);
    let mut k = CMat::zeros(n, n);
    for i in 0..n {
        let aii = a.get(i, i);
        h.set(i, i, C64::new(aii.re, 0.0));
        k.set(i, i, C64::new(0.0, aii.im));
        for j in (i + 1)..n {
            let upper = a.get(i, j);
            let lower = a.get(j, i);
            let hij = (upper + lower.conj()) * 0.5;
            let kij = (upper - lower.conj()) * 0.5;
            h.set(i, j, hij);
            h.set(j, i, hij.conj());
            k.set(i, j, kij);
            k.set(j, i, -kij.conj());
        }
    }
    Ok((h, k))
}

/// `q`-orthogonal basis of the skew-Hermitian matrices in `C^{n x n}`.
///
/// Returns `n^2` matrices: the purely imaginary diagonal units `i E_kk`,
/// then for each pair `k < l` the real rotation `E_kl - E_lk` and the
/// imaginary reflection `i (E_kl + E_lk)`. These generate the tangent space
/// `{Z : Z* = -Z}` of the unitary group at the identity.
pub fn skew_basis(n: usize) -> Vec<CMat> {
    let mut basis = Vec::with_capacity(n * n);
    for k in 0..n {
        let mut m = CMat::zeros(n, n);
        m.set(k, k, C64::new(0.0, 1.0));
        basis.push(m);
    }
    for k in 0..n {
        for l in (k + 1)..n {
            let mut re = CMat::zeros(n, n);
            re.set(k, l, C64::new(1.0, 0.0));
            re.set(l, k, C64::new(-1.0, 0.0));
            basis.push(re);
            let mut im = CMat::zeros(n, n);
            im.set(k, l, C64::new(0.0, 1.0));
            im.set(l, k, C64::new(0.0, 1.0));
            basis.push(im);
        }
    }
    basis
}

/// True when `|A - A*|` is at most `tol` entrywise.
pub fn is_hermitian_within(a: &CMat, tol: f64) -> bool {
    if a.rows != a.cols {
        return false;
    }
    for i in 0..a.rows {
        for j in 0..a.cols {
            let d = a.get(i, j) - a.get(j, i).conj();
            if d.norm() > tol {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rmat;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_cmat(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMat {
        CMat::from_fn(rows, cols, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    #[test]
    fn inner_product_examples() {
        let id = CMat::identity(2);
        let got = hermitian_inner(&id, &id).unwrap();
        assert_eq!(got, C64::new(2.0, 0.0));

        // <A, B> = Tr(A B*) with A = [[i, 0], [0, 0]], B = [[1, 1], [0, 0]].
        let mut a = CMat::zeros(2, 2);
        a.set(0, 0, C64::new(0.0, 1.0));
        let mut b = CMat::zeros(2, 2);
        b.set(0, 0, C64::new(1.0, 0.0));
        b.set(0, 1, C64::new(1.0, 0.0));
        assert_eq!(hermitian_inner(&a, &b).unwrap(), C64::new(0.0, 1.0));
    }

    #[test]
    fn inner_product_shape_mismatch() {
        let a = CMat::zeros(2, 3);
        let b = CMat::zeros(3, 2);
        assert!(matches!(
            hermitian_inner(&a, &b),
            Err(CxmatError::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn non_finite_rejected() {
        let data = vec![
            C64::new(1.0, 0.0),
            C64::new(f64::NAN, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
        ];
        assert!(matches!(
            CMat::new(2, 2, data),
            Err(CxmatError::NonFinite { row: 0, col: 1 })
        ));
    }

    #[test]
    fn herm_skew_split_hermitian_input() {
        let mut a = CMat::zeros(2, 2);
        a.set(0, 0, C64::new(2.0, 0.0));
        a.set(0, 1, C64::new(1.0, 3.0));
        a.set(1, 0, C64::new(1.0, -3.0));
        a.set(1, 1, C64::new(-1.0, 0.0));
        let (h, k) = herm_skew_split(&a).unwrap();
        assert_eq!(h, a);
        assert_eq!(k.frob_norm(), 0.0);
    }

    #[test]
    fn herm_skew_split_rotation_input() {
        let mut a = CMat::zeros(2, 2);
        a.set(0, 1, C64::new(1.0, 0.0));
        a.set(1, 0, C64::new(-1.0, 0.0));
        let (h, k) = herm_skew_split(&a).unwrap();
        assert_eq!(h.frob_norm(), 0.0);
        assert_eq!(k, a);
    }

    #[test]
    fn herm_skew_split_not_square() {
        let a = CMat::zeros(2, 3);
        assert!(matches!(
            herm_skew_split(&a),
            Err(CxmatError::NotSquare { .. })
        ));
    }

    #[test]
    fn skew_basis_count_orthogonality_and_rank() {
        for n in 1..=4 {
            let basis = skew_basis(n);
            assert_eq!(basis.len(), n * n);
            for (i, zi) in basis.iter().enumerate() {
                // Skew-Hermitian: Z* = -Z.
                assert_eq!(zi.adjoint(), zi.scale(C64::new(-1.0, 0.0)));
                for zj in basis.iter().skip(i + 1) {
                    assert_eq!(q_inner(zi, zj).unwrap(), 0.0);
                }
            }
        }
        // Stacked real coordinates of the n = 3 basis have full rank 9.
        let basis = skew_basis(3);
        let stacked: Vec<Vec<f64>> = basis.iter().map(|z| z.real_coords()).collect();
        assert_eq!(rmat::numerical_rank(&stacked, 1e-9), 9);
    }

    proptest! {
        // q(A, B) is symmetric and <A, B> = conj(<B, A>).
        #[test]
        fn prop_inner_conjugate_symmetry(seed in 0u64..512) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 1 + (seed as usize % 4);
            let t = 1 + ((seed as usize / 4) % 4);
            let a = random_cmat(&mut rng, n, t);
            let b = random_cmat(&mut rng, n, t);
            let ab = hermitian_inner(&a, &b).unwrap();
            let ba = hermitian_inner(&b, &a).unwrap();
            prop_assert!((ab - ba.conj()).norm() <= 1e-13 * (1.0 + a.frob_norm() * b.frob_norm()));
            prop_assert!((q_inner(&a, &b).unwrap() - q_inner(&b, &a).unwrap()).abs() <= 1e-13);
        }

        // herm_skew_split reconstructs A and the parts are q-orthogonal.
        #[test]
        fn prop_split_reconstructs(seed in 0u64..512) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 1 + (seed as usize % 5);
            let a = random_cmat(&mut rng, n, n);
            let (h, k) = herm_skew_split(&a).unwrap();
            let back = h.add(&k).unwrap();
            prop_assert!(back.sub(&a).unwrap().frob_norm() <= 1e-15 * (1.0 + a.frob_norm()));
            prop_assert!(q_inner(&h, &k).unwrap().abs() <= 1e-14 * (1.0 + a.frob_norm().powi(2)));
        }
    }

    // The numerical form of the skew-orthogonality lemma: a square matrix
    // whose q-pairing with every skew-Hermitian basis element is below
    // eps * |A|_F is Hermitian up to 2 n eps |A|_F.
    #[test]
    fn q_orthogonal_to_skew_forces_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..200 {
            let n = 2 + trial % 3;
            let a = random_cmat(&mut rng, n, n);
            let norm_a = a.frob_norm().max(1e-30);
            let basis = skew_basis(n);
            let eps = basis
                .iter()
                .map(|z| q_inner(&a, z).unwrap().abs() / z.frob_norm())
                .fold(0.0, f64::max)
                / norm_a;
            let defect = a.sub(&a.adjoint()).unwrap().frob_norm();
            assert!(
                defect <= 2.0 * (n as f64) * eps * norm_a + 1e-13 * norm_a,
                "defect {defect} vs bound with eps {eps}"
            );
        }
    }
}
