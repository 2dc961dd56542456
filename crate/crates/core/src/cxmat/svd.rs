//! Singular value decomposition by one-sided Jacobi rotations.
//!
//! Rotations act on rows of the working matrix and are chosen from 2x2
//! blocks of the Gram matrix `B B*`, so singular values come out with high
//! relative accuracy and both factors stay unitary to machine precision.
//! Factors are made deterministic by a fixed sweep order and a phase
//! convention on the right singular vectors, which keeps regression tests
//! byte-stable across runs and thread counts.

use super::{CMat, CxmatError, C64, MAX_DIM};
use crate::config::Tolerances;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use rand_distr::{Distribution, StandardNormal};

/// Full-factor SVD `A = U diag(sigma) V*` with `U` of side `rows`, `V` of
/// side `cols`, and `sigma` descending of length `min(rows, cols)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvdFactors {
    pub u: CMat,
    pub sigma: Vec<f64>,
    pub v: CMat,
}

impl SvdFactors {
    /// Rebuilds `U diag(sigma) V*`.
    pub fn reconstruct(&self) -> CMat {
        let n = self.u.rows();
        let t = self.v.rows();
        let mut mid = CMat::zeros(n, t);
        for (i, &s) in self.sigma.iter().enumerate() {
            mid.set(i, i, C64::new(s, 0.0));
        }
        self.u
            .matmul(&mid)
            .and_then(|m| m.matmul(&self.v.adjoint()))
            .expect("factor shapes agree")
    }

    /// `|U diag(sigma) V* - a|_F / max(1, |a|_F)`.
    pub fn reconstruction_residual(&self, a: &CMat) -> f64 {
        let diff = self
            .reconstruct()
            .sub(a)
            .expect("shape matches factored matrix");
        diff.frob_norm() / a.frob_norm().max(1.0)
    }

    /// Larger of the two factor unitarity defects.
    pub fn orthonormality_defect(&self) -> f64 {
        self.u.unitarity_defect().max(self.v.unitarity_defect())
    }

    /// Number of singular values above `rel * sigma_1`.
    pub fn rank(&self, rel: f64) -> usize {
        let floor = rel * self.sigma.first().copied().unwrap_or(0.0);
        self.sigma.iter().filter(|&&s| s > floor).count()
    }
}

/// Computes the full SVD of `a`.
///
/// Supports `1 <= rows, cols <= 64`. Singular values are descending and
/// nonnegative; factors satisfy the orthonormality and reconstruction
/// defects in [`Tolerances`]. The decomposition is deterministic: for each
/// singular triple the right singular vector is rotated so its
/// largest-modulus component is real positive (ties broken by lowest index).
pub fn svd(a: &CMat, tol: &Tolerances) -> Result<SvdFactors, CxmatError> {
    check_dims(a.rows(), a.cols())?;
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let z = a.get(i, j);
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(CxmatError::NonFinite { row: i, col: j });
            }
        }
    }
    let mut f = if a.rows() <= a.cols() {
        jacobi_rows(a, tol)?
    } else {
        let ft = jacobi_rows(&a.adjoint(), tol)?;
        SvdFactors {
            u: ft.v,
            sigma: ft.sigma,
            v: ft.u,
        }
    };
    fix_phases(&mut f);
    Ok(f)
}

/// Internal entry for stacked-coordinate rank work: same algorithm without
/// the public `MAX_DIM` gate, since generator stacks can exceed 64 rows.
pub(crate) fn svd_for_real(a: &CMat) -> Result<SvdFactors, CxmatError> {
    let tol = Tolerances::default();
    let mut f = if a.rows() <= a.cols() {
        jacobi_rows(a, &tol)?
    } else {
        let ft = jacobi_rows(&a.adjoint(), &tol)?;
        SvdFactors {
            u: ft.v,
            sigma: ft.sigma,
            v: ft.u,
        }
    };
    fix_phases(&mut f);
    Ok(f)
}

fn check_dims(rows: usize, cols: usize) -> Result<(), CxmatError> {
    for dim in [rows, cols] {
        if dim == 0 || dim > MAX_DIM {
            return Err(CxmatError::DimensionRange { dim, max: MAX_DIM });
        }
    }
    Ok(())
}

/// Core for `rows <= cols`: orthogonalizes the rows of `a` by unitary
/// rotations on the left, accumulating their inverse into `U`.
fn jacobi_rows(a: &CMat, tol: &Tolerances) -> Result<SvdFactors, CxmatError> {
    let n = a.rows();
    let t = a.cols();
    let mut b: Vec<Vec<C64>> = (0..n).map(|i| (0..t).map(|j| a.get(i, j)).collect()).collect();
    // Columns of U; starts as the identity.
    let mut u: Vec<Vec<C64>> = (0..n)
        .map(|p| {
            (0..n)
                .map(|i| C64::new(if i == p { 1.0 } else { 0.0 }, 0.0))
                .collect()
        })
        .collect();

    let mut converged = a.frob_norm() == 0.0;
    let mut sweeps_used = 0;
    while !converged && sweeps_used < tol.svd_max_sweeps {
        sweeps_used += 1;
        let mut changed = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = C64::new(0.0, 0.0);
                for k in 0..t {
                    app += b[p][k].norm_sqr();
                    aqq += b[q][k].norm_sqr();
                    apq += b[p][k] * b[q][k].conj();
                }
                // The skip threshold scales with the row length: the Gram
                // entry of two numerically orthogonal rows carries rounding
                // noise up to about t * eps * sqrt(app * aqq), and rotations
                // driven by that noise would never let a sweep settle.
                let gate = (app * aqq).sqrt();
                if gate == 0.0 || apq.norm() <= tol.svd_sweep * t as f64 * gate {
                    continue;
                }
                changed = true;
                // Remove the phase of the Gram entry, then a real rotation
                // zeroes it: with m = |apq|, tau = (aqq - app) / (2m), the
                // smaller root of t^2 - 2 tau t - 1 = 0 keeps the angle
                // below 45 degrees.
                let m = apq.norm();
                let phase = apq / m;
                let phase_conj = phase.conj();
                let tau = (aqq - app) / (2.0 * m);
                let disc = (tau * tau + 1.0).sqrt();
                // Smaller root of t^2 - 2 tau t - 1 in the cancellation-free
                // form: tau - sqrt(tau^2 + 1) rounds to zero for large tau,
                // which would freeze the sweep at a nonzero off-diagonal.
                let tn = if tau >= 0.0 {
                    -1.0 / (tau + disc)
                } else {
                    1.0 / (disc - tau)
                };
                let c = 1.0 / (tn * tn + 1.0).sqrt();
                let s = tn * c;
                for k in 0..t {
                    let bp = phase_conj * b[p][k];
                    let bq = b[q][k];
                    b[p][k] = c * bp + s * bq;
                    b[q][k] = -s * bp + c * bq;
                }
                for i in 0..n {
                    let up = u[p][i];
                    let uq = u[q][i];
                    u[p][i] = c * phase * up + s * uq;
                    u[q][i] = -s * phase * up + c * uq;
                }
            }
        }
        if !changed {
            converged = true;
        }
    }
    if !converged {
        return Err(CxmatError::ConvergenceFailure {
            sweeps: tol.svd_max_sweeps,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = b
        .iter()
        .map(|row| row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap().then(i.cmp(&j)));

    let sigma: Vec<f64> = order.iter().map(|&i| norms[i]).collect();
    let u_mat = CMat::from_fn(n, n, |i, j| u[order[j]][i]);

    let mut v_cols: Vec<Vec<C64>> = Vec::with_capacity(t);
    for (rank_pos, &i) in order.iter().enumerate() {
        if sigma[rank_pos] > 0.0 {
            let inv = 1.0 / sigma[rank_pos];
            v_cols.push(b[i].iter().map(|z| z.conj() * inv).collect());
        }
    }
    complete_orthonormal(&mut v_cols, t);
    let v_mat = CMat::from_fn(t, t, |i, j| v_cols[j][i]);

    Ok(SvdFactors {
        u: u_mat,
        sigma,
        v: v_mat,
    })
}

/// Extends a set of orthonormal columns in `C^dim` to a full basis using
/// standard basis vectors in index order with twice-applied Gram-Schmidt.
fn complete_orthonormal(cols: &mut Vec<Vec<C64>>, dim: usize) {
    let mut j = 0;
    while cols.len() < dim && j < dim {
        let mut v = vec![C64::new(0.0, 0.0); dim];
        v[j] = C64::new(1.0, 0.0);
        for _ in 0..2 {
            for c in cols.iter() {
                let coef: C64 = c.iter().zip(&v).map(|(ck, vk)| ck.conj() * vk).sum();
                for (vk, ck) in v.iter_mut().zip(c) {
                    *vk -= coef * ck;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.1 {
            for z in v.iter_mut() {
                *z /= norm;
            }
            cols.push(v);
        }
        j += 1;
    }
    assert_eq!(cols.len(), dim, "orthonormal completion ran out of candidates");
}

/// Rotates each singular pair so the largest-modulus component of the right
/// singular vector is real positive (first index wins ties).
fn fix_phases(f: &mut SvdFactors) {
    let pairs = f.sigma.len();
    let t = f.v.rows();
    let n = f.u.rows();
    for i in 0..pairs {
        let mut best = 0usize;
        let mut best_mod = -1.0;
        for k in 0..t {
            let m = f.v.get(k, i).norm();
            if m > best_mod {
                best_mod = m;
                best = k;
            }
        }
        if best_mod <= 0.0 {
            continue;
        }
        let pivot = f.v.get(best, i);
        let rot = pivot.conj() / pivot.norm();
        for k in 0..t {
            f.v.set(k, i, f.v.get(k, i) * rot);
        }
        for k in 0..n {
            f.u.set(k, i, f.u.get(k, i) * rot);
        }
        // Force the pivot exactly real so repeated factorizations of the
        // same matrix agree bitwise.
        let fixed = f.v.get(best, i);
        f.v.set(best, i, C64::new(fixed.norm(), 0.0));
    }
}

/// Draws a Haar-distributed `n x n` unitary deterministically from `seed`.
///
/// A complex Gaussian matrix is orthonormalized column by column with
/// twice-applied Gram-Schmidt; since the implied triangular factor has a
/// real positive diagonal, the result is exactly the phase-normalized QR
/// draw that gives Haar measure.
pub fn random_unitary(n: usize, seed: u64) -> Result<CMat, CxmatError> {
    check_dims(n, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    while cols.len() < n {
        let mut v: Vec<C64> = (0..n)
            .map(|_| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                C64::new(re * inv_sqrt2, im * inv_sqrt2)
            })
            .collect();
        for _ in 0..2 {
            for c in cols.iter() {
                let coef: C64 = c.iter().zip(&v).map(|(ck, vk)| ck.conj() * vk).sum();
                for (vk, ck) in v.iter_mut().zip(c) {
                    *vk -= coef * ck;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            // Degenerate draw; take a fresh sample.
            continue;
        }
        for z in v.iter_mut() {
            *z /= norm;
        }
        cols.push(v);
    }
    Ok(CMat::from_fn(n, n, |i, j| cols[j][i]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    fn random_cmat(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMat {
        CMat::from_fn(rows, cols, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    fn assert_factors_ok(a: &CMat, f: &SvdFactors) {
        let n = a.rows().min(a.cols());
        assert_eq!(f.sigma.len(), n);
        for w in f.sigma.windows(2) {
            assert!(w[0] >= w[1], "sigma not descending: {:?}", f.sigma);
        }
        for &s in &f.sigma {
            assert!(s >= 0.0);
        }
        let side = a.rows().max(a.cols()) as f64;
        assert!(
            f.orthonormality_defect() <= 1e-12 * side,
            "orthonormality defect {}",
            f.orthonormality_defect()
        );
        assert!(
            f.reconstruction_residual(a) <= 1e-12,
            "reconstruction residual {}",
            f.reconstruction_residual(a)
        );
    }

    #[test]
    fn real_diagonal_sorts_descending() {
        let a = CMat::diag(&[1.0, 2.0, 3.0]);
        let f = svd(&a, &tols()).unwrap();
        assert_eq!(f.sigma, vec![3.0, 2.0, 1.0]);
        assert_factors_ok(&a, &f);
        // Factors are signed permutations with nonnegative real entries
        // under the phase convention.
        for m in [&f.u, &f.v] {
            for j in 0..3 {
                let mut nonzero = 0;
                for i in 0..3 {
                    let z = m.get(i, j);
                    if z.norm() > 1e-14 {
                        nonzero += 1;
                        assert!((z - C64::new(1.0, 0.0)).norm() < 1e-14);
                    }
                }
                assert_eq!(nonzero, 1);
            }
        }
    }

    #[test]
    fn complex_diagonal_carries_phase_in_u() {
        // diag(i, 2, 3): the sigma = 1 triple keeps v real, so u absorbs i.
        let a = CMat::diag_complex(&[C64::new(0.0, 1.0), C64::new(2.0, 0.0), C64::new(3.0, 0.0)]);
        let f = svd(&a, &tols()).unwrap();
        assert_eq!(f.sigma, vec![3.0, 2.0, 1.0]);
        assert_factors_ok(&a, &f);
        assert!((f.v.get(0, 2) - C64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((f.u.get(0, 2) - C64::new(0.0, 1.0)).norm() < 1e-14);
        // Nearest-unitary frame product: U V* = diag(i, 1, 1).
        let uv = f.u.matmul(&f.v.adjoint()).unwrap();
        let expect =
            CMat::diag_complex(&[C64::new(0.0, 1.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0)]);
        assert!(uv.sub(&expect).unwrap().frob_norm() < 1e-13);
    }

    #[test]
    fn zero_matrix_factors() {
        let a = CMat::zeros(2, 5);
        let f = svd(&a, &tols()).unwrap();
        assert_eq!(f.sigma, vec![0.0, 0.0]);
        assert_factors_ok(&a, &f);
    }

    #[test]
    fn thousand_random_matrices_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for trial in 0..1000 {
            let rows = 1 + trial % 8;
            let cols = 1 + (trial / 8) % 8;
            let a = random_cmat(&mut rng, rows, cols);
            let f = svd(&a, &tols()).unwrap();
            assert_factors_ok(&a, &f);
        }
    }

    #[test]
    fn tall_matrices_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let a = random_cmat(&mut rng, 7, 3);
            let f = svd(&a, &tols()).unwrap();
            assert_eq!(f.u.rows(), 7);
            assert_eq!(f.v.rows(), 3);
            assert_factors_ok(&a, &f);
        }
    }

    #[test]
    fn rank_deficient_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let left = random_cmat(&mut rng, 5, 2);
            let right = random_cmat(&mut rng, 2, 7);
            let a = left.matmul(&right).unwrap();
            let f = svd(&a, &tols()).unwrap();
            assert_factors_ok(&a, &f);
            assert!(f.sigma[2] <= 1e-12 * f.sigma[0]);
            assert_eq!(f.rank(1e-10), 2);
        }
    }

    #[test]
    fn singular_values_are_unitarily_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for trial in 0..100 {
            let n = 2 + trial % 4;
            let t = n + trial % 3;
            let a = random_cmat(&mut rng, n, t);
            let u = random_unitary(n, 1000 + trial as u64).unwrap();
            let v = random_unitary(t, 2000 + trial as u64).unwrap();
            let rotated = u.matmul(&a).unwrap().matmul(&v.adjoint()).unwrap();
            let sa = svd(&a, &tols()).unwrap().sigma;
            let sr = svd(&rotated, &tols()).unwrap().sigma;
            let scale = sa[0].max(1e-30);
            for (x, y) in sa.iter().zip(&sr) {
                assert!((x - y).abs() <= 1e-12 * scale, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn svd_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let a = random_cmat(&mut rng, 4, 6);
        let f1 = svd(&a, &tols()).unwrap();
        let f2 = svd(&a, &tols()).unwrap();
        assert_eq!(f1, f2);
    }

    #[test]
    fn random_unitary_is_deterministic_and_unitary() {
        let u1 = random_unitary(3, 42).unwrap();
        let u2 = random_unitary(3, 42).unwrap();
        assert_eq!(u1, u2);
        assert!(u1.unitarity_defect() <= 1e-13 * 3.0);
        let u3 = random_unitary(3, 43).unwrap();
        assert!(u1.sub(&u3).unwrap().frob_norm() > 1e-3);
        for n in [1usize, 8, 64] {
            let u = random_unitary(n, 7).unwrap();
            assert!(u.unitarity_defect() <= 1e-12 * n as f64);
        }
    }

    #[test]
    fn dimension_range_enforced() {
        assert!(matches!(
            svd(&CMat::zeros(0, 3), &tols()),
            Err(CxmatError::DimensionRange { .. })
        ));
        assert!(matches!(
            random_unitary(65, 1),
            Err(CxmatError::DimensionRange { .. })
        ));
    }

    #[test]
    fn non_finite_entries_rejected() {
        let mut a = CMat::zeros(2, 2);
        a.set(0, 0, C64::new(f64::INFINITY, 0.0));
        assert!(matches!(
            svd(&a, &tols()),
            Err(CxmatError::NonFinite { row: 0, col: 0 })
        ));
    }
}
