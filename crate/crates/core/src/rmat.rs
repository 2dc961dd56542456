//! Small dense real kernels used across modules: LU determinants and
//! solves for Sylvester matrices and Newton steps, plus numerical rank
//! and orthogonal complement computations backed by the crate's Jacobi
//! SVD (real data factors with real factors).

use crate::cxmat::{svd_for_real, CMat, C64};

/// Determinant by LU with partial pivoting; consumes the matrix.
pub(crate) fn lu_det(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    if n == 0 {
        return 1.0;
    }
    debug_assert!(m.iter().all(|r| r.len() == n));
    let mut det = 1.0;
    for k in 0..n {
        let mut pivot = k;
        for i in (k + 1)..n {
            if m[i][k].abs() > m[pivot][k].abs() {
                pivot = i;
            }
        }
        if m[pivot][k] == 0.0 {
            return 0.0;
        }
        if pivot != k {
            m.swap(pivot, k);
            det = -det;
        }
        det *= m[k][k];
        let inv = 1.0 / m[k][k];
        for i in (k + 1)..n {
            let f = m[i][k] * inv;
            if f == 0.0 {
                continue;
            }
            for j in (k + 1)..n {
                m[i][j] -= f * m[k][j];
            }
        }
    }
    det
}

/// Solves `m x = b` by LU with partial pivoting. Returns `None` when a
/// pivot falls below `1e-14` times the row scale.
pub(crate) fn lu_solve(mut m: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = m.len();
    debug_assert_eq!(b.len(), n);
    let scale = m
        .iter()
        .flat_map(|r| r.iter().map(|x| x.abs()))
        .fold(0.0, f64::max)
        .max(1e-30);
    for k in 0..n {
        let mut pivot = k;
        for i in (k + 1)..n {
            if m[i][k].abs() > m[pivot][k].abs() {
                pivot = i;
            }
        }
        if m[pivot][k].abs() <= 1e-14 * scale {
            return None;
        }
        if pivot != k {
            m.swap(pivot, k);
            b.swap(pivot, k);
        }
        let inv = 1.0 / m[k][k];
        for i in (k + 1)..n {
            let f = m[i][k] * inv;
            if f == 0.0 {
                continue;
            }
            for j in (k + 1)..n {
                m[i][j] -= f * m[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    for k in (0..n).rev() {
        let mut s = b[k];
        for j in (k + 1)..n {
            s -= m[k][j] * b[j];
        }
        b[k] = s / m[k][k];
    }
    Some(b)
}

fn stack_to_cmat(rows: &[Vec<f64>]) -> CMat {
    let r = rows.len();
    let c = rows.first().map_or(0, |row| row.len());
    debug_assert!(rows.iter().all(|row| row.len() == c));
    CMat::from_fn(r, c, |i, j| C64::new(rows[i][j], 0.0))
}

/// Rank of the span of `rows` at relative tolerance `rel_tol` on singular
/// values.
pub(crate) fn numerical_rank(rows: &[Vec<f64>], rel_tol: f64) -> usize {
    if rows.is_empty() || rows[0].is_empty() {
        return 0;
    }
    let f = svd_for_real(&stack_to_cmat(rows)).expect("finite real stack");
    f.rank(rel_tol)
}

/// Orthonormalizes `rows` in order by twice-applied Gram-Schmidt, dropping
/// vectors whose residual norm falls below `1e-10` of their input norm.
pub(crate) fn orthonormalize(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for row in rows {
        let scale = norm(row).max(1e-300);
        let mut v = row.clone();
        for _ in 0..2 {
            for b in &basis {
                let coef = dot(b, &v);
                for (vk, bk) in v.iter_mut().zip(b) {
                    *vk -= coef * bk;
                }
            }
        }
        let nv = norm(&v);
        if nv > 1e-10 * scale {
            for x in v.iter_mut() {
                *x /= nv;
            }
            basis.push(v);
        }
    }
    basis
}

/// Orthonormal basis of the orthogonal complement of `span(rows)` in
/// `R^dim`, built deterministically from standard basis vectors.
pub(crate) fn orthonormal_complement(rows: &[Vec<f64>], dim: usize) -> Vec<Vec<f64>> {
    let base = orthonormalize(rows);
    let target = dim - base.len();
    let mut complement: Vec<Vec<f64>> = Vec::with_capacity(target);
    let mut all: Vec<Vec<f64>> = base;
    let mut j = 0;
    while complement.len() < target && j < dim {
        let mut v = vec![0.0; dim];
        v[j] = 1.0;
        for _ in 0..2 {
            for b in &all {
                let coef = dot(b, &v);
                for (vk, bk) in v.iter_mut().zip(b) {
                    *vk -= coef * bk;
                }
            }
        }
        let nv = norm(&v);
        if nv > 0.1 {
            for x in v.iter_mut() {
                *x /= nv;
            }
            all.push(v.clone());
            complement.push(v);
        }
        j += 1;
    }
    assert_eq!(complement.len(), target, "complement completion failed");
    complement
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_matches_closed_forms() {
        assert_eq!(lu_det(vec![vec![2.0]]), 2.0);
        let m = vec![vec![1.0, 2.0], vec![3.0, 4.0]];
        assert!((lu_det(m) - -2.0).abs() < 1e-14);
        let singular = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(lu_det(singular).abs() < 1e-14);
    }

    #[test]
    fn solve_roundtrip() {
        let m = vec![
            vec![4.0, 1.0, 0.0],
            vec![1.0, 3.0, 1.0],
            vec![0.0, 1.0, 2.0],
        ];
        let x = vec![1.0, -2.0, 0.5];
        let b: Vec<f64> = (0..3).map(|i| dot(&m[i], &x)).collect();
        let got = lu_solve(m, b).unwrap();
        for (g, e) in got.iter().zip(&x) {
            assert!((g - e).abs() < 1e-12);
        }
    }

    #[test]
    fn rank_counts_independent_rows() {
        let rows = vec![vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0]];
        assert_eq!(numerical_rank(&rows, 1e-9), 2);
        let dependent = vec![vec![1.0, 0.0, 1.0], vec![2.0, 0.0, 2.0]];
        assert_eq!(numerical_rank(&dependent, 1e-9), 1);
    }

    #[test]
    fn complement_is_orthonormal() {
        let rows = vec![vec![1.0, 1.0, 0.0, 0.0]];
        let comp = orthonormal_complement(&rows, 4);
        assert_eq!(comp.len(), 3);
        for (i, v) in comp.iter().enumerate() {
            assert!(dot(v, &rows[0]).abs() < 1e-12);
            assert!((norm(v) - 1.0).abs() < 1e-12);
            for w in comp.iter().skip(i + 1) {
                assert!(dot(v, w).abs() < 1e-12);
            }
        }
    }
}
