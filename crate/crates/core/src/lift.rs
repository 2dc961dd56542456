//! Lifting slice critical points back to matrix space.
//!
//! If `Y = U diag(sigma) V*` is a singular value decomposition and `x` is a
//! critical point of the distance from `sigma` to a signed-permutation
//! invariant slice `S`, then `X = U diag(x) V*` is a critical point of the
//! distance from `Y` to the matrix set over `S`, and `|X - Y|_F = |x -
//! sigma|`. This module carries out that construction, specializes it to
//! the low-rank sets where the critical points are the subset truncations
//! of the SVD, builds the polynomial whose roots are the critical squared
//! distances, and checks the shared-frame property `X Y*` and `X* Y`
//! Hermitian that every lifted critical pair must satisfy.

use crate::config::Tolerances;
use crate::cxmat::{svd, CMat, CxmatError, RealDiag};
use crate::rpoly::RPoly;
use crate::slices::{genericity_check, GenericityReport, SliceError, SliceFamily};
use serde::{Deserialize, Serialize};

/// Errors from the matrix-space constructions.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LiftError {
    #[error(transparent)]
    Mat(#[from] CxmatError),
    #[error(transparent)]
    Slice(#[from] SliceError),
    /// The family is a plane example without signed-permutation symmetry,
    /// so it does not describe a matrix set.
    #[error("family {0} is not a matrix slice and cannot be lifted")]
    NotMatrixSlice(String),
    /// The family dimension must equal the number of singular values.
    #[error("family dimension {expected} does not match min(rows, cols) = {got}")]
    SliceDimension { expected: usize, got: usize },
    /// Rank bound outside `1..n`.
    #[error("rank bound {k} outside 1..{n}")]
    BadRank { k: usize, n: usize },
    /// The distance polynomial would have more roots than the cap allows.
    #[error("distance polynomial needs {terms} roots, cap is {max}")]
    TooManyTerms { terms: usize, max: usize },
}

/// A critical point of the Hermitian distance from a data matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HdCriticalPoint {
    /// The slice critical point feeding the lift.
    pub x: Vec<f64>,
    /// `U diag(x) V*` in the data matrix frame.
    pub matrix: CMat,
    /// `|X - Y|_F^2`, computed at matrix level.
    pub distance_sq: f64,
    /// Stationarity residual inherited from the slice solve.
    pub residual: f64,
}

/// Everything the lift produces for one data matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftReport {
    pub family: SliceFamily,
    /// Singular values of the data matrix, descending.
    pub sigma: Vec<f64>,
    pub genericity: GenericityReport,
    pub points: Vec<HdCriticalPoint>,
    /// Largest gap between the matrix-level squared distance and the slice
    /// squared distance over all points; the reduction makes these equal,
    /// so anything beyond rounding indicates a broken frame.
    pub distance_identity_defect: f64,
    pub warnings: Vec<String>,
}

/// Lifts every critical point of `family` at the singular values of `y`
/// into matrix space through the shared SVD frame.
///
/// A data matrix with coinciding or vanishing singular values does not pin
/// the frame down; the lift still runs but flags the ambiguity in
/// `warnings` (the individual lifted points are then one valid choice
/// among a positive-dimensional set).
pub fn lift_critical(
    family: &SliceFamily,
    y: &CMat,
    tol: &Tolerances,
) -> Result<LiftReport, LiftError> {
    if !family.is_matrix_slice() {
        return Err(LiftError::NotMatrixSlice(format!("{family:?}")));
    }
    let n = y.rows().min(y.cols());
    if family.ambient_dim() != n {
        return Err(LiftError::SliceDimension {
            expected: family.ambient_dim(),
            got: n,
        });
    }
    let f = svd(y, tol)?;
    let genericity = genericity_check(family, &f.sigma, tol)?;
    let mut warnings = Vec::new();
    if !genericity.lift_ok {
        warnings.push(
            "singular values nearly coincide or vanish: the SVD frame is not unique and \
             the lifted points are one representative choice"
                .into(),
        );
    }

    let slice_points = family.ed_critical(&f.sigma, tol)?;
    let vstar = f.v.adjoint();
    let mut points = Vec::with_capacity(slice_points.len());
    let mut identity_defect = 0.0f64;
    for p in slice_points {
        let mid = RealDiag::new(y.rows(), y.cols(), p.x.clone()).to_cmat();
        let matrix = f.u.matmul(&mid)?.matmul(&vstar)?;
        let diff = matrix.sub(y)?;
        let distance_sq = diff.frob_norm().powi(2);
        identity_defect = identity_defect.max((distance_sq - p.distance_sq).abs());
        points.push(HdCriticalPoint {
            x: p.x,
            matrix,
            distance_sq,
            residual: p.residual,
        });
    }
    Ok(LiftReport {
        family: family.clone(),
        sigma: f.sigma,
        genericity,
        points,
        distance_identity_defect: identity_defect,
        warnings,
    })
}

/// One subset truncation of the SVD: the critical point of the rank-`k`
/// set that keeps the singular directions in `subset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EckartYoungPoint {
    /// Indices (into the descending singular values) that are kept.
    pub subset: Vec<usize>,
    /// Sum of the squared omitted singular values.
    pub distance_sq: f64,
    pub matrix: CMat,
}

/// Critical points of the distance from `y` to the matrices of rank at
/// most `k`: one per `k`-subset of singular directions, with squared
/// distance the omitted spectral mass. The first subset keeps the largest
/// singular values and is the best approximation.
pub fn eckart_young(y: &CMat, k: usize, tol: &Tolerances) -> Result<Vec<EckartYoungPoint>, LiftError> {
    let n = y.rows().min(y.cols());
    if k == 0 || k >= n {
        return Err(LiftError::BadRank { k, n });
    }
    let f = svd(y, tol)?;
    let vstar = f.v.adjoint();
    let mut out = Vec::new();
    for subset in crate::slices::lex_subsets(n, k) {
        let mut x = vec![0.0; n];
        for &i in &subset {
            x[i] = f.sigma[i];
        }
        let distance_sq = (0..n)
            .filter(|i| !subset.contains(i))
            .map(|i| f.sigma[i] * f.sigma[i])
            .sum();
        let mid = RealDiag::new(y.rows(), y.cols(), x).to_cmat();
        let matrix = f.u.matmul(&mid)?.matmul(&vstar)?;
        out.push(EckartYoungPoint {
            subset,
            distance_sq,
            matrix,
        });
    }
    Ok(out)
}

/// The monic polynomial in `s` whose roots are the critical squared
/// distances from `y` to the rank-at-most-`r` matrices, one root per
/// subset: `prod_I (s - sum_{j not in I} sigma_j^2)`.
///
/// Data whose singular values make two subsets tie produces a genuine
/// multiple root; the polynomial is still returned.
pub fn hd_poly(y: &CMat, r: usize, tol: &Tolerances) -> Result<RPoly, LiftError> {
    let n = y.rows().min(y.cols());
    if r == 0 || r >= n {
        return Err(LiftError::BadRank { k: r, n });
    }
    let terms = binomial(n, r);
    if terms > tol.max_hd_poly_rows {
        return Err(LiftError::TooManyTerms {
            terms,
            max: tol.max_hd_poly_rows,
        });
    }
    let f = svd(y, tol)?;
    let total: f64 = f.sigma.iter().map(|s| s * s).sum();
    let roots: Vec<f64> = crate::slices::lex_subsets(n, r)
        .into_iter()
        .map(|subset| total - subset.iter().map(|&i| f.sigma[i] * f.sigma[i]).sum::<f64>())
        .collect();
    Ok(RPoly::from_roots(&roots))
}

/// Residuals of the shared-frame property of a critical pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimCheck {
    /// Scaled Hermitian defect of `X Y*`.
    pub left_defect: f64,
    /// Scaled Hermitian defect of `X* Y`.
    pub right_defect: f64,
    pub ok: bool,
}

/// Checks that `X` and `Y` admit a simultaneous singular value
/// decomposition: exactly then both `X Y*` and `X* Y` are Hermitian.
/// Every critical point lifted through the frame of `Y` passes; a generic
/// unrelated pair fails.
pub fn sim_decomposition_check(x: &CMat, y: &CMat, tol: &Tolerances) -> Result<SimCheck, LiftError> {
    let left = x.matmul(&y.adjoint())?;
    let right = x.adjoint().matmul(y)?;
    let defect = |m: &CMat| {
        m.sub(&m.adjoint()).expect("square product").frob_norm() / (1.0 + m.frob_norm())
    };
    let left_defect = defect(&left);
    let right_defect = defect(&right);
    Ok(SimCheck {
        left_defect,
        right_defect,
        ok: left_defect <= tol.orthogonality && right_defect <= tol.orthogonality,
    })
}

fn binomial(n: usize, k: usize) -> usize {
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}
