//! Independent certification of critical points and of the linear algebra
//! the slice reduction rests on.
//!
//! Nothing here reuses the polynomial solvers: criticality is certified by
//! pairing the residual matrix against an explicitly generated tangent
//! frame, the splitting of matrix space over a diagonal is checked by rank
//! computations on generator stacks, and a Lagrange multiplier Newton
//! solver recomputes 2x2 critical points straight from the constraint
//! equations in real coordinates, never touching an SVD.

use crate::config::Tolerances;
use crate::cxmat::{
    hermitian_inner, q_inner, skew_basis, svd, CMat, CxmatError, RealDiag, C64,
};
use crate::lift::{lift_critical, LiftError};
use crate::rmat;
use crate::slices::{SliceError, SliceFamily};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Errors from certification routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VerifyError {
    #[error(transparent)]
    Mat(#[from] CxmatError),
    #[error(transparent)]
    Slice(#[from] SliceError),
    #[error(transparent)]
    Lift(#[from] LiftError),
    /// The diagonal data fails the distinct-nonzero-moduli hypothesis.
    #[error("degenerate diagonal data: {0}")]
    DegenerateY(String),
    /// A brute-force or frame construction is not available here.
    #[error("unsupported verification target: {0}")]
    Unsupported(String),
}

// ── Tangent frames and criticality certificates ─────────────────────────

/// Orthonormal (for the real trace pairing) basis of the tangent space of
/// a matrix slice set at `U diag(x) V*`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentFrame {
    pub basis: Vec<CMat>,
    pub dim: usize,
}

/// Builds the tangent frame at `X = U diag(x) V*`: the unitary orbit
/// directions `Z X + X W` for skew-Hermitian `Z`, `W`, plus the slice
/// directions `U diag(v) V*` over a tangent basis `v` of the slice at `x`.
/// The stacked generators are orthonormalized, so the returned dimension
/// is the numerical rank of the span.
pub fn tangent_frame(
    family: &SliceFamily,
    x: &[f64],
    u: &CMat,
    v: &CMat,
    tol: &Tolerances,
) -> Result<TangentFrame, VerifyError> {
    if !family.is_matrix_slice() {
        return Err(VerifyError::Unsupported(format!(
            "{family:?} is not a matrix slice"
        )));
    }
    let n = u.rows();
    let t = v.rows();
    let mid = RealDiag::new(n, t, x.to_vec()).to_cmat();
    let x_mat = u.matmul(&mid)?.matmul(&v.adjoint())?;

    let mut generators: Vec<Vec<f64>> = Vec::new();
    for z in skew_basis(n) {
        generators.push(z.matmul(&x_mat)?.real_coords());
    }
    for w in skew_basis(t) {
        generators.push(x_mat.matmul(&w)?.real_coords());
    }
    match family.tangent_basis(x, tol) {
        Ok(slice_dirs) => {
            for dir in slice_dirs {
                let d = RealDiag::new(n, t, dir).to_cmat();
                generators.push(u.matmul(&d)?.matmul(&v.adjoint())?.real_coords());
            }
        }
        Err(SliceError::NonGenericData(why)) => {
            // Singular slice point: the orbit directions still make sense,
            // the missing slice directions just shrink the certifiable
            // frame. Criticality against this partial frame remains a
            // necessary condition.
            let _ = why;
        }
        Err(e) => return Err(e.into()),
    }

    let rows = rmat::orthonormalize(&generators);
    let basis: Vec<CMat> = rows
        .iter()
        .map(|r| CMat::from_real_coords(n, t, r))
        .collect();
    Ok(TangentFrame {
        dim: basis.len(),
        basis,
    })
}

/// Outcome of pairing `Y - X` against a tangent frame at `X`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalityCertificate {
    /// Largest `|Re Tr((Y - X) T*)|` over the frame, scaled by the
    /// residual norm.
    pub residual: f64,
    pub tangent_dim: usize,
    pub ok: bool,
}

/// Certifies that `X = U diag(x) V*` is a critical point of the distance
/// from `y`: the residual `y - X` must be orthogonal, in the real trace
/// pairing, to every tangent direction of the set at `X`.
pub fn is_hd_critical(
    family: &SliceFamily,
    x: &[f64],
    u: &CMat,
    v: &CMat,
    y: &CMat,
    tol: &Tolerances,
) -> Result<CriticalityCertificate, VerifyError> {
    let frame = tangent_frame(family, x, u, v, tol)?;
    let mid = RealDiag::new(u.rows(), v.rows(), x.to_vec()).to_cmat();
    let x_mat = u.matmul(&mid)?.matmul(&v.adjoint())?;
    let diff = y.sub(&x_mat)?;
    let scale = 1.0 + diff.frob_norm();
    let mut residual = 0.0f64;
    for t_dir in &frame.basis {
        let p = q_inner(&diff, t_dir)?.abs();
        // Pairings below the absolute guard are exact zeros hit by
        // rounding; keep them from polluting the scaled maximum.
        if p > tol.residual_guard {
            residual = residual.max(p / scale);
        }
    }
    Ok(CriticalityCertificate {
        residual,
        tangent_dim: frame.dim,
        ok: residual <= tol.orthogonality,
    })
}

/// Lifts all critical points for `family` at `y` and certifies each one.
/// Returns the per-point certificates in lift order.
pub fn certify_lift(
    family: &SliceFamily,
    y: &CMat,
    tol: &Tolerances,
) -> Result<Vec<CriticalityCertificate>, VerifyError> {
    let f = svd(y, tol)?;
    let report = lift_critical(family, y, tol)?;
    report
        .points
        .iter()
        .map(|p| is_hd_critical(family, &p.x, &f.u, &f.v, y, tol))
        .collect()
}

// ── Splitting of matrix space over a diagonal ───────────────────────────

/// Rank data of the orbit generators at a real diagonal matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplittingReport {
    pub orbit_rank: usize,
    pub expected_rank: usize,
    /// Largest coordinate mass any complement vector carries outside the
    /// real diagonal coordinates.
    pub complement_defect: f64,
    /// Largest normalized pairing between a real diagonal unit matrix and
    /// an orbit generator: the two summands must be orthogonal.
    pub cross_gram: f64,
    pub ok: bool,
}

/// Checks that at `D = diag(y)` in `C^{n x t}` the orbit directions
/// `{Z D} + {D W}` with `Z`, `W` skew-Hermitian span a space of real
/// dimension `2nt - n` whose orthogonal complement is exactly the real
/// diagonal matrices. This splitting is what lets the distance problem
/// collapse onto the diagonal; it needs the moduli of `y` pairwise
/// distinct and nonzero and fails otherwise.
pub fn check_splitting(
    y: &[f64],
    rows: usize,
    cols: usize,
    tol: &Tolerances,
) -> Result<SplittingReport, VerifyError> {
    let n = rows.min(cols);
    if y.len() != n {
        return Err(VerifyError::DegenerateY(format!(
            "diagonal length {} does not fit {rows}x{cols}",
            y.len()
        )));
    }
    let scale = y.iter().fold(0.0f64, |m, c| m.max(c.abs())).max(1.0);
    for i in 0..n {
        if y[i].abs() <= tol.genericity * scale {
            return Err(VerifyError::DegenerateY(format!("y[{i}] is numerically zero")));
        }
        for j in (i + 1)..n {
            if (y[i].abs() - y[j].abs()).abs() <= tol.genericity * scale {
                return Err(VerifyError::DegenerateY(format!(
                    "|y[{i}]| and |y[{j}]| coincide"
                )));
            }
        }
    }

    let d = RealDiag::new(rows, cols, y.to_vec()).to_cmat();
    let mut generators: Vec<Vec<f64>> = Vec::new();
    for z in skew_basis(rows) {
        generators.push(z.matmul(&d)?.real_coords());
    }
    for w in skew_basis(cols) {
        generators.push(d.matmul(&w)?.real_coords());
    }
    let ambient = 2 * rows * cols;
    let orbit_rank = rmat::numerical_rank(&generators, tol.frame_rank);
    let expected_rank = ambient - n;

    // Coordinates of the real diagonal inside the flattened space: the
    // real part of each (i, i) entry.
    let diag_coords: Vec<usize> = (0..n).map(|i| 2 * (i * cols + i)).collect();
    let complement = rmat::orthonormal_complement(&generators, ambient);
    let mut complement_defect = 0.0f64;
    for vec in &complement {
        let off: f64 = vec
            .iter()
            .enumerate()
            .filter(|(k, _)| !diag_coords.contains(k))
            .map(|(_, c)| c * c)
            .sum();
        complement_defect = complement_defect.max(off.sqrt());
    }

    // The real trace pairing in flattened coordinates is the dot product,
    // so the cross-Gram row for the unit diagonal E_ii is just the
    // generator's coordinate there.
    let mut cross_gram = 0.0f64;
    for g in &generators {
        let g_norm = rmat::norm(g);
        if g_norm <= tol.residual_guard {
            continue;
        }
        for &k in &diag_coords {
            cross_gram = cross_gram.max(g[k].abs() / g_norm);
        }
    }

    let ok = orbit_rank == expected_rank
        && complement.len() == n
        && complement_defect <= tol.orthogonality
        && cross_gram <= tol.orthogonality;
    Ok(SplittingReport {
        orbit_rank,
        expected_rank,
        complement_defect,
        cross_gram,
        ok,
    })
}

// ── Lemma suites ────────────────────────────────────────────────────────

/// Outcome of one randomized lemma suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub cases: usize,
    pub max_defect: f64,
    pub ok: bool,
}

/// Real-diagonal lemma: a matrix orthogonal (real trace pairing) to every
/// orbit direction at a generic diagonal is itself real diagonal. Runs
/// [`check_splitting`] over random shapes and data and accumulates the
/// worst complement defect.
pub fn lemma_rd_suite(seed: u64, tol: &Tolerances) -> Result<SuiteReport, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = 0;
    let mut max_defect = 0.0f64;
    let mut ok = true;
    for rows in 2..=3usize {
        for cols in rows..=4usize {
            for _ in 0..20 {
                let n = rows.min(cols);
                // Separated moduli keep the hypothesis comfortably true.
                let mut y: Vec<f64> = (0..n)
                    .map(|i| (1.0 + i as f64) + rng.gen_range(0.0..0.4))
                    .collect();
                if rng.gen_bool(0.5) {
                    y[0] = -y[0];
                }
                let report = check_splitting(&y, rows, cols, tol)?;
                cases += 1;
                max_defect = max_defect.max(report.complement_defect);
                ok &= report.ok;
            }
        }
    }
    Ok(SuiteReport {
        cases,
        max_defect,
        ok,
    })
}

/// Randomized splitting check over shapes up to 5x5: rank exactly
/// `2nt - n`, real-diagonal complement, and vanishing cross-Gram, for
/// `trials` random generic diagonals.
pub fn splitting_suite(
    seed: u64,
    trials: usize,
    tol: &Tolerances,
) -> Result<SuiteReport, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_defect = 0.0f64;
    let mut ok = true;
    for _ in 0..trials {
        let rows = rng.gen_range(2..=5usize);
        let cols = rng.gen_range(2..=5usize);
        let n = rows.min(cols);
        let y: Vec<f64> = (0..n)
            .map(|i| {
                let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                sign * ((1 + i) as f64 + rng.gen_range(0.0..0.5))
            })
            .collect();
        let report = check_splitting(&y, rows, cols, tol)?;
        max_defect = max_defect
            .max(report.complement_defect)
            .max(report.cross_gram);
        ok &= report.ok;
    }
    Ok(SuiteReport {
        cases: trials,
        max_defect,
        ok,
    })
}

/// Real-versus-complex pairing lemma: criticality kills the real part of
/// the trace pairing against tangent directions, not the full complex
/// trace. The suite pins one exact witness and then checks both halves on
/// random nearest-unitary problems.
///
/// The witness: `Y = diag(i, 2, 3)` has nearest unitary `X = diag(i, 1,
/// 1)`; against the tangent direction `X K` with `K = diag(i, -2i, 3i)`
/// the complex pairing `Tr((Y - X)(X K)*)` is exactly `-4i` while its real
/// part vanishes.
pub fn lemma_complex_suite(seed: u64, tol: &Tolerances) -> Result<SuiteReport, VerifyError> {
    let y = CMat::diag_complex(&[C64::new(0.0, 1.0), C64::new(2.0, 0.0), C64::new(3.0, 0.0)]);
    let x = CMat::diag_complex(&[C64::new(0.0, 1.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0)]);
    let k = CMat::diag_complex(&[C64::new(0.0, 1.0), C64::new(0.0, -2.0), C64::new(0.0, 3.0)]);
    let tangent = x.matmul(&k)?;
    let pairing = hermitian_inner(&y.sub(&x)?, &tangent)?;
    if pairing != C64::new(0.0, -4.0) {
        return Ok(SuiteReport {
            cases: 1,
            max_defect: (pairing - C64::new(0.0, -4.0)).norm(),
            ok: false,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = 1;
    let mut max_defect = 0.0f64;
    let mut ok = true;
    for _ in 0..20 {
        let n = 2 + (rng.gen_range(0..2usize));
        let y = CMat::from_fn(n, n, |_, _| {
            C64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5))
        });
        let report = lift_critical(&SliceFamily::AllOnes { n }, &y, tol)?;
        for p in &report.points {
            // Tangent space of the unitary group at X is {X K : K skew}.
            for k in skew_basis(n) {
                let t_dir = p.matrix.matmul(&k)?;
                let z = hermitian_inner(&y.sub(&p.matrix)?, &t_dir)?;
                let scale = 1.0 + y.frob_norm() * t_dir.frob_norm();
                cases += 1;
                max_defect = max_defect.max(z.re.abs() / scale);
                ok &= z.re.abs() / scale <= tol.orthogonality;
            }
        }
    }
    Ok(SuiteReport {
        cases,
        max_defect,
        ok,
    })
}

/// Skew-pairing lemma: a square matrix whose real trace pairing with every
/// skew-Hermitian matrix vanishes is Hermitian. Randomized quantitative
/// form: the Hermitian defect is bounded by the worst normalized pairing.
pub fn lemma_skew_suite(seed: u64, _tol: &Tolerances) -> Result<SuiteReport, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = 0;
    let mut max_defect = 0.0f64;
    let mut ok = true;
    for trial in 0..100 {
        let n = 2 + trial % 3;
        let a = CMat::from_fn(n, n, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let norm_a = a.frob_norm().max(1e-30);
        let eps = skew_basis(n)
            .iter()
            .map(|z| q_inner(&a, z).expect("shapes agree").abs() / z.frob_norm())
            .fold(0.0, f64::max)
            / norm_a;
        let defect = a.sub(&a.adjoint())?.frob_norm() / norm_a;
        let bound = 2.0 * (n as f64) * eps + 1e-13;
        cases += 1;
        let ratio = if defect == 0.0 { 0.0 } else { defect / bound };
        max_defect = max_defect.max(ratio);
        ok &= defect <= bound;

        // And the converse on an exactly Hermitian matrix: all pairings die.
        let h = a.add(&a.adjoint())?.scale(C64::new(0.5, 0.0));
        for z in skew_basis(n) {
            let p = q_inner(&h, &z)?.abs();
            cases += 1;
            ok &= p <= 1e-13 * (1.0 + h.frob_norm());
        }
    }
    Ok(SuiteReport {
        cases,
        max_defect,
        ok,
    })
}

/// Compares the brute-force Lagrange solver against the SVD lift on
/// random 2x2 data for every family both sides support. The defect is the
/// Hausdorff distance between the two solution sets; counts must agree
/// exactly.
pub fn oracle_suite(seed: u64, trials: usize, tol: &Tolerances) -> Result<SuiteReport, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let families = [
        SliceFamily::Rank { n: 2, r: 1 },
        SliceFamily::DetMag,
        SliceFamily::AllOnes { n: 2 },
    ];
    let mut cases = 0;
    let mut max_defect = 0.0f64;
    let mut ok = true;
    for trial in 0..trials as u64 {
        let y = CMat::from_fn(2, 2, |_, _| {
            C64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5))
        });
        for family in &families {
            let lifted = lift_critical(family, &y, tol)?;
            let brute = brute_force_hd(family, &y, seed.wrapping_add(trial), tol)?;
            cases += 1;
            if brute.len() != lifted.points.len() {
                ok = false;
                max_defect = f64::INFINITY;
                continue;
            }
            let mut defect = 0.0f64;
            for b in &brute {
                let d = lifted
                    .points
                    .iter()
                    .map(|p| b.matrix.sub(&p.matrix).expect("2x2").frob_norm())
                    .fold(f64::INFINITY, f64::min);
                defect = defect.max(d);
            }
            for p in &lifted.points {
                let d = brute
                    .iter()
                    .map(|b| b.matrix.sub(&p.matrix).expect("2x2").frob_norm())
                    .fold(f64::INFINITY, f64::min);
                defect = defect.max(d);
            }
            max_defect = max_defect.max(defect);
            ok &= defect <= 1e-6;
        }
    }
    Ok(SuiteReport {
        cases,
        max_defect,
        ok,
    })
}

// ── Brute force: Lagrange multipliers in real coordinates ───────────────

/// A critical point recomputed without any SVD.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BruteCritical {
    pub matrix: CMat,
    pub distance_sq: f64,
    /// Final norm of the Lagrange system at the solution.
    pub kkt_residual: f64,
}

/// Pure quadratic form `x^T Q x + c` on the eight real coordinates of a
/// 2x2 complex matrix.
#[derive(Debug, Clone)]
struct Quadratic {
    q: Vec<Vec<f64>>,
    c: f64,
}

impl Quadratic {
    fn zero(c: f64) -> Self {
        Quadratic {
            q: vec![vec![0.0; 8]; 8],
            c,
        }
    }

    fn pair(mut self, i: usize, j: usize, w: f64) -> Self {
        self.q[i][j] += w / 2.0;
        self.q[j][i] += w / 2.0;
        self
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let mut acc = self.c;
        for i in 0..8 {
            for j in 0..8 {
                acc += x[i] * self.q[i][j] * x[j];
            }
        }
        acc
    }

    fn grad(&self, x: &[f64]) -> Vec<f64> {
        (0..8)
            .map(|i| 2.0 * (0..8).map(|j| self.q[i][j] * x[j]).sum::<f64>())
            .collect()
    }

    fn hess(&self) -> Vec<Vec<f64>> {
        self.q
            .iter()
            .map(|row| row.iter().map(|v| 2.0 * v).collect())
            .collect()
    }
}

/// Coordinates follow [`CMat::real_coords`]:
/// `[Re z00, Im z00, Re z01, Im z01, Re z10, Im z10, Re z11, Im z11]`.
fn det_real_part() -> Quadratic {
    // Re det = a00 a11 - b00 b11 - a01 a10 + b01 b10.
    Quadratic::zero(0.0)
        .pair(0, 6, 1.0)
        .pair(1, 7, -1.0)
        .pair(2, 4, -1.0)
        .pair(3, 5, 1.0)
}

fn det_imag_part() -> Quadratic {
    // Im det = a00 b11 + b00 a11 - a01 b10 - b01 a10.
    Quadratic::zero(0.0)
        .pair(0, 7, 1.0)
        .pair(1, 6, 1.0)
        .pair(2, 5, -1.0)
        .pair(3, 4, -1.0)
}

fn unitary_constraints() -> Vec<Quadratic> {
    // Rows of X orthonormal: |row 0|^2 = 1, |row 1|^2 = 1, and the complex
    // inner product of the rows vanishes (two real conditions).
    let row0 = Quadratic::zero(-1.0)
        .pair(0, 0, 1.0)
        .pair(1, 1, 1.0)
        .pair(2, 2, 1.0)
        .pair(3, 3, 1.0);
    let row1 = Quadratic::zero(-1.0)
        .pair(4, 4, 1.0)
        .pair(5, 5, 1.0)
        .pair(6, 6, 1.0)
        .pair(7, 7, 1.0);
    let cross_re = Quadratic::zero(0.0)
        .pair(0, 4, 1.0)
        .pair(1, 5, 1.0)
        .pair(2, 6, 1.0)
        .pair(3, 7, 1.0);
    let cross_im = Quadratic::zero(0.0)
        .pair(1, 4, 1.0)
        .pair(0, 5, -1.0)
        .pair(3, 6, 1.0)
        .pair(2, 7, -1.0);
    vec![row0, row1, cross_re, cross_im]
}

enum Constraints {
    /// A list of quadratic equations.
    Quadratics(Vec<Quadratic>),
    /// The single quartic `u^2 + v^2 = 1` built from two quadratics.
    ModulusOne { u: Quadratic, v: Quadratic },
}

impl Constraints {
    fn count(&self) -> usize {
        match self {
            Constraints::Quadratics(qs) => qs.len(),
            Constraints::ModulusOne { .. } => 1,
        }
    }

    fn eval(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Constraints::Quadratics(qs) => qs.iter().map(|q| q.eval(x)).collect(),
            Constraints::ModulusOne { u, v } => {
                let (a, b) = (u.eval(x), v.eval(x));
                vec![a * a + b * b - 1.0]
            }
        }
    }

    fn jacobian(&self, x: &[f64]) -> Vec<Vec<f64>> {
        match self {
            Constraints::Quadratics(qs) => qs.iter().map(|q| q.grad(x)).collect(),
            Constraints::ModulusOne { u, v } => {
                let (a, b) = (u.eval(x), v.eval(x));
                let (ga, gb) = (u.grad(x), v.grad(x));
                vec![(0..8)
                    .map(|i| 2.0 * a * ga[i] + 2.0 * b * gb[i])
                    .collect()]
            }
        }
    }

    /// `sum_i lambda_i Hessian(g_i)` at `x`.
    fn weighted_hessian(&self, x: &[f64], lambda: &[f64]) -> Vec<Vec<f64>> {
        let mut h = vec![vec![0.0; 8]; 8];
        match self {
            Constraints::Quadratics(qs) => {
                for (q, &l) in qs.iter().zip(lambda) {
                    let hq = q.hess();
                    for i in 0..8 {
                        for j in 0..8 {
                            h[i][j] += l * hq[i][j];
                        }
                    }
                }
            }
            Constraints::ModulusOne { u, v } => {
                let l = lambda[0];
                let (a, b) = (u.eval(x), v.eval(x));
                let (ga, gb) = (u.grad(x), v.grad(x));
                let (hu, hv) = (u.hess(), v.hess());
                for i in 0..8 {
                    for j in 0..8 {
                        h[i][j] += l
                            * (2.0 * ga[i] * ga[j]
                                + 2.0 * a * hu[i][j]
                                + 2.0 * gb[i] * gb[j]
                                + 2.0 * b * hv[i][j]);
                    }
                }
            }
        }
        h
    }
}

/// A random start lying on (or numerically on) the constraint set, so the
/// Newton iteration mostly travels along the manifold. Far critical
/// points carry large multipliers and are nearly unreachable from generic
/// ambient starts.
fn on_set_start(family: &SliceFamily, rng: &mut ChaCha8Rng, scale: f64) -> Vec<f64> {
    fn draw(rng: &mut ChaCha8Rng, s: f64) -> C64 {
        C64::new(rng.gen_range(-s..s), rng.gen_range(-s..s))
    }
    match family {
        SliceFamily::Rank { .. } => {
            // Outer products are exactly rank one. The magnitude is drawn
            // log-uniformly: critical points with small trailing singular
            // values sit near the cone point and need small-norm seeds.
            let mag = scale * 10f64.powf(rng.gen_range(-1.5..0.3));
            let s = mag.sqrt().max(1e-3);
            let (a0, a1, b0, b1) = (draw(rng, s), draw(rng, s), draw(rng, s), draw(rng, s));
            let x = CMat::from_fn(2, 2, |i, j| {
                let a = if i == 0 { a0 } else { a1 };
                let b = if j == 0 { b0 } else { b1 };
                a * b
            });
            x.real_coords()
        }
        SliceFamily::DetMag => loop {
            let x = CMat::from_fn(2, 2, |_, _| draw(rng, 1.5 * scale.max(1.0)));
            let det = x[(0, 0)] * x[(1, 1)] - x[(0, 1)] * x[(1, 0)];
            if det.norm() > 0.1 {
                break x.scale(C64::new(det.norm().sqrt().recip(), 0.0)).real_coords();
            }
        },
        _ => loop {
            // Gram-Schmidt on random rows lands exactly in the unitary
            // group.
            let r0 = [draw(rng, 1.0), draw(rng, 1.0)];
            let r1 = [draw(rng, 1.0), draw(rng, 1.0)];
            let n0 = (r0[0].norm_sqr() + r0[1].norm_sqr()).sqrt();
            if n0 < 0.1 {
                continue;
            }
            let q0 = [r0[0] / n0, r0[1] / n0];
            let proj = r1[0] * q0[0].conj() + r1[1] * q0[1].conj();
            let p1 = [r1[0] - proj * q0[0], r1[1] - proj * q0[1]];
            let n1 = (p1[0].norm_sqr() + p1[1].norm_sqr()).sqrt();
            if n1 < 0.1 {
                continue;
            }
            let q1 = [p1[0] / n1, p1[1] / n1];
            break CMat::from_fn(2, 2, |i, j| if i == 0 { q0[j] } else { q1[j] }).real_coords();
        },
    }
}

fn constraints_for(family: &SliceFamily) -> Result<Constraints, VerifyError> {
    match family {
        SliceFamily::Rank { n: 2, r: 1 } => Ok(Constraints::Quadratics(vec![
            det_real_part(),
            det_imag_part(),
        ])),
        SliceFamily::DetMag => Ok(Constraints::ModulusOne {
            u: det_real_part(),
            v: det_imag_part(),
        }),
        SliceFamily::AllOnes { n: 2 } => Ok(Constraints::Quadratics(unitary_constraints())),
        other => Err(VerifyError::Unsupported(format!(
            "no constraint equations for {other:?} in the 2x2 brute force"
        ))),
    }
}

/// One damped Newton run on the Lagrange system
/// `x - y + J(x)^T lambda = 0`, `g(x) = 0`.
fn kkt_newton(
    cons: &Constraints,
    y8: &[f64],
    start: &[f64],
    tol: &Tolerances,
) -> Option<(Vec<f64>, f64)> {
    let m = cons.count();
    let mut x = start.to_vec();
    // Least-squares multipliers for the start: solve (G G^T) l = -G (x - y)
    // so the first Newton step is not biased toward the zero-multiplier
    // (nearest-point) branch.
    let mut lambda = {
        let jac = cons.jacobian(&x);
        let mut gram = vec![vec![0.0; m]; m];
        let mut rhs = vec![0.0; m];
        for i in 0..m {
            for j in 0..m {
                gram[i][j] = (0..8).map(|k| jac[i][k] * jac[j][k]).sum();
            }
            rhs[i] = -(0..8).map(|k| jac[i][k] * (x[k] - y8[k])).sum::<f64>();
        }
        rmat::lu_solve(gram, rhs).unwrap_or_else(|| vec![0.0; m])
    };
    let data_scale = 1.0 + y8.iter().map(|c| c * c).sum::<f64>().sqrt();
    let f_norm = |x: &[f64], lambda: &[f64]| -> f64 {
        let jac = cons.jacobian(x);
        let g = cons.eval(x);
        let mut acc = 0.0;
        for i in 0..8 {
            let grad_l: f64 = (0..m).map(|k| lambda[k] * jac[k][i]).sum();
            let r = x[i] - y8[i] + grad_l;
            acc += r * r;
        }
        for gi in &g {
            acc += gi * gi;
        }
        acc.sqrt()
    };
    for _ in 0..tol.newton_max_iter {
        let jac = cons.jacobian(&x);
        let g = cons.eval(&x);
        let mut rhs = vec![0.0; 8 + m];
        for i in 0..8 {
            let grad_l: f64 = (0..m).map(|k| lambda[k] * jac[k][i]).sum();
            rhs[i] = -(x[i] - y8[i] + grad_l);
        }
        for k in 0..m {
            rhs[8 + k] = -g[k];
        }
        let current = f_norm(&x, &lambda);
        if current <= tol.newton_residual * data_scale {
            return Some((x, current));
        }
        let wh = cons.weighted_hessian(&x, &lambda);
        let mut big = vec![vec![0.0; 8 + m]; 8 + m];
        for i in 0..8 {
            for j in 0..8 {
                big[i][j] = wh[i][j] + if i == j { 1.0 } else { 0.0 };
            }
            for k in 0..m {
                big[i][8 + k] = jac[k][i];
                big[8 + k][i] = jac[k][i];
            }
        }
        let step = rmat::lu_solve(big, rhs)?;
        // A full Newton step may grow the residual a little while the
        // iterate crosses between basins; only shrunk steps must decrease
        // it. Without the slack the far critical points are unreachable.
        let mut advanced = false;
        let mut scale_step = 1.0;
        for attempt in 0..12 {
            let nx: Vec<f64> = (0..8).map(|i| x[i] + scale_step * step[i]).collect();
            let nl: Vec<f64> = (0..m).map(|k| lambda[k] + scale_step * step[8 + k]).collect();
            let fresh = f_norm(&nx, &nl);
            let limit = if attempt == 0 { 4.0 * current } else { current };
            if fresh < limit.max(tol.residual_guard) && nx.iter().all(|c| c.is_finite()) {
                x = nx;
                lambda = nl;
                advanced = true;
                break;
            }
            scale_step *= 0.5;
        }
        if !advanced || x.iter().any(|c| !c.is_finite() || c.abs() > 1e4) {
            return None;
        }
    }
    None
}

/// Recomputes the Hermitian distance critical points of a 2x2 data matrix
/// straight from the defining equations of the set, by multistart Newton
/// on the Lagrange multiplier system in the eight real coordinates.
///
/// Supports the 2x2 matrix families (rank one, modulus-one determinant,
/// unitary). The result is clustered and sorted by squared distance; it is
/// an oracle for the SVD lift, not a production solver.
pub fn brute_force_hd(
    family: &SliceFamily,
    y: &CMat,
    seed: u64,
    tol: &Tolerances,
) -> Result<Vec<BruteCritical>, VerifyError> {
    if y.rows() != 2 || y.cols() != 2 {
        return Err(VerifyError::Unsupported(format!(
            "brute force handles 2x2 data, got {}x{}",
            y.rows(),
            y.cols()
        )));
    }
    let cons = constraints_for(family)?;
    let y8 = y.real_coords();
    let scale = y.max_abs().max(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found: Vec<(Vec<f64>, f64)> = Vec::new();
    for trial in 0..tol.newton_starts {
        // Mix of start distributions: the data itself, points on the
        // constraint set, and perturbed or reflected copies of the data.
        let start: Vec<f64> = match trial % 3 {
            _ if trial == 0 => y8.clone(),
            0 | 1 => on_set_start(family, &mut rng, scale),
            _ => y8.iter().map(|c| -c + rng.gen_range(-1.5..1.5)).collect(),
        };
        if let Some((x, kkt)) = kkt_newton(&cons, &y8, &start, tol) {
            let is_new = found
                .iter()
                .all(|(f, _)| {
                    f.iter()
                        .zip(&x)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt()
                        > tol.cluster_radius
                });
            if is_new {
                found.push((x, kkt));
            }
        }
    }
    let mut out: Vec<BruteCritical> = found
        .into_iter()
        .map(|(x, kkt)| {
            let distance_sq = x
                .iter()
                .zip(&y8)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>();
            BruteCritical {
                matrix: CMat::from_real_coords(2, 2, &x),
                distance_sq,
                kkt_residual: kkt,
            }
        })
        .collect();
    out.sort_by(|a, b| {
        a.distance_sq
            .partial_cmp(&b.distance_sq)
            .unwrap()
            .then_with(|| {
                a.matrix
                    .real_coords()
                    .partial_cmp(&b.matrix.real_coords())
                    .unwrap()
            })
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lift::eckart_young;

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    fn random_cmat(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMat {
        CMat::from_fn(rows, cols, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    #[test]
    fn splitting_ranks_are_pinned() {
        let tol = tols();
        let r22 = check_splitting(&[2.0, 1.0], 2, 2, &tol).unwrap();
        assert_eq!(r22.orbit_rank, 6);
        assert_eq!(r22.expected_rank, 6);
        assert!(r22.ok, "{r22:?}");
        let r34 = check_splitting(&[3.0, 2.0, 1.0], 3, 4, &tol).unwrap();
        assert_eq!(r34.orbit_rank, 21);
        assert_eq!(r34.expected_rank, 21);
        assert!(r34.complement_defect <= 1e-9, "{r34:?}");
        // Orbit generators have exactly zero real part on the diagonal.
        assert!(r34.cross_gram <= 1e-14, "{r34:?}");
        assert!(r34.ok);
    }

    #[test]
    fn splitting_suite_covers_all_shapes() {
        let tol = tols();
        let report = splitting_suite(77, 40, &tol).unwrap();
        assert!(report.ok, "{report:?}");
        assert!(report.max_defect <= 1e-10, "{report:?}");
    }

    #[test]
    fn splitting_requires_generic_diagonal() {
        let tol = tols();
        assert!(matches!(
            check_splitting(&[1.0, 1.0], 2, 2, &tol),
            Err(VerifyError::DegenerateY(_))
        ));
        assert!(matches!(
            check_splitting(&[1.0, 0.0], 2, 2, &tol),
            Err(VerifyError::DegenerateY(_))
        ));
        // Opposite signs with equal moduli are just as degenerate.
        assert!(matches!(
            check_splitting(&[1.0, -1.0], 2, 2, &tol),
            Err(VerifyError::DegenerateY(_))
        ));
    }

    #[test]
    fn lemma_suites_pass() {
        let tol = tols();
        let rd = lemma_rd_suite(41, &tol).unwrap();
        assert!(rd.ok, "{rd:?}");
        assert!(rd.max_defect <= 1e-9, "{rd:?}");
        let cx = lemma_complex_suite(42, &tol).unwrap();
        assert!(cx.ok, "{cx:?}");
        let sk = lemma_skew_suite(43, &tol).unwrap();
        assert!(sk.ok, "{sk:?}");
    }

    #[test]
    fn complex_pairing_witness_is_exact() {
        // The pinned identity inside the suite, asserted independently:
        // criticality kills only the real part.
        let y = CMat::diag_complex(&[C64::new(0.0, 1.0), C64::new(2.0, 0.0), C64::new(3.0, 0.0)]);
        let x = CMat::diag_complex(&[C64::new(0.0, 1.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0)]);
        let k = CMat::diag_complex(&[C64::new(0.0, 1.0), C64::new(0.0, -2.0), C64::new(0.0, 3.0)]);
        let pairing = hermitian_inner(&y.sub(&x).unwrap(), &x.matmul(&k).unwrap()).unwrap();
        assert_eq!(pairing, C64::new(0.0, -4.0));
    }

    #[test]
    fn tangent_frame_dimensions_match_geometry() {
        let tol = tols();
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        let y = random_cmat(&mut rng, 2, 2);
        let f = svd(&y, &tol).unwrap();

        // Modulus-one determinant set: a real hypersurface in R^8.
        let report = lift_critical(&SliceFamily::DetMag, &y, &tol).unwrap();
        let p = &report.points[0];
        let frame = tangent_frame(&SliceFamily::DetMag, &p.x, &f.u, &f.v, &tol).unwrap();
        assert_eq!(frame.dim, 7);

        // Rank-one matrices in C^{2x2}: real dimension 6.
        let ey = eckart_young(&y, 1, &tol).unwrap();
        let x1 = vec![f.sigma[0], 0.0];
        let frame = tangent_frame(&SliceFamily::Rank { n: 2, r: 1 }, &x1, &f.u, &f.v, &tol).unwrap();
        assert_eq!(frame.dim, 6);
        assert!(ey[0].distance_sq <= ey[1].distance_sq);

        // Unitary group U(2): real dimension 4.
        let frame =
            tangent_frame(&SliceFamily::AllOnes { n: 2 }, &[1.0, 1.0], &f.u, &f.v, &tol).unwrap();
        assert_eq!(frame.dim, 4);

        // Frame vectors are orthonormal in the real pairing.
        for (i, a) in frame.basis.iter().enumerate() {
            assert!((q_inner(a, a).unwrap() - 1.0).abs() < 1e-10);
            for b in frame.basis.iter().skip(i + 1) {
                assert!(q_inner(a, b).unwrap().abs() < 1e-10);
            }
        }
    }

    #[test]
    fn lifted_points_certify_and_perturbations_fail() {
        let tol = tols();
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        for _ in 0..5 {
            let y = random_cmat(&mut rng, 2, 2);
            let f = svd(&y, &tol).unwrap();
            for family in [
                SliceFamily::DetMag,
                SliceFamily::Rank { n: 2, r: 1 },
                SliceFamily::AllOnes { n: 2 },
            ] {
                let certs = certify_lift(&family, &y, &tol).unwrap();
                assert!(!certs.is_empty());
                for c in &certs {
                    assert!(c.ok, "{family:?}: {c:?}");
                    assert!(c.residual <= 1e-9, "{family:?}: {c:?}");
                }
            }
            // A slice point that is on the set but not critical: pairing
            // must be visibly nonzero.
            let bad = vec![2.0, 0.5];
            let cert =
                is_hd_critical(&SliceFamily::DetMag, &bad, &f.u, &f.v, &y, &tol).unwrap();
            assert!(!cert.ok, "{cert:?}");
            assert!(cert.residual > 1e-4, "{cert:?}");
        }
    }

    #[test]
    fn brute_force_matches_lift_on_detmag() {
        let tol = tols();
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for trial in 0..3 {
            let y = random_cmat(&mut rng, 2, 2);
            let lifted = lift_critical(&SliceFamily::DetMag, &y, &tol).unwrap();
            let brute = brute_force_hd(&SliceFamily::DetMag, &y, 100 + trial, &tol).unwrap();
            assert_eq!(
                brute.len(),
                lifted.points.len(),
                "trial {trial}: brute {brute:?}"
            );
            let mut got: Vec<f64> = brute.iter().map(|b| b.distance_sq).collect();
            let mut want: Vec<f64> = lifted.points.iter().map(|p| p.distance_sq).collect();
            got.sort_by(|a, b| a.partial_cmp(b).unwrap());
            want.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() <= 1e-6 * (1.0 + w), "{got:?} vs {want:?}");
            }
            // The matrices themselves match up to reordering.
            for b in &brute {
                let nearest = lifted
                    .points
                    .iter()
                    .map(|p| b.matrix.sub(&p.matrix).unwrap().frob_norm())
                    .fold(f64::INFINITY, f64::min);
                assert!(nearest <= 1e-6, "unmatched brute point {b:?}");
            }
        }
    }

    #[test]
    fn brute_force_matches_lift_on_rank_and_unitary() {
        let tol = tols();
        let mut rng = ChaCha8Rng::seed_from_u64(54);
        let y = random_cmat(&mut rng, 2, 2);

        let brute = brute_force_hd(&SliceFamily::Rank { n: 2, r: 1 }, &y, 200, &tol).unwrap();
        let ey = eckart_young(&y, 1, &tol).unwrap();
        assert_eq!(brute.len(), 2);
        let mut got: Vec<f64> = brute.iter().map(|b| b.distance_sq).collect();
        let mut want: Vec<f64> = ey.iter().map(|p| p.distance_sq).collect();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() <= 1e-6 * (1.0 + w));
        }

        let brute = brute_force_hd(&SliceFamily::AllOnes { n: 2 }, &y, 201, &tol).unwrap();
        let lifted = lift_critical(&SliceFamily::AllOnes { n: 2 }, &y, &tol).unwrap();
        assert_eq!(brute.len(), 4);
        for b in &brute {
            assert!(b.matrix.unitarity_defect() <= 1e-8);
            let nearest = lifted
                .points
                .iter()
                .map(|p| b.matrix.sub(&p.matrix).unwrap().frob_norm())
                .fold(f64::INFINITY, f64::min);
            assert!(nearest <= 1e-6, "unmatched unitary {b:?}");
        }
    }

    #[test]
    fn brute_force_rejects_unsupported_targets() {
        let tol = tols();
        let y3 = CMat::identity(3);
        assert!(matches!(
            brute_force_hd(&SliceFamily::DetMag, &y3, 1, &tol),
            Err(VerifyError::Unsupported(_))
        ));
        let y2 = CMat::identity(2);
        assert!(matches!(
            brute_force_hd(&SliceFamily::Parabola, &y2, 1, &tol),
            Err(VerifyError::Unsupported(_))
        ));
    }
}
