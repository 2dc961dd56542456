//! Slice families in singular-value space and their real critical points.
//!
//! Each family describes a subset `S` of `R^n`. For a data vector `y`, a
//! point `x` on `S` is critical when `x - y` is orthogonal to the tangent
//! space of `S` at `x`. Families backed by matrix sets are invariant under
//! coordinate permutations and sign flips; the plane families `Parabola`
//! and `Curve` drop that symmetry and serve as Euclidean chamber examples.
//!
//! Solvers are family-specific where closed forms exist (coordinate
//! subspaces, sign patterns, the degree-four polynomials of the modulus-one
//! determinant set, the cubics of the parabola pair) and fall back to
//! bivariate elimination plus Newton polish for general plane curves. Two
//! families with dedicated solvers, `DetMag` and `Parabola`, can also be
//! posed as `Curve` instances, which the tests use as an independent route.

use crate::config::Tolerances;
use crate::rmat;
use crate::rpoly::{self, quartic_discriminant, BiPoly, RPoly};
use serde::{Deserialize, Serialize};

/// Errors from family validation and critical point solving.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SliceError {
    /// Data vector length does not match the ambient dimension.
    #[error("data vector has length {got}, family lives in dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    /// Family parameters outside the supported range.
    #[error("unsupported family parameters: {0}")]
    Unsupported(String),
    /// The data vector violates a genericity requirement of the query.
    #[error("non-generic data: {0}")]
    NonGenericData(String),
    /// A numerical subroutine failed.
    #[error("solver failure: {0}")]
    Solver(String),
}

impl From<rpoly::RpolyError> for SliceError {
    fn from(e: rpoly::RpolyError) -> Self {
        SliceError::Solver(e.to_string())
    }
}

/// A subset of singular-value space (or of the plane, for the chamber
/// examples), selected by tag in the JSON wire form:
/// `{"family":"rank","n":3,"r":1}`, `{"family":"detmag"}`, and so on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum SliceFamily {
    /// Vectors with at most `r` nonzero coordinates: the singular value
    /// slice of matrices of rank at most `r`.
    Rank { n: usize, r: usize },
    /// All coordinates of modulus one: the slice of unitary matrices
    /// (square case) or of scaled isometries.
    AllOnes { n: usize },
    /// The plane set `x1 x2 = ±1`: the slice of 2x2 matrices whose
    /// determinant has modulus one.
    DetMag,
    /// The union of the parabolas `x2 = x1^2` and `x1 = x2^2`, a plane
    /// chamber example with two singular points.
    Parabola,
    /// The Fermat curve `x1^d + x2^d = 1` for even `d`.
    Fermat { n: usize, d: usize },
    /// The coordinate axes in `R^n`.
    Axes { n: usize },
    /// A general plane curve `f(x1, x2) = 0`; `coeffs[i][j]` multiplies
    /// `x1^i x2^j`.
    Curve { coeffs: Vec<Vec<f64>> },
}

/// A critical point of the squared distance from a data vector to a slice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdCriticalPoint {
    /// Coordinates on the slice.
    pub x: Vec<f64>,
    /// Squared Euclidean distance to the data vector.
    pub distance_sq: f64,
    /// Scaled stationarity residual: largest component of `x - y` along the
    /// tangent directions at `x`, relative to `1 + |x - y|`.
    pub residual: f64,
}

/// Outcome of the genericity tests for a data vector against a family.
///
/// `ok` covers the slice-level conditions that make the critical point
/// count well defined: discriminant margins, and no two critical points
/// merging into one (distinct branches arriving at the same node, or a
/// candidate sitting on a curve's singular locus where the stationarity
/// equations degenerate). `lift_ok` is the separate hypothesis needed to
/// carry slice points back to matrix space: coordinate moduli pairwise
/// distinct and nonzero. A vector can pass one and fail the other.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenericityReport {
    pub ok: bool,
    pub lift_ok: bool,
    pub diagnostics: Vec<String>,
}

/// Caps `n` for the combinatorial families; keeps subset and sign pattern
/// enumerations small.
pub const MAX_SLICE_DIM: usize = 16;

impl SliceFamily {
    /// Dimension of the space the family lives in.
    pub fn ambient_dim(&self) -> usize {
        match self {
            SliceFamily::Rank { n, .. }
            | SliceFamily::AllOnes { n }
            | SliceFamily::Fermat { n, .. }
            | SliceFamily::Axes { n } => *n,
            SliceFamily::DetMag | SliceFamily::Parabola | SliceFamily::Curve { .. } => 2,
        }
    }

    /// Whether the family is invariant under signed permutations and hence
    /// describes a set of matrices through its singular values.
    pub fn is_matrix_slice(&self) -> bool {
        !matches!(self, SliceFamily::Parabola | SliceFamily::Curve { .. })
    }

    /// Checks the family parameters themselves.
    pub fn validate(&self) -> Result<(), SliceError> {
        match self {
            SliceFamily::Rank { n, r } => {
                check_dim(*n)?;
                if *r == 0 || *r >= *n {
                    return Err(SliceError::Unsupported(format!(
                        "rank bound r = {r} must satisfy 0 < r < n = {n}"
                    )));
                }
            }
            SliceFamily::AllOnes { n } | SliceFamily::Axes { n } => check_dim(*n)?,
            SliceFamily::DetMag | SliceFamily::Parabola => {}
            SliceFamily::Fermat { n, d } => {
                if *n != 2 {
                    return Err(SliceError::Unsupported(format!(
                        "fermat slices are implemented in the plane only, got n = {n}"
                    )));
                }
                if *d < 2 || *d % 2 != 0 {
                    return Err(SliceError::Unsupported(format!(
                        "fermat exponent d = {d} must be even and at least 2"
                    )));
                }
                if *d > 6 {
                    return Err(SliceError::Unsupported(format!(
                        "fermat exponent d = {d} exceeds the elimination degree budget"
                    )));
                }
            }
            SliceFamily::Curve { coeffs } => {
                if coeffs.is_empty() || coeffs.iter().all(|r| r.iter().all(|&c| c == 0.0)) {
                    return Err(SliceError::Unsupported(
                        "curve coefficients are empty or all zero".into(),
                    ));
                }
                for row in coeffs {
                    if row.iter().any(|c| !c.is_finite()) {
                        return Err(SliceError::Unsupported(
                            "curve coefficients must be finite".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    fn check_data(&self, y: &[f64]) -> Result<(), SliceError> {
        self.validate()?;
        let n = self.ambient_dim();
        if y.len() != n {
            return Err(SliceError::DimensionMismatch {
                expected: n,
                got: y.len(),
            });
        }
        if y.iter().any(|c| !c.is_finite()) {
            return Err(SliceError::NonGenericData(
                "data vector has non-finite entries".into(),
            ));
        }
        Ok(())
    }

    /// Scaled violation of the defining conditions at `x`; zero on the set.
    pub fn membership_residual(&self, x: &[f64]) -> Result<f64, SliceError> {
        self.check_data(x)?;
        let norm = l2(x);
        Ok(match self {
            SliceFamily::Rank { r, .. } => {
                let mut mags: Vec<f64> = x.iter().map(|c| c.abs()).collect();
                mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
                let tail: f64 = mags[*r..].iter().map(|m| m * m).sum();
                tail.sqrt() / (1.0 + norm)
            }
            SliceFamily::AllOnes { .. } => x
                .iter()
                .map(|c| (c.abs() - 1.0).abs())
                .fold(0.0, f64::max),
            SliceFamily::DetMag => {
                let p = x[0] * x[1];
                (p - 1.0).abs().min((p + 1.0).abs()) / (1.0 + norm * norm)
            }
            SliceFamily::Parabola => {
                let a = (x[1] - x[0] * x[0]).abs();
                let b = (x[0] - x[1] * x[1]).abs();
                a.min(b) / (1.0 + norm * norm)
            }
            SliceFamily::Fermat { d, .. } => {
                let f = fermat_curve(*d);
                f.eval(x[0], x[1]).abs() / (1.0 + f.eval_scale(x[0], x[1]))
            }
            SliceFamily::Axes { .. } => {
                let max_sq = x.iter().map(|c| c * c).fold(0.0, f64::max);
                (norm * norm - max_sq).max(0.0).sqrt() / (1.0 + norm)
            }
            SliceFamily::Curve { coeffs } => {
                let f = BiPoly::new(coeffs.clone());
                f.eval(x[0], x[1]).abs() / (1.0 + f.eval_scale(x[0], x[1]))
            }
        })
    }

    /// Orthonormal basis of the tangent space at a smooth point `x` of the
    /// slice. Errors on singular points (stratum boundaries, curve nodes)
    /// where no single tangent space exists.
    pub fn tangent_basis(&self, x: &[f64], tol: &Tolerances) -> Result<Vec<Vec<f64>>, SliceError> {
        self.check_data(x)?;
        let n = self.ambient_dim();
        match self {
            SliceFamily::Rank { r, .. } => {
                let scale = x.iter().fold(0.0f64, |m, c| m.max(c.abs()));
                let support: Vec<usize> = (0..n)
                    .filter(|&i| x[i].abs() > tol.rank_threshold * scale.max(1e-300))
                    .collect();
                if support.len() != *r {
                    return Err(SliceError::NonGenericData(format!(
                        "point has {} nonzero coordinates, expected exactly {r}",
                        support.len()
                    )));
                }
                Ok(support.iter().map(|&i| unit_vector(n, i)).collect())
            }
            SliceFamily::AllOnes { .. } => Ok(Vec::new()),
            SliceFamily::DetMag => {
                // Both branches have gradient (x2, x1); rotate it.
                plane_tangent(x, x[1], x[0], tol)
            }
            SliceFamily::Parabola => {
                let on_a = (x[1] - x[0] * x[0]).abs();
                let on_b = (x[0] - x[1] * x[1]).abs();
                for s in [[0.0, 0.0], [1.0, 1.0]] {
                    if (x[0] - s[0]).hypot(x[1] - s[1]) <= tol.singular_exclusion * (1.0 + l2(x)) {
                        return Err(SliceError::NonGenericData(format!(
                            "({}, {}) is a singular point of the parabola pair",
                            s[0], s[1]
                        )));
                    }
                }
                if on_a <= on_b {
                    plane_tangent(x, -2.0 * x[0], 1.0, tol)
                } else {
                    plane_tangent(x, 1.0, -2.0 * x[1], tol)
                }
            }
            SliceFamily::Fermat { d, .. } => {
                let f = fermat_curve(*d);
                curve_tangent(&f, x, tol)
            }
            SliceFamily::Axes { .. } => {
                let scale = x.iter().fold(0.0f64, |m, c| m.max(c.abs()));
                let support: Vec<usize> = (0..n)
                    .filter(|&i| x[i].abs() > tol.rank_threshold * scale.max(1e-300))
                    .collect();
                if support.len() != 1 {
                    return Err(SliceError::NonGenericData(format!(
                        "point has {} nonzero coordinates, an axis point needs exactly 1",
                        support.len()
                    )));
                }
                Ok(vec![unit_vector(n, support[0])])
            }
            SliceFamily::Curve { coeffs } => {
                let f = BiPoly::new(coeffs.clone());
                curve_tangent(&f, x, tol)
            }
        }
    }

    /// All critical points of the squared distance from `y` to the slice,
    /// sorted lexicographically by coordinates.
    ///
    /// Non-generic data still solves when the family geometry allows it
    /// (points landing on singular loci are kept and surface through
    /// [`genericity_check`]); data making the critical set positive
    /// dimensional returns [`SliceError::NonGenericData`].
    pub fn ed_critical(
        &self,
        y: &[f64],
        tol: &Tolerances,
    ) -> Result<Vec<EdCriticalPoint>, SliceError> {
        self.check_data(y)?;
        let mut points = match self {
            SliceFamily::Rank { n, r } => subset_projections(*n, *r, y),
            SliceFamily::Axes { n } => subset_projections(*n, 1, y),
            SliceFamily::AllOnes { n } => sign_patterns(*n)
                .into_iter()
                .map(|x| EdCriticalPoint {
                    distance_sq: dist_sq(&x, y),
                    residual: 0.0,
                    x,
                })
                .collect(),
            SliceFamily::DetMag => detmag_solve(y, tol)?,
            SliceFamily::Parabola => parabola_solve(y, tol)?.points,
            SliceFamily::Fermat { d, .. } => {
                curve_solve(&fermat_curve(*d), y, tol)?.points
            }
            SliceFamily::Curve { coeffs } => {
                curve_solve(&BiPoly::new(coeffs.clone()), y, tol)?.points
            }
        };
        points.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap());
        Ok(points)
    }
}

/// Signed-permutation orbit of `x`, deduplicated and sorted. Matrix-backed
/// slices contain every image of each of their points; the tests drive
/// membership through this.
pub fn symmetrize_orbit(x: &[f64]) -> Result<Vec<Vec<f64>>, SliceError> {
    if x.len() > 6 {
        return Err(SliceError::Unsupported(format!(
            "orbit enumeration of dimension {} is too large",
            x.len()
        )));
    }
    let mut orbit = Vec::new();
    let mut perm: Vec<usize> = (0..x.len()).collect();
    permute_into(&mut perm, 0, &mut |p| {
        for mask in 0..(1usize << x.len()) {
            let image: Vec<f64> = p
                .iter()
                .enumerate()
                .map(|(i, &j)| if mask & (1 << i) != 0 { -x[j] } else { x[j] })
                .collect();
            orbit.push(image);
        }
    });
    orbit.sort_by(|a, b| a.partial_cmp(b).unwrap());
    orbit.dedup();
    Ok(orbit)
}

fn permute_into(perm: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == perm.len() {
        f(perm);
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        permute_into(perm, k + 1, f);
        perm.swap(k, i);
    }
}

/// Slice-level and lift-level genericity of `y` for the family.
pub fn genericity_check(
    family: &SliceFamily,
    y: &[f64],
    tol: &Tolerances,
) -> Result<GenericityReport, SliceError> {
    family.check_data(y)?;
    let mut diagnostics = Vec::new();
    let scale = y.iter().fold(0.0f64, |m, c| m.max(c.abs())).max(1.0);

    let mut lift_ok = true;
    for (i, &c) in y.iter().enumerate() {
        if c.abs() <= tol.genericity * scale {
            lift_ok = false;
            diagnostics.push(format!("|y[{i}]| is numerically zero; lifting needs it nonzero"));
        }
    }
    for i in 0..y.len() {
        for j in (i + 1)..y.len() {
            if (y[i].abs() - y[j].abs()).abs() <= tol.genericity * scale {
                lift_ok = false;
                diagnostics.push(format!(
                    "|y[{i}]| and |y[{j}]| coincide; lifting needs distinct moduli"
                ));
            }
        }
    }

    let ok = match family {
        SliceFamily::Rank { .. } | SliceFamily::Axes { .. } => {
            let mut ok = true;
            for (i, &c) in y.iter().enumerate() {
                if c.abs() <= tol.genericity * scale {
                    ok = false;
                    diagnostics.push(format!(
                        "y[{i}] vanishes: the nearest stratum point degenerates"
                    ));
                }
            }
            ok
        }
        SliceFamily::AllOnes { .. } => true,
        SliceFamily::DetMag => {
            let (dp, dm) = detmag_branch_discriminants(y);
            let margin = tol.genericity * (1.0 + scale.powi(6));
            let mut ok = true;
            if dp.abs() <= margin {
                ok = false;
                diagnostics.push(format!("positive-branch discriminant {dp:.3e} is on a wall"));
            }
            if dm.abs() <= margin {
                ok = false;
                diagnostics.push(format!("negative-branch discriminant {dm:.3e} is on a wall"));
            }
            ok
        }
        SliceFamily::Parabola => {
            let (m1, m2) = parabola_margins(y);
            let margin = tol.genericity * (1.0 + scale.powi(3));
            let mut ok = true;
            if m1.abs() <= margin {
                ok = false;
                diagnostics.push(format!("first parabola margin {m1:.3e} is on the evolute"));
            }
            if m2.abs() <= margin {
                ok = false;
                diagnostics.push(format!("second parabola margin {m2:.3e} is on the evolute"));
            }
            let outcome = parabola_solve(y, tol)?;
            if !outcome.singular_hits.is_empty() {
                ok = false;
                diagnostics.extend(outcome.singular_hits);
            }
            ok
        }
        SliceFamily::Fermat { d, .. } => {
            if *d >= 6 {
                diagnostics.push(
                    "degree-six elimination sits at the accuracy boundary of double precision"
                        .into(),
                );
            }
            let outcome = curve_solve(&fermat_curve(*d), y, tol)?;
            report_curve_outcome(&outcome, &mut diagnostics)
        }
        SliceFamily::Curve { coeffs } => {
            let outcome = curve_solve(&BiPoly::new(coeffs.clone()), y, tol)?;
            report_curve_outcome(&outcome, &mut diagnostics)
        }
    };

    Ok(GenericityReport {
        ok,
        lift_ok,
        diagnostics,
    })
}

fn report_curve_outcome(outcome: &CurveOutcome, diagnostics: &mut Vec<String>) -> bool {
    diagnostics.extend(outcome.singular_hits.iter().cloned());
    diagnostics.extend(outcome.warnings.iter().cloned());
    outcome.singular_hits.is_empty() && outcome.warnings.is_empty()
}

// ── DetMag: the two hyperbola branches ──────────────────────────────────

/// Branch polynomials of the stationarity condition on `x1 x2 = ±1`:
/// parametrize the positive branch as `(t, 1/t)` and the negative one as
/// `(t, -1/t)`; clearing denominators gives one quartic in `t` per branch.
pub fn detmag_branch_polys(y: &[f64]) -> (RPoly, RPoly) {
    let plus = RPoly::new(vec![-1.0, y[1], 0.0, -y[0], 1.0]);
    let minus = RPoly::new(vec![-1.0, -y[1], 0.0, -y[0], 1.0]);
    (plus, minus)
}

/// Discriminants of the two branch quartics, on the scale where the
/// discriminant of `t^4 - 1` is `-256`.
pub fn detmag_branch_discriminants(y: &[f64]) -> (f64, f64) {
    let (p, m) = detmag_branch_polys(y);
    (
        quartic_discriminant(&p).expect("branch polynomial has degree 4"),
        quartic_discriminant(&m).expect("branch polynomial has degree 4"),
    )
}

fn detmag_solve(y: &[f64], tol: &Tolerances) -> Result<Vec<EdCriticalPoint>, SliceError> {
    let (plus, minus) = detmag_branch_polys(y);
    let mut points = Vec::new();
    for (q, sign) in [(plus, 1.0), (minus, -1.0)] {
        for t in rpoly::real_roots(&q, tol)? {
            // q(0) = -1, so roots stay away from zero and the cofactor is
            // safe to form.
            let x = vec![t, sign / t];
            let tangent = plane_tangent(&x, x[1], x[0], tol)?;
            points.push(EdCriticalPoint {
                distance_sq: dist_sq(&x, y),
                residual: stationarity_residual(&x, y, &tangent),
                x,
            });
        }
    }
    Ok(points)
}

// ── Parabola pair: one cubic per branch ─────────────────────────────────

/// Stationarity cubics of the two parabola branches: points `(t, t^2)` of
/// the first branch satisfy `2t^3 + (1 - 2 y2) t - y1 = 0`, and points
/// `(s^2, s)` of the second satisfy the mirror cubic.
pub fn parabola_branch_polys(y: &[f64]) -> (RPoly, RPoly) {
    let a = RPoly::new(vec![-y[0], 1.0 - 2.0 * y[1], 0.0, 2.0]);
    let b = RPoly::new(vec![-y[1], 1.0 - 2.0 * y[0], 0.0, 2.0]);
    (a, b)
}

/// Signed distances of `y` from the two evolute walls: the first branch
/// contributes three critical points instead of one exactly when
/// `16 (y2 - 1/2)^3 - 27 y1^2 > 0`, and the margin for the second branch
/// swaps the roles of the coordinates. Up to a positive factor these are
/// the discriminants of the branch cubics.
pub fn parabola_margins(y: &[f64]) -> (f64, f64) {
    let m1 = 16.0 * (y[1] - 0.5).powi(3) - 27.0 * y[0] * y[0];
    let m2 = 16.0 * (y[0] - 0.5).powi(3) - 27.0 * y[1] * y[1];
    (m1, m2)
}

struct ParabolaOutcome {
    points: Vec<EdCriticalPoint>,
    singular_hits: Vec<String>,
}

fn parabola_solve(y: &[f64], tol: &Tolerances) -> Result<ParabolaOutcome, SliceError> {
    let (a, b) = parabola_branch_polys(y);
    let mut first: Vec<Vec<f64>> = Vec::new();
    let mut second: Vec<Vec<f64>> = Vec::new();
    let mut points: Vec<EdCriticalPoint> = Vec::new();
    let mut push = |x: Vec<f64>, tangent: [f64; 2], arrivals: &mut Vec<Vec<f64>>| {
        let norm = (tangent[0] * tangent[0] + tangent[1] * tangent[1]).sqrt();
        let t = vec![vec![tangent[0] / norm, tangent[1] / norm]];
        arrivals.push(x.clone());
        points.push(EdCriticalPoint {
            distance_sq: dist_sq(&x, y),
            residual: stationarity_residual(&x, y, &t),
            x,
        });
    };
    for t in rpoly::real_roots(&a, tol)? {
        push(vec![t, t * t], [1.0, 2.0 * t], &mut first);
    }
    for s in rpoly::real_roots(&b, tol)? {
        push(vec![s * s, s], [2.0 * s, 1.0], &mut second);
    }
    // The branches cross only at (0, 0) and (1, 1). A critical point there
    // is still one well-defined point when a single branch produces it;
    // the per-branch count only breaks when both branches arrive and the
    // merge below swallows one of the two. That collision is the
    // degeneracy worth flagging.
    let mut singular_hits = Vec::new();
    for p in &first {
        for q in &second {
            let r = tol.cluster_radius * (1.0 + l2(q));
            if (p[0] - q[0]).hypot(p[1] - q[1]) <= r {
                let node = if p[0] > 0.5 { "(1, 1)" } else { "(0, 0)" };
                singular_hits.push(format!(
                    "both branches send a critical point onto the singular point {node}"
                ));
            }
        }
    }
    points.sort_by(|p, q| p.x.partial_cmp(&q.x).unwrap());
    points.dedup_by(|p, q| {
        let r = tol.cluster_radius * (1.0 + l2(&q.x));
        (p.x[0] - q.x[0]).hypot(p.x[1] - q.x[1]) <= r
    });
    Ok(ParabolaOutcome {
        points,
        singular_hits,
    })
}

// ── General plane curves: elimination plus Newton polish ────────────────

/// The Fermat curve `x1^d + x2^d - 1` as a coefficient grid.
pub fn fermat_curve(d: usize) -> BiPoly {
    let mut grid = vec![vec![0.0; d + 1]; d + 1];
    grid[0][0] = -1.0;
    grid[d][0] = 1.0;
    grid[0][d] = 1.0;
    BiPoly::new(grid)
}

struct CurveOutcome {
    points: Vec<EdCriticalPoint>,
    singular_hits: Vec<String>,
    warnings: Vec<String>,
}

/// Critical points of the distance from `y` to `{f = 0}`: eliminate `x2`
/// from `f` and the turning condition
/// `g = (x1 - y1) df/dx2 - (x2 - y2) df/dx1`, back-substitute each root,
/// then polish every candidate on the exact system. Candidates on singular
/// curve points (vanishing gradient) are excluded and reported.
fn curve_solve(f: &BiPoly, y: &[f64], tol: &Tolerances) -> Result<CurveOutcome, SliceError> {
    let f1 = f.d_x1();
    let f2 = f.d_x2();
    let x1_shift = BiPoly::monomial(1.0, 1, 0).add(&BiPoly::monomial(-y[0], 0, 0));
    let x2_shift = BiPoly::monomial(1.0, 0, 1).add(&BiPoly::monomial(-y[1], 0, 0));
    let g = x1_shift.mul(&f2).sub(&x2_shift.mul(&f1));
    if g.is_zero() {
        return Err(SliceError::NonGenericData(
            "stationarity condition vanishes identically".into(),
        ));
    }
    let g1 = g.d_x1();
    let g2 = g.d_x2();
    let f11 = f1.d_x1();
    let f12 = f1.d_x2();
    let f21 = f2.d_x1();
    let f22 = f2.d_x2();

    let res = rpoly::resultant_x2(f, &g, tol)?;
    if res.poly.is_zero() {
        return Err(SliceError::NonGenericData(
            "elimination collapsed: the critical set is positive dimensional".into(),
        ));
    }
    let xi_roots = rpoly::real_roots_with_floor(&res.poly, tol, res.value_noise)?;

    let mut warnings = Vec::new();
    let mut singular_hits = Vec::new();
    let mut points: Vec<EdCriticalPoint> = Vec::new();
    for xi in xi_roots {
        let slice = RPoly::new(f.at_x1(xi));
        if slice.is_zero() {
            warnings.push(format!(
                "the curve contains the whole vertical line x1 = {xi:.6}"
            ));
            continue;
        }
        if slice.degree() == 0 {
            // No point of the curve above this root: it came from the
            // leading-coefficient locus of the elimination.
            continue;
        }
        for eta in rpoly::real_roots(&slice, tol)? {
            let start = (xi, eta);
            let polished = newton_2d(f, &g, &f1, &f2, &g1, &g2, start, tol);
            let (px, py) = match polished {
                Some(p) => p,
                None => {
                    // Keep the unpolished candidate only if it already
                    // satisfies the turning condition to back-substitution
                    // accuracy; otherwise it pairs a root with the wrong
                    // branch.
                    let gv = g.eval(xi, eta).abs();
                    if gv <= tol.back_substitution * (1.0 + g.eval_scale(xi, eta)) {
                        warnings.push(format!(
                            "candidate ({xi:.6}, {eta:.6}) accepted without polish"
                        ));
                        (xi, eta)
                    } else {
                        continue;
                    }
                }
            };
            let grad = f1.eval(px, py).hypot(f2.eval(px, py));
            let grad_scale = 1.0 + f1.eval_scale(px, py) + f2.eval_scale(px, py);
            if grad <= tol.singular_exclusion * grad_scale {
                singular_hits.push(format!(
                    "critical candidate ({px:.6}, {py:.6}) lies on a singular point of the curve"
                ));
                continue;
            }
            // A node defeats the direct gradient test: every singular curve
            // point solves the critical system, and the polish above stalls
            // a square-root-of-residual distance away, where the gradient
            // has already regrown. Polish the gradient system instead; a
            // candidate in the basin of an on-curve gradient zero is the
            // node itself.
            if let Some((sx, sy)) = newton_2d(&f1, &f2, &f11, &f12, &f21, &f22, (px, py), tol) {
                let node_dist = (px - sx).hypot(py - sy);
                let node_grad_scale = 1.0 + f1.eval_scale(sx, sy) + f2.eval_scale(sx, sy);
                if node_dist <= 10.0 * tol.cluster_radius * (1.0 + px.hypot(py))
                    && f1.eval(sx, sy).hypot(f2.eval(sx, sy))
                        <= tol.singular_exclusion * node_grad_scale
                    && f.eval(sx, sy).abs()
                        <= tol.back_substitution * (1.0 + f.eval_scale(sx, sy))
                {
                    singular_hits.push(format!(
                        "critical candidate ({px:.6}, {py:.6}) lies on a singular point of the curve"
                    ));
                    continue;
                }
            }
            let x = vec![px, py];
            let tangent = vec![normalize2(-f2.eval(px, py), f1.eval(px, py))];
            points.push(EdCriticalPoint {
                distance_sq: dist_sq(&x, y),
                residual: stationarity_residual(&x, y, &tangent),
                x,
            });
        }
    }
    points.sort_by(|p, q| p.x.partial_cmp(&q.x).unwrap());
    points.dedup_by(|p, q| {
        (p.x[0] - q.x[0]).hypot(p.x[1] - q.x[1]) <= tol.cluster_radius * (1.0 + l2(&q.x))
    });
    Ok(CurveOutcome {
        points,
        singular_hits,
        warnings,
    })
}

/// Damped Newton iteration on the square system `(f, g)`; `None` when the
/// iteration leaves the basin (diverges, stalls, or travels implausibly
/// far from the elimination candidate).
#[allow(clippy::too_many_arguments)]
fn newton_2d(
    f: &BiPoly,
    g: &BiPoly,
    f1: &BiPoly,
    f2: &BiPoly,
    g1: &BiPoly,
    g2: &BiPoly,
    start: (f64, f64),
    tol: &Tolerances,
) -> Option<(f64, f64)> {
    let (mut x, mut y) = start;
    let reach = 0.1 * (1.0 + start.0.hypot(start.1));
    for _ in 0..tol.newton_max_iter {
        let (fv, gv) = (f.eval(x, y), g.eval(x, y));
        let fs = 1.0 + f.eval_scale(x, y);
        let gs = 1.0 + g.eval_scale(x, y);
        if fv.abs() <= tol.newton_residual * fs && gv.abs() <= tol.newton_residual * gs {
            return Some((x, y));
        }
        let jac = vec![
            vec![f1.eval(x, y), f2.eval(x, y)],
            vec![g1.eval(x, y), g2.eval(x, y)],
        ];
        let step = rmat::lu_solve(jac, vec![-fv, -gv])?;
        let mut lambda = 1.0;
        let base = fv.abs() / fs + gv.abs() / gs;
        let mut advanced = false;
        for _ in 0..8 {
            let (nx, ny) = (x + lambda * step[0], y + lambda * step[1]);
            let trial = f.eval(nx, ny).abs() / (1.0 + f.eval_scale(nx, ny))
                + g.eval(nx, ny).abs() / (1.0 + g.eval_scale(nx, ny));
            if trial < base {
                x = nx;
                y = ny;
                advanced = true;
                break;
            }
            lambda *= 0.5;
        }
        if !advanced || !x.is_finite() || !y.is_finite() {
            return None;
        }
        if (x - start.0).hypot(y - start.1) > reach {
            return None;
        }
    }
    None
}

// ── Shared helpers ──────────────────────────────────────────────────────

fn check_dim(n: usize) -> Result<(), SliceError> {
    if n == 0 || n > MAX_SLICE_DIM {
        return Err(SliceError::Unsupported(format!(
            "dimension {n} outside 1..={MAX_SLICE_DIM}"
        )));
    }
    Ok(())
}

/// Projections of `y` onto every `r`-subset coordinate subspace.
fn subset_projections(n: usize, r: usize, y: &[f64]) -> Vec<EdCriticalPoint> {
    lex_subsets(n, r)
        .into_iter()
        .map(|subset| {
            let mut x = vec![0.0; n];
            for &i in &subset {
                x[i] = y[i];
            }
            EdCriticalPoint {
                distance_sq: dist_sq(&x, y),
                residual: 0.0,
                x,
            }
        })
        .collect()
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub(crate) fn lex_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            current.push(i);
            rec(i + 1, n, k, current, out);
            current.pop();
        }
    }
    rec(0, n, k, &mut current, &mut out);
    out
}

/// All vectors in `{-1, 1}^n`, in lexicographic order.
fn sign_patterns(n: usize) -> Vec<Vec<f64>> {
    (0..(1usize << n))
        .map(|mask| {
            (0..n)
                .map(|i| if mask & (1 << (n - 1 - i)) != 0 { 1.0 } else { -1.0 })
                .collect()
        })
        .collect()
}

fn unit_vector(n: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i] = 1.0;
    v
}

fn l2(x: &[f64]) -> f64 {
    x.iter().map(|c| c * c).sum::<f64>().sqrt()
}

fn dist_sq(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

fn normalize2(a: f64, b: f64) -> Vec<f64> {
    let n = a.hypot(b);
    vec![a / n, b / n]
}

/// Largest component of `x - y` along the tangent directions, scaled.
fn stationarity_residual(x: &[f64], y: &[f64], tangent: &[Vec<f64>]) -> f64 {
    let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let scale = 1.0 + l2(&diff);
    tangent
        .iter()
        .map(|t| t.iter().zip(&diff).map(|(a, b)| a * b).sum::<f64>().abs())
        .fold(0.0, f64::max)
        / scale
}

/// Tangent line of a plane set with gradient `(gx, gy)` at `x`.
fn plane_tangent(x: &[f64], gx: f64, gy: f64, tol: &Tolerances) -> Result<Vec<Vec<f64>>, SliceError> {
    let norm = gx.hypot(gy);
    if norm <= tol.singular_exclusion * (1.0 + l2(x)) {
        return Err(SliceError::NonGenericData(format!(
            "gradient vanishes at ({}, {})",
            x[0], x[1]
        )));
    }
    Ok(vec![vec![-gy / norm, gx / norm]])
}

fn curve_tangent(f: &BiPoly, x: &[f64], tol: &Tolerances) -> Result<Vec<Vec<f64>>, SliceError> {
    let f1 = f.d_x1().eval(x[0], x[1]);
    let f2 = f.d_x2().eval(x[0], x[1]);
    let scale = 1.0 + f.d_x1().eval_scale(x[0], x[1]) + f.d_x2().eval_scale(x[0], x[1]);
    if f1.hypot(f2) <= tol.singular_exclusion * scale {
        return Err(SliceError::NonGenericData(format!(
            "curve is singular at ({}, {})",
            x[0], x[1]
        )));
    }
    Ok(vec![normalize2(-f2, f1)])
}
