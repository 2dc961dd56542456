//! Real univariate polynomials and bivariate resultants.
//!
//! Root counting goes through Sturm chains built with max-norm-scaled
//! remainders, so chains stay conditioned for the quartic/cubic/resultant
//! degrees this crate works at. Root isolation is Sturm-guided bisection
//! refined by a damped Newton polish. Bivariate elimination uses the
//! Sylvester determinant evaluated at Chebyshev nodes and interpolated back
//! to monomial coefficients; beyond degree ~32 the monomial basis itself
//! loses accuracy in `f64`, which bounds the supported degrees.

use crate::config::Tolerances;
use crate::rmat;

/// Errors from polynomial queries.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RpolyError {
    /// The zero polynomial has no well-defined root set.
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    /// Degree-specific query on the wrong degree.
    #[error("expected degree {expected}, got {got}")]
    WrongDegree { expected: usize, got: usize },
    /// A degree bound exceeded the supported range.
    #[error("degree {degree} exceeds supported maximum {max}")]
    DegreeOverflow { degree: usize, max: usize },
    /// Sturm query endpoint sits on a root even after perturbation.
    #[error("polynomial vanishes at interval endpoint {at}")]
    DegenerateAtEndpoint { at: f64 },
    /// The computation lost all significant digits.
    #[error("ill-conditioned computation: {what}")]
    IllConditioned { what: String },
    /// Resultant elimination variable is absent from an input.
    #[error("input has no dependence on the elimination variable")]
    NoX2Dependence,
}

// ── Univariate polynomials ──────────────────────────────────────────────

/// Real polynomial with ascending coefficients: `coeffs[i]` multiplies
/// `t^i`. Leading coefficients at or below `1e-12` of the max-norm are
/// trimmed at construction, so `degree` reflects numerically significant
/// structure. The zero polynomial is stored as a single zero coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct RPoly {
    coeffs: Vec<f64>,
}

impl RPoly {
    /// Builds from ascending coefficients, trimming negligible leaders.
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut p = RPoly { coeffs };
        p.trim();
        p
    }

    /// Constant polynomial.
    pub fn constant(c: f64) -> Self {
        RPoly::new(vec![c])
    }

    /// Monic polynomial with the given real roots.
    pub fn from_roots(roots: &[f64]) -> Self {
        let mut coeffs = vec![1.0];
        for &r in roots {
            let mut next = vec![0.0; coeffs.len() + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= r * c;
            }
            coeffs = next;
        }
        RPoly::new(coeffs)
    }

    fn trim(&mut self) {
        let max = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let floor = Tolerances::default().poly_trim * max;
        while self.coeffs.len() > 1 && self.coeffs.last().unwrap().abs() <= floor {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(0.0);
        }
        if self.coeffs.len() == 1 && self.coeffs[0].abs() <= floor {
            self.coeffs[0] = 0.0;
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 0.0
    }

    pub fn max_norm(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Backward-error scale `sum_i |c_i| |x|^i` of evaluation at `x`.
    pub fn eval_scale(&self, x: f64) -> f64 {
        let ax = x.abs();
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * ax + c.abs())
    }

    pub fn derivative(&self) -> RPoly {
        if self.coeffs.len() == 1 {
            return RPoly::constant(0.0);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| c * i as f64)
            .collect();
        RPoly::new(coeffs)
    }

    pub fn scale(&self, s: f64) -> RPoly {
        RPoly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Divides by the max-norm so coefficients are O(1).
    pub fn normalized(&self) -> RPoly {
        let m = self.max_norm();
        if m == 0.0 {
            self.clone()
        } else {
            self.scale(1.0 / m)
        }
    }

    pub fn add(&self, rhs: &RPoly) -> RPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = vec![0.0; len];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        for (i, &c) in rhs.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        RPoly::new(coeffs)
    }

    pub fn sub(&self, rhs: &RPoly) -> RPoly {
        self.add(&rhs.scale(-1.0))
    }

    pub fn mul(&self, rhs: &RPoly) -> RPoly {
        if self.is_zero() || rhs.is_zero() {
            return RPoly::constant(0.0);
        }
        let mut coeffs = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        RPoly::new(coeffs)
    }

    /// Euclidean division `self = q * d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &RPoly) -> Result<(RPoly, RPoly), RpolyError> {
        if d.is_zero() {
            return Err(RpolyError::ZeroPolynomial);
        }
        let dd = d.degree();
        if self.degree() < dd || self.is_zero() {
            return Ok((RPoly::constant(0.0), self.clone()));
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0.0; self.degree() - dd + 1];
        let lead = d.coeffs[dd];
        for k in (dd..rem.len()).rev() {
            let f = rem[k] / lead;
            quot[k - dd] = f;
            if f == 0.0 {
                continue;
            }
            for (j, &dc) in d.coeffs.iter().enumerate() {
                rem[k - dd + j] -= f * dc;
            }
            rem[k] = 0.0;
        }
        rem.truncate(dd.max(1));
        Ok((RPoly::new(quot), RPoly::new(rem)))
    }
}

/// Degree of `gcd(p, p')` measured with max-norm-scaled Euclidean steps; a
/// positive value means `p` has a numerically multiple root.
pub fn square_defect(p: &RPoly) -> usize {
    if p.is_zero() || p.degree() == 0 {
        return 0;
    }
    poly_gcd(&p.normalized(), &p.derivative().normalized()).degree()
}

/// True when `p` has a multiple real or complex root at working precision.
pub fn has_multiple_roots(p: &RPoly) -> bool {
    square_defect(p) > 0
}

fn poly_gcd(a: &RPoly, b: &RPoly) -> RPoly {
    let mut a = a.normalized();
    let mut b = b.normalized();
    if a.degree() < b.degree() {
        std::mem::swap(&mut a, &mut b);
    }
    // Remainders below this relative size read as exact divisibility.
    let zero_floor = 1e-9;
    while !b.is_zero() && b.degree() > 0 {
        let (_, r) = a.div_rem(&b).expect("b nonzero");
        if r.max_norm() <= zero_floor {
            return b;
        }
        a = b;
        b = r.normalized();
    }
    RPoly::constant(1.0)
}

// ── Sturm chains ────────────────────────────────────────────────────────

/// Sturm chain of `p`: successive negated remainders, each rescaled to unit
/// max-norm so the chain never drifts out of range.
pub fn sturm_chain(p: &RPoly) -> Result<Vec<RPoly>, RpolyError> {
    if p.is_zero() {
        return Err(RpolyError::ZeroPolynomial);
    }
    let mut chain = vec![p.normalized()];
    if p.degree() == 0 {
        return Ok(chain);
    }
    chain.push(p.derivative().normalized());
    while chain.last().unwrap().degree() > 0 {
        let k = chain.len();
        let (_, r) = chain[k - 2].div_rem(&chain[k - 1])?;
        if r.max_norm() <= 1e-12 {
            break;
        }
        if !r.coeffs().iter().all(|c| c.is_finite()) {
            return Err(RpolyError::IllConditioned {
                what: "non-finite Sturm remainder".into(),
            });
        }
        chain.push(r.scale(-1.0).normalized());
    }
    Ok(chain)
}

fn sign_changes(chain: &[RPoly], x: f64) -> usize {
    let mut changes = 0;
    let mut last = 0.0f64;
    for p in chain {
        let v = p.eval(x);
        if v == 0.0 {
            continue;
        }
        if last != 0.0 && (v > 0.0) != (last > 0.0) {
            changes += 1;
        }
        last = v;
    }
    changes
}

/// Nudges `x` away from a root of `p` by growing steps; errors if `p`
/// still vanishes after the allowed perturbation.
fn clear_endpoint(p: &RPoly, x: f64, width: f64) -> Result<f64, RpolyError> {
    let vanishes = |t: f64| p.eval(t).abs() <= 1e-13 * p.eval_scale(t).max(f64::MIN_POSITIVE);
    if !vanishes(x) {
        return Ok(x);
    }
    let base = 1e-9 * width.max(1.0);
    for k in 1..=6 {
        let delta = base * (10.0f64).powi(k - 1);
        for cand in [x - delta, x + delta] {
            if !vanishes(cand) {
                return Ok(cand);
            }
        }
    }
    Err(RpolyError::DegenerateAtEndpoint { at: x })
}

/// Number of distinct real roots of `p` in `(a, b]`.
///
/// Endpoints landing on a root are perturbed by a tolerance first;
/// [`RpolyError::DegenerateAtEndpoint`] reports endpoints that stay on a
/// root. Multiple roots count once: the remainder chain stops at the
/// gcd of `p` and `p'`, which makes it the generalized Sturm sequence
/// whose variation difference counts distinct roots. An explicit
/// square-free reduction would need a gcd-degree decision per step and
/// one misread near-degenerate remainder silently drops a root.
pub fn sturm_count(p: &RPoly, a: f64, b: f64) -> Result<usize, RpolyError> {
    if p.is_zero() {
        return Err(RpolyError::ZeroPolynomial);
    }
    if p.degree() == 0 {
        return Ok(0);
    }
    let chain = sturm_chain(p)?;
    let width = b - a;
    let aa = clear_endpoint(p, a, width)?;
    let bb = clear_endpoint(p, b, width)?;
    let va = sign_changes(&chain, aa);
    let vb = sign_changes(&chain, bb);
    Ok(va.saturating_sub(vb))
}

// ── Real root isolation and refinement ──────────────────────────────────

/// Cauchy root bound: all roots lie in `|t| <= 1 + max |c_i / c_n|`.
fn cauchy_bound(p: &RPoly) -> f64 {
    let lead = p.coeffs().last().unwrap().abs();
    let m = p.coeffs()[..p.degree()]
        .iter()
        .fold(0.0f64, |acc, c| acc.max(c.abs()));
    1.0 + m / lead
}

/// All distinct real roots of `p`, ascending.
///
/// Equivalent to [`real_roots_with_floor`] with a zero noise floor: only
/// machine-level dips of `|p|` count as roots without a sign change.
/// Multiple roots appear once; see [`has_multiple_roots`] for the
/// multiplicity flag.
pub fn real_roots(p: &RPoly, tol: &Tolerances) -> Result<Vec<f64>, RpolyError> {
    real_roots_with_floor(p, tol, 0.0)
}

/// Real roots of a polynomial whose values carry known noise.
///
/// `value_floor` bounds the absolute evaluation error of `p` (zero for
/// exact coefficients). Roots of the derivative partition the line into
/// monotone pieces; sign changes are refined by bisection plus Newton, and
/// a critical point where `|p|` stays inside the floor counts as a root of
/// the underlying exact polynomial (a near-multiple root whose factors the
/// noise has split). Candidates whose separating gap never rises above the
/// floor merge into one reported root, so a noisy multiple root comes back
/// once rather than as a cluster.
pub fn real_roots_with_floor(
    p: &RPoly,
    tol: &Tolerances,
    value_floor: f64,
) -> Result<Vec<f64>, RpolyError> {
    if p.is_zero() {
        return Err(RpolyError::ZeroPolynomial);
    }
    if p.degree() == 0 {
        return Ok(Vec::new());
    }
    if p.degree() > tol.max_resultant_degree {
        return Err(RpolyError::DegreeOverflow {
            degree: p.degree(),
            max: tol.max_resultant_degree,
        });
    }
    Ok(roots_monotone(&p.normalized(), tol, value_floor / p.max_norm()))
}

/// Relative threshold below which `|p|` reads as zero at `c`, for a
/// max-norm-one polynomial with relative value noise `floor`.
fn touch_threshold(p: &RPoly, c: f64, floor: f64) -> f64 {
    // Geometric coefficient-mass scale: machine-level dips are judged
    // against the polynomial's possible size at `c`, not its actual size,
    // so a noisy constant term cannot shrink the yardstick to nothing.
    let ac = c.abs();
    let mut g = 1.0f64;
    for _ in 0..p.degree() {
        g = g * ac + 1.0;
        if !g.is_finite() {
            g = f64::MAX / 8.0;
            break;
        }
    }
    (1e-13 * g).max(2.0 * floor)
}

/// Core recursion on normalized polynomials: derivative roots give the
/// monotone partition at every level, which stays stable when coefficients
/// carry noise (unlike gcd-based square-free reduction).
fn roots_monotone(p: &RPoly, tol: &Tolerances, floor: f64) -> Vec<f64> {
    let deg = p.degree();
    if deg == 0 {
        return Vec::new();
    }
    let c = p.coeffs();
    if deg == 1 {
        return vec![-c[0] / c[1]];
    }
    let crits = roots_monotone(&p.derivative().normalized(), tol, floor);
    let bound = cauchy_bound(p) * (1.0 + 1e-12) + 1e-9;
    let mut pts = vec![-bound];
    pts.extend(crits.iter().copied().filter(|c| c.abs() < bound));
    pts.push(bound);

    let mut cands: Vec<f64> = Vec::new();
    for &cp in &pts[1..pts.len() - 1] {
        if p.eval(cp).abs() <= touch_threshold(p, cp, floor) {
            cands.push(cp);
        }
    }
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (fa, fb) = (p.eval(a), p.eval(b));
        // Endpoints inside the floor are already candidates (or a cluster
        // edge); sign information there is meaningless.
        if fa.abs() <= touch_threshold(p, a, floor) || fb.abs() <= touch_threshold(p, b, floor) {
            continue;
        }
        if (fa > 0.0) != (fb > 0.0) {
            cands.push(refine_root(p, a, b, tol));
        }
    }
    cands.sort_by(|x, y| x.partial_cmp(y).unwrap());

    // Merge candidates whose gap never rises above the floor: they are one
    // root of the exact polynomial, split by noise. The representative is
    // the candidate with the smallest residual relative to its threshold.
    let mut roots: Vec<f64> = Vec::new();
    let mut i = 0;
    while i < cands.len() {
        let mut j = i;
        while j + 1 < cands.len() && gap_inside_floor(p, cands[j], cands[j + 1], floor) {
            j += 1;
        }
        let best = cands[i..=j]
            .iter()
            .copied()
            .min_by(|&x, &y| {
                let rx = p.eval(x).abs() / touch_threshold(p, x, floor);
                let ry = p.eval(y).abs() / touch_threshold(p, y, floor);
                rx.partial_cmp(&ry).unwrap()
            })
            .unwrap();
        roots.push(best);
        i = j + 1;
    }
    roots
}

fn gap_inside_floor(p: &RPoly, a: f64, b: f64, floor: f64) -> bool {
    if b - a <= 1e-12 * a.abs().max(b.abs()).max(1.0) {
        return true;
    }
    (1..8).all(|k| {
        let s = a + (b - a) * k as f64 / 8.0;
        p.eval(s).abs() <= touch_threshold(p, s, floor)
    })
}

/// Bisection to a short bracket, then Newton clamped to the bracket, with
/// bisection fallback whenever Newton stalls or escapes.
fn refine_root(p: &RPoly, mut a: f64, mut b: f64, tol: &Tolerances) -> f64 {
    let dp = p.derivative();
    let mut fa = p.eval(a);
    if fa == 0.0 {
        return a;
    }
    let fb = p.eval(b);
    if fb == 0.0 {
        return b;
    }
    if (fa > 0.0) == (fb > 0.0) {
        // No sign change (root at the open end or even cluster); fall back
        // to the midpoint after a short golden-section style shrink.
        return 0.5 * (a + b);
    }
    for _ in 0..20 {
        let m = 0.5 * (a + b);
        let fm = p.eval(m);
        if fm == 0.0 {
            return m;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    let mut x = 0.5 * (a + b);
    for _ in 0..60 {
        let fx = p.eval(x);
        if fx.abs() <= tol.root_residual * p.eval_scale(x).max(f64::MIN_POSITIVE) {
            return x;
        }
        if fx == 0.0 {
            return x;
        }
        if (fx > 0.0) == (fa > 0.0) {
            a = x;
            fa = fx;
        } else {
            b = x;
        }
        let d = dp.eval(x);
        let newton = x - fx / d;
        x = if d != 0.0 && newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
        if b - a <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
            return 0.5 * (a + b);
        }
    }
    x
}

// ── Quartic discriminant ────────────────────────────────────────────────

/// Discriminant of a degree-4 polynomial `a t^4 + b t^3 + c t^2 + d t + e`
/// in the classical normalization where `disc(t^4 - 1) = -256`.
///
/// Sign semantics for quartics with real coefficients: positive means four
/// or zero real roots, negative means exactly two, zero means a repeated
/// root.
pub fn quartic_discriminant(p: &RPoly) -> Result<f64, RpolyError> {
    if p.degree() != 4 {
        return Err(RpolyError::WrongDegree {
            expected: 4,
            got: p.degree(),
        });
    }
    let c = p.coeffs();
    let (e, d, cc, b, a) = (c[0], c[1], c[2], c[3], c[4]);
    Ok(256.0 * a.powi(3) * e.powi(3) - 192.0 * a.powi(2) * b * d * e.powi(2)
        - 128.0 * a.powi(2) * cc.powi(2) * e.powi(2)
        + 144.0 * a.powi(2) * cc * d.powi(2) * e
        - 27.0 * a.powi(2) * d.powi(4)
        + 144.0 * a * b.powi(2) * cc * e.powi(2)
        - 6.0 * a * b.powi(2) * d.powi(2) * e
        - 80.0 * a * b * cc.powi(2) * d * e
        + 18.0 * a * b * cc * d.powi(3)
        + 16.0 * a * cc.powi(4) * e
        - 4.0 * a * cc.powi(3) * d.powi(2)
        - 27.0 * b.powi(4) * e.powi(2)
        + 18.0 * b.powi(3) * cc * d * e
        - 4.0 * b.powi(3) * d.powi(3)
        - 4.0 * b.powi(2) * cc.powi(3) * e
        + b.powi(2) * cc.powi(2) * d.powi(2))
}

// ── Bivariate polynomials and resultants ────────────────────────────────

/// Real bivariate polynomial: `coeffs[i][j]` multiplies `x1^i x2^j`.
/// Trailing all-negligible rows and columns are trimmed at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct BiPoly {
    coeffs: Vec<Vec<f64>>,
}

impl BiPoly {
    /// Builds from a coefficient grid (rows indexed by the `x1` power).
    pub fn new(grid: Vec<Vec<f64>>) -> Self {
        let width = grid.iter().map(|r| r.len()).max().unwrap_or(0).max(1);
        let mut coeffs: Vec<Vec<f64>> = grid
            .into_iter()
            .map(|mut r| {
                r.resize(width, 0.0);
                r
            })
            .collect();
        if coeffs.is_empty() {
            coeffs.push(vec![0.0]);
        }
        let mut p = BiPoly { coeffs };
        p.trim();
        p
    }

    /// The monomial `c * x1^i x2^j`.
    pub fn monomial(c: f64, i: usize, j: usize) -> Self {
        let mut grid = vec![vec![0.0; j + 1]; i + 1];
        grid[i][j] = c;
        BiPoly::new(grid)
    }

    fn trim(&mut self) {
        let max = self
            .coeffs
            .iter()
            .flat_map(|r| r.iter().map(|c| c.abs()))
            .fold(0.0f64, f64::max);
        let floor = Tolerances::default().poly_trim * max;
        while self.coeffs.len() > 1
            && self.coeffs.last().unwrap().iter().all(|c| c.abs() <= floor)
        {
            self.coeffs.pop();
        }
        while self.coeffs[0].len() > 1
            && self
                .coeffs
                .iter()
                .all(|r| r.last().unwrap().abs() <= floor)
        {
            for r in self.coeffs.iter_mut() {
                r.pop();
            }
        }
        if max == 0.0 {
            self.coeffs = vec![vec![0.0]];
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|r| r.iter().all(|&c| c == 0.0))
    }

    /// Degree in `x1`.
    pub fn deg1(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Degree in `x2`.
    pub fn deg2(&self) -> usize {
        self.coeffs[0].len() - 1
    }

    pub fn eval(&self, x1: f64, x2: f64) -> f64 {
        let mut acc = 0.0;
        for row in self.coeffs.iter().rev() {
            let row_val = row.iter().rev().fold(0.0, |a, &c| a * x2 + c);
            acc = acc * x1 + row_val;
        }
        acc
    }

    /// Backward-error scale `sum |c_ij| |x1|^i |x2|^j`.
    pub fn eval_scale(&self, x1: f64, x2: f64) -> f64 {
        let (a1, a2) = (x1.abs(), x2.abs());
        let mut acc = 0.0;
        for row in self.coeffs.iter().rev() {
            let row_val = row.iter().rev().fold(0.0, |a, &c| a * a2 + c.abs());
            acc = acc * a1 + row_val;
        }
        acc
    }

    pub fn d_x1(&self) -> BiPoly {
        if self.deg1() == 0 {
            return BiPoly::new(vec![vec![0.0]]);
        }
        let grid = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, row)| row.iter().map(|&c| c * i as f64).collect())
            .collect();
        BiPoly::new(grid)
    }

    pub fn d_x2(&self) -> BiPoly {
        if self.deg2() == 0 {
            return BiPoly::new(vec![vec![0.0]]);
        }
        let grid = self
            .coeffs
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .skip(1)
                    .map(|(j, &c)| c * j as f64)
                    .collect()
            })
            .collect();
        BiPoly::new(grid)
    }

    pub fn add(&self, rhs: &BiPoly) -> BiPoly {
        let rows = self.coeffs.len().max(rhs.coeffs.len());
        let cols = self.coeffs[0].len().max(rhs.coeffs[0].len());
        let mut grid = vec![vec![0.0; cols]; rows];
        for (i, row) in self.coeffs.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                grid[i][j] += c;
            }
        }
        for (i, row) in rhs.coeffs.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                grid[i][j] += c;
            }
        }
        BiPoly::new(grid)
    }

    pub fn sub(&self, rhs: &BiPoly) -> BiPoly {
        self.add(&rhs.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> BiPoly {
        BiPoly::new(
            self.coeffs
                .iter()
                .map(|r| r.iter().map(|c| c * s).collect())
                .collect(),
        )
    }

    pub fn mul(&self, rhs: &BiPoly) -> BiPoly {
        if self.is_zero() || rhs.is_zero() {
            return BiPoly::new(vec![vec![0.0]]);
        }
        let rows = self.deg1() + rhs.deg1() + 1;
        let cols = self.deg2() + rhs.deg2() + 1;
        let mut grid = vec![vec![0.0; cols]; rows];
        for (i, row) in self.coeffs.iter().enumerate() {
            for (j, &a) in row.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (k, rrow) in rhs.coeffs.iter().enumerate() {
                    for (l, &b) in rrow.iter().enumerate() {
                        grid[i + k][j + l] += a * b;
                    }
                }
            }
        }
        BiPoly::new(grid)
    }

    /// Substitutes `x1` and returns the univariate polynomial in `x2` with
    /// formal degree `deg2` (leading zeros kept for Sylvester layouts).
    pub fn at_x1(&self, x1: f64) -> Vec<f64> {
        let d2 = self.deg2();
        let mut out = vec![0.0; d2 + 1];
        for j in 0..=d2 {
            let mut acc = 0.0;
            for row in self.coeffs.iter().rev() {
                acc = acc * x1 + row.get(j).copied().unwrap_or(0.0);
            }
            out[j] = acc;
        }
        out
    }
}

/// Sylvester determinant of two univariate polynomials given by ascending
/// coefficient vectors of formal degrees `len - 1`.
fn sylvester_det(f: &[f64], g: &[f64]) -> f64 {
    let m = f.len() - 1;
    let l = g.len() - 1;
    if m == 0 && l == 0 {
        return 1.0;
    }
    let size = m + l;
    let mut mat = vec![vec![0.0; size]; size];
    for row in 0..l {
        for (k, &c) in f.iter().enumerate() {
            mat[row][row + m - k] = c;
        }
    }
    for row in 0..m {
        for (k, &c) in g.iter().enumerate() {
            mat[l + row][row + l - k] = c;
        }
    }
    rmat::lu_det(mat)
}

/// Half-width of the Chebyshev evaluation window for resultants.
const CHEB_RADIUS: f64 = 4.0;

/// Eliminated polynomial together with its interpolation accuracy.
#[derive(Debug, Clone, PartialEq)]
pub struct Resultant {
    /// Monomial form in `x1`.
    pub poly: RPoly,
    /// Absolute bound on the evaluation error of `poly` on the window
    /// `[-4, 4]`, inherited from determinant rounding at the nodes. Feed
    /// this to [`real_roots_with_floor`]; a multiple root of the exact
    /// resultant is only recoverable up to a fractional power of it.
    pub value_noise: f64,
}

/// Resultant of `f` and `g` with respect to `x2`, as a polynomial in `x1`.
///
/// The Sylvester determinant at formal degrees `(deg2 f, deg2 g)` is
/// evaluated at `D + 1` Chebyshev nodes with
/// `D = deg1(f) deg2(g) + deg1(g) deg2(f)`, converted to Chebyshev
/// coefficients, trimmed, and expanded to monomials. The result is exact up
/// to scale: root locations and sign patterns are meaningful, the global
/// normalization follows the Sylvester convention.
pub fn resultant_x2(f: &BiPoly, g: &BiPoly, tol: &Tolerances) -> Result<Resultant, RpolyError> {
    if f.is_zero() || g.is_zero() {
        return Err(RpolyError::ZeroPolynomial);
    }
    if f.deg2() == 0 || g.deg2() == 0 {
        return Err(RpolyError::NoX2Dependence);
    }
    let degree_bound = f.deg1() * g.deg2() + g.deg1() * f.deg2();
    if degree_bound > tol.max_resultant_degree {
        return Err(RpolyError::DegreeOverflow {
            degree: degree_bound,
            max: tol.max_resultant_degree,
        });
    }
    let n = degree_bound + 1;
    let mut values = Vec::with_capacity(n);
    for k in 0..n {
        let theta = std::f64::consts::PI * (2.0 * k as f64 + 1.0) / (2.0 * n as f64);
        let u = theta.cos();
        let x1 = CHEB_RADIUS * u;
        let det = sylvester_det(&f.at_x1(x1), &g.at_x1(x1));
        if !det.is_finite() {
            return Err(RpolyError::IllConditioned {
                what: format!("Sylvester determinant overflowed at node {x1}"),
            });
        }
        values.push(det);
    }

    let value_noise =
        32.0 * f64::EPSILON * values.iter().fold(0.0f64, |m, w| m.max(w.abs()));

    // Values at Chebyshev roots -> Chebyshev coefficients (exact for
    // polynomials of degree < n).
    let mut cheb = vec![0.0; n];
    for (j, c) in cheb.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (k, &w) in values.iter().enumerate() {
            let theta = std::f64::consts::PI * (2.0 * k as f64 + 1.0) / (2.0 * n as f64);
            acc += w * (j as f64 * theta).cos();
        }
        *c = 2.0 * acc / n as f64;
    }
    cheb[0] *= 0.5;

    // Trim top coefficients that are pure interpolation noise before the
    // 2^degree conversion growth can amplify them.
    let cmax = cheb.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if cmax == 0.0 {
        return Ok(Resultant {
            poly: RPoly::constant(0.0),
            value_noise,
        });
    }
    let mut top = cheb.len();
    while top > 1 && cheb[top - 1].abs() <= 1e-13 * cmax {
        top -= 1;
    }
    cheb.truncate(top);

    // Chebyshev basis -> monomials in u via the T recurrence, then undo the
    // node scaling u = x1 / CHEB_RADIUS.
    let mut mono = vec![0.0; cheb.len()];
    let mut t_prev = vec![1.0];
    mono[0] += cheb[0];
    if cheb.len() > 1 {
        let mut t_cur = vec![0.0, 1.0];
        mono[1] += cheb[1];
        for cj in cheb.iter().skip(2) {
            let mut t_next = vec![0.0; t_cur.len() + 1];
            for (i, &c) in t_cur.iter().enumerate() {
                t_next[i + 1] += 2.0 * c;
            }
            for (i, &c) in t_prev.iter().enumerate() {
                t_next[i] -= c;
            }
            for (i, &c) in t_next.iter().enumerate() {
                mono[i] += cj * c;
            }
            t_prev = t_cur;
            t_cur = t_next;
        }
    }
    let mut scale = 1.0;
    for c in mono.iter_mut() {
        *c *= scale;
        scale /= CHEB_RADIUS;
    }
    Ok(Resultant {
        poly: RPoly::new(mono),
        value_noise,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn eval_and_derivative() {
        // p = t^3 - 2t + 1
        let p = RPoly::new(vec![1.0, -2.0, 0.0, 1.0]);
        assert_eq!(p.eval(2.0), 5.0);
        assert_eq!(p.derivative().coeffs(), &[-2.0, 0.0, 3.0]);
    }

    #[test]
    fn sturm_counts_on_quartics() {
        // t^4 - 1 has roots ±1.
        let p = RPoly::new(vec![-1.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(sturm_count(&p, -2.0, 2.0).unwrap(), 2);
        assert_eq!(sturm_count(&p, 0.0, 2.0).unwrap(), 1);
        // t^4 - 3t^3 + 3t - 1 = (t-1)(t+1)(t^2-3t+1) has 4 real roots.
        let q = RPoly::new(vec![-1.0, 3.0, 0.0, -3.0, 1.0]);
        assert_eq!(sturm_count(&q, -10.0, 10.0).unwrap(), 4);
        // Endpoint on a root gets perturbed, not miscounted: (0, 1] would
        // be ambiguous at both ends.
        assert_eq!(sturm_count(&q, -1.0, 1.0).unwrap() >= 1, true);
    }

    #[test]
    fn four_real_roots_match_closed_form() {
        let q = RPoly::new(vec![-1.0, 3.0, 0.0, -3.0, 1.0]);
        let roots = real_roots(&q, &tols()).unwrap();
        let s5 = 5.0f64.sqrt();
        let expect = [-1.0, (3.0 - s5) / 2.0, 1.0, (3.0 + s5) / 2.0];
        assert_eq!(roots.len(), 4);
        for (r, e) in roots.iter().zip(expect) {
            assert!((r - e).abs() < 1e-12, "{r} vs {e}");
        }
    }

    #[test]
    fn two_real_roots_match_sign_scan_oracle() {
        // Oracle: count sign changes of p on a dense grid first, then check
        // the Sturm-based root finder agrees.
        let p = RPoly::new(vec![-1.0, -3.0, 0.0, -3.0, 1.0]);
        let mut scan_count = 0;
        let mut prev = p.eval(-10.0);
        let steps = 200_000;
        for k in 1..=steps {
            let x = -10.0 + 20.0 * k as f64 / steps as f64;
            let v = p.eval(x);
            if prev != 0.0 && v != 0.0 && (prev > 0.0) != (v > 0.0) {
                scan_count += 1;
            }
            prev = v;
        }
        assert_eq!(scan_count, 2);
        let roots = real_roots(&p, &tols()).unwrap();
        assert_eq!(roots.len(), 2);
        for r in &roots {
            assert!(p.eval(*r).abs() <= 1e-10 * p.eval_scale(*r));
        }
    }

    #[test]
    fn cubic_with_only_origin_root() {
        // t(2t^2 + 1): one real root at 0.
        let p = RPoly::new(vec![0.0, 1.0, 0.0, 2.0]);
        let roots = real_roots(&p, &tols()).unwrap();
        assert_eq!(roots.len(), 1);
        assert!(roots[0].abs() < 1e-12);
    }

    #[test]
    fn multiple_roots_reported_once_and_flagged() {
        // (t-1)^2 (t+2) = t^3 - 3t + 2.
        let p = RPoly::new(vec![2.0, -3.0, 0.0, 1.0]);
        assert!(has_multiple_roots(&p));
        let roots = real_roots(&p, &tols()).unwrap();
        assert_eq!(roots.len(), 2);
        assert!((roots[0] + 2.0).abs() < 1e-9);
        assert!((roots[1] - 1.0).abs() < 1e-7);
        // A square-free quartic is not flagged.
        let q = RPoly::new(vec![-1.0, 3.0, 0.0, -3.0, 1.0]);
        assert!(!has_multiple_roots(&q));
    }

    #[test]
    fn zero_polynomial_is_an_error() {
        let z = RPoly::constant(0.0);
        assert!(matches!(
            real_roots(&z, &tols()),
            Err(RpolyError::ZeroPolynomial)
        ));
        assert!(matches!(
            sturm_count(&z, 0.0, 1.0),
            Err(RpolyError::ZeroPolynomial)
        ));
    }

    #[test]
    fn quartic_discriminant_frozen_values() {
        let p = RPoly::new(vec![-1.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(quartic_discriminant(&p).unwrap(), -256.0);
        let q = RPoly::new(vec![-1.0, 3.0, 0.0, -3.0, 1.0]);
        assert_eq!(quartic_discriminant(&q).unwrap(), 500.0);
        let r = RPoly::new(vec![-1.0, -3.0, 0.0, -3.0, 1.0]);
        assert_eq!(quartic_discriminant(&r).unwrap(), -8788.0);
        // (t-1)^2 (t^2+1) has a repeated root: discriminant 0.
        let s = RPoly::new(vec![1.0, -2.0, 2.0, -2.0, 1.0]);
        assert!(quartic_discriminant(&s).unwrap().abs() < 1e-12);
        let cubic = RPoly::new(vec![1.0, 0.0, 0.0, 1.0]);
        assert!(matches!(
            quartic_discriminant(&cubic),
            Err(RpolyError::WrongDegree { expected: 4, got: 3 })
        ));
    }

    #[test]
    fn discriminant_sign_matches_real_root_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..300 {
            let p = RPoly::new(vec![
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(0.5..2.0),
            ]);
            let disc = quartic_discriminant(&p).unwrap();
            if disc.abs() < 1e-3 {
                continue;
            }
            let count = real_roots(&p, &tols()).unwrap().len();
            if disc < 0.0 {
                assert_eq!(count, 2, "negative discriminant, poly {:?}", p);
            } else {
                assert!(count == 0 || count == 4, "positive discriminant, got {count}");
            }
        }
    }

    #[test]
    fn resultant_of_lines() {
        // f = x1 + x2, g = x1 - x2: resultant is ±2 x1.
        let f = BiPoly::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        let g = BiPoly::new(vec![vec![0.0, -1.0], vec![1.0, 0.0]]);
        let r = resultant_x2(&f, &g, &tols()).unwrap().poly;
        assert_eq!(r.degree(), 1);
        assert!(r.eval(0.0).abs() < 1e-12);
        assert!((r.coeffs()[1].abs() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn resultant_of_circle_and_axis() {
        // f = x1^2 + x2^2 - 1, g = x2: resultant ∝ x1^2 - 1.
        let f = BiPoly::new(vec![vec![-1.0, 0.0, 1.0], vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0]]);
        let g = BiPoly::new(vec![vec![0.0, 1.0]]);
        let r = resultant_x2(&f, &g, &tols()).unwrap().poly;
        let roots = real_roots(&r, &tols()).unwrap();
        assert_eq!(roots.len(), 2);
        assert!((roots[0] + 1.0).abs() < 1e-9);
        assert!((roots[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn resultant_of_symmetric_quartic_curve_pair() {
        // f = x1^4 + x2^4 - 1 and g = x1^3 x2 - x2^3 x1 share zeros with
        // x1 in {0, ±1, ±2^(-1/4)}: the exact resultant is
        // 4 x^16 - 8 x^12 + 5 x^8 - x^4, with a quadruple root at 0 and
        // double roots at ±2^(-1/4). Noise-floored extraction recovers each
        // location once, at accuracy set by the root multiplicity.
        let mut fg = vec![vec![0.0; 5]; 5];
        fg[0][0] = -1.0;
        fg[4][0] = 1.0;
        fg[0][4] = 1.0;
        let f = BiPoly::new(fg);
        let mut gg = vec![vec![0.0; 4]; 4];
        gg[3][1] = 1.0;
        gg[1][3] = -1.0;
        let g = BiPoly::new(gg);
        let r = resultant_x2(&f, &g, &tols()).unwrap();
        let expect_poly = RPoly::new(vec![
            0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 5.0, 0.0, 0.0, 0.0, -8.0, 0.0, 0.0, 0.0,
            4.0,
        ]);
        assert_eq!(r.poly.degree(), 16);
        for (got, want) in r.poly.coeffs().iter().zip(expect_poly.coeffs()) {
            assert!((got - want).abs() < 1e-3, "{got} vs {want}");
        }
        let roots = real_roots_with_floor(&r.poly, &tols(), r.value_noise).unwrap();
        let quarter = 2.0f64.powf(-0.25);
        let expect = [-1.0, -quarter, 0.0, quarter, 1.0];
        let slack = [1e-3, 8e-3, 7e-2, 8e-3, 1e-3];
        assert_eq!(roots.len(), 5, "roots {roots:?}");
        for ((r, e), s) in roots.iter().zip(expect).zip(slack) {
            assert!((r - e).abs() < s, "{r} vs {e}");
        }
    }

    #[test]
    fn resultant_vanishes_at_common_zeros_of_random_curves() {
        // Oracle: 2-D Newton multistart finds common zeros directly; the
        // interpolated resultant must vanish there within its noise bound.
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut checked = 0;
        for _ in 0..40 {
            let f = random_bipoly(&mut rng, 4, 4);
            let g = random_bipoly(&mut rng, 4, 4);
            if f.deg2() == 0 || g.deg2() == 0 {
                continue;
            }
            let r = match resultant_x2(&f, &g, &tols()) {
                Ok(r) => r,
                Err(_) => continue,
            };
            if r.poly.is_zero() {
                continue;
            }
            for zero in newton_common_zeros(&f, &g, &mut rng) {
                if zero.0.abs() > 3.9 {
                    // Outside the interpolation window the noise bound no
                    // longer applies.
                    continue;
                }
                let scale = r.poly.eval_scale(zero.0).max(r.poly.max_norm());
                let allowed = (1e-6 * scale).max(64.0 * r.value_noise);
                assert!(
                    r.poly.eval(zero.0).abs() <= allowed,
                    "resultant {} at x1 = {} vs allowance {}",
                    r.poly.eval(zero.0),
                    zero.0,
                    allowed
                );
                checked += 1;
            }
        }
        assert!(checked > 20, "oracle found too few common zeros: {checked}");
    }

    fn random_bipoly(rng: &mut ChaCha8Rng, d1: usize, d2: usize) -> BiPoly {
        BiPoly::new(
            (0..=d1)
                .map(|_| (0..=d2).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect(),
        )
    }

    fn newton_common_zeros(f: &BiPoly, g: &BiPoly, rng: &mut ChaCha8Rng) -> Vec<(f64, f64)> {
        let f1 = f.d_x1();
        let f2 = f.d_x2();
        let g1 = g.d_x1();
        let g2 = g.d_x2();
        let mut zeros: Vec<(f64, f64)> = Vec::new();
        for _ in 0..60 {
            let mut x = rng.gen_range(-1.5..1.5);
            let mut y = rng.gen_range(-1.5..1.5);
            let mut ok = false;
            for _ in 0..80 {
                let (fv, gv) = (f.eval(x, y), g.eval(x, y));
                if fv.abs() + gv.abs() <= 1e-12 * (f.eval_scale(x, y) + g.eval_scale(x, y)) {
                    ok = true;
                    break;
                }
                let j = vec![
                    vec![f1.eval(x, y), f2.eval(x, y)],
                    vec![g1.eval(x, y), g2.eval(x, y)],
                ];
                match crate::rmat::lu_solve(j, vec![-fv, -gv]) {
                    Some(step) => {
                        x += step[0];
                        y += step[1];
                        if !x.is_finite() || !y.is_finite() || x.abs() + y.abs() > 1e3 {
                            break;
                        }
                    }
                    None => break,
                }
            }
            if ok && zeros.iter().all(|z| (z.0 - x).abs().max((z.1 - y).abs()) > 1e-6) {
                zeros.push((x, y));
            }
        }
        zeros
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        // Expanding separated roots and re-finding them round-trips.
        #[test]
        fn prop_roots_roundtrip(seed in 0u64..10_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let count = 1 + (seed as usize % 5);
            let mut roots: Vec<f64> = Vec::new();
            while roots.len() < count {
                let r = rng.gen_range(-3.0..3.0);
                if roots.iter().all(|x| (x - r).abs() > 0.1) {
                    roots.push(r);
                }
            }
            roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let p = RPoly::from_roots(&roots);
            let found = real_roots(&p, &tols()).unwrap();
            prop_assert_eq!(found.len(), roots.len());
            for (f, e) in found.iter().zip(&roots) {
                prop_assert!((f - e).abs() < 1e-7, "{} vs {}", f, e);
            }
            // Sturm agrees on the full interval.
            prop_assert_eq!(sturm_count(&p, -4.0, 4.0).unwrap(), roots.len());
        }
    }
}
