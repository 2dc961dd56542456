//! Centralized numerical tolerances.
//!
//! Every threshold used by the solvers lives here so that a single record
//! documents the accuracy contract of the whole crate. Values are relative
//! unless the doc comment says otherwise; routines scale them by a problem
//! size before comparing.

/// Tolerance bundle shared by all modules.
///
/// The defaults are tuned for `f64` on problems with `n, t <= 64` and are the
/// constants the integration suite pins itself against. Callers may loosen or
/// tighten individual fields, but the invariants documented on each solver
/// assume the defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    /// Unitarity defect `max(|U*U - I|, |V*V - I|)_F` allowed per factor,
    /// scaled by the matrix side length.
    pub svd_orthonormality: f64,
    /// Reconstruction defect `|U diag(sigma) V* - A|_F` allowed, scaled by
    /// `max(1, |A|_F)`.
    pub svd_reconstruction: f64,
    /// Jacobi rotation skip threshold: an off-diagonal Gram entry below
    /// `svd_sweep * cols * sqrt(app * aqq)` reads as already orthogonal.
    /// The column factor keeps inner-product rounding noise from driving
    /// rotations forever.
    pub svd_sweep: f64,
    /// Maximum Jacobi sweeps before giving up.
    pub svd_max_sweeps: usize,
    /// Singular values below `rank_threshold * sigma_1` count as zero when a
    /// numerical rank is needed.
    pub rank_threshold: f64,
    /// Rank decisions on stacked tangent generators: singular values below
    /// `frame_rank * s_1` do not count toward the frame rank.
    pub frame_rank: f64,
    /// Genericity margin: singular value gaps, discriminant magnitudes and
    /// root separations must exceed this (relative to the data scale).
    pub genericity: f64,
    /// Polynomial degeneracy: a coefficient below `poly_trim` times the
    /// max-norm of the coefficient vector is treated as zero.
    pub poly_trim: f64,
    /// Target residual `|p(r)| <= root_residual * scale(p, r)` for refined
    /// polynomial roots.
    pub root_residual: f64,
    /// Critical points closer than this in the max norm are one cluster.
    pub cluster_radius: f64,
    /// Membership residual allowed for a point reported on a slice.
    pub membership: f64,
    /// Orthogonality residual allowed between `x - y` and a slice tangent.
    pub orthogonality: f64,
    /// Plane-curve points with gradient norm below
    /// `singular_exclusion * scale` sit on the singular locus and are
    /// excluded from curve solves.
    pub singular_exclusion: f64,
    /// Back-substitution filter: candidates keep only if the second curve
    /// evaluates below `back_substitution * scale`.
    pub back_substitution: f64,
    /// Newton convergence target for the Lagrange multiplier solver,
    /// relative to the data scale.
    pub newton_residual: f64,
    /// Maximum Newton iterations per start.
    pub newton_max_iter: usize,
    /// Multistart count for the brute-force solver.
    pub newton_starts: usize,
    /// Additive guard in residual denominators so `0/0` reads as `0`.
    pub residual_guard: f64,
    /// Hard cap on resultant degrees; beyond this the monomial basis loses
    /// too much accuracy in `f64`.
    pub max_resultant_degree: usize,
    /// Hard cap on the subset count `C(m, r)` expanded by distance
    /// polynomials.
    pub max_hd_poly_rows: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            svd_orthonormality: 1e-12,
            svd_reconstruction: 1e-12,
            svd_sweep: 1e-15,
            svd_max_sweeps: 64,
            rank_threshold: 1e-10,
            frame_rank: 1e-9,
            genericity: 1e-6,
            poly_trim: 1e-12,
            root_residual: 1e-12,
            cluster_radius: 1e-6,
            membership: 1e-9,
            orthogonality: 1e-8,
            singular_exclusion: 1e-8,
            back_substitution: 1e-7,
            newton_residual: 1e-11,
            newton_max_iter: 100,
            newton_starts: 200,
            residual_guard: 1e-300,
            max_resultant_degree: 64,
            max_hd_poly_rows: 16,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_positive_and_sane() {
        let t = Tolerances::default();
        assert!(t.svd_orthonormality > 0.0 && t.svd_orthonormality < 1e-6);
        assert!(t.cluster_radius > 0.0);
        assert!(t.newton_starts >= 1);
        assert!(t.max_hd_poly_rows >= 4);
        assert!(t.residual_guard > 0.0 && t.residual_guard < f64::MIN_POSITIVE * 1e10);
    }
}
