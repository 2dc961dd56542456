//! Chamber decompositions of the data plane for the two plane families
//! whose critical point count jumps across explicit walls.
//!
//! For the modulus-one determinant set the walls are the vanishing loci of
//! the two branch discriminants; for the parabola pair they are the branch
//! evolutes. Both invariants are carried here in closed form, independent
//! of the polynomial discriminant routines, so the two routes can be
//! checked against each other. [`chamber_scan`] sweeps a rectangular grid,
//! compares the predicted count against the solver on every sample that
//! sits safely inside a chamber, and reports the outcome per sample.

use crate::config::Tolerances;
use crate::slices::{genericity_check, SliceError, SliceFamily};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Errors from chamber prediction and scanning.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ChambersError {
    /// Chamber structure is implemented for the plane families only.
    #[error("no chamber decomposition for family {0}")]
    UnsupportedFamily(String),
    /// Malformed scan grid.
    #[error("bad grid: {0}")]
    BadGrid(String),
    /// Failure propagated from the slice solver.
    #[error(transparent)]
    Slice(#[from] SliceError),
}

/// Absolute margin around a wall inside which a grid sample is skipped:
/// the predicted count is undefined on the wall itself, and the solver's
/// root clustering becomes scale-dependent right next to it.
pub const WALL_MARGIN: f64 = 1e-3;

/// Discriminants of the two branch quartics of the modulus-one determinant
/// set, as explicit polynomials in the data point. Normalized so that
/// `(3, 3)` gives `(500, -8788)`.
pub fn detmag_discriminants(y1: f64, y2: f64) -> (f64, f64) {
    let p = y1 * y2;
    let quartics = 27.0 * (y1.powi(4) + y2.powi(4));
    let dplus = -256.0 + 192.0 * p + 6.0 * p * p + 4.0 * p * p * p - quartics;
    let dminus = -256.0 - 192.0 * p + 6.0 * p * p - 4.0 * p * p * p - quartics;
    (dplus, dminus)
}

/// Evolute margins of the parabola pair; re-exported from the slice module
/// where the solver lives.
pub use crate::slices::parabola_margins;

/// Critical point count predicted from the chamber invariants alone;
/// `None` when the sample is within [`WALL_MARGIN`] of a wall.
pub fn detmag_predicted_count(dplus: f64, dminus: f64) -> Option<usize> {
    if dplus.abs() <= WALL_MARGIN || dminus.abs() <= WALL_MARGIN {
        return None;
    }
    Some(if dplus > 0.0 || dminus > 0.0 { 6 } else { 4 })
}

/// Predicted count for the parabola pair: each branch with positive margin
/// contributes three critical points instead of one.
pub fn parabola_predicted_count(m1: f64, m2: f64) -> Option<usize> {
    if m1.abs() <= WALL_MARGIN || m2.abs() <= WALL_MARGIN {
        return None;
    }
    Some(2 + 2 * [m1, m2].iter().filter(|&&m| m > 0.0).count())
}

/// Rectangular sample grid; both axes are inclusive and sampled uniformly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub y1_min: f64,
    pub y1_max: f64,
    pub y1_steps: usize,
    pub y2_min: f64,
    pub y2_max: f64,
    pub y2_steps: usize,
}

impl GridSpec {
    /// Uniform grid on `[min, max]^2` with `steps` samples per axis.
    pub fn square(min: f64, max: f64, steps: usize) -> Self {
        GridSpec {
            y1_min: min,
            y1_max: max,
            y1_steps: steps,
            y2_min: min,
            y2_max: max,
            y2_steps: steps,
        }
    }

    fn validate(&self) -> Result<(), ChambersError> {
        let vals = [self.y1_min, self.y1_max, self.y2_min, self.y2_max];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(ChambersError::BadGrid("bounds must be finite".into()));
        }
        if self.y1_steps == 0 || self.y2_steps == 0 {
            return Err(ChambersError::BadGrid("steps must be positive".into()));
        }
        if self.y1_steps.saturating_mul(self.y2_steps) > 1_000_000 {
            return Err(ChambersError::BadGrid(
                "grid exceeds one million samples".into(),
            ));
        }
        if self.y1_min > self.y1_max || self.y2_min > self.y2_max {
            return Err(ChambersError::BadGrid("min exceeds max".into()));
        }
        Ok(())
    }

    fn axis(min: f64, max: f64, steps: usize, i: usize) -> f64 {
        if steps == 1 {
            min
        } else {
            min + (max - min) * (i as f64) / ((steps - 1) as f64)
        }
    }
}

/// One grid sample: the invariants of the active family are filled in, the
/// rest stay empty. A skipped sample records why and carries no verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChamberSample {
    pub y1: f64,
    pub y2: f64,
    pub dplus: Option<f64>,
    pub dminus: Option<f64>,
    pub m1: Option<f64>,
    pub m2: Option<f64>,
    pub predicted: Option<usize>,
    pub observed: Option<usize>,
    pub agree: Option<bool>,
    pub skipped_reason: Option<String>,
}

/// Scan outcome: every sample in row-major grid order plus tallies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChamberReport {
    pub family: SliceFamily,
    pub samples: Vec<ChamberSample>,
    /// Samples that produced a prediction/observation pair.
    pub checked: usize,
    /// Checked samples where the two counts match.
    pub agreements: usize,
    pub skipped: usize,
}

impl ChamberReport {
    /// Whether every checked sample agreed.
    pub fn all_agree(&self) -> bool {
        self.checked == self.agreements
    }

    /// CSV rendering with a fixed header; floats carry 17 significant
    /// digits so the scan can be replayed exactly.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "y1,y2,Dplus,Dminus,m1,m2,predicted,observed,agree,skipped_reason\n",
        );
        for s in &self.samples {
            let f = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.16e}"));
            let u = |v: Option<usize>| v.map_or(String::new(), |x| x.to_string());
            let a = s
                .agree
                .map_or(String::new(), |x| x.to_string());
            out.push_str(&format!(
                "{:.16e},{:.16e},{},{},{},{},{},{},{},{}\n",
                s.y1,
                s.y2,
                f(s.dplus),
                f(s.dminus),
                f(s.m1),
                f(s.m2),
                u(s.predicted),
                u(s.observed),
                a,
                s.skipped_reason.clone().unwrap_or_default(),
            ));
        }
        out
    }
}

/// Sweeps the grid, predicting the critical point count from the chamber
/// invariants and counting what the solver actually finds. Samples are
/// skipped (never failed) when they sit within [`WALL_MARGIN`] of a wall
/// or when the slice-level genericity test rejects the data, e.g. when
/// both parabola branches send a critical point onto the same node and
/// the merged count drops below the per-branch sum.
pub fn chamber_scan(
    family: &SliceFamily,
    grid: &GridSpec,
    tol: &Tolerances,
) -> Result<ChamberReport, ChambersError> {
    match family {
        SliceFamily::DetMag | SliceFamily::Parabola => {}
        other => {
            return Err(ChambersError::UnsupportedFamily(format!("{other:?}")));
        }
    }
    grid.validate()?;

    let total = grid.y1_steps * grid.y2_steps;
    let samples: Vec<ChamberSample> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let i = idx / grid.y2_steps;
            let j = idx % grid.y2_steps;
            let y1 = GridSpec::axis(grid.y1_min, grid.y1_max, grid.y1_steps, i);
            let y2 = GridSpec::axis(grid.y2_min, grid.y2_max, grid.y2_steps, j);
            sample_point(family, y1, y2, tol)
        })
        .collect();

    let checked = samples.iter().filter(|s| s.agree.is_some()).count();
    let agreements = samples.iter().filter(|s| s.agree == Some(true)).count();
    let skipped = samples.iter().filter(|s| s.skipped_reason.is_some()).count();
    Ok(ChamberReport {
        family: family.clone(),
        samples,
        checked,
        agreements,
        skipped,
    })
}

fn sample_point(family: &SliceFamily, y1: f64, y2: f64, tol: &Tolerances) -> ChamberSample {
    let y = [y1, y2];
    let (dplus, dminus, m1, m2, predicted) = match family {
        SliceFamily::DetMag => {
            let (dp, dm) = detmag_discriminants(y1, y2);
            (Some(dp), Some(dm), None, None, detmag_predicted_count(dp, dm))
        }
        SliceFamily::Parabola => {
            let (m1, m2) = parabola_margins(&y);
            (None, None, Some(m1), Some(m2), parabola_predicted_count(m1, m2))
        }
        _ => unreachable!("gated by chamber_scan"),
    };
    let mut sample = ChamberSample {
        y1,
        y2,
        dplus,
        dminus,
        m1,
        m2,
        predicted,
        observed: None,
        agree: None,
        skipped_reason: None,
    };
    if predicted.is_none() {
        sample.skipped_reason = Some("near-wall".into());
        return sample;
    }
    match genericity_check(family, &y, tol) {
        Ok(report) if report.ok => {}
        Ok(_) => {
            sample.skipped_reason = Some("non-generic".into());
            return sample;
        }
        Err(_) => {
            sample.skipped_reason = Some("solver-error".into());
            return sample;
        }
    }
    match family.ed_critical(&y, tol) {
        Ok(points) => {
            sample.observed = Some(points.len());
            sample.agree = Some(points.len() == predicted.unwrap());
        }
        Err(_) => {
            sample.skipped_reason = Some("solver-error".into());
        }
    }
    sample
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rpoly;
    use crate::slices::{detmag_branch_discriminants, detmag_branch_polys, parabola_branch_polys};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn closed_form_discriminants_match_pinned_values() {
        let (dp, dm) = detmag_discriminants(3.0, 3.0);
        assert_eq!(dp, 500.0);
        assert_eq!(dm, -8788.0);
        let (m1, m2) = parabola_margins(&[3.0, 3.0]);
        assert_eq!((m1, m2), (7.0, 7.0));
        let (m1, m2) = parabola_margins(&[0.0, 1.0]);
        assert_eq!((m1, m2), (2.0, -29.0));
        let (m1, m2) = parabola_margins(&[0.0, 0.0]);
        assert_eq!((m1, m2), (-2.0, -2.0));
    }

    #[test]
    fn closed_form_matches_quartic_discriminant_route() {
        // Independent route: the generic degree-four discriminant of the
        // branch polynomials must reproduce the closed form.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let y1 = rng.gen_range(-4.0..4.0);
            let y2 = rng.gen_range(-4.0..4.0);
            let (dp, dm) = detmag_discriminants(y1, y2);
            let (qp, qm) = detmag_branch_discriminants(&[y1, y2]);
            let scale = 1.0 + dp.abs().max(dm.abs());
            assert!((dp - qp).abs() <= 1e-9 * scale, "{y1} {y2}: {dp} vs {qp}");
            assert!((dm - qm).abs() <= 1e-9 * scale, "{y1} {y2}: {dm} vs {qm}");
        }
    }

    #[test]
    fn margins_predict_branch_root_counts() {
        // The margin sign decides whether a branch polynomial has one or
        // three real roots (quartic: two or four).
        let tol = tols();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..200 {
            let y = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
            let (m1, m2) = parabola_margins(&y);
            if m1.abs() <= WALL_MARGIN || m2.abs() <= WALL_MARGIN {
                continue;
            }
            let (a, b) = parabola_branch_polys(&y);
            let ra = rpoly::real_roots(&a, &tol).unwrap().len();
            let rb = rpoly::real_roots(&b, &tol).unwrap().len();
            assert_eq!(ra, if m1 > 0.0 { 3 } else { 1 }, "y = {y:?}");
            assert_eq!(rb, if m2 > 0.0 { 3 } else { 1 }, "y = {y:?}");

            let (dp, dm) = detmag_discriminants(y[0], y[1]);
            if dp.abs() <= WALL_MARGIN || dm.abs() <= WALL_MARGIN {
                continue;
            }
            let (qp, qm) = detmag_branch_polys(&y);
            let np = rpoly::real_roots(&qp, &tol).unwrap().len();
            let nm = rpoly::real_roots(&qm, &tol).unwrap().len();
            assert_eq!(np, if dp > 0.0 { 4 } else { 2 }, "y = {y:?}");
            assert_eq!(nm, if dm > 0.0 { 4 } else { 2 }, "y = {y:?}");
        }
    }

    #[test]
    fn branch_discriminants_are_never_both_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..10_000 {
            let y1 = rng.gen_range(-6.0..6.0);
            let y2 = rng.gen_range(-6.0..6.0);
            let (dp, dm) = detmag_discriminants(y1, y2);
            assert!(
                !(dp > WALL_MARGIN && dm > WALL_MARGIN),
                "both discriminants positive at ({y1}, {y2}): {dp}, {dm}"
            );
        }
    }

    #[test]
    fn predicted_counts_follow_signs() {
        assert_eq!(detmag_predicted_count(500.0, -8788.0), Some(6));
        assert_eq!(detmag_predicted_count(-643.0, -4675.0), Some(4));
        assert_eq!(detmag_predicted_count(1e-4, -100.0), None);
        assert_eq!(parabola_predicted_count(7.0, 7.0), Some(6));
        assert_eq!(parabola_predicted_count(2.0, -29.0), Some(4));
        assert_eq!(parabola_predicted_count(-2.0, -2.0), Some(2));
        assert_eq!(parabola_predicted_count(0.0, 5.0), None);
    }

    #[test]
    fn detmag_scan_agrees_everywhere_off_the_walls() {
        let report = chamber_scan(
            &SliceFamily::DetMag,
            &GridSpec::square(-3.7, 3.7, 13),
            &tols(),
        )
        .unwrap();
        assert_eq!(report.samples.len(), 169);
        assert!(report.checked > 100, "only {} checked", report.checked);
        assert!(report.all_agree(), "{:?}", mismatches(&report));
        // Both chambers appear in the sweep.
        let counts: Vec<usize> = report.samples.iter().filter_map(|s| s.observed).collect();
        assert!(counts.contains(&4));
        assert!(counts.contains(&6));
    }

    #[test]
    fn parabola_scan_covers_all_three_chambers_and_skips_nodes() {
        let report = chamber_scan(
            &SliceFamily::Parabola,
            &GridSpec::square(-2.0, 3.0, 6),
            &tols(),
        )
        .unwrap();
        assert_eq!(report.samples.len(), 36);
        assert!(report.all_agree(), "{:?}", mismatches(&report));
        let counts: Vec<usize> = report.samples.iter().filter_map(|s| s.observed).collect();
        assert!(counts.contains(&2), "{counts:?}");
        assert!(counts.contains(&4), "{counts:?}");
        assert!(counts.contains(&6), "{counts:?}");
        // The integer grid hits data whose critical points land on the
        // nodes. Only the two samples where BOTH branches arrive at the
        // same node lose a point to the merge; they are skipped. Data
        // like (0, 1), where a single branch passes through a node, keeps
        // the per-branch count and must be checked.
        let at = |y1: f64, y2: f64| {
            report
                .samples
                .iter()
                .find(|s| s.y1 == y1 && s.y2 == y2)
                .unwrap()
                .clone()
        };
        assert_eq!(at(1.0, 1.0).skipped_reason.as_deref(), Some("non-generic"));
        assert_eq!(at(0.0, 0.0).skipped_reason.as_deref(), Some("non-generic"));
        assert!(at(3.0, 3.0).agree == Some(true));
        let node_through_one_branch = at(0.0, 1.0);
        assert_eq!(node_through_one_branch.observed, Some(4));
        assert_eq!(node_through_one_branch.agree, Some(true));
    }

    #[test]
    fn csv_round_trips_and_keeps_header_stable() {
        let report = chamber_scan(
            &SliceFamily::DetMag,
            &GridSpec::square(2.0, 3.0, 2),
            &tols(),
        )
        .unwrap();
        let csv = report.to_csv();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "y1,y2,Dplus,Dminus,m1,m2,predicted,observed,agree,skipped_reason"
        );
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), 4);
        for (row, sample) in rows.iter().zip(&report.samples) {
            let cells: Vec<&str> = row.split(',').collect();
            assert_eq!(cells.len(), 10);
            assert_eq!(cells[0].parse::<f64>().unwrap(), sample.y1);
            assert_eq!(cells[1].parse::<f64>().unwrap(), sample.y2);
            assert_eq!(cells[2].parse::<f64>().unwrap(), sample.dplus.unwrap());
            assert!(cells[4].is_empty() && cells[5].is_empty());
        }
    }

    #[test]
    fn scan_rejects_non_plane_families_and_bad_grids() {
        let err = chamber_scan(
            &SliceFamily::Rank { n: 3, r: 1 },
            &GridSpec::square(0.0, 1.0, 2),
            &tols(),
        )
        .unwrap_err();
        assert!(matches!(err, ChambersError::UnsupportedFamily(_)));
        let err = chamber_scan(
            &SliceFamily::DetMag,
            &GridSpec::square(1.0, 0.0, 2),
            &tols(),
        )
        .unwrap_err();
        assert!(matches!(err, ChambersError::BadGrid(_)));
    }

    fn mismatches(report: &ChamberReport) -> Vec<&ChamberSample> {
        report
            .samples
            .iter()
            .filter(|s| s.agree == Some(false))
            .collect()
    }
}
