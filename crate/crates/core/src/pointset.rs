//! Finite point sets in ℝ^d with a merge tolerance, plus the support algebra
//! the transforms rely on: Minkowski sums of linear images, difference sets,
//! containment probes and windowed minimum-gap profiles.
//!
//! Sets are kept in a canonical lexicographic order and deduplicated so that
//! equal inputs produce byte-identical artifacts. All pairwise operations are
//! O(n²), which is comfortably within the sizes this crate targets (the hard
//! cap is [`tol::ATOM_CAP`] points).

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::tol;

/// A finite set of points in ℝ^d, deduplicated at [`tol::MERGE_TOL`] and
/// sorted lexicographically.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    d: usize,
    points: Vec<DVector<f64>>,
}

/// Minimum pairwise gap per nested window `{p : ‖p‖ ≤ ρ}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WindowedGapProfile {
    /// Window radii, strictly increasing.
    pub radii: Vec<f64>,
    /// Minimum pairwise distance inside each window (∞ for singletons).
    pub min_gaps: Vec<f64>,
    /// Number of points inside each window.
    pub counts: Vec<usize>,
}

fn lex_cmp(a: &DVector<f64>, b: &DVector<f64>) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    std::cmp::Ordering::Equal
}

impl PointSet {
    /// Build a set from raw points, normalizing (sort + merge at tolerance).
    pub fn new(d: usize, points: Vec<DVector<f64>>) -> Result<Self> {
        if d == 0 {
            return Err(CoreError::InvalidParam(
                "point dimension d must be ≥ 1".into(),
            ));
        }
        for p in &points {
            if p.len() != d {
                return Err(CoreError::DimensionMismatch {
                    context: "point has wrong dimension",
                    expected: d,
                    got: p.len(),
                });
            }
        }
        let mut set = Self { d, points };
        set.normalize();
        Ok(set)
    }

    /// Build from nested coordinate vectors.
    pub fn from_rows(d: usize, rows: &[Vec<f64>]) -> Result<Self> {
        let points = rows.iter().map(|r| DVector::from_column_slice(r)).collect();
        Self::new(d, points)
    }

    /// Convenience constructor for 1-dimensional sets.
    pub fn from_scalars(xs: &[f64]) -> Self {
        Self::new(1, xs.iter().map(|&x| DVector::from_element(1, x)).collect())
            .expect("1-d points are always valid")
    }

    fn normalize(&mut self) {
        self.points.sort_by(lex_cmp);
        let mut kept: Vec<DVector<f64>> = Vec::with_capacity(self.points.len());
        'outer: for p in std::mem::take(&mut self.points) {
            for q in &kept {
                if (&p - q).norm() <= tol::MERGE_TOL {
                    continue 'outer;
                }
            }
            kept.push(p);
        }
        self.points = kept;
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[DVector<f64>] {
        &self.points
    }

    /// `{M₁ r + M₂ s : r, s ∈ self}` for two d×d matrices.
    pub fn mixed_sum(&self, m1: &DMatrix<f64>, m2: &DMatrix<f64>) -> Result<PointSet> {
        self.check_matrix(m1)?;
        self.check_matrix(m2)?;
        let n = self.points.len();
        if n.saturating_mul(n) > tol::ATOM_CAP {
            return Err(CoreError::CapExceeded {
                context: "mixed_sum",
                count: n * n,
                cap: tol::ATOM_CAP,
            });
        }
        let mut out = Vec::with_capacity(n * n);
        for r in &self.points {
            let mr = m1 * r;
            for s in &self.points {
                out.push(&mr + m2 * s);
            }
        }
        PointSet::new(self.d, out)
    }

    /// The difference set `self − self` (equals `mixed_sum(Id, −Id)`).
    pub fn diff_set(&self) -> Result<PointSet> {
        let id = DMatrix::identity(self.d, self.d);
        self.mixed_sum(&id, &(-&id))
    }

    /// Minkowski sum with another set of the same dimension.
    pub fn minkowski_sum(&self, other: &PointSet) -> Result<PointSet> {
        if other.d != self.d {
            return Err(CoreError::DimensionMismatch {
                context: "minkowski_sum operands",
                expected: self.d,
                got: other.d,
            });
        }
        let count = self.points.len().saturating_mul(other.points.len());
        if count > tol::ATOM_CAP {
            return Err(CoreError::CapExceeded {
                context: "minkowski_sum",
                count,
                cap: tol::ATOM_CAP,
            });
        }
        let mut out = Vec::with_capacity(count);
        for r in &self.points {
            for s in &other.points {
                out.push(r + s);
            }
        }
        PointSet::new(self.d, out)
    }

    /// Image `{M p : p ∈ self}` under a d×d matrix.
    pub fn linear_image(&self, m: &DMatrix<f64>) -> Result<PointSet> {
        self.check_matrix(m)?;
        PointSet::new(self.d, self.points.iter().map(|p| m * p).collect())
    }

    fn check_matrix(&self, m: &DMatrix<f64>) -> Result<()> {
        if m.nrows() != self.d || m.ncols() != self.d {
            return Err(CoreError::DimensionMismatch {
                context: "matrix must be d×d for this point set",
                expected: self.d,
                got: m.nrows().max(m.ncols()),
            });
        }
        Ok(())
    }

    /// Check `self ⊆ other` up to `tolerance`; on failure returns the first
    /// witness point of `self` with no neighbor in `other`.
    pub fn contained_in(
        &self,
        other: &PointSet,
        tolerance: f64,
    ) -> std::result::Result<(), DVector<f64>> {
        for p in &self.points {
            let ok = other.points.iter().any(|q| (p - q).norm() <= tolerance);
            if !ok {
                return Err(p.clone());
            }
        }
        Ok(())
    }

    /// Symmetric equality up to `tolerance` (containment both ways).
    pub fn set_eq(&self, other: &PointSet, tolerance: f64) -> bool {
        self.contained_in(other, tolerance).is_ok() && other.contained_in(self, tolerance).is_ok()
    }

    /// Minimum pairwise Euclidean distance; errors with fewer than 2 points.
    pub fn min_gap(&self) -> Result<f64> {
        if self.points.len() < 2 {
            return Err(CoreError::TooFewPoints {
                context: "min_gap",
                need: 2,
                got: self.points.len(),
            });
        }
        let mut best = f64::INFINITY;
        for i in 0..self.points.len() {
            for j in (i + 1)..self.points.len() {
                best = best.min((&self.points[i] - &self.points[j]).norm());
            }
        }
        Ok(best)
    }

    /// Minimum gap restricted to nested windows `‖p‖ ≤ ρ`. Radii must be
    /// strictly increasing; an empty window is an error, a singleton window
    /// records ∞.
    pub fn windowed_gap_profile(&self, radii: &[f64]) -> Result<WindowedGapProfile> {
        if radii.is_empty() {
            return Err(CoreError::InvalidParam(
                "gap profile needs at least one radius".into(),
            ));
        }
        if radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CoreError::InvalidParam(
                "gap profile radii must be strictly increasing".into(),
            ));
        }
        let mut min_gaps = Vec::with_capacity(radii.len());
        let mut counts = Vec::with_capacity(radii.len());
        for &rho in radii {
            let window: Vec<&DVector<f64>> =
                self.points.iter().filter(|p| p.norm() <= rho).collect();
            if window.is_empty() {
                return Err(CoreError::EmptyWindow { radius: rho });
            }
            let mut best = f64::INFINITY;
            for i in 0..window.len() {
                for j in (i + 1)..window.len() {
                    best = best.min((window[i] - window[j]).norm());
                }
            }
            min_gaps.push(best);
            counts.push(window.len());
        }
        Ok(WindowedGapProfile {
            radii: radii.to_vec(),
            min_gaps,
            counts,
        })
    }

    /// Evenly spread window radii from point-norm quantiles (every window
    /// nonempty), deduplicated and strictly increasing.
    pub fn default_radii(&self, k: usize) -> Result<Vec<f64>> {
        if self.points.is_empty() || k == 0 {
            return Err(CoreError::TooFewPoints {
                context: "default_radii",
                need: 1,
                got: 0,
            });
        }
        let mut norms: Vec<f64> = self.points.iter().map(|p| p.norm()).collect();
        norms.sort_by(f64::total_cmp);
        let n = norms.len();
        let mut radii: Vec<f64> = (1..=k)
            .map(|i| {
                let idx = (i * n).div_ceil(k).min(n) - 1;
                norms[idx] + tol::MERGE_TOL
            })
            .collect();
        radii.dedup_by(|b, a| *b <= *a + tol::MERGE_TOL);
        Ok(radii)
    }

    /// One point per line, coordinates comma-separated, full precision.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for p in &self.points {
            let row: Vec<String> = p.iter().map(|v| format!("{v}")).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Parse the CSV form produced by [`PointSet::to_csv`].
    pub fn from_csv(d: usize, text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let coords: std::result::Result<Vec<f64>, _> = line
                .split(',')
                .map(|tok| tok.trim().parse::<f64>())
                .collect();
            let coords = coords.map_err(|e| {
                CoreError::InvalidParam(format!("bad CSV number on line {}: {e}", lineno + 1))
            })?;
            rows.push(coords);
        }
        Self::from_rows(d, &rows)
    }
}

impl WindowedGapProfile {
    /// True when the profile never increases with the radius.
    pub fn is_non_increasing(&self) -> bool {
        self.min_gaps
            .windows(2)
            .all(|w| w[1] <= w[0] + f64::EPSILON)
    }

    /// Number of strict decreases along the profile.
    pub fn strict_decreases(&self) -> usize {
        self.min_gaps
            .windows(2)
            .filter(|w| w[1] < w[0] * (1.0 - 1e-12))
            .count()
    }

    /// Accumulation heuristic: the final gap is below [`tol::ACCUMULATION_EPS`]
    /// and the last three windows are non-increasing with at least one strict
    /// decrease among them.
    pub fn accumulation_suspected(&self) -> bool {
        let n = self.min_gaps.len();
        if n < 3 {
            return false;
        }
        let tail = &self.min_gaps[n - 3..];
        let last = tail[2];
        last < tol::ACCUMULATION_EPS
            && tail[1] <= tail[0] + f64::EPSILON
            && tail[2] <= tail[1] + f64::EPSILON
            && last < tail[0] * (1.0 - 1e-12)
    }
}

#[derive(Serialize, Deserialize)]
struct PointSetWire {
    d: usize,
    points: Vec<Vec<f64>>,
}

impl Serialize for PointSet {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        PointSetWire {
            d: self.d,
            points: self
                .points
                .iter()
                .map(|p| p.iter().cloned().collect())
                .collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for PointSet {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let wire = PointSetWire::deserialize(de)?;
        PointSet::from_rows(wire.d, &wire.points).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn integer_range(lo: i64, hi: i64) -> PointSet {
        PointSet::from_scalars(&(lo..=hi).map(|k| k as f64).collect::<Vec<_>>())
    }

    #[test]
    fn normalization_sorts_and_merges() {
        let s = PointSet::from_rows(
            2,
            &[
                vec![1.0, 0.0],
                vec![0.0, 1.0],
                vec![1.0, 5e-10], // merges with (1,0) at the default tolerance
                vec![0.0, 1.0],
            ],
        )
        .unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(
            s.points()[0][1],
            1.0,
            "lexicographic order puts (0,1) first"
        );
        // Invariant: pairwise distances exceed the merge tolerance.
        assert!(s.min_gap().unwrap() > tol::MERGE_TOL);
    }

    #[test]
    fn diff_set_of_integer_comb() {
        // {−5..5} − {−5..5} = {−10..10}, enumerated directly.
        let s = integer_range(-5, 5);
        let diff = s.diff_set().unwrap();
        let expected = integer_range(-10, 10);
        assert!(diff.set_eq(&expected, 1e-12));
        // The difference set always contains 0 and is symmetric.
        assert!(diff
            .contained_in(
                &diff.linear_image(&(-DMatrix::identity(1, 1))).unwrap(),
                1e-12
            )
            .is_ok());
        assert!(PointSet::from_scalars(&[0.0])
            .contained_in(&diff, 1e-12)
            .is_ok());
    }

    #[test]
    fn mixed_sum_with_half_identities() {
        // A = B = ½: {0,1} → {0, ½, 1}.
        let s = PointSet::from_scalars(&[0.0, 1.0]);
        let half = DMatrix::from_element(1, 1, 0.5);
        let sum = s.mixed_sum(&half, &half).unwrap();
        assert!(sum.set_eq(&PointSet::from_scalars(&[0.0, 0.5, 1.0]), 1e-12));
    }

    #[test]
    fn containment_reports_a_witness() {
        let small = PointSet::from_scalars(&[0.0, 0.25]);
        let big = PointSet::from_scalars(&[0.0, 0.5, 1.0]);
        match small.contained_in(&big, 1e-6) {
            Err(w) => assert!((w[0] - 0.25).abs() < 1e-12),
            Ok(()) => panic!("0.25 is not within tolerance of {{0, 0.5, 1}}"),
        }
        assert!(small.contained_in(&big, 0.3).is_ok());
    }

    #[test]
    fn gap_profile_on_irrational_rotation_orbit() {
        // {m′·√2 mod 1 : m′ ≤ n} accumulates: the profile must fall toward 0.
        let pts: Vec<f64> = (0..=300)
            .map(|m| (m as f64 * 2f64.sqrt()).fract())
            .collect();
        let s = PointSet::from_scalars(&pts);
        // Windows by prefix are emulated with growing sets here; the radius
        // windows on the full set still show the shrinking gap.
        let profile = s.windowed_gap_profile(&[0.25, 0.5, 0.75, 1.0]).unwrap();
        assert!(profile.is_non_increasing());
        assert!(profile.min_gaps.last().unwrap() < &1e-2);
    }

    #[test]
    fn gap_profile_is_non_increasing_and_flags_singletons() {
        let s = PointSet::from_scalars(&[0.0, 0.9, 1.0, 3.0]);
        let p = s.windowed_gap_profile(&[0.5, 1.5, 3.5]).unwrap();
        assert!(p.min_gaps[0].is_infinite(), "singleton window has no gap");
        assert!((p.min_gaps[1] - 0.1).abs() < 1e-12);
        assert!((p.min_gaps[2] - 0.1).abs() < 1e-12);
        assert_eq!(p.counts, vec![1, 3, 4]);
        assert!(p.is_non_increasing());

        // A window before the first point errors.
        let far = PointSet::from_scalars(&[5.0, 6.0]);
        assert!(matches!(
            far.windowed_gap_profile(&[1.0, 10.0]),
            Err(CoreError::EmptyWindow { .. })
        ));
    }

    #[test]
    fn accumulation_heuristic_fires_only_on_shrinking_tails() {
        let shrinking = WindowedGapProfile {
            radii: vec![1.0, 2.0, 3.0, 4.0],
            min_gaps: vec![0.1, 2e-3, 5e-4, 5e-4],
            counts: vec![10, 20, 30, 40],
        };
        assert!(shrinking.accumulation_suspected());
        let constant = WindowedGapProfile {
            radii: vec![1.0, 2.0, 3.0],
            min_gaps: vec![1.0, 1.0, 1.0],
            counts: vec![3, 5, 7],
        };
        assert!(!constant.accumulation_suspected());
    }

    #[test]
    fn csv_and_json_round_trip() {
        let s = PointSet::from_rows(2, &[vec![0.5, -1.25], vec![-0.75, 2.0]]).unwrap();
        let csv = s.to_csv();
        let back = PointSet::from_csv(2, &csv).unwrap();
        assert!(back.set_eq(&s, 0.0));

        let json = serde_json::to_string(&s).unwrap();
        let back: PointSet = serde_json::from_str(&json).unwrap();
        assert!(back.set_eq(&s, 0.0));
    }

    #[test]
    fn cap_is_enforced_on_pairwise_enumeration() {
        let s = PointSet::from_scalars(&(0..1100).map(|k| k as f64).collect::<Vec<_>>());
        assert!(matches!(
            s.diff_set(),
            Err(CoreError::CapExceeded {
                context: "mixed_sum",
                ..
            })
        ));
    }

    #[test]
    fn default_radii_are_increasing_and_cover() {
        let s = PointSet::from_scalars(&[0.5, -1.0, 2.0, 4.0, -8.0]);
        let radii = s.default_radii(4).unwrap();
        assert!(radii.windows(2).all(|w| w[1] > w[0]));
        assert!(*radii.last().unwrap() >= 8.0);
        // Every window is nonempty by construction.
        assert!(s.windowed_gap_profile(&radii).is_ok());
    }
}
