//! Block matrices `T = (A₀ B₀ / C₀ D₀)` of four real d×d blocks, the algebra
//! that drives every transform in this crate: assembly and inversion into
//! blocks, the dual matrix, the Cohen normal form, and the Schur-style
//! determinant equivalences between blocks of `Z` and blocks of `Z⁻¹`.
//!
//! Determinant-nonzero decisions never collapse to a bare boolean: they carry
//! the determinant, a condition-number estimate, and a three-way verdict so
//! marginal cases stay visible.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::tol;

/// A real 2d×2d matrix stored as four named d×d blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrix2d {
    d: usize,
    a0: DMatrix<f64>,
    b0: DMatrix<f64>,
    c0: DMatrix<f64>,
    d0: DMatrix<f64>,
}

/// The four d×d blocks `(A B / C D)` of an inverse `T⁻¹`.
#[derive(Debug, Clone)]
pub struct InverseBlocks {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub d: DMatrix<f64>,
}

/// Three-way outcome of a determinant-nonzero test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetClass {
    /// `|det|` above threshold and condition number below the ceiling.
    NonZero,
    /// `|det|` at or below threshold.
    Zero,
    /// `|det|` above threshold but the matrix is too ill-conditioned to trust.
    Marginal,
}

/// Determinant evidence for one matrix: value, conditioning, verdict.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DetVerdict {
    pub det: f64,
    pub cond: f64,
    pub class: DetClass,
}

/// Classify a square matrix's determinant with the crate thresholds.
pub fn det_verdict(m: &DMatrix<f64>) -> DetVerdict {
    let n = m.nrows();
    let scale = m
        .iter()
        .fold(0.0f64, |acc, &v| acc.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let tol_det = tol::DET_REL_TOL * scale.powi(n as i32);
    let det = m.determinant();
    let cond = condition_number(m);
    let class = if det.abs() <= tol_det {
        DetClass::Zero
    } else if cond < tol::COND_MAX {
        DetClass::NonZero
    } else {
        DetClass::Marginal
    };
    DetVerdict { det, cond, class }
}

/// Condition number estimate from singular values (∞ when singular).
pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0f64, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Frobenius-relative matrix closeness at [`tol::MAT_REL_TOL`].
pub fn mats_close(x: &DMatrix<f64>, y: &DMatrix<f64>) -> bool {
    let denom = x.norm().max(y.norm()).max(1.0);
    (x - y).norm() <= tol::MAT_REL_TOL * denom
}

impl BlockMatrix2d {
    /// Build from four d×d blocks, validating shapes.
    pub fn from_blocks(
        a0: DMatrix<f64>,
        b0: DMatrix<f64>,
        c0: DMatrix<f64>,
        d0: DMatrix<f64>,
    ) -> Result<Self> {
        let d = a0.nrows();
        if d == 0 {
            return Err(CoreError::InvalidParam(
                "block dimension d must be ≥ 1".into(),
            ));
        }
        for (name, m) in [("A0", &a0), ("B0", &b0), ("C0", &c0), ("D0", &d0)] {
            if m.nrows() != d || m.ncols() != d {
                return Err(CoreError::DimensionMismatch {
                    context: match name {
                        "A0" => "block A0 must be square d×d",
                        "B0" => "block B0 must match A0's dimension",
                        "C0" => "block C0 must match A0's dimension",
                        _ => "block D0 must match A0's dimension",
                    },
                    expected: d,
                    got: m.nrows().max(m.ncols()),
                });
            }
        }
        Ok(Self { d, a0, b0, c0, d0 })
    }

    /// The classical Wigner matrix `(Id ½Id / Id −½Id)`.
    pub fn classical_wigner(d: usize) -> Self {
        let id = DMatrix::identity(d, d);
        Self::from_blocks(id.clone(), 0.5 * &id, id.clone(), -0.5 * &id)
            .expect("identity blocks are always valid")
    }

    /// The ambiguity matrix `(½Id Id / −½Id Id)`.
    pub fn ambiguity(d: usize) -> Self {
        let id = DMatrix::identity(d, d);
        Self::from_blocks(0.5 * &id, id.clone(), -0.5 * &id, id.clone())
            .expect("identity blocks are always valid")
    }

    /// The Cohen-family matrix `(Id E+½Id / Id E−½Id)` for a kernel block E.
    pub fn cohen(e: &DMatrix<f64>) -> Result<Self> {
        if e.nrows() != e.ncols() || e.nrows() == 0 {
            return Err(CoreError::InvalidParam(
                "Cohen kernel block E must be square".into(),
            ));
        }
        let id = DMatrix::identity(e.nrows(), e.nrows());
        Self::from_blocks(id.clone(), e + 0.5 * &id, id.clone(), e - 0.5 * &id)
    }

    /// The unit-right-column matrix `(A₀ Id / C₀ Id)`.
    pub fn with_unit_right(a0: DMatrix<f64>, c0: DMatrix<f64>) -> Result<Self> {
        let d = a0.nrows();
        let id = DMatrix::identity(d, d);
        Self::from_blocks(a0, id.clone(), c0, id)
    }

    /// Draw a random block matrix with entries from `uniform()` (expected to
    /// produce values in [−1, 1)), resampling until the assembled matrix has
    /// condition number at most `cond_cap`.
    pub fn sample_invertible(d: usize, cond_cap: f64, uniform: &mut dyn FnMut() -> f64) -> Self {
        loop {
            let mut blocks = Vec::with_capacity(4);
            for _ in 0..4 {
                blocks.push(DMatrix::from_fn(d, d, |_, _| uniform()));
            }
            let t = Self::from_blocks(
                blocks[0].clone(),
                blocks[1].clone(),
                blocks[2].clone(),
                blocks[3].clone(),
            )
            .expect("sampled blocks are square");
            if condition_number(&t.assemble()) <= cond_cap {
                return t;
            }
        }
    }

    /// Block dimension d (the full matrix is 2d×2d).
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn a0(&self) -> &DMatrix<f64> {
        &self.a0
    }
    pub fn b0(&self) -> &DMatrix<f64> {
        &self.b0
    }
    pub fn c0(&self) -> &DMatrix<f64> {
        &self.c0
    }
    pub fn d0(&self) -> &DMatrix<f64> {
        &self.d0
    }

    /// Assemble the full 2d×2d matrix.
    pub fn assemble(&self) -> DMatrix<f64> {
        let d = self.d;
        DMatrix::from_fn(2 * d, 2 * d, |i, j| match (i < d, j < d) {
            (true, true) => self.a0[(i, j)],
            (true, false) => self.b0[(i, j - d)],
            (false, true) => self.c0[(i - d, j)],
            (false, false) => self.d0[(i - d, j - d)],
        })
    }

    /// Split a 2d×2d matrix back into four blocks.
    pub fn from_assembled(m: &DMatrix<f64>) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() != n || !n.is_multiple_of(2) || n == 0 {
            return Err(CoreError::DimensionMismatch {
                context: "assembled matrix must be square with even dimension",
                expected: n + n % 2,
                got: m.ncols(),
            });
        }
        let d = n / 2;
        let block = |ri: usize, ci: usize| -> DMatrix<f64> {
            DMatrix::from_fn(d, d, |i, j| m[(ri * d + i, ci * d + j)])
        };
        Self::from_blocks(block(0, 0), block(0, 1), block(1, 0), block(1, 1))
    }

    /// Determinant of the assembled matrix.
    pub fn det(&self) -> f64 {
        self.assemble().determinant()
    }

    /// Determinant verdict for the assembled matrix.
    pub fn det_verdict(&self) -> DetVerdict {
        det_verdict(&self.assemble())
    }

    /// Invert and return the four blocks `(A B / C D)` of `T⁻¹`.
    pub fn invert_blocks(&self) -> Result<InverseBlocks> {
        let full = self.assemble();
        let verdict = det_verdict(&full);
        if verdict.class != DetClass::NonZero {
            let scale = full
                .iter()
                .fold(0.0f64, |acc, &v| acc.max(v.abs()))
                .max(f64::MIN_POSITIVE);
            return Err(CoreError::SingularMatrix {
                context: "invert_blocks",
                det: verdict.det.abs(),
                tol: tol::DET_REL_TOL * scale.powi(2 * self.d as i32),
            });
        }
        let inv = full.try_inverse().ok_or(CoreError::SingularMatrix {
            context: "invert_blocks",
            det: 0.0,
            tol: 0.0,
        })?;
        let split = Self::from_assembled(&inv)?;
        Ok(InverseBlocks {
            a: split.a0,
            b: split.b0,
            c: split.c0,
            d: split.d0,
        })
    }

    /// The dual matrix `L = (Cᵗ Aᵗ / −Dᵗ −Bᵗ)` built from the blocks of
    /// `T⁻¹ = (A B / C D)`. The closed form of its inverse,
    /// `L⁻¹ = (B₀ᵗ −D₀ᵗ / A₀ᵗ −C₀ᵗ)`, is verified numerically before
    /// returning; a failure reports a property violation.
    pub fn dual_matrix(&self) -> Result<BlockMatrix2d> {
        let inv = self.invert_blocks()?;
        let l = BlockMatrix2d::from_blocks(
            inv.c.transpose(),
            inv.a.transpose(),
            -inv.d.transpose(),
            -inv.b.transpose(),
        )?;
        let l_inv = l.invert_blocks()?;
        let expected = [
            self.b0.transpose(),
            -self.d0.transpose(),
            self.a0.transpose(),
            -self.c0.transpose(),
        ];
        let got = [l_inv.a, l_inv.b, l_inv.c, l_inv.d];
        for (g, e) in got.iter().zip(expected.iter()) {
            if !mats_close(g, e) {
                return Err(CoreError::PropertyViolation(
                    "dual matrix inverse does not match its closed form".into(),
                ));
            }
        }
        Ok(l)
    }

    /// Recover the Cohen kernel block E when `T = (Id E+½Id / Id E−½Id)`,
    /// testing block equalities at the crate matrix tolerance.
    pub fn cohen_form(&self) -> Option<DMatrix<f64>> {
        let id = DMatrix::identity(self.d, self.d);
        if !mats_close(&self.a0, &id) || !mats_close(&self.c0, &id) {
            return None;
        }
        let e_upper = &self.b0 - 0.5 * &id;
        let e_lower = &self.d0 + 0.5 * &id;
        if !mats_close(&e_upper, &e_lower) {
            return None;
        }
        Some(0.5 * (e_upper + e_lower))
    }
}

/// Report on the determinant equivalences between blocks of `Z = (Y U / V W)`
/// and blocks of `Z⁻¹ = (E F / G H)`.
#[derive(Debug, Clone, Serialize)]
pub struct SchurReport {
    /// Verdicts for Y, U, V, W (blocks of Z).
    pub direct: [DetVerdict; 4],
    /// Verdicts for E, F, G, H (blocks of Z⁻¹).
    pub inverse: [DetVerdict; 4],
    /// The four paired equivalences (Y↔H, W↔E, U↔F, V↔G): `Some(true)` when
    /// both verdicts are decisive and agree, `None` when a side is marginal.
    pub equivalences: [Option<bool>; 4],
    /// When `det Y ≠ 0`: whether `U = −Y` and whether `F = H` (the two must
    /// agree), reported as (u_is_minus_y, f_equals_h).
    pub minus_y_criterion: Option<(bool, bool)>,
}

/// Compute the block-determinant equivalence report for an invertible `Z`,
/// checking each equivalence and raising a property violation if a decisive
/// pair disagrees.
pub fn schur_report(z: &BlockMatrix2d) -> Result<SchurReport> {
    let inv = z.invert_blocks()?;
    let direct = [
        det_verdict(z.a0()),
        det_verdict(z.b0()),
        det_verdict(z.c0()),
        det_verdict(z.d0()),
    ];
    let inverse = [
        det_verdict(&inv.a),
        det_verdict(&inv.b),
        det_verdict(&inv.c),
        det_verdict(&inv.d),
    ];
    // Pairs: (Y, H), (W, E), (U, F), (V, G) — indices into direct/inverse.
    let pairs = [(0usize, 3usize), (3, 0), (1, 1), (2, 2)];
    let names = [
        "det Y ≠ 0 ⇔ det H ≠ 0",
        "det W ≠ 0 ⇔ det E ≠ 0",
        "det U ≠ 0 ⇔ det F ≠ 0",
        "det V ≠ 0 ⇔ det G ≠ 0",
    ];
    let mut equivalences = [None; 4];
    for (k, &(i, j)) in pairs.iter().enumerate() {
        let (a, b) = (direct[i].class, inverse[j].class);
        if a == DetClass::Marginal || b == DetClass::Marginal {
            continue;
        }
        let holds = a == b;
        equivalences[k] = Some(holds);
        if !holds {
            return Err(CoreError::PropertyViolation(format!(
                "{} failed: det {:.3e} (cond {:.3e}) vs det {:.3e} (cond {:.3e})",
                names[k], direct[i].det, direct[i].cond, inverse[j].det, inverse[j].cond
            )));
        }
    }
    // Part (b): when det Y ≠ 0, U = −Y ⇔ F = H.
    let minus_y_criterion = if direct[0].class == DetClass::NonZero {
        let u_is_minus_y = mats_close(z.b0(), &(-z.a0()));
        let f_equals_h = mats_close(&inv.b, &inv.d);
        if u_is_minus_y != f_equals_h {
            return Err(CoreError::PropertyViolation(format!(
                "U = −Y criterion failed: U=−Y is {u_is_minus_y} but F=H is {f_equals_h}"
            )));
        }
        Some((u_is_minus_y, f_equals_h))
    } else {
        None
    };
    Ok(SchurReport {
        direct,
        inverse,
        equivalences,
        minus_y_criterion,
    })
}

/// Convert a matrix to nested row vectors (wire format helper).
pub fn mat_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// Convert nested row vectors to a matrix, validating rectangular shape.
pub fn rows_to_mat(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let nr = rows.len();
    if nr == 0 {
        return Err(CoreError::InvalidParam(
            "matrix rows must be nonempty".into(),
        ));
    }
    let nc = rows[0].len();
    if nc == 0 || rows.iter().any(|r| r.len() != nc) {
        return Err(CoreError::InvalidParam(
            "matrix rows must be nonempty and equal length".into(),
        ));
    }
    Ok(DMatrix::from_fn(nr, nc, |i, j| rows[i][j]))
}

#[derive(Serialize, Deserialize)]
struct BlockMatrixWire {
    d: usize,
    #[serde(rename = "A0")]
    a0: Vec<Vec<f64>>,
    #[serde(rename = "B0")]
    b0: Vec<Vec<f64>>,
    #[serde(rename = "C0")]
    c0: Vec<Vec<f64>>,
    #[serde(rename = "D0")]
    d0: Vec<Vec<f64>>,
}

impl Serialize for BlockMatrix2d {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        BlockMatrixWire {
            d: self.d,
            a0: mat_to_rows(&self.a0),
            b0: mat_to_rows(&self.b0),
            c0: mat_to_rows(&self.c0),
            d0: mat_to_rows(&self.d0),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for BlockMatrix2d {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let wire = BlockMatrixWire::deserialize(de)?;
        let build = || -> Result<BlockMatrix2d> {
            let t = BlockMatrix2d::from_blocks(
                rows_to_mat(&wire.a0)?,
                rows_to_mat(&wire.b0)?,
                rows_to_mat(&wire.c0)?,
                rows_to_mat(&wire.d0)?,
            )?;
            if t.dim() != wire.d {
                return Err(CoreError::DimensionMismatch {
                    context: "declared d does not match block shapes",
                    expected: wire.d,
                    got: t.dim(),
                });
            }
            Ok(t)
        };
        build().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx_block(m: &DMatrix<f64>, expect: &DMatrix<f64>) {
        assert!(
            mats_close(m, expect),
            "block mismatch:\n{m}\nexpected\n{expect}"
        );
    }

    #[test]
    fn classical_wigner_inverse_blocks() {
        for d in 1..=3 {
            let t = BlockMatrix2d::classical_wigner(d);
            let inv = t.invert_blocks().unwrap();
            let id = DMatrix::identity(d, d);
            approx_block(&inv.a, &(0.5 * &id));
            approx_block(&inv.b, &(0.5 * &id));
            approx_block(&inv.c, &id);
            approx_block(&inv.d, &(-&id));
            assert!(
                (t.det().abs() - 1.0).abs() < 1e-12,
                "|det| of the classical matrix is 1"
            );
        }
    }

    #[test]
    fn ambiguity_inverse_blocks() {
        for d in 1..=3 {
            let t = BlockMatrix2d::ambiguity(d);
            let inv = t.invert_blocks().unwrap();
            let id = DMatrix::identity(d, d);
            approx_block(&inv.a, &id);
            approx_block(&inv.b, &(-&id));
            approx_block(&inv.c, &(0.5 * &id));
            approx_block(&inv.d, &(0.5 * &id));
        }
    }

    #[test]
    fn unit_right_column_inverse_formula() {
        // (A₀ Id / C₀ Id) with A₀ = ½Id, C₀ = −½Id is the ambiguity matrix,
        // and its inverse blocks follow the closed form
        // ((A₀−C₀)⁻¹ −(A₀−C₀)⁻¹ / −C₀(A₀−C₀)⁻¹ A₀(A₀−C₀)⁻¹).
        let d = 2;
        let id = DMatrix::identity(d, d);
        let t = BlockMatrix2d::with_unit_right(0.5 * &id, -0.5 * &id).unwrap();
        assert_eq!(t, BlockMatrix2d::ambiguity(d));

        // A generic sample: A₀ a shear, C₀ a scaling.
        let a0 = rows_to_mat(&[vec![1.0, 0.7], vec![0.0, 1.0]]).unwrap();
        let c0 = rows_to_mat(&[vec![0.3, 0.0], vec![0.0, -0.4]]).unwrap();
        let t = BlockMatrix2d::with_unit_right(a0.clone(), c0.clone()).unwrap();
        let inv = t.invert_blocks().unwrap();
        let k = (&a0 - &c0).try_inverse().unwrap();
        approx_block(&inv.a, &k);
        approx_block(&inv.b, &(-&k));
        approx_block(&inv.c, &(-&c0 * &k));
        approx_block(&inv.d, &(&a0 * &k));
    }

    #[test]
    fn cohen_round_trip_and_closed_inverse() {
        let e = rows_to_mat(&[vec![0.2, -0.5], vec![0.1, 0.8]]).unwrap();
        let t = BlockMatrix2d::cohen(&e).unwrap();
        let recovered = t.cohen_form().expect("Cohen shape must be detected");
        approx_block(&recovered, &e);

        // Closed-form inverse (½Id−E ½Id+E / Id −Id).
        let id = DMatrix::identity(2, 2);
        let inv = t.invert_blocks().unwrap();
        approx_block(&inv.a, &(0.5 * &id - &e));
        approx_block(&inv.b, &(0.5 * &id + &e));
        approx_block(&inv.c, &id);
        approx_block(&inv.d, &(-&id));

        // Any Cohen matrix is invertible; the classical matrix is E = 0.
        let t0 = BlockMatrix2d::classical_wigner(3);
        let e0 = t0
            .cohen_form()
            .expect("classical matrix is Cohen with E = 0");
        assert!(e0.norm() < 1e-12);
        // The ambiguity matrix is not in the Cohen family.
        assert!(BlockMatrix2d::ambiguity(2).cohen_form().is_none());
    }

    #[test]
    fn dual_of_classical_is_classical() {
        for d in 1..=3 {
            let t = BlockMatrix2d::classical_wigner(d);
            let l = t.dual_matrix().unwrap();
            assert!(
                mats_close(&l.assemble(), &t.assemble()),
                "classical matrix is self-dual"
            );
        }
    }

    #[test]
    fn dual_of_ambiguity_is_ambiguity() {
        let t = BlockMatrix2d::ambiguity(2);
        let l = t.dual_matrix().unwrap();
        assert!(mats_close(&l.assemble(), &t.assemble()));
    }

    #[test]
    fn dual_is_an_involution_on_random_matrices() {
        // Deterministic LCG so the sweep is reproducible without an RNG dep.
        let mut state = 0x1234_5678_9abc_def0u64;
        let mut uniform = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        for d in 1..=3 {
            for _ in 0..25 {
                let t = BlockMatrix2d::sample_invertible(d, 1e3, &mut uniform);
                let ll = t.dual_matrix().unwrap().dual_matrix().unwrap();
                assert!(
                    mats_close(&ll.assemble(), &t.assemble()),
                    "dual(dual(T)) must reproduce T"
                );
            }
        }
    }

    #[test]
    fn dual_preserves_equal_right_column_shape() {
        // T = (A₀ B₀ / C₀ B₀) has dual L = (Cᵗ Aᵗ / −Dᵗ Aᵗ): upper-right equals
        // lower-right because B = −A in the inverse.
        let a0 = rows_to_mat(&[vec![1.0, 0.2], vec![-0.3, 0.9]]).unwrap();
        let c0 = rows_to_mat(&[vec![0.1, 0.0], vec![0.4, -0.2]]).unwrap();
        let b0 = rows_to_mat(&[vec![0.8, 0.1], vec![0.0, 1.1]]).unwrap();
        let t = BlockMatrix2d::from_blocks(a0, b0.clone(), c0, b0).unwrap();
        let l = t.dual_matrix().unwrap();
        assert!(
            mats_close(l.b0(), l.d0()),
            "dual of an equal-right-column matrix keeps the shape"
        );
    }

    #[test]
    fn third_condition_transfers_to_dual_second_condition() {
        // det(A+B) for T equals det(B₀−D₀) for L = dual(T): the blocks are
        // transposes of one another.
        let mut state = 0x0fed_cba9_8765_4321u64;
        let mut uniform = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        for _ in 0..20 {
            let t = BlockMatrix2d::sample_invertible(2, 1e3, &mut uniform);
            let inv = t.invert_blocks().unwrap();
            let l = t.dual_matrix().unwrap();
            let lhs = (&inv.a + &inv.b).determinant();
            let rhs = (l.b0() - l.d0()).determinant();
            assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs().max(rhs.abs()).max(1.0));
        }
    }

    #[test]
    fn schur_report_identity_blocks() {
        let t = BlockMatrix2d::from_assembled(&DMatrix::identity(4, 4)).unwrap();
        let rep = schur_report(&t).unwrap();
        assert_eq!(rep.direct[0].class, DetClass::NonZero); // Y = Id
        assert_eq!(rep.direct[1].class, DetClass::Zero); // U = 0
        assert_eq!(rep.inverse[1].class, DetClass::Zero); // F = 0
        assert_eq!(rep.inverse[3].class, DetClass::NonZero); // H = Id
        assert!(rep.equivalences.iter().all(|e| *e == Some(true)));
        assert_eq!(rep.minus_y_criterion, Some((false, false)));
    }

    #[test]
    fn schur_report_on_random_and_minus_y_structured() {
        let mut state = 0x7777_1111_2222_3333u64;
        let mut uniform = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        for d in 1..=3 {
            for _ in 0..20 {
                let z = BlockMatrix2d::sample_invertible(d, 1e3, &mut uniform);
                let rep = schur_report(&z).unwrap();
                assert!(rep.equivalences.iter().all(|e| *e != Some(false)));

                // Force U = −Y; part (b) then demands F = H in the inverse.
                let forced = BlockMatrix2d::from_blocks(
                    z.a0().clone(),
                    -z.a0().clone(),
                    z.c0().clone(),
                    z.d0().clone(),
                )
                .unwrap();
                if forced.det_verdict().class == DetClass::NonZero {
                    let rep = schur_report(&forced).unwrap();
                    assert_eq!(rep.minus_y_criterion, Some((true, true)));
                }
            }
        }
    }

    #[test]
    fn wire_format_round_trip() {
        let t = BlockMatrix2d::ambiguity(1);
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(
            json,
            r#"{"d":1,"A0":[[0.5]],"B0":[[1.0]],"C0":[[-0.5]],"D0":[[1.0]]}"#
        );
        let back: BlockMatrix2d = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);

        // Mismatched declared d is rejected.
        let bad = r#"{"d":2,"A0":[[0.5]],"B0":[[1.0]],"C0":[[-0.5]],"D0":[[1.0]]}"#;
        assert!(serde_json::from_str::<BlockMatrix2d>(bad).is_err());
    }

    #[test]
    fn singular_matrix_is_rejected_with_evidence() {
        let z = DMatrix::zeros(2, 2);
        let t = BlockMatrix2d::from_blocks(
            z.clone(),
            DMatrix::identity(2, 2),
            z.clone(),
            DMatrix::identity(2, 2),
        )
        .unwrap();
        match t.invert_blocks() {
            Err(CoreError::SingularMatrix { det, .. }) => assert!(det.abs() < 1e-12),
            other => panic!("expected SingularMatrix, got {other:?}"),
        }
    }
}
