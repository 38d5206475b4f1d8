//! Atomic measures `μ = Σ a_r^α ∂^α δ_r` with finitely many atoms, their
//! generators (lattice combs, shifted model sets with trigonometric-polynomial
//! coefficients) and exact Fourier evaluation.
//!
//! Convention for derivative atoms, used verbatim by every pairing formula in
//! this crate: an atom `(r, α, a)` denotes `a·∂^α δ_r`, the distributional
//! derivative of a point mass. Under the conjugate-linear pairing
//! `⟨u, φ⟩ = ∫ u·conj(φ)` its action is `a·(−1)^{|α|}·conj(φ)^{(α)}(r)`, and
//! it is the weak limit of `a·(∂^α g_w)(· − r)` for Gaussian mollifiers
//! `g_w(x) = w^{−d} e^{−π|x/w|²}` as `w → 0`. The Fourier transform uses the
//! `e^{−2πi x·ξ}` convention throughout, so
//! `F[∂^α δ_r](ξ) = (2πi ξ)^α e^{−2πi r·ξ}`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::multiindex::{self, MultiIndex};
use crate::pointset::PointSet;
use crate::tol;

/// An axis-aligned box `[lo₁,hi₁]×…×[lo_d,hi_d]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoundingBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(CoreError::InvalidParam(
                "box lo/hi must be nonempty and equal length".into(),
            ));
        }
        if lo
            .iter()
            .zip(&hi)
            .any(|(l, h)| l > h || !l.is_finite() || !h.is_finite())
        {
            return Err(CoreError::InvalidParam(
                "box must satisfy lo ≤ hi with finite bounds".into(),
            ));
        }
        Ok(Self { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    /// Membership with a symmetric padding (positive pad enlarges the box).
    pub fn contains(&self, p: &DVector<f64>, pad: f64) -> bool {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(&x, (&l, &h))| x >= l - pad && x <= h + pad)
    }

    /// The 2^d corner points.
    pub fn corners(&self) -> Vec<DVector<f64>> {
        let d = self.dim();
        (0..(1usize << d))
            .map(|mask| {
                DVector::from_fn(d, |i, _| {
                    if mask >> i & 1 == 1 {
                        self.hi[i]
                    } else {
                        self.lo[i]
                    }
                })
            })
            .collect()
    }
}

/// One atom `a·∂^α δ_r`.
#[derive(Debug, Clone)]
pub struct Atom {
    pub r: DVector<f64>,
    pub alpha: MultiIndex,
    pub coeff: Complex64,
}

/// A finite atomic measure with derivative atoms up to some order `N`.
#[derive(Debug, Clone)]
pub struct AtomicMeasure {
    d: usize,
    atoms: Vec<Atom>,
}

fn lex_cmp_vec(a: &DVector<f64>, b: &DVector<f64>) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    std::cmp::Ordering::Equal
}

impl AtomicMeasure {
    /// Build from atoms, validating dimensions and normalizing (positions
    /// within [`tol::MERGE_TOL`] with identical `α` merge by coefficient sum;
    /// exact-zero coefficients are dropped; atoms sort by position then `α`).
    pub fn new(d: usize, atoms: Vec<Atom>) -> Result<Self> {
        if d == 0 {
            return Err(CoreError::InvalidParam(
                "measure dimension d must be ≥ 1".into(),
            ));
        }
        for atom in &atoms {
            if atom.r.len() != d {
                return Err(CoreError::DimensionMismatch {
                    context: "atom position has wrong dimension",
                    expected: d,
                    got: atom.r.len(),
                });
            }
            if atom.alpha.len() != d {
                return Err(CoreError::DimensionMismatch {
                    context: "atom derivative index has wrong dimension",
                    expected: d,
                    got: atom.alpha.len(),
                });
            }
        }
        let mut m = Self { d, atoms };
        m.normalize();
        Ok(m)
    }

    /// A single unit point mass at `r`.
    pub fn dirac(r: DVector<f64>) -> Self {
        let d = r.len();
        Self::new(
            d,
            vec![Atom {
                r,
                alpha: vec![0; d],
                coeff: Complex64::new(1.0, 0.0),
            }],
        )
        .expect("a single dirac is always valid")
    }

    /// A single derivative atom `∂^α δ_r` with unit coefficient.
    pub fn dirac_derivative(r: DVector<f64>, alpha: MultiIndex) -> Result<Self> {
        let d = r.len();
        Self::new(
            d,
            vec![Atom {
                r,
                alpha,
                coeff: Complex64::new(1.0, 0.0),
            }],
        )
    }

    /// Unit masses on the lattice points `V k (k ∈ ℤ^d)` inside `window`.
    pub fn dirac_comb(basis: &DMatrix<f64>, window: &BoundingBox) -> Result<Self> {
        let d = window.dim();
        if basis.nrows() != d || basis.ncols() != d {
            return Err(CoreError::DimensionMismatch {
                context: "lattice basis must be d×d for the window",
                expected: d,
                got: basis.nrows().max(basis.ncols()),
            });
        }
        let positions = lattice_points_in_box(basis, &DVector::zeros(d), window)?;
        let atoms = positions
            .into_iter()
            .map(|r| Atom {
                r,
                alpha: vec![0; d],
                coeff: Complex64::new(1.0, 0.0),
            })
            .collect();
        Self::new(d, atoms)
    }

    fn normalize(&mut self) {
        self.atoms
            .sort_by(|p, q| lex_cmp_vec(&p.r, &q.r).then_with(|| p.alpha.cmp(&q.alpha)));
        let mut kept: Vec<Atom> = Vec::with_capacity(self.atoms.len());
        'outer: for atom in std::mem::take(&mut self.atoms) {
            for prev in kept.iter_mut() {
                if prev.alpha == atom.alpha && (&prev.r - &atom.r).norm() <= tol::MERGE_TOL {
                    prev.coeff += atom.coeff;
                    continue 'outer;
                }
            }
            kept.push(atom);
        }
        kept.retain(|a| a.coeff != Complex64::new(0.0, 0.0));
        self.atoms = kept;
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Largest derivative order `N = max |α|` (0 for the empty measure).
    pub fn order(&self) -> usize {
        self.atoms
            .iter()
            .map(|a| multiindex::order(&a.alpha))
            .max()
            .unwrap_or(0)
    }

    /// True when every atom is a plain point mass (`α = 0`).
    pub fn is_order_zero(&self) -> bool {
        self.order() == 0
    }

    /// The set of atom positions.
    pub fn support(&self) -> PointSet {
        PointSet::new(self.d, self.atoms.iter().map(|a| a.r.clone()).collect())
            .expect("atom positions are validated on construction")
    }

    /// Sum of order-0 coefficients (the total mass for order-0 measures).
    pub fn total_mass(&self) -> Complex64 {
        self.atoms
            .iter()
            .filter(|a| multiindex::order(&a.alpha) == 0)
            .map(|a| a.coeff)
            .sum()
    }

    /// Exact Fourier transform at `ξ`:
    /// `μ̂(ξ) = Σ a_r^α (2πi ξ)^α e^{−2πi r·ξ}`.
    pub fn fourier_eval(&self, xi: &DVector<f64>) -> Result<Complex64> {
        if xi.len() != self.d {
            return Err(CoreError::DimensionMismatch {
                context: "fourier_eval point has wrong dimension",
                expected: self.d,
                got: xi.len(),
            });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for atom in &self.atoms {
            let mut factor = Complex64::new(1.0, 0.0);
            for (i, &ai) in atom.alpha.iter().enumerate() {
                factor *= Complex64::new(0.0, 2.0 * std::f64::consts::PI * xi[i]).powu(ai as u32);
            }
            let phase = -2.0 * std::f64::consts::PI * atom.r.dot(xi);
            acc += atom.coeff * factor * Complex64::from_polar(1.0, phase);
        }
        Ok(acc)
    }
}

/// Enumerate `{V k + θ : k ∈ ℤ^d} ∩ window` (capped at [`tol::ATOM_CAP`]).
fn lattice_points_in_box(
    basis: &DMatrix<f64>,
    shift: &DVector<f64>,
    window: &BoundingBox,
) -> Result<Vec<DVector<f64>>> {
    let d = window.dim();
    let inv = basis
        .clone()
        .try_inverse()
        .ok_or(CoreError::SingularMatrix {
            context: "lattice basis",
            det: basis.determinant().abs(),
            tol: 0.0,
        })?;
    // k-range from the preimages of the (shift-adjusted) window corners.
    let mut kmin = vec![f64::INFINITY; d];
    let mut kmax = vec![f64::NEG_INFINITY; d];
    for corner in window.corners() {
        let k = &inv * (corner - shift);
        for i in 0..d {
            kmin[i] = kmin[i].min(k[i]);
            kmax[i] = kmax[i].max(k[i]);
        }
    }
    let lo: Vec<i64> = kmin.iter().map(|v| (v - 1e-9).floor() as i64).collect();
    let hi: Vec<i64> = kmax.iter().map(|v| (v + 1e-9).ceil() as i64).collect();
    let mut count: usize = 1;
    for i in 0..d {
        let span = (hi[i] - lo[i] + 1).max(0) as usize;
        count = count.saturating_mul(span);
        if count > tol::ATOM_CAP {
            return Err(CoreError::CapExceeded {
                context: "lattice enumeration",
                count,
                cap: tol::ATOM_CAP,
            });
        }
    }
    let mut out = Vec::new();
    let mut k = lo.clone();
    'grid: loop {
        let kv = DVector::from_fn(d, |i, _| k[i] as f64);
        let p = basis * kv + shift;
        if window.contains(&p, tol::MERGE_TOL) {
            if out.len() >= tol::ATOM_CAP {
                return Err(CoreError::CapExceeded {
                    context: "lattice enumeration",
                    count: out.len() + 1,
                    cap: tol::ATOM_CAP,
                });
            }
            out.push(p);
        }
        for i in 0..d {
            k[i] += 1;
            if k[i] <= hi[i] {
                continue 'grid;
            }
            k[i] = lo[i];
        }
        break;
    }
    Ok(out)
}

/// A trigonometric polynomial `P(x) = Σ_k c_k e^{2πi f_k·x}`.
#[derive(Debug, Clone)]
pub struct TrigPolynomial {
    d: usize,
    terms: Vec<(DVector<f64>, Complex64)>,
}

impl TrigPolynomial {
    pub fn new(d: usize, terms: Vec<(DVector<f64>, Complex64)>) -> Result<Self> {
        if d == 0 {
            return Err(CoreError::InvalidParam(
                "trig polynomial dimension must be ≥ 1".into(),
            ));
        }
        for (f, _) in &terms {
            if f.len() != d {
                return Err(CoreError::DimensionMismatch {
                    context: "trig polynomial frequency has wrong dimension",
                    expected: d,
                    got: f.len(),
                });
            }
        }
        Ok(Self { d, terms })
    }

    /// The constant polynomial `P ≡ c`.
    pub fn constant(d: usize, c: Complex64) -> Self {
        Self::new(d, vec![(DVector::zeros(d), c)]).expect("constant term is valid")
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn terms(&self) -> &[(DVector<f64>, Complex64)] {
        &self.terms
    }

    pub fn eval(&self, x: &DVector<f64>) -> Complex64 {
        self.terms
            .iter()
            .map(|(f, c)| c * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * f.dot(x)))
            .sum()
    }
}

/// Specification of a shifted-lattice model set with trigonometric-polynomial
/// coefficients: `μ = Σ_j Σ_{λ ∈ L·ℤ^d + θ_j ∩ box} P_j(λ) δ_λ`.
#[derive(Debug, Clone)]
pub struct QuasicrystalSpec {
    pub lattice_basis: DMatrix<f64>,
    pub shifts: Vec<DVector<f64>>,
    pub polys: Vec<TrigPolynomial>,
    pub window: BoundingBox,
}

impl QuasicrystalSpec {
    /// Materialize the measure: enumerate each shifted lattice inside the
    /// window, weight by the matching polynomial, and merge coincident
    /// positions across shifts.
    pub fn generate(&self) -> Result<AtomicMeasure> {
        let d = self.window.dim();
        if self.lattice_basis.nrows() != d || self.lattice_basis.ncols() != d {
            return Err(CoreError::DimensionMismatch {
                context: "lattice basis must match window dimension",
                expected: d,
                got: self.lattice_basis.nrows().max(self.lattice_basis.ncols()),
            });
        }
        if self.shifts.len() != self.polys.len() || self.shifts.is_empty() {
            return Err(CoreError::InvalidParam(
                "quasicrystal spec needs equally many shifts and polynomials (≥ 1)".into(),
            ));
        }
        let mut atoms = Vec::new();
        for (shift, poly) in self.shifts.iter().zip(&self.polys) {
            if shift.len() != d {
                return Err(CoreError::DimensionMismatch {
                    context: "shift has wrong dimension",
                    expected: d,
                    got: shift.len(),
                });
            }
            if poly.dim() != d {
                return Err(CoreError::DimensionMismatch {
                    context: "coefficient polynomial has wrong dimension",
                    expected: d,
                    got: poly.dim(),
                });
            }
            for lambda in lattice_points_in_box(&self.lattice_basis, shift, &self.window)? {
                let coeff = poly.eval(&lambda);
                atoms.push(Atom {
                    r: lambda,
                    alpha: vec![0; d],
                    coeff,
                });
            }
        }
        AtomicMeasure::new(d, atoms)
    }
}

// --- wire formats -----------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct AtomWire {
    r: Vec<f64>,
    alpha: Vec<usize>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct MeasureWire {
    d: usize,
    atoms: Vec<AtomWire>,
}

impl Serialize for AtomicMeasure {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        MeasureWire {
            d: self.d,
            atoms: self
                .atoms
                .iter()
                .map(|a| AtomWire {
                    r: a.r.iter().cloned().collect(),
                    alpha: a.alpha.clone(),
                    re: a.coeff.re,
                    im: a.coeff.im,
                })
                .collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for AtomicMeasure {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let wire = MeasureWire::deserialize(de)?;
        let atoms = wire
            .atoms
            .into_iter()
            .map(|a| Atom {
                r: DVector::from_column_slice(&a.r),
                alpha: a.alpha,
                coeff: Complex64::new(a.re, a.im),
            })
            .collect();
        AtomicMeasure::new(wire.d, atoms).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct TrigTermWire {
    freq: Vec<f64>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct TrigPolyWire {
    terms: Vec<TrigTermWire>,
}

#[derive(Serialize, Deserialize)]
struct QcSpecWire {
    d: usize,
    lattice_basis: Vec<Vec<f64>>,
    shifts: Vec<Vec<f64>>,
    polys: Vec<TrigPolyWire>,
    window: BoundingBox,
}

impl Serialize for QuasicrystalSpec {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        QcSpecWire {
            d: self.window.dim(),
            lattice_basis: crate::blockmat::mat_to_rows(&self.lattice_basis),
            shifts: self
                .shifts
                .iter()
                .map(|s| s.iter().cloned().collect())
                .collect(),
            polys: self
                .polys
                .iter()
                .map(|p| TrigPolyWire {
                    terms: p
                        .terms()
                        .iter()
                        .map(|(f, c)| TrigTermWire {
                            freq: f.iter().cloned().collect(),
                            re: c.re,
                            im: c.im,
                        })
                        .collect(),
                })
                .collect(),
            window: self.window.clone(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for QuasicrystalSpec {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let wire = QcSpecWire::deserialize(de)?;
        let build = || -> Result<QuasicrystalSpec> {
            if wire.window.dim() != wire.d {
                return Err(CoreError::DimensionMismatch {
                    context: "declared d does not match window",
                    expected: wire.d,
                    got: wire.window.dim(),
                });
            }
            let polys = wire
                .polys
                .iter()
                .map(|p| {
                    TrigPolynomial::new(
                        wire.d,
                        p.terms
                            .iter()
                            .map(|t| {
                                (
                                    DVector::from_column_slice(&t.freq),
                                    Complex64::new(t.re, t.im),
                                )
                            })
                            .collect(),
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(QuasicrystalSpec {
                lattice_basis: crate::blockmat::rows_to_mat(&wire.lattice_basis)?,
                shifts: wire
                    .shifts
                    .iter()
                    .map(|s| DVector::from_column_slice(s))
                    .collect(),
                polys,
                window: wire.window,
            })
        };
        build().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v1(x: f64) -> DVector<f64> {
        DVector::from_element(1, x)
    }

    #[test]
    fn comb_enumerates_integers_in_window() {
        let basis = DMatrix::identity(1, 1);
        let window = BoundingBox::new(vec![-5.0], vec![5.0]).unwrap();
        let comb = AtomicMeasure::dirac_comb(&basis, &window).unwrap();
        assert_eq!(comb.len(), 11);
        assert!(comb.is_order_zero());
        assert_eq!(comb.total_mass(), Complex64::new(11.0, 0.0));
        let expected = PointSet::from_scalars(&(-5..=5).map(|k| k as f64).collect::<Vec<_>>());
        assert!(comb.support().set_eq(&expected, 1e-12));
    }

    #[test]
    fn comb_on_skewed_2d_lattice() {
        // Basis ((1, 0.5), (0, 1)): columns generate a sheared lattice.
        let basis = crate::blockmat::rows_to_mat(&[vec![1.0, 0.5], vec![0.0, 1.0]]).unwrap();
        let window = BoundingBox::new(vec![-2.0, -2.0], vec![2.0, 2.0]).unwrap();
        let comb = AtomicMeasure::dirac_comb(&basis, &window).unwrap();
        // Every atom must be a lattice point: V⁻¹ r ∈ ℤ².
        let inv = basis.try_inverse().unwrap();
        for atom in comb.atoms() {
            let k = &inv * &atom.r;
            for c in k.iter() {
                assert!(
                    (c - c.round()).abs() < 1e-9,
                    "atom off-lattice: {:?}",
                    atom.r
                );
            }
        }
        assert!(comb.len() > 10);
    }

    #[test]
    fn normalization_merges_and_drops_zeros() {
        let atoms = vec![
            Atom {
                r: v1(1.0),
                alpha: vec![0],
                coeff: Complex64::new(2.0, 0.0),
            },
            Atom {
                r: v1(1.0 + 1e-12),
                alpha: vec![0],
                coeff: Complex64::new(-2.0, 0.0),
            },
            Atom {
                r: v1(0.0),
                alpha: vec![1],
                coeff: Complex64::new(1.0, 1.0),
            },
            Atom {
                r: v1(0.0),
                alpha: vec![0],
                coeff: Complex64::new(1.0, 0.0),
            },
        ];
        let m = AtomicMeasure::new(1, atoms).unwrap();
        // The two masses at 1 cancel exactly; two distinct atoms remain at 0.
        assert_eq!(m.len(), 2);
        assert_eq!(m.order(), 1);
        assert!(!m.is_order_zero());
        // Canonical order: position first, then derivative index.
        assert_eq!(m.atoms()[0].alpha, vec![0]);
        assert_eq!(m.atoms()[1].alpha, vec![1]);
    }

    #[test]
    fn fourier_of_integer_comb_is_dirichlet_kernel() {
        // Σ_{k=−n}^{n} e^{−2πikξ} = sin(π(2n+1)ξ)/sin(πξ).
        let n = 4;
        let basis = DMatrix::identity(1, 1);
        let window = BoundingBox::new(vec![-(n as f64)], vec![n as f64]).unwrap();
        let comb = AtomicMeasure::dirac_comb(&basis, &window).unwrap();
        for &xi in &[0.13, 0.37, -0.42, 0.91] {
            let got = comb.fourier_eval(&v1(xi)).unwrap();
            let expect = (std::f64::consts::PI * (2 * n + 1) as f64 * xi).sin()
                / (std::f64::consts::PI * xi).sin();
            assert!(
                (got - Complex64::new(expect, 0.0)).norm() < 1e-9,
                "Dirichlet mismatch at ξ={xi}: {got} vs {expect}"
            );
        }
    }

    #[test]
    fn fourier_of_derivative_atom_carries_polynomial_factor() {
        // F[∂δ₀](ξ) = 2πiξ.
        let m = AtomicMeasure::dirac_derivative(v1(0.0), vec![1]).unwrap();
        let xi = 0.77;
        let got = m.fourier_eval(&v1(xi)).unwrap();
        let expect = Complex64::new(0.0, 2.0 * std::f64::consts::PI * xi);
        assert!((got - expect).norm() < 1e-12);
    }

    #[test]
    fn quasicrystal_coefficients_cycle_through_roots_of_unity() {
        // P(x) = e^{2πi x/3} on ℤ ∩ [−3,3]: coefficients cycle through the
        // cube roots of unity.
        let spec = QuasicrystalSpec {
            lattice_basis: DMatrix::identity(1, 1),
            shifts: vec![v1(0.0)],
            polys: vec![
                TrigPolynomial::new(1, vec![(v1(1.0 / 3.0), Complex64::new(1.0, 0.0))]).unwrap(),
            ],
            window: BoundingBox::new(vec![-3.0], vec![3.0]).unwrap(),
        };
        let m = spec.generate().unwrap();
        assert_eq!(m.len(), 7);
        for atom in m.atoms() {
            let k = atom.r[0];
            let expect = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k / 3.0);
            assert!((atom.coeff - expect).norm() < 1e-12);
            assert!((atom.coeff.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn two_shift_quasicrystal_lands_on_half_integers() {
        let spec = QuasicrystalSpec {
            lattice_basis: DMatrix::identity(1, 1),
            shifts: vec![v1(0.0), v1(0.5)],
            polys: vec![
                TrigPolynomial::constant(1, Complex64::new(1.0, 0.0)),
                TrigPolynomial::constant(1, Complex64::new(0.5, 0.0)),
            ],
            window: BoundingBox::new(vec![-2.0], vec![2.0]).unwrap(),
        };
        let m = spec.generate().unwrap();
        // Integers −2..2 plus half-integers −1.5..1.5: 5 + 4 atoms.
        assert_eq!(m.len(), 9);
        let expected =
            PointSet::from_scalars(&(-4..=4).map(|k| k as f64 / 2.0).collect::<Vec<_>>());
        assert!(m.support().set_eq(&expected, 1e-12));
    }

    #[test]
    fn measure_wire_format_round_trip() {
        let m = AtomicMeasure::new(
            1,
            vec![
                Atom {
                    r: v1(0.0),
                    alpha: vec![0],
                    coeff: Complex64::new(1.0, 0.0),
                },
                Atom {
                    r: v1(1.0),
                    alpha: vec![2],
                    coeff: Complex64::new(0.0, -0.5),
                },
            ],
        )
        .unwrap();
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(
            json,
            r#"{"d":1,"atoms":[{"r":[0.0],"alpha":[0],"re":1.0,"im":0.0},{"r":[1.0],"alpha":[2],"re":0.0,"im":-0.5}]}"#
        );
        let back: AtomicMeasure = serde_json::from_str(&json).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back.order(), 2);
    }

    #[test]
    fn lattice_cap_is_enforced() {
        let basis = DMatrix::identity(1, 1) * 1e-9;
        let window = BoundingBox::new(vec![0.0], vec![10.0]).unwrap();
        assert!(matches!(
            AtomicMeasure::dirac_comb(&basis, &window),
            Err(CoreError::CapExceeded { .. })
        ));
    }
}
