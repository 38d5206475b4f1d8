//! Exact transform of atomic measures.
//!
//! For an order-0 measure `μ = Σ_r a_r δ_r` and an invertible block matrix
//! `T` with `T⁻¹ = (A B / C D)`, the transform is an exact finite sum of
//! chirp-weighted point masses in `x`:
//!
//! ```text
//! W_T(μ, ν)(x, ω) = |det T|⁻¹ Σ_{r,s} a_r conj(b_s) δ_{Ar+Bs}(x) e^{−2πi (Cr+Ds)·ω}
//! ```
//!
//! so the x-support is the mixed sum `A(supp μ) + B(supp ν)` and every atom
//! carries a finite list of chirps `(weight, frequency)`. This module builds
//! that sum, evaluates slices, pairs it against separable test functions,
//! implements the derivative-atom pairing formula for the classical matrix,
//! and checks the relation between the classical and generalized transforms
//! both in closed form and by independent quadrature.

use std::collections::HashMap;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::blockmat::BlockMatrix2d;
use crate::error::{CoreError, Result};
use crate::measure::AtomicMeasure;
use crate::multiindex::{self, MultiIndex};
use crate::pointset::PointSet;
use crate::testfn::TestFunctionNd;
use crate::tol;

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// One chirp `weight · e^{−2πi freq·ω}`.
#[derive(Debug, Clone)]
pub struct Chirp {
    pub weight: Complex64,
    pub freq: DVector<f64>,
}

/// A point mass in `x` carrying a finite chirp list in `ω`.
#[derive(Debug, Clone)]
pub struct XAtom {
    pub x: DVector<f64>,
    pub chirps: Vec<Chirp>,
}

/// The exact transform of an order-0 atomic measure: a finite sum of
/// chirp-weighted x-atoms, remembering the matrix that produced it.
#[derive(Debug, Clone)]
pub struct ChirpAtomSum {
    d: usize,
    matrix: BlockMatrix2d,
    abs_det: f64,
    atoms: Vec<XAtom>,
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

/// Exact transform of the pair `(μ, ν)`; both must be order-0 measures of
/// the same dimension as `t`.
pub fn wigner_t_exact_pair(
    t: &BlockMatrix2d,
    mu: &AtomicMeasure,
    nu: &AtomicMeasure,
) -> Result<ChirpAtomSum> {
    let d = t.dim();
    for (name, m) in [("first", mu), ("second", nu)] {
        if m.dim() != d {
            return Err(CoreError::DimensionMismatch {
                context: "measure dimension must match the matrix block size",
                expected: d,
                got: m.dim(),
            });
        }
        if !m.is_order_zero() {
            return Err(CoreError::ShapeMismatch(format!(
                "exact transform requires an order-0 {name} measure (derivative atoms go through the pairing formula)"
            )));
        }
    }
    let count = mu.len().saturating_mul(nu.len());
    if count > tol::ATOM_CAP {
        return Err(CoreError::CapExceeded {
            context: "exact transform",
            count,
            cap: tol::ATOM_CAP,
        });
    }
    let inv = t.invert_blocks()?;
    let abs_det = t.det().abs();
    let jac = 1.0 / abs_det;

    // All (x, freq, weight) triples, then canonical clustering.
    let mut triples: Vec<(DVector<f64>, DVector<f64>, Complex64)> = Vec::with_capacity(count);
    for au in mu.atoms() {
        let ar = &inv.a * &au.r;
        let cr = &inv.c * &au.r;
        for av in nu.atoms() {
            let x = &ar + &inv.b * &av.r;
            let f = &cr + &inv.d * &av.r;
            let w = au.coeff * av.coeff.conj() * jac;
            triples.push((x, f, w));
        }
    }
    triples.sort_by(|p, q| lex_cmp_vec(&p.0, &q.0).then_with(|| lex_cmp_vec(&p.1, &q.1)));

    let mut atoms: Vec<XAtom> = Vec::new();
    'outer: for (x, f, w) in triples {
        for atom in atoms.iter_mut() {
            if (&x - &atom.x).norm() <= tol::MERGE_TOL {
                for chirp in atom.chirps.iter_mut() {
                    if (&f - &chirp.freq).norm() <= tol::MERGE_TOL {
                        chirp.weight += w;
                        continue 'outer;
                    }
                }
                atom.chirps.push(Chirp { weight: w, freq: f });
                continue 'outer;
            }
        }
        atoms.push(XAtom {
            x,
            chirps: vec![Chirp { weight: w, freq: f }],
        });
    }
    for atom in atoms.iter_mut() {
        atom.chirps.retain(|c| c.weight != Complex64::new(0.0, 0.0));
    }
    atoms.retain(|a| !a.chirps.is_empty());

    Ok(ChirpAtomSum {
        d,
        matrix: t.clone(),
        abs_det,
        atoms,
    })
}

/// Exact transform `W_T(μ)` (the diagonal pair `ν = μ`).
pub fn wigner_t_exact(t: &BlockMatrix2d, mu: &AtomicMeasure) -> Result<ChirpAtomSum> {
    wigner_t_exact_pair(t, mu, mu)
}

impl ChirpAtomSum {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &BlockMatrix2d {
        &self.matrix
    }

    /// `|det T|` of the producing matrix.
    pub fn abs_det(&self) -> f64 {
        self.abs_det
    }

    pub fn atoms(&self) -> &[XAtom] {
        &self.atoms
    }

    /// The x-support: positions of all atoms.
    pub fn support_x(&self) -> PointSet {
        PointSet::new(self.d, self.atoms.iter().map(|a| a.x.clone()).collect())
            .expect("atom positions were validated on construction")
    }

    /// Sum of all chirp weights (`= |det T|⁻¹ |Σ a_r|²` for `ν = μ`).
    pub fn total_weight(&self) -> Complex64 {
        self.atoms
            .iter()
            .flat_map(|a| a.chirps.iter())
            .map(|c| c.weight)
            .sum()
    }

    /// Evaluate each atom's chirp sum at a fixed `ω`, in atom order.
    pub fn eval_slice(&self, omega: &DVector<f64>) -> Result<Vec<(DVector<f64>, Complex64)>> {
        if omega.len() != self.d {
            return Err(CoreError::DimensionMismatch {
                context: "slice frequency has wrong dimension",
                expected: self.d,
                got: omega.len(),
            });
        }
        Ok(self
            .atoms
            .iter()
            .map(|atom| {
                let v: Complex64 = atom
                    .chirps
                    .iter()
                    .map(|c| c.weight * Complex64::from_polar(1.0, -TAU * c.freq.dot(omega)))
                    .sum();
                (atom.x.clone(), v)
            })
            .collect())
    }

    /// Pair against a separable test function `φ₁ ⊗ φ₂` under the
    /// conjugate-linear pairing: each chirp `(w, f)` at position `x`
    /// contributes `w · conj(φ₁(x)) · conj(φ̂₂(−f))`.
    pub fn pair_with(&self, phi1: &TestFunctionNd, phi2: &TestFunctionNd) -> Result<Complex64> {
        if phi1.dim() != self.d || phi2.dim() != self.d {
            return Err(CoreError::DimensionMismatch {
                context: "test-function pair dimension",
                expected: self.d,
                got: phi1.dim().max(phi2.dim()),
            });
        }
        let phi2_hat = phi2.fourier();
        let mut acc = Complex64::new(0.0, 0.0);
        for atom in &self.atoms {
            let p1 = phi1.eval(&atom.x)?.conj();
            for chirp in &atom.chirps {
                let p2 = phi2_hat.eval(&(-&chirp.freq))?.conj();
                acc += chirp.weight * p1 * p2;
            }
        }
        Ok(acc)
    }
}

/// Pairing `⟨W(μ), φ₁⊗φ₂⟩` for the classical matrix, valid for measures with
/// derivative atoms of any order. Derivative atoms follow the distributional
/// convention documented in [`crate::measure`]; the coefficient of each term
/// is
///
/// ```text
/// λ = C(α,α₁) C(β,β₁) (−1)^{|α|+|β|+|β−β₁|} (½)^{|α₁|+|β₁|}
/// ```
///
/// applied to `a_r^β conj(a_s^α) · conj(φ₁)^{(α₁+β₁)}((r+s)/2) ·
/// conj(φ̂₂)^{(α−α₁+β−β₁)}(s−r)`, validated against mollified-measure
/// quadrature of the defining integral.
pub fn pair_wigner_formula(
    mu: &AtomicMeasure,
    phi1: &TestFunctionNd,
    phi2: &TestFunctionNd,
) -> Result<Complex64> {
    let d = mu.dim();
    if phi1.dim() != d || phi2.dim() != d {
        return Err(CoreError::DimensionMismatch {
            context: "test-function pair dimension",
            expected: d,
            got: phi1.dim().max(phi2.dim()),
        });
    }
    let phi1_conj = phi1.conj();
    let phi2_hat_conj = phi2.fourier().conj();
    let mut cache1: HashMap<MultiIndex, TestFunctionNd> = HashMap::new();
    let mut cache2: HashMap<MultiIndex, TestFunctionNd> = HashMap::new();

    let mut acc = Complex64::new(0.0, 0.0);
    for au in mu.atoms() {
        let beta = &au.alpha;
        let b_subs = multiindex::sub_indices(beta);
        for av in mu.atoms() {
            let alpha = &av.alpha;
            let a_subs = multiindex::sub_indices(alpha);
            let mid = (&au.r + &av.r) * 0.5;
            let diff = &av.r - &au.r;
            let coeff = au.coeff * av.coeff.conj();
            let base_order = multiindex::order(alpha) + multiindex::order(beta);
            for alpha1 in &a_subs {
                for beta1 in &b_subs {
                    let o1 = multiindex::order(alpha1) + multiindex::order(beta1);
                    let sign_pow = base_order + multiindex::order(beta) - multiindex::order(beta1);
                    let lambda = multiindex::binom_multi(alpha, alpha1)
                        * multiindex::binom_multi(beta, beta1)
                        * if sign_pow.is_multiple_of(2) {
                            1.0
                        } else {
                            -1.0
                        }
                        * 0.5f64.powi(o1 as i32);
                    let g1_order = multiindex::add(alpha1, beta1);
                    let g2_order = multiindex::add(
                        &multiindex::sub(alpha, alpha1),
                        &multiindex::sub(beta, beta1),
                    );
                    let g1 = match cache1.entry(g1_order.clone()) {
                        std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
                        std::collections::hash_map::Entry::Vacant(e) => {
                            e.insert(phi1_conj.derivative(&g1_order)?)
                        }
                    };
                    let v1 = g1.eval(&mid)?;
                    let g2 = match cache2.entry(g2_order.clone()) {
                        std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
                        std::collections::hash_map::Entry::Vacant(e) => {
                            e.insert(phi2_hat_conj.derivative(&g2_order)?)
                        }
                    };
                    let v2 = g2.eval(&diff)?;
                    acc += coeff * lambda * v1 * v2;
                }
            }
        }
    }
    Ok(acc)
}

/// How to evaluate the right-hand side of the classical↔generalized relation.
#[derive(Debug, Clone, Copy)]
pub enum RightHandSide {
    /// Closed-form evaluation through the test-function family.
    ClosedForm,
    /// Independent two-stage quadrature (1-d measures only).
    Quadrature {
        t_half: f64,
        t_step: f64,
        omega_half: f64,
        omega_step: f64,
    },
}

impl RightHandSide {
    /// Quadrature with the default desk-scale grid (±8 at step 1/64).
    pub fn default_quadrature() -> Self {
        RightHandSide::Quadrature {
            t_half: 8.0,
            t_step: 1.0 / 64.0,
            omega_half: 8.0,
            omega_step: 1.0 / 64.0,
        }
    }
}

/// Result of the relation check: both sides and their absolute difference.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelationCheck {
    pub left_re: f64,
    pub left_im: f64,
    pub right_re: f64,
    pub right_im: f64,
    pub discrepancy: f64,
}

/// Check `⟨W(μ), Φ⟩ = |det T| ⟨W_T(μ), F₂ P_M F₂⁻¹ Φ⟩` with `M` the product
/// of the inverse classical matrix and `T`, for order-0 `μ` and separable
/// `Φ = φ₁⊗φ₂` from the test-function family.
///
/// The left side uses the pairing formula; the right side either evaluates
/// `conj((φ₁ ⊗ φ̌₂)(M(x, f)))` per chirp in closed form, or runs the partial
/// transform and the ω-pairing as literal Riemann sums (an independent
/// oracle, 1-d only).
pub fn relation_w_wt(
    t: &BlockMatrix2d,
    mu: &AtomicMeasure,
    phi1: &TestFunctionNd,
    phi2: &TestFunctionNd,
    rhs: RightHandSide,
) -> Result<RelationCheck> {
    let d = t.dim();
    let w = wigner_t_exact(t, mu)?;
    let left = pair_wigner_formula(mu, phi1, phi2)?;

    let t0 = BlockMatrix2d::classical_wigner(d);
    let t0_inv = t0
        .assemble()
        .try_inverse()
        .expect("the classical matrix is always invertible");
    let m = t0_inv * t.assemble();
    let phi2_check = phi2.inv_fourier();
    let abs_det = w.abs_det();

    let right = match rhs {
        RightHandSide::ClosedForm => {
            let mut acc = Complex64::new(0.0, 0.0);
            for atom in w.atoms() {
                for chirp in &atom.chirps {
                    let z = {
                        let mut v = DVector::zeros(2 * d);
                        v.rows_mut(0, d).copy_from(&atom.x);
                        v.rows_mut(d, d).copy_from(&chirp.freq);
                        &m * v
                    };
                    let z1 = DVector::from_fn(d, |i, _| z[i]);
                    let z2 = DVector::from_fn(d, |i, _| z[d + i]);
                    acc += chirp.weight * (phi1.eval(&z1)? * phi2_check.eval(&z2)?).conj();
                }
            }
            acc * abs_det
        }
        RightHandSide::Quadrature {
            t_half,
            t_step,
            omega_half,
            omega_step,
        } => {
            if d != 1 {
                return Err(CoreError::InvalidParam(
                    "quadrature right-hand side is implemented for 1-d measures only".into(),
                ));
            }
            let nt = (t_half / t_step).ceil() as i64;
            let nom = (omega_half / omega_step).ceil() as i64;
            let (m11, m12, m21, m22) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
            let mut acc = Complex64::new(0.0, 0.0);
            for atom in w.atoms() {
                let u = atom.x[0];
                // G(ω) = Δt Σ_j H(t_j) e^{−2πi t_j ω} with
                // H(t) = φ₁(m₁₁u + m₁₂t) · φ̌₂(m₂₁u + m₂₂t).
                let samples: Vec<Complex64> = (-nt..=nt)
                    .map(|j| {
                        let tj = j as f64 * t_step;
                        let p1 = phi1.eval(&DVector::from_element(1, m11 * u + m12 * tj))?;
                        let p2 = phi2_check.eval(&DVector::from_element(1, m21 * u + m22 * tj))?;
                        Ok(p1 * p2)
                    })
                    .collect::<Result<_>>()?;
                for chirp in &atom.chirps {
                    let v = chirp.freq[0];
                    let mut inner = Complex64::new(0.0, 0.0);
                    for k in -nom..=nom {
                        let om = k as f64 * omega_step;
                        let mut g = Complex64::new(0.0, 0.0);
                        for (idx, &h) in samples.iter().enumerate() {
                            let tj = (idx as i64 - nt) as f64 * t_step;
                            g += h * Complex64::from_polar(1.0, -TAU * tj * om);
                        }
                        g *= t_step;
                        inner += Complex64::from_polar(1.0, -TAU * v * om) * g.conj();
                    }
                    acc += chirp.weight * inner * omega_step;
                }
            }
            acc * abs_det
        }
    };

    Ok(RelationCheck {
        left_re: left.re,
        left_im: left.im,
        right_re: right.re,
        right_im: right.im,
        discrepancy: (left - right).norm(),
    })
}

// --- wire format -------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct ChirpWire {
    freq: Vec<f64>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct XAtomWire {
    x: Vec<f64>,
    chirps: Vec<ChirpWire>,
}

#[derive(Serialize, Deserialize)]
struct ChirpAtomSumWire {
    d: usize,
    abs_det: f64,
    matrix: BlockMatrix2d,
    atoms: Vec<XAtomWire>,
}

impl Serialize for ChirpAtomSum {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ChirpAtomSumWire {
            d: self.d,
            abs_det: self.abs_det,
            matrix: self.matrix.clone(),
            atoms: self
                .atoms
                .iter()
                .map(|a| XAtomWire {
                    x: a.x.iter().cloned().collect(),
                    chirps: a
                        .chirps
                        .iter()
                        .map(|c| ChirpWire {
                            freq: c.freq.iter().cloned().collect(),
                            re: c.weight.re,
                            im: c.weight.im,
                        })
                        .collect(),
                })
                .collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for ChirpAtomSum {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let wire = ChirpAtomSumWire::deserialize(de)?;
        Ok(ChirpAtomSum {
            d: wire.d,
            abs_det: wire.abs_det,
            matrix: wire.matrix,
            atoms: wire
                .atoms
                .into_iter()
                .map(|a| XAtom {
                    x: DVector::from_column_slice(&a.x),
                    chirps: a
                        .chirps
                        .into_iter()
                        .map(|c| Chirp {
                            weight: Complex64::new(c.re, c.im),
                            freq: DVector::from_column_slice(&c.freq),
                        })
                        .collect(),
                })
                .collect(),
        })
    }
}
