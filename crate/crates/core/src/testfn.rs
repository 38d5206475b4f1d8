//! Gaussian and Hermite–Gaussian test functions, closed under pointwise
//! evaluation, differentiation, complex conjugation, reflection and the
//! Fourier transform (`e^{−2πi xξ}` convention) — everything the pairing
//! formulas need, with no quadrature.
//!
//! The 1-d canonical form is
//!
//! ```text
//! f(x) = A · p(u) · e^{−π (u/w)²} · e^{2πi m u},   u = x − c,
//! ```
//!
//! with complex amplitude `A`, complex polynomial `p`, width `w > 0`,
//! center `c` and modulation `m`. Multi-dimensional test functions are tensor
//! products of 1-d factors.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{CoreError, Result};

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// Polynomial with complex coefficients, `p(u) = Σ pⱼ uʲ` (index = degree).
type Poly = Vec<Complex64>;

fn poly_eval(p: &Poly, u: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in p.iter().rev() {
        acc = acc * u + c;
    }
    acc
}

fn poly_derivative(p: &Poly) -> Poly {
    if p.len() <= 1 {
        return vec![Complex64::new(0.0, 0.0)];
    }
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(j, &c)| c * j as f64)
        .collect()
}

/// `p(u) · (a + b·u)`.
fn poly_mul_linear(p: &Poly, a: Complex64, b: Complex64) -> Poly {
    let mut out = vec![Complex64::new(0.0, 0.0); p.len() + 1];
    for (j, &c) in p.iter().enumerate() {
        out[j] += c * a;
        out[j + 1] += c * b;
    }
    out
}

fn poly_add(p: &Poly, q: &Poly) -> Poly {
    let n = p.len().max(q.len());
    (0..n)
        .map(|j| p.get(j).copied().unwrap_or_default() + q.get(j).copied().unwrap_or_default())
        .collect()
}

fn poly_trim(mut p: Poly) -> Poly {
    while p.len() > 1 && p.last().is_some_and(|c| c.norm() == 0.0) {
        p.pop();
    }
    p
}

/// A 1-d Hermite–Gaussian test function in canonical form.
#[derive(Debug, Clone)]
pub struct GaussHermite1d {
    amp: Complex64,
    poly: Poly,
    center: f64,
    width: f64,
    modulation: f64,
}

impl GaussHermite1d {
    /// The plain Gaussian `e^{−π((x−c)/w)²}`.
    pub fn gaussian(center: f64, width: f64) -> Result<Self> {
        if width <= 0.0 || !width.is_finite() {
            return Err(CoreError::InvalidParam(
                "gaussian width must be positive".into(),
            ));
        }
        Ok(Self {
            amp: Complex64::new(1.0, 0.0),
            poly: vec![Complex64::new(1.0, 0.0)],
            center,
            width,
            modulation: 0.0,
        })
    }

    /// A modulated Gaussian `e^{−π((x−c)/w)²} e^{2πi m (x−c)}`.
    pub fn modulated_gaussian(center: f64, width: f64, modulation: f64) -> Result<Self> {
        let mut g = Self::gaussian(center, width)?;
        g.modulation = modulation;
        Ok(g)
    }

    /// The k-th Hermite function `H_k(√(2π)(x−c)) e^{−π(x−c)²}` (unit width),
    /// an eigenfunction of the Fourier transform with eigenvalue `(−i)^k`.
    pub fn hermite(k: usize, center: f64) -> Self {
        // Hermite polynomials by recurrence, evaluated at √(2π)·u: keep
        // coefficients in u directly.
        let s = TAU.sqrt(); // √(2π)
        let mut h_prev: Poly = vec![Complex64::new(1.0, 0.0)]; // H₀(su) = 1
        if k == 0 {
            return Self {
                amp: Complex64::new(1.0, 0.0),
                poly: h_prev,
                center,
                width: 1.0,
                modulation: 0.0,
            };
        }
        // H₁(su) = 2su
        let mut h: Poly = vec![Complex64::new(0.0, 0.0), Complex64::new(2.0 * s, 0.0)];
        for j in 1..k {
            // H_{j+1}(y) = 2y H_j(y) − 2j H_{j−1}(y) with y = s·u.
            let two_y_h =
                poly_mul_linear(&h, Complex64::new(0.0, 0.0), Complex64::new(2.0 * s, 0.0));
            let scaled_prev: Poly = h_prev.iter().map(|&c| c * (-2.0 * j as f64)).collect();
            let next = poly_add(&two_y_h, &scaled_prev);
            h_prev = h;
            h = next;
        }
        Self {
            amp: Complex64::new(1.0, 0.0),
            poly: h,
            center,
            width: 1.0,
            modulation: 0.0,
        }
    }

    /// Scale the amplitude by a complex factor.
    pub fn scaled(mut self, factor: Complex64) -> Self {
        self.amp *= factor;
        self
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let u = x - self.center;
        let gauss = (-std::f64::consts::PI * (u / self.width).powi(2)).exp();
        let phase = Complex64::from_polar(1.0, TAU * self.modulation * u);
        self.amp * poly_eval(&self.poly, u) * gauss * phase
    }

    /// First derivative, in canonical form.
    pub fn derivative(&self) -> Self {
        // (p·G)' = (p' + p·(logG)')·G with (log G)' = −2πu/w² + 2πi m.
        let dp = poly_derivative(&self.poly);
        let log_deriv = poly_mul_linear(
            &self.poly,
            Complex64::new(0.0, TAU * self.modulation),
            Complex64::new(-TAU / (self.width * self.width), 0.0),
        );
        Self {
            amp: self.amp,
            poly: poly_trim(poly_add(&dp, &log_deriv)),
            center: self.center,
            width: self.width,
            modulation: self.modulation,
        }
    }

    /// n-th derivative.
    pub fn derivative_n(&self, n: usize) -> Self {
        let mut f = self.clone();
        for _ in 0..n {
            f = f.derivative();
        }
        f
    }

    /// Complex conjugate, in canonical form.
    pub fn conj(&self) -> Self {
        Self {
            amp: self.amp.conj(),
            poly: self.poly.iter().map(|c| c.conj()).collect(),
            center: self.center,
            width: self.width,
            modulation: -self.modulation,
        }
    }

    /// Reflection `x ↦ f(−x)`, in canonical form.
    pub fn reflect(&self) -> Self {
        Self {
            amp: self.amp,
            poly: self
                .poly
                .iter()
                .enumerate()
                .map(|(j, &c)| if j % 2 == 1 { -c } else { c })
                .collect(),
            center: -self.center,
            width: self.width,
            modulation: -self.modulation,
        }
    }

    /// Fourier transform `f̂(ξ) = ∫ f(x) e^{−2πi xξ} dx`, in canonical form.
    pub fn fourier(&self) -> Self {
        // ∫ uʲ e^{−π(u/w)²} e^{−2πiuη} du = (i/2π)ʲ w rⱼ(η) e^{−π(wη)²}
        // with r₀ = 1, r_{j+1} = rⱼ' − 2πw²·η·rⱼ; η = ξ − m. The center turns
        // into a modulation −c, the modulation into the new center m, and the
        // width inverts.
        let w = self.width;
        let t = TAU * w * w;
        let mut r: Poly = vec![Complex64::new(1.0, 0.0)];
        let mut acc: Poly = vec![Complex64::new(0.0, 0.0)];
        let i_over_2pi = Complex64::new(0.0, 1.0) / TAU;
        let mut scale = Complex64::new(1.0, 0.0);
        for (j, &pj) in self.poly.iter().enumerate() {
            if j > 0 {
                r = poly_trim(poly_add(
                    &poly_derivative(&r),
                    &poly_mul_linear(&r, Complex64::new(0.0, 0.0), Complex64::new(-t, 0.0)),
                ));
                scale *= i_over_2pi;
            }
            let contrib: Poly = r.iter().map(|&c| c * pj * scale).collect();
            acc = poly_add(&acc, &contrib);
        }
        let phase = Complex64::from_polar(1.0, -TAU * self.center * self.modulation);
        Self {
            amp: self.amp * w * phase,
            poly: poly_trim(acc),
            center: self.modulation,
            width: 1.0 / w,
            modulation: -self.center,
        }
    }

    /// Inverse Fourier transform `F⁻¹[f](x) = F[f](−x)`.
    pub fn inv_fourier(&self) -> Self {
        self.fourier().reflect()
    }
}

/// Tensor product of 1-d factors: `Φ(x) = Π fᵢ(xᵢ)`.
#[derive(Debug, Clone)]
pub struct TestFunctionNd {
    factors: Vec<GaussHermite1d>,
}

impl TestFunctionNd {
    pub fn new(factors: Vec<GaussHermite1d>) -> Result<Self> {
        if factors.is_empty() {
            return Err(CoreError::InvalidParam(
                "test function needs at least one factor".into(),
            ));
        }
        Ok(Self { factors })
    }

    /// The standard unit Gaussian `e^{−π|x|²}` in dimension d.
    pub fn standard_gaussian(d: usize) -> Result<Self> {
        Self::new(
            (0..d)
                .map(|_| GaussHermite1d::gaussian(0.0, 1.0))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn dim(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[GaussHermite1d] {
        &self.factors
    }

    pub fn eval(&self, x: &DVector<f64>) -> Result<Complex64> {
        if x.len() != self.factors.len() {
            return Err(CoreError::DimensionMismatch {
                context: "test function evaluation point",
                expected: self.factors.len(),
                got: x.len(),
            });
        }
        Ok(self
            .factors
            .iter()
            .zip(x.iter())
            .map(|(f, &xi)| f.eval(xi))
            .product())
    }

    /// Partial derivative `∂^γ` (one order per axis).
    pub fn derivative(&self, orders: &[usize]) -> Result<Self> {
        if orders.len() != self.factors.len() {
            return Err(CoreError::DimensionMismatch {
                context: "derivative multi-index",
                expected: self.factors.len(),
                got: orders.len(),
            });
        }
        Ok(Self {
            factors: self
                .factors
                .iter()
                .zip(orders)
                .map(|(f, &n)| f.derivative_n(n))
                .collect(),
        })
    }

    pub fn conj(&self) -> Self {
        Self {
            factors: self.factors.iter().map(|f| f.conj()).collect(),
        }
    }

    pub fn fourier(&self) -> Self {
        Self {
            factors: self.factors.iter().map(|f| f.fourier()).collect(),
        }
    }

    pub fn inv_fourier(&self) -> Self {
        Self {
            factors: self.factors.iter().map(|f| f.inv_fourier()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force Fourier transform by Riemann sum, the oracle for the
    /// closed forms (Gaussian decay makes [−12, 12] plenty).
    fn fourier_quadrature(f: &GaussHermite1d, xi: f64) -> Complex64 {
        let n = 6000;
        let (lo, hi) = (-12.0, 12.0);
        let h = (hi - lo) / n as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..=n {
            let x = lo + j as f64 * h;
            let weight = if j == 0 || j == n { 0.5 } else { 1.0 };
            acc += weight * f.eval(x) * Complex64::from_polar(1.0, -TAU * x * xi);
        }
        acc * h
    }

    fn funky() -> GaussHermite1d {
        // p(u) = i − 0.3u + u², c = 0.4, w = 0.8, m = −0.6, A = 2 − i.
        GaussHermite1d {
            amp: Complex64::new(2.0, -1.0),
            poly: vec![
                Complex64::new(0.0, 1.0),
                Complex64::new(-0.3, 0.0),
                Complex64::new(1.0, 0.0),
            ],
            center: 0.4,
            width: 0.8,
            modulation: -0.6,
        }
    }

    #[test]
    fn unit_gaussian_is_its_own_transform() {
        let g = GaussHermite1d::gaussian(0.0, 1.0).unwrap();
        let gh = g.fourier();
        for &x in &[0.0, 0.3, -1.1, 2.4] {
            assert!((gh.eval(x) - g.eval(x)).norm() < 1e-14);
        }
    }

    #[test]
    fn width_scaling_of_the_transform() {
        // F[e^{−π(x/w)²}](ξ) = w·e^{−π(wξ)²}.
        let w = 0.35;
        let g = GaussHermite1d::gaussian(0.0, w).unwrap();
        let gh = g.fourier();
        for &xi in &[0.0, 0.7, -1.9] {
            let expect = w * (-std::f64::consts::PI * (w * xi).powi(2)).exp();
            assert!((gh.eval(xi) - Complex64::new(expect, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn closed_form_transform_matches_quadrature() {
        let f = funky();
        let fh = f.fourier();
        for &xi in &[-1.3, 0.0, 0.2, 2.1] {
            let oracle = fourier_quadrature(&f, xi);
            let got = fh.eval(xi);
            assert!(
                (got - oracle).norm() < 1e-9,
                "transform mismatch at ξ={xi}: {got} vs oracle {oracle}"
            );
        }
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let f = funky().derivative();
        let base = funky();
        let h = 1e-5;
        for &x in &[-0.7, 0.1, 0.9] {
            let fd = (base.eval(x + h) - base.eval(x - h)) / (2.0 * h);
            assert!(
                (f.eval(x) - fd).norm() < 1e-6,
                "derivative mismatch at x={x}: {} vs {fd}",
                f.eval(x)
            );
        }
        // Second derivative through derivative_n.
        let f2 = base.derivative_n(2);
        for &x in &[-0.2, 0.6] {
            let fd2 = (base.eval(x + h) - 2.0 * base.eval(x) + base.eval(x - h)) / (h * h);
            assert!((f2.eval(x) - fd2).norm() < 1e-4);
        }
    }

    #[test]
    fn hermite_functions_are_fourier_eigenfunctions() {
        for k in 0..=4 {
            let h = GaussHermite1d::hermite(k, 0.0);
            let hh = h.fourier();
            let eig = Complex64::new(0.0, -1.0).powu(k as u32);
            for &x in &[0.15, -0.8, 1.3] {
                let expect = eig * h.eval(x);
                assert!(
                    (hh.eval(x) - expect).norm() < 1e-10 * (1.0 + expect.norm()),
                    "Hermite k={k} eigenvalue mismatch at {x}"
                );
            }
        }
    }

    #[test]
    fn conj_reflect_and_inverse_are_consistent() {
        let f = funky();
        for &x in &[-1.2, 0.33, 0.4] {
            assert!((f.conj().eval(x) - f.eval(x).conj()).norm() < 1e-14);
            assert!((f.reflect().eval(x) - f.eval(-x)).norm() < 1e-14);
        }
        // F⁻¹F = identity on the family.
        let round = f.fourier().inv_fourier();
        for &x in &[-0.9, 0.0, 0.8] {
            assert!((round.eval(x) - f.eval(x)).norm() < 1e-11);
        }
    }

    #[test]
    fn tensor_products_evaluate_and_differentiate_per_axis() {
        let phi = TestFunctionNd::new(vec![
            GaussHermite1d::gaussian(0.0, 1.0).unwrap(),
            GaussHermite1d::modulated_gaussian(0.5, 2.0, 1.5).unwrap(),
        ])
        .unwrap();
        let x = DVector::from_column_slice(&[0.3, -0.7]);
        let by_hand = phi.factors()[0].eval(0.3) * phi.factors()[1].eval(-0.7);
        assert!((phi.eval(&x).unwrap() - by_hand).norm() < 1e-15);

        let dphi = phi.derivative(&[1, 0]).unwrap();
        let by_hand = phi.factors()[0].derivative().eval(0.3) * phi.factors()[1].eval(-0.7);
        assert!((dphi.eval(&x).unwrap() - by_hand).norm() < 1e-15);
    }
}
