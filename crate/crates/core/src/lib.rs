//! Matrix-parameterized Wigner transforms of atomic measures.
//!
//! A real invertible 2d×2d block matrix `T = (A₀ B₀ / C₀ D₀)` defines a
//! time-frequency transform
//!
//! ```text
//! W_T(μ)(x, ω) = ∫ e^{−2πi t·ω} μ(A₀x + B₀t) conj(μ(C₀x + D₀t)) dt
//! ```
//!
//! generalizing the classical Wigner distribution (`T = (Id ½Id / Id −½Id)`)
//! and the ambiguity function (`T = (½Id Id / −½Id Id)`). For measures that
//! are locally finite sums of point masses (and their derivatives), `W_T`
//! has an exact closed form as a sum of chirp-weighted x-atoms; the position
//! of those atoms is governed entirely by the blocks of `T⁻¹`, which is what
//! makes the transform usable as a structure detector for crystal- and
//! quasicrystal-like supports.
//!
//! The crate is organized around that pipeline:
//!
//! - [`blockmat`]: block 2d×2d algebra — inversion into blocks, the dual
//!   matrix, Cohen normal form, and determinant equivalences between blocks
//!   of a matrix and blocks of its inverse.
//! - [`pointset`]: finite point sets with merge tolerance — Minkowski sums
//!   and differences, linear images, and windowed minimum-gap profiles.
//! - [`measure`]: atomic measures with derivative atoms, trigonometric
//!   polynomial coefficients, lattice combs and model-set generators, and
//!   exact Fourier evaluation.
//! - [`testfn`]: Gaussian/Hermite test functions with closed-form
//!   derivatives and Fourier transforms, used by the pairing formulas.
//! - [`wexact`]: the exact chirp-atom engine for order-0 atomic measures,
//!   the derivative-atom pairing formula, and the classical↔general
//!   transform relation.
//! - [`wgrid`]: sampled-signal engine — grids, mollified realizations,
//!   the transform on grids, partial Fourier transforms, duality checks and
//!   peak extraction.
//! - [`detect`]: support-based structure detection — hypothesis checks,
//!   lattice-difference maps, the irrational-slope counterexample scan, and
//!   end-to-end detection reports.

pub mod blockmat;
pub mod detect;
pub mod error;
pub mod measure;
pub mod multiindex;
pub mod pointset;
pub mod testfn;
pub mod tol;
pub mod wexact;
pub mod wgrid;

pub use blockmat::{BlockMatrix2d, DetClass, DetVerdict, InverseBlocks, SchurReport};
pub use detect::{CounterexampleScan, DetectionReport, Route, SupportData, Verdict};
pub use error::{CoreError, Result};
pub use measure::{Atom, AtomicMeasure, QuasicrystalSpec, TrigPolynomial};
pub use pointset::{PointSet, WindowedGapProfile};
pub use testfn::{GaussHermite1d, TestFunctionNd};
pub use wexact::{ChirpAtomSum, RelationCheck, RightHandSide};
pub use wgrid::{Axis, DualityCheck, GridField, PeakSet, SignalSpec};
