//! Numerical tolerances used across the crate, collected in one place so
//! every threshold has a name, a default and a rationale.

/// Relative determinant floor: a 2d×2d determinant counts as nonzero only if
/// `|det| > DET_REL_TOL · scale^(2d)` where `scale` is the largest absolute
/// entry. Scaling by `scale^(2d)` makes the test invariant under uniform
/// rescaling of the matrix.
pub const DET_REL_TOL: f64 = 1e-10;

/// Relative Frobenius tolerance for matrix equality: `‖X−Y‖_F` must not
/// exceed `MAT_REL_TOL · max(1, ‖X‖_F, ‖Y‖_F)`.
pub const MAT_REL_TOL: f64 = 1e-9;

/// Condition-number ceiling above which a formally nonzero determinant is
/// reported as marginal rather than trusted.
pub const COND_MAX: f64 = 1e12;

/// Point-set merge radius: positions closer than this are identified when a
/// set is normalized.
pub const MERGE_TOL: f64 = 1e-9;

/// Minimum-gap threshold under which a windowed gap profile counts as
/// evidence of accumulation.
pub const ACCUMULATION_EPS: f64 = 1e-3;

/// Hard cap on the number of atoms/points any enumeration may produce.
pub const ATOM_CAP: usize = 1_000_000;

/// Hard cap on the number of grid samples a transform output may hold;
/// larger requests must go through axis slicing (axes of count 1).
pub const GRID_CAP: usize = 64 * 64 * 64 * 64;

/// Continued-fraction denominator bound for the rationality test.
pub const RATIONAL_DENOM_BOUND: u64 = 1_000_000;
