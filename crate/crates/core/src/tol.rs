//! Numerical tolerances shared across the toolkit.

/// Max entrywise `|A - A^H|` accepted (scaled by `max(1, max|A|)`) before
/// a matrix is symmetrized.
pub const HERMITIAN: f64 = 1e-12;
/// Allowed deviation of a density matrix trace from one.
pub const TRACE: f64 = 1e-12;
/// Smallest eigenvalue still counted as positive semidefinite.
pub const PSD: f64 = 1e-10;
/// Max-entry threshold for `rho F = rho` and `F rho F = rho`.
pub const CLASSIFY: f64 = 1e-10;
/// Default slack for criterion verdicts (`satisfied <=> margin >= -tol`).
pub const CRITERION: f64 = 1e-10;
/// Margins with magnitude below this are treated as "on the boundary" when
/// comparing criteria.
pub const DEAD_BAND: f64 = 1e-8;
/// Eigenvalues this close to zero may be discarded as structural zeros.
pub const ZERO_EIGENVALUE: f64 = 1e-11;
/// Default feasibility tolerance of the extension solver.
pub const FEASIBILITY: f64 = 1e-7;
