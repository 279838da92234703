//! PPT symmetric extensions of symmetric `N`-qubit states.
//!
//! A symmetric `M`-qubit state `X` extends the target `sigma` when its
//! `N`-qubit marginal equals `sigma` and every bipartition of `X` is PPT. If no
//! such `X` exists for some `M > N`, the target is entangled.
//!
//! Everything is done on `(M+1) x (M+1)` Dicke-basis matrices. For each
//! representative split `(a, M - a)` let `L_a(X) = PT_A(V_a X V_a^H)`, with
//! `V_a` the Dicke embedding; `L_a` is an isometry. The solver works in the
//! product space of `(X, Y_1, ..., Y_K)` and runs Dykstra's alternating
//! projections between
//!
//! * the affine set `{ Y_a = L_a(X), Tr_{M-N}(X) = sigma }`, whose projection
//!   is closed form (average through the adjoints, then a least-squares
//!   correction of the marginal), and
//! * the product of PSD cones `{ X >= 0, Y_a >= 0 }`, projected by clipping
//!   eigenvalues.
//!
//! Alternating projections cannot certify infeasibility. A persistent
//! positive gap is reported as `InfeasibleEvidence`; a proof would need a dual
//! witness, which this module does not produce.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{eigvalsh, partial_transpose_raw, project_psd, ComplexMatrix, C64, ZERO};
use crate::symspace::{
    compressed_pt_spectrum, dicke_embedding, dicke_partial_trace, dicke_partial_trace_raw, representative_splits,
    split_coefficient, SymmetricState,
};
use crate::tol;

#[derive(Clone, Debug)]
pub struct ExtensionProblem {
    pub target: SymmetricState,
    /// Number of qubits of the extension, `M > N`.
    pub extension_qubits: usize,
    pub tol_feas: f64,
    pub max_iter: usize,
}

impl ExtensionProblem {
    pub fn new(target: SymmetricState, extension_qubits: usize) -> Self {
        Self { target, extension_qubits, tol_feas: tol::FEASIBILITY, max_iter: 50_000 }
    }

    fn validate(&self) -> Result<()> {
        if self.extension_qubits <= self.target.qubits() {
            return Err(Error::ConfigInvalid(format!(
                "extension size {} must exceed the target size {}",
                self.extension_qubits,
                self.target.qubits()
            )));
        }
        if self.target.qubits() == 0 {
            return Err(Error::ConfigInvalid("target has no qubits".into()));
        }
        if !(self.tol_feas > 0.0) || self.max_iter == 0 {
            return Err(Error::ConfigInvalid("tolerance and iteration budget must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtensionStatus {
    Feasible,
    InfeasibleEvidence,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtensionResult {
    pub status: ExtensionStatus,
    #[serde(skip)]
    pub witness: Option<SymmetricState>,
    /// Largest Frobenius distance moved by one constraint family's projection
    /// at the final iterate.
    pub residual_gap: f64,
    pub iterations: usize,
    /// Gap after every iteration.
    #[serde(skip)]
    pub gap_history: Vec<f64>,
    /// Increases of the gap after the burn-in period.
    pub monotonicity_violations: usize,
}

impl ExtensionResult {
    /// Gaps over the last 10% of the iterations.
    pub fn final_window(&self) -> &[f64] {
        let n = self.gap_history.len();
        &self.gap_history[n - (n / 10).max(1).min(n)..]
    }
}

/// Iterations excluded from the monotonicity audit.
const BURN_IN: usize = 100;
/// Relative drop allowed across the final window for a gap to count as stable.
const STABLE_DROP: f64 = 0.01;

/// Real matrix of the Dicke partial trace acting on row-major vectorized
/// `(M+1) x (M+1)` matrices.
fn partial_trace_operator(total: usize, keep: usize) -> DMatrix<f64> {
    let (nm, nn) = (total + 1, keep + 1);
    let mut t = DMatrix::zeros(nn * nn, nm * nm);
    for k in 0..=total {
        for l in 0..=total {
            for m in 0..=total - keep {
                if m > k || m > l || k - m > keep || l - m > keep {
                    continue;
                }
                let c = split_coefficient(total, keep, k, k - m) * split_coefficient(total, keep, l, l - m);
                t[((k - m) * nn + (l - m), k * nm + l)] += c;
            }
        }
    }
    t
}

/// Projection onto `{X : Tr_{M-N}(X) = sigma}` in the Frobenius metric.
pub struct AffineProjector {
    total: usize,
    keep: usize,
    target: Vec<C64>,
    op: DMatrix<f64>,
    /// `T^T (T T^T)^+`
    correction: DMatrix<f64>,
}

impl AffineProjector {
    pub fn new(target: &SymmetricState, total: usize) -> Result<Self> {
        let keep = target.qubits();
        let op = partial_trace_operator(total, keep);
        let gram = &op * op.transpose();
        let inv = gram
            .pseudo_inverse(1e-12)
            .map_err(|e| Error::ConfigInvalid(format!("marginal map pseudo-inverse: {e}")))?;
        let correction = op.transpose() * inv;
        Ok(Self { total, keep, target: target.matrix().data().to_vec(), op, correction })
    }

    pub fn project(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let v = x.data();
        let n_out = self.target.len();
        let mut resid = vec![ZERO; n_out];
        for (r, slot) in resid.iter_mut().enumerate() {
            let mut s = ZERO;
            for (c, &xv) in v.iter().enumerate() {
                let w = self.op[(r, c)];
                if w != 0.0 {
                    s += xv * w;
                }
            }
            *slot = s - self.target[r];
        }
        let side = self.total + 1;
        let out = ComplexMatrix::from_fn(side, side, |i, j| {
            let c = i * side + j;
            let mut s = v[c];
            for (r, &res) in resid.iter().enumerate() {
                s -= res * self.correction[(c, r)];
            }
            s
        });
        out.hermitian_part()
    }

    /// Max entrywise deviation of the marginal from the target.
    pub fn residual(&self, x: &ComplexMatrix) -> f64 {
        let m = dicke_partial_trace_raw(x, self.total, self.keep);
        m.data().iter().zip(&self.target).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// `L_a(X) = PT_A(V X V^H)` for one split, with its adjoint.
struct SplitMap {
    split: (usize, usize),
    iso: ComplexMatrix,
}

impl SplitMap {
    fn new(total: usize, split: (usize, usize)) -> Result<Self> {
        Ok(Self { split, iso: dicke_embedding(total, split)?.isometry })
    }

    fn dims(&self) -> [usize; 2] {
        [self.split.0 + 1, self.split.1 + 1]
    }

    fn forward(&self, x: &ComplexMatrix) -> ComplexMatrix {
        partial_transpose_raw(&x.conjugate_by(&self.iso), &self.dims(), &[0])
    }

    fn adjoint(&self, y: &ComplexMatrix) -> ComplexMatrix {
        partial_transpose_raw(y, &self.dims(), &[0]).compress_by(&self.iso)
    }
}

/// A point of the lifted space `(X, Y_1, ..., Y_K)`.
#[derive(Clone)]
struct Lifted {
    x: ComplexMatrix,
    ys: Vec<ComplexMatrix>,
}

impl Lifted {
    fn zip(&self, other: &Self, f: impl Fn(&ComplexMatrix, &ComplexMatrix) -> ComplexMatrix) -> Self {
        Self { x: f(&self.x, &other.x), ys: self.ys.iter().zip(&other.ys).map(|(a, b)| f(a, b)).collect() }
    }

    fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    fn zeros_like(&self) -> Self {
        self.zip(self, |a, _| ComplexMatrix::zeros(a.rows(), a.cols()))
    }
}

struct Solver {
    affine: AffineProjector,
    maps: Vec<SplitMap>,
}

impl Solver {
    fn lift(&self, x: ComplexMatrix) -> Lifted {
        let ys = self.maps.iter().map(|m| m.forward(&x)).collect();
        Lifted { x, ys }
    }

    /// Projection onto the affine set of the lifted space. Every `L_a` is an
    /// isometry, so the nearest consistent `X` is the affine projection of
    /// `(X + sum_a L_a^*(Y_a)) / (1 + K)`.
    fn project_affine(&self, p: &Lifted) -> Lifted {
        let mut acc = p.x.clone();
        for (m, y) in self.maps.iter().zip(&p.ys) {
            acc = &acc + &m.adjoint(y);
        }
        let avg = acc.scale(1.0 / (1 + self.maps.len()) as f64);
        self.lift(self.affine.project(&avg))
    }

    /// Each block is a split-wise PT-PSD set (or the PSD set of `X`); their
    /// projections act independently.
    fn project_cones(&self, p: &Lifted) -> Result<Lifted> {
        Ok(Lifted { x: project_psd(&p.x)?, ys: p.ys.iter().map(project_psd).collect::<Result<_>>()? })
    }

    /// Distance moved by each constraint family's projection at a point of
    /// the affine set; the affine family itself moves nothing there.
    fn gap(&self, p: &Lifted) -> Result<f64> {
        let neg = |m: &ComplexMatrix| -> Result<f64> {
            Ok(eigvalsh(m)?.iter().map(|l| l.min(0.0).powi(2)).sum::<f64>().sqrt())
        };
        let mut g = neg(&p.x)?;
        for y in &p.ys {
            g = g.max(neg(y)?);
        }
        Ok(g)
    }
}

pub fn find_extension(problem: &ExtensionProblem) -> Result<ExtensionResult> {
    problem.validate()?;
    let total = problem.extension_qubits;
    let solver = Solver {
        affine: AffineProjector::new(&problem.target, total)?,
        maps: representative_splits(total)
            .into_iter()
            .map(|s| SplitMap::new(total, s))
            .collect::<Result<_>>()?,
    };

    let start = ComplexMatrix::identity(total + 1).scale(1.0 / (total + 1) as f64);
    let mut x = solver.lift(solver.affine.project(&start));
    let mut p = x.zeros_like();
    let mut q = x.zeros_like();
    let mut history = Vec::with_capacity(problem.max_iter);
    let mut candidate = x.x.clone();
    let mut violations = 0;

    for it in 0..problem.max_iter {
        let y = solver.project_affine(&x.add(&p));
        p = x.add(&p).sub(&y);
        let gap = solver.gap(&y)?;
        if it > BURN_IN && history.last().is_some_and(|&prev| gap > prev * (1.0 + 1e-9) + 1e-15) {
            violations += 1;
        }
        history.push(gap);
        candidate = y.x.clone();
        if gap <= problem.tol_feas {
            let witness = SymmetricState::from_parts(candidate.clone(), total);
            if verify_extension(&witness, &problem.target, problem.tol_feas)?.ok {
                return Ok(ExtensionResult {
                    status: ExtensionStatus::Feasible,
                    witness: Some(witness),
                    residual_gap: gap,
                    iterations: it + 1,
                    gap_history: history,
                    monotonicity_violations: violations,
                });
            }
        }
        let z = y.add(&q);
        x = solver.project_cones(&z)?;
        q = z.sub(&x);
    }

    let witness = SymmetricState::from_parts(candidate, total);
    let mut result = ExtensionResult {
        status: ExtensionStatus::Inconclusive,
        witness: None,
        residual_gap: *history.last().unwrap_or(&f64::INFINITY),
        iterations: problem.max_iter,
        gap_history: history,
        monotonicity_violations: violations,
    };
    if verify_extension(&witness, &problem.target, problem.tol_feas)?.ok {
        result.status = ExtensionStatus::Feasible;
        result.witness = Some(witness);
    } else if gap_is_stable(result.final_window(), problem.tol_feas) {
        result.status = ExtensionStatus::InfeasibleEvidence;
    }
    Ok(result)
}

/// A gap counts as persistent when it stays above `10 tol` throughout the
/// window and does not shrink by more than 1% across it.
pub fn gap_is_stable(window: &[f64], tol: f64) -> bool {
    let (Some(&first), Some(&last)) = (window.first(), window.last()) else {
        return false;
    };
    let min = window.iter().copied().fold(f64::INFINITY, f64::min);
    min > 10.0 * tol && last >= first * (1.0 - STABLE_DROP)
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtensionCheck {
    pub ok: bool,
    /// Max entrywise deviation of the marginal from the target.
    pub marginal_residual: f64,
    pub trace_error: f64,
    pub min_eigenvalue: f64,
    /// `(a, min eigenvalue of the partial transpose over a qubits)`.
    pub pt_min_eigenvalues: Vec<(usize, f64)>,
    pub violations: Vec<String>,
}

/// Independent check of a candidate extension: marginal, positivity and
/// positivity of every bipartite partial transpose, each within `tol`.
pub fn verify_extension(candidate: &SymmetricState, target: &SymmetricState, tol: f64) -> Result<ExtensionCheck> {
    let (m, n) = (candidate.qubits(), target.qubits());
    if m <= n {
        return Err(Error::SizeMismatch(format!("candidate has {m} qubits, target {n}")));
    }
    let mut violations = Vec::new();
    let marginal = dicke_partial_trace(candidate, n)?;
    let marginal_residual = marginal.matrix().max_abs_diff(target.matrix());
    if marginal_residual > tol {
        violations.push(format!("marginal differs from target by {marginal_residual:e}"));
    }
    let trace_error = (candidate.matrix().trace().re - 1.0).abs();
    if trace_error > tol {
        violations.push(format!("trace off by {trace_error:e}"));
    }
    let min_eigenvalue = eigvalsh(candidate.matrix())?.last().copied().unwrap_or(f64::NAN);
    if min_eigenvalue < -tol {
        violations.push(format!("not PSD: minimum eigenvalue {min_eigenvalue:e}"));
    }
    let mut pt_min_eigenvalues = Vec::new();
    for split in representative_splits(m) {
        let l = compressed_pt_spectrum(candidate, split)?.min();
        if l < -tol {
            violations.push(format!("NPT across {}:{} (minimum eigenvalue {l:e})", split.0, split.1));
        }
        pt_min_eigenvalues.push((split.0, l));
    }
    Ok(ExtensionCheck {
        ok: violations.is_empty(),
        marginal_residual,
        trace_error,
        min_eigenvalue,
        pt_min_eigenvalues,
        violations,
    })
}
