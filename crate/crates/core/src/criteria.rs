//! Separability criteria for bipartite states, specialised to states that are
//! symmetric or invariant under the flip of the two parties.
//!
//! The expectation-value matrix is `eta_kl = <M_k (x) M_l>` for an
//! orthonormal Hermitian operator basis `{M_k}` (`Tr(M_k M_l) = delta_kl`),
//! and the correlation matrix is
//! `C_kl = eta_kl - <M_k (x) 1><1 (x) M_l>`.
//!
//! For symmetric states, `eta >= 0`, PPT, CCNR, `C >= 0` and the covariance
//! inequalities all detect the same states; for merely invariant states only
//! `eta >= 0` and `C >= 0` coincide. [`equivalence_report`] checks this on a
//! given state.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    min_eigenvalue, partial_trace_raw, partial_transpose, realign, singular_values, ComplexMatrix, DensityMatrix,
    C64, ZERO,
};
use crate::symspace::{classify, Symmetry};
use crate::tol;

/// `d^2` Hermitian `d x d` matrices, orthonormal under `Tr(A B)`.
#[derive(Clone, Debug)]
pub struct ObservableBasis {
    pub dim: usize,
    pub observables: Vec<ComplexMatrix>,
}

impl ObservableBasis {
    /// New basis `M'_k = sum_l O_kl M_l` for a real orthogonal `O`.
    pub fn rotated(&self, o: &DMatrix<f64>) -> Self {
        let n = self.observables.len();
        let observables = (0..n)
            .map(|k| {
                let mut acc = ComplexMatrix::zeros(self.dim, self.dim);
                for l in 0..n {
                    if o[(k, l)] != 0.0 {
                        acc = &acc + &self.observables[l].scale(o[(k, l)]);
                    }
                }
                acc
            })
            .collect();
        Self { dim: self.dim, observables }
    }

    /// `Tr(M_k M_l)` for all pairs.
    pub fn gram(&self) -> DMatrix<f64> {
        let n = self.observables.len();
        DMatrix::from_fn(n, n, |k, l| self.observables[k].matmul(&self.observables[l]).trace().re)
    }

    /// `sum_k M_k (x) M_k`
    pub fn completeness_sum(&self) -> ComplexMatrix {
        let d = self.dim;
        self.observables
            .iter()
            .fold(ComplexMatrix::zeros(d * d, d * d), |acc, m| &acc + &m.kron(m))
    }
}

/// Normalized identity followed by the `d^2 - 1` generalized Gell-Mann
/// matrices, each with unit Hilbert-Schmidt norm.
pub fn gell_mann_basis(d: usize) -> ObservableBasis {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut obs = vec![ComplexMatrix::identity(d).scale(1.0 / (d as f64).sqrt())];
    for j in 0..d {
        for k in j + 1..d {
            let mut s = ComplexMatrix::zeros(d, d);
            s[(j, k)] = C64::new(h, 0.0);
            s[(k, j)] = C64::new(h, 0.0);
            obs.push(s);
            let mut a = ComplexMatrix::zeros(d, d);
            a[(j, k)] = C64::new(0.0, -h);
            a[(k, j)] = C64::new(0.0, h);
            obs.push(a);
        }
    }
    for l in 1..d {
        let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut diag = vec![0.0; d];
        diag[..l].iter_mut().for_each(|x| *x = norm);
        diag[l] = -(l as f64) * norm;
        obs.push(ComplexMatrix::diag(&diag));
    }
    ObservableBasis { dim: d, observables: obs }
}

/// `eta_kl = <M_k (x) M_l>`, real `d_A^2 x d_B^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct EtaMatrix(pub DMatrix<f64>);

/// `C_kl = eta_kl - <M_k (x) 1><1 (x) M_l>`.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationMatrix(pub DMatrix<f64>);

/// `X_l = Tr_B[rho (1 (x) B_l)]` for each B-side observable.
fn b_contractions(rho: &ComplexMatrix, da: usize, db: usize, basis_b: &ObservableBasis) -> Vec<ComplexMatrix> {
    basis_b
        .observables
        .iter()
        .map(|b| {
            ComplexMatrix::from_fn(da, da, |i, j| {
                let mut s = ZERO;
                for k in 0..db {
                    for l in 0..db {
                        s += rho[(i * db + k, j * db + l)] * b[(l, k)];
                    }
                }
                s
            })
        })
        .collect()
}

fn tr_product(x: &ComplexMatrix, a: &ComplexMatrix) -> f64 {
    let n = x.rows();
    let mut s = ZERO;
    for i in 0..n {
        for j in 0..n {
            s += x[(i, j)] * a[(j, i)];
        }
    }
    s.re
}

fn eta_with_bases(rho: &DensityMatrix, basis_a: &ObservableBasis, basis_b: &ObservableBasis) -> Result<DMatrix<f64>> {
    let (da, db) = rho.bipartite_dims()?;
    if basis_a.dim != da || basis_b.dim != db {
        return Err(Error::SizeMismatch(format!(
            "observable bases of dimension ({}, {}) for a {da}x{db} state",
            basis_a.dim, basis_b.dim
        )));
    }
    let xs = b_contractions(rho.matrix(), da, db, basis_b);
    Ok(DMatrix::from_fn(basis_a.observables.len(), xs.len(), |k, l| {
        tr_product(&xs[l], &basis_a.observables[k])
    }))
}

pub fn eta_matrix(rho: &DensityMatrix, basis: &ObservableBasis) -> Result<EtaMatrix> {
    eta_with_bases(rho, basis, basis).map(EtaMatrix)
}

fn local_expectations(rho: &DensityMatrix, basis_a: &ObservableBasis, basis_b: &ObservableBasis) -> (Vec<f64>, Vec<f64>) {
    let (da, db) = (basis_a.dim, basis_b.dim);
    let (ra, _) = partial_trace_raw(rho.matrix(), &[da, db], &[1]);
    let (rb, _) = partial_trace_raw(rho.matrix(), &[da, db], &[0]);
    let a = basis_a.observables.iter().map(|m| tr_product(&ra, m)).collect();
    let b = basis_b.observables.iter().map(|m| tr_product(&rb, m)).collect();
    (a, b)
}

fn correlation_with_bases(
    rho: &DensityMatrix,
    basis_a: &ObservableBasis,
    basis_b: &ObservableBasis,
) -> Result<DMatrix<f64>> {
    let eta = eta_with_bases(rho, basis_a, basis_b)?;
    let (a, b) = local_expectations(rho, basis_a, basis_b);
    Ok(DMatrix::from_fn(eta.nrows(), eta.ncols(), |k, l| eta[(k, l)] - a[k] * b[l]))
}

pub fn correlation_matrix(rho: &DensityMatrix, basis: &ObservableBasis) -> Result<CorrelationMatrix> {
    correlation_with_bases(rho, basis, basis).map(CorrelationMatrix)
}

fn sym_min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    let s = (m + m.transpose()) * 0.5;
    s.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionId {
    /// `eta >= 0`
    EtaPsd,
    Ppt,
    Ccnr,
    /// `C >= 0`
    CorrPsd,
    /// `||C||_1^2 <= [1 - Tr rho_A^2][1 - Tr rho_B^2]`
    CovNorm,
    /// `2 sum_i |C_ii| <= [1 - Tr rho_A^2] + [1 - Tr rho_B^2]`
    CovDiag,
}

impl CriterionId {
    pub const ALL: [CriterionId; 6] = [
        CriterionId::EtaPsd,
        CriterionId::Ppt,
        CriterionId::Ccnr,
        CriterionId::CorrPsd,
        CriterionId::CovNorm,
        CriterionId::CovDiag,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CriterionId::EtaPsd => "eta_psd",
            CriterionId::Ppt => "ppt",
            CriterionId::Ccnr => "ccnr",
            CriterionId::CorrPsd => "corr_psd",
            CriterionId::CovNorm => "cov_norm",
            CriterionId::CovDiag => "cov_diag",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == s)
    }

    /// Only meaningful for symmetric or invariant states.
    pub fn needs_invariance(self) -> bool {
        matches!(self, CriterionId::EtaPsd | CriterionId::CorrPsd)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionVerdict {
    pub criterion: CriterionId,
    pub satisfied: bool,
    /// Distance to violation; negative means violated.
    pub margin: f64,
    pub tolerance: f64,
}

impl CriterionVerdict {
    pub fn from_margin(criterion: CriterionId, margin: f64, tolerance: f64) -> Self {
        Self { criterion, satisfied: margin >= -tolerance, margin, tolerance }
    }
}

fn require_invariant(rho: &DensityMatrix) -> Result<Symmetry> {
    let s = classify(rho)?;
    if s.is_invariant() {
        Ok(s)
    } else {
        Err(Error::NotInvariant)
    }
}

pub fn criterion_eta_psd(rho: &DensityMatrix, tol: f64) -> Result<CriterionVerdict> {
    require_invariant(rho)?;
    let eta = eta_matrix(rho, &gell_mann_basis(rho.bipartite_dims()?.0))?;
    Ok(CriterionVerdict::from_margin(CriterionId::EtaPsd, sym_min_eigenvalue(&eta.0), tol))
}

pub fn criterion_ppt(rho: &DensityMatrix, tol: f64) -> Result<CriterionVerdict> {
    rho.bipartite_dims()?;
    let pt = partial_transpose(rho, &[0])?;
    Ok(CriterionVerdict::from_margin(CriterionId::Ppt, min_eigenvalue(&pt)?, tol))
}

/// `||R(rho)||_1` for a bipartite state.
pub fn realignment_norm(rho: &DensityMatrix) -> Result<f64> {
    Ok(singular_values(&realign(rho)?).iter().sum())
}

/// `||rho^{T_A}||_1`
pub fn partial_transpose_norm(rho: &DensityMatrix) -> Result<f64> {
    let pt = partial_transpose(rho, &[0])?;
    Ok(crate::linalg::eigvalsh(&pt)?.iter().map(|l| l.abs()).sum())
}

pub fn criterion_ccnr(rho: &DensityMatrix, tol: f64) -> Result<CriterionVerdict> {
    Ok(CriterionVerdict::from_margin(CriterionId::Ccnr, 1.0 - realignment_norm(rho)?, tol))
}

pub fn criterion_corr_psd(rho: &DensityMatrix, tol: f64) -> Result<CriterionVerdict> {
    require_invariant(rho)?;
    let c = correlation_matrix(rho, &gell_mann_basis(rho.bipartite_dims()?.0))?;
    Ok(CriterionVerdict::from_margin(CriterionId::CorrPsd, sym_min_eigenvalue(&c.0), tol))
}

fn purity(m: &ComplexMatrix) -> f64 {
    m.matmul(m).trace().re
}

/// The two covariance-matrix inequalities.
///
/// Both hold for every choice of local orthonormal observable bases, so they
/// are evaluated in the bases that make them tightest. For the diagonal form
/// these are the singular bases of `C`, where `sum_i |C_ii| = ||C||_1`.
pub fn criterion_covariance(rho: &DensityMatrix, tol: f64) -> Result<(CriterionVerdict, CriterionVerdict)> {
    let (da, db) = rho.bipartite_dims()?;
    let (ba, bb) = (gell_mann_basis(da), gell_mann_basis(db));
    let c = correlation_with_bases(rho, &ba, &bb)?;
    let norm: f64 = c.singular_values().iter().sum();
    let (ra, _) = partial_trace_raw(rho.matrix(), &[da, db], &[1]);
    let (rb, _) = partial_trace_raw(rho.matrix(), &[da, db], &[0]);
    let (la, lb) = (1.0 - purity(&ra), 1.0 - purity(&rb));
    let by_norm = CriterionVerdict::from_margin(CriterionId::CovNorm, la * lb - norm * norm, tol);
    let by_diag = CriterionVerdict::from_margin(CriterionId::CovDiag, la + lb - 2.0 * norm, tol);
    Ok((by_norm, by_diag))
}

/// `2 sum_i |C_ii|` in a fixed basis (the Gell-Mann basis on both sides);
/// never larger than the optimized value used by [`criterion_covariance`].
pub fn fixed_basis_diagonal_sum(rho: &DensityMatrix) -> Result<f64> {
    let (da, db) = rho.bipartite_dims()?;
    let c = correlation_with_bases(rho, &gell_mann_basis(da), &gell_mann_basis(db))?;
    Ok(2.0 * (0..c.nrows().min(c.ncols())).map(|i| c[(i, i)].abs()).sum::<f64>())
}

/// `rho = sum_k Lambda_k M'_k (x) M'_k` for an invariant state.
#[derive(Clone, Debug)]
pub struct SchmidtDecomposition {
    pub lambdas: Vec<f64>,
    pub observables: Vec<ComplexMatrix>,
}

impl SchmidtDecomposition {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = self.observables[0].rows();
        self.lambdas
            .iter()
            .zip(&self.observables)
            .fold(ComplexMatrix::zeros(d * d, d * d), |acc, (&l, m)| &acc + &m.kron(m).scale(l))
    }

    pub fn lambda_sum(&self) -> f64 {
        self.lambdas.iter().sum()
    }
}

pub fn schmidt_invariant(rho: &DensityMatrix, basis: &ObservableBasis) -> Result<SchmidtDecomposition> {
    require_invariant(rho)?;
    let eta = eta_matrix(rho, basis)?.0;
    let sym = (&eta + eta.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    // rows of O are the eigenvectors of eta
    let o = DMatrix::from_fn(n, n, |k, l| eig.eigenvectors[(l, order[k])]);
    Ok(SchmidtDecomposition {
        lambdas: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
        observables: basis.rotated(&o).observables,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceReport {
    pub symmetry: Symmetry,
    pub verdicts: Vec<CriterionVerdict>,
    /// Pairs of criteria whose verdicts disagree outside the dead band.
    pub inconsistencies: Vec<(CriterionId, CriterionId)>,
    /// Every margin lies inside the dead band.
    pub boundary: bool,
    pub lambda_sum: f64,
    /// `||R(rho)||_1 - ||rho^{T_A}||_1`
    pub realignment_gap: f64,
}

impl EquivalenceReport {
    pub fn consistent(&self) -> bool {
        self.inconsistencies.is_empty()
    }

    pub fn verdict(&self, id: CriterionId) -> Option<&CriterionVerdict> {
        self.verdicts.iter().find(|v| v.criterion == id)
    }
}

/// Runs all six criteria and checks that the ones required to coincide do:
/// all of them for symmetric states, `eta_psd`, `corr_psd`, `cov_norm` and
/// `cov_diag` for invariant ones.
pub fn equivalence_report(rho: &DensityMatrix, tol: f64) -> Result<EquivalenceReport> {
    let symmetry = require_invariant(rho)?;
    let d = rho.bipartite_dims()?.0;
    let basis = gell_mann_basis(d);
    let eta = eta_matrix(rho, &basis)?.0;
    let c = correlation_matrix(rho, &basis)?.0;
    let (cov_norm, cov_diag) = criterion_covariance(rho, tol)?;
    let rnorm = realignment_norm(rho)?;
    let verdicts = vec![
        CriterionVerdict::from_margin(CriterionId::EtaPsd, sym_min_eigenvalue(&eta), tol),
        criterion_ppt(rho, tol)?,
        CriterionVerdict::from_margin(CriterionId::Ccnr, 1.0 - rnorm, tol),
        CriterionVerdict::from_margin(CriterionId::CorrPsd, sym_min_eigenvalue(&c), tol),
        cov_norm,
        cov_diag,
    ];
    let required: Vec<&CriterionVerdict> = verdicts
        .iter()
        .filter(|v| symmetry == Symmetry::Symmetric || !matches!(v.criterion, CriterionId::Ppt | CriterionId::Ccnr))
        .collect();
    let passes = |m: f64| m >= -tol::DEAD_BAND;
    let mut inconsistencies = Vec::new();
    for (i, p) in required.iter().enumerate() {
        for q in &required[i + 1..] {
            if passes(p.margin) != passes(q.margin) {
                inconsistencies.push((p.criterion, q.criterion));
            }
        }
    }
    let boundary = verdicts.iter().all(|v| v.margin.abs() < tol::DEAD_BAND);
    Ok(EquivalenceReport {
        symmetry,
        inconsistencies,
        boundary,
        lambda_sum: eta.trace(),
        realignment_gap: rnorm - partial_transpose_norm(rho)?,
        verdicts,
    })
}
