//! C interface to `symsep`.
//!
//! States live behind opaque handles created by `symsep_*_new` or one of the
//! constructors and released with the matching `_free`. Every fallible call
//! returns a [`SymsepStatus`]; on failure a message is available from
//! [`symsep_last_error`] on the same thread. Matrices cross the boundary as
//! separate row-major real and imaginary arrays.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use symsep::criteria::{
    criterion_ccnr, criterion_corr_psd, criterion_covariance, criterion_eta_psd, CriterionVerdict,
};
use symsep::extension::{find_extension, verify_extension, ExtensionProblem, ExtensionStatus};
use symsep::search::lambda_min;
use symsep::states::{breuer, embed_invariant, embed_symmetric, ppt_margin, ppt_threshold, rho_be4, rho_be5};
use symsep::symspace::{compressed_pt_spectrum, to_bipartite};
use symsep::{Basis, ComplexMatrix, DensityMatrix, Error, SymmetricState, C64};

/// Bipartite or multipartite density matrix in the computational basis.
pub struct SymsepDensity(DensityMatrix);

/// Symmetric `N`-qubit state in the Dicke basis.
pub struct SymsepSymmetric(SymmetricState);

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymsepStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Input matrix is not a density matrix (non-Hermitian, bad trace or not PSD).
    NotAState = 3,
    /// The operation does not apply to this kind of state.
    NotApplicable = 4,
    /// A numerical precondition failed (e.g. no sign change in a threshold scan).
    Numerical = 5,
    Io = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymsepCriterion {
    EtaPsd = 0,
    Ppt = 1,
    Ccnr = 2,
    CorrPsd = 3,
    CovNorm = 4,
    CovDiag = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymsepFamily {
    /// `breuer(d, lambda)`
    Breuer = 0,
    /// `embed_symmetric(D, d, lambda)`
    EmbedSymmetric = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymsepExtensionStatus {
    Feasible = 0,
    InfeasibleEvidence = 1,
    Inconclusive = 2,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SymsepStatus {
    match e {
        Error::NonHermitian { .. } | Error::BadTrace { .. } | Error::NotPositive { .. } => SymsepStatus::NotAState,
        Error::NotInvariant | Error::NotApplicable(_) | Error::DickeBasisUnsupported => SymsepStatus::NotApplicable,
        Error::NotMonotone { .. } | Error::NoSignChange { .. } => SymsepStatus::Numerical,
        Error::Io(_) | Error::Parse(_) => SymsepStatus::Io,
        _ => SymsepStatus::InvalidArgument,
    }
}

struct Fail(SymsepStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(SymsepStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SymsepStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SymsepStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            SymsepStatus::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn input<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn read_matrix(re: *const f64, im: *const f64, side: usize) -> Result<ComplexMatrix, Fail> {
    if re.is_null() {
        return Err(null("re"));
    }
    let n = side * side;
    let re = slice::from_raw_parts(re, n);
    let im = if im.is_null() { None } else { Some(slice::from_raw_parts(im, n)) };
    let data = (0..n).map(|i| C64::new(re[i], im.map_or(0.0, |v| v[i]))).collect();
    Ok(ComplexMatrix::new(side, side, data)?)
}

unsafe fn write_matrix(m: &ComplexMatrix, re: *mut f64, im: *mut f64, len: usize) -> Result<(), Fail> {
    let n = m.data().len();
    if len < n {
        return Err(Fail(SymsepStatus::BufferTooSmall, format!("need {n} entries, got {len}")));
    }
    if re.is_null() {
        return Err(null("re"));
    }
    let re = slice::from_raw_parts_mut(re, n);
    for (r, z) in re.iter_mut().zip(m.data()) {
        *r = z.re;
    }
    if !im.is_null() {
        let im = slice::from_raw_parts_mut(im, n);
        for (i, z) in im.iter_mut().zip(m.data()) {
            *i = z.im;
        }
    }
    Ok(())
}

fn boxed<T>(x: T) -> *mut T {
    Box::into_raw(Box::new(x))
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn symsep_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn symsep_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a computational-basis state from `side x side` row-major arrays,
/// `side` being the product of `dims`. `im` may be null for a real matrix.
///
/// # Safety
/// `re` (and `im` if non-null) must hold `side * side` doubles; `dims` must
/// hold `ndims` entries; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn symsep_density_new(
    re: *const f64,
    im: *const f64,
    dims: *const usize,
    ndims: usize,
    out_state: *mut *mut SymsepDensity,
) -> SymsepStatus {
    guard(|| {
        let out_state = out(out_state, "out_state")?;
        if dims.is_null() || ndims == 0 {
            return Err(null("dims"));
        }
        let dims = slice::from_raw_parts(dims, ndims).to_vec();
        let side = dims.iter().product();
        let m = read_matrix(re, im, side)?;
        *out_state = boxed(SymsepDensity(DensityMatrix::new(m, dims, Basis::Computational)?));
        Ok(())
    })
}

/// # Safety
/// `state` must come from this library and not be freed twice; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn symsep_density_free(state: *mut SymsepDensity) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Matrix side length, or 0 for a null handle.
///
/// # Safety
/// `state` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn symsep_density_side(state: *const SymsepDensity) -> usize {
    state.as_ref().map_or(0, |s| s.0.side())
}

/// Copies the matrix into `re`/`im` (each at least `len` entries; `im` may be
/// null).
///
/// # Safety
/// `state` must be a live handle and the buffers must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn symsep_density_matrix(
    state: *const SymsepDensity,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> SymsepStatus {
    guard(|| write_matrix(input(state, "state")?.0.matrix(), re, im, len))
}

/// # Safety
/// `out_state` must be writable.
#[no_mangle]
pub unsafe extern "C" fn symsep_breuer(d: usize, lambda: f64, out_state: *mut *mut SymsepDensity) -> SymsepStatus {
    guard(|| {
        let o = out(out_state, "out_state")?;
        *o = boxed(SymsepDensity(breuer(d, lambda)?));
        Ok(())
    })
}

/// # Safety
/// `out_state` must be writable.
#[no_mangle]
pub unsafe extern "C" fn symsep_embed_symmetric(
    big_d: usize,
    d: usize,
    lambda: f64,
    out_state: *mut *mut SymsepDensity,
) -> SymsepStatus {
    guard(|| {
        let o = out(out_state, "out_state")?;
        *o = boxed(SymsepDensity(embed_symmetric(big_d, d, lambda)?));
        Ok(())
    })
}

/// Embeds an invariant bipartite state into a symmetric one of twice the
/// local dimension.
///
/// # Safety
/// `state` must be a live handle; `out_state` must be writable.
#[no_mangle]
pub unsafe extern "C" fn symsep_embed_invariant(
    state: *const SymsepDensity,
    out_state: *mut *mut SymsepDensity,
) -> SymsepStatus {
    guard(|| {
        let s = input(state, "state")?;
        let o = out(out_state, "out_state")?;
        *o = boxed(SymsepDensity(embed_invariant(&s.0)?));
        Ok(())
    })
}

fn verdict(state: &DensityMatrix, criterion: SymsepCriterion, tol: f64) -> Result<CriterionVerdict, Fail> {
    let v = match criterion {
        SymsepCriterion::EtaPsd => criterion_eta_psd(state, tol)?,
        SymsepCriterion::Ppt => symsep::criteria::criterion_ppt(state, tol)?,
        SymsepCriterion::Ccnr => criterion_ccnr(state, tol)?,
        SymsepCriterion::CorrPsd => criterion_corr_psd(state, tol)?,
        SymsepCriterion::CovNorm => criterion_covariance(state, tol)?.0,
        SymsepCriterion::CovDiag => criterion_covariance(state, tol)?.1,
    };
    Ok(v)
}

/// Evaluates one criterion on a bipartite state. `margin` is negative when
/// violated; `satisfied` is 1 when `margin >= -tol`.
///
/// # Safety
/// `state` must be a live handle; `margin` and `satisfied` must be writable
/// (`satisfied` may be null).
#[no_mangle]
pub unsafe extern "C" fn symsep_criterion(
    state: *const SymsepDensity,
    criterion: SymsepCriterion,
    tol: f64,
    margin: *mut f64,
    satisfied: *mut i32,
) -> SymsepStatus {
    guard(|| {
        let s = input(state, "state")?;
        let m = out(margin, "margin")?;
        let v = verdict(&s.0, criterion, tol)?;
        *m = v.margin;
        if let Some(sat) = satisfied.as_mut() {
            *sat = v.satisfied as i32;
        }
        Ok(())
    })
}

/// Minimum eigenvalue of the partial transpose over the listed subsystems.
///
/// # Safety
/// `state` must be a live handle, `subset` must hold `n` entries and `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn symsep_ppt_margin(
    state: *const SymsepDensity,
    subset: *const usize,
    n: usize,
    out_margin: *mut f64,
) -> SymsepStatus {
    guard(|| {
        let s = input(state, "state")?;
        let o = out(out_margin, "out_margin")?;
        if subset.is_null() && n > 0 {
            return Err(null("subset"));
        }
        let subset = if n == 0 { &[][..] } else { slice::from_raw_parts(subset, n) };
        *o = ppt_margin(&s.0, subset)?;
        Ok(())
    })
}

/// Largest `lambda` in `[lo, hi]` at which the family is PPT across the
/// first subsystem. `big_d` is ignored for [`SymsepFamily::Breuer`].
///
/// # Safety
/// `out_lambda` must be writable.
#[no_mangle]
pub unsafe extern "C" fn symsep_ppt_threshold(
    family: SymsepFamily,
    d: usize,
    big_d: usize,
    lo: f64,
    hi: f64,
    out_lambda: *mut f64,
) -> SymsepStatus {
    guard(|| {
        let o = out(out_lambda, "out_lambda")?;
        *o = match family {
            SymsepFamily::Breuer => ppt_threshold(|l| breuer(d, l), (lo, hi), &[0])?,
            SymsepFamily::EmbedSymmetric => ppt_threshold(|l| embed_symmetric(big_d, d, l), (lo, hi), &[0])?,
        };
        Ok(())
    })
}

/// Builds an `N`-qubit symmetric state from `(N+1) x (N+1)` Dicke-basis
/// arrays. `im` may be null.
///
/// # Safety
/// `re` (and `im` if non-null) must hold `(qubits+1)^2` doubles; `out_state`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn symsep_symmetric_new(
    re: *const f64,
    im: *const f64,
    qubits: usize,
    out_state: *mut *mut SymsepSymmetric,
) -> SymsepStatus {
    guard(|| {
        let o = out(out_state, "out_state")?;
        let m = read_matrix(re, im, qubits + 1)?;
        *o = boxed(SymsepSymmetric(SymmetricState::new(m, qubits)?));
        Ok(())
    })
}

/// The published four-qubit (`which = 4`) or five-qubit (`which = 5`) state.
///
/// # Safety
/// `out_state` must be writable.
#[no_mangle]
pub unsafe extern "C" fn symsep_bound_entangled(which: u32, out_state: *mut *mut SymsepSymmetric) -> SymsepStatus {
    guard(|| {
        let o = out(out_state, "out_state")?;
        let s = match which {
            4 => rho_be4(),
            5 => rho_be5(),
            _ => return Err(Fail(SymsepStatus::InvalidArgument, format!("no built-in state for {which} qubits"))),
        };
        *o = boxed(SymsepSymmetric(s));
        Ok(())
    })
}

/// # Safety
/// `state` must come from this library and not be freed twice; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn symsep_symmetric_free(state: *mut SymsepSymmetric) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Qubit count, or 0 for a null handle.
///
/// # Safety
/// `state` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn symsep_symmetric_qubits(state: *const SymsepSymmetric) -> usize {
    state.as_ref().map_or(0, |s| s.0.qubits())
}

/// Copies the `(N+1)^2` Dicke-basis entries into `re`/`im` (`im` may be null).
///
/// # Safety
/// `state` must be a live handle and the buffers must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn symsep_symmetric_matrix(
    state: *const SymsepSymmetric,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> SymsepStatus {
    guard(|| write_matrix(input(state, "state")?.0.matrix(), re, im, len))
}

/// Minimum eigenvalue of the partial transpose across the `a : b` split.
///
/// # Safety
/// `state` must be a live handle; `out_min` must be writable.
#[no_mangle]
pub unsafe extern "C" fn symsep_split_pt_min(
    state: *const SymsepSymmetric,
    a: usize,
    b: usize,
    out_min: *mut f64,
) -> SymsepStatus {
    guard(|| {
        let s = input(state, "state")?;
        let o = out(out_min, "out_min")?;
        *o = compressed_pt_spectrum(&s.0, (a, b))?.min();
        Ok(())
    })
}

/// Smallest nonstructural partial-transpose eigenvalue over all splits,
/// skipping the balanced one when `exclude_balanced` is nonzero. Infinity
/// when no split remains.
///
/// # Safety
/// `state` must be a live handle; `out_min` must be writable.
#[no_mangle]
pub unsafe extern "C" fn symsep_lambda_min(
    state: *const SymsepSymmetric,
    exclude_balanced: i32,
    out_min: *mut f64,
) -> SymsepStatus {
    guard(|| {
        let s = input(state, "state")?;
        let o = out(out_min, "out_min")?;
        *o = lambda_min(&s.0, exclude_balanced != 0)?;
        Ok(())
    })
}

/// The state as a bipartite `(a+1) x (b+1)` computational-basis state.
///
/// # Safety
/// `state` must be a live handle; `out_state` must be writable.
#[no_mangle]
pub unsafe extern "C" fn symsep_to_bipartite(
    state: *const SymsepSymmetric,
    a: usize,
    b: usize,
    out_state: *mut *mut SymsepDensity,
) -> SymsepStatus {
    guard(|| {
        let s = input(state, "state")?;
        let o = out(out_state, "out_state")?;
        *o = boxed(SymsepDensity(to_bipartite(&s.0, (a, b))?));
        Ok(())
    })
}

/// Searches for a PPT symmetric extension to `extension_qubits` qubits.
/// Pass `max_iter = 0` or `tol <= 0` for the defaults. When the search
/// succeeds and `out_witness` is non-null, the extension is returned there
/// (otherwise it is set to null).
///
/// # Safety
/// `state` must be a live handle; `out_status` and `out_gap` must be
/// writable; `out_witness` may be null.
#[no_mangle]
pub unsafe extern "C" fn symsep_find_extension(
    state: *const SymsepSymmetric,
    extension_qubits: usize,
    max_iter: usize,
    tol: f64,
    out_status: *mut SymsepExtensionStatus,
    out_gap: *mut f64,
    out_witness: *mut *mut SymsepSymmetric,
) -> SymsepStatus {
    guard(|| {
        let s = input(state, "state")?;
        let status = out(out_status, "out_status")?;
        let gap = out(out_gap, "out_gap")?;
        let mut problem = ExtensionProblem::new(s.0.clone(), extension_qubits);
        if max_iter > 0 {
            problem.max_iter = max_iter;
        }
        if tol > 0.0 {
            problem.tol_feas = tol;
        }
        let r = find_extension(&problem)?;
        *status = match r.status {
            ExtensionStatus::Feasible => SymsepExtensionStatus::Feasible,
            ExtensionStatus::InfeasibleEvidence => SymsepExtensionStatus::InfeasibleEvidence,
            ExtensionStatus::Inconclusive => SymsepExtensionStatus::Inconclusive,
        };
        *gap = r.residual_gap;
        if let Some(w) = out_witness.as_mut() {
            *w = r.witness.map_or(ptr::null_mut(), |x| boxed(SymsepSymmetric(x)));
        }
        Ok(())
    })
}

/// Checks that `candidate` is a PPT symmetric extension of `target` within
/// `tol`. Writes 1 or 0 to `out_ok`.
///
/// # Safety
/// Both handles must be live; `out_ok` must be writable.
#[no_mangle]
pub unsafe extern "C" fn symsep_verify_extension(
    candidate: *const SymsepSymmetric,
    target: *const SymsepSymmetric,
    tol: f64,
    out_ok: *mut i32,
) -> SymsepStatus {
    guard(|| {
        let c = input(candidate, "candidate")?;
        let t = input(target, "target")?;
        let o = out(out_ok, "out_ok")?;
        *o = verify_extension(&c.0, &t.0, tol)?.ok as i32;
        Ok(())
    })
}
