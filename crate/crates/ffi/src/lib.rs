//! C interface to `surrogate_regret`.
//!
//! Every function returns an [`SrStatus`]; results come back through
//! out-pointers, which are left untouched on failure. Losses are opaque
//! [`SrLoss`] handles owned by the caller and released with [`sr_loss_free`].
//! After a non-`SR_STATUS_OK` return, [`sr_last_error_message`] describes the
//! failure on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use surrogate_regret::calibration::check_calibrated;
use surrogate_regret::envelope::regret_bound;
use surrogate_regret::uneven::{alpha_of_gamma, sigmoid_t_minus};
use surrogate_regret::{
    alpha_transform, conditional_risk, constrained_optimal_risk, cost_sensitive_loss, h_alpha,
    make_uneven_loss, optimal_conditional_risk, CostParam, Error, ExtendedScore, Family, Loss,
    UnevenMarginSpec,
};

pub const SR_FAMILY_HINGE: i32 = 0;
pub const SR_FAMILY_SQUARED: i32 = 1;
pub const SR_FAMILY_EXPONENTIAL: i32 = 2;
pub const SR_FAMILY_SIGMOID: i32 = 3;

/// Result code of every exported function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SrStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Invalid = 3,
    UnsupportedLimit = 4,
    Precondition = 5,
    Unsupported = 6,
    VacuousBound = 7,
    Inconsistent = 8,
    Panic = 9,
}

/// Opaque loss handle.
pub struct SrLoss {
    inner: Loss,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> SrStatus {
    match e {
        Error::Domain { .. } => SrStatus::Domain,
        Error::Invalid(_) => SrStatus::Invalid,
        Error::UnsupportedLimit(_) => SrStatus::UnsupportedLimit,
        Error::Precondition(_) => SrStatus::Precondition,
        Error::Unsupported(_) => SrStatus::Unsupported,
        Error::VacuousBound(_) => SrStatus::VacuousBound,
        Error::Inconsistent(_) => SrStatus::Inconsistent,
    }
}

enum Failure {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Runs `f`, converting errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SrStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("{what} is null"));
            SrStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            SrStatus::Panic
        }
    }
}

unsafe fn loss_ref<'a>(loss: *const SrLoss) -> Result<&'a Loss, Failure> {
    // SAFETY: caller passes null or a handle from one of the constructors
    unsafe { loss.as_ref() }.map(|l| &l.inner).ok_or(Failure::Null("loss"))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    // SAFETY: non-null and, per the contract, valid for writes
    unsafe { out.write(value) };
    Ok(())
}

fn family_of(code: i32) -> Result<Family, Failure> {
    match code {
        SR_FAMILY_HINGE => Ok(Family::Hinge),
        SR_FAMILY_SQUARED => Ok(Family::Squared),
        SR_FAMILY_EXPONENTIAL => Ok(Family::Exponential),
        SR_FAMILY_SIGMOID => Ok(Family::Sigmoid),
        _ => Err(Error::Invalid(format!("family code {code}")).into()),
    }
}

fn boxed(loss: Loss) -> *mut SrLoss {
    Box::into_raw(Box::new(SrLoss { inner: loss }))
}

/// Builds the uneven margin loss `φ(t)`, `β φ(−γ t)` of a family.
/// `alpha_weight` may be null for the unweighted loss.
///
/// # Safety
/// `alpha_weight` must be null or point to a readable double; `out` must be
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sr_loss_uneven_new(
    family: i32,
    beta: f64,
    gamma: f64,
    alpha_weight: *const f64,
    out: *mut *mut SrLoss,
) -> SrStatus {
    guard(|| {
        let mut spec = UnevenMarginSpec::new(family_of(family)?, beta, gamma);
        // SAFETY: null or readable per the contract
        if let Some(&a) = unsafe { alpha_weight.as_ref() } {
            spec = spec.weighted(a);
        }
        let loss = make_uneven_loss(&spec)?;
        unsafe { write(out, boxed(loss)) }
    })
}

/// Builds the cost-sensitive 0-1 loss for cost `alpha`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sr_loss_cost_sensitive_new(alpha: f64, out: *mut *mut SrLoss) -> SrStatus {
    guard(|| {
        let cost = CostParam::new(alpha)?;
        unsafe { write(out, boxed(cost_sensitive_loss(cost))) }
    })
}

/// Builds the α-weighted version of `loss` as a new handle.
///
/// # Safety
/// `loss` must be null or a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sr_loss_alpha_transform(
    loss: *const SrLoss,
    alpha: f64,
    out: *mut *mut SrLoss,
) -> SrStatus {
    guard(|| {
        let l = unsafe { loss_ref(loss) }?;
        let cost = CostParam::new(alpha)?;
        unsafe { write(out, boxed(alpha_transform(l, cost))) }
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `loss` must be null or a live handle not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sr_loss_free(loss: *mut SrLoss) {
    if !loss.is_null() {
        // SAFETY: produced by Box::into_raw in a constructor
        drop(unsafe { Box::from_raw(loss) });
    }
}

/// `C_L(η, t)`; `t` may be `±INFINITY` when the loss declares those limits.
///
/// # Safety
/// `loss` must be null or a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sr_conditional_risk(
    loss: *const SrLoss,
    eta: f64,
    t: f64,
    out: *mut f64,
) -> SrStatus {
    guard(|| {
        let l = unsafe { loss_ref(loss) }?;
        if t.is_nan() {
            return Err(Error::Domain { what: "t", value: t, expected: "a number or +-inf" }.into());
        }
        let v = conditional_risk(l, eta, ExtendedScore::from_f64(t))?;
        unsafe { write(out, v) }
    })
}

/// `C*_L(η)`.
///
/// # Safety
/// `loss` must be null or a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sr_optimal_conditional_risk(loss: *const SrLoss, eta: f64, out: *mut f64) -> SrStatus {
    guard(|| {
        let v = optimal_conditional_risk(unsafe { loss_ref(loss) }?, eta)?;
        unsafe { write(out, v) }
    })
}

/// `C⁻_{L,α}(η)`, the best risk among scores on the wrong side of `α`.
///
/// # Safety
/// `loss` must be null or a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sr_constrained_optimal_risk(
    loss: *const SrLoss,
    alpha: f64,
    eta: f64,
    out: *mut f64,
) -> SrStatus {
    guard(|| {
        let l = unsafe { loss_ref(loss) }?;
        let v = constrained_optimal_risk(l, CostParam::new(alpha)?, eta)?;
        unsafe { write(out, v) }
    })
}

/// `H_{L,α}(η)`.
///
/// # Safety
/// `loss` must be null or a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sr_h_alpha(loss: *const SrLoss, alpha: f64, eta: f64, out: *mut f64) -> SrStatus {
    guard(|| {
        let l = unsafe { loss_ref(loss) }?;
        let v = h_alpha(l, CostParam::new(alpha)?, eta)?;
        unsafe { write(out, v) }
    })
}

/// Decides calibration for `alpha`. On `SR_STATUS_OK`, `*out_calibrated` is
/// set and, when `out_witness_eta` is non-null, the first witness `η` is
/// stored there (NaN when the report has none).
///
/// # Safety
/// `loss` must be null or a live handle; `out_calibrated` must be valid for
/// writes; `out_witness_eta` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sr_check_calibrated(
    loss: *const SrLoss,
    alpha: f64,
    out_calibrated: *mut bool,
    out_witness_eta: *mut f64,
) -> SrStatus {
    guard(|| {
        let l = unsafe { loss_ref(loss) }?;
        if out_calibrated.is_null() {
            return Err(Failure::Null("out_calibrated"));
        }
        let report = check_calibrated(l, CostParam::new(alpha)?)?;
        unsafe { write(out_calibrated, report.is_calibrated()) }?;
        if !out_witness_eta.is_null() {
            let eta = report.witnesses.first().map_or(f64::NAN, |w| w.0);
            unsafe { write(out_witness_eta, eta) }?;
        }
        Ok(())
    })
}

/// Largest cost-sensitive regret compatible with `surrogate_regret`, from a
/// transfer function sampled on `grid` points. Returns
/// `SR_STATUS_VACUOUS_BOUND` when the loss is not calibrated for `alpha`.
///
/// # Safety
/// `loss` must be null or a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sr_regret_bound(
    loss: *const SrLoss,
    alpha: f64,
    surrogate_regret: f64,
    grid: usize,
    out: *mut f64,
) -> SrStatus {
    guard(|| {
        let l = unsafe { loss_ref(loss) }?;
        let v = regret_bound(l, CostParam::new(alpha)?, surrogate_regret, grid)?;
        unsafe { write(out, v) }
    })
}

/// Calibrating cost `α(γ)` of the sigmoid family with `β = 1/γ`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sr_alpha_of_gamma(gamma: f64, tol: f64, out: *mut f64) -> SrStatus {
    guard(|| {
        let v = alpha_of_gamma(gamma, tol)?;
        unsafe { write(out, v) }
    })
}

/// Finite minimizer `t₋(η)` of the `γ = 2` sigmoid loss for `η ∈ (0, 1/2)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sr_sigmoid_t_minus(eta: f64, out: *mut f64) -> SrStatus {
    guard(|| {
        let v = sigmoid_t_minus(eta)?;
        unsafe { write(out, v) }
    })
}

/// Copies the calling thread's last error message into `buf` (truncated and
/// nul-terminated when `len > 0`). Returns the full message length in bytes,
/// excluding the terminator; 0 when no error has been recorded.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes of writes.
#[no_mangle]
pub unsafe extern "C" fn sr_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            // SAFETY: n + 1 <= len bytes are writable per the contract
            unsafe {
                ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
                *buf.add(n) = 0;
            }
        }
        bytes.len()
    })
}

/// Static, nul-terminated name of a status code; `"unknown"` for values
/// outside the enum.
#[no_mangle]
pub extern "C" fn sr_status_name(status: i32) -> *const c_char {
    let name: &'static [u8] = match status {
        0 => b"ok\0",
        1 => b"null_pointer\0",
        2 => b"domain\0",
        3 => b"invalid\0",
        4 => b"unsupported_limit\0",
        5 => b"precondition\0",
        6 => b"unsupported\0",
        7 => b"vacuous_bound\0",
        8 => b"inconsistent\0",
        9 => b"panic\0",
        _ => b"unknown\0",
    };
    name.as_ptr().cast()
}
