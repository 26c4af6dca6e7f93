//! C ABI for the curvature lab.
//!
//! Objects are opaque handles created by `ol_*` constructors and released with
//! the matching `*_free`. Every fallible call returns an [`OlStatus`]; the
//! message of the last failure on the calling thread is available through
//! [`ol_last_error_message`]. Strings returned to the caller are freed with
//! [`ol_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use osserman_lab::clifford::{self, CliffordSystem};
use osserman_lab::curvature::{self, CurvTensor};
use osserman_lab::json::{self, TensorDocument};
use osserman_lab::numkit::TolerancePolicy;
use osserman_lab::LabError;

/// Status codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    Unsupported = 4,
    NotConverged = 5,
    Failed = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// Clifford system handle.
pub struct OlCliffordSystem(CliffordSystem);

/// Algebraic curvature tensor handle.
pub struct OlCurvTensor(CurvTensor);

/// Result of [`ol_tensor_osserman`].
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct OlOssermanSummary {
    pub is_osserman: bool,
    pub max_spectrum_deviation: f64,
    pub samples_used: usize,
    /// Number of eigenvalue clusters of the reference Jacobi operator.
    pub distinct_eigenvalues: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(OlStatus, String);

impl From<LabError> for Failure {
    fn from(e: LabError) -> Self {
        let code = match &e {
            LabError::DimensionMismatch { .. } => OlStatus::DimensionMismatch,
            LabError::UnsupportedDimension(_)
            | LabError::HurwitzObstruction { .. }
            | LabError::NotAModuleDimension { .. } => OlStatus::Unsupported,
            LabError::NotConverged { .. } => OlStatus::NotConverged,
            LabError::InvalidArgument(_) | LabError::OutsideDomain(_) => OlStatus::InvalidArgument,
            _ => OlStatus::Failed,
        };
        Failure(code, e.to_string())
    }
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> OlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => OlStatus::Ok,
        Ok(Err(Failure(code, msg))) => {
            set_error(msg);
            code
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            OlStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(OlStatus::NullPointer, format!("{what} is null"))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        Ok(&[])
    } else if p.is_null() {
        Err(null(what))
    } else {
        Ok(std::slice::from_raw_parts(p, len))
    }
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn fill(out: *mut f64, len: usize, values: &[f64]) -> Result<(), Failure> {
    if len < values.len() {
        return Err(Failure(OlStatus::BufferTooSmall, format!("buffer holds {len}, need {}", values.len())));
    }
    if out.is_null() {
        return Err(null("out"));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    let c = CString::new(s).map_err(|e| Failure(OlStatus::Failed, e.to_string()))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null("json"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(OlStatus::InvalidArgument, format!("input is not UTF-8: {e}")))
}

/// Copy of the last error message on this thread, or null. Free with
/// [`ol_string_free`].
#[no_mangle]
pub extern "C" fn ol_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |c| c.clone().into_raw()))
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ol_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Radon–Hurwitz number `ρ(n) − 1`; 0 for `n = 0`.
#[no_mangle]
pub extern "C" fn ol_radon_bound(n: usize) -> usize {
    if n == 0 {
        0
    } else {
        clifford::radon_bound(n)
    }
}

/// Dimension of an irreducible `Cl(ν)` module.
#[no_mangle]
pub extern "C" fn ol_min_module_dim(nu: usize) -> usize {
    clifford::min_module_dim(nu)
}

/// Builds a Clifford system. `eta` holds `nu` constants; the generators are
/// conjugated by a seeded orthogonal matrix when `use_seed` is true.
///
/// # Safety
/// `eta` must point to `eta_len` doubles (or be null with `eta_len = 0`);
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ol_clifford_generate(
    n: usize,
    nu: usize,
    lambda0: f64,
    eta: *const f64,
    eta_len: usize,
    seed: u64,
    use_seed: bool,
    out: *mut *mut OlCliffordSystem,
) -> OlStatus {
    guard(|| {
        let eta = slice(eta, eta_len, "eta")?;
        let sys = clifford::generate(n, nu, lambda0, eta, use_seed.then_some(seed))?;
        write_out(out, OlCliffordSystem(sys))
    })
}

/// Parses a Clifford system from its JSON form.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ol_clifford_from_json(json: *const c_char, out: *mut *mut OlCliffordSystem) -> OlStatus {
    guard(|| {
        let sys: CliffordSystem = json::from_str(read_str(json)?)?;
        write_out(out, OlCliffordSystem(sys))
    })
}

/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ol_clifford_to_json(sys: *const OlCliffordSystem, out: *mut *mut c_char) -> OlStatus {
    guard(|| write_string(out, json::to_string(&handle(sys, "sys")?.0)?))
}

/// # Safety
/// `sys` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ol_clifford_free(sys: *mut OlCliffordSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// # Safety
/// `sys` must be null or a live handle. Returns 0 for null.
#[no_mangle]
pub unsafe extern "C" fn ol_clifford_dim(sys: *const OlCliffordSystem) -> usize {
    sys.as_ref().map_or(0, |s| s.0.n())
}

/// # Safety
/// `sys` must be null or a live handle. Returns 0 for null.
#[no_mangle]
pub unsafe extern "C" fn ol_clifford_nu(sys: *const OlCliffordSystem) -> usize {
    sys.as_ref().map_or(0, |s| s.0.nu())
}

/// Writes generator `index` row-major into `out` (`n²` doubles).
///
/// # Safety
/// `sys` must be a live handle; `out` must hold `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ol_clifford_generator(
    sys: *const OlCliffordSystem,
    index: usize,
    out: *mut f64,
    out_len: usize,
) -> OlStatus {
    guard(|| {
        let s = &handle(sys, "sys")?.0;
        let j = s.generators().get(index).ok_or_else(|| {
            Failure(OlStatus::InvalidArgument, format!("generator {index} out of range (nu = {})", s.nu()))
        })?;
        fill(out, out_len, j.mat().as_slice())
    })
}

/// Checks the Clifford relations; `passed` receives the verdict.
///
/// # Safety
/// `sys` must be a live handle; `passed` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ol_clifford_validate(sys: *const OlCliffordSystem, passed: *mut bool) -> OlStatus {
    guard(|| {
        let r = clifford::validate(&handle(sys, "sys")?.0, &TolerancePolicy::default());
        if passed.is_null() {
            return Err(null("passed"));
        }
        *passed = r.passed;
        Ok(())
    })
}

/// Completes a system on R^8 to seven generators.
///
/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ol_clifford_extend_to_seven(
    sys: *const OlCliffordSystem,
    xi: f64,
    seed: u64,
    out: *mut *mut OlCliffordSystem,
) -> OlStatus {
    guard(|| {
        let ext = clifford::extend_to_seven(&handle(sys, "sys")?.0, xi, seed, &TolerancePolicy::default())?;
        write_out(out, OlCliffordSystem(ext))
    })
}

/// Curvature tensor of a Clifford system.
///
/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ol_tensor_from_clifford(sys: *const OlCliffordSystem, out: *mut *mut OlCurvTensor) -> OlStatus {
    guard(|| write_out(out, OlCurvTensor(curvature::from_clifford(&handle(sys, "sys")?.0))))
}

/// Rank-one model tensor with `eps = ±1`.
///
/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ol_tensor_model(sys: *const OlCliffordSystem, eps: f64, out: *mut *mut OlCurvTensor) -> OlStatus {
    guard(|| write_out(out, OlCurvTensor(curvature::model_tensor(&handle(sys, "sys")?.0, eps)?)))
}

/// Constant sectional curvature `lambda` on R^n.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ol_tensor_constant_curvature(n: usize, lambda: f64, out: *mut *mut OlCurvTensor) -> OlStatus {
    guard(|| write_out(out, OlCurvTensor(curvature::constant_curvature(n, lambda))))
}

/// Tensor from `n⁴` components `R_ijkl` at `((i·n + j)·n + k)·n + l`,
/// projected onto the curvature symmetries.
///
/// # Safety
/// `data` must point to `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ol_tensor_from_components(
    n: usize,
    data: *const f64,
    len: usize,
    out: *mut *mut OlCurvTensor,
) -> OlStatus {
    guard(|| {
        let t = CurvTensor::new(n, slice(data, len, "data")?.to_vec())?;
        write_out(out, OlCurvTensor(t))
    })
}

/// # Safety
/// `t` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ol_tensor_free(t: *mut OlCurvTensor) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// # Safety
/// `t` must be null or a live handle. Returns 0 for null.
#[no_mangle]
pub unsafe extern "C" fn ol_tensor_dim(t: *const OlCurvTensor) -> usize {
    t.as_ref().map_or(0, |t| t.0.dim())
}

/// Writes the `n⁴` components.
///
/// # Safety
/// `t` must be a live handle; `out` must hold `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ol_tensor_components(t: *const OlCurvTensor, out: *mut f64, out_len: usize) -> OlStatus {
    guard(|| fill(out, out_len, handle(t, "tensor")?.0.as_slice()))
}

/// Weyl tensor as a new handle.
///
/// # Safety
/// `t` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ol_tensor_weyl(t: *const OlCurvTensor, out: *mut *mut OlCurvTensor) -> OlStatus {
    guard(|| write_out(out, OlCurvTensor(curvature::weyl(&handle(t, "tensor")?.0)?)))
}

/// Ricci tensor, row-major `n²`.
///
/// # Safety
/// `t` must be a live handle; `out` must hold `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ol_tensor_ricci(t: *const OlCurvTensor, out: *mut f64, out_len: usize) -> OlStatus {
    guard(|| fill(out, out_len, curvature::ricci(&handle(t, "tensor")?.0).mat().as_slice()))
}

/// # Safety
/// `t` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ol_tensor_scalar(t: *const OlCurvTensor, out: *mut f64) -> OlStatus {
    guard(|| {
        let s = curvature::scalar(&handle(t, "tensor")?.0);
        fill(out, 1, &[s])
    })
}

/// Jacobi operator `R_X`, row-major `n²`.
///
/// # Safety
/// `t` must be a live handle; `x` must hold `x_len` doubles; `out` must hold
/// `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ol_tensor_jacobi(
    t: *const OlCurvTensor,
    x: *const f64,
    x_len: usize,
    out: *mut f64,
    out_len: usize,
) -> OlStatus {
    guard(|| {
        let t = &handle(t, "tensor")?.0;
        let x = slice(x, x_len, "x")?;
        if x.len() != t.dim() {
            return Err(LabError::DimensionMismatch { expected: t.dim(), got: x.len() }.into());
        }
        fill(out, out_len, curvature::jacobi(t, x).mat().as_slice())
    })
}

/// Osserman check over seeded directions; `sys` may be null.
///
/// # Safety
/// `t` must be a live handle, `sys` null or a live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ol_tensor_osserman(
    t: *const OlCurvTensor,
    sys: *const OlCliffordSystem,
    samples: usize,
    seed: u64,
    out: *mut OlOssermanSummary,
) -> OlStatus {
    guard(|| {
        let t = &handle(t, "tensor")?.0;
        let sys = sys.as_ref().map(|s| &s.0);
        let r = curvature::osserman_check(t, samples, seed, sys, &TolerancePolicy::default())?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = OlOssermanSummary {
            is_osserman: r.is_osserman,
            max_spectrum_deviation: r.max_spectrum_deviation,
            samples_used: r.samples_used,
            distinct_eigenvalues: r.reference_spectrum.clusters.len(),
        };
        Ok(())
    })
}

/// Tensor JSON document `{ "n", "R" }`.
///
/// # Safety
/// `t` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ol_tensor_to_json(t: *const OlCurvTensor, out: *mut *mut c_char) -> OlStatus {
    guard(|| write_string(out, json::to_string(&TensorDocument::new(&handle(t, "tensor")?.0, None))?))
}
