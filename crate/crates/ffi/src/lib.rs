//! C ABI over `kolmo-core`.
//!
//! Every function returns a [`KolmoStatus`]; results go through out-pointers.
//! On failure a message is available from [`kolmo_last_error_message`] on the
//! calling thread. Handles are opaque and must be released with their
//! matching `_free` function; strings returned by the library are released
//! with [`kolmo_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use kolmo_core::hankel::HankelSystem;
use kolmo_core::kernels::{cov_cn, dsn_dx, r_n, s_n_diag, KernelConfig};
use kolmo_core::legendre::{eval_i, eval_p, eval_q};
use kolmo_core::moments::{moment_oracle, pfd_coeffs, MomentKey};
use kolmo_core::poly::{format_rational, rational_to_f64};
use kolmo_core::sampler::{sample, LoopEnsemble, Method, PathGrid};
use kolmo_core::Error;
use num_bigint::BigInt;
use num_rational::BigRational;

/// Status codes returned by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KolmoStatus {
    Ok = 0,
    Domain = 1,
    Capacity = 2,
    SingularDenominator = 3,
    Index = 4,
    IllConditioned = 5,
    InvalidArgument = 6,
    Invariant = 7,
    NullPointer = 8,
    Panic = 9,
}

/// Sampling method for [`kolmo_sample`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KolmoMethod {
    Spectral = 0,
    Pathwise = 1,
}

/// Exact coefficient row `b_{a,k}^0 ..= b_{a,k}^k`.
pub struct KolmoCoeffRow {
    values: Vec<BigRational>,
}

/// Exact Hankel system for one `N`.
pub struct KolmoHankel {
    inner: HankelSystem,
}

/// Sampled loop paths.
pub struct KolmoEnsemble {
    inner: LoopEnsemble,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("NUL bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> KolmoStatus {
    match e {
        Error::Domain(_) => KolmoStatus::Domain,
        Error::Capacity { .. } => KolmoStatus::Capacity,
        Error::SingularDenominator { .. } => KolmoStatus::SingularDenominator,
        Error::Index { .. } => KolmoStatus::Index,
        Error::IllConditioned { .. } => KolmoStatus::IllConditioned,
        Error::InvalidArgument(_) => KolmoStatus::InvalidArgument,
        Error::Invariant(_) => KolmoStatus::Invariant,
    }
}

enum Failure {
    Core(Error),
    Null(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> KolmoStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => KolmoStatus::Ok,
        Ok(Err(Failure::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer passed for {what}"));
            KolmoStatus::NullPointer
        }
        Err(_) => {
            set_error("internal panic".into());
            KolmoStatus::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn handle<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s).expect("formatted numbers contain no NUL").into_raw()
}

fn fraction(num: i64, den: i64) -> Result<BigRational, Failure> {
    if den == 0 {
        return Err(Error::InvalidArgument("zero denominator".into()).into());
    }
    Ok(BigRational::new(BigInt::from(num), BigInt::from(den)))
}

/// Message for the most recent failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn kolmo_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn kolmo_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `P_n(x)` for any integer `n`; complex for `n < 0`.
///
/// # Safety
/// `out_re` and `out_im` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kolmo_legendre_p(n: i64, x: f64, out_re: *mut f64, out_im: *mut f64) -> KolmoStatus {
    guard(|| {
        let v = eval_p(n, x)?;
        *out(out_re, "out_re")? = v.re;
        *out(out_im, "out_im")? = v.im;
        Ok(())
    })
}

/// `I_n(x)` for any integer `n`; complex for `n <= 0`.
///
/// # Safety
/// `out_re` and `out_im` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kolmo_legendre_i(n: i64, x: f64, out_re: *mut f64, out_im: *mut f64) -> KolmoStatus {
    guard(|| {
        let v = eval_i(n, x)?;
        *out(out_re, "out_re")? = v.re;
        *out(out_im, "out_im")? = v.im;
        Ok(())
    })
}

/// Shifted Legendre polynomial `Q_n(t) = P_n(2t - 1)`.
///
/// # Safety
/// `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kolmo_shifted_q(n: u32, t: f64, result: *mut f64) -> KolmoStatus {
    guard(|| {
        *out(result, "result")? = eval_q(n as usize, t)?;
        Ok(())
    })
}

/// Covariance `C_N(s, t)`.
///
/// # Safety
/// `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kolmo_cov_cn(s: f64, t: f64, n: u32, result: *mut f64) -> KolmoStatus {
    guard(|| {
        *out(result, "result")? = cov_cn(s, t, &KernelConfig::new(n as usize)?)?;
        Ok(())
    })
}

/// Rescaled kernel `R_N(x, y)`.
///
/// # Safety
/// `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kolmo_r_n(x: f64, y: f64, n: u32, result: *mut f64) -> KolmoStatus {
    guard(|| {
        *out(result, "result")? = r_n(x, y, &KernelConfig::new(n as usize)?)?;
        Ok(())
    })
}

/// Diagonal `S_N(x)`.
///
/// # Safety
/// `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kolmo_s_n(x: f64, n: u32, result: *mut f64) -> KolmoStatus {
    guard(|| {
        *out(result, "result")? = s_n_diag(x, n as usize)?;
        Ok(())
    })
}

/// `dS_N/dx = -N·P_{N-1}(x)·P_N(x)`.
///
/// # Safety
/// `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kolmo_dsn_dx(x: f64, n: u32, result: *mut f64) -> KolmoStatus {
    guard(|| {
        *out(result, "result")? = dsn_dx(x, n as usize)?;
        Ok(())
    })
}

/// Exact moment `m_{p,q}^k` as two `"num/den"` strings (real and imaginary parts).
///
/// # Safety
/// `out_re` and `out_im` must be valid for writes; the returned strings are
/// released with [`kolmo_string_free`].
#[no_mangle]
pub unsafe extern "C" fn kolmo_moment(p: i64, q: i64, k: u32, out_re: *mut *mut c_char, out_im: *mut *mut c_char) -> KolmoStatus {
    guard(|| {
        let re = out(out_re, "out_re")?;
        let im = out(out_im, "out_im")?;
        let m = moment_oracle(MomentKey::new(p, q, k))?;
        *re = to_c_string(format_rational(&m.re));
        *im = to_c_string(format_rational(&m.im));
        Ok(())
    })
}

/// Coefficient row `b_{a,k}^l`, `l = 0..=k`.
///
/// # Safety
/// `row` must be valid for writes; release the handle with [`kolmo_coeff_row_free`].
#[no_mangle]
pub unsafe extern "C" fn kolmo_pfd_coeffs(a: u32, k: u32, row: *mut *mut KolmoCoeffRow) -> KolmoStatus {
    guard(|| {
        let slot = out(row, "row")?;
        *slot = Box::into_raw(Box::new(KolmoCoeffRow { values: pfd_coeffs(a, k) }));
        Ok(())
    })
}

/// Number of entries in a coefficient row.
///
/// # Safety
/// `row` must be a live handle and `len` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kolmo_coeff_row_len(row: *const KolmoCoeffRow, len: *mut usize) -> KolmoStatus {
    guard(|| {
        *out(len, "len")? = handle(row, "row")?.values.len();
        Ok(())
    })
}

/// Entry `l` of a coefficient row as a `"num/den"` string.
///
/// # Safety
/// `row` must be a live handle and `value` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kolmo_coeff_row_get(row: *const KolmoCoeffRow, l: usize, value: *mut *mut c_char) -> KolmoStatus {
    guard(|| {
        let row = handle(row, "row")?;
        let slot = out(value, "value")?;
        let v = row.values.get(l).ok_or(Error::Index { index: l, max: row.values.len().saturating_sub(1) })?;
        *slot = to_c_string(format_rational(v));
        Ok(())
    })
}

/// Entry `l` of a coefficient row rounded to `double`.
///
/// # Safety
/// `row` must be a live handle and `value` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kolmo_coeff_row_get_f64(row: *const KolmoCoeffRow, l: usize, value: *mut f64) -> KolmoStatus {
    guard(|| {
        let row = handle(row, "row")?;
        let v = row.values.get(l).ok_or(Error::Index { index: l, max: row.values.len().saturating_sub(1) })?;
        *out(value, "value")? = rational_to_f64(v);
        Ok(())
    })
}

/// # Safety
/// `row` must come from [`kolmo_pfd_coeffs`] and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn kolmo_coeff_row_free(row: *mut KolmoCoeffRow) {
    if !row.is_null() {
        drop(Box::from_raw(row));
    }
}

/// Builds the exact Hankel system for step `n` (at most 16).
///
/// # Safety
/// `system` must be valid for writes; release with [`kolmo_hankel_free`].
#[no_mangle]
pub unsafe extern "C" fn kolmo_hankel_build(n: u32, system: *mut *mut KolmoHankel) -> KolmoStatus {
    guard(|| {
        let slot = out(system, "system")?;
        *slot = Box::into_raw(Box::new(KolmoHankel { inner: HankelSystem::build(n as usize)? }));
        Ok(())
    })
}

/// Exact `Cov(Z_s, Z_t)` for rational `s = s_num/s_den`, `t = t_num/t_den`,
/// as a `"num/den"` string.
///
/// # Safety
/// `system` must be a live handle and `value` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kolmo_hankel_cross_covariance(
    system: *const KolmoHankel,
    s_num: i64,
    s_den: i64,
    t_num: i64,
    t_den: i64,
    value: *mut *mut c_char,
) -> KolmoStatus {
    guard(|| {
        let sys = handle(system, "system")?;
        let slot = out(value, "value")?;
        let v = sys.inner.cross_covariance(&fraction(s_num, s_den)?, &fraction(t_num, t_den)?)?;
        *slot = to_c_string(format_rational(&v));
        Ok(())
    })
}

/// Exact `α_l(t)` for `1 <= l <= N` and rational `t`, as a `"num/den"` string.
///
/// # Safety
/// `system` must be a live handle and `value` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kolmo_hankel_alpha(
    system: *const KolmoHankel,
    l: u32,
    t_num: i64,
    t_den: i64,
    value: *mut *mut c_char,
) -> KolmoStatus {
    guard(|| {
        let sys = handle(system, "system")?;
        let slot = out(value, "value")?;
        let v = sys.inner.alpha_eval(l as usize, &fraction(t_num, t_den)?)?;
        *slot = to_c_string(format_rational(&v));
        Ok(())
    })
}

/// # Safety
/// `system` must come from [`kolmo_hankel_build`] and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn kolmo_hankel_free(system: *mut KolmoHankel) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

/// Samples `r` loops of step `n` on the uniform grid with `m` intervals.
///
/// # Safety
/// `ensemble` must be valid for writes; release with [`kolmo_ensemble_free`].
#[no_mangle]
pub unsafe extern "C" fn kolmo_sample(
    method: KolmoMethod,
    n: u32,
    m: u32,
    r: u32,
    seed: u64,
    ensemble: *mut *mut KolmoEnsemble,
) -> KolmoStatus {
    guard(|| {
        let slot = out(ensemble, "ensemble")?;
        let method = match method {
            KolmoMethod::Spectral => Method::Spectral,
            KolmoMethod::Pathwise => Method::Pathwise,
        };
        let grid = PathGrid::uniform(m as usize)?;
        let inner = sample(method, n as usize, &grid, r as usize, seed)?;
        *slot = Box::into_raw(Box::new(KolmoEnsemble { inner }));
        Ok(())
    })
}

/// Number of paths and number of grid points (`M + 1`) per path.
///
/// # Safety
/// `ensemble` must be a live handle; `paths` and `points` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kolmo_ensemble_shape(ensemble: *const KolmoEnsemble, paths: *mut usize, points: *mut usize) -> KolmoStatus {
    guard(|| {
        let e = &handle(ensemble, "ensemble")?.inner;
        *out(paths, "paths")? = e.paths();
        *out(points, "points")? = e.grid.times().len();
        Ok(())
    })
}

/// Copies path `index` into `buffer`, which must hold `len >= M + 1` doubles.
///
/// # Safety
/// `ensemble` must be a live handle and `buffer` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn kolmo_ensemble_copy_path(
    ensemble: *const KolmoEnsemble,
    index: usize,
    buffer: *mut f64,
    len: usize,
) -> KolmoStatus {
    guard(|| {
        let e = &handle(ensemble, "ensemble")?.inner;
        if buffer.is_null() {
            return Err(Failure::Null("buffer"));
        }
        if index >= e.paths() {
            return Err(Error::Index { index, max: e.paths().saturating_sub(1) }.into());
        }
        let path = e.path(index);
        if len < path.len() {
            return Err(Error::InvalidArgument(format!("buffer holds {len} values, path has {}", path.len())).into());
        }
        std::slice::from_raw_parts_mut(buffer, path.len()).copy_from_slice(path);
        Ok(())
    })
}

/// # Safety
/// `ensemble` must come from [`kolmo_sample`] and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn kolmo_ensemble_free(ensemble: *mut KolmoEnsemble) {
    if !ensemble.is_null() {
        drop(Box::from_raw(ensemble));
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn kolmo_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version string has interior NUL"),
    };
    VERSION.as_ptr()
}
