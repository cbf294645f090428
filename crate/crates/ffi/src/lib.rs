//! C ABI for the `nonclassicality` crate.
//!
//! Objects are opaque handles created by `nc_*_new`-style functions and
//! released with the matching `*_free`. Every fallible call returns an
//! [`NcStatus`]; on failure [`nc_last_error_message`] holds the reason for
//! the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use nonclassicality::criteria::{run_battery_moments, TestConfig, TestKind};
use nonclassicality::generators::{
    cat_state, coherent, coherent_mixture, fock, photon_added, thermal, CatStateSpec, CoherentMixtureSpec,
    PhotonAddedSpec,
};
use nonclassicality::{
    run_battery, Error, MomentSequence, NormPolicy, PhotonDistribution, Verdict, WitnessReport,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    Empty = 3,
    NonFinite = 4,
    NegativeProbability = 5,
    NormalizationViolation = 6,
    ZeroDistribution = 7,
    WindowTooShort = 8,
    DivergentTail = 9,
    DegenerateCat = 10,
    Underflow = 11,
    QuadratureNotConverged = 12,
    Panic = 13,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NcNormPolicy {
    Truncated = 0,
    Exact = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NcVerdict {
    NoViolationFound = 0,
    Nonclassical = 1,
}

pub const NC_TEST_ZEROS: u32 = 1;
pub const NC_TEST_FIRST_ORDER: u32 = 1 << 1;
pub const NC_TEST_SECOND_ORDER: u32 = 1 << 2;
pub const NC_TEST_LOCAL_POISSONIAN: u32 = 1 << 3;
pub const NC_TEST_OSCILLATION_Q: u32 = 1 << 4;
pub const NC_TEST_HANKEL_Q: u32 = 1 << 5;
pub const NC_TEST_HANKEL_GAMMA: u32 = 1 << 6;

/// Battery settings. `max_hankel_order = 0` picks the largest order the
/// window allows; `tests` is a mask of `NC_TEST_*` bits.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NcConfig {
    pub psd_tol: f64,
    pub saturation_tol: f64,
    pub max_hankel_order: usize,
    pub tests: u32,
}

/// Opaque photon-number distribution.
pub struct NcDistribution(PhotonDistribution);

/// Opaque test report.
pub struct NcReport(WitnessReport);

const TEST_BITS: [(u32, TestKind); 7] = [
    (NC_TEST_ZEROS, TestKind::Zeros),
    (NC_TEST_FIRST_ORDER, TestKind::FirstOrder),
    (NC_TEST_SECOND_ORDER, TestKind::SecondOrder),
    (NC_TEST_LOCAL_POISSONIAN, TestKind::LocalPoissonian),
    (NC_TEST_OSCILLATION_Q, TestKind::OscillationQ),
    (NC_TEST_HANKEL_Q, TestKind::HankelQ),
    (NC_TEST_HANKEL_GAMMA, TestKind::HankelGamma),
];

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> NcStatus {
    match e {
        Error::Empty => NcStatus::Empty,
        Error::NonFinite(_) => NcStatus::NonFinite,
        Error::NegativeProbability { .. } => NcStatus::NegativeProbability,
        Error::NormalizationViolation(_) => NcStatus::NormalizationViolation,
        Error::ZeroDistribution => NcStatus::ZeroDistribution,
        Error::WindowTooShort { .. } => NcStatus::WindowTooShort,
        Error::DivergentTail(_) => NcStatus::DivergentTail,
        Error::DegenerateCat => NcStatus::DegenerateCat,
        Error::Underflow(_) => NcStatus::Underflow,
        Error::QuadratureNotConverged(_) => NcStatus::QuadratureNotConverged,
        Error::InvalidParameter(_) => NcStatus::InvalidParameter,
    }
}

enum Fail {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

/// Runs `f`, turning errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> NcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NcStatus::Ok,
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            NcStatus::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            NcStatus::Panic
        }
    }
}

unsafe fn input<'a>(ptr: *const f64, len: usize, what: &'static str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(slice::from_raw_parts(ptr, len))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn config_of(cfg: *const NcConfig) -> Result<TestConfig, Fail> {
    if cfg.is_null() {
        return Ok(TestConfig::default());
    }
    let c = &*cfg;
    let out = TestConfig {
        psd_tol: c.psd_tol,
        saturation_tol: c.saturation_tol,
        max_hankel_order: (c.max_hankel_order > 0).then_some(c.max_hankel_order),
        ..TestConfig::default()
    }
    .with_tests(
        TEST_BITS
            .iter()
            .filter(|(bit, _)| c.tests & bit != 0)
            .map(|(_, k)| *k),
    );
    out.validate()?;
    Ok(out)
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn nc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn nc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Default settings: every test except `NC_TEST_HANKEL_GAMMA`.
#[no_mangle]
pub extern "C" fn nc_config_default() -> NcConfig {
    let d = TestConfig::default();
    NcConfig {
        psd_tol: d.psd_tol,
        saturation_tol: d.saturation_tol,
        max_hankel_order: 0,
        tests: TEST_BITS
            .iter()
            .filter(|(_, k)| d.enabled(*k))
            .fold(0, |m, (bit, _)| m | bit),
    }
}

/// Validates `values[0..len]` as a photon-number distribution.
///
/// # Safety
/// `values` must point to `len` readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nc_distribution_new(
    values: *const f64,
    len: usize,
    policy: NcNormPolicy,
    zero_tol: f64,
    out: *mut *mut NcDistribution,
) -> NcStatus {
    guard(|| {
        let v = input(values, len, "values")?.to_vec();
        let policy = match policy {
            NcNormPolicy::Truncated => NormPolicy::Truncated,
            NcNormPolicy::Exact => NormPolicy::Exact,
        };
        put(out, NcDistribution(PhotonDistribution::new(v, policy, zero_tol)?))
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nc_coherent(intensity: f64, nmax: usize, out: *mut *mut NcDistribution) -> NcStatus {
    guard(|| put(out, NcDistribution(coherent(intensity, nmax)?)))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nc_thermal(mean: f64, nmax: usize, out: *mut *mut NcDistribution) -> NcStatus {
    guard(|| put(out, NcDistribution(thermal(mean, nmax)?)))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nc_fock(photons: usize, nmax: usize, out: *mut *mut NcDistribution) -> NcStatus {
    guard(|| put(out, NcDistribution(fock(photons, nmax)?)))
}

/// # Safety
/// `weights` and `intensities` must each point to `count` doubles.
#[no_mangle]
pub unsafe extern "C" fn nc_coherent_mixture(
    weights: *const f64,
    intensities: *const f64,
    count: usize,
    nmax: usize,
    out: *mut *mut NcDistribution,
) -> NcStatus {
    guard(|| {
        let w = input(weights, count, "weights")?.to_vec();
        let i = input(intensities, count, "intensities")?.to_vec();
        let spec = CoherentMixtureSpec::new(w, i)?;
        put(out, NcDistribution(coherent_mixture(&spec, nmax)?))
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nc_cat_state(
    intensity: f64,
    theta: f64,
    nmax: usize,
    out: *mut *mut NcDistribution,
) -> NcStatus {
    guard(|| {
        put(
            out,
            NcDistribution(cat_state(&CatStateSpec { intensity, theta }, nmax)?),
        )
    })
}

/// Adds `added` photons to `base`; the base handle is left untouched.
///
/// # Safety
/// `base` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nc_photon_added(
    base: *const NcDistribution,
    added: usize,
    nmax: usize,
    out: *mut *mut NcDistribution,
) -> NcStatus {
    guard(|| {
        let base = base.as_ref().ok_or(Fail::Null("base"))?;
        let spec = PhotonAddedSpec {
            base: base.0.clone(),
            added,
        };
        put(out, NcDistribution(photon_added(&spec, nmax)?))
    })
}

/// Number of entries (`nmax + 1`), or 0 for null.
///
/// # Safety
/// `d` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nc_distribution_len(d: *const NcDistribution) -> usize {
    d.as_ref().map_or(0, |d| d.0.values().len())
}

/// Copies up to `cap` entries into `buf`.
///
/// # Safety
/// `d` must be a live handle and `buf` must hold `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn nc_distribution_values(
    d: *const NcDistribution,
    buf: *mut f64,
    cap: usize,
) -> NcStatus {
    guard(|| {
        let d = d.as_ref().ok_or(Fail::Null("distribution"))?;
        let n = cap.min(d.0.values().len());
        if n > 0 {
            if buf.is_null() {
                return Err(Fail::Null("buf"));
            }
            ptr::copy_nonoverlapping(d.0.values().as_ptr(), buf, n);
        }
        Ok(())
    })
}

/// # Safety
/// `d` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nc_distribution_free(d: *mut NcDistribution) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Runs the battery; a null `cfg` means [`nc_config_default`].
///
/// # Safety
/// `d` must be a live handle, `cfg` null or valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nc_run_battery(
    d: *const NcDistribution,
    cfg: *const NcConfig,
    out: *mut *mut NcReport,
) -> NcStatus {
    guard(|| {
        let d = d.as_ref().ok_or(Fail::Null("distribution"))?;
        let cfg = config_of(cfg)?;
        put(out, NcReport(run_battery(&d.0, &cfg)?))
    })
}

/// Runs the battery on `q_n = n! p_n` supplied directly.
///
/// # Safety
/// `q` must point to `len` doubles, `cfg` null or valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nc_run_battery_q(
    q: *const f64,
    len: usize,
    cfg: *const NcConfig,
    out: *mut *mut NcReport,
) -> NcStatus {
    guard(|| {
        let q = MomentSequence::from_values(input(q, len, "q")?)?;
        let cfg = config_of(cfg)?;
        put(out, NcReport(run_battery_moments(&q, &cfg)?))
    })
}

/// # Safety
/// `r` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn nc_report_verdict(r: *const NcReport) -> NcVerdict {
    match r.as_ref().map(|r| r.0.verdict) {
        Some(Verdict::Nonclassical) => NcVerdict::Nonclassical,
        _ => NcVerdict::NoViolationFound,
    }
}

/// Total witnesses over all tests, or 0 for null.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nc_report_witness_count(r: *const NcReport) -> usize {
    r.as_ref().map_or(0, |r| r.0.witnesses().count())
}

/// Report as JSON; release with [`nc_string_free`]. Null on failure.
///
/// # Safety
/// `r` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn nc_report_to_json(r: *const NcReport) -> *mut c_char {
    let Some(r) = r.as_ref() else {
        set_error("null pointer: report".into());
        return ptr::null_mut();
    };
    match serde_json::to_string(&r.0) {
        Ok(s) => CString::new(s).map_or(ptr::null_mut(), CString::into_raw),
        Err(e) => {
            set_error(e.to_string());
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `r` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nc_report_free(r: *mut NcReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Copies the message of the last error, for callers that prefer a buffer.
/// Returns the full message length excluding the terminator.
///
/// # Safety
/// `buf` must hold `cap` bytes, or be null with `cap = 0`.
#[no_mangle]
pub unsafe extern "C" fn nc_last_error_copy(buf: *mut c_char, cap: usize) -> usize {
    let msg = nc_last_error_message();
    if msg.is_null() {
        if cap > 0 && !buf.is_null() {
            *buf = 0;
        }
        return 0;
    }
    let bytes = CStr::from_ptr(msg).to_bytes();
    if cap > 0 && !buf.is_null() {
        let n = bytes.len().min(cap - 1);
        ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
        *buf.add(n) = 0;
    }
    bytes.len()
}
