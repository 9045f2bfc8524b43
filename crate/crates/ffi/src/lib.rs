//! C interface to `circrev`.
//!
//! Maps live behind an opaque [`CrMap`] handle. Every call returns a
//! [`CrStatus`]; results come back as JSON strings owned by the library and
//! released with [`cr_string_free`]. On failure the message is available from
//! [`cr_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use circrev::dynamics::{Limits, DEFAULT_MAX_ITER, DEFAULT_MAX_PERIOD};
use circrev::error::Error;
use circrev::factorization::{three_involution_witness, witness_for_plan, WitnessArchive};
use circrev::plmap::PLMap;
use circrev::report::{self, FactorResult, Report, Settings};
use circrev::reversibility::{
    decide_strongly_reversible_h, decide_strongly_reversible_hplus, Answer, Verdict,
};
use circrev::sampling::SamplePlan;

/// Status codes. The first three mirror the command line exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrStatus {
    /// Success, a `yes` answer or a passing verification.
    Ok = 0,
    /// A `no` answer, a refused factorization or a failing verification.
    No = 1,
    /// The answer could not be certified within the limits.
    Unknown = 2,
    /// Null pointer, bad UTF-8 or an out of range argument.
    InvalidArgument = 3,
    /// Malformed JSON.
    Parse = 4,
    /// Well-formed input that is not a valid map or archive.
    InvalidMap = 5,
    /// Evaluation hit its iteration cap.
    IterationCap = 6,
    /// Any other library error.
    Failed = 7,
    /// A panic was caught at the boundary.
    Panic = 8,
}

/// Which group the involutions are taken from.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrGroup {
    /// Orientation preserving homeomorphisms.
    Hplus = 0,
    /// All homeomorphisms.
    H = 1,
}

/// Opaque handle to a piecewise-linear circle map.
pub struct CrMap {
    map: PLMap,
    source: Vec<u8>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CrStatus {
    match e {
        Error::Parse(_) => CrStatus::Parse,
        Error::InvalidMap(_) => CrStatus::InvalidMap,
        Error::IterationCap { .. } => CrStatus::IterationCap,
        _ => CrStatus::Failed,
    }
}

fn fail(e: Error) -> CrStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn invalid(msg: &str) -> CrStatus {
    set_error(msg.to_string());
    CrStatus::InvalidArgument
}

fn answer_status(a: Answer) -> CrStatus {
    match a {
        Answer::Yes => CrStatus::Ok,
        Answer::No => CrStatus::No,
        Answer::Unknown => CrStatus::Unknown,
    }
}

/// Runs `body`, converting panics into `CrStatus::Panic`.
fn guard(body: impl FnOnce() -> CrStatus) -> CrStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(s) => {
            if s == CrStatus::Ok {
                LAST_ERROR.with(|e| *e.borrow_mut() = None);
            }
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            CrStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, CrStatus> {
    if p.is_null() {
        return Err(invalid("null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid("string argument is not UTF-8"))
}

unsafe fn map_ref<'a>(m: *const CrMap) -> Result<&'a CrMap, CrStatus> {
    m.as_ref().ok_or_else(|| invalid("null map handle"))
}

unsafe fn put(out: *mut *mut c_char, s: String) -> CrStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            CrStatus::Ok
        }
        Err(_) => fail(Error::Internal("output contains a NUL byte".into())),
    }
}

fn limits(max_period: u64, max_iter: u64) -> Limits {
    Limits {
        max_period: if max_period == 0 { DEFAULT_MAX_PERIOD } else { max_period },
        max_iter: if max_iter == 0 { DEFAULT_MAX_ITER } else { max_iter },
    }
}

fn decide(f: &PLMap, group: CrGroup, l: Limits) -> circrev::error::Result<Verdict> {
    match group {
        CrGroup::Hplus => decide_strongly_reversible_hplus(f, l),
        CrGroup::H => decide_strongly_reversible_h(f, l),
    }
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

/// Parses a map description (`{"degree": .., "vertices": [[x, y], ..]}`).
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cr_map_from_json(json: *const c_char, out: *mut *mut CrMap) -> CrStatus {
    guard(|| {
        if out.is_null() {
            return invalid("null output pointer");
        }
        *out = ptr::null_mut();
        let s = tri!(text(json));
        match PLMap::from_json(s) {
            Ok(map) => {
                *out = Box::into_raw(Box::new(CrMap {
                    map,
                    source: s.as_bytes().to_vec(),
                }));
                CrStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Releases a map. Null is ignored.
///
/// # Safety
/// `m` must come from [`cr_map_from_json`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn cr_map_free(m: *mut CrMap) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Degree of the map (1 or -1), or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cr_map_degree(m: *const CrMap) -> i32 {
    m.as_ref().map(|m| m.map.degree() as i32).unwrap_or(0)
}

/// Canonical JSON of the map.
///
/// # Safety
/// `m` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cr_map_to_json(m: *const CrMap, out: *mut *mut c_char) -> CrStatus {
    guard(|| {
        if out.is_null() {
            return invalid("null output pointer");
        }
        let m = tri!(map_ref(m));
        put(out, m.map.to_json())
    })
}

/// Analysis report as JSON. Zero limits select the defaults.
///
/// # Safety
/// `m` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cr_analyze(
    m: *const CrMap,
    max_period: u64,
    max_iter: u64,
    out: *mut *mut c_char,
) -> CrStatus {
    guard(|| {
        if out.is_null() {
            return invalid("null output pointer");
        }
        let m = tri!(map_ref(m));
        let l = limits(max_period, max_iter);
        match report::analyze(&m.map, l) {
            Ok(a) => put(out, Report::new("analyze", &m.source, Settings::new(l), a).to_json()),
            Err(e) => fail(e),
        }
    })
}

/// Decides strong reversibility. Returns `Ok`, `No` or `Unknown` and writes
/// the decision report to `out`.
///
/// # Safety
/// `m` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cr_decide(
    m: *const CrMap,
    group: CrGroup,
    max_period: u64,
    max_iter: u64,
    out: *mut *mut c_char,
) -> CrStatus {
    guard(|| {
        if out.is_null() {
            return invalid("null output pointer");
        }
        let m = tri!(map_ref(m));
        let l = limits(max_period, max_iter);
        let v = match decide(&m.map, group, l) {
            Ok(v) => v,
            Err(e) => return fail(e),
        };
        let r = Report::new(
            "decide",
            &m.source,
            Settings::new(l),
            report::decision(&v, m.map.degree()),
        );
        let s = put(out, r.to_json());
        if s != CrStatus::Ok {
            return s;
        }
        answer_status(v.answer)
    })
}

/// Factors the map into `involutions` (2 or 3) involutions and verifies the
/// witness at `samples` points drawn with `seed`.
///
/// On success `out_report` receives the factor report and `out_archive` the
/// witness archive. A refusal returns `No` or `Unknown`, fills `out_report`
/// and leaves `out_archive` null.
///
/// # Safety
/// `m` must be a live handle; both output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn cr_factor(
    m: *const CrMap,
    involutions: u32,
    group: CrGroup,
    samples: u32,
    seed: u64,
    out_report: *mut *mut c_char,
    out_archive: *mut *mut c_char,
) -> CrStatus {
    guard(|| {
        if out_report.is_null() || out_archive.is_null() {
            return invalid("null output pointer");
        }
        *out_archive = ptr::null_mut();
        if involutions != 2 && involutions != 3 {
            return invalid("involutions must be 2 or 3");
        }
        if samples == 0 {
            return invalid("samples must be positive");
        }
        let m = tri!(map_ref(m));
        let l = limits(0, 0);
        let plan = SamplePlan::split(samples as usize, seed);
        let mut settings = Settings::new(l);
        settings.samples = Some(samples as usize);
        settings.seed = Some(seed);
        let n = involutions as usize;
        let built = if n == 3 {
            if m.map.degree() != 1 {
                let why = "three involutions need an orientation preserving map".to_string();
                Ok((FactorResult::refused(n, None, why), None, CrStatus::No))
            } else {
                three_involution_witness(&m.map, plan).map(|w| {
                    let res = FactorResult::success(n, None, &w, None);
                    (res, Some(w.to_archive().to_json()), CrStatus::Ok)
                })
            }
        } else {
            decide(&m.map, group, l).and_then(|v| {
                let d = report::decision(&v, m.map.degree());
                match (&v.answer, &v.plan) {
                    (Answer::Yes, Some(p)) => witness_for_plan(&m.map, p, plan).map(|w| {
                        let res = FactorResult::success(n, Some(d), &w, None);
                        (res, Some(w.to_archive().to_json()), CrStatus::Ok)
                    }),
                    _ => Ok((
                        FactorResult::refused(n, Some(d), v.reason.clone()),
                        None,
                        answer_status(v.answer),
                    )),
                }
            })
        };
        let (res, archive, status) = match built {
            Ok(b) => b,
            Err(e) => return fail(e),
        };
        let s = put(out_report, Report::new("factor", &m.source, settings, res).to_json());
        if s != CrStatus::Ok {
            return s;
        }
        if let Some(a) = archive {
            let s = put(out_archive, a);
            if s != CrStatus::Ok {
                cr_string_free(*out_report);
                *out_report = ptr::null_mut();
                return s;
            }
        }
        status
    })
}

/// Re-verifies a witness archive, optionally against `m` (may be null).
/// Returns `Ok` when every identity holds and `No` otherwise; `out` receives
/// the verification report.
///
/// # Safety
/// `archive` must be a NUL-terminated string, `m` null or a live handle and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cr_verify(
    archive: *const c_char,
    m: *const CrMap,
    out: *mut *mut c_char,
) -> CrStatus {
    guard(|| {
        if out.is_null() {
            return invalid("null output pointer");
        }
        let s = tri!(text(archive));
        let a = match WitnessArchive::from_json(s) {
            Ok(a) => a,
            Err(e) => return fail(e),
        };
        let target = m.as_ref().map(|m| &m.map);
        let v = match a.reverify(target) {
            Ok(v) => v,
            Err(e) => return fail(e),
        };
        let pass = v.all_pass;
        let mut input = s.as_bytes().to_vec();
        if let Some(m) = m.as_ref() {
            input.extend_from_slice(&m.source);
        }
        let mut settings = Settings::new(Limits::default());
        settings.samples = Some(v.samples);
        settings.seed = Some(a.samples.seed);
        let r = Report::new("verify", &input, settings, v);
        let st = put(out, r.to_json());
        if st != CrStatus::Ok {
            return st;
        }
        if pass {
            CrStatus::Ok
        } else {
            CrStatus::No
        }
    })
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn cr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn cr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn cr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
