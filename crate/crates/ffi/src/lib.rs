//! C ABI for the lcz-mbt engine.
//!
//! Models and suites are opaque handles created by `lcz_model_parse`,
//! `lcz_generate` or `lcz_suite_import` and released with the matching
//! `*_free` function. Strings returned through `char **out` parameters are
//! owned by the caller and must be released with `lcz_string_free`.
//!
//! Every function returns an [`LczStatus`]. On failure the thread-local
//! `lcz_last_error_message` and `lcz_last_error_code` describe the problem
//! until the next call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lcz_mbt::coverage::{verify_suite, AnnotatedSuite, CoverageCriterion};
use lcz_mbt::generate::{GenerationConfig, TestSuite};
use lcz_mbt::io::{export_suite, import_suite, parse_model, render_dot, Format, IoError};
use lcz_mbt::lcz::{compute_lczs, Threshold};
use lcz_mbt::model::{validate, ProcessModel};
use lcz_mbt::pipeline::{run_generation, PipelineError};

/// Result of every C API call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LczStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Input text could not be parsed or did not match its schema.
    ParseError = 3,
    /// The model has validation errors.
    InvalidModel = 4,
    /// A threshold, format, criterion or configuration was out of range.
    InvalidArgument = 5,
    /// Requirements could not be built or generation failed.
    GenerationFailed = 6,
    /// A suite was produced but does not satisfy the criterion.
    IncompleteCoverage = 7,
    /// The suite was checked and does not satisfy the criterion.
    Unsatisfied = 8,
    /// An internal error; the engine caught a panic.
    Internal = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LczFormat {
    Json = 0,
    Xml = 1,
    Csv = 2,
}

impl From<LczFormat> for Format {
    fn from(f: LczFormat) -> Self {
        match f {
            LczFormat::Json => Format::Json,
            LczFormat::Xml => Format::Xml,
            LczFormat::Csv => Format::Csv,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LczCriterion {
    EachBorderNodeOnce = 0,
    AllCombinationsOfBorderNodes = 1,
}

impl From<LczCriterion> for CoverageCriterion {
    fn from(c: LczCriterion) -> Self {
        match c {
            LczCriterion::EachBorderNodeOnce => CoverageCriterion::EachBorderNodeOnce,
            LczCriterion::AllCombinationsOfBorderNodes => CoverageCriterion::AllCombinationsOfBorderNodes,
        }
    }
}

/// A parsed process model.
pub struct LczModel {
    model: ProcessModel,
}

/// A generated or imported test suite.
pub struct LczSuite {
    annotated: AnnotatedSuite,
    suite: TestSuite,
}

struct LastError {
    code: CString,
    message: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<LastError>> = const { RefCell::new(None) };
}

struct Failure {
    status: LczStatus,
    code: String,
    message: String,
}

impl Failure {
    fn new(status: LczStatus, code: &str, message: impl Into<String>) -> Self {
        Failure {
            status,
            code: code.to_owned(),
            message: message.into(),
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        let status = match e {
            IoError::Unsupported(_) => LczStatus::InvalidArgument,
            _ => LczStatus::ParseError,
        };
        Failure::new(status, e.code(), e.to_string())
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        let status = match &e {
            PipelineError::InvalidModel(_) => LczStatus::InvalidModel,
            PipelineError::Generate(lcz_mbt::generate::GenerateError::InvalidConfig(_)) => LczStatus::InvalidArgument,
            _ => LczStatus::GenerationFailed,
        };
        Failure::new(status, e.code(), e.to_string())
    }
}

fn c_string(s: &str) -> CString {
    CString::new(s.replace('\0', "\u{FFFD}")).expect("nul bytes replaced")
}

fn set_last_error(code: &str, message: &str) {
    LAST_ERROR.with(|e| {
        *e.borrow_mut() = Some(LastError {
            code: c_string(code),
            message: c_string(message),
        })
    });
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// Runs `body`, translating failures and panics into a status code.
fn guard(body: impl FnOnce() -> Result<LczStatus, Failure>) -> LczStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(status)) => status,
        Ok(Err(f)) => {
            set_last_error(&f.code, &f.message);
            f.status
        }
        Err(panic) => {
            let message = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error("INTERNAL", &message);
            LczStatus::Internal
        }
    }
}

fn null(name: &str) -> Failure {
    Failure::new(LczStatus::NullArgument, "NULL_ARGUMENT", format!("{name} is null"))
}

/// # Safety
/// `p` must be null or point to a NUL-terminated string.
unsafe fn read_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(name));
    }
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|e| Failure::new(LczStatus::InvalidUtf8, "INVALID_UTF8", format!("{name}: {e}")))
}

/// # Safety
/// `p` must be null or a handle obtained from this library.
unsafe fn handle<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    unsafe { p.as_ref() }.ok_or_else(|| null(name))
}

fn check_out<T>(out: *mut T, name: &str) -> Result<(), Failure> {
    if out.is_null() {
        Err(null(name))
    } else {
        Ok(())
    }
}

/// # Safety
/// `out` must be valid for writes.
unsafe fn put_string(out: *mut *mut c_char, text: &str) {
    unsafe { *out = c_string(text).into_raw() };
}

fn threshold(value: f64) -> Result<Threshold, Failure> {
    Threshold::new(value).map_err(|e| Failure::new(LczStatus::InvalidArgument, "THRESHOLD_OUT_OF_RANGE", e.to_string()))
}

fn to_json(value: &impl serde::Serialize) -> String {
    serde_json::to_string(value).expect("library types serialize")
}

/// Parses a model document. JSON and XML are accepted.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lcz_model_parse(text: *const c_char, format: LczFormat, out: *mut *mut LczModel) -> LczStatus {
    guard(|| {
        check_out(out, "out")?;
        unsafe { *out = ptr::null_mut() };
        let text = unsafe { read_str(text, "text") }?;
        let model = parse_model(text, format.into())?;
        unsafe { *out = Box::into_raw(Box::new(LczModel { model })) };
        Ok(LczStatus::Ok)
    })
}

/// Releases a model. Null is ignored.
///
/// # Safety
/// `model` must be null or a handle from `lcz_model_parse` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lcz_model_free(model: *mut LczModel) {
    if !model.is_null() {
        drop(unsafe { Box::from_raw(model) });
    }
}

/// Writes the validation report as JSON. Returns `InvalidModel` when the
/// report contains errors; the report is written either way.
///
/// # Safety
/// `model` must be a live handle and `report_json` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lcz_model_validate(model: *const LczModel, report_json: *mut *mut c_char) -> LczStatus {
    guard(|| {
        check_out(report_json, "report_json")?;
        let model = unsafe { handle(model, "model") }?;
        let report = validate(&model.model);
        unsafe { put_string(report_json, &to_json(&report)) };
        if report.is_ok() {
            Ok(LczStatus::Ok)
        } else {
            Err(Failure::new(
                LczStatus::InvalidModel,
                "INVALID_MODEL",
                format!("the model has {} validation error(s)", report.errors().count()),
            ))
        }
    })
}

/// Computes the zones at `threshold` and writes the report as JSON.
///
/// # Safety
/// `model` must be a live handle and `report_json` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lcz_model_zones(
    model: *const LczModel,
    threshold_value: f64,
    report_json: *mut *mut c_char,
) -> LczStatus {
    guard(|| {
        check_out(report_json, "report_json")?;
        let model = unsafe { handle(model, "model") }?;
        let report = compute_lczs(&model.model, threshold(threshold_value)?);
        unsafe { put_string(report_json, &to_json(&report)) };
        Ok(LczStatus::Ok)
    })
}

/// Generates a suite. `config_json` is a generation config object, e.g.
/// `{"threshold": 0.5, "criterion": "each_border_node_once", "seed": 42}`.
///
/// Returns `IncompleteCoverage` with a valid suite in `*out` when the
/// generator ran out of iterations; the caller frees it as usual.
///
/// # Safety
/// `model` must be a live handle, `config_json` a NUL-terminated string and
/// `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lcz_generate(
    model: *const LczModel,
    config_json: *const c_char,
    out: *mut *mut LczSuite,
) -> LczStatus {
    guard(|| {
        check_out(out, "out")?;
        unsafe { *out = ptr::null_mut() };
        let model = unsafe { handle(model, "model") }?;
        let text = unsafe { read_str(config_json, "config_json") }?;
        let config: GenerationConfig = serde_json::from_str(text)
            .map_err(|e| Failure::new(LczStatus::InvalidArgument, "INVALID_CONFIG", e.to_string()))?;
        let output = run_generation(&model.model, &config)?;
        let warning = output.suite.warning_code();
        let handle = Box::new(LczSuite {
            annotated: output.annotated,
            suite: output.suite.clone(),
        });
        unsafe { *out = Box::into_raw(handle) };
        match warning {
            Some(code) => {
                set_last_error(code, "the suite does not satisfy the coverage criterion");
                Ok(LczStatus::IncompleteCoverage)
            }
            None => Ok(LczStatus::Ok),
        }
    })
}

/// Reads a suite previously exported as JSON or XML.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lcz_suite_import(text: *const c_char, format: LczFormat, out: *mut *mut LczSuite) -> LczStatus {
    guard(|| {
        check_out(out, "out")?;
        unsafe { *out = ptr::null_mut() };
        let text = unsafe { read_str(text, "text") }?;
        let annotated = import_suite(text, format.into())?;
        let suite = annotated.test_suite();
        unsafe { *out = Box::into_raw(Box::new(LczSuite { annotated, suite })) };
        Ok(LczStatus::Ok)
    })
}

/// Releases a suite. Null is ignored.
///
/// # Safety
/// `suite` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lcz_suite_free(suite: *mut LczSuite) {
    if !suite.is_null() {
        drop(unsafe { Box::from_raw(suite) });
    }
}

/// Serializes a suite with its checklist annotations.
///
/// # Safety
/// `suite` must be a live handle and `text` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lcz_suite_export(suite: *const LczSuite, format: LczFormat, text: *mut *mut c_char) -> LczStatus {
    guard(|| {
        check_out(text, "text")?;
        let suite = unsafe { handle(suite, "suite") }?;
        unsafe { put_string(text, &export_suite(&suite.annotated, format.into()).payload) };
        Ok(LczStatus::Ok)
    })
}

/// Total transitions over all cases, or 0 for a null handle.
///
/// # Safety
/// `suite` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lcz_suite_total_steps(suite: *const LczSuite) -> usize {
    unsafe { suite.as_ref() }.map_or(0, |s| s.suite.total_steps)
}

/// Number of test cases, or 0 for a null handle.
///
/// # Safety
/// `suite` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lcz_suite_case_count(suite: *const LczSuite) -> usize {
    unsafe { suite.as_ref() }.map_or(0, |s| s.suite.cases.len())
}

/// Checks `suite` against `criterion` at `threshold` and writes the verdict
/// as JSON. Returns `Unsatisfied` when the criterion is not met.
///
/// # Safety
/// `model` and `suite` must be live handles and `verdict_json` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lcz_verify(
    model: *const LczModel,
    suite: *const LczSuite,
    threshold_value: f64,
    criterion: LczCriterion,
    verdict_json: *mut *mut c_char,
) -> LczStatus {
    guard(|| {
        check_out(verdict_json, "verdict_json")?;
        let model = unsafe { handle(model, "model") }?;
        let suite = unsafe { handle(suite, "suite") }?;
        let report = compute_lczs(&model.model, threshold(threshold_value)?);
        let verdict = verify_suite(&model.model, &report, criterion.into(), &suite.suite.walks());
        unsafe { put_string(verdict_json, &to_json(&verdict)) };
        if verdict.satisfied {
            Ok(LczStatus::Ok)
        } else {
            Err(Failure::new(LczStatus::Unsatisfied, "UNSATISFIED", "the suite does not satisfy the criterion"))
        }
    })
}

/// Renders the model and its zones as Graphviz DOT. `suite` may be null;
/// otherwise its walks are drawn bold.
///
/// # Safety
/// `model` must be a live handle, `suite` null or a live handle, and `dot`
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lcz_render_dot(
    model: *const LczModel,
    threshold_value: f64,
    suite: *const LczSuite,
    dot: *mut *mut c_char,
) -> LczStatus {
    guard(|| {
        check_out(dot, "dot")?;
        let model = unsafe { handle(model, "model") }?;
        let suite = unsafe { suite.as_ref() };
        let report = compute_lczs(&model.model, threshold(threshold_value)?);
        let text = render_dot(&model.model, &report, suite.map(|s| &s.suite));
        unsafe { put_string(dot, &text) };
        Ok(LczStatus::Ok)
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lcz_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Message of the last failure on this thread, or null after a success.
/// The pointer stays valid until the next API call on the same thread.
#[no_mangle]
pub extern "C" fn lcz_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |e| e.message.as_ptr()))
}

/// Machine-readable code of the last failure on this thread (for example
/// `INFEASIBLE_BORDER_NODE`), or null after a success.
#[no_mangle]
pub extern "C" fn lcz_last_error_code() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |e| e.code.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lcz_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
