//! C interface to the ihc solver.
//!
//! Handles are opaque and owned by the caller: every `*_parse`/`ihc_solve`
//! result must be released with the matching `*_free`. Strings returned by
//! a report stay valid until the report is freed. On failure a function
//! returns a non-zero [`IhcStatus`] and [`ihc_last_error`] describes it.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::time::Duration;

use ihc::certificate::{replay_text, serialize, Certificate, ReplayResult};
use ihc::engine::solve::{solve_hccs, SolveConfig, Verdict};
use ihc::frontend::{parse_problem, ProblemFile};
use ihc::smt::SmtConfig;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IhcStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Solver = 4,
    Certificate = 5,
    Panic = 6,
}

/// Same numbering as the command-line exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IhcVerdict {
    Solvable = 0,
    Unsolvable = 1,
    Unknown = 2,
    LemmaRejected = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct IhcOptions {
    /// Whole-run budget in milliseconds; 0 disables it.
    pub timeout_ms: u64,
    pub smt_timeout_ms: u64,
    pub max_inductions: u32,
    pub max_unfolds: u32,
    pub jobs: u32,
    pub apply_p_replace: bool,
    pub unfold_without_induct: bool,
}

/// A parsed problem.
pub struct IhcProblem {
    inner: ProblemFile,
}

/// The outcome of [`ihc_solve`].
pub struct IhcReport {
    verdict: IhcVerdict,
    certificate: Option<CString>,
    counterexample: Option<CString>,
    summary: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn guard(f: impl FnOnce() -> Result<(), (IhcStatus, String)>) -> IhcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            IhcStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            IhcStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, (IhcStatus, String)> {
    if s.is_null() {
        return Err((IhcStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(s).to_str().map_err(|e| (IhcStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn smt_config(solver: *const c_char) -> Result<SmtConfig, (IhcStatus, String)> {
    let smt = SmtConfig::default();
    if solver.is_null() {
        return Ok(smt);
    }
    Ok(smt.with_command(read_str(solver, "solver")?))
}

fn text(s: String) -> CString {
    CString::new(s.replace('\0', " ")).unwrap_or_default()
}

/// Defaults used by the command line.
#[no_mangle]
pub extern "C" fn ihc_options_default() -> IhcOptions {
    let cfg = SolveConfig::default();
    IhcOptions {
        timeout_ms: cfg.timeout.map_or(0, |t| t.as_millis() as u64),
        smt_timeout_ms: cfg.smt.timeout_ms,
        max_inductions: cfg.limits.max_inductions,
        max_unfolds: cfg.limits.max_unfolds_per_branch,
        jobs: 1,
        apply_p_replace: false,
        unfold_without_induct: false,
    }
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer is valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ihc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn ihc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses problem text into `*out`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ihc_problem_parse(text: *const c_char, out: *mut *mut IhcProblem) -> IhcStatus {
    guard(|| {
        if out.is_null() {
            return Err((IhcStatus::NullArgument, "out is null".into()));
        }
        *out = ptr::null_mut();
        let src = read_str(text, "text")?;
        let inner = parse_problem(src).map_err(|e| (IhcStatus::Parse, e.to_string()))?;
        *out = Box::into_raw(Box::new(IhcProblem { inner }));
        Ok(())
    })
}

/// # Safety
/// `problem` must come from [`ihc_problem_parse`] or be null.
#[no_mangle]
pub unsafe extern "C" fn ihc_problem_free(problem: *mut IhcProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// # Safety
/// `problem` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ihc_problem_goal_count(problem: *const IhcProblem) -> usize {
    problem.as_ref().map_or(0, |p| p.inner.hccs.goals.len())
}

/// # Safety
/// `problem` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ihc_problem_lemma_count(problem: *const IhcProblem) -> usize {
    problem.as_ref().map_or(0, |p| p.inner.lemmas.len())
}

/// Solves `problem`. `options` and `solver` may be null for the defaults;
/// `solver` is a whitespace-separated command line.
///
/// # Safety
/// Pointers must be valid or null as documented; `out` must not be null.
#[no_mangle]
pub unsafe extern "C" fn ihc_solve(
    problem: *const IhcProblem,
    options: *const IhcOptions,
    solver: *const c_char,
    out: *mut *mut IhcReport,
) -> IhcStatus {
    guard(|| {
        if out.is_null() {
            return Err((IhcStatus::NullArgument, "out is null".into()));
        }
        *out = ptr::null_mut();
        let p = &problem.as_ref().ok_or((IhcStatus::NullArgument, "problem is null".to_string()))?.inner;
        let opts = options.as_ref().copied().unwrap_or_else(|| ihc_options_default());
        let mut cfg = SolveConfig { smt: smt_config(solver)?, jobs: opts.jobs.max(1) as usize, ..SolveConfig::default() };
        cfg.smt.timeout_ms = opts.smt_timeout_ms;
        cfg.timeout = (opts.timeout_ms > 0).then(|| Duration::from_millis(opts.timeout_ms));
        cfg.limits.max_inductions = opts.max_inductions;
        cfg.limits.max_unfolds_per_branch = opts.max_unfolds;
        let flag = |k: &str| p.options.get(k).is_some_and(|v| v == "true");
        cfg.strategy.apply_p_replace = opts.apply_p_replace || flag("apply-p-replace");
        cfg.strategy.unfold_without_induct = opts.unfold_without_induct || flag("unfold-without-induct");
        let report = solve_hccs(p, &cfg).map_err(|e| (IhcStatus::Solver, e.to_string()))?;
        let (verdict, summary) = match &report.verdict {
            Verdict::Solvable => (IhcVerdict::Solvable, "SOLVABLE".to_string()),
            Verdict::Unsolvable { goal, .. } => (IhcVerdict::Unsolvable, format!("UNSOLVABLE (goal {goal})")),
            Verdict::Unknown(r) => (IhcVerdict::Unknown, format!("UNKNOWN ({r})")),
            Verdict::LemmaRejected { lemma, reason } => {
                (IhcVerdict::LemmaRejected, format!("LEMMA REJECTED (lemma {lemma}: {reason})"))
            }
        };
        let certificate = match (&report.verdict, report.proofs()) {
            (Verdict::Solvable, Some((lemmas, goals))) => Some(text(serialize(&Certificate { lemmas, goals }))),
            _ => None,
        };
        let counterexample = match &report.verdict {
            Verdict::Unsolvable { cex, .. } => Some(text(cex.to_string())),
            _ => None,
        };
        *out = Box::into_raw(Box::new(IhcReport { verdict, certificate, counterexample, summary: text(summary) }));
        Ok(())
    })
}

/// # Safety
/// `report` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ihc_report_verdict(report: *const IhcReport) -> IhcVerdict {
    report.as_ref().map_or(IhcVerdict::Unknown, |r| r.verdict)
}

/// One-line human-readable verdict.
///
/// # Safety
/// `report` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ihc_report_summary(report: *const IhcReport) -> *const c_char {
    report.as_ref().map_or(ptr::null(), |r| r.summary.as_ptr())
}

/// Certificate text for a SOLVABLE verdict, otherwise null.
///
/// # Safety
/// `report` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ihc_report_certificate(report: *const IhcReport) -> *const c_char {
    report.as_ref().and_then(|r| r.certificate.as_ref()).map_or(ptr::null(), |c| c.as_ptr())
}

/// Counterexample text for an UNSOLVABLE verdict, otherwise null.
///
/// # Safety
/// `report` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ihc_report_counterexample(report: *const IhcReport) -> *const c_char {
    report.as_ref().and_then(|r| r.counterexample.as_ref()).map_or(ptr::null(), |c| c.as_ptr())
}

/// # Safety
/// `report` must come from [`ihc_solve`] or be null.
#[no_mangle]
pub unsafe extern "C" fn ihc_report_free(report: *mut IhcReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Replays certificate text against `problem`; `*verified` receives the
/// outcome. A rejected certificate is not an error: the call returns
/// `Ok` with `*verified == false` and [`ihc_last_error`] holds the reason.
///
/// # Safety
/// `certificate` must be NUL-terminated, `problem` live, `verified` valid.
#[no_mangle]
pub unsafe extern "C" fn ihc_replay(
    certificate: *const c_char,
    problem: *const IhcProblem,
    solver: *const c_char,
    verified: *mut bool,
) -> IhcStatus {
    let mut reason = None;
    let status = guard(|| {
        if verified.is_null() {
            return Err((IhcStatus::NullArgument, "verified is null".into()));
        }
        *verified = false;
        let cert = read_str(certificate, "certificate")?;
        let p = &problem.as_ref().ok_or((IhcStatus::NullArgument, "problem is null".to_string()))?.inner;
        let smt = smt_config(solver)?;
        match replay_text(cert, p, &smt).map_err(|e| (IhcStatus::Certificate, e.to_string()))? {
            ReplayResult::Verified => *verified = true,
            ReplayResult::Rejected { reason: r, path } => reason = Some(format!("rejected at {path}: {r}")),
        }
        Ok(())
    });
    if let Some(r) = reason {
        set_error(r);
    }
    status
}
