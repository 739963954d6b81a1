//! C interface to `rdp_dbar`.
//!
//! Every function returns an [`RdpStatus`]. On failure the message of the
//! last error on the calling thread is available through
//! [`rdp_last_error_message`]. Solutions are opaque handles released with
//! [`rdp_solution_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use rdp_dbar::dbar_solver::{QuadratureSpec, SolveMethod};
use rdp_dbar::descend::SurfaceFunction;
use rdp_dbar::geometry::{Covering, Point2, Point3, SurfaceKind};
use rdp_dbar::harness::{run_solve, shipped_case};
use rdp_dbar::inequalities::{build_j, check_ball_corollary, check_lemma_a2, check_lemma_general, MarginEntry};
use rdp_dbar::Error;

/// Status codes returned by every entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RdpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OffSurface = 3,
    OutsideDomain = 4,
    NotClosed = 5,
    NotConverged = 6,
    NotInvariant = 7,
    NonFinite = 8,
    BufferTooSmall = 9,
    Internal = 10,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RdpSurface {
    A = 0,
    D = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RdpMethod {
    Direct = 0,
    Table = 1,
}

/// Both sides of an inequality and the normalized margin
/// `(lhs - rhs) / max(lhs, rhs)`.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RdpMargin {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

/// Opaque solution handle.
pub struct RdpSolution {
    h: SurfaceFunction,
    oracle_error: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(err: &Error) -> RdpStatus {
    match err {
        Error::InvalidDegree(_)
        | Error::InvalidDeckIndex { .. }
        | Error::InvalidQuadrature(_)
        | Error::InvalidCutoff { .. }
        | Error::UnknownCase(_)
        | Error::Config(_)
        | Error::SupportNotInterior { .. }
        | Error::WrongSurface { .. } => RdpStatus::InvalidArgument,
        Error::OffSurface { .. } => RdpStatus::OffSurface,
        Error::OutsideDomain { .. } => RdpStatus::OutsideDomain,
        Error::NotClosed { .. } => RdpStatus::NotClosed,
        Error::QuadratureNotConverged { .. } => RdpStatus::NotConverged,
        Error::NotDeckInvariant { .. } => RdpStatus::NotInvariant,
        Error::NonFinite => RdpStatus::NonFinite,
        _ => RdpStatus::Internal,
    }
}

struct Fail(RdpStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> RdpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            RdpStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside rdp_dbar".into());
            RdpStatus::Internal
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(RdpStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read<const K: usize>(p: *const f64, what: &str) -> Result<[f64; K], Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    let mut out = [0.0; K];
    out.copy_from_slice(std::slice::from_raw_parts(p, K));
    Ok(out)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn point2(v: [f64; 4]) -> Point2 {
    Point2::new(c(v[0], v[1]), c(v[2], v[3]))
}

fn covering(surface: RdpSurface, n: u32) -> Result<Covering, Error> {
    let kind = match surface {
        RdpSurface::A => SurfaceKind::A,
        RdpSurface::D => SurfaceKind::D,
    };
    Covering::new(kind, n)
}

unsafe fn write_margin(out: *mut RdpMargin, m: MarginEntry) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = RdpMargin { lhs: m.lhs, rhs: m.rhs, margin: m.margin() };
    Ok(())
}

/// Copies the last error message of this thread into `buf` (NUL
/// terminated, truncated to `len`). Returns the full message length.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn rdp_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rdp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Solves a shipped manufactured case (`"zero"`, `"bump_u0"`, `"bump_u3"`)
/// on the ball of radius `radius` and stores a new handle in `*out`.
/// `grid` of 0 picks the default lattice. The oracle error is measured on
/// `samples` seeded points.
///
/// # Safety
/// `case_name` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rdp_solve_case(
    surface: RdpSurface,
    n: u32,
    radius: f64,
    case_name: *const c_char,
    grid: u32,
    method: RdpMethod,
    samples: u32,
    seed: u64,
    out: *mut *mut RdpSolution,
) -> RdpStatus {
    guard(|| {
        if case_name.is_null() {
            return Err(null("case_name"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let name = CStr::from_ptr(case_name)
            .to_str()
            .map_err(|_| Fail(RdpStatus::InvalidArgument, "case name is not UTF-8".into()))?;
        let cov = covering(surface, n)?;
        let case = shipped_case(name, cov, radius)?;
        let quad = if grid == 0 {
            QuadratureSpec::default_for(&cov, radius)?
        } else {
            QuadratureSpec::new(radius, grid as usize)?
        };
        let method = match method {
            RdpMethod::Direct => SolveMethod::Direct,
            RdpMethod::Table => SolveMethod::Table,
        };
        let (h, report) = run_solve(&case, &quad, method, samples as usize, 0, seed)?;
        *out = Box::into_raw(Box::new(RdpSolution { h, oracle_error: report.oracle_error }));
        Ok(())
    })
}

/// Evaluates the solution at a surface point given as six doubles
/// `(re x1, im x1, re x2, im x2, re x3, im x3)`; writes `(re, im)` to `out`.
///
/// # Safety
/// `sol` must come from [`rdp_solve_case`]; `x` must hold 6 doubles and
/// `out` room for 2.
#[no_mangle]
pub unsafe extern "C" fn rdp_solution_eval(sol: *const RdpSolution, x: *const f64, out: *mut f64) -> RdpStatus {
    guard(|| {
        let sol = sol.as_ref().ok_or_else(|| null("sol"))?;
        let v = read::<6>(x, "x")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let w = sol.h.eval(&Point3::new(c(v[0], v[1]), c(v[2], v[3]), c(v[4], v[5])))?;
        *out = w.re;
        *out.add(1) = w.im;
        Ok(())
    })
}

/// Relative sup error against the exact solution measured at solve time.
///
/// # Safety
/// `sol` must come from [`rdp_solve_case`] and `out` be valid.
#[no_mangle]
pub unsafe extern "C" fn rdp_solution_oracle_error(sol: *const RdpSolution, out: *mut f64) -> RdpStatus {
    guard(|| {
        let sol = sol.as_ref().ok_or_else(|| null("sol"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = sol.oracle_error;
        Ok(())
    })
}

/// Releases a solution handle. Null is ignored.
///
/// # Safety
/// `sol` must come from [`rdp_solve_case`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rdp_solution_free(sol: *mut RdpSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// Distance inequality for the degree 2 quotient at plane points `z`,
/// `zeta` (4 doubles each).
///
/// # Safety
/// `z` and `zeta` must hold 4 doubles, `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn rdp_check_a2(z: *const f64, zeta: *const f64, out: *mut RdpMargin) -> RdpStatus {
    guard(|| {
        let m = check_lemma_a2(&point2(read::<4>(z, "z")?), &point2(read::<4>(zeta, "zeta")?));
        write_margin(out, m)
    })
}

/// Distance inequality for the degree `n` quotient map with exponent
/// `delta`.
///
/// # Safety
/// `z` and `zeta` must hold 4 doubles, `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn rdp_check_general(
    n: u32,
    delta: u32,
    z: *const f64,
    zeta: *const f64,
    out: *mut RdpMargin,
) -> RdpStatus {
    guard(|| {
        if n < 2 || delta == 0 {
            return Err(Fail(RdpStatus::InvalidArgument, format!("need n >= 2 and delta >= 1, got {n}, {delta}")));
        }
        let m = check_lemma_general(n, delta, &point2(read::<4>(z, "z")?), &point2(read::<4>(zeta, "zeta")?));
        write_margin(out, m)
    })
}

/// Ball form of the distance inequality on `B_radius`.
///
/// # Safety
/// `z` and `zeta` must hold 4 doubles, `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn rdp_check_ball(
    n: u32,
    radius: f64,
    z: *const f64,
    zeta: *const f64,
    out: *mut RdpMargin,
) -> RdpStatus {
    guard(|| {
        if n < 2 || !(radius > 0.0 && radius.is_finite()) {
            return Err(Fail(RdpStatus::InvalidArgument, format!("need n >= 2 and radius > 0, got {n}, {radius}")));
        }
        let m = check_ball_corollary(n, radius, &point2(read::<4>(z, "z")?), &point2(read::<4>(zeta, "zeta")?));
        write_margin(out, m)
    })
}

/// Index set `J` for `a`, `s` (2 doubles each). Writes up to `cap` indices
/// to `out` and the full count to `*len`; returns `BUFFER_TOO_SMALL` if
/// `cap` was insufficient.
///
/// # Safety
/// `a`, `s` must hold 2 doubles, `out` room for `cap` values, `len` valid.
#[no_mangle]
pub unsafe extern "C" fn rdp_build_j(
    n: u32,
    a: *const f64,
    s: *const f64,
    out: *mut u32,
    cap: usize,
    len: *mut usize,
) -> RdpStatus {
    guard(|| {
        if n < 2 {
            return Err(Fail(RdpStatus::InvalidArgument, format!("need n >= 2, got {n}")));
        }
        let [ar, ai] = read::<2>(a, "a")?;
        let [sr, si] = read::<2>(s, "s")?;
        if len.is_null() {
            return Err(null("len"));
        }
        let j = build_j(n, c(ar, ai), c(sr, si));
        *len = j.len();
        if j.len() > cap {
            return Err(Fail(RdpStatus::BufferTooSmall, format!("need room for {} indices, got {cap}", j.len())));
        }
        if !j.is_empty() {
            if out.is_null() {
                return Err(null("out"));
            }
            std::ptr::copy_nonoverlapping(j.as_ptr(), out, j.len());
        }
        Ok(())
    })
}
