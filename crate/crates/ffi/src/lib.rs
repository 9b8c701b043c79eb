//! C ABI for `ftvertex`.
//!
//! Objects are opaque handles created by `*_new`/`*_build` functions and
//! released with the matching `*_destroy`. Every fallible function returns an
//! [`FtStatus`]; on failure a message is available from
//! [`ft_last_error_message`] on the same thread.
//!
//! Complex matrices cross the boundary as row-major arrays of interleaved
//! `re, im` doubles, so an `r x c` matrix takes `2 r c` values.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use ftvertex::solver::halving_grid;
use ftvertex::{
    build_approximation, classify_freelike, convergence_study, is_freelike, ks_scattering,
    solve_scattering, ApproxGraph, CMatrix, CouplingSt, Error, FreeLikeCase, ScatteringMatrix, C64,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotFreeLike = 3,
    NotHermitian = 4,
    Singular = 5,
    NumericalFailure = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FtCase {
    MinusJ = 0,
    PlusJ = 1,
    Balanced = 2,
}

impl From<FreeLikeCase> for FtCase {
    fn from(c: FreeLikeCase) -> Self {
        match c {
            FreeLikeCase::MinusJ => FtCase::MinusJ,
            FreeLikeCase::PlusJ => FtCase::PlusJ,
            FreeLikeCase::Balanced => FtCase::Balanced,
        }
    }
}

/// A coupling in ST-form.
pub struct FtCoupling(CouplingSt);

/// An n x n scattering matrix.
pub struct FtScattering(ScatteringMatrix);

/// An approximating graph.
pub struct FtApproxGraph(ApproxGraph);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(e: &Error) -> FtStatus {
    match e {
        Error::NotFreeLike | Error::InconsistentSplit { .. } | Error::ReconstructionMismatch { .. } => {
            FtStatus::NotFreeLike
        }
        Error::NotHermitian { .. } => FtStatus::NotHermitian,
        Error::SingularSystem { .. } => FtStatus::Singular,
        Error::InsufficientRows { .. } => FtStatus::NumericalFailure,
        _ => FtStatus::InvalidArgument,
    }
}

struct Fail(FtStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(FtStatus::NullPointer, format!("{what} is null"))
}

/// Runs `body`, converting errors and panics into a status code.
fn guard(body: impl FnOnce() -> Result<(), Fail>) -> FtStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            FtStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            FtStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn read_matrix(data: *const f64, len: usize, rows: usize, cols: usize) -> Result<CMatrix, Fail> {
    let needed = 2 * rows * cols;
    if len != needed {
        return Err(Fail(
            FtStatus::InvalidArgument,
            format!("expected {needed} doubles for a {rows}x{cols} matrix, got {len}"),
        ));
    }
    if needed == 0 {
        return Ok(CMatrix::zeros(rows, cols));
    }
    if data.is_null() {
        return Err(null("matrix data"));
    }
    let v = slice::from_raw_parts(data, len);
    Ok(CMatrix::from_fn(rows, cols, |i, j| {
        let at = 2 * (i * cols + j);
        C64::new(v[at], v[at + 1])
    }))
}

unsafe fn buffer<'a, T>(p: *mut T, len: usize, needed: usize, what: &str) -> Result<&'a mut [T], Fail> {
    if len < needed {
        return Err(Fail(FtStatus::BufferTooSmall, format!("{what} needs {needed} slots, got {len}")));
    }
    if needed == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts_mut(p, needed))
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `cap`). Returns the full message length without the NUL.
#[no_mangle]
pub unsafe extern "C" fn ft_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && cap > 0 {
            let n = msg.len().min(cap - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Creates a coupling from an `m x (n-m)` matrix `t`.
#[no_mangle]
pub unsafe extern "C" fn ft_coupling_new(
    n: usize,
    m: usize,
    t: *const f64,
    t_len: usize,
    out: *mut *mut FtCoupling,
) -> FtStatus {
    guard(|| {
        if m == 0 || m >= n {
            return Err(Error::DegenerateRank { n, m }.into());
        }
        let t = read_matrix(t, t_len, m, n - m)?;
        store(out, FtCoupling(CouplingSt::new(n, m, t)?))
    })
}

/// The free coupling of degree `n`.
#[no_mangle]
pub unsafe extern "C" fn ft_coupling_free_vertex(n: usize, out: *mut *mut FtCoupling) -> FtStatus {
    guard(|| store(out, FtCoupling(CouplingSt::free(n)?)))
}

#[no_mangle]
pub unsafe extern "C" fn ft_coupling_destroy(c: *mut FtCoupling) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// The k-independent scattering matrix of `c`.
#[no_mangle]
pub unsafe extern "C" fn ft_coupling_scattering(c: *const FtCoupling, out: *mut *mut FtScattering) -> FtStatus {
    guard(|| {
        let c = deref(c, "coupling")?;
        store(out, FtScattering(c.0.scattering()))
    })
}

/// Scattering matrix at momentum `k` through the general (A, B) form.
#[no_mangle]
pub unsafe extern "C" fn ft_coupling_scattering_at_k(
    c: *const FtCoupling,
    k: f64,
    out: *mut *mut FtScattering,
) -> FtStatus {
    guard(|| {
        let c = deref(c, "coupling")?;
        store(out, FtScattering(ks_scattering(&c.0.to_ab(), k)?))
    })
}

/// Wraps an `n x n` matrix, checking unitarity within `tol`.
#[no_mangle]
pub unsafe extern "C" fn ft_scattering_new(
    n: usize,
    data: *const f64,
    len: usize,
    tol: f64,
    out: *mut *mut FtScattering,
) -> FtStatus {
    guard(|| {
        let s = read_matrix(data, len, n, n)?;
        store(out, FtScattering(ScatteringMatrix::new(s, tol)?))
    })
}

/// Matrix dimension, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn ft_scattering_dim(s: *const FtScattering) -> usize {
    s.as_ref().map_or(0, |s| s.0.n())
}

/// Writes the matrix to `buf` (`2 n^2` doubles, row-major, interleaved).
#[no_mangle]
pub unsafe extern "C" fn ft_scattering_copy(s: *const FtScattering, buf: *mut f64, len: usize) -> FtStatus {
    guard(|| {
        let s = deref(s, "scattering matrix")?;
        let n = s.0.n();
        let dst = buffer(buf, len, 2 * n * n, "output buffer")?;
        for i in 0..n {
            for j in 0..n {
                let z = s.0.get(i, j);
                dst[2 * (i * n + j)] = z.re;
                dst[2 * (i * n + j) + 1] = z.im;
            }
        }
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ft_scattering_destroy(s: *mut FtScattering) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

#[no_mangle]
pub unsafe extern "C" fn ft_scattering_is_freelike(s: *const FtScattering, tol: f64, out: *mut bool) -> FtStatus {
    guard(|| {
        let s = deref(s, "scattering matrix")?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        *out = is_freelike(&s.0, tol);
        Ok(())
    })
}

/// Classifies a free-like matrix. `phases` receives `n - 1` values and
/// `permutation` receives `n` zero-based canonical positions.
#[no_mangle]
pub unsafe extern "C" fn ft_scattering_classify(
    s: *const FtScattering,
    tol: f64,
    case_out: *mut FtCase,
    p_out: *mut usize,
    phases: *mut f64,
    phases_len: usize,
    permutation: *mut usize,
    permutation_len: usize,
) -> FtStatus {
    guard(|| {
        let s = deref(s, "scattering matrix")?;
        if case_out.is_null() || p_out.is_null() {
            return Err(null("output pointer"));
        }
        let n = s.0.n();
        let phase_buf = buffer(phases, phases_len, n.saturating_sub(1), "phase buffer")?;
        let perm_buf = buffer(permutation, permutation_len, n, "permutation buffer")?;
        let form = classify_freelike(&s.0, tol)?;
        *case_out = form.case().into();
        *p_out = form.p();
        phase_buf.copy_from_slice(form.phases());
        perm_buf.copy_from_slice(form.permutation().as_slice());
        Ok(())
    })
}

/// Builds the approximating graph of `c` at scale `d`.
#[no_mangle]
pub unsafe extern "C" fn ft_approx_build(c: *const FtCoupling, d: f64, out: *mut *mut FtApproxGraph) -> FtStatus {
    guard(|| {
        let c = deref(c, "coupling")?;
        store(out, FtApproxGraph(build_approximation(&c.0, d)?))
    })
}

/// Number of connecting edges, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn ft_approx_connector_count(g: *const FtApproxGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.connectors().len())
}

/// Largest deviation of the graph's edge weights from those required by `c`.
#[no_mangle]
pub unsafe extern "C" fn ft_approx_reconstruction_residual(
    g: *const FtApproxGraph,
    c: *const FtCoupling,
    out: *mut f64,
) -> FtStatus {
    guard(|| {
        let g = deref(g, "graph")?;
        let c = deref(c, "coupling")?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        *out = g.0.reconstruction_residual(&c.0);
        Ok(())
    })
}

/// Scattering matrix of the graph at momentum `k`.
#[no_mangle]
pub unsafe extern "C" fn ft_approx_solve(g: *const FtApproxGraph, k: f64, out: *mut *mut FtScattering) -> FtStatus {
    guard(|| {
        let g = deref(g, "graph")?;
        store(out, FtScattering(solve_scattering(&g.0, k)?))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ft_approx_destroy(g: *mut FtApproxGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Convergence study on `d_start * 2^-j`, `j < steps`. `errors` receives one
/// value per step (NaN where the solver failed) and `order` the fitted slope.
#[no_mangle]
pub unsafe extern "C" fn ft_convergence(
    c: *const FtCoupling,
    k: f64,
    d_start: f64,
    steps: usize,
    errors: *mut f64,
    errors_len: usize,
    order: *mut f64,
) -> FtStatus {
    guard(|| {
        let c = deref(c, "coupling")?;
        if order.is_null() {
            return Err(null("output pointer"));
        }
        let dst = buffer(errors, errors_len, steps, "error buffer")?;
        let report = convergence_study(&c.0, k, &halving_grid(d_start, steps))?;
        for (slot, row) in dst.iter_mut().zip(&report.rows) {
            *slot = row.error().unwrap_or(f64::NAN);
        }
        *order = report.fitted_order;
        Ok(())
    })
}
