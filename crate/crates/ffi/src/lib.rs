//! C ABI over `pdae-core`.
//!
//! Objects are opaque handles created by `*_new*` / [`pdae_solve`] and
//! released with the matching `*_free`. Every fallible call returns a
//! [`PdaeStatus`]; on failure a description is available from
//! [`pdae_last_error_message`] on the calling thread until the next call.
//!
//! Callback problems require the callbacks to be callable from any thread
//! and to fill the whole output buffer.

use std::cell::RefCell;
use std::ffi::{c_char, c_void, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use pdae_core::linalg::DenseMatrix;
use pdae_core::problem::{
    Curve, ExactSolution, ExampleId, GridSpec, MatrixField, PdaeProblem as CoreProblem, VectorField,
};
use pdae_core::solver::{march_with, CellStride, MarchOptions, SolutionGrid, SolveReport};
use pdae_core::stencil::stencil_weight;
use pdae_core::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PdaeStatus {
    Ok = 0,
    InvalidArgument = 1,
    NullPointer = 2,
    Singular = 3,
    NoConvergence = 4,
    DegeneratePolynomial = 5,
    SingularPencil = 6,
    Precondition = 7,
    SingularCell = 8,
    Instability = 9,
    Unsupported = 10,
    Panic = 11,
}

/// Marching policy passed to [`pdae_solve`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PdaeStride {
    Unit = 0,
    Block = 1,
}

/// Fills the row-major `n × n` matrix at `(x, t)`.
pub type PdaeMatrixFn = Option<extern "C" fn(x: f64, t: f64, out: *mut f64, user_data: *mut c_void)>;
/// Fills the `n`-vector at `(x, t)`.
pub type PdaeVectorFn = Option<extern "C" fn(x: f64, t: f64, out: *mut f64, user_data: *mut c_void)>;
/// Fills the `n`-vector at `s`.
pub type PdaeCurveFn = Option<extern "C" fn(s: f64, out: *mut f64, user_data: *mut c_void)>;

type RawField = extern "C" fn(f64, f64, *mut f64, *mut c_void);
type RawCurve = extern "C" fn(f64, *mut f64, *mut c_void);

/// Opaque problem handle.
pub struct PdaeProblem {
    inner: CoreProblem,
}

/// Opaque solution handle.
pub struct PdaeSolution {
    grid: SolutionGrid,
    report: SolveReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> PdaeStatus {
    match e {
        Error::InvalidArgument(_) => PdaeStatus::InvalidArgument,
        Error::Singular { .. } => PdaeStatus::Singular,
        Error::NoConvergence { .. } => PdaeStatus::NoConvergence,
        Error::DegeneratePolynomial => PdaeStatus::DegeneratePolynomial,
        Error::IdenticallySingularPencil { .. } => PdaeStatus::SingularPencil,
        Error::Precondition(_) => PdaeStatus::Precondition,
        Error::SingularCell { .. } => PdaeStatus::SingularCell,
        Error::Instability { .. } => PdaeStatus::Instability,
        Error::Unsupported(_) => PdaeStatus::Unsupported,
    }
}

enum Fail {
    Core(Error),
    Null(&'static str),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> PdaeStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PdaeStatus::Ok,
        Ok(Err(Fail::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer passed for {what}"));
            PdaeStatus::NullPointer
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            PdaeStatus::Panic
        }
    }
}

fn non_null<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    // SAFETY: callers pass either null or a pointer obtained from this library.
    unsafe { p.as_ref() }.ok_or(Fail::Null(what))
}

fn write_out<T>(out: *mut T, value: T, what: &'static str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null(what));
    }
    // SAFETY: `out` is non-null and points to writable storage per the API contract.
    unsafe { out.write(value) };
    Ok(())
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn pdae_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static, NUL-terminated name of a status code.
#[no_mangle]
pub extern "C" fn pdae_status_name(status: PdaeStatus) -> *const c_char {
    let s: &'static CStr = match status {
        PdaeStatus::Ok => c"ok",
        PdaeStatus::InvalidArgument => c"invalid argument",
        PdaeStatus::NullPointer => c"null pointer",
        PdaeStatus::Singular => c"singular matrix",
        PdaeStatus::NoConvergence => c"no convergence",
        PdaeStatus::DegeneratePolynomial => c"degenerate polynomial",
        PdaeStatus::SingularPencil => c"identically singular pencil",
        PdaeStatus::Precondition => c"precondition violated",
        PdaeStatus::SingularCell => c"singular cell system",
        PdaeStatus::Instability => c"non-finite values",
        PdaeStatus::Unsupported => c"unsupported operation",
        PdaeStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}

/// Creates a built-in problem: `"1"`, `"2"`, `"demo"` or `"singular"`.
///
/// # Safety
/// Pointer arguments must be null or valid for the documented access.
#[no_mangle]
pub unsafe extern "C" fn pdae_problem_new_example(name: *const c_char, out: *mut *mut PdaeProblem) -> PdaeStatus {
    guard(|| {
        if name.is_null() {
            return Err(Fail::Null("name"));
        }
        // SAFETY: `name` is a non-null NUL-terminated string per the API contract.
        let name = unsafe { CStr::from_ptr(name) }
            .to_str()
            .map_err(|_| Error::InvalidArgument("example name is not UTF-8".into()))?;
        let id: ExampleId = name.parse()?;
        let boxed = Box::new(PdaeProblem { inner: id.problem() });
        write_out(out, Box::into_raw(boxed), "out")
    })
}

#[derive(Clone, Copy)]
struct UserData(*mut c_void);
// SAFETY: the caller guarantees the callbacks and their data are thread-safe.
unsafe impl Send for UserData {}
unsafe impl Sync for UserData {}

impl UserData {
    fn get(self) -> *mut c_void {
        self.0
    }
}

fn matrix_field(n: usize, f: RawField, ud: UserData) -> MatrixField {
    Arc::new(move |x, t| {
        let mut buf = vec![f64::NAN; n * n];
        f(x, t, buf.as_mut_ptr(), ud.get());
        DenseMatrix::from_fn(n, n, |i, j| buf[i * n + j])
    })
}

fn vector_field(n: usize, f: RawField, ud: UserData) -> VectorField {
    Arc::new(move |x, t| {
        let mut buf = vec![f64::NAN; n];
        f(x, t, buf.as_mut_ptr(), ud.get());
        buf
    })
}

fn curve(n: usize, f: RawCurve, ud: UserData) -> Curve {
    Arc::new(move |s| {
        let mut buf = vec![f64::NAN; n];
        f(s, buf.as_mut_ptr(), ud.get());
        buf
    })
}

/// Creates a problem of order `n` from callbacks. `exact` may be null.
/// `user_data` is passed through to every callback and must outlive the
/// problem.
///
/// # Safety
/// Pointer arguments must be null or valid for the documented access.
#[no_mangle]
pub unsafe extern "C" fn pdae_problem_new_callbacks(
    n: usize,
    a: PdaeMatrixFn,
    b: PdaeMatrixFn,
    c: PdaeMatrixFn,
    f: PdaeVectorFn,
    psi: PdaeCurveFn,
    phi: PdaeCurveFn,
    exact: PdaeVectorFn,
    user_data: *mut c_void,
    out: *mut *mut PdaeProblem,
) -> PdaeStatus {
    guard(|| {
        let ud = UserData(user_data);
        let a = a.ok_or(Fail::Null("a"))?;
        let b = b.ok_or(Fail::Null("b"))?;
        let c = c.ok_or(Fail::Null("c"))?;
        let f = f.ok_or(Fail::Null("f"))?;
        let psi = psi.ok_or(Fail::Null("psi"))?;
        let phi = phi.ok_or(Fail::Null("phi"))?;
        let mut problem = CoreProblem::new(
            "callback problem",
            n,
            matrix_field(n, a, ud),
            matrix_field(n, b, ud),
            matrix_field(n, c, ud),
            vector_field(n, f, ud),
            curve(n, psi, ud),
            curve(n, phi, ud),
        )?;
        if let Some(e) = exact {
            problem = problem.with_exact(ExactSolution { value: vector_field(n, e, ud), dt: None, dx: None });
        }
        write_out(out, Box::into_raw(Box::new(PdaeProblem { inner: problem })), "out")
    })
}

/// Order `n` of the system, or 0 for a null handle.
///
/// # Safety
/// Pointer arguments must be null or valid for the documented access.
#[no_mangle]
pub unsafe extern "C" fn pdae_problem_order(problem: *const PdaeProblem) -> usize {
    // SAFETY: null or a live handle from this library.
    unsafe { problem.as_ref() }.map_or(0, |p| p.inner.order())
}

/// Releases a problem. Null is ignored.
///
/// # Safety
/// Pointer arguments must be null or valid for the documented access.
#[no_mangle]
pub unsafe extern "C" fn pdae_problem_free(problem: *mut PdaeProblem) {
    if !problem.is_null() {
        // SAFETY: created by Box::into_raw in this library and not yet freed.
        drop(unsafe { Box::from_raw(problem) });
    }
}

/// Solves `problem` on `[x0, x_end] × [t0, t_end]` with steps `h`, `tau`
/// and degrees `m1`, `m2`.
///
/// # Safety
/// Pointer arguments must be null or valid for the documented access.
#[no_mangle]
pub unsafe extern "C" fn pdae_solve(
    problem: *const PdaeProblem,
    x0: f64,
    x_end: f64,
    t0: f64,
    t_end: f64,
    h: f64,
    tau: f64,
    m1: usize,
    m2: usize,
    stride: PdaeStride,
    out: *mut *mut PdaeSolution,
) -> PdaeStatus {
    guard(|| {
        let p = non_null(problem, "problem")?;
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let grid = GridSpec::new(x0, x_end, t0, t_end, h, tau)?;
        let stride = match stride {
            PdaeStride::Unit => CellStride::Unit,
            PdaeStride::Block => CellStride::Block,
        };
        let (sol, report) = march_with(&p.inner, &grid, m1, m2, &MarchOptions { stride })?;
        write_out(out, Box::into_raw(Box::new(PdaeSolution { grid: sol, report })), "out")
    })
}

/// Step counts `n1`, `n2` and system order `n`; nodes are `(n1+1) × (n2+1)`.
///
/// # Safety
/// Pointer arguments must be null or valid for the documented access.
#[no_mangle]
pub unsafe extern "C" fn pdae_solution_dims(
    solution: *const PdaeSolution,
    n1: *mut usize,
    n2: *mut usize,
    n: *mut usize,
) -> PdaeStatus {
    guard(|| {
        let s = non_null(solution, "solution")?;
        let (a, b, c) = s.grid.dims();
        write_out(n1, a, "n1")?;
        write_out(n2, b, "n2")?;
        write_out(n, c, "n")
    })
}

/// Copies the `n` components at node `(i, j)` into `out`.
///
/// # Safety
/// Pointer arguments must be null or valid for the documented access.
#[no_mangle]
pub unsafe extern "C" fn pdae_solution_value(
    solution: *const PdaeSolution,
    i: usize,
    j: usize,
    out: *mut f64,
) -> PdaeStatus {
    guard(|| {
        let s = non_null(solution, "solution")?;
        let (n1, n2, n) = s.grid.dims();
        if i > n1 || j > n2 {
            return Err(Error::InvalidArgument(format!("node ({i}, {j}) outside the {n1}x{n2} grid")).into());
        }
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        // SAFETY: `out` has room for `n` doubles per the API contract.
        unsafe { ptr::copy_nonoverlapping(s.grid.get(i, j).as_ptr(), out, n) };
        Ok(())
    })
}

/// Max-norm error against the exact solution; `Unsupported` without one.
///
/// # Safety
/// Pointer arguments must be null or valid for the documented access.
#[no_mangle]
pub unsafe extern "C" fn pdae_solution_delta_u(solution: *const PdaeSolution, out: *mut f64) -> PdaeStatus {
    guard(|| {
        let s = non_null(solution, "solution")?;
        let du = s.report.delta_u.ok_or_else(|| Error::Unsupported("problem has no exact solution".into()))?;
        write_out(out, du, "out")
    })
}

/// Largest absolute solution component, or NaN for a null handle.
///
/// # Safety
/// Pointer arguments must be null or valid for the documented access.
#[no_mangle]
pub unsafe extern "C" fn pdae_solution_max_norm(solution: *const PdaeSolution) -> f64 {
    // SAFETY: null or a live handle from this library.
    unsafe { solution.as_ref() }.map_or(f64::NAN, |s| s.report.max_solution_norm)
}

/// Number of cell systems solved, or 0 for a null handle.
///
/// # Safety
/// Pointer arguments must be null or valid for the documented access.
#[no_mangle]
pub unsafe extern "C" fn pdae_solution_cells(solution: *const PdaeSolution) -> usize {
    // SAFETY: null or a live handle from this library.
    unsafe { solution.as_ref() }.map_or(0, |s| s.report.cells_solved)
}

/// Releases a solution. Null is ignored.
///
/// # Safety
/// Pointer arguments must be null or valid for the documented access.
#[no_mangle]
pub unsafe extern "C" fn pdae_solution_free(solution: *mut PdaeSolution) {
    if !solution.is_null() {
        // SAFETY: created by Box::into_raw in this library and not yet freed.
        drop(unsafe { Box::from_raw(solution) });
    }
}

/// Differentiation weight `H(m, s, l)`.
///
/// # Safety
/// Pointer arguments must be null or valid for the documented access.
#[no_mangle]
pub unsafe extern "C" fn pdae_stencil_weight(m: usize, s: usize, l: usize, out: *mut f64) -> PdaeStatus {
    guard(|| {
        let w = stencil_weight(m, s, l)?;
        write_out(out, w, "out")
    })
}
