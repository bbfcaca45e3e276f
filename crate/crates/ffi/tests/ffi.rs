use std::ffi::{c_void, CStr};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use pdae_ffi::*;

fn last_error() -> String {
    let p = pdae_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn example(name: &CStr) -> *mut PdaeProblem {
    unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(pdae_problem_new_example(name.as_ptr(), &mut p), PdaeStatus::Ok);
        assert!(!p.is_null());
        p
    }
}

#[test]
fn solve_example1_through_handles() {
    unsafe {
        let p = example(c"1");
        assert_eq!(pdae_problem_order(p), 6);
        let mut s = ptr::null_mut();
        assert_eq!(pdae_solve(p, 0.0, 1.0, 0.0, 1.0, 0.1, 0.1, 2, 2, PdaeStride::Unit, &mut s), PdaeStatus::Ok);
        let (mut n1, mut n2, mut n) = (0, 0, 0);
        assert_eq!(pdae_solution_dims(s, &mut n1, &mut n2, &mut n), PdaeStatus::Ok);
        assert_eq!((n1, n2, n), (10, 10, 6));
        let mut du = 0.0;
        assert_eq!(pdae_solution_delta_u(s, &mut du), PdaeStatus::Ok);
        let core = pdae_core::solver::march(
            &pdae_core::problem::example1(),
            &pdae_core::problem::GridSpec::unit_square(0.1, 0.1).unwrap(),
            2,
            2,
        )
        .unwrap();
        assert_eq!(du, core.1.delta_u.unwrap());
        assert_eq!(pdae_solution_cells(s), core.1.cells_solved);
        assert_eq!(pdae_solution_max_norm(s), core.1.max_solution_norm);
        let mut v = [0.0; 6];
        assert_eq!(pdae_solution_value(s, 0, 0, v.as_mut_ptr()), PdaeStatus::Ok);
        assert_eq!(v, [0.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        assert_eq!(pdae_solution_value(s, 11, 0, v.as_mut_ptr()), PdaeStatus::InvalidArgument);
        pdae_solution_free(s);
        pdae_problem_free(p);
    }
}

#[test]
fn error_codes_and_messages() {
    unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(pdae_problem_new_example(c"7".as_ptr(), &mut p), PdaeStatus::InvalidArgument);
        assert!(last_error().contains("unknown example"));
        assert_eq!(pdae_problem_new_example(ptr::null(), &mut p), PdaeStatus::NullPointer);

        let sing = example(c"singular");
        let mut s = ptr::null_mut();
        let st = pdae_solve(sing, 0.0, 1.0, 0.0, 1.0, 0.1, 0.1, 2, 2, PdaeStride::Unit, &mut s);
        assert_eq!(st, PdaeStatus::SingularCell);
        assert!(last_error().contains("base node (i, j)"));
        assert!(s.is_null());
        let st = pdae_solve(sing, 0.0, 1.0, 0.0, 1.0, 0.3, 0.1, 2, 2, PdaeStride::Unit, &mut s);
        assert_eq!(st, PdaeStatus::InvalidArgument);
        assert_eq!(
            pdae_solve(ptr::null(), 0.0, 1.0, 0.0, 1.0, 0.1, 0.1, 2, 2, PdaeStride::Unit, &mut s),
            PdaeStatus::NullPointer
        );
        pdae_problem_free(sing);

        let demo = example(c"demo");
        assert_eq!(pdae_solve(demo, 0.0, 1.0, 0.0, 1.0, 0.1, 0.1, 2, 2, PdaeStride::Block, &mut s), PdaeStatus::Ok);
        pdae_solution_free(s);
        pdae_problem_free(demo);

        let mut w = 0.0;
        assert_eq!(pdae_stencil_weight(1, 1, 0, &mut w), PdaeStatus::Ok);
        assert_eq!(w, -1.0);
        assert_eq!(pdae_stencil_weight(0, 1, 0, &mut w), PdaeStatus::InvalidArgument);
        assert_eq!(pdae_problem_order(ptr::null()), 0);
        assert!(pdae_solution_max_norm(ptr::null()).is_nan());
        pdae_problem_free(ptr::null_mut());
        pdae_solution_free(ptr::null_mut());
        let name = CStr::from_ptr(pdae_status_name(PdaeStatus::SingularCell));
        assert_eq!(name.to_str().unwrap(), "singular cell system");
    }
}

extern "C" fn scaled_identity(_x: f64, _t: f64, out: *mut f64, ud: *mut c_void) {
    let k = unsafe { *(ud as *const f64) };
    unsafe { *out = k };
}
extern "C" fn zero(_x: f64, _t: f64, out: *mut f64, _ud: *mut c_void) {
    unsafe { *out = 0.0 };
}
extern "C" fn rhs(_x: f64, _t: f64, out: *mut f64, ud: *mut c_void) {
    let k = unsafe { *(ud as *const f64) };
    unsafe { *out = 2.0 * k };
}
extern "C" fn exact(x: f64, t: f64, out: *mut f64, _ud: *mut c_void) {
    unsafe { *out = x + t };
}
extern "C" fn boundary(s: f64, out: *mut f64, _ud: *mut c_void) {
    unsafe { *out = s };
}

#[test]
fn callback_problem_with_user_data() {
    unsafe {
        let mut k = 3.0f64;
        let ud = &mut k as *mut f64 as *mut c_void;
        let mut p = ptr::null_mut();
        let st = pdae_problem_new_callbacks(
            1,
            Some(scaled_identity),
            Some(scaled_identity),
            Some(zero),
            Some(rhs),
            Some(boundary),
            Some(boundary),
            Some(exact),
            ud,
            &mut p,
        );
        assert_eq!(st, PdaeStatus::Ok);
        let mut s = ptr::null_mut();
        assert_eq!(pdae_solve(p, 0.0, 1.0, 0.0, 1.0, 0.25, 0.25, 1, 1, PdaeStride::Unit, &mut s), PdaeStatus::Ok);
        let mut du = 1.0;
        assert_eq!(pdae_solution_delta_u(s, &mut du), PdaeStatus::Ok);
        assert!(du < 1e-12);
        pdae_solution_free(s);
        pdae_problem_free(p);

        let st = pdae_problem_new_callbacks(1, None, None, None, None, None, None, None, ud, &mut p);
        assert_eq!(st, PdaeStatus::NullPointer);
        let st = pdae_problem_new_callbacks(
            1,
            Some(scaled_identity),
            Some(scaled_identity),
            Some(zero),
            Some(rhs),
            Some(boundary),
            Some(boundary),
            None,
            ud,
            &mut p,
        );
        assert_eq!(st, PdaeStatus::Ok);
        assert_eq!(pdae_solve(p, 0.0, 1.0, 0.0, 1.0, 0.25, 0.25, 1, 1, PdaeStride::Unit, &mut s), PdaeStatus::Ok);
        assert_eq!(pdae_solution_delta_u(s, &mut du), PdaeStatus::Unsupported);
        pdae_solution_free(s);
        pdae_problem_free(p);
    }
}

fn target_dir() -> PathBuf {
    // tests run from target/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_compiles_and_runs_against_header() {
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let lib_dir = target_dir();
    assert!(lib_dir.join("libpdae_ffi.so").exists(), "cdylib not built in {}", lib_dir.display());
    let out = tempfile::tempdir().unwrap();
    let exe = out.path().join("solve_example");
    let status = Command::new(std::env::var("CC").unwrap_or_else(|_| "cc".into()))
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg(crate_dir.join("examples/solve_example.c"))
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg("-L")
        .arg(&lib_dir)
        .arg(format!("-Wl,-rpath,{}", lib_dir.display()))
        .arg("-lpdae_ffi")
        .arg("-lm")
        .arg("-o")
        .arg(&exe)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let run = Command::new(&exe).output().unwrap();
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(run.status.success(), "{stdout}{}", String::from_utf8_lossy(&run.stderr));
    assert!(stdout.contains("example1 delta_u 1.7558"), "{stdout}");
}
