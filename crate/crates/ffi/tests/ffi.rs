use rwre_ffi::*;
use std::ffi::{CStr, CString};
use std::ptr;

fn last_error() -> String {
    unsafe { CStr::from_ptr(rwre_last_error()) }.to_string_lossy().into_owned()
}

fn law(spec: &str, dim: usize) -> *mut RwreLaw {
    let s = CString::new(spec).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { rwre_law_new(s.as_ptr(), dim, &mut out) }, RwreStatus::Ok);
    out
}

fn env(spec: &str, dim: usize, half: i64, seed: u64) -> *mut RwreEnv {
    let l = law(spec, dim);
    let mut e = ptr::null_mut();
    assert_eq!(unsafe { rwre_env_sample(l, half, seed, &mut e) }, RwreStatus::Ok);
    unsafe { rwre_law_free(l) };
    e
}

#[test]
fn version_is_nul_terminated() {
    let v = unsafe { CStr::from_ptr(rwre_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn errors_map_to_codes_and_messages() {
    let bad = CString::new("levy").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { rwre_law_new(bad.as_ptr(), 2, &mut out) }, RwreStatus::Config);
    assert!(out.is_null());
    assert!(last_error().contains("levy"));
    let unbalanced = CString::new("atoms:0.3,0.3@1").unwrap();
    assert_eq!(unsafe { rwre_law_new(unbalanced.as_ptr(), 2, &mut out) }, RwreStatus::Balance);
    assert_eq!(unsafe { rwre_law_new(ptr::null(), 2, &mut out) }, RwreStatus::NullPointer);
    let ok = CString::new("srw").unwrap();
    assert_eq!(unsafe { rwre_law_new(ok.as_ptr(), 2, ptr::null_mut()) }, RwreStatus::NullPointer);
    assert_eq!(unsafe { rwre_env_dim(ptr::null()) }, 0);
    unsafe {
        rwre_env_free(ptr::null_mut());
        rwre_law_free(ptr::null_mut());
    }
}

#[test]
fn weights_and_file_round_trip() {
    let e = env("axis-choice", 2, 6, 3);
    assert_eq!(unsafe { rwre_env_dim(e) }, 2);
    let mut w = [0.0; 2];
    assert_eq!(unsafe { rwre_env_weights(e, [1i64, -2].as_ptr(), 2, w.as_mut_ptr()) }, RwreStatus::Ok);
    assert!((w[0] + w[1] - 0.5).abs() < 1e-12);
    assert_eq!(unsafe { rwre_env_weights(e, [9i64, 0].as_ptr(), 2, w.as_mut_ptr()) }, RwreStatus::BoxEscape);
    assert_eq!(unsafe { rwre_env_weights(e, [0i64, 0].as_ptr(), 3, w.as_mut_ptr()) }, RwreStatus::InvalidArgument);

    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("e.rwre").to_str().unwrap()).unwrap();
    assert_eq!(unsafe { rwre_env_save(e, path.as_ptr()) }, RwreStatus::Ok);
    let mut back = ptr::null_mut();
    assert_eq!(unsafe { rwre_env_load(path.as_ptr(), &mut back) }, RwreStatus::Ok);
    let mut w2 = [0.0; 2];
    unsafe { rwre_env_weights(back, [1i64, -2].as_ptr(), 2, w2.as_mut_ptr()) };
    assert_eq!(w, w2);
    let missing = CString::new(dir.path().join("none").to_str().unwrap()).unwrap();
    assert_eq!(unsafe { rwre_env_load(missing.as_ptr(), &mut back) }, RwreStatus::Io);
    unsafe {
        rwre_env_free(e);
        rwre_env_free(back);
    }
}

#[test]
fn walk_exits_the_ball() {
    let e = env("srw", 2, 8, 1);
    let mut end = [0i64; 2];
    let mut steps = 0usize;
    let st = unsafe { rwre_walk_exit_ball(e, [0i64, 0].as_ptr(), 2, 5.0, 11, 1_000_000, end.as_mut_ptr(), &mut steps) };
    assert_eq!(st, RwreStatus::Ok);
    // boundary layer: inside the open ball, next to a site outside it
    let n2 = |x: i64, y: i64| x * x + y * y;
    assert!(n2(end[0], end[1]) < 25);
    assert!([(1, 0), (-1, 0), (0, 1), (0, -1)].iter().any(|(a, b)| n2(end[0] + a, end[1] + b) >= 25));
    assert!(steps >= 4);
    let st = unsafe { rwre_walk_exit_ball(e, [0i64, 0].as_ptr(), 2, 5.0, 11, 2, end.as_mut_ptr(), &mut steps) };
    assert_eq!(st, RwreStatus::Timeout);
    unsafe { rwre_env_free(e) };
}

#[test]
fn harnack_oscillation_and_sinks() {
    let line = env("srw", 1, 12, 0);
    let (mut ratio, mut zero) = (0.0, 1.0);
    assert_eq!(unsafe { rwre_harnack_ratio(line, 4.0, &mut ratio, &mut zero) }, RwreStatus::Ok);
    assert!((ratio - 3.0).abs() < 1e-12 && zero == 0.0);
    let mut ups = 0.0;
    assert_eq!(unsafe { rwre_oscillation(line, 4.0, 2.0, &mut ups) }, RwreStatus::Ok);
    assert!((ups - 0.5).abs() < 1e-12);
    assert_eq!(unsafe { rwre_oscillation(line, 4.0, 0.5, &mut ups) }, RwreStatus::InvalidArgument);
    unsafe { rwre_env_free(line) };

    let e = env("srw", 2, 8, 0);
    let (mut count, mut density) = (0usize, 0.0);
    assert_eq!(unsafe { rwre_sinks(e, 9, &mut count, &mut density) }, RwreStatus::Ok);
    assert_eq!((count, density), (1, 1.0));
    assert_eq!(unsafe { rwre_sinks(e, 40, &mut count, &mut density) }, RwreStatus::InvalidArgument);
    unsafe { rwre_env_free(e) };
}

#[test]
fn header_declares_the_api_and_compiles() {
    let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("include/rwre.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for f in ["rwre_law_new", "rwre_env_sample", "rwre_last_error", "rwre_harnack_ratio", "typedef struct RwreEnv RwreEnv"] {
        assert!(text.contains(f), "{f}");
    }
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path().join("use.c");
    std::fs::write(
        &c,
        "#include \"rwre.h\"\nint main(void) { RwreLaw *l = 0; return rwre_law_new(\"srw\", 2, &l) == RWRE_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    // only when a C compiler is present
    if let Ok(o) = std::process::Command::new("cc")
        .arg("-fsyntax-only")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(header.parent().unwrap())
        .arg(&c)
        .output()
    {
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
}
