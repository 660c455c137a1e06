//! C ABI for the `rwre` library.
//!
//! Laws and environments are opaque handles created by `*_new`/`*_sample`/
//! `*_load` and released by the matching `*_free`. Every fallible call
//! returns an [`RwreStatus`]; on failure the message is available from
//! [`rwre_last_error`] on the same thread. Outputs are written only on
//! success. Panics never cross the boundary.

use rwre::dirichlet::LatticeDomain;
use rwre::env::{load_environment, make_law, sample_environment, save_environment, Environment, EnvironmentLaw, LawSpec};
use rwre::harnack::{harnack_ratio, oscillation_constant, BoundaryFamily, SourceSet, ZERO_INF_TOL};
use rwre::perc::{build_digraph, find_sinks};
use rwre::walk::{run_walk, StopOutcome, StopRule};
use rwre::{Error, LatticeBox};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RwreStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Balance = 3,
    Capacity = 4,
    Format = 5,
    BoxEscape = 6,
    Domain = 7,
    Solver = 8,
    SampleSize = 9,
    Config = 10,
    Io = 11,
    /// Walk hit its step limit before stopping.
    Timeout = 12,
    Internal = 13,
}

/// Opaque site law.
pub struct RwreLaw(EnvironmentLaw);

/// Opaque environment on a finite box.
pub struct RwreEnv(Environment);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> RwreStatus {
    match e {
        Error::Balance { .. } | Error::Probability { .. } | Error::DegenerateLaw { .. } => RwreStatus::Balance,
        Error::Capacity(_) => RwreStatus::Capacity,
        Error::Format { .. } => RwreStatus::Format,
        Error::BoxEscape { .. } => RwreStatus::BoxEscape,
        Error::Domain(_) => RwreStatus::Domain,
        Error::Argument(_) | Error::NotSigmaHarmonic { .. } => RwreStatus::InvalidArgument,
        Error::Solver { .. } | Error::WosTimeout { .. } => RwreStatus::Solver,
        Error::SampleSize(_) => RwreStatus::SampleSize,
        Error::Config { .. } => RwreStatus::Config,
        Error::Io(_) => RwreStatus::Io,
    }
}

enum Fail {
    Null(&'static str),
    Lib(Error),
    Status(RwreStatus, String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> RwreStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            RwreStatus::Ok
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(&format!("null pointer: {what}"));
            RwreStatus::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Status(s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            RwreStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail::Status(RwreStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(what))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_out<'a, T>(p: *mut T, len: usize, what: &'static str) -> Result<&'a mut [T], Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rwre_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or an empty string. The
/// pointer stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn rwre_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses `srw`, `axis-choice` or `atoms:p,p@q;...` in dimension `dim`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn rwre_law_new(spec: *const c_char, dim: usize, out: *mut *mut RwreLaw) -> RwreStatus {
    guard(|| {
        let spec = str_arg(spec, "spec")?;
        let out = out_arg(out, "out")?;
        let law = make_law(&LawSpec::parse(spec, dim)?)?;
        *out = Box::into_raw(Box::new(RwreLaw(law)));
        Ok(())
    })
}

/// # Safety
/// `law` must come from [`rwre_law_new`] and not be used afterwards. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn rwre_law_free(law: *mut RwreLaw) {
    if !law.is_null() {
        drop(Box::from_raw(law));
    }
}

/// Samples an environment on `[-half, half]^d`.
///
/// # Safety
/// `law` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn rwre_env_sample(law: *const RwreLaw, half: i64, seed: u64, out: *mut *mut RwreEnv) -> RwreStatus {
    guard(|| {
        let law = ref_arg(law, "law")?;
        let out = out_arg(out, "out")?;
        let b = LatticeBox::centered(law.0.dim(), half)?;
        *out = Box::into_raw(Box::new(RwreEnv(sample_environment(&law.0, &b, seed)?)));
        Ok(())
    })
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn rwre_env_load(path: *const c_char, out: *mut *mut RwreEnv) -> RwreStatus {
    guard(|| {
        let path = PathBuf::from(str_arg(path, "path")?);
        let out = out_arg(out, "out")?;
        *out = Box::into_raw(Box::new(RwreEnv(load_environment(&path)?)));
        Ok(())
    })
}

/// # Safety
/// `env` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn rwre_env_save(env: *const RwreEnv, path: *const c_char) -> RwreStatus {
    guard(|| {
        let env = ref_arg(env, "env")?;
        let path = PathBuf::from(str_arg(path, "path")?);
        save_environment(&env.0, &path)?;
        Ok(())
    })
}

/// # Safety
/// `env` must come from this library and not be used afterwards. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn rwre_env_free(env: *mut RwreEnv) {
    if !env.is_null() {
        drop(Box::from_raw(env));
    }
}

/// Dimension of the environment, or 0 for a null handle.
///
/// # Safety
/// `env` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rwre_env_dim(env: *const RwreEnv) -> usize {
    env.as_ref().map_or(0, |e| e.0.dim())
}

/// Copies the `d` axis weights `p_i` at `site` into `weights`.
///
/// # Safety
/// `site` and `weights` must each hold `dim` elements.
#[no_mangle]
pub unsafe extern "C" fn rwre_env_weights(env: *const RwreEnv, site: *const i64, dim: usize, weights: *mut f64) -> RwreStatus {
    guard(|| {
        let env = ref_arg(env, "env")?;
        check_dim(env, dim)?;
        let site = slice_arg(site, dim, "site")?;
        let out = slice_out(weights, dim, "weights")?;
        let w = env.0.weights_at(site).ok_or_else(|| Error::BoxEscape { site: site.to_vec() })?;
        out.copy_from_slice(w);
        Ok(())
    })
}

fn check_dim(env: &RwreEnv, dim: usize) -> Result<(), Fail> {
    if dim != env.0.dim() {
        return Err(Fail::Status(
            RwreStatus::InvalidArgument,
            format!("dim {dim} differs from the environment dimension {}", env.0.dim()),
        ));
    }
    Ok(())
}

/// Runs the quenched walk from `start` until it first hits the boundary
/// layer of the discrete ball `‖x‖₂ < radius` (sites of the ball with a
/// neighbour outside it), writing that site and the step count.
///
/// # Safety
/// `start` and `exit_site` must each hold `dim` elements; `steps` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn rwre_walk_exit_ball(
    env: *const RwreEnv,
    start: *const i64,
    dim: usize,
    radius: f64,
    seed: u64,
    max_steps: usize,
    exit_site: *mut i64,
    steps: *mut usize,
) -> RwreStatus {
    guard(|| {
        let env = ref_arg(env, "env")?;
        check_dim(env, dim)?;
        let start = slice_arg(start, dim, "start")?;
        let exit_site = slice_out(exit_site, dim, "exit_site")?;
        let steps = out_arg(steps, "steps")?;
        let dom = LatticeDomain::discrete_ball(radius, &vec![0.0; dim])?;
        let mask = dom.interior_mask(env.0.bounds());
        let t = run_walk(&env.0, start, StopRule::ExitMask(&mask), seed, max_steps)?;
        if t.outcome == StopOutcome::Timeout {
            return Err(Fail::Status(RwreStatus::Timeout, format!("no exit within {max_steps} steps")));
        }
        exit_site.copy_from_slice(&t.end());
        *steps = t.len();
        Ok(())
    })
}

/// Largest `sup_{B_R} f / inf_{B_R} f` over point-mass data on the closed
/// ball of radius `2R`, and the fraction of data with zero infimum.
///
/// # Safety
/// `env` must be a live handle; `ratio` and `zero_inf_frac` writable.
#[no_mangle]
pub unsafe extern "C" fn rwre_harnack_ratio(env: *const RwreEnv, radius: f64, ratio: *mut f64, zero_inf_frac: *mut f64) -> RwreStatus {
    guard(|| {
        let env = ref_arg(env, "env")?;
        let ratio = out_arg(ratio, "ratio")?;
        let zero = out_arg(zero_inf_frac, "zero_inf_frac")?;
        let h = harnack_ratio(&env.0, radius, &BoundaryFamily::PointMasses, ZERO_INF_TOL)?;
        *ratio = h.ratio;
        *zero = h.zero_inf_frac;
        Ok(())
    })
}

/// Largest total variation between exit laws from the closed ball of radius
/// `psi · R`, over starts in the closed ball of radius `R`.
///
/// # Safety
/// `env` must be a live handle; `upsilon` writable.
#[no_mangle]
pub unsafe extern "C" fn rwre_oscillation(env: *const RwreEnv, radius: f64, psi: f64, upsilon: *mut f64) -> RwreStatus {
    guard(|| {
        let env = ref_arg(env, "env")?;
        let upsilon = out_arg(upsilon, "upsilon")?;
        *upsilon = oscillation_constant(&env.0, radius, psi, SourceSet::All)?.upsilon_hat;
        Ok(())
    })
}

/// Number of sinks of the directed graph on the centered cube with `side`
/// sites per axis, and the density of the largest one.
///
/// # Safety
/// `env` must be a live handle; `count` and `density` writable.
#[no_mangle]
pub unsafe extern "C" fn rwre_sinks(env: *const RwreEnv, side: i64, count: *mut usize, density: *mut f64) -> RwreStatus {
    guard(|| {
        let env = ref_arg(env, "env")?;
        let count = out_arg(count, "count")?;
        let density = out_arg(density, "density")?;
        let b = LatticeBox::cube_of_side(env.0.dim(), side)?;
        let g = build_digraph(&env.0, &b)?;
        let s = find_sinks(&g);
        *count = s.count();
        *density = s.main_sink().len() as f64 / b.len() as f64;
        Ok(())
    })
}
