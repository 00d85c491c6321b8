//! C ABI over the aifm core. Arenas and skeletons are opaque handles;
//! strategies, profiles and reports cross the boundary as JSON strings with
//! rationals written `"p/q"`.
//!
//! Every function returns an [`AifmStatus`]. On anything but `AIFM_STATUS_OK`
//! and `AIFM_STATUS_VERDICT_FALSE`, [`aifm_last_error`] describes the failure.
//! Strings returned through `char **` belong to the caller and are released
//! with [`aifm_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use aifm::construct::{cover_witness, product_arena, Coverage};
use aifm::json::{self, StrategyJson};
use aifm::memory::{m_max, trivial_skeleton};
use aifm::rational::format;
use aifm::solve::{self, DeviationClass, LiftOptions, SolveOptions, SynthOptions};
use aifm::{Error, InitializedArena, MemorySkeleton, Objective};
use serde_json::json;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AifmStatus {
    Ok = 0,
    /// The checked property does not hold.
    VerdictFalse = 1,
    InputError = 2,
    CapExceeded = 3,
    NullPointer = 4,
    /// A Rust panic was caught at the boundary.
    Internal = 5,
}

/// Opaque initialized arena.
pub struct AifmArena(InitializedArena);

/// Opaque memory skeleton.
pub struct AifmSkeleton(MemorySkeleton);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> AifmStatus {
    match e {
        Error::EnumerationCapExceeded { .. } | Error::RecursionBudgetExceeded { .. } => AifmStatus::CapExceeded,
        Error::HypothesisFailed(_) | Error::InputNotNE(_) => AifmStatus::VerdictFalse,
        _ => AifmStatus::InputError,
    }
}

enum Fail {
    Null(&'static str),
    Core(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

impl From<aifm::arena::ArenaError> for Fail {
    fn from(e: aifm::arena::ArenaError) -> Self {
        Fail::Core(e.into())
    }
}

impl From<aifm::memory::MemoryError> for Fail {
    fn from(e: aifm::memory::MemoryError) -> Self {
        Fail::Core(e.into())
    }
}

/// Runs `f`, recording errors and catching panics.
fn guard(f: impl FnOnce() -> Result<AifmStatus, Fail>) -> AifmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => {
            set_error("");
            status
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(&format!("{what} is null"));
            AifmStatus::NullPointer
        }
        Ok(Err(Fail::Core(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal error");
            AifmStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail::Core(Error::Input(format!("{what} is not UTF-8"))))
}

unsafe fn handle<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null("out"));
    }
    *out = CString::new(s).map_err(|_| Fail::Core(Error::Input("interior NUL".into())))?.into_raw();
    Ok(())
}

fn objective(s: &str) -> Result<Objective, Fail> {
    Ok(s.parse::<Objective>()?)
}

fn cap_or_default(cap: u64) -> u64 {
    if cap == 0 {
        solve::default_cap()
    } else {
        cap
    }
}

fn strategy_json(s: &aifm::Strategy) -> Result<serde_json::Value, Fail> {
    Ok(serde_json::to_value(StrategyJson::from_strategy(s)?).expect("serializable"))
}

fn per_initial(values: &[(String, aifm::Rational)]) -> serde_json::Value {
    serde_json::Value::Object(values.iter().map(|(s, v)| (s.clone(), json!(format(v)))).collect())
}

/// Message of the last failure on this thread; empty after a success. The
/// pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn aifm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` is null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn aifm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `json` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn aifm_arena_from_json(json: *const c_char, out: *mut *mut AifmArena) -> AifmStatus {
    guard(|| {
        let a = json::parse_arena(str_arg(json, "json")?)?;
        put(out, AifmArena(a))?;
        Ok(AifmStatus::Ok)
    })
}

/// A registered fixture (`fig3`, `fig4`, `split-left`, `split-right`).
///
/// # Safety
/// `name` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn aifm_arena_fixture(name: *const c_char, out: *mut *mut AifmArena) -> AifmStatus {
    guard(|| {
        let name = str_arg(name, "name")?;
        let a = aifm::fixtures::by_name(name).ok_or_else(|| Error::Input(format!("unknown fixture {name}")))?;
        put(out, AifmArena(a))?;
        Ok(AifmStatus::Ok)
    })
}

/// # Safety
/// `arena` is null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn aifm_arena_free(arena: *mut AifmArena) {
    if !arena.is_null() {
        drop(Box::from_raw(arena));
    }
}

/// # Safety
/// `arena` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn aifm_arena_to_json(arena: *const AifmArena, out: *mut *mut c_char) -> AifmStatus {
    guard(|| {
        let a = handle(arena, "arena")?;
        put_string(out, json::arena_to_string(&a.0))?;
        Ok(AifmStatus::Ok)
    })
}

/// Number of states, or 0 for a null handle.
///
/// # Safety
/// `arena` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn aifm_arena_state_count(arena: *const AifmArena) -> usize {
    arena.as_ref().map_or(0, |a| a.0.arena().len())
}

/// # Safety
/// `json` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn aifm_skeleton_from_json(json: *const c_char, out: *mut *mut AifmSkeleton) -> AifmStatus {
    guard(|| {
        let k = json::parse_skeleton(str_arg(json, "json")?)?;
        put(out, AifmSkeleton(k))?;
        Ok(AifmStatus::Ok)
    })
}

/// The one-state skeleton over the colors of `arena`.
///
/// # Safety
/// `arena` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn aifm_skeleton_trivial(arena: *const AifmArena, out: *mut *mut AifmSkeleton) -> AifmStatus {
    guard(|| {
        let a = handle(arena, "arena")?;
        put(out, AifmSkeleton(trivial_skeleton(&a.0.arena().colors())))?;
        Ok(AifmStatus::Ok)
    })
}

/// The largest-color skeleton over the colors of `arena`.
///
/// # Safety
/// `arena` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn aifm_skeleton_max(arena: *const AifmArena, out: *mut *mut AifmSkeleton) -> AifmStatus {
    guard(|| {
        let a = handle(arena, "arena")?;
        put(out, AifmSkeleton(m_max(&a.0.arena().colors())?))?;
        Ok(AifmStatus::Ok)
    })
}

/// # Safety
/// `skeleton` is null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn aifm_skeleton_free(skeleton: *mut AifmSkeleton) {
    if !skeleton.is_null() {
        drop(Box::from_raw(skeleton));
    }
}

/// # Safety
/// `skeleton` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn aifm_skeleton_to_json(skeleton: *const AifmSkeleton, out: *mut *mut c_char) -> AifmStatus {
    guard(|| {
        let k = handle(skeleton, "skeleton")?;
        put_string(out, json::skeleton_to_string(&k.0))?;
        Ok(AifmStatus::Ok)
    })
}

/// # Safety
/// Handles are live; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn aifm_product(
    arena: *const AifmArena,
    skeleton: *const AifmSkeleton,
    out: *mut *mut AifmArena,
) -> AifmStatus {
    guard(|| {
        let (a, k) = (handle(arena, "arena")?, handle(skeleton, "skeleton")?);
        let (p, _) = product_arena(&a.0, &k.0)?;
        put(out, AifmArena(p))?;
        Ok(AifmStatus::Ok)
    })
}

/// `AIFM_STATUS_OK` if the skeleton covers the arena,
/// `AIFM_STATUS_VERDICT_FALSE` if not.
///
/// # Safety
/// Handles are live.
#[no_mangle]
pub unsafe extern "C" fn aifm_is_covered(arena: *const AifmArena, skeleton: *const AifmSkeleton) -> AifmStatus {
    guard(|| {
        let (a, k) = (handle(arena, "arena")?, handle(skeleton, "skeleton")?);
        Ok(match cover_witness(&a.0, &k.0)? {
            Coverage::Covered(_) => AifmStatus::Ok,
            Coverage::Conflict(_) => AifmStatus::VerdictFalse,
        })
    })
}

/// Values of a profile (JSON `{"p1": …, "p2": …}`) from each initial state,
/// as a JSON object.
///
/// # Safety
/// `arena` is live; strings are NUL-terminated; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn aifm_evaluate(
    arena: *const AifmArena,
    objective_spec: *const c_char,
    profile_json: *const c_char,
    out: *mut *mut c_char,
) -> AifmStatus {
    guard(|| {
        let a = handle(arena, "arena")?;
        let obj = objective(str_arg(objective_spec, "objective")?)?;
        let profile = json::parse_profile(str_arg(profile_json, "profile")?)?;
        let values = aifm::chain::evaluate_plain(&a.0, &profile, &obj)?;
        let values: Vec<(String, aifm::Rational)> = a.0.initial_names().into_iter().zip(values).collect();
        put_string(out, per_initial(&values).to_string())?;
        Ok(AifmStatus::Ok)
    })
}

/// Optimal Mealy strategy on `skeleton` for the single player with choices.
/// The report holds `value`, `per_initial`, `uniform` and `strategy`.
/// A `cap` of 0 uses the default enumeration cap.
///
/// # Safety
/// Handles are live; `objective_spec` is NUL-terminated; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn aifm_solve_mdp(
    arena: *const AifmArena,
    skeleton: *const AifmSkeleton,
    objective_spec: *const c_char,
    cap: u64,
    out: *mut *mut c_char,
) -> AifmStatus {
    guard(|| {
        let (a, k) = (handle(arena, "arena")?, handle(skeleton, "skeleton")?);
        let obj = objective(str_arg(objective_spec, "objective")?)?;
        let player = if a.0.has_choice(aifm::arena::Player::Two) {
            aifm::arena::Player::Two
        } else {
            aifm::arena::Player::One
        };
        let opts = SolveOptions::with_cap(cap_or_default(cap));
        let (mealy, r) = solve::mdp_solve_with_memory(&a.0, &k.0, &obj, player, opts)?;
        let body = json!({
            "value": format(&r.value),
            "per_initial": per_initial(&r.per_initial),
            "uniform": r.uniform,
            "strategy": strategy_json(&mealy.into())?,
        });
        put_string(out, body.to_string())?;
        Ok(AifmStatus::Ok)
    })
}

/// Equilibrium of Mealy strategies on `skeleton` (P1) and the trivial
/// skeleton (P2). The report holds `values`, `profile` and `warnings`.
///
/// # Safety
/// Handles are live; `objective_spec` is NUL-terminated; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn aifm_solve_game(
    arena: *const AifmArena,
    skeleton: *const AifmSkeleton,
    objective_spec: *const c_char,
    cap: u64,
    out: *mut *mut c_char,
) -> AifmStatus {
    guard(|| {
        let (a, k) = (handle(arena, "arena")?, handle(skeleton, "skeleton")?);
        let obj = objective(str_arg(objective_spec, "objective")?)?;
        let k2 = trivial_skeleton(k.0.alphabet());
        let synth = SynthOptions { cap: cap_or_default(cap), ..SynthOptions::default() };
        let r = solve::lift_two_player(&a.0, &k.0, &k2, &obj, LiftOptions { synth, ..LiftOptions::default() })?;
        let body = json!({
            "values": per_initial(&r.values),
            "profile": { "p1": strategy_json(&r.p1.clone().into())?, "p2": strategy_json(&r.p2.clone().into())? },
            "warnings": r.warnings,
        });
        put_string(out, body.to_string())?;
        Ok(AifmStatus::Ok)
    })
}

/// Checks a profile against memoryless deviations (`skeleton` null) or
/// Mealy deviations on `skeleton`. Writes a JSON verdict to `out` and
/// returns `AIFM_STATUS_VERDICT_FALSE` when some player can improve.
///
/// # Safety
/// `arena` is live, `skeleton` is null or live; strings are NUL-terminated;
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn aifm_check_ne(
    arena: *const AifmArena,
    skeleton: *const AifmSkeleton,
    objective_spec: *const c_char,
    profile_json: *const c_char,
    cap: u64,
    out: *mut *mut c_char,
) -> AifmStatus {
    guard(|| {
        let a = handle(arena, "arena")?;
        let obj = objective(str_arg(objective_spec, "objective")?)?;
        let profile = json::parse_profile(str_arg(profile_json, "profile")?)?;
        let class = match skeleton.as_ref() {
            Some(k) => DeviationClass::Mealy(k.0.clone()),
            None => DeviationClass::Memoryless,
        };
        let v = solve::check_ne(&a.0, &obj, &profile, &class, cap_or_default(cap))?;
        let counterexample = match &v.counterexample {
            Some(c) => json!({
                "player": c.player,
                "state": c.state,
                "deviation": strategy_json(&c.deviation)?,
                "before": format(&c.before),
                "after": format(&c.after),
            }),
            None => serde_json::Value::Null,
        };
        put_string(out, json!({ "holds": v.holds, "counterexample": counterexample }).to_string())?;
        Ok(if v.holds { AifmStatus::Ok } else { AifmStatus::VerdictFalse })
    })
}
