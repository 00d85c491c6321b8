use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use aifm_ffi::*;

fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { aifm_string_free(s) };
    out
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(aifm_last_error()) }.to_str().unwrap().to_string()
}

fn fixture(name: &str) -> *mut AifmArena {
    let name = CString::new(name).unwrap();
    let mut a = ptr::null_mut();
    assert_eq!(unsafe { aifm_arena_fixture(name.as_ptr(), &mut a) }, AifmStatus::Ok);
    a
}

fn json(text: &str) -> serde_json::Value {
    serde_json::from_str(text).unwrap()
}

#[test]
fn solves_the_weak_parity_fixture() {
    let a = fixture("fig3");
    let wp = CString::new("weak-parity").unwrap();
    let (mut max, mut trivial) = (ptr::null_mut(), ptr::null_mut());
    unsafe {
        assert_eq!(aifm_skeleton_max(a, &mut max), AifmStatus::Ok);
        assert_eq!(aifm_skeleton_trivial(a, &mut trivial), AifmStatus::Ok);
        let mut out = ptr::null_mut();
        assert_eq!(aifm_solve_mdp(a, max, wp.as_ptr(), 0, &mut out), AifmStatus::Ok);
        assert_eq!(json(&take(out))["value"], "3/4");
        assert_eq!(aifm_solve_mdp(a, trivial, wp.as_ptr(), 0, &mut out), AifmStatus::Ok);
        assert_eq!(json(&take(out))["value"], "1/2");
        assert_eq!(aifm_is_covered(a, trivial), AifmStatus::Ok);
        assert_eq!(aifm_is_covered(a, max), AifmStatus::VerdictFalse);
        let mut p = ptr::null_mut();
        assert_eq!(aifm_product(a, max, &mut p), AifmStatus::Ok);
        assert!(aifm_arena_state_count(p) > aifm_arena_state_count(a));
        aifm_arena_free(p);
        aifm_skeleton_free(max);
        aifm_skeleton_free(trivial);
        aifm_arena_free(a);
    }
}

#[test]
fn arena_json_round_trips() {
    let a = fixture("fig4");
    unsafe {
        let mut text = ptr::null_mut();
        assert_eq!(aifm_arena_to_json(a, &mut text), AifmStatus::Ok);
        let text = CString::new(take(text)).unwrap();
        let mut b = ptr::null_mut();
        assert_eq!(aifm_arena_from_json(text.as_ptr(), &mut b), AifmStatus::Ok);
        assert_eq!(aifm_arena_state_count(a), aifm_arena_state_count(b));
        aifm_arena_free(a);
        aifm_arena_free(b);
    }
}

#[test]
fn checks_equilibria() {
    let a = fixture("fig3");
    let wp = CString::new("weak-parity").unwrap();
    let profile = CString::new(
        r#"{"p1":{"player":1,"choice":{"s1":"go","u0":"go","u1":"go","s2":"a","r":"loop","v1":"go","v2":"go","q":"loop"}},
            "p2":{"player":2,"choice":{}}}"#,
    )
    .unwrap();
    unsafe {
        let mut max = ptr::null_mut();
        assert_eq!(aifm_skeleton_max(a, &mut max), AifmStatus::Ok);
        let mut out = ptr::null_mut();
        assert_eq!(aifm_evaluate(a, wp.as_ptr(), profile.as_ptr(), &mut out), AifmStatus::Ok);
        assert_eq!(json(&take(out))["s1"], "1/2");
        assert_eq!(aifm_check_ne(a, ptr::null(), wp.as_ptr(), profile.as_ptr(), 0, &mut out), AifmStatus::Ok);
        assert_eq!(json(&take(out))["holds"], true);
        assert_eq!(aifm_check_ne(a, max, wp.as_ptr(), profile.as_ptr(), 0, &mut out), AifmStatus::VerdictFalse);
        let v = json(&take(out));
        assert_eq!(v["counterexample"]["after"], "3/4");
        assert_eq!(aifm_solve_game(a, max, wp.as_ptr(), 0, &mut out), AifmStatus::Ok);
        assert_eq!(json(&take(out))["values"]["s1"], "3/4");
        aifm_skeleton_free(max);
        aifm_arena_free(a);
    }
}

#[test]
fn errors_are_reported() {
    let mut a = ptr::null_mut();
    unsafe {
        assert_eq!(aifm_arena_from_json(ptr::null(), &mut a), AifmStatus::NullPointer);
        assert!(last_error().contains("null"));
        let bad = CString::new(r#"{"states":[],"actions":{},"initial":["x"]}"#).unwrap();
        assert_eq!(aifm_arena_from_json(bad.as_ptr(), &mut a), AifmStatus::InputError);
        assert!(!last_error().is_empty());
        let name = CString::new("nope").unwrap();
        assert_eq!(aifm_arena_fixture(name.as_ptr(), &mut a), AifmStatus::InputError);
        assert!(a.is_null());

        let fig = fixture("fig3");
        let mut max = ptr::null_mut();
        assert_eq!(aifm_skeleton_max(fig, &mut max), AifmStatus::Ok);
        assert!(last_error().is_empty());
        let wp = CString::new("weak-parity").unwrap();
        let mut out = ptr::null_mut();
        assert_eq!(aifm_solve_mdp(fig, max, wp.as_ptr(), 1, &mut out), AifmStatus::CapExceeded);
        let bad = CString::new("parity").unwrap();
        assert_eq!(aifm_solve_mdp(fig, max, bad.as_ptr(), 0, &mut out), AifmStatus::InputError);
        assert_eq!(aifm_arena_state_count(ptr::null()), 0);
        aifm_arena_free(ptr::null_mut());
        aifm_string_free(ptr::null_mut());
        aifm_skeleton_free(max);
        aifm_arena_free(fig);
    }
}

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/aifm.h")
}

#[test]
fn header_declares_the_api() {
    let text = std::fs::read_to_string(header()).unwrap();
    for name in [
        "typedef struct AifmArena AifmArena",
        "typedef struct AifmSkeleton AifmSkeleton",
        "AIFM_STATUS_CAP_EXCEEDED = 3",
        "aifm_last_error(void)",
        "aifm_solve_mdp(",
        "aifm_check_ne(",
        "aifm_string_free(char *s)",
    ] {
        assert!(text.contains(name), "{name} missing from the header");
    }
}

#[test]
fn header_compiles_as_c_and_cxx() {
    for (compiler, lang) in [("cc", "c"), ("c++", "c++")] {
        let Ok(status) = Command::new(compiler)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang])
            .arg(header())
            .status()
        else {
            panic!("{compiler} is not available");
        };
        assert!(status.success(), "{compiler} rejects the header");
    }
}
