use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use circrev_ffi::*;

const SAW: &str = r#"{"degree": 1, "vertices": [["0", "0"], ["1/2", "1/4"]]}"#;
const ROT_QUARTER: &str = r#"{"degree": 1, "vertices": [["0", "1/4"]]}"#;

fn parse(json: &str) -> *mut CrMap {
    let c = CString::new(json).unwrap();
    let mut m = ptr::null_mut();
    let s = unsafe { cr_map_from_json(c.as_ptr(), &mut m) };
    assert_eq!(s, CrStatus::Ok, "{}", last_error());
    assert!(!m.is_null());
    m
}

fn take(s: *mut std::ffi::c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { cr_string_free(s) };
    out
}

fn last_error() -> String {
    let p = cr_last_error();
    if p.is_null() {
        String::new()
    } else {
        unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
    }
}

#[test]
fn analyze_and_decide() {
    let m = parse(SAW);
    assert_eq!(unsafe { cr_map_degree(m) }, 1);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { cr_analyze(m, 0, 0, &mut out) }, CrStatus::Ok);
    let a: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(a["result"]["signature"]["text"], "(•)−");
    assert_eq!(a["command"], "analyze");

    assert_eq!(unsafe { cr_decide(m, CrGroup::H, 0, 0, &mut out) }, CrStatus::Ok);
    let d: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(d["result"]["exit_code"], 0);
    unsafe { cr_map_free(m) };

    let r = parse(ROT_QUARTER);
    assert_eq!(unsafe { cr_decide(r, CrGroup::Hplus, 0, 0, &mut out) }, CrStatus::No);
    take(out);
    unsafe { cr_map_free(r) };
}

#[test]
fn factor_then_verify() {
    let m = parse(SAW);
    let (mut rep, mut arc) = (ptr::null_mut(), ptr::null_mut());
    let s = unsafe { cr_factor(m, 2, CrGroup::H, 64, 7, &mut rep, &mut arc) };
    assert_eq!(s, CrStatus::Ok, "{}", last_error());
    let report: serde_json::Value = serde_json::from_str(&take(rep)).unwrap();
    assert_eq!(report["result"]["route"], "two_i_reversing");
    let archive = CString::new(take(arc)).unwrap();

    let mut out = ptr::null_mut();
    assert_eq!(unsafe { cr_verify(archive.as_ptr(), m, &mut out) }, CrStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(v["result"]["all_pass"], true);

    // checked against a different map the archive must fail
    let other = parse(r#"{"degree": 1, "vertices": [["0", "0"], ["1/2", "1/3"]]}"#);
    assert_eq!(unsafe { cr_verify(archive.as_ptr(), other, &mut out) }, CrStatus::No);
    take(out);
    unsafe {
        cr_map_free(other);
        cr_map_free(m);
    }
}

#[test]
fn refusals_and_errors() {
    let r = parse(ROT_QUARTER);
    let (mut rep, mut arc) = (ptr::null_mut(), ptr::null_mut());
    let s = unsafe { cr_factor(r, 2, CrGroup::Hplus, 64, 0, &mut rep, &mut arc) };
    assert_eq!(s, CrStatus::No);
    assert!(arc.is_null());
    let v: serde_json::Value = serde_json::from_str(&take(rep)).unwrap();
    assert!(v["result"]["refusal"].is_string());
    let s = unsafe { cr_factor(r, 4, CrGroup::H, 64, 0, &mut rep, &mut arc) };
    assert_eq!(s, CrStatus::InvalidArgument);
    unsafe { cr_map_free(r) };

    let mut m = ptr::null_mut();
    let bad = CString::new("{\"degree\": 1, \"vertices\": [").unwrap();
    assert_eq!(unsafe { cr_map_from_json(bad.as_ptr(), &mut m) }, CrStatus::Parse);
    assert!(m.is_null());
    assert!(!last_error().is_empty());
    let nonmono =
        CString::new(r#"{"degree": 1, "vertices": [["0", "0"], ["1/3", "1/2"], ["2/3", "1/4"]]}"#)
            .unwrap();
    assert_eq!(unsafe { cr_map_from_json(nonmono.as_ptr(), &mut m) }, CrStatus::InvalidMap);
    assert!(last_error().contains("vertices"));
    assert_eq!(unsafe { cr_map_from_json(ptr::null(), &mut m) }, CrStatus::InvalidArgument);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { cr_analyze(ptr::null(), 0, 0, &mut out) }, CrStatus::InvalidArgument);
    unsafe {
        cr_map_free(ptr::null_mut());
        cr_string_free(ptr::null_mut());
    }
}

#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/circrev.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["cr_map_from_json", "cr_factor", "cr_verify", "cr_last_error", "CR_STATUS_UNKNOWN"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let Ok(status) = Command::new("cc")
        .args(["-fsyntax-only", "-x", "c", "-std=c99", "-Wall", "-Werror"])
        .arg(&header)
        .status()
    else {
        eprintln!("no C compiler; skipped syntax check");
        return;
    };
    assert!(status.success());
}
