use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use esmin::fixtures;
use esmin_ffi::*;

fn parse(text: &str) -> *mut EsminModel {
    let src = CString::new(text).unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { esmin_model_parse(src.as_ptr(), &mut m) }, EsminStatus::Ok);
    assert!(!m.is_null());
    m
}

fn fixture(name: &str) -> *mut EsminModel {
    parse(fixtures::STRUCTURES.iter().find(|s| s.0 == name).unwrap().1)
}

fn map_text(name: &str) -> CString {
    CString::new(fixtures::MAPS.iter().find(|m| m.0 == name).unwrap().3).unwrap()
}

fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { esmin_string_free(s) };
    out
}

fn last_error() -> String {
    let p = esmin_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn parse_count_and_serialize() {
    let m = fixture("p2");
    unsafe {
        assert_eq!(esmin_model_event_count(m), 4);
        let mut n = 0;
        assert_eq!(esmin_model_config_count(m, &mut n), EsminStatus::Ok);
        assert_eq!(n, 8);
        let mut s = ptr::null_mut();
        assert_eq!(esmin_model_serialize(m, &mut s), EsminStatus::Ok);
        let text = take(s);
        assert!(text.starts_with("kind pes"));
        let mut r = ptr::null_mut();
        assert_eq!(esmin_validate(m, &mut r), EsminStatus::Ok);
        take(r);
        esmin_model_free(m);
    }
}

#[test]
fn folding_verdicts() {
    let (p0, p1, p2) = (fixture("p0"), fixture("p1"), fixture("p2"));
    unsafe {
        let mut r = ptr::null_mut();
        assert_eq!(esmin_check_folding(p0, p2, map_text("f02").as_ptr(), &mut r), EsminStatus::Ok);
        assert!(take(r).starts_with("yes"));
        assert_eq!(esmin_check_folding(p0, p1, map_text("f01").as_ptr(), &mut r), EsminStatus::No);
        assert!(take(r).contains("cannot match"));
        assert_eq!(esmin_check_folding(p0, p1, map_text("f01").as_ptr(), ptr::null_mut()), EsminStatus::No);
        for m in [p0, p1, p2] {
            esmin_model_free(m);
        }
    }
}

#[test]
fn bisim_and_minimize() {
    let (p0, p1, p7) = (fixture("p0"), fixture("p1"), fixture("p7"));
    unsafe {
        assert_eq!(esmin_bisim(p0, p1, true), EsminStatus::Ok);
        assert_eq!(esmin_bisim(p0, p7, true), EsminStatus::No);
        let class = CString::new("pes").unwrap();
        let (mut n, mut q) = (0, ptr::null_mut());
        assert_eq!(esmin_minimize(p0, class.as_ptr(), &mut n, &mut q), EsminStatus::Ok);
        assert_eq!(n, 1);
        let q = parse(&take(q));
        assert!(esmin_model_event_count(q) < esmin_model_event_count(p0));
        assert_eq!(esmin_bisim(p0, q, true), EsminStatus::Ok);
        let bogus = CString::new("bogus").unwrap();
        assert_eq!(esmin_minimize(p0, bogus.as_ptr(), &mut n, ptr::null_mut()), EsminStatus::Error);
        for m in [p0, p1, p7, q] {
            esmin_model_free(m);
        }
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut m = ptr::null_mut();
        let bad = CString::new("kind pes\nevent a a\nle a x\n").unwrap();
        assert_eq!(esmin_model_parse(bad.as_ptr(), &mut m), EsminStatus::ParseError);
        assert!(m.is_null());
        assert!(last_error().contains("line 3: undeclared event x"));
        assert_eq!(esmin_model_parse(ptr::null(), &mut m), EsminStatus::NullArgument);
        let invalid = [0xffu8, 0];
        assert_eq!(esmin_model_parse(invalid.as_ptr().cast(), &mut m), EsminStatus::InvalidUtf8);
        assert_eq!(esmin_bisim(ptr::null(), ptr::null(), true), EsminStatus::NullArgument);
        assert_eq!(esmin_model_event_count(ptr::null()), 0);
        let p0 = fixture("p0");
        assert!(esmin_last_error().is_null());
        let wrong = CString::new("map a1 nowhere\n").unwrap();
        assert_ne!(esmin_check_folding(p0, p0, wrong.as_ptr(), ptr::null_mut()), EsminStatus::Ok);
        assert!(!last_error().is_empty());
        esmin_model_free(p0);
        esmin_model_free(ptr::null_mut());
        esmin_string_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_the_api_and_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/esmin.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for f in [
        "esmin_model_parse",
        "esmin_model_free",
        "esmin_model_event_count",
        "esmin_model_config_count",
        "esmin_model_serialize",
        "esmin_validate",
        "esmin_check_folding",
        "esmin_bisim",
        "esmin_minimize",
        "esmin_string_free",
        "esmin_last_error",
        "ESMIN_STATUS_PARSE_ERROR",
        "typedef struct EsminModel EsminModel",
    ] {
        assert!(text.contains(f), "{f} missing from header");
    }
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path().join("use.c");
    std::fs::write(
        &c,
        "#include \"esmin.h\"\nint main(void) { EsminModel *m = 0; EsminStatus s = esmin_model_parse(\"kind pes\\n\", &m); esmin_model_free(m); return s == ESMIN_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    let Ok(out) = Command::new("cc").arg("-fsyntax-only").arg("-Wall").arg("-Werror").arg("-I").arg(header.parent().unwrap()).arg(&c).output() else {
        eprintln!("no C compiler; skipping compile check");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
