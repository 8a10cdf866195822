use std::ffi::{CStr, CString};
use std::ptr;

use relhom_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn fixture(name: &str) -> *mut RelhomStructure {
    let mut h = ptr::null_mut();
    let st = unsafe { relhom_structure_fixture(c(name).as_ptr(), &mut h) };
    assert_eq!(st, RelhomStatus::Ok);
    h
}

fn last_error() -> String {
    let p = relhom_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn decide_on_the_triangle_with_everything_fixed() {
    let h = fixture("tri");
    let (mut holds, mut gap) = (false, 0usize);
    let st = unsafe { relhom_decide(h, c("0,1,2").as_ptr(), &mut holds, &mut gap) };
    assert_eq!(st, RelhomStatus::Ok);
    assert!(holds);
    assert_eq!(gap, 12);
    unsafe { relhom_structure_free(h) };
}

#[test]
fn decide_json_reports_a_witness_when_it_fails() {
    let h = fixture("k2");
    let mut s = ptr::null_mut();
    let st = unsafe { relhom_decide_json(h, ptr::null(), &mut s) };
    assert_eq!(st, RelhomStatus::Ok);
    let v: serde_json::Value =
        serde_json::from_str(unsafe { CStr::from_ptr(s) }.to_str().unwrap()).unwrap();
    assert_eq!(v["holds"], false);
    assert!(v["witness"].is_string());
    unsafe {
        relhom_string_free(s);
        relhom_structure_free(h);
    }
}

#[test]
fn parse_render_roundtrip() {
    let src = "signature E/2\nuniverse a b\nrel E = (a,b) (b,a)\n";
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { relhom_structure_parse(c(src).as_ptr(), &mut h) }, RelhomStatus::Ok);
    assert_eq!(unsafe { relhom_structure_len(h) }, 2);
    let r = unsafe { relhom_structure_render(h) };
    let text = unsafe { CStr::from_ptr(r) }.to_str().unwrap().to_owned();
    let mut again = ptr::null_mut();
    assert_eq!(unsafe { relhom_structure_parse(c(&text).as_ptr(), &mut again) }, RelhomStatus::Ok);
    let mut count = 0;
    // Same structure both ways: exactly the two automorphisms map onto it.
    assert_eq!(unsafe { relhom_count_homs(h, again, 100, &mut count) }, RelhomStatus::Ok);
    assert_eq!(count, 2);
    unsafe {
        relhom_string_free(r);
        relhom_structure_free(h);
        relhom_structure_free(again);
    }
}

#[test]
fn predicates() {
    let sft3 = fixture("sft3");
    let k2 = fixture("k2");
    let c3 = fixture("c3");
    let mut b = false;
    assert_eq!(unsafe { relhom_is_dismantlable(sft3, &mut b) }, RelhomStatus::Ok);
    assert!(b);
    assert_eq!(unsafe { relhom_is_dismantlable(k2, &mut b) }, RelhomStatus::Ok);
    assert!(!b);
    assert_eq!(unsafe { relhom_is_core(c3, &mut b) }, RelhomStatus::Ok);
    assert!(b);
    assert_eq!(unsafe { relhom_is_core(sft3, &mut b) }, RelhomStatus::Ok);
    assert!(!b);
    let mut n = 0;
    assert_eq!(unsafe { relhom_count_homs(c3, c3, 10, &mut n) }, RelhomStatus::Ok);
    assert_eq!(n, 3);
    unsafe {
        relhom_structure_free(sft3);
        relhom_structure_free(k2);
        relhom_structure_free(c3);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    let mut h = ptr::null_mut();
    let st = unsafe { relhom_structure_parse(c("universe").as_ptr(), &mut h) };
    assert_eq!(st, RelhomStatus::Parse);
    assert!(h.is_null());

    let st = unsafe { relhom_structure_fixture(c("nope").as_ptr(), &mut h) };
    assert_eq!(st, RelhomStatus::UnknownFixture);
    assert!(last_error().contains("nope"));

    let tri = fixture("tri");
    let c3 = fixture("c3");
    let mut n = 0;
    assert_eq!(unsafe { relhom_count_homs(tri, c3, 10, &mut n) }, RelhomStatus::SignatureMismatch);
    assert_eq!(unsafe { relhom_count_homs(c3, c3, 1, &mut n) }, RelhomStatus::CapExceeded);
    assert!(last_error().contains("cap"));

    let (mut holds, mut gap) = (false, 0);
    let st = unsafe { relhom_decide(tri, c("zz").as_ptr(), &mut holds, &mut gap) };
    assert_eq!(st, RelhomStatus::NotInUniverse);
    assert_eq!(unsafe { relhom_decide(ptr::null(), ptr::null(), &mut holds, &mut gap) }, RelhomStatus::NullPointer);
    assert_eq!(unsafe { relhom_decide(tri, ptr::null(), ptr::null_mut(), &mut gap) }, RelhomStatus::NullPointer);
    unsafe {
        relhom_structure_free(tri);
        relhom_structure_free(c3);
        relhom_structure_free(ptr::null_mut());
        relhom_string_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/relhom.h");
    for f in [
        "relhom_structure_parse",
        "relhom_structure_fixture",
        "relhom_structure_free",
        "relhom_structure_len",
        "relhom_structure_render",
        "relhom_is_dismantlable",
        "relhom_decide",
        "relhom_decide_json",
        "relhom_is_core",
        "relhom_count_homs",
        "relhom_last_error",
        "relhom_string_free",
    ] {
        assert!(header.contains(&format!("{f}(")), "{f}");
    }
    assert!(header.contains("typedef struct RelhomStructure RelhomStructure;"));
}
