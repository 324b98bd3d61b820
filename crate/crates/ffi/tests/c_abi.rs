use std::ffi::{c_char, CStr, CString};
use std::ptr;

use steenq_ffi::*;

fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { steenq_string_free(s) };
    out
}

fn parse(p: u32, text: &str) -> *mut SteenqElement {
    let t = CString::new(text).unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { steenq_element_parse(p, 1, t.as_ptr(), &mut h) }, SteenqStatus::Ok);
    h
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(steenq_last_error()) }.to_str().unwrap().to_string()
}

#[test]
fn product_round_trip() {
    let a = parse(2, "P(4,2)");
    let b = parse(2, "P(1,2)");
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { steenq_element_mul(a, b, &mut c) }, SteenqStatus::Ok);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { steenq_element_to_string(c, &mut s) }, SteenqStatus::Ok);
    assert_eq!(take(s), "P(1,3,1) + P(4,2,1)");
    let mut d = 0u64;
    assert_eq!(unsafe { steenq_element_degree(c, &mut d) }, SteenqStatus::Ok);
    assert_eq!(d, 17);
    unsafe {
        steenq_element_free(a);
        steenq_element_free(b);
        steenq_element_free(c);
    }
}

#[test]
fn filtration_and_antipode() {
    let x = parse(2, "Sq^2 Sq^2");
    let mut f = 0u64;
    assert_eq!(unsafe { steenq_element_filtration(x, &mut f) }, SteenqStatus::Ok);
    assert_eq!(f, 3);
    let zero = parse(2, "0");
    assert_eq!(unsafe { steenq_element_filtration(zero, &mut f) }, SteenqStatus::Ok);
    assert_eq!(f, STEENQ_FILTRATION_INFINITE);
    let mut d = 0u64;
    assert_eq!(unsafe { steenq_element_degree(zero, &mut d) }, SteenqStatus::InvalidArgument);

    // χ(Sq^1) = Sq^1.
    let sq1 = parse(2, "P(1)");
    let mut chi = ptr::null_mut();
    assert_eq!(unsafe { steenq_element_antipode(sq1, &mut chi) }, SteenqStatus::Ok);
    let mut s = ptr::null_mut();
    unsafe { steenq_element_to_string(chi, &mut s) };
    assert_eq!(take(s), "P(1)");
    unsafe {
        steenq_element_free(x);
        steenq_element_free(zero);
        steenq_element_free(sq1);
        steenq_element_free(chi);
    }
}

#[test]
fn error_codes() {
    let t = CString::new("P(1,").unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { steenq_element_parse(2, 1, t.as_ptr(), &mut h) }, SteenqStatus::ParseError);
    assert!(h.is_null());
    assert!(last_error().contains("position 4"), "{}", last_error());

    assert_eq!(unsafe { steenq_element_parse(4, 1, t.as_ptr(), &mut h) }, SteenqStatus::InvalidArgument);
    assert_eq!(unsafe { steenq_element_parse(2, 1, ptr::null(), &mut h) }, SteenqStatus::NullPointer);

    let a = parse(2, "P(1)");
    let b = parse(3, "P(1)");
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { steenq_element_mul(a, b, &mut c) }, SteenqStatus::InvalidArgument);
    assert_eq!(unsafe { steenq_element_mul(a, ptr::null(), &mut c) }, SteenqStatus::NullPointer);
    assert_eq!(unsafe { steenq_element_mul(a, a, ptr::null_mut()) }, SteenqStatus::NullPointer);
    unsafe {
        steenq_element_free(a);
        steenq_element_free(b);
        steenq_element_free(ptr::null_mut());
        steenq_string_free(ptr::null_mut());
    }
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { steenq_poincare(2, 1, 3, &mut s) }, SteenqStatus::Ok);
    assert!(last_error().is_empty());
    assert_eq!(take(s), "1 + 2t + 2t^2 + 2t^3 + t^4");
}

#[test]
fn rewrite_and_priddy() {
    let w = CString::new("Sq^2 Sq^2").unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { steenq_rewrite(2, 1, w.as_ptr(), &mut s) }, SteenqStatus::Ok);
    assert_eq!(take(s), "Sq^3 Sq^1");

    let mut j = ptr::null_mut();
    assert_eq!(unsafe { steenq_priddy_json(2, 1, 3, &mut j) }, SteenqStatus::Ok);
    let report = take(j);
    assert!(report.contains("\"mismatches\": []"), "{report}");
}
