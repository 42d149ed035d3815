use std::ffi::CStr;
use std::ptr;

use galorb_ffi::*;

fn last_error() -> String {
    let p = galorb_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn scalars() {
    let mut v = 0u64;
    assert_eq!(unsafe { galorb_sigma0(12, &mut v) }, GalorbStatus::Ok);
    assert_eq!(v, 6);

    let mut s = 0i32;
    assert_eq!(unsafe { galorb_hilbert_symbol(-1, -1, 2, &mut s) }, GalorbStatus::Ok);
    assert_eq!(s, -1);
    assert_eq!(unsafe { galorb_hilbert_symbol(2, 3, 4, &mut s) }, GalorbStatus::NotPrime);
    assert!(!last_error().is_empty());

    assert_eq!(unsafe { galorb_lo_closed(2, 4, &mut v) }, GalorbStatus::Ok);
    assert_eq!(v, 6);

    let mut b = 0u64;
    let mut rig = false;
    assert_eq!(unsafe { galorb_bound(256, &mut b, &mut rig) }, GalorbStatus::Ok);
    assert_eq!((b, rig), (10, true));
    assert_eq!(unsafe { galorb_bound(0, &mut b, &mut rig) }, GalorbStatus::InvalidArgument);
}

#[test]
fn null_outputs() {
    assert_eq!(unsafe { galorb_sigma0(12, ptr::null_mut()) }, GalorbStatus::NullPointer);
    assert_eq!(last_error(), "null output pointer");
    let mut v = 0u64;
    assert_eq!(unsafe { galorb_unit_group_order(ptr::null(), &mut v) }, GalorbStatus::NullPointer);
}

#[test]
fn breakdowns_agree() {
    let mut closed = GalorbLtBreakdown::default();
    let mut brute = GalorbLtBreakdown::default();
    assert_eq!(unsafe { galorb_lt_closed(5, 4, &mut closed) }, GalorbStatus::Ok);
    assert_eq!(unsafe { galorb_lt_enumerated(5, 4, 2_000_000, &mut brute) }, GalorbStatus::Ok);
    assert_eq!(closed.total, brute.total);
    assert_eq!(closed.principal_series, brute.principal_series);
    let mut lo = 0u64;
    assert_eq!(unsafe { galorb_lo_derived(5, 4, 2_000_000, &mut lo) }, GalorbStatus::Ok);
    let mut lo_c = 0u64;
    unsafe { galorb_lo_closed(5, 4, &mut lo_c) };
    assert_eq!(lo, lo_c);
}

#[test]
fn census_string() {
    let mut s: *mut std::ffi::c_char = ptr::null_mut();
    assert_eq!(unsafe { galorb_census_json(2, 3, 2_000_000, &mut s) }, GalorbStatus::Ok);
    let text = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { galorb_string_free(s) };
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["p"], 2);
    assert!(v["types"].as_array().is_some_and(|t| !t.is_empty()));
    unsafe { galorb_string_free(ptr::null_mut()) };
}

#[test]
fn unit_group_handle() {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { galorb_unit_group_new(3, -3, 4, 2_000_000, &mut g) }, GalorbStatus::Ok);
    let mut order = 0u64;
    assert_eq!(unsafe { galorb_unit_group_order(g, &mut order) }, GalorbStatus::Ok);
    assert_eq!(order, 54);

    let mut len = 0usize;
    let mut small = [0u64; 1];
    assert_eq!(
        unsafe { galorb_unit_group_invariant_factors(g, small.as_mut_ptr(), small.len(), &mut len) },
        GalorbStatus::BufferTooSmall
    );
    assert_eq!(len, 3);
    let mut buf = [0u64; 8];
    assert_eq!(unsafe { galorb_unit_group_invariant_factors(g, buf.as_mut_ptr(), buf.len(), &mut len) }, GalorbStatus::Ok);
    assert_eq!(&buf[..len], &[3, 3, 6]);

    let mut label = ptr::null();
    assert_eq!(unsafe { galorb_unit_group_field(g, &mut label) }, GalorbStatus::Ok);
    assert!(!unsafe { CStr::from_ptr(label) }.to_bytes().is_empty());
    unsafe { galorb_unit_group_free(g) };
    unsafe { galorb_unit_group_free(ptr::null_mut()) };

    assert_eq!(unsafe { galorb_unit_group_new(13, 2, 9, 1000, &mut g) }, GalorbStatus::Capacity);
    assert_eq!(unsafe { galorb_unit_group_new(4, 2, 1, 1000, &mut g) }, GalorbStatus::NotPrime);
}

#[test]
fn status_names() {
    let name = unsafe { CStr::from_ptr(galorb_status_name(GalorbStatus::Capacity)) };
    assert_eq!(name.to_str().unwrap(), "capacity exceeded");
}

#[test]
fn header_declares_entry_points() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/galorb.h")).unwrap();
    for f in ["galorb_sigma0", "galorb_unit_group_new", "galorb_census_json", "GALORB_STATUS_PANIC"] {
        assert!(h.contains(f), "{f} missing from header");
    }
}
