use std::ffi::{CStr, CString};
use std::ptr;

use lrpe::attention::{lrpe_linear_attention, AttentionInput};
use lrpe::numerics::random_mat;
use lrpe::{EncodingSpec, Rng};
use lrpe_ffi::*;

fn new_handle(spec: &str) -> *mut LrpeTransform {
    let s = CString::new(spec).unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { lrpe_transform_new(s.as_ptr(), &mut h) }, LrpeStatus::Ok);
    assert!(!h.is_null());
    h
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(lrpe_last_error_message()) }.to_string_lossy().into_owned()
}

#[test]
fn bad_spec_reports_code_and_message() {
    let s = CString::new("orthogonal:fourier:a:16").unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { lrpe_transform_new(s.as_ptr(), &mut h) }, LrpeStatus::InvalidSpec);
    assert!(h.is_null());
    assert!(last_error().contains("fourier"));
    assert_eq!(unsafe { lrpe_transform_new(ptr::null(), &mut h) }, LrpeStatus::NullPointer);
}

#[test]
fn handle_metadata() {
    let h = new_handle("unitary:householder:a:6:seed=3");
    unsafe {
        assert_eq!(lrpe_transform_dim(h), 6);
        assert!(lrpe_transform_is_complex(h));
        let mut buf = [0 as std::ffi::c_char; 64];
        let len = lrpe_transform_spec(h, buf.as_mut_ptr(), buf.len());
        let text = CStr::from_ptr(buf.as_ptr()).to_str().unwrap();
        assert_eq!(text.len(), len);
        assert_eq!(text, "unitary:householder:a:6:seed=3");
        lrpe_transform_free(h);
        assert_eq!(lrpe_transform_dim(ptr::null()), 0);
        lrpe_transform_free(ptr::null_mut());
    }
}

#[test]
fn materialize_matches_library() {
    let spec = "unitary:fourier:a:4:seed=1";
    let t = spec.parse::<EncodingSpec>().unwrap().build().unwrap();
    let h = new_handle(spec);
    let (mut re, mut im) = (vec![0.0; 16], vec![0.0; 16]);
    unsafe {
        assert_eq!(lrpe_materialize(h, 5, re.as_mut_ptr(), im.as_mut_ptr()), LrpeStatus::Ok);
        let w = t.materialize(5).unwrap();
        assert_eq!(re, w.re());
        assert_eq!(im, w.im().unwrap());
        assert_eq!(lrpe_materialize(h, 5, re.as_mut_ptr(), ptr::null_mut()), LrpeStatus::NullPointer);
        assert_eq!(lrpe_relative_matrix(h, 3, -1, re.as_mut_ptr(), im.as_mut_ptr()), LrpeStatus::NegativePosition);
        assert_eq!(lrpe_relative_matrix(h, -3, 2, re.as_mut_ptr(), im.as_mut_ptr()), LrpeStatus::Ok);
        lrpe_transform_free(h);
    }
}

#[test]
fn real_family_zero_fills_imaginary() {
    let h = new_handle("orthogonal:householder:a:4");
    let x: Vec<f64> = (0..12).map(|i| i as f64 * 0.1).collect();
    let (mut re, mut im) = (vec![0.0; 12], vec![9.0; 12]);
    unsafe {
        assert_eq!(lrpe_encode(h, x.as_ptr(), 3, 4, re.as_mut_ptr(), im.as_mut_ptr()), LrpeStatus::Ok);
        assert!(im.iter().all(|&v| v == 0.0));
        assert_eq!(lrpe_encode(h, x.as_ptr(), 3, 4, re.as_mut_ptr(), ptr::null_mut()), LrpeStatus::Ok);
        assert_eq!(lrpe_encode(h, x.as_ptr(), 4, 3, re.as_mut_ptr(), ptr::null_mut()), LrpeStatus::DimensionMismatch);
        lrpe_transform_free(h);
    }
}

#[test]
fn attention_matches_library() {
    let spec = "mixed:odd_even:a:6:seed=2";
    let t = spec.parse::<EncodingSpec>().unwrap().build().unwrap();
    let mut rng = Rng::new(4);
    let (n, d, dv) = (10, 6, 3);
    let q = random_mat(&mut rng, n, d);
    let k = random_mat(&mut rng, n, d);
    let v = random_mat(&mut rng, n, dv);
    let h = new_handle(spec);
    for causal in [false, true] {
        let expected =
            lrpe_linear_attention(&AttentionInput::new(&q, &k, &v).causal(causal).with_encoding(&t)).unwrap();
        let mut out = vec![0.0; n * dv];
        let status = unsafe {
            lrpe_ffi::lrpe_linear_attention(
                h,
                q.re().as_ptr(),
                k.re().as_ptr(),
                v.re().as_ptr(),
                n,
                d,
                dv,
                causal,
                out.as_mut_ptr(),
            )
        };
        assert_eq!(status, LrpeStatus::Ok);
        assert_eq!(out, expected.o.re());
    }
    let mut out = vec![0.0; n * dv];
    let status = unsafe {
        lrpe_vanilla_attention(q.re().as_ptr(), k.re().as_ptr(), v.re().as_ptr(), n, d, dv, true, out.as_mut_ptr())
    };
    assert_eq!(status, LrpeStatus::Ok);
    // Causal softmax: the first row attends only to itself.
    assert_eq!(&out[..dv], &v.re()[..dv]);
    unsafe { lrpe_transform_free(h) };
}

#[test]
fn version_is_crate_version() {
    let v = unsafe { CStr::from_ptr(lrpe_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
