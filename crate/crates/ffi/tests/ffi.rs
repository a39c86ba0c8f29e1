use std::ffi::CStr;
use std::ptr;

use qfimlab_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(qfimlab_last_error()) }.to_string_lossy().into_owned()
}

fn toy() -> *mut QfimlabCircuit {
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { qfimlab_circuit_toy(&mut c) }, QfimlabStatus::Ok);
    c
}

fn rank(c: *const QfimlabCircuit, theta: &[f64]) -> usize {
    let mut r = ptr::null_mut();
    unsafe {
        assert_eq!(qfimlab_qfim(c, theta.as_ptr(), theta.len(), 0.0, 0.0, &mut r), QfimlabStatus::Ok);
        let k = qfimlab_report_rank(r);
        qfimlab_report_free(r);
        k
    }
}

#[test]
fn toy_ranks_through_the_c_interface() {
    let c = toy();
    let half = std::f64::consts::FRAC_PI_2;
    unsafe {
        assert_eq!(qfimlab_circuit_num_params(c), 4);
        assert_eq!(qfimlab_circuit_num_qubits(c), 1);
        assert_eq!(rank(c, &[half, half, half, half]), 2);
        assert_eq!(qfimlab_circuit_set_noise(c, QfimlabNoise::GlobalDepol, 0.1), QfimlabStatus::Ok);
        assert_eq!(rank(c, &[half, half, half, half]), 2);
        qfimlab_circuit_free(c);
    }
}

#[test]
fn report_buffers_are_checked() {
    let c = toy();
    let theta = [0.3, 1.1, 0.7, 2.0];
    unsafe {
        let mut r = ptr::null_mut();
        assert_eq!(qfimlab_qfim(c, theta.as_ptr(), 4, 0.0, 0.0, &mut r), QfimlabStatus::Ok);
        assert_eq!(qfimlab_report_dim(r), 4);
        let mut small = [0.0; 3];
        assert_eq!(qfimlab_report_eigenvalues(r, small.as_mut_ptr(), 3), QfimlabStatus::BufferTooSmall);
        assert!(last_error().contains("need 4"));
        let mut eig = [0.0; 4];
        assert_eq!(qfimlab_report_eigenvalues(r, eig.as_mut_ptr(), 4), QfimlabStatus::Ok);
        assert!(eig.windows(2).all(|w| w[0] >= w[1]));
        let mut m = [0.0; 16];
        assert_eq!(qfimlab_report_matrix(r, m.as_mut_ptr(), 16), QfimlabStatus::Ok);
        let trace: f64 = (0..4).map(|i| m[5 * i]).sum();
        assert!((trace - eig.iter().sum::<f64>()).abs() < 1e-10);
        qfimlab_report_free(r);
        qfimlab_circuit_free(c);
    }
}

#[test]
fn errors_map_to_status_codes() {
    let c = toy();
    unsafe {
        let mut r = ptr::null_mut();
        let theta = [0.1; 3];
        assert_eq!(qfimlab_qfim(c, theta.as_ptr(), 3, 0.0, 0.0, &mut r), QfimlabStatus::DimensionMismatch);
        assert!(r.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(qfimlab_qfim(ptr::null(), theta.as_ptr(), 3, 0.0, 0.0, &mut r), QfimlabStatus::NullPointer);
        assert_eq!(qfimlab_circuit_set_noise(c, QfimlabNoise::BitFlip, 1.5), QfimlabStatus::InvalidArgument);
        assert_eq!(qfimlab_circuit_toy(ptr::null_mut()), QfimlabStatus::NullPointer);
        let msg = CStr::from_ptr(qfimlab_status_message(QfimlabStatus::BufferTooSmall));
        assert_eq!(msg.to_str().unwrap(), "output buffer too small");
        qfimlab_circuit_free(c);
        qfimlab_circuit_free(ptr::null_mut());
        qfimlab_report_free(ptr::null_mut());
    }
}

#[test]
fn algebra_dimensions() {
    unsafe {
        let c = toy();
        let mut d = 0;
        assert_eq!(qfimlab_dla_dimension(c, false, &mut d), QfimlabStatus::Ok);
        assert_eq!(d, 3);
        assert_eq!(qfimlab_dla_dimension(c, true, &mut d), QfimlabStatus::InvalidArgument);
        qfimlab_circuit_free(c);

        let mut h = ptr::null_mut();
        assert_eq!(qfimlab_circuit_hva_tfim(4, 1, &mut h), QfimlabStatus::Ok);
        assert_eq!(qfimlab_dla_dimension(h, true, &mut d), QfimlabStatus::Ok);
        assert_eq!(d, 6);
        let theta = [0.4; 2];
        assert_eq!(qfimlab_circuit_num_params(h), 2);
        let mut r = ptr::null_mut();
        assert_eq!(qfimlab_qfim(h, theta.as_ptr(), 2, 0.0, 0.0, &mut r), QfimlabStatus::Ok);
        qfimlab_report_free(r);
        qfimlab_circuit_free(h);
    }
}

#[test]
fn header_declares_the_interface() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/qfimlab.h")).unwrap();
    for name in ["qfimlab_circuit_toy", "qfimlab_qfim", "qfimlab_report_matrix", "qfimlab_last_error", "QFIMLAB_STATUS_PANIC", "typedef struct QfimlabCircuit"] {
        assert!(header.contains(name), "{name}");
    }
}
