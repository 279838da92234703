use std::ffi::CStr;
use std::ptr;

use symsep_ffi::*;

fn last_error() -> String {
    let p = symsep_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn breuer_threshold_and_criteria() {
    unsafe {
        let mut t = 0.0;
        assert_eq!(symsep_ppt_threshold(SymsepFamily::Breuer, 4, 0, 0.0, 1.0, &mut t), SymsepStatus::Ok);
        assert!((t - 1.0 / 6.0).abs() < 1e-8);

        let mut rho = ptr::null_mut();
        assert_eq!(symsep_breuer(4, 0.5, &mut rho), SymsepStatus::Ok);
        assert_eq!(symsep_density_side(rho), 16);
        let (mut margin, mut sat) = (0.0, -1);
        assert_eq!(symsep_criterion(rho, SymsepCriterion::Ppt, 1e-10, &mut margin, &mut sat), SymsepStatus::Ok);
        assert!(margin < 0.0);
        assert_eq!(sat, 0);
        let mut pt = 0.0;
        assert_eq!(symsep_ppt_margin(rho, [1usize].as_ptr(), 1, &mut pt), SymsepStatus::Ok);
        assert!((pt - margin).abs() < 1e-12, "transposing either side gives the same spectrum");
        symsep_density_free(rho);
    }
}

#[test]
fn density_round_trip_and_errors() {
    unsafe {
        let re = [0.5, 0.0, 0.0, 0.5];
        let mut rho = ptr::null_mut();
        assert_eq!(symsep_density_new(re.as_ptr(), ptr::null(), [2usize].as_ptr(), 1, &mut rho), SymsepStatus::Ok);
        let (mut r, mut i) = ([9.0; 4], [9.0; 4]);
        assert_eq!(symsep_density_matrix(rho, r.as_mut_ptr(), i.as_mut_ptr(), 4), SymsepStatus::Ok);
        assert_eq!(r, re);
        assert_eq!(i, [0.0; 4]);
        assert_eq!(symsep_density_matrix(rho, r.as_mut_ptr(), ptr::null_mut(), 3), SymsepStatus::BufferTooSmall);
        let mut m = 0.0;
        assert_eq!(symsep_criterion(rho, SymsepCriterion::Ccnr, 1e-10, &mut m, ptr::null_mut()), SymsepStatus::InvalidArgument);
        symsep_density_free(rho);

        let bad = [0.7, 0.0, 0.0, 0.7];
        let mut rho = ptr::null_mut();
        let s = symsep_density_new(bad.as_ptr(), ptr::null(), [2usize].as_ptr(), 1, &mut rho);
        assert_eq!(s, SymsepStatus::NotAState);
        assert!(rho.is_null());
        assert!(last_error().contains("trace"));
        assert_eq!(symsep_breuer(4, 0.1, ptr::null_mut()), SymsepStatus::NullPointer);
        assert_eq!(symsep_breuer(5, 0.1, &mut rho), SymsepStatus::InvalidArgument);
        symsep_density_free(ptr::null_mut());
    }
}

#[test]
fn symmetric_states_and_extensions() {
    unsafe {
        let mut be4 = ptr::null_mut();
        assert_eq!(symsep_bound_entangled(4, &mut be4), SymsepStatus::Ok);
        assert_eq!(symsep_symmetric_qubits(be4), 4);
        let (mut bal, mut l) = (0.0, 0.0);
        assert_eq!(symsep_split_pt_min(be4, 2, 2, &mut bal), SymsepStatus::Ok);
        assert_eq!(symsep_lambda_min(be4, 1, &mut l), SymsepStatus::Ok);
        assert!(bal > 0.0 && l < -1e-4);

        let mut bip = ptr::null_mut();
        assert_eq!(symsep_to_bipartite(be4, 2, 2, &mut bip), SymsepStatus::Ok);
        assert_eq!(symsep_density_side(bip), 9);
        let mut m = 0.0;
        assert_eq!(symsep_criterion(bip, SymsepCriterion::EtaPsd, 1e-10, &mut m, ptr::null_mut()), SymsepStatus::Ok);
        assert!(m >= -1e-10);
        symsep_density_free(bip);

        let (mut status, mut gap, mut w) = (SymsepExtensionStatus::Feasible, 0.0, ptr::null_mut());
        assert_eq!(symsep_find_extension(be4, 5, 500, 0.0, &mut status, &mut gap, &mut w), SymsepStatus::Ok);
        assert_ne!(status, SymsepExtensionStatus::Feasible);
        assert!(w.is_null() && gap > 1e-3);
        symsep_symmetric_free(be4);

        // |0><0| on two qubits extends to |0...0>
        let mut re = [0.0; 9];
        re[0] = 1.0;
        let mut zeros = ptr::null_mut();
        assert_eq!(symsep_symmetric_new(re.as_ptr(), ptr::null(), 2, &mut zeros), SymsepStatus::Ok);
        assert_eq!(symsep_find_extension(zeros, 4, 0, 0.0, &mut status, &mut gap, &mut w), SymsepStatus::Ok);
        assert_eq!(status, SymsepExtensionStatus::Feasible);
        assert_eq!(symsep_symmetric_qubits(w), 4);
        let mut ok = 0;
        assert_eq!(symsep_verify_extension(w, zeros, 1e-7, &mut ok), SymsepStatus::Ok);
        assert_eq!(ok, 1);
        let mut buf = [0.0; 25];
        assert_eq!(symsep_symmetric_matrix(w, buf.as_mut_ptr(), ptr::null_mut(), 25), SymsepStatus::Ok);
        assert!((buf[0] - 1.0).abs() < 1e-6);
        symsep_symmetric_free(w);
        symsep_symmetric_free(zeros);

        assert_eq!(symsep_bound_entangled(3, &mut zeros), SymsepStatus::InvalidArgument);
    }
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(symsep_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
