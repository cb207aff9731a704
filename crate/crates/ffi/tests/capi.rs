use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use ontokit_ffi::*;

fn last_error() -> String {
    let p = ontokit_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn spekkens_round_trip_and_verify() {
    unsafe {
        let mut model = ptr::null_mut();
        assert_eq!(ontokit_model_spekkens(&mut model), OntokitStatus::Ok);
        let mut json = ptr::null_mut();
        assert_eq!(ontokit_model_to_json(model, &mut json), OntokitStatus::Ok);
        let mut parsed = ptr::null_mut();
        assert_eq!(ontokit_model_from_json(json, &mut parsed), OntokitStatus::Ok);
        ontokit_string_free(json);

        let mut report = ptr::null_mut();
        assert_eq!(ontokit_verify_reproduces(parsed, 1e-10, &mut report), OntokitStatus::Ok);
        let mut verified = false;
        let mut residual = f64::NAN;
        assert_eq!(ontokit_report_verified(report, &mut verified), OntokitStatus::Ok);
        assert_eq!(ontokit_report_max_residual(report, &mut residual), OntokitStatus::Ok);
        assert!(verified);
        assert_eq!(residual, 0.0);
        let mut rjson = ptr::null_mut();
        assert_eq!(ontokit_report_to_json(report, &mut rjson), OntokitStatus::Ok);
        let text = CStr::from_ptr(rjson).to_str().unwrap();
        assert!(text.contains("\"verified\":true"));
        ontokit_string_free(rjson);

        ontokit_report_free(report);
        ontokit_model_free(parsed);
        ontokit_model_free(model);
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let mut model = ptr::null_mut();
        let bad = CString::new("{not json").unwrap();
        assert_eq!(ontokit_model_from_json(bad.as_ptr(), &mut model), OntokitStatus::Parse);
        assert!(model.is_null());
        assert!(!last_error().is_empty());

        assert_eq!(ontokit_model_spekkens(ptr::null_mut()), OntokitStatus::NullPointer);
        assert_eq!(ontokit_verify_reproduces(ptr::null(), 1e-10, &mut ptr::null_mut()), OntokitStatus::NullPointer);
        assert!(last_error().contains("model"));

        let mut value = 0.0;
        let mut bound = 0.0;
        assert_eq!(ontokit_chained_closed_form(0, &mut value, &mut bound), OntokitStatus::InvalidArgument);

        let a = [1.0, 0.0, 0.0, 0.0];
        let b = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let mut out = 0.0;
        assert_eq!(ontokit_pure_overlap(a.as_ptr(), b.as_ptr(), 0, &mut out), OntokitStatus::Dimension);
        assert_eq!(ontokit_pure_overlap(b.as_ptr(), b.as_ptr(), 2, &mut out), OntokitStatus::Ok);
        let c = [2.0, 0.0, 0.0, 0.0];
        assert_ne!(ontokit_pure_overlap(c.as_ptr(), a.as_ptr(), 2, &mut out), OntokitStatus::Ok);
        ontokit_model_free(ptr::null_mut());
        ontokit_string_free(ptr::null_mut());
    }
}

#[test]
fn numeric_entry_points() {
    unsafe {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let zero = [1.0, 0.0, 0.0, 0.0];
        let plus = [s, 0.0, s, 0.0];
        let mut x = 0.0;
        assert_eq!(ontokit_pure_overlap(zero.as_ptr(), plus.as_ptr(), 2, &mut x), OntokitStatus::Ok);
        assert!((x - 0.5).abs() <= 1e-15);

        let (mut value, mut bound) = (0.0, 0.0);
        assert_eq!(ontokit_chained_closed_form(4, &mut value, &mut bound), OntokitStatus::Ok);
        assert!((value - 0.304_481_869_954_852_94).abs() <= 1e-15);
        assert!((bound - std::f64::consts::PI.powi(2) / 32.0).abs() <= 1e-15);

        let psi = [1.0, 0.0, 0.0];
        let phi = [0.0, 1.0, 0.0];
        assert_eq!(ontokit_ks_born_quadrature(psi.as_ptr(), phi.as_ptr(), &mut x), OntokitStatus::Ok);
        assert!((x - 0.5).abs() <= 1e-10);
        let version = CStr::from_ptr(ontokit_version()).to_str().unwrap();
        assert_eq!(version, env!("CARGO_PKG_VERSION"));
    }
}

const EXPORTS: &[&str] = &[
    "ontokit_last_error",
    "ontokit_version",
    "ontokit_model_spekkens",
    "ontokit_model_from_json",
    "ontokit_model_to_json",
    "ontokit_model_free",
    "ontokit_string_free",
    "ontokit_verify_reproduces",
    "ontokit_report_verified",
    "ontokit_report_max_residual",
    "ontokit_report_to_json",
    "ontokit_report_free",
    "ontokit_pure_overlap",
    "ontokit_chained_closed_form",
    "ontokit_ks_born_quadrature",
];

fn header() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include").join("ontokit.h")
}

#[test]
fn header_declares_every_export() {
    let text = std::fs::read_to_string(header()).unwrap();
    for name in EXPORTS {
        assert!(text.contains(&format!("{name}(")), "{name} missing from header");
    }
    assert!(text.contains("typedef struct OntokitModel OntokitModel;"));
    assert!(text.contains("ONTOKIT_STATUS_PANIC = 5"));
}

#[test]
fn header_compiles_as_c_and_cpp() {
    for (compiler, lang) in [("cc", "c"), ("c++", "c++")] {
        let Ok(status) = Command::new(compiler).args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang]).arg(header()).status() else {
            eprintln!("{compiler} not found; header syntax check skipped");
            continue;
        };
        assert!(status.success(), "{compiler} rejected the header");
    }
}
