use std::ffi::{CStr, CString};
use std::ptr;

use sio_channel_ffi::*;

fn config(n_reps: usize, suites: &str) -> CString {
    let base = include_str!("../../core/configs/gaussian.toml");
    let text = base
        .replace("n_reps = 100000", &format!("n_reps = {n_reps}\nsuites = [{suites}]"));
    CString::new(text).unwrap()
}

fn last_error() -> String {
    let p = sio_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn experiment(text: &CString) -> *mut SioExperiment {
    let mut exp = ptr::null_mut();
    assert_eq!(unsafe { sio_experiment_from_toml(text.as_ptr(), &mut exp) }, SioStatus::Ok);
    assert!(!exp.is_null());
    exp
}

#[test]
fn verify_and_render() {
    let exp = experiment(&config(1000, "\"sio-isometry\""));
    assert_eq!(unsafe { sio_experiment_n_reps(exp) }, 1000);
    let mut report = ptr::null_mut();
    let suite = CString::new("all").unwrap();
    let status = unsafe { sio_verify(exp, suite.as_ptr(), 2, &mut report) };
    assert_eq!(status, SioStatus::Ok, "{}", last_error());
    let (mut total, mut passed, mut failed) = (0usize, 0usize, 0usize);
    assert_eq!(unsafe { sio_report_summary(report, &mut total, &mut passed, &mut failed) }, SioStatus::Ok);
    assert_eq!((total, passed, failed), (12, 12, 0));

    let mut csv = ptr::null_mut();
    assert_eq!(unsafe { sio_report_render(report, SioFormat::Csv, &mut csv) }, SioStatus::Ok);
    let text = unsafe { CStr::from_ptr(csv) }.to_str().unwrap().to_owned();
    assert!(text.starts_with("suite,check,anchor,statistic,target,tolerance,se,n_reps,pass\n"));
    assert_eq!(text.lines().count(), 13);

    // The same run through one worker renders identically.
    let mut again = ptr::null_mut();
    assert_eq!(unsafe { sio_verify(exp, suite.as_ptr(), 1, &mut again) }, SioStatus::Ok);
    let mut csv1 = ptr::null_mut();
    assert_eq!(unsafe { sio_report_render(again, SioFormat::Csv, &mut csv1) }, SioStatus::Ok);
    assert_eq!(unsafe { CStr::from_ptr(csv1) }.to_str().unwrap(), text);

    unsafe {
        sio_string_free(csv);
        sio_string_free(csv1);
        sio_report_free(report);
        sio_report_free(again);
        sio_experiment_free(exp);
    }
}

#[test]
fn errors_carry_status_and_message() {
    let mut exp = ptr::null_mut();
    let bad = CString::new("master_seed = 1\nbogus = 2\n").unwrap();
    assert_eq!(unsafe { sio_experiment_from_toml(bad.as_ptr(), &mut exp) }, SioStatus::Usage);
    assert!(exp.is_null());
    assert!(!last_error().is_empty());

    assert_eq!(unsafe { sio_experiment_from_toml(ptr::null(), &mut exp) }, SioStatus::NullArgument);
    let invalid = [0xffu8, 0];
    assert_eq!(
        unsafe { sio_experiment_from_toml(invalid.as_ptr().cast(), &mut exp) },
        SioStatus::InvalidUtf8
    );
    let missing = CString::new("/nonexistent/config.toml").unwrap();
    assert_eq!(unsafe { sio_experiment_load(missing.as_ptr(), &mut exp) }, SioStatus::Usage);

    let exp = experiment(&config(1000, ""));
    let mut report = ptr::null_mut();
    let nope = CString::new("no-such-suite").unwrap();
    assert_eq!(unsafe { sio_verify(exp, nope.as_ptr(), 1, &mut report) }, SioStatus::Usage);
    assert!(report.is_null());
    assert!(last_error().contains("no-such-suite"));
    unsafe { sio_experiment_free(exp) };

    // Statistical suites refuse to run on a header-only experiment.
    let empty = experiment(&config(0, ""));
    let weak = CString::new("weak-us").unwrap();
    assert_eq!(unsafe { sio_verify(empty, weak.as_ptr(), 1, &mut report) }, SioStatus::Usage);
    unsafe {
        sio_experiment_free(empty);
        sio_experiment_free(ptr::null_mut());
        sio_report_free(ptr::null_mut());
        sio_string_free(ptr::null_mut());
    }
}

#[test]
fn header_only_archive() {
    let exp = experiment(&config(0, ""));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.jsonl");
    let c_path = CString::new(path.to_str().unwrap()).unwrap();
    assert_eq!(unsafe { sio_simulate(exp, c_path.as_ptr(), 1) }, SioStatus::Ok);
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.contains("\"kind\":\"header\""));
    unsafe { sio_experiment_free(exp) };
}

#[test]
fn version_matches_the_crate() {
    let v = unsafe { CStr::from_ptr(sio_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
