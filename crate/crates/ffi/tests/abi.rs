use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use crisis_sim_ffi::*;

fn scenario_file(name: &str) -> CString {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name);
    CString::new(p.to_str().unwrap()).unwrap()
}

fn last_error() -> String {
    let p = cs_last_error();
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { cs_string_free(p) };
    s
}

struct Handles {
    params: *mut CsParams,
    scenario: *mut CsScenario,
}

impl Handles {
    fn new(file: &str) -> Self {
        let mut params = ptr::null_mut();
        let mut scenario = ptr::null_mut();
        unsafe {
            assert_eq!(cs_params_reference(&mut params), CsStatus::Ok);
            assert_eq!(cs_scenario_load(scenario_file(file).as_ptr(), &mut scenario), CsStatus::Ok);
        }
        Handles { params, scenario }
    }

    fn run(&self, seed: u64, paths: u64, horizon: u32, threads: usize) -> *mut CsEnsemble {
        let mut e = ptr::null_mut();
        let st = unsafe { cs_ensemble_run(self.params, self.scenario, seed, paths, horizon, threads, &mut e) };
        assert_eq!(st, CsStatus::Ok);
        e
    }
}

impl Drop for Handles {
    fn drop(&mut self) {
        unsafe {
            cs_params_free(self.params);
            cs_scenario_free(self.scenario);
        }
    }
}

fn series(e: *const CsEnsemble, var: &str, level: usize) -> Vec<f64> {
    let name = CString::new(var).unwrap();
    let mut n = 0;
    let st = unsafe { cs_ensemble_series(e, name.as_ptr(), level, ptr::null_mut(), 0, &mut n) };
    assert_eq!(st, CsStatus::BufferTooSmall);
    let mut buf = vec![0.0; n];
    let st = unsafe { cs_ensemble_series(e, name.as_ptr(), level, buf.as_mut_ptr(), buf.len(), &mut n) };
    assert_eq!(st, CsStatus::Ok);
    buf
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(cs_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn ensemble_round_trip_matches_the_library() {
    let h = Handles::new("Shock-6+Deval.cfg");
    let e = h.run(42, 40, 16, 2);
    let mut summary = CsSummary::default();
    assert_eq!(unsafe { cs_ensemble_summary(e, &mut summary) }, CsStatus::Ok);
    assert_eq!(summary.n_paths + summary.n_aborted, 40);

    let sc = crisis_sim::Scenario::from_file(scenario_file("Shock-6+Deval.cfg").to_str().unwrap()).unwrap();
    let paths = crisis_sim::run_ensemble(&sc, &crisis_sim::Params::reference(), 42, 40, 16).unwrap();
    let stats = crisis_sim::report::EnsembleStats::from_paths(&paths, &crisis_sim::report::DEFAULT_QUANTILES).unwrap();
    assert_eq!(summary.debt_med, stats.summary.debt_med);
    assert_eq!(summary.welfare_med, stats.summary.welfare_med);

    let mut levels = 0;
    assert_eq!(unsafe { cs_ensemble_level_count(e, &mut levels) }, CsStatus::Ok);
    assert_eq!(levels, 5);
    let median = series(e, "debt", 2);
    assert_eq!(median.len(), 17);
    let expected: Vec<f64> = stats.series("debt").unwrap().values.iter().map(|r| r[2]).collect();
    assert_eq!(median, expected);
    unsafe { cs_ensemble_free(e) };
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let h = Handles::new("Crawl15%+CFM8q.cfg");
    let a = h.run(9, 30, 12, 1);
    let b = h.run(9, 30, 12, 3);
    assert_eq!(series(a, "reserves", 0), series(b, "reserves", 0));
    unsafe {
        cs_ensemble_free(a);
        cs_ensemble_free(b);
    }
}

#[test]
fn errors_are_codes_with_messages() {
    let mut params = ptr::null_mut();
    let missing = CString::new("/nonexistent/params.cfg").unwrap();
    assert_eq!(unsafe { cs_params_load(missing.as_ptr(), &mut params) }, CsStatus::Io);
    assert!(params.is_null());
    assert!(last_error().contains("nonexistent"));

    assert_eq!(unsafe { cs_params_reference(ptr::null_mut()) }, CsStatus::NullPointer);
    assert_eq!(unsafe { cs_scenario_baseline(ptr::null(), &mut ptr::null_mut()) }, CsStatus::NullPointer);

    let bad = [0xffu8, 0xfe, 0];
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { cs_scenario_baseline(bad.as_ptr().cast(), &mut s) }, CsStatus::InvalidString);

    let h = Handles::new("baseline.cfg");
    let mut e = ptr::null_mut();
    let st = unsafe { cs_ensemble_run(h.params, h.scenario, 0, 0, 8, 1, &mut e) };
    assert_eq!(st, CsStatus::InvalidInput);
    assert!(e.is_null());
    assert!(last_error().contains("n_paths"));

    let e = h.run(0, 3, 4, 1);
    let name = CString::new("nonsense").unwrap();
    let mut n = 0;
    let mut buf = [0.0; 8];
    assert_eq!(unsafe { cs_ensemble_series(e, name.as_ptr(), 0, buf.as_mut_ptr(), 8, &mut n) }, CsStatus::InvalidInput);
    let gdp = CString::new("gdp").unwrap();
    assert_eq!(unsafe { cs_ensemble_series(e, gdp.as_ptr(), 9, buf.as_mut_ptr(), 8, &mut n) }, CsStatus::InvalidInput);
    unsafe { cs_ensemble_free(e) };
}

#[test]
fn free_functions_accept_null() {
    unsafe {
        cs_params_free(ptr::null_mut());
        cs_scenario_free(ptr::null_mut());
        cs_ensemble_free(ptr::null_mut());
        cs_string_free(ptr::null_mut());
    }
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/crisis_sim.h")
}

#[test]
fn header_declares_every_export() {
    let text = std::fs::read_to_string(header()).unwrap();
    let src = include_str!("../src/lib.rs");
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 14);
    for name in exports {
        assert!(text.contains(&format!(" {name}(")) || text.contains(&format!("*{name}(")), "{name} missing from header");
    }
}

#[test]
fn c_program_links_against_the_static_library() {
    let target = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = target.join("libcrisis_sim_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(
        &src,
        r#"
#include <stdio.h>
#include "crisis_sim.h"
int main(int argc, char **argv) {
    CsParams *p = NULL;
    CsScenario *s = NULL;
    CsEnsemble *e = NULL;
    CsSummary sum;
    if (cs_params_reference(&p) != CS_STATUS_OK) return 10;
    if (cs_scenario_load(argv[1], &s) != CS_STATUS_OK) return 11;
    if (cs_ensemble_run(p, s, 42, 20, 8, 1, &e) != CS_STATUS_OK) return 12;
    if (cs_ensemble_summary(e, &sum) != CS_STATUS_OK) return 13;
    if (cs_params_load("/nonexistent.cfg", &p) != CS_STATUS_IO) return 14;
    char *msg = cs_last_error();
    if (msg == NULL) return 15;
    cs_string_free(msg);
    printf("%zu %.6f\n", sum.n_paths + sum.n_aborted, sum.debt_med);
    cs_ensemble_free(e);
    cs_scenario_free(s);
    cs_params_free(p);
    return 0;
}
"#,
    )
    .unwrap();
    let exe = dir.path().join("main");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = Command::new(&exe).arg(scenario_file("Shock-8.cfg").to_str().unwrap()).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    let line = String::from_utf8(out.stdout).unwrap();
    assert!(line.starts_with("20 "), "{line}");
}
