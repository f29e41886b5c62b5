//! Exercises the C ABI through the exported symbols.

use std::ffi::{CStr, CString};
use std::ptr;

use kspm_ffi::*;

fn cstr(s: *mut std::ffi::c_char) -> String {
    assert!(!s.is_null());
    let owned = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { kspm_string_free(s) };
    owned
}

#[test]
fn fixed_point_round_trip() {
    unsafe {
        let mut config: *mut KspmConfig = ptr::null_mut();
        assert_eq!(kspm_fixed_point(3, 9, &mut config), KspmStatus::Ok);
        assert_eq!(kspm_config_width(config), 5);
        assert_eq!(kspm_config_mass(config), 9);

        let mut slope = 0u32;
        assert_eq!(kspm_config_slope(config, 1, &mut slope), KspmStatus::Ok);
        assert_eq!(slope, 2);
        assert_eq!(kspm_config_slope(config, 99, &mut slope), KspmStatus::Ok);
        assert_eq!(slope, 0);

        let mut json: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(kspm_config_to_json(config, &mut json), KspmStatus::Ok);
        assert_eq!(cstr(json), "[0,2,0,0,1]");

        kspm_config_free(config);
    }
}

#[test]
fn invalid_parameters_are_reported() {
    unsafe {
        let mut config: *mut KspmConfig = ptr::null_mut();
        assert_eq!(
            kspm_fixed_point(1, 4, &mut config),
            KspmStatus::InvalidArgument
        );
        assert_eq!(kspm_fixed_point(3, 4, ptr::null_mut()), KspmStatus::NullPointer);

        let mut machine: *mut KspmMachine = ptr::null_mut();
        assert_eq!(kspm_machine_build(3, 9, &mut machine), KspmStatus::InvalidArgument);
    }
}

#[test]
fn wave_match_on_unstable_config_is_rule_violation() {
    unsafe {
        let slopes = [3u32];
        let mut config: *mut KspmConfig = ptr::null_mut();
        assert_eq!(
            kspm_config_from_slopes(slopes.as_ptr(), 1, &mut config),
            KspmStatus::Ok
        );
        let mut result = KspmWaveMatch {
            start_column: 0,
            left_blocks: 0,
            right_blocks: 0,
            has_zero: false,
        };
        assert_eq!(
            kspm_wave_match(config, 3, &mut result),
            KspmStatus::RuleViolation
        );
        kspm_config_free(config);
    }
}

#[test]
fn wave_match_reads_fixed_point() {
    unsafe {
        let mut config: *mut KspmConfig = ptr::null_mut();
        assert_eq!(kspm_fixed_point(3, 9, &mut config), KspmStatus::Ok);
        let mut result = KspmWaveMatch {
            start_column: 0,
            left_blocks: 0,
            right_blocks: 0,
            has_zero: false,
        };
        assert_eq!(kspm_wave_match(config, 3, &mut result), KspmStatus::Ok);
        assert_eq!(result.start_column, 5);
        kspm_config_free(config);
    }
}

#[test]
fn machine_run_and_steps() {
    unsafe {
        let mut machine: *mut KspmMachine = ptr::null_mut();
        assert_eq!(kspm_machine_build(3, 0, &mut machine), KspmStatus::Ok);
        assert_eq!(kspm_machine_state_count(machine), 7);

        let word = CString::new("abaaaaab").unwrap();
        let mut image: *mut std::ffi::c_char = ptr::null_mut();
        let mut state: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(
            kspm_machine_run(machine, word.as_ptr(), &mut image, &mut state),
            KspmStatus::Ok
        );
        assert_eq!(cstr(image), "01001");
        assert_eq!(cstr(state), "21");

        let bad = CString::new("abc").unwrap();
        assert_eq!(
            kspm_machine_run(machine, bad.as_ptr(), &mut image, &mut state),
            KspmStatus::InvalidArgument
        );

        let mut steps = 0usize;
        let b4 = CString::new("bbbb").unwrap();
        assert_eq!(
            kspm_machine_wave_steps(machine, b4.as_ptr(), &mut steps),
            KspmStatus::Ok
        );
        assert!(steps <= kspm::words::wave_step_bound(4));

        let mut dot: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(kspm_machine_to_dot(machine, &mut dot), KspmStatus::Ok);
        assert!(cstr(dot).starts_with("digraph"));

        kspm_machine_free(machine);
    }
}

#[test]
fn frees_tolerate_null() {
    unsafe {
        kspm_config_free(ptr::null_mut());
        kspm_machine_free(ptr::null_mut());
        kspm_string_free(ptr::null_mut());
    }
}
