//! C ABI over the sand pile laboratory.
//!
//! Handles are opaque pointers owned by this library; every constructor has
//! a matching `_free`, strings returned through `char**` are freed with
//! [`kspm_string_free`]. All functions return a [`KspmStatus`]; out
//! parameters are written only on `KSPM_STATUS_OK`.

use std::ffi::{c_char, CStr, CString};
use std::ptr;

use kspm::sandpile::{fixed_point, Configuration, ModelParams};
use kspm::transducer::{parse_word, render_word, Machine, OutputMode};
use kspm::wave::wave_match;
use kspm::words::wave_steps;

/// Opaque sand pile configuration.
pub struct KspmConfig(Configuration);

/// Opaque interval word transducer.
pub struct KspmMachine(Machine);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KspmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    RuleViolation = 3,
    BadEncoding = 4,
    Internal = 5,
}

/// Wave-tail match result for a stable configuration.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct KspmWaveMatch {
    /// Minimal column from which the tail is a wave.
    pub start_column: usize,
    pub left_blocks: usize,
    pub right_blocks: usize,
    pub has_zero: bool,
}

fn status_of(err: &kspm::Error) -> KspmStatus {
    use kspm::Error::*;
    match err {
        InvalidParameter(_) | LetterOutOfAlphabet { .. } | RunSizeOutOfRange { .. }
        | BelowTypeThreshold { .. } | Parse(_) => KspmStatus::InvalidArgument,
        NotFireable { .. } | NotStable { .. } => KspmStatus::RuleViolation,
        _ => KspmStatus::Internal,
    }
}

fn export_string(s: String, out: *mut *mut c_char) -> KspmStatus {
    match CString::new(s) {
        Ok(cstring) => {
            unsafe { *out = cstring.into_raw() };
            KspmStatus::Ok
        }
        Err(_) => KspmStatus::BadEncoding,
    }
}

/// Computes the fixed point of `n` stacked grains for KSPM(d).
///
/// # Safety
/// `out` must be a valid pointer to a `KspmConfig*`.
#[no_mangle]
pub unsafe extern "C" fn kspm_fixed_point(
    d: u32,
    n: u64,
    out: *mut *mut KspmConfig,
) -> KspmStatus {
    if out.is_null() {
        return KspmStatus::NullPointer;
    }
    let params = match ModelParams::new(d) {
        Ok(p) => p,
        Err(e) => return status_of(&e),
    };
    match fixed_point(&params, n, |_, _, _| {}) {
        Ok(config) => {
            *out = Box::into_raw(Box::new(KspmConfig(config)));
            KspmStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Builds a configuration from a slope array.
///
/// # Safety
/// `slopes` must point to `len` readable `uint32_t` values (or be NULL with
/// `len == 0`), and `out` must be a valid pointer to a `KspmConfig*`.
#[no_mangle]
pub unsafe extern "C" fn kspm_config_from_slopes(
    slopes: *const u32,
    len: usize,
    out: *mut *mut KspmConfig,
) -> KspmStatus {
    if out.is_null() || (slopes.is_null() && len > 0) {
        return KspmStatus::NullPointer;
    }
    let values = if len == 0 {
        Vec::new()
    } else {
        std::slice::from_raw_parts(slopes, len).to_vec()
    };
    *out = Box::into_raw(Box::new(KspmConfig(Configuration::from_slopes(values))));
    KspmStatus::Ok
}

/// Number of non-empty columns.
///
/// # Safety
/// `config` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn kspm_config_width(config: *const KspmConfig) -> usize {
    if config.is_null() {
        return 0;
    }
    (*config).0.width()
}

/// Total grain count.
///
/// # Safety
/// `config` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn kspm_config_mass(config: *const KspmConfig) -> u64 {
    if config.is_null() {
        return 0;
    }
    (*config).0.mass()
}

/// Slope at `column` (zero beyond the stored prefix).
///
/// # Safety
/// `config` must be a live handle and `out` a valid `uint32_t` pointer.
#[no_mangle]
pub unsafe extern "C" fn kspm_config_slope(
    config: *const KspmConfig,
    column: usize,
    out: *mut u32,
) -> KspmStatus {
    if config.is_null() || out.is_null() {
        return KspmStatus::NullPointer;
    }
    *out = (*config).0.slope(column);
    KspmStatus::Ok
}

/// Canonical slope array as a JSON string; free with [`kspm_string_free`].
///
/// # Safety
/// `config` must be a live handle and `out` a valid `char**`.
#[no_mangle]
pub unsafe extern "C" fn kspm_config_to_json(
    config: *const KspmConfig,
    out: *mut *mut c_char,
) -> KspmStatus {
    if config.is_null() || out.is_null() {
        return KspmStatus::NullPointer;
    }
    export_string((*config).0.to_json(), out)
}

/// Matches the wave tail pattern of a stable configuration.
///
/// # Safety
/// `config` must be a live handle and `out` a valid `KspmWaveMatch` pointer.
#[no_mangle]
pub unsafe extern "C" fn kspm_wave_match(
    config: *const KspmConfig,
    d: u32,
    out: *mut KspmWaveMatch,
) -> KspmStatus {
    if config.is_null() || out.is_null() {
        return KspmStatus::NullPointer;
    }
    let params = match ModelParams::new(d) {
        Ok(p) => p,
        Err(e) => return status_of(&e),
    };
    match wave_match(&(*config).0, &params) {
        Ok(m) => {
            *out = KspmWaveMatch {
                start_column: m.start_column,
                left_blocks: m.left_blocks,
                right_blocks: m.right_blocks,
                has_zero: m.has_zero,
            };
            KspmStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Frees a configuration handle; NULL is ignored.
///
/// # Safety
/// `config` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn kspm_config_free(config: *mut KspmConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Builds the interval machine for KSPM(d). `mode` 0 keeps the update
/// rule's transient outputs, 1 suppresses them.
///
/// # Safety
/// `out` must be a valid pointer to a `KspmMachine*`.
#[no_mangle]
pub unsafe extern "C" fn kspm_machine_build(
    d: u32,
    mode: u32,
    out: *mut *mut KspmMachine,
) -> KspmStatus {
    if out.is_null() {
        return KspmStatus::NullPointer;
    }
    let mode = match mode {
        0 => OutputMode::AlgorithmExact,
        1 => OutputMode::FigureSuppressed,
        _ => return KspmStatus::InvalidArgument,
    };
    let params = match ModelParams::new(d) {
        Ok(p) => p,
        Err(e) => return status_of(&e),
    };
    match Machine::build(&params, mode) {
        Ok(machine) => {
            *out = Box::into_raw(Box::new(KspmMachine(machine)));
            KspmStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Number of reachable states.
///
/// # Safety
/// `machine` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn kspm_machine_state_count(machine: *const KspmMachine) -> usize {
    if machine.is_null() {
        return 0;
    }
    (*machine).0.state_count()
}

/// Runs `word` (digits, or a/b for D=3) through the machine. On success
/// writes the output word to `out_image` and the end state tuple to
/// `out_state`; both are optional and freed with [`kspm_string_free`].
///
/// # Safety
/// `machine` must be a live handle, `word` a NUL-terminated string, and the
/// out parameters NULL or valid `char**`.
#[no_mangle]
pub unsafe extern "C" fn kspm_machine_run(
    machine: *const KspmMachine,
    word: *const c_char,
    out_image: *mut *mut c_char,
    out_state: *mut *mut c_char,
) -> KspmStatus {
    if machine.is_null() || word.is_null() {
        return KspmStatus::NullPointer;
    }
    let machine = &(*machine).0;
    let Ok(text) = CStr::from_ptr(word).to_str() else {
        return KspmStatus::BadEncoding;
    };
    let parsed = match parse_word(text, machine.d()) {
        Ok(w) => w,
        Err(e) => return status_of(&e),
    };
    match machine.run(&parsed) {
        Ok((end, output)) => {
            if !out_image.is_null() {
                let status =
                    export_string(render_word(&output, machine.d(), false), out_image);
                if status != KspmStatus::Ok {
                    return status;
                }
            }
            if !out_state.is_null() {
                let tuple: String = machine
                    .state_tuple(end)
                    .iter()
                    .map(|v| v.to_string())
                    .collect();
                let status = export_string(tuple, out_state);
                if status != KspmStatus::Ok {
                    if !out_image.is_null() {
                        kspm_string_free(*out_image);
                        *out_image = ptr::null_mut();
                    }
                    return status;
                }
            }
            KspmStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Number of image iterations until `word` becomes an alternating prefix.
///
/// # Safety
/// `machine` must be a live handle, `word` a NUL-terminated string and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kspm_machine_wave_steps(
    machine: *const KspmMachine,
    word: *const c_char,
    out: *mut usize,
) -> KspmStatus {
    if machine.is_null() || word.is_null() || out.is_null() {
        return KspmStatus::NullPointer;
    }
    let machine = &(*machine).0;
    let Ok(text) = CStr::from_ptr(word).to_str() else {
        return KspmStatus::BadEncoding;
    };
    let parsed = match parse_word(text, machine.d()) {
        Ok(w) => w,
        Err(e) => return status_of(&e),
    };
    match wave_steps(machine, &parsed) {
        Ok(n) => {
            *out = n;
            KspmStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// DOT export of the machine; free with [`kspm_string_free`].
///
/// # Safety
/// `machine` must be a live handle and `out` a valid `char**`.
#[no_mangle]
pub unsafe extern "C" fn kspm_machine_to_dot(
    machine: *const KspmMachine,
    out: *mut *mut c_char,
) -> KspmStatus {
    if machine.is_null() || out.is_null() {
        return KspmStatus::NullPointer;
    }
    export_string((*machine).0.to_dot(), out)
}

/// Frees a machine handle; NULL is ignored.
///
/// # Safety
/// `machine` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn kspm_machine_free(machine: *mut KspmMachine) {
    if !machine.is_null() {
        drop(Box::from_raw(machine));
    }
}

/// Frees a string returned by this library; NULL is ignored.
///
/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn kspm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
