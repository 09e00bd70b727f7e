//! C ABI for the sidelobe library.
//!
//! Conventions:
//! - Sequences travel as opaque `SidelobeSequence` handles created by
//!   `sidelobe_sequence_parse` / `sidelobe_sequence_from_signs` and released
//!   with `sidelobe_sequence_free`.
//! - Every fallible call returns a `SidelobeStatus`; results come back
//!   through out-pointers that are written only on `SIDELOBE_STATUS_OK`.
//! - No call takes ownership of caller memory and no call panics across the
//!   boundary.

use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use sidelobe::bounds::{BoundSpec, PsiKind};
use sidelobe::seq::BinarySequence;
use sidelobe::stochastic::{self, SamplerConfig};

/// Result of every fallible call in this API.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SidelobeStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = -1,
    /// An argument failed validation (range, sign, parse).
    InvalidArgument = -2,
    /// Sequence text contained a character other than '+' or '-'.
    ParseError = -3,
    /// An output buffer was too small.
    BufferTooSmall = -4,
    /// An internal invariant failed; the library state is unchanged.
    Internal = -5,
}

/// Opaque handle to a bit-packed ±1 sequence.
pub struct SidelobeSequence(BinarySequence);

/// Choice of the exponent function psi(n) for bound evaluation.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SidelobePsiKind {
    /// psi = log n - (1 - epsilon) log log n; `epsilon` is read.
    Cor2 = 0,
    /// psi = log n - log log n + log 2 + epsilon; `epsilon` is read.
    Cor3 = 1,
    /// psi = log n - log log n + 0.862.
    Cor4 = 2,
    /// psi is the constant passed as `psi_const`.
    Custom = 3,
}

/// psi, threshold, and proportion bound for one (kind, n).
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct SidelobeBoundEval {
    pub n: u64,
    pub psi: f64,
    /// sqrt(2 n psi).
    pub threshold: f64,
    /// 2n / (psi e^psi).
    pub proportion_bound: f64,
}

/// Monte Carlo exceedance estimate with a Wilson 99% interval.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct SidelobeExceedance {
    pub trials: u64,
    pub hits: u64,
    pub proportion: f64,
    pub ci99_low: f64,
    pub ci99_high: f64,
}

fn guard<F: FnOnce() -> SidelobeStatus>(body: F) -> SidelobeStatus {
    catch_unwind(AssertUnwindSafe(body)).unwrap_or(SidelobeStatus::Internal)
}

/// Parses a NUL-terminated `{+,-}` string into a new sequence handle.
///
/// # Safety
/// `text` must point to a valid NUL-terminated string and `out` must be a
/// valid pointer. On `OK`, `*out` owns the handle and must be released with
/// [`sidelobe_sequence_free`].
#[no_mangle]
pub unsafe extern "C" fn sidelobe_sequence_parse(
    text: *const c_char,
    out: *mut *mut SidelobeSequence,
) -> SidelobeStatus {
    if text.is_null() || out.is_null() {
        return SidelobeStatus::NullPointer;
    }
    guard(|| {
        let Ok(text) = CStr::from_ptr(text).to_str() else {
            return SidelobeStatus::ParseError;
        };
        match BinarySequence::parse(text) {
            Ok(seq) => {
                *out = Box::into_raw(Box::new(SidelobeSequence(seq)));
                SidelobeStatus::Ok
            }
            Err(sidelobe::seq::SeqError::Parse { .. }) => SidelobeStatus::ParseError,
            Err(_) => SidelobeStatus::InvalidArgument,
        }
    })
}

/// Builds a sequence from `len` signs, each exactly +1 or -1.
///
/// # Safety
/// `signs` must point to `len` readable bytes and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sidelobe_sequence_from_signs(
    signs: *const i8,
    len: usize,
    out: *mut *mut SidelobeSequence,
) -> SidelobeStatus {
    if signs.is_null() || out.is_null() {
        return SidelobeStatus::NullPointer;
    }
    guard(|| {
        let elements = std::slice::from_raw_parts(signs, len);
        match BinarySequence::from_elements(elements) {
            Ok(seq) => {
                *out = Box::into_raw(Box::new(SidelobeSequence(seq)));
                SidelobeStatus::Ok
            }
            Err(_) => SidelobeStatus::InvalidArgument,
        }
    })
}

/// Releases a handle. Null is a no-op.
///
/// # Safety
/// `seq` must be a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn sidelobe_sequence_free(seq: *mut SidelobeSequence) {
    if !seq.is_null() {
        drop(Box::from_raw(seq));
    }
}

/// Sequence length.
///
/// # Safety
/// `seq` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn sidelobe_sequence_len(
    seq: *const SidelobeSequence,
    out: *mut usize,
) -> SidelobeStatus {
    if seq.is_null() || out.is_null() {
        return SidelobeStatus::NullPointer;
    }
    *out = (*seq).0.len();
    SidelobeStatus::Ok
}

/// Single aperiodic autocorrelation `c_shift`.
///
/// # Safety
/// `seq` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn sidelobe_sequence_autocorrelation(
    seq: *const SidelobeSequence,
    shift: usize,
    out: *mut i64,
) -> SidelobeStatus {
    if seq.is_null() || out.is_null() {
        return SidelobeStatus::NullPointer;
    }
    guard(|| match (*seq).0.autocorrelation(shift) {
        Ok(value) => {
            *out = value;
            SidelobeStatus::Ok
        }
        Err(_) => SidelobeStatus::InvalidArgument,
    })
}

/// Peak sidelobe level; requires length >= 2.
///
/// # Safety
/// `seq` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn sidelobe_sequence_psl(
    seq: *const SidelobeSequence,
    out: *mut u64,
) -> SidelobeStatus {
    if seq.is_null() || out.is_null() {
        return SidelobeStatus::NullPointer;
    }
    guard(|| match (*seq).0.psl() {
        Ok(mu) => {
            *out = mu;
            SidelobeStatus::Ok
        }
        Err(_) => SidelobeStatus::InvalidArgument,
    })
}

/// Writes the full spectrum `(c_0, ..., c_{n-1})` into `out`, which holds
/// `capacity` values; fails with `BUFFER_TOO_SMALL` if `capacity < n`.
///
/// # Safety
/// `seq` must be valid and `out` must point to `capacity` writable i64s.
#[no_mangle]
pub unsafe extern "C" fn sidelobe_sequence_spectrum(
    seq: *const SidelobeSequence,
    out: *mut i64,
    capacity: usize,
) -> SidelobeStatus {
    if seq.is_null() || out.is_null() {
        return SidelobeStatus::NullPointer;
    }
    guard(|| {
        let spectrum = (*seq).0.spectrum_direct();
        if capacity < spectrum.n() {
            return SidelobeStatus::BufferTooSmall;
        }
        let out = std::slice::from_raw_parts_mut(out, spectrum.n());
        out.copy_from_slice(spectrum.values());
        SidelobeStatus::Ok
    })
}

fn kind_from_parts(kind: SidelobePsiKind, epsilon: f64, psi_const: f64) -> PsiKind {
    match kind {
        SidelobePsiKind::Cor2 => PsiKind::Cor2 { epsilon },
        SidelobePsiKind::Cor3 => PsiKind::Cor3 { epsilon },
        SidelobePsiKind::Cor4 => PsiKind::Cor4,
        SidelobePsiKind::Custom => PsiKind::Custom { psi: psi_const },
    }
}

/// Evaluates psi, the threshold, and the proportion bound for one n.
/// `epsilon` is read for Cor2/Cor3, `psi_const` for Custom.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sidelobe_bound_eval(
    kind: SidelobePsiKind,
    epsilon: f64,
    psi_const: f64,
    n: u64,
    out: *mut SidelobeBoundEval,
) -> SidelobeStatus {
    if out.is_null() {
        return SidelobeStatus::NullPointer;
    }
    guard(|| {
        match BoundSpec::new(kind_from_parts(kind, epsilon, psi_const), n) {
            Ok(spec) => {
                *out = SidelobeBoundEval {
                    n,
                    psi: spec.psi(),
                    threshold: spec.threshold(),
                    proportion_bound: spec.proportion_bound(),
                };
                SidelobeStatus::Ok
            }
            Err(_) => SidelobeStatus::InvalidArgument,
        }
    })
}

/// Tail bound `2 exp(-lambda^2 / 2k)` for a sum of `k` random signs.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sidelobe_chernoff_tail(
    k: u64,
    lambda: f64,
    out: *mut f64,
) -> SidelobeStatus {
    if out.is_null() {
        return SidelobeStatus::NullPointer;
    }
    if k == 0 || !lambda.is_finite() || lambda <= 0.0 {
        return SidelobeStatus::InvalidArgument;
    }
    *out = sidelobe::bounds::chernoff_tail(k, lambda);
    SidelobeStatus::Ok
}

/// Seeded Monte Carlo estimate of `P[mu(A) > threshold]` over uniform
/// length-`n` sequences. Results are bit-identical for fixed `(n, trials,
/// seed)` regardless of `workers`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sidelobe_mc_exceedance(
    n: usize,
    trials: u64,
    seed: u64,
    workers: u32,
    threshold: f64,
    out: *mut SidelobeExceedance,
) -> SidelobeStatus {
    if out.is_null() {
        return SidelobeStatus::NullPointer;
    }
    guard(|| {
        let config = match SamplerConfig::new(n, trials, seed, workers.max(1) as usize) {
            Ok(config) => config,
            Err(_) => return SidelobeStatus::InvalidArgument,
        };
        match stochastic::estimate_exceedance(&config, threshold) {
            Ok(estimate) => {
                *out = SidelobeExceedance {
                    trials: estimate.config.trials,
                    hits: estimate.hits,
                    proportion: estimate.proportion,
                    ci99_low: estimate.ci99_low,
                    ci99_high: estimate.ci99_high,
                };
                SidelobeStatus::Ok
            }
            Err(_) => SidelobeStatus::InvalidArgument,
        }
    })
}

/// Exact `mu_min(n)` by exhaustive search (pruned prefix extension); the
/// witness text (+/- characters, NUL-terminated) is written into `witness`
/// when `witness_capacity >= n + 1`.
///
/// # Safety
/// `out_mu_min` must be valid; `witness` may be null (no witness is written)
/// or point to `witness_capacity` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn sidelobe_mu_min(
    n: u32,
    out_mu_min: *mut u64,
    witness: *mut c_char,
    witness_capacity: usize,
) -> SidelobeStatus {
    if out_mu_min.is_null() {
        return SidelobeStatus::NullPointer;
    }
    guard(|| {
        let result = match sidelobe::exact::mu_min_exact(n, true) {
            Ok(result) => result,
            Err(_) => return SidelobeStatus::InvalidArgument,
        };
        if !witness.is_null() {
            let text = result.witness.to_string();
            if witness_capacity < text.len() + 1 {
                return SidelobeStatus::BufferTooSmall;
            }
            let out = std::slice::from_raw_parts_mut(witness as *mut u8, text.len() + 1);
            out[..text.len()].copy_from_slice(text.as_bytes());
            out[text.len()] = 0;
        }
        *out_mu_min = result.mu_min;
        SidelobeStatus::Ok
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;
    use std::ptr;

    fn parse(text: &str) -> *mut SidelobeSequence {
        let c_text = CString::new(text).unwrap();
        let mut handle = ptr::null_mut();
        let status = unsafe { sidelobe_sequence_parse(c_text.as_ptr(), &mut handle) };
        assert_eq!(status, SidelobeStatus::Ok);
        handle
    }

    #[test]
    fn parse_psl_and_spectrum_round_trip() {
        let handle = parse("+++++--++-+-+");
        unsafe {
            let mut len = 0usize;
            assert_eq!(sidelobe_sequence_len(handle, &mut len), SidelobeStatus::Ok);
            assert_eq!(len, 13);
            let mut mu = 0u64;
            assert_eq!(sidelobe_sequence_psl(handle, &mut mu), SidelobeStatus::Ok);
            assert_eq!(mu, 1);
            let mut spectrum = vec![0i64; 13];
            assert_eq!(
                sidelobe_sequence_spectrum(handle, spectrum.as_mut_ptr(), spectrum.len()),
                SidelobeStatus::Ok
            );
            assert_eq!(spectrum, vec![13, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1]);
            let mut c1 = 0i64;
            assert_eq!(
                sidelobe_sequence_autocorrelation(handle, 1, &mut c1),
                SidelobeStatus::Ok
            );
            assert_eq!(c1, 0);
            // Shift out of range.
            assert_eq!(
                sidelobe_sequence_autocorrelation(handle, 13, &mut c1),
                SidelobeStatus::InvalidArgument
            );
            sidelobe_sequence_free(handle);
        }
    }

    #[test]
    fn error_codes_for_bad_inputs() {
        let mut handle = ptr::null_mut();
        unsafe {
            assert_eq!(
                sidelobe_sequence_parse(ptr::null(), &mut handle),
                SidelobeStatus::NullPointer
            );
            let bad = CString::new("+x+").unwrap();
            assert_eq!(
                sidelobe_sequence_parse(bad.as_ptr(), &mut handle),
                SidelobeStatus::ParseError
            );
            let signs = [1i8, 0, -1];
            assert_eq!(
                sidelobe_sequence_from_signs(signs.as_ptr(), signs.len(), &mut handle),
                SidelobeStatus::InvalidArgument
            );
            // Too-small spectrum buffer.
            let handle = parse("++++");
            let mut spectrum = vec![0i64; 2];
            assert_eq!(
                sidelobe_sequence_spectrum(handle, spectrum.as_mut_ptr(), spectrum.len()),
                SidelobeStatus::BufferTooSmall
            );
            sidelobe_sequence_free(handle);
            // Freeing null is a no-op.
            sidelobe_sequence_free(ptr::null_mut());
        }
    }

    #[test]
    fn bound_eval_matches_library() {
        let mut eval = SidelobeBoundEval { n: 0, psi: 0.0, threshold: 0.0, proportion_bound: 0.0 };
        unsafe {
            assert_eq!(
                sidelobe_bound_eval(SidelobePsiKind::Cor4, 0.0, 0.0, 2000, &mut eval),
                SidelobeStatus::Ok
            );
        }
        let spec = BoundSpec::new(PsiKind::Cor4, 2000).unwrap();
        assert_eq!(eval.psi, spec.psi());
        assert_eq!(eval.threshold, spec.threshold());
        assert_eq!(eval.proportion_bound, spec.proportion_bound());
        unsafe {
            assert_eq!(
                sidelobe_bound_eval(SidelobePsiKind::Custom, 0.0, -1.0, 2000, &mut eval),
                SidelobeStatus::InvalidArgument
            );
            assert_eq!(
                sidelobe_bound_eval(SidelobePsiKind::Cor4, 0.0, 0.0, 1, &mut eval),
                SidelobeStatus::InvalidArgument
            );
        }
    }

    #[test]
    fn chernoff_tail_via_ffi() {
        let mut bound = 0.0f64;
        unsafe {
            assert_eq!(sidelobe_chernoff_tail(4, 3.0, &mut bound), SidelobeStatus::Ok);
            assert!((bound - 0.6493049347166995).abs() < 1e-12);
            assert_eq!(sidelobe_chernoff_tail(0, 3.0, &mut bound), SidelobeStatus::InvalidArgument);
            assert_eq!(
                sidelobe_chernoff_tail(4, -1.0, &mut bound),
                SidelobeStatus::InvalidArgument
            );
        }
    }

    #[test]
    fn mc_exceedance_is_worker_invariant_across_ffi() {
        let mut first = SidelobeExceedance {
            trials: 0,
            hits: 0,
            proportion: 0.0,
            ci99_low: 0.0,
            ci99_high: 0.0,
        };
        let mut second = first;
        unsafe {
            assert_eq!(
                sidelobe_mc_exceedance(48, 4000, 9, 1, 12.0, &mut first),
                SidelobeStatus::Ok
            );
            assert_eq!(
                sidelobe_mc_exceedance(48, 4000, 9, 8, 12.0, &mut second),
                SidelobeStatus::Ok
            );
        }
        assert_eq!(first.hits, second.hits);
        assert_eq!(first.proportion, second.proportion);
        assert_eq!(first.ci99_low, second.ci99_low);
        unsafe {
            assert_eq!(
                sidelobe_mc_exceedance(1, 100, 0, 1, 0.5, &mut first),
                SidelobeStatus::InvalidArgument
            );
        }
    }

    #[test]
    fn mu_min_with_witness_buffer() {
        let mut mu = 0u64;
        let mut witness = vec![0u8; 14];
        unsafe {
            assert_eq!(
                sidelobe_mu_min(13, &mut mu, witness.as_mut_ptr() as *mut c_char, witness.len()),
                SidelobeStatus::Ok
            );
        }
        assert_eq!(mu, 1);
        let text = std::ffi::CStr::from_bytes_until_nul(&witness).unwrap().to_str().unwrap();
        assert_eq!(text.len(), 13);
        let seq = BinarySequence::parse(text).unwrap();
        assert_eq!(seq.psl().unwrap(), 1);
        // Tiny buffer.
        let mut small = vec![0u8; 4];
        unsafe {
            assert_eq!(
                sidelobe_mu_min(13, &mut mu, small.as_mut_ptr() as *mut c_char, small.len()),
                SidelobeStatus::BufferTooSmall
            );
            // Witness pointer may be null.
            assert_eq!(sidelobe_mu_min(5, &mut mu, ptr::null_mut(), 0), SidelobeStatus::Ok);
            assert_eq!(mu, 1);
            // Out of range.
            assert_eq!(sidelobe_mu_min(40, &mut mu, ptr::null_mut(), 0), SidelobeStatus::InvalidArgument);
        }
    }
}
