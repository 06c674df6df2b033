//! C interface to `entvir`.
//!
//! Every fallible function returns an [`EntvirStatus`]; on failure the
//! message is kept per thread and read back with
//! [`entvir_last_error_message`]. Matrices are written row-major.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use entvir::analysis;
use entvir::gaussian::{self, BogoliubovTransform, SingleParticleSpectrum};
use entvir::lattice::{self, LatticeProfile};
use entvir::model::ModelParams;
use entvir::pipeline;
use entvir::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntvirStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Numerical = 3,
    Panic = 4,
}

/// A diagonalized interval of a critical chain.
pub struct EntvirInterval {
    params: ModelParams,
    size: usize,
    bt: BogoliubovTransform,
    spec: SingleParticleSpectrum,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> EntvirStatus {
    if e.is_numerical() {
        EntvirStatus::Numerical
    } else {
        EntvirStatus::InvalidArgument
    }
}

fn guard<F: FnOnce() -> Result<(), (EntvirStatus, String)>>(f: F) -> EntvirStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            EntvirStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            EntvirStatus::Panic
        }
    }
}

fn lift(e: Error) -> (EntvirStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (EntvirStatus, String) {
    (EntvirStatus::NullPointer, format!("{what} is null"))
}

unsafe fn out_slice<'a>(
    p: *mut f64,
    len: usize,
    what: &str,
) -> Result<&'a mut [f64], (EntvirStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    // SAFETY: the caller provides `len` writable doubles at `p`.
    Ok(unsafe { std::slice::from_raw_parts_mut(p, len) })
}

unsafe fn interval<'a>(
    h: *const EntvirInterval,
) -> Result<&'a EntvirInterval, (EntvirStatus, String)> {
    // SAFETY: non-null handles come from `entvir_interval_new`.
    unsafe { h.as_ref() }.ok_or_else(|| null("interval"))
}

/// Diagonalizes an interval of `size` sites at the critical point
/// `(lambda, gamma)` and stores a new handle in `*out`.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn entvir_interval_new(
    lambda: f64,
    gamma: f64,
    size: usize,
    out: *mut *mut EntvirInterval,
) -> EntvirStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let params = ModelParams::new(lambda, gamma).map_err(lift)?;
        params.require_central_charge().map_err(lift)?;
        let cm = gaussian::build_correlation_matrix(&params, size).map_err(lift)?;
        let (bt, spec) = gaussian::diagonalize(&cm).map_err(lift)?;
        let handle = Box::new(EntvirInterval {
            params,
            size,
            bt,
            spec,
        });
        // SAFETY: checked non-null above.
        unsafe { *out = Box::into_raw(handle) };
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `handle` must come from [`entvir_interval_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn entvir_interval_free(handle: *mut EntvirInterval) {
    if !handle.is_null() {
        // SAFETY: ownership returns from the caller.
        drop(unsafe { Box::from_raw(handle) });
    }
}

/// Number of sites (and entanglement modes).
///
/// # Safety
/// `handle` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn entvir_interval_modes(
    handle: *const EntvirInterval,
    out: *mut usize,
) -> EntvirStatus {
    guard(|| {
        let h = unsafe { interval(handle)? };
        if out.is_null() {
            return Err(null("out"));
        }
        unsafe { *out = h.size };
        Ok(())
    })
}

/// Single-particle entanglement energies, ascending; `len` must equal the
/// number of modes.
///
/// # Safety
/// `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn entvir_interval_single_particle_energies(
    handle: *const EntvirInterval,
    out: *mut f64,
    len: usize,
) -> EntvirStatus {
    guard(|| {
        let h = unsafe { interval(handle)? };
        if len != h.spec.modes() {
            return Err((
                EntvirStatus::InvalidArgument,
                format!("buffer holds {len} values, need {}", h.spec.modes()),
            ));
        }
        unsafe { out_slice(out, len, "out")? }.copy_from_slice(&h.spec.energies);
        Ok(())
    })
}

/// Entanglement entropy of the interval.
///
/// # Safety
/// `handle` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn entvir_interval_entropy(
    handle: *const EntvirInterval,
    out: *mut f64,
) -> EntvirStatus {
    guard(|| {
        let h = unsafe { interval(handle)? };
        let out = unsafe { out_slice(out, 1, "out")? };
        out[0] = gaussian::entanglement_entropy(&h.spec);
        Ok(())
    })
}

/// The `count` lowest entanglement energies `E_a` and Schmidt weights.
/// Either output may be null.
///
/// # Safety
/// Non-null outputs must hold `count` doubles.
#[no_mangle]
pub unsafe extern "C" fn entvir_interval_schmidt(
    handle: *const EntvirInterval,
    count: usize,
    energies: *mut f64,
    weights: *mut f64,
) -> EntvirStatus {
    guard(|| {
        let h = unsafe { interval(handle)? };
        let states = gaussian::enumerate_schmidt(&h.spec, count).map_err(lift)?;
        if !energies.is_null() {
            let e = unsafe { out_slice(energies, count, "energies")? };
            for (x, s) in e.iter_mut().zip(&states) {
                *x = s.energy;
            }
        }
        if !weights.is_null() {
            let w = unsafe { out_slice(weights, count, "weights")? };
            for (x, s) in w.iter_mut().zip(&states) {
                *x = s.weight;
            }
        }
        Ok(())
    })
}

/// Rescaled dimensions `h_a` of the `count` lowest Schmidt states.
///
/// # Safety
/// `out` must hold `count` doubles.
#[no_mangle]
pub unsafe extern "C" fn entvir_interval_dimensions(
    handle: *const EntvirInterval,
    count: usize,
    epsilon: f64,
    out: *mut f64,
) -> EntvirStatus {
    guard(|| {
        let h = unsafe { interval(handle)? };
        let profile = LatticeProfile::new(h.size / 2, epsilon).map_err(lift)?;
        let states = gaussian::enumerate_schmidt(&h.spec, count).map_err(lift)?;
        let dims = analysis::rescale_spectrum(&states, profile.l());
        unsafe { out_slice(out, count, "out")? }.copy_from_slice(&dims);
        Ok(())
    })
}

/// `<v_a| H_n |v_b>` (or `L_n` when `virasoro` is nonzero) between the
/// `count` lowest Schmidt states, in their energy order and raw gauge.
///
/// # Safety
/// `re` and `im` must each hold `count * count` doubles.
#[no_mangle]
pub unsafe extern "C" fn entvir_interval_generator_table(
    handle: *const EntvirInterval,
    n: i32,
    virasoro: i32,
    count: usize,
    epsilon: f64,
    re: *mut f64,
    im: *mut f64,
) -> EntvirStatus {
    guard(|| {
        let h = unsafe { interval(handle)? };
        let profile = LatticeProfile::new(h.size / 2, epsilon).map_err(lift)?;
        let op = if virasoro != 0 {
            lattice::build_ln(&h.params, &profile, n)
        } else {
            lattice::build_hn(&h.params, &profile, n)
        }
        .map_err(lift)?;
        let states = gaussian::enumerate_schmidt(&h.spec, count).map_err(lift)?;
        let table = lattice::schmidt_table(&op, &h.bt, &states).map_err(lift)?;
        let re = unsafe { out_slice(re, count * count, "re")? };
        let im = unsafe { out_slice(im, count * count, "im")? };
        for a in 0..count {
            for b in 0..count {
                re[a * count + b] = table[(a, b)].re;
                im[a * count + b] = table[(a, b)].im;
            }
        }
        Ok(())
    })
}

/// Cutoff fitted from the first entanglement gap over `sizes`.
///
/// # Safety
/// `sizes` must hold `len` values and `epsilon` be writable.
#[no_mangle]
pub unsafe extern "C" fn entvir_fit_epsilon(
    lambda: f64,
    gamma: f64,
    sizes: *const usize,
    len: usize,
    epsilon: *mut f64,
) -> EntvirStatus {
    guard(|| {
        if sizes.is_null() {
            return Err(null("sizes"));
        }
        // SAFETY: the caller provides `len` sizes.
        let sizes = unsafe { std::slice::from_raw_parts(sizes, len) };
        let params = ModelParams::new(lambda, gamma).map_err(lift)?;
        let run = pipeline::run_fit(&params, sizes).map_err(lift)?;
        let out = unsafe { out_slice(epsilon, 1, "epsilon")? };
        out[0] = run.fit.epsilon;
        Ok(())
    })
}

/// Copies the calling thread's last error message into `buf` (truncated,
/// NUL-terminated) and returns its full length in bytes, excluding the NUL.
///
/// # Safety
/// `buf` must hold `len` bytes, or be null with `len == 0`.
#[no_mangle]
pub unsafe extern "C" fn entvir_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            // SAFETY: `n + 1 <= len` bytes are written.
            unsafe {
                ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
                *buf.add(n) = 0;
            }
        }
        msg.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn entvir_version() -> *const c_char {
    static VERSION: &CStr =
        match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
            Ok(v) => v,
            Err(_) => panic!("version contains a NUL byte"),
        };
    VERSION.as_ptr()
}
