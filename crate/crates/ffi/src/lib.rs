//! C interface to `dataset-models`.
//!
//! Models live behind an opaque `DsmModel` handle created by one of the
//! `dsm_*_new` functions and released with `dsm_model_free`. Every other
//! function returns a `DsmStatus` code and writes results through out
//! pointers; on failure the message is available from
//! `dsm_last_error_message` on the same thread.
//!
//! Vectors are passed as pointer plus length. Matrices are row-major.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dataset_models::canonical::{CanonicalModel, DataSet};
use dataset_models::coherent::{CoherentModel, FockVector, PhaseConstants, DEFAULT_BOUND};
use dataset_models::discrete::{DiscreteFamily, DiscreteModel, ProbabilityVector};
use dataset_models::qubit::{bloch_to_rho, QubitModel};
use dataset_models::regression::{regression_entropy, regression_questions, RegressionData};
use dataset_models::Error;
use num_complex::Complex64;

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DsmStatus {
    Ok = 0,
    NullPointer = 1,
    Shape = 2,
    InvalidInput = 3,
    Domain = 4,
    NonConvergence = 5,
    Unbounded = 6,
    Degenerate = 7,
    Canonicality = 8,
    Unsupported = 9,
    Infeasible = 10,
    Truncation = 11,
    Panic = 12,
    Other = 13,
}

impl From<&Error> for DsmStatus {
    fn from(e: &Error) -> Self {
        match e.category() {
            "domain" | "spectral-domain" => DsmStatus::Domain,
            "non-convergence" => DsmStatus::NonConvergence,
            "unbounded" => DsmStatus::Unbounded,
            "degenerate" | "degenerate-data" => DsmStatus::Degenerate,
            "canonicality" => DsmStatus::Canonicality,
            "unsupported" => DsmStatus::Unsupported,
            "shape" => DsmStatus::Shape,
            "support" | "invalid-input" | "invalid-parameter" | "constraint" => DsmStatus::InvalidInput,
            "infeasible" => DsmStatus::Infeasible,
            "truncation" => DsmStatus::Truncation,
            _ => DsmStatus::Other,
        }
    }
}

/// Opaque model handle.
pub struct DsmModel {
    inner: CanonicalModel,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Fail(DsmStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(DsmStatus::from(&e), e.to_string())
    }
}

type Outcome = Result<(), Fail>;

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

fn guard(body: impl FnOnce() -> Outcome) -> DsmStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            DsmStatus::Ok
        }
        Ok(Err(Fail(code, msg))) => {
            set_error(&msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            DsmStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(DsmStatus::NullPointer, format!("{what} is null"))
}

/// # Safety
/// `p` must point to `len` readable values or be null with `len == 0`.
unsafe fn input<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

/// # Safety
/// `p` must point to `len` writable values.
unsafe fn output(p: *mut f64, len: usize, values: &[f64], what: &str) -> Outcome {
    if values.len() != len {
        return Err(Fail(
            DsmStatus::Shape,
            format!("{what} holds {len} values, result has {}", values.len()),
        ));
    }
    if len > 0 && p.is_null() {
        return Err(null(what));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), p, len);
    Ok(())
}

unsafe fn write(p: *mut f64, v: f64, what: &str) -> Outcome {
    if p.is_null() {
        return Err(null(what));
    }
    *p = v;
    Ok(())
}

unsafe fn model<'a>(m: *const DsmModel) -> Result<&'a CanonicalModel, Fail> {
    m.as_ref().map(|m| &m.inner).ok_or_else(|| null("model"))
}

unsafe fn publish(out: *mut *mut DsmModel, inner: CanonicalModel) -> Outcome {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(DsmModel { inner }));
    Ok(())
}

/// Copies the last error message of this thread, NUL-terminated and
/// truncated to `capacity`, into `buf`. Returns the length of the full
/// message excluding the terminator.
///
/// # Safety
/// `buf` must point to `capacity` writable bytes or be null.
#[no_mangle]
pub unsafe extern "C" fn dsm_last_error_message(buf: *mut c_char, capacity: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let msg = slot.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && capacity > 0 {
            let n = bytes.len().min(capacity - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Qubit model; energies `U` with `|U| < 1 − margin`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dsm_qubit_new(margin: f64, out: *mut *mut DsmModel) -> DsmStatus {
    guard(|| publish(out, CanonicalModel::Qubit(QubitModel::new(margin)?)))
}

/// Phase-space model on wave functions truncated at `nmax` quanta.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dsm_coherent_new(r: f64, hbar: f64, nmax: usize, out: *mut *mut DsmModel) -> DsmStatus {
    guard(|| {
        let k = PhaseConstants::new(r, hbar)?;
        publish(out, CanonicalModel::Coherent(CoherentModel::new(k, nmax, DEFAULT_BOUND)?))
    })
}

/// Exponential family on `alphabet` symbols with `dim` energy functions
/// given row-major in `hamiltonians`. A null `prior` means the unit prior.
///
/// # Safety
/// `prior` must hold `alphabet` values or be null; `hamiltonians` must hold
/// `dim * alphabet` values; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dsm_discrete_new(
    prior: *const f64,
    hamiltonians: *const f64,
    dim: usize,
    alphabet: usize,
    out: *mut *mut DsmModel,
) -> DsmStatus {
    guard(|| {
        let total = dim.checked_mul(alphabet).ok_or(Fail(DsmStatus::Shape, "size overflow".into()))?;
        let h = input(hamiltonians, total, "hamiltonians")?;
        let rows: Vec<Vec<f64>> = h.chunks(alphabet.max(1)).map(<[f64]>::to_vec).collect();
        let family = if prior.is_null() {
            DiscreteFamily::with_unit_prior(rows)?
        } else {
            DiscreteFamily::new(input(prior, alphabet, "prior")?.to_vec(), rows)?
        };
        publish(out, CanonicalModel::Discrete(DiscreteModel::new(family)?))
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `m` must come from a `dsm_*_new` function and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dsm_model_free(m: *mut DsmModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Number of parameters θ (and energies U) of the model; 0 for null.
///
/// # Safety
/// `m` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn dsm_model_dim(m: *const DsmModel) -> usize {
    m.as_ref().map_or(0, |m| m.inner.dim())
}

/// Φ(θ).
///
/// # Safety
/// Pointers must be valid for the given lengths.
#[no_mangle]
pub unsafe extern "C" fn dsm_massieu(m: *const DsmModel, theta: *const f64, len: usize, out: *mut f64) -> DsmStatus {
    guard(|| {
        let v = model(m)?.massieu(input(theta, len, "theta")?)?;
        write(out, v, "out")
    })
}

/// U(θ) = −∇Φ(θ).
///
/// # Safety
/// Pointers must be valid for the given lengths.
#[no_mangle]
pub unsafe extern "C" fn dsm_theta_to_u(
    m: *const DsmModel,
    theta: *const f64,
    len: usize,
    u_out: *mut f64,
    u_len: usize,
) -> DsmStatus {
    guard(|| {
        let u = model(m)?.theta_to_u(input(theta, len, "theta")?)?;
        output(u_out, u_len, &u, "u_out")
    })
}

/// θ(U) = ∇S(U).
///
/// # Safety
/// Pointers must be valid for the given lengths.
#[no_mangle]
pub unsafe extern "C" fn dsm_u_to_theta(
    m: *const DsmModel,
    u: *const f64,
    len: usize,
    theta_out: *mut f64,
    theta_len: usize,
) -> DsmStatus {
    guard(|| {
        let t = model(m)?.u_to_theta(input(u, len, "u")?)?;
        output(theta_out, theta_len, &t, "theta_out")
    })
}

/// S(U).
///
/// # Safety
/// Pointers must be valid for the given lengths.
#[no_mangle]
pub unsafe extern "C" fn dsm_entropy(m: *const DsmModel, u: *const f64, len: usize, out: *mut f64) -> DsmStatus {
    guard(|| {
        let v = model(m)?.entropy_u(input(u, len, "u")?)?;
        write(out, v, "out")
    })
}

/// θ whose model reproduces the energies `u`.
///
/// # Safety
/// Pointers must be valid for the given lengths.
#[no_mangle]
pub unsafe extern "C" fn dsm_maxent_fit(
    m: *const DsmModel,
    u: *const f64,
    len: usize,
    theta_out: *mut f64,
    theta_len: usize,
) -> DsmStatus {
    guard(|| {
        let fit = model(m)?.fit(input(u, len, "u")?)?;
        output(theta_out, theta_len, &fit.theta, "theta_out")
    })
}

/// Hessian of Φ at θ, row-major into `out` of length `len * len`.
///
/// # Safety
/// Pointers must be valid for the given lengths.
#[no_mangle]
pub unsafe extern "C" fn dsm_metric(
    m: *const DsmModel,
    theta: *const f64,
    len: usize,
    out: *mut f64,
    out_len: usize,
) -> DsmStatus {
    guard(|| {
        let g = model(m)?.metric(input(theta, len, "theta")?)?;
        let n = g.matrix.nrows();
        let rows: Vec<f64> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| g.matrix[(i, j)]).collect();
        output(out, out_len, &rows, "out")
    })
}

/// Bregman divergence of m_θ from m_ζ.
///
/// # Safety
/// Pointers must be valid for the given lengths.
#[no_mangle]
pub unsafe extern "C" fn dsm_bregman(
    m: *const DsmModel,
    theta: *const f64,
    zeta: *const f64,
    len: usize,
    out: *mut f64,
) -> DsmStatus {
    guard(|| {
        let v = model(m)?.bregman(input(theta, len, "theta")?, input(zeta, len, "zeta")?)?;
        write(out, v, "out")
    })
}

/// `|Φ(θ) − S(U(θ)) + θ·U(θ)|`.
///
/// # Safety
/// Pointers must be valid for the given lengths.
#[no_mangle]
pub unsafe extern "C" fn dsm_canonical_residual(
    m: *const DsmModel,
    theta: *const f64,
    len: usize,
    out: *mut f64,
) -> DsmStatus {
    guard(|| {
        let pair = model(m)?.canonical_check(input(theta, len, "theta")?, Some(f64::INFINITY))?;
        write(out, pair.residual, "out")
    })
}

/// Divergence of a data set from m_θ. The data set is a probability
/// vector (discrete), a Bloch vector (qubit) or interleaved real and
/// imaginary Fock amplitudes of length `2 * (nmax + 1)` (coherent).
///
/// # Safety
/// Pointers must be valid for the given lengths.
#[no_mangle]
pub unsafe extern "C" fn dsm_divergence(
    m: *const DsmModel,
    data: *const f64,
    data_len: usize,
    theta: *const f64,
    theta_len: usize,
    out: *mut f64,
) -> DsmStatus {
    guard(|| {
        let model = model(m)?;
        let x = input(data, data_len, "data")?;
        let set = match model {
            CanonicalModel::Discrete(_) => DataSet::Distribution(ProbabilityVector::new(x.to_vec())?),
            CanonicalModel::Qubit(_) => match x {
                [a, b, c] => DataSet::Density(bloch_to_rho(&[*a, *b, *c])?),
                _ => return Err(Error::Shape { expected: 3, found: x.len() }.into()),
            },
            CanonicalModel::Coherent(_) => {
                if x.len() % 2 != 0 {
                    return Err(Fail(DsmStatus::Shape, "amplitudes must come in re, im pairs".into()));
                }
                let amps = x.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect();
                DataSet::Wave(FockVector::new(amps)?)
            }
        };
        let r = model.divergence_from_data(&set, input(theta, theta_len, "theta")?)?;
        write(out, r.value, "out")
    })
}

/// Least-squares line `y = a·x + b` and entropy of `n` pairs.
///
/// # Safety
/// `x`, `y` must hold `n` values; out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn dsm_regression(
    x: *const f64,
    y: *const f64,
    n: usize,
    a_out: *mut f64,
    b_out: *mut f64,
    entropy_out: *mut f64,
) -> DsmStatus {
    guard(|| {
        let xs = input(x, n, "x")?;
        let ys = input(y, n, "y")?;
        let data = RegressionData::new(xs.iter().copied().zip(ys.iter().copied()).collect())?;
        let line = regression_questions(&data)?;
        let s = regression_entropy(&data)?;
        write(a_out, line.a, "a_out")?;
        write(b_out, line.b, "b_out")?;
        write(entropy_out, s, "entropy_out")
    })
}
