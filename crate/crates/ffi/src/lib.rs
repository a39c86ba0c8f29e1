//! C interface to `qfimlab`.
//!
//! Every fallible function returns a [`QfimlabStatus`] and writes results through out-pointers.
//! Objects are opaque handles created by `*_new`/constructor functions and released with the
//! matching `*_free`. After a non-`Ok` status, [`qfimlab_last_error`] returns a description
//! owned by the library and valid until the next call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use qfimlab::channels::Channel;
use qfimlab::dla::{lie_closure, sector_lie_closure, x_parity_sector};
use qfimlab::qfim::{qfim_of_circuit, QfimReport, RankTolerance};
use qfimlab::qnn::{hva_tfim, plus_product_state, toy_model, NoisyCircuit, ParameterVector};
use qfimlab::tensor::DensityMatrix;
use qfimlab::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QfimlabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    NumericalFailure = 4,
    CapExceeded = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QfimlabNoise {
    None = 0,
    BitFlip = 1,
    GlobalDepol = 2,
    LocalDepol = 3,
}

/// A circuit with its noise slots and default input state.
pub struct QfimlabCircuit {
    circuit: NoisyCircuit,
    input: DensityMatrix,
    /// `Some(n)` for the HVA, whose input lives in the `X^{⊗n} = +1` sector.
    hva_qubits: Option<usize>,
}

/// QFIM with its spectrum.
pub struct QfimlabReport {
    report: QfimReport,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> QfimlabStatus {
    match e {
        Error::DimMismatch { .. } | Error::LengthMismatch { .. } => QfimlabStatus::DimensionMismatch,
        Error::NoConvergence { .. } | Error::SpectralFailure(_) | Error::DegenerateDistribution => QfimlabStatus::NumericalFailure,
        Error::CapExceeded { .. } | Error::TooLarge { .. } => QfimlabStatus::CapExceeded,
        _ => QfimlabStatus::InvalidArgument,
    }
}

/// Runs `f`, converting errors and panics to a status.
fn guard(f: impl FnOnce() -> Result<(), (QfimlabStatus, String)>) -> QfimlabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            QfimlabStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            QfimlabStatus::Panic
        }
    }
}

fn lib<T>(r: qfimlab::Result<T>) -> Result<T, (QfimlabStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (QfimlabStatus, String) {
    (QfimlabStatus::NullPointer, format!("{what} is null"))
}

/// # Safety
/// `ptr` must be null or point to a live object created by this library.
unsafe fn deref<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, (QfimlabStatus, String)> {
    ptr.as_ref().ok_or_else(|| null(what))
}

/// # Safety
/// `out` must be null or valid for a pointer write.
unsafe fn emit<T>(out: *mut *mut T, value: T) -> Result<(), (QfimlabStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn qfimlab_status_message(status: QfimlabStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        QfimlabStatus::Ok => b"ok\0",
        QfimlabStatus::NullPointer => b"null pointer argument\0",
        QfimlabStatus::InvalidArgument => b"invalid argument\0",
        QfimlabStatus::DimensionMismatch => b"dimension or length mismatch\0",
        QfimlabStatus::NumericalFailure => b"numerical failure\0",
        QfimlabStatus::CapExceeded => b"dimension cap exceeded\0",
        QfimlabStatus::BufferTooSmall => b"output buffer too small\0",
        QfimlabStatus::Panic => b"internal panic\0",
    };
    s.as_ptr().cast()
}

/// Message of the last failed call on this thread (empty after a success).
#[no_mangle]
pub extern "C" fn qfimlab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Single-qubit model `R_x R_z R_x R_z` on `0.9|+⟩⟨+| + 0.05 I`, noiseless.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn qfimlab_circuit_toy(out: *mut *mut QfimlabCircuit) -> QfimlabStatus {
    guard(|| {
        let (circuit, input) = toy_model();
        emit(out, QfimlabCircuit { circuit, input, hva_qubits: None })
    })
}

/// Periodic transverse-field Ising HVA on `n` qubits with `layers` layers, input `|+⟩^{⊗n}`.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn qfimlab_circuit_hva_tfim(n: usize, layers: usize, out: *mut *mut QfimlabCircuit) -> QfimlabStatus {
    guard(|| {
        if n > 8 {
            return Err((QfimlabStatus::InvalidArgument, format!("n = {n} exceeds 8 qubits")));
        }
        let circuit = lib(hva_tfim(n, layers))?;
        emit(out, QfimlabCircuit { circuit, input: plus_product_state(n), hva_qubits: Some(n) })
    })
}

/// # Safety
/// `circuit` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn qfimlab_circuit_free(circuit: *mut QfimlabCircuit) {
    if !circuit.is_null() {
        drop(Box::from_raw(circuit));
    }
}

/// Number of parameters, or 0 for a null handle.
///
/// # Safety
/// `circuit` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qfimlab_circuit_num_params(circuit: *const QfimlabCircuit) -> usize {
    circuit.as_ref().map_or(0, |c| c.circuit.num_params())
}

/// Number of qubits, or 0 for a null handle.
///
/// # Safety
/// `circuit` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qfimlab_circuit_num_qubits(circuit: *const QfimlabCircuit) -> usize {
    circuit.as_ref().map_or(0, |c| c.circuit.n_qubits())
}

/// Places the same channel of strength `p` in all `M + 1` noise slots, replacing any
/// previous noise.
///
/// # Safety
/// `circuit` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn qfimlab_circuit_set_noise(circuit: *mut QfimlabCircuit, model: QfimlabNoise, p: f64) -> QfimlabStatus {
    guard(|| {
        let c = circuit.as_mut().ok_or_else(|| null("circuit"))?;
        let n = c.circuit.n_qubits();
        let channel = lib(match model {
            QfimlabNoise::None => Ok(Channel::identity(n)),
            QfimlabNoise::BitFlip => Channel::bit_flip(n, p),
            QfimlabNoise::GlobalDepol => Channel::global_depol(n, p),
            QfimlabNoise::LocalDepol => Channel::local_depol_uniform(n, p),
        })?;
        c.circuit = lib(c.circuit.noiseless().with_uniform_noise(channel))?;
        Ok(())
    })
}

/// QFIM of the circuit output at `theta[0..len]`. Non-positive `rank_abs`/`rank_rel` select
/// the defaults `1e-12`/`1e-10`.
///
/// # Safety
/// `circuit` must be a live handle, `theta` valid for `len` reads, `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qfimlab_qfim(
    circuit: *const QfimlabCircuit,
    theta: *const f64,
    len: usize,
    rank_abs: f64,
    rank_rel: f64,
    out: *mut *mut QfimlabReport,
) -> QfimlabStatus {
    guard(|| {
        let c = deref(circuit, "circuit")?;
        if theta.is_null() && len > 0 {
            return Err(null("theta"));
        }
        let values = if len == 0 { Vec::new() } else { std::slice::from_raw_parts(theta, len).to_vec() };
        let mut tol = RankTolerance::default();
        if rank_abs > 0.0 {
            tol.abs = rank_abs;
        }
        if rank_rel > 0.0 {
            tol.rel = rank_rel;
        }
        let report = lib(qfim_of_circuit(&c.circuit, &ParameterVector::new(values), &c.input, tol))?;
        emit(out, QfimlabReport { report })
    })
}

/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qfimlab_report_free(report: *mut QfimlabReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Matrix side length `M`, or 0 for a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qfimlab_report_dim(report: *const QfimlabReport) -> usize {
    report.as_ref().map_or(0, |r| r.report.eigenvalues.len())
}

/// Numerical rank, or 0 for a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qfimlab_report_rank(report: *const QfimlabReport) -> usize {
    report.as_ref().map_or(0, |r| r.report.rank)
}

/// # Safety
/// `buf` must be valid for `cap` writes.
unsafe fn copy_out(src: &[f64], buf: *mut f64, cap: usize) -> Result<(), (QfimlabStatus, String)> {
    if buf.is_null() {
        return Err(null("buffer"));
    }
    if cap < src.len() {
        return Err((QfimlabStatus::BufferTooSmall, format!("need {} entries, buffer holds {cap}", src.len())));
    }
    std::ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    Ok(())
}

/// Writes the `M` eigenvalues in descending order.
///
/// # Safety
/// `report` must be a live handle and `buf` valid for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn qfimlab_report_eigenvalues(report: *const QfimlabReport, buf: *mut f64, cap: usize) -> QfimlabStatus {
    guard(|| copy_out(&deref(report, "report")?.report.eigenvalues, buf, cap))
}

/// Writes the `M × M` matrix in row-major order.
///
/// # Safety
/// `report` must be a live handle and `buf` valid for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn qfimlab_report_matrix(report: *const QfimlabReport, buf: *mut f64, cap: usize) -> QfimlabStatus {
    guard(|| copy_out(deref(report, "report")?.report.matrix.data(), buf, cap))
}

/// Dimension of the dynamical Lie algebra of the circuit generators. With `sector` nonzero and
/// an HVA circuit, the closure is taken on the `X^{⊗n} = +1` sector that holds the input state.
///
/// # Safety
/// `circuit` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qfimlab_dla_dimension(circuit: *const QfimlabCircuit, sector: bool, out: *mut usize) -> QfimlabStatus {
    guard(|| {
        let c = deref(circuit, "circuit")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let basis = match (sector, c.hva_qubits) {
            (true, Some(n)) => lib(sector_lie_closure(c.circuit.generators(), &x_parity_sector(n, 1.0), None))?,
            (true, None) => return Err((QfimlabStatus::InvalidArgument, "sector closure needs an HVA circuit".into())),
            (false, _) => lib(lie_closure(c.circuit.generators(), None))?,
        };
        *out = basis.dim();
        Ok(())
    })
}
