//! C ABI over the `lrpe` crate.
//!
//! Every fallible call returns an [`LrpeStatus`]; on failure the message is
//! available from [`lrpe_last_error_message`] on the same thread. Matrices
//! are dense, row-major `double` buffers; complex results are split into
//! separate real and imaginary buffers. Handles are opaque and must be
//! released with [`lrpe_transform_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lrpe::attention::{lrpe_linear_attention as linear, vanilla_attention as vanilla, AttentionInput};
use lrpe::lrpe::{encode_positions, relative_matrix};
use lrpe::{EncodingSpec, LrpeError, Mat, PositionTransform};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LrpeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidSpec = 3,
    DimensionMismatch = 4,
    OffsetOutOfRange = 5,
    NegativePosition = 6,
    DegenerateNormalizer = 7,
    Unsupported = 8,
    Internal = 9,
}

/// Opaque encoding handle.
pub struct LrpeTransform {
    inner: PositionTransform,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("NULs removed"));
}

fn status_of(e: &LrpeError) -> LrpeStatus {
    match e {
        LrpeError::DimensionMismatch(_) => LrpeStatus::DimensionMismatch,
        LrpeError::InvalidSpec(_) => LrpeStatus::InvalidSpec,
        LrpeError::OffsetOutOfRange { .. } => LrpeStatus::OffsetOutOfRange,
        LrpeError::NegativePosition(_) => LrpeStatus::NegativePosition,
        LrpeError::DegenerateNormalizer { .. } => LrpeStatus::DegenerateNormalizer,
        LrpeError::Unsupported(_) | LrpeError::Fit(_) => LrpeStatus::Unsupported,
    }
}

enum Fail {
    Status(LrpeStatus, String),
    Lib(LrpeError),
}

impl From<LrpeError> for Fail {
    fn from(e: LrpeError) -> Self {
        Fail::Lib(e)
    }
}

fn null(what: &str) -> Fail {
    Fail::Status(LrpeStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, recording any error or panic for [`lrpe_last_error_message`].
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> LrpeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            LrpeStatus::Ok
        }
        Ok(Err(Fail::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            LrpeStatus::Internal
        }
    }
}

unsafe fn handle<'a>(h: *const LrpeTransform) -> Result<&'a PositionTransform, Fail> {
    h.as_ref().map(|t| &t.inner).ok_or_else(|| null("transform handle"))
}

unsafe fn input<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn output<'a>(p: *mut f64, len: usize, what: &str) -> Result<&'a mut [f64], Fail> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

/// Writes `m` to `re` (and `im`, zero-filled for real matrices). `im` may be
/// null only when `m` is real.
unsafe fn write_mat(m: &Mat, re: *mut f64, im: *mut f64) -> Result<(), Fail> {
    let len = m.rows() * m.cols();
    output(re, len, "out_re")?.copy_from_slice(m.re());
    match (m.im(), im.is_null()) {
        (Some(_), true) => {
            Err(Fail::Status(LrpeStatus::NullPointer, "out_im is null but the result is complex".into()))
        }
        (Some(src), false) => {
            output(im, len, "out_im")?.copy_from_slice(src);
            Ok(())
        }
        (None, false) => {
            output(im, len, "out_im")?.fill(0.0);
            Ok(())
        }
        (None, true) => Ok(()),
    }
}

/// Parses `spec` (e.g. `"orthogonal:householder:a:64:seed=7"`) and stores a
/// new handle in `*out`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lrpe_transform_new(spec: *const c_char, out: *mut *mut LrpeTransform) -> LrpeStatus {
    guard(|| {
        if spec.is_null() {
            return Err(null("spec"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(spec).to_str().map_err(|e| Fail::Status(LrpeStatus::InvalidUtf8, e.to_string()))?;
        let inner = text.parse::<EncodingSpec>()?.build()?;
        *out = Box::into_raw(Box::new(LrpeTransform { inner }));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `h` must come from [`lrpe_transform_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lrpe_transform_free(h: *mut LrpeTransform) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Model dimension `d`, or 0 for a null handle.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lrpe_transform_dim(h: *const LrpeTransform) -> usize {
    h.as_ref().map_or(0, |t| t.inner.dim())
}

/// Whether encoded vectors and `W_s` are complex.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lrpe_transform_is_complex(h: *const LrpeTransform) -> bool {
    h.as_ref().is_some_and(|t| t.inner.output_is_complex())
}

/// Copies the canonical spec string into `buf` (NUL-terminated, truncated
/// to `len`) and returns the full length excluding the NUL.
///
/// # Safety
/// `h` must be a live handle; `buf` must hold `len` bytes or be null.
#[no_mangle]
pub unsafe extern "C" fn lrpe_transform_spec(h: *const LrpeTransform, buf: *mut c_char, len: usize) -> usize {
    let Some(t) = h.as_ref() else {
        return 0;
    };
    let text = t.inner.spec().to_string();
    if !buf.is_null() && len > 0 {
        let n = text.len().min(len - 1);
        ptr::copy_nonoverlapping(text.as_ptr().cast::<c_char>(), buf, n);
        *buf.add(n) = 0;
    }
    text.len()
}

/// Encodes an `n × d` sequence: row `s` becomes `Λ^(s) P x_s`. `out_im`
/// may be null for real families.
///
/// # Safety
/// `x`, `out_re` (and `out_im` when non-null) must hold `n·d` doubles.
#[no_mangle]
pub unsafe extern "C" fn lrpe_encode(
    h: *const LrpeTransform,
    x: *const f64,
    n: usize,
    d: usize,
    out_re: *mut f64,
    out_im: *mut f64,
) -> LrpeStatus {
    guard(|| {
        let t = handle(h)?;
        let x = Mat::from_real(n, d, input(x, n * d, "x")?.to_vec())?;
        write_mat(&encode_positions(t, &x)?, out_re, out_im)
    })
}

/// Dense `W_s = Pᴴ Λ^(s) P`, `d × d`.
///
/// # Safety
/// `out_re` (and `out_im` when non-null) must hold `d·d` doubles.
#[no_mangle]
pub unsafe extern "C" fn lrpe_materialize(
    h: *const LrpeTransform,
    s: usize,
    out_re: *mut f64,
    out_im: *mut f64,
) -> LrpeStatus {
    guard(|| write_mat(&handle(h)?.materialize(s)?, out_re, out_im))
}

/// `W_r` evaluated through anchor `a ≥ 0`, `d × d`.
///
/// # Safety
/// `out_re` (and `out_im` when non-null) must hold `d·d` doubles.
#[no_mangle]
pub unsafe extern "C" fn lrpe_relative_matrix(
    h: *const LrpeTransform,
    r: i64,
    anchor: i64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> LrpeStatus {
    guard(|| write_mat(&relative_matrix(handle(h)?, r, anchor)?, out_re, out_im))
}

#[allow(clippy::too_many_arguments)]
unsafe fn attention(
    h: *const LrpeTransform,
    q: *const f64,
    k: *const f64,
    v: *const f64,
    n: usize,
    d: usize,
    dv: usize,
    causal: bool,
    out: *mut f64,
    softmax: bool,
) -> LrpeStatus {
    guard(|| {
        let q = Mat::from_real(n, d, input(q, n * d, "q")?.to_vec())?;
        let k = Mat::from_real(n, d, input(k, n * d, "k")?.to_vec())?;
        let v = Mat::from_real(n, dv, input(v, n * dv, "v")?.to_vec())?;
        let mut inp = AttentionInput::new(&q, &k, &v).causal(causal);
        let result = if softmax {
            vanilla(&inp)?
        } else {
            let encoding = h.as_ref().map(|t| &t.inner);
            if let Some(t) = encoding {
                inp = inp.with_encoding(t);
            }
            linear(&inp)?
        };
        output(out, n * dv, "out")?.copy_from_slice(result.o.re());
        Ok(())
    })
}

/// Linear attention with `φ = 1 + elu`, encoded by `h` (null for no
/// encoding). `O` is `n × dv`.
///
/// # Safety
/// `q`, `k` hold `n·d` doubles; `v` and `out` hold `n·dv` doubles.
#[no_mangle]
pub unsafe extern "C" fn lrpe_linear_attention(
    h: *const LrpeTransform,
    q: *const f64,
    k: *const f64,
    v: *const f64,
    n: usize,
    d: usize,
    dv: usize,
    causal: bool,
    out: *mut f64,
) -> LrpeStatus {
    attention(h, q, k, v, n, d, dv, causal, out, false)
}

/// Softmax attention, `O(n²d)`.
///
/// # Safety
/// `q`, `k` hold `n·d` doubles; `v` and `out` hold `n·dv` doubles.
#[no_mangle]
pub unsafe extern "C" fn lrpe_vanilla_attention(
    q: *const f64,
    k: *const f64,
    v: *const f64,
    n: usize,
    d: usize,
    dv: usize,
    causal: bool,
    out: *mut f64,
) -> LrpeStatus {
    attention(ptr::null(), q, k, v, n, d, dv, causal, out, true)
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn lrpe_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lrpe_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
