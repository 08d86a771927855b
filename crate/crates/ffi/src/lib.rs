//! C ABI over `fq-core`.
//!
//! Every fallible function returns an [`FqStatus`] and writes its result
//! through an out-pointer. Objects are opaque handles created by `*_new` and
//! released by the matching `*_free`; freeing a null handle is a no-op. The
//! detail text of the most recent failure on the calling thread is available
//! from [`fq_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use fq_core::hash::{BitString, HashParams};
use fq_core::lookup::LookupTables;
use fq_core::prng::{linear_complexity, star_discrepancy_1d, ExpSumSpec};
use fq_core::{FqContext as CoreContext, FqError, QuotientTable};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FqStatus {
    Ok = 0,
    NotPrime = 1,
    ModulusOutOfRange = 2,
    MissingPrimitiveRoot = 3,
    BadParameter = 4,
    NotCoprime = 5,
    BadCoefficients = 6,
    TooLong = 7,
    DimensionUnsupported = 8,
    ParamRange = 9,
    CacheCorrupt = 10,
    Io = 11,
    Json = 12,
    NullPointer = 13,
    Panic = 14,
}

impl From<&FqError> for FqStatus {
    fn from(err: &FqError) -> Self {
        match err {
            FqError::NotPrime(_) => FqStatus::NotPrime,
            FqError::ModulusOutOfRange(_) => FqStatus::ModulusOutOfRange,
            FqError::MissingPrimitiveRoot(_) => FqStatus::MissingPrimitiveRoot,
            FqError::BadParameter(_) => FqStatus::BadParameter,
            FqError::NotCoprime { .. } => FqStatus::NotCoprime,
            FqError::BadCoefficients(_) => FqStatus::BadCoefficients,
            FqError::TooLong { .. } => FqStatus::TooLong,
            FqError::DimensionUnsupported(_) => FqStatus::DimensionUnsupported,
            FqError::ParamRange(_) => FqStatus::ParamRange,
            FqError::CacheCorrupt(_) => FqStatus::CacheCorrupt,
            FqError::Io(_) => FqStatus::Io,
            FqError::Json(_) => FqStatus::Json,
        }
    }
}

/// Prime modulus with an optional primitive root.
pub struct FqContext {
    inner: CoreContext,
}

/// Full table `q_p(0..p-1)`.
pub struct FqTable {
    inner: QuotientTable,
}

/// Trade-off tables for single queries.
pub struct FqLookup {
    inner: LookupTables,
}

/// Hash parameters (`n`, `r`, primes, start value).
pub struct FqHashParams {
    inner: HashParams,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct FqGraphStats {
    pub p: u64,
    /// Fixed points other than 0.
    pub fixed_points_excl0: u64,
    pub fixed_points_incl0: u64,
    pub image_size: u64,
    /// Nodes on cycles, including the fixed point 0.
    pub cyclic_count: u64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct FqOrbit {
    /// Number of distinct values visited.
    pub rho: u64,
    /// Tail length before the cycle.
    pub mu: u64,
    pub cycle_len: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(err: FqError) -> FqStatus {
    let status = FqStatus::from(&err);
    set_last_error(err.to_string());
    status
}

fn null_pointer(what: &str) -> FqStatus {
    set_last_error(format!("{what} is null"));
    FqStatus::NullPointer
}

/// Runs `f`, converting panics into [`FqStatus::Panic`].
fn guard<F: FnOnce() -> FqStatus>(f: F) -> FqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(msg);
            FqStatus::Panic
        }
    }
}

macro_rules! deref {
    ($ptr:expr, $name:literal) => {
        match unsafe { $ptr.as_ref() } {
            Some(r) => r,
            None => return null_pointer($name),
        }
    };
}

macro_rules! out {
    ($ptr:expr, $name:literal) => {
        match unsafe { $ptr.as_mut() } {
            Some(r) => r,
            None => return null_pointer($name),
        }
    };
}

macro_rules! try_fq {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(err) => return fail(err),
        }
    };
}

fn boxed<T>(value: T, out: &mut *mut T) -> FqStatus {
    *out = Box::into_raw(Box::new(value));
    FqStatus::Ok
}

/// Static description of a status code. Never null.
#[no_mangle]
pub extern "C" fn fq_status_message(status: FqStatus) -> *const c_char {
    let s: &'static CStr = match status {
        FqStatus::Ok => c"ok",
        FqStatus::NotPrime => c"modulus is not an odd prime",
        FqStatus::ModulusOutOfRange => c"modulus outside [3, 2^31)",
        FqStatus::MissingPrimitiveRoot => c"context has no primitive root",
        FqStatus::BadParameter => c"bad parameter",
        FqStatus::NotCoprime => c"argument is not coprime to p",
        FqStatus::BadCoefficients => c"coefficients vanish modulo p",
        FqStatus::TooLong => c"sum length exceeds the cap",
        FqStatus::DimensionUnsupported => c"dimension not supported",
        FqStatus::ParamRange => c"hash parameter out of range",
        FqStatus::CacheCorrupt => c"cache is corrupt",
        FqStatus::Io => c"I/O error",
        FqStatus::Json => c"JSON error",
        FqStatus::NullPointer => c"null pointer argument",
        FqStatus::Panic => c"internal error",
    };
    s.as_ptr()
}

/// Detail message of the last failure on this thread, or null if none.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fq_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Creates a context for the odd prime `p < 2^31`. With `want_primitive_root`
/// the smallest primitive root is found, which table generation requires.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fq_context_new(
    p: u64,
    want_primitive_root: bool,
    out: *mut *mut FqContext,
) -> FqStatus {
    guard(|| {
        let out = out!(out, "out");
        let inner = try_fq!(CoreContext::new(p, want_primitive_root));
        boxed(FqContext { inner }, out)
    })
}

/// # Safety
/// `ctx` must be null or a handle from [`fq_context_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fq_context_free(ctx: *mut FqContext) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

/// The modulus of `ctx`, or 0 if `ctx` is null.
///
/// # Safety
/// `ctx` must be null or a live context handle.
#[no_mangle]
pub unsafe extern "C" fn fq_context_p(ctx: *const FqContext) -> u64 {
    ctx.as_ref().map_or(0, |c| c.inner.p())
}

/// `q_p(u)` for any signed `u`.
///
/// # Safety
/// `ctx` must be a live context handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fq_eval(ctx: *const FqContext, u: i64, out: *mut u32) -> FqStatus {
    guard(|| {
        let ctx = deref!(ctx, "ctx");
        *out!(out, "out") = ctx.inner.eval(u).0;
        FqStatus::Ok
    })
}

/// Smallest `u >= 1` with `q_p(u) != 0`.
///
/// # Safety
/// `ctx` must be a live context handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fq_lp(ctx: *const FqContext, out: *mut u64) -> FqStatus {
    guard(|| {
        let ctx = deref!(ctx, "ctx");
        *out!(out, "out") = ctx.inner.smallest_nonzero();
        FqStatus::Ok
    })
}

/// Builds the full table. The context must carry a primitive root.
///
/// # Safety
/// `ctx` must be a live context handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fq_table_new(ctx: *const FqContext, out: *mut *mut FqTable) -> FqStatus {
    guard(|| {
        let ctx = deref!(ctx, "ctx");
        let out = out!(out, "out");
        let inner = try_fq!(fq_core::generate_table(&ctx.inner));
        boxed(FqTable { inner }, out)
    })
}

/// # Safety
/// `table` must be null or a handle from [`fq_table_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fq_table_free(table: *mut FqTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Number of entries (`p`), or 0 if `table` is null.
///
/// # Safety
/// `table` must be null or a live table handle.
#[no_mangle]
pub unsafe extern "C" fn fq_table_len(table: *const FqTable) -> usize {
    table.as_ref().map_or(0, |t| t.inner.len())
}

/// Borrowed view of the `p` values, valid while `table` lives; null if
/// `table` is null.
///
/// # Safety
/// `table` must be null or a live table handle.
#[no_mangle]
pub unsafe extern "C" fn fq_table_values(table: *const FqTable) -> *const u32 {
    table
        .as_ref()
        .map_or(ptr::null(), |t| t.inner.values().as_ptr())
}

/// # Safety
/// `table` must be a live table handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fq_table_get(table: *const FqTable, u: u64, out: *mut u32) -> FqStatus {
    guard(|| {
        let table = deref!(table, "table");
        let out = out!(out, "out");
        if u >= table.inner.p() {
            return fail(FqError::BadParameter(format!(
                "index {u} outside [0, {})",
                table.inner.p()
            )));
        }
        *out = table.inner.get(u).0;
        FqStatus::Ok
    })
}

/// # Safety
/// `table` must be a live table handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fq_graph_stats(table: *const FqTable, out: *mut FqGraphStats) -> FqStatus {
    guard(|| {
        let table = deref!(table, "table");
        let s = fq_core::graph_stats(&table.inner);
        *out!(out, "out") = FqGraphStats {
            p: s.p,
            fixed_points_excl0: s.fixed_points_excl0,
            fixed_points_incl0: s.fixed_points_incl0,
            image_size: s.image_size,
            cyclic_count: s.cyclic_count,
        };
        FqStatus::Ok
    })
}

/// Orbit of `u0` in `[0, p)`. `table` may be null, in which case values are
/// computed on the fly with Brent's cycle finder.
///
/// # Safety
/// `ctx` must be a live context handle, `table` null or a live table handle,
/// and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fq_orbit(
    ctx: *const FqContext,
    table: *const FqTable,
    u0: u64,
    out: *mut FqOrbit,
) -> FqStatus {
    guard(|| {
        let ctx = deref!(ctx, "ctx");
        let out = out!(out, "out");
        let table = table.as_ref().map(|t| &t.inner);
        let o = try_fq!(fq_core::orbit(&ctx.inner, u0, table));
        *out = FqOrbit {
            rho: o.rho,
            mu: o.mu,
            cycle_len: o.cycle_len,
        };
        FqStatus::Ok
    })
}

/// Precomputes the trade-off tables for `2 <= z < p`.
///
/// # Safety
/// `ctx` must be a live context handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fq_lookup_new(
    ctx: *const FqContext,
    z: f64,
    out: *mut *mut FqLookup,
) -> FqStatus {
    guard(|| {
        let ctx = deref!(ctx, "ctx");
        let out = out!(out, "out");
        let inner = try_fq!(fq_core::build_lookup(&ctx.inner, z));
        boxed(FqLookup { inner }, out)
    })
}

/// # Safety
/// `lookup` must be null or a handle from [`fq_lookup_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fq_lookup_free(lookup: *mut FqLookup) {
    if !lookup.is_null() {
        drop(Box::from_raw(lookup));
    }
}

/// `q_p(u)` for `u` in `[0, p)` from the trade-off tables.
///
/// # Safety
/// `lookup` must be a live lookup handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fq_lookup_query(
    lookup: *const FqLookup,
    u: u64,
    out: *mut u32,
) -> FqStatus {
    guard(|| {
        let lookup = deref!(lookup, "lookup");
        let out = out!(out, "out");
        if u >= lookup.inner.p() {
            return fail(FqError::BadParameter(format!(
                "u = {u} outside [0, {})",
                lookup.inner.p()
            )));
        }
        *out = fq_core::qp_lookup(&lookup.inner, u).0;
        FqStatus::Ok
    })
}

/// Writes `u = v / w (mod p)` with `0 < v < p/z` and `0 < |w| <= z`.
///
/// # Safety
/// `v` and `w` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn fq_rational_reconstruct(
    p: u64,
    z: f64,
    u: u64,
    v: *mut u64,
    w: *mut i64,
) -> FqStatus {
    guard(|| {
        let v = out!(v, "v");
        let w = out!(w, "w");
        let pair = try_fq!(fq_core::rational_reconstruct(p, z, u));
        *v = pair.v;
        *w = pair.w;
        FqStatus::Ok
    })
}

/// Linear complexity of `seq[0..len]` over `F_p` (values are reduced mod `p`).
///
/// # Safety
/// `seq` must point to `len` readable values (or be null with `len == 0`)
/// and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fq_linear_complexity(
    seq: *const u64,
    len: usize,
    p: u64,
    out: *mut usize,
) -> FqStatus {
    guard(|| {
        let out = out!(out, "out");
        if !fq_core::arith::is_prime(p) {
            return fail(FqError::NotPrime(p));
        }
        let values = if len == 0 {
            &[][..]
        } else if seq.is_null() {
            return null_pointer("seq");
        } else {
            slice::from_raw_parts(seq, len)
        };
        *out = linear_complexity(values, p).complexity;
        FqStatus::Ok
    })
}

/// `|sum_{u=m+1}^{m+n} e_p(a_0 q_p(u) + ... + a_{s-1} q_p(u+s-1))|`.
/// The context must carry a primitive root.
///
/// # Safety
/// `ctx` must be a live context handle, `a` must point to `s` readable
/// coefficients and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fq_exp_sum(
    ctx: *const FqContext,
    m: i64,
    n: u64,
    a: *const i64,
    s: usize,
    out: *mut f64,
) -> FqStatus {
    guard(|| {
        let ctx = deref!(ctx, "ctx");
        let out = out!(out, "out");
        if a.is_null() && s > 0 {
            return null_pointer("a");
        }
        let a = if s == 0 {
            Vec::new()
        } else {
            slice::from_raw_parts(a, s).to_vec()
        };
        let spec = ExpSumSpec { m, n, a };
        *out = try_fq!(fq_core::prng::exp_sum(&ctx.inner, &spec));
        FqStatus::Ok
    })
}

/// Exact star discrepancy of `len` points in `[0, 1)`.
///
/// # Safety
/// `points` must point to `len` readable values and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fq_star_discrepancy_1d(
    points: *const f64,
    len: usize,
    out: *mut f64,
) -> FqStatus {
    guard(|| {
        let out = out!(out, "out");
        if points.is_null() {
            return null_pointer("points");
        }
        *out = try_fq!(star_discrepancy_1d(slice::from_raw_parts(points, len)));
        FqStatus::Ok
    })
}

/// Derives hash parameters from a seed; `8 <= n <= 31`, `1 <= r <= 8`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fq_hash_keygen(
    seed: u64,
    n: u32,
    r: u32,
    out: *mut *mut FqHashParams,
) -> FqStatus {
    guard(|| {
        let out = out!(out, "out");
        let inner = try_fq!(fq_core::keygen(seed, n, r));
        boxed(FqHashParams { inner }, out)
    })
}

/// Parses and validates hash parameters from a NUL-terminated JSON string.
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fq_hash_params_from_json(
    json: *const c_char,
    out: *mut *mut FqHashParams,
) -> FqStatus {
    guard(|| {
        let out = out!(out, "out");
        if json.is_null() {
            return null_pointer("json");
        }
        let text = match CStr::from_ptr(json).to_str() {
            Ok(t) => t,
            Err(e) => return fail(FqError::BadParameter(e.to_string())),
        };
        let inner: HashParams = try_fq!(serde_json::from_str(text).map_err(FqError::from));
        try_fq!(inner.validate());
        boxed(FqHashParams { inner }, out)
    })
}

/// # Safety
/// `params` must be null or a live hash-parameter handle.
#[no_mangle]
pub unsafe extern "C" fn fq_hash_params_free(params: *mut FqHashParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Output width `n` in bits, or 0 if `params` is null.
///
/// # Safety
/// `params` must be null or a live hash-parameter handle.
#[no_mangle]
pub unsafe extern "C" fn fq_hash_params_n(params: *const FqHashParams) -> u32 {
    params.as_ref().map_or(0, |h| h.inner.n)
}

/// Digest of `len` bytes, read most significant bit first.
///
/// # Safety
/// `params` must be a live hash-parameter handle, `bytes` must point to
/// `len` readable bytes (or be null with `len == 0`) and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fq_hash_digest(
    params: *const FqHashParams,
    bytes: *const u8,
    len: usize,
    out: *mut u32,
) -> FqStatus {
    guard(|| {
        let params = deref!(params, "params");
        let out = out!(out, "out");
        let data = if len == 0 {
            &[][..]
        } else if bytes.is_null() {
            return null_pointer("bytes");
        } else {
            slice::from_raw_parts(bytes, len)
        };
        *out = fq_core::digest(&params.inner, &BitString::from_bytes(data)).0;
        FqStatus::Ok
    })
}
