//! C ABI over the homosyntax generator.
//!
//! Resources are held behind an opaque handle. Every fallible call returns an
//! [`HsStatus`]; the message of the most recent failure on the calling thread
//! is available from [`hs_last_error`]. Strings returned through out-pointers
//! are owned by the caller and must be released with [`hs_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use homosyntax::generate::{generate, GenerateOptions, Model};
use homosyntax::markov::DecodePolicy;
use homosyntax::model3::ScoreDirection;
use homosyntax::{Error, Resources};

/// Loaded generation resources. Opaque to C.
pub struct HsResources {
    inner: Resources,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HsStatus {
    Ok = 0,
    /// A required pointer was null or a string was not valid UTF-8.
    InvalidArgument = 1,
    /// A resource file is missing or unreadable.
    Io = 2,
    /// A resource file is malformed.
    Format = 3,
    /// The request was rejected, e.g. a length outside 3..=15.
    Config = 4,
    /// The query is not in the embedding vocabulary.
    Oov = 5,
    /// Generation was attempted and failed.
    Generation = 6,
    /// An internal panic was caught at the boundary.
    Panic = 7,
    Other = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct HsGenerateOptions {
    /// 1, 2 or 3.
    pub model: u8,
    /// Sentence length in tokens, 3..=15.
    pub length: u32,
    pub seed: u64,
    /// Skeleton decoding: 0 samples among the top `top_k` successors, 1 takes the argmax.
    pub argmax: u8,
    pub top_k: u32,
    /// Neighbor list size for Model 1 relaxation.
    pub neighbors: u32,
    pub max_hops: u32,
    /// Candidate cap for Model 3.
    pub cap_m: u32,
    /// Nonzero selects the inverted Model 3 score.
    pub invert_score: u8,
    pub max_attempts: u32,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> HsStatus {
    match e.root() {
        Error::Io { .. } => HsStatus::Io,
        Error::Format { .. } | Error::Tag(_) => HsStatus::Format,
        Error::Config(_) => HsStatus::Config,
        Error::Oov(_) => HsStatus::Oov,
        Error::Generation { .. }
        | Error::Dict(_)
        | Error::Relaxation { .. }
        | Error::Table(_)
        | Error::EmptyRank { .. }
        | Error::DegenerateScore(_)
        | Error::EmptyStore => HsStatus::Generation,
        _ => HsStatus::Other,
    }
}

struct Fail(HsStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn invalid(msg: &str) -> Fail {
    Fail(HsStatus::InvalidArgument, msg.to_string())
}

/// Runs `f` behind the boundary: panics and errors become a status plus a
/// thread-local message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> HsStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HsStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(format!("internal panic: {msg}"));
            HsStatus::Panic
        }
    }
}

/// # Safety
/// `p` must be null or point to a NUL-terminated string.
unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(invalid(&format!("{name} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| invalid(&format!("{name} is not UTF-8")))
}

/// # Safety
/// `h` must be null or a handle from [`hs_resources_load`] not yet freed.
unsafe fn handle<'a>(h: *const HsResources) -> Result<&'a Resources, Fail> {
    h.as_ref().map(|r| &r.inner).ok_or_else(|| invalid("resources handle is null"))
}

/// # Safety
/// `out` must be null or valid for a pointer write.
unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(invalid("output pointer is null"));
    }
    let c = CString::new(s).map_err(|_| Fail(HsStatus::Other, "output contains a NUL byte".into()))?;
    *out = c.into_raw();
    Ok(())
}

fn to_options(o: &HsGenerateOptions) -> Result<(Model, usize, u64, GenerateOptions), Fail> {
    let model = Model::try_from(o.model).map_err(|e| Fail(HsStatus::Config, e.to_string()))?;
    let policy = match (o.argmax, o.top_k) {
        (0, 0) => return Err(Fail(HsStatus::Config, "top_k must be at least 1".into())),
        (0, k) => DecodePolicy::TopK(k as usize),
        _ => DecodePolicy::Argmax,
    };
    let opts = GenerateOptions {
        neighbor_count: o.neighbors as usize,
        max_hops: o.max_hops as usize,
        policy,
        cap_m: o.cap_m as usize,
        direction: if o.invert_score != 0 { ScoreDirection::Inverted } else { ScoreDirection::Printed },
        max_attempts: o.max_attempts as usize,
    };
    Ok((model, o.length as usize, o.seed, opts))
}

/// Default options: Model 3, length 8, seed 0, top-3 decoding.
#[no_mangle]
pub extern "C" fn hs_generate_options_default() -> HsGenerateOptions {
    let d = GenerateOptions::default();
    let (argmax, top_k) = match d.policy {
        DecodePolicy::Argmax => (1, 0),
        DecodePolicy::TopK(k) => (0, k as u32),
    };
    HsGenerateOptions {
        model: 3,
        length: 8,
        seed: 0,
        argmax,
        top_k,
        neighbors: d.neighbor_count as u32,
        max_hops: d.max_hops as u32,
        cap_m: d.cap_m as u32,
        invert_score: u8::from(d.direction == ScoreDirection::Inverted),
        max_attempts: d.max_attempts as u32,
    }
}

/// Loads a resource directory into `*out`.
///
/// # Safety
/// `dir` must be a NUL-terminated string and `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn hs_resources_load(dir: *const c_char, out: *mut *mut HsResources) -> HsStatus {
    guard(|| {
        if out.is_null() {
            return Err(invalid("output pointer is null"));
        }
        *out = ptr::null_mut();
        let dir = str_arg(dir, "dir")?;
        let inner = Resources::load_dir(Path::new(dir))?;
        *out = Box::into_raw(Box::new(HsResources { inner }));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `h` must be null or a handle from [`hs_resources_load`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hs_resources_free(h: *mut HsResources) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// # Safety
/// Same contract as [`hs_generate`].
unsafe fn generate_into(
    h: *const HsResources,
    query: *const c_char,
    opts: *const HsGenerateOptions,
    out: *mut *mut c_char,
    as_json: bool,
) -> HsStatus {
    guard(|| {
        if !out.is_null() {
            *out = ptr::null_mut();
        }
        let res = handle(h)?;
        let query = str_arg(query, "query")?;
        let opts = opts.as_ref().copied().unwrap_or_else(|| hs_generate_options_default());
        let (model, n, seed, opts) = to_options(&opts)?;
        let g = generate(model, query, n, res, seed, &opts)?;
        let s = if as_json {
            serde_json::to_string(&g).map_err(|e| Fail(HsStatus::Other, e.to_string()))?
        } else {
            g.text
        };
        put_string(out, s)
    })
}

/// Generates one sentence and writes its text to `*out`. `opts` may be null
/// for the defaults.
///
/// # Safety
/// `h` must be a live handle, `query` a NUL-terminated string, `opts` null or
/// valid, and `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn hs_generate(
    h: *const HsResources,
    query: *const c_char,
    opts: *const HsGenerateOptions,
    out: *mut *mut c_char,
) -> HsStatus {
    generate_into(h, query, opts, out, false)
}

/// Like [`hs_generate`] but writes the full result, per-slot trace included,
/// as a JSON object.
///
/// # Safety
/// Same contract as [`hs_generate`].
#[no_mangle]
pub unsafe extern "C" fn hs_generate_trace(
    h: *const HsResources,
    query: *const c_char,
    opts: *const HsGenerateOptions,
    out: *mut *mut c_char,
) -> HsStatus {
    generate_into(h, query, opts, out, true)
}

/// Writes the proximity of two vocabulary words, in [0, 1], to `*out`.
///
/// # Safety
/// `h` must be a live handle, `a` and `b` NUL-terminated strings, `out` valid
/// for a write.
#[no_mangle]
pub unsafe extern "C" fn hs_proximity(
    h: *const HsResources,
    a: *const c_char,
    b: *const c_char,
    out: *mut f64,
) -> HsStatus {
    guard(|| {
        let res = handle(h)?;
        let (a, b) = (str_arg(a, "a")?, str_arg(b, "b")?);
        if out.is_null() {
            return Err(invalid("output pointer is null"));
        }
        *out = res.store.proximity(a, b)?;
        Ok(())
    })
}

/// Writes the `m` nearest neighbors of `word` as a JSON array of
/// `[word, proximity]` pairs.
///
/// # Safety
/// `h` must be a live handle, `word` a NUL-terminated string, `out` valid for
/// a pointer write.
#[no_mangle]
pub unsafe extern "C" fn hs_neighbors_json(
    h: *const HsResources,
    word: *const c_char,
    m: u32,
    out: *mut *mut c_char,
) -> HsStatus {
    guard(|| {
        if !out.is_null() {
            *out = ptr::null_mut();
        }
        let res = handle(h)?;
        let word = str_arg(word, "word")?;
        let lex = res.store.neighbors(word, m as usize)?;
        let json = serde_json::to_string(&lex.entries).map_err(|e| Fail(HsStatus::Other, e.to_string()))?;
        put_string(out, json)
    })
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn hs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
