//! C ABI for the tracker: opaque handles, status codes, and plain-old-data
//! frame reports. The header is generated into `include/mscf.h` at build
//! time.
//!
//! Ownership rules: every `*_new`/`*_load`/`*_init` hands the caller an
//! opaque pointer that must be released with the matching `*_free`. Handles
//! are not thread-safe; confine each to one thread at a time.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use mscf::config::MscfConfig;
use mscf::error::MscfError;
use mscf::features::{CnTable, Image};
use mscf::geometry::BoundingBox;
use mscf::tracker::{self, TrackerState};

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MscfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ConfigError = 3,
    IoError = 4,
    ParseError = 5,
    DegenerateResponse = 6,
    Utf8Error = 7,
    Panic = 8,
}

/// Axis-aligned box; (x, y) is the top-left corner in pixels.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MscfRect {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

/// Per-frame tracking output.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MscfFrameReport {
    pub rect: MscfRect,
    pub response_max: f64,
    pub mtf: f64,
    pub trained: bool,
    pub elapsed_seconds: f64,
}

/// Opaque tracker configuration.
pub struct MscfConfigHandle {
    inner: MscfConfig,
}

/// Opaque color-names lookup table.
pub struct MscfCnTableHandle {
    inner: Arc<CnTable>,
}

/// Opaque per-sequence tracker state.
pub struct MscfTrackerHandle {
    inner: TrackerState,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_last_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(err: &MscfError) -> MscfStatus {
    match err {
        MscfError::InvalidArgument(_) => MscfStatus::InvalidArgument,
        MscfError::Config(_) => MscfStatus::ConfigError,
        MscfError::Io { .. } => MscfStatus::IoError,
        MscfError::Parse { .. } => MscfStatus::ParseError,
        MscfError::DegenerateResponse(_) => MscfStatus::DegenerateResponse,
    }
}

fn fail(err: &MscfError) -> MscfStatus {
    set_last_error(err.to_string());
    status_of(err)
}

fn guard(f: impl FnOnce() -> MscfStatus + std::panic::UnwindSafe) -> MscfStatus {
    match catch_unwind(f) {
        Ok(status) => status,
        Err(_) => {
            set_last_error("internal panic");
            MscfStatus::Panic
        }
    }
}

unsafe fn cstr<'a>(ptr: *const c_char) -> Result<&'a str, MscfStatus> {
    if ptr.is_null() {
        set_last_error("null string pointer");
        return Err(MscfStatus::NullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_last_error("string is not valid UTF-8");
        MscfStatus::Utf8Error
    })
}

unsafe fn frame_from_raw(
    pixels: *const u8,
    width: usize,
    height: usize,
) -> Result<Image, MscfStatus> {
    if pixels.is_null() {
        set_last_error("null frame pointer");
        return Err(MscfStatus::NullPointer);
    }
    let len = width * height * 3;
    let data = std::slice::from_raw_parts(pixels, len).to_vec();
    Image::new(width, height, data).map_err(|e| fail(&e))
}

fn rect_to_box(rect: &MscfRect) -> Result<BoundingBox, MscfStatus> {
    BoundingBox::new(rect.x, rect.y, rect.w, rect.h).map_err(|e| fail(&e))
}

/// Copies the last error message of this thread into `buf` (truncated,
/// always NUL-terminated) and returns the full message length.
///
/// # Safety
/// `buf` must point to `len` writable bytes, or be null (query mode).
#[no_mangle]
pub unsafe extern "C" fn mscf_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Creates a configuration with the reference defaults.
#[no_mangle]
pub extern "C" fn mscf_config_new() -> *mut MscfConfigHandle {
    Box::into_raw(Box::new(MscfConfigHandle {
        inner: MscfConfig::default(),
    }))
}

/// Loads a configuration file (flat `key = value` lines).
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mscf_config_load(
    path: *const c_char,
    out: *mut *mut MscfConfigHandle,
) -> MscfStatus {
    guard(AssertUnwindSafe(|| {
        if out.is_null() {
            set_last_error("null output pointer");
            return MscfStatus::NullPointer;
        }
        let path = match cstr(path) {
            Ok(p) => p,
            Err(s) => return s,
        };
        match MscfConfig::load(std::path::Path::new(path)) {
            Ok(cfg) => {
                *out = Box::into_raw(Box::new(MscfConfigHandle { inner: cfg }));
                MscfStatus::Ok
            }
            Err(e) => fail(&e),
        }
    }))
}

/// Sets one configuration key from its textual form, e.g. ("lambda1", "20").
///
/// # Safety
/// All pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn mscf_config_set(
    cfg: *mut MscfConfigHandle,
    key: *const c_char,
    value: *const c_char,
) -> MscfStatus {
    guard(AssertUnwindSafe(|| {
        let Some(handle) = cfg.as_mut() else {
            set_last_error("null config handle");
            return MscfStatus::NullPointer;
        };
        let (key, value) = match (cstr(key), cstr(value)) {
            (Ok(k), Ok(v)) => (k, v),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        let mut text = handle.inner.to_config_string();
        text.push_str(&format!("{key} = {value}\n"));
        match MscfConfig::from_config_str(&text) {
            Ok(cfg) => {
                handle.inner = cfg;
                MscfStatus::Ok
            }
            Err(e) => fail(&e),
        }
    }))
}

/// # Safety
/// `cfg` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn mscf_config_free(cfg: *mut MscfConfigHandle) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Loads a color-names table (little-endian f32, 32768 x 10).
///
/// # Safety
/// `path` must be NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mscf_cn_table_load(
    path: *const c_char,
    out: *mut *mut MscfCnTableHandle,
) -> MscfStatus {
    guard(AssertUnwindSafe(|| {
        if out.is_null() {
            set_last_error("null output pointer");
            return MscfStatus::NullPointer;
        }
        let path = match cstr(path) {
            Ok(p) => p,
            Err(s) => return s,
        };
        match CnTable::load(std::path::Path::new(path)) {
            Ok(table) => {
                *out = Box::into_raw(Box::new(MscfCnTableHandle {
                    inner: Arc::new(table),
                }));
                MscfStatus::Ok
            }
            Err(e) => fail(&e),
        }
    }))
}

/// # Safety
/// `table` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn mscf_cn_table_free(table: *mut MscfCnTableHandle) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Initializes a tracker on the first frame. `frame` is row-major 8-bit RGB
/// (`width * height * 3` bytes); `cn` may be null to track without
/// color-names channels; the config is copied and may be freed afterwards.
///
/// # Safety
/// `frame` must point to the full pixel buffer; handles must be valid.
#[no_mangle]
pub unsafe extern "C" fn mscf_tracker_init(
    frame: *const u8,
    width: usize,
    height: usize,
    rect: MscfRect,
    cfg: *const MscfConfigHandle,
    cn: *const MscfCnTableHandle,
    out: *mut *mut MscfTrackerHandle,
) -> MscfStatus {
    guard(AssertUnwindSafe(|| {
        if out.is_null() {
            set_last_error("null output pointer");
            return MscfStatus::NullPointer;
        }
        let Some(cfg) = cfg.as_ref() else {
            set_last_error("null config handle");
            return MscfStatus::NullPointer;
        };
        let image = match frame_from_raw(frame, width, height) {
            Ok(img) => img,
            Err(s) => return s,
        };
        let bbox = match rect_to_box(&rect) {
            Ok(b) => b,
            Err(s) => return s,
        };
        let cn = cn.as_ref().map(|t| t.inner.clone());
        match tracker::init(&image, bbox, cfg.inner.clone(), cn) {
            Ok(state) => {
                *out = Box::into_raw(Box::new(MscfTrackerHandle { inner: state }));
                MscfStatus::Ok
            }
            Err(e) => fail(&e),
        }
    }))
}

/// Advances the tracker by one frame and fills `report`.
///
/// # Safety
/// `tracker` must be a live handle; `frame` the full pixel buffer; `report`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn mscf_tracker_track(
    tracker: *mut MscfTrackerHandle,
    frame: *const u8,
    width: usize,
    height: usize,
    report: *mut MscfFrameReport,
) -> MscfStatus {
    guard(AssertUnwindSafe(|| {
        let Some(handle) = tracker.as_mut() else {
            set_last_error("null tracker handle");
            return MscfStatus::NullPointer;
        };
        if report.is_null() {
            set_last_error("null report pointer");
            return MscfStatus::NullPointer;
        }
        let image = match frame_from_raw(frame, width, height) {
            Ok(img) => img,
            Err(s) => return s,
        };
        match tracker::track(&mut handle.inner, &image) {
            Ok(r) => {
                *report = MscfFrameReport {
                    rect: MscfRect {
                        x: r.bbox.x,
                        y: r.bbox.y,
                        w: r.bbox.w,
                        h: r.bbox.h,
                    },
                    response_max: r.response_max,
                    mtf: r.mtf,
                    trained: r.trained,
                    elapsed_seconds: r.elapsed,
                };
                MscfStatus::Ok
            }
            Err(e) => fail(&e),
        }
    }))
}

/// Reads the current box without advancing the tracker.
///
/// # Safety
/// `tracker` must be a live handle; `rect` writable.
#[no_mangle]
pub unsafe extern "C" fn mscf_tracker_box(
    tracker: *const MscfTrackerHandle,
    rect: *mut MscfRect,
) -> MscfStatus {
    let Some(handle) = (unsafe { tracker.as_ref() }) else {
        set_last_error("null tracker handle");
        return MscfStatus::NullPointer;
    };
    if rect.is_null() {
        set_last_error("null rect pointer");
        return MscfStatus::NullPointer;
    }
    let b = handle.inner.bbox();
    unsafe {
        *rect = MscfRect {
            x: b.x,
            y: b.y,
            w: b.w,
            h: b.h,
        };
    }
    MscfStatus::Ok
}

/// # Safety
/// `tracker` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn mscf_tracker_free(tracker: *mut MscfTrackerHandle) {
    if !tracker.is_null() {
        drop(Box::from_raw(tracker));
    }
}
