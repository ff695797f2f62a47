//! C ABI for the toolkit: opaque handles, integer error codes, and
//! caller-owned output buffers. The header is generated by cbindgen into
//! `include/tempnet.h` at build time.

use std::ffi::{c_char, CStr};
use std::fs::File;
use std::ptr;

use tempnet::arima::{error_summary, sliding_prediction};
use tempnet::graph::SnapshotSeries;
use tempnet::ingest::{aggregate_snapshots, parse_contacts, LogFormat};
use tempnet::metrics::{metric_series, PropertyId};
use tempnet::series::{overlap_decay, select_window};
use tempnet::spectral::{annotate_suitability, auto_threshold, filtered_summary};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TempnetStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    IoError = 3,
    ParseError = 4,
    BufferTooSmall = 5,
}

fn status_of(err: &tempnet::Error) -> TempnetStatus {
    match err {
        tempnet::Error::Io(_) => TempnetStatus::IoError,
        tempnet::Error::Parse { .. } => TempnetStatus::ParseError,
        tempnet::Error::Config(_) | tempnet::Error::Argument(_) => TempnetStatus::InvalidArgument,
        tempnet::Error::Stage { source, .. } => status_of(source),
    }
}

/// Opaque snapshot-series handle.
pub struct TempnetSeries {
    inner: SnapshotSeries,
}

/// Parse a contact log file and aggregate it into snapshots.
///
/// `format` is 0 for the plain triple format, 1 for proximity logs with
/// device-type columns. On success `*out` owns a new handle that must be
/// released with `tempnet_series_free`.
///
/// # Safety
/// `path` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tempnet_series_load(
    path: *const c_char,
    format: u32,
    base_resolution: u64,
    resolution: u64,
    out: *mut *mut TempnetSeries,
) -> TempnetStatus {
    if path.is_null() || out.is_null() {
        return TempnetStatus::NullArgument;
    }
    let path = match CStr::from_ptr(path).to_str() {
        Ok(p) => p,
        Err(_) => return TempnetStatus::InvalidArgument,
    };
    let format = match format {
        0 => LogFormat::Triple,
        1 => LogFormat::SigcommProximity,
        _ => return TempnetStatus::InvalidArgument,
    };
    let result = File::open(path)
        .map_err(tempnet::Error::from)
        .and_then(|f| parse_contacts(f, format, base_resolution, false))
        .and_then(|log| aggregate_snapshots(&log, resolution));
    match result {
        Ok(series) => {
            *out = Box::into_raw(Box::new(TempnetSeries { inner: series }));
            TempnetStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Release a series handle. A null handle is a no-op.
///
/// # Safety
/// `series` must be a pointer from `tempnet_series_load`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tempnet_series_free(series: *mut TempnetSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Number of snapshots in the series.
///
/// # Safety
/// `series` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn tempnet_series_len(series: *const TempnetSeries) -> usize {
    series.as_ref().map_or(0, |s| s.inner.len())
}

/// Number of distinct nodes seen in the underlying log.
///
/// # Safety
/// `series` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn tempnet_series_node_count(series: *const TempnetSeries) -> usize {
    series.as_ref().map_or(0, |s| s.inner.node_count())
}

fn property_from(id: u32) -> Option<PropertyId> {
    PropertyId::ALL.get(id as usize).copied()
}

/// Evaluate property `property_id` (0..8 in the order active nodes, active
/// edges, average degree, clustering sum, betweenness sum, closeness sum,
/// modularity, edge emergence) over the series. `values` must hold
/// `capacity` doubles; the number written is stored in `written`.
///
/// # Safety
/// All pointers must be valid; `values` must point to `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn tempnet_metric_series(
    series: *const TempnetSeries,
    property_id: u32,
    values: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> TempnetStatus {
    let Some(series) = series.as_ref() else {
        return TempnetStatus::NullArgument;
    };
    if values.is_null() || written.is_null() {
        return TempnetStatus::NullArgument;
    }
    let Some(property) = property_from(property_id) else {
        return TempnetStatus::InvalidArgument;
    };
    match metric_series(&series.inner, property) {
        Ok(m) => {
            if m.values.len() > capacity {
                *written = m.values.len();
                return TempnetStatus::BufferTooSmall;
            }
            ptr::copy_nonoverlapping(m.values.as_ptr(), values, m.values.len());
            *written = m.values.len();
            TempnetStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Forecasting window selected from the neighborhood-overlap decay at the
/// given similarity threshold.
///
/// # Safety
/// `series` must be a live handle and `window_out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tempnet_select_window(
    series: *const TempnetSeries,
    max_lag: usize,
    threshold: f64,
    window_out: *mut usize,
) -> TempnetStatus {
    let Some(series) = series.as_ref() else {
        return TempnetStatus::NullArgument;
    };
    if window_out.is_null() {
        return TempnetStatus::NullArgument;
    }
    let result = overlap_decay(&series.inner, max_lag).and_then(|c| select_window(&c, threshold));
    match result {
        Ok(w) => {
            *window_out = w;
            TempnetStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Result of a sliding-window prediction run over one property.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct TempnetPredictionSummary {
    /// Fraction of predictions with percentage error <= error_threshold.
    pub fraction_within: f64,
    /// Same fraction over spectrogram-suitable points only; negative when
    /// filtering is disabled or no suitable point remains.
    pub filtered_fraction: f64,
    /// Points excluded by the suitability filter.
    pub dropped: usize,
    /// Points whose original value was 0 (undefined percentage error).
    pub undefined_errors: usize,
}

/// Sliding-window ARIMA prediction of one property over steps
/// `[test_start, test_end)` with window `w`. When `filter_spectro` is
/// nonzero, points whose training window fails the low-frequency
/// suitability test are excluded from the filtered fraction; `theta` < 0
/// selects the automatic 25th-percentile threshold.
///
/// # Safety
/// `series` must be a live handle and `summary` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tempnet_predict(
    series: *const TempnetSeries,
    property_id: u32,
    window: usize,
    test_start: usize,
    test_end: usize,
    error_threshold: f64,
    filter_spectro: u8,
    theta: f64,
    summary: *mut TempnetPredictionSummary,
) -> TempnetStatus {
    let Some(series) = series.as_ref() else {
        return TempnetStatus::NullArgument;
    };
    if summary.is_null() {
        return TempnetStatus::NullArgument;
    }
    let Some(property) = property_from(property_id) else {
        return TempnetStatus::InvalidArgument;
    };
    let run = || -> tempnet::Result<TempnetPredictionSummary> {
        let values = metric_series(&series.inner, property)?.values;
        let mut records = sliding_prediction(&values, window, test_start..test_end)?;
        let undefined = records.iter().filter(|r| r.pct_error.is_none()).count();
        let mut out = TempnetPredictionSummary {
            fraction_within: error_summary(&records, error_threshold)?,
            filtered_fraction: -1.0,
            dropped: 0,
            undefined_errors: undefined,
        };
        if filter_spectro != 0 {
            let theta = if theta < 0.0 {
                auto_threshold(&values, window, test_start)?
            } else {
                theta
            };
            annotate_suitability(&mut records, &values, window, theta)?;
            let fs = filtered_summary(&records, error_threshold)?;
            out.filtered_fraction = fs.filtered.unwrap_or(-1.0);
            out.dropped = fs.dropped;
        }
        Ok(out)
    };
    match run() {
        Ok(s) => {
            *summary = s;
            TempnetStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;
    use std::io::Write as _;

    fn write_demo_log() -> (tempfile::TempDir, CString) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("contacts.txt");
        let mut f = File::create(&path).unwrap();
        for t in 0..400u64 {
            writeln!(f, "{} a b", t * 20).unwrap();
            if t % 2 == 0 {
                writeln!(f, "{} b c", t * 20).unwrap();
            }
        }
        let c_path = CString::new(path.to_str().unwrap()).unwrap();
        (dir, c_path)
    }

    #[test]
    fn load_query_and_free() {
        let (_dir, path) = write_demo_log();
        let mut handle: *mut TempnetSeries = ptr::null_mut();
        let status = unsafe { tempnet_series_load(path.as_ptr(), 0, 20, 300, &mut handle) };
        assert_eq!(status, TempnetStatus::Ok);
        assert!(!handle.is_null());
        unsafe {
            assert_eq!(tempnet_series_len(handle), 27);
            assert_eq!(tempnet_series_node_count(handle), 3);
            let mut values = vec![0.0f64; 64];
            let mut written = 0usize;
            let s = tempnet_metric_series(handle, 0, values.as_mut_ptr(), 64, &mut written);
            assert_eq!(s, TempnetStatus::Ok);
            assert_eq!(written, 27);
            assert!(values[..written].iter().all(|&v| v == 3.0));
            tempnet_series_free(handle);
        }
    }

    #[test]
    fn null_and_bad_arguments() {
        let mut handle: *mut TempnetSeries = ptr::null_mut();
        unsafe {
            assert_eq!(
                tempnet_series_load(ptr::null(), 0, 20, 300, &mut handle),
                TempnetStatus::NullArgument
            );
            let missing = CString::new("/no/such/file").unwrap();
            assert_eq!(
                tempnet_series_load(missing.as_ptr(), 0, 20, 300, &mut handle),
                TempnetStatus::IoError
            );
            let (_dir, path) = write_demo_log();
            assert_eq!(
                tempnet_series_load(path.as_ptr(), 9, 20, 300, &mut handle),
                TempnetStatus::InvalidArgument
            );
            // resolution not a multiple of the base
            assert_eq!(
                tempnet_series_load(path.as_ptr(), 0, 20, 130, &mut handle),
                TempnetStatus::InvalidArgument
            );
            tempnet_series_free(ptr::null_mut()); // no-op
        }
    }

    #[test]
    fn buffer_too_small_reports_needed_length() {
        let (_dir, path) = write_demo_log();
        let mut handle: *mut TempnetSeries = ptr::null_mut();
        unsafe {
            assert_eq!(
                tempnet_series_load(path.as_ptr(), 0, 20, 300, &mut handle),
                TempnetStatus::Ok
            );
            let mut values = vec![0.0f64; 4];
            let mut written = 0usize;
            let s = tempnet_metric_series(handle, 1, values.as_mut_ptr(), 4, &mut written);
            assert_eq!(s, TempnetStatus::BufferTooSmall);
            assert_eq!(written, 27);
            tempnet_series_free(handle);
        }
    }
}
