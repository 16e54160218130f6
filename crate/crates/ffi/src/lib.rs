//! C ABI over `serve_predict`.
//!
//! Every fallible call returns an `SpStatus`. On failure, `sp_last_error`
//! gives a message for the calling thread. Handles are opaque and must be
//! released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use serve_predict::features::{anxiety_from_scores, FeatureConfig};
use serve_predict::kv::KeyValues;
use serve_predict::mcp_data::{parse_serve, ServeDirection, Tour};
use serve_predict::models::{self, Dataset, Hyperparameters, Matrix, ModelError, ModelKind, TrainedModel};
use serve_predict::pipeline::{self, build_player_dataset, ExperimentConfig, Prepared};
use serve_predict::score::{Level, Side};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    Shape = 5,
    Unsupported = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpModelKind {
    Lr = 0,
    Rf = 1,
    Dt = 2,
    Svm = 3,
    Nn = 4,
}

impl From<SpModelKind> for ModelKind {
    fn from(k: SpModelKind) -> Self {
        match k {
            SpModelKind::Lr => ModelKind::LR,
            SpModelKind::Rf => ModelKind::RF,
            SpModelKind::Dt => ModelKind::DT,
            SpModelKind::Svm => ModelKind::SVM,
            SpModelKind::Nn => ModelKind::NN,
        }
    }
}

/// Parsed serve token. `direction` is 0 wide, 1 body, 2 T, -1 unknown.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpServe {
    pub direction: i32,
    pub is_in: bool,
    pub is_ace: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpAnxiety {
    pub uncertainty: f64,
    pub hope: f64,
    pub fear: f64,
    pub anxiety: f64,
}

/// Cleaned and replayed charting data.
pub struct SpDataset {
    prepared: Prepared,
}

/// Feature rows of one player from one side.
pub struct SpFeatureSet {
    data: Dataset,
}

pub struct SpModel {
    model: TrainedModel,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: SpStatus, msg: impl Into<String>) -> SpStatus {
    set_error(msg);
    status
}

fn guard<F: FnOnce() -> SpStatus>(f: F) -> SpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(SpStatus::Panic, "internal panic"),
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, SpStatus> {
    if p.is_null() {
        return Err(fail(SpStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(SpStatus::InvalidArgument, format!("{name} is not UTF-8")))
}

fn model_status(e: &ModelError) -> SpStatus {
    match e {
        ModelError::Shape { .. } => SpStatus::Shape,
        ModelError::Unsupported(_) => SpStatus::Unsupported,
        ModelError::Format(_) => SpStatus::Parse,
        ModelError::EmptyTraining | ModelError::UnknownKind(_) => SpStatus::InvalidArgument,
    }
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `token` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sp_parse_serve(token: *const c_char, out: *mut SpServe) -> SpStatus {
    guard(|| {
        let token = match str_arg(token, "token") {
            Ok(t) => t,
            Err(s) => return s,
        };
        if out.is_null() {
            return fail(SpStatus::NullPointer, "out is null");
        }
        match parse_serve(token) {
            Ok(p) => {
                let direction = if p.direction == ServeDirection::Unknown {
                    -1
                } else {
                    p.direction.class_index().map_or(-1, |i| i as i32)
                };
                *out = SpServe { direction, is_in: p.fault.is_in(), is_ace: p.is_ace };
                SpStatus::Ok
            }
            Err(e) => fail(SpStatus::Parse, e.to_string()),
        }
    })
}

/// Anxiety components for a score of `own` against `opp` with `target`
/// points, games or sets needed to win.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sp_anxiety(own: u32, opp: u32, target: u32, out: *mut SpAnxiety) -> SpStatus {
    guard(|| {
        if out.is_null() {
            return fail(SpStatus::NullPointer, "out is null");
        }
        if target == 0 {
            return fail(SpStatus::InvalidArgument, "target must be positive");
        }
        let a = anxiety_from_scores(Level::Game, own, opp, target);
        *out = SpAnxiety { uncertainty: a.uncertainty, hope: a.hope, fear: a.fear, anxiety: a.anxiety };
        SpStatus::Ok
    })
}

/// Loads, cleans and replays a matches/points file pair. `tour` is 0 for
/// both tours, 1 for men, 2 for women.
///
/// # Safety
/// Paths must be NUL-terminated strings; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sp_dataset_load(
    matches_path: *const c_char,
    points_path: *const c_char,
    tour: u32,
    out: *mut *mut SpDataset,
) -> SpStatus {
    guard(|| {
        let (m, p) = match (str_arg(matches_path, "matches_path"), str_arg(points_path, "points_path")) {
            (Ok(m), Ok(p)) => (m, p),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        if out.is_null() {
            return fail(SpStatus::NullPointer, "out is null");
        }
        let tour = match tour {
            0 => None,
            1 => Some(Tour::M),
            2 => Some(Tour::W),
            _ => return fail(SpStatus::InvalidArgument, "tour must be 0, 1 or 2"),
        };
        let cfg = ExperimentConfig {
            matches_path: PathBuf::from(m),
            points_path: PathBuf::from(p),
            tour,
            ..ExperimentConfig::default()
        };
        match pipeline::prepare(&cfg) {
            Ok(prepared) => {
                *out = Box::into_raw(Box::new(SpDataset { prepared }));
                SpStatus::Ok
            }
            Err(e) => fail(SpStatus::Io, e.to_string()),
        }
    })
}

/// # Safety
/// `ds` must be null or a handle from `sp_dataset_load`.
#[no_mangle]
pub unsafe extern "C" fn sp_dataset_match_count(ds: *const SpDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.prepared.matches.len())
}

/// # Safety
/// `ds` must be null or a handle from `sp_dataset_load`.
#[no_mangle]
pub unsafe extern "C" fn sp_dataset_point_count(ds: *const SpDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.prepared.matches.iter().map(|m| m.points.len()).sum())
}

/// # Safety
/// `ds` must be null or a handle from `sp_dataset_load` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sp_dataset_free(ds: *mut SpDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// Feature rows for `player` serving from the deuce (`side` 0) or ad (1) side.
///
/// # Safety
/// `ds` must be a live dataset handle, `player` a NUL-terminated string and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sp_features_for_player(
    ds: *const SpDataset,
    player: *const c_char,
    side: u32,
    out: *mut *mut SpFeatureSet,
) -> SpStatus {
    guard(|| {
        let Some(ds) = ds.as_ref() else {
            return fail(SpStatus::NullPointer, "dataset is null");
        };
        let player = match str_arg(player, "player") {
            Ok(p) => p,
            Err(s) => return s,
        };
        if out.is_null() {
            return fail(SpStatus::NullPointer, "out is null");
        }
        let side = match side {
            0 => Side::Deuce,
            1 => Side::Ad,
            _ => return fail(SpStatus::InvalidArgument, "side must be 0 or 1"),
        };
        let pd = build_player_dataset(player, side, &ds.prepared.matches, FeatureConfig::default());
        *out = Box::into_raw(Box::new(SpFeatureSet { data: pd.data }));
        SpStatus::Ok
    })
}

/// # Safety
/// `fs` must be null or a live feature-set handle.
#[no_mangle]
pub unsafe extern "C" fn sp_features_rows(fs: *const SpFeatureSet) -> usize {
    fs.as_ref().map_or(0, |f| f.data.len())
}

/// # Safety
/// `fs` must be null or a live feature-set handle.
#[no_mangle]
pub unsafe extern "C" fn sp_features_cols(fs: *const SpFeatureSet) -> usize {
    fs.as_ref().map_or(0, |f| f.data.x.cols())
}

/// Copies the row-major feature matrix into `x` and labels into `y`.
///
/// # Safety
/// `x` must hold `x_len` doubles and `y` `y_len` integers.
#[no_mangle]
pub unsafe extern "C" fn sp_features_copy(
    fs: *const SpFeatureSet,
    x: *mut f64,
    x_len: usize,
    y: *mut u32,
    y_len: usize,
) -> SpStatus {
    guard(|| {
        let Some(fs) = fs.as_ref() else {
            return fail(SpStatus::NullPointer, "feature set is null");
        };
        let data = fs.data.x.as_slice();
        if x_len != data.len() || y_len != fs.data.len() {
            return fail(SpStatus::Shape, format!("need {} values and {} labels", data.len(), fs.data.len()));
        }
        if data.is_empty() {
            return SpStatus::Ok;
        }
        if x.is_null() || y.is_null() {
            return fail(SpStatus::NullPointer, "output buffer is null");
        }
        ptr::copy_nonoverlapping(data.as_ptr(), x, data.len());
        for (i, &label) in fs.data.y.iter().enumerate() {
            *y.add(i) = label as u32;
        }
        SpStatus::Ok
    })
}

/// # Safety
/// `fs` must be null or a live feature-set handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sp_features_free(fs: *mut SpFeatureSet) {
    if !fs.is_null() {
        drop(Box::from_raw(fs));
    }
}

unsafe fn matrix_arg(x: *const f64, rows: usize, cols: usize) -> Result<Matrix, SpStatus> {
    if rows == 0 {
        return Ok(Matrix::zeros(0, cols));
    }
    if x.is_null() {
        return Err(fail(SpStatus::NullPointer, "x is null"));
    }
    let len = rows
        .checked_mul(cols)
        .ok_or_else(|| fail(SpStatus::InvalidArgument, "rows * cols overflows"))?;
    Ok(Matrix::from_vec(rows, cols, std::slice::from_raw_parts(x, len).to_vec()))
}

/// Trains a three-class model with default hyperparameters. Labels are
/// 0 wide, 1 body, 2 T.
///
/// # Safety
/// `x` must hold `rows * cols` doubles, `y` `rows` labels; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sp_model_train(
    kind: SpModelKind,
    x: *const f64,
    rows: usize,
    cols: usize,
    y: *const u32,
    seed: u64,
    out: *mut *mut SpModel,
) -> SpStatus {
    guard(|| {
        if out.is_null() {
            return fail(SpStatus::NullPointer, "out is null");
        }
        if rows == 0 || cols == 0 {
            return fail(SpStatus::InvalidArgument, "training set is empty");
        }
        let x = match matrix_arg(x, rows, cols) {
            Ok(m) => m,
            Err(s) => return s,
        };
        if y.is_null() {
            return fail(SpStatus::NullPointer, "y is null");
        }
        let labels: Vec<usize> = std::slice::from_raw_parts(y, rows).iter().map(|&v| v as usize).collect();
        if labels.iter().any(|&v| v > 2) {
            return fail(SpStatus::InvalidArgument, "labels must be 0, 1 or 2");
        }
        let names = (0..cols).map(|j| format!("x{j}")).collect();
        let data = Dataset::new(x, labels, 3, names);
        match models::train(kind.into(), &data, &Hyperparameters::default(), seed) {
            Ok(model) => {
                *out = Box::into_raw(Box::new(SpModel { model }));
                SpStatus::Ok
            }
            Err(e) => fail(model_status(&e), e.to_string()),
        }
    })
}

/// # Safety
/// `model` must be a live handle; `x` must hold `rows * cols` doubles and
/// `out` `rows` integers.
#[no_mangle]
pub unsafe extern "C" fn sp_model_predict(
    model: *const SpModel,
    x: *const f64,
    rows: usize,
    cols: usize,
    out: *mut u32,
) -> SpStatus {
    guard(|| {
        let Some(m) = model.as_ref() else {
            return fail(SpStatus::NullPointer, "model is null");
        };
        let x = match matrix_arg(x, rows, cols) {
            Ok(m) => m,
            Err(s) => return s,
        };
        match m.model.predict(&x) {
            Ok(pred) => {
                if pred.is_empty() {
                    return SpStatus::Ok;
                }
                if out.is_null() {
                    return fail(SpStatus::NullPointer, "out is null");
                }
                for (i, p) in pred.into_iter().enumerate() {
                    *out.add(i) = p as u32;
                }
                SpStatus::Ok
            }
            Err(e) => fail(model_status(&e), e.to_string()),
        }
    })
}

/// # Safety
/// `model` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sp_model_save(model: *const SpModel, path: *const c_char) -> SpStatus {
    guard(|| {
        let Some(m) = model.as_ref() else {
            return fail(SpStatus::NullPointer, "model is null");
        };
        let path = match str_arg(path, "path") {
            Ok(p) => p,
            Err(s) => return s,
        };
        match std::fs::write(path, m.model.to_json()) {
            Ok(()) => SpStatus::Ok,
            Err(e) => fail(SpStatus::Io, format!("{path}: {e}")),
        }
    })
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sp_model_load(path: *const c_char, out: *mut *mut SpModel) -> SpStatus {
    guard(|| {
        let path = match str_arg(path, "path") {
            Ok(p) => p,
            Err(s) => return s,
        };
        if out.is_null() {
            return fail(SpStatus::NullPointer, "out is null");
        }
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => return fail(SpStatus::Io, format!("{path}: {e}")),
        };
        match TrainedModel::from_json(&text) {
            Ok(model) => {
                *out = Box::into_raw(Box::new(SpModel { model }));
                SpStatus::Ok
            }
            Err(e) => fail(model_status(&e), e.to_string()),
        }
    })
}

/// Writes normalized importances (column order) into `out`. Only tree and
/// forest models support this.
///
/// # Safety
/// `model` must be a live handle and `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn sp_model_importance(model: *const SpModel, out: *mut f64, len: usize) -> SpStatus {
    guard(|| {
        let Some(m) = model.as_ref() else {
            return fail(SpStatus::NullPointer, "model is null");
        };
        let ranked = match m.model.feature_importance() {
            Ok(r) => r,
            Err(e) => return fail(model_status(&e), e.to_string()),
        };
        if len != m.model.n_features() {
            return fail(SpStatus::Shape, format!("model has {} features", m.model.n_features()));
        }
        if out.is_null() {
            return fail(SpStatus::NullPointer, "out is null");
        }
        for (name, v) in ranked {
            if let Some(j) = m.model.feature_names.iter().position(|n| *n == name) {
                *out.add(j) = v;
            }
        }
        SpStatus::Ok
    })
}

/// # Safety
/// `model` must be null or a live handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sp_model_free(model: *mut SpModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Runs the full experiment described by a key-value config file and writes
/// its reports.
///
/// # Safety
/// `config_path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sp_run_experiment(config_path: *const c_char) -> SpStatus {
    guard(|| {
        let path = match str_arg(config_path, "config_path") {
            Ok(p) => p,
            Err(s) => return s,
        };
        let kv = match KeyValues::from_file(std::path::Path::new(path)) {
            Ok(kv) => kv,
            Err(e) => return fail(SpStatus::Io, e.to_string()),
        };
        let mut cfg = ExperimentConfig::default();
        if let Err(e) = cfg.apply_kv(&kv) {
            return fail(SpStatus::InvalidArgument, e.to_string());
        }
        match pipeline::run_experiment(&cfg) {
            Ok(_) => SpStatus::Ok,
            Err(pipeline::PipelineError::Config(e)) => fail(SpStatus::InvalidArgument, e.to_string()),
            Err(e) => fail(SpStatus::Io, e.to_string()),
        }
    })
}
