use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use serve_predict::synth;
use serve_predict_ffi::*;

fn last_error() -> String {
    let p = sp_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

#[test]
fn parse_serve_codes() {
    let mut out = SpServe { direction: 9, is_in: false, is_ace: false };
    let s = unsafe { sp_parse_serve(cstr("6*").as_ptr(), &mut out) };
    assert_eq!(s, SpStatus::Ok);
    assert_eq!(out, SpServe { direction: 2, is_in: true, is_ace: true });

    let s = unsafe { sp_parse_serve(cstr("4n").as_ptr(), &mut out) };
    assert_eq!(s, SpStatus::Ok);
    assert_eq!(out, SpServe { direction: 0, is_in: false, is_ace: false });

    let s = unsafe { sp_parse_serve(cstr("q").as_ptr(), &mut out) };
    assert_eq!(s, SpStatus::Parse);
    assert!(!last_error().is_empty());

    assert_eq!(unsafe { sp_parse_serve(ptr::null(), &mut out) }, SpStatus::NullPointer);
    assert_eq!(unsafe { sp_parse_serve(cstr("4").as_ptr(), ptr::null_mut()) }, SpStatus::NullPointer);
}

#[test]
fn anxiety_helper() {
    let mut a = SpAnxiety { uncertainty: 0.0, hope: 0.0, fear: 0.0, anxiety: 0.0 };
    assert_eq!(unsafe { sp_anxiety(3, 0, 4, &mut a) }, SpStatus::Ok);
    assert_eq!(a.anxiety, 0.1875);
    assert_eq!(unsafe { sp_anxiety(6, 6, 8, &mut a) }, SpStatus::Ok);
    assert_eq!(a.anxiety, 1.5);
    assert_eq!(unsafe { sp_anxiety(1, 1, 0, &mut a) }, SpStatus::InvalidArgument);
}

#[test]
fn dataset_features_model_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let c = synth::corpus(5, 3, 6, &synth::MatchSpec::default());
    let mp = dir.path().join("m.csv");
    let pp = dir.path().join("p.csv");
    synth::write_mcp_csv(&c.matches, &c.points, &mp, &pp).unwrap();

    let mut ds = ptr::null_mut();
    let (m, p) = (cstr(mp.to_str().unwrap()), cstr(pp.to_str().unwrap()));
    assert_eq!(unsafe { sp_dataset_load(m.as_ptr(), p.as_ptr(), 0, &mut ds) }, SpStatus::Ok);
    assert_eq!(unsafe { sp_dataset_match_count(ds) }, 6);
    assert_eq!(unsafe { sp_dataset_point_count(ds) }, c.points.len());

    let player = cstr(&c.matches[0].player1);
    let mut fs = ptr::null_mut();
    assert_eq!(unsafe { sp_features_for_player(ds, player.as_ptr(), 0, &mut fs) }, SpStatus::Ok);
    let (rows, cols) = unsafe { (sp_features_rows(fs), sp_features_cols(fs)) };
    assert!(rows > 20);
    let mut x = vec![0.0; rows * cols];
    let mut y = vec![0u32; rows];
    assert_eq!(unsafe { sp_features_copy(fs, x.as_mut_ptr(), x.len(), y.as_mut_ptr(), y.len()) }, SpStatus::Ok);
    assert_eq!(unsafe { sp_features_copy(fs, x.as_mut_ptr(), 1, y.as_mut_ptr(), y.len()) }, SpStatus::Shape);

    let mut model = ptr::null_mut();
    assert_eq!(
        unsafe { sp_model_train(SpModelKind::Dt, x.as_ptr(), rows, cols, y.as_ptr(), 3, &mut model) },
        SpStatus::Ok
    );
    let mut pred = vec![9u32; rows];
    assert_eq!(unsafe { sp_model_predict(model, x.as_ptr(), rows, cols, pred.as_mut_ptr()) }, SpStatus::Ok);
    assert!(pred.iter().all(|&v| v < 3));
    assert_eq!(unsafe { sp_model_predict(model, x.as_ptr(), 1, cols - 1, pred.as_mut_ptr()) }, SpStatus::Shape);

    let mut imp = vec![0.0; cols];
    assert_eq!(unsafe { sp_model_importance(model, imp.as_mut_ptr(), cols) }, SpStatus::Ok);
    assert!((imp.iter().sum::<f64>() - 1.0).abs() < 1e-9);

    let path = cstr(dir.path().join("model.json").to_str().unwrap());
    assert_eq!(unsafe { sp_model_save(model, path.as_ptr()) }, SpStatus::Ok);
    let mut loaded = ptr::null_mut();
    assert_eq!(unsafe { sp_model_load(path.as_ptr(), &mut loaded) }, SpStatus::Ok);
    let mut again = vec![9u32; rows];
    assert_eq!(unsafe { sp_model_predict(loaded, x.as_ptr(), rows, cols, again.as_mut_ptr()) }, SpStatus::Ok);
    assert_eq!(pred, again);

    unsafe {
        sp_model_free(model);
        sp_model_free(loaded);
        sp_features_free(fs);
        sp_dataset_free(ds);
        sp_dataset_free(ptr::null_mut());
    }
}

#[test]
fn lr_has_no_importance_and_bad_labels_rejected() {
    let x = [0.0, 1.0, 2.0, 3.0];
    let y = [0u32, 0, 2, 2];
    let mut model = ptr::null_mut();
    assert_eq!(unsafe { sp_model_train(SpModelKind::Lr, x.as_ptr(), 4, 1, y.as_ptr(), 0, &mut model) }, SpStatus::Ok);
    let mut imp = [0.0];
    assert_eq!(unsafe { sp_model_importance(model, imp.as_mut_ptr(), 1) }, SpStatus::Unsupported);
    unsafe { sp_model_free(model) };

    let bad = [0u32, 7, 1, 1];
    let mut m2 = ptr::null_mut();
    assert_eq!(
        unsafe { sp_model_train(SpModelKind::Lr, x.as_ptr(), 4, 1, bad.as_ptr(), 0, &mut m2) },
        SpStatus::InvalidArgument
    );
    assert!(m2.is_null());
}

#[test]
fn run_experiment_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let c = synth::corpus(8, 2, 4, &synth::MatchSpec::default());
    let mp = dir.path().join("m.csv");
    let pp = dir.path().join("p.csv");
    synth::write_mcp_csv(&c.matches, &c.points, &mp, &pp).unwrap();
    let out = dir.path().join("out");
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        format!(
            "matches = {}\npoints = {}\nmin_matches = 1\nmodels = LR, DT\nout = {}\n",
            mp.display(),
            pp.display(),
            out.display()
        ),
    )
    .unwrap();
    let p = cstr(cfg.to_str().unwrap());
    assert_eq!(unsafe { sp_run_experiment(p.as_ptr()) }, SpStatus::Ok);
    assert!(out.join("accuracy.csv").exists());
    assert_eq!(unsafe { sp_run_experiment(cstr("/nonexistent/cfg").as_ptr()) }, SpStatus::Io);
}

#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/serve_predict.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for sym in ["sp_parse_serve", "sp_model_train", "sp_dataset_free", "SP_STATUS_OK", "typedef struct SpModel SpModel"] {
        assert!(text.contains(sym), "{sym} missing from header");
    }
    let Ok(status) = Command::new("cc").args(["-fsyntax-only", "-x", "c", "-std=c99"]).arg(&header).status() else {
        eprintln!("no C compiler, syntax check skipped");
        return;
    };
    assert!(status.success());
}

#[test]
fn c_program_links_against_staticlib() {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(Path::parent).unwrap();
    let lib = profile_dir.join("libserve_predict_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built, link check skipped", lib.display());
        return;
    }
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let dir = tempfile::tempdir().unwrap();
    let bin = dir.path().join("demo");
    let Ok(status) = Command::new("cc")
        .arg(manifest.join("examples/demo.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
    else {
        eprintln!("no C compiler, link check skipped");
        return;
    };
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "direction=2 in=1 ace=1\n001122\n");
}
