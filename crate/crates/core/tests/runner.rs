// SPDX-License-Identifier: Apache-2.0

mod common;

use kerrsim::persist::{load_checkpoint, load_record, record_digest, save_checkpoint};
use kerrsim::runner::{PointOutcome, RunLimits, Runner};
use kerrsim::Error;

const RUN: &str = r#"
output = "r"
tau_end = 2.0
cadence = 0.5
trajectories = 24
ntilde = [1e-3]
seed = 3
checkpoint_every = 1.0
"#;

fn complete(o: PointOutcome) -> kerrsim::observables::TimeSeriesRecord {
    match o {
        PointOutcome::Complete(r) => r,
        PointOutcome::Halted { .. } => panic!("unexpected halt"),
    }
}

#[test]
fn halted_run_resumes_to_the_same_record() {
    let cfg = common::small_config(RUN);
    let a = tempfile::tempdir().unwrap();
    let full = complete(Runner::new(cfg.clone(), a.path(), None, None).unwrap().run_twa(None).unwrap());

    let b = tempfile::tempdir().unwrap();
    let mut halted = Runner::new(cfg.clone(), b.path(), None, None).unwrap();
    halted.limits = RunLimits { halt_at: Some(1.0) };
    let PointOutcome::Halted { checkpoint, time } = halted.run_twa(None).unwrap() else {
        panic!("expected a halt")
    };
    assert!((time - 1.0).abs() < 1e-9);
    assert!(!b.path().join("r/twa_1e-3.rec").exists());

    let resumed = Runner::new(cfg, b.path(), None, None).unwrap();
    let rest = complete(resumed.run_twa(Some(&checkpoint)).unwrap());
    assert_eq!(record_digest(&full).unwrap(), record_digest(&rest).unwrap());
    let on_disk = load_record(&b.path().join("r/twa_1e-3.rec")).unwrap();
    assert_eq!(on_disk, rest);
}

#[test]
fn resume_under_changed_settings_is_refused() {
    let cfg = common::small_config(RUN);
    let dir = tempfile::tempdir().unwrap();
    let mut halted = Runner::new(cfg, dir.path(), None, None).unwrap();
    halted.limits = RunLimits { halt_at: Some(1.0) };
    let PointOutcome::Halted { checkpoint, .. } = halted.run_twa(None).unwrap() else { panic!() };

    let changed = common::small_config(&RUN.replace("cadence = 0.5", "cadence = 0.25"));
    let err = Runner::new(changed, dir.path(), None, None).unwrap().run_twa(Some(&checkpoint)).unwrap_err();
    assert!(matches!(err, Error::HashMismatch { .. }), "{err}");

    let other_model = common::small_config(RUN);
    let mut ck = load_checkpoint(&checkpoint).unwrap();
    ck.model_hash = "0".repeat(32);
    save_checkpoint(&checkpoint, &ck).unwrap();
    let err = Runner::new(other_model, dir.path(), None, None).unwrap().run_twa(Some(&checkpoint)).unwrap_err();
    assert!(matches!(err, Error::HashMismatch { .. }), "{err}");
}

#[test]
fn rerun_with_same_seed_writes_identical_files() {
    let cfg = common::small_config(&RUN.replace("checkpoint_every = 1.0", ""));
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for root in [&a, &b] {
        complete(Runner::new(cfg.clone(), root.path(), None, None).unwrap().run_twa(None).unwrap());
    }
    for name in ["config.toml", "soliton.field", "gp.rec", "gp.tsv", "twa_1e-3.rec", "twa_1e-3.tsv"] {
        let x = std::fs::read(a.path().join("r").join(name)).unwrap();
        let y = std::fs::read(b.path().join("r").join(name)).unwrap();
        assert!(x == y, "{name} differs");
    }
}

#[test]
fn seed_override_changes_the_record() {
    let cfg = common::small_config(&RUN.replace("checkpoint_every = 1.0", ""));
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let x = complete(Runner::new(cfg.clone(), a.path(), None, None).unwrap().run_twa(None).unwrap());
    let y = complete(Runner::new(cfg, b.path(), None, Some(4)).unwrap().run_twa(None).unwrap());
    assert_eq!(y.meta.master_seed, Some(4));
    assert_ne!(record_digest(&x).unwrap(), record_digest(&y).unwrap());
}

#[test]
fn records_carry_provenance() {
    let cfg = common::small_config(&RUN.replace("checkpoint_every = 1.0", ""));
    let dir = tempfile::tempdir().unwrap();
    let runner = Runner::new(cfg.clone(), dir.path(), None, None).unwrap();
    let rec = complete(runner.run_twa(None).unwrap());
    assert_eq!(rec.meta.settings_digest.as_deref(), Some(cfg.settings_digest().as_str()));
    assert_eq!(rec.meta.code_version, env!("CARGO_PKG_VERSION"));
    assert_eq!(rec.meta.master_seed, Some(3));
    let text = std::fs::read_to_string(dir.path().join("r/twa_1e-3.tsv")).unwrap();
    assert!(text.contains("# master_seed = 3"));
    assert!(text.contains(&format!("# settings_digest = {}", cfg.settings_digest())));
}

#[test]
fn sweep_resume_skips_finished_points() {
    let run = RUN.replace("ntilde = [1e-3]", "ntilde = [1e-3, 2e-3]");
    let cfg = common::small_config(&run);
    let dir = tempfile::tempdir().unwrap();

    let mut halted = Runner::new(cfg.clone(), dir.path(), None, None).unwrap();
    halted.limits = RunLimits { halt_at: Some(1.0) };
    assert!(halted.run_sweep(None).unwrap().is_none());
    let ck = dir.path().join("r/twa_1e-3.ckpt");
    assert!(ck.exists());

    let resumed = Runner::new(cfg.clone(), dir.path(), None, None).unwrap();
    let report = resumed.run_sweep(Some(&ck)).unwrap().expect("report");
    assert_eq!(report.points.len(), 2);

    // Resuming from the last point's final checkpoint reuses the first record.
    let first = load_record(&dir.path().join("r/twa_1e-3.rec")).unwrap();
    let ck2 = dir.path().join("r/twa_2e-3.ckpt");
    let again = Runner::new(cfg.clone(), dir.path(), None, None).unwrap().run_sweep(Some(&ck2)).unwrap().expect("report");
    assert_eq!(again.points[0].record_digest, record_digest(&first).unwrap());
    assert_eq!(again, report);

    let fresh = tempfile::tempdir().unwrap();
    let straight = Runner::new(cfg, fresh.path(), None, None).unwrap().run_sweep(None).unwrap().expect("report");
    for (p, q) in straight.points.iter().zip(&report.points) {
        assert_eq!(p.record_digest, q.record_digest);
    }
}

#[test]
fn gp_refuses_below_threshold_unless_allowed() {
    let text = common::small_text(RUN).replace("drive_amplitude = 1.8e4", "drive_amplitude = 1.0e4");
    let cfg = kerrsim::config::RunConfig::parse(&text).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let err = Runner::new(cfg.clone(), dir.path(), None, None).unwrap().run_gp().unwrap_err();
    assert!(matches!(err, Error::ParameterDomain(_)), "{err}");
    assert_eq!(err.exit_code(), 2);

    let mut allowed = cfg;
    allowed.run.allow_below_threshold = true;
    allowed.soliton.t_relax = 5.0;
    let (_, rec) = Runner::new(allowed, dir.path(), None, None).unwrap().run_gp().unwrap();
    assert!(rec.ticks.last().unwrap().contrast.is_finite());
}

#[test]
fn analyze_without_records_is_an_io_error() {
    let cfg = common::small_config(RUN);
    let dir = tempfile::tempdir().unwrap();
    let err = Runner::new(cfg, dir.path(), None, None).unwrap().run_analyze().unwrap_err();
    assert_eq!(err.exit_code(), 5, "{err}");
}
