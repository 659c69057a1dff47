use hvkg_core::bench::{
    linear_fit, run_capacity_experiment, run_order_sensitivity, run_separation_check, run_tail_experiment, success_rate, CapacityConfig,
    Kind, OrderConfig, SeparationConfig, Table, TailConfig,
};
use hvkg_core::Operator;

#[test]
fn separation_dimension_worked_value() {
    // (2 / 0.04) * ln(2 * 100 / 0.05) = 50 * ln 4000 = 414.7...
    let d = SeparationConfig::default().dim();
    assert_eq!(d, (50.0 * 4000f64.ln()).ceil() as usize);
    assert_eq!(d, 415);
}

#[test]
fn capacity_closed_forms() {
    let cfg = CapacityConfig::default();
    let theorem = 2.0 / 0.04 * (2000.0f64 / 0.05).ln();
    assert!((cfg.theorem_dim() - theorem).abs() < 1e-9);
    assert!((cfg.theorem_dim() - 529.83).abs() < 0.01);
    assert!((cfg.predicted_dim() - theorem / 0.5 / 2.0).abs() < 1e-9);
}

#[test]
fn tail_bound_worked_value() {
    // 10 * 2 exp(-0.5 * 0.01 * 2048) = 7.14e-4
    let bound = 10.0 * 2.0 * (-0.5f64 * 0.01 * 2048.0).exp();
    assert!((bound - 7.142_569_928e-4).abs() < 1e-12);
    let exp = run_tail_experiment(&TailConfig { dims: vec![64, 256, 1024], trials: 4000, ..Default::default() }).unwrap();
    for p in &exp.points {
        assert!((p.bound - 2.0 * (-0.5 * 0.01 * p.d as f64).exp()).abs() < 1e-15);
        assert!((p.rate - p.exceedances as f64 / 4000.0).abs() < 1e-15);
    }
    assert!(exp.monotone_within_noise());
}

#[test]
fn tail_config_validation() {
    assert!(run_tail_experiment(&TailConfig { trials: 0, ..Default::default() }).is_err());
    assert!(run_tail_experiment(&TailConfig { trials: 10, ..Default::default() }).is_err());
    assert!(run_tail_experiment(&TailConfig { epsilon: 1.5, ..Default::default() }).is_err());
}

#[test]
fn tail_is_seed_deterministic() {
    let cfg = TailConfig { dims: vec![128, 512], trials: 2000, seed: 4, ..Default::default() };
    assert_eq!(run_tail_experiment(&cfg).unwrap().points, run_tail_experiment(&cfg).unwrap().points);
}

#[test]
fn separation_small_run() {
    let exp = run_separation_check(&SeparationConfig { trials: 60, ..Default::default() }).unwrap();
    assert_eq!(exp.d, 415);
    assert_eq!(exp.exact_match_failures, 0);
    assert!(exp.success_rate >= 0.9);
}

#[test]
fn capacity_measured_below_theorem() {
    let cfg = CapacityConfig { m: 100, ..Default::default() };
    let exp = run_capacity_experiment(&cfg).unwrap();
    assert!((exp.measured_dim as f64) <= exp.theorem_dim);
    assert!(exp.success_rate >= 1.0 - cfg.delta);
    assert!(success_rate(&cfg, exp.measured_dim).unwrap() >= 1.0 - cfg.delta);
    assert!(run_capacity_experiment(&CapacityConfig { trials: 10, ..Default::default() }).is_err());
}

#[test]
fn order_dichotomy_small() {
    let cfg = OrderConfig { trials: 40, dim: 1024, lengths: vec![2, 3], ..Default::default() };
    let res = run_order_sensitivity(&cfg).unwrap();
    for row in &res.rows {
        if row.family.is_commutative() {
            assert!((row.mean_sim - 1.0).abs() < 1e-9, "{row:?}");
        } else {
            assert_eq!(row.family, Operator::Ghrr);
            assert!(row.mean_sim < 0.2, "{row:?}");
        }
    }
    assert_eq!(res.rows.len(), 12);
}

#[test]
fn weighted_fit_recovers_line_with_relative_noise() {
    let xs: Vec<f64> = (1..=16).map(|i| i as f64 * 1e6).collect();
    let ys: Vec<f64> = xs.iter().enumerate().map(|(i, x)| (3e-9 * x + 1e-4) * if i % 2 == 0 { 1.05 } else { 0.95 }).collect();
    let (a, b, r2) = linear_fit(&xs, &ys);
    assert!((a - 3e-9).abs() / 3e-9 < 0.05, "{a}");
    assert!(b.abs() < 1e-3);
    assert!(r2 > 0.98);
}

#[test]
fn tables_save_csv_and_sidecar_without_overwriting() {
    let dir = tempfile::tempdir().unwrap();
    let mut t = Table::new("demo", &[("d", Kind::Int), ("rate", Kind::Float), ("family", Kind::Text)]);
    t.push(vec![512usize.into(), 0.25f64.into(), "bipolar_xor".into()]);
    let cfg = serde_json::json!({"seed": 1});
    let a = t.save(dir.path(), &cfg).unwrap();
    let b = t.save(dir.path(), &cfg).unwrap();
    assert_ne!(a, b);
    let csv = std::fs::read_to_string(&a).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "d,rate,family");
    assert_eq!(csv.lines().count(), 2);
    let side: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(a.with_extension("json")).unwrap()).unwrap();
    assert_eq!(side["experiment"], "demo");
    assert_eq!(side["config"]["seed"], 1);
    let name = a.file_name().unwrap().to_str().unwrap();
    assert!(name.starts_with("demo_") && name.ends_with("Z.csv"), "{name}");
}

#[test]
fn mistyped_rows_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut t = Table::new("bad", &[("d", Kind::Int)]);
    t.push(vec!["text".into()]);
    assert!(t.save(dir.path(), &()).is_err());
}
