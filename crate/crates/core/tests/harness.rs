use std::path::PathBuf;

use puwt_core::harness::config::RunConfig;
use puwt_core::harness::theorem::{theorem_check, TheoremReport, Verdict};
use puwt_core::harness::{energy_map, selftest, SelftestLevel};
use puwt_core::Error;

fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn load(name: &str) -> RunConfig {
    RunConfig::load(&configs_dir().join(name)).unwrap()
}

fn edit(name: &str, f: impl FnOnce(&mut serde_json::Value)) -> puwt_core::Result<RunConfig> {
    let text = std::fs::read_to_string(configs_dir().join(name)).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    f(&mut v);
    RunConfig::from_json(&v.to_string())
}

#[test]
fn shipped_configs_validate_and_round_trip() {
    let mut seen = 0;
    for entry in std::fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("json") {
            continue;
        }
        let cfg = RunConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        cfg.validate().unwrap();
        let back = RunConfig::from_json(&cfg.to_json().unwrap()).unwrap();
        assert_eq!(back, cfg, "{}", path.display());
        seen += 1;
    }
    assert!(seen >= 4);
}

#[test]
fn energy_map_minimum_sits_on_the_edge() {
    let cfg = load("energy_map_half_plane.json");
    let m = cfg.energy_map.clone().unwrap();
    let step = (m.hi[1] - m.lo[1]) / (m.counts[1] - 1) as f64;
    let entries = energy_map(&cfg).unwrap();
    assert_eq!(
        entries.len(),
        m.counts[0] * m.counts[1] * m.directions.len()
    );
    // edge line x + y = 1
    let off_edge = |x: [f64; 2]| (x[0] + x[1] - 1.0).abs();
    for d in &m.directions {
        for i in 0..m.counts[0] {
            let row: Vec<_> = entries
                .iter()
                .filter(|e| {
                    e.direction == *d && (e.x0[0] - (m.lo[0] + i as f64 * step)).abs() < 1e-9
                })
                .collect();
            assert_eq!(row.len(), m.counts[1]);
            let best = row
                .iter()
                .min_by(|a, b| a.s_hat.partial_cmp(&b.s_hat).unwrap())
                .unwrap();
            assert!(best.s_hat.is_finite());
            assert!(
                off_edge(best.x0) <= step + 1e-9,
                "{d:?} row {i}: minimum at {:?}",
                best.x0
            );
        }
    }
    for e in &entries {
        if off_edge(e.x0) >= 0.2 - 1e-9 {
            assert!(
                e.s_hat.is_infinite(),
                "{:?} {:?}: {}",
                e.x0,
                e.direction,
                e.s_hat
            );
        }
    }
}

#[test]
fn gaussian_is_smooth_everywhere() {
    let cfg = load("theorem_gaussian_smooth.json");
    let rep = theorem_check(&cfg).unwrap();
    assert!(rep.all_pass);
    for q in &rep.queries {
        for s in [
            q.s_hat_hormander,
            q.s_hat_hormander_inner,
            q.s_hat_pu_outer,
            q.s_hat_pu_inner,
            q.s_hat_f1,
        ] {
            assert!(s.is_infinite() || s > 3.0, "{}: {s}", q.name);
        }
        assert!(q.orders_agree);
    }
    let map = energy_map(&cfg).unwrap();
    assert!(map.iter().all(|e| e.s_hat.is_infinite()));
}

#[test]
fn zero_signal_is_all_sentinels() {
    let cfg = edit("theorem_gaussian_smooth.json", |v| {
        v["signal"] = serde_json::json!({ "kind": "zero" });
    })
    .unwrap();
    let rep = theorem_check(&cfg).unwrap();
    for q in &rep.queries {
        for series in [&q.series.hormander_outer, &q.series.pu_outer, &q.series.f1] {
            assert!(series.a_j.iter().all(|&a| a == 0.0));
            assert!(series.fit.is_smooth());
        }
        assert_eq!(q.direction_a, Verdict::Pass);
        assert_eq!(q.direction_b, Verdict::Pass);
    }
    assert_eq!(rep.uncovered_energy_fraction, 0.0);
}

#[test]
fn report_json_encodes_infinity_as_text_and_reparses() {
    let cfg = edit("theorem_gaussian_smooth.json", |v| {
        v["queries"] = serde_json::json!([v["queries"][0].clone()]);
        v["grid"]["samples_per_axis"] = serde_json::json!(128);
        v["frequency"]["octaves"] = serde_json::json!(6);
    })
    .unwrap();
    let text = theorem_check(&cfg).unwrap().to_json().unwrap();
    assert!(text.contains("\"s_hat_pu_outer\": \"inf\""));
    let back: TheoremReport = serde_json::from_str(&text).unwrap();
    let again = back.to_json().unwrap();
    for (a, b) in again.lines().zip(text.lines()) {
        assert_eq!(a, b);
    }
    assert_eq!(again, text);
    assert!(back.queries[0].s_hat_pu_outer.is_infinite());
}

#[test]
fn config_errors_are_configuration_errors() {
    let cases: Vec<(&str, puwt_core::Result<RunConfig>)> = vec![
        (
            "unknown field",
            edit("theorem_half_plane_a05.json", |v| {
                v["grid"]["spacing"] = serde_json::json!(1.0)
            }),
        ),
        (
            "hermitian with a complex signal",
            edit("gaussian_demo.json", |v| {
                v["frequency"]["hermitian"] = serde_json::json!(true)
            }),
        ),
        (
            "cutoff leaves the grid",
            edit("theorem_half_plane_a05.json", |v| {
                v["queries"][0]["x0"] = serde_json::json!([0.1, 0.1]);
            }),
        ),
        (
            "negative alpha",
            edit("theorem_half_plane_a05.json", |v| {
                v["signal"]["alpha"] = serde_json::json!(-1.0)
            }),
        ),
        (
            "axis normal",
            edit("theorem_half_plane_a05.json", |v| {
                v["signal"]["normal"] = serde_json::json!([1.0, 0.0])
            }),
        ),
        (
            "frequency support past Nyquist",
            edit("gaussian_demo.json", |v| {
                v["frequency"]["octaves"] = serde_json::json!(9)
            }),
        ),
    ];
    for (what, res) in cases {
        let err = res.and_then(|c| c.validate().map(|_| c)).unwrap_err();
        assert!(
            matches!(err, Error::Config(_) | Error::Json(_)),
            "{what}: {err}"
        );
        assert_eq!(err.exit_code(), 2, "{what}");
    }
    let no_map = load("theorem_half_plane_a05.json");
    assert_eq!(energy_map(&no_map).unwrap_err().exit_code(), 2);
}

#[test]
fn full_selftest_passes() {
    let r = selftest(SelftestLevel::Full, None).unwrap();
    assert!(r.passed, "{:#?}", r.checks);
    for name in [
        "parseval_c_psi",
        "reconstruction_c_psi",
        "proof_bound",
        "cone_propagation",
    ] {
        assert!(
            r.checks.iter().any(|c| c.name == name && c.passed),
            "{name}"
        );
    }
}
