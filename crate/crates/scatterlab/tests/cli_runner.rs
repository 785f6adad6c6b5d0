//! End-to-end runner tests: every experiment kind writes its artifacts and
//! manifest, and the installed binary honors the documented exit codes.

use serde_json::json;
use std::path::PathBuf;
use std::process::Command;

fn outdir(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("scatterlab-it-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn triangle_json() -> serde_json::Value {
    json!([[0.0, 0.0], [1.2, 0.0], [0.6, 1.0392304845413263]])
}

fn coarse_mesh() -> serde_json::Value {
    json!({"nodes_per_panel": 8, "panels_per_half_edge": 3, "grading": 3.0,
           "min_nodes_per_wavelength": 10.0, "smooth_nodes": 0})
}

fn run_kind(cfg: serde_json::Value, tag: &str) -> (PathBuf, serde_json::Value) {
    let dir = outdir(tag);
    let cfg = scatterlab::config::parse_config_str(&cfg.to_string()).unwrap();
    let out = scatterlab::runner::run(&cfg, &dir).unwrap();
    (dir, out.manifest)
}

#[test]
fn solve_kind_writes_traces() {
    let (dir, manifest) = run_kind(
        json!({
            "kind": "solve",
            "mesh": coarse_mesh(),
            "scatterer": {"polygon": triangle_json(), "gamma": 2.0, "q": 1.0},
            "incident": {"k": 1.0, "wave": "plane", "direction": [1.0, 0.0]}
        }),
        "solve",
    );
    let text = std::fs::read_to_string(dir.join("traces.csv")).unwrap();
    assert!(text.starts_with("x,y,trace_re,trace_im,dn_re,dn_im"));
    assert!(text.lines().count() > 100);
    assert!(manifest["results"]["diagnostics"]["residual"].as_f64().unwrap() < 1e-10);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn profile_kind_writes_angular_profile() {
    let (dir, manifest) = run_kind(
        json!({
            "kind": "profile",
            "eta": {"gamma": 3.0, "opening": 1.5707963267948966}
        }),
        "profile",
    );
    let text = std::fs::read_to_string(dir.join("profile.csv")).unwrap();
    assert!(text.starts_with("theta,phi,phi_deriv"));
    assert!(manifest["results"]["matching_residual"].as_f64().unwrap() < 1e-10);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn identity_kind_writes_spec_shaped_json() {
    let (dir, _manifest) = run_kind(
        json!({
            "kind": "identity",
            "mesh": {"nodes_per_panel": 8, "panels_per_half_edge": 4, "grading": 3.0,
                     "min_nodes_per_wavelength": 10.0, "smooth_nodes": 0},
            "scatterer": {"polygon": triangle_json(), "gamma": 2.0, "q": 1.0},
            "scatterer_second": {"polygon": [[2.2, -0.4], [3.2, -0.2], [2.7, 0.7]],
                                  "gamma": 2.0, "q": 1.0},
            "incident": {"k": 1.0, "wave": "plane", "direction": [0.6, 0.8]},
            "identity": {"tau_factor": 2.0, "h_edge_fraction": 0.2, "field_error_rel": 3e-4}
        }),
        "identity",
    );
    let payload: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("identity.json")).unwrap())
            .unwrap();
    for key in ["lhs", "rhs", "residual", "budget", "terms", "tau", "h", "eta", "K"] {
        assert!(payload.get(key).is_some(), "missing key {key}");
    }
    for t in ["I1", "I2", "I3", "I4", "I5", "I6", "I7", "I8", "I9", "I10"] {
        assert!(payload["terms"].get(t).is_some(), "missing term {t}");
    }
    let residual = payload["residual"].as_f64().unwrap();
    let budget = payload["budget"].as_f64().unwrap();
    assert!(residual <= budget, "residual {residual} over budget {budget}");
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn stability_kind_writes_sweep_csv() {
    let (dir, manifest) = run_kind(
        json!({
            "kind": "stability",
            "mesh": coarse_mesh(),
            "scatterer": {"polygon": triangle_json(), "gamma": 2.0, "q": 1.0},
            "incident": {"k": 1.0, "wave": "plane", "direction": [0.6, 0.8]},
            "sweep": {"translations": [[0.05, 0.0], [0.1, 0.0], [0.15, 0.0]]}
        }),
        "stability",
    );
    let text = std::fs::read_to_string(dir.join("stability.csv")).unwrap();
    assert!(text.starts_with("index,d_h,epsilon,k_min,amplitude,delta_axis,solver_residual,failed"));
    assert_eq!(text.lines().count(), 4);
    assert!(manifest["results"]["spearman"].as_f64().unwrap() > 0.9);
    assert_eq!(manifest["results"]["failures"].as_u64().unwrap(), 0);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn corner_bound_kind_writes_sweep_csv() {
    let (dir, manifest) = run_kind(
        json!({
            "kind": "corner-bound",
            "mesh": coarse_mesh(),
            "scatterer": {"polygon": triangle_json(), "gamma": 2.0, "q": 1.0},
            "incident": {"k": 1.0, "wave": "plane", "direction": [1.0, 0.0]},
            "sweep": {"apex_openings": [0.8, 1.1], "direction_count": 2,
                       "coefficient_threshold": 1e-4}
        }),
        "cornerbound",
    );
    let text = std::fs::read_to_string(dir.join("corner_bound.csv")).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(manifest["results"]["min_far_norm"].as_f64().unwrap() > 0.0);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn smallness_kind_writes_probe_csv() {
    let (dir, manifest) = run_kind(
        json!({
            "kind": "smallness",
            "mesh": coarse_mesh(),
            "scatterer": {"polygon": triangle_json(), "gamma": 2.0, "q": 1.0},
            "scatterer_second": {"polygon": triangle_json(), "gamma": 2.0, "q": 1.0},
            "incident": {"k": 1.0, "wave": "plane", "direction": [0.6, 0.8]},
            "sweep": {"translations": [[0.1, 0.0], [0.05, 0.0]], "offset_distance": 0.1}
        }),
        "smallness",
    );
    let text = std::fs::read_to_string(dir.join("smallness.csv")).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(manifest["results"]["spearman_eps_offset"].is_number());
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn blowup_kind_writes_two_curves() {
    let (dir, manifest) = run_kind(
        json!({
            "kind": "herglotz-blowup",
            "scatterer": {"polygon": triangle_json(), "gamma": 2.0, "q": 1.0},
            "incident": {"k": 1.0, "wave": "plane", "direction": [1.0, 0.0]},
            "blowup": {"corner_index": 0, "gamma": 2.0,
                        "lambda_max": 1e-2, "lambda_min": 1e-12, "lambda_count": 6,
                        "grid_across": 12, "directions": 32}
        }),
        "blowup",
    );
    for f in ["blowup_regular.csv", "blowup_singular.csv"] {
        let text = std::fs::read_to_string(dir.join(f)).unwrap();
        assert!(text.starts_with("lambda,epsilon,g_norm"));
        assert_eq!(text.lines().count(), 7);
    }
    assert!(manifest["results"]["dominates_at_matched_misfit"].as_bool().unwrap());
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn binary_exit_codes_and_artifacts() {
    let bin = env!("CARGO_BIN_EXE_scatterlab");
    let dir = outdir("bin");
    let cfg_path = dir.join("eta.json");
    std::fs::write(
        &cfg_path,
        json!({"kind": "eta", "eta": {"gamma": 3.0, "opening": 1.5707963267948966}}).to_string(),
    )
    .unwrap();
    // success path
    let out = Command::new(bin)
        .args([
            "eta",
            "--config",
            cfg_path.to_str().unwrap(),
            "--out",
            dir.join("run").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("eta = 0.839"), "stdout: {stdout}");
    assert!(dir.join("run/manifest.json").exists());
    assert!(dir.join("run/eta.csv").exists());

    // config error path: gamma = 1 with contrast left in q
    let bad = dir.join("bad.json");
    std::fs::write(
        &bad,
        json!({
            "kind": "farfield",
            "scatterer": {"polygon": triangle_json(), "gamma": 1.0, "q": 2.0},
            "incident": {"k": 1.0, "wave": "plane", "direction": [1.0, 0.0]}
        })
        .to_string(),
    )
    .unwrap();
    let out = Command::new(bin)
        .args(["farfield", "--config", bad.to_str().unwrap(), "--out", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gamma must differ from 1"));

    // kind mismatch is a config error too
    let out = Command::new(bin)
        .args(["solve", "--config", cfg_path.to_str().unwrap(), "--out", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(dir).unwrap();
}
