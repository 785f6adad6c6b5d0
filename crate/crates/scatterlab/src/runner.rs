//! Experiment dispatch: run a validated config, write CSV/JSON artifacts
//! atomically (temp file + rename) and a reproducibility manifest.

use crate::config::{ExperimentConfig, SweepSpec};
use crate::corner::{
    extract_from_solution, singularity_exponent, verify_integral_identity, IdentityOptions,
    SingularityData,
};
use crate::experiments::{
    apex_triangle, run_corner_bound_sweep, run_herglotz_blowup, run_smallness_probe,
    run_stability_sweep, BlowupSpec, SweepContext,
};
use crate::forward::{far_field, solve_scattering, BoundaryMesh, SolveOptions};
use crate::geometry::{convex_hull, ContourSet, CornerFrame, Vec2};
use crate::herglotz::disk_transmission_eigenvalues;
use crate::{Error, Result};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use serde_json::json;
use sha2::{Digest, Sha256};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Write bytes atomically: temp file in the same directory, then rename.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension(format!(
        "{}.tmp",
        path.extension().and_then(|e| e.to_str()).unwrap_or("out")
    ));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn fmt(v: f64) -> String {
    if v.is_nan() {
        "NA".to_string()
    } else {
        format!("{v:.17e}")
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(x) => fmt(x),
        None => "NA".to_string(),
    }
}

/// Outcome of a run: artifact paths plus the manifest value.
pub struct RunOutput {
    pub files: Vec<PathBuf>,
    pub manifest: serde_json::Value,
}

/// Execute a validated config, writing artifacts into `out_dir`.
pub fn run(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunOutput> {
    std::fs::create_dir_all(out_dir)?;
    let started = Instant::now();
    let config_text = serde_json::to_string_pretty(cfg)?;
    let config_hash = {
        let mut h = Sha256::new();
        h.update(config_text.as_bytes());
        format!("{:x}", h.finalize())
    };

    let mut files = Vec::new();
    let mut extra = json!({});

    let ctx = SweepContext {
        admissibility: cfg.admissibility.clone(),
        mesh: cfg.mesh.clone(),
        solve: SolveOptions::default(),
        farfield_angles: cfg.farfield_angles,
        amplitude_grid: 120,
    };

    match cfg.kind.as_str() {
        "solve" => {
            let scat = cfg.scatterer.as_ref().unwrap().build(&cfg.admissibility)?;
            let inc = cfg.incident.as_ref().unwrap().build()?;
            let mesh = match &scat.support {
                crate::forward::Support::Polygon(p) => {
                    BoundaryMesh::polygon(p, inc.wavenumber(), &cfg.mesh)?
                }
                crate::forward::Support::Disk { radius } => {
                    BoundaryMesh::disk(*radius, inc.wavenumber(), &cfg.mesh)?
                }
            };
            let sol = solve_scattering(&scat, &inc, &mesh, &ctx.solve)?;
            let mut csv = String::from("x,y,trace_re,trace_im,dn_re,dn_im\n");
            for (i, p) in mesh.nodes().iter().enumerate() {
                csv.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    fmt(p.x),
                    fmt(p.y),
                    fmt(sol.trace[i].re),
                    fmt(sol.trace[i].im),
                    fmt(sol.normal_deriv_int[i].re),
                    fmt(sol.normal_deriv_int[i].im)
                ));
            }
            let path = out_dir.join("traces.csv");
            atomic_write(&path, csv.as_bytes())?;
            files.push(path);
            extra = json!({ "diagnostics": sol.diagnostics });
        }
        "farfield" => {
            let scat = cfg.scatterer.as_ref().unwrap().build(&cfg.admissibility)?;
            let inc = cfg.incident.as_ref().unwrap().build()?;
            let mesh = match &scat.support {
                crate::forward::Support::Polygon(p) => {
                    BoundaryMesh::polygon(p, inc.wavenumber(), &cfg.mesh)?
                }
                crate::forward::Support::Disk { radius } => {
                    BoundaryMesh::disk(*radius, inc.wavenumber(), &cfg.mesh)?
                }
            };
            let sol = solve_scattering(&scat, &inc, &mesh, &ctx.solve)?;
            let ff = far_field(&sol, cfg.farfield_angles)?;
            let mut csv = String::from("theta,re,im\n");
            for (j, v) in ff.values.iter().enumerate() {
                csv.push_str(&format!("{},{},{}\n", fmt(ff.theta(j)), fmt(v.re), fmt(v.im)));
            }
            let path = out_dir.join("farfield.csv");
            atomic_write(&path, csv.as_bytes())?;
            files.push(path);
            extra = json!({
                "diagnostics": sol.diagnostics,
                "far_norm": ff.l2_norm(),
            });
        }
        "eta" => {
            let spec = cfg.eta.as_ref().unwrap();
            let eta = singularity_exponent(spec.gamma, spec.opening)?;
            let residual =
                crate::corner::exponent_equation_residual(spec.gamma, spec.opening, eta);
            println!("eta = {eta:.12}  (equation residual {residual:.3e})");
            let path = out_dir.join("eta.csv");
            atomic_write(
                &path,
                format!(
                    "gamma,opening,eta,residual\n{},{},{},{}\n",
                    fmt(spec.gamma),
                    fmt(spec.opening),
                    fmt(eta),
                    fmt(residual)
                )
                .as_bytes(),
            )?;
            files.push(path);
            extra = json!({ "eta": eta, "residual": residual });
        }
        "profile" => {
            let spec = cfg.eta.as_ref().unwrap();
            let sd = SingularityData::for_corner(spec.gamma, spec.opening)?;
            let mut csv = String::from("theta,phi,phi_deriv\n");
            let n = 720;
            for j in 0..=n {
                let th = -std::f64::consts::PI
                    + 2.0 * std::f64::consts::PI * j as f64 / n as f64;
                csv.push_str(&format!(
                    "{},{},{}\n",
                    fmt(th),
                    fmt(sd.phi(th)),
                    fmt(sd.phi_deriv(th))
                ));
            }
            let path = out_dir.join("profile.csv");
            atomic_write(&path, csv.as_bytes())?;
            files.push(path);
            extra = json!({
                "eta": sd.eta,
                "matching_residual": sd.matching_residual,
                "matching_checks": sd.matching_checks().to_vec(),
                "interior_phase": sd.interior_phase(),
                "exterior_amplitude": sd.exterior_amplitude(),
                "exterior_phase": sd.exterior_phase(),
            });
        }
        "identity" => {
            let scat = cfg.scatterer.as_ref().unwrap().build(&cfg.admissibility)?;
            let scat2 = cfg
                .scatterer_second
                .as_ref()
                .unwrap()
                .build(&cfg.admissibility)?;
            let inc = cfg.incident.as_ref().unwrap().build()?;
            let k = inc.wavenumber();
            let d = scat.support.polygon()?.clone();
            let d2 = scat2.support.polygon()?.clone();
            let mesh = BoundaryMesh::polygon(&d, k, &cfg.mesh)?;
            let mesh2 = BoundaryMesh::polygon(&d2, k, &cfg.mesh)?;
            let sol = solve_scattering(&scat, &inc, &mesh, &ctx.solve)?;
            let sol2 = solve_scattering(&scat2, &inc, &mesh2, &ctx.solve)?;
            // corner: vertex of D realizing the directed distance to D'
            let (vi, _) = crate::geometry::directed_hausdorff_realizer(&d, &d2);
            let mut pts = d.vertices().to_vec();
            pts.extend_from_slice(d2.vertices());
            let hull = convex_hull(&pts)?;
            let frame = CornerFrame::build(&hull, &d, d.vertex(vi))?;
            let h = cfg.identity.h_edge_fraction * d.min_edge_length();
            let tau = cfg.identity.tau_factor * ContourSet::tau_floor(h, frame.hull_opening);
            let sd = SingularityData::for_frame(scat.gamma, &frame, &d)?;
            let fit = extract_from_solution(&sol, &frame, &sd, (0.25 * h, h), 8, 12)?;
            let sd = sd.with_coefficient(fit.coefficient, fit.residual);
            let opts = IdentityOptions {
                field_error_rel: cfg.identity.field_error_rel,
                ..IdentityOptions::default()
            };
            let rep = verify_integral_identity(&sol, &sol2, &frame, h, tau, &sd, &opts)?;
            let payload = json!({
                "lhs": [rep.lhs.re, rep.lhs.im],
                "rhs": [rep.rhs.re, rep.rhs.im],
                "residual": rep.residual,
                "budget": rep.budget,
                "terms": {
                    "I1": rep.terms[0], "I2": rep.terms[1], "I3": rep.terms[2],
                    "I4": rep.terms[3], "I5": rep.terms[4], "I6": rep.terms[5],
                    "I7": rep.terms[6], "I8": rep.terms[7], "I9": rep.terms[8],
                    "I10": rep.correction
                },
                "tau": rep.tau,
                "h": rep.h,
                "eta": rep.eta,
                "K": [rep.coefficient.re, rep.coefficient.im],
                "decomposition": {
                    "lhs": [rep.decomposition_lhs.re, rep.decomposition_lhs.im],
                    "rhs": [rep.decomposition_rhs.re, rep.decomposition_rhs.im],
                    "residual": rep.decomposition_residual,
                    "sine_ratio": rep.closed_form_sine_ratio
                },
                "degenerate": rep.degenerate,
                "field_warnings": rep.any_field_warn,
            });
            let path = out_dir.join("identity.json");
            atomic_write(&path, serde_json::to_string_pretty(&payload)?.as_bytes())?;
            files.push(path);
            extra = payload;
        }
        "stability" => {
            let scat = cfg.scatterer.as_ref().unwrap().build(&cfg.admissibility)?;
            let inc = cfg.incident.as_ref().unwrap().build()?;
            let base = scat.support.polygon()?.clone();
            let translations = resolve_translations(cfg.sweep.as_ref().unwrap(), cfg.seed)?;
            let summary =
                run_stability_sweep(&base, scat.gamma, scat.q, &inc, &translations, &ctx)?;
            let mut csv =
                String::from("index,d_h,epsilon,k_min,amplitude,delta_axis,solver_residual,failed\n");
            for r in &summary.records {
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    r.index,
                    fmt(r.hausdorff),
                    fmt(r.epsilon),
                    fmt(r.k_min),
                    fmt(r.amplitude),
                    fmt_opt(r.delta_axis),
                    fmt(r.solver_residual),
                    r.failed
                ));
            }
            let path = out_dir.join("stability.csv");
            atomic_write(&path, csv.as_bytes())?;
            files.push(path);
            extra = json!({
                "spearman": summary.spearman_dh_eps,
                "beta": summary.beta,
                "eta_min": summary.eta_min,
                "floor": summary.floor,
                "amplitude": summary.amplitude,
                "failures": summary.records.iter().filter(|r| r.failed).count(),
            });
        }
        "corner-bound" => {
            let sweep = cfg.sweep.as_ref().unwrap();
            let openings = sweep.apex_openings.clone().unwrap();
            let ndir = sweep.direction_count.unwrap_or(4);
            let threshold = sweep.coefficient_threshold.unwrap_or(1e-3);
            let (gamma, q, k) = match (&cfg.scatterer, &cfg.incident) {
                (Some(s), Some(i)) => (s.gamma, s.q, i.k),
                _ => (2.0, 1.0, 1.0),
            };
            let mut family = Vec::new();
            for &a in &openings {
                family.push((apex_triangle(a, 1.2)?, gamma, q));
            }
            let dirs: Vec<Vec2> = (0..ndir)
                .map(|j| {
                    let th = 2.0 * std::f64::consts::PI * j as f64 / ndir as f64 + 0.3;
                    Vec2::new(th.cos(), th.sin())
                })
                .collect();
            let summary = run_corner_bound_sweep(&family, &dirs, k, threshold, &ctx)?;
            let mut csv = String::from(
                "scatterer,direction,far_norm,amplitude,min_abs_k,near_degenerate,failed\n",
            );
            for r in &summary.records {
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    r.scatterer_index,
                    r.direction_index,
                    fmt(r.far_norm),
                    fmt(r.amplitude),
                    fmt(r.min_abs_coefficient),
                    r.near_degenerate,
                    r.failed
                ));
            }
            let path = out_dir.join("corner_bound.csv");
            atomic_write(&path, csv.as_bytes())?;
            files.push(path);
            extra = json!({
                "min_far_norm": summary.min_far_norm,
                "floors": summary.floors,
                "coefficient_threshold": summary.coefficient_threshold,
                "failures": summary.records.iter().filter(|r| r.failed).count(),
            });
        }
        "smallness" => {
            let scat = cfg.scatterer.as_ref().unwrap().build(&cfg.admissibility)?;
            let inc = cfg.incident.as_ref().unwrap().build()?;
            let base = scat.support.polygon()?.clone();
            let translations = resolve_translations(cfg.sweep.as_ref().unwrap(), cfg.seed)?;
            let offset = cfg
                .sweep
                .as_ref()
                .and_then(|s| s.offset_distance)
                .unwrap_or(0.1);
            let summary = run_smallness_probe(
                &base, scat.gamma, scat.q, &inc, &translations, offset, &ctx,
            )?;
            let mut csv = String::from(
                "index,d_h,epsilon,annulus_sup,offset_sup,grad_weighted_sup,failed\n",
            );
            for r in &summary.records {
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    r.index,
                    fmt(r.hausdorff),
                    fmt(r.epsilon),
                    fmt(r.annulus_sup),
                    fmt(r.offset_sup),
                    fmt(r.gradient_weighted_sup),
                    r.failed
                ));
            }
            let path = out_dir.join("smallness.csv");
            atomic_write(&path, csv.as_bytes())?;
            files.push(path);
            extra = json!({
                "spearman_eps_annulus": summary.spearman_eps_annulus,
                "spearman_eps_offset": summary.spearman_eps_offset,
                "offset_distance": summary.offset_distance,
            });
        }
        "herglotz-blowup" => {
            let b = cfg.blowup.as_ref().unwrap();
            let scat = cfg.scatterer.as_ref().unwrap().build(&cfg.admissibility)?;
            let domain = scat.support.polygon()?.clone();
            let lambdas: Vec<f64> = (0..b.lambda_count)
                .map(|i| {
                    b.lambda_max
                        * (b.lambda_min / b.lambda_max)
                            .powf(i as f64 / (b.lambda_count.max(2) - 1) as f64)
                })
                .collect();
            let inc_k = cfg.incident.as_ref().map(|i| i.k).unwrap_or(1.0);
            let spec = BlowupSpec {
                domain,
                corner_index: b.corner_index,
                gamma: b.gamma,
                k: inc_k,
                lambdas,
                grid_across: b.grid_across,
                directions: b.directions,
                coefficient: 1.0,
            };
            let summary = run_herglotz_blowup(&spec, &ctx)?;
            for (name, curve) in [
                ("blowup_regular.csv", &summary.regular),
                ("blowup_singular.csv", &summary.singular),
            ] {
                let mut csv = String::from("lambda,epsilon,g_norm\n");
                for p in curve {
                    csv.push_str(&format!(
                        "{},{},{}\n",
                        fmt(p.lambda),
                        fmt(p.epsilon),
                        fmt(p.density_norm)
                    ));
                }
                let path = out_dir.join(name);
                atomic_write(&path, csv.as_bytes())?;
                files.push(path);
            }
            for (name, dens) in [
                ("density_regular.csv", &summary.final_regular_density),
                ("density_singular.csv", &summary.final_singular_density),
            ] {
                let path = out_dir.join(name);
                atomic_write(&path, dens.to_csv().as_bytes())?;
                files.push(path);
            }
            extra = json!({
                "eta": summary.eta,
                "regular_bounded": summary.regular_bounded,
                "singular_monotone": summary.singular_monotone,
                "dominates_at_matched_misfit": summary.dominates_at_matched_misfit,
                "synthesizing_norm": summary.synthesizing_norm,
            });
        }
        "disk-eig" => {
            let d = cfg.disk_eig.as_ref().unwrap();
            let eigs = disk_transmission_eigenvalues(
                d.radius,
                d.gamma,
                d.q,
                (d.k_min, d.k_max),
                0..=d.max_mode,
                d.scan_points,
            )?;
            let mut csv = String::from("mode,k_star,det_at_root,det_scale\n");
            for e in &eigs {
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    e.mode,
                    fmt(e.k_star),
                    fmt(e.det_at_root),
                    fmt(e.det_scale)
                ));
            }
            let path = out_dir.join("disk_eigenvalues.csv");
            atomic_write(&path, csv.as_bytes())?;
            files.push(path);
            extra = json!({ "count": eigs.len() });
        }
        other => {
            return Err(Error::Config(vec![format!("unknown kind '{other}'")]));
        }
    }

    let manifest = json!({
        "tool": "scatterlab",
        "version": crate::VERSION,
        "kind": cfg.kind,
        "config": serde_json::from_str::<serde_json::Value>(&config_text)?,
        "config_sha256": config_hash,
        "wall_time_s": started.elapsed().as_secs_f64(),
        "outputs": files.iter().map(|p| p.file_name().unwrap().to_string_lossy().to_string()).collect::<Vec<_>>(),
        "results": extra,
    });
    let manifest_path = out_dir.join("manifest.json");
    atomic_write(
        &manifest_path,
        serde_json::to_string_pretty(&manifest)?.as_bytes(),
    )?;
    files.push(manifest_path);
    Ok(RunOutput { files, manifest })
}

/// Sweep translations, with optional seeded jitter.
fn resolve_translations(sweep: &SweepSpec, seed: Option<u64>) -> Result<Vec<Vec2>> {
    let base = sweep
        .translations
        .as_ref()
        .ok_or_else(|| Error::Config(vec!["sweep.translations missing".into()]))?;
    let mut out: Vec<Vec2> = base.iter().map(|t| Vec2::new(t[0], t[1])).collect();
    if let Some(j) = sweep.jitter {
        if j > 0.0 {
            let seed = seed.ok_or_else(|| {
                Error::Config(vec!["jitter requires an explicit seed".into()])
            })?;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            for t in out.iter_mut() {
                t.x += j * (rng.gen::<f64>() - 0.5);
                t.y += j * (rng.gen::<f64>() - 0.5);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config_str;

    #[test]
    fn atomic_write_replaces_content() {
        let dir = std::env::temp_dir().join(format!("scatterlab-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("x.csv");
        atomic_write(&path, b"a,b\n1,2\n").unwrap();
        atomic_write(&path, b"a,b\n3,4\n").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "a,b\n3,4\n");
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn eta_kind_runs_and_reports() {
        let dir = std::env::temp_dir().join(format!("scatterlab-eta-{}", std::process::id()));
        let cfg = parse_config_str(
            &serde_json::json!({
                "kind": "eta",
                "eta": {"gamma": 3.0, "opening": std::f64::consts::FRAC_PI_2}
            })
            .to_string(),
        )
        .unwrap();
        let out = run(&cfg, &dir).unwrap();
        let eta = out.manifest["results"]["eta"].as_f64().unwrap();
        assert!((eta - 0.8391).abs() < 1e-4);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn vacuum_farfield_writes_zero_csv_deterministically() {
        let dir = std::env::temp_dir().join(format!("scatterlab-vac-{}", std::process::id()));
        let cfg = parse_config_str(
            &serde_json::json!({
                "kind": "farfield",
                "farfield_angles": 64,
                "scatterer": {"polygon": [[0.0,0.0],[1.2,0.0],[0.6,1.0]], "gamma": 1.0, "q": 1.0},
                "incident": {"k": 1.0, "wave": "plane", "direction": [1.0, 0.0]}
            })
            .to_string(),
        )
        .unwrap();
        run(&cfg, &dir).unwrap();
        let first = std::fs::read(dir.join("farfield.csv")).unwrap();
        let text = String::from_utf8(first.clone()).unwrap();
        for line in text.lines().skip(1) {
            let cols: Vec<&str> = line.split(',').collect();
            assert_eq!(cols[1].parse::<f64>().unwrap(), 0.0);
            assert_eq!(cols[2].parse::<f64>().unwrap(), 0.0);
        }
        // rerun: byte-identical CSV
        run(&cfg, &dir).unwrap();
        let second = std::fs::read(dir.join("farfield.csv")).unwrap();
        assert_eq!(first, second);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn disk_eig_kind_runs() {
        let dir = std::env::temp_dir().join(format!("scatterlab-eig-{}", std::process::id()));
        let cfg = parse_config_str(
            &serde_json::json!({
                "kind": "disk-eig",
                "disk_eig": {"radius": 1.0, "gamma": 1.0, "q": 4.0,
                              "k_min": 0.5, "k_max": 4.0, "max_mode": 1,
                              "scan_points": 600}
            })
            .to_string(),
        )
        .unwrap();
        let out = run(&cfg, &dir).unwrap();
        assert!(out.manifest["results"]["count"].as_u64().unwrap() > 0);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
