//! Declarative experiment configuration: JSON with a fixed schema, unknown
//! keys rejected, and admissibility validation that reports every
//! violation rather than the first.

use crate::forward::{IncidentField, MeshParams, Scatterer, Support};
use crate::geometry::{AdmissibilityParams, Polygon, Vec2};
use crate::herglotz::HerglotzDensity;
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Experiment kinds accepted by the runner.
pub const KINDS: [&str; 10] = [
    "solve",
    "farfield",
    "eta",
    "profile",
    "identity",
    "stability",
    "corner-bound",
    "smallness",
    "herglotz-blowup",
    "disk-eig",
];

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScattererSpec {
    /// Inline polygon vertices (CCW), or a polygon file path, or a disk.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polygon: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polygon_file: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disk_radius: Option<f64>,
    pub gamma: f64,
    pub q: f64,
}

impl ScattererSpec {
    pub fn build(&self, params: &AdmissibilityParams) -> Result<Scatterer> {
        let support = match (&self.polygon, &self.polygon_file, self.disk_radius) {
            (Some(v), None, None) => Support::Polygon(Polygon::new(
                v.iter().map(|p| Vec2::new(p[0], p[1])).collect(),
            )?),
            (None, Some(path), None) => {
                let text = std::fs::read_to_string(path)?;
                Support::Polygon(Polygon::from_text(&text)?)
            }
            (None, None, Some(r)) => Support::Disk { radius: r },
            _ => {
                return Err(Error::Config(vec![
                    "scatterer needs exactly one of polygon, polygon_file, disk_radius".into(),
                ]))
            }
        };
        Scatterer::new(support, self.gamma, self.q, params)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IncidentSpec {
    pub k: f64,
    /// "plane" (needs direction) or "herglotz" (needs density).
    pub wave: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<[f64; 2]>,
    /// Density samples (re, im) at uniform directions; even count >= 32.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<Vec<[f64; 2]>>,
    /// Alternatively a CSV density file (header theta,re,im).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density_file: Option<String>,
}

impl IncidentSpec {
    pub fn build(&self) -> Result<IncidentField> {
        match self.wave.as_str() {
            "plane" => {
                let d = self.direction.ok_or_else(|| {
                    Error::Config(vec!["plane wave needs a direction".into()])
                })?;
                IncidentField::plane(self.k, Vec2::new(d[0], d[1]))
            }
            "herglotz" => {
                let density = match (&self.density, &self.density_file) {
                    (Some(d), None) => HerglotzDensity::new(
                        d.iter().map(|v| Complex64::new(v[0], v[1])).collect(),
                    )?,
                    (None, Some(path)) => {
                        HerglotzDensity::from_csv(&std::fs::read_to_string(path)?)?
                    }
                    _ => {
                        return Err(Error::Config(vec![
                            "herglotz wave needs exactly one of density, density_file".into(),
                        ]))
                    }
                };
                IncidentField::herglotz(self.k, density)
            }
            other => Err(Error::Config(vec![format!(
                "unknown incident wave kind '{other}' (plane | herglotz)"
            )])),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EtaSpec {
    pub gamma: f64,
    pub opening: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IdentitySpec {
    /// Probe scale as a multiple of the floor value.
    pub tau_factor: f64,
    /// Contour radius as a fraction of the minimum edge length (the proof
    /// scale uses 1/5).
    pub h_edge_fraction: f64,
    /// Relative field-accuracy estimate entering the budget.
    pub field_error_rel: f64,
}

impl Default for IdentitySpec {
    fn default() -> Self {
        IdentitySpec {
            tau_factor: 2.0,
            h_edge_fraction: 0.2,
            field_error_rel: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Translation family applied to the base polygon.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translations: Option<Vec<[f64; 2]>>,
    /// Optional jitter amplitude on the translations; requires a seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jitter: Option<f64>,
    /// Corner-bound family: apex openings and incident direction count.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub apex_openings: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficient_threshold: Option<f64>,
    /// Offset distance of the smallness probe.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset_distance: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlowupConfig {
    pub corner_index: usize,
    pub gamma: f64,
    /// Geometric lambda grid endpoints and count.
    pub lambda_max: f64,
    pub lambda_min: f64,
    pub lambda_count: usize,
    #[serde(default = "default_grid_across")]
    pub grid_across: usize,
    #[serde(default = "default_directions")]
    pub directions: usize,
}

fn default_grid_across() -> usize {
    16
}
fn default_directions() -> usize {
    64
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiskEigSpec {
    pub radius: f64,
    pub gamma: f64,
    pub q: f64,
    pub k_min: f64,
    pub k_max: f64,
    pub max_mode: u32,
    #[serde(default = "default_scan")]
    pub scan_points: usize,
}

fn default_scan() -> usize {
    2000
}

fn default_farfield_angles() -> usize {
    256
}

/// Top-level experiment configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub admissibility: AdmissibilityParams,
    #[serde(default)]
    pub mesh: MeshParams,
    #[serde(default = "default_farfield_angles")]
    pub farfield_angles: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scatterer: Option<ScattererSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scatterer_second: Option<ScattererSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub incident: Option<IncidentSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<EtaSpec>,
    #[serde(default)]
    pub identity: IdentitySpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blowup: Option<BlowupConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disk_eig: Option<DiskEigSpec>,
}

/// Parse and validate a configuration file. Syntax errors carry line and
/// column; semantic violations are collected exhaustively.
pub fn parse_config(path: &std::path::Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| {
        Error::Config(vec![format!(
            "parse error at line {}, column {}: {e}",
            e.line(),
            e.column()
        )])
    })?;
    validate(&cfg)?;
    Ok(cfg)
}

/// Collect every schema/admissibility violation.
pub fn validate(cfg: &ExperimentConfig) -> Result<()> {
    let mut violations: Vec<String> = Vec::new();
    if !KINDS.contains(&cfg.kind.as_str()) {
        violations.push(format!(
            "unknown experiment kind '{}' (expected one of {:?})",
            cfg.kind, KINDS
        ));
    }
    let mut check_scatterer = |spec: &Option<ScattererSpec>, name: &str, required: bool| {
        match spec {
            Some(s) => match s.build(&cfg.admissibility) {
                Ok(_) => {}
                Err(Error::Config(v)) => {
                    violations.extend(v.into_iter().map(|m| format!("{name}: {m}")));
                }
                Err(e) => violations.push(format!("{name}: {e}")),
            },
            None if required => violations.push(format!("{name} section is required")),
            None => {}
        }
    };
    let needs_scatterer = matches!(
        cfg.kind.as_str(),
        "solve" | "farfield" | "identity" | "stability" | "corner-bound" | "smallness"
    );
    check_scatterer(&cfg.scatterer, "scatterer", needs_scatterer);
    check_scatterer(
        &cfg.scatterer_second,
        "scatterer_second",
        cfg.kind == "identity" || cfg.kind == "smallness",
    );
    let needs_incident = matches!(
        cfg.kind.as_str(),
        "solve" | "farfield" | "identity" | "stability" | "smallness"
    );
    if needs_incident {
        match &cfg.incident {
            Some(inc) => {
                if let Err(e) = inc.build() {
                    match e {
                        Error::Config(v) => violations.extend(v),
                        other => violations.push(other.to_string()),
                    }
                }
                if !(inc.k > 0.0) {
                    violations.push(format!("wavenumber must be positive, got {}", inc.k));
                }
            }
            None => violations.push("incident section is required".into()),
        }
    }
    match cfg.kind.as_str() {
        "eta" | "profile" => {
            if cfg.eta.is_none() {
                violations.push("eta section (gamma, opening) is required".into());
            } else if let Some(e) = &cfg.eta {
                if e.gamma == 1.0 {
                    violations.push("gamma must differ from 1".into());
                }
                if !(e.opening > 0.0 && e.opening < std::f64::consts::PI) {
                    violations.push(format!(
                        "opening must lie in (0, pi), got {}",
                        e.opening
                    ));
                }
            }
        }
        "stability" | "smallness" => {
            let s = cfg.sweep.as_ref();
            if s.and_then(|s| s.translations.as_ref()).is_none() {
                violations.push("sweep.translations is required for this kind".into());
            }
            if let Some(sw) = s {
                if sw.jitter.unwrap_or(0.0) > 0.0 && cfg.seed.is_none() {
                    violations.push("jitter requires an explicit seed".into());
                }
            }
        }
        "corner-bound" => {
            if cfg
                .sweep
                .as_ref()
                .and_then(|s| s.apex_openings.as_ref())
                .is_none()
            {
                violations.push("sweep.apex_openings is required for corner-bound".into());
            }
        }
        "herglotz-blowup" => {
            if cfg.blowup.is_none() {
                violations.push("blowup section is required".into());
            }
            if cfg.scatterer.is_none() {
                violations.push("scatterer (polygon domain) is required".into());
            }
        }
        "disk-eig" => {
            if cfg.disk_eig.is_none() {
                violations.push("disk_eig section is required".into());
            } else if let Some(d) = &cfg.disk_eig {
                if d.gamma == 1.0 && d.q == 1.0 {
                    violations.push("disk-eig needs a contrast in gamma or q".into());
                }
                if !(d.k_max > d.k_min) {
                    violations.push("disk-eig wavenumber interval is empty".into());
                }
            }
        }
        _ => {}
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::Config(violations))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_triangle_config() -> String {
        serde_json::json!({
            "kind": "farfield",
            "scatterer": {
                "polygon": [[0.0, 0.0], [1.2, 0.0], [0.6, 1.0]],
                "gamma": 2.0,
                "q": 1.0
            },
            "incident": {"k": 1.0, "wave": "plane", "direction": [1.0, 0.0]}
        })
        .to_string()
    }

    #[test]
    fn minimal_config_accepted() {
        let cfg = parse_config_str(&minimal_triangle_config()).unwrap();
        assert_eq!(cfg.kind, "farfield");
        assert_eq!(cfg.farfield_angles, 256);
    }

    #[test]
    fn gamma_one_rejected_with_constraint_name() {
        // gamma = 1 with a contrast left in q (gamma = q = 1 would be the
        // accepted vacuum shortcut)
        let text = minimal_triangle_config()
            .replace("\"gamma\":2.0", "\"gamma\":1.0")
            .replace("\"q\":1.0", "\"q\":3.0");
        match parse_config_str(&text) {
            Err(Error::Config(v)) => {
                assert!(
                    v.iter().any(|m| m.contains("gamma must differ from 1")),
                    "{v:?}"
                );
            }
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn short_edges_rejected_with_constraint_name() {
        let text = minimal_triangle_config().replace(
            "[[0.0,0.0],[1.2,0.0],[0.6,1.0]]",
            "[[0.0,0.0],[0.01,0.0],[0.005,0.01]]",
        );
        match parse_config_str(&text) {
            Err(Error::Config(v)) => {
                assert!(
                    v.iter().any(|m| m.contains("length of each edge")),
                    "{v:?}"
                );
            }
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_keys_rejected_with_position() {
        let text = minimal_triangle_config().replace("\"kind\"", "\"mystery\":1,\"kind\"");
        match parse_config_str(&text) {
            Err(Error::Config(v)) => {
                assert!(v[0].contains("line"), "{v:?}");
                assert!(v[0].contains("mystery"), "{v:?}");
            }
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn config_roundtrip_is_identity() {
        let cfg = parse_config_str(&minimal_triangle_config()).unwrap();
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        let again = parse_config_str(&text).unwrap();
        let t1 = serde_json::to_string(&cfg).unwrap();
        let t2 = serde_json::to_string(&again).unwrap();
        assert_eq!(t1, t2);
    }

    #[test]
    fn multiple_violations_reported_together() {
        let text = serde_json::json!({
            "kind": "stability",
            "scatterer": {
                "polygon": [[0.0, 0.0], [0.01, 0.0], [0.005, 0.01]],
                "gamma": 1.0,
                "q": 2.0
            },
            "incident": {"k": -1.0, "wave": "plane", "direction": [1.0, 0.0]}
        })
        .to_string();
        match parse_config_str(&text) {
            Err(Error::Config(v)) => {
                assert!(v.len() >= 3, "expected several violations, got {v:?}");
            }
            other => panic!("expected config error, got {other:?}"),
        }
    }
}
