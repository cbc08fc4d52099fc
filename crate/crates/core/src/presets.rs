//! Bundled scenario configs and their consistency check against the data files.

use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{builtin_data, AtomicData, Model, ModelConfig};

pub const PRESET_NAMES: [&str; 3] = ["ti2o3-2p", "ti2o3-3p", "cef3-4d"];

pub fn preset_text(name: &str) -> Option<&'static str> {
    match name {
        "ti2o3-2p" => Some(include_str!("../presets/ti2o3-2p.json")),
        "ti2o3-3p" => Some(include_str!("../presets/ti2o3-3p.json")),
        "cef3-4d" => Some(include_str!("../presets/cef3-4d.json")),
        _ => None,
    }
}

pub fn preset_config(name: &str) -> Result<ModelConfig> {
    let text = preset_text(name).ok_or_else(|| Error::UnknownPreset(name.to_string()))?;
    ModelConfig::from_json(text, &format!("preset:{name}"))
}

pub fn preset(name: &str) -> Result<Model> {
    Model::from_config(preset_config(name)?, Path::new("."))
}

/// One checked entry of [`verify_presets`].
#[derive(Clone, Debug, Serialize)]
pub struct PresetCheck {
    pub item: String,
    pub expected: f64,
    pub found: Option<f64>,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PresetReport {
    pub checks: Vec<PresetCheck>,
}

impl PresetReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    pub fn failures(&self) -> impl Iterator<Item = &PresetCheck> {
        self.checks.iter().filter(|c| !c.ok)
    }
}

fn record(checks: &mut Vec<PresetCheck>, item: String, expected: f64, found: Option<f64>) {
    let ok = found.is_some_and(|v| v == expected);
    checks.push(PresetCheck {
        item,
        expected,
        found,
        ok,
    });
}

/// Validate every preset and compare the tabulated atomic values and
/// reduction factors with their reference numbers.
pub fn verify_presets() -> Result<PresetReport> {
    let mut checks = Vec::new();
    for name in PRESET_NAMES {
        let loaded = preset(name).is_ok();
        checks.push(PresetCheck {
            item: format!("{name}: loads and validates"),
            expected: 1.0,
            found: Some(if loaded { 1.0 } else { 0.0 }),
            ok: loaded,
        });
    }
    let ti = AtomicData::from_json(builtin_data("ti").expect("ti data"), "builtin:ti")?;
    let g = |cfg: &str, pair: &str, k: &str| {
        ti.configurations
            .get(cfg)
            .and_then(|c| c.g.get(pair))
            .and_then(|m| m.get(k))
            .map(|v| v.value)
    };
    let z = |cfg: &str, shell: &str| {
        ti.configurations
            .get(cfg)
            .and_then(|c| c.zeta.get(shell))
            .map(|v| v.value)
    };
    record(&mut checks, "ti 2p5 3d1 G1(2p,3d)".into(), 4.628, g("2p5 3d1", "2p,3d", "1"));
    record(&mut checks, "ti 2p5 3d1 G3(2p,3d)".into(), 2.633, g("2p5 3d1", "2p,3d", "3"));
    record(&mut checks, "ti 2p5 3d1 zeta(2p)".into(), 3.776, z("2p5 3d1", "2p"));
    record(&mut checks, "ti 3p5 3d1 G1(3p,3d)".into(), 13.819, g("3p5 3d1", "3p,3d", "1"));
    record(&mut checks, "ti 3p5 3d1 G3(3p,3d)".into(), 8.496, g("3p5 3d1", "3p,3d", "3"));
    record(&mut checks, "ti 3p5 3d1 zeta(3p)".into(), 0.434, z("3p5 3d1", "3p"));

    let expected_reductions: [(&str, &[(&str, f64)]); 3] = [
        ("ti2o3-2p", &[("F(3d,3d)", 0.85), ("F(2p,3d)", 0.85), ("G(2p,3d)", 0.85)]),
        ("ti2o3-3p", &[("F(3d,3d)", 0.85), ("F(3p,3d)", 0.75), ("G(3p,3d)", 0.75)]),
        ("cef3-4d", &[("F(4f,4f)", 0.80), ("F(4d,4f)", 0.75), ("G(4d,4f)", 0.66)]),
    ];
    for (name, families) in expected_reductions {
        let config = preset_config(name).ok();
        for &(family, factor) in families {
            let found = config.as_ref().and_then(|c| c.reductions.get(family).copied());
            record(&mut checks, format!("{name} reduction {family}"), factor, found);
        }
    }
    Ok(PresetReport { checks })
}
