//! Scenario configuration, atomic parameter tables and their validation.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::angular::SlaterSet;
use crate::error::{Error, Result};
use crate::fock::OrbitalSet;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scenario {
    #[serde(rename = "ti-2p")]
    Ti2p,
    #[serde(rename = "ti-3p")]
    Ti3p,
    #[serde(rename = "ce-4d")]
    Ce4d,
}

impl Scenario {
    pub fn core_l(self) -> u32 {
        match self {
            Scenario::Ti2p | Scenario::Ti3p => 1,
            Scenario::Ce4d => 2,
        }
    }

    pub fn valence_l(self) -> u32 {
        match self {
            Scenario::Ti2p | Scenario::Ti3p => 2,
            Scenario::Ce4d => 3,
        }
    }

    pub fn has_ligand(self) -> bool {
        !matches!(self, Scenario::Ce4d)
    }

    /// Valence electrons in the ground configuration without ligand holes.
    pub fn valence_electrons(self) -> u32 {
        1
    }

    pub fn core_label(self) -> &'static str {
        match self {
            Scenario::Ti2p => "2p",
            Scenario::Ti3p => "3p",
            Scenario::Ce4d => "4d",
        }
    }

    pub fn valence_label(self) -> &'static str {
        match self {
            Scenario::Ti2p | Scenario::Ti3p => "3d",
            Scenario::Ce4d => "4f",
        }
    }

    pub fn orbitals(self) -> OrbitalSet {
        OrbitalSet::new(self.core_l(), self.valence_l(), self.has_ligand())
    }
}

/// Atomic configuration labels used for each stage's parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageConfigurations {
    pub ground: String,
    pub intermediate: String,
    #[serde(rename = "final")]
    pub final_: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolidState {
    /// Charge-transfer energy `ε_d - ε_P`.
    pub delta: f64,
    pub ten_dq: f64,
    pub v_eg: f64,
    #[serde(default = "default_v_ratio")]
    pub v_ratio: f64,
    pub u_dd: f64,
    pub u_dc: f64,
    #[serde(default)]
    pub delta_convention: DeltaConvention,
}

/// How `delta` fixes the valence level relative to the ligand level (`ε_P = 0`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeltaConvention {
    /// `ε_d = Δ`.
    #[default]
    Level,
    /// `E(d^{n+1}L) - E(d^n) = Δ` for the ground-state count `n`, i.e. `ε_d = Δ - n U_dd`.
    Configuration,
}

fn default_v_ratio() -> f64 {
    0.5
}

impl SolidState {
    /// Valence level energy for a scenario with `n` ground-state valence electrons.
    pub fn valence_level(&self, n: u32) -> f64 {
        match self.delta_convention {
            DeltaConvention::Level => self.delta,
            DeltaConvention::Configuration => self.delta - n as f64 * self.u_dd,
        }
    }
}

impl Default for SolidState {
    fn default() -> Self {
        Self {
            delta: 0.0,
            ten_dq: 0.0,
            v_eg: 0.0,
            v_ratio: default_v_ratio(),
            u_dd: 0.0,
            u_dc: 0.0,
            delta_convention: DeltaConvention::Level,
        }
    }
}

/// Half widths at half maximum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Width {
    pub lorentz: f64,
    pub gauss: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Broadening {
    pub xps: Width,
    pub xepecs: Width,
}

impl Default for Broadening {
    fn default() -> Self {
        Self {
            xps: Width {
                lorentz: 0.7,
                gauss: 0.5,
            },
            xepecs: Width {
                lorentz: 1.0,
                gauss: 1.0,
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    pub k_in: [f64; 3],
    pub k_pe: [f64; 3],
    pub k_out: [f64; 3],
    #[serde(default = "default_eps_in")]
    pub eps_in: [f64; 3],
}

fn default_eps_in() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

impl Default for Geometry {
    fn default() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            k_in: [1.0, 0.0, 0.0],
            k_pe: [0.0, 1.0, 0.0],
            k_out: [h, h, 0.0],
            eps_in: default_eps_in(),
        }
    }
}

/// Uniform grid `start, start + step, ...` up to and including `stop`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        let g = Self { start, stop, step };
        g.validate("grid")?;
        Ok(g)
    }

    /// Parse `start:stop:step`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidGrid(format!("expected start:stop:step, got `{text}`")));
        }
        let mut v = [0.0; 3];
        for (slot, p) in v.iter_mut().zip(&parts) {
            *slot = p
                .trim()
                .parse()
                .map_err(|_| Error::InvalidGrid(format!("`{p}` is not a number")))?;
        }
        Self::new(v[0], v[1], v[2])
    }

    pub fn validate(&self, field: &str) -> Result<()> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.step.is_finite()) {
            return Err(Error::InvalidGrid(format!("{field}: values must be finite")));
        }
        if self.step <= 0.0 {
            return Err(Error::InvalidGrid(format!("{field}: step must be positive")));
        }
        if self.stop < self.start {
            return Err(Error::InvalidGrid(format!("{field}: stop is below start")));
        }
        if self.len() > 10_000_000 {
            return Err(Error::InvalidGrid(format!("{field}: too many nodes")));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.start + i as f64 * self.step).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grids {
    /// Binding-energy axis of XPS spectra.
    pub xps: GridSpec,
    /// Binding-energy nodes summed for NXES.
    pub binding: GridSpec,
    /// Emitted photon energy axis.
    pub omega: GridSpec,
}

/// Added to energy axes at output time only.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Offsets {
    #[serde(default)]
    pub binding: f64,
    #[serde(default)]
    pub omega: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverOptions {
    /// Krylov space size per intermediate block; blocks not larger than this
    /// are diagonalized densely.
    #[serde(default = "default_krylov_dim")]
    pub krylov_dim: usize,
    /// Highest number of ligand holes kept (2 gives d¹ + d²L + d³L²).
    #[serde(default = "default_ligand_holes")]
    pub max_ligand_holes: u32,
}

fn default_krylov_dim() -> usize {
    400
}

fn default_ligand_holes() -> u32 {
    2
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            krylov_dim: default_krylov_dim(),
            max_ligand_holes: default_ligand_holes(),
        }
    }
}

fn yes() -> bool {
    true
}

/// Switches for individual Hamiltonian terms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Interactions {
    #[serde(default = "yes")]
    pub valence_spin_orbit: bool,
    #[serde(default = "yes")]
    pub core_spin_orbit: bool,
    /// F^k>0 valence-valence and all core-valence multipole terms.
    #[serde(default = "yes")]
    pub multiplets: bool,
    #[serde(default = "yes")]
    pub crystal_field: bool,
    #[serde(default = "yes")]
    pub hybridization: bool,
}

impl Default for Interactions {
    fn default() -> Self {
        Self {
            valence_spin_orbit: true,
            core_spin_orbit: true,
            multiplets: true,
            crystal_field: true,
            hybridization: true,
        }
    }
}

/// Angular factor of the outgoing photoelectron partial wave.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HarmonicConvention {
    /// `conj(Y_lm(k_PE))`
    #[default]
    Conjugate,
    /// `Y_lm(k_PE)`
    Direct,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub schema_version: u32,
    pub name: String,
    pub scenario: Scenario,
    /// `builtin:<name>` or a path relative to the config file.
    pub atomic_data: String,
    pub atomic_configurations: StageConfigurations,
    #[serde(default)]
    pub solid_state: SolidState,
    pub reductions: BTreeMap<String, f64>,
    /// Inverse core-hole lifetime Γ (eV).
    pub gamma_core: f64,
    #[serde(default)]
    pub broadening: Broadening,
    #[serde(default)]
    pub geometry: Geometry,
    pub grids: Grids,
    #[serde(default)]
    pub offsets: Offsets,
    #[serde(default)]
    pub solver: SolverOptions,
    #[serde(default)]
    pub interactions: Interactions,
    #[serde(default)]
    pub photoelectron_harmonic: HarmonicConvention,
}

fn check_finite(field: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(field, "must be finite"))
    }
}

fn norm(v: [f64; 3]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn check_unit(field: &str, v: [f64; 3]) -> Result<()> {
    let n = norm(v);
    if !n.is_finite() || (n - 1.0).abs() > 1e-9 {
        return Err(Error::config(field, format!("must be a unit vector (|v| = {n})")));
    }
    Ok(())
}

fn check_width(field: &str, w: Width) -> Result<()> {
    check_finite(&format!("{field}.lorentz"), w.lorentz)?;
    check_finite(&format!("{field}.gauss"), w.gauss)?;
    if w.lorentz < 0.0 || w.gauss < 0.0 || (w.lorentz == 0.0 && w.gauss == 0.0) {
        return Err(Error::config(field, "widths must be non-negative and not both zero"));
    }
    Ok(())
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::config(
                "schema_version",
                format!("unsupported version {} (expected {SCHEMA_VERSION})", self.schema_version),
            ));
        }
        let s = &self.solid_state;
        for (field, v) in [
            ("solid_state.delta", s.delta),
            ("solid_state.ten_dq", s.ten_dq),
            ("solid_state.v_eg", s.v_eg),
            ("solid_state.v_ratio", s.v_ratio),
            ("solid_state.u_dd", s.u_dd),
            ("solid_state.u_dc", s.u_dc),
            ("offsets.binding", self.offsets.binding),
            ("offsets.omega", self.offsets.omega),
        ] {
            check_finite(field, v)?;
        }
        for (family, &r) in &self.reductions {
            if !(r > 0.0 && r <= 1.0) {
                return Err(Error::config(
                    format!("reductions.{family}"),
                    format!("factor {r} outside (0, 1]"),
                ));
            }
        }
        if !(self.gamma_core > 0.0 && self.gamma_core.is_finite()) {
            return Err(Error::config("gamma_core", "must be positive"));
        }
        check_width("broadening.xps", self.broadening.xps)?;
        check_width("broadening.xepecs", self.broadening.xepecs)?;
        let g = &self.geometry;
        check_unit("geometry.k_in", g.k_in)?;
        check_unit("geometry.k_pe", g.k_pe)?;
        check_unit("geometry.k_out", g.k_out)?;
        check_unit("geometry.eps_in", g.eps_in)?;
        let dot: f64 = g.eps_in.iter().zip(g.k_in).map(|(a, b)| a * b).sum();
        if dot.abs() > 1e-9 {
            return Err(Error::config("geometry.eps_in", "must be orthogonal to k_in"));
        }
        if g.k_out[0].hypot(g.k_out[1]) < 1e-9 {
            return Err(Error::config("geometry.k_out", "must not be parallel to z"));
        }
        for (field, grid) in [
            ("grids.xps", self.grids.xps),
            ("grids.binding", self.grids.binding),
            ("grids.omega", self.grids.omega),
        ] {
            grid.validate(field).map_err(|e| Error::config(field, e.to_string()))?;
        }
        if self.solver.krylov_dim == 0 {
            return Err(Error::config("solver.krylov_dim", "must be positive"));
        }
        if self.solver.max_ligand_holes > 2 && self.scenario.has_ligand() {
            return Err(Error::config("solver.max_ligand_holes", "at most 2 supported"));
        }
        Ok(())
    }

    pub fn from_json(text: &str, context: &str) -> Result<Self> {
        let config: ModelConfig = serde_json::from_str(text).map_err(|source| Error::Parse {
            context: context.to_string(),
            source,
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// Parse and validate a config file.
pub fn load_config(path: impl AsRef<Path>) -> Result<ModelConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    ModelConfig::from_json(&text, &path.display().to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourcedValue {
    pub value: f64,
    pub source: String,
}

/// Parameters of one atomic configuration, keyed by shell pair (`"2p,3d"`)
/// then multipole order.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomicConfiguration {
    #[serde(rename = "F", default)]
    pub f: BTreeMap<String, BTreeMap<String, SourcedValue>>,
    #[serde(rename = "G", default)]
    pub g: BTreeMap<String, BTreeMap<String, SourcedValue>>,
    #[serde(default)]
    pub zeta: BTreeMap<String, SourcedValue>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomicData {
    pub schema_version: u32,
    pub element: String,
    pub configurations: BTreeMap<String, AtomicConfiguration>,
}

fn shell_l(label: &str) -> Option<u32> {
    match label.chars().last()? {
        's' => Some(0),
        'p' => Some(1),
        'd' => Some(2),
        'f' => Some(3),
        _ => None,
    }
}

impl AtomicData {
    pub fn from_json(text: &str, context: &str) -> Result<Self> {
        let data: AtomicData = serde_json::from_str(text).map_err(|source| Error::Parse {
            context: context.to_string(),
            source,
        })?;
        data.validate(context)?;
        Ok(data)
    }

    fn validate(&self, context: &str) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::config(format!("{context}: schema_version"), "unsupported version"));
        }
        for (label, cfg) in &self.configurations {
            let check = |path: String, v: &SourcedValue| -> Result<()> {
                if !v.value.is_finite() {
                    return Err(Error::config(path, "value must be finite"));
                }
                if v.source.trim().is_empty() {
                    return Err(Error::config(path, "missing provenance (`source`)"));
                }
                Ok(())
            };
            for (kind, table) in [("F", &cfg.f), ("G", &cfg.g)] {
                for (pair, ks) in table {
                    for (k, v) in ks {
                        if k.parse::<u32>().is_err() {
                            return Err(Error::config(
                                format!("{context}: {label}.{kind}.{pair}"),
                                format!("multipole key `{k}` is not an integer"),
                            ));
                        }
                        check(format!("{context}: {label}.{kind}.{pair}.{k}"), v)?;
                    }
                    self.slater(label, pair, false)?;
                }
            }
            for (shell, v) in &cfg.zeta {
                check(format!("{context}: {label}.zeta.{shell}"), v)?;
            }
        }
        Ok(())
    }

    pub fn configuration(&self, label: &str) -> Result<&AtomicConfiguration> {
        self.configurations.get(label).ok_or_else(|| {
            Error::config(
                "atomic_configurations",
                format!("configuration `{label}` not found in {} data", self.element),
            )
        })
    }

    /// Raw (unreduced) integrals of one shell pair such as `"3p,3d"`, or an
    /// empty set when the configuration lists none.
    pub fn slater(&self, configuration: &str, pair: &str, with_exchange: bool) -> Result<SlaterSet> {
        let cfg = self.configuration(configuration)?;
        let (a, b) = pair
            .split_once(',')
            .ok_or_else(|| Error::config("atomic_data", format!("bad shell pair `{pair}`")))?;
        let (la, lb) = match (shell_l(a), shell_l(b)) {
            (Some(la), Some(lb)) => (la, lb),
            _ => return Err(Error::config("atomic_data", format!("bad shell pair `{pair}`"))),
        };
        let mut set = SlaterSet::new((la, lb));
        if let Some(ks) = cfg.f.get(pair) {
            for (k, v) in ks {
                set.f.insert(k.parse().unwrap_or(u32::MAX), v.value);
            }
        }
        if with_exchange || a != b {
            if let Some(ks) = cfg.g.get(pair) {
                for (k, v) in ks {
                    set.g.insert(k.parse().unwrap_or(u32::MAX), v.value);
                }
            }
        }
        set.validate()?;
        Ok(set)
    }

    pub fn zeta(&self, configuration: &str, shell: &str) -> Result<f64> {
        Ok(self.configuration(configuration)?.zeta.get(shell).map(|v| v.value).unwrap_or(0.0))
    }
}

/// Scale every integral family of `raw` by its reduction factor; the families
/// are named `F(a,b)` and `G(a,b)` after the shell pair.
pub fn apply_reductions(raw: &SlaterSet, pair: &str, reductions: &BTreeMap<String, f64>) -> Result<SlaterSet> {
    let factor = |kind: &str| -> Result<f64> {
        let family = format!("{kind}({pair})");
        reductions.get(&family).copied().ok_or(Error::MissingReduction(family))
    };
    let mut out = raw.clone();
    if !raw.f.is_empty() {
        let r = factor("F")?;
        out.f.values_mut().for_each(|v| *v *= r);
    }
    if !raw.g.is_empty() {
        let r = factor("G")?;
        out.g.values_mut().for_each(|v| *v *= r);
    }
    Ok(out)
}

const BUILTIN_DATA: &[(&str, &str)] = &[
    ("ti", include_str!("../data/ti.json")),
    ("ce", include_str!("../data/ce.json")),
];

pub fn builtin_data(name: &str) -> Option<&'static str> {
    BUILTIN_DATA.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// A validated config together with its resolved atomic data.
#[derive(Clone, Debug)]
pub struct Model {
    pub config: ModelConfig,
    pub atomic: AtomicData,
    pub config_sha256: String,
    pub data_sha256: String,
    pub data_origin: String,
}

impl Model {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let config = ModelConfig::from_json(&text, &path.display().to_string())?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::assemble(config, sha256_hex(text.as_bytes()), &base)
    }

    /// Build from an in-memory config; relative data paths resolve against `base`.
    pub fn from_config(config: ModelConfig, base: &Path) -> Result<Self> {
        config.validate()?;
        let hash = sha256_hex(config.to_json().as_bytes());
        Self::assemble(config, hash, base)
    }

    fn assemble(config: ModelConfig, config_sha256: String, base: &Path) -> Result<Self> {
        let (text, origin) = if let Some(name) = config.atomic_data.strip_prefix("builtin:") {
            let text = builtin_data(name).ok_or_else(|| {
                Error::config("atomic_data", format!("unknown builtin data set `{name}`"))
            })?;
            (text.to_string(), config.atomic_data.clone())
        } else {
            let p: PathBuf = base.join(&config.atomic_data);
            let text = std::fs::read_to_string(&p).map_err(|source| Error::Io {
                path: p.clone(),
                source,
            })?;
            (text, p.display().to_string())
        };
        let atomic = AtomicData::from_json(&text, &origin)?;
        let model = Self {
            data_sha256: sha256_hex(text.as_bytes()),
            config_sha256,
            atomic,
            config,
            data_origin: origin,
        };
        model.stage_parameters(crate::fock::Stage::Ground)?;
        model.stage_parameters(crate::fock::Stage::Intermediate)?;
        model.stage_parameters(crate::fock::Stage::Final)?;
        Ok(model)
    }

    pub fn scenario(&self) -> Scenario {
        self.config.scenario
    }

    fn configuration_label(&self, stage: crate::fock::Stage) -> &str {
        let c = &self.config.atomic_configurations;
        match stage {
            crate::fock::Stage::Ground => &c.ground,
            crate::fock::Stage::Intermediate => &c.intermediate,
            crate::fock::Stage::Final => &c.final_,
        }
    }

    /// Reduced integrals and spin-orbit constants for one stage.
    pub fn stage_parameters(&self, stage: crate::fock::Stage) -> Result<StageParameters> {
        let label = self.configuration_label(stage);
        let sc = self.scenario();
        let (core, val) = (sc.core_label(), sc.valence_label());
        let vv_pair = format!("{val},{val}");
        let cv_pair = format!("{core},{val}");
        let reductions = &self.config.reductions;
        let vv_raw = self.atomic.slater(label, &vv_pair, false)?;
        if vv_raw.f.contains_key(&0) {
            return Err(Error::config(
                "atomic_data",
                format!("{label}: F0({vv_pair}) is derived from u_dd and must not be tabulated"),
            ));
        }
        let valence = apply_reductions(&vv_raw, &vv_pair, reductions)?;
        let core_valence = if stage == crate::fock::Stage::Intermediate {
            let raw = self.atomic.slater(label, &cv_pair, true)?;
            if raw.f.contains_key(&0) {
                return Err(Error::config(
                    "atomic_data",
                    format!("{label}: F0({cv_pair}) is carried by u_dc and must not be tabulated"),
                ));
            }
            Some(apply_reductions(&raw, &cv_pair, reductions)?)
        } else {
            None
        };
        Ok(StageParameters {
            valence,
            core_valence,
            zeta_valence: self.atomic.zeta(label, val)?,
            zeta_core: if stage == crate::fock::Stage::Intermediate {
                self.atomic.zeta(label, core)?
            } else {
                0.0
            },
        })
    }
}

/// Reduced atomic parameters entering one stage Hamiltonian.
#[derive(Clone, Debug, PartialEq)]
pub struct StageParameters {
    /// `F^k(v,v)` for `k > 0`.
    pub valence: SlaterSet,
    /// `F^k(c,v)` for `k > 0` and `G^k(c,v)`; intermediate stage only.
    pub core_valence: Option<SlaterSet>,
    pub zeta_valence: f64,
    pub zeta_core: f64,
}
