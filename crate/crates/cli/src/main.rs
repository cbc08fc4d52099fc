use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use xentangle::entanglement::IdealState;
use xentangle::fock::{ShellKind, Spin};
use xentangle::hamiltonian::ground_state;
use xentangle::model::{sha256_hex, GridSpec, Model, ModelConfig, SCHEMA_VERSION};
use xentangle::presets::{preset_config, verify_presets, PRESET_NAMES};
use xentangle::selection::{self, brightest_binding, metrics_at, xepecs_weight_profile};
use xentangle::simulation::{Simulation, CHANNEL_LABELS};
use xentangle::Error;

#[derive(Parser)]
#[command(name = "xentangle", version, about = "Core-level spectra and photoelectron-photon entanglement")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spin-resolved XPS on a binding-energy grid.
    Xps {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value_t = Which::Both)]
        spin: Which,
        /// Binding-energy grid `start:stop:step` (default: the config's XPS grid).
        #[arg(long)]
        grid: Option<String>,
        /// Also write `peaks.json` (main peak, main centroid, satellite).
        #[arg(long)]
        peaks: bool,
    },
    /// Non-coincidence emission spectrum summed over the binding grid.
    Nxes {
        #[command(flatten)]
        run: RunArgs,
        /// Emission-energy grid (default: the config's omega grid).
        #[arg(long)]
        grid: Option<String>,
    },
    /// Coincidence emission spectrum at one binding energy.
    Xepecs {
        #[command(flatten)]
        run: RunArgs,
        /// Binding energy (default: the brightest point of the binding grid).
        #[arg(long = "EB", allow_negative_numbers = true)]
        e_b: Option<f64>,
        #[arg(long, value_enum, default_value_t = Which::Both)]
        spin: Which,
        #[arg(long, value_enum, default_value_t = Pol::Both)]
        pol: Pol,
        /// Emission-energy grid (default: the config's omega grid).
        #[arg(long)]
        grid: Option<String>,
    },
    /// Two-qubit density matrix and entanglement metrics at one (E_B, omega).
    DensityMatrix {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long = "EB", allow_negative_numbers = true)]
        e_b: Option<f64>,
        /// Emission energy (default: the brightest point at the chosen E_B).
        #[arg(long, allow_negative_numbers = true)]
        omega: Option<f64>,
    },
    /// Repeat a run over values of one parameter.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// `<name>=<v1,v2,...>`; names: see `sweep --help`.
        #[arg(long = "sweep", long_help = sweep_help())]
        spec: String,
    },
    /// Check the bundled presets and atomic data files.
    VerifyPresets,
}

#[derive(Args)]
struct RunArgs {
    /// Config file or bundled preset name.
    #[arg(long)]
    config: String,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Up,
    Down,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Pol {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    Both,
}

const SOLID_STATE_AXES: [&str; 7] = ["delta", "ten_dq", "v_eg", "v_ratio", "u_dd", "u_dc", "gamma_core"];

fn sweep_help() -> String {
    format!(
        "Parameter and values, e.g. `v_eg=0,1.5,3`. Axes: {}, or `reductions.<family>` such as `reductions.F(3d,3d)`.",
        SOLID_STATE_AXES.join(", ")
    )
}

/// Failure split by exit status: 1 for input, 2 for numerics.
struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let input = e.is_input_error();
        Failure {
            code: if input { 1 } else { 2 },
            kind: if input { "input" } else { "numerical" },
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        kind: "usage",
        message: message.into(),
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: 1,
        kind: "io",
        message: format!("{}: {e}", path.display()),
    }
}

type Outcome<T> = Result<T, Failure>;

/// The model and the directory its relative data paths resolve against.
fn resolve_config(arg: &str) -> Outcome<(Model, PathBuf)> {
    let path = Path::new(arg);
    if path.exists() {
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        return Ok((Model::load(path)?, base));
    }
    if PRESET_NAMES.contains(&arg) {
        return Ok((Model::from_config(preset_config(arg)?, Path::new("."))?, PathBuf::from(".")));
    }
    Err(usage(format!(
        "config `{arg}` is neither a file nor a preset ({})",
        PRESET_NAMES.join(", ")
    )))
}

/// Collects output files in write order for the manifest.
struct Outputs {
    root: PathBuf,
    /// Prepended to every relative path, e.g. `run-000/`.
    prefix: String,
    files: Vec<(String, String)>,
}

impl Outputs {
    fn new(root: &Path) -> Outcome<Self> {
        std::fs::create_dir_all(root).map_err(|e| io_failure(root, e))?;
        Ok(Self {
            root: root.to_path_buf(),
            prefix: String::new(),
            files: Vec::new(),
        })
    }

    fn write(&mut self, rel: &str, contents: &str) -> Outcome<()> {
        let rel = format!("{}{rel}", self.prefix);
        let path = self.root.join(&rel);
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
        }
        std::fs::write(&path, contents).map_err(|e| io_failure(&path, e))?;
        self.files.push((rel, sha256_hex(contents.as_bytes())));
        Ok(())
    }

    fn write_json(&mut self, rel: &str, value: &impl serde::Serialize) -> Outcome<()> {
        let mut text = serde_json::to_string_pretty(value).expect("serializable");
        text.push('\n');
        self.write(rel, &text)
    }
}

fn grid_or(text: Option<&str>, default: GridSpec) -> Outcome<GridSpec> {
    match text {
        Some(t) => Ok(GridSpec::parse(t)?),
        None => Ok(default),
    }
}

fn spins(w: Which) -> Vec<Spin> {
    match w {
        Which::Up => vec![Spin::Up],
        Which::Down => vec![Spin::Down],
        Which::Both => Spin::BOTH.to_vec(),
    }
}

fn keep_channels(spec: &mut xentangle::spectra::SpectrumGrid, keep: &[String]) {
    spec.channels.retain(|(n, _)| keep.contains(n));
    let mut total = vec![0.0; spec.axis.len()];
    for (_, v) in &spec.channels {
        total.iter_mut().zip(v).for_each(|(t, x)| *t += x);
    }
    spec.channels.push(("total".into(), total));
}

fn xps(sim: &Simulation, spin: Which, grid: &GridSpec, out: &mut Outputs) -> Outcome<Value> {
    let off = sim.model.config.offsets.binding;
    let internal = GridSpec::new(grid.start - off, grid.stop - off, grid.step)?;
    let mut spec = sim.xps_spectrum(&internal)?;
    let keep: Vec<String> = spins(spin).iter().map(|s| s.to_string()).collect();
    keep_channels(&mut spec, &keep);
    out.write("xps.csv", &spec.to_csv(off))?;
    Ok(json!({ "spin": keep, "grid": grid }))
}

/// Peak positions in the output frame.
fn peak_summary(sim: &Simulation) -> Outcome<Value> {
    let cfg = &sim.model.config;
    let xps = sim.xps_spectrum(&cfg.grids.xps)?;
    let profile = xepecs_weight_profile(sim, &cfg.grids.binding)?;
    let p = selection::peak_summary(&xps, &profile)?;
    let off = cfg.offsets.binding;
    Ok(json!({
        "main_peak": p.main_peak + off,
        "main_centroid": p.main_centroid + off,
        "satellite": p.satellite + off,
        "separation": p.separation(),
    }))
}

fn default_binding(sim: &Simulation) -> Outcome<f64> {
    let profile = xepecs_weight_profile(sim, &sim.model.config.grids.binding)?;
    Ok(brightest_binding(&profile)?)
}

fn density(sim: &Simulation, e_b: Option<f64>, omega: Option<f64>, out: &mut Outputs, rel: &str) -> Outcome<Value> {
    let off = sim.model.config.offsets;
    let e_b = match e_b {
        Some(e) => e - off.binding,
        None => default_binding(sim)?,
    };
    let p = metrics_at(
        sim,
        e_b,
        omega.map(|w| w - off.omega),
        IdealState::for_scenario(sim.model.scenario()),
    )?;
    let mut report = p.report;
    report.e_b += off.binding;
    report.omega += off.omega;
    out.write_json(rel, &report)?;
    let up = sim.core_hole_spin_occupancy(e_b, Spin::Up)?;
    let down = sim.core_hole_spin_occupancy(e_b, Spin::Down)?;
    let occupancy = json!({
        "EB": report.e_b,
        "order": ["core_up", "core_down"],
        "photoelectron_up": up,
        "photoelectron_down": down,
    });
    out.write_json(&rel.replace("density_matrix", "core_hole"), &occupancy)?;
    let m = &report.metrics;
    Ok(json!({ "EB": report.e_b, "omega": report.omega, "T": m.tangle, "C": m.concurrence, "F": m.fidelity, "alpha": m.alpha }))
}

/// Valence spin-orbital occupations of the ground state.
fn ground_summary(model: &Model) -> Outcome<Value> {
    let g = ground_state(model)?;
    let orbitals = model.scenario().orbitals();
    let shell = orbitals.shell(ShellKind::Valence).expect("valence shell");
    let l = shell.l as i32;
    let mut occupations = Vec::new();
    let mut spin_total = [0.0; 2];
    for m in -l..=l {
        for spin in Spin::BOTH {
            let i = orbitals.index(ShellKind::Valence, m, spin);
            let n: f64 = g
                .basis
                .states()
                .iter()
                .zip(&g.vector)
                .filter(|(s, _)| s.is_occupied(i))
                .map(|(_, v)| v * v)
                .sum();
            spin_total[spin.index()] += n;
            occupations.push(json!({ "m": m, "spin": spin.to_string(), "n": n }));
        }
    }
    let weights: Vec<Value> = g
        .config_weights
        .iter()
        .map(|(c, w)| json!({ "core": c.core, "valence": c.valence, "ligand": c.ligand, "weight": w }))
        .collect();
    Ok(json!({
        "energy": g.energy,
        "m_class": g.class.to_string(),
        "degeneracy": g.degeneracy,
        "configuration_weights": weights,
        "valence_occupations": occupations,
        "valence_spin": { "up": spin_total[0], "down": spin_total[1] },
    }))
}

fn parse_sweep(spec: &str) -> Outcome<(String, Vec<f64>)> {
    let (name, values) = spec
        .split_once('=')
        .ok_or_else(|| usage(format!("sweep `{spec}`: expected <name>=<v1,v2,...>")))?;
    let name = name.trim().to_string();
    let values: Vec<f64> = values
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| v.parse().map_err(|_| usage(format!("sweep value `{v}` is not a number"))))
        .collect::<Outcome<_>>()?;
    if values.is_empty() {
        return Err(usage(format!("sweep `{name}`: empty value list")));
    }
    Ok((name, values))
}

fn set_axis(config: &mut ModelConfig, name: &str, value: f64) -> Outcome<()> {
    let s = &mut config.solid_state;
    let slot = match name {
        "delta" => &mut s.delta,
        "ten_dq" => &mut s.ten_dq,
        "v_eg" => &mut s.v_eg,
        "v_ratio" => &mut s.v_ratio,
        "u_dd" => &mut s.u_dd,
        "u_dc" => &mut s.u_dc,
        "gamma_core" => &mut config.gamma_core,
        _ => match name.strip_prefix("reductions.") {
            Some(family) if config.reductions.contains_key(family) => {
                config.reductions.get_mut(family).expect("present")
            }
            _ => {
                let mut valid: Vec<String> = SOLID_STATE_AXES.iter().map(|s| s.to_string()).collect();
                valid.extend(config.reductions.keys().map(|f| format!("reductions.{f}")));
                return Err(usage(format!("unknown sweep axis `{name}`; valid axes: {}", valid.join(", "))));
            }
        },
    };
    *slot = value;
    Ok(())
}

fn sweep(model: &Model, base: &Path, spec: &str, out: &mut Outputs) -> Outcome<Value> {
    let (name, values) = parse_sweep(spec)?;
    for &v in &values {
        set_axis(&mut model.config.clone(), &name, v)?;
    }
    let mut summary = String::from("value,EB,omega,T,C,F,alpha\n");
    let mut runs = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        let mut config = model.config.clone();
        set_axis(&mut config, &name, v)?;
        let sub = Model::from_config(config, base)?;
        let dir = format!("run-{i:03}");
        out.prefix = format!("{dir}/");
        out.write_json("config.json", &sub.config)?;
        out.write_json("ground.json", &ground_summary(&sub)?)?;
        let sim = Simulation::new(sub)?;
        let grid = sim.model.config.grids.xps;
        xps(&sim, Which::Both, &grid, out)?;
        let point = density(&sim, None, None, out, "density_matrix.json")?;
        out.prefix.clear();
        let alpha = point["alpha"].as_f64().map(|a| format!("{a:.16e}")).unwrap_or_default();
        summary.push_str(&format!(
            "{v:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{alpha}\n",
            point["EB"].as_f64().unwrap_or(f64::NAN),
            point["omega"].as_f64().unwrap_or(f64::NAN),
            point["T"].as_f64().unwrap_or(f64::NAN),
            point["C"].as_f64().unwrap_or(f64::NAN),
            point["F"].as_f64().unwrap_or(f64::NAN),
        ));
        runs.push(json!({ "value": v, "dir": dir, "metrics": point }));
    }
    out.write("summary.csv", &summary)?;
    Ok(json!({ "axis": name, "values": values, "runs": runs }))
}

fn manifest(command: &str, model: &Model, parameters: Value, out: &Outputs) -> Value {
    let outputs: Vec<Value> = out
        .files
        .iter()
        .map(|(p, h)| json!({ "path": p, "sha256": h }))
        .collect();
    json!({
        "tool": "xentangle",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "schema_version": SCHEMA_VERSION,
        "config": { "name": model.config.name, "sha256": model.config_sha256 },
        "data": { "origin": model.data_origin, "sha256": model.data_sha256 },
        "parameters": parameters,
        "outputs": outputs,
    })
}

fn finish(command: &str, model: &Model, parameters: Value, mut out: Outputs) -> Outcome<()> {
    let m = manifest(command, model, parameters, &out);
    let mut text = serde_json::to_string_pretty(&m).expect("serializable");
    text.push('\n');
    let path = out.root.join("manifest.json");
    std::fs::write(&path, &text).map_err(|e| io_failure(&path, e))?;
    out.files.clear();
    print!("{text}");
    Ok(())
}

fn run(cli: Cli) -> Outcome<()> {
    match cli.command {
        Command::VerifyPresets => {
            let report = verify_presets()?;
            println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
            if let Some(bad) = report.failures().next() {
                return Err(Error::PresetMismatch(format!("{} (expected {}, found {:?})", bad.item, bad.expected, bad.found)).into());
            }
            Ok(())
        }
        Command::Xps { run, spin, grid, peaks } => {
            let (model, _) = resolve_config(&run.config)?;
            let grid = grid_or(grid.as_deref(), model.config.grids.xps)?;
            let mut out = Outputs::new(&run.out)?;
            let sim = Simulation::new(model)?;
            let params = xps(&sim, spin, &grid, &mut out)?;
            if peaks {
                out.write_json("peaks.json", &peak_summary(&sim)?)?;
            }
            finish("xps", &sim.model, params, out)
        }
        Command::Nxes { run, grid } => {
            let (model, _) = resolve_config(&run.config)?;
            let grid = grid_or(grid.as_deref(), model.config.grids.omega)?;
            let mut out = Outputs::new(&run.out)?;
            let sim = Simulation::new(model)?;
            let off = sim.model.config.offsets;
            let spec = sim.nxes(&sim.model.config.grids.binding, &shifted(&grid, off.omega))?;
            out.write("nxes.csv", &spec.to_csv(off.omega))?;
            let params = json!({ "grid": grid, "binding_grid": sim.model.config.grids.binding });
            finish("nxes", &sim.model, params, out)
        }
        Command::Xepecs { run, e_b, spin, pol, grid } => {
            let (model, _) = resolve_config(&run.config)?;
            let grid = grid_or(grid.as_deref(), model.config.grids.omega)?;
            let mut out = Outputs::new(&run.out)?;
            let sim = Simulation::new(model)?;
            let off = sim.model.config.offsets;
            let e_b = match e_b {
                Some(e) => e - off.binding,
                None => default_binding(&sim)?,
            };
            let mut spec = sim.xepecs_spectrum(e_b, &shifted(&grid, off.omega))?;
            let pols: &[usize] = match pol {
                Pol::One => &[0],
                Pol::Two => &[1],
                Pol::Both => &[0, 1],
            };
            let keep: Vec<String> = spins(spin)
                .iter()
                .flat_map(|s| pols.iter().map(move |p| CHANNEL_LABELS[2 * s.index() + p].to_string()))
                .collect();
            keep_channels(&mut spec, &keep);
            out.write("xepecs.csv", &spec.to_csv(off.omega))?;
            let params = json!({ "EB": e_b + off.binding, "channels": keep, "grid": grid });
            finish("xepecs", &sim.model, params, out)
        }
        Command::DensityMatrix { run, e_b, omega } => {
            let (model, _) = resolve_config(&run.config)?;
            let mut out = Outputs::new(&run.out)?;
            let sim = Simulation::new(model)?;
            let params = density(&sim, e_b, omega, &mut out, "density_matrix.json")?;
            finish("density-matrix", &sim.model, params, out)
        }
        Command::Sweep { run, spec } => {
            let (model, base) = resolve_config(&run.config)?;
            parse_sweep(&spec)?;
            let mut out = Outputs::new(&run.out)?;
            let params = sweep(&model, &base, &spec, &mut out)?;
            finish("sweep", &model, params, out)
        }
    }
}

/// Grid nodes moved from the output frame into the internal one.
fn shifted(grid: &GridSpec, offset: f64) -> Vec<f64> {
    grid.nodes().into_iter().map(|x| x - offset).collect()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            report_failure(&usage(first.trim_start_matches("error: ")));
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            report_failure(&f);
            ExitCode::from(f.code)
        }
    }
}

fn report_failure(f: &Failure) {
    eprintln!("{}", json!({ "error": { "kind": f.kind, "message": f.message } }));
}
