//! Command-line front end.
//!
//! Every subcommand resolves one flat [`RunConfig`] from built-in defaults,
//! an optional `--config` JSON file and then explicit flags, in that order.
//! Each run writes a [`RunManifest`] recording the resolved config, SHA-256
//! hashes of its inputs and the files it produced. Progress goes to standard
//! error; standard output carries only machine-readable results, ending with
//! `median_err_deg=<value>` for commands that evaluate a model.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::eval::{constancy_check, err_volume, random_seeds, trace_streamline, ConstancyReport, ErrStats, Termination};
use crate::export::{default_export_dims, export_bundle, ExportOutput, ExportSpec};
use crate::net::{deserialize, serialize, Architecture, LossKind, StreamNet};
use crate::train::{train, LrSchedule, RakeSpec, TrainConfig};
use crate::volume::{gen_analytic, load_raw, read_sidecar, save_raw, save_scalar_raw, Dims, ScalarField, VectorField};

pub const RUN_MANIFEST_VERSION: u32 = 1;

/// Grid dimensions as written in a config file: `32`, `[64, 64, 16]` or `"64x64x16"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DimsArg {
    Cube(usize),
    Axes([usize; 3]),
    Text(String),
}

impl DimsArg {
    pub fn resolve(&self) -> Result<Dims> {
        match self {
            Self::Cube(n) => Dims::cube(*n),
            Self::Axes([x, y, z]) => Dims::new(*x, *y, *z),
            Self::Text(s) => parse_dims(s),
        }
    }
}

fn parse_dims(s: &str) -> Result<Dims> {
    let parts = s
        .split(['x', 'X', ','])
        .map(|t| t.trim().parse::<usize>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::Usage(format!("bad dims {s:?}: {e}")))?;
    match parts[..] {
        [n] => Dims::cube(n),
        [x, y, z] => Dims::new(x, y, z),
        _ => Err(Error::Usage(format!("bad dims {s:?}; expected N or NxNyNz"))),
    }
}

/// A rake given inline (`segment:...`), as JSON text, or as a JSON object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RakeArg {
    Spec(RakeSpec),
    Text(String),
}

impl RakeArg {
    pub fn resolve(&self) -> Result<RakeSpec> {
        match self {
            Self::Spec(s) => Ok(s.clone()),
            Self::Text(t) => t.parse(),
        }
    }
}

/// The flat configuration shared by all subcommands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Analytic field name for `generate`.
    pub field: Option<String>,
    pub dims: Option<DimsArg>,
    /// Analytic field parameters such as `A`, `B`, `C`.
    pub params: BTreeMap<String, f64>,
    /// Vector field `.raw` (with sidecar).
    pub input: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub loss: LossKind,
    pub iterations: usize,
    pub batch: Option<usize>,
    pub lr: f64,
    pub lr_decay: f64,
    pub lr_every: usize,
    pub seed: u64,
    pub seed_weight: f64,
    pub signed_seeds: bool,
    pub normalize_vectors: bool,
    pub rake: Option<RakeArg>,
    pub hidden_layers: usize,
    pub width: usize,
    pub omega0: f64,
    pub log_every: usize,
    /// Export resolutions; each entry is a cube edge length.
    pub res: Vec<usize>,
    pub outputs: Vec<ExportOutput>,
    /// Number of streamlines for `trace`.
    pub seeds: usize,
    pub step: f64,
    pub max_steps: usize,
    pub check_constancy: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let train = TrainConfig::default();
        Self {
            field: None,
            dims: None,
            params: BTreeMap::new(),
            input: None,
            model: None,
            out: None,
            loss: train.loss,
            iterations: train.iterations,
            batch: None,
            lr: train.schedule.lr0,
            lr_decay: train.schedule.factor,
            lr_every: train.schedule.every,
            seed: train.seed,
            seed_weight: train.seed_weight,
            signed_seeds: train.signed_seeds,
            normalize_vectors: train.normalize_vectors,
            rake: None,
            hidden_layers: train.architecture.hidden_layers,
            width: train.architecture.width,
            omega0: train.architecture.omega0,
            log_every: train.log_every,
            res: Vec::new(),
            outputs: vec![
                ExportOutput::ScalarRaw,
                ExportOutput::ScalarVtk,
                ExportOutput::ErrorRaw,
                ExportOutput::ErrorVtk,
            ],
            seeds: 50,
            step: 0.01,
            max_steps: 2000,
            check_constancy: false,
        }
    }
}

impl RunConfig {
    /// Defaults, then the JSON object in `file`, then `overrides`.
    pub fn resolve(file: Option<&Path>, overrides: Map<String, Value>) -> Result<Self> {
        let mut merged = match serde_json::to_value(Self::default())? {
            Value::Object(m) => m,
            _ => unreachable!("config serializes to an object"),
        };
        if let Some(path) = file {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            let parsed: Value = serde_json::from_str(&text)
                .map_err(|e| Error::Usage(format!("{}: invalid JSON: {e}", path.display())))?;
            let Value::Object(obj) = parsed else {
                return Err(Error::Usage(format!("{}: config must be a JSON object", path.display())));
            };
            merged.extend(obj);
        }
        merged.extend(overrides);
        serde_json::from_value(Value::Object(merged)).map_err(|e| Error::Usage(format!("invalid config: {e}")))
    }

    pub fn architecture(&self) -> Result<Architecture> {
        let arch = Architecture {
            hidden_layers: self.hidden_layers,
            width: self.width,
            omega0: self.omega0,
        };
        arch.validate()?;
        Ok(arch)
    }

    pub fn train_config(&self) -> Result<TrainConfig> {
        let config = TrainConfig {
            loss: self.loss,
            iterations: self.iterations,
            batch_size: self.batch,
            schedule: LrSchedule {
                lr0: self.lr,
                factor: self.lr_decay,
                every: self.lr_every,
            },
            rake: self.rake.as_ref().map(RakeArg::resolve).transpose()?,
            seed: self.seed,
            seed_weight: self.seed_weight,
            signed_seeds: self.signed_seeds,
            normalize_vectors: self.normalize_vectors,
            architecture: self.architecture()?,
            log_every: self.log_every,
        };
        config.validate()?;
        Ok(config)
    }

    fn require<'a>(&self, value: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
        value
            .as_deref()
            .ok_or_else(|| Error::Usage(format!("missing --{flag}")))
    }
}

/// What a run consumed and produced.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub command: String,
    pub config: RunConfig,
    /// Input path to lowercase hex SHA-256 of its bytes.
    pub input_hashes: BTreeMap<String, String>,
    pub outputs: Vec<PathBuf>,
    pub versions: BTreeMap<String, String>,
    pub wall_time_s: f64,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

#[derive(Debug, Parser)]
#[command(name = "streamfn", version, about = "Neural stream functions for 3D vector fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write an analytic vector field as `.raw` plus sidecar.
    Generate(GenerateArgs),
    /// Fit a stream function network to a vector field.
    Train(TrainArgs),
    /// Orthogonality error of a model on a field.
    Eval(EvalArgs),
    /// Sample a model onto grids and write raw/VTK volumes.
    Export(ExportArgs),
    /// Integrate streamlines through a field, optionally checking model constancy along them.
    Trace(TraceArgs),
}

#[derive(Debug, Args)]
struct Shared {
    /// Flat JSON config file; flags take precedence over its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Run manifest path (defaults next to the primary output).
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// rigid_rotation, abc, hill_vortex or tornado
    name: Option<String>,
    /// `N` or `NxNyNz`
    #[arg(long)]
    dims: Option<String>,
    #[arg(long = "A")]
    a: Option<f64>,
    #[arg(long = "B")]
    b: Option<f64>,
    #[arg(long = "C")]
    c: Option<f64>,
    /// Extra field parameter, `key=value`; repeatable.
    #[arg(long = "param")]
    param: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    shared: Shared,
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Vector field `.raw`
    #[arg(long)]
    input: Option<PathBuf>,
    /// Model file to write
    #[arg(long)]
    out: Option<PathBuf>,
    /// perp, pss, perp+seeds or pss+seeds
    #[arg(long)]
    loss: Option<String>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    batch: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    /// Divide the learning rate by this factor every `--lr-every` iterations
    #[arg(long)]
    lr_decay: Option<f64>,
    #[arg(long)]
    lr_every: Option<usize>,
    /// JSON rake spec or `segment:x1,y1,z1,x2,y2,z2[,n]` / `circle:cx,cy,cz,r,nx,ny,nz[,n]`
    #[arg(long)]
    rake: Option<String>,
    #[arg(long)]
    hidden_layers: Option<usize>,
    #[arg(long)]
    width: Option<usize>,
    #[arg(long)]
    omega0: Option<f64>,
    #[command(flatten)]
    shared: Shared,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    input: Option<PathBuf>,
    /// Optional error volume (degrees) as `.raw`
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    shared: Shared,
}

#[derive(Debug, Args)]
struct ExportArgs {
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    input: Option<PathBuf>,
    /// Cube resolutions; defaults to four times the field resolution
    #[arg(long, num_args = 1..)]
    res: Option<Vec<usize>>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    shared: Shared,
}

#[derive(Debug, Args)]
struct TraceArgs {
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    input: Option<PathBuf>,
    /// Number of streamlines
    #[arg(long)]
    seeds: Option<usize>,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    max_steps: Option<usize>,
    #[arg(long)]
    check_constancy: bool,
    /// Streamline JSON output
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    shared: Shared,
}

#[derive(Default)]
struct Overrides(Map<String, Value>);

impl Overrides {
    fn set<T: Serialize>(&mut self, key: &str, value: Option<T>) -> Result<()> {
        if let Some(v) = value {
            self.0.insert(key.to_string(), serde_json::to_value(v)?);
        }
        Ok(())
    }

    fn shared(mut self, shared: &Shared) -> Result<Self> {
        self.set("seed", shared.seed)?;
        Ok(self)
    }
}

/// Runs the CLI on `args` (program name first) and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .try_init();
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::Usage(_) = e {
                eprintln!("run `streamfn --help` for usage");
            }
            e.exit_code()
        }
    }
}

fn run(command: Command) -> Result<()> {
    let start = Instant::now();
    let (name, shared, config, mut outcome) = match command {
        Command::Generate(a) => {
            let mut o = Overrides::default();
            o.set("field", a.name)?;
            o.set("dims", a.dims.map(DimsArg::Text))?;
            o.set("out", a.out)?;
            let mut params = Map::new();
            for (k, v) in [("A", a.a), ("B", a.b), ("C", a.c)] {
                if let Some(v) = v {
                    params.insert(k.into(), v.into());
                }
            }
            for p in &a.param {
                let (k, v) = p
                    .split_once('=')
                    .ok_or_else(|| Error::Usage(format!("bad --param {p:?}; expected key=value")))?;
                let v: f64 = v
                    .parse()
                    .map_err(|e| Error::Usage(format!("bad --param {p:?}: {e}")))?;
                params.insert(k.into(), v.into());
            }
            let o = o.shared(&a.shared)?;
            let mut config = RunConfig::resolve(a.shared.config.as_deref(), o.0)?;
            config.params.extend(params.into_iter().map(|(k, v)| (k, v.as_f64().unwrap_or(f64::NAN))));
            let outcome = cmd_generate(&config)?;
            ("generate", a.shared, config, outcome)
        }
        Command::Train(a) => {
            let mut o = Overrides::default();
            o.set("input", a.input)?;
            o.set("out", a.out)?;
            o.set("loss", a.loss.map(|s| s.parse::<LossKind>()).transpose()?)?;
            o.set("iterations", a.iterations)?;
            o.set("batch", a.batch)?;
            o.set("lr", a.lr)?;
            o.set("lr_decay", a.lr_decay)?;
            o.set("lr_every", a.lr_every)?;
            o.set("rake", a.rake.map(RakeArg::Text))?;
            o.set("hidden_layers", a.hidden_layers)?;
            o.set("width", a.width)?;
            o.set("omega0", a.omega0)?;
            let o = o.shared(&a.shared)?;
            let config = RunConfig::resolve(a.shared.config.as_deref(), o.0)?;
            let outcome = cmd_train(&config)?;
            ("train", a.shared, config, outcome)
        }
        Command::Eval(a) => {
            let mut o = Overrides::default();
            o.set("model", a.model)?;
            o.set("input", a.input)?;
            o.set("out", a.out)?;
            let o = o.shared(&a.shared)?;
            let config = RunConfig::resolve(a.shared.config.as_deref(), o.0)?;
            let outcome = cmd_eval(&config)?;
            ("eval", a.shared, config, outcome)
        }
        Command::Export(a) => {
            let mut o = Overrides::default();
            o.set("model", a.model)?;
            o.set("input", a.input)?;
            o.set("res", a.res)?;
            o.set("out", a.out)?;
            let o = o.shared(&a.shared)?;
            let config = RunConfig::resolve(a.shared.config.as_deref(), o.0)?;
            let outcome = cmd_export(&config)?;
            ("export", a.shared, config, outcome)
        }
        Command::Trace(a) => {
            let mut o = Overrides::default();
            o.set("model", a.model)?;
            o.set("input", a.input)?;
            o.set("seeds", a.seeds)?;
            o.set("step", a.step)?;
            o.set("max_steps", a.max_steps)?;
            o.set("check_constancy", a.check_constancy.then_some(true))?;
            o.set("out", a.out)?;
            let o = o.shared(&a.shared)?;
            let config = RunConfig::resolve(a.shared.config.as_deref(), o.0)?;
            let outcome = cmd_trace(&config)?;
            ("trace", a.shared, config, outcome)
        }
    };

    let manifest_path = shared.manifest.clone().unwrap_or_else(|| outcome.default_manifest.clone());
    let mut input_hashes = BTreeMap::new();
    for path in outcome.inputs.iter().chain(&shared.config) {
        input_hashes.insert(path.display().to_string(), sha256_file(path)?);
    }
    let mut versions = BTreeMap::new();
    versions.insert("streamfn".to_string(), env!("CARGO_PKG_VERSION").to_string());
    versions.insert("model_format".to_string(), crate::net::MODEL_VERSION.to_string());
    let manifest = RunManifest {
        schema_version: RUN_MANIFEST_VERSION,
        command: name.to_string(),
        config,
        input_hashes,
        outputs: std::mem::take(&mut outcome.outputs),
        versions,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    crate::export::write_json(&manifest_path, &manifest)?;
    log::info!("run manifest: {}", manifest_path.display());

    for line in &outcome.stdout {
        println!("{line}");
    }
    if let Some(median) = outcome.median_deg {
        println!("median_err_deg={median}");
    }
    Ok(())
}

/// What a subcommand did, for the manifest and standard output.
struct Outcome {
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
    default_manifest: PathBuf,
    stdout: Vec<String>,
    median_deg: Option<f64>,
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

fn load_field(path: &Path) -> Result<VectorField> {
    let meta = read_sidecar(path)?;
    load_raw(path, &meta)
}

fn load_model(path: &Path) -> Result<StreamNet> {
    deserialize(path)
}

fn cmd_generate(config: &RunConfig) -> Result<Outcome> {
    let name = config
        .field
        .as_deref()
        .ok_or_else(|| Error::Usage("generate needs a field name".into()))?;
    let dims = config.dims.as_ref().map_or(Dims::cube(64), DimsArg::resolve)?;
    let field = gen_analytic(name, dims, &config.params)?;
    let out = config.out.clone().unwrap_or_else(|| PathBuf::from(format!("{name}.raw")));
    save_raw(&field, &out)?;
    let sidecar = crate::volume::sidecar_path(&out);
    Ok(Outcome {
        inputs: vec![],
        stdout: vec![out.display().to_string()],
        outputs: vec![out.clone(), sidecar],
        default_manifest: sibling(&out, "_run.json"),
        median_deg: None,
    })
}

fn cmd_train(config: &RunConfig) -> Result<Outcome> {
    let input = config.require(&config.input, "input")?;
    let train_config = config.train_config()?;
    let field = load_field(input)?;
    let out = config.out.clone().unwrap_or_else(|| PathBuf::from("model.snf"));
    let (net, history) = train(&field, &train_config)?;
    let provenance = serde_json::json!({
        "input": input,
        "input_sha256": sha256_file(input)?,
        "train": train_config,
    });
    serialize(&net, &out, provenance)?;
    let history_path = sibling(&out, "_history.csv");
    history.write_csv(&history_path)?;
    let (_, stats) = err_volume(&net, &field)?;
    Ok(Outcome {
        inputs: vec![input.to_path_buf(), crate::volume::sidecar_path(input)],
        outputs: vec![out.clone(), out.with_extension("json"), history_path],
        default_manifest: sibling(&out, "_run.json"),
        stdout: vec![serde_json::to_string(&stats)?],
        median_deg: Some(stats.median_deg),
    })
}

fn model_and_field(config: &RunConfig) -> Result<(PathBuf, StreamNet, PathBuf, VectorField)> {
    let model_path = config.require(&config.model, "model")?.to_path_buf();
    let input = config.require(&config.input, "input")?.to_path_buf();
    let net = load_model(&model_path)?;
    let field = load_field(&input)?;
    Ok((model_path, net, input, field))
}

fn cmd_eval(config: &RunConfig) -> Result<Outcome> {
    let (model_path, net, input, field) = model_and_field(config)?;
    let (volume, stats) = err_volume(&net, &field)?;
    let mut outputs = Vec::new();
    if let Some(out) = &config.out {
        let degrees = ScalarField::new(volume.dims(), volume.data().iter().map(|r| r.to_degrees()).collect())?;
        save_scalar_raw(&degrees, out)?;
        outputs.extend([out.clone(), crate::volume::sidecar_path(out)]);
    }
    Ok(Outcome {
        inputs: vec![model_path.clone(), input],
        outputs,
        default_manifest: sibling(&model_path, "_eval_run.json"),
        stdout: vec![serde_json::to_string(&stats)?],
        median_deg: Some(stats.median_deg),
    })
}

fn cmd_export(config: &RunConfig) -> Result<Outcome> {
    let (model_path, net, input, field) = model_and_field(config)?;
    let dir = config.out.clone().unwrap_or_else(|| PathBuf::from("export"));
    let resolutions: Vec<Dims> = if config.res.is_empty() {
        vec![default_export_dims(field.dims())]
    } else {
        config.res.iter().map(|&n| Dims::cube(n)).collect::<Result<_>>()?
    };
    let mut outputs = Vec::new();
    let mut stdout = Vec::new();
    let mut stats: Option<ErrStats> = None;
    for (i, dims) in resolutions.iter().enumerate() {
        // the error volume lives on the field grid, so it is written once
        let kinds = config
            .outputs
            .iter()
            .copied()
            .filter(|k| i == 0 || !k.needs_error());
        let mut spec = ExportSpec::new(*dims, kinds, &dir);
        spec.stem = format!("f_{}", dims.nx.max(dims.ny).max(dims.nz));
        if dims.nx != dims.ny || dims.ny != dims.nz {
            spec.stem = format!("f_{dims}");
        }
        let manifest = export_bundle(&net, &field, &spec)?;
        outputs.extend(manifest.artifacts.iter().map(|a| a.path.clone()));
        outputs.push(manifest.manifest_path.clone());
        if manifest.err_stats.is_some() {
            stats = manifest.err_stats;
        }
        stdout.push(serde_json::to_string(&manifest)?);
    }
    let stats = match stats {
        Some(s) => s,
        None => err_volume(&net, &field)?.1,
    };
    Ok(Outcome {
        inputs: vec![model_path, input],
        outputs,
        default_manifest: dir.join("run.json"),
        stdout,
        median_deg: Some(stats.median_deg),
    })
}

#[derive(Debug, Serialize)]
struct TraceLine {
    seed: [f64; 3],
    points: usize,
    termination: Termination,
}

#[derive(Debug, Serialize)]
struct TraceReport {
    lines: Vec<TraceLine>,
    constancy: Option<ConstancyReport>,
}

fn cmd_trace(config: &RunConfig) -> Result<Outcome> {
    let (model_path, net, input, field) = model_and_field(config)?;
    let seeds = random_seeds(&field, config.seeds, config.seed)?;
    let lines = seeds
        .iter()
        .map(|&s| trace_streamline(&field, s, config.step, config.max_steps))
        .collect::<Result<Vec<_>>>()?;
    let constancy = config
        .check_constancy
        .then(|| constancy_check(&net, &lines))
        .transpose()?;
    let mut outputs = Vec::new();
    if let Some(out) = &config.out {
        let polylines: Vec<_> = lines.iter().map(|l| &l.points).collect();
        crate::export::write_json(out, &polylines)?;
        outputs.push(out.clone());
    }
    let report = TraceReport {
        lines: lines
            .iter()
            .map(|l| TraceLine {
                seed: l.seed(),
                points: l.points.len(),
                termination: l.termination,
            })
            .collect(),
        constancy,
    };
    let (_, stats) = err_volume(&net, &field)?;
    Ok(Outcome {
        inputs: vec![model_path.clone(), input],
        outputs,
        default_manifest: sibling(&model_path, "_trace_run.json"),
        stdout: vec![serde_json::to_string(&report)?],
        median_deg: Some(stats.median_deg),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_forms() {
        assert_eq!(parse_dims("32").unwrap(), Dims::cube(32).unwrap());
        assert_eq!(parse_dims("64x32x8").unwrap(), Dims::new(64, 32, 8).unwrap());
        assert!(matches!(parse_dims("4x4"), Err(Error::Usage(_))));
        assert!(matches!(parse_dims("abc"), Err(Error::Usage(_))));
        let v: DimsArg = serde_json::from_str("[2,3,4]").unwrap();
        assert_eq!(v.resolve().unwrap(), Dims::new(2, 3, 4).unwrap());
    }

    #[test]
    fn precedence_is_defaults_then_file_then_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        fs::write(&path, r#"{"iterations": 50, "lr": 0.001, "width": 16}"#).unwrap();
        let mut flags = Map::new();
        flags.insert("iterations".into(), 7.into());
        let c = RunConfig::resolve(Some(&path), flags).unwrap();
        assert_eq!(c.iterations, 7);
        assert_eq!(c.lr, 0.001);
        assert_eq!(c.width, 16);
        assert_eq!(c.hidden_layers, 4);
    }

    #[test]
    fn unknown_config_keys_are_usage_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        fs::write(&path, r#"{"iteratoins": 50}"#).unwrap();
        assert!(matches!(RunConfig::resolve(Some(&path), Map::new()), Err(Error::Usage(_))));
    }

    #[test]
    fn config_round_trips_through_json() {
        let mut c = RunConfig::default();
        c.rake = Some(RakeArg::Text("segment:0,0,0,1,0,0".into()));
        c.dims = Some(DimsArg::Axes([3, 4, 5]));
        let text = serde_json::to_string(&c).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn seeds_loss_without_rake_is_usage() {
        let c = RunConfig {
            loss: LossKind::PerpSeeds,
            ..RunConfig::default()
        };
        assert!(matches!(c.train_config(), Err(Error::Usage(_))));
    }

    #[test]
    fn parse_errors_exit_two() {
        assert_eq!(main_with_args(["streamfn", "frobnicate"]), 2);
        assert_eq!(main_with_args(["streamfn", "generate", "bogus", "--dims", "4", "--out", "/nonexistent/x.raw"]), 2);
    }
}
