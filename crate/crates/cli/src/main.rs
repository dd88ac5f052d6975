use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{Map, Value};

use noisebench::estimators::estimate_each;
use noisebench::harness::{
    builtin_suite, estimate_params, evaluate, param_names, run_suite, write_params_csv, write_psd_csv,
    write_report_json, write_single_psd_csv, Seeds, SuiteRunConfig,
};
use noisebench::io::{read_meta, sidecar_path, write_dataset_as, write_meta, DatasetMeta, Dtype};
use noisebench::noise::simulate_dataset;
use noisebench::spectral::{median_psd, MultitaperConfig};
use noisebench::{Error, NoiseSpec, PulseShape, Result, TimeSeriesDataset};

#[derive(Parser)]
#[command(name = "noisebench", version, about = "Generate and score synthetic noise datasets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a dataset from a noise model.
    Generate(GenerateArgs),
    /// Score a generated dataset against a target dataset.
    Evaluate(EvaluateArgs),
    /// Run a model's parameter estimator on every series of a dataset.
    Estimate(EstimateArgs),
    /// Median multitaper PSD of a dataset, as CSV.
    Psd(PsdArgs),
    /// List or run the built-in benchmark suite.
    Suite(SuiteArgs),
}

#[derive(Args)]
struct ModelArgs {
    /// band_limited, fdwn, fgn, fbm, shot, bg or sas.
    #[arg(long)]
    model: Option<String>,
    /// Model parameter as key=value, e.g. hurst=0.8 or pulse=gaussian.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
}

#[derive(Args)]
struct MultitaperArgs {
    #[arg(long, default_value_t = 4.0)]
    nw: f64,
    #[arg(long, default_value_t = 7)]
    tapers: usize,
    #[arg(long, default_value_t = 4096)]
    nfft: usize,
    /// Subtract each series' mean before tapering.
    #[arg(long)]
    demean: bool,
}

impl MultitaperArgs {
    fn config(&self) -> MultitaperConfig {
        MultitaperConfig { nw: self.nw, k: self.tapers, nfft: self.nfft, demean: self.demean }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    num: usize,
    #[arg(long, default_value_t = 4096)]
    len: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Store single precision samples.
    #[arg(long)]
    f32: bool,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    target: PathBuf,
    #[arg(long)]
    generated: PathBuf,
    #[arg(long)]
    report: PathBuf,
    /// Overrides the model recorded in the target's metadata.
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    multitaper: MultitaperArgs,
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long = "in")]
    input: PathBuf,
    /// CSV output; defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PsdArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    multitaper: MultitaperArgs,
}

#[derive(Args)]
#[group(id = "action", required = true, args = ["list", "run"])]
struct SuiteArgs {
    #[arg(long)]
    list: bool,
    #[arg(long)]
    run: bool,
    #[arg(long, required_if_eq("run", "true"))]
    outdir: Option<PathBuf>,
    /// Fraction of the default dataset sizes.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Run only cases whose id contains this string.
    #[arg(long)]
    filter: Option<String>,
    #[command(flatten)]
    multitaper: MultitaperArgs,
}

/// Builds a spec from a model name and `key=value` pairs. Numeric values are
/// passed as numbers; unspecified parameters take the model defaults.
fn parse_spec(model: &str, params: &[String]) -> Result<NoiseSpec> {
    let model = match model {
        "bandlimited" | "band-limited" | "thermal" => "band_limited",
        other => other,
    };
    let mut obj = Map::new();
    obj.insert("model".into(), Value::String(model.into()));
    for p in params {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| Error::InvalidParameter(format!("parameter {p:?} is not KEY=VALUE")))?;
        let value = if k == "pulse" {
            let shape = PulseShape::parse(v)
                .ok_or_else(|| Error::InvalidParameter(format!("unknown pulse shape {v:?}")))?;
            Value::String(shape.name().into())
        } else if let Ok(n) = v.parse::<u64>() {
            Value::from(n)
        } else if let Ok(x) = v.parse::<f64>() {
            Value::from(x)
        } else {
            Value::String(v.into())
        };
        obj.insert(k.into(), value);
    }
    let spec: NoiseSpec = serde_json::from_value(Value::Object(obj))
        .map_err(|e| Error::InvalidParameter(format!("model {model}: {e}")))?;
    spec.validated()
}

/// Placeholder values for parameters an estimator does not need, so that a
/// spec can be built from just a model name.
fn estimation_placeholders(model: &str) -> &'static [(&'static str, &'static str)] {
    match model {
        "fdwn" => &[("d", "0")],
        "fgn" | "fbm" => &[("hurst", "0.5")],
        "shot" => &[("nu", "1")],
        "bg" => &[("p", "0.5")],
        "sas" => &[("alpha", "1")],
        "band_limited" | "bandlimited" => &[("f_lo", "0.1"), ("f_hi", "0.2")],
        _ => &[],
    }
}

fn resolve_spec(args: &ModelArgs, dataset: &Path, placeholders: bool) -> Result<NoiseSpec> {
    match &args.model {
        Some(model) => {
            let mut params = args.params.clone();
            if placeholders {
                for (k, v) in estimation_placeholders(model) {
                    if !params.iter().any(|p| p.split('=').next() == Some(k)) {
                        params.insert(0, format!("{k}={v}"));
                    }
                }
            }
            parse_spec(model, &params)
        }
        None => {
            let meta_path = sidecar_path(dataset);
            let meta = read_meta(&meta_path).map_err(|e| {
                Error::InvalidInput(format!("no --model given and no metadata at {}: {e}", meta_path.display()))
            })?;
            meta.spec
                .ok_or_else(|| Error::InvalidInput(format!("{} records no model", meta_path.display())))
        }
    }
}

fn read_any(path: &Path) -> Result<TimeSeriesDataset> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => noisebench::read_csv_dataset(path),
        _ => noisebench::read_dataset(path),
    }
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
    path.with_file_name(format!("{stem}_{suffix}"))
}

/// Writes to stdout, treating a closed pipe (e.g. `| head`) as success.
fn emit(text: &str) -> Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

fn generate(a: &GenerateArgs) -> Result<()> {
    let model = a.model.model.as_deref().ok_or_else(|| Error::InvalidParameter("--model is required".into()))?;
    let spec = parse_spec(model, &a.model.params)?;
    let ds = simulate_dataset(&spec, a.num, a.len, a.seed)?;
    write_dataset_as(&ds, &a.out, if a.f32 { Dtype::F32 } else { Dtype::F64 })?;
    let mut meta = DatasetMeta::new(format!("noisebench {}", env!("CARGO_PKG_VERSION")));
    meta.spec = Some(spec);
    meta.master_seed = Some(a.seed);
    meta.params.insert("num".into(), a.num.into());
    meta.params.insert("len".into(), a.len.into());
    write_meta(&meta, sidecar_path(&a.out))?;
    eprintln!("wrote {} series of length {} to {}", a.num, a.len, a.out.display());
    Ok(())
}

fn evaluate_cmd(a: &EvaluateArgs) -> Result<()> {
    let spec = resolve_spec(&a.model, &a.target, false)?;
    let target = read_any(&a.target)?;
    let generated = read_any(&a.generated)?;
    let mut report = evaluate(&target, &generated, &spec, &a.multitaper.config())?;
    report.case_id = a.target.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
    let seed_of = |p: &Path| read_meta(sidecar_path(p)).ok().and_then(|m| m.master_seed);
    report.seeds = Seeds { target: seed_of(&a.target), generated: seed_of(&a.generated) };
    write_report_json(&report, &a.report)?;
    write_psd_csv(&report, sibling(&a.report, "psd.csv"))?;
    write_params_csv(&report, sibling(&a.report, "params.csv"))?;
    let mut text = format!("geodesic_distance {}\n", report.geodesic_distance);
    for (name, s) in &report.target_param_summary {
        let g = report.generated_param_summary.get(name).map_or(f64::NAN, |g| g.median);
        text.push_str(&format!("{name} median target {} generated {g}\n", s.median));
    }
    emit(&text)
}

fn estimate_cmd(a: &EstimateArgs) -> Result<()> {
    let spec = resolve_spec(&a.model, &a.input, true)?;
    let ds = read_any(&a.input)?;
    let names = param_names(&spec);
    if names.is_empty() {
        return Err(Error::InvalidParameter(format!("model {} has no parameter estimator", spec.model_name())));
    }
    let results = estimate_each(&ds, |x| estimate_params(&spec, x));
    let mut text = format!("index,{},error\n", names.join(","));
    for (i, r) in results.iter().enumerate() {
        match r {
            Ok(v) => {
                let cells: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                text.push_str(&format!("{i},{},\n", cells.join(",")));
            }
            Err(e) => text.push_str(&format!("{i},{}{}\n", ",".repeat(names.len()), e.category())),
        }
    }
    match &a.out {
        Some(p) => std::fs::write(p, text)?,
        None => emit(&text)?,
    }
    Ok(())
}

fn psd_cmd(a: &PsdArgs) -> Result<()> {
    let ds = read_any(&a.input)?;
    let psd = median_psd(&ds, &a.multitaper.config())?;
    write_single_psd_csv(&psd, &a.out)
}

fn suite_cmd(a: &SuiteArgs) -> Result<()> {
    let cases: Vec<_> = builtin_suite()
        .into_iter()
        .filter(|c| a.filter.as_deref().is_none_or(|f| c.case_id.contains(f)))
        .collect();
    if a.list {
        let mut text = String::new();
        for c in &cases {
            text.push_str(&format!("{}\t{}\n", c.case_id, serde_json::to_string(&c.spec)?));
        }
        return emit(&text);
    }
    let outdir = a.outdir.clone().ok_or_else(|| Error::InvalidParameter("--outdir is required".into()))?;
    let cfg = SuiteRunConfig { outdir, scale: a.scale, master_seed: a.seed, multitaper: a.multitaper.config() };
    let mut text = String::new();
    for o in run_suite(&cases, &cfg)? {
        text.push_str(&format!("{}\t{:.6}\t{}\n", o.case_id, o.geodesic_distance, o.target_failures));
    }
    emit(&text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Generate(a) => generate(a),
        Command::Evaluate(a) => evaluate_cmd(a),
        Command::Estimate(a) => estimate_cmd(a),
        Command::Psd(a) => psd_cmd(a),
        Command::Suite(a) => suite_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let line = serde_json::json!({ "error": e.category(), "message": e.to_string() });
            eprintln!("{line}");
            ExitCode::FAILURE
        }
    }
}
