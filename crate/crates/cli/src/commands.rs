//! Subcommands of the `gesture` binary.

use std::fs;
use std::io::BufReader;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::{info, warn};

use gesture_core::dataset::load_samples;
use gesture_core::eval::plot::report_charts;
use gesture_core::eval::{experiment_samples, run_experiment, ExperimentConfig, HmmParams};
use gesture_core::pipeline::{FeatureSet, PipelineConfig};
use gesture_core::recognizer::Recognizer;
use gesture_core::render::{extract_params, write_artifact, ExtractConfig, RenderParams, RenderSpec, SizeThresholds};
use gesture_core::synth::{generate_dataset, write_dataset, NoiseSpec, SynthConfig};
use gesture_core::trajectory::load_recording;
use gesture_core::Recording;

use crate::service::{classify_request, router, AppState, ClassifyRequest, RequestOptions};

#[derive(Debug, Parser)]
#[command(name = "gesture", version, about = "Finger-trajectory gesture recognition")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic dataset (recordings plus manifest).
    Synth(SynthArgs),
    /// Train a recognizer from a dataset manifest.
    Train(TrainArgs),
    /// Classify the gesture in a recording file.
    Classify(ClassifyArgs),
    /// Run a cross-validation experiment described in TOML.
    Evaluate(EvaluateArgs),
    /// Render a shape from a recording or from explicit sizes.
    Render(RenderArgs),
    /// Serve the HTTP API and the UI assets.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out: PathBuf,
    /// TOML generator settings; flags below override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub per_class: Option<usize>,
    #[arg(long)]
    pub users: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated class names.
    #[arg(long, value_delimiter = ',')]
    pub labels: Vec<String>,
    /// No jitter, warp, start shift or random placement.
    #[arg(long)]
    pub noiseless: bool,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "npen")]
    pub features: FeatureSet,
    #[arg(long, default_value_t = 64)]
    pub resample_len: usize,
    #[arg(long, default_value_t = 7)]
    pub states_single: usize,
    #[arg(long, default_value_t = 8)]
    pub states_multi: usize,
    #[arg(long, default_value_t = 8)]
    pub gaussians: usize,
    #[arg(long, default_value_t = 20)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Name reported by the service; defaults to the output file stem.
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub bank: PathBuf,
    /// Recording file, one frame per line.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    pub threshold: f64,
    #[arg(long)]
    pub top_n: Option<usize>,
    /// Write the response here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also render the best label into this directory.
    #[arg(long)]
    pub render_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Directory for report.json and the SVG charts.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub label: String,
    /// Measure sizes from the gesture in this recording.
    #[arg(long, conflicts_with_all = ["height", "diameter"])]
    pub input: Option<PathBuf>,
    #[arg(long, requires = "diameter")]
    pub height: Option<f64>,
    #[arg(long, requires = "height")]
    pub diameter: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
    /// Artifact id; defaults to the input file stem or "shape".
    #[arg(long)]
    pub id: Option<String>,
    #[arg(long, default_value_t = 80.0)]
    pub small_below: f64,
    #[arg(long, default_value_t = 160.0)]
    pub large_from: f64,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub bank: PathBuf,
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub addr: SocketAddr,
    /// Directory of static UI files served at `/`.
    #[arg(long = "static")]
    pub static_dir: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth(a) => synth(a),
        Command::Train(a) => train(a),
        Command::Classify(a) => classify(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Render(a) => render_cmd(a),
        Command::Serve(a) => serve(a),
    }
}

fn synth(a: SynthArgs) -> Result<()> {
    let mut cfg = match &a.config {
        Some(p) => toml::from_str(&fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)
            .with_context(|| format!("parsing {}", p.display()))?,
        None => SynthConfig::default(),
    };
    if let Some(n) = a.per_class {
        cfg.per_class = n;
    }
    if let Some(n) = a.users {
        cfg.users = n;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if !a.labels.is_empty() {
        cfg.labels = a.labels;
    }
    if a.noiseless {
        cfg.noise = NoiseSpec::none();
        cfg.placement.enabled = false;
    }
    let samples = generate_dataset(&cfg)?;
    let manifest = write_dataset(&samples, &cfg, &a.out)?;
    info!("wrote {} recordings to {}", manifest.samples.len(), a.out.display());
    Ok(())
}

fn file_stem(p: &Path) -> String {
    p.file_stem().map_or_else(|| "bank".into(), |s| s.to_string_lossy().into_owned())
}

fn train(a: TrainArgs) -> Result<()> {
    let samples = load_samples(&a.manifest).with_context(|| format!("loading {}", a.manifest.display()))?;
    let pipeline = PipelineConfig {
        resample_len: a.resample_len,
        features: a.features,
    };
    let hmm = HmmParams {
        states_single: a.states_single,
        states_multi: a.states_multi,
        gaussians_single: a.gaussians,
        gaussians_multi: a.gaussians,
        max_iter: a.max_iter,
        ..HmmParams::default()
    };
    let name = a.name.unwrap_or_else(|| file_stem(&a.out));
    let (rec, warnings) = Recognizer::train(&name, &samples, pipeline, &hmm, a.seed)?;
    for w in warnings {
        warn!("{w}");
    }
    rec.save(&a.out)?;
    info!("trained {} classes from {} samples into {}", rec.len(), samples.len(), a.out.display());
    Ok(())
}

fn read_recording(path: &Path) -> Result<Recording> {
    let f = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    load_recording(BufReader::new(f)).with_context(|| format!("parsing {}", path.display()))
}

fn classify(a: ClassifyArgs) -> Result<()> {
    let recognizer = Recognizer::load(&a.bank).with_context(|| format!("loading {}", a.bank.display()))?;
    let rec = read_recording(&a.input)?;
    let state = AppState {
        recognizer,
        extract: ExtractConfig::default(),
    };
    let req = ClassifyRequest {
        frames: Some(rec.frames),
        options: RequestOptions {
            rejection_threshold: Some(a.threshold),
            top_n: a.top_n,
            ..RequestOptions::default()
        },
        ..ClassifyRequest::default()
    };
    let resp = classify_request(&state, req).map_err(|e| anyhow::anyhow!("{}", e.message()))?;
    let mut text = serde_json::to_string_pretty(&resp)?;
    text.push('\n');
    match &a.out {
        Some(p) => fs::write(p, &text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    if let (Some(dir), Some(spec)) = (&a.render_dir, &resp.render) {
        let provenance = serde_json::json!({ "input": a.input, "bank": resp.bank });
        let (body, _) = write_artifact(dir, &file_stem(&a.input), spec, Some(provenance))?;
        info!("rendered {}", body.display());
    }
    Ok(())
}

fn evaluate(a: EvaluateArgs) -> Result<()> {
    let cfg = ExperimentConfig::load(&a.config).with_context(|| format!("loading {}", a.config.display()))?;
    let base = a.config.parent().unwrap_or(Path::new("."));
    let samples = experiment_samples(&cfg, base)?;
    info!("{} samples, {} runs, {} folds", samples.len(), cfg.runs.len(), cfg.folds);
    let report = run_experiment(&cfg, &samples)?;
    fs::create_dir_all(&a.out)?;
    fs::write(a.out.join("report.json"), report.to_json()?)?;
    for (name, svg) in report_charts(&report) {
        fs::write(a.out.join(name), svg)?;
    }
    for r in &report.runs {
        info!(
            "{}: recognition {:.2}%, error {:.2}%, reject {:.2}%",
            r.name, r.metrics.recognition, r.metrics.error, r.metrics.reject
        );
    }
    Ok(())
}

fn render_cmd(a: RenderArgs) -> Result<()> {
    let thresholds = SizeThresholds {
        small_below: a.small_below,
        large_from: a.large_from,
    };
    let (params, id, provenance) = match (&a.input, a.height, a.diameter) {
        (Some(input), _, _) => {
            let rec = read_recording(input)?;
            let sample = Recognizer::spot_longest(rec.frames)?;
            let cfg = ExtractConfig {
                thresholds,
                ..ExtractConfig::default()
            };
            let params = extract_params(&sample, &cfg)?;
            (params, file_stem(input), serde_json::json!({ "input": input }))
        }
        (None, Some(h), Some(d)) => (
            RenderParams::new(h, d, &thresholds)?,
            "shape".to_string(),
            serde_json::json!({ "height": h, "diameter": d }),
        ),
        _ => bail!("give --input or both --height and --diameter"),
    };
    let spec = RenderSpec {
        label: a.label,
        params,
        output: None,
    };
    let (body, side) = write_artifact(&a.out, a.id.as_deref().unwrap_or(&id), &spec, Some(provenance))?;
    info!("wrote {} and {}", body.display(), side.display());
    Ok(())
}

fn serve(a: ServeArgs) -> Result<()> {
    let recognizer = Recognizer::load(&a.bank).with_context(|| format!("loading {}", a.bank.display()))?;
    info!("loaded {} classes from {}", recognizer.len(), a.bank.display());
    let app = router(
        AppState {
            recognizer,
            extract: ExtractConfig::default(),
        },
        a.static_dir,
    );
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind(a.addr).await?;
        info!("listening on {}", listener.local_addr()?);
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await?;
        Ok(())
    })
}
