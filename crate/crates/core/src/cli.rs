//! Command-line front end. Exit codes: 0 ok, 1 I/O or argument error,
//! 2 domain error, 3 verification mismatch.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::config::{CliConfig, FileConfig};
use crate::dataset::{build_training_corpus, verify_corpus, CorpusRecipe, Manifest, MANIFEST_FILE};
use crate::decode::DecodeError;
use crate::eval::{
    build_eval_suite, format_report, parse_suite_json, score_directory, suite_json, write_ground_truth, Column, EvalCase, EvalError,
    Mapping, ScoreReport, SuiteConfig,
};
use crate::geometry::{from_json, to_json};
use crate::prompt::{prompt_for_plan, serialize, style_token};
use crate::render::{render, EncodingStyle, RasterImage};
use crate::synth::{synthesize, PlanSpec, SynthError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "planforge", version, about = "Floor-plan datasets, prompts, decoding and evaluation")]
pub struct Cli {
    /// Settings file (default: ./planforge.toml when present).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads for batch work (default: logical cores).
    #[arg(long, global = true, env = "PLANFORGE_JOBS")]
    pub jobs: Option<usize>,
    /// Master seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Grid size in cells; overrides the spec's grid.
    #[arg(long, global = true)]
    pub grid: Option<i32>,
    /// Image side in pixels.
    #[arg(long, global = true)]
    pub resolution: Option<u32>,
    /// Palette quantization distance used when decoding.
    #[arg(long, global = true)]
    pub threshold: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize one plan from a spec.
    Generate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Render a plan JSON in one style.
    Render {
        #[arg(long)]
        plan: PathBuf,
        /// r, sr, se or sre.
        #[arg(long)]
        style: Option<String>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Build training corpora with manifests.
    Dataset {
        /// r, sr, se, sre or all.
        #[arg(long)]
        style: Option<String>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Export the evaluation suite, or the training prompt of a plan.
    Prompts(PromptsArgs),
    /// Decode images into plan descriptions.
    Decode {
        #[arg(long)]
        style: Option<String>,
        #[arg(required = true)]
        images: Vec<PathBuf>,
        /// Output file for one image, or directory for several.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Score generated images against the suite.
    Evaluate(EvaluateArgs),
    /// Check a corpus against its manifest.
    Verify {
        #[arg(long)]
        manifest: PathBuf,
        /// Style directory (default: the manifest's directory).
        #[arg(long)]
        dir: Option<PathBuf>,
    },
    /// Render reference images for every suite prompt.
    GroundTruth {
        /// Suite JSON (default: the built-in suite).
        #[arg(long)]
        suite: Option<PathBuf>,
        /// Column: b, r, sr, se, sre or all.
        #[arg(long)]
        style: Option<String>,
        /// Images per prompt for the built-in suite.
        #[arg(long)]
        samples: Option<u32>,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct PromptsArgs {
    /// Export the evaluation suite.
    #[arg(long, conflicts_with = "plan")]
    pub suite: bool,
    /// Print the training prompt of this plan instead.
    #[arg(long)]
    pub plan: Option<PathBuf>,
    #[arg(long)]
    pub style: Option<String>,
    /// Images per prompt.
    #[arg(long)]
    pub samples: Option<u32>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Suite JSON (default: the built-in suite).
    #[arg(long)]
    pub suite: Option<PathBuf>,
    /// Image directory; with `--style all`, one subdirectory per column.
    #[arg(long)]
    pub images: PathBuf,
    /// Column: b, r, sr, se, sre or all.
    #[arg(long)]
    pub style: Option<String>,
    /// text, csv or markdown.
    #[arg(long)]
    pub report: Option<String>,
    /// Images per prompt for the built-in suite.
    #[arg(long)]
    pub samples: Option<u32>,
    /// JSON object mapping file names to case ids.
    #[arg(long)]
    pub mapping: Option<PathBuf>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn io(m: impl std::fmt::Display) -> Self {
        CliError { code: EXIT_IO, message: m.to_string() }
    }
    fn domain(m: impl std::fmt::Display) -> Self {
        CliError { code: EXIT_DOMAIN, message: m.to_string() }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::GroundTruth(_) => CliError::domain(e),
            _ => CliError::io(e),
        }
    }
}

fn read_text(p: &Path) -> Result<String, CliError> {
    fs::read_to_string(p).map_err(|e| CliError::io(format!("{}: {e}", p.display())))
}

fn write_out(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| CliError::io(format!("{}: {e}", dir.display())))?;
            }
            fs::write(p, text).map_err(|e| CliError::io(format!("{}: {e}", p.display())))
        }
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn one_style(s: Option<&str>) -> Result<EncodingStyle, CliError> {
    s.ok_or_else(|| CliError::io("--style is required"))?.parse().map_err(CliError::io)
}

fn styles(s: Option<&str>) -> Result<Vec<EncodingStyle>, CliError> {
    match s {
        None | Some("all") => Ok(EncodingStyle::ALL.to_vec()),
        Some(s) => Ok(vec![s.parse().map_err(CliError::io)?]),
    }
}

fn columns(s: Option<&str>) -> Result<Vec<Column>, CliError> {
    match s {
        None | Some("all") => Ok(Column::ALL.to_vec()),
        Some(s) => Column::from_label(s).map(|c| vec![c]).ok_or_else(|| CliError::io(format!("unknown column `{s}` (expected b, r, sr, se, sre or all)"))),
    }
}

fn load_suite(path: Option<&Path>, cfg: &CliConfig) -> Result<Vec<EvalCase>, CliError> {
    match path {
        Some(p) => Ok(parse_suite_json(&read_text(p)?)?),
        None => Ok(build_eval_suite(&SuiteConfig { samples: cfg.samples, ..SuiteConfig::default() })?),
    }
}

/// Parses `args` and runs the command, returning the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_IO } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    let file = FileConfig::discover(cli.config.as_deref()).map_err(CliError::io)?;
    let (style_flag, report_flag, samples_flag) = match &cli.command {
        Command::Render { style, .. } | Command::Dataset { style, .. } | Command::Decode { style, .. } => (style.clone(), None, None),
        Command::GroundTruth { style, samples, .. } => (style.clone(), None, *samples),
        Command::Prompts(a) => (a.style.clone(), None, a.samples),
        Command::Evaluate(a) => (a.style.clone(), a.report.clone(), a.samples),
        _ => (None, None, None),
    };
    let flags = FileConfig {
        seed: cli.seed,
        grid: cli.grid,
        resolution: cli.resolution,
        style: style_flag,
        jobs: cli.jobs,
        report: report_flag,
        threshold: cli.threshold,
        samples: samples_flag,
    };
    let cfg = CliConfig::merge(&flags, &file).map_err(CliError::io)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cfg.jobs {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(CliError::io)?;
    pool.install(|| dispatch(cli.command, &cfg))
}

fn dispatch(command: Command, cfg: &CliConfig) -> Result<(), CliError> {
    let style = cfg.style.as_deref();
    match command {
        Command::Generate { spec, output } => {
            let mut spec = PlanSpec::from_json(&read_text(&spec)?).map_err(CliError::io)?;
            if let Some(s) = cfg.seed {
                spec.seed = s;
            }
            if let Some(g) = cfg.grid {
                spec.grid = g;
            }
            let plan = synthesize(&spec).map_err(|e: SynthError| CliError::domain(e))?;
            write_out(output.as_deref(), &to_json(&plan))
        }
        Command::Render { plan, output, .. } => {
            let plan = from_json(&read_text(&plan)?).map_err(CliError::io)?;
            let img = render(&plan, one_style(style)?, cfg.resolution).map_err(CliError::domain)?;
            img.write_png(&output).map_err(|e| CliError::io(format!("{}: {e}", output.display())))
        }
        Command::Dataset { output, .. } => {
            let recipe = CorpusRecipe { resolution: cfg.resolution, ..CorpusRecipe::with_seed(cfg.seed_or_default()) };
            for s in styles(style)? {
                let m = build_training_corpus(s, &recipe, &output).map_err(|e| match e {
                    crate::dataset::DatasetError::Infeasible { .. } | crate::dataset::DatasetError::Render(_) => CliError::domain(e),
                    _ => CliError::io(e),
                })?;
                eprintln!("{}: {} items in {}", s.label(), m.records.len(), output.join(s.name()).display());
            }
            Ok(())
        }
        Command::Prompts(a) => {
            if let Some(plan) = a.plan {
                let plan = from_json(&read_text(&plan)?).map_err(CliError::io)?;
                let p = prompt_for_plan(&plan, style_token(one_style(style)?)).map_err(|e| CliError::domain(e.reason))?;
                return write_out(a.output.as_deref(), &serialize(&p));
            }
            if !a.suite {
                return Err(CliError::io("pass --suite or --plan"));
            }
            let suite = load_suite(None, cfg)?;
            write_out(a.output.as_deref(), &suite_json(&suite, &columns(style)?))
        }
        Command::Decode { images, output, .. } => decode_batch(&images, one_style(style)?, cfg.threshold, output.as_deref()),
        Command::Evaluate(a) => {
            let suite = load_suite(a.suite.as_deref(), cfg)?;
            let cols = columns(style)?;
            let single = style.is_some_and(|s| s != "all");
            let mapping = a.mapping.map_or(Mapping::FileNames, Mapping::Sidecar);
            let mut report = ScoreReport::empty(&cols);
            for &c in &cols {
                let dir = if single { a.images.clone() } else { a.images.join(c.dir()) };
                report.merge(&score_directory(&dir, &suite, c, &mapping)?);
            }
            for u in &report.unmatched {
                eprintln!("warning: no case for {u}");
            }
            write_out(a.output.as_deref(), &format_report(&report, cfg.report))
        }
        Command::Verify { manifest, dir } => {
            let m = Manifest::read(&manifest).map_err(CliError::io)?;
            let dir = dir.unwrap_or_else(|| manifest.parent().map(Path::to_path_buf).unwrap_or_default());
            let r = verify_corpus(&dir, &m).map_err(CliError::io)?;
            for f in &r.missing {
                println!("missing {f}");
            }
            for f in &r.mismatched {
                println!("mismatch {f}");
            }
            for f in &r.extra {
                println!("extra {f}");
            }
            println!("{} files ok", r.ok);
            if r.is_clean() {
                Ok(())
            } else {
                Err(CliError { code: EXIT_MISMATCH, message: format!("{} does not match {MANIFEST_FILE}", dir.display()) })
            }
        }
        Command::GroundTruth { suite, output, .. } => {
            let suite = load_suite(suite.as_deref(), cfg)?;
            let n = write_ground_truth(&output, &suite, &columns(style)?, cfg.resolution)?;
            eprintln!("{n} images in {}", output.display());
            Ok(())
        }
    }
}

fn decode_batch(images: &[PathBuf], style: EncodingStyle, threshold: f64, output: Option<&Path>) -> Result<(), CliError> {
    let results: Vec<Result<String, CliError>> = images
        .par_iter()
        .map(|p| {
            let img = RasterImage::read(p).map_err(|e| CliError::io(format!("{}: {e}", p.display())))?;
            match crate::decode::decode_within(&img, style, threshold) {
                Ok(d) => Ok(d.to_json()),
                Err(e @ DecodeError::NotAPlan { .. }) => Err(CliError::domain(format!("{}: {e}", p.display()))),
                Err(e) => Err(CliError::io(format!("{}: {e}", p.display()))),
            }
        })
        .collect();
    let mut worst: Option<CliError> = None;
    let mut record = |e: CliError| {
        eprintln!("error: {}", e.message);
        if worst.as_ref().is_none_or(|w| w.code != EXIT_IO) {
            worst = Some(e);
        }
    };
    if images.len() == 1 {
        match results.into_iter().next().expect("one image") {
            Ok(json) => write_out(output, &json)?,
            Err(e) => record(e),
        }
    } else {
        if let Some(dir) = output {
            fs::create_dir_all(dir).map_err(|e| CliError::io(format!("{}: {e}", dir.display())))?;
        }
        for (p, r) in images.iter().zip(results) {
            match r {
                Ok(json) => match output {
                    Some(dir) => {
                        let stem = p.file_stem().unwrap_or_default().to_string_lossy();
                        write_out(Some(&dir.join(format!("{stem}.json"))), &json)?;
                    }
                    None => println!("{}", json.replace('\n', "")),
                },
                Err(e) => record(e),
            }
        }
    }
    match worst {
        None => Ok(()),
        Some(e) => Err(CliError { code: e.code, message: "some images could not be decoded".into() }),
    }
}
