//! `compass` command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 parse/scoring/dataset failure,
//! 3 docking backend failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use compass_core::aa_score::{load_weights, WeightSet};
use compass_core::chem::{read_structure, write_complex_pdb};
use compass_core::compass::{compass_batch, lan_mse, CompassError, PcbTriple};
use compass_core::pipeline::backend::CommandBackend;
use compass_core::pipeline::{
    assess_pair, audit_dataset, recursive_redock, triples_csv, AssessmentReport, AuditSummary, Config, OutputFormat,
    PipelineError,
};

const WEIGHTS_ENV: &str = "COMPASS_WEIGHTS";

#[derive(Debug, Parser)]
#[command(name = "compass", version, about = "Protein-ligand pose assessment")]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
            Format::Text => OutputFormat::Text,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Feature {
    Affinity,
    Strain,
    Clash,
    Total,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score one protein-ligand pair.
    Assess {
        #[arg(long)]
        protein: PathBuf,
        #[arg(long)]
        ligand: PathBuf,
        /// Weight file; overrides COMPASS_WEIGHTS and the config.
        #[arg(long)]
        weights: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Score every pair folder under a directory.
    Audit {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        weights: Option<PathBuf>,
        /// Summary JSON destination (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Raw triples CSV destination.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// LAN-MSE or Compass Score of predicted against reference values.
    Score {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        pred: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        truth: Vec<f64>,
        /// With `total`, values are read as consecutive (affinity, strain, clashes) triples.
        #[arg(long, value_enum)]
        feature: Option<Feature>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Redock until the pose is favorable, hopeless or out of attempts.
    Redock {
        #[arg(long)]
        protein: PathBuf,
        #[arg(long)]
        ligand: PathBuf,
        /// `cmd:PATH` to an executable speaking the JSON docking protocol.
        #[arg(long)]
        backend: String,
        #[arg(long)]
        max_iter: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        weights: Option<PathBuf>,
        /// Final complex PDB.
        #[arg(long)]
        out: PathBuf,
        /// Trace JSON destination (stdout when omitted).
        #[arg(long)]
        trace: Option<PathBuf>,
    },
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }

    fn scoring(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        let code = match e {
            PipelineError::Backend { .. } => 3,
            _ => 2,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<CompassError> for Failure {
    fn from(e: CompassError) -> Self {
        match e {
            CompassError::LengthMismatch { .. } | CompassError::EmptyInput => Failure::usage(e.to_string()),
            _ => Failure::scoring(e.to_string()),
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<Config, Failure> {
    let config = match path {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    config.validate()?;
    Ok(config)
}

/// Flag, then the environment variable, then the config file.
fn resolve_weights(flag: Option<&Path>, config: &Config) -> Result<WeightSet, Failure> {
    let env = std::env::var_os(WEIGHTS_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from);
    match flag.map(Path::to_path_buf).or(env) {
        Some(path) => load_weights(&path).map_err(|e| Failure::scoring(e.to_string())),
        None => Ok(config.resolve_weights()?),
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::scoring(format!("cannot write {}: {e}", path.display())))
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes")
}

fn report_text(r: &AssessmentReport) -> String {
    let mut out = format!(
        "affinity\t{:.4}\nstrain\t{:.4}\nclashes\t{}\nfavorable\t{}\ninteractions\t{}\n",
        r.triple.binding_affinity,
        r.triple.strain_energy,
        r.triple.clash_count,
        r.favorability.is_favorable(),
        r.interactions.len()
    );
    for w in &r.warnings {
        out.push_str(&format!("warning\t{w}\n"));
    }
    out
}

fn report_csv(r: &AssessmentReport) -> String {
    format!(
        "affinity,strain,clashes,favorable\n{},{},{},{}\n",
        r.triple.binding_affinity,
        r.triple.strain_energy,
        r.triple.clash_count,
        r.favorability.is_favorable()
    )
}

fn audit_text(s: &AuditSummary) -> String {
    let mut out = format!(
        "pairs {} scored {} filtered {} failed {}\n",
        s.n_total,
        s.n_scored,
        s.n_filtered,
        s.failures.len()
    );
    for f in &s.features {
        let show = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.4}"));
        out.push_str(&format!("{}\tmean {}\tstd {}\n", f.feature, show(f.mean), show(f.std)));
    }
    out
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut config = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Assess {
            protein,
            ligand,
            weights,
            format,
        } => {
            let weights = resolve_weights(weights.as_deref(), &config)?;
            let report = assess_pair(&protein, &ligand, &config, &weights)?;
            let text = match format.map(OutputFormat::from).unwrap_or(config.format) {
                OutputFormat::Json => to_json(&report),
                OutputFormat::Csv => report_csv(&report),
                OutputFormat::Text => report_text(&report),
            };
            println!("{}", text.trim_end());
        }
        Command::Audit {
            dir,
            jobs,
            weights,
            out,
            csv,
        } => {
            if jobs == Some(0) {
                return Err(Failure::usage("--jobs must be at least 1"));
            }
            config.jobs = jobs.or(config.jobs);
            let weights = resolve_weights(weights.as_deref(), &config)?;
            let summary = audit_dataset(&dir, &config, &weights)?;
            eprintln!(
                "audited {} pairs: {} scored, {} in distribution, {} failed",
                summary.n_total,
                summary.n_scored,
                summary.n_filtered,
                summary.failures.len()
            );
            if let Some(path) = csv {
                write_file(&path, &triples_csv(&summary))?;
            }
            let text = match config.format {
                OutputFormat::Text if out.is_none() => audit_text(&summary),
                OutputFormat::Csv if out.is_none() => triples_csv(&summary),
                _ => to_json(&summary),
            };
            match out {
                Some(path) => write_file(&path, &text)?,
                None => println!("{}", text.trim_end()),
            }
        }
        Command::Score {
            pred,
            truth,
            feature,
            format,
        } => {
            let format = format.map(OutputFormat::from).unwrap_or(config.format);
            let value = match feature {
                Some(Feature::Total) => {
                    if pred.len() != truth.len() {
                        return Err(CompassError::LengthMismatch {
                            pred: pred.len(),
                            truth: truth.len(),
                        }
                        .into());
                    }
                    if pred.len() % 3 != 0 {
                        return Err(Failure::usage(
                            "--feature total expects (affinity,strain,clashes) triples",
                        ));
                    }
                    let triples = |v: &[f64]| -> Result<Vec<PcbTriple>, Failure> {
                        v.chunks(3)
                            .map(|c| {
                                if c[2] < 0.0 || c[2].fract() != 0.0 {
                                    return Err(Failure::usage(format!(
                                        "clash count {} is not a non-negative integer",
                                        c[2]
                                    )));
                                }
                                Ok(PcbTriple::new(c[0], c[1], c[2] as u32))
                            })
                            .collect()
                    };
                    let scores = compass_batch(&triples(&pred)?, &triples(&truth)?, &config.lan_mse)?;
                    serde_json::to_value(scores).expect("scores serialize")
                }
                _ => {
                    let name = match feature {
                        Some(Feature::Affinity) => "affinity",
                        Some(Feature::Strain) => "strain",
                        Some(Feature::Clash) => "clash",
                        _ => "lan_mse",
                    };
                    serde_json::json!({ name: lan_mse(&pred, &truth, &config.lan_mse)? })
                }
            };
            match format {
                OutputFormat::Json => println!("{}", to_json(&value)),
                _ => {
                    for (k, v) in value.as_object().expect("object") {
                        println!("{k}\t{v}");
                    }
                }
            }
        }
        Command::Redock {
            protein,
            ligand,
            backend,
            max_iter,
            seed,
            weights,
            out,
            trace,
        } => {
            if max_iter == Some(0) {
                return Err(Failure::usage("--max-iter must be at least 1"));
            }
            config.redock.max_iter = max_iter.unwrap_or(config.redock.max_iter);
            config.redock.base_seed = seed.unwrap_or(config.redock.base_seed);
            let mut backend = CommandBackend::from_spec(&backend).map_err(|e| Failure::usage(e.to_string()))?;
            let weights = resolve_weights(weights.as_deref(), &config)?;
            let read = |p: &Path| {
                read_structure(p).map_err(|source| PipelineError::Parse {
                    path: p.display().to_string(),
                    source,
                })
            };
            let protein = read(&protein)?;
            let ligand = read(&ligand)?;
            let (outcome, report) = recursive_redock(&protein, &ligand, &mut backend, &config, &weights)?;
            write_complex_pdb(&protein, &outcome.pose, &out).map_err(|e| Failure::scoring(e.to_string()))?;
            let body = to_json(&serde_json::json!({
                "schema": outcome.schema,
                "verdict": outcome.verdict,
                "trace": outcome.trace,
                "final": report.triple,
            }));
            match trace {
                Some(path) => write_file(&path, &body)?,
                None => println!("{body}"),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
