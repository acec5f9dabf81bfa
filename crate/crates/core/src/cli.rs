//! Command-line front end.
//!
//! Exit codes: 0 success, 2 configuration error, 3 data error, 4 internal
//! error. Failures are also printed to stderr as one JSON object.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::audit::{audit_all, audit_tables_csv, AuditOptions, Strategy};
use crate::config::{Config, DependencySource};
use crate::depgraph::{build_dependency_graph, transitive_dependencies, DependencyDict};
use crate::engine::{
    apply_pipeline_with_report, assess, deserialize_pipeline, encode_raw, fit_pipeline,
    recommend_imputations, serialize_pipeline, QualityReport,
};
use crate::error::IqaError;
use crate::report::{emit_quality_svg, summary_text};
use crate::table::{load_csv, read_raw_csv, Table};

#[derive(Parser, Debug)]
#[command(name = "iqa", version, about = "Imputation quality assessment")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(clap::Args, Debug, Clone)]
pub struct RunArgs {
    /// JSON configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// CSV data; overrides the path in the config.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub threshold: Option<f64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Score every feature and write quality_records.json.
    Assess(RunArgs),
    /// Build the dependency graph and write dependency_dict.json.
    Graph(RunArgs),
    /// Assess, then fit the imputation pipeline to pipeline.json.
    Fit(RunArgs),
    /// Impute a CSV with a fitted pipeline and write imputed.csv.
    Apply {
        #[arg(long)]
        pipeline: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Config used to check the pipeline's provenance.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Detectability audit at several missingness levels.
    Audit {
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated missingness levels in [0, 1).
        #[arg(long, value_delimiter = ',', default_value = "0,0.25,0.5,0.75")]
        levels: Vec<f64>,
        /// `csv` also writes audit_tables.csv.
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Number of imputations reaching a target efficiency.
    #[command(name = "recommend-m", alias = "recommend_m")]
    RecommendM {
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        efficiency: f64,
    },
    /// Render quality_records.json as a chart and summary.
    Report {
        /// A quality_records.json file.
        #[arg(long)]
        records: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Overrides the threshold stored in the records.
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long, value_enum, default_value = "svg")]
        format: Format,
    },
}

/// A failed command, ready to print.
#[derive(Debug, Serialize)]
pub struct Failure {
    pub exit_code: i32,
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    fn config(e: impl std::fmt::Display) -> Self {
        Failure {
            exit_code: 2,
            kind: "config",
            message: e.to_string(),
        }
    }

    fn data(e: impl std::fmt::Display) -> Self {
        Failure {
            exit_code: 3,
            kind: "data",
            message: e.to_string(),
        }
    }
}

impl From<IqaError> for Failure {
    fn from(e: IqaError) -> Self {
        match e {
            IqaError::Schema { .. } | IqaError::VersionMismatch { .. } | IqaError::InvalidArgument(_) => {
                Failure::config(e)
            }
            IqaError::Io { .. }
            | IqaError::Parse { .. }
            | IqaError::RaggedRows { .. }
            | IqaError::Csv(_)
            | IqaError::DegenerateInput(_)
            | IqaError::InvalidFoldCount { .. }
            | IqaError::UnknownColumn(_)
            | IqaError::SchemaMismatch(_)
            | IqaError::CorruptModel(_) => Failure::data(e),
            _ => Failure {
                exit_code: 4,
                kind: "internal",
                message: e.to_string(),
            },
        }
    }
}

type CliResult<T> = Result<T, Failure>;

/// Writes `bytes` to `dir/name` through a temporary file and a rename.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> CliResult<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::data(IqaError::io(dir, e)))?;
    let target = dir.join(name);
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Failure::data(IqaError::io(dir, e)))?;
    tmp.write_all(bytes)
        .map_err(|e| Failure::data(IqaError::io(&target, e)))?;
    tmp.persist(&target)
        .map_err(|e| Failure::data(IqaError::io(&target, e.error)))?;
    Ok(target)
}

fn to_json<T: Serialize>(v: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(v).expect("report types serialise");
    bytes.push(b'\n');
    bytes
}

struct Run {
    config: Config,
    data: Table,
}

fn load_run(args: &RunArgs) -> CliResult<Run> {
    let mut config = Config::from_path(&args.config).map_err(|e| match e {
        IqaError::Io { .. } => Failure::config(e),
        other => other.into(),
    })?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if args.threshold.is_some() {
        config.threshold = args.threshold;
    }
    config.validate()?;
    for flag in &config.flags {
        log::warn!("config: {flag}");
    }
    let path = args
        .data
        .clone()
        .or_else(|| config.data.path.clone())
        .ok_or_else(|| Failure::config("no data path: pass --data or set data.path"))?;
    let table = load_csv(&path, &config.csv_options())?;
    for name in &config.data.exclude {
        table.column(name).map_err(Failure::config)?;
    }
    let data = table.drop_columns(&config.data.exclude);
    Ok(Run { config, data })
}

fn dependencies(run: &Run) -> CliResult<Option<DependencyDict>> {
    Ok(match &run.config.dependency_graph {
        None => None,
        Some(DependencySource::Inline(d)) => Some(d.clone()),
        Some(DependencySource::Path(p)) => {
            let text = std::fs::read_to_string(p).map_err(|e| Failure::config(IqaError::io(p, e)))?;
            let d: DependencyDict = serde_json::from_str(&text).map_err(|e| {
                Failure::config(format!("dependency dictionary {}: {e}", p.display()))
            })?;
            d.validate().map_err(Failure::config)?;
            Some(d)
        }
        Some(DependencySource::Auto(_)) => {
            let params = run.config.graph_params().expect("auto source");
            let graph = build_dependency_graph(&run.data, &params)?;
            Some(transitive_dependencies(&graph))
        }
    })
}

fn report_for(run: &Run) -> CliResult<(QualityReport, Option<DependencyDict>)> {
    let deps = dependencies(run)?;
    let opts = run.config.assess_options(deps.clone());
    let records = assess(&run.data, &opts)?;
    Ok((QualityReport::new(records, &opts), deps))
}

fn cmd_assess(args: &RunArgs) -> CliResult<()> {
    let run = load_run(args)?;
    let (report, _) = report_for(&run)?;
    let path = write_atomic(&args.out, "quality_records.json", &to_json(&report))?;
    println!("{}", path.display());
    Ok(())
}

fn cmd_graph(args: &RunArgs) -> CliResult<()> {
    let run = load_run(args)?;
    let params = run.config.graph_params().unwrap_or_else(|| crate::depgraph::GraphParams {
        seed: run.config.seed,
        ..Default::default()
    });
    let graph = build_dependency_graph(&run.data, &params)?;
    let dict = transitive_dependencies(&graph);
    write_atomic(&args.out, "dependency_graph.json", &to_json(&graph))?;
    let path = write_atomic(&args.out, "dependency_dict.json", &to_json(&dict))?;
    println!("{}", path.display());
    Ok(())
}

fn cmd_fit(args: &RunArgs) -> CliResult<()> {
    let run = load_run(args)?;
    let (report, deps) = report_for(&run)?;
    let opts = run.config.assess_options(deps);
    let plan = fit_pipeline(&run.data, &report.records, &opts, Some(run.config.hash()))?;
    write_atomic(&args.out, "quality_records.json", &to_json(&report))?;
    let path = write_atomic(&args.out, "pipeline.json", &serialize_pipeline(&plan)?)?;
    println!("{}", path.display());
    Ok(())
}

fn cmd_apply(pipeline: &Path, data: &Path, out: &Path, config: Option<&Path>) -> CliResult<()> {
    let bytes = std::fs::read(pipeline).map_err(|e| Failure::data(IqaError::io(pipeline, e)))?;
    let hash = match config {
        Some(p) => Some(Config::from_path(p).map_err(Failure::config)?.hash()),
        None => None,
    };
    let (plan, warnings) = deserialize_pipeline(&bytes, hash.as_deref())?;
    for w in warnings {
        log::warn!("{w}");
    }
    // Missing tokens are not stored in the plan; use the defaults plus any
    // configured ones.
    let mut opts = crate::table::CsvOptions::default();
    if let Some(p) = config {
        opts.missing_tokens = Config::from_path(p).map_err(Failure::config)?.data.missing_values;
    }
    let raw = read_raw_csv(data, &opts)?;
    let (table, unseen) = encode_raw(&plan, &raw)?;
    let (imputed, mut report) = apply_pipeline_with_report(&plan, &table)?;
    report.unseen_categories = unseen;
    for (col, n) in &report.unseen_categories {
        log::warn!("{n} unseen categories in {col:?} were imputed");
    }
    let mut csv = Vec::new();
    imputed.write_csv(&mut csv)?;
    let path = write_atomic(out, "imputed.csv", &csv)?;
    write_atomic(out, "apply_report.json", &to_json(&report))?;
    println!("{}", path.display());
    Ok(())
}

fn cmd_audit(args: &RunArgs, levels: &[f64], format: Format) -> CliResult<()> {
    let run = load_run(args)?;
    let deps = dependencies(&run)?;
    let opts = run.config.assess_options(deps);
    let mut strategies: Vec<Strategy> = run
        .config
        .imputers
        .iter()
        .cloned()
        .map(Strategy::uniform)
        .collect();
    strategies.push(Strategy::assessed("iqa", opts));
    let reports = audit_all(&run.data, &strategies, levels, &AuditOptions::default(), run.config.seed)?;
    let path = write_atomic(&args.out, "audit_report.json", &to_json(&reports))?;
    if format == Format::Csv {
        write_atomic(&args.out, "audit_tables.csv", audit_tables_csv(&reports)?.as_bytes())?;
    }
    println!("{}", path.display());
    Ok(())
}

fn cmd_report(records: &Path, out: &Path, threshold: Option<f64>, format: Format) -> CliResult<()> {
    let text = std::fs::read_to_string(records).map_err(|e| Failure::data(IqaError::io(records, e)))?;
    let report: QualityReport = serde_json::from_str(&text)
        .map_err(|e| Failure::data(format!("{}: {e}", records.display())))?;
    let tau = threshold.or(report.threshold);
    if let Some(t) = tau {
        if !(0.0..=1.0).contains(&t) {
            return Err(Failure::config(format!("threshold {t} outside [0, 1]")));
        }
    }
    let summary = summary_text(&report.records, tau);
    match format {
        Format::Svg => {
            write_atomic(out, "quality_chart.svg", emit_quality_svg(&report.records, tau).as_bytes())?;
        }
        Format::Json => {
            write_atomic(out, "quality_records.json", &to_json(&report))?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| Failure::data(e);
            w.write_record(["feature", "completeness", "delta", "delta_std", "omega", "imputer", "fallback_used", "kept"])
                .map_err(io)?;
            for r in &report.records {
                w.write_record([
                    r.feature.clone(),
                    r.completeness.to_string(),
                    r.delta.to_string(),
                    r.delta_std.to_string(),
                    r.omega.to_string(),
                    r.chosen_imputer.clone(),
                    r.fallback_used.to_string(),
                    r.kept.to_string(),
                ])
                .map_err(io)?;
            }
            let bytes = w.into_inner().map_err(|e| Failure::data(e.to_string()))?;
            write_atomic(out, "quality_records.csv", &bytes)?;
        }
    }
    write_atomic(out, "summary.txt", summary.as_bytes())?;
    print!("{summary}");
    Ok(())
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Assess(a) => cmd_assess(&a),
        Command::Graph(a) => cmd_graph(&a),
        Command::Fit(a) => cmd_fit(&a),
        Command::Apply {
            pipeline,
            data,
            out,
            config,
        } => cmd_apply(&pipeline, &data, &out, config.as_deref()),
        Command::Audit { run, levels, format } => cmd_audit(&run, &levels, format),
        Command::RecommendM { gamma, efficiency } => {
            println!("{}", recommend_imputations(gamma, efficiency)?);
            Ok(())
        }
        Command::Report {
            records,
            out,
            threshold,
            format,
        } => cmd_report(&records, &out, threshold, format),
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("IQA_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

/// Parses the process arguments, runs the command and returns the exit code.
pub fn main() -> i32 {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    configure_threads();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("{}", serde_json::to_string(&f).expect("failure serialises"));
            f.exit_code
        }
    }
}
