use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pauc::train::{cross_validate_c, default_grid, Split};
use pauc::{
    empirical_auc, empirical_pauc, parse_svmlight, roc_curve, tpr_at_fpr, train, Algo, Dataset, FprInterval, Model,
    NormStats, PaucError, TrainConfig,
};
use serde_json::{json, Value};

const EXIT_USAGE: u8 = 2;
const EXIT_DATA: u8 = 3;
const EXIT_NOT_CONVERGED: u8 = 4;

/// Train and evaluate linear scorers for partial AUC.
#[derive(Parser)]
#[command(name = "pauc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a model and write it with a training report.
    Train(TrainArgs),
    /// Print AUC, partial AUC and optionally TPR at an FPR limit.
    Eval(EvalArgs),
    /// Choose C by cross-validated partial AUC.
    Cv(CvArgs),
    /// Write the empirical ROC curve as CSV.
    Roc(RocArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Auc,
    PaucStruct,
    PaucDc,
}

impl From<AlgoArg> for Algo {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Auc => Algo::Auc,
            AlgoArg::PaucStruct => Algo::PaucStruct,
            AlgoArg::PaucDc => Algo::PaucDc,
        }
    }
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, value_enum, default_value = "pauc-struct")]
    algo: AlgoArg,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 1e-4)]
    epsilon: f64,
    #[arg(long, default_value_t = 1e-3)]
    tau: f64,
    /// Cutting-plane iteration cap.
    #[arg(long, default_value_t = 1000)]
    max_iters: usize,
    /// Z-score features before training.
    #[arg(long)]
    normalize: bool,
    /// Extra svmlight file whose instances also enter the normalization statistics.
    #[arg(long, requires = "normalize")]
    norm_data: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    data: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long = "C", default_value_t = 1.0)]
    c: f64,
    #[arg(long)]
    model_out: PathBuf,
    /// Defaults to the model path with a `.report.json` suffix.
    #[arg(long)]
    report_out: Option<PathBuf>,
    /// Where to write normalization statistics.
    #[arg(long, requires = "normalize")]
    norm_out: Option<PathBuf>,
    /// Accepted for interface symmetry; training itself is deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    /// Defaults to the interval stored in the model, else 0.
    #[arg(long)]
    alpha: Option<f64>,
    /// Defaults to the interval stored in the model, else 1.
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    tpr_at_fpr: Option<f64>,
    /// Multiplies alpha and beta before positions are computed.
    #[arg(long, default_value_t = 1.0)]
    fpr_scale: f64,
    /// Normalization statistics written by `train --norm-out`.
    #[arg(long)]
    norm: Option<PathBuf>,
}

#[derive(Args)]
struct CvArgs {
    #[arg(long)]
    data: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
    /// Comma-separated C values; defaults to decades suited to the algorithm.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
    #[arg(long, conflicts_with = "holdout")]
    folds: Option<usize>,
    /// Fraction of each class held out once.
    #[arg(long)]
    holdout: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct RocArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    norm: Option<PathBuf>,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl From<PaucError> for Failure {
    fn from(e: PaucError) -> Self {
        let code = match &e {
            PaucError::InvalidInterval { .. }
            | PaucError::DegenerateInterval { .. }
            | PaucError::InvalidConfig(_)
            | PaucError::SizeGuard(_) => EXIT_USAGE,
            PaucError::NotConverged { .. } => EXIT_NOT_CONVERGED,
            _ => EXIT_DATA,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: EXIT_DATA,
        message: format!("{}: {e}", path.display()),
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn load_dataset(path: &Path) -> CliResult<Dataset> {
    let file = fs::File::open(path).map_err(|e| io_failure(path, e))?;
    parse_svmlight(BufReader::new(file)).map_err(|e| Failure {
        code: EXIT_DATA,
        message: format!("{}: {e}", path.display()),
    })
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| io_failure(path, e))
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    if path.as_os_str().is_empty() {
        return Err(usage("output path is empty"));
    }
    fs::write(path, text).map_err(|e| io_failure(path, e))
}

fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON value serializes");
    s.push('\n');
    s
}

fn load_model(path: &Path) -> CliResult<Model> {
    Model::from_json(&read_text(path)?).map_err(|e| Failure {
        code: EXIT_DATA,
        message: format!("{}: {e}", path.display()),
    })
}

fn load_norm(path: Option<&Path>, data: Dataset) -> CliResult<Dataset> {
    match path {
        None => Ok(data),
        Some(p) => {
            let stats: NormStats = serde_json::from_str(&read_text(p)?).map_err(|e| Failure {
                code: EXIT_DATA,
                message: format!("{}: {e}", p.display()),
            })?;
            Ok(stats.apply(&data)?)
        }
    }
}

/// Loads the training set and applies normalization when requested.
fn prepare(data_path: &Path, solver: &SolverArgs) -> CliResult<(Dataset, Option<NormStats>)> {
    let data = load_dataset(data_path)?;
    if !solver.normalize {
        return Ok((data, None));
    }
    let stats = match &solver.norm_data {
        None => NormStats::fit(&data),
        Some(extra) => {
            let extra = load_dataset(extra)?;
            let dim = data.dim().max(extra.dim());
            let pos = data.positives().iter().chain(extra.positives()).cloned().collect();
            let neg = data.negatives().iter().chain(extra.negatives()).cloned().collect();
            NormStats::fit(&Dataset::new(pos, neg, dim)?)
        }
    };
    let data = stats.apply(&data)?;
    Ok((data, Some(stats)))
}

fn config(solver: &SolverArgs, c: f64) -> CliResult<TrainConfig> {
    let interval = FprInterval::new(solver.alpha, solver.beta)?;
    let mut cfg = TrainConfig::new(solver.algo.into(), interval, c);
    cfg.epsilon = solver.epsilon;
    cfg.tau = solver.tau;
    cfg.max_iters = solver.max_iters;
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_train(args: TrainArgs) -> CliResult<()> {
    let cfg = config(&args.solver, args.c)?;
    let (data, stats) = prepare(&args.data, &args.solver)?;
    log::info!(
        "training {} on {} positives, {} negatives, dim {} (seed {})",
        cfg.algo,
        data.num_positives(),
        data.num_negatives(),
        data.dim(),
        args.seed
    );
    let (report, failure) = match train(&data, &cfg) {
        Ok(r) => (r, None),
        Err(PaucError::NotConverged { iterations, report }) => {
            let message = format!("training did not converge within {iterations} iterations");
            (
                *report,
                Some(Failure {
                    code: EXIT_NOT_CONVERGED,
                    message,
                }),
            )
        }
        Err(e) => return Err(e.into()),
    };
    let report_path = args.report_out.clone().unwrap_or_else(|| {
        let mut p = args.model_out.clone().into_os_string();
        p.push(".report.json");
        PathBuf::from(p)
    });
    write_text(&args.model_out, &to_pretty(&report.model.to_json()))?;
    write_text(&report_path, &to_pretty(&report.to_json()))?;
    if let (Some(path), Some(stats)) = (&args.norm_out, &stats) {
        write_text(path, &to_pretty(&serde_json::to_value(stats).expect("stats serialize")))?;
    }
    log::info!(
        "objective {:.6e}, violation {:.3e}, slack {:.3e}",
        report.objective,
        report.final_violation,
        report.final_slack
    );
    match failure {
        Some(f) => Err(f),
        None => Ok(()),
    }
}

fn cmd_eval(args: EvalArgs) -> CliResult<()> {
    let model = load_model(&args.model)?;
    let data = load_norm(args.norm.as_deref(), load_dataset(&args.data)?)?;
    let stored = model.trained_interval.unwrap_or_else(FprInterval::full);
    let interval = FprInterval::new(args.alpha.unwrap_or(stored.alpha()), args.beta.unwrap_or(stored.beta()))?
        .scaled(args.fpr_scale)?;
    let (pos, neg) = model.score_dataset(&data)?;
    let positions = interval.positions(neg.len())?;
    let mut out = json!({
        "alpha": interval.alpha(),
        "auc": empirical_auc(&pos, &neg)?,
        "beta": interval.beta(),
        "format": pauc::data::FORMAT_VERSION,
        "j_alpha": positions.j_alpha,
        "j_beta": positions.j_beta,
        "pauc": empirical_pauc(&pos, &neg, &interval)?,
    });
    if let Some(limit) = args.tpr_at_fpr {
        if !(0.0..=1.0).contains(&limit) {
            return Err(usage(format!("--tpr-at-fpr must lie in [0, 1], got {limit}")));
        }
        out["tpr_at_fpr"] = json!(tpr_at_fpr(&pos, &neg, limit)?);
    }
    print!("{}", to_pretty(&out));
    Ok(())
}

fn cmd_cv(args: CvArgs) -> CliResult<()> {
    let grid = args
        .grid
        .clone()
        .unwrap_or_else(|| default_grid(args.solver.algo.into()));
    let split = match (args.folds, args.holdout) {
        (_, Some(frac)) => Split::Holdout(frac),
        (Some(k), None) => Split::Folds(k),
        (None, None) => Split::Folds(5),
    };
    let cfg = config(&args.solver, grid.first().copied().unwrap_or(1.0))?;
    let (data, _) = prepare(&args.data, &args.solver)?;
    let result = cross_validate_c(&data, &cfg, &grid, split, args.seed)?;
    let out = json!({
        "chosen_C": result.chosen_c,
        "format": pauc::data::FORMAT_VERSION,
        "seed": args.seed,
        "table": result.table,
    });
    print!("{}", to_pretty(&out));
    Ok(())
}

fn cmd_roc(args: RocArgs) -> CliResult<()> {
    if args.out.as_os_str().is_empty() {
        return Err(usage("--out must not be empty"));
    }
    let model = load_model(&args.model)?;
    let data = load_norm(args.norm.as_deref(), load_dataset(&args.data)?)?;
    let (pos, neg) = model.score_dataset(&data)?;
    write_text(&args.out, &roc_curve(&pos, &neg)?.to_csv())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("PAUC_LOG", "error")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(a) => cmd_train(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Cv(a) => cmd_cv(a),
        Command::Roc(a) => cmd_roc(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
