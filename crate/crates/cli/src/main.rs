use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use approxsub::analysis::SingletonMatrix;
use approxsub::experiments::{
    analyze, run_all, run_suite, sensor_select, sweep_beta, sweep_to_csv, AnalyzeInput, BetaGrid,
    ExperimentConfig, ObjectiveName, OutputFormat, SensorReport, SuiteOutcome, SurrogateName,
};
use approxsub::setfn::{GramianModel, TabularFunction};
use clap::{Args, Parser, Subcommand};

/// Greedy guarantees for approximately submodular set functions.
#[derive(Parser)]
#[command(name = "approxsub", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare guarantees for the A-optimal objective across a beta grid.
    SweepBeta(Common),
    /// Greedy versus random sensor sets with Monte-Carlo estimation error.
    SensorSelect(Common),
    /// Closeness measures and bounds for a matrix or tabular CSV.
    Analyze {
        /// Input CSV: `n` rows by `N` columns, or `mask,value` lines with --tabular.
        input: PathBuf,
        /// Treat the input as a tabulated set function.
        #[arg(long)]
        tabular: bool,
        /// Normalize matrix columns to unit length.
        #[arg(long)]
        normalize: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Run a self-check suite (or `all`); exits 2 when any check fails.
    Verify {
        suite: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Measurement dimension.
    #[arg(long)]
    n: Option<usize>,
    /// Ground set size.
    #[arg(long = "N")]
    ground: Option<usize>,
    /// Budget.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    beta: Option<f64>,
    /// `start:stop:points[,log]`.
    #[arg(long)]
    beta_grid: Option<String>,
    /// neg-trace-inv or min-eig.
    #[arg(long)]
    objective: Option<String>,
    /// log-det, trace or max-eig; repeat or separate with commas.
    #[arg(long, value_delimiter = ',')]
    surrogate: Vec<String>,
    /// Monte-Carlo draws.
    #[arg(long)]
    trials: Option<usize>,
    /// Random sets per budget in the baseline.
    #[arg(long)]
    random_sets: Option<usize>,
    /// Random pairs for sampled divergence.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    exact_threshold: Option<usize>,
    /// include-base or rank1-only.
    #[arg(long)]
    interp: Option<String>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failure with its exit code.
struct Exit(u8, String);

impl From<approxsub::Error> for Exit {
    fn from(e: approxsub::Error) -> Self {
        Exit(1, e.to_string())
    }
}

type Run<T> = Result<T, Exit>;

impl Common {
    /// Builds the configuration, collecting every bad flag rather than
    /// stopping at the first.
    fn config(&self) -> Run<ExperimentConfig> {
        let mut cfg = ExperimentConfig {
            seed: self.seed,
            ..ExperimentConfig::default()
        };
        let mut problems = Vec::new();
        macro_rules! set {
            ($field:ident, $value:expr) => {
                if let Some(v) = $value {
                    cfg.$field = v;
                }
            };
        }
        set!(n, self.n);
        set!(ground, self.ground);
        set!(k, self.k);
        set!(beta, self.beta);
        set!(trials, self.trials);
        set!(random_sets, self.random_sets);
        set!(samples, self.samples);
        set!(exact_threshold, self.exact_threshold);
        let mut parse = |r: approxsub::Result<()>| {
            if let Err(e) = r {
                problems.push(e.to_string());
            }
        };
        if let Some(g) = &self.beta_grid {
            parse(BetaGrid::parse(g).map(|g| cfg.beta_grid = g));
        }
        if let Some(o) = &self.objective {
            parse(ObjectiveName::parse(o).map(|o| cfg.objective = o));
        }
        if !self.surrogate.is_empty() {
            parse(
                self.surrogate
                    .iter()
                    .map(|s| SurrogateName::parse(s))
                    .collect::<approxsub::Result<Vec<_>>>()
                    .map(|v| cfg.surrogates = v),
            );
        }
        if let Some(i) = &self.interp {
            parse(SingletonMatrix::parse(i).map(|i| cfg.interp = i));
        }
        if let Some(f) = &self.format {
            parse(OutputFormat::parse(f).map(|_| ()));
        }
        problems.extend(cfg.problems());
        if problems.is_empty() {
            Ok(cfg)
        } else {
            Err(Exit(1, problems.join("\n")))
        }
    }

    fn format(&self, default: OutputFormat) -> OutputFormat {
        self.format
            .as_deref()
            .and_then(|f| OutputFormat::parse(f).ok())
            .unwrap_or(default)
    }

    fn emit(&self, text: &str) -> Run<()> {
        match &self.out {
            Some(p) => fs::write(p, text)
                .map_err(|e| Exit(1, format!("cannot write {}: {e}", p.display()))),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn sensor_csv(rep: &SensorReport) -> String {
    let mut out = String::from(
        "k,greedy_value,greedy_mse,greedy_mse_se,greedy_mse_analytic,greedy_log_det_cov,\
         random_value_median,random_mse_q1,random_mse_median,random_mse_q3,random_log_det_cov_median\n",
    );
    for r in &rep.budgets {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.k,
            r.greedy_value,
            r.greedy_mse.mean,
            r.greedy_mse.std_error,
            r.greedy_mse.analytic,
            r.greedy_log_det_cov,
            r.random_value.median,
            r.random_mse.q1,
            r.random_mse.median,
            r.random_mse.q3,
            r.random_log_det_cov.median
        ));
    }
    out
}

fn run(cli: Cli) -> Run<()> {
    match cli.command {
        Command::SweepBeta(c) => {
            let rep = sweep_beta(&c.config()?)?;
            match c.format(OutputFormat::Csv) {
                OutputFormat::Csv => c.emit(&sweep_to_csv(&rep)),
                OutputFormat::Json => c.emit(&json(&rep)),
            }
        }
        Command::SensorSelect(c) => {
            let rep = sensor_select(&c.config()?)?;
            match c.format(OutputFormat::Json) {
                OutputFormat::Csv => c.emit(&sensor_csv(&rep)),
                OutputFormat::Json => c.emit(&json(&rep)),
            }
        }
        Command::Analyze {
            input,
            tabular,
            normalize,
            common: c,
        } => {
            let text = fs::read_to_string(&input)
                .map_err(|e| Exit(1, format!("cannot read {}: {e}", input.display())))?;
            let mut cfg = c.config()?;
            let input = if tabular {
                AnalyzeInput::Tabular(TabularFunction::from_csv_str(&text)?)
            } else {
                AnalyzeInput::Gramian(Arc::new(GramianModel::from_csv_str(
                    &text, cfg.beta, normalize,
                )?))
            };
            let ground = match &input {
                AnalyzeInput::Gramian(m) => m.ground(),
                AnalyzeInput::Tabular(t) => approxsub::SetFunction::ground_size(t),
            };
            if c.k.is_none() {
                cfg.k = cfg.k.min(ground);
            }
            let rep = analyze(&input, &cfg)?;
            if c.format(OutputFormat::Json) == OutputFormat::Csv {
                return Err(Exit(1, "analyze only writes json".into()));
            }
            c.emit(&json(&rep))
        }
        Command::Verify { suite, common: c } => {
            let outcomes: Vec<SuiteOutcome> = if suite == "all" {
                run_all(c.seed)?
            } else {
                vec![run_suite(&suite, c.seed)?]
            };
            c.emit(&json(&outcomes))?;
            for o in &outcomes {
                eprintln!(
                    "{} {}: {}/{} checks passed",
                    if o.passed { "PASS" } else { "FAIL" },
                    o.suite,
                    o.checks - o.failed,
                    o.checks
                );
            }
            if outcomes.iter().all(|o| o.passed) {
                Ok(())
            } else {
                Err(Exit(2, "verification failed".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Exit(code, msg)) => {
            for line in msg.lines() {
                eprintln!("error: {line}");
            }
            ExitCode::from(code)
        }
    }
}
