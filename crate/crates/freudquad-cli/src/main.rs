//! Benchmark CLI for weighted quadrature over R^d and sparse-grid
//! sampling recovery: rule dumps, single integrations, convergence
//! studies, rate fits, adversarial-bump lower bounds and the corpus
//! listing. All output is deterministic; the binary contains no RNG.

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use freudquad::assembled_quad::RhoMode;
use freudquad::bench::{
    fit_rate, parse_convergence_csv, run_convergence, run_recovery, AssembledBase, Method, Table,
};
use freudquad::corpus_oracle::{corpus_listing_json, corpus_member};
use freudquad::error::Error;
use freudquad::orthopoly::gauss_rule_for_weight;
use freudquad::quad1d::{fooling_bump_1d, integrate_tg, truncate, ThresholdMode};
use freudquad::sparse_quad::{build_hypercross, DyadicLadder};
use freudquad::weights::parse_weight_spec;

#[derive(Parser)]
#[command(
    name = "freudquad",
    about = "Weighted quadrature on R^d and sparse-grid recovery benchmarks",
    version,
    max_term_width = 100
)]
struct Cli {
    /// Weight specification: `gauss:d=<int>`,
    /// `freud:lambda=<f>,a=<f>,b=<f>,d=<int>`, or
    /// `sonin:beta=<f>,a=<f>,b=<f>,d=<int>`.
    #[arg(long, global = true, default_value = "gauss:d=1")]
    weight: String,

    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,

    /// Output format for tabular results.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Assert that the run involves no randomness. Always satisfied: the
    /// binary links no random number generator; accepted for scripting
    /// symmetry.
    #[arg(long, global = true)]
    seedless: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Plotdata,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Threshold anchored at the Mhaskar-Rakhmanov-Saff number.
    Mrs,
    /// Threshold anchored at the rule's largest zero (robust default).
    LargestZero,
}

impl From<Mode> for ThresholdMode {
    fn from(m: Mode) -> ThresholdMode {
        match m {
            Mode::Mrs => ThresholdMode::Mrs,
            Mode::LargestZero => ThresholdMode::LargestZero,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum MethodName {
    /// Truncated Gaussian rule on the real line.
    Tg,
    /// Full Gaussian rule (all nodes kept).
    GaussFull,
    /// Smolyak difference quadrature on the step hyperbolic cross.
    Hypercross,
    /// Shifted-cube assembled quadrature over R^d.
    Assembled,
    /// Fibonacci lattice rule on the unit cube (d = 2).
    Fibonacci,
    /// Smolyak B-spline rule on the unit cube.
    SmolyakBspline,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum BaseName {
    Fibonacci,
    SmolyakBspline,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum RhoName {
    /// Closed-form shell-sum normalizer (clamped to feasibility).
    ShellBound,
    /// Largest budget scaling preserving `sum floor(n_k) <= n`.
    Tight,
}

#[derive(Subcommand)]
enum Command {
    /// Dump quadrature nodes and weights as CSV.
    Nodes(NodesArgs),
    /// Integrate one corpus function with one rule; prints JSON.
    Integrate(IntegrateArgs),
    /// Convergence study over a budget list.
    Converge(ConvergeArgs),
    /// Sampling-recovery study on the torus.
    Recover(RecoverArgs),
    /// Fit error ~ C n^-alpha (log n)^beta to an emitted CSV table.
    Fit(FitArgs),
    /// Adversarial bump lower bounds for truncated-rule node sets.
    Fool(FoolArgs),
    /// List the corpus with certified reference integrals (JSON).
    Corpus(CorpusArgs),
}

#[derive(Args)]
struct NodesArgs {
    /// Base degree of the univariate Gaussian rule.
    #[arg(long, required_unless_present = "hypercross")]
    m: Option<usize>,
    /// Truncate the rule before dumping.
    #[arg(long)]
    truncated: bool,
    /// Truncation fraction in (0, 1).
    #[arg(long, default_value_t = 0.5)]
    theta: f64,
    /// Threshold anchor for truncation.
    #[arg(long, value_enum, default_value_t = Mode::LargestZero)]
    mode: Mode,
    /// Dump the merged step-hyperbolic-cross rule instead.
    #[arg(long)]
    hypercross: bool,
    /// Level of the hyperbolic cross (real; the index test runs over
    /// integers).
    #[arg(long, default_value_t = 4.0)]
    xi: f64,
    /// Dimension of the hyperbolic cross.
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Asserted univariate rate of the dyadic ladder.
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
}

#[derive(Args)]
struct IntegrateArgs {
    /// Rule family: `tg` or `gauss-full`.
    #[arg(long, default_value = "tg")]
    rule: String,
    /// Base degree of the Gaussian rule.
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 0.5)]
    theta: f64,
    #[arg(long, value_enum, default_value_t = Mode::LargestZero)]
    mode: Mode,
    /// Corpus function id, e.g. `comb:r=1,d=1`.
    #[arg(long = "fn")]
    function: String,
}

#[derive(Args)]
struct ConvergeArgs {
    #[arg(long, value_enum)]
    method: MethodName,
    /// Corpus function id.
    #[arg(long = "fn")]
    function: String,
    /// Budget list (node counts; levels for the hypercross method),
    /// comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Truncation fraction for tg / the hypercross ladder.
    #[arg(long, default_value_t = 0.5)]
    theta: f64,
    /// Base cube rule for the assembled method.
    #[arg(long, value_enum, default_value_t = BaseName::Fibonacci)]
    base: BaseName,
    /// Smoothness the assembled / cube methods target.
    #[arg(long, default_value_t = 2)]
    r: usize,
    /// Normalizer mode of the assembled schedule.
    #[arg(long, value_enum, default_value_t = RhoName::ShellBound)]
    rho_mode: RhoName,
    /// Endpoint-flatness order of the periodization map.
    #[arg(long, default_value_t = 3)]
    psi_order: usize,
    /// Dilation factor in (1, 2) for the partitioned assembled variant.
    #[arg(long)]
    theta_dilation: Option<f64>,
    /// Asserted univariate ladder rate for the hypercross method.
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
}

#[derive(Args)]
struct RecoverArgs {
    /// Quasi-interpolation scheme: linear, quadratic or cubic.
    #[arg(long, default_value = "cubic")]
    scheme: String,
    /// Levels, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    m: Vec<usize>,
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Corpus function id (must be periodic).
    #[arg(long = "fn")]
    function: String,
    /// Probe-grid resolution per axis for the L2/Linf errors.
    #[arg(long, default_value_t = 128)]
    probe: usize,
}

#[derive(Args)]
struct FitArgs {
    /// CSV table emitted by `converge` or `recover`.
    #[arg(long)]
    input: std::path::PathBuf,
    /// Fixed logarithmic exponent beta.
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    /// Budget column name.
    #[arg(long, default_value = "n")]
    x: String,
    /// Error column name.
    #[arg(long, default_value = "abs_error")]
    y: String,
}

#[derive(Args)]
struct FoolArgs {
    /// Budgets, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Smoothness order of the bump certificate.
    #[arg(long, default_value_t = 1)]
    r: usize,
    #[arg(long, default_value_t = 0.5)]
    theta: f64,
    #[arg(long, value_enum, default_value_t = Mode::LargestZero)]
    mode: Mode,
}

#[derive(Args)]
struct CorpusArgs {
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long, default_value_t = 1)]
    r: usize,
}

fn emit(cli: &Cli, text: &str) -> Result<(), Error> {
    match &cli.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display()))),
        None => {
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| Error::Parse(format!("stdout: {e}")))?;
            Ok(())
        }
    }
}

fn emit_table(cli: &Cli, table: &Table) -> Result<(), Error> {
    let text = match cli.format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
        Format::Plotdata => table.to_plotdata(),
    };
    emit(cli, &text)
}

fn float_cell(v: f64) -> String {
    format!("{v:.17e}")
}

fn run(cli: &Cli) -> Result<(), Error> {
    let weight = parse_weight_spec(&cli.weight)?;
    match &cli.command {
        Command::Nodes(args) => {
            if args.hypercross {
                let ladder = DyadicLadder::truncated_gaussian(
                    &weight,
                    args.theta,
                    args.mode.into(),
                    args.xi.floor().max(0.0) as usize,
                    args.alpha,
                )?;
                let cross = build_hypercross(&ladder, args.xi, args.d)?;
                let mut out = String::new();
                let headers: Vec<String> = (1..=args.d).map(|i| format!("x{i}")).collect();
                out.push_str(&headers.join(","));
                out.push_str(",weight\n");
                for (x, w) in &cross.nodes {
                    let cells: Vec<String> = x.iter().map(|v| float_cell(*v)).collect();
                    out.push_str(&cells.join(","));
                    out.push(',');
                    out.push_str(&float_cell(*w));
                    out.push('\n');
                }
                emit(cli, &out)
            } else {
                let m = args.m.expect("clap enforces --m without --hypercross");
                let rule = gauss_rule_for_weight(&weight.univariate(), m)?;
                let (nodes, weights): (Vec<f64>, Vec<f64>) = if args.truncated {
                    let tg =
                        truncate(&rule, &weight.univariate(), args.theta, args.mode.into())?;
                    (tg.kept_nodes.clone(), tg.kept_weights.clone())
                } else {
                    (rule.nodes.clone(), rule.weights.clone())
                };
                let mut out = String::from("k,node,weight\n");
                for (k, (x, w)) in nodes.iter().zip(weights.iter()).enumerate() {
                    out.push_str(&format!("{k},{},{}\n", float_cell(*x), float_cell(*w)));
                }
                emit(cli, &out)
            }
        }
        Command::Integrate(args) => {
            let member = corpus_member(&args.function)?;
            if member.dim != 1 || weight.dim() != 1 {
                return Err(Error::Precondition(
                    "integrate drives univariate rules; pick d = 1".into(),
                ));
            }
            let (reference, _) = member.reference_weighted(&weight)?;
            let rule = gauss_rule_for_weight(&weight.univariate(), args.m)?;
            let (value, n_nodes) = match args.rule.as_str() {
                "tg" => {
                    let tg =
                        truncate(&rule, &weight.univariate(), args.theta, args.mode.into())?;
                    (integrate_tg(&tg, &|t| member.factor(t))?, tg.len())
                }
                "gauss-full" => (rule.integrate(&|t| member.factor(t))?, rule.len()),
                other => {
                    return Err(Error::Parse(format!(
                        "unknown rule `{other}` (expected tg or gauss-full)"
                    )))
                }
            };
            let json = serde_json::json!({
                "value": value,
                "abs_error": (value - reference).abs(),
                "n_nodes": n_nodes,
            });
            emit(cli, &(serde_json::to_string_pretty(&json).expect("json") + "\n"))
        }
        Command::Converge(args) => {
            let member = corpus_member(&args.function)?;
            let method = match args.method {
                MethodName::Tg => Method::Tg {
                    theta: args.theta,
                    mode: ThresholdMode::LargestZero,
                },
                MethodName::GaussFull => Method::GaussFull,
                MethodName::Hypercross => Method::Hypercross {
                    theta: args.theta,
                    alpha: args.alpha,
                },
                MethodName::Assembled => Method::Assembled {
                    base: match args.base {
                        BaseName::Fibonacci => AssembledBase::Fibonacci,
                        BaseName::SmolyakBspline => AssembledBase::SmolyakBspline,
                    },
                    r: args.r,
                    rho: match args.rho_mode {
                        RhoName::ShellBound => RhoMode::ShellBound,
                        RhoName::Tight => RhoMode::Tight,
                    },
                    psi_order: args.psi_order,
                    theta_dilation: args.theta_dilation,
                },
                MethodName::Fibonacci => Method::Fibonacci,
                MethodName::SmolyakBspline => Method::SmolyakBspline { r: args.r },
            };
            let table = run_convergence(&method, &member, &weight, &args.n)?;
            emit_table(cli, &table)
        }
        Command::Recover(args) => {
            let member = corpus_member(&args.function)?;
            if member.dim != args.d {
                return Err(Error::Precondition(format!(
                    "member {} has d = {}, requested {}",
                    member.id, member.dim, args.d
                )));
            }
            let table = run_recovery(&args.scheme, &member, &args.m, args.probe)?;
            emit_table(cli, &table)
        }
        Command::Fit(args) => {
            let text = std::fs::read_to_string(&args.input)
                .map_err(|e| Error::Parse(format!("cannot read {}: {e}", args.input.display())))?;
            let table = parse_convergence_csv(&text)?;
            let xs = table
                .column(&args.x)
                .ok_or_else(|| Error::Precondition(format!("no column `{}`", args.x)))?;
            let ys = table
                .column(&args.y)
                .ok_or_else(|| Error::Precondition(format!("no column `{}`", args.y)))?;
            let fit = fit_rate(&xs, &ys, args.beta)?;
            let json = serde_json::json!({
                "alpha": fit.alpha,
                "alpha_stderr": fit.alpha_stderr,
                "beta_fixed": fit.beta_fixed,
                "ln_c": fit.ln_c,
                "residual": fit.residual,
                "rows_used": fit.rows_used,
                "rows_dropped": fit.rows_dropped,
            });
            emit(cli, &(serde_json::to_string_pretty(&json).expect("json") + "\n"))
        }
        Command::Fool(args) => {
            let w1 = weight.univariate();
            let mut out =
                String::from("n,nodes,delta,cell_lo,cell_hi,norm_bound,certified_value\n");
            for &n in &args.n {
                let m = freudquad::bench::tg_degree_for_budget(
                    &w1,
                    args.theta,
                    args.mode.into(),
                    n,
                )?;
                let rule = gauss_rule_for_weight(&w1, m)?;
                let tg = truncate(&rule, &w1, args.theta, args.mode.into())?;
                let bump = fooling_bump_1d(&tg.kept_nodes, n, args.r, &w1)?;
                out.push_str(&format!(
                    "{n},{},{},{},{},{},{}\n",
                    tg.len(),
                    float_cell(bump.delta),
                    float_cell(bump.interval.0),
                    float_cell(bump.interval.1),
                    float_cell(bump.norm_bound),
                    float_cell(bump.certified_value),
                ));
            }
            emit(cli, &out)
        }
        Command::Corpus(args) => {
            let json = corpus_listing_json(&weight, args.d, args.r)?;
            emit(cli, &(json + "\n"))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let _ = cli.seedless;
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Precondition(_) | Error::Parse(_) | Error::ResourceLimit(_) => {
                    ExitCode::from(2)
                }
                Error::NonConvergence(_) | Error::EvalFailure { .. } => ExitCode::from(3),
            }
        }
    }
}
