//! Command-line front end: planning, Monte Carlo experiments, curve
//! emission, and worst-case analysis, with deterministic CSV reporting.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qsearch_core::analysis::{
    asymptotic_minima, curve_p_vs_theta, curve_success_vs_iterations, plan_with, predicted_queries,
    worst_case_p, worst_case_p_in_range, Part1Schedules, PlannerConfig, RandomRunLaw,
    WorstCaseReport,
};
use qsearch_core::search::{monte_carlo_with, Algorithm};

const SEEDING_DOC: &str = "\
Seeding: every experiment row derives its own 64-bit seed from the master \
seed by chaining the splitmix64 finalizer over (algorithm id, n, t): \
s = sm(master), s = sm(s ^ algo), s = sm(s ^ n), s = sm(s ^ t), where \
sm(x) = splitmix64 of x. Within a row, trial i uses RNG stream i of a \
ChaCha8 generator keyed with the row seed. Adding or removing rows never \
changes the seeds of other rows, and reruns are byte-identical.";

#[derive(Parser)]
#[command(
    name = "qsearch",
    version,
    about = "Quantum search planning and simulation harness",
    long_about = None,
    after_long_help = SEEDING_DOC
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the run plan and predicted query costs for an instance size.
    Plan(PlanArgs),
    /// Run Monte Carlo experiments and write a CSV report.
    Run(RunArgs),
    /// Emit curve data (CSV) for plotting.
    Curves(CurvesArgs),
    /// Print worst-case success-probability analysis.
    Analyze(AnalyzeArgs),
}

#[derive(Args)]
struct PlanArgs {
    /// Search space size.
    #[arg(long)]
    n: u64,
    /// Tolerated failure probability, in (0, 1).
    #[arg(long)]
    eps: f64,
    /// Skip the classical tail; lowers the success floor to the
    /// any-fraction constant.
    #[arg(long = "no-part3")]
    no_part3: bool,
    /// Tolerance below which the sweep switches to certainty schedules
    /// (default 1/n).
    #[arg(long = "exact-threshold")]
    exact_threshold: Option<f64>,
}

#[derive(Args)]
struct RunArgs {
    /// Search procedure to run.
    #[arg(long, value_enum)]
    algo: AlgoArg,
    /// Search space size.
    #[arg(long)]
    n: u64,
    /// Marked count: an integer, a comma-separated list, or "worst" to
    /// expand to adversarial values from the worst-case analysis.
    #[arg(long)]
    t: String,
    /// Tolerated failure probability, in (0, 1).
    #[arg(long)]
    eps: f64,
    /// Trials per row.
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    /// Master seed; per-row seeds derive from it (see --help).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Skip the classical tail of the improved procedure.
    #[arg(long = "no-part3")]
    no_part3: bool,
    /// Tolerance below which the sweep switches to certainty schedules
    /// (default 1/n).
    #[arg(long = "exact-threshold")]
    exact_threshold: Option<f64>,
}

#[derive(Args)]
struct CurvesArgs {
    /// Which curve to emit.
    #[arg(value_enum)]
    kind: CurveKind,
    /// Draw bound for p-vs-theta.
    #[arg(long, default_value_t = 7)]
    k: u64,
    /// Sample count for p-vs-theta.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Search space size for success-vs-n.
    #[arg(long)]
    n: Option<u64>,
    /// Marked count for success-vs-n.
    #[arg(long)]
    t: Option<u64>,
    /// Largest iteration count for success-vs-n.
    #[arg(long = "max-iters", default_value_t = 20)]
    max_iters: u64,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Search space size; omit to print only the limiting constants.
    #[arg(long)]
    n: Option<u64>,
    /// Sweep ceiling the draw bound is tuned for.
    #[arg(long, default_value_t = 1)]
    t0: u64,
    /// Draw bound override (default ceil(pi/4 * sqrt(n/t0))).
    #[arg(long)]
    k: Option<u64>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum AlgoArg {
    Classical,
    Simple,
    Improved,
}

impl AlgoArg {
    fn to_algorithm(self) -> Algorithm {
        match self {
            AlgoArg::Classical => Algorithm::Classical,
            AlgoArg::Simple => Algorithm::Simple,
            AlgoArg::Improved => Algorithm::Improved,
        }
    }

    fn name(self) -> &'static str {
        match self {
            AlgoArg::Classical => "classical",
            AlgoArg::Simple => "simple",
            AlgoArg::Improved => "improved",
        }
    }

    fn id(self) -> u64 {
        match self {
            AlgoArg::Classical => 0,
            AlgoArg::Simple => 1,
            AlgoArg::Improved => 2,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum CurveKind {
    /// Average success probability of a uniformly drawn run vs theta.
    PVsTheta,
    /// Success probability vs iteration count for one instance.
    SuccessVsN,
}

enum CliError {
    /// Bad or inconsistent arguments; exit code 2.
    Usage(String),
    /// Failures after argument digestion (I/O); exit code 1.
    Runtime(String),
}

impl From<qsearch_core::Error> for CliError {
    fn from(err: qsearch_core::Error) -> Self {
        CliError::Usage(err.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Plan(args) => cmd_plan(&args),
        Command::Run(args) => cmd_run(&args),
        Command::Curves(args) => cmd_curves(&args),
        Command::Analyze(args) => cmd_analyze(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

/// Probabilities are printed with 17 fractional digits so every value
/// carries at least 12 significant digits and reruns are byte-identical.
fn fmt_prob(p: f64) -> String {
    format!("{p:.17}")
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn row_seed(master: u64, algo: AlgoArg, n: u64, t: u64) -> u64 {
    let mut s = splitmix64(master);
    s = splitmix64(s ^ algo.id());
    s = splitmix64(s ^ n);
    s = splitmix64(s ^ t);
    s
}

fn planner_config(no_part3: bool, exact_threshold: Option<f64>) -> PlannerConfig {
    PlannerConfig {
        include_part3: !no_part3,
        exact_threshold,
    }
}

/// Write to stdout, treating a closed pipe as success so commands behave
/// under `head` and friends.
fn write_stdout(content: &str) -> Result<(), CliError> {
    let mut out = io::stdout().lock();
    match out.write_all(content.as_bytes()).and_then(|()| out.flush()) {
        Ok(()) => Ok(()),
        Err(err) if err.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        Err(err) => Err(CliError::Runtime(format!("cannot write to stdout: {err}"))),
    }
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        None => write_stdout(content),
        Some(path) => fs::write(path, content)
            .map_err(|err| CliError::Runtime(format!("cannot write {}: {err}", path.display()))),
    }
}

fn cmd_plan(args: &PlanArgs) -> Result<(), CliError> {
    let config = planner_config(args.no_part3, args.exact_threshold);
    let plan = plan_with(args.n, args.eps, &config)?;
    let estimate = predicted_queries(args.n, args.eps)?;

    let mut text = String::new();
    let _ = writeln!(text, "plan for n = {}, eps = {}", plan.n_total, plan.eps);
    let _ = writeln!(text, "  sweep ceiling t0:        {}", plan.t0);
    match &plan.part1_schedules {
        Part1Schedules::Standard(iters) => {
            let _ = writeln!(text, "  sweep mode:              standard iterations");
            let _ = writeln!(text, "  part 1 iterations:       {iters:?}");
        }
        Part1Schedules::Exact(schedules) => {
            let queries: Vec<u64> = schedules.iter().map(|s| s.total_queries()).collect();
            let _ = writeln!(text, "  sweep mode:              certainty schedules");
            let _ = writeln!(text, "  part 1 queries per run:  {queries:?}");
        }
    }
    let _ = writeln!(
        text,
        "  part 2 runs:             {} (draw bound k = {})",
        plan.part2_runs, plan.part2_k
    );
    let _ = writeln!(text, "  part 3 classical checks: {}", plan.part3_checks);
    let _ = writeln!(text, "  success floor used:      {}", fmt_prob(plan.p_used));
    let _ = writeln!(
        text,
        "  predicted simple queries:   {:.3}",
        estimate.simple_queries
    );
    let _ = writeln!(
        text,
        "  predicted improved queries: {:.3}",
        estimate.improved_queries
    );
    let _ = writeln!(
        text,
        "  failure coefficient c:      {:.6e} (eps = exp(-c T^2))",
        estimate.c_coefficient
    );
    let _ = writeln!(text);
    let _ = writeln!(
        text,
        "n,eps,t0,use_exact,part2_runs,part2_k,part3_checks,p_used,\
         simple_queries,improved_queries"
    );
    let _ = writeln!(
        text,
        "{},{},{},{},{},{},{},{},{:.3},{:.3}",
        plan.n_total,
        fmt_prob(plan.eps),
        plan.t0,
        plan.use_exact,
        plan.part2_runs,
        plan.part2_k,
        plan.part3_checks,
        fmt_prob(plan.p_used),
        estimate.simple_queries,
        estimate.improved_queries,
    );
    write_stdout(&text)
}

/// Expand the --t argument into concrete marked counts.
fn expand_t_values(args: &RunArgs) -> Result<Vec<u64>, CliError> {
    let raw = args.t.trim();
    let mut ts: Vec<u64> = if raw == "worst" {
        worst_marked_counts(args)?
    } else {
        raw.split(',')
            .map(|part| {
                part.trim().parse::<u64>().map_err(|_| {
                    CliError::Usage(format!(
                        "--t expects an integer, a comma-separated list, or \"worst\"; \
                         got {part:?}"
                    ))
                })
            })
            .collect::<Result<_, _>>()?
    };
    ts.sort_unstable();
    ts.dedup();
    for &t in &ts {
        if t > args.n {
            return Err(CliError::Usage(format!("t = {t} exceeds n = {}", args.n)));
        }
    }
    if ts.is_empty() {
        return Err(CliError::Usage("--t expanded to no values".into()));
    }
    Ok(ts)
}

/// Adversarial marked counts: the minimizers of the average success
/// probability for the relevant draw bound, plus the classic hard case t=1.
fn worst_marked_counts(args: &RunArgs) -> Result<Vec<u64>, CliError> {
    let n = args.n;
    let mut ts = vec![1u64.min(n)];
    match args.algo {
        AlgoArg::Classical => {}
        AlgoArg::Simple => {
            let k = ((std::f64::consts::PI / 4.0) * (n as f64).sqrt())
                .ceil()
                .max(1.0) as u64;
            let law = RandomRunLaw::new(k)?;
            ts.push(worst_case_p(law, 1, n)?.t_at_min);
            if n >= 4 {
                ts.push(worst_case_p_in_range(law, 1, n / 2, n)?.t_at_min);
            }
        }
        AlgoArg::Improved => {
            let config = planner_config(args.no_part3, args.exact_threshold);
            let plan = plan_with(n, args.eps, &config)?;
            let law = RandomRunLaw::new(plan.part2_k)?;
            ts.push(plan.t0);
            if plan.t0 < n {
                ts.push(plan.t0 + 1);
            }
            if plan.t0 < n / 2 {
                ts.push(worst_case_p_in_range(law, plan.t0 + 1, n / 2, n)?.t_at_min);
            }
            if n / 2 < n {
                ts.push(worst_case_p_in_range(law, n / 2 + 1, n, n)?.t_at_min);
            }
        }
    }
    Ok(ts)
}

fn cmd_run(args: &RunArgs) -> Result<(), CliError> {
    let ts = expand_t_values(args)?;
    let config = planner_config(args.no_part3, args.exact_threshold);
    let algorithm = args.algo.to_algorithm();

    // Rows are emitted sorted by (algorithm, n, t); with one algorithm and
    // one n per invocation that is the sorted t list.
    let mut csv = String::new();
    let _ = writeln!(
        csv,
        "# qsearch run algo={} n={} eps={} trials={} seed={} part3={} exact_threshold={}",
        args.algo.name(),
        args.n,
        args.eps,
        args.trials,
        args.seed,
        !args.no_part3,
        args.exact_threshold
            .map_or_else(|| "default".into(), |x| x.to_string()),
    );
    let _ = writeln!(
        csv,
        "algorithm,n,t,eps,trials,seed,failures,false_positives,failure_rate,\
         mean_queries,mean_iteration_queries,max_queries"
    );
    for &t in &ts {
        let seed = row_seed(args.seed, args.algo, args.n, t);
        let summary = monte_carlo_with(algorithm, args.n, t, args.eps, args.trials, seed, &config)?;
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{:.10},{:.10},{}",
            args.algo.name(),
            args.n,
            t,
            fmt_prob(args.eps),
            summary.trials,
            seed,
            summary.failures,
            summary.false_positives,
            fmt_prob(summary.failure_rate),
            summary.mean_queries,
            summary.mean_iteration_queries,
            summary.max_queries,
        );
    }
    write_output(&args.out, &csv)
}

fn cmd_curves(args: &CurvesArgs) -> Result<(), CliError> {
    let mut csv = String::new();
    match args.kind {
        CurveKind::PVsTheta => {
            let law = RandomRunLaw::new(args.k)?;
            let _ = writeln!(
                csv,
                "# qsearch curves kind=p-vs-theta k={} samples={}",
                args.k, args.samples
            );
            let _ = writeln!(csv, "theta,p");
            for (theta, p) in curve_p_vs_theta(law, args.samples) {
                let _ = writeln!(csv, "{},{}", fmt_prob(theta), fmt_prob(p));
            }
        }
        CurveKind::SuccessVsN => {
            let n = args
                .n
                .ok_or_else(|| CliError::Usage("success-vs-n requires --n".into()))?;
            let t = args
                .t
                .ok_or_else(|| CliError::Usage("success-vs-n requires --t".into()))?;
            let rows = curve_success_vs_iterations(n, t, args.max_iters)?;
            let _ = writeln!(
                csv,
                "# qsearch curves kind=success-vs-n n={n} t={t} max_iters={}",
                args.max_iters
            );
            let _ = writeln!(csv, "iterations,probability");
            for (iterations, p) in rows {
                let _ = writeln!(csv, "{iterations},{}", fmt_prob(p));
            }
        }
    }
    write_output(&args.out, &csv)
}

fn push_report(text: &mut String, label: &str, report: &WorstCaseReport) {
    let _ = writeln!(text, "{label}");
    let _ = writeln!(text, "  minimum p:        {}", fmt_prob(report.p_min));
    let _ = writeln!(text, "  attained at t:    {}", report.t_at_min);
    let _ = writeln!(text, "  local minima:     {}", report.local_minima.len());
    for m in report.local_minima.iter().take(8) {
        let _ = writeln!(
            text,
            "    t = {:<12} theta = {:.9}  p = {}",
            m.t,
            m.theta,
            fmt_prob(m.p)
        );
    }
    if report.local_minima.len() > 8 {
        let _ = writeln!(text, "    ... ({} more)", report.local_minima.len() - 8);
    }
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<(), CliError> {
    let c = asymptotic_minima();
    let mut text = String::new();
    let _ = writeln!(
        text,
        "limiting constants of the average success probability"
    );
    let _ = writeln!(
        text,
        "  interior stationary point x_inner: {:.12}",
        c.x_inner
    );
    let _ = writeln!(
        text,
        "  edge stationary point x_edge:      {:.12}",
        c.x_edge
    );
    let _ = writeln!(
        text,
        "  floor for marked fraction <= 1/2 (p1): {}",
        fmt_prob(c.p1)
    );
    let _ = writeln!(
        text,
        "  floor for any marked fraction (p2):    {}",
        fmt_prob(c.p2)
    );

    let Some(n) = args.n else {
        return write_stdout(&text);
    };
    if args.t0 == 0 || args.t0 > n {
        return Err(CliError::Usage(format!("--t0 must be in 1..={n}")));
    }
    let k = match args.k {
        Some(k) => k,
        None => ((std::f64::consts::PI / 4.0) * (n as f64 / args.t0 as f64).sqrt())
            .ceil()
            .max(1.0) as u64,
    };
    let law = RandomRunLaw::new(k)?;
    let _ = writeln!(text);
    let _ = writeln!(
        text,
        "worst case over marked counts for n = {n}, draw bound k = {k}"
    );
    push_report(&mut text, "full range 1..=n:", &worst_case_p(law, 1, n)?);
    if n >= 4 {
        push_report(
            &mut text,
            "restricted to 1..=n/2:",
            &worst_case_p_in_range(law, 1, n / 2, n)?,
        );
    }
    write_stdout(&text)
}
