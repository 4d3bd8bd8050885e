//! Command-line experiments: bounds, random-code searches, phase grids,
//! code counting and sampling, the discrimination game, and dense-state
//! verification.

use std::fmt;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::Context;
use bellrep_core::ensemble::{
    classify_phase_with_tolerance, entropy, gamma1_single, gamma_upper_bound, theorem1_bound,
    DEFAULT_CRITICAL_TOLERANCE,
};
use bellrep_core::quantum::{self, bell_reduction_check, optimal_success_quantum, stabilizer_state, verify_lemma1};
use bellrep_core::rng::{self, domain};
use bellrep_core::symplectic::{
    containment_ratio, count_containing, count_self_dual, enumerate_all, ENUMERATE_MAX_QUBITS,
};
use bellrep_core::{
    chi_report, eta_exact, failure_bound, game_simulate, BitString, CodeFile, GameOptions, ProbVec4, SearchBudget,
    SelfDualCode,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "bellrep", version, about = "Stabilizer-code discrimination of N-fold Bell ensembles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Random seed.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads; all cores when absent.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Upper bounds on the N-copy success probability.
    Bound {
        #[command(flatten)]
        dist: DistArgs,
        #[command(flatten)]
        range: RangeArgs,
        #[command(flatten)]
        eps: EpsArgs,
    },
    /// Best random stabilizer code per N against the single-copy optimum.
    Converge {
        #[command(flatten)]
        dist: DistArgs,
        #[command(flatten)]
        range: RangeArgs,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        eps: EpsArgs,
    },
    /// Entropy phase diagram over p = (s, t, 1 - s - t, 0).
    Phase {
        #[arg(long, default_value_t = 0.01)]
        grid_res: f64,
        #[arg(long, default_value_t = DEFAULT_CRITICAL_TOLERANCE)]
        critical_tol: f64,
    },
    /// Count, sample or enumerate self-dual codes.
    Codes {
        #[command(subcommand)]
        action: CodesAction,
    },
    /// Single-round versus N-round game report, plus a simulated game.
    Game {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        search: SearchArgs,
        /// Rounds of the simulated game.
        #[arg(long, default_value_t = 100_000)]
        game_trials: u64,
        /// Play the simulated game with this code instead of the best one found.
        #[arg(long)]
        code_file: Option<PathBuf>,
    },
    /// Dense state-vector and counting cross-checks.
    Verify {
        #[command(flatten)]
        range: RangeArgs,
        /// Random codes per N.
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Check this code instead of random ones.
        #[arg(long)]
        code_file: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum CodesAction {
    Count {
        #[command(flatten)]
        range: RangeArgs,
    },
    Sample {
        #[arg(long)]
        n: usize,
    },
    Enumerate {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct DistArgs {
    /// Four probabilities p00,p01,p10,p11.
    #[arg(long, value_parser = parse_p)]
    pub p: Option<ProbVec4>,
    /// Pair s,t meaning p = (s, t, 1 - s - t, 0).
    #[arg(long, value_parser = parse_st)]
    pub st: Option<ProbVec4>,
}

impl DistArgs {
    fn get(&self) -> ProbVec4 {
        self.p.or(self.st).expect("clap enforces one of --p / --st")
    }
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct RangeArgs {
    #[arg(long)]
    pub n: Option<usize>,
    /// Inclusive range lo:hi.
    #[arg(long, value_parser = parse_range)]
    pub n_range: Option<(usize, usize)>,
}

impl RangeArgs {
    fn values(&self) -> Vec<usize> {
        match (self.n, self.n_range) {
            (Some(n), _) => vec![n],
            (None, Some((lo, hi))) => (lo..=hi).collect(),
            (None, None) => unreachable!("clap enforces one of --n / --n-range"),
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct EpsArgs {
    /// Comma-separated epsilon grid; bounds report the minimum over it.
    #[arg(long, value_parser = parse_eps_grid, default_value = "0.05,0.1,0.2,0.3,0.5")]
    pub eps_grid: EpsGrid,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct EpsGrid(pub Vec<f64>);

#[derive(Args, Debug, Clone)]
pub struct SearchArgs {
    /// Random codes per N.
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    /// Monte-Carlo samples per code when N > 12.
    #[arg(long, default_value_t = 500)]
    pub samples: u64,
    /// Fresh samples for the best code when N > 12.
    #[arg(long, default_value_t = 20_000)]
    pub final_samples: u64,
}

impl SearchArgs {
    fn budget(&self) -> SearchBudget {
        SearchBudget { trials: self.trials, screen_samples: self.samples, final_samples: self.final_samples }
    }
}

fn parse_floats(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(|x| x.trim().parse::<f64>().map_err(|e| format!("'{x}': {e}"))).collect()
}

fn parse_p(s: &str) -> Result<ProbVec4, String> {
    let v = parse_floats(s)?;
    let arr: [f64; 4] = v.try_into().map_err(|v: Vec<f64>| format!("expected 4 values, got {}", v.len()))?;
    ProbVec4::new(arr).map_err(|e| e.to_string())
}

fn parse_st(s: &str) -> Result<ProbVec4, String> {
    let v = parse_floats(s)?;
    let [s, t]: [f64; 2] = v.try_into().map_err(|v: Vec<f64>| format!("expected 2 values, got {}", v.len()))?;
    if !(s >= 0.0 && t >= 0.0 && s + t <= 1.0 + 1e-12) {
        return Err(format!("({s}, {t}) is outside the simplex"));
    }
    ProbVec4::from_st(s, t).map_err(|e| e.to_string())
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got '{s}'"))?;
    let lo: usize = lo.trim().parse().map_err(|e| format!("'{lo}': {e}"))?;
    let hi: usize = hi.trim().parse().map_err(|e| format!("'{hi}': {e}"))?;
    if lo > hi {
        return Err(format!("empty range {lo}:{hi}"));
    }
    Ok((lo, hi))
}

fn parse_eps_grid(s: &str) -> Result<EpsGrid, String> {
    let v = parse_floats(s)?;
    if v.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Err("epsilon values must be positive".into());
    }
    Ok(EpsGrid(v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    /// Bad flags, inputs or files.
    Config,
    /// A check or internal invariant did not hold.
    Invariant,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: FailureKind,
    pub error: anyhow::Error,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self.kind {
            FailureKind::Config => 2,
            FailureKind::Invariant => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

fn config_error(error: impl Into<anyhow::Error>) -> CliError {
    CliError { kind: FailureKind::Config, error: error.into() }
}

fn config_msg(msg: String) -> CliError {
    config_error(anyhow::anyhow!(msg))
}

/// Rows with a fixed column order, rendered as CSV or as a JSON array.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| Value::Object(self.columns.iter().map(|c| c.to_string()).zip(r.iter().cloned()).collect()))
                .collect(),
        )
    }
}

enum Payload {
    Table(Table),
    Report(Value),
}

/// A finished command: what to write and whether every check passed.
pub struct Outcome {
    pub text: String,
    pub checks_passed: bool,
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn render(
    command: &str,
    config: &Value,
    seed: u64,
    payload: &Payload,
    format: Format,
    seconds: f64,
    threads: usize,
) -> Result<String, CliError> {
    let timings = json!({ "wall_seconds": seconds, "threads": threads });
    match (format, payload) {
        (Format::Json, payload) => {
            let result = match payload {
                Payload::Table(t) => t.to_json(),
                Payload::Report(v) => v.clone(),
            };
            let doc = json!({
                "version": VERSION,
                "command": command,
                "config": config,
                "seed": seed,
                "result": result,
                "timings": timings,
            });
            Ok(serde_json::to_string_pretty(&doc).expect("JSON values serialize") + "\n")
        }
        (Format::Csv, Payload::Table(t)) => {
            let mut out = format!(
                "# version: {VERSION}\n# command: {command}\n# config: {config}\n# seed: {seed}\n# timings: {timings}\n"
            );
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&t.columns).map_err(config_error)?;
            for row in &t.rows {
                w.write_record(row.iter().map(cell)).map_err(config_error)?;
            }
            out.push_str(&String::from_utf8(w.into_inner().map_err(|e| config_error(e.into_error()))?).expect("utf-8"));
            Ok(out)
        }
        (Format::Csv, Payload::Report(_)) => {
            Err(config_msg(format!("'{command}' produces a report; use --format json")))
        }
    }
}

fn load_code(path: &PathBuf) -> Result<SelfDualCode, CliError> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading code file {}", path.display()))
        .map_err(config_error)?;
    let value: Value = serde_json::from_str(&text)
        .with_context(|| format!("parsing code file {}", path.display()))
        .map_err(config_error)?;
    let file = value.pointer("/result/code").cloned().unwrap_or(value);
    let file: CodeFile =
        serde_json::from_value(file).with_context(|| format!("code file {}", path.display())).map_err(config_error)?;
    SelfDualCode::from_file(&file).with_context(|| format!("code file {}", path.display())).map_err(config_error)
}

fn core<T>(r: bellrep_core::Result<T>) -> Result<T, CliError> {
    r.map_err(config_error)
}

fn min_over_grid(grid: &[f64], f: impl Fn(f64) -> bellrep_core::Result<f64>) -> Result<(f64, f64), CliError> {
    let mut best = (f64::INFINITY, grid[0]);
    for &eps in grid {
        let v = core(f(eps))?;
        if v < best.0 {
            best = (v, eps);
        }
    }
    Ok(best)
}

fn cmd_bound(p: &ProbVec4, ns: &[usize], grid: &[f64]) -> Result<Payload, CliError> {
    let mut t = Table::new(&["n", "gamma_upper_bound", "entropy_bound", "best_eps", "entropy", "gamma1"]);
    for &n in ns {
        let (bound, eps) = min_over_grid(grid, |e| theorem1_bound(p, n, e))?;
        t.push(vec![
            json!(n),
            json!(core(gamma_upper_bound(p, n))?),
            json!(bound),
            json!(eps),
            json!(entropy(p)),
            json!(gamma1_single(p)),
        ]);
    }
    Ok(Payload::Table(t))
}

fn cmd_converge(
    p: &ProbVec4,
    ns: &[usize],
    budget: SearchBudget,
    grid: &[f64],
    seed: u64,
) -> Result<Payload, CliError> {
    let mut t = Table::new(&[
        "n",
        "eta_best",
        "stderr",
        "method",
        "eta_mean",
        "gamma1",
        "failure_bound",
        "best_eps",
        "upper_bound",
        "counterexample_flag",
    ]);
    for &n in ns {
        let report = core(chi_report(p, n, budget, rng::child_seed(seed, domain::SEARCH_SCREEN, n as u64)))?;
        let (bound, eps) = min_over_grid(grid, |e| failure_bound(p, n, e))?;
        t.push(vec![
            json!(n),
            json!(report.eta_best),
            json!(report.eta_stderr),
            serde_json::to_value(report.eta_method).expect("method serializes"),
            json!(report.eta_mean),
            json!(report.gamma1),
            json!(bound),
            json!(eps),
            json!(report.upper_bound),
            json!(report.counterexample_flag),
        ]);
    }
    Ok(Payload::Table(t))
}

fn cmd_phase(res: f64, critical_tol: f64) -> Result<Payload, CliError> {
    if !(res > 0.0 && res <= 1.0) {
        return Err(config_msg(format!("grid resolution {res} must lie in (0, 1]")));
    }
    let steps = (1.0 / res).round();
    if (steps * res - 1.0).abs() > 1e-9 || steps > 10_000.0 {
        return Err(config_msg(format!("grid resolution {res} must be 1/k for an integer k <= 10000")));
    }
    if critical_tol.is_nan() || critical_tol < 0.0 {
        return Err(config_msg(format!("critical tolerance {critical_tol} must be non-negative")));
    }
    let k = steps as usize;
    let mut t = Table::new(&["s", "t", "entropy", "separable", "label"]);
    for i in 0..=k {
        for j in 0..=k - i {
            let (s, tt) = (i as f64 / k as f64, j as f64 / k as f64);
            let ph = core(classify_phase_with_tolerance(s, tt, critical_tol))?;
            t.push(vec![json!(s), json!(tt), json!(ph.entropy), json!(ph.separable), json!(ph.label.to_string())]);
        }
    }
    Ok(Payload::Table(t))
}

fn cmd_codes(action: &CodesAction, seed: u64) -> Result<Payload, CliError> {
    match action {
        CodesAction::Count { range } => {
            let mut t = Table::new(&["n", "count", "containing", "ratio"]);
            for n in range.values() {
                if n == 0 {
                    return Err(config_msg("N must be at least 1".into()));
                }
                t.push(vec![
                    json!(n),
                    json!(count_self_dual(n).to_string()),
                    json!(count_containing(n).to_string()),
                    json!(containment_ratio(n).to_string()),
                ]);
            }
            Ok(Payload::Table(t))
        }
        CodesAction::Sample { n } => {
            let code = core(SelfDualCode::sample_uniform(*n, &mut rng::stream(seed, domain::CODE_SAMPLE, 0)))?;
            Ok(Payload::Report(json!({ "code": code.to_file() })))
        }
        CodesAction::Enumerate { n } => {
            if *n == 0 || *n > ENUMERATE_MAX_QUBITS {
                return Err(config_msg(format!("enumerate supports 1 <= N <= {ENUMERATE_MAX_QUBITS}, got {n}")));
            }
            let mut t = Table::new(&["index", "n_qubits", "generators"]);
            for (i, code) in core(enumerate_all(*n))?.iter().enumerate() {
                t.push(vec![json!(i), json!(n), json!(code.to_file().generators.join(" "))]);
            }
            Ok(Payload::Table(t))
        }
    }
}

fn cmd_game(
    p: &ProbVec4,
    n: usize,
    budget: SearchBudget,
    game_trials: u64,
    code_file: Option<&PathBuf>,
    seed: u64,
) -> Result<Payload, CliError> {
    let report = core(chi_report(p, n, budget, seed))?;
    let (code, source) = match code_file {
        Some(path) => {
            let code = load_code(path)?;
            if code.n_qubits() != n {
                return Err(config_msg(format!("code file has N = {}, expected {n}", code.n_qubits())));
            }
            (code, "file")
        }
        None => (report.best_code.clone(), "search"),
    };
    let game =
        core(game_simulate(p, &code, game_trials, rng::child_seed(seed, domain::GAME, 0), GameOptions::default()))?;
    Ok(Payload::Report(json!({
        "report": report,
        "game": game,
        "game_code": code.to_file(),
        "game_code_source": source,
    })))
}

#[derive(Serialize)]
struct CheckRow {
    check: &'static str,
    n: usize,
    cases: usize,
    passed: bool,
}

fn random_p(r: &mut rng::StreamRng) -> ProbVec4 {
    use rand::Rng;
    let w: [f64; 4] = std::array::from_fn(|_| -(1.0 - r.random::<f64>()).ln());
    let s: f64 = w.iter().sum();
    let mut v = w.map(|x| x / s);
    v[3] = (1.0 - v[0] - v[1] - v[2]).max(0.0);
    ProbVec4::new(v).expect("normalized")
}

fn code_checks(code: &SelfDualCode, p: &ProbVec4) -> Result<[bool; 4], CliError> {
    let n = code.n_qubits();
    let states = (0..1u64 << n)
        .map(|a| core(stabilizer_state(code, &BitString::from_word(a, n))))
        .collect::<Result<Vec<_>, _>>()?;
    let orthonormal = states.iter().enumerate().all(|(a, x)| {
        states.iter().enumerate().all(|(b, y)| {
            let expected = if a == b { 1.0 } else { 0.0 };
            (x.inner(y).norm() - expected).abs() <= quantum::TOLERANCE
        })
    });
    let permutes = core(verify_lemma1(code))?;
    let reduction = core(bell_reduction_check(code, p))?;
    let optimal = (core(optimal_success_quantum(code, p))? - core(eta_exact(code, p))?.eta).abs() <= quantum::TOLERANCE;
    Ok([orthonormal, permutes, reduction, optimal])
}

const CODE_CHECKS: [&str; 4] =
    ["stabilizer_states_orthonormal", "paulis_permute_states", "bell_reduction", "quantum_matches_classical"];

fn cmd_verify(
    ns: &[usize],
    trials: usize,
    code_file: Option<&PathBuf>,
    seed: u64,
) -> Result<(Payload, bool), CliError> {
    let max = quantum::CHECK_MAX_QUBITS;
    let mut t = Table::new(&["check", "n", "cases", "passed"]);
    let push = |t: &mut Table, row: CheckRow| {
        t.push(vec![json!(row.check), json!(row.n), json!(row.cases), json!(row.passed)]);
        row.passed
    };
    let mut all = true;
    let codes: Vec<(usize, Vec<SelfDualCode>)> = match code_file {
        Some(path) => {
            let code = load_code(path)?;
            if code.n_qubits() > max {
                return Err(config_msg(format!("quantum checks support N <= {max}, code has N = {}", code.n_qubits())));
            }
            vec![(code.n_qubits(), vec![code])]
        }
        None => {
            if let Some(&bad) = ns.iter().find(|&&n| n == 0 || n > max) {
                return Err(config_msg(format!("quantum checks support 1 <= N <= {max}, got {bad}")));
            }
            if trials == 0 {
                return Err(config_msg("--trials must be positive".into()));
            }
            ns.iter()
                .map(|&n| {
                    let mut r = rng::stream(seed, domain::VERIFY, n as u64);
                    let codes =
                        (0..trials).map(|_| core(SelfDualCode::sample_uniform(n, &mut r))).collect::<Result<_, _>>()?;
                    Ok((n, codes))
                })
                .collect::<Result<_, CliError>>()?
        }
    };
    for (n, list) in &codes {
        let mut r = rng::stream(seed, domain::VERIFY, 1000 + *n as u64);
        let mut passed = [true; 4];
        for code in list {
            let p = random_p(&mut r);
            for (slot, ok) in passed.iter_mut().zip(code_checks(code, &p)?) {
                *slot &= ok;
            }
        }
        for (check, ok) in CODE_CHECKS.iter().zip(passed) {
            all &= push(&mut t, CheckRow { check, n: *n, cases: list.len(), passed: ok });
        }
    }
    for n in 1..=ENUMERATE_MAX_QUBITS {
        let listed = core(enumerate_all(n))?;
        let count_ok = num_bigint::BigUint::from(listed.len()) == count_self_dual(n);
        all &= push(&mut t, CheckRow { check: "count_matches_enumeration", n, cases: listed.len(), passed: count_ok });
        let expected = count_containing(n);
        let containing_ok = (1u64..1 << (2 * n)).all(|c| {
            let c = BitString::from_word(c, 2 * n);
            num_bigint::BigUint::from(listed.iter().filter(|code| code.contains(&c).unwrap_or(false)).count())
                == expected
        });
        all &= push(
            &mut t,
            CheckRow { check: "containing_matches_enumeration", n, cases: (1 << (2 * n)) - 1, passed: containing_ok },
        );
    }
    Ok((Payload::Table(t), all))
}

fn echo<T: Serialize>(command: &str, fields: T) -> Value {
    let mut v = serde_json::to_value(fields).expect("config serializes");
    if let Value::Object(m) = &mut v {
        m.insert("subcommand".into(), json!(command));
    }
    v
}

fn p_value(p: &ProbVec4) -> Value {
    json!(p.as_array())
}

/// Runs a parsed command line and renders its output.
pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let out = &cli.output;
    let seed = out.seed;
    let threads = out.threads.unwrap_or_else(rayon::current_num_threads);
    if threads == 0 {
        return Err(config_msg("--threads must be positive".into()));
    }
    let report_only =
        matches!(cli.command, Command::Game { .. } | Command::Codes { action: CodesAction::Sample { .. } });
    if report_only && out.format == Some(Format::Csv) {
        return Err(config_msg("this command produces a report; use --format json".into()));
    }
    let report_only =
        matches!(cli.command, Command::Game { .. } | Command::Codes { action: CodesAction::Sample { .. } });
    if report_only && out.format == Some(Format::Csv) {
        return Err(config_msg("this command produces a report; use --format json".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(config_error)?;
    let start = Instant::now();

    let (command, config, default_format, payload, checks_passed) = pool.install(|| -> Result<_, CliError> {
        Ok(match &cli.command {
            Command::Bound { dist, range, eps } => {
                let p = dist.get();
                let config = echo("bound", json!({ "p": p_value(&p), "n": range.values(), "eps_grid": eps.eps_grid }));
                ("bound", config, Format::Csv, cmd_bound(&p, &range.values(), &eps.eps_grid.0)?, true)
            }
            Command::Converge { dist, range, search, eps } => {
                let p = dist.get();
                let config = echo(
                    "converge",
                    json!({ "p": p_value(&p), "n": range.values(), "search": search.budget(), "eps_grid": eps.eps_grid }),
                );
                let payload = cmd_converge(&p, &range.values(), search.budget(), &eps.eps_grid.0, seed)?;
                ("converge", config, Format::Csv, payload, true)
            }
            Command::Phase { grid_res, critical_tol } => {
                let config = echo("phase", json!({ "grid_res": grid_res, "critical_tol": critical_tol }));
                ("phase", config, Format::Csv, cmd_phase(*grid_res, *critical_tol)?, true)
            }
            Command::Codes { action } => {
                let (name, fields, fmt) = match action {
                    CodesAction::Count { range } => ("count", json!({ "n": range.values() }), Format::Csv),
                    CodesAction::Sample { n } => ("sample", json!({ "n": n }), Format::Json),
                    CodesAction::Enumerate { n } => ("enumerate", json!({ "n": n }), Format::Csv),
                };
                let config = echo("codes", json!({ "action": name, "args": fields }));
                ("codes", config, fmt, cmd_codes(action, seed)?, true)
            }
            Command::Game { dist, n, search, game_trials, code_file } => {
                let p = dist.get();
                let config = echo(
                    "game",
                    json!({
                        "p": p_value(&p),
                        "n": n,
                        "search": search.budget(),
                        "game_trials": game_trials,
                        "code_file": code_file.is_some(),
                    }),
                );
                let payload = cmd_game(&p, *n, search.budget(), *game_trials, code_file.as_ref(), seed)?;
                ("game", config, Format::Json, payload, true)
            }
            Command::Verify { range, trials, code_file } => {
                let config = echo(
                    "verify",
                    json!({ "n": range.values(), "trials": trials, "code_file": code_file.is_some() }),
                );
                let (payload, ok) = cmd_verify(&range.values(), *trials, code_file.as_ref(), seed)?;
                ("verify", config, Format::Json, payload, ok)
            }
        })
    })?;

    let format = out.format.unwrap_or(default_format);
    let text = render(command, &config, seed, &payload, format, start.elapsed().as_secs_f64(), threads)?;
    Ok(Outcome { text, checks_passed })
}

/// Writes `outcome` to `--out` or standard output.
pub fn emit(outcome: &Outcome, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, &outcome.text)
            .with_context(|| format!("writing {}", path.display()))
            .map_err(config_error),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(outcome.text.as_bytes()).context("writing output").map_err(config_error)
        }
    }
}
