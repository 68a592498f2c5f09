//! The `unilab` command-line tool.
//!
//! Every subcommand writes to standard output unless `--output` is given.
//! Exit status is 0 on success, 1 when the input is valid but the requested
//! computation is undefined for it (for example reconstructing a matrix that
//! is not unistochastic), and 2 on usage errors.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde_json::json;

use unilab::analytic::{
    b3_q_integrals, cdf_absj, closed_form_table, constants_table, jarlskog_density,
    mean_entropy_b3, volume_ratio, DEFAULT_TOL, J_MAX, J_OBS,
};
use unilab::bistochastic::{
    all_link_triples, chain_link_feasible, classify, q_of, BistochasticMatrix, MatrixInput,
};
use unilab::estimators::{
    collect_samples, estimate_many, moment_suite, EstimateResult, Parallelism, Statistic,
};
use unilab::unitary::{reconstruct, ComplexMatrixJson};
use unilab::{Error, MeasureSpec};

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 271_828;

/// Smallest `|J|` on the `dist` grid.
pub const DIST_Y_MIN: f64 = 1e-7;

#[derive(Debug, Parser)]
#[command(
    name = "unilab",
    version,
    about = "Unistochastic matrices of order three"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify a bistochastic matrix and report Q, J² and link lengths.
    Check(InputArgs),
    /// Reconstruct a unitary whose squared moduli give the matrix.
    Reconstruct(InputArgs),
    /// Dump samples of a measure as CSV.
    Sample(SampleArgs),
    /// Print closed-form constants.
    Analytic(AnalyticArgs),
    /// Tabulate the density or distribution function of |J|.
    Dist(DistArgs),
    /// Monte Carlo estimate of a closed-form target.
    Estimate(EstimateArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Matrix JSON: {"rows": [[..],[..],[..]]} or {"b": [b1, b2, b3, b4]}.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SeedArgs {
    /// RNG seed; 0 draws a fresh seed from the operating system.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads (0 = all cores). Results do not depend on it.
    #[arg(long, env = "UNILAB_THREADS", default_value_t = 0)]
    threads: usize,
}

#[derive(Debug, Args)]
struct SampleArgs {
    /// haar, mu:K (K > 1/2, e.g. mu:3/2) or flat-b3.
    #[arg(long)]
    measure: MeasureSpec,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    #[command(flatten)]
    seed: SeedArgs,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct AnalyticArgs {
    /// Print the per-k tables for k = 1, 3/2, 2 and all named constants.
    #[arg(long)]
    table: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum What {
    Pdf,
    Cdf,
}

#[derive(Debug, Args)]
struct DistArgs {
    /// haar or mu:K.
    #[arg(long)]
    measure: MeasureSpec,
    #[arg(long, value_enum)]
    what: What,
    /// Number of log-spaced grid points in [1e-7, 1/(6√3)]; the observed
    /// value 3.08e-5 is always added.
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(2..=1_000_000))]
    points: u64,
    /// Absolute tolerance of each value.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Target {
    /// P{Q ≥ 0}.
    VolumeRatio,
    Entropy,
    J2,
    Q,
    /// P{|J| ≤ 3.08e-5}.
    ProbJobs,
    /// ⟨Qⁿ⟩ for n = 0..4.
    Moments,
}

#[derive(Debug, Args)]
struct EstimateArgs {
    #[arg(long, value_enum)]
    target: Target,
    /// Defaults to flat-b3 for volume-ratio and haar otherwise.
    #[arg(long)]
    measure: Option<MeasureSpec>,
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(100..))]
    n: u64,
    #[command(flatten)]
    seed: SeedArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

/// A failure together with its exit status.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(flag: &str, message: impl std::fmt::Display) -> Self {
        Failure {
            code: 2,
            message: format!("{flag}: {message}"),
        }
    }

    fn domain(message: impl std::fmt::Display) -> Self {
        Failure {
            code: 1,
            message: message.to_string(),
        }
    }
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure::usage("--output", format!("{}: {e}", path.display()))
}

type Outcome = Result<(), Failure>;

/// Parses `argv` (including the program name) and runs the subcommand.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit output streams.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    match command {
        Command::Check(a) => check(&a, out),
        Command::Reconstruct(a) => reconstruct_cmd(&a, out),
        Command::Sample(a) => sample(&a, out, err),
        Command::Analytic(a) => analytic(&a, out),
        Command::Dist(a) => dist(&a, out),
        Command::Estimate(a) => estimate(&a, out, err),
    }
}

/// Writes `text` to `path` if given, else to `out`.
fn emit(path: Option<&Path>, out: &mut dyn Write, text: &str) -> Outcome {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| io_failure(p, e)),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Failure::domain(format!("writing output: {e}"))),
    }
}

fn read_matrix(path: &Path) -> Result<BistochasticMatrix<f64>, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::usage("--input", format!("{}: {e}", path.display())))?;
    let input: MatrixInput = serde_json::from_str(&text)
        .map_err(|e| Failure::usage("--input", Error::Json(e.to_string())))?;
    input
        .into_matrix()
        .map_err(|e| Failure::usage("--input", e))
}

fn pretty(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

fn check(a: &InputArgs, out: &mut dyn Write) -> Outcome {
    let m = read_matrix(&a.input)?;
    let verdict = classify(&m);
    let triples = all_link_triples(&m);
    let closes: Vec<bool> = triples
        .iter()
        .map(|t| chain_link_feasible(t).unwrap_or(false))
        .collect();
    let q = verdict.q_value;
    let value = json!({
        "verdict": verdict.class,
        "q": q,
        "j2": if verdict.class.is_unistochastic() { Some(q.max(0.0) / 4.0) } else { None },
        "link_lengths": verdict.link_lengths,
        "all_link_triples": triples,
        "links_close": closes,
        "matrix": m.entries(),
    });
    emit(a.output.as_deref(), out, &pretty(&value))
}

fn reconstruct_cmd(a: &InputArgs, out: &mut dyn Write) -> Outcome {
    let m = read_matrix(&a.input)?;
    let r = reconstruct(&m).map_err(Failure::domain)?;
    let u = &r.unitary;
    let value = json!({
        "unitary": ComplexMatrixJson::from(u),
        "phases": r.phases,
        "degenerate": r.degenerate,
        "orthogonal": r.degenerate,
        "jarlskog": u.jarlskog(),
        "q": q_of(&m.bvec()),
        "unitarity_defect": u.unitarity_defect(),
    });
    emit(a.output.as_deref(), out, &pretty(&value))
}

fn resolve_seed(seed: u64, err: &mut dyn Write) -> u64 {
    if seed != 0 {
        return seed;
    }
    let fresh = loop {
        let s: u64 = rand::rng().random();
        if s != 0 {
            break s;
        }
    };
    let _ = writeln!(err, "seed: {fresh}");
    fresh
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn sample(a: &SampleArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let seed = resolve_seed(a.seed.seed, err);
    let n = usize::try_from(a.n).map_err(|_| Failure::usage("--n", "too large"))?;
    let records = collect_samples(a.measure, n, seed, Parallelism::threads(a.seed.threads))
        .map_err(|e| Failure::usage("--threads", e))?;
    let haar = a.measure == MeasureSpec::Haar;
    let mut text = String::with_capacity(n * 160);
    text.push_str(if haar {
        "b1,b2,b3,b4,Q,J2,J\n"
    } else {
        "b1,b2,b3,b4,Q,J2\n"
    });
    for r in &records {
        let q = q_of(&r.b);
        let fields = [r.b.b1, r.b.b2, r.b.b3, r.b.b4, q, q / 4.0];
        let mut line: Vec<String> = fields.iter().map(|&v| num(v)).collect();
        if let Some(j) = r.jarlskog {
            line.push(num(j));
        }
        text.push_str(&line.join(","));
        text.push('\n');
    }
    emit(a.output.as_deref(), out, &text)
}

fn analytic(a: &AnalyticArgs, out: &mut dyn Write) -> Outcome {
    if !a.table {
        return Err(Failure::usage("--table", "nothing to print; pass --table"));
    }
    let tables = [1.0, 1.5, 2.0]
        .map(|k| closed_form_table(k).map_err(Failure::domain))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let constants = constants_table().map_err(Failure::domain)?;
    let text = match a.format {
        Format::Json => {
            let bq = b3_q_integrals();
            pretty(&json!({
                "tables": tables,
                "b3": {
                    "volume_ratio": volume_ratio(),
                    "mean_entropy": mean_entropy_b3(),
                    "mean_q": bq.mean,
                    "second_q": bq.second,
                    "sigma_q": bq.sigma,
                },
                "constants": constants,
            }))
        }
        Format::Csv => {
            let mut s = String::from("name,expression,value\n");
            for t in &tables {
                for (field, v) in [
                    ("h_k", t.h_k),
                    ("volume", t.volume),
                    ("mean_entropy", t.mean_entropy),
                    ("mean_j2", t.mean_j2),
                ] {
                    s.push_str(&format!("{field}[k={}],,{}\n", t.k, num(v)));
                }
            }
            for c in &constants {
                s.push_str(&format!(
                    "{},\"{}\",{}\n",
                    c.name,
                    c.expression,
                    num(c.value)
                ));
            }
            s
        }
    };
    emit(a.output.as_deref(), out, &text)
}

/// Log-spaced `|J|` grid on `[DIST_Y_MIN, J_MAX]` with `J_OBS` inserted.
pub fn dist_grid(points: usize) -> Vec<f64> {
    let ratio = (J_MAX / DIST_Y_MIN).ln();
    let mut ys: Vec<f64> = (0..points)
        .map(|i| {
            if i + 1 == points {
                J_MAX
            } else {
                DIST_Y_MIN * (ratio * i as f64 / (points - 1) as f64).exp()
            }
        })
        .collect();
    ys.push(J_OBS.value);
    ys.sort_by(f64::total_cmp);
    ys.dedup();
    ys
}

fn dist(a: &DistArgs, out: &mut dyn Write) -> Outcome {
    let k = a.measure.k().ok_or_else(|| {
        Failure::usage(
            "--measure",
            "|J| has no distribution under flat-b3; use haar or mu:K",
        )
    })?;
    if !(a.tol > 0.0 && a.tol.is_finite()) {
        return Err(Failure::usage("--tol", "must be positive"));
    }
    let mut text = String::from("x,value,error_bound,method\n");
    for y in dist_grid(a.points as usize) {
        let r = match a.what {
            What::Pdf => jarlskog_density(k, y, a.tol),
            What::Cdf => cdf_absj(k, y, a.tol),
        }
        .map_err(Failure::domain)?;
        text.push_str(&format!(
            "{},{},{},{}\n",
            num(y),
            num(r.value),
            num(r.error_bound),
            r.method
        ));
    }
    emit(a.output.as_deref(), out, &text)
}

fn estimate(a: &EstimateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let measure = a.measure.unwrap_or(match a.target {
        Target::VolumeRatio => MeasureSpec::FlatB3,
        _ => MeasureSpec::Haar,
    });
    let seed = resolve_seed(a.seed.seed, err);
    let n = usize::try_from(a.n).map_err(|_| Failure::usage("--n", "too large"))?;
    let par = Parallelism::threads(a.seed.threads);
    let results: Vec<EstimateResult> = match a.target {
        Target::Moments => {
            let k = measure
                .k()
                .ok_or_else(|| Failure::usage("--measure", "moments need haar or mu:K"))?;
            moment_suite(k, 4, n, seed, par).map_err(Failure::domain)?
        }
        t => {
            let stat = match t {
                Target::VolumeRatio => Statistic::IndicatorQNonneg,
                Target::Entropy => Statistic::Entropy,
                Target::J2 => Statistic::J2,
                Target::Q => Statistic::Q,
                Target::ProbJobs => Statistic::IndicatorAbsjLeq(J_OBS.value),
                Target::Moments => unreachable!("handled above"),
            };
            estimate_many(measure, &[stat], n, seed, par).map_err(Failure::domain)?
        }
    };
    let text = match a.format {
        Format::Json => results
            .iter()
            .map(|r| serde_json::to_string(r).expect("serializable result") + "\n")
            .collect(),
        Format::Csv => {
            let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
            let mut s = String::from(
                "name,measure,estimate,std_error,sample_std,n_samples,seed,reference,z_score\n",
            );
            for r in &results {
                s.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{}\n",
                    r.name,
                    r.measure,
                    num(r.estimate),
                    num(r.std_error),
                    num(r.sample_std),
                    r.n_samples,
                    r.seed,
                    opt(r.reference),
                    opt(r.z_score)
                ));
            }
            s
        }
    };
    emit(a.output.as_deref(), out, &text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with(args.iter().copied(), &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn grid_contains_observed_value_and_endpoints() {
        let g = dist_grid(50);
        assert_eq!(g.len(), 51);
        assert!(g.contains(&J_OBS.value));
        assert_eq!(g[0], DIST_Y_MIN);
        assert_eq!(*g.last().unwrap(), J_MAX);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_capture(&["unilab"]).0, 2);
        assert_eq!(
            run_capture(&["unilab", "sample", "--measure", "mu:0.4", "--n", "3"]).0,
            2
        );
        let (code, _, err) = run_capture(&["unilab", "sample", "--measure", "gauss", "--n", "3"]);
        assert_eq!(code, 2);
        assert!(err.contains("--measure"));
        assert_eq!(run_capture(&["unilab", "analytic"]).0, 2);
        assert_eq!(
            run_capture(&["unilab", "dist", "--measure", "flat-b3", "--what", "pdf"]).0,
            2
        );
        assert_eq!(
            run_capture(&["unilab", "estimate", "--target", "q", "--n", "10"]).0,
            2
        );
    }

    #[test]
    fn help_exits_0() {
        let (code, out, _) = run_capture(&["unilab", "--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("reconstruct"));
    }

    #[test]
    fn sample_header() {
        let (code, out, _) = run_capture(&["unilab", "sample", "--measure", "haar", "--n", "2"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().next().unwrap(), "b1,b2,b3,b4,Q,J2,J");
        assert_eq!(out.lines().count(), 3);
    }
}
