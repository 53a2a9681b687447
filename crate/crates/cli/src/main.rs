use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use matchpair_core::decompose::{decompose, verify, DecomposeError, Decomposition};
use matchpair_core::gen::{random_certificate, OpSet};
use matchpair_core::ops::{self, Mode};
use matchpair_core::sweep::{check_tree, lemma_sweep, sweep};
use matchpair_core::{treedp, Certificate, Graph, Oracle, ParamSet};
use serde_json::json;

/// Largest sweep order that runs without `--force`.
const SWEEP_GUARD: usize = 12;

#[derive(Parser)]
#[command(name = "matchpair", version, about = "Disjoint matching pairs in trees: parameters, certificates, sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print n, m and (beta, lambda, alpha, L) of a graph.
    Analyze(AnalyzeArgs),
    /// Cross-check the tree program against the oracle on one tree.
    Check(CheckArgs),
    /// Produce a certificate (lambda = beta + L) or a witness (otherwise).
    Decompose(DecomposeArgs),
    /// Build the graph described by a certificate.
    Replay(ReplayArgs),
    /// Check that a certificate replays to the given tree.
    Verify(VerifyArgs),
    /// Build a random certificate and its tree.
    Generate(GenerateArgs),
    /// Run every check over all free trees up to a given order.
    Sweep(SweepArgs),
    /// Run the structural identity checks over all free trees up to a given order.
    Lemmas(LemmasArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Graph file, or `-` for stdin.
    input: PathBuf,
    /// Use exhaustive enumeration; required for graphs that are not forests.
    #[arg(long)]
    oracle: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CheckArgs {
    input: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct DecomposeArgs {
    input: PathBuf,
    /// Write the certificate or witness here instead of stdout.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReplayArgs {
    cert: PathBuf,
    #[arg(long, default_value = "strict")]
    mode: Mode,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    tree: PathBuf,
    cert: PathBuf,
    #[arg(long, default_value = "strict")]
    mode: Mode,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    steps: usize,
    /// Allowed operations, e.g. `ABCD` or `BD`.
    #[arg(long, default_value = "ABCD")]
    ops: OpSet,
    /// Writes `<out>.graph` and `<out>.cert`; prints both to stdout otherwise.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 10)]
    max_n: usize,
    /// Allow orders above the default guard.
    #[arg(long)]
    force: bool,
    /// Where a smallest counterexample is written if one is found.
    #[arg(long, default_value = "sweep-counterexample.graph")]
    dump: PathBuf,
    /// Run on one thread.
    #[arg(long)]
    serial: bool,
}

#[derive(Args)]
struct LemmasArgs {
    #[arg(long, default_value_t = 10)]
    max_n: usize,
    #[arg(long)]
    force: bool,
}

/// Failure classes, mapped to the process exit status.
enum Failure {
    /// A verification or sweep found a problem.
    Check(String),
    Input(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Check(_) => 1,
            Failure::Input(_) => 2,
            Failure::Internal(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Check(m) | Failure::Input(m) | Failure::Internal(m) => m,
        }
    }
}

type Outcome = Result<(), Failure>;

fn read_text(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| Failure::Input(format!("stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_graph(path: &Path) -> Result<Graph, Failure> {
    Graph::parse(&read_text(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_tree(path: &Path) -> Result<Graph, Failure> {
    let g = read_graph(path)?;
    if !g.is_tree() {
        return Err(Failure::Input(format!("{}: graph is not a tree", path.display())));
    }
    Ok(g)
}

fn read_cert(path: &Path) -> Result<Certificate, Failure> {
    Certificate::parse(&read_text(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn graph_text(g: &Graph) -> Result<String, Failure> {
    g.to_text().map_err(|e| Failure::Internal(e.to_string()))
}

fn params_json(g: &Graph, p: &ParamSet) -> serde_json::Value {
    json!({
        "n": g.vertex_count(),
        "m": g.edge_count(),
        "beta": p.beta,
        "lambda": p.lambda,
        "alpha": p.alpha,
        "L": p.big_l,
        "equal": p.is_equal(),
    })
}

fn analyze(a: AnalyzeArgs) -> Outcome {
    let g = read_graph(&a.input)?;
    let p = if a.oracle {
        Oracle::default().params(&g).map_err(|e| Failure::Input(e.to_string()))?
    } else {
        if !g.is_forest() {
            return Err(Failure::Input("graph is not a forest; use --oracle".into()));
        }
        treedp::params_tree(&g).map_err(|e| Failure::Internal(e.to_string()))?
    };
    if a.json {
        println!("{}", params_json(&g, &p));
    } else {
        println!("n={} m={} {} equal={}", g.vertex_count(), g.edge_count(), p, p.is_equal());
    }
    Ok(())
}

fn check(a: CheckArgs) -> Outcome {
    let g = read_tree(&a.input)?;
    let c = check_tree(&g, &Oracle::default()).map_err(|e| Failure::Input(e.to_string()))?;
    let mut problems = c.problems;
    for (_, t) in c.lemmas.rows() {
        problems.extend(t.violations.iter().cloned());
    }
    if a.json {
        println!("{}", json!({ "equal": c.equal, "strict": c.strict_ok, "problems": problems }));
    } else {
        for p in &problems {
            println!("{p}");
        }
        println!("{} equal={} strict={}", if problems.is_empty() { "OK" } else { "MISMATCH" }, c.equal, c.strict_ok);
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Failure::Internal(format!("{} problems", problems.len())))
    }
}

fn run_decompose(a: DecomposeArgs) -> Outcome {
    let g = read_tree(&a.input)?;
    let (status, payload) = match decompose(&g) {
        Ok(Decomposition::Certificate(c)) => {
            for w in &c.warnings {
                eprintln!("warning: {w}");
            }
            ("EQUAL", format!("{}\n", c.cert))
        }
        Ok(Decomposition::Witness(w)) => {
            ("NOT_EQUAL", format!("{}\n", serde_json::to_string_pretty(&w).expect("witness serializes")))
        }
        Err(DecomposeError::NotATree) => return Err(Failure::Input("graph is not a tree".into())),
        Err(DecomposeError::Internal { message, trace }) => {
            return Err(Failure::Internal(format!("{message}\ntrace:\n  {}", trace.join("\n  "))))
        }
    };
    match a.out {
        Some(path) => {
            write_text(&path, &payload)?;
            println!("{status}");
        }
        None => {
            print!("{payload}");
            eprintln!("{status}");
        }
    }
    Ok(())
}

fn replay(a: ReplayArgs) -> Outcome {
    let cert = read_cert(&a.cert)?;
    let g = ops::replay(&cert, a.mode).map_err(|e| Failure::Check(e.to_string()))?;
    let text = g.to_text().map_err(|e| Failure::Input(format!("cannot serialize the result: {e}")))?;
    match a.out {
        Some(path) => write_text(&path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_verify(a: VerifyArgs) -> Outcome {
    let g = read_graph(&a.tree)?;
    let cert = read_cert(&a.cert)?;
    let report = verify(&g, &cert, a.mode);
    if a.json {
        let steps: Vec<_> = report
            .steps
            .iter()
            .map(|s| json!({ "path": s.path, "op": s.op, "strict": s.strict_ok, "sound": s.sound_ok, "reason": s.reason }))
            .collect();
        println!(
            "{}",
            json!({
                "passed": report.passed(),
                "mode": a.mode.to_string(),
                "graphMatches": report.graph_matches,
                "equalityHolds": report.equality_holds,
                "replayError": report.replay_error,
                "steps": steps,
            })
        );
    } else {
        println!("{report}");
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Check("verification failed".into()))
    }
}

fn generate(a: GenerateArgs) -> Outcome {
    let cert = random_certificate(a.steps, a.seed, a.ops).map_err(|e| Failure::Input(e.to_string()))?;
    let g = ops::replay(&cert, Mode::Strict).map_err(|e| Failure::Internal(e.to_string()))?;
    let p = treedp::params_tree(&g).map_err(|e| Failure::Internal(e.to_string()))?;
    if !p.is_equal() {
        return Err(Failure::Internal(format!("generated tree has {p}")));
    }
    let (graph, cert_text) = (graph_text(&g)?, format!("{cert}\n"));
    match a.out {
        Some(prefix) => {
            let with_ext = |ext: &str| {
                let mut s = prefix.clone().into_os_string();
                s.push(ext);
                PathBuf::from(s)
            };
            write_text(&with_ext(".graph"), &graph)?;
            write_text(&with_ext(".cert"), &cert_text)?;
        }
        None => {
            print!("{cert_text}{graph}");
        }
    }
    Ok(())
}

fn guard(max_n: usize, force: bool) -> Outcome {
    if max_n > SWEEP_GUARD && !force {
        return Err(Failure::Input(format!("--max-n {max_n} exceeds {SWEEP_GUARD}; pass --force to run anyway")));
    }
    Ok(())
}

fn run_sweep(a: SweepArgs) -> Outcome {
    guard(a.max_n, a.force)?;
    let report = sweep(a.max_n, !a.serial).map_err(|e| Failure::Input(e.to_string()))?;
    print!("{}", report.render());
    if let Some(g) = report.counterexample() {
        write_text(&a.dump, &graph_text(g)?)?;
        return Err(Failure::Check(format!("counterexample written to {}", a.dump.display())));
    }
    if report.lemmas.violation_count() > 0 {
        return Err(Failure::Check("lemma violations".into()));
    }
    Ok(())
}

fn lemmas(a: LemmasArgs) -> Outcome {
    guard(a.max_n, a.force)?;
    let report = lemma_sweep(a.max_n).map_err(|e| Failure::Input(e.to_string()))?;
    print!("{report}");
    for (_, t) in report.rows() {
        for v in t.violations.iter().take(3) {
            println!("  {v}");
        }
    }
    if report.violation_count() > 0 {
        Err(Failure::Check("lemma violations".into()))
    } else {
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Check(a) => check(a),
        Command::Decompose(a) => run_decompose(a),
        Command::Replay(a) => replay(a),
        Command::Verify(a) => run_verify(a),
        Command::Generate(a) => generate(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Lemmas(a) => lemmas(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
