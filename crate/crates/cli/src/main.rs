use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use homcount::corpus::{canonical_corpus, graph_suite};
use homcount::cyclotomic::{approx_complex, CycNum};
use homcount::dichotomy::{decide, validate_certificate, Certificate, Verdict};
use homcount::fasteval::EvalPlan;
use homcount::formats::{parse_graph, parse_matrix, parse_poly};
use homcount::gausssum::eval_gauss_sum;
use homcount::model::{MultiGraph, PureMatrix};
use homcount::oracle::{brute_eval_a, OracleError, SizeGuard, DEFAULT_BUDGET};

#[derive(Parser)]
#[command(name = "homcount", version, about = "Exact graph homomorphism partition functions")]
struct Cli {
    /// Worker threads for the brute-force oracle (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Maximum number of assignments the brute-force oracle may enumerate.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    size_guard: u64,
    /// Digits after the decimal point in approximations.
    #[arg(long, global = true, default_value_t = 12)]
    digits: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a matrix as tractable or #P-hard.
    Decide {
        matrix: PathBuf,
        /// Write the tractability certificate (JSON) here.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Compute Z_A(G).
    Eval {
        matrix: PathBuf,
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Auto)]
        mode: Mode,
        /// Use this certificate instead of running the decider.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Evaluate a quadratic exponential sum over Z_q.
    Gauss { poly: PathBuf },
    /// Compute Z_A(G) by enumeration.
    Brute { matrix: PathBuf, graph: PathBuf },
    /// Replay a certificate against a matrix.
    Validate { matrix: PathBuf, certificate: PathBuf },
    /// Run the built-in matrix corpus and print a verdict table.
    Corpus,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Auto,
    Fast,
    Brute,
}

enum Failure {
    Usage(String),
    SizeGuard(String),
    Check(String),
}

impl Failure {
    fn report(self) -> ExitCode {
        let (msg, code) = match self {
            Failure::Usage(m) => (m, 2),
            Failure::SizeGuard(m) => (m, 3),
            Failure::Check(m) => (m, 1),
        };
        eprintln!("error: {msg}");
        ExitCode::from(code)
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_matrix(path: &Path) -> Result<PureMatrix, Failure> {
    parse_matrix(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<MultiGraph, Failure> {
    parse_graph(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_certificate(path: &Path) -> Result<Certificate, Failure> {
    Certificate::from_json(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn brute(a: &PureMatrix, g: &MultiGraph, guard: &SizeGuard) -> Result<CycNum, Failure> {
    brute_eval_a(a, g, guard).map_err(|e| match e {
        OracleError::SizeGuard { .. } => Failure::SizeGuard(e.to_string()),
        other => Failure::Usage(other.to_string()),
    })
}

fn print_value(z: &CycNum, digits: usize) {
    let (re, im) = approx_complex(z, digits);
    let (sign, im) = match im.strip_prefix('-') {
        Some(abs) => ('-', abs.to_string()),
        None => ('+', im),
    };
    println!("{z}");
    println!("~ {re} {sign} {im}i");
}

fn run(cli: Cli) -> Result<(), Failure> {
    let guard = SizeGuard::new(cli.size_guard);
    match cli.command {
        Command::Decide { matrix, certificate } => {
            let a = load_matrix(&matrix)?;
            match decide(&a) {
                Verdict::Tractable(cert) => {
                    println!("TRACTABLE");
                    if let Some(out) = certificate {
                        fs::write(&out, cert.to_json())
                            .map_err(|e| Failure::Usage(format!("{}: {e}", out.display())))?;
                    }
                }
                Verdict::PHard(w) => println!("P-HARD {}", w.label()),
            }
        }
        Command::Eval {
            matrix,
            graph,
            mode,
            certificate,
        } => {
            let a = load_matrix(&matrix)?;
            let g = load_graph(&graph)?;
            let plan = match (&certificate, mode) {
                (_, Mode::Brute) => None,
                (Some(path), _) => {
                    let cert = load_certificate(path)?;
                    Some(EvalPlan::new(&a, &cert).map_err(|e| Failure::Usage(e.to_string()))?)
                }
                (None, Mode::Fast) => {
                    Some(EvalPlan::from_matrix(&a).map_err(|e| Failure::Usage(e.to_string()))?)
                }
                (None, Mode::Auto) => EvalPlan::from_matrix(&a).ok(),
            };
            let z = match plan {
                Some(p) => p.eval(&g),
                None => brute(&a, &g, &guard)?,
            };
            print_value(&z, cli.digits);
        }
        Command::Gauss { poly } => {
            let f = parse_poly(&read(&poly)?)
                .map_err(|e| Failure::Usage(format!("{}: {e}", poly.display())))?;
            print_value(&eval_gauss_sum(&f), cli.digits);
        }
        Command::Brute { matrix, graph } => {
            let a = load_matrix(&matrix)?;
            let g = load_graph(&graph)?;
            print_value(&brute(&a, &g, &guard)?, cli.digits);
        }
        Command::Validate {
            matrix,
            certificate,
        } => {
            let a = load_matrix(&matrix)?;
            let cert = load_certificate(&certificate)?;
            match validate_certificate(&a, &cert) {
                Ok(()) => println!("VALID"),
                Err(e) => println!("INVALID {e}"),
            }
        }
        Command::Corpus => corpus(&guard)?,
    }
    Ok(())
}

fn corpus(guard: &SizeGuard) -> Result<(), Failure> {
    let graphs = graph_suite(20, 5, 8, 7);
    let mut mismatches = 0;
    println!("{:<20} {:<28} {:<28} fast=brute", "matrix", "verdict", "expected");
    for entry in canonical_corpus() {
        let (verdict, agree) = match decide(&entry.matrix) {
            Verdict::PHard(w) => (format!("P-HARD {}", w.label()), "-".to_string()),
            Verdict::Tractable(cert) => {
                let plan = EvalPlan::new(&entry.matrix, &cert).map_err(|e| Failure::Check(e.to_string()))?;
                let mut ok = 0;
                let mut run = 0;
                for g in &graphs {
                    match brute_eval_a(&entry.matrix, g, guard) {
                        Ok(z) => {
                            run += 1;
                            if z == plan.eval(g) {
                                ok += 1;
                            }
                        }
                        Err(OracleError::SizeGuard { .. }) => {}
                        Err(e) => return Err(Failure::Check(e.to_string())),
                    }
                }
                if ok != run {
                    mismatches += 1;
                }
                ("TRACTABLE".to_string(), format!("{ok}/{run}"))
            }
        };
        let expected = entry
            .expected
            .map_or("TRACTABLE".to_string(), |l| format!("P-HARD {l}"));
        if verdict != expected {
            mismatches += 1;
        }
        println!("{:<20} {:<28} {:<28} {agree}", entry.name, verdict, expected);
    }
    if mismatches > 0 {
        return Err(Failure::Check(format!("{mismatches} corpus mismatches")));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            return Failure::Usage(e.to_string()).report();
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.report(),
    }
}
