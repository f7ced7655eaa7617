use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use critgraph_core::certificate::{check_certificate, Certificate, VerifyOptions, DEFAULT_SPARSITY_BUDGET};
use critgraph_core::construct::{run_construct, ConstructConfig, Stage};
use critgraph_core::export::to_dot;
use critgraph_core::lemmas::{run_suite, LemmaError, Suite, SuiteConfig};
use critgraph_core::sampler::{pm_threshold_sweep, sweep_to_csv, SampleError};
use critgraph_core::{Hypergraph, Seed};

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_FAILED: u8 = 2;
const EXIT_CAP: u8 = 3;

#[derive(Parser)]
#[command(name = "critgraph", version, about = "Build and check edge-robust vertex-critical graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for a robust construction and write its certificate.
    Construct(ConstructArgs),
    /// Re-check a certificate file.
    Verify { path: PathBuf },
    /// Run one of the exhaustive or randomized lemma suites.
    LemmaCheck(LemmaArgs),
    /// Estimate perfect-matching probabilities over a grid of (n, p).
    Sweep(SweepArgs),
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long)]
    r: usize,
    #[arg(long)]
    k: usize,
    /// Edge-probability constant; defaults to 2 (s-1)!.
    #[arg(long = "C")]
    c: Option<f64>,
    /// Defaults to a random value, which is printed and recorded.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 10_000)]
    restarts: u64,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Certificate path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the graph in DOT format.
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Verify this hypergraph (JSON `{"n":..,"edges":[..]}`) instead of sampling.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Seconds allowed per perfect-matching search.
    #[arg(long, default_value_t = 10.0)]
    match_budget: f64,
    /// Node budget of the sparsity search.
    #[arg(long, default_value_t = DEFAULT_SPARSITY_BUDGET)]
    sparsity_budget: u64,
    /// Comma-separated screening order over sanity, sparsity, matchability, subsets.
    #[arg(long, value_delimiter = ',')]
    order: Option<Vec<String>>,
}

#[derive(Args)]
struct LemmaArgs {
    #[arg(long)]
    suite: String,
    #[arg(long)]
    max_n: Option<usize>,
    #[arg(long)]
    max_edges: Option<usize>,
    /// Instances for the randomized suites.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Enumeration cap for the exhaustive suites.
    #[arg(long)]
    cap: Option<u128>,
    /// Write the full report as JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    s: usize,
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    p: Vec<f64>,
    #[arg(long)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 10.0)]
    match_budget: f64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let code = match cli.command {
        Command::Construct(args) => construct(args),
        Command::Verify { path } => verify(&path),
        Command::LemmaCheck(args) => lemma_check(args),
        Command::Sweep(args) => sweep(args),
    };
    ExitCode::from(code)
}

fn usage(msg: impl std::fmt::Display) -> u8 {
    eprintln!("error: {msg}");
    EXIT_USAGE
}

fn budget(secs: f64) -> Option<Duration> {
    (secs.is_finite() && secs > 0.0).then(|| Duration::from_secs_f64(secs))
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), String> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn construct(args: ConstructArgs) -> u8 {
    let Some(match_budget) = budget(args.match_budget) else {
        return usage("--match-budget must be positive");
    };
    if args.sparsity_budget == 0 {
        return usage("--sparsity-budget must be positive");
    }
    let order = match &args.order {
        None => Stage::DEFAULT_ORDER.to_vec(),
        Some(names) => match names.iter().map(|n| Stage::from_name(n).ok_or(n)).collect() {
            Ok(order) => order,
            Err(bad) => return usage(format!("unknown stage {bad:?}")),
        },
    };
    let instance = match &args.instance {
        None => None,
        Some(path) => match fs::read_to_string(path)
            .map_err(|e| e.to_string())
            .and_then(|s| serde_json::from_str::<Hypergraph>(&s).map_err(|e| e.to_string()))
        {
            Ok(h) => Some(h),
            Err(e) => return usage(format!("cannot read instance {}: {e}", path.display())),
        },
    };
    let seed = args.seed.unwrap_or_else(rand::random);
    eprintln!("seed: {seed}");
    let cfg = ConstructConfig {
        c: args.c,
        restarts: args.restarts,
        order,
        verify: VerifyOptions { match_budget, sparsity_budget: args.sparsity_budget },
        instance,
        ..ConstructConfig::new(args.r, args.k, Seed(seed))
    };

    let pool = match rayon::ThreadPoolBuilder::new().num_threads(args.workers).build() {
        Ok(pool) => pool,
        Err(e) => return usage(e),
    };
    let report = match pool.install(|| run_construct(&cfg)) {
        Ok(r) => r,
        Err(e) => return usage(e),
    };

    let json = serde_json::to_string_pretty(&report.certificate).expect("certificates serialize") + "\n";
    if let Err(e) = write_output(args.out.as_deref(), &json) {
        return usage(e);
    }
    if let Some(path) = &args.dot {
        if let Err(e) = write_output(Some(path), &to_dot(&report.certificate.graph)) {
            return usage(e);
        }
    }
    let c = &report.certificate.conclusions;
    eprintln!(
        "attempts: {}, stages passed by reported instance: {}, chi: {}, vertex-critical: {}, robust: {}{}",
        report.attempts,
        report.stages_passed,
        c.chi.map_or("unknown".to_string(), |k| k.to_string()),
        c.vertex_critical,
        c.robust_to_r,
        if c.inconclusive { " (a search budget ran out)" } else { "" },
    );
    if let Some(note) = &report.note {
        eprintln!("note: {note}");
    }
    if report.success {
        EXIT_OK
    } else {
        eprintln!("no robust instance found; the certificate records the best attempt");
        EXIT_FAILED
    }
}

fn verify(path: &Path) -> u8 {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return usage(format!("cannot read {}: {e}", path.display())),
    };
    let cert: Certificate = match serde_json::from_str(&text) {
        Ok(c) => c,
        Err(e) => return usage(format!("cannot parse certificate: {e}")),
    };
    let report = check_certificate(&cert);
    if report.ok {
        let c = &cert.conclusions;
        println!(
            "certificate valid: chi {}, vertex-critical {}, robust to {} deletions {}",
            c.chi.map_or("unknown".to_string(), |k| k.to_string()),
            c.vertex_critical,
            cert.params.r,
            c.robust_to_r
        );
        EXIT_OK
    } else {
        println!("certificate invalid:");
        for reason in &report.reasons {
            println!("  {reason}");
        }
        EXIT_FAILED
    }
}

fn lemma_check(args: LemmaArgs) -> u8 {
    let Some(suite) = Suite::from_name(&args.suite) else {
        let names: Vec<_> = Suite::ALL.iter().map(|s| s.name()).collect();
        return usage(format!("unknown suite {:?}; expected one of {}", args.suite, names.join(", ")));
    };
    let defaults = SuiteConfig::defaults(suite);
    let cfg = SuiteConfig {
        max_n: args.max_n.unwrap_or(defaults.max_n),
        max_edges: args.max_edges.unwrap_or(defaults.max_edges),
        samples: args.samples.unwrap_or(defaults.samples),
        seed: Seed(args.seed),
        cap: args.cap.unwrap_or(defaults.cap),
    };
    let report = match run_suite(suite, &cfg) {
        Ok(r) => r,
        Err(e @ LemmaError::CapExceeded { .. }) => {
            eprintln!("error: {e}");
            return EXIT_CAP;
        }
        Err(e) => return usage(e),
    };
    println!("suite            checked  skipped  counterexamples  result");
    println!(
        "{:<16} {:>7}  {:>7}  {:>15}  {}",
        report.suite,
        report.checked,
        report.skipped,
        report.counterexamples.len(),
        if report.passed() { "pass" } else { "FAIL" }
    );
    let json = serde_json::to_string_pretty(&report).expect("reports serialize") + "\n";
    if let Some(path) = &args.out {
        if let Err(e) = write_output(Some(path), &json) {
            return usage(e);
        }
    } else if !report.passed() {
        print!("{}", serde_json::to_string_pretty(&report.counterexamples).expect("serializable") + "\n");
    }
    if report.passed() {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}

fn sweep(args: SweepArgs) -> u8 {
    let Some(match_budget) = budget(args.match_budget) else {
        return usage("--match-budget must be positive");
    };
    match pm_threshold_sweep(args.s, &args.n, &args.p, args.samples, Seed(args.seed), match_budget) {
        Ok(points) => match write_output(args.out.as_deref(), &sweep_to_csv(&points)) {
            Ok(()) => EXIT_OK,
            Err(e) => usage(e),
        },
        Err(e @ SampleError::Inconclusive { .. }) => {
            eprintln!("error: {e}");
            EXIT_FAILED
        }
        Err(e) => usage(e),
    }
}
