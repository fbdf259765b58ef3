//! `susywalk`: index, spectra and eigenspace census of chiral pairs.
//!
//! Exit codes: 0 on success, 1 on input or validation errors, 2 when an
//! internal consistency check fails.

mod files;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use susywalk::checks::run_selftest;
use susywalk::models::{self, FourDimVariant, SplitStepParams};
use susywalk::random::random_angles;
use susywalk::{verify_spectral_mapping, ChiralPair, IndexReport, SpectralError, Tolerance, C64};

#[derive(Debug, Parser)]
#[command(
    name = "susywalk",
    version,
    about = "Index and spectral analysis of chiral-symmetric quantum walks"
)]
struct Cli {
    /// Residual bound for unitarity, involution and commutation checks.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol_structural: f64,
    /// Relative singular-value cutoff for kernels.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol_rank: f64,
    /// Eigenvalue clustering width.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol_cluster: f64,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Write `U.json` and `gamma.json` matrix files into this directory.
    #[arg(long, global = true)]
    dump_matrices: Option<PathBuf>,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Analyse a pair given as two matrix files.
    Index { u: PathBuf, gamma: PathBuf },
    /// Build and analyse a standard model.
    Model {
        #[command(subcommand)]
        model: Model,
    },
    /// Success probability of Grover's search, one line per step.
    Evolve {
        #[arg(long)]
        qubits: u32,
        #[arg(long)]
        target: u64,
        #[arg(long)]
        steps: usize,
        /// Vertex to read the probability at; defaults to the target.
        #[arg(long)]
        measure: Option<u64>,
    },
    /// Run every invariant on random pairs.
    Selftest {
        #[arg(long, default_value_t = 8)]
        dim_max: usize,
        #[arg(long, default_value_t = 10)]
        trials: usize,
    },
}

#[derive(Debug, Subcommand)]
enum Model {
    GroverSearch {
        #[arg(long)]
        qubits: u32,
        #[arg(long)]
        target: u64,
    },
    GroverWalk {
        #[arg(long)]
        graph: PathBuf,
    },
    SplitStep {
        #[arg(long)]
        sites: usize,
        #[arg(long = "p", allow_hyphen_values = true)]
        p: f64,
        #[arg(long, allow_hyphen_values = true)]
        q_re: f64,
        #[arg(long, allow_hyphen_values = true)]
        q_im: f64,
        /// Comma-separated angles, or `random:<seed>`.
        #[arg(long, allow_hyphen_values = true)]
        angles: String,
    },
    Toy2 {
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
    },
    Toy4 {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=5))]
        variant: u8,
    },
}

enum Failure {
    Input(String),
    Inconsistent(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Self::Input(_) => 1,
            Self::Inconsistent(_) => 2,
        }
    }
}

fn input<E: ToString>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

#[derive(Serialize)]
struct ReportDocument<'a> {
    tool: &'static str,
    version: &'static str,
    input: serde_json::Value,
    tolerance: Tolerance,
    #[serde(flatten)]
    report: &'a IndexReport,
}

struct Context {
    tol: Tolerance,
    output: Option<PathBuf>,
    dump: Option<PathBuf>,
    seed: u64,
}

impl Context {
    fn emit(&self, text: &str) -> Result<(), Failure> {
        match &self.output {
            Some(path) => {
                fs::write(path, text).map_err(|e| input(format!("{}: {e}", path.display())))
            }
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes()).map_err(input)
            }
        }
    }

    /// Verifies the pair and prints its report, also when a check fails.
    fn analyse(&self, pair: &ChiralPair, description: serde_json::Value) -> Result<(), Failure> {
        let (report, failure) = match verify_spectral_mapping(pair) {
            Ok(report) => (report, None),
            Err(SpectralError::InconsistencyDetected {
                identity,
                residual,
                report,
            }) => (
                *report,
                Some(Failure::Inconsistent(format!(
                    "inconsistency in `{identity}` (residual {residual:.3e})"
                ))),
            ),
            Err(e) => return Err(input(e)),
        };
        let doc = ReportDocument {
            tool: "susywalk",
            version: env!("CARGO_PKG_VERSION"),
            input: description,
            tolerance: self.tol,
            report: &report,
        };
        let text = serde_json::to_string_pretty(&doc).expect("report serializes") + "\n";
        self.emit(&text)?;
        failure.map_or(Ok(()), Err)
    }

    fn dump(&self, pair: &ChiralPair) -> Result<(), Failure> {
        let Some(dir) = &self.dump else {
            return Ok(());
        };
        fs::create_dir_all(dir).map_err(|e| input(format!("{}: {e}", dir.display())))?;
        files::write_matrix(&dir.join("U.json"), pair.evolution()).map_err(input)?;
        files::write_matrix(&dir.join("gamma.json"), pair.gamma()).map_err(input)
    }
}

fn parse_angles(spec: &str, sites: usize) -> Result<Vec<f64>, Failure> {
    if let Some(seed) = spec.strip_prefix("random:") {
        let seed: u64 = seed
            .parse()
            .map_err(|e| input(format!("--angles: bad seed `{seed}`: {e}")))?;
        return Ok(random_angles(sites, &mut ChaCha8Rng::seed_from_u64(seed)));
    }
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| input(format!("--angles: bad angle `{s}`: {e}")))
        })
        .collect()
}

fn run_model(ctx: &Context, model: &Model) -> Result<(), Failure> {
    let tol = ctx.tol;
    let (pair, description) = match model {
        Model::GroverSearch { qubits, target } => (
            models::grover_search(*qubits, *target, tol).map_err(input)?,
            json!({"model": "grover-search", "qubits": qubits, "target": target}),
        ),
        Model::GroverWalk { graph } => {
            let g = files::read_graph(graph).map_err(input)?;
            (
                models::grover_walk(&g, tol).map_err(input)?,
                json!({
                    "model": "grover-walk",
                    "vertices": g.vertex_count(),
                    "edges": g.edges(),
                }),
            )
        }
        Model::SplitStep {
            sites,
            p,
            q_re,
            q_im,
            angles,
        } => {
            let thetas = parse_angles(angles, *sites)?;
            let params = SplitStepParams::new(*sites, *p, C64::new(*q_re, *q_im), thetas, &tol)
                .map_err(input)?;
            (
                models::split_step_cycle(&params, tol).map_err(input)?,
                json!({
                    "model": "split-step",
                    "sites": sites,
                    "p": p,
                    "q": [q_re, q_im],
                    "angles": params.coin_angles(),
                }),
            )
        }
        Model::Toy2 { beta, gamma } => (
            models::toy_two_dim(*beta, *gamma, tol).map_err(input)?,
            json!({"model": "toy2", "beta": beta, "gamma": gamma}),
        ),
        Model::Toy4 { variant } => {
            let v = FourDimVariant::from_row(*variant).expect("range checked by the parser");
            (
                models::toy_four_dim(v, tol).map_err(input)?,
                json!({"model": "toy4", "variant": variant}),
            )
        }
    };
    ctx.dump(&pair)?;
    ctx.analyse(&pair, description)
}

fn run_index(ctx: &Context, u: &Path, gamma: &Path) -> Result<(), Failure> {
    let evolution = files::read_matrix(u).map_err(input)?;
    let involution = files::read_matrix(gamma).map_err(input)?;
    let pair = ChiralPair::new(evolution, involution, ctx.tol).map_err(input)?;
    ctx.dump(&pair)?;
    let description = json!({
        "model": "index",
        "u": u.display().to_string(),
        "gamma": gamma.display().to_string(),
    });
    ctx.analyse(&pair, description)
}

fn run_evolve(
    ctx: &Context,
    qubits: u32,
    target: u64,
    steps: usize,
    measure: Option<u64>,
) -> Result<(), Failure> {
    let rows = models::search_evolution_at(qubits, target, measure.unwrap_or(target), steps)
        .map_err(input)?;
    let mut text = String::new();
    for (t, (p, total)) in rows.iter().enumerate() {
        text += &format!("{t},{p},{total}\n");
    }
    ctx.emit(&text)
}

fn run_selftest_command(ctx: &Context, dim_max: usize, trials: usize) -> Result<(), Failure> {
    if dim_max < 2 {
        return Err(input("--dim-max must be at least 2"));
    }
    if trials < 1 {
        return Err(input("--trials must be at least 1"));
    }
    let summary = run_selftest(dim_max, trials, ctx.seed, ctx.tol);
    let width = summary.counts.iter().map(|c| c.0.len()).max().unwrap_or(0);
    let mut text = format!(
        "selftest: {} pairs, dimensions 2..={dim_max}, {trials} per dimension, seed {}\n",
        summary.pairs, ctx.seed
    );
    for (name, passed, run) in &summary.counts {
        text += &format!("{name:<width$}  {passed}/{run}\n");
    }
    for f in &summary.failures {
        text += &format!("FAILED {f}\n");
    }
    let verdict = if summary.all_passed() { "PASS" } else { "FAIL" };
    text += &format!("result: {verdict}\n");
    ctx.emit(&text)?;
    if summary.all_passed() {
        Ok(())
    } else {
        Err(Failure::Inconsistent(format!(
            "{} invariant failures",
            summary.failures.len()
        )))
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let tol = Tolerance::new(cli.tol_structural, cli.tol_rank, cli.tol_cluster).map_err(input)?;
    let ctx = Context {
        tol,
        output: cli.output,
        dump: cli.dump_matrices,
        seed: cli.seed,
    };
    match &cli.command {
        Command::Index { u, gamma } => run_index(&ctx, u, gamma),
        Command::Model { model } => run_model(&ctx, model),
        Command::Evolve {
            qubits,
            target,
            steps,
            measure,
        } => run_evolve(&ctx, *qubits, *target, *steps, *measure),
        Command::Selftest { dim_max, trials } => run_selftest_command(&ctx, *dim_max, *trials),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Input(msg) | Failure::Inconsistent(msg)) = &f;
            eprintln!("error: {msg}");
            ExitCode::from(f.code())
        }
    }
}
