//! `potlll`: generate, reduce, verify and benchmark lattice bases.
//!
//! Exit status is 0 on success, 1 when a basis fails verification or a
//! reduction or benchmark cell fails, and 2 on usage or input errors.

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use potlll_core::harness::{write_csv, write_json_lines};
use potlll_core::{
    generate_random_hnf, is_bkz_reduced, is_deep_reduced, is_lll_reduced, is_pot_reduced, read_basis, run_bench,
    write_basis, Algo, BenchPlan, GenSpec, LatticeError, Reducedness,
};

#[derive(Parser)]
#[command(name = "potlll", version, about = "Lattice basis reduction with deep insertions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random lattice basis in Hermite normal form.
    Gen {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        seed: u64,
        /// Bit size of the modulus (default 10 * dim).
        #[arg(long)]
        bits: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reduce a basis.
    Reduce {
        #[arg(long, value_enum)]
        algo: AlgoName,
        #[arg(long, default_value_t = 0.99)]
        delta: f64,
        /// Blocksize, required for deeplll and bkz.
        #[arg(long)]
        beta: Option<usize>,
        /// Skip the LLL pass that normally precedes the main loop.
        #[arg(long)]
        no_preprocess: bool,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Write the run's counters here as JSON.
        #[arg(long)]
        stats_json: Option<PathBuf>,
    },
    /// Check that a basis is reduced.
    Verify {
        #[arg(long, value_enum)]
        notion: Notion,
        #[arg(long, default_value_t = 0.99)]
        delta: f64,
        /// Blocksize, required for deep and bkz.
        #[arg(long)]
        beta: Option<usize>,
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Reduce a grid of random lattices and record quality and timings.
    Bench {
        /// Dimensions as `A:B:STEP` (inclusive) or a single dimension.
        #[arg(long, value_parser = parse_dims)]
        dims: Dims,
        /// Number of seeds per dimension, starting at 0.
        #[arg(long)]
        seeds: u64,
        /// Comma-separated, e.g. `lll,potlll,potlll2,deeplll:5,bkz:10`.
        #[arg(long, value_delimiter = ',', required = true)]
        algos: Vec<Algo>,
        #[arg(long, default_value_t = 0.99)]
        delta: f64,
        #[arg(long)]
        no_preprocess: bool,
        #[arg(long)]
        csv: PathBuf,
        /// Also write one JSON record per line, with full counters.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoName {
    Lll,
    Potlll,
    Potlll2,
    Deeplll,
    Bkz,
}

#[derive(Clone, Copy, ValueEnum)]
enum Notion {
    Lll,
    Deep,
    Pot,
    Bkz,
}

enum Failure {
    /// Bad arguments or unreadable input.
    Usage(String),
    /// Verification rejected the basis or a computation failed.
    Failed(String),
}

impl From<LatticeError> for Failure {
    fn from(e: LatticeError) -> Self {
        match e {
            LatticeError::Parse { .. }
            | LatticeError::OverlongToken { .. }
            | LatticeError::InvalidShape(_)
            | LatticeError::InvalidParams(_)
            | LatticeError::Io(_) => Failure::Usage(e.to_string()),
            _ => Failure::Failed(e.to_string()),
        }
    }
}

#[derive(Clone)]
struct Dims(Vec<usize>);

fn parse_dims(s: &str) -> Result<Dims, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |p: &str| p.trim().parse::<usize>().map_err(|_| format!("bad number `{p}` in `{s}`"));
    match parts.as_slice() {
        [d] => Ok(Dims(vec![num(d)?])),
        [a, b, step] => {
            let (a, b, step) = (num(a)?, num(b)?, num(step)?);
            if step == 0 || a > b {
                return Err(format!("empty range `{s}`"));
            }
            Ok(Dims((a..=b).step_by(step).collect()))
        }
        _ => Err(format!("expected A:B:STEP, got `{s}`")),
    }
}

fn blocksize(beta: Option<usize>, what: &str) -> Result<usize, Failure> {
    beta.ok_or_else(|| Failure::Usage(format!("{what} needs --beta")))
}

fn create(path: &PathBuf) -> Result<BufWriter<File>, Failure> {
    File::create(path).map(BufWriter::new).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn report(verdict: Reducedness) -> Result<(), Failure> {
    match verdict {
        Reducedness::Reduced => {
            println!("reduced");
            Ok(())
        }
        Reducedness::Violated(v) => Err(Failure::Failed(format!("not reduced: {v}"))),
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Gen { dim, seed, bits, out } => {
            let mut spec = GenSpec::new(dim, seed);
            if let Some(bits) = bits {
                spec = spec.with_bits(bits);
            }
            write_basis(&out, &generate_random_hnf(&spec)?)?;
        }
        Command::Reduce { algo, delta, beta, no_preprocess, input, out, stats_json } => {
            let algo = match algo {
                AlgoName::Lll => Algo::Lll,
                AlgoName::Potlll => Algo::PotLll,
                AlgoName::Potlll2 => Algo::PotLll2,
                AlgoName::Deeplll => Algo::DeepLll { beta: blocksize(beta, "deeplll")? },
                AlgoName::Bkz => Algo::Bkz { beta: blocksize(beta, "bkz")? },
            };
            let params = algo.params(delta, !no_preprocess, Default::default());
            params.validate()?;
            let mut basis = read_basis(&input)?;
            let stats = algo.reduce(&mut basis, &params)?;
            write_basis(&out, &basis)?;
            log::info!("{algo}: {} iterations, {} insertions", stats.loop_iterations, stats.insertions);
            if let Some(path) = stats_json {
                serde_json::to_writer_pretty(create(&path)?, &stats).map_err(|e| Failure::Usage(e.to_string()))?;
            }
        }
        Command::Verify { notion, delta, beta, input } => {
            if !(delta > 0.25 && delta <= 1.0) {
                return Err(Failure::Usage(format!("delta {delta} outside (1/4, 1]")));
            }
            let basis = read_basis(&input)?;
            let verdict = match notion {
                Notion::Lll => is_lll_reduced(&basis, delta)?,
                Notion::Pot => is_pot_reduced(&basis, delta)?,
                Notion::Deep => is_deep_reduced(&basis, delta, blocksize(beta, "deep")?)?,
                Notion::Bkz => is_bkz_reduced(&basis, delta, blocksize(beta, "bkz")?)?,
            };
            report(verdict)?;
        }
        Command::Bench { dims, seeds, algos, delta, no_preprocess, csv, json } => {
            let plan = BenchPlan::new(dims.0, (0..seeds).collect(), algos)
                .with_delta(delta)
                .with_preprocess(vec![!no_preprocess]);
            plan.validate()?;
            let bench = run_bench(&plan, |r| {
                eprintln!(
                    "{} n={} seed={} hermite_root={:.6} {:.3}s",
                    r.algo, r.dim, r.seed, r.hermite_root, r.elapsed_s
                )
            })?;
            write_csv(create(&csv)?, &bench.records)?;
            if let Some(path) = json {
                write_json_lines(create(&path)?, &bench.records)?;
            }
            for row in bench.aggregate() {
                println!(
                    "{:<11} n={:<4} mean={:.5} ci=[{:.5}, {:.5}] mean_s={:.4}",
                    row.algo.to_string(),
                    row.dim,
                    row.mean_hermite_root,
                    row.ci_low,
                    row.ci_high,
                    row.mean_elapsed_s
                );
            }
            if !bench.failures.is_empty() {
                for f in &bench.failures {
                    eprintln!("failed: {f}");
                }
                return Err(Failure::Failed(format!("{} benchmark cells failed", bench.failures.len())));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Failed(m)) => {
            eprintln!("{m}");
            ExitCode::from(1)
        }
    }
}
