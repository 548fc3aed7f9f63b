use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use manitrans::{
    run_isometry, run_timing, run_verify, write_csv, BenchConfig, BenchError, Manifold,
};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "manitrans",
    version,
    about = "Parallel transport benchmarks and checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Median transport wall time per (n, t) cell.
    Bench(Opts),
    /// Gram-matrix drift of transported tangent sets.
    Isometry(Opts),
    /// Closed forms against the ODE oracle (n <= 64).
    Verify(Opts),
}

#[derive(Args)]
struct Opts {
    #[arg(long, value_enum)]
    manifold: Manifold,
    /// Ambient size; a comma-separated list runs one grid per value.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    d: usize,
    /// Flag block sizes `d₁,…,d_p`; their sum replaces `--d`.
    #[arg(long, value_delimiter = ',')]
    d_list: Option<Vec<usize>>,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    t_grid: Vec<f64>,
    #[arg(long, default_value_t = 20)]
    vectors: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Opts {
    fn configs(&self) -> Vec<BenchConfig> {
        self.n
            .iter()
            .map(|&n| {
                let mut c = BenchConfig::new(self.manifold, n, self.d);
                c.d_list = self.d_list.clone();
                if let Some(list) = &self.d_list {
                    c.d = list.iter().sum();
                }
                c.alpha = self.alpha;
                c.beta = self.beta;
                c.t_grid = self.t_grid.clone();
                c.num_vectors = self.vectors;
                c.seed = self.seed;
                c.repeats = self.repeats;
                c.output_path = self.out.clone();
                c
            })
            .collect()
    }
}

fn collect<R>(
    opts: &Opts,
    run: fn(&BenchConfig) -> Result<Vec<R>, BenchError>,
) -> Result<Vec<R>, BenchError> {
    let configs = opts.configs();
    for c in &configs {
        c.validate()?;
    }
    let mut rows = Vec::new();
    for c in &configs {
        rows.extend(run(c)?);
    }
    Ok(rows)
}

fn emit<R: Serialize>(path: &Option<PathBuf>, rows: &[R]) -> Result<(), BenchError> {
    match path {
        Some(p) => write_csv(BufWriter::new(File::create(p)?), rows),
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write_csv(&mut lock, rows)?;
            lock.flush()?;
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), BenchError> {
    match cli.command {
        Command::Bench(o) => emit(&o.out, &collect(&o, run_timing)?),
        Command::Isometry(o) => emit(&o.out, &collect(&o, run_isometry)?),
        Command::Verify(o) => {
            let rows = collect(&o, run_verify)?;
            emit(&o.out, &rows)?;
            let failed = rows.iter().filter(|r| !r.pass).count();
            if failed > 0 {
                return Err(BenchError::Verification(format!(
                    "{failed} of {} rows out of tolerance",
                    rows.len()
                )));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("manitrans: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
