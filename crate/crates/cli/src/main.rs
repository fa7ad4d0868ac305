use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use ffperm::report::{Format, Report};
use ffperm::sweeps::{self, SweepError, Thm1Options};

#[derive(Debug, Parser)]
#[command(name = "ffperm", version, about = "Exact checks for permutation binomials over F_{q^2}")]
struct Cli {
    /// Report format: text, json or csv.
    #[arg(long, global = true, default_value = "text")]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: u64,
    /// Seed for the randomized congruence samples.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one verification sweep.
    Verify {
        #[command(subcommand)]
        target: Verify,
    },
    /// Compare the classifier with enumeration for one (q, t).
    Classify {
        #[arg(long)]
        q: u64,
        #[arg(long, allow_hyphen_values = true)]
        t: i64,
    },
    /// Run sweeps in bulk.
    Sweep {
        #[command(subcommand)]
        target: Sweep,
    },
}

#[derive(Debug, Subcommand)]
enum Verify {
    /// Classifier against enumeration for all 3 <= q <= Q and t in F_q^*.
    Thm1 {
        #[arg(long)]
        q_max: u64,
        /// Also run the power-sum oracle for q up to this bound.
        #[arg(long)]
        powersum_max: Option<u64>,
        /// Also run the reduction to the (q+1)-th roots of unity.
        #[arg(long)]
        zieve: bool,
    },
    /// Closed-form power sums against direct summation.
    Lemma31 {
        #[arg(long, value_delimiter = ',', required = true)]
        q_list: Vec<u64>,
    },
    /// Randomized binomial congruence C(z + qw, a) = C(z, a) mod p.
    Lemma30 {
        #[arg(long, default_value_t = sweeps::defaults::LEMMA30_SAMPLES)]
        samples: usize,
    },
    /// S1(n) + S2(n) = 0.
    Identity {
        #[arg(long)]
        n_max: u64,
    },
    /// The second-order recurrence for both sums.
    Recurrence {
        #[arg(long)]
        n_max: u64,
    },
    /// Telescoping residuals of both certificates.
    Certificate {
        #[arg(long)]
        n_max: u64,
        #[arg(long, allow_hyphen_values = true)]
        k_max: i64,
    },
    /// Hypergeometric restatements.
    Hyp {
        #[arg(long)]
        n_max: u64,
    },
    /// The binomial bracket modulo p for odd prime powers.
    Eq33 {
        #[arg(long)]
        q_max: u64,
    },
    /// Congruence and desirability of g_{n,q}.
    Gnq {
        #[arg(long, value_delimiter = ',', required = true)]
        q_list: Vec<u64>,
        #[arg(long)]
        i_max: u32,
    },
}

#[derive(Debug, Subcommand)]
enum Sweep {
    /// Every sweep at the acceptance bounds.
    All,
}

fn run_command(cli: &Cli) -> Result<Vec<ffperm::report::CheckRecord>, SweepError> {
    match &cli.command {
        Command::Verify { target } => match target {
            Verify::Thm1 {
                q_max,
                powersum_max,
                zieve,
            } => sweeps::thm1(Thm1Options {
                q_max: *q_max,
                powersum_max: *powersum_max,
                zieve: *zieve,
            }),
            Verify::Lemma31 { q_list } => sweeps::lemma31(q_list),
            Verify::Lemma30 { samples } => sweeps::lemma30(cli.seed, *samples),
            Verify::Identity { n_max } => sweeps::identity(*n_max),
            Verify::Recurrence { n_max } => sweeps::recurrence(*n_max),
            Verify::Certificate { n_max, k_max } => sweeps::certificate(*n_max, *k_max),
            Verify::Hyp { n_max } => sweeps::hyp(*n_max),
            Verify::Eq33 { q_max } => sweeps::eq33(*q_max),
            Verify::Gnq { q_list, i_max } => sweeps::gnq(q_list, *i_max),
        },
        Command::Classify { q, t } => sweeps::classify(*q, *t),
        Command::Sweep { target: Sweep::All } => sweeps::all(cli.seed),
    }
}

fn emit(cli: &Cli, report: &Report) -> anyhow::Result<()> {
    let body = report.render(cli.format);
    match &cli.out {
        Some(path) => {
            fs::write(path, body).with_context(|| format!("writing {}", path.display()))?
        }
        None => io::stdout().lock().write_all(body.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs as usize)
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(2);
        }
    };
    let records = match pool.install(|| run_command(&cli)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let report = Report::new(records);
    if let Err(e) = emit(&cli, &report) {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
