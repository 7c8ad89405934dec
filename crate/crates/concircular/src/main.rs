use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use concircular::io::{run, Command, ErrorOutput, Format, Job};

/// Concircular tensors, separable webs and the separation algorithm.
#[derive(Parser)]
#[command(name = "concircular", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Canonical form, invariants and class of a tensor.
    Classify(Common),
    /// Characteristic polynomial of the canonical form.
    Charpoly(Common),
    /// Chart of an irreducible tensor at canonical coordinates (--u).
    Chart(Common),
    /// Closed-form metric against the Jacobian pullback at --u.
    Metric(Common),
    /// Warped-product decomposition of a reducible tensor at --base.
    Warp(Common),
    /// Separation tree of a potential.
    Separate(Common),
    /// Enumerate inequivalent classes for a structure spec.
    Enumerate(Common),
    /// Run the acceptance checks.
    Selftest(Common),
}

#[derive(Args)]
struct Common {
    /// Space file.
    #[arg(long)]
    space: Option<String>,
    /// Tensor file.
    #[arg(long)]
    ct: Option<String>,
    /// Potential file.
    #[arg(long)]
    potential: Option<String>,
    /// Enumeration spec file.
    #[arg(long)]
    spec: Option<String>,
    /// Canonical coordinates, comma separated rationals.
    #[arg(long, allow_hyphen_values = true)]
    u: Option<String>,
    /// Base point, comma separated rationals.
    #[arg(long, allow_hyphen_values = true)]
    base: Option<String>,
    /// Seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (standard output by default).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Text,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, c) = match cli.command {
        Cmd::Classify(c) => (Command::Classify, c),
        Cmd::Charpoly(c) => (Command::Charpoly, c),
        Cmd::Chart(c) => (Command::Chart, c),
        Cmd::Metric(c) => (Command::Metric, c),
        Cmd::Warp(c) => (Command::Warp, c),
        Cmd::Separate(c) => (Command::Separate, c),
        Cmd::Enumerate(c) => (Command::Enumerate, c),
        Cmd::Selftest(c) => (Command::Selftest, c),
    };
    let job = Job { command, space: c.space, ct: c.ct, potential: c.potential, spec: c.spec, u: c.u, base: c.base, seed: c.seed };
    let format = match c.format {
        OutputFormat::Json => Format::Json,
        OutputFormat::Text => Format::Text,
    };
    match run(&job) {
        Ok(artifact) => {
            let body = artifact.render(format);
            match &c.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, body) {
                        eprintln!("cannot write {}: {e}", path.display());
                        return ExitCode::from(1);
                    }
                }
                None => print!("{body}"),
            }
            if artifact.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            let doc = ErrorOutput::from(&e);
            eprint!("{}", concircular::io::to_json(&doc));
            ExitCode::from(doc.exit as u8)
        }
    }
}
