//! `kfq`: point counts, zeta functions, motivic cohomology tables and
//! K-groups of surfaces over finite fields.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use kfq_core::catalog::{build_descriptor, naive_counts, SurfaceClass};
use kfq_core::ffcount::{counts_series_with, Budget, CountMethod};
use kfq_core::format::{
    render_check, render_counts, render_curve_k, render_k_report, render_table, render_weil,
    CountsDoc, OutputFormat, SurfaceDoc,
};
use kfq_core::ktheory::{k_curve_with, k_groups};
use kfq_core::motivic::motivic_table;
use kfq_core::oracle::{check_suite, DEFAULT_SEED, DEFAULT_SIZES};
use kfq_core::weil::{
    prime_power_base, reconstruct_p1_from_counts, reconstruct_p2_from_counts, validate_weil,
};
use kfq_core::Error;

const EXIT_VALIDATION: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "kfq",
    version,
    about = "Motivic cohomology and K-groups of surfaces over finite fields"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Text => OutputFormat::Text,
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassArg {
    Fermat,
    P2,
    Quadric,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Conv,
    Naive,
}

#[derive(Subcommand)]
enum Command {
    /// Count points over F_q, ..., F_{q^rmax}.
    Count {
        #[arg(long, value_enum)]
        class: ClassArg,
        /// Degree of the Fermat surface.
        #[arg(long)]
        d: Option<u32>,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        rmax: u32,
        #[arg(long, value_enum, default_value_t = MethodArg::Conv)]
        method: MethodArg,
    },
    /// Reconstruct and validate a Weil polynomial from point counts.
    Zeta {
        #[arg(long)]
        counts: PathBuf,
        /// Second Betti number of the surface.
        #[arg(long, required_unless_present = "curve")]
        b2: Option<usize>,
        /// Treat the counts as those of a curve.
        #[arg(long, requires = "genus")]
        curve: bool,
        #[arg(long)]
        genus: Option<usize>,
    },
    /// Motivic cohomology table H^i(X, Z(n)) for n <= nmax.
    Motivic {
        #[arg(long)]
        surface: PathBuf,
        #[arg(long)]
        nmax: u32,
    },
    /// K-groups K_n(X) for n <= nmax.
    K {
        #[arg(long)]
        surface: PathBuf,
        #[arg(long)]
        nmax: u32,
    },
    /// Run the brute-force cross-check suite.
    Check {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

enum Failure {
    Core(Error),
    Io(String),
    ChecksFailed,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<String, Failure> {
    let fmt: OutputFormat = cli.format.into();
    match cli.command {
        Command::Count {
            class,
            d,
            q,
            rmax,
            method,
        } => {
            let budget = Budget::default();
            let counts = match class {
                ClassArg::Fermat => {
                    let d =
                        d.ok_or_else(|| Error::InvalidInput("--class fermat needs --d".into()))?;
                    let (p, s) = prime_power_base(q)?;
                    let method = match method {
                        MethodArg::Conv => CountMethod::Convolution,
                        MethodArg::Naive => CountMethod::Naive,
                    };
                    counts_series_with(d, p, s, rmax, method, &budget)?
                }
                ClassArg::P2 => naive_counts(&SurfaceClass::ProjectivePlane, q, rmax, &budget)?,
                ClassArg::Quadric => naive_counts(&SurfaceClass::SmoothQuadric, q, rmax, &budget)?,
            };
            Ok(render_counts(&counts, fmt))
        }
        Command::Zeta {
            counts,
            b2,
            curve,
            genus,
        } => {
            let counts = CountsDoc::from_json(&read(&counts)?)?.to_counts()?;
            let wp = if curve {
                reconstruct_p1_from_counts(&counts, genus.expect("clap enforces --genus"))?
            } else {
                reconstruct_p2_from_counts(&counts, b2.expect("clap enforces --b2"))?
            };
            let report = validate_weil(&wp);
            Ok(render_weil(&wp, &report, fmt))
        }
        Command::Motivic { surface, nmax } => {
            let input = SurfaceDoc::from_json(&read(&surface)?)?.to_input()?;
            let desc = build_descriptor(&input.class, input.q)?;
            let table = motivic_table(&desc, nmax)?;
            Ok(render_table(&desc, &table, fmt))
        }
        Command::K { surface, nmax } => {
            let input = SurfaceDoc::from_json(&read(&surface)?)?.to_input()?;
            if let SurfaceClass::CurveFromZeta { p1, tate } = &input.class {
                let groups = (0..=nmax)
                    .map(|n| Ok((n, k_curve_with(p1, tate.as_ref(), n)?)))
                    .collect::<Result<Vec<_>, Error>>()?;
                return Ok(render_curve_k(input.q, &groups, fmt));
            }
            let desc = build_descriptor(&input.class, input.q)?;
            let report = k_groups(&desc, nmax)?;
            Ok(render_k_report(&desc, &report, fmt))
        }
        Command::Check { seed } => {
            let report = check_suite(seed, &DEFAULT_SIZES);
            let out = render_check(&report, fmt);
            if report.all_passed() {
                Ok(out)
            } else {
                print!("{out}");
                Err(Failure::ChecksFailed)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_budget() {
                EXIT_BUDGET
            } else {
                EXIT_VALIDATION
            })
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::ChecksFailed) => {
            eprintln!("error: cross-checks failed");
            ExitCode::from(1)
        }
    }
}
