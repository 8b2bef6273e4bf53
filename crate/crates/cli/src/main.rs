use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Result};
use clap::{Parser, Subcommand, ValueEnum};

use cursekit::commands::{
    cmd_certify, cmd_curse, cmd_discrepancy, cmd_generate, cmd_tables, CurseArgs, SpaceArgs,
    SpaceChoice, TableKind,
};
use cursekit::io::read_point_set;
use cursekit::table::OutputFormat;
use cursekit_core::discrepancy::{BackendChoice, Family};
use cursekit_core::points::GeneratorKind;
use cursekit_core::spaces::Exponent;
use cursekit_core::Error as CoreError;

/// Certified lower bounds for multivariate integration and L_p
/// discrepancies of node sets.
#[derive(Parser)]
#[command(name = "cursekit", version, about)]
struct Cli {
    /// Output format for result tables.
    #[arg(long, global = true, value_enum, default_value = "pretty")]
    format: FormatArg,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Pretty,
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum TablesArg {
    /// Positive-rule rates for degree-2 polynomials over q.
    CtildeQ,
    /// Positive-rule rates for the no-anchor space over p, at a = 1/2.
    CpAHalf,
    /// Closed-form curse constants of the anchored space over (r, p).
    CprGrid,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpaceArg {
    AnchoredSobolev,
    NoAnchorSobolev,
    Poly2,
    WeightedGauss,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Anchored,
    Quadrant,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    ClosedFormP2,
    BoxExact,
    MonteCarlo,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    UniformRandom,
    Grid,
    Rank1Lattice,
    VdcProduct,
}

#[derive(Subcommand)]
enum Command {
    /// Reproduce the built-in constant tables with reference values.
    Tables {
        which: TablesArg,
        /// Anchor for the cpr-grid table.
        #[arg(long, default_value_t = 0.5)]
        a: f64,
    },
    /// Certified lower bounds for the rule nodes in a point-set file.
    Certify {
        /// Point-set file.
        #[arg(long)]
        points: PathBuf,
        #[arg(long, value_enum)]
        space: SpaceArg,
        /// Smoothness (anchored-sobolev and weighted-gauss).
        #[arg(long, default_value_t = 1)]
        r: u32,
        /// Norm exponent in (1, inf]; pass "inf" for the supremum norm.
        #[arg(long, default_value = "2")]
        q: String,
        /// Anchor / decomposition point.
        #[arg(long, default_value_t = 0.5)]
        a: f64,
        /// Which lower bound: 1 (decomposable), 3 (decomposable part),
        /// 5 (positive rules).
        #[arg(long)]
        theorem: u8,
    },
    /// L_p discrepancy of a point-set file.
    Discrepancy {
        #[arg(long)]
        points: PathBuf,
        #[arg(long, value_enum, default_value = "anchored")]
        family: FamilyArg,
        /// Sum p-th powers over all coordinate projections.
        #[arg(long)]
        generalized: bool,
        /// Integrability exponent p >= 1.
        #[arg(long = "p-exp", default_value_t = 2.0)]
        p_exp: f64,
        #[arg(long, default_value_t = 0.5)]
        a: f64,
        #[arg(long, value_enum, default_value = "closed-form-p2")]
        backend: BackendArg,
        /// Monte Carlo sample count.
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        /// Monte Carlo seed (required for the monte-carlo backend).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Lower bounds on the nodes needed to cut the initial error by eps,
    /// over a range of dimensions.
    Curse {
        #[arg(long)]
        theorem: u8,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 1)]
        d_min: u32,
        #[arg(long)]
        d_max: u32,
        #[arg(long, default_value_t = 1)]
        d_step: u32,
        /// Quadrant-mass ratio (theorems 1 and 3).
        #[arg(long)]
        alpha: Option<f64>,
        /// Decomposable-to-smooth integral ratio (theorem 3).
        #[arg(long)]
        alpha3: Option<f64>,
        /// Safety factor 1 - delta on the open-interval rate (theorem 3).
        #[arg(long, default_value_t = 1e-6)]
        delta: f64,
        /// Positive-rule rate constant (theorem 5).
        #[arg(long = "c-tilde")]
        c_tilde: Option<f64>,
        /// Derive constants from a space instead of passing them.
        #[arg(long, value_enum)]
        space: Option<SpaceArg>,
        #[arg(long, default_value_t = 1)]
        r: u32,
        #[arg(long, default_value = "2")]
        q: String,
        #[arg(long, default_value_t = 0.5)]
        a: f64,
        /// Add a log2 column.
        #[arg(long)]
        log2: bool,
        /// Write an SVG polyline plot (presentation only).
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Generate a node set and write it as a point-set file.
    Generate {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Marker for exit-code 1 errors raised after argument parsing.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for UsageError {}

fn parse_q(s: &str) -> Result<Exponent> {
    match s.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" => Ok(Exponent::Infinity),
        other => other.parse::<f64>().map(Exponent::Finite).map_err(|_| {
            anyhow!(UsageError(format!(
                "--q must be a number or 'inf', got {s}"
            )))
        }),
    }
}

fn space_args(space: SpaceArg, r: u32, q: &str, a: f64) -> Result<SpaceArgs> {
    Ok(SpaceArgs {
        space: match space {
            SpaceArg::AnchoredSobolev => SpaceChoice::AnchoredSobolev,
            SpaceArg::NoAnchorSobolev => SpaceChoice::NoAnchorSobolev,
            SpaceArg::Poly2 => SpaceChoice::Poly2,
            SpaceArg::WeightedGauss => SpaceChoice::WeightedGauss,
        },
        r,
        q: parse_q(q)?,
        a,
    })
}

fn run(cli: Cli) -> Result<()> {
    let format = match cli.format {
        FormatArg::Pretty => OutputFormat::Pretty,
        FormatArg::Csv => OutputFormat::Csv,
        FormatArg::Json => OutputFormat::Json,
    };
    let table = match cli.command {
        Command::Tables { which, a } => {
            let kind = match which {
                TablesArg::CtildeQ => TableKind::CtildeQ,
                TablesArg::CpAHalf => TableKind::CpAHalf,
                TablesArg::CprGrid => TableKind::CprGrid,
            };
            cmd_tables(kind, a)?
        }
        Command::Certify {
            points,
            space,
            r,
            q,
            a,
            theorem,
        } => {
            let ps = read_point_set(&points)?;
            cmd_certify(&ps, &space_args(space, r, &q, a)?, theorem)?
        }
        Command::Discrepancy {
            points,
            family,
            generalized,
            p_exp,
            a,
            backend,
            samples,
            seed,
        } => {
            let ps = read_point_set(&points)?;
            let family = match family {
                FamilyArg::Anchored => Family::Anchored,
                FamilyArg::Quadrant => Family::Quadrant,
            };
            let backend = match backend {
                BackendArg::ClosedFormP2 => BackendChoice::ClosedFormP2,
                BackendArg::BoxExact => BackendChoice::BoxExact,
                BackendArg::MonteCarlo => BackendChoice::MonteCarlo {
                    n_samples: samples,
                    seed: seed.ok_or_else(|| {
                        anyhow!(UsageError(
                            "--seed is required for the monte-carlo backend".into()
                        ))
                    })?,
                },
            };
            cmd_discrepancy(&ps, family, generalized, p_exp, a, backend)?
        }
        Command::Curse {
            theorem,
            eps,
            d_min,
            d_max,
            d_step,
            alpha,
            alpha3,
            delta,
            c_tilde,
            space,
            r,
            q,
            a,
            log2,
            svg,
        } => {
            let space = match space {
                Some(s) => Some(space_args(s, r, &q, a)?),
                None => None,
            };
            let args = CurseArgs {
                theorem,
                eps,
                d_min,
                d_max,
                d_step,
                log2,
                alpha,
                alpha3,
                delta,
                c_tilde,
                space,
            };
            cmd_curse(&args, svg.as_deref())?
        }
        Command::Generate {
            kind,
            d,
            n,
            seed,
            out,
        } => {
            let kind = match kind {
                KindArg::UniformRandom => GeneratorKind::UniformRandom,
                KindArg::Grid => GeneratorKind::Grid,
                KindArg::Rank1Lattice => GeneratorKind::Rank1Lattice,
                KindArg::VdcProduct => GeneratorKind::VdcProduct,
            };
            cmd_generate(kind, d, n, seed, &out)?
        }
    };
    print!("{}", table.render(format));
    Ok(())
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    if err
        .chain()
        .any(|c| c.downcast_ref::<UsageError>().is_some())
    {
        return 1;
    }
    if err.chain().any(|c| c.downcast_ref::<CoreError>().is_some()) {
        return 2;
    }
    1
}

fn main() -> ExitCode {
    // Parallelism cap; the numeric kernels are sequential with fixed
    // reduction order, so any positive cap is honored.
    if let Ok(v) = std::env::var("CURSEKIT_THREADS") {
        if v.parse::<usize>().map(|n| n >= 1) != Ok(true) {
            eprintln!("error: CURSEKIT_THREADS must be a positive integer, got '{v}'");
            return ExitCode::from(1);
        }
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints its own message; fold all parse failures into the
            // usage exit code (clap's default would be 2).
            let _ = e.print();
            let code = if e.use_stderr() { 1 } else { 0 };
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
