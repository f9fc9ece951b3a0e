//! `eqdd`: invariants of a circle action on the infinite UHF algebra with
//! character polynomial p, computed exactly. Every subcommand echoes the
//! normalized character and the effective configuration in its JSON output,
//! so results are reproducible from the output alone.

mod commands;
mod settings;

use std::fmt::Display;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{value_parser, Args, Parser, Subcommand};

use eqdd_core::polycore::CharacterPolynomial;

use settings::{OutputFormat, Overrides, Settings};

#[derive(Debug)]
pub enum CliError {
    /// Bad mathematical input: exit 1.
    Domain(String),
    /// Bad invocation: exit 2, matching the parser's own exit code.
    Usage(String),
}

impl CliError {
    pub fn domain(msg: impl Display) -> Self {
        CliError::Domain(msg.to_string())
    }

    pub fn usage(msg: impl Display) -> Self {
        CliError::Usage(msg.to_string())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Usage(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Domain(m) | CliError::Usage(m) => m,
        }
    }
}

macro_rules! domain_error {
    ($($ty:ty),*) => {$(
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::domain(e)
            }
        }
    )*};
}

domain_error!(
    eqdd_core::polycore::PolyError,
    eqdd_core::factorint::FactorError,
    eqdd_core::locring::LocringError,
    eqdd_core::cohomology::CohomologyError,
    eqdd_core::appendixpolys::AppendixError,
    eqdd_core::bratteli::ExportError
);

#[derive(Parser)]
#[command(
    name = "eqdd",
    version,
    about = "Exact invariants of circle actions on the infinite UHF algebra"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    global: GlobalOpts,
}

#[derive(Args)]
struct GlobalOpts {
    /// Output format (dot is diagram-only)
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// Write the primary output to a file instead of stdout
    #[arg(long, global = true, value_name = "FILE")]
    output: Option<PathBuf>,
    /// Largest power of p tried by positivity and membership searches
    #[arg(long, global = true, value_name = "J")]
    search_bound: Option<u32>,
    /// Largest numerator degree the factoring step accepts
    #[arg(long, global = true, value_name = "D")]
    degree_cap: Option<usize>,
    /// File of key = value lines overriding the defaults above
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Recorded in the output envelope for reproducibility
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Args)]
struct PolyArg {
    /// Character polynomial, e.g. "1+t", "2", "1+2t+t^3", "t^-2+t^-1"
    #[arg(short = 'p', long = "poly", value_name = "POLY")]
    p: String,
}

impl PolyArg {
    fn parse(&self) -> Result<CharacterPolynomial, CliError> {
        Ok(CharacterPolynomial::parse(&self.p)?)
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a character polynomial and report its normal form
    Normalize(PolyArg),
    /// Factor the character into irreducible integer polynomials
    Factor(PolyArg),
    /// Unit group of the localized representation ring
    Units(PolyArg),
    /// pi_0 of the automorphism group: the positive unit monoid
    Pi0(PolyArg),
    /// Canonicalize a ring element, test invertibility and positivity
    Element {
        #[command(flatten)]
        poly: PolyArg,
        /// Element of the localization, e.g. "t/(1+t)" or "(1+t^2)/t^2(1+t)"
        #[arg(short = 'x', long = "element", value_name = "ELEM")]
        x: String,
    },
    /// Membership in the bounded subring or one of its subgroups
    Rbdd {
        #[command(flatten)]
        poly: PolyArg,
        #[arg(short = 'x', long = "element", value_name = "ELEM")]
        x: String,
        /// RBDD, RBDD0, RBDDINF or RBDD0INF
        #[arg(long, default_value = "RBDD")]
        sub: String,
    },
    /// Bratteli diagram of the fixed-point tower
    Bratteli {
        #[command(flatten)]
        poly: PolyArg,
        #[arg(long, default_value_t = 6, value_parser = value_parser!(u32).range(0..=64))]
        levels: u32,
        /// Also print the K_0 inclusion matrix at this level
        #[arg(long, value_name = "LEVEL", value_parser = value_parser!(u32).range(0..=64))]
        k0: Option<u32>,
    },
    /// Homotopy of Aut (default), of a finite level (-k), or of the unitary limit
    Homotopy {
        #[command(flatten)]
        poly: PolyArg,
        /// Homotopy degree
        #[arg(short)]
        m: u32,
        /// Finite level of the tower instead of the limit
        #[arg(short, conflicts_with = "unitary_limit", value_parser = value_parser!(u32).range(0..=64))]
        k: Option<u32>,
        /// Unitary group of the limit algebra instead of Aut
        #[arg(long)]
        unitary_limit: bool,
    },
    /// Coefficient groups of the classifying theory over a degree range
    Coeffs {
        #[command(flatten)]
        poly: PolyArg,
        #[arg(long, default_value_t = -8, allow_hyphen_values = true)]
        k_min: i64,
        #[arg(long, default_value_t = 3, allow_hyphen_values = true)]
        k_max: i64,
    },
    /// Degree-1 group over the n-torus, in closed form
    Torus {
        #[command(flatten)]
        poly: PolyArg,
        /// Torus dimension
        #[arg(short, value_parser = value_parser!(u32).range(0..=16))]
        n: u32,
    },
    /// Spectral-sequence page and degree-1 group over a CW space
    Cw {
        #[command(flatten)]
        poly: PolyArg,
        /// pt, T^n, S^n, or a path to a JSON space description
        #[arg(long, value_name = "SPACE")]
        space: String,
    },
    /// Obstruction group H^k + H^{k+2} for a plain matrix fibre
    Brauer {
        /// pt, T^n, S^n, or a path to a JSON space description
        #[arg(long, value_name = "SPACE")]
        space: String,
        /// Base degree
        #[arg(short, long = "degree", default_value_t = 1)]
        k: u32,
    },
    /// Large-middle predicate and the coefficient growth of p^m
    Appendix {
        #[command(flatten)]
        poly: PolyArg,
        /// Check the growth bound for this power
        #[arg(short, value_parser = value_parser!(u32).range(1..=64))]
        m: Option<u32>,
        /// Search limit for the least large-middle power
        #[arg(long, default_value_t = 16, value_parser = value_parser!(u32).range(1..=64))]
        cap: u32,
    },
    /// Full survey: homotopy table, coefficients, tori, fibre comparison
    PaperReport {
        #[command(flatten)]
        poly: PolyArg,
        /// Largest torus dimension in the survey
        #[arg(short, default_value_t = 3, value_parser = value_parser!(u32).range(1..=8))]
        n: u32,
    },
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::Normalize(_) => "normalize",
            Cmd::Factor(_) => "factor",
            Cmd::Units(_) => "units",
            Cmd::Pi0(_) => "pi0",
            Cmd::Element { .. } => "element",
            Cmd::Rbdd { .. } => "rbdd",
            Cmd::Bratteli { .. } => "bratteli",
            Cmd::Homotopy { .. } => "homotopy",
            Cmd::Coeffs { .. } => "coeffs",
            Cmd::Torus { .. } => "torus",
            Cmd::Cw { .. } => "cw",
            Cmd::Brauer { .. } => "brauer",
            Cmd::Appendix { .. } => "appendix",
            Cmd::PaperReport { .. } => "paper-report",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let settings = Settings::resolve(&Overrides {
        config: cli.global.config.clone(),
        search_bound: cli.global.search_bound,
        degree_cap: cli.global.degree_cap,
        format: cli.global.format,
        seed: cli.global.seed,
    })?;
    if settings.format == OutputFormat::Dot && !matches!(cli.command, Cmd::Bratteli { .. }) {
        return Err(CliError::usage(
            "dot output is only available for the bratteli command",
        ));
    }
    let name = cli.command.name();
    let outcome = dispatch(&cli.command, &settings)?;

    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }

    let body = if let Some(raw) = outcome.raw {
        raw
    } else if settings.format == OutputFormat::Json {
        let mut env = serde_json::Map::new();
        env.insert("command".into(), serde_json::json!(name));
        if let Some(cp) = &outcome.character {
            env.insert(
                "p".into(),
                serde_json::to_value(cp).expect("character serializes"),
            );
            env.insert(
                "original_offset".into(),
                serde_json::json!(cp.original_offset()),
            );
        }
        env.insert("config".into(), settings.echo());
        env.insert("result".into(), outcome.result);
        env.insert(
            "status".into(),
            serde_json::json!(if outcome.warnings.is_empty() {
                "ok"
            } else {
                "ok_with_warnings"
            }),
        );
        env.insert(
            "warnings".into(),
            serde_json::to_value(&outcome.warnings).expect("warnings serialize"),
        );
        let mut s = serde_json::to_string_pretty(&serde_json::Value::Object(env))
            .expect("envelope serializes");
        s.push('\n');
        s
    } else {
        outcome.text
    };

    match &cli.global.output {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| CliError::domain(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{body}"),
    }
    Ok(())
}

fn dispatch(cmd: &Cmd, settings: &Settings) -> Result<commands::Outcome, CliError> {
    match cmd {
        Cmd::Normalize(poly) => Ok(commands::normalize(poly.parse()?)),
        Cmd::Factor(poly) => commands::factor(poly.parse()?, settings),
        Cmd::Units(poly) => {
            let ring = commands::make_ring(&poly.parse()?, settings)?;
            Ok(commands::units(&ring))
        }
        Cmd::Pi0(poly) => {
            let ring = commands::make_ring(&poly.parse()?, settings)?;
            Ok(commands::pi0(&ring))
        }
        Cmd::Element { poly, x } => {
            let ring = commands::make_ring(&poly.parse()?, settings)?;
            commands::element(&ring, x)
        }
        Cmd::Rbdd { poly, x, sub } => {
            let ring = commands::make_ring(&poly.parse()?, settings)?;
            commands::rbdd(&ring, x, sub)
        }
        Cmd::Bratteli { poly, levels, k0 } => {
            commands::bratteli_cmd(poly.parse()?, *levels, *k0, settings.format)
        }
        Cmd::Homotopy {
            poly,
            m,
            k,
            unitary_limit,
        } => commands::homotopy(
            poly.parse()?,
            &commands::HomotopyArgs {
                m: *m,
                k: *k,
                unitary_limit: *unitary_limit,
            },
            settings,
        ),
        Cmd::Coeffs { poly, k_min, k_max } => {
            let ring = commands::make_ring(&poly.parse()?, settings)?;
            commands::coeffs(&ring, *k_min, *k_max)
        }
        Cmd::Torus { poly, n } => {
            let ring = commands::make_ring(&poly.parse()?, settings)?;
            commands::torus_cmd(&ring, *n)
        }
        Cmd::Cw { poly, space } => {
            let ring = commands::make_ring(&poly.parse()?, settings)?;
            let x = commands::parse_space(space)?;
            commands::cw(&ring, &x)
        }
        Cmd::Brauer { space, k } => {
            let x = commands::parse_space(space)?;
            commands::brauer(&x, *k)
        }
        Cmd::Appendix { poly, m, cap } => commands::appendix(poly.parse()?, *m, *cap),
        Cmd::PaperReport { poly, n } => commands::paper_report(poly.parse()?, *n, settings),
    }
}
