use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dforge_core::analysis::{run_analysis, AnalysisConfig, EXIT_REFUTATION, PRECISION_ENV};
use dforge_core::diff_poly::{eliminate_x, split_x};
use dforge_core::io::{load_series, write_series, SeriesSpec};
use dforge_core::lattice::integer_basis;
use dforge_core::obstruction::{
    derive_ade_certificate, substitute_certificate, verify_certificate_text, Certificate, VerifyOutcome,
};
use dforge_core::parse::{parse_diffpoly, parse_diffpoly_lenient, parse_exponent};
use dforge_core::rational::{parse_rational, Q};
use dforge_core::transforms::{ode_to_pde, rescale, verify_hilbert_zeta, verify_rescale_invariance};
use dforge_core::{DiffPolynomial, Error, Exponent, FormalSeries, Symbol};

/// `println!` that ignores a closed pipe.
macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout().lock(), $($t)*);
    }};
}

#[derive(Parser)]
#[command(name = "dforge", version, about = "Formal Dirichlet series and algebraic difference-differential equations")]
struct Cli {
    /// Working precision in bits for real comparisons.
    #[arg(long, global = true, env = PRECISION_ENV)]
    precision: Option<u32>,
    /// Log more (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the obstruction pipeline over corpus or series files.
    Analyze {
        inputs: Vec<PathBuf>,
        /// TOML configuration file.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Directory for certificate files.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        equation: Option<String>,
        #[arg(long)]
        derive_ade: bool,
    },
    /// Substitute a series into an equation.
    Substitute {
        #[command(flatten)]
        series: SeriesArg,
        #[arg(long = "eq")]
        equation: String,
        #[arg(long)]
        horizon: Option<String>,
        /// Also run the threshold analysis when the residual vanishes.
        #[arg(long)]
        prop3: bool,
        #[command(flatten)]
        out: OutArg,
    },
    /// Remove explicit x by a resultant.
    EliminateX {
        #[arg(long = "eq")]
        equation: String,
        /// Print the monomial content and repeated factor instead.
        #[arg(long)]
        split: bool,
    },
    /// Integer lattice basis of the exponents of a series.
    Basis {
        #[command(flatten)]
        series: SeriesArg,
    },
    /// Search for an equation satisfied by a series.
    DeriveAde {
        #[command(flatten)]
        series: SeriesArg,
        #[arg(long, default_value_t = 3)]
        max_weight: u32,
        #[arg(long)]
        horizon: Option<String>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Multiply coefficients by powers of the given scalars.
    Rescale {
        #[command(flatten)]
        series: SeriesArg,
        /// Comma-separated rationals, one per lattice generator.
        #[arg(long, value_delimiter = ',')]
        c: Vec<String>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Partial differential equation obtained at s = 0.
    OdeToPde {
        #[arg(long = "eq")]
        equation: String,
        /// Rate symbols, one per variable.
        #[arg(long, value_delimiter = ',', default_value = "lam")]
        lambdas: Vec<String>,
        #[arg(long)]
        raw: bool,
    },
    /// Re-check a certificate file, or run a built-in verification.
    #[command(args_conflicts_with_subcommands = true)]
    Verify {
        file: Option<PathBuf>,
        #[command(subcommand)]
        check: Option<VerifyCheck>,
    },
}

#[derive(Subcommand)]
enum VerifyCheck {
    /// Hilbert's functional equation on a zeta prefix.
    Hilbert {
        #[arg(long, default_value_t = 20)]
        n: u64,
        #[arg(long, default_value_t = 3)]
        max_mu: u32,
        #[arg(long, default_value_t = 3)]
        max_nu: u32,
        #[command(flatten)]
        out: OutArg,
    },
    /// Invariance of an equation under coefficient rescaling.
    Rescale {
        #[command(flatten)]
        series: SeriesArg,
        #[arg(long = "eq")]
        equation: String,
        #[arg(long, value_delimiter = ',')]
        c: Vec<String>,
        #[arg(long)]
        horizon: Option<String>,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Args)]
struct SeriesArg {
    /// Series spec (.json) or index corpus (optionally gzipped).
    #[arg(long)]
    series: PathBuf,
}

#[derive(Args)]
struct OutArg {
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl OutArg {
    fn emit(&self, text: &str) -> Result<(), Error> {
        match &self.out {
            Some(p) => Ok(std::fs::write(p, format!("{text}\n"))?),
            None => {
                say!("{text}");
                Ok(())
            }
        }
    }
}

fn load(series: &SeriesArg, precision: Option<u32>) -> Result<FormalSeries, Error> {
    load_series(&series.series, precision)
}

fn equation_over(text: &str, phi: &FormalSeries) -> Result<DiffPolynomial, Error> {
    parse_diffpoly(text, phi.basis().symbols())
}

fn horizon_over(text: Option<&str>, phi: &FormalSeries) -> Result<Option<Exponent>, Error> {
    text.map(|h| parse_exponent(h, phi.basis().symbols())).transpose()
}

fn scalars(c: &[String]) -> Result<Vec<Q>, Error> {
    c.iter().map(|s| parse_rational(s.trim())).collect()
}

fn certificate_status(c: &Certificate) -> i32 {
    if c.is_refutation() {
        EXIT_REFUTATION
    } else {
        0
    }
}

fn run(cli: Cli) -> Result<i32, Error> {
    let prec = cli.precision;
    match cli.command {
        Command::Analyze { inputs, config, out, equation, derive_ade } => {
            let mut cfg = AnalysisConfig::load(config.as_deref())?;
            if let Some(p) = prec {
                cfg.precision_bits = p;
            }
            if out.is_some() {
                cfg.output = out;
            }
            if equation.is_some() {
                cfg.equation = equation;
            }
            cfg.derive_ade |= derive_ade;
            if inputs.is_empty() {
                return Err(Error::BadConfig("no inputs".into()));
            }
            let bundle = run_analysis(&cfg, &inputs)?;
            for r in &bundle.reports {
                for c in &r.certificates {
                    let tag = if c.is_refutation() { "OBSTRUCTION" } else { "ok" };
                    say!("{tag}\t{:?}\t{}\tscanned={}", c.kind, r.input.display(), c.scanned);
                }
            }
            Ok(bundle.exit_code())
        }
        Command::Substitute { series, equation, horizon, prop3, out } => {
            let phi = load(&series, prec)?;
            let f = equation_over(&equation, &phi)?;
            let h = horizon_over(horizon.as_deref(), &phi)?;
            let c = substitute_certificate(&f, &phi, h.as_ref(), prop3)?;
            out.emit(&c.to_json())?;
            Ok(certificate_status(&c))
        }
        Command::EliminateX { equation, split } => {
            let f = parse_diffpoly_lenient(&equation)?;
            if split {
                let s = split_x(&f);
                let content = DiffPolynomial::term(s.content, dforge_core::Coefficient::one());
                say!("content: {content}");
                match &s.repeated {
                    Some(g) => say!("repeated: {g}"),
                    None => say!("repeated: none"),
                }
                say!("reduced: {}", s.reduced);
            } else {
                say!("{}", eliminate_x(&f)?);
            }
            Ok(0)
        }
        Command::Basis { series } => {
            let phi = load(&series, prec)?;
            let exps: Vec<Exponent> = phi.exponents().cloned().collect();
            let b = integer_basis(&exps, phi.basis());
            say!("{}", serde_json::to_string_pretty(&b).expect("basis serializes"));
            Ok(0)
        }
        Command::DeriveAde { series, max_weight, horizon, out } => {
            let phi = load(&series, prec)?;
            let h = horizon_over(horizon.as_deref(), &phi)?;
            let c = derive_ade_certificate(&phi, max_weight, h.as_ref())?;
            out.emit(&c.to_json())?;
            Ok(certificate_status(&c))
        }
        Command::Rescale { series, c, out } => {
            let phi = load(&series, prec)?;
            let exps: Vec<Exponent> = phi.exponents().cloned().collect();
            let b = integer_basis(&exps, phi.basis());
            let psi = rescale(&phi, &b, &scalars(&c)?)?;
            match &out.out {
                Some(p) => write_series(p, &psi)?,
                None => say!("{}", SeriesSpec::from_series(&psi).to_json()),
            }
            Ok(0)
        }
        Command::OdeToPde { equation, lambdas, raw } => {
            let f = parse_diffpoly_lenient(&equation)?;
            let l: Vec<Symbol> = lambdas.iter().map(|s| Symbol::new(s.trim())).collect();
            let pde = ode_to_pde(&f, &l)?;
            let pde = if raw { pde } else { pde.normalized() };
            say!("{pde} = 0");
            Ok(0)
        }
        Command::Verify { file: Some(path), .. } => verify_file(&path),
        Command::Verify { file: None, check: Some(VerifyCheck::Hilbert { n, max_mu, max_nu, out }) } => {
            let c = verify_hilbert_zeta(n, max_nu, max_mu)?;
            out.emit(&c.to_json())?;
            Ok(0)
        }
        Command::Verify { file: None, check: Some(VerifyCheck::Rescale { series, equation, c, horizon, out }) } => {
            let phi = load(&series, prec)?;
            let f = equation_over(&equation, &phi)?;
            let h = horizon_over(horizon.as_deref(), &phi)?;
            let exps: Vec<Exponent> = phi.exponents().cloned().collect();
            let b = integer_basis(&exps, phi.basis());
            let cert = verify_rescale_invariance(&f, &phi, &b, &scalars(&c)?, h.as_ref())?;
            out.emit(&cert.to_json())?;
            Ok(0)
        }
        Command::Verify { file: None, check: None } => Err(Error::BadConfig("verify needs a file or a check".into())),
    }
}

fn verify_file(path: &Path) -> Result<i32, Error> {
    let text = std::fs::read_to_string(path)?;
    match verify_certificate_text(&text)? {
        VerifyOutcome::Ok { version_note } => {
            say!("OK");
            if let Some(n) = version_note {
                say!("note: {n}");
            }
            Ok(0)
        }
        VerifyOutcome::Mismatch(diffs) => {
            say!("MISMATCH");
            for d in diffs {
                say!("  {d}");
            }
            Ok(1)
        }
    }
}

fn main() -> ExitCode {
    // usage errors exit 1; 2 is reserved for obstruction evidence
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(1)
        }
    }
}
