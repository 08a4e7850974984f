use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use poincare_cli::config::{ConfigError, ConfigFile, Format};
use poincare_cli::report::format_value;
use poincare_cli::sweep;
use poincare_core::kloosterman::{self, KloostermanValue};
use poincare_core::poincare::{self, CertifyOptions, CoefficientQuery, CoefficientResult};
use poincare_core::real::format_radius;
use poincare_core::Error;

/// Certified Kloosterman sums and Fourier coefficients of Poincaré series.
#[derive(Parser)]
#[command(name = "poincare", version, about, long_about = None)]
struct Cli {
    #[command(flatten)]
    flags: Precision,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Precision {
    /// Working precision in bits [default: 128]
    #[arg(long = "prec", global = true)]
    prec: Option<u32>,
    /// Largest precision tried when a sign is undetermined [default: 1024]
    #[arg(long = "max-prec", global = true)]
    max_prec: Option<u32>,
    /// Target radius of coefficient enclosures [default: 1e-30]
    #[arg(long = "radius", global = true)]
    radius: Option<f64>,
    /// Write data here instead of standard output
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    /// Cap on the truncation point C of the coefficient c-sum
    #[arg(long = "max-c", global = true)]
    max_c: Option<u64>,
}

impl Precision {
    fn prec(&self) -> u32 {
        self.prec.unwrap_or(poincare::DEFAULT_PRECISION)
    }

    fn certify(&self) -> CertifyOptions {
        let precision = self.prec();
        CertifyOptions {
            precision,
            max_precision: self
                .max_prec
                .unwrap_or(poincare::DEFAULT_MAX_PRECISION.max(precision)),
            target_radius: self.radius.unwrap_or(poincare::DEFAULT_TARGET_RADIUS),
            max_truncation: self.max_c,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RouteArg {
    Direct,
    Factored,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Certified Kloosterman sum K(a, b, c)
    #[command(allow_negative_numbers = true)]
    Kloosterman {
        a: i64,
        b: i64,
        c: u64,
        #[arg(long, value_enum, default_value = "direct")]
        route: RouteArg,
    },
    /// Second moment Σ_{n mod N, (n,N)=1} K(m, n, N)²
    #[command(allow_negative_numbers = true)]
    Moment { m: i64, modulus: u64 },
    /// Kloosterman angles θ_{p,mn} for 1 <= n <= I and their KS distance to Sato-Tate
    Angles { p: u64, m: i64, range_end: u64 },
    /// Certified coefficient p_{k,N}(m; n)
    Coeff {
        k: u32,
        m: u64,
        level: u64,
        n: u64,
        /// Also print p(m; n) / p(m; RATIO_TO)
        #[arg(long)]
        ratio_to: Option<u64>,
    },
    /// First certified nonzero coefficient among n = 1..=n_max
    Vanishing {
        k: u32,
        m: u64,
        level: u64,
        #[arg(long, default_value_t = 1)]
        n_max: u64,
    },
    /// Theorem sweep from a config file and/or flags
    Verify(VerifyArgs),
    /// Ramanujan τ(1..=n_max) from the Euler product
    Tau { n_max: usize },
}

#[derive(Args)]
struct VerifyArgs {
    /// Flat key = value config file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    theorem: Option<u8>,
    #[arg(long)]
    k_start: Option<u32>,
    #[arg(long)]
    k_end: Option<u32>,
    #[arg(long)]
    k_step: Option<u32>,
    /// Comma-separated levels N
    #[arg(long, value_delimiter = ',')]
    levels: Option<Vec<u64>>,
    /// Largest m for theorems 3 and 4
    #[arg(long)]
    m_max: Option<u64>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Window multiplier for theorems 3 and 4 [default: 4]
    #[arg(long)]
    slack: Option<u64>,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("{0}")]
    Output(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::Contradiction(_)) => 1,
            CliError::Core(_) | CliError::Config(_) => 2,
            CliError::Io(_) | CliError::Output(_) => 1,
        }
    }
}

const UNDETERMINED: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let flags = cli.flags;
    match cli.command {
        Command::Kloosterman { a, b, c, route } => {
            let prec = flags.prec();
            let mut out = output(flags.out.as_ref())?;
            if matches!(route, RouteArg::Direct | RouteArg::Both) {
                print_kloosterman(&mut out, &kloosterman::kloosterman_direct(a, b, c, prec)?)?;
            }
            if matches!(route, RouteArg::Factored | RouteArg::Both) {
                print_kloosterman(&mut out, &kloosterman::kloosterman_factored(a, b, c, prec)?)?;
            }
            out.flush()?;
            Ok(0)
        }
        Command::Moment { m, modulus } => {
            let s = kloosterman::second_moment(m, modulus, flags.prec())?;
            let mut out = output(flags.out.as_ref())?;
            writeln!(out, "S_2({m}; {modulus}) = {s}")?;
            out.flush()?;
            Ok(0)
        }
        Command::Angles { p, m, range_end } => {
            let sample = kloosterman::angle_sample(p, m, range_end, flags.prec())?;
            let ks = sample.ks_distance()?;
            println!("p = {p}, m = {m}, n <= {range_end}");
            println!("sample size = {}", sample.len());
            println!("KS distance = {ks:.6}");
            if let Some(path) = &flags.out {
                let mut w = csv::WriterBuilder::new()
                    .terminator(csv::Terminator::Any(b'\n'))
                    .from_path(path)
                    .map_err(|e| CliError::Output(e.to_string()))?;
                w.write_record(["n", "theta"])
                    .map_err(|e| CliError::Output(e.to_string()))?;
                for (n, theta) in sample.ns.iter().zip(&sample.angles) {
                    w.write_record([n.to_string(), format!("{theta:.17e}")])
                        .map_err(|e| CliError::Output(e.to_string()))?;
                }
                w.flush()?;
            } else if sample.len() <= 32 {
                for (n, theta) in sample.ns.iter().zip(&sample.angles) {
                    println!("theta({n}) = {theta:.12}");
                }
            }
            Ok(0)
        }
        Command::Coeff {
            k,
            m,
            level,
            n,
            ratio_to,
        } => {
            let opts = flags.certify();
            let r = poincare::certify_nonzero(&CoefficientQuery::new(k, m, level, n)?, &opts)?;
            let mut out = output(flags.out.as_ref())?;
            print_coefficient(&mut out, &r)?;
            let mut determined = r.sign.is_determined();
            if let Some(n0) = ratio_to {
                let base =
                    poincare::certify_nonzero(&CoefficientQuery::new(k, m, level, n0)?, &opts)?;
                determined &= base.sign.is_determined();
                if base.sign.is_determined() {
                    let ratio = r.value.checked_div(&base.value)?;
                    writeln!(
                        out,
                        "{:.6} (ratio) ± {}",
                        ratio.to_f64(),
                        format_radius(ratio.rad())
                    )?;
                } else {
                    writeln!(out, "ratio undetermined: p({m}; {n0}) straddles zero")?;
                }
            }
            out.flush()?;
            Ok(if determined { 0 } else { UNDETERMINED })
        }
        Command::Vanishing { k, m, level, n_max } => {
            let r = poincare::order_of_vanishing(k, m, level, n_max, &flags.certify())?;
            let mut out = output(flags.out.as_ref())?;
            writeln!(
                out,
                "P_{{{k},{m},{level}}}: scanned n = 1..={}",
                r.scanned_to
            )?;
            match (&r.first_nonzero_n, &r.witness) {
                (Some(n), Some(w)) => {
                    writeln!(out, "v_inf <= {n}")?;
                    print_coefficient(&mut out, w)?;
                }
                _ => writeln!(out, "no certified nonzero coefficient")?,
            }
            if !r.undetermined_indices.is_empty() {
                writeln!(out, "undetermined n: {:?}", r.undetermined_indices)?;
            }
            out.flush()?;
            Ok(if r.is_determined() { 0 } else { UNDETERMINED })
        }
        Command::Verify(args) => verify(args, flags),
        Command::Tau { n_max } => {
            let tau = poincare::tau_oracle(n_max)?;
            let mut out = output(flags.out.as_ref())?;
            match flags.format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    writeln!(out, "n,tau")?;
                    for (i, t) in tau.iter().enumerate() {
                        writeln!(out, "{},{t}", i + 1)?;
                    }
                }
                Format::Json => {
                    let rows: Vec<_> = tau
                        .iter()
                        .enumerate()
                        .map(|(i, t)| serde_json::json!({ "n": i + 1, "tau": t.to_string() }))
                        .collect();
                    serde_json::to_writer_pretty(&mut out, &rows)
                        .map_err(|e| CliError::Output(e.to_string()))?;
                    writeln!(out)?;
                }
            }
            out.flush()?;
            Ok(0)
        }
    }
}

fn print_kloosterman(out: &mut dyn Write, k: &KloostermanValue) -> io::Result<()> {
    writeln!(
        out,
        "K({}, {}, {}) = {} ± {} [{}]",
        k.a,
        k.b,
        k.c,
        format_value(&k.value),
        format_radius(k.value.rad()),
        k.route
    )
}

fn print_coefficient(out: &mut dyn Write, r: &CoefficientResult) -> io::Result<()> {
    writeln!(
        out,
        "{} = {} ± {}",
        r.query,
        format_value(&r.value),
        format_radius(r.value.rad())
    )?;
    writeln!(out, "truncation C = {}", r.truncation_c)?;
    writeln!(out, "tail radius = {}", format_radius(&r.tail_radius))?;
    writeln!(out, "sign = {}", r.sign)?;
    writeln!(out, "precision = {}", r.precision)
}

fn verify(args: VerifyArgs, flags: Precision) -> Result<u8, CliError> {
    let file = match &args.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let overrides = ConfigFile {
        theorem: args.theorem,
        k_start: args.k_start,
        k_end: args.k_end,
        k_step: args.k_step,
        levels: args.levels,
        m_max: args.m_max,
        epsilon: args.epsilon,
        window_slack: args.slack,
        precision: flags.prec,
        max_precision: flags.max_prec,
        target_radius: flags.radius,
        max_truncation: flags.max_c,
        out: flags.out,
        format: flags.format,
    };
    let cfg = file.merge(overrides).resolve()?;
    let report = sweep::run(&cfg)?;
    let out = output(cfg.out.as_ref())?;
    match cfg.format {
        Format::Csv => report
            .write_csv(out)
            .map_err(|e| CliError::Output(e.to_string()))?,
        Format::Json => report
            .write_json(out)
            .map_err(|e| CliError::Output(e.to_string()))?,
    }
    eprintln!(
        "theorem {}: {} rows, {} nonzero, {} undetermined",
        cfg.theorem, report.summary.rows, report.summary.nonzero, report.summary.undetermined
    );
    Ok(if report.all_determined() {
        0
    } else {
        UNDETERMINED
    })
}
