//! Command-line front end for the `qdense` binary.
//!
//! Exit codes:
//!
//! | code | meaning                                             |
//! |------|-----------------------------------------------------|
//! | 0    | success; for `classify`, the verdict is dense       |
//! | 1    | `classify`: not dense                               |
//! | 2    | `classify`: unknown (positivity over Nⁿ undecided)  |
//! | 64   | usage error                                         |
//! | 65   | invalid form (singular or zero) or invalid input    |
//! | 66   | enumeration budget exceeded                         |
//! | 70   | oracle disagrees with the classifier                |
//! | 74   | I/O error                                           |

pub mod atlas;
pub mod config;
pub mod formspec;
pub mod render;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::density::{is_dense, is_dense_nonnegative_restricted, Decision, Domain};
use crate::error::Error;
use crate::form::{is_isotropic, quotient_class_set, represented_classes, QuadraticForm};
use crate::oracle::{density_report, OracleConfig, DEFAULT_BOX, DEFAULT_BUDGET, DEFAULT_WINDOW};
use crate::padic::Prime;
use crate::square_class::{hensel_precision, hilbert_symbol, Place};

use self::config::Config;
use self::render::{
    coverage_grid, join, rational_string, representatives, ClassesDocJson, ClassesJson, FormJson, HilbertJson,
    IsotropyJson, OracleJson, VerdictJson, SCHEMA_VERSION,
};

pub const EXIT_DENSE: i32 = 0;
pub const EXIT_NOT_DENSE: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_INVALID_FORM: i32 = 65;
pub const EXIT_BUDGET: i32 = 66;
pub const EXIT_DISAGREE: i32 = 70;
pub const EXIT_IO: i32 = 74;

const COEFF_HELP: &str = "Coefficients of the monomials X_iX_j with i <= j, row-major, comma separated \
(for n = 2: a,b,c of aX1^2 + bX1X2 + cX2^2). Integers or num/den rationals.";

#[derive(Debug, Parser)]
#[command(
    name = "qdense",
    version,
    about = "Density of quotient sets of quadratic form values in Q_p",
    after_help = "Coefficient order: monomials X_iX_j with i <= j, row-major. For n = 3: \
c11,c12,c13,c22,c23,c33.\nExit codes: 0 dense/ok, 1 not dense, 2 unknown, 64 usage, 65 invalid form, \
66 budget exceeded, 70 oracle disagreement, 74 I/O error.\nEnvironment: QDENSE_CONFIG names an optional \
key=value file (box, prec, window, budget, jobs, radius); flags override it."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct FormArgs {
    /// Number of variables.
    #[arg(short = 'n', long = "dim")]
    n: usize,
    #[arg(short = 'c', long = "coeffs", allow_hyphen_values = true, help = COEFF_HELP)]
    coeffs: String,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DomainArg {
    Z,
    N,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide whether R(Q(Z^n)) is dense in Q_p.
    Classify {
        #[command(flatten)]
        form: FormArgs,
        #[arg(short = 'p', long)]
        p: u64,
        /// Restrict to quotients of positive values of Q on Z^n or N^n.
        #[arg(long, value_enum)]
        domain: Option<DomainArg>,
        /// Search radius for positive values on N^n.
        #[arg(long)]
        radius: Option<u64>,
        /// Include represented and quotient square classes.
        #[arg(long)]
        classes: bool,
        #[arg(long)]
        json: bool,
    },
    /// Decide whether Q has a nontrivial zero over Q_p.
    Isotropy {
        #[command(flatten)]
        form: FormArgs,
        #[arg(short = 'p', long)]
        p: u64,
        #[arg(long)]
        json: bool,
    },
    /// List the square classes represented by Q and met by its quotients.
    Classes {
        #[command(flatten)]
        form: FormArgs,
        #[arg(short = 'p', long)]
        p: u64,
        #[arg(long)]
        json: bool,
    },
    /// Hilbert symbol (a, b)_v at a prime or at the real place.
    Hilbert {
        #[arg(short = 'a', allow_hyphen_values = true)]
        a: String,
        #[arg(short = 'b', allow_hyphen_values = true)]
        b: String,
        /// A prime, or `real` / `inf`.
        #[arg(short = 'v', long = "place")]
        place: String,
        #[arg(long)]
        json: bool,
    },
    /// Brute-force the quotient set on [-B, B]^n and compare with the classifier.
    Oracle {
        #[command(flatten)]
        form: FormArgs,
        #[arg(short = 'p', long)]
        p: u64,
        /// Box radius B.
        #[arg(long = "box")]
        box_radius: Option<u64>,
        /// Unit precision k (residues mod p^k).
        #[arg(long)]
        prec: Option<u32>,
        /// Valuation window V.
        #[arg(long)]
        window: Option<i64>,
        /// Maximum number of argument vectors.
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Classify every integer form in a coefficient box against a list of primes.
    Atlas {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Coefficients range over [-bound, bound].
        #[arg(long, allow_hyphen_values = true)]
        bound: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        min: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        max: Option<i64>,
        /// Comma-separated primes.
        #[arg(long)]
        primes: String,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Run the oracle on every row and record agreement.
        #[arg(long)]
        verify: bool,
        #[arg(long = "box")]
        box_radius: Option<u64>,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

/// A failed command: exit code plus message for stderr.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Failure {
            code: EXIT_IO,
            message: format!("{}: {e}", path.display()),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BudgetExceeded { .. } => EXIT_BUDGET,
            Error::NotPrime(_) | Error::EvenPrime | Error::InvalidParameter(_) => EXIT_USAGE,
            _ => EXIT_INVALID_FORM,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<formspec::FormSpecError> for Failure {
    fn from(e: formspec::FormSpecError) -> Self {
        Failure {
            code: if e.invalid_form { EXIT_INVALID_FORM } else { EXIT_USAGE },
            message: format!("invalid form: {e}"),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: EXIT_IO,
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<i32, Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    let config = match Config::from_env() {
        Ok(c) => c,
        Err(msg) => {
            let _ = writeln!(err, "error: config: {msg}");
            return EXIT_USAGE;
        }
    };
    match dispatch(cli.command, &config, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cmd: Command, config: &Config, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    match cmd {
        Command::Classify {
            form,
            p,
            domain,
            radius,
            classes,
            json,
        } => classify(&form, p, domain, radius.or(config.radius).unwrap_or(10), classes, json, out),
        Command::Isotropy { form, p, json } => isotropy(&form, p, json, out),
        Command::Classes { form, p, json } => classes_cmd(&form, p, json, out),
        Command::Hilbert { a, b, place, json } => hilbert(&a, &b, &place, json, out),
        Command::Oracle {
            form,
            p,
            box_radius,
            prec,
            window,
            budget,
            jobs,
            json,
        } => {
            let prime = Prime::new(p)?;
            let oracle_config = OracleConfig {
                box_radius: box_radius.or(config.box_radius).unwrap_or(DEFAULT_BOX),
                precision: prec.or(config.precision).unwrap_or(hensel_precision(prime)),
                window: window.or(config.window).unwrap_or(DEFAULT_WINDOW),
                budget: budget.or(config.budget).unwrap_or(DEFAULT_BUDGET),
                jobs: jobs.or(config.jobs).unwrap_or(1).max(1),
            };
            oracle(&form, prime, &oracle_config, json, out)
        }
        Command::Atlas {
            dim,
            bound,
            min,
            max,
            primes,
            out: path,
            format,
            verify,
            box_radius,
            budget,
            jobs,
        } => {
            let (lo, hi) = match (bound, min, max) {
                (Some(b), None, None) if b >= 0 => (-b, b),
                (None, Some(lo), Some(hi)) if lo <= hi => (lo, hi),
                _ => return Err(Failure::usage("give either --bound B (B >= 0) or both --min and --max with min <= max")),
            };
            let primes = parse_primes(&primes)?;
            let verify = verify.then(|| OracleConfig {
                box_radius: box_radius.or(config.box_radius).unwrap_or(DEFAULT_BOX),
                precision: 1,
                window: DEFAULT_WINDOW,
                budget: budget.or(config.budget).unwrap_or(DEFAULT_BUDGET),
                jobs: 1,
            });
            let spec = atlas::AtlasSpec {
                dim,
                min: lo,
                max: hi,
                primes,
                verify,
                jobs: jobs.or(config.jobs).unwrap_or(1).max(1),
            };
            atlas_cmd(&spec, path.as_deref(), format, out, err)
        }
    }
}

fn parse_form(form: &FormArgs) -> Result<QuadraticForm, Failure> {
    Ok(formspec::parse_form(form.n, &form.coeffs)?)
}

fn parse_primes(text: &str) -> Result<Vec<Prime>, Failure> {
    let mut primes = Vec::new();
    for token in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let v: u64 = token
            .parse()
            .map_err(|_| Failure::usage(format!("`{token}` is not a prime")))?;
        primes.push(Prime::new(v).map_err(|e| Failure::usage(e.to_string()))?);
    }
    if primes.is_empty() {
        return Err(Failure::usage("the prime list is empty"));
    }
    Ok(primes)
}

fn domain_of(arg: DomainArg) -> Domain {
    match arg {
        DomainArg::Z => Domain::Z,
        DomainArg::N => Domain::N,
    }
}

fn classify(
    form: &FormArgs,
    p: u64,
    domain: Option<DomainArg>,
    radius: u64,
    with_classes: bool,
    json: bool,
    out: &mut dyn Write,
) -> CmdResult {
    let q = parse_form(form)?;
    let p = Prime::new(p)?;
    let verdict = is_dense(&q, p)?;
    let mut doc = VerdictJson::new(&q, p, &verdict);
    let mut decision = Decision::from(verdict.dense);
    let mut positivity_line = None;
    if let Some(d) = domain {
        let d = domain_of(d);
        let restricted = is_dense_nonnegative_restricted(&q, p, d, radius)?;
        decision = restricted.dense;
        let radius_field = (d == Domain::N).then_some(radius);
        doc = doc.with_positivity(d, &restricted.positivity, radius_field, decision);
        positivity_line = Some(format!(
            "positive value on {}^n: {}{}",
            render::domain_str(d),
            restricted.positivity.value.as_str(),
            restricted
                .positivity
                .witness
                .as_ref()
                .map(|w| format!(" (witness {})", join(w)))
                .unwrap_or_default()
        ));
    }
    let classes = if with_classes {
        let rep = represented_classes(&q, p)?;
        let quo = quotient_class_set(&q, p)?;
        doc = doc.with_classes(&rep, &quo);
        Some((rep, quo))
    } else {
        None
    };

    if json {
        writeln!(out, "{}", doc.to_json())?;
    } else {
        writeln!(out, "form: {q}")?;
        writeln!(out, "p: {p}")?;
        let word = match decision {
            Decision::Yes => "dense",
            Decision::No => "not dense",
            Decision::Unknown => "unknown",
        };
        writeln!(out, "verdict: {word}")?;
        writeln!(out, "branch: {} ({})", verdict.branch, verdict.branch.explanation())?;
        if let Some(w) = &verdict.witness {
            let modulus = if p.is_two() { 8 } else { p.get() };
            writeln!(
                out,
                "discriminant: {} (unit part = {} mod {modulus})",
                rational_string(&w.discriminant),
                w.unit_residue
            )?;
        }
        if let Some(line) = positivity_line {
            writeln!(out, "{line}")?;
        }
        if let Some((rep, quo)) = classes {
            writeln!(out, "represented classes: {}", join(&representatives(&rep)))?;
            writeln!(out, "quotient classes: {}", join(&representatives(&quo)))?;
        }
    }
    Ok(match decision {
        Decision::Yes => EXIT_DENSE,
        Decision::No => EXIT_NOT_DENSE,
        Decision::Unknown => EXIT_UNKNOWN,
    })
}

fn isotropy(form: &FormArgs, p: u64, json: bool, out: &mut dyn Write) -> CmdResult {
    let q = parse_form(form)?;
    let p = Prime::new(p)?;
    let iso = is_isotropic(&q, p)?;
    if json {
        let doc = IsotropyJson {
            schema: SCHEMA_VERSION,
            form: FormJson::of(&q),
            p: p.get(),
            isotropic: iso,
        };
        writeln!(out, "{}", serde_json::to_string(&doc).expect("serializes"))?;
    } else {
        writeln!(out, "{}", if iso { "isotropic" } else { "anisotropic" })?;
    }
    Ok(0)
}

fn classes_cmd(form: &FormArgs, p: u64, json: bool, out: &mut dyn Write) -> CmdResult {
    let q = parse_form(form)?;
    let p = Prime::new(p)?;
    let rep = represented_classes(&q, p)?;
    let quo = quotient_class_set(&q, p)?;
    if json {
        let doc = ClassesDocJson {
            schema: SCHEMA_VERSION,
            form: FormJson::of(&q),
            p: p.get(),
            classes: ClassesJson {
                represented: representatives(&rep),
                quotient: representatives(&quo),
            },
        };
        writeln!(out, "{}", serde_json::to_string(&doc).expect("serializes"))?;
    } else {
        let total = crate::square_class::all_classes(p).len();
        writeln!(out, "represented: {} ({} of {total})", join(&representatives(&rep)), rep.len())?;
        writeln!(out, "quotient: {} ({} of {total})", join(&representatives(&quo)), quo.len())?;
    }
    Ok(0)
}

fn hilbert(a: &str, b: &str, place: &str, json: bool, out: &mut dyn Write) -> CmdResult {
    let parse = |s: &str| formspec::parse_rational(s).map_err(|m| Failure::usage(format!("invalid argument: {m}")));
    let (ra, rb) = (parse(a)?, parse(b)?);
    let place = match place.trim().to_ascii_lowercase().as_str() {
        "real" | "inf" | "infinity" => Place::Real,
        other => {
            let v: u64 = other
                .parse()
                .map_err(|_| Failure::usage(format!("place `{other}` is neither a prime nor `real`")))?;
            Place::Finite(Prime::new(v)?)
        }
    };
    let symbol = hilbert_symbol(&ra, &rb, place).map_err(|e| match e {
        Error::ZeroArgument => Failure {
            code: EXIT_INVALID_FORM,
            message: "Hilbert symbol arguments must be nonzero".into(),
        },
        other => other.into(),
    })?;
    if json {
        let doc = HilbertJson {
            schema: SCHEMA_VERSION,
            a: rational_string(&ra),
            b: rational_string(&rb),
            place: place.to_string(),
            symbol,
        };
        writeln!(out, "{}", serde_json::to_string(&doc).expect("serializes"))?;
    } else {
        writeln!(out, "{symbol}")?;
    }
    Ok(0)
}

fn oracle(form: &FormArgs, p: Prime, config: &OracleConfig, json: bool, out: &mut dyn Write) -> CmdResult {
    let q = parse_form(form)?;
    let verdict = is_dense(&q, p)?;
    let report = density_report(&q, p, config)?;
    let agree = report.full_coverage() == verdict.dense;
    if json {
        let doc = OracleJson {
            schema: SCHEMA_VERSION,
            form: FormJson::of(&q),
            p: p.get(),
            dense: verdict.dense,
            branch: verdict.branch.to_string(),
            full_coverage: report.full_coverage(),
            agree,
            report: &report,
        };
        writeln!(out, "{}", serde_json::to_string(&doc).expect("serializes"))?;
    } else {
        writeln!(out, "form: {q}")?;
        writeln!(
            out,
            "p = {p}, box = {}, k = {}, V = {}",
            config.box_radius, config.precision, config.window
        )?;
        writeln!(
            out,
            "classifier: {} ({})",
            if verdict.dense { "dense" } else { "not dense" },
            verdict.branch
        )?;
        let total = crate::square_class::all_classes(p).len();
        writeln!(
            out,
            "observed classes: {} ({} of {total})",
            join(&representatives(&report.observed_classes)),
            report.observed_classes.len()
        )?;
        writeln!(
            out,
            "coverage: {}/{} cells (points {}, distinct values {})",
            report.covered_cells(),
            report.coverage.len(),
            report.counts.points,
            report.counts.distinct_values
        )?;
        write!(out, "{}", coverage_grid(&report))?;
        writeln!(out, "{}", if agree { "AGREE" } else { "DISAGREE" })?;
    }
    Ok(if agree { 0 } else { EXIT_DISAGREE })
}

fn atlas_cmd(
    spec: &atlas::AtlasSpec,
    path: Option<&Path>,
    format: Format,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let result = atlas::build_atlas(spec)?;
    let render = |w: &mut dyn Write| -> std::io::Result<()> {
        match format {
            Format::Csv => atlas::write_csv(&result, w),
            Format::Json => w.write_all(atlas::to_json(&result).as_bytes()),
        }
    };
    match path {
        None => render(out)?,
        Some(path) => {
            let mut partial = path.as_os_str().to_owned();
            partial.push(".partial");
            let partial = PathBuf::from(partial);
            let written = std::fs::File::create(&partial).and_then(|f| {
                let mut w = std::io::BufWriter::new(f);
                render(&mut w)?;
                w.flush()
            });
            if let Err(e) = written.and_then(|_| std::fs::rename(&partial, path)) {
                let _ = std::fs::remove_file(&partial);
                return Err(Failure::io(path, e));
            }
        }
    }
    writeln!(err, "# {}", result.summary())?;
    Ok(if result.disagreements() > 0 { EXIT_DISAGREE } else { 0 })
}
