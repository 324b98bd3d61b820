use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use steenq::adem::{admissible_basis, rewrite_to_admissible};
use steenq::bases::{
    arnon_basis, change_of_basis_capped, pst_basis, verify_triangular, BasisKind, Direction,
    RowOrder, BASIS_LIMIT,
};
use steenq::may::{filtration, format_poly, poincare_e0, AtomicOrder, FiltrationOracle, ORACLE_DEGREE_LIMIT};
use steenq::milnor::{milnor_basis, milnor_product};
use steenq::parse::{parse_any, parse_element, parse_word};
use steenq::unitriangular::{priddy_check_with_order, GROUP_LIMIT};
use steenq::{Error, PrimePower};

#[derive(Parser)]
#[command(name = "steenq", version, about = "Computations in the algebra of Steenrod q-th powers")]
struct Cli {
    /// The prime p.
    #[arg(long, global = true, default_value_t = 2)]
    p: u32,
    /// The exponent e, with q = p^e.
    #[arg(long, global = true, default_value_t = 1)]
    e: u32,
    /// Override the resource guard of the chosen command (also STEENQ_CAP).
    #[arg(long, global = true)]
    cap: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Admissible,
    #[value(name = "pstY")]
    PstY,
    #[value(name = "pstZ")]
    PstZ,
    #[value(name = "arnonY")]
    ArnonY,
    #[value(name = "arnonZ")]
    ArnonZ,
    Milnor,
}

impl From<Kind> for BasisKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Admissible => BasisKind::Admissible,
            Kind::PstY => BasisKind::PstY,
            Kind::PstZ => BasisKind::PstZ,
            Kind::ArnonY => BasisKind::ArnonY,
            Kind::ArnonZ => BasisKind::ArnonZ,
            Kind::Milnor => BasisKind::Milnor,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Order {
    Left,
    Right,
    Zlex,
    Filtration,
}

#[derive(Clone, Copy, ValueEnum)]
enum Dir {
    Asc,
    Desc,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenOrder {
    Y,
    Z,
    Degree,
}

#[derive(Subcommand)]
enum Cmd {
    /// Multiply two elements and print the Milnor expansion.
    Mul { lhs: String, rhs: String },
    /// Rewrite a word in the admissible basis.
    Rewrite { word: String },
    /// May filtration of an element or word.
    Filt {
        element: String,
        /// Use the span-based oracle instead of the closed formula.
        #[arg(long)]
        oracle: bool,
    },
    /// List a basis in one degree.
    Basis {
        #[arg(long)]
        degree: u64,
        #[arg(long, value_enum, default_value_t = Kind::Milnor)]
        kind: Kind,
    },
    /// Change-of-basis matrix to the Milnor basis.
    Matrix {
        #[arg(long)]
        degree: u64,
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, value_enum, default_value_t = Order::Right)]
        order: Order,
        #[arg(long, value_enum)]
        direction: Option<Dir>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        verify_triangular: bool,
    },
    /// Poincaré polynomial of E⁰(A_q(n-2)).
    Poincare {
        #[arg(long)]
        n: usize,
    },
    /// Compare E⁰ of the unitriangular group algebra with E⁰(A_q(n-2)).
    Priddy {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = GenOrder::Degree)]
        order: GenOrder,
    },
}

enum Failure {
    Error(Error),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

fn cap_override(flag: Option<u64>) -> Result<Option<u64>, Failure> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var("STEENQ_CAP") {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::Error(Error::InvalidArgument(format!("STEENQ_CAP={v} is not a number")))),
        Err(_) => Ok(None),
    }
}

fn run(cli: Cli) -> Result<String, Failure> {
    let ctx = PrimePower::new(cli.p, cli.e)?;
    let cap = cap_override(cli.cap)?;
    match cli.cmd {
        Cmd::Mul { lhs, rhs } => {
            let x = parse_element(&lhs, &ctx)?;
            let y = parse_element(&rhs, &ctx)?;
            Ok(milnor_product(&x, &y)?.to_string())
        }
        Cmd::Rewrite { word } => Ok(rewrite_to_admissible(&parse_word(&word, &ctx)?).to_string()),
        Cmd::Filt { element, oracle } => {
            let x = parse_any(&element, &ctx)?;
            if oracle {
                let mut o = FiltrationOracle::with_limit(ctx, None, cap.unwrap_or(ORACLE_DEGREE_LIMIT));
                Ok(o.filtration(&x)?.to_string())
            } else {
                Ok(filtration(&x).to_string())
            }
        }
        Cmd::Basis { degree, kind } => {
            let limit = cap.unwrap_or(BASIS_LIMIT);
            let dim = steenq::may::poincare_aq(&ctx, degree)[degree as usize];
            if dim > limit {
                return Err(Error::ResourceGuard {
                    what: "basis size",
                    requested: dim,
                    limit,
                }
                .into());
            }
            let lines: Vec<String> = match kind {
                Kind::Milnor => milnor_basis(degree, &ctx).iter().map(|r| r.to_string()).collect(),
                Kind::Admissible => admissible_basis(degree, &ctx).iter().map(|w| w.to_string()).collect(),
                Kind::PstY => pst_basis(degree, AtomicOrder::Y, &ctx).iter().map(|m| m.to_string()).collect(),
                Kind::PstZ => pst_basis(degree, AtomicOrder::Z, &ctx).iter().map(|m| m.to_string()).collect(),
                Kind::ArnonY => arnon_basis(degree, AtomicOrder::Y, &ctx).iter().map(|m| m.to_string()).collect(),
                Kind::ArnonZ => arnon_basis(degree, AtomicOrder::Z, &ctx).iter().map(|m| m.to_string()).collect(),
            };
            Ok(lines.join("\n"))
        }
        Cmd::Matrix {
            degree,
            kind,
            order,
            direction,
            format,
            verify_triangular: verify,
        } => {
            let order = match order {
                Order::Left => RowOrder::Left,
                Order::Right => RowOrder::Right,
                Order::Zlex => RowOrder::Zlex,
                Order::Filtration => RowOrder::Filtration,
            };
            let direction = direction.map(|d| match d {
                Dir::Asc => Direction::Ascending,
                Dir::Desc => Direction::Descending,
            });
            let m = change_of_basis_capped(degree, kind.into(), order, direction, &ctx, cap.unwrap_or(BASIS_LIMIT))?;
            let tri = verify.then(|| verify_triangular(&m));
            let mut out = match format {
                Format::Text => m.to_text(),
                Format::Csv => m.to_csv()?,
                Format::Json => {
                    let mut v = serde_json::to_value(&m).expect("matrix serializes");
                    v["entries"] = serde_json::to_value(m.rows()).expect("rows serialize");
                    if let Some(t) = &tri {
                        v["triangularity"] = serde_json::to_value(t).expect("report serializes");
                    }
                    serde_json::to_string_pretty(&v).expect("json")
                }
            };
            if let Some(t) = tri {
                if !matches!(format, Format::Json) {
                    if !out.ends_with('\n') {
                        out.push('\n');
                    }
                    out.push_str(&format!("triangular: {}", t.triangular));
                    if let Some((i, j)) = t.violation.filter(|_| !t.triangular) {
                        out.push_str(&format!(" (first violation at row {i}, column {j})"));
                    }
                }
                if !t.triangular {
                    emit(&out);
                    return Err(Failure::Verification("matrix is not triangular".into()));
                }
            }
            Ok(out.trim_end().to_string())
        }
        Cmd::Poincare { n } => Ok(format_poly(&poincare_e0(n, &ctx)?)),
        Cmd::Priddy { n, order } => {
            let order = match order {
                GenOrder::Y => AtomicOrder::Y,
                GenOrder::Z => AtomicOrder::Z,
                GenOrder::Degree => AtomicOrder::Degree,
            };
            let r = priddy_check_with_order(n, ctx, order, cap.unwrap_or(GROUP_LIMIT))?;
            let json = r.to_json();
            if r.passed() {
                Ok(json)
            } else {
                emit(&json);
                Err(Failure::Verification(format!("{} mismatches", r.mismatches.len())))
            }
        }
    }
}

/// Prints to stdout; a closed pipe (as with `| head`) is not an error.
fn emit(s: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{s}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(out) => {
            emit(&out);
            ExitCode::SUCCESS
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::ResourceGuard { .. } => 3,
                Error::Verification(_) => 2,
                _ => 1,
            })
        }
    }
}
