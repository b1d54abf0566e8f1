//! Command-line surface over the library: shell enumeration, weighted
//! theta expansion, strength certification, coefficient scans, design
//! verification, prime congruences, and the built-in reference tables
//! with a cell-by-cell diff.
//!
//! Exit codes: 0 on success, 1 on usage or environment errors, 2 when a
//! computed value contradicts an expected one.  Identical invocations
//! produce byte-identical output, and every number is printed as an
//! exact decimal string.

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use shellharm::designs::{self, DesignMethod, PointSet};
use shellharm::harmonics::{Metric, Polynomial};
use shellharm::invariant;
use shellharm::lattices::{count_shell, enumerate_shell, LatticeModel, LatticeSpec, Shell};
use shellharm::strength::{
    congruence_certificate, convolution_criteria, octonary_octic_check, prime_nonvanishing_region,
    quaternary_sextic_check, strength_scan, strength_upto, tau2_nonvanishing_scan,
};
use shellharm::theta::{image_rank, weighted_theta, Weight};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

/// Reference rank rows of the harmonic theta map, one value per even
/// degree ℓ = 2, 4, …; the `tables` command re-derives and diffs them.
const DIMENSION_ROWS: &[(&str, &[usize])] = &[
    ("D4", &[0, 0, 1, 1, 0, 2, 1, 1, 2, 2, 1, 3]),
    ("D6", &[0, 1, 1, 2, 2, 3, 3]),
    ("D8", &[0, 1, 1, 2, 2, 3]),
    ("E6", &[0, 0, 1, 1, 1, 2]),
    ("E8", &[0, 0, 0, 1, 0, 1, 1, 1, 1, 2, 1, 2]),
];

/// Reference shell cardinalities for m = 1..=9.
const CARDINALITY_ROWS: &[(&str, [u64; 9])] = &[
    ("D4", [24, 24, 96, 24, 144, 96, 192, 24, 312]),
    ("D6", [60, 252, 544, 1020, 1560, 2080, 3264, 4092, 4380]),
    ("D8", [112, 1136, 3136, 9328, 14112, 31808, 38528, 74864, 84784]),
    ("E6", [72, 270, 720, 936, 2160, 2214, 3600, 4590, 6552]),
    ("E8", [240, 2160, 6720, 17520, 30240, 60480, 82560, 140400, 181680]),
];

#[derive(Parser)]
#[command(
    name = "shellharm",
    version,
    about = "Exact harmonic analysis of lattice shells",
    subcommand_required = true,
    arg_required_else_help = true
)]
struct RunConfig {
    /// Worker threads for parallel enumeration (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for resumable scan checkpoints.
    #[arg(long, global = true, env = "SHELLHARM_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List shell cardinalities, or dump one shell's points.
    Shells(ShellsArgs),
    /// Expand a weighted theta series coefficient by coefficient.
    Theta(ThetaArgs),
    /// Certify the harmonic strength of one shell or scan a range.
    Strength(StrengthArgs),
    /// Run a coefficient scan and fail on unexpected zeros.
    Scan(ScanArgs),
    /// Verify spherical design degrees of a point set from a CSV file.
    Design(DesignArgs),
    /// Recompute the reference rank and cardinality tables and diff them.
    Tables(TablesArgs),
    /// Check the prime congruences of the binary newform coefficients.
    Congruence(CongruenceArgs),
}

#[derive(clap::Args)]
struct ShellsArgs {
    /// Lattice name (Z<n>, D<n>, A2, E6, E8).
    #[arg(long)]
    lattice: String,
    /// Dump the points of the single shell with this scaled norm.
    #[arg(long, conflicts_with = "m_max")]
    two_m: Option<i64>,
    /// List the cardinalities of the shells m = 1..=M instead.
    #[arg(long)]
    m_max: Option<usize>,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(clap::Args)]
struct ThetaArgs {
    #[arg(long)]
    lattice: String,
    /// Highest q-power to expand.
    #[arg(long)]
    m_max: usize,
    /// Degree of a seeded random harmonic weight (0 = unweighted).
    #[arg(long, default_value_t = 0)]
    degree: u32,
    /// Seed for the sampled weight.
    #[arg(long, default_value_t = 0, conflicts_with = "weight")]
    seed: u64,
    /// JSON file holding an explicit polynomial weight.
    #[arg(long, conflicts_with = "degree")]
    weight: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(clap::Args)]
struct StrengthArgs {
    #[arg(long)]
    lattice: String,
    /// Shell index or inclusive range: 7 or 1..1000.
    #[arg(long)]
    m: String,
    /// Largest degree to certify (odd degrees are implicit members).
    #[arg(long)]
    max_degree: u32,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(clap::Args)]
struct ScanArgs {
    #[arg(long, value_enum)]
    criterion: Criterion,
    #[arg(long)]
    m_max: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct DesignArgs {
    /// CSV of points: either a shell file with metadata comments or bare
    /// integer coordinate rows.
    #[arg(long)]
    points: PathBuf,
    /// Comma-separated degrees to check, e.g. 2,4,6,8,10.
    #[arg(long)]
    degrees: String,
    #[arg(long, value_enum, default_value_t = MethodArg::Both)]
    method: MethodArg,
    /// Common denominator of bare coordinate rows.
    #[arg(long, default_value_t = 1)]
    denom: i64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct TablesArgs {
    /// Only the rank table.
    #[arg(long)]
    dimension: bool,
    /// Only the cardinality table.
    #[arg(long)]
    cardinality: bool,
    /// Restrict both tables to one lattice.
    #[arg(long)]
    lattice: Option<String>,
    /// Cap the rank table at this degree.
    #[arg(long)]
    lmax: Option<u32>,
    /// Cap the cardinality table at this shell index (at most 9).
    #[arg(long)]
    m_max: Option<usize>,
    /// Directory for dimension-table.csv and cardinality-table.csv
    /// (default: print to stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct CongruenceArgs {
    /// Largest prime to check.
    #[arg(long, default_value_t = 10_000)]
    p_max: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Jsonl,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    #[value(name = "harmonic-sum")]
    HarmonicSum,
    #[value(name = "kernel-sum")]
    KernelSum,
    Both,
}

impl From<MethodArg> for DesignMethod {
    fn from(m: MethodArg) -> DesignMethod {
        match m {
            MethodArg::HarmonicSum => DesignMethod::HarmonicSum,
            MethodArg::KernelSum => DesignMethod::KernelSum,
            MethodArg::Both => DesignMethod::Both,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Criterion {
    /// Search for zeros of the binary newform coefficients.
    #[value(name = "tau2-nonvanishing", alias = "tau2")]
    Tau2Nonvanishing,
    /// Degree-12 convolution sums of the weight-12 cusp coefficients.
    #[value(name = "tau-convolution", alias = "leech-degree12-convolution")]
    TauConvolution,
    /// Degree-8 convolution sums of the binary newform coefficients.
    #[value(name = "tau2-convolution", alias = "bw16-degree8-convolution")]
    Tau2Convolution,
    /// Dual-route check: degree-6 sums on quaternary shells against the
    /// binary newform.
    #[value(name = "quaternary-sextic")]
    QuaternarySextic,
    /// Dual-route check: degree-8 sums on unimodular octonary shells
    /// against the weight-12 cusp form.
    #[value(name = "octonary-octic")]
    OctonaryOctic,
    /// Congruence-certified prime non-vanishing region.
    #[value(name = "prime-nonvanishing")]
    PrimeNonvanishing,
}

/// A failed run: usage or environment problems exit 1, values that
/// contradict an expectation exit 2.
enum Failure {
    Usage(String),
    Mismatch(String),
}

impl From<shellharm::Error> for Failure {
    fn from(e: shellharm::Error) -> Failure {
        Failure::Usage(e.to_string())
    }
}

fn main() {
    let config = match RunConfig::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match run(config) {
        Ok(()) => {}
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(1);
        }
        Err(Failure::Mismatch(msg)) => {
            eprintln!("mismatch: {msg}");
            std::process::exit(2);
        }
    }
}

fn run(config: RunConfig) -> Result<(), Failure> {
    if let Some(n) = config.threads {
        if n == 0 {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(format!("thread pool: {e}")))?;
    }
    let cache = config.cache_dir;
    match config.command {
        Command::Shells(args) => cmd_shells(args),
        Command::Theta(args) => cmd_theta(args),
        Command::Strength(args) => cmd_strength(args, cache.as_deref()),
        Command::Scan(args) => cmd_scan(args),
        Command::Design(args) => cmd_design(args),
        Command::Tables(args) => cmd_tables(args),
        Command::Congruence(args) => cmd_congruence(args),
    }
}

fn emit(out: Option<&Path>, content: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, content)
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn pretty(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("JSON serialization");
    text.push('\n');
    text
}

fn jsonl(lines: impl IntoIterator<Item = Value>) -> String {
    let mut out = String::new();
    for line in lines {
        let _ = writeln!(out, "{line}");
    }
    out
}

fn named_lattice(name: &str) -> Result<LatticeSpec, Failure> {
    Ok(LatticeSpec::by_name(name)?)
}

fn positive(value: usize, flag: &str) -> Result<(), Failure> {
    if value == 0 {
        return Err(Failure::Usage(format!("{flag} must be at least 1")));
    }
    Ok(())
}

fn cmd_shells(args: ShellsArgs) -> Result<(), Failure> {
    let lattice = named_lattice(&args.lattice)?;
    match (args.two_m, args.m_max) {
        (Some(two_m), None) => {
            if two_m < 1 {
                return Err(Failure::Usage("--two-m must be at least 1".into()));
            }
            let shell = enumerate_shell(&lattice, two_m)?;
            let content = match args.format {
                Format::Csv => shell.to_csv(),
                Format::Json => pretty(&json!({
                    "lattice": lattice.name(),
                    "twoM": two_m,
                    "points": shell.points.iter().map(|p| json!(p.coords)).collect::<Vec<_>>(),
                })),
                Format::Jsonl => jsonl(shell.points.iter().map(|p| {
                    json!({"coords": p.coords, "norm2Scaled": p.norm2_scaled})
                })),
            };
            emit(args.out.as_deref(), &content)
        }
        (None, Some(m_max)) => {
            positive(m_max, "--m-max")?;
            let rows: Vec<(usize, i64, u64)> = (1..=m_max)
                .map(|m| {
                    let norm = if lattice.is_even() { 2 * m as i64 } else { m as i64 };
                    count_shell(&lattice, norm).map(|n| (m, norm, n))
                })
                .collect::<shellharm::Result<_>>()?;
            let content = match args.format {
                Format::Csv => {
                    let mut out = String::from("m,twoM,points\n");
                    for (m, norm, n) in &rows {
                        let _ = writeln!(out, "{m},{norm},{n}");
                    }
                    out
                }
                Format::Json => pretty(&json!({
                    "lattice": lattice.name(),
                    "rows": rows
                        .iter()
                        .map(|(m, norm, n)| json!({"m": m, "twoM": norm, "points": n}))
                        .collect::<Vec<_>>(),
                })),
                Format::Jsonl => jsonl(
                    rows.iter()
                        .map(|(m, norm, n)| json!({"m": m, "twoM": norm, "points": n})),
                ),
            };
            emit(args.out.as_deref(), &content)
        }
        _ => Err(Failure::Usage(
            "exactly one of --two-m or --m-max is required".into(),
        )),
    }
}

fn cmd_theta(args: ThetaArgs) -> Result<(), Failure> {
    let lattice = named_lattice(&args.lattice)?;
    positive(args.m_max, "--m-max")?;
    let weight = match (&args.weight, args.degree) {
        (Some(path), _) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            let value: Value = serde_json::from_str(&text)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            let poly = Polynomial::from_json(&value)?;
            if poly.dim() != lattice.dim() {
                return Err(Failure::Usage(format!(
                    "weight has {} variables, lattice {} has {}",
                    poly.dim(),
                    lattice.name(),
                    lattice.dim()
                )));
            }
            Weight::Dense(poly)
        }
        (None, 0) => Weight::one(lattice.dim()),
        (None, l) => match lattice.model() {
            LatticeModel::Gram(g) => {
                let metric = Metric::from_gram(g);
                Weight::Dense(shellharm::harmonics::random_harmonic_in(
                    &metric, l, args.seed,
                ))
            }
            model => {
                let with_alt = matches!(model, LatticeModel::DoubledE8);
                match invariant::random_harmonic(lattice.dim(), l, args.seed, with_alt) {
                    Some(p) => Weight::PowerSum(p),
                    None => {
                        return Err(Failure::Usage(format!(
                            "every degree-{l} harmonic sums to zero on {} shells by symmetry; \
                             supply an explicit --weight",
                            lattice.name()
                        )))
                    }
                }
            }
        },
    };
    let theta = weighted_theta(&lattice, &weight, args.m_max)?;
    let content = match args.format {
        Format::Json => pretty(&json!({
            "weight": weight.to_json(),
            "theta": theta.to_json(),
        })),
        Format::Jsonl => jsonl((0..=args.m_max).map(|m| {
            json!({"m": m, "coefficient": theta.coefficient(m).expect("in range").to_string()})
        })),
        Format::Csv => {
            let mut out = String::from("m,coefficient\n");
            for m in 0..=args.m_max {
                let _ = writeln!(out, "{m},{}", theta.coefficient(m).expect("in range"));
            }
            out
        }
    };
    emit(args.out.as_deref(), &content)
}

fn parse_m_range(text: &str) -> Result<(usize, usize, bool), Failure> {
    let bad = || Failure::Usage(format!("--m expects an index or range like 1..1000, got {text:?}"));
    if let Some((a, b)) = text.split_once("..") {
        let lo: usize = a.trim().parse().map_err(|_| bad())?;
        let hi: usize = b.trim().parse().map_err(|_| bad())?;
        if lo < 1 || hi < lo {
            return Err(Failure::Usage(format!(
                "--m range must satisfy 1 <= lo <= hi, got {text}"
            )));
        }
        Ok((lo, hi, true))
    } else {
        let m: usize = text.trim().parse().map_err(|_| bad())?;
        positive(m, "--m")?;
        Ok((m, m, false))
    }
}

fn cmd_strength(args: StrengthArgs, cache: Option<&Path>) -> Result<(), Failure> {
    let lattice = named_lattice(&args.lattice)?;
    if args.max_degree == 0 {
        return Err(Failure::Usage("--max-degree must be at least 1".into()));
    }
    let (lo, hi, ranged) = parse_m_range(&args.m)?;
    if !ranged {
        if args.format != Format::Json {
            return Err(Failure::Usage(
                "single-shell strength reports are JSON only".into(),
            ));
        }
        let report = strength_upto(&lattice, lo, args.max_degree)?;
        return emit(args.out.as_deref(), &pretty(&report.to_json()));
    }
    let table = strength_scan(&lattice, hi, args.max_degree, cache)?;
    let rows: Vec<Value> = table
        .rows
        .iter()
        .filter(|r| r.m >= lo)
        .map(|r| r.to_json())
        .collect();
    let content = match args.format {
        Format::Json => {
            let mut value = table.to_json();
            value["rows"] = json!(rows);
            pretty(&value)
        }
        Format::Jsonl => {
            let mut header = table.to_json();
            header.as_object_mut().expect("object").remove("rows");
            jsonl(std::iter::once(header).chain(rows))
        }
        Format::Csv => {
            let mut out = String::from("m,empty,memberDegrees,inconclusiveDegrees\n");
            for row in table.rows.iter().filter(|r| r.m >= lo) {
                let joined = |v: &[u32]| {
                    v.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("|")
                };
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    row.m,
                    row.empty,
                    joined(&row.member_degrees),
                    joined(&row.inconclusive)
                );
            }
            out
        }
    };
    emit(args.out.as_deref(), &content)
}

fn cmd_scan(args: ScanArgs) -> Result<(), Failure> {
    positive(args.m_max, "--m-max")?;
    let (value, ok, label) = match args.criterion {
        Criterion::Tau2Nonvanishing => {
            let r = tau2_nonvanishing_scan(args.m_max);
            (r.to_json(), r.ok(), r.criterion)
        }
        Criterion::TauConvolution => {
            if args.m_max < 2 {
                return Err(Failure::Usage("convolution scans need --m-max >= 2".into()));
            }
            let (r, _) = convolution_criteria(args.m_max)?;
            (r.to_json(), r.ok(), r.criterion)
        }
        Criterion::Tau2Convolution => {
            if args.m_max < 2 {
                return Err(Failure::Usage("convolution scans need --m-max >= 2".into()));
            }
            let (_, r) = convolution_criteria(args.m_max)?;
            (r.to_json(), r.ok(), r.criterion)
        }
        Criterion::QuaternarySextic => {
            let r = quaternary_sextic_check(args.m_max)?;
            (r.to_json(), r.ok(), r.criterion)
        }
        Criterion::OctonaryOctic => {
            let r = octonary_octic_check(args.m_max)?;
            (r.to_json(), r.ok(), r.criterion)
        }
        Criterion::PrimeNonvanishing => {
            if args.m_max < 3 {
                return Err(Failure::Usage(
                    "prime scans need --m-max >= 3".into(),
                ));
            }
            let r = prime_nonvanishing_region(args.m_max);
            (r.to_json(), r.ok(), "prime-nonvanishing".to_string())
        }
    };
    emit(args.out.as_deref(), &pretty(&value))?;
    if !ok {
        return Err(Failure::Mismatch(format!(
            "criterion {label} found unexpected zeros or disagreements"
        )));
    }
    Ok(())
}

fn parse_degrees(text: &str) -> Result<Vec<u32>, Failure> {
    let mut degrees = Vec::new();
    for part in text.split(',') {
        let l: u32 = part
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("bad degree list entry {part:?}")))?;
        if l == 0 {
            return Err(Failure::Usage("design degrees must be at least 1".into()));
        }
        degrees.push(l);
    }
    Ok(degrees)
}

fn cmd_design(args: DesignArgs) -> Result<(), Failure> {
    let text = fs::read_to_string(&args.points)
        .map_err(|e| Failure::Usage(format!("{}: {e}", args.points.display())))?;
    let has_metadata = text
        .lines()
        .find(|l| !l.trim().is_empty())
        .is_some_and(|l| l.trim_start().starts_with('#'));
    let set = if has_metadata {
        let shell = Shell::from_csv(&text)?;
        PointSet::from_shell(&shell)?
    } else {
        let mut rows = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('x') {
                continue;
            }
            let coords: Result<Vec<i64>, _> =
                line.split(',').map(|t| t.trim().parse::<i64>()).collect();
            rows.push(coords.map_err(|_| Failure::Usage(format!("bad point row {line:?}")))?);
        }
        PointSet::new(rows, args.denom)?
    };
    let degrees = parse_degrees(&args.degrees)?;
    let verdict = designs::verify_design(&set, &degrees, args.method.into())?;
    let mut value = verdict.to_json();
    value["pointCount"] = json!(set.len());
    value["dim"] = json!(set.dim());
    value["antipodal"] = json!(designs::is_antipodal(&set));
    emit(args.out.as_deref(), &pretty(&value))
}

fn table_filter<'a>(lattice: Option<&'a str>) -> Result<Option<&'a str>, Failure> {
    match lattice {
        None => Ok(None),
        Some(name) if DIMENSION_ROWS.iter().any(|(n, _)| *n == name) => Ok(Some(name)),
        Some(name) => Err(Failure::Usage(format!(
            "tables cover D4, D6, D8, E6, E8; got {name}"
        ))),
    }
}

fn cmd_tables(args: TablesArgs) -> Result<(), Failure> {
    let want_dimension = args.dimension || !args.cardinality;
    let want_cardinality = args.cardinality || !args.dimension;
    let filter = table_filter(args.lattice.as_deref())?;
    if let Some(l) = args.lmax {
        if l < 2 {
            return Err(Failure::Usage("--lmax must be at least 2".into()));
        }
    }
    let m_cap = match args.m_max {
        None => 9,
        Some(m) => {
            if m < 1 || m > 9 {
                return Err(Failure::Usage(
                    "reference cardinalities cover m = 1..=9".into(),
                ));
            }
            m
        }
    };
    let mut mismatches = Vec::new();
    let mut outputs: Vec<(&str, String)> = Vec::new();
    if want_dimension {
        let mut csv = String::from("# table=dimension\nlattice,degree,rank,stabilized,expected,match\n");
        for (name, row) in DIMENSION_ROWS {
            if filter.is_some_and(|f| f != *name) {
                continue;
            }
            let lattice = named_lattice(name)?;
            for (i, &expected) in row.iter().enumerate() {
                let l = 2 * (i as u32 + 1);
                if args.lmax.is_some_and(|cap| l > cap) {
                    break;
                }
                let report = image_rank(&lattice, l, None, None, Some(expected))?;
                let ok = report.rank_lower_bound == expected && report.stabilized;
                let _ = writeln!(
                    csv,
                    "{name},{l},{},{},{expected},{ok}",
                    report.rank_lower_bound, report.stabilized
                );
                if !ok {
                    mismatches.push(format!(
                        "dimension {name} degree {l}: computed {} (stabilized {}), expected {expected}",
                        report.rank_lower_bound, report.stabilized
                    ));
                }
            }
        }
        outputs.push(("dimension-table.csv", csv));
    }
    if want_cardinality {
        let mut csv = String::from("# table=cardinality\nlattice,m,points,expected,match\n");
        for (name, row) in CARDINALITY_ROWS {
            if filter.is_some_and(|f| f != *name) {
                continue;
            }
            let lattice = named_lattice(name)?;
            for (i, &expected) in row.iter().take(m_cap).enumerate() {
                let m = i as i64 + 1;
                let count = count_shell(&lattice, 2 * m)?;
                let ok = count == expected;
                let _ = writeln!(csv, "{name},{m},{count},{expected},{ok}");
                if !ok {
                    mismatches.push(format!(
                        "cardinality {name} m={m}: computed {count}, expected {expected}"
                    ));
                }
            }
        }
        outputs.push(("cardinality-table.csv", csv));
    }
    match &args.out {
        Some(dir) => {
            fs::create_dir_all(dir)
                .map_err(|e| Failure::Usage(format!("{}: {e}", dir.display())))?;
            for (file, csv) in &outputs {
                let path = dir.join(file);
                fs::write(&path, csv)
                    .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            }
        }
        None => {
            for (_, csv) in &outputs {
                print!("{csv}");
            }
        }
    }
    if !mismatches.is_empty() {
        for line in &mismatches {
            eprintln!("{line}");
        }
        return Err(Failure::Mismatch(format!(
            "{} table cell(s) differ from the reference values",
            mismatches.len()
        )));
    }
    Ok(())
}

fn cmd_congruence(args: CongruenceArgs) -> Result<(), Failure> {
    if args.p_max < 3 {
        return Err(Failure::Usage("--p-max must be at least 3".into()));
    }
    let report = congruence_certificate(args.p_max)?;
    emit(args.out.as_deref(), &pretty(&report.to_json()))?;
    if !report.ok() {
        return Err(Failure::Mismatch(
            "congruence violations or rederivation failures found".into(),
        ));
    }
    Ok(())
}
