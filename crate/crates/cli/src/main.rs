//! `agtool` — command-line front end for the AG-group library.
//!
//! Every subcommand is a thin adapter over `ag_core`: results are identical
//! to the corresponding library calls and no logic lives only here. Exit
//! codes: 0 = success / property holds, 1 = a checked property fails (the
//! report still goes to stdout), 2 = usage or input error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use ag_core::{
    check_all_with, check_with, classify_involutions_with, congruence_from_subalgebra, construct,
    count, find_all, from_module, isomorphic, reference_regression, subalgebras, to_module,
    AbelianGroupType, AgRepresentation, Budget, CayleyTable, CheckLimits, CheckReport,
    ClassifyOptions, Endomorphism, EnumerationResult, InvolutionClassification, Law, ModuleData,
    RegressionMethod, RegressionRow, SearchOptions,
};

#[derive(Parser)]
#[command(
    name = "agtool",
    version,
    about = "Construct, verify, classify and enumerate AG-groups via abelian groups \
             with involutory automorphisms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format for stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Worker threads for parallel library calls (0 = one per core);
    /// results are identical for every value.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    /// RNG seed, consulted only by operations that sample
    /// (`classify --spot-check`); everything else is deterministic.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Largest prime-power order enumeration may attempt.
    #[arg(long, global = true, default_value_t = 128)]
    max_order: u64,

    /// Unlock the stretch orders (128, 243, 256).
    #[arg(long, global = true)]
    stretch: bool,

    /// Node budget for conjugacy searches (default: unlimited).
    #[arg(long, global = true)]
    max_nodes: Option<u64>,

    /// Print timings to stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand)]
enum Command {
    /// Count AG-groups of order n up to isomorphism, split by abelian group type
    Enumerate(EnumerateArgs),
    /// Build the Cayley table of AG(G, phi): a·b = phi(a) + b
    Construct(ConstructArgs),
    /// Check identities and quasigroup axioms on a Cayley table
    Verify(VerifyArgs),
    /// Translate between a Cayley table and its abelian-group module data
    Convert(ConvertArgs),
    /// Decide whether two Cayley tables are isomorphic
    Isomorphic(IsomorphicArgs),
    /// List the subalgebras (and induced congruences) of an AG-group
    Subalgebras(SubalgebrasArgs),
    /// Exhaustively search all AG-groups of a small order, up to isomorphism
    Bruteforce(BruteforceArgs),
    /// Classify the involutory automorphisms of an abelian group up to conjugacy
    Classify(ClassifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum LawArg {
    /// Left invertive law (ab)c = (cb)a
    Ag,
    /// The identity a(bc) = b(ac)
    #[value(name = "ag**", alias = "ag-star-star")]
    AgStarStar,
    /// (ab)(cd) = (ac)(bd)
    Medial,
    /// (ab)(cd) = (db)(ca)
    Paramedial,
    /// Latin-square rows and columns
    Quasigroup,
    /// A unique e with ea = a
    #[value(name = "left-unit", alias = "left_unit")]
    LeftUnit,
    /// Exactly one two-sided inverse per element
    #[value(name = "unique-inverses", alias = "unique_inverses")]
    UniqueInverses,
}

impl From<LawArg> for Law {
    fn from(l: LawArg) -> Law {
        match l {
            LawArg::Ag => Law::Ag,
            LawArg::AgStarStar => Law::AgStarStar,
            LawArg::Medial => Law::Medial,
            LawArg::Paramedial => Law::Paramedial,
            LawArg::Quasigroup => Law::Quasigroup,
            LawArg::LeftUnit => Law::LeftUnit,
            LawArg::UniqueInverses => Law::UniqueInverses,
        }
    }
}

#[derive(Args)]
#[command(group = ArgGroup::new("mode").required(true))]
struct EnumerateArgs {
    /// Order to enumerate.
    #[arg(long, group = "mode")]
    n: Option<u64>,
    /// Check every built-in reference count inside the budget and print a
    /// pass/fail matrix instead.
    #[arg(long = "table-1", group = "mode")]
    table_1: bool,
    /// Attach the involution representative of every class.
    #[arg(long, conflicts_with = "table_1")]
    reps: bool,
}

#[derive(Args)]
#[command(group = ArgGroup::new("source").required(true))]
struct ConstructArgs {
    /// Abelian group type, e.g. Z4xZ2^3.
    #[arg(long)]
    group: Option<String>,
    /// Involution JSON file: {"group": "...", "matrix": [[...], ...]}.
    #[arg(long, group = "source")]
    involution: Option<PathBuf>,
    /// Inline generator-image matrix as JSON rows, e.g. "[[2]]"; needs --group.
    #[arg(long, group = "source", requires = "group")]
    matrix: Option<String>,
}

#[derive(Args)]
#[command(group = ArgGroup::new("which").required(true))]
struct VerifyArgs {
    /// Table file: JSON {"order": n, "table": [[...], ...]} or n lines of n indices.
    #[arg(long)]
    table: PathBuf,
    /// Single law to check.
    #[arg(long, group = "which")]
    law: Option<LawArg>,
    /// Check all seven laws.
    #[arg(long, group = "which")]
    all: bool,
    /// Order cap for the O(n^4) checks (medial, paramedial).
    #[arg(long, default_value_t = 128)]
    quartic_max: usize,
}

#[derive(Args)]
#[command(group = ArgGroup::new("src").required(true))]
struct ConvertArgs {
    /// Table file to reduce to module data.
    #[arg(long, group = "src", requires = "to_module")]
    table: Option<PathBuf>,
    /// Module JSON file {"addition": ..., "phi": [...], "zero": ...} to rebuild from.
    #[arg(long, group = "src", requires = "to_table")]
    module: Option<PathBuf>,
    /// Extract (addition table, phi, zero) from an AG-group table.
    #[arg(long)]
    to_module: bool,
    /// Rebuild the AG-group table a·b = phi(a) + b.
    #[arg(long)]
    to_table: bool,
}

#[derive(Args)]
struct IsomorphicArgs {
    /// First table file.
    #[arg(long)]
    a: PathBuf,
    /// Second table file.
    #[arg(long)]
    b: PathBuf,
}

#[derive(Args)]
struct SubalgebrasArgs {
    /// AG-group table file.
    #[arg(long)]
    table: PathBuf,
    /// Also emit the congruence each subalgebra induces via b⁻¹a ∈ H.
    #[arg(long)]
    congruences: bool,
}

#[derive(Args)]
struct BruteforceArgs {
    /// Table order to search.
    #[arg(long)]
    order: usize,
    /// Disable latin-square pruning (orders ≤ 4): confirms the pruning
    /// loses no models.
    #[arg(long)]
    no_latin_pruning: bool,
    /// Raise the order cap from 6 to 8.
    #[arg(long)]
    extended: bool,
    /// Write each class representative into this directory, as both
    /// table JSON and plain text.
    #[arg(long, value_name = "DIR")]
    emit_tables: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Abelian group type, e.g. Z4xZ2^3.
    #[arg(long)]
    group: String,
    /// Re-verify every fingerprint bucket by conjugator search, even where
    /// buckets are normally trusted.
    #[arg(long)]
    verify_buckets: bool,
    /// Classify N random conjugates of class representatives back into
    /// classes (seeded by --seed); failures exit 1.
    #[arg(long, value_name = "N", default_value_t = 0)]
    spot_check: u64,
}

/// Input or environment failure; always exits 2.
struct InputError(String);

type CliResult = Result<i32, InputError>;

fn bad(e: impl std::fmt::Display) -> InputError {
    InputError(e.to_string())
}

macro_rules! vlog {
    ($cli:expr, $($t:tt)*) => {
        if $cli.verbose > 0 {
            eprintln!($($t)*);
        }
    };
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global() {
            eprintln!("agtool: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(InputError(msg)) => {
            eprintln!("agtool: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> CliResult {
    let budget =
        Budget { max_order: cli.max_order, stretch: cli.stretch, max_nodes: cli.max_nodes };
    match &cli.command {
        Command::Enumerate(a) => cmd_enumerate(cli, a, &budget),
        Command::Construct(a) => cmd_construct(cli, a),
        Command::Verify(a) => cmd_verify(cli, a),
        Command::Convert(a) => cmd_convert(cli, a),
        Command::Isomorphic(a) => cmd_isomorphic(cli, a),
        Command::Subalgebras(a) => cmd_subalgebras(cli, a),
        Command::Bruteforce(a) => cmd_bruteforce(cli, a),
        Command::Classify(a) => cmd_classify(cli, a, &budget),
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<(), InputError> {
    println!("{}", serde_json::to_string_pretty(value).map_err(bad)?);
    Ok(())
}

fn print_csv<R, F, I>(rows: I) -> Result<(), InputError>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = F>,
    F: AsRef<[u8]>,
{
    let mut w = csv::Writer::from_writer(std::io::stdout());
    for row in rows {
        w.write_record(row).map_err(bad)?;
    }
    w.flush().map_err(bad)
}

fn load_table(path: &Path) -> Result<CayleyTable, InputError> {
    let s = fs::read_to_string(path)
        .map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    let parsed = if s.trim_start().starts_with('{') {
        serde_json::from_str(&s).map_err(|e| format!("{}: {e}", path.display()))
    } else {
        CayleyTable::from_text(&s).map_err(|e| format!("{}: {e}", path.display()))
    };
    parsed.map_err(InputError)
}

fn method_name(m: RegressionMethod) -> &'static str {
    match m {
        RegressionMethod::Direct => "direct",
        RegressionMethod::Fastpath => "fastpath",
        RegressionMethod::Skipped => "skipped",
    }
}

fn cmd_enumerate(cli: &Cli, a: &EnumerateArgs, budget: &Budget) -> CliResult {
    if a.table_1 {
        return table_1_regression(cli, budget);
    }
    let n = a.n.expect("clap guarantees one mode");
    let clock = Instant::now();
    let result = count(n, budget, a.reps).map_err(bad)?;
    vlog!(cli, "enumerated order {n} in {:?}", clock.elapsed());
    match cli.format {
        Format::Json => print_json(&result)?,
        Format::Csv => print_enumeration_csv(&result)?,
        Format::Text => print_enumeration_text(&result),
    }
    Ok(0)
}

fn print_enumeration_csv(r: &EnumerationResult) -> Result<(), InputError> {
    if let Some(reps) = &r.representatives {
        let mut rows = vec![vec!["group".to_string(), "class".into(), "matrix".into()]];
        let mut i = 0;
        for gc in &r.per_group {
            for k in 0..gc.classes {
                rows.push(vec![
                    gc.group.to_string(),
                    k.to_string(),
                    serde_json::to_string(reps[i].involution().matrix()).map_err(bad)?,
                ]);
                i += 1;
            }
        }
        print_csv(rows)
    } else {
        let mut rows = vec![vec!["group".to_string(), "classes".into()]];
        rows.extend(
            r.per_group.iter().map(|gc| vec![gc.group.to_string(), gc.classes.to_string()]),
        );
        print_csv(rows)
    }
}

fn print_enumeration_text(r: &EnumerationResult) {
    println!("a({}) = {}", r.n, r.count);
    let mut reps = r.representatives.as_deref().unwrap_or(&[]).iter();
    for gc in &r.per_group {
        println!("  {}: {}", gc.group, gc.classes);
        for _ in 0..gc.classes {
            if let Some(rep) = reps.next() {
                println!(
                    "    {}",
                    serde_json::to_string(rep.involution().matrix()).expect("matrix to json")
                );
            }
        }
    }
}

fn table_1_regression(cli: &Cli, budget: &Budget) -> CliResult {
    let clock = Instant::now();
    let rows = reference_regression(budget);
    vlog!(cli, "regression finished in {:?}", clock.elapsed());
    let failed = rows.iter().filter(|r| r.pass == Some(false)).count();
    match cli.format {
        Format::Json => print_json(&rows)?,
        Format::Csv => {
            let mut out = vec![vec![
                "p".to_string(),
                "d".into(),
                "expected".into(),
                "method".into(),
                "computed".into(),
                "pass".into(),
            ]];
            out.extend(rows.iter().map(|r| {
                vec![
                    r.p.to_string(),
                    r.d.to_string(),
                    r.expected.to_string(),
                    method_name(r.method).to_string(),
                    r.computed.map(|v| v.to_string()).unwrap_or_default(),
                    r.pass.map(|v| v.to_string()).unwrap_or_default(),
                ]
            }));
            print_csv(out)?;
        }
        Format::Text => print_regression_text(&rows),
    }
    Ok(if failed > 0 { 1 } else { 0 })
}

fn print_regression_text(rows: &[RegressionRow]) {
    println!("{:>3} {:>2} {:>9} {:>9} {:>9}  result", "p", "d", "expected", "method", "computed");
    for r in rows {
        let computed = r.computed.map(|v| v.to_string()).unwrap_or_else(|| "-".into());
        let result = match r.pass {
            Some(true) => "pass",
            Some(false) => "FAIL",
            None => "-",
        };
        println!(
            "{:>3} {:>2} {:>9} {:>9} {:>9}  {result}",
            r.p,
            r.d,
            r.expected,
            method_name(r.method),
            computed
        );
    }
}

fn cmd_construct(cli: &Cli, a: &ConstructArgs) -> CliResult {
    let endo = match (&a.involution, &a.matrix) {
        (Some(path), None) => {
            let s = fs::read_to_string(path)
                .map_err(|e| InputError(format!("{}: {e}", path.display())))?;
            let endo: Endomorphism = serde_json::from_str(&s)
                .map_err(|e| InputError(format!("{}: {e}", path.display())))?;
            if let Some(g) = &a.group {
                let want: AbelianGroupType = g.parse().map_err(bad)?;
                if endo.group() != &want {
                    return Err(InputError(format!(
                        "involution file is over {}, but --group asked for {want}",
                        endo.group()
                    )));
                }
            }
            endo
        }
        (None, Some(m)) => {
            let group: AbelianGroupType =
                a.group.as_deref().expect("clap: --matrix requires --group").parse().map_err(bad)?;
            let matrix: Vec<Vec<u64>> = serde_json::from_str(m).map_err(bad)?;
            Endomorphism::new(group, matrix).map_err(bad)?
        }
        _ => unreachable!("clap enforces exactly one source"),
    };
    let rep = AgRepresentation::new(endo).map_err(bad)?;
    let table = construct(&rep).map_err(bad)?;
    print_table(cli, &table)?;
    Ok(0)
}

fn print_table(cli: &Cli, t: &CayleyTable) -> Result<(), InputError> {
    match cli.format {
        Format::Json => print_json(t),
        Format::Csv => {
            print_csv(t.rows().iter().map(|row| {
                row.iter().map(|v| v.to_string()).collect::<Vec<_>>()
            }))
        }
        Format::Text => {
            print!("{}", t.to_text());
            Ok(())
        }
    }
}

fn cmd_verify(cli: &Cli, a: &VerifyArgs) -> CliResult {
    let t = load_table(&a.table)?;
    let limits = CheckLimits { quartic_max: a.quartic_max };
    let clock = Instant::now();
    let reports: Vec<CheckReport> = if a.all {
        check_all_with(&t, &limits).map_err(bad)?
    } else {
        let law: Law = a.law.expect("clap guarantees one mode").into();
        vec![check_with(&t, law, &limits).map_err(bad)?]
    };
    vlog!(cli, "checked {} law(s) in {:?}", reports.len(), clock.elapsed());
    match cli.format {
        Format::Json => print_json(&reports)?,
        Format::Csv => {
            let mut rows = vec![vec!["law".to_string(), "holds".into(), "witness".into()]];
            for r in &reports {
                let witness = match &r.witness {
                    Some(w) => serde_json::to_string(w).map_err(bad)?,
                    None => String::new(),
                };
                rows.push(vec![r.law.name().to_string(), r.holds.to_string(), witness]);
            }
            print_csv(rows)?;
        }
        Format::Text => {
            for r in &reports {
                println!("{r}");
            }
        }
    }
    Ok(if reports.iter().all(|r| r.holds) { 0 } else { 1 })
}

fn cmd_convert(cli: &Cli, a: &ConvertArgs) -> CliResult {
    match (&a.table, &a.module) {
        (Some(path), None) => {
            let t = load_table(path)?;
            let m = to_module(&t).map_err(bad)?;
            match cli.format {
                Format::Json => print_json(&m)?,
                Format::Csv => {
                    let mut rows = vec![vec!["zero".to_string(), m.zero.to_string()]];
                    let mut phi_row = vec!["phi".to_string()];
                    phi_row.extend(m.phi.iter().map(|v| v.to_string()));
                    rows.push(phi_row);
                    for row in m.addition.rows() {
                        let mut r = vec!["addition".to_string()];
                        r.extend(row.iter().map(|v| v.to_string()));
                        rows.push(r);
                    }
                    print_csv(rows)?;
                }
                Format::Text => {
                    println!("zero: {}", m.zero);
                    let phi: Vec<String> = m.phi.iter().map(|v| v.to_string()).collect();
                    println!("phi:  {}", phi.join(" "));
                    println!("addition:");
                    print!("{}", m.addition.to_text());
                }
            }
            Ok(0)
        }
        (None, Some(path)) => {
            let s = fs::read_to_string(path)
                .map_err(|e| InputError(format!("{}: {e}", path.display())))?;
            let m: ModuleData = serde_json::from_str(&s)
                .map_err(|e| InputError(format!("{}: {e}", path.display())))?;
            let t = from_module(&m).map_err(bad)?;
            print_table(cli, &t)?;
            Ok(0)
        }
        _ => unreachable!("clap enforces exactly one source"),
    }
}

#[derive(Serialize)]
struct IsomorphismReport {
    isomorphic: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    map: Option<Vec<usize>>,
}

fn cmd_isomorphic(cli: &Cli, a: &IsomorphicArgs) -> CliResult {
    let t1 = load_table(&a.a)?;
    let t2 = load_table(&a.b)?;
    let clock = Instant::now();
    let map = isomorphic(&t1, &t2);
    vlog!(cli, "isomorphism test in {:?}", clock.elapsed());
    let report = IsomorphismReport { isomorphic: map.is_some(), map };
    match cli.format {
        Format::Json => print_json(&report)?,
        Format::Csv => {
            let map = report
                .map
                .as_ref()
                .map(|m| {
                    m.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
                })
                .unwrap_or_default();
            print_csv([
                vec!["isomorphic".to_string(), "map".into()],
                vec![report.isomorphic.to_string(), map],
            ])?;
        }
        Format::Text => match &report.map {
            Some(m) => println!("isomorphic via {m:?}"),
            None => println!("not isomorphic"),
        },
    }
    Ok(if report.isomorphic { 0 } else { 1 })
}

#[derive(Serialize)]
struct SubalgebraReport {
    subalgebras: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    congruences: Option<Vec<Vec<Vec<usize>>>>,
}

fn cmd_subalgebras(cli: &Cli, a: &SubalgebrasArgs) -> CliResult {
    let t = load_table(&a.table)?;
    let subs = subalgebras(&t).map_err(bad)?;
    let congs = if a.congruences {
        Some(
            subs.iter()
                .map(|h| congruence_from_subalgebra(&t, h))
                .collect::<Result<Vec<_>, _>>()
                .map_err(bad)?,
        )
    } else {
        None
    };
    let report = SubalgebraReport { subalgebras: subs, congruences: congs };
    let join = |xs: &[usize]| {
        xs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
    };
    match cli.format {
        Format::Json => print_json(&report)?,
        Format::Csv => {
            let mut rows =
                vec![vec!["index".to_string(), "size".into(), "elements".into(), "blocks".into()]];
            for (i, h) in report.subalgebras.iter().enumerate() {
                let blocks = report
                    .congruences
                    .as_ref()
                    .map(|cs| {
                        cs[i].iter().map(|b| join(b)).collect::<Vec<_>>().join("|")
                    })
                    .unwrap_or_default();
                rows.push(vec![i.to_string(), h.len().to_string(), join(h), blocks]);
            }
            print_csv(rows)?;
        }
        Format::Text => {
            for (i, h) in report.subalgebras.iter().enumerate() {
                println!("subalgebra {i}: {{{}}}", join(h));
                if let Some(cs) = &report.congruences {
                    let blocks: Vec<String> =
                        cs[i].iter().map(|b| format!("{{{}}}", join(b))).collect();
                    println!("  congruence: {}", blocks.join(" "));
                }
            }
        }
    }
    Ok(0)
}

fn cmd_bruteforce(cli: &Cli, a: &BruteforceArgs) -> CliResult {
    let opts = SearchOptions { extended: a.extended, latin_pruning: !a.no_latin_pruning };
    let (tables, stats) = find_all(a.order, &opts).map_err(bad)?;
    vlog!(cli, "searched order {} in {:?}", a.order, stats.wall);
    if let Some(dir) = &a.emit_tables {
        fs::create_dir_all(dir).map_err(|e| InputError(format!("{}: {e}", dir.display())))?;
        for (i, t) in tables.iter().enumerate() {
            let base = format!("order{}_class{i}", a.order);
            let json = serde_json::to_string_pretty(t).map_err(bad)?;
            fs::write(dir.join(format!("{base}.json")), json + "\n")
                .map_err(|e| InputError(format!("{}: {e}", dir.display())))?;
            fs::write(dir.join(format!("{base}.txt")), t.to_text())
                .map_err(|e| InputError(format!("{}: {e}", dir.display())))?;
        }
        vlog!(cli, "wrote {} tables under {}", tables.len(), dir.display());
    }
    match cli.format {
        Format::Json => print_json(&stats)?,
        Format::Csv => print_csv([
            vec!["order".to_string(), "nodes".into(), "labeled_models".into(), "classes".into()],
            vec![
                stats.order.to_string(),
                stats.nodes.to_string(),
                stats.labeled_models.to_string(),
                stats.classes.to_string(),
            ],
        ])?,
        Format::Text => {
            println!(
                "order {}: {} classes from {} labeled models ({} nodes)",
                stats.order, stats.classes, stats.labeled_models, stats.nodes
            );
            for (i, t) in tables.iter().enumerate() {
                println!("class {i}:");
                print!("{}", t.to_text());
            }
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct SpotCheck {
    samples: u64,
    failures: u64,
    seed: u64,
}

#[derive(Serialize)]
struct ClassifyReport {
    classification: InvolutionClassification,
    #[serde(skip_serializing_if = "Option::is_none")]
    spot_check: Option<SpotCheck>,
}

fn cmd_classify(cli: &Cli, a: &ClassifyArgs, budget: &Budget) -> CliResult {
    let ty: AbelianGroupType = a.group.parse().map_err(bad)?;
    let opts = ClassifyOptions { budget: budget.clone(), verify_buckets: a.verify_buckets };
    let clock = Instant::now();
    let classification = classify_involutions_with(&ty, &opts).map_err(bad)?;
    vlog!(cli, "classified {} in {:?}", ty, clock.elapsed());
    let spot_check = if a.spot_check > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
        let k = classification.classes().len() as u64;
        let mut failures = 0;
        for i in 0..a.spot_check {
            let idx = (i % k) as usize;
            let f = Endomorphism::random_automorphism(&ty, &mut rng);
            let psi = classification.classes()[idx]
                .representative
                .conjugate_by(&f)
                .expect("conjugation by an automorphism");
            if classification.class_of(&psi) != Some(idx) {
                failures += 1;
            }
        }
        Some(SpotCheck { samples: a.spot_check, failures, seed: cli.seed })
    } else {
        None
    };
    let failed = spot_check.as_ref().is_some_and(|s| s.failures > 0);
    let report = ClassifyReport { classification, spot_check };
    match cli.format {
        Format::Json => print_json(&report)?,
        Format::Csv => {
            let mut rows = vec![vec!["class".to_string(), "size".into(), "matrix".into()]];
            for (i, cls) in report.classification.classes().iter().enumerate() {
                rows.push(vec![
                    i.to_string(),
                    cls.size.map(|s| s.to_string()).unwrap_or_else(|| "unknown".into()),
                    serde_json::to_string(cls.representative.matrix()).map_err(bad)?,
                ]);
            }
            print_csv(rows)?;
        }
        Format::Text => {
            let c = &report.classification;
            println!(
                "{}: {} classes among {} involutory automorphisms (method: {:?})",
                c.group(),
                c.classes().len(),
                c.total_involutions(),
                c.method()
            );
            for (i, cls) in c.classes().iter().enumerate() {
                let size = cls
                    .size
                    .map(|s| s.to_string())
                    .unwrap_or_else(|| "unknown".into());
                println!(
                    "  class {i}: size {size}, matrix {}",
                    serde_json::to_string(cls.representative.matrix()).expect("matrix to json")
                );
            }
            if let Some(s) = &report.spot_check {
                println!(
                    "spot-check: {}/{} conjugates classified into their own class",
                    s.samples - s.failures,
                    s.samples
                );
            }
        }
    }
    Ok(if failed { 1 } else { 0 })
}
