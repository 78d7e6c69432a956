use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use etg2::exprdsl::{enumerate, kula, q2, qp, quasi_pythagorean, EnumeratedExpr};
use etg2::quadext::QuadExt;
use etg2::verify::{check_h90, iso_key, isomorphic, run_suite, Report};
use etg2::{decompose, extend, parse, synthesize, BitVec, Error, Expr, RadicalClass, SquareClassStructure};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "etg2", version, about = "Square-class models of elementary-type pro-2 Galois groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Worker threads.
    #[arg(long, global = true, env = "ETG2_JOBS")]
    jobs: Option<usize>,

    /// Include wall-clock timings in reports (makes output nondeterministic).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Structure, radical, classification and rigid elements.
    Inspect { expr: String },
    /// Split off the free part.
    Decompose { expr: String },
    /// The quadratic extension at a nonzero class.
    Extend {
        expr: String,
        /// Class to adjoin a square root of, as a bit string.
        #[arg(value_name = "BITS", conflicts_with = "a_flag", required_unless_present = "a_flag")]
        a: Option<String>,
        #[arg(long = "a", value_name = "BITS")]
        a_flag: Option<String>,
    },
    /// Radical Hilbert 90 at one class or at every nonzero class.
    H90 {
        expr: String,
        #[arg(long = "a", value_name = "BITS", conflicts_with = "all", required_unless_present = "all")]
        a: Option<String>,
        #[arg(long)]
        all: bool,
    },
    /// Catalog of canonical expressions up to `--dmax` generators.
    Enumerate {
        #[arg(long, default_value_t = 2)]
        dmax: usize,
        /// Run the full invariant suite on every row.
        #[arg(long, value_enum, default_value_t = CheckMode::None)]
        check: CheckMode,
    },
    /// Expression of a named family.
    Family {
        #[command(subcommand)]
        family: Family,
    },
}

#[derive(Subcommand)]
enum Family {
    /// F(k) * GR(n, F(k)).
    Kula { k: usize, n: usize },
    /// F(r) * C2 * … * C2 with s real-closed factors.
    Quasipyth { r: usize, s: usize },
    /// The 2-adic numbers.
    Q2,
    /// Q_p for an odd prime p.
    Qp { p: usize },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CheckMode {
    None,
    All,
}

/// Usage and input errors exit with 2, failed checks with 1.
enum Failure {
    Usage(String),
    Violation,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<String, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("etg2: cannot set up {n} workers: {e}");
            return ExitCode::from(2);
        }
    }
    let format = cli.format;
    let result = match &cli.command {
        Command::Inspect { expr } => inspect(expr, format.unwrap_or(Format::Json)),
        Command::Decompose { expr } => cmd_decompose(expr, format.unwrap_or(Format::Json)),
        Command::Extend { expr, a, a_flag } => {
            cmd_extend(expr, a.as_ref().or(a_flag.as_ref()).unwrap(), format.unwrap_or(Format::Json))
        }
        Command::H90 { expr, a, all } => h90(expr, a.as_deref(), *all, cli.timing, format.unwrap_or(Format::Json)),
        Command::Enumerate { dmax, check } => cmd_enumerate(*dmax, *check, cli.timing, format.unwrap_or(Format::Csv)),
        Command::Family { family } => cmd_family(family),
    };
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Violation) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("etg2: {msg}");
            ExitCode::from(2)
        }
    }
}

fn json(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn no_csv(cmd: &str) -> Failure {
    Failure::Usage(format!("{cmd} has no csv output"))
}

fn load(text: &str) -> Result<(Expr, SquareClassStructure), Failure> {
    let expr = parse(text)?;
    let s = synthesize(&expr)?;
    Ok((expr, s))
}

fn parse_class(bits: &str, s: &SquareClassStructure) -> Result<BitVec, Failure> {
    let a: BitVec = bits
        .parse()
        .map_err(|e| Failure::Usage(format!("bad class {bits:?}: {e}")))?;
    if a.width() != s.n() {
        return Err(Failure::Usage(format!(
            "class {bits} has {} coordinates but the structure has {}",
            a.width(),
            s.n()
        )));
    }
    Ok(a)
}

#[derive(Serialize)]
struct Inspection<'a> {
    expr: String,
    structure: &'a SquareClassStructure,
    radical: etg2::Subspace,
    #[serde(rename = "radicalDim")]
    radical_dim: usize,
    class: RadicalClass,
    rigid: Vec<BitVec>,
}

fn inspect(text: &str, format: Format) -> Outcome {
    let (expr, s) = load(text)?;
    let radical = s.radical();
    let view = Inspection {
        expr: expr.to_string(),
        structure: &s,
        radical_dim: radical.dim(),
        radical,
        class: s.classify(),
        rigid: s.rigid_elements(),
    };
    match format {
        Format::Json => Ok(json(&view)),
        Format::Csv => Err(no_csv("inspect")),
        Format::Text => {
            let mut out = String::new();
            let rows = |vs: &[BitVec]| vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
            writeln!(out, "expr     {}", view.expr).unwrap();
            writeln!(out, "n        {}", s.n()).unwrap();
            writeln!(out, "e        {}", s.e()).unwrap();
            writeln!(out, "bDim     {}", s.b_dim()).unwrap();
            for (i, row) in s.gram().iter().enumerate() {
                writeln!(out, "gram[{i}]  {}", rows(row)).unwrap();
            }
            writeln!(out, "radical  dim {} [{}]", view.radical_dim, rows(view.radical.basis())).unwrap();
            writeln!(out, "class    {}", view.class).unwrap();
            writeln!(out, "rigid    [{}]", rows(&view.rigid)).unwrap();
            Ok(out)
        }
    }
}

fn cmd_decompose(text: &str, format: Format) -> Outcome {
    let (expr, _) = load(text)?;
    let nf = decompose(&expr)?;
    match format {
        Format::Json => Ok(json(&nf)),
        Format::Csv => Err(no_csv("decompose")),
        Format::Text => Ok(format!(
            "freeRank {}\neFree    {}\nH        {}\n",
            nf.free_rank,
            nf.e_free,
            nf.h.map_or("-".to_string(), |h| h.to_string())
        )),
    }
}

fn cmd_extend(text: &str, bits: &str, format: Format) -> Outcome {
    let (expr, s) = load(text)?;
    let a = parse_class(bits, &s)?;
    let q = extend(&expr, &a)?;
    match format {
        Format::Json => Ok(json(&q)),
        Format::Csv => Err(no_csv("extend")),
        Format::Text => Ok(extension_text(&q)),
    }
}

fn extension_text(q: &QuadExt) -> String {
    let cols = |m: &etg2::LinMap| m.columns().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ");
    let mut out = String::new();
    writeln!(out, "E_F    {}", q.expr_f()).unwrap();
    writeln!(out, "a      {}", q.a()).unwrap();
    writeln!(out, "E_K    {}", q.expr_k_canonical()).unwrap();
    writeln!(out, "iota   {}", cols(q.iota())).unwrap();
    writeln!(out, "norm   {}", cols(q.norm())).unwrap();
    writeln!(out, "sigma  {}", cols(q.sigma())).unwrap();
    for entry in q.atom_log() {
        writeln!(
            out,
            "log    {:?} {} [{}] -> {}",
            entry.case, entry.factor, entry.component, entry.result
        )
        .unwrap();
    }
    out
}

fn report_text(out: &mut String, r: &Report) {
    let a = r.subject.a.map(|a| format!(" a={a}")).unwrap_or_default();
    writeln!(
        out,
        "{} {}{a}",
        if r.passed() { "PASS" } else { "FAIL" },
        r.subject.expr
    )
    .unwrap();
    for c in r.failures() {
        writeln!(out, "  {}: {}", c.name, c.witness.as_deref().unwrap_or("")).unwrap();
    }
}

fn h90(text: &str, bits: Option<&str>, all: bool, timing: bool, format: Format) -> Outcome {
    let (expr, s) = load(text)?;
    let classes: Vec<BitVec> = if all {
        BitVec::all(s.n()).skip(1).collect()
    } else {
        vec![parse_class(bits.expect("clap requires --a or --all"), &s)?]
    };
    let reports: Vec<Report> = classes
        .par_iter()
        .map(|a| {
            let start = std::time::Instant::now();
            let mut r = check_h90(&extend(&expr, a)?);
            if timing {
                r.timing_ms = Some(start.elapsed().as_millis() as u64);
            }
            Ok(r)
        })
        .collect::<Result<_, Error>>()?;
    let passed = reports.iter().all(Report::passed);
    let out = match format {
        Format::Json if all => json(&reports),
        Format::Json => json(&reports[0]),
        Format::Csv => return Err(no_csv("h90")),
        Format::Text => {
            let mut out = String::new();
            for r in &reports {
                report_text(&mut out, r);
            }
            writeln!(out, "{} of {} cases pass", reports.iter().filter(|r| r.passed()).count(), reports.len()).unwrap();
            out
        }
    };
    if passed {
        Ok(out)
    } else {
        print!("{out}");
        Err(Failure::Violation)
    }
}

#[derive(Serialize)]
struct Row {
    expression: String,
    n: usize,
    class: RadicalClass,
    #[serde(rename = "radicalDim")]
    radical_dim: usize,
    verdict: &'static str,
}

#[derive(Serialize)]
struct Summary {
    total: usize,
    #[serde(rename = "byClass")]
    by_class: BTreeMap<String, usize>,
    /// Isomorphism classes of structures across all shapes.
    #[serde(rename = "structureClasses")]
    structure_classes: usize,
    failures: usize,
}

#[derive(Serialize)]
struct Catalog {
    rows: Vec<Row>,
    summary: Summary,
}

fn structure_classes(items: &[EnumeratedExpr]) -> Result<usize, Error> {
    let mut by_key: BTreeMap<_, Vec<&SquareClassStructure>> = BTreeMap::new();
    for it in items {
        by_key.entry(iso_key(&it.structure)).or_default().push(&it.structure);
    }
    let groups: Vec<Vec<&SquareClassStructure>> = by_key.into_values().collect();
    let counts: Vec<usize> = groups
        .par_iter()
        .map(|group| {
            let mut reps: Vec<&SquareClassStructure> = Vec::new();
            for s in group {
                let mut seen = false;
                for r in &reps {
                    if isomorphic(r, s)?.is_some() {
                        seen = true;
                        break;
                    }
                }
                if !seen {
                    reps.push(s);
                }
            }
            Ok(reps.len())
        })
        .collect::<Result<_, Error>>()?;
    Ok(counts.iter().sum())
}

fn cmd_enumerate(dmax: usize, check: CheckMode, timing: bool, format: Format) -> Outcome {
    let start = std::time::Instant::now();
    let items = enumerate(dmax)?;
    let progress = dmax >= 5 && check == CheckMode::All;
    let done = std::sync::atomic::AtomicUsize::new(0);
    let verdicts: Vec<&'static str> = items
        .par_iter()
        .map(|it| {
            if check == CheckMode::None {
                return Ok("unchecked");
            }
            let r = run_suite(&it.expr)?;
            if progress {
                let k = done.fetch_add(1, std::sync::atomic::Ordering::Relaxed) + 1;
                if k.is_multiple_of(50) || k == items.len() {
                    eprintln!("etg2: checked {k}/{}", items.len());
                }
            }
            Ok(if r.passed() { "pass" } else { "fail" })
        })
        .collect::<Result<_, Error>>()?;
    let rows: Vec<Row> = items
        .iter()
        .zip(&verdicts)
        .map(|(it, v)| Row {
            expression: it.expr.to_string(),
            n: it.structure.n(),
            class: it.structure.classify(),
            radical_dim: it.structure.radical().dim(),
            verdict: v,
        })
        .collect();
    let mut by_class = BTreeMap::new();
    for r in &rows {
        *by_class.entry(r.class.to_string()).or_insert(0) += 1;
    }
    let summary = Summary {
        total: rows.len(),
        by_class,
        structure_classes: structure_classes(&items)?,
        failures: verdicts.iter().filter(|v| **v == "fail").count(),
    };
    let failures = summary.failures;
    let mut out = String::new();
    match format {
        Format::Json => out = json(&Catalog { rows, summary }),
        Format::Csv => {
            out.push_str("expression,n,class,dim_radical,verdict\n");
            for r in &rows {
                writeln!(out, "\"{}\",{},{},{},{}", r.expression, r.n, r.class, r.radical_dim, r.verdict).unwrap();
            }
            write_summary(&mut out, &summary, "# ");
        }
        Format::Text => {
            let width = rows.iter().map(|r| r.expression.len()).max().unwrap_or(0);
            for r in &rows {
                writeln!(
                    out,
                    "{:<width$}  n={}  {:<15}  rad={}  {}",
                    r.expression, r.n, r.class, r.radical_dim, r.verdict
                )
                .unwrap();
            }
            write_summary(&mut out, &summary, "");
        }
    }
    if timing {
        writeln!(out, "# elapsed_ms {}", start.elapsed().as_millis()).unwrap();
    }
    if failures == 0 {
        Ok(out)
    } else {
        print!("{out}");
        Err(Failure::Violation)
    }
}

fn write_summary(out: &mut String, s: &Summary, prefix: &str) {
    writeln!(out, "{prefix}total {}", s.total).unwrap();
    for (class, count) in &s.by_class {
        writeln!(out, "{prefix}{class} {count}").unwrap();
    }
    writeln!(out, "{prefix}structure classes {}", s.structure_classes).unwrap();
    writeln!(out, "{prefix}failures {}", s.failures).unwrap();
}

fn cmd_family(family: &Family) -> Outcome {
    let expr = match family {
        Family::Kula { k, n } => kula(*k, *n)?,
        Family::Quasipyth { r, s } => quasi_pythagorean(*r, *s)?,
        Family::Q2 => q2(),
        Family::Qp { p } => qp(*p)?,
    };
    Ok(format!("{expr}\n"))
}
