//! `matfact`: verify factorizations, compute Hom tables and equivariant
//! structures, and run the demo suite.
//!
//! Exit codes: 0 when everything passed with certified results, 2 when it
//! passed but some result is window-truncated, 1 on any failure.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use matfact::action::GroupAction;
use matfact::equivariant::{enumerate_structures, EquivariantStructure};
use matfact::homotopy::{hom_space, HomReport};
use matfact::singcat::{cok, cok_g, stable_hom, stable_hom_equivariant, two_periodicity_check};
use matfact::suite::{run_demo, twisted_tables};
use matfact::workspace::Workspace;
use matfact::Field;

#[derive(Parser)]
#[command(name = "matfact", version, about = "Exact computations with matrix factorizations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Print JSON instead of tables.
    #[arg(long, global = true)]
    json: bool,
    /// Coefficient field: `q` for the rationals or `p:PRIME`.
    #[arg(long, global = true, value_name = "q|p:PRIME")]
    field: Option<Field>,
}

#[derive(Subcommand)]
enum Command {
    /// Check every factorization and structure of a workspace.
    Verify { file: PathBuf },
    /// Morphism spaces Hom(SRC, TGT[shift]) in the homotopy category.
    Hom {
        file: PathBuf,
        source: String,
        target: String,
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
        shift: u8,
        /// Largest degree to compute; required for ungraded objects, where it
        /// bounds the total degree of matrix entries.
        #[arg(long)]
        window: Option<i64>,
        /// Treat SRC and TGT as equivariant structures and print one table
        /// per character twist of the target.
        #[arg(long)]
        equivariant: bool,
    },
    /// All equivariant structures on a factorization under the workspace action.
    Structures { file: PathBuf, name: String },
    /// The cokernel module of a factorization, its two-periodic resolution
    /// and, with `--target`, stable Hom into another cokernel.
    Cok {
        file: PathBuf,
        name: String,
        #[arg(long)]
        target: Option<String>,
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
        shift: u8,
        #[arg(long)]
        window: Option<i64>,
        #[arg(long)]
        equivariant: bool,
    },
    /// Run a demo: an, fermat, brick or cone-axioms.
    Demo {
        name: String,
        #[arg(long)]
        n: Option<u32>,
        /// Write the workspace and the report into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// What a command produced: the report and whether it is fully certified.
struct Outcome {
    json: Value,
    text: String,
    status: Status,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Status {
    Certified,
    Truncated,
    Failed,
}

impl Status {
    fn code(self) -> u8 {
        match self {
            Status::Certified => 0,
            Status::Truncated => 2,
            Status::Failed => 1,
        }
    }

    fn from_certified(c: bool) -> Status {
        if c {
            Status::Certified
        } else {
            Status::Truncated
        }
    }
}

fn main() -> ExitCode {
    // usage errors exit with 1; clap's own code 2 means "truncated" here
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(out) => {
            let body = if cli.json {
                format!("{}\n", serde_json::to_string_pretty(&out.json).expect("serializable"))
            } else {
                out.text
            };
            // a closed pipe (`| head`) is not an error worth a panic
            let _ = std::io::stdout().write_all(body.as_bytes());
            ExitCode::from(out.status.code())
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn load(path: &Path, field: Option<Field>, verify: bool) -> anyhow::Result<Workspace> {
    let src = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let ws = if verify { Workspace::load(&src) } else { Workspace::load_unverified(&src) }
        .with_context(|| format!("loading {}", path.display()))?;
    Ok(match field {
        Some(f) => ws.change_field(f)?,
        None => ws,
    })
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    match &cli.command {
        Command::Verify { file } => verify(file, cli.field),
        Command::Hom { file, source, target, shift, window, equivariant } => {
            let ws = load(file, cli.field, true)?;
            hom(&ws, source, target, *shift, *window, *equivariant)
        }
        Command::Structures { file, name } => {
            let ws = load(file, cli.field, true)?;
            structures(&ws, name)
        }
        Command::Cok { file, name, target, shift, window, equivariant } => {
            let ws = load(file, cli.field, true)?;
            cokernel(&ws, name, target.as_deref(), *shift, *window, *equivariant)
        }
        Command::Demo { name, n, out } => demo(name, *n, out.as_deref()),
    }
}

fn verify(file: &Path, field: Option<Field>) -> anyhow::Result<Outcome> {
    let ws = load(file, field, false)?;
    let reports = ws.verify_all();
    let mut text = String::new();
    let mut status = Status::Certified;
    for r in &reports {
        if r.ok {
            writeln!(text, "ok    {} {}", r.kind, r.name)?;
        } else {
            writeln!(text, "FAIL  {} {} (line {})", r.kind, r.name, r.line)?;
            for res in &r.residuals {
                writeln!(text, "      {res}")?;
            }
            status = Status::Failed;
        }
    }
    if status == Status::Failed {
        // the first failure also goes to stderr so scripts see it
        if let Some(r) = reports.iter().find(|r| !r.ok) {
            eprintln!("{} {} (line {}): {}", r.kind, r.name, r.line, r.residuals.first().map_or("", String::as_str));
        }
    }
    Ok(Outcome { json: json!({ "objects": reports, "ok": status != Status::Failed }), text, status })
}

fn table(title: &str, r: &HomReport) -> String {
    let mut s = String::new();
    let flag = if r.certified { "certified" } else { "truncated" };
    let _ = writeln!(s, "{title}  [{flag}]");
    let _ = writeln!(s, "{:>6} {:>6} {:>6} {:>6}", "d", "Z", "B", "H");
    for row in &r.per_degree {
        let _ = writeln!(s, "{:>6} {:>6} {:>6} {:>6}", row.d, row.z, row.b, row.h);
    }
    let _ = writeln!(s, "total {}", r.total);
    s
}

fn shifted(name: &str, shift: u8) -> String {
    if shift == 1 {
        format!("{name}[1]")
    } else {
        name.to_string()
    }
}

#[derive(Serialize)]
struct HomJson<'a> {
    source: &'a str,
    target: &'a str,
    shift: u8,
    #[serde(flatten)]
    report: &'a HomReport,
}

/// Names under `--equivariant`: structures when the workspace has an action,
/// factorizations with the trivial structure otherwise.
fn equivariant_object(ws: &Workspace, name: &str) -> anyhow::Result<EquivariantStructure> {
    if ws.action.is_some() {
        return Ok(ws.structure(name)?.clone());
    }
    let p = ws.factorization(name)?.clone();
    let zero = vec![matfact::action::Character(vec![]); p.rank()];
    Ok(EquivariantStructure::new(p, GroupAction::trivial(ws.nvars), zero.clone(), zero)?)
}

fn hom(ws: &Workspace, src: &str, tgt: &str, shift: u8, window: Option<i64>, equivariant: bool) -> anyhow::Result<Outcome> {
    let title = format!("Hom({src}, {})", shifted(tgt, shift));
    if !equivariant || ws.action.as_ref().map_or(true, GroupAction::is_trivial_group) {
        let p = ws.factorization(src).or_else(|_| ws.structure(src).map(|e| e.base()))?;
        let q = ws.factorization(tgt).or_else(|_| ws.structure(tgt).map(|e| e.base()))?;
        let q = if shift == 1 { q.shift() } else { q.clone() };
        let h = hom_space(p, &q, window)?;
        let report = h.report();
        let json = serde_json::to_value(HomJson { source: src, target: tgt, shift, report: &report })?;
        return Ok(Outcome { text: table(&title, &report), status: Status::from_certified(report.certified), json });
    }
    let e = equivariant_object(ws, src)?;
    let f = equivariant_object(ws, tgt)?;
    let f = if shift == 1 { f.shift() } else { f };
    let tables = twisted_tables(&e, &f, window)?;
    let mut text = String::new();
    let mut certified = true;
    let mut twists = Vec::new();
    for (chi, r) in &tables {
        text.push_str(&table(&format!("Hom^G({src}, {} (x) chi={chi})", shifted(tgt, shift)), r));
        certified &= r.certified;
        twists.push(json!({ "character": chi, "per_degree": r.per_degree, "total": r.total, "certified": r.certified }));
    }
    let json = json!({ "source": src, "target": tgt, "shift": shift, "twists": twists, "certified": certified });
    Ok(Outcome { json, text, status: Status::from_certified(certified) })
}

fn structures(ws: &Workspace, name: &str) -> anyhow::Result<Outcome> {
    let Some(action) = &ws.action else { bail!("the workspace declares no group action") };
    let p = ws.factorization(name)?;
    let en = enumerate_structures(p, action)?;
    let mut text = format!("{} structures on {name} ({} up to twisting)\n", en.structures.len(), en.orbits);
    let mut list = Vec::new();
    for (i, e) in en.structures.iter().enumerate() {
        let c0: Vec<String> = e.chars0().iter().map(|c| c.to_string()).collect();
        let c1: Vec<String> = e.chars1().iter().map(|c| c.to_string()).collect();
        writeln!(text, "  #{i}: chars0 = {}; chars1 = {}", c0.join(" | "), c1.join(" | "))?;
        list.push(json!({ "chars0": e.chars0(), "chars1": e.chars1() }));
    }
    let json = json!({ "factorization": name, "count": en.structures.len(), "orbits": en.orbits, "structures": list });
    Ok(Outcome { json, text, status: Status::Certified })
}

fn cokernel(
    ws: &Workspace,
    name: &str,
    target: Option<&str>,
    shift: u8,
    window: Option<i64>,
    equivariant: bool,
) -> anyhow::Result<Outcome> {
    let (module, p) = if equivariant {
        let e = equivariant_object(ws, name)?;
        (cok_g(&e), e.base().clone())
    } else {
        let p = ws.factorization(name)?.clone();
        (cok(&p), p)
    };
    let report = module.report();
    let mut json = serde_json::to_value(&report)?;
    let mut text = format!("coker of {name}\npresentation         {}\nannihilation witness {}\n", module.presentation, module.annihilation_witness);
    let mut status = Status::Certified;
    if p.is_graded() {
        let per = two_periodicity_check(&p, None)?;
        writeln!(
            text,
            "two-periodic resolution exact in degrees {}..{}: {}",
            per.rows.first().map_or(0, |r| r.degree),
            per.rows.last().map_or(0, |r| r.degree),
            per.all_exact
        )?;
        if !per.all_exact {
            status = Status::Failed;
        }
        json["periodicity"] = serde_json::to_value(&per)?;
    }
    if let Some(t) = target {
        let h = if equivariant {
            stable_hom_equivariant(&equivariant_object(ws, name)?, &equivariant_object(ws, t)?, shift, window)?
        } else {
            stable_hom(&p, ws.factorization(t)?, shift, window)?
        };
        let r = h.hom.report();
        text.push_str(&table(&format!("Hom_Dsg(coker {name}, coker {})", shifted(t, shift)), &r));
        json["per_degree"] = serde_json::to_value(&r.per_degree)?;
        json["total"] = json!(r.total);
        json["certified"] = json!(r.certified);
        if status == Status::Certified && !r.certified {
            status = Status::Truncated;
        }
    }
    Ok(Outcome { json, text, status })
}

fn demo(name: &str, n: Option<u32>, out: Option<&Path>) -> anyhow::Result<Outcome> {
    let d = run_demo(name, n)?;
    let pretty = serde_json::to_string_pretty(&d.report)?;
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(format!("{name}.mf")), d.workspace.to_text())?;
        std::fs::write(dir.join(format!("{name}.json")), format!("{pretty}\n"))?;
    }
    let text = format!("{pretty}\n");
    Ok(Outcome { json: d.report, text, status: Status::from_certified(d.certified) })
}
