use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use namecalc::corpus::{run_corpus, Corpus, Selection};
use namecalc::decide::{decide, oracle_decide, Verdict};
use namecalc::parser::{
    format_model, parse_deduction_script, parse_formula, parse_model, parse_proof_script,
    parse_sequent_script, ParseError,
};
use namecalc::proof::{check_proof, expand_definitions, Basis, CheckReport};
use namecalc::representation::{
    atomic_disagreements, canonical_model, represent, verify_structure, AlgebraKind,
    CanonicalMethod, CanonicalSystem, Point, RelationalStructure,
};
use namecalc::semantics::{eval, ModelClass};
use namecalc::sequent::{check_sequent_proof, check_smiley_deduction};
use namecalc::syntax::{Formula, NameLetter};
use namecalc::systems::SystemId;

const JSON_VERSION: u32 = 1;

#[derive(Parser)]
#[command(
    name = "namecalc",
    version,
    about = "Decide, evaluate and check formulas of the calculi of names"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Machine-readable output.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Decide validity over a model class.
    Decide {
        /// Formula text, or @FILE.
        formula: String,
        #[arg(long, value_enum)]
        class: ClassArg,
        /// Use the brute-force oracle up to this universe size instead.
        #[arg(long, value_name = "N")]
        oracle: Option<usize>,
        #[command(flatten)]
        out: Output,
    },
    /// Evaluate a formula in a model.
    Eval {
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
        formula: String,
        #[command(flatten)]
        out: Output,
    },
    /// Check a Hilbert-style proof script.
    Check {
        #[arg(long)]
        system: String,
        file: PathBuf,
        /// Disable the substitution rule.
        #[arg(long)]
        no_sub: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Check a sequent proof script.
    SequentCheck {
        file: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Check a Smiley-style deduction.
    SmileyCheck {
        file: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Build the canonical model of a model's atomic diagram.
    Canonical {
        #[arg(long, value_enum)]
        system: SystemArg,
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
        /// Comma-separated vocabulary; defaults to the model's letters.
        #[arg(long)]
        vocab: Option<String>,
        #[command(flatten)]
        out: Output,
    },
    /// Verify a relational structure and represent it by sets.
    Represent {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, value_name = "FILE")]
        structure: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Rewrite defined functors into a primitive basis.
    Translate {
        #[arg(long, value_enum)]
        to: BasisArg,
        formula: String,
        #[command(flatten)]
        out: Output,
    },
    /// Work with the bundled corpus.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Subcommand)]
enum CorpusAction {
    /// Re-derive every verdict and re-check every script.
    Run {
        /// Catalogue group (1-7).
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=7))]
        section: Option<u8>,
        /// Read the corpus from a directory instead of the bundled copy.
        #[arg(long, value_name = "DIR")]
        dir: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassArg {
    All,
    Trad,
    Poly,
    Nonmono,
}

impl From<ClassArg> for ModelClass {
    fn from(c: ClassArg) -> ModelClass {
        match c {
            ClassArg::All => ModelClass::All,
            ClassArg::Trad => ModelClass::Traditional,
            ClassArg::Poly => ModelClass::Polyreferential,
            ClassArg::Nonmono => ModelClass::NonMonoreferential,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SystemArg {
    Sh,
    Luk,
    Shis,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Filters,
    Pairs,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    B1,
    B3,
    C,
}

#[derive(Clone, Copy, ValueEnum)]
enum BasisArg {
    Ai,
    Kai,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Inline text, or the contents of FILE for `@FILE`.
fn formula_text(arg: &str) -> Result<String> {
    match arg.strip_prefix('@') {
        Some(path) => Ok(read(Path::new(path))?.trim().to_string()),
        None => Ok(arg.to_string()),
    }
}

fn diagnose(text: &str, e: &ParseError) -> anyhow::Error {
    let (line_start, line) = text
        .split_inclusive('\n')
        .scan(0, |start, l| {
            let here = *start;
            *start += l.len();
            Some((here, l))
        })
        .find(|(start, l)| e.span.start < start + l.len().max(1))
        .unwrap_or((0, text));
    let col = e.span.start.saturating_sub(line_start);
    let width = e.span.end.saturating_sub(e.span.start).max(1);
    anyhow!(
        "{}\n  {}\n  {}{}",
        e.kind,
        line.trim_end(),
        " ".repeat(col),
        "^".repeat(width)
    )
}

fn formula_arg(arg: &str) -> Result<Formula> {
    let text = formula_text(arg)?;
    parse_formula(&text).map_err(|e| diagnose(&text, &e))
}

fn model_value(m: &namecalc::semantics::Model) -> Value {
    serde_json::from_str(&format_model(m)).expect("model JSON is well formed")
}

fn print_json(v: Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(&v).expect("JSON value serializes")
    );
}

fn run(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Decide {
            formula,
            class,
            oracle,
            out,
        } => {
            let f = formula_arg(&formula)?;
            let class = ModelClass::from(class);
            let verdict = match oracle {
                Some(n) => oracle_decide(&f, class, n)?,
                None => decide(&f, class)?,
            };
            if out.json {
                print_json(json!({
                    "version": JSON_VERSION,
                    "formula": f.to_string(),
                    "class": class.key(),
                    "verdict": if verdict.is_valid() { "valid" } else { "countermodel" },
                    "countermodel": verdict.countermodel().map(model_value),
                }));
            } else {
                match &verdict {
                    Verdict::Valid => println!("VALID"),
                    Verdict::Countermodel(m) => {
                        println!("COUNTERMODEL");
                        println!("{}", format_model(m));
                    }
                }
            }
            Ok(verdict.is_valid())
        }
        Command::Eval {
            model,
            formula,
            out,
        } => {
            let text = read(&model)?;
            let m = parse_model(&text).map_err(|e| diagnose(&text, &e))?;
            let f = formula_arg(&formula)?;
            let value = eval(&m, &f);
            if out.json {
                print_json(
                    json!({"version": JSON_VERSION, "formula": f.to_string(), "value": value}),
                );
            } else {
                println!("{}", if value { "TRUE" } else { "FALSE" });
            }
            Ok(value)
        }
        Command::Check {
            system,
            file,
            no_sub,
            out,
        } => {
            let sys: SystemId = system.parse().map_err(|e: String| anyhow!(e))?;
            let text = read(&file)?;
            let script = parse_proof_script(&text).map_err(|e| diagnose(&text, &e))?;
            let spec = sys.spec().with_substitution_rule(!no_sub);
            let report = check_proof(&spec, &script);
            let conclusion = script.conclusion().map(ToString::to_string);
            Ok(print_report(&report, conclusion, out.json))
        }
        Command::SequentCheck { file, out } => {
            let text = read(&file)?;
            let script = parse_sequent_script(&text).map_err(|e| diagnose(&text, &e))?;
            let report = check_sequent_proof(&script);
            let conclusion = script.conclusion().map(ToString::to_string);
            Ok(print_report(&report, conclusion, out.json))
        }
        Command::SmileyCheck { file, out } => {
            let text = read(&file)?;
            let script = parse_deduction_script(&text).map_err(|e| diagnose(&text, &e))?;
            let report = check_smiley_deduction(&script);
            let conclusion = script.conclusion().map(namecalc::sequent::show_claim);
            Ok(print_report(&report, conclusion, out.json))
        }
        Command::Canonical {
            system,
            method,
            model,
            vocab,
            out,
        } => canonical(system, method, &model, vocab.as_deref(), out.json),
        Command::Represent {
            kind,
            structure,
            out,
        } => represent_cmd(kind, &structure, out.json),
        Command::Translate { to, formula, out } => {
            let f = formula_arg(&formula)?;
            let basis = match to {
                BasisArg::Ai => Basis::Ai,
                BasisArg::Kai => Basis::Kai,
            };
            let g = expand_definitions(&f, basis);
            if out.json {
                print_json(
                    json!({"version": JSON_VERSION, "formula": f.to_string(), "translation": g.to_string()}),
                );
            } else {
                println!("{g}");
            }
            Ok(true)
        }
        Command::Corpus {
            action: CorpusAction::Run { section, dir, out },
        } => corpus_run(section, dir.as_deref(), out.json),
    }
}

fn print_report(report: &CheckReport, conclusion: Option<String>, as_json: bool) -> bool {
    if as_json {
        let expansions: Vec<Value> = report
            .expansions
            .iter()
            .map(|x| json!({"line": x.line, "rule": x.rule, "steps": x.steps}))
            .collect();
        print_json(json!({
            "version": JSON_VERSION,
            "accepted": report.accepted,
            "conclusion": conclusion,
            "failure": report.first_failure.as_ref().map(|f| json!({"line": f.line, "reason": f.reason})),
            "expansions": expansions,
        }));
    } else if report.accepted {
        println!("ACCEPTED");
        if let Some(c) = conclusion {
            println!("{c}");
        }
        for x in &report.expansions {
            println!(
                "line {} ({}) expands to {} steps",
                x.line,
                x.rule,
                x.steps.len()
            );
        }
    } else {
        match &report.first_failure {
            Some(f) => println!("REJECTED at {f}"),
            None => println!("REJECTED"),
        }
    }
    report.accepted
}

fn canonical(
    system: SystemArg,
    method: MethodArg,
    path: &Path,
    vocab: Option<&str>,
    as_json: bool,
) -> Result<bool> {
    let text = read(path)?;
    let m = parse_model(&text).map_err(|e| diagnose(&text, &e))?;
    let vocab: BTreeSet<NameLetter> = match vocab {
        Some(list) => list
            .split(',')
            .map(|s| {
                NameLetter::new(s.trim()).map_err(|e| anyhow!("invalid name letter `{}`", e.0))
            })
            .collect::<Result<_>>()?,
        None => m.denotations().map(|(l, _)| l.clone()).collect(),
    };
    if vocab.is_empty() {
        bail!("empty vocabulary: the model denotes no letters and --vocab was not given");
    }
    let sys = match system {
        SystemArg::Sh => CanonicalSystem::Sh,
        SystemArg::Luk => CanonicalSystem::Luk,
        SystemArg::Shis => CanonicalSystem::Shis,
    };
    let method = match method {
        MethodArg::Filters => CanonicalMethod::Filters,
        MethodArg::Pairs => CanonicalMethod::Pairs,
    };
    let canon = canonical_model(&m, &vocab, sys, method)?;
    let bad = atomic_disagreements(&m, &canon, &vocab, sys.functors());
    let checked = sys.functors().len() * vocab.len() * vocab.len();
    if as_json {
        print_json(json!({
            "version": JSON_VERSION,
            "system": sys.key(),
            "method": method.key(),
            "canonical": model_value(&canon),
            "atoms_checked": checked,
            "disagreements": bad.iter().map(ToString::to_string).collect::<Vec<_>>(),
        }));
    } else {
        println!("{}", format_model(&canon));
        if bad.is_empty() {
            println!("agreement: {checked}/{checked} atoms");
        } else {
            println!("agreement: {}/{checked} atoms", checked - bad.len());
            for f in &bad {
                println!("  differs: {f}");
            }
        }
    }
    Ok(bad.is_empty())
}

fn point_label(s: &RelationalStructure, p: &Point) -> String {
    match p {
        Point::Set(set) => format!("{{{}}}", set.names(s).collect::<Vec<_>>().join(",")),
        Point::Element(x) => format!("*{}", s.carrier()[*x]),
    }
}

fn represent_cmd(kind: KindArg, path: &Path, as_json: bool) -> Result<bool> {
    let kind = match kind {
        KindArg::B1 => AlgebraKind::B1,
        KindArg::B3 => AlgebraKind::B3,
        KindArg::C => AlgebraKind::C,
    };
    let s = RelationalStructure::from_json(&read(path)?)?;
    let violations = verify_structure(&s, kind);
    if !violations.is_empty() {
        if as_json {
            print_json(json!({
                "version": JSON_VERSION,
                "kind": kind.key(),
                "violations": violations.iter().map(|v| json!({"condition": v.condition, "witness": v.witness})).collect::<Vec<_>>(),
            }));
        } else {
            println!("NOT A {} STRUCTURE", kind.key().to_uppercase());
            for v in &violations {
                println!("  {v}");
            }
        }
        return Ok(false);
    }
    let rep = represent(&s, kind)?;
    let image: Vec<(String, Vec<String>)> = rep
        .image
        .iter()
        .enumerate()
        .map(|(a, e)| {
            (
                s.carrier()[a].clone(),
                e.iter().map(|p| point_label(&s, p)).collect(),
            )
        })
        .collect();
    if as_json {
        print_json(json!({
            "version": JSON_VERSION,
            "kind": kind.key(),
            "image": image.iter().map(|(a, e)| json!({"element": a, "points": e})).collect::<Vec<_>>(),
            "mismatches": rep.report.mismatches.iter().map(|m| json!({"property": m.property, "witness": m.witness})).collect::<Vec<_>>(),
        }));
    } else {
        for (a, e) in &image {
            println!("{a} -> {{{}}}", e.join(", "));
        }
        if rep.report.holds() {
            println!("REPRESENTED");
        } else {
            for m in &rep.report.mismatches {
                println!("  fails {}: {}", m.property, m.witness.join(", "));
            }
        }
    }
    Ok(rep.report.holds())
}

fn corpus_run(section: Option<u8>, dir: Option<&Path>, as_json: bool) -> Result<bool> {
    let loaded;
    let corpus = match dir {
        Some(d) => {
            loaded = Corpus::load(d)?;
            &loaded
        }
        None => Corpus::embedded(),
    };
    let selection = Selection {
        group: section,
        names: None,
    };
    let report = run_corpus(corpus, &selection);
    let mismatches = report.mismatches();
    if as_json {
        print_json(json!({
            "version": JSON_VERSION,
            "entries": report.results.len(),
            "checks": report.check_count(),
            "results": report.results,
            "mismatches": mismatches,
        }));
    } else {
        println!("{:<5} {:<3} {:<40} checks", "", "grp", "entry");
        for r in &report.results {
            let status = if r.ok() { "ok" } else { "FAIL" };
            println!(
                "{status:<5} {:<3} {:<40} {}",
                r.group,
                r.name,
                r.checks.len()
            );
        }
        for m in &mismatches {
            println!("mismatch: {} [{}]: {}", m.entry, m.check, m.detail);
        }
        println!(
            "{} entries, {} checks, {} mismatches",
            report.results.len(),
            report.check_count(),
            mismatches.len()
        );
    }
    Ok(mismatches.is_empty())
}
