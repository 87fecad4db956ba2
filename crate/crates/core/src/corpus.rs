//! Named formulas and proof scripts.
//!
//! The catalogue lives in `corpus/manifest.toml` next to the scripts it
//! names; both are embedded at build time. [`run_corpus`] re-derives every
//! recorded verdict and re-checks every script.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decide::{decide, Verdict};
use crate::parser::{
    format_formula, parse_deduction_claim, parse_deduction_script, parse_formula,
    parse_proof_script, parse_sequent, parse_sequent_script,
};
use crate::proof::{check_proof, expand_definitions, is_cpl_tautology, Basis, CheckReport};
use crate::semantics::ModelClass;
use crate::sequent::{check_sequent_proof, check_smiley_deduction};
use crate::syntax::Formula;
use crate::systems::SystemId;

include!(concat!(env!("OUT_DIR"), "/corpus_files.rs"));

pub const MANIFEST: &str = "manifest.toml";

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("manifest: {0}")]
    Manifest(#[from] toml::de::Error),
    #[error("missing corpus file `{0}`")]
    MissingFile(String),
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expected {
    Valid,
    Countermodel,
}

impl Expected {
    fn of(v: &Verdict) -> Expected {
        if v.is_valid() {
            Expected::Valid
        } else {
            Expected::Countermodel
        }
    }
}

impl fmt::Display for Expected {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Expected::Valid => "valid",
            Expected::Countermodel => "countermodel",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MoodKind {
    /// Valid without existential import.
    Plain,
    /// Valid only when terms are nonempty.
    Existential,
}

/// One catalogue entry. Exactly one of `formula`, `sequent` and
/// `deduction` is set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusEntry {
    pub name: String,
    /// Catalogue group, 1 to 7.
    pub group: u8,
    pub formula: Option<String>,
    pub sequent: Option<String>,
    pub deduction: Option<String>,
    /// Verdict per model-class key.
    #[serde(default)]
    pub expect: BTreeMap<String, Expected>,
    /// `"ai"` or `"kai"`: decide the formula after rewriting to that basis.
    pub expand: Option<String>,
    pub mood: Option<MoodKind>,
    pub system: Option<String>,
    pub script: Option<String>,
    /// The same thesis derived once generically and then instantiated by
    /// the substitution rule.
    pub sub_script: Option<String>,
    pub sequent_script: Option<String>,
    pub deduction_script: Option<String>,
    /// Hilbert script for the implication of the sequent.
    pub bridge: Option<String>,
    /// A system in which no corpus script may derive this formula.
    pub nonthesis: Option<String>,
    pub note: Option<String>,
}

impl CorpusEntry {
    pub fn parsed_formula(&self) -> Option<Formula> {
        self.formula.as_deref().and_then(|t| parse_formula(t).ok())
    }

    pub fn system_id(&self) -> Option<SystemId> {
        self.system.as_deref().and_then(|s| s.parse().ok())
    }
}

#[derive(Debug, Deserialize)]
struct Manifest {
    entry: Vec<CorpusEntry>,
}

#[derive(Debug, Clone)]
pub struct Corpus {
    pub entries: Vec<CorpusEntry>,
    files: BTreeMap<String, String>,
}

impl Corpus {
    /// The catalogue shipped with the crate.
    pub fn embedded() -> &'static Corpus {
        static CORPUS: OnceLock<Corpus> = OnceLock::new();
        CORPUS.get_or_init(|| {
            let files = CORPUS_FILES
                .iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect();
            Corpus::from_files(files).expect("embedded corpus is well formed")
        })
    }

    /// `files` maps paths relative to the corpus root to contents and
    /// must include the manifest.
    pub fn from_files(files: BTreeMap<String, String>) -> Result<Corpus, CorpusError> {
        let manifest = files
            .get(MANIFEST)
            .ok_or_else(|| CorpusError::MissingFile(MANIFEST.into()))?;
        let parsed: Manifest = toml::from_str(manifest)?;
        Ok(Corpus {
            entries: parsed.entry,
            files,
        })
    }

    /// Reads a corpus directory laid out like the embedded one.
    pub fn load(dir: &Path) -> Result<Corpus, CorpusError> {
        let mut files = BTreeMap::new();
        let mut stack = vec![dir.to_path_buf()];
        while let Some(d) = stack.pop() {
            let io = |source| CorpusError::Io {
                path: d.display().to_string(),
                source,
            };
            for item in std::fs::read_dir(&d).map_err(io)? {
                let path = item.map_err(io)?.path();
                if path.is_dir() {
                    stack.push(path);
                    continue;
                }
                let text = std::fs::read_to_string(&path).map_err(|source| CorpusError::Io {
                    path: path.display().to_string(),
                    source,
                })?;
                let rel = path
                    .strip_prefix(dir)
                    .expect("walked below root")
                    .to_string_lossy()
                    .replace('\\', "/");
                files.insert(rel, text);
            }
        }
        Corpus::from_files(files)
    }

    pub fn file(&self, path: &str) -> Option<&str> {
        self.files.get(path).map(String::as_str)
    }

    pub fn files(&self) -> impl Iterator<Item = (&str, &str)> {
        self.files.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn entry(&self, name: &str) -> Option<&CorpusEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn group(&self, group: u8) -> impl Iterator<Item = &CorpusEntry> {
        self.entries.iter().filter(move |e| e.group == group)
    }

    /// Hilbert scripts with their system, including substitution variants
    /// and bridge partners.
    pub fn hilbert_scripts(&self) -> Vec<(SystemId, &str)> {
        let mut out = Vec::new();
        for e in &self.entries {
            if let Some(sys) = e.system_id() {
                for path in [&e.script, &e.sub_script].into_iter().flatten() {
                    out.push((sys, path.as_str()));
                }
            }
        }
        out
    }
}

pub fn corpus_entries() -> &'static [CorpusEntry] {
    &Corpus::embedded().entries
}

/// Which entries to run.
#[derive(Debug, Clone, Default)]
pub struct Selection {
    pub group: Option<u8>,
    pub names: Option<Vec<String>>,
}

impl Selection {
    pub fn all() -> Selection {
        Selection::default()
    }

    pub fn group(group: u8) -> Selection {
        Selection {
            group: Some(group),
            names: None,
        }
    }

    fn admits(&self, e: &CorpusEntry) -> bool {
        self.group.is_none_or(|g| g == e.group)
            && self.names.as_ref().is_none_or(|ns| ns.contains(&e.name))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub check: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntryResult {
    pub name: String,
    pub group: u8,
    pub checks: Vec<CheckOutcome>,
}

impl EntryResult {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub entry: String,
    pub check: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusReport {
    pub results: Vec<EntryResult>,
}

impl CorpusReport {
    pub fn mismatches(&self) -> Vec<Mismatch> {
        self.results
            .iter()
            .flat_map(|r| {
                r.checks.iter().filter(|c| !c.ok).map(|c| Mismatch {
                    entry: r.name.clone(),
                    check: c.check.clone(),
                    detail: c.detail.clone(),
                })
            })
            .collect()
    }

    pub fn all_ok(&self) -> bool {
        self.results.iter().all(EntryResult::ok)
    }

    pub fn check_count(&self) -> usize {
        self.results.iter().map(|r| r.checks.len()).sum()
    }
}

struct Checks(Vec<CheckOutcome>);

impl Checks {
    fn push(&mut self, check: impl Into<String>, outcome: Result<(), String>) {
        let (ok, detail) = match outcome {
            Ok(()) => (true, String::new()),
            Err(d) => (false, d),
        };
        self.0.push(CheckOutcome {
            check: check.into(),
            ok,
            detail,
        });
    }
}

fn report_result(r: &CheckReport) -> Result<(), String> {
    match &r.first_failure {
        None if r.accepted => Ok(()),
        Some(f) => Err(format!("rejected at line {}: {}", f.line, f.reason)),
        None => Err("rejected".into()),
    }
}

fn decide_expect(f: &Formula, class: ModelClass, want: Expected) -> Result<(), String> {
    let got = decide(f, class).map_err(|e| e.to_string())?;
    if Expected::of(&got) == want {
        Ok(())
    } else {
        Err(format!("expected {want}, decided {}", Expected::of(&got)))
    }
}

fn file<'a>(corpus: &'a Corpus, path: &str) -> Result<&'a str, String> {
    corpus
        .file(path)
        .ok_or_else(|| format!("missing file `{path}`"))
}

/// Checks a Hilbert script and returns its conclusion.
fn hilbert(
    corpus: &Corpus,
    sys: SystemId,
    path: &str,
    substitution: bool,
) -> Result<Formula, String> {
    let script = parse_proof_script(file(corpus, path)?).map_err(|e| format!("{path}: {e}"))?;
    let spec = sys.spec().with_substitution_rule(substitution);
    report_result(&check_proof(&spec, &script))?;
    script
        .conclusion()
        .cloned()
        .ok_or_else(|| format!("{path}: empty script"))
}

fn same_formula(got: &Formula, want: &Formula) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!(
            "concludes `{}`, expected `{}`",
            format_formula(got),
            format_formula(want)
        ))
    }
}

fn run_entry(corpus: &Corpus, e: &CorpusEntry, conclusions: &[(SystemId, Formula)]) -> EntryResult {
    let mut checks = Checks(Vec::new());
    let kinds = [&e.formula, &e.sequent, &e.deduction]
        .iter()
        .filter(|k| k.is_some())
        .count();
    if kinds != 1 {
        checks.push(
            "shape",
            Err(format!("{kinds} statement fields, expected 1")),
        );
    }

    if let Some(text) = &e.formula {
        match parse_formula(text) {
            Err(err) => checks.push("parse", Err(err.to_string())),
            Ok(f) => formula_checks(corpus, e, &f, conclusions, &mut checks),
        }
    }
    if let Some(text) = &e.sequent {
        match parse_sequent(text) {
            Err(err) => checks.push("parse", Err(err.to_string())),
            Ok(claim) => {
                if let Some(path) = &e.sequent_script {
                    let outcome = file(corpus, path).and_then(|t| {
                        let script =
                            parse_sequent_script(t).map_err(|err| format!("{path}: {err}"))?;
                        report_result(&check_sequent_proof(&script))?;
                        match script.conclusion() {
                            Some(c) if *c == claim => Ok(()),
                            Some(c) => Err(format!("concludes `{c}`, expected `{claim}`")),
                            None => Err("empty script".into()),
                        }
                    });
                    checks.push("sequent script", outcome);
                }
                checks.push(
                    "traditional soundness",
                    decide_expect(
                        &claim.implication(),
                        ModelClass::Traditional,
                        Expected::Valid,
                    ),
                );
                if let Some(path) = &e.bridge {
                    let outcome = hilbert(corpus, SystemId::Luk, path, true).and_then(|g| {
                        let iff = g.clone().iff(claim.implication());
                        match is_cpl_tautology(&iff) {
                            Ok(true) => Ok(()),
                            Ok(false) => Err(format!(
                                "`{}` is not equivalent to the sequent implication",
                                format_formula(&g)
                            )),
                            Err(err) => Err(err.to_string()),
                        }
                    });
                    checks.push("bridge", outcome);
                }
            }
        }
    }
    if let Some(text) = &e.deduction {
        match parse_deduction_claim(text) {
            Err(err) => checks.push("parse", Err(err.to_string())),
            Ok(claim) => {
                if let Some(path) = &e.deduction_script {
                    let outcome = file(corpus, path).and_then(|t| {
                        let script =
                            parse_deduction_script(t).map_err(|err| format!("{path}: {err}"))?;
                        report_result(&check_smiley_deduction(&script))?;
                        match script.conclusion() {
                            Some(c) if *c == claim => Ok(()),
                            Some(_) => Err("conclusion differs from the entry".into()),
                            None => Err("empty script".into()),
                        }
                    });
                    checks.push("deduction script", outcome);
                }
                checks.push(
                    "traditional soundness",
                    decide_expect(
                        &claim.implication(),
                        ModelClass::Traditional,
                        Expected::Valid,
                    ),
                );
            }
        }
    }

    EntryResult {
        name: e.name.clone(),
        group: e.group,
        checks: checks.0,
    }
}

fn formula_checks(
    corpus: &Corpus,
    e: &CorpusEntry,
    f: &Formula,
    conclusions: &[(SystemId, Formula)],
    checks: &mut Checks,
) {
    let decided = match e.expand.as_deref() {
        None => Ok(f.clone()),
        Some("ai") => Ok(expand_definitions(f, Basis::Ai)),
        Some("kai") => Ok(expand_definitions(f, Basis::Kai)),
        Some(other) => Err(format!("unknown basis `{other}`")),
    };
    let decided = match decided {
        Ok(d) => d,
        Err(msg) => return checks.push("expand", Err(msg)),
    };
    for (key, want) in &e.expect {
        let outcome = key
            .parse::<ModelClass>()
            .and_then(|c| decide_expect(&decided, c, *want));
        checks.push(format!("decide {key}"), outcome);
    }
    if e.mood == Some(MoodKind::Existential) {
        let outcome = match decide(&decided, ModelClass::All) {
            Ok(Verdict::Countermodel(m)) => {
                if m.denotations().any(|(_, d)| d.is_empty()) {
                    Ok(())
                } else {
                    Err("countermodel has no empty term".into())
                }
            }
            Ok(Verdict::Valid) => Err("valid in all models".into()),
            Err(err) => Err(err.to_string()),
        };
        checks.push("empty-term countermodel", outcome);
    }

    let sys = match &e.system {
        None => None,
        Some(key) => match key.parse::<SystemId>() {
            Ok(s) => Some(s),
            Err(msg) => {
                checks.push("system", Err(msg));
                None
            }
        },
    };
    if let (Some(sys), Some(path)) = (sys, &e.script) {
        checks.push(
            "script",
            hilbert(corpus, sys, path, true).and_then(|g| same_formula(&g, f)),
        );
        for class in sys.spec().model_classes {
            checks.push(
                format!("soundness {}", class.key()),
                decide_expect(f, class, Expected::Valid),
            );
        }
        if let Some(sub) = &e.sub_script {
            checks.push(
                "script without substitution rule",
                hilbert(corpus, sys, path, false).and_then(|g| same_formula(&g, f)),
            );
            checks.push(
                "substitution script",
                hilbert(corpus, sys, sub, true).and_then(|g| same_formula(&g, f)),
            );
            let blocked = match hilbert(corpus, sys, sub, false) {
                Ok(_) => Err("accepted with the substitution rule off".into()),
                Err(_) => Ok(()),
            };
            checks.push("substitution script needs the rule", blocked);
        }
    }
    if let Some(key) = &e.nonthesis {
        let outcome = match key.parse::<SystemId>() {
            Err(msg) => Err(msg),
            Ok(target) => match conclusions.iter().find(|(s, g)| *s == target && g == f) {
                Some(_) => Err(format!("a {key} script derives it")),
                None => Ok(()),
            },
        };
        checks.push("not derived", outcome);
    }
}

pub fn run_corpus(corpus: &Corpus, selection: &Selection) -> CorpusReport {
    let needs_conclusions = corpus
        .entries
        .iter()
        .any(|e| selection.admits(e) && e.nonthesis.is_some());
    let conclusions: Vec<(SystemId, Formula)> = if needs_conclusions {
        corpus
            .hilbert_scripts()
            .into_iter()
            .filter_map(|(sys, path)| {
                let script = parse_proof_script(corpus.file(path)?).ok()?;
                Some((sys, script.conclusion()?.clone()))
            })
            .collect()
    } else {
        Vec::new()
    };
    let results = corpus
        .entries
        .iter()
        .filter(|e| selection.admits(e))
        .map(|e| run_entry(corpus, e, &conclusions))
        .collect();
    CorpusReport { results }
}
