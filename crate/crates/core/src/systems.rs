//! Axiom schemas and the registry of axiom systems.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use crate::parser::parse_formula;
use crate::semantics::ModelClass;
use crate::syntax::{is_schema_letter, Formula};

/// A named formula over the reserved schema letters `S`, `P`, `M`, `Q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomSchema {
    pub name: &'static str,
    pub pattern: Formula,
}

const SCHEMA_TABLE: &[(&str, &str)] = &[
    // Łukasiewicz
    ("Ia", "a(S,S)"),
    ("Ii", "i(S,S)"),
    ("Barbara", "(a(M,P) & a(S,M)) -> a(S,P)"),
    ("Datisi", "(a(M,P) & i(M,S)) -> i(S,P)"),
    // Shepherdson
    ("cIi", "i(S,P) -> i(S,S)"),
    ("nES", "~i(S,S) -> a(S,P)"),
    // Słupecki and completions
    ("Ci", "i(P,S) -> i(S,P)"),
    ("kaSi", "ka(S,P) -> i(S,P)"),
    ("kBarbara", "(ka(M,P) & ka(S,M)) -> ka(S,P)"),
    ("kDarii", "(ka(M,P) & i(S,M)) -> i(S,P)"),
    ("kDatisi", "(ka(M,P) & i(M,S)) -> i(S,P)"),
    ("dagger", "i(S,P) -> ka(S,S)"),
    ("ddagger", "ka(S,P) -> i(S,S)"),
    // quantifier-free Ontology
    ("Ish1", "eps(S,P) -> eps(S,S)"),
    ("Ish2", "(eps(M,P) & eps(S,M)) -> eps(S,P)"),
    ("Ish3", "(eps(P,S) & eps(S,M)) -> eps(S,P)"),
    // singular extensions of the weak system
    ("isSa", "eps(S,P) -> a(S,P)"),
    ("isSi", "eps(S,S) -> i(S,S)"),
    ("moje", "a(S,M) & eps(M,M) & i(S,P) -> eps(S,P)"),
    ("epsA", "eps(S,S) & a(S,P) -> eps(S,P)"),
    ("epsI", "eps(S,S) & i(S,P) -> a(S,P)"),
    ("epsUp", "a(S,P) & i(S,S) & eps(P,P) -> eps(S,S)"),
    ("epsIp", "i(S,P) & eps(S,S) -> eps(S,P)"),
    ("epsConv", "a(S,P) & eps(P,S) -> eps(S,S)"),
    // singular extensions of the strong systems
    ("kisSa", "eps(S,P) -> ka(S,P)"),
    ("kmoje", "ka(S,M) & eps(M,M) & i(S,P) -> eps(S,P)"),
    // definitions
    ("dfe", "e(S,P) <-> ~i(S,P)"),
    ("dfo", "o(S,P) <-> ~a(S,P)"),
    ("dfex", "ex(S) <-> i(S,S)"),
    ("dfka", "ka(S,P) <-> ex(S) & a(S,P)"),
    ("dfceq", "ceq(S,P) <-> a(S,P) & a(P,S)"),
    ("dfdeq", "deq(S,P) <-> ka(S,P) & ka(P,S)"),
    ("dfke", "ke(S,P) <-> ex(S) & e(S,P)"),
    ("dfkke", "kke(S,P) <-> ex(S) & ex(P) & e(S,P)"),
    ("dfot", "ot(S,P) <-> ~ka(S,P)"),
    ("dfa", "a(S,P) <-> ~ka(S,S) | ka(S,P)"),
    ("dfneps", "neps(S,P) <-> eps(S,S) & ~eps(S,P)"),
    ("dfideq", "ideq(S,P) <-> eps(S,P) & eps(P,S)"),
];

fn schema_table() -> &'static [AxiomSchema] {
    static TABLE: OnceLock<Vec<AxiomSchema>> = OnceLock::new();
    TABLE.get_or_init(|| {
        SCHEMA_TABLE
            .iter()
            .map(|(name, text)| {
                let pattern = parse_formula(text).expect("schema table entry parses");
                debug_assert!(pattern.letters().iter().all(is_schema_letter));
                AxiomSchema { name, pattern }
            })
            .collect()
    })
}

/// Every schema and definition known to the registry.
pub fn all_schemas() -> &'static [AxiomSchema] {
    schema_table()
}

pub fn schema(name: &str) -> Option<&'static AxiomSchema> {
    schema_table().iter().find(|s| s.name == name)
}

fn schemas(names: &[&str]) -> Vec<AxiomSchema> {
    names
        .iter()
        .map(|n| {
            schema(n)
                .unwrap_or_else(|| panic!("unknown schema {n}"))
                .clone()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SystemId {
    Luk,
    Sh,
    Slu,
    SluA,
    SluB,
    SluC,
    SluD,
    Onto,
    ShisI,
    ShisII,
    ShisIII,
    ShisIV,
    KaisA,
    KaisB,
    KaisC,
    KaisD,
}

impl SystemId {
    pub const ALL: [SystemId; 16] = [
        SystemId::Luk,
        SystemId::Sh,
        SystemId::Slu,
        SystemId::SluA,
        SystemId::SluB,
        SystemId::SluC,
        SystemId::SluD,
        SystemId::Onto,
        SystemId::ShisI,
        SystemId::ShisII,
        SystemId::ShisIII,
        SystemId::ShisIV,
        SystemId::KaisA,
        SystemId::KaisB,
        SystemId::KaisC,
        SystemId::KaisD,
    ];

    /// Command-line / corpus spelling.
    pub fn key(self) -> &'static str {
        match self {
            SystemId::Luk => "luk",
            SystemId::Sh => "sh",
            SystemId::Slu => "slu",
            SystemId::SluA => "slu-a",
            SystemId::SluB => "slu-b",
            SystemId::SluC => "slu-c",
            SystemId::SluD => "slu-d",
            SystemId::Onto => "onto",
            SystemId::ShisI => "shis1",
            SystemId::ShisII => "shis2",
            SystemId::ShisIII => "shis3",
            SystemId::ShisIV => "shis4",
            SystemId::KaisA => "kais-a",
            SystemId::KaisB => "kais-b",
            SystemId::KaisC => "kais-c",
            SystemId::KaisD => "kais-d",
        }
    }

    pub fn spec(self) -> SystemSpec {
        SystemSpec::new(self)
    }
}

impl fmt::Display for SystemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for SystemId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SystemId::ALL
            .iter()
            .copied()
            .find(|id| id.key() == s)
            .ok_or_else(|| format!("unknown system `{s}`"))
    }
}

/// An axiom system: its tabulated schemas, the definitions it admits, and
/// the model classes it is sound for.
#[derive(Debug, Clone)]
pub struct SystemSpec {
    pub id: SystemId,
    /// The tabulated axiom set, including the definitions that belong to it.
    pub schemas: Vec<AxiomSchema>,
    /// Definitional equivalences usable through `def` steps.
    pub definitions: Vec<AxiomSchema>,
    pub model_classes: Vec<ModelClass>,
    /// With the flag off, `sub` steps are rejected and only axiom instances
    /// may introduce new letters.
    pub substitution_rule_enabled: bool,
}

const SH_DEFS: &[&str] = &[
    "dfe", "dfo", "dfex", "dfka", "dfceq", "dfdeq", "dfke", "dfkke",
];
const SLU_COMPLETE_DEFS: &[&str] = &[
    "dfe", "dfot", "dfa", "dfo", "dfex", "dfceq", "dfdeq", "dfke", "dfkke",
];
const SINGULAR_DEFS: &[&str] = &["dfneps", "dfideq"];

impl SystemSpec {
    pub fn new(id: SystemId) -> SystemSpec {
        use ModelClass::*;
        let sh_axioms: [&'static str; 5] = ["Ia", "Barbara", "Datisi", "cIi", "nES"];
        let shis = |group: &[&'static str]| -> Vec<&'static str> {
            let mut names: Vec<&'static str> = sh_axioms.to_vec();
            names.extend_from_slice(group);
            names.extend_from_slice(&["dfe", "dfo"]);
            names
        };
        let slu_axioms = |id: SystemId| -> Vec<&'static str> {
            match id {
                SystemId::Slu => vec!["Ci", "kaSi", "kBarbara", "kDarii"],
                SystemId::SluA | SystemId::KaisA => {
                    vec!["Ci", "kaSi", "kBarbara", "kDarii", "dagger"]
                }
                SystemId::SluB | SystemId::KaisB => {
                    vec!["Ci", "kBarbara", "kDarii", "dagger", "ddagger"]
                }
                SystemId::SluC | SystemId::KaisC => vec!["kaSi", "kBarbara", "dagger", "kDatisi"],
                SystemId::SluD | SystemId::KaisD => {
                    vec!["kBarbara", "kDatisi", "dagger", "ddagger"]
                }
                _ => unreachable!(),
            }
        };
        let with_defs = |mut names: Vec<&'static str>, defs: &[&'static str]| {
            names.extend_from_slice(defs);
            names
        };
        let concat = |a: &[&'static str], b: &[&'static str]| {
            let mut v = a.to_vec();
            v.extend_from_slice(b);
            v
        };

        let (schema_names, def_names, classes): (Vec<&str>, Vec<&str>, Vec<ModelClass>) = match id {
            SystemId::Luk => (
                vec!["Ia", "Ii", "Barbara", "Datisi", "dfe", "dfo"],
                vec!["dfe", "dfo"],
                vec![Traditional, Polyreferential],
            ),
            SystemId::Sh => (
                with_defs(sh_axioms.to_vec(), &["dfe", "dfo"]),
                SH_DEFS.to_vec(),
                vec![All, NonMonoreferential],
            ),
            SystemId::Slu => (
                with_defs(slu_axioms(id), &["dfe", "dfot"]),
                vec!["dfe", "dfot"],
                vec![All],
            ),
            SystemId::SluA | SystemId::SluB | SystemId::SluC | SystemId::SluD => (
                with_defs(slu_axioms(id), &["dfe", "dfot"]),
                SLU_COMPLETE_DEFS.to_vec(),
                vec![All],
            ),
            SystemId::Onto => (
                vec!["Ish1", "Ish2", "Ish3"],
                SINGULAR_DEFS.to_vec(),
                vec![All],
            ),
            SystemId::ShisI => (
                shis(&["Ish1", "isSa", "isSi", "moje"]),
                concat(SH_DEFS, SINGULAR_DEFS),
                vec![All],
            ),
            SystemId::ShisII => (
                shis(&["Ish1", "isSa", "isSi", "epsA", "epsI", "epsUp"]),
                concat(SH_DEFS, SINGULAR_DEFS),
                vec![All],
            ),
            SystemId::ShisIII => (
                shis(&["Ish1", "isSa", "isSi", "epsUp", "epsIp"]),
                concat(SH_DEFS, SINGULAR_DEFS),
                vec![All],
            ),
            SystemId::ShisIV => (
                shis(&["Ish1", "isSa", "isSi", "epsIp", "epsConv"]),
                concat(SH_DEFS, SINGULAR_DEFS),
                vec![All],
            ),
            SystemId::KaisA | SystemId::KaisB | SystemId::KaisC | SystemId::KaisD => {
                let mut names = slu_axioms(id);
                names.extend_from_slice(&["Ish1", "kisSa", "kmoje", "dfe", "dfot"]);
                (names, concat(SLU_COMPLETE_DEFS, SINGULAR_DEFS), vec![All])
            }
        };

        SystemSpec {
            id,
            schemas: schemas(&schema_names),
            definitions: schemas(&def_names),
            model_classes: classes,
            substitution_rule_enabled: true,
        }
    }

    /// The same system with the substitution rule switched on or off.
    pub fn with_substitution_rule(mut self, enabled: bool) -> SystemSpec {
        self.substitution_rule_enabled = enabled;
        self
    }

    pub fn find_schema(&self, name: &str) -> Option<&AxiomSchema> {
        self.schemas
            .iter()
            .chain(self.definitions.iter())
            .find(|s| s.name == name)
    }

    pub fn find_definition(&self, name: &str) -> Option<&AxiomSchema> {
        self.definitions.iter().find(|s| s.name == name)
    }

    /// Schemas that are not definitions: the proper axioms.
    pub fn proper_axioms(&self) -> impl Iterator<Item = &AxiomSchema> {
        self.schemas.iter().filter(|s| !s.name.starts_with("df"))
    }
}

/// The tabulated schema list of a system.
pub fn axioms_of(sys: &SystemSpec) -> &[AxiomSchema] {
    &sys.schemas
}
