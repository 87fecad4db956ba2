//! Hilbert-style proof checking, classical tautology recognition and the
//! definitional rewriter between functor bases.

use std::fmt;

use thiserror::Error;

use crate::syntax::{match_schema, substitute, Atom, Connective, Formula, Functor, Substitution};
use crate::systems::SystemSpec;

/// Largest number of distinct atoms a truth-table check will enumerate.
pub const CPL_ATOM_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CplError {
    #[error("truth-table guard exceeded: {atoms} distinct atoms (limit {CPL_ATOM_LIMIT})")]
    TooManyAtoms { atoms: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    /// Instance of a schema or definition; the substitution is inferred
    /// when omitted.
    Axiom {
        name: String,
        subst: Option<Substitution>,
    },
    Cpl,
    /// `mp I J`: line `J` is `formula(I) -> this`.
    Detach(usize, usize),
    Substitute(usize, Substitution),
    Definition {
        name: String,
        subst: Option<Substitution>,
    },
}

impl fmt::Display for Justification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let named =
            |f: &mut fmt::Formatter<'_>, tag: &str, name: &str, subst: &Option<Substitution>| {
                write!(f, "{tag} {name}")?;
                match subst {
                    Some(s) => write!(f, " {s}"),
                    None => Ok(()),
                }
            };
        match self {
            Justification::Axiom { name, subst } => named(f, "ax", name, subst),
            Justification::Definition { name, subst } => named(f, "def", name, subst),
            Justification::Cpl => f.write_str("cpl"),
            Justification::Detach(i, j) => write!(f, "mp {i} {j}"),
            Justification::Substitute(i, s) => write!(f, "sub {i} {s}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofLine {
    pub index: usize,
    pub formula: Formula,
    pub justification: Justification,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ProofScript {
    pub lines: Vec<ProofLine>,
}

impl ProofScript {
    /// Formula of the last line.
    pub fn conclusion(&self) -> Option<&Formula> {
        self.lines.last().map(|l| &l.formula)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub line: usize,
    pub reason: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.reason)
    }
}

/// Primitive lines a derived rule expanded to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expansion {
    pub line: usize,
    pub rule: String,
    pub steps: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub accepted: bool,
    pub first_failure: Option<Failure>,
    pub expansions: Vec<Expansion>,
}

impl CheckReport {
    pub fn accept() -> CheckReport {
        CheckReport {
            accepted: true,
            first_failure: None,
            expansions: Vec::new(),
        }
    }

    pub fn reject(line: usize, reason: impl Into<String>) -> CheckReport {
        CheckReport {
            accepted: false,
            first_failure: Some(Failure {
                line,
                reason: reason.into(),
            }),
            expansions: Vec::new(),
        }
    }
}

/// Bit-parallel truth table: each `u64` covers 64 assignments to `atoms`.
pub(crate) struct TruthTable<'a> {
    atoms: Vec<&'a Atom>,
}

impl<'a> TruthTable<'a> {
    pub(crate) fn new(formulas: impl IntoIterator<Item = &'a Formula>) -> Result<Self, CplError> {
        let mut atoms: Vec<&Atom> = Vec::new();
        for f in formulas {
            for a in f.atoms() {
                if !atoms.contains(&a) {
                    atoms.push(a);
                }
            }
        }
        if atoms.len() > CPL_ATOM_LIMIT {
            return Err(CplError::TooManyAtoms { atoms: atoms.len() });
        }
        Ok(TruthTable { atoms })
    }

    fn words(&self) -> usize {
        (1usize << self.atoms.len()).div_ceil(64)
    }

    /// Mask of the assignments that exist in word `w`.
    fn valid_mask(&self) -> u64 {
        let rows = 1usize << self.atoms.len();
        if rows >= 64 {
            u64::MAX
        } else {
            (1u64 << rows) - 1
        }
    }

    fn atom_word(&self, i: usize, w: usize) -> u64 {
        const PATTERNS: [u64; 6] = [
            0xAAAA_AAAA_AAAA_AAAA,
            0xCCCC_CCCC_CCCC_CCCC,
            0xF0F0_F0F0_F0F0_F0F0,
            0xFF00_FF00_FF00_FF00,
            0xFFFF_0000_FFFF_0000,
            0xFFFF_FFFF_0000_0000,
        ];
        if i < 6 {
            PATTERNS[i]
        } else if (w >> (i - 6)) & 1 == 1 {
            u64::MAX
        } else {
            0
        }
    }

    fn word(&self, f: &Formula, w: usize) -> u64 {
        match f {
            Formula::Atom(a) => {
                let i = self
                    .atoms
                    .iter()
                    .position(|x| *x == a)
                    .expect("collected atom");
                self.atom_word(i, w)
            }
            Formula::Neg(inner) => !self.word(inner, w),
            Formula::Bin(op, lhs, rhs) => {
                let (a, b) = (self.word(lhs, w), self.word(rhs, w));
                match op {
                    Connective::And => a & b,
                    Connective::Or => a | b,
                    Connective::Implies => !a | b,
                    Connective::Iff => !(a ^ b),
                }
            }
        }
    }

    /// Whether every assignment satisfying all `premises` satisfies `goal`.
    pub(crate) fn entails(&self, premises: &[&Formula], goal: &Formula) -> bool {
        let mask = self.valid_mask();
        (0..self.words()).all(|w| {
            let hyp = premises
                .iter()
                .fold(u64::MAX, |acc, p| acc & self.word(p, w));
            hyp & !self.word(goal, w) & mask == 0
        })
    }
}

/// Truth under every assignment of truth values to the distinct atoms.
pub fn is_cpl_tautology(f: &Formula) -> Result<bool, CplError> {
    Ok(TruthTable::new([f])?.entails(&[], f))
}

fn check_line(sys: &SystemSpec, script: &ProofScript, pos: usize) -> Result<(), String> {
    let line = &script.lines[pos];
    let earlier = |i: usize| -> Result<&Formula, String> {
        script.lines[..pos]
            .iter()
            .find(|l| l.index == i)
            .map(|l| &l.formula)
            .ok_or_else(|| format!("cites line {i}, which is not an earlier line"))
    };
    let instance = |name: &str, subst: &Option<Substitution>, defs_only: bool| {
        let schema = if defs_only {
            sys.find_definition(name)
        } else {
            sys.find_schema(name)
        }
        .ok_or_else(|| {
            let what = if defs_only { "definition" } else { "axiom" };
            format!("{} has no {what} named `{name}`", sys.id)
        })?;
        match subst {
            Some(sigma) => {
                let inst = substitute(&schema.pattern, sigma);
                if inst == line.formula {
                    Ok(())
                } else {
                    Err(format!(
                        "`{name}` {sigma} gives {inst}, not {}",
                        line.formula
                    ))
                }
            }
            None => match_schema(&schema.pattern, &line.formula)
                .map(|_| ())
                .ok_or_else(|| format!("{} is not an instance of `{name}`", line.formula)),
        }
    };
    match &line.justification {
        Justification::Axiom { name, subst } => instance(name, subst, false),
        Justification::Definition { name, subst } => instance(name, subst, true),
        Justification::Cpl => match is_cpl_tautology(&line.formula) {
            Ok(true) => Ok(()),
            Ok(false) => Err(format!("{} is not a CPL tautology", line.formula)),
            Err(e) => Err(e.to_string()),
        },
        Justification::Detach(i, j) => {
            let antecedent = earlier(*i)?;
            let major = earlier(*j)?;
            match major {
                Formula::Bin(Connective::Implies, lhs, rhs)
                    if **lhs == *antecedent && **rhs == line.formula =>
                {
                    Ok(())
                }
                _ => Err(format!(
                    "line {j} is not `{antecedent} -> {}`",
                    line.formula
                )),
            }
        }
        Justification::Substitute(i, sigma) => {
            if !sys.substitution_rule_enabled {
                return Err(format!(
                    "substitution rule is disabled in this version of {}",
                    sys.id
                ));
            }
            let source = earlier(*i)?;
            let inst = substitute(source, sigma);
            if inst == line.formula {
                Ok(())
            } else {
                Err(format!("line {i} under {sigma} gives {inst}"))
            }
        }
    }
}

/// Checks every line; the report names the first failing one.
pub fn check_proof(sys: &SystemSpec, script: &ProofScript) -> CheckReport {
    if script.lines.is_empty() {
        return CheckReport::reject(0, "empty script");
    }
    for pos in 0..script.lines.len() {
        if let Err(reason) = check_line(sys, script, pos) {
            return CheckReport::reject(script.lines[pos].index, reason);
        }
    }
    CheckReport::accept()
}

/// Target bases for [`expand_definitions`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    /// Primitive `a`, `i` (and `eps`).
    Ai,
    /// Primitive `ka`, `i` (and `eps`).
    Kai,
    /// Categorical `a`, `i`, `e`, `o` plus the singular functors.
    AieFull,
}

impl Basis {
    pub fn keeps(self, functor: Functor) -> bool {
        use Functor::*;
        match self {
            Basis::Ai => matches!(functor, A | I | EPS),
            Basis::Kai => matches!(functor, KA | I | EPS),
            Basis::AieFull => matches!(functor, A | I | E | O | EPS | NEPS | IDEQ),
        }
    }
}

fn rewrite_atom(atom: &Atom, basis: Basis) -> Formula {
    use Functor::*;
    if basis.keeps(atom.functor) {
        return Formula::Atom(atom.clone());
    }
    let s = atom.subject.clone();
    let p = atom.predicate_or_subject().clone();
    let at = |f: Functor, x: &crate::syntax::NameLetter, y: &crate::syntax::NameLetter| {
        Formula::Atom(Atom::binary(f, x.clone(), y.clone()))
    };
    let a = |x, y| match basis {
        Basis::Kai => at(KA, x, x).not().or(at(KA, x, y)),
        _ => at(A, x, y),
    };
    let i = |x, y| at(I, x, y);
    let exists = |x| i(x, x);
    let ka = |x, y| match basis {
        Basis::Kai => at(KA, x, y),
        _ => exists(x).and(a(x, y)),
    };
    let e = |x, y| match basis {
        Basis::AieFull => at(E, x, y),
        _ => i(x, y).not(),
    };
    let eps = |x, y| at(EPS, x, y);
    match atom.functor {
        A => a(&s, &p),
        I | EPS => unreachable!("kept by every basis"),
        E => e(&s, &p),
        O => a(&s, &p).not(),
        EX => exists(&s),
        KA => ka(&s, &p),
        OT => match basis {
            Basis::AieFull => exists(&s).not().or(at(O, &s, &p)),
            _ => ka(&s, &p).not(),
        },
        KE => exists(&s).and(e(&s, &p)),
        KKE => exists(&s).and(exists(&p)).and(e(&s, &p)),
        CEQ => a(&s, &p).and(a(&p, &s)),
        DEQ => ka(&s, &p).and(ka(&p, &s)),
        NEPS => eps(&s, &s).and(eps(&s, &p).not()),
        IDEQ => eps(&s, &p).and(eps(&p, &s)),
    }
}

/// Rewrites every atom outside `basis` by its defining formula.
pub fn expand_definitions(f: &Formula, basis: Basis) -> Formula {
    f.map_atoms(&|atom| rewrite_atom(atom, basis))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{formula, parse_proof_script};
    use crate::systems::SystemId;

    #[test]
    fn tautologies() {
        assert_eq!(is_cpl_tautology(&formula("a(S,P) | ~a(S,P)")), Ok(true));
        assert_eq!(
            is_cpl_tautology(&formula("a(S,P) & i(S,S) -> a(S,P)")),
            Ok(true)
        );
        assert_eq!(is_cpl_tautology(&formula("a(S,P) -> i(S,P)")), Ok(false));
        assert_eq!(is_cpl_tautology(&formula("a(S,P) -> a(S,P)")), Ok(true));
    }

    #[test]
    fn truth_table_guard() {
        let letters = ["A", "B", "C", "D", "E"];
        let mut atoms = Vec::new();
        for s in letters {
            for p in letters {
                atoms.push(Formula::atom(Functor::A, s, p));
            }
        }
        let big = atoms.iter().cloned().reduce(|x, y| x.or(y)).unwrap();
        assert_eq!(
            is_cpl_tautology(&big),
            Err(CplError::TooManyAtoms { atoms: 25 })
        );
        let wide = atoms[..7].iter().cloned().reduce(|x, y| x.and(y)).unwrap();
        assert_eq!(
            is_cpl_tautology(&wide.clone().implies(atoms[3].clone())),
            Ok(true)
        );
        assert_eq!(is_cpl_tautology(&atoms[8].clone().implies(wide)), Ok(false));
    }

    const CONVERSION: &str = "\
1: a(P,P) ; ax Ia [S:=P]
2: a(P,P) & i(P,S) -> i(S,P) ; ax Datisi [M:=P]
3: a(P,P) -> (a(P,P) & i(P,S) -> i(S,P)) -> i(P,S) -> i(S,P) ; cpl
4: (a(P,P) & i(P,S) -> i(S,P)) -> i(P,S) -> i(S,P) ; mp 1 3
5: i(P,S) -> i(S,P) ; mp 2 4
";

    #[test]
    fn conversion_of_particular_affirmative() {
        let script = parse_proof_script(CONVERSION).unwrap();
        let report = check_proof(&SystemId::Luk.spec(), &script);
        assert!(report.accepted, "{report:?}");
    }

    #[test]
    fn detachment_mismatch_is_reported() {
        let bad = CONVERSION.replace(
            "5: i(P,S) -> i(S,P) ; mp 2 4",
            "5: i(P,S) -> i(S,P) ; mp 1 4",
        );
        let report = check_proof(&SystemId::Luk.spec(), &parse_proof_script(&bad).unwrap());
        assert!(!report.accepted);
        assert_eq!(report.first_failure.unwrap().line, 5);
    }

    #[test]
    fn axioms_are_checked_against_the_system() {
        let script = parse_proof_script("1: i(S,S) ; ax Ii").unwrap();
        assert!(check_proof(&SystemId::Luk.spec(), &script).accepted);
        assert!(!check_proof(&SystemId::Sh.spec(), &script).accepted);
        let wrong = parse_proof_script("1: i(S,P) ; ax Ii").unwrap();
        assert!(!check_proof(&SystemId::Luk.spec(), &wrong).accepted);
        let bad_sub = parse_proof_script("1: a(P,P) ; ax Ia [S:=M]").unwrap();
        assert!(!check_proof(&SystemId::Luk.spec(), &bad_sub).accepted);
        let def = parse_proof_script("1: ex(M) <-> i(M,M) ; def dfex").unwrap();
        assert!(check_proof(&SystemId::Sh.spec(), &def).accepted);
        assert!(!check_proof(&SystemId::Luk.spec(), &def).accepted);
    }

    #[test]
    fn substitution_rule_flag() {
        let script = parse_proof_script("1: a(S,S) ; ax Ia\n2: a(M,M) ; sub 1 [S:=M]\n").unwrap();
        let sys = SystemId::Luk.spec();
        assert!(check_proof(&sys, &script).accepted);
        let report = check_proof(&sys.with_substitution_rule(false), &script);
        assert_eq!(report.first_failure.map(|f| f.line), Some(2));
    }

    #[test]
    fn forward_citations_are_rejected() {
        let script = parse_proof_script("1: a(S,S) ; mp 1 1").unwrap();
        assert!(!check_proof(&SystemId::Luk.spec(), &script).accepted);
    }

    #[test]
    fn definitional_rewriting() {
        assert_eq!(
            expand_definitions(&formula("e(S,P)"), Basis::Ai),
            formula("~i(S,P)")
        );
        assert_eq!(
            expand_definitions(&formula("a(S,P)"), Basis::Kai),
            formula("~ka(S,S) | ka(S,P)")
        );
        let kept = formula("a(S,P) & eps(S,M) -> i(M,P)");
        assert_eq!(expand_definitions(&kept, Basis::Ai), kept);
        let kai = formula("ka(S,P) | ~i(S,M)");
        assert_eq!(expand_definitions(&kai, Basis::Kai), kai);
    }
}
