//! Sequent kernel (axiomatic sequents, cut, deduction, derived rules) and
//! the Smiley deduction kernel.
//!
//! Derived rules are never trusted: a `rule NAME ...` line is expanded into
//! primitive `ded`/`cpl`/`cut` lines, and only the expanded script is
//! checked.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

use crate::parser::{format_deduction_claim, format_sequent, parse_sequent};
use crate::proof::{CheckReport, CplError, Expansion, Failure, TruthTable};
use crate::syntax::{match_into, substitute, Connective, Formula, Functor, Substitution};

/// Premises (a set) and a conclusion.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sequent {
    pub premises: BTreeSet<Formula>,
    pub conclusion: Formula,
}

impl Sequent {
    pub fn new(premises: impl IntoIterator<Item = Formula>, conclusion: Formula) -> Sequent {
        Sequent {
            premises: premises.into_iter().collect(),
            conclusion,
        }
    }

    /// `(π1 & … & πn) -> ω`, or just `ω` without premises.
    pub fn implication(&self) -> Formula {
        match Formula::conjoin(self.premises.iter().cloned()) {
            Some(ante) => ante.implies(self.conclusion.clone()),
            None => self.conclusion.clone(),
        }
    }

    fn substituted(&self, sigma: &Substitution) -> Sequent {
        Sequent::new(
            self.premises.iter().map(|p| substitute(p, sigma)),
            substitute(&self.conclusion, sigma),
        )
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_sequent(self))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SequentJustification {
    /// One of the axiomatic sequents; the substitution is inferred when
    /// omitted.
    Axiom {
        name: String,
        subst: Option<Substitution>,
    },
    /// A classical consequence.
    Cpl,
    /// `cut I J`: line `I` is `A ==> α`, line `J` is `B, α ==> ω`.
    Cut(usize, usize),
    /// `ded I`: line `I` is `Π, α ==> ω`.
    Deduction(usize),
    /// A derived rule, expanded before checking.
    Rule { name: String, cited: Vec<usize> },
}

impl fmt::Display for SequentJustification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequentJustification::Axiom { name, subst } => {
                write!(f, "ax {name}")?;
                match subst {
                    Some(s) => write!(f, " {s}"),
                    None => Ok(()),
                }
            }
            SequentJustification::Cpl => f.write_str("cpl"),
            SequentJustification::Cut(i, j) => write!(f, "cut {i} {j}"),
            SequentJustification::Deduction(i) => write!(f, "ded {i}"),
            SequentJustification::Rule { name, cited } => {
                write!(f, "rule {name}")?;
                for c in cited {
                    write!(f, " {c}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequentLine {
    pub index: usize,
    pub sequent: Sequent,
    pub justification: SequentJustification,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SequentScript {
    pub lines: Vec<SequentLine>,
}

impl SequentScript {
    pub fn conclusion(&self) -> Option<&Sequent> {
        self.lines.last().map(|l| &l.sequent)
    }
}

const AXIOMATIC_TABLE: &[(&str, &str)] = &[
    ("Ia", "==> a(S,S)"),
    ("Ii", "==> i(S,S)"),
    ("Barbara", "a(M,P), a(S,M) ==> a(S,P)"),
    ("Datisi", "a(M,P), i(M,S) ==> i(S,P)"),
    ("dfe-l", "e(S,P) ==> ~i(S,P)"),
    ("dfe-r", "~i(S,P) ==> e(S,P)"),
    ("dfo-l", "o(S,P) ==> ~a(S,P)"),
    ("dfo-r", "~a(S,P) ==> o(S,P)"),
];

/// The axiomatic sequents: the four proper axioms and both directions of
/// the two definitions.
pub fn axiomatic_sequents() -> &'static [(&'static str, Sequent)] {
    static TABLE: OnceLock<Vec<(&'static str, Sequent)>> = OnceLock::new();
    TABLE.get_or_init(|| {
        AXIOMATIC_TABLE
            .iter()
            .map(|(n, t)| (*n, parse_sequent(t).expect("axiomatic sequent parses")))
            .collect()
    })
}

/// Every assignment making all premises true makes `goal` true.
pub fn cpl_consequence(premises: &BTreeSet<Formula>, goal: &Formula) -> Result<bool, CplError> {
    let table = TruthTable::new(premises.iter().chain([goal]))?;
    let ps: Vec<&Formula> = premises.iter().collect();
    Ok(table.entails(&ps, goal))
}

/// Finds σ with `σ(pattern) = target` as sequents (premise sets compared
/// after substitution, so collapsing substitutions are allowed).
fn match_sequent(pattern: &Sequent, target: &Sequent) -> Option<Substitution> {
    let mut binding = BTreeMap::new();
    if !match_into(&pattern.conclusion, &target.conclusion, &mut binding) {
        return None;
    }
    let pats: Vec<&Formula> = pattern.premises.iter().collect();
    let cands: Vec<&Formula> = target.premises.iter().collect();
    fn assign(
        pats: &[&Formula],
        cands: &[&Formula],
        binding: &BTreeMap<crate::syntax::NameLetter, crate::syntax::NameLetter>,
        pattern: &Sequent,
        target: &Sequent,
    ) -> Option<Substitution> {
        match pats.split_first() {
            None => {
                let sigma: Substitution = binding.clone().into_iter().collect();
                (pattern.substituted(&sigma) == *target).then_some(sigma)
            }
            Some((p, rest)) => cands.iter().find_map(|c| {
                let mut b = binding.clone();
                if match_into(p, c, &mut b) {
                    assign(rest, cands, &b, pattern, target)
                } else {
                    None
                }
            }),
        }
    }
    assign(&pats, &cands, &binding, pattern, target)
}

fn check_axiom(name: &str, subst: &Option<Substitution>, target: &Sequent) -> Result<(), String> {
    let (_, pattern) = axiomatic_sequents()
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| format!("no axiomatic sequent named `{name}`"))?;
    match subst {
        Some(sigma) => {
            let inst = pattern.substituted(sigma);
            if inst == *target {
                Ok(())
            } else {
                Err(format!("`{name}` {sigma} gives {inst}"))
            }
        }
        None => match_sequent(pattern, target)
            .map(|_| ())
            .ok_or_else(|| format!("{target} is not an instance of `{name}`")),
    }
}

fn without(set: &BTreeSet<Formula>, f: &Formula) -> BTreeSet<Formula> {
    let mut out = set.clone();
    out.remove(f);
    out
}

fn union(a: &BTreeSet<Formula>, b: &BTreeSet<Formula>) -> BTreeSet<Formula> {
    a.union(b).cloned().collect()
}

fn check_primitive(lines: &[SequentLine], pos: usize) -> Result<(), String> {
    let line = &lines[pos];
    let target = &line.sequent;
    let earlier = |i: usize| -> Result<&Sequent, String> {
        lines[..pos]
            .iter()
            .find(|l| l.index == i)
            .map(|l| &l.sequent)
            .ok_or_else(|| format!("cites line {i}, which is not an earlier line"))
    };
    match &line.justification {
        SequentJustification::Axiom { name, subst } => check_axiom(name, subst, target),
        SequentJustification::Cpl => match cpl_consequence(&target.premises, &target.conclusion) {
            Ok(true) => Ok(()),
            Ok(false) => Err(format!("{target} is not a CPL consequence")),
            Err(e) => Err(e.to_string()),
        },
        SequentJustification::Cut(i, j) => {
            let first = earlier(*i)?;
            let second = earlier(*j)?;
            let alpha = &first.conclusion;
            if !second.premises.contains(alpha) {
                return Err(format!("cut formula {alpha} is not a premise of line {j}"));
            }
            if second.conclusion != target.conclusion {
                return Err(format!(
                    "conclusion should be {}, the conclusion of line {j}",
                    second.conclusion
                ));
            }
            let dropped = union(&first.premises, &without(&second.premises, alpha));
            let kept = union(&first.premises, &second.premises);
            if target.premises == dropped || target.premises == kept {
                Ok(())
            } else {
                Err(format!(
                    "premises should be those of line {i} together with those of line {j} minus {alpha}"
                ))
            }
        }
        SequentJustification::Deduction(i) => {
            let source = earlier(*i)?;
            let Formula::Bin(Connective::Implies, alpha, omega) = &target.conclusion else {
                return Err("deduction must conclude an implication".into());
            };
            if **omega != source.conclusion {
                return Err(format!(
                    "consequent should be {}, the conclusion of line {i}",
                    source.conclusion
                ));
            }
            if !source.premises.contains(alpha) {
                return Err(format!("{alpha} is not a premise of line {i}"));
            }
            if target.premises == without(&source.premises, alpha)
                || target.premises == source.premises
            {
                Ok(())
            } else {
                Err(format!(
                    "premises should be those of line {i} minus {alpha}"
                ))
            }
        }
        SequentJustification::Rule { name, .. } => Err(format!(
            "derived rule `{name}` must be expanded before checking"
        )),
    }
}

/// Names of the derived rules accepted by `rule NAME ...` lines.
pub const DERIVED_RULES: &[&str] = &[
    "and-intro-left",
    "and-intro-right",
    "and-combine",
    "imp-unpack",
    "imp-apply",
    "biconditional-split",
    "biconditional-join",
    "contraposition-1",
    "contraposition-2",
    "contraposition-3",
    "contraposition-4",
    "or-left-1",
    "or-left-2",
    "or-combine",
    "seq-to-imp",
    "imp-to-seq",
];

fn cited_count(rule: &str) -> usize {
    match rule {
        "and-combine" | "imp-apply" | "biconditional-join" | "or-combine" => 2,
        _ => 1,
    }
}

/// `(c \ removed) == (t \ added)` with `removed ⊆ c` and `added ⊆ t`.
fn same_context(
    c: &BTreeSet<Formula>,
    removed: &[&Formula],
    t: &BTreeSet<Formula>,
    added: &[&Formula],
) -> bool {
    if !removed.iter().all(|f| c.contains(*f)) || !added.iter().all(|f| t.contains(*f)) {
        return false;
    }
    let mut lhs = c.clone();
    for f in removed {
        lhs.remove(*f);
    }
    let mut rhs = t.clone();
    for f in added {
        rhs.remove(*f);
    }
    lhs == rhs
}

fn split_bin(f: &Formula, op: Connective) -> Option<(&Formula, &Formula)> {
    match f {
        Formula::Bin(o, l, r) if *o == op => Some((l, r)),
        _ => None,
    }
}

fn negated(f: &Formula) -> Option<&Formula> {
    match f {
        Formula::Neg(inner) => Some(inner),
        _ => None,
    }
}

/// Whether `target` has the shape the derived rule produces from `cited`.
fn rule_shape(rule: &str, cited: &[&Sequent], target: &Sequent) -> bool {
    use Connective::*;
    let c1 = cited[0];
    let t = target;
    let same_concl = c1.conclusion == t.conclusion;
    match rule {
        "and-intro-left" => {
            same_concl
                && t.premises.iter().any(|g| {
                    split_bin(g, And).is_some_and(|(a, b)| {
                        same_context(&c1.premises, &[a, b], &t.premises, &[g])
                    })
                })
        }
        "and-intro-right" => {
            same_concl
                && c1.premises.iter().any(|g| {
                    split_bin(g, And).is_some_and(|(a, b)| {
                        same_context(&c1.premises, &[g], &t.premises, &[a, b])
                    })
                })
        }
        "and-combine" => {
            let c2 = cited[1];
            t.conclusion == c1.conclusion.clone().and(c2.conclusion.clone())
                && t.premises == union(&c1.premises, &c2.premises)
        }
        "imp-unpack" => split_bin(&c1.conclusion, Implies).is_some_and(|(a, b)| {
            *b == t.conclusion && same_context(&c1.premises, &[], &t.premises, &[a])
        }),
        "imp-apply" => {
            let c2 = cited[1];
            split_bin(&c1.conclusion, Implies).is_some_and(|(a, b)| {
                *a == c2.conclusion
                    && *b == t.conclusion
                    && t.premises == union(&c1.premises, &c2.premises)
            })
        }
        "biconditional-split" => {
            c1.premises.is_empty()
                && split_bin(&c1.conclusion, Iff).is_some_and(|(a, b)| {
                    t.premises.len() == 1
                        && ((t.premises.contains(a) && t.conclusion == *b)
                            || (t.premises.contains(b) && t.conclusion == *a))
                })
        }
        "biconditional-join" => {
            let c2 = cited[1];
            match (
                split_bin(&c1.conclusion, Implies),
                split_bin(&c2.conclusion, Implies),
            ) {
                (Some((a, b)), Some((b2, a2))) => {
                    a == a2
                        && b == b2
                        && t.conclusion == a.clone().iff(b.clone())
                        && t.premises == union(&c1.premises, &c2.premises)
                }
                _ => false,
            }
        }
        "contraposition-1" => negated(&t.conclusion).is_some_and(|alpha| {
            let not_beta = c1.conclusion.clone().not();
            same_context(&c1.premises, &[alpha], &t.premises, &[&not_beta])
        }),
        "contraposition-2" => negated(&c1.conclusion).is_some_and(|beta| {
            let not_alpha = t.conclusion.clone().not();
            same_context(&c1.premises, &[&not_alpha], &t.premises, &[beta])
        }),
        "contraposition-3" => {
            let not_alpha = t.conclusion.clone().not();
            let not_beta = c1.conclusion.clone().not();
            same_context(&c1.premises, &[&not_alpha], &t.premises, &[&not_beta])
        }
        "contraposition-4" => match (negated(&c1.conclusion), negated(&t.conclusion)) {
            (Some(beta), Some(alpha)) => same_context(&c1.premises, &[alpha], &t.premises, &[beta]),
            _ => false,
        },
        "or-left-1" | "or-left-2" => {
            same_concl
                && c1.premises.iter().any(|g| {
                    split_bin(g, Or).is_some_and(|(a, b)| {
                        let kept = if rule == "or-left-1" { a } else { b };
                        same_context(&c1.premises, &[g], &t.premises, &[kept])
                    })
                })
        }
        "or-combine" => {
            let c2 = cited[1];
            c1.conclusion == t.conclusion
                && c2.conclusion == t.conclusion
                && t.premises.iter().any(|g| {
                    split_bin(g, Or).is_some_and(|(a, b)| {
                        c1.premises.contains(a)
                            && c2.premises.contains(b)
                            && without(&t.premises, g)
                                == union(&without(&c1.premises, a), &without(&c2.premises, b))
                    })
                })
        }
        "seq-to-imp" => {
            t.premises.is_empty()
                && !c1.premises.is_empty()
                && split_bin(&t.conclusion, Implies).is_some_and(|(ante, omega)| {
                    *omega == c1.conclusion
                        && ante
                            .conjuncts()
                            .into_iter()
                            .cloned()
                            .collect::<BTreeSet<_>>()
                            == c1.premises
                })
        }
        "imp-to-seq" => {
            c1.premises.is_empty()
                && split_bin(&c1.conclusion, Implies).is_some_and(|(ante, omega)| {
                    *omega == t.conclusion
                        && ante
                            .conjuncts()
                            .into_iter()
                            .cloned()
                            .collect::<BTreeSet<_>>()
                            == t.premises
                })
        }
        _ => false,
    }
}

/// Primitive steps deriving `target` from the cited lines: close each cited
/// sequent into an implication by repeated `ded`, state the classical
/// consequence from those implications (plus the target premises) as a
/// `cpl` line, then cut the implications away.
fn expand_rule(
    cited: &[(usize, &Sequent)],
    target: &Sequent,
    next_index: &mut usize,
) -> Vec<SequentLine> {
    let mut steps = Vec::new();
    let mut push = |sequent: Sequent, justification: SequentJustification| -> usize {
        let index = *next_index;
        *next_index += 1;
        steps.push(SequentLine {
            index,
            sequent,
            justification,
        });
        index
    };

    let mut closed: Vec<(usize, Formula)> = Vec::new();
    for &(idx, seq) in cited {
        let mut current = seq.clone();
        let mut at = idx;
        while let Some(last) = current.premises.iter().next_back().cloned() {
            current = Sequent {
                premises: without(&current.premises, &last),
                conclusion: last.implies(current.conclusion.clone()),
            };
            at = push(current.clone(), SequentJustification::Deduction(at));
        }
        if !closed.iter().any(|(_, f)| *f == current.conclusion) {
            closed.push((at, current.conclusion));
        }
    }

    let mut premises = target.premises.clone();
    premises.extend(closed.iter().map(|(_, f)| f.clone()));
    let mut current = Sequent {
        premises,
        conclusion: target.conclusion.clone(),
    };
    let mut at = push(current.clone(), SequentJustification::Cpl);
    for (closed_at, f) in closed {
        if !target.premises.contains(&f) {
            current.premises.remove(&f);
        }
        at = push(current.clone(), SequentJustification::Cut(closed_at, at));
    }
    steps
}

/// Replaces every derived-rule line by its primitive expansion.
///
/// Returns the macro-free script, the recorded expansions and, for each line
/// of the new script, the index of the original line it came from.
pub fn expand_macros(
    script: &SequentScript,
) -> Result<(SequentScript, Vec<Expansion>, Vec<usize>), Failure> {
    let mut out = Vec::new();
    let mut origin = Vec::new();
    let mut renumber: BTreeMap<usize, usize> = BTreeMap::new();
    let mut expansions = Vec::new();
    let mut next = 1;
    let fail = |line: usize, reason: String| Failure { line, reason };

    for line in &script.lines {
        let map = |i: usize| -> Result<usize, Failure> {
            renumber.get(&i).copied().ok_or_else(|| {
                fail(
                    line.index,
                    format!("cites line {i}, which is not an earlier line"),
                )
            })
        };
        match &line.justification {
            SequentJustification::Rule { name, cited } => {
                if !DERIVED_RULES.contains(&name.as_str()) {
                    return Err(fail(line.index, format!("unknown derived rule `{name}`")));
                }
                if cited.len() != cited_count(name) {
                    return Err(fail(
                        line.index,
                        format!("`{name}` cites {} line(s)", cited_count(name)),
                    ));
                }
                let mut sources = Vec::new();
                for &c in cited {
                    let new_c = map(c)?;
                    let seq = &script
                        .lines
                        .iter()
                        .find(|l| l.index == c)
                        .expect("renumbered line exists")
                        .sequent;
                    sources.push((new_c, seq));
                }
                let seqs: Vec<&Sequent> = sources.iter().map(|(_, s)| *s).collect();
                if !rule_shape(name, &seqs, &line.sequent) {
                    return Err(fail(
                        line.index,
                        format!(
                            "{} does not follow by `{name}` from the cited lines",
                            line.sequent
                        ),
                    ));
                }
                let steps = expand_rule(&sources, &line.sequent, &mut next);
                expansions.push(Expansion {
                    line: line.index,
                    rule: name.clone(),
                    steps: steps
                        .iter()
                        .map(|s| format!("{}: {} ; {}", s.index, s.sequent, s.justification))
                        .collect(),
                });
                let last = steps.last().expect("expansion is nonempty").index;
                origin.extend(std::iter::repeat_n(line.index, steps.len()));
                out.extend(steps);
                renumber.insert(line.index, last);
            }
            other => {
                let justification = match other {
                    SequentJustification::Cut(i, j) => {
                        SequentJustification::Cut(map(*i)?, map(*j)?)
                    }
                    SequentJustification::Deduction(i) => SequentJustification::Deduction(map(*i)?),
                    j => j.clone(),
                };
                out.push(SequentLine {
                    index: next,
                    sequent: line.sequent.clone(),
                    justification,
                });
                origin.push(line.index);
                renumber.insert(line.index, next);
                next += 1;
            }
        }
    }
    Ok((SequentScript { lines: out }, expansions, origin))
}

/// Checks a sequent script; derived-rule lines are checked through their
/// primitive expansions, which are recorded in the report.
pub fn check_sequent_proof(script: &SequentScript) -> CheckReport {
    if script.lines.is_empty() {
        return CheckReport::reject(0, "empty script");
    }
    let (expanded, expansions, origin) = match expand_macros(script) {
        Ok(x) => x,
        Err(f) => return CheckReport::reject(f.line, f.reason),
    };
    for (pos, &source) in origin.iter().enumerate().take(expanded.lines.len()) {
        if let Err(reason) = check_primitive(&expanded.lines, pos) {
            let mut report = CheckReport::reject(source, reason);
            report.expansions = expansions;
            return report;
        }
    }
    let mut report = CheckReport::accept();
    report.expansions = expansions;
    report
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0} is not a categorical atom (a, i, e or o)")]
pub struct NotCategorical(pub Formula);

/// Swaps `a`/`o` and `i`/`e` on the same letters.
pub fn contradictory(f: &Formula) -> Result<Formula, NotCategorical> {
    match f {
        Formula::Atom(atom) => {
            let functor = match atom.functor {
                Functor::A => Functor::O,
                Functor::O => Functor::A,
                Functor::I => Functor::E,
                Functor::E => Functor::I,
                _ => return Err(NotCategorical(f.clone())),
            };
            let mut out = atom.clone();
            out.functor = functor;
            Ok(Formula::Atom(out))
        }
        _ => Err(NotCategorical(f.clone())),
    }
}

/// The four inference rules of the Smiley reconstruction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SmileyRule {
    /// `S a M, M a P ▷ S a P`
    R1,
    /// `S a M, M e P ▷ S e P`
    R2,
    /// `P e S ▷ S e P`
    R3,
    /// `P a S ▷ S i P`
    R4,
}

impl SmileyRule {
    pub fn from_number(n: u8) -> Option<SmileyRule> {
        match n {
            1 => Some(SmileyRule::R1),
            2 => Some(SmileyRule::R2),
            3 => Some(SmileyRule::R3),
            4 => Some(SmileyRule::R4),
            _ => None,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            SmileyRule::R1 => 1,
            SmileyRule::R2 => 2,
            SmileyRule::R3 => 3,
            SmileyRule::R4 => 4,
        }
    }

    pub fn arity(self) -> usize {
        match self {
            SmileyRule::R1 | SmileyRule::R2 => 2,
            SmileyRule::R3 | SmileyRule::R4 => 1,
        }
    }

    /// Premise patterns and conclusion pattern.
    fn pattern(self) -> (Vec<Formula>, Formula) {
        use Functor::*;
        let at = Formula::atom;
        match self {
            SmileyRule::R1 => (vec![at(A, "S", "M"), at(A, "M", "P")], at(A, "S", "P")),
            SmileyRule::R2 => (vec![at(A, "S", "M"), at(E, "M", "P")], at(E, "S", "P")),
            SmileyRule::R3 => (vec![at(E, "P", "S")], at(E, "S", "P")),
            SmileyRule::R4 => (vec![at(A, "P", "S")], at(I, "S", "P")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeductionJustification {
    Trivial,
    Rule {
        rule: SmileyRule,
        first: usize,
        second: Option<usize>,
    },
    Reductio(usize, usize),
}

impl fmt::Display for DeductionJustification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeductionJustification::Trivial => f.write_str("trivial"),
            DeductionJustification::Rule {
                rule,
                first,
                second,
            } => {
                write!(f, "rule {} {first}", rule.number())?;
                match second {
                    Some(s) => write!(f, " {s}"),
                    None => Ok(()),
                }
            }
            DeductionJustification::Reductio(i, j) => write!(f, "reductio {i} {j}"),
        }
    }
}

/// A line `Π |- ω` of a Smiley deduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeductionLine {
    pub index: usize,
    pub claim: Sequent,
    pub justification: DeductionJustification,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DeductionScript {
    pub lines: Vec<DeductionLine>,
}

impl DeductionScript {
    pub fn conclusion(&self) -> Option<&Sequent> {
        self.lines.last().map(|l| &l.claim)
    }
}

fn is_categorical(f: &Formula) -> bool {
    contradictory(f).is_ok()
}

fn check_deduction_line(lines: &[DeductionLine], pos: usize) -> Result<(), String> {
    let line = &lines[pos];
    let claim = &line.claim;
    if claim.premises.is_empty() {
        return Err("deductions need at least one premise".into());
    }
    if let Some(bad) = claim
        .premises
        .iter()
        .chain([&claim.conclusion])
        .find(|f| !is_categorical(f))
    {
        return Err(format!("{bad} is not a categorical atom"));
    }
    let earlier = |i: usize| -> Result<&Sequent, String> {
        lines[..pos]
            .iter()
            .find(|l| l.index == i)
            .map(|l| &l.claim)
            .ok_or_else(|| format!("cites line {i}, which is not an earlier line"))
    };
    match &line.justification {
        DeductionJustification::Trivial => {
            if claim.premises.len() == 1 && claim.premises.contains(&claim.conclusion) {
                Ok(())
            } else {
                Err("a trivial deduction has the form `α |- α`".into())
            }
        }
        DeductionJustification::Rule {
            rule,
            first,
            second,
        } => {
            let mut cited = vec![earlier(*first)?];
            if let Some(s) = second {
                cited.push(earlier(*s)?);
            }
            if cited.len() != rule.arity() {
                return Err(format!(
                    "rule {} takes {} premise(s)",
                    rule.number(),
                    rule.arity()
                ));
            }
            let (pats, concl) = rule.pattern();
            let mut binding = BTreeMap::new();
            let matched = pats
                .iter()
                .zip(&cited)
                .all(|(p, c)| match_into(p, &c.conclusion, &mut binding))
                && match_into(&concl, &claim.conclusion, &mut binding);
            if !matched {
                return Err(format!(
                    "{} does not follow by rule {} from the cited conclusions",
                    claim.conclusion,
                    rule.number()
                ));
            }
            let expected = cited
                .iter()
                .fold(BTreeSet::new(), |acc, c| union(&acc, &c.premises));
            if claim.premises == expected {
                Ok(())
            } else {
                Err("premises should be the union of the cited premises".into())
            }
        }
        DeductionJustification::Reductio(i, j) => {
            let first = earlier(*i)?;
            let second = earlier(*j)?;
            let not_omega = contradictory(&claim.conclusion).map_err(|e| e.to_string())?;
            if !first.premises.contains(&not_omega) {
                return Err(format!("line {i} does not assume {not_omega}"));
            }
            let not_alpha = contradictory(&first.conclusion).map_err(|e| e.to_string())?;
            if second.conclusion != not_alpha {
                return Err(format!("line {j} should conclude {not_alpha}"));
            }
            let expected = union(&without(&first.premises, &not_omega), &second.premises);
            if claim.premises == expected {
                Ok(())
            } else {
                Err("premises should be those of both cited lines minus the assumption".into())
            }
        }
    }
}

pub fn check_smiley_deduction(script: &DeductionScript) -> CheckReport {
    if script.lines.is_empty() {
        return CheckReport::reject(0, "empty script");
    }
    for pos in 0..script.lines.len() {
        if let Err(reason) = check_deduction_line(&script.lines, pos) {
            return CheckReport::reject(script.lines[pos].index, reason);
        }
    }
    CheckReport::accept()
}

/// Display form `Π |- ω` of a deduction claim.
pub fn show_claim(claim: &Sequent) -> String {
    format_deduction_claim(claim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{formula, parse_deduction_script, parse_sequent_script};

    fn seq(text: &str) -> Sequent {
        parse_sequent(text).unwrap()
    }

    #[test]
    fn classical_consequence() {
        let prem: BTreeSet<_> = [formula("a(S,P)"), formula("a(S,P) -> i(S,P)")].into();
        assert_eq!(cpl_consequence(&prem, &formula("i(S,P)")), Ok(true));
        assert_eq!(
            cpl_consequence(&BTreeSet::new(), &formula("a(S,P) | ~a(S,P)")),
            Ok(true)
        );
        let single: BTreeSet<_> = [formula("a(S,P)")].into();
        assert_eq!(cpl_consequence(&single, &formula("i(S,P)")), Ok(false));
    }

    #[test]
    fn subalternation_by_cut() {
        let script = parse_sequent_script(
            "1: ==> i(S,S) ; ax Ii\n\
             2: a(S,P), i(S,S) ==> i(S,P) ; ax Datisi [M:=S]\n\
             3: a(S,P) ==> i(S,P) ; cut 1 2\n",
        )
        .unwrap();
        let report = check_sequent_proof(&script);
        assert!(report.accepted, "{report:?}");
    }

    #[test]
    fn conversion_by_cut() {
        let script = parse_sequent_script(
            "1: ==> a(P,P) ; ax Ia\n\
             2: a(P,P), i(P,S) ==> i(S,P) ; ax Datisi\n\
             3: i(P,S) ==> i(S,P) ; cut 1 2\n",
        )
        .unwrap();
        assert!(check_sequent_proof(&script).accepted);
    }

    #[test]
    fn cut_needs_the_cut_formula() {
        let script = parse_sequent_script(
            "1: ==> a(S,S) ; ax Ia\n\
             2: a(S,P), i(S,S) ==> i(S,P) ; ax Datisi [M:=S]\n\
             3: a(S,P) ==> i(S,P) ; cut 1 2\n",
        )
        .unwrap();
        let report = check_sequent_proof(&script);
        assert_eq!(report.first_failure.map(|f| f.line), Some(3));
    }

    #[test]
    fn axiom_matching_allows_collapse() {
        assert!(check_axiom("Barbara", &None, &seq("a(S,S) ==> a(S,S)")).is_ok());
        assert!(check_axiom("Barbara", &None, &seq("a(B,C), a(A,B) ==> a(A,C)")).is_ok());
        assert!(check_axiom("Barbara", &None, &seq("a(B,C) ==> a(A,C)")).is_err());
        assert!(check_axiom("dfe-r", &None, &seq("~i(M,P) ==> e(M,P)")).is_ok());
        assert!(check_axiom("dfe-r", &None, &seq("~i(M,P) ==> e(P,M)")).is_err());
    }

    #[test]
    fn deduction_rule() {
        let script = parse_sequent_script(
            "1: a(M,P), a(S,M) ==> a(S,P) ; ax Barbara\n\
             2: a(M,P) ==> a(S,M) -> a(S,P) ; ded 1\n\
             3: ==> a(M,P) -> a(S,M) -> a(S,P) ; ded 2\n",
        )
        .unwrap();
        assert!(check_sequent_proof(&script).accepted);
        let bad = parse_sequent_script(
            "1: a(M,P), a(S,M) ==> a(S,P) ; ax Barbara\n\
             2: ==> a(S,M) -> a(S,P) ; ded 1\n",
        )
        .unwrap();
        assert!(!check_sequent_proof(&bad).accepted);
    }

    #[test]
    fn macros_expand_and_recheck() {
        let script = parse_sequent_script(
            "1: a(M,P), a(S,M) ==> a(S,P) ; ax Barbara\n\
             2: a(M,P) & a(S,M) ==> a(S,P) ; rule and-intro-left 1\n\
             3: ==> a(M,P) & a(S,M) -> a(S,P) ; rule seq-to-imp 1\n",
        )
        .unwrap();
        let report = check_sequent_proof(&script);
        assert!(report.accepted, "{report:?}");
        assert_eq!(report.expansions.len(), 2);
        let (expanded, _, _) = expand_macros(&script).unwrap();
        assert!(expanded
            .lines
            .iter()
            .all(|l| !matches!(l.justification, SequentJustification::Rule { .. })));
        assert!(check_sequent_proof(&expanded).accepted);
    }

    #[test]
    fn misapplied_macro_is_rejected() {
        let script = parse_sequent_script(
            "1: a(M,P), a(S,M) ==> a(S,P) ; ax Barbara\n\
             2: a(M,P) & a(S,M) ==> a(S,P) ; rule and-intro-right 1\n",
        )
        .unwrap();
        assert_eq!(
            check_sequent_proof(&script).first_failure.map(|f| f.line),
            Some(2)
        );
    }

    #[test]
    fn contradictories() {
        assert_eq!(contradictory(&formula("a(S,P)")), Ok(formula("o(S,P)")));
        assert_eq!(contradictory(&formula("e(S,P)")), Ok(formula("i(S,P)")));
        for text in ["a(S,P)", "i(M,S)", "e(P,P)", "o(S,M)"] {
            let f = formula(text);
            assert_eq!(contradictory(&contradictory(&f).unwrap()), Ok(f));
        }
        assert!(contradictory(&formula("ka(S,P)")).is_err());
        assert!(contradictory(&formula("~a(S,P)")).is_err());
    }

    #[test]
    fn smiley_barbara() {
        let script = parse_deduction_script(
            "1: a(S,M) |- a(S,M) ; trivial\n\
             2: a(M,P) |- a(M,P) ; trivial\n\
             3: a(S,M), a(M,P) |- a(S,P) ; rule 1 1 2\n",
        )
        .unwrap();
        assert!(check_smiley_deduction(&script).accepted);
    }

    #[test]
    fn smiley_reductio() {
        let script = parse_deduction_script(
            "1: a(M,P) |- a(M,P) ; trivial\n\
             2: e(S,P) |- e(S,P) ; trivial\n\
             3: e(S,P) |- e(P,S) ; rule 3 2\n\
             4: a(M,P), e(S,P) |- e(M,S) ; rule 2 1 3\n\
             5: a(M,P), e(S,P) |- e(S,M) ; rule 3 4\n\
             6: a(M,S) |- a(M,S) ; trivial\n\
             7: a(M,S) |- i(S,M) ; rule 4 6\n\
             8: a(M,P), a(M,S) |- i(S,P) ; reductio 5 7\n",
        )
        .unwrap();
        let report = check_smiley_deduction(&script);
        assert!(report.accepted, "{report:?}");
    }

    #[test]
    fn smiley_rejections() {
        let mismatched = parse_deduction_script(
            "1: a(S,M) |- a(S,M) ; trivial\n\
             2: a(S,P) |- a(S,P) ; trivial\n\
             3: a(S,M) |- i(S,P) ; reductio 1 2\n",
        )
        .unwrap();
        assert!(!check_smiley_deduction(&mismatched).accepted);
        let wrong_rule = parse_deduction_script(
            "1: a(S,M) |- a(S,M) ; trivial\n\
             2: a(M,P) |- a(M,P) ; trivial\n\
             3: a(S,M), a(M,P) |- a(P,S) ; rule 1 1 2\n",
        )
        .unwrap();
        assert!(!check_smiley_deduction(&wrong_rule).accepted);
        let not_trivial = parse_deduction_script("1: a(S,M) |- a(M,S) ; trivial\n").unwrap();
        assert!(!check_smiley_deduction(&not_trivial).accepted);
        let non_categorical = parse_deduction_script("1: ka(S,M) |- ka(S,M) ; trivial\n").unwrap();
        assert!(!check_smiley_deduction(&non_categorical).accepted);
    }
}
