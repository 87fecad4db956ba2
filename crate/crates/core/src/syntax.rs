//! Abstract syntax of name-logic formulas.
//!
//! A formula is built from atomic sentences (a functor applied to one or two
//! name letters) with the Boolean connectives. Name letters are plain
//! identifiers; substitutions only ever map letters to letters.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// A general name letter such as `S`, `P` or `M1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NameLetter(String);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid name letter `{0}`: expected [A-Z][A-Za-z0-9_]*")]
pub struct InvalidLetter(pub String);

impl NameLetter {
    pub fn new(id: impl Into<String>) -> Result<Self, InvalidLetter> {
        let id = id.into();
        if is_letter_id(&id) {
            Ok(NameLetter(id))
        } else {
            Err(InvalidLetter(id))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

pub(crate) fn is_letter_id(id: &str) -> bool {
    let mut chars = id.chars();
    match chars.next() {
        Some(c) if c.is_ascii_uppercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl fmt::Display for NameLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Shorthand used throughout tests and the schema tables. Panics on a
/// malformed identifier.
pub fn letter(id: &str) -> NameLetter {
    NameLetter::new(id).expect("valid name letter")
}

/// The sentence-forming functors of the language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Functor {
    /// weak universal affirmative: all S is P
    A,
    /// particular affirmative
    I,
    /// universal denial
    E,
    /// particular denial
    O,
    /// strong universal affirmative: every S is P
    KA,
    /// strong universal denial
    KE,
    /// super-strong universal denial
    KKE,
    /// weak extensional identity
    CEQ,
    /// strong extensional identity
    DEQ,
    /// "it is not the case that every S is P"
    OT,
    /// singular copula
    EPS,
    /// singular denial copula
    NEPS,
    /// identity of singular referents
    IDEQ,
    /// existence (unary)
    EX,
}

impl Functor {
    pub const ALL: [Functor; 14] = [
        Functor::A,
        Functor::I,
        Functor::E,
        Functor::O,
        Functor::KA,
        Functor::KE,
        Functor::KKE,
        Functor::CEQ,
        Functor::DEQ,
        Functor::OT,
        Functor::EPS,
        Functor::NEPS,
        Functor::IDEQ,
        Functor::EX,
    ];

    pub fn arity(self) -> usize {
        match self {
            Functor::EX => 1,
            _ => 2,
        }
    }

    /// ASCII tag used by the concrete syntax.
    pub fn tag(self) -> &'static str {
        match self {
            Functor::A => "a",
            Functor::I => "i",
            Functor::E => "e",
            Functor::O => "o",
            Functor::KA => "ka",
            Functor::KE => "ke",
            Functor::KKE => "kke",
            Functor::CEQ => "ceq",
            Functor::DEQ => "deq",
            Functor::OT => "ot",
            Functor::EPS => "eps",
            Functor::NEPS => "neps",
            Functor::IDEQ => "ideq",
            Functor::EX => "ex",
        }
    }

    /// LaTeX rendering of the functor symbol.
    pub fn symbol(self) -> &'static str {
        match self {
            Functor::A => r"\sa",
            Functor::I => r"\si",
            Functor::E => r"\se",
            Functor::O => r"\so",
            Functor::KA => r"\ska",
            Functor::KE => r"\ske",
            Functor::KKE => r"\skke",
            Functor::CEQ => r"$\circeq$",
            Functor::DEQ => r"$\doteq$",
            Functor::OT => r"\textsf{õ}",
            Functor::EPS => r"\sis",
            Functor::NEPS => r"$\bar{\sis}$",
            Functor::IDEQ => r"\idsf",
            Functor::EX => r"\ex",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Functor> {
        Functor::ALL.iter().copied().find(|f| f.tag() == tag)
    }

    /// Functors whose truth depends on whether a denotation is a singleton.
    pub fn is_singular(self) -> bool {
        matches!(self, Functor::EPS | Functor::NEPS | Functor::IDEQ)
    }
}

impl fmt::Display for Functor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Connective {
    And,
    Or,
    Implies,
    Iff,
}

impl Connective {
    pub fn token(self) -> &'static str {
        match self {
            Connective::And => "&",
            Connective::Or => "|",
            Connective::Implies => "->",
            Connective::Iff => "<->",
        }
    }

    /// Binding strength; larger binds tighter.
    pub(crate) fn precedence(self) -> u8 {
        match self {
            Connective::Iff => 1,
            Connective::Implies => 2,
            Connective::Or => 3,
            Connective::And => 4,
        }
    }

    pub fn apply(self, lhs: bool, rhs: bool) -> bool {
        match self {
            Connective::And => lhs && rhs,
            Connective::Or => lhs || rhs,
            Connective::Implies => !lhs || rhs,
            Connective::Iff => lhs == rhs,
        }
    }
}

/// An atomic sentence. `predicate` is `None` exactly for `ex`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub functor: Functor,
    pub subject: NameLetter,
    pub predicate: Option<NameLetter>,
}

impl Atom {
    pub fn binary(functor: Functor, subject: NameLetter, predicate: NameLetter) -> Atom {
        debug_assert_eq!(functor.arity(), 2);
        Atom {
            functor,
            subject,
            predicate: Some(predicate),
        }
    }

    pub fn unary(functor: Functor, subject: NameLetter) -> Atom {
        debug_assert_eq!(functor.arity(), 1);
        Atom {
            functor,
            subject,
            predicate: None,
        }
    }

    /// Predicate letter, or the subject for unary atoms.
    pub fn predicate_or_subject(&self) -> &NameLetter {
        self.predicate.as_ref().unwrap_or(&self.subject)
    }

    pub fn letters(&self) -> impl Iterator<Item = &NameLetter> {
        std::iter::once(&self.subject).chain(self.predicate.iter())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(Atom),
    Neg(Box<Formula>),
    Bin(Connective, Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(functor: Functor, subject: &str, predicate: &str) -> Formula {
        Formula::Atom(Atom::binary(functor, letter(subject), letter(predicate)))
    }

    pub fn ex(subject: &str) -> Formula {
        Formula::Atom(Atom::unary(Functor::EX, letter(subject)))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Formula {
        Formula::Neg(Box::new(self))
    }

    pub fn bin(op: Connective, lhs: Formula, rhs: Formula) -> Formula {
        Formula::Bin(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn and(self, rhs: Formula) -> Formula {
        Formula::bin(Connective::And, self, rhs)
    }

    pub fn or(self, rhs: Formula) -> Formula {
        Formula::bin(Connective::Or, self, rhs)
    }

    pub fn implies(self, rhs: Formula) -> Formula {
        Formula::bin(Connective::Implies, self, rhs)
    }

    pub fn iff(self, rhs: Formula) -> Formula {
        Formula::bin(Connective::Iff, self, rhs)
    }

    /// Left-nested conjunction of the given formulas; `None` if empty.
    pub fn conjoin(parts: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        parts.into_iter().reduce(|acc, f| acc.and(f))
    }

    pub fn letters(&self) -> BTreeSet<NameLetter> {
        let mut out = BTreeSet::new();
        self.collect_letters(&mut out);
        out
    }

    fn collect_letters(&self, out: &mut BTreeSet<NameLetter>) {
        match self {
            Formula::Atom(atom) => out.extend(atom.letters().cloned()),
            Formula::Neg(inner) => inner.collect_letters(out),
            Formula::Bin(_, lhs, rhs) => {
                lhs.collect_letters(out);
                rhs.collect_letters(out);
            }
        }
    }

    /// Distinct atoms in order of first occurrence.
    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a Atom>) {
        match self {
            Formula::Atom(atom) => {
                if !out.contains(&atom) {
                    out.push(atom);
                }
            }
            Formula::Neg(inner) => inner.collect_atoms(out),
            Formula::Bin(_, lhs, rhs) => {
                lhs.collect_atoms(out);
                rhs.collect_atoms(out);
            }
        }
    }

    pub fn functors(&self) -> BTreeSet<Functor> {
        self.atoms().into_iter().map(|a| a.functor).collect()
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom(_) => 0,
            Formula::Neg(inner) => 1 + inner.depth(),
            Formula::Bin(_, lhs, rhs) => 1 + lhs.depth().max(rhs.depth()),
        }
    }

    /// Truth value under an assignment to atoms.
    pub fn eval_with(&self, atom_value: &impl Fn(&Atom) -> bool) -> bool {
        match self {
            Formula::Atom(atom) => atom_value(atom),
            Formula::Neg(inner) => !inner.eval_with(atom_value),
            Formula::Bin(op, lhs, rhs) => {
                op.apply(lhs.eval_with(atom_value), rhs.eval_with(atom_value))
            }
        }
    }

    /// Rebuilds the formula bottom-up, replacing each atom by `f(atom)`.
    pub fn map_atoms(&self, f: &impl Fn(&Atom) -> Formula) -> Formula {
        match self {
            Formula::Atom(atom) => f(atom),
            Formula::Neg(inner) => inner.map_atoms(f).not(),
            Formula::Bin(op, lhs, rhs) => Formula::bin(*op, lhs.map_atoms(f), rhs.map_atoms(f)),
        }
    }

    /// Flattens a tree of conjunctions into its conjuncts, left to right.
    pub fn conjuncts(&self) -> Vec<&Formula> {
        match self {
            Formula::Bin(Connective::And, lhs, rhs) => {
                let mut out = lhs.conjuncts();
                out.extend(rhs.conjuncts());
                out
            }
            other => vec![other],
        }
    }
}

impl From<Atom> for Formula {
    fn from(atom: Atom) -> Self {
        Formula::Atom(atom)
    }
}

/// A letter-for-letter substitution with finite support.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Substitution(BTreeMap<NameLetter, NameLetter>);

impl Substitution {
    pub fn identity() -> Self {
        Substitution(BTreeMap::new())
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        Substitution(
            pairs
                .into_iter()
                .map(|(from, to)| (letter(from), letter(to)))
                .collect(),
        )
    }

    pub fn insert(&mut self, from: NameLetter, to: NameLetter) -> Option<NameLetter> {
        self.0.insert(from, to)
    }

    pub fn apply<'a>(&'a self, l: &'a NameLetter) -> &'a NameLetter {
        self.0.get(l).unwrap_or(l)
    }

    pub fn get(&self, l: &NameLetter) -> Option<&NameLetter> {
        self.0.get(l)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&NameLetter, &NameLetter)> {
        self.0.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// `self` followed by `after`: the result maps `L` to `after(self(L))`.
    pub fn then(&self, after: &Substitution) -> Substitution {
        let mut out: BTreeMap<NameLetter, NameLetter> = self
            .0
            .iter()
            .map(|(k, v)| (k.clone(), after.apply(v).clone()))
            .collect();
        for (k, v) in &after.0 {
            out.entry(k.clone()).or_insert_with(|| v.clone());
        }
        Substitution(out)
    }

    /// Drops identity pairs and every pair whose source is outside `keep`.
    pub fn restricted_to(&self, keep: &BTreeSet<NameLetter>) -> Substitution {
        Substitution(
            self.0
                .iter()
                .filter(|(k, v)| keep.contains(*k) && k != v)
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        )
    }

    /// Same mapping without identity pairs.
    pub fn normalized(&self) -> Substitution {
        Substitution(
            self.0
                .iter()
                .filter(|(k, v)| k != v)
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        )
    }
}

impl FromIterator<(NameLetter, NameLetter)> for Substitution {
    fn from_iter<T: IntoIterator<Item = (NameLetter, NameLetter)>>(iter: T) -> Self {
        Substitution(iter.into_iter().collect())
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (n, (k, v)) in self.0.iter().enumerate() {
            if n > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}:={v}")?;
        }
        f.write_str("]")
    }
}

pub fn substitute_atom(atom: &Atom, sigma: &Substitution) -> Atom {
    Atom {
        functor: atom.functor,
        subject: sigma.apply(&atom.subject).clone(),
        predicate: atom.predicate.as_ref().map(|p| sigma.apply(p).clone()),
    }
}

/// Replaces every letter occurrence `L` by `sigma(L)`; shape is unchanged.
pub fn substitute(formula: &Formula, sigma: &Substitution) -> Formula {
    formula.map_atoms(&|atom| Formula::Atom(substitute_atom(atom, sigma)))
}

/// Letters reserved for schema patterns.
pub const SCHEMA_LETTERS: [&str; 4] = ["S", "P", "M", "Q"];

pub fn is_schema_letter(l: &NameLetter) -> bool {
    SCHEMA_LETTERS.contains(&l.as_str())
}

/// Finds the substitution turning `pattern` into `candidate`, if any.
///
/// The result maps exactly the letters of `pattern`; it is unique when it
/// exists since every pattern letter occurs somewhere in the tree.
pub fn match_schema(pattern: &Formula, candidate: &Formula) -> Option<Substitution> {
    let mut binding = BTreeMap::new();
    if match_into(pattern, candidate, &mut binding) {
        Some(Substitution(binding))
    } else {
        None
    }
}

pub(crate) fn match_into(
    pattern: &Formula,
    candidate: &Formula,
    binding: &mut BTreeMap<NameLetter, NameLetter>,
) -> bool {
    match (pattern, candidate) {
        (Formula::Atom(p), Formula::Atom(c)) => {
            p.functor == c.functor
                && bind(&p.subject, &c.subject, binding)
                && match (&p.predicate, &c.predicate) {
                    (Some(pp), Some(cp)) => bind(pp, cp, binding),
                    (None, None) => true,
                    _ => false,
                }
        }
        (Formula::Neg(p), Formula::Neg(c)) => match_into(p, c, binding),
        (Formula::Bin(op_p, pl, pr), Formula::Bin(op_c, cl, cr)) => {
            op_p == op_c && match_into(pl, cl, binding) && match_into(pr, cr, binding)
        }
        _ => false,
    }
}

fn bind(
    from: &NameLetter,
    to: &NameLetter,
    binding: &mut BTreeMap<NameLetter, NameLetter>,
) -> bool {
    match binding.get(from) {
        Some(existing) => existing == to,
        None => {
            binding.insert(from.clone(), to.clone());
            true
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;

    fn f(text: &str) -> Formula {
        parse_formula(text).unwrap()
    }

    #[test]
    fn letter_collapse_substitution() {
        let barbara = f("(a(M,P) & a(S,M)) -> a(S,P)");
        let sigma = Substitution::from_pairs([("M", "S")]);
        assert_eq!(
            substitute(&barbara, &sigma),
            f("(a(S,P) & a(S,S)) -> a(S,P)")
        );
    }

    #[test]
    fn empty_substitution_is_identity() {
        let g = f("i(S,S)");
        assert_eq!(substitute(&g, &Substitution::identity()), g);
    }

    #[test]
    fn match_renaming() {
        let barbara = f("(a(M,P) & a(S,M)) -> a(S,P)");
        let cand = f("(a(A,B) & a(C,A)) -> a(C,B)");
        assert_eq!(
            match_schema(&barbara, &cand),
            Some(Substitution::from_pairs([
                ("M", "A"),
                ("P", "B"),
                ("S", "C")
            ]))
        );
    }

    #[test]
    fn match_diagonal_mismatch() {
        assert_eq!(match_schema(&f("a(S,S)"), &f("a(X,Y)")), None);
    }

    #[test]
    fn match_self_is_identity() {
        let datisi = f("(a(M,P) & i(M,S)) -> i(S,P)");
        let sigma = match_schema(&datisi, &datisi).unwrap();
        assert!(sigma.normalized().is_empty());
        assert_eq!(sigma.len(), 3);
    }

    #[test]
    fn match_rejects_functor_and_shape_mismatch() {
        assert_eq!(match_schema(&f("a(S,P)"), &f("i(S,P)")), None);
        assert_eq!(match_schema(&f("ex(S)"), &f("a(S,S)")), None);
        assert_eq!(match_schema(&f("~a(S,P)"), &f("a(S,P)")), None);
        assert_eq!(
            match_schema(&f("a(S,P) & a(S,P)"), &f("a(S,P) | a(S,P)")),
            None
        );
    }

    #[test]
    fn letter_validation() {
        assert!(NameLetter::new("S").is_ok());
        assert!(NameLetter::new("Mx_1").is_ok());
        assert!(NameLetter::new("s").is_err());
        assert!(NameLetter::new("").is_err());
        assert!(NameLetter::new("S-1").is_err());
    }

    #[test]
    fn composition_order() {
        let sigma = Substitution::from_pairs([("S", "P")]);
        let tau = Substitution::from_pairs([("P", "M")]);
        let g = f("a(S,P)");
        assert_eq!(substitute(&g, &sigma.then(&tau)), f("a(M,M)"));
        assert_eq!(substitute(&substitute(&g, &sigma), &tau), f("a(M,M)"));
    }

    #[test]
    fn functor_table_is_injective() {
        let tags: BTreeSet<_> = Functor::ALL.iter().map(|f| f.tag()).collect();
        let symbols: BTreeSet<_> = Functor::ALL.iter().map(|f| f.symbol()).collect();
        assert_eq!(tags.len(), 14);
        assert_eq!(symbols.len(), 14);
        for func in Functor::ALL {
            assert_eq!(Functor::from_tag(func.tag()), Some(func));
        }
    }
}
