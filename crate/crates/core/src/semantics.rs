//! Finite set-theoretic models and truth evaluation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::syntax::{Atom, Formula, Functor, NameLetter};

/// A finite universe with a denotation for finitely many letters. Letters
/// without an entry denote the empty set.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Model {
    universe: Vec<String>,
    denotation: BTreeMap<NameLetter, BTreeSet<usize>>,
}

static EMPTY: BTreeSet<usize> = BTreeSet::new();

impl Model {
    /// A model over the given (distinct) elements with every letter empty.
    pub fn new(universe: Vec<String>) -> Model {
        debug_assert_eq!(
            universe.iter().collect::<BTreeSet<_>>().len(),
            universe.len(),
            "universe elements must be distinct"
        );
        Model {
            universe,
            denotation: BTreeMap::new(),
        }
    }

    /// A universe `u0 .. u{n-1}`.
    pub fn with_size(n: usize) -> Model {
        Model::new((0..n).map(|i| format!("u{i}")).collect())
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn size(&self) -> usize {
        self.universe.len()
    }

    /// Sets `D(letter)`; on an unknown element returns its name.
    pub fn set<'a>(
        &mut self,
        letter: &NameLetter,
        elements: impl IntoIterator<Item = &'a str>,
    ) -> Result<(), String> {
        let mut set = BTreeSet::new();
        for el in elements {
            match self.universe.iter().position(|u| u == el) {
                Some(i) => {
                    set.insert(i);
                }
                None => return Err(el.to_string()),
            }
        }
        self.denotation.insert(letter.clone(), set);
        Ok(())
    }

    /// Sets `D(letter)` by element positions.
    pub fn set_indices(&mut self, letter: &NameLetter, indices: impl IntoIterator<Item = usize>) {
        let set: BTreeSet<usize> = indices.into_iter().collect();
        assert!(
            set.iter().all(|&i| i < self.universe.len()),
            "element index out of range"
        );
        self.denotation.insert(letter.clone(), set);
    }

    /// Builder form of [`Model::set`]; panics on unknown elements.
    pub fn with(mut self, letter: &str, elements: &[&str]) -> Model {
        let l = NameLetter::new(letter).expect("valid letter");
        if let Err(bad) = self.set(&l, elements.iter().copied()) {
            panic!("element `{bad}` not in universe");
        }
        self
    }

    /// Denotation as element positions (empty for unmapped letters).
    pub fn indices(&self, letter: &NameLetter) -> &BTreeSet<usize> {
        self.denotation.get(letter).unwrap_or(&EMPTY)
    }

    /// Denotation as element names, in universe order.
    pub fn elements_of<'a>(&'a self, letter: &NameLetter) -> impl Iterator<Item = &'a str> + 'a {
        self.indices(letter)
            .iter()
            .map(move |&i| self.universe[i].as_str())
    }

    /// Letters with an explicit entry, in letter order.
    pub fn denotations(&self) -> impl Iterator<Item = (&NameLetter, &BTreeSet<usize>)> {
        self.denotation.iter()
    }

    /// Adds `extra` fresh elements that belong to no denotation.
    pub fn padded(&self, extra: usize) -> Model {
        let mut out = self.clone();
        let mut next = 0;
        for _ in 0..extra {
            loop {
                let name = format!("pad{next}");
                next += 1;
                if !out.universe.contains(&name) {
                    out.universe.push(name);
                    break;
                }
            }
        }
        out
    }
}

/// Restrictions on admissible denotations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModelClass {
    /// Any universe (possibly empty) and any denotations.
    All,
    /// Nonempty universe; every letter denotes a nonempty set.
    Traditional,
    /// Every letter denotes at least two elements.
    Polyreferential,
    /// Every letter denotes either nothing or at least two elements.
    NonMonoreferential,
}

impl ModelClass {
    pub const ALL: [ModelClass; 4] = [
        ModelClass::All,
        ModelClass::Traditional,
        ModelClass::Polyreferential,
        ModelClass::NonMonoreferential,
    ];

    pub fn key(self) -> &'static str {
        match self {
            ModelClass::All => "all",
            ModelClass::Traditional => "trad",
            ModelClass::Polyreferential => "poly",
            ModelClass::NonMonoreferential => "nonmono",
        }
    }

    /// Smallest universe a member of the class may have.
    pub fn min_universe(self) -> usize {
        match self {
            ModelClass::All => 0,
            ModelClass::Traditional => 1,
            ModelClass::Polyreferential | ModelClass::NonMonoreferential => 2,
        }
    }

    /// Whether a letter may denote a set with `n` elements.
    pub fn admits_cardinality(self, n: usize) -> bool {
        match self {
            ModelClass::All => true,
            ModelClass::Traditional => n >= 1,
            ModelClass::Polyreferential => n >= 2,
            ModelClass::NonMonoreferential => n != 1,
        }
    }
}

impl fmt::Display for ModelClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for ModelClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelClass::ALL
            .iter()
            .copied()
            .find(|c| c.key() == s)
            .ok_or_else(|| format!("unknown model class `{s}` (expected all|trad|poly|nonmono)"))
    }
}

pub fn eval_atom(m: &Model, atom: &Atom) -> bool {
    let s = m.indices(&atom.subject);
    let p = m.indices(atom.predicate_or_subject());
    let subset = || s.is_subset(p);
    let meet = || !s.is_disjoint(p);
    match atom.functor {
        Functor::A => subset(),
        Functor::I => meet(),
        Functor::E => !meet(),
        Functor::O => !subset(),
        Functor::EX => !s.is_empty(),
        Functor::KA => !s.is_empty() && subset(),
        Functor::CEQ => s == p,
        Functor::DEQ => !s.is_empty() && s == p,
        Functor::KE => !s.is_empty() && !meet(),
        Functor::KKE => !s.is_empty() && !p.is_empty() && !meet(),
        Functor::OT => !(!s.is_empty() && subset()),
        Functor::EPS => s.len() == 1 && subset(),
        Functor::NEPS => s.len() == 1 && !meet(),
        Functor::IDEQ => s.len() == 1 && s == p,
    }
}

pub fn eval(m: &Model, f: &Formula) -> bool {
    f.eval_with(&|atom| eval_atom(m, atom))
}

/// Class membership, checked over the letters in `vocab`.
pub fn in_class(m: &Model, c: ModelClass, vocab: &BTreeSet<NameLetter>) -> bool {
    m.size() >= c.min_universe()
        && vocab
            .iter()
            .all(|l| c.admits_cardinality(m.indices(l).len()))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("class {class} needs a universe of at least {needed} elements, max_universe is {max}")]
    Infeasible {
        class: ModelClass,
        needed: usize,
        max: usize,
    },
}

/// A seeded random member of `class` with at most `max_universe` elements.
pub fn random_model(
    seed: u64,
    vocab: &BTreeSet<NameLetter>,
    class: ModelClass,
    max_universe: usize,
) -> Result<Model, SemanticsError> {
    let needed = class.min_universe();
    if max_universe < needed {
        return Err(SemanticsError::Infeasible {
            class,
            needed,
            max: max_universe,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(needed..=max_universe);
    let mut model = Model::with_size(n);
    for l in vocab {
        let members: Vec<usize> = loop {
            let candidate: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
            if class.admits_cardinality(candidate.len()) {
                break candidate;
            }
        };
        model.set_indices(l, members);
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::formula;
    use crate::syntax::letter;

    fn vocab(ls: &[&str]) -> BTreeSet<NameLetter> {
        ls.iter().map(|l| letter(l)).collect()
    }

    #[test]
    fn empty_names() {
        let m = Model::with_size(1).with("S", &[]).with("P", &[]);
        assert!(eval(&m, &formula("a(S,P)")));
        assert!(!eval(&m, &formula("i(S,S)")));
    }

    #[test]
    fn singular_copula() {
        let m = Model::new(vec!["u".into()]).with("S", &["u"]);
        assert!(eval(&m, &formula("eps(S,S)")));
        let m = Model::new(vec!["u".into(), "v".into()]).with("S", &["u", "v"]);
        assert!(!eval(&m, &formula("eps(S,S)")));
    }

    #[test]
    fn strong_denials_on_disjoint_singletons() {
        let m = Model::new(vec!["u".into(), "v".into()])
            .with("S", &["u"])
            .with("P", &["v"]);
        assert!(eval(&m, &formula("kke(S,P)")));
        assert!(eval(&m, &formula("ke(P,S)")));
    }

    #[test]
    fn class_membership() {
        let poly = Model::with_size(2).with("S", &["u0", "u1"]);
        let s = vocab(&["S"]);
        assert!(in_class(&poly, ModelClass::Polyreferential, &s));
        let empty = Model::with_size(2).with("S", &[]);
        assert!(in_class(&empty, ModelClass::NonMonoreferential, &s));
        assert!(!in_class(&empty, ModelClass::Traditional, &s));
        let single = Model::with_size(2).with("S", &["u0"]);
        let members: Vec<_> = ModelClass::ALL
            .into_iter()
            .filter(|&c| in_class(&single, c, &s))
            .collect();
        assert_eq!(members, vec![ModelClass::All, ModelClass::Traditional]);
        assert!(!in_class(
            &Model::default(),
            ModelClass::Traditional,
            &BTreeSet::new()
        ));
        assert!(in_class(&Model::default(), ModelClass::All, &s));
    }

    #[test]
    fn random_models_are_deterministic_and_in_class() {
        let v = vocab(&["S", "P"]);
        assert_eq!(
            random_model(1, &v, ModelClass::All, 4).unwrap(),
            random_model(1, &v, ModelClass::All, 4).unwrap()
        );
        let s = vocab(&["S"]);
        for k in 0..100 {
            let m = random_model(k, &s, ModelClass::Polyreferential, 4).unwrap();
            assert!(m.indices(&letter("S")).len() >= 2);
        }
        assert!(random_model(0, &s, ModelClass::Polyreferential, 1).is_err());
    }

    #[test]
    fn padding_leaves_truth_alone() {
        let m = Model::with_size(2)
            .with("S", &["u0"])
            .with("P", &["u0", "u1"]);
        let f = formula("eps(S,P) & ~ka(P,S) & ot(P,S) & ~ex(M)");
        assert_eq!(eval(&m, &f), eval(&m.padded(3), &f));
    }

    #[test]
    fn class_keys_round_trip() {
        for c in ModelClass::ALL {
            assert_eq!(c.key().parse::<ModelClass>(), Ok(c));
        }
    }
}
