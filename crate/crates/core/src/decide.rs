//! Validity over model classes by enumerating Venn-region cardinality types.
//!
//! For `k` letters there are `2^k` regions, indexed by bitmask: region `r`
//! lies inside `D(L_j)` iff bit `j` of `r` is set. Every functor's truth
//! depends only on which regions are empty and, for the singular functors,
//! which hold exactly one element, so a labeling of regions by
//! `Zero`/`One`/`Many` determines the truth of every formula over the
//! vocabulary. The [`OracleTable`] decides the same question by brute force
//! over all denotations in a fixed universe and shares no code with the
//! region search.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use thiserror::Error;

use crate::semantics::{in_class, Model, ModelClass};
use crate::syntax::{Atom, Connective, Formula, Functor, NameLetter};

/// Default letter cap for the three-label search.
pub const DEFAULT_CAP: usize = 4;

/// Largest number of distinct atoms for which a formula's truth table is
/// precomputed.
const TABLE_ATOMS: usize = 16;

/// Below this many labelings the search runs on one thread.
const PARALLEL_THRESHOLD: u64 = 1 << 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Zero,
    One,
    Many,
}

impl Label {
    fn weight(self) -> usize {
        match self {
            Label::Zero => 0,
            Label::One => 1,
            Label::Many => 2,
        }
    }
}

/// A cardinality type for each of the `2^k` regions of `vocab`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionLabeling {
    pub vocab: Vec<NameLetter>,
    pub labels: Vec<Label>,
}

impl RegionLabeling {
    pub fn new(vocab: Vec<NameLetter>, labels: Vec<Label>) -> RegionLabeling {
        assert_eq!(labels.len(), 1usize << vocab.len(), "one label per region");
        RegionLabeling { vocab, labels }
    }

    /// The constraint quantity `m(L)`: weighted count over regions inside `L`.
    pub fn letter_weight(&self, j: usize) -> usize {
        self.labels
            .iter()
            .enumerate()
            .filter(|(r, _)| r & (1 << j) != 0)
            .map(|(_, l)| l.weight())
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Countermodel(Model),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }

    pub fn countermodel(&self) -> Option<&Model> {
        match self {
            Verdict::Valid => None,
            Verdict::Countermodel(m) => Some(m),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecideError {
    #[error("letter cap exceeded: formula has {letters} letters, cap is {cap}")]
    CapExceeded { letters: usize, cap: usize },
    #[error("oracle cost guard exceeded: {letters} letters with universe {universe} (need letters <= 3 and letters * universe <= 18)")]
    OracleGuard { letters: usize, universe: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecideOptions {
    /// Letter cap for the three-label search; the two-label search allows
    /// one more letter.
    pub cap: usize,
    pub parallel: bool,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            cap: DEFAULT_CAP,
            parallel: true,
        }
    }
}

/// Builds the model with `0`, `1` or `2` elements per region; `None` when
/// some letter violates the class constraint.
pub fn realize(l: &RegionLabeling, c: ModelClass) -> Option<Model> {
    realize_sized(l, c, 2)
}

/// As [`realize`] with `many` elements in each `Many` region (`many >= 2`).
pub fn realize_sized(l: &RegionLabeling, c: ModelClass, many: usize) -> Option<Model> {
    assert!(many >= 2);
    let size_of = |label: Label| match label {
        Label::Zero => 0,
        Label::One => 1,
        Label::Many => many,
    };
    for j in 0..l.vocab.len() {
        if !c.admits_cardinality(l.letter_weight(j)) {
            return None;
        }
    }
    let mut region_elems: Vec<Vec<usize>> = Vec::with_capacity(l.labels.len());
    let mut next = 0;
    for &label in &l.labels {
        let n = size_of(label);
        region_elems.push((next..next + n).collect());
        next += n;
    }
    let mut model = Model::with_size(next.max(c.min_universe()));
    for (j, letter) in l.vocab.iter().enumerate() {
        let members = region_elems
            .iter()
            .enumerate()
            .filter(|(r, _)| r & (1 << j) != 0)
            .flat_map(|(_, e)| e.iter().copied());
        model.set_indices(letter, members);
    }
    Some(model)
}

/// An atom with its letters replaced by region masks.
#[derive(Debug, Clone, Copy)]
struct AtomCode {
    functor: Functor,
    s: u32,
    p: u32,
}

impl AtomCode {
    /// Truth under a labeling given by its `One` and `Many` region masks.
    fn holds(self, one: u32, many: u32) -> bool {
        let occupied = one | many;
        let s = self.s & occupied;
        let nonempty = s != 0;
        let subset = s & !self.p == 0;
        let meet = s & self.p != 0;
        let singleton = self.s & many == 0 && (self.s & one).count_ones() == 1;
        match self.functor {
            Functor::A => subset,
            Functor::I => meet,
            Functor::E => !meet,
            Functor::O => !subset,
            Functor::EX => nonempty,
            Functor::KA => nonempty && subset,
            Functor::CEQ => (self.s ^ self.p) & occupied == 0,
            Functor::DEQ => nonempty && (self.s ^ self.p) & occupied == 0,
            Functor::KE => nonempty && !meet,
            Functor::KKE => nonempty && self.p & occupied != 0 && !meet,
            Functor::OT => !(nonempty && subset),
            Functor::EPS => singleton && subset,
            Functor::NEPS => singleton && !meet,
            Functor::IDEQ => singleton && (self.s ^ self.p) & occupied == 0,
        }
    }
}

/// A formula prepared for repeated evaluation under labelings.
struct Compiled<'a> {
    formula: &'a Formula,
    atoms: Vec<&'a Atom>,
    codes: Vec<AtomCode>,
    /// Bit `t` is the formula's value when atom `i` has value bit `i` of `t`.
    table: Option<Vec<u64>>,
}

impl<'a> Compiled<'a> {
    fn new(formula: &'a Formula, vocab: &[NameLetter]) -> Compiled<'a> {
        let region_mask = |l: &NameLetter| -> u32 {
            let j = vocab.iter().position(|v| v == l).expect("letter in vocab");
            (0..1u32 << vocab.len())
                .filter(|r| r & (1 << j) != 0)
                .fold(0, |acc, r| acc | (1 << r))
        };
        let atoms = formula.atoms();
        let codes = atoms
            .iter()
            .map(|a| AtomCode {
                functor: a.functor,
                s: region_mask(&a.subject),
                p: region_mask(a.predicate_or_subject()),
            })
            .collect();
        let table = (atoms.len() <= TABLE_ATOMS).then(|| {
            let rows = 1usize << atoms.len();
            let mut bits = vec![0u64; rows.div_ceil(64)];
            for t in 0..rows {
                let value = formula.eval_with(&|atom: &Atom| {
                    let i = atoms.iter().position(|a| *a == atom).expect("known atom");
                    t & (1 << i) != 0
                });
                if value {
                    bits[t / 64] |= 1 << (t % 64);
                }
            }
            bits
        });
        Compiled {
            formula,
            atoms,
            codes,
            table,
        }
    }

    fn holds(&self, one: u32, many: u32) -> bool {
        match &self.table {
            Some(bits) => {
                let t = self.codes.iter().enumerate().fold(0usize, |acc, (i, c)| {
                    acc | (usize::from(c.holds(one, many)) << i)
                });
                bits[t / 64] & (1 << (t % 64)) != 0
            }
            None => self.formula.eval_with(&|atom: &Atom| {
                let i = self
                    .atoms
                    .iter()
                    .position(|a| *a == atom)
                    .expect("known atom");
                self.codes[i].holds(one, many)
            }),
        }
    }
}

/// Search space of labelings with the outside region fixed to `Zero`.
///
/// Labelings are numbered so that ascending index order is the
/// lexicographic order of `(label(1), label(2), .., label(2^k - 1))`.
/// Fixing region 0 loses nothing: it lies in no denotation, so it never
/// affects class membership or truth, and the lexicographically first
/// countermodel always has it empty.
struct Space {
    k: usize,
    labels: &'static [Label],
    letter_masks: Vec<u32>,
}

impl Space {
    fn new(k: usize, three_label: bool) -> Space {
        let labels: &'static [Label] = if three_label {
            &[Label::Zero, Label::One, Label::Many]
        } else {
            &[Label::Zero, Label::Many]
        };
        let letter_masks = (0..k)
            .map(|j| {
                (0..1u32 << k)
                    .filter(|r| r & (1 << j) != 0)
                    .fold(0, |acc, r| acc | (1 << r))
            })
            .collect();
        Space {
            k,
            labels,
            letter_masks,
        }
    }

    fn regions(&self) -> usize {
        (1 << self.k) - 1
    }

    fn total(&self) -> u64 {
        (self.labels.len() as u64).pow(self.regions() as u32)
    }

    /// `One` and `Many` region masks of labeling number `idx`.
    fn masks(&self, mut idx: u64) -> (u32, u32) {
        let base = self.labels.len() as u64;
        let (mut one, mut many) = (0u32, 0u32);
        for r in (1..=self.regions()).rev() {
            match self.labels[(idx % base) as usize] {
                Label::Zero => {}
                Label::One => one |= 1 << r,
                Label::Many => many |= 1 << r,
            }
            idx /= base;
        }
        (one, many)
    }

    fn admitted(&self, c: ModelClass, one: u32, many: u32) -> bool {
        self.letter_masks.iter().all(|&lm| {
            let weight = (lm & one).count_ones() + 2 * (lm & many).count_ones();
            c.admits_cardinality(weight as usize)
        })
    }

    fn labeling(&self, vocab: &[NameLetter], one: u32, many: u32) -> RegionLabeling {
        let labels = (0..1usize << self.k)
            .map(|r| {
                if one & (1 << r) != 0 {
                    Label::One
                } else if many & (1 << r) != 0 {
                    Label::Many
                } else {
                    Label::Zero
                }
            })
            .collect();
        RegionLabeling::new(vocab.to_vec(), labels)
    }
}

fn needs_three_labels(f: &Formula) -> bool {
    f.functors().into_iter().any(Functor::is_singular)
}

pub fn decide(f: &Formula, c: ModelClass) -> Result<Verdict, DecideError> {
    decide_with(f, c, DecideOptions::default())
}

/// Valid, or the first countermodel in the labeling order.
pub fn decide_with(
    f: &Formula,
    c: ModelClass,
    opts: DecideOptions,
) -> Result<Verdict, DecideError> {
    let vocab: Vec<NameLetter> = f.letters().into_iter().collect();
    let three_label = needs_three_labels(f);
    let cap = if three_label { opts.cap } else { opts.cap + 1 };
    if vocab.len() > cap {
        return Err(DecideError::CapExceeded {
            letters: vocab.len(),
            cap,
        });
    }
    let space = Space::new(vocab.len(), three_label);
    let compiled = Compiled::new(f, &vocab);
    let falsifies = |idx: u64| {
        let (one, many) = space.masks(idx);
        space.admitted(c, one, many) && !compiled.holds(one, many)
    };
    let total = space.total();
    let first = if opts.parallel && total > PARALLEL_THRESHOLD {
        (0..total).into_par_iter().find_first(|&idx| falsifies(idx))
    } else {
        (0..total).find(|&idx| falsifies(idx))
    };
    Ok(match first {
        None => Verdict::Valid,
        Some(idx) => {
            let (one, many) = space.masks(idx);
            let labeling = space.labeling(&vocab, one, many);
            Verdict::Countermodel(realize(&labeling, c).expect("admitted labeling realizes"))
        }
    })
}

/// Brute-force validity over one fixed universe `u0 .. u{n-1}`.
///
/// Assignment number `idx` gives letter `j` the subset whose bits are
/// `(idx >> (j * n)) & (2^n - 1)`. Truth vectors over all assignments are
/// precomputed for every atom over the letter set, so deciding a formula is
/// a word-wise pass over bit vectors.
pub struct OracleTable {
    letters: Vec<NameLetter>,
    n: usize,
    words: usize,
    assignments: usize,
    atom_bits: HashMap<Atom, Vec<u64>>,
    class_bits: Vec<(ModelClass, Vec<u64>)>,
}

fn check_guard(letters: usize, universe: usize) -> Result<(), DecideError> {
    if letters > 3 || letters * universe > 18 {
        Err(DecideError::OracleGuard { letters, universe })
    } else {
        Ok(())
    }
}

impl OracleTable {
    pub fn new(letters: &BTreeSet<NameLetter>, n: usize) -> Result<OracleTable, DecideError> {
        check_guard(letters.len(), n)?;
        let letters: Vec<NameLetter> = letters.iter().cloned().collect();
        let k = letters.len();
        let assignments = 1usize << (n * k);
        let words = assignments.div_ceil(64);
        let full = (1u32 << n) - 1;
        let subset_of = |idx: usize, j: usize| ((idx >> (j * n)) as u32) & full;

        let mut atom_bits = HashMap::new();
        for functor in Functor::ALL {
            for (si, s) in letters.iter().enumerate() {
                let preds: Vec<(usize, &NameLetter)> = if functor.arity() == 1 {
                    vec![(si, s)]
                } else {
                    letters.iter().enumerate().collect()
                };
                for (pi, p) in preds {
                    let atom = if functor.arity() == 1 {
                        Atom::unary(functor, s.clone())
                    } else {
                        Atom::binary(functor, s.clone(), p.clone())
                    };
                    let mut bits = vec![0u64; words];
                    for idx in 0..assignments {
                        if brute_atom(functor, subset_of(idx, si), subset_of(idx, pi)) {
                            bits[idx / 64] |= 1 << (idx % 64);
                        }
                    }
                    atom_bits.insert(atom, bits);
                }
            }
        }

        let class_bits = ModelClass::ALL
            .iter()
            .map(|&c| {
                let mut bits = vec![0u64; words];
                if n >= c.min_universe() {
                    for idx in 0..assignments {
                        let ok = (0..k)
                            .all(|j| c.admits_cardinality(subset_of(idx, j).count_ones() as usize));
                        if ok {
                            bits[idx / 64] |= 1 << (idx % 64);
                        }
                    }
                }
                (c, bits)
            })
            .collect();

        Ok(OracleTable {
            letters,
            n,
            words,
            assignments,
            atom_bits,
            class_bits,
        })
    }

    pub fn universe_size(&self) -> usize {
        self.n
    }

    fn compile<'t>(&'t self, f: &Formula) -> WordExpr<'t> {
        match f {
            Formula::Atom(atom) => WordExpr::Atom(
                self.atom_bits
                    .get(atom)
                    .unwrap_or_else(|| panic!("atom {atom} outside the oracle's letters")),
            ),
            Formula::Neg(inner) => WordExpr::Neg(Box::new(self.compile(inner))),
            Formula::Bin(op, lhs, rhs) => WordExpr::Bin(
                *op,
                Box::new(self.compile(lhs)),
                Box::new(self.compile(rhs)),
            ),
        }
    }

    /// First falsifying assignment among class members, if any.
    pub fn decide(&self, f: &Formula, c: ModelClass) -> Verdict {
        assert!(
            f.letters().iter().all(|l| self.letters.contains(l)),
            "formula letters outside the oracle's letter set"
        );
        let (_, members) = self
            .class_bits
            .iter()
            .find(|(cc, _)| *cc == c)
            .expect("every class tabulated");
        let compiled = self.compile(f);
        for (w, &member) in members.iter().enumerate().take(self.words) {
            let falsifiers = !compiled.word(w) & member;
            if falsifiers != 0 {
                let idx = w * 64 + falsifiers.trailing_zeros() as usize;
                debug_assert!(idx < self.assignments);
                return Verdict::Countermodel(self.model(idx));
            }
        }
        Verdict::Valid
    }

    fn model(&self, idx: usize) -> Model {
        let mut m = Model::with_size(self.n);
        let full = (1usize << self.n) - 1;
        for (j, l) in self.letters.iter().enumerate() {
            let bits = (idx >> (j * self.n)) & full;
            m.set_indices(l, (0..self.n).filter(|e| bits & (1 << e) != 0));
        }
        m
    }
}

enum WordExpr<'t> {
    Atom(&'t [u64]),
    Neg(Box<WordExpr<'t>>),
    Bin(Connective, Box<WordExpr<'t>>, Box<WordExpr<'t>>),
}

impl WordExpr<'_> {
    fn word(&self, w: usize) -> u64 {
        match self {
            WordExpr::Atom(bits) => bits[w],
            WordExpr::Neg(inner) => !inner.word(w),
            WordExpr::Bin(op, lhs, rhs) => {
                let (a, b) = (lhs.word(w), rhs.word(w));
                match op {
                    Connective::And => a & b,
                    Connective::Or => a | b,
                    Connective::Implies => !a | b,
                    Connective::Iff => !(a ^ b),
                }
            }
        }
    }
}

fn brute_atom(functor: Functor, s: u32, p: u32) -> bool {
    let subset = s & !p == 0;
    let meet = s & p != 0;
    let single = s.count_ones() == 1;
    match functor {
        Functor::A => subset,
        Functor::I => meet,
        Functor::E => !meet,
        Functor::O => !subset,
        Functor::EX => s != 0,
        Functor::KA => s != 0 && subset,
        Functor::CEQ => s == p,
        Functor::DEQ => s != 0 && s == p,
        Functor::KE => s != 0 && !meet,
        Functor::KKE => s != 0 && p != 0 && !meet,
        Functor::OT => !(s != 0 && subset),
        Functor::EPS => single && subset,
        Functor::NEPS => single && !meet,
        Functor::IDEQ => single && s == p,
    }
}

/// Exhaustive check over every denotation of `letters(f)` in a universe of
/// exactly `max_universe` elements.
pub fn oracle_decide(
    f: &Formula,
    c: ModelClass,
    max_universe: usize,
) -> Result<Verdict, DecideError> {
    let letters = f.letters();
    check_guard(letters.len(), max_universe)?;
    Ok(OracleTable::new(&letters, max_universe)?.decide(f, c))
}

/// Re-checks a countermodel against the formula and class.
pub fn is_countermodel(m: &Model, f: &Formula, c: ModelClass) -> bool {
    in_class(m, c, &f.letters()) && !crate::semantics::eval(m, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{format_model, formula};
    use crate::syntax::letter;

    fn labeling(vocab: &[&str], labels: &[Label]) -> RegionLabeling {
        RegionLabeling::new(vocab.iter().map(|l| letter(l)).collect(), labels.to_vec())
    }

    #[test]
    fn realize_respects_class_constraints() {
        let single = labeling(&["S"], &[Label::Zero, Label::One]);
        let m = realize(&single, ModelClass::All).unwrap();
        assert_eq!(m.indices(&letter("S")).len(), 1);
        assert!(realize(&single, ModelClass::Polyreferential).is_none());

        let empty = labeling(&["S"], &[Label::Zero, Label::Zero]);
        assert!(realize(&empty, ModelClass::Traditional).is_none());
        let m = realize(&empty, ModelClass::NonMonoreferential).unwrap();
        assert!(m.indices(&letter("S")).is_empty());
        assert_eq!(m.size(), 2);

        let many = labeling(&["P", "S"], &[Label::Many; 4]);
        for c in ModelClass::ALL {
            assert!(realize(&many, c).is_some(), "{c}");
        }
    }

    #[test]
    fn existence_fails_for_empty_names() {
        assert_eq!(
            decide(&formula("i(S,S)"), ModelClass::Traditional),
            Ok(Verdict::Valid)
        );
        let Verdict::Countermodel(m) = decide(&formula("i(S,S)"), ModelClass::All).unwrap() else {
            panic!("expected a countermodel");
        };
        assert_eq!(format_model(&m), r#"{"universe":[],"denotation":{"S":[]}}"#);
    }

    #[test]
    fn subalternation_needs_existential_import() {
        let f = formula("a(S,P) -> i(S,P)");
        assert!(!decide(&f, ModelClass::All).unwrap().is_valid());
        assert!(decide(&f, ModelClass::Traditional).unwrap().is_valid());
    }

    #[test]
    fn dagger_is_valid() {
        assert!(decide(&formula("i(S,P) -> ka(S,S)"), ModelClass::All)
            .unwrap()
            .is_valid());
    }

    #[test]
    fn singular_existence_transfers_without_singletons() {
        let f = formula("eps(S,S) -> eps(M,M)");
        assert!(decide(&f, ModelClass::NonMonoreferential)
            .unwrap()
            .is_valid());
        assert!(!decide(&f, ModelClass::All).unwrap().is_valid());
    }

    #[test]
    fn oracle_basics() {
        assert_eq!(
            oracle_decide(&formula("a(S,S)"), ModelClass::All, 2),
            Ok(Verdict::Valid)
        );
        let v = oracle_decide(&formula("ex(S)"), ModelClass::All, 2).unwrap();
        let m = v.countermodel().unwrap();
        assert!(m.indices(&letter("S")).is_empty());
        assert!(matches!(
            oracle_decide(&formula("a(S,P) & a(M,Q)"), ModelClass::All, 2),
            Err(DecideError::OracleGuard { .. })
        ));
        assert!(matches!(
            oracle_decide(&formula("a(S,P) & a(M,P)"), ModelClass::All, 7),
            Err(DecideError::OracleGuard { .. })
        ));
    }

    #[test]
    fn cap_is_enforced() {
        let five = formula("a(S,P) & a(M,Q) -> i(R,R)");
        assert!(decide(&five, ModelClass::All).is_ok());
        let five_eps = formula("a(S,P) & a(M,Q) -> eps(R,R)");
        assert_eq!(
            decide(&five_eps, ModelClass::All),
            Err(DecideError::CapExceeded { letters: 5, cap: 4 })
        );
        let six = formula("a(S,P) & a(M,Q) -> a(R,T)");
        assert!(matches!(
            decide(&six, ModelClass::All),
            Err(DecideError::CapExceeded { letters: 6, cap: 5 })
        ));
    }

    #[test]
    fn parallel_and_sequential_agree() {
        for text in [
            "a(M,P) & a(M,S) -> i(S,P)",
            "eps(S,M) & a(M,P) -> eps(S,P)",
            "eps(S,M) & i(M,P) -> eps(S,P)",
            "eps(S,P) & eps(Q,M) -> ideq(S,Q) | ~ideq(S,Q)",
        ] {
            let f = formula(text);
            for c in ModelClass::ALL {
                let par = decide_with(
                    &f,
                    c,
                    DecideOptions {
                        cap: 4,
                        parallel: true,
                    },
                );
                let seq = decide_with(
                    &f,
                    c,
                    DecideOptions {
                        cap: 4,
                        parallel: false,
                    },
                );
                assert_eq!(par, seq, "{text} / {c}");
            }
        }
    }

    #[test]
    fn countermodels_recheck() {
        for text in [
            "eps(S,P) -> eps(P,S)",
            "kke(S,P) -> ke(P,S) & ~ex(M)",
            "deq(S,P) <-> ceq(S,P)",
            "neps(S,P) | ideq(S,S)",
        ] {
            let f = formula(text);
            for c in ModelClass::ALL {
                if let Verdict::Countermodel(m) = decide(&f, c).unwrap() {
                    assert!(is_countermodel(&m, &f, c), "{text} / {c}");
                }
            }
        }
    }
}
