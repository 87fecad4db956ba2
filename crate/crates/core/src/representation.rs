//! Finite relational structures (B1, B3 and C algebras), their
//! representation by sets of I-sets, and canonical models built from the
//! atomic diagram of a finite model.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::semantics::{eval_atom, in_class, Model, ModelClass};
use crate::syntax::{Atom, Formula, Functor, NameLetter};

/// Largest carrier for which subsets are enumerated.
pub const MAX_CARRIER: usize = 16;

/// Largest vocabulary for which filters are enumerated.
pub const MAX_VOCAB: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepresentationError {
    #[error("carrier must be nonempty")]
    EmptyCarrier,
    #[error("duplicate carrier element `{0}`")]
    DuplicateElement(String),
    #[error("relation {relation} mentions `{element}`, which is not in the carrier")]
    UnknownElement { relation: String, element: String },
    #[error("carrier has {size} elements, at most {max} are supported")]
    CarrierTooLarge { size: usize, max: usize },
    #[error("vocabulary has {size} letters, at most {max} are supported")]
    VocabTooLarge { size: usize, max: usize },
    #[error("structure is not a {kind}-algebra: {first}")]
    NotAnAlgebra { kind: AlgebraKind, first: Violation },
    #[error("the model is not traditional on the vocabulary")]
    NotTraditional,
    #[error("vocabulary must be nonempty")]
    EmptyVocab,
    #[error("invalid structure JSON: {0}")]
    Json(String),
}

/// Which axioms a structure is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlgebraKind {
    B1,
    B3,
    C,
}

impl AlgebraKind {
    pub const ALL: [AlgebraKind; 3] = [AlgebraKind::B1, AlgebraKind::B3, AlgebraKind::C];

    pub fn key(self) -> &'static str {
        match self {
            AlgebraKind::B1 => "b1",
            AlgebraKind::B3 => "b3",
            AlgebraKind::C => "c",
        }
    }
}

impl fmt::Display for AlgebraKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlgebraKind::B1 => "B1",
            AlgebraKind::B3 => "B3",
            AlgebraKind::C => "C",
        })
    }
}

impl FromStr for AlgebraKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AlgebraKind::ALL
            .into_iter()
            .find(|k| k.key() == s.to_ascii_lowercase())
            .ok_or_else(|| format!("unknown structure kind `{s}` (expected b1|b3|c)"))
    }
}

/// A carrier with relations `A`, `I` and optionally `eps`, stored as
/// adjacency matrices over carrier positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationalStructure {
    carrier: Vec<String>,
    a: Vec<Vec<bool>>,
    i: Vec<Vec<bool>>,
    eps: Option<Vec<Vec<bool>>>,
}

#[derive(Serialize, Deserialize)]
struct StructureJson {
    carrier: Vec<String>,
    #[serde(rename = "A")]
    a: Vec<(String, String)>,
    #[serde(rename = "I")]
    i: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    eps: Option<Vec<(String, String)>>,
}

type Pairs<'a> = &'a [(usize, usize)];

impl RelationalStructure {
    pub fn new(
        carrier: Vec<String>,
        a: Pairs<'_>,
        i: Pairs<'_>,
        eps: Option<Pairs<'_>>,
    ) -> Result<RelationalStructure, RepresentationError> {
        if carrier.is_empty() {
            return Err(RepresentationError::EmptyCarrier);
        }
        let mut seen = BTreeSet::new();
        for c in &carrier {
            if !seen.insert(c) {
                return Err(RepresentationError::DuplicateElement(c.clone()));
            }
        }
        let n = carrier.len();
        let matrix =
            |pairs: Pairs<'_>, name: &str| -> Result<Vec<Vec<bool>>, RepresentationError> {
                let mut m = vec![vec![false; n]; n];
                for &(x, y) in pairs {
                    if x >= n || y >= n {
                        return Err(RepresentationError::UnknownElement {
                            relation: name.into(),
                            element: format!("#{}", x.max(y)),
                        });
                    }
                    m[x][y] = true;
                }
                Ok(m)
            };
        Ok(RelationalStructure {
            a: matrix(a, "A")?,
            i: matrix(i, "I")?,
            eps: eps.map(|e| matrix(e, "eps")).transpose()?,
            carrier,
        })
    }

    pub fn from_json(text: &str) -> Result<RelationalStructure, RepresentationError> {
        let raw: StructureJson =
            serde_json::from_str(text).map_err(|e| RepresentationError::Json(e.to_string()))?;
        let pos = |relation: &str, x: &str| -> Result<usize, RepresentationError> {
            raw.carrier.iter().position(|c| c == x).ok_or_else(|| {
                RepresentationError::UnknownElement {
                    relation: relation.into(),
                    element: x.into(),
                }
            })
        };
        let resolve = |relation: &str, pairs: &[(String, String)]| {
            pairs
                .iter()
                .map(|(x, y)| Ok((pos(relation, x)?, pos(relation, y)?)))
                .collect::<Result<Vec<_>, RepresentationError>>()
        };
        let a = resolve("A", &raw.a)?;
        let i = resolve("I", &raw.i)?;
        let eps = raw.eps.as_deref().map(|e| resolve("eps", e)).transpose()?;
        RelationalStructure::new(raw.carrier.clone(), &a, &i, eps.as_deref())
    }

    pub fn to_json(&self) -> String {
        let pairs = |m: &Vec<Vec<bool>>| {
            let mut out = Vec::new();
            for (x, row) in m.iter().enumerate() {
                for (y, &on) in row.iter().enumerate() {
                    if on {
                        out.push((self.carrier[x].clone(), self.carrier[y].clone()));
                    }
                }
            }
            out
        };
        let raw = StructureJson {
            carrier: self.carrier.clone(),
            a: pairs(&self.a),
            i: pairs(&self.i),
            eps: self.eps.as_ref().map(pairs),
        };
        serde_json::to_string(&raw).expect("structure serializes")
    }

    /// The structure `⟨vocab, a, i, eps⟩` read off a model: `A(S,P)` iff
    /// `a(S,P)` is true, and so on.
    pub fn harvest(
        model: &Model,
        vocab: &BTreeSet<NameLetter>,
        with_eps: bool,
    ) -> Result<RelationalStructure, RepresentationError> {
        let letters: Vec<&NameLetter> = vocab.iter().collect();
        let rel = |functor: Functor| -> Vec<(usize, usize)> {
            let mut out = Vec::new();
            for (x, s) in letters.iter().enumerate() {
                for (y, p) in letters.iter().enumerate() {
                    let atom = Atom::binary(functor, (*s).clone(), (*p).clone());
                    if eval_atom(model, &atom) {
                        out.push((x, y));
                    }
                }
            }
            out
        };
        let eps = with_eps.then(|| rel(Functor::EPS));
        RelationalStructure::new(
            letters.iter().map(|l| l.as_str().to_string()).collect(),
            &rel(Functor::A),
            &rel(Functor::I),
            eps.as_deref(),
        )
    }

    pub fn carrier(&self) -> &[String] {
        &self.carrier
    }

    pub fn size(&self) -> usize {
        self.carrier.len()
    }

    pub fn a(&self, x: usize, y: usize) -> bool {
        self.a[x][y]
    }

    pub fn i(&self, x: usize, y: usize) -> bool {
        self.i[x][y]
    }

    /// `false` everywhere when the structure has no `eps` relation.
    pub fn eps(&self, x: usize, y: usize) -> bool {
        self.eps.as_ref().is_some_and(|e| e[x][y])
    }

    pub fn has_eps(&self) -> bool {
        self.eps.is_some()
    }
}

/// A failed condition with the carrier elements that witness it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub condition: &'static str,
    pub witness: Vec<String>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} fails at ({})",
            self.condition,
            self.witness.join(", ")
        )
    }
}

/// All violations of the axioms of `kind`, in a fixed order (conditions in
/// order, witnesses lexicographic by carrier position).
pub fn verify_structure(s: &RelationalStructure, kind: AlgebraKind) -> Vec<Violation> {
    let n = s.size();
    let name = |x: usize| s.carrier[x].clone();
    let mut out = Vec::new();
    let mut fail = |condition: &'static str, w: &[usize]| {
        out.push(Violation {
            condition,
            witness: w.iter().map(|&x| name(x)).collect(),
        })
    };
    let pairs = || (0..n).flat_map(move |x| (0..n).map(move |y| (x, y)));
    let triples = || pairs().flat_map(move |(x, y)| (0..n).map(move |z| (x, y, z)));

    for x in (0..n).filter(|&a| !s.a(a, a)) {
        fail("B1", &[x]);
    }
    for (a, b, c) in triples() {
        if s.a(a, b) && s.a(b, c) && !s.a(a, c) {
            fail("B2", &[a, b, c]);
        }
    }
    for (a, b, c) in triples() {
        if s.a(a, b) && s.i(a, c) && !s.i(c, b) {
            fail("B3", &[a, b, c]);
        }
    }
    match kind {
        AlgebraKind::B1 | AlgebraKind::C => {
            for (a, b) in pairs() {
                if s.i(a, b) && !s.i(a, a) {
                    fail("B4", &[a, b]);
                }
            }
            for (a, b) in pairs() {
                if !s.i(a, a) && !s.a(a, b) {
                    fail("B5", &[a, b]);
                }
            }
        }
        AlgebraKind::B3 => {
            for x in (0..n).filter(|&a| !s.i(a, a)) {
                fail("B4'", &[x]);
            }
        }
    }
    if kind == AlgebraKind::C {
        if !s.has_eps() {
            out.push(Violation {
                condition: "eps relation present",
                witness: Vec::new(),
            });
            return out;
        }
        for (a, b) in pairs() {
            if s.eps(a, b) && !s.eps(a, a) {
                fail("C0", &[a, b]);
            }
        }
        for (a, b) in pairs() {
            if s.eps(a, b) && !s.a(a, b) {
                fail("C1", &[a, b]);
            }
        }
        for x in (0..n).filter(|&a| s.eps(a, a) && !s.i(a, a)) {
            fail("C2", &[x]);
        }
        for (a, b, c) in triples() {
            if s.a(a, c) && s.eps(c, c) && s.i(a, b) && !s.eps(a, b) {
                fail("C4", &[a, b, c]);
            }
        }
    }
    out
}

/// A nonempty subset of the carrier, closed under `A` and pairwise
/// `I`-related.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ISet(pub BTreeSet<usize>);

impl ISet {
    pub fn contains(&self, x: usize) -> bool {
        self.0.contains(&x)
    }

    pub fn names<'a>(&'a self, s: &'a RelationalStructure) -> impl Iterator<Item = &'a str> + 'a {
        self.0.iter().map(|&x| s.carrier[x].as_str())
    }
}

fn is_iset_mask(s: &RelationalStructure, mask: u32) -> bool {
    let n = s.size();
    let has = |x: usize| mask >> x & 1 == 1;
    mask != 0
        && (0..n)
            .filter(|&x| has(x))
            .all(|x| (0..n).all(|y| (!s.a(x, y) || has(y)) && (!has(y) || s.i(x, y))))
}

fn mask_set(mask: u32) -> BTreeSet<usize> {
    (0..32).filter(|&x| mask >> x & 1 == 1).collect()
}

/// Every I-set, ordered by the bitmask of its members.
pub fn i_sets(s: &RelationalStructure) -> Result<Vec<ISet>, RepresentationError> {
    let n = s.size();
    if n > MAX_CARRIER {
        return Err(RepresentationError::CarrierTooLarge {
            size: n,
            max: MAX_CARRIER,
        });
    }
    Ok((1..1u32 << n)
        .filter(|&m| is_iset_mask(s, m))
        .map(|m| ISet(mask_set(m)))
        .collect())
}

pub fn is_iset(s: &RelationalStructure, set: &BTreeSet<usize>) -> bool {
    let n = s.size();
    !set.is_empty()
        && set.iter().all(|&x| {
            (0..n).all(|y| (!s.a(x, y) || set.contains(&y)) && (!set.contains(&y) || s.i(x, y)))
        })
}

/// `[a,b] = {c : Aac or Abc}` when `Iab`, otherwise `None`.
pub fn bracket(s: &RelationalStructure, a: usize, b: usize) -> Option<ISet> {
    s.i(a, b)
        .then(|| ISet((0..s.size()).filter(|&c| s.a(a, c) || s.a(b, c)).collect()))
}

/// A point of the representing family: an I-set, or (for C-algebras) a
/// carrier element.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Point {
    Set(ISet),
    Element(usize),
}

/// A pointwise mismatch between a relation and its set-theoretic image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub property: &'static str,
    pub witness: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RepresentationReport {
    pub mismatches: Vec<Mismatch>,
}

impl RepresentationReport {
    pub fn holds(&self) -> bool {
        self.mismatches.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Representation {
    pub kind: AlgebraKind,
    /// `e(a)` for each carrier position.
    pub image: Vec<BTreeSet<Point>>,
    pub report: RepresentationReport,
}

/// Maps each element to the set of points containing it and checks that
/// `A`, `I` (and `eps`) become inclusion, overlap (and singleton inclusion).
pub fn represent(
    s: &RelationalStructure,
    kind: AlgebraKind,
) -> Result<Representation, RepresentationError> {
    if let Some(first) = verify_structure(s, kind).into_iter().next() {
        return Err(RepresentationError::NotAnAlgebra { kind, first });
    }
    let family = i_sets(s)?;
    let n = s.size();
    let image: Vec<BTreeSet<Point>> = (0..n)
        .map(|a| {
            let mut e: BTreeSet<Point> = family
                .iter()
                .filter(|f| f.contains(a))
                .cloned()
                .map(Point::Set)
                .collect();
            if kind == AlgebraKind::C && !s.eps(a, a) {
                e.extend(
                    (0..n)
                        .filter(|&c| s.i(c, c) && s.a(c, a))
                        .map(Point::Element),
                );
            }
            e
        })
        .collect();

    let mut report = RepresentationReport::default();
    let mut mismatch = |property: &'static str, w: &[usize]| {
        report.mismatches.push(Mismatch {
            property,
            witness: w.iter().map(|&x| s.carrier[x].clone()).collect(),
        })
    };
    for a in 0..n {
        for b in 0..n {
            let ea = &image[a];
            let eb = &image[b];
            if s.a(a, b) != ea.is_subset(eb) {
                mismatch("A iff inclusion", &[a, b]);
            }
            if s.i(a, b) != !ea.is_disjoint(eb) {
                mismatch("I iff overlap", &[a, b]);
            }
            if kind == AlgebraKind::C && s.eps(a, b) != (ea.len() == 1 && ea.is_subset(eb)) {
                mismatch("eps iff singleton inclusion", &[a, b]);
            }
        }
        if kind == AlgebraKind::B3 && image[a].is_empty() {
            mismatch("nonempty image", &[a]);
        }
    }
    Ok(Representation {
        kind,
        image,
        report,
    })
}

/// Systems whose canonical models are built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CanonicalSystem {
    Sh,
    Luk,
    Shis,
}

impl CanonicalSystem {
    pub const ALL: [CanonicalSystem; 3] = [
        CanonicalSystem::Sh,
        CanonicalSystem::Luk,
        CanonicalSystem::Shis,
    ];

    pub fn key(self) -> &'static str {
        match self {
            CanonicalSystem::Sh => "sh",
            CanonicalSystem::Luk => "luk",
            CanonicalSystem::Shis => "shis",
        }
    }

    /// Functors whose atomic truth the canonical model preserves.
    pub fn functors(self) -> &'static [Functor] {
        match self {
            CanonicalSystem::Sh | CanonicalSystem::Luk => {
                &[Functor::A, Functor::I, Functor::E, Functor::O]
            }
            CanonicalSystem::Shis => {
                &[Functor::A, Functor::I, Functor::E, Functor::O, Functor::EPS]
            }
        }
    }

    /// Model classes a diagram may be drawn from.
    pub fn source_classes(self) -> &'static [ModelClass] {
        match self {
            CanonicalSystem::Luk => &[ModelClass::Traditional, ModelClass::Polyreferential],
            CanonicalSystem::Sh | CanonicalSystem::Shis => &[
                ModelClass::All,
                ModelClass::Traditional,
                ModelClass::Polyreferential,
                ModelClass::NonMonoreferential,
            ],
        }
    }
}

impl FromStr for CanonicalSystem {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CanonicalSystem::ALL
            .into_iter()
            .find(|c| c.key() == s)
            .ok_or_else(|| format!("unknown system `{s}` (expected sh|luk|shis)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CanonicalMethod {
    Filters,
    Pairs,
}

impl CanonicalMethod {
    pub const ALL: [CanonicalMethod; 2] = [CanonicalMethod::Filters, CanonicalMethod::Pairs];

    pub fn key(self) -> &'static str {
        match self {
            CanonicalMethod::Filters => "filters",
            CanonicalMethod::Pairs => "pairs",
        }
    }
}

impl FromStr for CanonicalMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CanonicalMethod::ALL
            .into_iter()
            .find(|c| c.key() == s)
            .ok_or_else(|| format!("unknown method `{s}` (expected filters|pairs)"))
    }
}

/// The atomic diagram of a model restricted to a vocabulary: membership of
/// an atomic formula is its truth in the backing model.
#[derive(Debug, Clone)]
pub struct DiagramTheory<'m> {
    model: &'m Model,
    vocab: Vec<NameLetter>,
}

impl<'m> DiagramTheory<'m> {
    pub fn new(model: &'m Model, vocab: &BTreeSet<NameLetter>) -> DiagramTheory<'m> {
        DiagramTheory {
            model,
            vocab: vocab.iter().cloned().collect(),
        }
    }

    pub fn vocab(&self) -> &[NameLetter] {
        &self.vocab
    }

    /// Whether `functor(vocab[s], vocab[p])` belongs to the diagram.
    pub fn holds(&self, functor: Functor, s: usize, p: usize) -> bool {
        eval_atom(
            self.model,
            &Atom::binary(functor, self.vocab[s].clone(), self.vocab[p].clone()),
        )
    }

    fn a(&self, s: usize, p: usize) -> bool {
        self.holds(Functor::A, s, p)
    }

    fn i(&self, s: usize, p: usize) -> bool {
        self.holds(Functor::I, s, p)
    }

    fn eps(&self, s: usize, p: usize) -> bool {
        self.holds(Functor::EPS, s, p)
    }

    /// Whether a set of vocabulary positions is a filter: nonempty, closed
    /// under `a` and pairwise `i`.
    pub fn is_filter(&self, set: &BTreeSet<usize>) -> bool {
        let k = self.vocab.len();
        !set.is_empty()
            && set.iter().all(|&s| {
                (0..k).all(|p| {
                    (!self.a(s, p) || set.contains(&p)) && (!set.contains(&p) || self.i(s, p))
                })
            })
    }

    /// Every filter, ordered by bitmask.
    pub fn filters(&self) -> Vec<BTreeSet<usize>> {
        let k = self.vocab.len();
        (1..1u32 << k)
            .map(mask_set)
            .filter(|set| self.is_filter(set))
            .collect()
    }

    /// `[S,P] = {M : S a M or P a M}`.
    pub fn bracket(&self, s: usize, p: usize) -> BTreeSet<usize> {
        (0..self.vocab.len())
            .filter(|&m| self.a(s, m) || self.a(p, m))
            .collect()
    }

    /// `S ~ P` iff `S a P` and `P a S`.
    pub fn equivalent(&self, s: usize, p: usize) -> bool {
        self.a(s, p) && self.a(p, s)
    }

    /// The equivalence class of `s` under `~`.
    pub fn block(&self, s: usize) -> BTreeSet<usize> {
        (0..self.vocab.len())
            .filter(|&p| self.equivalent(s, p))
            .collect()
    }
}

fn check_vocab(vocab: &BTreeSet<NameLetter>) -> Result<(), RepresentationError> {
    if vocab.is_empty() {
        return Err(RepresentationError::EmptyVocab);
    }
    if vocab.len() > MAX_VOCAB {
        return Err(RepresentationError::VocabTooLarge {
            size: vocab.len(),
            max: MAX_VOCAB,
        });
    }
    Ok(())
}

/// Builds a model from named points; each letter's denotation is a set of
/// point names.
fn assemble(
    vocab: &[NameLetter],
    points: Vec<String>,
    denotation: impl Fn(usize) -> BTreeSet<String>,
) -> Model {
    let mut model = Model::new(points);
    for (l, letter) in vocab.iter().enumerate() {
        let members = denotation(l);
        model
            .set(letter, members.iter().map(String::as_str))
            .expect("denotation uses universe points");
    }
    model
}

fn set_name(prefix: &str, close: &str, vocab: &[NameLetter], set: &BTreeSet<usize>) -> String {
    let inner: Vec<&str> = set.iter().map(|&i| vocab[i].as_str()).collect();
    format!("{prefix}{}{close}", inner.join(","))
}

fn filter_name(vocab: &[NameLetter], set: &BTreeSet<usize>) -> String {
    set_name("[", "]", vocab, set)
}

fn pair_name(vocab: &[NameLetter], m: usize, q: usize) -> String {
    set_name("{", "}", vocab, &[m, q].into())
}

fn block_name(vocab: &[NameLetter], set: &BTreeSet<usize>) -> String {
    set_name("|", "|", vocab, set)
}

/// The canonical model of the atomic diagram of `m` over `vocab`.
pub fn canonical_model(
    m: &Model,
    vocab: &BTreeSet<NameLetter>,
    sys: CanonicalSystem,
    method: CanonicalMethod,
) -> Result<Model, RepresentationError> {
    check_vocab(vocab)?;
    if sys == CanonicalSystem::Luk && !in_class(m, ModelClass::Traditional, vocab) {
        return Err(RepresentationError::NotTraditional);
    }
    let g = DiagramTheory::new(m, vocab);
    let v = g.vocab().to_vec();
    let k = v.len();
    let nonempty: Vec<usize> = (0..k).filter(|&l| g.i(l, l)).collect();
    let singular = |l: usize| sys == CanonicalSystem::Shis && g.eps(l, l);

    Ok(match method {
        CanonicalMethod::Filters => {
            let filters = g.filters();
            let mut points: Vec<String> = filters.iter().map(|f| filter_name(&v, f)).collect();
            if sys == CanonicalSystem::Shis {
                points.extend(nonempty.iter().map(|&l| v[l].as_str().to_string()));
            }
            assemble(&v, points, |l| {
                let mut d: BTreeSet<String> = filters
                    .iter()
                    .filter(|f| f.contains(&l))
                    .map(|f| filter_name(&v, f))
                    .collect();
                if sys == CanonicalSystem::Shis && !singular(l) {
                    d.extend(
                        nonempty
                            .iter()
                            .filter(|&&mm| g.a(mm, l))
                            .map(|&mm| v[mm].as_str().to_string()),
                    );
                }
                d
            })
        }
        CanonicalMethod::Pairs => {
            let pairs: Vec<(usize, usize)> = (0..k)
                .flat_map(|mm| (mm..k).map(move |q| (mm, q)))
                .filter(|&(mm, q)| g.i(mm, q))
                .collect();
            let mut points: Vec<String> =
                pairs.iter().map(|&(mm, q)| pair_name(&v, mm, q)).collect();
            let mut blocks: Vec<BTreeSet<usize>> = Vec::new();
            if sys == CanonicalSystem::Shis {
                for &l in &nonempty {
                    let b = g.block(l);
                    if !blocks.contains(&b) {
                        blocks.push(b);
                    }
                }
                points.extend(nonempty.iter().map(|&l| v[l].as_str().to_string()));
                points.extend(blocks.iter().map(|b| block_name(&v, b)));
            }
            assemble(&v, points, |l| {
                let block_part = nonempty
                    .iter()
                    .filter(|&&mm| g.a(mm, l))
                    .map(|&mm| block_name(&v, &g.block(mm)));
                if singular(l) {
                    return block_part.collect();
                }
                let mut d: BTreeSet<String> = pairs
                    .iter()
                    .filter(|&&(mm, q)| g.a(mm, l) || g.a(q, l))
                    .map(|&(mm, q)| pair_name(&v, mm, q))
                    .collect();
                if sys == CanonicalSystem::Shis {
                    d.extend(block_part);
                    d.extend(
                        nonempty
                            .iter()
                            .filter(|&&mm| g.a(mm, l))
                            .map(|&mm| v[mm].as_str().to_string()),
                    );
                }
                d
            })
        }
    })
}

/// The variant canonical model for the `a, i, e, o` systems in which every
/// nonempty denotation also receives the letters below it, so that no
/// denotation is a singleton.
pub fn canonical_model_without_singletons(
    m: &Model,
    vocab: &BTreeSet<NameLetter>,
    method: CanonicalMethod,
) -> Result<Model, RepresentationError> {
    check_vocab(vocab)?;
    let g = DiagramTheory::new(m, vocab);
    let v = g.vocab().to_vec();
    let k = v.len();
    let nonempty: Vec<usize> = (0..k).filter(|&l| g.i(l, l)).collect();
    let (mut points, base): (Vec<String>, Vec<(String, BTreeSet<usize>)>) = match method {
        CanonicalMethod::Filters => {
            let named: Vec<(String, BTreeSet<usize>)> = g
                .filters()
                .into_iter()
                .map(|f| (filter_name(&v, &f), f))
                .collect();
            (named.iter().map(|(n, _)| n.clone()).collect(), named)
        }
        CanonicalMethod::Pairs => {
            let named: Vec<(String, BTreeSet<usize>)> = (0..k)
                .flat_map(|mm| (mm..k).map(move |q| (mm, q)))
                .filter(|&(mm, q)| g.i(mm, q))
                .map(|(mm, q)| (pair_name(&v, mm, q), BTreeSet::from([mm, q])))
                .collect();
            (named.iter().map(|(n, _)| n.clone()).collect(), named)
        }
    };
    points.extend(nonempty.iter().map(|&l| v[l].as_str().to_string()));
    Ok(assemble(&v, points, |l| {
        let mut d: BTreeSet<String> = base
            .iter()
            .filter(|(_, members)| match method {
                CanonicalMethod::Filters => members.contains(&l),
                CanonicalMethod::Pairs => members.iter().any(|&mm| g.a(mm, l)),
            })
            .map(|(n, _)| n.clone())
            .collect();
        d.extend(
            nonempty
                .iter()
                .filter(|&&mm| g.a(mm, l))
                .map(|&mm| v[mm].as_str().to_string()),
        );
        d
    }))
}

/// Atomic formulas over `vocab` with the given functors whose truth differs
/// between the two models.
pub fn atomic_disagreements(
    left: &Model,
    right: &Model,
    vocab: &BTreeSet<NameLetter>,
    functors: &[Functor],
) -> Vec<Formula> {
    let mut out = Vec::new();
    for &f in functors {
        for s in vocab {
            for p in vocab {
                let atom = Atom::binary(f, s.clone(), p.clone());
                if eval_atom(left, &atom) != eval_atom(right, &atom) {
                    out.push(Formula::Atom(atom));
                }
            }
        }
    }
    out
}

/// Checks that `[S,P]` is a filter whenever `S i P` holds and that `S i S`
/// holds exactly when some filter contains `S`. Returns the failures.
pub fn check_filter_conditions(m: &Model, vocab: &BTreeSet<NameLetter>) -> Vec<String> {
    let g = DiagramTheory::new(m, vocab);
    let v = g.vocab();
    let k = v.len();
    let filters = g.filters();
    let mut out = Vec::new();
    for s in 0..k {
        for p in 0..k {
            if g.i(s, p) && !g.is_filter(&g.bracket(s, p)) {
                out.push(format!("[{},{}] is not a filter", v[s], v[p]));
            }
        }
        let covered = filters.iter().any(|f| f.contains(&s));
        if g.i(s, s) != covered {
            out.push(format!(
                "i({0},{0}) is {1} but {0} is{2} in some filter",
                v[s],
                g.i(s, s),
                if covered { "" } else { " not" }
            ));
        }
    }
    out
}

/// Checks that `~` is an equivalence relation and a congruence for the
/// given functors. Returns the failures.
pub fn check_congruence(
    m: &Model,
    vocab: &BTreeSet<NameLetter>,
    functors: &[Functor],
) -> Vec<String> {
    let g = DiagramTheory::new(m, vocab);
    let v = g.vocab();
    let k = v.len();
    let mut out = Vec::new();
    for s in 0..k {
        if !g.equivalent(s, s) {
            out.push(format!("{0} ~ {0} fails", v[s]));
        }
        for p in 0..k {
            if g.equivalent(s, p) != g.equivalent(p, s) {
                out.push(format!("~ is not symmetric on {}, {}", v[s], v[p]));
            }
            for q in 0..k {
                if g.equivalent(s, p) && g.equivalent(p, q) && !g.equivalent(s, q) {
                    out.push(format!(
                        "~ is not transitive on {}, {}, {}",
                        v[s], v[p], v[q]
                    ));
                }
            }
            if !g.equivalent(s, p) {
                continue;
            }
            for &f in functors {
                for mm in 0..k {
                    if g.holds(f, s, mm) != g.holds(f, p, mm)
                        || g.holds(f, mm, s) != g.holds(f, mm, p)
                    {
                        out.push(format!(
                            "{} ~ {} but {} differs against {}",
                            v[s],
                            v[p],
                            f.tag(),
                            v[mm]
                        ));
                    }
                }
            }
        }
    }
    out
}

/// Denotations of the letters of `vocab` that are singletons.
pub fn singleton_letters(m: &Model, vocab: &BTreeSet<NameLetter>) -> Vec<NameLetter> {
    vocab
        .iter()
        .filter(|l| m.indices(l).len() == 1)
        .cloned()
        .collect()
}

/// Per-letter point names, for display.
pub fn denotation_table(m: &Model) -> BTreeMap<String, Vec<String>> {
    m.denotations()
        .map(|(l, _)| {
            (
                l.as_str().to_string(),
                m.elements_of(l).map(String::from).collect(),
            )
        })
        .collect()
}
