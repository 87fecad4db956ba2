use std::collections::{BTreeMap, BTreeSet};

use namecalc::decide::{decide, is_countermodel, Verdict};
use namecalc::parser::{format_formula, parse_formula};
use namecalc::proof::{expand_definitions, is_cpl_tautology, Basis};
use namecalc::semantics::{eval, Model, ModelClass};
use namecalc::syntax::{letter, substitute, Atom, Connective, Formula, Functor, Substitution};
use proptest::prelude::*;

const LETTERS: [&str; 3] = ["S", "P", "M"];

fn arb_atom(functors: Vec<Functor>) -> impl Strategy<Value = Formula> {
    (
        proptest::sample::select(functors),
        proptest::sample::select(LETTERS.to_vec()),
        proptest::sample::select(LETTERS.to_vec()),
    )
        .prop_map(|(f, s, p)| {
            if f == Functor::EX {
                Formula::ex(s)
            } else {
                Formula::atom(f, s, p)
            }
        })
}

fn arb_formula_over(functors: Vec<Functor>, depth: u32) -> impl Strategy<Value = Formula> {
    arb_atom(functors).prop_recursive(depth, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (
                proptest::sample::select(vec![
                    Connective::And,
                    Connective::Or,
                    Connective::Implies,
                    Connective::Iff
                ]),
                inner.clone(),
                inner
            )
                .prop_map(|(c, l, r)| Formula::bin(c, l, r)),
        ]
    })
}

fn arb_formula() -> impl Strategy<Value = Formula> {
    arb_formula_over(Functor::ALL.to_vec(), 4)
}

fn arb_model() -> impl Strategy<Value = Model> {
    (0usize..=4).prop_flat_map(|n| {
        proptest::collection::vec(proptest::collection::btree_set(0..n.max(1), 0..=n), 3).prop_map(
            move |sets| {
                let mut m = Model::with_size(n);
                for (l, set) in LETTERS.iter().zip(sets) {
                    m.set_indices(&letter(l), set.into_iter().filter(|&x| x < n));
                }
                m
            },
        )
    })
}

/// Truth of an atom computed directly from the set-theoretic readings.
fn atom_oracle(m: &Model, a: &Atom) -> bool {
    let s = m.indices(&a.subject);
    let p = m.indices(a.predicate_or_subject());
    let subset = s.is_subset(p);
    let meet = !s.is_disjoint(p);
    let ne = !s.is_empty();
    let single = s.len() == 1;
    match a.functor {
        Functor::A => subset,
        Functor::I => meet,
        Functor::E => !meet,
        Functor::O => !subset,
        Functor::KA => ne && subset,
        Functor::KE => ne && !meet,
        Functor::KKE => ne && !p.is_empty() && !meet,
        Functor::CEQ => s == p,
        Functor::DEQ => ne && s == p,
        Functor::OT => !(ne && subset),
        Functor::EPS => single && subset,
        Functor::NEPS => single && !meet,
        Functor::IDEQ => single && s == p,
        Functor::EX => ne,
    }
}

fn value_under(f: &Formula, atom_value: &dyn Fn(&Atom) -> bool) -> bool {
    match f {
        Formula::Atom(a) => atom_value(a),
        Formula::Neg(x) => !value_under(x, atom_value),
        Formula::Bin(c, l, r) => {
            let (l, r) = (value_under(l, atom_value), value_under(r, atom_value));
            match c {
                Connective::And => l && r,
                Connective::Or => l || r,
                Connective::Implies => !l || r,
                Connective::Iff => l == r,
            }
        }
    }
}

fn distinct_atoms(f: &Formula, out: &mut Vec<Atom>) {
    match f {
        Formula::Atom(a) => {
            if !out.contains(a) {
                out.push(a.clone());
            }
        }
        Formula::Neg(x) => distinct_atoms(x, out),
        Formula::Bin(_, l, r) => {
            distinct_atoms(l, out);
            distinct_atoms(r, out);
        }
    }
}

fn tautology_oracle(f: &Formula) -> bool {
    let mut atoms = Vec::new();
    distinct_atoms(f, &mut atoms);
    (0u32..1 << atoms.len()).all(|bits| {
        let table: BTreeMap<&Atom, bool> = atoms
            .iter()
            .enumerate()
            .map(|(k, a)| (a, bits >> k & 1 == 1))
            .collect();
        value_under(f, &|a| table[a])
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn printing_round_trips(f in arb_formula()) {
        let text = format_formula(&f);
        prop_assert_eq!(parse_formula(&text).unwrap(), f);
    }

    #[test]
    fn eval_matches_set_readings(f in arb_formula(), m in arb_model()) {
        prop_assert_eq!(eval(&m, &f), value_under(&f, &|a| atom_oracle(&m, a)));
    }

    #[test]
    fn cpl_matches_truth_tables(f in arb_formula_over(vec![Functor::A, Functor::I], 5)) {
        prop_assert_eq!(is_cpl_tautology(&f).unwrap(), tautology_oracle(&f));
    }

    #[test]
    fn definitions_preserve_truth(f in arb_formula(), m in arb_model()) {
        for basis in [Basis::Ai, Basis::Kai, Basis::AieFull] {
            let g = expand_definitions(&f, basis);
            prop_assert!(g.functors().iter().all(|&x| basis.keeps(x)));
            prop_assert_eq!(eval(&m, &g), eval(&m, &f));
        }
    }

    #[test]
    fn substitution_lemma(f in arb_formula(), m in arb_model(), image in proptest::collection::vec(0usize..3, 3)) {
        let sigma = Substitution::from_pairs(LETTERS.iter().zip(&image).map(|(l, &k)| (*l, LETTERS[k])));
        let mut pulled = m.clone();
        for (l, &k) in LETTERS.iter().zip(&image) {
            let d: BTreeSet<usize> = m.indices(&letter(LETTERS[k])).clone();
            pulled.set_indices(&letter(l), d);
        }
        prop_assert_eq!(eval(&m, &substitute(&f, &sigma)), eval(&pulled, &f));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn validity_is_monotone_in_the_class(f in arb_formula_over(Functor::ALL.to_vec(), 3)) {
        let valid = |c| decide(&f, c).unwrap().is_valid();
        let (all, trad, poly, nonmono) = (
            valid(ModelClass::All),
            valid(ModelClass::Traditional),
            valid(ModelClass::Polyreferential),
            valid(ModelClass::NonMonoreferential),
        );
        prop_assert!(!all || (trad && nonmono));
        prop_assert!(!trad || poly);
        prop_assert!(!nonmono || poly);
    }

    #[test]
    fn countermodels_are_genuine(f in arb_formula_over(Functor::ALL.to_vec(), 3)) {
        for c in ModelClass::ALL {
            if let Verdict::Countermodel(m) = decide(&f, c).unwrap() {
                prop_assert!(is_countermodel(&m, &f, c));
            }
        }
    }
}
