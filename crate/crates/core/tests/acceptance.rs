//! Acceptance suite. Each test prints one `criterion N ...: PASS|FAIL` line.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use namecalc::corpus::{run_corpus, Corpus, MoodKind, Selection};
use namecalc::decide::{decide, decide_with, DecideOptions, OracleTable, Verdict};
use namecalc::parser::{formula, parse_deduction_script, parse_proof_script, parse_sequent_script};
use namecalc::proof::{check_proof, expand_definitions, Basis};
use namecalc::representation::{
    atomic_disagreements, canonical_model, represent, verify_structure, AlgebraKind,
    CanonicalMethod, CanonicalSystem, RelationalStructure,
};
use namecalc::semantics::{random_model, ModelClass};
use namecalc::sequent::{
    check_sequent_proof, check_smiley_deduction, expand_macros, DeductionJustification,
    SequentJustification, SmileyRule, DERIVED_RULES,
};
use namecalc::syntax::{letter, Atom, Formula, Functor, NameLetter};
use namecalc::systems::SystemId;
use rayon::prelude::*;

fn verdict_line(
    n: u8,
    title: &str,
    failures: &[String],
    detail: String,
    elapsed: Duration,
    limit: Option<Duration>,
) {
    let slow = limit.is_some_and(|l| elapsed > l);
    let ok = failures.is_empty() && !slow;
    println!(
        "criterion {n} ({title}): {} [{detail}; {:.2}s]",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    for f in failures.iter().take(10) {
        println!("    {f}");
    }
    assert!(
        failures.is_empty(),
        "criterion {n}: {} failures",
        failures.len()
    );
    assert!(!slow, "criterion {n}: {elapsed:?} exceeds {limit:?}");
}

fn corpus() -> &'static Corpus {
    Corpus::embedded()
}

fn valid(f: &Formula, c: ModelClass) -> bool {
    decide(f, c).expect("within the letter cap").is_valid()
}

#[test]
fn criterion_01_moods() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let moods: Vec<_> = corpus()
        .entries
        .iter()
        .filter(|e| e.mood.is_some())
        .collect();
    if moods.len() != 24 {
        failures.push(format!("{} mood entries", moods.len()));
    }
    let mut all_valid = 0;
    for e in &moods {
        let f = e.parsed_formula().expect("mood formula parses");
        for c in [ModelClass::Traditional, ModelClass::Polyreferential] {
            if !valid(&f, c) {
                failures.push(format!("{} not valid in {c}", e.name));
            }
        }
        match decide(&f, ModelClass::All).unwrap() {
            Verdict::Valid => {
                all_valid += 1;
                if e.mood != Some(MoodKind::Plain) {
                    failures.push(format!("{} marked existential but valid in all", e.name));
                }
            }
            Verdict::Countermodel(m) => {
                if e.mood != Some(MoodKind::Existential) {
                    failures.push(format!("{} marked plain but has a countermodel", e.name));
                }
                if !m.denotations().any(|(_, d)| d.is_empty()) {
                    failures.push(format!("{} countermodel has no empty term", e.name));
                }
            }
        }
    }
    if all_valid != 15 {
        failures.push(format!("{all_valid} moods valid in all, expected 15"));
    }
    verdict_line(
        1,
        "moods",
        &failures,
        format!("{} moods, {all_valid} valid in all", moods.len()),
        start.elapsed(),
        Some(Duration::from_secs(10)),
    );
}

fn uses_ai_expansion(id: SystemId) -> bool {
    id.key().starts_with("slu") || id.key().starts_with("kais")
}

#[test]
fn criterion_02_axiom_soundness() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut checked = 0;
    let expected_classes = |id: SystemId| -> Vec<ModelClass> {
        match id {
            SystemId::Luk => vec![ModelClass::Traditional, ModelClass::Polyreferential],
            SystemId::Sh => vec![ModelClass::All, ModelClass::NonMonoreferential],
            _ => vec![ModelClass::All],
        }
    };
    for id in SystemId::ALL {
        let spec = id.spec();
        let mut classes = spec.model_classes.clone();
        classes.sort();
        if classes != expected_classes(id) {
            failures.push(format!("{id}: classes {classes:?}"));
        }
        for schema in spec.schemas.iter().chain(&spec.definitions) {
            let f = if uses_ai_expansion(id) {
                expand_definitions(&schema.pattern, Basis::Ai)
            } else {
                schema.pattern.clone()
            };
            for &c in &spec.model_classes {
                checked += 1;
                if !valid(&f, c) {
                    failures.push(format!("{id}: {} not valid in {c}", schema.name));
                }
            }
        }
    }
    verdict_line(
        2,
        "axiom soundness",
        &failures,
        format!("{checked} schema/class pairs"),
        start.elapsed(),
        None,
    );
}

fn two_letter_atoms() -> Vec<Formula> {
    let letters = ["S", "P"];
    let mut out = Vec::new();
    for functor in Functor::ALL {
        for s in letters {
            if functor.arity() == 1 {
                out.push(Formula::Atom(Atom::unary(functor, letter(s))));
                continue;
            }
            for p in letters {
                out.push(Formula::atom(functor, s, p));
            }
        }
    }
    out
}

#[test]
fn criterion_03_decide_matches_oracle() {
    let start = Instant::now();
    let atoms = two_letter_atoms();
    let mut shapes: Vec<Formula> = Vec::new();
    for a in &atoms {
        shapes.push(a.clone());
        shapes.push(a.clone().not());
        for b in &atoms {
            shapes.push(a.clone().implies(b.clone()));
        }
    }
    let letters: BTreeSet<NameLetter> = [letter("S"), letter("P")].into();
    let oracle = OracleTable::new(&letters, 8).expect("two letters fit the guard");
    let opts = DecideOptions {
        parallel: false,
        ..DecideOptions::default()
    };
    let compare = |f: &Formula| -> Vec<String> {
        let mut bad = Vec::new();
        for c in ModelClass::ALL {
            let fast = decide_with(f, c, opts).expect("two letters").is_valid();
            if fast != oracle.decide(f, c).is_valid() {
                bad.push(format!("{f} in {c}: decide says {fast}"));
            }
        }
        bad
    };
    let mut failures: Vec<String> = shapes.par_iter().flat_map(compare).collect();
    let triples: Vec<String> = atoms
        .par_iter()
        .flat_map(|a| {
            let mut bad = Vec::new();
            for b in &atoms {
                for c in &atoms {
                    bad.extend(compare(&a.clone().and(b.clone()).implies(c.clone())));
                }
            }
            bad
        })
        .collect();
    failures.extend(triples);
    let cases = (shapes.len() + atoms.len().pow(3)) * ModelClass::ALL.len();
    verdict_line(
        3,
        "decide vs oracle",
        &failures,
        format!("{cases} formula/class cases, universe 8"),
        start.elapsed(),
        Some(Duration::from_secs(300)),
    );
}

#[test]
fn criterion_04_hilbert_scripts() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let scripts = corpus().hilbert_scripts();
    for (sys, path) in &scripts {
        let spec = sys.spec();
        let script = match parse_proof_script(corpus().file(path).unwrap_or_default()) {
            Ok(s) => s,
            Err(e) => {
                failures.push(format!("{path}: {e}"));
                continue;
            }
        };
        let report = check_proof(&spec, &script);
        if !report.accepted {
            failures.push(format!("{path}: {:?}", report.first_failure));
            continue;
        }
        let conclusion = script.conclusion().expect("nonempty script");
        for &c in &spec.model_classes {
            if !valid(conclusion, c) {
                failures.push(format!("{path}: conclusion not valid in {c}"));
            }
        }
    }
    if scripts.len() < 30 {
        failures.push(format!("only {} scripts", scripts.len()));
    }
    let required = [(3, 8), (2, 9), (4, 8)];
    for (group, need) in required {
        let have = corpus().group(group).filter(|e| e.script.is_some()).count();
        if have < need {
            failures.push(format!("group {group}: {have} scripts, need {need}"));
        }
    }
    for name in [
        "Ish2 in shis1",
        "Ish3 in shis1",
        "eps-a chain in shis1",
        "a-eps chain in shis1",
        "percent",
    ] {
        if corpus()
            .entry(name)
            .and_then(|e| e.script.as_ref())
            .is_none()
        {
            failures.push(format!("no script for {name}"));
        }
    }
    verdict_line(
        4,
        "hilbert scripts",
        &failures,
        format!("{} scripts", scripts.len()),
        start.elapsed(),
        None,
    );
}

#[test]
fn criterion_05_sequent_kernel() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let load = |path: &str| {
        parse_sequent_script(corpus().file(path).expect("corpus file")).expect("parses")
    };

    let cut_examples = [
        ("sequent/subalternation.seq", "a(S,P) ==> i(S,P)"),
        ("sequent/conversion.seq", "i(P,S) ==> i(S,P)"),
    ];
    for (path, want) in cut_examples {
        let script = load(path);
        let primitive = script.lines.iter().all(|l| {
            matches!(
                l.justification,
                SequentJustification::Axiom { .. } | SequentJustification::Cut(..)
            )
        });
        if !primitive {
            failures.push(format!("{path} uses more than axioms and cut"));
        }
        if !check_sequent_proof(&script).accepted {
            failures.push(format!("{path} rejected"));
        }
        let want = namecalc::parser::parse_sequent(want).unwrap();
        if script.conclusion() != Some(&want) {
            failures.push(format!("{path} proves the wrong sequent"));
        }
    }

    let mut macros_seen = BTreeSet::new();
    let mut expansions = 0;
    for (path, text) in corpus().files().filter(|(p, _)| p.ends_with(".seq")) {
        let script = parse_sequent_script(text).expect("parses");
        for l in &script.lines {
            if let SequentJustification::Rule { name, .. } = &l.justification {
                macros_seen.insert(name.clone());
            }
        }
        match expand_macros(&script) {
            Err(f) => failures.push(format!("{path}: expansion failed at {f}")),
            Ok((expanded, found, _)) => {
                expansions += found.len();
                let leftover = expanded
                    .lines
                    .iter()
                    .any(|l| matches!(l.justification, SequentJustification::Rule { .. }));
                if leftover {
                    failures.push(format!("{path}: expansion kept a derived rule"));
                }
                if !check_sequent_proof(&expanded).accepted {
                    failures.push(format!("{path}: expanded script rejected"));
                }
            }
        }
    }
    for rule in DERIVED_RULES {
        if !macros_seen.contains(*rule) {
            failures.push(format!("derived rule {rule} never exercised"));
        }
    }

    let bridges: Vec<_> = corpus().group(7).filter(|e| e.bridge.is_some()).collect();
    if bridges.len() < 5 {
        failures.push(format!("{} bridge entries", bridges.len()));
    }
    let names: Vec<String> = bridges.iter().map(|e| e.name.clone()).collect();
    let report = run_corpus(
        corpus(),
        &Selection {
            group: Some(7),
            names: Some(names),
        },
    );
    failures.extend(
        report
            .mismatches()
            .into_iter()
            .map(|m| format!("{}: {}", m.entry, m.detail)),
    );
    for e in &bridges {
        let script = load(e.sequent_script.as_deref().unwrap());
        let rules: Vec<&str> = script
            .lines
            .iter()
            .filter_map(|l| match &l.justification {
                SequentJustification::Rule { name, .. } => Some(name.as_str()),
                _ => None,
            })
            .collect();
        if !(rules.contains(&"seq-to-imp") && rules.contains(&"imp-to-seq")) {
            failures.push(format!("{}: no round trip", e.name));
        }
    }
    verdict_line(
        5,
        "sequent kernel",
        &failures,
        format!("{} macros expanded, {} bridges", expansions, bridges.len()),
        start.elapsed(),
        None,
    );
}

#[test]
fn criterion_06_smiley_kernel() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut barbara_by_r1 = false;
    let mut reductio = false;
    let mut accepted = 0;
    for (path, text) in corpus().files().filter(|(p, _)| p.ends_with(".ded")) {
        let script = parse_deduction_script(text).expect("parses");
        if !check_smiley_deduction(&script).accepted {
            failures.push(format!("{path} rejected"));
            continue;
        }
        accepted += 1;
        let claim = script.conclusion().expect("nonempty");
        if !valid(&claim.implication(), ModelClass::Traditional) {
            failures.push(format!("{path}: implication not valid in trad"));
        }
        let last = script.lines.last().unwrap();
        if matches!(
            last.justification,
            DeductionJustification::Rule {
                rule: SmileyRule::R1,
                ..
            }
        ) && claim.conclusion == formula("a(S,P)")
        {
            barbara_by_r1 = true;
        }
        if script
            .lines
            .iter()
            .any(|l| matches!(l.justification, DeductionJustification::Reductio(..)))
        {
            reductio = true;
        }
    }
    if !barbara_by_r1 {
        failures.push("no Barbara deduction by R1".into());
    }
    if !reductio {
        failures.push("no reductio deduction".into());
    }
    verdict_line(
        6,
        "smiley kernel",
        &failures,
        format!("{accepted} deductions"),
        start.elapsed(),
        None,
    );
}

#[test]
fn criterion_07_canonical_models() {
    let start = Instant::now();
    let pool = ["M", "P", "S"];
    let failures: Vec<String> = (0..500u64)
        .into_par_iter()
        .flat_map(|seed| {
            let k = 1 + (seed % 3) as usize;
            let vocab: BTreeSet<NameLetter> = pool[..k].iter().map(|l| letter(l)).collect();
            let mut bad = Vec::new();
            for sys in CanonicalSystem::ALL {
                let classes = sys.source_classes();
                let class = classes[(seed / 3) as usize % classes.len()];
                let m = random_model(seed, &vocab, class, 5).expect("feasible class");
                for method in CanonicalMethod::ALL {
                    match canonical_model(&m, &vocab, sys, method) {
                        Err(e) => bad.push(format!("seed {seed} {sys:?} {method:?}: {e}")),
                        Ok(c) => {
                            let d = atomic_disagreements(&m, &c, &vocab, sys.functors());
                            if !d.is_empty() {
                                bad.push(format!("seed {seed} {sys:?} {method:?}: {d:?}"));
                            }
                        }
                    }
                }
            }
            bad
        })
        .collect();
    verdict_line(
        7,
        "canonical models",
        &failures,
        "500 models x 3 systems x 2 methods".into(),
        start.elapsed(),
        Some(Duration::from_secs(120)),
    );
}

#[test]
fn criterion_08_representation() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let pool = ["M", "P", "Q", "R", "S"];
    let mut run = |seed: u64, kind: AlgebraKind, class: ModelClass, with_eps: bool| {
        let k = 1 + (seed % pool.len() as u64) as usize;
        let vocab: BTreeSet<NameLetter> = pool[..k].iter().map(|l| letter(l)).collect();
        let m = random_model(seed, &vocab, class, 5).expect("feasible class");
        let s = RelationalStructure::harvest(&m, &vocab, with_eps).expect("small vocabulary");
        let violations = verify_structure(&s, kind);
        if !violations.is_empty() {
            failures.push(format!("{kind} seed {seed}: {}", violations[0]));
            return;
        }
        match represent(&s, kind) {
            Err(e) => failures.push(format!("{kind} seed {seed}: {e}")),
            Ok(rep) => {
                for m in rep.report.mismatches {
                    failures.push(format!(
                        "{kind} seed {seed}: {} fails at {:?}",
                        m.property, m.witness
                    ));
                }
            }
        }
    };
    for seed in 0..50 {
        run(seed, AlgebraKind::C, ModelClass::All, true);
    }
    for seed in 0..50 {
        run(1000 + seed, AlgebraKind::B3, ModelClass::Traditional, false);
    }
    verdict_line(
        8,
        "representation",
        &failures,
        "50 C and 50 B3 structures".into(),
        start.elapsed(),
        None,
    );
}

#[test]
fn criterion_09_slupecki_gap() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let gap = [
        "i(S,P) -> i(S,S)",
        "i(S,S) -> ka(S,S)",
        "i(S,P) -> ka(S,S)",
        "ka(S,P) -> i(S,S)",
        "ka(S,P) -> ka(S,S)",
        "ka(S,P) -> ka(P,P)",
    ];
    for text in gap {
        let f = expand_definitions(&formula(text), Basis::Ai);
        if !valid(&f, ModelClass::All) {
            failures.push(format!("{text} not valid in all after expansion"));
        }
    }
    let percent = corpus().entry("percent").expect("percent entry");
    let script =
        parse_proof_script(corpus().file(percent.script.as_deref().unwrap()).unwrap()).unwrap();
    let report = check_proof(&SystemId::Slu.spec(), &script);
    if !report.accepted {
        failures.push(format!("percent script: {:?}", report.first_failure));
    }
    if script.conclusion() != Some(&formula("ka(P,S) -> i(S,S)")) {
        failures.push("percent script proves the wrong formula".into());
    }
    verdict_line(
        9,
        "slupecki gap",
        &failures,
        format!("{} formulas", gap.len()),
        start.elapsed(),
        None,
    );
}

#[test]
fn criterion_10_singular_boundary() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let f = formula("eps(S,S) -> eps(M,M)");
    if !valid(&f, ModelClass::NonMonoreferential) {
        failures.push("not valid in nonmono".into());
    }
    if valid(&f, ModelClass::All) {
        failures.push("valid in all".into());
    }
    let shis = [
        SystemId::ShisI,
        SystemId::ShisII,
        SystemId::ShisIII,
        SystemId::ShisIV,
    ];
    for (sys, path) in corpus().hilbert_scripts() {
        if !shis.contains(&sys) {
            continue;
        }
        let script = parse_proof_script(corpus().file(path).unwrap()).unwrap();
        if script.lines.iter().any(|l| l.formula == f) {
            failures.push(format!("{path} derives it"));
        }
    }
    verdict_line(
        10,
        "singular boundary",
        &failures,
        "nonmono valid, all invalid".into(),
        start.elapsed(),
        None,
    );
}
