use std::collections::BTreeMap;

use namecalc::corpus::{corpus_entries, run_corpus, Corpus, MoodKind, Selection};

#[test]
fn full_run_has_no_mismatches() {
    let report = run_corpus(Corpus::embedded(), &Selection::all());
    assert_eq!(report.results.len(), corpus_entries().len());
    assert!(report.all_ok(), "{:#?}", report.mismatches());
}

#[test]
fn sections_partition_the_catalogue() {
    let corpus = Corpus::embedded();
    let mut total = 0;
    for group in 1..=7u8 {
        let report = run_corpus(corpus, &Selection::group(group));
        let listed = corpus_entries().iter().filter(|e| e.group == group).count();
        assert_eq!(report.results.len(), listed, "group {group}");
        assert!(listed > 0, "group {group} is empty");
        total += listed;
    }
    assert_eq!(total, corpus_entries().len());
}

#[test]
fn catalogue_has_twenty_four_moods() {
    let moods: Vec<_> = corpus_entries()
        .iter()
        .filter(|e| e.mood.is_some())
        .collect();
    assert_eq!(moods.len(), 24);
    let existential = moods
        .iter()
        .filter(|e| e.mood == Some(MoodKind::Existential))
        .count();
    assert_eq!(existential, 9);
}

#[test]
fn selection_by_name() {
    let selection = Selection {
        group: None,
        names: Some(vec![
            "Barbari".into(),
            "subcontrariety".into(),
            "Datisi+".into(),
        ]),
    };
    let report = run_corpus(Corpus::embedded(), &selection);
    assert_eq!(report.results.len(), 3);
    assert!(report.all_ok());
}

fn embedded_files() -> BTreeMap<String, String> {
    Corpus::embedded()
        .files()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

#[test]
fn corrupted_script_yields_one_mismatch() {
    let mut files = embedded_files();
    let script = files.get_mut("hilbert/luk/Ci.proof").unwrap();
    *script = script.replace("ax Ia", "ax Ii");
    let corpus = Corpus::from_files(files).unwrap();
    let mismatches = run_corpus(&corpus, &Selection::all()).mismatches();
    assert_eq!(mismatches.len(), 1, "{mismatches:#?}");
    assert_eq!(mismatches[0].entry, "conversion i");
    assert_eq!(mismatches[0].check, "script");
}

#[test]
fn corrupted_verdict_yields_one_mismatch() {
    let mut files = embedded_files();
    let manifest = files.get_mut("manifest.toml").unwrap();
    let at = manifest.find("name = \"Barbari\"").unwrap();
    let rest = &manifest[at..];
    let expect = rest.find("all = \"countermodel\"").unwrap() + at;
    manifest.replace_range(
        expect..expect + "all = \"countermodel\"".len(),
        "all = \"valid\"",
    );
    let corpus = Corpus::from_files(files).unwrap();
    let mismatches = run_corpus(&corpus, &Selection::group(2)).mismatches();
    assert_eq!(mismatches.len(), 1, "{mismatches:#?}");
    assert_eq!(mismatches[0].check, "decide all");
}

#[test]
fn load_reads_a_directory() {
    let dir = tempfile::tempdir().unwrap();
    for (path, text) in Corpus::embedded().files() {
        let full = dir.path().join(path);
        std::fs::create_dir_all(full.parent().unwrap()).unwrap();
        std::fs::write(full, text).unwrap();
    }
    let corpus = Corpus::load(dir.path()).unwrap();
    assert_eq!(corpus.entries, Corpus::embedded().entries);
}

#[test]
fn missing_manifest_is_an_error() {
    assert!(Corpus::from_files(BTreeMap::new()).is_err());
}
