//! Single-pass stems against a table produced by an independent Porter
//! implementation over about 3000 words of English technical prose.

use namediss_core::textmetrics::porter_stem;

#[test]
fn matches_reference_table() {
    let table = include_str!("fixtures/porter_vocabulary.tsv");
    let mut mismatches = Vec::new();
    let mut rows = 0;
    for line in table.lines() {
        let (word, stem) = line.split_once('\t').expect("word<TAB>stem");
        rows += 1;
        let got = porter_stem(word);
        if got != stem {
            mismatches.push(format!("{word}: got {got}, want {stem}"));
        }
    }
    assert!(rows > 2500);
    assert!(mismatches.is_empty(), "{} mismatches:\n{}", mismatches.len(), mismatches.join("\n"));
}
