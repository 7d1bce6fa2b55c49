//! Porter stemmer against frozen vectors from an independent implementation.
//! Columns: word, stem, stem of the stem.

use qgeval::porter::porter_stem;

const VECTORS: &str = include_str!("data/porter_vectors.tsv");

fn rows() -> impl Iterator<Item = (&'static str, &'static str, &'static str)> {
    VECTORS.lines().map(|l| {
        let mut it = l.split('\t');
        (it.next().unwrap(), it.next().unwrap(), it.next().unwrap())
    })
}

#[test]
fn matches_reference_vocabulary() {
    let mut wrong = Vec::new();
    let mut n = 0;
    for (word, stem, _) in rows() {
        n += 1;
        let got = porter_stem(word);
        if got != stem {
            wrong.push(format!("{word}: want {stem}, got {got}"));
        }
    }
    assert!(n > 6000);
    assert!(wrong.is_empty(), "{} mismatches:\n{}", wrong.len(), wrong.join("\n"));
}

#[test]
fn restemming_matches_reference() {
    let mut idempotent = 0;
    for (_, stem, stem2) in rows() {
        assert_eq!(porter_stem(stem), stem2, "restem of {stem}");
        if stem == stem2 {
            idempotent += 1;
        }
    }
    // Porter is not idempotent in general (agreed -> agre -> agr)
    assert!(idempotent > 5900);
}
