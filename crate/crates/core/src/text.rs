//! Tokenization and the sequence primitives shared by every metric.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{EvalError, Result};

/// An ordered sequence of lowercase, whitespace-free, non-empty tokens.
///
/// The empty sequence is a legal tokenizer output, but scorers reject it.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TokenSeq(Vec<String>);

impl TokenSeq {
    /// Builds a sequence from tokens that are already normalized.
    ///
    /// Tokens are lowercased; empty tokens are dropped and tokens containing
    /// whitespace are split, so the type invariants always hold.
    pub fn from_tokens<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        TokenSeq(
            tokens
                .into_iter()
                .flat_map(|t| {
                    t.as_ref()
                        .split_whitespace()
                        .map(str::to_lowercase)
                        .collect::<Vec<_>>()
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, String> {
        self.0.iter()
    }

    /// Space-joined rendering; `tokenize` of the result yields `self` again
    /// for any sequence produced by `tokenize`.
    pub fn detokenize(&self) -> String {
        self.0.join(" ")
    }

    pub(crate) fn require_non_empty(&self, what: &'static str) -> Result<()> {
        if self.is_empty() {
            Err(EvalError::EmptyInput(what))
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for TokenSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.detokenize())
    }
}

impl std::ops::Index<usize> for TokenSeq {
    type Output = String;

    fn index(&self, i: usize) -> &String {
        &self.0[i]
    }
}

impl From<&str> for TokenSeq {
    /// Pretokenized conversion: whitespace split plus lowercasing.
    fn from(text: &str) -> Self {
        pretokenized(text)
    }
}

// Combining marks stay attached to the preceding letter.
fn is_combining_mark(c: char) -> bool {
    matches!(c as u32,
        0x0300..=0x036F | 0x1AB0..=0x1AFF | 0x1DC0..=0x1DFF | 0x20D0..=0x20FF | 0xFE20..=0xFE2F)
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || is_combining_mark(c)
}

/// Lowercases, splits on whitespace, and isolates every punctuation
/// character as its own token.
pub fn tokenize(text: &str) -> TokenSeq {
    let mut tokens = Vec::new();
    for chunk in text.split_whitespace() {
        let mut word = String::new();
        for c in chunk.chars() {
            if is_word_char(c) {
                word.push(c);
            } else {
                if !word.is_empty() {
                    tokens.push(std::mem::take(&mut word).to_lowercase());
                }
                tokens.push(c.to_lowercase().collect());
            }
        }
        if !word.is_empty() {
            tokens.push(word.to_lowercase());
        }
    }
    TokenSeq(tokens)
}

/// Treats the input as already tokenized: whitespace split and lowercasing only.
pub fn pretokenized(text: &str) -> TokenSeq {
    TokenSeq(text.split_whitespace().map(str::to_lowercase).collect())
}

/// Multiset of contiguous n-token windows of one sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NGramCounts<'a> {
    order: usize,
    counts: HashMap<&'a [String], usize>,
}

impl<'a> NGramCounts<'a> {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, gram: &[String]) -> usize {
        self.counts.get(gram).copied().unwrap_or(0)
    }

    /// Total number of windows counted (with multiplicity).
    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'a [String], usize)> + '_ {
        self.counts.iter().map(|(g, c)| (*g, *c))
    }
}

pub fn ngrams(seq: &TokenSeq, n: usize) -> Result<NGramCounts<'_>> {
    if n == 0 {
        return Err(EvalError::ZeroOrder);
    }
    let mut counts = HashMap::new();
    for window in seq.tokens().windows(n) {
        *counts.entry(window).or_insert(0) += 1;
    }
    Ok(NGramCounts { order: n, counts })
}

/// Length of a longest common subsequence, by the standard quadratic
/// dynamic program with a single rolling row.
pub fn lcs_length(a: &TokenSeq, b: &TokenSeq) -> usize {
    lcs_slices(a.tokens(), b.tokens())
}

pub(crate) fn lcs_slices<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    // Keep the shorter sequence on the row axis.
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    if short.is_empty() {
        return 0;
    }
    let mut row = vec![0usize; short.len() + 1];
    for x in long {
        let mut diag = 0;
        for (j, y) in short.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if x == y {
                diag + 1
            } else {
                up.max(row[j])
            };
            diag = up;
        }
    }
    row[short.len()]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(s: &str) -> TokenSeq {
        pretokenized(s)
    }

    #[test]
    fn tokenize_splits_punctuation() {
        let t = tokenize("Who won the 2014 world cup?");
        assert_eq!(t.tokens(), ["who", "won", "the", "2014", "world", "cup", "?"]);
    }

    #[test]
    fn tokenize_empty_and_blank() {
        assert!(tokenize("").is_empty());
        assert!(tokenize("   \t\n").is_empty());
    }

    #[test]
    fn tokenize_keeps_pretokenized_text() {
        let t = tokenize("which event did the 2014 world cup");
        assert_eq!(t.len(), 7);
        assert_eq!(t.detokenize(), "which event did the 2014 world cup");
    }

    #[test]
    fn tokenize_keeps_unicode_words() {
        let t = tokenize("michiru ōshima created");
        assert_eq!(t.tokens(), ["michiru", "ōshima", "created"]);
        // decomposed o + combining macron
        let t = tokenize("o\u{304}shima");
        assert_eq!(t.len(), 1);
    }

    #[test]
    fn tokenize_apostrophes_and_runs() {
        let t = tokenize("Alkan's  teacher...");
        assert_eq!(t.tokens(), ["alkan", "'", "s", "teacher", ".", ".", "."]);
    }

    #[test]
    fn pretokenized_lowercases_only() {
        let t = pretokenized("Who performed alkan 's ?");
        assert_eq!(t.tokens(), ["who", "performed", "alkan", "'s", "?"]);
    }

    #[test]
    fn ngram_windows() {
        let s = seq("the 2014 world cup");
        let g = ngrams(&s, 2).unwrap();
        assert_eq!(g.distinct(), 3);
        assert_eq!(g.total(), 3);
        for pair in [["the", "2014"], ["2014", "world"], ["world", "cup"]] {
            let key: Vec<String> = pair.iter().map(|s| s.to_string()).collect();
            assert_eq!(g.get(&key), 1);
        }
    }

    #[test]
    fn ngram_window_longer_than_sequence() {
        assert!(ngrams(&seq("a"), 2).unwrap().is_empty());
    }

    #[test]
    fn ngram_multiplicity() {
        let s = seq("a a a");
        let g = ngrams(&s, 1).unwrap();
        assert_eq!(g.get(&["a".to_string()]), 3);
    }

    #[test]
    fn ngram_zero_order_rejected() {
        assert_eq!(ngrams(&seq("a"), 0), Err(EvalError::ZeroOrder));
    }

    #[test]
    fn lcs_examples() {
        let p1 = seq("which event did the 2014 world cup");
        let r1 = seq("who won the 2014 world cup");
        assert_eq!(lcs_length(&p1, &r1), 4);
        assert_eq!(lcs_length(&p1, &p1), 7);
        assert_eq!(lcs_length(&p1, &TokenSeq::default()), 0);
    }
}
