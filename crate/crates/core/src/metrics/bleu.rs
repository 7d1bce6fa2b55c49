//! BLEU with clipped n-gram precision and a brevity penalty, at sentence and
//! corpus level.

use serde::{Deserialize, Serialize};

use crate::error::{EvalError, Result};
use crate::text::{ngrams, TokenSeq};

/// How to treat n-gram orders with zero clipped matches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "mode", content = "value", rename_all = "snake_case")]
pub enum Smoothing {
    /// A zero precision at any order makes the whole score zero.
    #[default]
    None,
    /// A zero match count is replaced by `epsilon` (numerator only).
    Epsilon(f64),
    /// Add `k` to numerator and denominator for every order above unigrams.
    AddK(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BleuConfig {
    pub max_order: usize,
    pub smoothing: Smoothing,
}

impl Default for BleuConfig {
    fn default() -> Self {
        BleuConfig {
            max_order: 4,
            smoothing: Smoothing::None,
        }
    }
}

impl BleuConfig {
    pub fn with_smoothing(smoothing: Smoothing) -> Self {
        BleuConfig {
            smoothing,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_order == 0 {
            return Err(EvalError::InvalidConfig("BLEU max_order must be >= 1".into()));
        }
        match self.smoothing {
            Smoothing::Epsilon(e) if !(e > 0.0 && e.is_finite()) => Err(EvalError::InvalidConfig(
                format!("BLEU epsilon must be positive, got {e}"),
            )),
            Smoothing::AddK(k) if !(k > 0.0 && k.is_finite()) => Err(EvalError::InvalidConfig(
                format!("BLEU add-k constant must be positive, got {k}"),
            )),
            _ => Ok(()),
        }
    }
}

/// Sufficient statistics for BLEU; corpus BLEU sums these across segments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BleuStats {
    /// Clipped matches per order, index 0 = unigrams.
    pub matches: Vec<usize>,
    /// Candidate n-gram totals per order.
    pub totals: Vec<usize>,
    pub candidate_len: usize,
    /// Length of the reference closest to the candidate (ties go to the shorter).
    pub reference_len: usize,
}

impl BleuStats {
    fn zero(max_order: usize) -> Self {
        BleuStats {
            matches: vec![0; max_order],
            totals: vec![0; max_order],
            candidate_len: 0,
            reference_len: 0,
        }
    }

    pub fn compute(candidate: &TokenSeq, references: &[TokenSeq], max_order: usize) -> Result<Self> {
        candidate.require_non_empty("candidate")?;
        if references.is_empty() {
            return Err(EvalError::EmptyInput("reference set"));
        }
        for r in references {
            r.require_non_empty("reference")?;
        }
        let mut stats = BleuStats::zero(max_order);
        for n in 1..=max_order {
            let cand = ngrams(candidate, n)?;
            let refs = references
                .iter()
                .map(|r| ngrams(r, n))
                .collect::<Result<Vec<_>>>()?;
            let mut matched = 0;
            for (gram, count) in cand.iter() {
                let max_ref = refs.iter().map(|r| r.get(gram)).max().unwrap_or(0);
                matched += count.min(max_ref);
            }
            stats.matches[n - 1] = matched;
            stats.totals[n - 1] = cand.total();
        }
        stats.candidate_len = candidate.len();
        stats.reference_len = closest_ref_len(candidate.len(), references);
        Ok(stats)
    }

    fn add(&mut self, other: &BleuStats) {
        for (a, b) in self.matches.iter_mut().zip(&other.matches) {
            *a += b;
        }
        for (a, b) in self.totals.iter_mut().zip(&other.totals) {
            *a += b;
        }
        self.candidate_len += other.candidate_len;
        self.reference_len += other.reference_len;
    }

    /// Turns the statistics into a score in [0, 1].
    pub fn score(&self, smoothing: Smoothing) -> f64 {
        // Orders with no candidate windows are skipped entirely.
        let orders: Vec<usize> = (0..self.totals.len()).filter(|&i| self.totals[i] > 0).collect();
        if orders.is_empty() {
            return 0.0;
        }
        let weight = 1.0 / orders.len() as f64;
        let mut log_sum = 0.0;
        for &i in &orders {
            let m = self.matches[i] as f64;
            let t = self.totals[i] as f64;
            let p = match smoothing {
                Smoothing::None => m / t,
                Smoothing::Epsilon(eps) => {
                    if self.matches[i] == 0 {
                        eps / t
                    } else {
                        m / t
                    }
                }
                Smoothing::AddK(k) => {
                    if i == 0 {
                        m / t
                    } else {
                        (m + k) / (t + k)
                    }
                }
            };
            if p <= 0.0 {
                return 0.0;
            }
            log_sum += weight * p.ln();
        }
        brevity_penalty(self.candidate_len, self.reference_len) * log_sum.exp().min(1.0)
    }
}

fn closest_ref_len(cand_len: usize, references: &[TokenSeq]) -> usize {
    references
        .iter()
        .map(TokenSeq::len)
        .min_by_key(|&r| (r.abs_diff(cand_len), r))
        .unwrap_or(0)
}

pub fn brevity_penalty(candidate_len: usize, reference_len: usize) -> f64 {
    if candidate_len == 0 {
        0.0
    } else if candidate_len > reference_len {
        1.0
    } else {
        (1.0 - reference_len as f64 / candidate_len as f64).exp()
    }
}

/// Sentence-level BLEU of one candidate against a set of references.
pub fn sentence_bleu(candidate: &TokenSeq, references: &[TokenSeq], cfg: &BleuConfig) -> Result<f64> {
    cfg.validate()?;
    Ok(BleuStats::compute(candidate, references, cfg.max_order)?.score(cfg.smoothing))
}

/// Corpus-level BLEU: statistics are pooled over all segments before the
/// precisions and the brevity penalty are taken.
pub fn corpus_bleu(pairs: &[(TokenSeq, Vec<TokenSeq>)], cfg: &BleuConfig) -> Result<f64> {
    cfg.validate()?;
    if pairs.is_empty() {
        return Err(EvalError::EmptyInput("corpus"));
    }
    let mut pooled = BleuStats::zero(cfg.max_order);
    for (cand, refs) in pairs {
        pooled.add(&BleuStats::compute(cand, refs, cfg.max_order)?);
    }
    Ok(pooled.score(cfg.smoothing))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::pretokenized;
    use approx::assert_abs_diff_eq;

    fn s(t: &str) -> TokenSeq {
        pretokenized(t)
    }

    fn p1() -> TokenSeq {
        s("which event did the 2014 world cup")
    }
    fn r1() -> TokenSeq {
        s("who won the 2014 world cup")
    }
    fn r2() -> TokenSeq {
        s("which event did germany win in 2014")
    }

    #[test]
    fn multi_reference_in_between_question() {
        let cfg = BleuConfig::default();
        let b = sentence_bleu(&p1(), &[r1(), r2()], &cfg).unwrap();
        let closed_form = (1.0f64 * 5.0 / 6.0 * 3.0 / 5.0 * 1.0 / 4.0).powf(0.25);
        assert_abs_diff_eq!(b, closed_form, epsilon = 1e-12);
        assert_abs_diff_eq!(b, 0.5946, epsilon = 1e-4);
    }

    #[test]
    fn single_reference_values() {
        let cfg = BleuConfig::default();
        let b = sentence_bleu(&p1(), &[r1()], &cfg).unwrap();
        let closed_form = (4.0f64 / 7.0 * 3.0 / 6.0 * 2.0 / 5.0 * 1.0 / 4.0).powf(0.25);
        assert_abs_diff_eq!(b, closed_form, epsilon = 1e-12);
        assert_abs_diff_eq!(b, 0.4111, epsilon = 1e-4);
        assert_eq!(sentence_bleu(&p1(), &[r2()], &cfg).unwrap(), 0.0);
    }

    #[test]
    fn identity_is_one() {
        let cfg = BleuConfig::default();
        assert_abs_diff_eq!(sentence_bleu(&r1(), &[r1()], &cfg).unwrap(), 1.0, epsilon = 1e-12);
        // short sentences only use the orders that exist
        assert_abs_diff_eq!(sentence_bleu(&s("why"), &[s("why")], &cfg).unwrap(), 1.0);
        assert_abs_diff_eq!(sentence_bleu(&s("why not"), &[s("why not")], &cfg).unwrap(), 1.0);
    }

    #[test]
    fn brevity_tie_prefers_shorter_reference() {
        // candidate length 4, references of length 3 and 5
        let stats = BleuStats::compute(&s("a b c d"), &[s("a b c d e"), s("a b c")], 4).unwrap();
        assert_eq!(stats.reference_len, 3);
        assert_eq!(brevity_penalty(4, 3), 1.0);
        assert_abs_diff_eq!(brevity_penalty(3, 4), (-1.0f64 / 3.0).exp());
    }

    #[test]
    fn rejects_empty_inputs() {
        let cfg = BleuConfig::default();
        assert!(sentence_bleu(&TokenSeq::default(), &[r1()], &cfg).is_err());
        assert!(sentence_bleu(&p1(), &[], &cfg).is_err());
        assert!(sentence_bleu(&p1(), &[TokenSeq::default()], &cfg).is_err());
        assert!(corpus_bleu(&[], &cfg).is_err());
    }

    #[test]
    fn rejects_bad_config() {
        let bad = [
            BleuConfig { max_order: 0, smoothing: Smoothing::None },
            BleuConfig::with_smoothing(Smoothing::Epsilon(0.0)),
            BleuConfig::with_smoothing(Smoothing::AddK(-1.0)),
        ];
        for cfg in bad {
            assert!(matches!(
                sentence_bleu(&p1(), &[r1()], &cfg),
                Err(EvalError::InvalidConfig(_))
            ));
        }
    }

    #[test]
    fn corpus_single_pair_equals_sentence() {
        let cfg = BleuConfig::default();
        let c = corpus_bleu(&[(p1(), vec![r1(), r2()])], &cfg).unwrap();
        let sb = sentence_bleu(&p1(), &[r1(), r2()], &cfg).unwrap();
        assert_eq!(c, sb);
        let perfect = corpus_bleu(&[(r1(), vec![r1()]), (r1(), vec![r1()])], &cfg).unwrap();
        assert_abs_diff_eq!(perfect, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn smoothing_rescues_missing_four_grams() {
        let eps = BleuConfig::with_smoothing(Smoothing::Epsilon(0.1));
        let v = sentence_bleu(&p1(), &[r2()], &eps).unwrap();
        // 4/7, 2/6, 1/5 and 0.1/4
        let want = (4.0f64 / 7.0 * 2.0 / 6.0 * 1.0 / 5.0 * 0.1 / 4.0).powf(0.25);
        assert_abs_diff_eq!(v, want, epsilon = 1e-12);

        let addk = BleuConfig::with_smoothing(Smoothing::AddK(1.0));
        let v = sentence_bleu(&p1(), &[r2()], &addk).unwrap();
        let want = (4.0f64 / 7.0 * 3.0 / 7.0 * 2.0 / 6.0 * 1.0 / 5.0).powf(0.25);
        assert_abs_diff_eq!(v, want, epsilon = 1e-12);
    }
}
