use serde::{Deserialize, Serialize};

use crate::error::{EvalError, Result};
use crate::text::{lcs_length, TokenSeq};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RougeConfig {
    /// Recall weight of the LCS F-measure.
    pub beta: f64,
}

impl Default for RougeConfig {
    fn default() -> Self {
        RougeConfig { beta: 1.2 }
    }
}

impl RougeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.beta > 0.0 && self.beta.is_finite() {
            Ok(())
        } else {
            Err(EvalError::InvalidConfig(format!(
                "ROUGE-L beta must be positive, got {}",
                self.beta
            )))
        }
    }
}

/// ROUGE-L: the weighted F-measure of LCS precision and recall.
pub fn rouge_l(candidate: &TokenSeq, reference: &TokenSeq, cfg: &RougeConfig) -> Result<f64> {
    cfg.validate()?;
    candidate.require_non_empty("candidate")?;
    reference.require_non_empty("reference")?;
    let lcs = lcs_length(candidate, reference);
    if lcs == 0 {
        return Ok(0.0);
    }
    let p = lcs as f64 / candidate.len() as f64;
    let r = lcs as f64 / reference.len() as f64;
    let b2 = cfg.beta * cfg.beta;
    Ok((1.0 + b2) * p * r / (r + b2 * p))
}

/// Multi-reference ROUGE-L takes the best single-reference score.
pub fn rouge_l_multi(candidate: &TokenSeq, references: &[TokenSeq], cfg: &RougeConfig) -> Result<f64> {
    if references.is_empty() {
        return Err(EvalError::EmptyInput("reference set"));
    }
    references
        .iter()
        .map(|r| rouge_l(candidate, r, cfg))
        .try_fold(0.0f64, |best, s| s.map(|s| best.max(s)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::pretokenized;
    use approx::assert_abs_diff_eq;

    #[test]
    fn in_between_question() {
        let p1 = pretokenized("which event did the 2014 world cup");
        let r1 = pretokenized("who won the 2014 world cup");
        let r2 = pretokenized("which event did germany win in 2014");
        let cfg = RougeConfig::default();
        let v = rouge_l(&p1, &r1, &cfg).unwrap();
        assert_abs_diff_eq!(v, 0.6240, epsilon = 5e-4);
        // P = R = 4/7 collapses the weighted F to 4/7 for any beta
        for beta in [0.5, 1.0, 1.2, 3.0] {
            let v = rouge_l(&p1, &r2, &RougeConfig { beta }).unwrap();
            assert_abs_diff_eq!(v, 4.0 / 7.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(rouge_l_multi(&p1, &[r1, r2], &cfg).unwrap(), v.max(0.6240), epsilon = 5e-4);
    }

    #[test]
    fn identity_and_disjoint() {
        let x = pretokenized("when was amazon founded ?");
        let y = pretokenized("zebra");
        for beta in [0.3, 1.0, 1.2, 8.0] {
            assert_abs_diff_eq!(rouge_l(&x, &x, &RougeConfig { beta }).unwrap(), 1.0, epsilon = 1e-12);
        }
        assert_eq!(rouge_l(&x, &y, &RougeConfig::default()).unwrap(), 0.0);
    }

    #[test]
    fn beta_one_is_harmonic_mean() {
        let a = pretokenized("a b c d e");
        let b = pretokenized("a c e");
        let (p, r) = (3.0 / 5.0, 3.0 / 3.0);
        let v = rouge_l(&a, &b, &RougeConfig { beta: 1.0 }).unwrap();
        assert_abs_diff_eq!(v, 2.0 * p * r / (p + r), epsilon = 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        let x = pretokenized("a");
        assert!(rouge_l(&x, &TokenSeq::default(), &RougeConfig::default()).is_err());
        assert!(rouge_l(&x, &x, &RougeConfig { beta: 0.0 }).is_err());
        assert!(rouge_l_multi(&x, &[], &RougeConfig::default()).is_err());
    }
}
