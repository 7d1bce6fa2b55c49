//! Independent reference computations used only by tests. Nothing here calls
//! into the scoring code paths it is used to check.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use qgeval::porter::porter_stem;
use qgeval::{pretokenized, EvalInstance, TokenSeq};

pub fn seq(s: &str) -> TokenSeq {
    pretokenized(s)
}

pub fn p1() -> TokenSeq {
    seq("which event did the 2014 world cup")
}
pub fn r1() -> TokenSeq {
    seq("who won the 2014 world cup")
}
pub fn r2() -> TokenSeq {
    seq("which event did germany win in 2014")
}

pub fn world_cup_instance() -> EvalInstance {
    EvalInstance::new("wc2014", "germany won the 2014 world cup", vec![r1(), r2()], vec![p1()]).unwrap()
}

/// LCS length by enumerating every subsequence of the shorter input.
pub fn lcs_by_enumeration(a: &[String], b: &[String]) -> usize {
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    assert!(short.len() <= 16, "enumeration oracle is exponential");
    let is_subseq = |sub: &[&String]| {
        let mut it = long.iter();
        sub.iter().all(|x| it.any(|y| y == *x))
    };
    let mut best = 0;
    for mask in 0u32..(1 << short.len()) {
        let sub: Vec<&String> = (0..short.len()).filter(|i| mask >> i & 1 == 1).map(|i| &short[i]).collect();
        if sub.len() > best && is_subseq(&sub) {
            best = sub.len();
        }
    }
    best
}

/// All n-gram windows, counted with a BTreeMap keyed by joined strings.
fn count_ngrams(tokens: &[String], n: usize) -> BTreeMap<String, usize> {
    let mut m = BTreeMap::new();
    if tokens.len() >= n {
        for i in 0..=tokens.len() - n {
            *m.entry(tokens[i..i + n].join("\u{1}")).or_insert(0) += 1;
        }
    }
    m
}

/// (clipped matches, candidate totals) per order 1..=4, closest ref length.
pub fn bleu_counts(cand: &TokenSeq, refs: &[TokenSeq]) -> (Vec<(usize, usize)>, usize) {
    let mut per_order = Vec::new();
    for n in 1..=4 {
        let c = count_ngrams(cand.tokens(), n);
        let rs: Vec<_> = refs.iter().map(|r| count_ngrams(r.tokens(), n)).collect();
        let mut matched = 0;
        let mut total = 0;
        for (g, k) in &c {
            let cap = rs.iter().map(|r| *r.get(g).unwrap_or(&0)).max().unwrap_or(0);
            matched += (*k).min(cap);
            total += k;
        }
        per_order.push((matched, total));
    }
    let mut best: Option<usize> = None;
    for r in refs {
        let l = r.len();
        best = match best {
            None => Some(l),
            Some(b) => {
                let (db, dl) = (b.abs_diff(cand.len()), l.abs_diff(cand.len()));
                if dl < db || (dl == db && l < b) {
                    Some(l)
                } else {
                    Some(b)
                }
            }
        };
    }
    (per_order, best.unwrap())
}

/// Unsmoothed BLEU-4 from pooled counts over `pairs`.
pub fn pooled_bleu(pairs: &[(TokenSeq, Vec<TokenSeq>)]) -> f64 {
    let mut m = [0usize; 4];
    let mut t = [0usize; 4];
    let (mut c_len, mut r_len) = (0usize, 0usize);
    for (cand, refs) in pairs {
        let (orders, rl) = bleu_counts(cand, refs);
        for (i, (mi, ti)) in orders.into_iter().enumerate() {
            m[i] += mi;
            t[i] += ti;
        }
        c_len += cand.len();
        r_len += rl;
    }
    let used: Vec<usize> = (0..4).filter(|&i| t[i] > 0).collect();
    let mut prod = 1.0f64;
    for &i in &used {
        prod *= m[i] as f64 / t[i] as f64;
    }
    let geo = prod.powf(1.0 / used.len() as f64);
    let bp = if c_len > r_len { 1.0 } else { (1.0 - r_len as f64 / c_len as f64).exp() };
    bp * geo
}

/// Best (matches, chunks) for METEOR with exact-then-stem stages, by
/// enumerating every one-to-one alignment of compatible token pairs.
/// Preference: most exact matches, then most matches, then fewest chunks.
pub fn meteor_alignment_oracle(cand: &TokenSeq, refr: &TokenSeq) -> (usize, usize) {
    let c = cand.tokens();
    let r = refr.tokens();
    let cs: Vec<String> = c.iter().map(|t| porter_stem(t)).collect();
    let rs: Vec<String> = r.iter().map(|t| porter_stem(t)).collect();
    let mut best: Option<(usize, usize, usize)> = None; // (exact, total, chunks)
    let mut assign: Vec<Option<usize>> = vec![None; c.len()];
    let mut used = vec![false; r.len()];

    fn chunks(assign: &[Option<usize>]) -> usize {
        let mut n = 0;
        for i in 0..assign.len() {
            if let Some(j) = assign[i] {
                let cont = i > 0 && j > 0 && assign[i - 1] == Some(j - 1);
                if !cont {
                    n += 1;
                }
            }
        }
        n
    }

    #[allow(clippy::too_many_arguments)]
    fn rec(
        i: usize,
        c: &[String],
        r: &[String],
        cs: &[String],
        rs: &[String],
        assign: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
        best: &mut Option<(usize, usize, usize)>,
    ) {
        if i == c.len() {
            let exact = assign.iter().enumerate().filter(|(i, a)| a.is_some_and(|j| c[*i] == r[j])).count();
            let total = assign.iter().filter(|a| a.is_some()).count();
            let ch = chunks(assign);
            let better = match *best {
                None => true,
                Some((be, bt, bc)) => (exact, total, std::cmp::Reverse(ch)) > (be, bt, std::cmp::Reverse(bc)),
            };
            if better {
                *best = Some((exact, total, ch));
            }
            return;
        }
        assign[i] = None;
        rec(i + 1, c, r, cs, rs, assign, used, best);
        for j in 0..r.len() {
            if !used[j] && cs[i] == rs[j] {
                used[j] = true;
                assign[i] = Some(j);
                rec(i + 1, c, r, cs, rs, assign, used, best);
                assign[i] = None;
                used[j] = false;
            }
        }
    }

    rec(0, c, r, &cs, &rs, &mut assign, &mut used, &mut best);
    let (_, total, ch) = best.unwrap();
    (total, ch)
}

/// METEOR-lite score with the default parameters from (matches, chunks).
pub fn meteor_closed_form(matches: usize, chunks: usize, cand_len: usize, ref_len: usize) -> f64 {
    if matches == 0 {
        return 0.0;
    }
    let m = matches as f64;
    let (p, r) = (m / cand_len as f64, m / ref_len as f64);
    let fmean = 10.0 * p * r / (r + 9.0 * p);
    fmean * (1.0 - 0.5 * (chunks as f64 / m).powi(3))
}

/// Classical precision, recall and F1 of two sets.
pub fn set_prf<T: Ord>(pred: &BTreeSet<T>, refs: &BTreeSet<T>) -> (f64, f64, f64) {
    let hit = pred.intersection(refs).count() as f64;
    let p = hit / pred.len() as f64;
    let r = hit / refs.len() as f64;
    let f = if hit == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
    (p, r, f)
}

/// Six distinct questions used as the universe for subset enumeration.
pub fn universe() -> Vec<TokenSeq> {
    [
        "who won the 2014 world cup",
        "which event did germany win in 2014",
        "when was amazon founded",
        "who founded amazon",
        "which seattle-based company was founded in 1994",
        "what is the cycle of rebirth",
    ]
    .iter()
    .map(|s| seq(s))
    .collect()
}

/// Synthetic corpus: `n` contexts, each with two distinct six-token references.
pub fn two_reference_corpus(n: usize) -> Vec<EvalInstance> {
    let subjects = ["germany", "brazil", "spain", "italy", "france", "chile", "ghana", "japan", "peru", "wales"];
    let events = ["cup", "final", "league", "open", "derby", "trophy", "shield", "series", "games", "race"];
    (0..n)
        .map(|i| {
            let s = subjects[i % subjects.len()];
            let e = events[(i / subjects.len()) % events.len()];
            let year = 1990 + i;
            let a = seq(&format!("who won the {year} {e} ?"));
            let b = seq(&format!("what did {s} win in {year}"));
            EvalInstance::new(format!("ctx{i:03}"), "", vec![a.clone(), b], vec![a]).unwrap()
        })
        .collect()
}
