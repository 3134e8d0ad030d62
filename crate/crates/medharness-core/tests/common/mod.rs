#![allow(dead_code)] // each test target compiles its own copy

//! Shared test oracles and deterministic generators.
//!
//! Everything here is written independently of the library's
//! implementations: the Levenshtein oracle is the plain full-matrix
//! recurrence, and the metric oracle is a naive per-class tally over char
//! sets. These stay the reference implementations that the optimized code
//! is checked against.

use std::collections::BTreeSet;

/// Textbook quadratic DP over the full (n+1)×(m+1) matrix.
#[allow(clippy::needless_range_loop)] // keep the textbook indexed form
pub fn levenshtein_oracle(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut dp = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in dp.iter_mut().enumerate() {
        row[0] = i;
    }
    for j in 0..=b.len() {
        dp[0][j] = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let substitution = dp[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            let deletion = dp[i - 1][j] + 1;
            let insertion = dp[i][j - 1] + 1;
            dp[i][j] = substitution.min(deletion).min(insertion);
        }
    }
    dp[a.len()][b.len()]
}

pub struct BruteScores {
    pub accuracy: f64,
    pub f1_example: f64,
    pub f1_weighted: f64,
}

/// Naive reference scoring over plain char sets: exact-match accuracy,
/// per-question set F1, and support-weighted per-class F1 from explicit
/// TP/FP/FN loops.
pub fn brute_force_scores(golds: &[BTreeSet<char>], preds: &[BTreeSet<char>]) -> BruteScores {
    assert_eq!(golds.len(), preds.len());
    let n = golds.len() as f64;

    let mut exact = 0usize;
    for (gold, pred) in golds.iter().zip(preds) {
        if gold == pred {
            exact += 1;
        }
    }

    let mut set_f1_sum = 0.0;
    for (gold, pred) in golds.iter().zip(preds) {
        let both = gold.intersection(pred).count() as f64;
        let total = (gold.len() + pred.len()) as f64;
        set_f1_sum += if total == 0.0 { 1.0 } else { 2.0 * both / total };
    }

    let mut weighted = 0.0;
    let mut support_total = 0.0;
    for letter in ['A', 'B', 'C', 'D', 'E'] {
        let mut tp = 0.0;
        let mut fp = 0.0;
        let mut fn_ = 0.0;
        for (gold, pred) in golds.iter().zip(preds) {
            let in_gold = gold.contains(&letter);
            let in_pred = pred.contains(&letter);
            if in_gold && in_pred {
                tp += 1.0;
            } else if in_pred {
                fp += 1.0;
            } else if in_gold {
                fn_ += 1.0;
            }
        }
        let support = tp + fn_;
        if support == 0.0 {
            continue;
        }
        let precision = if tp + fp == 0.0 { 0.0 } else { tp / (tp + fp) };
        let recall = tp / (tp + fn_);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        weighted += support * f1;
        support_total += support;
    }

    BruteScores {
        accuracy: exact as f64 / n,
        f1_example: set_f1_sum / n,
        f1_weighted: if support_total == 0.0 {
            0.0
        } else {
            weighted / support_total
        },
    }
}

/// Deterministic generator for test corpora (SplitMix64).
pub struct TestRng {
    state: u64,
}

impl TestRng {
    pub fn new(seed: u64) -> TestRng {
        TestRng { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, bound: usize) -> usize {
        (self.next_u64() % bound as u64) as usize
    }

    /// Random string over a mixed CJK/Latin/punctuation alphabet.
    pub fn string(&mut self, max_len: usize, alphabet: &[char]) -> String {
        let len = self.below(max_len + 1);
        (0..len).map(|_| alphabet[self.below(alphabet.len())]).collect()
    }
}

/// Mixed alphabet used for distance and extraction stress corpora.
pub const MIXED_ALPHABET: &[char] = &[
    'a', 'b', 'c', 'x', 'y', 'z', 'A', 'B', 'K', '0', '7', ' ', '.', ',', '!', '？', '。', '：',
    '、', '高', '血', '压', '糖', '尿', '病', '答', '案', '选', '项', '医', '学', 'é', 'ß',
];
