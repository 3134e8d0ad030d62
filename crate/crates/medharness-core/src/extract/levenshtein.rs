//! Levenshtein edit distance over Unicode scalar values.

/// Minimal number of single-scalar insertions, deletions, and substitutions
/// transforming `a` into `b`. Operates on `char`s, so a CJK ideograph counts
/// as one edit unit regardless of its UTF-8 width. No normalization is
/// applied here; `levenshtein(a, b) == 0` iff the strings are equal.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }

    // Two-row DP, iterating the shorter string in the inner loop.
    let (short, long) = if a.len() <= b.len() { (&a, &b) } else { (&b, &a) };
    let mut prev: Vec<usize> = (0..=short.len()).collect();
    let mut cur: Vec<usize> = vec![0; short.len() + 1];

    for (j, &lc) in long.iter().enumerate() {
        cur[0] = j + 1;
        for (i, &sc) in short.iter().enumerate() {
            let cost = usize::from(sc != lc);
            cur[i + 1] = (prev[i + 1] + 1).min(cur[i] + 1).min(prev[i] + cost);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[short.len()]
}
