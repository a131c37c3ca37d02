//! Reference searchers used to check the filtering engine.
//!
//! Both return occurrences sorted by `(offset, pattern)` without duplicates
//! and share no code with the filter path.

mod aho_corasick;

pub use aho_corasick::AhoCorasick;

use crate::pattern::{Occurrence, PatternSet};

/// Compares every pattern against every text offset.
pub fn naive_search(ps: &PatternSet, text: &[u8]) -> Vec<Occurrence> {
    let mut out = Vec::new();
    for offset in 0..text.len() {
        let rest = &text[offset..];
        for (index, pattern) in ps.iter().enumerate() {
            if pattern[0] == rest[0] && rest.starts_with(pattern) {
                out.push(Occurrence::new(index, offset));
            }
        }
    }
    out
}

/// Counts the occurrences of `pattern` without the pattern-set machinery.
pub fn naive_count(pattern: &[u8], text: &[u8]) -> usize {
    if pattern.is_empty() || pattern.len() > text.len() {
        return 0;
    }
    text.windows(pattern.len())
        .filter(|w| *w == pattern)
        .count()
}

/// Builds an Aho–Corasick automaton and runs it once over `text`.
pub fn ac_search(ps: &PatternSet, text: &[u8]) -> Vec<Occurrence> {
    AhoCorasick::new(ps).find_all(text)
}
