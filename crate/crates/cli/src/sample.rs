//! Pattern sets cut from a corpus.

use mag::{Error, PatternSet, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct PatternSample {
    pub patterns: PatternSet,
    /// Where each pattern was cut from.
    pub offsets: Vec<usize>,
}

/// `r` substrings of length `m` at offsets drawn uniformly from
/// `[0, n - m]`. Deterministic for a fixed seed.
pub fn sample_patterns(corpus: &[u8], r: usize, m: usize, seed: u64) -> Result<PatternSample> {
    if r == 0 {
        return Err(Error::EmptyPatternSet);
    }
    if m == 0 {
        return Err(Error::EmptyPattern { index: 0 });
    }
    let Some(last) = corpus.len().checked_sub(m) else {
        return Err(Error::Length(format!(
            "pattern length {m} exceeds corpus length {}",
            corpus.len()
        )));
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let offsets: Vec<usize> = (0..r).map(|_| rng.gen_range(0..=last)).collect();
    let patterns = PatternSet::new(offsets.iter().map(|&o| &corpus[o..o + m]))?;
    Ok(PatternSample { patterns, offsets })
}

/// Like [`sample_patterns`], drawing uniformly among the windows that do
/// not contain `avoid`.
pub fn sample_patterns_avoiding(
    corpus: &[u8],
    r: usize,
    m: usize,
    avoid: u8,
    seed: u64,
) -> Result<PatternSample> {
    if r == 0 {
        return Err(Error::EmptyPatternSet);
    }
    if m == 0 {
        return Err(Error::EmptyPattern { index: 0 });
    }
    let longest_run = corpus
        .split(|&b| b == avoid)
        .map(<[u8]>::len)
        .max()
        .unwrap_or(0);
    if longest_run < m {
        return Err(Error::Length(format!(
            "no window of length {m} free of byte {avoid:#04x}"
        )));
    }
    let last = corpus.len() - m;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut offsets = Vec::with_capacity(r);
    while offsets.len() < r {
        let o = rng.gen_range(0..=last);
        if !corpus[o..o + m].contains(&avoid) {
            offsets.push(o);
        }
    }
    let patterns = PatternSet::new(offsets.iter().map(|&o| &corpus[o..o + m]))?;
    Ok(PatternSample { patterns, offsets })
}
