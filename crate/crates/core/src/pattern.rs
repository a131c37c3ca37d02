//! Pattern sets and the occurrence type shared by every search path.

use crate::error::{Error, Result};

/// A validated, non-empty collection of non-empty byte patterns.
///
/// Patterns keep their input order and duplicates are retained, so pattern
/// indices in reported occurrences always refer to the caller's list. The
/// filter works on the first `min_len()` bytes of every pattern; verification
/// always compares complete patterns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternSet {
    patterns: Vec<Vec<u8>>,
    min_len: usize,
    max_len: usize,
}

impl PatternSet {
    pub fn new<I, P>(raw: I) -> Result<Self>
    where
        I: IntoIterator<Item = P>,
        P: AsRef<[u8]>,
    {
        let patterns: Vec<Vec<u8>> = raw.into_iter().map(|p| p.as_ref().to_vec()).collect();
        if patterns.is_empty() {
            return Err(Error::EmptyPatternSet);
        }
        if let Some(index) = patterns.iter().position(|p| p.is_empty()) {
            return Err(Error::EmptyPattern { index });
        }
        let min_len = patterns.iter().map(Vec::len).min().unwrap_or(0);
        let max_len = patterns.iter().map(Vec::len).max().unwrap_or(0);
        Ok(PatternSet {
            patterns,
            min_len,
            max_len,
        })
    }

    /// Parses newline-delimited patterns. A single trailing newline does not
    /// produce an extra pattern; any other empty line is an error.
    pub fn from_lines(data: &[u8]) -> Result<Self> {
        let body = data.strip_suffix(b"\n").unwrap_or(data);
        if body.is_empty() {
            return Err(Error::EmptyPatternSet);
        }
        PatternSet::new(body.split(|&b| b == b'\n'))
    }

    /// Number of patterns, `r`.
    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    /// Effective filter length `m`: the shortest pattern length.
    pub fn min_len(&self) -> usize {
        self.min_len
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn get(&self, index: usize) -> &[u8] {
        &self.patterns[index]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[u8]> + '_ {
        self.patterns.iter().map(Vec::as_slice)
    }

    pub fn as_slice(&self) -> &[Vec<u8>] {
        &self.patterns
    }
}

/// One exact pattern occurrence.
///
/// Ordering is by `(offset, pattern)`, which is the canonical order of every
/// result list produced by this crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Occurrence {
    /// Byte offset in the text where the pattern starts.
    pub offset: usize,
    /// Index into the pattern set.
    pub pattern: usize,
}

impl Occurrence {
    pub fn new(pattern: usize, offset: usize) -> Self {
        Occurrence { offset, pattern }
    }
}
