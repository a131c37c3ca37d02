//! Superimposition of a pattern set into one pattern of super-character
//! classes.

use crate::error::{Error, Result};
use crate::pattern::PatternSet;
use crate::qgram::GramConfig;

/// One class (sorted, distinct super-characters) per filter position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperPattern {
    classes: Vec<Vec<u32>>,
    patterns: usize,
    q: usize,
    m: usize,
    gram_space: usize,
}

impl SuperPattern {
    /// Superimposes the non-overlapping factorizations of every shift
    /// `0..q` of every pattern, each cut to the common length
    /// `floor((m - q + 1) / q)`.
    pub fn build(ps: &PatternSet, cfg: &GramConfig) -> Result<Self> {
        let (q, m) = (cfg.q(), ps.min_len());
        if m < 2 * q - 1 {
            return Err(Error::Config(format!(
                "shortest pattern has {m} bytes but q = {q} needs at least {}; lower q",
                2 * q - 1
            )));
        }
        let len = (m - q + 1) / q;
        let mut classes = vec![Vec::new(); len];
        for p in ps.iter() {
            for shift in 0..q {
                for (class, code) in classes.iter_mut().zip(cfg.factor_pattern(p, shift, len)?) {
                    class.push(code);
                }
            }
        }
        Ok(Self::finish(classes, ps.len(), cfg, m))
    }

    /// Superimposes overlapping factorizations of each pattern's first `m`
    /// bytes; the result has `m - q + 1` positions.
    pub fn build_overlapping(ps: &PatternSet, cfg: &GramConfig) -> Result<Self> {
        let (q, m) = (cfg.q(), ps.min_len());
        if m < q {
            return Err(Error::Config(format!(
                "shortest pattern has {m} bytes, fewer than q = {q}"
            )));
        }
        let mut classes = vec![Vec::new(); m - q + 1];
        for p in ps.iter() {
            for (class, code) in classes
                .iter_mut()
                .zip(cfg.factor_pattern_overlapping(&p[..m])?)
            {
                class.push(code);
            }
        }
        Ok(Self::finish(classes, ps.len(), cfg, m))
    }

    fn finish(mut classes: Vec<Vec<u32>>, patterns: usize, cfg: &GramConfig, m: usize) -> Self {
        for class in &mut classes {
            class.sort_unstable();
            class.dedup();
        }
        SuperPattern {
            classes,
            patterns,
            q: cfg.q(),
            m,
            gram_space: cfg.gram_space(),
        }
    }

    /// Number of positions.
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class(&self, position: usize) -> &[u32] {
        &self.classes[position]
    }

    pub fn classes(&self) -> &[Vec<u32>] {
        &self.classes
    }

    pub fn admits(&self, position: usize, code: u32) -> bool {
        self.classes[position].binary_search(&code).is_ok()
    }

    /// Size of the super-alphabet the codes are drawn from.
    pub fn gram_space(&self) -> usize {
        self.gram_space
    }

    /// `(r, q, m)` the pattern was built from.
    pub fn source(&self) -> (usize, usize, usize) {
        (self.patterns, self.q, self.m)
    }

    /// Number of distinct code strings the pattern admits: the product of the
    /// class sizes. The flag is set when the product saturated at `u128::MAX`.
    pub fn match_count(&self) -> (u128, bool) {
        let mut overflow = false;
        let count = self.classes.iter().fold(1u128, |acc, c| {
            acc.checked_mul(c.len() as u128).unwrap_or_else(|| {
                overflow = true;
                u128::MAX
            })
        });
        (count, overflow)
    }
}
