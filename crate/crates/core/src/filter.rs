//! Strided Shift-Or over a superimposed pattern.
//!
//! The pattern of length `L` is split into `k` alignments, alignment `j`
//! holding positions `j, j + k, j + 2k, ...`, each cut to `m' = L / k`
//! classes. If the pattern occurs at super-position `i`, exactly one alignment
//! lines up with the super-characters at `i + j, i + j + k, ...` that fall on
//! the sampled positions `u = k - 1, 2k - 1, ...`, so the text only has to be
//! read at every k-th super-character.
//!
//! All `k` automata live in one word: alignment `j` owns bits
//! `j*m' .. (j+1)*m'`. After every shift the lowest bit of each field is
//! cleared so that no state leaks into the next field, which makes the packed
//! register behave like `k` independent Shift-Or automata.

use crate::error::{Error, Result};
use crate::qgram::GramSource;
use crate::superimpose::SuperPattern;

pub const WORD_BITS: usize = u64::BITS as usize;

/// A possible occurrence of the superimposed pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Candidate {
    /// Super-position where the superimposed pattern would start.
    pub super_start: usize,
    /// Sampled super-position whose read completed the match.
    pub sample_pos: usize,
    /// Alignment that matched.
    pub alignment: usize,
}

/// Counters from one [`FilterMachine::scan`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ScanStats {
    pub reads: u64,
    pub candidates: u64,
}

#[derive(Clone)]
pub struct FilterMachine {
    k: usize,
    m_prime: usize,
    w: usize,
    masks: Vec<u64>,
    match_mask: u64,
    boundary_mask: u64,
}

impl std::fmt::Debug for FilterMachine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FilterMachine")
            .field("k", &self.k)
            .field("m_prime", &self.m_prime)
            .field("w", &self.w)
            .field("codes", &self.masks.len())
            .field("match_mask", &format_args!("{:#x}", self.match_mask))
            .field("boundary_mask", &format_args!("{:#x}", self.boundary_mask))
            .finish()
    }
}

impl FilterMachine {
    /// Packs `k` alignments of `sp` into a `w`-bit word. When `k * (L / k)`
    /// exceeds `w`, each alignment is cut to its first `w / k` classes.
    pub fn build(sp: &SuperPattern, k: usize, w: usize) -> Result<Self> {
        let len = sp.len();
        if !(1..=WORD_BITS).contains(&w) {
            return Err(Error::param("w", format!("{w} not in 1..={WORD_BITS}")));
        }
        if k == 0 || k > len || k > w {
            return Err(Error::Config(format!(
                "stride k = {k} must lie in 1..={} for a pattern of {len} positions and w = {w}",
                len.min(w)
            )));
        }
        let m_prime = (len / k).min(w / k);

        let mut masks = vec![u64::MAX; sp.gram_space()];
        let mut match_mask = 0u64;
        let mut boundary_mask = 0u64;
        for j in 0..k {
            let base = j * m_prime;
            boundary_mask |= 1 << base;
            match_mask |= 1 << (base + m_prime - 1);
            for i in 0..m_prime {
                let bit = !(1u64 << (base + i));
                for &code in sp.class(j + i * k) {
                    masks[code as usize] &= bit;
                }
            }
        }
        Ok(FilterMachine {
            k,
            m_prime,
            w,
            masks,
            match_mask,
            boundary_mask,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Classes per alignment.
    pub fn m_prime(&self) -> usize {
        self.m_prime
    }

    pub fn w(&self) -> usize {
        self.w
    }

    pub fn mask(&self, code: u32) -> u64 {
        self.masks[code as usize]
    }

    pub fn match_mask(&self) -> u64 {
        self.match_mask
    }

    pub fn boundary_mask(&self) -> u64 {
        self.boundary_mask
    }

    /// Filter reads a scan over `grams` super-characters performs.
    pub fn read_count(&self, grams: usize) -> u64 {
        (grams / self.k) as u64
    }

    /// Reads super-positions `k-1, 2k-1, ...` and reports candidates in
    /// strictly increasing `super_start` order.
    pub fn scan<S, F>(&self, src: &S, mut emit: F) -> ScanStats
    where
        S: GramSource + ?Sized,
        F: FnMut(Candidate),
    {
        let (k, m_prime) = (self.k, self.m_prime);
        let keep = !self.boundary_mask;
        let span = (m_prime - 1) * k;
        let n = src.gram_count();
        let mut stats = ScanStats::default();
        let mut state = u64::MAX;
        let mut u = k - 1;
        while u < n {
            state = ((state << 1) & keep) | self.masks[src.gram(u) as usize];
            let mut hits = !state & self.match_mask;
            while hits != 0 {
                // highest field first: super_start grows as j shrinks
                let bit = (WORD_BITS - 1) - hits.leading_zeros() as usize;
                hits &= !(1u64 << bit);
                let j = bit / m_prime;
                stats.candidates += 1;
                emit(Candidate {
                    super_start: u - j - span,
                    sample_pos: u,
                    alignment: j,
                });
            }
            stats.reads += 1;
            u += k;
        }
        stats
    }

    pub fn scan_collect<S: GramSource + ?Sized>(&self, src: &S) -> (Vec<Candidate>, ScanStats) {
        let mut out = Vec::new();
        let stats = self.scan(src, |c| out.push(c));
        (out, stats)
    }
}
