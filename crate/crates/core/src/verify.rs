//! Candidate verification against the original, unmapped patterns.

use crate::filter::Candidate;
use crate::pattern::{Occurrence, PatternSet};
use crate::qgram::raw_gram;

/// Inclusive range of byte offsets a candidate can stand for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyWindow {
    pub start_lo: usize,
    pub start_hi: usize,
}

impl VerifyWindow {
    /// The `2q - 1` offsets centred on `q * super_start`, clipped to starts
    /// that leave room for `m` bytes. `None` when clipping empties it.
    pub fn new(super_start: usize, q: usize, n: usize, m: usize) -> Option<Self> {
        let centre = q * super_start;
        let start_lo = centre.saturating_sub(q - 1);
        let start_hi = (centre + q - 1).min(n.checked_sub(m)?);
        (start_lo <= start_hi).then_some(VerifyWindow { start_lo, start_hi })
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.start_hi - self.start_lo + 1
    }
}

/// Checks every pattern at every offset of the candidate's window.
pub fn verify(ps: &PatternSet, text: &[u8], c: &Candidate, q: usize) -> Vec<Occurrence> {
    let Some(window) = VerifyWindow::new(c.super_start, q, text.len(), ps.min_len()) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for offset in window.start_lo..=window.start_hi {
        for (index, pattern) in ps.iter().enumerate() {
            if text[offset..].starts_with(pattern) {
                out.push(Occurrence::new(index, offset));
            }
        }
    }
    out
}

/// Concatenates, sorts and deduplicates occurrence lists.
pub fn dedup_merge<I>(streams: I) -> Vec<Occurrence>
where
    I: IntoIterator<Item = Vec<Occurrence>>,
{
    let mut all: Vec<Occurrence> = streams.into_iter().flatten().collect();
    all.sort_unstable();
    all.dedup();
    all
}

/// Hash buckets keyed by each pattern's first `min(m, 8)` bytes.
///
/// A lookup at one text offset touches only the patterns sharing that
/// prefix, and reports them in ascending pattern order.
#[derive(Debug, Clone)]
pub struct PatternIndex {
    prefix: usize,
    prefix_mask: u64,
    shift: u32,
    starts: Vec<u32>,
    entries: Vec<(u64, u32)>,
    patterns: Vec<Vec<u8>>,
}

impl PatternIndex {
    pub fn new(ps: &PatternSet) -> Self {
        let prefix = ps.min_len().min(8);
        let prefix_mask = if prefix == 8 {
            u64::MAX
        } else {
            (1u64 << (8 * prefix)) - 1
        };
        let bits = (2 * ps.len()).next_power_of_two().max(16).trailing_zeros();
        let shift = u64::BITS - bits;
        let buckets = 1usize << bits;

        let mut keyed: Vec<(usize, u64, u32)> = ps
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let key = raw_gram(&p[..prefix]);
                (bucket(key, shift), key, i as u32)
            })
            .collect();
        keyed.sort_unstable_by_key(|&(b, _, i)| (b, i));

        let mut starts = vec![0u32; buckets + 1];
        for &(b, _, _) in &keyed {
            starts[b + 1] += 1;
        }
        for b in 0..buckets {
            starts[b + 1] += starts[b];
        }
        PatternIndex {
            prefix,
            prefix_mask,
            shift,
            starts,
            entries: keyed.into_iter().map(|(_, key, i)| (key, i)).collect(),
            patterns: ps.as_slice().to_vec(),
        }
    }

    /// Appends every pattern occurring at `offset`; requires
    /// `offset + m <= text.len()`.
    #[inline]
    pub fn matches_at(&self, text: &[u8], offset: usize, out: &mut Vec<Occurrence>) {
        let key = match text.get(offset..offset + 8) {
            Some(word) => {
                u64::from_le_bytes(word.try_into().expect("eight bytes")) & self.prefix_mask
            }
            None => raw_gram(&text[offset..offset + self.prefix]),
        };
        let b = bucket(key, self.shift);
        let range = self.starts[b] as usize..self.starts[b + 1] as usize;
        for &(k, index) in &self.entries[range] {
            if k == key && text[offset..].starts_with(&self.patterns[index as usize]) {
                out.push(Occurrence::new(index as usize, offset));
            }
        }
    }
}

#[inline(always)]
fn bucket(key: u64, shift: u32) -> usize {
    (key.wrapping_mul(0x9E37_79B9_7F4A_7C15) >> shift) as usize
}
