//! Alphabet reduction for the filter.
//!
//! An [`AlphabetMap`] sends each byte to one of `sigma_prime` codes and is
//! consulted only when q-grams are encoded for filtering. A [`QGramMap`] does
//! the same one level up, over whole q-grams. Verification never sees either.

use crate::error::{Error, Result};
use crate::pattern::PatternSet;
use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::fmt;

/// Largest prefix of a text added to a [`Histogram`] by [`Histogram::add_sample`].
pub const TEXT_SAMPLE_CAP: usize = 1 << 20;

/// Per-byte occurrence counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    counts: [u64; 256],
    total: u64,
}

impl Default for Histogram {
    fn default() -> Self {
        Histogram {
            counts: [0; 256],
            total: 0,
        }
    }
}

impl Histogram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_counts(counts: [u64; 256]) -> Self {
        Histogram {
            total: counts.iter().sum(),
            counts,
        }
    }

    pub fn from_patterns(ps: &PatternSet) -> Self {
        let mut h = Histogram::new();
        for p in ps.iter() {
            h.add(p);
        }
        h
    }

    pub fn add(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.counts[b as usize] += 1;
        }
        self.total += bytes.len() as u64;
    }

    /// Adds at most the first [`TEXT_SAMPLE_CAP`] bytes of `text`.
    pub fn add_sample(&mut self, text: &[u8]) {
        self.add(&text[..text.len().min(TEXT_SAMPLE_CAP)]);
    }

    pub fn count(&self, byte: u8) -> u64 {
        self.counts[byte as usize]
    }

    pub fn counts(&self) -> &[u64; 256] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Number of byte values with a non-zero count.
    pub fn distinct(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    /// Bytes by descending count, ties by ascending byte value.
    fn ranked(&self) -> Vec<u8> {
        let mut bytes: Vec<u8> = (0..=255).collect();
        bytes.sort_by_key(|&b| (Reverse(self.counts[b as usize]), b));
        bytes
    }

    /// Like `ranked`, without the bytes that were never seen.
    fn ranked_seen(&self) -> Vec<u8> {
        let mut bytes: Vec<u8> = (0..=255).filter(|&b| self.counts[b as usize] > 0).collect();
        bytes.sort_by_key(|&b| (Reverse(self.counts[b as usize]), b));
        bytes
    }
}

/// How an [`AlphabetMap`] was built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MapStrategy {
    Identity,
    Frequency,
    Balanced,
    LowBits(u8),
}

impl fmt::Display for MapStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapStrategy::Identity => f.write_str("identity"),
            MapStrategy::Frequency => f.write_str("freq"),
            MapStrategy::Balanced => f.write_str("balance"),
            MapStrategy::LowBits(ell) => write!(f, "lowbits:{ell}"),
        }
    }
}

/// Surjection from bytes onto `0..sigma_prime`.
#[derive(Clone, PartialEq, Eq)]
pub struct AlphabetMap {
    table: [u8; 256],
    sigma_prime: usize,
    strategy: MapStrategy,
}

impl fmt::Debug for AlphabetMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AlphabetMap")
            .field("sigma_prime", &self.sigma_prime)
            .field("strategy", &self.strategy)
            .finish_non_exhaustive()
    }
}

impl AlphabetMap {
    pub fn identity() -> Self {
        let mut table = [0u8; 256];
        for (c, slot) in table.iter_mut().enumerate() {
            *slot = c as u8;
        }
        AlphabetMap {
            table,
            sigma_prime: 256,
            strategy: MapStrategy::Identity,
        }
    }

    /// Ranks bytes by frequency: the `sigma_prime - 1` most frequent bytes get
    /// their rank as code and everything else shares the last code.
    pub fn frequency(h: &Histogram, sigma_prime: usize) -> Result<Self> {
        check_sigma_prime(sigma_prime)?;
        let mut table = [(sigma_prime - 1) as u8; 256];
        for (rank, b) in h
            .ranked_seen()
            .into_iter()
            .take(sigma_prime - 1)
            .enumerate()
        {
            table[b as usize] = rank as u8;
        }
        Ok(AlphabetMap {
            table,
            sigma_prime,
            strategy: MapStrategy::Frequency,
        })
    }

    /// Greedy longest-processing-time packing of the bytes into
    /// `sigma_prime` bins of roughly equal weight; the bin is the code.
    pub fn balanced(h: &Histogram, sigma_prime: usize) -> Result<Self> {
        check_sigma_prime(sigma_prime)?;
        let items: Vec<(u8, u64)> = h.ranked().into_iter().map(|b| (b, h.count(b))).collect();
        let bins = lpt_assign(&items, sigma_prime);
        let mut table = [0u8; 256];
        for ((b, _), bin) in items.iter().zip(bins) {
            table[*b as usize] = bin as u8;
        }
        Ok(AlphabetMap {
            table,
            sigma_prime,
            strategy: MapStrategy::Balanced,
        })
    }

    /// Keeps the `ell` low-order bits of each byte.
    pub fn low_bits(ell: u8) -> Result<Self> {
        if !(1..=8).contains(&ell) {
            return Err(Error::param("ell", format!("{ell} not in 1..=8")));
        }
        let mask = ((1u16 << ell) - 1) as u8;
        let mut table = [0u8; 256];
        for (c, slot) in table.iter_mut().enumerate() {
            *slot = c as u8 & mask;
        }
        Ok(AlphabetMap {
            table,
            sigma_prime: 1 << ell,
            strategy: MapStrategy::LowBits(ell),
        })
    }

    /// Builds a map with the given strategy. `sigma_prime` is ignored by
    /// `Identity` and `LowBits`, whose sizes are fixed.
    pub fn build(strategy: MapStrategy, h: &Histogram, sigma_prime: usize) -> Result<Self> {
        match strategy {
            MapStrategy::Identity => Ok(AlphabetMap::identity()),
            MapStrategy::Frequency => AlphabetMap::frequency(h, sigma_prime),
            MapStrategy::Balanced => AlphabetMap::balanced(h, sigma_prime),
            MapStrategy::LowBits(ell) => AlphabetMap::low_bits(ell),
        }
    }

    #[inline(always)]
    pub fn code(&self, byte: u8) -> u8 {
        self.table[byte as usize]
    }

    pub fn table(&self) -> &[u8; 256] {
        &self.table
    }

    pub fn sigma_prime(&self) -> usize {
        self.sigma_prime
    }

    pub fn strategy(&self) -> MapStrategy {
        self.strategy
    }

    /// Total histogram weight landing on each code.
    pub fn bin_weights(&self, h: &Histogram) -> Vec<u64> {
        let mut weights = vec![0u64; self.sigma_prime];
        for b in 0..=255u8 {
            weights[self.code(b) as usize] += h.count(b);
        }
        weights
    }

    /// The table as `byte,code` CSV lines with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("byte,code\n");
        for (b, code) in self.table.iter().enumerate() {
            out.push_str(&format!("{b},{code}\n"));
        }
        out
    }
}

fn check_sigma_prime(sigma_prime: usize) -> Result<()> {
    if (2..=256).contains(&sigma_prime) {
        Ok(())
    } else {
        Err(Error::param(
            "sigma_prime",
            format!("{sigma_prime} not in 2..=256"),
        ))
    }
}

/// Places each weighted item, in the given order, into the lightest bin
/// (lowest index on ties). Returns the bin of each item.
fn lpt_assign<T>(items: &[(T, u64)], bins: usize) -> Vec<usize> {
    let mut heap: BinaryHeap<Reverse<(u64, usize)>> = (0..bins).map(|i| Reverse((0, i))).collect();
    items
        .iter()
        .map(|(_, weight)| {
            let Reverse((load, bin)) = heap.pop().expect("at least one bin");
            heap.push(Reverse((load + weight, bin)));
            bin
        })
        .collect()
}

/// Balanced reduction of a q-gram alphabet, stored in a hash table.
///
/// Grams that were never counted map to the last code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QGramMap {
    table: GramTable,
    sigma_prime: usize,
}

impl QGramMap {
    /// Packs the counted grams into `sigma_prime` bins with the same greedy
    /// rule as [`AlphabetMap::balanced`]; ties go to the smaller gram.
    pub fn balanced(gram_counts: &HashMap<u64, u64>, sigma_prime: usize) -> Result<Self> {
        Self::pack(gram_counts, sigma_prime, sigma_prime)
    }

    /// Like [`QGramMap::balanced`] but packs into `sigma_prime - 1` bins, so
    /// the last code is held only by grams that were never counted.
    pub fn balanced_reserved(gram_counts: &HashMap<u64, u64>, sigma_prime: usize) -> Result<Self> {
        Self::pack(
            gram_counts,
            sigma_prime,
            sigma_prime.saturating_sub(1).max(1),
        )
    }

    fn pack(gram_counts: &HashMap<u64, u64>, sigma_prime: usize, bins: usize) -> Result<Self> {
        if sigma_prime < 2 || sigma_prime > u32::MAX as usize {
            return Err(Error::param(
                "sigma_prime",
                format!("{sigma_prime} not in 2..=2^32-1"),
            ));
        }
        let mut items: Vec<(u64, u64)> = gram_counts.iter().map(|(&g, &c)| (g, c)).collect();
        items.sort_by_key(|&(g, c)| (Reverse(c), g));
        let codes = lpt_assign(&items, bins);
        let table = GramTable::new(
            items
                .iter()
                .zip(codes)
                .map(|(&(g, _), bin)| (g, bin as u32)),
        );
        Ok(QGramMap { table, sigma_prime })
    }

    #[inline(always)]
    pub fn code(&self, gram: u64) -> u32 {
        self.table.get(gram).unwrap_or(self.sigma_prime as u32 - 1)
    }

    pub fn sigma_prime(&self) -> usize {
        self.sigma_prime
    }

    /// Number of grams with an explicit code.
    pub fn len(&self) -> usize {
        self.table.len
    }

    pub fn is_empty(&self) -> bool {
        self.table.len == 0
    }
}

const EMPTY: u32 = u32::MAX;

/// Linear-probing table from gram to code, at most half full.
#[derive(Debug, Clone, PartialEq, Eq)]
struct GramTable {
    keys: Vec<u64>,
    values: Vec<u32>,
    shift: u32,
    len: usize,
}

impl GramTable {
    fn new(entries: impl ExactSizeIterator<Item = (u64, u32)>) -> Self {
        let slots = (2 * entries.len()).next_power_of_two().max(8);
        let mut table = GramTable {
            keys: vec![0; slots],
            values: vec![EMPTY; slots],
            shift: u64::BITS - slots.trailing_zeros(),
            len: 0,
        };
        for (key, value) in entries {
            let mut slot = table.slot(key);
            while table.values[slot] != EMPTY && table.keys[slot] != key {
                slot = (slot + 1) & (slots - 1);
            }
            if table.values[slot] == EMPTY {
                table.len += 1;
            }
            table.keys[slot] = key;
            table.values[slot] = value;
        }
        table
    }

    #[inline(always)]
    fn slot(&self, key: u64) -> usize {
        (key.wrapping_mul(0x9E37_79B9_7F4A_7C15) >> self.shift) as usize
    }

    #[inline(always)]
    fn get(&self, key: u64) -> Option<u32> {
        let mask = self.keys.len() - 1;
        let mut slot = self.slot(key);
        loop {
            let value = self.values[slot];
            if value == EMPTY {
                return None;
            }
            if self.keys[slot] == key {
                return Some(value);
            }
            slot = (slot + 1) & mask;
        }
    }
}
