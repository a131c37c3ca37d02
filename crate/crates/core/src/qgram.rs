//! q-gram super-characters.
//!
//! A q-gram `S[0..q]` over the mapped alphabet is encoded as
//! `sum S[i] * sigma'^i`, evaluated with Horner's rule from the last byte.
//! When a [`QGramMap`] is configured the raw bytes are packed little-endian
//! into a `u64` instead and the map reduces that value.

use crate::alphabet::{AlphabetMap, QGramMap};
use crate::error::{Error, Result};

pub const MAX_Q: usize = 8;
/// Upper bound on the super-alphabet size, which is also the number of
/// entries in the filter's mask table.
pub const MAX_GRAM_SPACE: usize = 1 << 24;

#[derive(Debug, Clone)]
enum Reduction {
    Bytes(AlphabetMap),
    Grams(QGramMap),
}

/// Gram length plus the alphabet reduction applied before encoding.
#[derive(Debug, Clone)]
pub struct GramConfig {
    q: usize,
    reduction: Reduction,
    gram_space: usize,
}

impl GramConfig {
    /// Encodes over a byte-level map. Fails when `sigma'^q` exceeds
    /// [`MAX_GRAM_SPACE`].
    pub fn new(q: usize, map: AlphabetMap) -> Result<Self> {
        check_q(q)?;
        let gram_space = (map.sigma_prime() as u128).pow(q as u32);
        if gram_space > MAX_GRAM_SPACE as u128 {
            return Err(Error::Config(format!(
                "gram space {}^{q} exceeds {MAX_GRAM_SPACE}",
                map.sigma_prime()
            )));
        }
        Ok(GramConfig {
            q,
            reduction: Reduction::Bytes(map),
            gram_space: gram_space as usize,
        })
    }

    /// Encodes raw q-grams and reduces them through `map`.
    pub fn hashed(q: usize, map: QGramMap) -> Result<Self> {
        check_q(q)?;
        if map.sigma_prime() > MAX_GRAM_SPACE {
            return Err(Error::Config(format!(
                "gram space {} exceeds {MAX_GRAM_SPACE}",
                map.sigma_prime()
            )));
        }
        Ok(GramConfig {
            q,
            gram_space: map.sigma_prime(),
            reduction: Reduction::Grams(map),
        })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Size of the super-alphabet; every code is below this.
    pub fn gram_space(&self) -> usize {
        self.gram_space
    }

    /// Size of the byte-level reduced alphabet, or of the gram-level one when
    /// grams are reduced directly.
    pub fn sigma_prime(&self) -> usize {
        match &self.reduction {
            Reduction::Bytes(map) => map.sigma_prime(),
            Reduction::Grams(map) => map.sigma_prime(),
        }
    }

    pub fn alphabet_map(&self) -> Option<&AlphabetMap> {
        match &self.reduction {
            Reduction::Bytes(map) => Some(map),
            Reduction::Grams(_) => None,
        }
    }

    /// Encodes exactly `q` bytes.
    #[inline(always)]
    pub fn encode_gram(&self, bytes: &[u8]) -> u32 {
        debug_assert_eq!(bytes.len(), self.q);
        match &self.reduction {
            Reduction::Bytes(map) => {
                let base = map.sigma_prime() as u32;
                bytes
                    .iter()
                    .rev()
                    .fold(0u32, |code, &b| code * base + map.code(b) as u32)
            }
            Reduction::Grams(map) => map.code(raw_gram(bytes)),
        }
    }

    /// Pre-encodes every non-overlapping gram of `text`; trailing bytes that
    /// do not fill a gram are dropped.
    pub fn encode_text(&self, text: &[u8]) -> EncodedText {
        EncodedText {
            supers: text
                .chunks_exact(self.q)
                .map(|g| self.encode_gram(g))
                .collect(),
        }
    }

    /// Encodes gram `u`, i.e. bytes `[u*q, u*q + q)`, straight from the text.
    pub fn gram_at(&self, text: &[u8], u: usize) -> Result<u32> {
        let len = text.len() / self.q;
        if u >= len {
            return Err(Error::OutOfBounds { position: u, len });
        }
        Ok(self.encode_gram(&text[u * self.q..(u + 1) * self.q]))
    }

    /// Non-overlapping factorization of `p[shift..]` into `len` grams.
    pub fn factor_pattern(&self, p: &[u8], shift: usize, len: usize) -> Result<Vec<u32>> {
        if shift + len * self.q > p.len() {
            return Err(Error::Length(format!(
                "{len} grams of {} bytes from shift {shift} need more than {} bytes",
                self.q,
                p.len()
            )));
        }
        Ok(p[shift..shift + len * self.q]
            .chunks_exact(self.q)
            .map(|g| self.encode_gram(g))
            .collect())
    }

    /// Overlapping factorization: one gram starting at every byte.
    pub fn factor_pattern_overlapping(&self, p: &[u8]) -> Result<Vec<u32>> {
        if p.len() < self.q {
            return Err(Error::Length(format!(
                "pattern of {} bytes is shorter than q = {}",
                p.len(),
                self.q
            )));
        }
        Ok(p.windows(self.q).map(|g| self.encode_gram(g)).collect())
    }
}

/// Little-endian packing of up to eight bytes.
#[inline(always)]
pub fn raw_gram(bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .rev()
        .fold(0u64, |code, &b| code << 8 | b as u64)
}

fn check_q(q: usize) -> Result<()> {
    if (1..=MAX_Q).contains(&q) {
        Ok(())
    } else {
        Err(Error::param("q", format!("{q} not in 1..={MAX_Q}")))
    }
}

/// Text pre-encoded into non-overlapping super-characters.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EncodedText {
    supers: Vec<u32>,
}

impl EncodedText {
    pub fn supers(&self) -> &[u32] {
        &self.supers
    }

    pub fn len(&self) -> usize {
        self.supers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.supers.is_empty()
    }
}

/// Random access to the super-characters of a text.
pub trait GramSource {
    /// Number of complete grams.
    fn gram_count(&self) -> usize;
    /// Super-character `u`; `u < gram_count()`.
    fn gram(&self, u: usize) -> u32;
}

impl GramSource for EncodedText {
    fn gram_count(&self) -> usize {
        self.supers.len()
    }

    #[inline(always)]
    fn gram(&self, u: usize) -> u32 {
        self.supers[u]
    }
}

/// Encodes grams on demand from the raw text.
#[derive(Debug, Clone, Copy)]
pub struct OnTheFly<'a> {
    cfg: &'a GramConfig,
    text: &'a [u8],
}

impl<'a> OnTheFly<'a> {
    pub fn new(cfg: &'a GramConfig, text: &'a [u8]) -> Self {
        OnTheFly { cfg, text }
    }
}

impl GramSource for OnTheFly<'_> {
    fn gram_count(&self) -> usize {
        self.text.len() / self.cfg.q
    }

    #[inline(always)]
    fn gram(&self, u: usize) -> u32 {
        let q = self.cfg.q;
        self.cfg.encode_gram(&self.text[u * q..u * q + q])
    }
}

/// Overlapping grams: one per byte position.
#[derive(Debug, Clone, Copy)]
pub struct Overlapping<'a> {
    cfg: &'a GramConfig,
    text: &'a [u8],
}

impl<'a> Overlapping<'a> {
    pub fn new(cfg: &'a GramConfig, text: &'a [u8]) -> Self {
        Overlapping { cfg, text }
    }
}

impl GramSource for Overlapping<'_> {
    fn gram_count(&self) -> usize {
        (self.text.len() + 1).saturating_sub(self.cfg.q)
    }

    #[inline(always)]
    fn gram(&self, u: usize) -> u32 {
        self.cfg.encode_gram(&self.text[u..u + self.cfg.q])
    }
}
