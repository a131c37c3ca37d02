//! The searcher: parameter resolution, filtering and verification.

use crate::alphabet::{AlphabetMap, Histogram, MapStrategy, QGramMap};
use crate::error::{Error, Result};
use crate::filter::{FilterMachine, WORD_BITS};
use crate::oracle::{naive_search, AhoCorasick};
use crate::pattern::{Occurrence, PatternSet};
use crate::qgram::{raw_gram, EncodedText, GramConfig, GramSource, OnTheFly, Overlapping};
use crate::superimpose::SuperPattern;
use crate::tuner::{self, TuningInput};
use crate::verify::{dedup_merge, PatternIndex};
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

/// Text length assumed by the tuner when none is given.
const DEFAULT_TEXT_LEN: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Strided filter encoding sampled q-grams on the fly.
    Mag,
    /// Strided filter over a pre-encoded text.
    Smag,
    /// Plain Shift-Or over overlapping q-grams, stride 1.
    ShiftOrOg,
    Naive,
    Ac,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::Mag,
        Variant::Smag,
        Variant::ShiftOrOg,
        Variant::Naive,
        Variant::Ac,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Mag => "mag",
            Variant::Smag => "smag",
            Variant::ShiftOrOg => "shiftor_og",
            Variant::Naive => "naive",
            Variant::Ac => "ac",
        }
    }

    pub fn is_filter(self) -> bool {
        matches!(self, Variant::Mag | Variant::Smag | Variant::ShiftOrOg)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::param("variant", format!("unknown variant `{s}`")))
    }
}

/// Alphabet reduction used by the filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MappingChoice {
    Bytes(MapStrategy),
    /// Balanced packing of whole q-grams, looked up through a hash table.
    QGram,
}

impl fmt::Display for MappingChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MappingChoice::Bytes(s) => s.fmt(f),
            MappingChoice::QGram => f.write_str("qgram"),
        }
    }
}

impl FromStr for MappingChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let strategy = match s {
            "identity" => MapStrategy::Identity,
            "freq" => MapStrategy::Frequency,
            "balance" => MapStrategy::Balanced,
            "qgram" => return Ok(MappingChoice::QGram),
            _ => {
                let ell = s
                    .strip_prefix("lowbits:")
                    .and_then(|l| l.parse::<u8>().ok())
                    .ok_or_else(|| Error::param("mapping", format!("unknown mapping `{s}`")))?;
                MapStrategy::LowBits(ell)
            }
        };
        Ok(MappingChoice::Bytes(strategy))
    }
}

/// Search options. `None` fields are filled in by the tuner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    pub variant: Variant,
    pub q: Option<usize>,
    pub k: Option<usize>,
    pub mapping: Option<MappingChoice>,
    pub sigma_prime: Option<usize>,
    /// Width of the packed filter state, at most 64.
    pub word_bits: usize,
    /// Add a prefix of the text to the pattern histogram.
    pub sample_text: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            variant: Variant::Mag,
            q: None,
            k: None,
            mapping: None,
            sigma_prime: None,
            word_bits: WORD_BITS,
            sample_text: false,
        }
    }
}

impl SearchConfig {
    pub fn variant(variant: Variant) -> Self {
        SearchConfig {
            variant,
            ..Default::default()
        }
    }
}

/// Filter parameters in effect after resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Params {
    pub q: usize,
    pub k: usize,
    pub m_prime: usize,
    pub sigma_prime: usize,
    pub gram_space: usize,
    pub mapping: MappingChoice,
}

/// Work counters for one search.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Super-characters read by the filter.
    pub reads: u64,
    pub candidates: u64,
    /// Text offsets handed to verification.
    pub verified: u64,
}

impl std::ops::AddAssign for SearchStats {
    fn add_assign(&mut self, rhs: Self) {
        self.reads += rhs.reads;
        self.candidates += rhs.candidates;
        self.verified += rhs.verified;
    }
}

#[derive(Debug, Clone)]
struct Filter {
    gram: GramConfig,
    machine: FilterMachine,
    index: PatternIndex,
    params: Params,
    min_len: usize,
    overlapping: bool,
}

#[derive(Debug, Clone)]
enum Plan {
    Filter(Box<Filter>),
    Naive,
    Ac(Box<AhoCorasick>),
}

/// A compiled pattern set, immutable and shareable across threads.
#[derive(Debug, Clone)]
pub struct Matcher {
    ps: PatternSet,
    variant: Variant,
    plan: Plan,
}

impl Matcher {
    pub fn new(ps: &PatternSet, cfg: &SearchConfig) -> Result<Self> {
        Self::with_text(ps, cfg, None)
    }

    /// Like [`Matcher::new`], letting the tuner see the text: its length
    /// always, and a prefix of its bytes when `cfg.sample_text` is set.
    pub fn with_text(ps: &PatternSet, cfg: &SearchConfig, text: Option<&[u8]>) -> Result<Self> {
        let plan = match cfg.variant {
            Variant::Naive => Plan::Naive,
            Variant::Ac => Plan::Ac(Box::new(AhoCorasick::new(ps))),
            Variant::Mag | Variant::Smag | Variant::ShiftOrOg => {
                Plan::Filter(Box::new(build_filter(ps, cfg, text)?))
            }
        };
        Ok(Matcher {
            ps: ps.clone(),
            variant: cfg.variant,
            plan,
        })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn patterns(&self) -> &PatternSet {
        &self.ps
    }

    /// Resolved filter parameters; `None` for the oracle variants.
    pub fn params(&self) -> Option<Params> {
        match &self.plan {
            Plan::Filter(f) => Some(f.params),
            _ => None,
        }
    }

    pub fn gram_config(&self) -> Option<&GramConfig> {
        match &self.plan {
            Plan::Filter(f) => Some(&f.gram),
            _ => None,
        }
    }

    pub fn machine(&self) -> Option<&FilterMachine> {
        match &self.plan {
            Plan::Filter(f) => Some(&f.machine),
            _ => None,
        }
    }

    pub fn find_all(&self, text: &[u8]) -> Vec<Occurrence> {
        self.find_all_with_stats(text).0
    }

    pub fn find_all_with_stats(&self, text: &[u8]) -> (Vec<Occurrence>, SearchStats) {
        match &self.plan {
            Plan::Naive => (naive_search(&self.ps, text), SearchStats::default()),
            Plan::Ac(ac) => (ac.find_all(text), SearchStats::default()),
            Plan::Filter(f) if f.overlapping => f.run(&Overlapping::new(&f.gram, text), text),
            Plan::Filter(f) => match self.variant {
                Variant::Smag => f.run(&f.gram.encode_text(text), text),
                _ => f.run(&OnTheFly::new(&f.gram, text), text),
            },
        }
    }

    /// Pre-encodes `text` for the SMAG variant; `None` for every other one.
    pub fn encode(&self, text: &[u8]) -> Option<EncodedText> {
        match (&self.plan, self.variant) {
            (Plan::Filter(f), Variant::Smag) => Some(f.gram.encode_text(text)),
            _ => None,
        }
    }

    /// Searches with a text already produced by [`Matcher::encode`].
    pub fn find_encoded(
        &self,
        text: &[u8],
        encoded: &EncodedText,
    ) -> Result<(Vec<Occurrence>, SearchStats)> {
        match (&self.plan, self.variant) {
            (Plan::Filter(f), Variant::Smag) if encoded.len() == text.len() / f.gram.q() => {
                Ok(f.run(encoded, text))
            }
            (Plan::Filter(_), Variant::Smag) => Err(Error::Length(format!(
                "encoded text holds {} grams, not the text's",
                encoded.len()
            ))),
            _ => Err(Error::Config(format!(
                "{} does not search pre-encoded text",
                self.variant
            ))),
        }
    }

    /// Splits `text` into `threads` chunks that overlap by the longest pattern
    /// plus `q` bytes, searches them concurrently and merges the results.
    pub fn find_all_parallel(&self, text: &[u8], threads: usize) -> Vec<Occurrence> {
        if threads <= 1 || text.len() < 2 * threads {
            return self.find_all(text);
        }
        let q = self.params().map_or(1, |p| p.q);
        let overlap = self.ps.max_len() + q;
        let chunk = text.len().div_ceil(threads);
        let results: Vec<Vec<Occurrence>> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..threads)
                .map(|t| {
                    let start = (t * chunk).min(text.len());
                    let end = (start + chunk + overlap).min(text.len());
                    scope.spawn(move || {
                        let mut found = self.find_all(&text[start..end]);
                        for o in &mut found {
                            o.offset += start;
                        }
                        found
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("search thread panicked"))
                .collect()
        });
        dedup_merge(results)
    }
}

impl Filter {
    fn run<S: GramSource + ?Sized>(&self, src: &S, text: &[u8]) -> (Vec<Occurrence>, SearchStats) {
        let mut out = Vec::new();
        let mut verified = 0u64;
        let q = self.gram.q();
        let last = text.len().checked_sub(self.min_len);
        // candidates arrive with increasing super_start, so a watermark
        // keeps every offset from being verified twice
        let mut next = 0usize;
        let scan = self.machine.scan(src, |c| {
            let Some(last) = last else { return };
            let (lo, hi) = if self.overlapping {
                (c.super_start, c.super_start.min(last))
            } else {
                let centre = c.super_start * q;
                (centre.saturating_sub(q - 1), (centre + q - 1).min(last))
            };
            let lo = lo.max(next);
            if lo > hi {
                return;
            }
            for offset in lo..=hi {
                self.index.matches_at(text, offset, &mut out);
            }
            verified += (hi - lo + 1) as u64;
            next = hi + 1;
        });
        let stats = SearchStats {
            reads: scan.reads,
            candidates: scan.candidates,
            verified,
        };
        (out, stats)
    }
}

fn build_filter(ps: &PatternSet, cfg: &SearchConfig, text: Option<&[u8]>) -> Result<Filter> {
    let overlapping = cfg.variant == Variant::ShiftOrOg;
    let mut hist = Histogram::from_patterns(ps);
    if let (true, Some(text)) = (cfg.sample_text, text) {
        hist.add_sample(text);
    }
    let (r, m) = (ps.len(), ps.min_len());
    let sigma = hist.distinct().max(1);
    let n = text.map_or(DEFAULT_TEXT_LEN, <[u8]>::len);
    let w = cfg.word_bits;

    let mapping = cfg.mapping.unwrap_or(if sigma <= 64 {
        MappingChoice::Bytes(MapStrategy::Frequency)
    } else {
        MappingChoice::Bytes(MapStrategy::Identity)
    });

    let (gram, k) = match mapping {
        MappingChoice::Bytes(strategy) => {
            let sigma_prime = match strategy {
                MapStrategy::Identity => 256,
                MapStrategy::LowBits(ell) => 1usize << ell.min(8),
                // one code per observed byte plus one for everything else
                _ => cfg.sigma_prime.unwrap_or((sigma + 1).clamp(2, 256)),
            };
            let map = AlphabetMap::build(strategy, &hist, sigma_prime)?;
            let ti = TuningInput {
                w,
                ..TuningInput::new(sigma, map.sigma_prime(), r, m, n)
            };
            let q = match cfg.q {
                Some(q) => q,
                None if overlapping => tuner::choose_q(&ti).min(m),
                None => tuner::choose_q(&ti),
            };
            let k = cfg.k.unwrap_or_else(|| tuner::choose_k(&ti, q));
            (GramConfig::new(q, map)?, k)
        }
        MappingChoice::QGram => {
            let ti = TuningInput {
                w,
                ..TuningInput::new(sigma, sigma, r, m, n)
            };
            let q = cfg.q.unwrap_or_else(|| qgram_default_q(&ti));
            let counts = gram_counts(ps, q, overlapping)?;
            let sigma_prime = cfg
                .sigma_prime
                .unwrap_or_else(|| (counts.len() + 1).next_power_of_two().clamp(2, 1 << 20));
            let map = QGramMap::balanced_reserved(&counts, sigma_prime)?;
            let k = cfg
                .k
                .unwrap_or_else(|| tuner::choose_k_in(&ti, q, sigma_prime as f64));
            (GramConfig::hashed(q, map)?, k)
        }
    };

    let q = gram.q();
    let (sp, k) = if overlapping {
        (SuperPattern::build_overlapping(ps, &gram)?, 1)
    } else {
        (SuperPattern::build(ps, &gram)?, k)
    };
    if overlapping && cfg.k.is_some_and(|k| k != 1) {
        return Err(Error::Config("shiftor_og always uses k = 1".into()));
    }
    let machine = FilterMachine::build(&sp, k, w)?;
    let params = Params {
        q,
        k,
        m_prime: machine.m_prime(),
        sigma_prime: gram.sigma_prime(),
        gram_space: gram.gram_space(),
        mapping,
    };
    Ok(Filter {
        index: PatternIndex::new(ps),
        gram,
        machine,
        params,
        min_len: m,
        overlapping,
    })
}

/// Gram length for gram-level mapping: the tuner's choice over the observed
/// byte alphabet, raised to at least 4 where the patterns allow it.
fn qgram_default_q(ti: &TuningInput) -> usize {
    let q = tuner::choose_q(&TuningInput {
        sigma_prime: ti.sigma.max(2),
        ..*ti
    });
    let longest = ti.m.div_ceil(2);
    q.max(4).min(longest).clamp(1, crate::qgram::MAX_Q)
}

/// Counts raw q-grams at every superimposed position of every pattern.
fn gram_counts(ps: &PatternSet, q: usize, overlapping: bool) -> Result<HashMap<u64, u64>> {
    let m = ps.min_len();
    let mut counts = HashMap::new();
    let mut add = |g: &[u8]| *counts.entry(raw_gram(g)).or_insert(0u64) += 1;
    if overlapping {
        if m < q {
            return Err(Error::Config(format!(
                "q = {q} exceeds shortest pattern ({m})"
            )));
        }
        for p in ps.iter() {
            p[..m].windows(q).for_each(&mut add);
        }
    } else {
        let len = tuner::super_len(m, q);
        if len == 0 {
            return Err(Error::Config(format!(
                "shortest pattern has {m} bytes but q = {q} needs at least {}; lower q",
                2 * q - 1
            )));
        }
        for p in ps.iter() {
            for shift in 0..q {
                p[shift..shift + len * q].chunks_exact(q).for_each(&mut add);
            }
        }
    }
    Ok(counts)
}
