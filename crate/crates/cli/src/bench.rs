//! The benchmark matrix: variants × pattern counts × pattern lengths.

use crate::sample::sample_patterns;
use crate::CliError;
use mag::{AhoCorasick, Matcher, Occurrence, PatternSet, SearchConfig, Variant};
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// One CSV line of benchmark output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub dataset: String,
    pub variant: String,
    pub r: usize,
    pub m: usize,
    pub q: Option<usize>,
    pub k: Option<usize>,
    pub sigma_prime: Option<usize>,
    pub mapping: Option<String>,
    /// Text bytes per second of search time, in MiB.
    pub mb_per_s: f64,
    pub filter_reads: u64,
    pub candidates: u64,
    pub occurrences: usize,
}

pub const HEADER: [&str; 12] = [
    "dataset",
    "variant",
    "r",
    "m",
    "q",
    "k",
    "sigma_prime",
    "mapping",
    "mb_per_s",
    "filter_reads",
    "candidates",
    "occurrences",
];

#[derive(Debug, Clone)]
pub struct BenchPlan {
    pub dataset: String,
    pub variants: Vec<Variant>,
    pub rs: Vec<usize>,
    pub ms: Vec<usize>,
    pub seed: u64,
    /// Count matcher construction and SMAG text encoding in the timing.
    pub include_prep: bool,
    /// Compare every row's occurrences with the Aho–Corasick oracle.
    pub check: bool,
    /// Parameter overrides applied to the filter variants.
    pub search: SearchConfig,
}

impl Default for BenchPlan {
    fn default() -> Self {
        BenchPlan {
            dataset: "text".into(),
            variants: vec![Variant::Mag, Variant::Smag, Variant::Ac],
            rs: vec![10, 100, 1000, 10_000],
            ms: vec![8, 16, 32, 64],
            seed: 1,
            include_prep: false,
            check: false,
            search: SearchConfig::default(),
        }
    }
}

/// Runs every cell of the plan in order, m outermost, handing each row to
/// `emit` as soon as it is measured.
pub fn run_bench(
    text: &[u8],
    plan: &BenchPlan,
    mut emit: impl FnMut(&BenchRow) -> Result<(), CliError>,
) -> Result<Vec<BenchRow>, CliError> {
    let mut rows = Vec::new();
    for &m in &plan.ms {
        for &r in &plan.rs {
            let sample = sample_patterns(text, r, m, plan.seed ^ ((r as u64) << 32 | m as u64))?;
            let expected = plan
                .check
                .then(|| AhoCorasick::new(&sample.patterns).find_all(text));
            for &variant in &plan.variants {
                let (row, found) = run_cell(text, &sample.patterns, variant, plan)?;
                if let Some(expected) = &expected {
                    if &found != expected {
                        return Err(CliError::Check(format!(
                            "{variant} on r={r} m={m}: {} occurrences, oracle has {}",
                            found.len(),
                            expected.len()
                        )));
                    }
                }
                emit(&row)?;
                rows.push(row);
            }
        }
    }
    Ok(rows)
}

fn run_cell(
    text: &[u8],
    ps: &PatternSet,
    variant: Variant,
    plan: &BenchPlan,
) -> Result<(BenchRow, Vec<Occurrence>), CliError> {
    let cfg = SearchConfig {
        variant,
        ..plan.search.clone()
    };
    let prep = Instant::now();
    let matcher = Matcher::with_text(ps, &cfg, Some(text))?;
    let encoded = matcher.encode(text);
    let prep = prep.elapsed();

    let start = Instant::now();
    let (found, stats) = match &encoded {
        Some(encoded) => matcher.find_encoded(text, encoded)?,
        None => matcher.find_all_with_stats(text),
    };
    let mut elapsed = start.elapsed();
    if plan.include_prep {
        elapsed += prep;
    }
    let secs = elapsed.as_secs_f64().max(1e-9);
    let params = matcher.params();
    let row = BenchRow {
        dataset: plan.dataset.clone(),
        variant: variant.to_string(),
        r: ps.len(),
        m: ps.min_len(),
        q: params.map(|p| p.q),
        k: params.map(|p| p.k),
        sigma_prime: params.map(|p| p.sigma_prime),
        mapping: params.map(|p| p.mapping.to_string()),
        mb_per_s: text.len() as f64 / secs / (1u64 << 20) as f64,
        filter_reads: stats.reads,
        candidates: stats.candidates,
        occurrences: found.len(),
    };
    Ok((row, found))
}

/// Writes rows with the [`HEADER`] line first.
pub fn csv_writer<W: std::io::Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().has_headers(true).from_writer(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::random_text;

    #[test]
    fn header_matches_fields() {
        let mut w = csv_writer(Vec::new());
        w.serialize(BenchRow {
            dataset: "d".into(),
            variant: "ac".into(),
            r: 1,
            m: 2,
            q: None,
            k: None,
            sigma_prime: None,
            mapping: None,
            mb_per_s: 1.5,
            filter_reads: 0,
            candidates: 0,
            occurrences: 3,
        })
        .unwrap();
        let out = String::from_utf8(w.into_inner().unwrap()).unwrap();
        let mut lines = out.lines();
        assert_eq!(lines.next().unwrap(), HEADER.join(","));
        assert_eq!(lines.next().unwrap(), "d,ac,1,2,,,,,1.5,0,0,3");
    }

    #[test]
    fn small_matrix() {
        let text = random_text(50_000, 4, 2);
        let plan = BenchPlan {
            variants: vec![Variant::Mag, Variant::Naive],
            rs: vec![3, 20],
            ms: vec![12],
            check: true,
            ..Default::default()
        };
        let mut emitted = 0;
        let rows = run_bench(&text, &plan, |_| {
            emitted += 1;
            Ok(())
        })
        .unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(emitted, 4);
        for pair in rows.chunks(2) {
            assert_eq!(pair[0].occurrences, pair[1].occurrences);
            assert!(pair[0].occurrences >= pair[0].r);
            assert!(pair
                .iter()
                .all(|row| row.mb_per_s.is_finite() && row.mb_per_s > 0.0));
        }
        let mag = &rows[0];
        let (q, k) = (mag.q.unwrap(), mag.k.unwrap());
        assert_eq!(mag.filter_reads, (50_000 / q / k) as u64);
    }
}
