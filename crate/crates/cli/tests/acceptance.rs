//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use mag::qgram::{EncodedText, GramConfig};
use mag::tuner::{expected_class_size, match_probability, max_k};
use mag::{
    ac_search, naive_search, AlphabetMap, Candidate, FilterMachine, MapStrategy, MappingChoice,
    Matcher, Occurrence, PatternSet, SearchConfig, SuperPattern, Variant,
};
use mag_cli::bench::{csv_writer, run_bench, BenchPlan, BenchRow};
use mag_cli::corpus::{alphabet, english_like, random_text};
use mag_cli::sample::sample_patterns;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("oracle equivalence", oracle_equivalence),
        ("probability table", probability_table),
        ("monte carlo class sizes", monte_carlo),
        ("read budget", read_budget),
        ("field isolation", field_isolation),
        ("mapping invariance", mapping_invariance),
        ("performance direction", performance),
        ("single-pattern anchor", single_pattern_anchor),
    ];
    let only: Option<usize> = std::env::args()
        .skip(1)
        .find_map(|a| a.strip_prefix("criterion=").and_then(|n| n.parse().ok()));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let id = i + 1;
        if only.is_some_and(|o| o != id) {
            continue;
        }
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".to_string()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {id} {name}: PASS ({detail}; {secs:.1}s)"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id} {name}: FAIL ({detail}; {secs:.1}s)");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

const SIGMAS: [usize; 5] = [2, 4, 16, 64, 256];
const RS: [usize; 4] = [1, 8, 64, 256];
const MS: [usize; 4] = [8, 16, 32, 64];
const EQUIV_INSTANCES: usize = 200;
const EQUIV_N: usize = 1_000_000;

/// One randomized search problem with its oracle answer.
struct Instance {
    label: String,
    text: Vec<u8>,
    ps: PatternSet,
    q: usize,
    k: usize,
    expected: Vec<Occurrence>,
}

/// Half the patterns cut from the text, half uniform over the alphabet.
fn patterns_for(
    text: &[u8],
    symbols: &[u8],
    r: usize,
    m: usize,
    rng: &mut ChaCha8Rng,
) -> PatternSet {
    let pats: Vec<Vec<u8>> = (0..r)
        .map(|_| {
            if rng.gen_bool(0.5) {
                let o = rng.gen_range(0..=text.len() - m);
                text[o..o + m].to_vec()
            } else {
                (0..m).map(|_| *symbols.choose(rng).unwrap()).collect()
            }
        })
        .collect();
    PatternSet::new(pats).unwrap()
}

fn instances() -> &'static [Instance] {
    static CACHE: std::sync::OnceLock<Vec<Instance>> = std::sync::OnceLock::new();
    CACHE.get_or_init(build_instances)
}

/// Every grid value is visited in turn; the combination is random.
fn build_instances() -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut out = Vec::new();
    for i in 0..EQUIV_INSTANCES {
        let sigma = SIGMAS[i % SIGMAS.len()];
        let r = RS[(i / 5) % RS.len()];
        let m = MS[rng.gen_range(0..MS.len())];
        let q = 1 + (i % 4);
        let k = rng.gen_range(1..=max_k(m, q, 64));
        let text = random_text(EQUIV_N, sigma, rng.gen());
        let ps = patterns_for(&text, &alphabet(sigma), r, m, &mut rng);
        let expected = naive_search(&ps, &text);
        out.push(Instance {
            label: format!("sigma={sigma} r={r} m={m} q={q} k={k}"),
            text,
            ps,
            q,
            k,
            expected,
        });
    }
    let english = english_like(1 << 20, 11);
    for (j, &(r, m)) in [
        (1, 8),
        (8, 16),
        (64, 32),
        (256, 64),
        (256, 8),
        (64, 16),
        (8, 64),
        (1, 32),
    ]
    .iter()
    .enumerate()
    {
        let sample = sample_patterns(&english, r, m, 100 + j as u64).unwrap();
        let q = 1 + j % 4;
        let k = rng.gen_range(1..=max_k(m, q, 64));
        let expected = naive_search(&sample.patterns, &english);
        out.push(Instance {
            label: format!("english r={r} m={m} q={q} k={k}"),
            text: english.clone(),
            ps: sample.patterns,
            q,
            k,
            expected,
        });
    }
    out
}

/// Mapping strategies usable with gram length `q`, with an explicit σ'
/// where the default would overflow the gram space.
fn mappings(q: usize, sigma: usize) -> Vec<(MappingChoice, Option<usize>)> {
    let cap = (1usize << (24 / q)).min(256);
    let fitted = (sigma + 1).clamp(2, cap);
    let mut out = Vec::new();
    if q <= 3 {
        out.push((MappingChoice::Bytes(MapStrategy::Identity), None));
    }
    out.push((MappingChoice::Bytes(MapStrategy::Frequency), Some(fitted)));
    out.push((MappingChoice::Bytes(MapStrategy::Balanced), Some(fitted)));
    out.push((
        MappingChoice::Bytes(MapStrategy::Balanced),
        Some(4.min(cap)),
    ));
    out.push((
        MappingChoice::Bytes(MapStrategy::LowBits((24 / q).min(8) as u8)),
        None,
    ));
    out.push((MappingChoice::Bytes(MapStrategy::LowBits(1)), None));
    out
}

fn distinct_bytes(text: &[u8]) -> usize {
    let mut seen = [false; 256];
    text.iter().for_each(|&b| seen[b as usize] = true);
    seen.iter().filter(|&&s| s).count()
}

struct Run {
    variant: Variant,
    mapping: MappingChoice,
    found: Vec<Occurrence>,
    reads: u64,
    expected_reads: u64,
}

/// Runs MAG and SMAG under every applicable mapping at the instance's
/// fixed `(q, k)`.
fn runs(inst: &Instance) -> Vec<Run> {
    let sigma = distinct_bytes(&inst.text);
    let mut out = Vec::new();
    for (mapping, sigma_prime) in mappings(inst.q, sigma) {
        for variant in [Variant::Mag, Variant::Smag] {
            let cfg = SearchConfig {
                variant,
                q: Some(inst.q),
                k: Some(inst.k),
                mapping: Some(mapping),
                sigma_prime,
                ..Default::default()
            };
            let matcher = Matcher::with_text(&inst.ps, &cfg, Some(&inst.text))
                .unwrap_or_else(|e| panic!("{} {mapping}: {e}", inst.label));
            let (found, stats) = matcher.find_all_with_stats(&inst.text);
            out.push(Run {
                variant,
                mapping,
                found,
                reads: stats.reads,
                expected_reads: ((inst.text.len() / inst.q) / inst.k) as u64,
            });
        }
    }
    out
}

fn all_runs() -> &'static [(usize, Vec<Run>)] {
    static CACHE: std::sync::OnceLock<Vec<(usize, Vec<Run>)>> = std::sync::OnceLock::new();
    CACHE.get_or_init(|| instances().iter().map(runs).enumerate().collect())
}

fn oracle_equivalence() -> Outcome {
    let insts = instances();
    let mut checked = 0;
    for (i, runs) in all_runs() {
        let inst = &insts[*i];
        let ac = ac_search(&inst.ps, &inst.text);
        ensure!(
            ac == inst.expected,
            "{}: ac disagrees with naive",
            inst.label
        );
        for run in runs {
            ensure!(
                run.found == inst.expected,
                "{} {} {}: {} occurrences, oracle {}",
                inst.label,
                run.variant,
                run.mapping,
                run.found.len(),
                inst.expected.len()
            );
            checked += 1;
        }
    }
    let occurrences: usize = insts.iter().map(|i| i.expected.len()).sum();
    Ok(format!(
        "{} instances, {checked} engine runs, {occurrences} occurrences",
        insts.len()
    ))
}

fn probability_table() -> Outcome {
    let ecs = expected_class_size(16.0, 16.0);
    ensure!(
        (ecs - 10.3).abs() <= 0.05,
        "expected_class_size(16,16) = {ecs}"
    );
    let rows = [(16.0, 16.0, 0.64), (256.0, 16.0, 0.06), (256.0, 64.0, 0.22)];
    for (s, n, want) in rows {
        let p = match_probability(s, n);
        ensure!(
            (p - want).abs() <= 0.005,
            "match_probability({s},{n}) = {p}"
        );
    }
    let p = match_probability(16.0, 64.0);
    ensure!(p > 0.98, "match_probability(16,64) = {p}");
    Ok(format!(
        "ecs(16,16)={ecs:.3} p(16,16)={:.4} p(16,64)={p:.4} p(256,16)={:.4} p(256,64)={:.4}",
        match_probability(16.0, 16.0),
        match_probability(256.0, 16.0),
        match_probability(256.0, 64.0)
    ))
}

/// Mean class size of superimposing `r` random patterns over 16 symbols,
/// measured on the engine's own superimposition.
fn monte_carlo() -> Outcome {
    const SETS: usize = 10_000;
    const M: usize = 8;
    let symbols = alphabet(16);
    let cfg = GramConfig::new(1, AlphabetMap::identity()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut detail = Vec::new();
    for r in [16usize, 64] {
        let mut total = 0usize;
        for _ in 0..SETS {
            let pats: Vec<Vec<u8>> = (0..r)
                .map(|_| (0..M).map(|_| *symbols.choose(&mut rng).unwrap()).collect())
                .collect();
            let sp = SuperPattern::build(&PatternSet::new(pats).unwrap(), &cfg).unwrap();
            total += sp.classes().iter().map(Vec::len).sum::<usize>();
        }
        let empirical = total as f64 / (SETS * M) as f64;
        let model = expected_class_size(16.0, r as f64);
        let rel = (empirical - model).abs() / model;
        ensure!(
            rel < 0.01,
            "r={r}: empirical {empirical:.4} vs model {model:.4}"
        );
        detail.push(format!("r={r}: {empirical:.3} vs {model:.3}"));
    }
    Ok(detail.join(", "))
}

fn read_budget() -> Outcome {
    let mut scans = 0;
    for (i, runs) in all_runs() {
        for run in runs {
            ensure!(
                run.reads == run.expected_reads,
                "{} {} {}: {} reads, budget {}",
                instances()[*i].label,
                run.variant,
                run.mapping,
                run.reads,
                run.expected_reads
            );
            scans += 1;
        }
    }
    // the budget must not move with match density
    for density in [0.0, 0.5, 1.0] {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let ps = PatternSet::new(["abcabcabcabc"]).unwrap();
        let text: Vec<u8> = (0..100_003)
            .map(|i| {
                if rng.gen_bool(density) {
                    b"abc"[i % 3]
                } else {
                    b'z'
                }
            })
            .collect();
        for (q, k) in [(1, 1), (2, 2), (3, 1), (1, 5)] {
            let cfg = SearchConfig {
                q: Some(q),
                k: Some(k),
                ..Default::default()
            };
            let (_, stats) = Matcher::new(&ps, &cfg).unwrap().find_all_with_stats(&text);
            let want = ((text.len() / q) / k) as u64;
            ensure!(
                stats.reads == want,
                "density {density} q={q} k={k}: {} reads",
                stats.reads
            );
            scans += 1;
        }
    }
    Ok(format!(
        "{scans} scans at exactly floor(floor(n/q)/k) reads"
    ))
}

/// Candidates from `k` independent Shift-Or automata, alignment `j` over
/// classes `j, j + k, ...` and fed only the sampled super-characters.
fn unpacked_candidates(
    sp: &SuperPattern,
    k: usize,
    m_prime: usize,
    text: &[u32],
) -> Vec<Candidate> {
    let mut out = Vec::new();
    for j in 0..k {
        let classes: Vec<&[u32]> = (0..m_prime).map(|t| sp.class(j + t * k)).collect();
        let mut active = vec![false; m_prime];
        let mut u = k - 1;
        while u < text.len() {
            let c = text[u];
            for t in (1..m_prime).rev() {
                active[t] = active[t - 1] && classes[t].binary_search(&c).is_ok();
            }
            active[0] = classes[0].binary_search(&c).is_ok();
            if active[m_prime - 1] {
                out.push(Candidate {
                    super_start: u - j - (m_prime - 1) * k,
                    sample_pos: u,
                    alignment: j,
                });
            }
            u += k;
        }
    }
    out.sort();
    out
}

fn field_isolation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut configs = 0;
    let mut candidates = 0usize;
    while configs < 60 {
        let sigma = [2usize, 3, 4, 8][rng.gen_range(0..4)];
        let q = rng.gen_range(1..=3);
        let m = rng.gen_range((2 * q - 1).max(4)..=80);
        let r = rng.gen_range(1..=6);
        let w = [64usize, 64, 32, 17][rng.gen_range(0..4)];
        let len = (m - q + 1) / q;
        let k = rng.gen_range(1..=len.min(w));
        let symbols = alphabet(sigma);
        let text: Vec<u8> = (0..20_000)
            .map(|_| *symbols.choose(&mut rng).unwrap())
            .collect();
        let ps = patterns_for(&text, &symbols, r, m, &mut rng);
        let hist = mag::Histogram::from_patterns(&ps);
        let map = AlphabetMap::frequency(&hist, sigma + 1).unwrap();
        let cfg = GramConfig::new(q, map).unwrap();
        let sp = SuperPattern::build(&ps, &cfg).unwrap();
        let machine = FilterMachine::build(&sp, k, w).unwrap();
        let encoded: EncodedText = cfg.encode_text(&text);
        let (mut packed, _) = machine.scan_collect(&encoded);
        packed.sort();
        let unpacked = unpacked_candidates(&sp, k, machine.m_prime(), encoded.supers());
        ensure!(
            packed == unpacked,
            "sigma={sigma} q={q} m={m} r={r} w={w} k={k}: packed {} vs unpacked {}",
            packed.len(),
            unpacked.len()
        );
        candidates += packed.len();
        configs += 1;
    }
    Ok(format!(
        "{configs} configurations, {candidates} candidates identical"
    ))
}

fn mapping_invariance() -> Outcome {
    let mut compared = 0;
    for (i, runs) in all_runs() {
        let inst = &instances()[*i];
        let first = &runs[0];
        for run in &runs[1..] {
            ensure!(
                run.found == first.found,
                "{}: {} under {} differs from {} under {}",
                inst.label,
                run.variant,
                run.mapping,
                first.variant,
                first.mapping
            );
            compared += 1;
        }
    }
    Ok(format!(
        "{compared} cross-mapping comparisons at fixed (q, k)"
    ))
}

const PERF_BYTES: usize = 50 << 20;

fn performance() -> Outcome {
    let text = english_like(PERF_BYTES, 2024);
    let plan = BenchPlan {
        dataset: "english-like".into(),
        variants: vec![Variant::Mag, Variant::Naive, Variant::Ac],
        rs: vec![1000],
        ms: vec![32],
        check: true,
        ..Default::default()
    };
    let rows = run_bench(&text, &plan, |_| Ok(())).map_err(|e| e.to_string())?;
    let speed = |v: &str| {
        rows.iter()
            .find(|r| r.variant == v)
            .map(|r| r.mb_per_s)
            .unwrap()
    };
    let (mag, naive, ac) = (speed("mag"), speed("naive"), speed("ac"));
    ensure!(
        mag >= 5.0 * naive,
        "mag {mag:.1} MB/s vs naive {naive:.2} MB/s"
    );
    ensure!(mag >= ac, "mag {mag:.1} MB/s vs ac {ac:.1} MB/s");

    let matrix = BenchPlan {
        dataset: "english-like".into(),
        variants: vec![Variant::Mag, Variant::Smag, Variant::ShiftOrOg, Variant::Ac],
        check: true,
        ..Default::default()
    };
    let mut csv = csv_writer(Vec::new());
    let rows = run_bench(&text, &matrix, |row: &BenchRow| {
        csv.serialize(row).map_err(Into::into)
    })
    .map_err(|e| e.to_string())?;
    ensure!(rows.len() == 64, "{} matrix rows", rows.len());
    ensure!(
        rows.iter()
            .all(|r| r.mb_per_s.is_finite() && r.mb_per_s > 0.0),
        "non-positive throughput in matrix"
    );
    let csv = String::from_utf8(csv.into_inner().map_err(|e| e.to_string())?).unwrap();
    if let Ok(path) = std::env::var("MAG_ACCEPTANCE_CSV") {
        std::fs::write(&path, &csv).map_err(|e| e.to_string())?;
    }
    Ok(format!(
        "50 MiB, r=1000 m=32: mag {mag:.1} MB/s, naive {naive:.2} MB/s ({:.0}x), ac {ac:.1} MB/s ({:.2}x); \
         matrix of {} rows checked",
        mag / naive,
        mag / ac,
        rows.len()
    ))
}

fn single_pattern_anchor() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let cfg = GramConfig::new(1, AlphabetMap::identity()).unwrap();
    let mut ends = 0;
    for i in 0..100 {
        let sigma = [2usize, 4, 16, 256][i % 4];
        let m = rng.gen_range(1..=64);
        let symbols = alphabet(sigma);
        let text: Vec<u8> = (0..rng.gen_range(m..5000))
            .map(|_| *symbols.choose(&mut rng).unwrap())
            .collect();
        let ps = sample_patterns(&text, 1, m, rng.gen()).unwrap().patterns;
        let sp = SuperPattern::build(&ps, &cfg).unwrap();
        let machine = FilterMachine::build(&sp, 1, 64).unwrap();
        let (cands, _) = machine.scan_collect(&cfg.encode_text(&text));
        let got: Vec<usize> = cands.iter().map(|c| c.super_start + m - 1).collect();
        let want: Vec<usize> = naive_search(&ps, &text)
            .iter()
            .map(|o| o.offset + m - 1)
            .collect();
        ensure!(got == want, "instance {i} sigma={sigma} m={m}: ends differ");
        ensure!(
            cands.iter().all(|c| c.sample_pos == c.super_start + m - 1),
            "instance {i}: candidate read position is not the occurrence end"
        );
        ends += want.len();
    }
    Ok(format!("100 instances, {ends} occurrence ends matched"))
}
