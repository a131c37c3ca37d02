//! Synthetic texts: uniform random strings and an English-like word stream.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `sigma` byte values spread evenly over `0..=255`.
pub fn alphabet(sigma: usize) -> Vec<u8> {
    assert!(
        (1..=256).contains(&sigma),
        "alphabet size {sigma} out of range"
    );
    (0..sigma).map(|i| (i * 256 / sigma) as u8).collect()
}

/// `n` bytes drawn uniformly from [`alphabet`]`(sigma)`.
pub fn random_text(n: usize, sigma: usize, seed: u64) -> Vec<u8> {
    let symbols = alphabet(sigma);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| symbols[rng.gen_range(0..sigma)]).collect()
}

const COMMON: &[&str] = &[
    "the", "of", "and", "to", "a", "in", "that", "is", "was", "he", "for", "it", "with", "as",
    "his", "on", "be", "at", "by", "had", "not", "are", "but", "from", "or", "have", "an", "they",
    "which", "one", "you", "were", "her", "all", "she", "there", "would", "their", "we", "him",
    "been", "has", "when", "who", "will", "more", "no", "if", "out", "so", "said", "what", "up",
    "its", "about", "into", "than", "them", "can", "only", "other", "new", "some", "could", "time",
];

// a..z, per mille, roughly as in running English text
const LETTER_WEIGHTS: [u32; 26] = [
    82, 15, 28, 43, 127, 22, 20, 61, 70, 2, 8, 40, 24, 67, 75, 19, 1, 60, 63, 91, 28, 10, 24, 2,
    20, 1,
];

const WORD_LENGTH_WEIGHTS: [u32; 14] = [3, 17, 19, 16, 12, 9, 8, 6, 4, 3, 2, 1, 1, 1];

const VOCABULARY: usize = 30_000;

/// English-like text: Zipf-distributed words from a synthetic vocabulary,
/// sentences with capitals and punctuation, and paragraph breaks.
pub fn english_like(n: usize, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vocab = vocabulary(&mut rng);
    let zipf = WeightedIndex::new((1..=vocab.len()).map(|rank| 1.0 / rank as f64))
        .expect("non-empty vocabulary");

    let mut out = Vec::with_capacity(n + 64);
    let mut sentence_left = 0usize;
    let mut sentences_in_paragraph = 0usize;
    while out.len() < n {
        let word = vocab[zipf.sample(&mut rng)].as_bytes();
        if sentence_left == 0 {
            sentence_left = rng.gen_range(4..28);
            out.push(word[0].to_ascii_uppercase());
            out.extend_from_slice(&word[1..]);
        } else {
            out.extend_from_slice(word);
        }
        sentence_left -= 1;
        if sentence_left > 0 {
            match rng.gen_range(0..100) {
                0..=6 => out.extend_from_slice(b", "),
                7 => out.extend_from_slice(b"; "),
                _ => out.push(b' '),
            }
            continue;
        }
        out.push(match rng.gen_range(0..20) {
            0 => b'?',
            1 => b'!',
            _ => b'.',
        });
        sentences_in_paragraph += 1;
        if sentences_in_paragraph >= rng.gen_range(3..9) {
            out.extend_from_slice(b"\n\n");
            sentences_in_paragraph = 0;
        } else {
            out.push(b' ');
        }
    }
    out.truncate(n);
    out
}

fn vocabulary(rng: &mut ChaCha8Rng) -> Vec<String> {
    let letters = WeightedIndex::new(LETTER_WEIGHTS).expect("letter weights");
    let lengths = WeightedIndex::new(WORD_LENGTH_WEIGHTS).expect("length weights");
    let mut words: Vec<String> = COMMON.iter().map(|w| w.to_string()).collect();
    let mut seen: std::collections::HashSet<String> = words.iter().cloned().collect();
    while words.len() < VOCABULARY {
        let len = lengths.sample(rng) + 1;
        let word: String = (0..len)
            .map(|_| (b'a' + letters.sample(rng) as u8) as char)
            .collect();
        if seen.insert(word.clone()) {
            words.push(word);
        }
    }
    words
}
