//! Parameter selection for the filter.
//!
//! `q` is chosen so that the gram alphabet roughly covers `r * m`, and `k` is
//! seeded from the closed form
//!
//! ```text
//! k ~ m / log(rm) * log(1/rho) / (log(rm) + log(1/rho)),   rho = log(rm) / m
//! ```
//!
//! (logarithms to base sigma') and refined by evaluating [`predicted_cost`]
//! on the neighbouring strides. The closed form is only known up to a
//! constant, which is why the refinement step exists.

use crate::filter::WORD_BITS;
use crate::qgram::{MAX_GRAM_SPACE, MAX_Q};

/// Problem size as seen by the tuner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TuningInput {
    /// Distinct byte values observed.
    pub sigma: usize,
    /// Reduced alphabet size the grams are built over.
    pub sigma_prime: usize,
    pub r: usize,
    pub m: usize,
    pub n: usize,
    pub w: usize,
}

impl TuningInput {
    pub fn new(sigma: usize, sigma_prime: usize, r: usize, m: usize, n: usize) -> Self {
        TuningInput {
            sigma,
            sigma_prime,
            r,
            m,
            n,
            w: WORD_BITS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TuningResult {
    pub q: usize,
    pub k: usize,
    pub sigma_prime: usize,
    pub rho: f64,
    pub predicted_p: f64,
    pub predicted_cost: f64,
}

/// Expected number of distinct symbols after drawing `n_super` symbols
/// uniformly from an alphabet of `sigma_eff`.
pub fn expected_class_size(sigma_eff: f64, n_super: f64) -> f64 {
    sigma_eff * match_probability(sigma_eff, n_super)
}

/// Probability that a uniform random symbol falls into a class built from
/// `n_super` uniform draws.
pub fn match_probability(sigma_eff: f64, n_super: f64) -> f64 {
    if sigma_eff <= 1.0 {
        return if n_super > 0.0 { 1.0 } else { 0.0 };
    }
    // 1 - (1 - 1/s)^n without cancellation for huge s
    -(n_super * (-1.0 / sigma_eff).ln_1p()).exp_m1()
}

fn log_base(x: f64, base: f64) -> f64 {
    x.ln() / base.ln()
}

/// Superimposed length for gram length `q`; zero when `m < 2q - 1`.
pub fn super_len(m: usize, q: usize) -> usize {
    if m + 1 < 2 * q {
        0
    } else {
        (m - q + 1) / q
    }
}

/// `round(log_sigma'(r m))`, clamped to `1..=8` and lowered until the gram
/// space fits the mask table and `m >= 2q - 1`.
pub fn choose_q(ti: &TuningInput) -> usize {
    if ti.sigma_prime < 2 {
        return 1;
    }
    let seed = log_base((ti.r * ti.m) as f64, ti.sigma_prime as f64).round();
    let mut q = (seed.max(1.0) as usize).min(MAX_Q);
    while q > 1
        && ((ti.sigma_prime as f64).powi(q as i32) > MAX_GRAM_SPACE as f64 || ti.m + 1 < 2 * q)
    {
        q -= 1;
    }
    q
}

/// `m / log(rm) * log(1/rho) / (log(rm) + log(1/rho))` in base `alphabet`.
pub fn closed_form_k(alphabet: f64, r: usize, m: usize) -> f64 {
    let a = log_base((r * m) as f64, alphabet);
    let rho = a / m as f64;
    let b = log_base(1.0 / rho, alphabet);
    m as f64 / a * b / (a + b)
}

/// Largest stride a filter over `m` bytes with gram length `q` accepts.
pub fn max_k(m: usize, q: usize, w: usize) -> usize {
    super_len(m, q).min(w).max(1)
}

/// Seeds `k` from [`closed_form_k`] and returns the cheapest stride within
/// two of the seed.
pub fn choose_k(ti: &TuningInput, q: usize) -> usize {
    choose_k_in(ti, q, gram_space(ti, q))
}

/// [`choose_k`] for an explicit super-alphabet size, used when grams are
/// reduced directly instead of byte by byte.
pub fn choose_k_in(ti: &TuningInput, q: usize, gram_space: f64) -> usize {
    let top = max_k(ti.m, q, ti.w);
    let seed = closed_form_k(ti.sigma_prime.max(2) as f64, ti.r, ti.m);
    let seed = if seed.is_finite() {
        seed.round().clamp(1.0, top as f64) as usize
    } else {
        top
    };
    let lo = seed.saturating_sub(2).max(1);
    let hi = (seed + 2).min(top);
    let mut best = (f64::INFINITY, seed);
    for k in lo..=hi {
        let cost = cost_in(ti, q, k, gram_space);
        // ties go to the longer stride
        if cost <= best.0 {
            best = (cost, k);
        }
    }
    best.1
}

fn gram_space(ti: &TuningInput, q: usize) -> f64 {
    (ti.sigma_prime as f64).powi(q as i32)
}

/// Filter reads plus expected verification work:
/// `n_q / k + n_q * p^m' * (2q - 1) * r * m` with
/// `p = match_probability(sigma'^q, q r)`.
pub fn predicted_cost(ti: &TuningInput, q: usize, k: usize) -> f64 {
    cost_in(ti, q, k, gram_space(ti, q))
}

/// [`predicted_cost`] over an explicit super-alphabet size.
pub fn cost_in(ti: &TuningInput, q: usize, k: usize, gram_space: f64) -> f64 {
    let n_q = (ti.n / q) as f64;
    let len = super_len(ti.m, q);
    let m_prime = (len / k).min(ti.w / k);
    let p = match_probability(gram_space, (q * ti.r) as f64);
    let verify = ((2 * q - 1) * ti.r * ti.m) as f64;
    n_q / k as f64 + n_q * p.powi(m_prime as i32) * verify
}

/// Picks `q` then `k` and reports the model's view of the result.
pub fn tune(ti: &TuningInput) -> TuningResult {
    let q = choose_q(ti);
    let k = choose_k(ti, q);
    let rm = (ti.r * ti.m) as f64;
    TuningResult {
        q,
        k,
        sigma_prime: ti.sigma_prime,
        rho: log_base(rm, ti.sigma_prime.max(2) as f64) / ti.m as f64,
        predicted_p: match_probability(gram_space(ti, q), (q * ti.r) as f64),
        predicted_cost: predicted_cost(ti, q, k),
    }
}
