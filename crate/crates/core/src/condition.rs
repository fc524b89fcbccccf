//! Empirical search for the Condition-1 constant: a buffer length `K` and
//! a constant `C > 0` such that every pair of words `i, j` admits some
//! `κ ∈ Σ_K` with `φ^s(A_{iκj}) ≥ C φ^s(A_i) φ^s(A_j)`.
//!
//! Only finitely many pairs can be tested, so a [`BufferCertificate`] is
//! evidence and never proof. Bounds built on it inherit that caveat.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::svf::{log_phi_from_logs, log_sv_with_det, AffineIFS, Matrix};
use crate::symbolic::{enumerate_words, word_count, Word, DEFAULT_ENUMERATION_BUDGET};

/// Label carried by every certificate.
pub const EMPIRICAL: &str = "empirical";

/// Outcome of a finite Condition-1 search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BufferCertificate {
    pub s: f64,
    /// Buffer length `K`.
    pub k: usize,
    /// Smallest observed best-buffer ratio.
    pub c_hat: f64,
    /// All pairs with `|i|, |j| ≤ tested_len` were checked.
    pub tested_len: usize,
    /// Number of additional random pairs.
    pub sampled_pairs: usize,
    pub seed: u64,
    pub worst_pair: (Word, Word),
    pub worst_buffer: Word,
    pub label: String,
    /// Content hash over every other field.
    pub id: String,
}

impl BufferCertificate {
    fn seal(mut self) -> Self {
        self.id = String::new();
        let json = serde_json::to_vec(&self).expect("certificate serializes");
        let digest = Sha256::digest(&json);
        self.id = digest.iter().take(8).map(|b| format!("{b:02x}")).collect();
        self
    }
}

/// Options for [`certify_escalating`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CertifyOptions {
    /// Fixed buffer length; when absent, `K = 1, …, k_max` are tried in turn.
    pub k: Option<usize>,
    pub k_max: usize,
    pub exhaustive_len: usize,
    pub random_pairs: usize,
    pub seed: u64,
    /// Certificates with `c_hat` below this are rejected.
    pub floor: f64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions { k: None, k_max: 4, exhaustive_len: 3, random_pairs: 64, seed: 0, floor: 1e-6 }
    }
}

struct Prepared {
    word: Word,
    matrix: Matrix,
    log_det: f64,
    log_phi: f64,
}

fn prepare(ifs: &AffineIFS, word: Word, s: f64) -> Result<Prepared> {
    let matrix = ifs.product(&word);
    let log_det = ifs.log_det(&word);
    let log_phi = log_phi_of(&matrix, log_det, s)?;
    Ok(Prepared { word, matrix, log_det, log_phi })
}

/// `log φ^s(a)` with `log |det a|` supplied by the caller.
pub(crate) fn log_phi_of(a: &Matrix, log_det: f64, s: f64) -> Result<f64> {
    Ok(log_phi_from_logs(&log_sv_with_det(a, log_det)?, s))
}

fn buffers(ifs: &AffineIFS, k: usize, s: f64) -> Result<Vec<Prepared>> {
    enumerate_words(ifs.n_maps(), k, DEFAULT_ENUMERATION_BUDGET)?
        .map(|w| prepare(ifs, w, s))
        .collect()
}

/// Best buffer for one pair: `(index into buffers, log ratio)`. Ties go to
/// the lexicographically smallest buffer.
fn best_buffer(i: &Prepared, j: &Prepared, bufs: &[Prepared], s: f64) -> Result<(usize, f64)> {
    let mut best = (0, f64::NEG_INFINITY);
    for (idx, kappa) in bufs.iter().enumerate() {
        let m = &i.matrix * &kappa.matrix * &j.matrix;
        let ratio = log_phi_of(&m, i.log_det + kappa.log_det + j.log_det, s)? - i.log_phi - j.log_phi;
        if ratio > best.1 {
            best = (idx, ratio);
        }
    }
    Ok(best)
}

/// `argmax_{κ ∈ Σ_K} φ^s(A_{iκj}) / (φ^s(A_i) φ^s(A_j))` and the ratio.
pub fn buffer_search(ifs: &AffineIFS, s: f64, k: usize, i: &Word, j: &Word) -> Result<(Word, f64)> {
    ifs.check_word(i)?;
    ifs.check_word(j)?;
    let bufs = buffers(ifs, k, s)?;
    let (idx, log_ratio) = best_buffer(&prepare(ifs, i.clone(), s)?, &prepare(ifs, j.clone(), s)?, &bufs, s)?;
    Ok((bufs[idx].word.clone(), log_ratio.exp()))
}

fn random_word(rng: &mut ChaCha8Rng, n: usize, max_len: usize) -> Word {
    let len = rng.random_range(1..=max_len);
    Word::from_letters((0..len).map(|_| rng.random_range(1..=n as u8)).collect())
}

/// Tests all pairs with `1 ≤ |i|, |j| ≤ exhaustive_len` plus `random_pairs`
/// pairs of lengths up to `4·exhaustive_len`, and records the worst best-buffer
/// ratio. Each random pair draws from its own ChaCha stream, so the result
/// does not depend on the thread count.
pub fn certify(ifs: &AffineIFS, s: f64, k: usize, exhaustive_len: usize, random_pairs: usize, seed: u64) -> Result<BufferCertificate> {
    if exhaustive_len == 0 {
        return Err(Error::invalid("exhaustive_len", "must be at least 1"));
    }
    if !s.is_finite() || s < 0.0 {
        return Err(Error::invalid("s", "must be finite and non-negative"));
    }
    let n = ifs.n_maps();
    let mut total: u128 = 0;
    for len in 1..=exhaustive_len {
        total += word_count(n, len, DEFAULT_ENUMERATION_BUDGET)?;
    }
    let pairs = total * total * word_count(n, k, DEFAULT_ENUMERATION_BUDGET)?;
    if pairs > DEFAULT_ENUMERATION_BUDGET {
        return Err(Error::Budget { requested: pairs, budget: DEFAULT_ENUMERATION_BUDGET });
    }
    let bufs = buffers(ifs, k, s)?;
    let mut words = Vec::new();
    for len in 1..=exhaustive_len {
        for w in enumerate_words(n, len, DEFAULT_ENUMERATION_BUDGET)? {
            words.push(prepare(ifs, w, s)?);
        }
    }

    // (log ratio, pair key, buffer index, i, j); min by ratio, then by key.
    type Worst = (f64, u64, usize, Word, Word);
    let pick = |a: Worst, b: Worst| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a };
    let none = || (f64::INFINITY, u64::MAX, 0, Word::empty(), Word::empty());

    let exhaustive: Worst = (0..words.len())
        .into_par_iter()
        .map(|a| -> Result<Worst> {
            let mut worst = none();
            for (b, wj) in words.iter().enumerate() {
                let (idx, r) = best_buffer(&words[a], wj, &bufs, s)?;
                let key = (a * words.len() + b) as u64;
                worst = pick(worst, (r, key, idx, words[a].word.clone(), wj.word.clone()));
            }
            Ok(worst)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(none(), pick);

    let offset = (words.len() * words.len()) as u64;
    let max_len = 4 * exhaustive_len;
    let sampled: Worst = (0..random_pairs as u64)
        .into_par_iter()
        .map(|p| -> Result<Worst> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(p);
            let wi = prepare(ifs, random_word(&mut rng, n, max_len), s)?;
            let wj = prepare(ifs, random_word(&mut rng, n, max_len), s)?;
            let (idx, r) = best_buffer(&wi, &wj, &bufs, s)?;
            Ok((r, offset + p, idx, wi.word, wj.word))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(none(), pick);

    let (log_c, _, idx, wi, wj) = pick(exhaustive, sampled);
    Ok(BufferCertificate {
        s,
        k,
        c_hat: log_c.exp(),
        tested_len: exhaustive_len,
        sampled_pairs: random_pairs,
        seed,
        worst_pair: (wi, wj),
        worst_buffer: bufs[idx].word.clone(),
        label: EMPIRICAL.to_string(),
        id: String::new(),
    }
    .seal())
}

/// Tries `K = 1, …, k_max` (or the fixed `K`) and returns the first
/// certificate whose constant clears `floor`.
pub fn certify_escalating(ifs: &AffineIFS, s: f64, opts: &CertifyOptions) -> Result<BufferCertificate> {
    let ks: Vec<usize> = match opts.k {
        Some(k) => vec![k],
        None => (1..=opts.k_max).collect(),
    };
    let mut best: Option<BufferCertificate> = None;
    for k in ks {
        let cert = certify(ifs, s, k, opts.exhaustive_len, opts.random_pairs, opts.seed)?;
        if cert.c_hat >= opts.floor {
            return Ok(cert);
        }
        if best.as_ref().is_none_or(|b| cert.c_hat > b.c_hat) {
            best = Some(cert);
        }
    }
    let c = best.map(|b| b.c_hat).unwrap_or(0.0);
    Err(Error::Certificate(format!("no buffer length reached C >= {} (best {c:e})", opts.floor)))
}
