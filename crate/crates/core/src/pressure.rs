//! Estimates of the pressure `P(t)`, the square pressure `P₂(t)`, the
//! inverse lower pressure `α(t)` and the return rate `β`.
//!
//! Upper bounds for `P` (and lower bounds for `P₂`) come for free from
//! subadditivity at any finite depth. The opposite sides need a
//! [`BufferCertificate`]; without one they are only heuristic.

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::condition::BufferCertificate;
use crate::error::{Error, Result};
use crate::numerics::{aitken, least_squares_slope, LogSumExp};
use crate::svf::{log_phi_from_logs, log_sv_with_det, raw_singular_values, AffineIFS, LongProduct, Matrix};
use crate::symbolic::{target_cylinder, word_count, ReturnRule, TargetSequence};

/// Default cap on `N^n` for a single pressure sum.
pub const DEFAULT_PRESSURE_BUDGET: u128 = 10_000_000;

/// Default cap on the total number of letters processed for `α`.
pub const DEFAULT_LETTER_BUDGET: u128 = 100_000_000;

/// How much of a bracket is backed by proof.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rigor {
    /// Both ends rigorous, conditional on the supplied certificate.
    RigorousBoth,
    /// Upper end rigorous, lower end heuristic or absent.
    RigorousUpperOnly,
    /// Lower end rigorous, upper end heuristic or absent.
    RigorousLowerOnly,
    Heuristic,
}

pub(crate) mod extended {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(v),
            Raw::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("bad extended real `{other}`"))),
            },
        }
    }
}

/// Interval estimate `[lower, upper]` for a pressure-type quantity at `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PressureBracket {
    pub t: f64,
    #[serde(with = "extended")]
    pub lower: f64,
    #[serde(with = "extended")]
    pub upper: f64,
    pub depth: usize,
    pub rigor: Rigor,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<String>,
}

impl PressureBracket {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Visits all words of length `depth` and hands each leaf's log singular
/// values to `visit`. Work is split over fixed prefixes and the partial
/// results are returned in lexicographic prefix order, so reductions are
/// reproducible regardless of thread count.
fn fold_leaves<A, I, F>(ifs: &AffineIFS, depth: usize, budget: u128, init: I, visit: F) -> Result<Vec<A>>
where
    A: Send,
    I: Fn() -> A + Sync,
    F: Fn(&mut A, &[f64]) + Sync,
{
    let n = ifs.n_maps();
    word_count(n, depth, budget)?;
    let mut split = 0;
    while split < depth && (n as u128).pow(split as u32) < 256 {
        split += 1;
    }
    let roots = (n as u128).pow(split as u32) as u64;
    let d = ifs.dim();
    (0..roots)
        .into_par_iter()
        .map(|root| -> Result<A> {
            let prefix = crate::symbolic::word_at(n, split, root as u128);
            let mut acc = init();
            let mut stack: Vec<(Matrix, f64)> = Vec::with_capacity(depth + 1);
            stack.push((ifs.product(&prefix), ifs.log_det(&prefix)));
            let mut logs = vec![0.0; d];
            descend(ifs, depth - split, &mut stack, &mut logs, &mut acc, &visit)?;
            Ok(acc)
        })
        .collect()
}

fn descend<A, F>(ifs: &AffineIFS, remaining: usize, stack: &mut Vec<(Matrix, f64)>, logs: &mut [f64], acc: &mut A, visit: &F) -> Result<()>
where
    F: Fn(&mut A, &[f64]),
{
    if remaining == 0 {
        let (m, log_det) = stack.last().unwrap();
        logs.copy_from_slice(&log_sv_with_det(m, *log_det)?);
        visit(acc, logs);
        return Ok(());
    }
    for letter in 1..=ifs.n_maps() as u8 {
        let (m, log_det) = stack.last().unwrap();
        let next = (m * ifs.matrix(letter), log_det + ifs.letter_log_det(letter));
        stack.push(next);
        descend(ifs, remaining - 1, stack, logs, acc, visit)?;
        stack.pop();
    }
    Ok(())
}

fn merge(parts: &[LogSumExp]) -> f64 {
    let mut total = LogSumExp::new();
    for p in parts {
        total.merge(p);
    }
    total.value()
}

/// `a_n = log Σ_{|w|=n} φ^t(A_w)`.
pub fn log_sum_phi(ifs: &AffineIFS, t: f64, n: usize, budget: u128) -> Result<f64> {
    let parts = fold_leaves(ifs, n, budget, LogSumExp::new, |acc, logs| acc.push(log_phi_from_logs(logs, t)))?;
    Ok(merge(&parts))
}

/// Log singular values of every word of a fixed length, stored so that
/// pressure sums at many `t` cost one pass over a flat array.
#[derive(Debug, Clone)]
pub struct SpectrumTable {
    depth: usize,
    d: usize,
    log_sv: Vec<f64>,
}

const CHUNK: usize = 1 << 14;

impl SpectrumTable {
    pub fn build(ifs: &AffineIFS, depth: usize, budget: u128) -> Result<Self> {
        let parts = fold_leaves(ifs, depth, budget, Vec::new, |acc: &mut Vec<f64>, logs| acc.extend_from_slice(logs))?;
        Ok(SpectrumTable { depth, d: ifs.dim(), log_sv: parts.concat() })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn words(&self) -> usize {
        self.log_sv.len() / self.d
    }

    fn reduce(&self, f: impl Fn(&[f64]) -> f64 + Sync) -> f64 {
        let parts: Vec<LogSumExp> = self
            .log_sv
            .par_chunks(CHUNK * self.d)
            .map(|chunk| {
                let mut acc = LogSumExp::new();
                for logs in chunk.chunks(self.d) {
                    acc.push(f(logs));
                }
                acc
            })
            .collect();
        merge(&parts)
    }

    /// `log Σ φ^t(A_w)`.
    pub fn log_sum_phi(&self, t: f64) -> f64 {
        self.reduce(|logs| log_phi_from_logs(logs, t))
    }

    /// `log Σ φ^t(A_w)²`.
    pub fn log_sum_phi_sq(&self, t: f64) -> f64 {
        self.reduce(|logs| 2.0 * log_phi_from_logs(logs, t))
    }

    /// `a_n / n`, an upper bound for `P(t)`.
    pub fn pressure_upper(&self, t: f64) -> f64 {
        self.log_sum_phi(t) / self.depth as f64
    }

    /// `−(1/n) log Σ φ^t(A_w)²`, a lower bound for `P₂(t)`.
    pub fn pressure2_lower(&self, t: f64) -> f64 {
        -self.log_sum_phi_sq(t) / self.depth as f64
    }

    /// `(a_n + log C)/(n + K)`, a lower bound for `P(t)` under the certificate.
    pub fn pressure_lower(&self, t: f64, cert: &BufferCertificate) -> Result<f64> {
        check_cert(cert, t)?;
        Ok((self.log_sum_phi(t) + cert.c_hat.ln()) / (self.depth + cert.k) as f64)
    }

    /// `−(c_n + 2 log C)/(n + K)`, an upper bound for `P₂(t)` under the certificate.
    pub fn pressure2_upper(&self, t: f64, cert: &BufferCertificate) -> Result<f64> {
        check_cert(cert, t)?;
        Ok(-(self.log_sum_phi_sq(t) + 2.0 * cert.c_hat.ln()) / (self.depth + cert.k) as f64)
    }
}

fn check_cert(cert: &BufferCertificate, t: f64) -> Result<()> {
    if (cert.s - t).abs() > 1e-12 * t.abs().max(1.0) {
        return Err(Error::Certificate(format!("certificate is for s = {}, requested t = {t}", cert.s)));
    }
    if !(cert.c_hat > 0.0) {
        return Err(Error::Certificate("certificate constant must be positive".into()));
    }
    Ok(())
}

fn check_depth(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("depth", "must be at least 1"));
    }
    Ok(())
}

/// `a_n/n`, a rigorous upper bound for `P(t)` by subadditivity.
pub fn pressure_upper(ifs: &AffineIFS, t: f64, n: usize, budget: u128) -> Result<f64> {
    check_depth(n)?;
    Ok(log_sum_phi(ifs, t, n, budget)? / n as f64)
}

/// `(a_n + log C)/(n + K)`, a lower bound for `P(t)` conditional on the
/// certificate's Condition-1 constant holding for every pair of words.
pub fn pressure_lower(ifs: &AffineIFS, t: f64, n: usize, cert: &BufferCertificate, budget: u128) -> Result<f64> {
    check_depth(n)?;
    check_cert(cert, t)?;
    Ok((log_sum_phi(ifs, t, n, budget)? + cert.c_hat.ln()) / (n + cert.k) as f64)
}

/// Aitken extrapolation of `a_m/m` over depths `n−2, n−1, n`. Heuristic.
pub fn pressure_extrapolated(ifs: &AffineIFS, t: f64, n: usize, budget: u128) -> Result<f64> {
    if n < 3 {
        return pressure_upper(ifs, t, n, budget);
    }
    let x: Vec<f64> = (n - 2..=n).map(|m| pressure_upper(ifs, t, m, budget)).collect::<Result<_>>()?;
    Ok(aitken(x[0], x[1], x[2]))
}

/// Bracket for `P(t)`: rigorous on both sides with a certificate, otherwise
/// rigorous above with a labelled Aitken estimate below.
pub fn pressure_bracket(ifs: &AffineIFS, t: f64, n: usize, cert: Option<&BufferCertificate>, budget: u128) -> Result<PressureBracket> {
    let upper = pressure_upper(ifs, t, n, budget)?;
    let (lower, rigor, id) = match cert {
        Some(c) => (pressure_lower(ifs, t, n, c, budget)?, Rigor::RigorousBoth, Some(c.id.clone())),
        None => (pressure_extrapolated(ifs, t, n, budget)?.min(upper), Rigor::RigorousUpperOnly, None),
    };
    Ok(PressureBracket { t, lower: lower.min(upper), upper, depth: n, rigor, certificate: id })
}

/// Bracket for the square pressure `P₂(t)`. The depth-`n` value
/// `−(1/n) log Σ φ^t(A_w)²` is a rigorous lower bound; the upper end needs
/// a certificate.
pub fn pressure2_estimate(ifs: &AffineIFS, t: f64, n: usize, cert: Option<&BufferCertificate>, budget: u128) -> Result<PressureBracket> {
    check_depth(n)?;
    let parts = fold_leaves(ifs, n, budget, LogSumExp::new, |acc, logs| acc.push(2.0 * log_phi_from_logs(logs, t)))?;
    let c_n = merge(&parts);
    let lower = -c_n / n as f64;
    let (upper, rigor, id) = match cert {
        Some(c) => {
            check_cert(c, t)?;
            (-(c_n + 2.0 * c.c_hat.ln()) / (n + c.k) as f64, Rigor::RigorousBoth, Some(c.id.clone()))
        }
        None => (f64::INFINITY, Rigor::RigorousLowerOnly, None),
    };
    Ok(PressureBracket { t, lower, upper: upper.max(lower), depth: n, rigor, certificate: id })
}

/// Log singular values of `A_{λ_k}` for `k ∈ [k_burn, k_max]`.
#[derive(Debug, Clone)]
pub struct TargetProfile {
    pub k_burn: usize,
    pub k_max: usize,
    lengths: Vec<usize>,
    log_sv: Vec<Vec<f64>>,
}

impl TargetProfile {
    pub fn build(ifs: &AffineIFS, spec: &TargetSequence, k_burn: usize, k_max: usize, letter_budget: u128) -> Result<Self> {
        if k_burn < 1 || k_max < k_burn {
            return Err(Error::invalid("k_burn/k_max", format!("need 1 <= k_burn <= k_max, got {k_burn}, {k_max}")));
        }
        spec.validate(ifs.n_maps())?;
        if let Some(avail) = spec.available() {
            if k_max > avail {
                return Err(Error::Index { index: k_max, available: avail });
            }
        }
        let mut lengths = Vec::with_capacity(k_max - k_burn + 1);
        let mut log_sv = Vec::with_capacity(k_max - k_burn + 1);
        let mut product = LongProduct::new(ifs);
        let mut spent: u128 = 0;
        for k in k_burn..=k_max {
            let len = spec.target_len(k)?;
            match spec.pattern() {
                Some(pattern) => {
                    let p = pattern.letters();
                    let have = product.word().len();
                    if len < have {
                        product = LongProduct::new(ifs);
                    }
                    let have = product.word().len();
                    spent += (len - have) as u128;
                    if spent > letter_budget {
                        return Err(Error::Budget { requested: spent, budget: letter_budget });
                    }
                    for i in have..len {
                        product.push(p[i % p.len()]);
                    }
                }
                None => {
                    spent += len as u128;
                    if spent > letter_budget {
                        return Err(Error::Budget { requested: spent, budget: letter_budget });
                    }
                    let word = target_cylinder(spec, k)?;
                    ifs.check_word(&word)?;
                    product.advance_to(&word);
                }
            }
            lengths.push(len);
            log_sv.push(product.log_singular_values());
        }
        Ok(TargetProfile { k_burn, k_max, lengths, log_sv })
    }

    /// Terms `−(1/k) log φ^t(A_{λ_k})`.
    pub fn terms(&self, t: f64) -> Vec<f64> {
        self.log_sv
            .iter()
            .enumerate()
            .map(|(i, logs)| -log_phi_from_logs(logs, t) / (self.k_burn + i) as f64)
            .collect()
    }

    /// Running-minimum estimate of `α(t)` over the profiled range.
    pub fn alpha(&self, t: f64) -> f64 {
        self.terms(t).into_iter().fold(f64::INFINITY, f64::min).max(0.0)
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }
}

/// Finite-data estimate of `α(t) = liminf −(1/k) log φ^t(A_{λ_k})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaEstimate {
    pub t: f64,
    pub value: f64,
    pub argmin_k: usize,
    pub k_burn: usize,
    pub k_max: usize,
    /// Least-squares slope of the terms over the second half of the range.
    pub trend: f64,
    /// Set when the fitted tail trend is still going down at `k_max`.
    pub decreasing_tail: bool,
    /// `rate · (−log φ^t(A_pattern)/|pattern|)` when the pattern product is conformal.
    pub closed_form: Option<f64>,
    pub rigor: Rigor,
}

pub fn alpha_estimate(ifs: &AffineIFS, spec: &TargetSequence, t: f64, k_burn: usize, k_max: usize) -> Result<AlphaEstimate> {
    let profile = TargetProfile::build(ifs, spec, k_burn, k_max, DEFAULT_LETTER_BUDGET)?;
    Ok(alpha_from_profile(ifs, spec, &profile, t))
}

pub fn alpha_from_profile(ifs: &AffineIFS, spec: &TargetSequence, profile: &TargetProfile, t: f64) -> AlphaEstimate {
    let terms = profile.terms(t);
    let (argmin, value) = terms
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, &v)| if v < best.1 { (i, v) } else { best });
    let half = terms.len() / 2;
    let xs: Vec<f64> = (half..terms.len()).map(|i| (profile.k_burn + i) as f64).collect();
    let trend = least_squares_slope(&xs, &terms[half..]).unwrap_or(0.0);
    let span = xs.last().copied().unwrap_or(0.0) - xs.first().copied().unwrap_or(0.0);
    let decreasing_tail = trend * span < -1e-3 * value.abs().max(1e-12);
    let closed_form = match spec {
        TargetSequence::LinearPattern { pattern, rate } => {
            let sv = raw_singular_values(&ifs.product(pattern));
            let conformal = (sv[0] - sv[sv.len() - 1]).abs() <= 1e-12 * sv[0];
            conformal.then(|| {
                let logs: Vec<f64> = sv.iter().map(|s| s.ln()).collect();
                rate.to_f64() * (-log_phi_from_logs(&logs, t) / pattern.len() as f64)
            })
        }
        _ => None,
    };
    AlphaEstimate {
        t,
        value: value.max(0.0),
        argmin_k: profile.k_burn + argmin,
        k_burn: profile.k_burn,
        k_max: profile.k_max,
        trend,
        decreasing_tail,
        closed_form,
        rigor: Rigor::Heuristic,
    }
}

/// `min_{n ∈ [n_burn, n_max]} ψ(n)/n`; exact `β` for linear rules.
pub fn beta_estimate(psi: &ReturnRule, n_burn: usize, n_max: usize) -> Result<f64> {
    if n_burn < 1 || n_max < n_burn {
        return Err(Error::invalid("n_burn/n_max", format!("need 1 <= n_burn <= n_max, got {n_burn}, {n_max}")));
    }
    psi.validate()?;
    match psi {
        ReturnRule::LinearFloor { beta, .. } => Ok(beta.to_f64()),
        ReturnRule::Table { values } => {
            let hi = n_max.min(values.len());
            if hi < n_burn {
                return Err(Error::Index { index: n_burn, available: values.len() });
            }
            Ok((n_burn..=hi).map(|n| values[n - 1] as f64 / n as f64).fold(f64::INFINITY, f64::min))
        }
    }
}
