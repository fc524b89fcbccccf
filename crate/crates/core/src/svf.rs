//! Singular values, the singular value function `φ^t` and matrix products
//! along words.
//!
//! Every `φ` value leaves this module as a logarithm ([`LogValue`]); products
//! along long words underflow double precision long before they become
//! interesting.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use parking_lot::RwLock;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multilinear::compound_raw;
use crate::symbolic::Word;

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Smallest singular value still treated as non-singular.
pub const SINGULAR_FLOOR: f64 = 1e-300;

/// Default number of cached prefix products.
pub const DEFAULT_CACHE_CAPACITY: usize = 1_000_000;

/// A quantity stored by its natural logarithm.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct LogValue(pub f64);

impl LogValue {
    pub fn ln(self) -> f64 {
        self.0
    }

    /// The value itself; may underflow to zero for long words.
    pub fn exp(self) -> f64 {
        self.0.exp()
    }
}

/// Descending singular values `α₁ ≥ ⋯ ≥ α_d > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularProfile {
    pub values: Vec<f64>,
}

impl SingularProfile {
    pub fn log_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.ln()).collect()
    }

    pub fn log_phi(&self, t: f64) -> LogValue {
        LogValue(log_phi_from_logs(&self.log_values(), t))
    }
}

/// `(γ̲, γ) = (min_i α_d(A_i), max_i α₁(A_i))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaBounds {
    pub gamma_min: f64,
    pub gamma_max: f64,
}

/// The tuple of matrices `A_1..A_N` and translations `t_1..t_N` in `ℝ^d`.
#[derive(Debug, Clone)]
pub struct AffineIFS {
    d: usize,
    matrices: Vec<Matrix>,
    translations: Vec<Vector>,
    profiles: Vec<SingularProfile>,
    log_dets: Vec<f64>,
    contractive_half: bool,
    warnings: Vec<String>,
    compounds: OnceLock<Vec<Vec<Matrix>>>,
}

impl AffineIFS {
    /// Validates shapes, non-singularity and records contractivity.
    pub fn new(matrices: Vec<Matrix>, translations: Vec<Vector>) -> Result<Self> {
        let n = matrices.len();
        if n < 2 {
            return Err(Error::invalid("matrices", format!("need at least 2 maps, got {n}")));
        }
        if n > u8::MAX as usize {
            return Err(Error::invalid("matrices", format!("at most 255 maps supported, got {n}")));
        }
        if translations.len() != n {
            return Err(Error::invalid(
                "translations",
                format!("{} translations for {n} matrices", translations.len()),
            ));
        }
        let d = matrices[0].nrows();
        if d == 0 {
            return Err(Error::invalid("d", "dimension must be at least 1"));
        }
        for (i, m) in matrices.iter().enumerate() {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::invalid(
                    format!("matrices[{i}]"),
                    format!("expected {d}x{d}, got {}x{}", m.nrows(), m.ncols()),
                ));
            }
            if m.iter().any(|x| !x.is_finite()) {
                return Err(Error::invalid(format!("matrices[{i}]"), "non-finite entry"));
            }
        }
        for (i, t) in translations.iter().enumerate() {
            if t.len() != d {
                return Err(Error::invalid(format!("translations[{i}]"), format!("expected length {d}, got {}", t.len())));
            }
        }
        let mut profiles = Vec::with_capacity(n);
        let mut warnings = Vec::new();
        let mut contractive_half = true;
        for (i, m) in matrices.iter().enumerate() {
            let p = singular_values(m).map_err(|_| Error::invalid(format!("matrices[{i}]"), "matrix is singular"))?;
            if p.values[0] >= 1.0 {
                return Err(Error::invalid(format!("matrices[{i}]"), format!("not contracting: norm {}", p.values[0])));
            }
            if p.values[0] >= 0.5 {
                contractive_half = false;
                warnings.push(format!(
                    "matrices[{i}] has norm {:.6} >= 1/2; almost-sure dimension formulas assume norms below 1/2",
                    p.values[0]
                ));
            }
            profiles.push(p);
        }
        let log_dets = profiles.iter().map(|p| p.log_values().iter().sum()).collect();
        Ok(AffineIFS {
            d,
            matrices,
            translations,
            profiles,
            log_dets,
            contractive_half,
            warnings,
            compounds: OnceLock::new(),
        })
    }

    /// System with all translations zero.
    pub fn linear(matrices: Vec<Matrix>) -> Result<Self> {
        let d = matrices.first().map(|m| m.nrows()).unwrap_or(0);
        let n = matrices.len();
        Self::new(matrices, vec![Vector::zeros(d); n])
    }

    /// `N` similarities `r·I_d` with zero translations.
    pub fn equal_similarities(n: usize, d: usize, r: f64) -> Result<Self> {
        Self::linear(vec![Matrix::identity(d, d) * r; n])
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn n_maps(&self) -> usize {
        self.matrices.len()
    }

    /// Matrix for a 1-based letter.
    pub fn matrix(&self, letter: u8) -> &Matrix {
        &self.matrices[letter as usize - 1]
    }

    pub fn matrices(&self) -> &[Matrix] {
        &self.matrices
    }

    pub fn translations(&self) -> &[Vector] {
        &self.translations
    }

    pub fn profile(&self, letter: u8) -> &SingularProfile {
        &self.profiles[letter as usize - 1]
    }

    /// Whether every `‖A_i‖ < 1/2`.
    pub fn contractive_half(&self) -> bool {
        self.contractive_half
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn with_translations(&self, translations: Vec<Vector>) -> Result<Self> {
        Self::new(self.matrices.clone(), translations)
    }

    /// The system of transposed matrices.
    pub fn transposed(&self) -> Result<Self> {
        Self::new(self.matrices.iter().map(|m| m.transpose()).collect(), self.translations.clone())
    }

    pub fn check_word(&self, w: &Word) -> Result<()> {
        match w.letters().iter().find(|&&l| l == 0 || l as usize > self.n_maps()) {
            Some(&bad) => Err(Error::invalid("word", format!("letter {bad} outside 1..={}", self.n_maps()))),
            None => Ok(()),
        }
    }

    /// `log |det A_w|` summed letter by letter, so it stays exact where the
    /// rounded product has lost its smallest directions.
    pub fn log_det(&self, w: &Word) -> f64 {
        w.letters().iter().map(|&l| self.letter_log_det(l)).sum()
    }

    pub(crate) fn letter_log_det(&self, letter: u8) -> f64 {
        self.log_dets[letter as usize - 1]
    }

    /// `A_w = A_{w₁}⋯A_{wₙ}` by direct multiplication (no cache).
    pub fn product(&self, w: &Word) -> Matrix {
        let mut m = Matrix::identity(self.d, self.d);
        for &l in w.letters() {
            m *= self.matrix(l);
        }
        m
    }

    /// Exterior powers `A_i^{∧k}` for `k = 1..d−1`, indexed `[letter−1][k−1]`.
    pub(crate) fn generator_compounds(&self) -> &[Vec<Matrix>] {
        self.compounds.get_or_init(|| {
            self.matrices
                .iter()
                .map(|m| (1..self.d).map(|k| compound_raw(m, k)).collect())
                .collect()
        })
    }
}

/// `log φ^t` from descending log singular values.
pub fn log_phi_from_logs(log_sv: &[f64], t: f64) -> f64 {
    let d = log_sv.len();
    if t <= 0.0 {
        return 0.0;
    }
    if t >= d as f64 {
        return t / d as f64 * log_sv.iter().sum::<f64>();
    }
    let whole = t.floor() as usize;
    let frac = t - whole as f64;
    let mut acc: f64 = log_sv[..whole].iter().sum();
    if frac > 0.0 {
        acc += frac * log_sv[whole];
    }
    acc
}

/// Descending singular values of a square matrix.
pub fn singular_values(a: &Matrix) -> Result<SingularProfile> {
    let values = raw_singular_values(a);
    let smallest = *values.last().unwrap_or(&0.0);
    if !(smallest > SINGULAR_FLOOR) {
        return Err(Error::Singular { smallest });
    }
    Ok(SingularProfile { values })
}

pub(crate) fn raw_singular_values(a: &Matrix) -> Vec<f64> {
    match a.nrows() {
        0 => Vec::new(),
        1 => vec![a[(0, 0)].abs()],
        2 => {
            let (p, q, r, s) = (a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)]);
            if q == 0.0 && r == 0.0 {
                let (x, y) = (p.abs(), s.abs());
                return vec![x.max(y), x.min(y)];
            }
            let det = (p * s - q * r).abs();
            let plus = (0.5 * (p + s)).hypot(0.5 * (r - q));
            let minus = (0.5 * (p - s)).hypot(0.5 * (r + q));
            let top = plus + minus;
            let bottom = if top > 0.0 { det / top } else { 0.0 };
            vec![top, bottom]
        }
        _ => {
            let mut v: Vec<f64> = a.clone().singular_values().iter().copied().collect();
            v.sort_by(|x, y| y.total_cmp(x));
            v
        }
    }
}

/// Log singular values of `a` given `log |det a|` from elsewhere. The top
/// `d − 1` come from the matrix; the last is recovered from the determinant.
pub(crate) fn log_sv_with_det(a: &Matrix, log_det: f64) -> Result<Vec<f64>> {
    let sv = raw_singular_values(a);
    let d = sv.len();
    if d == 0 {
        return Ok(Vec::new());
    }
    let head = &sv[..d - 1];
    if let Some(&smallest) = head.iter().find(|x| !(**x > SINGULAR_FLOOR)) {
        return Err(Error::Singular { smallest });
    }
    let mut logs: Vec<f64> = head.iter().map(|x| x.ln()).collect();
    let rest = log_det - logs.iter().sum::<f64>();
    // Rounding in the head can push the recovered value just above its neighbour.
    logs.push(match logs.last() {
        Some(&prev) => rest.min(prev),
        None => rest,
    });
    Ok(logs)
}

/// Largest singular value.
pub(crate) fn spectral_norm(a: &Matrix) -> f64 {
    raw_singular_values(a).first().copied().unwrap_or(0.0)
}

/// `log φ^t(A)`.
pub fn phi(a: &Matrix, t: f64) -> Result<LogValue> {
    if t < 0.0 {
        return Err(Error::invalid("t", "must be non-negative"));
    }
    Ok(singular_values(a)?.log_phi(t))
}

pub fn gamma_bounds(ifs: &AffineIFS) -> GammaBounds {
    let gamma_max = ifs.profiles.iter().map(|p| p.values[0]).fold(0.0, f64::max);
    let gamma_min = ifs
        .profiles
        .iter()
        .map(|p| *p.values.last().unwrap())
        .fold(f64::INFINITY, f64::min);
    GammaBounds { gamma_min, gamma_max }
}

#[derive(Debug, Default)]
struct CacheInner {
    map: HashMap<Word, Matrix>,
    by_len: BTreeMap<usize, HashSet<Word>>,
}

/// Cache of prefix products `A_w`, shared between threads.
///
/// Reads take a shared lock; insertion is exclusive. When full, the longest
/// cached words are evicted first. Entries are keyed by word alone, so a
/// cache must not be shared between different systems.
#[derive(Debug)]
pub struct ProductCache {
    capacity: usize,
    inner: RwLock<CacheInner>,
}

impl Default for ProductCache {
    fn default() -> Self {
        Self::new(DEFAULT_CACHE_CAPACITY)
    }
}

impl ProductCache {
    pub fn new(capacity: usize) -> Self {
        ProductCache {
            capacity,
            inner: RwLock::new(CacheInner::default()),
        }
    }

    pub fn len(&self) -> usize {
        self.inner.read().map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `A_w`, extending the longest cached prefix.
    pub fn product(&self, ifs: &AffineIFS, w: &Word) -> Matrix {
        let (mut start, mut m) = {
            let guard = self.inner.read();
            let mut found = None;
            for n in (1..=w.len()).rev() {
                if let Some(m) = guard.map.get(&w.prefix(n)) {
                    found = Some((n, m.clone()));
                    break;
                }
            }
            found.unwrap_or_else(|| (0, Matrix::identity(ifs.dim(), ifs.dim())))
        };
        let mut fresh = Vec::new();
        while start < w.len() {
            m *= ifs.matrix(w.letters()[start]);
            start += 1;
            fresh.push((start, m.clone()));
        }
        if !fresh.is_empty() && self.capacity > 0 {
            let mut guard = self.inner.write();
            for (n, prod) in fresh {
                insert_bounded(&mut guard, self.capacity, w.prefix(n), prod);
            }
        }
        m
    }
}

fn insert_bounded(inner: &mut CacheInner, capacity: usize, key: Word, value: Matrix) {
    if inner.map.contains_key(&key) {
        return;
    }
    if inner.map.len() >= capacity {
        let longest = *inner.by_len.keys().next_back().expect("non-empty cache");
        if key.len() >= longest {
            return;
        }
        let bucket = inner.by_len.get_mut(&longest).unwrap();
        let victim = bucket.iter().next().cloned().unwrap();
        bucket.remove(&victim);
        if bucket.is_empty() {
            inner.by_len.remove(&longest);
        }
        inner.map.remove(&victim);
    }
    inner.by_len.entry(key.len()).or_default().insert(key.clone());
    inner.map.insert(key, value);
}

/// `log φ^t(A_w)` using the prefix cache.
pub fn phi_word(ifs: &AffineIFS, w: &Word, t: f64, cache: &ProductCache) -> Result<LogValue> {
    ifs.check_word(w)?;
    if w.is_empty() {
        return Ok(LogValue(0.0));
    }
    phi(&cache.product(ifs, w), t)
}

/// Log singular values of arbitrarily long products.
///
/// Tracks the exterior powers `A_w^{∧k}` with separate log scales, so that
/// `log α₁⋯α_k = log ‖A_w^{∧k}‖` stays accurate even when the ratio
/// `α_d/α₁` itself would underflow.
#[derive(Debug, Clone)]
pub struct LongProduct<'a> {
    ifs: &'a AffineIFS,
    word: Word,
    mats: Vec<Matrix>,
    log_scale: Vec<f64>,
    log_det: f64,
}

impl<'a> LongProduct<'a> {
    pub fn new(ifs: &'a AffineIFS) -> Self {
        let d = ifs.dim();
        let mats = (1..d)
            .map(|k| {
                let m = crate::multilinear::binomial(d, k);
                Matrix::identity(m, m)
            })
            .collect();
        LongProduct {
            ifs,
            word: Word::empty(),
            mats,
            log_scale: vec![0.0; d.saturating_sub(1)],
            log_det: 0.0,
        }
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn push(&mut self, letter: u8) {
        let gens = &self.ifs.generator_compounds()[letter as usize - 1];
        for (k, m) in self.mats.iter_mut().enumerate() {
            *m *= &gens[k];
            let scale = m.amax();
            if scale > 0.0 {
                *m /= scale;
                self.log_scale[k] += scale.ln();
            }
        }
        self.log_det += self.ifs.matrix(letter).determinant().abs().ln();
        self.word.push(letter);
    }

    /// Moves to `target`, reusing the current product when it is a prefix.
    pub fn advance_to(&mut self, target: &Word) {
        if !target.starts_with(&self.word) {
            *self = LongProduct::new(self.ifs);
        }
        for &l in &target.letters()[self.word.len()..] {
            self.push(l);
        }
    }

    /// `log α₁(A_w) ≥ ⋯ ≥ log α_d(A_w)`.
    pub fn log_singular_values(&self) -> Vec<f64> {
        let d = self.ifs.dim();
        let mut cumulative = Vec::with_capacity(d + 1);
        cumulative.push(0.0);
        for (k, m) in self.mats.iter().enumerate() {
            cumulative.push(self.log_scale[k] + spectral_norm(m).ln());
        }
        cumulative.push(self.log_det);
        (0..d).map(|i| cumulative[i + 1] - cumulative[i]).collect()
    }

    pub fn log_phi(&self, t: f64) -> f64 {
        log_phi_from_logs(&self.log_singular_values(), t)
    }
}
