//! Finite words over the alphabet `{1, …, N}`, target cylinder sequences and
//! return-time rules.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default cap on the number of words a single enumeration may produce.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 100_000_000;

/// Exact non-negative rational used for rates (`β`, `β_T`).
///
/// Parses from `"p/q"` or a plain decimal such as `"0.25"`, which is
/// converted exactly (no float round trip).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(Ratio<i64>);

impl Rational {
    pub fn new(numer: i64, denom: i64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::invalid("rational", "zero denominator"));
        }
        Ok(Rational(Ratio::new(numer, denom)))
    }

    pub fn integer(value: i64) -> Self {
        Rational(Ratio::from_integer(value))
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }

    pub fn is_zero(&self) -> bool {
        self.numer() == 0
    }

    /// `floor(self · n)` computed in integer arithmetic.
    pub fn floor_mul(&self, n: u64) -> i128 {
        let num = self.numer() as i128 * n as i128;
        num.div_euclid(self.denom() as i128)
    }

    /// `round(self · n)` with halves rounded up, in integer arithmetic.
    pub fn round_mul(&self, n: u64) -> i128 {
        let q = self.denom() as i128;
        (2 * self.numer() as i128 * n as i128 + q).div_euclid(2 * q)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::invalid("rational", format!("cannot parse `{s}`"));
        if let Some((p, q)) = s.split_once('/') {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            return Rational::new(p, q);
        }
        if s.contains(['e', 'E']) {
            return Err(bad());
        }
        let (negative, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) || frac_part.len() > 15 {
            return Err(bad());
        }
        let digits = format!("{int_part}{frac_part}");
        let numer: i64 = digits.parse().map_err(|_| bad())?;
        let denom = 10i64.pow(frac_part.len() as u32);
        Rational::new(if negative { -numer } else { numer }, denom)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Number(serde_json::Number),
        }
        let text = match Raw::deserialize(deserializer)? {
            Raw::Text(s) => s,
            Raw::Number(n) => n.to_string(),
        };
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// A finite word `i₁ i₂ ⋯ iₙ` with 1-based letters. The empty word is the
/// empty prefix `∅`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Builds a word, checking every letter lies in `1..=n_letters`.
    pub fn new(letters: Vec<u8>, n_letters: usize) -> Result<Self> {
        if let Some(&bad) = letters.iter().find(|&&l| l == 0 || l as usize > n_letters) {
            return Err(Error::invalid("word", format!("letter {bad} outside 1..={n_letters}")));
        }
        Ok(Word(letters))
    }

    /// Builds a word without alphabet validation (letters must still be ≥ 1).
    pub fn from_letters(letters: Vec<u8>) -> Self {
        debug_assert!(letters.iter().all(|&l| l >= 1));
        Word(letters)
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..n.min(self.0.len())].to_vec())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn push(&mut self, letter: u8) {
        self.0.push(letter);
    }

    pub fn extend_from(&mut self, other: &Word) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    pub fn max_letter(&self) -> u8 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    /// `true` if `prefix` is a prefix of `self`.
    pub fn starts_with(&self, prefix: &Word) -> bool {
        self.0.starts_with(&prefix.0)
    }

    /// Serialization for an alphabet of size `n_letters`: plain digits when
    /// `n_letters ≤ 9`, dot-separated integers otherwise.
    pub fn format_for(&self, n_letters: usize) -> String {
        if n_letters <= 9 {
            self.0.iter().map(|l| char::from(b'0' + l)).collect()
        } else {
            self.0.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(".")
        }
    }

    /// Inverse of [`Word::format_for`].
    pub fn parse_for(s: &str, n_letters: usize) -> Result<Word> {
        let s = s.trim();
        if s.is_empty() || s == "∅" {
            return Ok(Word::empty());
        }
        let letters: Result<Vec<u8>> = if n_letters <= 9 && !s.contains('.') {
            s.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as u8)
                        .ok_or_else(|| Error::invalid("word", format!("bad letter `{c}` in `{s}`")))
                })
                .collect()
        } else {
            s.split('.')
                .filter(|p| !p.is_empty())
                .map(|p| p.parse::<u8>().map_err(|_| Error::invalid("word", format!("bad letter `{p}` in `{s}`"))))
                .collect()
        };
        Word::new(letters?, n_letters)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().all(|&l| l <= 9) {
            write!(f, "{}", self.format_for(9))
        } else if self.0.len() == 1 {
            write!(f, "{}.", self.0[0])
        } else {
            write!(f, "{}", self.format_for(usize::from(u8::MAX)))
        }
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Word::parse_for(s, if s.contains('.') { usize::from(u8::MAX) } else { 9 })
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Checks `n_letters^len` against `budget` and returns the count.
pub fn word_count(n_letters: usize, len: usize, budget: u128) -> Result<u128> {
    let mut count: u128 = 1;
    for _ in 0..len {
        count = count.saturating_mul(n_letters as u128);
        if count > budget {
            return Err(Error::Budget { requested: count, budget });
        }
    }
    Ok(count)
}

/// The word with lexicographic rank `index` among words of length `len`.
pub fn word_at(n_letters: usize, len: usize, mut index: u128) -> Word {
    let mut letters = vec![1u8; len];
    for slot in letters.iter_mut().rev() {
        *slot = (index % n_letters as u128) as u8 + 1;
        index /= n_letters as u128;
    }
    Word(letters)
}

/// Lexicographic iterator over `Σ_n`.
#[derive(Debug, Clone)]
pub struct Words {
    n_letters: u8,
    current: Option<Vec<u8>>,
}

impl Iterator for Words {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        let out = self.current.clone()?;
        let mut next = out.clone();
        let mut i = next.len();
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if next[i] < self.n_letters {
                next[i] += 1;
                for l in next[i + 1..].iter_mut() {
                    *l = 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(Word(out))
    }
}

/// All `N^n` words of length `n` in lexicographic order.
pub fn enumerate_words(n_letters: usize, len: usize, budget: u128) -> Result<Words> {
    if n_letters < 2 || n_letters > u8::MAX as usize {
        return Err(Error::invalid("n_letters", format!("alphabet size {n_letters} outside 2..=255")));
    }
    word_count(n_letters, len, budget)?;
    Ok(Words {
        n_letters: n_letters as u8,
        current: Some(vec![1; len]),
    })
}

/// Longest common prefix `u ∧ v`. For identical words this is the whole word.
pub fn common_prefix(u: &Word, v: &Word) -> Word {
    let n = u.0.iter().zip(&v.0).take_while(|(a, b)| a == b).count();
    u.prefix(n)
}

/// Growth schedule of a degenerate target sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegenerateRate {
    /// `|λ_k| = ⌈√k⌉`, so `|λ_k|/k → 0`.
    Zero,
    /// `|λ_k| = k²`, so `|λ_k|/k → ∞`.
    Infinite,
}

/// Rule producing the target cylinders `λ_k`, `k ≥ 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TargetSequence {
    /// `λ_k` is the `k`-th entry (1-based) of the list.
    Explicit { words: Vec<Word> },
    /// `λ_k` is the first `max(1, round(rate·k))` letters of the pattern
    /// repeated cyclically.
    LinearPattern { pattern: Word, rate: Rational },
    /// Cyclic pattern truncated to a sublinear or superlinear length.
    Degenerate { pattern: Word, rate: DegenerateRate },
}

/// Declared (or estimated) asymptotic rate class of `|λ_k|/k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", content = "rate", rename_all = "snake_case")]
pub enum RateClass {
    Zero,
    Finite(f64),
    Infinite,
}

impl TargetSequence {
    pub fn validate(&self, n_letters: usize) -> Result<()> {
        let check = |w: &Word| Word::new(w.letters().to_vec(), n_letters).map(|_| ());
        match self {
            TargetSequence::Explicit { words } => {
                if words.is_empty() {
                    return Err(Error::invalid("target.words", "explicit target list is empty"));
                }
                words.iter().try_for_each(check)
            }
            TargetSequence::LinearPattern { pattern, rate } => {
                if pattern.is_empty() {
                    return Err(Error::invalid("target.pattern", "pattern must be non-empty"));
                }
                if rate.numer() < 0 {
                    return Err(Error::invalid("target.rate", "rate must be non-negative"));
                }
                check(pattern)
            }
            TargetSequence::Degenerate { pattern, .. } => {
                if pattern.is_empty() {
                    return Err(Error::invalid("target.pattern", "pattern must be non-empty"));
                }
                check(pattern)
            }
        }
    }

    /// `|λ_k|` without materializing the word.
    pub fn target_len(&self, k: usize) -> Result<usize> {
        if k == 0 {
            return Err(Error::Index { index: 0, available: 0 });
        }
        Ok(match self {
            TargetSequence::Explicit { words } => words
                .get(k - 1)
                .ok_or(Error::Index { index: k, available: words.len() })?
                .len(),
            TargetSequence::LinearPattern { rate, .. } => rate.round_mul(k as u64).max(1) as usize,
            TargetSequence::Degenerate { rate, .. } => match rate {
                DegenerateRate::Zero => (k as f64).sqrt().ceil() as usize,
                DegenerateRate::Infinite => k * k,
            },
        })
    }

    /// The cyclic pattern, if `λ_k` are prefixes of one periodic word.
    pub fn pattern(&self) -> Option<&Word> {
        match self {
            TargetSequence::Explicit { .. } => None,
            TargetSequence::LinearPattern { pattern, .. } | TargetSequence::Degenerate { pattern, .. } => Some(pattern),
        }
    }

    /// Number of cylinders available (`None` for unbounded rules).
    pub fn available(&self) -> Option<usize> {
        match self {
            TargetSequence::Explicit { words } => Some(words.len()),
            _ => None,
        }
    }

    /// Rate class taken from the declaration; `None` for explicit lists.
    pub fn declared_rate(&self) -> Option<RateClass> {
        match self {
            TargetSequence::Explicit { .. } => None,
            TargetSequence::LinearPattern { rate, .. } => Some(if rate.is_zero() {
                RateClass::Zero
            } else {
                RateClass::Finite(rate.to_f64())
            }),
            TargetSequence::Degenerate { rate, .. } => Some(match rate {
                DegenerateRate::Zero => RateClass::Zero,
                DegenerateRate::Infinite => RateClass::Infinite,
            }),
        }
    }

    /// Estimates the rate class from lengths `|λ_k|`, `k ≤ k_max`, using the
    /// log-log growth exponent over the second half of the range.
    pub fn estimate_rate(&self, k_max: usize) -> Result<RateClass> {
        let k_max = match self.available() {
            Some(n) => k_max.min(n),
            None => k_max,
        };
        if k_max < 4 {
            return Err(Error::invalid("k_max", "need at least 4 target cylinders to estimate a rate"));
        }
        let start = (k_max / 2).max(1);
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut min_ratio = f64::INFINITY;
        for k in start..=k_max {
            let len = self.target_len(k)?.max(1) as f64;
            xs.push((k as f64).ln());
            ys.push(len.ln());
            min_ratio = min_ratio.min(len / k as f64);
        }
        let exponent = crate::numerics::least_squares_slope(&xs, &ys).unwrap_or(1.0);
        Ok(if exponent < 0.75 {
            RateClass::Zero
        } else if exponent > 1.25 {
            RateClass::Infinite
        } else {
            RateClass::Finite(min_ratio)
        })
    }
}

/// `λ_k` for the given rule.
pub fn target_cylinder(spec: &TargetSequence, k: usize) -> Result<Word> {
    let len = spec.target_len(k)?;
    Ok(match spec {
        TargetSequence::Explicit { words } => words[k - 1].clone(),
        TargetSequence::LinearPattern { pattern, .. } | TargetSequence::Degenerate { pattern, .. } => {
            let p = pattern.letters();
            Word((0..len).map(|i| p[i % p.len()]).collect())
        }
    })
}

/// `λ′ = λ 1 1 ⋯ 1` with `(p − |λ|) mod (K + p)` trailing ones (residue taken
/// in `[0, K + p)`), so that `|λ′| ≡ p (mod K + p)`.
pub fn pad_target(target: &Word, p: usize, k_buffer: usize) -> Word {
    assert!(p >= 1, "block length must be positive");
    let modulus = (k_buffer + p) as i64;
    let pad = (p as i64 - target.len() as i64).rem_euclid(modulus) as usize;
    let mut out = target.clone();
    out.0.extend(std::iter::repeat_n(1u8, pad));
    out
}

/// Rule for the return lengths `ψ(n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReturnRule {
    /// `ψ(n) = max(0, ⌊β n⌋ + offset)`.
    LinearFloor { beta: Rational, offset: i64 },
    /// `ψ(n) = values[n − 1]`.
    Table { values: Vec<u64> },
}

impl ReturnRule {
    pub fn validate(&self) -> Result<()> {
        match self {
            ReturnRule::LinearFloor { beta, .. } if beta.numer() < 0 => {
                Err(Error::invalid("psi.beta", "β must be non-negative"))
            }
            ReturnRule::Table { values } if values.is_empty() => Err(Error::invalid("psi.values", "empty table")),
            _ => Ok(()),
        }
    }

    pub fn eval(&self, n: usize) -> Result<u64> {
        if n == 0 {
            return Err(Error::Index { index: 0, available: 0 });
        }
        match self {
            ReturnRule::LinearFloor { beta, offset } => Ok((beta.floor_mul(n as u64) + *offset as i128).max(0) as u64),
            ReturnRule::Table { values } => values
                .get(n - 1)
                .copied()
                .ok_or(Error::Index { index: n, available: values.len() }),
        }
    }

    /// Largest `n` for which the rule is defined.
    pub fn available(&self) -> Option<usize> {
        match self {
            ReturnRule::LinearFloor { .. } => None,
            ReturnRule::Table { values } => Some(values.len()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn enumerate_small_cases() {
        let all: Vec<Word> = enumerate_words(2, 0, DEFAULT_ENUMERATION_BUDGET).unwrap().collect();
        assert_eq!(all, vec![Word::empty()]);
        let all: Vec<String> = enumerate_words(2, 2, DEFAULT_ENUMERATION_BUDGET)
            .unwrap()
            .map(|w| w.to_string())
            .collect();
        assert_eq!(all, ["11", "12", "21", "22"]);
        assert_eq!(enumerate_words(3, 7, DEFAULT_ENUMERATION_BUDGET).unwrap().count(), 2187);
    }

    #[test]
    fn enumerate_respects_budget() {
        let err = enumerate_words(2, 30, 1_000_000).unwrap_err();
        assert_eq!(err.reason(), "budget_exceeded");
        assert!(enumerate_words(1, 3, 100).is_err());
    }

    #[test]
    fn word_at_matches_iterator() {
        for (i, word) in enumerate_words(3, 4, 1000).unwrap().enumerate() {
            assert_eq!(word_at(3, 4, i as u128), word);
        }
    }

    #[test]
    fn common_prefix_cases() {
        assert_eq!(common_prefix(&w("121"), &w("122")), w("12"));
        assert_eq!(common_prefix(&w("21"), &w("12")), Word::empty());
        assert_eq!(common_prefix(&w("1111"), &w("1111")).len(), 4);
    }

    #[test]
    fn target_cylinder_cases() {
        let spec = TargetSequence::LinearPattern { pattern: w("1"), rate: Rational::integer(1) };
        assert_eq!(target_cylinder(&spec, 3).unwrap(), w("111"));
        let spec = TargetSequence::LinearPattern { pattern: w("12"), rate: Rational::new(1, 2).unwrap() };
        assert_eq!(target_cylinder(&spec, 8).unwrap(), w("1212"));
        let spec = TargetSequence::Explicit { words: vec![w("1"), w("22"), w("121")] };
        assert_eq!(target_cylinder(&spec, 3).unwrap(), w("121"));
        assert_eq!(target_cylinder(&spec, 4).unwrap_err().reason(), "index_out_of_range");
    }

    #[test]
    fn pad_target_cases() {
        assert_eq!(pad_target(&w("11"), 2, 1), w("11"));
        assert_eq!(pad_target(&w("1"), 3, 2), w("111"));
        assert_eq!(pad_target(&w("12121"), 2, 1), w("12121"));
    }

    #[test]
    fn pad_target_exhaustive_alignment() {
        for len in 0..=20 {
            let lambda = Word::from_letters(vec![2; len]);
            for p in 1..=5 {
                for k in 0..=4 {
                    let padded = pad_target(&lambda, p, k);
                    assert_eq!(padded.len() % (k + p), p % (k + p), "len={len} p={p} K={k}");
                    assert!(padded.starts_with(&lambda));
                    assert!(padded.len() - len < k + p);
                }
            }
        }
    }

    #[test]
    fn linear_pattern_rate_converges() {
        for rate in [Rational::new(1, 2).unwrap(), Rational::new(3, 4).unwrap(), Rational::new(7, 3).unwrap()] {
            let spec = TargetSequence::LinearPattern { pattern: w("12"), rate };
            for k in 1..=10_000usize {
                let len = spec.target_len(k).unwrap() as f64;
                assert!((len / k as f64 - rate.to_f64()).abs() <= 1.0 / k as f64, "k={k}");
            }
        }
    }

    #[test]
    fn word_format_round_trip() {
        let big = Word::new(vec![3, 12, 7], 12).unwrap();
        assert_eq!(big.format_for(12), "3.12.7");
        assert_eq!(Word::parse_for("3.12.7", 12).unwrap(), big);
        assert_eq!(big.to_string().parse::<Word>().unwrap(), big);
        let single = Word::new(vec![12], 12).unwrap();
        assert_eq!(single.to_string().parse::<Word>().unwrap(), single);
        assert!(Word::parse_for("13", 2).is_err());
    }

    #[test]
    fn rational_parsing() {
        assert_eq!("1/2".parse::<Rational>().unwrap(), Rational::new(1, 2).unwrap());
        assert_eq!("0.25".parse::<Rational>().unwrap(), Rational::new(1, 4).unwrap());
        assert_eq!("3".parse::<Rational>().unwrap(), Rational::integer(3));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("abc".parse::<Rational>().is_err());
        let r: Rational = serde_json::from_str("0.75").unwrap();
        assert_eq!(r, Rational::new(3, 4).unwrap());
    }

    #[test]
    fn return_rules() {
        let half = ReturnRule::LinearFloor { beta: Rational::new(1, 2).unwrap(), offset: 0 };
        assert_eq!(half.eval(7).unwrap(), 3);
        let shifted = ReturnRule::LinearFloor { beta: Rational::new(1, 2).unwrap(), offset: -5 };
        assert_eq!(shifted.eval(2).unwrap(), 0);
        let table = ReturnRule::Table { values: vec![0, 1, 1] };
        assert_eq!(table.eval(3).unwrap(), 1);
        assert!(table.eval(4).is_err());
    }

    #[test]
    fn rate_estimation() {
        let p = w("1");
        let sqrt = TargetSequence::Degenerate { pattern: p.clone(), rate: DegenerateRate::Zero };
        assert_eq!(sqrt.estimate_rate(1000).unwrap(), RateClass::Zero);
        let sq = TargetSequence::Degenerate { pattern: p.clone(), rate: DegenerateRate::Infinite };
        assert_eq!(sq.estimate_rate(1000).unwrap(), RateClass::Infinite);
        let lin = TargetSequence::LinearPattern { pattern: p, rate: Rational::integer(1) };
        assert!(matches!(lin.estimate_rate(1000).unwrap(), RateClass::Finite(r) if (r - 1.0).abs() < 1e-12));
    }
}
