//! Finite-depth versions of the lower-bound construction: the measure tree
//! on the families `𝒦_n`, its per-level energy terms, attractor sampling
//! and box counting.

use std::collections::HashSet;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::condition::{log_phi_of, BufferCertificate};
use crate::error::{Error, Result};
use crate::numerics::{least_squares_slope, log_sum_exp, LogSumExp};
use crate::svf::{AffineIFS, Matrix, Vector};
use crate::symbolic::{enumerate_words, pad_target, target_cylinder, word_count, ReturnRule, TargetSequence, Word};

/// Default cap on the total number of words in a measure tree.
pub const DEFAULT_TREE_BUDGET: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Mode {
    ShrinkingTarget { target: TargetSequence },
    Recurrence { psi: ReturnRule },
}

/// Positions `m_k` at which the forced block starts, with the initial block
/// length they imply.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub positions: Vec<usize>,
    /// Residue of the positions in `[1, K + p]`.
    pub p_hat0: usize,
    pub p0: usize,
    /// Positions discarded because their residue differs from `p_hat0`.
    pub dropped: Vec<usize>,
}

impl Schedule {
    /// No forced blocks; `p₀ = p`.
    pub fn empty(p: usize, k: usize) -> Self {
        Schedule { positions: Vec::new(), p_hat0: k + p, p0: p, dropped: Vec::new() }
    }

    /// Keeps the positions in the most common residue class modulo `K + p`
    /// (smallest residue on ties) and derives `p₀` from it.
    pub fn from_positions(mut positions: Vec<usize>, p: usize, k: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::invalid("p", "block length must be positive"));
        }
        positions.sort_unstable();
        positions.dedup();
        if positions.first() == Some(&0) {
            return Err(Error::invalid("schedule", "positions are 1-based shifts and must be positive"));
        }
        if positions.is_empty() {
            return Ok(Schedule::empty(p, k));
        }
        let modulus = k + p;
        let residue = |m: usize| (m - 1) % modulus + 1;
        let mut counts = vec![0usize; modulus + 1];
        for &m in &positions {
            counts[residue(m)] += 1;
        }
        let p_hat0 = (1..=modulus).max_by_key(|&r| (counts[r], std::cmp::Reverse(r))).unwrap();
        let (kept, dropped): (Vec<usize>, Vec<usize>) = positions.into_iter().partition(|&m| residue(m) == p_hat0);
        let p0 = if p_hat0 > k { p_hat0 - k } else { p_hat0 + p };
        Ok(Schedule { positions: kept, p_hat0, p0, dropped })
    }

    /// Greedy schedule for a tree of the given depth: a level carries the
    /// forced block when its start `m` satisfies
    /// `m ≥ 2^j · Σ_{i<j}(|block_i| + K)`. The sum condition of the growth
    /// requirement is not enforced and is reported by the tree instead.
    pub fn clipped(mode: &Mode, p: usize, k: usize, depth: usize) -> Result<Self> {
        let mut schedule = Schedule::empty(p, k);
        let mut len = schedule.p0;
        let mut spent = 0usize;
        for _ in 0..depth {
            let start = len + k;
            let j = schedule.positions.len() as u32 + 1;
            let mut block = p;
            if (start as u128) >= (1u128 << j.min(100)) * spent as u128 {
                if let Some(b) = forced_len(mode, start, p, k)? {
                    schedule.positions.push(start);
                    spent += b + k;
                    block = b;
                }
            }
            len = start + block;
        }
        Ok(schedule)
    }
}

/// Length of the forced block at shift `m`, or `None` when it cannot be
/// placed there (a recurrence prefix longer than the word).
fn forced_len(mode: &Mode, m: usize, p: usize, k: usize) -> Result<Option<usize>> {
    let modulus = (k + p) as i64;
    let padded = |len: usize| len + (p as i64 - len as i64).rem_euclid(modulus) as usize;
    Ok(match mode {
        Mode::ShrinkingTarget { target } => Some(padded(target.target_len(m)?)),
        Mode::Recurrence { psi } => {
            let len = padded(psi.eval(m)? as usize);
            (len <= m).then_some(len)
        }
    })
}

/// One entry of the growth-condition report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthCheck {
    pub position: usize,
    /// `Σ_{k≤n} m_k ≤ (1 + 2⁻ⁿ) m_n`.
    pub sum_condition: bool,
    /// `m_n ≥ 2ⁿ Σ_{i<n} (|block_i| + K)`.
    pub spacing_condition: bool,
}

#[derive(Debug, Clone)]
pub struct TreeLevel {
    pub words: Vec<Word>,
    /// Normalized log weights.
    pub log_weights: Vec<f64>,
    /// Index of each word's parent in the previous level.
    pub parents: Vec<usize>,
    /// Shift at which this level's block starts (`0` for level 0).
    pub block_start: usize,
    pub block_len: usize,
    pub forced: bool,
    /// `log Σ_{𝕛∈Ω} φ^s(A_𝕛)` for the block set of this level (shrinking mode).
    pub log_block_sum: f64,
    matrices: Vec<Matrix>,
    log_dets: Vec<f64>,
}

impl TreeLevel {
    pub fn weight_sum(&self) -> f64 {
        log_sum_exp(&self.log_weights).exp()
    }
}

#[derive(Debug, Clone)]
pub struct MeasureTree {
    pub s: f64,
    pub p: usize,
    pub k: usize,
    pub mode: Mode,
    pub schedule: Schedule,
    /// Positions of the schedule that were not reached at this depth.
    pub unreached: Vec<usize>,
    pub growth: Vec<GrowthCheck>,
    pub certificate: String,
    pub levels: Vec<TreeLevel>,
    n_letters: usize,
}

/// Flat JSON record of one tree node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeNode {
    pub level: usize,
    pub word: String,
    pub weight: f64,
}

impl MeasureTree {
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn nodes(&self) -> Vec<TreeNode> {
        self.levels
            .iter()
            .enumerate()
            .flat_map(|(level, l)| {
                l.words.iter().zip(&l.log_weights).map(move |(w, lw)| TreeNode {
                    level,
                    word: w.format_for(self.n_letters),
                    weight: lw.exp(),
                })
            })
            .collect()
    }

    /// Largest deviation between a parent's weight and the total weight of
    /// its children, over all levels.
    pub fn max_partition_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for pair in self.levels.windows(2) {
            let mut sums = vec![0.0; pair[0].words.len()];
            for (c, &parent) in pair[1].parents.iter().enumerate() {
                sums[parent] += pair[1].log_weights[c].exp();
            }
            for (sum, lw) in sums.iter().zip(&pair[0].log_weights) {
                worst = worst.max((sum - lw.exp()).abs());
            }
        }
        worst
    }

    /// In recurrence mode, checks that each word returns to its own prefix of
    /// length `ψ(m)` at every reached scheduled shift `m`.
    pub fn recurrence_holds(&self) -> Result<bool> {
        let Mode::Recurrence { psi } = &self.mode else {
            return Ok(true);
        };
        let last = self.levels.last().unwrap();
        for level in self.levels.iter().filter(|l| l.forced) {
            let m = level.block_start;
            let need = psi.eval(m)? as usize;
            for w in &last.words {
                let l = w.letters();
                if l[m..m + need] != l[..need] {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Builds `𝒦_0, …, 𝒦_depth` and the weights `ν_{p,n}^s`.
///
/// Each child appends to its parent the buffer maximizing
/// `φ^s(A_{parent κ block})` and one block: a word of `Σ_p`, the padded
/// target `λ′_m` at a scheduled shift `m`, or in recurrence mode the parent's
/// own prefix of padded length `ψ′(m)`. A node's weight is the product of
/// `φ^s` over its free blocks, normalized per level; forced blocks
/// contribute a factor one.
#[allow(clippy::too_many_arguments)]
pub fn build_measure_tree(
    ifs: &AffineIFS,
    s: f64,
    p: usize,
    depth: usize,
    mode: Mode,
    cert: &BufferCertificate,
    schedule: Schedule,
    budget: u128,
) -> Result<MeasureTree> {
    if p == 0 {
        return Err(Error::invalid("p", "block length must be positive"));
    }
    if (cert.s - s).abs() > 1e-12 * s.abs().max(1.0) {
        return Err(Error::Certificate(format!("certificate is for s = {}, tree uses s = {s}", cert.s)));
    }
    match &mode {
        Mode::ShrinkingTarget { target } => target.validate(ifs.n_maps())?,
        Mode::Recurrence { psi } => psi.validate()?,
    }
    let k = cert.k;
    let n = ifs.n_maps();
    let buffers: Vec<(Word, Matrix)> = enumerate_words(n, k, budget)?.map(|w| {
        let m = ifs.product(&w);
        (w, m)
    }).collect();
    let free: Vec<(Word, Matrix, f64)> = enumerate_words(n, p, budget)?
        .map(|w| {
            let m = ifs.product(&w);
            let lp = log_phi_of(&m, ifs.log_det(&w), s)?;
            Ok((w, m, lp))
        })
        .collect::<Result<_>>()?;

    // Level 0: Σ_{p0} weighted by φ^s.
    let mut total = word_count(n, schedule.p0, budget)?;
    let mut words = Vec::new();
    let mut matrices = Vec::new();
    let mut log_dets = Vec::new();
    let mut logs = Vec::new();
    for w in enumerate_words(n, schedule.p0, budget)? {
        let m = ifs.product(&w);
        let ld = ifs.log_det(&w);
        logs.push(log_phi_of(&m, ld, s)?);
        words.push(w);
        matrices.push(m);
        log_dets.push(ld);
    }
    let log_block_sum = log_sum_exp(&logs);
    let mut raw = logs.clone();
    let mut levels = vec![TreeLevel {
        log_weights: normalize(&raw),
        words,
        parents: Vec::new(),
        block_start: 0,
        block_len: schedule.p0,
        forced: false,
        log_block_sum,
        matrices,
        log_dets,
    }];

    let mut next_pos = 0;
    let mut growth = Vec::new();
    let mut spent = 0usize;
    for _ in 0..depth {
        let prev = levels.last().unwrap();
        let start = prev.words[0].len() + k;
        if next_pos < schedule.positions.len() && schedule.positions[next_pos] < start {
            return Err(Error::Schedule(format!(
                "position {} falls inside an earlier block (next free shift is {start})",
                schedule.positions[next_pos]
            )));
        }
        let forced = next_pos < schedule.positions.len() && schedule.positions[next_pos] == start;
        // Candidate blocks for each parent: (word, matrix, log φ^s, counts towards weight).
        let fixed_block: Option<(Word, Matrix, f64)> = match (&mode, forced) {
            (Mode::ShrinkingTarget { target }, true) => {
                let w = pad_target(&target_cylinder(target, start)?, p, k);
                ifs.check_word(&w)?;
                let m = ifs.product(&w);
                let lp = log_phi_of(&m, ifs.log_det(&w), s)?;
                Some((w, m, lp))
            }
            _ => None,
        };
        let recurrence_len = match (&mode, forced) {
            (Mode::Recurrence { .. }, true) => Some(forced_len(&mode, start, p, k)?.ok_or_else(|| {
                Error::Schedule(format!("return prefix at shift {start} is longer than the word"))
            })?),
            _ => None,
        };
        let children_per_parent = if forced { 1 } else { free.len() } as u128;
        total += prev.words.len() as u128 * children_per_parent;
        if total > budget {
            return Err(Error::Budget { requested: total, budget });
        }
        let expand = |(idx, ((parent, a_parent), parent_det)): (usize, ((&Word, &Matrix), &f64))| -> Result<Vec<(Word, Matrix, f64, usize)>> {
            let blocks: Vec<(Word, Matrix, f64)> = if let Some(b) = &fixed_block {
                vec![(b.0.clone(), b.1.clone(), 0.0)]
            } else if let Some(len) = recurrence_len {
                let w = parent.prefix(len);
                let m = ifs.product(&w);
                vec![(w, m, 0.0)]
            } else {
                free.clone()
            };
            blocks
                .into_iter()
                .map(|(block, a_block, weight)| {
                    let mut best: Option<(usize, f64, Matrix)> = None;
                    let outer_det = parent_det + ifs.log_det(&block);
                    for (bi, (kappa, a_kappa)) in buffers.iter().enumerate() {
                        let m = a_parent * a_kappa * &a_block;
                        let lp = log_phi_of(&m, outer_det + ifs.log_det(kappa), s)?;
                        if best.as_ref().is_none_or(|b| lp > b.1) {
                            best = Some((bi, lp, m));
                        }
                    }
                    let (bi, _, m) = best.expect("at least one buffer");
                    let mut w = parent.clone();
                    w.extend_from(&buffers[bi].0);
                    w.extend_from(&block);
                    Ok((w, m, weight, idx))
                })
                .collect()
        };
        let children: Vec<Vec<(Word, Matrix, f64, usize)>> = prev
            .words
            .par_iter()
            .zip(prev.matrices.par_iter())
            .zip(prev.log_dets.par_iter())
            .enumerate()
            .map(expand)
            .collect::<Result<_>>()?;
        let block_len;
        let log_block_sum;
        if forced {
            let len = match &fixed_block {
                Some(b) => b.0.len(),
                None => recurrence_len.unwrap(),
            };
            block_len = len;
            log_block_sum = fixed_block.as_ref().map_or(0.0, |b| b.2);
            let sum_ok = {
                let sum: usize = schedule.positions[..=next_pos].iter().sum();
                (sum as f64) <= (1.0 + 0.5f64.powi(next_pos as i32 + 1)) * start as f64
            };
            let spacing_ok = (start as f64) >= 2f64.powi(next_pos as i32 + 1) * spent as f64;
            growth.push(GrowthCheck { position: start, sum_condition: sum_ok, spacing_condition: spacing_ok });
            spent += len + k;
            next_pos += 1;
        } else {
            block_len = p;
            log_block_sum = log_sum_exp(&free.iter().map(|f| f.2).collect::<Vec<_>>());
        }
        let mut words = Vec::new();
        let mut matrices = Vec::new();
        let mut log_dets = Vec::new();
        let mut parents = Vec::new();
        let mut next_raw = Vec::new();
        // Free blocks contribute their own φ^s; forced blocks contribute one.
        for (w, m, _, parent) in children.into_iter().flatten() {
            let block_log = if forced {
                0.0
            } else {
                let tail = Word::from_letters(w.letters()[w.len() - p..].to_vec());
                free[word_rank(&tail, n)].2
            };
            next_raw.push(raw[parent] + block_log);
            log_dets.push(ifs.log_det(&w));
            words.push(w);
            matrices.push(m);
            parents.push(parent);
        }
        raw = next_raw;
        levels.push(TreeLevel {
            log_weights: normalize(&raw),
            words,
            parents,
            block_start: start,
            block_len,
            forced,
            log_block_sum,
            matrices,
            log_dets,
        });
    }
    let unreached = schedule.positions[next_pos..].to_vec();
    Ok(MeasureTree {
        s,
        p,
        k,
        mode,
        schedule,
        unreached,
        growth,
        certificate: cert.id.clone(),
        levels,
        n_letters: n,
    })
}

/// Lexicographic rank of a word among words of the same length.
fn word_rank(w: &Word, n: usize) -> usize {
    w.letters().iter().fold(0, |acc, &l| acc * n + (l as usize - 1))
}

fn normalize(raw: &[f64]) -> Vec<f64> {
    let total = log_sum_exp(raw);
    raw.iter().map(|x| x - total).collect()
}

/// Per-level energy terms `T_n = Σ_{𝕚∈𝒦_n} ν([𝕚])² / φ^t(A_𝕚)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub t: f64,
    pub s: f64,
    pub log_terms: Vec<f64>,
    pub terms: Vec<f64>,
    /// Three consecutive non-decreasing steps were seen.
    pub diverging: bool,
    pub rigor: crate::pressure::Rigor,
}

pub fn energy_partial_sum(tree: &MeasureTree, t: f64, n_max: usize) -> Result<EnergyReport> {
    if n_max > tree.depth() {
        return Err(Error::Index { index: n_max, available: tree.depth() });
    }
    let log_terms: Vec<f64> = tree.levels[..=n_max]
        .iter()
        .map(|level| -> Result<f64> {
            let mut acc = LogSumExp::new();
            for ((m, ld), lw) in level.matrices.iter().zip(&level.log_dets).zip(&level.log_weights) {
                acc.push(2.0 * lw - log_phi_of(m, *ld, t)?);
            }
            Ok(acc.value())
        })
        .collect::<Result<_>>()?;
    let mut run = 0;
    let mut diverging = false;
    for pair in log_terms.windows(2) {
        run = if pair[1] >= pair[0] { run + 1 } else { 0 };
        diverging |= run >= 3;
    }
    Ok(EnergyReport {
        t,
        s: tree.s,
        terms: log_terms.iter().map(|x| x.exp()).collect(),
        log_terms,
        diverging,
        rigor: crate::pressure::Rigor::Heuristic,
    })
}

/// One level of the comparison `Cⁿ Π_j Σ_Ω φ^s ≤ Σ_{𝒦_n} φ^s ≤ Π_j Σ_Ω φ^s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonLevel {
    pub level: usize,
    pub log_lower: f64,
    pub log_sum: f64,
    pub log_upper: f64,
    pub holds: bool,
}

/// Numerical check of the product comparison on a shrinking-mode tree.
pub fn product_comparison(tree: &MeasureTree, c_hat: f64) -> Result<Vec<ComparisonLevel>> {
    if matches!(tree.mode, Mode::Recurrence { .. }) {
        return Err(Error::invalid("mode", "the product comparison needs parent-independent block sets"));
    }
    let mut log_product = 0.0;
    tree.levels
        .iter()
        .enumerate()
        .map(|(level, l)| {
            log_product += l.log_block_sum;
            let mut acc = LogSumExp::new();
            for (m, ld) in l.matrices.iter().zip(&l.log_dets) {
                acc.push(log_phi_of(m, *ld, tree.s)?);
            }
            let log_sum = acc.value();
            let log_lower = level as f64 * c_hat.ln() + log_product;
            let slack = 1e-9 * log_product.abs().max(1.0);
            Ok(ComparisonLevel {
                level,
                log_lower,
                log_sum,
                log_upper: log_product,
                holds: log_lower <= log_sum + slack && log_sum <= log_product + slack,
            })
        })
        .collect()
}

/// Uniform translations in `[0, 1]^d`.
pub fn random_translations(n: usize, d: usize, seed: u64) -> Vec<Vector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| Vector::from_fn(d, |_, _| rng.random::<f64>())).collect()
}

/// Images of `n_points` uniform random words of length `word_len` under the
/// truncated projection `Σ_k A_{i₁}⋯A_{i_{k−1}} t_{i_k}`.
pub fn sample_attractor(ifs: &AffineIFS, translations: &[Vector], n_points: usize, word_len: usize, seed: u64) -> Result<Vec<Vector>> {
    if translations.len() != ifs.n_maps() {
        return Err(Error::invalid("translations", format!("expected {} vectors, got {}", ifs.n_maps(), translations.len())));
    }
    if let Some(t) = translations.iter().find(|t| t.len() != ifs.dim()) {
        return Err(Error::DimensionMismatch { expected: ifs.dim(), got: t.len() });
    }
    if word_len == 0 {
        return Err(Error::invalid("word_len", "must be positive"));
    }
    let n = ifs.n_maps();
    Ok((0..n_points as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let letters: Vec<usize> = (0..word_len).map(|_| rng.random_range(0..n)).collect();
            let mut x = Vector::zeros(ifs.dim());
            for &l in letters.iter().rev() {
                x = ifs.matrices()[l].clone() * x + &translations[l];
            }
            x
        })
        .collect())
}

/// Smallest word length with `γ_max^len < resolution`.
pub fn word_len_for(ifs: &AffineIFS, resolution: f64) -> usize {
    let g = crate::svf::gamma_bounds(ifs).gamma_max;
    ((resolution.ln() / g.ln()).floor() as usize + 1).max(1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxCount {
    pub epsilons: Vec<f64>,
    pub counts: Vec<usize>,
    /// Least-squares slope of `log count` against `log(1/ε)`.
    pub slope: f64,
    /// All points coincide.
    pub degenerate: bool,
    /// Fewer than 10³ points.
    pub undersampled: bool,
}

/// Occupied boxes of the grid anchored at the bounding-box minimum.
pub fn box_count(points: &[Vector], epsilons: &[f64]) -> Result<BoxCount> {
    let first = points.first().ok_or_else(|| Error::invalid("points", "no points"))?;
    let d = first.len();
    if let Some(p) = points.iter().find(|p| p.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, got: p.len() });
    }
    if epsilons.len() < 2 || epsilons.iter().any(|e| !(*e > 0.0)) || epsilons.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::invalid("epsilons", "need at least two positive, strictly descending scales"));
    }
    let mut min = first.clone();
    for p in points {
        min = min.inf(p);
    }
    let counts: Vec<usize> = epsilons
        .par_iter()
        .map(|&eps| {
            let boxes: HashSet<Vec<i64>> = points
                .iter()
                .map(|p| (p - &min).iter().map(|x| (x / eps).floor() as i64).collect())
                .collect();
            boxes.len()
        })
        .collect();
    let degenerate = points.iter().all(|p| p == first);
    let xs: Vec<f64> = epsilons.iter().map(|e| -e.ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
    let slope = if degenerate { 0.0 } else { least_squares_slope(&xs, &ys).unwrap_or(0.0) };
    Ok(BoxCount { epsilons: epsilons.to_vec(), counts, slope, degenerate, undersampled: points.len() < 1000 })
}

/// `x₁,…,x_d` per row with a header.
pub fn points_csv(points: &[Vector]) -> String {
    let d = points.first().map_or(0, |p| p.len());
    let mut out = (1..=d).map(|i| format!("x{i}")).collect::<Vec<_>>().join(",");
    out.push('\n');
    for p in points {
        let row: Vec<String> = p.iter().map(|x| format!("{x}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Scatter plot of planar points; `None` unless `d = 2`.
pub fn scatter_svg(points: &[Vector]) -> Option<String> {
    if points.is_empty() || points.iter().any(|p| p.len() != 2) {
        return None;
    }
    let (size, margin) = (600.0, 10.0);
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in points {
        for i in 0..2 {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-300);
    let scale = (size - 2.0 * margin) / span;
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    );
    for p in points {
        let x = margin + (p[0] - lo[0]) * scale;
        let y = size - margin - (p[1] - lo[1]) * scale;
        let _ = writeln!(svg, "<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"0.8\" fill=\"black\"/>");
    }
    svg.push_str("</svg>\n");
    Some(svg)
}
