//! Exterior powers, the Hodge star, the flag representation `Â` and
//! proximality / irreducibility checks.
//!
//! Bases of `∧^k ℝ^d` are the lexicographically ordered `k`-subsets of
//! `{1, …, d}`; every sign below follows from that order.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::svf::{raw_singular_values, AffineIFS, Matrix, Vector};
use crate::symbolic::{word_at, word_count, Word};

/// Default relative gap below which eigenvalue moduli count as equal.
pub const DEFAULT_PROXIMALITY_TOL: f64 = 1e-6;

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Lexicographically ordered `k`-subsets of `{0, …, d−1}`.
pub fn subsets(d: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, d: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..d {
            if d - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, d, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::with_capacity(binomial(d, k));
    rec(0, d, k, &mut Vec::with_capacity(k), &mut out);
    out
}

fn subset_index(d: usize, k: usize, subset: &[usize]) -> usize {
    // Rank of a sorted subset in lexicographic order.
    let mut rank = 0;
    let mut prev = 0;
    for (pos, &s) in subset.iter().enumerate() {
        for skipped in prev..s {
            rank += binomial(d - skipped - 1, k - pos - 1);
        }
        prev = s + 1;
    }
    rank
}

/// Parity of inversions of a sequence of distinct indices.
fn permutation_sign(seq: &[usize]) -> f64 {
    let mut inversions = 0;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Matrix of `k × k` minors, for any `0 ≤ k ≤ d`.
pub(crate) fn compound_raw(a: &Matrix, k: usize) -> Matrix {
    let d = a.nrows();
    let sets = subsets(d, k);
    let m = sets.len();
    let mut out = DMatrix::zeros(m, m);
    for (i, rows) in sets.iter().enumerate() {
        for (j, cols) in sets.iter().enumerate() {
            out[(i, j)] = if k == 0 {
                1.0
            } else {
                DMatrix::from_fn(k, k, |r, c| a[(rows[r], cols[c])]).determinant()
            };
        }
    }
    out
}

/// `A^{∧k}` as a `C(d,k) × C(d,k)` matrix in the lexicographic basis.
#[derive(Debug, Clone, PartialEq)]
pub struct CompoundMatrix {
    pub k: usize,
    pub matrix: Matrix,
}

impl CompoundMatrix {
    /// Operator norm, equal to `α₁(A)⋯α_k(A)`.
    pub fn norm(&self) -> f64 {
        raw_singular_values(&self.matrix)[0]
    }
}

fn check_degree(d: usize, k: usize) -> Result<()> {
    if d < 2 || k < 1 || k > d - 1 {
        return Err(Error::Degree { k, min: 1, max: d.saturating_sub(1) });
    }
    Ok(())
}

/// The `k`-th compound (exterior power) of `A`, `1 ≤ k ≤ d − 1`.
pub fn compound(a: &Matrix, k: usize) -> Result<CompoundMatrix> {
    check_degree(a.nrows(), k)?;
    Ok(CompoundMatrix { k, matrix: compound_raw(a, k) })
}

/// An element of `∧^k ℝ^d` in the lexicographic basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KVector {
    pub d: usize,
    pub k: usize,
    pub coeffs: Vec<f64>,
}

impl KVector {
    pub fn zero(d: usize, k: usize) -> Self {
        KVector { d, k, coeffs: vec![0.0; binomial(d, k)] }
    }

    /// Basis element `e_{i₁}∧⋯∧e_{i_k}` (0-based, sorted indices).
    pub fn basis(d: usize, indices: &[usize]) -> Self {
        let mut v = Self::zero(d, indices.len());
        v.coeffs[subset_index(d, indices.len(), indices)] = 1.0;
        v
    }

    /// `u₁ ∧ ⋯ ∧ u_k`; coordinates are the `k × k` minors of `[u₁ ⋯ u_k]`.
    pub fn decomposable(vectors: &[Vector]) -> Self {
        let k = vectors.len();
        let d = vectors.first().map(|v| v.len()).unwrap_or(0);
        let coeffs = subsets(d, k)
            .iter()
            .map(|rows| {
                if k == 0 {
                    1.0
                } else {
                    DMatrix::from_fn(k, k, |r, c| vectors[c][rows[r]]).determinant()
                }
            })
            .collect();
        KVector { d, k, coeffs }
    }

    /// Exterior product `self ∧ other`.
    pub fn wedge(&self, other: &KVector) -> Result<KVector> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: other.d });
        }
        let d = self.d;
        let k = self.k + other.k;
        if k > d {
            // Degree above d: the exterior power is the zero space.
            return Ok(KVector { d, k, coeffs: Vec::new() });
        }
        let left = subsets(d, self.k);
        let right = subsets(d, other.k);
        let mut out = KVector::zero(d, k);
        for (i, a) in left.iter().enumerate() {
            let ca = self.coeffs[i];
            if ca == 0.0 {
                continue;
            }
            for (j, b) in right.iter().enumerate() {
                let cb = other.coeffs[j];
                if cb == 0.0 || a.iter().any(|x| b.contains(x)) {
                    continue;
                }
                let mut seq = a.clone();
                seq.extend_from_slice(b);
                let sign = permutation_sign(&seq);
                seq.sort_unstable();
                out.coeffs[subset_index(d, k, &seq)] += sign * ca * cb;
            }
        }
        Ok(out)
    }

    /// Hodge star `∗: ∧^k → ∧^{d−k}`, `∗e_I = sgn(I, Iᶜ) e_{Iᶜ}`.
    pub fn hodge_star(&self) -> KVector {
        let d = self.d;
        let mut out = KVector::zero(d, d - self.k);
        for (i, set) in subsets(d, self.k).iter().enumerate() {
            let complement: Vec<usize> = (0..d).filter(|x| !set.contains(x)).collect();
            let mut seq = set.clone();
            seq.extend_from_slice(&complement);
            out.coeffs[subset_index(d, d - self.k, &complement)] += permutation_sign(&seq) * self.coeffs[i];
        }
        out
    }

    /// `⟨v, w⟩_k = ∗(v ∧ ∗w)`.
    pub fn inner(&self, other: &KVector) -> Result<f64> {
        if self.k != other.k {
            return Err(Error::DimensionMismatch { expected: self.k, got: other.k });
        }
        let top = self.wedge(&other.hodge_star())?;
        Ok(top.hodge_star().coeffs[0])
    }

    pub fn norm(&self) -> Result<f64> {
        Ok(self.inner(self)?.max(0.0).sqrt())
    }

    /// `A^{∧k} v`.
    pub fn apply(&self, a: &Matrix) -> Result<KVector> {
        if a.nrows() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: a.nrows() });
        }
        let c = compound_raw(a, self.k);
        let v = &c * Vector::from_column_slice(&self.coeffs);
        Ok(KVector { d: self.d, k: self.k, coeffs: v.iter().copied().collect() })
    }
}

pub fn hodge_star(v: &KVector) -> KVector {
    v.hodge_star()
}

pub fn wedge_inner(v: &KVector, w: &KVector) -> Result<f64> {
    v.inner(w)
}

/// `dim Ŵ = ∏_{k=1}^{d−1} C(d, k)`.
pub fn flag_dimension(d: usize) -> usize {
    (1..d).map(|k| binomial(d, k)).product()
}

/// Kronecker product of a list of vectors, first factor most significant.
pub fn tensor(factors: &[Vec<f64>]) -> Vec<f64> {
    factors.iter().fold(vec![1.0], |acc, f| {
        let mut out = Vec::with_capacity(acc.len() * f.len());
        for a in &acc {
            for b in f {
                out.push(a * b);
            }
        }
        out
    })
}

/// The flag vector `u₁ ⊗ (u₁∧u₂) ⊗ ⋯ ⊗ (u₁∧⋯∧u_{d−1})` in `Ŵ`.
pub fn flag_vector(us: &[Vector]) -> Result<Vec<f64>> {
    let d = us.first().map(|u| u.len()).unwrap_or(0);
    if d < 2 || us.len() < d - 1 {
        return Err(Error::DimensionMismatch { expected: d.saturating_sub(1), got: us.len() });
    }
    let factors: Vec<Vec<f64>> = (1..d).map(|k| KVector::decomposable(&us[..k]).coeffs).collect();
    Ok(tensor(&factors))
}

/// `Â x = (A^{∧1} ⊗ ⋯ ⊗ A^{∧(d−1)}) x` in the product basis of `Ŵ`.
pub fn flag_apply(a: &Matrix, x: &[f64]) -> Result<Vec<f64>> {
    let d = a.nrows();
    let dim = flag_dimension(d);
    if x.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: x.len() });
    }
    if d == 1 {
        return Ok(x.to_vec());
    }
    let dims: Vec<usize> = (1..d).map(|k| binomial(d, k)).collect();
    let mut cur = x.to_vec();
    for (mode, k) in (1..d).enumerate() {
        let c = compound_raw(a, k);
        let m = dims[mode];
        let inner: usize = dims[mode + 1..].iter().product();
        let outer: usize = dims[..mode].iter().product();
        let mut next = vec![0.0; dim];
        for o in 0..outer {
            for i in 0..m {
                for j in 0..m {
                    let cij = c[(i, j)];
                    if cij == 0.0 {
                        continue;
                    }
                    let src = (o * m + j) * inner;
                    let dst = (o * m + i) * inner;
                    for r in 0..inner {
                        next[dst + r] += cij * cur[src + r];
                    }
                }
            }
        }
        cur = next;
    }
    Ok(cur)
}

/// Evidence that a product has `d` distinct eigenvalue moduli.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProximalityWitness {
    pub word: Word,
    pub eigenvalue_magnitudes: Vec<f64>,
    pub min_gap: f64,
    pub tolerance: f64,
}

/// Eigenvalue moduli in descending order.
pub fn eigenvalue_magnitudes(a: &Matrix) -> Result<Vec<f64>> {
    let d = a.nrows();
    let mut mags: Vec<f64> = match d {
        1 => vec![a[(0, 0)].abs()],
        2 => {
            let tr = a[(0, 0)] + a[(1, 1)];
            let det = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
            let disc = tr * tr - 4.0 * det;
            if disc < 0.0 {
                let m = det.abs().sqrt();
                vec![m, m]
            } else if tr == 0.0 {
                let m = 0.5 * disc.sqrt();
                vec![m, m]
            } else {
                // Stable quadratic roots.
                let r1 = 0.5 * (tr + tr.signum() * disc.sqrt());
                vec![r1.abs(), (det / r1).abs()]
            }
        }
        _ => {
            let scale = a.amax().max(f64::MIN_POSITIVE);
            let schur = (a / scale).try_schur(1e-15, 10_000).ok_or(Error::EigenSolver)?;
            schur.complex_eigenvalues().iter().map(|z| z.norm() * scale).collect()
        }
    };
    mags.sort_by(|x, y| y.total_cmp(x));
    Ok(mags)
}

fn min_relative_gap(mags: &[f64]) -> f64 {
    if mags.len() < 2 {
        return 1.0;
    }
    mags.windows(2)
        .map(|w| if w[0] > 0.0 { (w[0] - w[1]) / w[0] } else { 0.0 })
        .fold(f64::INFINITY, f64::min)
}

/// A witness iff every consecutive relative gap of eigenvalue moduli exceeds
/// `tol`. The returned witness carries the empty word.
pub fn is_fully_proximal(a: &Matrix, tol: f64) -> Result<Option<ProximalityWitness>> {
    let mags = eigenvalue_magnitudes(a)?;
    let gap = min_relative_gap(&mags);
    Ok((gap > tol).then(|| ProximalityWitness {
        word: Word::empty(),
        eigenvalue_magnitudes: mags,
        min_gap: gap,
        tolerance: tol,
    }))
}

/// First fully proximal product, searching `Σ₁, Σ₂, …, Σ_{max_len}` in
/// lexicographic-by-length order.
pub fn find_proximal_word(ifs: &AffineIFS, max_len: usize, tol: f64, budget: u128) -> Result<Option<ProximalityWitness>> {
    if max_len < 1 {
        return Err(Error::invalid("max_len", "must be at least 1"));
    }
    let n = ifs.n_maps();
    let mut spent: u128 = 0;
    for len in 1..=max_len {
        let count = word_count(n, len, budget)?;
        spent += count;
        if spent > budget {
            return Err(Error::Budget { requested: spent, budget });
        }
        let found = (0..count as u64)
            .into_par_iter()
            .map(|idx| {
                let w = word_at(n, len, idx as u128);
                let prod = ifs.product(&w);
                is_fully_proximal(&prod, tol).map(|o| o.map(|mut wit| {
                    wit.word = w;
                    wit
                }))
            })
            .find_first(|r| !matches!(r, Ok(None)));
        match found {
            Some(Ok(w)) => return Ok(w),
            Some(Err(e)) => return Err(e),
            None => {}
        }
    }
    Ok(None)
}

/// Limit directions of `(A^{∧k})^n` for every degree and their tensor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopFlag {
    pub per_degree: Vec<Vec<f64>>,
    pub flag: Vec<f64>,
    pub iterations: Vec<usize>,
}

fn normalize_sign(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let pivot = v
        .iter()
        .copied()
        .fold(0.0f64, |best, x| if x.abs() > best.abs() { x } else { best });
    let s = if pivot < 0.0 { -1.0 } else { 1.0 } / norm;
    v.iter_mut().for_each(|x| *x *= s);
}

/// Power iteration on each compound `A^{∧k}`; the result is the unit vector
/// `G₁(A) ⊗ ⋯ ⊗ G_{d−1}(A)` in `Ŵ` (up to sign per factor).
pub fn top_flag(a: &Matrix, iterations: usize) -> Result<TopFlag> {
    let d = a.nrows();
    if d < 2 {
        return Err(Error::Degree { k: 1, min: 1, max: 0 });
    }
    if is_fully_proximal(a, DEFAULT_PROXIMALITY_TOL)?.is_none() {
        return Err(Error::Convergence {
            iterations: 0,
            what: "matrix is not fully proximal; top flag undefined".into(),
        });
    }
    let mut per_degree = Vec::with_capacity(d - 1);
    let mut used = Vec::with_capacity(d - 1);
    for k in 1..d {
        let c = compound_raw(a, k);
        let m = c.nrows();
        // Deterministic generic start vector.
        let mut v = Vector::from_fn(m, |i, _| 1.0 + std::f64::consts::FRAC_1_PI * (i as f64 + 1.0).sqrt());
        let mut vs: Vec<f64> = v.iter().copied().collect();
        normalize_sign(&mut vs);
        let mut converged = None;
        for it in 1..=iterations {
            v = &c * Vector::from_column_slice(&vs);
            let mut next: Vec<f64> = v.iter().copied().collect();
            normalize_sign(&mut next);
            let delta = next.iter().zip(&vs).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            vs = next;
            if delta < 1e-15 {
                converged = Some(it);
                break;
            }
        }
        match converged {
            Some(it) => used.push(it),
            None => {
                return Err(Error::Convergence {
                    iterations,
                    what: format!("power iteration on degree {k} did not settle"),
                })
            }
        }
        per_degree.push(vs);
    }
    let flag = tensor(&per_degree);
    Ok(TopFlag { per_degree, flag, iterations: used })
}

/// Outcome of the irreducibility semi-decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IrreducibilityVerdict {
    IrreducibleCertified,
    Inconclusive,
}

/// Numerical rank of a set of row vectors.
fn numerical_rank(rows: &[Vec<f64>], width: usize) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(rows.len(), width, |i, j| rows[i][j]);
    let sv = m.singular_values();
    let top = sv.iter().copied().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > top * 1e-10).count()
}

/// Semi-decision for `k`-irreducibility of `{A_i^{∧k}}`.
///
/// Collects the products `A_w^{∧k}` for `|w| ≤ orbit_len` (including the
/// identity). If they span the full matrix algebra of `∧^k ℝ^d`, no proper
/// subspace is invariant under all generators (Burnside), and the verdict
/// is a certificate. Otherwise the result is inconclusive.
pub fn irreducibility_semidecision(ifs: &AffineIFS, k: usize, orbit_len: usize) -> Result<IrreducibilityVerdict> {
    let d = ifs.dim();
    check_degree(d, k)?;
    let m = binomial(d, k);
    let gens: Vec<Matrix> = ifs.matrices().iter().map(|a| compound_raw(a, k)).collect();
    let target = m * m;
    let flatten = |x: &Matrix| -> Vec<f64> {
        let s = x.amax().max(f64::MIN_POSITIVE);
        x.iter().map(|v| v / s).collect()
    };
    let mut layer = vec![Matrix::identity(m, m)];
    let mut basis: Vec<Vec<f64>> = vec![flatten(&layer[0])];
    for _ in 0..orbit_len {
        let mut next = Vec::with_capacity(layer.len() * gens.len());
        for p in &layer {
            for g in &gens {
                let q = p * g;
                let mut candidate = basis.clone();
                candidate.push(flatten(&q));
                if numerical_rank(&candidate, target) > basis.len() {
                    basis = candidate;
                    if basis.len() == target {
                        return Ok(IrreducibilityVerdict::IrreducibleCertified);
                    }
                }
                next.push(q);
            }
        }
        layer = next;
    }
    Ok(if basis.len() == target {
        IrreducibilityVerdict::IrreducibleCertified
    } else {
        IrreducibilityVerdict::Inconclusive
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn diag(v: &[f64]) -> Matrix {
        Matrix::from_diagonal(&Vector::from_column_slice(v))
    }

    fn rotation(deg: f64, scale: f64) -> Matrix {
        let a = deg.to_radians();
        Matrix::from_row_slice(2, 2, &[a.cos(), -a.sin(), a.sin(), a.cos()]) * scale
    }

    #[test]
    fn subset_ranks_are_lexicographic() {
        for d in 1..=6 {
            for k in 0..=d {
                for (i, s) in subsets(d, k).iter().enumerate() {
                    assert_eq!(subset_index(d, k, s), i);
                }
            }
        }
    }

    #[test]
    fn compound_examples() {
        let a = Matrix::from_row_slice(3, 3, &[0.3, 0.1, -0.2, 0.05, 0.4, 0.1, 0.2, -0.1, 0.25]);
        assert_eq!(compound(&a, 1).unwrap().matrix, a);
        let c = compound(&diag(&[2.0, 3.0, 5.0]), 2).unwrap().matrix;
        assert_eq!(c, diag(&[6.0, 10.0, 15.0]));
        let c2 = compound(&a, 2).unwrap().matrix;
        assert_relative_eq!(c2.determinant(), a.determinant().powi(2), max_relative = 1e-12);
        assert!(matches!(compound(&a, 3), Err(Error::Degree { .. })));
        assert!(matches!(compound(&a, 0), Err(Error::Degree { .. })));
    }

    #[test]
    fn hodge_examples() {
        let e12 = KVector::basis(3, &[0, 1]);
        assert_eq!(e12.hodge_star(), KVector::basis(3, &[2]));
        let e13 = KVector::basis(3, &[0, 2]);
        let mut neg_e2 = KVector::basis(3, &[1]);
        neg_e2.coeffs[1] = -1.0;
        assert_eq!(e13.hodge_star(), neg_e2);
        let e2 = KVector::basis(2, &[1]);
        assert_eq!(e2.hodge_star().coeffs, vec![-1.0, 0.0]);
    }

    #[test]
    fn wedge_inner_examples() {
        let e12 = KVector::basis(3, &[0, 1]);
        let e13 = KVector::basis(3, &[0, 2]);
        assert_eq!(wedge_inner(&e12, &e12).unwrap(), 1.0);
        assert_eq!(wedge_inner(&e12, &e13).unwrap(), 0.0);
        let u = [Vector::from_vec(vec![1.0, 2.0, 0.5, -1.0]), Vector::from_vec(vec![0.3, -0.7, 1.1, 0.2])];
        let w = [Vector::from_vec(vec![-0.4, 0.9, 0.0, 1.3]), Vector::from_vec(vec![0.8, 0.1, -0.6, 0.5])];
        let gram = DMatrix::from_fn(2, 2, |i, j| u[i].dot(&w[j])).determinant();
        let lhs = wedge_inner(&KVector::decomposable(&u), &KVector::decomposable(&w)).unwrap();
        assert_relative_eq!(lhs, gram, max_relative = 1e-12);
    }

    #[test]
    fn flag_apply_examples() {
        let x: Vec<f64> = (0..flag_dimension(3)).map(|i| i as f64 * 0.1 - 0.3).collect();
        let id = Matrix::identity(3, 3);
        assert_eq!(flag_apply(&id, &x).unwrap(), x);
        let y = flag_apply(&diag(&[0.5, 0.25]), &[1.0, 0.0]).unwrap();
        assert_eq!(y, vec![0.5, 0.0]);
        let (a, b, c) = (0.5, 0.3, 0.2);
        let e = [Vector::from_vec(vec![1.0, 0.0, 0.0]), Vector::from_vec(vec![0.0, 1.0, 0.0])];
        let f = flag_vector(&e).unwrap();
        let g = flag_apply(&diag(&[a, b, c]), &f).unwrap();
        for (gi, fi) in g.iter().zip(&f) {
            assert_relative_eq!(*gi, a * a * b * fi, max_relative = 1e-14);
        }
        assert!(flag_apply(&id, &[1.0]).is_err());
    }

    #[test]
    fn flag_apply_preserves_flags() {
        let a = Matrix::from_row_slice(3, 3, &[0.3, 0.1, -0.2, 0.05, 0.4, 0.1, 0.2, -0.1, 0.25]);
        let us = [Vector::from_vec(vec![1.0, 0.2, -0.5]), Vector::from_vec(vec![0.1, 1.0, 0.3])];
        let image = flag_apply(&a, &flag_vector(&us).unwrap()).unwrap();
        let expected = flag_vector(&[&a * &us[0], &a * &us[1]]).unwrap();
        for (x, y) in image.iter().zip(&expected) {
            assert_relative_eq!(*x, *y, epsilon = 1e-14);
        }
    }

    #[test]
    fn proximality_examples() {
        let w = is_fully_proximal(&diag(&[0.4, 0.2]), DEFAULT_PROXIMALITY_TOL).unwrap().unwrap();
        assert_relative_eq!(w.min_gap, 0.5, max_relative = 1e-12);
        assert!(is_fully_proximal(&rotation(30.0, 1.0 / 3.0), DEFAULT_PROXIMALITY_TOL).unwrap().is_none());
        let swap = Matrix::from_row_slice(2, 2, &[0.0, 0.4, 0.2, 0.0]);
        assert!(is_fully_proximal(&swap, DEFAULT_PROXIMALITY_TOL).unwrap().is_none());
        let mags = eigenvalue_magnitudes(&swap).unwrap();
        assert_relative_eq!(mags[0], 0.08f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn eigen_moduli_in_three_dimensions() {
        let a = Matrix::from_row_slice(3, 3, &[0.4, 1.0, 0.0, 0.0, 0.3, 2.0, 0.0, 0.0, -0.1]);
        let mags = eigenvalue_magnitudes(&a).unwrap();
        for (m, e) in mags.iter().zip([0.4, 0.3, 0.1]) {
            assert_relative_eq!(*m, e, max_relative = 1e-10);
        }
    }

    #[test]
    fn proximal_search_examples() {
        let diag_pair = AffineIFS::linear(vec![diag(&[0.4, 0.2]), diag(&[0.3, 0.1])]).unwrap();
        let w = find_proximal_word(&diag_pair, 3, DEFAULT_PROXIMALITY_TOL, 1_000_000).unwrap().unwrap();
        assert_eq!(w.word.len(), 1);
        let conformal = AffineIFS::linear(vec![rotation(30.0, 0.4), rotation(75.0, 0.3)]).unwrap();
        assert!(find_proximal_word(&conformal, 6, DEFAULT_PROXIMALITY_TOL, 1_000_000).unwrap().is_none());
        let mixed = AffineIFS::linear(vec![rotation(30.0, 0.45), diag(&[0.45, 0.1])]).unwrap();
        let w = find_proximal_word(&mixed, 3, DEFAULT_PROXIMALITY_TOL, 1_000_000).unwrap().unwrap();
        assert!(w.word.len() <= 3);
        assert!(find_proximal_word(&mixed, 0, DEFAULT_PROXIMALITY_TOL, 100).is_err());
    }

    #[test]
    fn top_flag_examples() {
        let f = top_flag(&diag(&[0.4, 0.2]), 1000).unwrap();
        assert_relative_eq!(f.flag[0], 1.0);
        assert_relative_eq!(f.flag[1], 0.0, epsilon = 1e-12);
        let f = top_flag(&diag(&[0.4, 0.3, 0.1]), 5000).unwrap();
        let expected = flag_vector(&[Vector::from_vec(vec![1.0, 0.0, 0.0]), Vector::from_vec(vec![0.0, 1.0, 0.0])]).unwrap();
        for (x, y) in f.flag.iter().zip(&expected) {
            assert_relative_eq!(*x, *y, epsilon = 1e-10);
        }
        assert!(top_flag(&rotation(30.0, 0.4), 1000).is_err());
    }

    #[test]
    fn irreducibility_examples() {
        let generic = AffineIFS::linear(vec![
            Matrix::from_row_slice(2, 2, &[0.3, 0.12, -0.07, 0.2]),
            Matrix::from_row_slice(2, 2, &[0.1, -0.2, 0.25, 0.15]),
        ])
        .unwrap();
        assert_eq!(irreducibility_semidecision(&generic, 1, 3).unwrap(), IrreducibilityVerdict::IrreducibleCertified);
        let diagonal = AffineIFS::linear(vec![diag(&[0.4, 0.2]), diag(&[0.3, 0.25])]).unwrap();
        assert_eq!(irreducibility_semidecision(&diagonal, 1, 3).unwrap(), IrreducibilityVerdict::Inconclusive);
        assert!(matches!(irreducibility_semidecision(&diagonal, 2, 3), Err(Error::Degree { .. })));
    }
}
