//! Random inputs and property predicates shared by the property and
//! acceptance suites. Each predicate returns `Err(description)` on violation.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sadim_core::multilinear::{binomial, compound};
use sadim_core::pressure::{SpectrumTable, TargetProfile, DEFAULT_LETTER_BUDGET, DEFAULT_PRESSURE_BUDGET};
use sadim_core::svf::LongProduct;
use sadim_core::{gamma_bounds, phi, phi_word, AffineIFS, KVector, Matrix, ProductCache, Rational, TargetSequence, Word};

pub type Check = Result<(), String>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Reference singular values from nalgebra's SVD, descending.
pub fn svd_values(a: &Matrix) -> Vec<f64> {
    let mut v: Vec<f64> = a.clone().singular_values().iter().copied().collect();
    v.sort_by(|x, y| y.total_cmp(x));
    v
}

pub fn random_matrix(rng: &mut ChaCha8Rng, d: usize) -> Matrix {
    loop {
        let a = Matrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
        let sv = svd_values(&a);
        if sv[d - 1] > 1e-3 * sv[0] {
            return a;
        }
    }
}

/// Random contraction with spectral norm in `[lo, hi]`.
pub fn random_contraction(rng: &mut ChaCha8Rng, d: usize, lo: f64, hi: f64) -> Matrix {
    let a = random_matrix(rng, d);
    let target = rng.random_range(lo..hi);
    &a * (target / svd_values(&a)[0])
}

pub fn random_ifs(rng: &mut ChaCha8Rng, n: usize, d: usize) -> AffineIFS {
    AffineIFS::linear((0..n).map(|_| random_contraction(rng, d, 0.1, 0.45)).collect()).expect("valid random system")
}

pub fn random_word(rng: &mut ChaCha8Rng, n: usize, max_len: usize) -> Word {
    let len = rng.random_range(1..=max_len);
    Word::from_letters((0..len).map(|_| rng.random_range(1..=n as u8)).collect())
}

fn log_phi(a: &Matrix, t: f64) -> f64 {
    phi(a, t).expect("non-singular").ln()
}

pub fn check_submultiplicative(a: &Matrix, b: &Matrix, t: f64) -> Check {
    let lhs = log_phi(&(a * b), t);
    let rhs = log_phi(a, t) + log_phi(b, t);
    if lhs <= rhs + 1e-10 * rhs.abs().max(1.0) {
        Ok(())
    } else {
        Err(format!("log φ^{t}(AB) = {lhs} > {rhs}"))
    }
}

/// `φ^s(A_w)/φ^t(A_w) ≤ γ_max^{(s−t)|w|}` for `t < s`.
pub fn check_singular_ratio(ifs: &AffineIFS, w: &Word, t: f64, s: f64) -> Check {
    let a = ifs.product(w);
    let lhs = log_phi(&a, s) - log_phi(&a, t);
    let rhs = (s - t) * w.len() as f64 * gamma_bounds(ifs).gamma_max.ln();
    if lhs <= rhs + 1e-9 * rhs.abs().max(1.0) {
        Ok(())
    } else {
        Err(format!("ratio bound fails for {w}: {lhs} > {rhs}"))
    }
}

pub fn check_phi_monotone_in_t(a: &Matrix) -> Check {
    let d = a.nrows() as f64;
    let mut prev = f64::INFINITY;
    let mut t = 0.0;
    while t <= d + 1.0 {
        let v = log_phi(a, t);
        if v > prev + 1e-12 {
            return Err(format!("φ^t increased at t = {t}"));
        }
        prev = v;
        t += 0.01;
    }
    Ok(())
}

pub fn check_cached_phi(ifs: &AffineIFS, w: &Word, t: f64) -> Check {
    let cache = ProductCache::default();
    let cached = phi_word(ifs, w, t, &cache).map_err(|e| e.to_string())?.ln();
    let direct = log_phi(&ifs.product(w), t);
    if (cached.exp() - direct.exp()).abs() <= 1e-10 * direct.exp() {
        Ok(())
    } else {
        Err(format!("cached {cached} vs direct {direct}"))
    }
}

/// `a_{2n}/(2n) ≤ a_n/n`.
pub fn check_doubling(ifs: &AffineIFS, t: f64, n: usize) -> Check {
    let p_n = sadim_core::pressure_upper(ifs, t, n, DEFAULT_PRESSURE_BUDGET).map_err(|e| e.to_string())?;
    let p_2n = sadim_core::pressure_upper(ifs, t, 2 * n, DEFAULT_PRESSURE_BUDGET).map_err(|e| e.to_string())?;
    if p_2n <= p_n + 1e-12 * p_n.abs().max(1.0) {
        Ok(())
    } else {
        Err(format!("a_2n/2n = {p_2n} > a_n/n = {p_n} at n = {n}, t = {t}"))
    }
}

/// Upper pressure strictly decreasing and the square-pressure bound strictly
/// increasing along `ts`.
pub fn check_pressure_monotone(table: &SpectrumTable, ts: &[f64]) -> Check {
    for pair in ts.windows(2) {
        let (p0, p1) = (table.pressure_upper(pair[0]), table.pressure_upper(pair[1]));
        if p1 >= p0 {
            return Err(format!("P not decreasing between t = {} and {}: {p0} -> {p1}", pair[0], pair[1]));
        }
        let (q0, q1) = (table.pressure2_lower(pair[0]), table.pressure2_lower(pair[1]));
        if q1 <= q0 {
            return Err(format!("P₂ not increasing between t = {} and {}: {q0} -> {q1}", pair[0], pair[1]));
        }
    }
    Ok(())
}

pub fn random_pattern_spec(rng: &mut ChaCha8Rng, n: usize) -> TargetSequence {
    let pattern = random_word(rng, n, 4);
    let rate = [Rational::new(1, 2).unwrap(), Rational::integer(1), Rational::new(3, 2).unwrap()][rng.random_range(0..3)];
    TargetSequence::LinearPattern { pattern, rate }
}

/// `P − α` on a 50-point grid over `[0, seed]` changes sign exactly once.
pub fn check_single_sign_change(ifs: &AffineIFS, spec: &TargetSequence, depth: usize) -> Check {
    let table = SpectrumTable::build(ifs, depth, DEFAULT_PRESSURE_BUDGET).map_err(|e| e.to_string())?;
    let profile = TargetProfile::build(ifs, spec, 20, 60, DEFAULT_LETTER_BUDGET).map_err(|e| e.to_string())?;
    let g = gamma_bounds(ifs);
    let seed = ifs.dim() as f64 + (ifs.n_maps() as f64).ln() / g.gamma_max.ln().abs();
    let signs: Vec<bool> = (0..50)
        .map(|i| {
            let t = seed * i as f64 / 49.0;
            table.pressure_upper(t) - profile.alpha(t) > 0.0
        })
        .collect();
    let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
    if changes == 1 {
        Ok(())
    } else {
        Err(format!("{changes} sign changes"))
    }
}

pub fn random_kvector(rng: &mut ChaCha8Rng, d: usize, k: usize) -> KVector {
    KVector { d, k, coeffs: (0..binomial(d, k)).map(|_| rng.random_range(-1.0..1.0)).collect() }
}

/// `∗∗v = (−1)^{k(d−k)} v`.
pub fn check_hodge_twice(v: &KVector) -> Check {
    let sign = if (v.k * (v.d - v.k)).is_multiple_of(2) { 1.0 } else { -1.0 };
    let twice = v.hodge_star().hodge_star();
    let ok = twice.k == v.k && twice.coeffs.iter().zip(&v.coeffs).all(|(a, b)| (a - sign * b).abs() <= 1e-14);
    if ok {
        Ok(())
    } else {
        Err(format!("∗∗ mismatch for d = {}, k = {}", v.d, v.k))
    }
}

/// `‖A^∧k‖ = α₁⋯α_k` against the reference SVD.
pub fn check_compound_norm(a: &Matrix, k: usize) -> Check {
    let sv = svd_values(a);
    let expected: f64 = sv[..k].iter().product();
    let got = compound(a, k).map_err(|e| e.to_string())?.norm();
    if (got - expected).abs() <= 1e-9 * expected {
        Ok(())
    } else {
        Err(format!("‖A^∧{k}‖ = {got}, α₁⋯α_k = {expected}"))
    }
}

fn wedge_norm(a: &Matrix, k: usize) -> f64 {
    let d = a.nrows();
    match k {
        0 => 1.0,
        k if k == d => a.determinant().abs(),
        k => compound(a, k).expect("degree in range").norm(),
    }
}

/// `φ^s(A) = ‖A^∧m‖^{m+1−s} ‖A^∧(m+1)‖^{s−m}` with `m = ⌊s⌋`, `0 < s < d`.
pub fn check_phi_from_wedges(a: &Matrix, s: f64) -> Check {
    let m = s.floor() as usize;
    let from_wedges = wedge_norm(a, m).powf(m as f64 + 1.0 - s) * wedge_norm(a, m + 1).powf(s - m as f64);
    let direct = phi(a, s).map_err(|e| e.to_string())?.exp();
    if (from_wedges - direct).abs() <= 1e-9 * direct {
        Ok(())
    } else {
        Err(format!("wedge form {from_wedges} vs φ^{s} = {direct}"))
    }
}

/// `α` estimates are non-decreasing in `t` and sit inside the
/// `γ_max`/`γ_min` sandwich scaled by the extreme length ratios.
pub fn check_alpha_sandwich(ifs: &AffineIFS, spec: &TargetSequence, ts: &[f64]) -> Check {
    let (k_burn, k_max) = (10, 80);
    let profile = TargetProfile::build(ifs, spec, k_burn, k_max, DEFAULT_LETTER_BUDGET).map_err(|e| e.to_string())?;
    let ratios: Vec<f64> = profile.lengths().iter().enumerate().map(|(i, &l)| l as f64 / (k_burn + i) as f64).collect();
    let (rmin, rmax) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    let g = gamma_bounds(ifs);
    let mut prev = -1.0;
    for &t in ts {
        let a = profile.alpha(t);
        if a < prev - 1e-12 {
            return Err(format!("α decreased at t = {t}"));
        }
        let lo = t * g.gamma_max.ln().abs() * rmin;
        let hi = t * g.gamma_min.ln().abs() * rmax;
        if a < lo - 1e-9 || a > hi + 1e-9 {
            return Err(format!("α({t}) = {a} outside [{lo}, {hi}]"));
        }
        prev = a;
    }
    Ok(())
}

/// The compensated long product agrees with a direct product, within the
/// `ε·α₁` absolute accuracy of the reference SVD.
pub fn check_long_product(ifs: &AffineIFS, w: &Word) -> Check {
    let mut lp = LongProduct::new(ifs);
    lp.advance_to(w);
    let direct: Vec<f64> = svd_values(&ifs.product(w)).iter().map(|x| x.ln()).collect();
    for (a, b) in lp.log_singular_values().iter().zip(&direct) {
        let tol = 1e-12 * (direct[0] - b).exp() + 1e-10;
        if (a - b).abs() > tol {
            return Err(format!("log singular values {a} vs {b}"));
        }
    }
    Ok(())
}
