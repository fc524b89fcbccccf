//! Root solvers: the affinity dimension (`P(t) = 0`), the shrinking-target
//! exponent `s₀` (`P(t) = α(t)`) and the recurrence exponent `r₀`
//! (`(1−β)P(t) = βP₂(t)`).
//!
//! Each solver runs two bisections over a spectrum table of fixed depth.
//! The upper-bound function gives the high end of the root bracket. With a
//! certificate policy the lower-bound function gives the low end; without
//! one the low end is only the bisection partner of the high end.

use serde::{Deserialize, Serialize};

use crate::condition::{certify_escalating, CertifyOptions};
use crate::error::{Error, Result};
use crate::numerics::bisect_sign;
use crate::pressure::{alpha_from_profile, beta_estimate, Rigor, SpectrumTable, TargetProfile, DEFAULT_LETTER_BUDGET, DEFAULT_PRESSURE_BUDGET};
use crate::svf::{gamma_bounds, AffineIFS};
use crate::symbolic::{RateClass, ReturnRule, TargetSequence};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    pub tol: f64,
    /// Starting depth; `None` picks the largest `n` with `N^n ≤ budget`.
    pub depth: Option<usize>,
    pub max_depth: usize,
    pub depth_escalate: bool,
    /// Cap on `N^n`.
    pub budget: u128,
    pub max_iter: usize,
    /// When set, lower ends come from certified lower bounds.
    pub certify: Option<CertifyOptions>,
    /// Range of `k` used for `α`; `k_burn` defaults to `k_max/2`.
    pub k_burn: Option<usize>,
    pub k_max: usize,
    /// Range of `n` used for `β` on tabulated rules.
    pub n_burn: Option<usize>,
    pub n_max: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-4,
            depth: None,
            max_depth: 24,
            depth_escalate: false,
            budget: DEFAULT_PRESSURE_BUDGET,
            max_iter: 200,
            certify: None,
            k_burn: None,
            k_max: 10_000,
            n_burn: None,
            n_max: 1000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Affinity,
    ShrinkingTarget,
    Recurrence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub rate: RateClass,
    /// True when the rate came from data rather than the declaration.
    pub estimated: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub depths: Vec<usize>,
    pub upper_seed: f64,
    pub bisection_steps: usize,
    pub certificate_ids: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_at_root: Option<crate::pressure::AlphaEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionResult {
    pub quantity: Quantity,
    pub root_bracket: [f64; 2],
    /// `min(d, midpoint of the bracket)`.
    pub reported: f64,
    /// Low end of the bracket exceeds `d`.
    pub positive_lebesgue: bool,
    pub rigor: Rigor,
    /// Bracket width reached `tol`.
    pub converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<Classification>,
    pub diagnostics: Diagnostics,
}

impl DimensionResult {
    pub fn width(&self) -> f64 {
        self.root_bracket[1] - self.root_bracket[0]
    }

    pub fn contains(&self, x: f64) -> bool {
        self.root_bracket[0] <= x && x <= self.root_bracket[1]
    }

    fn finish(quantity: Quantity, d: usize, lo: f64, hi: f64, rigor: Rigor, tol: f64, diagnostics: Diagnostics) -> Self {
        let lo = lo.max(0.0);
        let hi = hi.max(lo);
        DimensionResult {
            quantity,
            root_bracket: [lo, hi],
            reported: (0.5 * (lo + hi)).min(d as f64),
            positive_lebesgue: lo > d as f64,
            rigor,
            converged: hi - lo <= tol,
            classification: None,
            diagnostics,
        }
    }
}

/// Equation being solved, as a pair of bound functions over one table.
enum Target<'a> {
    Affinity,
    Shrinking { profile: &'a TargetProfile },
    Recurrence { beta: f64 },
}

impl Target<'_> {
    fn upper(&self, table: &SpectrumTable, t: f64) -> f64 {
        match self {
            Target::Affinity => table.pressure_upper(t),
            Target::Shrinking { profile } => table.pressure_upper(t) - profile.alpha(t),
            Target::Recurrence { beta } => {
                let p2 = if *beta > 0.0 { table.pressure2_lower(t) } else { 0.0 };
                (1.0 - beta) * table.pressure_upper(t) - beta * p2
            }
        }
    }

    fn lower(&self, table: &SpectrumTable, t: f64, cert: &crate::condition::BufferCertificate) -> Result<f64> {
        Ok(match self {
            Target::Affinity => table.pressure_lower(t, cert)?,
            Target::Shrinking { profile } => table.pressure_lower(t, cert)? - profile.alpha(t),
            Target::Recurrence { beta } => {
                let p2 = if *beta > 0.0 { table.pressure2_upper(t, cert)? } else { 0.0 };
                (1.0 - beta) * table.pressure_lower(t, cert)? - beta * p2
            }
        })
    }
}

fn auto_depth(n_maps: usize, budget: u128, max_depth: usize) -> usize {
    let mut n = 1;
    while n < max_depth && (n_maps as u128).pow(n as u32 + 1) <= budget {
        n += 1;
    }
    n
}

fn upper_seed(ifs: &AffineIFS) -> f64 {
    let g = gamma_bounds(ifs);
    ifs.dim() as f64 + (ifs.n_maps() as f64).ln() / g.gamma_max.ln().abs()
}

fn solve(ifs: &AffineIFS, target: &Target, quantity: Quantity, opts: &SolverOptions) -> Result<DimensionResult> {
    if !(opts.tol > 0.0) {
        return Err(Error::invalid("tol", "must be positive"));
    }
    let cap = auto_depth(ifs.n_maps(), opts.budget, opts.max_depth);
    let mut depth = match (opts.depth, opts.depth_escalate) {
        (Some(n), _) => n,
        (None, false) => cap,
        (None, true) => cap.min(6),
    };
    if depth == 0 {
        return Err(Error::invalid("depth", "must be at least 1"));
    }
    let seed = upper_seed(ifs);
    let mut diagnostics = Diagnostics { upper_seed: seed, ..Diagnostics::default() };
    loop {
        let table = SpectrumTable::build(ifs, depth, opts.budget)?;
        diagnostics.depths.push(depth);
        if target.upper(&table, seed) > 0.0 {
            return Err(Error::Convergence { iterations: 0, what: format!("upper bound still positive at seed t = {seed}") });
        }
        let mut steps = 0;
        let (hi_lo, hi) = bisect_sign(0.0, seed, opts.tol / 4.0, opts.max_iter, |t| {
            steps += 1;
            target.upper(&table, t) > 0.0
        });
        let (lo, rigor) = match &opts.certify {
            None => (hi_lo, Rigor::RigorousUpperOnly),
            Some(copts) => {
                let mut failure = None;
                let mut ids = Vec::new();
                let (lo, _) = bisect_sign(0.0, hi, opts.tol / 4.0, opts.max_iter, |t| {
                    steps += 1;
                    if failure.is_some() {
                        return false;
                    }
                    match certify_escalating(ifs, t, copts).and_then(|c| {
                        ids.push(c.id.clone());
                        target.lower(&table, t, &c)
                    }) {
                        Ok(v) => v > 0.0,
                        Err(e) => {
                            failure = Some(e);
                            false
                        }
                    }
                });
                for id in ids {
                    if !diagnostics.certificate_ids.contains(&id) {
                        diagnostics.certificate_ids.push(id);
                    }
                }
                match failure {
                    None => (lo, Rigor::RigorousBoth),
                    Some(e) => {
                        diagnostics.warnings.push(format!("certification failed ({e}); low end is heuristic"));
                        (hi_lo, Rigor::RigorousUpperOnly)
                    }
                }
            }
        };
        diagnostics.bisection_steps += steps;
        let done = hi - lo <= opts.tol;
        if done || !opts.depth_escalate || depth >= cap {
            if !done && opts.depth_escalate {
                diagnostics.warnings.push(format!("depth cap {cap} reached before tolerance"));
            }
            return Ok(DimensionResult::finish(quantity, ifs.dim(), lo, hi, rigor, opts.tol, diagnostics));
        }
        depth += 1;
    }
}

/// Root of `P(t) = 0`.
pub fn solve_affinity(ifs: &AffineIFS, opts: &SolverOptions) -> Result<DimensionResult> {
    solve(ifs, &Target::Affinity, Quantity::Affinity, opts)
}

/// `s₀ = inf{t > 0 : P(t) ≤ α(t)}` after rate classification.
pub fn solve_shrinking(ifs: &AffineIFS, spec: &TargetSequence, opts: &SolverOptions) -> Result<DimensionResult> {
    spec.validate(ifs.n_maps())?;
    let (rate, estimated) = match spec.declared_rate() {
        Some(r) => (r, false),
        None => (spec.estimate_rate(opts.k_max)?, true),
    };
    let classification = Some(Classification { rate, estimated });
    let mut result = match rate {
        RateClass::Zero => {
            let mut r = solve(ifs, &Target::Affinity, Quantity::ShrinkingTarget, opts)?;
            r.diagnostics.warnings.push("rate 0: α vanishes, root is the affinity dimension".into());
            r
        }
        RateClass::Infinite => {
            let mut diagnostics = Diagnostics::default();
            diagnostics.warnings.push("rate ∞: α is infinite, dimension is 0".into());
            let rigor = if estimated { Rigor::Heuristic } else { Rigor::RigorousBoth };
            DimensionResult::finish(Quantity::ShrinkingTarget, ifs.dim(), 0.0, 0.0, rigor, opts.tol, diagnostics)
        }
        RateClass::Finite(_) => {
            let k_max = match spec.available() {
                Some(n) => opts.k_max.min(n),
                None => opts.k_max,
            };
            let k_burn = opts.k_burn.unwrap_or(k_max / 2).clamp(1, k_max);
            let profile = TargetProfile::build(ifs, spec, k_burn, k_max, DEFAULT_LETTER_BUDGET)?;
            let mut r = solve(ifs, &Target::Shrinking { profile: &profile }, Quantity::ShrinkingTarget, opts)?;
            let alpha = alpha_from_profile(ifs, spec, &profile, r.reported);
            if alpha.decreasing_tail {
                r.diagnostics.warnings.push(format!("α terms still decreasing at k_max = {k_max}"));
            }
            r.diagnostics.alpha_at_root = Some(alpha);
            r
        }
    };
    if estimated {
        result.diagnostics.warnings.push("rate class estimated from the explicit list".into());
    }
    result.classification = classification;
    Ok(result)
}

/// Root `r₀` of `(1−β)P(t) = βP₂(t)`; requires `β < 1`.
pub fn solve_recurrence(ifs: &AffineIFS, psi: &ReturnRule, opts: &SolverOptions) -> Result<DimensionResult> {
    psi.validate()?;
    let n_max = psi.available().map_or(opts.n_max, |n| n.min(opts.n_max));
    let n_burn = opts.n_burn.unwrap_or(n_max / 2).clamp(1, n_max);
    let beta = beta_estimate(psi, n_burn, n_max)?;
    if beta >= 1.0 {
        return Err(Error::Hypothesis(format!(
            "β = liminf ψ(n)/n must satisfy β < 1 (got {beta}); the recurrence formula does not apply"
        )));
    }
    let mut r = solve(ifs, &Target::Recurrence { beta }, Quantity::Recurrence, opts)?;
    r.diagnostics.beta = Some(beta);
    if matches!(psi, ReturnRule::Table { .. }) {
        r.diagnostics.warnings.push(format!("β estimated as a finite minimum over n ∈ [{n_burn}, {n_max}]"));
    }
    Ok(r)
}
