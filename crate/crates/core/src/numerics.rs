//! Small numerical helpers shared by the estimators.

/// `log(sum(exp(values)))` with the usual max shift. Empty input gives `-inf`.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || max.is_nan() {
        return max;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

/// Streaming log-sum-exp accumulator.
///
/// Keeps a running maximum and a rescaled sum so that terms of wildly
/// different magnitude can be pushed in any order.
#[derive(Debug, Clone, Copy)]
pub struct LogSumExp {
    max: f64,
    sum: f64,
}

impl Default for LogSumExp {
    fn default() -> Self {
        Self::new()
    }
}

impl LogSumExp {
    pub fn new() -> Self {
        LogSumExp {
            max: f64::NEG_INFINITY,
            sum: 0.0,
        }
    }

    pub fn push(&mut self, value: f64) {
        if value == f64::NEG_INFINITY {
            return;
        }
        if value > self.max {
            self.sum = self.sum * (self.max - value).exp() + 1.0;
            self.max = value;
        } else {
            self.sum += (value - self.max).exp();
        }
    }

    /// Merges another accumulator; used to reduce per-prefix partial sums.
    pub fn merge(&mut self, other: &LogSumExp) {
        if other.max == f64::NEG_INFINITY {
            return;
        }
        if other.max > self.max {
            self.sum = self.sum * (self.max - other.max).exp() + other.sum;
            self.max = other.max;
        } else {
            self.sum += other.sum * (other.max - self.max).exp();
        }
    }

    pub fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.sum.ln()
        }
    }
}

/// Ordinary least-squares slope of `ys` against `xs`. `None` for fewer than
/// two points or zero spread in `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return None;
    }
    let mx = xs[..n].iter().sum::<f64>() / n as f64;
    let my = ys[..n].iter().sum::<f64>() / n as f64;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for i in 0..n {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

/// Aitken delta-squared extrapolation of three successive terms. Falls back
/// to the last term when the second difference vanishes.
pub fn aitken(x0: f64, x1: f64, x2: f64) -> f64 {
    let denom = x2 - 2.0 * x1 + x0;
    if denom.abs() < 1e-300 {
        x2
    } else {
        x2 - (x2 - x1).powi(2) / denom
    }
}

/// Bisection on a sign predicate: `positive(lo)` must hold and
/// `positive(hi)` must not. Returns the final `[lo, hi]` with
/// `hi - lo <= tol` (or after `max_iter` halvings).
pub fn bisect_sign<F>(mut lo: f64, mut hi: f64, tol: f64, max_iter: usize, mut positive: F) -> (f64, f64)
where
    F: FnMut(f64) -> bool,
{
    let mut iter = 0;
    while hi - lo > tol && iter < max_iter {
        let mid = 0.5 * (lo + hi);
        if positive(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        iter += 1;
    }
    (lo, hi)
}
