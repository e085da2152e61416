//! Stationary transform: classify the trend of a series, fit a positive
//! trend denominator `g(x)`, and map the series to a near-stationary
//! ratio `S(x) = (y + 1) / g(x)` that a regressor can learn.
//!
//! Two trend families are fitted, both on the shifted series `Y1 = y + 1`:
//!
//! - `PolyDiff`: `g(x) = a2 * cumsum(exp(a1*x + b1)) + b2`, the running sum
//!   of fitted log-differences. Exact whenever the differences of `Y1` are
//!   exponential in `x` (exponential and linear trends).
//! - `Exponential`: `g(x) = a2 * exp(a1*x + b1) + b2`.
//!
//! The family whose scaled candidate fit (`c * x^k` vs `c * b^x`) has the
//! lower SSE is built first; a family that cannot be built validly (too few
//! positive differences for the log-difference regression, or a
//! non-positive denominator on the training grid) yields to the other, and
//! `Identity` is the final fallback.

use crate::series::{min_max, Series, SeriesError};
use crate::solve::fit_line;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Minimum samples for a trend fit.
const MIN_FIT_LEN: usize = 8;
/// Relative value range below which the transform is skipped entirely.
const IDENTITY_RANGE: f64 = 1e-6;
/// Positive differences required for the log-difference regression.
const MIN_POSITIVE_DIFFS: usize = 4;
/// R^2 at which log-differences count as exactly exponential, allowing the
/// exponential family to take its rate from difference space (where
/// additive offsets such as the +1 shift and normalization cancel).
const DIFF_RATE_R2: f64 = 0.999;
/// Denominators at or below this are treated as non-positive.
const MIN_DENOM: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum StationaryError {
    #[error("trend fit needs at least {min} samples, got {len}")]
    TooShort { len: usize, min: usize },
    #[error("log-domain estimate needs positive inputs (x > 0 and y+1 > 0)")]
    NonPositiveInput,
    #[error("trend denominator is non-positive at x = {0}")]
    NonPositiveDenominator(f64),
    #[error("series grid does not match the fitted grid at index {0}")]
    GridMismatch(usize),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Which trend family the fit selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrendBranch {
    /// No usable trend; the transform is the identity map.
    Identity,
    /// Integrated-exponential denominator built from log-differences.
    PolyDiff,
    /// Direct exponential denominator.
    Exponential,
}

/// A fitted trend model mapping a series to its near-stationary ratio and
/// back. Immutable after fit; extension beyond the training grid is done
/// through a per-forecast [`TrendExtender`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StationaryModel {
    branch: TrendBranch,
    a1: f64,
    b1: f64,
    a2: f64,
    b2: f64,
    k_est: Option<f64>,
    base_est: Option<f64>,
    train_xs: Vec<f64>,
    /// Denominator over the training grid (empty for Identity).
    g_train: Vec<f64>,
    /// PolyDiff running sum at the end of the training window.
    cum_state: f64,
}

/// Slope of the OLS fit of `log(y + 1)` against `log(x)`: the estimated
/// polynomial order of the trend.
pub fn estimate_poly_order(s: &Series) -> Result<f64, StationaryError> {
    let mut lx = Vec::with_capacity(s.len());
    let mut ly = Vec::with_capacity(s.len());
    for (&x, &y) in s.xs().iter().zip(s.ys()) {
        let y1 = y + 1.0;
        if x <= 0.0 || y1 <= 0.0 {
            return Err(StationaryError::NonPositiveInput);
        }
        lx.push(x.ln());
        ly.push(y1.ln());
    }
    Ok(fit_line(&lx, &ly).0)
}

/// `exp(slope)` of the OLS fit of `log(y + 1)` against `x`: the estimated
/// exponential base of the trend.
pub fn estimate_exp_base(s: &Series) -> Result<f64, StationaryError> {
    let mut ly = Vec::with_capacity(s.len());
    for &y in s.ys() {
        let y1 = y + 1.0;
        if y1 <= 0.0 {
            return Err(StationaryError::NonPositiveInput);
        }
        ly.push(y1.ln());
    }
    Ok(fit_line(s.xs(), &ly).0.exp())
}

/// SSE of the best scale-only fit `c * basis` against `y1`.
fn scaled_fit_sse(basis: &[f64], y1: &[f64]) -> f64 {
    let denom: f64 = basis.iter().map(|v| v * v).sum();
    if !denom.is_finite() || denom <= 0.0 {
        return f64::INFINITY;
    }
    let c = basis.iter().zip(y1).map(|(b, y)| b * y).sum::<f64>() / denom;
    let sse = basis
        .iter()
        .zip(y1)
        .map(|(b, y)| {
            let r = y - c * b;
            r * r
        })
        .sum();
    if sse == f64::INFINITY {
        return f64::INFINITY;
    }
    sse
}

struct BranchFit {
    a1: f64,
    b1: f64,
    a2: f64,
    b2: f64,
    g: Vec<f64>,
    cum_state: f64,
}

/// Log-difference line fit: returns (a1, b1, r_squared, kept-count).
fn log_diff_fit(xs: &[f64], y1: &[f64]) -> Option<(f64, f64, f64)> {
    let mut dx = Vec::new();
    let mut ld = Vec::new();
    for i in 1..y1.len() {
        let d = y1[i] - y1[i - 1];
        if d > 0.0 {
            dx.push(xs[i]);
            ld.push(d.ln());
        }
    }
    if dx.len() < MIN_POSITIVE_DIFFS {
        return None;
    }
    let (a1, b1) = fit_line(&dx, &ld);
    let mean = ld.iter().sum::<f64>() / ld.len() as f64;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for (x, l) in dx.iter().zip(&ld) {
        let r = l - (a1 * x + b1);
        ss_res += r * r;
        let t = l - mean;
        ss_tot += t * t;
    }
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Some((a1, b1, r2))
}

fn build_polydiff(xs: &[f64], y1: &[f64]) -> Option<BranchFit> {
    let (a1, b1, _) = log_diff_fit(xs, y1)?;
    let mut cum = Vec::with_capacity(xs.len());
    let mut acc = 0.0;
    for &x in xs {
        acc += (a1 * x + b1).exp();
        cum.push(acc);
    }
    if !acc.is_finite() {
        return None;
    }
    let (a2, b2) = fit_line(&cum, y1);
    let g: Vec<f64> = cum.iter().map(|c| a2 * c + b2).collect();
    if g.iter().any(|&v| v <= MIN_DENOM || !v.is_finite()) {
        return None;
    }
    Some(BranchFit { a1, b1, a2, b2, g, cum_state: acc })
}

fn build_exponential(xs: &[f64], y1: &[f64]) -> Option<BranchFit> {
    if y1.iter().any(|&v| v <= 0.0) {
        return None;
    }
    let ly: Vec<f64> = y1.iter().map(|v| v.ln()).collect();
    let mut rates = vec![fit_line(xs, &ly)];
    // An additive offset (the +1 shift, normalization) corrupts the
    // level-space rate; when the log-differences are exactly linear the
    // difference-space rate recovers the true exponent, so try it too.
    if let Some((a1, b1, r2)) = log_diff_fit(xs, y1) {
        if r2 >= DIFF_RATE_R2 {
            rates.push((a1, b1));
        }
    }
    let mut best: Option<(f64, BranchFit)> = None;
    for (a1, b1) in rates {
        let e: Vec<f64> = xs.iter().map(|&x| (a1 * x + b1).exp()).collect();
        if e.iter().any(|v| !v.is_finite()) {
            continue;
        }
        let (a2, b2) = fit_line(&e, y1);
        let g: Vec<f64> = e.iter().map(|v| a2 * v + b2).collect();
        if g.iter().any(|&v| v <= MIN_DENOM || !v.is_finite()) {
            continue;
        }
        let sse: f64 = y1
            .iter()
            .zip(&g)
            .map(|(y, gv)| {
                let r = y - gv;
                r * r
            })
            .sum();
        if best.as_ref().map_or(true, |(s, _)| sse < *s) {
            best = Some((sse, BranchFit { a1, b1, a2, b2, g, cum_state: 0.0 }));
        }
    }
    best.map(|(_, f)| f)
}

impl StationaryModel {
    /// Fit the trend model on a training window.
    pub fn fit(s: &Series) -> Result<Self, StationaryError> {
        if s.len() < MIN_FIT_LEN {
            return Err(StationaryError::TooShort {
                len: s.len(),
                min: MIN_FIT_LEN,
            });
        }
        let mut model = Self::identity(s.xs().to_vec());
        let (lo, hi) = min_max(s.ys());
        if hi - lo < IDENTITY_RANGE * f64::max(hi.abs().max(lo.abs()), 1.0) {
            return Ok(model);
        }
        let y1: Vec<f64> = s.ys().iter().map(|y| y + 1.0).collect();
        let xs = s.xs();

        let mut sse_pow = f64::INFINITY;
        if let Ok(k) = estimate_poly_order(s) {
            model.k_est = Some(k);
            let basis: Vec<f64> = xs.iter().map(|&x| x.powf(k)).collect();
            sse_pow = scaled_fit_sse(&basis, &y1);
        }
        let mut sse_exp = f64::INFINITY;
        if let Ok(b) = estimate_exp_base(s) {
            model.base_est = Some(b);
            let basis: Vec<f64> = xs.iter().map(|&x| b.powf(x)).collect();
            sse_exp = scaled_fit_sse(&basis, &y1);
        }

        let order: &[TrendBranch] = match (sse_pow.is_finite(), sse_exp.is_finite()) {
            (false, false) => &[],
            (true, false) => &[TrendBranch::PolyDiff, TrendBranch::Exponential],
            (false, true) => &[TrendBranch::Exponential, TrendBranch::PolyDiff],
            (true, true) => {
                if sse_pow <= sse_exp {
                    &[TrendBranch::PolyDiff, TrendBranch::Exponential]
                } else {
                    &[TrendBranch::Exponential, TrendBranch::PolyDiff]
                }
            }
        };
        for &branch in order {
            let fit = match branch {
                TrendBranch::PolyDiff => build_polydiff(xs, &y1),
                TrendBranch::Exponential => build_exponential(xs, &y1),
                TrendBranch::Identity => None,
            };
            if let Some(f) = fit {
                model.branch = branch;
                model.a1 = f.a1;
                model.b1 = f.b1;
                model.a2 = f.a2;
                model.b2 = f.b2;
                model.g_train = f.g;
                model.cum_state = f.cum_state;
                return Ok(model);
            }
        }
        Ok(model)
    }

    fn identity(train_xs: Vec<f64>) -> Self {
        Self {
            branch: TrendBranch::Identity,
            a1: 0.0,
            b1: 0.0,
            a2: 0.0,
            b2: 0.0,
            k_est: None,
            base_est: None,
            train_xs,
            g_train: Vec::new(),
            cum_state: 0.0,
        }
    }

    /// Construct a model directly from branch parameters (mainly for tests
    /// and hand-built transforms). `g_train` is evaluated over `train_xs`.
    pub fn from_parts(
        branch: TrendBranch,
        a1: f64,
        b1: f64,
        a2: f64,
        b2: f64,
        train_xs: Vec<f64>,
    ) -> Self {
        let mut m = Self::identity(train_xs);
        m.branch = branch;
        m.a1 = a1;
        m.b1 = b1;
        m.a2 = a2;
        m.b2 = b2;
        match branch {
            TrendBranch::Identity => {}
            TrendBranch::Exponential => {
                m.g_train = m
                    .train_xs
                    .iter()
                    .map(|&x| a2 * (a1 * x + b1).exp() + b2)
                    .collect();
            }
            TrendBranch::PolyDiff => {
                let mut acc = 0.0;
                m.g_train = m
                    .train_xs
                    .iter()
                    .map(|&x| {
                        acc += (a1 * x + b1).exp();
                        a2 * acc + b2
                    })
                    .collect();
                m.cum_state = acc;
            }
        }
        m
    }

    pub fn branch(&self) -> TrendBranch {
        self.branch
    }

    pub fn poly_order_estimate(&self) -> Option<f64> {
        self.k_est
    }

    pub fn exp_base_estimate(&self) -> Option<f64> {
        self.base_est
    }

    /// Fitted rate coefficient `a1` of the selected branch.
    pub fn rate(&self) -> f64 {
        self.a1
    }

    pub fn train_xs(&self) -> &[f64] {
        &self.train_xs
    }

    /// Denominator over the training grid (empty for Identity).
    pub fn g_train(&self) -> &[f64] {
        &self.g_train
    }

    /// Apply the transform: `S(x) = (y + 1) / g(x)`, identity for the
    /// Identity branch. `s.xs` must equal the training grid or extend it
    /// on the same step; extension continues the trend analytically.
    pub fn apply(&self, s: &Series) -> Result<Series, StationaryError> {
        if self.branch == TrendBranch::Identity {
            return Ok(s.clone());
        }
        let step = grid_step(&self.train_xs);
        let mut ext = self.extender();
        let mut out = Vec::with_capacity(s.len());
        for (i, (&x, &y)) in s.xs().iter().zip(s.ys()).enumerate() {
            let g = if i < self.train_xs.len() {
                if (x - self.train_xs[i]).abs() > grid_tol(step, x) {
                    return Err(StationaryError::GridMismatch(i));
                }
                self.g_train[i]
            } else {
                ext.next_g(x)
            };
            if g <= MIN_DENOM {
                return Err(StationaryError::NonPositiveDenominator(x));
            }
            out.push((y + 1.0) / g);
        }
        Ok(Series::new(s.xs().to_vec(), out)?)
    }

    /// Invert the transform at a single training-grid point: `s * g(x) - 1`.
    pub fn invert_at(&self, s_val: f64, x: f64) -> Result<f64, StationaryError> {
        if self.branch == TrendBranch::Identity {
            return Ok(s_val);
        }
        let step = grid_step(&self.train_xs);
        // Binary search would also work; the grids here are small enough
        // that a scan keeps the tolerance handling simple.
        let idx = self
            .train_xs
            .iter()
            .position(|&tx| (tx - x).abs() <= grid_tol(step, x));
        match idx {
            Some(i) => Ok(s_val * self.g_train[i] - 1.0),
            None => {
                // Beyond the training grid: walk the extension to x.
                let last = *self.train_xs.last().unwrap();
                if x <= last {
                    return Err(StationaryError::GridMismatch(0));
                }
                let mut ext = self.extender();
                let steps = ((x - last) / step).round() as usize;
                let mut g = 0.0;
                for k in 1..=steps {
                    g = ext.next_g(last + k as f64 * step);
                }
                if g <= MIN_DENOM {
                    return Err(StationaryError::NonPositiveDenominator(x));
                }
                Ok(s_val * g - 1.0)
            }
        }
    }

    /// Stepwise trend continuation past the training window. Each forecast
    /// gets its own extender; the shared model is never mutated.
    pub fn extender(&self) -> TrendExtender {
        TrendExtender {
            branch: self.branch,
            a1: self.a1,
            b1: self.b1,
            a2: self.a2,
            b2: self.b2,
            cum: self.cum_state,
        }
    }
}

fn grid_step(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        1.0
    } else {
        xs[1] - xs[0]
    }
}

fn grid_tol(step: f64, x: f64) -> f64 {
    (step.abs() * 1e-6).max(x.abs() * 1e-9).max(1e-12)
}

/// Private cursor continuing `g(x)` one grid point at a time.
#[derive(Debug, Clone)]
pub struct TrendExtender {
    branch: TrendBranch,
    a1: f64,
    b1: f64,
    a2: f64,
    b2: f64,
    cum: f64,
}

impl TrendExtender {
    /// Denominator at the next grid point `x` (callers advance x by the
    /// training step; PolyDiff accumulates one term per call).
    pub fn next_g(&mut self, x: f64) -> f64 {
        match self.branch {
            TrendBranch::Identity => 1.0,
            TrendBranch::Exponential => self.a2 * (self.a1 * x + self.b1).exp() + self.b2,
            TrendBranch::PolyDiff => {
                self.cum += (self.a1 * x + self.b1).exp();
                self.a2 * self.cum + self.b2
            }
        }
    }
}
