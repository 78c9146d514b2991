//! One-dimensional rules along the retarded-time axis: integrals over the
//! sampled grid, power-law tails beyond it, cumulative integrals and
//! derivatives. Grids may be non-uniform but must be strictly increasing.

use crate::error::{Error, Result};

/// Whether integrals over all of `u` add a power-law tail beyond the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TailModel {
    #[default]
    PowerLaw,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Contributions from `(-∞, u_0]` and `[u_end, ∞)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Tails {
    pub left: f64,
    pub right: f64,
}

impl Tails {
    pub fn total(&self) -> f64 {
        self.left + self.right
    }
}

pub fn check_grid(u: &[f64]) -> Result<()> {
    if u.len() < 2 {
        return Err(Error::Range(format!("u grid has {} samples, need at least 2", u.len())));
    }
    if let Some(i) = u.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::Range(format!("u grid not strictly increasing at index {}", i + 1)));
    }
    Ok(())
}

/// Composite trapezoid weights: `∫ y du ≈ Σ w_i y_i`.
pub fn trapezoid_weights(u: &[f64]) -> Vec<f64> {
    let n = u.len();
    let mut w = vec![0.0; n];
    for i in 0..n.saturating_sub(1) {
        let h = 0.5 * (u[i + 1] - u[i]);
        w[i] += h;
        w[i + 1] += h;
    }
    w
}

pub fn trapezoid(u: &[f64], y: &[f64]) -> f64 {
    trapezoid_weights(u).iter().zip(y).map(|(w, v)| w * v).sum()
}

/// `∫_{u_0}^{u_i} y du` by the trapezoid rule, starting at 0.
pub fn cumulative_trapezoid(u: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(u.len());
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..u.len() {
        acc += 0.5 * (u[i] - u[i - 1]) * (y[i] + y[i - 1]);
        out.push(acc);
    }
    out
}

/// Lagrange basis weights on `xs` for the value (`deriv = false`) or first
/// derivative at `x`.
fn lagrange_weights(xs: &[f64], x: f64, deriv: bool) -> Vec<f64> {
    let n = xs.len();
    (0..n)
        .map(|k| {
            let denom: f64 = (0..n).filter(|&j| j != k).map(|j| xs[k] - xs[j]).product();
            if !deriv {
                let num: f64 = (0..n).filter(|&j| j != k).map(|j| x - xs[j]).product();
                return num / denom;
            }
            let mut s = 0.0;
            for i in (0..n).filter(|&i| i != k) {
                let p: f64 = (0..n).filter(|&j| j != k && j != i).map(|j| x - xs[j]).product();
                s += p;
            }
            s / denom
        })
        .collect()
}

/// Start of a stencil of `width` points around `centre`, clamped to the grid.
fn stencil_start(n: usize, width: usize, centre: usize) -> usize {
    centre.saturating_sub((width - 1) / 2).min(n - width)
}

/// Precomputed cumulative rule: per interval, a cubic through the four
/// nearest samples (clamped at the ends) integrated exactly by two-point
/// Gauss. Fourth order on smooth data.
#[derive(Debug, Clone)]
pub struct CumulativeRule {
    start: Vec<usize>,
    weights: Vec<Vec<f64>>,
}

impl CumulativeRule {
    pub fn new(u: &[f64]) -> Self {
        let n = u.len();
        let width = n.min(4);
        let g = 0.5 / 3f64.sqrt();
        let mut start = Vec::with_capacity(n.saturating_sub(1));
        let mut weights = Vec::with_capacity(n.saturating_sub(1));
        for i in 0..n.saturating_sub(1) {
            let s = stencil_start(n, width, i);
            let xs = &u[s..s + width];
            let h = u[i + 1] - u[i];
            let mid = 0.5 * (u[i] + u[i + 1]);
            let a = lagrange_weights(xs, mid - g * h, false);
            let b = lagrange_weights(xs, mid + g * h, false);
            start.push(s);
            weights.push(a.iter().zip(&b).map(|(p, q)| 0.5 * h * (p + q)).collect());
        }
        CumulativeRule { start, weights }
    }

    /// `∫_{u_0}^{u_i} y du` for every node, starting at 0.
    pub fn apply(&self, y: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.start.len() + 1);
        let mut acc = 0.0;
        out.push(0.0);
        for (s, w) in self.start.iter().zip(&self.weights) {
            acc += w.iter().zip(&y[*s..]).map(|(a, b)| a * b).sum::<f64>();
            out.push(acc);
        }
        out
    }
}

/// Least-squares fit of `log|y| = log C - q log|u|` over the outer half of
/// one side of the grid. Returns `(q, C, rms residual)`, or `None` when the
/// side does not extend away from `u = 0` or has fewer than three nonzero
/// samples there.
pub fn fit_power_law(u: &[f64], y: &[f64], side: Side) -> Option<(f64, f64, f64)> {
    let end = match side {
        Side::Left => u[0],
        Side::Right => *u.last()?,
    };
    let outward = match side {
        Side::Left => end < 0.0,
        Side::Right => end > 0.0,
    };
    if !outward {
        return None;
    }
    let pts: Vec<(f64, f64)> = u
        .iter()
        .zip(y)
        .filter(|(x, v)| {
            let beyond = match side {
                Side::Left => **x <= 0.5 * end,
                Side::Right => **x >= 0.5 * end,
            };
            beyond && **x != 0.0 && **v != 0.0 && v.is_finite()
        })
        .map(|(x, v)| (x.abs().ln(), v.abs().ln()))
        .collect();
    let (slope, intercept, rms) = linear_fit(&pts)?;
    Some((-slope, intercept.exp(), rms))
}

/// Ordinary least squares `y = a x + b`; returns `(a, b, rms residual)`.
pub fn linear_fit(pts: &[(f64, f64)]) -> Option<(f64, f64, f64)> {
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let a = sxy / sxx;
    let b = my - a * mx;
    let rms = (pts.iter().map(|p| (p.1 - a * p.0 - b).powi(2)).sum::<f64>() / n).sqrt();
    Some((a, b, rms))
}

/// `∫` of `y` beyond one end of the grid, modelling `y ~ y_end (u/u_end)^{-q}`
/// with `q` fitted on the outer half: `y_end |u_end| / (q - 1)`.
pub fn tail_integral(u: &[f64], y: &[f64], side: Side, field: &str) -> Result<f64> {
    let y_end = match side {
        Side::Left => y[0],
        Side::Right => y[y.len() - 1],
    };
    let u_end = match side {
        Side::Left => u[0],
        Side::Right => u[u.len() - 1],
    };
    if y_end == 0.0 {
        return Ok(0.0);
    }
    let Some((q, _, _)) = fit_power_law(u, y, side) else {
        return Ok(0.0);
    };
    if q <= 1.0 {
        return Err(Error::NonConvergentTail {
            field: field.to_string(),
            exponent: q,
        });
    }
    Ok(y_end * u_end.abs() / (q - 1.0))
}

pub fn tails(u: &[f64], y: &[f64], model: TailModel, field: &str) -> Result<Tails> {
    match model {
        TailModel::Off => Ok(Tails::default()),
        TailModel::PowerLaw => Ok(Tails {
            left: tail_integral(u, y, Side::Left, field)?,
            right: tail_integral(u, y, Side::Right, field)?,
        }),
    }
}

/// Precomputed derivative rule: local Lagrange on up to five samples,
/// centred where possible and clamped at the ends.
#[derive(Debug, Clone)]
pub struct DerivativeRule {
    start: Vec<usize>,
    weights: Vec<Vec<f64>>,
}

impl DerivativeRule {
    pub fn new(u: &[f64]) -> Result<Self> {
        let n = u.len();
        if n < 3 {
            return Err(Error::Range(format!("{n} samples, need at least 3 to differentiate")));
        }
        let width = n.min(5);
        let mut start = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for i in 0..n {
            let s = stencil_start(n, width, i);
            start.push(s);
            weights.push(lagrange_weights(&u[s..s + width], u[i], true));
        }
        Ok(DerivativeRule { start, weights })
    }

    pub fn apply(&self, y: &[f64]) -> Vec<f64> {
        self.start
            .iter()
            .zip(&self.weights)
            .map(|(s, w)| w.iter().zip(&y[*s..]).map(|(a, b)| a * b).sum())
            .collect()
    }
}

pub fn derivative(u: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    Ok(DerivativeRule::new(u)?.apply(y))
}

/// Value at `x` of the cubic through the four samples nearest `x`.
pub fn interpolate_cubic(u: &[f64], y: &[f64], x: f64) -> f64 {
    let n = u.len();
    let i = match u.partition_point(|v| *v <= x) {
        0 => 0,
        p => (p - 1).min(n - 2),
    };
    let width = n.min(4);
    let s = i.saturating_sub(1).min(n - width);
    let w = lagrange_weights(&u[s..s + width], x, false);
    w.iter().zip(&y[s..]).map(|(a, b)| a * b).sum()
}

/// Uniform grid of `n` samples on `[a, b]`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}
