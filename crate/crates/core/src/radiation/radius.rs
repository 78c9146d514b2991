//! Area radius along an outgoing null ray far out:
//! `dr/dt = 1 - 2M/r`, so that `r = t - 2M log t + O(1)`.
//!
//! We integrate `x = r - t` in `s = ln t`, where the equation reads
//! `dx/ds = -2M t / (x + t)` and is smooth over many decades.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::linear_fit;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusOptions {
    /// Initial RK4 steps per decade of `t`.
    pub steps_per_decade: usize,
    /// Relative change of the fitted coefficient accepted as converged.
    pub tolerance: f64,
    /// Upper limit on steps per decade before giving up.
    pub max_steps_per_decade: usize,
}

impl Default for RadiusOptions {
    fn default() -> Self {
        RadiusOptions {
            steps_per_decade: 64,
            tolerance: 1e-3,
            max_steps_per_decade: 1 << 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiusTrajectory {
    pub t: Vec<f64>,
    pub r: Vec<f64>,
    /// Fitted `c` in `r - t ≈ c log t + b` over the last decade.
    pub log_coefficient: f64,
    pub intercept: f64,
    pub fit_residual: f64,
    pub steps_per_decade: usize,
}

/// Returns samples `(t, x = r - t)`.
fn integrate(mass: f64, r0: f64, t0: f64, t1: f64, per_decade: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let (s0, s1) = (t0.ln(), t1.ln());
    let n = (((s1 - s0) / std::f64::consts::LN_10) * per_decade as f64).ceil().max(1.0) as usize;
    let h = (s1 - s0) / n as f64;
    let rhs = |s: f64, x: f64| {
        let t = s.exp();
        -2.0 * mass * t / (x + t)
    };
    let mut x = r0 - t0;
    let mut ts = Vec::with_capacity(n + 1);
    let mut xs = Vec::with_capacity(n + 1);
    ts.push(t0);
    xs.push(x);
    for i in 0..n {
        let s = s0 + i as f64 * h;
        let k1 = rhs(s, x);
        let k2 = rhs(s + 0.5 * h, x + 0.5 * h * k1);
        let k3 = rhs(s + 0.5 * h, x + 0.5 * h * k2);
        let k4 = rhs(s + h, x + h * k3);
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        let t = (s + h).exp();
        let r = x + t;
        if r <= 2.0 * mass {
            return Err(Error::Domain(format!(
                "r = {r} reached 2M = {} at t = {t}",
                2.0 * mass
            )));
        }
        ts.push(if i + 1 == n { t1 } else { t });
        xs.push(x);
    }
    Ok((ts, xs))
}

/// Fit of `r - t` against `ln t` over the last decade (or the whole span if
/// shorter).
fn fit(ts: &[f64], xs: &[f64]) -> (f64, f64, f64) {
    let t_end = ts[ts.len() - 1];
    let from = (t_end / 10.0).max(ts[0]);
    let pts: Vec<(f64, f64)> = ts
        .iter()
        .zip(xs)
        .filter(|(t, _)| **t >= from)
        .map(|(t, x)| (t.ln(), *x))
        .collect();
    linear_fit(&pts).unwrap_or((0.0, pts.first().map_or(0.0, |p| p.1), 0.0))
}

/// Integrates `dr/dt = 1 - 2M/r` from `r(t0) = r0` to `t1` with classical
/// RK4, halving the step until the fitted log coefficient changes by less
/// than `tolerance`.
pub fn area_radius(mass: f64, r0: f64, t0: f64, t1: f64, opts: RadiusOptions) -> Result<RadiusTrajectory> {
    if !(mass >= 0.0) {
        return Err(Error::Domain(format!("mass {mass} must be non-negative")));
    }
    if !(t0 > 0.0 && t1 > t0) {
        return Err(Error::Domain(format!("need 0 < t0 < t1, got [{t0}, {t1}]")));
    }
    if !(r0 > 4.0 * mass) {
        return Err(Error::Domain(format!("r0 = {r0} must exceed 4M = {}", 4.0 * mass)));
    }
    let mut per_decade = opts.steps_per_decade.max(1);
    let (mut ts, mut xs) = integrate(mass, r0, t0, t1, per_decade)?;
    let mut prev = fit(&ts, &xs);
    loop {
        if per_decade * 2 > opts.max_steps_per_decade {
            return Err(Error::Integrator(format!(
                "log coefficient not converged at {per_decade} steps per decade"
            )));
        }
        per_decade *= 2;
        let (t2, x2) = integrate(mass, r0, t0, t1, per_decade)?;
        let next = fit(&t2, &x2);
        ts = t2;
        xs = x2;
        let change = (next.0 - prev.0).abs();
        let done = change <= opts.tolerance * next.0.abs() || change == 0.0;
        prev = next;
        if done {
            break;
        }
    }
    let r = ts.iter().zip(&xs).map(|(t, x)| x + t).collect();
    Ok(RadiusTrajectory {
        t: ts,
        r,
        log_coefficient: prev.0,
        intercept: prev.1,
        fit_residual: prev.2,
        steps_per_decade: per_decade,
    })
}
