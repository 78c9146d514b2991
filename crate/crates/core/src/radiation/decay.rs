use serde::Serialize;

use super::payload::{RadiativePayload, ScalarLimit};
use crate::error::{Error, Result};
use crate::quadrature::linear_fit;

/// Allowed excess of a fitted exponent over its bound.
pub const DECAY_SLACK: f64 = 0.1;

/// Smallest `max |u|` the grid must reach for a meaningful fit.
pub const MIN_DECAY_SPAN: f64 = 10.0;

/// Envelope fit `sup_ω |q(u,ω)| ≈ C (1+|u|)^exponent` for one quantity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit {
    pub quantity: String,
    /// Exponent the quantity must not exceed (negative).
    pub bound: f64,
    /// Fitted exponent; `None` for an identically zero envelope.
    pub exponent: Option<f64>,
    pub constant: f64,
    /// RMS residual of the log-log fit.
    pub residual: f64,
    pub samples: usize,
    pub pass: bool,
}

impl DecayFit {
    pub fn degenerate(&self) -> bool {
        self.exponent.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    pub fits: Vec<DecayFit>,
    pub slack: f64,
}

impl DecayReport {
    pub fn pass(&self) -> bool {
        self.fits.iter().all(|f| f.pass)
    }

    pub fn get(&self, quantity: &str) -> Option<&DecayFit> {
        self.fits.iter().find(|f| f.quantity == quantity)
    }
}

/// Fits a monotone outer envelope of `sup` (one value per u sample) over
/// `|u| >= max|u| / 2`.
fn fit_envelope(quantity: &str, bound: f64, u: &[f64], sup: &[f64]) -> DecayFit {
    let n = u.len();
    let mut env = sup.to_vec();
    // Running max from each end inward, split at the sample nearest u = 0.
    let split = u.partition_point(|v| *v < 0.0);
    for k in (split..n.saturating_sub(1)).rev() {
        env[k] = env[k].max(env[k + 1]);
    }
    for k in 1..split {
        env[k] = env[k].max(env[k - 1]);
    }
    let reach = u.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let pts: Vec<(f64, f64)> = u
        .iter()
        .zip(&env)
        .filter(|(x, e)| x.abs() >= 0.5 * reach && **e > 0.0)
        .map(|(x, e)| ((1.0 + x.abs()).ln(), e.ln()))
        .collect();
    match linear_fit(&pts) {
        Some((slope, intercept, rms)) => DecayFit {
            quantity: quantity.to_string(),
            bound,
            exponent: Some(slope),
            constant: intercept.exp(),
            residual: rms,
            samples: pts.len(),
            pass: slope <= bound + DECAY_SLACK,
        },
        None => DecayFit {
            quantity: quantity.to_string(),
            bound,
            exponent: None,
            constant: 0.0,
            residual: 0.0,
            samples: pts.len(),
            pass: true,
        },
    }
}

fn sup(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(0.0, |a, v| a.max(v.abs()))
}

/// Decay of every quantity the payload carries against its asymptotic bound:
/// `Ξ, A_F, B_W ~ |u|^{-3/2}`, `A_W ~ |u|^{-5/2}`, and `P_W - P̄_W`,
/// `Q_W - Q̄_W`, `P_F`, `Q_F ~ |u|^{-1/2}`.
pub fn decay_report(p: &RadiativePayload) -> Result<DecayReport> {
    let u = p.u();
    let reach = u.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if reach < MIN_DECAY_SPAN {
        return Err(Error::Range(format!(
            "decay fit needs the u grid to reach |u| >= {MIN_DECAY_SPAN}, it reaches {reach}"
        )));
    }
    let mut fits = Vec::new();
    let stt_sup = |s: &[crate::sphere::SttField]| -> Vec<f64> {
        s.iter().map(|t| sup(t.norm_sq_pointwise().into_iter().map(f64::sqrt))).collect()
    };
    let form_sup = |s: &[crate::sphere::OneFormField]| -> Vec<f64> {
        s.iter().map(|t| sup(t.norm_sq_pointwise().into_iter().map(f64::sqrt))).collect()
    };
    fits.push(fit_envelope("Xi", -1.5, u, &stt_sup(p.xi())));
    if let Some(a) = p.a_f() {
        fits.push(fit_envelope("A_F", -1.5, u, &form_sup(a)));
    }
    if let Some(a) = p.a_w() {
        fits.push(fit_envelope("A_W", -2.5, u, &stt_sup(a)));
    }
    if let Some(b) = p.b_w() {
        fits.push(fit_envelope("B_W", -1.5, u, &form_sup(b)));
    }
    for which in ScalarLimit::ALL {
        let Some(s) = p.scalar(which) else { continue };
        let subtract_mean = matches!(which, ScalarLimit::PW | ScalarLimit::QW);
        let env: Vec<f64> = s
            .iter()
            .map(|f| {
                let m = if subtract_mean { f.mean() } else { 0.0 };
                sup(f.values().iter().map(|v| v - m))
            })
            .collect();
        let name = if subtract_mean {
            format!("{}-mean", which.name())
        } else {
            which.name().to_string()
        };
        fits.push(fit_envelope(&name, -0.5, u, &env));
    }
    Ok(DecayReport {
        fits,
        slack: DECAY_SLACK,
    })
}
