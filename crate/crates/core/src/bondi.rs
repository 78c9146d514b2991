//! Bondi-coordinate waveforms `(c, d, X, Y)` and their map to radiative data.
//!
//! Only the norm identities `|Ξ|² = (∂_w c)² + (∂_w d)²` and
//! `|A_F|² = X² + Y²` are established; the component assignment here is the
//! simplest one realizing them:
//!
//! ```text
//! Ξ_θθ = -∂_w c / √2,   Ξ_θφ = -∂_w d / √2,   A_F = (X, Y).
//! ```
//!
//! (`|T|² = 2(T_θθ² + T_θφ²)` for STT fields.)

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{check_grid, DerivativeRule};
use crate::radiation::RadiativePayload;
use crate::sphere::{OneFormField, ScalarField, SphereGrid, SttField};

/// Prefactor of `∫ (...) dμ` in the Bondi-coordinate mass-loss formula.
pub const BONDI_PREFACTOR: f64 = -1.0;
/// Prefactor of `∫ (...) dμ` in the null-infinity mass-loss formula.
pub const RADIATIVE_PREFACTOR: f64 = 1.0 / (8.0 * PI);

/// How retarded time `u` relates to Bondi time `w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum Orientation {
    /// `u = w`.
    #[default]
    Same,
    /// `u = -w`; samples are reversed so `u` increases.
    Reversed,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Same => 1.0,
            Orientation::Reversed => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BondiWaveform {
    grid: Arc<SphereGrid>,
    w: Vec<f64>,
    c: Vec<ScalarField>,
    d: Vec<ScalarField>,
    x: Vec<ScalarField>,
    y: Vec<ScalarField>,
}

impl BondiWaveform {
    pub fn new(
        w: Vec<f64>,
        c: Vec<ScalarField>,
        d: Vec<ScalarField>,
        x: Vec<ScalarField>,
        y: Vec<ScalarField>,
    ) -> Result<Self> {
        check_grid(&w)?;
        let grid = c
            .first()
            .ok_or_else(|| Error::Shape { field: "c".into(), detail: "empty series".into() })?
            .grid()
            .clone();
        for (name, s) in [("c", &c), ("d", &d), ("X", &x), ("Y", &y)] {
            if s.len() != w.len() {
                return Err(Error::Shape {
                    field: name.into(),
                    detail: format!("{} slices for {} w samples", s.len(), w.len()),
                });
            }
            if s.iter().any(|f| **f.grid() != *grid) {
                return Err(Error::Shape { field: name.into(), detail: "grid differs from `c`".into() });
            }
        }
        Ok(BondiWaveform { grid, w, c, d, x, y })
    }

    pub fn zeros(grid: &Arc<SphereGrid>, w: Vec<f64>) -> Result<Self> {
        let z = vec![ScalarField::zeros(grid); w.len()];
        Self::new(w, z.clone(), z.clone(), z.clone(), z)
    }

    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn c(&self) -> &[ScalarField] {
        &self.c
    }

    pub fn d(&self) -> &[ScalarField] {
        &self.d
    }

    pub fn x(&self) -> &[ScalarField] {
        &self.x
    }

    pub fn y(&self) -> &[ScalarField] {
        &self.y
    }

    /// `(∂_w c, ∂_w d)` per slice.
    fn shear_rates(&self) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
        if self.w.len() < 3 {
            return Err(Error::Range(format!("w-derivative needs at least 3 samples, got {}", self.w.len())));
        }
        let rule = DerivativeRule::new(&self.w)?;
        let n = self.grid.len();
        let diff = |s: &[ScalarField]| -> Vec<Vec<f64>> {
            let mut out = vec![vec![0.0; n]; s.len()];
            for i in 0..n {
                let series: Vec<f64> = s.iter().map(|f| f.values()[i]).collect();
                for (k, v) in rule.apply(&series).into_iter().enumerate() {
                    out[k][i] = v;
                }
            }
            out
        };
        Ok((diff(&self.c), diff(&self.d)))
    }
}

/// Radiative payload with `Ξ` and `A_F` realizing the Bondi norm identities.
pub fn to_radiative(b: &BondiWaveform, orientation: Orientation) -> Result<RadiativePayload> {
    let (dc, dd) = b.shear_rates()?;
    // ∂_u = sign · ∂_w.
    let k = -FRAC_1_SQRT_2 * orientation.sign();
    let mut xi: Vec<SttField> = dc
        .iter()
        .zip(&dd)
        .map(|(a, c)| {
            SttField::new(b.grid.clone(), a.iter().map(|v| k * v).collect(), c.iter().map(|v| k * v).collect())
        })
        .collect::<Result<_>>()?;
    let mut a_f: Vec<OneFormField> = b
        .x
        .iter()
        .zip(&b.y)
        .map(|(x, y)| OneFormField::new(b.grid.clone(), x.values().to_vec(), y.values().to_vec()))
        .collect::<Result<_>>()?;
    let mut u = b.w.clone();
    if orientation == Orientation::Reversed {
        u = u.iter().rev().map(|w| -w).collect();
        xi.reverse();
        a_f.reverse();
    }
    RadiativePayload::new(u, xi)?.with_a_f(a_f)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub orientation: Orientation,
    pub bondi_prefactor: f64,
    pub radiative_prefactor: f64,
    /// `max |I_Bondi - I_rad| / max |I_Bondi|` over all samples and nodes.
    pub max_pointwise_residual: f64,
    pub max_gravitational_residual: f64,
    pub max_em_residual: f64,
    /// `∫ I_Bondi dμ / ∫ I_rad dμ` per `w` sample (1 where both vanish).
    pub integral_ratio: Vec<f64>,
    /// `dM/dw = BONDI_PREFACTOR ∫ I_Bondi dμ`, in `w` order.
    pub bondi_rate: Vec<f64>,
    /// `dM/du = RADIATIVE_PREFACTOR ∫ I_rad dμ`, in `w` order.
    pub radiative_rate: Vec<f64>,
    /// `|dM/dw| · RADIATIVE_PREFACTOR / |BONDI_PREFACTOR|` against `|dM/du|`,
    /// max relative difference.
    pub rate_magnitude_residual: f64,
    /// Whether `dM/du = orientation.sign() · dM/dw` has the sign of the
    /// radiative rate everywhere. Only `Reversed` reconciles a mass that
    /// decreases in `w` with one that increases in `u`.
    pub signs_consistent: bool,
}

impl EquivalenceReport {
    pub fn pass(&self, tolerance: f64) -> bool {
        self.max_pointwise_residual <= tolerance
    }
}

/// Compares the Bondi integrand `(∂_w c)² + (∂_w d)² + ½(X² + Y²)` with
/// `|Ξ|² + ½|A_F|²` from [`to_radiative`], pointwise and integrated.
pub fn check_mass_loss_equivalence(b: &BondiWaveform, orientation: Orientation) -> Result<EquivalenceReport> {
    let (dc, dd) = b.shear_rates()?;
    let p = to_radiative(b, orientation)?;
    let n = b.w.len();
    let idx = |k: usize| match orientation {
        Orientation::Same => k,
        Orientation::Reversed => n - 1 - k,
    };
    let mut scale = 0.0f64;
    let (mut res, mut res_g, mut res_em) = (0.0f64, 0.0f64, 0.0f64);
    let mut ratio = Vec::with_capacity(n);
    let mut bondi_rate = Vec::with_capacity(n);
    let mut rad_rate = Vec::with_capacity(n);
    for k in 0..n {
        let xi2 = p.xi()[idx(k)].norm_sq_pointwise();
        let af2 = p.a_f().expect("set by to_radiative")[idx(k)].norm_sq_pointwise();
        let (x, y) = (b.x[k].values(), b.y[k].values());
        let mut ib = vec![0.0; b.grid.len()];
        let mut ir = vec![0.0; b.grid.len()];
        for i in 0..b.grid.len() {
            let g = dc[k][i] * dc[k][i] + dd[k][i] * dd[k][i];
            let em = x[i] * x[i] + y[i] * y[i];
            ib[i] = g + 0.5 * em;
            ir[i] = xi2[i] + 0.5 * af2[i];
            scale = scale.max(ib[i].abs());
            res = res.max((ib[i] - ir[i]).abs());
            res_g = res_g.max((g - xi2[i]).abs());
            res_em = res_em.max((em - af2[i]).abs());
        }
        let (jb, jr) = (b.grid.integrate(&ib), b.grid.integrate(&ir));
        ratio.push(if jb == 0.0 && jr == 0.0 { 1.0 } else { jb / jr });
        bondi_rate.push(BONDI_PREFACTOR * jb);
        rad_rate.push(RADIATIVE_PREFACTOR * jr);
    }
    let rel = |r: f64| if scale > 0.0 { r / scale } else { r };
    let conv = RADIATIVE_PREFACTOR / BONDI_PREFACTOR.abs();
    let mut mag = 0.0f64;
    let mut signs = true;
    for (bw, ru) in bondi_rate.iter().zip(&rad_rate) {
        let a = bw.abs() * conv;
        let d = (a - ru.abs()).abs() / ru.abs().max(f64::MIN_POSITIVE);
        if ru.abs() > 0.0 {
            mag = mag.max(d);
        }
        // dM/du = sign · dM/dw.
        let in_u = orientation.sign() * bw;
        if in_u * ru < 0.0 {
            signs = false;
        }
    }
    Ok(EquivalenceReport {
        orientation,
        bondi_prefactor: BONDI_PREFACTOR,
        radiative_prefactor: RADIATIVE_PREFACTOR,
        max_pointwise_residual: rel(res),
        max_gravitational_residual: rel(res_g),
        max_em_residual: rel(res_em),
        integral_ratio: ratio,
        bondi_rate,
        radiative_rate: rad_rate,
        rate_magnitude_residual: mag,
        signs_consistent: signs,
    })
}
