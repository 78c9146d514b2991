//! Synthetic radiative data: a separable profile `g(u)` times fixed angular
//! patterns,
//!
//! ```text
//! Ξ = a·g(u)·T(ω),   A_F = a_F·g(u)·V(ω),   A_W = -4a·g′(u)·T(ω),
//! ```
//!
//! with `T = D̂²_e e + D̂²_b b` and `V = ∇e′ + *∇b′` built from mode lists.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bondi::BondiWaveform;
use crate::error::{Error, Result};
use crate::quadrature::{interpolate_cubic, linspace, DerivativeRule};
use crate::radiation::RadiativePayload;
use crate::sphere::{recompose_stt, synthesize, synthesize_oneform, ShCoefficients, SphereGrid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub l: usize,
    pub m: i64,
    pub weight: f64,
}

impl Mode {
    pub fn new(l: usize, m: i64, weight: f64) -> Self {
        Mode { l, m, weight }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Profile {
    /// `exp(-(u/width)²)`.
    Gaussian { width: f64 },
    /// `(1 + (u/width)²)^{-exponent/2}`, decaying like `|u|^{-exponent}`.
    PowerLaw { exponent: f64, width: f64 },
    /// Cubic interpolation of `(u, g)` samples; must cover the u grid.
    Custom { u: Vec<f64>, g: Vec<f64> },
}

impl Default for Profile {
    fn default() -> Self {
        Profile::PowerLaw { exponent: 1.5, width: 1.0 }
    }
}

impl Profile {
    fn validate(&self, u: &[f64]) -> Result<()> {
        match self {
            Profile::Gaussian { width } if !(*width > 0.0) => Err(Error::Spec(format!("gaussian width {width} must be positive"))),
            Profile::PowerLaw { exponent, width } if !(*width > 0.0 && *exponent > 0.0) => Err(Error::Spec(format!(
                "power-law exponent {exponent} and width {width} must be positive"
            ))),
            Profile::Custom { u: tu, g } => {
                if tu.len() != g.len() || tu.len() < 4 {
                    return Err(Error::Spec(format!(
                        "custom profile needs matching u/g tables of at least 4 samples, got {} and {}",
                        tu.len(),
                        g.len()
                    )));
                }
                if tu.windows(2).any(|w| !(w[1] > w[0])) || g.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Spec("custom profile table must be finite with increasing u".into()));
                }
                if u[0] < tu[0] || u[u.len() - 1] > tu[tu.len() - 1] {
                    return Err(Error::Spec(format!(
                        "custom profile covers [{}, {}] but the u grid spans [{}, {}]",
                        tu[0],
                        tu[tu.len() - 1],
                        u[0],
                        u[u.len() - 1]
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// `(g, g′)` sampled on `u`.
    fn sample(&self, u: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        Ok(match self {
            Profile::Gaussian { width } => u
                .iter()
                .map(|x| {
                    let s = x / width;
                    let g = (-s * s).exp();
                    (g, -2.0 * s / width * g)
                })
                .unzip(),
            Profile::PowerLaw { exponent, width } => u
                .iter()
                .map(|x| {
                    let s = x / width;
                    let b = 1.0 + s * s;
                    (b.powf(-0.5 * exponent), -exponent * s / width * b.powf(-0.5 * exponent - 1.0))
                })
                .unzip(),
            Profile::Custom { u: tu, g: tg } => {
                let g: Vec<f64> = u.iter().map(|x| interpolate_cubic(tu, tg, *x)).collect();
                let dg = DerivativeRule::new(u)?.apply(&g);
                (g, dg)
            }
        })
    }
}

fn default_band_limit() -> usize {
    16
}
fn default_u_min() -> f64 {
    -20.0
}
fn default_u_max() -> f64 {
    20.0
}
fn default_samples() -> usize {
    401
}
fn default_amplitude() -> f64 {
    1.0
}
fn default_xi_electric() -> Vec<Mode> {
    vec![Mode::new(2, 0, 1.0)]
}
fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    #[serde(default = "default_band_limit")]
    pub band_limit: usize,
    #[serde(default = "default_u_min")]
    pub u_min: f64,
    #[serde(default = "default_u_max")]
    pub u_max: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub profile: Profile,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    #[serde(default)]
    pub em_amplitude: f64,
    #[serde(default = "default_xi_electric")]
    pub xi_electric: Vec<Mode>,
    #[serde(default)]
    pub xi_magnetic: Vec<Mode>,
    #[serde(default)]
    pub af_electric: Vec<Mode>,
    #[serde(default)]
    pub af_magnetic: Vec<Mode>,
    /// Random modes added to each of the four channels, weights uniform in
    /// `[-1, 1]`, drawn from `seed`.
    #[serde(default)]
    pub random_modes: usize,
    #[serde(default)]
    pub seed: u64,
    /// Store the analytic `A_W = -4 ∂Ξ/∂u`.
    #[serde(default = "default_true")]
    pub store_a_w: bool,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            band_limit: default_band_limit(),
            u_min: default_u_min(),
            u_max: default_u_max(),
            samples: default_samples(),
            profile: Profile::default(),
            amplitude: 1.0,
            em_amplitude: 0.0,
            xi_electric: default_xi_electric(),
            xi_magnetic: Vec::new(),
            af_electric: Vec::new(),
            af_magnetic: Vec::new(),
            random_modes: 0,
            seed: 0,
            store_a_w: true,
        }
    }
}

fn coefficients(
    channel: &str,
    modes: &[Mode],
    l_min: usize,
    band_limit: usize,
    extra: usize,
    rng: &mut ChaCha8Rng,
) -> Result<ShCoefficients> {
    let mut c = ShCoefficients::zeros(band_limit);
    for md in modes {
        if md.l < l_min || md.l > band_limit || md.m.unsigned_abs() as usize > md.l {
            return Err(Error::Spec(format!(
                "{channel} mode (l={}, m={}) outside l ∈ [{l_min}, {band_limit}], |m| <= l",
                md.l, md.m
            )));
        }
        if !md.weight.is_finite() {
            return Err(Error::Spec(format!("{channel} mode (l={}, m={}) has non-finite weight", md.l, md.m)));
        }
        c.set(md.l, md.m, c.get(md.l, md.m) + md.weight);
    }
    if extra > 0 && band_limit < l_min {
        return Err(Error::Spec(format!("band limit {band_limit} admits no {channel} modes")));
    }
    for _ in 0..extra {
        let l = rng.gen_range(l_min..=band_limit);
        let m = rng.gen_range(-(l as i64)..=l as i64);
        let w: f64 = rng.gen_range(-1.0..=1.0);
        c.set(l, m, c.get(l, m) + w);
    }
    Ok(c)
}

impl SynthSpec {
    pub fn u_grid(&self) -> Result<Vec<f64>> {
        if self.samples < 3 || !(self.u_max > self.u_min) || !self.u_min.is_finite() || !self.u_max.is_finite() {
            return Err(Error::Spec(format!(
                "u grid needs u_min < u_max and at least 3 samples, got [{}, {}] with {}",
                self.u_min, self.u_max, self.samples
            )));
        }
        Ok(linspace(self.u_min, self.u_max, self.samples))
    }
}

/// Deterministic payload for `spec` on the dealiased grid.
pub fn synth(spec: &SynthSpec) -> Result<RadiativePayload> {
    let grid = SphereGrid::new(spec.band_limit).map_err(|e| Error::Spec(e.to_string()))?;
    synth_on(spec, &grid)
}

pub fn synth_on(spec: &SynthSpec, grid: &Arc<SphereGrid>) -> Result<RadiativePayload> {
    let u = spec.u_grid()?;
    spec.profile.validate(&u)?;
    if !spec.amplitude.is_finite() || !spec.em_amplitude.is_finite() {
        return Err(Error::Spec("amplitudes must be finite".into()));
    }
    let l = spec.band_limit.min(grid.band_limit());
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.random_modes;
    let xe = coefficients("xi_electric", &spec.xi_electric, 2, l, n, &mut rng)?;
    let xb = coefficients("xi_magnetic", &spec.xi_magnetic, 2, l, n, &mut rng)?;
    let ae = coefficients("af_electric", &spec.af_electric, 1, l, n, &mut rng)?;
    let ab = coefficients("af_magnetic", &spec.af_magnetic, 1, l, n, &mut rng)?;

    let t = recompose_stt(&xe, &xb, grid)?;
    let v = synthesize_oneform(&ae, &ab, grid)?;
    let (g, dg) = spec.profile.sample(&u)?;
    let xi = g.iter().map(|s| t.scaled(spec.amplitude * s)).collect();
    let mut p = RadiativePayload::new(u, xi)?;
    if spec.em_amplitude != 0.0 {
        p = p.with_a_f(g.iter().map(|s| v.scaled(spec.em_amplitude * s)).collect())?;
    }
    if spec.store_a_w {
        p = p.with_a_w(dg.iter().map(|s| t.scaled(-4.0 * spec.amplitude * s)).collect())?;
    }
    Ok(p)
}

/// Random band-limited Bondi waveform: each of `c, d, X, Y` is a sum of
/// `terms` random harmonics with degree `<= band_limit`, each multiplied by
/// a randomly shifted and scaled Gaussian in `w`.
pub fn random_bondi(grid: &Arc<SphereGrid>, w: Vec<f64>, terms: usize, seed: u64) -> Result<BondiWaveform> {
    let l = grid.band_limit();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut series = || -> Result<Vec<crate::sphere::ScalarField>> {
        let mut out = vec![crate::sphere::ScalarField::zeros(grid); w.len()];
        for _ in 0..terms {
            let deg = rng.gen_range(0..=l);
            let m = rng.gen_range(-(deg as i64)..=deg as i64);
            let amp: f64 = rng.gen_range(-1.0..=1.0);
            let centre: f64 = rng.gen_range(-2.0..=2.0);
            let width: f64 = rng.gen_range(0.5..=2.0);
            let y = synthesize(&ShCoefficients::from_modes(l, &[(deg, m, amp)]), grid)?;
            for (f, x) in out.iter_mut().zip(&w) {
                let s = (x - centre) / width;
                *f = f.add(&y.scaled((-s * s).exp()));
            }
        }
        Ok(out)
    };
    let c = series()?;
    let d = series()?;
    let x = series()?;
    let y = series()?;
    BondiWaveform::new(w, c, d, x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::TailModel;
    use crate::radiation::{decay_report, sigma_from_xi};

    fn small() -> SynthSpec {
        SynthSpec { band_limit: 6, ..SynthSpec::default() }
    }

    #[test]
    fn zero_amplitude_is_zero_payload() {
        let p = synth(&SynthSpec { amplitude: 0.0, ..small() }).unwrap();
        assert!(p.xi().iter().all(|t| t.max_abs() == 0.0));
        assert!(p.a_f().is_none());
    }

    #[test]
    fn seeded_is_deterministic() {
        let s = SynthSpec { random_modes: 3, seed: 7, em_amplitude: 0.5, ..small() };
        assert_eq!(synth(&s).unwrap(), synth(&s).unwrap());
        let other = synth(&SynthSpec { seed: 8, ..s.clone() }).unwrap();
        assert_ne!(synth(&s).unwrap(), other);
    }

    #[test]
    fn gaussian_jump_is_root_pi_times_pattern() {
        let s = SynthSpec { profile: Profile::Gaussian { width: 1.0 }, ..small() };
        let p = synth(&s).unwrap();
        let jump = sigma_from_xi(&p, TailModel::PowerLaw).unwrap().jump();
        let t = recompose_stt(
            &ShCoefficients::from_modes(6, &[(2, 0, 1.0)]),
            &ShCoefficients::zeros(6),
            p.grid(),
        )
        .unwrap();
        let err = jump.add_scaled(&t, std::f64::consts::PI.sqrt()).max_abs() / t.max_abs();
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn decay_defaults_pass_and_slow_tail_fails() {
        assert!(decay_report(&synth(&small()).unwrap()).unwrap().pass());
        let slow = SynthSpec { profile: Profile::PowerLaw { exponent: 1.0, width: 1.0 }, ..small() };
        let r = decay_report(&synth(&slow).unwrap()).unwrap();
        assert!(!r.get("Xi").unwrap().pass);
    }

    #[test]
    fn invalid_modes_are_spec_errors() {
        for bad in [Mode::new(1, 0, 1.0), Mode::new(7, 0, 1.0), Mode::new(3, 4, 1.0)] {
            let s = SynthSpec { xi_electric: vec![bad], ..small() };
            assert!(matches!(synth(&s), Err(Error::Spec(_))), "{bad:?}");
        }
        let s = SynthSpec { af_magnetic: vec![Mode::new(0, 0, 1.0)], ..small() };
        assert!(matches!(synth(&s), Err(Error::Spec(_))));
    }
}
