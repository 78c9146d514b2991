//! Radiative data at null infinity: energy flux, Bondi mass loss, the
//! shear/news relations and decay checks.
//!
//! All integrals over `u` use the sampled grid plus an optional power-law
//! tail beyond each end ([`TailModel`]); tails are reported separately.

mod decay;
mod payload;
mod radius;

use std::f64::consts::PI;

pub use decay::{decay_report, DecayFit, DecayReport, DECAY_SLACK};
pub use payload::{RadiativePayload, ScalarLimit};
pub(crate) use payload::{by_node, by_slice};
pub use radius::{area_radius, RadiusOptions, RadiusTrajectory};

use crate::error::{Error, Result};
use crate::par;
use crate::quadrature::{self, CumulativeRule, TailModel, Tails};
use crate::sphere::{ScalarField, SttField};

/// `∫|Ξ|² dμ` and `∫|A_F|² dμ` on one slice (`None` for a vacuum payload).
fn slice_energies(p: &RadiativePayload, k: usize) -> (f64, Option<f64>) {
    let g = p.grid();
    let grav = g.integrate(&p.xi()[k].norm_sq_pointwise());
    let em = p.a_f().map(|a| g.integrate(&a[k].norm_sq_pointwise()));
    (grav, em)
}

fn rate_from(grav: f64, em: Option<f64>) -> f64 {
    let mut s = grav;
    if let Some(e) = em {
        s += 0.5 * e;
    }
    s / (8.0 * PI)
}

/// `∂M/∂u = (1/8π) ∫ (|Ξ|² + ½|A_F|²) dμ` at the grid node `u`.
pub fn mass_loss_rate(p: &RadiativePayload, u: f64) -> Result<f64> {
    let k = p.index_of(u)?;
    let (g, e) = slice_energies(p, k);
    Ok(rate_from(g, e))
}

/// Mass-loss rate at every node of the u grid.
pub fn mass_loss_rates(p: &RadiativePayload) -> Vec<f64> {
    par::map_range(p.len(), |k| {
        let (g, e) = slice_energies(p, k);
        rate_from(g, e)
    })
}

/// Bondi mass sampled on the u grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MassCurve {
    pub u: Vec<f64>,
    pub mass: Vec<f64>,
    pub rate: Vec<f64>,
    pub m_minus: f64,
    pub m_plus: f64,
    /// Tail contributions to `M(u_0) - M(-∞)` and `M(+∞) - M(u_end)`.
    pub tails: Tails,
}

/// `M(u) = M(-∞) + ∫_{-∞}^u ∂M/∂u du'`: trapezoid on the grid plus tails.
pub fn mass_curve(p: &RadiativePayload, tail: TailModel) -> Result<MassCurve> {
    let u = p.u().to_vec();
    let rate = mass_loss_rates(p);
    let tails = quadrature::tails(&u, &rate, tail, "mass-loss rate")?;
    let cum = quadrature::cumulative_trapezoid(&u, &rate);
    let m0 = p.m_minus() + tails.left;
    let mass: Vec<f64> = cum.iter().map(|c| m0 + c).collect();
    if let Some(i) = mass.windows(2).position(|w| w[1] < w[0]) {
        return Err(Error::Consistency(format!("mass curve decreases at u = {}", u[i + 1])));
    }
    let m_plus = mass[mass.len() - 1] + tails.right;
    Ok(MassCurve {
        u,
        mass,
        rate,
        m_minus: p.m_minus(),
        m_plus,
        tails,
    })
}

/// Per-direction energy integrals over all of `u`.
#[derive(Debug, Clone)]
pub struct AngularEnergy {
    /// `∫ |Ξ|² du`.
    pub gravitational: ScalarField,
    /// `∫ |A_F|² du`, absent for a vacuum payload.
    pub electromagnetic: Option<ScalarField>,
    /// `∫ (|Ξ|² + ½|A_F|²) du`.
    pub total: ScalarField,
    /// Part of `total` contributed by the tails beyond the grid.
    pub tail: ScalarField,
}

/// Node-wise `∫ y du` (grid + tails) over a series of pointwise densities.
fn integrate_nodes(u: &[f64], slices: &[Vec<f64>], tail: TailModel, field: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let refs: Vec<&[f64]> = slices.iter().map(|s| s.as_slice()).collect();
    let w = quadrature::trapezoid_weights(u);
    let per: Vec<Result<(f64, f64)>> = par::map(&by_node(&refs), |y| {
        let t = quadrature::tails(u, y, tail, field)?;
        let body: f64 = w.iter().zip(y).map(|(a, b)| a * b).sum();
        Ok((body + t.total(), t.total()))
    });
    let mut total = Vec::with_capacity(per.len());
    let mut tails = Vec::with_capacity(per.len());
    for r in per {
        let (a, b) = r?;
        total.push(a);
        tails.push(b);
    }
    Ok((total, tails))
}

pub fn angular_energy(p: &RadiativePayload, tail: TailModel) -> Result<AngularEnergy> {
    let grid = p.grid();
    let xi2: Vec<Vec<f64>> = p.xi().iter().map(|t| t.norm_sq_pointwise()).collect();
    let (grav, grav_tail) = integrate_nodes(p.u(), &xi2, tail, "|Xi|^2")?;
    let gravitational = ScalarField::new(grid.clone(), grav)?;
    let mut total = gravitational.clone();
    let mut tail_field = ScalarField::new(grid.clone(), grav_tail)?;
    let electromagnetic = match p.a_f() {
        None => None,
        Some(a_f) => {
            let af2: Vec<Vec<f64>> = a_f.iter().map(|v| v.norm_sq_pointwise()).collect();
            let (em, em_tail) = integrate_nodes(p.u(), &af2, tail, "|A_F|^2")?;
            let em = ScalarField::new(grid.clone(), em)?;
            total = total.add(&em.scaled(0.5));
            tail_field = tail_field.add(&ScalarField::new(grid.clone(), em_tail)?.scaled(0.5));
            Some(em)
        }
    };
    Ok(AngularEnergy {
        gravitational,
        electromagnetic,
        total,
        tail: tail_field,
    })
}

/// `F(ω) = ∫ (|Ξ|² + ½|A_F|²) du`, the source of the memory equation.
pub fn memory_source(p: &RadiativePayload, tail: TailModel) -> Result<ScalarField> {
    Ok(angular_energy(p, tail)?.total)
}

/// Factor between [`flux_per_solid_angle`] and [`memory_source`]: the
/// former is `(1/8) ∫ (...) du / 4π`.
pub const FLUX_NORMALISATION: f64 = 1.0 / (32.0 * PI);

/// Energy radiated per unit solid angle, `(1/4π)·(1/8) ∫ (|Ξ|² + ½|A_F|²) du`.
pub fn flux_per_solid_angle(p: &RadiativePayload, tail: TailModel) -> Result<ScalarField> {
    Ok(memory_source(p, tail)?.scaled(FLUX_NORMALISATION))
}

/// Cumulative `∫_{-∞}^{u_k} y du'` of an STT series, node by node, with
/// tails: returns the series, the full integral and the two tails.
fn cumulative_stt(
    u: &[f64],
    series: &[SttField],
    tail: TailModel,
    field: &str,
) -> Result<(Vec<SttField>, SttField, SttField, SttField)> {
    let grid = series[0].grid().clone();
    let rule = CumulativeRule::new(u);
    let run = |comp: Vec<&[f64]>| -> Result<(Vec<Vec<f64>>, Vec<f64>, Vec<f64>, Vec<f64>)> {
        let per: Vec<Result<(Vec<f64>, f64, f64)>> = par::map(&by_node(&comp), |y| {
            let t = quadrature::tails(u, y, tail, field)?;
            let c: Vec<f64> = rule.apply(y).into_iter().map(|v| v + t.left).collect();
            Ok((c, t.left, t.right))
        });
        let mut nodes = Vec::with_capacity(per.len());
        let mut left = Vec::with_capacity(per.len());
        let mut right = Vec::with_capacity(per.len());
        let mut full = Vec::with_capacity(per.len());
        for r in per {
            let (c, l, rt) = r?;
            full.push(c[c.len() - 1] + rt);
            left.push(l);
            right.push(rt);
            nodes.push(c);
        }
        Ok((by_slice(&nodes), full, left, right))
    };
    let (ctt, ftt, ltt, rtt) = run(series.iter().map(|t| t.tt()).collect())?;
    let (ctp, ftp, ltp, rtp) = run(series.iter().map(|t| t.tp()).collect())?;
    let cum = ctt
        .into_iter()
        .zip(ctp)
        .map(|(a, b)| SttField::new(grid.clone(), a, b))
        .collect::<Result<Vec<_>>>()?;
    Ok((
        cum,
        SttField::new(grid.clone(), ftt, ftp)?,
        SttField::new(grid.clone(), ltt, ltp)?,
        SttField::new(grid, rtt, rtp)?,
    ))
}

/// Shear history `Σ(u)` and its limits.
#[derive(Debug, Clone)]
pub struct SigmaSeries {
    pub sigma: Vec<SttField>,
    pub sigma_minus: SttField,
    pub sigma_plus: SttField,
    /// `∫ Ξ du` over `(-∞, u_0]` and `[u_end, ∞)`.
    pub tail_left: SttField,
    pub tail_right: SttField,
}

impl SigmaSeries {
    /// `Σ⁺ - Σ⁻ = -∫ Ξ du`.
    pub fn jump(&self) -> SttField {
        self.sigma_plus.sub(&self.sigma_minus)
    }
}

/// `Σ(u) = Σ⁻ - ∫_{-∞}^u Ξ du'`, by a fourth-order cumulative rule.
pub fn sigma_from_xi(p: &RadiativePayload, tail: TailModel) -> Result<SigmaSeries> {
    let (cum, full, left, right) = cumulative_stt(p.u(), p.xi(), tail, "Xi")?;
    let s0 = p.sigma_minus();
    Ok(SigmaSeries {
        sigma: cum.iter().map(|c| s0.sub(c)).collect(),
        sigma_minus: s0.clone(),
        sigma_plus: s0.sub(&full),
        tail_left: left,
        tail_right: right,
    })
}

/// `Ξ(u) = -¼ ∫_{-∞}^u A_W du'`, taking `Ξ → 0` as `u → -∞`.
pub fn xi_from_aw(p: &RadiativePayload, tail: TailModel) -> Result<Vec<SttField>> {
    let a_w = p.a_w().ok_or_else(|| Error::AbsentField("A_W".into()))?;
    let (cum, _, _, _) = cumulative_stt(p.u(), a_w, tail, "A_W")?;
    Ok(cum.iter().map(|c| c.scaled(-0.25)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::linspace;
    use crate::sphere::{OneFormField, SphereGrid};

    /// STT field with `|T|² ≡ 1` everywhere.
    fn unit_tensor(g: &std::sync::Arc<SphereGrid>) -> SttField {
        SttField::from_fn(g, |_, _| (0.5f64.sqrt(), 0.0))
    }

    fn gaussian_payload(with_em: bool) -> RadiativePayload {
        let g = SphereGrid::new(4).unwrap();
        let u = linspace(-20.0, 20.0, 401);
        let t0 = unit_tensor(&g);
        // |Ξ|² = e^{-u²}
        let xi = u.iter().map(|x| t0.scaled((-0.5 * x * x).exp())).collect();
        let p = RadiativePayload::new(u.clone(), xi).unwrap();
        if !with_em {
            return p;
        }
        let a_f = u
            .iter()
            .map(|x| OneFormField::from_fn(&g, |_, _| ((-0.5 * x * x).exp(), 0.0)))
            .collect();
        p.with_a_f(a_f).unwrap()
    }

    #[test]
    fn zero_payload_has_no_flux() {
        let g = SphereGrid::new(4).unwrap();
        let p = RadiativePayload::zeros(&g, linspace(-5.0, 5.0, 21)).unwrap();
        assert_eq!(mass_loss_rate(&p, 0.0).unwrap(), 0.0);
        let m = mass_curve(&p, TailModel::PowerLaw).unwrap();
        assert!(m.mass.iter().all(|v| *v == 0.0) && m.m_plus == 0.0);
        assert_eq!(memory_source(&p, TailModel::PowerLaw).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn uniform_rates() {
        let p = gaussian_payload(true);
        // u = 0: |Ξ|² = 1, |A_F|² = 1.
        let r = mass_loss_rate(&p, 0.0).unwrap();
        assert!((r - 0.75).abs() < 1e-13, "{r}");
        assert!(matches!(mass_loss_rate(&p, 0.05), Err(Error::Range(_))));
    }

    #[test]
    fn gaussian_mass_budget() {
        let sp = PI.sqrt();
        let m = mass_curve(&gaussian_payload(false), TailModel::PowerLaw).unwrap();
        assert!((m.m_plus - m.m_minus - sp / 2.0).abs() < 1e-10);
        let m = mass_curve(&gaussian_payload(true), TailModel::PowerLaw).unwrap();
        assert!((m.m_plus - m.m_minus - 3.0 * sp / 4.0).abs() < 1e-10);
    }

    #[test]
    fn memory_source_and_flux_normalisations() {
        let p = gaussian_payload(false);
        let f = memory_source(&p, TailModel::PowerLaw).unwrap();
        assert!(f.values().iter().all(|v| (v - PI.sqrt()).abs() < 1e-10));
        let flux = flux_per_solid_angle(&p, TailModel::PowerLaw).unwrap();
        for (a, b) in f.values().iter().zip(flux.values()) {
            assert!((a - 32.0 * PI * b).abs() <= 1e-15 * a.abs());
        }
    }

    #[test]
    fn sigma_jump_of_gaussian_news() {
        let g = SphereGrid::new(4).unwrap();
        let u = linspace(-20.0, 20.0, 401);
        let t0 = SttField::from_fn(&g, |t, p| (t.cos(), (2.0 * p).sin()));
        let xi = u.iter().map(|x| t0.scaled((-x * x).exp())).collect();
        let p = RadiativePayload::new(u, xi).unwrap();
        let s = sigma_from_xi(&p, TailModel::PowerLaw).unwrap();
        let err = s.jump().add_scaled(&t0, PI.sqrt()).max_abs();
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn xi_requires_a_w() {
        let g = SphereGrid::new(4).unwrap();
        let p = RadiativePayload::zeros(&g, linspace(-1.0, 1.0, 5)).unwrap();
        assert!(matches!(xi_from_aw(&p, TailModel::Off), Err(Error::AbsentField(_))));
    }
}
