//! Permanent memory `Σ⁺ - Σ⁻` from radiative data.
//!
//! The jump is fixed, in its electric `l >= 2` part, by
//!
//! ```text
//! Δ̊Φ = F - F̄,        div̊(Σ⁺ - Σ⁻) = ∇̊Φ,
//! F(ω) = ∫ (|Ξ|² + ½|A_F|²) du.
//! ```
//!
//! [`solve_memory`] solves that system and compares it with the direct
//! integral `-∫ Ξ du`; [`omega_prime_series`] evaluates the kernel formula
//! for `Ω′(u)` whose jump reproduces `F - F̄`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::par;
use crate::quadrature::{self, TailModel};
use crate::radiation::{by_node, memory_source, sigma_from_xi, RadiativePayload};
use crate::sphere::{
    analyze, decompose_stt, divergence_stt, gradient, invert_div_stt_potentials, kernel_integral_with,
    laplacian, recompose_stt, solve_poisson_relative_to, synthesize, KernelQuadrature, OperatorConstants,
    ScalarField, ShCoefficients, SttField,
};

#[derive(Debug, Clone)]
pub struct MemoryResult {
    /// `F(ω)`.
    pub source: ScalarField,
    pub source_mean: f64,
    /// Mean-free solution of `Δ̊Φ = F - F̄`.
    pub phi: ScalarField,
    /// Electric `l >= 2` solution of `div̊Σ = ∇̊Φ`; magnetic part zero.
    pub sigma_jump_constraint: SttField,
    /// Electric potentials of `sigma_jump_constraint`.
    pub constraint_potentials: ShCoefficients,
    /// `-∫ Ξ du`.
    pub sigma_jump_direct: SttField,
    /// Electric potentials of `sigma_jump_direct`.
    pub direct_potentials: ShCoefficients,
    /// Magnetic potentials of `sigma_jump_direct` (unconstrained by the
    /// memory equation; reported, not compared).
    pub direct_magnetic_potentials: ShCoefficients,
    /// `(∫ (e_constraint - e_direct)² dμ)^{1/2}` over electric potentials.
    pub residual: f64,
    /// `‖Δ̊Φ - (F - F̄)‖ / ‖F‖`.
    pub poisson_residual: f64,
    /// `‖div̊Σ_constraint - ∇̊Φ_{l>=2}‖ / ‖∇̊Φ‖`.
    pub hodge_residual: f64,
    /// Norm of the `l = 1` part of `∇̊Φ` that has no STT preimage.
    pub dipole_removed: f64,
    pub warnings: Vec<String>,
}

/// Solves the memory equation for `p` and compares with `-∫ Ξ du`.
pub fn solve_memory(p: &RadiativePayload, tail: TailModel) -> Result<MemoryResult> {
    let grid = p.grid();
    let source = memory_source(p, tail)?;
    let source_mean = source.mean();
    let centred = source.map(|v| v - source_mean);
    let source_norm = source.norm();
    let poisson = solve_poisson_relative_to(&centred, source_norm)?;
    let phi = poisson.phi;
    let grad = gradient(&phi);
    let (e_c, dipole) = invert_div_stt_potentials(&grad, false)?;
    let zero = ShCoefficients::zeros(e_c.band_limit());
    let sigma_c = recompose_stt(&e_c, &zero, grid)?;

    let mut warnings = Vec::new();
    let grad_norm = grad.norm();
    if dipole > 1e-8 * grad_norm.max(f64::MIN_POSITIVE) {
        warnings.push(format!(
            "grad(Phi) has l=1 content of norm {dipole:.3e}; projected out (no STT preimage)"
        ));
    }

    let sigma = sigma_from_xi(p, tail)?;
    let sigma_d = sigma.jump();
    let direct = decompose_stt(&sigma_d);
    if direct.truncation > 1e-8 {
        warnings.push(format!(
            "direct jump is not resolved by l>=2 potentials (relative truncation {:.3e})",
            direct.truncation
        ));
    }
    let residual = e_c.sub(&direct.electric).norm();

    let poisson_residual = if source_norm > 0.0 {
        laplacian(&phi).sub(&centred).norm() / source_norm
    } else {
        0.0
    };
    let hodge_residual = if grad_norm > 0.0 {
        let c = analyze(&phi).map_degree(|l| if l < 2 { 0.0 } else { 1.0 });
        let target = gradient(&synthesize(&c, grid)?);
        divergence_stt(&sigma_c)?.sub(&target).norm() / grad_norm
    } else {
        0.0
    };

    Ok(MemoryResult {
        source,
        source_mean,
        phi,
        sigma_jump_constraint: sigma_c,
        constraint_potentials: e_c,
        sigma_jump_direct: sigma_d,
        direct_potentials: direct.electric,
        direct_magnetic_potentials: direct.magnetic,
        residual,
        poisson_residual,
        hodge_residual,
        dipole_removed: dipole,
        warnings,
    })
}

#[derive(Debug, Clone)]
pub struct OmegaDiagnostics {
    pub u: Vec<f64>,
    /// `Ω′(u_k)` at every grid node.
    pub omega_prime: Vec<ScalarField>,
    /// `Ω′(u_end) - Ω′(u_0)`.
    pub jump: ScalarField,
    /// u-independent kernel part of `Ω′`.
    pub kernel_term: ScalarField,
    /// Relative kernel-quadrature error measured on the top zonal harmonic.
    pub kernel_accuracy: f64,
    pub warnings: Vec<String>,
}

/// Kernel accuracy above which a warning is attached.
pub const KERNEL_ACCURACY_TARGET: f64 = 1e-2;

/// `Ω′(u) = -(2^{-3/2}/4π) ∫ du' ∫ g(u',ω')(1 - ω·ω')^{-1/2} dω'
///          + ½ ∫ sgn(u - u') g(u',ω) du'`
/// with `g = |Ξ|² - avg|Ξ|² + ½(|A_F|² - avg|A_F|²)`.
///
/// The sign of the second term is the one for which `Ω′⁺ - Ω′⁻ = ∫ g du`.
/// The kernel term does not depend on `u`, so it is evaluated once on
/// `∫ g du'`.
pub fn omega_prime_series(p: &RadiativePayload, tail: TailModel, q: KernelQuadrature) -> Result<OmegaDiagnostics> {
    let grid = p.grid();
    let u = p.u();
    let slices: Vec<Vec<f64>> = par::map_range(p.len(), |k| {
        let mut g = p.xi()[k].norm_sq_pointwise();
        if let Some(a_f) = p.a_f() {
            for (v, a) in g.iter_mut().zip(a_f[k].norm_sq_pointwise()) {
                *v += 0.5 * a;
            }
        }
        let mean = grid.integrate(&g) / (4.0 * PI);
        g.iter_mut().for_each(|v| *v -= mean);
        g
    });
    let refs: Vec<&[f64]> = slices.iter().map(|s| s.as_slice()).collect();
    let per: Vec<Result<(Vec<f64>, f64)>> = par::map(&by_node(&refs), |y| {
        let t = quadrature::tails(u, y, tail, "mean-free flux density")?;
        let c: Vec<f64> = quadrature::cumulative_trapezoid(u, y)
            .into_iter()
            .map(|v| v + t.left)
            .collect();
        let total = c[c.len() - 1] + t.right;
        Ok((c, total))
    });
    let mut cum = Vec::with_capacity(per.len());
    let mut total = Vec::with_capacity(per.len());
    for r in per {
        let (c, t) = r?;
        cum.push(c);
        total.push(t);
    }
    let integral = ScalarField::new(grid.clone(), total.clone())?;
    let k_factor = -1.0 / (2f64.powf(1.5) * 4.0 * PI);
    let kernel_term = kernel_integral_with(&integral, q)?.scaled(k_factor);

    let omega_prime: Vec<ScalarField> = (0..p.len())
        .map(|k| {
            let vals: Vec<f64> = (0..grid.len())
                .map(|i| kernel_term.values()[i] + 0.5 * (2.0 * cum[i][k] - total[i]))
                .collect();
            ScalarField::new(grid.clone(), vals)
        })
        .collect::<Result<_>>()?;
    let jump = omega_prime[p.len() - 1].sub(&omega_prime[0]);

    let kernel_accuracy = kernel_self_check(grid, q)?;
    let mut warnings = Vec::new();
    if kernel_accuracy > KERNEL_ACCURACY_TARGET {
        warnings.push(format!(
            "kernel quadrature error {kernel_accuracy:.2e} on the top harmonic exceeds {KERNEL_ACCURACY_TARGET:.0e}"
        ));
    }
    Ok(OmegaDiagnostics {
        u: u.to_vec(),
        omega_prime,
        jump,
        kernel_term,
        kernel_accuracy,
        warnings,
    })
}

/// Relative error of the kernel quadrature on `Y_{L0}` against `μ_L`.
fn kernel_self_check(grid: &std::sync::Arc<crate::sphere::SphereGrid>, q: KernelQuadrature) -> Result<f64> {
    let l = grid.band_limit();
    let y = synthesize(&ShCoefficients::from_modes(l, &[(l, 0, 1.0)]), grid)?;
    let mu = OperatorConstants::builtin().mu(l)?;
    let k = kernel_integral_with(&y, q)?;
    Ok(k.sub(&y.scaled(mu)).norm() / (mu * y.norm()))
}

/// Test-mass displacement `Δx = -(d0/r)(Σ⁺ - Σ⁻)` over the sphere.
pub fn memory_displacement_field(sigma_jump: &SttField, d0: f64, r: f64) -> Result<SttField> {
    if !(d0 > 0.0) || !(r > 0.0) {
        return Err(Error::Domain(format!("d0 = {d0} and r = {r} must be positive")));
    }
    Ok(sigma_jump.scaled(-d0 / r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::linspace;
    use crate::sphere::{OneFormField, SphereGrid};

    #[test]
    fn zero_payload_has_zero_memory() {
        let g = SphereGrid::new(6).unwrap();
        let p = RadiativePayload::zeros(&g, linspace(-10.0, 10.0, 41)).unwrap();
        let m = solve_memory(&p, TailModel::PowerLaw).unwrap();
        assert_eq!(m.phi.max_abs(), 0.0);
        assert_eq!(m.sigma_jump_constraint.max_abs(), 0.0);
        assert_eq!(m.residual, 0.0);
        let o = omega_prime_series(&p, TailModel::PowerLaw, KernelQuadrature::default()).unwrap();
        assert!(o.omega_prime.iter().all(|f| f.max_abs() == 0.0));
    }

    #[test]
    fn uniform_flux_gives_no_memory() {
        let g = SphereGrid::new(6).unwrap();
        let u = linspace(-10.0, 10.0, 201);
        let a_f: Vec<OneFormField> = u
            .iter()
            .map(|x| OneFormField::from_fn(&g, |_, _| (0.0, (-x * x).exp())))
            .collect();
        let p = RadiativePayload::zeros(&g, u).unwrap().with_a_f(a_f).unwrap();
        let m = solve_memory(&p, TailModel::PowerLaw).unwrap();
        assert!(m.phi.max_abs() < 1e-14);
        let o = omega_prime_series(&p, TailModel::PowerLaw, KernelQuadrature::default()).unwrap();
        assert!(o.jump.max_abs() < 1e-14);
    }

    #[test]
    fn displacement_scaling() {
        let g = SphereGrid::new(4).unwrap();
        let s = SttField::from_fn(&g, |_, _| (1.0, 0.0));
        let d = memory_displacement_field(&s, 1.0, 100.0).unwrap();
        assert!(d.tt().iter().all(|v| (v + 0.01).abs() < 1e-16));
        let d2 = memory_displacement_field(&s, 2.0, 100.0).unwrap();
        assert!((d2.tt()[0] - 2.0 * d.tt()[0]).abs() < 1e-16);
        assert!(memory_displacement_field(&s, 0.0, 1.0).is_err());
        assert!(memory_displacement_field(&s, 1.0, -1.0).is_err());
    }
}
