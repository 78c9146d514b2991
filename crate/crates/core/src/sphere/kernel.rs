//! Quadrature of the zonal singular kernel
//! `K f(ω) = ∫ f(ω') (1 - ω·ω')^{-1/2} dω'`.
//!
//! The singularity at `ω' = ω` is integrable (`K ~ √2/γ`). We subtract it:
//!
//! ```text
//! K f(ω) = ∫ K(ω·ω') (f(ω') - f(ω)) dω' + f(ω) μ_0
//! ```
//!
//! with `μ_0 = ∫ K dω'` from the operator table. The linear part of
//! `f(ω') - f(ω)`, namely `∇f(ω)·ω'`, integrates to zero against the zonal
//! kernel by symmetry, so it is subtracted too; what remains vanishes at
//! `ω' = ω`. That integrand is evaluated on a source grid rotated against
//! the target grid by half a node spacing in both θ and φ, so no source
//! node sits on a target.

use std::sync::Arc;

use super::constants::OperatorConstants;
use super::calculus::gradient;
use super::field::{OneFormField, ScalarField};
use super::grid::SphereGrid;
use super::transform::{analyze, evaluate};
use crate::error::{Error, Result};
use crate::par;

/// Closest approach `1 - ω·ω'` below which a source/target pair counts as
/// coincident.
pub const COLLISION_THRESHOLD: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelQuadrature {
    /// Source grid refinement factor in each angular direction.
    pub oversample: usize,
}

impl Default for KernelQuadrature {
    fn default() -> Self {
        KernelQuadrature { oversample: 3 }
    }
}

/// Kernel integral at every node of `f`'s grid, default quadrature.
pub fn kernel_integral(f: &ScalarField) -> Result<ScalarField> {
    kernel_integral_with(f, KernelQuadrature::default())
}

pub fn kernel_integral_with(f: &ScalarField, q: KernelQuadrature) -> Result<ScalarField> {
    let grid = f.grid();
    let os = q.oversample.max(1);
    let source = SphereGrid::with_resolution(grid.band_limit(), os * grid.n_theta(), os * grid.n_phi())?;
    let nodes = rotated_nodes(&source, grid);
    let coeffs = analyze(f);
    let samples: Vec<f64> = par::map(&nodes, |n| evaluate(&coeffs, n.theta, n.phi));
    let mu0 = OperatorConstants::builtin().mu(0)?;
    let grad = gradient(f);
    kernel_on_nodes(grid, f.values(), &grad, &nodes, &samples, mu0)
}

#[derive(Debug, Clone, Copy)]
struct SourceNode {
    x: [f64; 3],
    theta: f64,
    phi: f64,
    weight: f64,
}

/// Nodes of `source` rotated by half of `target`'s node spacing about the
/// y axis, then about the z axis.
fn rotated_nodes(source: &Arc<SphereGrid>, target: &SphereGrid) -> Vec<SourceNode> {
    let a = 0.5 * std::f64::consts::PI / target.n_theta() as f64;
    let b = std::f64::consts::PI / target.n_phi() as f64;
    let (sa, ca) = a.sin_cos();
    let (sb, cb) = b.sin_cos();
    let mut out = Vec::with_capacity(source.len());
    for j in 0..source.n_theta() {
        let w = source.area_weight(j);
        for k in 0..source.n_phi() {
            let [x, y, z] = source.unit_vector(j, k);
            let (x1, z1) = (ca * x + sa * z, -sa * x + ca * z);
            let (x2, y2) = (cb * x1 - sb * y, sb * x1 + cb * y);
            let v = [x2, y2, z1];
            out.push(SourceNode {
                x: v,
                theta: z1.clamp(-1.0, 1.0).acos(),
                phi: y2.atan2(x2),
                weight: w,
            });
        }
    }
    out
}

fn kernel_on_nodes(
    grid: &Arc<SphereGrid>,
    target_values: &[f64],
    grad: &OneFormField,
    nodes: &[SourceNode],
    samples: &[f64],
    mu0: f64,
) -> Result<ScalarField> {
    let n_phi = grid.n_phi();
    let rows: Vec<Result<Vec<f64>>> = par::map_range(grid.n_theta(), |j| {
        let mut row = Vec::with_capacity(n_phi);
        for k in 0..n_phi {
            let w = grid.unit_vector(j, k);
            let i = grid.index(j, k);
            let fw = target_values[i];
            let (ct, st) = (grid.cos_theta()[j], grid.sin_theta()[j]);
            let (sp, cp) = grid.phi()[k].sin_cos();
            let (gt, gp) = (grad.theta_component()[i], grad.phi_component()[i]);
            let d = [gt * ct * cp - gp * sp, gt * ct * sp + gp * cp, -gt * st];
            let mut acc = 0.0;
            for (n, &fs) in nodes.iter().zip(samples) {
                let gap = 1.0 - (w[0] * n.x[0] + w[1] * n.x[1] + w[2] * n.x[2]);
                if gap < COLLISION_THRESHOLD {
                    return Err(Error::GridCollision { separation: gap.max(0.0) });
                }
                let linear = d[0] * n.x[0] + d[1] * n.x[1] + d[2] * n.x[2];
                acc += n.weight * (fs - fw - linear) / gap.sqrt();
            }
            row.push(acc + fw * mu0);
        }
        Ok(row)
    });
    let mut values = Vec::with_capacity(grid.len());
    for r in rows {
        values.extend(r?);
    }
    ScalarField::new(grid.clone(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::{synthesize, ShCoefficients};

    #[test]
    fn zero_maps_to_zero() {
        let g = SphereGrid::new(6).unwrap();
        let k = kernel_integral(&ScalarField::zeros(&g)).unwrap();
        assert_eq!(k.max_abs(), 0.0);
    }

    #[test]
    fn constant_maps_to_mu0() {
        let g = SphereGrid::new(6).unwrap();
        let k = kernel_integral(&ScalarField::constant(&g, 1.0)).unwrap();
        let mu0 = 4.0 * std::f64::consts::PI * 2f64.sqrt();
        assert!(k.values().iter().all(|v| (v - mu0).abs() < 1e-12));
    }

    #[test]
    fn harmonic_is_an_approximate_eigenfunction() {
        let g = SphereGrid::new(8).unwrap();
        let f = synthesize(&ShCoefficients::from_modes(8, &[(3, 2, 1.0)]), &g).unwrap();
        let k = kernel_integral(&f).unwrap();
        let mu3 = OperatorConstants::builtin().mu(3).unwrap();
        let err = k.sub(&f.scaled(mu3)).norm() / (mu3 * f.norm());
        assert!(err < 1e-2, "{err}");
    }
}
