//! Spherical-harmonic analysis and synthesis for scalars, 1-forms and STT
//! tensors.
//!
//! 1-forms and STT tensors are expanded in electric/magnetic families built
//! from the scalar harmonics:
//!
//! ```text
//! 1-forms:  E_lm = ∇Y_lm              B_lm = *E_lm        ‖·‖² = l(l+1)
//! tensors:  E_lm = D̂²_e Y_lm           B_lm = *E_lm        ‖·‖² = (l-1)l(l+1)(l+2)/2
//! ```
//!
//! where `D̂²_e f = ∇∇f - ½ γ̊ Δ̊f` is the traceless Hessian and `*` is the
//! left rotation by `r̂ ×` (see [`OneFormField::star`], [`SttField::star`]).
//! In the dyad both families share one shape: component one is
//! `a_lm(θ) trig_m(φ)`, component two is `b_lm(θ) trig_m'(φ)`; the magnetic
//! member is `(-b trig_m', a trig_m)`.

use std::sync::Arc;

use super::coeffs::ShCoefficients;
use super::field::{OneFormField, ScalarField, SttField};
use super::grid::{legendre_table, real_trig, tri, SphereGrid};
use crate::error::{Error, Result};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Spin {
    Vector,
    Tensor,
}

impl Spin {
    /// `(a_lm, b_lm)` radial profiles on ring `j`.
    #[inline]
    fn profiles(self, grid: &SphereGrid, j: usize, l: usize, m: usize) -> (f64, f64) {
        let p = grid.plm(j, l, m);
        let dp = grid.dplm(j, l, m);
        let s = grid.sin_theta()[j];
        let c = grid.cos_theta()[j];
        match self {
            Spin::Vector => (dp, p / s),
            Spin::Tensor => {
                let lam = (l * (l + 1)) as f64;
                let mf = m as f64;
                let a = -c / s * dp + (mf * mf / (s * s) - 0.5 * lam) * p;
                let b = dp / s - c * p / (s * s);
                (a, b)
            }
        }
    }

    /// Squared norm of the basis elements of degree `l`.
    fn norm_sq(self, l: usize) -> f64 {
        let lf = l as f64;
        match self {
            Spin::Vector => lf * (lf + 1.0),
            Spin::Tensor => 0.5 * (lf - 1.0) * lf * (lf + 1.0) * (lf + 2.0),
        }
    }

    fn min_degree(self) -> usize {
        match self {
            Spin::Vector => 1,
            Spin::Tensor => 2,
        }
    }

    /// Pointwise inner-product weight: tensors count `T_θθ`, `T_θφ` twice.
    fn metric(self) -> f64 {
        match self {
            Spin::Vector => 1.0,
            Spin::Tensor => 2.0,
        }
    }
}

fn check_lmax(grid: &SphereGrid, lmax: usize) -> Result<()> {
    if lmax > grid.band_limit() {
        return Err(Error::Resolution(format!(
            "requested degree {lmax} exceeds grid band limit {}",
            grid.band_limit()
        )));
    }
    Ok(())
}

#[inline]
fn signed_ms(l: usize) -> impl Iterator<Item = i64> {
    let li = l as i64;
    -li..=li
}

/// Scalar analysis `f ↦ a_lm` at the grid's band limit.
pub fn analyze(f: &ScalarField) -> ShCoefficients {
    analyze_to(f, f.grid().band_limit()).expect("grid band limit is always resolvable")
}

/// Scalar analysis truncated at `lmax <= grid band limit`.
pub fn analyze_to(f: &ScalarField, lmax: usize) -> Result<ShCoefficients> {
    let grid = f.grid().clone();
    check_lmax(&grid, lmax)?;
    let n_phi = grid.n_phi();
    let values = f.values();
    let rings: Vec<Vec<(usize, i64, f64)>> = par::map_range(grid.n_theta(), |j| {
        let row = &values[j * n_phi..(j + 1) * n_phi];
        let w = grid.area_weight(j);
        let li = lmax as i64;
        let fourier: Vec<f64> = (-li..=li)
            .map(|m| row.iter().zip(grid.trig_row(m)).map(|(v, t)| v * t).sum::<f64>())
            .collect();
        let mut out = Vec::with_capacity((lmax + 1) * (lmax + 1));
        for l in 0..=lmax {
            for m in signed_ms(l) {
                let p = grid.plm(j, l, m.unsigned_abs() as usize);
                out.push((l, m, w * p * fourier[(m + li) as usize]));
            }
        }
        out
    });
    let mut c = ShCoefficients::zeros(lmax);
    for ring in rings {
        for (l, m, v) in ring {
            c.set(l, m, c.get(l, m) + v);
        }
    }
    Ok(c)
}

/// Scalar synthesis `a_lm ↦ Σ a_lm Y_lm` at the nodes of `grid`.
pub fn synthesize(c: &ShCoefficients, grid: &Arc<SphereGrid>) -> Result<ScalarField> {
    check_lmax(grid, c.band_limit())?;
    let lmax = c.band_limit();
    let n_phi = grid.n_phi();
    let rows: Vec<Vec<f64>> = par::map_range(grid.n_theta(), |j| {
        let mut row = vec![0.0; n_phi];
        let li = lmax as i64;
        for m in -li..=li {
            let mu = m.unsigned_abs() as usize;
            let amp: f64 = (mu..=lmax).map(|l| c.get(l, m) * grid.plm(j, l, mu)).sum();
            if amp != 0.0 {
                for (r, t) in row.iter_mut().zip(grid.trig_row(m)) {
                    *r += amp * t;
                }
            }
        }
        row
    });
    ScalarField::new(grid.clone(), rows.concat())
}

/// Pointwise evaluation of `Σ a_lm Y_lm` at an arbitrary direction.
pub fn evaluate(c: &ShCoefficients, theta: f64, phi: f64) -> f64 {
    let lmax = c.band_limit();
    let (p, _) = legendre_table(lmax, theta.cos(), theta.sin());
    let mut total = 0.0;
    for (l, m, a) in c.iter() {
        if a == 0.0 {
            continue;
        }
        let (t, _) = real_trig(m, phi);
        total += a * p[tri(l, m.unsigned_abs() as usize)] * t;
    }
    total
}

/// Electric and magnetic coefficients of a two-component field.
pub(crate) fn analyze_spin(
    spin: Spin,
    grid: &Arc<SphereGrid>,
    c1: &[f64],
    c2: &[f64],
    lmax: usize,
) -> Result<(ShCoefficients, ShCoefficients)> {
    check_lmax(grid, lmax)?;
    let n_phi = grid.n_phi();
    let li = lmax as i64;
    let rings: Vec<Vec<(usize, i64, f64, f64)>> = par::map_range(grid.n_theta(), |j| {
        let r1 = &c1[j * n_phi..(j + 1) * n_phi];
        let r2 = &c2[j * n_phi..(j + 1) * n_phi];
        let proj = |row: &[f64], basis: &[f64]| row.iter().zip(basis).map(|(v, t)| v * t).sum::<f64>();
        let mut f1t = Vec::with_capacity(2 * lmax + 1);
        let mut f1d = Vec::with_capacity(2 * lmax + 1);
        let mut f2t = Vec::with_capacity(2 * lmax + 1);
        let mut f2d = Vec::with_capacity(2 * lmax + 1);
        for m in -li..=li {
            let t = grid.trig_row(m);
            let d = grid.dtrig_row(m);
            f1t.push(proj(r1, t));
            f1d.push(proj(r1, d));
            f2t.push(proj(r2, t));
            f2d.push(proj(r2, d));
        }
        let w = grid.area_weight(j) * spin.metric();
        let mut out = Vec::new();
        for l in spin.min_degree()..=lmax {
            for m in signed_ms(l) {
                let (a, b) = spin.profiles(grid, j, l, m.unsigned_abs() as usize);
                let k = (m + li) as usize;
                let e = a * f1t[k] + b * f2d[k];
                let bb = -b * f1d[k] + a * f2t[k];
                out.push((l, m, w * e, w * bb));
            }
        }
        out
    });
    let mut e = ShCoefficients::zeros(lmax);
    let mut b = ShCoefficients::zeros(lmax);
    for ring in rings {
        for (l, m, ve, vb) in ring {
            e.set(l, m, e.get(l, m) + ve);
            b.set(l, m, b.get(l, m) + vb);
        }
    }
    let e = e.map_degree(|l| if l < spin.min_degree() { 0.0 } else { 1.0 / spin.norm_sq(l) });
    let b = b.map_degree(|l| if l < spin.min_degree() { 0.0 } else { 1.0 / spin.norm_sq(l) });
    Ok((e, b))
}

/// Samples `Σ e_lm E_lm + b_lm B_lm` on `grid`.
pub(crate) fn synthesize_spin(
    spin: Spin,
    grid: &Arc<SphereGrid>,
    e: &ShCoefficients,
    b: &ShCoefficients,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let lmax = e.band_limit().max(b.band_limit());
    check_lmax(grid, lmax)?;
    let n_phi = grid.n_phi();
    let li = lmax as i64;
    let rows: Vec<(Vec<f64>, Vec<f64>)> = par::map_range(grid.n_theta(), |j| {
        let mut c1 = vec![0.0; n_phi];
        let mut c2 = vec![0.0; n_phi];
        for m in -li..=li {
            let mu = m.unsigned_abs() as usize;
            let (mut g1t, mut g1d, mut g2t, mut g2d) = (0.0, 0.0, 0.0, 0.0);
            for l in mu.max(spin.min_degree())..=lmax {
                let (a, bp) = spin.profiles(grid, j, l, mu);
                let ec = e.get(l, m);
                let bc = b.get(l, m);
                g1t += ec * a;
                g1d -= bc * bp;
                g2d += ec * bp;
                g2t += bc * a;
            }
            let t = grid.trig_row(m);
            let d = grid.dtrig_row(m);
            for k in 0..n_phi {
                c1[k] += g1t * t[k] + g1d * d[k];
                c2[k] += g2t * t[k] + g2d * d[k];
            }
        }
        (c1, c2)
    });
    let mut c1 = Vec::with_capacity(grid.len());
    let mut c2 = Vec::with_capacity(grid.len());
    for (r1, r2) in rows {
        c1.extend(r1);
        c2.extend(r2);
    }
    Ok((c1, c2))
}

/// Gradient/curl potentials `(f, g)` of `V = ∇f + *∇g` (mean-free, `l >= 1`).
pub fn analyze_oneform(v: &OneFormField) -> (ShCoefficients, ShCoefficients) {
    let g = v.grid();
    analyze_spin(Spin::Vector, g, v.theta_component(), v.phi_component(), g.band_limit())
        .expect("grid band limit is always resolvable")
}

/// `∇f + *∇g` on `grid`.
pub fn synthesize_oneform(
    f: &ShCoefficients,
    g: &ShCoefficients,
    grid: &Arc<SphereGrid>,
) -> Result<OneFormField> {
    let (a, b) = synthesize_spin(Spin::Vector, grid, f, g)?;
    OneFormField::new(grid.clone(), a, b)
}

/// Electric/magnetic potentials of an STT field (`l >= 2`).
pub(crate) fn analyze_stt(t: &SttField) -> (ShCoefficients, ShCoefficients) {
    let g = t.grid();
    analyze_spin(Spin::Tensor, g, t.tt(), t.tp(), g.band_limit())
        .expect("grid band limit is always resolvable")
}

/// `D̂²_e e + D̂²_b b` on `grid`.
pub fn recompose_stt(
    e: &ShCoefficients,
    b: &ShCoefficients,
    grid: &Arc<SphereGrid>,
) -> Result<SttField> {
    let (tt, tp) = synthesize_spin(Spin::Tensor, grid, e, b)?;
    SttField::new(grid.clone(), tt, tp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn y20(theta: f64) -> f64 {
        (5.0 / (16.0 * PI)).sqrt() * (3.0 * theta.cos().powi(2) - 1.0)
    }

    #[test]
    fn constant_analyses_to_a00() {
        let g = SphereGrid::new(8).unwrap();
        let c = analyze(&ScalarField::constant(&g, 1.0));
        assert!((c.get(0, 0) - (4.0 * PI).sqrt()).abs() < 1e-13);
        let rest: f64 = c.iter().filter(|(l, _, _)| *l > 0).map(|(_, _, a)| a.abs()).sum();
        assert!(rest < 1e-13);
    }

    #[test]
    fn y20_plus_half_y33() {
        let g = SphereGrid::new(6).unwrap();
        let f = ScalarField::from_fn(&g, |t, p| {
            let y33 = (35.0 / (32.0 * PI)).sqrt() * t.sin().powi(3) * (3.0 * p).cos();
            y20(t) + 0.5 * y33
        });
        let c = analyze(&f);
        assert!((c.get(2, 0) - 1.0).abs() < 1e-13);
        assert!((c.get(3, 3) - 0.5).abs() < 1e-13, "{}", c.get(3, 3));
        let others: f64 = c
            .iter()
            .filter(|&(l, m, _)| (l, m) != (2, 0) && (l, m) != (3, 3))
            .map(|(_, _, a)| a.abs())
            .sum();
        assert!(others < 1e-12);
    }

    #[test]
    fn zero_coefficients_synthesize_zero() {
        let g = SphereGrid::new(5).unwrap();
        let f = synthesize(&ShCoefficients::zeros(5), &g).unwrap();
        assert!(f.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn synthesize_rejects_too_high_degree() {
        let g = SphereGrid::new(4).unwrap();
        assert!(matches!(synthesize(&ShCoefficients::zeros(5), &g), Err(Error::Resolution(_))));
        let f = ScalarField::zeros(&g);
        assert!(matches!(analyze_to(&f, 5), Err(Error::Resolution(_))));
    }

    #[test]
    fn point_evaluation_matches_grid_synthesis() {
        let g = SphereGrid::new(7).unwrap();
        let c = ShCoefficients::from_modes(7, &[(3, -2, 0.4), (7, 5, -1.1), (0, 0, 2.0)]);
        let f = synthesize(&c, &g).unwrap();
        let (j, k) = (3, 11);
        let v = evaluate(&c, g.theta()[j], g.phi()[k]);
        assert!((v - f.values()[g.index(j, k)]).abs() < 1e-13);
    }

    #[test]
    fn oneform_round_trip() {
        let g = SphereGrid::minimal(9).unwrap();
        let f = ShCoefficients::from_modes(9, &[(1, 0, 1.0), (4, -3, 0.7), (9, 9, -0.2)]);
        let h = ShCoefficients::from_modes(9, &[(2, 1, 0.3), (9, -4, 0.5)]);
        let v = synthesize_oneform(&f, &h, &g).unwrap();
        let (f2, h2) = analyze_oneform(&v);
        assert!(f2.sub(&f).max_abs() < 1e-12);
        assert!(h2.sub(&h).max_abs() < 1e-12);
    }

    #[test]
    fn stt_round_trip_on_minimal_grid() {
        let g = SphereGrid::minimal(8).unwrap();
        let e = ShCoefficients::from_modes(8, &[(2, 0, 1.0), (5, 2, -0.4), (8, -8, 0.9)]);
        let b = ShCoefficients::from_modes(8, &[(3, -1, 0.6), (8, 7, 0.1)]);
        let t = recompose_stt(&e, &b, &g).unwrap();
        let (e2, b2) = analyze_stt(&t);
        assert!(e2.sub(&e).max_abs() < 1e-12, "{}", e2.sub(&e).max_abs());
        assert!(b2.sub(&b).max_abs() < 1e-12);
    }
}
