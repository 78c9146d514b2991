//! Differential operators and elliptic inverses, all routed through the
//! scalar potentials of [`super::transform`].

use super::coeffs::ShCoefficients;
use super::constants::OperatorConstants;
use super::field::{OneFormField, ScalarField, SttField};
use super::transform::{analyze, analyze_oneform, analyze_stt, recompose_stt, synthesize, synthesize_oneform};
use crate::error::{Error, Result};

/// Relative tolerance on the mean of a Poisson source.
pub const TOL_MEAN: f64 = 1e-8;
/// Relative tolerance on magnetic and `l = 1` content fed to [`invert_div_stt`].
pub const TOL_STT_SOURCE: f64 = 1e-8;

fn eig(l: usize) -> f64 {
    -((l * (l + 1)) as f64)
}

/// `Δ̊f`, spectrally: `a_lm ↦ -l(l+1) a_lm`.
pub fn laplacian(f: &ScalarField) -> ScalarField {
    let c = analyze(f).map_degree(eig);
    synthesize(&c, f.grid()).expect("same band limit")
}

/// Solution of `Δ̊Φ = f - f̄` together with the mean that was removed.
#[derive(Debug, Clone)]
pub struct PoissonSolution {
    pub phi: ScalarField,
    pub removed_mean: f64,
}

/// Mean-free `Φ` with `Δ̊Φ = f - f̄`.
///
/// `f` must already be mean-free up to `TOL_MEAN · ‖f‖`; a larger mean
/// means the caller passed a raw source and is reported as an error.
pub fn solve_poisson(f: &ScalarField) -> Result<ScalarField> {
    solve_poisson_detailed(f).map(|s| s.phi)
}

pub fn solve_poisson_detailed(f: &ScalarField) -> Result<PoissonSolution> {
    solve_poisson_relative_to(f, f.norm())
}

/// As [`solve_poisson_detailed`], with the mean tolerance measured against
/// `reference` instead of `‖f‖`. Callers that form `f = F - F̄` themselves
/// pass `‖F‖`, so that a source which is zero up to rounding is accepted.
pub fn solve_poisson_relative_to(f: &ScalarField, reference: f64) -> Result<PoissonSolution> {
    let mean = f.mean();
    let tolerance = TOL_MEAN * reference;
    if mean.abs() > tolerance {
        return Err(Error::NonMeanFreeSource { mean, tolerance });
    }
    let c = analyze(f).map_degree(|l| if l == 0 { 0.0 } else { 1.0 / eig(l) });
    Ok(PoissonSolution {
        phi: synthesize(&c, f.grid()).expect("same band limit"),
        removed_mean: mean,
    })
}

/// `∇̊f` in the dyad: `(∂_θ f, ∂_φ f / sinθ)`.
pub fn gradient(f: &ScalarField) -> OneFormField {
    let c = analyze(f);
    let zero = ShCoefficients::zeros(c.band_limit());
    synthesize_oneform(&c, &zero, f.grid()).expect("same band limit")
}

/// `div̊V`. For `V = ∇̊f + *∇̊g` this is `Δ̊f`.
pub fn divergence_oneform(v: &OneFormField) -> ScalarField {
    let (f, _) = analyze_oneform(v);
    synthesize(&f.map_degree(eig), v.grid()).expect("same band limit")
}

/// `curl̊V := -div̊(*V)`, so that `curl̊(∇̊f) = 0` and `curl̊(*∇̊g) = Δ̊g`.
pub fn curl_oneform(v: &OneFormField) -> ScalarField {
    let (_, g) = analyze_oneform(v);
    synthesize(&g.map_degree(eig), v.grid()).expect("same band limit")
}

/// Electric/magnetic potentials of an STT field.
#[derive(Debug, Clone)]
pub struct SttDecomposition {
    /// `e_lm`, supported on `l >= 2`.
    pub electric: ShCoefficients,
    /// `b_lm`, supported on `l >= 2`.
    pub magnetic: ShCoefficients,
    /// `‖T - D̂²_e e - D̂²_b b‖ / ‖T‖`: content the potentials cannot carry
    /// (aliasing beyond the band limit). Zero for band-limited input.
    pub truncation: f64,
}

/// `T = D̂²_e e + D̂²_b b` with both potentials supported on `l >= 2`.
pub fn decompose_stt(t: &SttField) -> SttDecomposition {
    let (electric, magnetic) = analyze_stt(t);
    let back = recompose_stt(&electric, &magnetic, t.grid()).expect("same band limit");
    let norm = t.norm();
    let truncation = if norm > 0.0 { t.sub(&back).norm() / norm } else { 0.0 };
    SttDecomposition {
        electric,
        magnetic,
        truncation,
    }
}

/// Per-degree factors `k(l)` read from the operator table, zero below `l = 2`.
fn table_factors(band_limit: usize, f: impl Fn(&OperatorConstants, usize) -> Result<f64>) -> Result<Vec<f64>> {
    let table = OperatorConstants::builtin();
    (0..=band_limit)
        .map(|l| if l < 2 { Ok(0.0) } else { f(table, l) })
        .collect()
}

/// `div̊T = ∇̊(λ_e e) + *∇̊(λ_b b)` with the tabulated constants.
pub fn divergence_stt(t: &SttField) -> Result<OneFormField> {
    let (e, b) = analyze_stt(t);
    let l = e.band_limit();
    let le = table_factors(l, |c, l| c.lambda_e(l))?;
    let lb = table_factors(l, |c, l| c.lambda_b(l))?;
    synthesize_oneform(&e.map_degree(|l| le[l]), &b.map_degree(|l| lb[l]), t.grid())
}

/// Electric potentials `e_lm` of the unique electric, `l >= 2` tensor with
/// `div̊T = V`, plus the norm of the `l = 1` gradient content that was
/// discarded.
pub(crate) fn invert_div_stt_potentials(v: &OneFormField, strict: bool) -> Result<(ShCoefficients, f64)> {
    let (f, g) = analyze_oneform(v);
    let scale = v.norm();
    let tolerance = TOL_STT_SOURCE * scale;
    // 1-form norms: ‖∇Y_lm‖² = l(l+1).
    let weighted = |c: &ShCoefficients, range: std::ops::RangeInclusive<usize>| {
        c.iter()
            .filter(|(l, _, _)| range.contains(l))
            .map(|(l, _, a)| (l * (l + 1)) as f64 * a * a)
            .sum::<f64>()
            .sqrt()
    };
    let magnetic = weighted(&g, 1..=g.band_limit());
    if magnetic > tolerance {
        return Err(Error::NonElectricSource { magnitude: magnetic, tolerance });
    }
    let dipole = weighted(&f, 1..=1);
    if strict && dipole > tolerance {
        return Err(Error::KernelObstruction { magnitude: dipole, tolerance });
    }
    let le = table_factors(f.band_limit(), |c, l| c.lambda_e(l))?;
    let e = f.map_degree(|l| if l < 2 { 0.0 } else { 1.0 / le[l] });
    Ok((e, dipole))
}

/// The unique electric-parity, `l >= 2` STT field with `div̊T = V`.
///
/// Errors if `V` carries magnetic (`*∇̊g`) content or `l = 1` gradient
/// content above `TOL_STT_SOURCE · ‖V‖`: neither has an STT preimage.
pub fn invert_div_stt(v: &OneFormField) -> Result<SttField> {
    let (e, _) = invert_div_stt_potentials(v, true)?;
    recompose_stt(&e, &ShCoefficients::zeros(e.band_limit()), v.grid())
}

/// Like [`invert_div_stt`] but projects out `l = 1` gradient content instead
/// of rejecting it. Returns the tensor and the norm of what was removed.
pub fn invert_div_stt_projected(v: &OneFormField) -> Result<(SttField, f64)> {
    let (e, dipole) = invert_div_stt_potentials(v, false)?;
    let t = recompose_stt(&e, &ShCoefficients::zeros(e.band_limit()), v.grid())?;
    Ok((t, dipole))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::SphereGrid;

    fn field(l: usize, modes: &[(usize, i64, f64)]) -> ScalarField {
        let g = SphereGrid::new(l).unwrap();
        synthesize(&ShCoefficients::from_modes(l, modes), &g).unwrap()
    }

    #[test]
    fn laplacian_eigenvalues() {
        let f = field(8, &[(2, 0, 1.0), (1, 1, 1.0), (0, 0, 3.0)]);
        let c = analyze(&laplacian(&f));
        assert!((c.get(2, 0) + 6.0).abs() < 1e-12);
        assert!((c.get(1, 1) + 2.0).abs() < 1e-12);
        assert!(c.get(0, 0).abs() < 1e-12);
    }

    #[test]
    fn poisson_examples() {
        let f = field(8, &[(1, 0, 1.0), (3, 0, 1.0)]);
        let c = analyze(&solve_poisson(&f).unwrap());
        assert!((c.get(1, 0) + 0.5).abs() < 1e-12);
        assert!((c.get(3, 0) + 1.0 / 12.0).abs() < 1e-12);
        let z = solve_poisson(&field(4, &[])).unwrap();
        assert_eq!(z.max_abs(), 0.0);
    }

    #[test]
    fn poisson_rejects_raw_source() {
        let f = field(6, &[(0, 0, 1.0), (2, 0, 1.0)]);
        assert!(matches!(solve_poisson(&f), Err(Error::NonMeanFreeSource { .. })));
    }

    #[test]
    fn gradient_of_y10_points_south() {
        let f = field(4, &[(1, 0, 1.0)]);
        let v = gradient(&f);
        let k = (3.0 / (4.0 * std::f64::consts::PI)).sqrt();
        for (i, s) in v.grid().sin_theta().iter().enumerate() {
            let idx = v.grid().index(i, 0);
            assert!((v.theta_component()[idx] + k * s).abs() < 1e-13);
            assert!(v.phi_component()[idx].abs() < 1e-13);
        }
    }

    #[test]
    fn curl_and_divergence_separate_parities() {
        let f = field(6, &[(2, 0, 1.0)]);
        let grad = gradient(&f);
        assert!(curl_oneform(&grad).max_abs() < 1e-12);
        assert!(divergence_oneform(&grad.star()).max_abs() < 1e-12);
        let c = analyze(&curl_oneform(&grad.star()));
        assert!((c.get(2, 0) + 6.0).abs() < 1e-12);
    }

    #[test]
    fn invert_rejects_magnetic_and_dipole_sources() {
        let g = SphereGrid::new(6).unwrap();
        let z = ShCoefficients::zeros(6);
        let curl = synthesize_oneform(&z, &ShCoefficients::from_modes(6, &[(3, 1, 1.0)]), &g).unwrap();
        assert!(matches!(invert_div_stt(&curl), Err(Error::NonElectricSource { .. })));
        let dipole = synthesize_oneform(&ShCoefficients::from_modes(6, &[(1, -1, 1.0)]), &z, &g).unwrap();
        assert!(matches!(invert_div_stt(&dipole), Err(Error::KernelObstruction { .. })));
        let (t, removed) = invert_div_stt_projected(&dipole).unwrap();
        assert!(t.max_abs() < 1e-14);
        assert!((removed - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn decompose_zero_tensor() {
        let g = SphereGrid::new(5).unwrap();
        let d = decompose_stt(&SttField::zeros(&g));
        assert_eq!(d.electric.max_abs(), 0.0);
        assert_eq!(d.magnetic.max_abs(), 0.0);
        assert_eq!(d.truncation, 0.0);
    }
}
