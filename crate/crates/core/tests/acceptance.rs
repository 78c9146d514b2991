//! Acceptance criteria, one PASS/FAIL line each. Runs as a plain binary so
//! the lines appear in `cargo test` output; exits non-zero on any FAIL.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use nullmem::bondi::{check_mass_loss_equivalence, Orientation};
use nullmem::detector::{
    closed_form_trace, drive_tensor, em_intensity, integrate_jacobi, stt_at, DetectorConfig, DriveSource, Mat2,
};
use nullmem::memory::{memory_displacement_field, omega_prime_series, solve_memory};
use nullmem::quadrature::{linear_fit, linspace, TailModel};
use nullmem::radiation::{
    area_radius, decay_report, mass_curve, memory_source, sigma_from_xi, RadiativePayload, RadiusOptions,
    ScalarLimit,
};
use nullmem::sphere::{
    analyze, divergence_stt, invert_div_stt, laplacian, recompose_stt, synthesize, synthesize_oneform,
    KernelQuadrature, OneFormField, OperatorConstants, ScalarField, ShCoefficients, SphereGrid, SttField,
};
use nullmem::synth::{random_bondi, synth_on, Mode, Profile, SynthSpec};
use nullmem_oracle as oracle;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const L: usize = 16;
const SAMPLES: usize = 401;

const TOL_ROUND_TRIP: f64 = 1e-10;
const TOL_PARSEVAL: f64 = 1e-10;
const TOL_EIGEN: f64 = 1e-8;
const EIGEN_LMAX: usize = 14;
const TOL_LAMBDA: f64 = 1e-6;
const TOL_INVERT_DIV: f64 = 1e-8;
const TOL_MASS: f64 = 1e-6;
const TOL_MEMORY: f64 = 1e-8;
const TOL_OMEGA: f64 = 1e-2;
const TOL_DETECTOR: f64 = 1e-5;
const TOL_REST: f64 = 1e-6;
const EM_SLOPE: f64 = -1.0;
const TOL_EM_SLOPE: f64 = 0.1;
const TOL_BONDI: f64 = 1e-10;
const TOL_RADIUS: f64 = 0.02;

struct Outcome {
    pass: bool,
    detail: String,
}

fn random_coefficients(rng: &mut ChaCha8Rng, l_max: usize, l_min: usize) -> ShCoefficients {
    let mut c = ShCoefficients::zeros(l_max);
    for l in l_min..=l_max {
        for m in -(l as i64)..=l as i64 {
            c.set(l, m, rng.gen_range(-1.0..1.0));
        }
    }
    c
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn spectral_soundness() -> Outcome {
    let g = SphereGrid::new(L).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let c = random_coefficients(&mut rng, L, 0);
    let f = synthesize(&c, &g).unwrap();
    let back = analyze(&f);
    let rt_coeff = max_diff(back.as_slice(), c.as_slice()) / max_abs(c.as_slice());
    let f2 = synthesize(&back, &g).unwrap();
    let rt_field = max_diff(f2.values(), f.values()) / f.max_abs();
    let parseval = (f.dot(&f) - c.power()).abs() / c.power();

    // Library harmonics against the oracle's, through the exact eigenvalue.
    let mut eigen = 0.0f64;
    for l in 0..=EIGEN_LMAX {
        for m in -(l as i64)..=l as i64 {
            let y = synthesize(&ShCoefficients::from_modes(L, &[(l, m, 1.0)]), &g).unwrap();
            let lap = laplacian(&y);
            let k = (l * (l + 1)) as f64;
            for j in 0..g.n_theta() {
                for i in 0..g.n_phi() {
                    let exact = -k * oracle::ylm(l, m, g.theta()[j], g.phi()[i]);
                    eigen = eigen.max((lap.values()[g.index(j, i)] - exact).abs() / k.max(1.0));
                }
            }
        }
    }
    Outcome {
        pass: rt_coeff < TOL_ROUND_TRIP && rt_field < TOL_ROUND_TRIP && parseval < TOL_PARSEVAL && eigen < TOL_EIGEN,
        detail: format!(
            "round trip {rt_coeff:.1e}/{rt_field:.1e} (tol {TOL_ROUND_TRIP:.0e}), Parseval {parseval:.1e} (tol {TOL_PARSEVAL:.0e}), eigenrelation l<={EIGEN_LMAX} {eigen:.1e} (tol {TOL_EIGEN:.0e})"
        ),
    }
}

fn operator_oracle() -> Outcome {
    let table = OperatorConstants::builtin();
    let mut worst = 0.0f64;
    for l in 2..=10usize {
        for m in [0, l as i64] {
            let e = oracle::stt_divergence_constant(l, m, oracle::Parity::Electric);
            let b = oracle::stt_divergence_constant(l, -m, oracle::Parity::Magnetic);
            worst = worst.max((table.lambda_e(l).unwrap() - e).abs() / e.abs());
            worst = worst.max((table.lambda_b(l).unwrap() - b).abs() / b.abs());
        }
    }
    let g = SphereGrid::new(L).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let e = random_coefficients(&mut rng, L, 2);
    let t = recompose_stt(&e, &ShCoefficients::zeros(L), &g).unwrap();
    let back = invert_div_stt(&divergence_stt(&t).unwrap()).unwrap();
    let inv = back.sub(&t).max_abs() / t.max_abs();
    Outcome {
        pass: worst < TOL_LAMBDA && inv < TOL_INVERT_DIV,
        detail: format!(
            "λ table vs oracle, 2<=l<=10: {worst:.1e} (tol {TOL_LAMBDA:.0e}); invert∘div on electric l>=2: {inv:.1e} (tol {TOL_INVERT_DIV:.0e})"
        ),
    }
}

fn uniform_xi(g: &Arc<SphereGrid>, s: f64) -> SttField {
    // |T|² = 2(tt² + tp²) = s² everywhere.
    SttField::from_fn(g, |_, _| (s / 2f64.sqrt(), 0.0))
}

fn mass_loss_law() -> Outcome {
    let g = SphereGrid::new(L).unwrap();
    let u = linspace(-20.0, 20.0, SAMPLES);
    let xi: Vec<SttField> = u.iter().map(|x| uniform_xi(&g, (-0.5 * x * x).exp())).collect();
    let p = RadiativePayload::new(u.clone(), xi).unwrap();
    let grav = mass_curve(&p, TailModel::PowerLaw).unwrap();
    let dm = grav.m_plus - grav.m_minus;
    let a_f: Vec<OneFormField> = u
        .iter()
        .map(|x| OneFormField::from_fn(&g, |_, _| ((-0.5 * x * x).exp(), 0.0)))
        .collect();
    let pe = p.with_a_f(a_f).unwrap();
    let both = mass_curve(&pe, TailModel::PowerLaw).unwrap();
    let em = (both.m_plus - both.m_minus) - dm;
    // Oracle: 1-D Simpson for ∫ e^{-u²} du, times the declared prefactors.
    let gauss = oracle::simpson(|x| (-x * x).exp(), -20.0, 20.0, 4000);
    let (want_g, want_em) = (4.0 * PI * gauss / (8.0 * PI), 0.5 * 4.0 * PI * gauss / (8.0 * PI));
    let (eg, ee) = ((dm - want_g).abs(), (em - want_em).abs());
    let (eg_closed, ee_closed) = ((dm - PI.sqrt() / 2.0).abs(), (em - PI.sqrt() / 4.0).abs());
    Outcome {
        pass: eg.max(eg_closed) < TOL_MASS && ee.max(ee_closed) < TOL_MASS,
        detail: format!(
            "ΔM = {dm:.12} vs √π/2 (err {eg_closed:.1e}, oracle {eg:.1e}); EM adds {em:.12} vs √π/4 (err {ee_closed:.1e}, oracle {ee:.1e}); tol {TOL_MASS:.0e}"
        ),
    }
}

/// Gaussian payload with random low-degree patterns on the `L` grid, so that
/// quadratic quantities stay band-limited at `L`.
fn mixed_payload(g: &Arc<SphereGrid>, xi_amp: f64, em_amp: f64, seed: u64) -> RadiativePayload {
    let spec = SynthSpec {
        band_limit: L / 2,
        samples: SAMPLES,
        profile: Profile::Gaussian { width: 1.5 },
        amplitude: xi_amp,
        em_amplitude: em_amp,
        xi_electric: vec![Mode::new(2, 0, 1.0)],
        random_modes: 12,
        seed,
        ..SynthSpec::default()
    };
    synth_on(&spec, g).unwrap()
}

fn memory_theorem() -> Outcome {
    let g = SphereGrid::new(L).unwrap();
    let p = mixed_payload(&g, 1.0, 0.7, 3);
    let m = solve_memory(&p, TailModel::PowerLaw).unwrap();
    let worst = m.poisson_residual.max(m.hodge_residual);

    let vac = mixed_payload(&g, 1.0, 0.0, 4);
    let zeros = vec![OneFormField::zeros(&g); vac.len()];
    let with_zero = vac.clone().with_a_f(zeros).unwrap();
    let a = solve_memory(&vac, TailModel::PowerLaw).unwrap();
    let b = solve_memory(&with_zero, TailModel::PowerLaw).unwrap();
    let identical = a.phi.values() == b.phi.values()
        && a.sigma_jump_constraint == b.sigma_jump_constraint
        && a.source.values() == b.source.values();

    let em_only = mixed_payload(&g, 0.0, 1.0, 5);
    let e = solve_memory(&em_only, TailModel::PowerLaw).unwrap();
    let centred = e.source.map(|v| v - e.source_mean).norm();
    let em_memory = e.sigma_jump_constraint.norm() / centred;
    Outcome {
        pass: worst < TOL_MEMORY && identical && em_memory > 1e-3 && e.sigma_jump_direct.max_abs() == 0.0,
        detail: format!(
            "Poisson {:.1e}, div {:.1e} (tol {TOL_MEMORY:.0e}); A_F=0 bit-identical: {identical}; EM-only ‖ΔΣ‖/‖F-F̄‖ = {em_memory:.3e} (direct 0, residual {:.3e})",
            m.poisson_residual, m.hodge_residual, e.residual
        ),
    }
}

fn omega_jump() -> Outcome {
    let g = SphereGrid::new(L).unwrap();
    let p = mixed_payload(&g, 1.0, 0.8, 6);
    let o = omega_prime_series(&p, TailModel::PowerLaw, KernelQuadrature::default()).unwrap();
    let f = memory_source(&p, TailModel::PowerLaw).unwrap();
    let target = f.map(|v| v - f.mean());
    let err = o.jump.sub(&target).norm() / target.norm();
    Outcome {
        pass: err < TOL_OMEGA,
        detail: format!(
            "‖Ω′⁺-Ω′⁻ - (F-F̄)‖/‖F-F̄‖ = {err:.1e} (tol {TOL_OMEGA:.0e}); kernel self-check on Y_{{L0}} {:.1e}",
            o.kernel_accuracy
        ),
    }
}

fn mat_diff(a: &Mat2, b: &Mat2) -> f64 {
    (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).fold(0.0, |m, (i, j)| m.max((a[i][j] - b[i][j]).abs()))
}

fn detector_equivalence() -> Outcome {
    let g = SphereGrid::new(L).unwrap();
    let p = mixed_payload(&g, 1.0, 0.6, 7);
    let dir = (1.1, 0.7);
    let (d0, r) = (1.0, 100.0);
    let k = d0 / r;
    let cfg = DetectorConfig::new(d0, r, dir);
    let drive = drive_tensor(&p, dir, DriveSource::StoredAw).unwrap();
    let jac = integrate_jacobi(&cfg, &drive, None).unwrap();
    let closed = closed_form_trace(&cfg, &p, TailModel::PowerLaw).unwrap();

    let sigma = sigma_from_xi(&p, TailModel::PowerLaw).unwrap();
    let s_minus = stt_at(&sigma.sigma_minus, dir).unwrap();
    let sigma_scale = sigma
        .sigma
        .iter()
        .map(|s| {
            let c = stt_at(s, dir).unwrap();
            (c[0] - s_minus[0]).abs().max((c[1] - s_minus[1]).abs())
        })
        .fold(0.0, f64::max);
    let xi_scale = p
        .xi()
        .iter()
        .map(|x| {
            let c = stt_at(x, dir).unwrap();
            c[0].abs().max(c[1].abs())
        })
        .fold(0.0, f64::max);
    let pos = jac.positions.iter().zip(&closed.positions).map(|(a, b)| mat_diff(a, b)).fold(0.0, f64::max)
        / (k * sigma_scale);
    let vel = jac.velocities.iter().zip(&closed.velocities).map(|(a, b)| mat_diff(a, b)).fold(0.0, f64::max)
        / (k * xi_scale);
    let disp = mat_diff(&jac.displacement, &closed.displacement) / (k * sigma_scale);
    let field = memory_displacement_field(&sigma.jump(), d0, r).unwrap();
    let at = stt_at(&field, dir).unwrap();
    let mem = mat_diff(&jac.displacement, &[[at[0], at[1]], [at[1], -at[0]]]) / (k * sigma_scale);
    let rest = mat_diff(&jac.final_velocity(), &[[0.0; 2]; 2]) / (k * xi_scale);
    let vertical = jac.vertical.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));

    // EM correction relative to the leading displacement across r.
    let em = em_intensity(&p, dir).unwrap().unwrap();
    let radii = [1e2, 1e3, 1e4];
    let pts: Vec<(f64, f64)> = radii
        .iter()
        .map(|&r| {
            let base = DetectorConfig::new(d0, r, dir);
            let with = DetectorConfig { include_em_correction: true, ..base };
            let a = integrate_jacobi(&base, &drive, Some(&em)).unwrap();
            let b = integrate_jacobi(&with, &drive, Some(&em)).unwrap();
            let ratio = mat_diff(&b.displacement, &a.displacement) / mat_diff(&a.displacement, &[[0.0; 2]; 2]);
            (r.ln(), ratio.ln())
        })
        .collect();
    let slope = linear_fit(&pts).map_or(f64::NAN, |f| f.0);
    let pass = pos.max(vel).max(disp).max(mem) < TOL_DETECTOR
        && rest < TOL_REST
        && vertical == 0.0
        && (slope - EM_SLOPE).abs() <= TOL_EM_SLOPE;
    Outcome {
        pass,
        detail: format!(
            "positions {pos:.1e}, velocities {vel:.1e}, Δx {disp:.1e}, vs memory field {mem:.1e} (tol {TOL_DETECTOR:.0e}); rest {rest:.1e} (tol {TOL_REST:.0e}); EM slope {slope:.3} (want {EM_SLOPE} ± {TOL_EM_SLOPE})"
        ),
    }
}

fn bondi_equivalence() -> Outcome {
    let g = SphereGrid::new(L).unwrap();
    let mut worst = (0.0f64, 0.0f64);
    for seed in 0..3 {
        let b = random_bondi(&g, linspace(-8.0, 8.0, SAMPLES), 10, 100 + seed).unwrap();
        for o in [Orientation::Same, Orientation::Reversed] {
            let r = check_mass_loss_equivalence(&b, o).unwrap();
            worst.0 = worst.0.max(r.max_gravitational_residual);
            worst.1 = worst.1.max(r.max_em_residual);
        }
    }
    Outcome {
        pass: worst.0 < TOL_BONDI && worst.1 < TOL_BONDI,
        detail: format!(
            "|Ξ|² vs (∂c)²+(∂d)²: {:.1e}; |A_F|² vs X²+Y²: {:.1e} (tol {TOL_BONDI:.0e})",
            worst.0, worst.1
        ),
    }
}

fn radius_asymptote() -> Outcome {
    // Final mass from a Gaussian payload's mass-loss curve.
    let g = SphereGrid::new(8).unwrap();
    let u = linspace(-20.0, 20.0, SAMPLES);
    let xi = u.iter().map(|x| uniform_xi(&g, 2.0 * (-0.5 * x * x).exp())).collect();
    let p = RadiativePayload::new(u, xi).unwrap();
    let mass = mass_curve(&p, TailModel::PowerLaw).unwrap().m_plus;
    let tr = area_radius(mass, 1e3, 1e3, 1e6, RadiusOptions::default()).unwrap();
    let rel = (tr.log_coefficient + 2.0 * mass).abs() / (2.0 * mass);
    let flat = area_radius(0.0, 1e3, 1e3, 1e6, RadiusOptions::default()).unwrap();
    let linear = flat
        .t
        .iter()
        .zip(&flat.r)
        .fold(0.0f64, |m, (t, r)| m.max((r - t).abs()));
    Outcome {
        pass: rel < TOL_RADIUS && linear == 0.0 && flat.log_coefficient == 0.0,
        detail: format!(
            "M(∞) = {mass:.6}: coefficient {:.5} vs {:.5} (rel {rel:.1e}, tol {TOL_RADIUS}); M = 0 max |r - t| = {linear:.1e}",
            tr.log_coefficient,
            -2.0 * mass
        ),
    }
}

/// Payload carrying every decaying quantity with exponents offset by `slack`
/// from the bounds.
fn decay_payload(g: &Arc<SphereGrid>, slack: f64) -> RadiativePayload {
    let spec = SynthSpec {
        band_limit: 6,
        samples: SAMPLES,
        profile: Profile::PowerLaw { exponent: 1.5 - slack, width: 1.0 },
        em_amplitude: 1.0,
        af_electric: vec![Mode::new(1, 0, 1.0)],
        random_modes: 3,
        seed: 9,
        ..SynthSpec::default()
    };
    let p = synth_on(&spec, g).unwrap();
    let u = p.u().to_vec();
    let v = synthesize_oneform(&ShCoefficients::from_modes(6, &[(2, 1, 1.0)]), &ShCoefficients::zeros(6), g).unwrap();
    let y = synthesize(&ShCoefficients::from_modes(6, &[(3, -2, 1.0)]), g).unwrap();
    let env = |x: f64, e: f64| (1.0 + x * x).powf(-0.5 * e);
    let b_w = u.iter().map(|x| v.scaled(env(*x, 1.5 - slack))).collect();
    let mut p = p.with_b_w(b_w).unwrap();
    for which in ScalarLimit::ALL {
        // P_W and Q_W are judged after removing their sphere mean.
        let offset = if matches!(which, ScalarLimit::PW | ScalarLimit::QW) { 2.0 } else { 0.0 };
        let s: Vec<ScalarField> = u
            .iter()
            .map(|x| y.scaled(env(*x, 0.5 - slack)).map(|v| v + offset))
            .collect();
        p = p.with_scalar(which, s).unwrap();
    }
    p
}

fn decay_validation() -> Outcome {
    let g = SphereGrid::new(6).unwrap();
    let good = decay_report(&decay_payload(&g, 0.0)).unwrap();
    let bad = decay_report(&decay_payload(&g, 0.5)).unwrap();
    let failing = bad.fits.iter().filter(|f| !f.pass).count();
    let summary = |r: &nullmem::radiation::DecayReport| {
        r.fits
            .iter()
            .map(|f| format!("{} {:.2}", f.quantity, f.exponent.unwrap_or(f64::NAN)))
            .collect::<Vec<_>>()
            .join(", ")
    };
    Outcome {
        pass: good.pass() && good.fits.len() == 8 && failing == bad.fits.len(),
        detail: format!(
            "bounds: [{}] all pass: {}; slackened by 0.5: {failing}/{} fail",
            summary(&good),
            good.pass(),
            bad.fits.len()
        ),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("spectral soundness", spectral_soundness),
        ("operator-oracle equivalence", operator_oracle),
        ("mass-loss law", mass_loss_law),
        ("memory equation", memory_theorem),
        ("Ω′ jump identity", omega_jump),
        ("detector equivalence", detector_equivalence),
        ("Bondi equivalence", bondi_equivalence),
        ("radius asymptote", radius_asymptote),
        ("decay validation", decay_validation),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|e| Outcome {
            pass: false,
            detail: format!(
                "panicked: {}",
                e.downcast_ref::<String>().map(String::as_str).or(e.downcast_ref::<&str>().copied()).unwrap_or("?")
            ),
        });
        if !outcome.pass {
            failed += 1;
        }
        println!(
            "{} {}. {name}: {} [{:.1}s]",
            if outcome.pass { "PASS" } else { "FAIL" },
            n + 1,
            outcome.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
