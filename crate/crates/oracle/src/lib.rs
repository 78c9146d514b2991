//! Reference computations that share no code with `nullmem`.
//!
//! Harmonics come from the unnormalised three-term recurrence, derivatives
//! from central finite differences, and integrals from Golub-Welsch Gauss
//! rules or composite Simpson. Everything is slow and simple on purpose: these functions exist to
//! produce expected values for the fast spectral code.

use std::f64::consts::PI;

/// Unnormalised associated Legendre function `P_l^m(x)` without the
/// Condon-Shortley phase.
pub fn assoc_legendre(l: usize, m: usize, x: f64) -> f64 {
    if m > l {
        return 0.0;
    }
    let s = (1.0 - x * x).max(0.0).sqrt();
    let mut pmm = 1.0;
    for k in 0..m {
        pmm *= (2 * k + 1) as f64 * s;
    }
    if l == m {
        return pmm;
    }
    let mut p_prev = pmm;
    let mut p = x * (2 * m + 1) as f64 * pmm;
    for ll in (m + 2)..=l {
        let next = (x * (2 * ll - 1) as f64 * p - (ll + m - 1) as f64 * p_prev) / (ll - m) as f64;
        p_prev = p;
        p = next;
    }
    p
}

/// `sqrt((2l+1)/(4π) · (l-m)!/(l+m)!)`.
pub fn normalisation(l: usize, m: usize) -> f64 {
    let mut ratio = 1.0;
    for k in (l - m + 1)..=(l + m) {
        ratio /= k as f64;
    }
    ((2 * l + 1) as f64 / (4.0 * PI) * ratio).sqrt()
}

/// Real orthonormal harmonic: `Y_l0 = N P_l`, `Y_{l,m>0} = √2 N P_l^m cos mφ`,
/// `Y_{l,m<0} = √2 N P_l^|m| sin |m|φ`.
pub fn ylm(l: usize, m: i64, theta: f64, phi: f64) -> f64 {
    let mu = m.unsigned_abs() as usize;
    let base = normalisation(l, mu) * assoc_legendre(l, mu, theta.cos());
    match m {
        0 => base,
        m if m > 0 => 2f64.sqrt() * base * (m as f64 * phi).cos(),
        _ => 2f64.sqrt() * base * (mu as f64 * phi).sin(),
    }
}

/// Fourth-order central first derivative.
pub fn d1(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

/// Fourth-order central second derivative.
pub fn d2(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-f(x - 2.0 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h * h)
}

/// Composite Simpson rule with `n` (rounded up to even) intervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut total = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        total += w * f(a + i as f64 * h);
    }
    total * h / 3.0
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by the Golub-Welsch
/// eigenvalue method.
pub fn golub_welsch(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut jacobi = nalgebra::DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let kf = k as f64;
        let b = kf / (4.0 * kf * kf - 1.0).sqrt();
        jacobi[(k - 1, k)] = b;
        jacobi[(k, k - 1)] = b;
    }
    let eig = nalgebra::SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], 2.0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pairs.into_iter().unzip()
}

/// Integral over the unit sphere: Golub-Welsch Gauss rule in `cos θ` and
/// the trapezoid rule in φ.
pub fn integrate_sphere(f: impl Fn(f64, f64) -> f64, n_theta: usize, n_phi: usize) -> f64 {
    let (x, w) = golub_welsch(n_theta);
    let dphi = 2.0 * PI / n_phi as f64;
    let mut total = 0.0;
    for (xi, wi) in x.iter().zip(&w) {
        let t = xi.acos();
        let ring: f64 = (0..n_phi).map(|k| f(t, (k as f64 + 0.25) * dphi)).sum();
        total += wi * ring;
    }
    total * dphi
}

/// A 2x2 tensor in the orthonormal dyad `{e_θ, e_φ}`.
pub type Mat2 = [[f64; 2]; 2];

pub fn contract(a: &Mat2, b: &Mat2) -> f64 {
    a[0][0] * b[0][0] + a[0][1] * b[0][1] + a[1][0] * b[1][0] + a[1][1] * b[1][1]
}

/// Orthonormal-dyad gradient `(∂_θ f, ∂_φ f / sin θ)` by finite differences.
pub fn gradient(f: &dyn Fn(f64, f64) -> f64, theta: f64, phi: f64, h: f64) -> [f64; 2] {
    let dt = d1(|t| f(t, phi), theta, h);
    let dp = d1(|p| f(theta, p), phi, h);
    [dt, dp / theta.sin()]
}

/// Covariant Hessian `∇_A ∇_B f` in the orthonormal dyad.
///
/// Coordinate form `∂_A ∂_B f - Γ^C_AB ∂_C f` on `dθ² + sin²θ dφ²`, with
/// `Γ^θ_φφ = -sin θ cos θ` and `Γ^φ_θφ = cot θ`.
pub fn hessian(f: &dyn Fn(f64, f64) -> f64, theta: f64, phi: f64, h: f64) -> Mat2 {
    let (s, c) = theta.sin_cos();
    let ft = d1(|t| f(t, phi), theta, h);
    let fp = d1(|p| f(theta, p), phi, h);
    let ftt = d2(|t| f(t, phi), theta, h);
    let fpp = d2(|p| f(theta, p), phi, h);
    let ftp = d1(|t| d1(|p| f(t, p), phi, h), theta, h);
    let h_tt = ftt;
    let h_tp = ftp - c / s * fp;
    let h_pp = fpp + s * c * ft;
    [[h_tt, h_tp / s], [h_tp / s, h_pp / (s * s)]]
}

/// Covariant derivative `∇_A W_B` of a 1-form given by its orthonormal
/// components, in the orthonormal dyad.
pub fn covariant_derivative(w: &dyn Fn(f64, f64) -> [f64; 2], theta: f64, phi: f64, h: f64) -> Mat2 {
    let (s, c) = theta.sin_cos();
    // coordinate components
    let wt = |t: f64, p: f64| w(t, p)[0];
    let wp = |t: f64, p: f64| t.sin() * w(t, p)[1];
    let d_t_wt = d1(|t| wt(t, phi), theta, h);
    let d_p_wt = d1(|p| wt(theta, p), phi, h);
    let d_t_wp = d1(|t| wp(t, phi), theta, h);
    let d_p_wp = d1(|p| wp(theta, p), phi, h);
    let wt0 = wt(theta, phi);
    let wp0 = wp(theta, phi);
    let n_tt = d_t_wt;
    let n_tp = d_t_wp - c / s * wp0;
    let n_pt = d_p_wt - c / s * wp0;
    let n_pp = d_p_wp + s * c * wt0;
    [[n_tt, n_tp / s], [n_pt / s, n_pp / (s * s)]]
}

/// Traceless part of a 2x2 tensor.
pub fn traceless(m: &Mat2) -> Mat2 {
    let half_tr = 0.5 * (m[0][0] + m[1][1]);
    [[m[0][0] - half_tr, m[0][1]], [m[1][0], m[1][1] - half_tr]]
}

/// Left rotation `(*T)_AB = ε_AC T_CB` with `(*V)_θ = -V_φ`, `(*V)_φ = V_θ`.
pub fn star_tensor(m: &Mat2) -> Mat2 {
    [[-m[1][0], -m[1][1]], [m[0][0], m[0][1]]]
}

pub fn star_vector(v: [f64; 2]) -> [f64; 2] {
    [-v[1], v[0]]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Electric,
    Magnetic,
}

/// Finite-difference step that keeps truncation and round-off below 1e-8
/// relative for degree `l`.
pub fn fd_step(l: usize) -> f64 {
    (0.05 / l.max(1) as f64).min(1e-3)
}

/// Gauss/trapezoid resolution exact for integrands of degree `2l` (plus
/// headroom for the finite-difference perturbation).
fn sphere_resolution(l: usize, m: i64) -> (usize, usize) {
    let n_phi = if m == 0 { 1 } else { 4 * m.unsigned_abs() as usize + 4 };
    (2 * l + 12, n_phi)
}

/// The per-degree constant `λ` with `div̊(D̂² Y_lm) = ∇̊(λ Y_lm)` (electric)
/// or `*∇̊(λ Y_lm)` (magnetic).
///
/// Weak form: for the test 1-form `W = ∇̊Y_lm` (or `*∇̊Y_lm`),
/// `∫ (div̊ T)·W = -∫ T : ∇̊W`, and `∫ (div̊T)·W = λ ∫ |W|²`.
pub fn stt_divergence_constant(l: usize, m: i64, parity: Parity) -> f64 {
    // Richardson extrapolation on the step cancels the leading h^4 error of
    // the difference stencils.
    let h = fd_step(l);
    let coarse = stt_divergence_constant_with_step(l, m, parity, h);
    let fine = stt_divergence_constant_with_step(l, m, parity, 0.5 * h);
    (16.0 * fine - coarse) / 15.0
}

fn stt_divergence_constant_with_step(l: usize, m: i64, parity: Parity, h: f64) -> f64 {
    let y = move |t: f64, p: f64| ylm(l, m, t, p);
    let tensor = |t: f64, p: f64| -> Mat2 {
        let e = traceless(&hessian(&y, t, p, h));
        match parity {
            Parity::Electric => e,
            Parity::Magnetic => star_tensor(&e),
        }
    };
    let test_form = |t: f64, p: f64| -> [f64; 2] {
        let g = gradient(&y, t, p, h);
        match parity {
            Parity::Electric => g,
            Parity::Magnetic => star_vector(g),
        }
    };
    let (nt, np) = sphere_resolution(l, m);
    let weak = integrate_sphere(
        |t, p| contract(&tensor(t, p), &covariant_derivative(&test_form, t, p, h)),
        nt,
        np,
    );
    let norm = integrate_sphere(
        |t, p| {
            let w = test_form(t, p);
            w[0] * w[0] + w[1] * w[1]
        },
        nt,
        np,
    );
    -weak / norm
}

/// `μ_l = 2π ∫_{-1}^{1} (1-x)^{-1/2} P_l(x) dx`, computed after the
/// substitution `x = 1 - s²`, which removes the endpoint singularity:
/// `μ_l = 4π ∫_0^{√2} P_l(1 - s²) ds`.
pub fn kernel_eigenvalue(l: usize) -> f64 {
    let (x, w) = golub_welsch(l + 4);
    let half = 0.5 * 2f64.sqrt();
    let integral: f64 = x
        .iter()
        .zip(&w)
        .map(|(xi, wi)| {
            let s = half * (xi + 1.0);
            wi * half * assoc_legendre(l, 0, 1.0 - s * s)
        })
        .sum();
    4.0 * PI * integral
}

/// `∫_{S²} (1 - ω·ω')^{-1/2} dω'` by 1-D quadrature in the angle `γ`
/// between `ω` and `ω'`, with `t = √(1 - cos γ)` substituted.
pub fn kernel_of_constant() -> f64 {
    // dω' = 2π sin γ dγ, 1 - cos γ = t², sin γ dγ = 2t dt
    2.0 * PI * simpson(|_t| 2.0, 0.0, 2f64.sqrt(), 16)
}

/// Direct brute-force kernel integral of `f` at the direction `(θ, φ)`:
/// the source sphere is parametrised by the angle `γ` from the target and an
/// azimuth `β` around it, with `t = √(1-cos γ)` removing the singularity.
pub fn kernel_integral_at(f: &dyn Fn(f64, f64) -> f64, theta: f64, phi: f64, n_t: usize, n_beta: usize) -> f64 {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let target = [st * cp, st * sp, ct];
    let e1 = [ct * cp, ct * sp, -st];
    let e2 = [-sp, cp, 0.0];
    let dbeta = 2.0 * PI / n_beta as f64;
    simpson(
        |t| {
            let cos_g = 1.0 - t * t;
            let sin_g = (1.0 - cos_g * cos_g).max(0.0).sqrt();
            let ring: f64 = (0..n_beta)
                .map(|k| {
                    let b = (k as f64 + 0.5) * dbeta;
                    let (sb, cb) = b.sin_cos();
                    let v: Vec<f64> = (0..3)
                        .map(|i| cos_g * target[i] + sin_g * (cb * e1[i] + sb * e2[i]))
                        .collect();
                    let th = v[2].clamp(-1.0, 1.0).acos();
                    let ph = v[1].atan2(v[0]);
                    f(th, ph)
                })
                .sum();
            // (1 - cos γ)^{-1/2} sin γ dγ = (1/t) 2t dt
            2.0 * ring * dbeta
        },
        0.0,
        2f64.sqrt(),
        n_t,
    )
}
