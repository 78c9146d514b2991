use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Index of `(l, m)` with `0 <= m <= l` in a triangular table.
#[inline]
pub(crate) fn tri(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes in descending order.
///
/// Newton iteration on `P_n` from the Tricomi initial guess.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = x;
        weights[i] = w;
        nodes[n - 1 - i] = -x;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Orthonormal associated Legendre functions `P̄_lm(cos θ)` and their
/// θ-derivatives for all `0 <= m <= l <= lmax`, in [`tri`] order.
///
/// `P̄_lm` carries the full sphere normalisation, so that
/// `Y_l0 = P̄_l0` and `Y_{l,±m} = √2 P̄_lm (cos mφ | sin mφ)` are orthonormal.
/// No Condon-Shortley phase: `P̄_lm >= 0` near the north pole.
pub fn legendre_table(lmax: usize, x: f64, s: f64) -> (Vec<f64>, Vec<f64>) {
    let n = tri(lmax, lmax) + 1;
    let mut p = vec![0.0; n];
    let mut dp = vec![0.0; n];
    let mut pmm = 1.0 / (4.0 * PI).sqrt();
    for m in 0..=lmax {
        if m > 0 {
            let mf = m as f64;
            pmm *= ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * s;
        }
        p[tri(m, m)] = pmm;
        if m < lmax {
            p[tri(m + 1, m)] = (2.0 * m as f64 + 3.0).sqrt() * x * pmm;
        }
        for l in (m + 2)..=lmax {
            let lf = l as f64;
            let mf = m as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt();
            p[tri(l, m)] = a * (x * p[tri(l - 1, m)] - b * p[tri(l - 2, m)]);
        }
    }
    if s > 0.0 {
        for l in 0..=lmax {
            for m in 0..=l {
                let lf = l as f64;
                let mf = m as f64;
                let lower = if l > m {
                    ((2.0 * lf + 1.0) / (2.0 * lf - 1.0) * (lf * lf - mf * mf)).sqrt() * p[tri(l - 1, m)]
                } else {
                    0.0
                };
                dp[tri(l, m)] = (lf * x * p[tri(l, m)] - lower) / s;
            }
        }
    }
    (p, dp)
}

/// Gauss-Legendre (in cos θ) by equispaced-φ grid on the unit sphere.
///
/// Rings run from north to south; no node sits on a pole. Area weights are
/// `w_j · 2π / n_φ` and sum to `4π`.
#[derive(Debug)]
pub struct SphereGrid {
    band_limit: usize,
    n_theta: usize,
    n_phi: usize,
    cos_theta: Vec<f64>,
    sin_theta: Vec<f64>,
    theta: Vec<f64>,
    gauss_weights: Vec<f64>,
    phi: Vec<f64>,
    plm: Vec<f64>,
    dplm: Vec<f64>,
    trig: Vec<f64>,
    dtrig: Vec<f64>,
}

impl PartialEq for SphereGrid {
    fn eq(&self, other: &Self) -> bool {
        self.band_limit == other.band_limit
            && self.n_theta == other.n_theta
            && self.n_phi == other.n_phi
    }
}

impl SphereGrid {
    /// Grid sized so that quadratic products of band-limited fields are
    /// analysed without aliasing up to degree `band_limit`:
    /// `n_θ = ⌈(3L+1)/2⌉`, `n_φ = 3L+1`.
    pub fn new(band_limit: usize) -> Result<Arc<Self>> {
        let n_theta = (3 * band_limit + 2) / 2;
        Self::with_resolution(band_limit, n_theta, 3 * band_limit + 1)
    }

    /// Smallest exact grid: `n_θ = L+1`, `n_φ = 2L+1`.
    pub fn minimal(band_limit: usize) -> Result<Arc<Self>> {
        Self::with_resolution(band_limit, band_limit + 1, 2 * band_limit + 1)
    }

    pub fn with_resolution(band_limit: usize, n_theta: usize, n_phi: usize) -> Result<Arc<Self>> {
        if band_limit < 2 {
            return Err(Error::Resolution(format!("band limit {band_limit} < 2")));
        }
        if n_theta < band_limit + 1 {
            return Err(Error::Resolution(format!(
                "n_theta = {n_theta} < L+1 = {}",
                band_limit + 1
            )));
        }
        if n_phi < 2 * band_limit + 1 {
            return Err(Error::Resolution(format!(
                "n_phi = {n_phi} < 2L+1 = {}",
                2 * band_limit + 1
            )));
        }
        let (cos_theta, gauss_weights) = gauss_legendre(n_theta);
        let sin_theta: Vec<f64> = cos_theta.iter().map(|x| (1.0 - x * x).sqrt()).collect();
        let theta: Vec<f64> = cos_theta.iter().map(|x| x.acos()).collect();
        let phi: Vec<f64> = (0..n_phi).map(|k| 2.0 * PI * k as f64 / n_phi as f64).collect();

        let width = tri(band_limit, band_limit) + 1;
        let mut plm = Vec::with_capacity(n_theta * width);
        let mut dplm = Vec::with_capacity(n_theta * width);
        for j in 0..n_theta {
            let (p, dp) = legendre_table(band_limit, cos_theta[j], sin_theta[j]);
            plm.extend(p);
            dplm.extend(dp);
        }

        let n_m = 2 * band_limit + 1;
        let mut trig = vec![0.0; n_m * n_phi];
        let mut dtrig = vec![0.0; n_m * n_phi];
        let l = band_limit as i64;
        for mi in 0..n_m {
            let m = mi as i64 - l;
            for (k, &ph) in phi.iter().enumerate() {
                let (t, d) = real_trig(m, ph);
                trig[mi * n_phi + k] = t;
                dtrig[mi * n_phi + k] = d;
            }
        }

        Ok(Arc::new(SphereGrid {
            band_limit,
            n_theta,
            n_phi,
            cos_theta,
            sin_theta,
            theta,
            gauss_weights,
            phi,
            plm,
            dplm,
            trig,
            dtrig,
        }))
    }

    pub fn band_limit(&self) -> usize {
        self.band_limit
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    /// Number of nodes, `n_θ · n_φ`.
    pub fn len(&self) -> usize {
        self.n_theta * self.n_phi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn cos_theta(&self) -> &[f64] {
        &self.cos_theta
    }

    pub fn sin_theta(&self) -> &[f64] {
        &self.sin_theta
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    /// Gauss-Legendre weight of ring `j` (in cos θ).
    pub fn gauss_weight(&self, j: usize) -> f64 {
        self.gauss_weights[j]
    }

    /// Area weight of any node on ring `j`.
    #[inline]
    pub fn area_weight(&self, j: usize) -> f64 {
        self.gauss_weights[j] * 2.0 * PI / self.n_phi as f64
    }

    /// Flat node index of ring `j`, longitude `k`.
    #[inline]
    pub fn index(&self, j: usize, k: usize) -> usize {
        j * self.n_phi + k
    }

    /// Unit vector of node `(j, k)`.
    pub fn unit_vector(&self, j: usize, k: usize) -> [f64; 3] {
        let s = self.sin_theta[j];
        [s * self.phi[k].cos(), s * self.phi[k].sin(), self.cos_theta[j]]
    }

    /// Quadrature of a sampled function over the sphere.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.len());
        let mut total = 0.0;
        for j in 0..self.n_theta {
            let row: f64 = values[j * self.n_phi..(j + 1) * self.n_phi].iter().sum();
            total += self.area_weight(j) * row;
        }
        total
    }

    #[inline]
    pub(crate) fn plm(&self, j: usize, l: usize, m: usize) -> f64 {
        self.plm[j * (tri(self.band_limit, self.band_limit) + 1) + tri(l, m)]
    }

    #[inline]
    pub(crate) fn dplm(&self, j: usize, l: usize, m: usize) -> f64 {
        self.dplm[j * (tri(self.band_limit, self.band_limit) + 1) + tri(l, m)]
    }

    /// `trig_m(φ_k)` for signed `m`: `1`, `√2 cos mφ` or `√2 sin |m|φ`.
    #[inline]
    pub(crate) fn trig_row(&self, m: i64) -> &[f64] {
        let mi = (m + self.band_limit as i64) as usize;
        &self.trig[mi * self.n_phi..(mi + 1) * self.n_phi]
    }

    /// `d trig_m / dφ` at the φ nodes.
    #[inline]
    pub(crate) fn dtrig_row(&self, m: i64) -> &[f64] {
        let mi = (m + self.band_limit as i64) as usize;
        &self.dtrig[mi * self.n_phi..(mi + 1) * self.n_phi]
    }
}

/// Real azimuthal factor of `Y_lm` and its φ-derivative.
#[inline]
pub(crate) fn real_trig(m: i64, phi: f64) -> (f64, f64) {
    use std::f64::consts::SQRT_2;
    match m {
        0 => (1.0, 0.0),
        m if m > 0 => {
            let mf = m as f64;
            (SQRT_2 * (mf * phi).cos(), -SQRT_2 * mf * (mf * phi).sin())
        }
        m => {
            let mf = (-m) as f64;
            (SQRT_2 * (mf * phi).sin(), SQRT_2 * mf * (mf * phi).cos())
        }
    }
}
