//! Free test masses in the far zone, driven by the radiative data.
//!
//! Index convention: a configuration is a 2x2 matrix `X` with
//! `X[a][b] = x^a_(b)`, the `a`-th horizontal coordinate of mass `b`, in the
//! frame `E_1 = e_θ`, `E_2 = e_φ` at the source direction. The Jacobi
//! equation reads
//!
//! ```text
//! Ẍ = -(1/4r) A(t) X - (1/8r²) |A_F|²(t) X,        ẍ³ = 0,
//! ```
//!
//! with `A_AB = -4 ∂Ξ_AB/∂u` and `t` identified with `u`. Masses start at
//! rest at `X = d0·I`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{interpolate_cubic, DerivativeRule, TailModel};
use crate::radiation::{sigma_from_xi, RadiativePayload};
use crate::sphere::{OneFormField, SphereGrid, SttField};

pub type Mat2 = [[f64; 2]; 2];

/// How the configuration enters the right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum Linearization {
    /// Initial positions `d0·I` substituted on the right (the leading-order
    /// equation whose solution is the closed form).
    #[default]
    Frozen,
    /// Current positions on the right.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig {
    pub d0: f64,
    pub r: f64,
    /// Source direction `(θ, φ)` on the sphere.
    pub direction: (f64, f64),
    pub include_em_correction: bool,
    pub linearization: Linearization,
    /// Relative change between step halvings accepted as converged.
    pub tolerance: f64,
    pub max_halvings: u32,
}

impl DetectorConfig {
    pub fn new(d0: f64, r: f64, direction: (f64, f64)) -> Self {
        DetectorConfig {
            d0,
            r,
            direction,
            include_em_correction: false,
            linearization: Linearization::Frozen,
            tolerance: 1e-3,
            max_halvings: 12,
        }
    }

    /// Checks `d0, r > 0`; returns a warning when `d0/r > 10⁻²`.
    pub fn validate(&self) -> Result<Option<String>> {
        if !(self.d0 > 0.0) || !(self.r > 0.0) {
            return Err(Error::Domain(format!("d0 = {} and r = {} must be positive", self.d0, self.r)));
        }
        Ok((self.d0 / self.r > 1e-2).then(|| {
            format!("d0/r = {:.3e} is not small; the far-zone expansion is unreliable", self.d0 / self.r)
        }))
    }
}

/// Bilinear interpolation weights in `(cosθ, φ)` at one direction.
#[derive(Debug, Clone, Copy)]
struct Stencil {
    nodes: [usize; 4],
    weights: [f64; 4],
}

impl Stencil {
    fn new(grid: &SphereGrid, theta: f64, phi: f64) -> Result<Self> {
        let x = theta.cos();
        let c = grid.cos_theta();
        // Gauss nodes in cosθ run from near +1 down to near -1.
        let (hi, lo) = (c[0], c[c.len() - 1]);
        if !(x <= hi && x >= lo) {
            return Err(Error::Range(format!(
                "direction θ = {theta} lies outside the ring span cosθ ∈ [{lo:.6}, {hi:.6}]"
            )));
        }
        let j = c.iter().position(|v| *v <= x).unwrap_or(c.len() - 1).clamp(1, c.len() - 1) - 1;
        let s = (c[j] - x) / (c[j] - c[j + 1]);
        let n = grid.n_phi();
        let dphi = 2.0 * std::f64::consts::PI / n as f64;
        let p = phi.rem_euclid(2.0 * std::f64::consts::PI) / dphi;
        let k = (p.floor() as usize) % n;
        let f = p - p.floor();
        let k1 = (k + 1) % n;
        Ok(Stencil {
            nodes: [grid.index(j, k), grid.index(j, k1), grid.index(j + 1, k), grid.index(j + 1, k1)],
            weights: [(1.0 - s) * (1.0 - f), (1.0 - s) * f, s * (1.0 - f), s * f],
        })
    }

    fn eval(&self, values: &[f64]) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(i, w)| values[*i] * w).sum()
    }
}

/// `(T_θθ, T_θφ)` of an STT field at a direction.
pub fn stt_at(t: &SttField, direction: (f64, f64)) -> Result<[f64; 2]> {
    let s = Stencil::new(t.grid(), direction.0, direction.1)?;
    Ok([s.eval(t.tt()), s.eval(t.tp())])
}

/// `(V_θ, V_φ)` of a 1-form at a direction.
pub fn oneform_at(v: &OneFormField, direction: (f64, f64)) -> Result<[f64; 2]> {
    let s = Stencil::new(v.grid(), direction.0, direction.1)?;
    Ok([s.eval(v.theta_component()), s.eval(v.phi_component())])
}

fn stt_series_at(series: &[SttField], direction: (f64, f64)) -> Result<Vec<[f64; 2]>> {
    let s = Stencil::new(series[0].grid(), direction.0, direction.1)?;
    Ok(series.iter().map(|t| [s.eval(t.tt()), s.eval(t.tp())]).collect())
}

fn matrix(c: [f64; 2]) -> Mat2 {
    [[c[0], c[1]], [c[1], -c[0]]]
}

/// Where the drive comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DriveSource {
    /// Stored `A_W` when present, otherwise differentiate `Ξ`.
    #[default]
    Auto,
    StoredAw,
    FiniteDifference,
}

/// Drive `A_AB(u)` at one direction, stored as `(A_11, A_12)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DriveSeries {
    pub u: Vec<f64>,
    pub a: Vec<[f64; 2]>,
}

/// `A_AB(u)` at `direction`: stored `A_W`, or `-4 ∂Ξ/∂u` by finite differences.
pub fn drive_tensor(p: &RadiativePayload, direction: (f64, f64), source: DriveSource) -> Result<DriveSeries> {
    let use_stored = match source {
        DriveSource::Auto => p.a_w().is_some(),
        DriveSource::StoredAw => true,
        DriveSource::FiniteDifference => false,
    };
    let a = if use_stored {
        let a_w = p.a_w().ok_or_else(|| Error::AbsentField("A_W".into()))?;
        stt_series_at(a_w, direction)?
    } else {
        let xi = stt_series_at(p.xi(), direction)?;
        let d = DerivativeRule::new(p.u())?;
        let tt = d.apply(&xi.iter().map(|c| c[0]).collect::<Vec<_>>());
        let tp = d.apply(&xi.iter().map(|c| c[1]).collect::<Vec<_>>());
        tt.iter().zip(&tp).map(|(a, b)| [-4.0 * a, -4.0 * b]).collect()
    };
    Ok(DriveSeries { u: p.u().to_vec(), a })
}

/// `|A_F|²(u)` at `direction`; `None` for a vacuum payload.
pub fn em_intensity(p: &RadiativePayload, direction: (f64, f64)) -> Result<Option<Vec<f64>>> {
    let Some(a_f) = p.a_f() else { return Ok(None) };
    let s = Stencil::new(a_f[0].grid(), direction.0, direction.1)?;
    Ok(Some(
        a_f.iter()
            .map(|v| {
                let (a, b) = (s.eval(v.theta_component()), s.eval(v.phi_component()));
                a * a + b * b
            })
            .collect(),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectorTrace {
    pub t: Vec<f64>,
    /// `X[a][b] = x^a_(b)` at every sample.
    pub positions: Vec<Mat2>,
    pub velocities: Vec<Mat2>,
    /// `x³_(b)`; zero at leading order.
    pub vertical: Vec<[f64; 2]>,
    /// `X(t_end) - X(t_0)`, or the limit `-(d0/r)(Σ⁺ - Σ⁻)` for closed forms.
    pub displacement: Mat2,
    /// RK4 substeps per grid interval (0 for closed forms).
    pub substeps: usize,
    pub warnings: Vec<String>,
}

impl DetectorTrace {
    pub fn final_velocity(&self) -> Mat2 {
        self.velocities[self.velocities.len() - 1]
    }
}

fn mat_add(a: &Mat2, b: &Mat2, k: f64) -> Mat2 {
    let mut o = *a;
    for i in 0..2 {
        for j in 0..2 {
            o[i][j] += k * b[i][j];
        }
    }
    o
}

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut o = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            o[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    o
}

fn max_abs(m: &Mat2) -> f64 {
    m.iter().flatten().fold(0.0, |a, v| a.max(v.abs()))
}

struct Forcing<'a> {
    cfg: &'a DetectorConfig,
    u: &'a [f64],
    a11: Vec<f64>,
    a12: Vec<f64>,
    em: Option<&'a [f64]>,
}

impl Forcing<'_> {
    fn accel(&self, t: f64, x: &Mat2) -> Mat2 {
        let d0 = self.cfg.d0;
        let r = self.cfg.r;
        let a = matrix([interpolate_cubic(self.u, &self.a11, t), interpolate_cubic(self.u, &self.a12, t)]);
        let xr = match self.cfg.linearization {
            Linearization::Frozen => [[d0, 0.0], [0.0, d0]],
            Linearization::Full => *x,
        };
        let mut acc = mat_mul(&a, &xr);
        for v in acc.iter_mut().flatten() {
            *v *= -0.25 / r;
        }
        if let Some(em) = self.em {
            let k = -0.125 / (r * r) * interpolate_cubic(self.u, em, t);
            acc = mat_add(&acc, &xr, k);
        }
        acc
    }

    fn run(&self, substeps: usize) -> (Vec<Mat2>, Vec<Mat2>) {
        let d0 = self.cfg.d0;
        let mut x: Mat2 = [[d0, 0.0], [0.0, d0]];
        let mut v: Mat2 = [[0.0; 2]; 2];
        let mut xs = vec![x];
        let mut vs = vec![v];
        for i in 0..self.u.len() - 1 {
            let h = (self.u[i + 1] - self.u[i]) / substeps as f64;
            for s in 0..substeps {
                let t = self.u[i] + s as f64 * h;
                let k1x = v;
                let k1v = self.accel(t, &x);
                let x2 = mat_add(&x, &k1x, 0.5 * h);
                let k2x = mat_add(&v, &k1v, 0.5 * h);
                let k2v = self.accel(t + 0.5 * h, &x2);
                let x3 = mat_add(&x, &k2x, 0.5 * h);
                let k3x = mat_add(&v, &k2v, 0.5 * h);
                let k3v = self.accel(t + 0.5 * h, &x3);
                let x4 = mat_add(&x, &k3x, h);
                let k4x = mat_add(&v, &k3v, h);
                let k4v = self.accel(t + h, &x4);
                for a in 0..2 {
                    for b in 0..2 {
                        x[a][b] += h / 6.0 * (k1x[a][b] + 2.0 * k2x[a][b] + 2.0 * k3x[a][b] + k4x[a][b]);
                        v[a][b] += h / 6.0 * (k1v[a][b] + 2.0 * k2v[a][b] + 2.0 * k3v[a][b] + k4v[a][b]);
                    }
                }
            }
            xs.push(x);
            vs.push(v);
        }
        (xs, vs)
    }
}

/// Integrates the Jacobi equation with RK4, the drive interpolated by local
/// cubics between grid samples. Substeps per grid interval double until the
/// trace changes by less than `cfg.tolerance` relative to its excursion.
pub fn integrate_jacobi(cfg: &DetectorConfig, drive: &DriveSeries, em: Option<&[f64]>) -> Result<DetectorTrace> {
    let warning = cfg.validate()?;
    if drive.u.len() < 2 {
        return Err(Error::Range("drive needs at least 2 samples".into()));
    }
    if let Some(e) = em {
        if e.len() != drive.u.len() {
            return Err(Error::Shape {
                field: "|A_F|^2".into(),
                detail: format!("{} samples for {} drive samples", e.len(), drive.u.len()),
            });
        }
    }
    let forcing = Forcing {
        cfg,
        u: &drive.u,
        a11: drive.a.iter().map(|c| c[0]).collect(),
        a12: drive.a.iter().map(|c| c[1]).collect(),
        em: if cfg.include_em_correction { em } else { None },
    };
    let identity: Mat2 = [[cfg.d0, 0.0], [0.0, cfg.d0]];
    let excursion = |xs: &[Mat2]| xs.iter().map(|x| max_abs(&mat_add(x, &identity, -1.0))).fold(0.0, f64::max);
    let mut substeps = 1;
    let (mut xs, mut vs) = forcing.run(substeps);
    let mut converged = false;
    for _ in 0..cfg.max_halvings {
        substeps *= 2;
        let (x2, v2) = forcing.run(substeps);
        let change = xs
            .iter()
            .zip(&x2)
            .map(|(a, b)| max_abs(&mat_add(a, b, -1.0)))
            .fold(0.0, f64::max);
        let scale = excursion(&x2);
        xs = x2;
        vs = v2;
        if change <= cfg.tolerance * scale || change == 0.0 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Integrator(format!(
            "trace still changing after {} step halvings",
            cfg.max_halvings
        )));
    }
    let displacement = mat_add(&xs[xs.len() - 1], &xs[0], -1.0);
    Ok(DetectorTrace {
        t: drive.u.clone(),
        vertical: vec![[0.0; 2]; xs.len()],
        positions: xs,
        velocities: vs,
        displacement,
        substeps,
        warnings: warning.into_iter().collect(),
    })
}

/// `ẋ = (d0/r) Ξ`, `X = d0·I - (d0/r)(Σ(t) - Σ⁻)`, `Δx = -(d0/r)(Σ⁺ - Σ⁻)`.
pub fn closed_form_trace(cfg: &DetectorConfig, p: &RadiativePayload, tail: TailModel) -> Result<DetectorTrace> {
    let warning = cfg.validate()?;
    let k = cfg.d0 / cfg.r;
    let sigma = sigma_from_xi(p, tail)?;
    let s_minus = matrix(stt_at(&sigma.sigma_minus, cfg.direction)?);
    let s_plus = matrix(stt_at(&sigma.sigma_plus, cfg.direction)?);
    let identity: Mat2 = [[cfg.d0, 0.0], [0.0, cfg.d0]];
    let positions = stt_series_at(&sigma.sigma, cfg.direction)?
        .into_iter()
        .map(|c| mat_add(&identity, &mat_add(&matrix(c), &s_minus, -1.0), -k))
        .collect::<Vec<_>>();
    let velocities = stt_series_at(p.xi(), cfg.direction)?
        .into_iter()
        .map(|c| {
            let mut m = matrix(c);
            m.iter_mut().flatten().for_each(|v| *v *= k);
            m
        })
        .collect();
    let mut displacement = mat_add(&s_plus, &s_minus, -1.0);
    displacement.iter_mut().flatten().for_each(|v| *v *= -k);
    Ok(DetectorTrace {
        t: p.u().to_vec(),
        vertical: vec![[0.0; 2]; positions.len()],
        positions,
        velocities,
        displacement,
        substeps: 0,
        warnings: warning.into_iter().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::linspace;

    fn gaussian(u: &[f64], t0: &SttField) -> RadiativePayload {
        let xi = u.iter().map(|x| t0.scaled((-x * x).exp())).collect();
        RadiativePayload::new(u.to_vec(), xi).unwrap()
    }

    #[test]
    fn zero_drive_is_static() {
        let cfg = DetectorConfig::new(1.0, 100.0, (1.0, 0.5));
        let drive = DriveSeries {
            u: linspace(-5.0, 5.0, 11),
            a: vec![[0.0; 2]; 11],
        };
        let tr = integrate_jacobi(&cfg, &drive, None).unwrap();
        assert!(tr.positions.iter().all(|x| *x == [[1.0, 0.0], [0.0, 1.0]]));
        assert_eq!(tr.displacement, [[0.0; 2]; 2]);
    }

    #[test]
    fn finite_difference_drive_of_gaussian() {
        let g = SphereGrid::new(4).unwrap();
        let u = linspace(-6.0, 6.0, 241);
        let t0 = SttField::from_fn(&g, |_, _| (1.0, 0.25));
        let p = gaussian(&u, &t0);
        let d = drive_tensor(&p, (1.2, 0.3), DriveSource::Auto).unwrap();
        for (x, a) in u.iter().zip(&d.a) {
            let exact = 8.0 * x * (-x * x).exp();
            assert!((a[0] - exact).abs() < 1e-4 && (a[1] - 0.25 * exact).abs() < 1e-4);
        }
        assert!(matches!(drive_tensor(&p, (1.2, 0.3), DriveSource::StoredAw), Err(Error::AbsentField(_))));
    }

    #[test]
    fn closed_form_substitution() {
        let g = SphereGrid::new(4).unwrap();
        let u = linspace(-1.0, 1.0, 21);
        let t0 = SttField::from_fn(&g, |_, _| (0.5, 0.0));
        let xi = vec![t0.clone(); u.len()];
        let p = RadiativePayload::new(u, xi).unwrap();
        let cfg = DetectorConfig::new(1.0, 100.0, (1.0, 0.0));
        let tr = closed_form_trace(&cfg, &p, TailModel::Off).unwrap();
        assert!((tr.velocities[7][0][0] - 0.005).abs() < 1e-15);
    }

    #[test]
    fn polar_directions_are_out_of_range() {
        let g = SphereGrid::new(4).unwrap();
        let t = SttField::zeros(&g);
        assert!(matches!(stt_at(&t, (0.0, 0.0)), Err(Error::Range(_))));
        assert!(stt_at(&t, (1.0, 7.0)).is_ok());
    }

    #[test]
    fn bilinear_reproduces_linear_in_cos_theta() {
        let g = SphereGrid::new(6).unwrap();
        let t = SttField::from_fn(&g, |th, _| (th.cos(), 2.0));
        let v = stt_at(&t, (1.1, 2.0)).unwrap();
        assert!((v[0] - 1.1f64.cos()).abs() < 1e-14 && (v[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_config() {
        assert!(DetectorConfig::new(0.0, 1.0, (1.0, 0.0)).validate().is_err());
        assert!(DetectorConfig::new(1.0, 10.0, (1.0, 0.0)).validate().unwrap().is_some());
    }
}
