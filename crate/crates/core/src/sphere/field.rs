use std::sync::Arc;

use super::grid::SphereGrid;
use crate::error::{Error, Result};

fn check_len(grid: &SphereGrid, n: usize, what: &str) -> Result<()> {
    if n != grid.len() {
        return Err(Error::Shape {
            field: what.to_string(),
            detail: format!("{n} samples for a grid of {} nodes", grid.len()),
        });
    }
    Ok(())
}

pub(crate) fn check_same_grid(a: &SphereGrid, b: &SphereGrid) -> Result<()> {
    if a != b {
        return Err(Error::Shape {
            field: "grid".into(),
            detail: format!(
                "L={} {}x{} vs L={} {}x{}",
                a.band_limit(),
                a.n_theta(),
                a.n_phi(),
                b.band_limit(),
                b.n_theta(),
                b.n_phi()
            ),
        });
    }
    Ok(())
}

/// Real samples of a function at the grid nodes, ring-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Arc<SphereGrid>,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Arc<SphereGrid>, values: Vec<f64>) -> Result<Self> {
        check_len(&grid, values.len(), "scalar")?;
        Ok(ScalarField { grid, values })
    }

    pub fn zeros(grid: &Arc<SphereGrid>) -> Self {
        ScalarField {
            values: vec![0.0; grid.len()],
            grid: grid.clone(),
        }
    }

    pub fn constant(grid: &Arc<SphereGrid>, c: f64) -> Self {
        ScalarField {
            values: vec![c; grid.len()],
            grid: grid.clone(),
        }
    }

    /// Samples `f(θ, φ)` at every node.
    pub fn from_fn(grid: &Arc<SphereGrid>, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for &t in grid.theta() {
            for &p in grid.phi() {
                values.push(f(t, p));
            }
        }
        ScalarField {
            grid: grid.clone(),
            values,
        }
    }

    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn integral(&self) -> f64 {
        self.grid.integrate(&self.values)
    }

    /// Area mean `f̄ = (1/4π) ∫ f dμ`.
    pub fn mean(&self) -> f64 {
        self.integral() / (4.0 * std::f64::consts::PI)
    }

    pub fn dot(&self, other: &Self) -> f64 {
        let prod: Vec<f64> = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        self.grid.integrate(&prod)
    }

    /// `(∫ f² dμ)^{1/2}`.
    pub fn norm(&self) -> f64 {
        self.dot(self).max(0.0).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        ScalarField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scaled(&self, k: f64) -> Self {
        self.map(|v| k * v)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert!(*self.grid == *other.grid);
        ScalarField {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        }
    }
}

/// Tangent 1-form sampled in the orthonormal dyad `{e_θ, e_φ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct OneFormField {
    grid: Arc<SphereGrid>,
    theta: Vec<f64>,
    phi: Vec<f64>,
}

impl OneFormField {
    pub fn new(grid: Arc<SphereGrid>, theta: Vec<f64>, phi: Vec<f64>) -> Result<Self> {
        check_len(&grid, theta.len(), "one-form theta component")?;
        check_len(&grid, phi.len(), "one-form phi component")?;
        Ok(OneFormField { grid, theta, phi })
    }

    pub fn zeros(grid: &Arc<SphereGrid>) -> Self {
        OneFormField {
            grid: grid.clone(),
            theta: vec![0.0; grid.len()],
            phi: vec![0.0; grid.len()],
        }
    }

    /// Samples `f(θ, φ) -> (V_θ, V_φ)` at every node.
    pub fn from_fn(grid: &Arc<SphereGrid>, f: impl Fn(f64, f64) -> (f64, f64)) -> Self {
        let mut out = Self::zeros(grid);
        for (j, &t) in grid.theta().iter().enumerate() {
            for (k, &p) in grid.phi().iter().enumerate() {
                let (a, b) = f(t, p);
                let i = grid.index(j, k);
                out.theta[i] = a;
                out.phi[i] = b;
            }
        }
        out
    }

    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn theta_component(&self) -> &[f64] {
        &self.theta
    }

    pub fn phi_component(&self) -> &[f64] {
        &self.phi
    }

    /// Pointwise `|V|² = V_θ² + V_φ²`.
    pub fn norm_sq_pointwise(&self) -> Vec<f64> {
        self.theta.iter().zip(&self.phi).map(|(a, b)| a * a + b * b).collect()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        let prod: Vec<f64> = (0..self.theta.len())
            .map(|i| self.theta[i] * other.theta[i] + self.phi[i] * other.phi[i])
            .collect();
        self.grid.integrate(&prod)
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).max(0.0).sqrt()
    }

    /// Largest absolute component value.
    pub fn max_abs(&self) -> f64 {
        self.theta.iter().chain(&self.phi).fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Hodge dual `*V = r̂ × V`, i.e. `(*V)_θ = -V_φ`, `(*V)_φ = V_θ`.
    pub fn star(&self) -> Self {
        OneFormField {
            grid: self.grid.clone(),
            theta: self.phi.iter().map(|v| -v).collect(),
            phi: self.theta.clone(),
        }
    }

    pub fn scaled(&self, k: f64) -> Self {
        OneFormField {
            grid: self.grid.clone(),
            theta: self.theta.iter().map(|v| k * v).collect(),
            phi: self.phi.iter().map(|v| k * v).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert!(*self.grid == *other.grid);
        OneFormField {
            grid: self.grid.clone(),
            theta: self.theta.iter().zip(&other.theta).map(|(&a, &b)| f(a, b)).collect(),
            phi: self.phi.iter().zip(&other.phi).map(|(&a, &b)| f(a, b)).collect(),
        }
    }
}

/// Symmetric traceless 2-tensor in the orthonormal dyad. Only `T_θθ` and
/// `T_θφ` are stored; `T_φφ = -T_θθ` and `T_φθ = T_θφ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SttField {
    grid: Arc<SphereGrid>,
    tt: Vec<f64>,
    tp: Vec<f64>,
}

impl SttField {
    pub fn new(grid: Arc<SphereGrid>, tt: Vec<f64>, tp: Vec<f64>) -> Result<Self> {
        check_len(&grid, tt.len(), "tensor theta-theta component")?;
        check_len(&grid, tp.len(), "tensor theta-phi component")?;
        Ok(SttField { grid, tt, tp })
    }

    pub fn zeros(grid: &Arc<SphereGrid>) -> Self {
        SttField {
            grid: grid.clone(),
            tt: vec![0.0; grid.len()],
            tp: vec![0.0; grid.len()],
        }
    }

    /// Samples `f(θ, φ) -> (T_θθ, T_θφ)` at every node.
    pub fn from_fn(grid: &Arc<SphereGrid>, f: impl Fn(f64, f64) -> (f64, f64)) -> Self {
        let mut out = Self::zeros(grid);
        for (j, &t) in grid.theta().iter().enumerate() {
            for (k, &p) in grid.phi().iter().enumerate() {
                let (a, b) = f(t, p);
                let i = grid.index(j, k);
                out.tt[i] = a;
                out.tp[i] = b;
            }
        }
        out
    }

    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn tt(&self) -> &[f64] {
        &self.tt
    }

    pub fn tp(&self) -> &[f64] {
        &self.tp
    }

    /// Full 2x2 matrix at node `i`: `[[T_θθ, T_θφ], [T_θφ, -T_θθ]]`.
    pub fn matrix_at(&self, i: usize) -> [[f64; 2]; 2] {
        [[self.tt[i], self.tp[i]], [self.tp[i], -self.tt[i]]]
    }

    /// Pointwise `|T|² = T_AB T_AB = 2 (T_θθ² + T_θφ²)`.
    pub fn norm_sq_pointwise(&self) -> Vec<f64> {
        self.tt
            .iter()
            .zip(&self.tp)
            .map(|(a, b)| 2.0 * (a * a + b * b))
            .collect()
    }

    /// `∫ S_AB T_AB dμ`.
    pub fn dot(&self, other: &Self) -> f64 {
        let prod: Vec<f64> = (0..self.tt.len())
            .map(|i| 2.0 * (self.tt[i] * other.tt[i] + self.tp[i] * other.tp[i]))
            .collect();
        self.grid.integrate(&prod)
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).max(0.0).sqrt()
    }

    /// Largest absolute component value.
    pub fn max_abs(&self) -> f64 {
        self.tt.iter().chain(&self.tp).fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Left dual `(*T)_AB = ε_AC T_CB` with the same rotation as
    /// [`OneFormField::star`]: `(*T)_θθ = -T_θφ`, `(*T)_θφ = T_θθ`.
    pub fn star(&self) -> Self {
        SttField {
            grid: self.grid.clone(),
            tt: self.tp.iter().map(|v| -v).collect(),
            tp: self.tt.clone(),
        }
    }

    pub fn scaled(&self, k: f64) -> Self {
        SttField {
            grid: self.grid.clone(),
            tt: self.tt.iter().map(|v| k * v).collect(),
            tp: self.tp.iter().map(|v| k * v).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    /// `self + k · other`.
    pub fn add_scaled(&self, other: &Self, k: f64) -> Self {
        self.zip(other, |a, b| a + k * b)
    }

    fn zip(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert!(*self.grid == *other.grid);
        SttField {
            grid: self.grid.clone(),
            tt: self.tt.iter().zip(&other.tt).map(|(&a, &b)| f(a, b)).collect(),
            tp: self.tp.iter().zip(&other.tp).map(|(&a, &b)| f(a, b)).collect(),
        }
    }
}
