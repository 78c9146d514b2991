use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::{self, DerivativeRule};
use crate::sphere::check_same_grid as same_grid;
use crate::sphere::{OneFormField, ScalarField, SphereGrid, SttField};

/// Radiative data at null infinity, sampled on a retarded-time grid.
///
/// `xi` is the limit of `r η̂` and `a_f` the limit of `r α̲(F)`. The optional
/// Weyl and Maxwell limits (`A_W`, `B_W`, `P_W`, `Q_W`, `P_F`, `Q_F`) are
/// carried when known. `a_f = None` means a vacuum payload; the mass and
/// memory formulas then reduce to their vacuum form term by term.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiativePayload {
    grid: Arc<SphereGrid>,
    u: Vec<f64>,
    xi: Vec<SttField>,
    a_f: Option<Vec<OneFormField>>,
    a_w: Option<Vec<SttField>>,
    b_w: Option<Vec<OneFormField>>,
    p_w: Option<Vec<ScalarField>>,
    q_w: Option<Vec<ScalarField>>,
    p_f: Option<Vec<ScalarField>>,
    q_f: Option<Vec<ScalarField>>,
    sigma_minus: SttField,
    m_minus: f64,
}

fn check_series<'a, T: 'a>(
    name: &str,
    grid: &SphereGrid,
    n: usize,
    items: impl ExactSizeIterator<Item = &'a T>,
    grid_of: impl Fn(&T) -> &SphereGrid,
) -> Result<()> {
    if items.len() != n {
        return Err(Error::Shape {
            field: name.to_string(),
            detail: format!("{} slices for {n} u samples", items.len()),
        });
    }
    for (i, item) in items.enumerate() {
        same_grid(grid, grid_of(item)).map_err(|_| Error::Shape {
            field: name.to_string(),
            detail: format!("slice {i} lives on a different sphere grid"),
        })?;
    }
    Ok(())
}

impl RadiativePayload {
    pub fn new(u: Vec<f64>, xi: Vec<SttField>) -> Result<Self> {
        quadrature::check_grid(&u)?;
        let grid = xi
            .first()
            .ok_or_else(|| Error::Shape {
                field: "xi".into(),
                detail: "no slices".into(),
            })?
            .grid()
            .clone();
        check_series("xi", &grid, u.len(), xi.iter(), |t| t.grid())?;
        Ok(RadiativePayload {
            sigma_minus: SttField::zeros(&grid),
            grid,
            u,
            xi,
            a_f: None,
            a_w: None,
            b_w: None,
            p_w: None,
            q_w: None,
            p_f: None,
            q_f: None,
            m_minus: 0.0,
        })
    }

    /// All-zero vacuum payload.
    pub fn zeros(grid: &Arc<SphereGrid>, u: Vec<f64>) -> Result<Self> {
        let xi = vec![SttField::zeros(grid); u.len()];
        Self::new(u, xi)
    }

    pub fn with_a_f(mut self, a_f: Vec<OneFormField>) -> Result<Self> {
        check_series("A_F", &self.grid, self.u.len(), a_f.iter(), |v| v.grid())?;
        self.a_f = Some(a_f);
        Ok(self)
    }

    pub fn with_a_w(mut self, a_w: Vec<SttField>) -> Result<Self> {
        check_series("A_W", &self.grid, self.u.len(), a_w.iter(), |v| v.grid())?;
        self.a_w = Some(a_w);
        Ok(self)
    }

    pub fn with_b_w(mut self, b_w: Vec<OneFormField>) -> Result<Self> {
        check_series("B_W", &self.grid, self.u.len(), b_w.iter(), |v| v.grid())?;
        self.b_w = Some(b_w);
        Ok(self)
    }

    /// Sets one of the scalar limits `P_W`, `Q_W`, `P_F`, `Q_F`.
    pub fn with_scalar(mut self, which: ScalarLimit, values: Vec<ScalarField>) -> Result<Self> {
        check_series(which.name(), &self.grid, self.u.len(), values.iter(), |v| v.grid())?;
        let slot = match which {
            ScalarLimit::PW => &mut self.p_w,
            ScalarLimit::QW => &mut self.q_w,
            ScalarLimit::PF => &mut self.p_f,
            ScalarLimit::QF => &mut self.q_f,
        };
        *slot = Some(values);
        Ok(self)
    }

    pub fn with_sigma_minus(mut self, sigma_minus: SttField) -> Result<Self> {
        same_grid(&self.grid, sigma_minus.grid())?;
        self.sigma_minus = sigma_minus;
        Ok(self)
    }

    pub fn with_m_minus(mut self, m_minus: f64) -> Self {
        self.m_minus = m_minus;
        self
    }

    /// Drops the electromagnetic field, leaving the vacuum payload.
    pub fn without_a_f(mut self) -> Self {
        self.a_f = None;
        self
    }

    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn xi(&self) -> &[SttField] {
        &self.xi
    }

    pub fn a_f(&self) -> Option<&[OneFormField]> {
        self.a_f.as_deref()
    }

    pub fn a_w(&self) -> Option<&[SttField]> {
        self.a_w.as_deref()
    }

    pub fn b_w(&self) -> Option<&[OneFormField]> {
        self.b_w.as_deref()
    }

    pub fn scalar(&self, which: ScalarLimit) -> Option<&[ScalarField]> {
        match which {
            ScalarLimit::PW => self.p_w.as_deref(),
            ScalarLimit::QW => self.q_w.as_deref(),
            ScalarLimit::PF => self.p_f.as_deref(),
            ScalarLimit::QF => self.q_f.as_deref(),
        }
    }

    pub fn sigma_minus(&self) -> &SttField {
        &self.sigma_minus
    }

    pub fn m_minus(&self) -> f64 {
        self.m_minus
    }

    /// Index of `u` in the grid (matched to within `1e-12` of the spacing).
    pub fn index_of(&self, u: f64) -> Result<usize> {
        let i = self.u.partition_point(|v| *v < u);
        let scale = 1e-12 * (self.u[self.u.len() - 1] - self.u[0]).abs().max(1.0);
        for k in [i.wrapping_sub(1), i] {
            if let Some(v) = self.u.get(k) {
                if (v - u).abs() <= scale {
                    return Ok(k);
                }
            }
        }
        Err(Error::Range(format!(
            "u = {u} is not a grid node of [{}, {}]",
            self.u[0],
            self.u[self.u.len() - 1]
        )))
    }

    /// Largest interior residual of `∂Ξ/∂u + ¼A_W = 0`, relative to
    /// `max |∂Ξ/∂u|`; `None` when `A_W` is absent.
    pub fn a_w_residual(&self) -> Result<Option<f64>> {
        let Some(a_w) = &self.a_w else {
            return Ok(None);
        };
        let d = DerivativeRule::new(&self.u)?;
        let xi_u = derivative_stt(&d, &self.xi);
        let n = self.u.len();
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for k in 1..n - 1 {
            let r = xi_u[k].add_scaled(&a_w[k], 0.25);
            worst = worst.max(r.max_abs());
            scale = scale.max(xi_u[k].max_abs());
        }
        Ok(Some(if scale > 0.0 { worst / scale } else { worst }))
    }
}

/// The scalar Weyl/Maxwell limits a payload may carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarLimit {
    PW,
    QW,
    PF,
    QF,
}

impl ScalarLimit {
    pub const ALL: [ScalarLimit; 4] = [ScalarLimit::PW, ScalarLimit::QW, ScalarLimit::PF, ScalarLimit::QF];

    pub fn name(self) -> &'static str {
        match self {
            ScalarLimit::PW => "P_W",
            ScalarLimit::QW => "Q_W",
            ScalarLimit::PF => "P_F",
            ScalarLimit::QF => "Q_F",
        }
    }
}

/// Per-node time series of a component: `out[node][k] = slices[k][node]`.
pub(crate) fn by_node(slices: &[&[f64]]) -> Vec<Vec<f64>> {
    let n = slices.first().map_or(0, |s| s.len());
    (0..n).map(|i| slices.iter().map(|s| s[i]).collect()).collect()
}

/// Inverse of [`by_node`].
pub(crate) fn by_slice(nodes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n_u = nodes.first().map_or(0, |s| s.len());
    (0..n_u).map(|k| nodes.iter().map(|s| s[k]).collect()).collect()
}

/// `∂/∂u` of an STT series, node by node.
pub(crate) fn derivative_stt(d: &DerivativeRule, series: &[SttField]) -> Vec<SttField> {
    let grid = series[0].grid().clone();
    let tt: Vec<&[f64]> = series.iter().map(|t| t.tt()).collect();
    let tp: Vec<&[f64]> = series.iter().map(|t| t.tp()).collect();
    let dtt = by_slice(&crate::par::map(&by_node(&tt), |y| d.apply(y)));
    let dtp = by_slice(&crate::par::map(&by_node(&tp), |y| d.apply(y)));
    dtt.into_iter()
        .zip(dtp)
        .map(|(a, b)| SttField::new(grid.clone(), a, b).expect("same grid"))
        .collect()
}
