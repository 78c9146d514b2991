use serde::{Deserialize, Serialize};

/// Real spherical-harmonic coefficients `a_lm`, `0 <= l <= L`, `-l <= m <= l`,
/// in the orthonormal basis documented in [`crate::sphere`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShCoefficients {
    band_limit: usize,
    data: Vec<f64>,
}

#[inline]
fn index(l: usize, m: i64) -> usize {
    ((l * l + l) as i64 + m) as usize
}

impl ShCoefficients {
    pub fn zeros(band_limit: usize) -> Self {
        ShCoefficients {
            band_limit,
            data: vec![0.0; (band_limit + 1) * (band_limit + 1)],
        }
    }

    /// Builds a coefficient set from `(l, m, value)` triples; repeated
    /// entries accumulate.
    pub fn from_modes(band_limit: usize, modes: &[(usize, i64, f64)]) -> Self {
        let mut c = Self::zeros(band_limit);
        for &(l, m, v) in modes {
            assert!(l <= band_limit && m.unsigned_abs() as usize <= l, "mode ({l},{m}) out of range");
            c.data[index(l, m)] += v;
        }
        c
    }

    pub fn band_limit(&self) -> usize {
        self.band_limit
    }

    #[inline]
    pub fn get(&self, l: usize, m: i64) -> f64 {
        if l > self.band_limit || m.unsigned_abs() as usize > l {
            return 0.0;
        }
        self.data[index(l, m)]
    }

    #[inline]
    pub fn set(&mut self, l: usize, m: i64, value: f64) {
        self.data[index(l, m)] = value;
    }

    /// Coefficients flattened in `(l, m)` order with `m` running `-l..=l`.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, i64, f64)> + '_ {
        (0..=self.band_limit).flat_map(move |l| {
            let li = l as i64;
            (-li..=li).map(move |m| (l, m, self.data[index(l, m)]))
        })
    }

    /// Applies `f(l)` to every coefficient of degree `l`.
    pub fn map_degree(&self, f: impl Fn(usize) -> f64) -> Self {
        let mut out = self.clone();
        for l in 0..=self.band_limit {
            let k = f(l);
            let li = l as i64;
            for m in -li..=li {
                out.data[index(l, m)] *= k;
            }
        }
        out
    }

    /// Same coefficients re-expressed at another band limit (truncating or
    /// zero-padding).
    pub fn resized(&self, band_limit: usize) -> Self {
        let mut out = Self::zeros(band_limit);
        for (l, m, v) in self.iter() {
            if l <= band_limit {
                out.set(l, m, v);
            }
        }
        out
    }

    /// `Σ a_lm²`, equal to `∫ f² dμ` by Parseval.
    pub fn power(&self) -> f64 {
        self.data.iter().map(|a| a * a).sum()
    }

    /// Power restricted to degrees in `range`.
    pub fn power_in(&self, range: std::ops::RangeInclusive<usize>) -> f64 {
        self.iter()
            .filter(|(l, _, _)| range.contains(l))
            .map(|(_, _, a)| a * a)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.power().sqrt()
    }

    pub fn sub(&self, other: &Self) -> Self {
        let l = self.band_limit.max(other.band_limit);
        let mut out = Self::zeros(l);
        for (li, m, _) in out.clone().iter() {
            out.set(li, m, self.get(li, m) - other.get(li, m));
        }
        out
    }

    pub fn scaled(&self, k: f64) -> Self {
        ShCoefficients {
            band_limit: self.band_limit,
            data: self.data.iter().map(|a| a * k).collect(),
        }
    }

    /// Largest absolute coefficient.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, a| acc.max(a.abs()))
    }

    /// Zeroes every degree below `l_min`.
    pub fn without_degrees_below(&self, l_min: usize) -> Self {
        let mut out = self.clone();
        for l in 0..l_min.min(self.band_limit + 1) {
            let li = l as i64;
            for m in -li..=li {
                out.data[index(l, m)] = 0.0;
            }
        }
        out
    }
}
