//! Per-degree operator constants, loaded from the generated table in
//! `data/operator_constants.txt`.
//!
//! | column | meaning |
//! |--------|---------|
//! | `lambda_e` | `div̊(D̂²_e Y_lm) = ∇̊(lambda_e · Y_lm)` |
//! | `lambda_b` | `div̊(D̂²_b Y_lm) = *∇̊(lambda_b · Y_lm)` |
//! | `mu`       | `∫ Y_lm(ω') (1 - ω·ω')^{-1/2} dω' = mu · Y_lm(ω)` |
//!
//! The table is produced by the `gen-constants` binary of the oracle crate
//! (dense quadrature of finite-differenced harmonics); nothing here is typed
//! in by hand. Regenerate with
//! `cargo run -p nullmem-oracle --bin gen-constants -- crates/core/data/operator_constants.txt`.

use std::sync::OnceLock;

use crate::error::{Error, Result};

const TABLE: &str = include_str!("../../data/operator_constants.txt");
const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeConstants {
    pub l: usize,
    pub lambda_e: f64,
    pub lambda_b: f64,
    pub mu: f64,
}

#[derive(Debug, Clone)]
pub struct OperatorConstants {
    rows: Vec<DegreeConstants>,
}

impl OperatorConstants {
    /// The table compiled into the crate.
    pub fn builtin() -> &'static OperatorConstants {
        static CELL: OnceLock<OperatorConstants> = OnceLock::new();
        CELL.get_or_init(|| Self::parse(TABLE).expect("bundled operator constants table is valid"))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut version = None;
        let mut rows: Vec<DegreeConstants> = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(v) = line.strip_prefix("format_version") {
                let v = v.trim_start_matches([' ', '=']).trim();
                version = Some(v.parse::<u32>().map_err(|e| Error::Spec(format!("constants line {}: {e}", n + 1)))?);
                continue;
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.len() != 4 {
                return Err(Error::Spec(format!("constants line {}: expected 4 columns", n + 1)));
            }
            let num = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::Spec(format!("constants line {}: {e}", n + 1)))
            };
            let l = cols[0]
                .parse::<usize>()
                .map_err(|e| Error::Spec(format!("constants line {}: {e}", n + 1)))?;
            if l != rows.len() {
                return Err(Error::Spec(format!(
                    "constants line {}: degree {l} out of sequence",
                    n + 1
                )));
            }
            rows.push(DegreeConstants {
                l,
                lambda_e: num(cols[1])?,
                lambda_b: num(cols[2])?,
                mu: num(cols[3])?,
            });
        }
        match version {
            Some(FORMAT_VERSION) => {}
            Some(v) => return Err(Error::Spec(format!("constants format version {v}, expected {FORMAT_VERSION}"))),
            None => return Err(Error::Spec("constants table has no format_version".into())),
        }
        Ok(OperatorConstants { rows })
    }

    /// Highest tabulated degree.
    pub fn max_degree(&self) -> usize {
        self.rows.len().saturating_sub(1)
    }

    pub fn degree(&self, l: usize) -> Result<&DegreeConstants> {
        self.rows
            .get(l)
            .ok_or_else(|| Error::Resolution(format!("no operator constants for degree {l} (table ends at {})", self.max_degree())))
    }

    pub fn lambda_e(&self, l: usize) -> Result<f64> {
        Ok(self.degree(l)?.lambda_e)
    }

    pub fn lambda_b(&self, l: usize) -> Result<f64> {
        Ok(self.degree(l)?.lambda_b)
    }

    pub fn mu(&self, l: usize) -> Result<f64> {
        Ok(self.degree(l)?.mu)
    }

    pub fn rows(&self) -> &[DegreeConstants] {
        &self.rows
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_table_covers_band_limit_64() {
        let t = OperatorConstants::builtin();
        assert!(t.max_degree() >= 64);
        for row in &t.rows()[2..] {
            assert!(row.lambda_e < 0.0 && row.lambda_b < 0.0 && row.mu > 0.0);
        }
    }

    #[test]
    fn rejects_wrong_version() {
        assert!(OperatorConstants::parse("format_version = 2\n0 0 0 1\n").is_err());
        assert!(OperatorConstants::parse("0 0 0 1\n").is_err());
        assert!(OperatorConstants::parse("format_version = 1\n1 0 0 1\n").is_err());
    }
}
