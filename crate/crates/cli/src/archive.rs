//! Payload archives: a directory holding `manifest.toml` and one data block
//! per field.
//!
//! Blocks are flat arrays in row-major `(u, θ, φ, component)` order, either
//! raw little-endian `f64` (`binary`) or text (`csv`, one `(u, node)` record
//! per line, components comma-separated, `#` lines ignored). The time axis
//! (`u` or `w`) is a block of its own.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use nullmem::bondi::BondiWaveform;
use nullmem::radiation::{RadiativePayload, ScalarLimit};
use nullmem::sphere::{OneFormField, ScalarField, SphereGrid, SttField};

use crate::error::{CliError, Result};

pub const FORMAT_VERSION: u32 = 1;
pub const MANIFEST: &str = "manifest.toml";
const ORDER: &str = "u,theta,phi,component";
const UNITS: &str = "geometric units, G = c = 1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    Binary,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArchiveKind {
    Radiative,
    Bondi,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldEntry {
    pub name: String,
    /// Values per grid node (0 for the time axis).
    pub components: usize,
    /// One slice per time sample, or a single slice.
    pub time_dependent: bool,
    pub file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub format_version: u32,
    pub kind: ArchiveKind,
    pub encoding: Encoding,
    pub band_limit: usize,
    pub n_theta: usize,
    pub n_phi: usize,
    pub samples: usize,
    pub order: String,
    pub units: String,
    #[serde(default)]
    pub m_minus: f64,
    pub fields: Vec<FieldEntry>,
}

impl Manifest {
    fn expected_len(&self, f: &FieldEntry) -> usize {
        if f.components == 0 {
            return self.samples;
        }
        let slices = if f.time_dependent { self.samples } else { 1 };
        slices * self.n_theta * self.n_phi * f.components
    }

    pub fn field(&self, name: &str) -> Option<&FieldEntry> {
        self.fields.iter().find(|f| f.name == name)
    }
}

struct Writer {
    dir: PathBuf,
    encoding: Encoding,
    fields: Vec<FieldEntry>,
}

impl Writer {
    fn new(dir: &Path, encoding: Encoding) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Writer { dir: dir.to_path_buf(), encoding, fields: Vec::new() })
    }

    fn block(&mut self, name: &str, components: usize, time_dependent: bool, values: &[f64]) -> Result<()> {
        let ext = match self.encoding {
            Encoding::Binary => "f64",
            Encoding::Csv => "csv",
        };
        let file = format!("{name}.{ext}");
        let path = self.dir.join(&file);
        let bytes = match self.encoding {
            Encoding::Binary => values.iter().flat_map(|v| v.to_le_bytes()).collect::<Vec<u8>>(),
            Encoding::Csv => {
                let width = components.max(1);
                let mut s = format!("# {name}: {ORDER}, {width} per record\n");
                for rec in values.chunks(width) {
                    let line: Vec<String> = rec.iter().map(|v| format!("{v:e}")).collect();
                    s.push_str(&line.join(","));
                    s.push('\n');
                }
                s.into_bytes()
            }
        };
        fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        self.fields.push(FieldEntry { name: name.into(), components, time_dependent, file });
        Ok(())
    }

    fn finish(self, kind: ArchiveKind, grid: &SphereGrid, samples: usize, m_minus: f64) -> Result<()> {
        let m = Manifest {
            format_version: FORMAT_VERSION,
            kind,
            encoding: self.encoding,
            band_limit: grid.band_limit(),
            n_theta: grid.n_theta(),
            n_phi: grid.n_phi(),
            samples,
            order: ORDER.into(),
            units: UNITS.into(),
            m_minus,
            fields: self.fields,
        };
        let text = toml::to_string(&m).map_err(|e| CliError::archive("manifest", e.to_string()))?;
        let path = self.dir.join(MANIFEST);
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))
    }
}

fn flat_stt(series: &[SttField]) -> Vec<f64> {
    let mut out = Vec::with_capacity(series.len() * series.first().map_or(0, |t| 2 * t.tt().len()));
    for t in series {
        for (a, b) in t.tt().iter().zip(t.tp()) {
            out.push(*a);
            out.push(*b);
        }
    }
    out
}

fn flat_oneform(series: &[OneFormField]) -> Vec<f64> {
    let mut out = Vec::new();
    for v in series {
        for (a, b) in v.theta_component().iter().zip(v.phi_component()) {
            out.push(*a);
            out.push(*b);
        }
    }
    out
}

fn flat_scalar(series: &[ScalarField]) -> Vec<f64> {
    series.iter().flat_map(|f| f.values().iter().copied()).collect()
}

fn scalar_field_name(which: ScalarLimit) -> &'static str {
    match which {
        ScalarLimit::PW => "p_w",
        ScalarLimit::QW => "q_w",
        ScalarLimit::PF => "p_f",
        ScalarLimit::QF => "q_f",
    }
}

pub fn save_payload(dir: &Path, p: &RadiativePayload, encoding: Encoding) -> Result<()> {
    let mut w = Writer::new(dir, encoding)?;
    w.block("u", 0, true, p.u())?;
    w.block("xi", 2, true, &flat_stt(p.xi()))?;
    if let Some(a) = p.a_f() {
        w.block("a_f", 2, true, &flat_oneform(a))?;
    }
    if let Some(a) = p.a_w() {
        w.block("a_w", 2, true, &flat_stt(a))?;
    }
    if let Some(b) = p.b_w() {
        w.block("b_w", 2, true, &flat_oneform(b))?;
    }
    for which in ScalarLimit::ALL {
        if let Some(s) = p.scalar(which) {
            w.block(scalar_field_name(which), 1, true, &flat_scalar(s))?;
        }
    }
    w.block("sigma_minus", 2, false, &flat_stt(std::slice::from_ref(p.sigma_minus())))?;
    w.finish(ArchiveKind::Radiative, p.grid(), p.len(), p.m_minus())
}

pub fn save_bondi(dir: &Path, b: &BondiWaveform, encoding: Encoding) -> Result<()> {
    let mut w = Writer::new(dir, encoding)?;
    w.block("w", 0, true, b.w())?;
    w.block("c", 1, true, &flat_scalar(b.c()))?;
    w.block("d", 1, true, &flat_scalar(b.d()))?;
    w.block("x", 1, true, &flat_scalar(b.x()))?;
    w.block("y", 1, true, &flat_scalar(b.y()))?;
    w.finish(ArchiveKind::Bondi, b.grid(), b.w().len(), 0.0)
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    let path = dir.join(MANIFEST);
    let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    let m: Manifest = toml::from_str(&text).map_err(|e| CliError::archive("manifest", e.message().to_string()))?;
    if m.format_version != FORMAT_VERSION {
        return Err(CliError::archive(
            "format_version",
            format!("archive has version {}, this build reads {FORMAT_VERSION}", m.format_version),
        ));
    }
    if m.order != ORDER {
        return Err(CliError::archive("order", format!("expected `{ORDER}`, found `{}`", m.order)));
    }
    Ok(m)
}

struct Reader {
    dir: PathBuf,
    manifest: Manifest,
    grid: Arc<SphereGrid>,
}

impl Reader {
    fn open(dir: &Path, kind: ArchiveKind) -> Result<Self> {
        let manifest = read_manifest(dir)?;
        if manifest.kind != kind {
            return Err(CliError::archive("kind", format!("expected a {kind:?} archive, found {:?}", manifest.kind)));
        }
        let grid = SphereGrid::with_resolution(manifest.band_limit, manifest.n_theta, manifest.n_phi)
            .map_err(|e| CliError::archive("band_limit", e.to_string()))?;
        Ok(Reader { dir: dir.to_path_buf(), manifest, grid })
    }

    fn values(&self, name: &str) -> Result<Option<Vec<f64>>> {
        let Some(f) = self.manifest.field(name) else { return Ok(None) };
        let path = self.dir.join(&f.file);
        let raw = fs::read(&path).map_err(|e| CliError::io(&path, e))?;
        let values = match self.manifest.encoding {
            Encoding::Binary => {
                if raw.len() % 8 != 0 {
                    return Err(CliError::archive(name, format!("{} bytes is not a whole number of f64", raw.len())));
                }
                raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8"))).collect()
            }
            Encoding::Csv => {
                let text = String::from_utf8(raw).map_err(|_| CliError::archive(name, "block is not UTF-8"))?;
                let width = f.components.max(1);
                let mut out = Vec::new();
                for (n, line) in text.lines().enumerate() {
                    let line = line.trim();
                    if line.is_empty() || line.starts_with('#') {
                        continue;
                    }
                    let rec: Vec<&str> = line.split(',').collect();
                    if rec.len() != width {
                        return Err(CliError::archive(
                            name,
                            format!("line {}: {} values, expected {width}", n + 1, rec.len()),
                        ));
                    }
                    for s in rec {
                        out.push(s.trim().parse::<f64>().map_err(|e| {
                            CliError::archive(name, format!("line {}: `{s}`: {e}", n + 1))
                        })?);
                    }
                }
                out
            }
        };
        let want = self.manifest.expected_len(f);
        if values.len() != want {
            return Err(CliError::archive(name, format!("{} values, expected {want}", values.len())));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(CliError::archive(name, format!("non-finite value at position {i}")));
        }
        Ok(Some(values))
    }

    fn required(&self, name: &str) -> Result<Vec<f64>> {
        self.values(name)?.ok_or_else(|| CliError::archive(name, "required block missing from manifest"))
    }

    fn node_count(&self) -> usize {
        self.grid.len()
    }

    fn stt(&self, name: &str) -> Result<Option<Vec<SttField>>> {
        let n = self.node_count();
        self.values(name)?
            .map(|v| {
                v.chunks(2 * n)
                    .map(|s| {
                        let tt = s.iter().step_by(2).copied().collect();
                        let tp = s.iter().skip(1).step_by(2).copied().collect();
                        SttField::new(self.grid.clone(), tt, tp).map_err(CliError::from)
                    })
                    .collect()
            })
            .transpose()
    }

    fn oneform(&self, name: &str) -> Result<Option<Vec<OneFormField>>> {
        let n = self.node_count();
        self.values(name)?
            .map(|v| {
                v.chunks(2 * n)
                    .map(|s| {
                        let a = s.iter().step_by(2).copied().collect();
                        let b = s.iter().skip(1).step_by(2).copied().collect();
                        OneFormField::new(self.grid.clone(), a, b).map_err(CliError::from)
                    })
                    .collect()
            })
            .transpose()
    }

    fn scalar(&self, name: &str) -> Result<Option<Vec<ScalarField>>> {
        let n = self.node_count();
        self.values(name)?
            .map(|v| {
                v.chunks(n)
                    .map(|s| ScalarField::new(self.grid.clone(), s.to_vec()).map_err(CliError::from))
                    .collect()
            })
            .transpose()
    }

    fn check_components(&self, name: &str, want: usize) -> Result<()> {
        match self.manifest.field(name) {
            Some(f) if f.components != want => {
                Err(CliError::archive(name, format!("{} components, expected {want}", f.components)))
            }
            _ => Ok(()),
        }
    }
}

pub fn load_payload(dir: &Path) -> Result<RadiativePayload> {
    let r = Reader::open(dir, ArchiveKind::Radiative)?;
    let known = ["u", "xi", "a_f", "a_w", "b_w", "p_w", "q_w", "p_f", "q_f", "sigma_minus"];
    if let Some(f) = r.manifest.fields.iter().find(|f| !known.contains(&f.name.as_str())) {
        return Err(CliError::archive(&f.name, "unknown field"));
    }
    for (name, c) in [("u", 0), ("xi", 2), ("a_f", 2), ("a_w", 2), ("b_w", 2), ("sigma_minus", 2)] {
        r.check_components(name, c)?;
    }
    for which in ScalarLimit::ALL {
        r.check_components(scalar_field_name(which), 1)?;
    }
    let u = r.required("u")?;
    let xi = r.stt("xi")?.ok_or_else(|| CliError::archive("xi", "required block missing from manifest"))?;
    let mut p = RadiativePayload::new(u, xi)?.with_m_minus(r.manifest.m_minus);
    if let Some(a) = r.oneform("a_f")? {
        p = p.with_a_f(a)?;
    }
    if let Some(a) = r.stt("a_w")? {
        p = p.with_a_w(a)?;
    }
    if let Some(b) = r.oneform("b_w")? {
        p = p.with_b_w(b)?;
    }
    for which in ScalarLimit::ALL {
        if let Some(s) = r.scalar(scalar_field_name(which))? {
            p = p.with_scalar(which, s)?;
        }
    }
    if let Some(mut s) = r.stt("sigma_minus")? {
        p = p.with_sigma_minus(s.remove(0))?;
    }
    Ok(p)
}

pub fn load_bondi(dir: &Path) -> Result<BondiWaveform> {
    let r = Reader::open(dir, ArchiveKind::Bondi)?;
    for (name, c) in [("w", 0), ("c", 1), ("d", 1), ("x", 1), ("y", 1)] {
        r.check_components(name, c)?;
    }
    let w = r.required("w")?;
    let series = |name: &str| -> Result<Vec<ScalarField>> {
        r.scalar(name)?.ok_or_else(|| CliError::archive(name, "required block missing from manifest"))
    };
    Ok(BondiWaveform::new(w, series("c")?, series("d")?, series("x")?, series("y")?)?)
}
