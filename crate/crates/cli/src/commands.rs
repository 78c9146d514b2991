//! Command-line surface. Every handler loads its input, calls one or two
//! library operations and writes what they return.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use nullmem::bondi::{check_mass_loss_equivalence, Orientation};
use nullmem::detector::{
    closed_form_trace, drive_tensor, em_intensity, integrate_jacobi, DetectorConfig, DetectorTrace, DriveSource,
    Linearization,
};
use nullmem::memory::solve_memory;
use nullmem::quadrature::TailModel;
use nullmem::radiation::{
    area_radius, decay_report, flux_per_solid_angle, mass_curve, RadiativePayload, RadiusOptions,
};
use nullmem::sphere::{ShCoefficients, SphereGrid};
use nullmem::synth::{random_bondi, synth, SynthSpec};

use crate::archive::{self, Encoding};
use crate::error::{CliError, Result};
use crate::report::{Csv, Report};

#[derive(Debug, Parser)]
#[command(name = "nullmem", version, about = "Energy flux, Bondi mass loss and null memory from radiative data")]
pub struct Cli {
    /// Leave the timestamp line out of reports.
    #[arg(long, global = true)]
    pub no_timestamp: bool,

    /// Whether u-integrals add a fitted power-law tail beyond the grid.
    #[arg(long, global = true, value_enum, default_value_t = Switch::On)]
    pub tail_model: Switch,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

impl Switch {
    fn on(self) -> bool {
        self == Switch::On
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MemorySource {
    Constraint,
    Direct,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrientationArg {
    Same,
    Reversed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Radiative,
    Bondi,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Input {
    /// Payload archive directory.
    #[arg(long)]
    pub archive: Option<PathBuf>,
    /// Synthesis spec (TOML), generated in memory.
    #[arg(long)]
    pub spec: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a payload archive from a synthesis spec.
    Synth {
        /// Synthesis spec (TOML); library defaults when omitted.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Encoding::Binary)]
        encoding: Encoding,
        #[arg(long, value_enum, default_value_t = KindArg::Radiative)]
        kind: KindArg,
        /// Random terms per Bondi component (with `--kind bondi`).
        #[arg(long, default_value_t = 6)]
        terms: usize,
    },
    /// Bondi mass curve and its endpoints.
    Massloss {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        out: PathBuf,
    },
    /// Radiated energy per solid angle.
    Flux {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        out: PathBuf,
    },
    /// Memory jump from the constraint equations and/or the direct integral.
    Memory {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = MemorySource::Both)]
        source: MemorySource,
    },
    /// Geodesic-deviation trace of a detector ring.
    Detector {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        out: PathBuf,
        /// Initial separation.
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        d0: f64,
        /// Areal distance of the detector.
        #[arg(long, default_value_t = 1.0e4, allow_hyphen_values = true)]
        r: f64,
        /// Source direction `theta,phi` in radians.
        #[arg(long, value_parser = parse_pair, default_value = "1.0,0.5")]
        direction: (f64, f64),
        #[arg(long, value_enum, default_value_t = Switch::Off)]
        em_correction: Switch,
        /// Use the closed form instead of integrating.
        #[arg(long)]
        closed_form: bool,
        /// Keep current positions on the right-hand side.
        #[arg(long)]
        full_linearization: bool,
    },
    /// Pointwise equivalence of the Bondi and radiative mass-loss integrands.
    BondiCheck {
        /// Bondi archive directory.
        #[arg(long)]
        archive: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = OrientationArg::Reversed)]
        orientation: OrientationArg,
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
    },
    /// Area radius along an outgoing null ray and its log coefficient.
    Radius {
        #[arg(long, conflicts_with = "archive", required_unless_present = "archive", allow_hyphen_values = true)]
        mass: Option<f64>,
        /// Take the mass `M(+∞)` from an archive's mass curve.
        #[arg(long)]
        archive: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_parser = parse_pair, default_value = "1000,1000000")]
        t_span: (f64, f64),
        /// `r(t0)`; defaults to `t0`.
        #[arg(long)]
        r0: Option<f64>,
    },
    /// Decay fits and payload invariant audit.
    Validate {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        out: PathBuf,
        /// Largest accepted relative residual of `∂Ξ/∂u + ¼A_W`.
        #[arg(long, default_value_t = 1e-3)]
        aw_tolerance: f64,
    },
}

fn parse_pair(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected two comma-separated numbers, got `{s}`"))?;
    let p = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}"));
    Ok((p(a)?, p(b)?))
}

struct Ctx {
    timestamp: bool,
    tail: TailModel,
}

impl Ctx {
    fn report(&self, command: &str) -> Report {
        Report::new(command, self.timestamp)
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let ctx = Ctx {
        timestamp: !cli.no_timestamp,
        tail: if cli.tail_model.on() { TailModel::PowerLaw } else { TailModel::Off },
    };
    match cli.command {
        Command::Synth { spec, out, encoding, kind, terms } => cmd_synth(&ctx, spec.as_deref(), &out, encoding, kind, terms),
        Command::Massloss { input, out } => cmd_massloss(&ctx, &load(&input)?, &out),
        Command::Flux { input, out } => cmd_flux(&ctx, &load(&input)?, &out),
        Command::Memory { input, out, source } => cmd_memory(&ctx, &load(&input)?, &out, source),
        Command::Detector { input, out, d0, r, direction, em_correction, closed_form, full_linearization } => {
            let mut cfg = DetectorConfig::new(d0, r, direction);
            cfg.include_em_correction = em_correction.on();
            if full_linearization {
                cfg.linearization = Linearization::Full;
            }
            cmd_detector(&ctx, &load(&input)?, &out, &cfg, closed_form)
        }
        Command::BondiCheck { archive, out, orientation, tolerance } => {
            cmd_bondi_check(&ctx, &archive, &out, orientation, tolerance)
        }
        Command::Radius { mass, archive, out, t_span, r0 } => {
            let mass = match (mass, archive) {
                (Some(m), _) => m,
                (None, Some(a)) => mass_curve(&archive::load_payload(&a)?, ctx.tail)?.m_plus,
                (None, None) => return Err(CliError::usage("--mass", "either --mass or --archive is required")),
            };
            cmd_radius(&ctx, mass, &out, t_span, r0.unwrap_or(t_span.0))
        }
        Command::Validate { input, out, aw_tolerance } => cmd_validate(&ctx, &load(&input)?, &out, aw_tolerance),
    }
}

fn read_spec(path: &Path) -> Result<SynthSpec> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    toml::from_str(&text).map_err(|e| CliError::SpecFile { path: path.to_path_buf(), detail: e.message().to_string() })
}

fn load(input: &Input) -> Result<RadiativePayload> {
    match (&input.archive, &input.spec) {
        (Some(a), _) => archive::load_payload(a),
        (None, Some(s)) => Ok(synth(&read_spec(s)?)?),
        (None, None) => Err(CliError::usage("--archive", "an --archive or --spec input is required")),
    }
}

fn out_dir(out: &Path) -> Result<()> {
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))
}

fn describe(r: &mut Report, p: &RadiativePayload) {
    let g = p.grid();
    r.line("band_limit", g.band_limit())
        .line("grid", format_args!("{} x {}", g.n_theta(), g.n_phi()))
        .line("samples", p.len())
        .num("u_min", p.u()[0])
        .num("u_max", p.u()[p.len() - 1])
        .line("electromagnetic", p.a_f().is_some());
}

fn cmd_synth(ctx: &Ctx, spec: Option<&Path>, out: &Path, encoding: Encoding, kind: KindArg, terms: usize) -> Result<()> {
    let spec = match spec {
        Some(p) => read_spec(p)?,
        None => SynthSpec::default(),
    };
    let mut r = ctx.report("synth");
    match kind {
        KindArg::Radiative => {
            let p = synth(&spec)?;
            archive::save_payload(out, &p, encoding)?;
            describe(&mut r, &p);
        }
        KindArg::Bondi => {
            let grid = SphereGrid::new(spec.band_limit)?;
            let b = random_bondi(&grid, spec.u_grid()?, terms, spec.seed)?;
            archive::save_bondi(out, &b, encoding)?;
            r.line("kind", "bondi").line("band_limit", spec.band_limit).line("samples", b.w().len());
        }
    }
    r.line("seed", spec.seed).line("encoding", format_args!("{encoding:?}").to_string().to_lowercase());
    r.write(&out.join("synth.txt"))
}

fn cmd_massloss(ctx: &Ctx, p: &RadiativePayload, out: &Path) -> Result<()> {
    out_dir(out)?;
    let m = mass_curve(p, ctx.tail)?;
    let mut csv = Csv::new(&[("u", "M"), ("mass", "M"), ("rate", "")]);
    for ((u, mass), rate) in m.u.iter().zip(&m.mass).zip(&m.rate) {
        csv.row(&[*u, *mass, *rate]);
    }
    csv.write(&out.join("massloss.csv"))?;
    let mut r = ctx.report("massloss");
    describe(&mut r, p);
    r.line("tail_model", format_args!("{:?}", ctx.tail))
        .num("m_minus", m.m_minus)
        .num("m_plus", m.m_plus)
        .num("radiated", m.m_plus - m.m_minus)
        .num("tail_left", m.tails.left)
        .num("tail_right", m.tails.right);
    r.write(&out.join("massloss.txt"))
}

fn cmd_flux(ctx: &Ctx, p: &RadiativePayload, out: &Path) -> Result<()> {
    out_dir(out)?;
    let f = flux_per_solid_angle(p, ctx.tail)?;
    let g = p.grid();
    let mut csv = Csv::new(&[("theta", "rad"), ("phi", "rad"), ("flux", "M/sr")]);
    for j in 0..g.n_theta() {
        for k in 0..g.n_phi() {
            csv.row(&[g.theta()[j], g.phi()[k], f.values()[g.index(j, k)]]);
        }
    }
    csv.write(&out.join("flux.csv"))?;
    let mut r = ctx.report("flux");
    describe(&mut r, p);
    r.num("total", f.integral()).num("max", f.max_abs());
    r.write(&out.join("flux.txt"))
}

fn potentials(r: &mut Report, name: &str, c: &ShCoefficients) {
    r.section(name);
    for (l, m, v) in c.iter() {
        if v != 0.0 {
            r.num(&format!("l{l}_m{m}"), v);
        }
    }
}

fn cmd_memory(ctx: &Ctx, p: &RadiativePayload, out: &Path, source: MemorySource) -> Result<()> {
    out_dir(out)?;
    let m = solve_memory(p, ctx.tail)?;
    let (constraint, direct) = match source {
        MemorySource::Constraint => (true, false),
        MemorySource::Direct => (false, true),
        MemorySource::Both => (true, true),
    };
    let g = p.grid();
    let mut cols = vec![("theta", "rad"), ("phi", "rad"), ("source", "")];
    if constraint {
        cols.extend([("phi_potential", ""), ("constraint_tt", ""), ("constraint_tp", "")]);
    }
    if direct {
        cols.extend([("direct_tt", ""), ("direct_tp", "")]);
    }
    let mut csv = Csv::new(&cols);
    for j in 0..g.n_theta() {
        for k in 0..g.n_phi() {
            let i = g.index(j, k);
            let mut row = vec![g.theta()[j], g.phi()[k], m.source.values()[i]];
            if constraint {
                row.extend([m.phi.values()[i], m.sigma_jump_constraint.tt()[i], m.sigma_jump_constraint.tp()[i]]);
            }
            if direct {
                row.extend([m.sigma_jump_direct.tt()[i], m.sigma_jump_direct.tp()[i]]);
            }
            csv.row(&row);
        }
    }
    csv.write(&out.join("memory_fields.csv"))?;

    let mut r = ctx.report("memory");
    describe(&mut r, p);
    r.line("source", format_args!("{source:?}").to_string().to_lowercase()).num("source_mean", m.source_mean);
    if constraint {
        r.num("poisson_residual", m.poisson_residual)
            .num("hodge_residual", m.hodge_residual)
            .num("dipole_removed", m.dipole_removed);
    }
    if constraint && direct {
        r.num("constraint_direct_residual", m.residual);
    }
    r.warnings(&m.warnings);
    if constraint {
        potentials(&mut r, "phi_coefficients", &nullmem::sphere::analyze(&m.phi));
        potentials(&mut r, "constraint_electric", &m.constraint_potentials);
    }
    if direct {
        potentials(&mut r, "direct_electric", &m.direct_potentials);
        potentials(&mut r, "direct_magnetic", &m.direct_magnetic_potentials);
    }
    r.write(&out.join("memory.txt"))
}

fn cmd_detector(ctx: &Ctx, p: &RadiativePayload, out: &Path, cfg: &DetectorConfig, closed_form: bool) -> Result<()> {
    out_dir(out)?;
    let trace: DetectorTrace = if closed_form {
        closed_form_trace(cfg, p, ctx.tail)?
    } else {
        let drive = drive_tensor(p, cfg.direction, DriveSource::Auto)?;
        let em = if cfg.include_em_correction { em_intensity(p, cfg.direction)? } else { None };
        integrate_jacobi(cfg, &drive, em.as_deref())?
    };
    let mut csv = Csv::new(&[
        ("t", "M"),
        ("x1_1", "M"),
        ("x1_2", "M"),
        ("x2_1", "M"),
        ("x2_2", "M"),
        ("v1_1", ""),
        ("v1_2", ""),
        ("v2_1", ""),
        ("v2_2", ""),
        ("x3_1", "M"),
        ("x3_2", "M"),
    ]);
    for ((t, x), (v, z)) in trace.t.iter().zip(&trace.positions).zip(trace.velocities.iter().zip(&trace.vertical)) {
        csv.row(&[*t, x[0][0], x[0][1], x[1][0], x[1][1], v[0][0], v[0][1], v[1][0], v[1][1], z[0], z[1]]);
    }
    csv.write(&out.join("detector.csv"))?;
    let mut r = ctx.report("detector");
    describe(&mut r, p);
    let d = trace.displacement;
    r.line("method", if closed_form { "closed-form" } else { "rk4" })
        .line("linearization", format_args!("{:?}", cfg.linearization))
        .line("em_correction", cfg.include_em_correction)
        .num("d0", cfg.d0)
        .num("r", cfg.r)
        .num("theta", cfg.direction.0)
        .num("phi", cfg.direction.1)
        .line("substeps", trace.substeps)
        .list("displacement", &[d[0][0], d[0][1], d[1][0], d[1][1]])
        .warnings(&trace.warnings);
    r.write(&out.join("detector.txt"))
}

fn cmd_bondi_check(ctx: &Ctx, dir: &Path, out: &Path, orientation: OrientationArg, tolerance: f64) -> Result<()> {
    out_dir(out)?;
    let b = archive::load_bondi(dir)?;
    let o = match orientation {
        OrientationArg::Same => Orientation::Same,
        OrientationArg::Reversed => Orientation::Reversed,
    };
    let e = check_mass_loss_equivalence(&b, o)?;
    let mut csv = Csv::new(&[("w", "M"), ("bondi_rate", ""), ("radiative_rate", ""), ("integral_ratio", "")]);
    for (k, w) in b.w().iter().enumerate() {
        csv.row(&[*w, e.bondi_rate[k], e.radiative_rate[k], e.integral_ratio[k]]);
    }
    csv.write(&out.join("bondi_check.csv"))?;
    let mut r = ctx.report("bondi-check");
    r.line("orientation", format_args!("{:?}", e.orientation))
        .num("bondi_prefactor", e.bondi_prefactor)
        .num("radiative_prefactor", e.radiative_prefactor)
        .num("max_pointwise_residual", e.max_pointwise_residual)
        .num("max_gravitational_residual", e.max_gravitational_residual)
        .num("max_em_residual", e.max_em_residual)
        .num("rate_magnitude_residual", e.rate_magnitude_residual)
        .line("signs_consistent", e.signs_consistent)
        .num("tolerance", tolerance)
        .line("pass", e.pass(tolerance));
    r.write(&out.join("bondi_check.txt"))?;
    if e.pass(tolerance) {
        Ok(())
    } else {
        Err(CliError::Validation(format!(
            "pointwise residual {:.3e} exceeds {tolerance:.1e}",
            e.max_pointwise_residual
        )))
    }
}

fn cmd_radius(ctx: &Ctx, mass: f64, out: &Path, (t0, t1): (f64, f64), r0: f64) -> Result<()> {
    out_dir(out)?;
    let tr = area_radius(mass, r0, t0, t1, RadiusOptions::default())?;
    let mut csv = Csv::new(&[("t", "M"), ("r", "M")]);
    for (t, r) in tr.t.iter().zip(&tr.r) {
        csv.row(&[*t, *r]);
    }
    csv.write(&out.join("radius.csv"))?;
    let mut r = ctx.report("radius");
    r.num("mass", mass)
        .num("t0", t0)
        .num("t1", t1)
        .num("r0", r0)
        .num("log_coefficient", tr.log_coefficient)
        .num("intercept", tr.intercept)
        .num("fit_residual", tr.fit_residual)
        .line("steps_per_decade", tr.steps_per_decade);
    r.write(&out.join("radius.txt"))
}

fn cmd_validate(ctx: &Ctx, p: &RadiativePayload, out: &Path, aw_tolerance: f64) -> Result<()> {
    out_dir(out)?;
    let d = decay_report(p)?;
    let mut r = ctx.report("validate");
    describe(&mut r, p);
    let mut failures = Vec::new();
    r.section("decay").num("slack", d.slack);
    for f in &d.fits {
        let exp = f.exponent.map_or("none".to_string(), |e| format!("{e:.6}"));
        r.line(&f.quantity, format_args!("exponent {exp} bound {:.2} pass {}", f.bound, f.pass));
        if !f.pass {
            failures.push(format!("{} decays with exponent {exp}, bound {}", f.quantity, f.bound));
        }
    }
    r.section("audit");
    match p.a_w_residual()? {
        Some(res) => {
            r.num("a_w_residual", res);
            if res > aw_tolerance {
                failures.push(format!("A_W residual {res:.3e} exceeds {aw_tolerance:.1e}"));
            }
        }
        None => {
            r.line("a_w_residual", "absent");
        }
    }
    let mass = match mass_curve(p, ctx.tail) {
        Ok(_) => "monotone".to_string(),
        Err(e) => {
            failures.push(e.to_string());
            format!("failed: {e}")
        }
    };
    r.line("mass_curve", mass).line("pass", failures.is_empty());
    r.write(&out.join("validate.txt"))?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Validation(failures.join("; ")))
    }
}
