//! Reproducible experiments over `circlefock`, one command per run.
//!
//! A [`RunConfig`] names a command and its flags. [`run`] validates it, fills
//! in defaults that depend on the input, executes the command and returns a
//! [`Report`] embedding the resolved configuration, so a report can be
//! replayed with [`replay_config`].

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use circlefock::certify::{self, Exponent, FockParams};
use circlefock::density::{self, PackingConfig};
use circlefock::fock::{self, ComplexValue};
use circlefock::geometry::{self, io as pio};
use circlefock::lattice::{self, LatticeKind, LatticeSpec};
use circlefock::{GridSpec, Point, PointSet, Region};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] circlefock::Error),
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed {what}: {source}")]
    Json {
        what: String,
        source: serde_json::Error,
    },
}

impl CliError {
    /// 2 for anything wrong with the inputs, 3 when the computation itself
    /// fails on valid inputs.
    pub fn exit_code(&self) -> i32 {
        use circlefock::Error as E;
        match self {
            CliError::Core(
                E::NotAPacking { .. }
                | E::NotACovering { .. }
                | E::KernelOverflow(_)
                | E::IllPosed { .. }
                | E::NoConvergence { .. }
                | E::NotHermitian { .. }
                | E::NotPositiveDefinite { .. }
                | E::PerturbCollision(_),
            ) => 3,
            _ => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn config_err<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Config(msg.into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Lattice,
    Separation,
    Cover,
    Density,
    Packing,
    Covering,
    CertifyInterp,
    CertifySampling,
    FockGram,
    FockInterp,
    FockSweep,
    Thresholds,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Lattice => "lattice",
            Command::Separation => "separation",
            Command::Cover => "cover",
            Command::Density => "density",
            Command::Packing => "packing",
            Command::Covering => "covering",
            Command::CertifyInterp => "certify-interp",
            Command::CertifySampling => "certify-sampling",
            Command::FockGram => "fock-gram",
            Command::FockInterp => "fock-interp",
            Command::FockSweep => "fock-sweep",
            Command::Thresholds => "thresholds",
        }
    }

    fn required(self) -> &'static [&'static str] {
        match self {
            Command::Lattice => &["kind", "spacing", "window"],
            Command::Separation | Command::Cover | Command::Density | Command::Packing => &["input"],
            Command::Covering => &["input", "r0"],
            Command::CertifyInterp | Command::FockGram | Command::FockInterp => &["input", "alpha"],
            Command::CertifySampling => &["input", "alpha", "sigma"],
            Command::FockSweep | Command::Thresholds => &["alpha"],
        }
    }

    fn allowed(self) -> &'static [&'static str] {
        const DENSITY: &[&str] = &["input", "output", "region", "pad", "radii", "zeta_step"];
        match self {
            Command::Lattice => &["kind", "spacing", "window", "output", "seed", "perturb"],
            Command::Separation => &["input", "output"],
            Command::Cover => &["input", "output", "region", "grid_step", "sigma"],
            Command::Density => DENSITY,
            Command::Packing => &["input", "output", "region", "pad", "radii", "zeta_step", "r0"],
            Command::Covering => &["input", "output", "region", "pad", "radii", "zeta_step", "r0"],
            Command::CertifyInterp => &["input", "output", "alpha", "p"],
            Command::CertifySampling => &["input", "output", "alpha", "p", "sigma", "region", "grid_step"],
            Command::FockGram => &["input", "output", "alpha", "p", "tol"],
            Command::FockInterp => &["input", "output", "alpha", "p", "targets"],
            Command::FockSweep => &["output", "alpha", "p", "spacings", "rings"],
            Command::Thresholds => &["output", "alpha", "p"],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Hex,
    Square,
}

impl From<Kind> for LatticeKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Hex => LatticeKind::Hexagonal,
            Kind::Square => LatticeKind::Square,
        }
    }
}

/// Everything a run depends on. Unset optional flags are omitted from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Exponent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Fock interpolation data: a JSON array of `[re, im]` pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub targets: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<Kind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spacing: Option<f64>,
    /// Side of the square lattice window centred at the origin.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<f64>,
    /// Scan region for `cover`/`certify-sampling`; the centre region for the
    /// density commands.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<Region>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pad: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spacings: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturb: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rings: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            alpha: None,
            p: None,
            input: None,
            output: None,
            targets: None,
            kind: None,
            spacing: None,
            window: None,
            region: None,
            pad: None,
            radii: None,
            spacings: None,
            zeta_step: None,
            grid_step: None,
            sigma: None,
            r0: None,
            seed: None,
            perturb: None,
            rings: None,
            tol: None,
        }
    }

    fn present(&self) -> Vec<&'static str> {
        let flags = [
            ("alpha", self.alpha.is_some()),
            ("p", self.p.is_some()),
            ("input", self.input.is_some()),
            ("output", self.output.is_some()),
            ("targets", self.targets.is_some()),
            ("kind", self.kind.is_some()),
            ("spacing", self.spacing.is_some()),
            ("window", self.window.is_some()),
            ("region", self.region.is_some()),
            ("pad", self.pad.is_some()),
            ("radii", self.radii.is_some()),
            ("spacings", self.spacings.is_some()),
            ("zeta_step", self.zeta_step.is_some()),
            ("grid_step", self.grid_step.is_some()),
            ("sigma", self.sigma.is_some()),
            ("r0", self.r0.is_some()),
            ("seed", self.seed.is_some()),
            ("perturb", self.perturb.is_some()),
            ("rings", self.rings.is_some()),
            ("tol", self.tol.is_some()),
        ];
        flags.into_iter().filter(|f| f.1).map(|f| f.0).collect()
    }

    /// Flag presence and value checks. Runs before any file is read.
    pub fn validate(&self) -> CliResult<()> {
        let cmd = self.command;
        let present = self.present();
        let missing: Vec<String> = cmd
            .required()
            .iter()
            .filter(|f| !present.contains(f))
            .map(|f| flag_name(f))
            .collect();
        if !missing.is_empty() {
            return config_err(format!("{} requires {}", cmd.name(), missing.join(", ")));
        }
        let unused: Vec<String> = present
            .iter()
            .filter(|f| !cmd.allowed().contains(f))
            .map(|f| flag_name(f))
            .collect();
        if !unused.is_empty() {
            return config_err(format!("{} does not take {}", cmd.name(), unused.join(", ")));
        }
        if self.perturb.is_some() && self.seed.is_none() {
            return config_err("--perturb requires --seed");
        }
        for (name, v) in [
            ("alpha", self.alpha),
            ("spacing", self.spacing),
            ("window", self.window),
            ("zeta-step", self.zeta_step),
            ("grid-step", self.grid_step),
            ("sigma", self.sigma),
            ("r0", self.r0),
            ("tol", self.tol),
        ] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return config_err(format!("--{name} must be a positive number, got {v}"));
                }
            }
        }
        for (name, v) in [("pad", self.pad), ("perturb", self.perturb)] {
            if let Some(v) = v {
                if !(v.is_finite() && v >= 0.0) {
                    return config_err(format!("--{name} must be non-negative, got {v}"));
                }
            }
        }
        if self.rings == Some(0) {
            return config_err("--rings must be at least 1");
        }
        for (name, list) in [("radii", &self.radii), ("spacings", &self.spacings)] {
            if let Some(list) = list {
                if list.is_empty() || list.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
                    return config_err(format!("--{name} must be a non-empty list of positive numbers"));
                }
            }
        }
        if let Some(radii) = &self.radii {
            if radii.len() < 2 || radii.windows(2).any(|w| w[0] >= w[1]) {
                return config_err("--radii must list at least two strictly increasing radii");
            }
        }
        if let Some(region) = &self.region {
            Region::new(region.xmin, region.xmax, region.ymin, region.ymax)?;
        }
        if matches!(cmd, Command::FockGram | Command::FockInterp | Command::FockSweep) {
            if let Some(p) = self.p {
                if p.get() != 2.0 {
                    return config_err("Fock numerics are implemented for p = 2 only");
                }
            }
        }
        Ok(())
    }
}

fn flag_name(field: &str) -> String {
    format!("--{}", field.replace('_', "-"))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: Command,
    pub version: String,
    pub config: RunConfig,
    pub outputs: Value,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialise")
    }
}

/// Reads a configuration from a report file (its `config` member) or from a
/// bare configuration file.
pub fn replay_config(path: &Path) -> CliResult<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let json_err = |source| CliError::Json {
        what: path.display().to_string(),
        source,
    };
    let value: Value = serde_json::from_str(&text).map_err(json_err)?;
    let config = match value.get("config") {
        Some(c) => c.clone(),
        None => value,
    };
    serde_json::from_value(config).map_err(json_err)
}

/// Validates, executes and writes any output file. The returned report holds
/// the resolved configuration.
pub fn run(config: &RunConfig) -> CliResult<Report> {
    config.validate()?;
    let mut resolved = config.clone();
    let outputs = match config.command {
        Command::Lattice => run_lattice(&mut resolved)?,
        Command::Separation => run_separation(&resolved)?,
        Command::Cover => run_cover(&mut resolved)?,
        Command::Density => run_density(&mut resolved)?,
        Command::Packing => run_packing(&mut resolved)?,
        Command::Covering => run_covering(&mut resolved)?,
        Command::CertifyInterp => run_certify_interp(&mut resolved)?,
        Command::CertifySampling => run_certify_sampling(&mut resolved)?,
        Command::FockGram => run_fock_gram(&mut resolved)?,
        Command::FockInterp => run_fock_interp(&mut resolved)?,
        Command::FockSweep => run_fock_sweep(&mut resolved)?,
        Command::Thresholds => run_thresholds(&mut resolved)?,
    };
    let report = Report {
        command: config.command,
        version: VERSION.to_string(),
        config: resolved,
        outputs,
    };
    if !matches!(config.command, Command::Lattice | Command::FockSweep) {
        if let Some(path) = &config.output {
            write_text(path, &report.to_json())?;
        }
    }
    Ok(report)
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    let werr = |source| CliError::Write {
        path: path.to_path_buf(),
        source,
    };
    let mut f = BufWriter::new(File::create(path).map_err(werr)?);
    f.write_all(text.as_bytes()).map_err(werr)?;
    f.write_all(b"\n").map_err(werr)?;
    f.flush().map_err(werr)
}

fn load(cfg: &RunConfig) -> CliResult<PointSet> {
    let path = cfg.input.as_ref().expect("validated");
    if !path.exists() {
        return Err(CliError::Read {
            path: path.clone(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "no such file"),
        });
    }
    Ok(pio::read_path(path)?)
}

fn params(cfg: &mut RunConfig) -> CliResult<FockParams> {
    let p = *cfg.p.get_or_insert(Exponent::new(2.0)?);
    Ok(FockParams::new(cfg.alpha.expect("validated"), p)?)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("outputs serialise")
}

fn run_lattice(cfg: &mut RunConfig) -> CliResult<Value> {
    let spec = LatticeSpec::new(cfg.kind.unwrap().into(), cfg.spacing.unwrap())?;
    let window = Region::square(Point::ORIGIN, cfg.window.unwrap())?;
    let mut ps = lattice::generate(&spec, &window)?;
    if let Some(m) = cfg.perturb {
        ps = lattice::perturb(&ps, m, cfg.seed.unwrap())?.with_window(window);
    }
    let mut out = json!({
        "kind": spec.kind,
        "spacing": spec.spacing,
        "window": window,
        "n": ps.len(),
        "lattice_density": spec.density(),
        "lattice_covering_radius": spec.covering_radius(),
    });
    if ps.len() >= 2 {
        out["separation"] = json!(geometry::min_separation(&ps)?);
    }
    match &cfg.output {
        Some(path) => pio::write_path(&ps, path)?,
        None => out["points"] = to_value(&ps.points()),
    }
    Ok(out)
}

fn run_separation(cfg: &RunConfig) -> CliResult<Value> {
    let ps = load(cfg)?;
    Ok(json!({ "n": ps.len(), "separation": geometry::min_separation(&ps)? }))
}

/// Default scan region: the populated window pulled in by two separations,
/// which keeps the clipped boundary of a finite sample out of the scan.
fn default_scan_region(ps: &PointSet, sep: f64) -> CliResult<Region> {
    let w = ps.populated_window().ok_or(circlefock::Error::EmptyPointSet)?;
    let m = 2.0 * sep;
    Region::new(w.xmin + m, w.xmax - m, w.ymin + m, w.ymax - m).or_else(|_| {
        config_err(format!(
            "point set too small for the default scan region (inset {m} from {w:?}); pass --region"
        ))
    })
}

fn scan_inputs(cfg: &mut RunConfig, ps: &PointSet) -> CliResult<(f64, Region, GridSpec)> {
    let sep = geometry::min_separation(ps)?;
    let region = match cfg.region {
        Some(r) => r,
        None => default_scan_region(ps, sep)?,
    };
    let step = *cfg.grid_step.get_or_insert(sep / 100.0);
    cfg.region = Some(region);
    let grid = GridSpec::new(step)?;
    grid.validate_for(&region)?;
    Ok((sep, region, grid))
}

fn run_cover(cfg: &mut RunConfig) -> CliResult<Value> {
    let ps = load(cfg)?;
    let (sep, region, grid) = scan_inputs(cfg, &ps)?;
    let scan = geometry::covering_scan(&ps, &region, &grid)?;
    let mut out = json!({
        "n": ps.len(),
        "separation": sep,
        "covering_radius": scan.radius,
        "deepest": scan.deepest,
        "samples": scan.samples,
        "grid_half_diagonal": grid.half_diagonal(),
    });
    if let Some(sigma) = cfg.sigma {
        out["coverage"] = to_value(&geometry::is_covering(&ps, sigma, &region, &grid)?);
    }
    Ok(out)
}

struct DensitySetup {
    sep: f64,
    radii: Vec<f64>,
    region: Region,
    grid: GridSpec,
}

/// Resolves radii, centre region, centre step and padding. `extra_reach` is
/// added to the largest radius when checking that disks stay inside the
/// populated window (the disk radius for packings).
fn density_setup(cfg: &mut RunConfig, ps: &PointSet, extra_reach: f64) -> CliResult<DensitySetup> {
    let sep = geometry::min_separation(ps)?;
    let window = ps.populated_window().ok_or(circlefock::Error::EmptyPointSet)?;
    let region = match cfg.region {
        Some(r) => r,
        None => Region::square(window.center(), 2.0 * sep)?,
    };
    if !window.contains_region(&region) {
        return config_err(format!("centre region {region:?} leaves the populated window {window:?}"));
    }
    let step = *cfg.zeta_step.get_or_insert(sep / 4.0);
    let grid = GridSpec::new(step)?;
    grid.validate_for(&region)?;
    let margin = (region.xmin - window.xmin)
        .min(window.xmax - region.xmax)
        .min(region.ymin - window.ymin)
        .min(window.ymax - region.ymax);
    let radii = match &cfg.radii {
        Some(r) => r.clone(),
        None => {
            let base = density::default_radii(sep);
            let r_max = *base.last().unwrap();
            let room = cfg.pad.unwrap_or(margin) - extra_reach;
            let scale = (room / r_max).min(1.0);
            if scale * base[0] < 2.0 * sep {
                return Err(circlefock::Error::WindowTooSmall { r_max: 2.0 * sep * r_max / base[0] }.into());
            }
            base.iter().map(|r| r * scale).collect()
        }
    };
    let reach = radii.last().unwrap() + extra_reach;
    let pad = *cfg.pad.get_or_insert(reach);
    if pad < reach * (1.0 - 1e-12) {
        return config_err(format!("--pad {pad} is smaller than the largest radius reach {reach}"));
    }
    if !window.contains_region(&region.expand(pad)?) {
        return Err(circlefock::Error::WindowTooSmall { r_max: reach }.into());
    }
    cfg.region = Some(region);
    cfg.radii = Some(radii.clone());
    Ok(DensitySetup { sep, radii, region, grid })
}

fn run_density(cfg: &mut RunConfig) -> CliResult<Value> {
    let ps = load(cfg)?;
    let s = density_setup(cfg, &ps, 0.0)?;
    let profile = density::density_profile(&ps, &s.radii, &s.region, &s.grid)?;
    let upper = density::estimate_upper_density(&profile)?;
    let lower = density::estimate_lower_density(&profile)?;
    Ok(json!({
        "n": ps.len(),
        "separation": s.sep,
        "upper": upper,
        "lower": lower,
        "separation_bound": density::separation_density_bound(s.sep)?,
        "profile": profile,
    }))
}

fn run_packing(cfg: &mut RunConfig) -> CliResult<Value> {
    let ps = load(cfg)?;
    let sep = geometry::min_separation(&ps)?;
    let r0 = *cfg.r0.get_or_insert(sep / 2.0);
    let s = density_setup(cfg, &ps, r0)?;
    let pc = PackingConfig::new(ps, r0)?;
    let profile = density::packing_profile(&pc, &s.radii, &s.region, &s.grid)?;
    let estimate = density::estimate_upper_density(&profile)?;
    Ok(json!({
        "n": pc.centers.len(),
        "separation": s.sep,
        "r0": r0,
        "packing_density": estimate,
        "hexagonal_optimum": std::f64::consts::PI / 12f64.sqrt(),
        "profile": profile,
    }))
}

fn run_covering(cfg: &mut RunConfig) -> CliResult<Value> {
    let ps = load(cfg)?;
    let r0 = cfg.r0.unwrap();
    let s = density_setup(cfg, &ps, 0.0)?;
    let pc = PackingConfig::new(ps, r0)?;
    let profile = density::covering_profile(&pc, &s.radii, &s.region, &s.grid)?;
    let estimate = density::estimate_lower_density(&profile)?;
    Ok(json!({
        "n": pc.centers.len(),
        "separation": s.sep,
        "r0": r0,
        "covering_density": estimate,
        "hexagonal_optimum": 2.0 * std::f64::consts::PI / (3.0 * 3f64.sqrt()),
        "profile": profile,
    }))
}

fn run_certify_interp(cfg: &mut RunConfig) -> CliResult<Value> {
    let ps = load(cfg)?;
    let p = params(cfg)?;
    Ok(to_value(&certify::certify_interpolating_by_separation(&ps, &p)?))
}

fn run_certify_sampling(cfg: &mut RunConfig) -> CliResult<Value> {
    let ps = load(cfg)?;
    let p = params(cfg)?;
    let (_, region, grid) = scan_inputs(cfg, &ps)?;
    Ok(to_value(&certify::certify_sampling_by_covering(
        &ps,
        cfg.sigma.unwrap(),
        &region,
        &grid,
        &p,
    )?))
}

fn run_fock_gram(cfg: &mut RunConfig) -> CliResult<Value> {
    let ps = load(cfg)?;
    let p = params(cfg)?;
    let tol = *cfg.tol.get_or_insert(fock::DEFAULT_EIG_TOL);
    let g = fock::gram(p.alpha, &ps)?;
    let (lo, hi) = fock::eig_extremes(&g, tol)?;
    Ok(json!({
        "n": g.n(),
        "lambda_min": lo,
        "lambda_max": hi,
        "condition": fock::condition_number(lo, hi),
        "max_off_diagonal_row_sum": g.max_off_diagonal_row_sum(),
        "gershgorin_floor": fock::gershgorin_riesz_lower_bound(&g),
        "ill_posed": lo < fock::SINGULAR_LAMBDA,
    }))
}

/// Targets from `--targets`, else the unit impulse at the node nearest the
/// centre of the populated window.
fn load_targets(cfg: &RunConfig, ps: &PointSet) -> CliResult<(Vec<ComplexValue>, Value)> {
    match &cfg.targets {
        Some(path) => {
            let f = File::open(path).map_err(|source| CliError::Read {
                path: path.clone(),
                source,
            })?;
            let t: Vec<ComplexValue> = serde_json::from_reader(BufReader::new(f)).map_err(|source| CliError::Json {
                what: path.display().to_string(),
                source,
            })?;
            Ok((t, json!({ "file": path })))
        }
        None => {
            let centre = ps.populated_window().ok_or(circlefock::Error::EmptyPointSet)?.center();
            let (k, _) = ps.nearest(centre).ok_or(circlefock::Error::EmptyPointSet)?;
            let mut t = vec![ComplexValue::new(0.0, 0.0); ps.len()];
            t[k] = ComplexValue::new(1.0, 0.0);
            Ok((t, json!({ "impulse_at": k, "node": ps.points()[k] })))
        }
    }
}

fn run_fock_interp(cfg: &mut RunConfig) -> CliResult<Value> {
    let ps = load(cfg)?;
    let p = params(cfg)?;
    let (targets, described) = load_targets(cfg, &ps)?;
    let sol = fock::interpolate(p.alpha, &ps, &targets)?;
    Ok(json!({ "n": ps.len(), "targets": described, "solution": sol }))
}

const DEFAULT_SWEEP: [f64; 7] = [2.2, 2.0, 1.8, 1.6, 1.2, 0.8, 0.5];

fn run_fock_sweep(cfg: &mut RunConfig) -> CliResult<Value> {
    let p = params(cfg)?;
    let spacings = cfg.spacings.get_or_insert_with(|| DEFAULT_SWEEP.to_vec()).clone();
    let rings = *cfg.rings.get_or_insert(4);
    let rows = fock::conditioning_sweep(p.alpha, &spacings, rings)?;
    if let Some(path) = &cfg.output {
        match pio::Format::from_path(path)? {
            pio::Format::Csv => {
                let f = File::create(path).map_err(|source| CliError::Write {
                    path: path.clone(),
                    source,
                })?;
                fock::write_conditioning_csv(&rows, BufWriter::new(f))?;
            }
            pio::Format::Json => write_text(path, &serde_json::to_string_pretty(&rows).unwrap())?,
        }
    }
    Ok(json!({ "rings": rings, "points_per_patch": 3 * rings * (rings + 1) + 1, "rows": rows }))
}

fn run_thresholds(cfg: &mut RunConfig) -> CliResult<Value> {
    let p = params(cfg)?;
    Ok(json!({
        "tung": certify::tung_threshold(&p),
        "improved": certify::improved_interpolation_threshold(&p),
        "covering": certify::covering_sampling_threshold(&p),
        "critical": certify::critical_density(&p),
    }))
}

/// Six significant digits, `%g` style.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.5e}");
    let (m, e) = sci.split_once('e').unwrap();
    let exp: i32 = e.parse().unwrap();
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let m = if m.contains('.') { m.trim_end_matches('0').trim_end_matches('.') } else { m };
        format!("{m}e{exp}")
    }
}

/// Human-readable rendering of a report: one `key: value` line per scalar,
/// long arrays summarised by length.
pub fn render(report: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "command: {}", report.command.name());
    render_value(&mut out, "", &report.outputs);
    out
}

fn render_value(out: &mut String, prefix: &str, v: &Value) {
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                render_value(out, &key, v);
            }
        }
        Value::Array(items) if items.len() > 8 || items.iter().any(|i| i.is_object()) => {
            let _ = writeln!(out, "{prefix}: [{} entries]", items.len());
        }
        _ => {
            let _ = writeln!(out, "{prefix}: {}", scalar(v));
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Number(n) if n.is_f64() => sig6(n.as_f64().unwrap()),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        Value::Array(items) => format!("[{}]", items.iter().map(scalar).collect::<Vec<_>>().join(", ")),
        other => other.to_string(),
    }
}

#[cfg(test)]
#[allow(clippy::approx_constant)]
mod tests {
    use super::*;

    #[test]
    fn sig6_formats() {
        assert_eq!(sig6(2.0), "2");
        assert_eq!(sig6(1.9046265), "1.90463");
        assert_eq!(sig6(0.3183098861837907), "0.31831");
        assert_eq!(sig6(-0.000123456789), "-0.000123457");
        assert_eq!(sig6(1.5e-9), "1.5e-9");
        assert_eq!(sig6(123456.7), "123457");
        assert_eq!(sig6(2.5e12), "2.5e12");
        assert_eq!(sig6(0.0), "0");
    }

    #[test]
    fn missing_and_foreign_flags_are_rejected() {
        let err = RunConfig::new(Command::Lattice).validate().unwrap_err();
        assert!(err.to_string().contains("--kind, --spacing, --window"), "{err}");
        assert_eq!(err.exit_code(), 2);

        let mut c = RunConfig::new(Command::Thresholds);
        c.alpha = Some(1.0);
        c.seed = Some(3);
        assert!(c.validate().unwrap_err().to_string().contains("does not take --seed"));

        let mut c = RunConfig::new(Command::Lattice);
        (c.kind, c.spacing, c.window, c.perturb) = (Some(Kind::Hex), Some(1.0), Some(10.0), Some(0.1));
        assert!(c.validate().unwrap_err().to_string().contains("--perturb requires --seed"));
    }

    #[test]
    fn value_checks() {
        let mut c = RunConfig::new(Command::Thresholds);
        c.alpha = Some(-1.0);
        assert!(c.validate().is_err());
        let mut c = RunConfig::new(Command::FockSweep);
        c.alpha = Some(1.0);
        c.p = Some(Exponent::new(1.0).unwrap());
        assert!(c.validate().unwrap_err().to_string().contains("p = 2"));
        let mut c = RunConfig::new(Command::Density);
        c.input = Some("x.csv".into());
        c.radii = Some(vec![3.0, 2.0]);
        assert!(c.validate().is_err());
    }

    #[test]
    fn thresholds_at_unit_alpha() {
        let mut c = RunConfig::new(Command::Thresholds);
        c.alpha = Some(1.0);
        let r = run(&c).unwrap();
        let get = |k: &str| r.outputs[k].as_f64().unwrap();
        assert_eq!(get("tung"), 2.0);
        assert!((get("improved") - 1.904626).abs() < 5e-7);
        assert!((get("covering") - 1.099636).abs() < 5e-7);
        assert!((get("critical") - 0.318310).abs() < 5e-7);
        assert_eq!(r.config.p, Some(Exponent::new(2.0).unwrap()));
        let text = render(&r);
        assert!(text.contains("improved: 1.90463") && text.contains("tung: 2\n"), "{text}");
    }

    #[test]
    fn config_round_trips_through_json() {
        let mut c = RunConfig::new(Command::Density);
        c.input = Some("pts.csv".into());
        c.radii = Some(vec![1.0, 2.0]);
        c.region = Some(Region::new(0.0, 1.0, 0.0, 1.0).unwrap());
        c.p = Some(Exponent::INFINITY);
        let s = serde_json::to_string(&c).unwrap();
        assert!(!s.contains("alpha"));
        assert_eq!(serde_json::from_str::<RunConfig>(&s).unwrap(), c);
        assert!(serde_json::from_str::<RunConfig>(r#"{"command":"density","bogus":1}"#).is_err());
    }

    #[test]
    fn computational_errors_exit_with_three() {
        let e = CliError::Core(circlefock::Error::IllPosed { lambda_min: 1e-14 });
        assert_eq!(e.exit_code(), 3);
        assert_eq!(CliError::Core(circlefock::Error::EmptyPointSet).exit_code(), 2);
    }
}
