//! Batch front end: `hencky <command> --config <file> --out <dir> [--seed N]`.
//!
//! The config is a TOML document. Top-level keys:
//!
//! ```toml
//! model = { type = "ti_hencky", mu_t = 2.5, lambda = 5.5, alpha = 0.0, beta = 0.0, mu_l = 28.625 }
//! fibers = [{ direction = [0.0, 0.0, 1.0] }]   # or { angle_deg = 30.0, plane = "xy" }
//! [identify]  # kind = "ti" | "ortho", matrix = 6×6 rows
//! [drive]     # test, range, steps, beta_deg, ratio, normalize
//! [sphere]    # eigenvalues, family, i, n_theta, n_phi
//! [fdcheck]   # samples, scale, seed, tolerance
//! [fit]       # iso, fiber, beta_deg, datasets, free, fixed, beta_max, optimizer
//! ```
//!
//! Angles are in degrees and moduli in kPa. Unknown keys are rejected.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::Deserialize;

use crate::calibration::{self, Direction, FitConfig, FreeParam, OptimizerOptions, Param};
use crate::energy::MaterialModel;
use crate::error::{Error, Result};
use crate::kinematics::{InvariantFamily, StructuralTensor};
use crate::lab::{self, Curve, TwoFiberSetup, DEFAULT_SPHERE_EIGENVALUES};
use crate::stress::{is_positive_definite, ortho_identify, reference_tangent_voigt, ti_identify};
use crate::tensor::Tensor4V;
use crate::verify;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Reference tangent of `model` in Voigt form.
    Tangent,
    /// Transversely isotropic or orthotropic constants of a 6×6 matrix.
    Identify,
    /// Homogeneous-deformation sweep.
    Drive,
    /// Mixed invariant over fiber directions.
    Sphere,
    /// Finite-difference check of stress and tangent at random states.
    Fdcheck,
    /// Parameter fit to uniaxial data.
    Fit,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Tangent => "tangent",
            Command::Identify => "identify",
            Command::Drive => "drive",
            Command::Sphere => "sphere",
            Command::Fdcheck => "fdcheck",
            Command::Fit => "fit",
        }
    }
}

/// Constitutive-model lab in logarithmic strain space.
///
/// Angles are in degrees, moduli in kPa. Exit codes: 0 success, 2 config or
/// I/O error, 3 numerical failure, 4 fit non-convergence.
#[derive(Debug, Parser)]
#[command(name = "hencky", version)]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    /// TOML run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the seed of `fdcheck` and `fit`.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: Option<MaterialModel>,
    #[serde(default)]
    pub fibers: Vec<StructuralTensor>,
    pub identify: Option<IdentifyConfig>,
    pub drive: Option<DriveConfig>,
    pub sphere: Option<SphereConfig>,
    pub fdcheck: Option<FdcheckConfig>,
    pub fit: Option<FitRunConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Symmetry {
    Ti,
    Ortho,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentifyConfig {
    pub kind: Symmetry,
    /// Voigt rows in the order 11, 22, 33, 12, 23, 13. Defaults to the
    /// reference tangent of `model`.
    pub matrix: Option<[[f64; 6]; 6]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DriveTest {
    Uniaxial,
    Shear,
    Biaxial,
    BiaxialTc,
}

impl DriveTest {
    fn as_str(self) -> &'static str {
        match self {
            DriveTest::Uniaxial => "uniaxial",
            DriveTest::Shear => "shear",
            DriveTest::Biaxial => "biaxial",
            DriveTest::BiaxialTc => "biaxial-tc",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveConfig {
    pub test: DriveTest,
    /// Control range; unused by `biaxial`.
    #[serde(default)]
    pub range: Option<[f64; 2]>,
    pub steps: usize,
    /// Fiber angle of the two-fiber tests.
    #[serde(default)]
    pub beta_deg: Option<f64>,
    /// Final stretches of `biaxial`.
    #[serde(default)]
    pub ratio: Option<[f64; 2]>,
    #[serde(default)]
    pub normalize: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SphereConfig {
    #[serde(default = "default_eigenvalues")]
    pub eigenvalues: [f64; 3],
    pub family: InvariantFamily,
    #[serde(default = "one")]
    pub i: u32,
    #[serde(default = "default_grid")]
    pub n_theta: usize,
    #[serde(default = "default_grid")]
    pub n_phi: usize,
}

fn default_eigenvalues() -> [f64; 3] {
    DEFAULT_SPHERE_EIGENVALUES
}

fn one() -> u32 {
    1
}

fn default_grid() -> usize {
    90
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FdcheckConfig {
    pub samples: usize,
    /// Half-width of the random log-strain components.
    pub scale: f64,
    pub seed: u64,
    pub tolerance: f64,
}

impl Default for FdcheckConfig {
    fn default() -> Self {
        Self {
            samples: 20,
            scale: 0.3,
            seed: 0,
            tolerance: 1e-5,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetRef {
    /// Relative paths are resolved against the config file's directory.
    pub path: PathBuf,
    pub direction: Direction,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitRunConfig {
    pub iso: MaterialModel,
    pub fiber: MaterialModel,
    pub beta_deg: f64,
    pub datasets: Vec<DatasetRef>,
    pub free: Vec<FreeParam>,
    #[serde(default)]
    pub fixed: BTreeMap<Param, f64>,
    #[serde(default = "default_beta_max")]
    pub beta_max: f64,
    #[serde(default)]
    pub optimizer: OptimizerOptions,
    /// Replace a fixed `mu` by the estimate from the first measured points.
    #[serde(default)]
    pub estimate_mu: bool,
}

fn default_beta_max() -> f64 {
    75.0
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    fn model(&self) -> Result<&MaterialModel> {
        let m = self.model.as_ref().ok_or_else(|| missing("model"))?;
        m.validate()?;
        Ok(m)
    }
}

fn missing(key: &str) -> Error {
    Error::Config(format!("missing `{key}`"))
}

/// Everything the front end prints: a header with the seed, then the summary.
#[derive(Debug)]
pub struct Outcome {
    pub summary: String,
    pub files: Vec<PathBuf>,
    /// Set by `fit` when the best start did not converge; the files are
    /// still written.
    pub warning: Option<Error>,
}

/// Runs one command with the config read from `args.config`.
pub fn run(args: &Args) -> Result<Outcome> {
    let cfg = RunConfig::load(&args.config)?;
    let base = args.config.parent().map(Path::to_path_buf).unwrap_or_default();
    run_config(args.command, &cfg, &base, &args.out, args.seed)
}

/// Runs one command. `base` resolves relative dataset paths.
pub fn run_config(command: Command, cfg: &RunConfig, base: &Path, out: &Path, seed: Option<u64>) -> Result<Outcome> {
    fs::create_dir_all(out)?;
    let mut o = Outcome {
        summary: String::new(),
        files: Vec::new(),
        warning: None,
    };
    let _ = writeln!(o.summary, "# hencky {}", command.as_str());
    match command {
        Command::Tangent => tangent(cfg, out, &mut o)?,
        Command::Identify => identify(cfg, out, &mut o)?,
        Command::Drive => drive(cfg, out, &mut o)?,
        Command::Sphere => sphere(cfg, out, &mut o)?,
        Command::Fdcheck => fdcheck(cfg, out, seed, &mut o)?,
        Command::Fit => fit(cfg, base, out, seed, &mut o)?,
    }
    Ok(o)
}

fn write(o: &mut Outcome, path: PathBuf, contents: &[u8]) -> Result<()> {
    fs::write(&path, contents)?;
    o.files.push(path);
    Ok(())
}

fn matrix_text(t: &Tensor4V) -> String {
    let mut s = String::new();
    for a in 0..6 {
        let row: Vec<String> = (0..6).map(|b| format!("{:>14.6}", t.get(a, b))).collect();
        let _ = writeln!(s, "{}", row.join(""));
    }
    s
}

fn matrix_csv(t: &Tensor4V) -> String {
    let mut s = String::from("row,c11,c22,c33,c12,c23,c13\n");
    for (a, name) in ["11", "22", "33", "12", "23", "13"].iter().enumerate() {
        let row: Vec<String> = (0..6).map(|b| format!("{:e}", t.get(a, b))).collect();
        let _ = writeln!(s, "{name},{}", row.join(","));
    }
    s
}

fn tangent(cfg: &RunConfig, out: &Path, o: &mut Outcome) -> Result<()> {
    let model = cfg.model()?;
    let t = reference_tangent_voigt(model, &cfg.fibers)?;
    let _ = writeln!(o.summary, "model = {}", model.name());
    let _ = write!(o.summary, "{}", matrix_text(&t));
    let _ = writeln!(o.summary, "positive_definite = {}", is_positive_definite(&t));
    if model.polyconvexity_warning() {
        let _ = writeln!(o.summary, "note = exponents below the polyconvexity bounds k > 1/3, k_hat > 1/8");
    }
    write(o, out.join("tangent.csv"), matrix_csv(&t).as_bytes())
}

fn identify(cfg: &RunConfig, out: &Path, o: &mut Outcome) -> Result<()> {
    let id = cfg.identify.as_ref().ok_or_else(|| missing("identify"))?;
    let t = match id.matrix {
        Some(rows) => Tensor4V::from_rows(rows),
        None => reference_tangent_voigt(cfg.model()?, &cfg.fibers)?,
    };
    let mut text = String::new();
    match id.kind {
        Symmetry::Ti => {
            let c = ti_identify(&t)?;
            for (k, v) in [("mu_l", c.mu_l), ("mu_t", c.mu_t), ("lambda", c.lambda), ("alpha", c.alpha), ("beta", c.beta)] {
                let _ = writeln!(text, "{k} = {v}");
            }
        }
        Symmetry::Ortho => {
            let c = ortho_identify(&t)?;
            for (k, v) in [
                ("mu", c.mu),
                ("mu1", c.mu1),
                ("mu2", c.mu2),
                ("lambda", c.lambda),
                ("alpha1", c.alpha1),
                ("alpha2", c.alpha2),
                ("beta1", c.beta1),
                ("beta2", c.beta2),
                ("beta3", c.beta3),
            ] {
                let _ = writeln!(text, "{k} = {v}");
            }
        }
    }
    o.summary.push_str(&text);
    write(o, out.join("identify.toml"), text.as_bytes())
}

fn range(d: &DriveConfig) -> Result<(f64, f64)> {
    d.range
        .map(|[a, b]| (a, b))
        .ok_or_else(|| missing("drive.range"))
}

fn drive(cfg: &RunConfig, out: &Path, o: &mut Outcome) -> Result<()> {
    let d = cfg.drive.as_ref().ok_or_else(|| missing("drive"))?;
    let model = cfg.model()?;
    let beta = || d.beta_deg.ok_or_else(|| missing("drive.beta_deg"));
    let mut curve: Curve = match d.test {
        DriveTest::Uniaxial => lab::drive_uniaxial(model, &cfg.fibers, range(d)?, d.steps)?,
        DriveTest::Shear => lab::drive_simple_shear(model, &cfg.fibers, range(d)?, d.steps)?,
        DriveTest::Biaxial => {
            let [r1, r2] = d.ratio.ok_or_else(|| missing("drive.ratio"))?;
            lab::drive_biaxial(model, beta()?, (r1, r2), d.steps)?
        }
        DriveTest::BiaxialTc => lab::drive_biaxial_tc(model, beta()?, range(d)?, d.steps)?,
    };
    if d.normalize {
        curve.normalize();
    }
    let name = d.test.as_str();
    let mut buf = Vec::new();
    curve.write_csv(&mut buf)?;
    write(o, out.join(format!("drive_{name}.csv")), &buf)?;
    let mut skipped = String::from("control,reason\n");
    for s in &curve.skipped {
        let _ = writeln!(skipped, "{},\"{}\"", s.control, s.reason.replace('"', "'"));
    }
    write(o, out.join(format!("drive_{name}_skipped.csv")), skipped.as_bytes())?;
    let _ = writeln!(o.summary, "test = {name}");
    let _ = writeln!(o.summary, "points = {}", curve.points.len());
    let _ = writeln!(o.summary, "skipped = {}", curve.skipped.len());
    let ratios: Vec<f64> = curve.points.iter().filter_map(|p| p.sigma_ratio).collect();
    if let (Some(lo), Some(hi)) = (
        ratios.iter().copied().reduce(f64::min),
        ratios.iter().copied().reduce(f64::max),
    ) {
        let _ = writeln!(o.summary, "sig_ratio = [{lo:.12}, {hi:.12}]");
    }
    Ok(())
}

fn sphere(cfg: &RunConfig, out: &Path, o: &mut Outcome) -> Result<()> {
    let s = cfg.sphere.as_ref().ok_or_else(|| missing("sphere"))?;
    let grid = lab::sphere_map(s.eigenvalues, s.family, s.i, s.n_theta, s.n_phi)?;
    let fam = match s.family {
        InvariantFamily::C => "C",
        InvariantFamily::H => "H",
    };
    let mut buf = Vec::new();
    grid.write_csv(&mut buf)?;
    write(o, out.join(format!("sphere_{fam}{}.csv", s.i)), &buf)?;
    let values = grid.values.iter().flatten();
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
    let count = |sign: i8| grid.signs.iter().flatten().filter(|&&x| x == sign).count();
    let zone = lab::transition_zone(s.eigenvalues, s.n_theta, s.n_phi)?;
    let _ = writeln!(o.summary, "invariant = {fam}{}", s.i);
    let _ = writeln!(o.summary, "range = [{lo:.9}, {hi:.9}]");
    let _ = writeln!(o.summary, "positive = {}, zero = {}, negative = {}", count(1), count(0), count(-1));
    let _ = writeln!(o.summary, "transition_zone_directions = {}", zone.len());
    Ok(())
}

fn fdcheck(cfg: &RunConfig, out: &Path, seed: Option<u64>, o: &mut Outcome) -> Result<()> {
    let f = cfg.fdcheck.clone().unwrap_or_default();
    let seed = seed.unwrap_or(f.seed);
    let model = cfg.model()?;
    let report = verify::fd_check_suite(model, &cfg.fibers, f.samples, f.scale, seed)?;
    let mut buf = Vec::new();
    report.write_csv(&mut buf)?;
    write(o, out.join("fdcheck.csv"), &buf)?;
    let (es, et) = (report.max_stress_error(), report.max_tangent_error());
    let _ = writeln!(o.summary, "seed = {seed}");
    let _ = writeln!(o.summary, "model = {}", model.name());
    let _ = writeln!(o.summary, "checked = {} of {}", report.checked(), f.samples);
    let _ = writeln!(o.summary, "max_stress_error = {es:e}");
    let _ = writeln!(o.summary, "max_tangent_error = {et:e}");
    if es > f.tolerance || et > f.tolerance || !(es.is_finite() && et.is_finite()) {
        return Err(Error::Verification(format!(
            "max errors {es:e} (stress), {et:e} (tangent) exceed {:e}",
            f.tolerance
        )));
    }
    Ok(())
}

fn fit(cfg: &RunConfig, base: &Path, out: &Path, seed: Option<u64>, o: &mut Outcome) -> Result<()> {
    let f = cfg.fit.as_ref().ok_or_else(|| missing("fit"))?;
    let datasets = f
        .datasets
        .iter()
        .map(|d| calibration::load_dataset(&base.join(&d.path), d.direction))
        .collect::<Result<Vec<_>>>()?;
    let template = TwoFiberSetup {
        iso: f.iso.clone(),
        fiber: f.fiber.clone(),
        beta_deg: f.beta_deg,
    };
    let mut fixed = f.fixed.clone();
    if f.estimate_mu {
        let mu = calibration::estimate_mu(&datasets)?;
        let _ = writeln!(o.summary, "estimated mu = {mu}");
        fixed.insert(Param::Mu, mu);
    }
    let mut optimizer = f.optimizer;
    if let Some(s) = seed {
        optimizer.seed = s;
    }
    let config = FitConfig {
        free: f.free.clone(),
        fixed,
        beta_max: f.beta_max,
        optimizer,
    };
    let r = calibration::fit(&template, &datasets, &config)?;
    r.write(out)?;
    o.files.extend(["fit_report.txt", "fit_trace.csv", "fit_residuals.csv"].map(|n| out.join(n)));
    o.summary.push_str(&r.report());
    o.warning = r.require_converged().err();
    Ok(())
}

/// Entry point of the binary; returns the process exit code.
pub fn main_with(args: Args) -> i32 {
    match run(&args) {
        Ok(o) => {
            print!("{}", o.summary);
            for f in &o.files {
                println!("wrote {}", f.display());
            }
            match o.warning {
                Some(e) => {
                    eprintln!("error[{}]: {e}", e.category().as_str());
                    e.category().exit_code()
                }
                None => 0,
            }
        }
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category().as_str());
            e.category().exit_code()
        }
    }
}
