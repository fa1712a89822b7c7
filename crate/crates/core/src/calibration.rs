//! Fitting two-fiber composites to uniaxial stress–stretch measurements.
//!
//! The objective sums, over experiments, the RMS of the stress residuals
//! normalized by each experiment's largest measured stress. Simulated
//! stresses come from [`uniaxial_two_fiber`]; a point where the lateral
//! Newton solve fails contributes a residual of [`PENALTY_RESIDUAL`].

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energy::MaterialModel;
use crate::error::{Error, Result};
use crate::lab::{uniaxial_two_fiber, LoadDirection, NewtonOptions, TwoFiberSetup};

/// Residual assigned to a measurement point whose simulation failed.
pub const PENALTY_RESIDUAL: f64 = 10.0;

/// Largest admissible first stretch of a dataset.
pub const MAX_FIRST_STRETCH: f64 = 1.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Circumferential,
    Axial,
}

impl From<Direction> for LoadDirection {
    fn from(d: Direction) -> Self {
        match d {
            Direction::Circumferential => LoadDirection::Circumferential,
            Direction::Axial => LoadDirection::Axial,
        }
    }
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Circumferential => "circumferential",
            Direction::Axial => "axial",
        }
    }
}

/// One uniaxial experiment: stretches and Cauchy stresses in kPa.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentDataset {
    pub label: String,
    pub direction: Direction,
    pub stretch: Vec<f64>,
    pub stress: Vec<f64>,
}

#[derive(Debug, Deserialize, Serialize)]
struct Row {
    stretch: f64,
    stress_kpa: f64,
}

impl ExperimentDataset {
    /// Validated dataset. Row numbers in errors count data rows from 1.
    pub fn new(label: impl Into<String>, direction: Direction, stretch: Vec<f64>, stress: Vec<f64>) -> Result<Self> {
        let d = Self {
            label: label.into(),
            direction,
            stretch,
            stress,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn len(&self) -> usize {
        self.stretch.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stretch.is_empty()
    }

    pub fn max_stress(&self) -> f64 {
        self.stress.iter().fold(0.0, |m, s| m.max(*s))
    }

    pub fn validate(&self) -> Result<()> {
        let err = |row: usize, message: String| Error::Validation {
            label: self.label.clone(),
            row,
            message,
        };
        if self.stretch.len() != self.stress.len() {
            return Err(err(0, "stretch and stress columns differ in length".into()));
        }
        if self.len() < 3 {
            return Err(err(0, format!("{} points, at least 3 required", self.len())));
        }
        for (k, (&l, &s)) in self.stretch.iter().zip(&self.stress).enumerate() {
            if !l.is_finite() || !s.is_finite() {
                return Err(err(k + 1, "non-finite value".into()));
            }
            if s < 0.0 {
                return Err(err(k + 1, format!("negative stress {s}")));
            }
            if k > 0 && l <= self.stretch[k - 1] {
                return Err(err(k + 1, format!("stretch {l} does not increase")));
            }
        }
        let first = self.stretch[0];
        if !(1.0..=MAX_FIRST_STRETCH).contains(&first) {
            return Err(err(1, format!("first stretch {first} outside [1, {MAX_FIRST_STRETCH}]")));
        }
        if self.max_stress() <= 0.0 {
            return Err(err(0, "all stresses are zero".into()));
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for (&stretch, &stress_kpa) in self.stretch.iter().zip(&self.stress) {
            w.serialize(Row { stretch, stress_kpa })?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Reads a `stretch,stress_kpa` CSV. The label is the file stem.
pub fn load_dataset(path: &Path, direction: Direction) -> Result<ExperimentDataset> {
    let parse = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let header = r.headers()?.clone();
    if header.len() != 2 || &header[0] != "stretch" || &header[1] != "stress_kpa" {
        return Err(parse(1, format!("expected header `stretch,stress_kpa`, found `{}`", header.iter().collect::<Vec<_>>().join(","))));
    }
    let (mut stretch, mut stress) = (Vec::new(), Vec::new());
    for rec in r.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse(line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let row: Row = rec.deserialize(Some(&header)).map_err(|e| parse(line, e.to_string()))?;
        stretch.push(row.stretch);
        stress.push(row.stress_kpa);
    }
    let label = path.file_stem().map_or_else(|| "dataset".into(), |s| s.to_string_lossy().into_owned());
    ExperimentDataset::new(label, direction, stretch, stress)
}

/// Simulated response and residuals of one experiment.
#[derive(Debug, Clone)]
pub struct DatasetResidual {
    pub label: String,
    pub direction: Direction,
    pub stretch: Vec<f64>,
    pub measured: Vec<f64>,
    /// `None` where the simulation failed.
    pub simulated: Vec<Option<f64>>,
    pub residuals: Vec<f64>,
    pub rms: f64,
}

#[derive(Debug, Clone)]
pub struct ObjectiveReport {
    pub f_obj: f64,
    pub datasets: Vec<DatasetResidual>,
    /// Points that received the penalty residual.
    pub failed_points: usize,
}

/// Objective with its per-experiment breakdown.
pub fn objective_report(setup: &TwoFiberSetup, datasets: &[ExperimentDataset]) -> ObjectiveReport {
    let mut failed_points = 0;
    let datasets: Vec<_> = datasets
        .iter()
        .map(|d| {
            let model = setup.composite(d.direction.into());
            let scale = d.max_stress();
            let sim = uniaxial_two_fiber(&model, &d.stretch, NewtonOptions::default());
            let simulated: Vec<Option<f64>> = sim.into_iter().map(|r| r.ok().map(|p| p.sigma11)).collect();
            let residuals: Vec<f64> = simulated
                .iter()
                .zip(&d.stress)
                .map(|(s, m)| match s {
                    Some(s) if s.is_finite() => (m - s) / scale,
                    _ => PENALTY_RESIDUAL,
                })
                .collect();
            failed_points += simulated.iter().filter(|s| !s.is_some_and(f64::is_finite)).count();
            let rms = (residuals.iter().map(|r| r * r).sum::<f64>() / residuals.len() as f64).sqrt();
            DatasetResidual {
                label: d.label.clone(),
                direction: d.direction,
                stretch: d.stretch.clone(),
                measured: d.stress.clone(),
                simulated,
                residuals,
                rms,
            }
        })
        .collect();
    ObjectiveReport {
        f_obj: datasets.iter().map(|d| d.rms).sum(),
        datasets,
        failed_points,
    }
}

pub fn objective(setup: &TwoFiberSetup, datasets: &[ExperimentDataset]) -> f64 {
    objective_report(setup, datasets).f_obj
}

/// Shear modulus from the first measured point of each experiment, using the
/// incompressible small-strain relation `σ = 3μ log λ`. Returns the mean.
pub fn estimate_mu(datasets: &[ExperimentDataset]) -> Result<f64> {
    if datasets.is_empty() {
        return Err(Error::IllConditioned("no datasets".into()));
    }
    let mut sum = 0.0;
    for d in datasets {
        let (l, s) = match (d.stretch.first(), d.stress.first()) {
            (Some(l), Some(s)) => (*l, *s),
            _ => return Err(Error::IllConditioned(format!("dataset {} is empty", d.label))),
        };
        if l - 1.0 < 1e-4 {
            return Err(Error::IllConditioned(format!(
                "dataset {}: first stretch {l} is too close to 1",
                d.label
            )));
        }
        sum += s / (3.0 * l.ln());
    }
    Ok(sum / datasets.len() as f64)
}

/// Parameters of a two-fiber composite that a fit can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Param {
    Mu,
    Kappa,
    K,
    KHat,
    Mu1,
    K1,
    Beta,
}

impl Param {
    pub const ALL: [Param; 7] = [Param::Mu, Param::Kappa, Param::K, Param::KHat, Param::Mu1, Param::K1, Param::Beta];

    pub fn as_str(self) -> &'static str {
        match self {
            Param::Mu => "mu",
            Param::Kappa => "kappa",
            Param::K => "k",
            Param::KHat => "k_hat",
            Param::Mu1 => "mu1",
            Param::K1 => "k1",
            Param::Beta => "beta",
        }
    }

    fn slot(self, setup: &mut TwoFiberSetup) -> Option<&mut f64> {
        use MaterialModel as M;
        match (self, &mut setup.iso, &mut setup.fiber) {
            (Param::Beta, _, _) => Some(&mut setup.beta_deg),
            (Param::Mu, M::IsoHencky { mu, .. } | M::IsoExpHencky { mu, .. }, _) => Some(mu),
            (Param::Kappa, M::IsoHencky { kappa, .. } | M::IsoExpHencky { kappa, .. }, _) => Some(kappa),
            (Param::K, M::IsoExpHencky { k, .. }, _) => Some(k),
            (Param::KHat, M::IsoExpHencky { k_hat, .. }, _) => Some(k_hat),
            (Param::Mu1, _, M::FiberC { mu1, .. } | M::FiberH { mu1, .. } | M::FiberHgo { mu1, .. } | M::FiberPolyC { mu1, .. }) => {
                Some(mu1)
            }
            (Param::K1, _, M::FiberC { k1, .. } | M::FiberH { k1, .. } | M::FiberHgo { k1, .. }) => Some(k1),
            _ => None,
        }
    }

    pub fn get(self, setup: &TwoFiberSetup) -> Option<f64> {
        let mut s = setup.clone();
        self.slot(&mut s).map(|v| *v)
    }

    pub fn set(self, setup: &mut TwoFiberSetup, value: f64) -> Result<()> {
        let name = self.as_str();
        let slot = self
            .slot(setup)
            .ok_or_else(|| Error::Config(format!("parameter `{name}` does not exist in this model")))?;
        *slot = value;
        Ok(())
    }
}

/// A parameter varied by the fit within `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreeParam {
    pub name: Param,
    pub lower: f64,
    pub upper: f64,
    /// First start of the multi-start; defaults to the template's value.
    #[serde(default)]
    pub start: Option<f64>,
    /// Search in `log(value)`; needs `lower > 0`.
    #[serde(default)]
    pub log_scale: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerOptions {
    pub max_iter: usize,
    /// Central-difference step relative to `max(1, |value|)`.
    pub fd_step: f64,
    pub grad_tol: f64,
    pub step_tol: f64,
    pub starts: usize,
    pub seed: u64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            max_iter: 200,
            fd_step: 1e-6,
            grad_tol: 1e-8,
            step_tol: 1e-10,
            starts: 8,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    pub free: Vec<FreeParam>,
    #[serde(default)]
    pub fixed: BTreeMap<Param, f64>,
    /// Upper bound on `β_f` in degrees, applied on top of its box.
    #[serde(default = "default_beta_max")]
    pub beta_max: f64,
    #[serde(default)]
    pub optimizer: OptimizerOptions,
}

fn default_beta_max() -> f64 {
    75.0
}

impl FitConfig {
    pub fn validate(&self, template: &TwoFiberSetup) -> Result<()> {
        if self.free.is_empty() {
            return Err(Error::Config("no free parameters".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for p in &self.free {
            let name = p.name.as_str();
            if !seen.insert(p.name) || self.fixed.contains_key(&p.name) {
                return Err(Error::Config(format!("parameter `{name}` listed twice")));
            }
            if !(p.lower.is_finite() && p.upper.is_finite() && p.lower < p.upper) {
                return Err(Error::Config(format!("`{name}`: need finite bounds with lower < upper")));
            }
            if p.log_scale && p.lower <= 0.0 {
                return Err(Error::Config(format!("`{name}`: log scale needs a positive lower bound")));
            }
            if p.name.get(template).is_none() {
                return Err(Error::Config(format!("parameter `{name}` does not exist in this model")));
            }
            if p.name == Param::Beta && self.beta_max <= p.lower {
                return Err(Error::Config(format!("beta_max {} is below the lower bound of beta", self.beta_max)));
            }
        }
        for (name, v) in &self.fixed {
            if name.get(template).is_none() || !v.is_finite() {
                return Err(Error::Config(format!("fixed parameter `{}` is invalid", name.as_str())));
            }
        }
        let o = &self.optimizer;
        if o.starts == 0 || !(o.fd_step > 0.0) {
            return Err(Error::Config("optimizer needs at least one start and a positive FD step".into()));
        }
        Ok(())
    }

    fn upper(&self, p: &FreeParam) -> f64 {
        if p.name == Param::Beta {
            p.upper.min(self.beta_max)
        } else {
            p.upper
        }
    }
}

/// Why an optimizer run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Gradient,
    Step,
    IterationCap,
    /// The line search found no decrease while the gradient was not small.
    NoProgress,
}

impl Termination {
    pub fn converged(self) -> bool {
        matches!(self, Termination::Gradient | Termination::Step)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Termination::Gradient => "gradient",
            Termination::Step => "step",
            Termination::IterationCap => "iteration-cap",
            Termination::NoProgress => "no-progress",
        }
    }
}

#[derive(Debug, Clone)]
pub struct StartSummary {
    pub start: Vec<f64>,
    pub f_obj: f64,
    pub iterations: usize,
    pub termination: Termination,
}

#[derive(Debug, Clone)]
pub struct FitResult {
    /// Every parameter of the fitted model, free and fixed.
    pub parameters: BTreeMap<Param, f64>,
    pub setup: TwoFiberSetup,
    pub f_obj: f64,
    pub residuals: ObjectiveReport,
    /// Objective after each accepted iteration of the winning start.
    pub trace: Vec<f64>,
    pub termination: Termination,
    pub starts: Vec<StartSummary>,
    pub seed: u64,
}

impl FitResult {
    /// `Err(NoProgress)` unless the winning start converged.
    pub fn require_converged(&self) -> Result<()> {
        if self.termination.converged() {
            Ok(())
        } else {
            Err(Error::NoProgress(format!(
                "best start stopped on {} at f_obj = {:e}",
                self.termination.as_str(),
                self.f_obj
            )))
        }
    }
}

/// Box coordinates in `[0, 1]`, optionally logarithmic.
struct Scaling {
    lo: Vec<f64>,
    hi: Vec<f64>,
    log: Vec<bool>,
}

impl Scaling {
    fn to_param(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .enumerate()
            .map(|(j, &t)| {
                // the bounds themselves are returned exactly
                if t <= 0.0 {
                    self.lo[j]
                } else if t >= 1.0 {
                    self.hi[j]
                } else if self.log[j] {
                    (self.lo[j].ln() + t * (self.hi[j] / self.lo[j]).ln()).exp()
                } else {
                    self.lo[j] + t * (self.hi[j] - self.lo[j])
                }
            })
            .collect()
    }

    fn to_unit(&self, p: &[f64]) -> Vec<f64> {
        p.iter()
            .enumerate()
            .map(|(j, &v)| {
                let t = if self.log[j] {
                    (v / self.lo[j]).ln() / (self.hi[j] / self.lo[j]).ln()
                } else {
                    (v - self.lo[j]) / (self.hi[j] - self.lo[j])
                };
                t.clamp(0.0, 1.0)
            })
            .collect()
    }

    /// `dp/dt` at `p`.
    fn jacobian(&self, j: usize, p: f64) -> f64 {
        if self.log[j] {
            p * (self.hi[j] / self.lo[j]).ln()
        } else {
            self.hi[j] - self.lo[j]
        }
    }
}

struct Problem<'a> {
    template: TwoFiberSetup,
    free: Vec<Param>,
    scaling: Scaling,
    datasets: &'a [ExperimentDataset],
    opts: OptimizerOptions,
}

impl Problem<'_> {
    fn setup(&self, p: &[f64]) -> TwoFiberSetup {
        let mut s = self.template.clone();
        for (name, v) in self.free.iter().zip(p) {
            name.set(&mut s, *v).expect("validated parameter");
        }
        s
    }

    fn f(&self, p: &[f64]) -> f64 {
        objective(&self.setup(p), self.datasets)
    }

    /// Gradient with respect to the unit coordinates. Steps that would leave
    /// the box become one-sided.
    fn gradient(&self, p: &[f64]) -> Vec<f64> {
        (0..p.len())
            .into_par_iter()
            .map(|j| {
                let h = self.opts.fd_step * p[j].abs().max(1.0);
                let (lo, hi) = (self.scaling.lo[j], self.scaling.hi[j]);
                let (a, b) = ((p[j] - h).max(lo), (p[j] + h).min(hi));
                let eval = |v: f64| {
                    let mut q = p.to_vec();
                    q[j] = v;
                    self.f(&q)
                };
                let d = (eval(b) - eval(a)) / (b - a);
                d * self.scaling.jacobian(j, p[j])
            })
            .collect()
    }

    /// Projected BFGS from `x0` in unit coordinates.
    fn run(&self, x0: Vec<f64>) -> (Vec<f64>, f64, Vec<f64>, usize, Termination) {
        let n = x0.len();
        let mut x = x0;
        let mut p = self.scaling.to_param(&x);
        let mut f = self.f(&p);
        let mut g = self.gradient(&p);
        let mut hinv = identity(n);
        let mut trace = vec![f];
        let mut reset = true;
        for it in 0..self.opts.max_iter {
            // variables held at a bound by the gradient
            let active: Vec<bool> = (0..n)
                .map(|j| (x[j] <= 0.0 && g[j] > 0.0) || (x[j] >= 1.0 && g[j] < 0.0))
                .collect();
            let pg_norm = (0..n).filter(|&j| !active[j]).map(|j| g[j] * g[j]).sum::<f64>().sqrt();
            if pg_norm <= self.opts.grad_tol {
                return (p, f, trace, it, Termination::Gradient);
            }
            let mut d = vec![0.0; n];
            for r in 0..n {
                if active[r] {
                    continue;
                }
                d[r] = -(0..n).filter(|&c| !active[c]).map(|c| hinv[r][c] * g[c]).sum::<f64>();
            }
            let mut slope: f64 = d.iter().zip(&g).map(|(a, b)| a * b).sum();
            if !(slope < 0.0) {
                hinv = identity(n);
                for j in 0..n {
                    d[j] = if active[j] { 0.0 } else { -g[j] };
                }
                slope = -pg_norm * pg_norm;
            }
            // keep the first trial step inside a unit-sized move
            let dn = d.iter().map(|v| v * v).sum::<f64>().sqrt();
            let mut t = if dn > 0.5 { 0.5 / dn } else { 1.0 };
            let mut accepted = None;
            for _ in 0..40 {
                let xn: Vec<f64> = x.iter().zip(&d).map(|(a, b)| (a + t * b).clamp(0.0, 1.0)).collect();
                let pn = self.scaling.to_param(&xn);
                let fnew = self.f(&pn);
                let moved: f64 = xn.iter().zip(&x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                if fnew.is_finite() && fnew <= f + 1e-4 * t * slope.min(0.0) && fnew < f {
                    accepted = Some((xn, pn, fnew, moved));
                    break;
                }
                if moved <= self.opts.step_tol {
                    break;
                }
                t *= 0.5;
            }
            let Some((xn, pn, fnew, moved)) = accepted else {
                if !reset {
                    // retry along the projected steepest descent
                    hinv = identity(n);
                    reset = true;
                    continue;
                }
                return (p, f, trace, it, Termination::NoProgress);
            };
            reset = false;
            let gn = self.gradient(&pn);
            let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
            let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
            bfgs_update(&mut hinv, &s, &y);
            x = xn;
            p = pn;
            f = fnew;
            g = gn;
            trace.push(f);
            if moved <= self.opts.step_tol {
                return (p, f, trace, it + 1, Termination::Step);
            }
        }
        (p, f, trace, self.opts.max_iter, Termination::IterationCap)
    }
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect()
}

fn bfgs_update(h: &mut [Vec<f64>], s: &[f64], y: &[f64]) {
    let n = s.len();
    let sy: f64 = s.iter().zip(y).map(|(a, b)| a * b).sum();
    if sy <= 1e-12 * s.iter().map(|v| v * v).sum::<f64>().sqrt() * y.iter().map(|v| v * v).sum::<f64>().sqrt() {
        return;
    }
    let rho = 1.0 / sy;
    let hy: Vec<f64> = (0..n).map(|i| (0..n).map(|j| h[i][j] * y[j]).sum()).collect();
    let yhy: f64 = y.iter().zip(&hy).map(|(a, b)| a * b).sum();
    for i in 0..n {
        for j in 0..n {
            h[i][j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
        }
    }
}

/// Multi-start fit of the free parameters of `template`. The first start is
/// taken from each parameter's `start` (or the template), the others are
/// drawn uniformly in the box coordinates from `optimizer.seed`.
pub fn fit(template: &TwoFiberSetup, datasets: &[ExperimentDataset], config: &FitConfig) -> Result<FitResult> {
    config.validate(template)?;
    if datasets.is_empty() {
        return Err(Error::Config("no datasets to fit".into()));
    }
    for d in datasets {
        d.validate()?;
    }
    let mut base = template.clone();
    for (name, v) in &config.fixed {
        name.set(&mut base, *v)?;
    }
    let scaling = Scaling {
        lo: config.free.iter().map(|p| p.lower).collect(),
        hi: config.free.iter().map(|p| config.upper(p)).collect(),
        log: config.free.iter().map(|p| p.log_scale).collect(),
    };
    let first: Vec<f64> = config
        .free
        .iter()
        .map(|p| p.start.or_else(|| p.name.get(&base)).unwrap_or(p.lower))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.optimizer.seed);
    let n = config.free.len();
    let mut starts = vec![scaling.to_unit(&first)];
    for _ in 1..config.optimizer.starts {
        starts.push((0..n).map(|_| rng.gen::<f64>()).collect());
    }
    let problem = Problem {
        template: base,
        free: config.free.iter().map(|p| p.name).collect(),
        scaling,
        datasets,
        opts: config.optimizer,
    };
    let runs: Vec<_> = starts
        .par_iter()
        .map(|x0| {
            let start = problem.scaling.to_param(x0);
            (start, problem.run(x0.clone()))
        })
        .collect();
    let norm = |p: &[f64]| p.iter().map(|v| v * v).sum::<f64>();
    // starts within a relative 1e-6 of the lowest f_obj are ties; among them
    // a converged start wins, then the smaller parameter norm
    let f_min = runs.iter().map(|r| r.1 .1).fold(f64::INFINITY, f64::min);
    let best = runs
        .iter()
        .enumerate()
        .filter(|(_, r)| r.1 .1 <= f_min + 1e-6 * f_min.abs())
        .min_by(|(_, a), (_, b)| {
            let key = |r: &(Vec<f64>, f64, Vec<f64>, usize, Termination)| (!r.4.converged(), norm(&r.0));
            let (ka, kb) = (key(&a.1), key(&b.1));
            ka.0.cmp(&kb.0).then(ka.1.total_cmp(&kb.1))
        })
        .map(|(k, _)| k)
        .expect("at least one start");
    let (_, (p, f_obj, trace, _, termination)) = runs[best].clone();
    let setup = problem.setup(&p);
    let residuals = objective_report(&setup, datasets);
    let parameters = Param::ALL.iter().filter_map(|n| n.get(&setup).map(|v| (*n, v))).collect();
    Ok(FitResult {
        parameters,
        f_obj,
        residuals,
        trace,
        termination,
        setup,
        starts: runs
            .into_iter()
            .map(|(start, (_, f_obj, _, iterations, termination))| StartSummary {
                start,
                f_obj,
                iterations,
                termination,
            })
            .collect(),
        seed: config.optimizer.seed,
    })
}

impl FitResult {
    /// Parameter table and run summary as plain text.
    pub fn report(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# fit report");
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "termination = {}", self.termination.as_str());
        let _ = writeln!(s, "accepted_steps = {}", self.trace.len() - 1);
        let _ = writeln!(s, "failed_points = {}", self.residuals.failed_points);
        let _ = writeln!(s);
        let header: Vec<&str> = self.parameters.keys().map(|p| p.as_str()).collect();
        let _ = writeln!(s, "{:>12}{:>14}", header.iter().map(|h| format!("{h:>12}")).collect::<String>(), "f_obj");
        let values: String = self.parameters.values().map(|v| format!("{v:>12.4}")).collect();
        let _ = writeln!(s, "{values}{:>14.6e}", self.f_obj);
        let _ = writeln!(s);
        for d in &self.residuals.datasets {
            let _ = writeln!(s, "{} ({}): rms = {:.6e}", d.label, d.direction.as_str(), d.rms);
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "start  f_obj  iterations  termination");
        for (k, st) in self.starts.iter().enumerate() {
            let _ = writeln!(s, "{k} {:.6e} {} {}", st.f_obj, st.iterations, st.termination.as_str());
        }
        s
    }

    /// Writes `fit_report.txt`, `fit_trace.csv` and `fit_residuals.csv`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("fit_report.txt"), self.report())?;
        let mut t = fs::File::create(dir.join("fit_trace.csv"))?;
        writeln!(t, "iteration,f_obj")?;
        for (k, f) in self.trace.iter().enumerate() {
            writeln!(t, "{k},{f:e}")?;
        }
        let mut w = csv::Writer::from_path(dir.join("fit_residuals.csv"))?;
        w.write_record(["label", "direction", "stretch", "stress_exp", "stress_sim", "residual"])?;
        for d in &self.residuals.datasets {
            for k in 0..d.stretch.len() {
                let sim = d.simulated[k].map_or_else(|| "nan".to_string(), |v| format!("{v:e}"));
                w.write_record([
                    d.label.clone(),
                    d.direction.as_str().to_string(),
                    format!("{}", d.stretch[k]),
                    format!("{}", d.measured[k]),
                    sim,
                    format!("{:e}", d.residuals[k]),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}
