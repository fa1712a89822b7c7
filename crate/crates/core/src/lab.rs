//! Homogeneous deformation drivers: fiber case studies, switch-criterion
//! sphere maps and the incompressible two-fiber uniaxial solver.

use std::io::Write;

use rayon::prelude::*;

use crate::energy::{FiberPart, MaterialModel};
use crate::error::{Error, Result};
use crate::kinematics::{mixed_invariant, DeformationState, FiberPlane, InvariantFamily, StructuralTensor};
use crate::stress::{response_at, ResponseOptions};
use crate::tensor::{Mat3, SymTensor3, Vec3};

/// Threshold below which `σ11` makes a stress ratio meaningless.
pub const RATIO_FLOOR: f64 = 1e-14;

/// Threshold of the sphere-map sign classification.
pub const SIGN_THRESHOLD: f64 = 1e-14;

/// One emitted state of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub control: f64,
    /// `⟨C^i, M⟩`, `i = 1..4`, of the first fiber.
    pub i4c: [f64; 4],
    /// `⟨(log U)^i, M⟩`, `i = 1..4`, of the first fiber.
    pub i4h: [f64; 4],
    pub sigma: SymTensor3,
    pub sigma_ratio: Option<f64>,
    /// `tan²β_act` of the first fiber's current direction.
    pub tan2_beta_act: Option<f64>,
    pub lambda2: Option<f64>,
    pub p: Option<f64>,
    pub normalized: bool,
}

/// A control value the driver could not report, and why.
#[derive(Debug, Clone, PartialEq)]
pub struct SkippedPoint {
    pub control: f64,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Curve {
    pub points: Vec<CurvePoint>,
    pub skipped: Vec<SkippedPoint>,
}

impl Curve {
    /// Divides every stress column by its largest magnitude over the curve.
    pub fn normalize(&mut self) {
        let mut max = [0.0f64; 6];
        for p in &self.points {
            for (m, v) in max.iter_mut().zip(p.sigma.components()) {
                *m = m.max(v.abs());
            }
        }
        for p in &mut self.points {
            let c = p.sigma.components();
            p.sigma = SymTensor3::from_components(std::array::from_fn(|k| if max[k] > 0.0 { c[k] / max[k] } else { c[k] }));
            p.normalized = true;
        }
    }

    /// Writes the sweep CSV.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_points_csv(out, &self.points)
    }
}

pub const CURVE_COLUMNS: [&str; 16] = [
    "control", "I4C1", "I4C2", "I4C3", "I4C4", "I4H1", "I4H2", "I4H3", "I4H4", "sig11", "sig13", "sig22", "sig33",
    "sig_ratio", "lambda2", "p",
];

pub fn write_points_csv<W: Write>(out: W, points: &[CurvePoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CURVE_COLUMNS)?;
    let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
    for p in points {
        let mut row: Vec<String> = vec![format!("{}", p.control)];
        row.extend(p.i4c.iter().chain(p.i4h.iter()).map(|v| format!("{v:e}")));
        for (i, j) in [(0, 0), (0, 2), (1, 1), (2, 2)] {
            row.push(format!("{:e}", p.sigma.get(i, j)));
        }
        row.push(opt(p.sigma_ratio));
        row.push(opt(p.lambda2));
        row.push(opt(p.p));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// `n + 1` evenly spaced values from `a` to `b`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let n = n.max(1);
    (0..=n).map(|k| a + (b - a) * k as f64 / n as f64).collect()
}

fn invariants(state: &DeformationState, fiber: Option<&StructuralTensor>) -> ([f64; 4], [f64; 4]) {
    match fiber {
        Some(m) => (
            std::array::from_fn(|k| mixed_invariant(state, m, InvariantFamily::C, k as u32 + 1)),
            std::array::from_fn(|k| mixed_invariant(state, m, InvariantFamily::H, k as u32 + 1)),
        ),
        None => ([1.0; 4], [0.0; 4]),
    }
}

/// Cauchy stress of `model`. A single-direction model given several fibers
/// is evaluated once per fiber and summed, which is how fiber families are
/// superposed in the case studies.
pub fn model_cauchy(model: &MaterialModel, state: &DeformationState, fibers: &[StructuralTensor]) -> Result<SymTensor3> {
    let opts = ResponseOptions {
        tangent: false,
        ..Default::default()
    };
    if model.arity() == fibers.len() {
        return Ok(response_at(model, state, fibers, opts)?.sigma);
    }
    if model.arity() != 1 {
        return Err(Error::ArityMismatch {
            expected: model.arity(),
            got: fibers.len(),
        });
    }
    let mut s = SymTensor3::zero();
    for a in fibers {
        s += response_at(model, state, std::slice::from_ref(a), opts)?.sigma;
    }
    Ok(s)
}

fn tan2_beta_act(f: &Mat3, fiber: &StructuralTensor) -> f64 {
    let fa = f * fiber.a;
    let c = fa[0] / fa.norm();
    let b = c.clamp(-1.0, 1.0).acos();
    b.tan().powi(2)
}

fn sweep(
    model: &MaterialModel,
    fibers: &[StructuralTensor],
    controls: &[f64],
    kin: impl Fn(f64) -> Mat3 + Sync,
    with_ratio: bool,
) -> Result<Curve> {
    let results: Vec<Result<CurvePoint>> = controls
        .par_iter()
        .map(|&x| {
            let f = kin(x);
            let state = DeformationState::from_f(&f)?;
            let sigma = model_cauchy(model, &state, fibers)?;
            let (i4c, i4h) = invariants(&state, fibers.first());
            let sigma_ratio = if with_ratio {
                let s11 = sigma.get(0, 0);
                if s11 < RATIO_FLOOR {
                    return Err(Error::DivisionDegenerate { sigma11: s11 });
                }
                Some(sigma.get(1, 1) / s11)
            } else {
                None
            };
            Ok(CurvePoint {
                control: x,
                i4c,
                i4h,
                sigma,
                sigma_ratio,
                tan2_beta_act: fibers.first().map(|a| tan2_beta_act(&f, a)),
                lambda2: None,
                p: None,
                normalized: false,
            })
        })
        .collect();
    let mut curve = Curve::default();
    for (x, r) in controls.iter().zip(results) {
        match r {
            Ok(p) => curve.points.push(p),
            Err(e @ (Error::DivisionDegenerate { .. } | Error::NonFiniteEnergy { .. })) => curve.skipped.push(SkippedPoint {
                control: *x,
                reason: e.to_string(),
            }),
            Err(e) => return Err(e),
        }
    }
    Ok(curve)
}

/// Incompressible uniaxial loading `F = diag(λ, λ^{-1/2}, λ^{-1/2})`.
pub fn drive_uniaxial(model: &MaterialModel, fibers: &[StructuralTensor], range: (f64, f64), steps: usize) -> Result<Curve> {
    if !(range.0 > 0.0 && range.1 > 0.0) {
        return Err(Error::Config(format!("stretch range {range:?} must be positive")));
    }
    sweep(model, fibers, &linspace(range.0, range.1, steps), uniaxial_f, false)
}

fn uniaxial_f(l: f64) -> Mat3 {
    let t = 1.0 / l.sqrt();
    Mat3::from_diagonal(&Vec3::new(l, t, t))
}

/// Simple shear `F = 1 + γ e1⊗e3`.
pub fn drive_simple_shear(model: &MaterialModel, fibers: &[StructuralTensor], range: (f64, f64), steps: usize) -> Result<Curve> {
    if range.0 < 0.0 || range.1 < 0.0 {
        return Err(Error::Config(format!("shear range {range:?} must be nonnegative")));
    }
    sweep(
        model,
        fibers,
        &linspace(range.0, range.1, steps),
        |g| {
            let mut f = Mat3::identity();
            f[(0, 2)] = g;
            f
        },
        false,
    )
}

/// Fibers at `±β` degrees from the first axis, in the 1-2 plane.
pub fn symmetric_fibers(beta_deg: f64) -> [StructuralTensor; 2] {
    [
        StructuralTensor::from_angle(beta_deg, FiberPlane::Xy),
        StructuralTensor::from_angle(-beta_deg, FiberPlane::Xy),
    ]
}

/// Incompressible biaxial tension to final stretches `(r1, r2)`, controlled by
/// `F11`. The state at zero load is reported as skipped, as are states whose
/// exponential terms overflow.
pub fn drive_biaxial(model: &MaterialModel, beta_deg: f64, ratio: (f64, f64), steps: usize) -> Result<Curve> {
    if !(ratio.0 > 0.0 && ratio.1 > 0.0) {
        return Err(Error::Config(format!("stretch ratio {ratio:?} must be positive")));
    }
    let fibers = symmetric_fibers(beta_deg);
    let ts = linspace(0.0, 1.0, steps);
    let (r1, r2) = ratio;
    let curve = sweep(
        model,
        &fibers,
        &ts,
        |t| {
            let (a, b) = (1.0 + t * (r1 - 1.0), 1.0 + t * (r2 - 1.0));
            Mat3::from_diagonal(&Vec3::new(a, b, 1.0 / (a * b)))
        },
        true,
    )?;
    Ok(relabel(curve, |t| 1.0 + t * (r1 - 1.0)))
}

fn relabel(mut c: Curve, f: impl Fn(f64) -> f64) -> Curve {
    for p in &mut c.points {
        p.control = f(p.control);
    }
    for s in &mut c.skipped {
        s.control = f(s.control);
    }
    c
}

/// Tension in direction 1 with `F22 = F33 = λ1^{-1/2}`, fibers at `±β`.
pub fn drive_biaxial_tc(model: &MaterialModel, beta_deg: f64, range: (f64, f64), steps: usize) -> Result<Curve> {
    if range.0 < 1.0 || range.1 < 1.0 {
        return Err(Error::Config(format!("stretch range {range:?} must be >= 1")));
    }
    let fibers = symmetric_fibers(beta_deg);
    sweep(model, &fibers, &linspace(range.0, range.1, steps), uniaxial_f, true)
}

/// Invariant values over the unit sphere for `C = diag(eigenvalues)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    pub eigenvalues: [f64; 3],
    pub family: InvariantFamily,
    pub i: u32,
    pub theta_deg: Vec<f64>,
    pub phi_deg: Vec<f64>,
    /// `values[t][p]` at `theta_deg[t]`, `phi_deg[p]`.
    pub values: Vec<Vec<f64>>,
    /// Sign of `value − 1` (family C) or of `value` (family H).
    pub signs: Vec<Vec<i8>>,
}

pub const DEFAULT_SPHERE_EIGENVALUES: [f64; 3] = [0.9, 1.65, 1.0 / (0.9 * 1.65)];

/// Direction-dependent invariant for principal values along the axes:
/// `Σ_k f(λ_k)^i cos²θ_k` with `cos θ_k = A_k`.
pub fn sphere_invariant(eigenvalues: &[f64; 3], family: InvariantFamily, i: u32, a: &Vec3) -> f64 {
    (0..3)
        .map(|k| {
            let base = match family {
                InvariantFamily::C => eigenvalues[k],
                InvariantFamily::H => 0.5 * eigenvalues[k].ln(),
            };
            base.powi(i as i32) * a[k] * a[k]
        })
        .sum()
}

fn classify(v: f64) -> i8 {
    if v > SIGN_THRESHOLD {
        1
    } else if v < -SIGN_THRESHOLD {
        -1
    } else {
        0
    }
}

pub fn sphere_sign(family: InvariantFamily, value: f64) -> i8 {
    match family {
        InvariantFamily::C => classify(value - 1.0),
        InvariantFamily::H => classify(value),
    }
}

/// Samples `θ ∈ [0°, 180°]` and `φ ∈ [−180°, 180°]` on `n_theta × n_phi` nodes.
pub fn sphere_map(eigenvalues: [f64; 3], family: InvariantFamily, i: u32, n_theta: usize, n_phi: usize) -> Result<SphereGrid> {
    if eigenvalues.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: eigenvalues.iter().copied().fold(f64::INFINITY, f64::min),
        });
    }
    if n_theta < 2 || n_phi < 2 {
        return Err(Error::Config("sphere resolution must be at least 2 x 2".into()));
    }
    let theta_deg = linspace(0.0, 180.0, n_theta - 1);
    let phi_deg = linspace(-180.0, 180.0, n_phi - 1);
    let values: Vec<Vec<f64>> = theta_deg
        .par_iter()
        .map(|&t| {
            phi_deg
                .iter()
                .map(|&p| {
                    let a = StructuralTensor::from_spherical(t.to_radians(), p.to_radians()).a;
                    sphere_invariant(&eigenvalues, family, i, &a)
                })
                .collect()
        })
        .collect();
    let signs = values
        .iter()
        .map(|row| row.iter().map(|&v| sphere_sign(family, v)).collect())
        .collect();
    Ok(SphereGrid {
        eigenvalues,
        family,
        i,
        theta_deg,
        phi_deg,
        values,
        signs,
    })
}

impl SphereGrid {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["theta_deg", "phi_deg", "value", "sign"])?;
        for (ti, t) in self.theta_deg.iter().enumerate() {
            for (pi, p) in self.phi_deg.iter().enumerate() {
                let (v, s) = (self.values[ti][pi], self.signs[ti][pi]);
                w.write_record([format!("{t}"), format!("{p}"), format!("{v:e}"), format!("{s}")])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Grid directions `(θ°, φ°)` where the fiber is stretched (`⟨C,M⟩ > 1`)
/// while `⟨log U,M⟩ < 0`.
pub fn transition_zone(eigenvalues: [f64; 3], n_theta: usize, n_phi: usize) -> Result<Vec<(f64, f64)>> {
    let c = sphere_map(eigenvalues, InvariantFamily::C, 1, n_theta, n_phi)?;
    let h = sphere_map(eigenvalues, InvariantFamily::H, 1, n_theta, n_phi)?;
    let mut out = Vec::new();
    for (ti, t) in c.theta_deg.iter().enumerate() {
        for (pi, p) in c.phi_deg.iter().enumerate() {
            if c.signs[ti][pi] > 0 && h.signs[ti][pi] < 0 {
                out.push((*t, *p));
            }
        }
    }
    Ok(out)
}

/// Loading direction of a uniaxial test on a two-fiber layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Deserialize, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LoadDirection {
    /// Along the circumferential axis, from which `β_f` is measured.
    Circumferential,
    /// Perpendicular to it, in the fiber plane.
    Axial,
}

/// Isotropic host and one fiber law, duplicated at `±β_f`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoFiberSetup {
    pub iso: MaterialModel,
    pub fiber: MaterialModel,
    pub beta_deg: f64,
}

impl TwoFiberSetup {
    /// Composite with the loading axis along the first coordinate.
    pub fn composite(&self, direction: LoadDirection) -> MaterialModel {
        let angle = match direction {
            LoadDirection::Circumferential => self.beta_deg,
            LoadDirection::Axial => 90.0 - self.beta_deg,
        };
        let fibers = symmetric_fibers(angle)
            .into_iter()
            .map(|fiber| FiberPart {
                model: self.fiber.clone(),
                fiber,
            })
            .collect();
        MaterialModel::Composite {
            iso: Box::new(self.iso.clone()),
            fibers,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    pub max_iter: usize,
    /// Residual tolerance relative to the model's stiffness scale.
    pub rel_tol: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            max_iter: 50,
            rel_tol: 1e-10,
        }
    }
}

/// Converged state of the incompressible uniaxial test.
#[derive(Debug, Clone)]
pub struct TwoFiberPoint {
    /// Stretch in the loading direction.
    pub lambda1: f64,
    /// Lateral in-plane stretch.
    pub lambda2: f64,
    /// Lagrange multiplier of `S = S_ψ + 2p C⁻¹`.
    pub p: f64,
    /// Cauchy stress in the loading direction.
    pub sigma11: f64,
    /// `|S33|` before each Newton update, ending with the accepted residual.
    pub residuals: Vec<f64>,
    pub curve_point: CurvePoint,
}

struct Stresses {
    s_psi: SymTensor3,
    state: DeformationState,
}

fn incompressible_state(l1: f64, l2: f64) -> Result<DeformationState> {
    DeformationState::from_f(&Mat3::from_diagonal(&Vec3::new(l1, l2, 1.0 / (l1 * l2))))
}

fn stresses(model: &MaterialModel, l1: f64, l2: f64) -> Result<Stresses> {
    let state = incompressible_state(l1, l2)?;
    let r = response_at(
        model,
        &state,
        &[],
        ResponseOptions {
            tangent: false,
            ..Default::default()
        },
    )?;
    Ok(Stresses { s_psi: r.s, state })
}

/// `p` from `S22 = 0`, and the remaining `S33`.
fn s33_residual(model: &MaterialModel, l1: f64, l2: f64) -> Result<(f64, f64, Stresses)> {
    let st = stresses(model, l1, l2)?;
    let c = st.state.c;
    let p = -0.5 * st.s_psi.get(1, 1) * c.get(1, 1);
    let s33 = st.s_psi.get(2, 2) + 2.0 * p / c.get(2, 2);
    Ok((s33, p, st))
}

/// Solves `S33(λ2) = 0` at one loading stretch, starting from `guess`.
pub fn solve_two_fiber_point(model: &MaterialModel, l1: f64, guess: f64, opts: NewtonOptions) -> Result<TwoFiberPoint> {
    let tol = opts.rel_tol * model.stiffness_scale().max(f64::MIN_POSITIVE);
    let mut l2 = guess;
    let mut residuals = Vec::new();
    for _ in 0..=opts.max_iter {
        let (r, p, st) = s33_residual(model, l1, l2)?;
        residuals.push(r.abs());
        if !r.is_finite() {
            break;
        }
        if r.abs() <= tol {
            let c = st.state.c;
            let s11 = st.s_psi.get(0, 0) + 2.0 * p / c.get(0, 0);
            let mut sigma = SymTensor3::from_matrix(&(st.state.f * st.s_psi.to_matrix() * st.state.f.transpose()));
            sigma += SymTensor3::identity() * (2.0 * p);
            let first = match model {
                MaterialModel::Composite { fibers, .. } => fibers.first().map(|f| f.fiber),
                _ => None,
            };
            let (i4c, i4h) = invariants(&st.state, first.as_ref());
            let sigma11 = l1 * l1 * s11;
            return Ok(TwoFiberPoint {
                lambda1: l1,
                lambda2: l2,
                p,
                sigma11,
                residuals,
                curve_point: CurvePoint {
                    control: l1,
                    i4c,
                    i4h,
                    sigma,
                    sigma_ratio: None,
                    tan2_beta_act: None,
                    lambda2: Some(l2),
                    p: Some(p),
                    normalized: false,
                },
            });
        }
        let h = 1e-7 * l2.max(1.0);
        let (rp, _, _) = s33_residual(model, l1, l2 + h)?;
        let (rm, _, _) = s33_residual(model, l1, l2 - h)?;
        let jac = (rp - rm) / (2.0 * h);
        let mut next = l2 - r / jac;
        if !next.is_finite() {
            break;
        }
        if next <= 0.0 {
            next = 0.5 * l2;
        }
        l2 = next;
    }
    Err(Error::NewtonDivergence {
        iterations: residuals.len().saturating_sub(1),
        residual: residuals.last().copied().unwrap_or(f64::NAN),
    })
}

/// Incompressible uniaxial tension of a composite along the first axis.
/// Each point starts from the previous converged lateral stretch.
pub fn uniaxial_two_fiber(model: &MaterialModel, lambda1: &[f64], opts: NewtonOptions) -> Vec<Result<TwoFiberPoint>> {
    let mut out = Vec::with_capacity(lambda1.len());
    let mut guess: Option<f64> = None;
    for &l1 in lambda1 {
        if !(l1 > 0.0) {
            out.push(Err(Error::Config(format!("stretch {l1} must be positive"))));
            continue;
        }
        let g = guess.unwrap_or(1.0 / l1.sqrt());
        let r = solve_two_fiber_point(model, l1, g, opts);
        if let Ok(p) = &r {
            guess = Some(p.lambda2);
        }
        out.push(r);
    }
    out
}

/// Total energy along the uniaxial path with `λ3 = 1/(λ1 λ2)`; its minimizer
/// in `λ2` is the lateral stretch of the stress-free sides.
pub fn constrained_energy(model: &MaterialModel, l1: f64, l2: f64) -> Result<f64> {
    let state = incompressible_state(l1, l2)?;
    Ok(crate::energy::evaluate_with(model, &state, &[], crate::Order::Gradient)?.energy)
}
