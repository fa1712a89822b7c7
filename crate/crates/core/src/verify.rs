//! Finite-difference verification of stresses and tangents at random states.

use std::io::Write;

use nalgebra::{Rotation3, Unit};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::energy::MaterialModel;
use crate::error::Result;
use crate::kinematics::{mixed_invariant, DeformationState, InvariantFamily, StructuralTensor};
use crate::stress::full_response;
use crate::tensor::{spectral_decompose, sym_exp, Mat3, SymTensor3, Vec3, VOIGT_PAIRS};

/// States closer than this to a fiber switch are skipped.
pub const MIN_SWITCH_MARGIN: f64 = 1e-2;

/// Relative errors at one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdCheck {
    /// `S` against `2 ∂ψ/∂C`.
    pub stress_error: f64,
    /// `ℂ` against `2 ∂S/∂C`.
    pub tangent_error: f64,
}

fn state_from_c(c: &SymTensor3) -> Result<DeformationState> {
    DeformationState::from_stretch(&spectral_decompose(c)?.map(f64::sqrt))
}

fn unit_sym(a: usize) -> SymTensor3 {
    let (i, j) = VOIGT_PAIRS[a];
    let mut m = Mat3::zeros();
    m[(i, j)] = 1.0;
    m[(j, i)] = 1.0;
    SymTensor3::from_matrix(&m)
}

/// Central differences in `C` with step `h` along each Voigt direction.
pub fn fd_check(model: &MaterialModel, fibers: &[StructuralTensor], f: &Mat3, h: f64) -> Result<FdCheck> {
    let st = full_response(model, f, fibers)?;
    let c = SymTensor3::from_matrix(&(f.transpose() * f));
    let floor = 1e-8 * model.stiffness_scale().max(1.0);
    let (s_scale, c_scale) = (st.s.norm().max(floor), st.c_mat.norm().max(floor));
    let mut out = FdCheck {
        stress_error: 0.0,
        tangent_error: 0.0,
    };
    for a in 0..6 {
        let d = unit_sym(a);
        let p = full_response(model, &state_from_c(&(c + d * h))?.f, fibers)?;
        let m = full_response(model, &state_from_c(&(c - d * h))?.f, fibers)?;
        let ds = (p.energy - m.energy) / h;
        out.stress_error = out.stress_error.max((ds - st.s.dot(&d)).abs() / s_scale);
        let dc = (p.s - m.s) * (1.0 / h);
        out.tangent_error = out.tangent_error.max((dc - st.c_mat.contract(&d)).norm() / c_scale);
    }
    Ok(out)
}

/// Distance of the state from the nearest fiber switch of `model`.
pub fn switch_margin(model: &MaterialModel, fibers: &[StructuralTensor], f: &Mat3) -> Result<f64> {
    let s = DeformationState::from_f(f)?;
    let margin = |m: &MaterialModel, a: &StructuralTensor| match m {
        MaterialModel::FiberC { i, switch: true, .. } => (mixed_invariant(&s, a, InvariantFamily::C, *i) - 1.0).abs(),
        MaterialModel::FiberHgo { switch: true, .. } => (mixed_invariant(&s, a, InvariantFamily::C, 1) - 1.0).abs(),
        MaterialModel::FiberH { switch: true, .. } => s.log_u.dot(&a.m).abs(),
        _ => f64::INFINITY,
    };
    Ok(match model {
        MaterialModel::Composite { fibers: parts, .. } => {
            parts.iter().map(|p| margin(&p.model, &p.fiber)).fold(f64::INFINITY, f64::min)
        }
        m if m.is_fiber() && !fibers.is_empty() => margin(m, &fibers[0]),
        _ => f64::INFINITY,
    })
}

/// `R exp(E)` with the components of `E` uniform in `[-scale, scale]` and a
/// uniformly drawn rotation axis and angle.
pub fn random_deformation(rng: &mut impl Rng, scale: f64) -> Mat3 {
    let e = SymTensor3::from_components(std::array::from_fn(|_| rng.gen_range(-scale..=scale)));
    let axis = loop {
        let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if v.norm() > 0.1 && v.norm() < 1.0 {
            break v;
        }
    };
    let r = Rotation3::from_axis_angle(&Unit::new_normalize(axis), rng.gen_range(-3.0..3.0));
    r.into_inner() * sym_exp(&e).to_matrix()
}

#[derive(Debug, Clone)]
pub struct FdSample {
    pub index: usize,
    pub f: Mat3,
    /// `None` when the state was too close to a switch.
    pub check: Option<FdCheck>,
}

#[derive(Debug, Clone)]
pub struct FdReport {
    pub seed: u64,
    pub step: f64,
    pub samples: Vec<FdSample>,
}

impl FdReport {
    pub fn max_stress_error(&self) -> f64 {
        self.checks().map(|c| c.stress_error).fold(0.0, f64::max)
    }

    pub fn max_tangent_error(&self) -> f64 {
        self.checks().map(|c| c.tangent_error).fold(0.0, f64::max)
    }

    pub fn checked(&self) -> usize {
        self.checks().count()
    }

    fn checks(&self) -> impl Iterator<Item = &FdCheck> {
        self.samples.iter().filter_map(|s| s.check.as_ref())
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# seed = {}, h = {:e}", self.seed, self.step)?;
        writeln!(out, "sample,F11,F12,F13,F21,F22,F23,F31,F32,F33,stress_error,tangent_error,skipped")?;
        for s in &self.samples {
            let f: Vec<String> = (0..9).map(|k| format!("{:.17e}", s.f[(k / 3, k % 3)])).collect();
            match s.check {
                Some(c) => writeln!(out, "{},{},{:e},{:e},0", s.index, f.join(","), c.stress_error, c.tangent_error)?,
                None => writeln!(out, "{},{},,,1", s.index, f.join(","))?,
            }
        }
        Ok(())
    }
}

/// `samples` random states drawn from `seed`.
pub fn fd_check_suite(
    model: &MaterialModel,
    fibers: &[StructuralTensor],
    samples: usize,
    scale: f64,
    seed: u64,
) -> Result<FdReport> {
    const STEP: f64 = 1e-6;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(samples);
    for index in 0..samples {
        let f = random_deformation(&mut rng, scale);
        let check = if switch_margin(model, fibers, &f)? < MIN_SWITCH_MARGIN {
            None
        } else {
            Some(fd_check(model, fibers, &f, STEP)?)
        };
        out.push(FdSample { index, f, check });
    }
    Ok(FdReport {
        seed,
        step: STEP,
        samples: out,
    })
}
