//! Kinematic quantities derived from the deformation gradient and the
//! invariant catalog (isotropic, Hencky and mixed fiber invariants).

use crate::error::{Error, Result};
use crate::tensor::{
    deviator, spectral_decompose, spectral_decompose_any, tol_pd, Mat3, Spectral, SymTensor3, Vec3,
};

/// Everything the energy models need about a deformation state.
#[derive(Debug, Clone, Copy)]
pub struct DeformationState {
    pub f: Mat3,
    pub j: f64,
    pub c: SymTensor3,
    pub spectral_c: Spectral,
    pub u: SymTensor3,
    pub log_u: SymTensor3,
    pub dev_log_u: SymTensor3,
    pub tr_log_u: f64,
}

impl DeformationState {
    pub fn from_f(f: &Mat3) -> Result<Self> {
        let j = f.determinant();
        if !(j > tol_pd((f.transpose() * f).trace())) {
            return Err(Error::NonInvertible { det: j });
        }
        let c = SymTensor3::from_matrix(&(f.transpose() * f));
        let spectral_c = spectral_decompose(&c)?;
        Ok(Self::assemble(*f, j, c, spectral_c))
    }

    /// State of the pure stretch `F = U = exp(log_u)`.
    pub fn from_log_stretch(log_u: &SymTensor3) -> Result<Self> {
        let s = spectral_decompose_any(log_u);
        let u = s.map(f64::exp);
        Self::from_f(&u.to_matrix())
    }

    /// State of the pure stretch `F = U`.
    pub fn from_stretch(u: &SymTensor3) -> Result<Self> {
        Self::from_f(&u.to_matrix())
    }

    fn assemble(f: Mat3, j: f64, c: SymTensor3, spectral_c: Spectral) -> Self {
        let u = spectral_c.map(f64::sqrt);
        let log_u = spectral_c.map(|l| 0.5 * l.ln());
        let tr_log_u = 0.5 * spectral_c.eigenvalues.iter().map(|l| l.ln()).sum::<f64>();
        Self {
            f,
            j,
            c,
            spectral_c,
            u,
            log_u,
            dev_log_u: deviator(&log_u),
            tr_log_u,
        }
    }

    /// Eigenvalues of `log U`, in the order of `spectral_c`.
    pub fn log_eigenvalues(&self) -> [f64; 3] {
        self.spectral_c.eigenvalues.map(|l| 0.5 * l.ln())
    }

    /// Rotation of the polar decomposition `F = R U`.
    pub fn rotation(&self) -> Mat3 {
        let inv_u = self.spectral_c.map(|l| 1.0 / l.sqrt());
        self.f * inv_u.to_matrix()
    }
}

/// Plane used to interpret an in-plane fiber angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Deserialize, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FiberPlane {
    Xy,
    Yz,
    Xz,
}

/// Config form of a fiber direction: a vector, or an angle in a plane.
#[derive(Debug, Clone, Copy, PartialEq, serde::Deserialize, serde::Serialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum DirectionSpec {
    Vector {
        direction: [f64; 3],
    },
    Angle {
        angle_deg: f64,
        #[serde(default = "default_plane")]
        plane: FiberPlane,
    },
}

fn default_plane() -> FiberPlane {
    FiberPlane::Xy
}

impl TryFrom<DirectionSpec> for StructuralTensor {
    type Error = Error;

    fn try_from(d: DirectionSpec) -> Result<Self> {
        match d {
            DirectionSpec::Vector { direction } => Self::from_direction(Vec3::from(direction)),
            DirectionSpec::Angle { angle_deg, plane } => {
                if !angle_deg.is_finite() {
                    return Err(Error::InvalidModel(format!("fiber angle {angle_deg}")));
                }
                Ok(Self::from_angle(angle_deg, plane))
            }
        }
    }
}

impl From<StructuralTensor> for DirectionSpec {
    fn from(s: StructuralTensor) -> Self {
        DirectionSpec::Vector {
            direction: [s.a[0], s.a[1], s.a[2]],
        }
    }
}

/// Rank-one structural tensor `M = A ⊗ A` of a unit preferred direction.
#[derive(Debug, Clone, Copy, PartialEq, serde::Deserialize, serde::Serialize)]
#[serde(try_from = "DirectionSpec", into = "DirectionSpec")]
pub struct StructuralTensor {
    pub a: Vec3,
    pub m: SymTensor3,
}

impl StructuralTensor {
    /// Normalizes `a`; fails on a zero or non-finite vector.
    pub fn from_direction(a: Vec3) -> Result<Self> {
        let n = a.norm();
        if !(n.is_finite() && n > 1e-300) {
            return Err(Error::InvalidModel(format!("degenerate fiber direction {a:?}")));
        }
        let a = a / n;
        Ok(Self {
            a,
            m: SymTensor3::outer_self(&a),
        })
    }

    /// Direction at `angle_deg` measured from the first axis of `plane`.
    pub fn from_angle(angle_deg: f64, plane: FiberPlane) -> Self {
        let (c, s) = (angle_deg.to_radians().cos(), angle_deg.to_radians().sin());
        let a = match plane {
            FiberPlane::Xy => Vec3::new(c, s, 0.0),
            FiberPlane::Yz => Vec3::new(0.0, c, s),
            FiberPlane::Xz => Vec3::new(c, 0.0, s),
        };
        Self::from_direction(a).expect("unit vector")
    }

    /// Direction from spherical angles, `A = (sinθ cosφ, sinθ sinφ, cosθ)`.
    pub fn from_spherical(theta: f64, phi: f64) -> Self {
        let a = Vec3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos());
        Self::from_direction(a).expect("unit vector")
    }

    pub fn axis(k: usize) -> Self {
        let mut a = Vec3::zeros();
        a[k] = 1.0;
        Self::from_direction(a).expect("unit vector")
    }
}

/// `(I1, I2, I3) = (tr C, tr Cof C, det C)`.
pub fn principal_invariants(c: &SymTensor3) -> (f64, f64, f64) {
    let m = c.to_matrix();
    let i1 = m.trace();
    let i2 = 0.5 * (i1 * i1 - (m * m).trace());
    (i1, i2, m.determinant())
}

/// `(J1H, J2H, J3H) = (tr log U, ‖log U‖², tr (log U)³)`.
pub fn hencky_invariants(log_u: &SymTensor3) -> (f64, f64, f64) {
    let m = log_u.to_matrix();
    (m.trace(), log_u.norm_squared(), (m * m * m).trace())
}

/// Which tensor the mixed invariant is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Deserialize, serde::Serialize)]
pub enum InvariantFamily {
    /// `⟨C^i, M⟩`
    C,
    /// `⟨(log U)^i, M⟩`
    H,
}

/// `I4^{C^i} = ⟨C^i, M⟩` or `I4^{H^i} = ⟨(log U)^i, M⟩`, computed by powering
/// the eigenvalues.
pub fn mixed_invariant(state: &DeformationState, m: &StructuralTensor, family: InvariantFamily, i: u32) -> f64 {
    let s = &state.spectral_c;
    (0..3)
        .map(|k| {
            let base = match family {
                InvariantFamily::C => s.eigenvalues[k],
                InvariantFamily::H => 0.5 * s.eigenvalues[k].ln(),
            };
            base.powi(i as i32) * s.projections[k].dot(&m.m)
        })
        .sum()
}

/// `J5^C = ⟨Cof C, M⟩`; not used by any energy.
pub fn cofactor_invariant(state: &DeformationState, m: &StructuralTensor) -> f64 {
    let det = state.j * state.j;
    let cof = state.spectral_c.map(|l| det / l);
    cof.dot(&m.m)
}

/// `log(Cof U) = tr(log U) 1 − log U` and `J5^H = ⟨log(Cof U), M⟩`.
pub fn log_cofactor_invariant(state: &DeformationState, m: &StructuralTensor) -> (f64, SymTensor3) {
    let log_cof = SymTensor3::identity() * state.tr_log_u - state.log_u;
    (log_cof.dot(&m.m), log_cof)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn identity_state() {
        let s = DeformationState::from_f(&Mat3::identity()).unwrap();
        assert_eq!(s.j, 1.0);
        assert_eq!(s.log_u, SymTensor3::zero());
        let m = StructuralTensor::axis(0);
        assert_eq!(mixed_invariant(&s, &m, InvariantFamily::C, 3), 1.0);
        assert_eq!(mixed_invariant(&s, &m, InvariantFamily::H, 2), 0.0);
        let (j5, log_cof) = log_cofactor_invariant(&s, &m);
        assert_eq!(j5, 0.0);
        assert_eq!(log_cof, SymTensor3::zero());
    }

    #[test]
    fn incompressible_uniaxial() {
        let l: f64 = 1.4;
        let f = Mat3::from_diagonal(&Vec3::new(l, l.powf(-0.5), l.powf(-0.5)));
        let s = DeformationState::from_f(&f).unwrap();
        assert!(s.tr_log_u.abs() < 1e-15);
        assert!((s.dev_log_u - s.log_u).max_abs() < 1e-15);
    }

    #[test]
    fn singular_gradient_rejected() {
        let f = Mat3::from_diagonal(&Vec3::new(1.0, 1.0, 0.0));
        assert!(matches!(DeformationState::from_f(&f), Err(Error::NonInvertible { .. })));
        let f = Mat3::from_diagonal(&Vec3::new(1.0, 1.0, -1.0));
        assert!(DeformationState::from_f(&f).is_err());
    }

    #[test]
    fn invariant_arithmetic() {
        assert_eq!(principal_invariants(&SymTensor3::identity()), (3.0, 3.0, 1.0));
        let (i1, i2, i3) = principal_invariants(&SymTensor3::diag(4.0, 1.0, 0.25));
        assert!((i1 - 5.25).abs() < 1e-15 && (i2 - 5.25).abs() < 1e-15 && (i3 - 1.0).abs() < 1e-15);
        assert_eq!(hencky_invariants(&SymTensor3::zero()), (0.0, 0.0, 0.0));
        assert_eq!(hencky_invariants(&SymTensor3::diag(1.0, 0.0, -1.0)), (0.0, 2.0, 0.0));
    }

    #[test]
    fn stretch_along_third_axis() {
        let s = DeformationState::from_stretch(&SymTensor3::diag(2.0, 1.0, 0.5)).unwrap();
        let m = StructuralTensor::axis(2);
        let i4h = mixed_invariant(&s, &m, InvariantFamily::H, 1);
        assert!((i4h + LN_2).abs() < 1e-15);
        let (j5, _) = log_cofactor_invariant(&s, &m);
        assert!((j5 - LN_2).abs() < 1e-15);
    }

    #[test]
    fn fiber_angle_forms() {
        let a = StructuralTensor::from_angle(90.0, FiberPlane::Xy);
        assert!((a.a - Vec3::new(0.0, 1.0, 0.0)).norm() < 1e-15);
        let m = a.m.to_matrix();
        assert!((m * m - m).abs().max() < 1e-12);
        assert!((a.m.trace() - 1.0).abs() < 1e-12);
        assert!(StructuralTensor::from_direction(Vec3::zeros()).is_err());
        let z = StructuralTensor::from_spherical(0.0, 1.3);
        assert!((z.a - Vec3::new(0.0, 0.0, 1.0)).norm() < 1e-15);
    }
}
