//! Reference and current stress measures and tangents assembled from the
//! log-space response, reference Voigt tangents and parameter identification.

use crate::energy::{evaluate, evaluate_with, LogSpaceResponse, MaterialModel, OrthoParams, TiParams};
use crate::error::{Error, Result};
use crate::jet::Order;
use crate::kinematics::{DeformationState, StructuralTensor};
use crate::spectral_calculus::{contract_k, projection_ph};
use crate::tensor::{Mat3, SymTensor3, Tensor4V, VOIGT_PAIRS};

/// Stresses (kPa) and tangents at one deformation state.
#[derive(Debug, Clone, Copy)]
pub struct StressState {
    pub energy: f64,
    /// Second Piola-Kirchhoff stress.
    pub s: SymTensor3,
    /// Kirchhoff stress.
    pub tau: SymTensor3,
    /// Cauchy stress.
    pub sigma: SymTensor3,
    /// Material tangent `2 ∂S/∂C`.
    pub c_mat: Tensor4V,
    /// Spatial tangent, when requested.
    pub c_spat: Option<Tensor4V>,
    pub log_space: LogSpaceResponse,
}

#[derive(Debug, Clone, Copy)]
pub struct ResponseOptions {
    pub tangent: bool,
    pub spatial: bool,
    /// Drop the `T : 𝕂` term (diagnostics only).
    pub include_k: bool,
}

impl Default for ResponseOptions {
    fn default() -> Self {
        Self {
            tangent: true,
            spatial: false,
            include_k: true,
        }
    }
}

pub fn full_response(model: &MaterialModel, f: &Mat3, fibers: &[StructuralTensor]) -> Result<StressState> {
    full_response_with(model, f, fibers, ResponseOptions::default())
}

pub fn full_response_with(
    model: &MaterialModel,
    f: &Mat3,
    fibers: &[StructuralTensor],
    opts: ResponseOptions,
) -> Result<StressState> {
    let state = DeformationState::from_f(f)?;
    response_at(model, &state, fibers, opts)
}

pub fn response_at(
    model: &MaterialModel,
    state: &DeformationState,
    fibers: &[StructuralTensor],
    opts: ResponseOptions,
) -> Result<StressState> {
    let order = if opts.tangent { Order::Hessian } else { Order::Gradient };
    let ls = evaluate_with(model, state, fibers, order)?;
    let p_h = projection_ph(&state.spectral_c).p_h;
    let s = p_h.contract_left(&ls.stress_h);
    let f = state.f;
    let tau = SymTensor3::from_matrix(&(f * s.to_matrix() * f.transpose()));
    let sigma = tau * (1.0 / state.j);
    let mut c_mat = Tensor4V::zeros();
    let mut c_spat = None;
    if opts.tangent {
        c_mat = p_h.compose(&ls.tangent_h).compose(&p_h);
        if opts.include_k {
            c_mat += contract_k(&ls.stress_h, &state.spectral_c);
        }
        c_mat.has_major_symmetry = true;
        if opts.spatial {
            c_spat = Some(c_mat.push_forward(&f));
        }
    }
    Ok(StressState {
        energy: ls.energy,
        s,
        tau,
        sigma,
        c_mat,
        c_spat,
        log_space: ls,
    })
}

/// `ℂ` at `C = 1` as a 6×6 Voigt matrix.
pub fn reference_tangent_voigt(model: &MaterialModel, fibers: &[StructuralTensor]) -> Result<Tensor4V> {
    Ok(full_response(model, &Mat3::identity(), fibers)?.c_mat)
}

/// True when every Voigt eigenvalue exceeds `1e-10` times the largest one.
pub fn is_positive_definite(t: &Tensor4V) -> bool {
    let ev = t.voigt_eigenvalues();
    ev[5] > 0.0 && ev[0] > 1e-10 * ev[5]
}

/// Engineering constants of a transversely isotropic reference tangent with
/// the preferred direction along the third axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiConstants {
    pub mu_l: f64,
    pub mu_t: f64,
    pub lambda: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl TiConstants {
    pub fn to_params(&self) -> TiParams {
        TiParams::from_lame(self.lambda, self.mu_t, self.alpha, self.beta, self.mu_l)
    }

    pub fn from_params(p: &TiParams) -> Self {
        Self {
            mu_l: p.mu_l,
            mu_t: p.mu_t,
            lambda: p.lambda(),
            alpha: p.alpha,
            beta: p.beta,
        }
    }
}

/// Reference tangent of the transversely isotropic energies for `M = e3⊗e3`.
pub fn ti_assemble(c: &TiConstants) -> Tensor4V {
    let mut m = [[0.0; 6]; 6];
    let d = c.lambda + 2.0 * c.mu_t;
    let off = c.lambda + c.alpha;
    m[0][0] = d;
    m[1][1] = d;
    m[0][1] = c.lambda;
    m[1][0] = c.lambda;
    m[0][2] = off;
    m[2][0] = off;
    m[1][2] = off;
    m[2][1] = off;
    m[2][2] = c.lambda + 2.0 * c.alpha + c.beta + 4.0 * c.mu_l - 2.0 * c.mu_t;
    m[3][3] = c.mu_t;
    m[4][4] = c.mu_l;
    m[5][5] = c.mu_l;
    Tensor4V::from_rows(m)
}

fn pattern_check(cv: &Tensor4V, expected_zero: &[(usize, usize)], equal: &[(f64, f64, usize, usize)]) -> Result<()> {
    let tol = 1e-8 * cv.max_abs().max(1.0);
    for &(a, b) in expected_zero {
        let v = cv.get(a, b);
        if v.abs() > tol {
            return Err(Error::PatternViolation {
                row: a + 1,
                col: b + 1,
                deviation: v,
            });
        }
    }
    for &(x, y, a, b) in equal {
        if (x - y).abs() > tol {
            return Err(Error::PatternViolation {
                row: a + 1,
                col: b + 1,
                deviation: x - y,
            });
        }
    }
    Ok(())
}

/// Inverse of [`ti_assemble`]; checks the transversely isotropic pattern first.
pub fn ti_identify(cv: &Tensor4V) -> Result<TiConstants> {
    let m = |a, b| cv.get(a, b);
    let zeros: Vec<(usize, usize)> = (0..6)
        .flat_map(|a| (0..6).map(move |b| (a, b)))
        .filter(|&(a, b)| a != b && !(a < 3 && b < 3))
        .collect();
    pattern_check(
        cv,
        &zeros,
        &[
            (m(0, 0), m(1, 1), 1, 1),
            (m(0, 2), m(1, 2), 1, 2),
            (m(0, 1), m(1, 0), 1, 0),
            (m(0, 2), m(2, 0), 2, 0),
            (m(1, 2), m(2, 1), 2, 1),
            (m(3, 3), 0.5 * (m(0, 0) - m(0, 1)), 3, 3),
            (m(4, 4), m(5, 5), 5, 5),
        ],
    )?;
    Ok(TiConstants {
        mu_l: m(4, 4),
        mu_t: 0.5 * (m(0, 0) - m(0, 1)),
        lambda: m(0, 1),
        alpha: m(0, 2) - m(0, 1),
        beta: m(0, 0) + m(2, 2) - 2.0 * m(0, 2) - 4.0 * m(4, 4),
    })
}

/// Engineering constants of an orthotropic reference tangent with
/// `M1 = e1⊗e1`, `M2 = e2⊗e2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthoConstants {
    pub mu: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub lambda: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
}

impl OrthoConstants {
    pub fn to_params(&self) -> OrthoParams {
        OrthoParams {
            mu: self.mu,
            kappa: self.lambda + 2.0 * self.mu / 3.0,
            alpha1: self.alpha1,
            alpha2: self.alpha2,
            mu1: self.mu1,
            mu2: self.mu2,
            beta1: self.beta1,
            beta2: self.beta2,
            beta3: self.beta3,
        }
    }

    pub fn from_params(p: &OrthoParams) -> Self {
        Self {
            mu: p.mu,
            mu1: p.mu1,
            mu2: p.mu2,
            lambda: p.lambda(),
            alpha1: p.alpha1,
            alpha2: p.alpha2,
            beta1: p.beta1,
            beta2: p.beta2,
            beta3: p.beta3,
        }
    }
}

/// Reference tangent of the orthotropic energies. The coupling entry carries
/// `½β3`, which is what the energy's `½β3⟨M1,log U⟩⟨M2,log U⟩` term produces.
pub fn ortho_assemble(c: &OrthoConstants) -> Tensor4V {
    let mut m = [[0.0; 6]; 6];
    let l = c.lambda;
    m[0][0] = 2.0 * c.mu + l + 2.0 * c.alpha1 + 4.0 * c.mu1 + c.beta1;
    m[1][1] = 2.0 * c.mu + l + 2.0 * c.alpha2 + 4.0 * c.mu2 + c.beta2;
    m[2][2] = 2.0 * c.mu + l;
    m[0][1] = l + c.alpha1 + c.alpha2 + 0.5 * c.beta3;
    m[0][2] = l + c.alpha1;
    m[1][2] = l + c.alpha2;
    m[1][0] = m[0][1];
    m[2][0] = m[0][2];
    m[2][1] = m[1][2];
    m[3][3] = c.mu + c.mu1 + c.mu2;
    m[4][4] = c.mu + c.mu2;
    m[5][5] = c.mu + c.mu1;
    Tensor4V::from_rows(m)
}

/// Inverse of [`ortho_assemble`]; checks the orthotropic pattern first.
pub fn ortho_identify(cv: &Tensor4V) -> Result<OrthoConstants> {
    let m = |a, b| cv.get(a, b);
    let zeros: Vec<(usize, usize)> = (0..6)
        .flat_map(|a| (0..6).map(move |b| (a, b)))
        .filter(|&(a, b)| a != b && !(a < 3 && b < 3))
        .collect();
    pattern_check(
        cv,
        &zeros,
        &[
            (m(0, 1), m(1, 0), 1, 0),
            (m(0, 2), m(2, 0), 2, 0),
            (m(1, 2), m(2, 1), 2, 1),
        ],
    )?;
    let mu = m(4, 4) + m(5, 5) - m(3, 3);
    let mu1 = m(3, 3) - m(4, 4);
    let mu2 = m(3, 3) - m(5, 5);
    let lambda = m(2, 2) - 2.0 * mu;
    let alpha1 = m(0, 2) - lambda;
    let alpha2 = m(1, 2) - lambda;
    Ok(OrthoConstants {
        mu,
        mu1,
        mu2,
        lambda,
        alpha1,
        alpha2,
        beta1: m(0, 0) - 2.0 * mu - lambda - 2.0 * alpha1 - 4.0 * mu1,
        beta2: m(1, 1) - 2.0 * mu - lambda - 2.0 * alpha2 - 4.0 * mu2,
        beta3: 2.0 * (m(0, 1) - lambda - alpha1 - alpha2),
    })
}

/// Residuals of the conjugate stress relations for an isotropic model.
#[derive(Debug, Clone, Copy)]
pub struct ConjugateReport {
    /// `‖τ − R (∂ψ/∂log U) Rᵀ‖`, relative.
    pub tau_residual: f64,
    /// `‖½(SU + US) − ∂ψ/∂U‖` with a finite-difference `∂ψ/∂U`, relative.
    pub biot_residual: f64,
}

pub fn conjugate_stress_check(model: &MaterialModel, f: &Mat3) -> Result<ConjugateReport> {
    if !model.is_isotropic() {
        return Err(Error::InvalidModel(format!(
            "conjugate stress relations need an isotropic model, got {}",
            model.name()
        )));
    }
    let state = DeformationState::from_f(f)?;
    let resp = response_at(
        model,
        &state,
        &[],
        ResponseOptions {
            tangent: false,
            ..Default::default()
        },
    )?;
    let floor = 1e-3 * model.stiffness_scale();

    let r = state.rotation();
    let rotated = SymTensor3::from_matrix(&(r * resp.log_space.stress_h.to_matrix() * r.transpose()));
    let tau_residual = (resp.tau - rotated).norm() / resp.tau.norm().max(floor);

    let u = state.u;
    let biot = SymTensor3::from_matrix(&((resp.s.matmul(&u) + u.matmul(&resp.s)) * 0.5));
    let psi = |du: &SymTensor3, h: f64| -> Result<f64> {
        let s = DeformationState::from_stretch(&(u + *du * h))?;
        Ok(evaluate(model, &s, &[])?.energy)
    };
    let h = 1e-4;
    let mut err = 0.0f64;
    for &(i, j) in VOIGT_PAIRS.iter() {
        let mut d = Mat3::zeros();
        d[(i, j)] = 1.0;
        d[(j, i)] = 1.0;
        let du = SymTensor3::from_matrix(&d);
        let fd = (-psi(&du, 2.0 * h)? + 8.0 * psi(&du, h)? - 8.0 * psi(&du, -h)? + psi(&du, -2.0 * h)?) / (12.0 * h);
        err = err.max((fd - biot.dot(&du)).abs());
    }
    let biot_residual = err / biot.norm().max(floor);
    Ok(ConjugateReport {
        tau_residual,
        biot_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set5_closed_form() {
        let c = TiConstants {
            mu_l: 2.5,
            mu_t: 2.5,
            lambda: 5.5,
            alpha: 0.0,
            beta: 104.5,
        };
        let t = ti_assemble(&c);
        assert_eq!(t.get(0, 0), 10.5);
        assert_eq!(t.get(2, 2), 115.0);
        let back = ti_identify(&t).unwrap();
        assert!((back.beta - 104.5).abs() < 1e-12);
    }

    #[test]
    fn pattern_violation_reported() {
        let mut rows = [[0.0; 6]; 6];
        for (a, r) in rows.iter_mut().enumerate() {
            r[a] = 1.0;
        }
        rows[0][4] = 0.3;
        assert!(matches!(
            ti_identify(&Tensor4V::from_rows(rows)),
            Err(Error::PatternViolation { .. })
        ));
    }

    #[test]
    fn ortho_round_trip() {
        let c = OrthoConstants {
            mu: 2.0,
            mu1: 1.0,
            mu2: 0.5,
            lambda: 3.0,
            alpha1: 0.0,
            alpha2: 0.0,
            beta1: 0.0,
            beta2: 0.0,
            beta3: 0.0,
        };
        assert_eq!(ortho_identify(&ortho_assemble(&c)).unwrap(), c);
    }
}
