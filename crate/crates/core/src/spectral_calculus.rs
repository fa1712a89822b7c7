//! Derivatives of `log U = ½ log C` with respect to `C`.
//!
//! All tensors are assembled in the eigenbasis of the argument and rotated
//! back. For a spectral tensor function `f(X) = Σ f(x_k) N_k⊗N_k` the first
//! derivative has eigenbasis components `f[x_a, x_b]` and the second
//! derivative, contracted with a symmetric `T`, is the bilinear form
//!
//! ```text
//! B(H, K) = Σ_{i,m,j} T_ij f[x_i, x_m, x_j] (H_im K_mj + K_im H_mj)
//! ```
//!
//! with `f[·,·]`, `f[·,·,·]` the divided differences from [`crate::divdiff`].

use crate::divdiff::{HalfLog, ScalarFunction};
use crate::error::{Error, Result};
use crate::tensor::{kronecker_box, Full4, Mat3, Spectral, SymTensor3, Tensor4V};

/// `P_H = 2 ∂log U/∂C` together with the decomposition it was built from.
#[derive(Debug, Clone, Copy)]
pub struct LogDerivatives {
    pub p_h: Tensor4V,
    pub spectral: Spectral,
}

/// Fourth-order derivative `∂f(X)/∂X`.
pub(crate) fn spectral_first_derivative(f: &impl ScalarFunction, x: &[f64; 3], q: &Mat3) -> Tensor4V {
    let mut d: Full4 = [[[[0.0; 3]; 3]; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            let v = 0.5 * f.d1(x[a], x[b]);
            d[a][b][a][b] += v;
            d[a][b][b][a] += v;
        }
    }
    let mut t = Tensor4V::from_full(&crate::tensor::rotate_full(&d, q));
    t.has_major_symmetry = true;
    t
}

/// Gradient of the scalar `⟨f(X), T⟩` with respect to `X`.
pub(crate) fn spectral_gradient(f: &impl ScalarFunction, x: &[f64; 3], q: &Mat3, t: &SymTensor3) -> SymTensor3 {
    let tl = q.transpose() * t.to_matrix() * q;
    let g = Mat3::from_fn(|a, b| f.d1(x[a], x[b]) * tl[(a, b)]);
    SymTensor3::from_matrix(&(q * g * q.transpose()))
}

/// Hessian of the scalar `⟨f(X), T⟩` with respect to `X`.
pub(crate) fn spectral_hessian(f: &impl ScalarFunction, x: &[f64; 3], q: &Mat3, t: &SymTensor3) -> Tensor4V {
    let tl = q.transpose() * t.to_matrix() * q;
    let mut h: Full4 = [[[[0.0; 3]; 3]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            if tl[(i, j)] == 0.0 {
                continue;
            }
            for m in 0..3 {
                let w = tl[(i, j)] * f.d2(x[i], x[m], x[j]);
                // H_im K_mj  and  K_im H_mj
                h[i][m][m][j] += w;
                h[m][j][i][m] += w;
            }
        }
    }
    let mut out = Tensor4V::from_full(&crate::tensor::rotate_full(&h, q));
    out.has_major_symmetry = true;
    out
}

/// Assembles `P_H` from the decomposition of `C`. Coalesced eigenvalue pairs
/// use the limit `(2λ)⁻¹` of the off-diagonal coefficient.
pub fn projection_ph(spectral: &Spectral) -> LogDerivatives {
    let p_h = spectral_first_derivative(&HalfLog, &spectral.eigenvalues, &spectral.vectors) * 2.0;
    LogDerivatives {
        p_h,
        spectral: *spectral,
    }
}

/// Off-diagonal coefficient of `P_H` for eigenvalue pair `(k, j)`:
/// `(½ log λ_k − ½ log λ_j)/(λ_k − λ_j)`, or its limit.
pub fn ph_pair_coefficient(spectral: &Spectral, k: usize, j: usize) -> f64 {
    let (lk, lj) = (spectral.eigenvalues[k], spectral.eigenvalues[j]);
    if spectral.multiplicity.pairs(k, j) {
        1.0 / (lk + lj)
    } else {
        HalfLog.d1(lk, lj)
    }
}

/// `∂P_k/∂C = Σ_{j≠k} (P_k⊠P_j + P_j⊠P_k)/(λ_k − λ_j)`.
pub fn eigenprojection_derivative(spectral: &Spectral, k: usize) -> Result<Tensor4V> {
    if spectral.multiplicity.is_repeated(k) {
        return Err(Error::CoalescedEigenvalue { index: k });
    }
    let pk = &spectral.projections[k];
    let mut out = Tensor4V::zeros();
    for j in (0..3).filter(|&j| j != k) {
        let pj = &spectral.projections[j];
        let gap = spectral.eigenvalues[k] - spectral.eigenvalues[j];
        out += (kronecker_box(pk, pj) + kronecker_box(pj, pk)) * (1.0 / gap);
    }
    out.has_major_symmetry = true;
    Ok(out)
}

/// Contraction `T : 𝕂` with `𝕂 = 2 ∂P_H/∂C = 4 ∂²log U/∂C∂C`, returned as a
/// fourth-order tensor without forming `𝕂`.
pub fn contract_k(t: &SymTensor3, spectral: &Spectral) -> Tensor4V {
    spectral_hessian(&HalfLog, &spectral.eigenvalues, &spectral.vectors, t) * 4.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{spectral_decompose, sym_log};

    #[test]
    fn identity_gives_sym_identity() {
        let s = spectral_decompose(&SymTensor3::identity()).unwrap();
        let d = projection_ph(&s);
        assert!((d.p_h.matrix() - Tensor4V::sym_identity().matrix()).abs().max() < 1e-12);
    }

    #[test]
    fn pair_coefficient_by_hand() {
        let s = spectral_decompose(&SymTensor3::diag(4.0, 1.0, 0.25)).unwrap();
        let c = ph_pair_coefficient(&s, 0, 1);
        assert!((c - 0.231_049_060_186_648_4).abs() < 1e-15);
        // P_H component (12,12) = 2 · ½ · coefficient in the eigen frame
        assert!((projection_ph(&s).p_h.get(3, 3) - c).abs() < 1e-15);
        assert!((projection_ph(&s).p_h.get(0, 0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn trace_function_closed_form() {
        let c = 2.5;
        let s = spectral_decompose(&(SymTensor3::identity() * c)).unwrap();
        let k = contract_k(&SymTensor3::identity(), &s);
        let expect = Tensor4V::sym_identity() * (-2.0 / (c * c));
        assert!((k.matrix() - expect.matrix()).abs().max() < 1e-14);
        assert_eq!(contract_k(&SymTensor3::zero(), &s), Tensor4V::zeros());
    }

    #[test]
    fn coalesced_projection_derivative_rejected() {
        let s = spectral_decompose(&SymTensor3::diag(2.0, 1.0, 1.0 + 1e-12)).unwrap();
        assert!(matches!(
            eigenprojection_derivative(&s, 1),
            Err(Error::CoalescedEigenvalue { index: 1 })
        ));
        assert!(eigenprojection_derivative(&s, 0).is_ok());
    }

    #[test]
    fn ph_matches_finite_difference_of_log() {
        let c = SymTensor3::from_components([2.0, 1.3, 0.8, 0.3, -0.2, 0.1]);
        let dc = SymTensor3::from_components([0.3, -0.1, 0.2, 0.15, 0.05, -0.25]);
        let s = spectral_decompose(&c).unwrap();
        let ph = projection_ph(&s).p_h;
        let h = 1e-6 * c.norm();
        let fd = (sym_log(&(c + dc * h), true).unwrap() - sym_log(&(c - dc * h), true).unwrap()) * (1.0 / h);
        let an = ph.contract(&dc);
        assert!((an - fd).norm() < 1e-8 * an.norm());
    }
}
