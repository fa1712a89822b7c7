//! Scalar functions of `log U` carried together with their gradient and
//! Hessian. Energies are built by composing these, which gives the log-space
//! stress and tangent without hand-derived formulas per model.

use crate::divdiff::ScalarFunction;
use crate::spectral_calculus::{spectral_gradient, spectral_hessian};
use crate::tensor::{Mat3, SymTensor3, Tensor4V};

/// How many derivatives to carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    /// Value and gradient only; Hessians stay zero.
    Gradient,
    Hessian,
}

/// `log U` in spectral form, shared by every jet of one evaluation.
pub(crate) struct LogContext {
    pub e: [f64; 3],
    pub q: Mat3,
    pub log_u: SymTensor3,
    pub order: Order,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Jet {
    pub v: f64,
    pub g: SymTensor3,
    pub h: Tensor4V,
}

impl Jet {
    pub fn constant(v: f64) -> Self {
        Self {
            v,
            g: SymTensor3::zero(),
            h: Tensor4V::zeros(),
        }
    }

    /// `tr log U`.
    pub fn trace(ctx: &LogContext) -> Self {
        Self {
            v: ctx.log_u.trace(),
            g: SymTensor3::identity(),
            h: Tensor4V::zeros(),
        }
    }

    /// `‖dev log U‖²`.
    pub fn dev_norm_sq(ctx: &LogContext) -> Self {
        let dev = ctx.log_u.deviator();
        let h = match ctx.order {
            Order::Hessian => Tensor4V::dev_projector() * 2.0,
            Order::Gradient => Tensor4V::zeros(),
        };
        Self {
            v: dev.norm_squared(),
            g: dev * 2.0,
            h,
        }
    }

    /// `⟨log U, M⟩`.
    pub fn linear(ctx: &LogContext, m: &SymTensor3) -> Self {
        Self {
            v: ctx.log_u.dot(m),
            g: *m,
            h: Tensor4V::zeros(),
        }
    }

    /// `⟨f(log U), M⟩` for a spectral tensor function `f`.
    pub fn spectral(ctx: &LogContext, f: &impl ScalarFunction, m: &SymTensor3) -> Self {
        let ml = ctx.q.transpose() * m.to_matrix() * ctx.q;
        let v = (0..3).map(|k| f.value(ctx.e[k]) * ml[(k, k)]).sum();
        let h = match ctx.order {
            Order::Hessian => spectral_hessian(f, &ctx.e, &ctx.q, m),
            Order::Gradient => Tensor4V::zeros(),
        };
        Self {
            v,
            g: spectral_gradient(f, &ctx.e, &ctx.q, m),
            h,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self {
            v: self.v + o.v,
            g: self.g + o.g,
            h: self.h + o.h,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            v: self.v * s,
            g: self.g * s,
            h: self.h * s,
        }
    }

    pub fn offset(&self, c: f64) -> Self {
        Self { v: self.v + c, ..*self }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let h = self.h * o.v
            + o.h * self.v
            + Tensor4V::outer(&self.g, &o.g)
            + Tensor4V::outer(&o.g, &self.g);
        Self {
            v: self.v * o.v,
            g: self.g * o.v + o.g * self.v,
            h,
        }
    }

    /// Composition `φ(self)` given `φ`, `φ'`, `φ''` at `self.v`.
    pub fn map(&self, f0: f64, f1: f64, f2: f64) -> Self {
        Self {
            v: f0,
            g: self.g * f1,
            h: self.h * f1 + Tensor4V::outer(&self.g, &self.g) * f2,
        }
    }

    pub fn square(&self) -> Self {
        self.map(self.v * self.v, 2.0 * self.v, 2.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divdiff::Power;
    use crate::tensor::spectral_decompose_any;

    fn ctx(log_u: SymTensor3) -> LogContext {
        let s = spectral_decompose_any(&log_u);
        LogContext {
            e: s.eigenvalues,
            q: s.vectors,
            log_u,
            order: Order::Hessian,
        }
    }

    #[test]
    fn product_rule_matches_square() {
        let c = ctx(SymTensor3::from_components([0.2, -0.1, 0.05, 0.03, 0.0, -0.02]));
        let t = Jet::trace(&c).add(&Jet::linear(&c, &SymTensor3::diag(0.0, 1.0, 0.0)));
        let a = t.mul(&t);
        let b = t.square();
        assert!((a.v - b.v).abs() < 1e-15);
        assert!((a.g - b.g).max_abs() < 1e-15);
        assert!((a.h.matrix() - b.h.matrix()).abs().max() < 1e-15);
    }

    #[test]
    fn spectral_power_two_value() {
        let e = SymTensor3::from_components([0.2, -0.1, 0.05, 0.03, 0.01, -0.02]);
        let m = SymTensor3::diag(1.0, 0.0, 0.0);
        let j = Jet::spectral(&ctx(e), &Power(2), &m);
        let e2 = e.matmul(&e);
        assert!((j.v - e2[(0, 0)]).abs() < 1e-15);
        // ∂⟨E², M⟩/∂E = ME + EM
        let g = SymTensor3::from_matrix(&(m.matmul(&e) + e.matmul(&m)));
        assert!((j.g - g).max_abs() < 1e-14);
    }
}
