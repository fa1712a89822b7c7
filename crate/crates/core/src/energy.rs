//! Strain energy densities in terms of `log U` and their first and second
//! derivatives (log-space stress and tangent).

use serde::{Deserialize, Serialize};

use crate::divdiff::{Power, ScaledExp};
use crate::error::{Error, Result};
use crate::jet::{Jet, LogContext, Order};
use crate::kinematics::{DeformationState, StructuralTensor};
use crate::tensor::{SymTensor3, Tensor4V};

/// Below this the `ε`-power factor of the H-family fiber energy is frozen.
pub const EPS_FLOOR: f64 = 1e-12;

/// Largest exponent accepted by the exponential terms.
pub const MAX_EXP_ARGUMENT: f64 = 700.0;

fn one() -> f64 {
    1.0
}

fn default_eps() -> f64 {
    0.1
}

fn yes() -> bool {
    true
}

/// Raw transversely isotropic moduli as written in a config: either `kappa`
/// or the Lamé constant `lambda` may be given.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct TiParamsRaw {
    mu_t: f64,
    kappa: Option<f64>,
    lambda: Option<f64>,
    #[serde(default)]
    alpha: f64,
    #[serde(default)]
    beta: f64,
    mu_l: f64,
}

/// Moduli of the transversely isotropic Hencky energies (kPa).
#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(try_from = "TiParamsRaw")]
pub struct TiParams {
    pub mu_t: f64,
    pub kappa: f64,
    pub alpha: f64,
    pub beta: f64,
    pub mu_l: f64,
}

impl TiParams {
    /// From `λ = κ − 2μ_T/3`.
    pub fn from_lame(lambda: f64, mu_t: f64, alpha: f64, beta: f64, mu_l: f64) -> Self {
        Self {
            mu_t,
            kappa: lambda + 2.0 * mu_t / 3.0,
            alpha,
            beta,
            mu_l,
        }
    }

    pub fn lambda(&self) -> f64 {
        self.kappa - 2.0 * self.mu_t / 3.0
    }
}

impl TryFrom<TiParamsRaw> for TiParams {
    type Error = Error;

    fn try_from(r: TiParamsRaw) -> Result<Self> {
        match (r.kappa, r.lambda) {
            (Some(kappa), None) => Ok(Self {
                mu_t: r.mu_t,
                kappa,
                alpha: r.alpha,
                beta: r.beta,
                mu_l: r.mu_l,
            }),
            (None, Some(l)) => Ok(Self::from_lame(l, r.mu_t, r.alpha, r.beta, r.mu_l)),
            _ => Err(Error::Config("give exactly one of `kappa` and `lambda`".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct OrthoParamsRaw {
    mu: f64,
    kappa: Option<f64>,
    lambda: Option<f64>,
    #[serde(default)]
    alpha1: f64,
    #[serde(default)]
    alpha2: f64,
    #[serde(default)]
    mu1: f64,
    #[serde(default)]
    mu2: f64,
    #[serde(default)]
    beta1: f64,
    #[serde(default)]
    beta2: f64,
    #[serde(default)]
    beta3: f64,
}

/// Moduli of the orthotropic Hencky energies (kPa).
#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(try_from = "OrthoParamsRaw")]
pub struct OrthoParams {
    pub mu: f64,
    pub kappa: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
}

impl OrthoParams {
    pub fn lambda(&self) -> f64 {
        self.kappa - 2.0 * self.mu / 3.0
    }
}

impl TryFrom<OrthoParamsRaw> for OrthoParams {
    type Error = Error;

    fn try_from(r: OrthoParamsRaw) -> Result<Self> {
        let kappa = match (r.kappa, r.lambda) {
            (Some(k), None) => k,
            (None, Some(l)) => l + 2.0 * r.mu / 3.0,
            _ => return Err(Error::Config("give exactly one of `kappa` and `lambda`".into())),
        };
        Ok(Self {
            mu: r.mu,
            kappa,
            alpha1: r.alpha1,
            alpha2: r.alpha2,
            mu1: r.mu1,
            mu2: r.mu2,
            beta1: r.beta1,
            beta2: r.beta2,
            beta3: r.beta3,
        })
    }
}

/// One fiber family of a composite.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FiberPart {
    pub model: MaterialModel,
    pub fiber: StructuralTensor,
}

/// Energy families. Moduli in kPa, `k` parameters dimensionless.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MaterialModel {
    /// `μ‖dev log U‖² + κ/2 (tr log U)²`
    IsoHencky { mu: f64, kappa: f64 },
    /// `μ/k e^{k‖dev log U‖²} + κ/(2k̂) e^{k̂ (tr log U)²}`
    IsoExpHencky {
        mu: f64,
        kappa: f64,
        k: f64,
        k_hat: f64,
    },
    TiHencky(TiParams),
    TiExpHencky {
        #[serde(flatten)]
        params: TiParams,
        #[serde(default = "ones5")]
        k: [f64; 5],
    },
    OrthoHencky(OrthoParams),
    OrthoExpHencky {
        #[serde(flatten)]
        params: OrthoParams,
        #[serde(default = "ones9")]
        k: [f64; 9],
    },
    /// `μ1/(2k1) {exp[k1 (⟨C^i,M⟩ − 1)²] − 1}`, optionally only for `⟨C^i,M⟩ ≥ 1`.
    FiberC { mu1: f64, k1: f64, i: u32, switch: bool },
    /// `μ1/(2k1) {exp[k1 ⟨(log U)^i,M⟩²] − 1}`; with the switch the exponent
    /// gains the factor `⟨log U,M⟩^ε` and the energy is zero for `⟨log U,M⟩ < 0`.
    FiberH {
        mu1: f64,
        k1: f64,
        i: u32,
        #[serde(default = "default_eps")]
        eps: f64,
        switch: bool,
    },
    /// `μ1/(2k1) (⟨C,M⟩ − 1)^k1` with even `k1`.
    FiberPolyC { mu1: f64, k1: u32 },
    /// The exponential fiber law on `⟨C,M⟩` with its tension switch.
    FiberHgo {
        mu1: f64,
        k1: f64,
        #[serde(default = "yes")]
        switch: bool,
    },
    /// Isotropic host plus a sum of fiber families with embedded directions.
    Composite { iso: Box<MaterialModel>, fibers: Vec<FiberPart> },
}

fn ones5() -> [f64; 5] {
    [one(); 5]
}

fn ones9() -> [f64; 9] {
    [one(); 9]
}

/// Which invariant decides whether a fiber carries load.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwitchCriterion {
    /// `⟨C^i, M⟩ ≥ 1`
    C,
    /// `⟨log U, M⟩ ≥ 0`
    H,
}

/// Energy, `∂ψ/∂log U` and `∂²ψ/∂log U∂log U`.
#[derive(Debug, Clone, Copy)]
pub struct LogSpaceResponse {
    pub energy: f64,
    pub stress_h: SymTensor3,
    pub tangent_h: Tensor4V,
}

impl MaterialModel {
    /// Number of structural tensors `evaluate` expects.
    pub fn arity(&self) -> usize {
        use MaterialModel::*;
        match self {
            IsoHencky { .. } | IsoExpHencky { .. } | Composite { .. } => 0,
            TiHencky(_) | TiExpHencky { .. } => 1,
            FiberC { .. } | FiberH { .. } | FiberPolyC { .. } | FiberHgo { .. } => 1,
            OrthoHencky(_) | OrthoExpHencky { .. } => 2,
        }
    }

    pub fn is_isotropic(&self) -> bool {
        matches!(self, MaterialModel::IsoHencky { .. } | MaterialModel::IsoExpHencky { .. })
    }

    pub fn is_fiber(&self) -> bool {
        use MaterialModel::*;
        matches!(self, FiberC { .. } | FiberH { .. } | FiberPolyC { .. } | FiberHgo { .. })
    }

    /// Short name used in reports.
    pub fn name(&self) -> &'static str {
        use MaterialModel::*;
        match self {
            IsoHencky { .. } => "iso_hencky",
            IsoExpHencky { .. } => "iso_exp_hencky",
            TiHencky(_) => "ti_hencky",
            TiExpHencky { .. } => "ti_exp_hencky",
            OrthoHencky(_) => "ortho_hencky",
            OrthoExpHencky { .. } => "ortho_exp_hencky",
            FiberC { .. } => "fiber_c",
            FiberH { .. } => "fiber_h",
            FiberPolyC { .. } => "fiber_poly_c",
            FiberHgo { .. } => "fiber_hgo",
            Composite { .. } => "composite",
        }
    }

    /// True for exponentiated Hencky parameters outside `k > 1/3, k̂ > 1/8`.
    pub fn polyconvexity_warning(&self) -> bool {
        match self {
            MaterialModel::IsoExpHencky { k, k_hat, .. } => *k <= 1.0 / 3.0 || *k_hat <= 0.125,
            MaterialModel::Composite { iso, .. } => iso.polyconvexity_warning(),
            _ => false,
        }
    }

    /// A modulus representative of the model's stiffness, used to scale
    /// tolerances.
    pub fn stiffness_scale(&self) -> f64 {
        use MaterialModel::*;
        match self {
            IsoHencky { mu, .. } | IsoExpHencky { mu, .. } => *mu,
            TiHencky(p) | TiExpHencky { params: p, .. } => p.mu_t.max(p.mu_l),
            OrthoHencky(p) | OrthoExpHencky { params: p, .. } => p.mu + p.mu1.abs() + p.mu2.abs(),
            FiberC { mu1, .. } | FiberH { mu1, .. } | FiberPolyC { mu1, .. } | FiberHgo { mu1, .. } => *mu1,
            Composite { iso, fibers } => {
                iso.stiffness_scale() + fibers.iter().map(|f| f.model.stiffness_scale()).sum::<f64>()
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        use MaterialModel::*;
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidModel(format!("{}: `{name}` must be positive, got {v}", self.name())))
            }
        };
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidModel(format!("{}: `{name}` is not finite", self.name())))
            }
        };
        let exponent = |i: u32| {
            if (1..=4).contains(&i) {
                Ok(())
            } else {
                Err(Error::InvalidModel(format!("{}: exponent i = {i} outside 1..4", self.name())))
            }
        };
        match self {
            IsoHencky { mu, kappa } => {
                positive("mu", *mu)?;
                positive("kappa", *kappa)
            }
            IsoExpHencky { mu, kappa, k, k_hat } => {
                positive("mu", *mu)?;
                positive("kappa", *kappa)?;
                positive("k", *k)?;
                positive("k_hat", *k_hat)
            }
            TiHencky(p) | TiExpHencky { params: p, .. } => {
                positive("mu_t", p.mu_t)?;
                positive("kappa", p.kappa)?;
                finite("alpha", p.alpha)?;
                finite("beta", p.beta)?;
                finite("mu_l", p.mu_l)?;
                if let TiExpHencky { k, .. } = self {
                    k.iter().try_for_each(|&v| positive("k", v))?;
                }
                Ok(())
            }
            OrthoHencky(p) | OrthoExpHencky { params: p, .. } => {
                positive("mu", p.mu)?;
                positive("kappa", p.kappa)?;
                for (n, v) in [
                    ("alpha1", p.alpha1),
                    ("alpha2", p.alpha2),
                    ("mu1", p.mu1),
                    ("mu2", p.mu2),
                    ("beta1", p.beta1),
                    ("beta2", p.beta2),
                    ("beta3", p.beta3),
                ] {
                    finite(n, v)?;
                }
                if let OrthoExpHencky { k, .. } = self {
                    k.iter().try_for_each(|&v| positive("k", v))?;
                }
                Ok(())
            }
            FiberC { mu1, k1, i, .. } => {
                positive("mu1", *mu1)?;
                positive("k1", *k1)?;
                exponent(*i)
            }
            FiberH { mu1, k1, i, eps, .. } => {
                positive("mu1", *mu1)?;
                positive("k1", *k1)?;
                exponent(*i)?;
                if *eps >= 0.0 && eps.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidModel(format!("fiber_h: eps must be >= 0, got {eps}")))
                }
            }
            FiberPolyC { mu1, k1 } => {
                positive("mu1", *mu1)?;
                if *k1 == 0 || k1 % 2 == 1 {
                    return Err(Error::InvalidModel(format!(
                        "fiber_poly_c: k1 must be an even positive integer, got {k1}"
                    )));
                }
                Ok(())
            }
            FiberHgo { mu1, k1, .. } => {
                positive("mu1", *mu1)?;
                positive("k1", *k1)
            }
            Composite { iso, fibers } => {
                if iso.arity() != 0 || matches!(**iso, Composite { .. }) {
                    return Err(Error::InvalidModel(format!(
                        "composite host must be a direction-free model, got {}",
                        iso.name()
                    )));
                }
                iso.validate()?;
                for f in fibers {
                    if !f.model.is_fiber() {
                        return Err(Error::InvalidModel(format!(
                            "composite fiber part must be a fiber model, got {}",
                            f.model.name()
                        )));
                    }
                    f.model.validate()?;
                }
                Ok(())
            }
        }
    }
}

/// Case distinction of the switched fiber energies.
pub fn fiber_switch(criterion: SwitchCriterion, state: &DeformationState, m: &StructuralTensor, i: u32) -> bool {
    use crate::kinematics::{mixed_invariant, InvariantFamily};
    match criterion {
        SwitchCriterion::C => mixed_invariant(state, m, InvariantFamily::C, i) >= 1.0,
        SwitchCriterion::H => state.log_u.dot(&m.m) >= 0.0,
    }
}

/// Energy, log-space stress and log-space tangent.
pub fn evaluate(model: &MaterialModel, state: &DeformationState, fibers: &[StructuralTensor]) -> Result<LogSpaceResponse> {
    evaluate_with(model, state, fibers, Order::Hessian)
}

/// As [`evaluate`]; with [`Order::Gradient`] the tangent is left zero.
pub fn evaluate_with(
    model: &MaterialModel,
    state: &DeformationState,
    fibers: &[StructuralTensor],
    order: Order,
) -> Result<LogSpaceResponse> {
    if fibers.len() != model.arity() {
        return Err(Error::ArityMismatch {
            expected: model.arity(),
            got: fibers.len(),
        });
    }
    let ctx = LogContext {
        e: state.log_eigenvalues(),
        q: state.spectral_c.vectors,
        log_u: state.log_u,
        order,
    };
    let j = energy_jet(model, &ctx, state, fibers)?;
    if !j.v.is_finite() {
        return Err(Error::NonFiniteEnergy {
            invariant: "energy",
            value: j.v,
            argument: f64::NAN,
        });
    }
    Ok(LogSpaceResponse {
        energy: j.v,
        stress_h: j.g,
        tangent_h: j.h,
    })
}

/// `(c/k) exp(k x)` with the overflow guard.
fn exp_term(c: f64, k: f64, x: &Jet, invariant: &'static str) -> Result<Jet> {
    let arg = k * x.v;
    if arg > MAX_EXP_ARGUMENT || !arg.is_finite() {
        return Err(Error::NonFiniteEnergy {
            invariant,
            value: x.v,
            argument: arg,
        });
    }
    let e = arg.exp();
    Ok(x.map(c / k * e, c * e, c * k * e))
}

/// `(c/k) (exp(k x) − 1)`, accurate for small `k x`.
fn exp_m1_term(c: f64, k: f64, x: &Jet, invariant: &'static str) -> Result<Jet> {
    let mut j = exp_term(c, k, x, invariant)?;
    j.v = c / k * (k * x.v).exp_m1();
    Ok(j)
}

fn iso_hencky(ctx: &LogContext, mu: f64, kappa: f64) -> Jet {
    Jet::dev_norm_sq(ctx)
        .scale(mu)
        .add(&Jet::trace(ctx).square().scale(0.5 * kappa))
}

fn energy_jet(
    model: &MaterialModel,
    ctx: &LogContext,
    state: &DeformationState,
    fibers: &[StructuralTensor],
) -> Result<Jet> {
    use MaterialModel::*;
    Ok(match model {
        IsoHencky { mu, kappa } => iso_hencky(ctx, *mu, *kappa),
        IsoExpHencky { mu, kappa, k, k_hat } => {
            let dev = exp_term(*mu, *k, &Jet::dev_norm_sq(ctx), "|dev log U|^2")?;
            let vol = exp_term(0.5 * kappa, *k_hat, &Jet::trace(ctx).square(), "(tr log U)^2")?;
            dev.add(&vol)
        }
        TiHencky(p) => {
            let m = &fibers[0].m;
            let lin = Jet::linear(ctx, m);
            let tr = Jet::trace(ctx);
            iso_hencky(ctx, p.mu_t, p.kappa)
                .add(&lin.mul(&tr).scale(p.alpha))
                .add(&Jet::spectral(ctx, &Power(2), m).scale(2.0 * (p.mu_l - p.mu_t)))
                .add(&lin.square().scale(0.5 * p.beta))
        }
        TiExpHencky { params: p, k } => {
            let m = &fibers[0].m;
            let lin = Jet::linear(ctx, m);
            let tr = Jet::trace(ctx);
            exp_term(p.mu_t, k[0], &Jet::dev_norm_sq(ctx), "|dev log U|^2")?
                .add(&exp_term(0.5 * p.kappa, k[1], &tr.square(), "(tr log U)^2")?)
                .add(&exp_term(p.alpha, k[2], &lin.mul(&tr), "I4H1 tr log U")?)
                .add(&exp_term(
                    2.0 * (p.mu_l - p.mu_t),
                    k[3],
                    &Jet::spectral(ctx, &Power(2), m),
                    "I4H2",
                )?)
                .add(&exp_term(0.5 * p.beta, k[4], &lin.square(), "I4H1^2")?)
        }
        OrthoHencky(p) => {
            let (m1, m2) = (&fibers[0].m, &fibers[1].m);
            let (l1, l2) = (Jet::linear(ctx, m1), Jet::linear(ctx, m2));
            let tr = Jet::trace(ctx);
            iso_hencky(ctx, p.mu, p.kappa)
                .add(&l1.mul(&tr).scale(p.alpha1))
                .add(&l2.mul(&tr).scale(p.alpha2))
                .add(&Jet::spectral(ctx, &Power(2), m1).scale(2.0 * p.mu1))
                .add(&Jet::spectral(ctx, &Power(2), m2).scale(2.0 * p.mu2))
                .add(&l1.square().scale(0.5 * p.beta1))
                .add(&l2.square().scale(0.5 * p.beta2))
                .add(&l1.mul(&l2).scale(0.5 * p.beta3))
        }
        OrthoExpHencky { params: p, k } => {
            let (m1, m2) = (&fibers[0].m, &fibers[1].m);
            let (l1, l2) = (Jet::linear(ctx, m1), Jet::linear(ctx, m2));
            let tr = Jet::trace(ctx);
            let terms = [
                exp_term(p.mu, k[0], &Jet::dev_norm_sq(ctx), "|dev log U|^2")?,
                exp_term(0.5 * p.kappa, k[1], &tr.square(), "(tr log U)^2")?,
                exp_term(p.alpha1, k[2], &l1.mul(&tr), "I4H1(M1) tr log U")?,
                exp_term(p.alpha2, k[3], &l2.mul(&tr), "I4H1(M2) tr log U")?,
                exp_term(2.0 * p.mu1, k[4], &Jet::spectral(ctx, &Power(2), m1), "I4H2(M1)")?,
                exp_term(2.0 * p.mu2, k[5], &Jet::spectral(ctx, &Power(2), m2), "I4H2(M2)")?,
                exp_term(0.5 * p.beta1, k[6], &l1.square(), "I4H1(M1)^2")?,
                exp_term(0.5 * p.beta2, k[7], &l2.square(), "I4H1(M2)^2")?,
                exp_term(0.5 * p.beta3, k[8], &l1.mul(&l2), "I4H1(M1) I4H1(M2)")?,
            ];
            terms.iter().fold(Jet::constant(0.0), |acc, t| acc.add(t))
        }
        FiberC { mu1, k1, i, switch } => fiber_c(ctx, state, &fibers[0], *mu1, *k1, *i, *switch)?,
        FiberHgo { mu1, k1, switch } => fiber_c(ctx, state, &fibers[0], *mu1, *k1, 1, *switch)?,
        FiberH {
            mu1,
            k1,
            i,
            eps,
            switch,
        } => {
            let a = &fibers[0];
            if *switch && !fiber_switch(SwitchCriterion::H, state, a, 1) {
                return Ok(Jet::constant(0.0));
            }
            let b = if *i == 1 {
                Jet::linear(ctx, &a.m)
            } else {
                Jet::spectral(ctx, &Power(*i), &a.m)
            };
            let mut g = b.square();
            if *switch && *eps > 0.0 {
                let lin = Jet::linear(ctx, &a.m);
                let factor = if lin.v > EPS_FLOOR {
                    let x = lin.v;
                    lin.map(x.powf(*eps), eps * x.powf(eps - 1.0), eps * (eps - 1.0) * x.powf(eps - 2.0))
                } else {
                    Jet::constant(EPS_FLOOR.powf(*eps))
                };
                g = factor.mul(&g);
            }
            exp_m1_term(0.5 * mu1, *k1, &g, "I4H")?
        }
        FiberPolyC { mu1, k1 } => {
            let x = Jet::spectral(ctx, &ScaledExp(2.0), &fibers[0].m).offset(-1.0);
            let n = *k1 as i32;
            let c = mu1 / (2.0 * *k1 as f64);
            let v = x.v;
            x.map(
                c * v.powi(n),
                c * n as f64 * v.powi(n - 1),
                c * (n * (n - 1)) as f64 * v.powi(n - 2),
            )
        }
        Composite { iso, fibers: parts } => {
            let mut acc = energy_jet(iso, ctx, state, &[])?;
            for part in parts {
                acc = acc.add(&energy_jet(&part.model, ctx, state, std::slice::from_ref(&part.fiber))?);
            }
            acc
        }
    })
}

fn fiber_c(
    ctx: &LogContext,
    state: &DeformationState,
    a: &StructuralTensor,
    mu1: f64,
    k1: f64,
    i: u32,
    switch: bool,
) -> Result<Jet> {
    if switch && !fiber_switch(SwitchCriterion::C, state, a, i) {
        return Ok(Jet::constant(0.0));
    }
    let x = Jet::spectral(ctx, &ScaledExp(2.0 * i as f64), &a.m).offset(-1.0);
    exp_m1_term(0.5 * mu1, k1, &x.square(), "(I4C - 1)^2")
}
