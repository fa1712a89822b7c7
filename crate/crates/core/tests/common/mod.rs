#![allow(dead_code)]

use hencky::energy::{FiberPart, MaterialModel, OrthoParams, TiParams};
use hencky::kinematics::StructuralTensor;
use hencky::lab::TwoFiberSetup;
use hencky::tensor::{Mat3, SymTensor3, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn unit(r: &mut impl Rng) -> Vec3 {
    loop {
        let v = Vec3::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 0.2 && n < 1.0 {
            return v / n;
        }
    }
}

pub fn fiber(r: &mut impl Rng) -> StructuralTensor {
    StructuralTensor::from_direction(unit(r)).unwrap()
}

pub fn rotation(r: &mut impl Rng) -> Mat3 {
    let axis = unit(r);
    nalgebra::Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), r.gen_range(-3.0..3.0)).into_inner()
}

pub fn sym(r: &mut impl Rng, scale: f64) -> SymTensor3 {
    SymTensor3::from_components(std::array::from_fn(|_| r.gen_range(-scale..scale)))
}

/// Deformation gradient with moderate stretches and an arbitrary rotation.
pub fn deformation(r: &mut impl Rng, scale: f64) -> Mat3 {
    let e = sym(r, scale);
    let u = hencky::tensor::sym_exp(&e);
    rotation(r) * u.to_matrix()
}

/// One instance of every model variant with randomized parameters, together
/// with the fiber list it expects.
pub fn model_zoo(r: &mut impl Rng) -> Vec<(MaterialModel, Vec<StructuralTensor>)> {
    let mut u = |a: f64, b: f64| r.gen_range(a..b);
    let ti = TiParams {
        mu_t: u(1.0, 5.0),
        kappa: u(5.0, 20.0),
        alpha: u(-1.0, 1.0),
        beta: u(0.0, 10.0),
        mu_l: u(1.0, 8.0),
    };
    let ortho = OrthoParams {
        mu: u(1.0, 5.0),
        kappa: u(5.0, 20.0),
        alpha1: u(-1.0, 1.0),
        alpha2: u(-1.0, 1.0),
        mu1: u(0.0, 2.0),
        mu2: u(0.0, 2.0),
        beta1: u(0.0, 5.0),
        beta2: u(0.0, 5.0),
        beta3: u(-2.0, 2.0),
    };
    let ks5: [f64; 5] = std::array::from_fn(|_| u(0.3, 2.0));
    let ks9: [f64; 9] = std::array::from_fn(|_| u(0.3, 2.0));
    let iso = MaterialModel::IsoHencky {
        mu: u(1.0, 5.0),
        kappa: u(5.0, 20.0),
    };
    let exp = MaterialModel::IsoExpHencky {
        mu: u(1.0, 5.0),
        kappa: u(5.0, 20.0),
        k: u(0.4, 2.0),
        k_hat: u(0.2, 2.0),
    };
    let (mu1, k1) = (u(0.5, 3.0), u(0.5, 2.0));
    let i = r.gen_range(1..=4);
    let (a, b, c) = (fiber(r), fiber(r), fiber(r));
    let composite = MaterialModel::Composite {
        iso: Box::new(exp.clone()),
        fibers: vec![
            FiberPart {
                model: MaterialModel::FiberH {
                    mu1,
                    k1,
                    i: 2,
                    eps: 0.1,
                    switch: true,
                },
                fiber: a,
            },
            FiberPart {
                model: MaterialModel::FiberHgo { mu1, k1, switch: true },
                fiber: b,
            },
        ],
    };
    vec![
        (iso, vec![]),
        (exp, vec![]),
        (MaterialModel::TiHencky(ti), vec![a]),
        (MaterialModel::TiExpHencky { params: ti, k: ks5 }, vec![a]),
        (MaterialModel::OrthoHencky(ortho), vec![a, b]),
        (MaterialModel::OrthoExpHencky { params: ortho, k: ks9 }, vec![b, c]),
        (MaterialModel::FiberC { mu1, k1, i, switch: false }, vec![a]),
        (MaterialModel::FiberC { mu1, k1, i, switch: true }, vec![b]),
        (
            MaterialModel::FiberH {
                mu1,
                k1,
                i,
                eps: 0.0,
                switch: false,
            },
            vec![a],
        ),
        (
            MaterialModel::FiberH {
                mu1,
                k1,
                i,
                eps: 0.1,
                switch: true,
            },
            vec![c],
        ),
        (MaterialModel::FiberPolyC { mu1, k1: 4 }, vec![a]),
        (MaterialModel::FiberHgo { mu1, k1, switch: true }, vec![b]),
        (composite, vec![]),
    ]
}

/// Distance of every switch criterion in `model` from its boundary; FD
/// checks skip states that sit too close.
pub fn switch_margin(model: &MaterialModel, fibers: &[StructuralTensor], f: &Mat3) -> f64 {
    use hencky::kinematics::{mixed_invariant, DeformationState, InvariantFamily};
    let s = DeformationState::from_f(f).unwrap();
    let margin = |m: &MaterialModel, a: &StructuralTensor| -> f64 {
        match m {
            MaterialModel::FiberC { i, switch: true, .. } => {
                (mixed_invariant(&s, a, InvariantFamily::C, *i) - 1.0).abs()
            }
            MaterialModel::FiberHgo { switch: true, .. } => (mixed_invariant(&s, a, InvariantFamily::C, 1) - 1.0).abs(),
            MaterialModel::FiberH { switch: true, .. } => s.log_u.dot(&a.m).abs(),
            _ => f64::INFINITY,
        }
    };
    match model {
        MaterialModel::Composite { fibers: parts, .. } => {
            parts.iter().map(|p| margin(&p.model, &p.fiber)).fold(f64::INFINITY, f64::min)
        }
        m if m.is_fiber() => margin(m, &fibers[0]),
        _ => f64::INFINITY,
    }
}

pub fn rel_err(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / scale.max(1e-300)
}

/// Fitted arterial layers: 3 has a Hencky host, 4 an exponentiated one.
pub fn arterial_layer(model: u8) -> TwoFiberSetup {
    let fiber = |mu1, k1| MaterialModel::FiberH { mu1, k1, i: 2, eps: 0.1, switch: true };
    match model {
        3 => TwoFiberSetup {
            iso: MaterialModel::IsoHencky { mu: 31.16, kappa: 31.16e3 },
            fiber: fiber(1204.86, 1599.53),
            beta_deg: 41.24,
        },
        _ => TwoFiberSetup {
            iso: MaterialModel::IsoExpHencky { mu: 31.16, kappa: 31.16e3, k: 3.38, k_hat: 1.0 },
            fiber: fiber(726.09, 1848.66),
            beta_deg: 40.68,
        },
    }
}

/// Golden-section minimizer of a unimodal `f` on `[a, b]`.
pub fn golden(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut c, mut d) = (b - g * (b - a), a + g * (b - a));
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-11 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}
