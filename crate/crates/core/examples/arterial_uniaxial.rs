//! Incompressible uniaxial tests on a two-fiber arterial layer in the
//! circumferential and axial directions.

use hencky::energy::MaterialModel;
use hencky::lab::{linspace, uniaxial_two_fiber, LoadDirection, NewtonOptions, TwoFiberSetup};

fn main() {
    let setup = TwoFiberSetup {
        iso: MaterialModel::IsoHencky { mu: 31.16, kappa: 31160.0 },
        fiber: MaterialModel::FiberH { mu1: 1204.86, k1: 1599.53, i: 2, eps: 0.1, switch: true },
        beta_deg: 41.24,
    };
    let stretches = linspace(1.0, 1.12, 12);
    for dir in [LoadDirection::Circumferential, LoadDirection::Axial] {
        println!("{dir:?}");
        println!("{:>8} {:>10} {:>12} {:>6}", "lambda1", "lambda2", "sigma11 kPa", "iters");
        let model = setup.composite(dir);
        for r in uniaxial_two_fiber(&model, &stretches, NewtonOptions::default()) {
            match r {
                Ok(p) => println!("{:8.4} {:10.6} {:12.4} {:6}", p.lambda1, p.lambda2, p.sigma11, p.residuals.len() - 1),
                Err(e) => println!("  failed: {e}"),
            }
        }
    }
}
