//! Finite-difference check of stress and tangent at random states for a
//! composite with two fiber families.

use hencky::energy::{FiberPart, MaterialModel};
use hencky::kinematics::{FiberPlane, StructuralTensor};
use hencky::verify::fd_check_suite;

fn main() -> hencky::error::Result<()> {
    let model = MaterialModel::Composite {
        iso: Box::new(MaterialModel::IsoExpHencky { mu: 3.0, kappa: 20.0, k: 2.0, k_hat: 1.5 }),
        fibers: vec![
            FiberPart {
                model: MaterialModel::FiberH { mu1: 4.0, k1: 2.0, i: 3, eps: 0.1, switch: false },
                fiber: StructuralTensor::from_angle(30.0, FiberPlane::Xy),
            },
            FiberPart {
                model: MaterialModel::FiberC { mu1: 1.0, k1: 0.5, i: 2, switch: true },
                fiber: StructuralTensor::from_angle(-30.0, FiberPlane::Xy),
            },
        ],
    };
    let report = fd_check_suite(&model, &[], 40, 0.3, 7)?;
    println!("seed {} h {:e}: {} of {} states checked", report.seed, report.step, report.checked(), report.samples.len());
    println!("max stress error  {:.2e}", report.max_stress_error());
    println!("max tangent error {:.2e}", report.max_tangent_error());
    report.write_csv(std::io::stdout().lock())
}
