//! Reference tangent of a transversely isotropic Hencky energy and the
//! engineering constants recovered from it.
//!
//! ```text
//! cargo run --example reference_tangent
//! ```

use hencky::energy::{MaterialModel, TiParams};
use hencky::kinematics::StructuralTensor;
use hencky::stress::{is_positive_definite, reference_tangent_voigt, ti_identify};

fn main() -> hencky::error::Result<()> {
    let params = TiParams::from_lame(5.5, 2.5, 0.0, 104.5, 2.5);
    let model = MaterialModel::TiHencky(params);
    let fibers = [StructuralTensor::axis(2)];

    let c0 = reference_tangent_voigt(&model, &fibers)?;
    println!("C(1) in Voigt order 11 22 33 12 23 13:");
    for a in 0..6 {
        let row: Vec<String> = (0..6).map(|b| format!("{:8.3}", c0.get(a, b))).collect();
        println!("  {}", row.join(" "));
    }
    println!("positive definite: {}", is_positive_definite(&c0));

    let k = ti_identify(&c0)?;
    println!(
        "identified: mu_L = {}, mu_T = {}, lambda = {}, alpha = {}, beta = {}",
        k.mu_l, k.mu_t, k.lambda, k.alpha, k.beta
    );
    Ok(())
}
