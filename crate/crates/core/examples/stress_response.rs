//! Stresses and tangents of the isotropic energies at one deformation.

use hencky::energy::MaterialModel;
use hencky::stress::{conjugate_stress_check, full_response};
use hencky::tensor::Mat3;

fn main() -> hencky::error::Result<()> {
    #[rustfmt::skip]
    let f = Mat3::new(
        1.30, 0.20, 0.00,
        0.05, 0.90, 0.10,
        0.00, 0.00, 0.95,
    );
    let models = [
        MaterialModel::IsoHencky { mu: 3.0, kappa: 20.0 },
        MaterialModel::IsoExpHencky { mu: 3.0, kappa: 20.0, k: 2.0, k_hat: 1.5 },
    ];
    for model in &models {
        let st = full_response(model, &f, &[])?;
        println!("{}", model.name());
        println!("  energy   {:.6}", st.energy);
        println!("  S        {:?}", st.s.components());
        println!("  sigma    {:?}", st.sigma.components());
        println!("  |C|      {:.6}", st.c_mat.norm());
        let r = conjugate_stress_check(model, &f)?;
        println!("  tau residual {:.1e}, Biot residual {:.1e}", r.tau_residual, r.biot_residual);
    }
    Ok(())
}
