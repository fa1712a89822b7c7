//! Uniaxial stretch and simple shear of the Hencky and exponentiated Hencky
//! energies. The Hencky curve softens in tension, the exponentiated one does not.

use hencky::energy::MaterialModel;
use hencky::lab::{drive_simple_shear, drive_uniaxial};

fn main() -> hencky::error::Result<()> {
    let hencky = MaterialModel::IsoHencky { mu: 1.0, kappa: 10.0 };
    let exp = MaterialModel::IsoExpHencky { mu: 1.0, kappa: 10.0, k: 1.0, k_hat: 1.0 };

    let a = drive_uniaxial(&hencky, &[], (0.5, 3.0), 10)?;
    let b = drive_uniaxial(&exp, &[], (0.5, 3.0), 10)?;
    println!("{:>8} {:>12} {:>12}", "stretch", "sigma11 H", "sigma11 expH");
    for (p, q) in a.points.iter().zip(&b.points) {
        println!("{:8.3} {:12.5} {:12.5}", p.control, p.sigma.get(0, 0), q.sigma.get(0, 0));
    }

    let s = drive_simple_shear(&exp, &[], (0.0, 2.0), 8)?;
    println!("\n{:>8} {:>12} {:>12}", "gamma", "sigma13", "sigma11");
    for p in &s.points {
        println!("{:8.3} {:12.5} {:12.5}", p.control, p.sigma.get(0, 2), p.sigma.get(0, 0));
    }
    Ok(())
}
