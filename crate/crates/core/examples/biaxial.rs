//! Equibiaxial and tension-compression drives of a switched fiber pair at
//! `±30°`, writing the full curves as CSV.

use hencky::energy::MaterialModel;
use hencky::lab::{drive_biaxial, drive_biaxial_tc};

fn main() -> hencky::error::Result<()> {
    let model = MaterialModel::FiberC { mu1: 1.0, k1: 1.0, i: 2, switch: true };

    let curve = drive_biaxial(&model, 30.0, (1.7, 1.7), 20)?;
    for p in curve.points.iter().step_by(5) {
        println!("t = {:.2}  sigma11/sigma22 = {:?}", p.control, p.sigma_ratio);
    }

    let mut tc = drive_biaxial_tc(&model, 30.0, (1.0, 1.6), 12)?;
    tc.normalize();
    println!("\n{} points, {} skipped", tc.points.len(), tc.skipped.len());
    tc.write_csv(std::io::stdout().lock())
}
