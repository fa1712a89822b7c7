//! Fit fiber parameters to synthetic circumferential and axial data generated
//! from a known layer, starting from perturbed values.

use hencky::calibration::{fit, Direction, ExperimentDataset, FitConfig, FreeParam, OptimizerOptions, Param};
use hencky::energy::MaterialModel;
use hencky::lab::{linspace, uniaxial_two_fiber, NewtonOptions, TwoFiberSetup};

fn synthetic(setup: &TwoFiberSetup, direction: Direction) -> hencky::error::Result<ExperimentDataset> {
    let stretch = linspace(1.0, 1.1, 10);
    let model = setup.composite(direction.into());
    let stress = uniaxial_two_fiber(&model, &stretch, NewtonOptions::default())
        .into_iter()
        .map(|r| r.map(|p| p.sigma11))
        .collect::<hencky::error::Result<Vec<_>>>()?;
    ExperimentDataset::new(direction.as_str(), direction, stretch, stress)
}

fn main() -> hencky::error::Result<()> {
    let truth = TwoFiberSetup {
        iso: MaterialModel::IsoExpHencky { mu: 31.16, kappa: 31160.0, k: 3.38, k_hat: 1.0 },
        fiber: MaterialModel::FiberH { mu1: 726.09, k1: 1848.66, i: 2, eps: 0.1, switch: true },
        beta_deg: 40.68,
    };
    let data = [synthetic(&truth, Direction::Circumferential)?, synthetic(&truth, Direction::Axial)?];

    let free = |name, lower, upper, start| FreeParam { name, lower, upper, start: Some(start), log_scale: false };
    let config = FitConfig {
        free: vec![
            free(Param::Mu1, 100.0, 5000.0, 1000.0),
            free(Param::K1, 100.0, 5000.0, 1200.0),
            free(Param::Beta, 20.0, 60.0, 35.0),
        ],
        fixed: Default::default(),
        beta_max: 75.0,
        optimizer: OptimizerOptions { starts: 4, seed: 1, ..Default::default() },
    };
    let result = fit(&truth, &data, &config)?;
    print!("{}", result.report());
    Ok(())
}
