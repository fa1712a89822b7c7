mod common;

use common::*;
use hencky::energy::{MaterialModel, TiParams};
use hencky::kinematics::{DeformationState, StructuralTensor};
use hencky::stress::*;
use hencky::tensor::{spectral_decompose, Mat3, SymTensor3, Tensor4V, VOIGT_PAIRS};
use rand::Rng;

fn state_from_c(c: &SymTensor3) -> DeformationState {
    let u = spectral_decompose(c).unwrap().map(f64::sqrt);
    DeformationState::from_stretch(&u).unwrap()
}

fn unit_sym(a: usize) -> SymTensor3 {
    let (i, j) = VOIGT_PAIRS[a];
    let mut m = Mat3::zeros();
    m[(i, j)] = 1.0;
    m[(j, i)] = 1.0;
    SymTensor3::from_matrix(&m)
}

#[test]
fn material_stress_and_tangent_match_finite_differences() {
    let mut r = rng(3);
    let mut checked = 0;
    for _ in 0..5 {
        for (model, fibers) in model_zoo(&mut r) {
            let f = deformation(&mut r, 0.25);
            if switch_margin(&model, &fibers, &f) < 1e-2 {
                continue;
            }
            let st = full_response(&model, &f, &fibers).unwrap();
            let c = SymTensor3::from_matrix(&(f.transpose() * f));
            let h = 1e-6;
            for a in 0..6 {
                let d = unit_sym(a);
                let p = full_response(&model, &state_from_c(&(c + d * h)).f, &fibers).unwrap();
                let m = full_response(&model, &state_from_c(&(c - d * h)).f, &fibers).unwrap();
                let fd = 2.0 * (p.energy - m.energy) / (2.0 * h);
                let an = st.s.dot(&d);
                assert!(
                    rel_err(fd, an, st.s.norm().max(1e-8)) < 1e-6,
                    "{} S: {fd} vs {an}",
                    model.name()
                );
                let fd_c = (p.s - m.s) * (2.0 / (2.0 * h));
                let an_c = st.c_mat.contract(&d);
                assert!(
                    (fd_c - an_c).norm() / st.c_mat.norm().max(1e-8) < 1e-5,
                    "{} C: {fd_c:?} vs {an_c:?}",
                    model.name()
                );
            }
            assert!(st.c_mat.is_major_symmetric(1e-8));
            checked += 1;
        }
    }
    assert!(checked > 50);
}

#[test]
fn identity_state_gives_reference_tangent_and_zero_stress() {
    let mut r = rng(5);
    for (model, fibers) in model_zoo(&mut r) {
        let st = full_response(&model, &Mat3::identity(), &fibers).unwrap();
        assert_eq!(st.s.max_abs(), 0.0, "{}", model.name());
        let c = reference_tangent_voigt(&model, &fibers).unwrap();
        assert_eq!(c, st.c_mat);
    }
}

#[test]
fn incompressible_uniaxial_kirchhoff_stress() {
    let l: f64 = 1.25;
    let f = Mat3::from_diagonal(&hencky::tensor::Vec3::new(l, l.powf(-0.5), l.powf(-0.5)));
    let st = full_response(&MaterialModel::IsoHencky { mu: 3.0, kappa: 50.0 }, &f, &[]).unwrap();
    assert!((st.tau.get(0, 0) - 6.0 * l.ln()).abs() < 1e-12);
    assert!((st.sigma - st.tau).max_abs() < 1e-12);
}

fn ti_model(lambda: f64, mu_t: f64, alpha: f64, beta: f64, mu_l: f64) -> MaterialModel {
    MaterialModel::TiExpHencky {
        params: TiParams::from_lame(lambda, mu_t, alpha, beta, mu_l),
        k: [1.0, 1.0, 75.0, 25.0, 45.0],
    }
}

#[test]
fn ti_reference_matrices() {
    let m = [StructuralTensor::axis(2)];
    let soft_axis = reference_tangent_voigt(&ti_model(5.5, 14.0, 40.75, 0.0, 14.0), &m).unwrap();
    let stiff_axis = reference_tangent_voigt(&ti_model(5.5, 2.5, 0.0, 104.5, 2.5), &m).unwrap();
    let shear_axis = reference_tangent_voigt(&ti_model(5.5, 2.5, 0.0, 0.0, 28.625), &m).unwrap();
    let close = |t: &Tensor4V, a, b, v: f64| assert!((t.get(a, b) - v).abs() <= 1e-9 * v.abs().max(1.0), "{a},{b}: {} vs {v}", t.get(a, b));
    close(&soft_axis, 0, 0, 33.5);
    close(&soft_axis, 0, 2, 46.25);
    close(&soft_axis, 2, 2, 115.0);
    close(&soft_axis, 5, 5, 14.0);
    close(&stiff_axis, 2, 2, 115.0);
    close(&stiff_axis, 0, 1, 5.5);
    close(&shear_axis, 4, 4, 28.625);
    close(&shear_axis, 3, 3, 2.5);
    for t in [&soft_axis, &stiff_axis, &shear_axis] {
        assert!(is_positive_definite(t));
    }
    let id = ti_identify(&shear_axis).unwrap();
    assert!((id.mu_l - 28.625).abs() < 1e-12 && (id.mu_t - 2.5).abs() < 1e-12);
    assert!((id.lambda - 5.5).abs() < 1e-12 && id.alpha.abs() < 1e-12 && id.beta.abs() < 1e-12);
}

#[test]
fn energy_tangents_match_closed_forms() {
    let mut r = rng(8);
    let zoo = model_zoo(&mut r);
    for (model, _) in zoo {
        match &model {
            MaterialModel::TiHencky(p) | MaterialModel::TiExpHencky { params: p, .. } => {
                let t = reference_tangent_voigt(&model, &[StructuralTensor::axis(2)]).unwrap();
                let c = ti_assemble(&TiConstants::from_params(p));
                assert!((t.matrix() - c.matrix()).abs().max() < 1e-10);
            }
            MaterialModel::OrthoHencky(p) | MaterialModel::OrthoExpHencky { params: p, .. } => {
                let t = reference_tangent_voigt(&model, &[StructuralTensor::axis(0), StructuralTensor::axis(1)]).unwrap();
                let c = ortho_assemble(&hencky::stress::OrthoConstants::from_params(p));
                assert!((t.matrix() - c.matrix()).abs().max() < 1e-10, "{}", t.to_csv_block());
            }
            _ => {}
        }
    }
}

#[test]
fn isotropic_identification_degenerates() {
    let (mu, kappa) = (3.0, 11.0);
    let t = reference_tangent_voigt(&MaterialModel::IsoHencky { mu, kappa }, &[]).unwrap();
    let ti = ti_identify(&t).unwrap();
    assert!((ti.mu_l - mu).abs() < 1e-12 && (ti.mu_t - mu).abs() < 1e-12);
    assert!((ti.lambda - (kappa - 2.0 * mu / 3.0)).abs() < 1e-12);
    assert!(ti.alpha.abs() < 1e-12 && ti.beta.abs() < 1e-12);
    let o = ortho_identify(&t).unwrap();
    assert!(o.mu1.abs() < 1e-12 && o.mu2.abs() < 1e-12 && o.beta3.abs() < 1e-12);
}

#[test]
fn fiber_c_reference_tangent() {
    for i in 1..=4 {
        let m = MaterialModel::FiberC { mu1: 1.7, k1: 2.0, i, switch: true };
        let t = reference_tangent_voigt(&m, &[StructuralTensor::axis(2)]).unwrap();
        let expect = 4.0 * (i * i) as f64 * 1.7;
        assert!((t.get(2, 2) - expect).abs() < 1e-9 * expect);
        assert!(t.max_abs() - expect < 1e-9 * expect);
    }
}

#[test]
fn objectivity_and_material_symmetry() {
    let mut r = rng(21);
    for (model, fibers) in model_zoo(&mut r) {
        let f = deformation(&mut r, 0.3);
        if switch_margin(&model, &fibers, &f) < 1e-6 {
            continue;
        }
        let q = rotation(&mut r);
        let a = full_response(&model, &f, &fibers).unwrap();
        let b = full_response(&model, &(q * f), &fibers).unwrap();
        let rotated = a.sigma.rotate(&q);
        assert!((b.sigma - rotated).norm() <= 1e-9 * a.sigma.norm().max(1e-9), "{}", model.name());

        // rotating the reference frame together with the fibers
        let rotated_fibers: Vec<StructuralTensor> = fibers
            .iter()
            .map(|s| StructuralTensor::from_direction(q * s.a).unwrap())
            .collect();
        let rotated_model = match &model {
            MaterialModel::Composite { iso, fibers: parts } => MaterialModel::Composite {
                iso: iso.clone(),
                fibers: parts
                    .iter()
                    .map(|p| hencky::energy::FiberPart {
                        model: p.model.clone(),
                        fiber: StructuralTensor::from_direction(q * p.fiber.a).unwrap(),
                    })
                    .collect(),
            },
            m => m.clone(),
        };
        let c = full_response(&rotated_model, &(f * q.transpose()), &rotated_fibers).unwrap();
        assert!((c.sigma - a.sigma).norm() <= 1e-9 * a.sigma.norm().max(1e-9), "{}", model.name());
    }
}

#[test]
fn spatial_tangent_push_forward() {
    let mut r = rng(4);
    let f = deformation(&mut r, 0.2);
    let model = MaterialModel::IsoExpHencky { mu: 2.0, kappa: 9.0, k: 1.0, k_hat: 1.0 };
    let st = full_response_with(&model, &f, &[], ResponseOptions { spatial: true, ..Default::default() }).unwrap();
    let spat = st.c_spat.unwrap();
    let cm = st.c_mat;
    for _ in 0..5 {
        let (i, j, k, l) = (r.gen_range(0..3), r.gen_range(0..3), r.gen_range(0..3), r.gen_range(0..3));
        let mut s = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    for d in 0..3 {
                        s += f[(i, a)] * f[(j, b)] * f[(k, c)] * f[(l, d)] * cm.component(a, b, c, d);
                    }
                }
            }
        }
        assert!((spat.component(i, j, k, l) - s).abs() < 1e-10 * spat.max_abs());
    }
}

#[test]
fn conjugate_stresses() {
    let mut r = rng(30);
    let models = [
        MaterialModel::IsoHencky { mu: 2.0, kappa: 9.0 },
        MaterialModel::IsoExpHencky { mu: 2.0, kappa: 9.0, k: 1.2, k_hat: 0.5 },
    ];
    for m in &models {
        let rep = conjugate_stress_check(m, &rotation(&mut r)).unwrap();
        assert!(rep.tau_residual < 1e-9 && rep.biot_residual < 1e-6);
        let stretch = hencky::tensor::sym_exp(&sym(&mut r, 0.3)).to_matrix();
        let st = full_response(m, &stretch, &[]).unwrap();
        assert!((st.tau - st.log_space.stress_h).norm() < 1e-12 * st.tau.norm());
        for _ in 0..10 {
            let rep = conjugate_stress_check(m, &deformation(&mut r, 0.3)).unwrap();
            assert!(rep.tau_residual <= 1e-9, "{rep:?}");
            assert!(rep.biot_residual <= 1e-5, "{rep:?}");
        }
    }
    assert!(conjugate_stress_check(&MaterialModel::FiberHgo { mu1: 1.0, k1: 1.0, switch: true }, &Mat3::identity()).is_err());
}
