use hencky::kinematics::*;
use hencky::spectral_calculus::{contract_k, projection_ph};
use hencky::tensor::*;
use nalgebra::{Rotation3, Unit};
use proptest::prelude::*;

fn sym_strategy(scale: f64) -> impl Strategy<Value = SymTensor3> {
    prop::array::uniform6(-scale..scale).prop_map(SymTensor3::from_components)
}

fn rotation_strategy() -> impl Strategy<Value = Mat3> {
    (prop::array::uniform3(-1.0..1.0f64), -3.1..3.1f64)
        .prop_filter("axis", |(a, _)| Vec3::from(*a).norm() > 0.1)
        .prop_map(|(a, t)| Rotation3::from_axis_angle(&Unit::new_normalize(Vec3::from(a)), t).into_inner())
}

fn unit_strategy() -> impl Strategy<Value = StructuralTensor> {
    prop::array::uniform3(-1.0..1.0f64)
        .prop_filter("direction", |a| Vec3::from(*a).norm() > 0.1)
        .prop_map(|a| StructuralTensor::from_direction(Vec3::from(a)).unwrap())
}

/// SPD tensors `exp(E)`; `scale = 3.4` keeps the condition number below 1e6.
fn spd_strategy(scale: f64) -> impl Strategy<Value = SymTensor3> {
    sym_strategy(scale).prop_map(|e| sym_exp(&e))
}

fn deformation_strategy() -> impl Strategy<Value = Mat3> {
    (sym_strategy(0.4), rotation_strategy()).prop_map(|(e, r)| r * sym_exp(&e).to_matrix())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn spectral_reconstruction(c in spd_strategy(2.0)) {
        let s = spectral_decompose(&c).unwrap();
        let sum = (0..3).fold(SymTensor3::zero(), |acc, k| acc + s.projections[k] * s.eigenvalues[k]);
        prop_assert!((sum - c).norm() <= 1e-10 * c.norm());
    }

    #[test]
    fn log_exp_round_trip(c in spd_strategy(2.3)) {
        let back = sym_exp(&sym_log(&c, false).unwrap());
        prop_assert!((back - c).norm() <= 1e-9 * c.norm());
    }

    #[test]
    fn voigt_duality(s in sym_strategy(10.0), e in sym_strategy(10.0)) {
        let v = voigt_pack(&s, VoigtKind::StressLike).dot(&voigt_pack(&e, VoigtKind::StrainLike));
        prop_assert!((v - s.dot(&e)).abs() <= 1e-14 * (1.0 + s.norm() * e.norm()));
    }

    #[test]
    fn deviatoric_projector(t in sym_strategy(5.0)) {
        let p = Tensor4V::dev_projector();
        prop_assert!((p.compose(&p).matrix() - p.matrix()).abs().max() <= 1e-13);
        prop_assert!(p.contract(&SymTensor3::identity()).max_abs() <= 1e-13);
        prop_assert!((p.contract(&t) - t.deviator()).max_abs() <= 1e-13 * (1.0 + t.norm()));
    }

    #[test]
    fn log_cofactor_invariant_identity(f in deformation_strategy(), m in unit_strategy()) {
        let s = DeformationState::from_f(&f).unwrap();
        let (j5, _) = log_cofactor_invariant(&s, &m);
        prop_assert!((j5 - (s.log_u.trace() - mixed_invariant(&s, &m, InvariantFamily::H, 1))).abs() <= 1e-12);
    }

    #[test]
    fn isochoric_log_strain_is_deviatoric(f in deformation_strategy()) {
        let f = f / f.determinant().cbrt();
        let s = DeformationState::from_f(&f).unwrap();
        prop_assert!(s.log_u.trace().abs() <= 1e-10);
        prop_assert!((s.log_u.deviator() - s.log_u).max_abs() <= 1e-10);
    }

    #[test]
    fn even_log_powers_are_nonnegative(f in deformation_strategy(), m in unit_strategy()) {
        let s = DeformationState::from_f(&f).unwrap();
        for i in [2, 4] {
            prop_assert!(mixed_invariant(&s, &m, InvariantFamily::H, i) >= 0.0);
        }
    }

    #[test]
    fn switch_inequality(f in deformation_strategy(), m in unit_strategy()) {
        let s = DeformationState::from_f(&f).unwrap();
        let c1 = mixed_invariant(&s, &m, InvariantFamily::C, 1);
        if c1 >= 1.0 {
            prop_assert!(c1 - 1.0 >= mixed_invariant(&s, &m, InvariantFamily::H, 1) - 1e-14);
        }
    }

    #[test]
    fn mixed_invariants_are_objective(f in deformation_strategy(), q in rotation_strategy(), m in unit_strategy()) {
        let a = DeformationState::from_f(&f).unwrap();
        let b = DeformationState::from_f(&(q * f)).unwrap();
        for family in [InvariantFamily::C, InvariantFamily::H] {
            for i in 1..=4 {
                let (x, y) = (mixed_invariant(&a, &m, family, i), mixed_invariant(&b, &m, family, i));
                prop_assert!((x - y).abs() <= 1e-10 * x.abs().max(1.0));
            }
        }
    }

    #[test]
    fn projection_tensors_are_symmetric_and_isotropic(c in spd_strategy(1.0), t in sym_strategy(3.0), q in rotation_strategy()) {
        let s = spectral_decompose(&c).unwrap();
        let p = projection_ph(&s).p_h;
        let k = contract_k(&t, &s);
        prop_assert!(p.major_asymmetry() <= 1e-9 * p.norm());
        prop_assert!(k.major_asymmetry() <= 1e-9 * k.norm().max(1e-300));
        let rotated = projection_ph(&spectral_decompose(&c.rotate(&q)).unwrap()).p_h;
        prop_assert!((rotated.matrix() - p.rotate(&q).matrix()).abs().max() <= 1e-10 * p.max_abs());
    }
}

#[test]
fn projection_tensor_is_continuous_across_coalescence() {
    let triple = projection_ph(&spectral_decompose(&SymTensor3::identity()).unwrap()).p_h;
    for d in [1e-4, 1e-6, 1e-9] {
        let c = SymTensor3::diag(1.0 + d, 1.0, 1.0);
        let p = projection_ph(&spectral_decompose(&c).unwrap()).p_h;
        assert!((p.matrix() - triple.matrix()).abs().max() <= 2.0 * d, "{d}");
    }
}
