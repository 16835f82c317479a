#![allow(clippy::needless_range_loop)]

use dirac_top::dynamics::{integrate_trajectory, start_point, ConstantVelocity, ScaledVelocity};
use dirac_top::geometry::{
    config_metric, scalar_curvature, scalar_curvature_closed_form, ConfigPoint, PhysicalConstants, Polynomial, DIM,
};
use dirac_top::lorentz::{lorentz_from_euler, sl2c_from_euler, vector_map, EulerAngles, SignConvention};
use dirac_top::spin::{a_from_mass, FieldConfig, LiftedPotential};
use dirac_top::wave::{psi_from_potentials, PotentialPair, WaveSetup};
use dirac_top::weyl::gauge_transform;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn constants() -> PhysicalConstants {
    let mut k = PhysicalConstants::natural(1.0, 0.3, 1.0);
    k.a = a_from_mass(1.0, &k).unwrap();
    k
}

fn fields() -> FieldConfig {
    FieldConfig::Uniform { e: [0.1, 0.0, -0.2], h: [0.05, 0.3, 0.0] }
}

fn setup(k: &PhysicalConstants) -> WaveSetup<dirac_top::geometry::ConfigMetric, LiftedPotential> {
    WaveSetup::new(*k, config_metric(k, SignConvention::default()), LiftedPotential { fields: fields(), a: k.a })
}

fn pair(rng: &mut ChaCha8Rng) -> (PotentialPair<Polynomial<DIM>, Polynomial<DIM>>, [f64; DIM]) {
    let s = Polynomial::random_cubic(rng, 0.0, 0.5);
    let chi = Polynomial::random_quadratic(rng, 1.5, 0.1);
    (PotentialPair { s, chi }, ConfigPoint::random(rng).to_array())
}

fn angles() -> impl Strategy<Value = [f64; 6]> {
    prop::array::uniform6(-1.5f64..1.5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lorentz_matrices_preserve_the_metric(t in angles()) {
        let l = lorentz_from_euler(&EulerAngles(t)).unwrap();
        prop_assert!(l.orthogonality_defect() < 1e-9 * (1.0 + l.0.iter().flatten().map(|v| v * v).sum::<f64>()));
        prop_assert!(l.is_proper_orthochronous(1e-9));
    }

    #[test]
    fn spin_half_covers_the_vector_rep(t in angles()) {
        let a = sl2c_from_euler(&EulerAngles(t)).unwrap();
        let l = lorentz_from_euler(&EulerAngles(t)).unwrap();
        let m = vector_map(&a.0);
        let scale = 1.0 + l.0.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
        for i in 0..4 {
            for j in 0..4 {
                prop_assert!((m[i][j] - l.0[i][j]).abs() < 1e-10 * scale);
            }
        }
    }

    #[test]
    fn top_length_scales_inversely_with_mass(m in 0.01f64..100.0) {
        let k = constants();
        let a1 = a_from_mass(m, &k).unwrap();
        let a2 = a_from_mass(2.0 * m, &k).unwrap();
        prop_assert!((a1 - 2.0 * a2).abs() < 1e-14 * a1);
    }

    #[test]
    fn constant_velocity_reparametrizes_exactly(v in prop::array::uniform4(-0.3f64..0.3), s in 0.2f64..5.0) {
        let mut qdot = [0.0; DIM];
        qdot[0] = 1.0;
        qdot[1..4].copy_from_slice(&v[1..]);
        qdot[5] = v[0];
        let start = start_point([0.0; 4], [0.0; 6]);
        let a = integrate_trajectory(&start, &ConstantVelocity(qdot), (0.0, 2.0), 20).unwrap();
        let b = integrate_trajectory(&start, &ScaledVelocity(ConstantVelocity(qdot), s), (0.0, 2.0 / s), 20).unwrap();
        let (ea, eb) = (a.end().unwrap(), b.end().unwrap());
        let (qa, qb) = (ea.q.to_array(), eb.q.to_array());
        for i in 0..DIM {
            prop_assert!((qa[i] - qb[i]).abs() < 1e-12);
        }
        prop_assert!((ea.tau - eb.tau).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn configuration_curvature_is_constant(seed in any::<u64>()) {
        let k = constants();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = ConfigPoint::random(&mut rng).to_array();
        for sign in [SignConvention::RotationsPositive, SignConvention::Literal] {
            let r = scalar_curvature(&config_metric(&k, sign), &q).unwrap();
            let expect = scalar_curvature_closed_form(&k, sign);
            prop_assert!((r - expect).abs() < 1e-8 * expect.abs().max(1.0));
        }
    }

    #[test]
    fn madelung_decomposition_holds_for_non_solutions(seed in any::<u64>()) {
        let k = constants();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, q) = pair(&mut rng);
        prop_assert!(setup(&k).madelung_defect(&p, &q).unwrap().relative_defect() < 1e-8);
    }

    #[test]
    fn hamilton_jacobi_residuals_are_gauge_invariant(seed in any::<u64>()) {
        let k = constants();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, q) = pair(&mut rng);
        let rho = Polynomial::<DIM>::random_quadratic(&mut rng, 1.3, 0.05);
        let w = setup(&k);
        let (metric, chi) = gauge_transform(&w.metric, &p.chi, &rho);
        let gauged = WaveSetup::new(k, metric, w.potential.clone());
        let gp = PotentialPair { s: p.s.clone(), chi };
        let (h0, h1) = (w.hj_residual(&p, &q).unwrap(), gauged.hj_residual(&gp, &q).unwrap());
        let (c0, c1) = (w.continuity_residual(&p, &q).unwrap(), gauged.continuity_residual(&gp, &q).unwrap());
        prop_assert!((h0 - h1).abs() < 1e-8 * h0.abs().max(1.0));
        prop_assert!((c0 - c1).abs() < 1e-8 * c0.abs().max(1.0));
    }

    #[test]
    fn probability_current_is_real(seed in any::<u64>()) {
        let k = constants();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, q) = pair(&mut rng);
        let psi = psi_from_potentials(p, &k);
        let j = setup(&k).current(&psi, &q).unwrap();
        let scale = j.j.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        prop_assert!(j.imaginary_part.abs() < 1e-14 * scale);
    }
}
