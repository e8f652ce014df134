mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;

use planargeo::fields::scalar_potential;
use planargeo::{FieldModel, FieldParams, ScalarField2D, TransverseMomenta};

fn random_field<R: Rng>(r: &mut R) -> ScalarField2D {
    let eta = r.gen_range(0.05..3.0);
    let omega = r.gen_range(0.3..3.0);
    let model = if r.gen_bool(0.5) {
        FieldModel::standing_wave(FieldParams::from_eta(eta, omega, 0.0).unwrap()).unwrap()
    } else {
        FieldModel::plane_wave(FieldParams::from_eta(eta, omega, r.gen_range(-1.0..=1.0)).unwrap()).unwrap()
    };
    ScalarField2D::new(model, TransverseMomenta::new(r.gen_range(-1.5..1.5), r.gen_range(-1.5..1.5)))
}

#[test]
fn sigma_derivatives_match_finite_differences() {
    let mut r = rng(1);
    for _ in 0..100 {
        let field = random_field(&mut r);
        let (t, x) = (r.gen_range(-10.0..10.0), r.gen_range(-10.0..10.0));
        let s = field.sigma_derivatives(t, x);
        let fd = fd_jet(|t, x| 0.5 * field.conformal_factor(t, x).ln(), t, x, 1e-3);
        for (a, b) in [s.d_t, s.d_x, s.d_tt, s.d_tx, s.d_xx].iter().zip(fd) {
            assert!((a - b).abs() <= 1e-6 * b.abs().max(1.0), "{a} vs {b} at ({t}, {x})");
        }
    }
}

#[test]
fn curvature_matches_finite_differences() {
    let mut r = rng(2);
    for _ in 0..50 {
        let field = random_field(&mut r);
        let (t, x) = (r.gen_range(-5.0..5.0), r.gen_range(-5.0..5.0));
        let sigma = |t: f64, x: f64| 0.5 * field.conformal_factor(t, x).ln();
        let fd = fd_jet(sigma, t, x, 1e-3);
        let k = -(-2.0 * sigma(t, x)).exp() * (fd[4] - fd[2]);
        let got = field.gaussian_curvature(t, x);
        assert!((got - k).abs() <= 1e-6 * k.abs().max(1.0), "{got} vs {k}");
    }
}

#[test]
fn potential_matches_independent_closed_form() {
    let mut r = rng(3);
    for _ in 0..100 {
        let (eta, omega, delta) = (r.gen_range(0.1..2.0), r.gen_range(0.5..2.0), r.gen_range(-1.0..=1.0));
        let p = [r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)];
        let (t, x) = (r.gen_range(-5.0..5.0), r.gen_range(-5.0..5.0));
        let momenta = TransverseMomenta::new(p[0], p[1]);
        let phi = |pots: [Pot; 2]| 0.5 * ((p[0] - pots[0].a).powi(2) + (p[1] - pots[1].a).powi(2));

        let plane = FieldModel::plane_wave(FieldParams::from_eta(eta, omega, delta).unwrap()).unwrap();
        let expected = phi(PlaneOracle { eta, omega, delta }.potentials(t, x));
        assert!((scalar_potential(&plane, momenta, t, x) - expected).abs() < 1e-13);

        let standing = FieldModel::standing_wave(FieldParams::from_eta(eta, omega, 0.0).unwrap()).unwrap();
        let expected = phi(StandingOracle { eta, omega }.potentials(t, x));
        assert!((scalar_potential(&standing, momenta, t, x) - expected).abs() < 1e-13);
    }
}

proptest! {
    #[test]
    fn conformal_factor_is_at_least_one(
        eta in 0.0f64..5.0, omega in 0.1f64..5.0, delta in -1.0f64..=1.0,
        py in -3.0f64..3.0, pz in -3.0f64..3.0, t in -50.0f64..50.0, x in -50.0f64..50.0,
    ) {
        let p = TransverseMomenta::new(py, pz);
        for model in [
            FieldModel::plane_wave(FieldParams::from_eta(eta, omega, delta).unwrap()).unwrap(),
            FieldModel::standing_wave(FieldParams::from_eta(eta, omega, 0.0).unwrap()).unwrap(),
        ] {
            let f = ScalarField2D::new(model, p);
            prop_assert!(f.scalar_potential(t, x) >= 0.0);
            prop_assert!(f.conformal_factor(t, x) >= 1.0);
            prop_assert!(f.sigma_derivatives(t, x).value >= 0.0);
        }
    }

    #[test]
    fn plane_waves_are_flat(
        eta in 0.0f64..10.0, omega in 0.1f64..5.0, delta in -1.0f64..=1.0,
        py in -3.0f64..3.0, pz in -3.0f64..3.0, t in -50.0f64..50.0, x in -50.0f64..50.0,
    ) {
        let model = FieldModel::plane_wave(FieldParams::from_eta(eta, omega, delta).unwrap()).unwrap();
        let f = ScalarField2D::new(model, TransverseMomenta::new(py, pz));
        prop_assert!(f.gaussian_curvature(t, x).abs() < 1e-10);
    }

    #[test]
    fn plane_wave_depends_only_on_retarded_time(
        eta in 0.0f64..3.0, delta in -1.0f64..=1.0, t in -20.0f64..20.0, x in -20.0f64..20.0, shift in -5.0f64..5.0,
    ) {
        let model = FieldModel::plane_wave(FieldParams::from_eta(eta, 1.0, delta).unwrap()).unwrap();
        let f = ScalarField2D::new(model, TransverseMomenta::new(0.3, -0.2));
        let a = f.scalar_potential(t, x);
        let b = f.scalar_potential(t + shift, x + shift);
        prop_assert!((a - b).abs() < 1e-12 * a.abs().max(1.0));
    }
}
