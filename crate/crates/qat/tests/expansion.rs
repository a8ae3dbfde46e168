mod common;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use qat::expansion::{bernoulli, projection_coefficient, second_order_pets};
use qat::linalg::{self, pauli};
use qat::systems::{self, rabi_effective_coefficient, rabi_phase_coefficient, taylor_coefficients};
use qat::{qat_expand, ExpansionConfig, ExpansionError, FourierOperator};

fn rabi(detuning: f64, order: usize) -> qat::QatExpansion {
    let h = FourierOperator::hermitian_pair(detuning, pauli::sigma_plus()).unwrap();
    qat_expand(&[h], &ExpansionConfig::far_detuned(order, 1e-3).with_final_phase()).unwrap()
}

fn sigma_z_coefficient(op: &FourierOperator) -> f64 {
    projection_coefficient(op, 0.0, &pauli::sigma_z()).re
}

fn phase_coefficient(op: &FourierOperator, detuning: f64) -> Complex64 {
    projection_coefficient(op, detuning, &(pauli::sigma_plus() * linalg::I))
}

#[test]
fn rabi_orders_match_closed_form_taylor_series() {
    for detuning in [2.0_f64, -0.7, 0.35] {
        let radius = 0.25 * detuning.abs();
        let h_taylor = taylor_coefficients(|z| rabi_effective_coefficient(z, detuning), radius, 9);
        let phi_taylor = taylor_coefficients(|z| rabi_phase_coefficient(z, detuning), radius, 9);
        let exp = rabi(detuning, 8);
        for n in 1..=8 {
            let scale = detuning.abs().powi(-(n as i32 - 1)).max(1.0);
            let h = sigma_z_coefficient(exp.h(n));
            assert!((h - h_taylor[n].re).abs() <= 1e-9 * scale, "h_eff[{n}] at {detuning}: {h} vs {}", h_taylor[n]);
            let p = phase_coefficient(exp.phase(n), detuning);
            assert!((p - phi_taylor[n]).norm() <= 1e-9 * scale, "phi[{n}] at {detuning}: {p} vs {}", phi_taylor[n]);
        }
    }
}

#[test]
fn table_three_closed_forms_at_negative_detuning() {
    let d: f64 = -0.7;
    let exp = rabi(d, 8);
    let h = [0.0, -1.0 / d, 0.0, 1.0 / d.powi(3), 0.0, -2.0 / d.powi(5), 0.0, 5.0 / d.powi(7)];
    let phi = [-1.0 / d, 0.0, 4.0 / (3.0 * d.powi(3)), 0.0, -16.0 / (5.0 * d.powi(5)), 0.0, 64.0 / (7.0 * d.powi(7)), 0.0];
    for n in 1..=8 {
        assert!((sigma_z_coefficient(exp.h(n)) - h[n - 1]).abs() <= 1e-12 * h[n - 1].abs().max(1.0));
        // the engine's phase has the opposite overall sign to the table
        assert!((phase_coefficient(exp.phase(n), d) + phi[n - 1]).norm() <= 1e-12 * phi[n - 1].abs().max(1.0));
    }
}

#[test]
fn bernoulli_numbers_against_known_values() {
    let known = [(0, 1, 1), (1, -1, 2), (2, 1, 6), (4, -1, 30), (6, 1, 42), (8, -1, 30), (10, 5, 66), (12, -691, 2730)];
    for (k, n, d) in known {
        let b = bernoulli(k).unwrap();
        assert_eq!((*b.numer(), *b.denom()), (n, d), "B_{k}");
    }
    for k in [3, 5, 7, 9, 31] {
        assert_eq!(*bernoulli(k).unwrap().numer(), 0);
    }
    assert!(bernoulli(33).is_err());
}

#[test]
fn first_order_is_the_slow_part_of_the_drive() {
    let sys = systems::fig4();
    let exp = sys.expand(1, None).unwrap();
    let (slow, _) = sys.interaction[0].lowpass(sys.default_cutoff).unwrap();
    assert_eq!(exp.h(1).distance(&slow).unwrap(), 0.0);
}

#[test]
fn input_validation() {
    let h = FourierOperator::hermitian_pair(1.0, pauli::sigma_plus()).unwrap();
    assert_eq!(qat_expand(std::slice::from_ref(&h), &ExpansionConfig::far_detuned(0, 0.1)).unwrap_err(), ExpansionError::ZeroOrder);
    assert_eq!(qat_expand(&[], &ExpansionConfig::far_detuned(2, 0.1)).unwrap_err(), ExpansionError::EmptyInput);
    let lopsided = FourierOperator::constant(pauli::sigma_plus());
    assert!(matches!(
        qat_expand(&[lopsided], &ExpansionConfig::far_detuned(2, 0.1)),
        Err(ExpansionError::NotHermitian { order: 1, .. })
    ));
    assert!(matches!(qat_expand(std::slice::from_ref(&h), &ExpansionConfig::far_detuned(2, 1.5)), Err(ExpansionError::InvalidLambda(_))));
    // a mode just above the cutoff but below lambda is a small denominator
    let near = FourierOperator::hermitian_pair(0.05, pauli::sigma_plus()).unwrap();
    assert!(matches!(
        qat_expand(&[near], &ExpansionConfig::new(2, 0.01, 0.1)),
        Err(ExpansionError::ResonantLeak { order: 1, .. })
    ));
}

#[test]
fn higher_interaction_orders_enter_at_their_order() {
    // H_I = λ V₁ + λ² V₂ with V₂ static: V₂ appears unchanged in h_eff[2]
    let v1 = FourierOperator::hermitian_pair(1.0, pauli::sigma_plus()).unwrap();
    let v2 = FourierOperator::constant(pauli::sigma_x().scale(0.3));
    let with = qat_expand(&[v1.clone(), v2.clone()], &ExpansionConfig::far_detuned(2, 0.01)).unwrap();
    let without = qat_expand(&[v1], &ExpansionConfig::far_detuned(2, 0.01)).unwrap();
    assert!(with.h(2).distance(&without.h(2).add(&v2).unwrap()).unwrap() < 1e-15);
}

fn operator_with_dims() -> impl Strategy<Value = (usize, FourierOperator)> {
    (2..=4usize).prop_flat_map(|d| (Just(d), hermitian_operator(d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn second_order_matches_explicit_pair_sum((_, h) in operator_with_dims()) {
        let exp = qat_expand(std::slice::from_ref(&h), &ExpansionConfig::new(2, 0.1, 0.05)).unwrap();
        let (h2, phi1) = second_order_pets(&h, 0.1).unwrap();
        prop_assert!(exp.h(2).distance(&h2).unwrap() <= 1e-12);
        prop_assert!(exp.phase(1).distance(&phi1).unwrap() <= 1e-12);
    }

    #[test]
    fn structural_invariants_to_fourth_order((_, h) in operator_with_dims()) {
        let exp = qat_expand(std::slice::from_ref(&h), &ExpansionConfig::new(4, 0.1, 0.05).with_final_phase()).unwrap();
        let scale = h.max_coeff_norm().max(1.0).powi(4);
        prop_assert!(exp.homological_residual().unwrap() <= 1e-11 * scale);
        for n in 1..=4 {
            prop_assert!(exp.h(n).hermitian_defect() <= 1e-12 * scale);
            prop_assert!(exp.phase(n).hermitian_defect() <= 1e-12 * scale);
            prop_assert!(exp.h(n).frequencies().iter().all(|f| f.abs() <= 0.1));
            prop_assert!(exp.phase(n).frequencies().iter().all(|f| f.abs() > 0.1));
        }
    }

    #[test]
    fn expansion_is_homogeneous_in_the_drive((_, h) in operator_with_dims(), c in 0.2..3.0_f64) {
        // scaling H by c scales order n by cⁿ
        let a = qat_expand(std::slice::from_ref(&h), &ExpansionConfig::new(3, 0.1, 0.05)).unwrap();
        let b = qat_expand(&[h.scale_real(c)], &ExpansionConfig::new(3, 0.1, 0.05)).unwrap();
        for n in 1..=3 {
            let want = a.h(n).scale_real(c.powi(n as i32));
            let tol = 1e-11 * want.max_coeff_norm().max(1.0);
            prop_assert!(b.h(n).distance(&want).unwrap() <= tol);
        }
    }
}
