mod common;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use qat::linalg::{self, pauli};
use qat::FourierOperator;

fn triple() -> impl Strategy<Value = (FourierOperator, FourierOperator, FourierOperator)> {
    (2..=MAX_DIM).prop_flat_map(|d| (hermitian_operator(d), hermitian_operator(d), hermitian_operator(d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn commutator_times_i_stays_hermitian((a, b, _) in triple()) {
        let c = a.commutator(&b).unwrap().scale(linalg::I);
        prop_assert!(c.hermitian_defect() <= 1e-12);
        let anti = a.product(&b).unwrap().add(&b.product(&a).unwrap()).unwrap();
        prop_assert!(anti.hermitian_defect() <= 1e-12);
    }

    #[test]
    fn jacobi_identity((a, b, c) in triple()) {
        let t1 = a.commutator(&b.commutator(&c).unwrap()).unwrap();
        let t2 = b.commutator(&c.commutator(&a).unwrap()).unwrap();
        let t3 = c.commutator(&a.commutator(&b).unwrap()).unwrap();
        let sum = t1.add(&t2).unwrap().add(&t3).unwrap();
        prop_assert!(sum.max_coeff_norm() <= 1e-11);
    }

    #[test]
    fn algebra_matches_pointwise_evaluation((a, b, _) in triple(), s in -20.0..20.0_f64, z in -2.0..2.0_f64) {
        let lin = a.add(&b.scale(Complex64::new(z, 0.5))).unwrap();
        let want = a.evaluate(s) + b.evaluate(s) * Complex64::new(z, 0.5);
        prop_assert!(max_abs(&(lin.evaluate(s) - want)) <= 1e-12);
        let prod = a.product(&b).unwrap();
        prop_assert!(max_abs(&(prod.evaluate(s) - a.evaluate(s) * b.evaluate(s))) <= 1e-11);
        prop_assert!(max_abs(&(a.adjoint().evaluate(s) - a.evaluate(s).adjoint())) <= 1e-13);
    }

    #[test]
    fn lowpass_partitions_the_modes((a, _, _) in triple(), cutoff in 0.0..4.0_f64) {
        let (slow, fast) = a.lowpass(cutoff).unwrap();
        prop_assert!(slow.frequencies().iter().all(|f| f.abs() <= cutoff.max(1e-9)));
        prop_assert!(fast.frequencies().iter().all(|f| f.abs() > cutoff));
        prop_assert!(slow.add(&fast).unwrap().distance(&a).unwrap() == 0.0);
    }

    #[test]
    fn antiderivative_differentiates_back((d, f) in dim_and(fast_operator), s in -10.0..10.0_f64) {
        let g = f.antiderivative().unwrap();
        prop_assert!(g.derivative().distance(&f).unwrap() <= 1e-12);
        // central difference of the evaluated series
        let h = 1e-5;
        let fd = (g.evaluate(s + h) - g.evaluate(s - h)) / Complex64::new(2.0 * h, 0.0);
        prop_assert!(max_abs(&(fd - f.evaluate(s))) <= 1e-7, "dim {d}");
    }

    #[test]
    fn time_average_is_the_long_time_mean((d, f) in dim_and(hermitian_operator)) {
        // every generated frequency is a multiple of 0.1, so 2π/0.1 is a common period
        let period = 2.0 * std::f64::consts::PI / 0.1;
        let n = 4000;
        let mut acc = linalg::zeros(d);
        for k in 0..n {
            acc += f.evaluate(period * k as f64 / n as f64);
        }
        acc /= Complex64::new(n as f64, 0.0);
        prop_assert!(max_abs(&(acc - f.time_average())) <= 1e-10);
    }
}

#[test]
fn representative_is_the_smallest_frequency() {
    let x = pauli::sigma_x();
    let op = FourierOperator::from_modes(2, [(1.0 + 4e-10, x.clone()), (1.0, x.clone()), (1.0 + 8e-10, x.clone())]).unwrap();
    assert_eq!(op.frequencies(), vec![1.0]);
    assert!(max_abs(&(op.coefficient(1.0).unwrap() - x.scale(3.0))) < 1e-15);
}

#[test]
fn near_dc_mode_snaps_to_zero() {
    let op = FourierOperator::from_modes(2, [(5e-10, pauli::sigma_z())]).unwrap();
    assert_eq!(op.frequencies(), vec![0.0]);
}

#[test]
fn tiny_coefficients_are_dropped() {
    let op = FourierOperator::from_modes(2, [(1.0, pauli::sigma_z().scale(1e-15))]).unwrap();
    assert!(op.is_empty());
}

#[test]
fn non_finite_input_rejected() {
    assert!(FourierOperator::from_modes(2, [(f64::NAN, pauli::sigma_z())]).is_err());
    assert!(FourierOperator::from_modes(2, [(1.0, pauli::sigma_z().scale(f64::INFINITY))]).is_err());
}

#[test]
fn rescaled_time_evaluates_at_scaled_argument() {
    let op = FourierOperator::hermitian_pair(0.7, pauli::sigma_plus()).unwrap();
    let r = op.rescale_time(0.1);
    for s in [0.0, 0.3, 2.0] {
        assert!(max_abs(&(r.evaluate(s) - op.evaluate(s / 0.1))) < 1e-14);
    }
}
