use std::f64::consts::PI;

use num_complex::Complex64;
use qat::linalg::{self, pauli, OperatorMatrix};
use qat::metrics::error_report;
use qat::propagator::*;
use qat::systems::{self, RabiExact};
use qat::{integrate_exact, FourierOperator, IntegratorConfig, PropagatorSample, SampleKind};

fn exact_rabi(lambda: f64, detuning: f64, grid: &[f64]) -> Vec<PropagatorSample> {
    let ex = RabiExact { lambda, detuning };
    grid.iter().map(|&s| PropagatorSample { s, u: ex.propagator(s), kind: SampleKind::Exact }).collect()
}

fn sup(a: &[PropagatorSample], b: &[PropagatorSample]) -> f64 {
    error_report(0.0, 0, a, b).unwrap().sup
}

fn three_level_drive() -> FourierOperator {
    let m = |re: &[f64], im: &[f64]| {
        OperatorMatrix::from_fn(3, 3, |i, j| Complex64::new(re[3 * i + j], im[3 * i + j]))
    };
    let a = m(&[0.1, 0.7, -0.3, 0.0, 0.2, 0.5, 0.4, -0.6, 0.0], &[0.0, 0.2, 0.1, -0.3, 0.0, 0.4, 0.0, 0.1, -0.2]);
    let b = m(&[0.0, 0.0, 0.9, 0.3, 0.0, 0.0, -0.2, 0.5, 0.1], &[0.5, 0.0, 0.0, 0.0, -0.4, 0.2, 0.3, 0.0, 0.0]);
    let dc = OperatorMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        Complex64::new(0.3, 0.0),
        Complex64::new(-0.1, 0.0),
        Complex64::new(-0.2, 0.0),
    ]));
    FourierOperator::hermitian_pair(1.0, a)
        .unwrap()
        .add(&FourierOperator::hermitian_pair(2.3, b).unwrap())
        .unwrap()
        .add(&FourierOperator::constant(dc))
        .unwrap()
}

#[test]
fn far_detuned_rabi_error_falls_with_order() {
    let (l, d) = (0.02, 0.3);
    let sys = systems::build_rabi_complex(l, d).unwrap();
    let grid = linalg::linspace(0.0, 1.0 / l, 401);
    let reference = exact_rabi(l, d, &grid);
    let errors: Vec<f64> = [2, 4, 6]
        .iter()
        .map(|&n| {
            let exp = sys.expand(n, None).unwrap();
            sup(&reference, &assemble_from(&exp, &grid, &EffectivePropagatorPlan::constant(), 0.0).unwrap())
        })
        .collect();
    assert!(errors[0] > errors[1] && errors[1] > errors[2], "{errors:?}");
    // leading errors scale like (λ/Λ)^{N−1}
    assert!(errors[0] < 10.0 * l / d && errors[2] < 10.0 * (l / d).powi(5), "{errors:?}");
}

#[test]
fn generic_three_level_drive_converges_to_the_oracle() {
    let h = three_level_drive();
    for l in [0.02, 0.01] {
        let grid = linalg::linspace(0.0, 1.0 / l, 201);
        let oracle = integrate_exact(&h.scale_real(l), &grid, &IntegratorConfig::default()).unwrap();
        let mut last = f64::INFINITY;
        for n in 1..=3 {
            let exp = qat::qat_expand(std::slice::from_ref(&h), &qat::ExpansionConfig::new(n, l, l)).unwrap();
            let plan = EffectivePropagatorPlan::auto(&exp).unwrap();
            let err = sup(&oracle, &assemble_from(&exp, &grid, &plan, 0.0).unwrap());
            assert!(err < last, "λ = {l}, N = {n}: {err:.3e} vs {last:.3e}");
            assert!(err < 20.0 * l.powi(n as i32), "λ = {l}, N = {n}: {err:.3e}");
            last = err;
        }
    }
}

#[test]
fn referenced_tracks_start_at_identity_and_compose() {
    let exp = systems::table3().expand(4, None).unwrap();
    let grid = [0.0, 0.7, 1.9, 4.4];
    let plan = EffectivePropagatorPlan::constant();
    let from0 = assemble_from(&exp, &grid, &plan, 0.0).unwrap();
    assert!(linalg::max_abs(&(&from0[0].u - linalg::identity(2))) < 1e-14);
    let from1 = assemble_from(&exp, &grid, &plan, 0.7).unwrap();
    // U(s, 0) = U(s, s₁) U(s₁, 0)
    for (a, b) in from0.iter().zip(&from1) {
        assert!(linalg::max_abs(&(&a.u - &b.u * &from0[1].u)) < 1e-13);
    }
}

#[test]
fn fast_part_is_periodic() {
    let sys = systems::table3();
    let d = sys.base_freqs[0].1;
    let exp = sys.expand(5, None).unwrap();
    let fast = FastTrack::new(&exp).unwrap();
    let period = 2.0 * PI / d;
    for s in [0.0, 0.4, 2.2] {
        assert!(linalg::max_abs(&(fast.at(s).u - fast.at(s + 3.0 * period).u)) < 1e-13);
    }
}

#[test]
fn effective_plans_agree() {
    for sys in [systems::fig4(), systems::fig5()] {
        let exp = sys.expand(2, None).unwrap();
        let grid = linalg::linspace(0.0, 300.0, 121);
        let constant = effective_track(&exp, &grid, &EffectivePropagatorPlan::constant()).unwrap();
        let ode = effective_track(&exp, &grid, &EffectivePropagatorPlan::slow_ode()).unwrap();
        assert!(sup(&constant, &ode) < 1e-9, "{}", sys.name);
    }
}

#[test]
fn exponential_pt_improves_with_its_order() {
    let exp = systems::fig4().expand(2, None).unwrap();
    let grid = linalg::linspace(0.0, 120.0, 101);
    let reference = effective_track(&exp, &grid, &EffectivePropagatorPlan::constant()).unwrap();
    let pt1 = effective_track(&exp, &grid, &EffectivePropagatorPlan::exponential_pt(1)).unwrap();
    let pt2 = effective_track(&exp, &grid, &EffectivePropagatorPlan::exponential_pt(2)).unwrap();
    let (e1, e2) = (sup(&reference, &pt1), sup(&reference, &pt2));
    assert!(e2 < e1 / 5.0, "{e1:.3e} {e2:.3e}");
}

#[test]
fn interaction_picture_against_definition() {
    let h0 = OperatorMatrix::from_fn(3, 3, |i, j| {
        let re = [[0.0, 0.2, -0.1], [0.2, 1.1, 0.3], [-0.1, 0.3, 2.4]][i][j];
        let im = [[0.0, 0.1, 0.0], [-0.1, 0.0, 0.2], [0.0, -0.2, 0.0]][i][j];
        Complex64::new(re, im)
    });
    let v = three_level_drive();
    let hi = interaction_picture(&h0, &v).unwrap();
    assert!(hi.hermitian_defect() < 1e-13);
    for s in [0.0, 0.9, 6.3, 31.0] {
        let u0 = linalg::expm_hermitian_unchecked(&h0, s);
        let direct = u0.adjoint() * v.evaluate(s) * &u0;
        assert!(linalg::max_abs(&(direct - hi.evaluate(s))) < 1e-11, "s = {s}");
    }
}

#[test]
fn gauge_transform_is_a_unitary_conjugation() {
    let exp = systems::table3().expand(4, None).unwrap();
    let h = exp.effective_hamiltonian(exp.lambda).unwrap().time_average();
    let g = magnus_gauge_transform(&exp, 1.3).unwrap();
    let (a, _) = linalg::eigh(&h);
    let (b, _) = linalg::eigh(&g);
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-14);
    }
    let fig4 = systems::fig4().expand(2, None).unwrap();
    assert!(matches!(magnus_gauge_transform(&fig4, 0.0), Err(PropagatorError::Unsupported(_))));
}

#[test]
fn nested_three_level_two_pass_matches_oracle() {
    let sys = systems::build_three_level_nested(1e-2).unwrap();
    let l = sys.lambda;
    let chain = renormalization_chain(&sys.interaction, l, &[(3, l), (2, l)]).unwrap();
    assert_eq!(chain.steps.len(), 1);
    let grid = linalg::linspace(0.0, 1.0 / (l * l), 201);
    let oracle = integrate_exact(&sys.interaction_hamiltonian().unwrap(), &grid, &IntegratorConfig::default()).unwrap();
    let plan = EffectivePropagatorPlan::auto(&chain.expansions[1]).unwrap();
    let two = assemble_two_pass(&chain.expansions[0], &chain.steps[0], &chain.expansions[1], &grid, &plan).unwrap();
    let u0 = two[0].u.clone();
    let two = referenced(&two, &u0);
    let single = sys.expand(3, None).unwrap();
    let one = assemble_from(&single, &grid, &EffectivePropagatorPlan::auto(&single).unwrap(), 0.0).unwrap();
    let (e2, e1) = (sup(&oracle, &two), sup(&oracle, &one));
    assert!(e2 < 3e-3, "two-pass {e2:.3e}");
    assert!(e1 < 1e-3, "single-pass {e1:.3e}");
}

#[test]
fn chain_terminations() {
    let table3 = systems::table3();
    let c = renormalization_chain(&table3.interaction, table3.lambda, &[(4, 0.0), (2, 0.0)]).unwrap();
    assert_eq!(c.termination, ChainTermination::FixedPoint { step: 1 });

    let fig4 = systems::fig4();
    let c = renormalization_chain(&fig4.interaction, fig4.lambda, &[(2, fig4.lambda), (2, fig4.lambda)]).unwrap();
    assert_eq!(c.termination, ChainTermination::NotRenormalizable { pass: 0 });

    let nested = systems::build_three_level_nested(1e-2).unwrap();
    let l = nested.lambda;
    let c = renormalization_chain(&nested.interaction, l, &[(3, l); 6]).unwrap();
    // the second pass absorbs the beat note and leaves a static generator
    assert_eq!(c.termination, ChainTermination::FixedPoint { step: 2 });
    assert!(c.steps.len() <= MAX_RENORMALIZATION_STEPS);
}

#[test]
fn matrix_exponential_guards() {
    let u = matrix_exp_hermitian(&pauli::sigma_x().scale(0.4), 2.0).unwrap();
    let want = linalg::identity(2).scale((0.8_f64).cos()) - pauli::sigma_x() * Complex64::new(0.0, (0.8_f64).sin());
    assert!(linalg::max_abs(&(u - want)) < 1e-14);
    assert!(matches!(matrix_exp_hermitian(&pauli::sigma_plus(), 1.0), Err(PropagatorError::NotHermitian(_))));
}
