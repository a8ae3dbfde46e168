use num_complex::Complex64;
use qat::linalg::{self, pauli, OperatorMatrix};
use qat::metrics::{error_report, population_series};
use qat::oracle::magnus_convergence_bound;
use qat::systems;
use qat::{integrate_exact, FourierOperator, IntegratorConfig, IntegratorMethod, OracleError};

fn drive() -> FourierOperator {
    let a = OperatorMatrix::from_fn(3, 3, |i, j| Complex64::new((i as f64 - j as f64) * 0.3, 0.1 * (i + 2 * j) as f64));
    FourierOperator::hermitian_pair(1.7, a)
        .unwrap()
        .add(&FourierOperator::constant(OperatorMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(0.2, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(-0.5, 0.0),
        ]))))
        .unwrap()
}

#[test]
fn methods_agree_on_a_generic_drive() {
    let h = drive();
    let grid = linalg::linspace(0.0, 40.0, 81);
    let rk = integrate_exact(&h, &grid, &IntegratorConfig::with_method(IntegratorMethod::RkAdaptive)).unwrap();
    let mid = integrate_exact(&h, &grid, &IntegratorConfig::with_method(IntegratorMethod::MagnusMidpoint)).unwrap();
    assert!(error_report(0.0, 0, &rk, &mid).unwrap().sup < 1e-8);
    for p in rk.iter().chain(&mid) {
        assert!(p.unitarity_defect() <= 1e-12);
    }
}

#[test]
fn tighter_tolerance_moves_closer_to_the_exact_solution() {
    let (l, d) = (0.05, 0.2);
    let sys = systems::build_rabi_complex(l, d).unwrap();
    let h = sys.interaction_hamiltonian().unwrap();
    let grid = linalg::linspace(0.0, 500.0, 51);
    let ex = systems::RabiExact { lambda: l, detuning: d };
    let err = |tol: f64| {
        let cfg = IntegratorConfig { rel_tol: tol, ..IntegratorConfig::default() };
        let out = integrate_exact(&h, &grid, &cfg).unwrap();
        out.iter().map(|p| linalg::spectral_norm(&(&p.u - ex.propagator(p.s)))).fold(0.0, f64::max)
    };
    let (coarse, fine) = (err(1e-6), err(1e-11));
    assert!(fine < coarse, "{coarse:.3e} {fine:.3e}");
    assert!(fine < 1e-9);
}

#[test]
fn resonant_flop_is_sin_squared() {
    let l = 0.01;
    let sys = systems::build_rabi_complex(l, 0.0).unwrap();
    let grid = linalg::linspace(0.0, 400.0, 101);
    let out = integrate_exact(&sys.interaction_hamiltonian().unwrap(), &grid, &IntegratorConfig::default()).unwrap();
    let ground = nalgebra::DVector::from_vec(vec![linalg::ZERO, linalg::ONE]);
    let pop = population_series(&out, &ground, 0).unwrap();
    for (p, s) in pop.iter().zip(&grid) {
        assert!((p - (l * s).sin().powi(2)).abs() < 1e-10);
    }
}

#[test]
fn samples_sit_on_the_grid_and_start_at_identity() {
    let grid = [1.0, 1.5, 1.5, 4.0];
    let out = integrate_exact(&drive(), &grid, &IntegratorConfig::default()).unwrap();
    assert_eq!(out.iter().map(|p| p.s).collect::<Vec<_>>(), grid.to_vec());
    assert!(linalg::max_abs(&(&out[0].u - linalg::identity(3))) == 0.0);
    assert!(linalg::max_abs(&(&out[1].u - &out[2].u)) == 0.0);
}

#[test]
fn budget_and_config_errors() {
    let cfg = IntegratorConfig { max_steps: 5, ..IntegratorConfig::default() };
    assert!(matches!(integrate_exact(&drive(), &[0.0, 100.0], &cfg), Err(OracleError::StepBudget(5))));
    let bad = IntegratorConfig { rel_tol: 0.0, ..IntegratorConfig::default() };
    assert!(matches!(integrate_exact(&drive(), &[0.0, 1.0], &bad), Err(OracleError::InvalidConfig(_))));
    let lopsided = FourierOperator::constant(pauli::sigma_plus());
    assert!(matches!(integrate_exact(&lopsided, &[0.0, 1.0], &IntegratorConfig::default()), Err(OracleError::NotHermitian(_))));
    assert_eq!(integrate_exact(&drive(), &[], &IntegratorConfig::default()).unwrap_err(), OracleError::BadGrid);
}

#[test]
fn step_cap_resolves_the_fastest_mode() {
    let h = drive();
    let cap = IntegratorConfig::default().effective_max_step(&h);
    assert!(cap <= 2.0 * std::f64::consts::PI / (20.0 * 1.7) + 1e-15);
}

#[test]
fn convergence_bound_of_a_static_generator() {
    let h = FourierOperator::constant(pauli::sigma_z().scale(0.3));
    assert!((magnus_convergence_bound(&h, 0.0, 7.0) - 2.1).abs() < 1e-12);
    // |cos| averages to 2/π over whole periods
    let drive = FourierOperator::hermitian_pair(1.0, pauli::sigma_x().scale(0.5)).unwrap();
    let t = 20.0 * std::f64::consts::PI;
    // the kinks of |cos| limit Simpson to low order
    assert!((magnus_convergence_bound(&drive, 0.0, t) - 2.0 / std::f64::consts::PI * t).abs() < 1e-3 * t);
}
