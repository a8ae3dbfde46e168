#![allow(dead_code)]

use num_complex::Complex64;
use proptest::prelude::*;
use qat::{FourierOperator, OperatorMatrix};

/// Large enough for any generated dimension.
pub const MAX_DIM: usize = 6;

/// Frequencies used for random operators; pairwise sums and differences stay
/// away from zero unless they cancel exactly.
pub const FREQS: [f64; 4] = [0.5, 1.3, 2.1, 3.7];

pub fn matrix(dim: usize, raw: &[f64]) -> OperatorMatrix {
    OperatorMatrix::from_fn(dim, dim, |i, j| {
        let k = 2 * (i * MAX_DIM + j);
        Complex64::new(raw[k], raw[k + 1])
    })
}

pub fn hermitian(dim: usize, raw: &[f64]) -> OperatorMatrix {
    let m = matrix(dim, raw);
    (&m + m.adjoint()).scale(0.5)
}

fn entries() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0_f64, 2 * MAX_DIM * MAX_DIM)
}

/// Hermitian operator: a DC block plus up to three drive pairs.
pub fn hermitian_operator(dim: usize) -> impl Strategy<Value = FourierOperator> {
    (entries(), prop::collection::vec((0..FREQS.len(), entries()), 1..=3)).prop_map(move |(dc, pairs)| {
        let mut op = FourierOperator::constant(hermitian(dim, &dc));
        for (f, raw) in pairs {
            op = op.add(&FourierOperator::hermitian_pair(FREQS[f], matrix(dim, &raw)).unwrap()).unwrap();
        }
        op
    })
}

/// Purely oscillating Hermitian operator (no DC block, no slow modes).
pub fn fast_operator(dim: usize) -> impl Strategy<Value = FourierOperator> {
    prop::collection::vec((0..FREQS.len(), entries()), 1..=3).prop_map(move |pairs| {
        let mut op = FourierOperator::zero(dim);
        for (f, raw) in pairs {
            op = op.add(&FourierOperator::hermitian_pair(FREQS[f], matrix(dim, &raw)).unwrap()).unwrap();
        }
        op
    })
}

pub fn dim_and<F, S>(f: F) -> impl Strategy<Value = (usize, S::Value)>
where
    F: Fn(usize) -> S + Clone + 'static,
    S: Strategy + 'static,
{
    (2..=MAX_DIM).prop_flat_map(move |d| (Just(d), f(d)))
}

pub fn max_abs(m: &OperatorMatrix) -> f64 {
    m.iter().fold(0.0_f64, |a, z| a.max(z.norm()))
}
