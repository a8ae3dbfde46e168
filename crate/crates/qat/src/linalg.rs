//! Dense complex matrix helpers shared by every module.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>`. Exponentials of Hermitian
//! generators go through an eigendecomposition so the result is unitary to
//! machine precision.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type OperatorMatrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn zeros(dim: usize) -> OperatorMatrix {
    OperatorMatrix::zeros(dim, dim)
}

pub fn identity(dim: usize) -> OperatorMatrix {
    OperatorMatrix::identity(dim, dim)
}

/// Builds a matrix from row-major real entries.
pub fn from_real_rows(dim: usize, rows: &[f64]) -> OperatorMatrix {
    assert_eq!(rows.len(), dim * dim);
    OperatorMatrix::from_fn(dim, dim, |r, c| Complex64::new(rows[r * dim + c], 0.0))
}

/// `|row⟩⟨col|` in a `dim`-dimensional space.
pub fn ket_bra(dim: usize, row: usize, col: usize) -> OperatorMatrix {
    let mut m = zeros(dim);
    m[(row, col)] = ONE;
    m
}

/// Pauli matrices in the basis (|0⟩ = excited, |1⟩ = ground),
/// so that σ_z = diag(1, −1) and σ₊ = |0⟩⟨1|.
pub mod pauli {
    use super::*;

    pub fn sigma_x() -> OperatorMatrix {
        from_real_rows(2, &[0.0, 1.0, 1.0, 0.0])
    }

    pub fn sigma_y() -> OperatorMatrix {
        let mut m = zeros(2);
        m[(0, 1)] = -I;
        m[(1, 0)] = I;
        m
    }

    pub fn sigma_z() -> OperatorMatrix {
        from_real_rows(2, &[1.0, 0.0, 0.0, -1.0])
    }

    pub fn sigma_plus() -> OperatorMatrix {
        ket_bra(2, 0, 1)
    }

    pub fn sigma_minus() -> OperatorMatrix {
        ket_bra(2, 1, 0)
    }
}

pub fn commutator(a: &OperatorMatrix, b: &OperatorMatrix) -> OperatorMatrix {
    a * b - b * a
}

/// Largest entry modulus.
pub fn max_abs(m: &OperatorMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Largest singular value.
pub fn spectral_norm(m: &OperatorMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    if m.nrows() == 1 {
        return m[(0, 0)].norm();
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0_f64, |acc, &x| acc.max(x))
}

pub fn hermiticity_defect(m: &OperatorMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn unitarity_defect(u: &OperatorMatrix) -> f64 {
    max_abs(&(u.adjoint() * u - identity(u.nrows())))
}

pub fn is_finite(m: &OperatorMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues and the
/// unitary whose columns are the eigenvectors.
pub fn eigh(h: &OperatorMatrix) -> (Vec<f64>, OperatorMatrix) {
    let sym = (h + h.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&j| eig.eigenvalues[j]).collect();
    let vectors = OperatorMatrix::from_fn(h.nrows(), h.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// `exp(−i H t)` for Hermitian `H` (symmetrized before decomposition).
pub fn expm_hermitian_unchecked(h: &OperatorMatrix, t: f64) -> OperatorMatrix {
    let dim = h.nrows();
    if dim == 0 {
        return zeros(0);
    }
    let (values, v) = eigh(h);
    let mut scaled = v.clone();
    for (c, e) in values.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, -e * t);
        for r in 0..dim {
            scaled[(r, c)] *= phase;
        }
    }
    scaled * v.adjoint()
}

/// Nearest unitary in the polar sense: `U = W Σ V† ↦ W V†`.
pub fn polar_unitary(m: &OperatorMatrix) -> OperatorMatrix {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");
    u * v_t
}

/// Evenly spaced points on `[start, stop]` (both ends included).
pub fn linspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        n => {
            let step = (stop - start) / (n - 1) as f64;
            (0..n)
                .map(|k| if k == n - 1 { stop } else { start + step * k as f64 })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn pauli_algebra() {
        let sp = pauli::sigma_plus();
        let sm = pauli::sigma_minus();
        assert_eq!(commutator(&sp, &sm), pauli::sigma_z());
        assert_eq!(&sp + &sm, pauli::sigma_x());
        let xy = pauli::sigma_x() * pauli::sigma_y();
        assert!(max_abs(&(xy - pauli::sigma_z() * I)) < 1e-15);
    }

    #[test]
    fn exp_of_sigma_x_times_pi_is_minus_identity() {
        let u = expm_hermitian_unchecked(&pauli::sigma_x(), PI);
        assert!(max_abs(&(u + identity(2))) < 1e-14);
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let u = expm_hermitian_unchecked(&zeros(3), 2.5);
        assert!(max_abs(&(u - identity(3))) < 1e-15);
    }

    #[test]
    fn spectral_norm_of_rotating_drive_is_one() {
        let h = pauli::sigma_plus() * Complex64::from_polar(1.0, -0.7)
            + pauli::sigma_minus() * Complex64::from_polar(1.0, 0.7);
        assert!((spectral_norm(&h) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn polar_projection_restores_unitarity() {
        let u = expm_hermitian_unchecked(&pauli::sigma_y(), 0.3);
        let noisy = u.scale(1.0 + 1e-6);
        let fixed = polar_unitary(&noisy);
        assert!(unitarity_defect(&fixed) < 1e-15);
        assert!(max_abs(&(fixed - u)) < 1e-14);
    }

    #[test]
    fn linspace_hits_endpoints() {
        let g = linspace(0.0, 1.0, 5);
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }
}
