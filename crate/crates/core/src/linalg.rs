//! Dense complex linear algebra helpers shared by the simulator and the
//! algorithm modules.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Default tolerance for unitarity checks.
pub const UNITARY_TOL: f64 = 1e-10;
/// Default tolerance for norm checks.
pub const NORM_TOL: f64 = 1e-12;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Builds a complex matrix from real row-major entries.
pub fn real_matrix(rows: usize, cols: usize, entries: &[f64]) -> CMatrix {
    CMatrix::from_row_iterator(rows, cols, entries.iter().map(|&x| c(x, 0.0)))
}

/// Max-entry deviation `max |U^dagger U - I|`.
pub fn unitarity_deviation(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let prod = m.adjoint() * m;
    let mut dev = 0.0f64;
    for i in 0..prod.nrows() {
        for j in 0..prod.ncols() {
            let target = if i == j { ONE } else { ZERO };
            dev = dev.max((prod[(i, j)] - target).norm());
        }
    }
    dev
}

pub fn check_unitary(m: &CMatrix, label: &str, tol: f64) -> Result<()> {
    let deviation = unitarity_deviation(m);
    if deviation > tol {
        return Err(Error::NonUnitary {
            label: label.to_string(),
            deviation,
        });
    }
    Ok(())
}

/// Max-entry distance between two matrices of equal shape.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

pub fn normalized(v: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = norm(v);
    if n == 0.0 || !n.is_finite() {
        return Err(Error::ZeroVector);
    }
    Ok(v.iter().map(|a| a / n).collect())
}

pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Phase-insensitive overlap `|<a|b>|^2 / (|a|^2 |b|^2)`.
pub fn fidelity(a: &[Complex64], b: &[Complex64]) -> f64 {
    let na = norm(a);
    let nb = norm(b);
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    inner(a, b).norm_sqr() / (na * na * nb * nb)
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// Eigendecomposition of a Hermitian matrix: ascending eigenvalues and the
/// matching orthonormal eigenvectors as columns.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), m.ncols(), |r, col| {
        eig.eigenvectors[(r, order[col])]
    });
    (values, vectors)
}

/// `f(H)` for Hermitian `H` through its eigendecomposition.
pub fn hermitian_function(m: &CMatrix, f: impl Fn(f64) -> Complex64) -> CMatrix {
    let (values, vectors) = hermitian_eigen(m);
    let diag = CMatrix::from_diagonal(&CVector::from_iterator(
        values.len(),
        values.iter().map(|&v| f(v)),
    ));
    &vectors * diag * vectors.adjoint()
}

pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

pub fn matrix_power(m: &CMatrix, power: usize) -> CMatrix {
    let mut acc = CMatrix::identity(m.nrows(), m.ncols());
    for _ in 0..power {
        acc = &acc * m;
    }
    acc
}

pub fn mat_vec(m: &CMatrix, v: &[Complex64]) -> Vec<Complex64> {
    (m * CVector::from_column_slice(v)).iter().copied().collect()
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut impl Rng) -> Complex64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-like random normalized vector.
pub fn random_state(dim: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..dim).map(|_| random_complex(rng)).collect();
        if let Ok(v) = normalized(&v) {
            return v;
        }
    }
}

/// Completes `first` (normalized internally) to a unitary whose first column
/// is `first`, using Gram–Schmidt on seeded random complex columns.
pub fn complete_unitary(first: &[Complex64], rng: &mut impl Rng) -> Result<CMatrix> {
    let dim = first.len();
    let mut columns: Vec<Vec<Complex64>> = vec![normalized(first)?];
    while columns.len() < dim {
        let mut v: Vec<Complex64> = (0..dim).map(|_| random_complex(rng)).collect();
        // two passes keep the basis orthonormal to machine precision
        for _ in 0..2 {
            for q in &columns {
                let proj = inner(q, &v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= proj * qi;
                }
            }
        }
        if norm(&v) < 1e-6 {
            continue;
        }
        columns.push(normalized(&v)?);
    }
    Ok(CMatrix::from_fn(dim, dim, |r, col| columns[col][r]))
}

pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> CMatrix {
    let first = random_state(dim, rng);
    complete_unitary(&first, rng).expect("random column is nonzero")
}

/// Random Hermitian matrix with the given spectrum.
pub fn hermitian_with_spectrum(spectrum: &[f64], rng: &mut impl Rng) -> CMatrix {
    let u = random_unitary(spectrum.len(), rng);
    let d = CMatrix::from_diagonal(&CVector::from_iterator(
        spectrum.len(),
        spectrum.iter().map(|&x| c(x, 0.0)),
    ));
    let h = &u * d * u.adjoint();
    // symmetrize away rounding
    (&h + h.adjoint()).map(|x| x * 0.5)
}

pub fn is_power_of_two(n: usize) -> bool {
    n != 0 && n & (n - 1) == 0
}

pub fn log2_exact(n: usize) -> Result<usize> {
    if !is_power_of_two(n) {
        return Err(Error::NotPowerOfTwo(n));
    }
    Ok(n.trailing_zeros() as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn completion_keeps_first_column_and_is_unitary() {
        let mut rng = rng_from_seed(3);
        let first = vec![c(0.6, 0.0), c(0.0, 0.8), ZERO, ZERO];
        let u = complete_unitary(&first, &mut rng).unwrap();
        assert!(unitarity_deviation(&u) < 1e-12);
        for r in 0..4 {
            assert!((u[(r, 0)] - first[r]).norm() < 1e-15);
        }
    }

    #[test]
    fn hermitian_function_reproduces_exponential() {
        let mut rng = rng_from_seed(11);
        let h = hermitian_with_spectrum(&[0.3, -1.2, 2.0], &mut rng);
        let via_eig = hermitian_function(&h, |x| c(0.0, x).exp());
        let via_pade = h.map(|x| x * c(0.0, 1.0)).exp();
        assert!(max_abs_diff(&via_eig, &via_pade) < 1e-12);
    }

    #[test]
    fn spectral_norm_of_scaled_unitary() {
        let mut rng = rng_from_seed(5);
        let u = random_unitary(4, &mut rng).map(|x| x * 0.7);
        assert!((spectral_norm(&u) - 0.7).abs() < 1e-12);
    }

    #[test]
    fn fidelity_ignores_global_phase() {
        let a = vec![c(0.6, 0.0), c(0.8, 0.0)];
        let phase = c(0.0, 1.0);
        let b: Vec<_> = a.iter().map(|x| x * phase).collect();
        assert!((fidelity(&a, &b) - 1.0).abs() < 1e-15);
    }
}
