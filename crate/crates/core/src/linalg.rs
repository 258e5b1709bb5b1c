//! Dense complex matrix helpers built on `nalgebra`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::exponent::Exponent;

pub type CMatrix = DMatrix<Complex64>;

/// Relative cutoff below which trailing singular values are treated as zero.
pub const SINGULAR_CUTOFF: f64 = 1e-12;

pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = a.clone().singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// ℓ^p norm of the singular values, with values below
/// `SINGULAR_CUTOFF · σ_max` dropped first.
pub fn schatten_norm(a: &CMatrix, p: Exponent) -> f64 {
    let s = singular_values(a);
    let top = s.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0.0;
    }
    if p.is_infinite() {
        return top;
    }
    let cutoff = SINGULAR_CUTOFF * top;
    p.norm_of(s.into_iter().filter(|&v| v > cutoff))
}

pub fn operator_norm(a: &CMatrix) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

pub fn frobenius(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `‖a − b‖_F / max(‖b‖_F, tiny)`.
pub fn relative_frobenius(a: &CMatrix, b: &CMatrix) -> f64 {
    frobenius(&(a - b)) / frobenius(b).max(f64::MIN_POSITIVE)
}

/// Kronecker product with `a`'s entries selecting blocks.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Eigenpairs of a Hermitian matrix, eigenvalues in descending order.
///
/// The singular-vector routines below go through this instead of
/// `nalgebra`'s SVD, whose singular vectors are unreliable for
/// rank-deficient input.
pub fn hermitian_eigen(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = h.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(h.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Orthonormalizes `cols` in order (modified Gram–Schmidt), then fills up
/// to `n` columns from the standard basis.
fn complete_orthonormal(cols: Vec<DVector<Complex64>>, n: usize) -> CMatrix {
    let mut basis: Vec<DVector<Complex64>> = Vec::with_capacity(n);
    let candidates = cols.into_iter().chain((0..n).map(|i| {
        let mut e = DVector::zeros(n);
        e[i] = Complex64::new(1.0, 0.0);
        e
    }));
    for mut v in candidates {
        if basis.len() == n {
            break;
        }
        for _ in 0..2 {
            for b in &basis {
                let c = b.dotc(&v);
                v -= b * c;
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            basis.push(v / Complex64::new(norm, 0.0));
        }
    }
    CMatrix::from_columns(&basis)
}

/// Unitary factor `UV*` of the polar decomposition of a square matrix.
pub fn polar_unitary(a: &CMatrix) -> CMatrix {
    let n = a.ncols();
    let (lambda, v) = hermitian_eigen(&(a.adjoint() * a));
    let top = lambda.first().copied().unwrap_or(0.0).max(0.0).sqrt();
    let mut cols = Vec::with_capacity(n);
    for (k, &l) in lambda.iter().enumerate() {
        let sigma = l.max(0.0).sqrt();
        if top == 0.0 || sigma <= 1e-10 * top {
            break;
        }
        cols.push(a * v.column(k) / Complex64::new(sigma, 0.0));
    }
    complete_orthonormal(cols, n) * v.adjoint()
}

/// Top singular triple `(σ, u, v)` with `a v = σ u`.
pub fn top_singular(a: &CMatrix) -> (f64, DVector<Complex64>, DVector<Complex64>) {
    let (_, vecs) = hermitian_eigen(&(a.adjoint() * a));
    let v = vecs.column(0).into_owned();
    let av = a * &v;
    let sigma = av.norm();
    let u = if sigma > 0.0 {
        av / Complex64::new(sigma, 0.0)
    } else {
        let mut e = DVector::zeros(a.nrows());
        e[0] = Complex64::new(1.0, 0.0);
        e
    };
    (sigma, u, v)
}

/// Orthonormal basis (columns) of the null space of `a`, taking singular
/// values at most `cutoff · σ_max` as zero.
pub fn null_space(a: &CMatrix, cutoff: f64) -> CMatrix {
    let (lambda, v) = hermitian_eigen(&(a.adjoint() * a));
    let top = lambda.first().copied().unwrap_or(0.0).max(0.0).sqrt();
    let cols: Vec<usize> =
        (0..lambda.len()).filter(|&k| top == 0.0 || lambda[k].max(0.0).sqrt() <= cutoff * top).collect();
    CMatrix::from_fn(a.ncols(), cols.len(), |r, c| v[(r, cols[c])])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn schatten_examples() {
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(3.0), c(4.0)]));
        assert_relative_eq!(schatten_norm(&d, Exponent::TWO), 5.0, epsilon = 1e-12);
        assert_relative_eq!(schatten_norm(&d, Exponent::Infinite), 4.0, epsilon = 1e-12);
        let id = CMatrix::identity(5, 5);
        assert_relative_eq!(schatten_norm(&id, Exponent::ONE), 5.0, epsilon = 1e-12);
        assert_eq!(schatten_norm(&CMatrix::zeros(3, 3), Exponent::ONE), 0.0);
    }

    #[test]
    fn unitary_invariance() {
        let a = CMatrix::from_fn(3, 3, |i, j| Complex64::new((i * 3 + j) as f64 - 4.0, (i as f64) - (j as f64) * 0.5));
        let u = polar_unitary(&CMatrix::from_fn(3, 3, |i, j| Complex64::new(((i + 2 * j) % 5) as f64, (i * j) as f64)));
        for p in [Exponent::ONE, Exponent::Finite(1.5), Exponent::TWO, Exponent::Infinite] {
            assert_relative_eq!(schatten_norm(&(&u * &a), p), schatten_norm(&a, p), max_relative = 1e-10);
        }
    }

    #[test]
    fn rank_deficient_factorizations() {
        let mut fx = crate::random::Fixtures::new(3);
        for n in 2..6 {
            for rank in 0..=n {
                let a = CMatrix::from_fn(n, rank, |_, _| fx.complex()) * CMatrix::from_fn(rank, n, |_, _| fx.complex());
                let w = polar_unitary(&a);
                assert!((w.adjoint() * &w - CMatrix::identity(n, n)).norm() < 1e-10);
                // Polar factor: W* A is positive semidefinite with trace ‖A‖_1.
                let tr: Complex64 = (w.adjoint() * &a).trace();
                assert!((tr.re - schatten_norm(&a, Exponent::ONE)).abs() < 1e-8 * (1.0 + tr.re) && tr.im.abs() < 1e-8);
                let (s, _, _) = top_singular(&a);
                assert!((s - operator_norm(&a)).abs() < 1e-10 * (1.0 + s));
                let ns = null_space(&a, 1e-6);
                assert_eq!(ns.ncols(), n - rank);
                assert!((&a * &ns).norm() < 1e-8 * (1.0 + a.norm()));
            }
        }
    }

    #[test]
    fn top_singular_triple() {
        let a = CMatrix::from_fn(3, 2, |i, j| Complex64::new(i as f64 + 1.0, j as f64 - 0.5));
        let (s, u, v) = top_singular(&a);
        let av = &a * &v;
        for i in 0..3 {
            assert!((av[i] - u[i] * s).norm() < 1e-10);
        }
    }
}
