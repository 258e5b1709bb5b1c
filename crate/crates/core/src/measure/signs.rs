//! Exact maximization of `‖Σ_k θ_k u_k‖_q` over sign vectors `θ ∈ {±1}^K`
//! for real atoms.
//!
//! Small families are enumerated exhaustively in Gray-code order. Larger
//! ones use the hyperplane arrangement `{u_k^⊥}`: the maximizing sign
//! vector is `sign⟨u_k, y⟩` for a dual maximizer `y`, so only the sign
//! vectors of full-dimensional cells need checking. Every cell has an
//! extreme ray cut out by `rank − 1` independent hyperplanes, and the cells
//! around that ray are the cells of the (lower-dimensional) arrangement of
//! the hyperplanes containing it.

use std::collections::HashSet;

use nalgebra::DMatrix;

use crate::exponent::Exponent;

/// Rank above which the arrangement enumeration is not attempted.
pub const ARRANGEMENT_MAX_RANK: usize = 4;

/// Relative rank cutoff; singular values come from eigenvalues of Gram
/// matrices and resolve only to about `√ε`.
const RANK_TOL: f64 = 1e-6;

/// Relative threshold for a normal to count as orthogonal to a ray.
const ZERO_TOL: f64 = 1e-9;

fn norm(v: &[f64], q: Exponent) -> f64 {
    q.norm_of(v.iter().map(|x| x.abs()))
}

fn signed_sum(atoms: &[Vec<f64>], signs: &[i8], dim: usize) -> Vec<f64> {
    let mut s = vec![0.0; dim];
    for (u, &t) in atoms.iter().zip(signs) {
        for (acc, &x) in s.iter_mut().zip(u) {
            *acc += t as f64 * x;
        }
    }
    s
}

/// Exhaustive search; `θ_0 = +1` is fixed since `θ` and `−θ` tie.
pub fn brute_force(atoms: &[Vec<f64>], dim: usize, q: Exponent) -> (f64, Vec<i8>) {
    let k = atoms.len();
    if k == 0 {
        return (0.0, Vec::new());
    }
    let mut signs = vec![1i8; k];
    let mut sum = signed_sum(atoms, &signs, dim);
    let mut best = (norm(&sum, q), signs.clone());
    for step in 1u64..(1u64 << (k - 1)) {
        // Gray code: flip the bit at the position of the lowest set bit.
        let bit = step.trailing_zeros() as usize + 1;
        signs[bit] = -signs[bit];
        let t = 2.0 * signs[bit] as f64;
        for (acc, &x) in sum.iter_mut().zip(&atoms[bit]) {
            *acc += t * x;
        }
        let v = norm(&sum, q);
        if v > best.0 {
            best = (v, signs.clone());
        }
    }
    best
}

/// Eigenpairs of a real symmetric matrix, eigenvalues descending.
fn sym_eigen(h: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i].max(0.0).sqrt()).collect();
    let vecs = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

/// Orthonormal basis (as columns) of the span of `vectors` in `ℝ^dim`.
fn span_basis(vectors: &[Vec<f64>], dim: usize) -> DMatrix<f64> {
    if vectors.is_empty() {
        return DMatrix::zeros(dim, 0);
    }
    let m = DMatrix::from_fn(dim, vectors.len(), |i, j| vectors[j][i]);
    let (s, u) = sym_eigen(&m * m.transpose());
    let top = s[0];
    let keep = s.iter().filter(|&&v| top > 0.0 && v > RANK_TOL * top).count();
    u.columns(0, keep).into_owned()
}

fn coordinates(basis: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (0..basis.ncols()).map(|j| (0..basis.nrows()).map(|i| basis[(i, j)] * v[i]).sum()).collect()
}

/// Unit vector orthogonal to the `r − 1` rows in `ℝ^r`, if they are independent.
fn null_vector(rows: &[&[f64]], r: usize) -> Option<Vec<f64>> {
    let m = DMatrix::from_fn(rows.len(), r, |i, j| rows[i][j]);
    let (s, v) = sym_eigen(m.transpose() * &m);
    if s[0] == 0.0 || s[r - 2] <= RANK_TOL * s[0] {
        return None;
    }
    Some(v.column(r - 1).iter().copied().collect())
}

/// Sign vectors of all full-dimensional cells of the central arrangement
/// with the given normals (zero normals get `+1`). `None` if the rank
/// exceeds [`ARRANGEMENT_MAX_RANK`].
pub fn cell_signs(normals: &[Vec<f64>], dim: usize) -> Option<Vec<Vec<i8>>> {
    let k = normals.len();
    let scale = normals.iter().map(|v| norm(v, Exponent::TWO)).fold(0.0, f64::max);
    let live: Vec<usize> = (0..k).filter(|&i| norm(&normals[i], Exponent::TWO) > ZERO_TOL * scale).collect();
    let basis = span_basis(&live.iter().map(|&i| normals[i].clone()).collect::<Vec<_>>(), dim);
    let r = basis.ncols();
    if r > ARRANGEMENT_MAX_RANK {
        return None;
    }
    let coords: Vec<Vec<f64>> = live.iter().map(|&i| coordinates(&basis, &normals[i])).collect();
    let mut out = HashSet::new();
    for sub in cells_full_rank(&coords, r) {
        let mut signs = vec![1i8; k];
        for (slot, &i) in live.iter().enumerate() {
            signs[i] = sub[slot];
        }
        out.insert(signs);
    }
    Some(out.into_iter().collect())
}

/// Cells of an arrangement whose nonzero normals span `ℝ^r`.
fn cells_full_rank(normals: &[Vec<f64>], r: usize) -> Vec<Vec<i8>> {
    let k = normals.len();
    match r {
        0 => return vec![vec![1; k]],
        1 => {
            let s: Vec<i8> = normals.iter().map(|c| if c[0] >= 0.0 { 1 } else { -1 }).collect();
            let neg = s.iter().map(|&x| -x).collect();
            return vec![s, neg];
        }
        _ => {}
    }
    let mut out = HashSet::new();
    let mut subset: Vec<usize> = (0..r - 1).collect();
    loop {
        let rows: Vec<&[f64]> = subset.iter().map(|&i| normals[i].as_slice()).collect();
        if let Some(y) = null_vector(&rows, r) {
            for dir in [1.0, -1.0] {
                let mut signs = vec![0i8; k];
                let mut zero_set = Vec::new();
                for (i, c) in normals.iter().enumerate() {
                    let t: f64 = dir * c.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>();
                    if t.abs() <= ZERO_TOL * norm(c, Exponent::TWO) {
                        zero_set.push(i);
                    } else {
                        signs[i] = if t > 0.0 { 1 } else { -1 };
                    }
                }
                // The zero set lives in y^⊥; recurse there.
                let sub_normals: Vec<Vec<f64>> = zero_set.iter().map(|&i| normals[i].clone()).collect();
                let subs = cell_signs(&sub_normals, r).expect("recursion lowers the rank");
                for sub in subs {
                    let mut full = signs.clone();
                    for (slot, &i) in zero_set.iter().enumerate() {
                        full[i] = sub[slot];
                    }
                    out.insert(full);
                }
            }
        }
        if !next_combination(&mut subset, k) {
            break;
        }
    }
    out.into_iter().collect()
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let m = c.len();
    for i in (0..m).rev() {
        if c[i] < n - m + i {
            c[i] += 1;
            for j in i + 1..m {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Exact maximum via the arrangement; `None` when the rank is too large.
pub fn by_arrangement(atoms: &[Vec<f64>], dim: usize, q: Exponent) -> Option<(f64, Vec<i8>)> {
    let cells = cell_signs(atoms, dim)?;
    let mut best = (0.0, vec![1i8; atoms.len()]);
    for signs in cells {
        let v = norm(&signed_sum(atoms, &signs, dim), q);
        if v > best.0 {
            best = (v, signs);
        }
    }
    Some(best)
}

/// Exact sign maximization: brute force up to `ceiling` atoms, arrangement
/// enumeration above.
pub fn max_signed_sum(atoms: &[Vec<f64>], dim: usize, q: Exponent, ceiling: usize) -> Option<(f64, Vec<i8>)> {
    if atoms.len() <= ceiling {
        Some(brute_force(atoms, dim, q))
    } else {
        by_arrangement(atoms, dim, q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::Fixtures;

    fn random_atoms(fx: &mut Fixtures, k: usize, d: usize) -> Vec<Vec<f64>> {
        (0..k).map(|_| (0..d).map(|_| fx.normal()).collect()).collect()
    }

    #[test]
    fn orthogonal_pair() {
        let atoms = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let (v, _) = brute_force(&atoms, 2, Exponent::TWO);
        assert!((v - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn arrangement_matches_brute_force() {
        let mut fx = Fixtures::new(21);
        for d in 1..=4 {
            for k in [1, 2, 3, 5, 9, 14] {
                for q in [Exponent::ONE, Exponent::TWO, Exponent::Finite(3.0), Exponent::Infinite] {
                    let atoms = random_atoms(&mut fx, k, d);
                    let exact = brute_force(&atoms, d, q).0;
                    let arr = by_arrangement(&atoms, d, q).unwrap().0;
                    assert!((exact - arr).abs() <= 1e-12 * exact.max(1.0), "d={d} k={k} q={q}: {exact} vs {arr}");
                }
            }
        }
    }

    #[test]
    fn arrangement_handles_degenerate_families() {
        // Parallel atoms, zero atoms and a rank-deficient span.
        let atoms = vec![
            vec![1.0, 2.0, 0.0],
            vec![-2.0, -4.0, 0.0],
            vec![0.0, 0.0, 0.0],
            vec![0.5, 0.0, 0.0],
            vec![1.0, 1.0, 0.0],
            vec![3.0, 6.0, 0.0],
        ];
        for q in [Exponent::ONE, Exponent::TWO, Exponent::Infinite] {
            let exact = brute_force(&atoms, 3, q).0;
            let arr = by_arrangement(&atoms, 3, q).unwrap().0;
            assert!((exact - arr).abs() < 1e-12, "q={q}");
        }
        // Three coplanar directions in R^3 plus one generic one.
        let atoms = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![1.0, 1.0, 0.0], vec![0.3, -0.2, 1.0]];
        let exact = brute_force(&atoms, 3, Exponent::TWO).0;
        assert!((exact - by_arrangement(&atoms, 3, Exponent::TWO).unwrap().0).abs() < 1e-12);
    }

    #[test]
    fn large_families_use_arrangement() {
        let mut fx = Fixtures::new(2);
        let atoms = random_atoms(&mut fx, 36, 3);
        let (v, signs) = max_signed_sum(&atoms, 3, Exponent::TWO, 20).unwrap();
        assert_eq!(signs.len(), 36);
        assert!((norm(&signed_sum(&atoms, &signs, 3), Exponent::TWO) - v).abs() < 1e-12);
        // No single sign flip improves the optimum.
        for i in 0..36 {
            let mut s = signs.clone();
            s[i] = -s[i];
            assert!(norm(&signed_sum(&atoms, &s, 3), Exponent::TWO) <= v + 1e-12);
        }
    }
}
