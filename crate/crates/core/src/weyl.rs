//! Functions on phase space, the Schrödinger representation and the Weyl
//! transform.
//!
//! The representation acts on `L²(G)` (counting measure, basis = indicators
//! of group elements in enumeration order) by
//!
//! ```text
//! ρ(x, χ) φ(y) = χ(y) · φ(y − x)
//! ```
//!
//! so `ρ(x,χ)ρ(x',χ') = conj(χ'(x)) · ρ(x+x', χχ')`. With this cocycle the
//! Weyl transform `W(f) = Σ_ω f(ω) ρ(ω) · (1/|G|)` turns twisted
//! convolution into operator multiplication and is an isometry from
//! `L²(G×Ĝ)` onto the Hilbert–Schmidt operators.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::fourier::GroupFft;
use crate::group::{FiniteAbelianGroup, PhasePoint};
use crate::json;
use crate::linalg::{self, CMatrix};

/// A complex function on `G × Ĝ`, stored in phase-space enumeration order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PhaseFunctionRepr", into = "PhaseFunctionRepr")]
pub struct PhaseFunction {
    group: FiniteAbelianGroup,
    values: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct PhaseFunctionRepr {
    group: FiniteAbelianGroup,
    #[serde(with = "json::complex_vec")]
    values: Vec<Complex64>,
}

impl TryFrom<PhaseFunctionRepr> for PhaseFunction {
    type Error = Error;

    fn try_from(r: PhaseFunctionRepr) -> Result<Self> {
        PhaseFunction::new(r.group, r.values)
    }
}

impl From<PhaseFunction> for PhaseFunctionRepr {
    fn from(f: PhaseFunction) -> Self {
        PhaseFunctionRepr { group: f.group, values: f.values }
    }
}

impl PhaseFunction {
    pub fn new(group: FiniteAbelianGroup, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != group.phase_len() {
            return Err(Error::DimensionMismatch { expected: group.phase_len(), found: values.len() });
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("phase function"));
        }
        Ok(Self { group, values })
    }

    pub fn zeros(group: &FiniteAbelianGroup) -> Self {
        Self { group: group.clone(), values: vec![Complex64::default(); group.phase_len()] }
    }

    pub fn constant(group: &FiniteAbelianGroup, c: Complex64) -> Self {
        Self { group: group.clone(), values: vec![c; group.phase_len()] }
    }

    pub fn from_fn(group: &FiniteAbelianGroup, f: impl FnMut(usize) -> Complex64) -> Self {
        Self { group: group.clone(), values: (0..group.phase_len()).map(f).collect() }
    }

    /// `c · δ_ω` at flat index `index`.
    pub fn delta(group: &FiniteAbelianGroup, index: usize, c: Complex64) -> Self {
        let mut f = Self::zeros(group);
        f.values[index] = c;
        f
    }

    /// The unit of twisted convolution, `|G| · δ_{(e,1)}`.
    pub fn twisted_identity(group: &FiniteAbelianGroup) -> Self {
        Self::delta(group, 0, Complex64::new(group.order() as f64, 0.0))
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn at(&self, point: &PhasePoint) -> Result<Complex64> {
        Ok(self.values[self.group.phase_index(point)?])
    }

    pub fn map(&self, mut op: impl FnMut(Complex64) -> Complex64) -> Self {
        Self { group: self.group.clone(), values: self.values.iter().map(|&z| op(z)).collect() }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|z| z * c)
    }

    pub fn zip_with(&self, other: &Self, mut op: impl FnMut(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.group.ensure_same(&other.group)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| op(a, b)).collect();
        Ok(Self { group: self.group.clone(), values })
    }

    pub fn pointwise_mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `(Σ_ω |f(ω)|^p / |G|)^{1/p}`, or `max |f|` for p = ∞.
    pub fn norm(&self, p: Exponent) -> f64 {
        p.weighted_norm_of(self.values.iter().map(|z| z.norm()), self.group.phase_weight())
    }

    pub fn max_abs(&self) -> f64 {
        self.norm(Exponent::Infinite)
    }

    /// `‖self − other‖₂ / ‖other‖₂`.
    pub fn relative_l2_error(&self, other: &Self) -> Result<f64> {
        let diff = self.sub(other)?.norm(Exponent::TWO);
        Ok(diff / other.norm(Exponent::TWO).max(f64::MIN_POSITIVE))
    }
}

/// `L^p(G×Ĝ)` norm with respect to the phase-space Haar measure.
pub fn lp_norm(f: &PhaseFunction, p: f64) -> Result<f64> {
    Ok(f.norm(Exponent::new(p)?))
}

/// A `|G|×|G|` operator on `L²(G)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeylOperator {
    group: FiniteAbelianGroup,
    matrix: CMatrix,
}

impl WeylOperator {
    pub fn new(group: &FiniteAbelianGroup, matrix: CMatrix) -> Result<Self> {
        let n = group.order();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: matrix.nrows().max(matrix.ncols()) });
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("operator"));
        }
        Ok(Self { group: group.clone(), matrix })
    }

    pub fn identity(group: &FiniteAbelianGroup) -> Self {
        Self { group: group.clone(), matrix: CMatrix::identity(group.order(), group.order()) }
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.group.ensure_same(&other.group)?;
        Ok(Self { group: self.group.clone(), matrix: &self.matrix * &other.matrix })
    }

    /// Row-major `[[re, im], …]`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(json::matrix_to_pairs(&self.matrix)).expect("pairs serialize")
    }

    pub fn from_json(group: &FiniteAbelianGroup, text: &str) -> Result<Self> {
        let pairs: Vec<[f64; 2]> = serde_json::from_str(text)?;
        let m = json::matrix_from_pairs(&pairs).ok_or(Error::DimensionMismatch {
            expected: group.phase_len(),
            found: pairs.len(),
        })?;
        Self::new(group, m)
    }
}

/// Matrix of `ρ(ω)` for the phase point with flat index `index`.
pub(crate) fn rho_matrix(group: &FiniteAbelianGroup, index: usize) -> CMatrix {
    let n = group.order();
    let (x, a) = (index / n, index % n);
    let mut m = CMatrix::zeros(n, n);
    for row in 0..n {
        m[(row, group.sub_idx(row, x))] = group.pairing(a, row);
    }
    m
}

pub fn schrodinger_rep(point: &PhasePoint) -> WeylOperator {
    let group = point.group();
    let index = group.phase_index(point).expect("phase point components share a group");
    WeylOperator { group: group.clone(), matrix: rho_matrix(group, index) }
}

/// `W(f) = Σ_ω f(ω) ρ(ω) / |G|`, accumulated directly (`O(|G|³)`).
pub fn weyl_transform(f: &PhaseFunction) -> WeylOperator {
    let group = f.group();
    let n = group.order();
    let w = group.phase_weight();
    let table = group.pairing_table();
    let mut m = CMatrix::zeros(n, n);
    for x in 0..n {
        for a in 0..n {
            let c = f.values[x * n + a] * w;
            if c == Complex64::default() {
                continue;
            }
            let chi = &table[a * n..(a + 1) * n];
            for row in 0..n {
                m[(row, group.sub_idx(row, x))] += c * chi[row];
            }
        }
    }
    WeylOperator { group: group.clone(), matrix: m }
}

/// Same operator as [`weyl_transform`], via one inverse character transform
/// per shift `x`: column `row − x` of row `row` receives `Σ_χ f(x,χ)χ(row)/|G|`.
pub fn weyl_transform_fft(f: &PhaseFunction) -> WeylOperator {
    let group = f.group();
    weyl_transform_fft_with(f, &GroupFft::new(group))
}

pub(crate) fn weyl_transform_fft_with(f: &PhaseFunction, fft: &GroupFft) -> WeylOperator {
    let group = f.group();
    let n = group.order();
    let w = group.phase_weight();
    let mut m = CMatrix::zeros(n, n);
    let mut line = Vec::with_capacity(n);
    let mut scratch = Vec::new();
    for x in 0..n {
        line.clear();
        line.extend_from_slice(&f.values[x * n..(x + 1) * n]);
        fft.inverse(&mut line, &mut scratch);
        for row in 0..n {
            m[(row, group.sub_idx(row, x))] = line[row] * w;
        }
    }
    WeylOperator { group: group.clone(), matrix: m }
}

/// `f(ω) = tr(ρ(ω)* A)`, the exact inverse of [`weyl_transform`].
pub fn weyl_inverse(a: &WeylOperator) -> PhaseFunction {
    let group = a.group();
    let n = group.order();
    let table = group.pairing_table();
    let mut values = vec![Complex64::default(); n * n];
    for x in 0..n {
        for row in 0..n {
            let entry = a.matrix[(row, group.sub_idx(row, x))];
            if entry == Complex64::default() {
                continue;
            }
            for ch in 0..n {
                values[x * n + ch] += table[ch * n + row].conj() * entry;
            }
        }
    }
    PhaseFunction { group: group.clone(), values }
}

/// [`weyl_inverse`] with a forward character transform per shift.
pub fn weyl_inverse_fft(a: &WeylOperator) -> PhaseFunction {
    weyl_inverse_fft_with(a, &GroupFft::new(a.group()))
}

pub(crate) fn weyl_inverse_fft_with(a: &WeylOperator, fft: &GroupFft) -> PhaseFunction {
    let group = a.group();
    let n = group.order();
    let mut values = Vec::with_capacity(n * n);
    let mut line = vec![Complex64::default(); n];
    let mut scratch = Vec::new();
    for x in 0..n {
        for row in 0..n {
            line[row] = a.matrix[(row, group.sub_idx(row, x))];
        }
        fft.forward(&mut line, &mut scratch);
        values.extend_from_slice(&line);
    }
    PhaseFunction { group: group.clone(), values }
}

/// Inverse for a raw matrix; fails unless it is `|G|×|G|`.
pub fn weyl_inverse_matrix(group: &FiniteAbelianGroup, m: CMatrix) -> Result<PhaseFunction> {
    Ok(weyl_inverse(&WeylOperator::new(group, m)?))
}

pub fn schatten_norm(a: &WeylOperator, p: f64) -> Result<f64> {
    Ok(linalg::schatten_norm(&a.matrix, Exponent::new(p)?))
}

/// `‖f‖_{L^p} − ‖W(f)‖_{S_{p'}}` for `1 ≤ p ≤ 2`.
pub fn hausdorff_young_margin(f: &PhaseFunction, p: f64) -> Result<f64> {
    if !(1.0..=2.0).contains(&p) {
        return Err(Error::InvalidExponent(format!("Hausdorff-Young needs 1 <= p <= 2, got {p}")));
    }
    let p = Exponent::new(p)?;
    Ok(f.norm(p) - linalg::schatten_norm(weyl_transform(f).matrix(), p.conjugate()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::Fixtures;

    fn groups() -> Vec<FiniteAbelianGroup> {
        [vec![2], vec![3], vec![4], vec![2, 2], vec![6]]
            .into_iter()
            .map(|o| FiniteAbelianGroup::new(o).unwrap())
            .collect()
    }

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn rho_small_cases() {
        let z2 = FiniteAbelianGroup::cyclic(2).unwrap();
        let pt = |x, a| PhasePoint::new(z2.element(&[x]).unwrap(), z2.character(&[a]).unwrap()).unwrap();
        let id = schrodinger_rep(&pt(0, 0));
        assert_eq!(id.matrix(), &CMatrix::identity(2, 2));
        let swap = schrodinger_rep(&pt(1, 0));
        assert_eq!(swap.matrix(), &CMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0].map(|v| Complex64::new(v, 0.0))));
        let sign = schrodinger_rep(&pt(0, 1));
        assert!((sign.matrix() - CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![one(), -one()]))).norm() < 1e-15);
    }

    #[test]
    fn projective_law_and_unitarity() {
        for g in groups() {
            let n = g.order();
            for i in 0..g.phase_len() {
                let ri = rho_matrix(&g, i);
                let gram = ri.adjoint() * &ri;
                assert!((gram - CMatrix::identity(n, n)).norm() < 1e-12);
                let (x, _) = (i / n, i % n);
                for j in 0..g.phase_len() {
                    let (x2, a2) = (j / n, j % n);
                    let sum = g.add_idx(x, x2) * n + g.add_idx(i % n, a2);
                    let expected = rho_matrix(&g, sum) * g.pairing(a2, x).conj();
                    assert!((&ri * rho_matrix(&g, j) - expected).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn hilbert_schmidt_orthogonality() {
        // <ρ(ω), ρ(ω')>_HS = |G| δ, by brute-force traces.
        for g in groups() {
            for i in 0..g.phase_len() {
                for j in 0..g.phase_len() {
                    let ip = (rho_matrix(&g, i).adjoint() * rho_matrix(&g, j)).trace();
                    let expected = if i == j { g.order() as f64 } else { 0.0 };
                    assert!((ip - Complex64::new(expected, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn transform_of_scaled_delta_is_identity() {
        for g in groups() {
            let e = PhaseFunction::twisted_identity(&g);
            assert!((weyl_transform(&e).matrix() - CMatrix::identity(g.order(), g.order())).norm() < 1e-12);
            assert_eq!(weyl_transform(&PhaseFunction::zeros(&g)).matrix(), &CMatrix::zeros(g.order(), g.order()));
        }
    }

    #[test]
    fn inverse_examples() {
        for g in groups() {
            let n = g.order() as f64;
            let f = weyl_inverse(&WeylOperator::identity(&g));
            let expected = PhaseFunction::delta(&g, 0, Complex64::new(n, 0.0));
            assert!(f.sub(&expected).unwrap().max_abs() < 1e-12);
            for i in [1, g.phase_len() - 1] {
                let a = WeylOperator::new(&g, rho_matrix(&g, i)).unwrap();
                let expected = PhaseFunction::delta(&g, i, Complex64::new(n, 0.0));
                assert!(weyl_inverse(&a).sub(&expected).unwrap().max_abs() < 1e-12);
            }
        }
    }

    #[test]
    fn round_trips_and_fast_path() {
        let mut fx = Fixtures::new(11);
        for g in groups() {
            for _ in 0..20 {
                let f = fx.phase_function(&g);
                let a = weyl_transform(&f);
                assert!(weyl_inverse(&a).relative_l2_error(&f).unwrap() < 1e-10);
                assert!(linalg::relative_frobenius(weyl_transform_fft(&f).matrix(), a.matrix()) < 1e-10);
                assert!(weyl_inverse_fft(&a).relative_l2_error(&f).unwrap() < 1e-10);

                let m = WeylOperator::new(&g, fx.matrix(g.order())).unwrap();
                let back = weyl_transform(&weyl_inverse(&m));
                assert!(linalg::relative_frobenius(back.matrix(), m.matrix()) < 1e-10);
            }
        }
    }

    #[test]
    fn plancherel_and_hausdorff_young() {
        let mut fx = Fixtures::new(5);
        let z3 = FiniteAbelianGroup::cyclic(3).unwrap();
        for _ in 0..50 {
            let f = fx.phase_function(&z3);
            let s2 = schatten_norm(&weyl_transform(&f), 2.0).unwrap();
            let l2 = lp_norm(&f, 2.0).unwrap();
            assert!((s2 - l2).abs() <= 1e-10 * l2);
            assert!(hausdorff_young_margin(&f, 2.0).unwrap().abs() <= 1e-10 * l2);
            for p in [1.0, 1.2, 4.0 / 3.0, 1.5] {
                assert!(hausdorff_young_margin(&f, p).unwrap() >= -1e-10 * lp_norm(&f, p).unwrap());
            }
        }
        let g = FiniteAbelianGroup::cyclic(4).unwrap();
        let d = PhaseFunction::delta(&g, 5, Complex64::new(0.0, 2.0));
        assert!(hausdorff_young_margin(&d, 1.0).unwrap().abs() < 1e-12);
        assert!(hausdorff_young_margin(&d, 2.5).is_err());
    }

    #[test]
    fn lp_norm_examples() {
        let g = FiniteAbelianGroup::new(vec![2, 3]).unwrap();
        let d = PhaseFunction::delta(&g, 7, one());
        assert!((lp_norm(&d, 1.0).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        let c = PhaseFunction::constant(&g, one());
        for p in [1.0, 1.5, 2.0, 3.0] {
            assert!((lp_norm(&c, p).unwrap() - 6f64.powf(1.0 / p)).abs() < 1e-12);
        }
        assert_eq!(lp_norm(&c, f64::INFINITY).unwrap(), 1.0);
        assert!(lp_norm(&c, 0.5).is_err());
    }

    #[test]
    fn dimension_checks() {
        let g = FiniteAbelianGroup::cyclic(3).unwrap();
        assert!(PhaseFunction::new(g.clone(), vec![one(); 8]).is_err());
        assert!(PhaseFunction::new(g.clone(), vec![Complex64::new(f64::NAN, 0.0); 9]).is_err());
        assert!(weyl_inverse_matrix(&g, CMatrix::zeros(2, 2)).is_err());
        let z2 = FiniteAbelianGroup::cyclic(2).unwrap();
        assert!(WeylOperator::identity(&g).compose(&WeylOperator::identity(&z2)).is_err());
    }

    #[test]
    fn operator_json() {
        let g = FiniteAbelianGroup::cyclic(2).unwrap();
        let a = WeylOperator::new(&g, rho_matrix(&g, 3)).unwrap();
        let text = a.to_json().to_string();
        assert_eq!(WeylOperator::from_json(&g, &text).unwrap(), a);
        let f = PhaseFunction::delta(&g, 1, Complex64::new(1.0, -2.0));
        let text = serde_json::to_string(&f).unwrap();
        assert!(text.starts_with(r#"{"group":{"orders":[2]},"values":[[0.0,0.0],[1.0,-2.0]"#));
        assert_eq!(serde_json::from_str::<PhaseFunction>(&text).unwrap(), f);
    }
}
