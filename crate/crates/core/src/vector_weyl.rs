//! Weyl transforms against vector measures, Weyl transforms of
//! matrix-valued functions, and amplification probes of linear maps.
//!
//! `W^ν(f) = Σ_ω f(ω) ρ(ω) ⊗ v_ω` carries no Haar weight (the atoms hold
//! the mass), while `W(f)` carries `1/|G|` per point. An element of
//! `B(L²(G)) ⊗ X` is stored as coordinate matrices `A_j` with
//! `Σ_j A_j ⊗ e_j`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::group::FiniteAbelianGroup;
use crate::json;
use crate::linalg::{self, CMatrix};
use crate::measure::{radon_nikodym, DualFunctional, VectorMeasure};
use crate::random::Fixtures;
use crate::weyl::{self, rho_matrix, PhaseFunction, WeylOperator};

/// Relative tolerance for "operator equals zero".
pub const ZERO_TOLERANCE: f64 = 1e-10;

/// Rank cutoff relative to `σ_max` for singular values computed directly.
const RANK_CUTOFF: f64 = 1e-10;

/// Cutoff for singular values obtained from eigenvalues of `A*A`, which
/// resolve only down to about `√ε · σ_max`.
const KERNEL_CUTOFF: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VectorWeylRepr", into = "VectorWeylRepr")]
pub struct VectorWeylOperator {
    group: FiniteAbelianGroup,
    coord_matrices: Vec<CMatrix>,
}

#[derive(Serialize, Deserialize)]
struct VectorWeylRepr {
    group: FiniteAbelianGroup,
    #[serde(with = "json::square_matrices")]
    coord_matrices: Vec<CMatrix>,
}

impl TryFrom<VectorWeylRepr> for VectorWeylOperator {
    type Error = Error;

    fn try_from(r: VectorWeylRepr) -> Result<Self> {
        VectorWeylOperator::new(&r.group, r.coord_matrices)
    }
}

impl From<VectorWeylOperator> for VectorWeylRepr {
    fn from(v: VectorWeylOperator) -> Self {
        VectorWeylRepr { group: v.group, coord_matrices: v.coord_matrices }
    }
}

impl VectorWeylOperator {
    pub fn new(group: &FiniteAbelianGroup, coord_matrices: Vec<CMatrix>) -> Result<Self> {
        let n = group.order();
        for m in &coord_matrices {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::DimensionMismatch { expected: n, found: m.nrows().max(m.ncols()) });
            }
            if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite("coordinate matrix"));
            }
        }
        Ok(Self { group: group.clone(), coord_matrices })
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.coord_matrices.len()
    }

    pub fn coord_matrices(&self) -> &[CMatrix] {
        &self.coord_matrices
    }

    /// `Σ_j conj(x*_j) A_j`.
    pub fn scalarize(&self, xstar: &DualFunctional) -> Result<WeylOperator> {
        if xstar.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: xstar.dim() });
        }
        let n = self.group.order();
        let mut m = CMatrix::zeros(n, n);
        for (a, y) in self.coord_matrices.iter().zip(xstar.coords()) {
            m += a * y.conj();
        }
        WeylOperator::new(&self.group, m)
    }

    pub fn max_abs(&self) -> f64 {
        self.coord_matrices.iter().map(linalg::max_abs).fold(0.0, f64::max)
    }

    /// `‖Σ_j A_j ⊗ B_j‖_op`, the minimal tensor norm for a matrix-presented `X`.
    pub fn min_norm(&self, pres: &MatrixPresentation) -> Result<f64> {
        if pres.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: pres.dim(), found: self.dim() });
        }
        let n = self.group.order();
        let r = pres.size();
        let mut big = CMatrix::zeros(n * r, n * r);
        for (a, b) in self.coord_matrices.iter().zip(pres.basis()) {
            big += linalg::kron(a, b);
        }
        Ok(linalg::operator_norm(&big))
    }
}

/// `X` realized as `span{B_1, …, B_d}` inside the `r×r` matrices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PresentationRepr", into = "PresentationRepr")]
pub struct MatrixPresentation {
    basis: Vec<CMatrix>,
}

#[derive(Serialize, Deserialize)]
struct PresentationRepr {
    #[serde(with = "json::square_matrices")]
    basis: Vec<CMatrix>,
}

impl TryFrom<PresentationRepr> for MatrixPresentation {
    type Error = Error;

    fn try_from(r: PresentationRepr) -> Result<Self> {
        MatrixPresentation::new(r.basis)
    }
}

impl From<MatrixPresentation> for PresentationRepr {
    fn from(p: MatrixPresentation) -> Self {
        PresentationRepr { basis: p.basis }
    }
}

impl MatrixPresentation {
    pub fn new(basis: Vec<CMatrix>) -> Result<Self> {
        let r = basis.first().map(|b| b.nrows()).ok_or_else(|| Error::InvalidInput("empty presentation".into()))?;
        if let Some(b) = basis.iter().find(|b| b.nrows() != r || b.ncols() != r) {
            return Err(Error::DimensionMismatch { expected: r, found: b.nrows().max(b.ncols()) });
        }
        let stacked = CMatrix::from_fn(r * r, basis.len(), |i, j| basis[j][(i / r, i % r)]);
        if numerical_rank(&stacked) < basis.len() {
            return Err(Error::InvalidInput("presentation basis is linearly dependent".into()));
        }
        Ok(Self { basis })
    }

    /// All of `M_r`, with the matrix units as basis.
    pub fn full(r: usize) -> Self {
        let basis = (0..r * r)
            .map(|k| {
                let mut m = CMatrix::zeros(r, r);
                m[(k / r, k % r)] = Complex64::new(1.0, 0.0);
                m
            })
            .collect();
        Self { basis }
    }

    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    pub fn size(&self) -> usize {
        self.basis[0].nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn embed(&self, coords: &[Complex64]) -> Result<CMatrix> {
        if coords.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: coords.len() });
        }
        let r = self.size();
        Ok(self.basis.iter().zip(coords).fold(CMatrix::zeros(r, r), |acc, (b, c)| acc + b * *c))
    }
}

/// A function on phase space with values in `M_r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VectorFunctionRepr", into = "VectorFunctionRepr")]
pub struct VectorPhaseFunction {
    group: FiniteAbelianGroup,
    values: Vec<CMatrix>,
}

#[derive(Serialize, Deserialize)]
struct VectorFunctionRepr {
    group: FiniteAbelianGroup,
    #[serde(with = "json::square_matrices")]
    values: Vec<CMatrix>,
}

impl TryFrom<VectorFunctionRepr> for VectorPhaseFunction {
    type Error = Error;

    fn try_from(r: VectorFunctionRepr) -> Result<Self> {
        VectorPhaseFunction::new(&r.group, r.values)
    }
}

impl From<VectorPhaseFunction> for VectorFunctionRepr {
    fn from(f: VectorPhaseFunction) -> Self {
        VectorFunctionRepr { group: f.group, values: f.values }
    }
}

impl VectorPhaseFunction {
    pub fn new(group: &FiniteAbelianGroup, values: Vec<CMatrix>) -> Result<Self> {
        if values.len() != group.phase_len() {
            return Err(Error::DimensionMismatch { expected: group.phase_len(), found: values.len() });
        }
        let r = values[0].nrows();
        for v in &values {
            if v.nrows() != r || v.ncols() != r {
                return Err(Error::DimensionMismatch { expected: r, found: v.nrows().max(v.ncols()) });
            }
            if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite("matrix-valued function"));
            }
        }
        Ok(Self { group: group.clone(), values })
    }

    /// `ω ↦ f(ω)·I_r`.
    pub fn from_scalar(f: &PhaseFunction, r: usize) -> Self {
        let values = f.values().iter().map(|&c| CMatrix::identity(r, r) * c).collect();
        Self { group: f.group().clone(), values }
    }

    /// Embeds d-vectors through a presentation.
    pub fn from_coords(group: &FiniteAbelianGroup, pres: &MatrixPresentation, coords: &[Vec<Complex64>]) -> Result<Self> {
        let values = coords.iter().map(|c| pres.embed(c)).collect::<Result<Vec<_>>>()?;
        Self::new(group, values)
    }

    pub fn random(fx: &mut Fixtures, group: &FiniteAbelianGroup, r: usize) -> Self {
        let values = (0..group.phase_len()).map(|_| CMatrix::from_fn(r, r, |_, _| fx.complex())).collect();
        Self { group: group.clone(), values }
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn size(&self) -> usize {
        self.values[0].nrows()
    }

    pub fn values(&self) -> &[CMatrix] {
        &self.values
    }

    /// `(Σ_ω ‖F(ω)‖_{S_s}^p w)^{1/p}`.
    pub fn bochner_norm(&self, p: Exponent, s: Exponent) -> f64 {
        let w = self.group.phase_weight();
        p.weighted_norm_of(self.values.iter().map(|m| linalg::schatten_norm(m, s)), w)
    }
}

/// Coordinate matrices `A_j = Σ_ω f(ω) (v_ω)_j ρ(ω)`.
pub fn weyl_nu(f: &PhaseFunction, nu: &VectorMeasure) -> Result<VectorWeylOperator> {
    let group = nu.group();
    group.ensure_same(f.group())?;
    let inv_w = 1.0 / group.phase_weight();
    let coord_matrices = (0..nu.dim())
        .into_par_iter()
        .map(|j| {
            // W(g) already carries the weight w, so feed it g = f·v_j / w.
            let g = PhaseFunction::from_fn(group, |i| f.values()[i] * nu.atom(i)[j] * inv_w);
            weyl::weyl_transform(&g).into_matrix()
        })
        .collect();
    VectorWeylOperator::new(group, coord_matrices)
}

/// `W(f · h_{x*})` with the Radon–Nikodym density `h_{x*}` of `⟨ν, x*⟩`.
pub fn weyl_nu_weak(f: &PhaseFunction, nu: &VectorMeasure, xstar: &DualFunctional) -> Result<WeylOperator> {
    let h = radon_nikodym(nu, xstar)?;
    Ok(weyl::weyl_transform(&f.pointwise_mul(&h)?))
}

/// `W(ν) = Σ_ω ρ(ω) ⊗ v_ω`.
pub fn weyl_of_measure(nu: &VectorMeasure) -> Result<VectorWeylOperator> {
    weyl_nu(&PhaseFunction::constant(nu.group(), Complex64::new(1.0, 0.0)), nu)
}

/// Whether `W^ν(f)` vanishes: every entry at most `1e-10·(1 + scale)`,
/// with `scale = Σ_ω |f(ω)|·max_j |(v_ω)_j|`.
pub fn kernel_support_test(nu: &VectorMeasure, f: &PhaseFunction) -> Result<bool> {
    let op = weyl_nu(f, nu)?;
    let scale: f64 = nu
        .atoms()
        .zip(f.values())
        .map(|(v, c)| c.norm() * v.iter().map(|z| z.norm()).fold(0.0, f64::max))
        .sum();
    Ok(op.max_abs() <= ZERO_TOLERANCE * (1.0 + scale))
}

fn numerical_rank(m: &CMatrix) -> usize {
    let s = linalg::singular_values(m);
    let top = s.first().copied().unwrap_or(0.0);
    s.iter().filter(|&&x| x > RANK_CUTOFF * top && top > 0.0).count()
}

/// Rank of `{ρ(ω)}` as vectors in `M_n`; `|G|²` means `ν ↦ W(ν)` is injective.
pub fn rho_family_rank(group: &FiniteAbelianGroup) -> usize {
    let n = group.order();
    let m = CMatrix::from_fn(n * n, group.phase_len(), |i, w| rho_matrix(group, w)[(i / n, i % n)]);
    numerical_rank(&m)
}

/// Basis of `{f : W^ν(f) = 0}`, from the null space of the `d·n² × n²`
/// matrix whose column `ω` is `vec(ρ(ω)) ⊗ v_ω`.
pub fn weyl_nu_kernel(nu: &VectorMeasure) -> Vec<PhaseFunction> {
    let group = nu.group();
    let n = group.order();
    let (d, len) = (nu.dim(), group.phase_len());
    let rhos: Vec<CMatrix> = (0..len).map(|w| rho_matrix(group, w)).collect();
    let m = CMatrix::from_fn(d * n * n, len, |i, w| {
        let (j, e) = (i / (n * n), i % (n * n));
        rhos[w][(e / n, e % n)] * nu.atom(w)[j]
    });
    let basis = linalg::null_space(&m, KERNEL_CUTOFF);
    
    (0..basis.ncols()).map(|k| PhaseFunction::from_fn(group, |w| basis[(w, k)])).collect()
}

/// `Σ_ω ρ(ω) ⊗ F(ω) · w`, an `(n·r)×(n·r)` block matrix.
pub fn vector_weyl_transform(f: &VectorPhaseFunction, pres: &MatrixPresentation) -> Result<CMatrix> {
    if pres.size() != f.size() {
        return Err(Error::DimensionMismatch { expected: pres.size(), found: f.size() });
    }
    Ok(big_transform(f))
}

fn big_transform(f: &VectorPhaseFunction) -> CMatrix {
    let group = f.group();
    let n = group.order();
    let r = f.size();
    let w = group.phase_weight();
    let table = group.pairing_table();
    let mut big = CMatrix::zeros(n * r, n * r);
    // ρ(x,χ_a) has entry χ_a(row) at (row, row − x).
    for x in 0..n {
        for row in 0..n {
            let col = group.sub_idx(row, x);
            let mut block = CMatrix::zeros(r, r);
            for a in 0..n {
                block += &f.values[x * n + a] * (table[a * n + row] * w);
            }
            big.view_mut((row * r, col * r), (r, r)).copy_from(&block);
        }
    }
    big
}

/// `‖F‖_{L^p(S_{p'})} − ‖Σ ρ(ω) ⊗ F(ω) w‖_{S_{p'}}` for `1 ≤ p ≤ 2`.
pub fn vv_hausdorff_young_margin(f: &VectorPhaseFunction, p: f64) -> Result<f64> {
    if !(1.0..=2.0).contains(&p) {
        return Err(Error::InvalidExponent(format!("Hausdorff-Young needs 1 <= p <= 2, got {p}")));
    }
    let p = Exponent::new(p)?;
    let s = p.conjugate();
    Ok(f.bochner_norm(p, s) - linalg::schatten_norm(&big_transform(f), s))
}

/// A linear map `M_r → M_s`, stored as the images of the matrix units.
#[derive(Clone, Debug)]
pub struct LinearMap {
    r: usize,
    s: usize,
    images: Vec<CMatrix>,
}

impl LinearMap {
    pub fn from_fn(r: usize, apply: impl Fn(&CMatrix) -> CMatrix) -> Result<Self> {
        let images: Vec<CMatrix> = MatrixPresentation::full(r).basis.iter().map(apply).collect();
        let s = images[0].nrows();
        if images.iter().any(|m| m.nrows() != s || m.ncols() != s) {
            return Err(Error::InvalidInput("linear map images must be square of one size".into()));
        }
        Ok(Self { r, s, images })
    }

    pub fn identity(r: usize) -> Self {
        Self::from_fn(r, |m| m.clone()).expect("square images")
    }

    pub fn transpose(r: usize) -> Self {
        Self::from_fn(r, |m| m.transpose()).expect("square images")
    }

    pub fn apply(&self, m: &CMatrix) -> CMatrix {
        let r = self.r;
        let mut out = CMatrix::zeros(self.s, self.s);
        for i in 0..r {
            for j in 0..r {
                if m[(i, j)] != Complex64::default() {
                    out += &self.images[i * r + j] * m[(i, j)];
                }
            }
        }
        out
    }

    /// Hilbert–Schmidt adjoint: `(T* Z)_{ij} = tr(T(E_ij)* Z)`.
    pub fn adjoint_apply(&self, z: &CMatrix) -> CMatrix {
        let r = self.r;
        CMatrix::from_fn(r, r, |i, j| self.images[i * r + j].iter().zip(z.iter()).map(|(a, b)| a.conj() * b).sum())
    }

    fn amplified(&self, x: &CMatrix, k: usize, adjoint: bool) -> CMatrix {
        let (from, to) = if adjoint { (self.s, self.r) } else { (self.r, self.s) };
        let mut out = CMatrix::zeros(k * to, k * to);
        for bi in 0..k {
            for bj in 0..k {
                let block = x.view((bi * from, bj * from), (from, from)).into_owned();
                let img = if adjoint { self.adjoint_apply(&block) } else { self.apply(&block) };
                out.view_mut((bi * to, bj * to), (to, to)).copy_from(&img);
            }
        }
        out
    }
}

const AMPLIFICATION_STEPS: usize = 50;

/// Lower bound on `‖T‖_cb`: the largest `‖T^{(j)}(X)‖_op` found for unit
/// `X ∈ M_j(M_r)`, `j ≤ k`, over `samples` seeded starts per level, each
/// improved by the ascent `X ← polar(T^{(j)*}(u v*))` with `(u, v)` the top
/// singular pair of `T^{(j)}(X)`. The draws for `(j, i)` do not depend on
/// `k` or `samples`, so the bound is monotone in both.
pub fn amplification_lower_bound(t: &LinearMap, k: usize, samples: usize, seed: u64) -> f64 {
    (1..=k)
        .flat_map(|j| (0..samples).map(move |i| (j, i)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(j, i)| {
            let mut fx = Fixtures::stream(seed, &format!("amplification/{j}/{i}"));
            let dim = j * t.r;
            let mut x = linalg::polar_unitary(&fx.matrix(dim));
            let mut best = 0.0f64;
            for _ in 0..AMPLIFICATION_STEPS {
                let y = t.amplified(&x, j, false);
                let (sigma, u, v) = linalg::top_singular(&y);
                if sigma <= best * (1.0 + 1e-13) {
                    best = best.max(sigma);
                    break;
                }
                best = sigma;
                let grad = t.amplified(&(&u * v.adjoint()), j, true);
                if linalg::max_abs(&grad) == 0.0 {
                    break;
                }
                x = linalg::polar_unitary(&grad);
            }
            best
        })
        .reduce(|| 0.0, f64::max)
}
