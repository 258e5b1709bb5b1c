//! Twisted convolution against a vector measure.
//!
//! Mass conventions: sums against `ν` carry no Haar weight, sums against `m`
//! carry `w = 1/|G|` per phase point, and the density embedding `μ_f` has
//! atoms `f(ω)·w`.
//!
//! With `ω' = (x', χ')`, the vector form is
//!
//! ```text
//! (f ×^ν g)(x,χ) = Σ_{ω'} f(x−x', χχ'⁻¹) g(ω') conj(χ'(x)) χ'(x') v_{ω'}
//! ```
//!
//! and pairing it with `x*` gives the scalar form `f × (g·h_{x*})`, where
//! `h_{x*}` is the density of `⟨ν, x*⟩` against `m`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::group::FiniteAbelianGroup;
use crate::json;
use crate::linalg;
use crate::measure::{
    self, lq_norm, p_semivariation, radon_nikodym, semivariation, AtomsRepr, Bracket, DualFunctional,
    NormedSpaceSpec, OptimizerConfig, PhaseSet, VectorMeasure,
};
use crate::twisted::{self, ConvPath};
use crate::vector_weyl::weyl_nu_weak;
use crate::weyl::{self, PhaseFunction};

/// One vector of the space per phase point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FieldRepr", into = "FieldRepr")]
pub struct VectorPhaseField {
    group: FiniteAbelianGroup,
    space: NormedSpaceSpec,
    values: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct FieldRepr {
    group: FiniteAbelianGroup,
    space: NormedSpaceSpec,
    values: AtomsRepr,
}

impl TryFrom<FieldRepr> for VectorPhaseField {
    type Error = Error;

    fn try_from(r: FieldRepr) -> Result<Self> {
        VectorPhaseField::new(r.group, r.space, r.values.decode())
    }
}

impl From<VectorPhaseField> for FieldRepr {
    fn from(f: VectorPhaseField) -> Self {
        let values = AtomsRepr::encode(&f.values, &f.space);
        FieldRepr { group: f.group, space: f.space, values }
    }
}

impl VectorPhaseField {
    pub fn new(group: FiniteAbelianGroup, space: NormedSpaceSpec, values: Vec<Vec<Complex64>>) -> Result<Self> {
        if values.len() != group.phase_len() {
            return Err(Error::DimensionMismatch { expected: group.phase_len(), found: values.len() });
        }
        for v in &values {
            space.validate(v, "field value")?;
        }
        Ok(Self { group, space, values: values.into_iter().flatten().collect() })
    }

    fn from_flat(group: &FiniteAbelianGroup, space: &NormedSpaceSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("field value"));
        }
        Ok(Self { group: group.clone(), space: measure::space_for(&values, space), values })
    }

    pub fn zero(group: &FiniteAbelianGroup, space: NormedSpaceSpec) -> Self {
        Self { group: group.clone(), space, values: vec![Complex64::default(); group.phase_len() * space.dim] }
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn space(&self) -> &NormedSpaceSpec {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim
    }

    pub fn value(&self, index: usize) -> &[Complex64] {
        let d = self.space.dim;
        &self.values[index * d..(index + 1) * d]
    }

    pub fn values(&self) -> impl Iterator<Item = &[Complex64]> {
        self.values.chunks(self.space.dim)
    }

    pub fn flat_values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let values: Vec<Complex64> = self.values.iter().map(|z| z * c).collect();
        Self { group: self.group.clone(), space: measure::space_for(&values, &self.space), values }
    }

    /// `max_σ ‖φ(σ)‖`.
    pub fn max_norm(&self) -> f64 {
        self.values().map(|v| lq_norm(v, self.space.q())).fold(0.0, f64::max)
    }

    /// `σ ↦ ⟨φ(σ), x*⟩`.
    pub fn scalarize(&self, xstar: &DualFunctional) -> Result<PhaseFunction> {
        if xstar.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: xstar.dim() });
        }
        PhaseFunction::new(self.group.clone(), self.values().map(|v| xstar.pair(v)).collect())
    }

    /// The measure `φ dm`, with atoms `φ(σ)·w`.
    pub fn to_measure(&self) -> VectorMeasure {
        let w = self.group.phase_weight();
        let atoms = self.values().map(|v| v.iter().map(|z| z * w).collect()).collect();
        VectorMeasure::new(self.group.clone(), self.space, atoms).expect("scaling keeps values finite")
    }

    /// `∫ φ dm`.
    pub fn integral(&self) -> Vec<Complex64> {
        let w = self.group.phase_weight();
        let mut out = vec![Complex64::default(); self.dim()];
        for v in self.values() {
            for (acc, z) in out.iter_mut().zip(v) {
                *acc += z * w;
            }
        }
        out
    }
}

/// A complex measure on `G × Ĝ`, one mass per phase point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScalarRepr", into = "ScalarRepr")]
pub struct ScalarMeasure {
    group: FiniteAbelianGroup,
    atoms: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct ScalarRepr {
    group: FiniteAbelianGroup,
    atoms: Vec<[f64; 2]>,
}

impl TryFrom<ScalarRepr> for ScalarMeasure {
    type Error = Error;

    fn try_from(r: ScalarRepr) -> Result<Self> {
        ScalarMeasure::new(r.group, r.atoms.into_iter().map(json::from_pair).collect())
    }
}

impl From<ScalarMeasure> for ScalarRepr {
    fn from(m: ScalarMeasure) -> Self {
        ScalarRepr { group: m.group, atoms: m.atoms.into_iter().map(json::to_pair).collect() }
    }
}

impl ScalarMeasure {
    pub fn new(group: FiniteAbelianGroup, atoms: Vec<Complex64>) -> Result<Self> {
        if atoms.len() != group.phase_len() {
            return Err(Error::DimensionMismatch { expected: group.phase_len(), found: atoms.len() });
        }
        if atoms.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("measure mass"));
        }
        Ok(Self { group, atoms })
    }

    pub fn point_mass(group: &FiniteAbelianGroup, index: usize, c: Complex64) -> Result<Self> {
        let f = PhaseFunction::delta(group, index, c);
        Self::new(group.clone(), f.into_values())
    }

    /// `μ_f`, with atoms `f(ω)·w`.
    pub fn from_density(f: &PhaseFunction) -> Self {
        let w = f.group().phase_weight();
        Self { group: f.group().clone(), atoms: f.values().iter().map(|z| z * w).collect() }
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn atoms(&self) -> &[Complex64] {
        &self.atoms
    }

    /// `Σ |μ_ω|`.
    pub fn total_variation(&self) -> f64 {
        self.atoms.iter().map(|z| z.norm()).sum()
    }
}

/// `f ×_ν g (x*) = f × (g·h_{x*})`.
pub fn tconv_nu_weak(
    f: &PhaseFunction,
    g: &PhaseFunction,
    nu: &VectorMeasure,
    xstar: &DualFunctional,
) -> Result<PhaseFunction> {
    f.group().ensure_same(nu.group())?;
    let h = radon_nikodym(nu, xstar)?;
    twisted::twisted_convolve(f, &g.pointwise_mul(&h)?, ConvPath::Direct)
}

/// `f ×^ν g`, summed directly over the atoms of `ν`.
pub fn tconv_nu_vector(f: &PhaseFunction, g: &PhaseFunction, nu: &VectorMeasure) -> Result<VectorPhaseField> {
    let group = nu.group();
    group.ensure_same(f.group())?;
    group.ensure_same(g.group())?;
    let n = group.order();
    let d = nu.dim();
    let table = group.pairing_table();
    let sub = group.sub_table();
    let (fv, gv) = (f.values(), g.values());

    let values: Vec<Complex64> = (0..n * n)
        .into_par_iter()
        .flat_map_iter(|sigma| {
            let (x, a) = (sigma / n, sigma % n);
            let mut acc = vec![Complex64::default(); d];
            for x2 in 0..n {
                let frow = sub[x * n + x2] as usize * n;
                let shift = sub[x2 * n + x] as usize;
                for a2 in 0..n {
                    let omega = x2 * n + a2;
                    let c = gv[omega];
                    if c == Complex64::default() {
                        continue;
                    }
                    let coeff = fv[frow + sub[a * n + a2] as usize] * c * table[a2 * n + shift];
                    for (slot, v) in acc.iter_mut().zip(nu.atom(omega)) {
                        *slot += coeff * v;
                    }
                }
            }
            acc
        })
        .collect();
    VectorPhaseField::from_flat(group, nu.space(), values)
}

/// `μ × ν`: the atom at `σ` collects `μ_ω·conj(χ'(x))·v_{ω'}` over `ω + ω' = σ`.
pub fn measure_tconv(mu: &ScalarMeasure, nu: &VectorMeasure) -> Result<VectorMeasure> {
    let group = nu.group();
    group.ensure_same(mu.group())?;
    let n = group.order();
    let d = nu.dim();
    let mut out = vec![Complex64::default(); n * n * d];
    for (omega, &m) in mu.atoms().iter().enumerate() {
        if m == Complex64::default() {
            continue;
        }
        let (x, a) = (omega / n, omega % n);
        for x2 in 0..n {
            for a2 in 0..n {
                let omega2 = x2 * n + a2;
                let coeff = m * group.pairing(a2, x).conj();
                let sigma = group.add_idx(x, x2) * n + group.add_idx(a, a2);
                for (slot, v) in out[sigma * d..(sigma + 1) * d].iter_mut().zip(nu.atom(omega2)) {
                    *slot += coeff * v;
                }
            }
        }
    }
    if out.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("measure atom"));
    }
    Ok(VectorMeasure::from_flat(group, nu.space(), out))
}

/// The density `𝐟_ν = Σ_{ω'} (T_{ω'} f)·v_{ω'}` of `f × ν` against `m`.
pub fn fn_measure_tconv(f: &PhaseFunction, nu: &VectorMeasure) -> Result<VectorPhaseField> {
    let group = nu.group();
    group.ensure_same(f.group())?;
    let n = group.order();
    let d = nu.dim();
    let mut out = vec![Complex64::default(); n * n * d];
    for (omega2, v) in nu.atoms().enumerate() {
        if v.iter().all(|z| *z == Complex64::default()) {
            continue;
        }
        let shifted = twisted::translate_by_index(f, omega2 / n, omega2 % n);
        for (sigma, &t) in shifted.values().iter().enumerate() {
            for (slot, x) in out[sigma * d..(sigma + 1) * d].iter_mut().zip(v) {
                *slot += t * x;
            }
        }
    }
    VectorPhaseField::from_flat(group, nu.space(), out)
}

/// `sup_{‖x*‖ ≤ 1} ‖⟨φ, x*⟩‖_{L^p(m)}`.
pub fn pp_norm_of_field(field: &VectorPhaseField, p: f64, cfg: &OptimizerConfig) -> Result<Bracket> {
    let p = Exponent::new(p)?;
    let scale = match p {
        Exponent::Finite(pp) => field.group.phase_weight().powf(1.0 / pp),
        Exponent::Infinite => 1.0,
    };
    let atoms: Vec<Vec<Complex64>> = field.values().map(|v| v.iter().map(|z| z * scale).collect()).collect();
    measure::sup_pairing_norm(&atoms, &field.space, p, cfg)
}

/// One side-by-side evaluation of a vector Young inequality `lhs ≤ rhs`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct InequalityMargin {
    /// Estimate of `rhs − lhs`.
    pub margin: f64,
    pub lhs: Bracket,
    pub rhs: Bracket,
    /// Magnitude used to scale the rounding tolerance.
    pub scale: f64,
}

impl InequalityMargin {
    fn new(lhs: Bracket, rhs: Bracket) -> Self {
        Self { margin: rhs.value - lhs.value, lhs, rhs, scale: lhs.upper.max(rhs.upper) }
    }

    /// Total bracket slack on both sides.
    pub fn bracket_width(&self) -> f64 {
        self.lhs.width() + self.rhs.width()
    }

    /// `rhs.lower − lhs.upper`: nonnegative whenever the brackets certify the inequality.
    pub fn certified(&self) -> f64 {
        self.rhs.lower - self.lhs.upper
    }

    pub fn holds(&self, rel_tol: f64) -> bool {
        self.margin >= -(rel_tol * self.scale + self.bracket_width())
    }
}

fn scaled(b: Bracket, c: f64) -> Bracket {
    b.map(|t| t * c)
}

/// `‖f‖_p·‖ν‖ − ‖f × ν‖_{P_p}`.
pub fn pp_contraction_margin(
    f: &PhaseFunction,
    nu: &VectorMeasure,
    p: f64,
    cfg: &OptimizerConfig,
) -> Result<InequalityMargin> {
    let pe = Exponent::new(p)?;
    let field = fn_measure_tconv(f, nu)?;
    let lhs = pp_norm_of_field(&field, p, cfg)?;
    let semi = semivariation(nu, &PhaseSet::all(nu.group()), cfg)?;
    Ok(InequalityMargin::new(lhs, scaled(semi, f.norm(pe))))
}

/// `‖f‖_q·‖ν‖_{p,m} − ‖f × ν‖_{P_r}` with `1/r = 1/p + 1/q − 1`.
pub fn young_vvyi_margin(
    f: &PhaseFunction,
    nu: &VectorMeasure,
    p: f64,
    q: f64,
    cfg: &OptimizerConfig,
) -> Result<InequalityMargin> {
    let (pe, qe) = (Exponent::new(p)?, Exponent::new(q)?);
    if !(p > 1.0 && p.is_finite()) || pe.recip() + qe.recip() <= 1.0 {
        return Err(Error::UnsupportedExponents { p, q });
    }
    let r = twisted::young_exponent(pe, qe)?;
    if f.max_abs() == 0.0 {
        let zero = Bracket::exact(0.0);
        return Ok(InequalityMargin::new(zero, zero));
    }
    let field = fn_measure_tconv(f, nu)?;
    let lhs = pp_norm_of_field(&field, r.value(), cfg)?;
    let pm = p_semivariation(nu, p, cfg)?;
    Ok(InequalityMargin::new(lhs, scaled(pm, f.norm(qe))))
}

/// `‖μ‖·‖ν‖ − ‖μ × ν‖`.
pub fn measure_tconv_margin(mu: &ScalarMeasure, nu: &VectorMeasure, cfg: &OptimizerConfig) -> Result<InequalityMargin> {
    let conv = measure_tconv(mu, nu)?;
    let lhs = semivariation(&conv, &PhaseSet::all(conv.group()), cfg)?;
    let semi = semivariation(nu, &PhaseSet::all(nu.group()), cfg)?;
    Ok(InequalityMargin::new(lhs, scaled(semi, mu.total_variation())))
}

/// Relative Frobenius gap between `W(f ×_ν g(x*))` and `W(f)·W^ν(g)(x*)`.
pub fn weyl_tconv_identity_check(
    f: &PhaseFunction,
    g: &PhaseFunction,
    nu: &VectorMeasure,
    xstar: &DualFunctional,
) -> Result<f64> {
    let lhs = weyl::weyl_transform(&tconv_nu_weak(f, g, nu, xstar)?);
    let rhs = weyl::weyl_transform(f).compose(&weyl_nu_weak(g, nu, xstar)?)?;
    Ok(linalg::relative_frobenius(lhs.matrix(), rhs.matrix()))
}

/// `|⟨∫φ dm, x*⟩ − ∫⟨φ, x*⟩ dm|`.
pub fn pettis_defect(field: &VectorPhaseField, xstar: &DualFunctional) -> Result<f64> {
    let w = field.group.phase_weight();
    let paired: Complex64 = field.scalarize(xstar)?.values().iter().map(|z| z * w).sum();
    Ok((xstar.pair(&field.integral()) - paired).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Field;
    use crate::random::Fixtures;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn cyclic(n: usize) -> FiniteAbelianGroup {
        FiniteAbelianGroup::cyclic(n).unwrap()
    }

    fn field_gap(a: &VectorPhaseField, b: &VectorPhaseField) -> f64 {
        a.flat_values().iter().zip(b.flat_values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn weak_form_examples() {
        let mut fx = Fixtures::new(1);
        let g = cyclic(3);
        let (f, h) = (fx.phase_function(&g), fx.phase_function(&g));
        let space = NormedSpaceSpec::real_l2(2);
        let nu = fx.measure(&g, &space);
        assert_eq!(tconv_nu_weak(&f, &h, &nu, &DualFunctional::zero(2)).unwrap().max_abs(), 0.0);

        let haar = VectorMeasure::haar(&g);
        let weak = tconv_nu_weak(&f, &h, &haar, &DualFunctional::real(&[1.0])).unwrap();
        let plain = twisted::twisted_convolve(&f, &h, ConvPath::Direct).unwrap();
        assert!(weak.relative_l2_error(&plain).unwrap() < 1e-12);
    }

    #[test]
    fn vector_form_scalarizes_to_weak_form() {
        let mut fx = Fixtures::new(2);
        for orders in [vec![2], vec![3], vec![2, 2]] {
            let g = FiniteAbelianGroup::new(orders).unwrap();
            for field in [Field::Real, Field::Complex] {
                let space = NormedSpaceSpec::new(3, field, Exponent::Finite(1.5)).unwrap();
                let nu = fx.measure(&g, &space);
                let (f, h) = (fx.phase_function(&g), fx.phase_function(&g));
                let vec_form = tconv_nu_vector(&f, &h, &nu).unwrap();
                let x = fx.dual_functional(&space);
                let lhs = vec_form.scalarize(&x).unwrap();
                let rhs = tconv_nu_weak(&f, &h, &nu, &x).unwrap();
                let gap = lhs.sub(&rhs).unwrap().max_abs();
                assert!(gap < 1e-10, "gap {gap}");
            }
        }
    }

    #[test]
    fn single_atom_at_origin() {
        let mut fx = Fixtures::new(3);
        let g = cyclic(3);
        let space = NormedSpaceSpec::new(2, Field::Complex, Exponent::TWO).unwrap();
        let v = [Complex64::new(1.0, 2.0), c(-0.5)];
        let nu = VectorMeasure::point_mass(&g, space, 0, &v).unwrap();
        let (f, h) = (fx.phase_function(&g), fx.phase_function(&g));

        let out = tconv_nu_vector(&f, &h, &nu).unwrap();
        let dens = fn_measure_tconv(&f, &nu).unwrap();
        for (i, &fi) in f.values().iter().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                assert!((out.value(i)[j] - fi * h.values()[0] * vj).norm() < 1e-12);
                assert!((dens.value(i)[j] - fi * vj).norm() < 1e-12);
            }
        }
        assert!(tconv_nu_vector(&f, &PhaseFunction::zeros(&g), &nu).unwrap().max_norm() == 0.0);
        assert!(fn_measure_tconv(&PhaseFunction::zeros(&g), &nu).unwrap().max_norm() == 0.0);
    }

    #[test]
    fn measure_convolution_examples() {
        let mut fx = Fixtures::new(4);
        let g = FiniteAbelianGroup::new(vec![2, 2]).unwrap();
        let space = NormedSpaceSpec::new(2, Field::Complex, Exponent::Finite(3.0)).unwrap();
        let nu = fx.measure(&g, &space);
        let unit = ScalarMeasure::point_mass(&g, 0, c(1.0)).unwrap();
        assert_eq!(measure_tconv(&unit, &nu).unwrap().flat_atoms(), nu.flat_atoms());
        let mu = ScalarMeasure::new(g.clone(), fx.complex_vec(16)).unwrap();
        assert!(measure_tconv(&mu, &VectorMeasure::zero(&g, space)).unwrap().is_zero());

        let (f, h) = (fx.phase_function(&g), fx.phase_function(&g));
        let lhs = measure_tconv(&ScalarMeasure::from_density(&f), &VectorMeasure::scalar(&g, Field::Complex, &ScalarMeasure::from_density(&h).atoms).unwrap()).unwrap();
        let fg = ScalarMeasure::from_density(&twisted::twisted_convolve(&f, &h, ConvPath::Direct).unwrap());
        for (a, b) in lhs.flat_atoms().iter().zip(fg.atoms()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn density_identity() {
        let mut fx = Fixtures::new(5);
        for orders in [vec![2], vec![3], vec![4]] {
            let g = FiniteAbelianGroup::new(orders).unwrap();
            let space = NormedSpaceSpec::new(2, Field::Real, Exponent::TWO).unwrap();
            let nu = fx.measure(&g, &space);
            let f = fx.phase_function(&g);
            let dens = fn_measure_tconv(&f, &nu).unwrap().to_measure();
            let conv = measure_tconv(&ScalarMeasure::from_density(&f), &nu).unwrap();
            let gap = dens.flat_atoms().iter().zip(conv.flat_atoms()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(gap < 1e-10);
            // The density is also the vector form with g ≡ 1.
            let one = PhaseFunction::constant(&g, c(1.0));
            assert!(field_gap(&fn_measure_tconv(&f, &nu).unwrap(), &tconv_nu_vector(&f, &one, &nu).unwrap()) < 1e-10);
        }
    }

    #[test]
    fn sup_norm_bound() {
        let cfg = OptimizerConfig::default();
        let mut fx = Fixtures::new(6);
        let g = cyclic(3);
        let space = NormedSpaceSpec::new(2, Field::Complex, Exponent::TWO).unwrap();
        for _ in 0..5 {
            let nu = fx.measure(&g, &space);
            let f = fx.phase_function(&g);
            let semi = semivariation(&nu, &PhaseSet::all(&g), &cfg).unwrap();
            let lhs = fn_measure_tconv(&f, &nu).unwrap().max_norm();
            assert!(lhs <= f.max_abs() * semi.upper * (1.0 + 1e-10));
        }
    }

    #[test]
    fn pp_norm_examples() {
        let cfg = OptimizerConfig::default();
        let mut fx = Fixtures::new(7);
        let g = cyclic(2);
        let w = g.phase_weight();

        let scalar_space = NormedSpaceSpec::new(1, Field::Complex, Exponent::TWO).unwrap();
        let vals = fx.complex_vec(4);
        let field = VectorPhaseField::new(g.clone(), scalar_space, vals.iter().map(|&z| vec![z]).collect()).unwrap();
        let f = PhaseFunction::new(g.clone(), vals).unwrap();
        for p in [1.0, 1.5, 3.0, f64::INFINITY] {
            let b = pp_norm_of_field(&field, p, &cfg).unwrap();
            assert!(b.exact && (b.value - f.norm(Exponent::new(p).unwrap())).abs() < 1e-12);
        }

        let space = NormedSpaceSpec::new(3, Field::Real, Exponent::Finite(3.0)).unwrap();
        let v = vec![c(1.0), c(-2.0), c(0.5)];
        let mut values = vec![vec![c(0.0); 3]; 4];
        values[2] = v.clone();
        let point = VectorPhaseField::new(g.clone(), space, values).unwrap();
        let b = pp_norm_of_field(&point, 1.0, &cfg).unwrap();
        assert!((b.value - lq_norm(&v, space.q()) * w).abs() < 1e-12);

        let dense = VectorPhaseField::new(g.clone(), space, (0..4).map(|_| fx.real_vec(3)).collect()).unwrap();
        let one = pp_norm_of_field(&dense, 2.5, &cfg).unwrap();
        let two = pp_norm_of_field(&dense.scale(c(2.0)), 2.5, &cfg).unwrap();
        assert!((two.value - 2.0 * one.value).abs() < 1e-9 * one.value);
        assert!(one.lower <= one.upper && one.value >= one.lower);
        assert!(pp_norm_of_field(&dense, 0.5, &cfg).is_err());
    }

    #[test]
    fn young_margins_hold() {
        let cfg = OptimizerConfig::default();
        let mut fx = Fixtures::new(8);
        for n in [2, 3] {
            let g = cyclic(n);
            for d in 1..=3 {
                let space = NormedSpaceSpec::new(d, Field::Complex, Exponent::TWO).unwrap();
                let nu = fx.measure(&g, &space);
                let f = fx.phase_function(&g);
                for (p, q) in [(2.0, 1.0), (4.0 / 3.0, 1.5), (3.0, 1.25)] {
                    let m = young_vvyi_margin(&f, &nu, p, q, &cfg).unwrap();
                    assert!(m.holds(1e-10), "({p}, {q}): {m:?}");
                }
                for p in [1.0, 2.0, f64::INFINITY] {
                    let m = pp_contraction_margin(&f, &nu, p, &cfg).unwrap();
                    assert!(m.holds(1e-10), "pp {p}: {m:?}");
                }
            }
        }
    }

    #[test]
    fn young_margin_edge_cases() {
        let cfg = OptimizerConfig::default();
        let mut fx = Fixtures::new(9);
        let g = cyclic(3);
        let nu = fx.measure(&g, &NormedSpaceSpec::real_l2(2));
        let zero = young_vvyi_margin(&PhaseFunction::zeros(&g), &nu, 2.0, 1.0, &cfg).unwrap();
        assert_eq!(zero.margin, 0.0);
        let f = fx.phase_function(&g);
        // 1/p + 1/q = 1 is the excluded endpoint.
        assert!(young_vvyi_margin(&f, &nu, 2.0, 2.0, &cfg).is_err());
        assert!(young_vvyi_margin(&f, &nu, 1.0, 2.0, &cfg).is_err());
        assert!(young_vvyi_margin(&f, &nu, 2.0, 3.0, &cfg).is_err());
        assert!(young_vvyi_margin(&f, &nu, f64::INFINITY, 1.0, &cfg).is_err());

        // ν = m reduces to the scalar inequality.
        let haar = VectorMeasure::haar(&g);
        let one = PhaseFunction::constant(&g, c(1.0));
        let m = young_vvyi_margin(&f, &haar, 2.0, 1.5, &cfg).unwrap();
        let scalar = twisted::young_margins(&f, &one, 1.5, 2.0).unwrap();
        assert!((m.margin - scalar.young).abs() < 1e-10);
    }

    #[test]
    fn measure_submultiplicative() {
        let cfg = OptimizerConfig::default();
        let mut fx = Fixtures::new(10);
        let g = cyclic(2);
        for field in [Field::Real, Field::Complex] {
            let space = NormedSpaceSpec::new(2, field, Exponent::Finite(1.5)).unwrap();
            let nu = fx.measure(&g, &space);
            let mu = ScalarMeasure::new(g.clone(), fx.complex_vec(4)).unwrap();
            assert!(measure_tconv_margin(&mu, &nu, &cfg).unwrap().holds(1e-10));
        }
    }

    #[test]
    fn weyl_identity_and_pettis() {
        let mut fx = Fixtures::new(11);
        let g = cyclic(2);
        let space = NormedSpaceSpec::new(2, Field::Complex, Exponent::TWO).unwrap();
        for _ in 0..10 {
            let nu = fx.measure(&g, &space);
            let (f, h) = (fx.phase_function(&g), fx.phase_function(&g));
            let x = fx.dual_functional(&space);
            assert!(weyl_tconv_identity_check(&f, &h, &nu, &x).unwrap() < 1e-9);
            let field = tconv_nu_vector(&f, &h, &nu).unwrap();
            assert!(pettis_defect(&field, &x).unwrap() < 1e-12 * (1.0 + field.max_norm()));
        }
        let nu = fx.measure(&g, &space);
        let h = fx.phase_function(&g);
        let x = fx.dual_functional(&space);
        let id = PhaseFunction::twisted_identity(&g);
        assert!(weyl_tconv_identity_check(&id, &h, &nu, &x).unwrap() < 1e-12);
        let zero = PhaseFunction::zeros(&g);
        assert_eq!(weyl_tconv_identity_check(&id, &zero, &nu, &x).unwrap(), 0.0);
    }

    #[test]
    fn json_round_trips() {
        let mut fx = Fixtures::new(12);
        let g = cyclic(2);
        let space = NormedSpaceSpec::new(2, Field::Complex, Exponent::TWO).unwrap();
        let nu = fx.measure(&g, &space);
        let field = fn_measure_tconv(&fx.phase_function(&g), &nu).unwrap();
        let back: VectorPhaseField = serde_json::from_str(&serde_json::to_string(&field).unwrap()).unwrap();
        assert_eq!(back, field);

        let mu = ScalarMeasure::new(g.clone(), fx.complex_vec(4)).unwrap();
        let text = serde_json::to_string(&mu).unwrap();
        assert!(text.contains("\"atoms\":[["));
        assert_eq!(serde_json::from_str::<ScalarMeasure>(&text).unwrap(), mu);
        assert!(serde_json::from_str::<ScalarMeasure>(r#"{"group":{"orders":[2]},"atoms":[[1,0]]}"#).is_err());
    }
}
