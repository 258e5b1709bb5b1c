//! Vector measures on the power set of `G × Ĝ` with values in a
//! finite-dimensional ℓ^q space.
//!
//! A measure is one atom `v_ω ∈ X` per phase point and `ν(A) = Σ_{ω∈A} v_ω`.
//! Every sup over the dual unit ball (semivariation, p-semivariation, the
//! `L^p(ν)` norms) is reduced to
//! `sup_{‖y‖_{q'} ≤ 1} (Σ_k |⟨u_k, y⟩|^p)^{1/p}` for suitably scaled atoms
//! and handed to one optimizer, which returns a [`Bracket`].

mod dualsup;
mod signs;
mod space;

use std::collections::BTreeSet;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::group::{FiniteAbelianGroup, PhasePoint};
use crate::json;
use crate::weyl::PhaseFunction;

pub use signs::ARRANGEMENT_MAX_RANK;
pub use space::{lq_norm, norming_functional, pairing, DualFunctional, Field, LqNorm, NormedSpaceSpec};

/// Largest `|G|²` for which the ∞-semivariation is maximized over all subsets.
pub const SUBSET_SEARCH_MAX_POINTS: usize = 16;

/// A value with certified lower and upper bounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub exact: bool,
}

impl Bracket {
    pub fn exact(value: f64) -> Self {
        Self { value, lower: value, upper: value, exact: true }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    /// Applies a nondecreasing map to all three numbers.
    pub fn map(self, f: impl Fn(f64) -> f64) -> Self {
        Self { value: f(self.value), lower: f(self.lower), upper: f(self.upper), exact: self.exact }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub seed: u64,
    /// Multi-start count for the ascent.
    pub starts: usize,
    pub max_iters: usize,
    /// Sign enumeration is exhaustive up to this many atoms.
    pub sign_ceiling: usize,
    /// Phases per atom in the complex coordinate search.
    pub phase_grid: usize,
    /// Box budget for the upper-bound search.
    pub grid_budget: usize,
    /// Permit bracketed estimates where no exact path exists.
    pub allow_estimate: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            seed: 0x5eed,
            starts: 32,
            max_iters: 2000,
            sign_ceiling: 20,
            phase_grid: 16,
            grid_budget: 200_000,
            allow_estimate: true,
        }
    }
}

/// A subset `A ⊆ G × Ĝ`, kept as sorted flat indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhaseSet {
    group: FiniteAbelianGroup,
    members: Vec<usize>,
}

impl PhaseSet {
    pub fn all(group: &FiniteAbelianGroup) -> Self {
        Self { group: group.clone(), members: (0..group.phase_len()).collect() }
    }

    pub fn empty(group: &FiniteAbelianGroup) -> Self {
        Self { group: group.clone(), members: Vec::new() }
    }

    pub fn from_indices(group: &FiniteAbelianGroup, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let set: BTreeSet<usize> = indices.into_iter().collect();
        if let Some(&bad) = set.iter().find(|&&i| i >= group.phase_len()) {
            return Err(Error::InvalidInput(format!("phase index {bad} out of range for {group}")));
        }
        Ok(Self { group: group.clone(), members: set.into_iter().collect() })
    }

    pub fn from_points(group: &FiniteAbelianGroup, points: &[PhasePoint]) -> Result<Self> {
        let idx = points.iter().map(|p| group.phase_index(p)).collect::<Result<Vec<_>>>()?;
        Self::from_indices(group, idx)
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn indices(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.members.binary_search(&index).is_ok()
    }
}

/// `ν` with one atom per phase point, stored flat (`|G|² · d` scalars).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureRepr", into = "MeasureRepr")]
pub struct VectorMeasure {
    group: FiniteAbelianGroup,
    space: NormedSpaceSpec,
    atoms: Vec<Complex64>,
}

/// Vectors as plain number arrays in a real space, `[re, im]` pairs otherwise.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
pub(crate) enum AtomsRepr {
    Real(Vec<Vec<f64>>),
    Complex(Vec<Vec<[f64; 2]>>),
}

impl AtomsRepr {
    pub(crate) fn encode(flat: &[Complex64], space: &NormedSpaceSpec) -> Self {
        let chunks = flat.chunks(space.dim);
        if space.is_real() {
            AtomsRepr::Real(chunks.map(|v| v.iter().map(|z| z.re).collect()).collect())
        } else {
            AtomsRepr::Complex(chunks.map(|v| v.iter().map(|&z| json::to_pair(z)).collect()).collect())
        }
    }

    pub(crate) fn decode(self) -> Vec<Vec<Complex64>> {
        match self {
            AtomsRepr::Real(a) => a.into_iter().map(|v| v.into_iter().map(|x| Complex64::new(x, 0.0)).collect()).collect(),
            AtomsRepr::Complex(a) => a.into_iter().map(|v| v.into_iter().map(json::from_pair).collect()).collect(),
        }
    }
}

/// `space`, switched to complex scalars if any entry has an imaginary part.
pub(crate) fn space_for(values: &[Complex64], space: &NormedSpaceSpec) -> NormedSpaceSpec {
    if values.iter().any(|z| z.im != 0.0) {
        NormedSpaceSpec { field: Field::Complex, ..*space }
    } else {
        *space
    }
}

pub(crate) fn sup_pairing_norm(
    atoms: &[Vec<Complex64>],
    space: &NormedSpaceSpec,
    p: Exponent,
    cfg: &OptimizerConfig,
) -> Result<Bracket> {
    dualsup::sup_pairing_norm(atoms, space, p, cfg)
}

#[derive(Serialize, Deserialize)]
struct MeasureRepr {
    group: FiniteAbelianGroup,
    space: NormedSpaceSpec,
    atoms: AtomsRepr,
}

impl TryFrom<MeasureRepr> for VectorMeasure {
    type Error = Error;

    fn try_from(r: MeasureRepr) -> Result<Self> {
        VectorMeasure::new(r.group, r.space, r.atoms.decode())
    }
}

impl From<VectorMeasure> for MeasureRepr {
    fn from(m: VectorMeasure) -> Self {
        let atoms = AtomsRepr::encode(&m.atoms, &m.space);
        MeasureRepr { group: m.group, space: m.space, atoms }
    }
}

impl VectorMeasure {
    /// Builds from a flat `|G|²·d` array, promoting the space to complex
    /// scalars when needed.
    pub(crate) fn from_flat(group: &FiniteAbelianGroup, space: &NormedSpaceSpec, atoms: Vec<Complex64>) -> Self {
        debug_assert_eq!(atoms.len(), group.phase_len() * space.dim);
        Self { group: group.clone(), space: space_for(&atoms, space), atoms }
    }

    pub fn new(group: FiniteAbelianGroup, space: NormedSpaceSpec, atoms: Vec<Vec<Complex64>>) -> Result<Self> {
        if atoms.len() != group.phase_len() {
            return Err(Error::DimensionMismatch { expected: group.phase_len(), found: atoms.len() });
        }
        for a in &atoms {
            space.validate(a, "measure atom")?;
        }
        Ok(Self { group, space, atoms: atoms.into_iter().flatten().collect() })
    }

    pub fn zero(group: &FiniteAbelianGroup, space: NormedSpaceSpec) -> Self {
        Self { group: group.clone(), space, atoms: vec![Complex64::default(); group.phase_len() * space.dim] }
    }

    /// The measure with the single atom `v` at `index`.
    pub fn point_mass(group: &FiniteAbelianGroup, space: NormedSpaceSpec, index: usize, v: &[Complex64]) -> Result<Self> {
        space.validate(v, "point mass")?;
        if index >= group.phase_len() {
            return Err(Error::InvalidInput(format!("phase index {index} out of range")));
        }
        let mut m = Self::zero(group, space);
        m.atoms[index * space.dim..(index + 1) * space.dim].copy_from_slice(v);
        Ok(m)
    }

    /// One-dimensional measure with complex atoms `c_ω`.
    pub fn scalar(group: &FiniteAbelianGroup, field: Field, atoms: &[Complex64]) -> Result<Self> {
        let space = NormedSpaceSpec::new(1, field, Exponent::TWO)?;
        Self::new(group.clone(), space, atoms.iter().map(|&c| vec![c]).collect())
    }

    /// Haar measure `m` as a real scalar measure.
    pub fn haar(group: &FiniteAbelianGroup) -> Self {
        let w = Complex64::new(group.phase_weight(), 0.0);
        Self::scalar(group, Field::Real, &vec![w; group.phase_len()]).expect("finite weights")
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

    pub fn atom(&self, index: usize) -> &[Complex64] {
        let d = self.space.dim;
        &self.atoms[index * d..(index + 1) * d]
    }

    pub fn atoms(&self) -> impl Iterator<Item = &[Complex64]> {
        self.atoms.chunks(self.space.dim)
    }

    pub fn flat_atoms(&self) -> &[Complex64] {
        &self.atoms
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.iter().all(|z| *z == Complex64::default())
    }

    /// `ν_f` with atoms `f(ω)·v_ω`. Requires a complex space unless `f` is real.
    pub fn weighted(&self, f: &PhaseFunction) -> Result<Self> {
        self.group.ensure_same(f.group())?;
        let atoms: Vec<Vec<Complex64>> =
            self.atoms().zip(f.values()).map(|(v, &c)| v.iter().map(|x| x * c).collect()).collect();
        let space = space_for(f.values(), &self.space);
        Self::new(self.group.clone(), space, atoms)
    }

    /// `ν(A)`.
    pub fn measure_of(&self, set: &PhaseSet) -> Result<Vec<Complex64>> {
        self.group.ensure_same(set.group())?;
        let mut out = vec![Complex64::default(); self.dim()];
        for &i in set.indices() {
            for (acc, x) in out.iter_mut().zip(self.atom(i)) {
                *acc += x;
            }
        }
        Ok(out)
    }

    /// `⟨ν, x*⟩` as a complex scalar atom family.
    pub fn scalarize(&self, xstar: &DualFunctional) -> Result<Vec<Complex64>> {
        self.check_functional(xstar)?;
        Ok(self.atoms().map(|v| xstar.pair(v)).collect())
    }

    fn check_functional(&self, xstar: &DualFunctional) -> Result<()> {
        if xstar.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: xstar.dim() });
        }
        Ok(())
    }

    fn atoms_in(&self, set: &PhaseSet) -> Result<Vec<Vec<Complex64>>> {
        self.group.ensure_same(set.group())?;
        Ok(set.indices().iter().map(|&i| self.atom(i).to_vec()).collect())
    }
}

/// `|⟨ν, x*⟩|(A) = Σ_{ω∈A} |⟨v_ω, x*⟩|`.
pub fn scalar_total_variation(nu: &VectorMeasure, xstar: &DualFunctional, set: &PhaseSet) -> Result<f64> {
    nu.check_functional(xstar)?;
    nu.group.ensure_same(set.group())?;
    Ok(set.indices().iter().map(|&i| xstar.pair(nu.atom(i)).norm()).sum())
}

/// `‖ν‖(A) = sup_{x* ∈ B_{X*}} |⟨ν,x*⟩|(A) = sup_{|θ_ω| = 1} ‖Σ_{ω∈A} θ_ω v_ω‖`.
pub fn semivariation(nu: &VectorMeasure, set: &PhaseSet, cfg: &OptimizerConfig) -> Result<Bracket> {
    dualsup::sup_pairing_norm(&nu.atoms_in(set)?, &nu.space, Exponent::ONE, cfg)
}

/// Dual-side estimate of `‖ν‖(A)` from a grid on the boundary of `B_{X*}`:
/// `value` is attained at a grid functional, `upper` bounds the supremum.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DualGridValue {
    pub value: f64,
    pub upper: f64,
    /// ℓ^{q'} covering radius of the grid on the cube boundary.
    pub resolution: f64,
}

pub fn semivariation_dual_grid(nu: &VectorMeasure, set: &PhaseSet, budget: usize) -> Result<DualGridValue> {
    let atoms = nu.atoms_in(set)?;
    if nu.dim() == 1 {
        let v = atoms.iter().map(|u| u[0].norm()).sum();
        return Ok(DualGridValue { value: v, upper: v, resolution: 0.0 });
    }
    let g = dualsup::dual_grid(&atoms, &nu.space, Exponent::ONE, budget)
        .ok_or_else(|| Error::InvalidInput(format!("grid budget {budget} too small for dimension {}", nu.dim())))?;
    Ok(DualGridValue { value: g.value, upper: g.upper, resolution: g.delta })
}

/// `‖ν‖_{p,m} = sup{‖Σ α_ω v_ω‖ : Σ |α_ω|^{p'} w ≤ 1}`; for `p = ∞` this is
/// `sup_{m(A) > 0} ‖ν(A)‖ / m(A)`.
pub fn p_semivariation(nu: &VectorMeasure, p: f64, cfg: &OptimizerConfig) -> Result<Bracket> {
    let p = Exponent::new(p)?;
    if p.is_infinite() {
        return Ok(Bracket::exact(infinity_semivariation(nu)));
    }
    // α = β · w^{-1/p'} maps the weighted ball onto the unit ℓ^{p'} ball.
    let scale = nu.group.phase_weight().powf(-p.conjugate().recip());
    let atoms: Vec<Vec<Complex64>> = nu.atoms().map(|v| v.iter().map(|x| x * scale).collect()).collect();
    dualsup::sup_pairing_norm(&atoms, &nu.space, p, cfg)
}

/// The multi-start ascent alone, skipping every exact path; a lower bound
/// on `‖ν‖_{p,m}` for `1 ≤ p < ∞`.
pub fn p_semivariation_estimate(nu: &VectorMeasure, p: Exponent, cfg: &OptimizerConfig) -> f64 {
    if p.is_infinite() {
        return infinity_semivariation(nu);
    }
    let scale = nu.group.phase_weight().powf(-p.conjugate().recip());
    let atoms: Vec<Vec<Complex64>> = nu.atoms().map(|v| v.iter().map(|x| x * scale).collect()).collect();
    dualsup::ascent_lower(&atoms, &nu.space, p, cfg)
}

fn infinity_semivariation(nu: &VectorMeasure) -> f64 {
    let w = nu.group.phase_weight();
    let n = nu.group.phase_len();
    let q = nu.space.q();
    if n > SUBSET_SEARCH_MAX_POINTS {
        // Averaging: ‖ν(A)‖/m(A) ≤ max_{ω∈A} ‖v_ω‖/w, attained on singletons.
        return nu.atoms().map(|v| lq_norm(v, q)).fold(0.0, f64::max) / w;
    }
    let d = nu.dim();
    let mut best = 0.0f64;
    for mask in 1u32..(1u32 << n) {
        let mut s = vec![Complex64::default(); d];
        for i in (0..n).filter(|i| mask >> i & 1 == 1) {
            for (acc, x) in s.iter_mut().zip(nu.atom(i)) {
                *acc += x;
            }
        }
        best = best.max(lq_norm(&s, q) / (mask.count_ones() as f64 * w));
    }
    best
}

/// `‖f‖_{ν,p} = ‖ |f|^p ‖_ν^{1/p}`.
pub fn lp_nu_norm(f: &PhaseFunction, nu: &VectorMeasure, p: f64, cfg: &OptimizerConfig) -> Result<Bracket> {
    nu.group.ensure_same(f.group())?;
    let p = Exponent::new(p)?;
    let Exponent::Finite(pp) = p else {
        return Err(Error::InvalidExponent("L^p(ν) norm needs p < ∞".into()));
    };
    let atoms: Vec<Vec<Complex64>> =
        nu.atoms().zip(f.values()).map(|(v, c)| v.iter().map(|x| x * c.norm().powf(pp)).collect()).collect();
    let b = dualsup::sup_pairing_norm(&atoms, &nu.space, Exponent::ONE, cfg)?;
    Ok(b.map(|x| x.powf(1.0 / pp)))
}

/// `∫_A f dν = Σ_{ω∈A} f(ω) v_ω`.
pub fn integrate(f: &PhaseFunction, nu: &VectorMeasure, set: &PhaseSet) -> Result<Vec<Complex64>> {
    nu.group.ensure_same(f.group())?;
    nu.group.ensure_same(set.group())?;
    let mut out = vec![Complex64::default(); nu.dim()];
    for &i in set.indices() {
        let c = f.values()[i];
        for (acc, x) in out.iter_mut().zip(nu.atom(i)) {
            *acc += c * x;
        }
    }
    Ok(out)
}

/// `h_{x*} = d⟨ν,x*⟩/dm`, i.e. `⟨v_ω, x*⟩ / w`.
pub fn radon_nikodym(nu: &VectorMeasure, xstar: &DualFunctional) -> Result<PhaseFunction> {
    let w = nu.group.phase_weight();
    let values = nu.scalarize(xstar)?.into_iter().map(|c| c / w).collect();
    PhaseFunction::new(nu.group.clone(), values)
}

/// Whether `ν(B) = 0` for every `B ⊆ A`, i.e. every atom in `A` vanishes.
pub fn nu_null(nu: &VectorMeasure, set: &PhaseSet) -> bool {
    set.indices().iter().all(|&i| nu.atom(i).iter().all(|z| *z == Complex64::default()))
}
