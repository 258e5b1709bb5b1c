//! Suprema of the form
//!
//! ```text
//! S = sup_{‖y‖_{q'} ≤ 1} ( Σ_k |⟨u_k, y⟩|^p )^{1/p}  =  sup_{‖β‖_{p'} ≤ 1} ‖Σ_k β_k u_k‖_q
//! ```
//!
//! over a finite family of atoms `u_k ∈ 𝔽^d`. Semivariation, p-semivariation
//! and the P_p norm of a field are all instances after rescaling the atoms.
//!
//! Exact answers are returned for `d = 1`, `p = ∞`, `p = q = 2` (top singular
//! value) and real `p = 1` (sign enumeration). Otherwise the lower bound comes
//! from a multi-start alternating ascent and the upper bound from a
//! branch-and-bound over the boundary faces of the dual ℓ^∞ cube.

use num_complex::Complex64;
use rayon::prelude::*;

use super::signs;
use super::space::{lq_norm, norming_functional, pairing, NormedSpaceSpec};
use super::{Bracket, OptimizerConfig};
use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::linalg::{self, CMatrix};
use crate::random::Fixtures;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Relative gap at which the face search stops refining.
const FACE_GAP: f64 = 1e-4;

pub(super) fn sup_pairing_norm(
    atoms: &[Vec<Complex64>],
    space: &NormedSpaceSpec,
    p: Exponent,
    cfg: &OptimizerConfig,
) -> Result<Bracket> {
    let q = space.q();
    let atoms: Vec<Vec<Complex64>> = atoms.iter().filter(|u| u.iter().any(|z| *z != ZERO)).cloned().collect();
    if atoms.is_empty() {
        return Ok(Bracket::exact(0.0));
    }
    if space.dim == 1 {
        return Ok(Bracket::exact(p.norm_of(atoms.iter().map(|u| u[0].norm()))));
    }
    if p.is_infinite() {
        return Ok(Bracket::exact(atoms.iter().map(|u| lq_norm(u, q)).fold(0.0, f64::max)));
    }
    if p == Exponent::TWO && q == Exponent::TWO {
        let m = CMatrix::from_fn(space.dim, atoms.len(), |i, k| atoms[k][i]);
        return Ok(Bracket::exact(linalg::singular_values(&m)[0]));
    }
    if p == Exponent::ONE && space.is_real() {
        let real: Vec<Vec<f64>> = atoms.iter().map(|u| u.iter().map(|z| z.re).collect()).collect();
        if let Some((v, _)) = signs::max_signed_sum(&real, space.dim, q, cfg.sign_ceiling) {
            return Ok(Bracket::exact(v));
        }
        if !cfg.allow_estimate {
            return Err(Error::CeilingExceeded {
                what: "exact sign enumeration",
                size: atoms.len(),
                ceiling: cfg.sign_ceiling,
            });
        }
    }

    let lower = ascent_lower(&atoms, space, p, cfg);
    let trivial = p.norm_of(atoms.iter().map(|u| lq_norm(u, q)));
    let (lower, upper) = face_bounds(&atoms, space, p, lower, trivial, cfg.grid_budget);
    Ok(Bracket { value: lower, lower, upper: upper.max(lower), exact: false })
}

/// Value of the objective at `y`.
fn objective(atoms: &[Vec<Complex64>], y: &[Complex64], p: Exponent) -> f64 {
    p.norm_of(atoms.iter().map(|u| pairing(u, y).norm()))
}

/// Maximizer of `Re Σ β_k c_k` over the ℓ^{p'} ball.
fn best_coefficients(c: &[Complex64], p: Exponent, real: bool) -> Vec<Complex64> {
    let unit = |z: &Complex64| {
        if real {
            Complex64::new(if z.re < 0.0 { -1.0 } else { 1.0 }, 0.0)
        } else if z.norm() > 0.0 {
            z.conj() / z.norm()
        } else {
            Complex64::new(1.0, 0.0)
        }
    };
    match p {
        Exponent::Finite(pp) if pp == 1.0 => c.iter().map(unit).collect(),
        Exponent::Finite(pp) => {
            let norm = p.norm_of(c.iter().map(|z| z.norm()));
            if norm == 0.0 {
                return vec![ZERO; c.len()];
            }
            c.iter()
                .map(|z| {
                    let m = z.norm();
                    if m == 0.0 {
                        ZERO
                    } else {
                        unit(z) * (m / norm).powf(pp - 1.0)
                    }
                })
                .collect()
        }
        Exponent::Infinite => unreachable!("p = ∞ is solved exactly"),
    }
}

fn combine(atoms: &[Vec<Complex64>], beta: &[Complex64], dim: usize) -> Vec<Complex64> {
    let mut z = vec![ZERO; dim];
    for (u, b) in atoms.iter().zip(beta) {
        for (acc, x) in z.iter_mut().zip(u) {
            *acc += b * x;
        }
    }
    z
}

/// Alternating ascent from `beta`: `y ← norming(Σβu)`, `β ← argmax`. Each
/// step does not decrease `‖Σβu‖_q`.
fn ascend(atoms: &[Vec<Complex64>], space: &NormedSpaceSpec, p: Exponent, mut beta: Vec<Complex64>, iters: usize) -> (f64, Vec<Complex64>) {
    let q = space.q();
    let mut best = 0.0f64;
    let mut best_beta = beta.clone();
    for _ in 0..iters {
        let z = combine(atoms, &beta, space.dim);
        let zn = lq_norm(&z, q);
        if zn > best {
            best = zn;
            best_beta = beta.clone();
        }
        let y = norming_functional(&z, q);
        let c: Vec<Complex64> = atoms.iter().map(|u| pairing(u, &y)).collect();
        // ‖c‖_p ≥ |Σ β_k c_k| = ‖z‖_q, with equality at a fixed point.
        let value = p.norm_of(c.iter().map(|z| z.norm()));
        if value <= zn * (1.0 + 1e-13) {
            break;
        }
        beta = best_coefficients(&c, p, space.is_real());
    }
    (best, best_beta)
}

fn random_start(fx: &mut Fixtures, k: usize, p: Exponent, real: bool) -> Vec<Complex64> {
    let raw: Vec<Complex64> = if real { fx.real_vec(k) } else { fx.complex_vec(k) };
    if p == Exponent::ONE {
        return best_coefficients(&raw, p, real);
    }
    let norm = p.conjugate().norm_of(raw.iter().map(|z| z.norm()));
    raw.iter().map(|z| z / norm).collect()
}

pub(crate) fn ascent_lower(atoms: &[Vec<Complex64>], space: &NormedSpaceSpec, p: Exponent, cfg: &OptimizerConfig) -> f64 {
    let k = atoms.len();
    let real = space.is_real();
    let biggest = (0..k).max_by(|&a, &b| lq_norm(&atoms[a], space.q()).total_cmp(&lq_norm(&atoms[b], space.q()))).unwrap_or(0);
    let mut starts = Vec::with_capacity(cfg.starts.max(1));
    let mut e = vec![ZERO; k];
    e[biggest] = Complex64::new(1.0, 0.0);
    starts.push(e);
    let mut fx = Fixtures::stream(cfg.seed, "dual-ascent");
    while starts.len() < cfg.starts.max(1) {
        starts.push(random_start(&mut fx, k, p, real));
    }
    let runs: Vec<(f64, Vec<Complex64>)> =
        starts.into_par_iter().map(|b| ascend(atoms, space, p, b, cfg.max_iters)).collect();
    let (mut best, mut beta) = runs.into_iter().fold((0.0, Vec::new()), |acc, r| if r.0 > acc.0 { r } else { acc });

    if p == Exponent::ONE && !real && cfg.phase_grid > 1 {
        let v = phase_coordinate_ascent(atoms, space, &mut beta, cfg.phase_grid);
        let (polished, _) = ascend(atoms, space, p, beta, cfg.max_iters);
        best = best.max(v).max(polished);
    }
    best
}

/// Coordinate ascent over `K` equally spaced phases per atom.
fn phase_coordinate_ascent(atoms: &[Vec<Complex64>], space: &NormedSpaceSpec, beta: &mut [Complex64], k_phases: usize) -> f64 {
    let q = space.q();
    let phases: Vec<Complex64> =
        (0..k_phases).map(|j| Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / k_phases as f64)).collect();
    let mut z = combine(atoms, beta, space.dim);
    let mut best = lq_norm(&z, q);
    for _sweep in 0..64 {
        let mut improved = false;
        for (k, u) in atoms.iter().enumerate() {
            let rest: Vec<Complex64> = z.iter().zip(u).map(|(a, b)| a - beta[k] * b).collect();
            for &t in &phases {
                let cand: Vec<Complex64> = rest.iter().zip(u).map(|(a, b)| a + t * b).collect();
                let v = lq_norm(&cand, q);
                if v > best * (1.0 + 1e-14) {
                    best = v;
                    beta[k] = t;
                    z = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
    best
}

/// Result of the dual-grid search.
#[derive(Clone, Copy, Debug)]
pub(crate) struct GridEstimate {
    /// Largest objective found on the grid; a valid lower bound.
    pub value: f64,
    /// `value · (1+δ)/(1−δ)`, an upper bound on the supremum.
    pub upper: f64,
    pub delta: f64,
}

/// Grid on the faces `y_j = 1` of the ℓ^∞ cube (for complex scalars the
/// face coordinate is real by phase invariance), other coordinates with
/// real and imaginary parts on `{−1, −1+h, …, 1}`. Since the objective is
/// a seminorm bounded by `S·‖·‖_{q'}`, every cube point lies within `δ` of
/// the grid in ℓ^{q'} and `S ≤ max_grid R · (1+δ)/(1−δ)` with `R = obj/‖y‖_{q'}`.
pub(crate) fn dual_grid(atoms: &[Vec<Complex64>], space: &NormedSpaceSpec, p: Exponent, budget: usize) -> Option<GridEstimate> {
    let d = space.dim;
    let free = (d - 1) * if space.is_real() { 1 } else { 2 };
    if d < 2 {
        return None;
    }
    let mut m = 1usize;
    while d.saturating_mul((m + 2).checked_pow(free as u32).unwrap_or(usize::MAX)) <= budget {
        m += 1;
    }
    let h = 2.0 / m as f64;
    let per_coord = if space.is_real() { h / 2.0 } else { h / std::f64::consts::SQRT_2 };
    let dq = space.dual_q();
    let delta = ((d - 1) as f64).powf(dq.recip()) * per_coord;
    if m < 2 || delta >= 1.0 {
        return None;
    }
    let side = m + 1;
    let count = side.pow(free as u32);
    let level = |i: usize| -1.0 + h * i as f64;
    let value = (0..d * count)
        .into_par_iter()
        .map(|t| {
            let (face, mut rest) = (t / count, t % count);
            let mut y = vec![ZERO; d];
            y[face] = Complex64::new(1.0, 0.0);
            for (j, slot) in y.iter_mut().enumerate() {
                if j == face {
                    continue;
                }
                let re = level(rest % side);
                rest /= side;
                let im = if space.is_real() {
                    0.0
                } else {
                    let v = level(rest % side);
                    rest /= side;
                    v
                };
                *slot = Complex64::new(re, im);
            }
            objective(atoms, &y, p) / lq_norm(&y, dq)
        })
        .reduce(|| 0.0, f64::max);
    Some(GridEstimate { value, upper: value * (1.0 + delta) / (1.0 - delta), delta })
}

struct Cell {
    bound: f64,
    face: usize,
    center: Vec<f64>,
    half: Vec<f64>,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.bound.total_cmp(&other.bound).is_eq()
    }
}

impl Eq for Cell {}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.bound.total_cmp(&other.bound)
    }
}

/// Branch-and-bound on the faces `y_j = 1` of the dual ℓ^∞ cube, the other
/// coordinates ranging over boxes in `[−1, 1]` (real and imaginary parts).
/// Each box gets an upper bound on `F(y)/‖y‖_{q'}` from [`Bounder::score`];
/// the box with the largest bound is bisected until it meets the lower
/// bound or the budget runs out. Returns `(lower, upper)`.
fn face_bounds(
    atoms: &[Vec<Complex64>],
    space: &NormedSpaceSpec,
    p: Exponent,
    lower: f64,
    trivial: f64,
    budget: usize,
) -> (f64, f64) {
    use std::collections::BinaryHeap;

    let d = space.dim;
    let per = if space.is_real() { 1 } else { 2 };
    let free = (d - 1) * per;
    let mut b = Bounder::new(atoms, space, p);
    let mut best = lower;
    let mut upper = trivial;
    let mut evals = 0usize;
    let mut heap = BinaryHeap::new();
    for face in 0..d {
        heap.push(b.cell(face, vec![0.0; free], vec![1.0; free], upper, &mut best));
        evals += 1;
    }
    while let Some(cell) = heap.pop() {
        upper = cell.bound;
        if upper <= best * (1.0 + FACE_GAP) || evals + 2 > budget {
            break;
        }
        let axis = (0..free).max_by(|&a, &b| cell.half[a].total_cmp(&cell.half[b])).unwrap_or(0);
        let mut half = cell.half.clone();
        half[axis] /= 2.0;
        for sign in [-1.0, 1.0] {
            let mut center = cell.center.clone();
            center[axis] += sign * half[axis];
            heap.push(b.cell(cell.face, center, half.clone(), upper, &mut best));
            evals += 1;
        }
    }
    (best, upper.max(best))
}

/// Upper bounds for `F(y)/‖y‖_{q'}` on a box `y + e`, `e` in the box.
///
/// First order: `(F(y) + L)/max(1, ‖y‖ − δ)` with `L` the smaller of `Uδ`
/// (`U` any upper bound on the supremum) and `‖(Σ_j |u_kj| r_j)_k‖_p`.
///
/// Second order: with `a = ⟨u, y⟩`, `b = ⟨u, e⟩`, `|b| ≤ m`,
/// `|a + b| ≤ |a| + Re(s̄ b) + ρ` for `s = a/|a|`, `ρ = min(m²/2|a|, 2m)`.
/// The remainder of the tangent of `|v + w|^p` is at most its value at
/// `w = ±m`, the `1/p` power lies below its tangent and the denominator is
/// bounded below by the norming functional. What is left is linear in `e`:
/// `F(y+e) − λ‖y+e‖ ≤ C − λN + Σ_c |γ_c − λη_c| h_c`, and the least `λ` making
/// this nonpositive bounds the ratio on the box.
struct Bounder<'a> {
    atoms: &'a [Vec<Complex64>],
    mags: Vec<Vec<f64>>,
    p: Exponent,
    dq: Exponent,
    d: usize,
    real: bool,
    y: Vec<Complex64>,
    radii: Vec<f64>,
    half: Vec<f64>,
    pairs: Vec<Complex64>,
    reach: Vec<f64>,
    v: Vec<f64>,
    gamma: Vec<f64>,
}

impl<'a> Bounder<'a> {
    fn new(atoms: &'a [Vec<Complex64>], space: &NormedSpaceSpec, p: Exponent) -> Self {
        let (d, k) = (space.dim, atoms.len());
        let per = if space.is_real() { 1 } else { 2 };
        Bounder {
            atoms,
            mags: atoms.iter().map(|u| u.iter().map(|z| z.norm()).collect()).collect(),
            p,
            dq: space.dual_q(),
            d,
            real: space.is_real(),
            y: vec![ZERO; d],
            radii: vec![0.0; d],
            half: vec![0.0; d * per],
            pairs: vec![ZERO; k],
            reach: vec![0.0; k],
            v: vec![0.0; k],
            gamma: vec![0.0; d * per],
        }
    }

    fn cell(&mut self, face: usize, center: Vec<f64>, half: Vec<f64>, u: f64, best: &mut f64) -> Cell {
        let per = if self.real { 1 } else { 2 };
        let mut j_free = 0;
        for j in 0..self.d {
            if j == face {
                self.y[j] = Complex64::new(1.0, 0.0);
                self.radii[j] = 0.0;
                self.half[j * per..(j + 1) * per].fill(0.0);
                continue;
            }
            let c = &center[j_free * per..(j_free + 1) * per];
            let h = &half[j_free * per..(j_free + 1) * per];
            self.y[j] = Complex64::new(c[0], if self.real { 0.0 } else { c[1] });
            self.radii[j] = h.iter().map(|x| x * x).sum::<f64>().sqrt();
            self.half[j * per..(j + 1) * per].copy_from_slice(h);
            j_free += 1;
        }
        for (k, u) in self.atoms.iter().enumerate() {
            self.pairs[k] = pairing(u, &self.y);
            self.reach[k] = self.mags[k].iter().zip(&self.radii).map(|(a, b)| a * b).sum();
        }
        let f = self.p.norm_of(self.pairs.iter().map(|z| z.norm()));
        let n = lq_norm(&self.y, self.dq);
        *best = best.max(f / n);
        let delta = self.dq.norm_of(self.radii.iter().copied());
        let local = self.p.norm_of(self.reach.iter().copied());
        let mut bound = ((f + local.min(u * delta)) / (n - delta).max(1.0)).min(u);
        if let Some(b) = self.second_order(n, bound) {
            bound = bound.min(b);
        }
        Cell { bound, face, center, half }
    }

    fn second_order(&mut self, n: f64, cap: f64) -> Option<f64> {
        let Exponent::Finite(pv) = self.p else { return None };
        for k in 0..self.atoms.len() {
            let (size, m) = (self.pairs[k].norm(), self.reach[k]);
            let rho = if size > 0.0 { (m * m / (2.0 * size)).min(2.0 * m) } else { 2.0 * m };
            self.v[k] = size + rho;
        }
        let (constant, big_pow) = if pv == 1.0 {
            (self.v.iter().sum(), 1.0)
        } else {
            let big = self.p.norm_of(self.v.iter().copied());
            if big == 0.0 {
                return None;
            }
            let mut excess = 0.0;
            for (&vk, &m) in self.v.iter().zip(&self.reach) {
                let lead = vk.powf(pv - 1.0);
                let phi = |w: f64| (vk + w).abs().powf(pv) - lead * vk - pv * lead * w;
                excess += phi(m).max(phi(-m));
            }
            let big_pow = big.powf(pv - 1.0);
            (big + excess / (pv * big_pow), big_pow)
        };
        // γ_c = Σ_k κ_k Re(s̄_k ⟨u_k, unit_c⟩) with κ_k = (v_k/‖v‖_p)^{p−1}.
        self.gamma.fill(0.0);
        let per = if self.real { 1 } else { 2 };
        for (k, u) in self.atoms.iter().enumerate() {
            let size = self.pairs[k].norm();
            let s = if size > 0.0 { self.pairs[k] / size } else { Complex64::new(1.0, 0.0) };
            let kappa = if pv == 1.0 { 1.0 } else { self.v[k].powf(pv - 1.0) / big_pow };
            for (j, z) in u.iter().enumerate() {
                // ⟨u, unit⟩ is u_j for the real unit and −i·u_j for the imaginary one.
                let t = s.conj() * z;
                self.gamma[j * per] += kappa * t.re;
                if !self.real {
                    self.gamma[j * per + 1] += kappa * t.im;
                }
            }
        }
        let g = norming_functional(&self.y, self.dq);
        let eta = |c: usize| if c.is_multiple_of(per) { g[c / per].re } else { g[c / per].im };
        if (0..self.half.len()).map(|c| eta(c).abs() * self.half[c]).sum::<f64>() >= n {
            return None;
        }
        let h = |lambda: f64| {
            constant - lambda * n
                + (0..self.half.len()).map(|c| (self.gamma[c] - lambda * eta(c)).abs() * self.half[c]).sum::<f64>()
        };
        if !(h(cap) <= 0.0) {
            return None;
        }
        let (mut lo, mut hi) = (0.0, cap);
        for _ in 0..50 {
            let mid = 0.5 * (lo + hi);
            if h(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Field;

    fn cfg() -> OptimizerConfig {
        OptimizerConfig::default()
    }

    fn atoms_of(fx: &mut Fixtures, k: usize, d: usize, real: bool) -> Vec<Vec<Complex64>> {
        (0..k).map(|_| if real { fx.real_vec(d) } else { fx.complex_vec(d) }).collect()
    }

    #[test]
    fn exact_paths() {
        let s = NormedSpaceSpec::real_l2(2);
        let atoms = vec![vec![Complex64::new(1.0, 0.0), ZERO], vec![ZERO, Complex64::new(1.0, 0.0)]];
        let b = sup_pairing_norm(&atoms, &s, Exponent::ONE, &cfg()).unwrap();
        assert!(b.exact && (b.value - 2f64.sqrt()).abs() < 1e-14);
        let b = sup_pairing_norm(&atoms, &s, Exponent::TWO, &cfg()).unwrap();
        assert!(b.exact && (b.value - 1.0).abs() < 1e-14);
        let b = sup_pairing_norm(&[], &s, Exponent::TWO, &cfg()).unwrap();
        assert_eq!(b.value, 0.0);
    }

    #[test]
    fn ascent_matches_svd_for_l2() {
        let mut fx = Fixtures::new(5);
        for d in 2..=3 {
            for real in [true, false] {
                let field = if real { Field::Real } else { Field::Complex };
                let s = NormedSpaceSpec::new(d, field, Exponent::TWO).unwrap();
                let atoms = atoms_of(&mut fx, 7, d, real);
                let exact = sup_pairing_norm(&atoms, &s, Exponent::TWO, &cfg()).unwrap().value;
                let est = ascent_lower(&atoms, &s, Exponent::TWO, &cfg());
                assert!(est <= exact * (1.0 + 1e-12));
                assert!((exact - est) / exact < 1e-6, "{exact} vs {est}");
            }
        }
    }

    #[test]
    fn brackets_contain_the_sign_optimum() {
        let mut fx = Fixtures::new(9);
        for q in [Exponent::ONE, Exponent::Finite(1.5), Exponent::TWO, Exponent::Infinite] {
            let s = NormedSpaceSpec::new(3, Field::Real, q).unwrap();
            let atoms = atoms_of(&mut fx, 8, 3, true);
            let exact = sup_pairing_norm(&atoms, &s, Exponent::ONE, &cfg()).unwrap().value;
            let grid = dual_grid(&atoms, &s, Exponent::ONE, 200_000).unwrap();
            assert!(grid.value <= exact * (1.0 + 1e-12));
            assert!(grid.upper >= exact * (1.0 - 1e-12));
            assert!((exact - grid.value) / exact < 0.02, "q={q}");
            let est = ascent_lower(&atoms, &s, Exponent::ONE, &cfg());
            assert!(est <= exact * (1.0 + 1e-12));
        }
    }

    #[test]
    fn complex_brackets_are_ordered() {
        let mut fx = Fixtures::new(13);
        for p in [Exponent::ONE, Exponent::Finite(1.5), Exponent::Finite(3.0)] {
            let s = NormedSpaceSpec::new(2, Field::Complex, Exponent::Finite(3.0)).unwrap();
            let atoms = atoms_of(&mut fx, 6, 2, false);
            let b = sup_pairing_norm(&atoms, &s, p, &cfg()).unwrap();
            assert!(!b.exact && b.lower <= b.upper);
            assert!(b.width() / b.value < 0.05, "p={p}: {b:?}");
        }
    }

    #[test]
    fn face_bounds_bracket_the_singular_value() {
        let mut fx = Fixtures::new(21);
        for d in 2..=3 {
            for real in [true, false] {
                let field = if real { Field::Real } else { Field::Complex };
                let s = NormedSpaceSpec::new(d, field, Exponent::TWO).unwrap();
                let atoms = atoms_of(&mut fx, 9, d, real);
                let exact = sup_pairing_norm(&atoms, &s, Exponent::TWO, &cfg()).unwrap().value;
                let trivial = Exponent::TWO.norm_of(atoms.iter().map(|u| lq_norm(u, Exponent::TWO)));
                let (lo, hi) = face_bounds(&atoms, &s, Exponent::TWO, 0.0, trivial, 20_000);
                assert!(lo <= exact * (1.0 + 1e-12) && hi >= exact * (1.0 - 1e-12), "{lo} {exact} {hi}");
                assert!((hi - lo) / exact < 0.05, "d={d} real={real}: {lo} {exact} {hi}");
            }
        }
    }

    #[test]
    fn face_bounds_dominate_sampled_ratios() {
        let mut fx = Fixtures::new(34);
        let qs = [Exponent::ONE, Exponent::Finite(1.5), Exponent::Finite(3.0), Exponent::Infinite];
        let ps = [Exponent::ONE, Exponent::Finite(4.0 / 3.0), Exponent::Finite(3.0)];
        for (i, (&q, &p)) in qs.iter().flat_map(|q| ps.iter().map(move |p| (q, p))).enumerate() {
            let d = 2 + i % 2;
            let s = NormedSpaceSpec::new(d, Field::Complex, q).unwrap();
            let atoms = atoms_of(&mut fx, 6, d, false);
            let trivial = p.norm_of(atoms.iter().map(|u| lq_norm(u, q)));
            let (lo, hi) = face_bounds(&atoms, &s, p, 0.0, trivial, 20_000);
            let sampled = (0..2000)
                .map(|_| {
                    let y = fx.complex_vec(d);
                    objective(&atoms, &y, p) / lq_norm(&y, s.dual_q())
                })
                .fold(0.0, f64::max);
            assert!(lo <= hi && sampled <= hi * (1.0 + 1e-12), "p={p} q={q}: {sampled} > {hi}");
        }
    }
}
