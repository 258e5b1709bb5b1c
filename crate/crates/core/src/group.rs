//! Finite abelian groups `ℤ_{n₁} × … × ℤ_{n_k}`, their characters, and the
//! phase space `G × Ĝ`.
//!
//! The dual group is identified with `G` through the pairing
//! `χ_a(x) = exp(2πi Σⱼ aⱼxⱼ/nⱼ)`, so characters are index tuples as well.
//! Elements and characters are enumerated lexicographically (last factor
//! fastest), and the phase point `(x, χ_a)` has flat index `idx(x)·|G| + idx(a)`.
//!
//! Haar normalization: counting measure on `G`, `1/|G|` times counting
//! measure on `Ĝ`, hence mass `1/|G|` per phase point.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest `|G|` for which the full pairing table is cached.
const PAIRING_TABLE_MAX: usize = 1024;

#[derive(Clone)]
pub struct FiniteAbelianGroup {
    inner: Arc<GroupData>,
}

struct GroupData {
    orders: Vec<usize>,
    order: usize,
    strides: Vec<usize>,
    /// `lcm / nⱼ`, so that `Σ aⱼxⱼ/nⱼ = (Σ aⱼxⱼ·scaleⱼ) / lcm`.
    scales: Vec<usize>,
    lcm: usize,
    roots: Vec<Complex64>,
    neg: Vec<usize>,
    sub: OnceLock<Vec<u32>>,
    pairing: OnceLock<Vec<Complex64>>,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl FiniteAbelianGroup {
    pub fn new(orders: Vec<usize>) -> Result<Self> {
        if orders.is_empty() {
            return Err(Error::InvalidGroup("at least one cyclic factor required".into()));
        }
        if let Some(bad) = orders.iter().find(|&&n| n == 0) {
            return Err(Error::InvalidGroup(format!("cyclic order {bad} must be >= 1")));
        }
        let order = orders
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n))
            .filter(|&n| n <= u32::MAX as usize)
            .ok_or_else(|| Error::InvalidGroup("group order overflows".into()))?;
        let mut strides = vec![1usize; orders.len()];
        for j in (0..orders.len().saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * orders[j + 1];
        }
        let lcm = orders.iter().fold(1usize, |l, &n| l / gcd(l, n) * n);
        let scales = orders.iter().map(|&n| lcm / n).collect();
        let roots = (0..lcm)
            .map(|k| {
                let (s, c) = (TAU * k as f64 / lcm as f64).sin_cos();
                Complex64::new(c, s)
            })
            .collect();

        let mut data = GroupData {
            orders,
            order,
            strides,
            scales,
            lcm,
            roots,
            neg: Vec::new(),
            sub: OnceLock::new(),
            pairing: OnceLock::new(),
        };
        data.neg = (0..order)
            .map(|i| {
                let c = data.decode(i);
                let negated: Vec<usize> =
                    c.iter().zip(&data.orders).map(|(&x, &n)| (n - x) % n).collect();
                data.encode(&negated)
            })
            .collect();
        Ok(Self { inner: Arc::new(data) })
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn orders(&self) -> &[usize] {
        &self.inner.orders
    }

    /// `|G|`.
    pub fn order(&self) -> usize {
        self.inner.order
    }

    /// `|G|²`, the number of phase points.
    pub fn phase_len(&self) -> usize {
        self.inner.order * self.inner.order
    }

    pub fn haar(&self) -> HaarWeights {
        HaarWeights::for_order(self.order())
    }

    /// Mass of one phase point, `1/|G|`.
    pub fn phase_weight(&self) -> f64 {
        1.0 / self.order() as f64
    }

    pub fn same_as(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.orders == other.inner.orders
    }

    pub fn ensure_same(&self, other: &Self) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GroupMismatch {
                left: self.orders().to_vec(),
                right: other.orders().to_vec(),
            })
        }
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement { group: self.clone(), coords: vec![0; self.orders().len()] }
    }

    pub fn trivial_character(&self) -> Character {
        Character { group: self.clone(), coords: vec![0; self.orders().len()] }
    }

    pub fn element(&self, coords: &[i64]) -> Result<GroupElement> {
        Ok(GroupElement { group: self.clone(), coords: self.reduce(coords)? })
    }

    pub fn character(&self, coords: &[i64]) -> Result<Character> {
        Ok(Character { group: self.clone(), coords: self.reduce(coords)? })
    }

    pub fn element_at(&self, index: usize) -> GroupElement {
        GroupElement { group: self.clone(), coords: self.inner.decode(index) }
    }

    pub fn character_at(&self, index: usize) -> Character {
        Character { group: self.clone(), coords: self.inner.decode(index) }
    }

    pub fn phase_point_at(&self, index: usize) -> PhasePoint {
        let n = self.order();
        PhasePoint { element: self.element_at(index / n), character: self.character_at(index % n) }
    }

    /// Group law, written additively on residues.
    pub fn mul(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.ensure_same(&a.group)?;
        self.ensure_same(&b.group)?;
        let coords = a
            .coords
            .iter()
            .zip(&b.coords)
            .zip(self.orders())
            .map(|((&x, &y), &n)| (x + y) % n)
            .collect();
        Ok(GroupElement { group: self.clone(), coords })
    }

    pub fn inverse(&self, a: &GroupElement) -> Result<GroupElement> {
        self.ensure_same(&a.group)?;
        Ok(self.element_at(self.neg_idx(self.inner.encode(&a.coords))))
    }

    /// `χ(x) = exp(2πi Σⱼ aⱼxⱼ/nⱼ)`.
    pub fn character_eval(&self, chi: &Character, x: &GroupElement) -> Result<Complex64> {
        self.ensure_same(&chi.group)?;
        self.ensure_same(&x.group)?;
        Ok(self.inner.pairing_coords(&chi.coords, &x.coords))
    }

    /// All phase points in storage order.
    pub fn enumerate_phase_space(&self) -> Vec<PhasePoint> {
        (0..self.phase_len()).map(|i| self.phase_point_at(i)).collect()
    }

    pub fn element_index(&self, x: &GroupElement) -> Result<usize> {
        self.ensure_same(&x.group)?;
        Ok(self.inner.encode(&x.coords))
    }

    pub fn character_index(&self, chi: &Character) -> Result<usize> {
        self.ensure_same(&chi.group)?;
        Ok(self.inner.encode(&chi.coords))
    }

    pub fn phase_index(&self, point: &PhasePoint) -> Result<usize> {
        Ok(self.element_index(&point.element)? * self.order() + self.character_index(&point.character)?)
    }

    // Flat-index arithmetic used by the numerical kernels.

    pub(crate) fn neg_idx(&self, i: usize) -> usize {
        self.inner.neg[i]
    }

    /// Index of `x - y`.
    pub(crate) fn sub_idx(&self, x: usize, y: usize) -> usize {
        let n = self.order();
        if n <= PAIRING_TABLE_MAX {
            self.sub_table()[x * n + y] as usize
        } else {
            self.inner.sub_slow(x, y)
        }
    }

    /// Index of `x + y`.
    pub(crate) fn add_idx(&self, x: usize, y: usize) -> usize {
        self.sub_idx(x, self.neg_idx(y))
    }

    pub(crate) fn sub_table(&self) -> &[u32] {
        self.inner.sub.get_or_init(|| {
            let n = self.order();
            let mut t = Vec::with_capacity(n * n);
            for x in 0..n {
                for y in 0..n {
                    t.push(self.inner.sub_slow(x, y) as u32);
                }
            }
            t
        })
    }

    /// `χ_a(x)` by flat indices.
    pub(crate) fn pairing(&self, a: usize, x: usize) -> Complex64 {
        let n = self.order();
        if n <= PAIRING_TABLE_MAX {
            self.pairing_table()[a * n + x]
        } else {
            self.inner.pairing_coords(&self.inner.decode(a), &self.inner.decode(x))
        }
    }

    /// Row-major `|G|×|G|` table of `χ_a(x)`, rows indexed by `a`.
    pub(crate) fn pairing_table(&self) -> &[Complex64] {
        self.inner.pairing.get_or_init(|| {
            let n = self.order();
            let mut t = Vec::with_capacity(n * n);
            for a in 0..n {
                let ca = self.inner.decode(a);
                for x in 0..n {
                    t.push(self.inner.pairing_coords(&ca, &self.inner.decode(x)));
                }
            }
            t
        })
    }

    fn reduce(&self, coords: &[i64]) -> Result<Vec<usize>> {
        if coords.len() != self.orders().len() {
            return Err(Error::DimensionMismatch {
                expected: self.orders().len(),
                found: coords.len(),
            });
        }
        Ok(coords
            .iter()
            .zip(self.orders())
            .map(|(&c, &n)| c.rem_euclid(n as i64) as usize)
            .collect())
    }
}

impl GroupData {
    fn decode(&self, mut index: usize) -> Vec<usize> {
        let mut coords = vec![0; self.orders.len()];
        for (j, &s) in self.strides.iter().enumerate() {
            coords[j] = index / s;
            index %= s;
        }
        coords
    }

    fn encode(&self, coords: &[usize]) -> usize {
        coords.iter().zip(&self.strides).map(|(c, s)| c * s).sum()
    }

    fn sub_slow(&self, x: usize, y: usize) -> usize {
        let (cx, cy) = (self.decode(x), self.decode(y));
        let d: Vec<usize> = cx
            .iter()
            .zip(&cy)
            .zip(&self.orders)
            .map(|((&a, &b), &n)| (a + n - b) % n)
            .collect();
        self.encode(&d)
    }

    fn pairing_coords(&self, a: &[usize], x: &[usize]) -> Complex64 {
        let k = a
            .iter()
            .zip(x)
            .zip(&self.scales)
            .zip(&self.orders)
            .fold(0usize, |acc, (((&a, &x), &s), &n)| (acc + (a * x % n) * s) % self.lcm);
        self.roots[k]
    }
}

impl PartialEq for FiniteAbelianGroup {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

impl Eq for FiniteAbelianGroup {}

impl fmt::Debug for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteAbelianGroup").field("orders", &self.orders()).finish()
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.orders().iter().map(|n| format!("Z{n}")).collect();
        f.write_str(&parts.join("x"))
    }
}

#[derive(Serialize, Deserialize)]
struct GroupDescriptor {
    orders: Vec<usize>,
}

impl Serialize for FiniteAbelianGroup {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GroupDescriptor { orders: self.orders().to_vec() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FiniteAbelianGroup {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let desc = GroupDescriptor::deserialize(d)?;
        FiniteAbelianGroup::new(desc.orders).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupElement {
    group: FiniteAbelianGroup,
    coords: Vec<usize>,
}

impl GroupElement {
    pub fn coords(&self) -> &[usize] {
        &self.coords
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Character {
    group: FiniteAbelianGroup,
    coords: Vec<usize>,
}

impl Character {
    pub fn coords(&self) -> &[usize] {
        &self.coords
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn is_trivial(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}

impl Serialize for GroupElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords.serialize(s)
    }
}

impl Serialize for Character {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords.serialize(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhasePoint {
    pub element: GroupElement,
    pub character: Character,
}

impl PhasePoint {
    pub fn new(element: GroupElement, character: Character) -> Result<Self> {
        element.group.ensure_same(&character.group)?;
        Ok(Self { element, character })
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.element.group
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HaarWeights {
    pub group_mass: f64,
    pub dual_mass: f64,
    pub phase_mass: f64,
}

impl HaarWeights {
    fn for_order(n: usize) -> Self {
        let dual = 1.0 / n as f64;
        Self { group_mass: 1.0, dual_mass: dual, phase_mass: dual }
    }

    pub fn total_phase_mass(&self, group: &FiniteAbelianGroup) -> f64 {
        self.phase_mass * group.phase_len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn modular_addition() {
        let z4 = FiniteAbelianGroup::cyclic(4).unwrap();
        let s = z4.mul(&z4.element(&[3]).unwrap(), &z4.element(&[2]).unwrap()).unwrap();
        assert_eq!(s.coords(), &[1]);

        let g = FiniteAbelianGroup::new(vec![2, 3]).unwrap();
        let a = g.element(&[1, 2]).unwrap();
        assert_eq!(g.mul(&a, &a).unwrap().coords(), &[0, 1]);
        assert_eq!(g.mul(&a, &g.identity()).unwrap(), a);
        assert_eq!(g.mul(&a, &g.inverse(&a).unwrap()).unwrap(), g.identity());
    }

    #[test]
    fn mismatched_descriptors() {
        let z4 = FiniteAbelianGroup::cyclic(4).unwrap();
        let z2 = FiniteAbelianGroup::cyclic(2).unwrap();
        let err = z4.mul(&z4.identity(), &z2.identity()).unwrap_err();
        assert!(matches!(err, Error::GroupMismatch { .. }));
        assert!(z4.character_eval(&z2.trivial_character(), &z4.identity()).is_err());
    }

    #[test]
    fn rejects_zero_order() {
        assert!(FiniteAbelianGroup::new(vec![3, 0]).is_err());
        assert!(FiniteAbelianGroup::new(vec![]).is_err());
    }

    #[test]
    fn character_values() {
        let z4 = FiniteAbelianGroup::cyclic(4).unwrap();
        let v = z4.character_eval(&z4.character(&[1]).unwrap(), &z4.element(&[1]).unwrap()).unwrap();
        assert!((v - c(0.0, 1.0)).norm() < 1e-15);

        let z2 = FiniteAbelianGroup::cyclic(2).unwrap();
        let v = z2.character_eval(&z2.character(&[1]).unwrap(), &z2.element(&[1]).unwrap()).unwrap();
        assert!((v - c(-1.0, 0.0)).norm() < 1e-15);

        let g = FiniteAbelianGroup::new(vec![3, 2]).unwrap();
        for i in 0..g.order() {
            let v = g.character_eval(&g.trivial_character(), &g.element_at(i)).unwrap();
            assert_eq!(v, c(1.0, 0.0));
        }
    }

    #[test]
    fn orthogonality_and_multiplicativity() {
        for orders in [vec![2], vec![4], vec![2, 2], vec![6], vec![3, 4]] {
            let g = FiniteAbelianGroup::new(orders).unwrap();
            let n = g.order();
            for a in 0..n {
                let s: Complex64 = (0..n).map(|x| g.pairing(a, x)).sum();
                let expected = if a == 0 { n as f64 } else { 0.0 };
                assert!((s - c(expected, 0.0)).norm() < 1e-12);
                for b in 0..n {
                    for x in 0..n {
                        let lhs = g.pairing(g.add_idx(a, b), x);
                        assert!((lhs - g.pairing(a, x) * g.pairing(b, x)).norm() < 1e-12);
                        let rhs = g.pairing(a, g.add_idx(x, b));
                        assert!((rhs - g.pairing(a, x) * g.pairing(a, b)).norm() < 1e-12);
                    }
                    assert!((g.pairing(a, b).norm() - 1.0).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn phase_space_order() {
        let z2 = FiniteAbelianGroup::cyclic(2).unwrap();
        let pts: Vec<(usize, usize)> = z2
            .enumerate_phase_space()
            .iter()
            .map(|p| (p.element.coords()[0], p.character.coords()[0]))
            .collect();
        assert_eq!(pts, vec![(0, 0), (0, 1), (1, 0), (1, 1)]);

        let g = FiniteAbelianGroup::new(vec![2, 3]).unwrap();
        let pts = g.enumerate_phase_space();
        assert_eq!(pts.len(), 36);
        assert_eq!(pts[0].element, g.identity());
        assert!(pts[0].character.is_trivial());
        for (i, p) in pts.iter().enumerate() {
            assert_eq!(g.phase_index(p).unwrap(), i);
        }
    }

    #[test]
    fn haar_mass() {
        let g = FiniteAbelianGroup::new(vec![2, 3]).unwrap();
        let h = g.haar();
        assert_eq!(h.phase_mass, h.group_mass * h.dual_mass);
        assert!((h.total_phase_mass(&g) - 6.0).abs() < 1e-12);
    }

    #[test]
    fn descriptor_json() {
        let g = FiniteAbelianGroup::new(vec![4, 2]).unwrap();
        assert_eq!(serde_json::to_string(&g).unwrap(), r#"{"orders":[4,2]}"#);
        let back: FiniteAbelianGroup = serde_json::from_str(r#"{"orders":[4,2]}"#).unwrap();
        assert_eq!(back, g);
        assert!(serde_json::from_str::<FiniteAbelianGroup>(r#"{"orders":[0]}"#).is_err());
    }
}
