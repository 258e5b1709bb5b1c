//! Seeded fixture generation.
//!
//! One root seed expands into independent ChaCha streams keyed by a stable
//! hash of a label, so adding a new consumer never shifts another one's draws.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::group::FiniteAbelianGroup;
use crate::linalg::CMatrix;
use crate::measure::{DualFunctional, NormedSpaceSpec, VectorMeasure};
use crate::weyl::PhaseFunction;

/// FNV-1a, used to turn labels into stream ids.
pub fn stable_hash(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

pub struct Fixtures {
    rng: ChaCha8Rng,
}

impl Fixtures {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Independent stream for `label` under the root `seed`.
    pub fn stream(seed: u64, label: &str) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stable_hash(label));
        Self { rng }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random()
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn complex(&mut self) -> Complex64 {
        Complex64::new(self.normal(), self.normal())
    }

    pub fn complex_vec(&mut self, n: usize) -> Vec<Complex64> {
        (0..n).map(|_| self.complex()).collect()
    }

    pub fn real_vec(&mut self, n: usize) -> Vec<Complex64> {
        (0..n).map(|_| Complex64::new(self.normal(), 0.0)).collect()
    }

    pub fn unimodular(&mut self) -> Complex64 {
        Complex64::from_polar(1.0, std::f64::consts::TAU * self.uniform())
    }

    /// Complex Gaussian entries; with probability `1/4` a random subset of
    /// entries is zeroed to exercise sparse supports.
    pub fn phase_function(&mut self, group: &FiniteAbelianGroup) -> PhaseFunction {
        let mut values = self.complex_vec(group.phase_len());
        if self.index(4) == 0 {
            for v in values.iter_mut() {
                if self.index(3) == 0 {
                    *v = Complex64::default();
                }
            }
        }
        PhaseFunction::new(group.clone(), values).expect("finite gaussian draws")
    }

    pub fn matrix(&mut self, n: usize) -> CMatrix {
        CMatrix::from_fn(n, n, |_, _| self.complex())
    }

    fn scalars(&mut self, space: &NormedSpaceSpec, n: usize) -> Vec<Complex64> {
        if space.is_real() {
            self.real_vec(n)
        } else {
            self.complex_vec(n)
        }
    }

    /// Gaussian atoms; with probability `1/4` some atoms are zero.
    pub fn measure(&mut self, group: &FiniteAbelianGroup, space: &NormedSpaceSpec) -> VectorMeasure {
        let sparse = self.index(4) == 0;
        let atoms = (0..group.phase_len())
            .map(|_| {
                let v = self.scalars(space, space.dim);
                if sparse && self.index(3) == 0 {
                    vec![Complex64::default(); space.dim]
                } else {
                    v
                }
            })
            .collect();
        VectorMeasure::new(group.clone(), *space, atoms).expect("finite gaussian draws")
    }

    /// A functional of unit dual norm.
    pub fn dual_functional(&mut self, space: &NormedSpaceSpec) -> DualFunctional {
        DualFunctional::new(self.scalars(space, space.dim)).normalized(space)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<f64> = (0..4).map(|_| Fixtures::stream(7, "plancherel").normal()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        let mut s1 = Fixtures::stream(7, "plancherel");
        let mut s2 = Fixtures::stream(7, "homomorphism");
        assert_ne!(s1.normal(), s2.normal());
    }
}
