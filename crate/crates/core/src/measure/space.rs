//! Finite-dimensional ℓ^q spaces, their duals, and the sesquilinear pairing
//! `⟨v, x*⟩ = Σⱼ vⱼ·conj(x*ⱼ)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::Exponent;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl std::str::FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real" => Ok(Field::Real),
            "complex" => Ok(Field::Complex),
            _ => Err(Error::InvalidInput(format!("field must be real or complex, got {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LqNorm {
    pub lq: Exponent,
}

/// `X = (𝔽^d, ‖·‖_q)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormedSpaceSpec {
    pub dim: usize,
    pub field: Field,
    pub norm: LqNorm,
}

impl NormedSpaceSpec {
    pub fn new(dim: usize, field: Field, q: Exponent) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("space dimension must be >= 1".into()));
        }
        Ok(Self { dim, field, norm: LqNorm { lq: q } })
    }

    pub fn real_l2(dim: usize) -> Self {
        Self { dim, field: Field::Real, norm: LqNorm { lq: Exponent::TWO } }
    }

    pub fn q(&self) -> Exponent {
        self.norm.lq
    }

    pub fn dual_q(&self) -> Exponent {
        self.norm.lq.conjugate()
    }

    pub fn norm(&self, v: &[Complex64]) -> f64 {
        lq_norm(v, self.q())
    }

    pub fn dual_norm(&self, y: &[Complex64]) -> f64 {
        lq_norm(y, self.dual_q())
    }

    pub fn is_real(&self) -> bool {
        self.field == Field::Real
    }

    /// Checks length and, for real spaces, that imaginary parts vanish.
    pub fn validate(&self, v: &[Complex64], what: &'static str) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: v.len() });
        }
        if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(what));
        }
        if self.is_real() && v.iter().any(|z| z.im != 0.0) {
            return Err(Error::InvalidInput(format!("{what} has complex entries in a real space")));
        }
        Ok(())
    }
}

pub fn lq_norm(v: &[Complex64], q: Exponent) -> f64 {
    q.norm_of(v.iter().map(|z| z.norm()))
}

/// `⟨v, y⟩ = Σ vⱼ conj(yⱼ)`.
pub fn pairing(v: &[Complex64], y: &[Complex64]) -> Complex64 {
    v.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

/// A norming functional: `‖y‖_{q'} = 1` and `⟨z, y⟩ = ‖z‖_q`.
/// Returns the zero vector for `z = 0`.
pub fn norming_functional(z: &[Complex64], q: Exponent) -> Vec<Complex64> {
    let norm = lq_norm(z, q);
    let zero = Complex64::default();
    if norm == 0.0 {
        return vec![zero; z.len()];
    }
    let unit = |c: &Complex64| if c.norm() > 0.0 { c / c.norm() } else { zero };
    match q {
        Exponent::Infinite => {
            let k = z
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
                .map(|(k, _)| k)
                .unwrap_or(0);
            let mut y = vec![zero; z.len()];
            y[k] = unit(&z[k]);
            y
        }
        Exponent::Finite(p) if p == 1.0 => z.iter().map(unit).collect(),
        Exponent::Finite(p) => {
            let scale = norm.powf(p - 1.0);
            z.iter().map(|c| unit(c) * (c.norm().powf(p - 1.0) / scale)).collect()
        }
    }
}

/// A functional `x* ∈ X*`, normed by the dual ℓ^{q'} norm.
#[derive(Clone, Debug, PartialEq)]
pub struct DualFunctional {
    coords: Vec<Complex64>,
}

impl DualFunctional {
    pub fn new(coords: Vec<Complex64>) -> Self {
        Self { coords }
    }

    pub fn real(coords: &[f64]) -> Self {
        Self { coords: coords.iter().map(|&c| Complex64::new(c, 0.0)).collect() }
    }

    pub fn zero(dim: usize) -> Self {
        Self { coords: vec![Complex64::default(); dim] }
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn norm(&self, space: &NormedSpaceSpec) -> f64 {
        space.dual_norm(&self.coords)
    }

    /// The same functional scaled to unit dual norm (zero stays zero).
    pub fn normalized(&self, space: &NormedSpaceSpec) -> Self {
        let n = self.norm(space);
        if n == 0.0 {
            return self.clone();
        }
        Self { coords: self.coords.iter().map(|c| c / n).collect() }
    }

    pub fn pair(&self, v: &[Complex64]) -> Complex64 {
        pairing(v, &self.coords)
    }
}

impl Serialize for DualFunctional {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::json::complex_vec::serialize(&self.coords, s)
    }
}

impl<'de> Deserialize<'de> for DualFunctional {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(Self { coords: crate::json::complex_vec::deserialize(d)? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cv(v: &[(f64, f64)]) -> Vec<Complex64> {
        v.iter().map(|&(a, b)| Complex64::new(a, b)).collect()
    }

    #[test]
    fn norming_functionals() {
        let z = cv(&[(3.0, 0.0), (0.0, -4.0), (1.0, 1.0)]);
        for q in [Exponent::ONE, Exponent::Finite(1.5), Exponent::TWO, Exponent::Finite(3.0), Exponent::Infinite] {
            let y = norming_functional(&z, q);
            assert!((lq_norm(&y, q.conjugate()) - 1.0).abs() < 1e-12, "q={q}");
            let p = pairing(&z, &y);
            assert!((p.re - lq_norm(&z, q)).abs() < 1e-12 && p.im.abs() < 1e-12, "q={q}");
        }
        assert!(norming_functional(&cv(&[(0.0, 0.0)]), Exponent::TWO)[0] == Complex64::default());
    }

    #[test]
    fn space_json() {
        let s = NormedSpaceSpec::new(3, Field::Real, Exponent::TWO).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"dim":3,"field":"real","norm":{"lq":2.0}}"#);
        let back: NormedSpaceSpec = serde_json::from_str(r#"{"dim":2,"field":"complex","norm":{"lq":"inf"}}"#).unwrap();
        assert_eq!(back.q(), Exponent::Infinite);
        assert!(NormedSpaceSpec::new(0, Field::Real, Exponent::TWO).is_err());
    }

    #[test]
    fn real_space_rejects_complex_entries() {
        let s = NormedSpaceSpec::real_l2(2);
        assert!(s.validate(&cv(&[(1.0, 0.0), (0.0, 1.0)]), "atom").is_err());
        assert!(s.validate(&cv(&[(1.0, 0.0)]), "atom").is_err());
        assert!(s.validate(&cv(&[(1.0, 0.0), (2.0, 0.0)]), "atom").is_ok());
    }
}
