//! JSON encodings shared by the file formats: complex numbers as `[re, im]`
//! pairs and square matrices as row-major lists of pairs.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::linalg::CMatrix;

pub(crate) fn to_pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

pub(crate) fn from_pair(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

pub mod complex_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|&z| to_pair(z)).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let raw = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(raw.into_iter().map(from_pair).collect())
    }
}

/// Row-major `[[re, im], …]` of a square matrix.
pub fn matrix_to_pairs(m: &CMatrix) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(to_pair(m[(i, j)]));
        }
    }
    out
}

pub fn matrix_from_pairs(pairs: &[[f64; 2]]) -> Option<CMatrix> {
    let n = (pairs.len() as f64).sqrt().round() as usize;
    if n * n != pairs.len() {
        return None;
    }
    Some(CMatrix::from_fn(n, n, |i, j| from_pair(pairs[i * n + j])))
}

pub mod square_matrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &CMatrix, s: S) -> Result<S::Ok, S::Error> {
        matrix_to_pairs(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMatrix, D::Error> {
        let raw = Vec::<[f64; 2]>::deserialize(d)?;
        matrix_from_pairs(&raw).ok_or_else(|| D::Error::custom("matrix entry count is not a perfect square"))
    }
}

pub mod square_matrices {
    use super::*;

    pub fn serialize<S: Serializer>(ms: &[CMatrix], s: S) -> Result<S::Ok, S::Error> {
        ms.iter().map(matrix_to_pairs).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<CMatrix>, D::Error> {
        let raw = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        raw.iter()
            .map(|m| matrix_from_pairs(m).ok_or_else(|| D::Error::custom("matrix entry count is not a perfect square")))
            .collect()
    }
}
