//! Twisted convolution on phase space
//!
//! ```text
//! (f × g)(x,χ) = Σ_{(x',χ')} f(x−x', χχ'⁻¹) g(x',χ') conj(χ'(x)) χ'(x') / |G|
//! ```
//!
//! evaluated three ways: the defining quadruple sum (kept as the oracle),
//! through the Weyl transform `W⁻¹(W(f)W(g))`, and through the same
//! factorization with FFT-based transforms.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::fourier::GroupFft;
use crate::group::{FiniteAbelianGroup, PhasePoint};
use crate::random::Fixtures;
use crate::weyl::{self, PhaseFunction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvPath {
    Direct,
    WeylFactorized,
    Fft,
}

impl ConvPath {
    pub const ALL: [ConvPath; 3] = [ConvPath::Direct, ConvPath::WeylFactorized, ConvPath::Fft];

    pub fn as_str(self) -> &'static str {
        match self {
            ConvPath::Direct => "direct",
            ConvPath::WeylFactorized => "weyl_factorized",
            ConvPath::Fft => "fft",
        }
    }
}

impl fmt::Display for ConvPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConvPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ConvPath::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown convolution path {s:?}")))
    }
}

pub fn twisted_convolve(f: &PhaseFunction, g: &PhaseFunction, path: ConvPath) -> Result<PhaseFunction> {
    f.group().ensure_same(g.group())?;
    Ok(match path {
        ConvPath::Direct => convolve_direct(f, g),
        ConvPath::WeylFactorized => {
            let prod = weyl::weyl_transform(f).compose(&weyl::weyl_transform(g))?;
            weyl::weyl_inverse(&prod)
        }
        ConvPath::Fft => {
            let fft = GroupFft::new(f.group());
            let prod = weyl::weyl_transform_fft_with(f, &fft).compose(&weyl::weyl_transform_fft_with(g, &fft))?;
            weyl::weyl_inverse_fft_with(&prod, &fft)
        }
    })
}

fn convolve_direct(f: &PhaseFunction, g: &PhaseFunction) -> PhaseFunction {
    let group = f.group();
    let n = group.order();
    let w = group.phase_weight();
    let table = group.pairing_table();
    let sub = group.sub_table();
    let (fv, gv) = (f.values(), g.values());

    let values: Vec<Complex64> = (0..n * n)
        .into_par_iter()
        .map(|sigma| {
            let (x, a) = (sigma / n, sigma % n);
            let mut acc = Complex64::default();
            for x2 in 0..n {
                let fx = sub[x * n + x2] as usize * n;
                // conj(χ'(x)) χ'(x') = χ'(x' − x)
                let shift = sub[x2 * n + x] as usize;
                let grow = &gv[x2 * n..(x2 + 1) * n];
                for (a2, &gval) in grow.iter().enumerate() {
                    if gval == Complex64::default() {
                        continue;
                    }
                    let fval = fv[fx + sub[a * n + a2] as usize];
                    acc += fval * gval * table[a2 * n + shift];
                }
            }
            acc * w
        })
        .collect();
    PhaseFunction::new(group.clone(), values).expect("finite inputs give finite sums")
}

/// `T_{(x',χ')} f(x,χ) = f(x−x', χχ'⁻¹) · conj(χ'(x)) · χ'(x')`.
pub fn twisted_translate(f: &PhaseFunction, shift: &PhasePoint) -> Result<PhaseFunction> {
    let group = f.group();
    group.ensure_same(shift.group())?;
    let x2 = group.element_index(&shift.element)?;
    let a2 = group.character_index(&shift.character)?;
    Ok(translate_by_index(f, x2, a2))
}

pub(crate) fn translate_by_index(f: &PhaseFunction, x2: usize, a2: usize) -> PhaseFunction {
    let group = f.group();
    let n = group.order();
    PhaseFunction::from_fn(group, |sigma| {
        let (x, a) = (sigma / n, sigma % n);
        let src = group.sub_idx(x, x2) * n + group.sub_idx(a, a2);
        f.values()[src] * group.pairing(a2, group.sub_idx(x2, x))
    })
}

/// Margins of the Young-type inequalities for twisted convolution.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct YoungMargins {
    pub p: Exponent,
    pub q: Exponent,
    /// `1/r = 1/p + 1/q − 1`.
    pub r: Exponent,
    /// `‖f‖_p‖g‖_q − ‖f×g‖_r`
    pub young: f64,
    pub young_scale: f64,
    /// `‖f‖_1‖g‖_q − ‖f×g‖_q`
    pub l1_left: f64,
    /// `‖f‖_1‖g‖_q − ‖g×f‖_q`
    pub l1_right: f64,
    pub l1_scale: f64,
}

impl YoungMargins {
    /// Smallest margin divided by its scale (0 when the scale vanishes).
    pub fn worst_relative(&self) -> f64 {
        let rel = |m: f64, s: f64| if s > 0.0 { m / s } else { m.min(0.0) };
        rel(self.young, self.young_scale)
            .min(rel(self.l1_left, self.l1_scale))
            .min(rel(self.l1_right, self.l1_scale))
    }
}

/// Young exponent `r` with `1/r = 1/p + 1/q − 1`.
pub fn young_exponent(p: Exponent, q: Exponent) -> Result<Exponent> {
    let s = p.recip() + q.recip() - 1.0;
    if s < -1e-12 {
        return Err(Error::UnsupportedExponents { p: p.value(), q: q.value() });
    }
    Exponent::from_recip(s.max(0.0))
}

pub fn young_margins(f: &PhaseFunction, g: &PhaseFunction, p: f64, q: f64) -> Result<YoungMargins> {
    let (p, q) = (Exponent::new(p)?, Exponent::new(q)?);
    let r = young_exponent(p, q)?;
    let fg = twisted_convolve(f, g, ConvPath::Direct)?;
    let gf = twisted_convolve(g, f, ConvPath::Direct)?;
    let young_scale = f.norm(p) * g.norm(q);
    let l1_scale = f.norm(Exponent::ONE) * g.norm(q);
    Ok(YoungMargins {
        p,
        q,
        r,
        young: young_scale - fg.norm(r),
        young_scale,
        l1_left: l1_scale - fg.norm(q),
        l1_right: l1_scale - gf.norm(q),
        l1_scale,
    })
}

pub const DEFAULT_BENCH_CEILING: usize = 128;

#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub group: String,
    pub path: ConvPath,
    pub mean_ns: f64,
    pub stddev_ns: f64,
    /// Relative L² distance to the direct path on the same inputs.
    pub agreement_err: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn mean_ns(&self, path: ConvPath) -> Option<f64> {
        self.rows.iter().find(|r| r.path == path).map(|r| r.mean_ns)
    }

    /// `direct / path` wall-time ratio.
    pub fn speedup(&self, path: ConvPath) -> Option<f64> {
        Some(self.mean_ns(ConvPath::Direct)? / self.mean_ns(path)?)
    }

    pub fn max_agreement_err(&self) -> f64 {
        self.rows.iter().map(|r| r.agreement_err).fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("group,path,mean_ns,stddev_ns,agreement_err\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{:.1},{:.1},{:.3e}\n",
                r.group, r.path, r.mean_ns, r.stddev_ns, r.agreement_err
            ));
        }
        out
    }
}

/// Times every path on seeded random inputs; paths run sequentially.
pub fn bench_conv(group: &FiniteAbelianGroup, trials: usize, ceiling: usize) -> Result<BenchReport> {
    if group.order() > ceiling {
        return Err(Error::CeilingExceeded { what: "benchmark group order", size: group.order(), ceiling });
    }
    if trials == 0 {
        return Ok(BenchReport::default());
    }
    let mut fx = Fixtures::stream(0, &format!("bench/{group}"));
    let f = fx.phase_function(group);
    let g = fx.phase_function(group);
    let oracle = twisted_convolve(&f, &g, ConvPath::Direct)?;

    let mut rows = Vec::new();
    for path in ConvPath::ALL {
        let mut times = Vec::with_capacity(trials);
        let mut agreement = 0.0f64;
        for _ in 0..trials {
            let start = Instant::now();
            let out = twisted_convolve(&f, &g, path)?;
            times.push(start.elapsed().as_nanos() as f64);
            agreement = agreement.max(out.relative_l2_error(&oracle)?);
        }
        let mean = times.iter().sum::<f64>() / trials as f64;
        let var = times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / trials as f64;
        rows.push(BenchRow {
            group: group.to_string(),
            path,
            mean_ns: mean,
            stddev_ns: var.sqrt(),
            agreement_err: agreement,
        });
    }
    Ok(BenchReport { rows })
}
