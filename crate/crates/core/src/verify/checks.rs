use num_complex::Complex64;
use rand::seq::SliceRandom;

use super::{CheckSettings, Outcome, Suite, VerifyConfig};
use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::group::FiniteAbelianGroup;
use crate::linalg::{self, CMatrix};
use crate::measure::{
    lp_nu_norm, lq_norm, p_semivariation, p_semivariation_estimate, semivariation, semivariation_dual_grid,
    Field, NormedSpaceSpec, OptimizerConfig, PhaseSet, VectorMeasure, SUBSET_SEARCH_MAX_POINTS,
};
use crate::random::Fixtures;
use crate::twisted::{self, twisted_convolve, ConvPath};
use crate::vector_twisted::{
    fn_measure_tconv, measure_tconv, measure_tconv_margin, pettis_defect, pp_contraction_margin, tconv_nu_vector,
    tconv_nu_weak, weyl_tconv_identity_check, young_vvyi_margin, InequalityMargin, ScalarMeasure,
};
use crate::vector_weyl::{
    amplification_lower_bound, kernel_support_test, rho_family_rank, vv_hausdorff_young_margin,
    weyl_nu, weyl_nu_kernel, weyl_nu_weak, weyl_of_measure, LinearMap, VectorPhaseFunction,
};
use crate::weyl::{self, rho_matrix, PhaseFunction};

pub(crate) type Runner = fn(&Ctx, &str, usize, &CheckSettings) -> Result<Vec<Outcome>>;

pub(crate) struct Check {
    pub name: &'static str,
    pub suite: Suite,
    pub anchor: &'static str,
    pub run: Runner,
}

pub(crate) const CHECKS: &[Check] = &[
    Check { name: "character_orthogonality", suite: Suite::Core, anchor: "Σ_x χ(x) = |G|·[χ = 1]", run: character_orthogonality },
    Check { name: "rho_projective_law", suite: Suite::Core, anchor: "ρ(x,χ)ρ(x',χ') = conj(χ'(x))·ρ(x+x', χχ')", run: rho_projective_law },
    Check { name: "rho_unitarity", suite: Suite::Core, anchor: "ρ(ω)*ρ(ω) = I", run: rho_unitarity },
    Check { name: "plancherel", suite: Suite::Core, anchor: "‖W(f)‖_S2 = ‖f‖_L2", run: plancherel },
    Check { name: "weyl_round_trip", suite: Suite::Core, anchor: "W⁻¹W = id, WW⁻¹ = id", run: weyl_round_trip },
    Check { name: "weyl_fft_agreement", suite: Suite::Core, anchor: "FFT transforms = direct transforms", run: weyl_fft_agreement },
    Check { name: "homomorphism", suite: Suite::Core, anchor: "W(f×g) = W(f)W(g)", run: homomorphism },
    Check { name: "conv_path_equivalence", suite: Suite::Core, anchor: "direct = weyl_factorized = fft, |G| ≤ 16", run: conv_path_equivalence },
    Check { name: "hausdorff_young", suite: Suite::Core, anchor: "‖W(f)‖_{S_p'} ≤ ‖f‖_p, 1 ≤ p ≤ 2", run: hausdorff_young },
    Check { name: "young_margins", suite: Suite::Core, anchor: "‖f×g‖_r ≤ ‖f‖_p‖g‖_q, ‖f×g‖_q ≤ ‖f‖_1‖g‖_q", run: young_margins },
    Check { name: "noncommutativity_witness", suite: Suite::Core, anchor: "‖f×g − g×f‖_2 > threshold on Z2", run: noncommutativity_witness },
    Check { name: "semivariation_duality", suite: Suite::Vmeasure, anchor: "sign enumeration = dual-ball sup within grid resolution", run: semivariation_duality },
    Check { name: "semivariation_sandwich", suite: Suite::Vmeasure, anchor: "‖ν(A)‖ ≤ ‖ν‖(A) ≤ Σ_A ‖v_ω‖", run: semivariation_sandwich },
    Check { name: "semivariation_monotone", suite: Suite::Vmeasure, anchor: "A ⊆ B ⇒ ‖ν‖(A) ≤ ‖ν‖(B)", run: semivariation_monotone },
    Check { name: "p_semivariation_exact_vs_ascent", suite: Suite::Vmeasure, anchor: "‖ν‖_{2,m} exact = ascent estimate (ℓ²)", run: p_semivariation_exact_vs_ascent },
    Check { name: "lp_nu_homogeneity", suite: Suite::Vmeasure, anchor: "‖cf‖_{ν,p} = |c|‖f‖_{ν,p}, |g| ≤ |f| ⇒ ‖g‖ ≤ ‖f‖", run: lp_nu_homogeneity },
    Check { name: "lp_containment", suite: Suite::Vmeasure, anchor: "‖f‖_ν ≤ ‖f‖_{ν,p}·‖ν‖^{1/p'}", run: lp_containment },
    Check { name: "infinity_semivariation", suite: Suite::Vmeasure, anchor: "subset search = max_ω ‖v_ω‖/w", run: infinity_semivariation },
    Check { name: "scalarization_coherence", suite: Suite::Vweyl, anchor: "⟨W^ν(f), x*⟩ = W(f·h_{x*})", run: scalarization_coherence },
    Check { name: "weyl_nu_density", suite: Suite::Vweyl, anchor: "W^ν(f) = W(ν_f)", run: weyl_nu_density },
    Check { name: "measure_injectivity", suite: Suite::Vweyl, anchor: "W(ν) = 0 ⇒ ν = 0 (ν recovered from W(ν)), |G| ≤ 4", run: measure_injectivity },
    Check { name: "kernel_support", suite: Suite::Vweyl, anchor: "ker(f ↦ W^ν(f)) = {f = 0 ν-a.e.}, |G| ≤ 4", run: kernel_support },
    Check { name: "vv_hausdorff_young", suite: Suite::Vweyl, anchor: "‖Σ ρ⊗F w‖_{S_p'} ≤ ‖F‖_{L^p(S_p')}", run: vv_hausdorff_young },
    Check { name: "vv_hausdorff_young_p2_equality", suite: Suite::Vweyl, anchor: "equality at p = 2", run: vv_hausdorff_young_p2_equality },
    Check { name: "amplification_monotone", suite: Suite::Vweyl, anchor: "amplification bound nondecreasing in level and samples", run: amplification_monotone },
    Check { name: "weak_vector_equivalence", suite: Suite::Vtwisted, anchor: "f×_ν g(x*) = ⟨f×^ν g, x*⟩", run: weak_vector_equivalence },
    Check { name: "density_identity", suite: Suite::Vtwisted, anchor: "d(f×ν) = 𝐟_ν dm", run: density_identity },
    Check { name: "pp_contraction", suite: Suite::Vtwisted, anchor: "‖f×ν‖_{P_p} ≤ ‖f‖_p‖ν‖", run: pp_contraction },
    Check { name: "vector_young", suite: Suite::Vtwisted, anchor: "‖f×ν‖_{P_r} ≤ ‖f‖_q‖ν‖_{p,m}", run: vector_young },
    Check { name: "measure_submultiplicative", suite: Suite::Vtwisted, anchor: "‖μ×ν‖ ≤ ‖μ‖‖ν‖", run: measure_submultiplicative },
    Check { name: "pettis_integral", suite: Suite::Vtwisted, anchor: "⟨∫φ dm, x*⟩ = ∫⟨φ, x*⟩ dm", run: pettis_integral },
    Check { name: "weyl_tconv_identity", suite: Suite::Vtwisted, anchor: "W(f×_ν g(x*)) = W(f)·W^ν(g)(x*)", run: weyl_tconv_identity },
];

/// Largest group order used by the linear-system checks.
const KERNEL_MAX_ORDER: usize = 4;
/// Extra groups for path equivalence, filtered to `|G| ≤ 16`.
const PATH_GROUPS: &[&[usize]] = &[&[8], &[2, 4], &[12], &[16], &[4, 4]];
const PATH_MAX_ORDER: usize = 16;

pub(crate) struct Ctx<'a> {
    cfg: &'a VerifyConfig,
    opt: OptimizerConfig,
}

impl<'a> Ctx<'a> {
    pub(crate) fn new(cfg: &'a VerifyConfig) -> Self {
        Self { cfg, opt: cfg.optimizer() }
    }

    fn stream(&self, name: &str, group: &FiniteAbelianGroup) -> Fixtures {
        Fixtures::stream(self.cfg.seed, &format!("{name}/{group}"))
    }

    fn space(&self, fx: &mut Fixtures, field: Option<Field>) -> Result<NormedSpaceSpec> {
        let dims = self.cfg.dims();
        let fields = self.cfg.fields();
        let lqs = self.cfg.lqs();
        let d = dims[fx.index(dims.len())];
        let f = field.unwrap_or(fields[fx.index(fields.len())]);
        NormedSpaceSpec::new(d, f, lqs[fx.index(lqs.len())])
    }

    /// Runs `trial` `trials` times on every configured group.
    fn per_group(
        &self,
        name: &str,
        trials: usize,
        groups: impl IntoIterator<Item = FiniteAbelianGroup>,
        mut trial: impl FnMut(&mut Fixtures, &FiniteAbelianGroup) -> Result<Outcome>,
    ) -> Result<Vec<Outcome>> {
        let mut out = Vec::new();
        for g in groups {
            let mut fx = self.stream(name, &g);
            for _ in 0..trials {
                out.push(trial(&mut fx, &g)?);
            }
        }
        Ok(out)
    }

    // `total` trials split across groups, earlier groups taking the remainder.
    fn spread(
        &self,
        name: &str,
        total: usize,
        mut trial: impl FnMut(&mut Fixtures, &FiniteAbelianGroup) -> Result<Outcome>,
    ) -> Result<Vec<Outcome>> {
        let groups = self.groups();
        let k = groups.len().max(1);
        let mut out = Vec::new();
        for (i, g) in groups.iter().enumerate() {
            let mut fx = self.stream(name, g);
            let n = total / k + usize::from(i < total % k);
            for _ in 0..n {
                out.push(trial(&mut fx, g)?);
            }
        }
        Ok(out)
    }

    fn groups(&self) -> Vec<FiniteAbelianGroup> {
        self.cfg.groups.clone()
    }

    fn small_groups(&self) -> Vec<FiniteAbelianGroup> {
        self.cfg.groups.iter().filter(|g| g.order() <= KERNEL_MAX_ORDER).cloned().collect()
    }
}

fn pick<T: Copy>(fx: &mut Fixtures, items: &[T]) -> T {
    items[fx.index(items.len())]
}

fn threshold(name: &str, s: &CheckSettings) -> Result<f64> {
    s.threshold.ok_or_else(|| Error::Config(format!("check {name:?} needs a threshold")))
}

fn inequality(m: &InequalityMargin) -> Outcome {
    Outcome::scaled(m.margin, m.scale, m.bracket_width())
}

fn rel(err: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        err / scale
    } else {
        err
    }
}

fn random_subset(fx: &mut Fixtures, n: usize, size: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(fx.rng());
    idx.truncate(size);
    idx
}

fn max_gap(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn max_abs(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

// core

fn character_orthogonality(ctx: &Ctx, _: &str, _: usize, _: &CheckSettings) -> Result<Vec<Outcome>> {
    Ok(ctx
        .groups()
        .iter()
        .map(|g| {
            let n = g.order();
            let worst = (0..n)
                .map(|a| {
                    let s: Complex64 = (0..n).map(|x| g.pairing(a, x)).sum();
                    let expect = if a == 0 { n as f64 } else { 0.0 };
                    (s - expect).norm() / n as f64
                })
                .fold(0.0, f64::max);
            Outcome::deviation(worst)
        })
        .collect())
}

fn rho_projective_law(ctx: &Ctx, _: &str, _: usize, _: &CheckSettings) -> Result<Vec<Outcome>> {
    Ok(ctx
        .groups()
        .iter()
        .map(|g| {
            let n = g.order();
            let rhos: Vec<CMatrix> = (0..n * n).map(|i| rho_matrix(g, i)).collect();
            let mut worst = 0.0f64;
            for i in 0..n * n {
                for j in 0..n * n {
                    let (x, a) = (i / n, i % n);
                    let (x2, a2) = (j / n, j % n);
                    let sum = g.add_idx(x, x2) * n + g.add_idx(a, a2);
                    let rhs = &rhos[sum] * g.pairing(a2, x).conj();
                    let diff = &rhos[i] * &rhos[j] - rhs;
                    worst = worst.max(diff.iter().map(|z| z.norm()).fold(0.0, f64::max));
                }
            }
            Outcome::deviation(worst)
        })
        .collect())
}

fn rho_unitarity(ctx: &Ctx, _: &str, _: usize, _: &CheckSettings) -> Result<Vec<Outcome>> {
    Ok(ctx
        .groups()
        .iter()
        .map(|g| {
            let n = g.order();
            let id = CMatrix::identity(n, n);
            let worst = (0..n * n)
                .map(|i| {
                    let r = rho_matrix(g, i);
                    (r.adjoint() * &r - &id).iter().map(|z| z.norm()).fold(0.0, f64::max)
                })
                .fold(0.0, f64::max);
            Outcome::deviation(worst)
        })
        .collect())
}

fn plancherel(ctx: &Ctx, name: &str, trials: usize, _: &CheckSettings) -> Result<Vec<Outcome>> {
    ctx.per_group(name, trials, ctx.groups(), |fx, g| {
        let f = fx.phase_function(g);
        let l2 = f.norm(Exponent::TWO);
        let s2 = weyl::schatten_norm(&weyl::weyl_transform(&f), 2.0)?;
        Ok(Outcome::deviation(rel((s2 - l2).abs(), l2)))
    })
}

fn weyl_round_trip(ctx: &Ctx, name: &str, trials: usize, _: &CheckSettings) -> Result<Vec<Outcome>> {
    ctx.per_group(name, trials, ctx.groups(), |fx, g| {
        let f = fx.phase_function(g);
        let back = weyl::weyl_inverse(&weyl::weyl_transform(&f));
        let a = fx.matrix(g.order());
        let again = weyl::weyl_transform(&weyl::weyl_inverse_matrix(g, a.clone())?);
        Ok(Outcome::deviation(back.relative_l2_error(&f)?.max(linalg::relative_frobenius(again.matrix(), &a))))
    })
}

fn weyl_fft_agreement(ctx: &Ctx, name: &str, trials: usize, _: &CheckSettings) -> Result<Vec<Outcome>> {
    ctx.per_group(name, trials, ctx.groups(), |fx, g| {
        let f = fx.phase_function(g);
        let direct = weyl::weyl_transform(&f);
        let fast = weyl::weyl_transform_fft(&f);
        let inv = weyl::weyl_inverse_fft(&direct).relative_l2_error(&weyl::weyl_inverse(&direct))?;
        Ok(Outcome::deviation(linalg::relative_frobenius(fast.matrix(), direct.matrix()).max(inv)))
    })
}

fn homomorphism(ctx: &Ctx, name: &str, trials: usize, _: &CheckSettings) -> Result<Vec<Outcome>> {
    ctx.per_group(name, trials, ctx.groups(), |fx, g| {
        let (f, h) = (fx.phase_function(g), fx.phase_function(g));
        let lhs = weyl::weyl_transform(&twisted_convolve(&f, &h, ConvPath::Direct)?);
        let rhs = weyl::weyl_transform(&f).compose(&weyl::weyl_transform(&h))?;
        Ok(Outcome::deviation(linalg::relative_frobenius(lhs.matrix(), rhs.matrix())))
    })
}

fn conv_path_equivalence(ctx: &Ctx, name: &str, trials: usize, _: &CheckSettings) -> Result<Vec<Outcome>> {
    let mut groups: Vec<FiniteAbelianGroup> = ctx.groups();
    for orders in PATH_GROUPS {
        let g = FiniteAbelianGroup::new(orders.to_vec())?;
        if !groups.contains(&g) {
            groups.push(g);
        }
    }
    groups.retain(|g| g.order() <= PATH_MAX_ORDER);
    ctx.per_group(name, trials, groups, |fx, g| {
        let (f, h) = (fx.phase_function(g), fx.phase_function(g));
        let direct = twisted_convolve(&f, &h, ConvPath::Direct)?;
        let mut worst = 0.0f64;
        for path in [ConvPath::WeylFactorized, ConvPath::Fft] {
            worst = worst.max(twisted_convolve(&f, &h, path)?.relative_l2_error(&direct)?);
        }
        Ok(Outcome::deviation(worst))
    })
}

fn hausdorff_young(ctx: &Ctx, name: &str, trials: usize, _: &CheckSettings) -> Result<Vec<Outcome>> {
    let grid = ctx.cfg.tolerances.grids.hausdorff_young.clone();
    ctx.per_group(name, trials, ctx.groups(), |fx, g| {
        let f = fx.phase_function(g);
        let mut worst = f64::INFINITY;
        for &p in &grid {
            let m = weyl::hausdorff_young_margin(&f, p.value())?;
            worst = worst.min(rel(m, f.norm(p)));
        }
        Ok(Outcome::margin(worst))
    })
}

fn young_margins(ctx: &Ctx, name: &str, trials: usize, _: &CheckSettings) -> Result<Vec<Outcome>> {
    let grid = &ctx.cfg.tolerances.grids.young;
    let pairs: Vec<(Exponent, Exponent)> = grid
        .iter()
        .flat_map(|&p| grid.iter().map(move |&q| (p, q)))
        .filter(|(p, q)| p.recip() + q.recip() >= 1.0)
        .collect();
    ctx.per_group(name, trials, ctx.groups(), |fx, g| {
        let (p, q) = pick(fx, &pairs);
        let (f, h) = (fx.phase_function(g), fx.phase_function(g));
        Ok(Outcome::margin(twisted::young_margins(&f, &h, p.value(), q.value())?.worst_relative()))
    })
}

fn noncommutativity_witness(_: &Ctx, name: &str, _: usize, s: &CheckSettings) -> Result<Vec<Outcome>> {
    let g = FiniteAbelianGroup::cyclic(2)?;
    // Shift by 1 and the sign character anticommute.
    let f = PhaseFunction::delta(&g, 2, Complex64::new(1.0, 0.0));
    let h = PhaseFunction::delta(&g, 1, Complex64::new(1.0, 0.0));
    let fg = twisted_convolve(&f, &h, ConvPath::Direct)?;
    let gf = twisted_convolve(&h, &f, ConvPath::Direct)?;
    Ok(vec![Outcome::margin(fg.sub(&gf)?.norm(Exponent::TWO) - threshold(name, s)?)])
}

// vmeasure

fn semivariation_duality(ctx: &Ctx, name: &str, trials: usize, s: &CheckSettings) -> Result<Vec<Outcome>> {
    let limit = threshold(name, s)?;
    let budget = ctx.cfg.tolerances.optimizer.duality_grid_budget;
    ctx.per_group(name, trials, ctx.groups(), |fx, g| {
        let space = ctx.space(fx, Some(Field::Real))?;
        let nu = fx.measure(g, &space);
        let size = g.phase_len().min(10);
        let set = PhaseSet::from_indices(g, random_subset(fx, g.phase_len(), size))?;
        let exact = semivariation(&nu, &set, &ctx.opt)?;
        if !exact.exact {
            return Ok(Outcome::margin(-1.0));
        }
        let grid = semivariation_dual_grid(&nu, &set, budget)?;
        if exact.value == 0.0 {
            return Ok(Outcome::deviation(grid.upper));
        }
        let gap = (exact.value - grid.value) / exact.value;
        let above = (grid.upper - exact.value) / exact.value;
        Ok(Outcome::margin((limit - gap).min(gap).min(above)))
    })
}

fn semivariation_sandwich(ctx: &Ctx, name: &str, trials: usize, _: &CheckSettings) -> Result<Vec<Outcome>> {
    ctx.per_group(name, trials, ctx.groups(), |fx, g| {
        let space = ctx.space(fx, None)?;
        let nu = fx.measure(g, &space);
        let size = 1 + fx.index(g.phase_len());
        let set = PhaseSet::from_indices(g, random_subset(fx, g.phase_len(), size))?;
        let b = semivariation(&nu, &set, &ctx.opt)?;
        let total = lq_norm(&nu.measure_of(&set)?, space.q());
        let sum: f64 = set.indices().iter().map(|&i| lq_norm(nu.atom(i), space.q())).sum();
        Ok(Outcome::scaled((b.value - total).min(sum - b.value), sum, b.width()))
    })
}

fn semivariation_monotone(ctx: &Ctx, name: &str, trials: usize, _: &CheckSettings) -> Result<Vec<Outcome>> {
    ctx.per_group(name, trials, ctx.groups(), |fx, g| {
        let space = ctx.space(fx, None)?;
        let nu = fx.measure(g, &space);
        let n = g.phase_len();
        let size = 1 + fx.index(n);
        let big = random_subset(fx, n, size);
        let small = big[..1 + fx.index(big.len())].to_vec();
        let a = semivariation(&nu, &PhaseSet::from_indices(g, small)?, &ctx.opt)?;
        let b = semivariation(&nu, &PhaseSet::from_indices(g, big)?, &ctx.opt)?;
        Ok(Outcome::scaled(b.value - a.value, b.value, a.width() + b.width()))
    })
}

fn p_semivariation_exact_vs_ascent(ctx: &Ctx, name: &str, trials: usize, _: &CheckSettings) -> Result<Vec<Outcome>> {
    let dims = ctx.cfg.dims();
    let fields = ctx.cfg.fields();
    ctx.per_group(name, trials, ctx.groups(), |fx, g| {
        let space = NormedSpaceSpec::new(pick(fx, &dims), pick(fx, &fields), Exponent::TWO)?;
        let nu = fx.measure(g, &space);
        let exact = p_semivariation(&nu, 2.0, &ctx.opt)?;
        if !exact.exact {
            return Ok(Outcome::margin(-1.0));
        }
        let est = p_semivariation_estimate(&nu, Exponent::TWO, &ctx.opt);
        Ok(Outcome::deviation(rel((exact.value - est).abs(), exact.value)))
    })
}

fn lp_nu_homogeneity(ctx: &Ctx, name: &str, trials: usize, _: &CheckSettings) -> Result<Vec<Outcome>> {
    let mut ps = vec![Exponent::ONE];
    ps.extend(ctx.cfg.tolerances.grids.contain.iter().copied());
    ctx.per_group(name, trials, ctx.groups(), |fx, g| {
        let space = ctx.space(fx, None)?;
        let nu = fx.measure(g, &space);
        let p = pick(fx, &ps).value();
        let f = fx.phase_function(g);
        let c = fx.complex();
        let shrink: Vec<f64> = (0..g.phase_len()).map(|_| fx.uniform()).collect();
        let smaller = PhaseFunction::from_fn(g, |i| f.values()[i] * shrink[i]);
        let a = lp_nu_norm(&f, &nu, p, &ctx.opt)?;
        let b = lp_nu_norm(&f.scale(c), &nu, p, &ctx.opt)?;
        let s = lp_nu_norm(&smaller, &nu, p, &ctx.opt)?;
        let homog = -(b.value - c.norm() * a.value).abs() / c.norm().max(f64::MIN_POSITIVE);
        let width = a.width() + b.width() / c.norm().max(f64::MIN_POSITIVE) + s.width();
        Ok(Outcome::scaled(homog.min(a.value - s.value), a.value, width))
    })
}

fn lp_containment(ctx: &Ctx, name: &str, trials: usize, _: &CheckSettings) -> Result<Vec<Outcome>> {
    let ps = ctx.cfg.tolerances.grids.contain.clone();
    ctx.per_group(name, trials, ctx.groups(), |fx, g| {
        let space = ctx.space(fx, None)?;
        let nu = fx.measure(g, &space);
        let p = pick(fx, &ps);
        let f = fx.phase_function(g);
        let lhs = lp_nu_norm(&f, &nu, 1.0, &ctx.opt)?;
        let lp = lp_nu_norm(&f, &nu, p.value(), &ctx.opt)?;
        let semi = semivariation(&nu, &PhaseSet::all(g), &ctx.opt)?;
        let e = p.conjugate().recip();
        let factor = semi.map(|t| t.powf(e));
        let rhs_value = lp.value * factor.value;
        let rhs_width = lp.upper * factor.upper - lp.lower * factor.lower;
        Ok(Outcome::scaled(rhs_value - lhs.value, rhs_value.max(lhs.value), lhs.width() + rhs_width))
    })
}

fn infinity_semivariation(ctx: &Ctx, name: &str, trials: usize, _: &CheckSettings) -> Result<Vec<Outcome>> {
    let groups: Vec<FiniteAbelianGroup> =
        ctx.groups().into_iter().filter(|g| g.phase_len() <= SUBSET_SEARCH_MAX_POINTS).collect();
    ctx.per_group(name, trials, groups, |fx, g| {
        let space = ctx.space(fx, None)?;
        let nu = fx.measure(g, &space);
        let search = p_semivariation(&nu, f64::INFINITY, &ctx.opt)?.value;
        let formula = nu.atoms().map(|v| lq_norm(v, space.q())).fold(0.0, f64::max) / g.phase_weight();
        Ok(Outcome::deviation(rel((search - formula).abs(), formula)))
    })
}

// vweyl

fn scalarization_coherence(ctx: &Ctx, name: &str, trials: usize, _: &CheckSettings) -> Result<Vec<Outcome>> {
    ctx.per_group(name, trials, ctx.groups(), |fx, g| {
        let space = ctx.space(fx, None)?;
        let nu = fx.measure(g, &space);
        let f = fx.phase_function(g);
        let x = fx.dual_functional(&space);
        let strong = weyl_nu(&f, &nu)?.scalarize(&x)?;
        let weak = weyl_nu_weak(&f, &nu, &x)?;
        Ok(Outcome::deviation(linalg::relative_frobenius(strong.matrix(), weak.matrix())))
    })
}

fn weyl_nu_density(ctx: &Ctx, name: &str, trials: usize, _: &CheckSettings) -> Result<Vec<Outcome>> {
    ctx.per_group(name, trials, ctx.groups(), |fx, g| {
        let space = ctx.space(fx, None)?;
        let nu = fx.measure(g, &space);
        let f = fx.phase_function(g);
        let lhs = weyl_nu(&f, &nu)?;
        let rhs = weyl_of_measure(&nu.weighted(&f)?)?;
        let worst = lhs
            .coord_matrices()
            .iter()
            .zip(rhs.coord_matrices())
            .map(|(a, b)| linalg::relative_frobenius(a, b))
            .fold(0.0, f64::max);
        Ok(Outcome::deviation(worst))
    })
}

fn measure_injectivity(ctx: &Ctx, name: &str, trials: usize, _: &CheckSettings) -> Result<Vec<Outcome>> {
    let mut out: Vec<Outcome> = ctx
        .small_groups()
        .iter()
        .map(|g| Outcome::deviation((g.phase_len() - rho_family_rank(g)) as f64))
        .collect();
    out.extend(ctx.per_group(name, trials, ctx.small_groups(), |fx, g| {
        let space = ctx.space(fx, None)?;
        let nu = fx.measure(g, &space);
        let op = weyl_of_measure(&nu)?;
        let w = g.phase_weight();
        let d = space.dim;
        let mut rec = vec![Complex64::default(); g.phase_len() * d];
        for (j, m) in op.coord_matrices().iter().enumerate() {
            let f = weyl::weyl_inverse_matrix(g, m.clone())?;
            for (i, z) in f.values().iter().enumerate() {
                rec[i * d + j] = z * w;
            }
        }
        let scale = max_abs(nu.flat_atoms());
        Ok(Outcome::deviation(rel(max_gap(&rec, nu.flat_atoms()), scale)))
    })?);
    Ok(out)
}

fn kernel_support(ctx: &Ctx, name: &str, trials: usize, _: &CheckSettings) -> Result<Vec<Outcome>> {
    ctx.per_group(name, trials, ctx.small_groups(), |fx, g| {
        let space = ctx.space(fx, None)?;
        let base = fx.measure(g, &space);
        let n = g.phase_len();
        let null: Vec<bool> = (0..n).map(|_| fx.index(3) == 0).collect();
        let atoms = (0..n)
            .map(|i| if null[i] { vec![Complex64::default(); space.dim] } else { base.atom(i).to_vec() })
            .collect();
        let nu = VectorMeasure::new(g.clone(), space, atoms)?;
        let null: Vec<bool> = nu.atoms().map(|v| v.iter().all(|z| *z == Complex64::default())).collect();
        let zeros = null.iter().filter(|&&z| z).count();

        let kernel = weyl_nu_kernel(&nu);
        let mut defect = kernel.len().abs_diff(zeros) as f64;
        for k in &kernel {
            let leak = (0..n).filter(|&i| !null[i]).map(|i| k.values()[i].norm()).fold(0.0, f64::max);
            defect = defect.max(leak / k.max_abs().max(f64::MIN_POSITIVE));
        }

        let f = fx.phase_function(g);
        let on_null = PhaseFunction::from_fn(g, |i| if null[i] { f.values()[i] } else { Complex64::default() });
        if !kernel_support_test(&nu, &on_null)? {
            defect = defect.max(1.0);
        }
        let one = PhaseFunction::constant(g, Complex64::new(1.0, 0.0));
        if zeros < n && kernel_support_test(&nu, &one)? {
            defect = defect.max(1.0);
        }
        Ok(Outcome::deviation(defect))
    })
}

fn vv_hausdorff_young(ctx: &Ctx, name: &str, trials: usize, _: &CheckSettings) -> Result<Vec<Outcome>> {
    let grids = &ctx.cfg.tolerances.grids;
    ctx.per_group(name, trials, ctx.groups(), |fx, g| {
        let r = pick(fx, &grids.vv_matrix_size);
        let p = pick(fx, &grids.vv_hausdorff_young);
        let f = VectorPhaseFunction::random(fx, g, r);
        let m = vv_hausdorff_young_margin(&f, p.value())?;
        Ok(Outcome::margin(rel(m, f.bochner_norm(p, p.conjugate()))))
    })
}

fn vv_hausdorff_young_p2_equality(ctx: &Ctx, name: &str, trials: usize, _: &CheckSettings) -> Result<Vec<Outcome>> {
    let sizes = ctx.cfg.tolerances.grids.vv_matrix_size.clone();
    ctx.per_group(name, trials, ctx.groups(), |fx, g| {
        let r = pick(fx, &sizes);
        let f = VectorPhaseFunction::random(fx, g, r);
        let m = vv_hausdorff_young_margin(&f, 2.0)?;
        Ok(Outcome::deviation(rel(m.abs(), f.bochner_norm(Exponent::TWO, Exponent::TWO))))
    })
}

fn amplification_monotone(ctx: &Ctx, name: &str, trials: usize, _: &CheckSettings) -> Result<Vec<Outcome>> {
    let grids = &ctx.cfg.tolerances.grids;
    let (levels, samples) = (grids.amplification_levels, grids.amplification_samples);
    let mut fx = Fixtures::stream(ctx.cfg.seed, name);
    let mut out = Vec::new();
    for t in 0..trials {
        let map = match t {
            0 => LinearMap::transpose(2),
            1 => LinearMap::identity(2),
            _ => {
                let (a, b) = (fx.matrix(2), fx.matrix(2));
                LinearMap::from_fn(2, |m| &a * m * &b)?
            }
        };
        let seed = ctx.cfg.seed ^ t as u64;
        let table: Vec<Vec<f64>> = (1..=levels)
            .map(|k| (1..=samples).map(|s| amplification_lower_bound(&map, k, s, seed)).collect())
            .collect();
        let top = table[levels - 1][samples - 1];
        let mut worst = f64::INFINITY;
        for k in 0..levels {
            for s in 0..samples {
                if k + 1 < levels {
                    worst = worst.min(table[k + 1][s] - table[k][s]);
                }
                if s + 1 < samples {
                    worst = worst.min(table[k][s + 1] - table[k][s]);
                }
            }
        }
        out.push(Outcome::margin(rel(worst.min(0.0), top)));
    }
    Ok(out)
}

// vtwisted

fn weak_vector_equivalence(ctx: &Ctx, name: &str, trials: usize, _: &CheckSettings) -> Result<Vec<Outcome>> {
    ctx.per_group(name, trials, ctx.groups(), |fx, g| {
        let space = ctx.space(fx, None)?;
        let nu = fx.measure(g, &space);
        let (f, h) = (fx.phase_function(g), fx.phase_function(g));
        let x = fx.dual_functional(&space);
        let vector = tconv_nu_vector(&f, &h, &nu)?;
        let lhs = vector.scalarize(&x)?;
        let rhs = tconv_nu_weak(&f, &h, &nu, &x)?;
        Ok(Outcome::deviation(max_gap(lhs.values(), rhs.values()) / (1.0 + max_abs(vector.flat_values()))))
    })
}

fn density_identity(ctx: &Ctx, name: &str, trials: usize, _: &CheckSettings) -> Result<Vec<Outcome>> {
    ctx.per_group(name, trials, ctx.groups(), |fx, g| {
        let space = ctx.space(fx, None)?;
        let nu = fx.measure(g, &space);
        let f = fx.phase_function(g);
        let dens = fn_measure_tconv(&f, &nu)?.to_measure();
        let conv = measure_tconv(&ScalarMeasure::from_density(&f), &nu)?;
        let gap = max_gap(dens.flat_atoms(), conv.flat_atoms());
        Ok(Outcome::deviation(gap / (1.0 + max_abs(conv.flat_atoms()))))
    })
}

fn pp_contraction(ctx: &Ctx, name: &str, trials: usize, _: &CheckSettings) -> Result<Vec<Outcome>> {
    let ps = ctx.cfg.tolerances.grids.pp.clone();
    ctx.spread(name, trials, |fx, g| {
        let space = ctx.space(fx, None)?;
        let nu = fx.measure(g, &space);
        let f = fx.phase_function(g);
        let p = pick(fx, &ps);
        Ok(inequality(&pp_contraction_margin(&f, &nu, p.value(), &ctx.opt)?))
    })
}

fn vector_young(ctx: &Ctx, name: &str, trials: usize, _: &CheckSettings) -> Result<Vec<Outcome>> {
    let grid = ctx.cfg.tolerances.grids.vector_young.clone();
    ctx.spread(name, trials, |fx, g| {
        let space = ctx.space(fx, None)?;
        let nu = fx.measure(g, &space);
        let f = fx.phase_function(g);
        let (p, q) = pick(fx, &grid);
        Ok(inequality(&young_vvyi_margin(&f, &nu, p.value(), q.value(), &ctx.opt)?))
    })
}

fn measure_submultiplicative(ctx: &Ctx, name: &str, trials: usize, _: &CheckSettings) -> Result<Vec<Outcome>> {
    ctx.per_group(name, trials, ctx.groups(), |fx, g| {
        let space = ctx.space(fx, None)?;
        let nu = fx.measure(g, &space);
        let mu = ScalarMeasure::new(g.clone(), fx.complex_vec(g.phase_len()))?;
        Ok(inequality(&measure_tconv_margin(&mu, &nu, &ctx.opt)?))
    })
}

fn pettis_integral(ctx: &Ctx, name: &str, trials: usize, _: &CheckSettings) -> Result<Vec<Outcome>> {
    ctx.per_group(name, trials, ctx.groups(), |fx, g| {
        let space = ctx.space(fx, None)?;
        let nu = fx.measure(g, &space);
        let (f, h) = (fx.phase_function(g), fx.phase_function(g));
        let x = fx.dual_functional(&space);
        let field = tconv_nu_vector(&f, &h, &nu)?;
        let scale: f64 = field.values().map(|v| lq_norm(v, space.q())).sum::<f64>() * g.phase_weight();
        Ok(Outcome::deviation(pettis_defect(&field, &x)? / (1.0 + scale)))
    })
}

fn weyl_tconv_identity(ctx: &Ctx, name: &str, trials: usize, _: &CheckSettings) -> Result<Vec<Outcome>> {
    ctx.per_group(name, trials, ctx.groups(), |fx, g| {
        let space = ctx.space(fx, None)?;
        let nu = fx.measure(g, &space);
        let (f, h) = (fx.phase_function(g), fx.phase_function(g));
        let x = fx.dual_functional(&space);
        Ok(Outcome::deviation(weyl_tconv_identity_check(&f, &h, &nu, &x)?))
    })
}
