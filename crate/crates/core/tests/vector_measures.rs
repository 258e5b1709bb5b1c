use proptest::prelude::*;
use weylvm::linalg::relative_frobenius;
use weylvm::measure::{
    lp_nu_norm, lq_norm, scalar_total_variation, semivariation, Field, NormedSpaceSpec, OptimizerConfig, PhaseSet,
    VectorMeasure,
};
use weylvm::random::Fixtures;
use weylvm::vector_twisted::{
    fn_measure_tconv, measure_tconv, measure_tconv_margin, pettis_defect, pp_contraction_margin, tconv_nu_vector,
    tconv_nu_weak, young_vvyi_margin, ScalarMeasure,
};
use weylvm::vector_weyl::{weyl_nu, weyl_nu_weak, weyl_of_measure};
use weylvm::{Complex64, Exponent, FiniteAbelianGroup};

fn cfg() -> OptimizerConfig {
    OptimizerConfig { starts: 8, grid_budget: 5_000, ..OptimizerConfig::default() }
}

fn group() -> impl Strategy<Value = FiniteAbelianGroup> {
    prop::sample::select(vec![vec![2], vec![3], vec![4], vec![2, 2]]).prop_map(|o| FiniteAbelianGroup::new(o).unwrap())
}

fn space() -> impl Strategy<Value = NormedSpaceSpec> {
    let q = prop::sample::select(vec![Exponent::ONE, Exponent::Finite(1.5), Exponent::TWO, Exponent::Finite(3.0), Exponent::Infinite]);
    (1usize..=3, any::<bool>(), q).prop_map(|(d, real, q)| {
        NormedSpaceSpec::new(d, if real { Field::Real } else { Field::Complex }, q).unwrap()
    })
}

fn max_gap(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn semivariation_is_sandwiched(g in group(), s in space(), seed in any::<u64>()) {
        let mut fx = Fixtures::new(seed);
        let nu = fx.measure(&g, &s);
        let k = 1 + fx.index(g.phase_len());
        let set = PhaseSet::from_indices(&g, (0..g.phase_len()).filter(|i| i % k == 0)).unwrap();
        let b = semivariation(&nu, &set, &cfg()).unwrap();
        let whole = lq_norm(&nu.measure_of(&set).unwrap(), s.q());
        let sum: f64 = set.indices().iter().map(|&i| lq_norm(nu.atom(i), s.q())).sum();
        let tol = 1e-10 * (1.0 + sum);
        prop_assert!(b.lower <= b.upper);
        prop_assert!(whole <= b.upper + tol && b.lower <= sum + tol);
        let x = fx.dual_functional(&s).normalized(&s);
        prop_assert!(scalar_total_variation(&nu, &x, &set).unwrap() <= b.upper + tol);
    }

    #[test]
    fn semivariation_is_monotone(g in group(), s in space(), seed in any::<u64>()) {
        let mut fx = Fixtures::new(seed);
        let nu = fx.measure(&g, &s);
        let small = PhaseSet::from_indices(&g, 0..g.phase_len() / 2).unwrap();
        let big = PhaseSet::all(&g);
        let (a, b) = (semivariation(&nu, &small, &cfg()).unwrap(), semivariation(&nu, &big, &cfg()).unwrap());
        prop_assert!(a.lower <= b.upper * (1.0 + 1e-10));
    }

    #[test]
    fn lp_nu_norm_is_homogeneous(g in group(), s in space(), seed in any::<u64>(), c in 0.1f64..10.0) {
        let mut fx = Fixtures::new(seed);
        let nu = fx.measure(&g, &s);
        let f = fx.phase_function(&g);
        let p = 2.0;
        let a = lp_nu_norm(&f, &nu, p, &cfg()).unwrap();
        let b = lp_nu_norm(&f.scale(Complex64::new(0.0, c)), &nu, p, &cfg()).unwrap();
        let tol = 1e-10 * c * a.upper;
        prop_assert!(b.lower <= c * a.upper + tol && c * a.lower <= b.upper + tol);
    }

    #[test]
    fn weyl_nu_scalarizes(g in group(), s in space(), seed in any::<u64>()) {
        let mut fx = Fixtures::new(seed);
        let nu = fx.measure(&g, &s);
        let f = fx.phase_function(&g);
        let x = fx.dual_functional(&s);
        let strong = weyl_nu(&f, &nu).unwrap().scalarize(&x).unwrap();
        let weak = weyl_nu_weak(&f, &nu, &x).unwrap();
        prop_assert!(relative_frobenius(strong.matrix(), weak.matrix()) < 1e-10);
        let dens = weyl_of_measure(&nu.weighted(&f).unwrap()).unwrap();
        for (a, b) in weyl_nu(&f, &nu).unwrap().coord_matrices().iter().zip(dens.coord_matrices()) {
            prop_assert!(relative_frobenius(a, b) < 1e-10);
        }
    }

    #[test]
    fn weyl_of_nonzero_measure_is_nonzero(g in group(), s in space(), seed in any::<u64>()) {
        let mut fx = Fixtures::new(seed);
        let i = fx.index(g.phase_len());
        let v = if s.is_real() { fx.real_vec(s.dim) } else { fx.complex_vec(s.dim) };
        let nu = VectorMeasure::point_mass(&g, s, i, &v).unwrap();
        prop_assume!(!nu.is_zero());
        prop_assert!(weyl_of_measure(&nu).unwrap().max_abs() > 0.0);
    }

    #[test]
    fn vector_convolutions_agree(g in group(), s in space(), seed in any::<u64>()) {
        let mut fx = Fixtures::new(seed);
        let nu = fx.measure(&g, &s);
        let (f, h) = (fx.phase_function(&g), fx.phase_function(&g));
        let x = fx.dual_functional(&s);
        let vector = tconv_nu_vector(&f, &h, &nu).unwrap();
        let weak = tconv_nu_weak(&f, &h, &nu, &x).unwrap();
        let scale = 1.0 + vector.max_norm() * x.coords().iter().map(|z| z.norm()).sum::<f64>();
        prop_assert!(max_gap(vector.scalarize(&x).unwrap().values(), weak.values()) < 1e-10 * scale);
        prop_assert!(pettis_defect(&vector, &x).unwrap() < 1e-10 * scale);

        let dens = fn_measure_tconv(&f, &nu).unwrap().to_measure();
        let conv = measure_tconv(&ScalarMeasure::from_density(&f), &nu).unwrap();
        let big = conv.flat_atoms().iter().map(|z| z.norm()).fold(1.0, f64::max);
        prop_assert!(max_gap(dens.flat_atoms(), conv.flat_atoms()) < 1e-10 * big);
    }

    #[test]
    fn pp_contraction_holds(g in group(), s in space(), seed in any::<u64>(), pi in 0usize..4) {
        let mut fx = Fixtures::new(seed);
        let nu = fx.measure(&g, &s);
        let f = fx.phase_function(&g);
        let p = [1.0, 4.0 / 3.0, 2.0, f64::INFINITY][pi];
        let m = pp_contraction_margin(&f, &nu, p, &cfg()).unwrap();
        prop_assert!(m.holds(1e-10), "{m:?}");
    }

    #[test]
    fn vector_young_holds(g in group(), s in space(), seed in any::<u64>(), k in 0usize..4) {
        let mut fx = Fixtures::new(seed);
        let nu = fx.measure(&g, &s);
        let f = fx.phase_function(&g);
        let (p, q) = [(4.0 / 3.0, 1.0), (2.0, 1.0), (2.0, 1.5), (3.0, 1.25)][k];
        let m = young_vvyi_margin(&f, &nu, p, q, &cfg()).unwrap();
        prop_assert!(m.holds(1e-10), "{m:?}");
    }

    #[test]
    fn measure_convolution_is_submultiplicative(g in group(), s in space(), seed in any::<u64>()) {
        let mut fx = Fixtures::new(seed);
        let nu = fx.measure(&g, &s);
        let mu = ScalarMeasure::new(g.clone(), fx.complex_vec(g.phase_len())).unwrap();
        let m = measure_tconv_margin(&mu, &nu, &cfg()).unwrap();
        prop_assert!(m.holds(1e-10), "{m:?}");
    }
}

#[test]
fn point_mass_semivariation_is_the_atom_norm() {
    let g = FiniteAbelianGroup::cyclic(3).unwrap();
    let s = NormedSpaceSpec::new(3, Field::Complex, Exponent::Finite(1.5)).unwrap();
    let v = vec![Complex64::new(1.0, -2.0), Complex64::new(0.5, 0.0), Complex64::new(0.0, 3.0)];
    let nu = VectorMeasure::point_mass(&g, s, 4, &v).unwrap();
    let b = semivariation(&nu, &PhaseSet::all(&g), &cfg()).unwrap();
    let want = lq_norm(&v, s.q());
    assert!((b.value - want).abs() < 1e-12 * want, "{b:?}");
    assert!(b.upper >= want * (1.0 - 1e-12));
}

#[test]
fn vector_young_rejects_the_dual_endpoint() {
    let g = FiniteAbelianGroup::cyclic(2).unwrap();
    let mut fx = Fixtures::new(1);
    let s = NormedSpaceSpec::real_l2(2);
    let nu = fx.measure(&g, &s);
    let f = fx.phase_function(&g);
    assert!(young_vvyi_margin(&f, &nu, 2.0, 2.0, &cfg()).is_err());
    assert!(young_vvyi_margin(&f, &nu, 1.0, 1.0, &cfg()).is_err());
}
