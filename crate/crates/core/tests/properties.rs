use std::f64::consts::PI;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use shiftapprox::certify::random_class_member;
use shiftapprox::fourier::inner_product;
use shiftapprox::oracle::{brute_force_projection, worst_case_ratio, RatioProblem};
use shiftapprox::splines::{periodize, restrict, Family, KnotParity, SampledFunction, SplineSpaceSpec};
use shiftapprox::{
    basis, Complex, FunctionClassTag, KernelSpec, ShiftSpaceSpec, SpaceVariant, SymmetryClass, Tolerance,
    TruncatedSpectrum,
};

fn kernel_strategy() -> impl Strategy<Value = (KernelSpec, u32)> {
    (1u32..=6, 0u32..=4, any::<bool>()).prop_map(|(n, mu, shifted)| {
        let k = if shifted { KernelSpec::shifted_bspline(n, mu) } else { KernelSpec::bspline(n, mu) };
        (k, n)
    })
}

fn member(class: SymmetryClass, degree: i64, seed: u64) -> TruncatedSpectrum {
    random_class_member(class, degree, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn family_strategy() -> impl Strategy<Value = Family> {
    prop_oneof![Just(Family::Odd), Just(Family::Even), Just(Family::OddHarmonic)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_is_orthogonal((kernel, n) in kernel_strategy(), seed in any::<u64>()) {
        let cutoff = 8 * n as i64;
        let space = ShiftSpaceSpec::new(kernel, n, SpaceVariant::Full).unwrap();
        let b = basis(&space, cutoff).unwrap();
        let f = member(SymmetryClass::Any, cutoff, seed);
        let p = b.project(&f).unwrap();
        let residual = f.sub(&p.approximant);
        let total = f.l2_norm().value.powi(2);
        let split = p.error.powi(2) + p.approximant.l2_norm().value.powi(2);
        prop_assert!((total - split).abs() <= 1e-10 * total);
        for e in &b.elements {
            prop_assert!(inner_product(&residual, &e.spectrum).norm() <= 1e-10 * total.sqrt() * (2.0 * PI * e.d_norm).sqrt());
        }
        let again = b.project(&p.approximant).unwrap();
        prop_assert!(again.error <= 1e-10 * f.l2_norm().value);
        prop_assert!(p.error_lower <= p.error && p.error <= p.error_upper);
    }

    #[test]
    fn brute_force_matches_the_orthogonal_basis((kernel, n) in kernel_strategy(), seed in any::<u64>()) {
        let cutoff = 6 * n as i64;
        let space = ShiftSpaceSpec::new(kernel, n, SpaceVariant::Cross).unwrap();
        let b = basis(&space, cutoff).unwrap();
        let f = member(SymmetryClass::Any, cutoff, seed);
        let p = b.project(&f).unwrap();
        let bf = brute_force_projection(&f, &b.spectra()).unwrap();
        prop_assert!((p.error - bf.error).abs() <= 1e-9 * p.error.max(1e-300));
    }

    #[test]
    fn even_and_odd_parts_recombine(seed in any::<u64>(), degree in 1i64..40) {
        let f = member(SymmetryClass::Any, degree, seed);
        let back = f.even_part().add(&f.odd_part());
        prop_assert!(back.approx_eq(&f, Tolerance::default()));
        prop_assert!(f.reflect().reflect().approx_eq(&f, Tolerance::default()));
        prop_assert!(inner_product(&f.even_part(), &f.odd_part()).norm() <= 1e-12 * f.energy().max(1e-300) * 2.0 * PI);
    }

    #[test]
    fn periodize_inverts_restrict(family in family_strategy(), seed in any::<u64>(), degree in 1i64..12) {
        let u = member(family.class(), degree, seed);
        let intervals = 64;
        let samples = restrict(&u, family, intervals);
        let s = periodize(&samples, family).unwrap();
        let back = restrict(&s, family, intervals);
        for (a, b) in back.values.iter().zip(&samples.values) {
            prop_assert!((a - b).norm() <= 1e-9 * (1.0 + b.norm()));
        }
        prop_assert!(family.class().contains(&s, Tolerance::new(1e-12, 1e-14)));
    }

    #[test]
    fn best_approximant_keeps_the_symmetry(family in family_strategy(), n in 1u32..=4, d in 0u32..=4, half in any::<bool>(), seed in any::<u64>()) {
        let parity = if half { KnotParity::Half } else { KnotParity::Integer };
        let spec = SplineSpaceSpec::new(d, family, n, parity).unwrap();
        let cutoff = 16 * family.space_n(n) as i64;
        let u = member(family.class(), cutoff / 2, seed);
        let p = basis(&spec.space().unwrap(), cutoff).unwrap().project(&u).unwrap();
        prop_assert!(family.class().contains(&p.approximant, Tolerance::new(1e-10, 1e-14)));
    }

    #[test]
    fn segment_error_is_the_scaled_periodic_error(family in family_strategy(), n in 1u32..=4, d in 1u32..=3, seed in any::<u64>()) {
        let spec = SplineSpaceSpec::new(d, family, n, KnotParity::Integer).unwrap();
        let cutoff = 8 * family.space_n(n) as i64;
        let u = member(family.class(), cutoff, seed);
        let p = basis(&spec.space().unwrap(), cutoff).unwrap().project(&u).unwrap();
        let residual = u.sub(&p.approximant);
        // Midpoint rule on the segment is exact for |residual|^2 once the grid exceeds the degree.
        let points = 4 * cutoff as usize;
        let h = family.segment() / points as f64;
        let energy: f64 = (0..points).map(|j| residual.evaluate((j as f64 + 0.5) * h).value.norm_sqr()).sum::<f64>() * h;
        let segment = energy.sqrt();
        prop_assert!((segment * family.transference_factor() - p.error).abs() <= 1e-9 * p.error.max(1e-300));
    }

    #[test]
    fn sampled_functions_survive_csv(seed in any::<u64>()) {
        let u = member(SymmetryClass::H0, 5, seed);
        let s = restrict(&u, Family::Odd, 16);
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let back = SampledFunction::read_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(back.values, s.values);
    }
}

#[test]
fn ratio_grows_with_the_truncation() {
    for (n, mu, r) in [(3u32, 2u32, 1u32), (4, 1, 2), (2, 3, 2)] {
        let space = ShiftSpaceSpec::new(KernelSpec::bspline(n, mu), n, SpaceVariant::Sym0(n - 1)).unwrap();
        let tag = FunctionClassTag::new(SymmetryClass::H0, r).unwrap();
        let mut last = 0.0;
        for k in [4, 8, 16, 32, 64] {
            let rep = worst_case_ratio(&RatioProblem::new(space.clone(), tag, k * n as i64, false)).unwrap();
            assert!(rep.ratio >= last * (1.0 - 1e-12), "n={n} K={}: {} < {last}", k * n as i64, rep.ratio);
            last = rep.ratio;
        }
    }
}

#[test]
fn weighted_generators_keep_the_bound() {
    use shiftapprox::WeightSeq;
    for weight in [
        WeightSeq::Poisson { alpha: 0.2 },
        WeightSeq::Heat { alpha: 0.01 },
        WeightSeq::DiffOperator { roots: vec![1.0, -2.0] },
        WeightSeq::GeneralizedBernoulli { s: 1.0, beta: 0.3 },
    ] {
        let n = 4;
        let kernel = KernelSpec::weighted(n, 2, weight).unwrap();
        let space = ShiftSpaceSpec::new(kernel, n, SpaceVariant::Sym0(n - 1)).unwrap();
        let tag = FunctionClassTag::new(SymmetryClass::H0, 2).unwrap();
        let rep = worst_case_ratio(&RatioProblem::new(space, tag, 32 * n as i64, false)).unwrap();
        let bound = (n as f64).powi(-4);
        assert!(rep.ratio <= bound * (1.0 + 1e-8), "{}", rep.ratio);
        assert!(rep.ratio >= bound * (1.0 - 1e-6), "{}", rep.ratio);
    }
}

#[test]
fn boundary_violation_on_bad_samples() {
    let u = SampledFunction::from_fn(PI / 2.0, 8, |x| Complex::new(x.cos(), 0.0));
    assert!(matches!(periodize(&u, Family::OddHarmonic), Err(shiftapprox::Error::BoundaryViolation(_))));
}
