//! Empirical verification of the Jackson-type inequalities on sample functions.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{Complex, SymmetryClass, Tolerance, TruncatedSpectrum};
use crate::kernels::KernelSpec;
use crate::shift_space::{basis, basis_element, BasisKind, ShiftSpaceSpec, SpaceVariant};

use super::Theorem;

/// Relative gap allowed between the two sides at a sharpness witness.
pub const WITNESS_TOLERANCE: f64 = 1e-10;

/// Class, bound denominator and sharpness frequency attached to a symmetric space.
fn space_profile(variant: SpaceVariant) -> Option<(SymmetryClass, u32)> {
    match variant {
        SpaceVariant::Sym0(m) => Some((SymmetryClass::H0, m + 1)),
        SpaceVariant::Sym1(m) => Some((SymmetryClass::H1, m)),
        SpaceVariant::Sym2(m) => Some((SymmetryClass::H2, 2 * m + 1)),
        SpaceVariant::Sym2Even(m) => Some((SymmetryClass::H2Even, 2 * m + 1)),
        SpaceVariant::CrossM(m) => Some((SymmetryClass::Any, m)),
        _ => None,
    }
}

/// The function turning the inequality for `variant` into an equality.
pub fn witness(variant: SpaceVariant, cutoff: i64) -> Result<TruncatedSpectrum> {
    let (class, k) = space_profile(variant)
        .ok_or_else(|| Error::InvalidParameter(format!("no Jackson inequality is attached to {variant}")))?;
    let k = k as i64;
    match class {
        SymmetryClass::H0 | SymmetryClass::H2 => TruncatedSpectrum::sine(cutoff, k),
        SymmetryClass::H1 | SymmetryClass::H2Even => TruncatedSpectrum::cosine(cutoff, k),
        SymmetryClass::Any => TruncatedSpectrum::exponential(cutoff, k, Complex::ONE),
    }
}

/// Random trigonometric polynomial of the given degree with the class symmetry imposed exactly.
pub fn random_class_member<R: Rng + ?Sized>(class: SymmetryClass, degree: i64, rng: &mut R) -> TruncatedSpectrum {
    let mut draw = || Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let mut coeffs = Vec::new();
    if matches!(class, SymmetryClass::H1 | SymmetryClass::Any) {
        coeffs.push((0, draw()));
    }
    for k in 1..=degree {
        if !class.admits(k) {
            continue;
        }
        let c = draw();
        match class.reflection_sign() {
            Some(s) => {
                coeffs.push((k, c));
                coeffs.push((-k, c * s));
            }
            None => {
                coeffs.push((k, c));
                coeffs.push((-k, draw()));
            }
        }
    }
    TruncatedSpectrum::from_coeffs(degree.max(1), coeffs).expect("frequencies within the degree")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacksonSample {
    pub index: usize,
    /// Distance to the truncated space, a lower bound on the true distance.
    pub error: f64,
    pub error_upper: f64,
    /// `bound * ||u^(r)||`.
    pub rhs: f64,
    pub violated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacksonReport {
    pub space: String,
    pub r: u32,
    pub bound: f64,
    pub samples: Vec<JacksonSample>,
    pub witness: JacksonSample,
    /// `|error - rhs| / rhs` at the witness.
    pub witness_gap: f64,
    pub violations: usize,
    pub passed: bool,
}

fn check_membership(samples: &[TruncatedSpectrum], class: SymmetryClass) -> Result<()> {
    let tol = Tolerance::new(1e-12, 1e-14);
    for (index, u) in samples.iter().enumerate() {
        if !class.contains(u, tol) {
            return Err(Error::SampleOutsideClass { index, class: class.name().to_string() });
        }
    }
    Ok(())
}

fn rounding_allowance(rhs: f64) -> f64 {
    1e-12 * rhs + 1e-14
}

/// Checks `E(u, space) <= bound ||u^(r)||` on every sample and equality at the sharpness witness.
pub fn verify_jackson(
    space: &ShiftSpaceSpec,
    r: u32,
    class: SymmetryClass,
    samples: &[TruncatedSpectrum],
    cutoff: i64,
) -> Result<JacksonReport> {
    let (expected_class, denominator) = space_profile(space.variant)
        .ok_or_else(|| Error::InvalidParameter(format!("no Jackson inequality is attached to {}", space.variant)))?;
    if class != expected_class {
        return Err(Error::InvalidParameter(format!(
            "space {} is paired with class {}, not {}",
            space.variant,
            expected_class.name(),
            class.name()
        )));
    }
    check_membership(samples, class)?;
    let bound = (denominator as f64).powi(-(r as i32));
    let b = basis(space, cutoff)?;
    let evaluate = |index: usize, u: &TruncatedSpectrum| -> Result<JacksonSample> {
        let p = b.project(u)?;
        let rhs = bound * u.derivative(r)?.l2_norm().value;
        Ok(JacksonSample {
            index,
            error: p.error,
            error_upper: p.error_upper,
            rhs,
            violated: p.error > rhs + rounding_allowance(rhs),
        })
    };
    let results = samples.iter().enumerate().map(|(i, u)| evaluate(i, u)).collect::<Result<Vec<_>>>()?;
    let w = witness(space.variant, cutoff)?;
    let witness = evaluate(samples.len(), &w)?;
    let witness_gap = (witness.error - witness.rhs).abs() / witness.rhs;
    let violations = results.iter().filter(|s| s.violated).count();
    Ok(JacksonReport {
        space: format!("{} over {} (n = {})", space.variant, space.kernel, space.n),
        r,
        bound,
        samples: results,
        witness,
        witness_gap,
        violations,
        passed: violations == 0 && witness_gap <= WITNESS_TOLERANCE,
    })
}

/// Space of the differentiated generator in the refined bounds, by theorem and parity of `r`.
pub fn derived_space(theorem: Theorem, m: u32, r: u32) -> Result<SpaceVariant> {
    let even = r.is_multiple_of(2);
    match theorem {
        Theorem::Odd => Ok(if even { SpaceVariant::Sym0(m) } else { SpaceVariant::EvenParts(m) }),
        Theorem::Even => Ok(if even { SpaceVariant::EvenParts(m - 1) } else { SpaceVariant::Sym0(m - 1) }),
        Theorem::OddHarmonic => Ok(if even { SpaceVariant::Sym2(m) } else { SpaceVariant::Sym2Even(m) }),
        other => Err(Error::InvalidParameter(format!("no refined bound is attached to {other}"))),
    }
}

fn primary_space(theorem: Theorem, m: u32) -> Result<SpaceVariant> {
    match theorem {
        Theorem::Odd => Ok(SpaceVariant::Sym0(m)),
        Theorem::Even => Ok(SpaceVariant::Sym1(m)),
        Theorem::OddHarmonic => Ok(SpaceVariant::Sym2(m)),
        other => Err(Error::InvalidParameter(format!("no refined bound is attached to {other}"))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorollarySample {
    pub index: usize,
    /// `E(u, space)`.
    pub error: f64,
    /// `bound * E(u^(r), derived space)`, upper end of its certificate.
    pub refined: f64,
    /// `bound * ||u^(r)||`.
    pub unrefined: f64,
    pub violated: bool,
    /// Whether the refined right side exceeds the unrefined one.
    pub refinement_worse: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorollaryReport {
    pub theorem: Theorem,
    pub r: u32,
    pub derived: SpaceVariant,
    /// Largest coefficientwise mismatch in the derivative identity for the basis functions, relative.
    pub identity_defect: f64,
    pub samples: Vec<CorollarySample>,
    pub witness: CorollarySample,
    pub witness_gap: f64,
    pub violations: usize,
    pub passed: bool,
}

/// Refined bounds with the derivative measured against the derived space of `B^(r)`.
pub fn verify_corollaries_234(
    kernel: &KernelSpec,
    n: u32,
    m: u32,
    r: u32,
    cutoff: i64,
    theorem: Theorem,
    samples: &[TruncatedSpectrum],
) -> Result<CorollaryReport> {
    let derived_kernel = kernel.derivative(r)?;
    let space = ShiftSpaceSpec::new(kernel.clone(), n, primary_space(theorem, m)?)?;
    let derived_variant = derived_space(theorem, m, r)?;
    let derived = ShiftSpaceSpec::new(derived_kernel.clone(), n, derived_variant)?;
    let (class, denominator) = space_profile(space.variant).expect("symmetric space");
    check_membership(samples, class)?;
    let bound = (denominator as f64).powi(-(r as i32));

    let mut identity_defect: f64 = 0.0;
    for label in space.labels() {
        let e = basis_element(kernel, n, label, cutoff)?;
        let mut target = label;
        if r % 2 == 1 {
            target.kind = match label.kind {
                BasisKind::PhiEven => BasisKind::PhiOdd,
                BasisKind::PhiOdd => BasisKind::PhiEven,
                BasisKind::Phi => BasisKind::Phi,
            };
        }
        let lhs = e.spectrum.derivative(r)?;
        let rhs = basis_element(&derived_kernel, n, target, cutoff)?.spectrum;
        let scale = lhs.max_abs().max(rhs.max_abs());
        if scale > 0.0 {
            identity_defect = identity_defect.max(lhs.max_abs_diff(&rhs) / scale);
        }
    }

    let primary = basis(&space, cutoff)?;
    let secondary = basis(&derived, cutoff)?;
    let evaluate = |index: usize, u: &TruncatedSpectrum| -> Result<CorollarySample> {
        let e = primary.project(u)?;
        let du = u.derivative(r)?;
        let d = secondary.project(&du)?;
        let refined = bound * d.error_upper;
        let unrefined = bound * du.l2_norm().value;
        Ok(CorollarySample {
            index,
            error: e.error,
            refined,
            unrefined,
            violated: e.error > refined + rounding_allowance(refined),
            refinement_worse: bound * d.error > unrefined + rounding_allowance(unrefined),
        })
    };
    let results = samples.iter().enumerate().map(|(i, u)| evaluate(i, u)).collect::<Result<Vec<_>>>()?;
    let w = witness(space.variant, cutoff)?;
    let witness = evaluate(samples.len(), &w)?;
    let witness_gap = (witness.error - witness.refined).abs() / witness.refined;
    let violations = results.iter().filter(|s| s.violated || s.refinement_worse).count();
    Ok(CorollaryReport {
        theorem,
        r,
        derived: derived_variant,
        identity_defect,
        samples: results,
        witness,
        witness_gap,
        violations,
        passed: violations == 0 && identity_defect <= 1e-12 && witness_gap <= WITNESS_TOLERANCE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn witnesses_attain_the_bound() {
        for (variant, n) in [(SpaceVariant::Sym0(3), 4u32), (SpaceVariant::Sym1(4), 4), (SpaceVariant::Sym2(2), 5)] {
            let space = ShiftSpaceSpec::new(KernelSpec::bspline(n, 2), n, variant).unwrap();
            let class = space_profile(variant).unwrap().0;
            let report = verify_jackson(&space, 2, class, &[], 256).unwrap();
            assert!(report.witness_gap < 1e-12, "{variant}: {}", report.witness_gap);
            assert!(report.passed);
        }
    }

    #[test]
    fn random_samples_respect_the_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let space = ShiftSpaceSpec::new(KernelSpec::bspline(6, 2), 6, SpaceVariant::Sym0(5)).unwrap();
        let samples: Vec<_> = (0..20).map(|_| random_class_member(SymmetryClass::H0, 30, &mut rng)).collect();
        let report = verify_jackson(&space, 2, SymmetryClass::H0, &samples, 512).unwrap();
        assert_eq!(report.violations, 0);
        assert!(report.samples.iter().all(|s| s.error <= s.rhs));
    }

    #[test]
    fn membership_is_enforced() {
        let space = ShiftSpaceSpec::new(KernelSpec::bspline(4, 1), 4, SpaceVariant::Sym0(3)).unwrap();
        let even = TruncatedSpectrum::cosine(64, 2).unwrap();
        let err = verify_jackson(&space, 1, SymmetryClass::H0, &[even], 64).unwrap_err();
        assert!(matches!(err, Error::SampleOutsideClass { index: 0, .. }));
    }

    #[test]
    fn random_members_have_the_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for class in [SymmetryClass::H0, SymmetryClass::H1, SymmetryClass::H2, SymmetryClass::H2Even] {
            let u = random_class_member(class, 9, &mut rng);
            assert!(class.contains(&u, Tolerance::default()));
            assert!(u.evaluate(0.0).value.norm() < 1e-14 || class.reflection_sign() == Some(1.0));
        }
    }

    #[test]
    fn corollary_identity_and_refinement() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let samples: Vec<_> = (0..10).map(|_| random_class_member(SymmetryClass::H0, 25, &mut rng)).collect();
        for r in [1u32, 2] {
            let report = verify_corollaries_234(&KernelSpec::bspline(4, 3), 4, 3, r, 256, Theorem::Odd, &samples).unwrap();
            assert!(report.identity_defect < 1e-13, "{}", report.identity_defect);
            assert!(report.passed, "{report:?}");
        }
    }

    #[test]
    fn corollary_requires_decay() {
        let err = verify_corollaries_234(&KernelSpec::bspline(4, 1), 4, 3, 2, 256, Theorem::Odd, &[]).unwrap_err();
        assert!(matches!(err, Error::InsufficientDecay { .. }));
    }
}
