//! Independent numerical oracles: worst-case error ratios, ellipsoid widths and
//! least-squares projection through the full Gram matrix.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{inner_product, Complex, Frequency, FunctionClassTag, SymmetryClass, TruncatedSpectrum};
use crate::kernels::KernelSpec;
use crate::shift_space::{basis, ShiftSpaceSpec, SpaceVariant};

/// Components up to this size are solved with a dense Hermitian eigensolver.
pub const DENSE_LIMIT: usize = 64;
pub const POWER_SEED: u64 = 0x5EED;
pub const POWER_RESTARTS: usize = 3;
pub const POWER_TOLERANCE: f64 = 1e-8;
pub const POWER_MAX_ITERATIONS: usize = 200_000;
pub const GRAM_CONDITION_LIMIT: f64 = 1e12;

#[derive(Debug, Clone)]
pub struct RatioProblem {
    pub space: ShiftSpaceSpec,
    pub r: u32,
    pub class: FunctionClassTag,
    pub cutoff: i64,
    /// Restrict to zero-mean functions without requiring the space to contain constants.
    pub zero_mean_constraint: bool,
}

impl RatioProblem {
    pub fn new(space: ShiftSpaceSpec, class: FunctionClassTag, cutoff: i64, zero_mean_constraint: bool) -> Self {
        RatioProblem { space, r: class.r, class, cutoff, zero_mean_constraint }
    }

    fn validate(&self) -> Result<()> {
        if self.r == 0 || self.r != self.class.r {
            return Err(Error::InvalidParameter(format!(
                "smoothness order {} does not match the class order {}",
                self.r, self.class.r
            )));
        }
        let required = 4 * self.space.n as i64;
        if self.cutoff < required {
            return Err(Error::TruncationTooSmall { cutoff: self.cutoff, required });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    /// Supremum over the truncated problem; a lower bound on the true supremum.
    pub ratio: f64,
    /// Bound on how much the true supremum can exceed `ratio`.
    pub truncation_gap: f64,
    pub components: usize,
    pub largest_component: usize,
}

impl RatioReport {
    pub fn upper(&self) -> f64 {
        self.ratio + self.truncation_gap
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, i: usize) -> usize {
        let mut root = i;
        while self.0[root] != root {
            root = self.0[root];
        }
        let mut j = i;
        while self.0[j] != root {
            let next = self.0[j];
            self.0[j] = root;
            j = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// One decoupled block of the operator `D Q (I - P) Q D` with `D = diag |k|^{-r}`.
struct Component {
    freqs: Vec<Frequency>,
    scale: Vec<f64>,
    /// Orthonormal vectors spanning the space, restricted to `freqs`.
    projector: Vec<Vec<Complex>>,
    /// Index of `-k` for the reflection symmetry, with its sign.
    mirror: Option<(Vec<usize>, f64)>,
}

impl Component {
    fn len(&self) -> usize {
        self.freqs.len()
    }

    fn symmetrize(&self, v: &mut [Complex]) {
        if let Some((mirror, sign)) = &self.mirror {
            let old = v.to_vec();
            for (i, &j) in mirror.iter().enumerate() {
                v[i] = (old[i] + old[j] * *sign) * 0.5;
            }
        }
    }

    fn apply(&self, x: &[Complex]) -> Vec<Complex> {
        let mut v = x.to_vec();
        self.symmetrize(&mut v);
        for (vi, s) in v.iter_mut().zip(&self.scale) {
            *vi *= *s;
        }
        let mut out = v.clone();
        for q in &self.projector {
            let a: Complex = q.iter().zip(&v).map(|(qi, vi)| qi.conj() * vi).sum();
            for (o, qi) in out.iter_mut().zip(q) {
                *o -= qi * a;
            }
        }
        for (o, s) in out.iter_mut().zip(&self.scale) {
            *o *= *s;
        }
        self.symmetrize(&mut out);
        out
    }

    fn dense(&self) -> DMatrix<Complex> {
        let n = self.len();
        let mut m = DMatrix::zeros(n, n);
        let mut e = vec![Complex::ZERO; n];
        for j in 0..n {
            e[j] = Complex::ONE;
            let col = self.apply(&e);
            e[j] = Complex::ZERO;
            for i in 0..n {
                m[(i, j)] = col[i];
            }
        }
        // Symmetrize away rounding so the Hermitian solver sees an exactly Hermitian matrix.
        let adjoint = m.adjoint();
        (m + adjoint) * Complex::new(0.5, 0.0)
    }
}

fn largest_dense(c: &Component) -> f64 {
    let eig = c.dense().symmetric_eigen();
    eig.eigenvalues.iter().copied().fold(0.0, f64::max)
}

/// Largest eigenvalue of a positive semidefinite operator by restarted power iteration.
pub(crate) fn power_iteration<F>(apply: F, dim: usize) -> Result<f64>
where
    F: Fn(&[Complex]) -> Vec<Complex>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(POWER_SEED);
    let norm = |v: &[Complex]| v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let mut best: f64 = 0.0;
    for _ in 0..POWER_RESTARTS {
        let mut v: Vec<Complex> =
            (0..dim).map(|_| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let mut nv = norm(&v);
        v.iter_mut().for_each(|c| *c /= nv);
        let mut lambda = 0.0;
        let mut converged = false;
        for _ in 0..POWER_MAX_ITERATIONS {
            let w = apply(&v);
            let rayleigh: f64 = v.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum();
            nv = norm(&w);
            if nv == 0.0 {
                lambda = 0.0;
                converged = true;
                break;
            }
            let residual: f64 =
                w.iter().zip(&v).map(|(b, a)| (b - a * rayleigh).norm_sqr()).sum::<f64>().sqrt();
            v = w.into_iter().map(|c| c / nv).collect();
            let settled = (rayleigh - lambda).abs() <= POWER_TOLERANCE * 1e-4 * rayleigh.abs();
            lambda = rayleigh;
            if residual <= POWER_TOLERANCE * rayleigh.abs() || settled {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NonConvergence { iterations: POWER_MAX_ITERATIONS });
        }
        best = best.max(lambda);
    }
    Ok(best)
}

fn components(p: &RatioProblem) -> Result<(Vec<Component>, f64)> {
    let class = p.class.variant;
    let basis = basis(&p.space, p.cutoff)?;
    let freqs: Vec<Frequency> = (-p.cutoff..=p.cutoff).filter(|&k| k != 0 && class.admits(k)).collect();
    let index: BTreeMap<Frequency, usize> = freqs.iter().enumerate().map(|(i, &k)| (k, i)).collect();
    let mut uf = UnionFind((0..freqs.len()).collect());
    if class.reflection_sign().is_some() {
        for (&k, &i) in &index {
            uf.union(i, index[&-k]);
        }
    }
    let mut tau: f64 = 0.0;
    let mut owner: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (e_idx, e) in basis.elements.iter().enumerate() {
        tau = tau.max(e.d_tail / e.d_norm);
        let support: Vec<usize> = e.spectrum.iter().filter_map(|(k, _)| index.get(&k).copied()).collect();
        for w in support.windows(2) {
            uf.union(w[0], w[1]);
        }
        if let Some(&first) = support.first() {
            owner.entry(first).or_default().push(e_idx);
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..freqs.len() {
        let root = uf.find(i);
        groups.entry(root).or_default().push(i);
    }
    let mut element_groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (first, elems) in owner {
        element_groups.entry(uf.find(first)).or_default().extend(elems);
    }

    let mut out = Vec::with_capacity(groups.len());
    for (root, members) in groups {
        let comp_freqs: Vec<Frequency> = members.iter().map(|&i| freqs[i]).collect();
        let local: BTreeMap<Frequency, usize> = comp_freqs.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        // Orthonormalize the full elements, then restrict to the component.
        let mut ortho: Vec<TruncatedSpectrum> = Vec::new();
        for &e_idx in element_groups.get(&root).map(Vec::as_slice).unwrap_or(&[]) {
            let mut v = basis.elements[e_idx].spectrum.clone();
            for q in &ortho {
                v = v.add_scaled(q, -inner_product(&v, q) / (2.0 * PI));
            }
            let nv = (inner_product(&v, &v).re / (2.0 * PI)).sqrt();
            if nv > 0.0 {
                ortho.push(v.scale(Complex::new(1.0 / nv, 0.0)));
            }
        }
        let projector = ortho
            .iter()
            .map(|q| comp_freqs.iter().map(|&k| q.coeff(k)).collect::<Vec<_>>())
            .collect();
        let mirror = class
            .reflection_sign()
            .map(|s| (comp_freqs.iter().map(|&k| local[&-k]).collect::<Vec<_>>(), s));
        let scale = comp_freqs.iter().map(|&k| (k.abs() as f64).powi(-(p.r as i32))).collect();
        out.push(Component { freqs: comp_freqs, scale, projector, mirror });
    }
    Ok((out, tau))
}

/// Supremum of `E(u, space)^2 / ||u^(r)||^2` over the truncated, symmetry-restricted class.
pub fn worst_case_ratio(p: &RatioProblem) -> Result<RatioReport> {
    p.validate()?;
    let admits_constants = matches!(p.class.variant, SymmetryClass::H1 | SymmetryClass::Any);
    if admits_constants && !p.zero_mean_constraint {
        let one = TruncatedSpectrum::constant(p.cutoff, Complex::ONE);
        let proj = basis(&p.space, p.cutoff)?.project(&one)?;
        if proj.error > 1e-10 * one.l2_norm().value {
            return Err(Error::UnboundedRatio(format!(
                "class {} contains constants but {} does not",
                p.class.variant.name(),
                p.space.variant
            )));
        }
    }
    let (comps, tau) = components(p)?;
    let mut ratio: f64 = 0.0;
    let mut largest = 0;
    for c in &comps {
        largest = largest.max(c.len());
        let lambda = if c.len() <= DENSE_LIMIT { largest_dense(c) } else { power_iteration(|x| c.apply(x), c.len())? };
        ratio = ratio.max(lambda);
    }
    let truncation_gap = tau + ((p.cutoff + 1) as f64).powi(-2 * p.r as i32);
    Ok(RatioReport { ratio, truncation_gap, components: comps.len(), largest_component: largest })
}

/// `(nDim + 1)`-th largest semiaxis of the class ellipsoid `{u : ||u^(r)|| <= 1}`.
pub fn ellipsoid_width(class: FunctionClassTag, n_dim: usize, cutoff: i64) -> Result<f64> {
    let r = class.r as i32;
    let mut axes: Vec<f64> = Vec::new();
    match class.variant {
        SymmetryClass::H1 | SymmetryClass::Any => axes.push(f64::INFINITY),
        _ => {}
    }
    for k in 1..=cutoff {
        if !class.variant.admits(k) {
            continue;
        }
        let a = (k as f64).powi(-r);
        axes.push(a);
        if class.variant == SymmetryClass::Any {
            axes.push(a);
        }
    }
    // Axes are generated in nonincreasing order already.
    axes.get(n_dim).copied().ok_or_else(|| {
        let per_unit = match class.variant {
            SymmetryClass::H2 | SymmetryClass::H2Even => 2,
            _ => 1,
        };
        Error::TruncationTooSmall { cutoff, required: per_unit * (n_dim as i64 + 1) }
    })
}

/// The `n_dim`-dimensional trigonometric space attaining the width of `class`.
pub fn optimal_trigonometric_space(class: SymmetryClass, n_dim: u32) -> Result<ShiftSpaceSpec> {
    let (n, variant) = match class {
        SymmetryClass::H0 => (n_dim + 1, SpaceVariant::Sym0(n_dim)),
        SymmetryClass::H1 if n_dim >= 1 => (n_dim, SpaceVariant::Sym1(n_dim)),
        SymmetryClass::H2 if n_dim >= 1 => (2 * n_dim + 1, SpaceVariant::Sym2(n_dim)),
        SymmetryClass::H2Even if n_dim >= 1 => (2 * n_dim + 1, SpaceVariant::Sym2Even(n_dim)),
        other => {
            return Err(Error::InvalidParameter(format!(
                "no optimal space of dimension {n_dim} is tabulated for class {}",
                other.name()
            )))
        }
    };
    ShiftSpaceSpec::new(KernelSpec::dirichlet(n), n, variant)
}

#[derive(Debug, Clone)]
pub struct BruteForceProjection {
    pub approximant: TruncatedSpectrum,
    pub coefficients: Vec<Complex>,
    pub error: f64,
    pub condition: f64,
}

/// Least squares through the normal equations on the full Gram matrix.
pub fn brute_force_projection(f: &TruncatedSpectrum, raw_basis: &[TruncatedSpectrum]) -> Result<BruteForceProjection> {
    let n = raw_basis.len();
    let cutoff = raw_basis.iter().map(|b| b.cutoff()).max().unwrap_or(f.cutoff()).max(f.cutoff());
    if n == 0 {
        let error = f.l2_norm().value;
        return Ok(BruteForceProjection {
            approximant: TruncatedSpectrum::zero(cutoff),
            coefficients: Vec::new(),
            error,
            condition: 1.0,
        });
    }
    let gram = DMatrix::from_fn(n, n, |i, j| inner_product(&raw_basis[j], &raw_basis[i]));
    let gram = (&gram + gram.adjoint()) * Complex::new(0.5, 0.0);
    let eig = gram.clone().symmetric_eigen();
    let max = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let condition = if min > 0.0 { max / min } else { f64::INFINITY };
    if !(condition <= GRAM_CONDITION_LIMIT) {
        return Err(Error::IllConditioned { condition });
    }
    let rhs = DVector::from_fn(n, |i, _| inner_product(f, &raw_basis[i]));
    let solution = gram
        .cholesky()
        .ok_or(Error::IllConditioned { condition })?
        .solve(&rhs);
    let mut approximant = TruncatedSpectrum::zero(cutoff);
    for (b, a) in raw_basis.iter().zip(solution.iter()) {
        approximant = approximant.add_scaled(b, *a);
    }
    let error = f.sub(&approximant).l2_norm().value;
    Ok(BruteForceProjection { approximant, coefficients: solution.iter().copied().collect(), error, condition })
}

/// The `2n` raw shifts `B(x - j pi / n)`, `j = 0..2n`.
pub fn raw_shifts(kernel: &KernelSpec, n: u32, cutoff: i64) -> Result<Vec<TruncatedSpectrum>> {
    let b = kernel.truncate(cutoff)?;
    Ok((0..2 * n).map(|j| b.shift(j as f64 * PI / n as f64)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shift_space::project;

    fn tag(c: SymmetryClass, r: u32) -> FunctionClassTag {
        FunctionClassTag::new(c, r).unwrap()
    }

    #[test]
    fn dirichlet_sym0_is_diagonal() {
        for m in 1..=4u32 {
            for r in 1..=3u32 {
                let space = ShiftSpaceSpec::new(KernelSpec::dirichlet(m + 1), m + 1, SpaceVariant::Sym0(m)).unwrap();
                let rep = worst_case_ratio(&RatioProblem::new(space, tag(SymmetryClass::H0, r), 4 * (m as i64 + 1), false))
                    .unwrap();
                let expected = ((m + 1) as f64).powi(-2 * r as i32);
                assert!((rep.ratio - expected).abs() <= 1e-14 * expected, "{} vs {expected}", rep.ratio);
                assert!(rep.truncation_gap < expected);
            }
        }
    }

    #[test]
    fn widths_match_the_tabulated_values() {
        for n in 1..=6usize {
            for r in 1..=3u32 {
                let nf = n as f64;
                let h0 = ellipsoid_width(tag(SymmetryClass::H0, r), n, 64).unwrap();
                let h1 = ellipsoid_width(tag(SymmetryClass::H1, r), n, 64).unwrap();
                let h2 = ellipsoid_width(tag(SymmetryClass::H2, r), n, 64).unwrap();
                assert_eq!(h0, (nf + 1.0).powi(-(r as i32)));
                assert_eq!(h1, nf.powi(-(r as i32)));
                assert_eq!(h2, (2.0 * nf + 1.0).powi(-(r as i32)));
            }
        }
        assert!(ellipsoid_width(tag(SymmetryClass::H1, 1), 0, 8).unwrap().is_infinite());
        assert!(matches!(ellipsoid_width(tag(SymmetryClass::H2, 1), 10, 8), Err(Error::TruncationTooSmall { .. })));
    }

    #[test]
    fn optimal_spaces_attain_the_width() {
        for class in [SymmetryClass::H0, SymmetryClass::H1, SymmetryClass::H2] {
            for n_dim in 1..=4u32 {
                let r = 2;
                let space = optimal_trigonometric_space(class, n_dim).unwrap();
                let cutoff = 4 * space.n as i64;
                let rep = worst_case_ratio(&RatioProblem::new(space, tag(class, r), cutoff, false)).unwrap();
                let w = ellipsoid_width(tag(class, r), n_dim as usize, cutoff).unwrap();
                assert!((rep.ratio.sqrt() - w).abs() <= 1e-8, "{class:?} {n_dim}: {} vs {w}", rep.ratio.sqrt());
            }
        }
    }

    #[test]
    fn bspline_sym0_respects_the_bound() {
        for n in 2..=5u32 {
            for r in 1..=2u32 {
                let k = KernelSpec::bspline(n, r + 1);
                let space = ShiftSpaceSpec::new(k, n, SpaceVariant::Sym0(n - 1)).unwrap();
                let rep = worst_case_ratio(&RatioProblem::new(space, tag(SymmetryClass::H0, r), 8 * n as i64, false))
                    .unwrap();
                let bound = (n as f64).powi(-2 * r as i32);
                assert!(rep.ratio <= bound * (1.0 + 1e-6), "n={n} r={r}: {} > {bound}", rep.ratio);
                assert!(rep.ratio >= bound - 1e-6);
            }
        }
    }

    #[test]
    fn constants_must_be_absorbed() {
        let space = ShiftSpaceSpec::new(KernelSpec::bspline(4, 2), 4, SpaceVariant::EvenParts(3)).unwrap();
        let err = worst_case_ratio(&RatioProblem::new(space.clone(), tag(SymmetryClass::H1, 1), 32, false)).unwrap_err();
        assert!(matches!(err, Error::UnboundedRatio(_)));
        assert!(worst_case_ratio(&RatioProblem::new(space, tag(SymmetryClass::H1, 1), 32, true)).is_ok());
    }

    #[test]
    fn small_truncation_is_rejected() {
        let space = ShiftSpaceSpec::new(KernelSpec::bspline(4, 2), 4, SpaceVariant::Sym0(3)).unwrap();
        let err = worst_case_ratio(&RatioProblem::new(space, tag(SymmetryClass::H0, 1), 15, false)).unwrap_err();
        assert!(matches!(err, Error::TruncationTooSmall { .. }));
    }

    #[test]
    fn power_iteration_matches_dense() {
        let space = ShiftSpaceSpec::new(KernelSpec::bspline(2, 2), 2, SpaceVariant::Full).unwrap();
        let p = RatioProblem::new(space, tag(SymmetryClass::Any, 1), 200, true);
        let (comps, _) = components(&p).unwrap();
        let big = comps.iter().max_by_key(|c| c.len()).unwrap();
        assert!(big.len() > DENSE_LIMIT);
        let dense = largest_dense(big);
        let power = power_iteration(|x| big.apply(x), big.len()).unwrap();
        assert!((dense - power).abs() <= 1e-7 * dense, "{dense} vs {power}");
    }

    #[test]
    fn brute_force_agrees_with_project() {
        let space = ShiftSpaceSpec::new(KernelSpec::bspline(3, 2), 3, SpaceVariant::Full).unwrap();
        let f = TruncatedSpectrum::from_coeffs(
            64,
            (-10..=10).map(|k: i64| (k, Complex::new(1.0 / (1.0 + (k * k) as f64), 0.1 * k as f64 / 50.0))),
        )
        .unwrap();
        let p = project(&f, &space, 64).unwrap();
        let raw = raw_shifts(&KernelSpec::bspline(3, 2), 3, 64).unwrap();
        let bf = brute_force_projection(&f, &raw).unwrap();
        assert!((bf.error - p.error).abs() <= 1e-9 * p.error);
        let orth = basis(&space, 64).unwrap().spectra();
        let bf2 = brute_force_projection(&f, &orth).unwrap();
        assert!((bf2.error - p.error).abs() <= 1e-9 * p.error);
    }

    #[test]
    fn duplicated_vector_is_ill_conditioned() {
        let b = TruncatedSpectrum::sine(8, 2).unwrap();
        let err = brute_force_projection(&b, &[b.clone(), b.clone()]).unwrap_err();
        assert!(matches!(err, Error::IllConditioned { .. }));
    }
}
