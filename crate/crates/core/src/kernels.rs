//! Generators with closed-form Fourier coefficients.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{ik_power, Complex, Envelope, Frequency, TruncatedSpectrum};

/// Multiplier sequence `eta_k` applied on top of a B-spline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum WeightSeq {
    /// `e^{-alpha |k|}`.
    Poisson { alpha: f64 },
    /// `e^{-alpha k^2}`.
    Heat { alpha: f64 },
    /// `1 / P(ik)` for `P(z) = prod_j (z - root_j)`, with `eta_0 = 1`.
    DiffOperator { roots: Vec<f64> },
    /// `|k|^{-s} e^{-i beta sign k}`, with `eta_0 = 1`.
    GeneralizedBernoulli { s: f64, beta: f64 },
}

impl WeightSeq {
    pub fn validate(&self) -> Result<()> {
        match self {
            WeightSeq::Poisson { alpha } | WeightSeq::Heat { alpha } => {
                if !(*alpha > 0.0 && alpha.is_finite()) {
                    return Err(Error::InvalidParameter(format!("alpha = {alpha} must be positive")));
                }
            }
            WeightSeq::DiffOperator { roots } => {
                if roots.iter().any(|r| !r.is_finite()) {
                    return Err(Error::InvalidParameter("polynomial roots must be finite".into()));
                }
            }
            WeightSeq::GeneralizedBernoulli { s, beta } => {
                if !(*s > 0.0 && s.is_finite()) || !beta.is_finite() {
                    return Err(Error::InvalidParameter(format!("need s > 0 and finite beta, got s = {s}, beta = {beta}")));
                }
            }
        }
        Ok(())
    }

    /// `eta_k`.
    pub fn weight(&self, k: Frequency) -> Result<Complex> {
        match self {
            WeightSeq::Poisson { alpha } => Ok(Complex::new((-alpha * k.abs() as f64).exp(), 0.0)),
            WeightSeq::Heat { alpha } => Ok(Complex::new((-alpha * (k as f64).powi(2)).exp(), 0.0)),
            WeightSeq::DiffOperator { roots } => {
                if k == 0 {
                    return Ok(Complex::ONE);
                }
                let p: Complex = roots.iter().map(|&r| Complex::new(-r, k as f64)).product();
                if p == Complex::ZERO {
                    return Err(Error::WeightPole(k));
                }
                Ok(p.inv())
            }
            WeightSeq::GeneralizedBernoulli { s, beta } => {
                if k == 0 {
                    return Ok(Complex::ONE);
                }
                let sign = k.signum() as f64;
                Ok(Complex::from_polar((k.abs() as f64).powf(-s), -beta * sign))
            }
        }
    }

    /// Extra decay exponent gained from the weight: `|eta_k| <= |k|^(-gain)` for `k != 0`.
    pub fn decay_gain(&self) -> f64 {
        match self {
            WeightSeq::Poisson { .. } | WeightSeq::Heat { .. } => 0.0,
            WeightSeq::DiffOperator { roots } => roots.len() as f64,
            WeightSeq::GeneralizedBernoulli { s, .. } => *s,
        }
    }

    /// `sup |eta_k|` over `|k| > cutoff`.
    pub fn tail_sup(&self, cutoff: Frequency) -> f64 {
        let k = (cutoff.max(0) + 1) as f64;
        match self {
            WeightSeq::Poisson { alpha } => (-alpha * k).exp(),
            WeightSeq::Heat { alpha } => (-alpha * k * k).exp(),
            WeightSeq::DiffOperator { roots } => roots.iter().map(|r| (k * k + r * r).sqrt().recip()).product(),
            WeightSeq::GeneralizedBernoulli { s, .. } => k.powf(-s),
        }
    }

    /// Checks `|eta_{l+2nk}| <= |eta_l|` and `eta_l != 0` for `|l| < n` over every `|l + 2nk| <= cutoff`.
    pub fn verify_monotone(&self, n: u32, cutoff: i64) -> Result<bool> {
        let period = 2 * n as i64;
        for l in (1 - n as i64)..(n as i64) {
            let base = self.weight(l)?.norm();
            if base == 0.0 {
                return Ok(false);
            }
            let mut t = l - period * ((l + cutoff) / period);
            while t <= cutoff {
                if self.weight(t)?.norm() > base * (1.0 + 1e-14) {
                    return Ok(false);
                }
                t += period;
            }
        }
        Ok(true)
    }

    pub fn label(&self) -> String {
        match self {
            WeightSeq::Poisson { alpha } => format!("poisson(alpha={alpha})"),
            WeightSeq::Heat { alpha } => format!("heat(alpha={alpha})"),
            WeightSeq::DiffOperator { roots } => {
                let r: Vec<String> = roots.iter().map(|r| r.to_string()).collect();
                format!("diffop(roots={})", r.join(";"))
            }
            WeightSeq::GeneralizedBernoulli { s, beta } => format!("bernoulli(s={s},beta={beta})"),
        }
    }
}

pub fn weight(family: &WeightSeq, k: Frequency) -> Result<Complex> {
    family.weight(k)
}

pub type CoefficientRule = Arc<dyn Fn(Frequency) -> Complex + Send + Sync>;

/// User-supplied coefficient rule with a decay envelope valid for every `k != 0`.
#[derive(Clone)]
pub struct CustomKernel {
    pub name: String,
    pub rule: CoefficientRule,
    pub envelope: Option<Envelope>,
    /// Largest frequency with a nonzero coefficient, for finitely supported rules.
    pub support: Option<i64>,
    /// Shift-space parameter the kernel is meant for; bounds the admissible truncation from below.
    pub nominal_n: u32,
}

impl fmt::Debug for CustomKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomKernel")
            .field("name", &self.name)
            .field("envelope", &self.envelope)
            .field("support", &self.support)
            .field("nominal_n", &self.nominal_n)
            .finish_non_exhaustive()
    }
}

/// Symbolic generator with a closed-form coefficient rule.
#[derive(Debug, Clone)]
pub enum KernelSpec {
    /// `D_degree(t) = sum_{|k| <= degree} e^{ikt}`; generates trigonometric spaces with `n = degree + 1`.
    Dirichlet { degree: u32 },
    /// Periodic B-spline of degree `mu` with knots at `j pi / n`.
    BSpline { n: u32, mu: u32 },
    /// `BSpline` translated by `pi / (2n)`.
    ShiftedBSpline { n: u32, mu: u32 },
    /// `BSpline` coefficients multiplied by a weight sequence.
    Weighted { n: u32, mu: u32, weight: WeightSeq },
    Custom(CustomKernel),
    /// Every coefficient multiplied by a nonzero constant.
    Scaled { base: Box<KernelSpec>, factor: Complex },
    /// The `order`-th derivative of the base generator.
    Derivative { base: Box<KernelSpec>, order: u32 },
}

fn bspline_coeff(n: u32, power: u32, phase_power: u32, k: Frequency) -> Complex {
    if k == 0 {
        return Complex::ONE;
    }
    let two_n = 2 * n as i64;
    let four_n = 2 * two_n;
    if k.rem_euclid(two_n) == 0 {
        return Complex::ZERO;
    }
    let j = k.rem_euclid(four_n);
    let arg = PI * j as f64 / two_n as f64;
    let ratio = arg.sin() / (PI * k as f64 / two_n as f64);
    let phase_index = ((k as i128 * phase_power as i128).rem_euclid(four_n as i128)) as f64;
    let magnitude = ratio.powi(power as i32);
    Complex::from_polar(1.0, PI * phase_index / two_n as f64) * magnitude
}

impl KernelSpec {
    pub fn dirichlet(degree: u32) -> Self {
        KernelSpec::Dirichlet { degree }
    }

    pub fn bspline(n: u32, mu: u32) -> Self {
        KernelSpec::BSpline { n, mu }
    }

    pub fn shifted_bspline(n: u32, mu: u32) -> Self {
        KernelSpec::ShiftedBSpline { n, mu }
    }

    pub fn weighted(n: u32, mu: u32, weight: WeightSeq) -> Result<Self> {
        weight.validate()?;
        Ok(KernelSpec::Weighted { n, mu, weight })
    }

    pub fn custom(
        name: impl Into<String>,
        nominal_n: u32,
        envelope: Option<Envelope>,
        rule: impl Fn(Frequency) -> Complex + Send + Sync + 'static,
    ) -> Self {
        KernelSpec::Custom(CustomKernel { name: name.into(), rule: Arc::new(rule), envelope, support: None, nominal_n })
    }

    /// Copy of this generator with some coefficients replaced.
    ///
    /// The envelope constant is enlarged so the bound still holds at every overridden frequency.
    pub fn with_overrides(&self, overrides: &[(Frequency, Complex)]) -> Self {
        let base = self.clone();
        let table: Vec<(Frequency, Complex)> = overrides.to_vec();
        let envelope = self.envelope().map(|env| {
            let constant = table
                .iter()
                .filter(|(k, _)| *k != 0)
                .map(|(k, v)| v.norm() * (k.abs() as f64).powf(env.exponent))
                .fold(env.constant, f64::max);
            Envelope::new(constant, env.exponent)
        });
        let widest = table.iter().map(|(k, _)| k.abs()).max().unwrap_or(0);
        let support = self.support_bound().map(|d| d.max(widest));
        let name = format!("{}+overrides", self.label());
        KernelSpec::Custom(CustomKernel {
            name,
            rule: Arc::new(move |k| match table.iter().find(|(f, _)| *f == k) {
                Some(&(_, v)) => v,
                None => base.coeff(k),
            }),
            envelope,
            support,
            nominal_n: self.nominal_n(),
        })
    }

    pub fn scaled(&self, factor: Complex) -> Self {
        KernelSpec::Scaled { base: Box::new(self.clone()), factor }
    }

    /// The `order`-th derivative; requires decay exponent above `order + 1/2`.
    pub fn derivative(&self, order: u32) -> Result<Self> {
        if self.support_bound().is_none() {
            let env = self.envelope().ok_or_else(|| Error::MissingDecay(self.label()))?;
            if env.differentiate(order).is_none() {
                return Err(Error::InsufficientDecay { exponent: env.exponent, order });
            }
        }
        Ok(KernelSpec::Derivative { base: Box::new(self.clone()), order })
    }

    /// The shift-space parameter `n` the generator is built for.
    pub fn nominal_n(&self) -> u32 {
        match self {
            KernelSpec::Dirichlet { degree } => degree + 1,
            KernelSpec::BSpline { n, .. }
            | KernelSpec::ShiftedBSpline { n, .. }
            | KernelSpec::Weighted { n, .. } => *n,
            KernelSpec::Custom(c) => c.nominal_n,
            KernelSpec::Scaled { base, .. } | KernelSpec::Derivative { base, .. } => base.nominal_n(),
        }
    }

    /// Largest frequency with a nonzero coefficient, for finitely supported generators.
    pub fn support_bound(&self) -> Option<i64> {
        match self {
            KernelSpec::Dirichlet { degree } => Some(*degree as i64),
            KernelSpec::Custom(c) => c.support,
            KernelSpec::Scaled { base, .. } | KernelSpec::Derivative { base, .. } => base.support_bound(),
            _ => None,
        }
    }

    /// `c_k(B)`.
    pub fn coeff(&self, k: Frequency) -> Complex {
        match self {
            KernelSpec::Dirichlet { degree } => {
                if k.unsigned_abs() <= *degree as u64 {
                    Complex::ONE
                } else {
                    Complex::ZERO
                }
            }
            KernelSpec::BSpline { n, mu } => bspline_coeff(*n, mu + 1, mu + 1, k),
            KernelSpec::ShiftedBSpline { n, mu } => bspline_coeff(*n, mu + 1, *mu, k),
            KernelSpec::Weighted { n, mu, weight } => {
                let eta = weight.weight(k).unwrap_or(Complex::new(f64::NAN, f64::NAN));
                bspline_coeff(*n, mu + 1, mu + 1, k) * eta
            }
            KernelSpec::Custom(c) => (c.rule)(k),
            KernelSpec::Scaled { base, factor } => base.coeff(k) * factor,
            KernelSpec::Derivative { base, order } => base.coeff(k) * ik_power(k, *order),
        }
    }

    /// Envelope `|c_k| <= C |k|^{-p}` valid for every `k != 0`.
    pub fn envelope(&self) -> Option<Envelope> {
        match self {
            KernelSpec::Dirichlet { .. } => None,
            KernelSpec::BSpline { n, mu } | KernelSpec::ShiftedBSpline { n, mu } => {
                let p = (mu + 1) as f64;
                Some(Envelope::new((2.0 * *n as f64 / PI).powf(p), p))
            }
            KernelSpec::Weighted { n, mu, weight } => {
                let p = (mu + 1) as f64;
                Some(Envelope::new((2.0 * *n as f64 / PI).powf(p), p + weight.decay_gain()))
            }
            KernelSpec::Custom(c) => c.envelope,
            KernelSpec::Scaled { base, factor } => {
                base.envelope().map(|e| Envelope::new(e.constant * factor.norm(), e.exponent))
            }
            KernelSpec::Derivative { base, order } => base.envelope().and_then(|e| e.differentiate(*order)),
        }
    }

    /// `(A, p)` with `|c_t|^2 = A |t|^{-2p}` exactly for every `t = l (mod 2 space_n)`, `t != 0`.
    pub fn power_law_class(&self, space_n: u32, l: Frequency) -> Option<(f64, f64)> {
        match self {
            KernelSpec::BSpline { n, mu } | KernelSpec::ShiftedBSpline { n, mu } => {
                if !space_n.is_multiple_of(*n) {
                    return None;
                }
                let p = (mu + 1) as f64;
                let two_n = 2.0 * *n as f64;
                let amplitude = (two_n / PI) * (PI * l as f64 / two_n).sin().abs();
                Some((amplitude.powf(2.0 * p), p))
            }
            KernelSpec::Scaled { base, factor } => {
                base.power_law_class(space_n, l).map(|(a, p)| (a * factor.norm_sqr(), p))
            }
            KernelSpec::Derivative { base, order } => {
                base.power_law_class(space_n, l).map(|(a, p)| (a, p - *order as f64))
            }
            _ => None,
        }
    }

    /// Bound on `sup |t|^r |c_t|` over `t = l (mod 2 space_n)` with `|t| > cutoff`.
    pub fn class_weighted_tail_sup(&self, space_n: u32, l: Frequency, r: u32, cutoff: Frequency) -> f64 {
        if self.support_bound().is_some_and(|d| d <= cutoff) || self.class_vanishes(space_n, l) {
            return 0.0;
        }
        let power_law = |a: f64, p: f64| {
            if a == 0.0 {
                0.0
            } else if p >= r as f64 {
                a.sqrt() * ((cutoff + 1) as f64).powf(r as f64 - p)
            } else {
                f64::INFINITY
            }
        };
        match self {
            KernelSpec::Weighted { n, mu, weight } => {
                let base = KernelSpec::BSpline { n: *n, mu: *mu };
                match base.power_law_class(space_n, l) {
                    Some((a, p)) => power_law(a, p) * weight.tail_sup(cutoff),
                    None => self.envelope().map_or(f64::INFINITY, |e| e.weighted_sup(r as f64, cutoff)),
                }
            }
            KernelSpec::Scaled { base, factor } => base.class_weighted_tail_sup(space_n, l, r, cutoff) * factor.norm(),
            KernelSpec::Derivative { base, order } => base.class_weighted_tail_sup(space_n, l, r + order, cutoff),
            _ => match self.power_law_class(space_n, l) {
                Some((a, p)) => power_law(a, p),
                None => self.envelope().map_or(f64::INFINITY, |e| e.weighted_sup(r as f64, cutoff)),
            },
        }
    }

    /// Whether every coefficient on the class `l (mod 2 space_n)` except possibly `c_0` is exactly zero.
    pub fn class_vanishes(&self, space_n: u32, l: Frequency) -> bool {
        match self {
            KernelSpec::BSpline { n, .. } | KernelSpec::ShiftedBSpline { n, .. } | KernelSpec::Weighted { n, .. } => {
                space_n.is_multiple_of(*n) && l.rem_euclid(2 * *n as i64) == 0
            }
            KernelSpec::Scaled { base, .. } | KernelSpec::Derivative { base, .. } => base.class_vanishes(space_n, l),
            _ => false,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            KernelSpec::BSpline { n, .. } | KernelSpec::ShiftedBSpline { n, .. } if *n == 0 => {
                Err(Error::InvalidParameter("B-spline parameter n must be at least 1".into()))
            }
            KernelSpec::Weighted { n, weight, .. } => {
                if *n == 0 {
                    return Err(Error::InvalidParameter("B-spline parameter n must be at least 1".into()));
                }
                weight.validate()
            }
            KernelSpec::Custom(c) => match (c.envelope, c.support) {
                (None, None) => Err(Error::MissingDecay(c.name.clone())),
                (Some(e), None) if e.exponent <= 0.5 => {
                    Err(Error::InsufficientDecay { exponent: e.exponent, order: 0 })
                }
                _ => Ok(()),
            },
            KernelSpec::Scaled { base, factor } => {
                if *factor == Complex::ZERO || !factor.is_finite() {
                    return Err(Error::InvalidParameter("scale factor must be finite and nonzero".into()));
                }
                base.validate()
            }
            KernelSpec::Derivative { base, .. } => base.validate(),
            _ => Ok(()),
        }
    }

    /// Certified `l2` bound on the coefficients with `|k| > cutoff`.
    pub fn tail_bound(&self, cutoff: i64) -> Result<f64> {
        if let Some(deg) = self.support_bound() {
            if cutoff >= deg {
                return Ok(0.0);
            }
        }
        let env = self.envelope().ok_or_else(|| Error::MissingDecay(self.label()))?;
        Ok(env.l2_tail(cutoff))
    }

    /// Certified bound on `sum |c_t|^2` over `t = l (mod 2 space_n)`, `|t| > cutoff`.
    pub fn class_tail_mass(&self, space_n: u32, l: Frequency, cutoff: i64) -> Result<f64> {
        if let Some(deg) = self.support_bound() {
            if cutoff >= deg {
                return Ok(0.0);
            }
        }
        let env = self.envelope().ok_or_else(|| Error::MissingDecay(self.label()))?;
        Ok(env.class_mass(2 * space_n as i64, l, cutoff))
    }

    /// Truncated spectrum with certified tail; requires `cutoff >= 2n`.
    pub fn truncate(&self, cutoff: i64) -> Result<TruncatedSpectrum> {
        self.validate()?;
        let required = match self {
            KernelSpec::Dirichlet { degree } => *degree as i64,
            _ => 2 * self.nominal_n() as i64,
        };
        if cutoff < required.max(1) {
            return Err(Error::TruncationTooSmall { cutoff, required: required.max(1) });
        }
        let tail = self.tail_bound(cutoff)?;
        let coeffs = (-cutoff..=cutoff).map(|k| (k, self.coeff(k)));
        let envelope = if tail > 0.0 { self.envelope() } else { None };
        TruncatedSpectrum::from_coeffs(cutoff, coeffs)?.with_tail(tail, envelope)
    }

    /// Largest `|c_k|` over `|k| <= cutoff`, the reference scale for zero tests.
    pub fn scale(&self, cutoff: i64) -> f64 {
        (-cutoff..=cutoff).map(|k| self.coeff(k).norm()).fold(0.0, f64::max)
    }

    pub fn label(&self) -> String {
        match self {
            KernelSpec::Dirichlet { degree } => format!("dirichlet(deg={degree})"),
            KernelSpec::BSpline { n, mu } => format!("bspline(n={n},mu={mu})"),
            KernelSpec::ShiftedBSpline { n, mu } => format!("shifted(n={n},mu={mu})"),
            KernelSpec::Weighted { n, mu, weight } => format!("bspline(n={n},mu={mu})*{}", weight.label()),
            KernelSpec::Custom(c) => format!("custom({})", c.name),
            KernelSpec::Scaled { base, factor } => format!("({}+{}i)*{}", factor.re, factor.im, base.label()),
            KernelSpec::Derivative { base, order } => format!("d{order}/dx{order} {}", base.label()),
        }
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

pub fn coeff(spec: &KernelSpec, k: Frequency) -> Complex {
    spec.coeff(k)
}

pub fn truncate(spec: &KernelSpec, cutoff: i64) -> Result<TruncatedSpectrum> {
    spec.truncate(cutoff)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn direct_bspline(n: u32, mu: u32, k: i64) -> Complex {
        if k == 0 {
            return Complex::ONE;
        }
        let z = Complex::new(0.0, PI * k as f64 / n as f64);
        ((z.exp() - 1.0) / z).powu(mu + 1)
    }

    #[test]
    fn bspline_matches_direct_power() {
        for n in 1..=6u32 {
            for mu in 0..=5u32 {
                for k in -40i64..=40 {
                    let got = KernelSpec::bspline(n, mu).coeff(k);
                    let want = direct_bspline(n, mu, k);
                    assert!((got - want).norm() <= 1e-13, "n={n} mu={mu} k={k}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn coefficient_examples() {
        assert_eq!(KernelSpec::bspline(3, 2).coeff(0), Complex::ONE);
        assert_eq!(KernelSpec::dirichlet(2).coeff(2), Complex::ONE);
        assert_eq!(KernelSpec::dirichlet(2).coeff(3), Complex::ZERO);
        let c1 = KernelSpec::bspline(1, 0).coeff(1);
        assert!(c1.re.abs() < 1e-16);
        assert_relative_eq!(c1.im, 2.0 / PI, epsilon = 1e-15);
    }

    #[test]
    fn box_spline_coefficient_matches_quadrature() {
        // B_{1,0} is 2 on (-pi, 0) and 0 on (0, pi); c_1 = (1/2pi) int B e^{-ix}
        let steps = 200_000;
        let h = PI / steps as f64;
        let c1: Complex = (0..steps)
            .map(|j| {
                let x = -(j as f64 + 0.5) * h;
                Complex::from_polar(2.0, -x) * h
            })
            .sum::<Complex>()
            / (2.0 * PI);
        assert!((c1 - KernelSpec::bspline(1, 0).coeff(1)).norm() < 1e-9);
    }

    #[test]
    fn shifted_bspline_is_translate() {
        for (n, mu) in [(2u32, 1u32), (4, 0), (5, 3)] {
            for k in -30i64..=30 {
                let h = PI / (2.0 * n as f64);
                let want = KernelSpec::bspline(n, mu).coeff(k) * Complex::from_polar(1.0, -(k as f64) * h);
                let got = KernelSpec::shifted_bspline(n, mu).coeff(k);
                assert!((got - want).norm() <= 1e-14);
            }
        }
    }

    #[test]
    fn weight_examples() {
        let p = WeightSeq::Poisson { alpha: 1.0 };
        assert_relative_eq!(p.weight(2).unwrap().re, (-2.0f64).exp());
        assert_eq!(WeightSeq::Heat { alpha: 0.3 }.weight(0).unwrap(), Complex::ONE);
        let b = WeightSeq::GeneralizedBernoulli { s: 1.0, beta: 0.0 };
        assert_relative_eq!(b.weight(-3).unwrap().re, 1.0 / 3.0);
        assert_eq!(b.weight(0).unwrap(), Complex::ONE);
        let d = WeightSeq::DiffOperator { roots: vec![0.0, 2.0] };
        assert_eq!(d.weight(0).unwrap(), Complex::ONE);
        let want = (Complex::new(0.0, 3.0) * Complex::new(-2.0, 3.0)).inv();
        assert!((d.weight(3).unwrap() - want).norm() < 1e-16);
    }

    #[test]
    fn weights_are_monotone_along_classes() {
        let families = [
            WeightSeq::Poisson { alpha: 0.2 },
            WeightSeq::Heat { alpha: 0.01 },
            WeightSeq::DiffOperator { roots: vec![1.0, -0.5] },
            WeightSeq::GeneralizedBernoulli { s: 0.7, beta: 1.1 },
        ];
        for w in &families {
            for n in 1..=6 {
                assert!(w.verify_monotone(n, 200).unwrap(), "{w:?} n={n}");
            }
        }
    }

    #[test]
    fn bspline_decays_along_residue_classes() {
        for n in 1..=6u32 {
            for mu in 0..=4u32 {
                let b = KernelSpec::bspline(n, mu);
                for l in -(n as i64)..=(n as i64) {
                    let base = b.coeff(l).norm();
                    for k in 1..=20i64 {
                        for t in [l + 2 * n as i64 * k, l - 2 * n as i64 * k] {
                            assert!(b.coeff(t).norm() <= base * (1.0 + 1e-12) + 1e-300);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn truncation_tails() {
        assert_eq!(KernelSpec::dirichlet(5).truncate(8).unwrap().tail_bound(), 0.0);
        let b = KernelSpec::bspline(2, 1).truncate(64).unwrap();
        // integral comparison of sum_{|k|>64} (4/(pi k))^4
        let closed = ((4.0 / PI).powi(4) * 2.0 * 64f64.powi(-3) / 3.0).sqrt();
        assert!(b.tail_bound() <= closed * (1.0 + 1e-12));
        let direct: f64 = (65..2_000_000i64).map(|k| 2.0 * (4.0 / (PI * k as f64)).powi(4)).sum::<f64>().sqrt();
        assert!(direct <= b.tail_bound());
        let true_tail: f64 = (65..200_000i64)
            .flat_map(|k| [k, -k])
            .map(|k| KernelSpec::bspline(2, 1).coeff(k).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(true_tail <= b.tail_bound());
        let s = KernelSpec::shifted_bspline(2, 1).truncate(64).unwrap();
        assert_eq!(s.tail_bound(), b.tail_bound());
    }

    #[test]
    fn truncation_rejects_small_cutoff_and_missing_decay() {
        assert!(matches!(KernelSpec::bspline(4, 1).truncate(7), Err(Error::TruncationTooSmall { .. })));
        let c = KernelSpec::custom("bare", 2, None, |_| Complex::ONE);
        assert!(matches!(c.truncate(16), Err(Error::MissingDecay(_))));
    }

    #[test]
    fn overrides_keep_envelope_sound() {
        let b = KernelSpec::bspline(3, 2);
        let o = b.with_overrides(&[(0, Complex::ZERO), (6, Complex::new(0.5, 0.0))]);
        assert_eq!(o.coeff(0), Complex::ZERO);
        assert_eq!(o.coeff(6), Complex::new(0.5, 0.0));
        assert_eq!(o.coeff(5), b.coeff(5));
        let env = o.envelope().unwrap();
        for k in 1..200i64 {
            assert!(o.coeff(k).norm() <= env.constant * (k as f64).powf(-env.exponent) * (1.0 + 1e-12));
        }
        let d = KernelSpec::dirichlet(3).with_overrides(&[(0, Complex::ZERO)]);
        assert_eq!(d.truncate(8).unwrap().tail_bound(), 0.0);
        assert_eq!(d.coeff(3), Complex::ONE);
        assert_eq!(d.coeff(9), Complex::ZERO);
    }

    #[test]
    fn power_law_classes_match_coefficients() {
        for (n, mu) in [(4u32, 0u32), (3, 2), (5, 1)] {
            for kernel in [KernelSpec::bspline(n, mu), KernelSpec::shifted_bspline(n, mu)] {
                for l in 1..(2 * n as i64) {
                    let (a, p) = kernel.power_law_class(n, l).unwrap();
                    for k in -5i64..=5 {
                        let t = l + 2 * n as i64 * k;
                        let want = kernel.coeff(t).norm_sqr();
                        assert!((a * (t.abs() as f64).powf(-2.0 * p) - want).abs() <= 1e-13 * want.max(1e-300));
                    }
                }
            }
        }
        let d = KernelSpec::bspline(3, 3).derivative(2).unwrap();
        let (a, p) = d.power_law_class(3, 1).unwrap();
        let want = d.coeff(7).norm_sqr();
        assert!((a * 7f64.powf(-2.0 * p) - want).abs() <= 1e-12 * want);
    }

    #[test]
    fn derivative_requires_decay() {
        assert!(KernelSpec::bspline(4, 3).derivative(3).is_ok());
        assert!(matches!(KernelSpec::bspline(4, 1).derivative(2), Err(Error::InsufficientDecay { .. })));
        assert!(KernelSpec::dirichlet(4).derivative(7).is_ok());
    }
}
