//! Truncated complex Fourier series on the period `[-pi, pi)`.
//!
//! A [`TruncatedSpectrum`] stores the coefficients `c_k` for `|k| <= cutoff`
//! in a sparse map together with a certified bound on the `l2` mass of every
//! discarded coefficient. The inner product is the `L2[-pi, pi]` pairing, so
//! `<f, g> = 2 pi sum_k f_k conj(g_k)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Complex = Complex64;

/// Harmonic index `k` of `e^{ikx}`.
pub type Frequency = i64;

/// Comparison tolerance for complex values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub relative: f64,
    pub absolute: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { relative: 1e-12, absolute: 1e-14 }
    }
}

impl Tolerance {
    pub fn new(relative: f64, absolute: f64) -> Self {
        Self { relative, absolute }
    }

    pub fn close(&self, a: Complex, b: Complex) -> bool {
        let scale = a.norm().max(b.norm());
        (a - b).norm() <= self.absolute + self.relative * scale
    }
}

/// Power-law envelope `|c_k| <= constant * |k|^(-exponent)` for the discarded frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub constant: f64,
    pub exponent: f64,
}

impl Envelope {
    pub fn new(constant: f64, exponent: f64) -> Self {
        Self { constant, exponent }
    }

    /// Bound on `(sum_{|k| > cutoff} |c_k|^2)^(1/2)` by comparison with the integral of the envelope.
    pub fn l2_tail(&self, cutoff: i64) -> f64 {
        if self.constant == 0.0 {
            return 0.0;
        }
        let q = 2.0 * self.exponent;
        if q <= 1.0 {
            return f64::INFINITY;
        }
        let k = cutoff.max(1) as f64;
        // sum_{k > K} k^-q <= int_K^inf x^-q dx, counted for both signs
        self.constant * (2.0 * k.powf(1.0 - q) / (q - 1.0)).sqrt()
    }

    /// Bound on `sum_{|k| > cutoff} |c_k|`; infinite when the series is not absolutely summable.
    pub fn l1_tail(&self, cutoff: i64) -> f64 {
        if self.constant == 0.0 {
            return 0.0;
        }
        let p = self.exponent;
        if p <= 1.0 {
            return f64::INFINITY;
        }
        let k = cutoff.max(1) as f64;
        2.0 * self.constant * k.powf(1.0 - p) / (p - 1.0)
    }

    /// Bound on `sum |c_k|^2` over the frequencies `k = residue (mod modulus)` with `|k| > cutoff`.
    pub fn class_mass(&self, modulus: i64, residue: i64, cutoff: i64) -> f64 {
        if self.constant == 0.0 {
            return 0.0;
        }
        let q = 2.0 * self.exponent;
        if q <= 1.0 {
            return f64::INFINITY;
        }
        let side = |first: i64| {
            let a = first as f64;
            a.powf(-q) + a.powf(1.0 - q) / (modulus as f64 * (q - 1.0))
        };
        let positive = first_in_class_above(modulus, residue, cutoff);
        let negative = first_in_class_above(modulus, -residue, cutoff);
        self.constant * self.constant * (side(positive) + side(negative))
    }

    /// Envelope of the `r`-th derivative, `|(ik)^r c_k| <= constant |k|^(r - exponent)`.
    pub fn differentiate(&self, order: u32) -> Option<Envelope> {
        let exponent = self.exponent - order as f64;
        if self.constant == 0.0 {
            return Some(*self);
        }
        (exponent > 0.5).then_some(Envelope::new(self.constant, exponent))
    }

    /// `sup_{|k| > cutoff} |k|^weight |c_k|`, infinite when the weighted envelope grows.
    pub fn weighted_sup(&self, weight: f64, cutoff: i64) -> f64 {
        if self.constant == 0.0 {
            return 0.0;
        }
        let e = self.exponent - weight;
        if e < 0.0 {
            return f64::INFINITY;
        }
        self.constant * ((cutoff + 1) as f64).powf(-e)
    }
}

/// Smallest `k > cutoff` with `k = residue (mod modulus)`.
pub(crate) fn first_in_class_above(modulus: i64, residue: i64, cutoff: i64) -> i64 {
    let r = residue.rem_euclid(modulus);
    let base = cutoff + 1;
    base + (r - base).rem_euclid(modulus)
}

/// Value of a series at a point together with a bound on the contribution of the discarded tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointValue {
    pub value: Complex,
    pub error_bound: f64,
}

/// `L2` norm together with the uncertainty implied by the tail bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norm {
    pub value: f64,
    pub uncertainty: f64,
}

/// Finite frequency-to-coefficient map with cutoff and certified tail.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSpectrum {
    coeffs: BTreeMap<Frequency, Complex>,
    cutoff: i64,
    tail_bound: f64,
    envelope: Option<Envelope>,
}

impl TruncatedSpectrum {
    /// Zero spectrum with the given cutoff.
    pub fn zero(cutoff: i64) -> Self {
        Self { coeffs: BTreeMap::new(), cutoff: cutoff.max(0), tail_bound: 0.0, envelope: None }
    }

    /// Exact trigonometric polynomial. Zero coefficients are not stored.
    pub fn from_coeffs<I>(cutoff: i64, coeffs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Frequency, Complex)>,
    {
        let mut out = Self::zero(cutoff);
        for (k, c) in coeffs {
            if k.abs() > out.cutoff {
                return Err(Error::FrequencyOutOfRange { frequency: k, cutoff: out.cutoff });
            }
            if c != Complex::ZERO {
                *out.coeffs.entry(k).or_insert(Complex::ZERO) += c;
            }
        }
        out.coeffs.retain(|_, c| *c != Complex::ZERO);
        Ok(out)
    }

    /// Attach a certified tail bound and the envelope it was derived from.
    pub fn with_tail(mut self, tail_bound: f64, envelope: Option<Envelope>) -> Result<Self> {
        if !(tail_bound >= 0.0) {
            return Err(Error::InvalidParameter(format!("tail bound {tail_bound} must be nonnegative")));
        }
        self.tail_bound = tail_bound;
        self.envelope = envelope;
        Ok(self)
    }

    /// `amplitude * e^{ikx}`.
    pub fn exponential(cutoff: i64, k: Frequency, amplitude: Complex) -> Result<Self> {
        Self::from_coeffs(cutoff, [(k, amplitude)])
    }

    pub fn constant(cutoff: i64, value: Complex) -> Self {
        Self::from_coeffs(cutoff, [(0, value)]).expect("k = 0 is always admissible")
    }

    /// `sin(kx)`, with `c_{+-k} = -+ i/2`.
    pub fn sine(cutoff: i64, k: Frequency) -> Result<Self> {
        Self::from_coeffs(cutoff, [(k, Complex::new(0.0, -0.5)), (-k, Complex::new(0.0, 0.5))])
    }

    /// `cos(kx)`.
    pub fn cosine(cutoff: i64, k: Frequency) -> Result<Self> {
        Self::from_coeffs(cutoff, [(k, Complex::new(0.5, 0.0)), (-k, Complex::new(0.5, 0.0))])
    }

    pub fn cutoff(&self) -> i64 {
        self.cutoff
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn envelope(&self) -> Option<Envelope> {
        self.envelope
    }

    pub fn is_exact(&self) -> bool {
        self.tail_bound == 0.0
    }

    pub fn coeff(&self, k: Frequency) -> Complex {
        self.coeffs.get(&k).copied().unwrap_or(Complex::ZERO)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Frequency, Complex)> + '_ {
        self.coeffs.iter().map(|(&k, &c)| (k, c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest stored `|k|`, or `None` for the zero spectrum.
    pub fn degree(&self) -> Option<i64> {
        self.coeffs.keys().map(|k| k.abs()).max()
    }

    /// Sum of `|c_k|^2` over the stored frequencies.
    pub fn energy(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum()
    }

    fn map_coeffs(&self, f: impl Fn(Frequency, Complex) -> Complex) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(&k, &c)| (k, f(k, c)))
            .filter(|(_, c)| *c != Complex::ZERO)
            .collect();
        Self { coeffs, cutoff: self.cutoff, tail_bound: self.tail_bound, envelope: self.envelope }
    }

    pub fn scale(&self, factor: Complex) -> Self {
        let mut out = self.map_coeffs(|_, c| c * factor);
        out.tail_bound *= factor.norm();
        out.envelope = self.envelope.map(|e| Envelope::new(e.constant * factor.norm(), e.exponent));
        out
    }

    /// Coefficientwise linear combination `self + factor * other`.
    pub fn add_scaled(&self, other: &Self, factor: Complex) -> Self {
        let mut coeffs = self.coeffs.clone();
        for (&k, &c) in &other.coeffs {
            *coeffs.entry(k).or_insert(Complex::ZERO) += factor * c;
        }
        coeffs.retain(|_, c| *c != Complex::ZERO);
        let envelope = match (self.envelope, other.envelope) {
            (Some(a), Some(b)) => Some(Envelope::new(
                a.constant + factor.norm() * b.constant,
                a.exponent.min(b.exponent),
            )),
            (Some(a), None) if other.is_exact() => Some(a),
            (None, Some(b)) if self.is_exact() => {
                Some(Envelope::new(factor.norm() * b.constant, b.exponent))
            }
            _ => None,
        };
        Self {
            coeffs,
            cutoff: self.cutoff.max(other.cutoff),
            tail_bound: self.tail_bound + factor.norm() * other.tail_bound,
            envelope,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.add_scaled(other, Complex::ONE)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add_scaled(other, -Complex::ONE)
    }

    /// Coefficient at `k` becomes `(ik)^r a_k`.
    pub fn derivative(&self, order: u32) -> Result<Self> {
        let (tail_bound, envelope) = if order == 0 || self.is_exact() {
            (self.tail_bound, if self.is_exact() { None } else { self.envelope })
        } else {
            let env = self.envelope.ok_or(Error::UncertifiedTail { tail: self.tail_bound })?;
            let d = env
                .differentiate(order)
                .ok_or(Error::InsufficientDecay { exponent: env.exponent, order })?;
            (d.l2_tail(self.cutoff), Some(d))
        };
        let mut out = self.map_coeffs(|k, c| c * ik_power(k, order));
        out.tail_bound = tail_bound;
        out.envelope = envelope;
        Ok(out)
    }

    /// Coefficient at `k` becomes `a_{-k}`; represents `x -> a(-x)`.
    pub fn reflect(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|(&k, &c)| (-k, c)).collect();
        Self { coeffs, cutoff: self.cutoff, tail_bound: self.tail_bound, envelope: self.envelope }
    }

    fn symmetrize(&self, sign: f64) -> Self {
        let mut coeffs = BTreeMap::new();
        for (&k, &c) in &self.coeffs {
            *coeffs.entry(k).or_insert(Complex::ZERO) += c * 0.5;
            *coeffs.entry(-k).or_insert(Complex::ZERO) += c * (0.5 * sign);
        }
        coeffs.retain(|_, c| *c != Complex::ZERO);
        Self { coeffs, cutoff: self.cutoff, tail_bound: self.tail_bound, envelope: self.envelope }
    }

    /// `(a + a(-.))/2`.
    pub fn even_part(&self) -> Self {
        self.symmetrize(1.0)
    }

    /// `(a - a(-.))/2`.
    pub fn odd_part(&self) -> Self {
        self.symmetrize(-1.0)
    }

    /// Represents `x -> a(x - h)`: coefficient at `k` multiplied by `e^{-ikh}`.
    pub fn shift(&self, h: f64) -> Self {
        self.map_coeffs(|k, c| c * Complex::from_polar(1.0, -(k as f64) * h))
    }

    /// Pointwise synthesis `sum_k a_k e^{ikx}`.
    pub fn evaluate(&self, x: f64) -> PointValue {
        let value = self.coeffs.iter().map(|(&k, &c)| c * Complex::from_polar(1.0, k as f64 * x)).sum();
        PointValue { value, error_bound: self.pointwise_tail() }
    }

    /// Bound on `sum_{|k| > cutoff} |a_k|`.
    pub fn pointwise_tail(&self) -> f64 {
        if self.is_exact() {
            0.0
        } else {
            self.envelope.map_or(f64::INFINITY, |e| e.l1_tail(self.cutoff))
        }
    }

    pub fn l2_norm(&self) -> Norm {
        l2_norm(self)
    }

    /// Coefficientwise comparison over the union of stored frequencies.
    pub fn approx_eq(&self, other: &Self, tol: Tolerance) -> bool {
        self.coeffs
            .keys()
            .chain(other.coeffs.keys())
            .all(|&k| tol.close(self.coeff(k), other.coeff(k)))
    }

    /// Largest coefficientwise difference over the union of stored frequencies.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .keys()
            .chain(other.coeffs.keys())
            .map(|&k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
    }

    /// Largest stored `|c_k|`.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// `(ik)^r`, computed exactly in the phase.
pub fn ik_power(k: Frequency, order: u32) -> Complex {
    if order == 0 {
        return Complex::ONE;
    }
    let magnitude = (k.unsigned_abs() as f64).powi(order as i32);
    let quarter_turns = if k >= 0 { order % 4 } else { (4 - order % 4) % 4 };
    match quarter_turns {
        0 => Complex::new(magnitude, 0.0),
        1 => Complex::new(0.0, magnitude),
        2 => Complex::new(-magnitude, 0.0),
        _ => Complex::new(0.0, -magnitude),
    }
}

/// `2 pi sum_k a_k conj(b_k)` over the shared stored frequencies.
pub fn inner_product(a: &TruncatedSpectrum, b: &TruncatedSpectrum) -> Complex {
    let (small, large, swapped) = if a.len() <= b.len() { (a, b, false) } else { (b, a, true) };
    let mut acc = Complex::ZERO;
    for (&k, &x) in &small.coeffs {
        if let Some(&y) = large.coeffs.get(&k) {
            acc += if swapped { y * x.conj() } else { x * y.conj() };
        }
    }
    acc * (2.0 * PI)
}

/// `||a||_2` with the uncertainty `sqrt(2 pi) * tail_bound`.
pub fn l2_norm(a: &TruncatedSpectrum) -> Norm {
    Norm {
        value: (2.0 * PI * a.energy()).sqrt(),
        uncertainty: (2.0 * PI).sqrt() * a.tail_bound,
    }
}

pub fn derivative(a: &TruncatedSpectrum, order: u32) -> Result<TruncatedSpectrum> {
    a.derivative(order)
}

pub fn even_part(a: &TruncatedSpectrum) -> TruncatedSpectrum {
    a.even_part()
}

pub fn odd_part(a: &TruncatedSpectrum) -> TruncatedSpectrum {
    a.odd_part()
}

pub fn reflect(a: &TruncatedSpectrum) -> TruncatedSpectrum {
    a.reflect()
}

pub fn shift(a: &TruncatedSpectrum, h: f64) -> TruncatedSpectrum {
    a.shift(h)
}

pub fn evaluate(a: &TruncatedSpectrum, x: f64) -> PointValue {
    a.evaluate(x)
}

/// Smoothness class of a periodic function, by its symmetry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SymmetryClass {
    /// Odd functions.
    H0,
    /// Even functions.
    H1,
    /// Odd functions whose shift by `pi/2` is even: odd sine harmonics.
    H2,
    /// Even functions whose shift by `pi/2` is odd: odd cosine harmonics.
    H2Even,
    /// No symmetry restriction.
    Any,
}

impl SymmetryClass {
    pub fn name(&self) -> &'static str {
        match self {
            SymmetryClass::H0 => "H0",
            SymmetryClass::H1 => "H1",
            SymmetryClass::H2 => "H2",
            SymmetryClass::H2Even => "H2Even",
            SymmetryClass::Any => "Any",
        }
    }

    /// Whether frequency `k` may carry a nonzero coefficient.
    pub fn admits(&self, k: Frequency) -> bool {
        match self {
            SymmetryClass::H0 => k != 0,
            SymmetryClass::H2 | SymmetryClass::H2Even => k.rem_euclid(2) == 1,
            SymmetryClass::H1 | SymmetryClass::Any => true,
        }
    }

    /// Sign relating `c_{-k}` to `c_k`, if the class fixes one.
    pub fn reflection_sign(&self) -> Option<f64> {
        match self {
            SymmetryClass::H0 | SymmetryClass::H2 => Some(-1.0),
            SymmetryClass::H1 | SymmetryClass::H2Even => Some(1.0),
            SymmetryClass::Any => None,
        }
    }

    /// Orthogonal projection of a spectrum onto the class.
    pub fn project(&self, a: &TruncatedSpectrum) -> TruncatedSpectrum {
        let sym = match self.reflection_sign() {
            Some(s) if s > 0.0 => a.even_part(),
            Some(_) => a.odd_part(),
            None => a.clone(),
        };
        let coeffs = sym.iter().filter(|&(k, _)| self.admits(k));
        let out = TruncatedSpectrum::from_coeffs(sym.cutoff, coeffs).expect("frequencies within cutoff");
        out.with_tail(sym.tail_bound, sym.envelope).expect("nonnegative tail")
    }

    /// Whether the stored coefficients satisfy the class symmetry within `tol`.
    pub fn contains(&self, a: &TruncatedSpectrum, tol: Tolerance) -> bool {
        let scale = a.max_abs();
        let tol = Tolerance::new(tol.relative, tol.absolute + tol.relative * scale);
        a.iter().all(|(k, c)| {
            let admissible = self.admits(k) || tol.close(c, Complex::ZERO);
            let symmetric = match self.reflection_sign() {
                Some(s) => tol.close(a.coeff(-k), c * s),
                None => true,
            };
            admissible && symmetric
        })
    }
}

/// Smoothness class tag: symmetry variant plus smoothness order `r >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionClassTag {
    pub variant: SymmetryClass,
    pub r: u32,
}

impl FunctionClassTag {
    pub fn new(variant: SymmetryClass, r: u32) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidParameter("smoothness order r must be at least 1".into()));
        }
        Ok(Self { variant, r })
    }
}
