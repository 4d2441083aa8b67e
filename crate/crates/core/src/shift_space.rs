//! Exponential bases of shift spaces and orthogonal projection onto them.
//!
//! For a generator `B` and `n >= 1`, the function
//! `Phi_l(x) = (1/2n) sum_j e^{i l j pi/n} B(x - j pi/n)` has Fourier coefficients
//! `c_{l+2n nu}(B)` on the residue class `l mod 2n` and zero elsewhere, so the
//! `Phi_l` for distinct classes are orthogonal.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{inner_product, Complex, Frequency, TruncatedSpectrum};
use crate::kernels::KernelSpec;
use crate::summation::CompensatedSum;

/// Which span of exponential basis functions is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpaceVariant {
    /// `{Phi_l}` for `l = 1-n ..= n`: all `2n` shifts.
    Full,
    /// `{Phi_l}` for `l = 1-n ..= n-1`: shifts with alternating coefficient sum zero.
    Cross,
    /// `{Phi_l}` for `l = 1-m ..= m-1`.
    CrossM(u32),
    /// Odd parts `{Phi^o_l}` for `l = 1..=m`; `m = 0` is the zero space.
    Sym0(u32),
    /// `Phi_0` and even parts `{Phi^e_l}` for `l = 1..m`.
    Sym1(u32),
    /// Odd parts `{Phi^o_{2l-1}}` for `l = 1..=m`.
    Sym2(u32),
    /// Even parts `{Phi^e_{2l-1}}` for `l = 1..=m`.
    Sym2Even(u32),
    /// Even parts `{Phi^e_l}` for `l = 1..=m`.
    EvenParts(u32),
}

impl fmt::Display for SpaceVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceVariant::Full => write!(f, "full"),
            SpaceVariant::Cross => write!(f, "cross"),
            SpaceVariant::CrossM(m) => write!(f, "cross({m})"),
            SpaceVariant::Sym0(m) => write!(f, "sym0({m})"),
            SpaceVariant::Sym1(m) => write!(f, "sym1({m})"),
            SpaceVariant::Sym2(m) => write!(f, "sym2({m})"),
            SpaceVariant::Sym2Even(m) => write!(f, "sym2even({m})"),
            SpaceVariant::EvenParts(m) => write!(f, "even_parts({m})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BasisKind {
    Phi,
    PhiEven,
    PhiOdd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisLabel {
    pub kind: BasisKind,
    pub l: i64,
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            BasisKind::Phi => "phi",
            BasisKind::PhiEven => "phi_even",
            BasisKind::PhiOdd => "phi_odd",
        };
        write!(f, "{name}[{}]", self.l)
    }
}

/// Generator, shift parameter `n` and variant.
#[derive(Debug, Clone)]
pub struct ShiftSpaceSpec {
    pub kernel: KernelSpec,
    pub n: u32,
    pub variant: SpaceVariant,
}

impl ShiftSpaceSpec {
    pub fn new(kernel: KernelSpec, n: u32, variant: SpaceVariant) -> Result<Self> {
        let spec = Self { kernel, n, variant };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        if n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        let bad = |what: &str| Err(Error::InvalidParameter(format!("{} requires {what} (n = {n})", self.variant)));
        match self.variant {
            SpaceVariant::Full | SpaceVariant::Cross => Ok(()),
            SpaceVariant::CrossM(m) | SpaceVariant::Sym1(m) if m == 0 || m > n => bad("1 <= m <= n"),
            SpaceVariant::Sym0(m) if m + 1 > n => bad("m + 1 <= n"),
            SpaceVariant::EvenParts(m) if m > n => bad("m <= n"),
            SpaceVariant::Sym2(m) | SpaceVariant::Sym2Even(m) if m == 0 || 2 * m + 1 > n => {
                bad("1 <= m and 2m + 1 <= n")
            }
            _ => Ok(()),
        }
    }

    /// Basis labels in the fixed output order: increasing `|l|`, then `l`.
    pub fn labels(&self) -> Vec<BasisLabel> {
        let n = self.n as i64;
        let phi = |l| BasisLabel { kind: BasisKind::Phi, l };
        let even = |l| BasisLabel { kind: BasisKind::PhiEven, l };
        let odd = |l| BasisLabel { kind: BasisKind::PhiOdd, l };
        let mut labels: Vec<BasisLabel> = match self.variant {
            SpaceVariant::Full => (1 - n..=n).map(phi).collect(),
            SpaceVariant::Cross => (1 - n..n).map(phi).collect(),
            SpaceVariant::CrossM(m) => (1 - m as i64..m as i64).map(phi).collect(),
            SpaceVariant::Sym0(m) => (1..=m as i64).map(odd).collect(),
            SpaceVariant::Sym1(m) => std::iter::once(phi(0)).chain((1..m as i64).map(even)).collect(),
            SpaceVariant::Sym2(m) => (1..=m as i64).map(|l| odd(2 * l - 1)).collect(),
            SpaceVariant::Sym2Even(m) => (1..=m as i64).map(|l| even(2 * l - 1)).collect(),
            SpaceVariant::EvenParts(m) => (1..=m as i64).map(even).collect(),
        };
        labels.sort_by_key(|b| (b.l.abs(), b.l, b.kind));
        labels
    }

    pub fn dimension(&self) -> usize {
        self.labels().len()
    }
}

/// One orthogonal basis function with its squared norm over `2 pi`.
#[derive(Debug, Clone)]
pub struct BasisElement {
    pub label: BasisLabel,
    pub spectrum: TruncatedSpectrum,
    /// `||element||^2 / (2 pi)` over the stored frequencies.
    pub d_norm: f64,
    /// Certified bound on the discarded part of `||element||^2 / (2 pi)`.
    pub d_tail: f64,
}

fn required_cutoff(n: u32, cutoff: i64) -> Result<()> {
    let required = 2 * n as i64;
    if cutoff < required {
        return Err(Error::TruncationTooSmall { cutoff, required });
    }
    Ok(())
}

/// Frequencies `t = l (mod 2n)` with `|t| <= cutoff`, in increasing order.
pub fn residue_class(n: u32, l: Frequency, cutoff: i64) -> impl Iterator<Item = Frequency> {
    let period = 2 * n as i64;
    let first = -cutoff + (l + cutoff).rem_euclid(period);
    (0..).map(move |j| first + j * period).take_while(move |&t| t <= cutoff)
}

fn class_spectrum(kernel: &KernelSpec, n: u32, l: Frequency, cutoff: i64) -> Result<(TruncatedSpectrum, f64)> {
    let coeffs = residue_class(n, l, cutoff).map(|t| (t, kernel.coeff(t)));
    let mass = kernel.class_tail_mass(n, l, cutoff)?;
    let envelope = if mass > 0.0 { kernel.envelope() } else { None };
    let spectrum = TruncatedSpectrum::from_coeffs(cutoff, coeffs)?.with_tail(mass.sqrt(), envelope)?;
    Ok((spectrum, mass))
}

fn element(label: BasisLabel, spectrum: TruncatedSpectrum, d_tail: f64) -> BasisElement {
    let d_norm = spectrum.iter().map(|(_, c)| c.norm_sqr()).collect::<CompensatedSum>().value();
    BasisElement { label, spectrum, d_norm, d_tail }
}

/// `Phi_l` truncated at `cutoff`.
pub fn phi(kernel: &KernelSpec, n: u32, l: Frequency, cutoff: i64) -> Result<BasisElement> {
    required_cutoff(n, cutoff)?;
    let (spectrum, mass) = class_spectrum(kernel, n, l, cutoff)?;
    Ok(element(BasisLabel { kind: BasisKind::Phi, l }, spectrum, mass))
}

/// Even part of `Phi_l`.
pub fn phi_even(kernel: &KernelSpec, n: u32, l: Frequency, cutoff: i64) -> Result<BasisElement> {
    let base = phi(kernel, n, l, cutoff)?;
    Ok(element(BasisLabel { kind: BasisKind::PhiEven, l }, base.spectrum.even_part(), base.d_tail))
}

/// Odd part of `Phi_l`.
pub fn phi_odd(kernel: &KernelSpec, n: u32, l: Frequency, cutoff: i64) -> Result<BasisElement> {
    let base = phi(kernel, n, l, cutoff)?;
    Ok(element(BasisLabel { kind: BasisKind::PhiOdd, l }, base.spectrum.odd_part(), base.d_tail))
}

pub fn basis_element(kernel: &KernelSpec, n: u32, label: BasisLabel, cutoff: i64) -> Result<BasisElement> {
    match label.kind {
        BasisKind::Phi => phi(kernel, n, label.l, cutoff),
        BasisKind::PhiEven => phi_even(kernel, n, label.l, cutoff),
        BasisKind::PhiOdd => phi_odd(kernel, n, label.l, cutoff),
    }
}

/// `D_l = sum_nu |c_{l+2n nu}|^2`, bracketed as `[sum, sum + tail]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DValue {
    pub sum: f64,
    pub tail: f64,
}

impl DValue {
    pub fn lower(&self) -> f64 {
        self.sum
    }

    pub fn upper(&self) -> f64 {
        self.sum + self.tail
    }

    pub fn contains(&self, value: f64, slack: f64) -> bool {
        value >= self.lower() - slack && value <= self.upper() + slack
    }
}

pub fn d_value(kernel: &KernelSpec, n: u32, l: Frequency, cutoff: i64) -> Result<DValue> {
    let e = phi(kernel, n, l, cutoff)?;
    Ok(DValue { sum: e.d_norm, tail: e.d_tail })
}

/// Orthogonal basis of a shift space at a fixed truncation.
#[derive(Debug, Clone)]
pub struct Basis {
    pub spec: ShiftSpaceSpec,
    pub cutoff: i64,
    pub elements: Vec<BasisElement>,
}

/// Relative size below which a basis element is treated as the zero function.
pub const DEGENERATE_THRESHOLD: f64 = 1e-20;

pub fn basis(space: &ShiftSpaceSpec, cutoff: i64) -> Result<Basis> {
    space.validate()?;
    required_cutoff(space.n, cutoff)?;
    let scale = space.kernel.scale(cutoff).powi(2);
    let mut elements = Vec::new();
    for label in space.labels() {
        let e = basis_element(&space.kernel, space.n, label, cutoff)?;
        if !(e.d_norm >= DEGENERATE_THRESHOLD * scale) || e.d_norm == 0.0 {
            return Err(Error::DegenerateBasis { label: label.to_string(), d_norm: e.d_norm });
        }
        elements.push(e);
    }
    Ok(Basis { spec: space.clone(), cutoff, elements })
}

/// Best approximation with a two-sided bound on the untruncated error.
#[derive(Debug, Clone)]
pub struct Projection {
    pub approximant: TruncatedSpectrum,
    /// Coefficient of each basis element, in basis order.
    pub coefficients: Vec<Complex>,
    /// `L2` distance from `f` to the truncated space.
    pub error: f64,
    /// Certified lower bound on the untruncated error.
    pub error_lower: f64,
    /// Certified upper bound on the untruncated error.
    pub error_upper: f64,
}

impl Projection {
    pub fn slack(&self) -> f64 {
        self.error_upper - self.error
    }
}

impl Basis {
    pub fn dimension(&self) -> usize {
        self.elements.len()
    }

    pub fn spectra(&self) -> Vec<TruncatedSpectrum> {
        self.elements.iter().map(|e| e.spectrum.clone()).collect()
    }

    /// Orthogonal projection of `f`; `f` must not carry frequencies beyond the basis cutoff.
    pub fn project(&self, f: &TruncatedSpectrum) -> Result<Projection> {
        if let Some(deg) = f.degree() {
            if deg > self.cutoff {
                return Err(Error::FrequencyOutOfRange { frequency: deg, cutoff: self.cutoff });
            }
        }
        let mut approximant = TruncatedSpectrum::zero(self.cutoff);
        let mut coefficients = Vec::with_capacity(self.elements.len());
        let mut coefficient_tail = 0.0;
        for e in &self.elements {
            let a = inner_product(f, &e.spectrum) / (2.0 * PI * e.d_norm);
            approximant = approximant.add_scaled(&e.spectrum, a);
            coefficient_tail += a.norm() * e.d_tail.sqrt();
            coefficients.push(a);
        }
        let residual = f.sub(&approximant);
        let energy: CompensatedSum = residual.iter().map(|(_, c)| c.norm_sqr()).collect();
        let error = (2.0 * PI * energy.value().max(0.0)).sqrt();
        let slack = (2.0 * PI).sqrt() * (f.tail_bound() + coefficient_tail);
        Ok(Projection {
            approximant,
            coefficients,
            error,
            error_lower: error,
            error_upper: (error * error + slack * slack).sqrt(),
        })
    }
}

pub fn project(f: &TruncatedSpectrum, space: &ShiftSpaceSpec, cutoff: i64) -> Result<Projection> {
    basis(space, cutoff)?.project(f)
}

/// Result of fitting `c_{-l-2nk} = gamma c_{l+2nk}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaOutcome {
    Found { gamma: Complex, residual: f64 },
    /// Both residue classes vanish; any nonzero gamma works and `1` is used.
    Arbitrary,
    NoneFound { residual: f64 },
}

impl GammaOutcome {
    pub fn gamma(&self) -> Option<Complex> {
        match self {
            GammaOutcome::Found { gamma, .. } => Some(*gamma),
            GammaOutcome::Arbitrary => Some(Complex::ONE),
            GammaOutcome::NoneFound { .. } => None,
        }
    }

    pub fn residual(&self) -> f64 {
        match self {
            GammaOutcome::Found { residual, .. } | GammaOutcome::NoneFound { residual } => *residual,
            GammaOutcome::Arbitrary => 0.0,
        }
    }
}

/// Least-squares `gamma_l` over the stored frequencies, accepted when the relative residual is at most `tol`.
pub fn gamma_symmetry(kernel: &KernelSpec, n: u32, l: Frequency, cutoff: i64, tol: f64) -> Result<GammaOutcome> {
    required_cutoff(n, cutoff)?;
    let mut cross = Complex::ZERO;
    let mut xx = CompensatedSum::new();
    let mut yy = CompensatedSum::new();
    let mut pairs = Vec::new();
    for t in residue_class(n, l, cutoff) {
        let x = kernel.coeff(t);
        let y = kernel.coeff(-t);
        cross += x.conj() * y;
        xx.add(x.norm_sqr());
        yy.add(y.norm_sqr());
        pairs.push((x, y));
    }
    let scale = kernel.scale(cutoff).powi(2);
    let floor = DEGENERATE_THRESHOLD * scale;
    let (xx, yy) = (xx.value(), yy.value());
    if xx <= floor && yy <= floor {
        return Ok(GammaOutcome::Arbitrary);
    }
    if xx <= floor || yy <= floor {
        return Ok(GammaOutcome::NoneFound { residual: 1.0 });
    }
    let gamma = cross / xx;
    let misfit: CompensatedSum = pairs.iter().map(|(x, y)| (y - gamma * x).norm_sqr()).collect();
    let residual = (misfit.value().max(0.0) / xx.max(yy)).sqrt();
    if residual <= tol {
        Ok(GammaOutcome::Found { gamma, residual })
    } else {
        Ok(GammaOutcome::NoneFound { residual })
    }
}
