//! Nonperiodic spline spaces on `[0, pi]` and `[0, pi/2]` realized as restrictions of
//! symmetric periodic shift spaces.

use std::f64::consts::PI;
use std::io::{Read, Write};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{ik_power, Complex, SymmetryClass, TruncatedSpectrum};
use crate::kernels::KernelSpec;
use crate::shift_space::{basis, ShiftSpaceSpec, SpaceVariant};

/// Segment family: 0 and 1 live on `[0, pi]` (odd and even extension), 2 on `[0, pi/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    Odd,
    Even,
    OddHarmonic,
}

impl Family {
    pub fn from_index(i: u32) -> Result<Self> {
        match i {
            0 => Ok(Family::Odd),
            1 => Ok(Family::Even),
            2 => Ok(Family::OddHarmonic),
            _ => Err(Error::InvalidParameter(format!("spline family must be 0, 1 or 2, got {i}"))),
        }
    }

    pub fn index(self) -> u32 {
        match self {
            Family::Odd => 0,
            Family::Even => 1,
            Family::OddHarmonic => 2,
        }
    }

    pub fn segment(self) -> f64 {
        match self {
            Family::OddHarmonic => PI / 2.0,
            _ => PI,
        }
    }

    pub fn class(self) -> SymmetryClass {
        match self {
            Family::Odd => SymmetryClass::H0,
            Family::Even => SymmetryClass::H1,
            Family::OddHarmonic => SymmetryClass::H2,
        }
    }

    /// Period of the generator grid, `N'`, for dimension parameter `n`.
    pub fn space_n(self, n: u32) -> u32 {
        match self {
            Family::Odd => n + 1,
            Family::Even => n,
            Family::OddHarmonic => 2 * n + 1,
        }
    }

    /// Ratio `||periodic|| / ||segment||` for a symmetric extension.
    pub fn transference_factor(self) -> f64 {
        match self {
            Family::OddHarmonic => 2.0,
            _ => 2f64.sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum KnotParity {
    /// Knots at multiples of `pi / N'`.
    Integer,
    /// Knots at odd multiples of `pi / (2 N')`.
    Half,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnotVector {
    pub knots: Vec<f64>,
    pub segment: f64,
}

impl KnotVector {
    fn new(knots: Vec<f64>, segment: f64) -> Self {
        debug_assert!(knots.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(knots.iter().all(|&t| t > 0.0 && t < segment));
        KnotVector { knots, segment }
    }
}

/// Parity giving the classical optimal spline space for degree `d`.
pub fn default_parity(family: Family, d: u32) -> KnotParity {
    let odd = d % 2 == 1;
    match (family, odd) {
        (Family::Odd, true) | (Family::Even, false) | (Family::OddHarmonic, true) => KnotParity::Integer,
        _ => KnotParity::Half,
    }
}

/// Knots of the given parity inside the family's segment.
pub fn knots_with_parity(family: Family, n: u32, parity: KnotParity) -> KnotVector {
    let np = family.space_n(n) as f64;
    let p = family.segment();
    let offset = match parity {
        KnotParity::Integer => 0.0,
        KnotParity::Half => 0.5,
    };
    let knots = (0..)
        .map(|k| (k as f64 + offset) * PI / np)
        .skip_while(|&t| t <= 0.0)
        .take_while(|&t| t < p - 1e-12)
        .collect();
    KnotVector::new(knots, p)
}

/// Knot vector of the classical optimal spline space of degree `d`.
pub fn knots_for(family: Family, d: u32, n: u32) -> KnotVector {
    knots_with_parity(family, n, default_parity(family, d))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SplineSpaceSpec {
    pub d: u32,
    pub family: Family,
    pub n: u32,
    pub knot_parity: KnotParity,
}

impl SplineSpaceSpec {
    pub fn new(d: u32, family: Family, n: u32, knot_parity: KnotParity) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("spline dimension parameter n must be at least 1".into()));
        }
        Ok(SplineSpaceSpec { d, family, n, knot_parity })
    }

    pub fn segment(&self) -> f64 {
        self.family.segment()
    }

    pub fn kernel(&self) -> KernelSpec {
        let np = self.family.space_n(self.n);
        match self.knot_parity {
            KnotParity::Integer => KernelSpec::bspline(np, self.d),
            KnotParity::Half => KernelSpec::shifted_bspline(np, self.d),
        }
    }

    pub fn space(&self) -> Result<ShiftSpaceSpec> {
        let variant = match self.family {
            Family::Odd => SpaceVariant::Sym0(self.n),
            Family::Even => SpaceVariant::Sym1(self.n),
            Family::OddHarmonic => SpaceVariant::Sym2(self.n),
        };
        ShiftSpaceSpec::new(self.kernel(), self.family.space_n(self.n), variant)
    }

    pub fn knots(&self) -> KnotVector {
        knots_with_parity(self.family, self.n, self.knot_parity)
    }

    /// Item number 1..=6 of the matching boundary-value spline space.
    pub fn q_item(&self) -> u32 {
        2 * self.family.index() + 1 + u32::from(self.knot_parity == KnotParity::Half)
    }

    /// Whether the restricted shift space is the whole boundary-value spline space.
    pub fn is_full_space(&self) -> bool {
        self.knot_parity == default_parity(self.family, self.d)
    }

    /// Boundary conditions of the spline space as `(point, derivative order)`.
    pub fn boundary_conditions(&self) -> Vec<(f64, u32)> {
        let half = self.knot_parity == KnotParity::Half;
        let orders = |parity: u32, inclusive: bool| {
            let top = if inclusive { self.d } else { self.d.saturating_sub(1) };
            let mut v: Vec<u32> = (0..=top).filter(|k| k % 2 == parity).collect();
            if !inclusive && self.d == 0 {
                v.clear();
            }
            v
        };
        match self.family {
            Family::Odd | Family::Even => {
                let parity = self.family.index();
                let ks = orders(parity, half);
                ks.iter().flat_map(|&k| [(0.0, k), (PI, k)]).collect()
            }
            Family::OddHarmonic => {
                let mut out: Vec<(f64, u32)> = orders(0, half).into_iter().map(|k| (0.0, k)).collect();
                out.extend(orders(1, !half).into_iter().map(|l| (PI / 2.0, l)));
                out
            }
        }
    }
}

/// All six boundary-value spline configurations for the given degree and dimension.
pub fn all_configurations(d: u32, n: u32) -> Vec<SplineSpaceSpec> {
    let mut out = Vec::new();
    for family in [Family::Odd, Family::Even, Family::OddHarmonic] {
        for parity in [KnotParity::Integer, KnotParity::Half] {
            out.push(SplineSpaceSpec { d, family, n, knot_parity: parity });
        }
    }
    out
}

/// Samples on a uniform grid covering `[0, P]` including both endpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction {
    pub grid: Vec<f64>,
    pub values: Vec<Complex>,
    pub grid_step: f64,
}

impl SampledFunction {
    /// Samples of `f` at `N + 1` points of `[0, segment]`.
    pub fn from_fn<F: Fn(f64) -> Complex>(segment: f64, intervals: usize, f: F) -> Self {
        let h = segment / intervals as f64;
        let grid: Vec<f64> = (0..=intervals).map(|j| j as f64 * h).collect();
        let values = grid.iter().map(|&x| f(x)).collect();
        SampledFunction { grid, values, grid_step: h }
    }

    pub fn intervals(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::InvalidParameter(format!("csv write failed: {e}"));
        w.write_record(["x", "value"]).map_err(io)?;
        for (x, v) in self.grid.iter().zip(&self.values) {
            w.write_record([format!("{x:.16e}"), format_complex(*v)]).map_err(io)?;
        }
        w.flush().map_err(|e| Error::InvalidParameter(format!("csv write failed: {e}")))?;
        Ok(())
    }

    /// Reads a two-column `x,value` table; the grid must be uniform and start at 0.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let mut grid = Vec::new();
        let mut values = Vec::new();
        for (line, record) in r.records().enumerate() {
            let record = record.map_err(|e| Error::InvalidParameter(format!("csv row {}: {e}", line + 2)))?;
            if record.len() != 2 {
                return Err(Error::InvalidParameter(format!("csv row {} needs two columns", line + 2)));
            }
            let x: f64 = record[0]
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("csv row {}: bad abscissa", line + 2)))?;
            grid.push(x);
            values.push(parse_complex(&record[1])?);
        }
        if grid.len() < 2 {
            return Err(Error::InvalidParameter("need at least two samples".into()));
        }
        let h = grid[1] - grid[0];
        let uniform = grid.iter().enumerate().all(|(j, &x)| (x - j as f64 * h).abs() <= 1e-9 * (1.0 + x.abs()));
        if grid[0].abs() > 1e-12 || !(h > 0.0) || !uniform {
            return Err(Error::InvalidParameter("grid must be uniform and start at 0".into()));
        }
        Ok(SampledFunction { grid, values, grid_step: h })
    }
}

/// Formats a complex number as `re+im i` with 17 significant digits.
pub fn format_complex(v: Complex) -> String {
    let sign = if v.im.is_sign_negative() { '-' } else { '+' };
    format!("{:.16e}{sign}{:.16e}i", v.re, v.im.abs())
}

/// Parses `re`, `re+im i`, `re-im i` or `im i`.
pub fn parse_complex(text: &str) -> Result<Complex> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::InvalidParameter(format!("cannot parse complex value {text:?}"));
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().map(|re| Complex::new(re, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&j| {
        (bytes[j] == b'+' || bytes[j] == b'-') && !matches!(bytes[j - 1], b'e' | b'E')
    });
    let (re, im) = match split {
        Some(j) => (&body[..j], &body[j..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        other => other,
    };
    Ok(Complex::new(re.parse().map_err(|_| bad())?, im.parse().map_err(|_| bad())?))
}

fn value_conditions_hold(u: &SampledFunction, family: Family) -> Result<()> {
    let tol = 1e-8 * u.max_abs() + 1e-12;
    let first = u.values[0];
    let last = *u.values.last().expect("nonempty samples");
    let check = |v: Complex, at: &str| {
        if v.norm() > tol {
            Err(Error::BoundaryViolation(format!("value {v} at {at} exceeds {tol:e}")))
        } else {
            Ok(())
        }
    };
    match family {
        Family::Odd => {
            check(first, "0")?;
            check(last, "pi")
        }
        Family::Even => Ok(()),
        Family::OddHarmonic => check(first, "0"),
    }
}

/// `2 pi`-periodic symmetric extension of segment samples, by discrete transform.
pub fn periodize(u: &SampledFunction, family: Family) -> Result<TruncatedSpectrum> {
    let n = u.intervals();
    if n == 0 {
        return Err(Error::InvalidParameter("need at least two samples".into()));
    }
    let expected = family.segment() / n as f64;
    if (u.grid_step - expected).abs() > 1e-9 * expected {
        return Err(Error::InvalidParameter(format!(
            "grid step {} does not cover [0, {}] with {n} intervals",
            u.grid_step,
            family.segment()
        )));
    }
    value_conditions_hold(u, family)?;
    // Samples on [0, pi] with step h.
    let half: Vec<Complex> = match family {
        Family::Odd | Family::Even => u.values.clone(),
        Family::OddHarmonic => {
            let mut v = u.values.clone();
            v.extend(u.values[..n].iter().rev());
            v
        }
    };
    let big_n = half.len() - 1;
    let m = 2 * big_n;
    let sign = if family == Family::Even { 1.0 } else { -1.0 };
    // One full period x_j = j h, j = 0..m.
    let mut period = vec![Complex::ZERO; m];
    period[..=big_n].copy_from_slice(&half[..=big_n]);
    for j in 1..big_n {
        period[m - j] = half[j] * sign;
    }
    if sign < 0.0 {
        period[0] = Complex::ZERO;
        period[big_n] = Complex::ZERO;
    }
    let h = 2.0 * PI / m as f64;
    let nyquist = big_n as i64;
    let coeff = |k: i64| -> Complex {
        period
            .iter()
            .enumerate()
            .map(|(j, &v)| v * Complex::from_polar(1.0, -(k * j as i64).rem_euclid(m as i64) as f64 * h))
            .sum::<Complex>()
            / m as f64
    };
    let mut coeffs = Vec::with_capacity(m + 1);
    for k in 1 - nyquist..nyquist {
        coeffs.push((k, coeff(k)));
    }
    let top = coeff(nyquist) * 0.5;
    coeffs.push((nyquist, top));
    coeffs.push((-nyquist, top));
    let spectrum = TruncatedSpectrum::from_coeffs(nyquist, coeffs)?;
    Ok(family.class().project(&spectrum))
}

/// Pointwise evaluation of a spectrum on `intervals + 1` points of the family's segment.
pub fn restrict(spectrum: &TruncatedSpectrum, family: Family, intervals: usize) -> SampledFunction {
    SampledFunction::from_fn(family.segment(), intervals, |x| spectrum.evaluate(x).value)
}

/// Spectra of the periodic symmetric basis realizing the spline space.
pub fn q_space_basis(spec: &SplineSpaceSpec, cutoff: i64) -> Result<Vec<TruncatedSpectrum>> {
    Ok(basis(&spec.space()?, cutoff)?.spectra())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCheck {
    pub point: f64,
    pub order: u32,
    /// Series value; `None` for orders implied by the symmetry of the extension.
    pub value: Option<f64>,
    pub bound: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryReport {
    pub checks: Vec<BoundaryCheck>,
    pub passed: bool,
}

fn endpoint_orders(family: Family, d: u32) -> Vec<(f64, u32)> {
    let below = |parity: u32| (0..d).filter(move |k| k % 2 == parity);
    match family {
        Family::Odd => below(0).flat_map(|k| [(0.0, k), (PI, k)]).collect(),
        Family::Even => below(1).flat_map(|k| [(0.0, k), (PI, k)]).collect(),
        Family::OddHarmonic => below(0).map(|k| (0.0, k)).chain(below(1).map(|l| (PI / 2.0, l))).collect(),
    }
}

/// Evaluates the endpoint derivatives of orders below `d` that the family's symmetry forces to vanish.
///
/// The symmetric pairs `c_k, c_{-k}` cancel at these points term by term, so the
/// truncated tail contributes nothing and the test is on the stored series alone.
pub fn verify_boundary(spectrum: &TruncatedSpectrum, family: Family, d: u32, tol: f64) -> Result<BoundaryReport> {
    let mut checks = Vec::new();
    for (point, order) in endpoint_orders(family, d) {
        let ds = spectrum.derivative(order)?;
        let scale: f64 = ds.iter().map(|(_, c)| c.norm()).sum();
        let value = ds.evaluate(point).value.norm();
        let bound = tol * scale.max(f64::MIN_POSITIVE);
        checks.push(BoundaryCheck { point, order, value: Some(value), bound, passed: value <= bound });
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(BoundaryReport { checks, passed })
}

/// Boundary report for a spline space, including conditions implied by symmetry.
pub fn verify_space_boundary(spec: &SplineSpaceSpec, cutoff: i64, tol: f64) -> Result<BoundaryReport> {
    let mut checks = Vec::new();
    for s in q_space_basis(spec, cutoff)? {
        checks.extend(verify_boundary(&s, spec.family, spec.d, tol)?.checks);
    }
    for (point, order) in spec.boundary_conditions() {
        if order >= spec.d {
            checks.push(BoundaryCheck { point, order, value: None, bound: 0.0, passed: true });
        }
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(BoundaryReport { checks, passed })
}

/// Singular values above this, after column normalization, count toward the rank.
pub const RANK_THRESHOLD: f64 = 1e-8;

fn numerical_rank(mut m: DMatrix<Complex>, threshold: f64) -> usize {
    for mut col in m.column_iter_mut() {
        let norm = col.norm();
        if norm > 0.0 {
            col /= Complex::new(norm, 0.0);
        }
    }
    m.singular_values().iter().filter(|&&s| s > threshold).count()
}

/// Rank of the restricted basis sampled on `points` uniform points of the segment.
pub fn dimension_check(spec: &SplineSpaceSpec, points: usize, cutoff: i64) -> Result<usize> {
    let points = points.max(4 * (spec.n + spec.d) as usize + 1);
    let basis = q_space_basis(spec, cutoff)?;
    let h = spec.segment() / (points - 1) as f64;
    let m = DMatrix::from_fn(points, basis.len(), |i, j| basis[j].evaluate(i as f64 * h).value);
    Ok(numerical_rank(m, RANK_THRESHOLD))
}

/// Dimension of the boundary-value spline space, from truncated powers and the constraint rank.
pub fn q_dimension(spec: &SplineSpaceSpec) -> usize {
    let d = spec.d as i32;
    let knots = spec.knots().knots;
    let falling = |j: i32, k: i32| -> f64 { ((j - k + 1)..=j).map(f64::from).product() };
    // Truncated-power basis: x^j for j <= d, then (x - t)_+^d per knot.
    let deriv = |col: usize, x: f64, k: i32| -> f64 {
        if col <= d as usize {
            let j = col as i32;
            if k > j {
                0.0
            } else {
                falling(j, k) * x.powi(j - k)
            }
        } else {
            let t = knots[col - d as usize - 1];
            if k > d || x <= t {
                0.0
            } else {
                falling(d, k) * (x - t).powi(d - k)
            }
        }
    };
    let cols = d as usize + 1 + knots.len();
    let rows = spec.boundary_conditions();
    if rows.is_empty() {
        return cols;
    }
    let m = DMatrix::from_fn(rows.len(), cols, |i, j| {
        let (x, k) = rows[i];
        Complex::new(deriv(j, x, k as i32), 0.0)
    });
    // Row scaling keeps derivative orders comparable.
    let mut m = m.transpose();
    for mut col in m.column_iter_mut() {
        let norm = col.norm();
        if norm > 0.0 {
            col /= Complex::new(norm, 0.0);
        }
    }
    let rank = m.singular_values().iter().filter(|&&s| s > 1e-10).count();
    cols - rank
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnotReport {
    pub expected: Vec<f64>,
    pub detected: Vec<f64>,
    /// Detected jumps away from every expected knot.
    pub spurious: Vec<f64>,
    /// Expected knots no basis element jumps at. Small or non-matching parity spaces can
    /// be smooth across a knot (for one shift per period the space is the constants).
    pub missing: Vec<f64>,
    pub resolution: f64,
    pub passed: bool,
}

/// Size of a jump in `s^(d)`, relative to `max |s^(d)|`, that counts as a knot.
pub const JUMP_THRESHOLD: f64 = 1e-3;

/// Locates jumps of `s^(d)` of each restricted basis element on a grid whose midpoints hit every candidate knot.
pub fn detect_knots(spec: &SplineSpaceSpec) -> Result<KnotReport> {
    let np = spec.family.space_n(spec.n) as f64;
    let h = PI / (32.0 * np);
    let cutoff = 1024 * np as i64;
    let sigma = h / 8.0;
    let points = (spec.segment() / h).round() as usize;
    let basis = q_space_basis(spec, cutoff)?;
    let expected = spec.knots().knots;
    let mut detected: Vec<f64> = Vec::new();
    for s in &basis {
        let windowed: Vec<(f64, Complex)> = s
            .iter()
            .map(|(k, c)| (k as f64, c * ik_power(k, spec.d) * (-0.5 * (sigma * k as f64).powi(2)).exp()))
            .collect();
        let g: Vec<Complex> = (0..points)
            .map(|j| {
                let x = (j as f64 + 0.5) * h;
                windowed.iter().map(|&(k, c)| c * Complex::from_polar(1.0, k * x)).sum()
            })
            .collect();
        let jumps: Vec<f64> = g.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
        let level = g.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (j, &jump) in jumps.iter().enumerate() {
            if jump > JUMP_THRESHOLD * level {
                detected.push((j + 1) as f64 * h);
            }
        }
    }
    detected.sort_by(f64::total_cmp);
    detected.dedup_by(|a, b| (*a - *b).abs() < h / 2.0);
    let near = |x: f64, set: &[f64]| set.iter().any(|&t| (t - x).abs() < h / 2.0);
    let spurious: Vec<f64> = detected.iter().copied().filter(|&x| !near(x, &expected)).collect();
    let missing: Vec<f64> = expected.iter().copied().filter(|&t| !near(t, &detected)).collect();
    let passed = spurious.is_empty();
    Ok(KnotReport { expected, detected, spurious, missing, resolution: h, passed })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplineReport {
    pub spec: SplineSpaceSpec,
    pub q_item: u32,
    pub rank: usize,
    pub q_dimension: usize,
    /// Whether the realized space is all of the boundary-value spline space.
    pub full_space: bool,
    pub boundary: BoundaryReport,
    pub knots: KnotReport,
    pub passed: bool,
}

/// Dimension, boundary and knot checks for one spline configuration.
pub fn verify_spline_space(spec: &SplineSpaceSpec, tol: f64) -> Result<SplineReport> {
    let cutoff = 512 * spec.n as i64;
    let rank = dimension_check(spec, 0, cutoff)?;
    let q_dim = q_dimension(spec);
    let boundary = verify_space_boundary(spec, cutoff, tol)?;
    let knots = detect_knots(spec)?;
    let full_space = spec.is_full_space();
    let expected_q = if full_space { spec.n as usize } else { spec.n as usize + 1 };
    let passed = rank == spec.n as usize && q_dim == expected_q && boundary.passed && knots.passed;
    Ok(SplineReport {
        spec: *spec,
        q_item: spec.q_item(),
        rank,
        q_dimension: q_dim,
        full_space,
        boundary,
        knots,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::Tolerance;

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn knot_tables() {
        assert!(close(&knots_for(Family::Odd, 3, 3).knots, &[PI / 4.0, PI / 2.0, 3.0 * PI / 4.0]));
        assert!(close(&knots_for(Family::Even, 3, 2).knots, &[PI / 4.0, 3.0 * PI / 4.0]));
        assert!(close(&knots_for(Family::OddHarmonic, 3, 2).knots, &[PI / 5.0, 2.0 * PI / 5.0]));
        assert!(close(&knots_for(Family::Odd, 2, 2).knots, &[PI / 6.0, PI / 2.0, 5.0 * PI / 6.0]));
        assert!(close(&knots_for(Family::OddHarmonic, 2, 2).knots, &[PI / 10.0, 3.0 * PI / 10.0]));
        assert_eq!(knots_for(Family::Even, 2, 4).knots.len(), 3);
    }

    #[test]
    fn periodize_reproduces_trigonometric_samples() {
        let sin = SampledFunction::from_fn(PI, 32, |x| Complex::new(x.sin(), 0.0));
        let s = periodize(&sin, Family::Odd).unwrap();
        assert!(s.approx_eq(&TruncatedSpectrum::sine(32, 1).unwrap(), Tolerance::new(1e-12, 1e-14)));
        let cos = SampledFunction::from_fn(PI, 32, |x| Complex::new(x.cos(), 0.0));
        let c = periodize(&cos, Family::Even).unwrap();
        assert!(c.approx_eq(&TruncatedSpectrum::cosine(32, 1).unwrap(), Tolerance::new(1e-12, 1e-14)));
        let quarter = SampledFunction::from_fn(PI / 2.0, 16, |x| Complex::new(x.sin(), 0.0));
        let q = periodize(&quarter, Family::OddHarmonic).unwrap();
        assert!(q.approx_eq(&TruncatedSpectrum::sine(32, 1).unwrap(), Tolerance::new(1e-12, 1e-14)));
        for (u, f, s) in [(sin, Family::Odd, s), (cos, Family::Even, c), (quarter, Family::OddHarmonic, q)] {
            let back = restrict(&s, f, u.intervals());
            for (a, b) in back.values.iter().zip(&u.values) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn value_conditions_are_enforced() {
        let cos = SampledFunction::from_fn(PI, 16, |x| Complex::new(x.cos(), 0.0));
        assert!(matches!(periodize(&cos, Family::Odd), Err(Error::BoundaryViolation(_))));
        assert!(matches!(periodize(&cos, Family::OddHarmonic), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn complex_text_round_trip() {
        for v in [Complex::new(1.5, -0.25), Complex::new(-3e-20, 4e10), Complex::new(0.0, -0.0)] {
            assert_eq!(parse_complex(&format_complex(v)).unwrap(), v);
        }
        assert_eq!(parse_complex("2").unwrap(), Complex::new(2.0, 0.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex::new(0.0, -1.0));
        assert_eq!(parse_complex("1e-3-2.5e+2i").unwrap(), Complex::new(1e-3, -250.0));
        assert!(parse_complex("x+yi").is_err());
    }

    #[test]
    fn csv_round_trip() {
        let u = SampledFunction::from_fn(PI, 8, |x| Complex::new(x.sin(), x.cos()));
        let mut buf = Vec::new();
        u.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf.clone()).unwrap().starts_with("x,value\n"));
        let back = SampledFunction::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.values, u.values);
    }

    #[test]
    fn dimension_table() {
        for (i, d, parity, n) in [(0, 3, KnotParity::Integer, 4), (1, 2, KnotParity::Integer, 4), (2, 4, KnotParity::Half, 3)] {
            let spec = SplineSpaceSpec::new(d, Family::from_index(i).unwrap(), n, parity).unwrap();
            assert_eq!(dimension_check(&spec, 0, 512 * n as i64).unwrap(), n as usize);
            assert_eq!(q_dimension(&spec), n as usize);
        }
        let proper = SplineSpaceSpec::new(2, Family::Odd, 4, KnotParity::Integer).unwrap();
        assert_eq!(q_dimension(&proper), 5);
        assert!(!proper.is_full_space());
    }

    #[test]
    fn boundary_of_basis_elements() {
        let spec = SplineSpaceSpec::new(3, Family::OddHarmonic, 2, KnotParity::Integer).unwrap();
        let report = verify_space_boundary(&spec, 1024, 1e-8).unwrap();
        assert!(report.passed, "{report:?}");
        assert!(report.checks.iter().any(|c| c.order == 1 && c.point == PI / 2.0));
    }

    #[test]
    fn knots_are_found_where_expected() {
        for spec in all_configurations(2, 3) {
            let report = detect_knots(&spec).unwrap();
            assert!(report.passed && report.missing.is_empty(), "{spec:?}: {report:?}");
        }
    }

    #[test]
    fn single_shift_space_has_no_interior_knot() {
        let spec = SplineSpaceSpec::new(1, Family::Even, 1, KnotParity::Half).unwrap();
        let report = detect_knots(&spec).unwrap();
        assert!(report.passed && report.detected.is_empty());
        assert_eq!(report.missing, vec![PI / 2.0]);
    }

    #[test]
    fn q_items_are_numbered_in_order() {
        let items: Vec<u32> = all_configurations(1, 2).iter().map(|s| s.q_item()).collect();
        assert_eq!(items, vec![1, 2, 3, 4, 5, 6]);
    }
}
