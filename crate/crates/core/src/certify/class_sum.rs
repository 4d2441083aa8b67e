//! The signed residue-class sums
//! `S_l = sum_k |c_{l+2nk}|^2 / ((l+2nk)^{-2r} - M^{-2r})`.
//!
//! The `k = 0` term is positive and every other term is negative. When the
//! coefficients follow an exact power law on the class, the series is summed in
//! closed form by partial fractions; otherwise it is accumulated outward from
//! `k = 0` and the discarded terms are bounded by the class tail mass.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fourier::{Complex, Frequency};
use crate::kernels::KernelSpec;
use crate::shift_space::residue_class;
use crate::summation::CompensatedSum;

/// `S_l` divided by its positive `k = 0` term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedSum {
    pub normalized: f64,
    /// Bound on `|normalized - exact|` from truncation and rounding.
    pub slack: f64,
    /// Whether the closed form was used.
    pub closed_form: bool,
}

fn term(t: Frequency, coeff_sqr: f64, r: u32, big_m: f64) -> f64 {
    let denom = (t.abs() as f64).powi(-2 * r as i32) - big_m.powi(-2 * r as i32);
    coeff_sqr / denom
}

/// `F(t) = M^{2r} t^{2r-2p} / (M^{2r} - t^{2r})`, so that the term at `t` is `A F(t)`.
fn rational_term(t: f64, p: i32, r: i32, big_m: f64) -> f64 {
    let m2r = big_m.powi(2 * r);
    m2r * t.powi(2 * r - 2 * p) / (m2r - t.powi(2 * r))
}

/// Coefficients of the polynomial `P_j(c)` with `D^j [pi cot(pi z)] = P_j(cot(pi z))`.
fn cot_derivative_poly(order: usize) -> Vec<f64> {
    let mut poly = vec![0.0, PI];
    for _ in 0..order {
        // d/dz P(c) = P'(c) * (-pi (1 + c^2))
        let deriv: Vec<f64> = poly.iter().enumerate().skip(1).map(|(i, a)| a * i as f64).collect();
        let mut next = vec![0.0; deriv.len() + 2];
        for (i, a) in deriv.iter().enumerate() {
            next[i] -= PI * a;
            next[i + 2] -= PI * a;
        }
        poly = next;
    }
    poly
}

fn eval_poly(poly: &[f64], c: f64) -> (f64, f64) {
    let mut value = 0.0;
    let mut abs = 0.0;
    for a in poly.iter().rev() {
        value = value * c + a;
        abs = abs * c.abs() + a.abs();
    }
    (value, abs)
}

fn cot(z: Complex) -> Complex {
    z.cos() / z.sin()
}

/// `sum_{t = l (mod 2n)} t^{-j}` for `j >= 2` and `l` not divisible by `2n`.
fn class_power_sum(n: u32, l: Frequency, j: usize) -> (f64, f64) {
    let period = 2.0 * n as f64;
    let z = l as f64 / period;
    let c = 1.0 / (PI * z).tan();
    let (value, abs) = eval_poly(&cot_derivative_poly(j - 1), c);
    let factorial: f64 = (1..j).map(|i| i as f64).product();
    let sign = if (j - 1).is_multiple_of(2) { 1.0 } else { -1.0 };
    let scale = period.powi(-(j as i32)) / factorial;
    (sign * value * scale, abs * scale)
}

/// `sum_{t = l (mod 2n)} F(t)` in closed form; returns the value and a rounding scale.
fn rational_class_sum(n: u32, l: Frequency, p: i32, r: i32, big_m: f64) -> (f64, f64) {
    let period = 2.0 * n as f64;
    let m2r = big_m.powi(2 * r);
    let mut total = CompensatedSum::new();
    let mut extra_scale = 0.0;
    for q in 0..2 * r {
        let rho = Complex::from_polar(big_m, PI * q as f64 / r as f64);
        let residue = -m2r * rho.powi(1 - 2 * p) / (2.0 * r as f64);
        let series = cot((Complex::new(l as f64, 0.0) - rho) * (PI / period)) * (PI / period);
        let v = residue * series;
        total.add(v.re);
    }
    // principal part at t = 0 when F has a pole there
    let excess = p - r;
    let mut s = 0;
    while r * s < excess {
        let j = (2 * (excess - r * s)) as usize;
        let (value, abs) = class_power_sum(n, l, j);
        let weight = big_m.powi(-2 * r * s);
        total.add(weight * value);
        extra_scale += weight * abs;
        s += 1;
    }
    (total.value(), total.abs_total() + extra_scale)
}

/// Signed class sum for residue `l` with offset `M = big_m`, truncated at `cutoff` when no closed form applies.
pub fn signed_class_sum(
    kernel: &KernelSpec,
    n: u32,
    l: Frequency,
    r: u32,
    big_m: u32,
    cutoff: i64,
) -> Result<SignedSum> {
    if l.rem_euclid(2 * n as i64) == 0 {
        return Err(Error::InvalidParameter(format!("residue {l} is divisible by 2n = {}", 2 * n)));
    }
    let big_m = big_m as f64;
    let anchor = term(l, kernel.coeff(l).norm_sqr(), r, big_m);

    if let Some((a, p)) = kernel.power_law_class(n, l) {
        if p.fract() == 0.0 && p >= 1.0 {
            if a == 0.0 {
                return Ok(SignedSum { normalized: 0.0, slack: 0.0, closed_form: true });
            }
            let (sum, abs) = rational_class_sum(n, l, p as i32, r as i32, big_m);
            let lead = rational_term(l.abs() as f64, p as i32, r as i32, big_m);
            let rounding = 64.0 * f64::EPSILON * abs.max(lead);
            return Ok(SignedSum { normalized: sum / lead, slack: rounding / lead, closed_form: true });
        }
    }

    let mut sum = CompensatedSum::new();
    let mut terms: Vec<Frequency> = residue_class(n, l, cutoff).collect();
    terms.sort_by_key(|t| (t - l).abs());
    for t in terms {
        sum.add(term(t, kernel.coeff(t).norm_sqr(), r, big_m));
    }
    let mass = kernel.class_tail_mass(n, l, cutoff)?;
    let gap = big_m.powi(-2 * r as i32) - ((cutoff + 1) as f64).powi(-2 * r as i32);
    let tail = if mass > 0.0 { mass / gap } else { 0.0 };
    let norm = if anchor > 0.0 { anchor } else { kernel.scale(cutoff).powi(2) * big_m.powi(2 * r as i32) };
    if norm == 0.0 {
        return Ok(SignedSum { normalized: 0.0, slack: 0.0, closed_form: false });
    }
    Ok(SignedSum { normalized: sum.value() / norm, slack: (tail + sum.rounding_bound()) / norm, closed_form: false })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(a: f64, p: i32, n: u32, l: i64, r: i32, big_m: f64, k_max: i64) -> f64 {
        let mut s = CompensatedSum::new();
        for k in -k_max..=k_max {
            let t = (l + 2 * n as i64 * k) as f64;
            s.add(a * rational_term(t, p, r, big_m));
        }
        s.value()
    }

    #[test]
    fn closed_form_matches_brute_force() {
        for &(n, l, p, r, m) in &[
            (4u32, 1i64, 1i32, 1i32, 4.0f64),
            (4, 3, 1, 3, 4.0),
            (5, 2, 2, 1, 5.0),
            (5, 2, 3, 1, 5.0),
            (6, 1, 4, 2, 6.0),
            (7, 3, 5, 2, 7.0),
            (3, 1, 2, 2, 3.0),
            (8, 5, 3, 3, 8.0),
        ] {
            let (closed, _) = rational_class_sum(n, l, p, r, m);
            let direct = brute(1.0, p, n, l, r, m, 400_000);
            let lead = rational_term(l as f64, p, r, m);
            let tol = if p == 1 { 1e-5 } else { 1e-9 };
            assert!(((closed - direct) / lead).abs() < tol, "n={n} l={l} p={p} r={r}: {closed} vs {direct}");
        }
    }

    #[test]
    fn cot_polynomials_reproduce_hurwitz_sums() {
        // sum_k (z + k)^-2 = pi^2 / sin^2(pi z)
        let n = 3;
        let l = 1;
        let (v, _) = class_power_sum(n, l, 2);
        let z = l as f64 / 6.0;
        let want = (PI / (PI * z).sin()).powi(2) / 36.0;
        assert!((v - want).abs() < 1e-14 * want);
        let (v4, _) = class_power_sum(n, l, 4);
        let direct: f64 = (-20000i64..=20000).map(|k| ((l + 6 * k) as f64).powi(-4)).sum();
        assert!((v4 - direct).abs() < 1e-13 * direct);
    }

    #[test]
    fn degree_matching_decay_gives_zero_sum() {
        let k = KernelSpec::bspline(4, 0);
        for l in 1..4 {
            let s = signed_class_sum(&k, 4, l, 1, 4, 64).unwrap();
            assert!(s.closed_form);
            assert!(s.normalized.abs() < 1e-13, "{}", s.normalized);
        }
    }

    #[test]
    fn insufficient_decay_gives_negative_sum() {
        let k = KernelSpec::bspline(4, 0);
        let s = signed_class_sum(&k, 4, 1, 3, 4, 64).unwrap();
        assert!(s.normalized < -1.0);
    }

    #[test]
    fn truncated_route_brackets_closed_form() {
        let b = KernelSpec::bspline(5, 2);
        let w = KernelSpec::weighted(5, 2, crate::kernels::WeightSeq::Poisson { alpha: 1e-9 }).unwrap();
        for l in 1..5 {
            let exact = signed_class_sum(&b, 5, l, 2, 5, 64).unwrap();
            let approx = signed_class_sum(&w, 5, l, 2, 5, 2048).unwrap();
            assert!(!approx.closed_form);
            assert!((exact.normalized - approx.normalized).abs() <= approx.slack + 1e-6);
        }
    }
}
