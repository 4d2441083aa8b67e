//! Three-valued verdicts for the coefficient conditions that make a shift space
//! extremal, and empirical checks of the resulting Jackson-type inequalities.

mod class_sum;
pub mod jackson;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::Frequency;
use crate::kernels::KernelSpec;
use crate::shift_space::{gamma_symmetry, GammaOutcome};

pub use class_sum::{signed_class_sum, SignedSum};
pub use jackson::{
    derived_space, random_class_member, verify_corollaries_234, verify_jackson, witness, CorollaryReport,
    CorollarySample, JacksonReport, JacksonSample,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Inconclusive,
    Fail,
}

impl Verdict {
    /// Pass when `margin > slack`, fail when `margin < -slack`, inconclusive otherwise.
    pub fn from_margin(margin: f64, slack: f64) -> Self {
        if margin > slack {
            Verdict::Pass
        } else if margin < -slack {
            Verdict::Fail
        } else {
            Verdict::Inconclusive
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Fail => "fail",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which set of coefficient conditions a report certifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    /// `E(f, S^x_{B,n,m}) <= m^{-r} ||f^(r)||` for every `f`.
    Cross,
    /// The same inequality for zero-mean `f`.
    CrossZeroMean,
    /// Odd functions against the odd-part space, bound `(m+1)^{-r}`.
    Odd,
    /// Even functions against `Phi_0` and even parts, bound `m^{-r}`.
    Even,
    /// Odd functions with odd harmonics only, bound `(2m+1)^{-r}`.
    OddHarmonic,
    /// The weighted monotone decay condition, sufficient for the signed sums.
    Decay,
}

impl Theorem {
    pub fn id(&self) -> &'static str {
        match self {
            Theorem::Cross => "theorem1",
            Theorem::CrossZeroMean => "corollary1",
            Theorem::Odd => "theorem2",
            Theorem::Even => "theorem3",
            Theorem::OddHarmonic => "theorem4",
            Theorem::Decay => "decay",
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionItem {
    pub condition: String,
    pub theorem: Theorem,
    pub l: Option<i64>,
    pub verdict: Verdict,
    pub margin: f64,
    pub slack: f64,
}

impl ConditionItem {
    pub fn new(condition: &str, theorem: Theorem, l: Option<i64>, margin: f64, slack: f64) -> Self {
        Self {
            condition: condition.to_string(),
            theorem,
            l,
            verdict: Verdict::from_margin(margin, slack),
            margin,
            slack,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub theorem: Theorem,
    pub items: Vec<ConditionItem>,
    pub overall: Verdict,
}

impl ConditionReport {
    pub fn new(theorem: Theorem, items: Vec<ConditionItem>) -> Self {
        let overall = items.iter().map(|i| i.verdict).max().unwrap_or(Verdict::Pass);
        Self { theorem, items, overall }
    }

    pub fn passed(&self) -> bool {
        self.overall == Verdict::Pass
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConditionItem> {
        self.items.iter().filter(|i| i.verdict == Verdict::Fail)
    }

    /// Items for one condition, in report order.
    pub fn condition<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a ConditionItem> + 'a {
        self.items.iter().filter(move |i| i.condition == id)
    }
}

struct Checker<'a> {
    kernel: &'a KernelSpec,
    n: u32,
    r: u32,
    cutoff: i64,
    tol: f64,
    scale: f64,
    theorem: Theorem,
    items: Vec<ConditionItem>,
}

impl<'a> Checker<'a> {
    fn new(kernel: &'a KernelSpec, n: u32, r: u32, cutoff: i64, tol: f64, theorem: Theorem) -> Result<Self> {
        if n == 0 || r == 0 {
            return Err(Error::InvalidParameter("n and r must be at least 1".into()));
        }
        if !(tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tolerance {tol} must be positive")));
        }
        let required = 2 * n as i64;
        if cutoff < required {
            return Err(Error::TruncationTooSmall { cutoff, required });
        }
        let scale = kernel.scale(cutoff);
        if scale == 0.0 {
            return Err(Error::InvalidParameter(format!("generator {kernel} vanishes identically")));
        }
        Ok(Self { kernel, n, r, cutoff, tol, scale, theorem, items: Vec::new() })
    }

    fn push(&mut self, condition: &str, l: Option<i64>, margin: f64, slack: f64) {
        self.items.push(ConditionItem::new(condition, self.theorem, l, margin, slack));
    }

    fn nonzero(&mut self, ls: impl IntoIterator<Item = Frequency>) {
        for l in ls {
            let margin = self.kernel.coeff(l).norm() / self.scale - self.tol;
            self.push("nonzero", Some(l), margin, 0.0);
        }
    }

    /// Largest possible `|c_t|` over the discarded frequencies `t = 0 (mod 2n)`, relative to the scale.
    fn zero_class_tail(&self) -> f64 {
        if self.kernel.support_bound().is_some_and(|d| d <= self.cutoff) {
            return 0.0;
        }
        if self.kernel.class_vanishes(self.n, 0) {
            return 0.0;
        }
        self.kernel.envelope().map_or(f64::INFINITY, |e| e.weighted_sup(0.0, self.cutoff)) / self.scale
    }

    fn multiples(&self) -> impl Iterator<Item = i64> {
        let period = 2 * self.n as i64;
        (1..=self.cutoff / period).map(move |nu| nu * period)
    }

    fn vanishing_multiples(&mut self) {
        let worst = self
            .multiples()
            .flat_map(|t| [t, -t])
            .map(|t| self.kernel.coeff(t).norm())
            .fold(0.0, f64::max);
        let margin = self.tol - worst / self.scale;
        let slack = if margin < 0.0 { 0.0 } else { self.zero_class_tail() };
        self.push("vanishing_multiples", None, margin, slack);
    }

    fn symmetric_multiples(&mut self) {
        let worst = self
            .multiples()
            .map(|t| (self.kernel.coeff(t) - self.kernel.coeff(-t)).norm())
            .fold(0.0, f64::max);
        let margin = self.tol - worst / self.scale;
        let slack = if margin < 0.0 { 0.0 } else { 2.0 * self.zero_class_tail() };
        self.push("symmetric_multiples", None, margin, slack);
    }

    fn gamma(&mut self, ls: impl IntoIterator<Item = Frequency>) -> Result<()> {
        for l in ls {
            let outcome = gamma_symmetry(self.kernel, self.n, l, self.cutoff, self.tol)?;
            let margin = match outcome {
                GammaOutcome::Arbitrary => self.tol,
                GammaOutcome::Found { residual, .. } => self.tol - residual,
                GammaOutcome::NoneFound { residual } => (self.tol - residual).min(-self.tol),
            };
            self.push("gamma", Some(l), margin, 0.0);
        }
        Ok(())
    }

    fn signed_sums(&mut self, ls: impl IntoIterator<Item = Frequency>, big_m: u32) -> Result<()> {
        for l in ls {
            let s = signed_class_sum(self.kernel, self.n, l, self.r, big_m, self.cutoff)?;
            self.push("signed_sum", Some(l), s.normalized + self.tol, s.slack);
        }
        Ok(())
    }

    fn finish(self) -> ConditionReport {
        ConditionReport::new(self.theorem, self.items)
    }
}

fn symmetric_range(lo: i64, hi: i64) -> Vec<i64> {
    let mut out = Vec::new();
    for a in lo..=hi {
        if a == 0 {
            out.push(0);
        } else {
            out.push(-a);
            out.push(a);
        }
    }
    out
}

fn require(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter(what.to_string()))
    }
}

/// Conditions for `E(f, S^x_{B,n,m}) <= m^{-r} ||f^(r)||` on all of `W_2^(r)`.
pub fn check_theorem1(kernel: &KernelSpec, n: u32, m: u32, r: u32, cutoff: i64, tol: f64) -> Result<ConditionReport> {
    require(m >= 1 && m <= n, "requires 1 <= m <= n")?;
    let mut c = Checker::new(kernel, n, r, cutoff, tol, Theorem::Cross)?;
    c.nonzero(symmetric_range(0, m as i64 - 1));
    c.vanishing_multiples();
    c.signed_sums(symmetric_range(1, m as i64 - 1), m)?;
    Ok(c.finish())
}

/// Theorem 1 conditions without the multiples of `2n` and without `c_0 != 0`: the zero-mean version.
pub fn check_corollary1(kernel: &KernelSpec, n: u32, m: u32, r: u32, cutoff: i64, tol: f64) -> Result<ConditionReport> {
    require(m >= 1 && m <= n, "requires 1 <= m <= n")?;
    let mut c = Checker::new(kernel, n, r, cutoff, tol, Theorem::CrossZeroMean)?;
    c.nonzero(symmetric_range(1, m as i64 - 1));
    c.signed_sums(symmetric_range(1, m as i64 - 1), m)?;
    Ok(c.finish())
}

/// Conditions making the odd-part space extremal for odd functions.
pub fn check_theorem2(kernel: &KernelSpec, n: u32, m: u32, r: u32, cutoff: i64, tol: f64) -> Result<ConditionReport> {
    require(m >= 1 && m < n, "requires 1 <= m and m + 1 <= n")?;
    let mut c = Checker::new(kernel, n, r, cutoff, tol, Theorem::Odd)?;
    c.gamma(1..=m as i64)?;
    c.symmetric_multiples();
    c.nonzero(1..=m as i64);
    c.signed_sums(1..=m as i64, m + 1)?;
    Ok(c.finish())
}

/// Conditions making `Phi_0` plus even parts extremal for even functions.
pub fn check_theorem3(kernel: &KernelSpec, n: u32, m: u32, r: u32, cutoff: i64, tol: f64) -> Result<ConditionReport> {
    require(m >= 1 && m <= n, "requires 1 <= m <= n")?;
    let mut c = Checker::new(kernel, n, r, cutoff, tol, Theorem::Even)?;
    c.gamma(1..m as i64)?;
    c.nonzero(0..m as i64);
    c.vanishing_multiples();
    c.signed_sums(1..m as i64, m)?;
    Ok(c.finish())
}

/// Conditions making the odd-harmonic odd-part space extremal.
pub fn check_theorem4(kernel: &KernelSpec, n: u32, m: u32, r: u32, cutoff: i64, tol: f64) -> Result<ConditionReport> {
    require(m >= 1 && 2 * m < n, "requires 1 <= m and 2m + 1 <= n")?;
    let mut c = Checker::new(kernel, n, r, cutoff, tol, Theorem::OddHarmonic)?;
    c.gamma(1..=2 * m as i64)?;
    c.symmetric_multiples();
    c.nonzero(1..=2 * m as i64);
    c.signed_sums(1..=2 * m as i64, 2 * m + 1)?;
    Ok(c.finish())
}

/// `|l+2nk|^r |c_{l+2nk}| <= |l|^r |c_l|` for `|l| in [1, m-1]`, every stored `k`, plus the tail.
pub fn check_sufficient_decay(kernel: &KernelSpec, n: u32, m: u32, r: u32, cutoff: i64, tol: f64) -> Result<ConditionReport> {
    require(m >= 1 && m <= n, "requires 1 <= m <= n")?;
    let mut c = Checker::new(kernel, n, r, cutoff, tol, Theorem::Decay)?;
    let weighted = |t: i64| (t.abs() as f64).powi(r as i32) * kernel.coeff(t).norm();
    for l in symmetric_range(1, m as i64 - 1) {
        let reference = weighted(l);
        let stored = crate::shift_space::residue_class(n, l, cutoff)
            .filter(|&t| t != l)
            .map(weighted)
            .fold(0.0, f64::max);
        let tail_sup = kernel.class_weighted_tail_sup(n, l, r, cutoff);
        if reference == 0.0 {
            let margin = if stored == 0.0 && tail_sup == 0.0 { tol } else { -1.0 };
            c.push("weighted_decay", Some(l), margin, 0.0);
            continue;
        }
        let margin = (reference * (1.0 + tol) - stored) / reference;
        let slack = if margin < 0.0 { 0.0 } else { (tail_sup - stored).max(0.0) / reference };
        c.push("weighted_decay", Some(l), margin, slack);
    }
    Ok(c.finish())
}

/// Dispatch by theorem.
pub fn check(theorem: Theorem, kernel: &KernelSpec, n: u32, m: u32, r: u32, cutoff: i64, tol: f64) -> Result<ConditionReport> {
    match theorem {
        Theorem::Cross => check_theorem1(kernel, n, m, r, cutoff, tol),
        Theorem::CrossZeroMean => check_corollary1(kernel, n, m, r, cutoff, tol),
        Theorem::Odd => check_theorem2(kernel, n, m, r, cutoff, tol),
        Theorem::Even => check_theorem3(kernel, n, m, r, cutoff, tol),
        Theorem::OddHarmonic => check_theorem4(kernel, n, m, r, cutoff, tol),
        Theorem::Decay => check_sufficient_decay(kernel, n, m, r, cutoff, tol),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::Complex;
    use crate::kernels::WeightSeq;

    const TOL: f64 = 1e-12;

    #[test]
    fn verdict_rule() {
        assert_eq!(Verdict::from_margin(1.0, 0.5), Verdict::Pass);
        assert_eq!(Verdict::from_margin(-1.0, 0.5), Verdict::Fail);
        assert_eq!(Verdict::from_margin(0.2, 0.5), Verdict::Inconclusive);
        assert_eq!(Verdict::from_margin(0.0, 0.0), Verdict::Inconclusive);
        let report = ConditionReport::new(
            Theorem::Cross,
            vec![ConditionItem::new("a", Theorem::Cross, None, 1.0, 0.0), ConditionItem::new("b", Theorem::Cross, None, 0.1, 0.2)],
        );
        assert_eq!(report.overall, Verdict::Inconclusive);
    }

    #[test]
    fn dirichlet_passes_everything() {
        for n in 2..=7u32 {
            let d = KernelSpec::dirichlet(n - 1);
            for r in 1..=3 {
                for m in 1..=n {
                    assert!(check_theorem1(&d, n, m, r, 64, TOL).unwrap().passed());
                    assert!(check_corollary1(&d, n, m, r, 64, TOL).unwrap().passed());
                    assert!(check_theorem3(&d, n, m, r, 64, TOL).unwrap().passed());
                }
                for m in 1..n {
                    assert!(check_theorem2(&d, n, m, r, 64, TOL).unwrap().passed());
                }
                for m in (1..).take_while(|m| 2 * m < n) {
                    assert!(check_theorem4(&d, n, m, r, 64, TOL).unwrap().passed());
                }
            }
        }
    }

    #[test]
    fn bsplines_with_enough_smoothness_pass() {
        for n in 2..=6u32 {
            for r in 1..=3u32 {
                for mu in r - 1..=r + 1 {
                    for kernel in [KernelSpec::bspline(n, mu), KernelSpec::shifted_bspline(n, mu)] {
                        let t1 = check_theorem1(&kernel, n, n, r, 256, TOL).unwrap();
                        assert!(t1.passed(), "{kernel} r={r}: {:?}", t1.items);
                        assert!(check_theorem2(&kernel, n, n - 1, r, 256, TOL).unwrap().passed());
                        assert!(check_theorem3(&kernel, n, n, r, 256, TOL).unwrap().passed());
                        assert!(check_sufficient_decay(&kernel, n, n, r, 256, TOL).unwrap().passed());
                    }
                }
            }
        }
    }

    #[test]
    fn weighted_bsplines_pass() {
        let w = KernelSpec::weighted(4, 2, WeightSeq::Poisson { alpha: 0.3 }).unwrap();
        let d = check_sufficient_decay(&w, 4, 4, 3, 512, TOL).unwrap();
        assert!(d.passed(), "{:?}", d.items);
        assert!(check_theorem1(&w, 4, 4, 3, 512, TOL).unwrap().passed());
        assert!(check_theorem3(&w, 4, 4, 3, 512, TOL).unwrap().passed());
    }

    #[test]
    fn insufficient_smoothness_fails() {
        let k = KernelSpec::bspline(4, 0);
        let decay = check_sufficient_decay(&k, 4, 4, 3, 256, TOL).unwrap();
        assert_eq!(decay.overall, Verdict::Fail);
        let t1 = check_theorem1(&k, 4, 4, 3, 256, TOL).unwrap();
        assert_eq!(t1.overall, Verdict::Fail);
        assert!(t1.condition("signed_sum").any(|i| i.verdict == Verdict::Fail));
        let d = check_sufficient_decay(&KernelSpec::bspline(5, 1), 5, 5, 3, 256, TOL).unwrap();
        assert!(d.condition("weighted_decay").any(|i| i.l == Some(4) && i.verdict == Verdict::Fail));
    }

    #[test]
    fn zero_mean_version_tolerates_missing_constant() {
        let k = KernelSpec::bspline(4, 2).with_overrides(&[(0, Complex::ZERO)]);
        let t1 = check_theorem1(&k, 4, 4, 2, 256, TOL).unwrap();
        assert_eq!(t1.overall, Verdict::Fail);
        assert!(t1.condition("nonzero").any(|i| i.l == Some(0) && i.verdict == Verdict::Fail));
        assert!(check_corollary1(&k, 4, 4, 2, 256, TOL).unwrap().passed());
    }

    #[test]
    fn inserted_multiple_breaks_even_case() {
        let k = KernelSpec::bspline(4, 2).with_overrides(&[(8, Complex::new(0.01, 0.0))]);
        let t3 = check_theorem3(&k, 4, 4, 2, 256, TOL).unwrap();
        assert!(t3.condition("vanishing_multiples").all(|i| i.verdict == Verdict::Fail));
    }

    #[test]
    fn scaling_changes_no_verdict() {
        let base = KernelSpec::bspline(5, 1);
        let scaled = base.scaled(Complex::new(-3.0, 4.0));
        for r in 1..=3 {
            for th in [Theorem::Cross, Theorem::Odd, Theorem::Even, Theorem::Decay] {
                let m = if th == Theorem::Odd { 4 } else { 5 };
                let a = check(th, &base, 5, m, r, 256, TOL).unwrap();
                let b = check(th, &scaled, 5, m, r, 256, TOL).unwrap();
                assert_eq!(a.overall, b.overall, "{th} r={r}");
            }
        }
    }

    #[test]
    fn precondition_violations_are_errors() {
        let k = KernelSpec::bspline(4, 1);
        assert!(check_theorem1(&k, 4, 5, 1, 64, TOL).is_err());
        assert!(check_theorem2(&k, 4, 4, 1, 64, TOL).is_err());
        assert!(check_theorem4(&k, 4, 2, 1, 64, TOL).is_err());
    }
}
