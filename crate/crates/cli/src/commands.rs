use std::fs::File;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use shiftapprox::certify::{self, random_class_member, verify_jackson, Theorem, Verdict};
use shiftapprox::oracle::{ellipsoid_width, optimal_trigonometric_space, worst_case_ratio, RatioProblem};
use shiftapprox::splines::{
    default_parity, periodize, verify_spline_space, Family, KnotParity, SampledFunction, SplineSpaceSpec,
};
use shiftapprox::{basis, FunctionClassTag, KernelSpec, ShiftSpaceSpec, SpaceVariant, SymmetryClass};

use crate::config::RunConfig;
use crate::kernel_arg::{parse_kernel, CATALOG};
use crate::output::{Cell, Table};
use crate::CliError;

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

pub fn parse_theorem(text: &str) -> Result<Theorem, CliError> {
    match text.trim().to_lowercase().as_str() {
        "1" | "theorem1" | "cross" => Ok(Theorem::Cross),
        "c1" | "corollary1" | "cross0" => Ok(Theorem::CrossZeroMean),
        "2" | "theorem2" | "odd" => Ok(Theorem::Odd),
        "3" | "theorem3" | "even" => Ok(Theorem::Even),
        "4" | "theorem4" | "oddharmonic" => Ok(Theorem::OddHarmonic),
        "decay" => Ok(Theorem::Decay),
        other => usage(format!("unknown theorem {other:?}; use 1, c1, 2, 3, 4 or decay")),
    }
}

pub fn parse_class(text: &str) -> Result<SymmetryClass, CliError> {
    match text.trim().to_lowercase().as_str() {
        "h0" => Ok(SymmetryClass::H0),
        "h1" => Ok(SymmetryClass::H1),
        "h2" => Ok(SymmetryClass::H2),
        "h2even" => Ok(SymmetryClass::H2Even),
        "any" => Ok(SymmetryClass::Any),
        other => usage(format!("unknown class {other:?}; use h0, h1, h2, h2even or any")),
    }
}

fn parse_parity(text: &str) -> Result<KnotParity, CliError> {
    match text.trim().to_lowercase().as_str() {
        "integer" | "int" => Ok(KnotParity::Integer),
        "half" => Ok(KnotParity::Half),
        other => usage(format!("unknown knot parity {other:?}; use integer or half")),
    }
}

fn parity_name(p: KnotParity) -> &'static str {
    match p {
        KnotParity::Integer => "integer",
        KnotParity::Half => "half",
    }
}

fn kernel(cfg: &RunConfig, default_n: Option<u32>) -> Result<KernelSpec, CliError> {
    let Some(text) = &cfg.kernel else {
        return usage("--kernel is required");
    };
    parse_kernel(text, default_n).map_err(CliError::Usage)
}

fn default_m(theorem: Theorem, n: u32) -> u32 {
    match theorem {
        Theorem::Odd => n.saturating_sub(1),
        Theorem::OddHarmonic => n.saturating_sub(1) / 2,
        _ => n,
    }
}

/// Space and class on which the Jackson inequality of a theorem is checked.
fn jackson_setting(theorem: Theorem, m: u32) -> Option<(SpaceVariant, SymmetryClass)> {
    match theorem {
        Theorem::Cross => Some((SpaceVariant::CrossM(m), SymmetryClass::Any)),
        Theorem::Odd => Some((SpaceVariant::Sym0(m), SymmetryClass::H0)),
        Theorem::Even => Some((SpaceVariant::Sym1(m), SymmetryClass::H1)),
        Theorem::OddHarmonic => Some((SpaceVariant::Sym2(m), SymmetryClass::H2)),
        _ => None,
    }
}

pub fn certify(cfg: &RunConfig) -> Result<(Table, Verdict), CliError> {
    let k = kernel(cfg, cfg.n)?;
    let theorem = parse_theorem(cfg.theorem.as_deref().ok_or(CliError::Usage("--theorem is required".into()))?)?;
    let n = cfg.n.unwrap_or_else(|| k.nominal_n());
    let m = cfg.m.unwrap_or_else(|| default_m(theorem, n));
    let r = cfg.r.unwrap_or(1);
    let cutoff = cfg.cutoff.unwrap_or(1024);
    let tol = cfg.tol.unwrap_or(1e-12);
    let report = certify::check(theorem, &k, n, m, r, cutoff, tol)?;
    let mut table = Table::new(&["theorem", "condition", "l", "margin", "slack", "verdict"]);
    for item in &report.items {
        table.push(vec![
            theorem.id().into(),
            item.condition.as_str().into(),
            item.l.into(),
            item.margin.into(),
            item.slack.into(),
            item.verdict.as_str().into(),
        ]);
    }
    let mut overall = report.overall;
    let samples = cfg.samples.unwrap_or(0);
    if samples > 0 {
        let Some((variant, class)) = jackson_setting(theorem, m) else {
            return usage(format!("no Jackson inequality to sample for {}", theorem.id()));
        };
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.unwrap_or(0));
        let degree = cutoff.min(4 * n as i64);
        let draws: Vec<_> = (0..samples).map(|_| random_class_member(class, degree, &mut rng)).collect();
        let space = ShiftSpaceSpec::new(k.clone(), n, variant)?;
        let rep = verify_jackson(&space, r, class, &draws, cutoff)?;
        let margin = rep
            .samples
            .iter()
            .map(|s| if s.rhs > 0.0 { (s.rhs - s.error) / s.rhs } else { f64::INFINITY })
            .fold(f64::INFINITY, f64::min);
        let sample_verdict = if rep.violations == 0 { Verdict::Pass } else { Verdict::Fail };
        let witness_margin = certify::jackson::WITNESS_TOLERANCE - rep.witness_gap;
        let witness_verdict = if witness_margin >= 0.0 { Verdict::Pass } else { Verdict::Fail };
        for (name, margin, verdict) in
            [("jackson_samples", margin, sample_verdict), ("jackson_witness", witness_margin, witness_verdict)]
        {
            table.push(vec![
                theorem.id().into(),
                name.into(),
                Cell::Empty,
                margin.into(),
                0.0.into(),
                verdict.as_str().into(),
            ]);
            overall = overall.max(verdict);
        }
    }
    Ok((table, overall))
}

fn width_space(
    template: Option<&str>,
    class: SymmetryClass,
    n_dim: u32,
) -> Result<ShiftSpaceSpec, CliError> {
    match template {
        None => Ok(optimal_trigonometric_space(class, n_dim)?),
        Some(t) if t.trim().eq_ignore_ascii_case("dirichlet") => Ok(optimal_trigonometric_space(class, n_dim)?),
        Some(t) => {
            let (np, variant) = match class {
                SymmetryClass::H0 => (n_dim + 1, SpaceVariant::Sym0(n_dim)),
                SymmetryClass::H1 => (n_dim, SpaceVariant::Sym1(n_dim)),
                SymmetryClass::H2 => (2 * n_dim + 1, SpaceVariant::Sym2(n_dim)),
                SymmetryClass::H2Even => (2 * n_dim + 1, SpaceVariant::Sym2Even(n_dim)),
                SymmetryClass::Any => return usage("widths are tabulated for h0, h1, h2 and h2even"),
            };
            let k = parse_kernel(t, Some(np)).map_err(CliError::Usage)?;
            Ok(ShiftSpaceSpec::new(k, np, variant)?)
        }
    }
}

pub fn widths(cfg: &RunConfig) -> Result<(Table, Verdict), CliError> {
    let classes = match &cfg.class {
        Some(c) => vec![parse_class(c)?],
        None => vec![SymmetryClass::H0, SymmetryClass::H1, SymmetryClass::H2],
    };
    if classes.contains(&SymmetryClass::Any) {
        return usage("widths are tabulated for h0, h1, h2 and h2even");
    }
    let r_max = cfg.r.unwrap_or(3);
    let n_max = cfg.n.unwrap_or(6);
    let cutoff = cfg.cutoff.unwrap_or(4096);
    let tol = cfg.tol.unwrap_or(1e-8);
    let mut tasks = Vec::new();
    for &class in &classes {
        for r in 1..=r_max {
            for n in 1..=n_max {
                tasks.push((class, r, n));
            }
        }
    }
    let template = cfg.kernel.as_deref();
    let rows: Vec<Result<Vec<Cell>, CliError>> = tasks
        .par_iter()
        .map(|&(class, r, n)| {
            let space = width_space(template, class, n)?;
            let tag = FunctionClassTag::new(class, r)?;
            let width = ellipsoid_width(tag, n as usize, cutoff)?;
            let problem = RatioProblem::new(space.clone(), tag, cutoff.max(4 * space.n as i64), false);
            let rep = worst_case_ratio(&problem)?;
            let oracle = rep.ratio.sqrt();
            let diff = (oracle - width).abs();
            Ok(vec![
                class.name().into(),
                r.into(),
                n.into(),
                space.kernel.label().into(),
                space.variant.to_string().into(),
                width.into(),
                oracle.into(),
                diff.into(),
                rep.truncation_gap.into(),
                (diff <= tol).into(),
            ])
        })
        .collect();
    let mut table = Table::new(&[
        "class",
        "r",
        "n",
        "kernel",
        "space",
        "width",
        "oracle",
        "abs_diff",
        "truncation_gap",
        "passed",
    ]);
    let mut verdict = Verdict::Pass;
    for row in rows {
        let row = row?;
        if row[9] != Cell::Bool(true) {
            verdict = Verdict::Fail;
        }
        table.push(row);
    }
    Ok((table, verdict))
}

pub fn project(cfg: &RunConfig) -> Result<(Table, Verdict), CliError> {
    let Some(path) = &cfg.input else {
        return usage("--input is required");
    };
    let family = Family::from_index(cfg.family.ok_or(CliError::Usage("--family is required".into()))?)?;
    let file = File::open(path).map_err(|e| CliError::Usage(format!("cannot open {}: {e}", path.display())))?;
    let samples = SampledFunction::read_csv(file)?;
    let u = periodize(&samples, family)?;
    let (space, m) = match &cfg.kernel {
        Some(_) => {
            let k = kernel(cfg, None)?;
            let np = k.nominal_n();
            let (variant, m) = match family {
                Family::Odd => {
                    let m = cfg.m.unwrap_or(np.saturating_sub(1));
                    (SpaceVariant::Sym0(m), m)
                }
                Family::Even => {
                    let m = cfg.m.unwrap_or(np);
                    (SpaceVariant::Sym1(m), m)
                }
                Family::OddHarmonic => {
                    let m = cfg.m.unwrap_or(np.saturating_sub(1) / 2);
                    (SpaceVariant::Sym2(m), m)
                }
            };
            (ShiftSpaceSpec::new(k, np, variant)?, m)
        }
        None => {
            let n = cfg.n.ok_or(CliError::Usage("--n or --kernel is required".into()))?;
            let d = cfg.d.unwrap_or(3);
            let parity = match &cfg.parity {
                Some(p) => parse_parity(p)?,
                None => default_parity(family, d),
            };
            (SplineSpaceSpec::new(d, family, n, parity)?.space()?, n)
        }
    };
    let r = cfg.r.unwrap_or(1);
    let floor = 2 * space.n as i64;
    if let Some(k) = cfg.cutoff.filter(|&k| k < floor) {
        return usage(format!("truncation K = {k} is too small: at least {floor} is required"));
    }
    // The projection needs every frequency the periodized samples carry.
    let cutoff = cfg.cutoff.unwrap_or(0).max(u.cutoff()).max(floor);
    let p = basis(&space, cutoff)?.project(&u)?;
    let denominator = match family {
        Family::Odd => m + 1,
        Family::Even => m,
        Family::OddHarmonic => 2 * m + 1,
    };
    let periodic_bound = (denominator as f64).powi(-(r as i32)) * u.derivative(r)?.l2_norm().value;
    let factor = family.transference_factor();
    let within = p.error <= periodic_bound * (1.0 + 1e-12);
    let mut table = Table::new(&[
        "family",
        "kernel",
        "space",
        "r",
        "error",
        "error_upper",
        "bound",
        "periodic_error",
        "periodic_bound",
        "within_bound",
    ]);
    table.push(vec![
        family.index().into(),
        space.kernel.label().into(),
        space.variant.to_string().into(),
        r.into(),
        (p.error / factor).into(),
        (p.error_upper / factor).into(),
        (periodic_bound / factor).into(),
        p.error.into(),
        periodic_bound.into(),
        within.into(),
    ]);
    Ok((table, if within { Verdict::Pass } else { Verdict::Fail }))
}

pub fn splines(cfg: &RunConfig) -> Result<(Table, Verdict), CliError> {
    let families = match cfg.family {
        Some(i) => vec![Family::from_index(i)?],
        None => vec![Family::Odd, Family::Even, Family::OddHarmonic],
    };
    let degrees: Vec<u32> = cfg.d.map_or_else(|| (0..=5).collect(), |d| vec![d]);
    let dims: Vec<u32> = cfg.n.map_or_else(|| (1..=5).collect(), |n| vec![n]);
    let parities = match &cfg.parity {
        Some(p) => vec![parse_parity(p)?],
        None => vec![KnotParity::Integer, KnotParity::Half],
    };
    let tol = cfg.tol.unwrap_or(1e-8);
    let mut specs = Vec::new();
    for &family in &families {
        for &parity in &parities {
            for &d in &degrees {
                for &n in &dims {
                    specs.push(SplineSpaceSpec::new(d, family, n, parity)?);
                }
            }
        }
    }
    let reports: Vec<_> = specs.par_iter().map(|s| verify_spline_space(s, tol)).collect();
    let mut table = Table::new(&[
        "family",
        "q_item",
        "d",
        "n",
        "parity",
        "rank",
        "q_dimension",
        "full_space",
        "boundary",
        "knots",
        "knots_without_jump",
        "passed",
    ]);
    let mut verdict = Verdict::Pass;
    for rep in reports {
        let rep = rep?;
        if !rep.passed {
            verdict = Verdict::Fail;
        }
        table.push(vec![
            rep.spec.family.index().into(),
            rep.q_item.into(),
            rep.spec.d.into(),
            rep.spec.n.into(),
            parity_name(rep.spec.knot_parity).into(),
            rep.rank.into(),
            rep.q_dimension.into(),
            rep.full_space.into(),
            rep.boundary.passed.into(),
            rep.knots.passed.into(),
            rep.knots.missing.len().into(),
            rep.passed.into(),
        ]);
    }
    Ok((table, verdict))
}

pub fn kernels_list() -> Table {
    let mut table = Table::new(&["family", "syntax", "parameters", "description"]);
    for e in CATALOG {
        table.push(vec![e.family.into(), e.syntax.into(), e.parameters.into(), e.description.into()]);
    }
    table
}
