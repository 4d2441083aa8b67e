//! `family:key=value,...` kernel strings.

use std::collections::BTreeMap;

use shiftapprox::{KernelSpec, WeightSeq};

pub struct CatalogEntry {
    pub family: &'static str,
    pub syntax: &'static str,
    pub parameters: &'static str,
    pub description: &'static str,
}

pub const CATALOG: &[CatalogEntry] = &[
    CatalogEntry {
        family: "dirichlet",
        syntax: "dirichlet:deg=<int>",
        parameters: "deg >= 0",
        description: "Dirichlet kernel; shifts span trigonometric polynomials (n = deg + 1)",
    },
    CatalogEntry {
        family: "bspline",
        syntax: "bspline:n=<int>,mu=<int>",
        parameters: "n >= 1, mu >= 0",
        description: "periodic B-spline of degree mu with knots j*pi/n",
    },
    CatalogEntry {
        family: "shifted",
        syntax: "shifted:n=<int>,mu=<int>",
        parameters: "n >= 1, mu >= 0",
        description: "B-spline translated by pi/(2n); knots at odd multiples of pi/(2n)",
    },
    CatalogEntry {
        family: "poisson",
        syntax: "poisson:n=<int>,mu=<int>,alpha=<real>",
        parameters: "alpha > 0",
        description: "Steklov average of order mu+1 of the Poisson kernel, eta_k = exp(-alpha|k|)",
    },
    CatalogEntry {
        family: "heat",
        syntax: "heat:n=<int>,mu=<int>,alpha=<real>",
        parameters: "alpha > 0",
        description: "Steklov average of the heat kernel, eta_k = exp(-alpha k^2)",
    },
    CatalogEntry {
        family: "diffop",
        syntax: "diffop:n=<int>,mu=<int>,roots=<r1>;<r2>;...",
        parameters: "real roots, at least one",
        description: "Steklov average of the kernel of P(D), eta_k = 1/P(ik), eta_0 = 1",
    },
    CatalogEntry {
        family: "bernoulli",
        syntax: "bernoulli:n=<int>,mu=<int>,s=<real>,beta=<real>",
        parameters: "s > 0",
        description: "Steklov average of the generalized Bernoulli kernel, eta_k = |k|^-s exp(-i beta sign k)",
    },
];

struct Params {
    family: String,
    values: BTreeMap<String, String>,
}

impl Params {
    fn parse(text: &str) -> Result<Self, String> {
        let (family, rest) = text.split_once(':').unwrap_or((text, ""));
        let mut values = BTreeMap::new();
        for item in rest.split(',').filter(|s| !s.trim().is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| format!("expected key=value in kernel string, got {item:?}"))?;
            if values.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                return Err(format!("parameter {k:?} given twice"));
            }
        }
        Ok(Params { family: family.trim().to_lowercase(), values })
    }

    fn take<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>, String> {
        match self.values.remove(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| format!("bad value {v:?} for {key}")),
        }
    }

    fn need<T: std::str::FromStr>(&mut self, key: &str) -> Result<T, String> {
        self.take(key)?.ok_or_else(|| format!("{} kernel needs {key}=", self.family))
    }

    fn finish(self) -> Result<(), String> {
        match self.values.keys().next() {
            Some(k) => Err(format!("unknown parameter {k:?} for {} kernel", self.family)),
            None => Ok(()),
        }
    }
}

/// Parses a kernel string; `default_n` fills a missing `n` for the B-spline families.
pub fn parse_kernel(text: &str, default_n: Option<u32>) -> Result<KernelSpec, String> {
    let mut p = Params::parse(text)?;
    const FAMILIES: [&str; 7] = ["dirichlet", "bspline", "shifted", "poisson", "heat", "diffop", "bernoulli"];
    if !FAMILIES.contains(&p.family.as_str()) {
        return Err(format!("unknown kernel family {:?}; see `shiftapprox kernels list`", p.family));
    }
    let kernel = if p.family == "dirichlet" {
        let deg = match p.take("deg")? {
            Some(d) => d,
            None => default_n.ok_or("dirichlet kernel needs deg=")?,
        };
        KernelSpec::dirichlet(deg)
    } else {
        let n: u32 = match p.take("n")? {
            Some(n) => n,
            None => default_n.ok_or_else(|| format!("{} kernel needs n=", p.family))?,
        };
        if n == 0 {
            return Err("kernel parameter n must be at least 1".into());
        }
        let mu: u32 = p.need("mu")?;
        let weight = match p.family.as_str() {
            "bspline" => None,
            "shifted" => {
                p.finish()?;
                return Ok(KernelSpec::shifted_bspline(n, mu));
            }
            "poisson" => Some(WeightSeq::Poisson { alpha: p.need("alpha")? }),
            "heat" => Some(WeightSeq::Heat { alpha: p.need("alpha")? }),
            "diffop" => {
                let roots: String = p.need("roots")?;
                let roots = roots
                    .split(';')
                    .map(|r| r.trim().parse::<f64>().map_err(|_| format!("bad root {r:?}")))
                    .collect::<Result<Vec<_>, _>>()?;
                Some(WeightSeq::DiffOperator { roots })
            }
            "bernoulli" => Some(WeightSeq::GeneralizedBernoulli { s: p.need("s")?, beta: p.take("beta")?.unwrap_or(0.0) }),
            _ => unreachable!("family checked above"),
        };
        match weight {
            None => KernelSpec::bspline(n, mu),
            Some(w) => KernelSpec::weighted(n, mu, w).map_err(|e| e.to_string())?,
        }
    };
    p.finish()?;
    Ok(kernel)
}
