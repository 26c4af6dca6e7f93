//! Coordinate charts `x ↦ g(x)` for the model metrics and their conformal deformations.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::numkit::Mat;

/// `c · x_i · x_j` with absent factors allowed, so degree ≤ 2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Monomial {
    pub coeff: f64,
    pub i: Option<usize>,
    pub j: Option<usize>,
}

/// Polynomial of degree ≤ 2. JSON form: triples `[c, i, j]`, with `-1`
/// marking an absent factor.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 3]>", into = "Vec<[f64; 3]>")]
pub struct Polynomial {
    terms: Vec<Monomial>,
}

fn factor_index(v: f64) -> Result<Option<usize>> {
    if v == -1.0 {
        Ok(None)
    } else if v >= 0.0 && v.fract() == 0.0 && v < 64.0 {
        Ok(Some(v as usize))
    } else {
        Err(LabError::InvalidArgument(format!("monomial index {v} is not -1 or a small nonnegative integer")))
    }
}

impl TryFrom<Vec<[f64; 3]>> for Polynomial {
    type Error = LabError;
    fn try_from(v: Vec<[f64; 3]>) -> Result<Self> {
        let terms = v
            .into_iter()
            .map(|[c, i, j]| Ok(Monomial { coeff: c, i: factor_index(i)?, j: factor_index(j)? }))
            .collect::<Result<_>>()?;
        Ok(Polynomial { terms })
    }
}

impl From<Polynomial> for Vec<[f64; 3]> {
    fn from(p: Polynomial) -> Self {
        let ix = |o: Option<usize>| o.map_or(-1.0, |v| v as f64);
        p.terms.iter().map(|m| [m.coeff, ix(m.i), ix(m.j)]).collect()
    }
}

impl Polynomial {
    pub fn new(terms: Vec<Monomial>) -> Self {
        Polynomial { terms }
    }

    pub fn zero() -> Self {
        Polynomial::default()
    }

    /// `⟨a, x⟩`.
    pub fn linear(a: &[f64]) -> Self {
        Polynomial {
            terms: a
                .iter()
                .enumerate()
                .map(|(i, c)| Monomial { coeff: *c, i: Some(i), j: None })
                .collect(),
        }
    }

    /// Constant, linear and quadratic terms with coefficients uniform in `[-scale, scale]`.
    pub fn random_quadratic<R: Rng + ?Sized>(rng: &mut R, dim: usize, scale: f64) -> Self {
        let mut terms = vec![Monomial { coeff: rng.gen_range(-scale..scale), i: None, j: None }];
        for i in 0..dim {
            terms.push(Monomial { coeff: rng.gen_range(-scale..scale), i: Some(i), j: None });
            for j in i..dim {
                terms.push(Monomial { coeff: rng.gen_range(-scale..scale), i: Some(i), j: Some(j) });
            }
        }
        Polynomial { terms }
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    /// Largest variable index used, plus one.
    pub fn min_dim(&self) -> usize {
        self.terms
            .iter()
            .flat_map(|m| [m.i, m.j])
            .flatten()
            .map(|i| i + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|m| m.coeff * m.i.map_or(1.0, |i| x[i]) * m.j.map_or(1.0, |j| x[j]))
            .sum()
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; x.len()];
        for m in &self.terms {
            match (m.i, m.j) {
                (Some(i), Some(j)) => {
                    g[i] += m.coeff * x[j];
                    g[j] += m.coeff * x[i];
                }
                (Some(i), None) | (None, Some(i)) => g[i] += m.coeff,
                (None, None) => {}
            }
        }
        g
    }

    pub fn hessian(&self, n: usize) -> Mat {
        let mut h = Mat::zeros(n);
        for m in &self.terms {
            if let (Some(i), Some(j)) = (m.i, m.j) {
                h[(i, j)] += m.coeff;
                h[(j, i)] += m.coeff;
            }
        }
        h
    }
}

/// Axis-aligned box.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Domain {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Domain {
    pub fn cube(dim: usize, half_width: f64) -> Self {
        Domain { lo: vec![-half_width; dim], hi: vec![half_width; dim] }
    }

    /// Whether the closed `margin`-neighbourhood of `x` (sup norm) is inside.
    pub fn contains_with_margin(&self, x: &[f64], margin: f64) -> bool {
        x.len() == self.lo.len()
            && x.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(v, (lo, hi))| v - margin > *lo && v + margin < *hi)
    }

    pub fn scale(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .fold(0.0, |m, (lo, hi)| m.max(0.5 * (hi - lo)))
    }
}

/// `g`, `∂_m g` and `∂_m∂_p g` at a point.
#[derive(Clone, Debug)]
pub struct MetricJet {
    pub g: Mat,
    pub dg: Vec<Mat>,
    pub ddg: Vec<Vec<Mat>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Chart {
    Euclidean { dim: usize },
    /// Stereographic chart of the unit sphere, `g = 4/(1+‖x‖²)²·δ`.
    Sphere { dim: usize },
    /// Fubini–Study (`sign = +1`) or its dual on the unit ball (`sign = −1`) in
    /// inhomogeneous coordinates `z_j = x_{2j} + i·x_{2j+1}`, holomorphic
    /// sectional curvature `4·sign`.
    ComplexProjective { m: usize, sign: f64 },
    /// `g = e^{2φ}·δ`.
    ConformallyFlat { dim: usize, phi: Polynomial },
    /// `g = e^{2φ}·g_base`.
    Conformal { base: Box<Chart>, phi: Polynomial },
}

impl Chart {
    pub fn euclidean(dim: usize) -> Self {
        Chart::Euclidean { dim }
    }

    pub fn sphere(dim: usize) -> Self {
        Chart::Sphere { dim }
    }

    pub fn complex_projective(m: usize) -> Self {
        Chart::ComplexProjective { m, sign: 1.0 }
    }

    pub fn complex_hyperbolic(m: usize) -> Self {
        Chart::ComplexProjective { m, sign: -1.0 }
    }

    pub fn conformally_flat(dim: usize, phi: Polynomial) -> Result<Self> {
        if phi.min_dim() > dim {
            return Err(LabError::DimensionMismatch { expected: dim, got: phi.min_dim() });
        }
        Ok(Chart::ConformallyFlat { dim, phi })
    }

    pub fn conformal(base: Chart, phi: Polynomial) -> Result<Self> {
        if phi.min_dim() > base.dim() {
            return Err(LabError::DimensionMismatch { expected: base.dim(), got: phi.min_dim() });
        }
        Ok(Chart::Conformal { base: Box::new(base), phi })
    }

    pub fn name(&self) -> String {
        match self {
            Chart::Euclidean { dim } => format!("euclidean{dim}"),
            Chart::Sphere { dim } => format!("sphere{dim}"),
            Chart::ComplexProjective { m, sign } if *sign > 0.0 => format!("cp{m}"),
            Chart::ComplexProjective { m, .. } => format!("ch{m}"),
            Chart::ConformallyFlat { dim, .. } => format!("conformally_flat{dim}"),
            Chart::Conformal { base, .. } => format!("conformal_{}", base.name()),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Chart::Euclidean { dim } | Chart::Sphere { dim } | Chart::ConformallyFlat { dim, .. } => *dim,
            Chart::ComplexProjective { m, .. } => 2 * m,
            Chart::Conformal { base, .. } => base.dim(),
        }
    }

    pub fn domain(&self) -> Domain {
        match self {
            Chart::Euclidean { dim } | Chart::Sphere { dim } => Domain::cube(*dim, 10.0),
            Chart::ConformallyFlat { dim, .. } => Domain::cube(*dim, 5.0),
            Chart::ComplexProjective { m, sign } if *sign > 0.0 => Domain::cube(2 * m, 10.0),
            Chart::ComplexProjective { m, .. } => Domain::cube(2 * m, 0.99 / ((2 * m) as f64).sqrt()),
            Chart::Conformal { base, .. } => base.domain(),
        }
    }

    pub fn has_analytic_derivatives(&self) -> bool {
        matches!(self, Chart::Euclidean { .. } | Chart::ConformallyFlat { .. })
    }

    pub fn metric(&self, x: &[f64]) -> Mat {
        match self {
            Chart::Euclidean { dim } => Mat::identity(*dim),
            Chart::Sphere { dim } => {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                Mat::identity(*dim).scale(4.0 / ((1.0 + r2) * (1.0 + r2)))
            }
            Chart::ComplexProjective { m, sign } => fubini_study(*m, *sign, x),
            Chart::ConformallyFlat { dim, phi } => Mat::identity(*dim).scale((2.0 * phi.value(x)).exp()),
            Chart::Conformal { base, phi } => base.metric(x).scale((2.0 * phi.value(x)).exp()),
        }
    }

    /// Exact jet when the chart provides one.
    pub fn analytic_jet(&self, x: &[f64]) -> Option<MetricJet> {
        match self {
            Chart::Euclidean { dim } => Some(MetricJet {
                g: Mat::identity(*dim),
                dg: vec![Mat::zeros(*dim); *dim],
                ddg: vec![vec![Mat::zeros(*dim); *dim]; *dim],
            }),
            Chart::ConformallyFlat { dim, phi } => {
                let n = *dim;
                let e = (2.0 * phi.value(x)).exp();
                let d = phi.gradient(x);
                let h = phi.hessian(n);
                let id = Mat::identity(n);
                Some(MetricJet {
                    g: id.scale(e),
                    dg: (0..n).map(|m| id.scale(2.0 * d[m] * e)).collect(),
                    ddg: (0..n)
                        .map(|m| (0..n).map(|p| id.scale((2.0 * h[(m, p)] + 4.0 * d[m] * d[p]) * e)).collect())
                        .collect(),
                })
            }
            _ => None,
        }
    }

    /// Complex structure `∂_{x_{2j}} ↦ ∂_{x_{2j+1}}` of the complex charts.
    pub fn complex_structure(&self) -> Option<Mat> {
        match self {
            Chart::ComplexProjective { m, .. } => {
                let mut j = Mat::zeros(2 * m);
                for k in 0..*m {
                    j[(2 * k + 1, 2 * k)] = 1.0;
                    j[(2 * k, 2 * k + 1)] = -1.0;
                }
                Some(j)
            }
            Chart::Conformal { base, .. } => base.complex_structure(),
            _ => None,
        }
    }
}

/// `g(u,v) = Re Σ h_{jk} u_j v̄_k` with
/// `h = ((1 + s|z|²)δ − s·z̄_j z_k)/(1 + s|z|²)²`.
fn fubini_study(m: usize, sign: f64, x: &[f64]) -> Mat {
    let z: Vec<Complex64> = (0..m).map(|j| Complex64::new(x[2 * j], x[2 * j + 1])).collect();
    let r2: f64 = z.iter().map(|c| c.norm_sqr()).sum();
    let q = 1.0 + sign * r2;
    let h = |j: usize, k: usize| -> Complex64 {
        let d = if j == k { q } else { 0.0 };
        (Complex64::new(d, 0.0) - z[j].conj() * z[k] * sign) / (q * q)
    };
    let unit = |a: usize| if a % 2 == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 1.0) };
    Mat::from_fn(2 * m, |a, b| (h(a / 2, b / 2) * unit(a) * unit(b).conj()).re)
}

/// Chart specification as read from JSON.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChartSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub params: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Polynomial>,
}

impl ChartSpec {
    /// Parses a short name: `euclidean<n>`, `sphere<n>`, `cp<m>`, `ch<m>`.
    pub fn from_short_name(name: &str) -> Result<Self> {
        let split = name.find(|c: char| c.is_ascii_digit()).unwrap_or(name.len());
        let (kind, digits) = name.split_at(split);
        let num: usize = digits
            .parse()
            .map_err(|_| LabError::InvalidArgument(format!("chart name '{name}' needs a trailing dimension")))?;
        let (name, dim) = match kind {
            "euclidean" | "sphere" => (kind, num),
            "cp" | "ch" => (kind, 2 * num),
            _ => {
                return Err(LabError::InvalidArgument(format!(
                    "unknown chart '{name}' (expected euclidean<n>, sphere<n>, cp<m>, ch<m>)"
                )))
            }
        };
        Ok(ChartSpec { name: name.to_string(), dim: Some(dim), params: serde_json::Value::Null, phi: None })
    }

    pub fn to_chart(&self) -> Result<Chart> {
        let need_dim = || {
            self.dim
                .ok_or_else(|| LabError::InvalidArgument(format!("chart '{}' needs \"dim\"", self.name)))
        };
        let m_param = || -> Result<usize> {
            if let Some(m) = self.params.get("m").and_then(|v| v.as_u64()) {
                return Ok(m as usize);
            }
            match self.dim {
                Some(d) if d % 2 == 0 && d > 0 => Ok(d / 2),
                _ => Err(LabError::InvalidArgument(format!(
                    "chart '{}' needs params.m or an even dim",
                    self.name
                ))),
            }
        };
        let phi = || self.phi.clone().unwrap_or_default();
        match self.name.as_str() {
            "euclidean" => Ok(Chart::euclidean(need_dim()?)),
            "sphere" => Ok(Chart::sphere(need_dim()?)),
            "cp" => Ok(Chart::complex_projective(m_param()?)),
            "ch" => Ok(Chart::complex_hyperbolic(m_param()?)),
            "conformally_flat" => Chart::conformally_flat(need_dim()?, phi()),
            "conformal" => {
                let base: ChartSpec = serde_json::from_value(
                    self.params
                        .get("base")
                        .cloned()
                        .ok_or_else(|| LabError::InvalidArgument("conformal chart needs params.base".into()))?,
                )
                .map_err(|e| LabError::InvalidArgument(format!("params.base: {e}")))?;
                Chart::conformal(base.to_chart()?, phi())
            }
            other => Err(LabError::InvalidArgument(format!(
                "unknown chart '{other}' (expected euclidean, sphere, cp, ch, conformally_flat, conformal)"
            ))),
        }
    }
}
