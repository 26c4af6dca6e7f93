//! Finite-difference differential geometry on coordinate charts: metric jet,
//! Christoffel symbols, Riemann and Weyl tensors in an orthonormal frame, and
//! the Osserman, second Bianchi and Laplacian checks built on them.
//!
//! Curvature components follow the algebraic modules: with the standard
//! `R^l_{kij} = ∂ᵢΓ^l_{jk} − ∂ⱼΓ^l_{ik} + Γ^l_{ip}Γ^p_{jk} − Γ^l_{jp}Γ^p_{ik}`
//! the lab's tensor is `R_ijkl = −g_{lm} R^m_{kij}`, so the unit sphere
//! reproduces `from_clifford(ν = 0, λ₀ = 1)`.

mod chart;
mod fd;

pub use chart::{Chart, ChartSpec, Domain, MetricJet, Monomial, Polynomial};
pub use fd::{first_derivative, scalar_jet, second_derivative, FDConfig};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::conformal::k_from_phi;
use crate::curvature::{weyl, CurvTensor};
use crate::error::{LabError, Result};
use crate::numkit::{dot, eigh, norm, random_unit_vector, Mat, Spectrum, SymOp, TolerancePolicy};

/// `Γ^k_{ij}` stored at `(k·n + i)·n + j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Christoffel {
    n: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.n + i) * self.n + j]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |Γ^k_{ij} − Γ^k_{ji}|`.
    pub fn asymmetry(&self) -> f64 {
        let n = self.n;
        let mut r: f64 = 0.0;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    r = r.max((self.get(k, i, j) - self.get(k, j, i)).abs());
                }
            }
        }
        r
    }
}

struct Connection {
    g: Mat,
    ginv: Mat,
    gamma: Christoffel,
    /// `∂_m Γ^k_{ij}` at `((m·n + k)·n + i)·n + j`.
    dgamma: Vec<f64>,
}

fn check_interior(chart: &Chart, x: &[f64], margin: f64) -> Result<()> {
    if x.len() != chart.dim() {
        return Err(LabError::DimensionMismatch { expected: chart.dim(), got: x.len() });
    }
    if chart.domain().contains_with_margin(x, margin) {
        Ok(())
    } else {
        Err(LabError::OutsideDomain(x.to_vec()))
    }
}

/// Metric and its first two derivatives, exact when available and allowed.
pub fn metric_jet(chart: &Chart, x: &[f64], cfg: &FDConfig) -> Result<MetricJet> {
    cfg.validate()?;
    let jet = match chart.analytic_jet(x).filter(|_| cfg.analytic) {
        Some(j) => j,
        None => {
            let n = chart.dim();
            let f = |y: &[f64]| chart.metric(y).into_vec();
            let as_mat = |v: Vec<f64>| Mat::from_row_major(n, v).expect("n×n");
            let dg = (0..n).map(|m| as_mat(first_derivative(&f, x, m, cfg))).collect();
            let mut ddg = vec![vec![Mat::zeros(n); n]; n];
            for m in 0..n {
                for p in m..n {
                    let d = as_mat(second_derivative(&f, x, m, p, cfg));
                    ddg[p][m] = d.clone();
                    ddg[m][p] = d;
                }
            }
            MetricJet { g: chart.metric(x), dg, ddg }
        }
    };
    if jet.g.cholesky().is_none() {
        return Err(LabError::SingularMetric(x.to_vec()));
    }
    Ok(jet)
}

fn connection(jet: &MetricJet) -> Result<Connection> {
    let n = jet.g.dim();
    let ginv = jet.g.spd_inverse().ok_or_else(|| LabError::Degenerate("metric not invertible".into()))?;
    // first kind Γ_{l,ij} = ½(∂ᵢg_jl + ∂ⱼg_il − ∂_l g_ij)
    let first = |l: usize, i: usize, j: usize| 0.5 * (jet.dg[i][(j, l)] + jet.dg[j][(i, l)] - jet.dg[l][(i, j)]);
    let mut gamma = vec![0.0; n * n * n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                gamma[(k * n + i) * n + j] = (0..n).map(|l| ginv[(k, l)] * first(l, i, j)).sum();
            }
        }
    }
    let mut dgamma = vec![0.0; n * n * n * n];
    for m in 0..n {
        let dginv = -&ginv.matmul(&jet.dg[m]).matmul(&ginv);
        let dfirst = |l: usize, i: usize, j: usize| {
            0.5 * (jet.ddg[m][i][(j, l)] + jet.ddg[m][j][(i, l)] - jet.ddg[m][l][(i, j)])
        };
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    dgamma[((m * n + k) * n + i) * n + j] = (0..n)
                        .map(|l| dginv[(k, l)] * first(l, i, j) + ginv[(k, l)] * dfirst(l, i, j))
                        .sum();
                }
            }
        }
    }
    Ok(Connection { g: jet.g.clone(), ginv, gamma: Christoffel { n, data: gamma }, dgamma })
}

/// `Γ^k_{ij} = ½g^{kl}(∂ᵢg_jl + ∂ⱼg_il − ∂_l g_ij)`.
pub fn christoffel(chart: &Chart, x: &[f64], cfg: &FDConfig) -> Result<Christoffel> {
    check_interior(chart, x, 2.0 * cfg.h)?;
    Ok(connection(&metric_jet(chart, x, cfg)?)?.gamma)
}

fn coordinate_riemann(conn: &Connection) -> CurvTensor {
    let n = conn.g.dim();
    let gm = &conn.gamma;
    let dg = |m: usize, k: usize, i: usize, j: usize| conn.dgamma[((m * n + k) * n + i) * n + j];
    // standard R^m_{kij}
    let mut up = vec![0.0; n * n * n * n];
    for m in 0..n {
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut v = dg(i, m, j, k) - dg(j, m, i, k);
                    for p in 0..n {
                        v += gm.get(m, i, p) * gm.get(p, j, k) - gm.get(m, j, p) * gm.get(p, i, k);
                    }
                    up[((m * n + k) * n + i) * n + j] = v;
                }
            }
        }
    }
    CurvTensor::from_fn(n, |i, j, k, l| {
        -(0..n).map(|m| conn.g[(l, m)] * up[((m * n + k) * n + i) * n + j]).sum::<f64>()
    })
}

/// `Σ m_ai m_bj m_ck m_dl T_ijkl`.
fn transform4(t: &CurvTensor, m: &Mat) -> CurvTensor {
    let n = t.dim();
    let mut cur = t.as_slice().to_vec();
    // contract one slot per pass; the transformed slot moves to the back
    for _ in 0..4 {
        let mut next = vec![0.0; cur.len()];
        for a in 0..n {
            for i in 0..n {
                let c = m[(a, i)];
                if c == 0.0 {
                    continue;
                }
                for rest in 0..n * n * n {
                    next[rest * n + a] += c * cur[i * n * n * n + rest];
                }
            }
        }
        cur = next;
    }
    CurvTensor::raw(n, cur).expect("n⁴ entries")
}

fn lower_inverse(l: &Mat) -> Mat {
    let n = l.dim();
    let mut inv = Mat::zeros(n);
    for c in 0..n {
        for r in c..n {
            let mut s = if r == c { 1.0 } else { 0.0 };
            for k in c..r {
                s -= l[(r, k)] * inv[(k, c)];
            }
            inv[(r, c)] = s / l[(r, r)];
        }
    }
    inv
}

/// Rows are the Gram–Schmidt orthonormalization of the coordinate basis in
/// index order: the inverse of the Cholesky factor of `g`.
pub fn orthonormal_frame(g: &Mat) -> Result<Mat> {
    let l = g.cholesky().ok_or_else(|| LabError::Degenerate("frame: metric is not positive definite".into()))?;
    Ok(lower_inverse(&l))
}

struct PointCurvature {
    coord: CurvTensor,
    conn: Connection,
    frame: Mat,
}

fn curvature_at(chart: &Chart, x: &[f64], cfg: &FDConfig) -> Result<PointCurvature> {
    let conn = connection(&metric_jet(chart, x, cfg)?)?;
    let coord = coordinate_riemann(&conn);
    let frame = orthonormal_frame(&conn.g)?;
    Ok(PointCurvature { coord, conn, frame })
}

/// Riemann tensor in the orthonormal frame at `x`, without symmetrization.
pub fn riemann_at(chart: &Chart, x: &[f64], cfg: &FDConfig) -> Result<CurvTensor> {
    check_interior(chart, x, 3.0 * cfg.h)?;
    let pc = curvature_at(chart, x, cfg)?;
    Ok(transform4(&pc.coord, &pc.frame))
}

/// Coordinate components of the Weyl tensor at `x`.
fn coordinate_weyl(chart: &Chart, x: &[f64], cfg: &FDConfig) -> Result<CurvTensor> {
    let pc = curvature_at(chart, x, cfg)?;
    let w = weyl(&transform4(&pc.coord, &pc.frame))?;
    let back = pc.conn.g.cholesky().expect("checked in metric_jet");
    Ok(transform4(&w, &back))
}

/// `∇_m T_ijkl` for a covariant 4-tensor field, at `((((m·n+i)·n+j)·n+k)·n+l)`.
fn covariant_derivative4(
    field: &dyn Fn(&[f64]) -> Result<CurvTensor>,
    x: &[f64],
    at_x: &CurvTensor,
    gamma: &Christoffel,
    cfg: &FDConfig,
) -> Result<Vec<f64>> {
    let n = at_x.dim();
    let n4 = n * n * n * n;
    let mut out = vec![0.0; n * n4];
    for m in 0..n {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[m] += cfg.h;
        xm[m] -= cfg.h;
        let (tp, tm) = (field(&xp)?, field(&xm)?);
        for (idx, slot) in out[m * n4..(m + 1) * n4].iter_mut().enumerate() {
            *slot = (tp.as_slice()[idx] - tm.as_slice()[idx]) / (2.0 * cfg.h);
        }
    }
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut c = 0.0;
                        for p in 0..n {
                            c += gamma.get(p, m, i) * at_x.get(p, j, k, l)
                                + gamma.get(p, m, j) * at_x.get(i, p, k, l)
                                + gamma.get(p, m, k) * at_x.get(i, j, p, l)
                                + gamma.get(p, m, l) * at_x.get(i, j, k, p);
                        }
                        out[m * n4 + at_x.idx(i, j, k, l)] -= c;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Per-point part of an Osserman scan.
#[derive(Clone, Debug, Serialize)]
pub struct PointReport {
    pub x: Vec<f64>,
    pub symmetry_residual: f64,
    pub r_spectrum: Spectrum,
    /// Sup-norm spread of sorted Jacobi eigenvalues over the directions at this point.
    pub r_deviation: f64,
    pub weyl_norm: Option<f64>,
    pub weyl_spectrum: Option<Spectrum>,
    pub weyl_deviation: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChartScanReport {
    pub chart: String,
    pub h: f64,
    pub directions: usize,
    pub points: Vec<PointReport>,
    pub reference_spectrum: Spectrum,
    /// Sup-norm spread of sorted Jacobi eigenvalues over all points and directions.
    pub cross_point_deviation: f64,
    pub max_weyl_norm: Option<f64>,
    pub max_symmetry_residual: f64,
}

fn sorted_spectra(r: &CurvTensor, dirs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    dirs.iter()
        .map(|d| eigh(&crate::curvature::jacobi(r, d)).map(|e| e.values))
        .collect()
}

fn spread(spectra: &[Vec<f64>], reference: &[f64]) -> f64 {
    spectra.iter().fold(0.0_f64, |m, s| {
        s.iter().zip(reference).fold(m, |m, (a, b)| m.max((a - b).abs()))
    })
}

/// Seeded points in the central part of the chart domain.
pub fn sample_points(chart: &Chart, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let half = (0.5 * chart.domain().scale()).min(0.5);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..chart.dim()).map(|_| rng.gen_range(-half..half)).collect())
        .collect()
}

/// Jacobi spectra of `R` and `W` at every point along the same seeded frame
/// directions. Clusters use `fd_tol`.
pub fn osserman_scan(
    chart: &Chart,
    points: &[Vec<f64>],
    directions: usize,
    seed: u64,
    cfg: &FDConfig,
    policy: &TolerancePolicy,
) -> Result<ChartScanReport> {
    if points.is_empty() || directions == 0 {
        return Err(LabError::InvalidArgument("scan needs at least one point and one direction".into()));
    }
    let n = chart.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dirs: Vec<Vec<f64>> = (0..directions).map(|_| random_unit_vector(&mut rng, n)).collect();
    let per_point: Vec<(PointReport, Vec<Vec<f64>>)> = points
        .par_iter()
        .map(|x| -> Result<(PointReport, Vec<Vec<f64>>)> {
            let r = riemann_at(chart, x, cfg)?;
            let spectra = sorted_spectra(&r, &dirs)?;
            let (weyl_norm, weyl_spectrum, weyl_deviation) = if n >= 4 {
                let w = weyl(&r)?;
                let ws = sorted_spectra(&w, &dirs)?;
                (
                    Some(w.norm_sq().sqrt()),
                    Some(Spectrum::from_values(&ws[0], policy.fd_tol)),
                    Some(spread(&ws, &ws[0])),
                )
            } else {
                (None, None, None)
            };
            let report = PointReport {
                x: x.clone(),
                symmetry_residual: r.symmetry_residuals().max(),
                r_spectrum: Spectrum::from_values(&spectra[0], policy.fd_tol),
                r_deviation: spread(&spectra, &spectra[0]),
                weyl_norm,
                weyl_spectrum,
                weyl_deviation,
            };
            Ok((report, spectra))
        })
        .collect::<Result<_>>()?;
    let reference = per_point[0].1[0].clone();
    let cross = per_point.iter().fold(0.0_f64, |m, (_, s)| m.max(spread(s, &reference)));
    let points: Vec<PointReport> = per_point.into_iter().map(|(p, _)| p).collect();
    let max_weyl_norm = points
        .iter()
        .filter_map(|p| p.weyl_norm)
        .reduce(f64::max);
    let max_symmetry_residual = points.iter().fold(0.0_f64, |m, p| m.max(p.symmetry_residual));
    Ok(ChartScanReport {
        chart: chart.name(),
        h: cfg.h,
        directions,
        points,
        reference_spectrum: Spectrum::from_values(&reference, policy.fd_tol),
        cross_point_deviation: cross,
        max_weyl_norm,
        max_symmetry_residual,
    })
}

/// Random frame triples added to the basis triples in [`bianchi2_residual`].
const BIANCHI_RANDOM_TRIPLES: usize = 8;

/// Largest norm of `(∇_U R)(X,Y)Y + (∇_Y R)(U,X)Y + (∇_X R)(Y,U)Y` over frame
/// basis triples and a few seeded unit triples, with `∇R` from central
/// differences of the coordinate tensor.
pub fn bianchi2_residual(chart: &Chart, x: &[f64], cfg: &FDConfig) -> Result<f64> {
    check_interior(chart, x, 4.0 * cfg.h)?;
    let n = chart.dim();
    let pc = curvature_at(chart, x, cfg)?;
    let field = |y: &[f64]| -> Result<CurvTensor> { Ok(coordinate_riemann(&connection(&metric_jet(chart, y, cfg)?)?)) };
    let nabla = covariant_derivative4(&field, x, &pc.coord, &pc.conn.gamma, cfg)?;
    // frame components: F on all five slots
    let n4 = n * n * n * n;
    let f = &pc.frame;
    let mut fr = vec![0.0; n * n4];
    for a in 0..n {
        for m in 0..n {
            let c = f[(a, m)];
            if c == 0.0 {
                continue;
            }
            for rest in 0..n4 {
                fr[a * n4 + rest] += c * nabla[m * n4 + rest];
            }
        }
    }
    let mut tensors = Vec::with_capacity(n);
    for a in 0..n {
        let t = CurvTensor::raw(n, fr[a * n4..(a + 1) * n4].to_vec())?;
        tensors.push(transform4(&t, f));
    }
    // cyclic sum contracted with unit vectors in frame components
    let contract = |u: &[f64], xv: &[f64], y: &[f64]| -> f64 {
        let term = |a: &[f64], b: &[f64], c: &[f64]| -> Vec<f64> {
            let mut w = vec![0.0; n];
            for (m, am) in a.iter().enumerate() {
                if *am == 0.0 {
                    continue;
                }
                let op = tensors[m].operator(b, c);
                let v = op.apply(y);
                for (wl, vl) in w.iter_mut().zip(&v) {
                    *wl += am * vl;
                }
            }
            w
        };
        let s1 = term(u, xv, y);
        let s2 = term(y, u, xv);
        let s3 = term(xv, y, u);
        let s: Vec<f64> = (0..n).map(|l| s1[l] + s2[l] + s3[l]).collect();
        norm(&s)
    };
    let basis = |i: usize| {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        e
    };
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                worst = worst.max(contract(&basis(a), &basis(b), &basis(c)));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xb1a2c1);
    for _ in 0..BIANCHI_RANDOM_TRIPLES {
        let (u, xv, y) = (
            random_unit_vector(&mut rng, n),
            random_unit_vector(&mut rng, n),
            random_unit_vector(&mut rng, n),
        );
        worst = worst.max(contract(&u, &xv, &y));
    }
    Ok(worst)
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    pub steps: Vec<f64>,
    pub residuals: Vec<f64>,
    /// `log₂` of consecutive residual ratios.
    pub orders: Vec<f64>,
    pub min_order: f64,
}

/// [`bianchi2_residual`] at `h`, `h/2`, `h/4`.
pub fn bianchi2_convergence(chart: &Chart, x: &[f64], cfg: &FDConfig) -> Result<ConvergenceReport> {
    let steps: Vec<f64> = (0..3).map(|k| cfg.h / f64::from(1u32 << k)).collect();
    let residuals = steps
        .iter()
        .map(|h| bianchi2_residual(chart, x, &FDConfig { h: *h, ..*cfg }))
        .collect::<Result<Vec<f64>>>()?;
    let orders: Vec<f64> = residuals.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let min_order = orders.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(ConvergenceReport { steps, residuals, orders, min_order })
}

/// `θ(Y,Z) = Σⱼ⟨(∇_{Eⱼ}W)(Eⱼ,Y)Y, Z⟩` with `∇W` from central differences.
/// `Y` and `Z` are coordinate vectors.
pub fn weyl_divergence(chart: &Chart, x: &[f64], y: &[f64], z: &[f64], cfg: &FDConfig) -> Result<f64> {
    check_interior(chart, x, 4.0 * cfg.h)?;
    let n = chart.dim();
    let conn = connection(&metric_jet(chart, x, cfg)?)?;
    let w = coordinate_weyl(chart, x, cfg)?;
    let field = |p: &[f64]| coordinate_weyl(chart, p, cfg);
    let nabla = covariant_derivative4(&field, x, &w, &conn.gamma, cfg)?;
    let n4 = n * n * n * n;
    let mut total = 0.0;
    for m in 0..n {
        for i in 0..n {
            let gmi = conn.ginv[(m, i)];
            if gmi == 0.0 {
                continue;
            }
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        total += gmi * nabla[m * n4 + w.idx(i, j, k, l)] * y[j] * y[k] * z[l];
                    }
                }
            }
        }
    }
    Ok(total)
}

/// Metric at `x`, for callers that need inner products of coordinate vectors.
pub fn metric_at(chart: &Chart, x: &[f64]) -> Result<Mat> {
    check_interior(chart, x, 0.0)?;
    Ok(chart.metric(x))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DerivativeMode {
    Analytic,
    FiniteDifference,
}

/// `|Δu − F·u|` for `u = e^{(n−2)φ/2}` and `F = ½(n−2)·Tr K` with `K` from
/// [`k_from_phi`]; `n = x.len()`.
pub fn laplacian_identity_residual(
    phi: &Polynomial,
    x: &[f64],
    mode: DerivativeMode,
    cfg: &FDConfig,
) -> Result<f64> {
    let n = x.len();
    if n < 2 || phi.min_dim() > n {
        return Err(LabError::DimensionMismatch { expected: n, got: phi.min_dim() });
    }
    let a = 0.5 * (n as f64 - 2.0);
    let u = |y: &[f64]| (a * phi.value(y)).exp();
    let (grad, hess, lap_u) = match mode {
        DerivativeMode::Analytic => {
            let g = phi.gradient(x);
            let h = phi.hessian(n);
            let lap = u(x) * (a * h.trace() + a * a * dot(&g, &g));
            (g, h, lap)
        }
        DerivativeMode::FiniteDifference => {
            cfg.validate()?;
            let pf = |y: &[f64]| phi.value(y);
            let (g, h) = scalar_jet(&pf, x, cfg);
            let (_, hu) = scalar_jet(&u, x, cfg);
            let lap = (0..n).map(|i| hu[i][i]).sum();
            (g, Mat::from_fn(n, |i, j| h[i][j]), lap)
        }
    };
    let k = k_from_phi(&grad, &SymOp::new(&hess))?;
    let f = 0.5 * (n as f64 - 2.0) * k.trace();
    Ok((lap_u - f * u(x)).abs())
}
