//! Central-difference stencils with optional one-level Richardson extrapolation.

use serde::Serialize;

use crate::error::{LabError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FDConfig {
    pub h: f64,
    pub richardson: bool,
    /// Use exact metric jets when the chart has them.
    pub analytic: bool,
}

impl Default for FDConfig {
    fn default() -> Self {
        FDConfig { h: 1e-3, richardson: false, analytic: true }
    }
}

impl FDConfig {
    pub fn with_step(h: f64) -> Self {
        FDConfig { h, ..FDConfig::default() }
    }

    /// Step `1e-4` times the domain scale.
    pub fn for_scale(scale: f64) -> Self {
        FDConfig::with_step(1e-4 * scale)
    }

    pub fn validate(&self) -> Result<()> {
        if self.h > 0.0 && self.h.is_finite() {
            Ok(())
        } else {
            Err(LabError::InvalidArgument(format!("step must be positive, got {}", self.h)))
        }
    }
}

fn shifted(x: &[f64], moves: &[(usize, f64)]) -> Vec<f64> {
    let mut y = x.to_vec();
    for (i, d) in moves {
        y[*i] += d;
    }
    y
}

fn extrapolate<T>(cfg: &FDConfig, f: impl Fn(f64) -> T, combine: impl Fn(T, T) -> T) -> T {
    if cfg.richardson {
        combine(f(cfg.h), f(0.5 * cfg.h))
    } else {
        f(cfg.h)
    }
}

/// `∂_i F` of a vector-valued function.
pub fn first_derivative(
    f: &dyn Fn(&[f64]) -> Vec<f64>,
    x: &[f64],
    i: usize,
    cfg: &FDConfig,
) -> Vec<f64> {
    extrapolate(
        cfg,
        |h| {
            let p = f(&shifted(x, &[(i, h)]));
            let m = f(&shifted(x, &[(i, -h)]));
            p.iter().zip(&m).map(|(a, b)| (a - b) / (2.0 * h)).collect::<Vec<f64>>()
        },
        |coarse, fine| fine.iter().zip(&coarse).map(|(f, c)| (4.0 * f - c) / 3.0).collect(),
    )
}

/// `∂_i∂_j F` of a vector-valued function.
pub fn second_derivative(
    f: &dyn Fn(&[f64]) -> Vec<f64>,
    x: &[f64],
    i: usize,
    j: usize,
    cfg: &FDConfig,
) -> Vec<f64> {
    extrapolate(
        cfg,
        |h| {
            if i == j {
                let p = f(&shifted(x, &[(i, h)]));
                let c = f(x);
                let m = f(&shifted(x, &[(i, -h)]));
                p.iter()
                    .zip(&c)
                    .zip(&m)
                    .map(|((a, b), c)| (a - 2.0 * b + c) / (h * h))
                    .collect::<Vec<f64>>()
            } else {
                let pp = f(&shifted(x, &[(i, h), (j, h)]));
                let pm = f(&shifted(x, &[(i, h), (j, -h)]));
                let mp = f(&shifted(x, &[(i, -h), (j, h)]));
                let mm = f(&shifted(x, &[(i, -h), (j, -h)]));
                (0..pp.len())
                    .map(|k| (pp[k] - pm[k] - mp[k] + mm[k]) / (4.0 * h * h))
                    .collect()
            }
        },
        |coarse, fine| fine.iter().zip(&coarse).map(|(f, c)| (4.0 * f - c) / 3.0).collect(),
    )
}

/// Gradient and Hessian of a scalar function.
pub fn scalar_jet(f: &dyn Fn(&[f64]) -> f64, x: &[f64], cfg: &FDConfig) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = x.len();
    let vf = |y: &[f64]| vec![f(y)];
    let grad = (0..n).map(|i| first_derivative(&vf, x, i, cfg)[0]).collect();
    let hess = (0..n)
        .map(|i| (0..n).map(|j| second_derivative(&vf, x, i, j, cfg)[0]).collect())
        .collect();
    (grad, hess)
}
