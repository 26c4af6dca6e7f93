//! Dense small-matrix linear algebra: operators, the Jacobi eigensolver,
//! spectrum clustering and the tolerance policy shared by every module.

mod eig;
mod mat;
mod spectrum;
mod tolerance;

pub use eig::{eigh, spd_sqrt_pair, EigenDecomposition, MAX_SWEEPS};
pub use mat::{
    axpy, basis_vector, dot, gram_schmidt, max_abs_diff, norm, normalized, projector, scaled,
    wedge, Mat, SkewOp, SymOp,
};
pub use spectrum::{sym_eig, Cluster, Spectrum};
pub use tolerance::TolerancePolicy;

use rand::Rng;
use rand_distr::StandardNormal;

/// Largest dimension the dense kernels are meant for.
pub const MAX_DIM: usize = 32;

pub fn random_gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Uniform point on the unit sphere in ℝⁿ.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v = random_gaussian_vector(rng, n);
        let r = norm(&v);
        if r > 1e-8 {
            return scaled(1.0 / r, &v);
        }
    }
}

/// Symmetric matrix with independent standard normal entries on and above the diagonal.
pub fn random_symmetric<R: Rng + ?Sized>(rng: &mut R, n: usize) -> SymOp {
    let mut m = Mat::zeros(n);
    for i in 0..n {
        for j in i..n {
            let v: f64 = rng.sample(StandardNormal);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    SymOp::new(&m)
}

/// Haar-distributed orthogonal matrix: Gram–Schmidt on the columns of a Gaussian matrix.
pub fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Mat {
    loop {
        let cols: Vec<Vec<f64>> = (0..n).map(|_| random_gaussian_vector(rng, n)).collect();
        if let Some(q) = gram_schmidt(&cols, 1e-10) {
            return Mat::from_fn(n, |i, j| q[j][i]);
        }
    }
}
