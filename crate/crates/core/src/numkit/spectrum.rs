use serde::{Deserialize, Serialize};

use crate::error::Result;

use super::eig::eigh;
use super::mat::SymOp;
use super::tolerance::TolerancePolicy;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub eigenvalue: f64,
    pub multiplicity: usize,
}

/// Eigenvalues grouped by single linkage: a gap larger than `cluster_tol`
/// between consecutive sorted eigenvalues starts a new cluster.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub clusters: Vec<Cluster>,
    pub cluster_tol: f64,
}

impl Spectrum {
    pub fn from_values(values: &[f64], cluster_tol: f64) -> Spectrum {
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mut groups: Vec<Vec<f64>> = Vec::new();
        for v in sorted {
            match groups.last_mut() {
                Some(g) if v - g[g.len() - 1] <= cluster_tol => g.push(v),
                _ => groups.push(vec![v]),
            }
        }
        let clusters = groups
            .into_iter()
            .map(|g| Cluster {
                eigenvalue: g.iter().sum::<f64>() / g.len() as f64,
                multiplicity: g.len(),
            })
            .collect();
        Spectrum {
            clusters,
            cluster_tol,
        }
    }

    pub fn dimension(&self) -> usize {
        self.clusters.iter().map(|c| c.multiplicity).sum()
    }

    /// Eigenvalues with repetition, ascending.
    pub fn expanded(&self) -> Vec<f64> {
        self.clusters
            .iter()
            .flat_map(|c| std::iter::repeat(c.eigenvalue).take(c.multiplicity))
            .collect()
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.clusters.iter().map(|c| c.multiplicity).collect()
    }

    /// Same multiplicities and eigenvalues within `tol`.
    pub fn matches(&self, other: &Spectrum, tol: f64) -> bool {
        self.clusters.len() == other.clusters.len()
            && self
                .clusters
                .iter()
                .zip(&other.clusters)
                .all(|(a, b)| {
                    a.multiplicity == b.multiplicity && (a.eigenvalue - b.eigenvalue).abs() <= tol
                })
    }
}

pub fn sym_eig(m: &SymOp, policy: &TolerancePolicy) -> Result<Spectrum> {
    let eig = eigh(m)?;
    Ok(Spectrum::from_values(&eig.values, policy.cluster_tol))
}
