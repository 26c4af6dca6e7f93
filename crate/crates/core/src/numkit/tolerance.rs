use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TolerancePolicy {
    /// Relative reconstruction residual accepted from the eigensolver.
    pub eig_tol: f64,
    /// Absolute gap separating eigenvalue clusters.
    pub cluster_tol: f64,
    /// Residual threshold for algebraic identities.
    pub identity_tol: f64,
    /// Residual threshold for finite-difference pipelines.
    pub fd_tol: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        TolerancePolicy {
            eig_tol: 1e-12,
            cluster_tol: 1e-7,
            identity_tol: 1e-10,
            fd_tol: 1e-4,
        }
    }
}

impl TolerancePolicy {
    pub fn validate(&self) -> Result<()> {
        let all = [self.eig_tol, self.cluster_tol, self.identity_tol, self.fd_tol];
        if all.iter().all(|t| t.is_finite() && *t > 0.0) {
            Ok(())
        } else {
            Err(LabError::InvalidArgument(format!(
                "tolerances must be positive: {self:?}"
            )))
        }
    }
}
