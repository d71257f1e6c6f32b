use serde::{Deserialize, Serialize};

use crate::special::{normal_cdf, normal_pdf};

/// The available smoothing kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    Gaussian,
    Epanechnikov,
}

/// A symmetric kernel density `k` with its integrated kernel `K` and the two
/// moments that enter the bandwidth formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub kind: KernelKind,
    /// `∫ z^2 k(z) dz`.
    pub mu2: f64,
    /// `∫ z K(z) k(z) dz`.
    pub psi_half: f64,
}

impl KernelSpec {
    pub fn gaussian() -> Self {
        Self {
            kind: KernelKind::Gaussian,
            mu2: 1.0,
            psi_half: 0.5 / std::f64::consts::PI.sqrt(),
        }
    }

    pub fn epanechnikov() -> Self {
        Self { kind: KernelKind::Epanechnikov, mu2: 0.2, psi_half: 9.0 / 70.0 }
    }

    pub fn from_kind(kind: KernelKind) -> Self {
        match kind {
            KernelKind::Gaussian => Self::gaussian(),
            KernelKind::Epanechnikov => Self::epanechnikov(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            KernelKind::Gaussian => "gaussian",
            KernelKind::Epanechnikov => "epanechnikov",
        }
    }

    /// Half-width of the support, `None` for unbounded support.
    pub fn support(&self) -> Option<f64> {
        match self.kind {
            KernelKind::Gaussian => None,
            KernelKind::Epanechnikov => Some(1.0),
        }
    }

    /// Distance beyond which `K` is 0 or 1 to double precision.
    pub(crate) fn cutoff(&self) -> f64 {
        match self.kind {
            // 1 - Phi(9) is about 1e-19
            KernelKind::Gaussian => 9.0,
            KernelKind::Epanechnikov => 1.0,
        }
    }

    /// The density `k(z)`.
    pub fn density(&self, z: f64) -> f64 {
        match self.kind {
            KernelKind::Gaussian => normal_pdf(z),
            KernelKind::Epanechnikov => {
                if z.abs() < 1.0 {
                    0.75 * (1.0 - z * z)
                } else {
                    0.0
                }
            }
        }
    }

    /// The integrated kernel `K(z) = ∫_{-∞}^z k`.
    pub fn integrated(&self, z: f64) -> f64 {
        match self.kind {
            KernelKind::Gaussian => normal_cdf(z),
            KernelKind::Epanechnikov => {
                if z <= -1.0 {
                    0.0
                } else if z >= 1.0 {
                    1.0
                } else {
                    0.5 + 0.75 * z - 0.25 * z * z * z
                }
            }
        }
    }

    /// `(2 mu2)^{-1/3} psi_half^{2/3}`, the constant in the optimal NE bias.
    pub fn nu0(&self) -> f64 {
        (2.0 * self.mu2).powf(-1.0 / 3.0) * self.psi_half.powf(2.0 / 3.0)
    }
}

pub fn gaussian() -> KernelSpec {
    KernelSpec::gaussian()
}

pub fn epanechnikov() -> KernelSpec {
    KernelSpec::epanechnikov()
}
