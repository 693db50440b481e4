//! kNN entropy, copula entropy and the two mutual information estimators.
//!
//! All values are in nats.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::copula::{rank_transform, RankScaling, TiePolicy};
use crate::data::SampleMatrix;
use crate::error::{Error, Result};
use crate::knn::{kth_neighbor_distances, Backend, MarginalCounter, NormKind, Points};
use crate::special::{digamma_unchecked as psi, ln_gamma_half};

/// Every tunable of the estimation pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub k: usize,
    pub norm: NormKind,
    pub rank_scaling: RankScaling,
    pub tie_policy: TiePolicy,
    pub backend: Backend,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            k: 3,
            norm: NormKind::Chebyshev,
            rank_scaling: RankScaling::TPlusOne,
            tie_policy: TiePolicy::OccurrenceOrder,
            backend: Backend::KdTree,
        }
    }
}

impl EstimatorConfig {
    pub fn with_k(self, k: usize) -> Self {
        EstimatorConfig { k, ..self }
    }

    fn check(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidArgument(
                "neighbor order k must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Kozachenko–Leonenko entropy of raw points.
    KlEntropy,
    /// Kozachenko–Leonenko entropy of the rank-transformed points.
    CopulaEntropy,
    /// Mutual information as negated copula entropy.
    #[serde(rename = "copent")]
    Copent,
    /// Kraskov–Stögbauer–Grassberger estimator, first algorithm.
    Ksg,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::KlEntropy => "kl_entropy",
            Method::CopulaEntropy => "copula_entropy",
            Method::Copent => "copent",
            Method::Ksg => "ksg",
        })
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "copent" | "copula" => Ok(Method::Copent),
            "ksg" => Ok(Method::Ksg),
            _ => Err(Error::InvalidArgument(format!(
                "unknown method {s:?}, expected copent or ksg"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    pub nats: f64,
    pub samples: usize,
    pub dim: usize,
    pub k: usize,
    pub method: Method,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MIEstimate {
    pub nats: f64,
    pub method: Method,
    pub config: EstimatorConfig,
    pub samples: usize,
}

/// log of the unit-diameter ball volume, so that ε can always be twice the
/// kth-neighbor distance.
fn log_unit_ball(norm: NormKind, dim: usize) -> f64 {
    match norm {
        NormKind::Chebyshev => 0.0,
        NormKind::Euclidean => {
            let d = dim as f64;
            0.5 * d * std::f64::consts::PI.ln()
                - ln_gamma_half(dim as u32 + 2)
                - d * std::f64::consts::LN_2
        }
    }
}

/// Kozachenko–Leonenko differential entropy estimate:
/// −ψ(k) + ψ(T) + log c_d + (d/T) Σ log ε(t), with ε(t) twice the distance
/// from point t to its kth neighbor.
pub fn kl_entropy(points: Points<'_>, config: &EstimatorConfig) -> Result<EntropyEstimate> {
    config.check()?;
    let n = points.len();
    let dim = points.dim();
    if n <= config.k {
        return Err(Error::TooFewSamples {
            k: config.k,
            samples: n,
        });
    }
    let neighbors = kth_neighbor_distances(points, config.k, config.norm, config.backend)?;
    // Accumulate in index order for a scheduling-independent sum.
    let mut log_sum = 0.0;
    for r in &neighbors {
        // The nearest neighbor at distance zero means a coincident pair.
        let nearest = r.neighbor_indices[0];
        if config
            .norm
            .distance(points.point(r.query_index), points.point(nearest))
            == 0.0
        {
            return Err(Error::CoincidentPoints {
                first: r.query_index.min(nearest),
                second: r.query_index.max(nearest),
            });
        }
        log_sum += (2.0 * r.kth_distance).ln();
    }
    let nats = -psi(config.k as f64)
        + psi(n as f64)
        + log_unit_ball(config.norm, dim)
        + dim as f64 * log_sum / n as f64;
    Ok(EntropyEstimate {
        nats,
        samples: n,
        dim,
        k: config.k,
        method: Method::KlEntropy,
    })
}

/// Entropy of the empirical copula of `m`.
pub fn copula_entropy(m: &SampleMatrix, config: &EstimatorConfig) -> Result<EntropyEstimate> {
    config.check()?;
    let pseudo = rank_transform(m, config.rank_scaling, config.tie_policy)?;
    let mut est = kl_entropy(pseudo.matrix().points(), config)?;
    est.method = Method::CopulaEntropy;
    Ok(est)
}

/// Mutual information among all columns of `m` as negated copula entropy.
pub fn mi_copula(m: &SampleMatrix, config: &EstimatorConfig) -> Result<MIEstimate> {
    if m.cols() < 2 {
        return Err(Error::Dimension {
            estimator: "copula mutual information",
            expected: "at least 2",
            found: m.cols(),
        });
    }
    let h = copula_entropy(m, config)?;
    Ok(MIEstimate {
        nats: -h.nats,
        method: Method::Copent,
        config: *config,
        samples: m.rows(),
    })
}

/// Kraskov–Stögbauer–Grassberger mutual information of a bivariate sample:
/// ψ(k) + ψ(T) − ⟨ψ(n_x + 1) + ψ(n_y + 1)⟩, where n_x, n_y count marginal
/// points strictly closer than the joint kth-neighbor distance.
pub fn mi_ksg(m: &SampleMatrix, config: &EstimatorConfig) -> Result<MIEstimate> {
    config.check()?;
    if m.cols() != 2 {
        return Err(Error::Dimension {
            estimator: "KSG baseline",
            expected: "exactly 2 (it is bivariate)",
            found: m.cols(),
        });
    }
    if config.norm != NormKind::Chebyshev {
        return Err(Error::InvalidArgument(
            "the KSG estimator requires the chebyshev norm".into(),
        ));
    }
    let n = m.rows();
    if n <= config.k {
        return Err(Error::TooFewSamples {
            k: config.k,
            samples: n,
        });
    }
    let points = m.points();
    let neighbors = kth_neighbor_distances(points, config.k, config.norm, config.backend)?;
    let xs = m.column(0);
    let ys = m.column(1);
    let (cx, cy) = (MarginalCounter::new(&xs), MarginalCounter::new(&ys));

    let terms: Vec<Result<f64>> = neighbors
        .par_iter()
        .map(|r| {
            let t = r.query_index;
            if r.kth_distance == 0.0 {
                return Err(Error::CoincidentPoints {
                    first: t.min(r.neighbor_indices[0]),
                    second: t.max(r.neighbor_indices[0]),
                });
            }
            let nx = cx.count(xs[t], r.kth_distance, true);
            let ny = cy.count(ys[t], r.kth_distance, true);
            Ok(psi(nx as f64 + 1.0) + psi(ny as f64 + 1.0))
        })
        .collect();
    let mut sum = 0.0;
    for term in terms {
        sum += term?;
    }
    Ok(MIEstimate {
        nats: psi(config.k as f64) + psi(n as f64) - sum / n as f64,
        method: Method::Ksg,
        config: *config,
        samples: n,
    })
}

/// Ĥ(x) − Σᵢ Ĥ(xᵢ) − Ĥ_c(x). The exact identity makes this zero; the
/// estimate measures the combined bias of the three entropy estimates.
pub fn decomposition_residual(m: &SampleMatrix, config: &EstimatorConfig) -> Result<f64> {
    if m.cols() < 2 {
        return Err(Error::Dimension {
            estimator: "entropy decomposition",
            expected: "at least 2",
            found: m.cols(),
        });
    }
    let joint = kl_entropy(m.points(), config)?.nats;
    let marginals: Vec<f64> = (0..m.cols())
        .into_par_iter()
        .map(|i| {
            let col = m.column(i);
            kl_entropy(Points::new(&col, 1)?, config).map(|e| e.nats)
        })
        .collect::<Result<_>>()?;
    let copula = copula_entropy(m, config)?.nats;
    Ok(joint - marginals.iter().sum::<f64>() - copula)
}
