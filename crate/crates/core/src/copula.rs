//! Empirical copula: per-column empirical CDFs turned into pseudo-observations.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::SampleMatrix;
use crate::error::{Error, Result};

/// Denominator used to scale ranks into the unit interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum RankScaling {
    /// rank / T. Reproduces the empirical CDF exactly; the largest value maps to 1.
    #[serde(rename = "T")]
    T,
    /// rank / (T + 1). Keeps every value strictly inside (0, 1).
    #[default]
    #[serde(rename = "T+1")]
    TPlusOne,
}

impl RankScaling {
    pub fn denominator(self, rows: usize) -> f64 {
        match self {
            RankScaling::T => rows as f64,
            RankScaling::TPlusOne => (rows + 1) as f64,
        }
    }
}

impl fmt::Display for RankScaling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RankScaling::T => "T",
            RankScaling::TPlusOne => "T+1",
        })
    }
}

impl FromStr for RankScaling {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "T" | "t" => Ok(RankScaling::T),
            "T+1" | "t+1" => Ok(RankScaling::TPlusOne),
            _ => Err(Error::InvalidArgument(format!(
                "unknown rank scaling {s:?}, expected T or T+1"
            ))),
        }
    }
}

/// How equal values within a column are ranked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TiePolicy {
    /// Ties are ranked by ascending row index, so ranks within a column are
    /// always distinct.
    #[default]
    OccurrenceOrder,
    /// Tied values share the mean of the ranks they occupy.
    Average,
}

impl fmt::Display for TiePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TiePolicy::OccurrenceOrder => "occurrence",
            TiePolicy::Average => "average",
        })
    }
}

impl FromStr for TiePolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "occurrence" | "occurrence-order" => Ok(TiePolicy::OccurrenceOrder),
            "average" => Ok(TiePolicy::Average),
            _ => Err(Error::InvalidArgument(format!(
                "unknown tie policy {s:?}, expected occurrence or average"
            ))),
        }
    }
}

/// Rank-transformed samples living in the unit hypercube.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoObservations {
    values: SampleMatrix,
    scaling: RankScaling,
    tie_policy: TiePolicy,
}

impl PseudoObservations {
    pub fn scaling(&self) -> RankScaling {
        self.scaling
    }

    pub fn tie_policy(&self) -> TiePolicy {
        self.tie_policy
    }

    pub fn matrix(&self) -> &SampleMatrix {
        &self.values
    }

    pub fn into_matrix(self) -> SampleMatrix {
        self.values
    }
}

/// Fraction of `column` entries that are `<= x`.
pub fn empirical_cdf(column: &[f64], x: f64) -> f64 {
    if column.is_empty() {
        return 0.0;
    }
    let below = column.iter().filter(|&&v| v <= x).count();
    below as f64 / column.len() as f64
}

/// 1-based ranks of one column. Ranks are returned as `f64` because average
/// ties can produce half-integers.
pub fn column_ranks(column: &[f64], tie_policy: TiePolicy) -> Vec<f64> {
    let mut order: Vec<usize> = (0..column.len()).collect();
    // Stable sort keeps equal values in row order.
    order.sort_by(|&a, &b| column[a].total_cmp(&column[b]));

    let mut ranks = vec![0.0; column.len()];
    match tie_policy {
        TiePolicy::OccurrenceOrder => {
            for (pos, &t) in order.iter().enumerate() {
                ranks[t] = (pos + 1) as f64;
            }
        }
        TiePolicy::Average => {
            let mut start = 0;
            while start < order.len() {
                let v = column[order[start]];
                let mut end = start + 1;
                while end < order.len() && column[order[end]] == v {
                    end += 1;
                }
                // positions start+1 ..= end
                let mean = (start + 1 + end) as f64 / 2.0;
                for &t in &order[start..end] {
                    ranks[t] = mean;
                }
                start = end;
            }
        }
    }
    ranks
}

/// Maps each column to its scaled ranks, producing samples of the empirical
/// copula.
pub fn rank_transform(
    m: &SampleMatrix,
    scaling: RankScaling,
    tie_policy: TiePolicy,
) -> Result<PseudoObservations> {
    let rows = m.rows();
    let den = scaling.denominator(rows);
    let columns: Vec<Vec<f64>> = (0..m.cols())
        .map(|i| {
            column_ranks(&m.column(i), tie_policy)
                .into_iter()
                .map(|r| r / den)
                .collect()
        })
        .collect();
    Ok(PseudoObservations {
        values: SampleMatrix::from_columns(&columns)?,
        scaling,
        tie_policy,
    })
}
