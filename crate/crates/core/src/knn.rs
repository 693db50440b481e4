//! Exact k-nearest-neighbor search.
//!
//! Two backends are provided: a brute-force scan and a KD-tree. Both order
//! candidates by `(distance, index)` and compute distances with the same
//! function, so their results are identical, not merely close.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

mod kdtree;

pub use kdtree::KdTree;

/// Borrowed row-major point set.
#[derive(Debug, Clone, Copy)]
pub struct Points<'a> {
    data: &'a [f64],
    dim: usize,
}

impl<'a> Points<'a> {
    pub fn new(data: &'a [f64], dim: usize) -> Result<Self> {
        if dim == 0 || !data.len().is_multiple_of(dim) {
            return Err(Error::InvalidArgument(format!(
                "{} values do not form points of dimension {dim}",
                data.len()
            )));
        }
        Ok(Points { data, dim })
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn point(&self, i: usize) -> &'a [f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    /// Maximum absolute coordinate difference.
    #[default]
    Chebyshev,
    Euclidean,
}

impl NormKind {
    #[inline]
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            NormKind::Chebyshev => a
                .iter()
                .zip(b)
                .fold(0.0, |acc: f64, (x, y)| acc.max((x - y).abs())),
            NormKind::Euclidean => a
                .iter()
                .zip(b)
                .fold(0.0, |acc, (x, y)| {
                    let d = x - y;
                    acc + d * d
                })
                .sqrt(),
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormKind::Chebyshev => "chebyshev",
            NormKind::Euclidean => "euclidean",
        })
    }
}

impl FromStr for NormKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chebyshev" | "max" => Ok(NormKind::Chebyshev),
            "euclidean" => Ok(NormKind::Euclidean),
            _ => Err(Error::InvalidArgument(format!(
                "unknown norm {s:?}, expected chebyshev or euclidean"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Naive,
    #[default]
    KdTree,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Naive => "naive",
            Backend::KdTree => "kdtree",
        })
    }
}

impl FromStr for Backend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(Backend::Naive),
            "kdtree" => Ok(Backend::KdTree),
            _ => Err(Error::InvalidArgument(format!(
                "unknown backend {s:?}, expected naive or kdtree"
            ))),
        }
    }
}

/// The k nearest other points of one query point.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborResult {
    pub query_index: usize,
    pub kth_distance: f64,
    /// Sorted by `(distance, index)`.
    pub neighbor_indices: Vec<usize>,
}

/// `(distance, index)` ordering shared by both backends.
#[inline]
pub(crate) fn candidate_cmp(a: (f64, usize), b: (f64, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

/// Finds the k nearest neighbors of every point, excluding the point itself.
/// Ties in distance go to the lower index.
pub fn kth_neighbor_distances(
    points: Points<'_>,
    k: usize,
    norm: NormKind,
    backend: Backend,
) -> Result<Vec<NeighborResult>> {
    let n = points.len();
    if n == 0 {
        return Err(Error::InvalidArgument("empty point set".into()));
    }
    if k == 0 {
        return Err(Error::InvalidArgument(
            "neighbor order k must be at least 1".into(),
        ));
    }
    if k >= n {
        return Err(Error::TooFewSamples { k, samples: n });
    }
    let results = match backend {
        Backend::Naive => (0..n)
            .into_par_iter()
            .map(|q| naive_query(points, q, k, norm))
            .collect(),
        Backend::KdTree => {
            let tree = KdTree::build(points);
            (0..n)
                .into_par_iter()
                .map(|q| tree.query(q, k, norm))
                .collect()
        }
    };
    Ok(results)
}

fn naive_query(points: Points<'_>, q: usize, k: usize, norm: NormKind) -> NeighborResult {
    let query = points.point(q);
    let mut all: Vec<(f64, usize)> = (0..points.len())
        .filter(|&j| j != q)
        .map(|j| (norm.distance(query, points.point(j)), j))
        .collect();
    all.sort_unstable_by(|&a, &b| candidate_cmp(a, b));
    all.truncate(k);
    NeighborResult {
        query_index: q,
        kth_distance: all[k - 1].0,
        neighbor_indices: all.into_iter().map(|(_, j)| j).collect(),
    }
}

/// Number of other points within `radius` of `values[center]` on a line,
/// using `<` when `strict` and `<=` otherwise.
pub fn count_within(values: &[f64], center: usize, radius: f64, strict: bool) -> usize {
    let c = values[center];
    values
        .iter()
        .enumerate()
        .filter(|&(j, &v)| {
            let d = (v - c).abs();
            j != center && if strict { d < radius } else { d <= radius }
        })
        .count()
}

/// Sorted copy of a 1-D sample answering [`count_within`] queries in
/// logarithmic time with identical results.
#[derive(Debug, Clone)]
pub struct MarginalCounter {
    sorted: Vec<f64>,
}

impl MarginalCounter {
    pub fn new(values: &[f64]) -> Self {
        let mut sorted = values.to_vec();
        sorted.sort_unstable_by(f64::total_cmp);
        MarginalCounter { sorted }
    }

    /// Counts points other than one copy of `center` with `|v - center|`
    /// below (or at, when not strict) `radius`.
    pub fn count(&self, center: f64, radius: f64, strict: bool) -> usize {
        let inside = |d: f64| if strict { d < radius } else { d <= radius };
        // Both predicates are monotone over the sorted values because
        // floating-point subtraction is monotone in each argument.
        let lo = self
            .sorted
            .partition_point(|&v| v < center && !inside(center - v));
        let hi = self
            .sorted
            .partition_point(|&v| v <= center || inside(v - center));
        hi - lo - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dists(points: &[f64], dim: usize, k: usize, norm: NormKind) -> Vec<f64> {
        let p = Points::new(points, dim).unwrap();
        let a = kth_neighbor_distances(p, k, norm, Backend::Naive).unwrap();
        let b = kth_neighbor_distances(p, k, norm, Backend::KdTree).unwrap();
        assert_eq!(a, b);
        a.iter().map(|r| r.kth_distance).collect()
    }

    #[test]
    fn line_k1() {
        assert_eq!(
            dists(&[0.0, 1.0, 3.0], 1, 1, NormKind::Chebyshev),
            vec![1.0, 1.0, 2.0]
        );
    }

    #[test]
    fn plane_k1_chebyshev() {
        let pts = [0.0, 0.0, 1.0, 0.0, 0.0, 2.0];
        assert_eq!(dists(&pts, 2, 1, NormKind::Chebyshev), vec![1.0, 1.0, 2.0]);
    }

    #[test]
    fn duplicates_give_zero() {
        let pts = [0.5, 0.5, 2.0, 7.0];
        let d = dists(&pts, 1, 1, NormKind::Euclidean);
        assert_eq!(&d[..2], &[0.0, 0.0]);
    }

    #[test]
    fn ties_go_to_lower_index() {
        // point 1 is equidistant from 0 and 2
        let p = Points::new(&[0.0, 1.0, 2.0], 1).unwrap();
        for backend in [Backend::Naive, Backend::KdTree] {
            let r = kth_neighbor_distances(p, 1, NormKind::Chebyshev, backend).unwrap();
            assert_eq!(r[1].neighbor_indices, vec![0]);
        }
    }

    #[test]
    fn rejects_bad_k() {
        let p = Points::new(&[0.0, 1.0, 2.0], 1).unwrap();
        assert!(matches!(
            kth_neighbor_distances(p, 3, NormKind::Chebyshev, Backend::KdTree),
            Err(Error::TooFewSamples { k: 3, samples: 3 })
        ));
        assert!(kth_neighbor_distances(p, 0, NormKind::Chebyshev, Backend::Naive).is_err());
        let empty = Points::new(&[], 2).unwrap();
        assert!(kth_neighbor_distances(empty, 1, NormKind::Chebyshev, Backend::Naive).is_err());
    }

    #[test]
    fn counts() {
        let v = [0.0, 1.0, 2.0, 5.0];
        assert_eq!(count_within(&v, 1, 1.5, true), 2);
        assert_eq!(count_within(&v, 1, 1.0, true), 0);
        assert_eq!(count_within(&v, 1, 1.0, false), 2);
        assert_eq!(count_within(&v, 1, 0.5, true), 0);
        assert_eq!(count_within(&v, 1, 100.0, true), 3);
        let c = MarginalCounter::new(&v);
        assert_eq!(c.count(1.0, 1.5, true), 2);
        assert_eq!(c.count(1.0, 1.0, false), 2);
        assert_eq!(c.count(1.0, 100.0, true), 3);
    }

    #[test]
    fn parses_knobs() {
        assert_eq!(
            "euclidean".parse::<NormKind>().unwrap(),
            NormKind::Euclidean
        );
        assert_eq!("naive".parse::<Backend>().unwrap(), Backend::Naive);
        assert!("cosine".parse::<NormKind>().is_err());
        assert!("ball".parse::<Backend>().is_err());
    }

    proptest! {
        #[test]
        fn sorted_counter_matches_scan(
            raw in proptest::collection::vec(-20i32..20, 2..60),
            center in any::<prop::sample::Index>(),
            radius in 0.01f64..10.0,
            strict in any::<bool>(),
        ) {
            let v: Vec<f64> = raw.into_iter().map(|x| x as f64 * 0.25).collect();
            let c = center.index(v.len());
            let counter = MarginalCounter::new(&v);
            prop_assert_eq!(counter.count(v[c], radius, strict), count_within(&v, c, radius, strict));
            // radius landing exactly on a grid distance
            let r = (radius * 4.0).ceil() * 0.25;
            prop_assert_eq!(counter.count(v[c], r, strict), count_within(&v, c, r, strict));
        }

        #[test]
        fn backends_agree(n in 2usize..300, dim in 1usize..5, k in 1usize..8, seed in any::<u64>(), euclid in any::<bool>(), coarse in any::<bool>()) {
            use rand::{Rng, SeedableRng};
            let k = k.min(n - 1);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            // coarse grids force many exact distance ties
            let data: Vec<f64> = (0..n * dim)
                .map(|_| if coarse { rng.gen_range(0..4) as f64 } else { rng.gen::<f64>() })
                .collect();
            let p = Points::new(&data, dim).unwrap();
            let norm = if euclid { NormKind::Euclidean } else { NormKind::Chebyshev };
            let a = kth_neighbor_distances(p, k, norm, Backend::Naive).unwrap();
            let b = kth_neighbor_distances(p, k, norm, Backend::KdTree).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn nearest_distance_is_direct_distance(n in 2usize..100, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let data: Vec<f64> = (0..n * 2).map(|_| rng.gen::<f64>()).collect();
            let p = Points::new(&data, 2).unwrap();
            for norm in [NormKind::Chebyshev, NormKind::Euclidean] {
                for r in kth_neighbor_distances(p, 1, norm, Backend::KdTree).unwrap() {
                    let j = r.neighbor_indices[0];
                    prop_assert_eq!(norm.distance(p.point(r.query_index), p.point(j)), r.kth_distance);
                }
            }
        }

        #[test]
        fn translation_leaves_neighbors(n in 2usize..100, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            // dyadic coordinates and offset keep the shift exact
            let data: Vec<f64> = (0..n * 3).map(|_| rng.gen_range(0..1 << 20) as f64 / 1024.0).collect();
            let shifted: Vec<f64> = data.iter().map(|v| v + 4096.0).collect();
            let k = 3.min(n - 1);
            let a = kth_neighbor_distances(Points::new(&data, 3).unwrap(), k, NormKind::Chebyshev, Backend::KdTree).unwrap();
            let b = kth_neighbor_distances(Points::new(&shifted, 3).unwrap(), k, NormKind::Chebyshev, Backend::KdTree).unwrap();
            prop_assert_eq!(&a, &b);

            // generic offsets: euclidean agrees up to rounding of the shifted coordinates
            let data: Vec<f64> = (0..n * 3).map(|_| rng.gen::<f64>()).collect();
            let shifted: Vec<f64> = data.iter().map(|v| v + 0.3).collect();
            let a = kth_neighbor_distances(Points::new(&data, 3).unwrap(), k, NormKind::Euclidean, Backend::KdTree).unwrap();
            let b = kth_neighbor_distances(Points::new(&shifted, 3).unwrap(), k, NormKind::Euclidean, Backend::KdTree).unwrap();
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x.kth_distance - y.kth_distance).abs() <= 1e-14);
            }
        }
    }
}
