//! Finite (pseudo-)metric spaces with exact rational distances: betweenness,
//! intervals, median sets, gates, rectangles and approximate medians.
//!
//! A [`FiniteMetric`] is validated once at construction (symmetry, zero
//! diagonal, non-negativity, triangle inequality). All later predicates are
//! exact comparisons; internally distances are rescaled to a common
//! denominator so that betweenness tests are integer additions.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::bitset::PointSet;
use crate::rat::{self, Rat};

/// Default upper bound on the number of points accepted by cubic-time checks.
pub const DEFAULT_POINT_CAP: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricError {
    #[error("a metric needs at least one point")]
    Empty,
    #[error("row {row} has {len} entries, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("{got} labels given for {n} points")]
    LabelCount { got: usize, n: usize },
    #[error("d({i},{j}) != d({j},{i})")]
    Asymmetric { i: usize, j: usize },
    #[error("d({i},{i}) is not zero")]
    NonzeroDiagonal { i: usize },
    #[error("d({i},{j}) is negative")]
    Negative { i: usize, j: usize },
    #[error("distinct points {i} and {j} are at distance zero (pseudo-metrics must be flagged)")]
    ZeroDistance { i: usize, j: usize },
    #[error("triangle inequality fails: d({i},{k}) > d({i},{j}) + d({j},{k})")]
    Triangle { i: usize, j: usize, k: usize },
    #[error("point index {index} out of range for {n} points")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("operation needs a strict metric; quotient the pseudo-metric first")]
    PseudoMetric,
    #[error("not a median space: triple ({}, {}, {}) has {count} median points", .witness[0], .witness[1], .witness[2])]
    NotMedian { witness: [usize; 3], count: usize },
    #[error("{n} points exceed the configured cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("subset must be non-empty")]
    EmptySubset,
    #[error("delta must be non-negative")]
    NegativeDelta,
    #[error("point {point} does not lie in I({a},{b})")]
    NotInInterval { point: usize, a: usize, b: usize },
    #[error("point {index} has {got} coordinates, expected {dim}")]
    Dimension { index: usize, got: usize, dim: usize },
}

/// Distances times a common denominator, as machine or big integers.
#[derive(Debug, Clone)]
enum Scaled {
    Small(Vec<i128>),
    Big(Vec<BigInt>),
}

impl Scaled {
    fn new(dist: &[Vec<Rat>]) -> Self {
        let den = rat::common_denominator(dist.iter().flatten());
        let big: Vec<BigInt> = dist
            .iter()
            .flatten()
            .map(|v| (v * Rat::from_integer(den.clone())).to_integer())
            .collect();
        let limit = BigInt::from(1u8) << 124;
        if big.iter().all(|v| v.abs() < limit) {
            Scaled::Small(big.iter().map(|v| v.to_i128().unwrap()).collect())
        } else {
            Scaled::Big(big)
        }
    }

    /// Sign of `d[i] + d[j] - d[k]` (flat indices).
    fn excess_sign(&self, i: usize, j: usize, k: usize) -> std::cmp::Ordering {
        match self {
            Scaled::Small(v) => (v[i] + v[j]).cmp(&v[k]),
            Scaled::Big(v) => (&v[i] + &v[j]).cmp(&v[k]),
        }
    }
}

/// Exact finite (pseudo-)metric on points `0..n`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "MetricRepr", into = "MetricRepr")]
pub struct FiniteMetric {
    labels: Option<Vec<String>>,
    dist: Vec<Vec<Rat>>,
    pseudo: bool,
    scaled: Scaled,
}

#[derive(Serialize, Deserialize)]
struct MetricRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
    #[serde(with = "rat::serde_matrix")]
    dist: Vec<Vec<Rat>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pseudo: bool,
}

impl TryFrom<MetricRepr> for FiniteMetric {
    type Error = MetricError;

    fn try_from(r: MetricRepr) -> Result<Self, MetricError> {
        let m = FiniteMetric::new(r.dist, r.pseudo)?;
        match r.labels {
            Some(l) => m.with_labels(l),
            None => Ok(m),
        }
    }
}

impl From<FiniteMetric> for MetricRepr {
    fn from(m: FiniteMetric) -> Self {
        MetricRepr {
            labels: m.labels,
            dist: m.dist,
            pseudo: m.pseudo,
        }
    }
}

impl PartialEq for FiniteMetric {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.dist == other.dist && self.pseudo == other.pseudo
    }
}

/// Outcome of [`FiniteMetric::is_median`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MedianVerdict {
    Median,
    /// Lexicographically smallest triple whose median set is not a singleton.
    NotMedian { witness: [usize; 3], medians: PointSet },
}

impl MedianVerdict {
    pub fn is_median(&self) -> bool {
        matches!(self, MedianVerdict::Median)
    }
}

/// Result of merging zero-distance classes of a pseudo-metric.
#[derive(Debug, Clone)]
pub struct Quotient {
    pub metric: FiniteMetric,
    /// Class index of every original point.
    pub class_of: Vec<usize>,
    /// Smallest original point of every class.
    pub representatives: Vec<usize>,
}

impl FiniteMetric {
    /// Validates and builds a metric. With `allow_pseudo`, distinct points may be at distance zero.
    pub fn new(dist: Vec<Vec<Rat>>, allow_pseudo: bool) -> Result<Self, MetricError> {
        let n = dist.len();
        if n == 0 {
            return Err(MetricError::Empty);
        }
        for (row, r) in dist.iter().enumerate() {
            if r.len() != n {
                return Err(MetricError::NotSquare { row, len: r.len(), n });
            }
        }
        for i in 0..n {
            if !dist[i][i].is_zero() {
                return Err(MetricError::NonzeroDiagonal { i });
            }
            for j in 0..n {
                if dist[i][j] != dist[j][i] {
                    return Err(MetricError::Asymmetric { i: i.min(j), j: i.max(j) });
                }
                if dist[i][j].is_negative() {
                    return Err(MetricError::Negative { i, j });
                }
                if i < j && !allow_pseudo && dist[i][j].is_zero() {
                    return Err(MetricError::ZeroDistance { i, j });
                }
            }
        }
        let scaled = Scaled::new(&dist);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if scaled.excess_sign(i * n + j, j * n + k, i * n + k).is_lt() {
                        return Err(MetricError::Triangle { i, j, k });
                    }
                }
            }
        }
        Ok(Self {
            labels: None,
            dist,
            pseudo: allow_pseudo,
            scaled,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, MetricError> {
        if labels.len() != self.len() {
            return Err(MetricError::LabelCount {
                got: labels.len(),
                n: self.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Induced ℓ¹ metric of a coordinate list.
    pub fn from_l1(points: &L1Points, allow_pseudo: bool) -> Result<Self, MetricError> {
        let n = points.len();
        let dist = (0..n)
            .map(|i| (0..n).map(|j| points.l1_distance(i, j)).collect())
            .collect();
        Self::new(dist, allow_pseudo)
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn is_pseudo(&self) -> bool {
        self.pseudo
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn dist(&self, i: usize, j: usize) -> &Rat {
        &self.dist[i][j]
    }

    pub fn matrix(&self) -> &[Vec<Rat>] {
        &self.dist
    }

    pub fn check_index(&self, index: usize) -> Result<(), MetricError> {
        if index < self.len() {
            Ok(())
        } else {
            Err(MetricError::IndexOutOfRange { index, n: self.len() })
        }
    }

    fn check_all(&self, idx: &[usize]) -> Result<(), MetricError> {
        idx.iter().try_for_each(|&i| self.check_index(i))
    }

    // unchecked: d(a,x) + d(x,b) == d(a,b)
    pub(crate) fn between(&self, a: usize, x: usize, b: usize) -> bool {
        let n = self.len();
        self.scaled.excess_sign(a * n + x, x * n + b, a * n + b).is_eq()
    }

    pub fn is_between(&self, a: usize, x: usize, b: usize) -> Result<bool, MetricError> {
        self.check_all(&[a, x, b])?;
        Ok(self.between(a, x, b))
    }

    pub(crate) fn interval_unchecked(&self, a: usize, b: usize) -> PointSet {
        let n = self.len();
        PointSet::from_indices(n, (0..n).filter(|&x| self.between(a, x, b)))
    }

    /// `I(a,b)`: every point `x` with `d(a,x) + d(x,b) = d(a,b)`.
    pub fn interval(&self, a: usize, b: usize) -> Result<PointSet, MetricError> {
        self.check_all(&[a, b])?;
        Ok(self.interval_unchecked(a, b))
    }

    /// `I(a,b) ∩ I(b,c) ∩ I(a,c)`.
    pub fn median_set(&self, a: usize, b: usize, c: usize) -> Result<PointSet, MetricError> {
        self.check_all(&[a, b, c])?;
        Ok(self
            .interval_unchecked(a, b)
            .intersection(&self.interval_unchecked(b, c))
            .intersection(&self.interval_unchecked(a, c)))
    }

    /// Decides whether every triple has exactly one median point.
    pub fn is_median(&self) -> Result<MedianVerdict, MetricError> {
        self.is_median_capped(DEFAULT_POINT_CAP)
    }

    pub fn is_median_capped(&self, cap: usize) -> Result<MedianVerdict, MetricError> {
        if self.pseudo && self.has_zero_pair() {
            return Err(MetricError::PseudoMetric);
        }
        if self.len() > cap {
            return Err(MetricError::CapExceeded { n: self.len(), cap });
        }
        let intervals = self.all_intervals();
        Ok(match first_bad_triple(self.len(), &intervals) {
            None => MedianVerdict::Median,
            Some((witness, medians)) => MedianVerdict::NotMedian { witness, medians },
        })
    }

    fn has_zero_pair(&self) -> bool {
        let n = self.len();
        (0..n).any(|i| (i + 1..n).any(|j| self.dist[i][j].is_zero()))
    }

    fn all_intervals(&self) -> Vec<PointSet> {
        let n = self.len();
        let mut out = vec![PointSet::empty(n); n * n];
        for a in 0..n {
            for b in a..n {
                let iv = self.interval_unchecked(a, b);
                out[b * n + a] = iv.clone();
                out[a * n + b] = iv;
            }
        }
        out
    }

    /// `d(x, Y)`, the minimum distance from `x` to a point of `Y`.
    pub fn distance_to_set(&self, x: usize, set: &PointSet) -> Result<Rat, MetricError> {
        self.check_index(x)?;
        set.iter()
            .map(|y| self.dist[x][y].clone())
            .min()
            .ok_or(MetricError::EmptySubset)
    }

    /// The point `p ∈ Y` lying between `x` and every point of `Y`, if there is one.
    pub fn gate(&self, x: usize, set: &PointSet) -> Result<Option<usize>, MetricError> {
        self.check_index(x)?;
        if set.is_empty() {
            return Err(MetricError::EmptySubset);
        }
        if let Some(bad) = set.iter().find(|&y| y >= self.len()) {
            return Err(MetricError::IndexOutOfRange { index: bad, n: self.len() });
        }
        Ok(set
            .iter()
            .find(|&p| set.iter().all(|y| self.between(x, p, y))))
    }

    /// `[a,b,c,d]` is a rectangle when `(a,b,c)`, `(b,c,d)`, `(c,d,a)` and `(d,a,b)` are geodesic.
    pub fn is_rectangle(&self, a: usize, b: usize, c: usize, d: usize) -> Result<bool, MetricError> {
        self.check_all(&[a, b, c, d])?;
        Ok(self.rectangle_unchecked(a, b, c, d))
    }

    pub(crate) fn rectangle_unchecked(&self, a: usize, b: usize, c: usize, d: usize) -> bool {
        self.between(a, b, c) && self.between(b, c, d) && self.between(c, d, a) && self.between(d, a, b)
    }

    /// Whether `d(x_1,x_k)` equals the length of the path `x_1, .., x_k`.
    pub fn is_geodesic(&self, seq: &[usize]) -> Result<bool, MetricError> {
        self.check_all(seq)?;
        if seq.len() <= 1 {
            return Ok(true);
        }
        let total: Rat = seq.windows(2).map(|w| &self.dist[w[0]][w[1]]).sum();
        Ok(total == self.dist[seq[0]][seq[seq.len() - 1]])
    }

    /// Points between `a` and `b` up to `delta`: `d(a,x) + d(x,b) <= d(a,b) + delta`.
    pub fn approx_interval(&self, a: usize, b: usize, delta: &Rat) -> Result<PointSet, MetricError> {
        self.check_all(&[a, b])?;
        if delta.is_negative() {
            return Err(MetricError::NegativeDelta);
        }
        let n = self.len();
        let bound = &self.dist[a][b] + delta;
        Ok(PointSet::from_indices(
            n,
            (0..n).filter(|&x| &self.dist[a][x] + &self.dist[x][b] <= bound),
        ))
    }

    /// `M_δ(a,b,c) = I_2δ(a,b) ∩ I_2δ(b,c) ∩ I_2δ(a,c)`.
    pub fn delta_median_set(&self, a: usize, b: usize, c: usize, delta: &Rat) -> Result<PointSet, MetricError> {
        if delta.is_negative() {
            return Err(MetricError::NegativeDelta);
        }
        let two_delta = delta * rat::int(2);
        Ok(self
            .approx_interval(a, b, &two_delta)?
            .intersection(&self.approx_interval(b, c, &two_delta)?)
            .intersection(&self.approx_interval(a, c, &two_delta)?))
    }

    /// Closed ball `B(x, r)`.
    pub fn ball(&self, x: usize, radius: &Rat) -> Result<PointSet, MetricError> {
        self.check_index(x)?;
        let n = self.len();
        Ok(PointSet::from_indices(n, (0..n).filter(|&y| &self.dist[x][y] <= radius)))
    }

    /// Merges zero-distance classes into single points.
    pub fn quotient(&self) -> Quotient {
        let n = self.len();
        let mut class_of = vec![usize::MAX; n];
        let mut representatives = Vec::new();
        for i in 0..n {
            if class_of[i] != usize::MAX {
                continue;
            }
            let c = representatives.len();
            representatives.push(i);
            for j in i..n {
                if self.dist[i][j].is_zero() {
                    class_of[j] = c;
                }
            }
        }
        let dist = representatives
            .iter()
            .map(|&i| representatives.iter().map(|&j| self.dist[i][j].clone()).collect())
            .collect();
        let mut metric = FiniteMetric::new(dist, false).expect("quotient of a valid pseudo-metric is a metric");
        if let Some(l) = &self.labels {
            metric.labels = Some(representatives.iter().map(|&i| l[i].clone()).collect());
        }
        Quotient {
            metric,
            class_of,
            representatives,
        }
    }

    /// Restriction to a subset of points, in the given order.
    pub fn restrict(&self, points: &[usize]) -> Result<FiniteMetric, MetricError> {
        self.check_all(points)?;
        let dist = points
            .iter()
            .map(|&i| points.iter().map(|&j| self.dist[i][j].clone()).collect())
            .collect();
        let mut m = FiniteMetric::new(dist, self.pseudo || has_repeat(points))?;
        if let Some(l) = &self.labels {
            m.labels = Some(points.iter().map(|&i| l[i].clone()).collect());
        }
        Ok(m)
    }
}

fn has_repeat(points: &[usize]) -> bool {
    let mut v = points.to_vec();
    v.sort_unstable();
    v.windows(2).any(|w| w[0] == w[1])
}

fn first_bad_triple(n: usize, intervals: &[PointSet]) -> Option<([usize; 3], PointSet)> {
    for a in 0..n {
        for b in a + 1..n {
            let ab = &intervals[a * n + b];
            for c in b + 1..n {
                let m = ab
                    .intersection(&intervals[b * n + c])
                    .intersection(&intervals[a * n + c]);
                if m.len() != 1 {
                    return Some(([a, b, c], m));
                }
            }
        }
    }
    None
}

/// Four corner indices `[a, b, c, d]` of a rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rectangle {
    pub corners: [usize; 4],
}

/// A strict metric certified to be median, with its intervals cached.
///
/// Construction runs the full triple check once; afterwards `median(a,b,c)`
/// is a bitset intersection.
#[derive(Debug, Clone)]
pub struct MedianSpace {
    metric: FiniteMetric,
    intervals: Vec<PointSet>,
}

impl MedianSpace {
    pub fn new(metric: FiniteMetric) -> Result<Self, MetricError> {
        Self::with_cap(metric, DEFAULT_POINT_CAP)
    }

    pub fn with_cap(metric: FiniteMetric, cap: usize) -> Result<Self, MetricError> {
        if metric.pseudo && metric.has_zero_pair() {
            return Err(MetricError::PseudoMetric);
        }
        if metric.len() > cap {
            return Err(MetricError::CapExceeded { n: metric.len(), cap });
        }
        let intervals = metric.all_intervals();
        if let Some((witness, m)) = first_bad_triple(metric.len(), &intervals) {
            return Err(MetricError::NotMedian {
                witness,
                count: m.len(),
            });
        }
        Ok(Self { metric, intervals })
    }

    pub fn metric(&self) -> &FiniteMetric {
        &self.metric
    }

    pub fn into_metric(self) -> FiniteMetric {
        self.metric
    }

    pub fn len(&self) -> usize {
        self.metric.len()
    }

    pub fn is_empty(&self) -> bool {
        self.metric.is_empty()
    }

    pub fn dist(&self, i: usize, j: usize) -> &Rat {
        self.metric.dist(i, j)
    }

    pub fn interval(&self, a: usize, b: usize) -> &PointSet {
        &self.intervals[a * self.len() + b]
    }

    /// The median point `m(a,b,c)`. Panics on out-of-range indices.
    pub fn median(&self, a: usize, b: usize, c: usize) -> usize {
        self.interval(a, b)
            .intersection(self.interval(b, c))
            .intersection(self.interval(a, c))
            .first()
            .expect("median space has a median for every triple")
    }

    pub fn between(&self, a: usize, x: usize, b: usize) -> bool {
        self.interval(a, b).contains(x)
    }

    /// Convex: contains `I(a,b)` whenever it contains `a` and `b`.
    pub fn is_convex(&self, set: &PointSet) -> bool {
        let pts = set.to_vec();
        pts.iter()
            .all(|&a| pts.iter().all(|&b| self.interval(a, b).is_subset(set)))
    }

    /// Gate of `x` in the interval `I(a,b)`, which is always `m(x,a,b)`.
    pub fn interval_gate(&self, x: usize, a: usize, b: usize) -> usize {
        self.median(x, a, b)
    }

    /// The projection of `(x,y)` with target `(a,b)`: `(m(x,a,b), m(y,a,b))`.
    pub fn project_pair(&self, x: usize, y: usize, a: usize, b: usize) -> Result<(usize, usize), MetricError> {
        self.metric.check_all(&[x, y, a, b])?;
        Ok((self.median(x, a, b), self.median(y, a, b)))
    }

    /// Straightening of the path `(a,x,y,b)` with `x,y ∈ I(a,b)`: `(m(a,x,y), m(b,x,y))`.
    pub fn straighten_path(&self, a: usize, x: usize, y: usize, b: usize) -> Result<(usize, usize), MetricError> {
        self.metric.check_all(&[a, x, y, b])?;
        for p in [x, y] {
            if !self.between(a, p, b) {
                return Err(MetricError::NotInInterval { point: p, a, b });
            }
        }
        Ok((self.median(a, x, y), self.median(b, x, y)))
    }

    /// Central rectangle `[x', a', y', b']` of the quadrilateral `[x, a, y, b]`.
    pub fn central_rectangle(&self, x: usize, a: usize, y: usize, b: usize) -> Result<Rectangle, MetricError> {
        let (xp, yp) = self.project_pair(x, y, a, b)?;
        let (ap, bp) = (self.median(a, xp, yp), self.median(b, xp, yp));
        Ok(Rectangle {
            corners: [xp, ap, yp, bp],
        })
    }

    /// Whether `[x',a',y',b']` is a rectangle satisfying the three defining
    /// conditions of the central rectangle of `[x,a,y,b]`.
    pub fn satisfies_central_conditions(&self, quad: [usize; 4], rect: Rectangle) -> bool {
        let [x, a, y, b] = quad;
        let [xp, ap, yp, bp] = rect.corners;
        let m = &self.metric;
        m.rectangle_unchecked(xp, ap, yp, bp)
            && geodesic4(m, x, xp, ap, a)
            && geodesic4(m, a, ap, yp, y)
            && geodesic4(m, y, yp, bp, b)
            && geodesic4(m, b, bp, xp, x)
            && geodesic4(m, a, ap, bp, b)
            && m.between(x, xp, yp)
            && m.between(y, yp, xp)
    }
}

fn geodesic4(m: &FiniteMetric, p: usize, q: usize, r: usize, s: usize) -> bool {
    m.is_geodesic(&[p, q, r, s]).unwrap_or(false)
}

/// Points of `ℚ^dim` with the ℓ¹ distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "L1Repr", into = "L1Repr")]
pub struct L1Points {
    dim: usize,
    coords: Vec<Vec<Rat>>,
}

#[derive(Serialize, Deserialize)]
struct L1Repr {
    dim: usize,
    #[serde(with = "rat::serde_matrix")]
    points: Vec<Vec<Rat>>,
}

impl TryFrom<L1Repr> for L1Points {
    type Error = MetricError;
    fn try_from(r: L1Repr) -> Result<Self, MetricError> {
        L1Points::new(r.dim, r.points)
    }
}

impl From<L1Points> for L1Repr {
    fn from(p: L1Points) -> Self {
        L1Repr {
            dim: p.dim,
            points: p.coords,
        }
    }
}

impl L1Points {
    pub fn new(dim: usize, coords: Vec<Vec<Rat>>) -> Result<Self, MetricError> {
        for (index, c) in coords.iter().enumerate() {
            if c.len() != dim {
                return Err(MetricError::Dimension {
                    index,
                    got: c.len(),
                    dim,
                });
            }
        }
        Ok(Self { dim, coords })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[Vec<Rat>] {
        &self.coords
    }

    pub fn point(&self, i: usize) -> &[Rat] {
        &self.coords[i]
    }

    pub fn l1_distance(&self, i: usize, j: usize) -> Rat {
        l1(&self.coords[i], &self.coords[j])
    }
}

pub fn l1(p: &[Rat], q: &[Rat]) -> Rat {
    p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum()
}

/// Coordinatewise median `a + b + c - max - min` of three vectors.
pub fn coordinate_median(p: &[Rat], q: &[Rat], r: &[Rat]) -> Vec<Rat> {
    p.iter()
        .zip(q)
        .zip(r)
        .map(|((a, b), c)| {
            let mut v = [a, b, c];
            v.sort();
            v[1].clone()
        })
        .collect()
}

/// Median hull of a finite point list inside `(ℚ^dim, ℓ¹)`.
#[derive(Debug, Clone)]
pub struct MedianClosure {
    /// Distinct generators first (input order), then each round of new points in lexicographic order.
    pub points: L1Points,
    pub metric: FiniteMetric,
    /// Closure index of every input point.
    pub generators: Vec<usize>,
}

/// Closes a point list under the coordinatewise median.
///
/// Rounds are breadth-first: each round adds the medians of triples involving
/// at least one point from the previous round.
pub fn median_closure(input: &L1Points) -> Result<MedianClosure, MetricError> {
    median_closure_capped(input, usize::MAX)
}

/// [`median_closure`] that stops with [`MetricError::CapExceeded`] once more than `cap` points exist.
pub fn median_closure_capped(input: &L1Points, cap: usize) -> Result<MedianClosure, MetricError> {
    use std::collections::{BTreeSet, HashMap};

    let mut index: HashMap<Vec<Rat>, usize> = HashMap::new();
    let mut pts: Vec<Vec<Rat>> = Vec::new();
    let mut generators = Vec::with_capacity(input.len());
    for c in input.coords() {
        let id = *index.entry(c.clone()).or_insert_with(|| {
            pts.push(c.clone());
            pts.len() - 1
        });
        generators.push(id);
    }
    if pts.len() > cap {
        return Err(MetricError::CapExceeded { n: pts.len(), cap });
    }
    let mut frontier_start = 0;
    loop {
        let n = pts.len();
        let mut fresh: BTreeSet<Vec<Rat>> = BTreeSet::new();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    if c < frontier_start {
                        continue;
                    }
                    let m = coordinate_median(&pts[a], &pts[b], &pts[c]);
                    if !index.contains_key(&m) {
                        fresh.insert(m);
                    }
                }
            }
        }
        if fresh.is_empty() {
            break;
        }
        frontier_start = n;
        if n + fresh.len() > cap {
            return Err(MetricError::CapExceeded {
                n: n + fresh.len(),
                cap,
            });
        }
        for p in fresh {
            index.insert(p.clone(), pts.len());
            pts.push(p);
        }
    }
    let points = L1Points::new(input.dim(), pts)?;
    let metric = FiniteMetric::from_l1(&points, false)?;
    Ok(MedianClosure {
        points,
        metric,
        generators,
    })
}
