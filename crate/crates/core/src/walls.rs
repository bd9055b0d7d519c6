//! Measured walls on finite sets.
//!
//! A wall is a bipartition `h ⊔ h^c` of the points carrying a positive weight.
//! This module computes wall intervals `W(F|G)`, the ring identities for their
//! intersections and complements, and, for a median space, the canonical
//! family of convex walls whose measure reproduces the metric. On top of that
//! it implements the reduction of `W(F|G)` to a single `W(p|q)` and the
//! subdivision procedure turning a decomposition `W(a|b) = ⊔ W(x_j|y_j)` into
//! a geodesic sequence.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::bitset::{IndexSet, PointSet, WallFamily};
use crate::metric::{MedianSpace, MetricError};
use crate::rat::{self, Rat};

/// Largest `|F ∪ G|` accepted by [`WallSpace::ring_complement`].
pub const RING_COMPLEMENT_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WallError {
    #[error("wall {wall} has non-positive weight")]
    NonPositiveWeight { wall: usize },
    #[error("wall {wall} mentions point {point}, but the space has {n} points")]
    PointOutOfRange { wall: usize, point: usize, n: usize },
    #[error("set mentions point {point}, but the space has {n} points")]
    SetOutOfRange { point: usize, n: usize },
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("both sets must be non-empty")]
    EmptySet,
    #[error("|F ∪ G| = {size} exceeds the complement enumeration cap {cap}")]
    CapExceeded { size: usize, cap: usize },
    #[error("sequence is not geodesic")]
    NotGeodesic,
    #[error("pair families do not decompose W(a|b): wall {wall} is {problem}")]
    NotADecomposition { wall: usize, problem: &'static str },
    #[error("pair families do not decompose W(a|b): W(a|b) is non-empty but no pairs were given")]
    EmptyDecomposition,
    #[error("internal verification failed: {0}")]
    Verification(String),
}

/// A bipartition `h ⊔ h^c` with a positive weight. `h` may be empty or everything.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Wall {
    pub h: PointSet,
    #[serde(with = "rat::serde_str")]
    pub weight: Rat,
}

impl Wall {
    pub fn separates(&self, x: usize, y: usize) -> bool {
        self.h.contains(x) != self.h.contains(y)
    }

    fn splits(&self, f: &PointSet, g: &PointSet) -> bool {
        let hc = self.h.complement();
        (f.is_subset(&self.h) && g.is_subset(&hc)) || (f.is_subset(&hc) && g.is_subset(&self.h))
    }
}

/// Finite set of points `0..n` with a finite list of weighted walls.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "WallSpaceRepr", into = "WallSpaceRepr")]
pub struct WallSpace {
    n: usize,
    walls: Vec<Wall>,
}

#[derive(Serialize, Deserialize)]
struct WallSpaceRepr {
    n: usize,
    walls: Vec<Wall>,
}

impl TryFrom<WallSpaceRepr> for WallSpace {
    type Error = WallError;
    fn try_from(r: WallSpaceRepr) -> Result<Self, WallError> {
        let mut walls = Vec::with_capacity(r.walls.len());
        for (i, w) in r.walls.into_iter().enumerate() {
            let h = w.h.rehome(r.n).ok_or_else(|| WallError::PointOutOfRange {
                wall: i,
                point: w.h.iter().last().unwrap_or(0),
                n: r.n,
            })?;
            walls.push(Wall { h, weight: w.weight });
        }
        WallSpace::new(r.n, walls)
    }
}

impl From<WallSpace> for WallSpaceRepr {
    fn from(w: WallSpace) -> Self {
        WallSpaceRepr { n: w.n, walls: w.walls }
    }
}

/// The two parts of `W(F|G) ∩ W(F'|G')`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingIntersection {
    /// `W(F ∪ F' | G ∪ G')`
    pub aligned: WallFamily,
    /// `W(F ∪ G' | G ∪ F')`
    pub crossed: WallFamily,
}

/// One block `W(S|T)` of the complement decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplementBlock {
    pub s: PointSet,
    pub t: PointSet,
    pub family: WallFamily,
}

impl WallSpace {
    pub fn new(n: usize, walls: Vec<Wall>) -> Result<Self, WallError> {
        for (i, w) in walls.iter().enumerate() {
            if !w.weight.is_positive() {
                return Err(WallError::NonPositiveWeight { wall: i });
            }
            if w.h.universe() != n {
                let point = w.h.iter().find(|&p| p >= n).unwrap_or(w.h.universe());
                return Err(WallError::PointOutOfRange { wall: i, point, n });
            }
        }
        Ok(Self { n, walls })
    }

    /// Convenience constructor from index lists.
    pub fn from_lists(n: usize, walls: Vec<(Vec<usize>, Rat)>) -> Result<Self, WallError> {
        let mut out = Vec::with_capacity(walls.len());
        for (i, (h, weight)) in walls.into_iter().enumerate() {
            if let Some(&point) = h.iter().find(|&&p| p >= n) {
                return Err(WallError::PointOutOfRange { wall: i, point, n });
            }
            out.push(Wall {
                h: PointSet::from_indices(n, h),
                weight,
            });
        }
        Self::new(n, out)
    }

    pub fn n_points(&self) -> usize {
        self.n
    }

    pub fn walls(&self) -> &[Wall] {
        &self.walls
    }

    pub fn len(&self) -> usize {
        self.walls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.walls.is_empty()
    }

    fn check_set(&self, s: &PointSet) -> Result<PointSet, WallError> {
        s.rehome(self.n).ok_or_else(|| WallError::SetOutOfRange {
            point: s.iter().last().unwrap_or(0),
            n: self.n,
        })
    }

    fn check_point(&self, x: usize) -> Result<(), WallError> {
        if x < self.n {
            Ok(())
        } else {
            Err(WallError::SetOutOfRange { point: x, n: self.n })
        }
    }

    /// `W(F|G)`: walls with `F` on one side and `G` on the other. `W(A|A) = ∅`.
    pub fn wall_interval(&self, f: &PointSet, g: &PointSet) -> Result<WallFamily, WallError> {
        let (f, g) = (self.check_set(f)?, self.check_set(g)?);
        Ok(self.wall_interval_unchecked(&f, &g))
    }

    fn wall_interval_unchecked(&self, f: &PointSet, g: &PointSet) -> WallFamily {
        if f == g {
            return WallFamily::empty(self.len());
        }
        IndexSet::from_indices(
            self.len(),
            self.walls
                .iter()
                .enumerate()
                .filter(|(_, w)| w.splits(f, g))
                .map(|(i, _)| i),
        )
    }

    /// `W(x|y)` for single points.
    pub fn separating(&self, x: usize, y: usize) -> Result<WallFamily, WallError> {
        self.check_point(x)?;
        self.check_point(y)?;
        Ok(self.separating_unchecked(x, y))
    }

    fn separating_unchecked(&self, x: usize, y: usize) -> WallFamily {
        IndexSet::from_indices(
            self.len(),
            self.walls
                .iter()
                .enumerate()
                .filter(|(_, w)| w.separates(x, y))
                .map(|(i, _)| i),
        )
    }

    pub fn measure(&self, family: &WallFamily) -> Rat {
        family.iter().map(|i| &self.walls[i].weight).sum()
    }

    /// Wall pseudo-metric `μ(W(x|y))`.
    pub fn wall_pdist(&self, x: usize, y: usize) -> Result<Rat, WallError> {
        Ok(self.measure(&self.separating(x, y)?))
    }

    /// Full wall pseudo-metric matrix.
    pub fn pdist_matrix(&self) -> Vec<Vec<Rat>> {
        (0..self.n)
            .map(|x| {
                (0..self.n)
                    .map(|y| self.measure(&self.separating_unchecked(x, y)))
                    .collect()
            })
            .collect()
    }

    /// `W(F|G) ∩ W(F'|G') = W(F∪F' | G∪G') ⊔ W(F∪G' | G∪F')`, checked against the direct intersection.
    pub fn ring_intersect(
        &self,
        (f, g): (&PointSet, &PointSet),
        (f2, g2): (&PointSet, &PointSet),
    ) -> Result<RingIntersection, WallError> {
        let (f, g, f2, g2) = (
            self.check_set(f)?,
            self.check_set(g)?,
            self.check_set(f2)?,
            self.check_set(g2)?,
        );
        let aligned = self.wall_interval_unchecked(&f.union(&f2), &g.union(&g2));
        let crossed = self.wall_interval_unchecked(&f.union(&g2), &g.union(&f2));
        let direct = self
            .wall_interval_unchecked(&f, &g)
            .intersection(&self.wall_interval_unchecked(&f2, &g2));
        if aligned.union(&crossed) != direct {
            return Err(WallError::Verification(format!(
                "ring intersection parts {aligned:?} ∪ {crossed:?} differ from {direct:?}"
            )));
        }
        let nonempty = [&f, &g, &f2, &g2].iter().all(|s| !s.is_empty());
        if nonempty && !aligned.is_disjoint(&crossed) {
            return Err(WallError::Verification(format!(
                "ring intersection parts {aligned:?} and {crossed:?} overlap"
            )));
        }
        Ok(RingIntersection { aligned, crossed })
    }

    /// `W(F|G)^c = ⊔ W(S|T)` over the unordered bipartitions `{S,T}` of `F ∪ G` other than `{F,G}`.
    ///
    /// Blocks are listed by the bitmask of `S` over the sorted members of
    /// `F ∪ G`, with the smallest member always placed in `S`.
    pub fn ring_complement(&self, f: &PointSet, g: &PointSet) -> Result<Vec<ComplementBlock>, WallError> {
        let (f, g) = (self.check_set(f)?, self.check_set(g)?);
        if f.is_empty() || g.is_empty() {
            return Err(WallError::EmptySet);
        }
        let union = f.union(&g);
        let members = union.to_vec();
        let u = members.len();
        if u > RING_COMPLEMENT_CAP {
            return Err(WallError::CapExceeded {
                size: u,
                cap: RING_COMPLEMENT_CAP,
            });
        }
        let mut blocks = Vec::new();
        // members[0] always in S; the remaining u-1 members choose a side
        for mask in 0u64..(1u64 << (u - 1)) {
            let s = PointSet::from_indices(
                self.n,
                std::iter::once(members[0]).chain(
                    (1..u)
                        .filter(|i| mask >> (i - 1) & 1 == 1)
                        .map(|i| members[i]),
                ),
            );
            let t = union.difference(&s);
            if (s == f && t == g) || (s == g && t == f) {
                continue;
            }
            let family = self.wall_interval_unchecked(&s, &t);
            blocks.push(ComplementBlock { s, t, family });
        }
        let target = self.wall_interval_unchecked(&f, &g).complement();
        let mut covered = WallFamily::empty(self.len());
        for b in &blocks {
            if !covered.is_disjoint(&b.family) {
                return Err(WallError::Verification("complement blocks overlap".into()));
            }
            covered = covered.union(&b.family);
        }
        if covered != target {
            return Err(WallError::Verification(format!(
                "complement blocks cover {covered:?}, expected {target:?}"
            )));
        }
        Ok(blocks)
    }

    /// Canonical cut of each wall: the side not containing point 0.
    pub fn canonical_cut(&self, wall: usize) -> PointSet {
        let h = &self.walls[wall].h;
        if self.n > 0 && h.contains(0) {
            h.complement()
        } else {
            h.clone()
        }
    }
}

/// A median space together with its canonical convex walls.
#[derive(Debug, Clone)]
pub struct MedianWalls {
    space: MedianSpace,
    walls: WallSpace,
    /// Representative oriented edge `(x, y)` of each wall; `h` is the side of `x`.
    representatives: Vec<(usize, usize)>,
}

/// Extracts the convex walls of a median space.
///
/// Cover edges (pairs with `I(x,y) = {x,y}`) are grouped into classes by the
/// relation "opposite sides of a rectangle"; each class yields the wall
/// `h = { z : m(x,y,z) = x }` with weight `d(x,y)` for its lexicographically
/// smallest edge `(x,y)`. Convexity of both sides and the identity
/// `μ(W(x|y)) = d(x,y)` are verified for every pair before returning.
pub fn extract_convex_walls(space: &MedianSpace) -> Result<MedianWalls, WallError> {
    let n = space.len();
    let m = space.metric();
    let mut edges = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            if space.interval(x, y).len() == 2 {
                edges.push((x, y));
            }
        }
    }
    let mut uf = UnionFind::new(edges.len());
    for (i, &(x, y)) in edges.iter().enumerate() {
        for (j, &(u, v)) in edges.iter().enumerate().skip(i + 1) {
            // (x,y) ∥ (u,v) iff [x,y,v,u] is a rectangle; also try the flipped orientation
            if m.rectangle_unchecked(x, y, v, u) || m.rectangle_unchecked(x, y, u, v) {
                uf.union(i, j);
            }
        }
    }
    let mut class_rep: Vec<Option<usize>> = vec![None; edges.len()];
    let mut representatives = Vec::new();
    for i in 0..edges.len() {
        let r = uf.find(i);
        if class_rep[r].is_none() {
            class_rep[r] = Some(representatives.len());
            representatives.push(edges[i]);
        }
    }
    let walls = representatives
        .iter()
        .map(|&(x, y)| Wall {
            h: PointSet::from_indices(n, (0..n).filter(|&z| space.median(x, y, z) == x)),
            weight: m.dist(x, y).clone(),
        })
        .collect();
    let walls = WallSpace::new(n, walls)?;
    let out = MedianWalls {
        space: space.clone(),
        walls,
        representatives,
    };
    out.verify()?;
    Ok(out)
}

impl MedianWalls {
    pub fn space(&self) -> &MedianSpace {
        &self.space
    }

    pub fn walls(&self) -> &WallSpace {
        &self.walls
    }

    pub fn representatives(&self) -> &[(usize, usize)] {
        &self.representatives
    }

    pub fn separating(&self, x: usize, y: usize) -> WallFamily {
        self.walls.separating_unchecked(x, y)
    }

    fn verify(&self) -> Result<(), WallError> {
        let n = self.space.len();
        for (i, w) in self.walls.walls().iter().enumerate() {
            if w.h.is_empty() || w.h.len() == n {
                return Err(WallError::Verification(format!("wall {i} has an empty side")));
            }
            if !self.space.is_convex(&w.h) || !self.space.is_convex(&w.h.complement()) {
                return Err(WallError::Verification(format!("wall {i} is not convex")));
            }
        }
        for x in 0..n {
            for y in x + 1..n {
                let mu = self.walls.measure(&self.separating(x, y));
                if &mu != self.space.dist(x, y) {
                    return Err(WallError::Verification(format!(
                        "wall measure {} differs from d({x},{y}) = {}",
                        rat::fmt_rat(&mu),
                        rat::fmt_rat(self.space.dist(x, y))
                    )));
                }
            }
        }
        Ok(())
    }

    /// Splits `W(x_1|x_k)` along a geodesic sequence into the parts `W(x_i|x_{i+1})`.
    pub fn wall_decomposition_along_geodesic(&self, seq: &[usize]) -> Result<Vec<WallFamily>, WallError> {
        if !self.space.metric().is_geodesic(seq)? {
            return Err(WallError::NotGeodesic);
        }
        let parts: Vec<WallFamily> = seq.windows(2).map(|w| self.separating(w[0], w[1])).collect();
        if let (Some(&first), Some(&last)) = (seq.first(), seq.last()) {
            let whole = self.separating(first, last);
            check_partition(&whole, &parts)?;
        }
        Ok(parts)
    }

    /// Points `p, q` with `W(p|q) = W(F|G)`; `p` lies on the side of `F`.
    pub fn reduce_to_pair(&self, f: &PointSet, g: &PointSet) -> Result<(usize, usize), WallError> {
        let (f, g) = (self.walls.check_set(f)?, self.walls.check_set(g)?);
        if f.is_empty() || g.is_empty() {
            return Err(WallError::EmptySet);
        }
        let (p, q) = self.reduce(&f.to_vec(), &g.to_vec());
        let expected = self.walls.wall_interval_unchecked(&f, &g);
        if self.separating(p, q) != expected {
            return Err(WallError::Verification(format!(
                "reduced pair ({p},{q}) does not realise W(F|G)"
            )));
        }
        Ok((p, q))
    }

    fn reduce(&self, f: &[usize], g: &[usize]) -> (usize, usize) {
        match (f, g) {
            ([x], [y]) => (*x, *y),
            ([x], [y, z]) => (*x, self.space.median(*x, *y, *z)),
            ([y, z], [x]) => (self.space.median(*x, *y, *z), *x),
            _ if f.len() >= 2 => {
                let (last, rest) = f.split_last().unwrap();
                let (a, b) = self.reduce(rest, g);
                let (c, d) = self.reduce(&[*last], g);
                // W(c|d) ∩ W(a|b) via the projection of (c,d) onto I(a,b)
                (self.space.median(c, a, b), self.space.median(d, a, b))
            }
            _ => {
                let (q, p) = self.reduce(g, f);
                (p, q)
            }
        }
    }

    /// Subdivides `I(a,b)` along a decomposition `W(a|b) = ⊔_j W(x_j|y_j)`.
    pub fn subdivide_interval(&self, a: usize, b: usize, pairs: &[(usize, usize)]) -> Result<SubdivisionResult, WallError> {
        let m = self.space.metric();
        m.check_index(a)?;
        m.check_index(b)?;
        for &(x, y) in pairs {
            m.check_index(x)?;
            m.check_index(y)?;
        }
        let whole = self.separating(a, b);
        if pairs.is_empty() && !whole.is_empty() {
            return Err(WallError::EmptyDecomposition);
        }
        let mut seen = WallFamily::empty(self.walls.len());
        for &(x, y) in pairs {
            let fam = self.separating(x, y);
            if let Some(w) = fam.intersection(&seen).first() {
                return Err(WallError::NotADecomposition {
                    wall: w,
                    problem: "in two blocks",
                });
            }
            if let Some(w) = fam.difference(&whole).first() {
                return Err(WallError::NotADecomposition {
                    wall: w,
                    problem: "outside W(a|b)",
                });
            }
            seen = seen.union(&fam);
        }
        if let Some(w) = whole.difference(&seen).first() {
            return Err(WallError::NotADecomposition {
                wall: w,
                problem: "not covered",
            });
        }
        let (sequence, partition) = self.subdivide(a, b, pairs);
        let result = SubdivisionResult { sequence, partition };
        self.check_subdivision(a, b, pairs, &result)?;
        Ok(result)
    }

    fn subdivide(&self, a: usize, b: usize, pairs: &[(usize, usize)]) -> (Vec<usize>, Vec<Vec<usize>>) {
        let sp = &self.space;
        match pairs.len() {
            0 => (vec![a], vec![]),
            1 => (vec![a, b], vec![vec![0]]),
            k => {
                // project every pair into I(a,b), then straighten against (a,b)
                let straight: Vec<(usize, usize)> = pairs
                    .iter()
                    .map(|&(x, y)| {
                        let (x, y) = (sp.median(x, a, b), sp.median(y, a, b));
                        (sp.median(a, x, y), sp.median(b, x, y))
                    })
                    .collect();
                let (p1, q1) = straight[0];
                let mut left = Vec::with_capacity(k - 1);
                let mut right = Vec::with_capacity(k - 1);
                for &(p, q) in &straight[1..] {
                    left.push((sp.median(p, a, p1), sp.median(q, a, p1)));
                    right.push((sp.median(p, q1, b), sp.median(q, q1, b)));
                }
                let (lseq, lpart) = self.subdivide(a, p1, &left);
                let (rseq, rpart) = self.subdivide(q1, b, &right);
                let half = lseq.len();
                let mut sequence = lseq;
                sequence.extend(rseq);
                let mut partition = vec![vec![half - 1]];
                for (l, r) in lpart.into_iter().zip(rpart) {
                    let mut block = l;
                    block.extend(r.into_iter().map(|i| i + half));
                    block.sort_unstable();
                    partition.push(block);
                }
                (sequence, partition)
            }
        }
    }

    fn check_subdivision(&self, a: usize, b: usize, pairs: &[(usize, usize)], r: &SubdivisionResult) -> Result<(), WallError> {
        let fail = |what: &str| Err(WallError::Verification(format!("subdivision: {what}")));
        let m = self.space.metric();
        let k = pairs.len();
        if r.sequence.len() != 1 << k || r.sequence[0] != a || *r.sequence.last().unwrap() != b {
            return fail("sequence has the wrong shape");
        }
        if !m.is_geodesic(&r.sequence)? {
            return fail("sequence is not geodesic");
        }
        let mut used = vec![false; r.sequence.len() - 1];
        for (j, (block, &(x, y))) in r.partition.iter().zip(pairs).enumerate() {
            if block.len() != 1 << j {
                return fail("block has the wrong size");
            }
            for &i in block {
                if std::mem::replace(&mut used[i], true) {
                    return fail("segment used twice");
                }
            }
            let parts: Vec<WallFamily> = block
                .iter()
                .map(|&i| self.separating(r.sequence[i], r.sequence[i + 1]))
                .collect();
            check_partition(&self.separating(x, y), &parts)?;
            let total: Rat = block.iter().map(|&i| m.dist(r.sequence[i], r.sequence[i + 1])).sum();
            if &total != m.dist(x, y) {
                return fail("block lengths do not add up");
            }
        }
        if r.partition.len() != k || used.iter().any(|u| !u) {
            return fail("partition does not cover every segment");
        }
        Ok(())
    }
}

fn check_partition(whole: &WallFamily, parts: &[WallFamily]) -> Result<(), WallError> {
    let mut acc = WallFamily::empty(whole.universe());
    for p in parts {
        if !acc.is_disjoint(p) {
            return Err(WallError::Verification("wall families overlap".into()));
        }
        acc = acc.union(p);
    }
    if &acc != whole {
        return Err(WallError::Verification(format!(
            "parts cover {acc:?}, expected {whole:?}"
        )));
    }
    Ok(())
}

/// Output of [`MedianWalls::subdivide_interval`].
///
/// Segment `i` is `(sequence[i], sequence[i+1])`; `partition[j]` lists the
/// segments realising the `j`-th pair and has `2^j` entries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubdivisionResult {
    pub sequence: Vec<usize>,
    pub partition: Vec<Vec<usize>>,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    // keeps the smaller root so each class is named by its first edge
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.parent[hi] = lo;
        }
    }
}

/// Total weight of walls, used to sanity-check sums in tests and reports.
pub fn total_weight(ws: &WallSpace) -> Rat {
    ws.walls().iter().fold(Rat::zero(), |acc, w| acc + &w.weight)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{median_closure, FiniteMetric, L1Points};
    use crate::rat::{int, ratio};

    fn set(n: usize, v: &[usize]) -> PointSet {
        PointSet::from_indices(n, v.iter().copied())
    }

    fn square_walls() -> MedianWalls {
        // 0=(0,0) 1=(1,0) 2=(1,1) 3=(0,1)
        let pts = L1Points::new(
            2,
            [[0, 0], [1, 0], [1, 1], [0, 1]]
                .iter()
                .map(|p| p.iter().map(|&v| int(v)).collect())
                .collect(),
        )
        .unwrap();
        let m = FiniteMetric::from_l1(&pts, false).unwrap();
        extract_convex_walls(&MedianSpace::new(m).unwrap()).unwrap()
    }

    #[test]
    fn wall_interval_examples() {
        let ws = WallSpace::from_lists(2, vec![(vec![0], int(1))]).unwrap();
        assert!(ws.wall_interval(&set(2, &[0]), &set(2, &[0])).unwrap().is_empty());
        assert_eq!(ws.wall_interval(&set(2, &[0]), &set(2, &[1])).unwrap().to_vec(), vec![0]);
        // F = ∅: every wall with G on one side
        let ws = WallSpace::from_lists(3, vec![(vec![0], int(1)), (vec![0, 1], int(1)), (vec![1], int(2))]).unwrap();
        let fam = ws.wall_interval(&PointSet::empty(3), &set(3, &[0, 1])).unwrap();
        assert_eq!(fam.to_vec(), vec![1]);
    }

    #[test]
    fn wall_pdist_examples() {
        let ws = WallSpace::from_lists(
            4,
            vec![(vec![0, 1], int(1)), (vec![0, 3], ratio(3, 2)), (vec![0, 1, 2, 3], int(7))],
        )
        .unwrap();
        assert_eq!(ws.wall_pdist(0, 0).unwrap(), int(0));
        assert_eq!(ws.wall_pdist(0, 2).unwrap(), ratio(5, 2));
        assert_eq!(ws.wall_pdist(0, 1).unwrap(), ratio(3, 2));
    }

    #[test]
    fn invalid_wall_spaces() {
        assert_eq!(
            WallSpace::from_lists(2, vec![(vec![0], int(0))]).unwrap_err(),
            WallError::NonPositiveWeight { wall: 0 }
        );
        assert!(matches!(
            WallSpace::from_lists(2, vec![(vec![5], int(1))]),
            Err(WallError::PointOutOfRange { point: 5, .. })
        ));
        let bad: Result<WallSpace, _> = serde_json::from_str(r#"{"n":2,"walls":[{"h":[3],"weight":"1"}]}"#);
        assert!(bad.is_err());
        let ok: WallSpace = serde_json::from_str(r#"{"n":3,"walls":[{"h":[0],"weight":"3/2"}]}"#).unwrap();
        assert_eq!(ok.walls()[0].h.universe(), 3);
        assert_eq!(serde_json::to_string(&ok).unwrap(), r#"{"n":3,"walls":[{"h":[0],"weight":"3/2"}]}"#);
    }

    #[test]
    fn ring_intersect_examples() {
        let ws = WallSpace::from_lists(
            4,
            vec![(vec![0, 1], int(1)), (vec![0, 3], int(1)), (vec![0], int(1)), (vec![], int(1))],
        )
        .unwrap();
        let (f, g) = (set(4, &[0]), set(4, &[2]));
        let same = ws.ring_intersect((&f, &g), (&f, &g)).unwrap();
        assert_eq!(same.aligned, ws.wall_interval(&f, &g).unwrap());
        assert!(same.crossed.is_empty());
        let swapped = ws.ring_intersect((&f, &g), (&g, &f)).unwrap();
        assert!(swapped.aligned.is_empty());
        assert_eq!(swapped.crossed, ws.wall_interval(&f, &g).unwrap());
        let r = ws.ring_intersect((&set(4, &[0]), &set(4, &[1])), (&set(4, &[3]), &set(4, &[2]))).unwrap();
        assert_eq!(r.aligned.to_vec(), vec![1]);
        assert!(r.crossed.is_empty());
    }

    #[test]
    fn ring_complement_examples() {
        let ws = WallSpace::from_lists(2, vec![(vec![0], int(1)), (vec![], int(2))]).unwrap();
        let blocks = ws.ring_complement(&set(2, &[0]), &set(2, &[1])).unwrap();
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0].s.to_vec(), vec![0, 1]);
        assert!(blocks[0].t.is_empty());
        assert_eq!(blocks[0].family.to_vec(), vec![1]);

        let ws = WallSpace::from_lists(3, vec![(vec![0], int(1)), (vec![1], int(1)), (vec![2], int(1))]).unwrap();
        let blocks = ws.ring_complement(&set(3, &[0]), &set(3, &[1, 2])).unwrap();
        assert_eq!(blocks.len(), 3);
        assert_eq!(blocks.iter().filter(|b| !b.t.is_empty()).count(), 2);

        let empty = WallSpace::new(3, vec![]).unwrap();
        let blocks = empty.ring_complement(&set(3, &[0]), &set(3, &[1])).unwrap();
        assert!(blocks.iter().all(|b| b.family.is_empty()));
        assert_eq!(empty.ring_complement(&PointSet::empty(3), &set(3, &[1])).unwrap_err(), WallError::EmptySet);
    }

    #[test]
    fn extraction_examples() {
        let path = FiniteMetric::new(
            vec![
                vec![int(0), int(1), int(3)],
                vec![int(1), int(0), int(2)],
                vec![int(3), int(2), int(0)],
            ],
            false,
        )
        .unwrap();
        let mw = extract_convex_walls(&MedianSpace::new(path).unwrap()).unwrap();
        let weights: Vec<Rat> = mw.walls().walls().iter().map(|w| w.weight.clone()).collect();
        assert_eq!(weights, vec![int(1), int(2)]);
        assert_eq!(mw.walls().wall_pdist(0, 2).unwrap(), int(3));

        let sq = square_walls();
        assert_eq!(sq.walls().len(), 2);
        assert!(sq.walls().walls().iter().all(|w| w.weight == int(1)));
        assert_eq!(sq.walls().wall_pdist(0, 2).unwrap(), int(2));

        let single = FiniteMetric::new(vec![vec![int(0)]], false).unwrap();
        assert!(extract_convex_walls(&MedianSpace::new(single).unwrap()).unwrap().walls().is_empty());
    }

    #[test]
    fn geodesic_decomposition() {
        let sq = square_walls();
        assert_eq!(sq.wall_decomposition_along_geodesic(&[0, 2]).unwrap().len(), 1);
        let parts = sq.wall_decomposition_along_geodesic(&[0, 1, 2]).unwrap();
        assert_eq!(parts.iter().map(|p| p.len()).collect::<Vec<_>>(), vec![1, 1]);
        let parts = sq.wall_decomposition_along_geodesic(&[0, 0, 1, 1, 2]).unwrap();
        assert_eq!(parts.iter().map(|p| p.len()).collect::<Vec<_>>(), vec![0, 1, 0, 1]);
        assert_eq!(sq.wall_decomposition_along_geodesic(&[0, 2, 1]).unwrap_err(), WallError::NotGeodesic);
    }

    #[test]
    fn reduction_examples() {
        let sq = square_walls();
        let m = sq.space().median(0, 1, 3);
        assert_eq!(sq.reduce_to_pair(&set(4, &[0]), &set(4, &[1, 3])).unwrap(), (0, m));
        assert_eq!(sq.reduce_to_pair(&set(4, &[0]), &set(4, &[2])).unwrap(), (0, 2));
        // the wall between the left side {0,3} and the right side {1,2}
        let (p, q) = sq.reduce_to_pair(&set(4, &[0, 3]), &set(4, &[1, 2])).unwrap();
        assert_eq!(sq.space().dist(p, q), &int(1));
        assert_eq!(sq.separating(p, q), sq.walls().wall_interval(&set(4, &[0, 3]), &set(4, &[1, 2])).unwrap());
    }

    #[test]
    fn subdivision_examples() {
        let sq = square_walls();
        let r = sq.subdivide_interval(0, 2, &[(0, 2)]).unwrap();
        assert_eq!(r.sequence, vec![0, 2]);
        assert_eq!(r.partition, vec![vec![0]]);

        let r = sq.subdivide_interval(0, 2, &[(0, 1), (0, 3)]).unwrap();
        assert_eq!(r.sequence.len(), 4);
        assert_eq!(r.partition[0].len(), 1);
        assert_eq!(r.partition[1].len(), 2);
        assert!(r.sequence.contains(&1) || r.sequence.contains(&3));

        assert_eq!(sq.subdivide_interval(1, 1, &[]).unwrap().sequence, vec![1]);
        assert_eq!(sq.subdivide_interval(0, 2, &[]).unwrap_err(), WallError::EmptyDecomposition);
        assert!(matches!(
            sq.subdivide_interval(0, 2, &[(0, 1), (0, 2)]),
            Err(WallError::NotADecomposition { .. })
        ));
        assert!(matches!(
            sq.subdivide_interval(0, 1, &[(0, 3)]),
            Err(WallError::NotADecomposition { .. })
        ));
    }

    #[test]
    fn subdivision_three_blocks_in_cube() {
        let mut coords = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    coords.push(vec![int(i), int(2 * j), int(3 * k)]);
                }
            }
        }
        let c = median_closure(&L1Points::new(3, coords).unwrap()).unwrap();
        let mw = extract_convex_walls(&MedianSpace::new(c.metric).unwrap()).unwrap();
        // a=(0,0,0)=0, b=(1,2,3)=7; one edge per axis, taken at different places
        let r = mw.subdivide_interval(0, 7, &[(0, 4), (5, 7), (6, 7)]).unwrap();
        assert_eq!(r.sequence.len(), 8);
        assert_eq!(r.partition.iter().map(Vec::len).collect::<Vec<_>>(), vec![1, 2, 4]);
        assert!(mw.space().metric().is_geodesic(&r.sequence).unwrap());
    }
}
