//! Medianization of a finite wall space.
//!
//! Points of `M(X)` are the admissible sections: one halfspace chosen per
//! wall, closed under passing to larger halfspaces. Distances are the total
//! weight of walls on which two sections disagree, and the median is the
//! per-wall majority vote.

use serde::{Deserialize, Serialize};

use crate::bitset::IndexSet;
use crate::metric::{FiniteMetric, MedianSpace, MetricError};
use crate::rat::{self, Rat};
use crate::walls::{Wall, WallError, WallSpace};

pub const DEFAULT_WALL_CAP: usize = 20;
pub const DEFAULT_SECTION_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MedianizeError {
    #[error("{walls} walls exceed the cap of {cap}")]
    WallCap { walls: usize, cap: usize },
    #[error("{sections} admissible sections exceed the cap of {cap}")]
    SectionCap { sections: usize, cap: usize },
    #[error("sections belong to wall spaces of different sizes")]
    Mismatch,
    #[error("point {0} is out of range")]
    PointOutOfRange(usize),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Walls(#[from] WallError),
    #[error("internal verification failed: {0}")]
    Verification(String),
}

/// Caps for section enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_walls: usize,
    pub max_sections: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_walls: DEFAULT_WALL_CAP,
            max_sections: DEFAULT_SECTION_CAP,
        }
    }
}

/// Bit `w` set means the section picks `h_w`; clear means it picks `h_w^c`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AdmissibleSection {
    choice: IndexSet,
}

impl AdmissibleSection {
    pub fn picks_h(&self, wall: usize) -> bool {
        self.choice.contains(wall)
    }

    pub fn choice(&self) -> &IndexSet {
        &self.choice
    }

    pub fn n_walls(&self) -> usize {
        self.choice.universe()
    }

    /// Choice vector as 0/1 entries.
    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.n_walls()).map(|w| self.picks_h(w) as u8).collect()
    }

    fn from_mask(k: usize, mask: u64) -> Self {
        Self {
            choice: IndexSet::from_mask(k, mask),
        }
    }

    /// Total weight of walls where the two choices differ.
    pub fn distance(&self, other: &Self, ws: &WallSpace) -> Rat {
        ws.measure(&self.choice.difference(&other.choice).union(&other.choice.difference(&self.choice)))
    }
}

/// Closure constraints between halfspaces: choosing `(w, side)` forces every listed `(w', side')`.
struct Implications {
    // implied[2*w + side] = bitmask over 2*k halfspaces
    implied: Vec<Vec<(usize, bool)>>,
}

impl Implications {
    fn new(ws: &WallSpace) -> Self {
        let k = ws.len();
        let half = |w: usize, side: bool| {
            let h = &ws.walls()[w].h;
            if side {
                h.clone()
            } else {
                h.complement()
            }
        };
        let mut implied = vec![Vec::new(); 2 * k];
        for w in 0..k {
            for side in [true, false] {
                let small = half(w, side);
                for w2 in 0..k {
                    for side2 in [true, false] {
                        if (w2, side2) != (w, side) && small.is_subset(&half(w2, side2)) {
                            implied[2 * w + side as usize].push((w2, side2));
                        }
                    }
                }
            }
        }
        Self { implied }
    }

    fn admits(&self, pick: impl Fn(usize) -> bool, k: usize) -> bool {
        (0..k).all(|w| {
            let side = pick(w);
            self.implied[2 * w + side as usize]
                .iter()
                .all(|&(w2, side2)| pick(w2) == side2)
        })
    }
}

/// `σ_x`: the halfspaces containing `x`.
pub fn section_of_point(ws: &WallSpace, x: usize) -> Result<AdmissibleSection, MedianizeError> {
    if x >= ws.n_points() {
        return Err(MedianizeError::PointOutOfRange(x));
    }
    Ok(AdmissibleSection {
        choice: IndexSet::from_indices(ws.len(), (0..ws.len()).filter(|&w| ws.walls()[w].h.contains(x))),
    })
}

/// Whether a section is closed under halfspace inclusion.
pub fn is_admissible(ws: &WallSpace, s: &AdmissibleSection) -> bool {
    s.n_walls() == ws.len() && Implications::new(ws).admits(|w| s.picks_h(w), ws.len())
}

/// All admissible sections, in increasing order of their choice bitmask.
pub fn enumerate_sections(ws: &WallSpace, limits: Limits) -> Result<Vec<AdmissibleSection>, MedianizeError> {
    let k = ws.len();
    if k > limits.max_walls || k >= 64 {
        return Err(MedianizeError::WallCap {
            walls: k,
            cap: limits.max_walls,
        });
    }
    let imp = Implications::new(ws);
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << k) {
        if imp.admits(|w| mask >> w & 1 == 1, k) {
            if out.len() == limits.max_sections {
                return Err(MedianizeError::SectionCap {
                    sections: out.len() + 1,
                    cap: limits.max_sections,
                });
            }
            out.push(AdmissibleSection::from_mask(k, mask));
        }
    }
    Ok(out)
}

/// Per-wall majority of three sections.
pub fn boolean_median(
    s1: &AdmissibleSection,
    s2: &AdmissibleSection,
    s3: &AdmissibleSection,
) -> Result<AdmissibleSection, MedianizeError> {
    let k = s1.n_walls();
    if s2.n_walls() != k || s3.n_walls() != k {
        return Err(MedianizeError::Mismatch);
    }
    let (a, b, c) = (&s1.choice, &s2.choice, &s3.choice);
    Ok(AdmissibleSection {
        choice: a.intersection(b).union(&a.intersection(c)).union(&b.intersection(c)),
    })
}

/// One edge of the cube complex 1-skeleton: sections differing on a single wall.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeEdge {
    pub a: usize,
    pub b: usize,
    pub wall: usize,
    #[serde(with = "rat::serde_str")]
    pub weight: Rat,
}

/// `M(X)` with the embedding `x ↦ σ_x`.
#[derive(Debug, Clone)]
pub struct MedianizedSpace {
    walls: WallSpace,
    sections: Vec<AdmissibleSection>,
    metric: FiniteMetric,
    iota: Vec<usize>,
}

pub fn medianize(ws: &WallSpace, limits: Limits) -> Result<MedianizedSpace, MedianizeError> {
    let sections = enumerate_sections(ws, limits)?;
    let dist: Vec<Vec<Rat>> = sections
        .iter()
        .map(|s| sections.iter().map(|t| s.distance(t, ws)).collect())
        .collect();
    let metric = FiniteMetric::new(dist, true)?;
    let iota = (0..ws.n_points())
        .map(|x| {
            let sx = section_of_point(ws, x)?;
            sections
                .iter()
                .position(|s| *s == sx)
                .ok_or_else(|| MedianizeError::Verification(format!("σ_{x} is not admissible")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let out = MedianizedSpace {
        walls: ws.clone(),
        sections,
        metric,
        iota,
    };
    out.verify_isometry()?;
    Ok(out)
}

impl MedianizedSpace {
    pub fn walls(&self) -> &WallSpace {
        &self.walls
    }

    pub fn sections(&self) -> &[AdmissibleSection] {
        &self.sections
    }

    pub fn metric(&self) -> &FiniteMetric {
        &self.metric
    }

    /// Section index of every original point.
    pub fn iota(&self) -> &[usize] {
        &self.iota
    }

    pub fn len(&self) -> usize {
        self.sections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sections.is_empty()
    }

    pub fn section_index(&self, s: &AdmissibleSection) -> Option<usize> {
        self.sections.iter().position(|t| t == s)
    }

    fn verify_isometry(&self) -> Result<(), MedianizeError> {
        let n = self.walls.n_points();
        for x in 0..n {
            for y in 0..n {
                let wall = self.walls.wall_pdist(x, y)?;
                if *self.metric.dist(self.iota[x], self.iota[y]) != wall {
                    return Err(MedianizeError::Verification(format!(
                        "ι is not isometric on ({x},{y})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Quotient of the section metric, certified median.
    pub fn median_quotient(&self, cap: usize) -> Result<(MedianSpace, Vec<usize>), MedianizeError> {
        let q = self.metric.quotient();
        let space = MedianSpace::with_cap(q.metric, cap)?;
        Ok((space, q.class_of))
    }

    /// Edges between sections that differ on exactly one wall.
    pub fn cube_adjacency(&self) -> Vec<CubeEdge> {
        let mut edges = Vec::new();
        for (i, s) in self.sections.iter().enumerate() {
            for (j, t) in self.sections.iter().enumerate().skip(i + 1) {
                let diff = s.choice.difference(&t.choice).union(&t.choice.difference(&s.choice));
                if diff.len() == 1 {
                    let wall = diff.first().unwrap();
                    edges.push(CubeEdge {
                        a: i,
                        b: j,
                        wall,
                        weight: self.walls.walls()[wall].weight.clone(),
                    });
                }
            }
        }
        edges
    }

    /// Wall structure carried by `M(X)`: `h_M = { σ : h ∈ σ }`, same weights.
    pub fn induced_walls(&self) -> WallSpace {
        let n = self.sections.len();
        let walls = self
            .walls
            .walls()
            .iter()
            .enumerate()
            .map(|(w, wall)| Wall {
                h: IndexSet::from_indices(n, (0..n).filter(|&i| self.sections[i].picks_h(w))),
                weight: wall.weight.clone(),
            })
            .collect();
        WallSpace::new(n, walls).expect("induced walls reuse validated weights")
    }

    /// Medianizes [`Self::induced_walls`] and checks that the result is `M(X)` again,
    /// i.e. its `ι` is a bijective isometry.
    pub fn check_idempotent(&self, limits: Limits) -> Result<bool, MedianizeError> {
        let again = medianize(&self.induced_walls(), limits)?;
        if again.len() != self.len() {
            return Ok(false);
        }
        let mut hit = vec![false; again.len()];
        for &i in &again.iota {
            hit[i] = true;
        }
        if hit.iter().any(|h| !h) {
            return Ok(false);
        }
        Ok((0..self.len()).all(|i| {
            (0..self.len()).all(|j| again.metric.dist(again.iota[i], again.iota[j]) == self.metric.dist(i, j))
        }))
    }
}

/// Wire form of a [`MedianizedSpace`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MedianizedReport {
    pub sections: Vec<Vec<u8>>,
    pub metric: FiniteMetric,
    pub iota: Vec<usize>,
    pub adjacency: Vec<CubeEdge>,
}

impl From<&MedianizedSpace> for MedianizedReport {
    fn from(m: &MedianizedSpace) -> Self {
        Self {
            sections: m.sections.iter().map(AdmissibleSection::to_bits).collect(),
            metric: m.metric.clone(),
            iota: m.iota.clone(),
            adjacency: m.cube_adjacency(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{FiniteMetric, L1Points};
    use crate::rat::int;
    use crate::walls::extract_convex_walls;

    fn ws(n: usize, walls: &[&[usize]]) -> WallSpace {
        WallSpace::from_lists(n, walls.iter().map(|h| (h.to_vec(), int(1))).collect()).unwrap()
    }

    fn square_walls() -> WallSpace {
        let pts = L1Points::new(
            2,
            [[0, 0], [1, 0], [1, 1], [0, 1]]
                .iter()
                .map(|p| p.iter().map(|&v| int(v)).collect())
                .collect(),
        )
        .unwrap();
        let m = FiniteMetric::from_l1(&pts, false).unwrap();
        extract_convex_walls(&MedianSpace::new(m).unwrap()).unwrap().walls().clone()
    }

    #[test]
    fn point_sections() {
        let two = ws(2, &[&[0]]);
        assert_eq!(section_of_point(&two, 0).unwrap().to_bits(), vec![1]);
        assert_eq!(section_of_point(&two, 1).unwrap().to_bits(), vec![0]);
        let all = ws(2, &[&[0, 1], &[0, 1]]);
        assert_eq!(section_of_point(&all, 1).unwrap().to_bits(), vec![1, 1]);
        let sq = square_walls();
        let bits: Vec<Vec<u8>> = (0..4).map(|x| section_of_point(&sq, x).unwrap().to_bits()).collect();
        let mut uniq = bits.clone();
        uniq.sort();
        uniq.dedup();
        assert_eq!(uniq.len(), 4);
        assert!(section_of_point(&sq, 4).is_err());
    }

    #[test]
    fn section_counts() {
        assert_eq!(enumerate_sections(&ws(2, &[&[0]]), Limits::default()).unwrap().len(), 2);
        // nested h1 = {0} ⊂ h2 = {0,1} in a 3-point set
        let nested = ws(3, &[&[0], &[0, 1]]);
        let secs = enumerate_sections(&nested, Limits::default()).unwrap();
        assert_eq!(secs.len(), 3);
        assert!(!secs.iter().any(|s| s.to_bits() == vec![1, 0]));
        // crossing walls over four quadrants
        let crossing = ws(4, &[&[0, 1], &[0, 3]]);
        assert_eq!(enumerate_sections(&crossing, Limits::default()).unwrap().len(), 4);
        let cap = Limits {
            max_walls: 1,
            ..Limits::default()
        };
        assert!(matches!(enumerate_sections(&crossing, cap), Err(MedianizeError::WallCap { .. })));
    }

    #[test]
    fn majority_vote() {
        let crossing = ws(4, &[&[0, 1], &[0, 3]]);
        let s: Vec<_> = (0..3).map(|x| section_of_point(&crossing, x).unwrap()).collect();
        assert_eq!(boolean_median(&s[0], &s[0], &s[2]).unwrap(), s[0]);
        let m = boolean_median(&s[0], &s[1], &s[2]).unwrap();
        assert_eq!(m, s[1]);
        assert_eq!(boolean_median(&s[0], &s[2], &m).unwrap(), m);
        let other = section_of_point(&ws(2, &[&[0]]), 0).unwrap();
        assert_eq!(boolean_median(&s[0], &s[1], &other), Err(MedianizeError::Mismatch));
    }

    #[test]
    fn tripod_medianization() {
        let tripod = ws(3, &[&[0], &[1], &[2]]);
        let m = medianize(&tripod, Limits::default()).unwrap();
        assert_eq!(m.len(), 4);
        let center = (0..4).find(|i| !m.iota().contains(i)).unwrap();
        for &p in m.iota() {
            assert_eq!(m.metric().dist(center, p), &int(1));
        }
        let (space, _) = m.median_quotient(64).unwrap();
        assert_eq!(space.len(), 4);
        let edges = m.cube_adjacency();
        assert_eq!(edges.len(), 3);
        assert!(edges.iter().all(|e| e.a == center || e.b == center));
    }

    #[test]
    fn square_medianization() {
        let sq = square_walls();
        let m = medianize(&sq, Limits::default()).unwrap();
        assert_eq!(m.len(), 4);
        let mut iota = m.iota().to_vec();
        iota.sort();
        assert_eq!(iota, vec![0, 1, 2, 3]);
        let edges = m.cube_adjacency();
        assert_eq!(edges.len(), 4);
        let mut deg = [0; 4];
        for e in &edges {
            deg[e.a] += 1;
            deg[e.b] += 1;
        }
        assert_eq!(deg, [2; 4]);
        assert!(m.check_idempotent(Limits::default()).unwrap());
    }

    #[test]
    fn empty_wall_list() {
        let m = medianize(&WallSpace::new(3, vec![]).unwrap(), Limits::default()).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m.iota(), &[0, 0, 0]);
        assert!(m.cube_adjacency().is_empty());
    }

    #[test]
    fn single_wall_edge() {
        let m = medianize(&ws(2, &[&[0]]), Limits::default()).unwrap();
        assert_eq!(m.cube_adjacency().len(), 1);
        let report = MedianizedReport::from(&m);
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["sections"], serde_json::json!([[0], [1]]));
        assert_eq!(json["iota"], serde_json::json!([1, 0]));
    }
}
