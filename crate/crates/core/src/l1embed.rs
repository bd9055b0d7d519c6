//! ℓ¹ embeddings: cut-cone decompositions of finite metrics and the direct
//! coordinate embedding of a wall space.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::bitset::PointSet;
use crate::lp::{lp_feasible, FarkasCertificate, LpError, LpInstance, LpOutcome};
use crate::metric::{FiniteMetric, L1Points, MetricError};
use crate::rat::{self, Rat};
use crate::walls::WallSpace;

/// Largest point count for the cut LP (`2^(n-1) - 1` variables).
pub const DEFAULT_LP_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EmbedError {
    #[error("{n} points exceed the cut-cone cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("base point {x0} out of range for {n} points")]
    BasePoint { x0: usize, n: usize },
    #[error("distance matrix is not square")]
    NotSquare,
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("internal verification failed: {0}")]
    Verification(String),
}

/// `d = Σ_S λ_S δ_S` with canonical cuts `S` (never containing point 0).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutDecomposition {
    pub cuts: Vec<PointSet>,
    #[serde(with = "rat::serde_vec")]
    pub weights: Vec<Rat>,
}

impl CutDecomposition {
    /// `Σ_S λ_S δ_S(x,y)`.
    pub fn distance(&self, x: usize, y: usize) -> Rat {
        self.cuts
            .iter()
            .zip(&self.weights)
            .filter(|(s, _)| s.contains(x) != s.contains(y))
            .map(|(_, w)| w)
            .sum()
    }

    /// Largest `|Σ λ_S δ_S(x,y) - d(x,y)|` over all pairs.
    pub fn max_residual(&self, d: &[Vec<Rat>]) -> Rat {
        let n = d.len();
        let mut worst = Rat::zero();
        for x in 0..n {
            for y in x + 1..n {
                let r = (self.distance(x, y) - &d[x][y]).abs();
                if r > worst {
                    worst = r;
                }
            }
        }
        worst
    }

    /// Exact re-summation check.
    pub fn verify(&self, d: &[Vec<Rat>]) -> bool {
        self.weights.iter().all(Signed::is_positive) && self.max_residual(d).is_zero()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CutConeOutcome {
    Decomposed(CutDecomposition),
    /// Certificate for the LP returned by [`cut_lp`] with the same inputs.
    Infeasible { certificate: FarkasCertificate },
}

impl CutConeOutcome {
    pub fn is_decomposed(&self) -> bool {
        matches!(self, CutConeOutcome::Decomposed(_))
    }
}

/// Canonical cuts over `n` points, indexed by bitmask over points `1..n`.
pub fn canonical_cuts(n: usize) -> Vec<PointSet> {
    if n <= 1 {
        return Vec::new();
    }
    (1u64..(1u64 << (n - 1)))
        .map(|mask| PointSet::from_mask(n, mask << 1))
        .collect()
}

/// The LP `Σ_S λ_S δ_S(x,y) = d(x,y)` over pairs `x < y`, one column per canonical cut.
pub fn cut_lp(d: &[Vec<Rat>], slack: Option<&Rat>) -> Result<LpInstance, EmbedError> {
    let n = d.len();
    if d.iter().any(|r| r.len() != n) {
        return Err(EmbedError::NotSquare);
    }
    let cuts = canonical_cuts(n);
    let mut a = Vec::new();
    let mut b = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            a.push(
                cuts.iter()
                    .map(|s| if s.contains(x) != s.contains(y) { rat::int(1) } else { Rat::zero() })
                    .collect(),
            );
            b.push(d[x][y].clone());
        }
    }
    let lp = LpInstance::new(a, b)?;
    Ok(match slack {
        Some(eps) => lp.with_slack(eps.clone())?,
        None => lp,
    })
}

/// Exact cut-cone membership of a finite (pseudo-)metric.
pub fn cut_cone_decompose(m: &FiniteMetric, cap: usize) -> Result<CutConeOutcome, EmbedError> {
    decompose_matrix(m.matrix(), None, cap)
}

/// Cut-cone membership of a symmetric matrix, optionally allowing `|residual| ≤ ε` per pair.
pub fn decompose_matrix(d: &[Vec<Rat>], slack: Option<&Rat>, cap: usize) -> Result<CutConeOutcome, EmbedError> {
    let n = d.len();
    if n > cap {
        return Err(EmbedError::CapExceeded { n, cap });
    }
    let lp = cut_lp(d, slack)?;
    match lp_feasible(&lp)? {
        LpOutcome::Feasible(lambda) => {
            let (cuts, weights) = canonical_cuts(n)
                .into_iter()
                .zip(lambda)
                .filter(|(_, w)| w.is_positive())
                .unzip();
            let dec = CutDecomposition { cuts, weights };
            let residual = dec.max_residual(d);
            let ok = match slack {
                None => residual.is_zero(),
                Some(eps) => residual <= *eps,
            };
            if !ok {
                return Err(EmbedError::Verification("cut decomposition does not re-sum".into()));
            }
            Ok(CutConeOutcome::Decomposed(dec))
        }
        LpOutcome::Infeasible(certificate) => Ok(CutConeOutcome::Infeasible { certificate }),
    }
}

/// Groups wall weights by the canonical cut each wall induces.
pub fn walls_to_cuts(ws: &WallSpace) -> CutDecomposition {
    let mut cuts: Vec<PointSet> = Vec::new();
    let mut weights: Vec<Rat> = Vec::new();
    for (i, w) in ws.walls().iter().enumerate() {
        let cut = ws.canonical_cut(i);
        if cut.is_empty() {
            continue;
        }
        match cuts.iter().position(|c| *c == cut) {
            Some(k) => weights[k] += &w.weight,
            None => {
                cuts.push(cut);
                weights.push(w.weight.clone());
            }
        }
    }
    CutDecomposition { cuts, weights }
}

/// Coordinates `x ↦ (μ(w)·[w separates x from x0])_w`, an isometry onto its image in ℓ¹.
pub fn walls_to_embedding(ws: &WallSpace, x0: usize) -> Result<L1Points, EmbedError> {
    let n = ws.n_points();
    if x0 >= n {
        return Err(EmbedError::BasePoint { x0, n });
    }
    let coords = (0..n)
        .map(|x| {
            ws.walls()
                .iter()
                .map(|w| if w.separates(x, x0) { w.weight.clone() } else { Rat::zero() })
                .collect()
        })
        .collect();
    Ok(L1Points::new(ws.len(), coords)?)
}
