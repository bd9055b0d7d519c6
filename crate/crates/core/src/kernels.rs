//! Finite kernels and their place in the embedding hierarchy:
//! measure definite (type 1) ⇒ hypermetric ⇒ conditionally negative definite.
//!
//! Conditional negative definiteness is decided exactly: with base point `x0`,
//! `ψ` is CND iff `P_ij = ψ(x_i,x0) + ψ(x_j,x0) - ψ(x_i,x_j)` is positive
//! semidefinite, and for zero-sum `λ` one has `Σ λ_i λ_j ψ_ij = -vᵀPv` where
//! `v` drops the base coordinate. PSD is tested by exact symmetric
//! elimination that returns a direction of negative curvature on failure.
//!
//! Irrational transforms (powers, square roots) produce kernels flagged
//! `approximate`, whose entries are dyadic rationals within `2^-48` of the
//! true value. Decisions on such kernels use the tolerances [`tau`] and
//! [`lp_slack`].

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::l1embed::{decompose_matrix, CutConeOutcome, CutDecomposition, EmbedError, DEFAULT_LP_CAP};
use crate::lp::FarkasCertificate;
use crate::rat::{self, Rat, DYADIC_BITS};

/// Tolerance `2^-24` for CND checks on approximate kernels.
pub fn tau() -> Rat {
    Rat::new(BigInt::one(), BigInt::one() << 24)
}

/// Per-equality LP slack `2^-24` for approximate kernels.
pub fn lp_slack() -> Rat {
    tau()
}

/// Upper bound on the number of integer vectors examined by the bounded hypermetric search.
pub const HYPERMETRIC_ENUM_CAP: u64 = 20_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KernelError {
    #[error("a kernel needs at least one point")]
    Empty,
    #[error("row {row} has {len} entries, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("psi({i},{j}) != psi({j},{i})")]
    Asymmetric { i: usize, j: usize },
    #[error("psi({i},{i}) is not zero")]
    NonzeroDiagonal { i: usize },
    #[error("psi({i},{j}) is negative")]
    Negative { i: usize, j: usize },
    #[error("{got} labels given for {n} points")]
    LabelCount { got: usize, n: usize },
    #[error("exponent must lie in (0, 1]")]
    Exponent,
    #[error("base point {0} out of range")]
    BasePoint(usize),
    #[error("coefficient vector has length {got}, expected {n}")]
    VectorLength { got: usize, n: usize },
    #[error("bound must be at least 1")]
    Bound,
    #[error("hypermetric search over {count} vectors exceeds the cap of {cap}")]
    EnumerationCap { count: u128, cap: u64 },
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error("implication chain violated: {0}")]
    Chain(String),
}

/// Symmetric, non-negative matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KernelRepr", into = "KernelRepr")]
pub struct Kernel {
    labels: Option<Vec<String>>,
    psi: Vec<Vec<Rat>>,
    approximate: bool,
}

#[derive(Serialize, Deserialize)]
struct KernelRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
    #[serde(with = "rat::serde_matrix")]
    psi: Vec<Vec<Rat>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    approximate: bool,
}

impl TryFrom<KernelRepr> for Kernel {
    type Error = KernelError;
    fn try_from(r: KernelRepr) -> Result<Self, KernelError> {
        let mut k = Kernel::new(r.psi)?;
        k.approximate = r.approximate;
        match r.labels {
            Some(l) => k.with_labels(l),
            None => Ok(k),
        }
    }
}

impl From<Kernel> for KernelRepr {
    fn from(k: Kernel) -> Self {
        KernelRepr {
            labels: k.labels,
            psi: k.psi,
            approximate: k.approximate,
        }
    }
}

impl Kernel {
    pub fn new(psi: Vec<Vec<Rat>>) -> Result<Self, KernelError> {
        let n = psi.len();
        if n == 0 {
            return Err(KernelError::Empty);
        }
        for (row, r) in psi.iter().enumerate() {
            if r.len() != n {
                return Err(KernelError::NotSquare { row, len: r.len(), n });
            }
        }
        for i in 0..n {
            if !psi[i][i].is_zero() {
                return Err(KernelError::NonzeroDiagonal { i });
            }
            for j in 0..n {
                if psi[i][j] != psi[j][i] {
                    return Err(KernelError::Asymmetric { i: i.min(j), j: i.max(j) });
                }
                if psi[i][j].is_negative() {
                    return Err(KernelError::Negative { i, j });
                }
            }
        }
        Ok(Self {
            labels: None,
            psi,
            approximate: false,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, KernelError> {
        if labels.len() != self.len() {
            return Err(KernelError::LabelCount {
                got: labels.len(),
                n: self.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Squared Euclidean distances `|p_i - p_j|²`.
    pub fn squared_euclidean(points: &[Vec<Rat>]) -> Result<Self, KernelError> {
        let psi = points
            .iter()
            .map(|p| {
                points
                    .iter()
                    .map(|q| p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum())
                    .collect()
            })
            .collect();
        Self::new(psi)
    }

    pub fn len(&self) -> usize {
        self.psi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psi.is_empty()
    }

    pub fn psi(&self, i: usize, j: usize) -> &Rat {
        &self.psi[i][j]
    }

    pub fn matrix(&self) -> &[Vec<Rat>] {
        &self.psi
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn is_approximate(&self) -> bool {
        self.approximate
    }

    /// Pull-back along `f: {0..m} → {0..n}`: `(f*ψ)(i,j) = ψ(f(i), f(j))`.
    pub fn pull_back(&self, f: &[usize]) -> Result<Kernel, KernelError> {
        if let Some(&bad) = f.iter().find(|&&i| i >= self.len()) {
            return Err(KernelError::BasePoint(bad));
        }
        let psi = f
            .iter()
            .map(|&i| f.iter().map(|&j| self.psi[i][j].clone()).collect())
            .collect();
        let mut k = Kernel::new(psi)?;
        k.approximate = self.approximate;
        Ok(k)
    }

    /// `Σ_ij λ_i λ_j ψ(x_i, x_j)`.
    pub fn quadratic_form(&self, lambda: &[Rat]) -> Result<Rat, KernelError> {
        if lambda.len() != self.len() {
            return Err(KernelError::VectorLength {
                got: lambda.len(),
                n: self.len(),
            });
        }
        let mut total = Rat::zero();
        for (i, li) in lambda.iter().enumerate() {
            if li.is_zero() {
                continue;
            }
            let row: Rat = lambda
                .iter()
                .zip(&self.psi[i])
                .filter(|(l, _)| !l.is_zero())
                .map(|(l, p)| l * p)
                .sum();
            total += li * row;
        }
        Ok(total)
    }

    /// First triple `(i,j,k)` with `ψ(i,k) > ψ(i,j) + ψ(j,k) + tol`.
    pub fn triangle_violation(&self, tol: &Rat) -> Option<[usize; 3]> {
        let n = self.len();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.psi[i][k] > &self.psi[i][j] + &self.psi[j][k] + tol {
                        return Some([i, j, k]);
                    }
                }
            }
        }
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CndVerdict {
    pub is_cnd: bool,
    /// Zero-sum `λ` with `Σ λ_i λ_j ψ_ij > 0` (exceeding `τ·|λ'|²` under a tolerance).
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_vec")]
    pub violation: Option<Vec<Rat>>,
    pub base_point: usize,
}

mod opt_vec {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Vec<Rat>>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => s.serialize_some(&v.iter().map(rat::fmt_rat).collect::<Vec<_>>()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<Rat>>, D::Error> {
        let raw: Option<Vec<String>> = Option::deserialize(d)?;
        raw.map(|v| {
            v.iter()
                .map(|s| rat::parse_rat(s).map_err(serde::de::Error::custom))
                .collect()
        })
        .transpose()
    }
}

/// Exact CND decision with base point 0.
pub fn is_cnd(k: &Kernel) -> CndVerdict {
    cnd_decision(k, 0, None).expect("base point 0 always exists")
}

/// Exact CND decision with a chosen base point.
pub fn is_cnd_from(k: &Kernel, base: usize) -> Result<CndVerdict, KernelError> {
    cnd_decision(k, base, None)
}

/// CND up to a tolerance: `P + τ·I` positive semidefinite.
pub fn is_cnd_within(k: &Kernel, tolerance: &Rat) -> CndVerdict {
    cnd_decision(k, 0, Some(tolerance)).expect("base point 0 always exists")
}

fn cnd_decision(k: &Kernel, base: usize, shift: Option<&Rat>) -> Result<CndVerdict, KernelError> {
    let n = k.len();
    if base >= n {
        return Err(KernelError::BasePoint(base));
    }
    let others: Vec<usize> = (0..n).filter(|&i| i != base).collect();
    let p: Vec<Vec<Rat>> = others
        .iter()
        .map(|&i| {
            others
                .iter()
                .map(|&j| {
                    let mut v = &k.psi[i][base] + &k.psi[j][base] - &k.psi[i][j];
                    if i == j {
                        if let Some(t) = shift {
                            v += t;
                        }
                    }
                    v
                })
                .collect()
        })
        .collect();
    let violation = negative_direction(&p).map(|v| {
        let mut lambda = vec![Rat::zero(); n];
        let mut sum = Rat::zero();
        for (&i, vi) in others.iter().zip(&v) {
            sum += vi;
            lambda[i] = vi.clone();
        }
        lambda[base] = -sum;
        lambda
    });
    Ok(CndVerdict {
        is_cnd: violation.is_none(),
        violation,
        base_point: base,
    })
}

/// A vector `v` with `vᵀAv < 0` for a symmetric rational matrix, or `None` if `A` is PSD.
pub fn negative_direction(a: &[Vec<Rat>]) -> Option<Vec<Rat>> {
    let n = a.len();
    if n == 0 {
        return None;
    }
    let unit = |i: usize| -> Vec<Rat> { (0..n).map(|k| if k == i { Rat::one() } else { Rat::zero() }).collect() };
    if let Some(i) = (0..n).find(|&i| a[i][i].is_negative()) {
        return Some(unit(i));
    }
    // zero diagonal with a non-zero off-diagonal entry: t·e_i + e_j has value -1
    for i in (0..n).filter(|&i| a[i][i].is_zero()) {
        if let Some(j) = (0..n).find(|&j| !a[i][j].is_zero()) {
            let t = -(&a[j][j] + Rat::one()) / (rat::int(2) * &a[i][j]);
            let mut v = unit(j);
            v[i] = t;
            return Some(v);
        }
    }
    let pivot = (0..n).find(|&i| a[i][i].is_positive());
    let Some(k) = pivot else {
        // every row is zero
        return None;
    };
    let rest: Vec<usize> = (0..n).filter(|&i| i != k).collect();
    let akk = &a[k][k];
    // zero rows have been excluded from being pivots but may remain in `rest`; the Schur step handles them
    let schur: Vec<Vec<Rat>> = rest
        .iter()
        .map(|&i| rest.iter().map(|&j| &a[i][j] - &a[i][k] * &a[k][j] / akk).collect())
        .collect();
    let w = negative_direction(&schur)?;
    let mut v = vec![Rat::zero(); n];
    let mut dot = Rat::zero();
    for (&i, wi) in rest.iter().zip(&w) {
        dot += &a[k][i] * wi;
        v[i] = wi.clone();
    }
    v[k] = -dot / akk;
    Some(v)
}

/// Entrywise `ψ^α` for `α ∈ (0,1]`; exact for `α = 1`, dyadic to `2^-48` otherwise.
pub fn schoenberg_power(k: &Kernel, alpha: &Rat) -> Result<Kernel, KernelError> {
    if !alpha.is_positive() || *alpha > Rat::one() {
        return Err(KernelError::Exponent);
    }
    if alpha.is_one() {
        return Ok(k.clone());
    }
    let (num, den) = (
        alpha.numer().to_u32().ok_or(KernelError::Exponent)?,
        alpha.denom().to_u32().ok_or(KernelError::Exponent)?,
    );
    let psi = k
        .psi
        .iter()
        .map(|row| row.iter().map(|v| rat::dyadic_pow(v, num, den, DYADIC_BITS)).collect())
        .collect();
    let mut out = Kernel::new(psi)?;
    out.labels = k.labels.clone();
    out.approximate = true;
    Ok(out)
}

/// `√ψ`, flagged approximate.
pub fn sqrt_kernel(k: &Kernel) -> Kernel {
    schoenberg_power(k, &rat::ratio(1, 2)).expect("1/2 is a valid exponent")
}

/// Type-1 (measure definite) decision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Type1Verdict {
    Yes { decomposition: CutDecomposition },
    /// The triangle inequality fails, so no cut decomposition can exist.
    NoTriangle { triple: [usize; 3] },
    NoCutCone { certificate: FarkasCertificate },
    Unknown { reason: String },
}

impl Type1Verdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, Type1Verdict::Yes { .. })
    }

    pub fn is_no(&self) -> bool {
        matches!(self, Type1Verdict::NoTriangle { .. } | Type1Verdict::NoCutCone { .. })
    }
}

/// Checks `ψ = Σ_S λ_S δ_S` with `λ_S ≥ 0`. Approximate kernels get slack [`lp_slack`] on
/// every equality and on the triangle inequality.
pub fn is_measure_definite(k: &Kernel, cap: usize) -> Result<Type1Verdict, KernelError> {
    if k.len() > cap {
        return Err(EmbedError::CapExceeded { n: k.len(), cap }.into());
    }
    let slack = k.approximate.then(lp_slack);
    let tol = slack.clone().unwrap_or_else(Rat::zero);
    if let Some(triple) = k.triangle_violation(&tol) {
        return Ok(Type1Verdict::NoTriangle { triple });
    }
    Ok(match decompose_matrix(&k.psi, slack.as_ref(), cap)? {
        CutConeOutcome::Decomposed(decomposition) => Type1Verdict::Yes { decomposition },
        CutConeOutcome::Infeasible { certificate } => Type1Verdict::NoCutCone { certificate },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum HypermetricVerdict {
    /// No violation among integer vectors with entries in `[-bound, bound]`. Not a proof of hypermetricity.
    YesAtBound { bound: u32 },
    No {
        bound: u32,
        lambda: Vec<i64>,
        #[serde(with = "rat::serde_str")]
        value: Rat,
    },
    Unknown { reason: String },
}

impl HypermetricVerdict {
    pub fn is_no(&self) -> bool {
        matches!(self, HypermetricVerdict::No { .. })
    }
}

/// Exhaustive search for integer `λ`, `|λ_i| ≤ bound`, `Σλ = 1`, with `Σ λ_i λ_j ψ_ij > 0`.
///
/// Vectors are visited in odometer order on `λ_1..λ_{n-1}` (from `-bound`
/// upward), with `λ_0 = 1 - Σ` the dependent entry; the first violation is
/// returned. Approximate kernels only count values above [`tau`].
pub fn is_hypermetric_bounded(k: &Kernel, bound: u32) -> Result<HypermetricVerdict, KernelError> {
    if bound == 0 {
        return Err(KernelError::Bound);
    }
    let n = k.len();
    let count = (2 * bound as u128 + 1).pow((n - 1) as u32);
    if count > HYPERMETRIC_ENUM_CAP as u128 {
        return Err(KernelError::EnumerationCap {
            count,
            cap: HYPERMETRIC_ENUM_CAP,
        });
    }
    // integer matrix psi * den
    let den = rat::common_denominator(k.psi.iter().flatten());
    let scaled: Vec<Vec<BigInt>> = k
        .psi
        .iter()
        .map(|r| r.iter().map(|v| (v * Rat::from_integer(den.clone())).to_integer()).collect())
        .collect();
    let threshold: Rat = if k.approximate { tau() } else { Rat::zero() };
    // value > t  ⟺  value > ⌊t⌋ for integer values
    let threshold_int = (threshold * Rat::from_integer(den.clone())).floor().to_integer();
    let small: Option<(Vec<Vec<i128>>, i128)> = scaled
        .iter()
        .map(|r| r.iter().map(|v| v.to_i64().map(i128::from)).collect::<Option<Vec<_>>>())
        .collect::<Option<Vec<_>>>()
        .zip(threshold_int.to_i64().map(i128::from));
    let b = bound as i64;
    let mut lambda = vec![-b; n];
    lambda[0] = 0;
    loop {
        let rest: i64 = lambda[1..].iter().sum();
        let l0 = 1 - rest;
        if l0.abs() <= b {
            lambda[0] = l0;
            let violated = match &small {
                Some((m, t)) => {
                    let mut value = 0i128;
                    for i in 0..n {
                        for j in i + 1..n {
                            value += m[i][j] * i128::from(lambda[i] * lambda[j]);
                        }
                    }
                    2 * value > *t
                }
                None => {
                    let mut value = BigInt::zero();
                    for i in 0..n {
                        for j in i + 1..n {
                            value += &scaled[i][j] * (lambda[i] * lambda[j]);
                        }
                    }
                    value * 2 > threshold_int
                }
            };
            if violated {
                let value = form_scaled(&scaled, &lambda);
                return Ok(HypermetricVerdict::No {
                    bound,
                    lambda: lambda.clone(),
                    value: Rat::new(value, den),
                });
            }
        }
        // advance odometer on positions 1..n
        let mut pos = 1;
        loop {
            if pos == n {
                return Ok(HypermetricVerdict::YesAtBound { bound });
            }
            if lambda[pos] < b {
                lambda[pos] += 1;
                break;
            }
            lambda[pos] = -b;
            pos += 1;
        }
    }
}

fn form_scaled(scaled: &[Vec<BigInt>], lambda: &[i64]) -> BigInt {
    let mut value = BigInt::zero();
    for (i, li) in lambda.iter().enumerate() {
        for (j, lj) in lambda.iter().enumerate() {
            value += &scaled[i][j] * (li * lj);
        }
    }
    value
}

/// Verdicts on all three implemented links of the hierarchy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HierarchyVerdict {
    pub type1: Type1Verdict,
    pub hypermetric: HypermetricVerdict,
    pub negative_type: CndVerdict,
    /// Measure-definiteness of `√ψ`, checked whenever `ψ` is CND.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sqrt_type1: Option<Type1Verdict>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassifyOptions {
    pub bound: u32,
    pub lp_cap: usize,
    pub check_sqrt: bool,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            bound: 3,
            lp_cap: DEFAULT_LP_CAP,
            check_sqrt: true,
        }
    }
}

/// Runs all three tests and rejects any result contradicting the implication chain.
pub fn classify(k: &Kernel, opts: ClassifyOptions) -> Result<HierarchyVerdict, KernelError> {
    let type1 = match is_measure_definite(k, opts.lp_cap) {
        Err(KernelError::Embed(EmbedError::CapExceeded { n, cap })) => Type1Verdict::Unknown {
            reason: format!("{n} points exceed the cut-cone cap of {cap}"),
        },
        r => r?,
    };
    let hypermetric = match is_hypermetric_bounded(k, opts.bound) {
        Err(e @ KernelError::EnumerationCap { .. }) => HypermetricVerdict::Unknown { reason: e.to_string() },
        r => r?,
    };
    let negative_type = if k.approximate { is_cnd_within(k, &tau()) } else { is_cnd(k) };
    let sqrt_type1 = if opts.check_sqrt && negative_type.is_cnd && k.len() <= opts.lp_cap {
        Some(is_measure_definite(&sqrt_kernel(k), opts.lp_cap)?)
    } else {
        None
    };
    let v = HierarchyVerdict {
        type1,
        hypermetric,
        negative_type,
        sqrt_type1,
    };
    check_chain(&v)?;
    Ok(v)
}

/// Inversions of the proven implications are bugs, never verdicts.
pub fn check_chain(v: &HierarchyVerdict) -> Result<(), KernelError> {
    if v.type1.is_yes() && v.hypermetric.is_no() {
        return Err(KernelError::Chain("type 1 but not hypermetric".into()));
    }
    if v.type1.is_yes() && !v.negative_type.is_cnd {
        return Err(KernelError::Chain("type 1 but not conditionally negative definite".into()));
    }
    if let Some(s) = &v.sqrt_type1 {
        if !s.is_yes() {
            return Err(KernelError::Chain("square root of a CND kernel is not measure definite".into()));
        }
    }
    Ok(())
}
