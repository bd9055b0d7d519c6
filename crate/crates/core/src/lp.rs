//! Exact feasibility for `A·λ = b, λ ≥ 0` over the rationals.
//!
//! Phase one of the simplex method on a dense fraction-free integer tableau
//! with Bland's rule. Either a feasible point or a Farkas certificate `y` with `yᵀA ≤ 0`
//! and `yᵀb > 0` is returned; both are re-checked before they leave this
//! module.
//!
//! With a slack `ε`, each equality is relaxed to `|A_i·λ - b_i| ≤ ε`. That
//! system is rewritten as an equality system over `(λ, w, r) ≥ 0`:
//! `A·λ - w = b - ε` and `w + r = 2ε`. Certificates always refer to this
//! standard form (see [`LpInstance::standard_form`]).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rat::{self, Rat};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("row {row} has {got} coefficients, expected {expected}")]
    Dimension { row: usize, got: usize, expected: usize },
    #[error("{rows} constraint rows but {rhs} right-hand sides")]
    RhsLength { rows: usize, rhs: usize },
    #[error("slack must be non-negative")]
    NegativeSlack,
    #[error("internal verification failed: {0}")]
    Verification(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpInstance {
    #[serde(with = "rat::serde_matrix")]
    pub a: Vec<Vec<Rat>>,
    #[serde(with = "rat::serde_vec")]
    pub b: Vec<Rat>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_rat")]
    pub slack: Option<Rat>,
}

mod opt_rat {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Rat>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(r) => s.serialize_some(&rat::fmt_rat(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rat>, D::Error> {
        let raw: Option<String> = Option::deserialize(d)?;
        raw.map(|s| rat::parse_rat(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

/// Dual vector proving infeasibility of the standard form `A'x = b', x ≥ 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FarkasCertificate {
    #[serde(with = "rat::serde_vec")]
    pub y: Vec<Rat>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    /// Values of the original variables `λ`.
    Feasible(Vec<Rat>),
    Infeasible(FarkasCertificate),
}

impl LpInstance {
    pub fn new(a: Vec<Vec<Rat>>, b: Vec<Rat>) -> Result<Self, LpError> {
        let lp = Self { a, b, slack: None };
        lp.validate()?;
        Ok(lp)
    }

    pub fn with_slack(mut self, eps: Rat) -> Result<Self, LpError> {
        if eps.is_negative() {
            return Err(LpError::NegativeSlack);
        }
        self.slack = Some(eps);
        Ok(self)
    }

    pub fn n_vars(&self) -> usize {
        self.a.first().map_or(0, Vec::len)
    }

    fn validate(&self) -> Result<(), LpError> {
        if self.a.len() != self.b.len() {
            return Err(LpError::RhsLength {
                rows: self.a.len(),
                rhs: self.b.len(),
            });
        }
        let m = self.n_vars();
        for (row, r) in self.a.iter().enumerate() {
            if r.len() != m {
                return Err(LpError::Dimension {
                    row,
                    got: r.len(),
                    expected: m,
                });
            }
        }
        if self.slack.as_ref().is_some_and(Signed::is_negative) {
            return Err(LpError::NegativeSlack);
        }
        Ok(())
    }

    /// The equality system `(A', b')` actually solved, over non-negative variables.
    pub fn standard_form(&self) -> (Vec<Vec<Rat>>, Vec<Rat>) {
        let Some(eps) = &self.slack else {
            return (self.a.clone(), self.b.clone());
        };
        let rows = self.a.len();
        let m = self.n_vars();
        let width = m + 2 * rows;
        let mut a = Vec::with_capacity(2 * rows);
        let mut b = Vec::with_capacity(2 * rows);
        for (i, r) in self.a.iter().enumerate() {
            let mut row = vec![Rat::zero(); width];
            row[..m].clone_from_slice(r);
            row[m + i] = -Rat::one();
            a.push(row);
            b.push(&self.b[i] - eps);
        }
        for i in 0..rows {
            let mut row = vec![Rat::zero(); width];
            row[m + i] = Rat::one();
            row[m + rows + i] = Rat::one();
            a.push(row);
            b.push(eps * rat::int(2));
        }
        (a, b)
    }

    /// Whether `λ ≥ 0` satisfies every constraint (within the slack, if any).
    pub fn check_solution(&self, lambda: &[Rat]) -> bool {
        if lambda.len() != self.n_vars() || lambda.iter().any(Signed::is_negative) {
            return false;
        }
        let zero = Rat::zero();
        let eps = self.slack.as_ref().unwrap_or(&zero);
        self.a.iter().zip(&self.b).all(|(row, b)| {
            let lhs: Rat = row.iter().zip(lambda).map(|(a, l)| a * l).sum();
            (lhs - b).abs() <= *eps
        })
    }

    /// Whether `y` proves the standard form infeasible.
    pub fn check_certificate(&self, cert: &FarkasCertificate) -> bool {
        let (a, b) = self.standard_form();
        if cert.y.len() != a.len() {
            return false;
        }
        let width = a.first().map_or(0, Vec::len);
        let yb: Rat = cert.y.iter().zip(&b).map(|(y, b)| y * b).sum();
        yb.is_positive()
            && (0..width).all(|j| {
                let s: Rat = cert.y.iter().zip(&a).map(|(y, row)| y * &row[j]).sum();
                !s.is_positive()
            })
    }
}

/// Decides feasibility exactly.
pub fn lp_feasible(lp: &LpInstance) -> Result<LpOutcome, LpError> {
    lp.validate()?;
    let (a, b) = lp.standard_form();
    let outcome = match phase_one(&a, &b) {
        PhaseOne::Feasible(x) => LpOutcome::Feasible(x[..lp.n_vars()].to_vec()),
        PhaseOne::Infeasible(y) => LpOutcome::Infeasible(FarkasCertificate { y }),
    };
    match &outcome {
        LpOutcome::Feasible(x) if !lp.check_solution(x) => {
            Err(LpError::Verification("simplex solution violates a constraint".into()))
        }
        LpOutcome::Infeasible(c) if !lp.check_certificate(c) => {
            Err(LpError::Verification("Farkas certificate does not verify".into()))
        }
        _ => Ok(outcome),
    }
}

enum PhaseOne {
    Feasible(Vec<Rat>),
    Infeasible(Vec<Rat>),
}

/// Minimises the sum of artificial variables for `A x = b, x ≥ 0`.
///
/// The tableau is kept integral by fraction-free pivoting: every row shares
/// the denominator `det`, the last pivot, and each update divides exactly by
/// the previous one. Every basic column is `det·e_i`.
fn phase_one(a: &[Vec<Rat>], b: &[Rat]) -> PhaseOne {
    let rows = a.len();
    let n = a.first().map_or(0, Vec::len);
    let width = n + rows;
    // row i is scaled by sign_i·scale_i > 0 into integers with a non-negative rhs
    let mut scale: Vec<BigInt> = Vec::with_capacity(rows);
    let mut t: Vec<Vec<BigInt>> = Vec::with_capacity(rows);
    for i in 0..rows {
        let den = a[i]
            .iter()
            .chain(std::iter::once(&b[i]))
            .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let s = if b[i].is_negative() { -den } else { den };
        let sr = Rat::from_integer(s.clone());
        let mut row = Vec::with_capacity(width + 1);
        row.extend(a[i].iter().map(|v| (v * &sr).to_integer()));
        row.extend((0..rows).map(|k| if k == i { BigInt::one() } else { BigInt::zero() }));
        row.push((&b[i] * &sr).to_integer());
        t.push(row);
        scale.push(s);
    }
    let mut basis: Vec<usize> = (n..width).collect();
    // reduced costs for the objective sum(artificials); last entry is -objective
    let mut cost: Vec<BigInt> = vec![BigInt::zero(); width + 1];
    for row in &t {
        for j in 0..n {
            cost[j] -= &row[j];
        }
        cost[width] -= &row[width];
    }
    let mut det = BigInt::one();

    // Bland: lowest-index improving column, ties in the ratio test to the lowest basic index
    while let Some(enter) = (0..width).find(|&j| cost[j].is_negative()) {
        let mut leave: Option<usize> = None;
        for i in 0..rows {
            if !t[i][enter].is_positive() {
                continue;
            }
            let better = match leave {
                None => true,
                Some(l) => {
                    // t[i][w]/t[i][e] vs t[l][w]/t[l][e], both denominators positive
                    let lhs = &t[i][width] * &t[l][enter];
                    let rhs = &t[l][width] * &t[i][enter];
                    lhs < rhs || (lhs == rhs && basis[i] < basis[l])
                }
            };
            if better {
                leave = Some(i);
            }
        }
        // phase one is bounded below by zero, so a leaving row always exists
        let r = leave.expect("phase-one objective is bounded");
        pivot(&mut t, &mut cost, &mut det, r, enter);
        basis[r] = enter;
    }

    let d = Rat::from_integer(det.clone());
    let objective = -Rat::from_integer(cost[width].clone()) / &d;
    if objective.is_positive() {
        // y_i = (1 - reduced cost of artificial i) for the scaled row, mapped back
        let y = (0..rows)
            .map(|i| (Rat::one() - Rat::from_integer(cost[n + i].clone()) / &d) * Rat::from_integer(scale[i].clone()))
            .collect();
        PhaseOne::Infeasible(y)
    } else {
        let mut x = vec![Rat::zero(); width];
        for (i, &j) in basis.iter().enumerate() {
            x[j] = Rat::from_integer(t[i][width].clone()) / &d;
        }
        x.truncate(n);
        PhaseOne::Feasible(x)
    }
}

fn pivot(t: &mut [Vec<BigInt>], cost: &mut [BigInt], det: &mut BigInt, r: usize, c: usize) {
    let p = t[r][c].clone();
    let pivot_row = t[r].clone();
    let update = |row: &mut Vec<BigInt>| {
        let f = row[c].clone();
        if f.is_zero() {
            for v in row.iter_mut().filter(|v| !v.is_zero()) {
                *v = &*v * &p / &*det;
            }
        } else {
            for (v, pr) in row.iter_mut().zip(&pivot_row) {
                if pr.is_zero() {
                    if !v.is_zero() {
                        *v = &*v * &p / &*det;
                    }
                } else {
                    *v = (&*v * &p - &f * pr) / &*det;
                }
            }
        }
    };
    for (i, row) in t.iter_mut().enumerate() {
        if i != r {
            update(row);
        }
    }
    let mut cost_row = cost.to_vec();
    update(&mut cost_row);
    cost.clone_from_slice(&cost_row);
    *det = p;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, ratio};

    fn lp(a: &[&[i64]], b: &[i64]) -> LpInstance {
        LpInstance::new(
            a.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect(),
            b.iter().map(|&v| int(v)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_variable() {
        assert_eq!(lp_feasible(&lp(&[&[1]], &[1])).unwrap(), LpOutcome::Feasible(vec![int(1)]));
    }

    #[test]
    fn contradictory_rows() {
        let inst = lp(&[&[1], &[1]], &[1, 2]);
        match lp_feasible(&inst).unwrap() {
            LpOutcome::Infeasible(c) => {
                assert!(inst.check_certificate(&c));
                assert!(c.y[1].is_positive());
                assert!(c.y[0].is_negative());
            }
            o => panic!("expected infeasible, got {o:?}"),
        }
    }

    #[test]
    fn negativity_forces_infeasibility() {
        let inst = lp(&[&[1, 1]], &[-1]);
        assert!(matches!(lp_feasible(&inst).unwrap(), LpOutcome::Infeasible(_)));
    }

    #[test]
    fn planted_solution() {
        let x = [int(2), int(0), ratio(1, 3), int(5)];
        let a: Vec<Vec<Rat>> = vec![
            vec![int(1), int(2), int(-3), int(0)],
            vec![int(0), int(1), int(1), int(1)],
            vec![int(4), int(-1), int(0), int(2)],
        ];
        let b = a.iter().map(|r| r.iter().zip(&x).map(|(u, v)| u * v).sum()).collect();
        let inst = LpInstance::new(a, b).unwrap();
        match lp_feasible(&inst).unwrap() {
            LpOutcome::Feasible(sol) => assert!(inst.check_solution(&sol)),
            o => panic!("planted system reported {o:?}"),
        }
    }

    #[test]
    fn slack_relaxes_equalities() {
        let inst = lp(&[&[1], &[1]], &[1, 2]);
        let relaxed = inst.clone().with_slack(ratio(1, 2)).unwrap();
        match lp_feasible(&relaxed).unwrap() {
            LpOutcome::Feasible(x) => assert_eq!(x, vec![ratio(3, 2)]),
            o => panic!("{o:?}"),
        }
        let tight = inst.with_slack(ratio(1, 4)).unwrap();
        match lp_feasible(&tight).unwrap() {
            LpOutcome::Infeasible(c) => assert!(tight.check_certificate(&c)),
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn dimension_errors() {
        let bad = LpInstance::new(vec![vec![int(1), int(2)], vec![int(1)]], vec![int(0), int(0)]);
        assert!(matches!(bad, Err(LpError::Dimension { row: 1, .. })));
        let bad = LpInstance::new(vec![vec![int(1)]], vec![]);
        assert!(matches!(bad, Err(LpError::RhsLength { .. })));
        assert_eq!(lp(&[&[1]], &[1]).with_slack(int(-1)).unwrap_err(), LpError::NegativeSlack);
    }

    #[test]
    fn empty_system_is_feasible() {
        let inst = LpInstance::new(vec![], vec![]).unwrap();
        assert_eq!(lp_feasible(&inst).unwrap(), LpOutcome::Feasible(vec![]));
    }
}
