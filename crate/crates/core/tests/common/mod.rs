//! Independent oracles and instance builders shared by the integration suites.
#![allow(dead_code)]

use medgeom::metric::{median_closure, L1Points, MedianSpace};
use medgeom::rat::Rat;
use medgeom::walls::WallSpace;
use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn q(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

pub fn l1(p: &[Rat], r: &[Rat]) -> Rat {
    p.iter().zip(r).map(|(a, b)| (a - b).abs()).sum()
}

pub fn coord_median(p: &[Rat], r: &[Rat], s: &[Rat]) -> Vec<Rat> {
    (0..p.len())
        .map(|i| {
            let mut v = [p[i].clone(), r[i].clone(), s[i].clone()];
            v.sort();
            v[1].clone()
        })
        .collect()
}

/// Median test by counting points between every pair of a triple.
pub fn brute_is_median(d: &[Vec<Rat>]) -> bool {
    let n = d.len();
    let between = |a: usize, x: usize, b: usize| &d[a][x] + &d[x][b] == d[a][b];
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let count = (0..n)
                    .filter(|&x| between(a, x, b) && between(b, x, c) && between(a, x, c))
                    .count();
                if count != 1 {
                    return false;
                }
            }
        }
    }
    true
}

/// Integer version of [`brute_is_median`] for larger instances with integer distances.
pub fn brute_is_median_int(d: &[Vec<i64>]) -> bool {
    let n = d.len();
    let words = n.div_ceil(64);
    let mut intervals = vec![vec![0u64; words]; n * n];
    for a in 0..n {
        for b in 0..n {
            for x in 0..n {
                if d[a][x] + d[x][b] == d[a][b] {
                    intervals[a * n + b][x / 64] |= 1 << (x % 64);
                }
            }
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let count: u32 = (0..words)
                    .map(|w| (intervals[a * n + b][w] & intervals[b * n + c][w] & intervals[a * n + c][w]).count_ones())
                    .sum();
                if count != 1 {
                    return false;
                }
            }
        }
    }
    true
}

/// Walls separating `x` from `y`, read straight off the halfspaces.
pub fn separating(ws: &WallSpace, x: usize, y: usize) -> Vec<usize> {
    ws.walls()
        .iter()
        .enumerate()
        .filter(|(_, w)| w.h.contains(x) != w.h.contains(y))
        .map(|(i, _)| i)
        .collect()
}

pub fn weight_of(ws: &WallSpace, family: &[usize]) -> Rat {
    family.iter().map(|&i| ws.walls()[i].weight.clone()).sum()
}

/// Distinct random generators in `ℚ^dim` with coordinates from `values`.
pub fn random_generators<R: Rng>(rng: &mut R, count: usize, dim: usize, values: &[Rat]) -> L1Points {
    let mut pts: Vec<Vec<Rat>> = Vec::new();
    while pts.len() < count.min(values.len().pow(dim as u32)) {
        let p: Vec<Rat> = (0..dim).map(|_| values.choose(rng).unwrap().clone()).collect();
        if !pts.contains(&p) {
            pts.push(p);
        }
    }
    L1Points::new(dim, pts).unwrap()
}

pub struct Closure {
    pub points: Vec<Vec<Rat>>,
    pub space: MedianSpace,
}

pub fn closure_of(gens: &L1Points) -> Closure {
    let c = median_closure(gens).unwrap();
    let points = c.points.coords().to_vec();
    Closure {
        points,
        space: MedianSpace::with_cap(c.metric, 512).unwrap(),
    }
}

pub fn random_closure<R: Rng>(rng: &mut R, max_gens: usize, dim: usize, values: &[Rat]) -> Closure {
    let count = rng.gen_range(2..=max_gens);
    closure_of(&random_generators(rng, count, dim, values))
}

pub fn is_zero(r: &Rat) -> bool {
    r.is_zero()
}

/// `W(F|G)` straight from the definition, with `W(A|A) = ∅`.
pub fn direct_interval(ws: &WallSpace, f: &[usize], g: &[usize]) -> Vec<usize> {
    let (mut a, mut b) = (f.to_vec(), g.to_vec());
    a.sort_unstable();
    b.sort_unstable();
    a.dedup();
    b.dedup();
    if a == b {
        return Vec::new();
    }
    ws.walls()
        .iter()
        .enumerate()
        .filter(|(_, w)| {
            let f_in = f.iter().all(|&x| w.h.contains(x));
            let f_out = f.iter().all(|&x| !w.h.contains(x));
            let g_in = g.iter().all(|&x| w.h.contains(x));
            let g_out = g.iter().all(|&x| !w.h.contains(x));
            (f_in && g_out) || (f_out && g_in)
        })
        .map(|(i, _)| i)
        .collect()
}
