//! Seeded generators of small random instances.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::bitset::PointSet;
use crate::kernels::Kernel;
use crate::metric::L1Points;
use crate::rat::{int, Rat};
use crate::walls::{Wall, WallSpace};

/// `count` distinct points of `ℤ^dim` with coordinates drawn from `values`.
pub fn l1_generators<R: Rng>(rng: &mut R, count: usize, dim: usize, values: &[i64]) -> L1Points {
    let mut coords: Vec<Vec<Rat>> = Vec::new();
    let limit = values.len().pow(dim as u32);
    while coords.len() < count.min(limit) {
        let p: Vec<Rat> = (0..dim).map(|_| int(*values.choose(rng).expect("values not empty"))).collect();
        if !coords.contains(&p) {
            coords.push(p);
        }
    }
    L1Points::new(dim, coords).expect("dimensions agree")
}

/// `walls` random non-trivial bipartitions of `n ≥ 2` points with weights in `1..=max_weight`.
pub fn wall_space<R: Rng>(rng: &mut R, n: usize, walls: usize, max_weight: i64) -> WallSpace {
    assert!(n >= 2, "a non-trivial wall needs two points");
    let walls = (0..walls)
        .map(|_| {
            let h = loop {
                let h = PointSet::from_indices(n, (0..n).filter(|_| rng.gen_bool(0.5)));
                if !h.is_empty() && h.len() < n {
                    break h;
                }
            };
            Wall {
                h,
                weight: int(rng.gen_range(1..=max_weight)),
            }
        })
        .collect();
    WallSpace::new(n, walls).expect("weights are positive")
}

/// Random subset of `0..n` of size between 1 and `n - 1`.
pub fn proper_subset<R: Rng>(rng: &mut R, n: usize) -> PointSet {
    loop {
        let s = PointSet::from_indices(n, (0..n).filter(|_| rng.gen_bool(0.5)));
        if !s.is_empty() && s.len() < n {
            return s;
        }
    }
}

/// `|p_i - p_j|²` for `n` integer points of `ℤ^dim` with coordinates in `[-range, range]`.
pub fn squared_euclidean_kernel<R: Rng>(rng: &mut R, n: usize, dim: usize, range: i64) -> Kernel {
    let pts: Vec<Vec<Rat>> = (0..n)
        .map(|_| (0..dim).map(|_| int(rng.gen_range(-range..=range))).collect())
        .collect();
    Kernel::squared_euclidean(&pts).expect("squared distances form a kernel")
}

/// Non-negative combination of random cuts; always measure definite.
pub fn cut_kernel<R: Rng>(rng: &mut R, n: usize, cuts: usize, max_weight: i64) -> Kernel {
    let mut psi = vec![vec![int(0); n]; n];
    for _ in 0..cuts {
        let s = proper_subset(rng, n.max(2));
        let w = int(rng.gen_range(1..=max_weight));
        for (i, row) in psi.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                if s.contains(i) != s.contains(j) {
                    *v += &w;
                }
            }
        }
    }
    Kernel::new(psi).expect("cut sums form a kernel")
}

/// Symmetric matrix with zero diagonal and off-diagonal entries in `1..=max`.
pub fn arbitrary_kernel<R: Rng>(rng: &mut R, n: usize, max: i64) -> Kernel {
    let mut psi = vec![vec![int(0); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = int(rng.gen_range(1..=max));
            psi[i][j] = v.clone();
            psi[j][i] = v;
        }
    }
    Kernel::new(psi).expect("entries are non-negative and symmetric")
}

/// A mixed batch for the `kernel classify --random` command: one in three of each family.
pub fn kernel_batch<R: Rng>(rng: &mut R, count: usize) -> Vec<Kernel> {
    (0..count)
        .map(|i| {
            let n = rng.gen_range(2..=6);
            let size = rng.gen_range(1..=4);
            match i % 3 {
                0 => squared_euclidean_kernel(rng, n, size, 4),
                1 => cut_kernel(rng, n, size, 4),
                _ => arbitrary_kernel(rng, n, 6),
            }
        })
        .collect()
}
