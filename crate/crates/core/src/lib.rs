//! Exact geometry of finite median spaces.
//!
//! All arithmetic is over ℚ. The crate covers:
//!
//! * intervals, medians, gates and rectangles of finite metrics ([`metric`]);
//! * measured walls, wall-interval identities and convex-wall extraction ([`walls`]);
//! * medianization of a finite wall space by admissible sections ([`medianization`]);
//! * cut-cone decompositions with Farkas certificates ([`l1embed`], [`lp`]);
//! * conditionally negative definite, hypermetric and measure definite kernels ([`kernels`]).

pub mod bitset;
pub mod kernels;
pub mod l1embed;
pub mod lp;
pub mod medianization;
pub mod metric;
pub mod random;
pub mod rat;
pub mod walls;

pub use bitset::{IndexSet, PointSet, WallFamily};
pub use kernels::{classify, is_cnd, ClassifyOptions, HierarchyVerdict, Kernel};
pub use l1embed::{cut_cone_decompose, walls_to_embedding, CutConeOutcome, CutDecomposition};
pub use lp::{lp_feasible, FarkasCertificate, LpInstance, LpOutcome};
pub use medianization::{medianize, Limits, MedianizedSpace};
pub use metric::{median_closure, median_closure_capped, FiniteMetric, L1Points, MedianSpace};
pub use rat::Rat;
pub use walls::{extract_convex_walls, MedianWalls, Wall, WallSpace};
