//! Computations with finite permutation groups given by generating sets:
//! stabilizer chains, orbit and block-system queries, product actions,
//! and m-closures.
//!
//! The closure of a group `G` at arity `m` is the largest group on the same
//! points whose orbits on m-tuples coincide with those of `G`.  Two routes to
//! it are provided and cross-checked against each other:
//!
//! * [`closure::brute_closure`] — the definition, as a pruned backtracking
//!   search over a coloring of all m-tuples.  Exponential, intended for
//!   small degrees; it is the ground truth.
//! * [`engine::m_closure`] — a recursive algorithm for `m >= 3` that splits
//!   the group along direct/wreath/product-action embeddings, closes the
//!   factors, and re-intersects via relative closures.  Restricted to group
//!   classes closed under subgroups, quotients and extensions (solvable by
//!   default).
//!
//! With the `parallel` feature (on by default) the table-building and
//! search-heavy inner loops have rayon variants (`*_par`); the sequential
//! functions remain the deterministic reference.

pub mod blocks;
pub mod chain;
pub mod closure;
pub mod coloring;
pub mod corpus;
pub mod decomposition;
pub mod engine;
pub mod group;
pub mod perm;
pub mod products;
pub mod verify;

pub use blocks::BlockSystem;
pub use chain::StabilizerChain;
pub use closure::{brute_closure, relative_closure};
pub use coloring::TupleColoring;
pub use decomposition::{solve_embedding, CartesianDecomposition, Embedding, Socle};
pub use engine::{m_closure, ClosureTrace, GroupClass};
pub use group::GeneratedGroup;
pub use perm::Permutation;
pub use products::{direct_product, wreath_imprimitive, wreath_product_action, ProductOperator};

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("point {point} out of range for degree {degree}")]
    PointOutOfRange { point: usize, degree: usize },
    #[error("image array is not a bijection")]
    NotABijection,
    #[error("group is not transitive")]
    NotTransitive,
    #[error("group is transitive")]
    Transitive,
    #[error("group is primitive")]
    Primitive,
    #[error("group is not primitive")]
    NotPrimitive,
    #[error("a generator does not permute the given sets")]
    NotInvariant,
    #[error("tuple table would need {cells} cells, cap is {cap}")]
    TableCapExceeded { cells: u128, cap: usize },
    #[error("degree {degree} exceeds cap {cap}")]
    DegreeCapExceeded { degree: u128, cap: usize },
    #[error("element enumeration would exceed cap {cap}")]
    ElementCapExceeded { cap: usize },
    #[error("decomposition search exceeded cap {cap}")]
    SearchCapExceeded { cap: usize },
    #[error("socle is not elementary abelian regular")]
    SocleNotAbelianRegular,
    #[error("decomposition is not preserved by the group")]
    NotPreserved,
    #[error("decomposition is not homogeneous")]
    Inhomogeneous,
    #[error("decomposition is trivial")]
    TrivialDecomposition,
    #[error("closure engine requires arity m >= 3, got {m}")]
    UnsupportedArity { m: usize },
    #[error("group is not in class {class}")]
    NotInClass { class: &'static str },
    #[error("derived series exceeded the length cap")]
    DerivedSeriesTooLong,
}

/// Result alias used throughout.
pub type Result<T> = std::result::Result<T, Error>;

/// Resource caps for the exponential searches.
///
/// Everything here is a safety valve, not a tuning knob: operations error
/// out rather than run unbounded when a cap is hit.
#[derive(Debug, Clone)]
pub struct Caps {
    /// Maximum number of cells `n^m` in a tuple-coloring table.
    pub table_cells: usize,
    /// Maximum degree fed to the brute-force closure at arity 2.
    pub oracle_degree_m2: usize,
    /// Maximum degree fed to the brute-force closure at arity >= 3.
    pub oracle_degree_m3: usize,
    /// Maximum degree of a product-action wreath `|Delta|^|Gamma|`.
    pub product_degree: usize,
    /// Maximum group order for exhaustive element enumeration.
    pub element_enumeration: usize,
    /// Maximum number of block systems enumerated per decomposition search.
    pub block_systems: usize,
    /// Maximum number of nodes in the decomposition subset search.
    pub search_nodes: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            table_cells: 10_000_000,
            oracle_degree_m2: 16,
            oracle_degree_m3: 12,
            product_degree: 4096,
            element_enumeration: 100_000,
            block_systems: 10_000,
            search_nodes: 1_000_000,
        }
    }
}

impl Caps {
    /// Degree cap for the brute-force closure at the given arity.
    pub fn oracle_degree(&self, m: usize) -> usize {
        match m {
            0 | 1 => usize::MAX,
            2 => self.oracle_degree_m2,
            _ => self.oracle_degree_m3,
        }
    }
}
