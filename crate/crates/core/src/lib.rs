//! Exact-arithmetic verification kernel for the combinatorics of the
//! Weyl group of type E6: the root and weight lattices, the rank-7
//! unimodular lattice of signature (1,6) containing them, the 27-line
//! graph with its Schläfli labelling, the involution and cube structure
//! of the group, quadratic-form identities over Q between the associated
//! trace forms, and Stiefel-Whitney class computations over F2.
//!
//! Everything is integer, rational or F2 arithmetic; no floating point.

pub mod exact;
pub mod lattice;
pub mod qforms;
pub mod schlafli;
pub mod sw;
pub mod twisting;
pub mod weyl;

pub use lattice::E6Lattice;
pub use twisting::VerifyContext;

