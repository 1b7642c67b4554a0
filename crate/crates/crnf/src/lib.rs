//! Symbolic-numeric engine for CR-singular quadric models
//! `w = sum z_k zbar_k + sum lambda_k (z_k^2 + zbar_k^2)`.
//!
//! The crate computes Fischer decompositions with respect to the model
//! quadric, assembles and solves the associated structured block linear
//! systems, certifies the norm-bound ledger behind the block elimination,
//! runs the degree-by-degree partial normal-form algorithm (in the real and
//! the complexified Segre settings), and evaluates the rapid-iteration
//! arithmetic that drives the convergence argument.
//!
//! Everything works over two coefficient domains: exact Gaussian rationals
//! (the oracle) and double-precision complex numbers (norm scans). Grid
//! scans and batch decompositions are data parallel; the `parallel` feature
//! (default) backs them with rayon, otherwise they run sequentially.

pub mod blocksys;
pub mod error;
pub mod fischer;
pub mod matrix;
pub mod moser;
pub mod multi_index;
pub mod normalform;
pub mod par;
pub mod poly;
pub mod scalar;
pub mod segre;
pub mod series;

pub use error::{Error, Result};
pub use multi_index::{BishopData, Key, MultiIndex};
pub use poly::{quadric, HomPoly, VarKind};
pub use scalar::{Coeff, Cx, Exact};
