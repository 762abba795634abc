//! Flow diffusion on weighted graphs.
//!
//! The solver minimises `x^T L x / 2 + sum_u f_u(x_u)` over `x >= b`, where
//! each `f_u` is a convex piecewise quadratic, by preconditioning with
//! j-trees, eliminating their envelopes and recursing on the cores.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod eliminate;
pub mod error;
pub mod gen;
pub mod graph;
pub mod instance;
pub mod io;
pub mod oracle;
pub mod scalar;
pub mod solver;
pub mod sparsify;
pub mod vwf;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Graph = graph::Graph<f64>;
pub type Edge = graph::Edge<f64>;
pub type Vwf = vwf::Vwf<f64>;
pub type Piece = vwf::Piece<f64>;
pub type VwfTree = vwf::VwfTree<f64>;
pub type Instance = instance::Instance<f64>;
pub type RecoveryMap = eliminate::RecoveryMap<f64>;
