//! Preconditioners: low-stretch trees, balanced tree decompositions,
//! canonical j-trees and sampled core sparsifiers.

mod decompose;
mod forest;
mod jtree;
mod lsst;
mod rooted;
mod spectral;

pub use decompose::{decompose_tree, TreeDecomposition};
pub use forest::{find_forest, local_stretches, SpanningForest};
pub use jtree::{canonical_jtree, jtree_sparsify, jtree_sparsify_with, JTree, CERTIFY_MAX_VERTICES};
pub use lsst::{low_stretch_tree, LowStretchTree};
pub use rooted::RootedForest;
pub use spectral::{
    default_samples, default_threshold, spectral_sparsify_core, spectral_sparsify_with, Sparsified,
    SPARSIFY_MAX_VERTICES,
};
