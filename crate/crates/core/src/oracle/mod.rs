//! Exact reference solvers used as base cases and for certification.

mod pencil;
mod qp;
mod scan;

pub use pencil::{pencil_bounds, PencilBounds, PENCIL_MAX_VERTICES};
pub use qp::{qp_solve_exact, qp_solve_exact_from, QpSolution, QP_MAX_VERTICES};
pub use scan::vwf_min_scan;
