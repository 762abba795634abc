//! Solving instances whose graph is a j-tree: eliminate the envelope,
//! refine on the compressed core, and map back.

use crate::eliminate::eliminate;
use crate::error::Result;
use crate::instance::Instance;

use super::iter::{iter_refine, Oracle};

/// Oracle quality on the core after compression: 2 from the compression
/// sandwich times 2 from the core oracle.
pub const CORE_ALPHA: f64 = 4.0;

#[derive(Debug, Clone)]
pub struct JTreeSolution {
    pub x: Vec<f64>,
    pub eliminated: usize,
    pub core_vertices: usize,
    pub refinement_steps: usize,
}

pub fn jtree_solve(inst: &Instance<f64>, eps: f64, core_oracle: &mut Oracle<'_>) -> Result<JTreeSolution> {
    let elim = eliminate(inst)?;
    let core = &elim.reduced;
    let refined = iter_refine(core, eps, CORE_ALPHA, &mut |r: &Instance<f64>| core_oracle(&r.compressed()?))?;
    let x = elim.map.recover(&refined.x)?;
    Ok(JTreeSolution {
        x,
        eliminated: elim.map.records().len(),
        core_vertices: core.n(),
        refinement_steps: refined.steps,
    })
}
