//! Reference competitors: accelerated proximal gradient and a cyclic
//! block method with unit steps.

mod fista;
mod gauss_seidel;

pub use fista::{momentum_next, run_fista, run_fista_with, FistaOptions};
pub use gauss_seidel::{run_gauss_seidel, run_gauss_seidel_with, GsOptions};

use nalgebra::DVector;
use rayon::ThreadPoolBuilder;

use crate::error::{invalid, Result};
use crate::problem::CompositeProblem;

/// Proximal map of `G + ι_X` with step `step`, block by block.
pub(crate) fn prox_full(problem: &CompositeProblem, v: &DVector<f64>, step: f64) -> DVector<f64> {
    let mut out = DVector::zeros(v.len());
    let partition = problem.partition();
    for i in 0..partition.num_blocks() {
        let r = partition.range(i);
        let p = crate::surrogate::prox_block(problem.regularizer(), problem.feasible(i), &v.as_slice()[r.clone()], step);
        out.rows_mut(r.start, r.len()).copy_from(&p);
    }
    out
}

pub(crate) fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    if workers == 0 {
        return Err(invalid("at least one worker is required"));
    }
    ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| invalid(format!("cannot start worker pool: {e}")))
}
