//! Dense helpers shared by the oracles and solvers.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;

use crate::error::{Error, Result};

const POWER_MAX_ITERS: usize = 20_000;
const POWER_REL_TOL: f64 = 1e-12;

/// Largest eigenvalue of `AᵀA` (the squared spectral norm of `A`) by power iteration.
///
/// The start vector is drawn from a fixed-seed generator so the estimate is
/// reproducible. On hitting the iteration cap the best estimate is returned
/// inside [`Error::NumericFailure`].
pub fn spectral_norm_sq(a: &DMatrix<f64>) -> Result<f64> {
    let n = a.ncols();
    if n == 0 || a.nrows() == 0 {
        return Ok(0.0);
    }
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(0x5eed_cafe);
    let mut v = DVector::from_fn(n, |_, _| rng.random::<f64>() - 0.5);
    let norm = v.norm();
    if norm == 0.0 {
        v.fill(1.0);
    }
    v /= v.norm();

    let mut estimate = 0.0;
    for _ in 0..POWER_MAX_ITERS {
        let av = a * &v;
        let next = av.norm_squared();
        let mut w = a.tr_mul(&av);
        let wn = w.norm();
        if wn == 0.0 {
            return Ok(0.0);
        }
        w /= wn;
        v = w;
        if (next - estimate).abs() <= POWER_REL_TOL * next {
            return Ok(next.max(estimate));
        }
        estimate = next;
    }
    Err(Error::NumericFailure {
        message: format!("power iteration did not settle in {POWER_MAX_ITERS} steps"),
        best: estimate,
    })
}

/// `Dᵀv`, one column dot product per entry.
///
/// Each entry is an independent dot product, so the result does not depend on
/// how rayon splits the columns.
pub fn tr_mul_par(d: &DMatrix<f64>, v: &DVector<f64>) -> DVector<f64> {
    let entries: Vec<f64> = (0..d.ncols())
        .into_par_iter()
        .map(|j| d.column(j).dot(v))
        .collect();
    DVector::from_vec(entries)
}

/// Euclidean norm of a slice.
pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dist(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}
