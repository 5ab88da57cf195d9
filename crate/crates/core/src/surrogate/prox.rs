//! Shrinkage operators and the block proximal map.

use nalgebra::DVector;

use crate::linalg::norm;
use crate::problem::{FeasibleSet, Regularizer};

/// `sign(v)·max(|v| − t, 0)`; exactly zero at the kink `|v| = t`.
pub fn soft_threshold(v: f64, t: f64) -> f64 {
    debug_assert!(t >= 0.0, "threshold must be nonnegative");
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// `max(0, 1 − t/‖v‖)·v`, the proximal map of `t‖·‖₂`.
pub fn group_soft_threshold(v: &[f64], t: f64) -> DVector<f64> {
    debug_assert!(t >= 0.0, "threshold must be nonnegative");
    let nv = norm(v);
    if nv <= t {
        return DVector::zeros(v.len());
    }
    DVector::from_column_slice(v) * (1.0 - t / nv)
}

/// Proximal map of `weight·g_i + ι_{X_i}` where `g_i` is the unit-weight block regularizer.
///
/// For L1 the map is coordinatewise, so clamping after shrinkage is exact even on
/// boxes. Group-L2 blocks are always unconstrained (enforced at problem construction).
pub fn prox_block(reg: &Regularizer, feasible: &FeasibleSet, v: &[f64], step: f64) -> DVector<f64> {
    match *reg {
        Regularizer::Zero => feasible.project_unchecked(v),
        Regularizer::L1 { weight } => {
            let t = weight * step;
            DVector::from_fn(v.len(), |j, _| feasible.clamp_coord(j, soft_threshold(v[j], t)))
        }
        Regularizer::GroupL2 { weight } => {
            let shrunk = group_soft_threshold(v, weight * step);
            feasible.project_unchecked(shrunk.as_slice())
        }
    }
}
