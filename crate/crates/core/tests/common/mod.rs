//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

pub fn rng(seed: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

pub fn rand_matrix(rng: &mut Xoshiro256PlusPlus, m: usize, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(m, n, |_, _| rng.random_range(-1.0..1.0))
}

pub fn rand_vector(rng: &mut Xoshiro256PlusPlus, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0))
}

/// Scalar minimizer by grid search followed by golden-section refinement.
///
/// `diff(u, v)` must return `f(u) − f(v)`; passing the difference rather than
/// two values lets callers factor out `u − v` and keep precision near the
/// minimum, where plain value comparisons stall around √ε.
pub fn golden_section_min(diff: impl Fn(f64, f64) -> f64, lo: f64, hi: f64) -> f64 {
    assert!(lo < hi);
    let grid = 2000;
    let pt = |k: usize| lo + (hi - lo) * k as f64 / grid as f64;
    let mut best = 0;
    for k in 1..=grid {
        if diff(pt(k), pt(best)) < 0.0 {
            best = k;
        }
    }
    let mut a = pt(best.saturating_sub(1));
    let mut b = pt((best + 1).min(grid));
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if diff(c, d) < 0.0 {
            b = d;
        } else {
            a = c;
        }
        c = b - r * (b - a);
        d = a + r * (b - a);
    }
    let mid = 0.5 * (a + b);
    // the endpoints of [lo, hi] may be optimal for constrained problems
    [lo, hi, mid]
        .into_iter()
        .fold(mid, |m, u| if diff(u, m) < 0.0 { u } else { m })
}

/// Block objective `s(u) + c·reg(u)` with `s` smooth quadratic, minimized by
/// accelerated proximal gradient for a fixed, large number of steps.
pub struct QuadraticBlock {
    /// Hessian of the smooth part.
    pub h: DMatrix<f64>,
    /// Gradient of the smooth part at the anchor.
    pub g: DVector<f64>,
    pub anchor: DVector<f64>,
    pub c: f64,
    pub group: bool,
}

impl QuadraticBlock {
    fn smooth_grad(&self, u: &DVector<f64>) -> DVector<f64> {
        &self.g + &self.h * (u - &self.anchor)
    }

    fn prox(&self, v: &DVector<f64>, step: f64) -> DVector<f64> {
        let t = self.c * step;
        if self.group {
            let n = v.norm();
            if n <= t {
                DVector::zeros(v.len())
            } else {
                v * (1.0 - t / n)
            }
        } else {
            v.map(|x| x.signum() * (x.abs() - t).max(0.0))
        }
    }

    pub fn long_run_minimizer(&self, iters: usize) -> DVector<f64> {
        let eig = self.h.clone().symmetric_eigen();
        let lip = eig.eigenvalues.max().max(1e-300);
        let step = 1.0 / lip;
        let mut x = self.anchor.clone();
        let mut y = x.clone();
        let mut t: f64 = 1.0;
        for _ in 0..iters {
            let next = self.prox(&(&y - self.smooth_grad(&y) * step), step);
            let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
            y = &next + (&next - &x) * ((t - 1.0) / t_next);
            if (&next - &x).norm() == 0.0 {
                x = next;
                break;
            }
            x = next;
            t = t_next;
        }
        // finish with plain steps, which settle to machine precision
        for _ in 0..iters {
            let next = self.prox(&(&x - self.smooth_grad(&x) * step), step);
            let moved = (&next - &x).norm();
            x = next;
            if moved == 0.0 {
                break;
            }
        }
        x
    }
}

/// Least squares minimizer from the normal equations.
pub fn normal_equations(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let ata = a.tr_mul(a);
    let atb = a.tr_mul(b);
    ata.cholesky().expect("full column rank").solve(&atb)
}

/// Central-difference gradient with step `h`.
pub fn finite_difference(f: impl Fn(&DVector<f64>) -> f64, x: &DVector<f64>, h: f64) -> DVector<f64> {
    DVector::from_fn(x.len(), |j, _| {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[j] += h;
        xm[j] -= h;
        (f(&xp) - f(&xm)) / (2.0 * h)
    })
}

/// Lasso KKT violation from first principles.
pub fn lasso_kkt(a: &DMatrix<f64>, b: &DVector<f64>, c: f64, x: &DVector<f64>, zero_tol: f64) -> f64 {
    let g = a.transpose() * (a * x - b) * 2.0;
    let mut worst: f64 = 0.0;
    for j in 0..x.len() {
        let v = if x[j].abs() <= zero_tol {
            (g[j].abs() - c).max(0.0)
        } else {
            (g[j] + c * x[j].signum()).abs()
        };
        worst = worst.max(v);
    }
    worst
}
