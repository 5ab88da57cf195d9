//! Instance construction from a KKT certificate.
//!
//! The stream of one seeded `Xoshiro256PlusPlus` (seeded through SplitMix64)
//! is consumed in this order:
//!
//! 1. `m·n` entries of `A`, column by column, each `2u − 1` with
//!    `u = (next_u64 >> 11) · 2⁻⁵³`;
//! 2. `m` standard normals (`rand_distr::StandardNormal`) for `y*`,
//!    normalized to unit length;
//! 3. one `u` per off-support column, in increasing column order;
//! 4. one `u` per support column, in increasing column order, giving the
//!    magnitude `1 − u ∈ (0, 1]`.

use nalgebra::{DMatrix, DVector};
use rand::{RngCore, SeedableRng};
use rand_distr::{Distribution, StandardNormal};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::problem::CompositeProblem;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub m: usize,
    pub n: usize,
    /// Fraction of nonzeros in `x*`.
    pub density: f64,
    pub c: f64,
    pub seed: u64,
    /// Magnitude scale of the nonzeros of `x*`.
    pub scale: f64,
}

impl GeneratorParams {
    pub fn new(m: usize, n: usize, density: f64, c: f64, seed: u64) -> Self {
        Self {
            m,
            n,
            density,
            c,
            seed,
            scale: 1.0,
        }
    }

    pub fn support_size(&self) -> usize {
        (self.density * self.n as f64).ceil() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(invalid("m and n must be positive"));
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return Err(invalid(format!("density {} must lie in (0, 1]", self.density)));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(invalid(format!("c = {} must be positive and finite", self.c)));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(invalid(format!("scale = {} must be positive and finite", self.scale)));
        }
        let k = self.support_size();
        if k == 0 || k > self.n {
            return Err(invalid(format!("density·n rounds to {k} nonzeros out of {}", self.n)));
        }
        Ok(())
    }
}

/// `min ‖Ax − b‖² + c‖x‖₁`, optionally with a known minimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct LassoInstance {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub c: f64,
    pub x_star: Option<DVector<f64>>,
    pub v_star: Option<f64>,
    pub params: Option<GeneratorParams>,
}

impl LassoInstance {
    pub fn m(&self) -> usize {
        self.a.nrows()
    }

    pub fn n(&self) -> usize {
        self.a.ncols()
    }

    pub fn problem(&self) -> Result<CompositeProblem> {
        CompositeProblem::lasso(self.a.clone(), self.b.clone(), self.c)
    }

    pub fn objective(&self, x: &DVector<f64>) -> f64 {
        let r = &self.a * x - &self.b;
        r.norm_squared() + self.c * x.iter().map(|v| v.abs()).sum::<f64>()
    }

    /// KKT residual of the stored minimizer, if there is one.
    pub fn kkt_residual(&self) -> Option<f64> {
        self.x_star.as_ref().map(|x| kkt_residual(&self.a, &self.b, self.c, x))
    }

    pub fn validate(&self) -> Result<()> {
        if self.b.len() != self.m() {
            return Err(Error::Validation(format!(
                "A is {}×{} but b has length {}",
                self.m(),
                self.n(),
                self.b.len()
            )));
        }
        if let Some(x) = &self.x_star {
            if x.len() != self.n() {
                return Err(Error::Validation(format!(
                    "x* has length {} but A has {} columns",
                    x.len(),
                    self.n()
                )));
            }
        }
        if !(self.c >= 0.0 && self.c.is_finite()) {
            return Err(Error::Validation(format!("invalid weight c = {}", self.c)));
        }
        Ok(())
    }
}

/// Largest violation of `|2a_jᵀ(Ax − b) + c·sign(x_j)| = 0` on the support and
/// `|2a_jᵀ(Ax − b)| ≤ c` off it.
pub fn kkt_residual(a: &DMatrix<f64>, b: &DVector<f64>, c: f64, x: &DVector<f64>) -> f64 {
    let g = a.tr_mul(&(a * x - b)) * 2.0;
    x.iter().zip(g.iter()).fold(0.0_f64, |w, (xj, gj)| {
        let v = if *xj == 0.0 {
            (gj.abs() - c).max(0.0)
        } else {
            (gj + c * xj.signum()).abs()
        };
        w.max(v)
    })
}

fn unit(rng: &mut Xoshiro256PlusPlus) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn generate_nesterov_lasso(p: &GeneratorParams) -> Result<LassoInstance> {
    p.validate()?;
    let (m, n) = (p.m, p.n);
    let half = p.c / 2.0;
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(p.seed);

    let entries: Vec<f64> = (0..m * n).map(|_| 2.0 * unit(&mut rng) - 1.0).collect();
    let mut a = DMatrix::from_vec(m, n, entries);

    let mut y: DVector<f64> = DVector::from_fn(m, |_, _| StandardNormal.sample(&mut rng));
    let ny = y.norm();
    if ny == 0.0 {
        return Err(Error::NumericFailure {
            message: "drew a zero direction for y*".into(),
            best: 0.0,
        });
    }
    y /= ny;
    let v = a.tr_mul(&y);

    let k = p.support_size();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| v[j].abs().total_cmp(&v[i].abs()).then(i.cmp(&j)));
    let mut on_support = vec![false; n];
    for &j in &order[..k] {
        on_support[j] = true;
    }

    for j in 0..n {
        if on_support[j] {
            if v[j] == 0.0 {
                return Err(Error::NumericFailure {
                    message: format!("support column {j} is orthogonal to y*"),
                    best: 0.0,
                });
            }
            a.column_mut(j).scale_mut(half / v[j].abs());
        }
    }
    for j in 0..n {
        if !on_support[j] {
            let bound = half * unit(&mut rng);
            if v[j].abs() > bound {
                a.column_mut(j).scale_mut(bound / v[j].abs());
            }
        }
    }

    let mut x_star = DVector::zeros(n);
    for j in 0..n {
        if on_support[j] {
            let w = 1.0 - unit(&mut rng);
            x_star[j] = p.scale * v[j].signum() * w;
        }
    }
    let b = &a * &x_star + &y;
    let v_star = y.norm_squared() + p.c * x_star.iter().map(|v| v.abs()).sum::<f64>();
    Ok(LassoInstance {
        a,
        b,
        c: p.c,
        x_star: Some(x_star),
        v_star: Some(v_star),
        params: Some(p.clone()),
    })
}
