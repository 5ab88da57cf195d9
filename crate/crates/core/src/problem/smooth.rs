//! Smooth part `F` of the composite objective.
//!
//! Every supported `F` is a separable loss applied to the linear predictor
//! `z = Dx`, so value, gradient and block Hessians all come from the
//! elementwise loss derivatives and one product with the design matrix `D`.

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Result};
use crate::linalg::{spectral_norm_sq, tr_mul_par};

#[derive(Debug, Clone, PartialEq)]
pub enum Loss {
    /// `F(x) = ‖Ax − b‖²`
    LeastSquares { target: DVector<f64> },
    /// `F(x) = Σ_j log(1 + exp(−a_j y_jᵀx))`
    Logistic { labels: DVector<f64> },
    /// `F(x) = Σ_j ((Ax − b)_j² − 1)²`, a nonconvex test function.
    DoubleWell { target: DVector<f64> },
}

#[derive(Debug, Clone)]
pub struct SmoothOracle {
    design: DMatrix<f64>,
    loss: Loss,
}

fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

impl SmoothOracle {
    pub fn least_squares(a: DMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        if a.nrows() != b.len() {
            return Err(invalid(format!(
                "A has {} rows but b has length {}",
                a.nrows(),
                b.len()
            )));
        }
        Ok(Self {
            design: a,
            loss: Loss::LeastSquares { target: b },
        })
    }

    pub fn logistic(features: DMatrix<f64>, labels: DVector<f64>) -> Result<Self> {
        if features.nrows() != labels.len() {
            return Err(invalid(format!(
                "{} samples but {} labels",
                features.nrows(),
                labels.len()
            )));
        }
        Ok(Self {
            design: features,
            loss: Loss::Logistic { labels },
        })
    }

    pub fn double_well(a: DMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        if a.nrows() != b.len() {
            return Err(invalid("A and b disagree on the number of rows"));
        }
        Ok(Self {
            design: a,
            loss: Loss::DoubleWell { target: b },
        })
    }

    pub fn design(&self) -> &DMatrix<f64> {
        &self.design
    }

    pub fn loss(&self) -> &Loss {
        &self.loss
    }

    pub fn rows(&self) -> usize {
        self.design.nrows()
    }

    pub fn dim(&self) -> usize {
        self.design.ncols()
    }

    /// Whether `F` is convex, hence whether block-exact surrogates satisfy (P1).
    pub fn is_convex(&self) -> bool {
        !matches!(self.loss, Loss::DoubleWell { .. })
    }

    pub fn is_least_squares(&self) -> bool {
        matches!(self.loss, Loss::LeastSquares { .. })
    }

    /// `z = Dx`
    pub fn predictor(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.design * x
    }

    /// `F` as a function of the predictor.
    pub fn value_at(&self, z: &DVector<f64>) -> f64 {
        match &self.loss {
            Loss::LeastSquares { target } => (z - target).norm_squared(),
            Loss::Logistic { labels } => z
                .iter()
                .zip(labels.iter())
                .map(|(zj, aj)| softplus(-aj * zj))
                .sum(),
            Loss::DoubleWell { target } => z
                .iter()
                .zip(target.iter())
                .map(|(zj, bj)| {
                    let r = zj - bj;
                    (r * r - 1.0).powi(2)
                })
                .sum(),
        }
    }

    /// Elementwise first derivative of the loss at the predictor.
    pub fn loss_gradient(&self, z: &DVector<f64>) -> DVector<f64> {
        match &self.loss {
            Loss::LeastSquares { target } => (z - target) * 2.0,
            Loss::Logistic { labels } => {
                DVector::from_fn(z.len(), |j, _| -labels[j] * sigmoid(-labels[j] * z[j]))
            }
            Loss::DoubleWell { target } => DVector::from_fn(z.len(), |j, _| {
                let r = z[j] - target[j];
                4.0 * r * (r * r - 1.0)
            }),
        }
    }

    /// Elementwise second derivative of the loss at the predictor.
    pub fn loss_curvature(&self, z: &DVector<f64>) -> DVector<f64> {
        match &self.loss {
            Loss::LeastSquares { .. } => DVector::from_element(z.len(), 2.0),
            Loss::Logistic { labels } => DVector::from_fn(z.len(), |j, _| {
                let s = sigmoid(labels[j] * z[j]);
                labels[j] * labels[j] * s * (1.0 - s)
            }),
            Loss::DoubleWell { target } => DVector::from_fn(z.len(), |j, _| {
                let r = z[j] - target[j];
                12.0 * r * r - 4.0
            }),
        }
    }

    /// Supremum of the loss curvature, when bounded.
    pub fn curvature_bound(&self) -> Option<f64> {
        match &self.loss {
            Loss::LeastSquares { .. } => Some(2.0),
            Loss::Logistic { labels } => Some(0.25 * labels.iter().fold(0.0_f64, |m, a| m.max(a * a))),
            Loss::DoubleWell { .. } => None,
        }
    }

    pub fn eval(&self, x: &DVector<f64>) -> f64 {
        self.value_at(&self.predictor(x))
    }

    /// Full gradient `Dᵀℓ'(Dx)`.
    pub fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let lg = self.loss_gradient(&self.predictor(x));
        tr_mul_par(&self.design, &lg)
    }

    /// Upper estimate of the gradient Lipschitz constant `L_F`.
    pub fn estimate_lipschitz(&self) -> Result<f64> {
        let curvature = self.curvature_bound().ok_or_else(|| {
            invalid("no global gradient Lipschitz bound for a nonconvex double-well loss")
        })?;
        Ok(curvature * spectral_norm_sq(&self.design)?)
    }
}
