//! Problem data model: `V(x) = F(x) + G(x)` over a product of convex sets.

mod feasible;
mod partition;
mod regularizer;
mod smooth;

pub use feasible::FeasibleSet;
pub use partition::BlockPartition;
pub use regularizer::Regularizer;
pub use smooth::{Loss, SmoothOracle};

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{invalid, Result};
use crate::linalg::tr_mul_par;

/// Gram matrix `D_iᵀD_i` of one column slab with its eigendecomposition.
#[derive(Debug, Clone)]
pub struct BlockGram {
    pub gram: DMatrix<f64>,
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<f64>,
}

impl BlockGram {
    fn new(slab: &DMatrix<f64>) -> Self {
        let gram = slab.tr_mul(slab);
        let eig = SymmetricEigen::new(gram.clone());
        Self {
            gram,
            eigenvalues: eig.eigenvalues.map(|v| v.max(0.0)),
            eigenvectors: eig.eigenvectors,
        }
    }

    /// Eigendecomposition of an arbitrary symmetric matrix; eigenvalues are kept as computed.
    pub fn from_symmetric(matrix: DMatrix<f64>) -> Self {
        let eig = SymmetricEigen::new(matrix.clone());
        Self {
            gram: matrix,
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
        }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.min()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.max()
    }
}

#[derive(Debug, Clone)]
pub struct CompositeProblem {
    partition: BlockPartition,
    smooth: SmoothOracle,
    regularizer: Regularizer,
    feasible: Vec<FeasibleSet>,
    grams: Vec<BlockGram>,
}

impl CompositeProblem {
    pub fn new(
        partition: BlockPartition,
        smooth: SmoothOracle,
        regularizer: Regularizer,
        feasible: Vec<FeasibleSet>,
    ) -> Result<Self> {
        if smooth.dim() != partition.dim() {
            return Err(invalid(format!(
                "smooth oracle has {} variables, partition has {}",
                smooth.dim(),
                partition.dim()
            )));
        }
        if feasible.len() != partition.num_blocks() {
            return Err(invalid(format!(
                "{} feasible sets for {} blocks",
                feasible.len(),
                partition.num_blocks()
            )));
        }
        for (i, set) in feasible.iter().enumerate() {
            set.validate(Some(partition.size(i)))?;
        }
        let w = regularizer.weight();
        if !(w >= 0.0 && w.is_finite()) {
            return Err(invalid(format!("regularizer weight {w} must be finite and nonnegative")));
        }
        if matches!(regularizer, Regularizer::GroupL2 { .. })
            && feasible.iter().any(|s| !s.is_all_space())
        {
            return Err(invalid("group-L2 regularization is only supported on unconstrained blocks"));
        }
        let design = smooth.design();
        let grams = (0..partition.num_blocks())
            .map(|i| {
                let slab = design.columns(partition.offset(i), partition.size(i)).into_owned();
                BlockGram::new(&slab)
            })
            .collect();
        Ok(Self {
            partition,
            smooth,
            regularizer,
            feasible,
            grams,
        })
    }

    /// `min ‖Ax − b‖² + c‖x‖₁` with scalar blocks.
    pub fn lasso(a: DMatrix<f64>, b: DVector<f64>, c: f64) -> Result<Self> {
        let n = a.ncols();
        Self::new(
            BlockPartition::scalar(n)?,
            SmoothOracle::least_squares(a, b)?,
            Regularizer::L1 { weight: c },
            vec![FeasibleSet::AllSpace; n],
        )
    }

    /// `min ‖Ax − b‖² + c Σ‖x_i‖₂` over the given partition.
    pub fn group_lasso(a: DMatrix<f64>, b: DVector<f64>, c: f64, partition: BlockPartition) -> Result<Self> {
        let blocks = partition.num_blocks();
        Self::new(
            partition,
            SmoothOracle::least_squares(a, b)?,
            Regularizer::GroupL2 { weight: c },
            vec![FeasibleSet::AllSpace; blocks],
        )
    }

    /// Sparse logistic regression with scalar blocks.
    pub fn sparse_logistic(features: DMatrix<f64>, labels: DVector<f64>, c: f64) -> Result<Self> {
        let n = features.ncols();
        Self::new(
            BlockPartition::scalar(n)?,
            SmoothOracle::logistic(features, labels)?,
            Regularizer::L1 { weight: c },
            vec![FeasibleSet::AllSpace; n],
        )
    }

    pub fn partition(&self) -> &BlockPartition {
        &self.partition
    }

    pub fn smooth(&self) -> &SmoothOracle {
        &self.smooth
    }

    pub fn regularizer(&self) -> &Regularizer {
        &self.regularizer
    }

    pub fn feasible(&self, i: usize) -> &FeasibleSet {
        &self.feasible[i]
    }

    pub fn gram(&self, i: usize) -> &BlockGram {
        &self.grams[i]
    }

    pub fn dim(&self) -> usize {
        self.partition.dim()
    }

    pub fn num_blocks(&self) -> usize {
        self.partition.num_blocks()
    }

    fn check_dim(&self, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.dim() {
            return Err(invalid(format!(
                "point has dimension {}, problem has {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// `V(x) = F(x) + Σ g_i(x_i)`.
    pub fn eval_objective(&self, x: &DVector<f64>) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.smooth.eval(x) + self.regularizer_value(x))
    }

    pub(crate) fn objective_from_predictor(&self, x: &DVector<f64>, predictor: &DVector<f64>) -> f64 {
        self.smooth.value_at(predictor) + self.regularizer_value(x)
    }

    pub fn regularizer_value(&self, x: &DVector<f64>) -> f64 {
        self.regularizer.value(&self.partition, x.as_slice())
    }

    /// `∇_{x_i} F(x)`.
    pub fn eval_block_gradient(&self, x: &DVector<f64>, i: usize) -> Result<DVector<f64>> {
        self.check_dim(x)?;
        self.partition.check_index(i)?;
        let lg = self.smooth.loss_gradient(&self.smooth.predictor(x));
        let slab = self.smooth.design().columns(self.partition.offset(i), self.partition.size(i));
        Ok(slab.tr_mul(&lg))
    }

    pub fn gradient(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_dim(x)?;
        Ok(self.smooth.gradient(x))
    }

    pub fn estimate_lipschitz_gradient(&self) -> Result<f64> {
        self.smooth.estimate_lipschitz()
    }

    pub fn project_block(&self, i: usize, v: &[f64]) -> Result<DVector<f64>> {
        self.partition.check_index(i)?;
        self.feasible[i].project(v)
    }

    pub fn is_feasible(&self, x: &DVector<f64>, tol: f64) -> bool {
        x.len() == self.dim()
            && (0..self.num_blocks())
                .all(|i| self.feasible[i].contains(self.partition.block(x.as_slice(), i), tol))
    }

    /// `tr(DᵀD) / 2n`, the proximal weight initialization used for Lasso.
    pub fn trace_tau(&self) -> f64 {
        self.smooth.design().norm_squared() / (2.0 * self.dim() as f64)
    }

    /// Projection of the origin onto `X`, the default starting point.
    pub fn default_start(&self) -> DVector<f64> {
        let mut x = DVector::zeros(self.dim());
        for i in 0..self.num_blocks() {
            let r = self.partition.range(i);
            let p = self.feasible[i].project_unchecked(&x.as_slice()[r.clone()]);
            x.rows_mut(r.start, r.len()).copy_from(&p);
        }
        x
    }
}

/// A point together with the quantities every block subproblem needs:
/// the predictor `Dx`, the loss derivative at it, and the full gradient.
#[derive(Debug, Clone)]
pub struct Anchor {
    pub x: DVector<f64>,
    pub predictor: DVector<f64>,
    pub loss_gradient: DVector<f64>,
    pub gradient: DVector<f64>,
}

impl Anchor {
    pub fn new(problem: &CompositeProblem, x: DVector<f64>) -> Result<Self> {
        problem.check_dim(&x)?;
        let predictor = problem.smooth.predictor(&x);
        Ok(Self::with_predictor(problem, x, predictor))
    }

    /// Builds an anchor from a cached predictor, skipping the `Dx` product.
    pub fn with_predictor(problem: &CompositeProblem, x: DVector<f64>, predictor: DVector<f64>) -> Self {
        let loss_gradient = problem.smooth.loss_gradient(&predictor);
        let gradient = tr_mul_par(problem.smooth.design(), &loss_gradient);
        Self {
            x,
            predictor,
            loss_gradient,
            gradient,
        }
    }

    /// Recomputes the loss derivative and gradient after `x`/`predictor` changed.
    pub(crate) fn refresh(&mut self, problem: &CompositeProblem) {
        self.loss_gradient = problem.smooth.loss_gradient(&self.predictor);
        self.gradient = tr_mul_par(problem.smooth.design(), &self.loss_gradient);
    }

    pub fn block_x<'a>(&'a self, problem: &CompositeProblem, i: usize) -> &'a [f64] {
        problem.partition.block(self.x.as_slice(), i)
    }

    pub fn block_gradient<'a>(&'a self, problem: &CompositeProblem, i: usize) -> &'a [f64] {
        problem.partition.block(self.gradient.as_slice(), i)
    }

    pub fn objective(&self, problem: &CompositeProblem) -> f64 {
        problem.objective_from_predictor(&self.x, &self.predictor)
    }
}
