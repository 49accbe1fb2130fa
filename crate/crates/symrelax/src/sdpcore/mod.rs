//! Dense semidefinite programming: problem model, a primal-dual interior
//! point solver for desk-scale instances, SOS feasibility with Gram
//! certificates, SDPA sparse-format I/O, and localizing-matrix assembly for
//! polynomial matrix inequalities.

mod moments;
mod sdpa;
mod solver;
mod sos;

pub use moments::{
    affine_from_form, block_from_forms, lasserre_relaxation, moment_matrix_block,
    monomials_of_degree, pmi_localizing_blocks, ConstraintKind, MomentForm, MomentIndexer,
};
pub use sdpa::{export_sdpa, parse_sdpa};
pub use solver::{solve, solve_refined};
pub use sos::{is_sos, GramCertificate, SosVerdict};

use nalgebra::DMatrix;

/// Errors from SDP construction, solving and serialization.
#[derive(Debug, thiserror::Error)]
pub enum SdpError {
    /// Total PSD dimension beyond the configured cap.
    #[error("total PSD dimension {dim} exceeds the cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },
    /// A coefficient matrix is not symmetric.
    #[error("matrix data not symmetric in block {0}")]
    NotSymmetric(usize),
    /// Structurally invalid problem data.
    #[error("invalid problem: {0}")]
    BadProblem(String),
    /// Relaxation order below the minimum required by the data.
    #[error("relaxation order {k} is below the minimum k0 = {k0}")]
    OrderTooSmall { k: usize, k0: usize },
    /// SDPA text that does not parse.
    #[error("SDPA parse error: {0}")]
    Parse(String),
}

/// One PSD constraint `constant + Σ xᵢ·coeffs[i] ⪰ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SdpBlock {
    /// Side length of the symmetric matrices.
    pub dim: usize,
    /// Constant matrix of the affine map.
    pub constant: DMatrix<f64>,
    /// One symmetric coefficient matrix per problem variable.
    pub coeffs: Vec<DMatrix<f64>>,
    /// Marked diagonal blocks export with negative size in SDPA format.
    pub diagonal: bool,
}

impl SdpBlock {
    /// A zero-initialized block for `var_count` variables.
    pub fn zeros(dim: usize, var_count: usize) -> Self {
        SdpBlock {
            dim,
            constant: DMatrix::zeros(dim, dim),
            coeffs: vec![DMatrix::zeros(dim, dim); var_count],
            diagonal: false,
        }
    }

    /// Realize the block at a variable assignment.
    pub fn realize(&self, x: &[f64]) -> DMatrix<f64> {
        let mut s = self.constant.clone();
        for (xi, a) in x.iter().zip(&self.coeffs) {
            if *xi != 0.0 {
                s += a * *xi;
            }
        }
        s
    }

    fn max_asymmetry(&self) -> f64 {
        let mut worst = matrix_asymmetry(&self.constant);
        for a in &self.coeffs {
            worst = worst.max(matrix_asymmetry(a));
        }
        worst
    }
}

fn matrix_asymmetry(a: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..a.nrows() {
        for j in (i + 1)..a.ncols() {
            worst = worst.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    worst
}

/// Affine scalar constraint `coeffs·x + constant = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineScalar {
    /// One coefficient per problem variable.
    pub coeffs: Vec<f64>,
    /// Constant offset.
    pub constant: f64,
}

/// A linear SDP over free variables x: minimize `objective·x + constant`
/// subject to every block being PSD and every equality holding.
#[derive(Debug, Clone, PartialEq)]
pub struct SdpProblem {
    /// Number of scalar decision variables.
    pub var_count: usize,
    /// Linear objective coefficients.
    pub objective: Vec<f64>,
    /// Constant objective offset.
    pub objective_constant: f64,
    /// PSD constraints.
    pub blocks: Vec<SdpBlock>,
    /// Affine equality constraints.
    pub equalities: Vec<AffineScalar>,
}

impl SdpProblem {
    /// An empty problem over `var_count` variables (objective zero).
    pub fn new(var_count: usize) -> Self {
        SdpProblem {
            var_count,
            objective: vec![0.0; var_count],
            objective_constant: 0.0,
            blocks: Vec::new(),
            equalities: Vec::new(),
        }
    }

    /// Total PSD dimension across blocks.
    pub fn total_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.dim).sum()
    }

    /// Structural validation: consistent sizes, symmetric data.
    pub fn validate(&self) -> Result<(), SdpError> {
        if self.objective.len() != self.var_count {
            return Err(SdpError::BadProblem(format!(
                "objective has {} coefficients for {} variables",
                self.objective.len(),
                self.var_count
            )));
        }
        for (bi, b) in self.blocks.iter().enumerate() {
            if b.constant.nrows() != b.dim || b.constant.ncols() != b.dim {
                return Err(SdpError::BadProblem(format!("block {bi} constant size")));
            }
            if b.coeffs.len() != self.var_count {
                return Err(SdpError::BadProblem(format!(
                    "block {bi} has {} coefficient matrices for {} variables",
                    b.coeffs.len(),
                    self.var_count
                )));
            }
            if b.coeffs.iter().any(|a| a.nrows() != b.dim || a.ncols() != b.dim) {
                return Err(SdpError::BadProblem(format!("block {bi} coefficient size")));
            }
            if b.max_asymmetry() > 1e-12 {
                return Err(SdpError::NotSymmetric(bi));
            }
        }
        for (ei, e) in self.equalities.iter().enumerate() {
            if e.coeffs.len() != self.var_count {
                return Err(SdpError::BadProblem(format!(
                    "equality {ei} has {} coefficients for {} variables",
                    e.coeffs.len(),
                    self.var_count
                )));
            }
        }
        Ok(())
    }
}

/// Termination status of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpStatus {
    /// KKT conditions met to tolerance.
    Optimal,
    /// Primal infeasibility detected (dual objective divergence).
    Infeasible,
    /// Iteration limit or numerical failure; result not certified.
    MaxIter,
    /// Primal objective divergence: problem unbounded below.
    Unbounded,
}

/// Result of a solve, including realized blocks and diagnostics.
#[derive(Debug, Clone)]
pub struct SdpSolution {
    /// Termination status.
    pub status: SdpStatus,
    /// Variable assignment.
    pub values: Vec<f64>,
    /// Realized PSD blocks at `values`.
    pub block_matrices: Vec<DMatrix<f64>>,
    /// Objective at `values` (including the constant offset).
    pub objective_value: f64,
    /// Relative duality gap |p − d| / (1 + |p| + |d|) at termination.
    pub duality_gap: f64,
    /// Worst primal residual (PSD affine consistency and equalities).
    pub primal_infeasibility: f64,
    /// Worst dual residual.
    pub dual_infeasibility: f64,
    /// Interior-point iterations used.
    pub iterations: usize,
}

impl SdpSolution {
    /// Smallest eigenvalue across realized blocks (+∞ when no blocks).
    pub fn min_block_eigenvalue(&self) -> f64 {
        self.block_matrices
            .iter()
            .filter(|b| b.nrows() > 0)
            .map(|b| {
                b.clone()
                    .symmetric_eigen()
                    .eigenvalues
                    .iter()
                    .cloned()
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Solver options; defaults match the library-wide tolerances.
#[derive(Debug, Clone)]
pub struct SdpOptions {
    /// Feasibility tolerance on primal/dual residuals.
    pub feas_tol: f64,
    /// Relative duality-gap tolerance.
    pub gap_tol: f64,
    /// Iteration cap.
    pub max_iters: usize,
    /// Cap on the total PSD dimension.
    pub dim_cap: usize,
    /// Objective magnitude treated as divergence (infeasible/unbounded).
    pub divergence: f64,
}

impl Default for SdpOptions {
    fn default() -> Self {
        SdpOptions {
            feas_tol: 1e-7,
            gap_tol: 1e-6,
            max_iters: 200,
            dim_cap: 200,
            divergence: 1e8,
        }
    }
}

impl SdpOptions {
    /// Preset for precision-critical bounds: a much tighter duality gap
    /// with the standard feasibility tolerance and a larger iteration
    /// budget.
    pub fn deep() -> Self {
        SdpOptions {
            gap_tol: 1e-10,
            max_iters: 300,
            ..Default::default()
        }
    }
}
