//! Primal-dual path-following interior point method for dense SDPs with
//! free variables, PSD blocks, and native affine equalities.

use super::{SdpError, SdpOptions, SdpProblem, SdpSolution, SdpStatus};
use nalgebra::{Cholesky, DMatrix, DVector};

/// Solve a linear SDP. Numerical breakdown is reported as `MaxIter`,
/// never silently; divergence of an objective is reported as
/// `Infeasible` (dual) or `Unbounded` (primal).
pub fn solve(problem: &SdpProblem, opts: &SdpOptions) -> Result<SdpSolution, SdpError> {
    problem.validate()?;
    let dim = problem.total_dim();
    if dim > opts.dim_cap {
        return Err(SdpError::DimensionCap {
            dim,
            cap: opts.dim_cap,
        });
    }
    if problem.var_count == 0 {
        return Ok(solve_constant(problem, opts));
    }
    Ok(PathFollower::new(problem, opts).run())
}

/// Solve at the tight `SdpOptions::deep` tolerances, falling back to the
/// default tolerances when the tight run stalls in `MaxIter` (degenerate
/// moment problems can plateau just short of the deep gap target).
pub fn solve_refined(problem: &SdpProblem) -> Result<SdpSolution, SdpError> {
    let sol = solve(problem, &SdpOptions::deep())?;
    if sol.status == SdpStatus::MaxIter {
        return solve(problem, &SdpOptions::default());
    }
    Ok(sol)
}

/// Degenerate case with no variables: report feasibility of the constants.
fn solve_constant(problem: &SdpProblem, opts: &SdpOptions) -> SdpSolution {
    let mats: Vec<DMatrix<f64>> = problem.blocks.iter().map(|b| b.constant.clone()).collect();
    let min_eig = mats
        .iter()
        .filter(|m| m.nrows() > 0)
        .map(|m| {
            m.clone()
                .symmetric_eigen()
                .eigenvalues
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min)
        })
        .fold(f64::INFINITY, f64::min);
    let eq_viol = problem
        .equalities
        .iter()
        .map(|e| e.constant.abs())
        .fold(0.0f64, f64::max);
    let feasible = min_eig >= -opts.feas_tol && eq_viol <= opts.feas_tol;
    SdpSolution {
        status: if feasible {
            SdpStatus::Optimal
        } else {
            SdpStatus::Infeasible
        },
        values: Vec::new(),
        block_matrices: mats,
        objective_value: problem.objective_constant,
        duality_gap: 0.0,
        primal_infeasibility: (-min_eig).max(eq_viol).max(0.0),
        dual_infeasibility: 0.0,
        iterations: 0,
    }
}

struct PathFollower<'a> {
    problem: &'a SdpProblem,
    opts: &'a SdpOptions,
    m: usize,
    e: usize,
    total_dim: usize,
    eq_mat: DMatrix<f64>,
    eq_rhs: DVector<f64>,
    x: DVector<f64>,
    nu: DVector<f64>,
    s: Vec<DMatrix<f64>>,
    z: Vec<DMatrix<f64>>,
}

struct Direction {
    dx: DVector<f64>,
    dnu: DVector<f64>,
    ds: Vec<DMatrix<f64>>,
    dz: Vec<DMatrix<f64>>,
}

impl<'a> PathFollower<'a> {
    fn new(problem: &'a SdpProblem, opts: &'a SdpOptions) -> Self {
        let m = problem.var_count;
        let e = problem.equalities.len();
        let mut eq_mat = DMatrix::zeros(e, m);
        let mut eq_rhs = DVector::zeros(e);
        for (r, eq) in problem.equalities.iter().enumerate() {
            for (c, &a) in eq.coeffs.iter().enumerate() {
                eq_mat[(r, c)] = a;
            }
            eq_rhs[r] = -eq.constant;
        }
        let data_scale = problem
            .blocks
            .iter()
            .map(|b| b.constant.amax())
            .fold(0.0f64, f64::max);
        let obj_scale = problem.objective.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let tau = 10.0 * (1.0 + data_scale);
        let zeta = 10.0 * (1.0 + obj_scale);
        let s = problem
            .blocks
            .iter()
            .map(|b| DMatrix::identity(b.dim, b.dim) * tau)
            .collect();
        let z = problem
            .blocks
            .iter()
            .map(|b| DMatrix::identity(b.dim, b.dim) * zeta)
            .collect();
        PathFollower {
            problem,
            opts,
            m,
            e,
            total_dim: problem.total_dim(),
            eq_mat,
            eq_rhs,
            x: DVector::zeros(m),
            nu: DVector::zeros(e),
            s,
            z,
        }
    }

    fn run(mut self) -> SdpSolution {
        let mut iterations = 0;
        let mut status = SdpStatus::MaxIter;
        for iter in 0..self.opts.max_iters {
            iterations = iter;
            let residual_p = self.primal_residual();
            let residual_d = self.dual_residual();
            let mu = self.complementarity();
            let pobj = self.primal_objective();
            let dobj = self.dual_objective();
            let gap = relative_gap(pobj, dobj);

            if residual_p <= self.opts.feas_tol
                && residual_d <= self.opts.feas_tol * (1.0 + self.objective_norm())
                && gap <= self.opts.gap_tol
            {
                status = SdpStatus::Optimal;
                break;
            }
            if dobj > self.opts.divergence {
                status = SdpStatus::Infeasible;
                break;
            }
            if pobj < -self.opts.divergence {
                status = SdpStatus::Unbounded;
                break;
            }

            let factors: Option<Vec<Cholesky<f64, nalgebra::Dyn>>> = self
                .s
                .iter()
                .map(|sb| Cholesky::new(sb.clone()))
                .collect();
            let Some(factors) = factors else { break };
            let s_inv: Vec<DMatrix<f64>> = factors.iter().map(|c| c.inverse()).collect();

            let Some(kkt) = self.kkt_matrix(&s_inv) else {
                break;
            };
            let Some(kkt_lu) = try_lu(&kkt) else { break };

            // Predictor: pure Newton step toward feasibility and zero
            // complementarity.
            let rp_blocks = self.matrix_residuals();
            let zero_targets: Vec<DMatrix<f64>> = self
                .problem
                .blocks
                .iter()
                .map(|b| DMatrix::zeros(b.dim, b.dim))
                .collect();
            let Some(aff) = self.direction(&kkt_lu, &s_inv, &rp_blocks, &zero_targets) else {
                break;
            };
            let alpha_p_aff = self.max_step(&self.s, &aff.ds);
            let alpha_d_aff = self.max_step(&self.z, &aff.dz);
            let mu_aff = self.predicted_mu(&aff, alpha_p_aff, alpha_d_aff);
            let sigma = if mu > 0.0 {
                ((mu_aff / mu).powi(3)).clamp(1e-6, 1.0)
            } else {
                0.0
            };

            // Corrector: recenter to sigma*mu and cancel the second-order
            // complementarity error of the predictor.
            let targets: Vec<DMatrix<f64>> = self
                .problem
                .blocks
                .iter()
                .enumerate()
                .map(|(bi, b)| {
                    DMatrix::identity(b.dim, b.dim) * (sigma * mu) - &aff.ds[bi] * &aff.dz[bi]
                })
                .collect();
            let Some(dir) = self.direction(&kkt_lu, &s_inv, &rp_blocks, &targets) else {
                break;
            };
            let alpha_p = 0.95 * self.max_step(&self.s, &dir.ds);
            let alpha_d = 0.95 * self.max_step(&self.z, &dir.dz);
            if alpha_p < 1e-12 && alpha_d < 1e-12 {
                break;
            }

            self.x += &dir.dx * alpha_p;
            self.nu += &dir.dnu * alpha_d;
            for bi in 0..self.s.len() {
                self.s[bi] += &dir.ds[bi] * alpha_p;
                self.z[bi] += &dir.dz[bi] * alpha_d;
            }
            if self.x.iter().any(|v| !v.is_finite()) {
                break;
            }
        }

        self.finish(status, iterations + 1)
    }

    fn finish(&self, status: SdpStatus, iterations: usize) -> SdpSolution {
        let values: Vec<f64> = self.x.iter().cloned().collect();
        let block_matrices: Vec<DMatrix<f64>> = self
            .problem
            .blocks
            .iter()
            .map(|b| b.realize(&values))
            .collect();
        let pobj = self.primal_objective();
        let dobj = self.dual_objective();
        SdpSolution {
            status,
            values,
            block_matrices,
            objective_value: pobj,
            duality_gap: relative_gap(pobj, dobj),
            primal_infeasibility: self.primal_residual(),
            dual_infeasibility: self.dual_residual(),
            iterations,
        }
    }

    fn objective_norm(&self) -> f64 {
        self.problem.objective.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }

    fn primal_objective(&self) -> f64 {
        self.problem.objective_constant
            + self
                .problem
                .objective
                .iter()
                .zip(self.x.iter())
                .map(|(c, x)| c * x)
                .sum::<f64>()
    }

    fn dual_objective(&self) -> f64 {
        let mut d = self.problem.objective_constant + self.eq_rhs.dot(&self.nu);
        for (b, zb) in self.problem.blocks.iter().zip(&self.z) {
            d -= frob(&b.constant, zb);
        }
        d
    }

    /// Residual matrices constant + Σx·A − S per block.
    fn matrix_residuals(&self) -> Vec<DMatrix<f64>> {
        let values: Vec<f64> = self.x.iter().cloned().collect();
        self.problem
            .blocks
            .iter()
            .zip(&self.s)
            .map(|(b, sb)| b.realize(&values) - sb)
            .collect()
    }

    fn primal_residual(&self) -> f64 {
        let mut worst = self
            .matrix_residuals()
            .iter()
            .filter(|r| r.nrows() > 0)
            .map(|r| r.amax())
            .fold(0.0f64, f64::max);
        if self.e > 0 {
            let r = &self.eq_rhs - &self.eq_mat * &self.x;
            worst = worst.max(r.amax());
        }
        worst
    }

    fn dual_residual(&self) -> f64 {
        self.dual_residual_vec().amax()
    }

    /// rd_i = c_i − Σ_b ⟨A_ib, Z_b⟩ − (Eᵀν)_i.
    fn dual_residual_vec(&self) -> DVector<f64> {
        let mut rd = DVector::from_column_slice(&self.problem.objective);
        for (b, zb) in self.problem.blocks.iter().zip(&self.z) {
            for i in 0..self.m {
                rd[i] -= frob(&b.coeffs[i], zb);
            }
        }
        if self.e > 0 {
            rd -= self.eq_mat.transpose() * &self.nu;
        }
        rd
    }

    fn complementarity(&self) -> f64 {
        if self.total_dim == 0 {
            return 0.0;
        }
        let trace: f64 = self.s.iter().zip(&self.z).map(|(s, z)| frob(s, z)).sum();
        trace / self.total_dim as f64
    }

    /// Schur complement over PSD blocks, bordered by the equality rows:
    /// [[M, −Eᵀ], [−E, 0]].
    fn kkt_matrix(&self, s_inv: &[DMatrix<f64>]) -> Option<DMatrix<f64>> {
        let n = self.m + self.e;
        let mut kkt = DMatrix::zeros(n, n);
        for (bi, b) in self.problem.blocks.iter().enumerate() {
            let t: Vec<DMatrix<f64>> = (0..self.m)
                .map(|j| &s_inv[bi] * &b.coeffs[j] * &self.z[bi])
                .collect();
            for i in 0..self.m {
                for j in 0..self.m {
                    kkt[(i, j)] += frob(&b.coeffs[i], &t[j]);
                }
            }
        }
        // Symmetrize the scaling product.
        for i in 0..self.m {
            for j in (i + 1)..self.m {
                let v = 0.5 * (kkt[(i, j)] + kkt[(j, i)]);
                kkt[(i, j)] = v;
                kkt[(j, i)] = v;
            }
        }
        for r in 0..self.e {
            for c in 0..self.m {
                kkt[(c, self.m + r)] = -self.eq_mat[(r, c)];
                kkt[(self.m + r, c)] = -self.eq_mat[(r, c)];
            }
        }
        if kkt.iter().any(|v| !v.is_finite()) {
            return None;
        }
        Some(kkt)
    }

    /// Newton direction for complementarity targets R_b:
    /// ΔZ = S⁻¹R − Z − S⁻¹ ΔS Z with ΔS = Σ Δx A + Rp.
    fn direction(
        &self,
        kkt_lu: &nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
        s_inv: &[DMatrix<f64>],
        rp_blocks: &[DMatrix<f64>],
        targets: &[DMatrix<f64>],
    ) -> Option<Direction> {
        let rd = self.dual_residual_vec();
        let mut rhs = DVector::zeros(self.m + self.e);
        for i in 0..self.m {
            let mut h = -rd[i];
            for (bi, b) in self.problem.blocks.iter().enumerate() {
                let k = &s_inv[bi] * (&targets[bi] - &rp_blocks[bi] * &self.z[bi]);
                h += frob(&b.coeffs[i], &k) - frob(&b.coeffs[i], &self.z[bi]);
            }
            rhs[i] = h;
        }
        if self.e > 0 {
            let rp = &self.eq_rhs - &self.eq_mat * &self.x;
            for r in 0..self.e {
                rhs[self.m + r] = -rp[r];
            }
        }
        let sol = kkt_lu.solve(&rhs)?;
        if sol.iter().any(|v| !v.is_finite()) {
            return None;
        }
        let dx = sol.rows(0, self.m).into_owned();
        let dnu = sol.rows(self.m, self.e).into_owned();
        let dx_slice: Vec<f64> = dx.iter().cloned().collect();
        let mut ds = Vec::with_capacity(self.problem.blocks.len());
        let mut dz = Vec::with_capacity(self.problem.blocks.len());
        for (bi, b) in self.problem.blocks.iter().enumerate() {
            let mut dsb = rp_blocks[bi].clone();
            for (j, &dxj) in dx_slice.iter().enumerate() {
                if dxj != 0.0 {
                    dsb += &b.coeffs[j] * dxj;
                }
            }
            let mut dzb = &s_inv[bi] * &targets[bi] - &self.z[bi] - &s_inv[bi] * &dsb * &self.z[bi];
            let sym = 0.5 * (&dzb + dzb.transpose());
            dzb = sym;
            ds.push(dsb);
            dz.push(dzb);
        }
        Some(Direction { dx, dnu, ds, dz })
    }

    /// Largest step in (0, 1] keeping every base + α·delta positive
    /// definite, found by bisection on Cholesky success.
    fn max_step(&self, base: &[DMatrix<f64>], delta: &[DMatrix<f64>]) -> f64 {
        let ok = |alpha: f64| {
            base.iter().zip(delta).all(|(b, d)| {
                b.nrows() == 0 || Cholesky::new(b + d * alpha).is_some()
            })
        };
        if ok(1.0) {
            return 1.0;
        }
        let mut lo = 0.0;
        let mut hi = 1.0;
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if ok(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    fn predicted_mu(&self, dir: &Direction, alpha_p: f64, alpha_d: f64) -> f64 {
        if self.total_dim == 0 {
            return 0.0;
        }
        let mut trace = 0.0;
        for bi in 0..self.s.len() {
            let s_new = &self.s[bi] + &dir.ds[bi] * alpha_p;
            let z_new = &self.z[bi] + &dir.dz[bi] * alpha_d;
            trace += frob(&s_new, &z_new);
        }
        trace / self.total_dim as f64
    }
}

fn relative_gap(pobj: f64, dobj: f64) -> f64 {
    (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs())
}

fn frob(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn try_lu(a: &DMatrix<f64>) -> Option<nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>> {
    let lu = a.clone().lu();
    if lu.is_invertible() {
        Some(lu)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::super::{AffineScalar, SdpBlock, SdpOptions, SdpProblem, SdpStatus};
    use super::solve;
    use nalgebra::DMatrix;

    fn sym(dim: usize, entries: &[(usize, usize, f64)]) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(dim, dim);
        for &(i, j, v) in entries {
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
        m
    }

    /// min y subject to [[1, y], [y, 1]] PSD has optimum -1.
    #[test]
    fn correlation_bound() {
        let mut p = SdpProblem::new(1);
        p.objective = vec![1.0];
        let mut b = SdpBlock::zeros(2, 1);
        b.constant = sym(2, &[(0, 0, 1.0), (1, 1, 1.0)]);
        b.coeffs[0] = sym(2, &[(0, 1, 1.0)]);
        p.blocks.push(b);
        let sol = solve(&p, &SdpOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.objective_value + 1.0).abs() < 2e-5, "{}", sol.objective_value);
        assert!(sol.min_block_eigenvalue() > -1e-7);
    }

    /// min s2 subject to [[3, 3], [3, s2]] PSD has optimum 3.
    #[test]
    fn hankel_completion_bound() {
        let mut p = SdpProblem::new(1);
        p.objective = vec![1.0];
        let mut b = SdpBlock::zeros(2, 1);
        b.constant = sym(2, &[(0, 0, 3.0), (0, 1, 3.0)]);
        b.coeffs[0] = sym(2, &[(1, 1, 1.0)]);
        p.blocks.push(b);
        let sol = solve(&p, &SdpOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.objective_value - 3.0).abs() < 2e-5, "{}", sol.objective_value);
    }

    /// Tight tolerances drive the same problem to deep accuracy.
    #[test]
    fn tight_tolerances_reach_deep_accuracy() {
        let mut p = SdpProblem::new(1);
        p.objective = vec![1.0];
        let mut b = SdpBlock::zeros(2, 1);
        b.constant = sym(2, &[(0, 0, 3.0), (0, 1, 3.0)]);
        b.coeffs[0] = sym(2, &[(1, 1, 1.0)]);
        p.blocks.push(b);
        let sol = solve(&p, &SdpOptions::deep()).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.objective_value - 3.0).abs() < 1e-8, "{}", sol.objective_value);
    }

    /// Equality constraints are honored: min x+y with x+y = 2 pinned and a
    /// harmless PSD bound.
    #[test]
    fn equality_pinning() {
        let mut p = SdpProblem::new(2);
        p.objective = vec![1.0, 1.0];
        let mut b = SdpBlock::zeros(2, 2);
        b.constant = sym(2, &[(0, 0, 10.0), (1, 1, 10.0)]);
        b.coeffs[0] = sym(2, &[(0, 0, 1.0)]);
        b.coeffs[1] = sym(2, &[(1, 1, 1.0)]);
        p.blocks.push(b);
        p.equalities.push(AffineScalar {
            coeffs: vec![1.0, 1.0],
            constant: -2.0,
        });
        let sol = solve(&p, &SdpOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.objective_value - 2.0).abs() < 2e-5);
        assert!((sol.values[0] + sol.values[1] - 2.0).abs() < 1e-7);
    }

    /// An infeasible constraint pair diverges to an Infeasible verdict:
    /// x >= 1 and -x >= 0 as 1x1 blocks.
    #[test]
    fn detects_infeasible() {
        let mut p = SdpProblem::new(1);
        p.objective = vec![0.0];
        let mut b1 = SdpBlock::zeros(1, 1);
        b1.constant = sym(1, &[(0, 0, -1.0)]);
        b1.coeffs[0] = sym(1, &[(0, 0, 1.0)]);
        p.blocks.push(b1);
        let mut b2 = SdpBlock::zeros(1, 1);
        b2.constant = sym(1, &[(0, 0, 0.0)]);
        b2.coeffs[0] = sym(1, &[(0, 0, -1.0)]);
        p.blocks.push(b2);
        let sol = solve(&p, &SdpOptions::default()).unwrap();
        assert_ne!(sol.status, SdpStatus::Optimal);
    }

    /// A linear objective unbounded below on the feasible set: min x with
    /// only x <= 0 enforced.
    #[test]
    fn detects_unbounded() {
        let mut p = SdpProblem::new(1);
        p.objective = vec![1.0];
        let mut b = SdpBlock::zeros(1, 1);
        b.coeffs[0] = sym(1, &[(0, 0, -1.0)]);
        p.blocks.push(b);
        let sol = solve(&p, &SdpOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Unbounded);
    }

    /// Dimension cap is enforced.
    #[test]
    fn dimension_cap() {
        let mut p = SdpProblem::new(1);
        p.objective = vec![1.0];
        p.blocks.push(SdpBlock::zeros(201, 1));
        assert!(solve(&p, &SdpOptions::default()).is_err());
    }
}
