//! Moment-variable bookkeeping and assembly of moment/localizing blocks,
//! including localizing matrices for polynomial matrix inequalities and the
//! plain dense moment relaxation.

use super::{AffineScalar, SdpBlock, SdpError, SdpProblem};
use crate::polyring::{to_f64, Monomial, Polynomial, Rational};
use num_traits::Zero;
use std::collections::BTreeMap;

/// Whether a constraint polynomial is a nonnegativity or an equality.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintKind {
    /// g(x) >= 0.
    Ge0,
    /// g(x) = 0.
    Eq0,
}

/// Assigns SDP variable indices to moment monomials. The constant monomial
/// carries the normalization L(1) = 1 and never gets an index.
#[derive(Debug, Clone)]
pub struct MomentIndexer {
    n_vars: usize,
    map: BTreeMap<Monomial, usize>,
    order: Vec<Monomial>,
}

impl MomentIndexer {
    /// Empty indexer over an `n_vars`-variable ring.
    pub fn new(n_vars: usize) -> Self {
        MomentIndexer {
            n_vars,
            map: BTreeMap::new(),
            order: Vec::new(),
        }
    }

    /// Ambient variable count of the indexed monomials.
    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    /// Number of registered moment variables.
    pub fn len(&self) -> usize {
        self.order.len()
    }

    /// True when no moment variable has been registered.
    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Register every monomial of degree 1..=d in graded-lex order.
    pub fn register_up_to_degree(&mut self, d: u32) {
        for deg in 1..=d {
            for m in monomials_of_degree(self.n_vars, deg) {
                self.index_of(&m);
            }
        }
    }

    /// Index of a monomial, assigning the next index on first sight;
    /// `None` for the constant monomial.
    pub fn index_of(&mut self, m: &Monomial) -> Option<usize> {
        assert_eq!(m.n_vars(), self.n_vars, "monomial arity mismatch");
        if m.degree() == 0 {
            return None;
        }
        if let Some(&i) = self.map.get(m) {
            return Some(i);
        }
        let i = self.order.len();
        self.map.insert(m.clone(), i);
        self.order.push(m.clone());
        Some(i)
    }

    /// Non-registering lookup.
    pub fn get(&self, m: &Monomial) -> Option<usize> {
        self.map.get(m).copied()
    }

    /// Monomial carried by a variable index.
    pub fn monomial(&self, idx: usize) -> &Monomial {
        &self.order[idx]
    }

    /// Registered monomials in index order.
    pub fn monomials(&self) -> &[Monomial] {
        &self.order
    }
}

/// All monomials of exact degree `d` in `n` variables, graded-lex order.
pub fn monomials_of_degree(n: usize, d: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut exps = vec![0u32; n];
    fill_compositions(&mut exps, 0, d, &mut out);
    out.sort();
    out
}

fn fill_compositions(exps: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<Monomial>) {
    if pos + 1 == exps.len() {
        exps[pos] = remaining;
        out.push(Monomial::new(exps.clone()));
        exps[pos] = 0;
        return;
    }
    for e in 0..=remaining {
        exps[pos] = e;
        fill_compositions(exps, pos + 1, remaining - e, out);
    }
    exps[pos] = 0;
}

/// Affine function of moment variables: constant + Σ coeff·y[idx].
#[derive(Debug, Clone, PartialEq)]
pub struct MomentForm {
    /// Constant contribution (from L(1) = 1).
    pub constant: Rational,
    /// Sparse (variable index, coefficient) terms, index-sorted.
    pub terms: Vec<(usize, Rational)>,
}

impl MomentForm {
    /// The zero form.
    pub fn zero() -> Self {
        MomentForm {
            constant: Rational::zero(),
            terms: Vec::new(),
        }
    }

    /// Apply the moment functional to a polynomial: L(p) as an affine
    /// form in the moment variables, registering monomials as needed.
    pub fn from_poly(p: &Polynomial, idx: &mut MomentIndexer) -> Self {
        let mut constant = Rational::zero();
        let mut by_index: BTreeMap<usize, Rational> = BTreeMap::new();
        for (m, c) in p.terms() {
            match idx.index_of(m) {
                None => constant += c.clone(),
                Some(i) => {
                    let e = by_index.entry(i).or_insert_with(Rational::zero);
                    *e += c.clone();
                }
            }
        }
        MomentForm {
            constant,
            terms: by_index
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    /// True when the form is identically zero.
    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.terms.is_empty()
    }

    /// Evaluate at a moment-variable assignment.
    pub fn eval(&self, y: &[f64]) -> f64 {
        to_f64(&self.constant)
            + self
                .terms
                .iter()
                .map(|(i, c)| to_f64(c) * y[*i])
                .sum::<f64>()
    }
}

/// Product of two monomials in the same ring.
fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    Monomial::new(
        a.exponents()
            .iter()
            .zip(b.exponents())
            .map(|(x, y)| x + y)
            .collect(),
    )
}

fn poly_of_monomial(m: &Monomial) -> Polynomial {
    Polynomial::from_terms(
        m.n_vars(),
        vec![(m.exponents().to_vec(), Rational::from_integer(1.into()))],
    )
}

/// Localizing blocks for a symmetric polynomial matrix constraint
/// G(x) ⪰ 0 at relaxation order k: entries L(u·v·G_ij) over a monomial
/// basis u, v truncated to degree k − d, where d is the half-degree of G.
/// Rows are ordered basis-major: row u*q + i for a q×q matrix G.
pub fn pmi_localizing_blocks(
    g: &[Vec<Polynomial>],
    k: usize,
    idx: &mut MomentIndexer,
) -> Result<Vec<Vec<MomentForm>>, SdpError> {
    let q = g.len();
    if q == 0 || g.iter().any(|row| row.len() != q) {
        return Err(SdpError::BadProblem("matrix constraint must be square".into()));
    }
    let n = g[0][0].n_vars();
    for row in g {
        for p in row {
            if p.n_vars() != n {
                return Err(SdpError::BadProblem("mixed ring arity in matrix constraint".into()));
            }
        }
    }
    for i in 0..q {
        for j in (i + 1)..q {
            if g[i][j] != g[j][i] {
                return Err(SdpError::BadProblem("matrix constraint must be symmetric".into()));
            }
        }
    }
    let d = g
        .iter()
        .flat_map(|row| row.iter())
        .map(|p| (p.degree() as usize).div_ceil(2))
        .max()
        .unwrap_or(0);
    if k < d {
        return Err(SdpError::OrderTooSmall { k, k0: d });
    }
    let mut basis = vec![Monomial::constant(n)];
    for deg in 1..=(k - d) as u32 {
        basis.extend(monomials_of_degree(n, deg));
    }
    let dim = basis.len() * q;
    let mut forms = vec![vec![MomentForm::zero(); dim]; dim];
    for (u_pos, u) in basis.iter().enumerate() {
        for (v_pos, v) in basis.iter().enumerate() {
            if v_pos < u_pos {
                continue;
            }
            let uv = poly_of_monomial(&mono_mul(u, v));
            for i in 0..q {
                for j in 0..q {
                    let row = u_pos * q + i;
                    let col = v_pos * q + j;
                    if col < row {
                        continue;
                    }
                    let form = MomentForm::from_poly(&(&uv * &g[i][j]), idx);
                    forms[row][col] = form.clone();
                    forms[col][row] = form;
                }
            }
        }
    }
    Ok(forms)
}

/// Moment matrix block M_k(y): localizing blocks of the constant
/// polynomial 1.
pub fn moment_matrix_block(
    n_vars: usize,
    k: usize,
    idx: &mut MomentIndexer,
) -> Result<Vec<Vec<MomentForm>>, SdpError> {
    pmi_localizing_blocks(&[vec![Polynomial::one(n_vars)]], k, idx)
}

/// Turn a symmetric matrix of affine moment forms into an SDP block.
pub fn block_from_forms(forms: &[Vec<MomentForm>], var_count: usize) -> SdpBlock {
    let dim = forms.len();
    let mut block = SdpBlock::zeros(dim, var_count);
    for (r, row) in forms.iter().enumerate() {
        for (c, form) in row.iter().enumerate() {
            if !form.constant.is_zero() {
                block.constant[(r, c)] = to_f64(&form.constant);
            }
            for (i, coeff) in &form.terms {
                block.coeffs[*i][(r, c)] = to_f64(coeff);
            }
        }
    }
    block
}

/// Equality L(p) = 0 as an affine scalar constraint over moment variables.
pub fn affine_from_form(form: &MomentForm, var_count: usize) -> AffineScalar {
    let mut coeffs = vec![0.0; var_count];
    for (i, c) in &form.terms {
        coeffs[*i] = to_f64(c);
    }
    AffineScalar {
        coeffs,
        constant: to_f64(&form.constant),
    }
}

/// Dense moment relaxation of order k for minimizing f over the set cut
/// out by the constraints; no symmetry reduction. Returns the SDP plus the
/// moment indexing used to name its variables.
pub fn lasserre_relaxation(
    f: &Polynomial,
    constraints: &[(Polynomial, ConstraintKind)],
    k: usize,
) -> Result<(SdpProblem, MomentIndexer), SdpError> {
    let n = f.n_vars();
    for (g, _) in constraints {
        if g.n_vars() != n {
            return Err(SdpError::BadProblem("mixed ring arity in constraints".into()));
        }
    }
    let k0 = constraints
        .iter()
        .map(|(g, _)| (g.degree() as usize).div_ceil(2))
        .chain(std::iter::once((f.degree() as usize).div_ceil(2)))
        .max()
        .unwrap()
        .max(1);
    if k < k0 {
        return Err(SdpError::OrderTooSmall { k, k0 });
    }
    let mut idx = MomentIndexer::new(n);
    idx.register_up_to_degree(2 * k as u32);
    let var_count = idx.len();

    let mut problem = SdpProblem::new(var_count);
    let objective_form = MomentForm::from_poly(f, &mut idx);
    problem.objective_constant = to_f64(&objective_form.constant);
    for (i, c) in &objective_form.terms {
        problem.objective[*i] = to_f64(c);
    }

    let moment = moment_matrix_block(n, k, &mut idx)?;
    problem.blocks.push(block_from_forms(&moment, var_count));
    for (g, kind) in constraints {
        match kind {
            ConstraintKind::Ge0 => {
                let forms = pmi_localizing_blocks(&[vec![g.clone()]], k, &mut idx)?;
                problem.blocks.push(block_from_forms(&forms, var_count));
            }
            ConstraintKind::Eq0 => {
                let max_deg = 2 * k as u32 - g.degree();
                let mut mults = vec![Monomial::constant(n)];
                for deg in 1..=max_deg {
                    mults.extend(monomials_of_degree(n, deg));
                }
                for m in mults {
                    let form = MomentForm::from_poly(&(&poly_of_monomial(&m) * g), &mut idx);
                    if !form.is_zero() {
                        problem.equalities.push(affine_from_form(&form, var_count));
                    }
                }
            }
        }
    }
    debug_assert_eq!(idx.len(), var_count, "all monomials registered up front");
    Ok((problem, idx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::rat;

    fn p(src: &str, n: usize) -> Polynomial {
        Polynomial::parse(src, n).unwrap()
    }

    #[test]
    fn monomial_enumeration_graded_lex() {
        let ms = monomials_of_degree(2, 2);
        let exps: Vec<Vec<u32>> = ms.iter().map(|m| m.exponents().to_vec()).collect();
        assert_eq!(exps, vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
        assert_eq!(monomials_of_degree(3, 4).len(), 15);
    }

    #[test]
    fn indexer_is_deterministic_and_skips_constant() {
        let mut idx = MomentIndexer::new(2);
        idx.register_up_to_degree(2);
        assert_eq!(idx.len(), 5);
        assert_eq!(idx.index_of(&Monomial::constant(2)), None);
        // Graded-lex: within a degree, smaller exponent vectors first.
        assert_eq!(idx.get(&Monomial::new(vec![0, 1])), Some(0));
        assert_eq!(idx.get(&Monomial::new(vec![1, 0])), Some(1));
        assert_eq!(idx.get(&Monomial::new(vec![0, 2])), Some(2));
        assert_eq!(idx.get(&Monomial::new(vec![1, 1])), Some(3));
        assert_eq!(idx.get(&Monomial::new(vec![2, 0])), Some(4));
    }

    #[test]
    fn moment_form_collects_terms() {
        let mut idx = MomentIndexer::new(2);
        let form = MomentForm::from_poly(&p("3*x1^2 - x2 + 7", 2), &mut idx);
        assert_eq!(form.constant, rat(7));
        assert_eq!(form.terms.len(), 2);
        assert_eq!(form.eval(&[0.0, 2.0]), 3.0 * 2.0 - 0.0 + 7.0);
    }

    /// A scalar (1x1) matrix constraint reduces to the ordinary localizing
    /// matrix of the polynomial.
    #[test]
    fn scalar_matrix_is_localizing_matrix() {
        let g = p("1 - x1^2", 1);
        let mut idx = MomentIndexer::new(1);
        let forms = pmi_localizing_blocks(&[vec![g]], 2, &mut idx).unwrap();
        // Basis 1, x1 at order 2 - 1 = 1: a 2x2 block.
        assert_eq!(forms.len(), 2);
        // Entry (0,0) = L(1 - x1^2) = 1 - y2.
        assert_eq!(forms[0][0].constant, rat(1));
        assert_eq!(forms[0][0].terms.len(), 1);
        // Entry (1,1) = L(x1^2 - x1^4).
        assert_eq!(forms[1][1].constant, rat(0));
        assert_eq!(forms[1][1].terms.len(), 2);
    }

    /// At the minimal order the matrix constraint contributes a single
    /// block of plain L(G_ij) entries.
    #[test]
    fn matrix_constraint_at_minimal_order() {
        let g = vec![
            vec![p("x1", 1), p("x1^2", 1)],
            vec![p("x1^2", 1), p("x1^3", 1)],
        ];
        let mut idx = MomentIndexer::new(1);
        let forms = pmi_localizing_blocks(&g, 2, &mut idx).unwrap();
        assert_eq!(forms.len(), 2);
        assert_eq!(forms[0][1], forms[1][0]);
        assert_eq!(forms[0][0].terms[0].0, idx.get(&Monomial::new(vec![1])).unwrap());
    }

    #[test]
    fn order_below_half_degree_errors() {
        let g = vec![vec![p("x1^3", 1)]];
        let mut idx = MomentIndexer::new(1);
        match pmi_localizing_blocks(&g, 1, &mut idx) {
            Err(SdpError::OrderTooSmall { k: 1, k0: 2 }) => {}
            other => panic!("unexpected: {other:?}"),
        }
    }

    /// Moment matrix for one variable at order 1 is the 2x2 Hankel
    /// [[1, y1], [y1, y2]].
    #[test]
    fn univariate_moment_matrix() {
        let mut idx = MomentIndexer::new(1);
        let forms = moment_matrix_block(1, 1, &mut idx).unwrap();
        assert_eq!(forms.len(), 2);
        assert_eq!(forms[0][0].constant, rat(1));
        assert!(forms[0][0].terms.is_empty());
        assert_eq!(forms[0][1].terms[0].0, 0);
        assert_eq!(forms[1][1].terms[0].0, 1);
    }

    /// Unconstrained minimization of x^2 + 1 by moment relaxation: the
    /// optimum is 1.
    #[test]
    fn dense_relaxation_unconstrained_quadratic() {
        let f = p("x1^2 + 1", 1);
        let (problem, _) = lasserre_relaxation(&f, &[], 1).unwrap();
        let sol = super::super::solve(&problem, &Default::default()).unwrap();
        assert_eq!(sol.status, super::super::SdpStatus::Optimal);
        assert!((sol.objective_value - 1.0).abs() < 2e-5);
    }

    /// Minimize x over the ball x^2 <= 1: lower bound -1 at order 1.
    #[test]
    fn dense_relaxation_ball_linear() {
        let f = p("x1", 1);
        let g = (p("1 - x1^2", 1), ConstraintKind::Ge0);
        let (problem, _) = lasserre_relaxation(&f, &[g], 1).unwrap();
        let sol = super::super::solve(&problem, &Default::default()).unwrap();
        assert_eq!(sol.status, super::super::SdpStatus::Optimal);
        assert!((sol.objective_value + 1.0).abs() < 2e-5, "{}", sol.objective_value);
    }

    /// Equality constraints pin moments: minimize x subject to x^2 = 1
    /// gives -1 with the feasible set {-1, 1}.
    #[test]
    fn dense_relaxation_equality() {
        let f = p("x1", 1);
        let h = (p("x1^2 - 1", 1), ConstraintKind::Eq0);
        let (problem, _) = lasserre_relaxation(&f, &[h], 2).unwrap();
        assert!(!problem.equalities.is_empty());
        let sol = super::super::solve(&problem, &Default::default()).unwrap();
        assert_eq!(sol.status, super::super::SdpStatus::Optimal);
        assert!((sol.objective_value + 1.0).abs() < 2e-5, "{}", sol.objective_value);
    }

    #[test]
    fn order_below_minimum_reports_k0() {
        let f = p("x1^4", 1);
        match lasserre_relaxation(&f, &[], 1) {
            Err(SdpError::OrderTooSmall { k: 1, k0: 2 }) => {}
            other => panic!("unexpected: {other:?}"),
        }
    }

    /// Optimal solutions meet the KKT bookkeeping: realized blocks are
    /// PSD to tolerance, equalities hold, and the gap is closed.
    #[test]
    fn optimal_solutions_satisfy_kkt() {
        let cases = vec![
            (p("x1^4 - x1^2 + 1", 1), vec![]),
            (p("x1 + x2", 2), vec![(p("1 - x1^2 - x2^2", 2), ConstraintKind::Ge0)]),
            (p("x1^2 + x2^2", 2), vec![(p("x1 + x2 - 1", 2), ConstraintKind::Eq0)]),
        ];
        for (f, cons) in cases {
            let (problem, _) = lasserre_relaxation(&f, &cons, 2).unwrap();
            let sol = super::super::solve(&problem, &Default::default()).unwrap();
            assert_eq!(sol.status, super::super::SdpStatus::Optimal);
            assert!(sol.primal_infeasibility <= 1e-7, "{}", sol.primal_infeasibility);
            assert!(sol.min_block_eigenvalue() >= -1e-7);
            assert!(sol.duality_gap <= 1e-6, "{}", sol.duality_gap);
            for eq in &problem.equalities {
                let r: f64 = eq
                    .coeffs
                    .iter()
                    .zip(&sol.values)
                    .map(|(a, x)| a * x)
                    .sum::<f64>()
                    + eq.constant;
                assert!(r.abs() <= 1e-6, "equality residual {r}");
            }
        }
    }

    /// Raising the relaxation order never lowers the bound (small slack
    /// for solver error).
    #[test]
    fn hierarchy_is_monotone_in_order() {
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let mut f = Polynomial::zero(2);
            for m in monomials_of_degree(2, 4)
                .into_iter()
                .chain(monomials_of_degree(2, 2))
                .chain(monomials_of_degree(2, 1))
            {
                let c = rng.gen_range(-2i64..=2);
                if c != 0 {
                    f = &f + &Polynomial::from_terms(2, vec![(m.exponents().to_vec(), rat(c))]);
                }
            }
            let ball = (p("1 - x1^2 - x2^2", 2), ConstraintKind::Ge0);
            let tight = super::super::SdpOptions::deep();
            let mut values = Vec::new();
            for k in [2, 3] {
                let (problem, _) = lasserre_relaxation(&f, &[ball.clone()], k).unwrap();
                let sol = super::super::solve(&problem, &tight).unwrap();
                assert_eq!(sol.status, super::super::SdpStatus::Optimal);
                values.push(sol.objective_value);
            }
            assert!(
                values[0] <= values[1] + 1e-7,
                "order 2 bound {} above order 3 bound {}",
                values[0],
                values[1]
            );
        }
    }
}
