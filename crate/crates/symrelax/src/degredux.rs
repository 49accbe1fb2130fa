//! Degree-principle reductions for symmetric problems.
//!
//! A symmetric polynomial of degree d attains its optimum over a symmetric
//! feasible set at points with few distinct coordinate values; this module
//! enumerates those coordinate patterns, restricts problems to them, and
//! certifies degree-4 nonnegativity via binary SOS certificates.

use crate::polyring::{rat, Group, Monomial, PolyError, Polynomial, Rational};
use crate::sdpcore::{
    is_sos, lasserre_relaxation, solve_refined, ConstraintKind, GramCertificate, SdpError,
    SdpStatus, SosVerdict,
};
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::fmt;

/// A pattern of repeated coordinate values: a weakly decreasing list of
/// positive multiplicities summing to n. The point (t₁.. t_r) stands for the
/// n-dimensional point with tᵢ repeated partsᵢ times, in coordinate order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RPartition {
    parts: Vec<u32>,
}

impl RPartition {
    /// Build a pattern; multiplicities must be weakly decreasing and positive.
    pub fn new(parts: Vec<u32>) -> Result<Self, String> {
        if parts.is_empty() {
            return Err("pattern needs at least one part".into());
        }
        if parts.iter().any(|&p| p == 0) {
            return Err(format!("multiplicities must be positive: {parts:?}"));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(format!("multiplicities must be weakly decreasing: {parts:?}"));
        }
        Ok(RPartition { parts })
    }

    /// The multiplicities, largest first.
    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Number of distinct values r.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    /// Never true; a pattern has at least one part.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Total number of coordinates n.
    pub fn weight(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// Expand r block values into the full n-dimensional point.
    pub fn lift_point(&self, t: &[f64]) -> Vec<f64> {
        assert_eq!(t.len(), self.parts.len(), "block value count mismatch");
        let mut out = Vec::with_capacity(self.weight() as usize);
        for (bi, &w) in self.parts.iter().enumerate() {
            for _ in 0..w {
                out.push(t[bi]);
            }
        }
        out
    }
}

impl fmt::Display for RPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// Errors from degree-principle reduction.
#[derive(Debug, thiserror::Error)]
pub enum ReduxError {
    /// Underlying polynomial failure.
    #[error(transparent)]
    Poly(#[from] PolyError),
    /// Underlying SDP failure.
    #[error(transparent)]
    Sdp(#[from] SdpError),
    /// Input must be symmetric.
    #[error("polynomial is not symmetric: {0}")]
    NotSymmetric(String),
    /// Part count out of range for the requested pattern enumeration.
    #[error("need 1 <= r <= n, got r = {r}, n = {n}")]
    BadPartCount { r: usize, n: usize },
    /// Degree-4 certification applies to symmetric polynomials of degree
    /// at most 4.
    #[error("degree-4 certification needs degree <= 4, got {0}")]
    WrongDegree(u32),
    /// Expected a symmetric homogeneous quadratic.
    #[error("not a symmetric homogeneous quadratic: {0}")]
    NotQuadratic(String),
    /// Malformed call.
    #[error("{0}")]
    Invalid(String),
}

/// One restricted problem: the original data with coordinates tied
/// together according to a repetition pattern.
#[derive(Debug, Clone)]
pub struct ReducedProblem {
    /// The repetition pattern ω.
    pub omega: RPartition,
    /// Objective in r block variables.
    pub objective: Polynomial,
    /// Constraints in r block variables with their kinds.
    pub constraints: Vec<(Polynomial, ConstraintKind)>,
}

/// Result of relaxing one restricted problem.
#[derive(Debug, Clone)]
pub struct OmegaOutcome {
    /// The pattern this outcome belongs to.
    pub omega: RPartition,
    /// Solver status.
    pub status: SdpStatus,
    /// Relaxation value: finite for solved problems, ±∞ for certified
    /// infeasible/unbounded ones, absent on solver failure.
    pub value: Option<f64>,
    /// First-order moments as a candidate block-value point.
    pub candidate: Option<Vec<f64>>,
}

/// Aggregate over the whole pattern family.
#[derive(Debug, Clone)]
pub struct ReductionReport {
    /// Number of block variables r.
    pub r: usize,
    /// Per-pattern outcomes, in enumeration order.
    pub outcomes: Vec<OmegaOutcome>,
    /// Minimum over patterns of the per-pattern values.
    pub value: Option<f64>,
    /// Pattern attaining the minimum (earliest on ties).
    pub best_omega: Option<RPartition>,
    /// Best candidate point expanded back to n coordinates.
    pub lifted_point: Option<Vec<f64>>,
    /// True when some pattern failed to solve and was skipped.
    pub partial: bool,
}

fn require_symmetric(p: &Polynomial) -> Result<(), ReduxError> {
    if p.is_invariant(Group::Sn) {
        Ok(())
    } else {
        Err(ReduxError::NotSymmetric(p.to_string()))
    }
}

/// Number of distinct coordinate values that suffice at the optimum:
/// max{2, ⌊deg f / 2⌋, deg g₁, …, deg g_m}.
pub fn degree_bound(
    f: &Polynomial,
    constraints: &[(Polynomial, ConstraintKind)],
) -> Result<usize, ReduxError> {
    require_symmetric(f)?;
    for (g, _) in constraints {
        require_symmetric(g)?;
    }
    let mut r = 2usize.max(f.degree() as usize / 2);
    for (g, _) in constraints {
        r = r.max(g.degree() as usize);
    }
    Ok(r)
}

/// All repetition patterns of n coordinates into exactly r values, in
/// deterministic (reverse-lexicographic) order.
pub fn r_partitions(n: usize, r: usize) -> Result<Vec<RPartition>, ReduxError> {
    if r == 0 || r > n {
        return Err(ReduxError::BadPartCount { r, n });
    }
    let mut out = Vec::new();
    for p in crate::symcomb::partitions(n as u32, r) {
        if p.parts().len() == r {
            out.push(RPartition::new(p.parts().to_vec()).expect("valid partition"));
        }
    }
    Ok(out)
}

/// Restrict a symmetric problem to every repetition pattern with
/// r = min(degree_bound, n) distinct values.
pub fn reduce(
    f: &Polynomial,
    constraints: &[(Polynomial, ConstraintKind)],
) -> Result<Vec<ReducedProblem>, ReduxError> {
    let n = f.n_vars();
    for (g, _) in constraints {
        if g.n_vars() != n {
            return Err(ReduxError::Poly(PolyError::VarMismatch {
                expected: n,
                got: g.n_vars(),
            }));
        }
    }
    let r = degree_bound(f, constraints)?.min(n);
    let mut out = Vec::new();
    for omega in r_partitions(n, r)? {
        let objective = f.substitute_rpartition(&omega)?;
        let reduced_constraints = constraints
            .iter()
            .map(|(g, kind)| Ok((g.substitute_rpartition(&omega)?, *kind)))
            .collect::<Result<Vec<_>, PolyError>>()?;
        out.push(ReducedProblem {
            omega,
            objective,
            constraints: reduced_constraints,
        });
    }
    Ok(out)
}

/// Relax every restricted problem at order k and aggregate the minimum;
/// failures are skipped and flagged.
pub fn solve_reduced(
    problems: &[ReducedProblem],
    k: usize,
) -> Result<ReductionReport, ReduxError> {
    if problems.is_empty() {
        return Err(ReduxError::Invalid("no reduced problems given".into()));
    }
    let results: Vec<Result<OmegaOutcome, ReduxError>> = problems
        .par_iter()
        .map(|prob| {
            let (sdp, indexer) = lasserre_relaxation(&prob.objective, &prob.constraints, k)?;
            let sol = solve_refined(&sdp)?;
            let r = prob.omega.len();
            let (value, candidate) = match sol.status {
                SdpStatus::Optimal => {
                    let point: Vec<f64> = (0..r)
                        .map(|i| {
                            let mut exps = vec![0u32; r];
                            exps[i] = 1;
                            indexer
                                .get(&Monomial::new(exps))
                                .map_or(0.0, |idx| sol.values[idx])
                        })
                        .collect();
                    (Some(sol.objective_value), Some(point))
                }
                SdpStatus::Infeasible => (Some(f64::INFINITY), None),
                SdpStatus::Unbounded => (Some(f64::NEG_INFINITY), None),
                SdpStatus::MaxIter => (None, None),
            };
            Ok(OmegaOutcome {
                omega: prob.omega.clone(),
                status: sol.status,
                value,
                candidate,
            })
        })
        .collect();
    let mut outcomes = Vec::with_capacity(results.len());
    for res in results {
        outcomes.push(res?);
    }
    let partial = outcomes.iter().any(|o| o.value.is_none());
    let mut best: Option<usize> = None;
    for (i, o) in outcomes.iter().enumerate() {
        if let Some(v) = o.value {
            if best.map_or(true, |b| v < outcomes[b].value.unwrap()) {
                best = Some(i);
            }
        }
    }
    let (value, best_omega, lifted_point) = match best {
        None => (None, None, None),
        Some(i) => {
            let o = &outcomes[i];
            (
                o.value,
                Some(o.omega.clone()),
                o.candidate.as_ref().map(|t| o.omega.lift_point(t)),
            )
        }
    };
    Ok(ReductionReport {
        r: problems[0].omega.len(),
        outcomes,
        value,
        best_omega,
        lifted_point,
        partial,
    })
}

/// Verdict of the degree-4 nonnegativity decision.
#[derive(Debug)]
pub enum Degree4Verdict {
    /// Every binary restriction is a sum of squares; certificates per
    /// pattern.
    CertifiedNonnegative(Vec<(RPartition, GramCertificate)>),
    /// A restriction is negative at the witness (given in n coordinates).
    NotNonnegative {
        omega: RPartition,
        witness: Vec<f64>,
        value: f64,
    },
    /// A restriction fails the SOS test numerically but no negative point
    /// was found.
    Undecided { omega: RPartition, shift: f64 },
}

impl Degree4Verdict {
    /// True for the certified branch.
    pub fn is_certified(&self) -> bool {
        matches!(self, Degree4Verdict::CertifiedNonnegative(_))
    }
}

/// Decide nonnegativity of a symmetric polynomial of degree at most 4 by
/// testing its two-value restrictions for sums of squares.
pub fn degree4_nonnegativity(f: &Polynomial) -> Result<Degree4Verdict, ReduxError> {
    require_symmetric(f)?;
    if f.degree() > 4 {
        return Err(ReduxError::WrongDegree(f.degree()));
    }
    let n = f.n_vars();
    let r = 2usize.min(n);
    let mut certs = Vec::new();
    for omega in r_partitions(n, r)? {
        let restricted = f.substitute_rpartition(&omega)?;
        match is_sos(&restricted)? {
            SosVerdict::Feasible(cert) => certs.push((omega, *cert)),
            SosVerdict::Infeasible { shift } => {
                // Multistart local descent hunting for a negative value.
                let starts = random_starts(r, 20, -3.0, 3.0, 0x5eed);
                let (t, val) = local_min_box(&restricted, -3.0, 3.0, &starts);
                if val < -1e-8 {
                    let witness = omega.lift_point(&t);
                    let value = f.eval(&witness);
                    return Ok(Degree4Verdict::NotNonnegative {
                        omega,
                        witness,
                        value,
                    });
                }
                return Ok(Degree4Verdict::Undecided { omega, shift });
            }
        }
    }
    Ok(Degree4Verdict::CertifiedNonnegative(certs))
}

/// A symmetric homogeneous quadratic split into its two extremal pieces:
/// f = α(Σxᵢ)² + βΣ_{i<j}(xⱼ−xᵢ)².
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticDecomposition {
    /// Coefficient on the squared coordinate sum.
    pub alpha: Rational,
    /// Coefficient on the pairwise squared differences.
    pub beta: Rational,
    /// Number of coordinates.
    pub n: usize,
}

impl QuadraticDecomposition {
    /// f is nonnegative exactly when both pieces enter nonnegatively.
    pub fn is_nonnegative(&self) -> bool {
        !self.alpha.is_negative() && !self.beta.is_negative()
    }

    /// Rebuild the quadratic from the decomposition.
    pub fn reconstruct(&self) -> Polynomial {
        let n = self.n;
        let mut sum = Polynomial::zero(n);
        for i in 1..=n {
            sum = &sum + &Polynomial::var(n, i);
        }
        let square = &sum * &sum;
        let mut diffs = Polynomial::zero(n);
        for i in 1..=n {
            for j in (i + 1)..=n {
                let d = &Polynomial::var(n, j) - &Polynomial::var(n, i);
                diffs = &diffs + &(&d * &d);
            }
        }
        &square.scale(&self.alpha) + &diffs.scale(&self.beta)
    }
}

/// Split a symmetric homogeneous quadratic a·Σxᵢ² + b·Σ_{i<j}xᵢxⱼ into
/// α(Σxᵢ)² + βΣ_{i<j}(xⱼ−xᵢ)² with exact rational coefficients.
pub fn decompose_symmetric_quadratic(
    f: &Polynomial,
) -> Result<QuadraticDecomposition, ReduxError> {
    let n = f.n_vars();
    let a = {
        let mut exps = vec![0u32; n];
        exps[0] = 2;
        f.coeff(&Monomial::new(exps))
    };
    let b = if n >= 2 {
        let mut exps = vec![0u32; n];
        exps[0] = 1;
        exps[1] = 1;
        f.coeff(&Monomial::new(exps))
    } else {
        Rational::zero()
    };
    let beta = (&a - &(&b / &rat(2))) / rat(n as i64);
    let alpha = &beta + &(&b / &rat(2));
    let decomposition = QuadraticDecomposition { alpha, beta, n };
    if &decomposition.reconstruct() != f {
        return Err(ReduxError::NotQuadratic(f.to_string()));
    }
    Ok(decomposition)
}

/// Partial derivative ∂p/∂xᵢ.
fn partial(p: &Polynomial, i: usize) -> Polynomial {
    let mut terms = Vec::new();
    for (m, c) in p.terms() {
        let e = m.exponents()[i];
        if e > 0 {
            let mut exps = m.exponents().to_vec();
            exps[i] = e - 1;
            terms.push((exps, c * &rat(e as i64)));
        }
    }
    Polynomial::from_terms(p.n_vars(), terms)
}

/// Uniform random start points in [lo, hi]^n with a fixed seed.
pub fn random_starts(n: usize, count: usize, lo: f64, hi: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..n).map(|_| rng.gen_range(lo..hi)).collect())
        .collect()
}

fn descend(
    f: &Polynomial,
    grad: &[Polynomial],
    mut x: Vec<f64>,
    project: &dyn Fn(&mut [f64]),
    iters: usize,
) -> (Vec<f64>, f64) {
    project(&mut x);
    let mut fx = f.eval(&x);
    for _ in 0..iters {
        let g: Vec<f64> = grad.iter().map(|p| p.eval(&x)).collect();
        let gnorm2: f64 = g.iter().map(|v| v * v).sum();
        if gnorm2 < 1e-24 {
            break;
        }
        let mut step = 1.0 / (1.0 + gnorm2.sqrt());
        let mut improved = false;
        for _ in 0..50 {
            let mut cand: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - step * gi).collect();
            project(&mut cand);
            // Sufficient decrease relative to the projected displacement,
            // so progress along the feasible boundary still counts.
            let moved: f64 = x
                .iter()
                .zip(&cand)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            if moved < 1e-30 {
                step *= 0.5;
                continue;
            }
            let fc = f.eval(&cand);
            if fc < fx - 1e-4 * moved / step {
                x = cand;
                fx = fc;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (x, fx)
}

/// Best point found by projected gradient descent over the box [lo, hi]^n
/// from the given starts.
pub fn local_min_box(
    f: &Polynomial,
    lo: f64,
    hi: f64,
    starts: &[Vec<f64>],
) -> (Vec<f64>, f64) {
    let grad: Vec<Polynomial> = (0..f.n_vars()).map(|i| partial(f, i)).collect();
    let project = move |x: &mut [f64]| {
        for xi in x.iter_mut() {
            *xi = xi.clamp(lo, hi);
        }
    };
    best_descent(f, &grad, starts, &project)
}

/// Best point found by projected gradient descent over the closed ball of
/// the given radius from the given starts.
pub fn local_min_ball(f: &Polynomial, radius: f64, starts: &[Vec<f64>]) -> (Vec<f64>, f64) {
    let grad: Vec<Polynomial> = (0..f.n_vars()).map(|i| partial(f, i)).collect();
    let project = move |x: &mut [f64]| {
        let norm: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > radius {
            for xi in x.iter_mut() {
                *xi *= radius / norm;
            }
        }
    };
    best_descent(f, &grad, starts, &project)
}

fn best_descent(
    f: &Polynomial,
    grad: &[Polynomial],
    starts: &[Vec<f64>],
    project: &dyn Fn(&mut [f64]),
) -> (Vec<f64>, f64) {
    let mut best_point = vec![0.0; f.n_vars()];
    let mut best_val = f64::INFINITY;
    for start in starts {
        let (x, v) = descend(f, grad, start.clone(), project, 400);
        if v < best_val {
            best_val = v;
            best_point = x;
        }
    }
    if starts.is_empty() {
        best_val = f.eval(&best_point);
    }
    (best_point, best_val)
}

/// Minimum of a symmetric polynomial over the full lattice grid, scanned
/// through weakly increasing tuples only (valid by symmetry); points
/// failing the feasibility predicate are skipped.
pub fn grid_min_symmetric(
    f: &Polynomial,
    lattice: &[f64],
    feasible: &dyn Fn(&[f64]) -> bool,
) -> (Vec<f64>, f64) {
    struct Scan<'a> {
        f: &'a Polynomial,
        lattice: &'a [f64],
        feasible: &'a dyn Fn(&[f64]) -> bool,
        point: Vec<f64>,
        best_point: Vec<f64>,
        best_val: f64,
    }
    impl Scan<'_> {
        fn rec(&mut self, pos: usize, start: usize) {
            if pos == self.point.len() {
                if (self.feasible)(&self.point) {
                    let v = self.f.eval(&self.point);
                    if v < self.best_val {
                        self.best_val = v;
                        self.best_point.copy_from_slice(&self.point);
                    }
                }
                return;
            }
            for idx in start..self.lattice.len() {
                self.point[pos] = self.lattice[idx];
                self.rec(pos + 1, idx);
            }
        }
    }
    let n = f.n_vars();
    let mut scan = Scan {
        f,
        lattice,
        feasible,
        point: vec![0.0; n],
        best_point: vec![0.0; n],
        best_val: f64::INFINITY,
    };
    scan.rec(0, 0);
    (scan.best_point, scan.best_val)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::power_sum;

    fn p(src: &str, n: usize) -> Polynomial {
        Polynomial::parse(src, n).unwrap()
    }

    fn choi_lam() -> Polynomial {
        let m22 = p(
            "x1^2*x2^2 + x1^2*x3^2 + x1^2*x4^2 + x2^2*x3^2 + x2^2*x4^2 + x3^2*x4^2",
            4,
        );
        let m211 = p(
            "x1^2*x2*x3 + x1^2*x2*x4 + x1^2*x3*x4 + x2^2*x1*x3 + x2^2*x1*x4 + x2^2*x3*x4 \
             + x3^2*x1*x2 + x3^2*x1*x4 + x3^2*x2*x4 + x4^2*x1*x2 + x4^2*x1*x3 + x4^2*x2*x3",
            4,
        );
        let m1111 = p("x1*x2*x3*x4", 4);
        &(&m22.scale(&rat(2)) + &m211.scale(&rat(2))) + &m1111.scale(&rat(-4))
    }

    #[test]
    fn degree_bound_examples() {
        let quartic = p("x1^4 + x2^4 + x3^4", 3);
        assert_eq!(degree_bound(&quartic, &[]).unwrap(), 2);
        let septic = power_sum(3, 7);
        let cubic = (power_sum(3, 3), ConstraintKind::Ge0);
        assert_eq!(degree_bound(&septic, &[cubic]).unwrap(), 3);
        let quadratic = power_sum(3, 2);
        assert_eq!(degree_bound(&quadratic, &[]).unwrap(), 2);
        assert!(matches!(
            degree_bound(&p("x1", 2), &[]),
            Err(ReduxError::NotSymmetric(_))
        ));
    }

    #[test]
    fn pattern_enumeration() {
        let to_parts = |v: Vec<RPartition>| -> Vec<Vec<u32>> {
            v.into_iter().map(|o| o.parts().to_vec()).collect()
        };
        assert_eq!(
            to_parts(r_partitions(4, 2).unwrap()),
            vec![vec![3, 1], vec![2, 2]]
        );
        assert_eq!(to_parts(r_partitions(5, 1).unwrap()), vec![vec![5]]);
        assert_eq!(
            to_parts(r_partitions(5, 2).unwrap()),
            vec![vec![4, 1], vec![3, 2]]
        );
        assert!(r_partitions(2, 3).is_err());
    }

    #[test]
    fn pattern_count_bound() {
        for n in 1..=20usize {
            for r in 1..=4usize.min(n) {
                let count = r_partitions(n, r).unwrap().len() as u64;
                let bound = ((n + r) as u64).pow(r as u32);
                assert!(count <= bound, "n={n} r={r}: {count} > {bound}");
            }
        }
    }

    #[test]
    fn reduce_choi_lam_gives_binary_quartics() {
        let problems = reduce(&choi_lam(), &[]).unwrap();
        assert_eq!(problems.len(), 2);
        assert_eq!(problems[0].omega.parts(), &[3, 1]);
        assert_eq!(problems[1].omega.parts(), &[2, 2]);
        assert_eq!(
            problems[0].objective,
            p("12*x1^4 + 8*x1^3*x2 + 12*x1^2*x2^2", 2)
        );
        assert_eq!(
            problems[1].objective,
            p("2*x1^4 + 8*x1^3*x2 + 12*x1^2*x2^2 + 8*x1*x2^3 + 2*x2^4", 2)
        );
    }

    #[test]
    fn reduce_identity_case() {
        let f = power_sum(2, 2);
        let problems = reduce(&f, &[]).unwrap();
        assert_eq!(problems.len(), 1);
        assert_eq!(problems[0].omega.parts(), &[1, 1]);
        assert_eq!(problems[0].objective, f);
    }

    #[test]
    fn reduce_preserves_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let raw = Polynomial::from_terms(
                4,
                (0..6)
                    .map(|_| {
                        let exps: Vec<u32> =
                            (0..4).map(|_| rng.gen_range(0..=2u32)).collect();
                        (exps, rat(rng.gen_range(-3i64..=3)))
                    })
                    .collect(),
            );
            let f = raw.reynolds(Group::Sn);
            for prob in reduce(&f, &[]).unwrap() {
                let t: Vec<f64> = (0..prob.omega.len())
                    .map(|_| rng.gen_range(-1.5..1.5))
                    .collect();
                let direct = prob.objective.eval(&t);
                let lifted = f.eval(&prob.omega.lift_point(&t));
                assert!(
                    (direct - lifted).abs() <= 1e-12 * (1.0 + lifted.abs()),
                    "{direct} vs {lifted}"
                );
            }
        }
    }

    #[test]
    fn solve_reduced_linear_slice() {
        let f = power_sum(3, 2);
        let cons = vec![(
            &power_sum(3, 1) - &Polynomial::constant(3, rat(3)),
            ConstraintKind::Eq0,
        )];
        let problems = reduce(&f, &cons).unwrap();
        let report = solve_reduced(&problems, 2).unwrap();
        assert!(!report.partial);
        let value = report.value.unwrap();
        assert!((value - 3.0).abs() < 1e-6, "{value}");
        let point = report.lifted_point.unwrap();
        assert_eq!(point.len(), 3);
        for c in &point {
            assert!((c - 1.0).abs() < 1e-4, "{point:?}");
        }
    }

    #[test]
    fn solve_reduced_separable_quartic() {
        let f = &power_sum(3, 4) - &power_sum(3, 2).scale(&rat(2));
        let problems = reduce(&f, &[]).unwrap();
        let report = solve_reduced(&problems, 2).unwrap();
        assert!((report.value.unwrap() + 3.0).abs() < 1e-6, "{:?}", report.value);
    }

    #[test]
    fn solve_reduced_choi_lam() {
        let problems = reduce(&choi_lam(), &[]).unwrap();
        let report = solve_reduced(&problems, 2).unwrap();
        assert!(report.value.unwrap().abs() < 1e-6, "{:?}", report.value);
    }

    /// On a zero-dimensional feasible set the hierarchy value stops
    /// moving once it reaches the optimum.
    #[test]
    fn hierarchy_stabilizes_on_zero_dimensional_slice() {
        let f = power_sum(3, 3);
        let cons = vec![
            (
                &power_sum(3, 1) - &Polynomial::constant(3, rat(3)),
                ConstraintKind::Eq0,
            ),
            (
                &power_sum(3, 2) - &Polynomial::constant(3, rat(3)),
                ConstraintKind::Eq0,
            ),
        ];
        let problems = reduce(&f, &cons).unwrap();
        let v2 = solve_reduced(&problems, 2).unwrap().value.unwrap();
        let v3 = solve_reduced(&problems, 3).unwrap().value.unwrap();
        assert!((v2 - 3.0).abs() < 1e-5, "{v2}");
        assert!((v2 - v3).abs() < 1e-5, "{v2} vs {v3}");
    }

    #[test]
    fn degree4_certifies_choi_lam() {
        let verdict = degree4_nonnegativity(&choi_lam()).unwrap();
        match verdict {
            Degree4Verdict::CertifiedNonnegative(certs) => {
                assert_eq!(certs.len(), 2);
                let problems = reduce(&choi_lam(), &[]).unwrap();
                for ((omega, cert), prob) in certs.iter().zip(&problems) {
                    assert_eq!(omega, &prob.omega);
                    assert!(cert.residual(&prob.objective) < 1e-6);
                }
            }
            other => panic!("expected certification, got {other:?}"),
        }
    }

    #[test]
    fn degree4_certifies_square() {
        let f = &power_sum(3, 2) * &power_sum(3, 2);
        assert!(degree4_nonnegativity(&f).unwrap().is_certified());
    }

    #[test]
    fn degree4_finds_negative_witness() {
        let s = power_sum(3, 1);
        let f = -&(&(&s * &s) * &(&s * &s));
        match degree4_nonnegativity(&f).unwrap() {
            Degree4Verdict::NotNonnegative { witness, value, .. } => {
                assert_eq!(witness.len(), 3);
                assert!(value < -1e-6, "{value}");
                assert!(f.eval(&witness) < -1e-6);
            }
            other => panic!("expected a negative witness, got {other:?}"),
        }
    }

    #[test]
    fn degree4_rejects_wrong_degree() {
        let f = power_sum(3, 6);
        assert!(matches!(
            degree4_nonnegativity(&f),
            Err(ReduxError::WrongDegree(6))
        ));
    }

    #[test]
    fn quadratic_decomposition_examples() {
        // (Σx)²: a = 1, b = 2.
        let s = power_sum(3, 1);
        let f = &s * &s;
        let d = decompose_symmetric_quadratic(&f).unwrap();
        assert_eq!(d.alpha, rat(1));
        assert_eq!(d.beta, rat(0));
        assert!(d.is_nonnegative());

        // n=3, a=2, b=−2 → pure difference part.
        let f = &power_sum(3, 2).scale(&rat(2))
            + &p("x1*x2 + x1*x3 + x2*x3", 3).scale(&rat(-2));
        let d = decompose_symmetric_quadratic(&f).unwrap();
        assert_eq!(d.alpha, rat(0));
        assert_eq!(d.beta, rat(1));

        // n=2, a=0, b=2 → indefinite.
        let f = p("2*x1*x2", 2);
        let d = decompose_symmetric_quadratic(&f).unwrap();
        assert_eq!(d.alpha, crate::polyring::ratio(1, 2));
        assert_eq!(d.beta, crate::polyring::ratio(-1, 2));
        assert!(!d.is_nonnegative());

        assert!(decompose_symmetric_quadratic(&power_sum(2, 4)).is_err());
    }

    #[test]
    fn quadratic_verdict_matches_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let n = rng.gen_range(2usize..=5);
            let a = rng.gen_range(-4i64..=4);
            let b = rng.gen_range(-4i64..=4);
            let mut f = power_sum(n, 2).scale(&rat(a));
            let mut cross = Polynomial::zero(n);
            for i in 1..=n {
                for j in (i + 1)..=n {
                    cross = &cross + &(&Polynomial::var(n, i) * &Polynomial::var(n, j));
                }
            }
            f = &f + &cross.scale(&rat(b));
            let d = decompose_symmetric_quadratic(&f).unwrap();
            assert_eq!(d.reconstruct(), f);
            let eig1 = a as f64 - b as f64 / 2.0;
            let eig2 = a as f64 + (n as f64 - 1.0) * b as f64 / 2.0;
            let psd = eig1 >= 0.0 && eig2 >= 0.0;
            assert_eq!(d.is_nonnegative(), psd, "n={n} a={a} b={b}");
        }
    }

    /// The restricted family reaches the same minimum as a dense search
    /// over the full variable box.
    #[test]
    fn quartic_box_minimum_agreement() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let lattice: Vec<f64> = (0..=40).map(|i| -2.0 + 0.1 * i as f64).collect();
        for _trial in 0..5 {
            let raw = Polynomial::from_terms(
                3,
                (0..5)
                    .map(|_| {
                        let mut exps = vec![0u32; 3];
                        let mut left = 4i32;
                        for e in exps.iter_mut() {
                            let v = rng.gen_range(0..=left.min(2)) as u32;
                            *e = v;
                            left -= v as i32;
                        }
                        (exps, rat(rng.gen_range(-2i64..=2)))
                    })
                    .collect(),
            );
            let f = raw.reynolds(Group::Sn);
            // Dense reference: symmetric grid scan polished by descent.
            let (grid_pt, grid_val) = grid_min_symmetric(&f, &lattice, &|_| true);
            let mut starts = random_starts(3, 10, -2.0, 2.0, 77);
            starts.push(grid_pt);
            let (_, dense_min) = local_min_box(&f, -2.0, 2.0, &starts);
            let dense_min = dense_min.min(grid_val);
            // Reduced side: per-pattern descent over the same box.
            let mut reduced_min = f64::INFINITY;
            for prob in reduce(&f, &[]).unwrap() {
                let r = prob.omega.len();
                let starts = random_starts(r, 16, -2.0, 2.0, 99);
                let (_, v) = local_min_box(&prob.objective, -2.0, 2.0, &starts);
                reduced_min = reduced_min.min(v);
            }
            assert!(
                (dense_min - reduced_min).abs() < 1e-3,
                "dense {dense_min} vs reduced {reduced_min}"
            );
        }
    }
}
