//! Power-sum orbit-space relaxations: Hankel lower/upper bounds for
//! power-sum minimization over real point multisets, exact Newton-identity
//! transport between power sums and monic coefficients, point recovery from
//! companion-matrix roots, and a moment relaxation posed directly in
//! power-sum coordinates with a Hankel matrix inequality in place of the
//! symmetrized moment matrix.

use crate::polyring::{rat, ratio, to_f64, Monomial, PolyError, Polynomial, Rational};
use crate::sdpcore::{
    affine_from_form, block_from_forms, solve_refined, ConstraintKind, MomentForm, MomentIndexer,
    SdpBlock, SdpError, SdpProblem, SdpStatus,
};
use nalgebra::{DMatrix, DVector};
use num_traits::Zero;
use thiserror::Error;

/// Errors from power-sum bound computation and relaxation assembly.
#[derive(Debug, Error)]
pub enum PmiError {
    /// Underlying polynomial-ring failure.
    #[error(transparent)]
    Poly(#[from] PolyError),
    /// Underlying SDP failure.
    #[error(transparent)]
    Sdp(#[from] SdpError),
    /// Parameters outside the regime an operation supports.
    #[error("outside the supported regime: {0}")]
    Regime(String),
    /// Structurally invalid input.
    #[error("invalid input: {0}")]
    Invalid(String),
    /// A recovered point failed its power-sum verification.
    #[error("point recovery failed: {0}")]
    Recovery(String),
    /// A numerical routine broke down.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

/// Minimize the q-th power sum over real n-point multisets whose power
/// sums s₁..s_{m−1} are pinned to γ₁..γ_{m−1} (s₀ = n implicitly).
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSumProblem {
    /// Number of points counted with multiplicity (the mass s₀).
    pub n: usize,
    /// One more than the number of pinned power sums.
    pub m: usize,
    /// Index of the power sum being minimized.
    pub q: usize,
    /// Pinned values γ₁..γ_{m−1}.
    pub gamma: Vec<f64>,
}

impl PowerSumProblem {
    /// Validate counts and the standing requirement q ≥ m.
    pub fn new(n: usize, m: usize, q: usize, gamma: Vec<f64>) -> Result<Self, PmiError> {
        if n == 0 || m == 0 {
            return Err(PmiError::Invalid("n and m must be positive".into()));
        }
        if gamma.len() != m - 1 {
            return Err(PmiError::Invalid(format!(
                "expected {} pinned power sums, got {}",
                m - 1,
                gamma.len()
            )));
        }
        if gamma.iter().any(|g| !g.is_finite()) {
            return Err(PmiError::Invalid("pinned power sums must be finite".into()));
        }
        if q < m {
            return Err(PmiError::Regime(format!(
                "the minimized index q = {q} must be at least m = {m}"
            )));
        }
        Ok(PowerSumProblem { n, m, q, gamma })
    }

    /// True in the Hankel lower-bound regime m ≤ n + 1, q ≤ 2n − 2.
    pub fn lower_regime(&self) -> bool {
        self.m <= self.n + 1 && self.q <= 2 * self.n - 2
    }

    /// True in the Newton-substitution upper-bound regime m ≤ n, q ≤ 2m − 2.
    pub fn upper_regime(&self) -> bool {
        self.m <= self.n && self.q + 2 <= 2 * self.m
    }

    /// Pinned value of s_t (γ_t, with s₀ = n); t must be below m.
    fn pinned(&self, t: usize) -> f64 {
        if t == 0 {
            self.n as f64
        } else {
            self.gamma[t - 1]
        }
    }
}

/// Symbolic d×d Hankel matrix H_d(s) with entry (i, j) = s_{i+j}; affine
/// in the moment sequence s₀..s_{2d−2}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HankelForm {
    /// Side length d.
    pub dim: usize,
}

impl HankelForm {
    /// The d×d Hankel form.
    pub fn new(dim: usize) -> Self {
        HankelForm { dim }
    }

    /// Index of the moment referenced by entry (i, j).
    pub fn entry_index(&self, i: usize, j: usize) -> usize {
        i + j
    }

    /// Realize the matrix at a moment sequence s₀..s_{2d−2}.
    pub fn realize(&self, s: &[f64]) -> DMatrix<f64> {
        assert!(
            s.len() >= 2 * self.dim - 1,
            "moment sequence too short for the Hankel dimension"
        );
        DMatrix::from_fn(self.dim, self.dim, |i, j| s[i + j])
    }
}

/// Exact Newton-identity state of a monic polynomial
/// X^m + p_{m−1}X^{m−1} + ⋯ + p₁X + p₀ whose root power sums s₁..s_{m−1}
/// are pinned: the tail coefficients are determined, the constant p₀ stays
/// free, and every s_j with m ≤ j ≤ 2m − 1 is an affine function of p₀.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonState {
    m: usize,
    gamma: Vec<Rational>,
    p_tail: Vec<Rational>,
    q_affine: Vec<(Rational, Rational)>,
}

impl NewtonState {
    /// Build the state from exact pinned power sums γ₁..γ_{m−1}.
    pub fn new(m: usize, gamma: &[Rational]) -> Result<Self, PmiError> {
        if m == 0 {
            return Err(PmiError::Invalid("degree m must be positive".into()));
        }
        if gamma.len() != m - 1 {
            return Err(PmiError::Invalid(format!(
                "expected {} pinned power sums, got {}",
                m - 1,
                gamma.len()
            )));
        }
        let p_desc = newton_p_from_s(gamma, m)?;
        let mut p_tail: Vec<Rational> = p_desc.into_iter().rev().collect();
        p_tail.shrink_to_fit();
        let s_const = |t: usize| -> Rational {
            if t == 0 {
                rat(m as i64)
            } else {
                gamma[t - 1].clone()
            }
        };
        // s_k = −Σ_{i=1}^{m} p_{m−i}·s_{k−i} for k ≥ m, with p₀ symbolic;
        // the i = m term multiplies p₀ by a pinned value, so affinity in p₀
        // propagates up to k = 2m − 1.
        let mut q_affine: Vec<(Rational, Rational)> = Vec::with_capacity(m);
        for k in m..=(2 * m - 1) {
            let mut slope = Rational::zero();
            let mut intercept = Rational::zero();
            for i in 1..=m {
                let prev = k - i;
                if i == m {
                    slope -= s_const(prev);
                } else {
                    let p = &p_tail[m - i - 1];
                    if prev < m {
                        intercept -= p * s_const(prev);
                    } else {
                        let (sl, ic) = &q_affine[prev - m];
                        slope -= p * sl;
                        intercept -= p * ic;
                    }
                }
            }
            q_affine.push((slope, intercept));
        }
        Ok(NewtonState {
            m,
            gamma: gamma.to_vec(),
            p_tail,
            q_affine,
        })
    }

    /// Build the state from floating-point pinned power sums (lifted to
    /// exact rationals, so the Newton transport stays exact).
    pub fn from_f64(m: usize, gamma: &[f64]) -> Result<Self, PmiError> {
        let lifted: Vec<Rational> = gamma
            .iter()
            .map(|&g| {
                Rational::from_float(g)
                    .ok_or_else(|| PmiError::Invalid("non-finite pinned power sum".into()))
            })
            .collect::<Result<_, _>>()?;
        NewtonState::new(m, &lifted)
    }

    /// Degree of the monic polynomial.
    pub fn degree(&self) -> usize {
        self.m
    }

    /// Pinned power sums γ₁..γ_{m−1}.
    pub fn pinned_power_sums(&self) -> &[Rational] {
        &self.gamma
    }

    /// Determined tail coefficients p₁..p_{m−1} in ascending index order.
    pub fn tail_coefficients(&self) -> &[Rational] {
        &self.p_tail
    }

    /// Full ascending coefficient vector [p₀, p₁, …, p_{m−1}] at a
    /// concrete constant term.
    pub fn monic_coefficients(&self, p0: &Rational) -> Vec<Rational> {
        let mut out = Vec::with_capacity(self.m);
        out.push(p0.clone());
        out.extend(self.p_tail.iter().cloned());
        out
    }
}

/// Affine dependence (slope, intercept) of s_j on the free constant
/// coefficient p₀, valid for m ≤ j ≤ 2m − 1; exact.
pub fn affine_q(j: usize, state: &NewtonState) -> Result<(Rational, Rational), PmiError> {
    let m = state.m;
    if j < m || j > 2 * m - 1 {
        return Err(PmiError::Regime(format!(
            "s_{j} is not an affine function of p0 (need {m} ≤ j ≤ {})",
            2 * m - 1
        )));
    }
    Ok(state.q_affine[j - m].clone())
}

/// Monic tail coefficients in descending index order [p_{m−1}, …, p₁]
/// from the root power sums s₁..s_{m−1}, via Newton's identities
/// s_k + p_{m−1}s_{k−1} + ⋯ + p_{m−k+1}s₁ = −k·p_{m−k}.
pub fn newton_p_from_s(s: &[Rational], m: usize) -> Result<Vec<Rational>, PmiError> {
    if m == 0 {
        return Err(PmiError::Invalid("degree m must be positive".into()));
    }
    if s.len() != m - 1 {
        return Err(PmiError::Invalid(format!(
            "expected {} power sums, got {}",
            m - 1,
            s.len()
        )));
    }
    let mut p_desc: Vec<Rational> = Vec::with_capacity(m - 1);
    for k in 1..m {
        let mut acc = -s[k - 1].clone();
        for i in 1..k {
            acc -= &p_desc[i - 1] * &s[k - i - 1];
        }
        p_desc.push(acc / rat(k as i64));
    }
    Ok(p_desc)
}

/// Power sums s₁..s_{2m−2} of the root multiset of the monic polynomial
/// with ascending coefficients [p₀, …, p_{m−1}]; exact.
pub fn newton_s_from_p(p: &[Rational]) -> Vec<Rational> {
    let m = p.len();
    if m == 0 {
        return Vec::new();
    }
    let upto = 2 * m - 2;
    let mut s: Vec<Rational> = Vec::with_capacity(upto);
    for k in 1..=upto {
        let mut acc = Rational::zero();
        if k <= m {
            acc -= rat(k as i64) * &p[m - k];
            for i in 1..k {
                acc -= &p[m - i] * &s[k - i - 1];
            }
        } else {
            for i in 1..=m {
                acc -= &p[m - i] * &s[k - i - 1];
            }
        }
        s.push(acc);
    }
    s
}

/// Power sums s₁..s_upto of a real multiset.
pub fn power_sums_of(points: &[f64], upto: usize) -> Vec<f64> {
    (1..=upto)
        .map(|j| points.iter().map(|x| x.powi(j as i32)).sum())
        .collect()
}

/// Ascending monic coefficients [p₀, …, p_{m−1}] of the degree-m monic
/// polynomial whose root power sums are s₁..s_m.
pub fn monic_from_power_sums(s: &[f64]) -> Vec<f64> {
    let m = s.len();
    let mut p = vec![0.0; m];
    for k in 1..=m {
        let mut acc = s[k - 1];
        for i in 1..k {
            acc += p[m - i] * s[k - i - 1];
        }
        p[m - k] = -acc / k as f64;
    }
    p
}

/// Parlett–Reinsch balancing by powers of two (similarity scaling that
/// equalizes row and column norms without rounding error).
fn balance(a: &mut DMatrix<f64>) {
    let n = a.nrows();
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let mut c: f64 = (0..n).filter(|&j| j != i).map(|j| a[(j, i)].abs()).sum();
            let mut r: f64 = (0..n).filter(|&j| j != i).map(|j| a[(i, j)].abs()).sum();
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let total = c + r;
            let mut f = 1.0;
            while c < r / 2.0 {
                c *= 2.0;
                r /= 2.0;
                f *= 2.0;
            }
            while c >= r * 2.0 {
                c /= 2.0;
                r *= 2.0;
                f /= 2.0;
            }
            if c + r < 0.95 * total {
                converged = false;
                for j in 0..n {
                    a[(i, j)] /= f;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
    }
}

/// Roots of a monic polynomial (ascending coefficients, leading 1 implied)
/// via the balanced companion matrix, sorted in descending order. Imaginary
/// parts within `imag_tol` (relative) are projected away; conjugate pairs
/// from split root clusters are projected as well, flagged for the caller
/// to verify; anything larger is an error.
pub fn companion_roots(monic: &[f64], imag_tol: f64) -> Result<(Vec<f64>, bool), PmiError> {
    let m = monic.len();
    if m == 0 {
        return Ok((Vec::new(), false));
    }
    if monic.iter().any(|c| !c.is_finite()) {
        return Err(PmiError::Invalid("non-finite polynomial coefficient".into()));
    }
    let mut c = DMatrix::from_fn(m, m, |i, j| {
        if j == m - 1 {
            -monic[i]
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    balance(&mut c);
    let eigs = c.complex_eigenvalues();
    let scale = 1.0 + eigs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut projected = false;
    let mut out: Vec<f64> = Vec::with_capacity(m);
    for z in eigs.iter() {
        if z.im.abs() > imag_tol * scale {
            // A genuinely complex root has imaginary part on the order of
            // the root spacing; a repeated real root split by rounding has
            // one of order eps^(1/mult). Project the latter and let the
            // caller's power-sum verification arbitrate.
            if z.im.abs() > 1e-3 * scale {
                return Err(PmiError::Recovery(format!(
                    "complex root {:.6} + {:.6}i",
                    z.re, z.im
                )));
            }
            projected = true;
        }
        out.push(z.re);
    }
    out.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok((out, projected))
}

/// Outcome of the Hankel lower bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBound {
    /// Bound value (+∞ when the pinned moments admit no completion).
    pub value: f64,
    /// True when no PSD Hankel completion of the pins exists.
    pub infeasible: bool,
}

/// Outcome of the Newton-substitution upper bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpperBound {
    /// Bound value (+∞ when no constant coefficient is feasible).
    pub value: f64,
    /// Minimizing constant coefficient p₀ (NaN when infeasible).
    pub p0_star: f64,
    /// True when no p₀ keeps the substituted Hankel matrix PSD.
    pub infeasible: bool,
}

/// Hankel lower bound: minimize s_q over moment sequences with s₀ = n,
/// s_j = γ_j pinned for j < m, free s_m..s_{2n−2}, and H_n(s) ⪰ 0. Every
/// real n-point multiset matching the pins yields such a sequence, so the
/// optimum bounds the power-sum problem from below.
pub fn lower_bound_l(prob: &PowerSumProblem) -> Result<LowerBound, PmiError> {
    if !prob.lower_regime() {
        return Err(PmiError::Regime(format!(
            "lower bound needs m ≤ n+1 and q ≤ 2n−2 (n={}, m={}, q={})",
            prob.n, prob.m, prob.q
        )));
    }
    let n = prob.n;
    let m = prob.m;
    // The top-left ⌊(m+1)/2⌋ corner of H_n is entirely pinned; if it is
    // not PSD no completion exists, and the SDP below would only stall.
    let c = m.div_ceil(2);
    let corner = DMatrix::from_fn(c, c, |i, j| prob.pinned(i + j));
    let corner_scale = 1.0 + corner.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    if min_eigenvalue(&corner) < -1e-9 * corner_scale {
        return Ok(LowerBound {
            value: f64::INFINITY,
            infeasible: true,
        });
    }
    let top = 2 * n - 2;
    let var_count = top + 1 - m;
    let mut block = SdpBlock::zeros(n, var_count);
    for i in 0..n {
        for j in 0..n {
            let t = i + j;
            if t < m {
                block.constant[(i, j)] = prob.pinned(t);
            } else {
                block.coeffs[t - m][(i, j)] = 1.0;
            }
        }
    }
    let mut sdp = SdpProblem::new(var_count);
    sdp.objective[prob.q - m] = 1.0;
    sdp.blocks.push(block);
    let sol = solve_refined(&sdp)?;
    match sol.status {
        SdpStatus::Optimal => Ok(LowerBound {
            value: sol.objective_value,
            infeasible: false,
        }),
        SdpStatus::Infeasible => Ok(LowerBound {
            value: f64::INFINITY,
            infeasible: true,
        }),
        SdpStatus::Unbounded => Ok(LowerBound {
            value: f64::NEG_INFINITY,
            infeasible: false,
        }),
        SdpStatus::MaxIter => Err(PmiError::Numerical(format!(
            "lower-bound solve stalled (gap {:.2e})",
            sol.duality_gap
        ))),
    }
}

/// Closed form of the lower bound for q = m = 2r: uᵀ H_r(γ)⁺ u with
/// u = (γ_r, …, γ_{2r−1}), all entries pinned. Returns +∞ when H_r is
/// singular with u outside its range, or indefinite.
pub fn closed_form_lower(prob: &PowerSumProblem) -> Result<f64, PmiError> {
    if prob.q != prob.m || prob.m % 2 != 0 {
        return Err(PmiError::Regime(format!(
            "closed form needs q = m even (m={}, q={})",
            prob.m, prob.q
        )));
    }
    let r = prob.m / 2;
    if r == 1 {
        // Scalar case: H₁ = (n) is always positive; exact division.
        let u = prob.pinned(1);
        return Ok(u * u / prob.n as f64);
    }
    let h = DMatrix::from_fn(r, r, |i, j| prob.pinned(i + j));
    let u = DVector::from_fn(r, |i, _| prob.pinned(r + i));
    let eig = h.symmetric_eigen();
    let max_abs = eig.eigenvalues.iter().fold(0.0f64, |a, &l| a.max(l.abs()));
    let tol = 1e-12 * max_abs.max(1.0);
    let mut value = 0.0;
    for (idx, &lam) in eig.eigenvalues.iter().enumerate() {
        let comp = eig.eigenvectors.column(idx).dot(&u);
        if lam.abs() <= tol {
            if comp.abs() > 1e-9 * u.norm().max(1.0) {
                return Ok(f64::INFINITY);
            }
        } else if lam < 0.0 {
            // Indefinite pins: no real multiset matches them at all.
            return Ok(f64::INFINITY);
        } else {
            value += comp * comp / lam;
        }
    }
    Ok(value)
}

/// Smallest eigenvalue of a symmetric matrix.
fn min_eigenvalue(a: &DMatrix<f64>) -> f64 {
    a.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |acc, &l| acc.min(l))
}

/// Newton-substitution upper bound: over monic degree-m polynomials whose
/// root power sums match the pins, minimize Q_q(p₀) subject to all roots
/// real — equivalently H_m(s(p₀)) ⪰ 0 by Hermite's theorem. The feasible
/// p₀ form an interval because λmin of the affine Hankel pencil is concave,
/// so a concave line search plus boundary bisection solves it.
pub fn upper_bound_u(prob: &PowerSumProblem) -> Result<UpperBound, PmiError> {
    if !prob.upper_regime() {
        return Err(PmiError::Regime(format!(
            "upper bound needs m ≤ n and q ≤ 2m−2 (n={}, m={}, q={})",
            prob.n, prob.m, prob.q
        )));
    }
    let m = prob.m;
    let state = NewtonState::from_f64(m, &prob.gamma)?;
    // H_m(p₀) = base + p₀·slope; entry (i, j) references s_{i+j} with
    // s₀ = m (the monic has m roots), pins below m, affine Q beyond.
    let mut base = DMatrix::zeros(m, m);
    let mut slope_mat = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            let t = i + j;
            if t == 0 {
                base[(i, j)] = m as f64;
            } else if t < m {
                base[(i, j)] = prob.gamma[t - 1];
            } else {
                let (sl, ic) = affine_q(t, &state)?;
                slope_mat[(i, j)] = to_f64(&sl);
                base[(i, j)] = to_f64(&ic);
            }
        }
    }
    let lam = |p0: f64| min_eigenvalue(&(&base + &slope_mat * p0));
    let (q_slope, q_icept) = affine_q(prob.q, &state)?;
    let q_slope = to_f64(&q_slope);
    let q_icept = to_f64(&q_icept);
    let objective = |p0: f64| q_slope * p0 + q_icept;

    // Concave maximization of λmin over an expanding bracket.
    let mut radius = 1.0 + prob.gamma.iter().fold(0.0f64, |a, &g| a.max(g.abs()));
    let (mut lo, mut hi) = (-radius, radius);
    loop {
        let samples = 65;
        let mut best = (lo, lam(lo));
        for i in 1..samples {
            let x = lo + (hi - lo) * i as f64 / (samples - 1) as f64;
            let v = lam(x);
            if v > best.1 {
                best = (x, v);
            }
        }
        let interior = best.0 > lo + (hi - lo) / 64.0 && best.0 < hi - (hi - lo) / 64.0;
        if interior || best.1 >= 0.0 || radius >= 1e12 {
            break;
        }
        radius *= 16.0;
        lo = -radius;
        hi = radius;
    }
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if lam(m1) < lam(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    let p_best = (lo + hi) / 2.0;
    let lam_best = lam(p_best);
    let matrix_scale = 1.0
        + base.iter().fold(0.0f64, |a, &v| a.max(v.abs()))
        + slope_mat.iter().fold(0.0f64, |a, &v| a.max(v.abs())) * p_best.abs();
    if lam_best < -1e-9 * matrix_scale {
        return Ok(UpperBound {
            value: f64::INFINITY,
            p0_star: f64::NAN,
            infeasible: true,
        });
    }
    if q_slope == 0.0 || lam_best <= 0.0 {
        // Constant objective, or a feasible set that is numerically a
        // single point: the best interior point is the answer.
        return Ok(UpperBound {
            value: objective(p_best),
            p0_star: p_best,
            infeasible: false,
        });
    }
    // Walk toward the minimizing end of the feasibility interval, then
    // bisect onto its boundary.
    let dir = if q_slope < 0.0 { 1.0 } else { -1.0 };
    let mut step = 1.0 + p_best.abs();
    let mut outside = None;
    let mut probe = p_best;
    for _ in 0..80 {
        probe += dir * step;
        step *= 2.0;
        if lam(probe) < 0.0 {
            outside = Some(probe);
            break;
        }
    }
    let Some(mut out) = outside else {
        // The objective decreases along an unbounded feasible ray.
        return Ok(UpperBound {
            value: f64::NEG_INFINITY,
            p0_star: f64::NAN,
            infeasible: false,
        });
    };
    let mut inside = p_best;
    for _ in 0..200 {
        let mid = 0.5 * (inside + out);
        if mid == inside || mid == out {
            break;
        }
        if lam(mid) >= 0.0 {
            inside = mid;
        } else {
            out = mid;
        }
    }
    Ok(UpperBound {
        value: objective(inside),
        p0_star: inside,
        infeasible: false,
    })
}

/// Recover an n-point multiset attaining the Newton-substitution bound:
/// roots of the monic polynomial with constant coefficient p₀, padded with
/// n − m zeros, verified against the pinned power sums to 1e−6.
pub fn recover_point(p0: f64, state: &NewtonState, n: usize) -> Result<Vec<f64>, PmiError> {
    let m = state.m;
    if m > n {
        return Err(PmiError::Regime(format!(
            "cannot place {m} roots among {n} coordinates"
        )));
    }
    if !p0.is_finite() {
        return Err(PmiError::Invalid("constant coefficient must be finite".into()));
    }
    let mut monic = vec![p0];
    monic.extend(state.p_tail.iter().map(to_f64));
    let (mut roots, _projected) = companion_roots(&monic, 1e-7)?;
    for (t, g) in state.gamma.iter().enumerate() {
        let want = to_f64(g);
        let got: f64 = roots.iter().map(|x| x.powi(t as i32 + 1)).sum();
        if (got - want).abs() > 1e-6 * (1.0 + want.abs()) {
            return Err(PmiError::Recovery(format!(
                "power sum s_{} of the roots is {:.8}, pinned to {:.8}",
                t + 1,
                got,
                want
            )));
        }
    }
    roots.extend(std::iter::repeat(0.0).take(n - m));
    roots.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(roots)
}

/// Weighted degree of a power-sum monomial: variable j carries weight j,
/// matching the degree of the j-th power sum in the point coordinates.
pub fn weighted_degree(m: &Monomial) -> u32 {
    m.exponents()
        .iter()
        .enumerate()
        .map(|(i, &e)| (i as u32 + 1) * e)
        .sum()
}

/// Largest weighted degree over the terms of a power-sum polynomial.
pub fn weighted_poly_degree(p: &Polynomial) -> u32 {
    p.terms().map(|(m, _)| weighted_degree(m)).max().unwrap_or(0)
}

/// All power-sum monomials in n variables of weighted degree ≤ w, ordered
/// by weighted degree and then monomial order.
pub fn weighted_monomials(n: usize, w: u32) -> Vec<Monomial> {
    fn rec(exps: &mut Vec<u32>, pos: usize, left: u32, out: &mut Vec<Monomial>) {
        if pos == exps.len() {
            out.push(Monomial::new(exps.clone()));
            return;
        }
        let weight = pos as u32 + 1;
        for e in 0..=(left / weight) {
            exps[pos] = e;
            rec(exps, pos + 1, left - e * weight, out);
        }
        exps[pos] = 0;
    }
    let mut out = Vec::new();
    rec(&mut vec![0u32; n], 0, w, &mut out);
    out.sort_by(|a, b| {
        weighted_degree(a)
            .cmp(&weighted_degree(b))
            .then_with(|| a.cmp(b))
    });
    out
}

/// The j-th power sum written in the power-sum coordinates z₁..z_n: the
/// variable z_j itself for j ≤ n, s₀ = n, and beyond n the linear
/// recurrence through the elementary symmetric polynomials (themselves
/// expanded in z by Newton's identities). Weighted-homogeneous of degree j.
pub fn power_sum_in_z(n: usize, j: usize) -> Polynomial {
    assert!(n >= 1, "need at least one variable");
    if j == 0 {
        return Polynomial::constant(n, rat(n as i64));
    }
    let mut s: Vec<Polynomial> = (1..=n.min(j)).map(|i| Polynomial::var(n, i)).collect();
    if j <= n {
        return s[j - 1].clone();
    }
    // i·e_i = Σ_{t=1}^{i} (−1)^{t−1} e_{i−t}·s_t
    let mut e: Vec<Polynomial> = vec![Polynomial::one(n)];
    for i in 1..=n {
        let mut acc = Polynomial::zero(n);
        for t in 1..=i {
            let term = &e[i - t] * &s[t - 1];
            if (t - 1) % 2 == 0 {
                acc = &acc + &term;
            } else {
                acc = &acc - &term;
            }
        }
        e.push(acc.scale(&ratio(1, i as i64)));
    }
    // s_k = Σ_{i=1}^{n} (−1)^{i−1} e_i·s_{k−i} for k > n
    for k in (n + 1)..=j {
        let mut acc = Polynomial::zero(n);
        for i in 1..=n {
            let term = &e[i] * &s[k - i - 1];
            if (i - 1) % 2 == 0 {
                acc = &acc + &term;
            } else {
                acc = &acc - &term;
            }
        }
        s.push(acc);
    }
    s[j - 1].clone()
}

/// The symbolic Hankel matrix H_n over the power-sum coordinates: entry
/// (i, j) is the power sum s_{i+j} written in z₁..z_n. A real n-point
/// multiset exists with given power sums exactly when it is PSD.
pub fn hankel_in_z(n: usize) -> Vec<Vec<Polynomial>> {
    (0..n)
        .map(|i| (0..n).map(|j| power_sum_in_z(n, i + j)).collect())
        .collect()
}

/// Re-embed a power-sum rewrite into an n-variable ring (the rewrite uses
/// variables 1..deg, of which only 1..n can actually appear).
fn embed_z(p: &Polynomial, n: usize) -> Result<Polynomial, PmiError> {
    if p.n_vars() == n {
        return Ok(p.clone());
    }
    let mut terms = Vec::new();
    for (m, c) in p.terms() {
        let exps = m.exponents();
        for (i, &e) in exps.iter().enumerate() {
            if i >= n && e > 0 {
                return Err(PmiError::Invalid(format!(
                    "power sum p_{} exceeds the {n}-variable ring",
                    i + 1
                )));
            }
        }
        let mut v = exps.to_vec();
        v.resize(n, 0);
        terms.push((v, c.clone()));
    }
    Ok(Polynomial::from_terms(n, terms))
}

fn mono_poly(m: &Monomial) -> Polynomial {
    Polynomial::from_terms(m.n_vars(), vec![(m.exponents().to_vec(), rat(1))])
}

/// Moment relaxation of a symmetric problem posed in power-sum coordinates:
/// objective and constraints are rewritten through the power sums, the
/// moment matrix ranges over weighted-degree-truncated z-monomials, scalar
/// localizers handle inequalities, equalities pin linear functionals
/// natively, and the Hankel matrix inequality H_n(z) ⪰ 0 (localized the
/// same way) replaces any symmetrized moment structure. Weighted degree in
/// z equals degree in the original coordinates, so order k matches the
/// usual relaxation order.
pub fn orbit_pmi_relaxation(
    f: &Polynomial,
    constraints: &[(Polynomial, ConstraintKind)],
    k: usize,
) -> Result<(SdpProblem, MomentIndexer), PmiError> {
    let n = f.n_vars();
    if n == 0 {
        return Err(PmiError::Invalid("need at least one variable".into()));
    }
    let ft = embed_z(&f.to_power_sums()?, n)?;
    let mut gs: Vec<(Polynomial, ConstraintKind)> = Vec::with_capacity(constraints.len());
    for (g, kind) in constraints {
        if g.n_vars() != n {
            return Err(PmiError::Invalid(
                "constraint over a different variable count than the objective".into(),
            ));
        }
        gs.push((embed_z(&g.to_power_sums()?, n)?, *kind));
    }
    let jmat = hankel_in_z(n);
    let d_j = jmat
        .iter()
        .flat_map(|row| row.iter())
        .map(|p| weighted_poly_degree(p).div_ceil(2) as usize)
        .max()
        .unwrap_or(0);
    let mut k0 = d_j.max(1);
    k0 = k0.max((weighted_poly_degree(&ft).div_ceil(2)) as usize);
    for (g, _) in &gs {
        k0 = k0.max(weighted_poly_degree(g).div_ceil(2) as usize);
    }
    if k < k0 {
        return Err(PmiError::Sdp(SdpError::OrderTooSmall { k, k0 }));
    }
    match assemble_orbit_relaxation(&ft, &gs, &jmat, n, d_j, k) {
        Some(out) => Ok(out),
        None => {
            // An objective monomial occurs in no constraint at this order
            // (a moment variable nothing would tie down); report the first
            // order at which every objective monomial is covered.
            let mut k0 = k + 1;
            while assemble_orbit_relaxation(&ft, &gs, &jmat, n, d_j, k0).is_none() {
                k0 += 1;
            }
            Err(PmiError::Sdp(SdpError::OrderTooSmall { k, k0 }))
        }
    }
}

/// Assemble the order-k relaxation; moment variables are exactly the
/// z-monomials occurring in the blocks and equality pins, so every
/// variable is tied into the constraint structure. Returns `None` when
/// the objective references a monomial outside that set.
fn assemble_orbit_relaxation(
    ft: &Polynomial,
    gs: &[(Polynomial, ConstraintKind)],
    jmat: &[Vec<Polynomial>],
    n: usize,
    d_j: usize,
    k: usize,
) -> Option<(SdpProblem, MomentIndexer)> {
    let mut idx = MomentIndexer::new(n);
    let mut blocks: Vec<Vec<Vec<MomentForm>>> = Vec::new();
    let mut equalities: Vec<MomentForm> = Vec::new();

    let basis = weighted_monomials(n, k as u32);
    let mut moment_forms = vec![vec![MomentForm::zero(); basis.len()]; basis.len()];
    for (u_pos, u) in basis.iter().enumerate() {
        for (v_pos, v) in basis.iter().enumerate().skip(u_pos) {
            let prod = &mono_poly(u) * &mono_poly(v);
            let form = MomentForm::from_poly(&prod, &mut idx);
            moment_forms[u_pos][v_pos] = form.clone();
            moment_forms[v_pos][u_pos] = form;
        }
    }
    blocks.push(moment_forms);

    for (g, kind) in gs {
        let dg = weighted_poly_degree(g).div_ceil(2) as usize;
        match kind {
            ConstraintKind::Ge0 => {
                let loc_basis = weighted_monomials(n, (k - dg) as u32);
                let dim = loc_basis.len();
                let mut forms = vec![vec![MomentForm::zero(); dim]; dim];
                for (u_pos, u) in loc_basis.iter().enumerate() {
                    for (v_pos, v) in loc_basis.iter().enumerate().skip(u_pos) {
                        let prod = &(&mono_poly(u) * &mono_poly(v)) * g;
                        let form = MomentForm::from_poly(&prod, &mut idx);
                        forms[u_pos][v_pos] = form.clone();
                        forms[v_pos][u_pos] = form;
                    }
                }
                blocks.push(forms);
            }
            ConstraintKind::Eq0 => {
                let limit = 2 * k as u32 - weighted_poly_degree(g);
                for u in weighted_monomials(n, limit) {
                    let prod = &mono_poly(&u) * g;
                    let form = MomentForm::from_poly(&prod, &mut idx);
                    if !form.is_zero() {
                        equalities.push(form);
                    }
                }
            }
        }
    }

    let j_basis = weighted_monomials(n, (k - d_j) as u32);
    let j_dim = j_basis.len() * n;
    let mut j_forms = vec![vec![MomentForm::zero(); j_dim]; j_dim];
    for (u_pos, u) in j_basis.iter().enumerate() {
        for (v_pos, v) in j_basis.iter().enumerate().skip(u_pos) {
            let uv = &mono_poly(u) * &mono_poly(v);
            for i in 0..n {
                for j in 0..n {
                    let row = u_pos * n + i;
                    let col = v_pos * n + j;
                    if col < row {
                        continue;
                    }
                    let form = MomentForm::from_poly(&(&uv * &jmat[i][j]), &mut idx);
                    j_forms[row][col] = form.clone();
                    j_forms[col][row] = form;
                }
            }
        }
    }
    blocks.push(j_forms);

    let var_count = idx.len();
    let objective_form = MomentForm::from_poly(ft, &mut idx);
    if idx.len() > var_count {
        return None;
    }
    let mut sdp = SdpProblem::new(var_count);
    for (i, c) in &objective_form.terms {
        sdp.objective[*i] = to_f64(c);
    }
    sdp.objective_constant = to_f64(&objective_form.constant);
    for forms in &blocks {
        sdp.blocks.push(block_from_forms(forms, var_count));
    }
    for form in &equalities {
        sdp.equalities.push(affine_from_form(form, var_count));
    }
    Some((sdp, idx))
}
