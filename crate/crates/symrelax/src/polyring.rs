//! Exact multivariate polynomial arithmetic with finite-group actions.
//!
//! Coefficients are arbitrary-precision rationals throughout; floating point
//! enters only at the SDP boundary. Symmetric-group operations work orbit-wise
//! on exponent multisets and never enumerate the n! group elements; cyclic
//! groups enumerate their n shifts directly.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::degredux::RPartition;
use crate::symcomb::Partition;

/// Exact rational scalar used for every coefficient in the crate.
pub type Rational = BigRational;

/// Rational from an integer.
pub fn rat(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

/// Rational from a numerator/denominator pair (reduced, positive denominator).
pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(numer.into(), denom.into())
}

/// Rational to nearest f64 (used only at the solver boundary).
pub fn to_f64(v: &Rational) -> f64 {
    v.to_f64().expect("rational out of f64 range")
}

/// Errors from polynomial construction, parsing and conversions.
#[derive(Debug, thiserror::Error)]
pub enum PolyError {
    /// Operand variable counts disagree.
    #[error("variable count mismatch: expected {expected}, got {got}")]
    VarMismatch { expected: usize, got: usize },
    /// Text input does not follow the polynomial grammar.
    #[error("parse error: {0}")]
    Parse(String),
    /// Operation requires an invariant polynomial.
    #[error("polynomial is not invariant under {0:?}")]
    NotInvariant(Group),
    /// A partition does not fit the ambient variable count.
    #[error("partition {0} has more parts than there are variables")]
    TooManyParts(Partition),
    /// Substitution pattern must use up all variables.
    #[error("substitution pattern weighs {weight}, expected {expected}")]
    WeightMismatch { weight: usize, expected: usize },
    /// Invalid permutation data.
    #[error("invalid permutation: {0}")]
    BadPermutation(String),
}

/// Finite groups acting on variable indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group {
    /// Full symmetric group permuting all variables.
    Sn,
    /// Cyclic group generated by the shift X1 -> X2 -> ... -> Xn -> X1.
    Cn,
}

/// A permutation of {1..n} in one-line notation (stored 0-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Perm {
    map: Vec<usize>,
}

impl Perm {
    /// Identity on n points.
    pub fn identity(n: usize) -> Self {
        Perm { map: (0..n).collect() }
    }

    /// Transposition of the 1-based points i and j.
    pub fn transposition(n: usize, i: usize, j: usize) -> Self {
        assert!(i >= 1 && i <= n && j >= 1 && j <= n, "points out of range");
        let mut map: Vec<usize> = (0..n).collect();
        map.swap(i - 1, j - 1);
        Perm { map }
    }

    /// The long cycle 1 -> 2 -> ... -> n -> 1.
    pub fn cycle(n: usize) -> Self {
        Perm { map: (0..n).map(|i| (i + 1) % n).collect() }
    }

    /// Permutation from 1-based images: `images[i]` is the image of point i+1.
    pub fn from_images(images: &[usize]) -> Result<Self, PolyError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &im in images {
            if im < 1 || im > n || seen[im - 1] {
                return Err(PolyError::BadPermutation(format!("images {images:?}")));
            }
            seen[im - 1] = true;
        }
        Ok(Perm { map: images.iter().map(|&im| im - 1).collect() })
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.map.len()
    }

    /// True when the permutation acts on zero points.
    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Image of the 1-based point i.
    pub fn image(&self, i: usize) -> usize {
        self.map[i - 1] + 1
    }

    /// Inverse permutation.
    pub fn inverse(&self) -> Self {
        let mut map = vec![0; self.map.len()];
        for (i, &im) in self.map.iter().enumerate() {
            map[im] = i;
        }
        Perm { map }
    }

    /// Composition `self ∘ other`: first apply `other`, then `self`.
    pub fn compose(&self, other: &Perm) -> Self {
        assert_eq!(self.len(), other.len(), "size mismatch");
        Perm { map: other.map.iter().map(|&im| self.map[im]).collect() }
    }

    /// Uniform random permutation (Fisher–Yates).
    pub fn random<R: rand::Rng>(n: usize, rng: &mut R) -> Self {
        let mut map: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            map.swap(i, rng.gen_range(0..=i));
        }
        Perm { map }
    }
}

/// Exponent vector of a monomial; entry i is the power of X_{i+1}.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exponents: Vec<u32>,
}

impl Monomial {
    /// Monomial with the given exponent vector.
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial { exponents }
    }

    /// The constant monomial 1 on n variables.
    pub fn constant(n_vars: usize) -> Self {
        Monomial { exponents: vec![0; n_vars] }
    }

    /// Total degree wt(β) = Σ βᵢ.
    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }

    /// Exponent vector.
    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    /// Ambient variable count.
    pub fn n_vars(&self) -> usize {
        self.exponents.len()
    }

    /// Multiset of nonzero exponents as a partition (sorted decreasingly).
    pub fn pattern(&self) -> Partition {
        let mut parts: Vec<u32> = self.exponents.iter().copied().filter(|&e| e > 0).collect();
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition::new(parts)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            exponents: self
                .exponents
                .iter()
                .zip(&other.exponents)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Apply a permutation: the new exponent at position σ(i) is βᵢ, which
    /// realizes the action p^σ(x) = p(σ⁻¹(x)) on monomials.
    fn permuted(&self, sigma: &Perm) -> Monomial {
        let mut exponents = vec![0; self.exponents.len()];
        for (i, &e) in self.exponents.iter().enumerate() {
            exponents[sigma.map[i]] = e;
        }
        Monomial { exponents }
    }
}

impl Ord for Monomial {
    /// Graded lexicographic order: degree first, then lex on exponents.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.exponents.cmp(&other.exponents))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Terms are kept in graded-lex order with no zero coefficients stored, so
/// printing and iteration are deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    n_vars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    /// The zero polynomial on n variables.
    pub fn zero(n_vars: usize) -> Self {
        assert!(n_vars > 0, "need at least one variable");
        Polynomial { n_vars, terms: BTreeMap::new() }
    }

    /// The constant polynomial.
    pub fn constant(n_vars: usize, c: Rational) -> Self {
        let mut p = Polynomial::zero(n_vars);
        p.add_term(Monomial::constant(n_vars), c);
        p
    }

    /// The constant 1.
    pub fn one(n_vars: usize) -> Self {
        Polynomial::constant(n_vars, Rational::one())
    }

    /// The variable X_i (1-based).
    pub fn var(n_vars: usize, i: usize) -> Self {
        assert!(i >= 1 && i <= n_vars, "variable index out of range");
        let mut exps = vec![0; n_vars];
        exps[i - 1] = 1;
        Polynomial::from_terms(n_vars, vec![(exps, Rational::one())])
    }

    /// Polynomial from (exponent vector, coefficient) pairs.
    pub fn from_terms(n_vars: usize, terms: Vec<(Vec<u32>, Rational)>) -> Self {
        let mut p = Polynomial::zero(n_vars);
        for (exps, c) in terms {
            assert_eq!(exps.len(), n_vars, "exponent vector length mismatch");
            p.add_term(Monomial::new(exps), c);
        }
        p
    }

    /// Number of variables of the ambient ring.
    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    /// True when no terms are stored.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree (0 for the zero polynomial).
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Coefficient of a monomial (zero when absent).
    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Iterate terms in graded-lex order (smallest first).
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    /// Number of stored terms.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Multiply by a scalar.
    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.n_vars);
        }
        Polynomial {
            n_vars: self.n_vars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    /// Integer power.
    pub fn pow(&self, k: u32) -> Polynomial {
        let mut acc = Polynomial::one(self.n_vars);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Evaluate at a floating-point point.
    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.n_vars, "point dimension mismatch");
        self.terms
            .iter()
            .map(|(m, c)| {
                let v: f64 = m
                    .exponents
                    .iter()
                    .zip(x)
                    .map(|(&e, &xi)| xi.powi(e as i32))
                    .product();
                to_f64(c) * v
            })
            .sum()
    }

    /// Evaluate exactly at a rational point.
    pub fn eval_exact(&self, x: &[Rational]) -> Rational {
        assert_eq!(x.len(), self.n_vars, "point dimension mismatch");
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (&e, xi) in m.exponents.iter().zip(x) {
                for _ in 0..e {
                    v *= xi;
                }
            }
            acc += v;
        }
        acc
    }

    /// Apply a permutation: returns p^σ with p^σ(x) = p(σ⁻¹(x)).
    pub fn act(&self, sigma: &Perm) -> Result<Polynomial, PolyError> {
        if sigma.len() != self.n_vars {
            return Err(PolyError::VarMismatch { expected: self.n_vars, got: sigma.len() });
        }
        Ok(Polynomial {
            n_vars: self.n_vars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.permuted(sigma), c.clone()))
                .collect(),
        })
    }

    /// Group-average (Reynolds operator) ρ(p) = (1/|G|) Σ_σ p^σ.
    ///
    /// For Sn this works orbit-wise: each monomial contributes the mean of its
    /// exponent-multiset orbit, which equals the full group average.
    pub fn reynolds(&self, group: Group) -> Polynomial {
        match group {
            Group::Sn => {
                let mut out = Polynomial::zero(self.n_vars);
                for (m, c) in &self.terms {
                    let orbit = monomial_orbit(&m.pattern(), self.n_vars)
                        .expect("pattern fits ambient variables");
                    let share = c / Rational::from_integer(orbit.len().into());
                    for member in orbit {
                        out.add_term(member, share.clone());
                    }
                }
                out
            }
            Group::Cn => {
                let n = self.n_vars;
                let shift = Perm::cycle(n);
                let mut acc = Polynomial::zero(n);
                let mut sigma = Perm::identity(n);
                for _ in 0..n {
                    acc = &acc + &self.act(&sigma).expect("sizes match");
                    sigma = shift.compose(&sigma);
                }
                acc.scale(&ratio(1, n as i64))
            }
        }
    }

    /// True iff p is fixed by the group's generators.
    pub fn is_invariant(&self, group: Group) -> bool {
        let n = self.n_vars;
        let generators: Vec<Perm> = match group {
            Group::Sn => {
                if n == 1 {
                    return true;
                }
                vec![Perm::transposition(n, 1, 2), Perm::cycle(n)]
            }
            Group::Cn => vec![Perm::cycle(n)],
        };
        generators
            .iter()
            .all(|sigma| self.act(sigma).expect("sizes match") == *self)
    }

    /// Rewrite an Sn-invariant polynomial in the monomial-orbit basis.
    pub fn to_orbit_basis(&self) -> Result<OrbitBasisPolynomial, PolyError> {
        if !self.is_invariant(Group::Sn) {
            return Err(PolyError::NotInvariant(Group::Sn));
        }
        let mut coeffs: BTreeMap<Partition, Rational> = BTreeMap::new();
        for (m, c) in &self.terms {
            let lambda = m.pattern();
            // Invariance makes every orbit member carry the same coefficient,
            // so recording the representative once is exact.
            coeffs.entry(lambda).or_insert_with(|| c.clone());
        }
        Ok(OrbitBasisPolynomial { n_vars: self.n_vars, coeffs })
    }

    /// Substitute blocks of repeated values: X variables in the i-th block of
    /// the pattern ω all become Tᵢ, producing f^ω in r = len(ω) variables.
    pub fn substitute_rpartition(&self, omega: &RPartition) -> Result<Polynomial, PolyError> {
        let weight: usize = omega.parts().iter().map(|&w| w as usize).sum();
        if weight != self.n_vars {
            return Err(PolyError::WeightMismatch { weight, expected: self.n_vars });
        }
        let r = omega.parts().len();
        let mut block = Vec::with_capacity(self.n_vars);
        for (bi, &w) in omega.parts().iter().enumerate() {
            for _ in 0..w {
                block.push(bi);
            }
        }
        let mut out = Polynomial::zero(r.max(1));
        for (m, c) in &self.terms {
            let mut exps = vec![0u32; r.max(1)];
            for (i, &e) in m.exponents.iter().enumerate() {
                exps[block[i]] += e;
            }
            out.add_term(Monomial::new(exps), c.clone());
        }
        Ok(out)
    }

    /// Rewrite a symmetric polynomial as a polynomial in the power sums
    /// p_j = Σᵢ Xᵢ^j; the result uses variables 1..deg(p) (variable j ↦ p_j),
    /// with only p_1..p_min(deg,n) appearing. Exact, via a rational linear
    /// solve in the monomial-orbit basis.
    pub fn to_power_sums(&self) -> Result<Polynomial, PolyError> {
        if !self.is_invariant(Group::Sn) {
            return Err(PolyError::NotInvariant(Group::Sn));
        }
        let n = self.n_vars;
        let d = self.degree().max(1) as usize;
        let mut out = Polynomial::zero(d);
        // Solve degree by degree: products ∏ p_{μᵢ} over partitions μ of w with
        // parts ≤ min(w,n) form a basis of the symmetric polynomials of degree
        // w in n variables (conjugation matches the dimensions).
        let by_degree = self.homogeneous_components();
        for (w, component) in by_degree {
            if w == 0 {
                let c = component.coeff(&Monomial::constant(n));
                out.add_term(Monomial::constant(d), c);
                continue;
            }
            let max_part = (w as usize).min(n);
            let mus = partitions_max_part(w, max_part as u32);
            let target = component.to_orbit_basis()?;
            let lambdas: Vec<Partition> = crate::symcomb::partitions(w, n);
            let index: BTreeMap<&Partition, usize> =
                lambdas.iter().enumerate().map(|(i, l)| (l, i)).collect();
            // One representative monomial per orbit pattern; the m_λ-coordinate
            // of a symmetric polynomial is that monomial's coefficient.
            let representatives: Vec<Monomial> = lambdas
                .iter()
                .map(|l| {
                    let mut exps = vec![0u32; n];
                    exps[..l.parts().len()].copy_from_slice(l.parts());
                    Monomial::new(exps)
                })
                .collect();
            // Row per orbit pattern, column per power-sum product.
            let rows = lambdas.len();
            let mut a = vec![vec![Rational::zero(); mus.len()]; rows];
            for (j, mu) in mus.iter().enumerate() {
                let mut q = Polynomial::one(n);
                for &part in mu.parts() {
                    q = &q * &power_sum(n, part);
                }
                for (row, rep) in representatives.iter().enumerate() {
                    a[row][j] = q.coeff(rep);
                }
            }
            let mut b = vec![Rational::zero(); rows];
            for (lambda, c) in target.coeffs() {
                b[index[lambda]] = c.clone();
            }
            let sol = solve_rational(a, b).ok_or_else(|| {
                PolyError::Parse("power-sum basis solve failed".into())
            })?;
            for (mu, c) in mus.iter().zip(sol) {
                if c.is_zero() {
                    continue;
                }
                let mut exps = vec![0u32; d];
                for &part in mu.parts() {
                    exps[(part - 1) as usize] += 1;
                }
                out.add_term(Monomial::new(exps), c);
            }
        }
        Ok(out)
    }

    /// Split into homogeneous components, keyed by degree.
    pub fn homogeneous_components(&self) -> BTreeMap<u32, Polynomial> {
        let mut out: BTreeMap<u32, Polynomial> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.degree())
                .or_insert_with(|| Polynomial::zero(self.n_vars))
                .add_term(m.clone(), c.clone());
        }
        out
    }

    /// Substitute p_j(X₁..Xₙ) for variable j: inverse of `to_power_sums`.
    pub fn expand_power_sums(&self, n: usize) -> Polynomial {
        let mut out = Polynomial::zero(n);
        for (m, c) in &self.terms {
            let mut term = Polynomial::constant(n, c.clone());
            for (j, &e) in m.exponents.iter().enumerate() {
                if e > 0 {
                    term = &term * &power_sum(n, (j + 1) as u32).pow(e);
                }
            }
            out = &out + &term;
        }
        out
    }

    /// Parse a polynomial in the text grammar, e.g. `3/2*x1^2*x2 - x3 + 7`.
    pub fn parse(input: &str, n_vars: usize) -> Result<Polynomial, PolyError> {
        parse_polynomial(input, n_vars)
    }

    /// Render with a custom variable stem (`x` gives `x1`, `x2`, ...).
    pub fn to_string_with(&self, stem: &str) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if negative {
                    out.push('-');
                }
            } else if negative {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let mut pieces: Vec<String> = Vec::new();
            if m.degree() == 0 || !abs.is_one() {
                pieces.push(abs.to_string());
            }
            for (i, &e) in m.exponents.iter().enumerate() {
                if e == 1 {
                    pieces.push(format!("{stem}{}", i + 1));
                } else if e > 1 {
                    pieces.push(format!("{stem}{}^{}", i + 1, e));
                }
            }
            out.push_str(&pieces.join("*"));
        }
        out
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_with("x"))
    }
}

impl std::ops::Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.n_vars, rhs.n_vars, "variable count mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl std::ops::Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.n_vars, rhs.n_vars, "variable count mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl std::ops::Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&rat(-1))
    }
}

impl std::ops::Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.n_vars, rhs.n_vars, "variable count mismatch");
        let mut out = Polynomial::zero(self.n_vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

/// An Sn-invariant polynomial in the monomial-orbit basis: key λ stands for
/// m_λ = Σ_{γ in the Sn-orbit of the λ-padded exponent vector} X^γ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitBasisPolynomial {
    n_vars: usize,
    coeffs: BTreeMap<Partition, Rational>,
}

impl OrbitBasisPolynomial {
    /// Build from (partition, coefficient) pairs.
    pub fn from_coeffs(
        n_vars: usize,
        coeffs: Vec<(Partition, Rational)>,
    ) -> Result<Self, PolyError> {
        let mut map = BTreeMap::new();
        for (lambda, c) in coeffs {
            if lambda.parts().len() > n_vars {
                return Err(PolyError::TooManyParts(lambda));
            }
            if !c.is_zero() {
                *map.entry(lambda).or_insert_with(Rational::zero) += c;
            }
        }
        map.retain(|_, v: &mut Rational| !v.is_zero());
        Ok(OrbitBasisPolynomial { n_vars, coeffs: map })
    }

    /// Ambient variable count.
    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    /// Coefficients keyed by orbit pattern.
    pub fn coeffs(&self) -> impl Iterator<Item = (&Partition, &Rational)> {
        self.coeffs.iter()
    }

    /// Coefficient of one orbit (zero when absent).
    pub fn coeff(&self, lambda: &Partition) -> Rational {
        self.coeffs.get(lambda).cloned().unwrap_or_else(Rational::zero)
    }

    /// Expand back into the monomial basis.
    pub fn expand(&self) -> Polynomial {
        let mut out = Polynomial::zero(self.n_vars);
        for (lambda, c) in &self.coeffs {
            for m in monomial_orbit(lambda, self.n_vars).expect("validated at construction") {
                out.add_term(m, c.clone());
            }
        }
        out
    }
}

/// All monomials in the Sn-orbit of the λ-padded exponent vector: the distinct
/// arrangements of λ's parts (plus zeros) across n slots.
pub fn monomial_orbit(lambda: &Partition, n: usize) -> Result<Vec<Monomial>, PolyError> {
    if lambda.parts().len() > n {
        return Err(PolyError::TooManyParts(lambda.clone()));
    }
    let mut values = vec![0u32; n];
    values[..lambda.parts().len()].copy_from_slice(lambda.parts());
    let mut arrangements = Vec::new();
    let mut current = Vec::with_capacity(n);
    distinct_arrangements(&mut values, &mut current, &mut arrangements);
    Ok(arrangements.into_iter().map(Monomial::new).collect())
}

/// Orbit size |Sn · β| for the λ-padded exponent vector.
pub fn orbit_size(lambda: &Partition, n: usize) -> Result<u64, PolyError> {
    if lambda.parts().len() > n {
        return Err(PolyError::TooManyParts(lambda.clone()));
    }
    let mut mult: BTreeMap<u32, u64> = BTreeMap::new();
    for &p in lambda.parts() {
        *mult.entry(p).or_insert(0) += 1;
    }
    *mult.entry(0).or_insert(0) += (n - lambda.parts().len()) as u64;
    let mut size = 1u64;
    let mut used = 0u64;
    // Multinomial n! / ∏ mult! computed incrementally to stay in u64.
    for (_, &m) in mult.iter() {
        for i in 1..=m {
            used += 1;
            size = size * used / i;
        }
    }
    Ok(size)
}

fn distinct_arrangements(pool: &mut Vec<u32>, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if pool.is_empty() {
        out.push(current.clone());
        return;
    }
    let mut tried: Vec<u32> = Vec::new();
    for i in 0..pool.len() {
        let v = pool[i];
        if tried.contains(&v) {
            continue;
        }
        tried.push(v);
        pool.swap_remove(i);
        current.push(v);
        distinct_arrangements(pool, current, out);
        current.pop();
        pool.push(v);
        let last = pool.len() - 1;
        pool.swap(i, last);
    }
}

/// The power sum p_j = Σᵢ Xᵢ^j on n variables.
pub fn power_sum(n: usize, j: u32) -> Polynomial {
    let mut p = Polynomial::zero(n);
    for i in 0..n {
        let mut exps = vec![0u32; n];
        exps[i] = j;
        p.add_term(Monomial::new(exps), Rational::one());
    }
    p
}

/// Partitions of d with every part ≤ max_part, in reverse-lex order.
fn partitions_max_part(d: u32, max_part: u32) -> Vec<Partition> {
    fn rec(remaining: u32, cap: u32, current: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition::new(current.clone()));
            return;
        }
        let hi = cap.min(remaining);
        for next in (1..=hi).rev() {
            current.push(next);
            rec(remaining - next, next, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, max_part, &mut Vec::new(), &mut out);
    out
}

/// Exact Gaussian elimination; returns one solution of A·x = b or None when
/// the system is inconsistent. Free variables (if any) are set to zero.
pub fn solve_rational(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let rows = a.len();
    if rows == 0 {
        return Some(Vec::new());
    }
    let cols = a[0].len();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; cols];
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        b.swap(row, p);
        let inv = a[row][col].recip();
        for c in col..cols {
            a[row][c] = &a[row][c] * &inv;
        }
        b[row] = &b[row] * &inv;
        for r in 0..rows {
            if r != row && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for c in col..cols {
                    let delta = &factor * &a[row][c];
                    a[r][c] = &a[r][c] - &delta;
                }
                let delta = &factor * &b[row];
                b[r] = &b[r] - &delta;
            }
        }
        pivot_of_col[col] = Some(row);
        row += 1;
        if row == rows {
            break;
        }
    }
    // Inconsistency: a zero row with nonzero rhs.
    for r in row..rows {
        if !b[r].is_zero() {
            return None;
        }
    }
    let mut x = vec![Rational::zero(); cols];
    for col in 0..cols {
        if let Some(r) = pivot_of_col[col] {
            x[col] = b[r].clone();
        }
    }
    Some(x)
}

/// Rank of a rational matrix, by exact Gaussian elimination.
pub fn rational_rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let nrows = rows.len();
    if nrows == 0 {
        return 0;
    }
    let ncols = rows[0].len();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..nrows).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = rows[rank][col].recip();
        for c in col..ncols {
            rows[rank][c] = &rows[rank][c] * &inv;
        }
        for r in 0..nrows {
            if r != rank && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone();
                for c in col..ncols {
                    let delta = &factor * &rows[rank][c];
                    rows[r][c] = &rows[r][c] - &delta;
                }
            }
        }
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    rank
}

fn parse_polynomial(input: &str, n_vars: usize) -> Result<Polynomial, PolyError> {
    #[derive(Debug, Clone, PartialEq)]
    enum Tok {
        Num(num::BigInt),
        Var(usize),
        Plus,
        Minus,
        Star,
        Slash,
        Caret,
    }

    let bytes = input.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                toks.push(Tok::Plus);
                i += 1;
            }
            '-' => {
                toks.push(Tok::Minus);
                i += 1;
            }
            '*' => {
                toks.push(Tok::Star);
                i += 1;
            }
            '/' => {
                toks.push(Tok::Slash);
                i += 1;
            }
            '^' => {
                toks.push(Tok::Caret);
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let digits = &input[start..i];
                toks.push(Tok::Num(digits.parse().expect("digits")));
            }
            'x' | 'X' => {
                i += 1;
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if start == i {
                    return Err(PolyError::Parse(format!(
                        "variable needs an index at byte {start}"
                    )));
                }
                let idx: usize = input[start..i]
                    .parse()
                    .map_err(|_| PolyError::Parse("variable index overflow".into()))?;
                if idx < 1 || idx > n_vars {
                    return Err(PolyError::VarMismatch { expected: n_vars, got: idx });
                }
                toks.push(Tok::Var(idx));
            }
            other => {
                return Err(PolyError::Parse(format!("unexpected character `{other}`")));
            }
        }
    }

    let mut poly = Polynomial::zero(n_vars);
    let mut pos = 0;
    let mut first = true;
    while pos < toks.len() {
        // Sign.
        let mut negative = false;
        match toks.get(pos) {
            Some(Tok::Plus) => {
                pos += 1;
            }
            Some(Tok::Minus) => {
                negative = true;
                pos += 1;
            }
            _ if first => {}
            _ => {
                return Err(PolyError::Parse("expected + or - between terms".into()));
            }
        }
        first = false;
        // Factors: numbers (with optional /den) and variables (with optional ^e),
        // separated by optional `*`.
        let mut coeff = Rational::one();
        let mut exps = vec![0u32; n_vars];
        let mut any = false;
        loop {
            match toks.get(pos) {
                Some(Tok::Num(v)) => {
                    pos += 1;
                    let mut value = Rational::from_integer(v.clone());
                    if let Some(Tok::Slash) = toks.get(pos) {
                        match toks.get(pos + 1) {
                            Some(Tok::Num(den)) if !den.is_zero() => {
                                value = Rational::new(v.clone(), den.clone());
                                pos += 2;
                            }
                            _ => {
                                return Err(PolyError::Parse(
                                    "`/` must be followed by a nonzero integer".into(),
                                ));
                            }
                        }
                    }
                    coeff *= value;
                    any = true;
                }
                Some(Tok::Var(idx)) => {
                    let idx = *idx;
                    pos += 1;
                    let mut e = 1u32;
                    if let Some(Tok::Caret) = toks.get(pos) {
                        match toks.get(pos + 1) {
                            Some(Tok::Num(v)) => {
                                e = v
                                    .to_u32()
                                    .ok_or_else(|| PolyError::Parse("exponent overflow".into()))?;
                                pos += 2;
                            }
                            _ => {
                                return Err(PolyError::Parse(
                                    "`^` must be followed by an integer".into(),
                                ));
                            }
                        }
                    }
                    exps[idx - 1] += e;
                    any = true;
                }
                Some(Tok::Star) => {
                    pos += 1;
                    continue;
                }
                _ => break,
            }
        }
        if !any {
            return Err(PolyError::Parse("empty term".into()));
        }
        if negative {
            coeff = -coeff;
        }
        poly.add_term(Monomial::new(exps), coeff);
    }
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(s: &str, n: usize) -> Polynomial {
        Polynomial::parse(s, n).expect("test polynomial parses")
    }

    fn random_poly<R: Rng>(n: usize, max_deg: u32, rng: &mut R) -> Polynomial {
        let mut poly = Polynomial::zero(n);
        for _ in 0..rng.gen_range(1..=6) {
            let mut exps = vec![0u32; n];
            let mut budget = rng.gen_range(0..=max_deg);
            while budget > 0 {
                let i = rng.gen_range(0..n);
                exps[i] += 1;
                budget -= 1;
            }
            let num = rng.gen_range(-6i64..=6);
            let den = rng.gen_range(1i64..=4);
            poly = &poly + &Polynomial::from_terms(n, vec![(exps, ratio(num, den))]);
        }
        poly
    }

    #[test]
    fn act_transposition_relabels() {
        let f = p("x1^2*x2", 2);
        let sigma = Perm::transposition(2, 1, 2);
        assert_eq!(f.act(&sigma).unwrap(), p("x2^2*x1", 2));
    }

    #[test]
    fn act_identity_fixes() {
        let f = p("3/2*x1^2*x2 - x3 + 7", 3);
        assert_eq!(f.act(&Perm::identity(3)).unwrap(), f);
    }

    #[test]
    fn act_three_cycle() {
        // σ = (1 2 3) sends X1^2 X2 to X2^2 X3.
        let f = p("x1^2*x2", 3);
        let sigma = Perm::cycle(3);
        assert_eq!(f.act(&sigma).unwrap(), p("x2^2*x3", 3));
    }

    #[test]
    fn act_is_group_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let n = rng.gen_range(2..=5);
            let f = random_poly(n, 4, &mut rng);
            let sigma = Perm::random(n, &mut rng);
            let tau = Perm::random(n, &mut rng);
            let joint = f.act(&sigma.compose(&tau)).unwrap();
            let staged = f.act(&tau).unwrap().act(&sigma).unwrap();
            assert_eq!(joint, staged);
        }
    }

    #[test]
    fn reynolds_orbit_average() {
        let f = p("x1^2*x2", 3);
        let expected = p("x1^2*x2 + x1^2*x3 + x2^2*x1 + x2^2*x3 + x3^2*x1 + x3^2*x2", 3)
            .scale(&ratio(1, 6));
        assert_eq!(f.reynolds(Group::Sn), expected);
    }

    #[test]
    fn reynolds_fixes_invariants() {
        let f = p("x1 + x2 + x3", 3);
        assert_eq!(f.reynolds(Group::Sn), f);
    }

    #[test]
    fn reynolds_cyclic_shift_average() {
        let f = p("x1", 4);
        let expected = p("x1 + x2 + x3 + x4", 4).scale(&ratio(1, 4));
        assert_eq!(f.reynolds(Group::Cn), expected);
    }

    #[test]
    fn reynolds_idempotent_both_groups() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let n = rng.gen_range(2..=5);
            let f = random_poly(n, 4, &mut rng);
            for group in [Group::Sn, Group::Cn] {
                let once = f.reynolds(group);
                assert!(once.is_invariant(group));
                assert_eq!(once.reynolds(group), once);
            }
        }
    }

    #[test]
    fn invariance_examples() {
        assert!(p("x1*x2 + x2*x3 + x3*x1", 3).is_invariant(Group::Sn));
        assert!(!p("x1 - x2", 2).is_invariant(Group::Sn));
        let necklace = p("x1*x2 + x2*x3 + x3*x4 + x4*x1", 4);
        assert!(necklace.is_invariant(Group::Cn));
        assert!(!necklace.is_invariant(Group::Sn));
    }

    #[test]
    fn orbit_basis_examples() {
        let f = p("x1^2 + x2^2 + x3^2", 3);
        let q = f.to_orbit_basis().unwrap();
        assert_eq!(q.coeff(&Partition::new(vec![2])), rat(1));
        assert_eq!(q.coeffs().count(), 1);

        let q = OrbitBasisPolynomial::from_coeffs(3, vec![(Partition::new(vec![1, 1]), rat(1))])
            .unwrap();
        assert_eq!(q.expand(), p("x1*x2 + x1*x3 + x2*x3", 3));

        let f = &p("x1 + x2", 2) * &p("x1 + x2", 2);
        let q = f.to_orbit_basis().unwrap();
        assert_eq!(q.coeff(&Partition::new(vec![2])), rat(1));
        assert_eq!(q.coeff(&Partition::new(vec![1, 1])), rat(2));
    }

    #[test]
    fn orbit_basis_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let n = rng.gen_range(2..=5);
            let f = random_poly(n, 4, &mut rng).reynolds(Group::Sn);
            let q = f.to_orbit_basis().unwrap();
            assert_eq!(q.expand(), f);
        }
    }

    #[test]
    fn orbit_basis_rejects_noninvariant() {
        assert!(p("x1 - x2", 2).to_orbit_basis().is_err());
    }

    #[test]
    fn substitution_examples() {
        let f = p("x1^2 + x2^2 + x3^2", 3);
        let omega = RPartition::new(vec![2, 1]).unwrap();
        assert_eq!(f.substitute_rpartition(&omega).unwrap(), p("2*x1^2 + x2^2", 2));

        let f = p("x1 + x2 + x3 + x4", 4);
        let omega = RPartition::new(vec![4]).unwrap();
        assert_eq!(f.substitute_rpartition(&omega).unwrap(), p("4*x1", 1));

        let omega = RPartition::new(vec![2, 1]).unwrap();
        assert!(p("x1", 2).substitute_rpartition(&omega).is_err());
    }

    #[test]
    fn substitution_commutes_with_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..50 {
            let n = rng.gen_range(2..=5usize);
            let f = random_poly(n, 4, &mut rng);
            // Random composition of n.
            let mut rest = n;
            let mut parts = Vec::new();
            while rest > 0 {
                let take = rng.gen_range(1..=rest);
                parts.push(take as u32);
                rest -= take;
            }
            parts.sort_unstable_by(|a, b| b.cmp(a));
            let omega = RPartition::new(parts.clone()).unwrap();
            let reduced = f.substitute_rpartition(&omega).unwrap();
            let t: Vec<f64> = (0..parts.len()).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let mut x = Vec::new();
            for (bi, &w) in parts.iter().enumerate() {
                for _ in 0..w {
                    x.push(t[bi]);
                }
            }
            let lhs = reduced.eval(&t);
            let rhs = f.eval(&x);
            assert!((lhs - rhs).abs() < 1e-12 * (1.0 + rhs.abs()), "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn power_sum_rewrites() {
        // e2 = (p1^2 - p2)/2.
        let e2 = p("x1*x2 + x1*x3 + x2*x3", 3);
        let q = e2.to_power_sums().unwrap();
        assert_eq!(q, p("1/2*x1^2 - 1/2*x2", 2));

        let m3 = p("x1^3 + x2^3 + x3^3", 3);
        assert_eq!(m3.to_power_sums().unwrap(), p("x3", 3));

        let sq = &p("x1 + x2 + x3", 3) * &p("x1 + x2 + x3", 3);
        assert_eq!(sq.to_power_sums().unwrap(), p("x1^2", 2));
    }

    #[test]
    fn power_sum_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..30 {
            let n = rng.gen_range(2..=5);
            let f = random_poly(n, 6, &mut rng).reynolds(Group::Sn);
            let q = f.to_power_sums().unwrap();
            assert_eq!(q.expand_power_sums(n), f);
        }
    }

    #[test]
    fn power_sum_rejects_asymmetric() {
        assert!(p("x1^2 + x2", 2).to_power_sums().is_err());
    }

    #[test]
    fn printing_is_graded_lex_and_exact() {
        let f = p("7 - x3 + 3/2*x1^2*x2", 3);
        assert_eq!(f.to_string(), "3/2*x1^2*x2 - x3 + 7");
        assert_eq!(Polynomial::zero(2).to_string(), "0");
        assert_eq!(p("-x1 + 1", 1).to_string(), "-x1 + 1");
        assert_eq!(p("x1^2 - 2*x1*x2 + x2^2", 2).to_string(), "x1^2 - 2*x1*x2 + x2^2");
    }

    #[test]
    fn parse_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        for _ in 0..60 {
            let n = rng.gen_range(1..=5);
            let f = random_poly(n, 5, &mut rng);
            let reparsed = Polynomial::parse(&f.to_string(), n).unwrap();
            assert_eq!(reparsed, f);
        }
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!(Polynomial::parse("x4", 3).is_err());
        assert!(Polynomial::parse("x1 +", 3).is_err());
        assert!(Polynomial::parse("3/0*x1", 3).is_err());
        assert!(Polynomial::parse("y1", 3).is_err());
        assert!(Polynomial::parse("x", 3).is_err());
        assert!(Polynomial::parse("(x1)", 3).is_err());
    }

    #[test]
    fn orbit_sizes_match_enumeration() {
        for (lambda, n) in [
            (Partition::new(vec![2, 1]), 3),
            (Partition::new(vec![1, 1]), 4),
            (Partition::new(vec![3, 1, 1]), 5),
            (Partition::new(vec![2, 2]), 6),
        ] {
            let orbit = monomial_orbit(&lambda, n).unwrap();
            assert_eq!(orbit.len() as u64, orbit_size(&lambda, n).unwrap());
            let distinct: std::collections::HashSet<_> =
                orbit.iter().map(|m| m.exponents().to_vec()).collect();
            assert_eq!(distinct.len(), orbit.len());
        }
    }
}
