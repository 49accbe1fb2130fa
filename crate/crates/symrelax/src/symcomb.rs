//! Partitions, Young tableaux, Kostka numbers and Specht polynomials.
//!
//! This is the combinatorial layer behind the block decomposition of
//! symmetric moment matrices: partitions index irreducible components, Kostka
//! numbers count how often each component appears, and (generalized) Specht
//! polynomials realize the components inside concrete monomial orbits.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num::BigUint;
use num_traits::{One, Zero};

use crate::polyring::{rat, Monomial, Perm, PolyError, Polynomial};

/// Errors from tableau and partition operations.
#[derive(Debug, thiserror::Error)]
pub enum CombError {
    /// Two partitions that must share a weight do not.
    #[error("weight mismatch: {0} vs {1}")]
    WeightMismatch(u32, u32),
    /// A tableau violates its structural invariants.
    #[error("invalid tableau: {0}")]
    BadTableau(String),
    /// Underlying polynomial-layer failure.
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A partition: weakly decreasing positive integers. The empty partition is
/// allowed and has weight 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    /// Build a partition; parts must be weakly decreasing and positive.
    pub fn new(parts: Vec<u32>) -> Self {
        assert!(
            parts.windows(2).all(|w| w[0] >= w[1]),
            "parts must be weakly decreasing: {parts:?}"
        );
        assert!(parts.iter().all(|&p| p > 0), "parts must be positive: {parts:?}");
        Partition { parts }
    }

    /// The empty partition.
    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    /// The parts, largest first.
    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Sum of parts.
    pub fn weight(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// Number of parts.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    /// True for the empty partition.
    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Conjugate (transposed) partition.
    pub fn conjugate(&self) -> Partition {
        if self.parts.is_empty() {
            return Partition::empty();
        }
        let cols = self.parts[0] as usize;
        let mut out = Vec::with_capacity(cols);
        for j in 0..cols {
            out.push(self.parts.iter().filter(|&&p| p as usize > j).count() as u32);
        }
        Partition { parts: out }
    }
}

impl Ord for Partition {
    /// Weight first; within a weight, reverse-lexicographic, so iteration over
    /// sorted keys matches the enumeration order of [`partitions`].
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight()
            .cmp(&other.weight())
            .then_with(|| other.parts.cmp(&self.parts))
    }
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Partition {
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

/// All partitions of d with at most `max_parts` parts, reverse-lexicographic.
pub fn partitions(d: u32, max_parts: usize) -> Vec<Partition> {
    fn rec(
        remaining: u32,
        cap: u32,
        slots: usize,
        current: &mut Vec<u32>,
        out: &mut Vec<Partition>,
    ) {
        if remaining == 0 {
            out.push(Partition::new(current.clone()));
            return;
        }
        if slots == 0 {
            return;
        }
        for next in (1..=cap.min(remaining)).rev() {
            current.push(next);
            rec(remaining - next, next, slots - 1, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, d.max(1), max_parts, &mut Vec::new(), &mut out);
    out
}

/// Dominance order: λ ⊵ μ iff every prefix sum of λ is ≥ that of μ.
pub fn dominates(lambda: &Partition, mu: &Partition) -> Result<bool, CombError> {
    if lambda.weight() != mu.weight() {
        return Err(CombError::WeightMismatch(lambda.weight(), mu.weight()));
    }
    let len = lambda.len().max(mu.len());
    let mut acc_l = 0u32;
    let mut acc_m = 0u32;
    for i in 0..len {
        acc_l += lambda.parts.get(i).copied().unwrap_or(0);
        acc_m += mu.parts.get(i).copied().unwrap_or(0);
        if acc_l < acc_m {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The shape data of an exponent vector β: its distinct values grouped by
/// multiplicity, and the multiplicity partition μ(β) of n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentShape {
    /// The exponent vector, including zeros.
    pub beta: Monomial,
    /// Distinct exponent values b₁..b_ℓ; bⱼ has multiplicity shape_mu[j].
    /// Ordered by multiplicity decreasing, ties by smaller value first.
    pub parts_b: Vec<u32>,
    /// Multiplicities of the distinct values, as a partition of n.
    pub shape_mu: Partition,
}

/// Group the entries of β (zeros included) into the shape μ(β).
pub fn shape_of(beta: &Monomial) -> ExponentShape {
    let mut mult: BTreeMap<u32, u32> = BTreeMap::new();
    for &e in beta.exponents() {
        *mult.entry(e).or_insert(0) += 1;
    }
    let mut pairs: Vec<(u32, u32)> = mult.into_iter().collect();
    // Multiplicity decreasing; ties broken by the smaller exponent value.
    pairs.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    ExponentShape {
        beta: beta.clone(),
        parts_b: pairs.iter().map(|&(v, _)| v).collect(),
        shape_mu: Partition::new(pairs.iter().map(|&(_, m)| m).collect()),
    }
}

/// A Young tableau: a filling of the shape λ ⊢ n by the numbers 1..n, each
/// used exactly once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tableau {
    shape: Partition,
    rows: Vec<Vec<u32>>,
}

impl Tableau {
    /// Build a tableau, validating the filling against the shape.
    pub fn new(shape: Partition, rows: Vec<Vec<u32>>) -> Result<Self, CombError> {
        if rows.len() != shape.len() {
            return Err(CombError::BadTableau(format!(
                "expected {} rows, got {}",
                shape.len(),
                rows.len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != shape.parts()[i] as usize {
                return Err(CombError::BadTableau(format!(
                    "row {} has {} entries, shape wants {}",
                    i + 1,
                    row.len(),
                    shape.parts()[i]
                )));
            }
        }
        let n = shape.weight();
        let mut seen = vec![false; n as usize];
        for &v in rows.iter().flatten() {
            if v < 1 || v > n || seen[(v - 1) as usize] {
                return Err(CombError::BadTableau(format!(
                    "entries must be 1..{n} each once"
                )));
            }
            seen[(v - 1) as usize] = true;
        }
        Ok(Tableau { shape, rows })
    }

    /// The underlying shape λ.
    pub fn shape(&self) -> &Partition {
        &self.shape
    }

    /// The rows of the filling.
    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    /// Entry at (row i, column j), 0-based.
    pub fn entry(&self, i: usize, j: usize) -> u32 {
        self.rows[i][j]
    }

    /// Entries of column j, top to bottom.
    pub fn column(&self, j: usize) -> Vec<u32> {
        self.rows.iter().filter_map(|row| row.get(j).copied()).collect()
    }

    /// True iff rows and columns strictly increase.
    pub fn is_standard(&self) -> bool {
        for row in &self.rows {
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return false;
            }
        }
        let cols = self.shape.parts().first().copied().unwrap_or(0) as usize;
        for j in 0..cols {
            let col = self.column(j);
            if col.windows(2).any(|w| w[0] >= w[1]) {
                return false;
            }
        }
        true
    }
}

impl fmt::Display for Tableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_rows(f, &self.rows)
    }
}

fn write_rows(f: &mut fmt::Formatter<'_>, rows: &[Vec<u32>]) -> fmt::Result {
    write!(f, "[")?;
    for (i, row) in rows.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "[")?;
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")?;
    }
    write!(f, "]")
}

/// A generalized Young tableau: a filling of shape λ where the value i
/// appears exactly contentᵢ times (repeats allowed).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralizedTableau {
    shape: Partition,
    content: Partition,
    rows: Vec<Vec<u32>>,
}

impl GeneralizedTableau {
    /// Build a generalized tableau, validating shape and content.
    pub fn new(
        shape: Partition,
        content: Partition,
        rows: Vec<Vec<u32>>,
    ) -> Result<Self, CombError> {
        if shape.weight() != content.weight() {
            return Err(CombError::WeightMismatch(shape.weight(), content.weight()));
        }
        if rows.len() != shape.len() {
            return Err(CombError::BadTableau(format!(
                "expected {} rows, got {}",
                shape.len(),
                rows.len()
            )));
        }
        let mut counts = vec![0u32; content.len()];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != shape.parts()[i] as usize {
                return Err(CombError::BadTableau(format!(
                    "row {} has {} entries, shape wants {}",
                    i + 1,
                    row.len(),
                    shape.parts()[i]
                )));
            }
            for &v in row {
                if v < 1 || v as usize > content.len() {
                    return Err(CombError::BadTableau(format!(
                        "value {v} outside 1..{}",
                        content.len()
                    )));
                }
                counts[(v - 1) as usize] += 1;
            }
        }
        if counts.as_slice() != content.parts() {
            return Err(CombError::BadTableau(format!(
                "content counts {counts:?} do not match {content}"
            )));
        }
        Ok(GeneralizedTableau { shape, content, rows })
    }

    /// The shape λ.
    pub fn shape(&self) -> &Partition {
        &self.shape
    }

    /// The content μ.
    pub fn content(&self) -> &Partition {
        &self.content
    }

    /// The rows of the filling.
    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    /// Entries of column j, top to bottom.
    pub fn column(&self, j: usize) -> Vec<u32> {
        self.rows.iter().filter_map(|row| row.get(j).copied()).collect()
    }

    /// True iff rows weakly increase and columns strictly increase.
    pub fn is_semistandard(&self) -> bool {
        for row in &self.rows {
            if row.windows(2).any(|w| w[0] > w[1]) {
                return false;
            }
        }
        let cols = self.shape.parts().first().copied().unwrap_or(0) as usize;
        for j in 0..cols {
            let col = self.column(j);
            if col.windows(2).any(|w| w[0] >= w[1]) {
                return false;
            }
        }
        true
    }
}

impl fmt::Display for GeneralizedTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_rows(f, &self.rows)
    }
}

/// All semistandard tableaux of shape λ and content μ, in lexicographic order
/// of the row-reading word.
pub fn semistandard_tableaux(
    lambda: &Partition,
    mu: &Partition,
) -> Result<Vec<GeneralizedTableau>, CombError> {
    if lambda.weight() != mu.weight() {
        return Err(CombError::WeightMismatch(lambda.weight(), mu.weight()));
    }
    let mut out = Vec::new();
    if lambda.weight() == 0 {
        out.push(GeneralizedTableau {
            shape: lambda.clone(),
            content: mu.clone(),
            rows: Vec::new(),
        });
        return Ok(out);
    }
    if !dominates(lambda, mu)? {
        return Ok(out);
    }
    let shape: Vec<usize> = lambda.parts().iter().map(|&p| p as usize).collect();
    let mut remaining: Vec<u32> = mu.parts().to_vec();
    let mut rows: Vec<Vec<u32>> = shape.iter().map(|&len| Vec::with_capacity(len)).collect();

    fn fill(
        shape: &[usize],
        remaining: &mut Vec<u32>,
        rows: &mut Vec<Vec<u32>>,
        i: usize,
        j: usize,
        lambda: &Partition,
        mu: &Partition,
        out: &mut Vec<GeneralizedTableau>,
    ) {
        if i == shape.len() {
            out.push(GeneralizedTableau {
                shape: lambda.clone(),
                content: mu.clone(),
                rows: rows.clone(),
            });
            return;
        }
        let (ni, nj) = if j + 1 < shape[i] { (i, j + 1) } else { (i + 1, 0) };
        let min_left = if j > 0 { rows[i][j - 1] } else { 1 };
        let min_above = if i > 0 && rows[i - 1].len() > j {
            rows[i - 1][j] + 1
        } else {
            1
        };
        let lo = min_left.max(min_above);
        for v in lo..=(remaining.len() as u32) {
            if remaining[(v - 1) as usize] == 0 {
                continue;
            }
            remaining[(v - 1) as usize] -= 1;
            rows[i].push(v);
            fill(shape, remaining, rows, ni, nj, lambda, mu, out);
            rows[i].pop();
            remaining[(v - 1) as usize] += 1;
        }
    }

    fill(&shape, &mut remaining, &mut rows, 0, 0, lambda, mu, &mut out);
    Ok(out)
}

/// Kostka number K_{λμ}: the number of semistandard tableaux of shape λ and
/// content μ; zero unless λ ⊵ μ.
pub fn kostka(lambda: &Partition, mu: &Partition) -> Result<u64, CombError> {
    Ok(semistandard_tableaux(lambda, mu)?.len() as u64)
}

/// The row-wise filling t_λ: 1..n placed row by row (rows and columns
/// increase).
pub fn row_wise_tableau(lambda: &Partition) -> Tableau {
    let mut rows = Vec::with_capacity(lambda.len());
    let mut next = 1u32;
    for &p in lambda.parts() {
        rows.push((next..next + p).collect());
        next += p;
    }
    Tableau { shape: lambda.clone(), rows }
}

/// All standard tableaux of shape λ, in lexicographic order of the
/// row-reading word; the first element is the row-wise filling t_λ.
pub fn standard_tableaux(lambda: &Partition) -> Vec<Tableau> {
    let n = lambda.weight();
    let shape: Vec<usize> = lambda.parts().iter().map(|&p| p as usize).collect();
    let mut out = Vec::new();
    if n == 0 {
        out.push(Tableau { shape: lambda.clone(), rows: Vec::new() });
        return out;
    }
    let mut rows: Vec<Vec<u32>> = shape.iter().map(|&len| Vec::with_capacity(len)).collect();
    let mut used = vec![false; n as usize];

    fn fill(
        shape: &[usize],
        used: &mut Vec<bool>,
        rows: &mut Vec<Vec<u32>>,
        i: usize,
        j: usize,
        lambda: &Partition,
        out: &mut Vec<Tableau>,
    ) {
        if i == shape.len() {
            out.push(Tableau { shape: lambda.clone(), rows: rows.clone() });
            return;
        }
        let (ni, nj) = if j + 1 < shape[i] { (i, j + 1) } else { (i + 1, 0) };
        let min_left = if j > 0 { rows[i][j - 1] + 1 } else { 1 };
        let min_above = if i > 0 { rows[i - 1][j] + 1 } else { 1 };
        for v in min_left.max(min_above)..=(used.len() as u32) {
            if used[(v - 1) as usize] {
                continue;
            }
            used[(v - 1) as usize] = true;
            rows[i].push(v);
            fill(shape, used, rows, ni, nj, lambda, out);
            rows[i].pop();
            used[(v - 1) as usize] = false;
        }
    }

    fill(&shape, &mut used, &mut rows, 0, 0, lambda, &mut out);
    out
}

/// Number of standard tableaux of shape λ (hook length formula); equals
/// `standard_tableaux(λ).len()` but stays cheap for large shapes.
pub fn standard_tableau_count(lambda: &Partition) -> BigUint {
    let n = lambda.weight();
    let conj = lambda.conjugate();
    let mut numer = BigUint::one();
    for v in 1..=n {
        numer *= BigUint::from(v);
    }
    let mut denom = BigUint::one();
    for (i, &p) in lambda.parts().iter().enumerate() {
        for j in 0..p as usize {
            let hook = (p as usize - j) + (conj.parts()[j] as usize - i) - 1;
            denom *= BigUint::from(hook);
        }
    }
    if denom.is_zero() {
        return BigUint::one();
    }
    numer / denom
}

/// The Specht polynomial s_t: the product over columns of the Vandermonde
/// determinant in the column's variables.
pub fn specht_polynomial(t: &Tableau) -> Result<Polynomial, CombError> {
    let n = t.shape().weight() as usize;
    if n == 0 {
        return Err(CombError::BadTableau("empty tableau".into()));
    }
    let cols = t.shape().parts().first().copied().unwrap_or(0) as usize;
    let mut out = Polynomial::one(n);
    for j in 0..cols {
        let col = t.column(j);
        for a in 0..col.len() {
            for b in (a + 1)..col.len() {
                let diff = &Polynomial::var(n, col[b] as usize)
                    - &Polynomial::var(n, col[a] as usize);
                out = &out * &diff;
            }
        }
    }
    Ok(out)
}

/// The generalized Specht polynomial S_{(t,T)}.
///
/// Each column contributes a generalized Vandermonde determinant: variables
/// X_c for the column's t-entries, exponents b_{T(i,j)} sorted ascending down
/// the determinant's rows. The products over columns give s_{(t,T)}; the
/// returned polynomial sums the distinct images of s_{(t,T)} under the row
/// stabilizer of t.
pub fn generalized_specht(
    t: &Tableau,
    tt: &GeneralizedTableau,
    parts_b: &[u32],
) -> Result<Polynomial, CombError> {
    if t.shape() != tt.shape() {
        return Err(CombError::BadTableau(format!(
            "shape mismatch: {} vs {}",
            t.shape(),
            tt.shape()
        )));
    }
    if tt.content().len() > parts_b.len() {
        return Err(CombError::BadTableau(format!(
            "content {} needs {} exponent values, got {}",
            tt.content(),
            tt.content().len(),
            parts_b.len()
        )));
    }
    let n = t.shape().weight() as usize;
    let cols = t.shape().parts().first().copied().unwrap_or(0) as usize;
    let mut base = Polynomial::one(n);
    for j in 0..cols {
        let cells = t.column(j);
        let mut exps: Vec<u32> = tt
            .column(j)
            .iter()
            .map(|&v| parts_b[(v - 1) as usize])
            .collect();
        exps.sort_unstable();
        base = &base * &generalized_vandermonde(n, &cells, &exps);
        if base.is_zero() {
            return Ok(base);
        }
    }
    // Distinct images under the row stabilizer of t, keyed by exact rendering.
    let mut images: BTreeMap<String, Polynomial> = BTreeMap::new();
    for sigma in row_stabilizer(t) {
        let image = base.act(&sigma)?;
        images.entry(image.to_string()).or_insert(image);
    }
    let mut out = Polynomial::zero(n);
    for image in images.into_values() {
        out = &out + &image;
    }
    Ok(out)
}

/// det [ X_{cells[i]}^{exps[u]} ]_{u,i} expanded by the Leibniz rule.
fn generalized_vandermonde(n: usize, cells: &[u32], exps: &[u32]) -> Polynomial {
    let r = cells.len();
    debug_assert_eq!(r, exps.len());
    let mut out = Polynomial::zero(n);
    let mut perm: Vec<usize> = (0..r).collect();
    loop {
        let mut sign = 1i64;
        for a in 0..r {
            for b in (a + 1)..r {
                if perm[a] > perm[b] {
                    sign = -sign;
                }
            }
        }
        let mut exps_vec = vec![0u32; n];
        for (u, &i) in perm.iter().enumerate() {
            exps_vec[(cells[i] - 1) as usize] += exps[u];
        }
        out = &out + &Polynomial::from_terms(n, vec![(exps_vec, rat(sign))]);
        if !next_permutation(&mut perm) {
            break;
        }
    }
    out
}

fn next_permutation(perm: &mut [usize]) -> bool {
    let len = perm.len();
    if len < 2 {
        return false;
    }
    let mut i = len - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = len - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// All permutations fixing each row of t setwise.
fn row_stabilizer(t: &Tableau) -> Vec<Perm> {
    let n = t.shape().weight() as usize;
    let mut perms = vec![Perm::identity(n)];
    for row in t.rows() {
        let cells: Vec<usize> = row.iter().map(|&v| v as usize).collect();
        let mut arrangement: Vec<usize> = (0..cells.len()).collect();
        let mut row_perms = Vec::new();
        loop {
            let mut images: Vec<usize> = (1..=n).collect();
            for (slot, &idx) in arrangement.iter().enumerate() {
                images[cells[slot] - 1] = cells[idx];
            }
            row_perms.push(Perm::from_images(&images).expect("valid permutation"));
            if !next_permutation(&mut arrangement) {
                break;
            }
        }
        let mut next = Vec::with_capacity(perms.len() * row_perms.len());
        for p in &perms {
            for q in &row_perms {
                next.push(p.compose(q));
            }
        }
        perms = next;
    }
    perms
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::{monomial_orbit, rational_rank, Group, Rational};
    use num_traits::ToPrimitive;

    fn part(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec())
    }

    #[test]
    fn partition_enumeration_reverse_lex() {
        let got = partitions(4, 4);
        let expected: Vec<Partition> = vec![
            part(&[4]),
            part(&[3, 1]),
            part(&[2, 2]),
            part(&[2, 1, 1]),
            part(&[1, 1, 1, 1]),
        ];
        assert_eq!(got, expected);
        assert_eq!(partitions(0, 5), vec![Partition::empty()]);
        assert_eq!(partitions(4, 2), vec![part(&[4]), part(&[3, 1]), part(&[2, 2])]);
    }

    #[test]
    fn partition_order_matches_enumeration() {
        let mut all = partitions(4, 4);
        all.extend(partitions(3, 3));
        let mut sorted = all.clone();
        sorted.sort();
        let expected: Vec<Partition> = partitions(3, 3).into_iter().chain(partitions(4, 4)).collect();
        assert_eq!(sorted, expected);
    }

    #[test]
    fn dominance_examples() {
        assert!(dominates(&part(&[3]), &part(&[2, 1])).unwrap());
        assert!(!dominates(&part(&[2, 1]), &part(&[3])).unwrap());
        assert!(dominates(&part(&[2, 2]), &part(&[2, 1, 1])).unwrap());
        assert!(dominates(&part(&[2, 2]), &part(&[2, 2])).unwrap());
        assert!(dominates(&part(&[3]), &part(&[4])).is_err());
    }

    #[test]
    fn shapes_of_exponent_vectors() {
        let shape = shape_of(&Monomial::new(vec![2, 0, 0]));
        assert_eq!(shape.shape_mu, part(&[2, 1]));
        assert_eq!(shape.parts_b, vec![0, 2]);

        let shape = shape_of(&Monomial::new(vec![0, 0, 0]));
        assert_eq!(shape.shape_mu, part(&[3]));
        assert_eq!(shape.parts_b, vec![0]);

        let shape = shape_of(&Monomial::new(vec![1, 1, 0]));
        assert_eq!(shape.shape_mu, part(&[2, 1]));
        assert_eq!(shape.parts_b, vec![1, 0]);
    }

    #[test]
    fn kostka_examples() {
        assert_eq!(kostka(&part(&[2, 1]), &part(&[2, 1])).unwrap(), 1);
        assert_eq!(kostka(&part(&[2, 1]), &part(&[1, 1, 1])).unwrap(), 2);
        assert_eq!(kostka(&part(&[1, 1, 1]), &part(&[2, 1])).unwrap(), 0);
    }

    #[test]
    fn standard_tableaux_examples() {
        let t = standard_tableaux(&part(&[2, 1]));
        assert_eq!(t.len(), 2);
        assert_eq!(t[0], row_wise_tableau(&part(&[2, 1])));
        assert_eq!(t[0].to_string(), "[[1,2],[3]]");
        assert_eq!(t[1].to_string(), "[[1,3],[2]]");

        assert_eq!(standard_tableaux(&part(&[4])).len(), 1);
        assert_eq!(standard_tableaux(&part(&[2, 2])).len(), 2);
        for t in standard_tableaux(&part(&[3, 2, 1])) {
            assert!(t.is_standard());
        }
    }

    #[test]
    fn hook_length_matches_enumeration() {
        for n in 1..=6u32 {
            for lambda in partitions(n, n as usize) {
                let count = standard_tableaux(&lambda).len();
                assert_eq!(
                    standard_tableau_count(&lambda),
                    BigUint::from(count),
                    "λ={lambda}"
                );
            }
        }
    }

    #[test]
    fn specht_examples() {
        let t = Tableau::new(part(&[1, 1]), vec![vec![1], vec![2]]).unwrap();
        assert_eq!(specht_polynomial(&t).unwrap().to_string(), "-x1 + x2");

        let t = Tableau::new(part(&[2, 1]), vec![vec![1, 3], vec![2]]).unwrap();
        assert_eq!(specht_polynomial(&t).unwrap().to_string(), "-x1 + x2");

        let t = row_wise_tableau(&part(&[3]));
        assert_eq!(specht_polynomial(&t).unwrap().to_string(), "1");
    }

    #[test]
    fn specht_span_has_rank_f_lambda() {
        for n in 2..=5u32 {
            for lambda in partitions(n, n as usize) {
                let tableaux = standard_tableaux(&lambda);
                let polys: Vec<Polynomial> = tableaux
                    .iter()
                    .map(|t| specht_polynomial(t).unwrap())
                    .collect();
                // Coefficient matrix over the union of monomials.
                let mut monomials: Vec<Monomial> = Vec::new();
                for p in &polys {
                    for (m, _) in p.terms() {
                        if !monomials.contains(m) {
                            monomials.push(m.clone());
                        }
                    }
                }
                let rows: Vec<Vec<Rational>> = polys
                    .iter()
                    .map(|p| monomials.iter().map(|m| p.coeff(m)).collect())
                    .collect();
                assert_eq!(rational_rank(rows), tableaux.len(), "λ={lambda}");
            }
        }
    }

    #[test]
    fn dimension_identity_kostka_times_f() {
        for n in 1..=6u32 {
            for mu in partitions(n, n as usize) {
                let mut total = BigUint::zero();
                for lambda in partitions(n, n as usize) {
                    let k = kostka(&lambda, &mu).unwrap();
                    total += BigUint::from(k) * standard_tableau_count(&lambda);
                }
                let mut expected = BigUint::one();
                for v in 1..=n {
                    expected *= BigUint::from(v);
                }
                for &p in mu.parts() {
                    for v in 1..=p {
                        expected /= BigUint::from(v);
                    }
                }
                assert_eq!(total, expected, "μ={mu}");
            }
        }
    }

    #[test]
    fn kostka_positive_iff_dominant() {
        for n in 1..=6u32 {
            for lambda in partitions(n, n as usize) {
                for mu in partitions(n, n as usize) {
                    let k = kostka(&lambda, &mu).unwrap();
                    let dom = dominates(&lambda, &mu).unwrap();
                    assert_eq!(k > 0, dom, "λ={lambda} μ={mu}");
                }
            }
        }
    }

    #[test]
    fn generalized_specht_reproduces_paper_style_basis() {
        // β=(1,0,0): shape (2,1), values b=(0,1).
        let shape = shape_of(&Monomial::new(vec![1, 0, 0]));
        assert_eq!(shape.shape_mu, part(&[2, 1]));
        let t = row_wise_tableau(&part(&[2, 1]));
        let ssyt = semistandard_tableaux(&part(&[2, 1]), &shape.shape_mu).unwrap();
        assert_eq!(ssyt.len(), 1);
        let s = generalized_specht(&t, &ssyt[0], &shape.parts_b).unwrap();
        assert_eq!(s.to_string(), "-x1 - x2 + 2*x3");

        // Single-row λ builds the monomial orbit sums.
        let t3 = row_wise_tableau(&part(&[3]));
        let ssyt3 = semistandard_tableaux(&part(&[3]), &shape.shape_mu).unwrap();
        assert_eq!(ssyt3.len(), 1);
        let s3 = generalized_specht(&t3, &ssyt3[0], &shape.parts_b).unwrap();
        assert_eq!(s3.to_string(), "x1 + x2 + x3");

        // λ=(1,1), n=2, β=(1,0): plain 2×2 Vandermonde.
        let shape2 = shape_of(&Monomial::new(vec![1, 0]));
        let t2 = row_wise_tableau(&part(&[1, 1]));
        let ssyt2 = semistandard_tableaux(&part(&[1, 1]), &shape2.shape_mu).unwrap();
        assert_eq!(ssyt2.len(), 1);
        let s2 = generalized_specht(&t2, &ssyt2[0], &shape2.parts_b).unwrap();
        assert_eq!(s2.to_string(), "-x1 + x2");
    }

    #[test]
    fn generalized_specht_supported_on_orbit() {
        for n in 2..=5usize {
            for d in 0..=4u32 {
                for delta in partitions(d, n) {
                    let mut exps = vec![0u32; n];
                    exps[..delta.len()].copy_from_slice(delta.parts());
                    let beta = Monomial::new(exps);
                    let shape = shape_of(&beta);
                    let pattern = beta.pattern();
                    for lambda in partitions(n as u32, n) {
                        if !dominates(&lambda, &shape.shape_mu).unwrap() {
                            continue;
                        }
                        let t = row_wise_tableau(&lambda);
                        for tt in semistandard_tableaux(&lambda, &shape.shape_mu).unwrap() {
                            let s = generalized_specht(&t, &tt, &shape.parts_b).unwrap();
                            for (m, _) in s.terms() {
                                assert_eq!(m.pattern(), pattern, "λ={lambda} β={beta:?}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn generalized_specht_images_span_the_orbit_space() {
        // The symmetrized Specht constructions, moved around by the group,
        // span the full span of the monomial orbit.
        for n in 2..=5usize {
            for d in 1..=4u32 {
                for delta in partitions(d, n) {
                    let mut exps = vec![0u32; n];
                    exps[..delta.len()].copy_from_slice(delta.parts());
                    let beta = Monomial::new(exps);
                    let shape = shape_of(&beta);
                    let orbit = monomial_orbit(&delta, n).unwrap();
                    let mut rows: Vec<Vec<Rational>> = Vec::new();
                    for lambda in partitions(n as u32, n) {
                        if !dominates(&lambda, &shape.shape_mu).unwrap() {
                            continue;
                        }
                        let t = row_wise_tableau(&lambda);
                        for tt in semistandard_tableaux(&lambda, &shape.shape_mu).unwrap() {
                            let s = generalized_specht(&t, &tt, &shape.parts_b).unwrap();
                            // Move the polynomial around by coset representatives:
                            // every permutation image is a row candidate.
                            let mut stack = vec![s.clone()];
                            let gens = [
                                Perm::transposition(n, 1, 2.min(n)),
                                Perm::cycle(n),
                            ];
                            let mut seen = std::collections::BTreeSet::new();
                            while let Some(pcur) = stack.pop() {
                                let key = pcur.to_string();
                                if !seen.insert(key) {
                                    continue;
                                }
                                rows.push(
                                    orbit.iter().map(|m| pcur.coeff(m)).collect(),
                                );
                                for g in &gens {
                                    stack.push(pcur.act(g).unwrap());
                                }
                            }
                        }
                    }
                    assert_eq!(
                        rational_rank(rows),
                        orbit.len(),
                        "β={beta:?} orbit not spanned"
                    );
                }
            }
        }
    }

    #[test]
    fn semistandard_rejects_weight_mismatch() {
        assert!(semistandard_tableaux(&part(&[2]), &part(&[1, 1, 1])).is_err());
    }

    #[test]
    fn kostka_row_scale_sanity() {
        // Multiplicity of the trivial component in a hook-content module.
        assert_eq!(kostka(&part(&[3]), &part(&[2, 1])).unwrap(), 1);
        assert_eq!(kostka(&part(&[3]), &part(&[1, 1, 1])).unwrap(), 1);
        assert_eq!(kostka(&part(&[2, 1]), &part(&[2, 1])).unwrap(), 1);
        // Sanity against a direct f64 conversion of a count.
        assert_eq!(standard_tableau_count(&part(&[3, 2, 1])).to_u64().unwrap(), 16);
    }

    #[test]
    fn reynolds_of_specht_vanishes_for_nontrivial_shapes() {
        // Specht polynomials for λ ≠ (n) carry no invariant component.
        for lambda in [part(&[2, 1]), part(&[1, 1, 1])] {
            let t = row_wise_tableau(&lambda);
            let s = specht_polynomial(&t).unwrap();
            assert!(s.reynolds(Group::Sn).is_zero(), "λ={lambda}");
        }
    }
}
