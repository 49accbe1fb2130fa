//! Symmetry-adapted moment and localizing blocks: one block per
//! irreducible component, with entries that are exact affine forms in a
//! reduced set of moment variables. Symmetric-group blocks come from
//! generalized Specht representatives; cyclic-group blocks from a real
//! discrete-Fourier basis.

use crate::polyring::{rat, to_f64, Group, Monomial, PolyError, Polynomial, Rational};
use crate::sdpcore::{self, ConstraintKind, SdpProblem};
use crate::symcomb::{
    kostka, partitions, row_wise_tableau, semistandard_tableaux, shape_of,
    standard_tableau_count, Partition,
};
use nalgebra::DMatrix;
use num_bigint::BigUint;
use num_traits::Zero;
use std::collections::BTreeMap;
use std::fmt;

/// Errors from symmetry-adapted construction.
#[derive(Debug, thiserror::Error)]
pub enum AdaptError {
    /// Underlying polynomial-ring failure.
    #[error(transparent)]
    Poly(#[from] PolyError),
    /// Requested order below the minimum forced by the input degrees.
    #[error("relaxation order {k} is below the minimum k0 = {k0}")]
    OrderTooSmall { k: usize, k0: usize },
    /// Input must be invariant under the declared group action.
    #[error("polynomial is not invariant under the declared symmetry: {0}")]
    NotInvariant(String),
}

/// Name of a reduced moment variable: a weight pattern for the symmetric
/// group, a cyclic-orbit representative monomial for the cyclic group.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum MomentIndex {
    /// y_λ = L(X^β) for any monomial with exponent pattern λ.
    Sn(Partition),
    /// y_m = L(X^m) for the lexicographically least cyclic shift m.
    Cn(Monomial),
}

impl MomentIndex {
    /// Canonical index of a monomial under the group action; `None` for
    /// the constant monomial.
    pub fn of_monomial(m: &Monomial, group: Group) -> Option<MomentIndex> {
        if m.degree() == 0 {
            return None;
        }
        match group {
            Group::Sn => {
                let mut parts: Vec<u32> =
                    m.exponents().iter().cloned().filter(|&e| e > 0).collect();
                parts.sort_unstable_by(|a, b| b.cmp(a));
                Some(MomentIndex::Sn(Partition::new(parts)))
            }
            Group::Cn => Some(MomentIndex::Cn(cyclic_canonical(m))),
        }
    }
}

impl fmt::Display for MomentIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MomentIndex::Sn(lambda) => {
                let parts: Vec<String> =
                    lambda.parts().iter().map(|p| p.to_string()).collect();
                write!(f, "y({})", parts.join(","))
            }
            MomentIndex::Cn(m) => {
                let exps: Vec<String> =
                    m.exponents().iter().map(|e| e.to_string()).collect();
                write!(f, "y[{}]", exps.join(","))
            }
        }
    }
}

/// Lexicographically least cyclic shift of a monomial's exponent vector.
pub fn cyclic_canonical(m: &Monomial) -> Monomial {
    let n = m.n_vars();
    let exps = m.exponents();
    let mut best: Vec<u32> = exps.to_vec();
    for j in 1..n {
        let mut cand = vec![0u32; n];
        for (i, &e) in exps.iter().enumerate() {
            cand[(i + j) % n] = e;
        }
        if cand < best {
            best = cand;
        }
    }
    Monomial::new(best)
}

fn rotate_monomial(m: &Monomial, j: usize) -> Monomial {
    let n = m.n_vars();
    let mut exps = vec![0u32; n];
    for (i, &e) in m.exponents().iter().enumerate() {
        exps[(i + j) % n] = e;
    }
    Monomial::new(exps)
}

/// Exact affine form in the reduced moment variables.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMomentForm {
    /// Contribution of the normalized constant moment.
    pub constant: Rational,
    /// Coefficients on the reduced moment variables.
    pub terms: BTreeMap<MomentIndex, Rational>,
}

impl LinearMomentForm {
    /// The zero form.
    pub fn zero() -> Self {
        LinearMomentForm {
            constant: Rational::zero(),
            terms: BTreeMap::new(),
        }
    }

    /// Apply the invariant moment functional to a polynomial: each
    /// monomial contributes its coefficient to the variable naming its
    /// orbit.
    pub fn from_poly(p: &Polynomial, group: Group) -> Self {
        let mut form = LinearMomentForm::zero();
        for (m, c) in p.terms() {
            match MomentIndex::of_monomial(m, group) {
                None => form.constant += c.clone(),
                Some(idx) => {
                    let e = form.terms.entry(idx).or_insert_with(Rational::zero);
                    *e += c.clone();
                }
            }
        }
        form.terms.retain(|_, c| !c.is_zero());
        form
    }

    /// Evaluate under an assignment of the moment variables.
    pub fn eval_with(&self, y: &dyn Fn(&MomentIndex) -> f64) -> f64 {
        to_f64(&self.constant)
            + self
                .terms
                .iter()
                .map(|(idx, c)| to_f64(c) * y(idx))
                .sum::<f64>()
    }

    /// Translate into an index-resolved affine form for SDP assembly.
    pub fn resolve(&self, registry: &MomentRegistry) -> sdpcore::MomentForm {
        let mut terms: Vec<(usize, Rational)> = self
            .terms
            .iter()
            .map(|(idx, c)| {
                (
                    registry
                        .index(idx)
                        .unwrap_or_else(|| panic!("unregistered moment variable {idx}")),
                    c.clone(),
                )
            })
            .collect();
        terms.sort_by_key(|(i, _)| *i);
        sdpcore::MomentForm {
            constant: self.constant.clone(),
            terms,
        }
    }
}

impl fmt::Display for LinearMomentForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut write_term = |f: &mut fmt::Formatter<'_>,
                              c: &Rational,
                              label: Option<String>|
         -> fmt::Result {
            let negative = c < &Rational::zero();
            let abs = if negative { -c.clone() } else { c.clone() };
            if first {
                if negative {
                    write!(f, "-")?;
                }
                first = false;
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            match label {
                None => write!(f, "{abs}")?,
                Some(l) => {
                    if abs == rat(1) {
                        write!(f, "{l}")?;
                    } else {
                        write!(f, "{abs}*{l}")?;
                    }
                }
            }
            Ok(())
        };
        if !self.constant.is_zero() {
            write_term(f, &self.constant, None)?;
        }
        for (idx, c) in &self.terms {
            write_term(f, c, Some(idx.to_string()))?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Deterministic numbering of the reduced moment variables up to a degree.
#[derive(Debug, Clone)]
pub struct MomentRegistry {
    group: Group,
    n: usize,
    max_degree: u32,
    order: Vec<MomentIndex>,
    map: BTreeMap<MomentIndex, usize>,
}

impl MomentRegistry {
    /// Register every moment variable of degree 1..=max_degree.
    pub fn new(group: Group, n: usize, max_degree: u32) -> Self {
        let mut order = Vec::new();
        match group {
            Group::Sn => {
                for d in 1..=max_degree {
                    for lambda in partitions(d, n) {
                        order.push(MomentIndex::Sn(lambda));
                    }
                }
            }
            Group::Cn => {
                for d in 1..=max_degree {
                    for m in sdpcore::monomials_of_degree(n, d) {
                        if cyclic_canonical(&m) == m {
                            order.push(MomentIndex::Cn(m));
                        }
                    }
                }
            }
        }
        let map = order
            .iter()
            .enumerate()
            .map(|(i, idx)| (idx.clone(), i))
            .collect();
        MomentRegistry {
            group,
            n,
            max_degree,
            order,
            map,
        }
    }

    /// Group whose orbits the variables index.
    pub fn group(&self) -> Group {
        self.group
    }

    /// Ambient variable count of the polynomial ring.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Largest registered moment degree.
    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    /// Number of moment variables.
    pub fn len(&self) -> usize {
        self.order.len()
    }

    /// True when no variable is registered.
    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Index of a moment variable.
    pub fn index(&self, idx: &MomentIndex) -> Option<usize> {
        self.map.get(idx).copied()
    }

    /// Variables in index order.
    pub fn variables(&self) -> &[MomentIndex] {
        &self.order
    }
}

/// Label of one symmetry-adapted block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BlockLabel {
    /// Isotypic component of the symmetric group, named by its shape.
    Shape(Partition),
    /// Cyclic-group character component (cos/sin split where complex
    /// characters pair up).
    Character { l: usize, part: CharPart },
}

/// Real bookkeeping of a cyclic character.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CharPart {
    /// Character already real (l = 0 or l = n/2).
    Real,
    /// Cosine combination of a conjugate pair.
    Cos,
    /// Sine combination of a conjugate pair.
    Sin,
}

impl fmt::Display for BlockLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockLabel::Shape(lambda) => write!(f, "{lambda}"),
            BlockLabel::Character { l, part } => match part {
                CharPart::Real => write!(f, "chi{l}"),
                CharPart::Cos => write!(f, "chi{l}+"),
                CharPart::Sin => write!(f, "chi{l}-"),
            },
        }
    }
}

/// One block: its label, side length, representative polynomials, and the
/// multiplicity of the underlying irreducible in the degree-k space.
#[derive(Debug, Clone)]
pub struct BlockSpec {
    /// Block label.
    pub label: BlockLabel,
    /// Side length (number of representatives).
    pub size: usize,
    /// Multiplicity of the irreducible component (1 for cyclic blocks).
    pub multiplicity: BigUint,
    /// Representative polynomials spanning one copy of each irreducible.
    pub representatives: Vec<Polynomial>,
}

/// The full block layout of a symmetry-adapted relaxation at one order.
#[derive(Debug, Clone)]
pub struct BlockStructure {
    /// Acting group.
    pub group: Group,
    /// Number of ring variables.
    pub n: usize,
    /// Relaxation order.
    pub k: usize,
    /// Blocks with nonzero size, in deterministic order.
    pub blocks: Vec<BlockSpec>,
}

impl BlockStructure {
    /// Multiset of block sizes, descending.
    pub fn sizes(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.blocks.iter().map(|b| b.size).collect();
        s.sort_unstable_by(|a, b| b.cmp(a));
        s
    }

    /// Number of reduced moment variables at order 2k.
    pub fn moment_variable_count(&self) -> usize {
        moment_variable_count(self.group, self.n, self.k)
    }
}

/// Number of reduced moment variables of degree 1..=2k.
pub fn moment_variable_count(group: Group, n: usize, k: usize) -> usize {
    MomentRegistry::new(group, n, 2 * k as u32).len()
}

/// Shapes λ of n that can carry a nonzero block at order k: the first row
/// holds at least n − k cells.
fn candidate_shapes(n: usize, k: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    for t in 0..=k.min(n.saturating_sub(1)) {
        let head = (n - t) as u32;
        for rest in partitions(t as u32, n) {
            if rest.parts().first().map_or(true, |&p| p <= head) {
                let mut parts = vec![head];
                parts.extend_from_slice(rest.parts());
                out.push(Partition::new(parts));
            }
        }
    }
    out
}

/// Multiplicity partition of a weight pattern padded with zeros to n
/// entries, together with its exponent values (multiplicity-major).
fn padded_shape(delta: &Partition, n: usize) -> (Partition, Vec<u32>) {
    let mut exps: Vec<u32> = delta.parts().to_vec();
    exps.resize(n, 0);
    let shape = shape_of(&Monomial::new(exps));
    (shape.shape_mu, shape.parts_b)
}

/// Block sizes κ_λ at order k, without constructing representatives.
pub fn block_sizes(n: usize, k: usize) -> BTreeMap<Partition, usize> {
    let mut out = BTreeMap::new();
    for lambda in candidate_shapes(n, k) {
        let mut kappa = 0usize;
        for d in 0..=k {
            for delta in partitions(d as u32, n) {
                let (mu, _) = padded_shape(&delta, n);
                kappa += kostka(&lambda, &mu).expect("weights agree") as usize;
            }
        }
        if kappa > 0 {
            out.insert(lambda, kappa);
        }
    }
    out
}

/// Symmetric-group adapted basis at order k: for each shape, one
/// generalized Specht representative per (weight pattern, semistandard
/// filling), ordered by degree, then pattern, then filling.
pub fn sym_basis(n: usize, k: usize) -> BlockStructure {
    let mut blocks = Vec::new();
    for lambda in candidate_shapes(n, k) {
        let t = row_wise_tableau(&lambda);
        let mut reps = Vec::new();
        for d in 0..=k {
            for delta in partitions(d as u32, n) {
                let (mu, parts_b) = padded_shape(&delta, n);
                for tt in semistandard_tableaux(&lambda, &mu).expect("weights agree") {
                    let s = crate::symcomb::generalized_specht(&t, &tt, &parts_b)
                        .expect("valid tableau data");
                    reps.push(s);
                }
            }
        }
        if !reps.is_empty() {
            blocks.push(BlockSpec {
                label: BlockLabel::Shape(lambda.clone()),
                size: reps.len(),
                multiplicity: standard_tableau_count(&lambda),
                representatives: reps,
            });
        }
    }
    BlockStructure {
        group: Group::Sn,
        n,
        k,
        blocks,
    }
}

/// cos(2π a / n) exactly where rational, else in double precision.
fn char_cos(a: usize, n: usize) -> Rational {
    let g = gcd(a % n, n);
    let (p, q) = ((a % n) / g, n / g);
    match q {
        1 => rat(1),
        2 => rat(-1),
        3 => crate::polyring::ratio(-1, 2),
        4 => rat(0),
        6 => crate::polyring::ratio(1, 2),
        _ => Rational::from_float((2.0 * std::f64::consts::PI * p as f64 / q as f64).cos())
            .expect("finite cosine"),
    }
}

/// sin(2π a / n) exactly where rational, else in double precision.
fn char_sin(a: usize, n: usize) -> Rational {
    let g = gcd(a % n, n);
    let (p, q) = ((a % n) / g, n / g);
    match q {
        1 | 2 => rat(0),
        4 => {
            if p == 1 {
                rat(1)
            } else {
                rat(-1)
            }
        }
        _ => Rational::from_float((2.0 * std::f64::consts::PI * p as f64 / q as f64).sin())
            .expect("finite sine"),
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

/// Cyclic-group adapted basis at order k: for each character, one real
/// combination per compatible monomial orbit; conjugate characters split
/// into cosine and sine blocks of equal size.
pub fn cyclic_basis(n: usize, k: usize) -> BlockStructure {
    // Orbit representatives of monomials of degree <= k, with orbit sizes.
    let mut orbit_reps: Vec<(Monomial, usize)> = Vec::new();
    for d in 0..=k as u32 {
        for m in sdpcore::monomials_of_degree(n, d) {
            if cyclic_canonical(&m) == m {
                let mut size = 1;
                while rotate_monomial(&m, size) != m {
                    size += 1;
                }
                orbit_reps.push((m, size));
            }
        }
    }
    let orbit_vector = |rep: &Monomial, size: usize, weight: &dyn Fn(usize) -> Rational| {
        let mut p = Polynomial::zero(n);
        for j in 0..size {
            let w = weight(j);
            if !w.is_zero() {
                p = &p
                    + &Polynomial::from_terms(
                        n,
                        vec![(rotate_monomial(rep, j).exponents().to_vec(), w)],
                    );
            }
        }
        p
    };

    let mut blocks = Vec::new();
    let mut push_block = |label: BlockLabel, reps: Vec<Polynomial>| {
        if !reps.is_empty() {
            blocks.push(BlockSpec {
                label,
                size: reps.len(),
                multiplicity: BigUint::from(1u32),
                representatives: reps,
            });
        }
    };

    // Trivial character: plain orbit sums.
    let trivial: Vec<Polynomial> = orbit_reps
        .iter()
        .map(|(rep, size)| orbit_vector(rep, *size, &|_| rat(1)))
        .collect();
    push_block(
        BlockLabel::Character {
            l: 0,
            part: CharPart::Real,
        },
        trivial,
    );

    // Conjugate pairs l and n - l for 0 < l < n/2.
    for l in 1..n {
        if 2 * l >= n {
            break;
        }
        let compatible: Vec<&(Monomial, usize)> = orbit_reps
            .iter()
            .filter(|(_, size)| (l * size) % n == 0)
            .collect();
        let cos_reps: Vec<Polynomial> = compatible
            .iter()
            .map(|(rep, size)| orbit_vector(rep, *size, &|j| char_cos(l * j, n)))
            .collect();
        let sin_reps: Vec<Polynomial> = compatible
            .iter()
            .map(|(rep, size)| orbit_vector(rep, *size, &|j| char_sin(l * j, n)))
            .collect();
        push_block(
            BlockLabel::Character {
                l,
                part: CharPart::Cos,
            },
            cos_reps,
        );
        push_block(
            BlockLabel::Character {
                l,
                part: CharPart::Sin,
            },
            sin_reps,
        );
    }

    // Half character for even n: alternating signs, already real.
    if n % 2 == 0 && n > 1 {
        let l = n / 2;
        let reps: Vec<Polynomial> = orbit_reps
            .iter()
            .filter(|(_, size)| (l * size) % n == 0)
            .map(|(rep, size)| {
                orbit_vector(rep, *size, &|j| if j % 2 == 0 { rat(1) } else { rat(-1) })
            })
            .collect();
        push_block(
            BlockLabel::Character {
                l,
                part: CharPart::Real,
            },
            reps,
        );
    }

    BlockStructure {
        group: Group::Cn,
        n,
        k,
        blocks,
    }
}

/// Adapted basis for either group.
pub fn adapted_basis(group: Group, n: usize, k: usize) -> BlockStructure {
    match group {
        Group::Sn => sym_basis(n, k),
        Group::Cn => cyclic_basis(n, k),
    }
}

/// Moment block over a list of representatives: entry (v, w) is the moment
/// functional applied to the product of representatives v and w.
pub fn moment_block(reps: &[Polynomial], group: Group) -> Vec<Vec<LinearMomentForm>> {
    product_block(reps, None, group)
}

/// Localizing block for an invariant constraint g at order k: entries are
/// moments of rep·rep·g over representatives of degree at most
/// k − ⌈deg g / 2⌉.
pub fn localizing_block(
    g: &Polynomial,
    reps: &[Polynomial],
    group: Group,
    k: usize,
) -> Result<Vec<Vec<LinearMomentForm>>, AdaptError> {
    if !g.is_invariant(group) {
        return Err(AdaptError::NotInvariant(g.to_string()));
    }
    let d = (g.degree() as usize).div_ceil(2);
    if k < d {
        return Err(AdaptError::OrderTooSmall { k, k0: d });
    }
    let limit = (k - d) as u32;
    let filtered: Vec<Polynomial> = reps
        .iter()
        .filter(|r| r.degree() <= limit)
        .cloned()
        .collect();
    Ok(product_block(&filtered, Some(g), group))
}

fn product_block(
    reps: &[Polynomial],
    weight: Option<&Polynomial>,
    group: Group,
) -> Vec<Vec<LinearMomentForm>> {
    let m = reps.len();
    let mut forms = vec![vec![LinearMomentForm::zero(); m]; m];
    for v in 0..m {
        for w in v..m {
            let mut p = &reps[v] * &reps[w];
            if let Some(g) = weight {
                p = &p * g;
            }
            let form = LinearMomentForm::from_poly(&p, group);
            forms[v][w] = form.clone();
            forms[w][v] = form;
        }
    }
    forms
}

/// Realize a matrix of moment forms at a moment assignment.
pub fn eval_block(
    forms: &[Vec<LinearMomentForm>],
    y: &dyn Fn(&MomentIndex) -> f64,
) -> DMatrix<f64> {
    let m = forms.len();
    DMatrix::from_fn(m, m, |i, j| forms[i][j].eval_with(y))
}

/// Coordinates of every representative in the dense monomial basis of
/// degree <= k (constant first, then degrees ascending, graded-lex); rows
/// follow block order. Congruence: rows · dense moment matrix · rowsᵀ
/// equals the direct sum of the adapted blocks for any invariant moment
/// assignment.
pub fn basis_change_matrix(structure: &BlockStructure) -> DMatrix<f64> {
    let n = structure.n;
    let mut dense_basis = vec![Monomial::constant(n)];
    for d in 1..=structure.k as u32 {
        dense_basis.extend(sdpcore::monomials_of_degree(n, d));
    }
    let col_of: BTreeMap<&Monomial, usize> = dense_basis
        .iter()
        .enumerate()
        .map(|(i, m)| (m, i))
        .collect();
    let rows: Vec<&Polynomial> = structure
        .blocks
        .iter()
        .flat_map(|b| b.representatives.iter())
        .collect();
    let mut p = DMatrix::zeros(rows.len(), dense_basis.len());
    for (r, poly) in rows.iter().enumerate() {
        for (m, c) in poly.terms() {
            let col = col_of
                .get(m)
                .unwrap_or_else(|| panic!("representative exceeds degree {}", structure.k));
            p[(r, *col)] = to_f64(c);
        }
    }
    p
}

/// A fully assembled symmetry-adapted relaxation.
#[derive(Debug, Clone)]
pub struct BlockRelaxation {
    /// Block layout used for the moment blocks.
    pub structure: BlockStructure,
    /// Moment functional applied to the objective.
    pub objective: LinearMomentForm,
    /// Moment blocks per label.
    pub moment_blocks: Vec<(BlockLabel, Vec<Vec<LinearMomentForm>>)>,
    /// Localizing blocks per inequality constraint, per label.
    pub localizing_blocks: Vec<(Polynomial, Vec<(BlockLabel, Vec<Vec<LinearMomentForm>>)>)>,
    /// Affine moment equalities (= 0) from equality constraints.
    pub equalities: Vec<LinearMomentForm>,
    /// Variable numbering for SDP assembly.
    pub registry: MomentRegistry,
}

impl BlockRelaxation {
    /// Number of reduced moment variables.
    pub fn moment_variable_count(&self) -> usize {
        self.registry.len()
    }

    /// Assemble the SDP: minimize the objective form over PSD moment and
    /// localizing blocks with the constant moment pinned to 1.
    pub fn to_sdp(&self) -> SdpProblem {
        let var_count = self.registry.len();
        let mut problem = SdpProblem::new(var_count);
        let obj = self.objective.resolve(&self.registry);
        problem.objective_constant = to_f64(&obj.constant);
        for (i, c) in &obj.terms {
            problem.objective[*i] = to_f64(c);
        }
        let push_forms = |problem: &mut SdpProblem, forms: &[Vec<LinearMomentForm>]| {
            if forms.is_empty() {
                return;
            }
            let resolved: Vec<Vec<sdpcore::MomentForm>> = forms
                .iter()
                .map(|row| row.iter().map(|f| f.resolve(&self.registry)).collect())
                .collect();
            problem
                .blocks
                .push(sdpcore::block_from_forms(&resolved, var_count));
        };
        for (_, forms) in &self.moment_blocks {
            push_forms(&mut problem, forms);
        }
        for (_, per_label) in &self.localizing_blocks {
            for (_, forms) in per_label {
                push_forms(&mut problem, forms);
            }
        }
        for eq in &self.equalities {
            let resolved = eq.resolve(&self.registry);
            problem
                .equalities
                .push(sdpcore::affine_from_form(&resolved, var_count));
        }
        problem
    }
}

/// Build the symmetry-adapted relaxation of order k for minimizing an
/// invariant objective subject to invariant constraints.
pub fn build_relaxation(
    f: &Polynomial,
    constraints: &[(Polynomial, ConstraintKind)],
    n: usize,
    k: usize,
    group: Group,
) -> Result<BlockRelaxation, AdaptError> {
    if f.n_vars() != n {
        return Err(AdaptError::Poly(PolyError::VarMismatch {
            expected: n,
            got: f.n_vars(),
        }));
    }
    for (g, _) in constraints {
        if g.n_vars() != n {
            return Err(AdaptError::Poly(PolyError::VarMismatch {
                expected: n,
                got: g.n_vars(),
            }));
        }
    }
    if !f.is_invariant(group) {
        return Err(AdaptError::NotInvariant(f.to_string()));
    }
    for (g, _) in constraints {
        if !g.is_invariant(group) {
            return Err(AdaptError::NotInvariant(g.to_string()));
        }
    }
    let k0 = constraints
        .iter()
        .map(|(g, _)| (g.degree() as usize).div_ceil(2))
        .chain(std::iter::once((f.degree() as usize).div_ceil(2)))
        .max()
        .unwrap();
    if k < k0 {
        return Err(AdaptError::OrderTooSmall { k, k0 });
    }

    let structure = adapted_basis(group, n, k);
    let registry = MomentRegistry::new(group, n, 2 * k as u32);
    let objective = LinearMomentForm::from_poly(f, group);

    let moment_blocks: Vec<(BlockLabel, Vec<Vec<LinearMomentForm>>)> = structure
        .blocks
        .iter()
        .map(|b| (b.label.clone(), moment_block(&b.representatives, group)))
        .collect();

    let mut localizing_blocks = Vec::new();
    let mut equalities = Vec::new();
    for (g, kind) in constraints {
        match kind {
            ConstraintKind::Ge0 => {
                let mut per_label = Vec::new();
                for b in &structure.blocks {
                    let forms = localizing_block(g, &b.representatives, group, k)?;
                    if !forms.is_empty() {
                        per_label.push((b.label.clone(), forms));
                    }
                }
                localizing_blocks.push((g.clone(), per_label));
            }
            ConstraintKind::Eq0 => {
                // One multiplier per monomial orbit up to complementary
                // degree; invariance of the moments collapses the rest.
                let max_deg = 2 * k as u32 - g.degree();
                let mut seen = std::collections::BTreeSet::new();
                for d in 0..=max_deg {
                    for m in sdpcore::monomials_of_degree(n, d) {
                        let canon = match group {
                            Group::Sn => {
                                let mut e: Vec<u32> = m.exponents().to_vec();
                                e.sort_unstable_by(|a, b| b.cmp(a));
                                Monomial::new(e)
                            }
                            Group::Cn => cyclic_canonical(&m),
                        };
                        if !seen.insert(canon.clone()) {
                            continue;
                        }
                        let mult = Polynomial::from_terms(
                            n,
                            vec![(canon.exponents().to_vec(), rat(1))],
                        );
                        let form = LinearMomentForm::from_poly(&(&mult * g), group);
                        if !(form.constant.is_zero() && form.terms.is_empty()) {
                            equalities.push(form);
                        }
                    }
                }
            }
        }
    }

    Ok(BlockRelaxation {
        structure,
        objective,
        moment_blocks,
        localizing_blocks,
        equalities,
        registry,
    })
}
