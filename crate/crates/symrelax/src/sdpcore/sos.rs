//! Sum-of-squares feasibility with explicit Gram certificates. The Gram
//! spectahedron is probed by minimizing the uniform shift needed to make
//! some valid Gram matrix PSD, which stays well-posed on the boundary.

use super::{solve, AffineScalar, SdpBlock, SdpError, SdpOptions, SdpProblem, SdpStatus};
use crate::polyring::{to_f64, Monomial, Polynomial, Rational};
use crate::sdpcore::moments::monomials_of_degree;
use nalgebra::DMatrix;
use num_traits::Zero;
use std::collections::BTreeMap;

/// Shift below which a minimally-shifted Gram matrix counts as PSD.
const SHIFT_TOL: f64 = 1e-7;
/// Coefficientwise tolerance for certificate reconstruction.
const RECONSTRUCTION_TOL: f64 = 1e-6;

/// An explicit SOS certificate: p = b(x)ᵀ · gram · b(x) = Σ qᵢ².
#[derive(Debug, Clone)]
pub struct GramCertificate {
    /// Monomial basis b as polynomials.
    pub basis: Vec<Polynomial>,
    /// PSD Gram matrix over the basis.
    pub gram: DMatrix<f64>,
    /// Squared terms qᵢ recombined from the Gram eigenstructure.
    pub sos_terms: Vec<Polynomial>,
}

impl GramCertificate {
    /// Largest coefficient deviation between Σ qᵢ² and a target.
    pub fn residual(&self, p: &Polynomial) -> f64 {
        let n = p.n_vars();
        let mut total = Polynomial::zero(n);
        for q in &self.sos_terms {
            total = &total + &(q * q);
        }
        let diff = &total - p;
        diff.terms()
            .map(|(_, c)| to_f64(c).abs())
            .fold(0.0f64, f64::max)
    }
}

/// Outcome of an SOS feasibility check.
#[derive(Debug, Clone)]
pub enum SosVerdict {
    /// p is a sum of squares, with certificate.
    Feasible(Box<GramCertificate>),
    /// No PSD Gram matrix exists; `shift` is the smallest uniform diagonal
    /// shift that repairs the best Gram candidate (∞ for odd degree).
    Infeasible { shift: f64 },
}

impl SosVerdict {
    /// True for the feasible arm.
    pub fn is_feasible(&self) -> bool {
        matches!(self, SosVerdict::Feasible(_))
    }
}

/// Decide whether a polynomial is a sum of squares; feasibility comes with
/// a Gram certificate, infeasibility with the offending shift.
pub fn is_sos(p: &Polynomial) -> Result<SosVerdict, SdpError> {
    if p.is_zero() {
        return Ok(SosVerdict::Feasible(Box::new(GramCertificate {
            basis: Vec::new(),
            gram: DMatrix::zeros(0, 0),
            sos_terms: Vec::new(),
        })));
    }
    let deg = p.degree();
    if deg % 2 == 1 {
        return Ok(SosVerdict::Infeasible {
            shift: f64::INFINITY,
        });
    }
    let basis = gram_basis(p);
    let nb = basis.len();
    if nb == 0 {
        // Only the constant term could remain; a constant is SOS iff
        // nonnegative, and the basis always contains 1 when deg is 0.
        unreachable!("gram basis is nonempty for nonzero even-degree input");
    }

    // Variables: one per upper-triangular Gram entry, then the shift.
    let pair_index = |u: usize, v: usize| -> usize {
        // u <= v enumerated row-major over the upper triangle.
        u * nb - u * (u + 1) / 2 + v
    };
    let var_count = nb * (nb + 1) / 2 + 1;
    let lambda_index = var_count - 1;

    let mut problem = SdpProblem::new(var_count);
    problem.objective[lambda_index] = 1.0;

    let mut block = SdpBlock::zeros(nb, var_count);
    for u in 0..nb {
        for v in u..nb {
            let gi = pair_index(u, v);
            block.coeffs[gi][(u, v)] = 1.0;
            block.coeffs[gi][(v, u)] = 1.0;
        }
        block.coeffs[lambda_index][(u, u)] = 1.0;
    }
    problem.blocks.push(block);

    // Match coefficients: for each product monomial, the weighted sum of
    // Gram entries mapping onto it equals the coefficient in p.
    let mut products: BTreeMap<Monomial, Vec<(usize, f64)>> = BTreeMap::new();
    for u in 0..nb {
        for v in u..nb {
            let m = mono_mul(&basis[u], &basis[v]);
            let w = if u == v { 1.0 } else { 2.0 };
            products.entry(m).or_default().push((pair_index(u, v), w));
        }
    }
    if p.terms().any(|(m, _)| !products.contains_key(m)) {
        // A monomial outside the product span can never be matched.
        return Ok(SosVerdict::Infeasible {
            shift: f64::INFINITY,
        });
    }
    for (m, entries) in &products {
        let mut coeffs = vec![0.0; var_count];
        for (gi, w) in entries {
            coeffs[*gi] = *w;
        }
        problem.equalities.push(AffineScalar {
            coeffs,
            constant: -to_f64(&p.coeff(m)),
        });
    }

    // The 1e-7 shift threshold needs objective accuracy well beyond the
    // default gap tolerance.
    let sol = solve(&problem, &SdpOptions::deep())?;
    let near_converged = sol.duality_gap <= 1e-8 && sol.primal_infeasibility <= 1e-7;
    if sol.status != SdpStatus::Optimal && !near_converged {
        return Err(SdpError::BadProblem(format!(
            "shifted-Gram solve terminated with {:?}",
            sol.status
        )));
    }
    let shift = sol.values[lambda_index];
    if shift > SHIFT_TOL {
        return Ok(SosVerdict::Infeasible { shift });
    }

    // Rebuild the Gram matrix without the shift, clip tiny negative
    // eigenvalues, and recombine the squares.
    let mut gram = DMatrix::zeros(nb, nb);
    for u in 0..nb {
        for v in u..nb {
            let g = sol.values[pair_index(u, v)];
            gram[(u, v)] = g;
            gram[(v, u)] = g;
        }
    }
    let eig = gram.clone().symmetric_eigen();
    let mut clipped = DMatrix::zeros(nb, nb);
    let mut sos_terms = Vec::new();
    let eig_max = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    for k in 0..nb {
        let e = eig.eigenvalues[k].max(0.0);
        if e <= 1e-12 * (1.0 + eig_max) {
            continue;
        }
        let col = eig.eigenvectors.column(k);
        clipped += e * &col * col.transpose();
        let mut q = Polynomial::zero(p.n_vars());
        for u in 0..nb {
            let w = e.sqrt() * col[u];
            if let Some(r) = Rational::from_float(w) {
                if !r.is_zero() {
                    q = &q + &scaled_monomial(&basis[u], r);
                }
            }
        }
        sos_terms.push(q);
    }
    let certificate = GramCertificate {
        basis: basis
            .iter()
            .map(|m| Polynomial::from_terms(p.n_vars(), vec![(m.exponents().to_vec(), Rational::from_integer(1.into()))]))
            .collect(),
        gram: clipped,
        sos_terms,
    };
    if certificate.residual(p) > RECONSTRUCTION_TOL {
        return Err(SdpError::BadProblem(
            "certificate reconstruction drifted beyond tolerance".into(),
        ));
    }
    Ok(SosVerdict::Feasible(Box::new(certificate)))
}

/// Monomials eligible for the Gram basis: degree at most deg(p)/2 over the
/// variables appearing in p, restricted to exactly deg(p)/2 when p is
/// homogeneous.
fn gram_basis(p: &Polynomial) -> Vec<Monomial> {
    let n = p.n_vars();
    let half = p.degree() / 2;
    let mut present = vec![false; n];
    for (m, _) in p.terms() {
        for (i, &e) in m.exponents().iter().enumerate() {
            if e > 0 {
                present[i] = true;
            }
        }
    }
    let active: Vec<usize> = (0..n).filter(|&i| present[i]).collect();
    let homogeneous = p.terms().all(|(m, _)| m.degree() == p.degree());
    let degrees: Vec<u32> = if homogeneous {
        vec![half]
    } else {
        (0..=half).collect()
    };
    let mut out = Vec::new();
    for d in degrees {
        if active.is_empty() {
            if d == 0 {
                out.push(Monomial::constant(n));
            }
            continue;
        }
        for small in monomials_of_degree(active.len(), d) {
            let mut exps = vec![0u32; n];
            for (pos, &var) in active.iter().enumerate() {
                exps[var] = small.exponents()[pos];
            }
            out.push(Monomial::new(exps));
        }
    }
    out
}

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    Monomial::new(
        a.exponents()
            .iter()
            .zip(b.exponents())
            .map(|(x, y)| x + y)
            .collect(),
    )
}

fn scaled_monomial(m: &Monomial, c: Rational) -> Polynomial {
    Polynomial::from_terms(m.n_vars(), vec![(m.exponents().to_vec(), c)])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(src: &str, n: usize) -> Polynomial {
        Polynomial::parse(src, n).unwrap()
    }

    #[test]
    fn square_is_sos() {
        let verdict = is_sos(&p("x1^2 + 2*x1*x2 + x2^2", 2)).unwrap();
        match verdict {
            SosVerdict::Feasible(cert) => {
                assert!(cert.residual(&p("x1^2 + 2*x1*x2 + x2^2", 2)) < 1e-6);
            }
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn negative_square_is_not_sos() {
        let verdict = is_sos(&p("-x1^2", 1)).unwrap();
        assert!(!verdict.is_feasible());
    }

    #[test]
    fn odd_degree_is_immediately_infeasible() {
        match is_sos(&p("x1^3 + x1", 1)).unwrap() {
            SosVerdict::Infeasible { shift } => assert!(shift.is_infinite()),
            other => panic!("unexpected: {other:?}"),
        }
    }

    /// The Motzkin form is nonnegative but not SOS.
    #[test]
    fn motzkin_form_is_not_sos() {
        let m = p("x1^4*x2^2 + x1^2*x2^4 - 3*x1^2*x2^2*x3^2 + x3^6", 3);
        match is_sos(&m).unwrap() {
            SosVerdict::Infeasible { shift } => assert!(shift > 1e-4, "shift {shift}"),
            other => panic!("unexpected: {other:?}"),
        }
    }

    /// A boundary case: x^4 + 2x^3y + x^2y^2 = (x^2 + xy)^2 has a singular
    /// Gram spectahedron but is SOS.
    #[test]
    fn boundary_square_is_sos() {
        let q = p("x1^4 + 2*x1^3*x2 + x1^2*x2^2", 2);
        let verdict = is_sos(&q).unwrap();
        match verdict {
            SosVerdict::Feasible(cert) => assert!(cert.residual(&q) < 1e-6),
            other => panic!("unexpected: {other:?}"),
        }
    }

    /// Homogeneous input restricts the basis to exact half degree.
    #[test]
    fn homogeneous_basis_restriction() {
        let b = gram_basis(&p("x1^4 + x2^4", 3));
        assert!(b.iter().all(|m| m.degree() == 2));
        // Only x1 and x2 appear: C(3, 2) = 3 monomials of degree 2.
        assert_eq!(b.len(), 3);
    }

    /// Certificates carry squares summing back to the input.
    #[test]
    fn certificate_terms_square_back() {
        let q = p("2*x1^2 - 2*x1*x2 + x2^2 + 3", 2);
        match is_sos(&q).unwrap() {
            SosVerdict::Feasible(cert) => {
                assert!(!cert.sos_terms.is_empty());
                assert!(cert.residual(&q) < 1e-6);
            }
            other => panic!("unexpected: {other:?}"),
        }
    }

    /// Random explicit sums of squares are always certified feasible.
    #[test]
    fn random_explicit_sos_are_feasible() {
        use crate::polyring::rat;
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..50 {
            let n = rng.gen_range(1..=3);
            let n_sq = rng.gen_range(1..=3);
            let mut total = Polynomial::zero(n);
            for _ in 0..n_sq {
                let mut q = Polynomial::zero(n);
                for m in [
                    vec![Monomial::constant(n)],
                    (1..=n).map(|i| {
                        let mut e = vec![0u32; n];
                        e[i - 1] = 1;
                        Monomial::new(e)
                    }).collect::<Vec<_>>(),
                    (1..=n).map(|i| {
                        let mut e = vec![0u32; n];
                        e[i - 1] = 2;
                        Monomial::new(e)
                    }).collect::<Vec<_>>(),
                ]
                .concat()
                {
                    let c = rng.gen_range(-3i64..=3);
                    if c != 0 && rng.gen_bool(0.6) {
                        q = &q + &Polynomial::from_terms(
                            n,
                            vec![(m.exponents().to_vec(), rat(c))],
                        );
                    }
                }
                total = &total + &(&q * &q);
            }
            let verdict = is_sos(&total).unwrap();
            match verdict {
                SosVerdict::Feasible(cert) => {
                    assert!(
                        cert.residual(&total) < 1e-6,
                        "trial {trial}: residual {}",
                        cert.residual(&total)
                    );
                }
                SosVerdict::Infeasible { shift } => {
                    panic!("trial {trial}: explicit SOS judged infeasible, shift {shift}")
                }
            }
        }
    }
}
