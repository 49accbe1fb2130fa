//! Problem-file loading: a small line-oriented schema carrying one
//! polynomial optimization problem with its declared symmetry.
//!
//! ```text
//! # minimize the second power sum on the slice sum x = 3
//! n = 3
//! symmetry = sn
//! objective = x1^2 + x2^2 + x3^2
//! eq0 = x1 + x2 + x3 - 3
//! ge0 = 9 - x1^2 - x2^2 - x3^2
//! ```
//!
//! Blank lines and `#` comments are skipped.  `n`, `symmetry` and
//! `objective` appear exactly once; `ge0`/`eq0` lines repeat.  Polynomials
//! use the ring grammar (`3/2*x1^2*x2 - x3 + 7`).  The declared symmetry
//! is verified on every polynomial at load time.

use crate::error::CliError;
use symrelax::polyring::Group;
use symrelax::sdpcore::ConstraintKind;
use symrelax::Polynomial;

/// Declared symmetry of a problem file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    /// Invariant under all coordinate permutations.
    Sn,
    /// Invariant under the cyclic coordinate shift.
    Cn,
    /// No symmetry declared.
    None,
}

impl Symmetry {
    /// Parse the `symmetry =` field.
    pub fn parse(text: &str) -> Result<Symmetry, CliError> {
        match text.to_ascii_lowercase().as_str() {
            "sn" => Ok(Symmetry::Sn),
            "cn" => Ok(Symmetry::Cn),
            "none" => Ok(Symmetry::None),
            other => Err(CliError::input(format!(
                "unknown symmetry `{other}` (expected sn, cn or none)"
            ))),
        }
    }

    /// Acting group, when one is declared.
    pub fn group(self) -> Option<Group> {
        match self {
            Symmetry::Sn => Some(Group::Sn),
            Symmetry::Cn => Some(Group::Cn),
            Symmetry::None => None,
        }
    }

    /// Lower-case field value, as written in files and reports.
    pub fn name(self) -> &'static str {
        match self {
            Symmetry::Sn => "sn",
            Symmetry::Cn => "cn",
            Symmetry::None => "none",
        }
    }
}

/// A parsed and symmetry-checked problem file.
#[derive(Debug, Clone)]
pub struct ProblemFile {
    /// Number of ring variables.
    pub n: usize,
    /// Objective polynomial to minimize.
    pub objective: Polynomial,
    /// Constraints with their kinds.
    pub constraints: Vec<(Polynomial, ConstraintKind)>,
    /// Declared (and verified) symmetry.
    pub symmetry: Symmetry,
}

impl ProblemFile {
    /// Parse the schema from text; polynomials are symmetry-checked.
    pub fn parse(text: &str) -> Result<ProblemFile, CliError> {
        let mut n: Option<usize> = None;
        let mut symmetry: Option<Symmetry> = None;
        let mut objective_src: Option<(usize, String)> = None;
        let mut constraint_src: Vec<(usize, String, ConstraintKind)> = Vec::new();

        for (line_no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::input(format!(
                    "line {}: expected `key = value`, got `{line}`",
                    line_no + 1
                ))
            })?;
            let key = key.trim();
            let value = value.trim();
            match key {
                "n" => {
                    if n.is_some() {
                        return Err(CliError::input(format!(
                            "line {}: `n` given twice",
                            line_no + 1
                        )));
                    }
                    let parsed: usize = value.parse().map_err(|_| {
                        CliError::input(format!(
                            "line {}: `n` must be a positive integer, got `{value}`",
                            line_no + 1
                        ))
                    })?;
                    if parsed == 0 {
                        return Err(CliError::input(format!(
                            "line {}: `n` must be at least 1",
                            line_no + 1
                        )));
                    }
                    n = Some(parsed);
                }
                "symmetry" => {
                    if symmetry.is_some() {
                        return Err(CliError::input(format!(
                            "line {}: `symmetry` given twice",
                            line_no + 1
                        )));
                    }
                    symmetry = Some(Symmetry::parse(value)?);
                }
                "objective" => {
                    if objective_src.is_some() {
                        return Err(CliError::input(format!(
                            "line {}: `objective` given twice",
                            line_no + 1
                        )));
                    }
                    objective_src = Some((line_no + 1, value.to_string()));
                }
                "ge0" => {
                    constraint_src.push((line_no + 1, value.to_string(), ConstraintKind::Ge0));
                }
                "eq0" => {
                    constraint_src.push((line_no + 1, value.to_string(), ConstraintKind::Eq0));
                }
                other => {
                    return Err(CliError::input(format!(
                        "line {}: unknown key `{other}` (expected n, symmetry, objective, ge0, eq0)",
                        line_no + 1
                    )));
                }
            }
        }

        let n = n.ok_or_else(|| CliError::input("missing `n = ...` line"))?;
        let symmetry =
            symmetry.ok_or_else(|| CliError::input("missing `symmetry = ...` line"))?;
        let (obj_line, obj_src) =
            objective_src.ok_or_else(|| CliError::input("missing `objective = ...` line"))?;

        let objective = Polynomial::parse(&obj_src, n)
            .map_err(|e| CliError::input(format!("line {obj_line}: objective: {e}")))?;
        let mut constraints = Vec::new();
        for (line_no, src, kind) in constraint_src {
            let g = Polynomial::parse(&src, n)
                .map_err(|e| CliError::input(format!("line {line_no}: constraint: {e}")))?;
            constraints.push((g, kind));
        }

        let file = ProblemFile {
            n,
            objective,
            constraints,
            symmetry,
        };
        file.verify_symmetry()?;
        Ok(file)
    }

    /// Read and parse a file from disk.
    pub fn load(path: &std::path::Path) -> Result<ProblemFile, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
        ProblemFile::parse(&text)
    }

    /// Check every polynomial against the declared symmetry.
    fn verify_symmetry(&self) -> Result<(), CliError> {
        let Some(group) = self.symmetry.group() else {
            return Ok(());
        };
        if !self.objective.is_invariant(group) {
            return Err(CliError::regime(format!(
                "objective is not invariant under the declared symmetry `{}`",
                self.symmetry.name()
            )));
        }
        for (i, (g, _)) in self.constraints.iter().enumerate() {
            if !g.is_invariant(group) {
                return Err(CliError::regime(format!(
                    "constraint {} is not invariant under the declared symmetry `{}`",
                    i + 1,
                    self.symmetry.name()
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_schema() {
        let text = "\
# demo
n = 3
symmetry = sn
objective = x1^2 + x2^2 + x3^2
eq0 = x1 + x2 + x3 - 3
ge0 = 9 - x1^2 - x2^2 - x3^2
";
        let f = ProblemFile::parse(text).unwrap();
        assert_eq!(f.n, 3);
        assert_eq!(f.symmetry, Symmetry::Sn);
        assert_eq!(f.objective.degree(), 2);
        assert_eq!(f.constraints.len(), 2);
        assert_eq!(f.constraints[0].1, ConstraintKind::Eq0);
        assert_eq!(f.constraints[1].1, ConstraintKind::Ge0);
    }

    #[test]
    fn rejects_symmetry_mismatch() {
        let text = "n = 2\nsymmetry = sn\nobjective = x1\n";
        let err = ProblemFile::parse(text).unwrap_err();
        assert_eq!(err.exit_code(), 4);
    }

    #[test]
    fn rejects_malformed_input() {
        for text in [
            "symmetry = sn\nobjective = x1\n",             // missing n
            "n = 2\nobjective = x1 + x2\n",                // missing symmetry
            "n = 2\nsymmetry = sn\n",                      // missing objective
            "n = 2\nsymmetry = dn\nobjective = x1 + x2\n", // bad symmetry
            "n = 2\nsymmetry = sn\nobjective = x1 +* x2\n", // bad polynomial
            "n = 2\nsymmetry = sn\nobjective = x1 + x2\nfoo = 1\n", // bad key
        ] {
            let err = ProblemFile::parse(text).unwrap_err();
            assert_eq!(err.exit_code(), 2, "input: {text}");
        }
    }

    #[test]
    fn cyclic_declaration_accepts_cyclic_invariants() {
        let text = "n = 4\nsymmetry = cn\nobjective = x1*x2 + x2*x3 + x3*x4 + x4*x1\n";
        let f = ProblemFile::parse(text).unwrap();
        assert_eq!(f.symmetry, Symmetry::Cn);
    }
}
