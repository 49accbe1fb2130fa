//! SDPA sparse-format (.dat-s) serialization. Output is deterministic,
//! values carry 17 significant digits so every f64 round-trips exactly,
//! and equality constraints are encoded as paired opposite inequalities on
//! an extra diagonal block, announced in the header comments so parsing
//! can reconstruct them.

use super::{AffineScalar, SdpBlock, SdpError, SdpProblem};
use nalgebra::DMatrix;
use std::fmt::Write as _;

fn fmt_val(v: f64) -> String {
    format!("{v:.16e}")
}

/// Serialize a problem to SDPA sparse format. The constraint
/// `C + Σ xᵢAᵢ ⪰ 0` is written with F0 = −C and Fᵢ = Aᵢ under the SDPA
/// convention `Σ xᵢFᵢ − F0 ⪰ 0`; diagonal blocks get negative sizes.
pub fn export_sdpa(problem: &SdpProblem) -> Result<String, SdpError> {
    problem.validate()?;
    for (bi, b) in problem.blocks.iter().enumerate() {
        if b.diagonal && !is_diagonal(b) {
            return Err(SdpError::BadProblem(format!(
                "block {bi} is marked diagonal but has off-diagonal entries"
            )));
        }
    }
    let e = problem.equalities.len();
    let eq_block = (e > 0).then(|| equality_block(&problem.equalities, problem.var_count));
    let mut all_blocks: Vec<&SdpBlock> = problem.blocks.iter().collect();
    if let Some(b) = &eq_block {
        all_blocks.push(b);
    }
    let nblocks = all_blocks.len();

    let mut out = String::new();
    out.push_str("*SDPA sparse format\n");
    let _ = writeln!(out, "*objective-constant {}", fmt_val(problem.objective_constant));
    if e > 0 {
        let _ = writeln!(out, "*equality-block {} {}", nblocks, e);
        out.push_str(
            "*the block above is diagonal; rows 2e-1 and 2e encode equality e\n\
             *as the pair of opposite inequalities a.x + b >= 0 and -(a.x + b) >= 0\n",
        );
    }
    let _ = writeln!(out, "{}", problem.var_count);
    let _ = writeln!(out, "{nblocks}");
    let sizes: Vec<String> = all_blocks
        .iter()
        .map(|b| {
            if b.diagonal {
                format!("-{}", b.dim)
            } else {
                format!("{}", b.dim)
            }
        })
        .collect();
    let _ = writeln!(out, "{}", sizes.join(" "));
    let obj: Vec<String> = problem.objective.iter().map(|&c| fmt_val(c)).collect();
    let _ = writeln!(out, "{}", obj.join(" "));

    for matno in 0..=problem.var_count {
        for (bki, b) in all_blocks.iter().enumerate() {
            let mat: DMatrix<f64> = if matno == 0 {
                -&b.constant
            } else {
                b.coeffs[matno - 1].clone()
            };
            for i in 0..b.dim {
                for j in i..b.dim {
                    let v = mat[(i, j)];
                    if v != 0.0 {
                        let _ = writeln!(out, "{matno} {} {} {} {}", bki + 1, i + 1, j + 1, fmt_val(v));
                    }
                }
            }
        }
    }
    Ok(out)
}

fn is_diagonal(b: &SdpBlock) -> bool {
    let off_diag_zero = |m: &DMatrix<f64>| {
        (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| i == j || m[(i, j)] == 0.0))
    };
    off_diag_zero(&b.constant) && b.coeffs.iter().all(off_diag_zero)
}

fn equality_block(equalities: &[AffineScalar], var_count: usize) -> SdpBlock {
    let dim = 2 * equalities.len();
    let mut b = SdpBlock::zeros(dim, var_count);
    b.diagonal = true;
    for (e, eq) in equalities.iter().enumerate() {
        b.constant[(2 * e, 2 * e)] = eq.constant;
        b.constant[(2 * e + 1, 2 * e + 1)] = -eq.constant;
        for (i, &a) in eq.coeffs.iter().enumerate() {
            b.coeffs[i][(2 * e, 2 * e)] = a;
            b.coeffs[i][(2 * e + 1, 2 * e + 1)] = -a;
        }
    }
    b
}

/// Parse SDPA sparse format back into a problem. Header annotations
/// written by `export_sdpa` (objective constant, equality-block tag) are
/// honored, so parse ∘ export is the identity on problems.
pub fn parse_sdpa(text: &str) -> Result<SdpProblem, SdpError> {
    let mut objective_constant = 0.0f64;
    let mut equality_tag: Option<(usize, usize)> = None;
    let mut data_lines = Vec::new();
    for line in text.lines() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('*').or_else(|| trimmed.strip_prefix('"')) {
            let tokens: Vec<&str> = comment.split_whitespace().collect();
            match tokens.as_slice() {
                ["objective-constant", v] => {
                    objective_constant = v
                        .parse()
                        .map_err(|_| SdpError::Parse("bad objective-constant".into()))?;
                }
                ["equality-block", blk, count] => {
                    let blk: usize = blk
                        .parse()
                        .map_err(|_| SdpError::Parse("bad equality-block".into()))?;
                    let count: usize = count
                        .parse()
                        .map_err(|_| SdpError::Parse("bad equality-block".into()))?;
                    equality_tag = Some((blk, count));
                }
                _ => {}
            }
            continue;
        }
        data_lines.push(trimmed.to_string());
    }
    if data_lines.len() < 4 {
        return Err(SdpError::Parse("truncated header".into()));
    }
    let var_count: usize = first_int(&data_lines[0])? as usize;
    let nblocks: usize = first_int(&data_lines[1])? as usize;
    let sizes = int_list(&data_lines[2], nblocks)?;
    let objective = float_list(&data_lines[3], var_count)?;

    let mut blocks: Vec<SdpBlock> = sizes
        .iter()
        .map(|&s| {
            let dim = s.unsigned_abs() as usize;
            let mut b = SdpBlock::zeros(dim, var_count);
            b.diagonal = s < 0;
            b
        })
        .collect();

    for line in &data_lines[4..] {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 5 {
            return Err(SdpError::Parse(format!("bad entry line: {line}")));
        }
        let matno: usize = toks[0]
            .parse()
            .map_err(|_| SdpError::Parse(format!("bad matno: {line}")))?;
        let blkno: usize = toks[1]
            .parse()
            .map_err(|_| SdpError::Parse(format!("bad blkno: {line}")))?;
        let i: usize = toks[2]
            .parse()
            .map_err(|_| SdpError::Parse(format!("bad row: {line}")))?;
        let j: usize = toks[3]
            .parse()
            .map_err(|_| SdpError::Parse(format!("bad column: {line}")))?;
        let v: f64 = toks[4]
            .parse()
            .map_err(|_| SdpError::Parse(format!("bad value: {line}")))?;
        if blkno == 0 || blkno > nblocks || matno > var_count {
            return Err(SdpError::Parse(format!("entry indices out of range: {line}")));
        }
        let b = &mut blocks[blkno - 1];
        if i == 0 || j == 0 || i > b.dim || j > b.dim {
            return Err(SdpError::Parse(format!("entry indices out of range: {line}")));
        }
        let (r, c) = (i - 1, j - 1);
        let target = if matno == 0 {
            &mut b.constant
        } else {
            &mut b.coeffs[matno - 1]
        };
        // F0 is negated relative to our constant-matrix convention.
        let stored = if matno == 0 { -v } else { v };
        target[(r, c)] = stored;
        target[(c, r)] = stored;
    }

    let mut equalities = Vec::new();
    if let Some((blk, count)) = equality_tag {
        if blk == 0 || blk > blocks.len() {
            return Err(SdpError::Parse("equality-block index out of range".into()));
        }
        let b = blocks.remove(blk - 1);
        if b.dim != 2 * count {
            return Err(SdpError::Parse("equality-block size mismatch".into()));
        }
        for e in 0..count {
            let constant = b.constant[(2 * e, 2 * e)];
            let coeffs: Vec<f64> = b.coeffs.iter().map(|a| a[(2 * e, 2 * e)]).collect();
            let mirror_ok = b.constant[(2 * e + 1, 2 * e + 1)] == -constant
                && b.coeffs
                    .iter()
                    .enumerate()
                    .all(|(i, a)| a[(2 * e + 1, 2 * e + 1)] == -coeffs[i]);
            if !mirror_ok {
                return Err(SdpError::Parse(format!(
                    "equality {} rows are not opposite inequalities",
                    e + 1
                )));
            }
            equalities.push(AffineScalar { coeffs, constant });
        }
    }

    let problem = SdpProblem {
        var_count,
        objective,
        objective_constant,
        blocks,
        equalities,
    };
    problem.validate()?;
    Ok(problem)
}

fn first_int(line: &str) -> Result<i64, SdpError> {
    line.split_whitespace()
        .next()
        .and_then(|t| t.trim_matches(|c: char| !c.is_ascii_digit() && c != '-').parse().ok())
        .ok_or_else(|| SdpError::Parse(format!("expected integer: {line}")))
}

fn int_list(line: &str, count: usize) -> Result<Vec<i64>, SdpError> {
    let vals: Vec<i64> = line
        .split(|c: char| c.is_whitespace() || c == ',' || c == '(' || c == ')' || c == '{' || c == '}')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<i64>())
        .collect::<Result<_, _>>()
        .map_err(|_| SdpError::Parse(format!("bad block sizes: {line}")))?;
    if vals.len() != count {
        return Err(SdpError::Parse(format!(
            "expected {count} block sizes, found {}",
            vals.len()
        )));
    }
    Ok(vals)
}

fn float_list(line: &str, count: usize) -> Result<Vec<f64>, SdpError> {
    let vals: Vec<f64> = line
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| SdpError::Parse(format!("bad objective: {line}")))?;
    if vals.len() != count {
        return Err(SdpError::Parse(format!(
            "expected {count} objective values, found {}",
            vals.len()
        )));
    }
    Ok(vals)
}

#[cfg(test)]
mod tests {
    use super::super::{AffineScalar, SdpBlock, SdpProblem};
    use super::{export_sdpa, parse_sdpa};
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sample_problem() -> SdpProblem {
        let mut p = SdpProblem::new(2);
        p.objective = vec![1.0, -0.5];
        p.objective_constant = 0.25;
        let mut b = SdpBlock::zeros(2, 2);
        b.constant = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0]);
        b.coeffs[0] = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        b.coeffs[1] = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        p.blocks.push(b);
        p
    }

    #[test]
    fn export_is_deterministic() {
        let p = sample_problem();
        assert_eq!(export_sdpa(&p).unwrap(), export_sdpa(&p).unwrap());
    }

    #[test]
    fn export_mentions_counts() {
        let text = export_sdpa(&sample_problem()).unwrap();
        let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('*')).collect();
        assert_eq!(data[0], "2");
        assert_eq!(data[1], "1");
        assert_eq!(data[2], "2");
    }

    #[test]
    fn round_trip_identity() {
        let p = sample_problem();
        let q = parse_sdpa(&export_sdpa(&p).unwrap()).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn round_trip_with_equalities() {
        let mut p = sample_problem();
        p.equalities.push(AffineScalar {
            coeffs: vec![1.0, 2.0],
            constant: -3.0,
        });
        p.equalities.push(AffineScalar {
            coeffs: vec![0.0, 1.0],
            constant: 0.5,
        });
        let text = export_sdpa(&p).unwrap();
        assert!(text.contains("equality-block"));
        let q = parse_sdpa(&text).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn round_trip_random_problems() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..10 {
            let vars = rng.gen_range(1..4);
            let mut p = SdpProblem::new(vars);
            p.objective = (0..vars).map(|_| rng.gen_range(-2.0..2.0)).collect();
            p.objective_constant = rng.gen_range(-1.0..1.0);
            for _ in 0..rng.gen_range(1..3) {
                let dim = rng.gen_range(1..4);
                let mut b = SdpBlock::zeros(dim, vars);
                let fill = |m: &mut DMatrix<f64>, rng: &mut ChaCha8Rng| {
                    for i in 0..dim {
                        for j in i..dim {
                            let v = (rng.gen_range(-8i32..8) as f64) / 4.0;
                            m[(i, j)] = v;
                            m[(j, i)] = v;
                        }
                    }
                };
                fill(&mut b.constant, &mut rng);
                for k in 0..vars {
                    fill(&mut b.coeffs[k], &mut rng);
                }
                p.blocks.push(b);
            }
            let q = parse_sdpa(&export_sdpa(&p).unwrap()).unwrap();
            assert_eq!(p, q);
        }
    }

    #[test]
    fn values_round_trip_to_the_bit() {
        let mut p = SdpProblem::new(1);
        p.objective = vec![std::f64::consts::PI];
        let mut b = SdpBlock::zeros(1, 1);
        b.constant[(0, 0)] = 1.0 / 3.0;
        b.coeffs[0][(0, 0)] = 2.0_f64.sqrt();
        p.blocks.push(b);
        let q = parse_sdpa(&export_sdpa(&p).unwrap()).unwrap();
        assert!(q.objective[0] == std::f64::consts::PI);
        assert!(q.blocks[0].constant[(0, 0)] == 1.0 / 3.0);
        assert!(q.blocks[0].coeffs[0][(0, 0)] == 2.0_f64.sqrt());
    }

    #[test]
    fn rejects_malformed_text() {
        assert!(parse_sdpa("1\n1\n").is_err());
        assert!(parse_sdpa("1\n1\n1\n0.0\n0 1 5 5 1.0\n").is_err());
        assert!(parse_sdpa("1\n1\n1\nnot-a-number\n").is_err());
    }
}
