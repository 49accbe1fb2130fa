//! Subcommand implementations: structure, relax, reduce, check-nonneg4
//! and powersum.

use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;

use symrelax::degredux::{self, Degree4Verdict};
use symrelax::orbitpmi::{self, NewtonState, PowerSumProblem};
use symrelax::polyring::Group;
use symrelax::sdpcore::{
    export_sdpa, lasserre_relaxation, solve, solve_refined, SdpOptions, SdpProblem, SdpSolution,
    SdpStatus,
};
use symrelax::symadapt::{adapted_basis, build_relaxation, BlockStructure};
use symrelax::RPartition;

use crate::error::CliError;
use crate::problem::{ProblemFile, Symmetry};
use crate::report::{fmt_option, fmt_point, fmt_value, ReportedValue, RunReport};

/// Reduction route for the relax command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Route {
    /// Symmetry-adapted block relaxation.
    Symadapt,
    /// One dense moment matrix, symmetry unused.
    Dense,
    /// Orbit-space relaxation in power-sum coordinates.
    Orbit,
}

impl Route {
    /// Flag spelling, as echoed in reports.
    fn name(self) -> &'static str {
        match self {
            Route::Symadapt => "symadapt",
            Route::Dense => "dense",
            Route::Orbit => "orbit",
        }
    }
}

/// Group choice for the structure command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum GroupArg {
    /// Full symmetric group.
    Sn,
    /// Cyclic shift group.
    Cn,
}

impl GroupArg {
    fn group(self) -> Group {
        match self {
            GroupArg::Sn => Group::Sn,
            GroupArg::Cn => Group::Cn,
        }
    }

    fn name(self) -> &'static str {
        match self {
            GroupArg::Sn => "sn",
            GroupArg::Cn => "cn",
        }
    }
}

fn status_name(s: SdpStatus) -> &'static str {
    match s {
        SdpStatus::Optimal => "optimal",
        SdpStatus::Infeasible => "infeasible",
        SdpStatus::MaxIter => "stalled",
        SdpStatus::Unbounded => "unbounded",
    }
}

/// Solve with the refined two-pass schedule, or a single pass at an
/// explicit gap tolerance.
fn run_solve(problem: &SdpProblem, tol: Option<f64>) -> Result<SdpSolution, CliError> {
    let sol = match tol {
        None => solve_refined(problem)?,
        Some(t) => {
            if !(t > 0.0) {
                return Err(CliError::input(format!(
                    "--tol must be a positive number, got {t}"
                )));
            }
            let opts = SdpOptions {
                gap_tol: t,
                max_iters: 300,
                ..SdpOptions::default()
            };
            solve(problem, &opts)?
        }
    };
    Ok(sol)
}

fn print_elapsed(start: Instant) {
    println!("elapsed: {:.1} ms", start.elapsed().as_secs_f64() * 1e3);
}

fn format_omega(omega: &RPartition) -> String {
    let parts: Vec<String> = omega.parts().iter().map(|p| p.to_string()).collect();
    format!("({})", parts.join(","))
}

// ---------------------------------------------------------------------------
// structure
// ---------------------------------------------------------------------------

/// Arguments of the structure command.
#[derive(Debug)]
pub struct StructureArgs {
    pub n: usize,
    pub k: usize,
    pub group: GroupArg,
    pub compare: Option<usize>,
    pub report: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct BlockLine {
    label: String,
    size: usize,
    multiplicity: String,
}

#[derive(Debug, Serialize)]
struct StructureSection {
    n: usize,
    blocks: Vec<BlockLine>,
    block_sizes: Vec<usize>,
    moment_variables: usize,
}

#[derive(Debug, Serialize)]
struct StructureBody {
    group: &'static str,
    k: usize,
    #[serde(flatten)]
    main: StructureSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    compare: Option<StructureSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stabilized: Option<bool>,
}

fn structure_section(structure: &BlockStructure) -> StructureSection {
    StructureSection {
        n: structure.n,
        blocks: structure
            .blocks
            .iter()
            .map(|b| BlockLine {
                label: b.label.to_string(),
                size: b.size,
                multiplicity: b.multiplicity.to_string(),
            })
            .collect(),
        block_sizes: structure.sizes(),
        moment_variables: structure.moment_variable_count(),
    }
}

fn print_structure_table(section: &StructureSection) {
    println!("{:<10} {:>5}  {:>12}", "label", "size", "multiplicity");
    for b in &section.blocks {
        println!("{:<10} {:>5}  {:>12}", b.label, b.size, b.multiplicity);
    }
    let sizes: Vec<String> = section.block_sizes.iter().map(|s| s.to_string()).collect();
    println!("block sizes: [{}]", sizes.join(", "));
    println!("moment variables: {}", section.moment_variables);
}

/// Print the block layout (λ, κ_λ, f_λ, variable count) at one order.
pub fn cmd_structure(args: StructureArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let structure = adapted_basis(args.group.group(), args.n, args.k);
    let main = structure_section(&structure);
    println!(
        "block structure: group {}, n = {}, order k = {}",
        args.group.name(),
        args.n,
        args.k
    );
    print_structure_table(&main);

    let (compare, stabilized) = match args.compare {
        None => (None, None),
        Some(n2) => {
            let other = adapted_basis(args.group.group(), n2, args.k);
            let section = structure_section(&other);
            println!();
            println!("compared against n = {n2}:");
            print_structure_table(&section);
            let same = section.block_sizes == main.block_sizes
                && section.moment_variables == main.moment_variables;
            println!("stabilized: {same}");
            (Some(section), Some(same))
        }
    };

    let body = StructureBody {
        group: args.group.name(),
        k: args.k,
        main,
        compare,
        stabilized,
    };
    RunReport::new("structure", body).write(args.report.as_deref())?;
    print_elapsed(start);
    Ok(())
}

// ---------------------------------------------------------------------------
// relax
// ---------------------------------------------------------------------------

/// Arguments of the relax command.
#[derive(Debug)]
pub struct RelaxArgs {
    pub file: PathBuf,
    pub order: usize,
    pub route: Route,
    pub export: Option<PathBuf>,
    pub tol: Option<f64>,
    pub report: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct BlockSummary {
    label: String,
    dim: usize,
}

#[derive(Debug, Serialize)]
struct OrderLine {
    k: usize,
    value: ReportedValue,
    status: &'static str,
    iterations: usize,
    duality_gap: f64,
    primal_infeasibility: f64,
    dual_infeasibility: f64,
}

#[derive(Debug, Serialize)]
struct RelaxBody {
    file: String,
    route: &'static str,
    symmetry: &'static str,
    n: usize,
    blocks: Vec<BlockSummary>,
    moment_variables: usize,
    equality_rows: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    orders: Vec<OrderLine>,
    #[serde(skip_serializing_if = "Option::is_none")]
    export: Option<String>,
}

/// Assemble the SDP for one route, with per-block labels for the report.
fn build_route(
    pf: &ProblemFile,
    route: Route,
    k: usize,
) -> Result<(SdpProblem, Vec<BlockSummary>), CliError> {
    match route {
        Route::Symadapt => {
            let group = pf.symmetry.group().ok_or_else(|| {
                CliError::regime(
                    "route symadapt needs a declared symmetry (sn or cn), file declares none",
                )
            })?;
            let relaxation = build_relaxation(&pf.objective, &pf.constraints, pf.n, k, group)?;
            let mut blocks: Vec<BlockSummary> = relaxation
                .structure
                .blocks
                .iter()
                .map(|b| BlockSummary {
                    label: b.label.to_string(),
                    dim: b.size,
                })
                .collect();
            for (g, per_label) in &relaxation.localizing_blocks {
                for (label, forms) in per_label {
                    blocks.push(BlockSummary {
                        label: format!("{label} localizer of {g}"),
                        dim: forms.len(),
                    });
                }
            }
            Ok((relaxation.to_sdp(), blocks))
        }
        Route::Dense => {
            let (problem, _indexer) =
                lasserre_relaxation(&pf.objective, &pf.constraints, k)?;
            let blocks = problem
                .blocks
                .iter()
                .enumerate()
                .map(|(i, b)| BlockSummary {
                    label: if i == 0 {
                        "moment".to_string()
                    } else {
                        format!("localizer {i}")
                    },
                    dim: b.dim,
                })
                .collect();
            Ok((problem, blocks))
        }
        Route::Orbit => {
            if pf.symmetry != Symmetry::Sn {
                return Err(CliError::regime(
                    "route orbit needs declared symmetry sn (power-sum coordinates)",
                ));
            }
            let (problem, _indexer) =
                orbitpmi::orbit_pmi_relaxation(&pf.objective, &pf.constraints, k)?;
            let blocks = problem
                .blocks
                .iter()
                .enumerate()
                .map(|(i, b)| BlockSummary {
                    label: format!("psd {i}"),
                    dim: b.dim,
                })
                .collect();
            Ok((problem, blocks))
        }
    }
}

/// Build one relaxation of a problem file, then solve it or export SDPA.
pub fn cmd_relax(args: RelaxArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let pf = ProblemFile::load(&args.file)?;
    let (problem, blocks) = build_route(&pf, args.route, args.order)?;

    println!(
        "route {} on {} (n = {}, symmetry = {})",
        args.route.name(),
        args.file.display(),
        pf.n,
        pf.symmetry.name()
    );
    let dims: Vec<String> = blocks.iter().map(|b| format!("{}x{}", b.dim, b.dim)).collect();
    println!("blocks: [{}]", dims.join(", "));
    println!(
        "moment variables: {}, equality rows: {}",
        problem.var_count,
        problem.equalities.len()
    );

    let mut body = RelaxBody {
        file: args.file.display().to_string(),
        route: args.route.name(),
        symmetry: pf.symmetry.name(),
        n: pf.n,
        blocks,
        moment_variables: problem.var_count,
        equality_rows: problem.equalities.len(),
        orders: Vec::new(),
        export: None,
    };

    if let Some(path) = &args.export {
        let text = export_sdpa(&problem)?;
        std::fs::write(path, &text)
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))?;
        println!("wrote SDPA file: {}", path.display());
        body.export = Some(path.display().to_string());
        RunReport::new("relax", body).write(args.report.as_deref())?;
        print_elapsed(start);
        return Ok(());
    }

    let sol = run_solve(&problem, args.tol)?;
    if sol.status == SdpStatus::MaxIter {
        return Err(CliError::solver(format!(
            "solver stalled after {} iterations (duality gap {})",
            sol.iterations,
            fmt_value(sol.duality_gap)
        )));
    }
    let value = match sol.status {
        SdpStatus::Infeasible => f64::INFINITY,
        SdpStatus::Unbounded => f64::NEG_INFINITY,
        _ => sol.objective_value,
    };
    println!("value at k = {}: {}", args.order, fmt_value(value));
    println!(
        "status: {}, iterations: {}, duality gap: {}",
        status_name(sol.status),
        sol.iterations,
        fmt_value(sol.duality_gap)
    );
    body.orders.push(OrderLine {
        k: args.order,
        value: ReportedValue::of(value),
        status: status_name(sol.status),
        iterations: sol.iterations,
        duality_gap: sol.duality_gap,
        primal_infeasibility: sol.primal_infeasibility,
        dual_infeasibility: sol.dual_infeasibility,
    });
    RunReport::new("relax", body).write(args.report.as_deref())?;
    print_elapsed(start);
    Ok(())
}

// ---------------------------------------------------------------------------
// reduce
// ---------------------------------------------------------------------------

/// Arguments of the reduce command.
#[derive(Debug)]
pub struct ReduceArgs {
    pub file: PathBuf,
    pub order: usize,
    pub report: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct OmegaLine {
    omega: Vec<u32>,
    status: &'static str,
    value: ReportedValue,
}

#[derive(Debug, Serialize)]
struct ReduceBody {
    file: String,
    n: usize,
    r: usize,
    pattern_count: usize,
    patterns: Vec<OmegaLine>,
    value: ReportedValue,
    #[serde(skip_serializing_if = "Option::is_none")]
    best_omega: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lifted_point: Option<Vec<f64>>,
    partial: bool,
}

/// Restrict a symmetric problem to its few-distinct-values family and
/// solve every restriction at one order.
pub fn cmd_reduce(args: ReduceArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let pf = ProblemFile::load(&args.file)?;
    let problems = degredux::reduce(&pf.objective, &pf.constraints)?;
    let report = degredux::solve_reduced(&problems, args.order)?;

    println!(
        "degree-principle reduction of {} (n = {})",
        args.file.display(),
        pf.n
    );
    println!(
        "distinct values r = {}, patterns |Omega| = {}",
        report.r,
        report.outcomes.len()
    );
    println!("{:<12} {:<12} {}", "omega", "status", "value");
    for o in &report.outcomes {
        let value = fmt_option(o.value);
        println!(
            "{:<12} {:<12} {}",
            format_omega(&o.omega),
            status_name(o.status),
            value
        );
    }
    if report.partial {
        println!("warning: some patterns failed to solve and were skipped");
    }
    let value = report
        .value
        .ok_or_else(|| CliError::solver("every pattern solve failed; no value produced"))?;
    let best = report.best_omega.as_ref().expect("value implies best omega");
    println!("minimum: {} at omega {}", fmt_value(value), format_omega(best));
    if let Some(pt) = &report.lifted_point {
        println!("lifted point: {}", fmt_point(pt));
    }

    let body = ReduceBody {
        file: args.file.display().to_string(),
        n: pf.n,
        r: report.r,
        pattern_count: report.outcomes.len(),
        patterns: report
            .outcomes
            .iter()
            .map(|o| OmegaLine {
                omega: o.omega.parts().to_vec(),
                status: status_name(o.status),
                value: ReportedValue::of_option(o.value),
            })
            .collect(),
        value: ReportedValue::of(value),
        best_omega: report.best_omega.as_ref().map(|w| w.parts().to_vec()),
        lifted_point: report.lifted_point.clone(),
        partial: report.partial,
    };
    RunReport::new("reduce", body).write(args.report.as_deref())?;
    print_elapsed(start);
    Ok(())
}

// ---------------------------------------------------------------------------
// check-nonneg4
// ---------------------------------------------------------------------------

/// Arguments of the check-nonneg4 command.
#[derive(Debug)]
pub struct CheckArgs {
    pub file: PathBuf,
    pub report: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct CertificateLine {
    omega: Vec<u32>,
    squares: Vec<String>,
    residual: f64,
}

#[derive(Debug, Serialize)]
struct CheckBody {
    file: String,
    n: usize,
    verdict: &'static str,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    certificates: Vec<CertificateLine>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness_value: Option<f64>,
}

/// Decide nonnegativity of a symmetric polynomial of degree at most 4 by
/// certifying its two-value restrictions.
pub fn cmd_check_nonneg4(args: CheckArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let pf = ProblemFile::load(&args.file)?;
    if !pf.constraints.is_empty() {
        return Err(CliError::input(
            "check-nonneg4 takes an unconstrained problem file (drop ge0/eq0 lines)",
        ));
    }
    let verdict = degredux::degree4_nonnegativity(&pf.objective)?;
    let body = match verdict {
        Degree4Verdict::CertifiedNonnegative(certs) => {
            println!("certified nonnegative ({} SOS certificates)", certs.len());
            let mut lines = Vec::new();
            for (omega, cert) in &certs {
                let restricted = pf.objective.substitute_rpartition(omega)?;
                let residual = cert.residual(&restricted);
                println!(
                    "pattern {}: {} squares, reconstruction residual {}",
                    format_omega(omega),
                    cert.sos_terms.len(),
                    fmt_value(residual)
                );
                lines.push(CertificateLine {
                    omega: omega.parts().to_vec(),
                    squares: cert.sos_terms.iter().map(|q| q.to_string()).collect(),
                    residual,
                });
            }
            CheckBody {
                file: args.file.display().to_string(),
                n: pf.n,
                verdict: "certified-nonnegative",
                certificates: lines,
                witness: None,
                witness_value: None,
            }
        }
        Degree4Verdict::NotNonnegative {
            omega,
            witness,
            value,
        } => {
            println!(
                "not nonnegative: value {} at {} (pattern {})",
                fmt_value(value),
                fmt_point(&witness),
                format_omega(&omega)
            );
            CheckBody {
                file: args.file.display().to_string(),
                n: pf.n,
                verdict: "not-nonnegative",
                certificates: Vec::new(),
                witness: Some(witness),
                witness_value: Some(value),
            }
        }
        Degree4Verdict::Undecided { omega, shift } => {
            return Err(CliError::solver(format!(
                "undecided: restriction {} fails the SOS test (best shift {}) but no negative point was found",
                format_omega(&omega),
                fmt_value(shift)
            )));
        }
    };
    RunReport::new("check-nonneg4", body).write(args.report.as_deref())?;
    print_elapsed(start);
    Ok(())
}

// ---------------------------------------------------------------------------
// powersum
// ---------------------------------------------------------------------------

/// Arguments of the powersum command.
#[derive(Debug)]
pub struct PowersumArgs {
    pub n: usize,
    pub m: usize,
    pub q: usize,
    pub gamma: Vec<f64>,
    pub report: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
enum SideReport {
    Computed {
        value: ReportedValue,
        infeasible: bool,
    },
    OutsideRegime {
        regime: String,
    },
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
enum ClosedFormReport {
    Computed { value: ReportedValue },
    NotApplicable { applicable: bool },
}

#[derive(Debug, Serialize)]
struct PowersumBody {
    n: usize,
    m: usize,
    q: usize,
    gamma: Vec<f64>,
    lower: SideReport,
    closed_form: ClosedFormReport,
    upper: SideReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    p0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    point: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sandwich_holds: Option<bool>,
}

/// Sandwich the minimum of s_q with pinned s_1..s_{m-1}: SDP lower bound,
/// closed-form lower bound when applicable, feasibility upper bound, and
/// a recovered point attaining the upper bound.
pub fn cmd_powersum(args: PowersumArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let prob = PowerSumProblem::new(args.n, args.m, args.q, args.gamma.clone())?;
    println!(
        "power-sum problem: n = {}, m = {}, q = {}, gamma = {}",
        prob.n,
        prob.m,
        prob.q,
        fmt_point(&args.gamma)
    );

    let lower_regime_note = format!(
        "outside lower-bound regime: needs m <= n+1 and q <= 2n-2, got m = {}, q = {}, n = {}",
        prob.m, prob.q, prob.n
    );
    let upper_regime_note = format!(
        "outside upper-bound regime: needs m <= n and q+2 <= 2m, got m = {}, q = {}, n = {}",
        prob.m, prob.q, prob.n
    );
    if !prob.lower_regime() && !prob.upper_regime() {
        return Err(CliError::regime(format!(
            "{lower_regime_note}; {upper_regime_note}"
        )));
    }

    let mut lower_value: Option<f64> = None;
    let lower = if prob.lower_regime() {
        let l = orbitpmi::lower_bound_l(&prob)?;
        if l.infeasible {
            println!("lower bound L: inf (pinned power sums admit no real support)");
        } else {
            println!("lower bound L: {}", fmt_value(l.value));
            lower_value = Some(l.value);
        }
        SideReport::Computed {
            value: ReportedValue::of(l.value),
            infeasible: l.infeasible,
        }
    } else {
        println!("lower bound L: {lower_regime_note}");
        SideReport::OutsideRegime {
            regime: lower_regime_note.clone(),
        }
    };

    let closed_form = if prob.q == prob.m && prob.m % 2 == 0 {
        let v = orbitpmi::closed_form_lower(&prob)?;
        println!("closed-form lower: {}", fmt_value(v));
        ClosedFormReport::Computed {
            value: ReportedValue::of(v),
        }
    } else {
        println!("closed-form lower: not applicable (needs q = m with m even)");
        ClosedFormReport::NotApplicable { applicable: false }
    };

    let mut upper_value: Option<f64> = None;
    let mut p0 = None;
    let mut point = None;
    let upper = if prob.upper_regime() {
        let u = orbitpmi::upper_bound_u(&prob)?;
        if u.infeasible {
            println!("upper bound U: inf (pinned power sums admit no real support)");
        } else {
            println!("upper bound U: {}", fmt_value(u.value));
            if u.value.is_finite() {
                upper_value = Some(u.value);
                p0 = Some(u.p0_star);
                let state = NewtonState::from_f64(prob.m, &args.gamma)?;
                let recovered = orbitpmi::recover_point(u.p0_star, &state, prob.n)?;
                let sums: Vec<String> = (1..=prob.q)
                    .map(|t| {
                        let s: f64 = recovered.iter().map(|x| x.powi(t as i32)).sum();
                        format!("s{t} = {}", fmt_value(s))
                    })
                    .collect();
                println!("recovered point: {}", fmt_point(&recovered));
                println!("point power sums: {}", sums.join(", "));
                point = Some(recovered);
            }
        }
        SideReport::Computed {
            value: ReportedValue::of(u.value),
            infeasible: u.infeasible,
        }
    } else {
        println!("upper bound U: {upper_regime_note}");
        SideReport::OutsideRegime {
            regime: upper_regime_note.clone(),
        }
    };

    let sandwich_holds = match (lower_value, upper_value) {
        (Some(l), Some(u)) => {
            let ok = l <= u + 1e-6;
            println!("sandwich: L = {} <= U = {}", fmt_value(l), fmt_value(u));
            if !ok {
                println!("warning: bounds cross by {}", fmt_value(l - u));
            }
            Some(ok)
        }
        _ => None,
    };

    let body = PowersumBody {
        n: prob.n,
        m: prob.m,
        q: prob.q,
        gamma: args.gamma.clone(),
        lower,
        closed_form,
        upper,
        p0,
        point,
        sandwich_holds,
    };
    RunReport::new("powersum", body).write(args.report.as_deref())?;
    print_elapsed(start);
    Ok(())
}
