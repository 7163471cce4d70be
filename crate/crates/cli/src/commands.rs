//! One function per subcommand. Reports go to `out`; diagnostics to stderr.
//! Point and block numbers in every report are 1-based.

use std::io::Write;
use std::path::Path;

use mcdl_core::analysis::{feasible_partitions, is_vacuous, CheckStatus, BOUND_TOL};
use mcdl_core::design::MarginalReport;
use mcdl_core::{
    equal_partition, estimate_mse, mse_of_function, proof_witness, refinement_sweep, theorem_bound,
    verify_design, worst_case_mse, ContinuousDesign, ContinuousKind, Design, Error, SpaceFunction,
};

use crate::error::{CliError, CliResult};
use crate::files::{check_dimensions, read_design, read_function};
use crate::format::{bound as fmt_bound, num};

/// |z| above which `simulate` fails.
const Z_GATE: f64 = 4.0;

fn usage(e: Error) -> CliError {
    CliError::Usage(e.to_string())
}

fn write_function(out: &mut impl Write, label: &str, f: &SpaceFunction) -> CliResult<()> {
    writeln!(out, "{label}:")?;
    for (k, v) in f.values().iter().enumerate() {
        writeln!(out, "  {:>4}  {}", k + 1, num(*v))?;
    }
    Ok(())
}

fn require_marginals(design: &Design) -> CliResult<()> {
    let report = design.validate_marginals();
    if report.passed() {
        return Ok(());
    }
    print_marginal_table(&report);
    Err(CliError::InvalidDesign(format!(
        "coordinate laws differ from the space measure (max deviation {})",
        num(report.max_deviation())
    )))
}

fn print_marginal_table(report: &MarginalReport) {
    eprintln!("{:>10}  {:>6}  {:>20}", "coordinate", "point", "deviation");
    for c in &report.coordinates {
        if c.max_deviation <= report.tolerance {
            continue;
        }
        for (k, d) in c.deviations.iter().enumerate() {
            if d.abs() > report.tolerance {
                eprintln!("{:>10}  {:>6}  {:>20}", c.index + 1, k + 1, num(*d));
            }
        }
    }
}

pub fn bound(out: &mut impl Write, n: usize, blocks: usize) -> CliResult<()> {
    let value = theorem_bound(n, blocks).map_err(usage)?;
    writeln!(out, "{}", fmt_bound(value, is_vacuous(n, blocks)))?;
    Ok(())
}

pub fn analyze(out: &mut impl Write, path: &Path, csv: bool) -> CliResult<()> {
    let design = read_design(path)?;
    require_marginals(&design)?;
    let worst = worst_case_mse(&design)?;
    let n = design.n();
    let inverse_n = 1.0 / n as f64;
    let rows: Vec<(usize, f64, bool)> = feasible_partitions(design.space())
        .iter()
        .map(|p| {
            let b = p.num_blocks();
            Ok((b, theorem_bound(n, b)?, is_vacuous(n, b)))
        })
        .collect::<Result<_, Error>>()?;

    if csv {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "B",
            "bound",
            "vacuous",
            "worst_case",
            "inverse_n",
            "slack",
            "tight",
        ])?;
        for &(b, bound, vacuous) in &rows {
            let slack = worst.value - bound;
            w.write_record([
                b.to_string(),
                num(bound),
                vacuous.to_string(),
                num(worst.value),
                num(inverse_n),
                num(slack),
                (slack.abs() <= BOUND_TOL).to_string(),
            ])?;
        }
        w.flush()?;
        return Ok(());
    }

    writeln!(
        out,
        "design: {}, n = {n}, points = {}",
        design.kind(),
        design.space().len()
    )?;
    writeln!(out, "worst_case: {}", num(worst.value))?;
    writeln!(out, "inverse_n: {}", num(inverse_n))?;
    writeln!(out, "ratio_to_inverse_n: {}", num(worst.value / inverse_n))?;
    write_function(out, "witness", &worst.witness)?;
    if rows.is_empty() {
        writeln!(out, "bounds: no equal-measure partition of this space")?;
        return Ok(());
    }
    writeln!(out, "bounds:")?;
    writeln!(out, "  {:>4}  {:>24}  {:>20}  tight", "B", "bound", "slack")?;
    for (b, bound, vacuous) in rows {
        let slack = worst.value - bound;
        writeln!(
            out,
            "  {:>4}  {:>24}  {:>20}  {}",
            b,
            fmt_bound(bound, vacuous),
            num(slack),
            if slack.abs() <= BOUND_TOL {
                "yes"
            } else {
                "no"
            }
        )?;
    }
    Ok(())
}

pub fn witness(out: &mut impl Write, path: &Path, blocks: usize) -> CliResult<()> {
    let design = read_design(path)?;
    let partition = equal_partition(design.space(), blocks)?;
    let r = proof_witness(&design, &partition)?;
    writeln!(out, "blocks: {}", r.blocks)?;
    for (p, members) in partition.blocks().iter().enumerate() {
        let points: Vec<String> = members.iter().map(|k| (k + 1).to_string()).collect();
        writeln!(out, "  block {}: {}", p + 1, points.join(" "))?;
    }
    writeln!(out, "pair: ({}, {})", r.pair.0 + 1, r.pair.1 + 1)?;
    writeln!(out, "theta: {}", num(r.theta))?;
    writeln!(out, "theta_total: {}", num(r.theta_total))?;
    writeln!(out, "pigeonhole_cap: {}", num(r.pigeonhole_cap))?;
    writeln!(out, "guaranteed: {}", num(r.guaranteed))?;
    writeln!(out, "actual: {}", num(r.actual))?;
    writeln!(out, "bound: {}", fmt_bound(r.bound, r.vacuous))?;
    write_function(out, "witness", &r.witness)?;
    Ok(())
}

pub fn mse(out: &mut impl Write, design_path: &Path, function_path: &Path) -> CliResult<()> {
    let design = read_design(design_path)?;
    let f = read_function(function_path)?;
    check_dimensions(&design, &f)?;
    let integral = design.space().integral(&f)?;
    let scale = f.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if integral.abs() > 1e-12 * scale {
        eprintln!(
            "note: the function has integral {}; its centered version is evaluated",
            num(integral)
        );
    }
    writeln!(out, "mse: {}", num(mse_of_function(&design, &f)?))?;
    Ok(())
}

pub fn simulate(
    out: &mut impl Write,
    design_path: &Path,
    function_path: &Path,
    reps: usize,
    seed: u64,
) -> CliResult<()> {
    let design = read_design(design_path)?;
    let f = read_function(function_path)?;
    check_dimensions(&design, &f)?;
    let r = estimate_mse(&design, &f, reps, seed)?;
    writeln!(out, "exact_mse: {}", num(r.exact_mse))?;
    writeln!(out, "empirical_mse: {}", num(r.empirical_mse))?;
    writeln!(out, "std_error: {}", num(r.std_error))?;
    writeln!(out, "z: {}", num(r.z_score))?;
    writeln!(out, "reps: {}", r.reps)?;
    writeln!(out, "seed: {}", r.seed)?;
    if r.degenerate {
        writeln!(
            out,
            "note: the estimator was constant across replications; z compares empirical and exact directly"
        )?;
    }
    if !r.within(Z_GATE) {
        return Err(CliError::GateFailed(format!(
            "|z| = {} exceeds {}",
            num(r.z_score.abs()),
            Z_GATE
        )));
    }
    Ok(())
}

pub fn refine(
    out: &mut impl Write,
    kind: ContinuousKind,
    n: usize,
    bin_counts: &[usize],
) -> CliResult<()> {
    let design = ContinuousDesign::new(kind, n).map_err(usage)?;
    let table = refinement_sweep(&design, bin_counts).map_err(usage)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["kind", "n", "N", "bound", "worst_case", "slack"])?;
    for row in &table.rows {
        w.write_record([
            kind.name().to_string(),
            n.to_string(),
            row.bins.to_string(),
            num(row.bound),
            num(row.worst_case),
            num(row.slack),
        ])?;
    }
    w.flush()?;
    if !table.all_hold() {
        return Err(CliError::CheckFailed(
            "worst case below the bound at some bin count".into(),
        ));
    }
    Ok(())
}

pub fn verify(out: &mut impl Write, path: &Path) -> CliResult<()> {
    let design = read_design(path)?;
    let partitions = feasible_partitions(design.space());
    let report = verify_design(&design, &partitions);

    writeln!(
        out,
        "{:<22}  {:>4}  {:<6}  {:>20}  detail",
        "check", "B", "status", "slack"
    )?;
    for c in &report.checks {
        let status = match c.status {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Skipped => "SKIP",
        };
        let blocks = c.blocks.map_or("-".to_string(), |b| b.to_string());
        let slack = if c.slack.is_nan() {
            "-".into()
        } else {
            num(c.slack)
        };
        writeln!(
            out,
            "{:<22}  {:>4}  {:<6}  {:>20}  {}",
            c.name, blocks, status, slack, c.detail
        )?;
    }
    if let Some(w) = report.worst_case {
        writeln!(out, "worst_case: {}", num(w))?;
    }
    for s in &report.partitions {
        writeln!(
            out,
            "bound B={}: {}",
            s.blocks,
            fmt_bound(s.bound, s.vacuous)
        )?;
    }
    let failures = report.failures().count();
    writeln!(
        out,
        "result: {}",
        if failures == 0 { "PASS" } else { "FAIL" }
    )?;

    if !report.marginals_ok {
        print_marginal_table(&design.validate_marginals());
        return Err(CliError::InvalidDesign(
            "coordinate laws differ from the space measure".into(),
        ));
    }
    if failures > 0 {
        return Err(CliError::CheckFailed(format!("{failures} check(s) failed")));
    }
    Ok(())
}
