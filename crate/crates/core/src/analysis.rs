//! Exact mean squared error, the worst case over unit functions, the lower
//! bound for designs on spaces with an equal-measure partition, and the
//! pigeonhole witness that certifies it.

use crate::design::{BlockMatrix, Design, SecondOrderMatrix};
use crate::error::{Error, Result};
use crate::numeric::{kahan_sum, KahanSum};
use crate::space::{FiniteSpace, Partition, SpaceFunction};
use crate::spectral::{fix_sign, jacobi_eigh, quadratic_form, SymmetricMatrix, DEFAULT_JACOBI_TOL};

/// Slack used when comparing MSE values against bounds.
pub const BOUND_TOL: f64 = 1e-9;

/// Worst-case MSE over zero-integral unit functions, with a maximizer.
#[derive(Debug, Clone)]
pub struct WorstCase {
    pub value: f64,
    /// Zero integral and unit L²(μ) norm. On a one-point space no such
    /// function exists and this is the zero function.
    pub witness: SpaceFunction,
}

/// Outcome of the pigeonhole selection over block pairs.
#[derive(Debug, Clone)]
pub struct WitnessReport {
    /// 0-based blocks `(p, q)`, `p < q`, minimizing `θ_{p,q}`.
    pub pair: (usize, usize),
    pub theta: f64,
    /// `∑_{p≠q} θ_{p,q}`, at most `2n(n−1)`.
    pub theta_total: f64,
    /// `2n(n−1) / (B(B−1))`: the minimum `θ` never exceeds it.
    pub pigeonhole_cap: f64,
    /// `1/n − B θ / (2n²)`, a lower bound on `actual`.
    pub guaranteed: f64,
    /// Exact MSE of the witness.
    pub actual: f64,
    /// `theorem_bound(n, B)`.
    pub bound: f64,
    pub vacuous: bool,
    pub witness: SpaceFunction,
    pub blocks: usize,
    pub n: usize,
}

/// `E[((1/n) ∑_i f(Z_i) − ∫f dμ)²]`, evaluated as `f̄ᵀ Q f̄` with `f̄` the
/// centered function.
pub fn mse_of_function(design: &Design, f: &SpaceFunction) -> Result<f64> {
    mse_with_matrix(&design.second_order_matrix(), f)
}

/// [`mse_of_function`] against a precomputed second-order matrix.
pub fn mse_with_matrix(q: &SecondOrderMatrix, f: &SpaceFunction) -> Result<f64> {
    let centered = q.space().center(f)?;
    quadratic_form(q.matrix(), centered.values())
}

/// Whitened covariance `D^{-1/2} (Q − μμᵀ) D^{-1/2}` with `D = diag(μ)`.
pub fn whitened_covariance(q: &SecondOrderMatrix) -> SymmetricMatrix {
    let mu = q.space().weights();
    SymmetricMatrix::from_fn(q.dim(), |k, l| {
        (q.get(k, l) - mu[k] * mu[l]) / (mu[k] * mu[l]).sqrt()
    })
}

/// Supremum of the MSE over functions of unit L²(μ) norm.
///
/// The sup is the top eigenvalue of the whitened covariance `A`. The constant
/// direction `s = (√μ_k)` is an exact null vector of `A` for any design with
/// law `μ` at every coordinate; the eigenproblem is solved on `P A P − s sᵀ`
/// with `P` the projector onto `s^⊥`, which moves `s` to eigenvalue `−1` so
/// that the top eigenvector always yields a zero-integral witness, even when
/// `A` vanishes.
pub fn worst_case_mse(design: &Design) -> Result<WorstCase> {
    worst_case_from_matrix(&design.second_order_matrix())
}

pub fn worst_case_from_matrix(q: &SecondOrderMatrix) -> Result<WorstCase> {
    let size = q.dim();
    if size == 1 {
        return Ok(WorstCase {
            value: 0.0,
            witness: SpaceFunction::zeros(1),
        });
    }
    let a = whitened_covariance(q);
    let s: Vec<f64> = q.space().weights().iter().map(|w| w.sqrt()).collect();
    let w = a.mul_vec(&s)?;
    let c = kahan_sum(w.iter().zip(&s).map(|(x, y)| x * y));
    let deflated = SymmetricMatrix::from_fn(size, |k, l| {
        a.get(k, l) - w[k] * s[l] - s[k] * w[l] + (c - 1.0) * s[k] * s[l]
    });
    let eig = jacobi_eigh(&deflated, DEFAULT_JACOBI_TOL)?;

    let mut v = eig.vector(0).to_vec();
    let along = kahan_sum(v.iter().zip(&s).map(|(x, y)| x * y));
    v.iter_mut().zip(&s).for_each(|(x, y)| *x -= along * y);
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    fix_sign(&mut v);
    let witness = SpaceFunction::new(v.iter().zip(&s).map(|(x, y)| x / y).collect())?;
    Ok(WorstCase {
        value: eig.values()[0],
        witness,
    })
}

/// `(1/n) (1 − (n−1)/(N−1))` for `n` points and an equal partition into `N`
/// blocks. Nonpositive, hence vacuous, when `n ≥ N`.
pub fn theorem_bound(n: usize, blocks: usize) -> Result<f64> {
    if blocks < 2 {
        return Err(Error::InvalidPartitionSize(blocks));
    }
    if n == 0 {
        return Err(Error::InvalidSize("bound needs at least one point".into()));
    }
    let n_f = n as f64;
    Ok((1.0 - (n_f - 1.0) / (blocks as f64 - 1.0)) / n_f)
}

pub fn is_vacuous(n: usize, blocks: usize) -> bool {
    n >= blocks
}

/// `θ[p, q] = T[p, q] + T[q, p]` off the diagonal, 0 on it, where `T` is the
/// design's pairwise block aggregate.
pub fn theta_matrix(design: &Design, partition: &Partition) -> Result<BlockMatrix> {
    if !partition.is_equal_measure() {
        return Err(Error::UnequalPartition);
    }
    let t = design.pairwise_block_aggregate(partition)?;
    Ok(BlockMatrix::from_fn(t.dim(), |p, q| {
        if p == q {
            0.0
        } else {
            t.get(p, q) + t.get(q, p)
        }
    }))
}

/// Picks the block pair with the smallest `θ` (lexicographically first on
/// ties) and evaluates its indicator contrast.
pub fn proof_witness(design: &Design, partition: &Partition) -> Result<WitnessReport> {
    let blocks = partition.num_blocks();
    if blocks < 2 {
        return Err(Error::InvalidPartitionSize(blocks));
    }
    let theta = theta_matrix(design, partition)?;
    let mut pair = (0, 1);
    let mut total = KahanSum::new();
    for p in 0..blocks {
        for q in 0..blocks {
            if p == q {
                continue;
            }
            total.add(theta.get(p, q));
            if p < q && theta.get(p, q) < theta.get(pair.0, pair.1) {
                pair = (p, q);
            }
        }
    }
    let n = design.n();
    let n_f = n as f64;
    let b_f = blocks as f64;
    let min_theta = theta.get(pair.0, pair.1);
    let witness = partition.indicator_contrast(pair.0, pair.1)?;
    let q = design.second_order_matrix();
    Ok(WitnessReport {
        pair,
        theta: min_theta,
        theta_total: total.value(),
        pigeonhole_cap: 2.0 * n_f * (n_f - 1.0) / (b_f * (b_f - 1.0)),
        guaranteed: 1.0 / n_f - b_f / (2.0 * n_f * n_f) * min_theta,
        actual: mse_with_matrix(&q, &witness)?,
        bound: theorem_bound(n, blocks)?,
        vacuous: is_vacuous(n, blocks),
        witness,
        blocks,
        n,
    })
}

/// Every equal-measure partition `equal_partition(space, B)` for `B = 2..=K`
/// that exists.
pub fn feasible_partitions(space: &FiniteSpace) -> Vec<Partition> {
    (2..=space.len())
        .filter_map(|b| crate::space::equal_partition(space, b).ok())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

/// One entry of a [`VerificationReport`]. `slack` is the margin by which the
/// check holds; negative means it failed.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub blocks: Option<usize>,
    pub status: CheckStatus,
    pub slack: f64,
    pub detail: String,
}

impl Check {
    fn margin(name: &'static str, blocks: Option<usize>, slack: f64, detail: String) -> Self {
        let status = if slack >= 0.0 {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        Self {
            name,
            blocks,
            status,
            slack,
            detail,
        }
    }

    fn skipped(name: &'static str, blocks: Option<usize>, detail: impl Into<String>) -> Self {
        Self {
            name,
            blocks,
            status: CheckStatus::Skipped,
            slack: f64::NAN,
            detail: detail.into(),
        }
    }

    fn failed(name: &'static str, blocks: Option<usize>, detail: String) -> Self {
        Self {
            name,
            blocks,
            status: CheckStatus::Fail,
            slack: f64::NAN,
            detail,
        }
    }
}

/// Bound and worst case for one partition size.
#[derive(Debug, Clone)]
pub struct PartitionSummary {
    pub blocks: usize,
    pub bound: f64,
    pub vacuous: bool,
    pub witness: Option<WitnessReport>,
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub n: usize,
    pub marginals_ok: bool,
    pub worst_case: Option<f64>,
    pub checks: Vec<Check>,
    pub partitions: Vec<PartitionSummary>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail)
    }
}

/// Runs the marginal, second-order and bound checks on `design`, with the
/// bound checks repeated for each partition in input order.
pub fn verify_design(design: &Design, partitions: &[Partition]) -> VerificationReport {
    let mut checks = Vec::new();
    let marginals = design.validate_marginals();
    let marginals_ok = marginals.passed();
    checks.push(Check::margin(
        "marginals",
        None,
        marginals.tolerance - marginals.max_deviation(),
        format!("max deviation {:e}", marginals.max_deviation()),
    ));

    let q = design.second_order_matrix();
    checks.push(Check::margin(
        "q_symmetric",
        None,
        1e-12 - q.symmetry_error(),
        format!("asymmetry {:e}", q.symmetry_error()),
    ));
    checks.push(Check::margin(
        "q_row_sums",
        None,
        1e-9 - q.row_sum_error(),
        format!("row sum error {:e}", q.row_sum_error()),
    ));
    match q.min_eigenvalue() {
        Ok(min) => checks.push(Check::margin(
            "q_psd",
            None,
            min + 1e-10,
            format!("min eigenvalue {min:e}"),
        )),
        Err(e) => checks.push(Check::failed("q_psd", None, e.to_string())),
    }

    let worst = match worst_case_from_matrix(&q) {
        Ok(w) => Some(w.value),
        Err(e) => {
            checks.push(Check::failed("worst_case", None, e.to_string()));
            None
        }
    };

    let n = design.n();
    let n_f = n as f64;
    let mut summaries = Vec::new();
    for partition in partitions {
        let b = partition.num_blocks();
        let tag = Some(b);
        if !marginals_ok {
            checks.push(Check::skipped(
                "bound_claims",
                tag,
                "marginals differ from the space measure",
            ));
            continue;
        }
        if !partition.is_equal_measure() || b < 2 {
            checks.push(Check::skipped(
                "bound_claims",
                tag,
                "partition is not an equal-measure partition",
            ));
            continue;
        }
        let report = match proof_witness(design, partition) {
            Ok(r) => r,
            Err(e) => {
                checks.push(Check::failed("proof_witness", tag, e.to_string()));
                continue;
            }
        };
        let cap_total = 2.0 * n_f * (n_f - 1.0);
        checks.push(Check::margin(
            "theta_total",
            tag,
            cap_total + 1e-9 - report.theta_total,
            format!("sum {} <= 2n(n-1) = {}", report.theta_total, cap_total),
        ));
        checks.push(Check::margin(
            "pigeonhole",
            tag,
            report.pigeonhole_cap + 1e-12 - report.theta,
            format!("min theta {} <= {}", report.theta, report.pigeonhole_cap),
        ));
        checks.push(Check::margin(
            "actual_ge_guaranteed",
            tag,
            report.actual - report.guaranteed + BOUND_TOL,
            format!(
                "actual {} >= guaranteed {}",
                report.actual, report.guaranteed
            ),
        ));
        checks.push(Check::margin(
            "guaranteed_ge_bound",
            tag,
            report.guaranteed - report.bound + 1e-12,
            format!("guaranteed {} >= bound {}", report.guaranteed, report.bound),
        ));
        if let Some(w) = worst {
            checks.push(Check::margin(
                "worst_case_ge_bound",
                tag,
                w - report.bound + BOUND_TOL,
                format!("worst case {} >= bound {}", w, report.bound),
            ));
        }
        summaries.push(PartitionSummary {
            blocks: b,
            bound: report.bound,
            vacuous: report.vacuous,
            witness: Some(report),
        });
    }

    VerificationReport {
        n,
        marginals_ok,
        worst_case: worst,
        checks,
        partitions: summaries,
    }
}
