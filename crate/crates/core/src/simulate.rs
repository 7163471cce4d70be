//! Seeded Monte-Carlo estimates of the MSE, checked against the exact values.
//!
//! # Random streams
//!
//! All sampling uses `Xoshiro256PlusPlus` from `rand_xoshiro`, seeded through
//! its `seed_from_u64` (SplitMix64 expansion of the 64-bit seed).
//!
//! * [`estimate_mse`] draws from `seed_from_u64(seed)`.
//! * Row `j` (0-based) of [`compare_designs`] draws from
//!   `seed_from_u64(seed ^ (j + 1))` advanced by one `jump()` (2¹²⁸ steps),
//!   see [`derived_stream`].
//!
//! Replications are consumed strictly in order from one stream, so results are
//! bitwise reproducible given `(seed, reps)`.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::analysis::mse_with_matrix;
use crate::design::{Design, DesignKind};
use crate::error::{Error, Result};
use crate::space::SpaceFunction;

pub const MIN_REPS: usize = 100;

/// Relative spread below which the squared deviations count as constant.
pub const DEGENERATE_SPREAD: f64 = 1e-10;

/// The generator behind every simulation.
pub type SimRng = Xoshiro256PlusPlus;

/// `seed_from_u64(seed)`.
pub fn stream(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Independent stream number `index` derived from a master seed.
pub fn derived_stream(seed: u64, index: usize) -> SimRng {
    let mut rng = SimRng::seed_from_u64(seed ^ (index as u64).wrapping_add(1));
    rng.jump();
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub reps: usize,
    /// Mean of `((1/n) ∑_i f(z_i) − ∫f dμ)²` over the replications.
    pub empirical_mse: f64,
    pub exact_mse: f64,
    /// Sample standard deviation of the squared deviations over `√reps`.
    pub std_error: f64,
    /// `(empirical − exact) / std_error`; see [`SimulationResult::degenerate`].
    pub z_score: f64,
    pub seed: u64,
    /// The squared deviation was constant across replications up to rounding
    /// (sample standard deviation at most [`DEGENERATE_SPREAD`] times its
    /// mean), so the standard error carries no information. The z-score is
    /// then 0 when empirical and exact agree to 1e-12 and infinite otherwise.
    pub degenerate: bool,
}

impl SimulationResult {
    pub fn within(&self, z_gate: f64) -> bool {
        self.z_score.abs() <= z_gate
    }
}

/// Monte-Carlo estimate of the MSE of `f` under `design`, `reps` draws from
/// [`stream`]`(seed)`.
pub fn estimate_mse(
    design: &Design,
    f: &SpaceFunction,
    reps: usize,
    seed: u64,
) -> Result<SimulationResult> {
    estimate_mse_with_rng(design, f, reps, &mut stream(seed), seed)
}

/// [`estimate_mse`] drawing from a caller-owned generator; `seed` is only
/// recorded in the result.
pub fn estimate_mse_with_rng(
    design: &Design,
    f: &SpaceFunction,
    reps: usize,
    rng: &mut SimRng,
    seed: u64,
) -> Result<SimulationResult> {
    if reps < MIN_REPS {
        return Err(Error::TooFewReplications {
            min: MIN_REPS,
            actual: reps,
        });
    }
    let space = design.space();
    let centered = space.center(f)?;
    let exact_mse = mse_with_matrix(&design.second_order_matrix(), f)?;
    let n = design.n() as f64;

    let mut tuple = Vec::with_capacity(design.n());
    let mut values = Vec::with_capacity(design.n());
    // Welford accumulation of the squared deviations.
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for r in 0..reps {
        design.sample_into(rng, &mut tuple);
        values.clear();
        values.extend(tuple.iter().map(|&k| centered[k]));
        // Summing in sorted order makes the estimator a function of the
        // multiset of sampled points only.
        values.sort_unstable_by(f64::total_cmp);
        let deviation = values.iter().sum::<f64>() / n;
        let e = deviation * deviation;
        let delta = e - mean;
        mean += delta / (r + 1) as f64;
        m2 += delta * (e - mean);
    }

    let variance = m2 / (reps - 1) as f64;
    let std_error = (variance / reps as f64).sqrt();
    let degenerate = variance.sqrt() <= DEGENERATE_SPREAD * mean.abs();
    let z_score = if degenerate {
        let gap = mean - exact_mse;
        if gap.abs() <= 1e-12 * exact_mse.abs().max(1.0) {
            0.0
        } else {
            f64::INFINITY.copysign(gap)
        }
    } else {
        (mean - exact_mse) / std_error
    };
    Ok(SimulationResult {
        reps,
        empirical_mse: mean,
        exact_mse,
        std_error,
        z_score,
        seed,
        degenerate,
    })
}

/// One row of [`compare_designs`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    /// 0-based position in the input list.
    pub index: usize,
    pub kind: DesignKind,
    pub result: SimulationResult,
}

/// Simulates each design on its own [`derived_stream`] of `seed`.
pub fn compare_designs(
    designs: &[Design],
    f: &SpaceFunction,
    reps: usize,
    seed: u64,
) -> Result<Vec<ComparisonRow>> {
    if let Some(first) = designs.first() {
        if designs
            .iter()
            .any(|d| d.n() != first.n() || d.space() != first.space())
        {
            return Err(Error::MixedSpaces);
        }
    }
    designs
        .iter()
        .enumerate()
        .map(|(index, d)| {
            let mut rng = derived_stream(seed, index);
            Ok(ComparisonRow {
                index,
                kind: d.kind(),
                result: estimate_mse_with_rng(d, f, reps, &mut rng, seed)?,
            })
        })
        .collect()
}
