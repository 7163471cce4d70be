//! Dependent designs on `[0, 1]` with Lebesgue measure, their exact
//! discretization on equal-length bins, and refinement sweeps over the number
//! of bins.
//!
//! Bin `p` (0-based) of an `N`-bin partition is `[p/N, (p+1)/N)`, the last one
//! closed on the right. A continuous design is pushed forward to the uniform
//! space of `N` points by recording which bin each coordinate falls in; for the
//! catalog below those bin probabilities have closed forms, so no sampling is
//! involved.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::analysis::{theorem_bound, worst_case_mse, BOUND_TOL};
use crate::design::Design;
use crate::error::{Error, Result};
use crate::space::{FiniteSpace, Partition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ContinuousKind {
    /// Independent uniform points.
    IidUniform,
    /// `n = 2`, `Z₂ = 1 − Z₁`.
    Antithetic,
    /// `Z_i = U + (i−1)/n mod 1`.
    Rotation,
    /// One uniform point in each stratum `[s/n, (s+1)/n)`, strata assigned to
    /// coordinates by a uniform random permutation.
    StratifiedPermuted,
}

impl ContinuousKind {
    pub const ALL: [ContinuousKind; 4] = [
        ContinuousKind::IidUniform,
        ContinuousKind::Antithetic,
        ContinuousKind::Rotation,
        ContinuousKind::StratifiedPermuted,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ContinuousKind::IidUniform => "iid_uniform",
            ContinuousKind::Antithetic => "antithetic",
            ContinuousKind::Rotation => "rotation",
            ContinuousKind::StratifiedPermuted => "stratified_permuted",
        }
    }
}

impl fmt::Display for ContinuousKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ContinuousKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|k| k.name()).collect();
                format!("unknown kind `{s}`, expected one of {}", names.join(", "))
            })
    }
}

/// A design of `n` uniform points on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContinuousDesign {
    kind: ContinuousKind,
    n: usize,
}

impl ContinuousDesign {
    pub fn new(kind: ContinuousKind, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSize(
                "a design needs at least one point".into(),
            ));
        }
        if kind == ContinuousKind::Antithetic && n != 2 {
            return Err(Error::InvalidSize(format!(
                "antithetic designs have exactly 2 points, got {n}"
            )));
        }
        Ok(Self { kind, n })
    }

    pub fn kind(&self) -> ContinuousKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// One draw of the `n` points.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let n = self.n;
        match self.kind {
            ContinuousKind::IidUniform => (0..n).map(|_| rng.gen::<f64>()).collect(),
            ContinuousKind::Antithetic => {
                let u = rng.gen::<f64>();
                vec![u, 1.0 - u]
            }
            ContinuousKind::Rotation => {
                let u = rng.gen::<f64>();
                (0..n).map(|i| (u + i as f64 / n as f64).fract()).collect()
            }
            ContinuousKind::StratifiedPermuted => {
                let mut strata: Vec<usize> = (0..n).collect();
                strata.shuffle(rng);
                strata
                    .into_iter()
                    .map(|s| (s as f64 + rng.gen::<f64>()) / n as f64)
                    .collect()
            }
        }
    }
}

/// `N` intervals of length `1/N` covering `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntervalPartition {
    bins: usize,
}

/// Equal-length partition of `[0, 1]`; the constructive equal-measure
/// partition of the unit interval.
pub fn interval_partition(bins: usize) -> Result<IntervalPartition> {
    if bins < 2 {
        return Err(Error::InvalidSize(format!(
            "an interval partition needs at least 2 bins, got {bins}"
        )));
    }
    Ok(IntervalPartition { bins })
}

impl IntervalPartition {
    pub fn bins(&self) -> usize {
        self.bins
    }

    /// Endpoints of bin `p`; the right end is excluded except for the last bin.
    pub fn interval(&self, p: usize) -> (f64, f64) {
        let n = self.bins as f64;
        (p as f64 / n, (p + 1) as f64 / n)
    }

    pub fn measure(&self, p: usize) -> f64 {
        let (a, b) = self.interval(p);
        b - a
    }

    pub fn bin_of(&self, x: f64) -> usize {
        ((x * self.bins as f64) as usize).min(self.bins - 1)
    }

    /// The discretized space: one point per bin.
    pub fn space(&self) -> FiniteSpace {
        FiniteSpace::uniform(self.bins).expect("at least two bins")
    }

    /// The bins as blocks of the discretized space.
    pub fn partition(&self) -> Partition {
        Partition::singletons(&self.space())
    }
}

/// The law of the bin indices of `design` on `bins` equal bins.
pub fn discretize(design: &ContinuousDesign, bins: usize) -> Result<Design> {
    let n = design.n;
    let incompatible = |reason: String| Error::IncompatibleBinCount { bins, reason };
    if bins < 2 {
        return Err(incompatible("at least 2 bins are needed".into()));
    }
    let aligned = matches!(
        design.kind,
        ContinuousKind::Rotation | ContinuousKind::StratifiedPermuted
    );
    if aligned && !bins.is_multiple_of(n) {
        return Err(incompatible(format!(
            "{} needs a multiple of n = {n}",
            design.kind
        )));
    }
    let space = FiniteSpace::uniform(bins)?;
    let p = 1.0 / bins as f64;
    match design.kind {
        ContinuousKind::IidUniform => Design::iid(space, n),
        // 1 − U lands in the mirrored bin except on a null set of boundaries.
        ContinuousKind::Antithetic => Design::explicit(
            space,
            2,
            (0..bins).map(|k| (vec![k, bins - 1 - k], p)).collect(),
        ),
        // A shift by (i−1)/n is a shift by exactly (i−1)·N/n bins.
        ContinuousKind::Rotation => {
            let width = bins / n;
            Design::explicit(
                space,
                n,
                (0..bins)
                    .map(|k| ((0..n).map(|i| (k + i * width) % bins).collect(), p))
                    .collect(),
            )
        }
        ContinuousKind::StratifiedPermuted => Design::stratified(bins, n),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub bins: usize,
    pub bound: f64,
    pub worst_case: f64,
    /// `worst_case − bound`.
    pub slack: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub kind: ContinuousKind,
    pub n: usize,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }

    /// Bounds never decrease as the bin count grows, and stay below `1/n`.
    pub fn bounds_squeeze(&self) -> bool {
        let mut rows: Vec<&SweepRow> = self.rows.iter().collect();
        rows.sort_by_key(|r| r.bins);
        let limit = 1.0 / self.n as f64;
        rows.iter().all(|r| r.bound < limit) && rows.windows(2).all(|w| w[0].bound <= w[1].bound)
    }
}

/// Bound and exact worst case of the discretized design at each bin count.
pub fn refinement_sweep(design: &ContinuousDesign, bin_counts: &[usize]) -> Result<SweepTable> {
    let rows = bin_counts
        .iter()
        .map(|&bins| {
            let finite = discretize(design, bins)?;
            let bound = theorem_bound(design.n, bins)?;
            let worst_case = worst_case_mse(&finite)?.value;
            Ok(SweepRow {
                bins,
                bound,
                worst_case,
                slack: worst_case - bound,
                holds: worst_case >= bound - BOUND_TOL,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable {
        kind: design.kind,
        n: design.n,
        rows,
    })
}
