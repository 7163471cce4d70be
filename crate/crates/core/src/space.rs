//! Finite probability spaces, real functions on them, and partitions into
//! measurable blocks.

use crate::error::{Error, Result};
use crate::numeric::kahan_sum;

/// Tolerance on probability sums and equal-measure checks.
pub const WEIGHT_TOL: f64 = 1e-9;

/// A finite probability space `{0, .., K-1}` with strictly positive point
/// weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSpace {
    weights: Vec<f64>,
}

impl FiniteSpace {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidSize(
                "a space needs at least one point".into(),
            ));
        }
        for (index, &w) in weights.iter().enumerate() {
            if !w.is_finite() {
                return Err(Error::NonFinite(index));
            }
            if w <= 0.0 {
                return Err(Error::NonPositiveWeight { index, value: w });
            }
        }
        let sum = kahan_sum(weights.iter().copied());
        if (sum - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::NotNormalized { sum });
        }
        Ok(Self { weights })
    }

    /// Uniform probability on `size` points.
    pub fn uniform(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidSize("uniform space of 0 points".into()));
        }
        Ok(Self {
            weights: vec![1.0 / size as f64; size],
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, k: usize) -> f64 {
        self.weights[k]
    }

    /// True when every weight equals `1/K` within [`WEIGHT_TOL`].
    pub fn is_uniform(&self) -> bool {
        let u = 1.0 / self.len() as f64;
        self.weights.iter().all(|w| (w - u).abs() <= WEIGHT_TOL)
    }

    fn check_dim(&self, f: &SpaceFunction) -> Result<()> {
        if f.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                actual: f.len(),
            });
        }
        Ok(())
    }

    /// `∑_k μ_k f(k)`.
    pub fn integral(&self, f: &SpaceFunction) -> Result<f64> {
        self.check_dim(f)?;
        Ok(kahan_sum(
            self.weights.iter().zip(f.values()).map(|(w, v)| w * v),
        ))
    }

    /// `sqrt(∑_k μ_k f(k)²)`.
    pub fn l2_norm(&self, f: &SpaceFunction) -> Result<f64> {
        self.check_dim(f)?;
        Ok(kahan_sum(self.weights.iter().zip(f.values()).map(|(w, v)| w * v * v)).sqrt())
    }

    /// `f - ∫f dμ`, pointwise.
    ///
    /// A function whose integral is already at rounding level is returned
    /// unchanged, which makes centering idempotent.
    pub fn center(&self, f: &SpaceFunction) -> Result<SpaceFunction> {
        let mean = self.integral(f)?;
        if self.is_rounding_level(mean, f) {
            return Ok(f.clone());
        }
        let mut values: Vec<f64> = f.values().iter().map(|v| v - mean).collect();
        // One refinement pass brings the integral of the result to rounding level.
        let residual = kahan_sum(self.weights.iter().zip(&values).map(|(w, v)| w * v));
        if residual != 0.0 {
            values.iter_mut().for_each(|v| *v -= residual);
        }
        Ok(SpaceFunction { values })
    }

    fn is_rounding_level(&self, mean: f64, f: &SpaceFunction) -> bool {
        let scale = kahan_sum(
            self.weights
                .iter()
                .zip(f.values())
                .map(|(w, v)| w * v.abs()),
        );
        mean.abs() <= 16.0 * f64::EPSILON * scale
    }
}

/// A real function on a finite space, stored as its value at each point.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceFunction {
    values: Vec<f64>,
}

impl SpaceFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { values })
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            values: vec![0.0; len],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }
}

impl std::ops::Index<usize> for SpaceFunction {
    type Output = f64;

    fn index(&self, k: usize) -> &f64 {
        &self.values[k]
    }
}

/// A partition of a finite space into nonempty blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    block_of: Vec<usize>,
    blocks: Vec<Vec<usize>>,
    block_measures: Vec<f64>,
    equal_measure: bool,
}

impl Partition {
    /// Builds a partition from a block label per point. Labels must cover
    /// `0..B` with no empty block.
    pub fn new(space: &FiniteSpace, block_of: Vec<usize>) -> Result<Self> {
        if block_of.len() != space.len() {
            return Err(Error::DimensionMismatch {
                expected: space.len(),
                actual: block_of.len(),
            });
        }
        let count = block_of.iter().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); count];
        for (k, &b) in block_of.iter().enumerate() {
            blocks[b].push(k);
        }
        if let Some(empty) = blocks.iter().position(Vec::is_empty) {
            return Err(Error::InvalidSize(format!("block {empty} is empty")));
        }
        let block_measures: Vec<f64> = blocks
            .iter()
            .map(|b| kahan_sum(b.iter().map(|&k| space.weight(k))))
            .collect();
        let target = 1.0 / count as f64;
        let equal_measure = block_measures
            .iter()
            .all(|m| (m - target).abs() <= WEIGHT_TOL);
        Ok(Self {
            block_of,
            blocks,
            block_measures,
            equal_measure,
        })
    }

    /// Every point in its own block.
    pub fn singletons(space: &FiniteSpace) -> Self {
        Self::new(space, (0..space.len()).collect()).expect("singleton blocks are never empty")
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn num_points(&self) -> usize {
        self.block_of.len()
    }

    pub fn block_of(&self, k: usize) -> usize {
        self.block_of[k]
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_measures(&self) -> &[f64] {
        &self.block_measures
    }

    pub fn is_equal_measure(&self) -> bool {
        self.equal_measure
    }

    /// The contrast `sqrt(B/2) (1_{X_p} - 1_{X_q})`: zero integral and unit
    /// L² norm on an equal-measure partition.
    pub fn indicator_contrast(&self, p: usize, q: usize) -> Result<SpaceFunction> {
        if !self.equal_measure {
            return Err(Error::UnequalPartition);
        }
        let blocks = self.num_blocks();
        for b in [p, q] {
            if b >= blocks {
                return Err(Error::BlockOutOfRange { block: b, blocks });
            }
        }
        if p == q {
            return Err(Error::SameBlock(p));
        }
        let height = (blocks as f64 / 2.0).sqrt();
        let values = self
            .block_of
            .iter()
            .map(|&b| {
                if b == p {
                    height
                } else if b == q {
                    -height
                } else {
                    0.0
                }
            })
            .collect();
        Ok(SpaceFunction { values })
    }
}

/// Splits `space` into `blocks` groups of measure `1/blocks` each.
///
/// Exact backtracking over point weights. Every block is seeded with the
/// smallest unassigned point and then grown in increasing index order, so the
/// first grouping found is the lexicographically smallest one and blocks come
/// out ordered by their smallest point.
pub fn equal_partition(space: &FiniteSpace, blocks: usize) -> Result<Partition> {
    if blocks < 2 {
        return Err(Error::InvalidPartitionSize(blocks));
    }
    let infeasible = Error::PartitionInfeasible { blocks };
    if blocks > space.len() {
        return Err(infeasible);
    }
    let target = 1.0 / blocks as f64;
    if space.weights().iter().any(|&w| w > target + WEIGHT_TOL) {
        return Err(infeasible);
    }

    let mut search = Search {
        weights: space.weights(),
        target,
        assigned: vec![None; space.len()],
    };
    search.assigned[0] = Some(0);
    if !search.fill(0, space.weight(0), 1) {
        return Err(infeasible);
    }
    let labels = search
        .assigned
        .into_iter()
        .map(|b| b.expect("search assigns every point"))
        .collect();
    let partition = Partition::new(space, labels)?;
    debug_assert_eq!(partition.num_blocks(), blocks);
    Ok(partition)
}

struct Search<'a> {
    weights: &'a [f64],
    target: f64,
    assigned: Vec<Option<usize>>,
}

impl Search<'_> {
    fn fill(&mut self, block: usize, sum: f64, from: usize) -> bool {
        if (sum - self.target).abs() <= WEIGHT_TOL {
            let Some(first) = self.assigned.iter().position(Option::is_none) else {
                return true;
            };
            self.assigned[first] = Some(block + 1);
            if self.fill(block + 1, self.weights[first], first + 1) {
                return true;
            }
            self.assigned[first] = None;
            return false;
        }
        // Candidates of a weight already tried at this depth lead to the same
        // residual problem, so they are skipped.
        let mut tried: Vec<f64> = Vec::new();
        for c in from..self.weights.len() {
            let w = self.weights[c];
            if self.assigned[c].is_some() || sum + w > self.target + WEIGHT_TOL {
                continue;
            }
            if tried.contains(&w) {
                continue;
            }
            self.assigned[c] = Some(block);
            if self.fill(block, sum + w, c + 1) {
                return true;
            }
            self.assigned[c] = None;
            tried.push(w);
        }
        false
    }
}
