//! Joint laws of `n` random points on a finite space, their second-order
//! summaries, and seeded sampling.
//!
//! Every design exposes two exact summaries, computed in closed form for the
//! built-in kinds and by enumeration or convex combination otherwise:
//!
//! * the first-order mass `m_k = ∑_i P(Z_i = k)`, which is `n μ_k` whenever
//!   each coordinate has law `μ`;
//! * the pair mass `Π[k, l] = ∑_{i≠j} P(Z_i = k, Z_j = l)`.
//!
//! The second-order matrix is `Q = (Π + diag(m)) / n²`, the expected outer
//! product of the empirical measure `ν = (1/n) ∑_i δ_{Z_i}`.

use std::collections::BTreeMap;
use std::fmt;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::numeric::{kahan_sum, KahanSum};
use crate::space::{FiniteSpace, Partition, WEIGHT_TOL};
use crate::spectral::{jacobi_eigh, SymmetricMatrix, DEFAULT_JACOBI_TOL};

/// Largest support accepted by [`Design::explicit`].
pub const MAX_ATOMS: usize = 1_000_000;

/// Which family a design belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DesignKind {
    /// Independent points, each with law `μ`.
    Iid,
    /// Uniform law on ordered `n`-tuples of distinct points of a uniform space.
    Srswor,
    /// `Z_i = Y + i mod N` with `Y` uniform.
    Cyclic,
    /// `n` equal strata of consecutive points, one uniform point per stratum,
    /// strata assigned to coordinates by a uniform random permutation.
    Stratified,
    /// A user-supplied finite joint law.
    Explicit,
    /// A convex combination of designs sharing space and point count.
    Mixture,
}

impl DesignKind {
    pub fn name(self) -> &'static str {
        match self {
            DesignKind::Iid => "iid",
            DesignKind::Srswor => "srswor",
            DesignKind::Cyclic => "cyclic",
            DesignKind::Stratified => "stratified",
            DesignKind::Explicit => "explicit",
            DesignKind::Mixture => "mixture",
        }
    }
}

impl fmt::Display for DesignKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One point of an explicit joint law.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub tuple: Vec<usize>,
    pub prob: f64,
}

#[derive(Debug, Clone)]
enum Law {
    Iid(WeightedIndex<f64>),
    Srswor,
    Cyclic,
    Stratified,
    Explicit {
        atoms: Vec<Atom>,
        picker: WeightedIndex<f64>,
    },
    Mixture {
        components: Vec<Design>,
        weights: Vec<f64>,
        picker: WeightedIndex<f64>,
    },
}

/// The joint law of `(Z_1, …, Z_n)` on a finite space.
#[derive(Debug, Clone)]
pub struct Design {
    space: FiniteSpace,
    n: usize,
    law: Law,
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidSize(
            "a design needs at least one point".into(),
        ));
    }
    Ok(())
}

fn check_fits(size: usize, n: usize) -> Result<()> {
    check_n(n)?;
    if n > size {
        return Err(Error::InfeasibleDesign(format!(
            "{n} distinct points requested from a space of {size}"
        )));
    }
    Ok(())
}

impl Design {
    /// Independent points with law `μ`.
    pub fn iid(space: FiniteSpace, n: usize) -> Result<Self> {
        check_n(n)?;
        let picker = WeightedIndex::new(space.weights()).expect("space weights are positive");
        Ok(Self {
            space,
            n,
            law: Law::Iid(picker),
        })
    }

    /// Sampling without replacement from the uniform space of `size` points:
    /// every ordered `n`-tuple of distinct points has probability
    /// `(size - n)! / size!`.
    pub fn srswor(size: usize, n: usize) -> Result<Self> {
        check_fits(size, n)?;
        Ok(Self {
            space: FiniteSpace::uniform(size)?,
            n,
            law: Law::Srswor,
        })
    }

    /// Cyclic shifts `Z_i = Y + i mod size` of a uniform start `Y`.
    pub fn cyclic(size: usize, n: usize) -> Result<Self> {
        check_fits(size, n)?;
        Ok(Self {
            space: FiniteSpace::uniform(size)?,
            n,
            law: Law::Cyclic,
        })
    }

    /// Stratified design on the uniform space of `size` points; `size` must be
    /// a multiple of `n`.
    pub fn stratified(size: usize, n: usize) -> Result<Self> {
        check_fits(size, n)?;
        if !size.is_multiple_of(n) {
            return Err(Error::InfeasibleDesign(format!(
                "{size} points cannot be split into {n} equal strata"
            )));
        }
        Ok(Self {
            space: FiniteSpace::uniform(size)?,
            n,
            law: Law::Stratified,
        })
    }

    /// A finite joint law given by atoms `(tuple, probability)` with 0-based
    /// point indices. Duplicate tuples are merged; atoms are kept in tuple
    /// order.
    pub fn explicit(space: FiniteSpace, n: usize, atoms: Vec<(Vec<usize>, f64)>) -> Result<Self> {
        check_n(n)?;
        if atoms.is_empty() {
            return Err(Error::InvalidSize("explicit design without atoms".into()));
        }
        if atoms.len() > MAX_ATOMS {
            return Err(Error::TooManyAtoms(atoms.len()));
        }
        let mut merged: BTreeMap<Vec<usize>, KahanSum> = BTreeMap::new();
        for (i, (tuple, prob)) in atoms.into_iter().enumerate() {
            if tuple.len() != n {
                return Err(Error::BadTupleLength {
                    expected: n,
                    actual: tuple.len(),
                });
            }
            if let Some(&index) = tuple.iter().find(|&&k| k >= space.len()) {
                return Err(Error::BadPointIndex {
                    index,
                    size: space.len(),
                });
            }
            if !prob.is_finite() {
                return Err(Error::NonFinite(i));
            }
            if prob < 0.0 {
                return Err(Error::NonPositiveWeight {
                    index: i,
                    value: prob,
                });
            }
            merged.entry(tuple).or_default().add(prob);
        }
        let atoms: Vec<Atom> = merged
            .into_iter()
            .map(|(tuple, p)| Atom {
                tuple,
                prob: p.value(),
            })
            .collect();
        let sum = kahan_sum(atoms.iter().map(|a| a.prob));
        if (sum - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::NotNormalized { sum });
        }
        let picker = WeightedIndex::new(atoms.iter().map(|a| a.prob))
            .map_err(|_| Error::NotNormalized { sum })?;
        Ok(Self {
            space,
            n,
            law: Law::Explicit { atoms, picker },
        })
    }

    /// Draws a component with probability `weights[c]`, then a tuple from it.
    pub fn mixture(components: Vec<Design>, weights: Vec<f64>) -> Result<Self> {
        let Some(first) = components.first() else {
            return Err(Error::InvalidSize("mixture without components".into()));
        };
        if weights.len() != components.len() {
            return Err(Error::DimensionMismatch {
                expected: components.len(),
                actual: weights.len(),
            });
        }
        if components
            .iter()
            .any(|c| c.n != first.n || c.space != first.space)
        {
            return Err(Error::MixedSpaces);
        }
        for (index, &w) in weights.iter().enumerate() {
            if !w.is_finite() {
                return Err(Error::NonFinite(index));
            }
            if w < 0.0 {
                return Err(Error::NonPositiveWeight { index, value: w });
            }
        }
        let sum = kahan_sum(weights.iter().copied());
        if (sum - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::NotNormalized { sum });
        }
        let picker = WeightedIndex::new(&weights).map_err(|_| Error::NotNormalized { sum })?;
        Ok(Self {
            space: first.space.clone(),
            n: first.n,
            law: Law::Mixture {
                components,
                weights,
                picker,
            },
        })
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    /// Number of random points.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> DesignKind {
        match self.law {
            Law::Iid(_) => DesignKind::Iid,
            Law::Srswor => DesignKind::Srswor,
            Law::Cyclic => DesignKind::Cyclic,
            Law::Stratified => DesignKind::Stratified,
            Law::Explicit { .. } => DesignKind::Explicit,
            Law::Mixture { .. } => DesignKind::Mixture,
        }
    }

    /// Atoms of an explicit design, `None` for other kinds.
    pub fn atoms(&self) -> Option<&[Atom]> {
        match &self.law {
            Law::Explicit { atoms, .. } => Some(atoms),
            _ => None,
        }
    }

    /// Components and weights of a mixture, `None` for other kinds.
    pub fn components(&self) -> Option<(&[Design], &[f64])> {
        match &self.law {
            Law::Mixture {
                components,
                weights,
                ..
            } => Some((components, weights)),
            _ => None,
        }
    }

    /// Per-coordinate marginals: row `i` is the law of `Z_{i+1}`.
    pub fn marginals(&self) -> Vec<Vec<f64>> {
        let k = self.space.len();
        match &self.law {
            Law::Iid(_) | Law::Srswor | Law::Cyclic | Law::Stratified => {
                vec![self.space.weights().to_vec(); self.n]
            }
            Law::Explicit { atoms, .. } => {
                let mut acc = vec![vec![KahanSum::new(); k]; self.n];
                for atom in atoms {
                    for (i, &point) in atom.tuple.iter().enumerate() {
                        acc[i][point].add(atom.prob);
                    }
                }
                acc.into_iter()
                    .map(|row| row.iter().map(KahanSum::value).collect())
                    .collect()
            }
            Law::Mixture {
                components,
                weights,
                ..
            } => {
                let parts: Vec<_> = components.iter().map(Design::marginals).collect();
                (0..self.n)
                    .map(|i| {
                        (0..k)
                            .map(|point| {
                                kahan_sum(parts.iter().zip(weights).map(|(m, w)| w * m[i][point]))
                            })
                            .collect()
                    })
                    .collect()
            }
        }
    }

    /// `m_k = ∑_i P(Z_i = k)`.
    pub fn first_order_mass(&self) -> Vec<f64> {
        match &self.law {
            Law::Iid(_) | Law::Srswor | Law::Cyclic | Law::Stratified => {
                let n = self.n as f64;
                self.space.weights().iter().map(|w| n * w).collect()
            }
            _ => {
                let marginals = self.marginals();
                (0..self.space.len())
                    .map(|k| kahan_sum(marginals.iter().map(|row| row[k])))
                    .collect()
            }
        }
    }

    /// `Π[k, l] = ∑_{i≠j} P(Z_i = k, Z_j = l)`.
    pub fn pair_mass(&self) -> SymmetricMatrix {
        let size = self.space.len();
        let n = self.n;
        let pairs = (n * (n - 1)) as f64;
        match &self.law {
            Law::Iid(_) => {
                let mu = self.space.weights();
                SymmetricMatrix::from_fn(size, |k, l| pairs * mu[k] * mu[l])
            }
            Law::Srswor => {
                let off = if pairs == 0.0 {
                    0.0
                } else {
                    pairs / (size * (size - 1)) as f64
                };
                SymmetricMatrix::from_fn(size, |k, l| if k == l { 0.0 } else { off })
            }
            Law::Cyclic => SymmetricMatrix::from_fn(size, |k, l| {
                let d = (l + size - k) % size;
                if d == 0 {
                    return 0.0;
                }
                let count = n.saturating_sub(d) + n.saturating_sub(size - d);
                count as f64 / size as f64
            }),
            Law::Stratified => {
                let width = size / n;
                let cross = (n * n) as f64 / (size * size) as f64;
                SymmetricMatrix::from_fn(
                    size,
                    |k, l| {
                        if k / width == l / width {
                            0.0
                        } else {
                            cross
                        }
                    },
                )
            }
            Law::Explicit { atoms, .. } => {
                let mut acc = vec![KahanSum::new(); size * size];
                for atom in atoms {
                    for (i, &a) in atom.tuple.iter().enumerate() {
                        for (j, &b) in atom.tuple.iter().enumerate() {
                            if i != j {
                                acc[a * size + b].add(atom.prob);
                            }
                        }
                    }
                }
                let data = acc.iter().map(KahanSum::value).collect();
                SymmetricMatrix::from_row_major(size, data)
                    .expect("pair mass of an explicit law is symmetric")
            }
            Law::Mixture {
                components,
                weights,
                ..
            } => combine(size, components.iter().map(Design::pair_mass), weights),
        }
    }

    /// `Q[k, l] = (1/n²) ∑_{i,j} P(Z_i = k, Z_j = l)`.
    pub fn second_order_matrix(&self) -> SecondOrderMatrix {
        let size = self.space.len();
        let matrix = match &self.law {
            Law::Mixture {
                components,
                weights,
                ..
            } => combine(
                size,
                components.iter().map(|c| c.second_order_matrix().matrix),
                weights,
            ),
            _ => {
                let pair = self.pair_mass();
                let first = self.first_order_mass();
                let scale = 1.0 / (self.n * self.n) as f64;
                SymmetricMatrix::from_fn(size, |k, l| {
                    let diag = if k == l { first[k] } else { 0.0 };
                    scale * (pair.get(k, l) + diag)
                })
            }
        };
        SecondOrderMatrix {
            matrix,
            n: self.n,
            space: self.space.clone(),
        }
    }

    /// `T[p, q] = ∑_{i≠j} P(Z_i ∈ X_p, Z_j ∈ X_q)` for the blocks of `partition`.
    pub fn pairwise_block_aggregate(&self, partition: &Partition) -> Result<BlockMatrix> {
        if partition.num_points() != self.space.len() {
            return Err(Error::DimensionMismatch {
                expected: self.space.len(),
                actual: partition.num_points(),
            });
        }
        let pair = self.pair_mass();
        let blocks = partition.blocks();
        let dim = blocks.len();
        let mut data = vec![0.0; dim * dim];
        for (p, bp) in blocks.iter().enumerate() {
            for (q, bq) in blocks.iter().enumerate() {
                let mut acc = KahanSum::new();
                for &k in bp {
                    for &l in bq {
                        acc.add(pair.get(k, l));
                    }
                }
                data[p * dim + q] = acc.value();
            }
        }
        Ok(BlockMatrix { dim, data })
    }

    /// Compares the law of every coordinate with `μ`.
    pub fn validate_marginals(&self) -> MarginalReport {
        let mu = self.space.weights();
        let coordinates: Vec<CoordinateMarginal> = self
            .marginals()
            .into_iter()
            .enumerate()
            .map(|(index, law)| {
                let deviations: Vec<f64> = law.iter().zip(mu).map(|(a, b)| a - b).collect();
                let max_deviation = deviations.iter().fold(0.0f64, |m, d| m.max(d.abs()));
                CoordinateMarginal {
                    index,
                    deviations,
                    max_deviation,
                }
            })
            .collect();
        MarginalReport {
            tolerance: WEIGHT_TOL,
            coordinates,
        }
    }

    /// One draw of the `n`-tuple.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.n);
        self.sample_into(rng, &mut out);
        out
    }

    /// Like [`Design::sample`], reusing `out`.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut Vec<usize>) {
        out.clear();
        let size = self.space.len();
        match &self.law {
            Law::Iid(picker) => out.extend((0..self.n).map(|_| picker.sample(rng))),
            Law::Srswor => {
                let mut pool: Vec<usize> = (0..size).collect();
                let (chosen, _) = pool.partial_shuffle(rng, self.n);
                out.extend_from_slice(chosen);
            }
            Law::Cyclic => {
                let start = rng.gen_range(0..size);
                out.extend((0..self.n).map(|i| (start + i) % size));
            }
            Law::Stratified => {
                let width = size / self.n;
                let mut strata: Vec<usize> = (0..self.n).collect();
                strata.shuffle(rng);
                out.extend(strata.iter().map(|s| s * width + rng.gen_range(0..width)));
            }
            Law::Explicit { atoms, picker } => {
                out.extend_from_slice(&atoms[picker.sample(rng)].tuple);
            }
            Law::Mixture {
                components, picker, ..
            } => components[picker.sample(rng)].sample_into(rng, out),
        }
    }
}

fn combine(
    size: usize,
    parts: impl Iterator<Item = SymmetricMatrix>,
    weights: &[f64],
) -> SymmetricMatrix {
    let mut acc = vec![KahanSum::new(); size * size];
    for (part, &w) in parts.zip(weights) {
        for (a, v) in acc.iter_mut().zip(part.as_row_major()) {
            a.add(w * v);
        }
    }
    let data = acc.iter().map(KahanSum::value).collect();
    SymmetricMatrix::from_row_major(size, data).expect("convex combination of symmetric matrices")
}

/// `Q = E[ν νᵀ]` for the empirical measure `ν` of a design.
#[derive(Debug, Clone)]
pub struct SecondOrderMatrix {
    matrix: SymmetricMatrix,
    n: usize,
    space: FiniteSpace,
}

impl SecondOrderMatrix {
    pub fn matrix(&self) -> &SymmetricMatrix {
        &self.matrix
    }

    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.matrix.get(k, l)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|k| kahan_sum(self.matrix.row(k).iter().copied()))
            .collect()
    }

    /// `max_k |∑_l Q[k, l] − μ_k|`.
    pub fn row_sum_error(&self) -> f64 {
        self.row_sums()
            .iter()
            .zip(self.space.weights())
            .fold(0.0, |m, (s, w)| m.max((s - w).abs()))
    }

    /// `max_{k,l} |Q[k, l] − Q[l, k]|`.
    pub fn symmetry_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for k in 0..self.dim() {
            for l in k + 1..self.dim() {
                worst = worst.max((self.get(k, l) - self.get(l, k)).abs());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let eig = jacobi_eigh(&self.matrix, DEFAULT_JACOBI_TOL)?;
        Ok(*eig.values().last().expect("space is nonempty"))
    }
}

/// A dense `B × B` matrix indexed by partition blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl BlockMatrix {
    pub(crate) fn from_fn(dim: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for p in 0..dim {
            for q in 0..dim {
                data.push(f(p, q));
            }
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, p: usize, q: usize) -> f64 {
        self.data[p * self.dim + q]
    }

    pub fn row(&self, p: usize) -> &[f64] {
        &self.data[p * self.dim..(p + 1) * self.dim]
    }

    pub fn total(&self) -> f64 {
        kahan_sum(self.data.iter().copied())
    }
}

/// Deviation of one coordinate's law from `μ`.
#[derive(Debug, Clone)]
pub struct CoordinateMarginal {
    /// 0-based coordinate.
    pub index: usize,
    /// `P(Z_i = k) − μ_k` per point.
    pub deviations: Vec<f64>,
    pub max_deviation: f64,
}

#[derive(Debug, Clone)]
pub struct MarginalReport {
    pub tolerance: f64,
    pub coordinates: Vec<CoordinateMarginal>,
}

impl MarginalReport {
    pub fn passed(&self) -> bool {
        self.coordinates
            .iter()
            .all(|c| c.max_deviation <= self.tolerance)
    }

    pub fn max_deviation(&self) -> f64 {
        self.coordinates
            .iter()
            .fold(0.0, |m, c| m.max(c.max_deviation))
    }

    /// 0-based coordinates whose law deviates from `μ`.
    pub fn failures(&self) -> Vec<usize> {
        self.coordinates
            .iter()
            .filter(|c| c.max_deviation > self.tolerance)
            .map(|c| c.index)
            .collect()
    }
}
