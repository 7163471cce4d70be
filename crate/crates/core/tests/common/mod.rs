//! Brute-force oracles shared by the integration tests.
//!
//! Everything here works from an enumerated joint law (a list of tuples and
//! probabilities) built directly from the definition of each design, never
//! from the library's closed forms or eigensolver.

#![allow(dead_code)]

use itertools::Itertools;
use mcdl_core::{Design, FiniteSpace};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

pub type Law = Vec<(Vec<usize>, f64)>;

pub fn iid_law(weights: &[f64], n: usize) -> Law {
    (0..n)
        .map(|_| 0..weights.len())
        .multi_cartesian_product()
        .map(|t| {
            let p = t.iter().map(|&k| weights[k]).product();
            (t, p)
        })
        .collect()
}

pub fn srswor_law(size: usize, n: usize) -> Law {
    let tuples: Vec<Vec<usize>> = (0..size).permutations(n).collect();
    let p = 1.0 / tuples.len() as f64;
    tuples.into_iter().map(|t| (t, p)).collect()
}

pub fn cyclic_law(size: usize, n: usize) -> Law {
    (0..size)
        .map(|y| ((0..n).map(|i| (y + i) % size).collect(), 1.0 / size as f64))
        .collect()
}

pub fn stratified_law(size: usize, n: usize) -> Law {
    let width = size / n;
    let mut law = Vec::new();
    let perms: Vec<Vec<usize>> = (0..n).permutations(n).collect();
    let p = 1.0 / (perms.len() as f64 * (width as f64).powi(n as i32));
    for perm in &perms {
        for offsets in (0..n).map(|_| 0..width).multi_cartesian_product() {
            let t = perm
                .iter()
                .zip(&offsets)
                .map(|(s, o)| s * width + o)
                .collect();
            law.push((t, p));
        }
    }
    law
}

pub fn law_n(law: &Law) -> usize {
    law[0].0.len()
}

/// `E[ν_k ν_l]` with `ν` the empirical measure.
pub fn second_moment(law: &Law, size: usize) -> Vec<Vec<f64>> {
    let n = law_n(law) as f64;
    let mut q = vec![vec![0.0; size]; size];
    for (t, p) in law {
        let mut nu = vec![0.0; size];
        for &k in t {
            nu[k] += 1.0 / n;
        }
        for k in 0..size {
            for l in 0..size {
                q[k][l] += p * nu[k] * nu[l];
            }
        }
    }
    q
}

/// `E[((1/n) ∑ f(z_i) − ∫f dμ)²]` straight from the definition.
pub fn mse(law: &Law, weights: &[f64], f: &[f64]) -> f64 {
    let n = law_n(law) as f64;
    let integral: f64 = weights.iter().zip(f).map(|(w, v)| w * v).sum();
    law.iter()
        .map(|(t, p)| {
            let est = t.iter().map(|&k| f[k]).sum::<f64>() / n;
            p * (est - integral).powi(2)
        })
        .sum()
}

/// `∑_{i≠j} P(Z_i = k, Z_j = l)`.
pub fn pair_mass(law: &Law, size: usize) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; size]; size];
    for (t, p) in law {
        for (i, &a) in t.iter().enumerate() {
            for (j, &b) in t.iter().enumerate() {
                if i != j {
                    m[a][b] += p;
                }
            }
        }
    }
    m
}

/// Largest MSE over zero-integral unit functions, by power iteration on the
/// enumerated covariance of the empirical measure after whitening, restricted
/// to the zero-integral subspace.
pub fn worst_case(law: &Law, weights: &[f64]) -> f64 {
    let size = weights.len();
    let n = law_n(law) as f64;
    let s: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let mut cov = vec![vec![0.0; size]; size];
    for (t, p) in law {
        let mut dev: Vec<f64> = weights.iter().map(|w| -w).collect();
        for &k in t {
            dev[k] += 1.0 / n;
        }
        for k in 0..size {
            for l in 0..size {
                cov[k][l] += p * dev[k] * dev[l] / (s[k] * s[l]);
            }
        }
    }
    let project = |v: &mut Vec<f64>| {
        let d: f64 = v.iter().zip(&s).map(|(a, b)| a * b).sum();
        v.iter_mut().zip(&s).for_each(|(a, b)| *a -= d * b);
    };
    let normalize = |v: &mut Vec<f64>| {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        norm
    };
    let apply = |v: &[f64]| -> Vec<f64> {
        (0..size)
            .map(|k| (0..size).map(|l| cov[k][l] * v[l]).sum())
            .collect()
    };
    // Irrational-looking start so it is not orthogonal to the top eigenspace.
    let mut v: Vec<f64> = (0..size)
        .map(|k| ((k as f64 + 1.0) * 1.618_033_988_7).sin())
        .collect();
    project(&mut v);
    normalize(&mut v);
    let mut rayleigh = 0.0;
    for _ in 0..20_000 {
        let mut w = apply(&v);
        project(&mut w);
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return 0.0;
        }
        w.iter_mut().for_each(|x| *x /= norm);
        let aw = apply(&w);
        let next: f64 = w.iter().zip(&aw).map(|(a, b)| a * b).sum();
        let done =
            (next - rayleigh).abs() < 1e-16 && v.iter().zip(&w).all(|(a, b)| (a - b).abs() < 1e-13);
        rayleigh = next;
        v = w;
        if done {
            break;
        }
    }
    rayleigh
}

pub fn uniform_weights(size: usize) -> Vec<f64> {
    vec![1.0 / size as f64; size]
}

/// A random design on the uniform `size`-point space whose coordinates are all
/// uniform: a convex mixture of permutation-coupled explicit designs
/// (`Z_i = π_i(Y)`, `Y` uniform, `π_i` random permutations), iid, srswor and
/// cyclic components.
pub fn random_valid_design(rng: &mut Xoshiro256PlusPlus, size: usize, n: usize) -> Design {
    let space = FiniteSpace::uniform(size).unwrap();
    let components = rng.gen_range(1..=4);
    let mut designs = Vec::new();
    for _ in 0..components {
        let d = match rng.gen_range(0..6) {
            0 => Design::iid(space.clone(), n).unwrap(),
            1 => Design::srswor(size, n).unwrap(),
            2 => Design::cyclic(size, n).unwrap(),
            _ => permutation_coupling(rng, size, n),
        };
        designs.push(d);
    }
    let raw: Vec<f64> = (0..components).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let weights = raw.iter().map(|w| w / total).collect();
    Design::mixture(designs, weights).unwrap()
}

pub fn permutation_coupling(rng: &mut Xoshiro256PlusPlus, size: usize, n: usize) -> Design {
    let space = FiniteSpace::uniform(size).unwrap();
    let perms: Vec<Vec<usize>> = (0..n)
        .map(|_| {
            let mut p: Vec<usize> = (0..size).collect();
            p.shuffle(rng);
            p
        })
        .collect();
    let atoms = (0..size)
        .map(|y| (perms.iter().map(|p| p[y]).collect(), 1.0 / size as f64))
        .collect();
    Design::explicit(space, n, atoms).unwrap()
}

/// Enumerated joint law of a design: built-in kinds are rebuilt from their
/// definitions above, explicit atoms are taken as given, mixtures expanded.
pub fn law_of(design: &Design) -> Law {
    let size = design.space().len();
    let n = design.n();
    match design.kind() {
        mcdl_core::DesignKind::Iid => iid_law(design.space().weights(), n),
        mcdl_core::DesignKind::Srswor => srswor_law(size, n),
        mcdl_core::DesignKind::Cyclic => cyclic_law(size, n),
        mcdl_core::DesignKind::Stratified => stratified_law(size, n),
        mcdl_core::DesignKind::Explicit => design
            .atoms()
            .unwrap()
            .iter()
            .map(|a| (a.tuple.clone(), a.prob))
            .collect(),
        mcdl_core::DesignKind::Mixture => {
            let (components, weights) = design.components().unwrap();
            components
                .iter()
                .zip(weights)
                .flat_map(|(c, w)| law_of(c).into_iter().map(move |(t, p)| (t, w * p)))
                .collect()
        }
    }
}

pub fn seeded(seed: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

/// A random function with zero integral and unit L²(μ) norm.
pub fn random_centered_unit(rng: &mut Xoshiro256PlusPlus, weights: &[f64]) -> Vec<f64> {
    let raw: Vec<f64> = weights.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mean: f64 = raw.iter().zip(weights).map(|(v, w)| v * w).sum();
    let centered: Vec<f64> = raw.iter().map(|v| v - mean).collect();
    let norm = centered
        .iter()
        .zip(weights)
        .map(|(v, w)| w * v * v)
        .sum::<f64>()
        .sqrt();
    centered.iter().map(|v| v / norm).collect()
}
