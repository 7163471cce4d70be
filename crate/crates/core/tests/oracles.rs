//! Library results checked against brute-force enumeration.

mod common;

use approx::assert_abs_diff_eq;
use mcdl_core::analysis::{feasible_partitions, mse_with_matrix};
use mcdl_core::refine::{discretize, interval_partition, ContinuousDesign, ContinuousKind};
use mcdl_core::{
    mse_of_function, proof_witness, theorem_bound, worst_case_mse, Design, FiniteSpace, Partition,
    SpaceFunction,
};
use rand::Rng;

fn assert_close(actual: f64, expected: f64, eps: f64, what: &str) {
    assert!(
        (actual - expected).abs() <= eps,
        "{what}: {actual} vs {expected} (eps {eps})"
    );
}

fn assert_q_matches(design: &Design, law: &common::Law, eps: f64) {
    let size = design.space().len();
    let oracle = common::second_moment(law, size);
    let q = design.second_order_matrix();
    for (k, row) in oracle.iter().enumerate() {
        for (l, &expected) in row.iter().enumerate() {
            assert_close(q.get(k, l), expected, eps, "Q entry");
        }
    }
}

#[test]
fn iid_two_point_q_by_enumeration() {
    let law = common::iid_law(&[0.5, 0.5], 2);
    let oracle = common::second_moment(&law, 2);
    assert_eq!(oracle, vec![vec![0.375, 0.125], vec![0.125, 0.375]]);
    let d = Design::iid(FiniteSpace::uniform(2).unwrap(), 2).unwrap();
    assert_q_matches(&d, &law, 1e-15);
}

#[test]
fn srswor_three_two_pairs() {
    let law = common::srswor_law(3, 2);
    assert_eq!(law.len(), 6);
    for (t, p) in &law {
        assert_ne!(t[0], t[1]);
        assert_abs_diff_eq!(*p, 1.0 / 6.0);
    }
    let d = Design::srswor(3, 2).unwrap();
    assert_q_matches(&d, &law, 1e-15);

    let r = 1.5f64.sqrt();
    let f = [r, -r, 0.0];
    let brute = common::mse(&law, &common::uniform_weights(3), &f);
    assert_close(brute, 0.25, 1e-15, "brute MSE");
    let exact = mse_of_function(&d, &SpaceFunction::new(f.to_vec()).unwrap()).unwrap();
    assert_close(exact, brute, 1e-15, "library MSE");
}

#[test]
fn builtin_kinds_match_enumeration() {
    for size in 1..=6 {
        for n in 1..=size {
            let w = common::uniform_weights(size);
            assert_q_matches(
                &Design::iid(FiniteSpace::uniform(size).unwrap(), n).unwrap(),
                &common::iid_law(&w, n),
                1e-12,
            );
            assert_q_matches(
                &Design::srswor(size, n).unwrap(),
                &common::srswor_law(size, n),
                1e-12,
            );
            assert_q_matches(
                &Design::cyclic(size, n).unwrap(),
                &common::cyclic_law(size, n),
                1e-12,
            );
            if size % n == 0 {
                assert_q_matches(
                    &Design::stratified(size, n).unwrap(),
                    &common::stratified_law(size, n),
                    1e-12,
                );
            }
        }
    }
    let s = FiniteSpace::new(vec![0.5, 0.3, 0.2]).unwrap();
    assert_q_matches(
        &Design::iid(s.clone(), 3).unwrap(),
        &common::iid_law(s.weights(), 3),
        1e-12,
    );
}

#[test]
fn block_aggregate_matches_enumeration() {
    let mut rng = common::seeded(17);
    for _ in 0..40 {
        let size = rng.gen_range(2..=6);
        let n = rng.gen_range(1..=size);
        let d = common::random_valid_design(&mut rng, size, n);
        let law = common::law_of(&d);
        let pairs = common::pair_mass(&law, size);
        let t = d
            .pairwise_block_aggregate(&Partition::singletons(d.space()))
            .unwrap();
        for (k, row) in pairs.iter().enumerate() {
            for (l, &expected) in row.iter().enumerate() {
                assert_close(t.get(k, l), expected, 1e-12, "T entry");
            }
        }
        assert_close(t.total(), (n * (n - 1)) as f64, 1e-9, "T mass");
    }
}

#[test]
fn mse_quadratic_form_equals_enumeration() {
    let mut rng = common::seeded(2024);
    for _ in 0..200 {
        let size = rng.gen_range(2..=6);
        let n = rng.gen_range(1..=4);
        let raw: Vec<f64> = (0..size).map(|_| rng.gen_range(0.1..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let mut weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        // Keep the sum within rounding of 1.
        let last: f64 = 1.0 - weights[..size - 1].iter().sum::<f64>();
        weights[size - 1] = last;
        let space = FiniteSpace::new(weights.clone()).unwrap();

        // Random explicit law, marginals arbitrary.
        let atoms: Vec<(Vec<usize>, f64)> = (0..rng.gen_range(1..=50))
            .map(|_| {
                let t = (0..n).map(|_| rng.gen_range(0..size)).collect();
                (t, rng.gen_range(0.01..1.0))
            })
            .collect();
        let mass: f64 = atoms.iter().map(|a| a.1).sum();
        let atoms: Vec<_> = atoms.into_iter().map(|(t, p)| (t, p / mass)).collect();
        let d = Design::explicit(space, n, atoms.clone()).unwrap();

        let f: Vec<f64> = (0..size).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let brute = common::mse(&atoms, &weights, &f);
        let exact = mse_of_function(&d, &SpaceFunction::new(f).unwrap()).unwrap();
        assert_close(exact, brute, 1e-10, "oracle equivalence");
    }
}

#[test]
fn worst_case_against_power_iteration() {
    let mut rng = common::seeded(5);
    for _ in 0..60 {
        let size = rng.gen_range(2..=6);
        let n = rng.gen_range(1..=size);
        let d = common::random_valid_design(&mut rng, size, n);
        let oracle = common::worst_case(&common::law_of(&d), d.space().weights());
        let w = worst_case_mse(&d).unwrap();
        assert_close(w.value, oracle, 1e-8, "worst case");
        assert_close(
            mse_of_function(&d, &w.witness).unwrap(),
            w.value,
            1e-10,
            "witness attains",
        );
    }
}

#[test]
fn cyclic_four_two_witness_chain() {
    let d = Design::cyclic(4, 2).unwrap();
    let law = common::cyclic_law(4, 2);
    let w = common::uniform_weights(4);
    let r = proof_witness(&d, &Partition::singletons(d.space())).unwrap();

    // Neighbouring bins only: θ is 0 on the pair (0, 2).
    let pairs = common::pair_mass(&law, 4);
    let theta_02 = pairs[0][2] + pairs[2][0];
    assert_eq!(theta_02, 0.0);
    assert_eq!(r.pair, (0, 2));
    assert_close(r.guaranteed, 0.5, 1e-15, "guaranteed");

    let contrast = Partition::singletons(d.space())
        .indicator_contrast(0, 2)
        .unwrap();
    let brute_actual = common::mse(&law, &w, contrast.values());
    assert_close(brute_actual, 0.5, 1e-15, "brute actual");
    assert_close(r.actual, brute_actual, 1e-15, "actual");
    assert_close(r.bound, 1.0 / 3.0, 1e-15, "bound");
    assert!(r.actual >= r.guaranteed - 1e-9 && r.guaranteed >= r.bound);

    let brute_worst = common::worst_case(&law, &w);
    assert_close(
        worst_case_mse(&d).unwrap().value,
        brute_worst,
        1e-10,
        "worst",
    );
}

/// Bin probabilities of a continuous design by a midpoint rule fine enough to
/// be exact for the piecewise-constant maps in the catalog.
fn quadrature_law(kind: ContinuousKind, bins: usize) -> Vec<(Vec<usize>, f64)> {
    let grid = bins * 2000;
    let h = 1.0 / grid as f64;
    let bin = |x: f64| ((x * bins as f64) as usize).min(bins - 1);
    let mut law = std::collections::BTreeMap::<Vec<usize>, f64>::new();
    for g in 0..grid {
        let u = (g as f64 + 0.5) * h;
        let t = match kind {
            ContinuousKind::Antithetic => vec![bin(u), bin(1.0 - u)],
            ContinuousKind::Rotation => vec![bin(u), bin((u + 0.5).fract())],
            _ => unreachable!(),
        };
        *law.entry(t).or_default() += h;
    }
    law.into_iter().collect()
}

#[test]
fn antithetic_and_rotation_by_quadrature() {
    for kind in [ContinuousKind::Antithetic, ContinuousKind::Rotation] {
        for bins in [4, 8] {
            let oracle = quadrature_law(kind, bins);
            let d = discretize(&ContinuousDesign::new(kind, 2).unwrap(), bins).unwrap();
            let atoms = d.atoms().unwrap();
            assert_eq!(atoms.len(), oracle.len(), "{kind} N={bins}");
            for (atom, (t, p)) in atoms.iter().zip(&oracle) {
                assert_eq!(&atom.tuple, t);
                assert_close(atom.prob, *p, 1e-9, "bin probability");
            }
        }
    }
}

#[test]
fn closed_form_spectra_rederived_at_four_bins() {
    let w = common::uniform_weights(4);

    let anti = quadrature_law(ContinuousKind::Antithetic, 4);
    assert_close(
        common::worst_case(&anti, &w),
        1.0,
        1e-12,
        "antithetic oracle",
    );
    let d = discretize(
        &ContinuousDesign::new(ContinuousKind::Antithetic, 2).unwrap(),
        4,
    )
    .unwrap();
    assert_close(worst_case_mse(&d).unwrap().value, 1.0, 1e-12, "antithetic");
    // A mirror-symmetric centered unit function: both points carry the same value.
    let f = [1.0, -1.0, -1.0, 1.0];
    assert_close(common::mse(&anti, &w, &f), 1.0, 1e-12, "mirror function");

    let strat = common::stratified_law(4, 2);
    assert_close(
        common::worst_case(&strat, &w),
        0.5,
        1e-12,
        "stratified oracle",
    );
    let d = discretize(
        &ContinuousDesign::new(ContinuousKind::StratifiedPermuted, 2).unwrap(),
        4,
    )
    .unwrap();
    assert_close(worst_case_mse(&d).unwrap().value, 0.5, 1e-12, "stratified");
}

#[test]
fn iid_worst_case_is_inverse_n() {
    for size in 2..=5 {
        for n in 1..=4 {
            let w = common::uniform_weights(size);
            let oracle = common::worst_case(&common::iid_law(&w, n), &w);
            assert_close(oracle, 1.0 / n as f64, 1e-12, "oracle iid");
        }
    }
}

#[test]
fn srswor_equality_by_enumeration() {
    for size in 2..=6 {
        for n in 2..=size {
            let w = common::uniform_weights(size);
            let law = common::srswor_law(size, n);
            let bound = theorem_bound(n, size).unwrap();
            assert_close(common::worst_case(&law, &w), bound, 1e-10, "oracle srswor");
        }
    }
}

#[test]
fn empirical_q_converges() {
    // 10^5 draws; each entry of the empirical Q is a mean of bounded terms.
    let d = Design::iid(FiniteSpace::uniform(2).unwrap(), 2).unwrap();
    let q = d.second_order_matrix();
    let mut rng = common::seeded(42);
    let reps = 100_000;
    let mut sums = [[0.0f64; 2]; 2];
    let mut squares = [[0.0f64; 2]; 2];
    for _ in 0..reps {
        let z = d.sample(&mut rng);
        let mut nu = [0.0; 2];
        for k in z {
            nu[k] += 0.5;
        }
        for k in 0..2 {
            for l in 0..2 {
                let x = nu[k] * nu[l];
                sums[k][l] += x;
                squares[k][l] += x * x;
            }
        }
    }
    for k in 0..2 {
        for l in 0..2 {
            let mean = sums[k][l] / reps as f64;
            let var = squares[k][l] / reps as f64 - mean * mean;
            let sigma = (var / reps as f64).sqrt();
            assert!(
                (mean - q.get(k, l)).abs() <= 5.0 * sigma,
                "Q[{k},{l}] empirical {mean} exact {}",
                q.get(k, l)
            );
        }
    }
}

/// Kolmogorov-Smirnov check that every coordinate of every continuous design
/// is uniform, 10^5 draws, α = 1e-4.
#[test]
fn continuous_coordinates_are_uniform() {
    let draws = 100_000;
    let critical = ((2.0f64 / 1e-4).ln() / 2.0).sqrt() / (draws as f64).sqrt();
    let mut rng = common::seeded(99);
    for kind in ContinuousKind::ALL {
        let n = if kind == ContinuousKind::Antithetic {
            2
        } else {
            3
        };
        let design = ContinuousDesign::new(kind, n).unwrap();
        let mut coords = vec![Vec::with_capacity(draws); n];
        for _ in 0..draws {
            for (i, x) in design.sample(&mut rng).into_iter().enumerate() {
                coords[i].push(x);
            }
        }
        for (i, mut xs) in coords.into_iter().enumerate() {
            xs.sort_by(f64::total_cmp);
            let d = xs
                .iter()
                .enumerate()
                .map(|(j, &x)| {
                    let lo = j as f64 / draws as f64;
                    let hi = (j + 1) as f64 / draws as f64;
                    (x - lo).abs().max((hi - x).abs())
                })
                .fold(0.0, f64::max);
            assert!(
                d < critical,
                "{kind} coordinate {i}: D = {d}, critical {critical}"
            );
        }
    }
}

#[test]
fn discretized_designs_have_uniform_marginals() {
    for kind in ContinuousKind::ALL {
        for bins in [2, 4, 6, 8, 16] {
            let d = discretize(&ContinuousDesign::new(kind, 2).unwrap(), bins).unwrap();
            assert!(d.validate_marginals().passed(), "{kind} N={bins}");
            assert_eq!(interval_partition(bins).unwrap().space(), *d.space());
        }
    }
}

#[test]
fn analyze_style_partition_sweep() {
    let d = Design::srswor(6, 3).unwrap();
    let parts = feasible_partitions(d.space());
    let sizes: Vec<usize> = parts.iter().map(|p| p.num_blocks()).collect();
    assert_eq!(sizes, vec![2, 3, 6]);
    let q = d.second_order_matrix();
    let worst = worst_case_mse(&d).unwrap().value;
    for p in &parts {
        let bound = theorem_bound(3, p.num_blocks()).unwrap();
        assert!(worst >= bound - 1e-9);
        let r = proof_witness(&d, p).unwrap();
        assert_close(
            mse_with_matrix(&q, &r.witness).unwrap(),
            r.actual,
            1e-15,
            "witness mse",
        );
    }
}
