//! Property tests over randomly generated models.

mod common;

use lfbgw_core::cmj::{self, MalthusStatus};
use lfbgw_core::linalg;
use lfbgw_core::sim::{self, contour_to_tree, tree_to_contour, SimConfig, Start};
use lfbgw_core::{Matrix, ModelTriplet};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random substochastic triplet with strictly positive g (2 or 3 types).
fn triplet_strategy() -> impl Strategy<Value = ModelTriplet> {
    (2usize..=3)
        .prop_flat_map(|a| {
            let row = prop::collection::vec(0.01..1.0f64, a);
            let rows = prop::collection::vec((row, 0.05..0.95f64), a);
            let g = prop::collection::vec(0.05..1.0f64, a);
            let m = 0.2..3.0f64;
            (rows, g, m)
        })
        .prop_map(|(rows, g, m)| {
            let scaled: Vec<Vec<f64>> = rows
                .into_iter()
                .map(|(w, target)| {
                    let total: f64 = w.iter().sum();
                    w.into_iter().map(|x| x / total * target).collect()
                })
                .collect();
            let gsum: f64 = g.iter().sum();
            let g: Vec<f64> = g.into_iter().map(|x| x / gsum).collect();
            ModelTriplet::new(Matrix::from_rows(&scaled).unwrap(), g, m).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Life tails are monotone and start at g H 1ᵗ.
    #[test]
    fn life_law_tails_are_monotone(t in triplet_strategy()) {
        let life = cmj::life_law(&t);
        let d1_direct: f64 = linalg::vec_mat(t.g(), t.h()).iter().sum();
        prop_assert!((life.d(1).unwrap() - d1_direct).abs() < 1e-14);
        let mut prev = 1.0;
        for n in 1..=life.prefix().len() {
            let dn = life.d(n).unwrap();
            prop_assert!(dn <= prev + 1e-15);
            prev = dn;
        }
    }

    /// One-step semigroup property of the exact generation laws.
    #[test]
    fn generation_semigroup(t in triplet_strategy()) {
        let a = t.dim();
        let law2 = t.generation_law(2).unwrap();
        let law3 = t.generation_law(3).unwrap();
        let s: Vec<f64> = (0..a).map(|j| 0.2 + 0.6 * j as f64 / a as f64).collect();
        let inner: Vec<f64> = (0..a)
            .map(|j| law2.row_law(j).unwrap().pgf(&s).unwrap())
            .collect();
        for i in 0..a {
            let composed = t.row_law(i).pgf(&inner).unwrap();
            let direct = law3.row_law(i).unwrap().pgf(&s).unwrap();
            prop_assert!((composed - direct).abs() < 1e-9);
        }
    }

    /// Survival probabilities decrease in n.
    #[test]
    fn survival_monotone(t in triplet_strategy()) {
        let mut prev = vec![1.0; t.dim()];
        for n in 1..=10usize {
            let s = t.survival_probability(n).unwrap();
            for i in 0..t.dim() {
                prop_assert!(s[i] <= prev[i] + 1e-12);
            }
            prev = s;
        }
    }

    /// Mean of the generation law is the matrix power, row-wise.
    #[test]
    fn generation_mean_is_power(t in triplet_strategy()) {
        let law = t.generation_law(3).unwrap();
        let m_mat = t.mean_matrix();
        let pow = m_mat.mul(&m_mat).mul(&m_mat);
        for i in 0..t.dim() {
            let mean = law.row_law(i).unwrap().mean();
            prop_assert!(linalg::sup_diff(&mean, pow.row(i)) < 1e-9);
        }
    }

    /// Malthusian residual and criticality trichotomy.
    #[test]
    fn malthus_residual_and_trichotomy(t in triplet_strategy()) {
        let life = cmj::life_law(&t);
        let res = life.malthus();
        prop_assume!(res.status != MalthusStatus::BoundaryUndecidable);
        if res.status == MalthusStatus::Solved {
            prop_assert!(res.residual <= 1e-11, "residual {}", res.residual);
        }
        if let Some(mu) = life.mu() {
            if res.alpha.is_finite() {
                prop_assert_eq!(res.alpha > 1e-10, mu > 1.0 + 1e-10);
                prop_assert_eq!(res.alpha < -1e-10, mu < 1.0 - 1e-10);
            }
        }
        // Regeneration mass is 1 whenever alpha is finite.
        if res.alpha.is_finite() {
            let total = life.weighted_series(res.r, 0).value().unwrap_or(f64::NAN) * life.m();
            prop_assert!((total - 1.0).abs() < 1e-9, "regeneration mass {total}");
        }
    }

    /// Contour codec is the identity on simulated trees.
    #[test]
    fn codec_roundtrip(t in triplet_strategy(), seed in 0u64..1_000_000, horizon in 1u32..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = SimConfig { horizon, node_cap: 2000 };
        let run = sim::simulate_bgw(&t, Start::FromG, cfg, &mut rng);
        let path = tree_to_contour(&run.tree);
        prop_assert_eq!(path.steps(), 2 * run.tree.len());
        let back = contour_to_tree(&path).unwrap();
        prop_assert_eq!(back, run.tree);
    }

    /// Individuals partition particles on simulated trees.
    #[test]
    fn individuals_partition(t in triplet_strategy(), seed in 0u64..1_000_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = SimConfig { horizon: 6, node_cap: 2000 };
        let run = sim::simulate_bgw(&t, Start::FromG, cfg, &mut rng);
        let individuals = sim::extract_individuals(&run.tree);
        let total: usize = individuals.iter().map(|i| i.particles.len()).sum();
        prop_assert_eq!(total, run.tree.len());
    }
}
