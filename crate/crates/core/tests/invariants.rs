use nalgebra::SymmetricEigen;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tplab::estimators::{hurst_local, variogram};
use tplab::kernels::{fou_cov, tfbm_cov, FracOUParams, HurstProfile, MixtureComponent, MixtureParams, ProcessSpec};
use tplab::sampler::{derive_substream_seed, gram_matrix, GaussianPath, SamplingMethod, TimeGrid};

fn params() -> impl Strategy<Value = FracOUParams> {
    (0.55f64..2.5, 0.05f64..3.0).prop_map(|(a, l)| FracOUParams::new(a, l).unwrap())
}

fn spec() -> impl Strategy<Value = ProcessSpec> {
    prop_oneof![
        params().prop_map(|params| ProcessSpec::Fou { params }),
        params().prop_map(|params| ProcessSpec::Tfbm { params }),
        (params(), params(), 0.1f64..2.0).prop_map(|(a, b, w)| ProcessSpec::Mixed {
            mixture: MixtureParams::new(vec![
                MixtureComponent { weight: 1.0, params: a },
                MixtureComponent { weight: w, params: b },
            ])
            .unwrap(),
        }),
        (0.6f64..1.4, 0.6f64..1.4, 0.5f64..5.0, 0.1f64..2.0).prop_map(|(a0, a1, t1, lambda)| ProcessSpec::Tmbm {
            profile: HurstProfile::linear(a0, a1, t1).unwrap(),
            lambda,
        }),
    ]
}

fn paths_from(rows: Vec<Vec<f64>>, dt: f64) -> Vec<GaussianPath> {
    let grid = TimeGrid::new(0.0, dt, rows[0].len()).unwrap();
    let process = ProcessSpec::Fou {
        params: FracOUParams::new(1.0, 1.0).unwrap(),
    };
    rows.into_iter()
        .enumerate()
        .map(|(i, values)| GaussianPath {
            grid,
            values,
            process: process.clone(),
            seed: 0,
            path_index: i as u64,
            method: SamplingMethod::Cholesky,
            jitter: 0.0,
        })
        .collect()
}

fn random_walks(seed: u64, n_paths: usize, n: usize, scale: f64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_paths)
        .map(|_| {
            let mut x = 0.0;
            (0..n)
                .map(|_| {
                    x += scale * (rng.random::<f64>() - 0.5);
                    x
                })
                .collect()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn covariance_is_symmetric(sp in spec(), t in 0.0f64..20.0, s in 0.0f64..20.0) {
        let a = sp.cov(t, s).unwrap();
        let b = sp.cov(s, t).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300), "{a} vs {b}");
    }

    #[test]
    fn tfbm_scaling(p in params(), t in 0.01f64..10.0, s in 0.01f64..10.0, c in 0.2f64..5.0) {
        // C_{α,λ}(t, s) = λ^{1−2α} C_{α,1}(λt, λs)
        let unit = p.with_lambda(1.0).unwrap();
        let l = p.lambda();
        let lhs = tfbm_cov(&p, t, s);
        let rhs = l.powf(1.0 - 2.0 * p.alpha()) * tfbm_cov(&unit, l * t, l * s);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(rhs.abs()).max(1e-300));
        let pc = p.with_lambda(c * l).unwrap();
        let lhs = fou_cov(&pc, t / c);
        let rhs = c.powf(1.0 - 2.0 * p.alpha()) * fou_cov(&p, t);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(rhs.abs()));
    }

    #[test]
    fn substream_seeds_are_distinct(master in any::<u64>(), i in any::<u64>(), j in any::<u64>()) {
        prop_assume!(i != j);
        prop_assert_ne!(derive_substream_seed(master, i), derive_substream_seed(master, j));
    }

    #[test]
    fn variogram_recovers_pure_power(a in 0.01f64..10.0, b in -5.0f64..5.0, dt in 1e-4f64..1.0, n in 40usize..200) {
        // x(t) = a t + b has mean squared increment a² h², slope exactly 2.
        let rows: Vec<Vec<f64>> = (0..100)
            .map(|k| (0..n).map(|i| (a + 1e-3 * k as f64) * i as f64 * dt + b).collect())
            .collect();
        let lags: Vec<usize> = (1..=8).collect();
        let v = variogram(&paths_from(rows, dt), &lags).unwrap();
        prop_assert!((v.slope - 2.0).abs() < 1e-12, "slope {}", v.slope);
    }

    #[test]
    fn hurst_invariant_under_rescaling(seed in any::<u64>(), c in 0.01f64..100.0, dt in 1e-3f64..1.0, k in 0.1f64..10.0) {
        let rows = random_walks(seed, 100, 64, 1.0);
        let lags: Vec<usize> = (1..=8).collect();
        let base = hurst_local(&paths_from(rows.clone(), dt), &lags).unwrap().h_hat;
        let scaled: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|x| c * x).collect()).collect();
        let h = hurst_local(&paths_from(scaled, k * dt), &lags).unwrap().h_hat;
        prop_assert!((h - base).abs() < 1e-9, "{h} vs {base}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn gram_is_positive_semidefinite(sp in spec(), t0 in 0.0f64..2.0, dt in 0.01f64..0.5) {
        let grid = TimeGrid::new(t0, dt, 64).unwrap();
        let g = gram_matrix(&sp, &grid).unwrap();
        let trace = g.trace();
        let min = SymmetricEigen::new(g).eigenvalues.min();
        prop_assert!(min >= -1e-8 * trace, "min eigenvalue {min}, trace {trace}");
    }
}
