//! Statistical invariants of the samplers and circuit models.

use rqc::analytics::{error_factor_exact_fc, f_exact, solvable_fidelity};
use rqc::circuit::{
    run_brickwall_trial, run_solvable_trial_dense, run_trial, CircuitConfig, InitialState, Model,
};
use rqc::experiments::{estimate, run_sweep, write_results, Axis, Format, SweepSpec, Table};
use rqc::linalg::{gue, haar_unitary, sample_haar_unitary};
use rqc::routing::{error_factor_mc, Architecture};
use rqc::stats::{ks_critical, ks_statistic, mean_var, welch_t};
use rqc::{Estimate, Seed};

#[test]
fn haar_measure_is_left_invariant() {
    let w = sample_haar_unitary(4, Seed::new(99)).unwrap();
    let n = 10_000;
    let mut rng = Seed::new(1).rng();
    let mut plain = Vec::with_capacity(n);
    let mut rotated = Vec::with_capacity(n);
    for _ in 0..n {
        let u = haar_unitary(4, &mut rng).unwrap();
        plain.push(u.get(0, 0).norm_sqr());
        let v = haar_unitary(4, &mut rng).unwrap();
        rotated.push(w.matmul(&v).unwrap().get(0, 0).norm_sqr());
    }
    assert!(ks_statistic(&plain, &rotated) < ks_critical(n, n, 0.01));
}

#[test]
fn gue_second_moment() {
    let dim = 4;
    let samples: Vec<f64> = (0..100_000u64)
        .map(|i| {
            let h = gue(dim, &mut Seed::new(i).rng()).unwrap();
            h.matmul(&h).unwrap().trace().re
        })
        .collect();
    let e = Estimate::from_samples(&samples, Seed::new(0)).unwrap();
    assert!(e.zscore((dim * dim) as f64).abs() < 3.0, "{e:?}");
}

#[test]
fn error_factor_decreases_with_p() {
    for arch in [Architecture::FullyConnected, Architecture::Line] {
        let est: Vec<Estimate> = [0.0, 0.05, 0.1, 0.2, 0.3]
            .iter()
            .map(|&p| error_factor_mc(6, &arch, p, 20_000, Seed::new(3)).unwrap())
            .collect();
        for w in est.windows(2) {
            assert!(w[1].mean <= w[0].mean + 3.0 * w[0].stderr.hypot(w[1].stderr), "{arch}: {w:?}");
        }
    }
}

#[test]
fn initial_state_policies_agree() {
    let base = CircuitConfig::new(4, 4, Architecture::Line, 0.1, 0.02).unwrap();
    let random = base.clone().with_init(InitialState::RandomBasisState);
    let n = 10_000u64;
    let a: Vec<f64> = (0..n).map(|i| run_trial(&base, Seed::new(i)).unwrap().fidelity).collect();
    let b: Vec<f64> = (0..n)
        .map(|i| run_trial(&random, Seed::new(i + n)).unwrap().fidelity)
        .collect();
    assert!(welch_t(&a, &b).abs() < 2.576);
}

#[test]
fn brickwall_and_original_decay_alike() {
    let (l, t, alpha) = (8, 16, 0.02);
    let original = CircuitConfig::new(l, t, Architecture::FullyConnected, alpha, 0.0).unwrap();
    let a = estimate(|s| Ok(run_trial(&original, s)?.fidelity), 5000, Seed::new(1)).unwrap();
    let b = estimate(|s| Ok(run_brickwall_trial(l, t, alpha, s)?.fidelity), 5000, Seed::new(2)).unwrap();
    let z = (a.mean - b.mean) / a.stderr.hypot(b.stderr);
    assert!(z.abs() < 3.0, "{a:?} {b:?}");
}

#[test]
fn single_layer_is_a_product_of_pair_fidelities() {
    // Independent pairs on a product state: E|<psi|W|psi>|^2 = (2 + 3 f) / 5 each.
    let (l, alpha) = (6, 0.1);
    let c = CircuitConfig::new(l, 1, Architecture::FullyConnected, alpha, 0.0).unwrap();
    let e = estimate(|s| Ok(run_trial(&c, s)?.fidelity), 10_000, Seed::new(5)).unwrap();
    let pair = (2.0 + 3.0 * f_exact(4, alpha).unwrap()) / 5.0;
    assert!(e.zscore(pair.powi(l as i32 / 2)).abs() < 3.0, "{e:?}");
}

#[test]
fn solvable_model_follows_closed_form() {
    let (l, alpha, p) = (6, 0.05, 0.02);
    let template = CircuitConfig::new(l, 8, Architecture::FullyConnected, alpha, p)
        .unwrap()
        .with_model(Model::Solvable);
    let spec = SweepSpec {
        template,
        axis: Axis::T,
        values: (1..=8).map(f64::from).collect(),
        trials: 4000,
        seed: Seed::new(8),
    };
    let delta = error_factor_exact_fc(l, p).unwrap();
    for row in run_sweep(&spec).unwrap() {
        assert_eq!(row.analytic, solvable_fidelity(l, row.t, alpha, delta).unwrap());
        assert!(row.zscore.abs() < 3.5, "{row:?}");
    }
}

#[test]
fn dense_and_pair_global_unitaries_agree() {
    let c = CircuitConfig::new(4, 3, Architecture::FullyConnected, 0.15, 0.05)
        .unwrap()
        .with_model(Model::Solvable);
    let n = 4000u64;
    let pair: Vec<f64> = (0..n).map(|i| run_trial(&c, Seed::new(i)).unwrap().fidelity).collect();
    let dense: Vec<f64> = (0..n)
        .map(|i| run_solvable_trial_dense(&c, Seed::new(i + n)).unwrap().fidelity)
        .collect();
    assert!(welch_t(&pair, &dense).abs() < 3.0, "{:?} {:?}", mean_var(&pair), mean_var(&dense));
}

#[test]
fn thread_count_does_not_change_estimates() {
    let c = CircuitConfig::new(6, 4, Architecture::Line, 0.08, 0.01).unwrap();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| estimate(|s| Ok(run_trial(&c, s)?.fidelity), 300, Seed::new(4)).unwrap())
    };
    let serial = run(1);
    assert_eq!(serial, run(4));
    assert_eq!(serial.mean.to_bits(), run(3).mean.to_bits());
}

#[test]
fn sweep_files_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let spec = SweepSpec {
        template: CircuitConfig::new(4, 3, Architecture::Line, 0.05, 0.01).unwrap(),
        axis: Axis::Alpha,
        values: vec![0.0, 0.05, 0.1],
        trials: 100,
        seed: Seed::new(12),
    };
    let mut files = Vec::new();
    for (i, format) in [Format::Csv, Format::Csv, Format::Json, Format::Json].into_iter().enumerate() {
        let path = dir.path().join(format!("run{i}"));
        write_results(&Table::from_records(&run_sweep(&spec).unwrap()), &path, format).unwrap();
        files.push(std::fs::read(path).unwrap());
    }
    assert_eq!(files[0], files[1]);
    assert_eq!(files[2], files[3]);
}
