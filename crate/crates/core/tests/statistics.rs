//! Monte Carlo properties of the experiment runners at full seed counts.

use leadlag_core::experiments::{
    run, ConvergenceTable, ExperimentConfig, ExperimentKind, TableRow,
};
use leadlag_core::rde::FieldKind;
use leadlag_core::timeseries::{Drift, PathFn};
use leadlag_core::{hoff_lift, pvar_norm, simulate, Partition, SimKind, SimSpec};

fn config(kind: ExperimentKind, seeds: usize, n_values: &[usize]) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(kind);
    cfg.seeds = seeds;
    cfg.n_values = n_values.to_vec();
    cfg
}

/// Share of seeds whose samples along `rows` satisfy `step(prev, next)` at every step.
fn seed_fraction(rows: &[&TableRow], step: impl Fn(f64, f64) -> bool) -> f64 {
    let seeds = rows[0].samples.len();
    let hits = (0..seeds)
        .filter(|&s| {
            rows.windows(2)
                .all(|w| step(w[0].samples[s], w[1].samples[s]))
        })
        .count();
    hits as f64 / seeds as f64
}

fn means(t: &ConvergenceTable, stat: &str) -> Vec<f64> {
    t.series(stat).iter().map(|r| r.mean).collect()
}

#[test]
fn limit_distance_shrinks_for_most_seeds() {
    let t = run(&config(ExperimentKind::HoffConvergence, 100, &[16, 256])).unwrap();
    let frac = seed_fraction(&t.series("pvar-dist"), |a, b| b < a);
    assert!(
        frac >= 0.9,
        "d(256) < d(16) for only {:.0}% of seeds",
        100.0 * frac
    );
}

#[test]
fn ito_gap_nonincreasing_for_most_seeds() {
    let t = run(&ExperimentConfig::new(ExperimentKind::ItoRecovery)).unwrap();
    let frac = seed_fraction(&t.series("ito-gap"), |a, b| b <= a);
    assert!(
        frac >= 0.8,
        "|Y - Ito| nonincreasing in n for only {:.1}% of 200 seeds",
        100.0 * frac
    );
}

#[test]
fn ito_gap_decreasing_for_sine_field() {
    let mut cfg = ExperimentConfig::new(ExperimentKind::ItoRecovery);
    cfg.field = FieldKind::Sin;
    let t = run(&cfg).unwrap();
    let frac = seed_fraction(&t.series("ito-gap"), |a, b| b < a);
    assert!(
        frac >= 0.8,
        "|Y - Ito| decreasing in n for only {:.1}% of 200 seeds",
        100.0 * frac
    );
}

#[test]
fn smooth_driver_has_no_correction() {
    let mut cfg = config(ExperimentKind::ItoRecovery, 1, &[1024]);
    cfg.kind = SimKind::Deterministic(PathFn::Linear);
    let t = run(&cfg).unwrap();
    let ito = t.row("ito-gap", 1024).unwrap().mean;
    let strat = t.row("strat-gap", 1024).unwrap().mean;
    assert!(ito <= 1e-2 && strat <= 1e-2, "gaps {ito} and {strat}");
}

#[test]
fn drift_leaves_recovery_gap_unchanged() {
    let plain = run(&ExperimentConfig::new(ExperimentKind::ItoRecovery)).unwrap();
    let mut cfg = ExperimentConfig::new(ExperimentKind::ItoRecovery);
    cfg.kind = SimKind::BrownianPlusDrift(Drift::Sine {
        amplitude: 1.0,
        frequency: 1.0,
    });
    let drifted = run(&cfg).unwrap();
    // the coarse-grid drift contribution is O(1/n), so compare at the finest n
    let (a, b) = (
        plain.row("ito-gap", 1024).unwrap(),
        drifted.row("ito-gap", 1024).unwrap(),
    );
    let tol = 3.0 * (a.std_error.powi(2) + b.std_error.powi(2)).sqrt() + 0.01;
    assert!(
        (a.mean - b.mean).abs() <= tol,
        "{} vs {} (tol {tol})",
        a.mean,
        b.mean
    );
}

#[test]
fn std_error_scales_with_root_seed_count() {
    let small = run(&config(ExperimentKind::ItoRecovery, 50, &[16, 64, 256])).unwrap();
    let large = run(&config(ExperimentKind::ItoRecovery, 200, &[16, 64, 256])).unwrap();
    for (a, b) in small.rows.iter().zip(&large.rows) {
        let r = b.std_error / a.std_error;
        assert!(
            (0.35..=0.65).contains(&r),
            "{} n = {}: SE ratio {r} for 4x seeds",
            a.statistic,
            a.n
        );
    }
}

#[test]
fn envelope_decreases_with_mesh() {
    let t = run(&ExperimentConfig::new(ExperimentKind::PointwiseRate)).unwrap();
    let env = means(&t, "envelope");
    assert!(env.windows(2).all(|w| w[1] < w[0]), "{env:?}");
}

#[test]
fn pvar_moment_stays_bounded_in_two_dimensions() {
    let fine = Partition::<f64>::uniform(1 << 10).unwrap();
    let levels: Vec<usize> = (4..=10).map(|k| 1 << k).collect();
    let seeds = 20;
    let mut sums = vec![0.0; levels.len()];
    for s in 0..seeds {
        let sim =
            simulate(&SimSpec::new(SimKind::Brownian, 2, 7, fine.clone()).with_stream(s)).unwrap();
        for (k, &n) in levels.iter().enumerate() {
            let sk = hoff_lift(
                &sim.series
                    .restrict(&Partition::uniform(n).unwrap())
                    .unwrap(),
            )
            .unwrap();
            sums[k] += pvar_norm(&sk, 2.5).unwrap().powf(2.5) / seeds as f64;
        }
    }
    let hi = sums.iter().cloned().fold(0.0, f64::max);
    let lo = sums.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(hi / lo < 3.0, "means {sums:?}");
}

#[test]
fn smooth_window_statistic_is_linear_in_delta() {
    let mut cfg = config(ExperimentKind::TightnessProbe, 1, &[16, 64, 256]);
    cfg.kind = SimKind::Deterministic(PathFn::Linear);
    let p = cfg.p;
    let t = run(&cfg).unwrap();
    let slopes: Vec<f64> = t
        .series("window-uniform")
        .iter()
        .map(|r| r.mean.powf(1.0 / p) / r.mesh)
        .collect();
    let hi = slopes.iter().cloned().fold(0.0, f64::max);
    let lo = slopes.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(hi / lo <= 1.5, "statistic^(1/p) / delta: {slopes:?}");
}

#[test]
fn smooth_holder_norm_on_halfsplit_partitions() {
    let mut cfg = config(ExperimentKind::HolderBlowup, 1, &[1, 2, 3, 4]);
    cfg.kind = SimKind::Deterministic(PathFn::Linear);
    let t = run(&cfg).unwrap();
    let holder = means(&t, "holder");
    assert!(
        holder.iter().all(|&h| h <= 2.0),
        "Holder norms of the x = t lift: {holder:?}"
    );
}
