use cci_core::optimizer::{cmaes_minimize_with_popsize, default_popsize};

fn main() {
    // ellipsoid: tests covariance adaptation under high conditioning
    let n = 10;
    let ell = |x: &[f64]| -> f64 {
        x.iter()
            .enumerate()
            .map(|(i, v)| 10f64.powf(6.0 * i as f64 / (n as f64 - 1.0)) * v * v)
            .sum()
    };
    for seed in [1u64, 2, 3] {
        let out = cmaes_minimize_with_popsize(ell, n, &[(-5.0, 5.0); 10], 60_000, seed, default_popsize(n));
        println!("ellipsoid seed {seed}: f = {:.3e} evals {}", out.best_f, out.evaluations);
    }
    // rastrigin: multimodal
    let ras = |x: &[f64]| -> f64 {
        10.0 * x.len() as f64
            + x.iter()
                .map(|v| v * v - 10.0 * (2.0 * std::f64::consts::PI * v).cos())
                .sum::<f64>()
    };
    for seed in [1u64, 2, 3] {
        let mut best = f64::INFINITY;
        let mut pop = default_popsize(10);
        for r in 0..6u64 {
            let out = cmaes_minimize_with_popsize(ras, 10, &[(-5.12, 5.12); 10], 30_000, seed * 100 + r, pop);
            best = best.min(out.best_f);
            pop *= 2;
        }
        println!("rastrigin seed {seed}: best f = {:.3e}", best);
    }
}
