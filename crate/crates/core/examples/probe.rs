use cci_core::amplitudes::RadialIntegrals;
use cci_core::optimizer::maximize_chsh;
use std::time::Instant;

fn main() {
    let rad = RadialIntegrals::from_seed(42);
    let args: Vec<String> = std::env::args().collect();
    let phi: f64 = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(0.0);
    let eta: f64 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(1.0);
    let restarts: usize = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(8);
    let budget: usize = args.get(4).map(|s| s.parse().unwrap()).unwrap_or(40_000);
    let seed: u64 = args.get(5).map(|s| s.parse().unwrap()).unwrap_or(1);
    let t0 = Instant::now();
    let r = maximize_chsh(&rad, phi, eta, None, seed, restarts, budget).unwrap();
    println!(
        "phi={phi} eta={eta} restarts={restarts} budget={budget} seed={seed}: max|B| = {:.6}  lambda={:.4} evals={} ({:.1?})",
        r.best_value, r.best_lambda, r.evaluations, t0.elapsed()
    );
}
