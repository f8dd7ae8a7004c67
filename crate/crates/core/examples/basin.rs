use cci_core::amplitudes::RadialIntegrals;
use cci_core::config::build_configuration;
use cci_core::optimizer::{cmaes_minimize_with_popsize, chsh_bounds, OptimizationProblem, CHSH_DIM};

// Local-climb test: start CMA-ES centered near the quantum basin by pinning
// the first generation mean via a tight custom box around a plausible point.
fn main() {
    let rad = RadialIntegrals::from_seed(42);
    let config = build_configuration(&rad, 1.0, 0.0, None).unwrap();
    let problem = OptimizationProblem { config, eta: 1.0, ratios: [0.9, 0.8, 1.1, 0.7] };
    // plausible start: lambda ~ 0.3 => ln lambda ~ -1.2; beta mags ~ 0.4; deltas ~ pi
    let center: [f64; 21] = [
        0.5, 0.5, -0.5, 0.5, // zetas
        0.4, 0.4, 0.4, 0.4, // |beta|
        3.0, 3.0, 3.0, 3.0, // Delta
        0.4, 0.4, 0.4, 0.4, // |beta'|
        3.0, 3.0, 3.0, 3.0, // Delta'
        -1.2, // ln lambda
    ];
    let wide = chsh_bounds();
    // tight box around the center, intersected with the real bounds
    let mut tight = [(0.0, 0.0); CHSH_DIM];
    for i in 0..CHSH_DIM {
        let w = (wide[i].1 - wide[i].0) * 0.25;
        tight[i] = ((center[i] - w).max(wide[i].0), (center[i] + w).min(wide[i].1));
    }
    for seed in [1u64, 2, 3, 4, 5, 6] {
        let out = cmaes_minimize_with_popsize(
            |x| -problem.abs_chsh(x),
            CHSH_DIM,
            &tight,
            60_000,
            seed,
            13,
        );
        println!("tight-box seed {seed}: max|B| = {:.6}", -out.best_f);
    }
}
