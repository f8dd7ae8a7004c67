use cci_core::amplitudes::RadialIntegrals;
use cci_core::config::build_configuration;
use cci_core::optimizer::OptimizationProblem;

fn main() {
    let rad = RadialIntegrals::from_seed(42);
    let config = build_configuration(&rad, 1.0, 0.55, None).unwrap();
    let problem = OptimizationProblem { config, eta: 0.9, ratios: [0.9, 0.8, 1.1, 0.7] };
    // deterministic xorshift stream, same as the python side
    let mut s = 0x1234_5678_9abc_def0u64;
    let mut next = move || {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        (s >> 11) as f64 / (1u64 << 53) as f64
    };
    for _ in 0..12 {
        let mut x = [0.0f64; 21];
        for (i, v) in x.iter_mut().enumerate() {
            let u = next();
            *v = match i {
                0..=3 => -3.0 + 6.0 * u,
                4..=7 | 12..=15 => 3.0 * u,
                8..=11 | 16..=19 => 6.28 * u,
                _ => 0.05 + 3.0 * u,
            };
        }
        println!("{:.15e}", problem.abs_chsh(&x));
    }
}
