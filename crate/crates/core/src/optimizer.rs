//! Derivative-free maximization of the CHSH violation with a
//! (mu/mu_w, lambda) covariance matrix adaptation evolution strategy.
//!
//! The optimizer is deterministic for a given seed. Box constraints are
//! handled by resampling violating candidates (with a clamp fallback), and
//! restarts double the population each time.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float as _;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_core::RngCore;

use crate::bell::{chsh, MeasurementSettings};
use crate::config::{build_configuration, CciConfiguration};
use crate::amplitudes::RadialIntegrals;
use crate::linalg::{hermitian_eigen, CMatrix};
use crate::states::combined_state_from_parts;
use crate::{C64, Result};

/// Uniform f64 in [0, 1).
fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

/// Standard normal via the polar method.
struct Gaussian {
    spare: Option<f64>,
}

impl Gaussian {
    fn new() -> Self {
        Gaussian { spare: None }
    }

    fn next(&mut self, rng: &mut ChaCha8Rng) -> f64 {
        if let Some(v) = self.spare.take() {
            return v;
        }
        loop {
            let x = 2.0 * uniform(rng) - 1.0;
            let y = 2.0 * uniform(rng) - 1.0;
            let r2 = x * x + y * y;
            if r2 > 0.0 && r2 < 1.0 {
                let f = (-2.0 * r2.ln() / r2).sqrt();
                self.spare = Some(f * y);
                return f * x;
            }
        }
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Outcome of one CMA-ES run (or restart chain).
#[derive(Clone, Debug)]
pub struct CmaesOutcome {
    pub best_x: Vec<f64>,
    pub best_f: f64,
    pub evaluations: usize,
}

struct CmaesRun<'a, F: FnMut(&[f64]) -> f64> {
    objective: F,
    bounds: &'a [(f64, f64)],
}

impl<'a, F: FnMut(&[f64]) -> f64> CmaesRun<'a, F> {
    /// Evaluate in original coordinates from the normalized [0,1]^n point.
    fn eval(&mut self, y: &[f64], scratch: &mut Vec<f64>) -> f64 {
        scratch.clear();
        scratch.extend(
            y.iter()
                .zip(self.bounds)
                .map(|(v, (lo, hi))| lo + (hi - lo) * v),
        );
        let f = (self.objective)(scratch);
        if f.is_nan() {
            f64::INFINITY
        } else {
            f
        }
    }
}

/// Minimize `objective` over a box with a standard CMA-ES. `budget` caps the
/// number of objective evaluations; the best point found is returned whether
/// or not the budget ran out. Deterministic for fixed inputs.
pub fn cmaes_minimize<F: FnMut(&[f64]) -> f64>(
    objective: F,
    dim: usize,
    bounds: &[(f64, f64)],
    budget: usize,
    seed: u64,
) -> CmaesOutcome {
    cmaes_minimize_with_popsize(objective, dim, bounds, budget, seed, default_popsize(dim))
}

pub fn default_popsize(dim: usize) -> usize {
    4 + (3.0 * (dim as f64).ln()).floor() as usize
}

pub fn cmaes_minimize_with_popsize<F: FnMut(&[f64]) -> f64>(
    objective: F,
    dim: usize,
    bounds: &[(f64, f64)],
    budget: usize,
    seed: u64,
    popsize: usize,
) -> CmaesOutcome {
    assert!(dim >= 1 && bounds.len() == dim);
    assert!(bounds.iter().all(|(lo, hi)| lo.is_finite() && hi.is_finite() && hi > lo));
    let n = dim;
    let lambda = popsize.max(4);
    let mu = lambda / 2;
    let mut weights: Vec<f64> = (0..mu)
        .map(|i| ((lambda as f64 + 1.0) / 2.0).ln() - ((i + 1) as f64).ln())
        .collect();
    let wsum: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= wsum;
    }
    let mu_eff = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();
    let nf = n as f64;
    let c_sigma = (mu_eff + 2.0) / (nf + mu_eff + 5.0);
    let d_sigma = 1.0 + 2.0 * (0.0f64).max(((mu_eff - 1.0) / (nf + 1.0)).sqrt() - 1.0) + c_sigma;
    let c_c = (4.0 + mu_eff / nf) / (nf + 4.0 + 2.0 * mu_eff / nf);
    let c_1 = 2.0 / ((nf + 1.3) * (nf + 1.3) + mu_eff);
    let c_mu = (1.0 - c_1)
        .min(2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((nf + 2.0) * (nf + 2.0) + mu_eff));
    let chi_n = nf.sqrt() * (1.0 - 1.0 / (4.0 * nf) + 1.0 / (21.0 * nf * nf));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gauss = Gaussian::new();
    let mut run = CmaesRun { objective, bounds };

    // state in normalized coordinates
    let mut mean: Vec<f64> = (0..n).map(|_| 0.05 + 0.9 * uniform(&mut rng)).collect();
    let mut sigma = 0.3f64;
    let mut cov = CMatrix::identity(n);
    let mut p_sigma = vec![0.0f64; n];
    let mut p_c = vec![0.0f64; n];

    let mut best_x = mean.clone();
    let mut scratch = Vec::with_capacity(n);
    let mut best_f = run.eval(&mean, &mut scratch);
    let mut evals = 1usize;
    let mut generation = 0usize;

    let mut zs: Vec<Vec<f64>> = vec![vec![0.0; n]; lambda];
    let mut xs: Vec<Vec<f64>> = vec![vec![0.0; n]; lambda];
    let mut fitness: Vec<f64> = vec![0.0; lambda];

    while evals + lambda <= budget {
        generation += 1;
        // refresh the eigendecomposition every generation (cheap at these
        // dimensions), flooring eigenvalues for numerical safety
        let eig = hermitian_eigen(&cov);
        let floor = eig.eigenvalues.iter().fold(1e-30f64, |a, &b| a.max(b)) * 1e-14;
        let d_sqrt: Vec<f64> = eig.eigenvalues.iter().map(|w| w.max(floor).sqrt()).collect();
        let b = &eig.eigenvectors;

        for k in 0..lambda {
            for z in zs[k].iter_mut() {
                *z = gauss.next(&mut rng);
            }
            for i in 0..n {
                let mut acc = 0.0;
                for j in 0..n {
                    acc += b[(i, j)].re * d_sqrt[j] * zs[k][j];
                }
                xs[k][i] = mean[i] + sigma * acc;
            }
            // out-of-box coordinates: resample each against its marginal a
            // few times, then clamp with a quadratic penalty so the mean is
            // pulled back inside instead of pinning to a face
            let mut penalty = 0.0;
            for i in 0..n {
                if (0.0..=1.0).contains(&xs[k][i]) {
                    continue;
                }
                let marginal = sigma * cov[(i, i)].re.max(0.0).sqrt();
                for _ in 0..10 {
                    let cand = mean[i] + marginal * gauss.next(&mut rng);
                    if (0.0..=1.0).contains(&cand) {
                        xs[k][i] = cand;
                        break;
                    }
                }
                if !(0.0..=1.0).contains(&xs[k][i]) {
                    let clamped = xs[k][i].clamp(0.0, 1.0);
                    penalty += 100.0 * (xs[k][i] - clamped) * (xs[k][i] - clamped);
                    xs[k][i] = clamped;
                }
            }
            fitness[k] = run.eval(&xs[k], &mut scratch) + penalty;
        }
        evals += lambda;

        let mut order: Vec<usize> = (0..lambda).collect();
        order.sort_by(|&a, &bb| fitness[a].partial_cmp(&fitness[bb]).unwrap());
        if fitness[order[0]] < best_f {
            best_f = fitness[order[0]];
            best_x.clone_from(&xs[order[0]]);
        }

        let old_mean = mean.clone();
        for i in 0..n {
            mean[i] = weights
                .iter()
                .enumerate()
                .map(|(r, w)| w * xs[order[r]][i])
                .sum();
        }
        let shift: Vec<f64> = (0..n).map(|i| (mean[i] - old_mean[i]) / sigma).collect();

        // C^{-1/2} shift = B D^{-1} B^T shift
        let mut tmp = vec![0.0f64; n];
        for j in 0..n {
            let mut acc = 0.0;
            for i in 0..n {
                acc += b[(i, j)].re * shift[i];
            }
            tmp[j] = acc / d_sqrt[j];
        }
        let mut c_inv_shift = vec![0.0f64; n];
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += b[(i, j)].re * tmp[j];
            }
            c_inv_shift[i] = acc;
        }
        let cs_fac = (c_sigma * (2.0 - c_sigma) * mu_eff).sqrt();
        for i in 0..n {
            p_sigma[i] = (1.0 - c_sigma) * p_sigma[i] + cs_fac * c_inv_shift[i];
        }
        let ps_norm = p_sigma.iter().map(|v| v * v).sum::<f64>().sqrt();
        let h_denom = (1.0 - (1.0 - c_sigma).powi(2 * generation as i32)).sqrt();
        let h_sigma = ps_norm / h_denom < (1.4 + 2.0 / (nf + 1.0)) * chi_n;
        let cc_fac = (c_c * (2.0 - c_c) * mu_eff).sqrt();
        for i in 0..n {
            p_c[i] = (1.0 - c_c) * p_c[i] + if h_sigma { cc_fac * shift[i] } else { 0.0 };
        }
        let delta_h = if h_sigma { 0.0 } else { c_c * (2.0 - c_c) };
        for i in 0..n {
            for j in 0..n {
                let mut rank_mu = 0.0;
                for (r, w) in weights.iter().enumerate() {
                    let yi = (xs[order[r]][i] - old_mean[i]) / sigma;
                    let yj = (xs[order[r]][j] - old_mean[j]) / sigma;
                    rank_mu += w * yi * yj;
                }
                let base = cov[(i, j)].re;
                let updated = (1.0 - c_1 - c_mu) * base
                    + c_1 * (p_c[i] * p_c[j] + delta_h * base)
                    + c_mu * rank_mu;
                cov[(i, j)] = C64::new(updated, 0.0);
            }
        }
        sigma *= ((c_sigma / d_sigma) * (ps_norm / chi_n - 1.0)).exp();
        sigma = sigma.clamp(1e-16, 1e4);
        if sigma < 1e-13 {
            break;
        }
    }

    let denorm: Vec<f64> = best_x
        .iter()
        .zip(bounds)
        .map(|(v, (lo, hi))| lo + (hi - lo) * v)
        .collect();
    CmaesOutcome { best_x: denorm, best_f, evaluations: evals }
}

/// Dimension of the CHSH optimization problem: Re/Im of both spin settings,
/// four displacement moduli and phases per setting, and the field scale.
pub const CHSH_DIM: usize = 21;

/// Search box for the CHSH problem.
pub fn chsh_bounds() -> [(f64, f64); CHSH_DIM] {
    use core::f64::consts::PI;
    let mut b = [(0.0, 0.0); CHSH_DIM];
    for slot in b.iter_mut().take(4) {
        *slot = (-PI, PI); // Re/Im of zeta, zeta'
    }
    for i in 4..8 {
        b[i] = (0.0, 5.0); // |beta|
    }
    for i in 8..12 {
        b[i] = (0.0, 2.0 * PI); // Delta
    }
    for i in 12..16 {
        b[i] = (0.0, 5.0); // |beta'|
    }
    for i in 16..20 {
        b[i] = (0.0, 2.0 * PI); // Delta'
    }
    // the scale slot carries ln(lambda); lambda itself spans [0.05, 20],
    // searched logarithmically so small scales are reachable
    b[20] = ((0.05f64).ln(), (20.0f64).ln());
    b
}

/// A full optimization problem: configuration, efficiency, and the sampled
/// amplitude ratios |alpha_l| / lambda^(order_l).
#[derive(Clone, Debug)]
pub struct OptimizationProblem {
    pub config: CciConfiguration,
    pub eta: f64,
    pub ratios: [f64; 4],
}

impl OptimizationProblem {
    /// Decode an optimization vector into settings plus scale (the last
    /// slot holds ln(lambda)).
    pub fn decode(x: &[f64]) -> (MeasurementSettings, f64) {
        let settings = MeasurementSettings {
            zeta: C64::new(x[0], x[1]),
            zeta_p: C64::new(x[2], x[3]),
            beta_mag: [x[4], x[5], x[6], x[7]],
            delta: [x[8], x[9], x[10], x[11]],
            beta_mag_p: [x[12], x[13], x[14], x[15]],
            delta_p: [x[16], x[17], x[18], x[19]],
        };
        (settings, x[20].exp())
    }

    /// Field moduli for scale `lambda`: one-photon modes scale linearly,
    /// two-photon modes with sqrt(lambda).
    pub fn moduli(&self, lambda: f64) -> [f64; 4] {
        [
            self.ratios[0] * lambda,
            self.ratios[1] * lambda.sqrt(),
            self.ratios[2] * lambda,
            self.ratios[3] * lambda.sqrt(),
        ]
    }

    /// |<B>| for an optimization vector; NaN-free (errors map to 0).
    pub fn abs_chsh(&self, x: &[f64]) -> f64 {
        let (settings, lambda) = Self::decode(x);
        let moduli = self.moduli(lambda);
        let phases = self.config.phases;
        let alphas = [
            C64::from_polar(moduli[0], phases.phi1o),
            C64::from_polar(moduli[1], phases.phi2o),
            C64::from_polar(moduli[2], phases.phi1c),
            C64::from_polar(moduli[3], phases.phi2c),
        ];
        match combined_state_from_parts(&phases, &alphas, self.config.d2)
            .and_then(|st| chsh(&st, &settings, self.eta))
        {
            Ok(v) => v.abs(),
            Err(_) => 0.0,
        }
    }
}

/// Result of a CHSH maximization.
#[derive(Clone, Debug)]
pub struct OptimizationResult {
    pub best_value: f64,
    pub best_settings: MeasurementSettings,
    pub best_lambda: f64,
    pub seed: u64,
    pub restarts_used: usize,
    pub evaluations: usize,
}

/// Default evaluation budget per restart.
pub const DEFAULT_BUDGET: usize = 40_000;

/// Maximize |<B>| over measurement settings and the field scale for a fixed
/// control phase and efficiency. Amplitude ratios are sampled once per call
/// (log-uniform in [0.2, 5]); restarts run CMA-ES with doubled population.
pub fn maximize_chsh(
    rad: &RadialIntegrals,
    phi: f64,
    eta: f64,
    d2_override: Option<C64>,
    seed: u64,
    restarts: usize,
    budget: usize,
) -> Result<OptimizationResult> {
    let config = build_configuration(rad, 1.0, phi, d2_override)?;
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix(seed));
    let lo = 0.2f64.ln();
    let hi = 5.0f64.ln();
    let ratios =
        core::array::from_fn(|_| (lo + (hi - lo) * uniform(&mut rng)).exp());
    let problem = OptimizationProblem { config, eta, ratios };
    Ok(run_restarts(&problem, seed, restarts.max(1), budget))
}

/// Restart loop shared by [`maximize_chsh`] and [`sweep`].
pub fn run_restarts(
    problem: &OptimizationProblem,
    seed: u64,
    restarts: usize,
    budget: usize,
) -> OptimizationResult {
    let bounds = chsh_bounds();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut evaluations = 0usize;
    let mut popsize = default_popsize(CHSH_DIM);
    for restart in 0..restarts {
        let run_seed = splitmix(seed ^ splitmix(0x5eed ^ restart as u64));
        let outcome = cmaes_minimize_with_popsize(
            |x| -problem.abs_chsh(x),
            CHSH_DIM,
            &bounds,
            budget,
            run_seed,
            popsize,
        );
        evaluations += outcome.evaluations;
        if best.as_ref().map_or(true, |(f, _)| outcome.best_f < *f) {
            best = Some((outcome.best_f, outcome.best_x));
        }
        popsize *= 2;
    }
    let (best_f, best_x) = best.expect("at least one restart");
    let (best_settings, best_lambda) = OptimizationProblem::decode(&best_x);
    OptimizationResult {
        best_value: -best_f,
        best_settings,
        best_lambda,
        seed,
        restarts_used: restarts,
        evaluations,
    }
}

/// One grid point of a sweep.
#[derive(Clone, Debug)]
pub struct SweepPoint {
    pub phi: f64,
    pub eta: f64,
    pub seed: u64,
    pub result: Result<OptimizationResult>,
}

/// Per-point seed, mixing the base seed with both grid indices so every
/// point is reproducible in isolation.
pub fn point_seed(seed: u64, phi_index: usize, eta_index: usize) -> u64 {
    splitmix(seed ^ splitmix(phi_index as u64) ^ splitmix((eta_index as u64) << 32))
}

/// Optimize every (phi, eta) pair of a grid sequentially. Failures are
/// recorded per point and do not stop the sweep.
pub fn sweep(
    rad: &RadialIntegrals,
    phi_grid: &[f64],
    eta_list: &[f64],
    d2_override: Option<C64>,
    seed: u64,
    restarts: usize,
    budget: usize,
) -> Vec<SweepPoint> {
    let mut out = Vec::with_capacity(phi_grid.len() * eta_list.len());
    for (j, &eta) in eta_list.iter().enumerate() {
        for (i, &phi) in phi_grid.iter().enumerate() {
            let ps = point_seed(seed, i, j);
            let result = maximize_chsh(rad, phi, eta, d2_override, ps, restarts, budget);
            out.push(SweepPoint { phi, eta, seed: ps, result });
        }
    }
    out
}
