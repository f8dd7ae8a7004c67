//! Analytic Bell-CHSH machinery: the spin-asymmetry observable Gamma(zeta),
//! the displaced photon-threshold observable A(beta), efficiency-attenuated
//! correlators, and the CHSH combination.
//!
//! Detection efficiency eta is applied analytically: every branch field
//! amplitude is scaled by sqrt(eta) and each open/closed cross term picks up
//! the factor e^{-(1-eta)||alpha||^2/2}. This is the exact reduced dynamics
//! of a beam splitter with transmissivity sqrt(eta) acting on coherent
//! states; the Fock-space oracle verifies it rather than assuming it.

#[allow(unused_imports)]
use num_traits::Float as _;

use crate::states::{CciState, FieldAmplitudes, SpinState};
use crate::{C64, Error, Result};

/// Measurement settings of one CHSH evaluation. Displacement amplitudes are
/// stored phase-referenced: the actual displacement of mode l is
/// |beta_l| (alpha_l/|alpha_l|) e^{i Delta_l}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementSettings {
    pub zeta: C64,
    pub zeta_p: C64,
    pub beta_mag: [f64; 4],
    pub delta: [f64; 4],
    pub beta_mag_p: [f64; 4],
    pub delta_p: [f64; 4],
}

impl MeasurementSettings {
    /// Reconstruct the displacement vector for the given laser amplitudes.
    pub fn referenced_beta(&self, alphas: &[C64; 4], primed: bool) -> [C64; 4] {
        let (mags, deltas) = if primed {
            (&self.beta_mag_p, &self.delta_p)
        } else {
            (&self.beta_mag, &self.delta)
        };
        let mut out = [C64::new(0.0, 0.0); 4];
        for l in 0..4 {
            let phase = if alphas[l].norm_sqr() > 0.0 {
                alphas[l] / alphas[l].norm()
            } else {
                C64::new(1.0, 0.0)
            };
            out[l] = mags[l] * phase * C64::from_polar(1.0, deltas[l]);
        }
        out
    }
}

/// Spin observable Gamma(zeta) = R(zeta) sigma_z R(zeta)^dag with
/// R = exp(zeta sigma_+ - conj(zeta) sigma_-), in the basis
/// {|K',+1/2>, |K',-1/2>}. Hermitian with eigenvalues exactly +-1:
///
/// [[ cos 2|z|,            -sin 2|z| e^{i arg z} ]
///  [ -sin 2|z| e^{-i arg z},  -cos 2|z|         ]]
pub fn gamma_matrix(zeta: C64) -> [[C64; 2]; 2] {
    let r = zeta.norm();
    if r < 1e-300 {
        return [
            [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            [C64::new(0.0, 0.0), C64::new(-1.0, 0.0)],
        ];
    }
    let c2 = (2.0 * r).cos();
    let s2 = (2.0 * r).sin();
    let phase = zeta / r;
    [
        [C64::new(c2, 0.0), -s2 * phase],
        [-s2 * phase.conj(), C64::new(-c2, 0.0)],
    ]
}

fn sandwich(bra: &SpinState, g: &[[C64; 2]; 2], ket: &SpinState) -> C64 {
    bra.up.conj() * (g[0][0] * ket.up + g[0][1] * ket.down)
        + bra.down.conj() * (g[1][0] * ket.up + g[1][1] * ket.down)
}

/// Matrix element <alpha| A(beta) |alpha'> of the displaced photon-threshold
/// observable between four-mode coherent states:
///
/// e^{-(||a||^2+||a'||^2)/2} (2 e^{-||b||^2 - a*.b - a'.b*} - e^{a*.a'})
///
/// Both exponents have nonpositive real part, so the evaluation cannot
/// overflow.
pub fn displaced_parity_overlap(
    alpha: &FieldAmplitudes,
    alpha_p: &FieldAmplitudes,
    beta: &[C64; 4],
) -> C64 {
    let a = alpha.as_array();
    let ap = alpha_p.as_array();
    let na = alpha.norm_sqr();
    let nap = alpha_p.norm_sqr();
    let nb: f64 = beta.iter().map(|b| b.norm_sqr()).sum();
    let mut dot_ab = C64::new(0.0, 0.0);
    let mut dot_pb = C64::new(0.0, 0.0);
    let mut dot_ap = C64::new(0.0, 0.0);
    for l in 0..4 {
        dot_ab += a[l].conj() * beta[l];
        dot_pb += ap[l] * beta[l].conj();
        dot_ap += a[l].conj() * ap[l];
    }
    let half = C64::new(0.5 * (na + nap), 0.0);
    2.0 * (-half - nb - dot_ab - dot_pb).exp() - (-half + dot_ap).exp()
}

/// The four spin and four field matrix elements entering one correlator,
/// indexed by branch pair (0 = open, 1 = closed). Field elements are taken
/// between sqrt(eta)-attenuated branch amplitudes.
#[derive(Clone, Copy, Debug)]
pub struct CorrelatorTerms {
    pub spin: [[C64; 2]; 2],
    pub field: [[C64; 2]; 2],
}

pub fn correlator_terms(
    state: &CciState,
    zeta: C64,
    beta: &[C64; 4],
    eta: f64,
) -> Result<CorrelatorTerms> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::domain("detection efficiency must lie in (0, 1]"));
    }
    let g = gamma_matrix(zeta);
    let spins = [&state.open_spin, &state.closed_spin];
    let fields = [
        state.open_field.scaled(eta.sqrt()),
        state.closed_field.scaled(eta.sqrt()),
    ];
    let mut spin = [[C64::new(0.0, 0.0); 2]; 2];
    let mut field = [[C64::new(0.0, 0.0); 2]; 2];
    for x in 0..2 {
        for y in 0..2 {
            spin[x][y] = sandwich(spins[x], &g, spins[y]);
            field[x][y] = displaced_parity_overlap(&fields[x], &fields[y], beta);
        }
    }
    Ok(CorrelatorTerms { spin, field })
}

/// Expectation value <Gamma(zeta) (x) A(beta)> on the combined state with
/// detection efficiency eta.
pub fn correlator(state: &CciState, zeta: C64, beta: &[C64; 4], eta: f64) -> Result<f64> {
    let terms = correlator_terms(state, zeta, beta, eta)?;
    let total_norm_sq = state.open_field.norm_sqr() + state.closed_field.norm_sqr();
    let cross = (-(1.0 - eta) * total_norm_sq / 2.0).exp();
    let w = [1.0, state.nfc];
    let mut total = C64::new(0.0, 0.0);
    for x in 0..2 {
        for y in 0..2 {
            let attn = if x != y { cross } else { 1.0 };
            total += w[x] * w[y] * attn * terms.spin[x][y] * terms.field[x][y];
        }
    }
    total /= state.nf * state.nf;
    assert!(
        total.im.abs() < 1e-10,
        "correlator picked up an imaginary residue: {}",
        total.im
    );
    Ok(total.re)
}

/// CHSH combination E(z,b) + E(z',b) + E(z,b') - E(z',b') with the
/// displacement vectors phase-referenced to the laser amplitudes.
pub fn chsh(state: &CciState, settings: &MeasurementSettings, eta: f64) -> Result<f64> {
    let alphas = [
        state.open_field.a1o,
        state.open_field.a2o,
        state.closed_field.a1c,
        state.closed_field.a2c,
    ];
    let beta = settings.referenced_beta(&alphas, false);
    let beta_p = settings.referenced_beta(&alphas, true);
    Ok(correlator(state, settings.zeta, &beta, eta)?
        + correlator(state, settings.zeta_p, &beta, eta)?
        + correlator(state, settings.zeta, &beta_p, eta)?
        - correlator(state, settings.zeta_p, &beta_p, eta)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{MaterialPhases, PhaseSet};
    use crate::states::{combined_state_from_moduli, combined_state_from_parts, final_state_closed, final_state_open};
    use core::f64::consts::PI;

    struct XorShift(u64);
    impl XorShift {
        fn next(&mut self) -> f64 {
            self.0 ^= self.0 << 13;
            self.0 ^= self.0 >> 7;
            self.0 ^= self.0 << 17;
            (self.0 >> 11) as f64 / (1u64 << 53) as f64
        }
        fn range(&mut self, lo: f64, hi: f64) -> f64 {
            lo + (hi - lo) * self.next()
        }
    }

    fn locked(phi: f64) -> PhaseSet {
        PhaseSet::locked(phi, &MaterialPhases { kappa1: 0.0, kappa2o: 0.0, kappa2c: 0.0 })
    }

    #[test]
    fn gamma_at_zero_is_sigma_z() {
        let g = gamma_matrix(C64::new(0.0, 0.0));
        assert_eq!(g[0][0], C64::new(1.0, 0.0));
        assert_eq!(g[1][1], C64::new(-1.0, 0.0));
        assert_eq!(g[0][1], C64::new(0.0, 0.0));
    }

    #[test]
    fn gamma_is_hermitian_with_unit_eigenvalues() {
        let mut rng = XorShift(0xabcdef12345);
        for _ in 0..50 {
            let z = C64::new(rng.range(-3.0, 3.0), rng.range(-3.0, 3.0));
            let g = gamma_matrix(z);
            assert!((g[0][1] - g[1][0].conj()).norm() < 1e-15);
            let trace = g[0][0] + g[1][1];
            let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
            // eigenvalues of a traceless Hermitian 2x2 with det -1 are +-1
            assert!(trace.norm() < 1e-12);
            assert!((det + 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn open_diagonal_matrix_element_closed_form() {
        let mut rng = XorShift(42);
        for _ in 0..40 {
            let phi = rng.range(-PI, PI);
            let z = C64::new(rng.range(-2.0, 2.0), rng.range(-2.0, 2.0));
            let fo = final_state_open(&locked(phi));
            let g = gamma_matrix(z);
            let got = sandwich(&fo, &g, &fo);
            let want = -(2.0 * z.norm()).sin() * (phi + z.arg()).sin();
            assert!(got.im.abs() < 1e-13);
            assert!((got.re - want).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_diagonal_matrix_element_closed_form() {
        let mut rng = XorShift(77);
        for _ in 0..40 {
            let phi = rng.range(-PI, PI);
            let z = C64::new(rng.range(-2.0, 2.0), rng.range(-2.0, 2.0));
            let (fc, _) = final_state_closed(&locked(phi), C64::new(0.0, 0.0)).unwrap();
            let g = gamma_matrix(z);
            let got = sandwich(&fc, &g, &fc);
            let want = -(2.0 * z.norm()).cos() * phi.cos()
                + (2.0 * z.norm()).sin() * z.arg().sin() * phi.sin();
            assert!(got.im.abs() < 1e-13);
            assert!((got.re - want).abs() < 1e-12);
        }
    }

    #[test]
    fn displaced_parity_special_cases() {
        let a = FieldAmplitudes {
            a1o: C64::new(0.7, 0.2),
            a2o: C64::new(-0.3, 0.4),
            a1c: C64::new(0.0, 0.0),
            a2c: C64::new(0.0, 0.0),
        };
        let zero = [C64::new(0.0, 0.0); 4];
        // vacuum-projector expectation on a coherent state
        let want = 2.0 * (-a.norm_sqr()).exp() - 1.0;
        assert!((displaced_parity_overlap(&a, &a, &zero).re - want).abs() < 1e-15);
        // displacing to vacuum gives eigenvalue +1
        let minus = [-a.a1o, -a.a2o, -a.a1c, -a.a2c];
        assert!((displaced_parity_overlap(&a, &a, &minus) - 1.0).norm() < 1e-14);
    }

    #[test]
    fn correlator_limits_and_bounds() {
        // eta=1, zeta=0, beta=0, d2=0, large fields: the branch overlap
        // vanishes, <f_o|sz|f_o> = 0, <f_c|sz|f_c> = -cos(phi), and the
        // undisplaced threshold observable on a bright coherent state tends
        // to -1, so the correlator tends to +cos(phi)/2
        for phi in [-2.0f64, -0.5, 0.0, 1.0, 2.5] {
            let st = combined_state_from_moduli(phi, &[3.0, 3.0, 3.0, 3.0], C64::new(0.0, 0.0))
                .unwrap();
            let zero = [C64::new(0.0, 0.0); 4];
            let e = correlator(&st, C64::new(0.0, 0.0), &zero, 1.0).unwrap();
            assert!((e - phi.cos() / 2.0).abs() < 1e-6, "phi={phi} e={e}");
        }
        // |correlator| <= 1 over random settings
        let mut rng = XorShift(1234);
        for _ in 0..200 {
            let phi = rng.range(-PI, PI);
            let st = combined_state_from_moduli(
                phi,
                &[
                    rng.range(0.1, 1.5),
                    rng.range(0.1, 1.5),
                    rng.range(0.1, 1.5),
                    rng.range(0.1, 1.5),
                ],
                C64::new(rng.range(-0.5, 0.5), rng.range(-0.5, 0.5)),
            )
            .unwrap();
            let z = C64::new(rng.range(-2.0, 2.0), rng.range(-2.0, 2.0));
            let beta = core::array::from_fn(|_| {
                C64::from_polar(rng.range(0.0, 1.5), rng.range(0.0, 2.0 * PI))
            });
            let eta = rng.range(0.1, 1.0);
            let e = correlator(&st, z, &beta, eta).unwrap();
            assert!(e.abs() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn correlator_terms_hermitian_consistency() {
        let st = combined_state_from_moduli(0.7, &[0.8, 0.6, 0.9, 0.5], C64::new(0.1, -0.2))
            .unwrap();
        let beta = [
            C64::new(0.3, 0.1),
            C64::new(-0.2, 0.4),
            C64::new(0.0, -0.5),
            C64::new(0.6, 0.0),
        ];
        let t = correlator_terms(&st, C64::new(0.4, -0.8), &beta, 0.8).unwrap();
        assert!((t.spin[0][1] - t.spin[1][0].conj()).norm() < 1e-14);
    }

    #[test]
    fn correlator_rejects_bad_eta() {
        let st = combined_state_from_moduli(0.0, &[1.0, 1.0, 1.0, 1.0], C64::new(0.0, 0.0))
            .unwrap();
        let zero = [C64::new(0.0, 0.0); 4];
        assert!(correlator(&st, C64::new(0.0, 0.0), &zero, 0.0).is_err());
        assert!(correlator(&st, C64::new(0.0, 0.0), &zero, 1.2).is_err());
        assert!(correlator(&st, C64::new(0.0, 0.0), &zero, -0.1).is_err());
    }

    #[test]
    fn chsh_degenerate_settings_collapse() {
        let st = combined_state_from_moduli(0.4, &[0.7, 0.9, 0.8, 0.6], C64::new(0.0, 0.0))
            .unwrap();
        let settings = MeasurementSettings {
            zeta: C64::new(0.3, -0.2),
            zeta_p: C64::new(0.3, -0.2),
            beta_mag: [0.4, 0.1, 0.7, 0.2],
            delta: [0.5, 1.0, 1.5, 2.0],
            beta_mag_p: [0.4, 0.1, 0.7, 0.2],
            delta_p: [0.5, 1.0, 1.5, 2.0],
        };
        let alphas = [
            st.open_field.a1o,
            st.open_field.a2o,
            st.closed_field.a1c,
            st.closed_field.a2c,
        ];
        let beta = settings.referenced_beta(&alphas, false);
        let e = correlator(&st, settings.zeta, &beta, 1.0).unwrap();
        let b = chsh(&st, &settings, 1.0).unwrap();
        assert!((b - 2.0 * e).abs() < 1e-12);
        assert!(b.abs() <= 2.0 + 1e-12);
    }

    #[test]
    fn chsh_respects_tsirelson_bound() {
        let mut rng = XorShift(999);
        for _ in 0..100 {
            let phi = rng.range(-PI, PI);
            let st = combined_state_from_moduli(
                phi,
                &[
                    rng.range(0.2, 1.2),
                    rng.range(0.2, 1.2),
                    rng.range(0.2, 1.2),
                    rng.range(0.2, 1.2),
                ],
                C64::new(0.0, 0.0),
            )
            .unwrap();
            let settings = MeasurementSettings {
                zeta: C64::new(rng.range(-PI, PI), rng.range(-PI, PI)),
                zeta_p: C64::new(rng.range(-PI, PI), rng.range(-PI, PI)),
                beta_mag: core::array::from_fn(|_| rng.range(0.0, 2.0)),
                delta: core::array::from_fn(|_| rng.range(0.0, 2.0 * PI)),
                beta_mag_p: core::array::from_fn(|_| rng.range(0.0, 2.0)),
                delta_p: core::array::from_fn(|_| rng.range(0.0, 2.0 * PI)),
            };
            let b = chsh(&st, &settings, rng.range(0.2, 1.0)).unwrap();
            assert!(b.abs() <= 2.0 * 2.0f64.sqrt() + 1e-9);
        }
    }

    #[test]
    fn chsh_independent_of_material_phases() {
        // same moduli and settings, random material phases, d2 = 0: the
        // locked configuration must give identical CHSH values
        let mut rng = XorShift(31415);
        let moduli = [0.9f64, 0.7, 1.1, 0.5];
        for _ in 0..20 {
            let phi = rng.range(-PI, PI);
            let settings = MeasurementSettings {
                zeta: C64::new(rng.range(-1.5, 1.5), rng.range(-1.5, 1.5)),
                zeta_p: C64::new(rng.range(-1.5, 1.5), rng.range(-1.5, 1.5)),
                beta_mag: core::array::from_fn(|_| rng.range(0.0, 1.5)),
                delta: core::array::from_fn(|_| rng.range(0.0, 2.0 * PI)),
                beta_mag_p: core::array::from_fn(|_| rng.range(0.0, 1.5)),
                delta_p: core::array::from_fn(|_| rng.range(0.0, 2.0 * PI)),
            };
            let reference = chsh(
                &combined_state_from_moduli(phi, &moduli, C64::new(0.0, 0.0)).unwrap(),
                &settings,
                0.85,
            )
            .unwrap();
            for _ in 0..5 {
                let kappas = MaterialPhases {
                    kappa1: rng.range(-PI, PI),
                    kappa2o: rng.range(-PI, PI),
                    kappa2c: rng.range(-PI, PI),
                };
                let phases = PhaseSet::locked(phi, &kappas);
                let alphas = [
                    C64::from_polar(moduli[0], phases.phi1o),
                    C64::from_polar(moduli[1], phases.phi2o),
                    C64::from_polar(moduli[2], phases.phi1c),
                    C64::from_polar(moduli[3], phases.phi2c),
                ];
                let st = combined_state_from_parts(&phases, &alphas, C64::new(0.0, 0.0)).unwrap();
                let b = chsh(&st, &settings, 0.85).unwrap();
                assert!((b - reference).abs() < 1e-10, "phi={phi}");
            }
        }
    }
}
