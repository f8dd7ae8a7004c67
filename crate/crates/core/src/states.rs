//! Conditioned spin states of the two interferometer configurations and the
//! field-spin entangled state obtained by superposing them.
//!
//! Global phases are carried explicitly: the two branches interfere inside
//! the combined state, so only the total state's phase is irrelevant.

use core::f64::consts::FRAC_1_SQRT_2;

#[allow(unused_imports)]
use num_traits::Float as _;

use crate::amplitudes::{t1, t2, RadialIntegrals, SpinPair};
use crate::angular::{Direction, HalfInt};
use crate::config::{CciConfiguration, LaserMode, PhaseSet};
use crate::{C64, Error, Result};

/// Spin state in the continuum basis {|K',+1/2>, |K',-1/2>}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinState {
    pub up: C64,
    pub down: C64,
}

impl SpinState {
    pub fn norm(&self) -> f64 {
        (self.up.norm_sqr() + self.down.norm_sqr()).sqrt()
    }

    /// <self|other>.
    pub fn inner(&self, other: &SpinState) -> C64 {
        self.up.conj() * other.up + self.down.conj() * other.down
    }

    /// |<self|other>|^2 for unit-norm states.
    pub fn fidelity(&self, other: &SpinState) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn normalized(&self) -> Result<SpinState> {
        let n = self.norm();
        if n < 1e-150 {
            return Err(Error::DegenerateState);
        }
        Ok(SpinState { up: self.up / n, down: self.down / n })
    }
}

/// Coherent amplitudes of the four modes (1o, 2o, 1c, 2c).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldAmplitudes {
    pub a1o: C64,
    pub a2o: C64,
    pub a1c: C64,
    pub a2c: C64,
}

impl FieldAmplitudes {
    pub fn open_branch(alphas: &[C64; 4]) -> Self {
        FieldAmplitudes {
            a1o: alphas[0],
            a2o: alphas[1],
            a1c: C64::new(0.0, 0.0),
            a2c: C64::new(0.0, 0.0),
        }
    }

    pub fn closed_branch(alphas: &[C64; 4]) -> Self {
        FieldAmplitudes {
            a1o: C64::new(0.0, 0.0),
            a2o: C64::new(0.0, 0.0),
            a1c: alphas[2],
            a2c: alphas[3],
        }
    }

    pub fn as_array(&self) -> [C64; 4] {
        [self.a1o, self.a2o, self.a1c, self.a2c]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.as_array().iter().map(|a| a.norm_sqr()).sum()
    }

    /// Scale every amplitude by a real factor.
    pub fn scaled(&self, s: f64) -> Self {
        FieldAmplitudes { a1o: s * self.a1o, a2o: s * self.a2o, a1c: s * self.a1c, a2c: s * self.a2c }
    }

    /// Four-mode coherent-state overlap <self|other>
    /// = exp(sum conj(a_l) a'_l - (||a||^2 + ||a'||^2)/2).
    pub fn overlap(&self, other: &FieldAmplitudes) -> C64 {
        let dot: C64 = self
            .as_array()
            .iter()
            .zip(other.as_array())
            .map(|(a, b)| a.conj() * b)
            .sum();
        (dot - 0.5 * (self.norm_sqr() + other.norm_sqr())).exp()
    }
}

/// The entangled final state: an open and a closed branch, each a spin state
/// paired with a coherent field amplitude vector, plus the normalizations.
#[derive(Clone, Copy, Debug)]
pub struct CciState {
    pub open_spin: SpinState,
    pub open_field: FieldAmplitudes,
    pub closed_spin: SpinState,
    pub closed_field: FieldAmplitudes,
    /// Normalization of the combined state.
    pub nf: f64,
    /// Weight of the closed branch (normalization of the unnormalized closed
    /// spin state).
    pub nfc: f64,
}

impl CciState {
    /// <f|f> computed from the branch inner products, for checking.
    pub fn norm_check(&self) -> f64 {
        let cross = self.nfc
            * (self.open_spin.inner(&self.closed_spin) * self.open_field.overlap(&self.closed_field))
                .re;
        (1.0 + self.nfc * self.nfc + 2.0 * cross) / (self.nf * self.nf)
    }
}

/// Open-configuration final state: (e^{i delta_o}/sqrt(2)) (|+> + e^{-i theta_o}|->).
/// Both output ports are equally likely for every choice of phases.
pub fn final_state_open(phases: &PhaseSet) -> SpinState {
    let delta_o = phases.delta_o();
    let theta_o = phases.theta_o();
    SpinState {
        up: C64::from_polar(FRAC_1_SQRT_2, delta_o),
        down: C64::from_polar(FRAC_1_SQRT_2, delta_o - theta_o),
    }
}

/// Weight of the bias parameter in the lower output port.
pub fn d2_down_coefficient() -> f64 {
    3.5 - 5.0 * FRAC_1_SQRT_2
}

/// Closed-configuration final state and its normalization N_fc. The fringe
/// phase is (phi_c + theta_c)/2; a nonzero `d2` biases both ports.
pub fn final_state_closed(phases: &PhaseSet, d2: C64) -> Result<(SpinState, f64)> {
    let half = 0.5 * (phases.phi_c() + phases.theta_c());
    let bias = C64::from_polar(1.0, -0.5 * phases.phi_c()) * d2;
    let up = C64::new(0.0, half.sin()) - bias;
    let down = C64::new(half.cos(), 0.0) + d2_down_coefficient() * bias;
    let raw = SpinState { up, down };
    let nfc = raw.norm();
    if nfc < 1e-150 {
        return Err(Error::DegenerateState);
    }
    let global = C64::from_polar(1.0 / nfc, phases.delta_c());
    Ok((SpinState { up: global * up, down: global * down }, nfc))
}

/// The combined field-spin state of a full configuration, normalized with
/// the exact nonorthogonal coherent overlaps.
pub fn combined_state(config: &CciConfiguration) -> Result<CciState> {
    combined_state_from_parts(&config.phases, &config.alphas(), config.d2)
}

/// Combined state from an explicit phase set, amplitude vector, and bias
/// parameter.
pub fn combined_state_from_parts(
    phases: &PhaseSet,
    alphas: &[C64; 4],
    d2: C64,
) -> Result<CciState> {
    let open_spin = final_state_open(phases);
    let (closed_spin, nfc) = final_state_closed(phases, d2)?;
    build_cci_state(open_spin, closed_spin, nfc, alphas)
}

/// Combined state in the phase-referenced frame: all material and laser
/// phases zero, field amplitudes given by their moduli. Equivalent to
/// [`combined_state`] for every observable with phase-referenced
/// displacements.
pub fn combined_state_from_moduli(phi: f64, moduli: &[f64; 4], d2: C64) -> Result<CciState> {
    let kappas = crate::config::MaterialPhases { kappa1: 0.0, kappa2o: 0.0, kappa2c: 0.0 };
    let phases = PhaseSet::locked(phi, &kappas);
    let alphas = [
        C64::new(moduli[0], 0.0),
        C64::new(moduli[1], 0.0),
        C64::new(moduli[2], 0.0),
        C64::new(moduli[3], 0.0),
    ];
    combined_state_from_parts(&phases, &alphas, d2)
}

fn build_cci_state(
    open_spin: SpinState,
    closed_spin: SpinState,
    nfc: f64,
    alphas: &[C64; 4],
) -> Result<CciState> {
    let open_field = FieldAmplitudes::open_branch(alphas);
    let closed_field = FieldAmplitudes::closed_branch(alphas);
    let cross = nfc * (open_spin.inner(&closed_spin) * open_field.overlap(&closed_field)).re;
    let nf_sq = 1.0 + nfc * nfc + 2.0 * cross;
    if nf_sq <= 1e-12 {
        return Err(Error::DegenerateState);
    }
    Ok(CciState { open_spin, open_field, closed_spin, closed_field, nf: nf_sq.sqrt(), nfc })
}

/// Which branch of the interferometer to condition on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Open,
    Closed,
}

/// Conditioned spin state straight from the transition amplitudes: for each
/// output spin, t1 * alpha_1 + t2 * alpha_2^2, normalized. This is the
/// generic pipeline the closed forms above must reproduce.
pub fn state_from_amplitudes(
    modes: &[LaserMode; 4],
    kdet: &Direction,
    rad: &RadialIntegrals,
    branch: Branch,
) -> Result<SpinState> {
    let (one, two) = match branch {
        Branch::Open => (&modes[0], &modes[1]),
        Branch::Closed => (&modes[2], &modes[3]),
    };
    let mj_in = HalfInt::MINUS_HALF;
    let coeff = |ms_out: HalfInt| -> Result<C64> {
        let pair = SpinPair::new(ms_out, mj_in)?;
        Ok(t1(pair, &one.eps, kdet, rad) * one.alpha
            + t2(pair, &two.eps, kdet, rad) * two.alpha * two.alpha)
    };
    let raw = SpinState { up: coeff(HalfInt::HALF)?, down: coeff(HalfInt::MINUS_HALF)? };
    raw.normalized()
}
