//! Interferometer configurations: beam geometry, amplitude moduli that make
//! both pathways equally likely, material phases that absorb the radial
//! integrals' arguments, and the phase locking that reduces all laser phases
//! to the single control phase phi.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};
use core::fmt::Write as _;

#[allow(unused_imports)]
use num_traits::Float as _;

use crate::amplitudes::RadialIntegrals;
use crate::angular::{Direction, PolarizationVector};
use crate::{C64, Error, Result};

/// Wrap an angle to (-pi, pi].
pub fn wrap_angle(x: f64) -> f64 {
    let tau = 2.0 * PI;
    let y = PI - (PI - x).rem_euclid(tau);
    if y <= -PI { PI } else { y }
}

/// The four driving modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModeLabel {
    OneOpen,
    TwoOpen,
    OneClosed,
    TwoClosed,
}

impl ModeLabel {
    pub const ALL: [ModeLabel; 4] =
        [ModeLabel::OneOpen, ModeLabel::TwoOpen, ModeLabel::OneClosed, ModeLabel::TwoClosed];

    pub fn as_str(self) -> &'static str {
        match self {
            ModeLabel::OneOpen => "1o",
            ModeLabel::TwoOpen => "2o",
            ModeLabel::OneClosed => "1c",
            ModeLabel::TwoClosed => "2c",
        }
    }

    /// Photon order of the pathway this mode drives.
    pub fn order(self) -> u8 {
        match self {
            ModeLabel::OneOpen | ModeLabel::OneClosed => 1,
            ModeLabel::TwoOpen | ModeLabel::TwoClosed => 2,
        }
    }

    pub fn index(self) -> usize {
        match self {
            ModeLabel::OneOpen => 0,
            ModeLabel::TwoOpen => 1,
            ModeLabel::OneClosed => 2,
            ModeLabel::TwoClosed => 3,
        }
    }
}

/// One populated field mode: direction, polarization, coherent amplitude.
#[derive(Clone, Copy, Debug)]
pub struct LaserMode {
    pub label: ModeLabel,
    pub k: Direction,
    pub eps: PolarizationVector,
    pub alpha: C64,
    pub order: u8,
}

impl LaserMode {
    pub fn new(label: ModeLabel, k: Direction, eps: PolarizationVector, alpha: C64) -> Result<Self> {
        if !eps.is_transversal_to(&k) {
            return Err(Error::domain(format!(
                "polarization of mode {} is not transversal to its wavevector",
                label.as_str()
            )));
        }
        Ok(LaserMode { label, k, eps, alpha, order: label.order() })
    }
}

/// The fixed scattering geometry: detection direction plus wavevectors and
/// polarizations of the four incident modes.
#[derive(Clone, Copy, Debug)]
pub struct Geometry {
    pub kdet: Direction,
    pub k_1o: Direction,
    pub eps_1o: PolarizationVector,
    pub k_2o: Direction,
    pub eps_2o: PolarizationVector,
    pub k_1c: Direction,
    pub eps_1c: PolarizationVector,
    pub k_2c: Direction,
    pub eps_2c: PolarizationVector,
}

/// The sample geometry: the photoelectron is detected along
/// (sqrt(2) x - z)/sqrt(3); the open configuration uses two linear
/// polarizations, the closed one a circular and an elliptical mode.
pub fn geometry() -> Geometry {
    let s2 = 2.0f64.sqrt();
    let s3 = 3.0f64.sqrt();
    let kdet = Direction::new(s2 / s3, 0.0, -1.0 / s3).expect("unit by construction");
    let eps_1o_dir = Direction::new(1.0 / s3, 0.0, s2 / s3).expect("unit");
    let k_2o = Direction::new(-1.0 / s3, 0.0, -s2 / s3).expect("unit");
    // sqrt(14) eps_1c = sqrt(5/3 + sqrt(2)) (x + sqrt(2) z) - i sqrt(9 - 3 sqrt(2)) y
    let a = (5.0 / 3.0 + s2).sqrt() / 14.0f64.sqrt();
    let b = (9.0 - 3.0 * s2).sqrt() / 14.0f64.sqrt();
    let eps_1c = PolarizationVector::new(C64::new(a, 0.0), C64::new(0.0, -b), C64::new(a * s2, 0.0))
        .expect("unit by construction");
    // k_2c = (x - 2 sqrt(2) z)/3, sqrt(2) eps_2c = (2 sqrt(2) x + z)/3 + i y
    let k_2c = Direction::new(1.0 / 3.0, 0.0, -2.0 * s2 / 3.0).expect("unit");
    let inv_s2 = core::f64::consts::FRAC_1_SQRT_2;
    let eps_2c = PolarizationVector::new(
        C64::new(2.0 * s2 / 3.0 * inv_s2, 0.0),
        C64::new(0.0, inv_s2),
        C64::new(inv_s2 / 3.0, 0.0),
    )
    .expect("unit by construction");
    Geometry {
        kdet,
        k_1o: Direction::Y,
        eps_1o: PolarizationVector::linear(&eps_1o_dir).expect("unit"),
        k_2o,
        eps_2o: PolarizationVector::linear(&Direction::Y).expect("unit"),
        k_1c: kdet,
        eps_1c,
        k_2c,
        eps_2c,
    }
}

/// Named pass/fail geometry checks, in report order.
pub fn geometry_checklist(geo: &Geometry) -> Vec<(&'static str, bool)> {
    let tol = 1e-12;
    let unit = |p: &PolarizationVector| (p.norm_sqr() - 1.0).abs() <= tol;
    let dir_unit = |d: &Direction| {
        (d.x * d.x + d.y * d.y + d.z * d.z - 1.0).abs() <= tol
    };
    let cross = geo.kdet.cross(&geo.k_2o);
    let right_handed = (cross.0 - geo.k_1o.x).abs() <= tol
        && (cross.1 - geo.k_1o.y).abs() <= tol
        && (cross.2 - geo.k_1o.z).abs() <= tol;
    let mut out = Vec::new();
    out.push(("detection direction is unit-norm", dir_unit(&geo.kdet)));
    out.push((
        "detection direction equals (sqrt(2) x - z)/sqrt(3)",
        (geo.kdet.x - (2.0f64 / 3.0).sqrt()).abs() <= tol
            && geo.kdet.y.abs() <= tol
            && (geo.kdet.z + (1.0f64 / 3.0).sqrt()).abs() <= tol,
    ));
    out.push(("all wavevectors are unit-norm", [geo.k_1o, geo.k_2o, geo.k_1c, geo.k_2c].iter().all(dir_unit)));
    out.push(("all polarizations are unit-norm", [geo.eps_1o, geo.eps_2o, geo.eps_1c, geo.eps_2c].iter().all(unit)));
    out.push(("eps_1o transversal to k_1o", geo.eps_1o.is_transversal_to(&geo.k_1o)));
    out.push(("eps_2o transversal to k_2o", geo.eps_2o.is_transversal_to(&geo.k_2o)));
    out.push(("eps_1c transversal to k_1c", geo.eps_1c.is_transversal_to(&geo.k_1c)));
    out.push(("eps_2c transversal to k_2c", geo.eps_2c.is_transversal_to(&geo.k_2c)));
    out.push((
        "(kdet, k_2o, k_1o) mutually orthogonal",
        geo.kdet.dot(&geo.k_2o).abs() <= tol
            && geo.kdet.dot(&geo.k_1o).abs() <= tol
            && geo.k_2o.dot(&geo.k_1o).abs() <= tol,
    ));
    out.push(("(kdet, k_2o, k_1o) right-handed triad", right_handed));
    out.push(("closed one-photon mode propagates along kdet", geo.k_1c.dot(&geo.kdet) > 1.0 - tol));
    out
}

/// Material phases, one per balance condition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaterialPhases {
    pub kappa1: f64,
    pub kappa2o: f64,
    pub kappa2c: f64,
}

/// Phases that make the amplitude-balance right-hand sides real and
/// nonnegative, each in (-pi, pi].
pub fn material_phases(rad: &RadialIntegrals) -> Result<MaterialPhases> {
    rad.validate()?;
    let i = C64::new(0.0, 1.0);
    Ok(MaterialPhases {
        kappa1: wrap_angle(rad.one_photon_bracket().arg()),
        kappa2o: wrap_angle((i * rad.open_two_photon_bracket()).arg()),
        kappa2c: wrap_angle((i * rad.closed_two_photon_bracket()).arg()),
    })
}

/// Moduli of the four coherent amplitudes for an unbiased interferometer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmplitudeModuli {
    pub abs_a1o: f64,
    pub abs_a2o: f64,
    pub abs_a1c: f64,
    pub abs_a2c: f64,
}

impl AmplitudeModuli {
    pub fn as_array(&self) -> [f64; 4] {
        [self.abs_a1o, self.abs_a2o, self.abs_a1c, self.abs_a2c]
    }
}

/// |alpha_1c| / |alpha_1o| for balanced configurations.
pub fn closed_to_open_ratio() -> f64 {
    (7.0 / (2.0 * (3.0 - 2.0f64.sqrt()))).sqrt()
}

/// Amplitude moduli from the balance conditions, given the radial integrals
/// and the positive scale factor.
pub fn amplitude_moduli(rad: &RadialIntegrals, lambda: f64) -> Result<AmplitudeModuli> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::domain("lambda must be positive and finite"));
    }
    rad.validate()?;
    let sqrt_pi = PI.sqrt();
    let s2 = 2.0f64.sqrt();
    let abs_a1o = 6.0 * sqrt_pi * lambda / rad.one_photon_bracket().norm();
    let abs_a2o = (90.0 * sqrt_pi * lambda / rad.open_two_photon_bracket().norm()).sqrt();
    let abs_a1c = closed_to_open_ratio() * abs_a1o;
    let abs_a2c =
        (180.0 * sqrt_pi * lambda / ((2.0 + s2) * rad.closed_two_photon_bracket().norm())).sqrt();
    Ok(AmplitudeModuli { abs_a1o, abs_a2o, abs_a1c, abs_a2c })
}

/// Laser phases produced by the phase lock.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LaserPhases {
    pub phi1o: f64,
    pub phi2o: f64,
    pub phi1c: f64,
    pub phi2c: f64,
}

/// Lock the four laser phases so the control phase is `phi`:
/// theta_o = pi/2 - phi and phi_c + theta_c = -phi, with phi_2c = 0.
///
/// Phases are left unwrapped so they vary continuously with phi.
pub fn phase_lock(phi: f64, kappas: &MaterialPhases) -> LaserPhases {
    LaserPhases {
        phi1o: -FRAC_PI_2 - kappas.kappa1 + kappas.kappa2c,
        phi2o: 0.5 * (-PI - kappas.kappa2o + kappas.kappa2c + phi),
        phi1c: -kappas.kappa1 + kappas.kappa2c - phi,
        phi2c: 0.0,
    }
}

/// All phases of one configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseSet {
    pub kappa1: f64,
    pub kappa2o: f64,
    pub kappa2c: f64,
    pub phi1o: f64,
    pub phi2o: f64,
    pub phi1c: f64,
    pub phi2c: f64,
    /// The control phase of the locked configuration.
    pub phi: f64,
}

impl PhaseSet {
    pub fn locked(phi: f64, kappas: &MaterialPhases) -> Self {
        let lp = phase_lock(phi, kappas);
        PhaseSet {
            kappa1: kappas.kappa1,
            kappa2o: kappas.kappa2o,
            kappa2c: kappas.kappa2c,
            phi1o: lp.phi1o,
            phi2o: lp.phi2o,
            phi1c: lp.phi1c,
            phi2c: lp.phi2c,
            phi,
        }
    }

    /// Open-configuration fringe phase theta_o = phi_1o - 2 phi_2o + kappa_1 - kappa_2o.
    pub fn theta_o(&self) -> f64 {
        self.phi1o - 2.0 * self.phi2o + self.kappa1 - self.kappa2o
    }

    /// Closed-configuration laser phase difference phi_c = phi_1c - 2 phi_2c.
    pub fn phi_c(&self) -> f64 {
        self.phi1c - 2.0 * self.phi2c
    }

    /// Closed-configuration material phase shift theta_c = kappa_1 - kappa_2c.
    pub fn theta_c(&self) -> f64 {
        self.kappa1 - self.kappa2c
    }

    /// Global phase of the open final state, delta_o = phi_1o + kappa_1.
    pub fn delta_o(&self) -> f64 {
        self.phi1o + self.kappa1
    }

    /// Global phase of the closed final state.
    pub fn delta_c(&self) -> f64 {
        0.5 * (self.phi1c + 2.0 * self.phi2c + self.kappa1 + self.kappa2c)
    }
}

/// Dimensionless measure of the unwanted D5/2 channel in the closed
/// configuration: -3i e^{-i(kappa_1 + kappa_2c)/2} D2(D5/2,P3/2) / |5 D2(D3/2,P1/2) + D2(D3/2,P3/2)|.
pub fn d2_parameter(rad: &RadialIntegrals, kappas: &MaterialPhases) -> Result<C64> {
    let denom = rad.closed_two_photon_bracket().norm();
    if denom < 1e-12 {
        return Err(Error::domain("closed-configuration bracket vanishes"));
    }
    let phase = C64::new(0.0, -(kappas.kappa1 + kappas.kappa2c) / 2.0).exp();
    Ok(C64::new(0.0, -3.0) * phase * rad.d2_d52_p32 / denom)
}

/// A fully specified interferometer: geometry, populated modes, phases,
/// scale, and the closed-configuration bias parameter.
#[derive(Clone, Debug)]
pub struct CciConfiguration {
    pub modes: [LaserMode; 4],
    pub kdet: Direction,
    pub rad: RadialIntegrals,
    pub phases: PhaseSet,
    pub lambda: f64,
    pub d2: C64,
}

/// Build the full configuration for control phase `phi` and scale `lambda`.
/// `d2_override` replaces the computed bias parameter when present.
pub fn build_configuration(
    rad: &RadialIntegrals,
    lambda: f64,
    phi: f64,
    d2_override: Option<C64>,
) -> Result<CciConfiguration> {
    let geo = geometry();
    let kappas = material_phases(rad)?;
    let moduli = amplitude_moduli(rad, lambda)?;
    let phases = PhaseSet::locked(phi, &kappas);
    let d2 = match d2_override {
        Some(v) => v,
        None => d2_parameter(rad, &kappas)?,
    };
    let polar = |m: f64, p: f64| C64::from_polar(m, p);
    let modes = [
        LaserMode::new(ModeLabel::OneOpen, geo.k_1o, geo.eps_1o, polar(moduli.abs_a1o, phases.phi1o))?,
        LaserMode::new(ModeLabel::TwoOpen, geo.k_2o, geo.eps_2o, polar(moduli.abs_a2o, phases.phi2o))?,
        LaserMode::new(ModeLabel::OneClosed, geo.k_1c, geo.eps_1c, polar(moduli.abs_a1c, phases.phi1c))?,
        LaserMode::new(ModeLabel::TwoClosed, geo.k_2c, geo.eps_2c, polar(moduli.abs_a2c, phases.phi2c))?,
    ];
    Ok(CciConfiguration { modes, kdet: geo.kdet, rad: *rad, phases, lambda, d2 })
}

impl CciConfiguration {
    pub fn mode(&self, label: ModeLabel) -> &LaserMode {
        &self.modes[label.index()]
    }

    pub fn alphas(&self) -> [C64; 4] {
        [
            self.modes[0].alpha,
            self.modes[1].alpha,
            self.modes[2].alpha,
            self.modes[3].alpha,
        ]
    }

    /// Recheck every construction invariant (geometry, balance, lock).
    pub fn validate(&self) -> Result<()> {
        for (name, ok) in geometry_checklist(&geometry()) {
            if !ok {
                return Err(Error::domain(format!("geometry check failed: {name}")));
            }
        }
        for mode in &self.modes {
            if !mode.eps.is_transversal_to(&mode.k) {
                return Err(Error::domain("mode polarization lost transversality"));
            }
            if mode.order != mode.label.order() {
                return Err(Error::domain("mode order inconsistent with label"));
            }
        }
        let moduli = amplitude_moduli(&self.rad, self.lambda)?;
        for (have, want) in self
            .alphas()
            .iter()
            .map(|a| a.norm())
            .zip(moduli.as_array())
        {
            if (have - want).abs() > 1e-10 * want.max(1e-300) {
                return Err(Error::domain("amplitude moduli violate the balance conditions"));
            }
        }
        let ps = &self.phases;
        if wrap_angle(ps.theta_o() - (FRAC_PI_2 - ps.phi)).abs() > 1e-10 {
            return Err(Error::domain("phase lock broke theta_o = pi/2 - phi"));
        }
        if wrap_angle(ps.phi_c() + ps.theta_c() + ps.phi).abs() > 1e-10 {
            return Err(Error::domain("phase lock broke phi_c + theta_c = -phi"));
        }
        Ok(())
    }

    /// Plain-text report of the configuration for manual inspection.
    pub fn report(&self) -> String {
        let mut s = String::new();
        let geo = geometry();
        let dir = |d: &Direction| format!("({:+.12}, {:+.12}, {:+.12})", d.x, d.y, d.z);
        let pol = |p: &PolarizationVector| {
            format!(
                "({:+.12}{:+.12}i, {:+.12}{:+.12}i, {:+.12}{:+.12}i)",
                p.x.re, p.x.im, p.y.re, p.y.im, p.z.re, p.z.im
            )
        };
        let _ = writeln!(s, "detection direction K' = {}", dir(&geo.kdet));
        for mode in &self.modes {
            let _ = writeln!(s, "mode {}:", mode.label.as_str());
            let _ = writeln!(s, "  k     = {}", dir(&mode.k));
            let _ = writeln!(s, "  eps   = {}", pol(&mode.eps));
            let _ = writeln!(
                s,
                "  alpha = {:+.12}{:+.12}i  (|alpha| = {:.12}, arg = {:+.12})",
                mode.alpha.re,
                mode.alpha.im,
                mode.alpha.norm(),
                mode.alpha.arg()
            );
        }
        let ps = &self.phases;
        let _ = writeln!(s, "phases:");
        let _ = writeln!(
            s,
            "  kappa1 = {:+.12}  kappa2o = {:+.12}  kappa2c = {:+.12}",
            ps.kappa1, ps.kappa2o, ps.kappa2c
        );
        let _ = writeln!(
            s,
            "  phi1o = {:+.12}  phi2o = {:+.12}  phi1c = {:+.12}  phi2c = {:+.12}",
            ps.phi1o, ps.phi2o, ps.phi1c, ps.phi2c
        );
        let _ = writeln!(
            s,
            "  phi = {:+.12}  theta_o = {:+.12}  phi_c = {:+.12}  theta_c = {:+.12}",
            ps.phi,
            ps.theta_o(),
            ps.phi_c(),
            ps.theta_c()
        );
        let _ = writeln!(s, "lambda = {:.12}", self.lambda);
        let _ = writeln!(s, "d2 = {:+.12}{:+.12}i", self.d2.re, self.d2.im);
        s
    }
}
