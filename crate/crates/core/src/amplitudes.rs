//! One- and two-photon ionization amplitudes.
//!
//! The ground S(1/2) state couples through electric-dipole transitions to P
//! continuum states (one photon) or through intermediate P states to S and D
//! continuum states (two photons). All physical prefactors are dropped except
//! the relative factor i between the two-photon and one-photon amplitudes;
//! overall scale is carried by the configuration's scaling factor.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float as _;

use rand_core::RngCore;

use crate::angular::{
    clebsch_gordan, spherical_component, spherical_harmonic, Direction, HalfInt,
    PolarizationVector,
};
use crate::{C64, Error, Result};

/// The seven empirical complex radial integrals, indexed by ionization
/// channel. `d1_*` are one-photon integrals into P(j') continua; `d2_*` are
/// two-photon integrals labelled by final channel and intermediate P(j'').
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialIntegrals {
    pub d1_p12: C64,
    pub d1_p32: C64,
    pub d2_s12_p12: C64,
    pub d2_s12_p32: C64,
    pub d2_d32_p12: C64,
    pub d2_d32_p32: C64,
    pub d2_d52_p32: C64,
}

const KEYS: [&str; 7] = [
    "D1_P12", "D1_P32", "D2_S12_P12", "D2_S12_P32", "D2_D32_P12", "D2_D32_P32", "D2_D52_P32",
];

impl RadialIntegrals {
    /// Combination -D1(P1/2) + D1(P3/2) controlling the one-photon balance.
    pub fn one_photon_bracket(&self) -> C64 {
        -self.d1_p12 + self.d1_p32
    }

    /// Two-photon combination controlling the open-configuration balance:
    /// 5 D2(S1/2,P1/2) + 10 D2(S1/2,P3/2) - 5 D2(D3/2,P1/2) - D2(D3/2,P3/2)
    /// - 9 D2(D5/2,P3/2). This is the combination the amplitude sums actually
    /// produce for the open geometry: t2o(-1/2,-1/2) * 90 sqrt(pi) = i * bracket.
    pub fn open_two_photon_bracket(&self) -> C64 {
        5.0 * self.d2_s12_p12 + 10.0 * self.d2_s12_p32
            - 5.0 * self.d2_d32_p12
            - self.d2_d32_p32
            - 9.0 * self.d2_d52_p32
    }

    /// Two-photon combination 5 D2(D3/2,P1/2) + D2(D3/2,P3/2) controlling the
    /// closed-configuration balance.
    pub fn closed_two_photon_bracket(&self) -> C64 {
        5.0 * self.d2_d32_p12 + self.d2_d32_p32
    }

    /// Check the nonvanishing-bracket preconditions.
    pub fn validate(&self) -> Result<()> {
        if self.one_photon_bracket().norm() < 1e-12 {
            return Err(Error::domain("one-photon bracket -D1(P1/2)+D1(P3/2) vanishes"));
        }
        if self.open_two_photon_bracket().norm() < 1e-12 {
            return Err(Error::domain("open-configuration two-photon bracket vanishes"));
        }
        if self.closed_two_photon_bracket().norm() < 1e-12 {
            return Err(Error::domain("closed-configuration bracket 5 D2(D3/2,P1/2)+D2(D3/2,P3/2) vanishes"));
        }
        Ok(())
    }

    /// Deterministic fixture: six integrals drawn from the unit disk,
    /// `d2_d52_p32 = 0` so the closed configuration is unbiased by default.
    pub fn from_seed(seed: u64) -> Self {
        use rand_chacha::rand_core::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut draw = move || loop {
            let re = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0;
            let im = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0;
            let z = C64::new(re, im);
            if z.norm_sqr() <= 1.0 && z.norm_sqr() > 1e-4 {
                return z;
            }
        };
        let rad = RadialIntegrals {
            d1_p12: draw(),
            d1_p32: draw(),
            d2_s12_p12: draw(),
            d2_s12_p32: draw(),
            d2_d32_p12: draw(),
            d2_d32_p32: draw(),
            d2_d52_p32: C64::new(0.0, 0.0),
        };
        debug_assert!(rad.validate().is_ok());
        rad
    }

    fn field_mut(&mut self, key: &str) -> Option<&mut C64> {
        match key {
            "D1_P12" => Some(&mut self.d1_p12),
            "D1_P32" => Some(&mut self.d1_p32),
            "D2_S12_P12" => Some(&mut self.d2_s12_p12),
            "D2_S12_P32" => Some(&mut self.d2_s12_p32),
            "D2_D32_P12" => Some(&mut self.d2_d32_p12),
            "D2_D32_P32" => Some(&mut self.d2_d32_p32),
            "D2_D52_P32" => Some(&mut self.d2_d52_p32),
            _ => None,
        }
    }

    /// Parse the plain-text key/value format: one `KEY = re,im` entry per
    /// line, `#` comments and blank lines allowed, all seven keys required.
    pub fn parse_key_value(text: &str) -> Result<Self> {
        let mut rad = RadialIntegrals {
            d1_p12: C64::new(0.0, 0.0),
            d1_p32: C64::new(0.0, 0.0),
            d2_s12_p12: C64::new(0.0, 0.0),
            d2_s12_p32: C64::new(0.0, 0.0),
            d2_d32_p12: C64::new(0.0, 0.0),
            d2_d32_p32: C64::new(0.0, 0.0),
            d2_d52_p32: C64::new(0.0, 0.0),
        };
        let mut seen: Vec<&str> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format_line(lineno, "expected KEY = re,im")))?;
            let key = key.trim();
            let slot = rad
                .field_mut(key)
                .ok_or_else(|| Error::Parse(format_line(lineno, "unknown key")))?;
            let (re, im) = value
                .trim()
                .split_once(',')
                .ok_or_else(|| Error::Parse(format_line(lineno, "expected re,im")))?;
            let re: f64 = re
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format_line(lineno, "bad real part")))?;
            let im: f64 = im
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format_line(lineno, "bad imaginary part")))?;
            *slot = C64::new(re, im);
            if seen.contains(&key) {
                return Err(Error::Parse(format_line(lineno, "duplicate key")));
            }
            // keep the canonical key string, not the borrowed line
            seen.push(KEYS.iter().find(|k| **k == key).unwrap());
        }
        for key in KEYS {
            if !seen.contains(&key) {
                return Err(Error::Parse(alloc::format!("missing key {key}")));
            }
        }
        Ok(rad)
    }

    /// Serialize in the same key/value format `parse_key_value` reads.
    pub fn to_key_value(&self) -> String {
        let vals = [
            self.d1_p12,
            self.d1_p32,
            self.d2_s12_p12,
            self.d2_s12_p32,
            self.d2_d32_p12,
            self.d2_d32_p32,
            self.d2_d52_p32,
        ];
        let mut out = String::new();
        for (key, v) in KEYS.iter().zip(vals) {
            out.push_str(key);
            out.push_str(" = ");
            out.push_str(&v.re.to_string());
            out.push(',');
            out.push_str(&v.im.to_string());
            out.push('\n');
        }
        out
    }
}

fn format_line(lineno: usize, msg: &str) -> String {
    alloc::format!("line {}: {}", lineno + 1, msg)
}

/// Outgoing spin projection and input total-angular-momentum projection,
/// both restricted to +-1/2.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpinPair {
    pub ms_out: HalfInt,
    pub mj_in: HalfInt,
}

impl SpinPair {
    pub fn new(ms_out: HalfInt, mj_in: HalfInt) -> Result<Self> {
        if ms_out.twice().abs() != 1 || mj_in.twice().abs() != 1 {
            return Err(Error::domain("spin projections must be +-1/2"));
        }
        Ok(SpinPair { ms_out, mj_in })
    }
}

fn cg(tj1: i32, tm1: i32, tj2: i32, tm2: i32, tj: i32, tm: i32) -> f64 {
    clebsch_gordan(
        HalfInt::from_twice(tj1),
        HalfInt::from_twice(tm1),
        HalfInt::from_twice(tj2),
        HalfInt::from_twice(tm2),
        HalfInt::from_twice(tj),
        HalfInt::from_twice(tm),
    )
    .expect("quantum numbers valid by construction")
}

/// First-order angular dipole matrix element <mj'|A1(l'j', lj; eps)|mj>:
///
/// sqrt((2l+1)/(2l'+1)) <l 0; 1 0 | l' 0> sum_{m_l, m_l', q} eps_q
///   <l m_l; 1 q | l' m_l'> sum_{m_s} <l' m_l'; 1/2 m_s | j' m_j'>
///   <l m_l; 1/2 m_s | j m_j>.
///
/// Vanishes unless l and l' differ by one.
pub fn angular_dipole_a1(
    lp: i32,
    jp: HalfInt,
    mjp: HalfInt,
    l: i32,
    j: HalfInt,
    mj: HalfInt,
    eps: &PolarizationVector,
) -> Result<C64> {
    if lp < 0 || l < 0 {
        return Err(Error::domain("negative orbital angular momentum"));
    }
    if mjp.twice().abs() > jp.twice() || mj.twice().abs() > j.twice() {
        return Err(Error::domain("|m_j| exceeds j"));
    }
    let pref = ((2 * l + 1) as f64 / (2 * lp + 1) as f64).sqrt()
        * cg(2 * l, 0, 2, 0, 2 * lp, 0);
    if pref == 0.0 {
        // includes the |l - l'| != 1 parity selection rule
        return Ok(C64::new(0.0, 0.0));
    }
    let mut total = C64::new(0.0, 0.0);
    for q in [-1i32, 0, 1] {
        let eps_q = spherical_component(eps, q)?;
        if eps_q.norm_sqr() == 0.0 {
            continue;
        }
        for tml in (-2 * l..=2 * l).step_by(2) {
            let tmlp = tml + 2 * q;
            if tmlp.abs() > 2 * lp {
                continue;
            }
            let orb = cg(2 * l, tml, 2, 2 * q, 2 * lp, tmlp);
            if orb == 0.0 {
                continue;
            }
            let mut spin_sum = 0.0;
            for tms in [-1i32, 1] {
                if tmlp + tms != mjp.twice() || tml + tms != mj.twice() {
                    continue;
                }
                spin_sum += cg(2 * lp, tmlp, 1, tms, jp.twice(), mjp.twice())
                    * cg(2 * l, tml, 1, tms, j.twice(), mj.twice());
            }
            total += eps_q * orb * spin_sum;
        }
    }
    Ok(pref * total)
}

/// Second-order angular element: the m_j''-sum of two first-order factors
/// through the intermediate (l'', j'') level.
pub fn angular_dipole_a2(
    lp: i32,
    jp: HalfInt,
    mjp: HalfInt,
    lpp: i32,
    jpp: HalfInt,
    l: i32,
    j: HalfInt,
    mj: HalfInt,
    eps: &PolarizationVector,
) -> Result<C64> {
    if lpp != 1 || (jpp.twice() != 1 && jpp.twice() != 3) {
        return Err(Error::domain("intermediate level must be P(1/2) or P(3/2)"));
    }
    let mut total = C64::new(0.0, 0.0);
    for tmjpp in (-jpp.twice()..=jpp.twice()).step_by(2) {
        let mjpp = HalfInt::from_twice(tmjpp);
        total += angular_dipole_a1(lp, jp, mjp, lpp, jpp, mjpp, eps)?
            * angular_dipole_a1(lpp, jpp, mjpp, l, j, mj, eps)?;
    }
    Ok(total)
}

/// One-photon transition amplitude t1(m_s', m_j) into the detection channel
/// `kdet`, linear in the two D1 integrals. Physical prefactors are set to 1.
pub fn t1(
    pair: SpinPair,
    eps: &PolarizationVector,
    kdet: &Direction,
    rad: &RadialIntegrals,
) -> C64 {
    let s_half = HalfInt::HALF;
    let mut total = C64::new(0.0, 0.0);
    for tmlp in [-2i32, 0, 2] {
        let y = spherical_harmonic(1, tmlp / 2, kdet).expect("l=1 in range");
        if y.norm_sqr() == 0.0 {
            continue;
        }
        let tmjp = tmlp + pair.ms_out.twice();
        for (tjp, d1) in [(1, rad.d1_p12), (3, rad.d1_p32)] {
            if tmjp.abs() > tjp {
                continue;
            }
            let c = cg(2, tmlp, 1, pair.ms_out.twice(), tjp, tmjp);
            if c == 0.0 {
                continue;
            }
            let a1 = angular_dipole_a1(
                1,
                HalfInt::from_twice(tjp),
                HalfInt::from_twice(tmjp),
                0,
                s_half,
                pair.mj_in,
                eps,
            )
            .expect("quantum numbers valid");
            total += y * c * a1 * d1;
        }
    }
    total
}

/// Two-photon channels: (l', 2j', 2j'') plus the matching radial integral.
fn t2_channels(rad: &RadialIntegrals) -> [(i32, i32, i32, C64); 5] {
    [
        (0, 1, 1, rad.d2_s12_p12),
        (0, 1, 3, rad.d2_s12_p32),
        (2, 3, 1, rad.d2_d32_p12),
        (2, 3, 3, rad.d2_d32_p32),
        (2, 5, 3, rad.d2_d52_p32),
    ]
}

/// Two-photon transition amplitude t2(m_s', m_j): the double sum over final
/// S and D channels and intermediate P levels, times the relative factor i.
pub fn t2(
    pair: SpinPair,
    eps: &PolarizationVector,
    kdet: &Direction,
    rad: &RadialIntegrals,
) -> C64 {
    let s_half = HalfInt::HALF;
    let mut total = C64::new(0.0, 0.0);
    for (lp, tjp, tjpp, d2) in t2_channels(rad) {
        if d2.norm_sqr() == 0.0 {
            continue;
        }
        for tmlp in (-2 * lp..=2 * lp).step_by(2) {
            let y = spherical_harmonic(lp, tmlp / 2, kdet).expect("l' in range");
            if y.norm_sqr() == 0.0 {
                continue;
            }
            let tmjp = tmlp + pair.ms_out.twice();
            if tmjp.abs() > tjp {
                continue;
            }
            let c = cg(2 * lp, tmlp, 1, pair.ms_out.twice(), tjp, tmjp);
            if c == 0.0 {
                continue;
            }
            let a2 = angular_dipole_a2(
                lp,
                HalfInt::from_twice(tjp),
                HalfInt::from_twice(tmjp),
                1,
                HalfInt::from_twice(tjpp),
                0,
                s_half,
                pair.mj_in,
                eps,
            )
            .expect("quantum numbers valid");
            total += y * c * a2 * d2;
        }
    }
    C64::new(0.0, 1.0) * total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angular::Direction;

    fn h(t: i32) -> HalfInt {
        HalfInt::from_twice(t)
    }

    fn zhat() -> PolarizationVector {
        PolarizationVector::linear(&Direction::Z).unwrap()
    }

    fn xhat() -> PolarizationVector {
        PolarizationVector::linear(&Direction::X).unwrap()
    }

    #[test]
    fn a1_vanishes_unless_l_changes_by_one() {
        for (lp, l) in [(0, 0), (1, 1), (2, 0), (0, 2), (2, 2)] {
            let v = angular_dipole_a1(lp, h(1), h(1), l, h(1), h(1), &zhat()).unwrap();
            assert_eq!(v, C64::new(0.0, 0.0), "l'={lp} l={l}");
        }
    }

    #[test]
    fn a1_pi_transition_preserves_mj() {
        // eps = z picks q = 0 only
        let v = angular_dipole_a1(1, h(3), h(1), 0, h(1), h(-1), &zhat()).unwrap();
        assert_eq!(v, C64::new(0.0, 0.0));
        let w = angular_dipole_a1(1, h(3), h(-1), 0, h(1), h(-1), &zhat()).unwrap();
        assert!(w.norm() > 0.1);
    }

    #[test]
    fn a1_against_explicit_cg_sum() {
        // (l'=1, j'=3/2, mj'=1/2) <- (l=0, j=1/2, mj=-1/2) with eps = x.
        // Only the q = +1 component of x (-1/sqrt(2)) contributes:
        //   pref = sqrt(1/3) * <0 0; 1 0 | 1 0> = sqrt(1/3)
        //   <0 0; 1 1 | 1 1> = 1
        //   m_s = -1/2: <1 1; 1/2 -1/2 | 3/2 1/2> = sqrt(1/3),
        //               <0 0; 1/2 -1/2 | 1/2 -1/2> = 1
        let want = -(1.0f64 / 2.0).sqrt() * (1.0f64 / 3.0).sqrt() * (1.0f64 / 3.0).sqrt();
        let got = angular_dipole_a1(1, h(3), h(1), 0, h(1), h(-1), &xhat()).unwrap();
        assert!((got - want).norm() < 1e-14, "got {got}, want {want}");
    }

    #[test]
    fn a2_parity_selection() {
        // two dipole steps from l = 0 cannot end on l' = 1
        let v = angular_dipole_a2(1, h(3), h(1), 1, h(3), 0, h(1), h(1), &zhat()).unwrap();
        assert_eq!(v, C64::new(0.0, 0.0));
    }

    #[test]
    fn a2_rejects_bad_intermediate() {
        assert!(angular_dipole_a2(2, h(3), h(1), 0, h(1), 0, h(1), h(1), &zhat()).is_err());
        assert!(angular_dipole_a2(2, h(3), h(1), 1, h(5), 0, h(1), h(1), &zhat()).is_err());
    }

    #[test]
    fn a2_pi_transitions_preserve_mj() {
        for tjp in [1, 3] {
            let v =
                angular_dipole_a2(0, h(1), h(1), 1, h(tjp), 0, h(1), h(-1), &zhat()).unwrap();
            assert_eq!(v, C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn a2_equals_product_of_a1_blocks() {
        // brute-force product over all intermediate projections for a D3/2
        // final state and a generic complex polarization
        let eps = PolarizationVector::new(
            C64::new(0.2, 0.3),
            C64::new(0.5, -0.4),
            C64::new(
                (1.0f64 - 0.04 - 0.09 - 0.25 - 0.16 - 0.36).max(0.0).sqrt(),
                -0.6,
            ),
        );
        // fall back to a fixed normalized vector
        let eps = eps.unwrap_or_else(|_| {
            PolarizationVector::new(
                C64::new(0.48, 0.0),
                C64::new(0.0, 0.64),
                C64::new(0.6, 0.0),
            )
            .unwrap()
        });
        for (tjp, tjpp) in [(3, 1), (3, 3), (5, 3), (1, 1), (1, 3)] {
            for tmjp in (-tjp..=tjp).step_by(2) {
                for tmj in [-1, 1] {
                    let lp = if tjp == 1 { 0 } else { 2 };
                    let direct = angular_dipole_a2(
                        lp,
                        h(tjp),
                        h(tmjp),
                        1,
                        h(tjpp),
                        0,
                        h(1),
                        h(tmj),
                        &eps,
                    )
                    .unwrap();
                    let mut brute = C64::new(0.0, 0.0);
                    for tmjpp in (-tjpp..=tjpp).step_by(2) {
                        brute += angular_dipole_a1(lp, h(tjp), h(tmjp), 1, h(tjpp), h(tmjpp), &eps)
                            .unwrap()
                            * angular_dipole_a1(1, h(tjpp), h(tmjpp), 0, h(1), h(tmj), &eps)
                                .unwrap();
                    }
                    assert!((direct - brute).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn t1_t2_linear_in_radial_integrals() {
        let kdet = Direction::from_unnormalized(2.0f64.sqrt(), 0.0, -1.0).unwrap();
        let eps = PolarizationVector::new(
            C64::new(0.48, 0.0),
            C64::new(0.0, 0.64),
            C64::new(0.6, 0.0),
        )
        .unwrap();
        let ra = RadialIntegrals::from_seed(5);
        let mut rb = RadialIntegrals::from_seed(6);
        rb.d2_d52_p32 = C64::new(0.3, -0.2);
        let (ca, cb) = (C64::new(0.7, -1.1), C64::new(-0.4, 0.9));
        let mut rc = ra;
        for (a, b, c) in [
            (&ra.d1_p12, &rb.d1_p12, &mut rc.d1_p12),
            (&ra.d1_p32, &rb.d1_p32, &mut rc.d1_p32),
            (&ra.d2_s12_p12, &rb.d2_s12_p12, &mut rc.d2_s12_p12),
            (&ra.d2_s12_p32, &rb.d2_s12_p32, &mut rc.d2_s12_p32),
            (&ra.d2_d32_p12, &rb.d2_d32_p12, &mut rc.d2_d32_p12),
            (&ra.d2_d32_p32, &rb.d2_d32_p32, &mut rc.d2_d32_p32),
            (&ra.d2_d52_p32, &rb.d2_d52_p32, &mut rc.d2_d52_p32),
        ] {
            *c = ca * a + cb * b;
        }
        for tms in [-1, 1] {
            for tmj in [-1, 1] {
                let pair = SpinPair::new(h(tms), h(tmj)).unwrap();
                let lin1 = ca * t1(pair, &eps, &kdet, &ra) + cb * t1(pair, &eps, &kdet, &rb);
                assert!((t1(pair, &eps, &kdet, &rc) - lin1).norm() < 1e-12);
                let lin2 = ca * t2(pair, &eps, &kdet, &ra) + cb * t2(pair, &eps, &kdet, &rb);
                assert!((t2(pair, &eps, &kdet, &rc) - lin2).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn t1_vanishes_with_zero_d1() {
        let kdet = Direction::from_unnormalized(2.0f64.sqrt(), 0.0, -1.0).unwrap();
        let eps = zhat();
        let mut rad = RadialIntegrals::from_seed(3);
        rad.d1_p12 = C64::new(0.0, 0.0);
        rad.d1_p32 = C64::new(0.0, 0.0);
        for tms in [-1, 1] {
            for tmj in [-1, 1] {
                let pair = SpinPair::new(h(tms), h(tmj)).unwrap();
                assert_eq!(t1(pair, &eps, &kdet, &rad), C64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn spin_pair_validation() {
        assert!(SpinPair::new(h(1), h(-1)).is_ok());
        assert!(SpinPair::new(h(3), h(-1)).is_err());
    }

    #[test]
    fn key_value_round_trip() {
        let rad = RadialIntegrals::from_seed(42);
        let text = rad.to_key_value();
        let back = RadialIntegrals::parse_key_value(&text).unwrap();
        assert_eq!(rad, back);
    }

    #[test]
    fn key_value_rejects_bad_input() {
        assert!(RadialIntegrals::parse_key_value("D1_P12 = 1,0").is_err()); // missing keys
        let rad = RadialIntegrals::from_seed(1);
        let mut text = rad.to_key_value();
        text.push_str("D1_P12 = 2,0\n");
        assert!(RadialIntegrals::parse_key_value(&text).is_err()); // duplicate
        let bad = rad.to_key_value().replace("D1_P32", "D1_P99");
        assert!(RadialIntegrals::parse_key_value(&bad).is_err()); // unknown key
        let bad2 = rad.to_key_value().replace(',', ";");
        assert!(RadialIntegrals::parse_key_value(&bad2).is_err()); // bad value
    }

    #[test]
    fn fixture_has_zero_d52_and_valid_brackets() {
        let rad = RadialIntegrals::from_seed(42);
        assert_eq!(rad.d2_d52_p32, C64::new(0.0, 0.0));
        rad.validate().unwrap();
    }
}
