//! Exact small-angular-momentum algebra: Clebsch-Gordan coefficients in the
//! Condon-Shortley convention, spherical harmonics for l <= 2, and spherical
//! components of complex polarization vectors.

use core::fmt;

#[allow(unused_imports)]
use num_traits::Float as _;

use crate::{C64, Error, Result};

/// Half-integer quantum number, stored as twice its value so that j = 3/2 is
/// exact.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct HalfInt {
    twice: i32,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { twice: 0 };
    pub const HALF: HalfInt = HalfInt { twice: 1 };
    pub const MINUS_HALF: HalfInt = HalfInt { twice: -1 };
    pub const ONE: HalfInt = HalfInt { twice: 2 };

    /// Construct from twice the value (`from_twice(3)` is 3/2).
    pub const fn from_twice(twice: i32) -> Self {
        HalfInt { twice }
    }

    pub const fn from_int(value: i32) -> Self {
        HalfInt { twice: 2 * value }
    }

    pub const fn twice(self) -> i32 {
        self.twice
    }

    pub fn as_f64(self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice % 2 == 0 {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

/// Unit vector in R^3.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Direction {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

pub const UNIT_TOL: f64 = 1e-12;

impl Direction {
    pub const X: Direction = Direction { x: 1.0, y: 0.0, z: 0.0 };
    pub const Y: Direction = Direction { x: 0.0, y: 1.0, z: 0.0 };
    pub const Z: Direction = Direction { x: 0.0, y: 0.0, z: 1.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let n2 = x * x + y * y + z * z;
        if (n2 - 1.0).abs() > UNIT_TOL {
            return Err(Error::domain("direction is not unit-norm"));
        }
        Ok(Direction { x, y, z })
    }

    pub fn from_unnormalized(x: f64, y: f64, z: f64) -> Result<Self> {
        let n = (x * x + y * y + z * z).sqrt();
        if n < 1e-300 {
            return Err(Error::domain("cannot normalize a zero vector"));
        }
        Ok(Direction { x: x / n, y: y / n, z: z / n })
    }

    pub fn dot(&self, other: &Direction) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(&self, other: &Direction) -> (f64, f64, f64) {
        (
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }
}

/// Unit-norm complex polarization vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarizationVector {
    pub x: C64,
    pub y: C64,
    pub z: C64,
}

impl PolarizationVector {
    pub fn new(x: C64, y: C64, z: C64) -> Result<Self> {
        let n2 = x.norm_sqr() + y.norm_sqr() + z.norm_sqr();
        if (n2 - 1.0).abs() > UNIT_TOL {
            return Err(Error::domain("polarization is not unit-norm"));
        }
        Ok(PolarizationVector { x, y, z })
    }

    pub fn linear(k: &Direction) -> Result<Self> {
        Self::new(C64::new(k.x, 0.0), C64::new(k.y, 0.0), C64::new(k.z, 0.0))
    }

    /// Bilinear product with a real direction (no conjugation).
    pub fn dot_direction(&self, k: &Direction) -> C64 {
        self.x * k.x + self.y * k.y + self.z * k.z
    }

    pub fn is_transversal_to(&self, k: &Direction) -> bool {
        self.dot_direction(k).norm() <= UNIT_TOL
    }

    pub fn norm_sqr(&self) -> f64 {
        self.x.norm_sqr() + self.y.norm_sqr() + self.z.norm_sqr()
    }
}

fn fact(n: i32) -> f64 {
    debug_assert!(n >= 0);
    (1..=n).map(|k| k as f64).product()
}

/// Clebsch-Gordan coefficient <j1 m1; j2 m2 | J M> in the Condon-Shortley
/// convention, evaluated with Racah's closed-form sum.
///
/// Returns 0 when M != m1 + m2 or the triangle inequality fails; angular
/// momenta above 7/2 are outside the supported range.
pub fn clebsch_gordan(
    j1: HalfInt,
    m1: HalfInt,
    j2: HalfInt,
    m2: HalfInt,
    j: HalfInt,
    m: HalfInt,
) -> Result<f64> {
    let (tj1, tm1, tj2, tm2, tj, tm) =
        (j1.twice(), m1.twice(), j2.twice(), m2.twice(), j.twice(), m.twice());
    for (tjx, tmx) in [(tj1, tm1), (tj2, tm2), (tj, tm)] {
        if tjx < 0 {
            return Err(Error::domain("negative angular momentum"));
        }
        if tmx.abs() > tjx {
            return Err(Error::domain("|m| exceeds j"));
        }
        if (tjx + tmx) % 2 != 0 {
            return Err(Error::domain("j and m must both be integer or both half-odd"));
        }
        if tjx > 7 {
            return Err(Error::domain("angular momenta above 7/2 are unsupported"));
        }
    }
    if tm != tm1 + tm2 {
        return Ok(0.0);
    }
    if tj < (tj1 - tj2).abs() || tj > tj1 + tj2 || (tj1 + tj2 + tj) % 2 != 0 {
        return Ok(0.0);
    }
    let h = |x: i32| x / 2;
    let pref = (tj + 1) as f64
        * fact(h(tj + tj1 - tj2))
        * fact(h(tj - tj1 + tj2))
        * fact(h(tj1 + tj2 - tj))
        / fact(h(tj1 + tj2 + tj) + 1)
        * fact(h(tj + tm))
        * fact(h(tj - tm))
        * fact(h(tj1 - tm1))
        * fact(h(tj1 + tm1))
        * fact(h(tj2 - tm2))
        * fact(h(tj2 + tm2));
    let k_min = 0.max(h(tj2 - tm1 - tj)).max(h(tj1 + tm2 - tj));
    let k_max = h(tj1 + tj2 - tj).min(h(tj1 - tm1)).min(h(tj2 + tm2));
    let mut sum = 0.0;
    for k in k_min..=k_max {
        let den = fact(k)
            * fact(h(tj1 + tj2 - tj) - k)
            * fact(h(tj1 - tm1) - k)
            * fact(h(tj2 + tm2) - k)
            * fact(h(tj - tj2 + tm1) + k)
            * fact(h(tj - tj1 - tm2) + k);
        sum += if k % 2 == 0 { 1.0 } else { -1.0 } / den;
    }
    Ok(pref.sqrt() * sum)
}

/// Physics-convention spherical harmonic Y_lm for l <= 2, evaluated directly
/// from the Cartesian components of the unit direction.
pub fn spherical_harmonic(l: i32, m: i32, n: &Direction) -> Result<C64> {
    use core::f64::consts::PI;
    if !(0..=2).contains(&l) {
        return Err(Error::domain("spherical_harmonic supports l in 0..=2"));
    }
    if m.abs() > l {
        return Err(Error::domain("|m| exceeds l"));
    }
    let xy = C64::new(n.x, n.y); // sin(theta) e^{i phi}
    let z = n.z; // cos(theta)
    let v = match (l, m) {
        (0, 0) => C64::new(0.5 / PI.sqrt(), 0.0),
        (1, 0) => C64::new((3.0 / (4.0 * PI)).sqrt() * z, 0.0),
        (1, 1) => -(3.0 / (8.0 * PI)).sqrt() * xy,
        (1, -1) => (3.0 / (8.0 * PI)).sqrt() * xy.conj(),
        (2, 0) => C64::new((5.0 / (16.0 * PI)).sqrt() * (3.0 * z * z - 1.0), 0.0),
        (2, 1) => -(15.0 / (8.0 * PI)).sqrt() * z * xy,
        (2, -1) => (15.0 / (8.0 * PI)).sqrt() * z * xy.conj(),
        (2, 2) => (15.0 / (32.0 * PI)).sqrt() * xy * xy,
        (2, -2) => (15.0 / (32.0 * PI)).sqrt() * xy.conj() * xy.conj(),
        _ => unreachable!(),
    };
    Ok(v)
}

/// Spherical component eps_q = eps . e_q^* with e_{+-1} = -+(x +- iy)/sqrt(2)
/// and e_0 = z.
pub fn spherical_component(eps: &PolarizationVector, q: i32) -> Result<C64> {
    let inv_sqrt2 = core::f64::consts::FRAC_1_SQRT_2;
    match q {
        1 => Ok(-(eps.x - C64::new(0.0, 1.0) * eps.y) * inv_sqrt2),
        -1 => Ok((eps.x + C64::new(0.0, 1.0) * eps.y) * inv_sqrt2),
        0 => Ok(eps.z),
        _ => Err(Error::domain("spherical component index must be -1, 0, or +1")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn h(t: i32) -> HalfInt {
        HalfInt::from_twice(t)
    }

    fn cg(tj1: i32, tm1: i32, tj2: i32, tm2: i32, tj: i32, tm: i32) -> f64 {
        clebsch_gordan(h(tj1), h(tm1), h(tj2), h(tm2), h(tj), h(tm)).unwrap()
    }

    #[test]
    fn cg_reference_values() {
        // <1 0; 1/2 1/2 | 3/2 1/2> = sqrt(2/3)
        assert!((cg(2, 0, 1, 1, 3, 1) - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        // coupling with a scalar
        assert!((cg(3, 1, 0, 0, 3, 1) - 1.0).abs() < 1e-15);
        // stretched state
        assert!((cg(2, 2, 1, 1, 3, 3) - 1.0).abs() < 1e-15);
        // M != m1 + m2
        assert_eq!(cg(2, 0, 1, 1, 3, 3), 0.0);
    }

    #[test]
    fn cg_against_explicit_table() {
        // standard 1 (x) 1/2 table
        let s = |x: f64| x.sqrt();
        let cases = [
            (2, 2, 1, -1, 3, 1, s(1.0 / 3.0)),
            (2, 2, 1, -1, 1, 1, s(2.0 / 3.0)),
            (2, 0, 1, 1, 1, 1, -s(1.0 / 3.0)),
            (2, 0, 1, -1, 3, -1, s(2.0 / 3.0)),
            (2, 0, 1, -1, 1, -1, s(1.0 / 3.0)),
            (2, -2, 1, 1, 1, -1, -s(2.0 / 3.0)),
            (2, -2, 1, 1, 3, -1, s(1.0 / 3.0)),
            (2, -2, 1, -1, 3, -3, 1.0),
            // 1 (x) 1 -> 0 and parity checks
            (2, 0, 2, 0, 0, 0, -s(1.0 / 3.0)),
            (2, 2, 2, -2, 0, 0, s(1.0 / 3.0)),
            (2, 0, 2, 0, 4, 0, s(2.0 / 3.0)),
            (2, 2, 2, 0, 2, 2, s(1.0 / 2.0)),
        ];
        for (tj1, tm1, tj2, tm2, tj, tm, want) in cases {
            let got = cg(tj1, tm1, tj2, tm2, tj, tm);
            assert!(
                (got - want).abs() < 1e-14,
                "CG({tj1}/2 {tm1}/2; {tj2}/2 {tm2}/2 | {tj}/2 {tm}/2): got {got}, want {want}"
            );
        }
    }

    #[test]
    fn cg_rejects_invalid_quantum_numbers() {
        assert!(clebsch_gordan(h(1), h(3), h(1), h(1), h(2), h(2)).is_err()); // |m| > j
        assert!(clebsch_gordan(h(-2), h(0), h(1), h(1), h(3), h(1)).is_err()); // j < 0
        assert!(clebsch_gordan(h(2), h(1), h(1), h(1), h(3), h(2)).is_err()); // j, m parity
    }

    #[test]
    fn cg_orthogonality() {
        // sum over m1, m2 of CG(.. | J M) CG(.. | J' M') = delta_JJ' delta_MM'
        for (tj1, tj2) in [(2i32, 1i32), (3, 2), (4, 1), (5, 2)] {
            let tjs: alloc::vec::Vec<i32> = ((tj1 - tj2).abs()..=tj1 + tj2).step_by(2).collect();
            for &tja in &tjs {
                for &tjb in &tjs {
                    for tma in (-tja..=tja).step_by(2) {
                        for tmb in (-tjb..=tjb).step_by(2) {
                            let mut acc = 0.0;
                            for tm1 in (-tj1..=tj1).step_by(2) {
                                for tm2 in (-tj2..=tj2).step_by(2) {
                                    if tm1 + tm2 != tma || tm1 + tm2 != tmb {
                                        continue;
                                    }
                                    acc += cg(tj1, tm1, tj2, tm2, tja, tma)
                                        * cg(tj1, tm1, tj2, tm2, tjb, tmb);
                                }
                            }
                            let want = if tja == tjb && tma == tmb { 1.0 } else { 0.0 };
                            assert!((acc - want).abs() < 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn cg_symmetry_under_m_reflection() {
        for (tj1, tj2) in [(2i32, 1i32), (3, 2), (5, 2)] {
            for tj in ((tj1 - tj2).abs()..=tj1 + tj2).step_by(2) {
                for tm1 in (-tj1..=tj1).step_by(2) {
                    for tm2 in (-tj2..=tj2).step_by(2) {
                        let tm = tm1 + tm2;
                        if tm.abs() > tj {
                            continue;
                        }
                        let lhs = cg(tj1, tm1, tj2, tm2, tj, tm);
                        let sign = if ((tj1 + tj2 - tj) / 2) % 2 == 0 { 1.0 } else { -1.0 };
                        let rhs = sign * cg(tj1, -tm1, tj2, -tm2, tj, -tm);
                        assert!((lhs - rhs).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn harmonic_reference_values() {
        use core::f64::consts::PI;
        let y00 = spherical_harmonic(0, 0, &Direction::X).unwrap();
        assert!((y00.re - 0.5 / PI.sqrt()).abs() < 1e-15 && y00.im == 0.0);
        let y10 = spherical_harmonic(1, 0, &Direction::Z).unwrap();
        assert!((y10.re - (3.0 / (4.0 * PI)).sqrt()).abs() < 1e-15);
        let y11 = spherical_harmonic(1, 1, &Direction::Z).unwrap();
        assert!(y11.norm() < 1e-15);
        assert!(spherical_harmonic(3, 0, &Direction::Z).is_err());
        assert!(spherical_harmonic(1, 2, &Direction::Z).is_err());
    }

    #[test]
    fn harmonic_addition_theorem() {
        // sum_m |Y_lm|^2 = (2l+1)/(4pi) for random directions
        use core::f64::consts::PI;
        let mut state = 0x2545f4914f6cdd1du64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        for _ in 0..100 {
            let n = loop {
                let (x, y, z) = (next(), next(), next());
                if x * x + y * y + z * z > 1e-3 {
                    break Direction::from_unnormalized(x, y, z).unwrap();
                }
            };
            for l in 0..=2i32 {
                let sum: f64 = (-l..=l)
                    .map(|m| spherical_harmonic(l, m, &n).unwrap().norm_sqr())
                    .sum();
                assert!((sum - (2 * l + 1) as f64 / (4.0 * PI)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn spherical_component_reference_values() {
        let zhat = PolarizationVector::linear(&Direction::Z).unwrap();
        assert!((spherical_component(&zhat, 0).unwrap() - 1.0).norm() < 1e-15);
        assert!(spherical_component(&zhat, 1).unwrap().norm() < 1e-15);
        assert!(spherical_component(&zhat, -1).unwrap().norm() < 1e-15);
        let xhat = PolarizationVector::linear(&Direction::X).unwrap();
        let inv_sqrt2 = core::f64::consts::FRAC_1_SQRT_2;
        assert!((spherical_component(&xhat, 1).unwrap() + inv_sqrt2).norm() < 1e-15);
        assert!((spherical_component(&xhat, -1).unwrap() - inv_sqrt2).norm() < 1e-15);
        assert!(spherical_component(&xhat, 2).is_err());
    }

    proptest! {
        #[test]
        fn spherical_component_is_isometry(
            re in proptest::collection::vec(-3.0f64..3.0, 3),
            im in proptest::collection::vec(-3.0f64..3.0, 3),
        ) {
            // arbitrary complex 3-vector, not necessarily unit: check
            // sum_q |eps_q|^2 equals the Cartesian norm^2
            let v = PolarizationVector {
                x: C64::new(re[0], im[0]),
                y: C64::new(re[1], im[1]),
                z: C64::new(re[2], im[2]),
            };
            let sum: f64 = [-1, 0, 1]
                .iter()
                .map(|&q| spherical_component(&v, q).unwrap().norm_sqr())
                .sum();
            prop_assert!((sum - v.norm_sqr()).abs() < 1e-12 * (1.0 + v.norm_sqr()));
        }
    }
}
