//! Shared geometric types, sign/index conventions, and the numeric
//! tolerances used across the crate.
//!
//! Conventions fixed here and relied on everywhere else:
//!
//! - Outcome signs are +1/-1, encoded as bit 0 for +1 and bit 1 for -1.
//! - A pair (a, a') of signs indexes 0..4 big-endian: (+,+), (+,-), (-,+), (-,-).
//! - A triple (alpha, a, a') indexes 0..8 the same way, alpha first.
//! - Bloch vectors live in the closed unit ball; measurement directions are
//!   unit vectors.

use nalgebra::Vector3;

use crate::error::{Error, Result};

/// Numeric tolerances pinned for the whole crate.
///
/// Every equality assertion in the library and its test suites uses one of
/// these named constants rather than an ad-hoc literal.
pub mod tol {
    /// Entry-level agreement between two routes computing the same number
    /// (probabilities, matrix entries, frame overlaps).
    pub const ENTRY: f64 = 1e-12;

    /// Agreement for derived quantities that accumulate a few arithmetic
    /// steps (channel round trips, entropy identities, grid residuals).
    pub const DERIVED: f64 = 1e-9;

    /// Positivity floor: an entry counts as negative only below this.
    /// Values in [NEGATIVE_FLOOR, 0) are clamped to zero and counted.
    pub const NEGATIVE_FLOOR: f64 = -1e-12;

    /// Slack accepted on user-supplied unit vectors and normalized
    /// distributions before they are rejected as invalid input.
    pub const INPUT: f64 = 1e-9;
}

/// A binary outcome, +1 or -1.
///
/// Index convention: `Plus` is bit 0, `Minus` is bit 1, so enumerating
/// outcomes in index order always lists +1 first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    /// The +1 outcome.
    Plus,
    /// The -1 outcome.
    Minus,
}

impl Sign {
    /// Both signs in index order (+1 first).
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    /// The sign as a float, +1.0 or -1.0.
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    /// Bit encoding: Plus -> 0, Minus -> 1.
    pub fn bit(self) -> usize {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }

    /// Inverse of [`Sign::bit`]. Panics on bits other than 0/1.
    pub fn from_bit(bit: usize) -> Sign {
        match bit {
            0 => Sign::Plus,
            1 => Sign::Minus,
            _ => panic!("sign bit must be 0 or 1, got {bit}"),
        }
    }

    /// The opposite sign.
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Sign::Plus => write!(f, "+1"),
            Sign::Minus => write!(f, "-1"),
        }
    }
}

/// Signs (a, a') for a pair index in 0..4 (big-endian, +1 first).
pub fn pair_signs(index: usize) -> (f64, f64) {
    debug_assert!(index < 4);
    let a = 1.0 - 2.0 * ((index >> 1) & 1) as f64;
    let ap = 1.0 - 2.0 * (index & 1) as f64;
    (a, ap)
}

/// Pair index for signs (a, a'); inverse of [`pair_signs`].
pub fn pair_index(a: Sign, ap: Sign) -> usize {
    (a.bit() << 1) | ap.bit()
}

/// Signs (alpha, a, a') for a triple index in 0..8 (big-endian, alpha first).
pub fn triple_signs(index: usize) -> (f64, f64, f64) {
    debug_assert!(index < 8);
    let alpha = 1.0 - 2.0 * ((index >> 2) & 1) as f64;
    let a = 1.0 - 2.0 * ((index >> 1) & 1) as f64;
    let ap = 1.0 - 2.0 * (index & 1) as f64;
    (alpha, a, ap)
}

/// Triple index for (alpha, pair); inverse of [`triple_signs`].
pub fn triple_index(alpha: Sign, pair: usize) -> usize {
    debug_assert!(pair < 4);
    (alpha.bit() << 2) | pair
}

/// A qubit state vector in the Bloch ball, |s| <= 1.
///
/// Construction rejects vectors outside the ball beyond [`tol::INPUT`] slack;
/// the stored components are kept exactly as given.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVec(Vector3<f64>);

impl BlochVec {
    /// Build from components, rejecting |s| > 1 + 1e-9.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::from_vector(Vector3::new(x, y, z))
    }

    /// Build from a vector, rejecting |s| > 1 + 1e-9.
    pub fn from_vector(v: Vector3<f64>) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || norm > 1.0 + tol::INPUT {
            return Err(Error::NonPhysicalState { norm });
        }
        Ok(BlochVec(v))
    }

    /// The center of the ball (maximally mixed state).
    pub fn zero() -> Self {
        BlochVec(Vector3::zeros())
    }

    /// Underlying vector.
    pub fn vector(&self) -> Vector3<f64> {
        self.0
    }

    /// Euclidean length, <= 1 for physical states.
    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    /// Squared length.
    pub fn norm_squared(&self) -> f64 {
        self.0.norm_squared()
    }
}

/// A measurement direction: a unit vector on the Bloch sphere.
///
/// Input must already be unit length to within [`tol::INPUT`]; it is then
/// renormalized so downstream arithmetic sees |m| = 1 to machine precision.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasDirection(Vector3<f64>);

impl MeasDirection {
    /// Build from components of a unit vector (unit to within 1e-9).
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::from_vector(Vector3::new(x, y, z))
    }

    /// Build from a unit vector (unit to within 1e-9).
    pub fn from_vector(v: Vector3<f64>) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > tol::INPUT {
            return Err(Error::NonUnitDirection { norm });
        }
        Ok(MeasDirection(v / norm))
    }

    /// Normalize an arbitrary nonzero vector into a direction.
    pub fn normalize(v: Vector3<f64>) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || norm < 1e-12 {
            return Err(Error::ZeroVector);
        }
        Ok(MeasDirection(v / norm))
    }

    /// +x axis.
    pub fn x() -> Self {
        MeasDirection(Vector3::x())
    }

    /// +y axis.
    pub fn y() -> Self {
        MeasDirection(Vector3::y())
    }

    /// +z axis.
    pub fn z() -> Self {
        MeasDirection(Vector3::z())
    }

    /// Underlying unit vector.
    pub fn vector(&self) -> Vector3<f64> {
        self.0
    }

    /// Dot product with a Bloch vector.
    pub fn dot_bloch(&self, s: &BlochVec) -> f64 {
        self.0.dot(&s.vector())
    }
}

/// The four measurement settings of a CHSH experiment: two per party.
#[derive(Clone, Copy, Debug)]
pub struct ChshSettings {
    /// First setting on the left party.
    pub a1: MeasDirection,
    /// Second setting on the left party.
    pub a2: MeasDirection,
    /// First setting on the right party.
    pub b1: MeasDirection,
    /// Second setting on the right party.
    pub b2: MeasDirection,
}

impl ChshSettings {
    /// The settings that maximize the CHSH value on the singlet:
    /// a1 = z, a2 = x, b1 = -(z+x)/sqrt(2), b2 = (x-z)/sqrt(2).
    pub fn tsirelson() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        ChshSettings {
            a1: MeasDirection::z(),
            a2: MeasDirection::x(),
            b1: MeasDirection::new(-s, 0.0, -s).expect("unit by construction"),
            b2: MeasDirection::new(s, 0.0, -s).expect("unit by construction"),
        }
    }

    /// All four settings equal to the given direction.
    pub fn all_equal(m: MeasDirection) -> Self {
        ChshSettings {
            a1: m,
            a2: m,
            b1: m,
            b2: m,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_roundtrip_and_values() {
        for (bit, sign) in Sign::BOTH.iter().enumerate() {
            assert_eq!(sign.bit(), bit);
            assert_eq!(Sign::from_bit(bit), *sign);
        }
        assert_eq!(Sign::Plus.value(), 1.0);
        assert_eq!(Sign::Minus.value(), -1.0);
        assert_eq!(Sign::Plus.flip(), Sign::Minus);
    }

    #[test]
    fn pair_index_order_is_plus_first_big_endian() {
        // Documented order: (+,+), (+,-), (-,+), (-,-).
        assert_eq!(pair_signs(0), (1.0, 1.0));
        assert_eq!(pair_signs(1), (1.0, -1.0));
        assert_eq!(pair_signs(2), (-1.0, 1.0));
        assert_eq!(pair_signs(3), (-1.0, -1.0));
        for i in 0..4 {
            let (a, ap) = pair_signs(i);
            let a = if a > 0.0 { Sign::Plus } else { Sign::Minus };
            let ap = if ap > 0.0 { Sign::Plus } else { Sign::Minus };
            assert_eq!(pair_index(a, ap), i);
        }
    }

    #[test]
    fn triple_index_is_alpha_major() {
        assert_eq!(triple_signs(0), (1.0, 1.0, 1.0));
        assert_eq!(triple_signs(3), (1.0, -1.0, -1.0));
        assert_eq!(triple_signs(4), (-1.0, 1.0, 1.0));
        assert_eq!(triple_signs(7), (-1.0, -1.0, -1.0));
        assert_eq!(triple_index(Sign::Minus, 2), 6);
    }

    #[test]
    fn bloch_ball_membership_is_enforced() {
        assert!(BlochVec::new(0.6, 0.0, 0.8).is_ok());
        assert!(BlochVec::new(0.8, 0.0, 0.8).is_err());
        // Slack admits unit vectors with representation dust.
        assert!(BlochVec::new(1.0 + 0.5e-9, 0.0, 0.0).is_ok());
    }

    #[test]
    fn direction_must_be_unit() {
        assert!(MeasDirection::new(0.0, 0.0, 1.0).is_ok());
        assert!(MeasDirection::new(0.0, 0.0, 2.0).is_err());
        assert!(MeasDirection::normalize(Vector3::new(3.0, 0.0, 4.0)).is_ok());
        assert!(MeasDirection::normalize(Vector3::zeros()).is_err());
    }

    #[test]
    fn tsirelson_settings_are_unit_and_planar() {
        let st = ChshSettings::tsirelson();
        for d in [st.a1, st.a2, st.b1, st.b2] {
            assert!((d.vector().norm() - 1.0).abs() < 1e-15);
            assert_eq!(d.vector().y, 0.0);
        }
        // b1 bisects -(a1+a2), b2 bisects (a2-a1).
        assert!((st.b1.vector().dot(&st.a1.vector()) + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((st.b2.vector().dot(&st.a2.vector()) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }
}
