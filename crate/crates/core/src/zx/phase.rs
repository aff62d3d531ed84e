//! Spider phases.
//!
//! A phase is an angle modulo 2π. Rational multiples of π are kept exact so
//! that repeated fusion of Clifford+T style phases never drifts; anything
//! else falls back to an `f64` in radians.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_rational::Rational64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

const TAU: f64 = 2.0 * PI;

#[derive(Clone, Copy, Debug)]
pub enum Phase {
    /// `r·π` with `0 <= r < 2`.
    Pi(Rational64),
    /// Radians in `[0, 2π)`.
    Radians(f64),
}

fn reduce_pi(r: Rational64) -> Rational64 {
    let two = Rational64::from_integer(2);
    let mut q = r % two;
    if q < Rational64::from_integer(0) {
        q += two;
    }
    q
}

fn reduce_radians(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

impl Phase {
    pub fn zero() -> Self {
        Phase::Pi(Rational64::from_integer(0))
    }

    pub fn pi() -> Self {
        Phase::Pi(Rational64::from_integer(1))
    }

    /// `numer/denom · π`.
    pub fn from_pi_fraction(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "phase denominator must be nonzero");
        Phase::Pi(reduce_pi(Rational64::new(numer, denom)))
    }

    /// `m·π` for an outcome bit or any integer.
    pub fn pi_times(m: i64) -> Self {
        Self::from_pi_fraction(m, 1)
    }

    pub fn from_radians(x: f64) -> Self {
        assert!(x.is_finite(), "phase must be finite, got {x}");
        Phase::Radians(reduce_radians(x))
    }

    pub fn radians(&self) -> f64 {
        match *self {
            Phase::Pi(r) => *r.numer() as f64 / *r.denom() as f64 * PI,
            Phase::Radians(x) => x,
        }
    }

    /// The exact π-multiple, if this phase is stored rationally.
    pub fn as_pi_fraction(&self) -> Option<Rational64> {
        match *self {
            Phase::Pi(r) => Some(r),
            Phase::Radians(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match *self {
            Phase::Pi(r) => r == Rational64::from_integer(0),
            Phase::Radians(x) => x == 0.0,
        }
    }

    /// `Some(0)` or `Some(1)` when the phase is exactly `0` or `π`.
    pub fn pauli_bit(&self) -> Option<u8> {
        match *self {
            Phase::Pi(r) if r == Rational64::from_integer(0) => Some(0),
            Phase::Pi(r) if r == Rational64::from_integer(1) => Some(1),
            _ => None,
        }
    }

    /// Equality modulo 2π within `tol` radians.
    pub fn approx_eq(&self, other: &Phase, tol: f64) -> bool {
        let d = (self.radians() - other.radians()).rem_euclid(TAU);
        d <= tol || TAU - d <= tol
    }
}

impl Default for Phase {
    fn default() -> Self {
        Phase::zero()
    }
}

impl PartialEq for Phase {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Phase::Pi(a), Phase::Pi(b)) => a == b,
            _ => self.radians() == other.radians(),
        }
    }
}

impl Add for Phase {
    type Output = Phase;

    fn add(self, rhs: Phase) -> Phase {
        match (self, rhs) {
            (Phase::Pi(a), Phase::Pi(b)) => Phase::Pi(reduce_pi(a + b)),
            _ => Phase::from_radians(self.radians() + rhs.radians()),
        }
    }
}

impl Neg for Phase {
    type Output = Phase;

    fn neg(self) -> Phase {
        match self {
            Phase::Pi(a) => Phase::Pi(reduce_pi(-a)),
            Phase::Radians(x) => Phase::from_radians(-x),
        }
    }
}

impl Sub for Phase {
    type Output = Phase;

    fn sub(self, rhs: Phase) -> Phase {
        self + (-rhs)
    }
}

/// Wire form: `{"num": n, "den": d}` for `n/d·π`, or `{"radians": x}`.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PhaseRepr {
    Pi { num: i64, den: i64 },
    Radians { radians: f64 },
}

impl Serialize for Phase {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match *self {
            Phase::Pi(r) => PhaseRepr::Pi {
                num: *r.numer(),
                den: *r.denom(),
            },
            Phase::Radians(x) => PhaseRepr::Radians { radians: x },
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Phase {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match PhaseRepr::deserialize(d)? {
            PhaseRepr::Pi { den: 0, .. } => Err(serde::de::Error::custom("phase denominator is 0")),
            PhaseRepr::Pi { num, den } => Ok(Phase::from_pi_fraction(num, den)),
            PhaseRepr::Radians { radians } if radians.is_finite() => Ok(Phase::from_radians(radians)),
            PhaseRepr::Radians { .. } => Err(serde::de::Error::custom("phase is not finite")),
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Phase::Pi(r) if *r.numer() == 0 => write!(f, "0"),
            Phase::Pi(r) if *r.denom() == 1 && *r.numer() == 1 => write!(f, "π"),
            Phase::Pi(r) if *r.denom() == 1 => write!(f, "{}π", r.numer()),
            Phase::Pi(r) => write!(f, "{}π/{}", r.numer(), r.denom()),
            Phase::Radians(x) => write!(f, "{x:.6}"),
        }
    }
}
