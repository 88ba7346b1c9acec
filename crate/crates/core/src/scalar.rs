//! Scalar types: exact rationals for the combinatorial algebra, complex
//! floats for operator-level checks.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

pub type Q = num_rational::Rational64;
pub type C64 = num_complex::Complex64;

/// Default tolerance for floating-point identities.
pub const TOL: f64 = 1e-9;

/// A field with an involution, enough for group-algebra convolution and
/// adjoints.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn conj(&self) -> Self;
}

impl Scalar for Q {
    fn conj(&self) -> Self {
        *self
    }
}

impl Scalar for C64 {
    fn conj(&self) -> Self {
        num_complex::Complex::conj(self)
    }
}

pub fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

/// Renders a rational as `n` or `n/d`.
pub fn format_q(x: &Q) -> String {
    if *x.denom() == 1 {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(text: &str) -> crate::Result<Q> {
    let t = text.trim();
    let bad = || crate::Error::Parse(format!("bad rational {text:?}"));
    match t.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => Ok(Q::from_integer(t.parse().map_err(|_| bad())?)),
    }
}
