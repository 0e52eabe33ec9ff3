//! Numerical laboratory for the bidirectional NLS approximation of the 1D ion
//! Euler-Poisson system
//!
//! ```text
//! d_t rho + d_x v + d_x(rho v) = 0
//! d_t v + v d_x v + d_x rho / (1 + rho) + d_x phi = 0
//! d_x^2 phi = exp(phi) - 1 - rho
//! ```
//!
//! around the constant state. Two counter-propagating carrier-envelope packets
//! `eps A(eps(x + c_g t), eps^2 t) e^{i(k0 x + w0 t)}` and
//! `eps B(eps(x - c_g t), eps^2 t) e^{i(k0 x - w0 t)}` are built from their NLS
//! equations, compared against the full pseudo-spectral solution, and the
//! normal-form kernels behind the error estimate are evaluated numerically.

pub mod ansatz;
pub mod coefficients;
pub mod dispersion;
pub mod envelope;
pub mod ep;
pub mod error;
pub mod fit;
pub mod harness;
pub mod normal_form;
pub mod spectral;

use std::fmt;
use std::ops::Neg;

use serde::{Deserialize, Serialize};

pub use error::{Error, Result};

/// A sign label `+1` / `-1`, used for component indices `j`, factor indices
/// `m, n, p` and the `+/-` branches of the normal-form kernels.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sign::Plus => write!(f, "1"),
            Sign::Minus => write!(f, "-1"),
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        match s {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;

    fn try_from(v: i8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(format!("expected 1 or -1, got {other}")),
        }
    }
}

/// A pair of values indexed by a component sign `j`.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ByComponent<T> {
    #[serde(rename = "1")]
    pub plus: T,
    #[serde(rename = "-1")]
    pub minus: T,
}

impl<T: Copy> ByComponent<T> {
    pub fn from_fn(mut f: impl FnMut(Sign) -> T) -> Self {
        Self {
            plus: f(Sign::Plus),
            minus: f(Sign::Minus),
        }
    }

    pub fn get(&self, j: Sign) -> T {
        match j {
            Sign::Plus => self.plus,
            Sign::Minus => self.minus,
        }
    }
}

/// Code version embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
