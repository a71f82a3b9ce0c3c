//! Scalar abstractions shared by the thresholds and recurrences.
//!
//! Peacefulness bounds are real numbers (`(1 - 1/e)Δ`, `μΔ`, ...). Counts are
//! integral, so every comparison is "does this integer count stay within a real
//! bound". [`Threshold`] makes that comparison generic so callers can pass a
//! float or an exact [`num_rational::Ratio`].

use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::{Float, FromPrimitive, Num};
use serde::{Deserialize, Serialize};

/// A real-valued bound compared against integer counts.
///
/// Implemented for `f32`, `f64` and `Ratio<i64>`. Rational bounds compare
/// exactly; float bounds use the native `<=`.
pub trait Threshold: Num + Copy + PartialOrd + FromPrimitive + Debug {
    /// `count` lifted into the scalar type.
    fn of_count(count: usize) -> Self {
        Self::from_usize(count).expect("count not representable in threshold scalar")
    }

    /// Largest integer `k` with `k <= self`, or `None` when the bound is negative.
    fn floor_count(self) -> Option<usize>;

    /// Smallest integer `k` with `k >= self`, or `None` when the bound is negative.
    fn ceil_count(self) -> Option<usize> {
        let floor = self.floor_count()?;
        Some(if Self::of_count(floor) == self { floor } else { floor + 1 })
    }

    fn to_f64_lossy(self) -> f64;
}

impl Threshold for f64 {
    fn floor_count(self) -> Option<usize> {
        if self < 0.0 || self.is_nan() {
            None
        } else {
            Some(self.floor().min(usize::MAX as f64) as usize)
        }
    }

    fn to_f64_lossy(self) -> f64 {
        self
    }
}

impl Threshold for f32 {
    fn floor_count(self) -> Option<usize> {
        f64::from(self).floor_count()
    }

    fn to_f64_lossy(self) -> f64 {
        f64::from(self)
    }
}

impl Threshold for Ratio<i64> {
    fn floor_count(self) -> Option<usize> {
        let floor = self.floor().to_integer();
        usize::try_from(floor).ok()
    }

    fn to_f64_lossy(self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

/// `count <= bound`, evaluated in the bound's own arithmetic.
pub fn within<T: Threshold>(count: usize, bound: T) -> bool {
    T::of_count(count) <= bound
}

/// Base of every logarithm appearing in size formulas and schedules.
///
/// The formulas never pin a base; natural logarithms are the default.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    #[default]
    Natural,
    Binary,
}

impl LogBase {
    pub fn log<F: Float>(self, x: F) -> F {
        match self {
            LogBase::Natural => x.ln(),
            LogBase::Binary => x.log2(),
        }
    }

    /// `log(log x)`.
    pub fn log_log<F: Float>(self, x: F) -> F {
        self.log(self.log(x))
    }

    /// `log(x)^power`.
    pub fn log_pow<F: Float>(self, x: F, power: F) -> F {
        self.log(x).powf(power)
    }
}

impl std::str::FromStr for LogBase {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "natural" | "e" | "ln" => Ok(LogBase::Natural),
            "binary" | "2" | "log2" => Ok(LogBase::Binary),
            other => Err(format!("unknown log base `{other}` (expected natural|binary)")),
        }
    }
}
