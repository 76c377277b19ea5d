//! Continued-fraction streams and the exact/certified numbers they evaluate to.

mod error;
mod interval;
mod parse;
mod quadratic;
pub mod rational;
mod real;
mod stream;

pub use error::CfError;
pub use interval::{RatInterval, RatIntervalJson};
pub use parse::{inv_pi_numerator, parse_theta};
pub use quadratic::QuadraticReal;
pub use rational::{Rational, RationalJson};
pub use real::{Real, MIXING_BITS};
pub use stream::{Backing, ContinuedFraction, Rule, DEFAULT_RANDOM_BITS};

pub(crate) use stream::convergent;
