//! Analog scalar QED in a coherently coupled two-component Bose-Einstein condensate.
//!
//! Units: hbar = 1. Energies, momenta and lengths are in whatever absolute units the
//! [`CondensateSpec`] is written in; helpers on the spec expose the natural scales
//! `m c_s^2`, `m c_s` and the healing length.

pub mod analog;
pub mod bessel;
pub mod bogoliubov;
pub mod calibrate;
pub mod charge;
mod error;
pub mod fit;
pub mod kernel;
pub mod quadrature;

pub use bogoliubov::{Branch, CondensateSpec};
pub use error::{Error, Result};
