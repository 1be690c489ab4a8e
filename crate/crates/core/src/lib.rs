//! Low-energy resolvent expansions, threshold classification and scattering
//! asymptotics for compactly supported radial scatterers in the plane.

// `!(x > 0.0)` is the intended way to reject NaN along with non-positive input.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod exec;
pub mod expansion;
pub mod grid;
pub mod identities;
pub mod modes;
pub mod radial;
pub mod resolvent;
pub mod scatterer;
pub mod scattering;
pub mod specfun;
pub mod threshold;
pub mod wave;
