//! Exact sub-barycenter geometry and Okounkov-body stability invariants.
//!
//! * [`convexbody`]: exact rational polytopes, half-space slices, sub-barycenters
//!   and volume quantiles.
//! * [`profile`]: concave radial profiles and the functional form of the
//!   sub-barycenter inequality.
//! * [`invariants`]: `S_τ`, `σ`, `S_0`, `δ_τ`, `δ̃_τ`, `α̃`, the discrete `S̃_{k,m}`,
//!   thresholds and the comparison inequalities as slack-valued checks.
//! * [`eckardt`]: closed forms for the cubic surface with an Eckardt point.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod convexbody;
pub mod eckardt;
pub mod invariants;
pub mod linalg;
pub mod number;
pub mod profile;

pub use convexbody::{ConvexBody, Direction, Facet, GeometryError, Side, SliceSpec, VolumeProfile};
pub use number::{Point, Rational};
