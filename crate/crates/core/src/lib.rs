//! Skew rotations of the plane and their products: exact maps, asymptotic
//! checks near infinity, long-orbit analysis, and a piecewise-linear
//! analogue built from L1 diamonds.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod error;
pub mod maps;
pub mod orbit;
pub mod squares;
pub mod stats;

pub use error::{Error, Result};
pub use maps::{
    apply_product, apply_skew_rotation, combined_h, compose_rigid_motions, from_inverse_polar, to_inverse_polar,
    CombinedHamiltonian, ComposedMotion, InversePolarFrame, MapProduct, Orientation, PlanarPoint, RigidMotion,
    SkewRotationMap,
};
