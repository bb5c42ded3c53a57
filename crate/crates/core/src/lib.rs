//! Relative position of an ellipsoid and an elliptic paraboloid from the
//! characteristic quartic of their pencil.
//!
//! Both surfaces are quadrics `X'QX = 0` with `X = (x, y, z, 1)` and
//! negative values inside. The pair is reduced by an affine map to a
//! sphere against `x²/a² + y²/b² = z`; the real roots of
//! `det(λP + E)` then decide between five positions: inside ([`Position::I`]),
//! tangent from inside, overlapping, tangent from outside and separate.

#![no_std]
// negated float comparisons deliberately reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod classifier;
pub mod geometry;
pub mod pencil;
pub mod reduction;
mod roots;

pub use classifier::{
    classify, classify_by_coefficients, classify_by_roots, classify_circular, classify_quadrics,
    on_axis_roots, special_root_multiplicity_condition, tangent_point, Classification, ClassifyError,
    Position, SpecialRootFlags, SpecialRoots, TangentError,
};
pub use geometry::{
    AffineTransform, EllipsoidParams, GeometryError, ParaboloidParams, Quadric, SphereParams,
};
pub use pencil::{
    characteristic_quartic, discriminant, quartic_from_canonical, real_roots, PencilError,
    QuarticPoly, RealRoot, RootSet,
};
pub use reduction::{canonicalize, smallness_check, CanonicalPair, ReductionError, SmallnessReport};

pub use nalgebra::{Quaternion, UnitQuaternion, Vector3};
