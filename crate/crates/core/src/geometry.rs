//! Quadric matrices in homogeneous coordinates and the parameter records
//! they are built from.
//!
//! Sign convention: every constructor returns a matrix `Q` with
//! `X'QX < 0` on the interior side of the surface, `= 0` on it and `> 0`
//! outside, where `X = (x, y, z, 1)'`.

use nalgebra::{Matrix3, Matrix4, Quaternion, Rotation3, UnitQuaternion, Vector3, Vector4};
use thiserror::Error;

/// Quaternions are accepted when their norm is within this distance of 1.
pub const QUATERNION_NORM_TOLERANCE: f64 = 1e-9;

/// Smallest admissible `|det|` of the linear part of an [`AffineTransform`].
pub const SINGULAR_DETERMINANT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum GeometryError {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("{0} must be strictly positive")]
    NonPositive(&'static str),
    #[error("quaternion norm {0} is not within tolerance of 1")]
    NonUnitQuaternion(f64),
    #[error("transform is singular (|det| = {0:e})")]
    SingularTransform(f64),
    #[error("quadric matrix is zero")]
    ZeroMatrix,
}

fn check_finite(values: &[f64], what: &'static str) -> Result<(), GeometryError> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(GeometryError::NonFinite(what))
    }
}

fn unit_quaternion(q: Quaternion<f64>) -> Result<UnitQuaternion<f64>, GeometryError> {
    check_finite(q.coords.as_slice(), "orientation")?;
    let norm = q.norm();
    if (norm - 1.0).abs() > QUATERNION_NORM_TOLERANCE {
        return Err(GeometryError::NonUnitQuaternion(norm));
    }
    Ok(UnitQuaternion::new_normalize(q))
}

/// A quadric surface `X'MX = 0`; `M` is a symmetric 4×4 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadric {
    m: Matrix4<f64>,
}

impl Quadric {
    /// Symmetrizes `m` as `(m + m') / 2`.
    pub fn new(m: Matrix4<f64>) -> Result<Self, GeometryError> {
        check_finite(m.as_slice(), "quadric matrix")?;
        let m = (m + m.transpose()) * 0.5;
        if m.iter().all(|v| *v == 0.0) {
            return Err(GeometryError::ZeroMatrix);
        }
        Ok(Self { m })
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.m
    }

    /// Largest absolute entry.
    pub fn scale(&self) -> f64 {
        self.m.amax()
    }

    /// `X'QX` with `X = (x, y, z, 1)'`.
    pub fn evaluate(&self, point: &Vector3<f64>) -> f64 {
        let x = point.push(1.0);
        x.dot(&(self.m * x))
    }

    /// `X'QX` for an arbitrary homogeneous vector.
    pub fn evaluate_homogeneous(&self, x: &Vector4<f64>) -> f64 {
        x.dot(&(self.m * x))
    }

    /// Gradient of `X'QX` with respect to the affine coordinates.
    pub fn gradient(&self, point: &Vector3<f64>) -> Vector3<f64> {
        let x = point.push(1.0);
        (self.m * x).fixed_rows::<3>(0) * 2.0
    }

    /// Image of the surface under `t`: a point `p` lies on `self` iff
    /// `t(p)` lies on the result.
    ///
    /// With `H` the homogeneous matrix of `t`, the result is `H⁻ᵀ Q H⁻¹`,
    /// i.e. the quadric is conjugated by the inverse point map.
    pub fn transform(&self, t: &AffineTransform) -> Quadric {
        let h_inv = t.inverse().homogeneous();
        let m = h_inv.transpose() * self.m * h_inv;
        Quadric { m: (m + m.transpose()) * 0.5 }
    }

    /// Upper-left 3×3 block (the quadratic part).
    pub fn quadratic_part(&self) -> Matrix3<f64> {
        self.m.fixed_view::<3, 3>(0, 0).into_owned()
    }

    /// First three entries of the last column (half the linear part).
    pub fn linear_part(&self) -> Vector3<f64> {
        self.m.fixed_view::<3, 1>(0, 3).into_owned()
    }

    pub fn constant_part(&self) -> f64 {
        self.m[(3, 3)]
    }
}

/// Affine point map `p ↦ linear·p + translation`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineTransform {
    linear: Matrix3<f64>,
    translation: Vector3<f64>,
}

impl AffineTransform {
    pub fn new(linear: Matrix3<f64>, translation: Vector3<f64>) -> Result<Self, GeometryError> {
        check_finite(linear.as_slice(), "transform")?;
        check_finite(translation.as_slice(), "transform")?;
        let det = linear.determinant();
        if !(det.abs() > SINGULAR_DETERMINANT) {
            return Err(GeometryError::SingularTransform(det.abs()));
        }
        Ok(Self { linear, translation })
    }

    pub fn identity() -> Self {
        Self { linear: Matrix3::identity(), translation: Vector3::zeros() }
    }

    pub fn translation(offset: Vector3<f64>) -> Self {
        Self { linear: Matrix3::identity(), translation: offset }
    }

    pub fn linear(&self) -> &Matrix3<f64> {
        &self.linear
    }

    pub fn offset(&self) -> &Vector3<f64> {
        &self.translation
    }

    pub fn apply(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.linear * p + self.translation
    }

    pub fn inverse(&self) -> AffineTransform {
        // invertibility is a construction invariant
        let inv = self.linear.try_inverse().unwrap_or_else(Matrix3::zeros);
        AffineTransform { linear: inv, translation: -(inv * self.translation) }
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &AffineTransform) -> AffineTransform {
        AffineTransform {
            linear: self.linear * first.linear,
            translation: self.linear * first.translation + self.translation,
        }
    }

    pub fn homogeneous(&self) -> Matrix4<f64> {
        let mut h = Matrix4::identity();
        h.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.linear);
        h.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.translation);
        h
    }
}

/// Ellipsoid with semi-axes sorted ascending, `c₁ ≤ c₂ ≤ c₃`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipsoidParams {
    center: Vector3<f64>,
    semi_axes: Vector3<f64>,
    /// Columns are the principal directions matching `semi_axes`.
    axes: Matrix3<f64>,
    orientation: UnitQuaternion<f64>,
}

impl EllipsoidParams {
    /// `orientation` is `(w, x, y, z)` and maps the ellipsoid's own frame
    /// to the world frame; `semi_axes[i]` lies along its i-th axis.
    pub fn new(
        center: Vector3<f64>,
        semi_axes: [f64; 3],
        orientation: Quaternion<f64>,
    ) -> Result<Self, GeometryError> {
        check_finite(center.as_slice(), "center")?;
        check_finite(&semi_axes, "semi_axes")?;
        if semi_axes.iter().any(|c| *c <= 0.0) {
            return Err(GeometryError::NonPositive("semi_axes"));
        }
        let rotation = unit_quaternion(orientation)?.to_rotation_matrix().into_inner();

        let mut order = [0usize, 1, 2];
        order.sort_by(|&i, &j| semi_axes[i].total_cmp(&semi_axes[j]));
        let mut axes = Matrix3::from_columns(&[
            rotation.column(order[0]).into_owned(),
            rotation.column(order[1]).into_owned(),
            rotation.column(order[2]).into_owned(),
        ]);
        // an odd permutation flips handedness; the surface is symmetric in each axis
        if axes.determinant() < 0.0 {
            let flipped = -axes.column(2);
            axes.set_column(2, &flipped);
        }
        let orientation =
            UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix_unchecked(axes));
        Ok(Self {
            center,
            semi_axes: Vector3::new(semi_axes[order[0]], semi_axes[order[1]], semi_axes[order[2]]),
            axes,
            orientation,
        })
    }

    pub fn axis_aligned(center: Vector3<f64>, semi_axes: [f64; 3]) -> Result<Self, GeometryError> {
        Self::new(center, semi_axes, Quaternion::identity())
    }

    pub fn sphere(center: Vector3<f64>, radius: f64) -> Result<Self, GeometryError> {
        Self::axis_aligned(center, [radius; 3])
    }

    pub fn center(&self) -> &Vector3<f64> {
        &self.center
    }

    /// Sorted ascending.
    pub fn semi_axes(&self) -> &Vector3<f64> {
        &self.semi_axes
    }

    pub fn axes(&self) -> &Matrix3<f64> {
        &self.axes
    }

    pub fn orientation(&self) -> &UnitQuaternion<f64> {
        &self.orientation
    }

    /// Same shape and orientation, moved to `center`.
    pub fn with_center(&self, center: Vector3<f64>) -> Self {
        Self { center, ..*self }
    }

    /// Map taking the unit sphere onto this ellipsoid.
    pub fn embedding(&self) -> AffineTransform {
        AffineTransform {
            linear: self.axes * Matrix3::from_diagonal(&self.semi_axes),
            translation: self.center,
        }
    }
}

/// Elliptic paraboloid `x²/a² + y²/b² − z = 0` placed by a rigid pose.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParaboloidParams {
    vertex: Vector3<f64>,
    orientation: UnitQuaternion<f64>,
    a: f64,
    b: f64,
}

impl ParaboloidParams {
    /// When `a > b` the transverse axes are swapped and the orientation is
    /// composed with a quarter turn about the paraboloid axis, so that the
    /// stored parameters always satisfy `a ≤ b`.
    pub fn new(
        vertex: Vector3<f64>,
        orientation: Quaternion<f64>,
        a: f64,
        b: f64,
    ) -> Result<Self, GeometryError> {
        check_finite(vertex.as_slice(), "vertex")?;
        check_finite(&[a, b], "a/b")?;
        if a <= 0.0 {
            return Err(GeometryError::NonPositive("a"));
        }
        if b <= 0.0 {
            return Err(GeometryError::NonPositive("b"));
        }
        let mut orientation = unit_quaternion(orientation)?;
        let (a, b) = if a > b {
            let quarter = UnitQuaternion::from_axis_angle(
                &Vector3::z_axis(),
                core::f64::consts::FRAC_PI_2,
            );
            orientation *= quarter;
            (b, a)
        } else {
            (a, b)
        };
        Ok(Self { vertex, orientation, a, b })
    }

    /// Standard pose: vertex at the origin, axis along +z.
    pub fn standard(a: f64, b: f64) -> Result<Self, GeometryError> {
        Self::new(Vector3::zeros(), Quaternion::identity(), a, b)
    }

    pub fn vertex(&self) -> &Vector3<f64> {
        &self.vertex
    }

    pub fn orientation(&self) -> &UnitQuaternion<f64> {
        &self.orientation
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Local-to-world rigid motion.
    pub fn pose(&self) -> AffineTransform {
        AffineTransform {
            linear: self.orientation.to_rotation_matrix().into_inner(),
            translation: self.vertex,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereParams {
    pub center: Vector3<f64>,
    pub radius: f64,
}

impl SphereParams {
    pub fn new(center: Vector3<f64>, radius: f64) -> Result<Self, GeometryError> {
        check_finite(center.as_slice(), "center")?;
        check_finite(&[radius], "radius")?;
        if radius <= 0.0 {
            return Err(GeometryError::NonPositive("radius"));
        }
        Ok(Self { center, radius })
    }

    /// The matrix with identity quadratic block and corner
    /// `|center|² − r²`.
    pub fn quadric(&self) -> Quadric {
        let c = self.center;
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&(-c));
        m.fixed_view_mut::<1, 3>(3, 0).copy_from(&(-c.transpose()));
        m[(3, 3)] = c.norm_squared() - self.radius * self.radius;
        Quadric { m }
    }
}

/// Standard-pose paraboloid matrix with `a⁻², b⁻²` on the diagonal and
/// `−1/2` couplings between `z` and the homogeneous coordinate.
pub fn standard_paraboloid_matrix(a: f64, b: f64) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    m[(0, 0)] = 1.0 / (a * a);
    m[(1, 1)] = 1.0 / (b * b);
    m[(2, 3)] = -0.5;
    m[(3, 2)] = -0.5;
    m
}

/// Normalized so that the quadratic block has unit determinant; for a
/// sphere this is the identity block with corner `|center|² − r²`.
pub fn quadric_from_ellipsoid(e: &EllipsoidParams) -> Quadric {
    let c = e.semi_axes;
    let volume_scale = libm::cbrt(c.x * c.y * c.z);
    let weights = Vector3::new(
        (volume_scale / c.x) * (volume_scale / c.x),
        (volume_scale / c.y) * (volume_scale / c.y),
        (volume_scale / c.z) * (volume_scale / c.z),
    );
    let a = e.axes * Matrix3::from_diagonal(&weights) * e.axes.transpose();
    let a = (a + a.transpose()) * 0.5;
    let ac = a * e.center;
    let mut m = Matrix4::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&a);
    m.fixed_view_mut::<3, 1>(0, 3).copy_from(&(-ac));
    m.fixed_view_mut::<1, 3>(3, 0).copy_from(&(-ac.transpose()));
    m[(3, 3)] = e.center.dot(&ac) - volume_scale * volume_scale;
    Quadric { m }
}

pub fn quadric_from_paraboloid(p: &ParaboloidParams) -> Quadric {
    let local = Quadric { m: standard_paraboloid_matrix(p.a, p.b) };
    if p.vertex == Vector3::zeros() && p.orientation == UnitQuaternion::identity() {
        return local;
    }
    local.transform(&p.pose())
}

pub fn evaluate(q: &Quadric, point: &Vector3<f64>) -> f64 {
    q.evaluate(point)
}

pub fn transform_quadric(q: &Quadric, t: &AffineTransform) -> Quadric {
    q.transform(t)
}
