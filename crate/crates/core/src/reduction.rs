//! Reduction of an (ellipsoid, paraboloid) pair to a sphere against a
//! paraboloid in standard form, and the curvature test for the
//! smallness hypothesis.

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use thiserror::Error;

use crate::geometry::{
    quadric_from_ellipsoid, quadric_from_paraboloid, standard_paraboloid_matrix, AffineTransform, EllipsoidParams,
    ParaboloidParams, Quadric, SphereParams,
};

/// Eigenvalues of the quadratic block below this fraction of the largest
/// count as zero.
pub const ZERO_EIGENVALUE: f64 = 1e-10;

/// `|a − b| ≤ CIRCULAR_TOLERANCE·b` marks a circular paraboloid.
pub const CIRCULAR_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ReductionError {
    #[error("transformed paraboloid is degenerate: {0}")]
    DegenerateParaboloid(&'static str),
    #[error("not an ellipsoid: {0}")]
    NotEllipsoid(&'static str),
}

/// Sphere plus `x²/a² + y²/b² − z = 0`, `0 < a ≤ b`, and the affine map
/// carrying the original pair onto them.
///
/// The map is scaled so that both original quadrics land on the canonical
/// matrices with the same positive factor; the characteristic quartic of
/// the canonical pair is then identical to that of the original pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalPair {
    pub sphere: SphereParams,
    pub a: f64,
    pub b: f64,
    pub transform: AffineTransform,
    pub circular: bool,
}

impl CanonicalPair {
    /// A pair already in canonical position (identity transform).
    pub fn from_parts(a: f64, b: f64, radius: f64, center: Vector3<f64>) -> Self {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        Self {
            sphere: SphereParams { center, radius },
            a,
            b,
            transform: AffineTransform::identity(),
            circular: (b - a).abs() <= CIRCULAR_TOLERANCE * b,
        }
    }

    pub fn paraboloid_quadric(&self) -> Quadric {
        Quadric::new(standard_paraboloid_matrix(self.a, self.b))
            .expect("standard paraboloid matrix is finite and non-zero")
    }

    pub fn sphere_quadric(&self) -> Quadric {
        self.sphere.quadric()
    }

    /// `2r ≤ a²`, the smallness hypothesis in canonical position.
    pub fn canonical_smallness(&self) -> bool {
        2.0 * self.sphere.radius <= self.a * self.a
    }

    /// `2r / a²`; at most 1 when the canonical smallness holds.
    pub fn smallness_ratio(&self) -> f64 {
        2.0 * self.sphere.radius / (self.a * self.a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallnessReport {
    pub paraboloid_max_curvature: f64,
    pub ellipsoid_min_curvature: f64,
    pub satisfied: bool,
    /// `ellipsoid_min_curvature − paraboloid_max_curvature`
    pub margin: f64,
}

/// Curvature of the parabola `z = t²/a²` at parameter `t`.
pub fn paraboloid_curvature(a: f64, t: f64) -> f64 {
    let a4 = a * a * a * a;
    let s = libm::sqrt(a4 + 4.0 * t * t);
    2.0 * a4 / (s * s * s)
}

/// Smallest principal curvature, `c₁/c₃²`, attained at the co-vertices
/// of the ellipse spanned by the shortest and longest axes.
pub fn ellipsoid_min_curvature(e: &EllipsoidParams) -> f64 {
    let c = e.semi_axes();
    c.x / (c.z * c.z)
}

pub fn smallness_check(e: &EllipsoidParams, p: &ParaboloidParams) -> SmallnessReport {
    let paraboloid_max_curvature = paraboloid_curvature(p.a(), 0.0);
    let ellipsoid_min_curvature = ellipsoid_min_curvature(e);
    let margin = ellipsoid_min_curvature - paraboloid_max_curvature;
    SmallnessReport {
        paraboloid_max_curvature,
        ellipsoid_min_curvature,
        satisfied: margin >= 0.0,
        margin,
    }
}

/// Rescales to interior-negative with a unit-determinant quadratic block.
fn normalize_ellipsoid(e: &Quadric) -> Result<Quadric, ReductionError> {
    let quad = e.quadratic_part();
    let eig = SymmetricEigen::new((quad + quad.transpose()) * 0.5);
    let sign = if eig.eigenvalues.iter().all(|&v| v > 0.0) {
        1.0
    } else if eig.eigenvalues.iter().all(|&v| v < 0.0) {
        -1.0
    } else {
        return Err(ReductionError::NotEllipsoid("quadratic part is not definite"));
    };
    let det = eig.eigenvalues.iter().product::<f64>().abs();
    Quadric::new(e.matrix() * (sign / libm::cbrt(det)))
        .map_err(|_| ReductionError::NotEllipsoid("matrix is not finite"))
}

/// Rescales to interior-negative with linear coefficient `−1/2` along the
/// axis, the normalization of `x²/a² + y²/b² − z` under rigid motions.
fn normalize_paraboloid(p: &Quadric) -> Result<Quadric, ReductionError> {
    let quad = p.quadratic_part();
    let eig = SymmetricEigen::new((quad + quad.transpose()) * 0.5);
    let i = eig.eigenvalues.iamin();
    let w = eig.eigenvectors.column(i).into_owned();
    let gamma = p.linear_part().dot(&w);
    if !(gamma.abs() > ZERO_EIGENVALUE * eig.eigenvalues.amax()) {
        return Err(ReductionError::DegenerateParaboloid("no linear term along the axis"));
    }
    let sign = if quad.trace() < 0.0 { -1.0 } else { 1.0 };
    Quadric::new(p.matrix() * (sign * 0.5 / gamma.abs()))
        .map_err(|_| ReductionError::DegenerateParaboloid("matrix is not finite"))
}

/// Flips `v` so that its largest-magnitude component is positive.
fn orient(v: Vector3<f64>) -> Vector3<f64> {
    let i = v.iamax();
    if v[i] < 0.0 {
        -v
    } else {
        v
    }
}

pub fn canonicalize(e: &EllipsoidParams, p: &ParaboloidParams) -> Result<CanonicalPair, ReductionError> {
    canonicalize_quadrics(&quadric_from_ellipsoid(e), &quadric_from_paraboloid(p))
}

/// Same as [`canonicalize`] for pairs given as matrices. Either quadric may
/// come with the opposite sign convention.
///
/// Root values of the original pencil match the canonical ones only when the
/// ellipsoid's quadratic block has unit determinant, as produced by
/// [`quadric_from_ellipsoid`]; otherwise they differ by a common factor.
pub fn canonicalize_quadrics(e: &Quadric, p: &Quadric) -> Result<CanonicalPair, ReductionError> {
    let e = normalize_ellipsoid(e)?;
    let p = normalize_paraboloid(p)?;

    // 1. volume-preserving map sending the ellipsoid to a sphere at the origin
    let quad = e.quadratic_part();
    let eig = SymmetricEigen::new((quad + quad.transpose()) * 0.5);
    let alpha = eig.eigenvalues;
    let v = eig.eigenvectors;
    let inverse = v * Matrix3::from_diagonal(&alpha.map(|x| 1.0 / x)) * v.transpose();
    let center = -(inverse * e.linear_part());
    let rho = center.dot(&(quad * center)) - e.constant_part();
    if !(rho > 0.0) {
        return Err(ReductionError::NotEllipsoid("quadric has no interior"));
    }
    let f = libm::cbrt(alpha.x * alpha.y * alpha.z);
    let stretch = v * Matrix3::from_diagonal(&alpha.map(|x| libm::sqrt(x / f))) * v.transpose();
    let r0 = libm::sqrt(rho / f);
    let to_sphere = AffineTransform::new(stretch, -(stretch * center))
        .map_err(|_| ReductionError::NotEllipsoid("ellipsoid map is singular"))?;

    // 2. principal frame of the image paraboloid
    let image = p.transform(&to_sphere);
    let quad = image.quadratic_part();
    let lin = image.linear_part();
    let constant = image.constant_part();
    let eig = SymmetricEigen::new((quad + quad.transpose()) * 0.5);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let (mu_a, mu_b, mu_0) =
        (eig.eigenvalues[order[0]], eig.eigenvalues[order[1]], eig.eigenvalues[order[2]]);
    if !(mu_a > 0.0) || !(mu_b > ZERO_EIGENVALUE * mu_a) {
        return Err(ReductionError::DegenerateParaboloid("quadratic part is not positive on two axes"));
    }
    if mu_0.abs() > ZERO_EIGENVALUE * mu_a {
        return Err(ReductionError::DegenerateParaboloid("quadratic part has no null direction"));
    }
    let w: Vector3<f64> = eig.eigenvectors.column(order[2]).into_owned();
    let gamma = lin.dot(&w);
    if !(gamma.abs() > ZERO_EIGENVALUE * (mu_a + lin.norm())) {
        return Err(ReductionError::DegenerateParaboloid("no linear term along the axis"));
    }
    // interior (negative side) opens towards +axis
    let axis = if gamma > 0.0 { -w } else { w };
    let kappa = 2.0 * gamma.abs();
    let e_a = orient(eig.eigenvectors.column(order[0]).into_owned());
    let e_b = axis.cross(&e_a);

    let u0 = -lin.dot(&e_a) / mu_a;
    let v0 = -lin.dot(&e_b) / mu_b;
    let reduced = constant - mu_a * u0 * u0 - mu_b * v0 * v0;
    let vertex = e_a * u0 + e_b * v0 + axis * (reduced / kappa);

    // 3. rigid motion to standard position, then the uniform scale 1/κ that
    //    equalizes the factors picked up by the two quadrics
    let frame = Matrix3::from_columns(&[e_a, e_b, axis]).transpose();
    let sigma = 1.0 / kappa;
    let to_standard = AffineTransform::new(frame * sigma, -(frame * vertex) * sigma)
        .map_err(|_| ReductionError::DegenerateParaboloid("standard-position map is singular"))?;
    let transform = to_standard.after(&to_sphere);

    let a = libm::sqrt(1.0 / mu_a);
    let b = libm::sqrt(1.0 / mu_b);
    Ok(CanonicalPair {
        sphere: SphereParams { center: transform.apply(&center), radius: r0 * sigma },
        a,
        b,
        transform,
        circular: (b - a).abs() <= CIRCULAR_TOLERANCE * b,
    })
}
