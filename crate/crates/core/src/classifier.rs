//! Relative position of a small ellipsoid and an elliptic paraboloid from
//! the roots and coefficients of their characteristic quartic.

use core::fmt;
use core::str::FromStr;

use alloc::vec::Vec;
use nalgebra::{SymmetricEigen, Vector3, Vector4};
use num_complex::Complex64;
use thiserror::Error;

use crate::geometry::{EllipsoidParams, ParaboloidParams, Quadric};
use crate::pencil::{
    characteristic_quartic, descartes_sign_changes, discriminant, polynomial_roots,
    quartic_from_canonical, real_roots, PencilError, QuarticPoly, RealRoot, RootSet,
};
use crate::reduction::{
    canonicalize, canonicalize_quadrics, smallness_check, CanonicalPair, ReductionError,
    SmallnessReport,
};
use crate::geometry::{quadric_from_ellipsoid, quadric_from_paraboloid};

/// Relative band for matching a root against `−a²` or `−b²`:
/// `|λ + a²| ≤ SPECIAL_ROOT_TOLERANCE·(1 + a²)`.
pub const SPECIAL_ROOT_TOLERANCE: f64 = 1e-6;

/// Relative tolerance on the equalities behind [`SpecialRootFlags`].
pub const FLAG_TOLERANCE: f64 = 1e-6;

/// Eigenvalues of `λP + S` below this fraction of its scale span the kernel.
pub const KERNEL_TOLERANCE: f64 = 1e-6;

/// Residual bound for a tangent point, relative to the matrix scale.
pub const TANGENT_RESIDUAL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Position {
    /// Ellipsoid inside the paraboloid.
    I,
    /// Inside, touching the boundary.
    TI,
    /// Interiors overlap without containment.
    C,
    /// Outside, touching the boundary.
    TE,
    /// Disjoint.
    E,
}

impl Position {
    pub const ALL: [Position; 5] = [Position::I, Position::TI, Position::C, Position::TE, Position::E];

    pub fn code(self) -> &'static str {
        match self {
            Position::I => "I",
            Position::TI => "TI",
            Position::C => "C",
            Position::TE => "TE",
            Position::E => "E",
        }
    }

    pub fn is_tangent(self) -> bool {
        matches!(self, Position::TI | Position::TE)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown position {0:?}")]
pub struct ParsePositionError(pub alloc::string::String);

impl FromStr for Position {
    type Err = ParsePositionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Position::ALL
            .into_iter()
            .find(|p| p.code().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| ParsePositionError(s.into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ClassifyError {
    #[error("root configuration matches no relative position: {0}")]
    InvalidConfiguration(&'static str),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error(transparent)]
    Pencil(#[from] PencilError),
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum TangentError {
    /// Smallest eigenvalue magnitude of `λP + S`, relative to its scale.
    #[error("λP + S is not singular (relative eigenvalue {0:e})")]
    NoKernel(f64),
    /// Relative residual of the best candidate point.
    #[error("kernel does not meet both surfaces (relative residual {0:e})")]
    NotOnSurfaces(f64),
}

/// `(−a², −b²)` of the canonical pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialRoots {
    pub a2: f64,
    pub b2: f64,
}

impl SpecialRoots {
    pub fn new(a: f64, b: f64) -> Self {
        Self { a2: -a * a, b2: -b * b }
    }

    fn band(value: f64) -> f64 {
        SPECIAL_ROOT_TOLERANCE * (1.0 + value.abs())
    }

    pub fn matches_a2(&self, value: f64) -> bool {
        (value - self.a2).abs() <= Self::band(self.a2)
    }

    pub fn matches_b2(&self, value: f64) -> bool {
        (value - self.b2).abs() <= Self::band(self.b2)
    }

    pub fn matches(&self, value: f64) -> bool {
        self.matches_a2(value) || self.matches_b2(value)
    }
}

/// Multiple root marking a tangency: a multiple root other than `−a²`,
/// `−b²`, or `−a²` with multiplicity at least three.
fn tangency_root(rs: &RootSet, special: &SpecialRoots) -> Option<RealRoot> {
    rs.real_roots
        .iter()
        .find(|r| {
            (r.multiplicity >= 2 && !special.matches(r.value))
                || (r.multiplicity >= 3 && special.matches_a2(r.value))
        })
        .copied()
}

pub fn classify_by_roots(rs: &RootSet, special: &SpecialRoots) -> Result<Position, ClassifyError> {
    match rs.complex_pairs {
        0 => {}
        1 => {
            return if rs.real_roots.iter().all(|r| r.value < 0.0) {
                Ok(Position::C)
            } else {
                Err(ClassifyError::InvalidConfiguration("complex pair with a non-negative real root"))
            }
        }
        _ => return Err(ClassifyError::InvalidConfiguration("two complex pairs")),
    }
    // c₀ > 0, so only an exact zero is inconsistent; tiny roots of small
    // spheres keep their sign
    if rs.real_roots.iter().any(|r| r.value == 0.0) {
        return Err(ClassifyError::InvalidConfiguration("zero root"));
    }
    let negative: usize = rs.real_roots.iter().filter(|r| r.value < 0.0).map(|r| r.multiplicity).sum();
    match negative {
        4 => Ok(if tangency_root(rs, special).is_some() { Position::TI } else { Position::I }),
        2 => Ok(if rs.real_roots.iter().any(|r| r.value > 0.0 && r.multiplicity >= 2) {
            Position::TE
        } else {
            Position::E
        }),
        _ => Err(ClassifyError::InvalidConfiguration("sign pattern of the real roots")),
    }
}

/// Coefficient-and-discriminant test; roots are only consulted to split
/// the interior rows and to confirm multiple roots inside the `Δ = 0` band.
pub fn classify_by_coefficients(
    q: &QuarticPoly,
    delta: f64,
    special: &SpecialRoots,
    tol: f64,
) -> Result<Position, ClassifyError> {
    let band = q.delta_zero_band();
    let all_nonnegative = q.coefficients().iter().all(|&c| c >= 0.0);
    if delta < -band {
        return Ok(Position::C);
    }
    let rs = real_roots(q, tol)?;
    if delta > band {
        return if all_nonnegative {
            interior_split(&rs, special)
        } else {
            Ok(Position::E)
        };
    }
    let multiple = rs.real_roots.iter().any(|r| r.multiplicity >= 2);
    if !multiple {
        return classify_by_roots(&rs, special);
    }
    if tangency_root(&rs, special).is_none() {
        // only a doubled −a² or −b²: not a tangency, sign changes pick the side
        return Ok(match descartes_sign_changes(q) {
            0 => Position::I,
            _ => Position::E,
        });
    }
    if all_nonnegative {
        Ok(Position::TI)
    } else {
        Ok(Position::TE)
    }
}

fn interior_split(rs: &RootSet, special: &SpecialRoots) -> Result<Position, ClassifyError> {
    match classify_by_roots(rs, special)? {
        p @ (Position::I | Position::TI) => Ok(p),
        _ => Err(ClassifyError::InvalidConfiguration("non-negative coefficients without interior roots")),
    }
}

/// Closed-form `λ₃ ≤ λ₄` for a sphere centred on the paraboloid axis; the
/// other two roots are `−a²` and `−b²`.
pub fn on_axis_roots(z_c: f64, r: f64) -> (Complex64, Complex64) {
    let disc = z_c * z_c - r * r;
    if disc < 0.0 {
        let im = 2.0 * libm::sqrt(-disc);
        return (Complex64::new(-2.0 * z_c, -im), Complex64::new(-2.0 * z_c, im));
    }
    let s = libm::sqrt(disc);
    let product = 4.0 * r * r;
    if z_c >= 0.0 {
        let l3 = -2.0 * (z_c + s);
        let l4 = if l3 != 0.0 { product / l3 } else { 0.0 };
        (Complex64::new(l3, 0.0), Complex64::new(l4, 0.0))
    } else {
        let l4 = -2.0 * (z_c - s);
        (Complex64::new(product / l4, 0.0), Complex64::new(l4, 0.0))
    }
}

/// Position of an on-axis canonical pair from `z_c` against `r` alone.
pub fn on_axis_position(z_c: f64, r: f64, tol: f64) -> Position {
    let band = tol * (1.0 + r);
    if (z_c - r).abs() <= band {
        Position::TI
    } else if (z_c + r).abs() <= band {
        Position::TE
    } else if z_c > r {
        Position::I
    } else if z_c < -r {
        Position::E
    } else {
        Position::C
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SpecialRootFlags {
    pub a2_is_root: bool,
    pub a2_double: bool,
    pub a2_triple: bool,
    pub b2_is_root: bool,
    pub b2_double: bool,
}

fn approx(u: f64, v: f64) -> bool {
    (u - v).abs() <= FLAG_TOLERANCE * 1.0f64.max(u.abs()).max(v.abs())
}

/// When `−a²` and `−b²` are roots of the canonical quartic, and with what
/// multiplicity, read off the sphere's position.
pub fn special_root_multiplicity_condition(cp: &CanonicalPair) -> SpecialRootFlags {
    let (a2, b2) = (cp.a * cp.a, cp.b * cp.b);
    let c = cp.sphere.center;
    let r = cp.sphere.radius;
    let r2 = r * r;
    let a2_is_root = approx(c.x, 0.0);
    let b2_is_root = approx(c.y, 0.0);
    let gap = b2 - a2;
    let a2_double = a2_is_root
        && gap > 0.0
        && approx(r2, a2 * c.z - a2 / gap * c.y * c.y - a2 * a2 / 4.0);
    let b2_double = b2_is_root
        && gap > 0.0
        && approx(r2, b2 * c.z + b2 / gap * c.x * c.x - b2 * b2 / 4.0);
    let a2_triple = a2_is_root && b2_is_root && approx(c.z, r) && approx(r, a2 / 2.0);
    SpecialRootFlags { a2_is_root, a2_double, a2_triple, b2_is_root, b2_double }
}

fn kernel_scale(m: &nalgebra::Matrix4<f64>) -> f64 {
    m.amax().max(f64::MIN_POSITIVE)
}

/// Common point of `P` and `S` from the kernel of `λP + S`, for a multiple
/// root `λ` that marks a tangency.
pub fn tangent_point(p: &Quadric, s: &Quadric, lambda: f64) -> Result<Vector3<f64>, TangentError> {
    let m = p.matrix() * lambda + s.matrix();
    let scale = p.matrix().amax() * lambda.abs() + s.matrix().amax();
    let eig = SymmetricEigen::new(m);
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&i, &j| eig.eigenvalues[i].abs().total_cmp(&eig.eigenvalues[j].abs()));
    let smallest = eig.eigenvalues[order[0]].abs() / scale;
    if smallest > KERNEL_TOLERANCE {
        return Err(TangentError::NoKernel(smallest));
    }
    let kernel: Vec<Vector4<f64>> = order
        .iter()
        .take_while(|&&i| eig.eigenvalues[i].abs() <= KERNEL_TOLERANCE * scale)
        .map(|&i| eig.eigenvectors.column(i).into_owned())
        .collect();

    let residual = |x: &Vector3<f64>| {
        let weight = 1.0 + x.norm_squared();
        (p.evaluate(x).abs() / kernel_scale(p.matrix()))
            .max(s.evaluate(x).abs() / kernel_scale(s.matrix()))
            / weight
    };
    let mut candidates: Vec<Vector3<f64>> = Vec::new();
    if kernel.len() == 1 {
        let k = kernel[0];
        if k.w.abs() > 1e-9 * k.xyz().norm() {
            candidates.push(k.xyz() / k.w);
        }
    } else {
        // points X(t) = v0 + t·v1 of the kernel plane meeting S
        let (u, w) = (kernel[0], kernel[1]);
        let (v0, v1) = if u.w.abs() >= w.w.abs() { (u, w) } else { (w, u) };
        if v0.w.abs() > 1e-12 {
            let v0 = v0 / v0.w;
            let v1 = v1 - v0 * v1.w;
            let sm = s.matrix();
            let qa = v1.dot(&(sm * v1));
            let qb = 2.0 * v0.dot(&(sm * v1));
            let qc = v0.dot(&(sm * v0));
            let lead = qa.abs().max(qb.abs()).max(qc.abs());
            if qa.abs() <= 1e-12 * lead {
                if qb != 0.0 {
                    candidates.push((v0 + v1 * (-qc / qb)).xyz());
                }
            } else {
                let d = qb * qb - 4.0 * qa * qc;
                let d = if d < 0.0 && d > -1e-12 * lead * lead { 0.0 } else { d };
                if d >= 0.0 {
                    let sq = libm::sqrt(d);
                    let t0 = if qb >= 0.0 { (-qb - sq) / (2.0 * qa) } else { (-qb + sq) / (2.0 * qa) };
                    candidates.push((v0 + v1 * t0).xyz());
                    if t0 != 0.0 {
                        candidates.push((v0 + v1 * (qc / (qa * t0))).xyz());
                    }
                }
            }
        }
    }
    let best = candidates
        .into_iter()
        .map(|x| (residual(&x), x))
        .min_by(|a, b| a.0.total_cmp(&b.0));
    match best {
        Some((res, x)) if res <= TANGENT_RESIDUAL => Ok(x),
        Some((res, _)) => Err(TangentError::NotOnSurfaces(res)),
        None => Err(TangentError::NotOnSurfaces(f64::INFINITY)),
    }
}

/// Roots of a circular pair: `−a²` is always a root, the rest come from
/// the cubic left after dividing it out.
pub fn circular_roots(cp: &CanonicalPair, tol: f64) -> Result<RootSet, ClassifyError> {
    let q = quartic_from_canonical(cp);
    let special = -cp.a * cp.a;
    let (cubic, _) = q.deflate(special);
    let mut rs = polynomial_roots(&cubic, tol)?;
    match rs.real_roots.iter_mut().find(|r| (r.value - special).abs() <= tol) {
        Some(r) => {
            let m = r.multiplicity as f64;
            r.value = (r.value * m + special) / (m + 1.0);
            r.multiplicity += 1;
        }
        None => {
            let at = rs.real_roots.partition_point(|r| r.value < special);
            rs.real_roots.insert(at, RealRoot { value: special, multiplicity: 1 });
        }
    }
    Ok(rs)
}

pub fn classify_circular(cp: &CanonicalPair) -> Result<Position, ClassifyError> {
    let q = quartic_from_canonical(cp);
    let rs = circular_roots(cp, q.default_tolerance())?;
    classify_by_roots(&rs, &SpecialRoots::new(cp.a, cp.b))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub position: Position,
    /// Verdict of the coefficient test; disagrees with `position` only on
    /// numerical failure.
    pub coefficient_position: Result<Position, ClassifyError>,
    pub quartic: QuarticPoly,
    pub roots: RootSet,
    pub delta: f64,
    pub delta_band: f64,
    pub special_roots: SpecialRoots,
    /// Multiple root the tangent point was recovered from.
    pub tangent_root: Option<f64>,
    /// Canonical frame.
    pub tangent_point: Option<Vector3<f64>>,
    pub tangent_error: Option<TangentError>,
    pub smallness: SmallnessReport,
    pub canonical: CanonicalPair,
    /// Largest coefficient difference between the determinant expansion of
    /// the input pair and the closed form, relative to the largest coefficient.
    pub determinant_mismatch: f64,
}

impl Classification {
    /// Smallness holds, so the verdict is covered by the root tables.
    pub fn supported(&self) -> bool {
        self.smallness.satisfied
    }

    pub fn consistent(&self) -> bool {
        self.coefficient_position == Ok(self.position)
    }

    /// Distance of `Δ` outside its zero band; negative inside the band.
    pub fn delta_margin(&self) -> f64 {
        self.delta.abs() - self.delta_band
    }

    pub fn world_tangent_point(&self) -> Option<Vector3<f64>> {
        self.tangent_point.map(|x| self.canonical.transform.inverse().apply(&x))
    }
}

pub fn classify(e: &EllipsoidParams, p: &ParaboloidParams) -> Result<Classification, ClassifyError> {
    let cp = canonicalize(e, p)?;
    classify_pair(
        cp,
        &quadric_from_paraboloid(p),
        &quadric_from_ellipsoid(e),
        smallness_check(e, p),
    )
}

/// Classification of a pair given as matrices. Smallness is judged in the
/// canonical frame.
pub fn classify_quadrics(e: &Quadric, p: &Quadric) -> Result<Classification, ClassifyError> {
    let cp = canonicalize_quadrics(e, p)?;
    let r = cp.sphere.radius;
    let smallness = SmallnessReport {
        paraboloid_max_curvature: 2.0 / (cp.a * cp.a),
        ellipsoid_min_curvature: 1.0 / r,
        satisfied: cp.canonical_smallness(),
        margin: 1.0 / r - 2.0 / (cp.a * cp.a),
    };
    // the input matrices may carry arbitrary scales, so the mismatch is
    // measured on the canonical matrices
    classify_pair(cp, &cp.paraboloid_quadric(), &cp.sphere_quadric(), smallness)
}

fn classify_pair(
    cp: CanonicalPair,
    p: &Quadric,
    e: &Quadric,
    smallness: SmallnessReport,
) -> Result<Classification, ClassifyError> {
    let quartic = quartic_from_canonical(&cp);
    let determinant_mismatch = match characteristic_quartic(p, e) {
        Ok(d) => {
            let (x, y) = (d.coefficients(), quartic.coefficients());
            (0..4).map(|i| (x[i] - y[i]).abs()).fold(0.0, f64::max) / quartic.max_abs_coefficient()
        }
        Err(_) => f64::INFINITY,
    };
    let delta = discriminant(&quartic);
    let tol = quartic.default_tolerance();
    let special = SpecialRoots::new(cp.a, cp.b);
    let roots = if cp.circular { circular_roots(&cp, tol)? } else { real_roots(&quartic, tol)? };
    let position = classify_by_roots(&roots, &special)?;
    let coefficient_position = classify_by_coefficients(&quartic, delta, &special, tol);

    let (mut tangent_root, mut tangent_point_canonical, mut tangent_error) = (None, None, None);
    if position.is_tangent() {
        if let Some(root) = tangency_root(&roots, &special) {
            tangent_root = Some(root.value);
            match tangent_point(&cp.paraboloid_quadric(), &cp.sphere_quadric(), root.value) {
                Ok(x) => tangent_point_canonical = Some(x),
                Err(err) => tangent_error = Some(err),
            }
        }
    }
    Ok(Classification {
        position,
        coefficient_position,
        quartic,
        roots,
        delta,
        delta_band: quartic.delta_zero_band(),
        special_roots: special,
        tangent_root,
        tangent_point: tangent_point_canonical,
        tangent_error,
        smallness,
        canonical: cp,
        determinant_mismatch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn root_set(roots: &[(f64, usize)], complex_pairs: usize) -> RootSet {
        RootSet {
            real_roots: roots.iter().map(|&(value, multiplicity)| RealRoot { value, multiplicity }).collect(),
            complex_pairs,
            complex_roots: vec![Complex64::new(0.0, 1.0); complex_pairs],
            tolerance: 1e-7,
        }
    }

    fn sphere_pair(a: f64, b: f64, r: f64, c: [f64; 3]) -> (EllipsoidParams, ParaboloidParams) {
        (
            EllipsoidParams::sphere(Vector3::from(c), r).unwrap(),
            ParaboloidParams::standard(a, b).unwrap(),
        )
    }

    #[test]
    fn position_codes_round_trip() {
        for p in Position::ALL {
            assert_eq!(p.code().parse::<Position>().unwrap(), p);
        }
        assert_eq!("ti".parse::<Position>().unwrap(), Position::TI);
        assert!("X".parse::<Position>().is_err());
        assert_eq!(alloc::format!("{}", Position::TE), "TE");
    }

    #[test]
    fn root_table_examples() {
        let special = SpecialRoots::new(1.2, 1.5);
        let rs = root_set(&[(-3.54808, 1), (-1.44, 2), (-0.110095, 1)], 0);
        assert_eq!(classify_by_roots(&rs, &special), Ok(Position::I));

        let special = SpecialRoots::new(1.0, 2.0);
        let rs = root_set(&[(-19.9679, 1), (-4.0, 1), (-1.0, 1), (-0.0320513, 1)], 0);
        assert_eq!(classify_by_roots(&rs, &special), Ok(Position::I));
        let rs = root_set(&[(-4.0, 1), (-1.0, 1), (-0.8, 2)], 0);
        assert_eq!(classify_by_roots(&rs, &special), Ok(Position::TI));
        let rs = root_set(&[(-4.0, 1), (-1.0, 1), (0.8, 2)], 0);
        assert_eq!(classify_by_roots(&rs, &special), Ok(Position::TE));
        let rs = root_set(&[(-4.0, 1), (-1.0, 1)], 1);
        assert_eq!(classify_by_roots(&rs, &special), Ok(Position::C));
        let rs = root_set(&[(-4.0, 1), (-1.0, 1), (0.5, 1), (2.0, 1)], 0);
        assert_eq!(classify_by_roots(&rs, &special), Ok(Position::E));
    }

    #[test]
    fn special_doubles_and_triples() {
        let special = SpecialRoots::new(1.0, 2.0);
        let rs = root_set(&[(-4.0, 2), (-1.0, 1), (-0.5, 1)], 0);
        assert_eq!(classify_by_roots(&rs, &special), Ok(Position::I));
        let rs = root_set(&[(-4.0, 1), (-1.0, 3)], 0);
        assert_eq!(classify_by_roots(&rs, &special), Ok(Position::TI));
        let rs = root_set(&[(-4.0, 1), (-1.0 + 5e-7, 2), (-0.5, 1)], 0);
        assert_eq!(classify_by_roots(&rs, &special), Ok(Position::I));
        let rs = root_set(&[(-4.0, 1), (-1.0 + 5e-6, 2), (-0.5, 1)], 0);
        assert_eq!(classify_by_roots(&rs, &special), Ok(Position::TI));
    }

    #[test]
    fn invalid_configurations() {
        let special = SpecialRoots::new(1.0, 2.0);
        let invalid = |rs: RootSet| matches!(classify_by_roots(&rs, &special), Err(ClassifyError::InvalidConfiguration(_)));
        assert!(invalid(root_set(&[], 2)));
        assert!(invalid(root_set(&[(-1.0, 1), (2.0, 1)], 1)));
        assert!(invalid(root_set(&[(-1.0, 1), (1.0, 1), (2.0, 1), (3.0, 1)], 0)));
        assert!(invalid(root_set(&[(1.0, 4)], 0)));
        assert!(invalid(root_set(&[(-1.0, 1), (0.0, 1), (2.0, 1), (3.0, 1)], 0)));
    }

    #[test]
    fn coefficient_table_examples() {
        let q = QuarticPoly::monic(25.0, 104.64, 83.2, 2.56);
        let special = SpecialRoots::new(1.0, 2.0);
        let tol = q.default_tolerance();
        assert_eq!(classify_by_coefficients(&q, discriminant(&q), &special, tol), Ok(Position::I));

        let q = QuarticPoly::monic(-15.0, -95.36, -76.8, 2.56);
        let delta = discriminant(&q);
        assert!(delta > q.delta_zero_band());
        assert_eq!(classify_by_coefficients(&q, delta, &special, q.default_tolerance()), Ok(Position::E));

        // one complex pair: (λ² + 1)(λ + 1)(λ + 4)
        let q = QuarticPoly::monic(5.0, 5.0, 5.0, 4.0);
        let delta = discriminant(&q);
        assert!(delta < -q.delta_zero_band());
        assert_eq!(classify_by_coefficients(&q, delta, &special, q.default_tolerance()), Ok(Position::C));
    }

    #[test]
    fn coefficient_table_tangent_rows() {
        let special = SpecialRoots::new(1.0, 2.0);
        let ti = QuarticPoly::from_roots([-4.0, -1.0, -0.8, -0.8]);
        assert_eq!(
            classify_by_coefficients(&ti, discriminant(&ti), &special, ti.default_tolerance()),
            Ok(Position::TI)
        );
        let te = QuarticPoly::from_roots([-4.0, -1.0, 0.8, 0.8]);
        assert_eq!(
            classify_by_coefficients(&te, discriminant(&te), &special, te.default_tolerance()),
            Ok(Position::TE)
        );
        // doubled −a² with positive roots: exterior, not tangent
        let circ = SpecialRoots::new(1.0, 1.0);
        let e = QuarticPoly::from_roots([-1.0, -1.0, 0.3, 2.0]);
        assert_eq!(classify_by_coefficients(&e, discriminant(&e), &circ, e.default_tolerance()), Ok(Position::E));
        let i = QuarticPoly::from_roots([-1.0, -1.0, -0.3, -2.0]);
        assert_eq!(classify_by_coefficients(&i, discriminant(&i), &circ, i.default_tolerance()), Ok(Position::I));
    }

    #[test]
    fn on_axis_closed_form() {
        let (l3, l4) = on_axis_roots(5.0, 0.4);
        assert!((l3.re + 19.9679).abs() < 1e-4 && l3.im == 0.0);
        assert!((l4.re + 0.0320513).abs() < 1e-7);
        assert!((l3.re * l4.re - 0.64).abs() < 1e-12);
        let (l3, l4) = on_axis_roots(0.4, 0.4);
        assert!((l3.re + 0.8).abs() < 1e-15 && (l4.re + 0.8).abs() < 1e-15);
        let (l3, l4) = on_axis_roots(0.0, 1.0);
        assert_eq!((l3, l4), (Complex64::new(0.0, -2.0), Complex64::new(0.0, 2.0)));
        let (l3, l4) = on_axis_roots(-0.4, 0.4);
        assert!((l3.re - 0.8).abs() < 1e-15 && (l4.re - 0.8).abs() < 1e-15);
    }

    #[test]
    fn special_root_flags() {
        let cp = CanonicalPair::from_parts(1.2, 1.5, 0.25, Vector3::new(0.0, 0.5, 0.712045));
        let f = special_root_multiplicity_condition(&cp);
        assert!(f.a2_is_root && f.a2_double && !f.a2_triple);
        assert!(!f.b2_is_root && !f.b2_double);

        let cp = CanonicalPair::from_parts(1.0, 2.0, 0.5, Vector3::new(0.0, 0.0, 0.5));
        let f = special_root_multiplicity_condition(&cp);
        assert!(f.a2_triple && f.a2_is_root && f.b2_is_root);

        let cp = CanonicalPair::from_parts(1.0, 2.0, 0.3, Vector3::new(0.3, 0.0, 1.0));
        let f = special_root_multiplicity_condition(&cp);
        assert!(!f.a2_is_root && !f.a2_double && f.b2_is_root);
    }

    #[test]
    fn tangent_points_on_axis() {
        let cp = CanonicalPair::from_parts(1.0, 2.0, 0.4, Vector3::new(0.0, 0.0, 0.4));
        let x = tangent_point(&cp.paraboloid_quadric(), &cp.sphere_quadric(), -0.8).unwrap();
        assert!(x.norm() < 1e-9, "{x}");
        let cp = CanonicalPair::from_parts(1.0, 2.0, 0.4, Vector3::new(0.0, 0.0, -0.4));
        let x = tangent_point(&cp.paraboloid_quadric(), &cp.sphere_quadric(), 0.8).unwrap();
        assert!(x.norm() < 1e-9, "{x}");
    }

    #[test]
    fn tangent_point_of_triple_root() {
        // two-dimensional kernel whose line touches S with a slightly
        // negative discriminant
        let (a, b) = (1.970286797954933, 2.7886775790521434);
        let r = a * a / 2.0;
        let (e, p) = sphere_pair(a, b, r, [0.0, 0.0, r]);
        let c = classify(&e, &p).unwrap();
        assert_eq!(c.position, Position::TI);
        assert!(c.world_tangent_point().unwrap().norm() < 1e-9, "{:?}", c.tangent_error);
    }

    #[test]
    fn tangent_point_rejects_special_double() {
        let cp = CanonicalPair::from_parts(1.2, 1.5, 0.25, Vector3::new(0.0, 0.5, 0.712045));
        let err = tangent_point(&cp.paraboloid_quadric(), &cp.sphere_quadric(), -1.44).unwrap_err();
        assert!(matches!(err, TangentError::NotOnSurfaces(_)), "{err:?}");
    }

    #[test]
    fn tangent_point_needs_a_kernel() {
        let cp = CanonicalPair::from_parts(1.0, 2.0, 0.4, Vector3::new(0.0, 0.0, 5.0));
        let err = tangent_point(&cp.paraboloid_quadric(), &cp.sphere_quadric(), -2.5).unwrap_err();
        assert!(matches!(err, TangentError::NoKernel(_)));
    }

    #[test]
    fn classify_examples() {
        let (e, p) = sphere_pair(1.2, 1.5, 0.25, [0.0, 0.5, 0.712045]);
        let c = classify(&e, &p).unwrap();
        assert_eq!(c.position, Position::I);
        assert!(c.consistent() && c.supported());
        assert!(c.determinant_mismatch < 1e-9);
        assert!(c.tangent_point.is_none());

        let (e, p) = sphere_pair(1.0, 2.0, 0.4, [0.0, 0.0, 5.0]);
        assert_eq!(classify(&e, &p).unwrap().position, Position::I);
        let (e, p) = sphere_pair(1.0, 2.0, 0.4, [0.0, 0.0, 0.0]);
        let c = classify(&e, &p).unwrap();
        assert_eq!(c.position, Position::C);
        assert_eq!(c.roots.complex_pairs, 1);
    }

    #[test]
    fn classify_tangent_cases() {
        let (e, p) = sphere_pair(1.0, 2.0, 0.4, [0.0, 0.0, 0.4]);
        let c = classify(&e, &p).unwrap();
        assert_eq!(c.position, Position::TI);
        assert!(c.consistent());
        assert!(c.tangent_point.unwrap().norm() < 1e-7);
        assert!((c.tangent_root.unwrap() + 0.8).abs() < 1e-6);

        let (e, p) = sphere_pair(1.0, 2.0, 0.4, [0.0, 0.0, -0.4]);
        let c = classify(&e, &p).unwrap();
        assert_eq!(c.position, Position::TE);
        assert!(c.consistent());
        assert!(c.world_tangent_point().unwrap().norm() < 1e-7);

        // −a² triple: sphere of radius a²/2 sitting in the vertex
        let (e, p) = sphere_pair(1.0, 2.0, 0.5, [0.0, 0.0, 0.5]);
        let c = classify(&e, &p).unwrap();
        assert_eq!(c.position, Position::TI);
        assert!(c.consistent());
        assert!(c.tangent_point.unwrap().norm() < 1e-6);
    }

    #[test]
    fn circular_examples() {
        let cases = [
            ([0.0, 0.0, 5.0], Position::I),
            ([0.0, 0.0, 0.0], Position::C),
            ([0.0, 0.0, -0.4], Position::TE),
            ([0.0, 0.0, 0.4], Position::TI),
            ([0.0, 0.0, -3.0], Position::E),
            ([0.7, 0.2, 2.0], Position::I),
        ];
        for (c, want) in cases {
            let cp = CanonicalPair::from_parts(1.0, 1.0, 0.4, Vector3::from(c));
            assert!(cp.circular);
            assert_eq!(classify_circular(&cp), Ok(want), "{c:?}");
            let q = quartic_from_canonical(&cp);
            let full = real_roots(&q, q.default_tolerance()).unwrap();
            assert_eq!(classify_by_roots(&full, &SpecialRoots::new(1.0, 1.0)), Ok(want), "{c:?}");
        }
        let cp = CanonicalPair::from_parts(1.0, 1.0, 0.4, Vector3::new(0.0, 0.0, -0.4));
        let rs = circular_roots(&cp, 1e-7).unwrap();
        let double = rs.real_roots.iter().find(|r| r.value > 0.0).unwrap();
        assert_eq!(double.multiplicity, 2);
        assert!((double.value - 0.8).abs() < 1e-6);
    }

    #[test]
    fn classify_circular_through_params() {
        let (e, p) = sphere_pair(1.0, 1.0, 0.4, [0.0, 0.0, -0.4]);
        let c = classify(&e, &p).unwrap();
        assert!(c.canonical.circular);
        assert_eq!(c.position, Position::TE);
        assert!(c.consistent());
    }

    #[test]
    fn quadric_input_matches_params() {
        let (e, p) = sphere_pair(1.0, 2.0, 0.4, [0.3, -0.2, 1.5]);
        let by_params = classify(&e, &p).unwrap();
        let scaled_e = Quadric::new(quadric_from_ellipsoid(&e).matrix() * -3.0).unwrap();
        let scaled_p = Quadric::new(quadric_from_paraboloid(&p).matrix() * 0.2).unwrap();
        let by_matrices = classify_quadrics(&scaled_e, &scaled_p).unwrap();
        assert_eq!(by_params.position, by_matrices.position);
        assert!((by_params.canonical.a - by_matrices.canonical.a).abs() < 1e-12);
        assert!((by_params.canonical.sphere.radius - by_matrices.canonical.sphere.radius).abs() < 1e-12);
    }
}
