#![allow(dead_code)]

use nalgebra::{Matrix3, Quaternion, Vector3};
use proptest::prelude::*;
use quadric_contact_core::{AffineTransform, EllipsoidParams, ParaboloidParams};

pub fn quaternion() -> impl Strategy<Value = Quaternion<f64>> {
    prop::array::uniform4(-1.0..1.0f64)
        .prop_filter("near-zero quaternion", |q| q.iter().map(|x| x * x).sum::<f64>() > 0.05)
        .prop_map(|q| Quaternion::new(q[0], q[1], q[2], q[3]).normalize())
}

pub fn vector(range: f64) -> impl Strategy<Value = Vector3<f64>> {
    prop::array::uniform3(-range..range).prop_map(Vector3::from)
}

pub fn paraboloid() -> impl Strategy<Value = ParaboloidParams> {
    (vector(2.0), quaternion(), 0.5..2.0f64, 1.0..3.0f64)
        .prop_map(|(v, q, a, ratio)| ParaboloidParams::new(v, q, a, a * ratio).unwrap())
}

/// Point on the paraboloid and its unit inward normal, world frame.
pub fn surface_point(p: &ParaboloidParams, u: f64, v: f64) -> (Vector3<f64>, Vector3<f64>) {
    let (a2, b2) = (p.a() * p.a(), p.b() * p.b());
    let local = Vector3::new(u, v, u * u / a2 + v * v / b2);
    let inward = Vector3::new(-2.0 * u / a2, -2.0 * v / b2, 1.0).normalize();
    let pose = p.pose();
    (pose.apply(&local), pose.linear() * inward)
}

/// Ellipsoid meeting the curvature bound against `p`, centred at a signed
/// distance `offset·c₃` along the normal of a surface point.
pub fn small_scene() -> impl Strategy<Value = (EllipsoidParams, ParaboloidParams)> {
    (
        paraboloid(),
        0.05..0.999f64,
        0.0..1.0f64,
        0.0..1.0f64,
        quaternion(),
        (-2.0..2.0f64, -2.0..2.0f64, -3.0..3.0f64),
    )
        .prop_map(|(p, s3, s1, s2, q, (u, v, offset))| {
            let a2 = p.a() * p.a();
            let c3 = s3 * a2 / 2.0;
            let lo = 2.0 * c3 * c3 / a2 * (1.0 + 1e-9);
            let c1 = lo + s1 * (c3 - lo);
            let c2 = c1 + s2 * (c3 - c1);
            let (x, n) = surface_point(&p, u, v);
            let e = EllipsoidParams::new(x + n * (offset * c3), [c1, c2, c3], q).unwrap();
            (e, p)
        })
}

/// Affine map with singular values in `[0.3, 3]`.
pub fn affine() -> impl Strategy<Value = AffineTransform> {
    (quaternion(), quaternion(), prop::array::uniform3(0.3..3.0f64), vector(3.0), any::<bool>())
        .prop_map(|(q1, q2, s, t, flip)| {
            let u = nalgebra::UnitQuaternion::from_quaternion(q1).to_rotation_matrix().into_inner();
            let v = nalgebra::UnitQuaternion::from_quaternion(q2).to_rotation_matrix().into_inner();
            let mut d = Vector3::from(s);
            if flip {
                d.x = -d.x;
            }
            AffineTransform::new(u * Matrix3::from_diagonal(&d) * v.transpose(), t).unwrap()
        })
}

pub fn relative_error(x: &[f64], y: &[f64]) -> f64 {
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    x.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale
}
