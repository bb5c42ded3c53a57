//! Scene files: one ellipsoid and one paraboloid as strict JSON.

use std::fs;
use std::path::Path;

use quadric_contact_core::{EllipsoidParams, ParaboloidParams, Quaternion, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Quaternions further than this from unit norm are rejected rather than
/// renormalized.
pub const QUATERNION_NORM_SLACK: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed scene: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid field `{field}`: {message}")]
    Field { field: &'static str, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EllipsoidSpec {
    pub center: [f64; 3],
    pub semi_axes: [f64; 3],
    /// `[w, x, y, z]`
    pub orientation: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParaboloidSpec {
    pub vertex: [f64; 3],
    /// `[w, x, y, z]`
    pub orientation: [f64; 4],
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub ellipsoid: EllipsoidSpec,
    pub paraboloid: ParaboloidSpec,
}

fn field_error(field: &'static str, message: impl Into<String>) -> SceneError {
    SceneError::Field { field, message: message.into() }
}

fn finite(field: &'static str, values: &[f64]) -> Result<(), SceneError> {
    match values.iter().find(|v| !v.is_finite()) {
        Some(v) => Err(field_error(field, format!("{v} is not finite"))),
        None => Ok(()),
    }
}

fn positive(field: &'static str, values: &[f64]) -> Result<(), SceneError> {
    match values.iter().find(|v| **v <= 0.0) {
        Some(v) => Err(field_error(field, format!("{v} is not positive"))),
        None => Ok(()),
    }
}

fn quaternion(field: &'static str, q: [f64; 4]) -> Result<Quaternion<f64>, SceneError> {
    finite(field, &q)?;
    let q = Quaternion::new(q[0], q[1], q[2], q[3]);
    let norm = q.norm();
    if (norm - 1.0).abs() > QUATERNION_NORM_SLACK {
        return Err(field_error(field, format!("norm {norm} is not 1")));
    }
    Ok(q / norm)
}

fn quaternion_array(q: &Quaternion<f64>) -> [f64; 4] {
    [q.w, q.i, q.j, q.k]
}

impl SceneFile {
    pub fn from_json(text: &str) -> Result<Self, SceneError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, SceneError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|source| SceneError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serializes")
    }

    pub fn from_params(e: &EllipsoidParams, p: &ParaboloidParams) -> Self {
        let c = e.semi_axes();
        SceneFile {
            ellipsoid: EllipsoidSpec {
                center: (*e.center()).into(),
                semi_axes: [c.x, c.y, c.z],
                orientation: quaternion_array(e.orientation().quaternion()),
            },
            paraboloid: ParaboloidSpec {
                vertex: (*p.vertex()).into(),
                orientation: quaternion_array(p.orientation().quaternion()),
                a: p.a(),
                b: p.b(),
            },
        }
    }

    pub fn ellipsoid(&self) -> Result<EllipsoidParams, SceneError> {
        let e = &self.ellipsoid;
        finite("ellipsoid.center", &e.center)?;
        finite("ellipsoid.semi_axes", &e.semi_axes)?;
        positive("ellipsoid.semi_axes", &e.semi_axes)?;
        let q = quaternion("ellipsoid.orientation", e.orientation)?;
        EllipsoidParams::new(Vector3::from(e.center), e.semi_axes, q)
            .map_err(|err| field_error("ellipsoid", err.to_string()))
    }

    pub fn paraboloid(&self) -> Result<ParaboloidParams, SceneError> {
        let p = &self.paraboloid;
        finite("paraboloid.vertex", &p.vertex)?;
        finite("paraboloid.a", &[p.a])?;
        positive("paraboloid.a", &[p.a])?;
        finite("paraboloid.b", &[p.b])?;
        positive("paraboloid.b", &[p.b])?;
        let q = quaternion("paraboloid.orientation", p.orientation)?;
        ParaboloidParams::new(Vector3::from(p.vertex), q, p.a, p.b)
            .map_err(|err| field_error("paraboloid", err.to_string()))
    }

    pub fn params(&self) -> Result<(EllipsoidParams, ParaboloidParams), SceneError> {
        Ok((self.ellipsoid()?, self.paraboloid()?))
    }
}
