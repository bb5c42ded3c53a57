//! Contact events along a straight path of the ellipsoid's centre.

use quadric_contact_core::{
    classify, smallness_check, ClassifyError, EllipsoidParams, ParaboloidParams, Position,
    SmallnessReport, Vector3,
};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub from: Vector3<f64>,
    pub to: Vector3<f64>,
    pub steps: usize,
    /// Bracket width in the path parameter `t ∈ [0, 1]`.
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepEvent {
    pub t: f64,
    #[serde(serialize_with = "code")]
    pub from: Position,
    #[serde(serialize_with = "code")]
    pub to: Position,
    pub bracket: (f64, f64),
}

impl SweepEvent {
    pub fn bracket_width(&self) -> f64 {
        self.bracket.1 - self.bracket.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub events: Vec<SweepEvent>,
    pub warnings: Vec<String>,
    pub smallness: SmallnessReport,
}

impl SweepResult {
    /// Positions visited, starting with the one at `t = 0`.
    pub fn sequence(&self, start: Position) -> Vec<Position> {
        let mut out = vec![start];
        out.extend(self.events.iter().map(|e| e.to));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SweepError {
    #[error("steps must be at least 2, got {0}")]
    Steps(usize),
    #[error("tolerance must be positive, got {0}")]
    Tolerance(f64),
    #[error("classification failed at t = {t}: {source}")]
    Classify {
        t: f64,
        #[source]
        source: ClassifyError,
    },
}

fn code<S: serde::Serializer>(p: &Position, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(p.code())
}

struct Path<'a> {
    e: &'a EllipsoidParams,
    p: &'a ParaboloidParams,
    cfg: &'a SweepConfig,
}

impl Path<'_> {
    fn position(&self, t: f64) -> Result<Position, SweepError> {
        let center = self.cfg.from + (self.cfg.to - self.cfg.from) * t;
        classify(&self.e.with_center(center), self.p)
            .map(|c| c.position)
            .map_err(|source| SweepError::Classify { t, source })
    }

    fn sample(&self, ts: &[f64]) -> Result<Vec<(f64, Position)>, SweepError> {
        ts.par_iter().map(|&t| Ok((t, self.position(t)?))).collect()
    }

    /// Pushes the transitions between `lo` (class `a`) and `hi` (class `b`).
    fn locate(
        &self,
        (mut lo, mut hi): (f64, f64),
        a: Position,
        b: Position,
        out: &mut Vec<SweepEvent>,
    ) -> Result<(), SweepError> {
        while hi - lo > self.cfg.tol {
            let mid = 0.5 * (lo + hi);
            let m = self.position(mid)?;
            if m == a {
                lo = mid;
            } else if m == b {
                hi = mid;
            } else {
                self.locate((lo, mid), a, m, out)?;
                return self.locate((mid, hi), m, b, out);
            }
        }
        out.push(SweepEvent { t: 0.5 * (lo + hi), from: a, to: b, bracket: (lo, hi) });
        Ok(())
    }
}

fn rank(p: Position) -> u8 {
    match p {
        Position::E => 0,
        Position::TE => 1,
        Position::C => 2,
        Position::TI => 3,
        Position::I => 4,
    }
}

/// Tangent type crossed between two adjacent open types.
fn crossing(a: Position, b: Position) -> Option<Position> {
    match (rank(a).min(rank(b)), rank(a).max(rank(b))) {
        (0, 2) => Some(Position::TE),
        (2, 4) => Some(Position::TI),
        _ => None,
    }
}

fn is_open_jump(a: Position, b: Position) -> bool {
    matches!((a, b), (Position::E, Position::I) | (Position::I, Position::E))
}

pub fn sweep(
    e: &EllipsoidParams,
    p: &ParaboloidParams,
    cfg: &SweepConfig,
) -> Result<SweepResult, SweepError> {
    if cfg.steps < 2 {
        return Err(SweepError::Steps(cfg.steps));
    }
    if !(cfg.tol > 0.0) {
        return Err(SweepError::Tolerance(cfg.tol));
    }
    let path = Path { e, p, cfg };
    let mut warnings = Vec::new();
    let ts: Vec<f64> = (0..=cfg.steps).map(|i| i as f64 / cfg.steps as f64).collect();
    let coarse = path.sample(&ts)?;

    let mut samples = Vec::with_capacity(coarse.len());
    samples.push(coarse[0]);
    for w in coarse.windows(2) {
        let ((t0, a), (t1, b)) = (w[0], w[1]);
        if is_open_jump(a, b) {
            warnings.push(format!(
                "samples jump {a} -> {b} between t = {t0} and t = {t1}; refining the interval"
            ));
            let fine: Vec<f64> =
                (1..cfg.steps).map(|i| t0 + (t1 - t0) * i as f64 / cfg.steps as f64).collect();
            samples.extend(path.sample(&fine)?);
        }
        samples.push(w[1]);
    }

    let mut raw = Vec::new();
    for w in samples.windows(2) {
        let ((t0, a), (t1, b)) = (w[0], w[1]);
        if a != b {
            path.locate((t0, t1), a, b, &mut raw)?;
        }
    }

    let mut events = Vec::with_capacity(raw.len());
    for ev in raw {
        if is_open_jump(ev.from, ev.to) {
            warnings.push(format!("unresolved {} -> {} jump at t = {}", ev.from, ev.to, ev.t));
        }
        match crossing(ev.from, ev.to) {
            Some(tangent) => {
                events.push(SweepEvent { to: tangent, ..ev });
                events.push(SweepEvent { from: tangent, ..ev });
            }
            None => events.push(ev),
        }
    }
    Ok(SweepResult { events, warnings, smallness: smallness_check(e, p) })
}
