//! Machine and human renderings of a classification.

use std::fmt::Write as _;

use quadric_contact_core::{Classification, SmallnessReport};
use serde::{Deserialize, Serialize};

/// Significant digits kept in reports.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// `x` rounded to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

/// Rounded decimal text, in scientific notation for very small or large
/// magnitudes.
pub fn fmt_num(x: f64) -> String {
    let r = round_sig(x);
    if r == 0.0 || (1e-4..1e9).contains(&r.abs()) || !r.is_finite() {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootEntry {
    pub value: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallnessEntry {
    pub satisfied: bool,
    pub margin: f64,
}

impl From<&SmallnessReport> for SmallnessEntry {
    fn from(s: &SmallnessReport) -> Self {
        SmallnessEntry { satisfied: s.satisfied, margin: round_sig(s.margin) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub position: String,
    pub roots: Vec<RootEntry>,
    pub complex_pairs: usize,
    /// `[c3, c2, c1, c0]`
    pub coefficients: [f64; 4],
    pub delta: f64,
    pub smallness: SmallnessEntry,
    /// World frame.
    pub tangent_point: Option<[f64; 3]>,
}

impl Report {
    pub fn new(c: &Classification) -> Self {
        Report {
            position: c.position.code().to_string(),
            roots: c
                .roots
                .real_roots
                .iter()
                .map(|r| RootEntry { value: round_sig(r.value), multiplicity: r.multiplicity })
                .collect(),
            complex_pairs: c.roots.complex_pairs,
            coefficients: c.quartic.coefficients().map(round_sig),
            delta: round_sig(c.delta),
            smallness: (&c.smallness).into(),
            tangent_point: c.world_tangent_point().map(|x| [round_sig(x.x), round_sig(x.y), round_sig(x.z)]),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn smallness_text(s: &SmallnessReport) -> String {
    format!(
        "smallness: {} (ellipsoid min curvature {}, paraboloid max curvature {}, margin {})",
        if s.satisfied { "satisfied" } else { "violated" },
        fmt_num(s.ellipsoid_min_curvature),
        fmt_num(s.paraboloid_max_curvature),
        fmt_num(s.margin),
    )
}

pub fn text(c: &Classification) -> String {
    let r = Report::new(c);
    let mut out = String::new();
    let _ = writeln!(out, "position: {}", r.position);
    let [c3, c2, c1, c0] = r.coefficients.map(fmt_num);
    let _ = writeln!(out, "coefficients: c3={c3} c2={c2} c1={c1} c0={c0}");
    let _ = writeln!(out, "delta: {}", fmt_num(r.delta));
    let roots: Vec<String> =
        r.roots.iter().map(|x| format!("{} (x{})", fmt_num(x.value), x.multiplicity)).collect();
    let _ = writeln!(out, "real roots: {}", if roots.is_empty() { "none".into() } else { roots.join(", ") });
    let _ = writeln!(out, "complex pairs: {}", r.complex_pairs);
    let _ = writeln!(out, "{}", smallness_text(&c.smallness));
    match r.tangent_point {
        Some(p) => {
            let [x, y, z] = p.map(fmt_num);
            let _ = writeln!(out, "tangent point: ({x}, {y}, {z})");
        }
        None => {
            let _ = writeln!(out, "tangent point: none");
        }
    }
    out
}
