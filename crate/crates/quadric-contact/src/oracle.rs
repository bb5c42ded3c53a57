//! Classification-free ground truth: sample the paraboloid's quadratic form
//! over the ellipsoid surface and read the position off its extrema.

use std::fmt;

use quadric_contact_core::{
    classify, smallness_check, AffineTransform, EllipsoidParams, ParaboloidParams, Position,
    Quaternion, Vector3,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::scene::SceneFile;

/// Smallest lattice size accepted by [`sample_extrema`].
pub const MIN_SAMPLES: usize = 1000;
/// Lattice size used when none is given.
pub const DEFAULT_SAMPLES: usize = 20_000;
/// Tangency band relative to the larger extremum magnitude.
pub const BAND: f64 = 1e-6;
/// Mismatches whose smaller extremum lies within this fraction of the larger
/// one are attributed to the band edge.
pub const BAND_EDGE: f64 = 1e-3;
/// Lattice points refined for each extremum.
pub const CANDIDATES: usize = 8;
pub const MAX_REFINE_STEPS: usize = 200;
pub const GRADIENT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Estimate {
    I,
    C,
    E,
    NearTangent,
}

impl fmt::Display for Estimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Estimate::I => "I",
            Estimate::C => "C",
            Estimate::E => "E",
            Estimate::NearTangent => "NearTangent",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleVerdict {
    /// Minimum of the paraboloid's quadratic form over the ellipsoid surface.
    pub min_value: f64,
    pub max_value: f64,
    pub position_estimate: Estimate,
    pub samples: usize,
}

impl OracleVerdict {
    pub fn scale(&self) -> f64 {
        self.min_value.abs().max(self.max_value.abs())
    }

    pub fn band(&self) -> f64 {
        BAND * self.scale()
    }

    /// Whether a disagreement with the classifier can be blamed on the
    /// extrema sitting close to zero.
    pub fn near_band_edge(&self) -> bool {
        self.min_value.abs().min(self.max_value.abs()) <= BAND_EDGE * self.scale()
    }

    pub fn matches(&self, p: Position) -> bool {
        matches!(
            (self.position_estimate, p),
            (Estimate::I, Position::I) | (Estimate::C, Position::C) | (Estimate::E, Position::E)
        )
    }
}

fn estimate(min: f64, max: f64) -> Estimate {
    let tau = BAND * min.abs().max(max.abs());
    if max < -tau {
        Estimate::I
    } else if min > tau {
        Estimate::E
    } else if min < -tau && max > tau {
        Estimate::C
    } else {
        Estimate::NearTangent
    }
}

/// Point `i` of an `n`-point spherical Fibonacci lattice.
pub fn fibonacci_point(i: usize, n: usize) -> Vector3<f64> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let z = 1.0 - (2 * i + 1) as f64 / n as f64;
    let rho = (1.0 - z * z).max(0.0).sqrt();
    let phi = golden * i as f64;
    Vector3::new(rho * phi.cos(), rho * phi.sin(), z)
}

/// `x²/a² + y²/b² − z` on the unit sphere pulled back through the ellipsoid
/// embedding, in the paraboloid's own frame.
struct Form {
    map: AffineTransform,
    wa: f64,
    wb: f64,
}

impl Form {
    fn new(e: &EllipsoidParams, p: &ParaboloidParams) -> Self {
        Form {
            map: p.pose().inverse().after(&e.embedding()),
            wa: 1.0 / (p.a() * p.a()),
            wb: 1.0 / (p.b() * p.b()),
        }
    }

    fn value(&self, u: &Vector3<f64>) -> f64 {
        let y = self.map.apply(u);
        self.wa * y.x * y.x + self.wb * y.y * y.y - y.z
    }

    /// Gradient projected onto the tangent plane of the unit sphere at `u`.
    fn tangent_gradient(&self, u: &Vector3<f64>) -> Vector3<f64> {
        let y = self.map.apply(u);
        let g = self.map.linear().transpose() * Vector3::new(2.0 * self.wa * y.x, 2.0 * self.wb * y.y, -1.0);
        g - u * g.dot(u)
    }

    /// Local descent of `sign · value` from `u` along the sphere.
    fn refine(&self, mut u: Vector3<f64>, sign: f64) -> f64 {
        let mut f = sign * self.value(&u);
        let mut step = 1.0 / self.map.linear().norm().max(1.0);
        for _ in 0..MAX_REFINE_STEPS {
            let g = self.tangent_gradient(&u) * sign;
            let gn = g.norm();
            if gn < GRADIENT_TOLERANCE {
                break;
            }
            let mut accepted = false;
            step *= 2.0;
            for _ in 0..60 {
                let v = (u - g * step).normalize();
                let fv = sign * self.value(&v);
                if fv <= f - 1e-4 * step * gn * gn {
                    u = v;
                    f = fv;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        sign * f
    }
}

/// Extremal lattice indices: the `k` smallest values, then the `k` largest.
fn extremal(values: &[f64], k: usize) -> (Vec<usize>, Vec<usize>) {
    let order = |i: &usize, j: &usize| values[*i].total_cmp(&values[*j]).then(i.cmp(j));
    let mut idx: Vec<usize> = (0..values.len()).collect();
    let k = k.min(values.len());
    idx.select_nth_unstable_by(k - 1, order);
    let low = idx[..k].to_vec();
    idx.select_nth_unstable_by(values.len() - k, order);
    let high = idx[values.len() - k..].to_vec();
    (low, high)
}

/// Extrema of the paraboloid's quadratic form over the ellipsoid surface.
/// `n` is raised to [`MIN_SAMPLES`] when smaller.
pub fn sample_extrema(e: &EllipsoidParams, p: &ParaboloidParams, n: usize) -> OracleVerdict {
    let n = n.max(MIN_SAMPLES);
    let form = Form::new(e, p);
    let values: Vec<f64> = (0..n).into_par_iter().map(|i| form.value(&fibonacci_point(i, n))).collect();
    let (low, high) = extremal(&values, CANDIDATES);
    let min = low
        .iter()
        .map(|&i| form.refine(fibonacci_point(i, n), 1.0).min(values[i]))
        .fold(f64::INFINITY, f64::min);
    let max = high
        .iter()
        .map(|&i| form.refine(fibonacci_point(i, n), -1.0).max(values[i]))
        .fold(f64::NEG_INFINITY, f64::max);
    OracleVerdict { min_value: min, max_value: max, position_estimate: estimate(min, max), samples: n }
}

/// Uniform random rotation.
pub fn random_quaternion<R: Rng>(rng: &mut R) -> Quaternion<f64> {
    let (u1, u2, u3): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
    let tau = std::f64::consts::TAU;
    let (s, t) = ((1.0 - u1).sqrt(), u1.sqrt());
    Quaternion::new(t * (tau * u3).cos(), s * (tau * u2).sin(), s * (tau * u2).cos(), t * (tau * u3).sin())
}

/// Random scene satisfying the smallness condition, with the ellipsoid
/// placed near the paraboloid so that all three open positions occur.
pub fn random_scene<R: Rng>(rng: &mut R) -> (EllipsoidParams, ParaboloidParams) {
    loop {
        let a = rng.random_range(0.5..2.0);
        let b = a * rng.random_range(1.0..3.0);
        let vertex = Vector3::from_fn(|_, _| rng.random_range(-2.0..2.0));
        let p = ParaboloidParams::new(vertex, random_quaternion(rng), a, b).expect("valid paraboloid");

        // smallness: c1 / c3² ≥ 2 / a²
        let c3 = rng.random_range(0.05..0.999) * a * a / 2.0;
        let c1 = rng.random_range((2.0 * c3 * c3 / (a * a) * (1.0 + 1e-9)).min(c3)..=c3);
        let c2 = rng.random_range(c1..=c3);

        let (u, v) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let surface = Vector3::new(u, v, u * u / (a * a) + v * v / (b * b));
        let inward = Vector3::new(-2.0 * u / (a * a), -2.0 * v / (b * b), 1.0).normalize();
        let local = surface + inward * (rng.random_range(-3.0..3.0) * c3);
        let center = p.pose().apply(&local);
        let e = EllipsoidParams::new(center, [c1, c2, c3], random_quaternion(rng)).expect("valid ellipsoid");
        if smallness_check(&e, &p).satisfied {
            return (e, p);
        }
    }
}

/// Generator for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[derive(Debug, Clone, Serialize)]
pub struct Disagreement {
    pub trial: usize,
    pub classifier: String,
    pub oracle: OracleVerdict,
    pub band_edge: bool,
    pub scene: SceneFile,
}

#[derive(Debug, Clone, Serialize)]
pub struct AgreementReport {
    pub seed: u64,
    pub trials: usize,
    pub samples: usize,
    /// Trials whose oracle verdict lies outside the tangency band.
    pub compared: usize,
    pub agreed: usize,
    pub excluded: usize,
    pub disagreements: Vec<Disagreement>,
}

impl AgreementReport {
    pub fn agreement_rate(&self) -> f64 {
        if self.compared == 0 {
            1.0
        } else {
            self.agreed as f64 / self.compared as f64
        }
    }

    pub fn all_band_edge(&self) -> bool {
        self.disagreements.iter().all(|d| d.band_edge)
    }
}

enum Outcome {
    Agreed,
    Excluded,
    Disagreed(Box<Disagreement>),
}

fn trial(index: usize, e: &EllipsoidParams, p: &ParaboloidParams, samples: usize) -> Outcome {
    let oracle = sample_extrema(e, p, samples);
    let classified = classify(e, p);
    if oracle.position_estimate == Estimate::NearTangent {
        return Outcome::Excluded;
    }
    match classified {
        Ok(c) if oracle.matches(c.position) => Outcome::Agreed,
        other => Outcome::Disagreed(Box::new(Disagreement {
            trial: index,
            classifier: match other {
                Ok(c) => c.position.to_string(),
                Err(err) => format!("error: {err}"),
            },
            band_edge: oracle.near_band_edge(),
            oracle,
            scene: SceneFile::from_params(e, p),
        })),
    }
}

/// Classifier against oracle on `trials` scenes. Random scenes are drawn from
/// `seed` unless a fixed scene is given.
pub fn agreement_test(
    seed: u64,
    trials: usize,
    samples: usize,
    fixed: Option<(EllipsoidParams, ParaboloidParams)>,
) -> AgreementReport {
    let outcomes: Vec<Outcome> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let (e, p) = fixed.unwrap_or_else(|| random_scene(&mut trial_rng(seed, i as u64)));
            trial(i, &e, &p, samples)
        })
        .collect();
    let mut report = AgreementReport {
        seed,
        trials,
        samples: samples.max(MIN_SAMPLES),
        compared: 0,
        agreed: 0,
        excluded: 0,
        disagreements: Vec::new(),
    };
    for o in outcomes {
        match o {
            Outcome::Agreed => {
                report.compared += 1;
                report.agreed += 1;
            }
            Outcome::Excluded => report.excluded += 1,
            Outcome::Disagreed(d) => {
                report.compared += 1;
                report.disagreements.push(*d);
            }
        }
    }
    report
}
