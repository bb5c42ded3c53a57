//! Roots of small real monic polynomials with multiplicities.
//!
//! All complex roots are found with the Aberth–Ehrlich iteration. Nearby
//! roots are then grouped into multiple roots. A group of `m` roots is
//! polished as a simple root `x` of `p^(m−1)` and accepted when either
//!
//! - it is a pair closer than `tol` whose Taylor expansion at `x` fits two
//!   roots within `tol`, or
//! - its diameter is below `S·(tol/S)^(1/m)` (`S = 1 + max|cᵢ|`) and the
//!   Taylor coefficients of orders below `m − 1` at `x` are at rounding
//!   level.
//!
//! The second rule recognizes multiple roots that rounding split further
//! apart than `tol` while keeping tight clusters of distinct roots apart.
//!
//! Coefficient slices are in descending order with an implicit leading 1
//! included, e.g. `[1, c3, c2, c1, c0]`.

use alloc::vec::Vec;
use num_complex::Complex64;

const MAX_ABERTH_ITERATIONS: usize = 2000;
const MAX_NEWTON_ITERATIONS: usize = 60;

/// Rounding level, relative to the coefficient magnitudes, below which the
/// lower Taylor coefficients of a multiple root must fall.
const MULTIPLE_ROOT_NOISE: f64 = 1e3 * f64::EPSILON;

pub(crate) fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().fold(0.0, |acc, c| acc * x + c)
}

fn horner_complex(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs.iter().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

pub(crate) fn derivative(coeffs: &[f64]) -> Vec<f64> {
    let n = coeffs.len().saturating_sub(1);
    coeffs[..n].iter().enumerate().map(|(i, c)| c * (n - i) as f64).collect()
}

/// Taylor coefficients `p^(k)(x)/k!`, ascending in `k`.
pub(crate) fn taylor(coeffs: &[f64], x: f64) -> Vec<f64> {
    // repeated synthetic division
    let mut work = coeffs.to_vec();
    let n = work.len();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let len = n - k;
        for i in 1..len {
            work[i] += work[i - 1] * x;
        }
        out.push(work[len - 1]);
    }
    out
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn coefficient_scale(coeffs: &[f64]) -> f64 {
    1.0 + coeffs[1..].iter().fold(0.0f64, |m, c| m.max(c.abs()))
}

/// All complex roots of a monic polynomial.
pub(crate) fn aberth(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let d = derivative(coeffs);
    // Fujiwara bound
    let mut bound = 0.0f64;
    for (i, c) in coeffs[1..].iter().enumerate() {
        let k = i + 1;
        let c = if k == n { c.abs() / 2.0 } else { c.abs() };
        bound = bound.max(libm::pow(c, 1.0 / k as f64));
    }
    let radius = (2.0 * bound).max(f64::MIN_POSITIVE);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let angle = 2.0 * core::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius, angle)
        })
        .collect();

    for _ in 0..MAX_ABERTH_ITERATIONS {
        let mut converged = true;
        for k in 0..n {
            let p = horner_complex(coeffs, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let dp = horner_complex(&d, z[k]);
            let ratio = if dp.norm() == 0.0 { Complex64::new(radius * 1e-8, 0.0) } else { p / dp };
            let repulsion: Complex64 =
                (0..n).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let denom = Complex64::new(1.0, 0.0) - ratio * repulsion;
            let step = if denom.norm() == 0.0 || !denom.is_finite() { ratio } else { ratio / denom };
            if !step.is_finite() {
                continue;
            }
            z[k] -= step;
            if step.norm() > 4.0 * f64::EPSILON * z[k].norm().max(f64::MIN_POSITIVE) {
                converged = false;
            }
        }
        if converged {
            break;
        }
    }
    z
}

/// Newton iteration on `coeffs` from `x0`, kept inside `[x0 − reach, x0 + reach]`.
fn newton(coeffs: &[f64], x0: f64, reach: f64) -> f64 {
    let d = derivative(coeffs);
    let mut x = x0;
    let mut best = (horner(coeffs, x).abs(), x);
    for _ in 0..MAX_NEWTON_ITERATIONS {
        let fx = horner(coeffs, x);
        let dfx = horner(&d, x);
        if fx == 0.0 || dfx == 0.0 || !dfx.is_finite() {
            break;
        }
        let next = x - fx / dfx;
        if !next.is_finite() || (next - x0).abs() > reach {
            break;
        }
        let residual = horner(coeffs, next).abs();
        if residual < best.0 {
            best = (residual, next);
        }
        if (next - x).abs() <= 2.0 * f64::EPSILON * next.abs() {
            break;
        }
        x = next;
    }
    best.1
}

/// Root of `p^(m−1)` near `x0`; simple there when `p` has an m-fold root.
fn polish(coeffs: &[f64], x0: f64, multiplicity: usize, reach: f64) -> f64 {
    let mut target = coeffs.to_vec();
    for _ in 1..multiplicity {
        target = derivative(&target);
    }
    newton(&target, x0, reach)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Cluster {
    pub value: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Grouped {
    pub real: Vec<Cluster>,
    /// One representative (positive imaginary part) per conjugate pair.
    pub complex: Vec<Complex64>,
}

fn merge_radius(scale: f64, tol: f64, multiplicity: usize) -> f64 {
    tol.max(scale * libm::pow(tol / scale, 1.0 / multiplicity as f64))
}

/// Taylor coefficients at `x` vanish up to rounding, up to order `m − 2`.
fn rounding_level(coeffs: &[f64], t: &[f64], x: f64, m: usize) -> bool {
    let magnitude: Vec<f64> = coeffs.iter().map(|c| c.abs()).collect();
    let noise = taylor(&magnitude, x.abs());
    (0..m - 1).all(|k| t[k].abs() <= MULTIPLE_ROOT_NOISE * noise[k])
}

/// Within-`tol` pair whose Taylor expansion at `x` fits two roots within `tol`.
fn close_pair(t: &[f64], diameter: f64, tol: f64) -> bool {
    diameter <= tol
        && (0..2).all(|k| t[k].abs() <= 4.0 * binomial(2, k) * libm::pow(tol, (2 - k) as f64) * t[2].abs())
}

/// Restricted-growth strings of length `n`: every set partition once.
fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, n: usize, max: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for label in 0..=max + 1 {
            prefix.push(label);
            let next_max = if label > max { label } else { max };
            extend(prefix, n, next_max, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        out.push(Vec::new());
        return out;
    }
    let mut prefix = Vec::from([0usize]);
    extend(&mut prefix, n, 0, &mut out);
    out
}

struct Candidate {
    blocks: usize,
    spread: f64,
    grouped: Grouped,
}

fn evaluate_partition(coeffs: &[f64], roots: &[Complex64], labels: &[usize], tol: f64) -> Option<Candidate> {
    let scale = coefficient_scale(coeffs);
    let blocks = labels.iter().max().map_or(0, |m| m + 1);
    let mut real = Vec::new();
    let mut complex_singletons = Vec::new();
    let mut spread = 0.0;
    for b in 0..blocks {
        let members: Vec<Complex64> =
            labels.iter().zip(roots).filter(|(l, _)| **l == b).map(|(_, z)| *z).collect();
        let m = members.len();
        if m == 1 {
            let z = members[0];
            if z.im.abs() <= tol / 2.0 {
                real.push(Cluster { value: newton(coeffs, z.re, tol), multiplicity: 1 });
            } else {
                complex_singletons.push(z);
            }
            continue;
        }
        let radius = merge_radius(scale, tol, m);
        let mut diameter = 0.0f64;
        for i in 0..m {
            for j in i + 1..m {
                diameter = diameter.max((members[i] - members[j]).norm());
            }
        }
        let centroid = members.iter().sum::<Complex64>() / m as f64;
        if diameter > radius || centroid.im.abs() > radius {
            return None;
        }
        let x = polish(coeffs, centroid.re, m, radius);
        let t = taylor(coeffs, x);
        let accepted = (m == 2 && close_pair(&t, diameter, tol)) || rounding_level(coeffs, &t, x, m);
        if !accepted {
            return None;
        }
        spread += diameter;
        real.push(Cluster { value: x, multiplicity: m });
    }
    let upper = complex_singletons.iter().filter(|z| z.im > 0.0).count();
    if 2 * upper != complex_singletons.len() {
        return None;
    }
    let complex = complex_singletons.into_iter().filter(|z| z.im > 0.0).collect::<Vec<_>>();
    Some(Candidate { blocks, spread, grouped: Grouped { real, complex } })
}

/// Real roots with multiplicities and the non-real conjugate pairs.
///
/// `coeffs` must be monic. Returns `None` when `tol` is not positive or
/// exceeds the root bound `1 + max|cᵢ|`.
pub(crate) fn group_roots(coeffs: &[f64], tol: f64) -> Option<Grouped> {
    let scale = coefficient_scale(coeffs);
    if !(tol > 0.0) || tol >= scale {
        return None;
    }
    let roots = aberth(coeffs);
    let mut best: Option<Candidate> = None;
    for labels in partitions(roots.len()) {
        if let Some(c) = evaluate_partition(coeffs, &roots, &labels, tol) {
            let better = match &best {
                None => true,
                Some(b) => c.blocks < b.blocks || (c.blocks == b.blocks && c.spread < b.spread),
            };
            if better {
                best = Some(c);
            }
        }
    }
    let mut grouped = match best {
        Some(c) => c.grouped,
        None => {
            // unbalanced non-real singletons: the ones nearest the axis are real
            let mut order: Vec<usize> = (0..roots.len()).collect();
            order.sort_by(|&i, &j| roots[i].im.abs().total_cmp(&roots[j].im.abs()));
            let mut is_real = alloc::vec![false; roots.len()];
            let mut upper = roots.iter().filter(|z| z.im > tol / 2.0).count();
            let mut lower = roots.iter().filter(|z| z.im < -tol / 2.0).count();
            for &i in &order {
                let z = roots[i];
                if z.im.abs() <= tol / 2.0 {
                    is_real[i] = true;
                } else if upper != lower {
                    if z.im > 0.0 && upper > lower {
                        upper -= 1;
                        is_real[i] = true;
                    } else if z.im < 0.0 && lower > upper {
                        lower -= 1;
                        is_real[i] = true;
                    }
                }
            }
            let mut real = Vec::new();
            let mut complex = Vec::new();
            for (i, z) in roots.iter().enumerate() {
                if is_real[i] {
                    real.push(Cluster { value: newton(coeffs, z.re, tol), multiplicity: 1 });
                } else if z.im > 0.0 {
                    complex.push(*z);
                }
            }
            Grouped { real, complex }
        }
    };
    grouped.real.sort_by(|a, b| a.value.total_cmp(&b.value));
    // polishing can pull two simple roots together
    let mut merged: Vec<Cluster> = Vec::with_capacity(grouped.real.len());
    for c in grouped.real {
        match merged.last_mut() {
            Some(last) if (c.value - last.value).abs() <= tol => {
                let total = last.multiplicity + c.multiplicity;
                last.value = (last.value * last.multiplicity as f64 + c.value * c.multiplicity as f64)
                    / total as f64;
                last.multiplicity = total;
            }
            _ => merged.push(c),
        }
    }
    grouped.real = merged;
    grouped.complex.sort_by(|a, b| a.re.total_cmp(&b.re));
    Some(grouped)
}
