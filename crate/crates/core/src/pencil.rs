//! Characteristic quartic `det(λP + E)` of the pencil of two quadrics, its
//! discriminant and its real roots.

use alloc::vec::Vec;
use nalgebra::Matrix4;
use num_complex::Complex64;
use thiserror::Error;

use crate::geometry::Quadric;
use crate::reduction::CanonicalPair;
use crate::roots;

/// Relative width of the root clustering band, `tol = 1e-7·(1 + max|cᵢ|)`.
pub const ROOT_TOLERANCE: f64 = 1e-7;

/// Relative width of the `Δ = 0` band, `1e-8·(1 + max|cᵢ|)⁶`.
pub const DELTA_TOLERANCE: f64 = 1e-8;

/// The `λ⁴` term counts as vanished when the pencil's roots may exceed
/// `‖E‖/‖P‖` by more than the inverse of this factor.
pub const DEGENERATE_LEADING: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum PencilError {
    #[error("pencil is degenerate: det(P) = {0:e} has no usable λ⁴ term")]
    DegeneratePencil(f64),
    #[error("root tolerance {0:e} is too coarse for this polynomial")]
    ToleranceTooCoarse(f64),
}

/// Monic `λ⁴ + c₃λ³ + c₂λ² + c₁λ + c₀`; `scale·p(λ)` is the pencil
/// determinant it was normalized from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarticPoly {
    pub c3: f64,
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
    pub scale: f64,
}

impl QuarticPoly {
    pub fn monic(c3: f64, c2: f64, c1: f64, c0: f64) -> Self {
        Self { c3, c2, c1, c0, scale: 1.0 }
    }

    /// `∏ (λ − rᵢ)` for four real roots.
    pub fn from_roots(r: [f64; 4]) -> Self {
        let e1 = r[0] + r[1] + r[2] + r[3];
        let e2 = r[0] * r[1] + r[0] * r[2] + r[0] * r[3] + r[1] * r[2] + r[1] * r[3] + r[2] * r[3];
        let e3 = r[0] * r[1] * r[2] + r[0] * r[1] * r[3] + r[0] * r[2] * r[3] + r[1] * r[2] * r[3];
        let e4 = r[0] * r[1] * r[2] * r[3];
        Self::monic(-e1, e2, -e3, e4)
    }

    /// `[c3, c2, c1, c0]`
    pub fn coefficients(&self) -> [f64; 4] {
        [self.c3, self.c2, self.c1, self.c0]
    }

    /// `[1, c3, c2, c1, c0]`
    pub fn descending(&self) -> [f64; 5] {
        [1.0, self.c3, self.c2, self.c1, self.c0]
    }

    pub fn eval(&self, x: f64) -> f64 {
        roots::horner(&self.descending(), x)
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.coefficients().iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }

    pub fn default_tolerance(&self) -> f64 {
        ROOT_TOLERANCE * (1.0 + self.max_abs_coefficient())
    }

    /// Half-width of the band in which `Δ` counts as zero.
    pub fn delta_zero_band(&self) -> f64 {
        DELTA_TOLERANCE * libm::pow(1.0 + self.max_abs_coefficient(), 6.0)
    }

    /// Divides out `(λ − root)`, returning the monic cubic `[1, d2, d1, d0]`
    /// and the remainder `p(root)`.
    pub fn deflate(&self, root: f64) -> ([f64; 4], f64) {
        let d2 = self.c3 + root;
        let d1 = self.c2 + root * d2;
        let d0 = self.c1 + root * d1;
        let remainder = self.c0 + root * d0;
        ([1.0, d2, d1, d0], remainder)
    }
}

/// Raw coefficients of `det(λP + E)`, ascending in λ.
///
/// The determinant is multilinear in the columns, so the coefficient of
/// `λᵏ` is the sum of the determinants of the matrices taking `k` columns
/// from `P` and the rest from `E`.
pub fn pencil_coefficients(p: &Matrix4<f64>, e: &Matrix4<f64>) -> [f64; 5] {
    let mut out = [0.0; 5];
    for mask in 0u32..16 {
        let mut m = *e;
        for col in 0..4 {
            if mask & (1 << col) != 0 {
                m.set_column(col, &p.column(col));
            }
        }
        out[mask.count_ones() as usize] += m.determinant();
    }
    out
}

pub fn characteristic_quartic(p: &Quadric, e: &Quadric) -> Result<QuarticPoly, PencilError> {
    let c = pencil_coefficients(p.matrix(), e.matrix());
    let lead = c[4];
    // Fujiwara's root bound against the natural size of λ
    let root_bound = (0..4)
        .map(|k| libm::pow((c[k] / lead).abs(), 1.0 / (4 - k) as f64))
        .fold(0.0, f64::max);
    let natural = e.scale() / p.scale();
    if lead == 0.0 || !(DEGENERATE_LEADING * root_bound <= natural) {
        return Err(PencilError::DegeneratePencil(lead));
    }
    Ok(QuarticPoly { c3: c[3] / lead, c2: c[2] / lead, c1: c[1] / lead, c0: c[0] / lead, scale: lead })
}

/// Closed-form coefficients for a sphere against a standard paraboloid.
pub fn quartic_from_canonical(cp: &CanonicalPair) -> QuarticPoly {
    let (a2, b2) = (cp.a * cp.a, cp.b * cp.b);
    let c = cp.sphere.center;
    let (xc, yc, zc) = (c.x, c.y, c.z);
    let r2 = cp.sphere.radius * cp.sphere.radius;
    QuarticPoly {
        c3: 4.0 * zc + a2 + b2,
        c2: 4.0 * zc * (a2 + b2) - 4.0 * (xc * xc + yc * yc - r2) + a2 * b2,
        c1: 4.0 * (zc * a2 * b2 - yc * yc * a2 - xc * xc * b2 + r2 * (a2 + b2)),
        c0: 4.0 * a2 * b2 * r2,
        scale: -1.0 / (4.0 * a2 * b2),
    }
}

/// Unevaluated sum `hi + lo` carrying about twice the precision of `f64`.
#[derive(Clone, Copy)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    fn new(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    fn two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let v = s - a;
        Self { hi: s, lo: (a - (s - v)) + (b - v) }
    }

    fn add(self, other: Self) -> Self {
        let s = Self::two_sum(self.hi, other.hi);
        let lo = s.lo + self.lo + other.lo;
        Self::two_sum(s.hi, lo)
    }

    fn mul(self, b: f64) -> Self {
        let p = self.hi * b;
        let e = libm::fma(self.hi, b, -p) + self.lo * b;
        Self::two_sum(p, e)
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

/// Discriminant of the monic quartic, evaluated in double-double arithmetic
/// because its terms cancel heavily near multiple roots.
pub fn discriminant(q: &QuarticPoly) -> f64 {
    let (c3, c2, c1, c0) = (q.c3, q.c2, q.c1, q.c0);
    // (coefficient, powers of c3, c2, c1, c0)
    const TERMS: [(f64, [u8; 4]); 16] = [
        (256.0, [0, 0, 0, 3]),
        (-192.0, [1, 0, 1, 2]),
        (-128.0, [0, 2, 0, 2]),
        (144.0, [0, 1, 2, 1]),
        (-27.0, [0, 0, 4, 0]),
        (144.0, [2, 1, 0, 2]),
        (-6.0, [2, 0, 2, 1]),
        (-80.0, [1, 2, 1, 1]),
        (18.0, [1, 1, 3, 0]),
        (16.0, [0, 4, 0, 1]),
        (-4.0, [0, 3, 2, 0]),
        (-27.0, [4, 0, 0, 2]),
        (18.0, [3, 1, 1, 1]),
        (-4.0, [3, 0, 3, 0]),
        (-4.0, [2, 3, 0, 1]),
        (1.0, [2, 2, 2, 0]),
    ];
    let base = [c3, c2, c1, c0];
    let mut sum = DoubleDouble::new(0.0);
    for (coefficient, powers) in TERMS {
        let mut term = DoubleDouble::new(coefficient);
        for (x, &power) in base.iter().zip(powers.iter()) {
            for _ in 0..power {
                term = term.mul(*x);
            }
        }
        sum = sum.add(term);
    }
    sum.value()
}

/// Sign changes in `(1, c₃, c₂, c₁, c₀)`, zeros skipped.
pub fn descartes_sign_changes(q: &QuarticPoly) -> usize {
    let mut changes = 0;
    let mut last = 1.0f64;
    for c in q.coefficients() {
        if c != 0.0 {
            if c.signum() != last.signum() {
                changes += 1;
            }
            last = c;
        }
    }
    changes
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealRoot {
    pub value: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    /// Ascending, pairwise further apart than `tolerance`.
    pub real_roots: Vec<RealRoot>,
    pub complex_pairs: usize,
    /// One member (positive imaginary part) of each conjugate pair.
    pub complex_roots: Vec<Complex64>,
    pub tolerance: f64,
}

impl RootSet {
    pub fn total_multiplicity(&self) -> usize {
        self.real_roots.iter().map(|r| r.multiplicity).sum::<usize>() + 2 * self.complex_pairs
    }

    /// Real root within `band` of `value`.
    pub fn near(&self, value: f64, band: f64) -> Option<&RealRoot> {
        self.real_roots.iter().find(|r| (r.value - value).abs() <= band)
    }

    /// Real roots expanded by multiplicity, ascending.
    pub fn expanded(&self) -> Vec<f64> {
        self.real_roots
            .iter()
            .flat_map(|r| core::iter::repeat_n(r.value, r.multiplicity))
            .collect()
    }
}

/// Roots with multiplicities of a monic polynomial given in descending
/// order (leading 1 included).
pub fn polynomial_roots(coeffs: &[f64], tol: f64) -> Result<RootSet, PencilError> {
    let grouped = roots::group_roots(coeffs, tol).ok_or(PencilError::ToleranceTooCoarse(tol))?;
    let real_roots: Vec<RealRoot> = grouped
        .real
        .iter()
        .map(|c| RealRoot { value: c.value, multiplicity: c.multiplicity })
        .collect();
    let set = RootSet {
        complex_pairs: grouped.complex.len(),
        complex_roots: grouped.complex,
        real_roots,
        tolerance: tol,
    };
    if set.total_multiplicity() != coeffs.len() - 1 {
        return Err(PencilError::ToleranceTooCoarse(tol));
    }
    Ok(set)
}

pub fn real_roots(q: &QuarticPoly, tol: f64) -> Result<RootSet, PencilError> {
    polynomial_roots(&q.descending(), tol)
}
