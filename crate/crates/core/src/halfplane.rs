//! Geometry of the upper half plane `C+ = {z : Im z > 0}`.
//!
//! Extended complex numbers, unimodular 2x2 matrices acting as linear
//! fractional transformations, the hyperbolic metric, and the fixed
//! logarithm branch with `arg in [0, 2*pi)` used throughout the crate.

use crate::{Error, Result};
use num_complex::Complex64;

/// Denominators below this modulus are treated as a pole of the Möbius map.
const POLE_THRESHOLD: f64 = 1e-300;

/// A point of the Riemann sphere restricted to `C ∪ {∞}`.
///
/// Finite values always carry finite coordinates; the point at infinity
/// carries none.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedComplex {
    Finite(Complex64),
    Infinity,
}

impl ExtendedComplex {
    /// Wraps a finite complex value, rejecting NaN or infinite coordinates.
    pub fn finite(value: Complex64) -> Result<Self> {
        if value.re.is_finite() && value.im.is_finite() {
            Ok(ExtendedComplex::Finite(value))
        } else {
            Err(Error::NonFinite)
        }
    }

    pub fn infinity() -> Self {
        ExtendedComplex::Infinity
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtendedComplex::Infinity)
    }

    pub fn as_finite(&self) -> Option<Complex64> {
        match self {
            ExtendedComplex::Finite(v) => Some(*v),
            ExtendedComplex::Infinity => None,
        }
    }
}

impl From<Complex64> for ExtendedComplex {
    fn from(value: Complex64) -> Self {
        if value.re.is_finite() && value.im.is_finite() {
            ExtendedComplex::Finite(value)
        } else {
            ExtendedComplex::Infinity
        }
    }
}

/// A 2x2 complex matrix normalized to determinant one.
///
/// The constructor divides by a square root of the determinant, so
/// "unimodular" is an enforced invariant rather than a caller obligation.
/// The sign ambiguity of the root is irrelevant for every use in this
/// crate: matrices act as linear fractional transformations, which are
/// blind to an overall sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnimodularMatrix {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
}

impl UnimodularMatrix {
    /// Builds the matrix `[[a, b], [c, d]]` and normalizes its determinant.
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        for entry in [a, b, c, d] {
            if !entry.re.is_finite() || !entry.im.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        let det = a * d - b * c;
        let scale = a.norm().max(b.norm()).max(c.norm()).max(d.norm());
        if det.norm() < 1e-30 * (1.0 + scale * scale) {
            return Err(Error::DegenerateMatrix);
        }
        let root = det.sqrt();
        Ok(UnimodularMatrix {
            a: a / root,
            b: b / root,
            c: c / root,
            d: d / root,
        })
    }

    /// Convenience constructor from real entries.
    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Self::new(
            Complex64::new(a, 0.0),
            Complex64::new(b, 0.0),
            Complex64::new(c, 0.0),
            Complex64::new(d, 0.0),
        )
    }

    pub fn identity() -> Self {
        UnimodularMatrix {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
            c: Complex64::new(0.0, 0.0),
            d: Complex64::new(1.0, 0.0),
        }
    }

    /// The normalized form of `diag(1, -1)`; as a Möbius map it implements
    /// multiplication by -1.
    pub fn negator() -> Self {
        // diag(1,-1) has determinant -1; dividing by its principal root i
        // gives diag(-i, i), the same Möbius map with determinant one.
        UnimodularMatrix {
            a: Complex64::new(0.0, -1.0),
            b: Complex64::new(0.0, 0.0),
            c: Complex64::new(0.0, 0.0),
            d: Complex64::new(0.0, 1.0),
        }
    }

    /// The standard symplectic matrix `[[0, -1], [1, 0]]`.
    pub fn symplectic_j() -> Self {
        UnimodularMatrix {
            a: Complex64::new(0.0, 0.0),
            b: Complex64::new(-1.0, 0.0),
            c: Complex64::new(1.0, 0.0),
            d: Complex64::new(0.0, 0.0),
        }
    }

    pub fn entry_a(&self) -> Complex64 {
        self.a
    }

    pub fn entry_b(&self) -> Complex64 {
        self.b
    }

    pub fn entry_c(&self) -> Complex64 {
        self.c
    }

    pub fn entry_d(&self) -> Complex64 {
        self.d
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    /// Plain matrix product. Products of unimodular matrices are unimodular,
    /// so no renormalization is applied; for long products the stored
    /// determinant can only be resolved to about `(entry scale)^2 * eps`.
    pub fn mul(&self, rhs: &UnimodularMatrix) -> UnimodularMatrix {
        UnimodularMatrix {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }

    /// Inverse of a determinant-one matrix: `[[d, -b], [-c, a]]`.
    pub fn inverse(&self) -> UnimodularMatrix {
        UnimodularMatrix {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// Largest entry modulus.
    pub fn max_entry_norm(&self) -> f64 {
        self.a
            .norm()
            .max(self.b.norm())
            .max(self.c.norm())
            .max(self.d.norm())
    }

    /// True when every entry has imaginary part at most `tol` in modulus.
    pub fn is_real(&self, tol: f64) -> bool {
        self.a.im.abs() <= tol
            && self.b.im.abs() <= tol
            && self.c.im.abs() <= tol
            && self.d.im.abs() <= tol
    }
}

/// Applies `M` to `w` as the linear fractional transformation
/// `w ↦ (aw + b)/(cw + d)`, with the usual extended-value conventions:
/// `∞ ↦ a/c` and vanishing denominators map to `∞`.
pub fn mobius_apply(m: &UnimodularMatrix, w: ExtendedComplex) -> ExtendedComplex {
    match w {
        ExtendedComplex::Infinity => {
            if m.c.norm() < POLE_THRESHOLD {
                ExtendedComplex::Infinity
            } else {
                ExtendedComplex::from(m.a / m.c)
            }
        }
        ExtendedComplex::Finite(w) => {
            let den = m.c * w + m.d;
            if den.norm() < POLE_THRESHOLD {
                ExtendedComplex::Infinity
            } else {
                ExtendedComplex::from((m.a * w + m.b) / den)
            }
        }
    }
}

/// `mobius_apply` for a finite input value.
pub fn mobius_apply_value(m: &UnimodularMatrix, w: Complex64) -> ExtendedComplex {
    mobius_apply(m, ExtendedComplex::from(w))
}

/// Hyperbolic distance in the upper half plane,
/// `γ(w, w') = arccosh(1 + |w - w'|² / (2 Im w Im w'))`.
pub fn hyperbolic_distance(w: Complex64, w_prime: Complex64) -> Result<f64> {
    if !(w.im > 0.0) || !(w_prime.im > 0.0) {
        return Err(Error::NotInUpperHalfPlane);
    }
    let arg = 1.0 + (w - w_prime).norm_sqr() / (2.0 * w.im * w_prime.im);
    Ok(arg.acosh())
}

/// The fixed logarithm branch `ln|w| + i arg(w)` with `arg(w) ∈ [0, 2π)`.
pub fn branch_log(w: Complex64) -> Result<Complex64> {
    if w.norm() == 0.0 {
        return Err(Error::LogOfZero);
    }
    let mut arg = w.im.atan2(w.re);
    if arg < 0.0 {
        arg += 2.0 * core::f64::consts::PI;
    }
    Ok(Complex64::new(w.norm().ln(), arg))
}

/// Argument clamped to `[0, π]`, for values in the closed upper half plane.
/// Tiny negative imaginary parts from rounding are projected onto the axis.
pub(crate) fn upper_arg(w: Complex64) -> f64 {
    let im = if w.im < 0.0 { 0.0 } else { w.im };
    im.atan2(w.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_close(lhs: Complex64, rhs: Complex64, tol: f64) {
        assert!(
            (lhs - rhs).norm() <= tol,
            "expected {rhs}, got {lhs} (tol {tol})"
        );
    }

    fn random_matrix(rng: &mut ChaCha8Rng) -> UnimodularMatrix {
        loop {
            let entries: [Complex64; 4] =
                core::array::from_fn(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)));
            if let Ok(m) = UnimodularMatrix::new(entries[0], entries[1], entries[2], entries[3]) {
                return m;
            }
        }
    }

    fn random_real_matrix(rng: &mut ChaCha8Rng) -> UnimodularMatrix {
        loop {
            let a = rng.gen_range(-2.0..2.0);
            let b = rng.gen_range(-2.0..2.0);
            let cc = rng.gen_range(-2.0..2.0);
            let d = rng.gen_range(-2.0..2.0);
            if a * d - b * cc > 0.1 {
                return UnimodularMatrix::from_real(a, b, cc, d).unwrap();
            }
        }
    }

    #[test]
    fn mobius_identity_fixes_points() {
        let w = ExtendedComplex::finite(c(2.0, 3.0)).unwrap();
        let out = mobius_apply(&UnimodularMatrix::identity(), w);
        assert_close(out.as_finite().unwrap(), c(2.0, 3.0), 0.0);
    }

    #[test]
    fn negator_multiplies_by_minus_one() {
        let w = ExtendedComplex::finite(c(2.0, 3.0)).unwrap();
        let out = mobius_apply(&UnimodularMatrix::negator(), w);
        assert_close(out.as_finite().unwrap(), c(-2.0, -3.0), 1e-15);
    }

    #[test]
    fn symplectic_j_fixes_i() {
        let w = ExtendedComplex::finite(c(0.0, 1.0)).unwrap();
        let out = mobius_apply(&UnimodularMatrix::symplectic_j(), w);
        assert_close(out.as_finite().unwrap(), c(0.0, 1.0), 1e-15);
    }

    #[test]
    fn mobius_extended_conventions() {
        // [[1, 0], [1, -1]] sends w = 1 to a pole and ∞ to 1.
        let m = UnimodularMatrix::from_real(1.0, 0.0, 1.0, -1.0).unwrap();
        assert!(mobius_apply_value(&m, c(1.0, 0.0)).is_infinite());
        let at_inf = mobius_apply(&m, ExtendedComplex::infinity());
        assert_close(at_inf.as_finite().unwrap(), c(1.0, 0.0), 1e-15);
    }

    #[test]
    fn mobius_composition_matches_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut checked = 0usize;
        while checked < 200 {
            let m1 = random_matrix(&mut rng);
            let m2 = random_matrix(&mut rng);
            let w = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let inner = match mobius_apply_value(&m2, w) {
                ExtendedComplex::Finite(v) if v.norm() < 1e6 => v,
                _ => continue, // too close to a pole for a meaningful comparison
            };
            let via_steps = match mobius_apply_value(&m1, inner) {
                ExtendedComplex::Finite(v) if v.norm() < 1e6 => v,
                _ => continue,
            };
            let via_product = mobius_apply_value(&m1.mul(&m2), w).as_finite().unwrap();
            let scale = 1.0 + via_steps.norm();
            assert!(
                (via_steps - via_product).norm() <= 1e-10 * scale,
                "composition mismatch: {via_steps} vs {via_product}"
            );
            checked += 1;
        }
    }

    #[test]
    fn hyperbolic_distance_known_values() {
        let i = c(0.0, 1.0);
        assert_eq!(hyperbolic_distance(i, i).unwrap(), 0.0);
        // arccosh(1.25) = ln 2, from the arccosh formula evaluated by hand.
        let d = hyperbolic_distance(i, c(0.0, 2.0)).unwrap();
        assert!((d - 0.6931471805599453).abs() < 1e-14);
        // arccosh(1.5) = ln(1.5 + sqrt(1.25))
        let d = hyperbolic_distance(i, c(1.0, 1.0)).unwrap();
        assert!((d - 0.9624236501192069).abs() < 1e-14);
    }

    #[test]
    fn hyperbolic_distance_rejects_lower_half_plane() {
        assert_eq!(
            hyperbolic_distance(c(0.0, -1.0), c(0.0, 1.0)),
            Err(Error::NotInUpperHalfPlane)
        );
        assert_eq!(
            hyperbolic_distance(c(0.0, 1.0), c(1.0, 0.0)),
            Err(Error::NotInUpperHalfPlane)
        );
    }

    #[test]
    fn hyperbolic_distance_is_a_mobius_invariant_metric() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let w1 = c(rng.gen_range(-3.0..3.0), rng.gen_range(0.05..3.0));
            let w2 = c(rng.gen_range(-3.0..3.0), rng.gen_range(0.05..3.0));
            let w3 = c(rng.gen_range(-3.0..3.0), rng.gen_range(0.05..3.0));
            let d12 = hyperbolic_distance(w1, w2).unwrap();
            let d21 = hyperbolic_distance(w2, w1).unwrap();
            assert!((d12 - d21).abs() < 1e-12);
            let d13 = hyperbolic_distance(w1, w3).unwrap();
            let d23 = hyperbolic_distance(w2, w3).unwrap();
            assert!(d13 <= d12 + d23 + 1e-10, "triangle inequality failed");

            let m = random_real_matrix(&mut rng);
            let mw1 = mobius_apply_value(&m, w1).as_finite().unwrap();
            let mw2 = mobius_apply_value(&m, w2).as_finite().unwrap();
            let dm = hyperbolic_distance(mw1, mw2).unwrap();
            assert!(
                (dm - d12).abs() <= 1e-10 * (1.0 + d12),
                "isometry failed: {dm} vs {d12}"
            );
        }
    }

    #[test]
    fn branch_log_known_values() {
        assert_close(branch_log(c(1.0, 0.0)).unwrap(), c(0.0, 0.0), 0.0);
        assert_close(
            branch_log(c(-1.0, 0.0)).unwrap(),
            c(0.0, core::f64::consts::PI),
            1e-15,
        );
        // arg(-i) = 3*pi/2 under this branch convention
        assert_close(
            branch_log(c(0.0, -1.0)).unwrap(),
            c(0.0, 1.5 * core::f64::consts::PI),
            1e-15,
        );
        assert_eq!(branch_log(c(0.0, 0.0)), Err(Error::LogOfZero));
    }

    #[test]
    fn normalization_enforces_unit_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..200 {
            let m = random_matrix(&mut rng);
            assert!((m.det() - c(1.0, 0.0)).norm() <= 1e-12);
        }
    }
}
