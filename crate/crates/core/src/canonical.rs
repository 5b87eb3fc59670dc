//! Piecewise-constant trace-normed canonical systems `Ju' = zHu` and their
//! transfer matrices in closed form, the J-inner inequality
//! `-i (T*JT - J) ≥ 0`, and the sampled Herglotz-family test equivalent
//! to it.
//!
//! Only piecewise-constant coefficients are supported: the matrix
//! exponential of each segment is exact (via `(JH)² = -det(H) I`), so the
//! J-inner certification carries no ODE discretization error.

use crate::halfplane::{mobius_apply_value, ExtendedComplex, UnimodularMatrix};
use crate::{Error, Result};
use alloc::vec::Vec;
use num_complex::Complex64;

/// One segment: a length and a trace-normed positive-semidefinite
/// symmetric coefficient matrix. `h22` is stored as `1 - h11`, so the
/// trace is one exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    length: f64,
    h11: f64,
    h12: f64,
    h22: f64,
}

impl Segment {
    pub fn new(length: f64, h11: f64, h12: f64, h22: f64) -> Result<Self> {
        if !length.is_finite() || !h11.is_finite() || !h12.is_finite() || !h22.is_finite() {
            return Err(Error::NonFinite);
        }
        if !(length > 0.0) {
            return Err(Error::InvalidParameter("segment length must be positive"));
        }
        if (h11 + h22 - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter("segment trace must equal 1"));
        }
        let h22 = 1.0 - h11;
        let det = h11 * h22 - h12 * h12;
        // trace-normed symmetric: eigenvalues are (1 ± sqrt(1 - 4 det))/2
        let min_eig = 0.5 * (1.0 - (1.0 - 4.0 * det).max(0.0).sqrt());
        if min_eig < -1e-12 {
            return Err(Error::InvalidParameter(
                "segment matrix must be positive semidefinite",
            ));
        }
        Ok(Segment {
            length,
            h11,
            h12,
            h22,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn h11(&self) -> f64 {
        self.h11
    }

    pub fn h12(&self) -> f64 {
        self.h12
    }

    pub fn h22(&self) -> f64 {
        self.h22
    }

    pub fn det_h(&self) -> f64 {
        (self.h11 * self.h22 - self.h12 * self.h12).max(0.0)
    }
}

/// A finite ordered list of segments.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CanonicalSystem {
    segments: Vec<Segment>,
}

impl CanonicalSystem {
    pub fn new(segments: Vec<Segment>) -> Self {
        CanonicalSystem { segments }
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn total_length(&self) -> f64 {
        self.segments.iter().map(|s| s.length).sum()
    }

    /// Concatenation: `self` first, then `other`.
    pub fn concat(&self, other: &CanonicalSystem) -> CanonicalSystem {
        let mut segments = self.segments.clone();
        segments.extend_from_slice(&other.segments);
        CanonicalSystem { segments }
    }
}

/// `sin(phi)/phi` with a series branch near zero to avoid cancellation.
fn sinc(phi: Complex64) -> Complex64 {
    if phi.norm() < 1e-4 {
        let p2 = phi * phi;
        Complex64::new(1.0, 0.0) - p2 / 6.0 + p2 * p2 / 120.0
    } else {
        phi.sin() / phi
    }
}

/// Exact transfer factor `exp(-z l JH)` of one constant segment. With
/// `d = det H ∈ [0, 1/4]` this is
/// `cos(sqrt(d) z l) I - z l sinc(sqrt(d) z l) JH`.
fn segment_transfer(seg: &Segment, z: Complex64) -> UnimodularMatrix {
    let zl = z * seg.length;
    let sd = seg.det_h().sqrt();
    let phi = zl * sd;
    let cos = phi.cos();
    let s = zl * sinc(phi);
    // JH = [[-h12, -h22], [h11, h12]]
    UnimodularMatrix::new(
        cos + s * seg.h12,
        s * seg.h22,
        -s * seg.h11,
        cos - s * seg.h12,
    )
    .expect("segment transfer is unimodular")
}

/// Transfer matrix of the whole system at `z`: the ordered product of the
/// segment factors, the later segment multiplying on the left. `T(0)` is
/// the identity.
pub fn transfer(cs: &CanonicalSystem, z: Complex64) -> UnimodularMatrix {
    let mut acc = UnimodularMatrix::identity();
    for seg in &cs.segments {
        acc = segment_transfer(seg, z).mul(&acc);
    }
    acc
}

/// Smallest eigenvalue of the Hermitian matrix `-i (T*JT - J)`; a
/// nonnegative value (within rounding) certifies the J-inner property at
/// the point where `T` was evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JInnerDefect {
    pub min_eig: f64,
}

/// Evaluates the J-inner defect of a matrix (meaningful for transfer
/// matrices evaluated at a point of the open upper half plane).
pub fn j_inner_defect(t: &UnimodularMatrix) -> JInnerDefect {
    let (a, b, c, d) = (t.entry_a(), t.entry_b(), t.entry_c(), t.entry_d());
    // J T = [[-c, -d], [a, b]]
    // X = -i (T* (J T) - J), with T* the conjugate transpose
    let i = Complex64::new(0.0, 1.0);
    let one = Complex64::new(1.0, 0.0);
    let x11 = -i * (a.conj() * (-c) + c.conj() * a);
    let x12 = -i * (a.conj() * (-d) + c.conj() * b + one);
    let x21 = -i * (b.conj() * (-c) + d.conj() * a - one);
    let x22 = -i * (b.conj() * (-d) + d.conj() * b);
    // symmetrize to kill rounding asymmetry before extracting eigenvalues
    let p = 0.5 * (x11 + x11.conj());
    let r = 0.5 * (x22 + x22.conj());
    let q = 0.5 * (x12 + x21.conj());
    let mid = 0.5 * (p.re + r.re);
    let rad = (0.25 * (p.re - r.re) * (p.re - r.re) + q.norm_sqr()).sqrt();
    JInnerDefect { min_eig: mid - rad }
}

/// Result of sampling `Im(T(z) w) > 0` over a product grid.
#[derive(Debug, Clone, Copy)]
pub struct FamilyCheck {
    pub passes: bool,
    /// Largest observed value of `-Im(T(z) w)`.
    pub worst_violation: f64,
    pub worst_z: Complex64,
    pub worst_w: Complex64,
}

/// Samples whether `w ↦ T(z) w` maps the upper half plane into itself for
/// every sampled `z`; passing means no violation beyond `1e-12`.
pub fn herglotz_family_check<F>(
    rule: F,
    z_samples: &[Complex64],
    w_samples: &[Complex64],
) -> FamilyCheck
where
    F: Fn(Complex64) -> UnimodularMatrix,
{
    let mut worst = f64::NEG_INFINITY;
    let mut worst_z = Complex64::new(0.0, 0.0);
    let mut worst_w = Complex64::new(0.0, 0.0);
    for &z in z_samples {
        let t = rule(z);
        for &w in w_samples {
            let violation = match mobius_apply_value(&t, w) {
                ExtendedComplex::Finite(v) => -v.im,
                // a pole inside the upper half plane is a maximal violation
                ExtendedComplex::Infinity => f64::INFINITY,
            };
            if violation > worst {
                worst = violation;
                worst_z = z;
                worst_w = w;
            }
        }
    }
    FamilyCheck {
        passes: worst <= 1e-12,
        worst_violation: worst,
        worst_z,
        worst_w,
    }
}

/// Splits a matrix family as `T(z) = A T_0(z)` with `A = T(0)` real and
/// `T_0(0) = 1`. Returns the constant factor and the normalized family.
pub fn factor_at_zero<F>(
    rule: F,
) -> Result<(UnimodularMatrix, impl Fn(Complex64) -> UnimodularMatrix)>
where
    F: Fn(Complex64) -> UnimodularMatrix,
{
    let a = rule(Complex64::new(0.0, 0.0));
    if !a.is_real(1e-10) {
        return Err(Error::NotReal);
    }
    let a_inv = a.inverse();
    Ok((a, move |z| a_inv.mul(&rule(z))))
}
