//! Weyl disks: images of the upper half plane under products
//! `P_n(z) = T_n(z) ··· T_1(z)` of upper-half-plane self-maps, their
//! hyperbolic diameters `R_n(z)`, and the shrinkage dichotomy observed at
//! finite truncation order.
//!
//! The module never claims anything about the infinite product: it reports
//! raw diameters, and a mixed shrink verdict is "inconclusive at N".

use crate::halfplane::{mobius_apply, ExtendedComplex, UnimodularMatrix};
use crate::{Error, Result};
use alloc::vec::Vec;
use num_complex::Complex64;

/// Default relative base for the touching classification; the effective
/// tolerance is `touch_tol * (1 + |center|)` because products drift in scale.
pub const DEFAULT_TOUCH_TOL: f64 = 1e-9;

/// Image of the upper half plane under a Möbius transformation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DiskDescriptor {
    /// A disk whose closure stays inside the open upper half plane.
    Proper { center: Complex64, radius: f64 },
    /// A disk that touches the real line within tolerance.
    Touching { center: Complex64, radius: f64 },
    /// A half plane; the boundary line passes through `point` along the
    /// unit `direction`, and the region lies to the left of the direction.
    HalfPlane {
        point: Complex64,
        direction: Complex64,
    },
}

/// Computes the image of the upper half plane under `m`: the circle through
/// the probe images `M(0)`, `M(1)`, `M(∞)` (a line when they are collinear,
/// giving a half plane), oriented to select the image of `C+`.
///
/// The circle is evaluated in closed form from the matrix entries: with
/// `u = Im(c̄ d)` the circumcircle through the probe images has center
/// `(b c̄ - a d̄)/(2iu)` and radius `1/(2|u|)`, and the image of `C+` is the
/// inside exactly when `u > 0` (the pole lies in the lower half plane).
/// This keeps strongly contracted products well conditioned.
pub fn image_disk(m: &UnimodularMatrix, touch_tol: f64) -> Result<DiskDescriptor> {
    // An LFT has at most one real pole, so at least three of these four
    // probes have finite images.
    let probes = [
        ExtendedComplex::finite(Complex64::new(0.0, 0.0)).unwrap(),
        ExtendedComplex::finite(Complex64::new(1.0, 0.0)).unwrap(),
        ExtendedComplex::infinity(),
        ExtendedComplex::finite(Complex64::new(-1.0, 0.0)).unwrap(),
    ];
    let mut finite: Vec<Complex64> = Vec::with_capacity(4);
    let mut hit_infinity = false;
    for probe in probes {
        match mobius_apply(m, probe) {
            ExtendedComplex::Finite(v) => finite.push(v),
            ExtendedComplex::Infinity => hit_infinity = true,
        }
    }
    if !hit_infinity {
        let mut gap = 0.0f64;
        for i in 0..finite.len() {
            for j in i + 1..finite.len() {
                gap = gap.max((finite[i] - finite[j]).norm());
            }
        }
        if gap < 1e-13 {
            return Err(Error::CoincidentPoints);
        }
    }
    let interior = match mobius_apply(
        m,
        ExtendedComplex::finite(Complex64::new(0.0, 1.0)).unwrap(),
    ) {
        ExtendedComplex::Finite(v) => v,
        // a pole inside C+ means the image wraps through infinity
        ExtendedComplex::Infinity => return Err(Error::NotADisk),
    };

    let u = (m.entry_c().conj() * m.entry_d()).im;
    let scale = m.max_entry_norm();
    if hit_infinity || u.abs() <= 1e-14 * scale * scale {
        // pole on the extended real line: the boundary is a straight line
        let (p, q) = farthest_pair(&finite);
        return half_plane_through(p, q, interior);
    }
    if u < 0.0 {
        // pole in the upper half plane: the image is the exterior region
        return Err(Error::NotADisk);
    }

    let center = (m.entry_b() * m.entry_c().conj() - m.entry_a() * m.entry_d().conj())
        * Complex64::new(0.0, -0.5 / u);
    let radius = 0.5 / u;
    let touch = touch_tol * (1.0 + center.norm());
    if center.im - radius < touch {
        Ok(DiskDescriptor::Touching { center, radius })
    } else {
        Ok(DiskDescriptor::Proper { center, radius })
    }
}

fn cross(u: Complex64, v: Complex64) -> f64 {
    u.re * v.im - u.im * v.re
}

fn farthest_pair(points: &[Complex64]) -> (Complex64, Complex64) {
    let mut best = (points[0], points[1]);
    let mut best_gap = -1.0f64;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let gap = (points[i] - points[j]).norm();
            if gap > best_gap {
                best_gap = gap;
                best = (points[i], points[j]);
            }
        }
    }
    best
}

fn half_plane_through(p: Complex64, q: Complex64, interior: Complex64) -> Result<DiskDescriptor> {
    let chord = q - p;
    if chord.norm() < 1e-13 {
        return Err(Error::CoincidentPoints);
    }
    let mut direction = chord / chord.norm();
    // orient so the interior point lies to the left
    if cross(direction, interior - p) < 0.0 {
        direction = -direction;
    }
    Ok(DiskDescriptor::HalfPlane {
        point: p,
        direction,
    })
}

/// Hyperbolic diameter of an image region. For a proper disk with center
/// `c` and radius `r` the vertical Euclidean diameter is a hyperbolic
/// geodesic realizing the diameter, giving `ln((Im c + r)/(Im c - r))`;
/// anything touching the real line, and any half plane, is infinite.
pub fn hyperbolic_diameter(disk: &DiskDescriptor) -> f64 {
    match disk {
        DiskDescriptor::Proper { center, radius } => {
            let gap = center.im - radius;
            if gap <= 0.0 {
                f64::INFINITY
            } else {
                (2.0 * radius / gap).ln_1p()
            }
        }
        DiskDescriptor::Touching { .. } | DiskDescriptor::HalfPlane { .. } => f64::INFINITY,
    }
}

/// Hyperbolic diameters `R_n` of the running products `T_n ··· T_1` built
/// from `factors` (already evaluated at a fixed `z`). The sequence is
/// non-increasing up to rounding. Prefixes whose probe images have
/// collapsed below coordinate resolution count as diameter zero.
pub fn prefix_diameters(factors: &[UnimodularMatrix], touch_tol: f64) -> Result<Vec<f64>> {
    let mut diameters = Vec::with_capacity(factors.len());
    let mut product = UnimodularMatrix::identity();
    for factor in factors {
        product = factor.mul(&product);
        let scale = product.max_entry_norm();
        let det_error = (product.det() - Complex64::new(1.0, 0.0)).norm();
        // the determinant of a large product is only resolvable to
        // (entry scale)^2 * eps
        if det_error > 1e-8 * (1.0 + scale * scale) {
            return Err(Error::UnimodularityLost { det_error });
        }
        let diameter = match image_disk(&product, touch_tol) {
            Ok(disk) => hyperbolic_diameter(&disk),
            Err(Error::CoincidentPoints) => 0.0,
            Err(e) => return Err(e),
        };
        diameters.push(diameter);
    }
    Ok(diameters)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DichotomyVerdict {
    AllShrink,
    NoneShrink,
    /// Mixed result at this truncation order; not a counterexample, just
    /// not resolved at finite N.
    Inconclusive,
}

#[derive(Debug, Clone, Copy)]
pub struct DichotomyPoint {
    pub z: Complex64,
    pub final_diameter: f64,
    pub shrinks: bool,
}

#[derive(Debug, Clone)]
pub struct DichotomyReport {
    pub points: Vec<DichotomyPoint>,
    pub verdict: DichotomyVerdict,
    pub order: usize,
}

/// Evaluates the factor family at each grid point, runs the prefix
/// diameters to order `n`, and classifies each point by whether `R_n`
/// dropped below `shrink_tol`.
pub fn classify_dichotomy<F>(
    factory: F,
    z_grid: &[Complex64],
    n: usize,
    shrink_tol: f64,
) -> Result<DichotomyReport>
where
    F: Fn(usize, Complex64) -> UnimodularMatrix,
{
    if n < 2 {
        return Err(Error::InvalidParameter("need at least two factors"));
    }
    if z_grid.is_empty() {
        return Err(Error::InvalidParameter("empty z grid"));
    }
    let mut points = Vec::with_capacity(z_grid.len());
    for &z in z_grid {
        let factors: Vec<UnimodularMatrix> = (0..n).map(|j| factory(j, z)).collect();
        let diameters = prefix_diameters(&factors, DEFAULT_TOUCH_TOL)?;
        let final_diameter = *diameters.last().unwrap();
        points.push(DichotomyPoint {
            z,
            final_diameter,
            shrinks: final_diameter < shrink_tol,
        });
    }
    let all = points.iter().all(|p| p.shrinks);
    let none = points.iter().all(|p| !p.shrinks);
    let verdict = if all {
        DichotomyVerdict::AllShrink
    } else if none {
        DichotomyVerdict::NoneShrink
    } else {
        DichotomyVerdict::Inconclusive
    };
    Ok(DichotomyReport {
        points,
        verdict,
        order: n,
    })
}
