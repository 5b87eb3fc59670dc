//! Herglotz functions (holomorphic self-maps of the upper half plane) with
//! boundary-value extraction, Krein functions, a principal-value Hilbert
//! transform on a finite interval, and a weak-L² convergence report.

use crate::halfplane::{mobius_apply_value, upper_arg, ExtendedComplex, UnimodularMatrix};
use crate::jacobi::{self, JacobiOperator, Side};
use crate::{Error, Result};
use alloc::boxed::Box;
use alloc::vec::Vec;
use num_complex::Complex64;

/// A point mass `weight / (position - z)` of the rational variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RationalPole {
    pub position: f64,
    pub weight: f64,
}

/// An evaluable Herglotz function `F: C+ → closed C+`.
///
/// The closed-form variants cover the identity, constants in the closed
/// upper half plane, `-1/z`, and the free-Jacobi m-functions; finite
/// measures give the rational form `C + Σ w_k/(t_k - z)`; arbitrary
/// Jacobi-derived m-functions and real Möbius composites extend these.
#[derive(Debug, Clone)]
pub enum HerglotzFunction {
    Identity,
    Constant(Complex64),
    NegReciprocal,
    FreeJacobiPlus,
    FreeJacobiMinus,
    Rational {
        constant: f64,
        poles: Vec<RationalPole>,
    },
    Mobius {
        matrix: UnimodularMatrix,
        inner: Box<HerglotzFunction>,
    },
    Jacobi {
        op: JacobiOperator,
        side: Side,
    },
    Sum(Box<HerglotzFunction>, Box<HerglotzFunction>),
}

impl HerglotzFunction {
    /// A constant in the closed upper half plane.
    pub fn constant(value: Complex64) -> Result<Self> {
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::NonFinite);
        }
        if value.im < 0.0 {
            return Err(Error::NotInUpperHalfPlane);
        }
        Ok(HerglotzFunction::Constant(value))
    }

    /// `constant + Σ w_k/(t_k - z)` with positive weights.
    pub fn rational(constant: f64, poles: Vec<RationalPole>) -> Result<Self> {
        if !constant.is_finite() {
            return Err(Error::NonFinite);
        }
        for p in &poles {
            if !p.position.is_finite() || !p.weight.is_finite() {
                return Err(Error::NonFinite);
            }
            if p.weight <= 0.0 {
                return Err(Error::InvalidParameter("pole weights must be positive"));
            }
        }
        Ok(HerglotzFunction::Rational { constant, poles })
    }

    /// Composition `M ∘ F` with a real unimodular matrix, which is an
    /// automorphism of the upper half plane.
    pub fn mobius(matrix: UnimodularMatrix, inner: HerglotzFunction) -> Result<Self> {
        // A real matrix with negative determinant turns imaginary under
        // normalization and would map C+ to C-; rejecting non-real entries
        // covers that case as well.
        if !matrix.is_real(1e-10) {
            return Err(Error::NotReal);
        }
        Ok(HerglotzFunction::Mobius {
            matrix,
            inner: Box::new(inner),
        })
    }

    pub fn from_jacobi(op: JacobiOperator, side: Side) -> Self {
        HerglotzFunction::Jacobi { op, side }
    }

    pub fn sum(f: HerglotzFunction, g: HerglotzFunction) -> Self {
        HerglotzFunction::Sum(Box::new(f), Box::new(g))
    }

    /// Evaluates the function at `z` with `Im z > 0`.
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        if !(z.im > 0.0) {
            return Err(Error::NotInUpperHalfPlane);
        }
        self.evaluate_unchecked(z)
    }

    fn evaluate_unchecked(&self, z: Complex64) -> Result<Complex64> {
        match self {
            HerglotzFunction::Identity => Ok(z),
            HerglotzFunction::Constant(c) => Ok(*c),
            HerglotzFunction::NegReciprocal => Ok(-z.finv()),
            HerglotzFunction::FreeJacobiPlus => Ok(jacobi::free_m_plus(z)),
            HerglotzFunction::FreeJacobiMinus => Ok(jacobi::free_m_minus(z)),
            HerglotzFunction::Rational { constant, poles } => {
                let mut value = Complex64::new(*constant, 0.0);
                for p in poles {
                    value += p.weight / (Complex64::new(p.position, 0.0) - z);
                }
                Ok(value)
            }
            HerglotzFunction::Mobius { matrix, inner } => {
                match mobius_apply_value(matrix, inner.evaluate_unchecked(z)?) {
                    ExtendedComplex::Finite(v) => Ok(v),
                    ExtendedComplex::Infinity => Err(Error::Pole),
                }
            }
            HerglotzFunction::Jacobi { op, side } => jacobi::m_value(op, *side, z),
            HerglotzFunction::Sum(f, g) => Ok(f.evaluate_unchecked(z)? + g.evaluate_unchecked(z)?),
        }
    }
}

/// Geometric ladder `y_k = y0 * ratio^k` used to approach the real axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryLadder {
    pub y0: f64,
    pub ratio: f64,
    pub max_steps: usize,
    pub tol: f64,
}

impl Default for BoundaryLadder {
    fn default() -> Self {
        BoundaryLadder {
            y0: 1e-2,
            ratio: 0.5,
            max_steps: 24,
            tol: 1e-8,
        }
    }
}

impl BoundaryLadder {
    /// A deeper ladder for work that needs boundary values resolved to
    /// roughly `tol` in the function value.
    pub fn with_tol(tol: f64) -> Self {
        BoundaryLadder {
            y0: 1e-2,
            ratio: 0.5,
            max_steps: 48,
            tol,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.y0 > 0.0) || !self.y0.is_finite() {
            return Err(Error::InvalidParameter("ladder y0 must be positive"));
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(Error::InvalidParameter("ladder ratio must be in (0, 1)"));
        }
        if self.max_steps < 2 {
            return Err(Error::InvalidParameter("ladder needs at least 2 steps"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter("ladder tol must be positive"));
        }
        Ok(())
    }
}

/// Result of a ladder descent. Boundary values exist only almost
/// everywhere, so non-convergence is flagged rather than thrown.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryValue {
    pub value: Complex64,
    pub converged: bool,
    pub steps: usize,
}

/// Approaches `F(x + i0)` down the ladder, stopping as soon as two
/// successive rungs differ by less than `ladder.tol`.
pub fn boundary_value(f: &HerglotzFunction, x: f64, ladder: &BoundaryLadder) -> BoundaryValue {
    let mut prev: Option<Complex64> = None;
    let mut y = ladder.y0;
    for step in 0..ladder.max_steps {
        let value = match f.evaluate(Complex64::new(x, y)) {
            Ok(v) => v,
            Err(_) => {
                return BoundaryValue {
                    value: prev.unwrap_or(Complex64::new(f64::NAN, f64::NAN)),
                    converged: false,
                    steps: step,
                }
            }
        };
        if let Some(p) = prev {
            if (value - p).norm() < ladder.tol {
                return BoundaryValue {
                    value,
                    converged: true,
                    steps: step,
                };
            }
        }
        prev = Some(value);
        y *= ladder.ratio;
    }
    BoundaryValue {
        value: prev.unwrap_or(Complex64::new(f64::NAN, f64::NAN)),
        converged: false,
        steps: ladder.max_steps,
    }
}

/// Krein function value with its convergence flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KreinValue {
    pub xi: f64,
    pub converged: bool,
}

/// `ξ(x) = Im ln F(x + i0) / π` with the argument taken in `[0, π]`
/// (boundary values of a Herglotz function lie in the closed upper half
/// plane), clamped to `[0, 1]`. The value is flagged non-converged when
/// the ladder does not settle or `F` vanishes along it.
pub fn krein_xi(f: &HerglotzFunction, x: f64, ladder: &BoundaryLadder) -> KreinValue {
    let mut prev: Option<f64> = None;
    let mut y = ladder.y0;
    for _ in 0..ladder.max_steps {
        let value = match f.evaluate(Complex64::new(x, y)) {
            Ok(v) => v,
            Err(_) => {
                return KreinValue {
                    xi: prev.unwrap_or(f64::NAN),
                    converged: false,
                }
            }
        };
        if value.norm() < 1e-300 {
            return KreinValue {
                xi: prev.unwrap_or(f64::NAN),
                converged: false,
            };
        }
        let xi = (upper_arg(value) / core::f64::consts::PI).clamp(0.0, 1.0);
        if let Some(p) = prev {
            if (xi - p).abs() < ladder.tol {
                return KreinValue {
                    xi,
                    converged: true,
                };
            }
        }
        prev = Some(xi);
        y *= ladder.ratio;
    }
    KreinValue {
        xi: prev.unwrap_or(f64::NAN),
        converged: false,
    }
}

/// Krein representation data of `ln F`: `ξ` on a grid, `ζ(t) = ξ(t)/(t²+1)`,
/// and the constant `C = ln |F(i)|`.
#[derive(Debug, Clone)]
pub struct KreinRepresentation {
    pub grid: Vec<f64>,
    pub xi: Vec<f64>,
    pub zeta: Vec<f64>,
    pub constant: f64,
    pub converged: Vec<bool>,
}

impl KreinRepresentation {
    pub fn from_function(
        f: &HerglotzFunction,
        grid: Vec<f64>,
        ladder: &BoundaryLadder,
    ) -> Result<Self> {
        ladder.validate()?;
        let at_i = f.evaluate(Complex64::new(0.0, 1.0))?;
        if at_i.norm() == 0.0 {
            return Err(Error::LogOfZero);
        }
        let constant = at_i.norm().ln();
        let mut xi = Vec::with_capacity(grid.len());
        let mut zeta = Vec::with_capacity(grid.len());
        let mut converged = Vec::with_capacity(grid.len());
        for &x in &grid {
            let k = krein_xi(f, x, ladder);
            xi.push(k.xi);
            zeta.push(k.xi / (x * x + 1.0));
            converged.push(k.converged);
        }
        Ok(KreinRepresentation {
            grid,
            xi,
            zeta,
            constant,
            converged,
        })
    }
}

/// Principal-value integral `∫_A f(t)/(t - x) dt` by midpoint-offset
/// quadrature: `samples[j]` holds `f` at the cell midpoint
/// `lo + (j + 1/2) h`, and `x` must stay away from those midpoints (cell
/// edges are the intended evaluation points, so the singular node is never
/// hit). Error is O(h) for piecewise-smooth `f`.
pub fn hilbert_transform(samples: &[f64], lo: f64, hi: f64, x: f64) -> Result<f64> {
    if samples.is_empty() || !(hi > lo) {
        return Err(Error::InvalidParameter(
            "need a nonempty sample list on a proper interval",
        ));
    }
    let h = (hi - lo) / samples.len() as f64;
    let mut sum = 0.0;
    for (j, &fj) in samples.iter().enumerate() {
        let t = lo + (j as f64 + 0.5) * h;
        if (t - x).abs() < 1e-9 * h {
            return Err(Error::QuadratureNode);
        }
        sum += fj * h / (t - x);
    }
    Ok(sum)
}

/// Pairing gaps `|⟨g, ln F_n⟩ - ⟨g, ln F⟩|` on `L²(-R, R)`, one sequence per
/// test function.
#[derive(Debug, Clone)]
pub struct WeakL2Report {
    /// `gaps[t][n]` is the gap of `F_seq[n]` against the limit for testfn `t`.
    pub gaps: Vec<Vec<f64>>,
    /// Number of excluded quadrature cells per sequence member.
    pub excluded: Vec<usize>,
    pub cells: usize,
}

/// Quadrature of boundary-value logarithms against test functions.
///
/// Cells where the ladder fails for either the sequence member or the limit
/// are excluded from both sides of that member's pairing; more than 5%
/// exclusions is an error (the statement under test is almost-everywhere).
pub fn weak_l2_report(
    f_seq: &[HerglotzFunction],
    f_limit: &HerglotzFunction,
    half_width: f64,
    cells: usize,
    testfns: &[&dyn Fn(f64) -> f64],
    ladder: &BoundaryLadder,
) -> Result<WeakL2Report> {
    if f_seq.is_empty() {
        return Err(Error::InvalidParameter("empty function sequence"));
    }
    if !(half_width > 0.0) {
        return Err(Error::InvalidParameter("half width must be positive"));
    }
    if cells < 2 {
        return Err(Error::InvalidParameter("need at least 2 quadrature cells"));
    }
    ladder.validate()?;

    let h = 2.0 * half_width / cells as f64;
    let midpoints: Vec<f64> = (0..cells)
        .map(|j| -half_width + (j as f64 + 0.5) * h)
        .collect();

    let boundary_log = |f: &HerglotzFunction, x: f64| -> Option<Complex64> {
        let bv = boundary_value(f, x, ladder);
        if !bv.converged || bv.value.norm() == 0.0 {
            return None;
        }
        // Boundary values lie in the closed upper half plane, where the
        // fixed branch arg ∈ [0, 2π) coincides with arg ∈ [0, π].
        Some(Complex64::new(bv.value.norm().ln(), upper_arg(bv.value)))
    };

    let limit_logs: Vec<Option<Complex64>> = midpoints
        .iter()
        .map(|&x| boundary_log(f_limit, x))
        .collect();

    let mut gaps = alloc::vec![Vec::with_capacity(f_seq.len()); testfns.len()];
    let mut excluded_counts = Vec::with_capacity(f_seq.len());
    for f_n in f_seq {
        let member_logs: Vec<Option<Complex64>> =
            midpoints.iter().map(|&x| boundary_log(f_n, x)).collect();
        let excluded = midpoints
            .iter()
            .enumerate()
            .filter(|(j, _)| member_logs[*j].is_none() || limit_logs[*j].is_none())
            .count();
        if 20 * excluded >= cells && excluded > 0 {
            return Err(Error::ExcludedCells {
                excluded,
                total: cells,
            });
        }
        for (t, g) in testfns.iter().enumerate() {
            let mut pairing = Complex64::new(0.0, 0.0);
            for (j, &x) in midpoints.iter().enumerate() {
                if let (Some(ln_n), Some(ln_lim)) = (member_logs[j], limit_logs[j]) {
                    pairing += g(x) * (ln_n - ln_lim) * h;
                }
            }
            gaps[t].push(pairing.norm());
        }
        excluded_counts.push(excluded);
    }
    Ok(WeakL2Report {
        gaps,
        excluded: excluded_counts,
        cells,
    })
}
