//! Generalized reflection coefficients
//! `R_+ = (conj(m_+) + m_-)/(m_+ + m_-)`, `R_- = (m_+ + conj(m_-))/(m_+ + m_-)`
//! built from a Herglotz pair, with detection of the absolutely continuous
//! spectrum (`|R| < 1`) and of reflectionless points (`R = 0`).

use crate::herglotz::{boundary_value, BoundaryLadder};
use crate::jacobi::{m_pair, toda_flow, JacobiOperator, MPair};
use crate::{Error, Result};
use alloc::vec::Vec;
use num_complex::Complex64;

/// Reflection data at one real energy.
///
/// `abs_r` is `|R_+|`; it agrees with `|R_-|` to rounding whenever the
/// denominator is nondegenerate, and never exceeds 1 beyond rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionSample {
    pub x: f64,
    pub r_plus: Complex64,
    pub r_minus: Complex64,
    pub abs_r: f64,
    pub converged: bool,
}

/// Both reflection coefficients from explicit m-function values.
pub fn reflection_from_values(
    m_plus: Complex64,
    m_minus: Complex64,
) -> Result<(Complex64, Complex64)> {
    let den = m_plus + m_minus;
    if den.norm() < 1e-14 {
        return Err(Error::DegenerateDenominator);
    }
    Ok((
        (m_plus.conj() + m_minus) / den,
        (m_plus + m_minus.conj()) / den,
    ))
}

/// Reflection coefficients of an m-pair at `z` in the open upper half plane;
/// conjugation applies to the evaluated values.
pub fn reflection_at(pair: &MPair, z: Complex64) -> Result<(Complex64, Complex64)> {
    reflection_from_values(pair.eval_plus(z)?, pair.eval_minus(z)?)
}

/// Reflection sample at a real energy, built from ladder-limited boundary
/// m-values and then combined (the m-values first: near band edges the
/// denominator can be small and laddering `R` itself is poorly conditioned).
pub fn boundary_reflection(
    pair: &MPair,
    x: f64,
    ladder: &BoundaryLadder,
) -> Result<ReflectionSample> {
    let mp = boundary_value(&pair.m_plus, x, ladder);
    let mm = boundary_value(&pair.m_minus, x, ladder);
    let (r_plus, r_minus) = reflection_from_values(mp.value, mm.value)?;
    Ok(ReflectionSample {
        x,
        r_plus,
        r_minus,
        abs_r: r_plus.norm(),
        converged: mp.converged && mm.converged,
    })
}

/// Grid mask with per-point convergence flags. The mask is a grid
/// approximation of an almost-everywhere-defined set, never a claim about
/// the exact set.
#[derive(Debug, Clone)]
pub struct GridMask {
    pub mask: Vec<bool>,
    pub converged: Vec<bool>,
    pub abs_r: Vec<f64>,
}

/// Marks grid points with `|R(x)| < 1 - epsilon` at ladder convergence;
/// non-converged points are reported separately and never marked.
pub fn sigma_ac_mask(
    op: &JacobiOperator,
    x_grid: &[f64],
    ladder: &BoundaryLadder,
    epsilon: f64,
) -> Result<GridMask> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter("epsilon must lie in (0, 1)"));
    }
    ladder.validate()?;
    let pair = m_pair(op);
    let mut mask = Vec::with_capacity(x_grid.len());
    let mut converged = Vec::with_capacity(x_grid.len());
    let mut abs_r = Vec::with_capacity(x_grid.len());
    for &x in x_grid {
        match boundary_reflection(&pair, x, ladder) {
            Ok(sample) => {
                mask.push(sample.converged && sample.abs_r < 1.0 - epsilon);
                converged.push(sample.converged);
                abs_r.push(sample.abs_r);
            }
            Err(_) => {
                mask.push(false);
                converged.push(false);
                abs_r.push(f64::NAN);
            }
        }
    }
    Ok(GridMask {
        mask,
        converged,
        abs_r,
    })
}

/// Marks grid points that satisfy both reflectionless criteria:
/// `|R(x)| < tol` and `m_+(x) = -conj(m_-(x))` within `tol (1 + |m_+|)`.
pub fn reflectionless_mask(
    op: &JacobiOperator,
    x_grid: &[f64],
    ladder: &BoundaryLadder,
    tol: f64,
) -> Result<GridMask> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tol must be positive"));
    }
    ladder.validate()?;
    let pair = m_pair(op);
    let mut mask = Vec::with_capacity(x_grid.len());
    let mut converged = Vec::with_capacity(x_grid.len());
    let mut abs_r = Vec::with_capacity(x_grid.len());
    for &x in x_grid {
        let mp = boundary_value(&pair.m_plus, x, ladder);
        let mm = boundary_value(&pair.m_minus, x, ladder);
        let ok = mp.converged && mm.converged;
        match reflection_from_values(mp.value, mm.value) {
            Ok((r_plus, _)) => {
                let pair_gap = (mp.value + mm.value.conj()).norm();
                let small_r = r_plus.norm() < tol;
                let small_pair = pair_gap < tol * (1.0 + mp.value.norm());
                mask.push(ok && small_r && small_pair);
                converged.push(ok);
                abs_r.push(r_plus.norm());
            }
            Err(_) => {
                mask.push(false);
                converged.push(false);
                abs_r.push(f64::NAN);
            }
        }
    }
    Ok(GridMask {
        mask,
        converged,
        abs_r,
    })
}

/// The unimodular factor `(c m - d)/(c conj(m) - d)` by which `R_+` changes
/// under a real transfer-matrix update of the m-functions; numerator and
/// denominator are complex conjugates, so the modulus is one.
pub fn mobius_update_factor(m: Complex64, c: f64, d: f64) -> Result<Complex64> {
    if c == 0.0 && d == 0.0 {
        return Err(Error::InvalidParameter("(c, d) must not both vanish"));
    }
    if !(m.im > 0.0) {
        return Err(Error::NotInUpperHalfPlane);
    }
    let den = c * m.conj() - d;
    if den.norm() < 1e-300 {
        return Err(Error::DegenerateDenominator);
    }
    Ok((c * m - d) / den)
}

/// A map on Jacobi operators induced by a transfer matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorMap {
    Shift(i64),
    Toda { t: f64, dt: f64 },
}

impl OperatorMap {
    pub fn apply(&self, op: &JacobiOperator) -> Result<JacobiOperator> {
        match *self {
            OperatorMap::Shift(k) => Ok(op.shift(k)),
            OperatorMap::Toda { t, dt } => toda_flow(op, t, dt),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct InvarianceRow {
    pub x: f64,
    pub abs_r_before: f64,
    pub abs_r_after: f64,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct InvarianceReport {
    pub rows: Vec<InvarianceRow>,
    /// Maximum of `||R|_after - |R|_before|` over converged rows.
    pub max_discrepancy: f64,
    pub non_converged: usize,
}

/// Compares `|R|` on the grid before and after applying `map` to the
/// operator. Non-convergence at a grid point is propagated as a flag, not
/// an error, and such points do not enter the maximum.
pub fn invariance_report(
    op: &JacobiOperator,
    map: OperatorMap,
    x_grid: &[f64],
    ladder: &BoundaryLadder,
) -> Result<InvarianceReport> {
    ladder.validate()?;
    let mapped = map.apply(op)?;
    let before = m_pair(op);
    let after = m_pair(&mapped);
    let mut rows = Vec::with_capacity(x_grid.len());
    let mut max_discrepancy = 0.0f64;
    let mut non_converged = 0usize;
    for &x in x_grid {
        let sample_before = boundary_reflection(&before, x, ladder);
        let sample_after = boundary_reflection(&after, x, ladder);
        let (abs_before, abs_after, ok) = match (&sample_before, &sample_after) {
            (Ok(sb), Ok(sa)) => (sb.abs_r, sa.abs_r, sb.converged && sa.converged),
            _ => (f64::NAN, f64::NAN, false),
        };
        if ok {
            max_discrepancy = max_discrepancy.max((abs_after - abs_before).abs());
        } else {
            non_converged += 1;
        }
        rows.push(InvarianceRow {
            x,
            abs_r_before: abs_before,
            abs_r_after: abs_after,
            converged: ok,
        });
    }
    Ok(InvarianceReport {
        rows,
        max_discrepancy,
        non_converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobi::{m_value, Side};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
        (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect()
    }

    #[test]
    fn reflection_closed_form_values() {
        // m+ = m- = i: the free operator at x = 0
        let (rp, rm) = reflection_from_values(c(0.0, 1.0), c(0.0, 1.0)).unwrap();
        assert!(rp.norm() < 1e-15 && rm.norm() < 1e-15);

        // real m-values: conjugation is the identity
        let (rp, rm) = reflection_from_values(c(0.7, 0.0), c(-0.2, 0.0)).unwrap();
        assert!((rp - c(1.0, 0.0)).norm() < 1e-14);
        assert!((rm - c(1.0, 0.0)).norm() < 1e-14);

        // free operator at z = 2i: numerator 2i over denominator 2 sqrt(2) i
        let pair = m_pair(&JacobiOperator::free());
        let (rp, _) = reflection_at(&pair, c(0.0, 2.0)).unwrap();
        assert!((rp.norm() - 0.7071067811865476).abs() < 1e-14);
    }

    #[test]
    fn reflection_rejects_degenerate_denominator() {
        assert_eq!(
            reflection_from_values(c(0.5, 0.0), c(-0.5, 1e-16)),
            Err(Error::DegenerateDenominator)
        );
    }

    #[test]
    fn moduli_agree_and_stay_below_one() {
        // with m± in the closed upper half plane the numerator modulus
        // cannot exceed the denominator modulus
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..10_000 {
            let mp = c(rng.gen_range(-5.0..5.0), rng.gen_range(0.0..4.0));
            let mm = c(rng.gen_range(-5.0..5.0), rng.gen_range(0.0..4.0));
            if let Ok((rp, rm)) = reflection_from_values(mp, mm) {
                assert!((rp.norm() - rm.norm()).abs() <= 1e-10);
                assert!(rp.norm() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn r_minus_one_identity() {
        // R_σ - 1 = 2 i g Im m_σ with g = -1/(m_+ + m_-)
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        for _ in 0..1000 {
            let mp = c(rng.gen_range(-3.0..3.0), rng.gen_range(0.01..3.0));
            let mm = c(rng.gen_range(-3.0..3.0), rng.gen_range(0.01..3.0));
            let (rp, rm) = reflection_from_values(mp, mm).unwrap();
            let g = -(mp + mm).finv();
            let two_i = c(0.0, 2.0);
            assert!((rp - c(1.0, 0.0) - two_i * g * mp.im).norm() < 1e-10);
            assert!((rm - c(1.0, 0.0) - two_i * g * mm.im).norm() < 1e-10);
        }
    }

    #[test]
    fn free_operator_masks() {
        let free = JacobiOperator::free();
        let ladder = BoundaryLadder::default();
        let inside = grid(-1.9, 1.9, 25);
        let report = sigma_ac_mask(&free, &inside, &ladder, 0.05).unwrap();
        assert!(
            report.mask.iter().all(|&m| m),
            "free operator is a.c. on (-2,2)"
        );
        let outside = grid(2.1, 3.0, 10);
        let report = sigma_ac_mask(&free, &outside, &ladder, 0.05).unwrap();
        assert!(
            report.mask.iter().all(|&m| !m),
            "no a.c. spectrum beyond ±2"
        );

        let report = reflectionless_mask(&free, &inside, &ladder, 1e-3).unwrap();
        assert!(report.mask.iter().all(|&m| m));
        // off the essential spectrum R = 1, so nothing is reflectionless
        let report = reflectionless_mask(&free, &outside, &ladder, 1e-3).unwrap();
        assert!(report.mask.iter().all(|&m| !m));
    }

    #[test]
    fn perturbed_operator_is_not_reflectionless() {
        let op = JacobiOperator::new(0, alloc::vec![1.0], alloc::vec![1.0]).unwrap();
        let ladder = BoundaryLadder::default();
        let inside = grid(-1.9, 1.9, 25);
        let report = reflectionless_mask(&op, &inside, &ladder, 1e-3).unwrap();
        assert!(report.mask.iter().any(|&m| !m));
        // a local perturbation keeps the a.c. spectrum but reflects at 0
        let pair = m_pair(&op);
        let probe = boundary_reflection(&pair, 0.0, &ladder).unwrap();
        assert!(probe.abs_r > 0.1);
        let ac = sigma_ac_mask(&op, &inside, &ladder, 0.05).unwrap();
        assert!(ac.mask.iter().all(|&m| m));
    }

    #[test]
    fn update_factor_is_unimodular() {
        // T with lower row (0, 1) leaves R untouched
        let f = mobius_update_factor(c(0.3, 0.9), 0.0, 1.0).unwrap();
        assert!((f - c(1.0, 0.0)).norm() < 1e-15);
        // m = i, c = 1, d = 0: factor i / (-i) = -1
        let f = mobius_update_factor(c(0.0, 1.0), 1.0, 0.0).unwrap();
        assert!((f + c(1.0, 0.0)).norm() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..1000 {
            let m = c(rng.gen_range(-3.0..3.0), rng.gen_range(0.01..3.0));
            let cc = rng.gen_range(-2.0..2.0);
            let d = rng.gen_range(-2.0..2.0);
            if cc == 0.0 && d == 0.0 {
                continue;
            }
            let f = mobius_update_factor(m, cc, d).unwrap();
            assert!((f.norm() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn shift_preserves_abs_r() {
        let ladder = BoundaryLadder::with_tol(1e-12);
        let xs = grid(-1.9, 1.9, 50);
        let op = JacobiOperator::new(0, alloc::vec![1.0], alloc::vec![1.0]).unwrap();
        let report = invariance_report(&op, OperatorMap::Shift(3), &xs, &ladder).unwrap();
        assert_eq!(report.non_converged, 0);
        assert!(report.max_discrepancy <= 1e-8, "{}", report.max_discrepancy);

        let report = invariance_report(&op, OperatorMap::Shift(0), &xs, &ladder).unwrap();
        assert_eq!(report.max_discrepancy, 0.0);
    }

    #[test]
    fn shift_invariance_for_random_operators() {
        let ladder = BoundaryLadder::with_tol(1e-12);
        let xs = grid(-1.9, 1.9, 50);
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        for _ in 0..20 {
            let op = crate::jacobi::tests::random_operator(&mut rng);
            let k = rng.gen_range(-5..=5);
            let report = invariance_report(&op, OperatorMap::Shift(k), &xs, &ladder).unwrap();
            assert!(
                report.max_discrepancy <= 1e-8,
                "k = {k}, discrepancy {}",
                report.max_discrepancy
            );
        }
    }

    #[test]
    fn interior_reflection_is_continuous_under_shift() {
        // off the real axis |R| is not invariant, but both routes evaluate;
        // sanity-check the interior values stay in [0, 1]
        let op = JacobiOperator::new(0, alloc::vec![1.5], alloc::vec![-0.4]).unwrap();
        let pair = m_pair(&op);
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for _ in 0..200 {
            let z = c(rng.gen_range(-3.0..3.0), rng.gen_range(0.05..2.0));
            let (rp, rm) = reflection_at(&pair, z).unwrap();
            assert!(rp.norm() <= 1.0 + 1e-12);
            assert!((rp.norm() - rm.norm()).abs() <= 1e-10);
            let mp = m_value(&op, Side::Plus, z).unwrap();
            let factor = mobius_update_factor(mp, 0.7, -0.3).unwrap();
            assert!((factor.norm() - 1.0).abs() <= 1e-12);
        }
    }
}
