//! Semicontinuity of `|R|` under operator limits: the experiment harness
//! comparing the limit operator's reflection against the tail supremum of
//! a transform-generated sequence, plus the planar geometry used in the
//! underlying argument (ray-circle intersection radii and convexity of the
//! logarithmic image of a disk).

use crate::halfplane::branch_log;
use crate::herglotz::BoundaryLadder;
use crate::jacobi::{m_pair, weak_convergence_check, JacobiOperator, MPair};
use crate::reflection::{boundary_reflection, OperatorMap};
use crate::{Error, Result};
use alloc::vec::Vec;
use num_complex::Complex64;
use rand_core::{RngCore, SeedableRng};

/// Radii at which the ray `t e^{iφ}`, `t ≥ 0`, meets the circle
/// `{z - 1 : |z| = c}`, for `φ ∈ (π/2, 3π/2)`:
/// `ρ_{0,1} = -cos φ ∓ sqrt(c² - sin²φ)`, returned as `(ρ_0, ρ_1)` with
/// `ρ_0 ≤ ρ_1`. The ray misses the circle when `|sin φ| > c`.
pub fn ray_circle_intersections(phi: f64, c: f64) -> Result<(f64, f64)> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::InvalidParameter("c must lie in (0, 1)"));
    }
    let half_pi = core::f64::consts::FRAC_PI_2;
    if !(phi > half_pi && phi < 3.0 * half_pi) {
        return Err(Error::InvalidParameter("phi must lie in (pi/2, 3pi/2)"));
    }
    let s = phi.sin();
    if s.abs() > c {
        return Err(Error::RayMissesCircle);
    }
    let root = (c * c - s * s).max(0.0).sqrt();
    let rho0 = (-phi.cos() - root).max(0.0);
    let rho1 = -phi.cos() + root;
    Ok((rho0, rho1))
}

/// Membership in the logarithmic image of the disk `|z| ≤ c` under
/// `z ↦ ln(z - 1)`: true iff `|exp(w) + 1| ≤ c`.
pub fn log_disk_contains(w: Complex64, c: f64) -> bool {
    (w.exp() + Complex64::new(1.0, 0.0)).norm() <= c
}

/// Samples pairs in the logarithmic disk image and measures midpoint
/// membership. Returns the worst positive excess `|exp(mid) + 1| - c`
/// observed (0 when every midpoint is inside, as convexity demands).
pub fn convexity_probe(c: f64, trials: u32, seed: u64) -> Result<f64> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::InvalidParameter("c must lie in (0, 1)"));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut unit = move || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    let mut sample = move || loop {
        let re = (2.0 * unit() - 1.0) * c;
        let im = (2.0 * unit() - 1.0) * c;
        let z = Complex64::new(re, im);
        if z.norm() <= c {
            // z - 1 lies in the left half plane, so the fixed log branch
            // lands in the strip Im w ∈ (π/2, 3π/2)
            return branch_log(z - Complex64::new(1.0, 0.0)).unwrap();
        }
    };
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let w1 = sample();
        let w2 = sample();
        let mid = (w1 + w2) / 2.0;
        let excess = (mid.exp() + Complex64::new(1.0, 0.0)).norm() - c;
        worst = worst.max(excess);
    }
    Ok(worst)
}

/// An operator sequence generated by a transform schedule, its claimed
/// limit, and the grid/ladder/tolerance data for the semicontinuity check.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub base: JacobiOperator,
    pub schedule: Vec<OperatorMap>,
    pub limit: JacobiOperator,
    pub x_grid: Vec<f64>,
    pub ladder: BoundaryLadder,
    /// Index into the generated sequence `H_1, H_2, …` (0-based) from which
    /// the tail supremum is taken; must precede the end of the schedule.
    pub tail_start: usize,
    pub tolerance: f64,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.schedule.is_empty() {
            return Err(Error::InvalidParameter("schedule must be nonempty"));
        }
        if self.tail_start >= self.schedule.len() {
            return Err(Error::InvalidParameter(
                "tail_start must be less than the schedule length",
            ));
        }
        if self.x_grid.is_empty() {
            return Err(Error::InvalidParameter("x grid must be nonempty"));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidParameter("tolerance must be positive"));
        }
        self.ladder.validate()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SemicontRow {
    pub x: f64,
    pub tail_sup_abs_r: f64,
    pub limit_abs_r: f64,
    pub violation: bool,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct SemicontReport {
    pub rows: Vec<SemicontRow>,
    pub violations: usize,
    pub non_converged: usize,
    /// Margin used for the derived inclusion check on the set where the
    /// tail supremum stays below `1 - epsilon`.
    pub epsilon: f64,
    pub sigma_ac_inclusion_ok: bool,
    /// m-function gap between the last generated operator and the claimed
    /// limit, measured on a fixed interior grid.
    pub convergence_gap: f64,
    /// Set when `convergence_gap` exceeds ten times the tolerance.
    pub convergence_warning: bool,
}

const INCLUSION_EPSILON: f64 = 0.05;

fn convergence_probe_grid() -> [Complex64; 5] {
    [
        Complex64::new(-1.5, 0.8),
        Complex64::new(-0.5, 0.6),
        Complex64::new(0.0, 0.9),
        Complex64::new(0.7, 0.6),
        Complex64::new(1.5, 0.8),
    ]
}

/// Runs the semicontinuity experiment: generates `H_1, H_2, …` by applying
/// the schedule, takes per-energy tail suprema of `|R|` from `tail_start`
/// on, and flags any grid point where the limit operator's `|R|` exceeds
/// the tail supremum beyond the tolerance.
///
/// The tail maximum stands in for the limsup; for transfer-matrix
/// schedules `|R|` is constant along the sequence so any tail works.
/// Aborts when more than 10% of the grid fails ladder convergence.
pub fn run_semicontinuity(spec: &ExperimentSpec) -> Result<SemicontReport> {
    spec.validate()?;

    let mut sequence = Vec::with_capacity(spec.schedule.len() + 1);
    sequence.push(spec.base.clone());
    for step in &spec.schedule {
        let next = step.apply(sequence.last().unwrap())?;
        sequence.push(next);
    }

    let convergence_gap = weak_convergence_check(
        &sequence[sequence.len() - 1..],
        &spec.limit,
        &convergence_probe_grid(),
    )?[0];
    let convergence_warning = convergence_gap > 10.0 * spec.tolerance;

    let tail_pairs: Vec<MPair> = sequence[spec.tail_start..].iter().map(m_pair).collect();
    let limit_pair = m_pair(&spec.limit);

    let mut rows = Vec::with_capacity(spec.x_grid.len());
    let mut violations = 0usize;
    let mut non_converged = 0usize;
    let mut inclusion_ok = true;
    for &x in &spec.x_grid {
        let mut tail_sup = f64::NEG_INFINITY;
        let mut ok = true;
        for pair in &tail_pairs {
            match boundary_reflection(pair, x, &spec.ladder) {
                Ok(sample) => {
                    tail_sup = tail_sup.max(sample.abs_r);
                    ok &= sample.converged;
                }
                Err(_) => ok = false,
            }
        }
        let limit_abs_r = match boundary_reflection(&limit_pair, x, &spec.ladder) {
            Ok(sample) => {
                ok &= sample.converged;
                sample.abs_r
            }
            Err(_) => {
                ok = false;
                f64::NAN
            }
        };
        let violation = ok && limit_abs_r > tail_sup + spec.tolerance;
        if violation {
            violations += 1;
        }
        if !ok {
            non_converged += 1;
        }
        if ok && tail_sup < 1.0 - INCLUSION_EPSILON {
            inclusion_ok &= limit_abs_r < 1.0 - INCLUSION_EPSILON + spec.tolerance;
        }
        rows.push(SemicontRow {
            x,
            tail_sup_abs_r: tail_sup,
            limit_abs_r,
            violation,
            converged: ok,
        });
    }

    if 10 * non_converged > spec.x_grid.len() {
        return Err(Error::LadderFailure {
            failed: non_converged,
            total: spec.x_grid.len(),
        });
    }

    Ok(SemicontReport {
        rows,
        violations,
        non_converged,
        epsilon: INCLUSION_EPSILON,
        sigma_ac_inclusion_ok: inclusion_ok,
        convergence_gap,
        convergence_warning,
    })
}
