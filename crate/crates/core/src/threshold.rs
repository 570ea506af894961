//! Security thresholds: Eve's best cloner at fixed fidelity, the fidelity
//! where her information catches up with Bob's, and the visibility below
//! which the correlations admit a local-realistic model.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cerf::CloneParams;
use crate::error::{Error, Result};
use crate::qudit::Dim;
use crate::search::{bisect, golden_section_max};
use crate::secinfo::{i_ab_from_fidelity, i_ae};

/// Points in the coarse scan over y before golden-section refinement.
pub const GRID_POINTS: usize = 2001;
/// Final bracket width of the golden-section refinement.
pub const GOLDEN_WIDTH: f64 = 1e-10;
/// Offset of the outer bisection bracket from 1/N and 1.
pub const BRACKET_MARGIN: f64 = 1e-6;
pub const BISECTION_STEPS: usize = 60;
/// Slack when comparing the nonlocality threshold against F_A.
pub const SUFFICIENCY_SLACK: f64 = 1e-6;

/// Eve's information-maximizing cloner at a fixed fidelity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EveOptimum {
    pub params: CloneParams,
    pub i_ae: f64,
    /// v² and x² before clamping at zero.
    pub raw_v_sq: f64,
    pub raw_x_sq: f64,
}

/// Largest y compatible with fidelity F.
pub fn y_max(dim: Dim, fidelity: f64) -> f64 {
    let m = dim.get() as f64 - 1.0;
    (fidelity / m).min((1.0 - fidelity) / (m * m)).max(0.0).sqrt()
}

/// The cloner with fidelity F and off-column amplitude y:
/// v² = F − (N−1)y², x² = (1−F)/(N−1) − (N−1)y².
pub fn params_on_fidelity(dim: Dim, fidelity: f64, y: f64) -> (CloneParams, f64, f64) {
    let m = dim.get() as f64 - 1.0;
    let v_sq = fidelity - m * y * y;
    let x_sq = (1.0 - fidelity) / m - m * y * y;
    let p = CloneParams { dim, v: v_sq.max(0.0).sqrt(), x: x_sq.max(0.0).sqrt(), y };
    (p, v_sq, x_sq)
}

fn check_fidelity(dim: Dim, fidelity: f64) -> Result<()> {
    let floor = 1.0 / dim.get() as f64;
    if !fidelity.is_finite() || fidelity < floor - 1e-12 || fidelity > 1.0 + 1e-12 {
        return Err(Error::InfeasibleFidelity { fidelity, dim: dim.get() });
    }
    Ok(())
}

/// Maximizes I_AE over y ∈ [0, y_max] at fixed fidelity: a uniform scan,
/// then golden-section refinement around the best scan point. Ties go to
/// the smaller y.
pub fn max_eve_info(dim: Dim, fidelity: f64) -> Result<EveOptimum> {
    check_fidelity(dim, fidelity)?;
    let fidelity = fidelity.clamp(1.0 / dim.get() as f64, 1.0);
    let top = y_max(dim, fidelity);
    let objective = |y: f64| i_ae(&params_on_fidelity(dim, fidelity, y).0);

    let step = top / (GRID_POINTS - 1) as f64;
    let (mut best_y, mut best) = (0.0, objective(0.0));
    for i in 1..GRID_POINTS {
        let y = if i == GRID_POINTS - 1 { top } else { i as f64 * step };
        let val = objective(y);
        if val > best {
            best = val;
            best_y = y;
        }
    }

    if top > 0.0 {
        let lo = (best_y - step).max(0.0);
        let hi = (best_y + step).min(top);
        let (y, val) = golden_section_max(objective, lo, hi, GOLDEN_WIDTH);
        if val > best {
            best = val;
            best_y = y;
        }
    }

    let (params, raw_v_sq, raw_x_sq) = params_on_fidelity(dim, fidelity, best_y);
    Ok(EveOptimum { params, i_ae: best, raw_v_sq, raw_x_sq })
}

/// Fidelity at which I_AB = max I_AE, with the optimal cloner there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossover {
    pub dim: Dim,
    pub fidelity: f64,
    pub optimum: EveOptimum,
    pub i_ab: f64,
}

pub fn crossover_fidelity(dim: Dim) -> Result<Crossover> {
    let lo = 1.0 / dim.get() as f64 + BRACKET_MARGIN;
    let hi = 1.0 - BRACKET_MARGIN;
    let gap = |f: f64| Ok(i_ab_from_fidelity(dim, f) - max_eve_info(dim, f)?.i_ae);
    let fidelity = bisect(gap, lo, hi, BISECTION_STEPS)?;
    let optimum = max_eve_info(dim, fidelity)?;
    Ok(Crossover { dim, fidelity, optimum, i_ab: i_ab_from_fidelity(dim, fidelity) })
}

/// Minimal two-quNit visibility for a Bell-inequality violation in the
/// optimal bases:
/// N²/V = Σ_{k=0}^{⌊N/2⌋−1} (1 − 2k/(N−1)) (csc²(π(4k+1)/4N) − csc²(π(4k+3)/4N)).
pub fn visibility_threshold(dim: Dim) -> f64 {
    let n = dim.get() as f64;
    let csc2 = |t: f64| 1.0 / t.sin().powi(2);
    let sum: f64 = (0..dim.get() / 2)
        .map(|k| {
            let k = k as f64;
            (1.0 - 2.0 * k / (n - 1.0))
                * (csc2(PI * (4.0 * k + 1.0) / (4.0 * n)) - csc2(PI * (4.0 * k + 3.0) / (4.0 * n)))
        })
        .sum();
    n * n / sum
}

/// Channel fidelity matching [`visibility_threshold`]: (N−1)/N·V + 1/N.
pub fn fidelity_threshold(dim: Dim) -> f64 {
    let n = dim.get() as f64;
    (n - 1.0) / n * visibility_threshold(dim) + 1.0 / n
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRecord {
    pub n: Dim,
    pub f_a: f64,
    pub v: f64,
    pub x: f64,
    pub y: f64,
    pub i_ab: f64,
    pub i_ae: f64,
    pub v_thr: f64,
    pub f_thr: f64,
    /// F_thr ≥ F_A: a Bell violation already implies a secure channel.
    pub secure_iff_nonlocal: bool,
}

pub fn threshold_record(dim: Dim) -> Result<ThresholdRecord> {
    let c = crossover_fidelity(dim)?;
    let f_thr = fidelity_threshold(dim);
    let p = c.optimum.params;
    Ok(ThresholdRecord {
        n: dim,
        f_a: c.fidelity,
        v: p.v,
        x: p.x,
        y: p.y,
        i_ab: c.i_ab,
        i_ae: c.optimum.i_ae,
        v_thr: visibility_threshold(dim),
        f_thr,
        secure_iff_nonlocal: f_thr >= c.fidelity - SUFFICIENCY_SLACK,
    })
}

/// One record per dimension, computed in parallel, in input order.
pub fn security_report(dims: &[Dim]) -> Result<Vec<ThresholdRecord>> {
    dims.par_iter().map(|&d| threshold_record(d)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(n: usize) -> Dim {
        Dim::new(n).unwrap()
    }

    #[test]
    fn perfect_fidelity_forces_identity() {
        let opt = max_eve_info(dim(3), 1.0).unwrap();
        assert_eq!(opt.params.v, 1.0);
        assert_eq!(opt.params.y, 0.0);
        assert!(opt.params.x.abs() < 1e-12);
        assert!(opt.i_ae.abs() < 1e-12);
    }

    #[test]
    fn infeasible_fidelity_rejected() {
        assert!(max_eve_info(dim(3), 0.2).is_err());
        assert!(max_eve_info(dim(3), 1.1).is_err());
        assert!(max_eve_info(dim(3), f64::NAN).is_err());
    }

    #[test]
    fn optimum_respects_constraints() {
        for n in 2..=6 {
            for f in [0.55, 0.7, 0.9] {
                if f < 1.0 / n as f64 {
                    continue;
                }
                let opt = max_eve_info(dim(n), f).unwrap();
                let p = opt.params;
                assert!(opt.raw_v_sq >= -1e-12 && opt.raw_x_sq >= -1e-12);
                assert!(CloneParams::new(p.dim, p.v, p.x, p.y).is_ok());
                assert!((p.fidelity() - f).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn uniform_fidelity_leaves_bob_nothing() {
        let d = dim(3);
        let opt = max_eve_info(d, 1.0 / 3.0).unwrap();
        assert!(i_ab_from_fidelity(d, 1.0 / 3.0).abs() < 1e-12);
        assert!(opt.i_ae >= 0.0);
    }

    #[test]
    fn qubit_visibility() {
        assert!((visibility_threshold(dim(2)) - 1.0 / 2f64.sqrt()).abs() < 1e-12);
        assert!((fidelity_threshold(dim(2)) - (0.5 + 1.0 / 8f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn visibility_in_unit_interval() {
        for n in 2..=16 {
            let v = visibility_threshold(dim(n));
            assert!(v > 0.0 && v < 1.0, "N={n}: {v}");
        }
    }

    #[test]
    fn report_preserves_order() {
        let dims = [dim(4), dim(2), dim(3)];
        let rows = security_report(&dims).unwrap();
        let ns: Vec<usize> = rows.iter().map(|r| r.n.get()).collect();
        assert_eq!(ns, vec![4, 2, 3]);
    }
}
