//! Shannon quantities of the attacked channel: Alice–Bob and Alice–Eve
//! mutual information in bits.
//!
//! Eve measures her clone in Bob's basis and the machine slot in its
//! conjugate. Her outcome pair reveals the branch m (Bob's error shift)
//! exactly, and within a branch her clone symbol l estimates Alice's symbol
//! with the shift law returned by [`eve_conditional`].

use serde::{Deserialize, Serialize};

use crate::cerf::{AmplitudeMatrix, CloneParams};
use crate::error::{Error, Result};
use crate::qudit::{Dim, C64};

/// Tolerance on Σp = 1.
pub const DIST_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbDist(Vec<f64>);

impl ProbDist {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidDistribution("empty".into()));
        }
        if let Some(bad) = p.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidDistribution(format!("entry {bad} is not a probability")));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > DIST_TOL {
            return Err(Error::InvalidDistribution(format!("sums to {total}")));
        }
        Ok(ProbDist(p))
    }

    pub fn uniform(len: usize) -> Self {
        ProbDist(vec![1.0 / len as f64; len])
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Mutual-information summary for one cloner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfoPoint {
    pub dim: Dim,
    pub fidelity: f64,
    pub i_ab: f64,
    pub i_ae: f64,
}

/// −Σ p log₂ p, with 0·log 0 = 0.
pub fn entropy(d: &ProbDist) -> f64 {
    entropy_bits(d.probs())
}

pub(crate) fn entropy_bits(p: &[f64]) -> f64 {
    -p.iter().filter(|&&v| v > 0.0).map(|&v| v * v.log2()).sum::<f64>()
}

/// I_AB for a symmetric channel with fidelity `fidelity` and N−1 equal
/// disturbances.
pub fn i_ab_from_fidelity(dim: Dim, fidelity: f64) -> f64 {
    let n = dim.get() as f64;
    let d = (1.0 - fidelity) / (n - 1.0);
    n.log2() + xlog2x(fidelity) + (n - 1.0) * xlog2x(d)
}

fn xlog2x(p: f64) -> f64 {
    if p > 0.0 {
        p * p.log2()
    } else {
        0.0
    }
}

pub fn i_ab(p: &CloneParams) -> f64 {
    let n = p.dim.get() as f64;
    n.log2() + xlog2x(p.fidelity()) + (n - 1.0) * xlog2x(p.disturbance())
}

/// Law of d = k' − k, the offset between Alice's symbol and Eve's clone
/// symbol, within branch `m`, for an arbitrary amplitude matrix.
pub fn eve_conditional_matrix(a: &AmplitudeMatrix, m: usize) -> Result<ProbDist> {
    let dim = a.dim();
    let n = dim.get();
    if m >= n {
        return Err(Error::BellIndexOutOfRange { m, n: 0, dim: n });
    }
    let weight = a.branch_weight(m);
    if weight <= 0.0 {
        return Err(Error::ZeroBranch { branch: m });
    }
    let p = (0..n as i64)
        .map(|d| {
            let s: C64 = (0..n).map(|col| a.get(m, col) * dim.root_of_unity(d * col as i64)).sum();
            s.norm_sqr() / (n as f64 * weight)
        })
        .collect();
    ProbDist::new(p)
}

/// Closed-form [`eve_conditional_matrix`] for the (v, x, y) family.
pub fn eve_conditional(p: &CloneParams, m: usize) -> Result<ProbDist> {
    let n = p.dim.get();
    if m >= n {
        return Err(Error::BellIndexOutOfRange { m, n: 0, dim: n });
    }
    let lead = if m == 0 { p.v } else { p.x };
    match branch_law(n, lead, p.y) {
        Some((same, other)) => {
            let mut probs = vec![other; n];
            probs[0] = same;
            ProbDist::new(probs)
        }
        None => Err(Error::ZeroBranch { branch: m }),
    }
}

/// (p_0, p_{d≠0}) for a row (lead, y, …, y); None if the row is empty.
fn branch_law(n: usize, lead: f64, y: f64) -> Option<(f64, f64)> {
    let nf = n as f64;
    let weight = lead * lead + (nf - 1.0) * y * y;
    if weight <= 0.0 {
        return None;
    }
    let same = (lead + (nf - 1.0) * y).powi(2) / (nf * weight);
    let other = (lead - y).powi(2) / (nf * weight);
    Some((same, other))
}

fn branch_entropy(n: usize, same: f64, other: f64) -> f64 {
    -(xlog2x(same) + (n as f64 - 1.0) * xlog2x(other))
}

/// I_AE = log₂N − Σ_m P_m H(eve_conditional(m)); empty branches are skipped.
pub fn i_ae(p: &CloneParams) -> f64 {
    let n = p.dim.get();
    let nf = n as f64;
    let mut lost = 0.0;
    if let Some((s, o)) = branch_law(n, p.v, p.y) {
        lost += p.fidelity() * branch_entropy(n, s, o);
    }
    if let Some((s, o)) = branch_law(n, p.x, p.y) {
        lost += (nf - 1.0) * p.disturbance() * branch_entropy(n, s, o);
    }
    nf.log2() - lost
}

/// [`i_ae`] for an arbitrary (possibly complex) amplitude matrix.
pub fn i_ae_matrix(a: &AmplitudeMatrix) -> f64 {
    let n = a.dim().get();
    let lost: f64 = (0..n)
        .filter_map(|m| {
            let w = a.branch_weight(m);
            eve_conditional_matrix(a, m).ok().map(|d| w * entropy(&d))
        })
        .sum();
    (n as f64).log2() - lost
}

/// I_AB for an arbitrary amplitude matrix (disturbances need not be equal).
pub fn i_ab_matrix(a: &AmplitudeMatrix) -> f64 {
    let n = a.dim().get();
    let weights: Vec<f64> = (0..n).map(|m| a.branch_weight(m)).collect();
    (n as f64).log2() - entropy_bits(&weights)
}

pub fn info_point(p: &CloneParams) -> InfoPoint {
    InfoPoint { dim: p.dim, fidelity: p.fidelity(), i_ab: i_ab(p), i_ae: i_ae(p) }
}

/// Plug-in mutual information of a joint count or probability table
/// (rows: Alice, columns: Bob). Returns None for an all-zero table.
pub fn plugin_mutual_information(table: &[f64], rows: usize, cols: usize) -> Option<f64> {
    let total: f64 = table.iter().sum();
    if total <= 0.0 {
        return None;
    }
    let joint: Vec<f64> = table.iter().map(|c| c / total).collect();
    let row_marg: Vec<f64> = (0..rows).map(|r| joint[r * cols..(r + 1) * cols].iter().sum()).collect();
    let col_marg: Vec<f64> = (0..cols).map(|c| (0..rows).map(|r| joint[r * cols + c]).sum()).collect();
    let mi = entropy_bits(&row_marg) + entropy_bits(&col_marg) - entropy_bits(&joint);
    Some(mi.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cerf::params_to_matrix;
    use nalgebra::DMatrix;

    fn dim(n: usize) -> Dim {
        Dim::new(n).unwrap()
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&ProbDist::new(vec![1.0, 0.0, 0.0]).unwrap()), 0.0);
        for n in [2, 3, 7] {
            assert!((entropy(&ProbDist::uniform(n)) - (n as f64).log2()).abs() < 1e-12);
        }
        assert!((entropy(&ProbDist::new(vec![0.5, 0.25, 0.25]).unwrap()) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn prob_dist_validation() {
        assert!(ProbDist::new(vec![]).is_err());
        assert!(ProbDist::new(vec![0.5, 0.6]).is_err());
        assert!(ProbDist::new(vec![1.5, -0.5]).is_err());
        assert!(ProbDist::new(vec![f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn i_ab_limits() {
        for n in [2, 3, 5] {
            let d = dim(n);
            assert!((i_ab(&CloneParams::identity(d)) - (n as f64).log2()).abs() < 1e-12);
            let u = 1.0 / n as f64;
            assert!(i_ab(&CloneParams::new(d, u, u, u).unwrap()).abs() < 1e-12);
            assert!(i_ab_from_fidelity(d, u).abs() < 1e-12);
        }
    }

    #[test]
    fn i_ab_qubit_table_point() {
        let f: f64 = 0.853553;
        let h = -(f * f.log2() + (1.0 - f) * (1.0 - f).log2());
        let got = i_ab_from_fidelity(dim(2), f);
        assert!((got - (1.0 - h)).abs() < 1e-12);
        assert!((got - 0.399).abs() < 1e-3);
    }

    #[test]
    fn eve_conditional_flat_when_y_zero() {
        let p = CloneParams::normalized(dim(4), 0.9, 0.2, 0.0).unwrap();
        for m in 0..4 {
            let d = eve_conditional(&p, m).unwrap();
            assert!(d.probs().iter().all(|v| (v - 0.25).abs() < 1e-12));
        }
        let id = eve_conditional(&CloneParams::identity(dim(3)), 0).unwrap();
        assert!(id.probs().iter().all(|v| (v - 1.0 / 3.0).abs() < 1e-12));
        assert_eq!(eve_conditional(&CloneParams::identity(dim(3)), 1), Err(Error::ZeroBranch { branch: 1 }));
    }

    #[test]
    fn closed_form_matches_matrix_route() {
        for n in [2, 3, 5] {
            let p = CloneParams::normalized(dim(n), 0.8, 0.3, 0.12).unwrap();
            let a = params_to_matrix(&p);
            for m in 0..n {
                let c = eve_conditional(&p, m).unwrap();
                let g = eve_conditional_matrix(&a, m).unwrap();
                for (x, y) in c.probs().iter().zip(g.probs()) {
                    assert!((x - y).abs() < 1e-12);
                }
                let sum: f64 = g.probs().iter().sum();
                assert!((sum - 1.0).abs() < 1e-12);
            }
            assert!((i_ae(&p) - i_ae_matrix(&a)).abs() < 1e-12);
            assert!((i_ab(&p) - i_ab_matrix(&a)).abs() < 1e-12);
        }
    }

    #[test]
    fn i_ae_zero_cases() {
        assert!(i_ae(&CloneParams::identity(dim(3))).abs() < 1e-12);
        let p = CloneParams::normalized(dim(3), 0.6, 0.4, 0.0).unwrap();
        assert!(i_ae(&p).abs() < 1e-12);
    }

    #[test]
    fn complex_matrix_conditional_sums_to_one() {
        let a = AmplitudeMatrix::normalized(DMatrix::from_fn(3, 3, |i, j| {
            C64::new(0.3 + i as f64, 0.7 * j as f64 - 0.4)
        }))
        .unwrap();
        for m in 0..3 {
            let d = eve_conditional_matrix(&a, m).unwrap();
            assert!((d.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn plugin_mi_cases() {
        let diag = [0.5, 0.0, 0.0, 0.5];
        assert!((plugin_mutual_information(&diag, 2, 2).unwrap() - 1.0).abs() < 1e-12);
        let flat = [7.0; 9];
        assert!(plugin_mutual_information(&flat, 3, 3).unwrap().abs() < 1e-12);
        assert!(plugin_mutual_information(&[0.0; 4], 2, 2).is_none());
    }
}
