//! Four-slot cloning states that are doubly diagonal in Bell bases, the
//! invariance-class solver that pins their shape across φ-bases, and the
//! statistics Alice and Bob observe under such an attack.

use nalgebra::DMatrix;
use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::bell::{bell_state, overlap_matrix, BellIndex};
use crate::error::{Error, Result};
use crate::qudit::{
    alice_basis, conjugate_partner, max_entangled, optimal_basis, partial_trace, phi_basis, BasisMatrix,
    DensityMatrix, Dim, StateVector, C64, TOL,
};

/// Overlaps above this magnitude tie two cells into one invariance class.
pub const OVERLAP_TOL: f64 = 1e-9;

/// Coefficients a_{m,n} of Σ a_{m,n} |B_{m*,n}⟩_{RA} |B_{m,-n*}⟩_{BC}.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeMatrix {
    dim: Dim,
    a: DMatrix<C64>,
}

impl AmplitudeMatrix {
    pub fn new(a: DMatrix<C64>) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::DimensionMismatch { expected: a.nrows(), found: a.ncols() });
        }
        let dim = Dim::new(a.nrows())?;
        let total: f64 = a.iter().map(|z| z.norm_sqr()).sum();
        if (total - 1.0).abs() > TOL {
            return Err(Error::NotNormalized(total));
        }
        Ok(AmplitudeMatrix { dim, a })
    }

    /// Rescales `a` to unit norm.
    pub fn normalized(a: DMatrix<C64>) -> Result<Self> {
        let norm = a.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm * norm));
        }
        Self::new(a / C64::new(norm, 0.0))
    }

    /// The cloner that leaves Alice and Bob untouched.
    pub fn identity(dim: Dim) -> Self {
        let mut a = DMatrix::zeros(dim.get(), dim.get());
        a[(0, 0)] = C64::new(1.0, 0.0);
        AmplitudeMatrix { dim, a }
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn get(&self, m: usize, n: usize) -> C64 {
        self.a[(m, n)]
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.a
    }

    /// P_m = Σ_n |a_{m,n}|², the probability that Bob's symbol is shifted by m.
    pub fn branch_weight(&self, m: usize) -> f64 {
        self.a.row(m).iter().map(|z| z.norm_sqr()).sum()
    }
}

/// The (v, x, y) cloner family:
///
/// ```text
/// v y y … y
/// x y y … y
/// ⋮
/// x y y … y
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CloneParams {
    pub dim: Dim,
    pub v: f64,
    pub x: f64,
    pub y: f64,
}

impl CloneParams {
    pub fn new(dim: Dim, v: f64, x: f64, y: f64) -> Result<Self> {
        let p = CloneParams { dim, v, x, y };
        p.validate_sign()?;
        let total = p.norm_sqr();
        if (total - 1.0).abs() > TOL {
            return Err(Error::InvalidParams(format!("v^2 + (N-1)x^2 + N(N-1)y^2 = {total}, expected 1")));
        }
        Ok(p)
    }

    /// Rescales (v, x, y) onto the normalization surface.
    pub fn normalized(dim: Dim, v: f64, x: f64, y: f64) -> Result<Self> {
        let raw = CloneParams { dim, v, x, y };
        raw.validate_sign()?;
        let total = raw.norm_sqr();
        if total == 0.0 {
            return Err(Error::InvalidParams("all parameters are zero".into()));
        }
        let s = total.sqrt();
        Ok(CloneParams { dim, v: v / s, x: x / s, y: y / s })
    }

    pub fn identity(dim: Dim) -> Self {
        CloneParams { dim, v: 1.0, x: 0.0, y: 0.0 }
    }

    fn validate_sign(&self) -> Result<()> {
        for (name, val) in [("v", self.v), ("x", self.x), ("y", self.y)] {
            if !val.is_finite() || val < 0.0 {
                return Err(Error::InvalidParams(format!("{name} = {val} must be finite and >= 0")));
            }
        }
        Ok(())
    }

    fn norm_sqr(&self) -> f64 {
        let n = self.dim.get() as f64;
        self.v * self.v + (n - 1.0) * self.x * self.x + n * (n - 1.0) * self.y * self.y
    }

    /// F = v² + (N−1)y²
    pub fn fidelity(&self) -> f64 {
        self.v * self.v + (self.dim.get() as f64 - 1.0) * self.y * self.y
    }

    /// Common value of every disturbance, x² + (N−1)y².
    pub fn disturbance(&self) -> f64 {
        self.x * self.x + (self.dim.get() as f64 - 1.0) * self.y * self.y
    }
}

pub fn params_to_matrix(p: &CloneParams) -> AmplitudeMatrix {
    let n = p.dim.get();
    let a = DMatrix::from_fn(n, n, |m, col| {
        let val = match (m, col) {
            (0, 0) => p.v,
            (_, 0) => p.x,
            _ => p.y,
        };
        C64::new(val, 0.0)
    });
    AmplitudeMatrix { dim: p.dim, a }
}

/// Σ_{m,n} a_{m,n} |B^ψ_{m*,n}⟩_{RA} ⊗ |B^ψ_{m,−n*}⟩_{BC}, slot order (R, A, B, C).
pub fn build_cerf_state(b: &BasisMatrix, a: &AmplitudeMatrix) -> Result<StateVector> {
    let dim = b.dim();
    if dim != a.dim {
        return Err(Error::DimensionMismatch { expected: dim.get(), found: a.dim.get() });
    }
    let n = dim.get();
    let mut out = StateVector::zeros(vec![n; 4]);
    for m in 0..n {
        for k in 0..n {
            let coeff = a.a[(m, k)];
            if coeff == C64::new(0.0, 0.0) {
                continue;
            }
            let ra = bell_state(b, BellIndex::ra(dim, m, k)?)?;
            let bc = bell_state(b, BellIndex::bc(dim, m, k)?)?;
            out.axpy(coeff, &ra.tensor(&bc))?;
        }
    }
    Ok(out)
}

/// Partition of the N² cells (m, n) into groups forced to share a coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassPartition {
    pub dim: Dim,
    pub classes: Vec<Vec<(usize, usize)>>,
}

impl ClassPartition {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class_of(&self, m: usize, n: usize) -> Option<usize> {
        self.classes.iter().position(|c| c.contains(&(m, n)))
    }

    /// True when `a` takes a single value on each class.
    pub fn is_constant_on(&self, a: &AmplitudeMatrix, tol: f64) -> bool {
        self.classes.iter().all(|class| {
            let (m0, n0) = class[0];
            class.iter().all(|&(m, n)| (a.get(m, n) - a.get(m0, n0)).norm() <= tol)
        })
    }

    /// The shape where (0,0) and each (m,0), m ≥ 1, stand alone and each
    /// column n ≥ 1 forms one class.
    pub fn has_column_pattern(&self) -> bool {
        let n = self.dim.get();
        let mut expected: Vec<Vec<(usize, usize)>> = (0..n).map(|m| vec![(m, 0)]).collect();
        expected.extend((1..n).map(|col| (0..n).map(|m| (m, col)).collect()));
        expected.sort();
        expected == self.classes
    }
}

/// Ties (i, j) ~ (k, l) whenever the Bell overlap between any two of the
/// given φ-bases is nonzero.
pub fn invariance_classes(dim: Dim, phis: &[f64]) -> Result<ClassPartition> {
    if phis.is_empty() {
        return Err(Error::InvalidParams("at least one angle is required".into()));
    }
    let n = dim.get();
    let mut uf = UnionFind::<usize>::new(n * n);
    for (s, &p1) in phis.iter().enumerate() {
        for &p2 in &phis[s..] {
            let v = overlap_matrix(dim, p1, p2);
            for (row, col) in (0..n * n).flat_map(|r| (0..n * n).map(move |c| (r, c))) {
                if v.entries()[(row, col)].norm() > OVERLAP_TOL {
                    uf.union(row, col);
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<(usize, usize)>> = Default::default();
    for cell in 0..n * n {
        groups.entry(uf.find(cell)).or_default().push((cell / n, cell % n));
    }
    let mut classes: Vec<_> = groups.into_values().collect();
    classes.sort();
    Ok(ClassPartition { dim, classes })
}

/// Bob's fidelity and the N−1 disturbances D_i (shift by i).
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorProfile {
    pub fidelity: f64,
    pub disturbances: Vec<f64>,
}

pub fn fidelity_disturbances(a: &AmplitudeMatrix) -> ErrorProfile {
    let n = a.dim.get();
    ErrorProfile { fidelity: a.branch_weight(0), disturbances: (1..n).map(|m| a.branch_weight(m)).collect() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReducedMode {
    PartialTrace,
    ClosedForm,
}

/// Alice-Bob state after discarding Eve's slots.
pub fn reduced_state_ra(p: &CloneParams, mode: ReducedMode) -> Result<DensityMatrix> {
    let dim = p.dim;
    let n = dim.get();
    match mode {
        ReducedMode::PartialTrace => {
            let psi = build_cerf_state(&phi_basis(dim, 0.0), &params_to_matrix(p))?;
            partial_trace(&psi.density(), &[0, 1])
        }
        ReducedMode::ClosedForm => {
            let (v2, x2, y2) = (p.v * p.v, p.x * p.x, p.y * p.y);
            let phi = max_entangled(dim).density();
            let mut rho = phi.entries() * C64::new(v2 - x2, 0.0);
            for i in 0..n * n {
                rho[(i, i)] += C64::new(y2, 0.0);
            }
            // (x² − y²) Σ_n |nn⟩⟨nn|
            for k in 0..n {
                rho[(k * n + k, k * n + k)] += C64::new(x2 - y2, 0.0);
            }
            Ok(DensityMatrix::from_parts(vec![n, n], rho))
        }
    }
}

/// Unbiased-noise weight F_N = 1 − (v² − x²) of the Werner state that the
/// attack imitates in the optimal bases.
pub fn werner_noise_fraction(p: &CloneParams) -> f64 {
    1.0 - (p.v * p.v - p.x * p.x)
}

/// (1 − F_N)|Φ_N^+⟩⟨Φ_N^+| + F_N · I/N²
pub fn werner_state(dim: Dim, noise: f64) -> DensityMatrix {
    let n = dim.get();
    let mut rho = max_entangled(dim).density().entries() * C64::new(1.0 - noise, 0.0);
    for i in 0..n * n {
        rho[(i, i)] += C64::new(noise / (n * n) as f64, 0.0);
    }
    DensityMatrix::from_parts(vec![n, n], rho)
}

/// Joint outcome probabilities, rows indexed by Alice's symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointTable {
    pub dim: Dim,
    pub probs: Vec<f64>,
}

impl JointTable {
    pub fn get(&self, alice: usize, bob: usize) -> f64 {
        self.probs[alice * self.dim.get() + bob]
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn max_abs_diff(&self, other: &JointTable) -> f64 {
        self.probs.iter().zip(&other.probs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// Born-rule table of a two-slot state measured in `alice` ⊗ `bob`.
pub fn joint_table(rho: &DensityMatrix, alice: &BasisMatrix, bob: &BasisMatrix) -> Result<JointTable> {
    let dim = alice.dim();
    let n = dim.get();
    if bob.dim() != dim || rho.dims() != [n, n] {
        return Err(Error::DimensionMismatch { expected: n, found: bob.dim().get() });
    }
    let mut probs = Vec::with_capacity(n * n);
    for k in 0..n as i64 {
        for l in 0..n as i64 {
            let ket = alice.ket(k).kronecker(&bob.ket(l));
            probs.push(rho.expectation(&ket));
        }
    }
    Ok(JointTable { dim, probs })
}

/// True for the four (Alice, Bob) optimal-basis pairs that are perfectly
/// correlated on |Φ_N^+⟩.
pub fn is_conjugate_pair(alice: usize, bob: usize) -> bool {
    conjugate_partner(alice).map(|p| p == bob).unwrap_or(false)
}

/// Outcome table of Alice (optimal basis `alice_idx`, see
/// [`alice_basis`]) and Bob (optimal basis `bob_idx`) under the attack.
pub fn joint_distribution(p: &CloneParams, alice_idx: usize, bob_idx: usize) -> Result<JointTable> {
    let alice = alice_basis(p.dim, alice_idx)?;
    let bob = optimal_basis(p.dim, bob_idx)?;
    let rho = reduced_state_ra(p, ReducedMode::ClosedForm)?;
    joint_table(&rho, &alice, &bob)
}

/// Law of a sifted round: probability of (Alice k, Bob k+m, Eve B l, Eve C l+m)
/// stored at `(k*N + m)*N + l`, equal to |Σ_n a_{m,n} e^{2πi(k−l)n/N}|² / N².
/// Outcomes with Bob ≠ Alice + m or C ≠ B + m have probability zero.
pub fn sifted_outcome_law(a: &AmplitudeMatrix) -> Vec<f64> {
    let dim = a.dim;
    let n = dim.get();
    let mut out = Vec::with_capacity(n * n * n);
    for k in 0..n as i64 {
        for m in 0..n {
            for l in 0..n as i64 {
                let amp: C64 =
                    (0..n).map(|col| a.a[(m, col)] * dim.root_of_unity((k - l) * col as i64)).sum();
                out.push(amp.norm_sqr() / (n * n) as f64);
            }
        }
    }
    out
}
