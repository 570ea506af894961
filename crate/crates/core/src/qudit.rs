//! Dense complex linear algebra over a handful of quNit slots, the φ-bases,
//! their conjugates, and the maximally entangled two-quNit state.
//!
//! Multi-slot objects are stored row-major over their slot order, slot 0
//! being the most significant digit. Four-slot states use the order
//! (R, A, B, C): reference (Alice), Bob's clone, Eve's clone, machine.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Square complex matrix acting on one or more slots.
pub type Operator = DMatrix<C64>;

/// Absolute tolerance for complex comparisons.
pub const TOL: f64 = 1e-12;

/// Tolerance for the positivity check on density-matrix eigenvalues.
pub const EIG_TOL: f64 = 1e-10;

/// Dimension N of a single quNit, N ≥ 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Dim(usize);

impl Dim {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        Ok(Dim(n))
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }

    /// Reduces a signed index into `0..N`.
    #[inline]
    pub fn wrap(self, i: i64) -> usize {
        i.rem_euclid(self.0 as i64) as usize
    }

    /// e^{2πi k / N}
    #[inline]
    pub fn root_of_unity(self, k: i64) -> C64 {
        let k = self.wrap(k) as f64;
        C64::from_polar(1.0, 2.0 * PI * k / self.0 as f64)
    }
}

impl TryFrom<usize> for Dim {
    type Error = Error;
    fn try_from(n: usize) -> Result<Self> {
        Dim::new(n)
    }
}

impl From<Dim> for usize {
    fn from(d: Dim) -> usize {
        d.0
    }
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Pure state over a tensor product of slots.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    dims: Vec<usize>,
    amps: DVector<C64>,
}

impl StateVector {
    pub fn new(dims: Vec<usize>, amps: DVector<C64>) -> Result<Self> {
        let expected: usize = dims.iter().product();
        if amps.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: amps.len() });
        }
        Ok(StateVector { dims, amps })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amps(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= TOL
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps.dotc(&other.amps)
    }

    /// Euclidean distance between the amplitude vectors (global phase counts).
    pub fn distance(&self, other: &StateVector) -> f64 {
        (&self.amps - &other.amps).norm()
    }

    /// True when the two states agree up to a global phase.
    pub fn same_ray(&self, other: &StateVector, tol: f64) -> bool {
        self.dims == other.dims && (self.inner(other).norm() - 1.0).abs() <= tol
    }

    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        StateVector { dims, amps: self.amps.kronecker(&other.amps) }
    }

    pub fn scale(&self, c: C64) -> StateVector {
        StateVector { dims: self.dims.clone(), amps: &self.amps * c }
    }

    /// In-place `self += c * other`.
    pub fn axpy(&mut self, c: C64, other: &StateVector) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch { expected: self.amps.len(), found: other.amps.len() });
        }
        self.amps.axpy(c, &other.amps, C64::new(1.0, 0.0));
        Ok(())
    }

    pub fn zeros(dims: Vec<usize>) -> StateVector {
        let len = dims.iter().product();
        StateVector { dims, amps: DVector::zeros(len) }
    }

    /// Projector |ψ⟩⟨ψ| as a density matrix. The state must be normalized.
    pub fn density(&self) -> DensityMatrix {
        DensityMatrix { dims: self.dims.clone(), entries: &self.amps * self.amps.adjoint() }
    }
}

/// N×N unitary whose column `j` holds the amplitudes ⟨i|ψ_j⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisMatrix {
    dim: Dim,
    u: DMatrix<C64>,
    label: String,
}

impl BasisMatrix {
    pub fn new(u: DMatrix<C64>, label: impl Into<String>) -> Result<Self> {
        if u.nrows() != u.ncols() {
            return Err(Error::DimensionMismatch { expected: u.nrows(), found: u.ncols() });
        }
        let dim = Dim::new(u.nrows())?;
        let deviation = unitarity_deviation(&u);
        if deviation > TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(BasisMatrix { dim, u, label: label.into() })
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.u
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// ⟨i|ψ_j⟩
    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.u[(i, j)]
    }

    /// Ket |ψ_l⟩ in computational coordinates; `l` is taken mod N.
    pub fn ket(&self, l: i64) -> DVector<C64> {
        self.u.column(self.dim.wrap(l)).into_owned()
    }

    pub fn unitarity_deviation(&self) -> f64 {
        unitarity_deviation(&self.u)
    }

    /// Finds `perm` with |⟨self_l | other_{perm[l]}⟩| = 1 for every column,
    /// i.e. the two bases coincide up to a relabeling and per-ket phases.
    pub fn label_permutation_to(&self, other: &BasisMatrix, tol: f64) -> Option<Vec<usize>> {
        if self.dim != other.dim {
            return None;
        }
        let n = self.dim.get();
        let overlap = self.u.adjoint() * &other.u;
        let mut perm = Vec::with_capacity(n);
        for l in 0..n {
            let hit = (0..n).find(|&k| (overlap[(l, k)].norm() - 1.0).abs() <= tol)?;
            perm.push(hit);
        }
        let mut seen = perm.clone();
        seen.sort_unstable();
        seen.dedup();
        (seen.len() == n).then_some(perm)
    }
}

/// Largest entry modulus.
pub fn max_modulus(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn unitarity_deviation(u: &DMatrix<C64>) -> f64 {
    let g = u.adjoint() * u;
    let n = g.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - C64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// Mixed state over a tensor product of slots.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    entries: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validates hermiticity, unit trace and positivity.
    pub fn new(dims: Vec<usize>, entries: DMatrix<C64>) -> Result<Self> {
        let d: usize = dims.iter().product();
        if entries.nrows() != d || entries.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: entries.nrows() });
        }
        let rho = DensityMatrix { dims, entries };
        let herm = rho.hermiticity_defect();
        if herm > TOL {
            return Err(Error::InvalidDensity(format!("not Hermitian (defect {herm:.3e})")));
        }
        let tr = rho.trace();
        if (tr - 1.0).abs() > TOL {
            return Err(Error::InvalidDensity(format!("trace {tr} != 1")));
        }
        let min_eig = rho.min_eigenvalue();
        if min_eig < -EIG_TOL {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min_eig:.3e}")));
        }
        Ok(rho)
    }

    pub(crate) fn from_parts(dims: Vec<usize>, entries: DMatrix<C64>) -> Self {
        debug_assert_eq!(entries.nrows(), dims.iter().product::<usize>());
        DensityMatrix { dims, entries }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    pub fn hermiticity_defect(&self) -> f64 {
        max_modulus(&(&self.entries - self.entries.adjoint()))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.entries + self.entries.adjoint()) * C64::new(0.5, 0.0);
        herm.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// ⟨v|ρ|v⟩ for a normalized vector `v`.
    pub fn expectation(&self, v: &DVector<C64>) -> f64 {
        v.dotc(&(&self.entries * v)).re
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        max_modulus(&(&self.entries - &other.entries))
    }
}

/// φ-basis: column `l` has entry e^{ik(2πl/N + φ)}/√N at row `k`.
pub fn phi_basis(dim: Dim, phi: f64) -> BasisMatrix {
    let n = dim.get();
    let norm = 1.0 / (n as f64).sqrt();
    let u = DMatrix::from_fn(n, n, |k, l| {
        let theta = k as f64 * (2.0 * PI * l as f64 / n as f64 + phi);
        C64::from_polar(norm, theta)
    });
    BasisMatrix { dim, u, label: format!("phi={phi}") }
}

/// Angle of the `i`-th optimal basis, φ_i = 2πi / 4N.
pub fn optimal_angle(dim: Dim, i: usize) -> f64 {
    2.0 * PI * i as f64 / (4.0 * dim.get() as f64)
}

/// One of the four optimal φ-bases, `i` in 0..=3.
pub fn optimal_basis(dim: Dim, i: usize) -> Result<BasisMatrix> {
    if i > 3 {
        return Err(Error::InvalidBasisIndex(i));
    }
    let mut b = phi_basis(dim, optimal_angle(dim, i));
    b.label = format!("optimal[{i}]");
    Ok(b)
}

/// Index of the optimal basis whose conjugate is basis `i` (as a set of rays).
/// Even bases are self-conjugate, bases 1 and 3 swap.
pub fn conjugate_partner(i: usize) -> Result<usize> {
    match i {
        0 => Ok(0),
        1 => Ok(3),
        2 => Ok(2),
        3 => Ok(1),
        _ => Err(Error::InvalidBasisIndex(i)),
    }
}

/// Alice's measurement basis for optimal-basis choice `i`.
///
/// Physically she measures in φ_i; her outcomes are labelled as the kets of
/// conj(φ_partner(i)), which span the same rays. With this labelling Alice's
/// choice `i` and Bob's choice `partner(i)` are perfectly correlated on
/// |Φ_N^+⟩.
pub fn alice_basis(dim: Dim, i: usize) -> Result<BasisMatrix> {
    let partner = conjugate_partner(i)?;
    let mut b = conjugate_basis(&optimal_basis(dim, partner)?);
    b.label = format!("alice[{i}]");
    Ok(b)
}

pub fn computational_basis(dim: Dim) -> BasisMatrix {
    BasisMatrix { dim, u: DMatrix::identity(dim.get(), dim.get()), label: "computational".into() }
}

/// Entrywise complex conjugate of a basis.
pub fn conjugate_basis(b: &BasisMatrix) -> BasisMatrix {
    BasisMatrix { dim: b.dim, u: b.u.map(|z| z.conj()), label: format!("conj({})", b.label) }
}

/// |Φ_N^+⟩ = N^{-1/2} Σ_{i=0}^{N-1} |i⟩|i⟩
pub fn max_entangled(dim: Dim) -> StateVector {
    let n = dim.get();
    let a = 1.0 / (n as f64).sqrt();
    let mut amps = DVector::zeros(n * n);
    for i in 0..n {
        amps[i * n + i] = C64::new(a, 0.0);
    }
    StateVector { dims: vec![n, n], amps }
}

/// max over (i, j) of | |⟨a_i|b_j⟩|² − 1/N |.
pub fn mutual_unbiasedness_defect(a: &BasisMatrix, b: &BasisMatrix) -> Result<f64> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch { expected: a.dim.get(), found: b.dim.get() });
    }
    let inv_n = 1.0 / a.dim.get() as f64;
    let overlap = a.u.adjoint() * &b.u;
    Ok(overlap.iter().map(|z| (z.norm_sqr() - inv_n).abs()).fold(0.0, f64::max))
}

/// Label shift |l_φ⟩ → |(l+1)_φ⟩, shared by every φ-basis: the clock
/// operator diag(e^{2πik/N}).
pub fn cyclic_shift(dim: Dim) -> Operator {
    let n = dim.get();
    let diag = DVector::from_fn(n, |k, _| dim.root_of_unity(k as i64));
    DMatrix::from_diagonal(&diag)
}

/// Label shift |ψ_l⟩ → |ψ_{l+1}⟩ for an arbitrary basis, U S U†.
pub fn basis_shift(b: &BasisMatrix) -> Operator {
    let n = b.dim.get();
    let s =
        DMatrix::from_fn(n, n, |i, j| if i == (j + 1) % n { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
    &b.u * s * b.u.adjoint()
}

/// Simultaneous label shift on a (ψ*, ψ) slot pair.
pub fn pair_shift(b: &BasisMatrix) -> Operator {
    let shift = basis_shift(b);
    shift.map(|z| z.conj()).kronecker(&shift)
}

pub fn apply(op: &Operator, state: &StateVector) -> Result<StateVector> {
    if op.ncols() != state.amps.len() {
        return Err(Error::DimensionMismatch { expected: op.ncols(), found: state.amps.len() });
    }
    Ok(StateVector { dims: state.dims.clone(), amps: op * &state.amps })
}

/// Partial trace keeping the slots listed (strictly increasing) in `keep`.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let count = rho.dims.len();
    let valid = keep.windows(2).all(|w| w[0] < w[1]) && keep.iter().all(|&s| s < count);
    if !valid {
        return Err(Error::InvalidSlots { slots: keep.to_vec(), count });
    }
    let total: usize = rho.dims.iter().product();
    let kept_dims: Vec<usize> = keep.iter().map(|&s| rho.dims[s]).collect();
    let kept_total: usize = kept_dims.iter().product();

    // Split each full index into (kept index, traced index).
    let mut kept_idx = vec![0usize; total];
    let mut traced_idx = vec![0usize; total];
    let mut digits = vec![0usize; count];
    for full in 0..total {
        let mut rest = full;
        for s in (0..count).rev() {
            digits[s] = rest % rho.dims[s];
            rest /= rho.dims[s];
        }
        let (mut k, mut t) = (0usize, 0usize);
        for (s, (&digit, &d)) in digits.iter().zip(&rho.dims).enumerate() {
            if keep.contains(&s) {
                k = k * d + digit;
            } else {
                t = t * d + digit;
            }
        }
        kept_idx[full] = k;
        traced_idx[full] = t;
    }

    let mut out = DMatrix::zeros(kept_total, kept_total);
    for i in 0..total {
        for j in 0..total {
            if traced_idx[i] == traced_idx[j] {
                out[(kept_idx[i], kept_idx[j])] += rho.entries[(i, j)];
            }
        }
    }
    Ok(DensityMatrix { dims: kept_dims, entries: out })
}
