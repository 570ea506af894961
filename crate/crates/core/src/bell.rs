//! Generalized Bell states built on an arbitrary basis, and their overlaps
//! between φ-bases of different phase.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qudit::{max_modulus, phi_basis, BasisMatrix, Dim, StateVector, C64, TOL};

/// Which of the two Bell families a label refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellVariant {
    /// `B_{m*,n}` on (R, A): N^{-1/2} Σ_k e^{+2πikn/N} |ψ*_k⟩|ψ_{k+m}⟩.
    Ra,
    /// `B_{m,-n*}` on (B, C): N^{-1/2} Σ_k e^{-2πikn/N} |ψ_k⟩|ψ*_{k+m}⟩.
    Bc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BellIndex {
    pub m: usize,
    pub n: usize,
    pub variant: BellVariant,
}

impl BellIndex {
    pub fn new(dim: Dim, m: usize, n: usize, variant: BellVariant) -> Result<Self> {
        if m >= dim.get() || n >= dim.get() {
            return Err(Error::BellIndexOutOfRange { m, n, dim: dim.get() });
        }
        Ok(BellIndex { m, n, variant })
    }

    pub fn ra(dim: Dim, m: usize, n: usize) -> Result<Self> {
        Self::new(dim, m, n, BellVariant::Ra)
    }

    pub fn bc(dim: Dim, m: usize, n: usize) -> Result<Self> {
        Self::new(dim, m, n, BellVariant::Bc)
    }

    /// Position of `(m, n)` in the row-major N² enumeration.
    pub fn flat(&self, dim: Dim) -> usize {
        self.m * dim.get() + self.n
    }
}

fn check_index(dim: Dim, idx: &BellIndex) -> Result<()> {
    if idx.m >= dim.get() || idx.n >= dim.get() {
        return Err(Error::BellIndexOutOfRange { m: idx.m, n: idx.n, dim: dim.get() });
    }
    Ok(())
}

/// Two-slot Bell state over basis `b`.
pub fn bell_state(b: &BasisMatrix, idx: BellIndex) -> Result<StateVector> {
    let dim = b.dim();
    check_index(dim, &idx)?;
    let n = dim.get();
    let norm = C64::new(1.0 / (n as f64).sqrt(), 0.0);
    let mut amps = DVector::zeros(n * n);
    for k in 0..n as i64 {
        let shifted = b.ket(k + idx.m as i64);
        let own = b.ket(k);
        let (first, second, phase) = match idx.variant {
            BellVariant::Ra => (own.map(|z| z.conj()), shifted, dim.root_of_unity(k * idx.n as i64)),
            BellVariant::Bc => (own, shifted.map(|z| z.conj()), dim.root_of_unity(-k * idx.n as i64)),
        };
        amps += first.kronecker(&second) * (phase * norm);
    }
    StateVector::new(vec![n, n], amps)
}

/// How [`bell_overlap`] is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OverlapMode {
    ClosedForm,
    BruteForce,
}

/// ⟨B^{φ1}_a | B^{φ2}_b⟩ between Bell states of two φ-bases.
///
/// Both labels must share a variant. For `Ra` the closed form is
/// (1/N) δ_{j,l} Σ_{p−q≡j} e^{i(−pΔ + q(Δ + 2π(k−i)/N))} with Δ = φ2 − φ1;
/// `Bc` states are the entrywise conjugates of `Ra` states, so their
/// overlap is the conjugate.
pub fn bell_overlap(
    dim: Dim,
    phi1: f64,
    phi2: f64,
    a: BellIndex,
    b: BellIndex,
    mode: OverlapMode,
) -> Result<C64> {
    if a.variant != b.variant {
        return Err(Error::VariantMismatch);
    }
    check_index(dim, &a)?;
    check_index(dim, &b)?;
    match mode {
        OverlapMode::BruteForce => {
            let left = bell_state(&phi_basis(dim, phi1), a)?;
            let right = bell_state(&phi_basis(dim, phi2), b)?;
            Ok(left.inner(&right))
        }
        OverlapMode::ClosedForm => {
            let z = closed_form_ra(dim, phi2 - phi1, a.m, a.n, b.m, b.n);
            Ok(match a.variant {
                BellVariant::Ra => z,
                BellVariant::Bc => z.conj(),
            })
        }
    }
}

fn closed_form_ra(dim: Dim, delta: f64, i: usize, j: usize, k: usize, l: usize) -> C64 {
    if j != l {
        return C64::new(0.0, 0.0);
    }
    let n = dim.get();
    let step = 2.0 * std::f64::consts::PI * (k as f64 - i as f64) / n as f64;
    let sum: C64 = (0..n)
        .map(|p| {
            let q = dim.wrap(p as i64 - j as i64);
            C64::from_polar(1.0, -(p as f64) * delta + q as f64 * (delta + step))
        })
        .sum();
    sum / n as f64
}

/// N²×N² matrix 𝒱 with rows/columns enumerated as `m*N + n`.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapMatrix {
    dim: Dim,
    entries: DMatrix<C64>,
}

impl OverlapMatrix {
    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    /// 𝒱_{i,j;k,l}
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> C64 {
        let n = self.dim.get();
        self.entries[(i * n + j, k * n + l)]
    }

    pub fn unitarity_deviation(&self) -> f64 {
        let g = self.entries.adjoint() * &self.entries;
        max_modulus(&(g - DMatrix::identity(self.entries.nrows(), self.entries.ncols())))
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_deviation() <= TOL
    }
}

/// Closed-form overlap matrix between the `Ra` Bell bases of two φ-bases.
pub fn overlap_matrix(dim: Dim, phi1: f64, phi2: f64) -> OverlapMatrix {
    let n = dim.get();
    let delta = phi2 - phi1;
    let entries = DMatrix::from_fn(n * n, n * n, |row, col| {
        closed_form_ra(dim, delta, row / n, row % n, col / n, col % n)
    });
    OverlapMatrix { dim, entries }
}
