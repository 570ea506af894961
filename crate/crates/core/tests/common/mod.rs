//! Brute-force references shared by the integration tests. Nothing here
//! goes through the closed forms under test: states are built from their
//! defining sums and probabilities come straight from the Born rule.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use ndeb_core::qudit::{BasisMatrix, StateVector, C64};
use ndeb_core::Dim;
use std::f64::consts::PI;

pub fn dim(n: usize) -> Dim {
    Dim::new(n).unwrap()
}

/// |l_φ⟩ from its defining sum.
pub fn phi_ket(n: usize, phi: f64, l: i64) -> DVector<C64> {
    let s = 1.0 / (n as f64).sqrt();
    DVector::from_fn(n, |k, _| {
        let theta = k as f64 * (2.0 * PI * l as f64 / n as f64 + phi);
        C64::from_polar(s, theta)
    })
}

fn omega(n: usize, k: i64) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)
}

/// N^{-1/2} Σ_k ω^{kj} |ψ*_k⟩|ψ_{k+i}⟩ in the φ-basis.
pub fn bell_ra(n: usize, phi: f64, i: usize, j: usize) -> DVector<C64> {
    let mut out = DVector::zeros(n * n);
    for k in 0..n as i64 {
        let left = phi_ket(n, phi, k).map(|z| z.conj());
        let right = phi_ket(n, phi, k + i as i64);
        out += left.kronecker(&right) * omega(n, k * j as i64);
    }
    out / C64::new((n as f64).sqrt(), 0.0)
}

/// N^{-1/2} Σ_k ω^{-kj} |ψ_k⟩|ψ*_{k+i}⟩ in the φ-basis.
pub fn bell_bc(n: usize, phi: f64, i: usize, j: usize) -> DVector<C64> {
    bell_ra(n, phi, i, j).map(|z| z.conj())
}

/// Σ_{m,n} a_{m,n} |B_{m*,n}⟩_RA ⊗ |B_{m,−n*}⟩_BC; the second factor is
/// the entrywise conjugate of the first.
pub fn cerf_state(n: usize, phi: f64, a: &DMatrix<C64>) -> DVector<C64> {
    let mut out = DVector::zeros(n.pow(4));
    for m in 0..n {
        for k in 0..n {
            let c = a[(m, k)];
            if c.norm() == 0.0 {
                continue;
            }
            out += bell_ra(n, phi, m, k).kronecker(&bell_bc(n, phi, m, k)) * c;
        }
    }
    out
}

/// Amplitude matrix of the (v, x, y) family, built entry by entry.
pub fn vxy(n: usize, v: f64, x: f64, y: f64) -> DMatrix<C64> {
    DMatrix::from_fn(n, n, |m, k| {
        C64::new(
            if m == 0 && k == 0 {
                v
            } else if k == 0 {
                x
            } else {
                y
            },
            0.0,
        )
    })
}

/// Born-rule law of measuring each slot of `psi` in its own basis; the
/// result is indexed row-major by the four outcomes.
pub fn born4(psi: &DVector<C64>, bases: [&BasisMatrix; 4]) -> Vec<f64> {
    let n = bases[0].dim().get();
    let mut out = Vec::with_capacity(n.pow(4));
    for a in 0..n as i64 {
        for b in 0..n as i64 {
            for c in 0..n as i64 {
                for d in 0..n as i64 {
                    let ket = bases[0]
                        .ket(a)
                        .kronecker(&bases[1].ket(b))
                        .kronecker(&bases[2].ket(c))
                        .kronecker(&bases[3].ket(d));
                    out.push(ket.dotc(psi).norm_sqr());
                }
            }
        }
    }
    out
}

/// Born-rule law of a two-slot state.
pub fn born2(psi: &DVector<C64>, alice: &BasisMatrix, bob: &BasisMatrix) -> Vec<f64> {
    let n = alice.dim().get();
    let mut out = Vec::with_capacity(n * n);
    for a in 0..n as i64 {
        for b in 0..n as i64 {
            out.push(alice.ket(a).kronecker(&bob.ket(b)).dotc(psi).norm_sqr());
        }
    }
    out
}

fn h(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum()
}

/// I(X;Y) of a joint law with `rows` values of X.
pub fn mutual_information(joint: &[f64], rows: usize) -> f64 {
    let cols = joint.len() / rows;
    let rm: Vec<f64> = (0..rows).map(|r| joint[r * cols..(r + 1) * cols].iter().sum()).collect();
    let cm: Vec<f64> = (0..cols).map(|c| (0..rows).map(|r| joint[r * cols + c]).sum()).collect();
    h(&rm) + h(&cm) - h(joint)
}

pub fn state(n: usize, slots: usize, amps: DVector<C64>) -> StateVector {
    StateVector::new(vec![n; slots], amps).unwrap()
}
