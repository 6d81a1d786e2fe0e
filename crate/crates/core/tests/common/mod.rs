//! Dense reference model shared by the integration tests: the Hamiltonian
//! assembled from Kronecker products on `atom₁ ⊗ atom₂ ⊗ mode₁ ⊗ mode₂`
//! and a Taylor scaling-and-squaring matrix exponential.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, Matrix4};
use num_complex::Complex64;

use coupled_cavities::ModelParams;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Per-mode Fock dimension `d` gives index `atoms·d² + n1·d + n2`, with the
/// atomic order `{ee, eg, ge, gg}`.
pub struct DenseModel {
    pub fock: usize,
    pub h: DMatrix<f64>,
}

fn kron_all(ops: &[&DMatrix<f64>]) -> DMatrix<f64> {
    let mut out = DMatrix::from_element(1, 1, 1.0);
    for op in ops {
        out = out.kronecker(op);
    }
    out
}

impl DenseModel {
    pub fn new(p: &ModelParams, fock: usize) -> Self {
        // atom basis {e, g}
        let sigma_plus = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let id2 = DMatrix::<f64>::identity(2, 2);
        let idf = DMatrix::<f64>::identity(fock, fock);
        let mut a = DMatrix::<f64>::zeros(fock, fock);
        for n in 1..fock {
            a[(n - 1, n)] = (n as f64).sqrt();
        }
        let num = a.transpose() * &a;

        let n1 = kron_all(&[&id2, &id2, &num, &idf]);
        let n2 = kron_all(&[&id2, &id2, &idf, &num]);
        let a1 = kron_all(&[&id2, &id2, &a, &idf]);
        let a2 = kron_all(&[&id2, &id2, &idf, &a]);
        let s1 = kron_all(&[&sigma_plus, &id2, &idf, &idf]);
        let s2 = kron_all(&[&id2, &sigma_plus, &idf, &idf]);

        let jc1 = &s1 * &a1;
        let jc2 = &s2 * &a2;
        let hop = a1.transpose() * &a2;
        let h = n1 * p.delta1
            + n2 * p.delta2
            + (&jc1 + jc1.transpose()) * p.g1
            + (&jc2 + jc2.transpose()) * p.g2
            + (&hop + hop.transpose()) * p.hopping;
        Self { fock, h }
    }

    pub fn dim(&self) -> usize {
        self.h.nrows()
    }

    pub fn index(&self, atoms: usize, n1: usize, n2: usize) -> usize {
        (atoms * self.fock + n1) * self.fock + n2
    }

    /// Total excitation of each basis index.
    pub fn excitation(&self, i: usize) -> usize {
        let d = self.fock;
        let atoms = i / (d * d);
        let excited = [2, 1, 1, 0][atoms];
        excited + (i / d) % d + i % d
    }

    /// `|atoms⟩|n1, n2⟩` with the atomic amplitudes over `{ee, eg, ge, gg}`.
    pub fn product_state(&self, amps: &[Complex64; 4], n1: usize, n2: usize) -> DVector<Complex64> {
        let mut v = DVector::zeros(self.dim());
        for (k, a) in amps.iter().enumerate() {
            v[self.index(k, n1, n2)] = *a;
        }
        v
    }

    pub fn propagator(&self, t: f64) -> DMatrix<Complex64> {
        let generator = self.h.map(|x| Complex64::new(0.0, -x * t));
        expm(&generator)
    }

    /// `Tr_fields |ψ⟩⟨ψ|`.
    pub fn reduce(&self, psi: &DVector<Complex64>) -> Matrix4<Complex64> {
        let block = self.fock * self.fock;
        let mut rho = Matrix4::zeros();
        for a in 0..4 {
            for b in 0..4 {
                let mut acc = c(0.0);
                for f in 0..block {
                    acc += psi[a * block + f] * psi[b * block + f].conj();
                }
                rho[(a, b)] = acc;
            }
        }
        rho
    }
}

/// `exp(m)` by scaling and squaring with a degree-24 Taylor series.
pub fn expm(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let norm = m
        .row_iter()
        .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as i32
    } else {
        0
    };
    let scaled = m / c(2f64.powi(squarings));
    let n = m.nrows();
    let mut result = DMatrix::<Complex64>::identity(n, n);
    let mut term = DMatrix::<Complex64>::identity(n, n);
    for k in 1..=24 {
        term = &term * &scaled / c(k as f64);
        result += &term;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

pub fn max_entry_diff(a: &Matrix4<Complex64>, b: &Matrix4<Complex64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
