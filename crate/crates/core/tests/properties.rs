mod common;

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix2, Matrix4};
use num_complex::Complex64;
use proptest::prelude::*;

use common::{c, max_entry_diff, DenseModel};
use coupled_cavities::entanglement::{mean_photon, partial_trace_fields};
use coupled_cavities::hilbert::{enumerate_subspace, BasisState, Level};
use coupled_cavities::model::build_hamiltonian_block;
use coupled_cavities::{
    concurrence, concurrence_general, simulate, AtomicDensity, AtomicInitialState, Exec, FullDensity, FullSpace,
    ModelParams, TimeGrid, UnitaryOptions,
};

fn params() -> impl Strategy<Value = ModelParams> {
    (0.0..3.0, 0.0..3.0, -20.0..20.0, -20.0..20.0, -30.0..30.0).prop_map(|(g1, g2, d1, d2, j)| ModelParams {
        g1,
        g2,
        delta1: d1,
        delta2: d2,
        hopping: j,
        n_bar1: 0.0,
        n_bar2: 0.0,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn sector_blocks_are_hermitian(p in params(), n in 0u32..8) {
        let block = build_hamiltonian_block(&p, &enumerate_subspace(n));
        prop_assert!(block.hermiticity_defect() <= 1e-12);
    }

    #[test]
    fn dense_hamiltonian_conserves_excitation(p in params()) {
        let dense = DenseModel::new(&p, 5);
        for i in 0..dense.dim() {
            for j in 0..dense.dim() {
                if dense.h[(i, j)] != 0.0 {
                    prop_assert_eq!(dense.excitation(i), dense.excitation(j));
                }
            }
        }
    }

    #[test]
    fn concurrence_is_local_unitary_invariant(seed in 0u64..1000, t1 in 0.0..PI, p1 in 0.0..2.0 * PI, t2 in 0.0..PI, p2 in 0.0..2.0 * PI) {
        let rho = random_density(seed);
        let u = |theta: f64, phi: f64| {
            let (s, co) = (theta / 2.0).sin_cos();
            let e = Complex64::from_polar(1.0, phi);
            Matrix2::new(c(co), -e.conj() * s, e * s, c(co))
        };
        let (a, b) = (u(t1, p1), u(t2, p2));
        let local = Matrix4::from_fn(|i, j| a[(i / 2, j / 2)] * b[(i % 2, j % 2)]);
        let rotated = local * rho.matrix() * local.adjoint();
        let before = concurrence_general(&rho).unwrap();
        let after = concurrence_general(&AtomicDensity::from_matrix(rotated)).unwrap();
        prop_assert!((before - after).abs() <= 1e-10);
    }
}

/// A full-rank random density matrix `M M† / Tr`.
fn random_density(seed: u64) -> AtomicDensity {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let m = Matrix4::from_fn(|_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    let rho = m * m.adjoint();
    let tr = rho.trace();
    AtomicDensity::from_matrix(rho / tr)
}

#[test]
fn partial_trace_of_products() {
    // |e₁g₂⟩ ⊗ |1,0⟩ mixed with |g₁e₂⟩ ⊗ |0,2⟩ leaves a diagonal atomic state
    let space = FullSpace::new(3);
    let dim = space.dim();
    let mut m = DMatrix::zeros(dim, dim);
    let i = space
        .index_of(&BasisState::new(Level::Excited, Level::Ground, 1, 0))
        .unwrap();
    let j = space
        .index_of(&BasisState::new(Level::Ground, Level::Excited, 0, 2))
        .unwrap();
    m[(i, i)] = c(0.25);
    m[(j, j)] = c(0.75);
    m[(i, j)] = c(0.4);
    m[(j, i)] = c(0.4);
    let rho = FullDensity::from_matrix(space.clone(), m).unwrap();
    let reduced = partial_trace_fields(&rho);
    // the coherence sits between orthogonal field states, so it is traced away
    let expected = AtomicDensity::x_state(0.0, 0.25, 0.75, 0.0, c(0.0), c(0.0));
    assert!(max_entry_diff(reduced.matrix(), expected.matrix()) < 1e-15);
    assert!((mean_photon(&rho, 0) - 0.25).abs() < 1e-15);
    assert!((mean_photon(&rho, 1) - 1.5).abs() < 1e-15);
}

#[test]
fn partial_trace_keeps_shared_field_coherence() {
    // (|e₁g₂⟩ + |g₁e₂⟩)/√2 ⊗ |2,1⟩
    let space = FullSpace::new(3);
    let dim = space.dim();
    let i = space
        .index_of(&BasisState::new(Level::Excited, Level::Ground, 2, 1))
        .unwrap();
    let j = space
        .index_of(&BasisState::new(Level::Ground, Level::Excited, 2, 1))
        .unwrap();
    let mut m = DMatrix::zeros(dim, dim);
    for a in [i, j] {
        for b in [i, j] {
            m[(a, b)] = c(0.5);
        }
    }
    let rho = FullDensity::from_matrix(space, m).unwrap();
    let reduced = partial_trace_fields(&rho);
    assert!((concurrence(&reduced).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn thermal_product_reduces_to_the_atomic_state() {
    for atoms in AtomicInitialState::ALL {
        let (rho, _) = FullDensity::thermal_product(FullSpace::new(6), atoms, 0.7, 0.3).unwrap();
        let reduced = partial_trace_fields(&rho);
        let expected = AtomicDensity::pure(atoms.amplitudes());
        assert!(max_entry_diff(reduced.matrix(), expected.matrix()) < 1e-14, "{atoms}");
    }
}

#[test]
fn sequential_and_parallel_runs_agree_exactly() {
    let p = ModelParams::symmetric(4.0, 7.0, 1.0);
    let grid = TimeGrid::linspace(20.0, 64).unwrap();
    let run = |exec| {
        simulate(
            &p,
            AtomicInitialState::BellPlus,
            &grid,
            &UnitaryOptions { cutoff: None, exec },
        )
        .unwrap()
    };
    let (a, b) = (run(Exec::Sequential), run(Exec::Parallel));
    for (x, y) in a.snapshots.iter().zip(&b.snapshots) {
        assert_eq!(x.rho, y.rho);
        assert_eq!(x.mean_photon, y.mean_photon);
    }
}
