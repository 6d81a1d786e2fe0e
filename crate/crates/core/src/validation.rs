//! Self-checks run by `cavsim validate`: agreement with closed forms and the
//! structural invariants of both engines.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::entanglement::{concurrence, concurrence_general, concurrence_x, AtomicDensity};
use crate::error::Result;
use crate::evolution::{simulate, TimeGrid, UnitaryOptions};
use crate::exec::Exec;
use crate::hilbert::enumerate_subspace;
use crate::lindblad::{integrate_reduced, DissipationParams, FullDensity, FullSpace, IntegratorOptions, Liouvillian};
use crate::model::{build_delocalized_block, build_hamiltonian_block, effective_params, ModelParams};
use crate::oracle::effective_concurrence_eg;
use crate::states::AtomicInitialState;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, value: f64, bound: f64, what: &str) -> Check {
    Check {
        name,
        passed: value <= bound,
        detail: format!("{what} {value:.3e} (bound {bound:.0e})"),
    }
}

fn random_x_state(rng: &mut ChaCha8Rng) -> AtomicDensity {
    let mut p: [f64; 4] = std::array::from_fn(|_| rng.random::<f64>());
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= s);
    let phase = |rng: &mut ChaCha8Rng| Complex64::from_polar(1.0, 2.0 * PI * rng.random::<f64>());
    let e = phase(rng) * (p[1] * p[2]).sqrt() * rng.random::<f64>();
    let g = phase(rng) * (p[0] * p[3]).sqrt() * rng.random::<f64>();
    AtomicDensity::x_state(p[0], p[1], p[2], p[3], e, g)
}

fn x_formula() -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let rho = random_x_state(&mut rng);
        worst = worst.max((concurrence_x(&rho)? - concurrence_general(&rho)?).abs());
    }
    Ok(check("x-state concurrence", worst, 1e-10, "max deviation"))
}

fn sorted_eigenvalues(m: &nalgebra::DMatrix<Complex64>) -> Vec<f64> {
    let mut v: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

fn delocalized_spectrum() -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let p = ModelParams::symmetric(rng.random_range(-20.0..20.0), rng.random_range(0.1..30.0), 0.0);
        let p = ModelParams {
            g1: rng.random_range(0.2..2.0),
            ..p
        };
        let p = ModelParams { g2: p.g1, ..p };
        for n in 0..=5 {
            let sub = enumerate_subspace(n);
            let a = sorted_eigenvalues(&build_hamiltonian_block(&p, &sub).matrix);
            let b = sorted_eigenvalues(&build_delocalized_block(&p, &sub)?.matrix);
            for (x, y) in a.iter().zip(&b) {
                worst = worst.max((x - y).abs());
            }
        }
    }
    Ok(check("delocalized spectrum", worst, 1e-10, "max eigenvalue deviation"))
}

fn dispersive_oracle(exec: Exec) -> Result<Check> {
    let params = ModelParams::symmetric(0.0, 25.0, 0.1);
    let grid = TimeGrid::linspace(16.0 * PI, 801)?;
    let run = simulate(
        &params,
        AtomicInitialState::E1G2,
        &grid,
        &UnitaryOptions { cutoff: None, exec },
    )?;
    let prediction = effective_concurrence_eg(&effective_params(&params)?, &grid)?;
    let mut worst = 0.0f64;
    for (s, c) in run.snapshots.iter().zip(&prediction.concurrence) {
        worst = worst.max((concurrence(&s.rho)? - c).abs());
    }
    Ok(check("dispersive oracle (J = 25g)", worst, 0.1, "max |C - |sin 2λ't||"))
}

fn bell_freezing(exec: Exec) -> Result<Check> {
    let params = ModelParams::symmetric(0.0, 20.0, 0.1);
    let grid = TimeGrid::linspace(30.0, 301)?;
    let run = simulate(
        &params,
        AtomicInitialState::BellPlus,
        &grid,
        &UnitaryOptions { cutoff: None, exec },
    )?;
    let mut min = f64::INFINITY;
    for s in &run.snapshots {
        min = min.min(concurrence(&s.rho)?);
    }
    Ok(Check {
        name: "entanglement freezing (J = 20g)",
        passed: min >= 0.9,
        detail: format!("min concurrence {min:.4} (bound 0.9)"),
    })
}

fn free_lindblad(exec: Exec) -> Result<Check> {
    let params = ModelParams::symmetric(0.0, 10.0, 0.0);
    let grid = TimeGrid::linspace(5.0, 51)?;
    let unitary = simulate(
        &params,
        AtomicInitialState::E1G2,
        &grid,
        &UnitaryOptions { cutoff: Some(5), exec },
    )?;
    let space = FullSpace::new(5);
    let (rho0, _) = FullDensity::thermal_product(space.clone(), AtomicInitialState::E1G2, 0.0, 0.0)?;
    let l = Liouvillian::new(&params, &DissipationParams::new(0.0, 0.0, 0.0)?, space)?;
    let open = integrate_reduced(&l, &rho0, &grid, &IntegratorOptions::default())?;
    let mut worst = 0.0f64;
    for (s, (r, _)) in unitary.snapshots.iter().zip(&open) {
        let diff = s.rho.matrix() - r.matrix();
        worst = worst.max(diff.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    Ok(check("lossless master equation", worst, 1e-6, "max entry deviation"))
}

fn unitary_invariants(exec: Exec) -> Result<Check> {
    let params = ModelParams::symmetric(10.0, 7.0, 1.0);
    let grid = TimeGrid::linspace(20.0, 101)?;
    let mut worst = 0.0f64;
    let mut x_form = true;
    for atoms in AtomicInitialState::ALL {
        let run = simulate(&params, atoms, &grid, &UnitaryOptions { cutoff: None, exec })?;
        for s in &run.snapshots {
            worst = worst.max((s.rho.trace() - 1.0).abs());
            x_form &= s.rho.is_x_form();
        }
    }
    let mut c = check("unitary trace and X form", worst, 1e-10, "max trace defect");
    c.passed &= x_form;
    if !x_form {
        c.detail.push_str("; X form violated");
    }
    Ok(c)
}

/// Runs every check. Errors inside a check are reported as failures.
pub fn run_all(exec: Exec) -> Vec<Check> {
    type Runner = Box<dyn Fn() -> Result<Check>>;
    let checks: [(&'static str, Runner); 6] = [
        ("x-state concurrence", Box::new(x_formula)),
        ("delocalized spectrum", Box::new(delocalized_spectrum)),
        ("dispersive oracle (J = 25g)", Box::new(move || dispersive_oracle(exec))),
        ("entanglement freezing (J = 20g)", Box::new(move || bell_freezing(exec))),
        ("lossless master equation", Box::new(move || free_lindblad(exec))),
        ("unitary trace and X form", Box::new(move || unitary_invariants(exec))),
    ];
    checks
        .into_iter()
        .map(|(name, f)| {
            f().unwrap_or_else(|e| Check {
                name,
                passed: false,
                detail: format!("error: {e}"),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass() {
        for c in run_all(Exec::Parallel) {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
