//! HHL on diag(1, 2, 3, 4), its Hadamard-conjugated twin and a variant with a
//! negative eigenvalue.

use std::f64::consts::PI;

use qfin::hhl::{classical_solve, hhl_solve, LinearSystem, TimeScale};
use qfin::readout::Mode;

fn diag(d: [f64; 4]) -> Vec<Vec<f64>> {
    (0..4).map(|i| (0..4).map(|j| if i == j { d[i] } else { 0.0 }).collect()).collect()
}

fn main() -> qfin::error::Result<()> {
    let hh = |i: usize, j: usize| if (i & j).count_ones().is_multiple_of(2) { 0.5 } else { -0.5 };
    let d = [1.0, 2.0, 3.0, 4.0];
    let conjugated: Vec<Vec<f64>> =
        (0..4).map(|i| (0..4).map(|j| (0..4).map(|k| hh(i, k) * d[k] * hh(k, j)).sum()).collect()).collect();
    let systems = [
        ("diag(1,2,3,4)", LinearSystem::real(&diag(d), &[1.0; 4])?),
        ("(H⊗H)diag(1,2,3,4)(H⊗H)", LinearSystem::real(&conjugated, &[0.0, 1.0, 1.0, 0.0])?),
        ("diag(-1,2,3,4)", LinearSystem::real(&diag([-1.0, 2.0, 3.0, 4.0]), &[-1.0, 1.0, 1.0, 1.0])?),
    ];
    let t = 4;
    // Integer eigenvalues land exactly on clock values at τ = 2π/2^t.
    let tau = TimeScale::Fixed(2.0 * PI / 16.0);
    for (name, sys) in &systems {
        let r = hhl_solve(sys, t, tau, Mode::Exact)?;
        let c = classical_solve(sys)?;
        println!("{name}");
        println!("  hhl       {:?}", r.solution.iter().map(|z| format!("{:+.4}", z.re)).collect::<Vec<_>>());
        println!("  classical {:?}", c.normalized.iter().map(|z| format!("{:+.4}", z.re)).collect::<Vec<_>>());
        println!("  x = {:?}", r.denormalized.iter().map(|z| format!("{:.4}", z.re)).collect::<Vec<_>>());
        println!("  P(ancilla = 1) = {:.4}", r.success_probability);
    }

    let sampled = hhl_solve(&systems[0].1, t, tau, Mode::Sampled { shots: 100_000, seed: 3 })?;
    println!("sampled magnitudes {:?}", sampled.solution.iter().map(|z| format!("{:.4}", z.re)).collect::<Vec<_>>());
    Ok(())
}
