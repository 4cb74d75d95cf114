//! Pick three of five semiconductor shares: brute-force table, Ising form and QAOA.

use qfin::fixtures;
use qfin::qaoa::{qaoa_solve, QaoaConfig};
use qfin::qubo::{brute_force, exactly_m_ones, qubo_to_ising};

fn main() -> qfin::error::Result<()> {
    let task = fixtures::semi_task()?;
    let feasible = exactly_m_ones(fixtures::SEMI_PICK);
    let table = brute_force(&task, Some(&feasible))?;
    for row in &table.rows {
        println!("{} {:>8.4} {}", row.bits, row.objective, if row.feasible == Some(true) { "*" } else { "" });
    }
    let best = table.optimum_row();
    let names: Vec<&str> =
        best.bits.chars().zip(fixtures::SEMI_LABELS).filter(|(b, _)| *b == '1').map(|(_, n)| n).collect();
    println!("optimum {} ({:.4}): {}", best.bits, best.objective, names.join(", "));

    let ising = qubo_to_ising(&task);
    println!("ising: {} couplings, offset {:.4}", ising.coupling_terms().len(), ising.offset);

    for seed in 0..3 {
        let out = qaoa_solve(&task, &QaoaConfig { seed, ..QaoaConfig::default() })?;
        println!(
            "qaoa seed {seed}: {} {:.4} after {} evaluations, <H> = {:.4}",
            out.best_bits, out.best_objective, out.evaluations, out.best_expected_energy
        );
    }
    Ok(())
}
