//! Integer portfolio weights with two bits per asset, solved by brute force.

use qfin::qubo::{brute_force, encode_integer_weights};

fn main() -> qfin::error::Result<()> {
    // Minimize wᵀCw − rᵀw over w ∈ {0..3}².
    let cov = vec![vec![0.20, 0.02], vec![0.02, 0.05]];
    let ret = [0.9, 0.3];
    let enc = encode_integer_weights(2, 2)?;
    let task = enc.expand(&cov, &ret.iter().map(|r| -r).collect::<Vec<_>>(), 0.0)?;
    let table = brute_force(&task, None)?;
    let best = table.optimum_row();
    let bits: Vec<u8> = best.bits.bytes().map(|b| b - b'0').collect();
    println!("{} binary variables, weights up to {}", enc.num_vars(), enc.max_weight());
    println!("best {} -> weights {:?}, objective {:.4}", best.bits, enc.weights(&bits), best.objective);
    Ok(())
}
