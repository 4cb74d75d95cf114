//! The four Bell states from |00⟩, |01⟩, |10⟩, |11⟩, and a sampled histogram.

use qfin::circuit::{bell_circuit, CircuitSpec};
use qfin::state::{index_to_bitstring, StateVector};

fn main() -> qfin::error::Result<()> {
    let bell = bell_circuit();
    println!("circuit:\n{}", bell.to_text());
    for input in 0..4 {
        let out = bell.run(&StateVector::basis_state(2, input)?)?;
        let amps: Vec<String> = out.amplitudes().iter().map(|a| format!("{:+.4}", a.re)).collect();
        println!("|{}⟩ -> [{}]", index_to_bitstring(input, 2), amps.join(", "));
    }

    let mut prep = CircuitSpec::new(2);
    prep.append(&bell)?;
    let counts = prep.run_from_zero()?.sample(1000, 42)?;
    for (bits, n) in &counts.counts {
        println!("{bits}: {n}");
    }
    Ok(())
}
