//! QFT of a basis state spreads it into phases; the inverse brings it back.

use qfin::qft::{inverse_qft, qft};
use qfin::state::StateVector;

fn main() -> qfin::error::Result<()> {
    let n = 3;
    let input = StateVector::basis_state(n, 5)?;
    let spread = qft(n)?.run(&input)?;
    for (k, a) in spread.amplitudes().iter().enumerate() {
        println!("{k}: |a| = {:.4}  arg = {:+.4} rad", a.norm(), a.arg());
    }
    let back = inverse_qft(n)?.run(&spread)?;
    println!("round trip fidelity {:.12}", back.inner(&input)?.norm_sqr());
    println!("gates in QFT({n}): {}", qft(n)?.gate_count());
    Ok(())
}
