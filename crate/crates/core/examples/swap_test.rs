//! Overlap of two single-qubit states by the swap test, exact and sampled.

use qfin::state::StateVector;
use qfin::swap_test::{swap_test, swap_test_exact, swap_test_p0};

fn main() -> qfin::error::Result<()> {
    let zero = StateVector::from_real(&[1.0, 0.0])?;
    for deg in [0.0f64, 30.0, 60.0, 90.0] {
        let t = deg.to_radians();
        let psi = StateVector::from_real(&[t.cos(), t.sin()])?;
        println!(
            "angle {deg:>4}°  P(0) = {:.4}  |⟨ψ|0⟩| exact {:.4}  sampled {:.4}  (cos = {:.4})",
            swap_test_p0(&psi, &zero)?,
            swap_test_exact(&psi, &zero)?,
            swap_test(&psi, &zero, 8192, 1)?,
            t.cos().abs()
        );
    }
    Ok(())
}
