//! The fixed five-qubit HHL circuit for [[1.5, 0.5], [0.5, 1.5]] x = (cos θ, sin θ).

use std::f64::consts::PI;

use qfin::hhl::{classical_solve, hhl_2x2_circuit, hhl_2x2_reference, LinearSystem};
use qfin::readout::Mode;

fn main() -> qfin::error::Result<()> {
    println!("{}", hhl_2x2_circuit(PI / 4.0)?.to_text());
    for (label, theta) in [("pi/7", PI / 7.0), ("pi/6", PI / 6.0), ("pi/4", PI / 4.0), ("pi/3", PI / 3.0)] {
        let sys = LinearSystem::real(&[vec![1.5, 0.5], vec![0.5, 1.5]], &[theta.cos(), theta.sin()])?;
        let want = classical_solve(&sys)?.normalized;
        let exact = hhl_2x2_reference(theta, Mode::Exact)?;
        let sampled = hhl_2x2_reference(theta, Mode::Sampled { shots: 8192, seed: 0 })?;
        println!(
            "θ={label:<5} classical ({:.4}, {:.4})  exact ({:.4}, {:.4})  sampled ({:.4}, {:.4})",
            want[0].re,
            want[1].re,
            exact.solution[0].re,
            exact.solution[1].re,
            sampled.solution[0].re,
            sampled.solution[1].re
        );
    }
    Ok(())
}
