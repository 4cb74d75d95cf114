//! Fixed income vs equities: minimum-variance weights for a 7 % required
//! return, solved classically and with HHL over several clock sizes.

use num_complex::Complex64;
use qfin::fixtures;
use qfin::hhl::{
    build_portfolio_system, classical_solve, extract_component, hhl_solve, portfolio_similarity, TimeScale,
};
use qfin::readout::Mode;

fn weights(x: &[Complex64]) -> (f64, f64) {
    let (a, b) = (x[2].re, x[3].re);
    (a / (a + b), b / (a + b))
}

fn main() -> qfin::error::Result<()> {
    let spec = fixtures::bonds_equities();
    let sys = build_portfolio_system(&spec)?;
    let classical = classical_solve(&sys)?;
    println!("eigenvalues {:?}", classical.eigenvalues.as_deref().unwrap_or_default());
    println!("condition number {:.2}", classical.condition_number);
    let (wf, we) = weights(&classical.solution);
    println!("classical  fixed income {:.4}  equities {:.4}", wf, we);

    for t in [6, 7, 8, 9, 10] {
        for scale in [TimeScale::Spectral, TimeScale::Gershgorin] {
            let r = hhl_solve(&sys, t, scale, Mode::Exact)?;
            let (wf, we) = weights(&r.denormalized);
            println!(
                "t={t:<2} {:<10} fixed income {wf:.4}  equities {we:.4}  P(success) {:.4}",
                format!("{scale:?}"),
                r.success_probability
            );
        }
    }

    let r = hhl_solve(&sys, 8, TimeScale::Spectral, Mode::Exact)?;
    let current =
        [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0)];
    println!("|x_equities| by swap test {:.4}", extract_component(&r, 3, Mode::Sampled { shots: 8192, seed: 1 })?);
    println!("overlap with a 50/50 portfolio {:.4}", portfolio_similarity(&r, &current, Mode::Exact)?);
    Ok(())
}
