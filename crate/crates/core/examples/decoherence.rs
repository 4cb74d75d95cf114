//! Relaxation and dephasing curves over 200 idle gates, printed every 20 steps.

use qfin::noise::{dephasing_experiment, relaxation_experiment, NoiseParams};

fn main() -> qfin::error::Result<()> {
    let params = NoiseParams::with_default_step(10.0, 8.0)?;
    let relax = relaxation_experiment(&params, 200, 8192, 0)?;
    let dephase = dephasing_experiment(&params, 200, 8192, 0)?;
    println!("{:>5} {:>10} {:>10} {:>10} {:>10}", "k", "relax", "e^-kt/T1", "dephase", "expected");
    for (r, d) in relax.points.iter().zip(&dephase.points).step_by(20) {
        println!("{:>5} {:>10.4} {:>10.4} {:>10.4} {:>10.4}", r.idles, r.p1, r.expected, d.p1, d.expected);
    }
    println!(
        "max deviation: relax {:.2}σ, dephase {:.2}σ",
        relax.max_deviation_sigmas(),
        dephase.max_deviation_sigmas()
    );
    Ok(())
}
