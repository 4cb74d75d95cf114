//! Gray-code angle transform for the linear schedule f(i) = i/7 over 8 bins.

use qfin::encoding::ry_angle_for_probability;
use qfin::gray::{angle_transform_matrix, transform_angles};

fn main() -> qfin::error::Result<()> {
    let alphas: Vec<f64> = (0..8).map(|i| ry_angle_for_probability(i as f64 / 7.0)).collect();
    let thetas = transform_angles(&alphas)?;
    println!("{:>3} {:>9} {:>9}", "i", "alpha", "theta");
    for (i, (a, t)) in alphas.iter().zip(&thetas).enumerate() {
        println!("{i:>3} {a:>9.4} {t:>9.4}");
    }
    println!("\nM for two controls:");
    for row in angle_transform_matrix(2) {
        println!("{}", row.iter().map(|v| format!("{v:+.2}")).collect::<Vec<_>>().join(" "));
    }
    Ok(())
}
