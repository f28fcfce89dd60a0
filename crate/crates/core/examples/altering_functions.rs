//! Altering distance functions and grid checks of their properties.
//!
//! cargo run --example altering_functions

use ratfix::{
    check_psi_properties, make_integral_psi, AlteringFunction, Density, QuadratureSettings,
};

fn main() -> ratfix::Result<()> {
    let grid: Vec<f64> = (0..=100).map(|i| i as f64 / 10.0).collect();

    let sq = AlteringFunction::power(2.0)?;
    let psi0 = make_integral_psi(Density::linear(2.0)?, QuadratureSettings::default())?;
    println!("{sq}: psi(3) = {}", sq.evaluate(3.0)?);
    // int_0^t 2s ds = t^2
    println!("{psi0}: psi(3) = {}", psi0.evaluate(3.0)?);

    let cubic = make_integral_psi(Density::power(3.0, 2.0)?, QuadratureSettings::default())?;
    println!("{cubic}: psi(2) = {} (exact 8)", cubic.evaluate(2.0)?);

    for psi in [AlteringFunction::Identity, sq, psi0] {
        let r = check_psi_properties(&psi, &grid, 25.0)?;
        println!(
            "{psi}: all pass = {}, continuity: {}",
            r.all_pass(),
            r.continuity
        );
    }

    // A table that dips: not non-decreasing, and it vanishes at t = 2.
    let dip = AlteringFunction::table(vec![(0.0, 0.0), (1.0, 1.0), (2.0, 0.0), (3.0, 2.0)])?;
    let r = check_psi_properties(&dip, &[0.0, 1.0, 2.0, 3.0], 1.5)?;
    println!("dip: vanishes only at 0: {:?}", r.vanishes_only_at_zero);
    println!("dip: non-decreasing: {:?}", r.non_decreasing);
    println!("dip: continuity: {}", r.continuity);
    Ok(())
}
