//! The polygon of admissible `(a, b)` for a finite map.
//!
//! cargo run --example feasible_region

use ratfix::{
    feasible_region_vertices, AlteringFunction, ConditionKind, FiniteMetricSpace, PairSample,
    TableMap,
};

fn main() -> ratfix::Result<()> {
    // Four points on a line; the map sends the three smallest to 0.
    let space = FiniteMetricSpace::from_reals(&[0.0, 1.0, 2.0, 4.0])?;
    let map = TableMap::new(vec![0, 0, 0, 1])?;
    let pairs = PairSample::exhaustive(&space)?;
    let id = AlteringFunction::Identity;

    for kind in [ConditionKind::BanachKhan, ConditionKind::DasGupta] {
        let vs = feasible_region_vertices(&space, &map, &id, kind, &pairs, 1e-6)?;
        println!("{} region, {} vertices:", kind.as_str(), vs.len());
        for (a, b) in vs {
            println!("  a = {a:.6}  b = {b:.6}");
        }
    }
    Ok(())
}
