//! Building spaces and self-maps, and what validation rejects.
//!
//! cargo run --example metric_spaces

use ratfix::{
    validate_space, Family, FamilyMap, FiniteMetricSpace, MetricSpace, RealBoxSpace, SelfMap,
    TableMap,
};

fn main() -> ratfix::Result<()> {
    // Three points on a line.
    let line = FiniteMetricSpace::from_reals(&[0.0, 1.0, 3.0])?;
    println!("d(p0, p2) = {}", line.distance(&0, &2)?);

    // A matrix that is not a metric: 0 -> 2 is a shortcut through 1.
    let bad = vec![
        vec![0.0, 1.0, 5.0],
        vec![1.0, 0.0, 1.0],
        vec![5.0, 1.0, 0.0],
    ];
    for v in validate_space(&bad)? {
        println!("rejected: {v}");
    }
    if let Err(e) = FiniteMetricSpace::from_matrix(bad) {
        println!("constructor says: {e}");
    }

    // Maps on finite spaces are tables; powers are exact.
    let rot = TableMap::new(vec![1, 2, 0])?;
    println!("S^3 = {:?}", rot.compose(3)?.table());

    // Box families are checked to map the box into itself.
    let square = RealBoxSpace::new(vec![0.0, 0.0], vec![1.0, 1.0])?;
    let shrink = FamilyMap::new(
        square.clone(),
        Family::Affine {
            matrix: vec![vec![0.5, 0.0], vec![0.0, 0.25]],
            offset: vec![0.25, 0.5],
        },
    )?;
    println!("S(1, 1) = {:?}", shrink.apply(&vec![1.0, 1.0])?);
    match FamilyMap::new(square, Family::Constant(vec![2.0, 0.0])) {
        Ok(_) => unreachable!(),
        Err(e) => println!("constant map leaving the box: {e}"),
    }

    let unit = RealBoxSpace::interval(0.0, 1.0)?;
    let r = FamilyMap::new(unit.clone(), Family::Rational)?;
    let r3 = r.compose(3)?;
    println!("x/(1+x) applied 3 times at 1: {:?}", r3.apply(&vec![1.0])?);
    println!("grid: {:?}", unit.grid_points(5));
    Ok(())
}
