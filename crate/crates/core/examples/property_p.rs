//! Fixed points of iterates, periodic points and the chain argument.
//!
//! cargo run --example property_p

use ratfix::{
    check_property_p, refute_periodic_chain, AlteringFunction, Family, FamilyMap,
    FiniteMetricSpace, RealBoxSpace, SearchOptions, TableMap,
};

fn main() -> ratfix::Result<()> {
    let opts = SearchOptions::default();
    let space = FiniteMetricSpace::from_reals(&[0.0, 1.0, 2.0])?;

    let toward_zero = TableMap::new(vec![0, 0, 1])?;
    let r = check_property_p(&space, &toward_zero, 8, &opts)?;
    println!("toward zero: F(S) = {:?}, status {:?}", r.fixed, r.status);

    let cycle = TableMap::new(vec![1, 2, 0])?;
    let r = check_property_p(&space, &cycle, 8, &opts)?;
    println!("3-cycle: status {:?}", r.status);
    for w in &r.witnesses {
        println!("  period {} at {}", w.period, space.names()[w.point]);
    }

    // If the cycle satisfied a condition with a = 0.5, b = 0.2, then
    // psi(d(z, Sz)) <= (0.5 / 0.8)^3 psi(d(z, Sz)), forcing z = Sz.
    let chain =
        refute_periodic_chain(&space, &cycle, &0, 3, 0.5, 0.2, &AlteringFunction::Identity)?;
    println!(
        "chain: {} <= {} * {} ? {}",
        chain.lhs, chain.factor, chain.lhs, chain.holds
    );

    // Continuous spaces: multi-start search, reported as sampled evidence.
    // An odd grid puts a start on 0, the only fixed point of x -> -x; every
    // other start is a period-2 point.
    let line = RealBoxSpace::interval(-1.0, 1.0)?;
    let flip = FamilyMap::new(line.clone(), Family::affine_1d(-1.0, 0.0))?;
    let opts = SearchOptions {
        grid_starts: 5,
        random_starts: 0,
        ..opts
    };
    let r = check_property_p(&line, &flip, 4, &opts)?;
    println!(
        "x -> -x: {:?} evidence, F(S) = {:?}, status {:?}",
        r.evidence, r.fixed, r.status
    );
    for w in &r.witnesses {
        println!("  period {} at {:?}", w.period, w.point);
    }
    Ok(())
}
