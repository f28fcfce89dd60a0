//! Certifying contraction constants from point pairs.
//!
//! cargo run --example certify_contraction

use ratfix::{
    certify, AlteringFunction, ConditionKind, Family, FamilyMap, FiniteMetricSpace, PairSample,
    RealBoxSpace, TableMap,
};

const MARGIN: f64 = 1e-6;

fn main() -> ratfix::Result<()> {
    let id = AlteringFunction::Identity;

    // S(x) = x/2 on [0, 1], all pairs of a 201-point grid.
    let unit = RealBoxSpace::interval(0.0, 1.0)?;
    let half = FamilyMap::new(unit.clone(), Family::affine_1d(0.5, 0.0))?;
    let grid = PairSample::sampled(&unit, 201, 0, 0);
    let c = certify(&unit, &half, &id, ConditionKind::DasGupta, &grid, MARGIN)?;
    println!(
        "x/2: (a, b) = {:?} via {:?}, min slack {:?}",
        c.chosen, c.justification, c.min_slack
    );

    // x/(1+x) on [0, 1]: rational and Banach forms.
    let rat = FamilyMap::new(unit.clone(), Family::Rational)?;
    for kind in [ConditionKind::BanachKhan, ConditionKind::DasGupta] {
        let c = certify(&unit, &rat, &id, kind, &grid, MARGIN)?;
        println!("x/(1+x), {}: (a, b) = {:?}", kind.as_str(), c.chosen);
    }

    // With psi(t) = t^2 on the same map.
    let sq = AlteringFunction::power(2.0)?;
    let c = certify(&unit, &half, &sq, ConditionKind::Generalized, &grid, MARGIN)?;
    println!("x/2 under t^2: (a, b) = {:?}", c.chosen);

    // The identity never contracts.
    let pts = FiniteMetricSpace::from_reals(&[0.0, 1.0, 2.0])?;
    let ident = TableMap::identity(3);
    let all = PairSample::exhaustive(&pts)?;
    let c = certify(&pts, &ident, &id, ConditionKind::DasGupta, &all, MARGIN)?;
    println!(
        "identity: feasible = {}, violating pairs {:?} of {}",
        c.feasible,
        c.violating_pairs,
        all.len()
    );
    Ok(())
}
