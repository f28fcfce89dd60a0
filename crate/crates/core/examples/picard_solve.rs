//! Picard iteration with a priori bounds.
//!
//! cargo run --example picard_solve

use ratfix::{
    certify, iterate, iters_to_tolerance, AlteringFunction, BoundConstants, ConditionKind, Family,
    FamilyMap, PairSample, RealBoxSpace, Verdict,
};

fn main() -> ratfix::Result<()> {
    // S(x) = x/2 + 1 on [0, 4], fixed point 2.
    let space = RealBoxSpace::interval(0.0, 4.0)?;
    let map = FamilyMap::new(space.clone(), Family::affine_1d(0.5, 1.0))?;
    let psi = AlteringFunction::Identity;

    let pairs = PairSample::sampled(&space, 101, 0, 0);
    let cert = certify(&space, &map, &psi, ConditionKind::Generalized, &pairs, 1e-6)?;
    let (a, b) = cert.chosen.expect("x/2 + 1 contracts");
    let constants = BoundConstants::new(a, b, psi.clone())?;

    let tol = 1e-8;
    let trace = iterate(&space, &map, &vec![0.0], tol, 1000, Some(&constants))?;
    let bounds = trace.bounds.as_ref().unwrap();
    let rows = trace.points.iter().zip(&trace.step_d).zip(bounds);
    for (n, ((x, step), bound)) in rows.take(6).enumerate() {
        println!(
            "n={n:2}  x={:.10}  step={step:.3e}  bound={bound:.3e}",
            x[0]
        );
    }
    if let Verdict::Converged {
        n,
        fixed_point,
        residual,
    } = &trace.verdict
    {
        println!(
            "converged at step {n}: z = {:?}, d(z, Sz) = {residual:e}",
            fixed_point
        );
    }
    let d01 = trace.step_d[0];
    println!(
        "bound predicts {} steps",
        iters_to_tolerance(a, b, &psi, d01, tol)?
    );

    // x/(1+x) converges to 0 only sublinearly and runs out of steps.
    let unit = RealBoxSpace::interval(0.0, 1.0)?;
    let slow = FamilyMap::new(unit.clone(), Family::Rational)?;
    let t = iterate(&unit, &slow, &vec![1.0], 1e-10, 10_000, None)?;
    println!(
        "x/(1+x): {:?} after {} steps, x = {:e}",
        t.verdict,
        t.iterations(),
        t.points.last().unwrap()[0]
    );
    Ok(())
}
