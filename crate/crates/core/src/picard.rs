//! Picard iteration `x_{n+1} = S x_n` with a priori bounds, and the
//! construction of Cauchy-violation witnesses.
//!
//! Under a rational-type condition with constants `a, b` and altering
//! function `psi`, consecutive steps obey
//!
//! ```text
//! psi(d(x_n, x_{n+1})) <= (a / (1 - b))^n psi(d(x_0, x_1)).
//! ```

use std::collections::HashMap;

use serde::Serialize;

use crate::altering::AlteringFunction;
use crate::contraction::check_constants;
use crate::error::{Error, Result};
use crate::spaces::{MetricSpace, SelfMap};

pub const DEFAULT_FIX_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITERS: usize = 1_000_000;

/// Constants used to record a priori bounds along a trace.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundConstants {
    pub a: f64,
    pub b: f64,
    pub psi: AlteringFunction,
}

impl BoundConstants {
    pub fn new(a: f64, b: f64, psi: AlteringFunction) -> Result<Self> {
        check_constants(a, b)?;
        Ok(Self { a, b, psi })
    }

    pub fn ratio(&self) -> f64 {
        self.a / (1.0 - self.b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict<P> {
    /// The first step at or below the tolerance was `n`; `fixed_point` is
    /// `x_{n+1}` and `residual = d(z, Sz)`.
    Converged {
        n: usize,
        fixed_point: P,
        residual: f64,
    },
    MaxIters,
    /// A previously visited point was revisited (finite spaces only).
    CycleDetected {
        period: usize,
        entry: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationTrace<P> {
    pub points: Vec<P>,
    /// `step_d[n] = d(points[n], points[n+1])`
    pub step_d: Vec<f64>,
    /// A priori bound per step, when constants were supplied.
    pub bounds: Option<Vec<f64>>,
    pub verdict: Verdict<P>,
}

impl<P> IterationTrace<P> {
    pub fn converged(&self) -> bool {
        matches!(self.verdict, Verdict::Converged { .. })
    }

    pub fn fixed_point(&self) -> Option<&P> {
        match &self.verdict {
            Verdict::Converged { fixed_point, .. } => Some(fixed_point),
            _ => None,
        }
    }

    pub fn iterations(&self) -> usize {
        self.step_d.len()
    }
}

/// Runs the iteration from `x0`.
///
/// Stops at the first `n` with `d(x_n, x_{n+1}) <= fix_tol` provided the
/// limit candidate `z = x_{n+1}` also has `d(z, Sz) <= fix_tol`; on a revisit
/// of an earlier point (finite spaces); or after `max_iters` applications of
/// the map.
pub fn iterate<S, M>(
    space: &S,
    map: &M,
    x0: &S::Point,
    fix_tol: f64,
    max_iters: usize,
    constants: Option<&BoundConstants>,
) -> Result<IterationTrace<S::Point>>
where
    S: MetricSpace,
    M: SelfMap<Point = S::Point>,
{
    if max_iters == 0 {
        return Err(Error::domain("max_iters must be at least 1"));
    }
    if !(fix_tol > 0.0) {
        return Err(Error::domain(format!(
            "fixed-point tolerance must be positive, got {fix_tol}"
        )));
    }
    if !space.contains(x0) {
        return Err(Error::domain(format!(
            "start point {x0:?} is not in the space"
        )));
    }

    let mut points = vec![x0.clone()];
    let mut step_d = Vec::new();
    let mut visited: HashMap<usize, usize> = HashMap::new();
    if let Some(k) = space.exact_key(x0) {
        visited.insert(k, 0);
    }

    let mut verdict = Verdict::MaxIters;
    for n in 0..max_iters {
        let next = map.apply(&points[n])?;
        let d = space.distance(&points[n], &next)?;
        step_d.push(d);
        points.push(next);
        let current = &points[n + 1];

        if d <= fix_tol {
            let residual = space.distance(current, &map.apply(current)?)?;
            if residual <= fix_tol {
                verdict = Verdict::Converged {
                    n,
                    fixed_point: current.clone(),
                    residual,
                };
                break;
            }
        }
        if let Some(k) = space.exact_key(current) {
            if let Some(&first) = visited.get(&k) {
                verdict = Verdict::CycleDetected {
                    period: n + 1 - first,
                    entry: first,
                };
                break;
            }
            visited.insert(k, n + 1);
        }
    }

    let bounds = match constants {
        Some(c) => Some(bound_sequence(
            c.ratio(),
            c.psi.evaluate(step_d[0])?,
            step_d.len(),
        )),
        None => None,
    };

    Ok(IterationTrace {
        points,
        step_d,
        bounds,
        verdict,
    })
}

/// `[start, ratio * start, ratio^2 * start, ...]`, built by repeated
/// multiplication so that consecutive entries differ by exactly one factor.
fn bound_sequence(ratio: f64, start: f64, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut v = start;
    for _ in 0..len {
        out.push(v);
        v *= ratio;
    }
    out
}

/// `(a / (1 - b))^n psi(d01)`.
pub fn a_priori_bound(n: usize, a: f64, b: f64, psi: &AlteringFunction, d01: f64) -> Result<f64> {
    check_constants(a, b)?;
    let ratio = a / (1.0 - b);
    let mut v = psi.evaluate(d01)?;
    for _ in 0..n {
        if v == 0.0 {
            break;
        }
        v *= ratio;
    }
    Ok(v)
}

/// Smallest `n` with `a_priori_bound(n, ..) <= psi(tol)`.
pub fn iters_to_tolerance(
    a: f64,
    b: f64,
    psi: &AlteringFunction,
    d01: f64,
    tol: f64,
) -> Result<usize> {
    check_constants(a, b)?;
    if !(tol > 0.0) {
        return Err(Error::domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let target = psi.evaluate(tol)?;
    let start = psi.evaluate(d01)?;
    if start <= target {
        return Ok(0);
    }
    let ratio = a / (1.0 - b);
    // closed-form estimate, then settle against the exact recurrence
    let est = ((target / start).ln() / ratio.ln()).ceil().max(0.0) as usize;
    let mut n = est.saturating_sub(2);
    let mut v = a_priori_bound(n, a, b, psi, d01)?;
    while v > target {
        v *= ratio;
        n += 1;
    }
    Ok(n)
}

/// Indices `n(k) < m(k)` with `d(x_m, x_n) >= eps0` and `d(x_{m-1}, x_n) < eps0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WitnessIndices {
    pub k: usize,
    pub n: usize,
    pub m: usize,
}

/// Empirical values, at the largest `k`, of the four quantities that tend to
/// `eps0` along a Cauchy-violation witness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WitnessLimits {
    /// `d(x_{m-1}, x_{n+1})`
    pub prev_to_next: f64,
    /// `d(x_m, x_n)`
    pub at_indices: f64,
    /// `d(x_{m-1}, x_n)`
    pub prev_to_n: f64,
    /// `d(x_{m+1}, x_{n+1})`
    pub shifted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CauchyWitness {
    pub eps0: f64,
    pub indices: Vec<WitnessIndices>,
    pub limits: WitnessLimits,
}

/// Looks for a Cauchy-violation witness on `seq` for `k = 1..=horizon`.
///
/// Sets `n(k) = k + 1` and takes `m(k)` minimal with
/// `d(x_{m(k)}, x_{n(k)}) >= eps0`; minimality makes
/// `d(x_{m(k)-1}, x_{n(k)}) < eps0` automatic. `m(k) + 1` must still index
/// the sequence. Returns `None` as soon as some `k` has no such `m(k)`.
pub fn find_cauchy_witness<S: MetricSpace>(
    space: &S,
    seq: &[S::Point],
    eps0: f64,
    horizon: usize,
) -> Result<Option<CauchyWitness>> {
    if !(eps0 > 0.0) {
        return Err(Error::domain(format!("eps0 must be positive, got {eps0}")));
    }
    if seq.len() <= horizon {
        return Err(Error::domain(format!(
            "sequence of length {} does not extend past the horizon {horizon}",
            seq.len()
        )));
    }
    if horizon == 0 {
        return Err(Error::domain("horizon must be at least 1"));
    }

    let mut indices = Vec::with_capacity(horizon);
    for k in 1..=horizon {
        let n = k + 1;
        let mut found = None;
        // m + 1 must exist
        for m in (n + 1)..seq.len().saturating_sub(1) {
            if space.distance(&seq[m], &seq[n])? >= eps0 {
                found = Some(m);
                break;
            }
        }
        match found {
            Some(m) => indices.push(WitnessIndices { k, n, m }),
            None => return Ok(None),
        }
    }

    let last = indices[indices.len() - 1];
    let (n, m) = (last.n, last.m);
    let limits = WitnessLimits {
        prev_to_next: space.distance(&seq[m - 1], &seq[n + 1])?,
        at_indices: space.distance(&seq[m], &seq[n])?,
        prev_to_n: space.distance(&seq[m - 1], &seq[n])?,
        shifted: space.distance(&seq[m + 1], &seq[n + 1])?,
    };
    Ok(Some(CauchyWitness {
        eps0,
        indices,
        limits,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{Family, FamilyMap, FiniteMetricSpace, RealBoxSpace, TableMap};
    use proptest::prelude::*;

    fn affine_on(lo: f64, hi: f64, slope: f64, offset: f64) -> (RealBoxSpace, FamilyMap) {
        let b = RealBoxSpace::interval(lo, hi).unwrap();
        let m = FamilyMap::new(b.clone(), Family::affine_1d(slope, offset)).unwrap();
        (b, m)
    }

    #[test]
    fn half_plus_one_converges_to_two() {
        let (b, m) = affine_on(0.0, 4.0, 0.5, 1.0);
        let c = BoundConstants::new(0.5, 0.0, AlteringFunction::Identity).unwrap();
        let t = iterate(&b, &m, &vec![0.0], 1e-8, 1000, Some(&c)).unwrap();
        let z = t.fixed_point().unwrap();
        // closed form: x_n = 2 (1 - 2^-n)
        for (n, x) in t.points.iter().enumerate() {
            assert_eq!(x[0], 2.0 * (1.0 - 0.5f64.powi(n as i32)));
        }
        assert!((z[0] - 2.0).abs() <= 1e-8);
        assert!(t.iterations() <= 35);
        let bounds = t.bounds.as_ref().unwrap();
        for (s, bd) in t.step_d.iter().zip(bounds) {
            assert!(*s <= bd + 1e-12);
        }
    }

    #[test]
    fn fixed_start_converges_immediately() {
        let (b, m) = affine_on(0.0, 4.0, 0.5, 1.0);
        let t = iterate(&b, &m, &vec![2.0], 1e-10, 10, None).unwrap();
        assert_eq!(
            t.verdict,
            Verdict::Converged {
                n: 0,
                fixed_point: vec![2.0],
                residual: 0.0
            }
        );
        assert!(t.bounds.is_none());
    }

    #[test]
    fn three_cycle_is_detected() {
        let s = FiniteMetricSpace::from_reals(&[0.0, 1.0, 2.0]).unwrap();
        let cyc = TableMap::new(vec![1, 2, 0]).unwrap();
        for x0 in 0..3 {
            let t = iterate(&s, &cyc, &x0, 1e-10, 100, None).unwrap();
            assert_eq!(
                t.verdict,
                Verdict::CycleDetected {
                    period: 3,
                    entry: 0
                }
            );
            assert_eq!(t.points.len(), 4);
        }
        // tail into a 2-cycle
        let rho = TableMap::new(vec![1, 2, 1]).unwrap();
        let t = iterate(&s, &rho, &0, 1e-10, 100, None).unwrap();
        assert_eq!(
            t.verdict,
            Verdict::CycleDetected {
                period: 2,
                entry: 1
            }
        );
    }

    #[test]
    fn max_iters_and_errors() {
        let b = RealBoxSpace::interval(0.0, 1.0).unwrap();
        let r = FamilyMap::new(b.clone(), Family::Rational).unwrap();
        let t = iterate(&b, &r, &vec![1.0], 1e-10, 50, None).unwrap();
        assert_eq!(t.verdict, Verdict::MaxIters);
        assert_eq!(t.step_d.len(), 50);
        assert!(iterate(&b, &r, &vec![1.0], 1e-10, 0, None).is_err());
        assert!(iterate(&b, &r, &vec![1.0], 0.0, 10, None).is_err());
        assert!(iterate(&b, &r, &vec![2.0], 1e-10, 10, None).is_err());
    }

    #[test]
    fn a_priori_examples() {
        let id = AlteringFunction::Identity;
        assert_eq!(a_priori_bound(0, 0.5, 0.0, &id, 2.0).unwrap(), 2.0);
        assert_eq!(a_priori_bound(3, 0.5, 0.0, &id, 2.0).unwrap(), 0.25);
        assert_eq!(a_priori_bound(2, 0.3, 0.4, &id, 1.0).unwrap(), 0.25);
        assert!(a_priori_bound(1, 0.6, 0.4, &id, 1.0).is_err());
    }

    #[test]
    fn iteration_count_examples() {
        let id = AlteringFunction::Identity;
        // 2 * 2^-n <= 1e-8  <=>  n >= log2(2e8) ~ 27.6
        assert_eq!(iters_to_tolerance(0.5, 0.0, &id, 2.0, 1e-8).unwrap(), 28);
        assert_eq!(iters_to_tolerance(0.5, 0.0, &id, 0.0, 1e-8).unwrap(), 0);
        assert_eq!(iters_to_tolerance(0.5, 0.0, &id, 0.5, 0.7).unwrap(), 0);
        let sq = AlteringFunction::power(2.0).unwrap();
        // 4 * 0.25^n <= 1e-6  <=>  n >= ln(2.5e-7) / ln(0.25) ~ 10.97
        assert_eq!(iters_to_tolerance(0.25, 0.0, &sq, 2.0, 1e-3).unwrap(), 11);
    }

    fn harmonic(len: usize) -> Vec<Vec<f64>> {
        let mut h = 0.0;
        (0..len)
            .map(|i| {
                if i > 0 {
                    h += 1.0 / i as f64;
                }
                vec![h]
            })
            .collect()
    }

    #[test]
    fn harmonic_sums_have_a_witness() {
        let seq = harmonic(1000);
        let line = RealBoxSpace::interval(0.0, 100.0).unwrap();
        let w = find_cauchy_witness(&line, &seq, 0.5, 200).unwrap().unwrap();
        assert_eq!(w.indices.len(), 200);
        for ix in &w.indices {
            assert!(ix.m > ix.n && ix.n > ix.k);
            assert!(line.distance(&seq[ix.m], &seq[ix.n]).unwrap() >= 0.5);
            assert!(line.distance(&seq[ix.m - 1], &seq[ix.n]).unwrap() < 0.5);
        }
        let l = w.limits;
        for v in [l.prev_to_next, l.at_indices, l.prev_to_n, l.shifted] {
            assert!((v - 0.5).abs() <= 0.05, "{v}");
        }
    }

    #[test]
    fn cauchy_sequences_have_no_witness() {
        let line = RealBoxSpace::interval(0.0, 100.0).unwrap();
        let constant = vec![vec![1.0]; 100];
        assert!(find_cauchy_witness(&line, &constant, 0.5, 50)
            .unwrap()
            .is_none());
        let geometric: Vec<Vec<f64>> = (0..100).map(|n| vec![0.5f64.powi(n)]).collect();
        assert!(find_cauchy_witness(&line, &geometric, 0.5, 50)
            .unwrap()
            .is_none());
        assert!(find_cauchy_witness(&line, &constant, 0.0, 50).is_err());
        assert!(find_cauchy_witness(&line, &constant, 0.5, 100).is_err());
    }

    proptest! {
        #[test]
        fn bound_recurrence_is_exact(
            n in 0usize..200,
            a in 0.01f64..0.9,
            frac in 0.0f64..0.99,
            d01 in 0.0f64..10.0,
        ) {
            let b = (1.0 - a) * frac;
            prop_assume!(a + b < 1.0);
            let id = AlteringFunction::Identity;
            let lhs = a_priori_bound(n + 1, a, b, &id, d01).unwrap();
            let rhs = (a / (1.0 - b)) * a_priori_bound(n, a, b, &id, d01).unwrap();
            prop_assert_eq!(lhs, rhs);
            prop_assert!(lhs <= a_priori_bound(n, a, b, &id, d01).unwrap());
        }

        #[test]
        fn iteration_count_is_minimal(
            a in 0.05f64..0.95,
            d01 in 1e-3f64..100.0,
            tol in 1e-10f64..1.0,
        ) {
            let id = AlteringFunction::Identity;
            let n = iters_to_tolerance(a, 0.0, &id, d01, tol).unwrap();
            prop_assert!(a_priori_bound(n, a, 0.0, &id, d01).unwrap() <= tol);
            if n > 0 {
                prop_assert!(a_priori_bound(n - 1, a, 0.0, &id, d01).unwrap() > tol);
            }
        }

        #[test]
        fn geometric_envelope_holds_for_affine_contractions(
            slope in -0.9f64..0.9,
            x0 in -1.0f64..1.0,
        ) {
            let b = RealBoxSpace::interval(-1.0, 1.0).unwrap();
            let m = FamilyMap::new(b.clone(), Family::affine_1d(slope, 0.0)).unwrap();
            let k = slope.abs().max(1e-3);
            let c = BoundConstants::new(k, 0.0, AlteringFunction::Identity).unwrap();
            let t = iterate(&b, &m, &vec![x0], 1e-12, 10_000, Some(&c)).unwrap();
            for (n, (s, bd)) in t.step_d.iter().zip(t.bounds.as_ref().unwrap()).enumerate() {
                prop_assert!(*s <= bd + 1e-12, "n={} step={} bound={}", n, s, bd);
            }
            for i in 0..t.step_d.len() {
                prop_assert_eq!(t.step_d[i], (t.points[i][0] - t.points[i + 1][0]).abs());
            }
        }
    }
}
