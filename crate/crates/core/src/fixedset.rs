//! Fixed-point sets of `S` and its powers, property P, and periodic points.
//!
//! `S` has property P when `F(S) = F(S^n)` for every `n`, i.e. when its
//! iterates introduce no new fixed points. On finite spaces all sets are
//! computed exactly; on boxes they come from a multi-start search and are
//! only sampled evidence.

use rand::SeedableRng;
use serde::Serialize;

use crate::altering::AlteringFunction;
use crate::contraction::{check_constants, Evidence, DEFAULT_NUM_TOL};
use crate::error::{Error, Result};
use crate::picard::{iterate, DEFAULT_FIX_TOL};
use crate::spaces::{MetricSpace, SeededRng, SelfMap};

/// Multi-start settings for fixed-point search on continuous spaces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    /// Deterministic grid starts.
    pub grid_starts: usize,
    /// Extra uniformly drawn starts.
    pub random_starts: usize,
    pub seed: u64,
    pub fix_tol: f64,
    pub max_iters: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            grid_starts: 16,
            random_starts: 16,
            seed: 0,
            fix_tol: DEFAULT_FIX_TOL,
            max_iters: 100_000,
        }
    }
}

/// `F(S)`. Exact on finite spaces (`{x : Sx = x}` in index order); on
/// continuous spaces, the deduplicated limits of multi-start iteration that
/// pass `d(z, Sz) <= fix_tol`.
pub fn fixed_points<S, M>(space: &S, map: &M, opts: &SearchOptions) -> Result<Vec<S::Point>>
where
    S: MetricSpace,
    M: SelfMap<Point = S::Point>,
{
    if let Some(all) = space.all_points() {
        let mut out = Vec::new();
        for x in all {
            if space.same_point(&map.apply(&x)?, &x) {
                out.push(x);
            }
        }
        return Ok(out);
    }

    let mut starts = space.grid_points(opts.grid_starts);
    let mut rng = SeededRng::seed_from_u64(opts.seed);
    starts.extend((0..opts.random_starts).map(|_| space.random_point(&mut rng)));

    let mut found: Vec<S::Point> = Vec::new();
    for x0 in &starts {
        let trace = iterate(space, map, x0, opts.fix_tol, opts.max_iters, None)?;
        if let Some(z) = trace.fixed_point() {
            let residual = space.distance(z, &map.apply(z)?)?;
            if residual <= opts.fix_tol && !found.iter().any(|f| space.same_point(f, z)) {
                found.push(z.clone());
            }
        }
    }
    Ok(found)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerRow<P> {
    pub n: usize,
    /// `F(S^n)`
    pub fixed: Vec<P>,
    /// `F(S^n) = F(S)`
    pub equal: bool,
}

/// A point with `S^n z = z` and `S z != z`; `period` is the least such `n`
/// up to the checked power.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicWitness<P> {
    pub point: P,
    pub period: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PropertyPStatus {
    /// `F(S)` is nonempty and equals every `F(S^n)`.
    Holds,
    /// Some `F(S^n)` differs from `F(S)`.
    Fails,
    /// `F(S)` and every `F(S^n)` are empty; property P presupposes a
    /// nonempty fixed-point set.
    Undefined,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyPReport<P> {
    pub n_max: usize,
    pub evidence: Evidence,
    /// `F(S)`
    pub fixed: Vec<P>,
    /// One row per `n` in `2..=n_max`.
    pub rows: Vec<PowerRow<P>>,
    pub witnesses: Vec<PeriodicWitness<P>>,
    pub status: PropertyPStatus,
}

impl<P> PropertyPReport<P> {
    pub fn holds(&self) -> bool {
        self.status == PropertyPStatus::Holds
    }
}

fn same_set<S: MetricSpace>(space: &S, xs: &[S::Point], ys: &[S::Point]) -> bool {
    xs.iter().all(|x| ys.iter().any(|y| space.same_point(x, y)))
        && ys.iter().all(|y| xs.iter().any(|x| space.same_point(x, y)))
}

/// Computes `F(S^n)` for `n = 2..=n_max` and compares each with `F(S)`.
pub fn check_property_p<S, M>(
    space: &S,
    map: &M,
    n_max: usize,
    opts: &SearchOptions,
) -> Result<PropertyPReport<S::Point>>
where
    S: MetricSpace,
    M: SelfMap<Point = S::Point>,
{
    if n_max < 2 {
        return Err(Error::domain(format!(
            "n_max must be at least 2, got {n_max}"
        )));
    }
    let fixed = fixed_points(space, map, opts)?;
    let mut rows = Vec::with_capacity(n_max - 1);
    let mut witnesses: Vec<PeriodicWitness<S::Point>> = Vec::new();
    for n in 2..=n_max {
        let power = map.compose(n)?;
        let fixed_n = fixed_points(space, &power, opts)?;
        for z in &fixed_n {
            let new = !fixed.iter().any(|f| space.same_point(f, z));
            let seen = witnesses.iter().any(|w| space.same_point(&w.point, z));
            if new && !seen {
                witnesses.push(PeriodicWitness {
                    point: z.clone(),
                    period: n,
                });
            }
        }
        let equal = same_set(space, &fixed, &fixed_n);
        rows.push(PowerRow {
            n,
            fixed: fixed_n,
            equal,
        });
    }

    let status = if rows.iter().any(|r| !r.equal) {
        PropertyPStatus::Fails
    } else if fixed.is_empty() {
        PropertyPStatus::Undefined
    } else {
        PropertyPStatus::Holds
    };
    let evidence = if space.all_points().is_some() {
        Evidence::Exhaustive
    } else {
        Evidence::Sampled
    };
    Ok(PropertyPReport {
        n_max,
        evidence,
        fixed,
        rows,
        witnesses,
        status,
    })
}

/// Both sides of `psi(d(z, Sz)) <= (a / (1 - b))^n psi(d(z, Sz))` for a
/// point with `S^n z = z`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    pub n: usize,
    /// `psi(d(z, Sz))`
    pub lhs: f64,
    /// `(a / (1 - b))^n`
    pub factor: f64,
    pub rhs: f64,
    /// `psi(d(S^k z, S^{k+1} z))` for `k = 0..=n`.
    pub steps: Vec<f64>,
    /// `lhs <= rhs + tol`
    pub holds: bool,
}

/// Evaluates the periodic-point chain at `z`.
///
/// If the map really satisfies the condition with `(a, b, psi)`, the chain
/// holds, and since the factor is below one it pins `psi(d(z, Sz))` to at
/// most `tol / (1 - factor)`. A violated chain at a genuine periodic point
/// shows the constants cannot be valid for the map.
pub fn refute_periodic_chain<S, M>(
    space: &S,
    map: &M,
    z: &S::Point,
    n: usize,
    a: f64,
    b: f64,
    psi: &AlteringFunction,
) -> Result<ChainReport>
where
    S: MetricSpace,
    M: SelfMap<Point = S::Point>,
{
    check_constants(a, b)?;
    if n == 0 {
        return Err(Error::domain("period must be at least 1"));
    }
    let mut orbit = vec![z.clone()];
    for k in 0..=n {
        let next = map.apply(&orbit[k])?;
        orbit.push(next);
    }
    if !space.same_point(&orbit[n], z) {
        return Err(Error::domain(format!("S^{n} does not fix {z:?}")));
    }
    let steps = (0..=n)
        .map(|k| psi.evaluate(space.distance(&orbit[k], &orbit[k + 1])?))
        .collect::<Result<Vec<_>>>()?;
    let ratio = a / (1.0 - b);
    let factor = (0..n).fold(1.0, |acc, _| acc * ratio);
    let lhs = steps[0];
    let rhs = factor * lhs;
    Ok(ChainReport {
        n,
        lhs,
        factor,
        rhs,
        steps,
        holds: lhs <= rhs + DEFAULT_NUM_TOL,
    })
}
