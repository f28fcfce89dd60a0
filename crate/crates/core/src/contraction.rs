//! Contractive conditions and their certification.
//!
//! For a pair `(x, y)` the generalized rational condition reads
//!
//! ```text
//! psi(d(Sx, Sy)) <= a psi(d(x, y)) + b psi(m(x, y)),
//! m(x, y) = d(y, Sy) (1 + d(x, Sx)) / (1 + d(x, y)).
//! ```
//!
//! Every pair therefore contributes one half-plane in the `(a, b)` plane.
//! [`certify`] intersects those half-planes with the admissible triangle
//! `a >= margin, b >= 0, a + b <= 1 - margin` by exact vertex enumeration and
//! picks the vertex with the smallest `a + b`.

use std::cmp::Ordering;
use std::fmt;

use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::altering::AlteringFunction;
use crate::error::{Error, Result};
use crate::spaces::{MetricSpace, SeededRng, SelfMap};

/// Default tolerance on inequality slacks.
pub const DEFAULT_NUM_TOL: f64 = 1e-12;
/// Default margin enforcing the strict inequalities `a > 0`, `a + b < 1`.
pub const DEFAULT_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionKind {
    /// `psi(d(Sx,Sy)) <= a psi(d(x,y))`, `b = 0`.
    BanachKhan,
    /// The rational condition with `psi` the identity.
    DasGupta,
    /// The rational condition with an arbitrary altering function.
    Generalized,
    /// The rational condition with an integral-type altering function.
    Integral,
}

impl ConditionKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ConditionKind::BanachKhan => "banach_khan",
            ConditionKind::DasGupta => "das_gupta",
            ConditionKind::Generalized => "generalized",
            ConditionKind::Integral => "integral",
        }
    }

    /// Checks that `psi` is of the kind this condition expects.
    pub fn check_psi(&self, psi: &AlteringFunction) -> Result<()> {
        match self {
            ConditionKind::DasGupta if !psi.is_identity() => Err(Error::domain(format!(
                "das_gupta uses the identity altering function, got {psi}"
            ))),
            ConditionKind::Integral if !psi.is_integral() => Err(Error::domain(format!(
                "the integral condition needs an integral-type altering function, got {psi}"
            ))),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for ConditionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A contractive condition with fixed constants.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionCondition {
    kind: ConditionKind,
    psi: AlteringFunction,
    a: f64,
    b: f64,
}

impl ContractionCondition {
    /// Requires `a > 0`, `b >= 0`, `a + b < 1`, and `b = 0` for `banach_khan`.
    pub fn new(kind: ConditionKind, psi: AlteringFunction, a: f64, b: f64) -> Result<Self> {
        check_constants(a, b)?;
        if kind == ConditionKind::BanachKhan && b != 0.0 {
            return Err(Error::domain(format!(
                "banach_khan requires b = 0, got {b}"
            )));
        }
        kind.check_psi(&psi)?;
        Ok(Self { kind, psi, a, b })
    }

    pub fn kind(&self) -> ConditionKind {
        self.kind
    }

    pub fn psi(&self) -> &AlteringFunction {
        &self.psi
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }
}

pub(crate) fn check_constants(a: f64, b: f64) -> Result<()> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::domain(format!(
            "constant a must be positive, got {a}"
        )));
    }
    if !(b >= 0.0 && b.is_finite()) {
        return Err(Error::domain(format!(
            "constant b must be nonnegative, got {b}"
        )));
    }
    if !(a + b < 1.0) {
        return Err(Error::domain(format!(
            "constants need a + b < 1, got a + b = {}",
            a + b
        )));
    }
    Ok(())
}

/// `m(x, y) = d(y, Sy) (1 + d(x, Sx)) / (1 + d(x, y))`.
pub fn evaluate_m<S, M>(space: &S, map: &M, x: &S::Point, y: &S::Point) -> Result<f64>
where
    S: MetricSpace,
    M: SelfMap<Point = S::Point>,
{
    let sx = map.apply(x)?;
    let sy = map.apply(y)?;
    Ok(rational_term(
        space.distance(y, &sy)?,
        space.distance(x, &sx)?,
        space.distance(x, y)?,
    ))
}

fn rational_term(d_y_sy: f64, d_x_sx: f64, d_xy: f64) -> f64 {
    d_y_sy * (1.0 + d_x_sx) / (1.0 + d_xy)
}

/// Raw distances for one pair.
#[derive(Debug, Clone, Copy, PartialEq)]
struct PairDistances {
    d_xy: f64,
    d_image: f64,
    m: f64,
}

fn pair_distances<S, M>(space: &S, map: &M, x: &S::Point, y: &S::Point) -> Result<PairDistances>
where
    S: MetricSpace,
    M: SelfMap<Point = S::Point>,
{
    let sx = map.apply(x)?;
    let sy = map.apply(y)?;
    let d_xy = space.distance(x, y)?;
    Ok(PairDistances {
        d_xy,
        d_image: space.distance(&sx, &sy)?,
        m: rational_term(space.distance(y, &sy)?, space.distance(x, &sx)?, d_xy),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub satisfied: bool,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`
    pub slack: f64,
}

/// Evaluates the condition at `(x, y)` with the default slack tolerance.
pub fn check_inequality<S, M>(
    cond: &ContractionCondition,
    space: &S,
    map: &M,
    x: &S::Point,
    y: &S::Point,
) -> Result<InequalityCheck>
where
    S: MetricSpace,
    M: SelfMap<Point = S::Point>,
{
    check_inequality_with_tol(cond, space, map, x, y, DEFAULT_NUM_TOL)
}

pub fn check_inequality_with_tol<S, M>(
    cond: &ContractionCondition,
    space: &S,
    map: &M,
    x: &S::Point,
    y: &S::Point,
    tol: f64,
) -> Result<InequalityCheck>
where
    S: MetricSpace,
    M: SelfMap<Point = S::Point>,
{
    let pd = pair_distances(space, map, x, y)?;
    let psi = &cond.psi;
    let lhs = psi.evaluate(pd.d_image)?;
    let mut rhs = cond.a * psi.evaluate(pd.d_xy)?;
    if cond.kind != ConditionKind::BanachKhan {
        rhs += cond.b * psi.evaluate(pd.m)?;
    }
    let slack = rhs - lhs;
    Ok(InequalityCheck {
        satisfied: slack >= -tol,
        lhs,
        rhs,
        slack,
    })
}

/// Whether a certificate covers every pair of the space or only a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Evidence {
    Sampled,
    Exhaustive,
}

/// The point pairs a certificate is computed over.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSample<P> {
    pub pairs: Vec<(P, P)>,
    pub evidence: Evidence,
    pub seed: Option<u64>,
}

impl<P: Clone> PairSample<P> {
    /// All ordered pairs of a finite space.
    pub fn exhaustive<S>(space: &S) -> Result<Self>
    where
        S: MetricSpace<Point = P>,
    {
        let pts = space
            .all_points()
            .ok_or_else(|| Error::domain("exhaustive pair samples need a finite space"))?;
        let pairs = pts
            .iter()
            .flat_map(|x| pts.iter().map(move |y| (x.clone(), y.clone())))
            .collect();
        Ok(Self {
            pairs,
            evidence: Evidence::Exhaustive,
            seed: None,
        })
    }

    /// All ordered pairs of a deterministic grid of `grid_points` points, plus
    /// `random_pairs` uniformly drawn pairs from a generator seeded by `seed`.
    pub fn sampled<S>(space: &S, grid_points: usize, random_pairs: usize, seed: u64) -> Self
    where
        S: MetricSpace<Point = P>,
    {
        let grid = space.grid_points(grid_points);
        let mut pairs: Vec<(P, P)> = grid
            .iter()
            .flat_map(|x| grid.iter().map(move |y| (x.clone(), y.clone())))
            .collect();
        let mut rng = SeededRng::seed_from_u64(seed);
        for _ in 0..random_pairs {
            let x = space.random_point(&mut rng);
            let y = space.random_point(&mut rng);
            pairs.push((x, y));
        }
        Self {
            pairs,
            evidence: Evidence::Sampled,
            seed: Some(seed),
        }
    }

    pub fn explicit(pairs: Vec<(P, P)>, evidence: Evidence) -> Self {
        Self {
            pairs,
            evidence,
            seed: None,
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Which fixed-point result the certified constants invoke.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Justification {
    /// `b = 0`: the altering-distance Banach principle.
    AlteringBanach,
    /// Rational condition with `psi` the identity.
    DasGupta,
    /// Rational condition with a general altering function.
    Generalized,
    /// Rational condition with an integral-type altering function.
    IntegralType,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleInfo {
    pub pair_count: usize,
    pub seed: Option<u64>,
    pub evidence: Evidence,
}

/// Evidence that `(a, b)` satisfies a condition over a set of pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractionCertificate {
    pub kind: ConditionKind,
    pub psi: String,
    pub margin: f64,
    pub feasible: bool,
    /// `(a, b)`, present iff feasible.
    pub chosen: Option<(f64, f64)>,
    pub justification: Option<Justification>,
    /// Feasible polygon, counterclockwise.
    pub vertices: Vec<(f64, f64)>,
    /// Per-pair `rhs - lhs` at the chosen constants, in sample order.
    pub slacks: Vec<f64>,
    pub min_slack: Option<f64>,
    /// Sample indices of the pairs that rule out every admissible `(a, b)`.
    pub violating_pairs: Vec<usize>,
    pub sample: SampleInfo,
}

impl ContractionCertificate {
    pub fn a(&self) -> Option<f64> {
        self.chosen.map(|c| c.0)
    }

    pub fn b(&self) -> Option<f64> {
        self.chosen.map(|c| c.1)
    }

    pub fn is_exhaustive(&self) -> bool {
        self.sample.evidence == Evidence::Exhaustive
    }
}

/// Half-plane `p a + q b >= r`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct HalfPlane {
    p: f64,
    q: f64,
    r: f64,
}

impl HalfPlane {
    fn slack(&self, a: f64, b: f64) -> f64 {
        self.p * a + self.q * b - self.r
    }

    fn contains(&self, a: f64, b: f64, tol: f64) -> bool {
        let scale = 1f64.max((self.p * a).abs() + (self.q * b).abs() + self.r.abs());
        self.slack(a, b) >= -tol * scale
    }

    fn cmp_total(&self, other: &Self) -> Ordering {
        self.p
            .total_cmp(&other.p)
            .then(self.q.total_cmp(&other.q))
            .then(self.r.total_cmp(&other.r))
    }
}

fn check_margin(margin: f64) -> Result<()> {
    if margin > 0.0 && margin < 0.5 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "margin must lie in (0, 0.5), got {margin}"
        )))
    }
}

fn pair_half_planes<S, M>(
    space: &S,
    map: &M,
    psi: &AlteringFunction,
    kind: ConditionKind,
    sample: &PairSample<S::Point>,
) -> Result<Vec<HalfPlane>>
where
    S: MetricSpace,
    M: SelfMap<Point = S::Point>,
{
    if sample.is_empty() {
        return Err(Error::domain("certification needs at least one pair"));
    }
    kind.check_psi(psi)?;
    sample
        .pairs
        .iter()
        .map(|(x, y)| {
            let pd = pair_distances(space, map, x, y)?;
            let q = if kind == ConditionKind::BanachKhan {
                0.0
            } else {
                psi.evaluate(pd.m)?
            };
            Ok(HalfPlane {
                p: psi.evaluate(pd.d_xy)?,
                q,
                r: psi.evaluate(pd.d_image)?,
            })
        })
        .collect()
}

fn admissible_region(margin: f64, banach: bool) -> Vec<HalfPlane> {
    let mut out = vec![
        HalfPlane {
            p: 1.0,
            q: 0.0,
            r: margin,
        },
        HalfPlane {
            p: 0.0,
            q: 1.0,
            r: 0.0,
        },
        HalfPlane {
            p: -1.0,
            q: -1.0,
            r: -(1.0 - margin),
        },
    ];
    if banach {
        out.push(HalfPlane {
            p: 0.0,
            q: -1.0,
            r: 0.0,
        });
    }
    out
}

/// Drops half-planes that cannot shape the feasible region.
///
/// Every pair half-plane has `p, q >= 0`. With `r > 0` it is `u a + v b >= 1`
/// for `(u, v) = (p, q) / r`, and is implied by any other whose `(u, v)` is
/// componentwise smaller, or by a pair of others whose segment passes below
/// it. What survives is the lower-left convex chain of the `(u, v)` cloud.
/// Half-planes with `r <= 0` hold on the whole admissible triangle.
fn essential_half_planes(planes: &[HalfPlane]) -> Vec<HalfPlane> {
    let mut scaled: Vec<(f64, f64, HalfPlane)> = planes
        .iter()
        .filter(|h| h.r > 0.0)
        .map(|h| (h.p / h.r, h.q / h.r, *h))
        .collect();
    scaled.sort_by(|x, y| {
        x.0.total_cmp(&y.0)
            .then(x.1.total_cmp(&y.1))
            .then(x.2.cmp_total(&y.2))
    });

    let mut pareto: Vec<(f64, f64, HalfPlane)> = Vec::new();
    for s in scaled {
        if pareto.last().is_none_or(|last| s.1 < last.1) {
            pareto.push(s);
        }
    }

    let mut chain: Vec<(f64, f64, HalfPlane)> = Vec::with_capacity(pareto.len());
    for s in pareto {
        while chain.len() >= 2 {
            let o = chain[chain.len() - 2];
            let m = chain[chain.len() - 1];
            // m is kept only when it lies strictly on the origin side of o->s
            let cross = (m.0 - o.0) * (s.1 - o.1) - (m.1 - o.1) * (s.0 - o.0);
            if cross <= 0.0 {
                chain.pop();
            } else {
                break;
            }
        }
        chain.push(s);
    }
    chain.into_iter().map(|s| s.2).collect()
}

const VERTEX_MERGE_TOL: f64 = 1e-12;

/// Vertices of `{(a, b) : every half-plane holds}`, counterclockwise.
fn enumerate_vertices(planes: &[HalfPlane], tol: f64) -> Vec<(f64, f64)> {
    let mut pts = Vec::new();
    for (i, h1) in planes.iter().enumerate() {
        for h2 in &planes[i + 1..] {
            let det = h1.p * h2.q - h1.q * h2.p;
            let scale = (h1.p.abs() + h1.q.abs()) * (h2.p.abs() + h2.q.abs());
            if det.abs() <= 1e-15 * scale {
                continue;
            }
            let a = (h1.r * h2.q - h1.q * h2.r) / det;
            let b = (h1.p * h2.r - h1.r * h2.p) / det;
            if planes.iter().all(|h| h.contains(a, b, tol)) {
                // `+ 0.0` turns -0.0 into 0.0
                pts.push((a + 0.0, b + 0.0));
            }
        }
    }
    pts.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    let mut uniq: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for p in pts {
        if !uniq
            .iter()
            .any(|q| (q.0 - p.0).abs() <= VERTEX_MERGE_TOL && (q.1 - p.1).abs() <= VERTEX_MERGE_TOL)
        {
            uniq.push(p);
        }
    }
    if uniq.len() > 2 {
        let n = uniq.len() as f64;
        let ca = uniq.iter().map(|p| p.0).sum::<f64>() / n;
        let cb = uniq.iter().map(|p| p.1).sum::<f64>() / n;
        uniq.sort_by(|x, y| {
            let tx = (x.1 - cb).atan2(x.0 - ca);
            let ty = (y.1 - cb).atan2(y.0 - ca);
            tx.total_cmp(&ty)
        });
    }
    uniq
}

fn polygon(pair_planes: &[HalfPlane], margin: f64, banach: bool) -> Vec<(f64, f64)> {
    if pair_planes
        .iter()
        .any(|h| h.p == 0.0 && h.q == 0.0 && h.r > 0.0)
    {
        return Vec::new();
    }
    let mut planes = admissible_region(margin, banach);
    planes.extend(essential_half_planes(pair_planes));
    enumerate_vertices(&planes, DEFAULT_NUM_TOL)
}

/// Vertices of the feasible `(a, b)` polygon, counterclockwise; empty iff no
/// admissible constants satisfy every sampled pair.
pub fn feasible_region_vertices<S, M>(
    space: &S,
    map: &M,
    psi: &AlteringFunction,
    kind: ConditionKind,
    sample: &PairSample<S::Point>,
    margin: f64,
) -> Result<Vec<(f64, f64)>>
where
    S: MetricSpace,
    M: SelfMap<Point = S::Point>,
{
    check_margin(margin)?;
    let planes = pair_half_planes(space, map, psi, kind, sample)?;
    Ok(polygon(&planes, margin, kind == ConditionKind::BanachKhan))
}

/// Certifies the condition over `sample`.
///
/// The result is independent of pair order. When feasible, the chosen
/// constants are the vertex minimizing `a + b`, ties going to the smaller `a`.
pub fn certify<S, M>(
    space: &S,
    map: &M,
    psi: &AlteringFunction,
    kind: ConditionKind,
    sample: &PairSample<S::Point>,
    margin: f64,
) -> Result<ContractionCertificate>
where
    S: MetricSpace,
    M: SelfMap<Point = S::Point>,
{
    check_margin(margin)?;
    let banach = kind == ConditionKind::BanachKhan;
    let planes = pair_half_planes(space, map, psi, kind, sample)?;
    let vertices = polygon(&planes, margin, banach);

    let chosen = vertices
        .iter()
        .map(|v| v.0 + v.1)
        .min_by(f64::total_cmp)
        .and_then(|best| {
            vertices
                .iter()
                .filter(|v| v.0 + v.1 <= best + DEFAULT_NUM_TOL)
                .min_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)))
                .copied()
        });

    let (slacks, violating_pairs, justification) = match chosen {
        Some((a, b)) => {
            let slacks: Vec<f64> = planes.iter().map(|h| h.slack(a, b)).collect();
            let just = if b == 0.0 {
                Justification::AlteringBanach
            } else {
                match kind {
                    ConditionKind::BanachKhan => Justification::AlteringBanach,
                    ConditionKind::DasGupta => Justification::DasGupta,
                    ConditionKind::Generalized => Justification::Generalized,
                    ConditionKind::Integral => Justification::IntegralType,
                }
            };
            (slacks, Vec::new(), Some(just))
        }
        None => (Vec::new(), blocking_pairs(&planes, margin, banach), None),
    };
    let min_slack = slacks.iter().copied().min_by(f64::total_cmp);

    Ok(ContractionCertificate {
        kind,
        psi: psi.to_string(),
        margin,
        feasible: chosen.is_some(),
        chosen,
        justification,
        vertices,
        slacks,
        min_slack,
        violating_pairs,
        sample: SampleInfo {
            pair_count: sample.len(),
            seed: sample.seed,
            evidence: sample.evidence,
        },
    })
}

/// Pairs that alone exclude the whole admissible region; if infeasibility
/// only arises jointly, the pairs violated at the admissible corner that
/// violates the fewest.
fn blocking_pairs(planes: &[HalfPlane], margin: f64, banach: bool) -> Vec<usize> {
    let mut corners = vec![(margin, 0.0), (1.0 - margin, 0.0)];
    if !banach {
        corners.push((margin, 1.0 - 2.0 * margin));
    }
    let alone: Vec<usize> = planes
        .iter()
        .enumerate()
        .filter(|(_, h)| {
            !corners
                .iter()
                .any(|c| h.contains(c.0, c.1, DEFAULT_NUM_TOL))
        })
        .map(|(i, _)| i)
        .collect();
    if !alone.is_empty() {
        return alone;
    }
    corners
        .iter()
        .map(|c| {
            planes
                .iter()
                .enumerate()
                .filter(|(_, h)| !h.contains(c.0, c.1, DEFAULT_NUM_TOL))
                .map(|(i, _)| i)
                .collect::<Vec<_>>()
        })
        .min_by_key(|v| v.len())
        .unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::altering::{make_integral_psi, Density};
    use crate::spaces::{Family, FamilyMap, FiniteMetricSpace, RealBoxSpace, TableMap};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn half_on_unit() -> (RealBoxSpace, FamilyMap) {
        let b = RealBoxSpace::interval(0.0, 1.0).unwrap();
        let m = FamilyMap::new(b.clone(), Family::affine_1d(0.5, 0.0)).unwrap();
        (b, m)
    }

    #[test]
    fn m_examples() {
        let (b, half) = half_on_unit();
        assert_eq!(evaluate_m(&b, &half, &vec![1.0], &vec![0.0]).unwrap(), 0.0);
        assert_eq!(evaluate_m(&b, &half, &vec![0.0], &vec![1.0]).unwrap(), 0.25);
        // x = y: delta (1 + delta) / 1
        let delta: f64 = 0.3;
        assert_abs_diff_eq!(
            evaluate_m(&b, &half, &vec![0.6], &vec![0.6]).unwrap(),
            delta * (1.0 + delta),
            epsilon = 1e-15
        );
    }

    #[test]
    fn inequality_examples() {
        let (b, half) = half_on_unit();
        let cond = ContractionCondition::new(
            ConditionKind::Generalized,
            AlteringFunction::Identity,
            0.6,
            0.1,
        )
        .unwrap();
        let c = check_inequality(&cond, &b, &half, &vec![0.0], &vec![1.0]).unwrap();
        assert_eq!(c.lhs, 0.5);
        assert_abs_diff_eq!(c.rhs, 0.625, epsilon = 1e-15);
        assert_abs_diff_eq!(c.slack, 0.125, epsilon = 1e-15);
        assert!(c.satisfied);

        let same = check_inequality(&cond, &b, &half, &vec![0.4], &vec![0.4]).unwrap();
        assert_eq!(same.lhs, 0.0);
        assert!(same.satisfied);

        let id = FamilyMap::new(b.clone(), Family::affine_1d(1.0, 0.0)).unwrap();
        let dg = ContractionCondition::new(
            ConditionKind::DasGupta,
            AlteringFunction::Identity,
            0.7,
            0.2,
        )
        .unwrap();
        let v = check_inequality(&dg, &b, &id, &vec![0.2], &vec![0.9]).unwrap();
        assert!(!v.satisfied);
        assert_abs_diff_eq!(v.rhs, 0.7 * 0.7, epsilon = 1e-15);
    }

    #[test]
    fn condition_constructor_rejects_bad_constants() {
        let id = AlteringFunction::Identity;
        let k = ConditionKind::Generalized;
        assert!(ContractionCondition::new(k, id.clone(), 0.0, 0.1).is_err());
        assert!(ContractionCondition::new(k, id.clone(), 0.5, -0.1).is_err());
        assert!(ContractionCondition::new(k, id.clone(), 0.5, 0.5).is_err());
        assert!(
            ContractionCondition::new(ConditionKind::BanachKhan, id.clone(), 0.5, 0.1).is_err()
        );
        assert!(ContractionCondition::new(
            ConditionKind::DasGupta,
            AlteringFunction::power(2.0).unwrap(),
            0.5,
            0.1
        )
        .is_err());
        assert!(ContractionCondition::new(ConditionKind::Integral, id, 0.5, 0.1).is_err());
    }

    #[test]
    fn half_map_grid_certificate() {
        let (b, half) = half_on_unit();
        let sample = PairSample::sampled(&b, 201, 0, 0);
        // independent oracle: sup over distinct grid pairs of d(Sx,Sy)/d(x,y)
        let grid = b.grid_points(201);
        let mut sup = 0.0f64;
        for x in &grid {
            for y in &grid {
                if x != y {
                    sup = sup.max((x[0] / 2.0 - y[0] / 2.0).abs() / (x[0] - y[0]).abs());
                }
            }
        }
        assert_abs_diff_eq!(sup, 0.5, epsilon = 1e-15);

        let cert = certify(
            &b,
            &half,
            &AlteringFunction::Identity,
            ConditionKind::Generalized,
            &sample,
            1e-6,
        )
        .unwrap();
        assert!(cert.feasible);
        let (a, bb) = cert.chosen.unwrap();
        assert_abs_diff_eq!(a, sup, epsilon = 1e-12);
        assert_eq!(bb, 0.0);
        assert_eq!(cert.justification, Some(Justification::AlteringBanach));
        assert_eq!(cert.sample.evidence, Evidence::Sampled);
        assert_eq!(cert.sample.pair_count, 201 * 201);
        assert!(cert.min_slack.unwrap() >= -DEFAULT_NUM_TOL);
        assert!(cert
            .vertices
            .iter()
            .any(|v| (v.0 - 0.5).abs() < 1e-12 && v.1 == 0.0));
    }

    #[test]
    fn identity_map_is_infeasible() {
        let s = FiniteMetricSpace::from_matrix(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let id = TableMap::identity(2);
        let sample = PairSample::exhaustive(&s).unwrap();
        let cert = certify(
            &s,
            &id,
            &AlteringFunction::Identity,
            ConditionKind::DasGupta,
            &sample,
            DEFAULT_MARGIN,
        )
        .unwrap();
        assert!(!cert.feasible);
        assert!(cert.chosen.is_none());
        // pairs (0,1) and (1,0)
        assert_eq!(cert.violating_pairs, vec![1, 2]);
        assert!(feasible_region_vertices(
            &s,
            &id,
            &AlteringFunction::Identity,
            ConditionKind::DasGupta,
            &sample,
            DEFAULT_MARGIN
        )
        .unwrap()
        .is_empty());
    }

    #[test]
    fn constant_map_certificate_and_region() {
        let s = FiniteMetricSpace::from_reals(&[0.0, 1.0, 3.0]).unwrap();
        let c = TableMap::constant(3, 1).unwrap();
        let sample = PairSample::exhaustive(&s).unwrap();
        let cert = certify(
            &s,
            &c,
            &AlteringFunction::Identity,
            ConditionKind::Generalized,
            &sample,
            1e-6,
        )
        .unwrap();
        assert_eq!(cert.chosen, Some((1e-6, 0.0)));

        let v = feasible_region_vertices(
            &s,
            &c,
            &AlteringFunction::Identity,
            ConditionKind::Generalized,
            &sample,
            0.01,
        )
        .unwrap();
        assert_eq!(v.len(), 3);
        let expect = [(0.01, 0.0), (0.99, 0.0), (0.01, 0.98)];
        for (got, want) in v.iter().zip(expect) {
            assert_abs_diff_eq!(got.0, want.0, epsilon = 1e-12);
            assert_abs_diff_eq!(got.1, want.1, epsilon = 1e-12);
        }
    }

    #[test]
    fn certify_argument_errors() {
        let s = FiniteMetricSpace::from_reals(&[0.0, 1.0]).unwrap();
        let c = TableMap::constant(2, 0).unwrap();
        let empty = PairSample::explicit(vec![], Evidence::Sampled);
        let id = AlteringFunction::Identity;
        assert!(certify(&s, &c, &id, ConditionKind::Generalized, &empty, 1e-6).is_err());
        let full = PairSample::exhaustive(&s).unwrap();
        assert!(certify(&s, &c, &id, ConditionKind::Generalized, &full, 0.0).is_err());
        assert!(certify(&s, &c, &id, ConditionKind::Generalized, &full, 0.5).is_err());
        assert!(certify(&s, &c, &id, ConditionKind::Integral, &full, 1e-6).is_err());
    }

    #[test]
    fn banach_certificates_have_zero_b() {
        let s = FiniteMetricSpace::from_reals(&[0.0, 1.0, 2.0, 4.0]).unwrap();
        let map = TableMap::new(vec![1, 1, 1, 2]).unwrap();
        let sample = PairSample::exhaustive(&s).unwrap();
        let cert = certify(
            &s,
            &map,
            &AlteringFunction::Identity,
            ConditionKind::BanachKhan,
            &sample,
            1e-6,
        )
        .unwrap();
        assert!(cert.feasible);
        assert_eq!(cert.b(), Some(0.0));
        assert!(cert.vertices.iter().all(|v| v.1 == 0.0));
        // sup ratio: (3,2) -> d(2,1)/d(4,2) = 1/2
        assert_abs_diff_eq!(cert.a().unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn rational_region_contains_banach_segment() {
        let s = FiniteMetricSpace::from_reals(&[0.0, 1.0, 10.0]).unwrap();
        let map = TableMap::new(vec![0, 0, 1]).unwrap();
        let sample = PairSample::exhaustive(&s).unwrap();
        let id = AlteringFunction::Identity;
        let bk = certify(&s, &map, &id, ConditionKind::BanachKhan, &sample, 1e-6).unwrap();
        let dg = certify(&s, &map, &id, ConditionKind::DasGupta, &sample, 1e-6).unwrap();
        // worst ratio is d(0,1)/d(1,10) = 1/9
        assert_abs_diff_eq!(bk.a().unwrap(), 1.0 / 9.0, epsilon = 1e-15);
        assert!(dg.a().unwrap() + dg.b().unwrap() <= bk.a().unwrap() + 1e-12);
    }

    #[test]
    fn integral_psi_reproduces_identity_verdicts() {
        let b = RealBoxSpace::interval(0.0, 3.0).unwrap();
        let map = FamilyMap::new(b.clone(), Family::Rational).unwrap();
        let psi0 = make_integral_psi(Density::constant(1.0).unwrap(), Default::default()).unwrap();
        let gen = ContractionCondition::new(ConditionKind::Integral, psi0, 0.6, 0.3).unwrap();
        let dg = ContractionCondition::new(
            ConditionKind::DasGupta,
            AlteringFunction::Identity,
            0.6,
            0.3,
        )
        .unwrap();
        let sample = PairSample::sampled(&b, 10, 50, 11);
        for (x, y) in &sample.pairs {
            let g = check_inequality(&gen, &b, &map, x, y).unwrap();
            let d = check_inequality(&dg, &b, &map, x, y).unwrap();
            assert!((g.slack - d.slack).abs() <= 1e-9);
        }
    }

    fn random_finite() -> impl Strategy<Value = (FiniteMetricSpace, TableMap)> {
        (2usize..8).prop_flat_map(|n| {
            (
                prop::collection::vec(-10.0f64..10.0, n),
                prop::collection::vec(0..n, n),
            )
                .prop_filter_map("duplicate points", |(xs, table)| {
                    let s = FiniteMetricSpace::from_reals(&xs).ok()?;
                    Some((s, TableMap::new(table).unwrap()))
                })
        })
    }

    proptest! {
        #[test]
        fn certificate_is_pair_order_independent(
            (s, map) in random_finite(),
            rot in 0usize..50,
        ) {
            let mut sample = PairSample::exhaustive(&s).unwrap();
            let psi = AlteringFunction::Identity;
            let c1 = certify(&s, &map, &psi, ConditionKind::Generalized, &sample, 1e-6).unwrap();
            let n = sample.pairs.len();
            sample.pairs.rotate_left(rot % n);
            sample.pairs.reverse();
            let c2 = certify(&s, &map, &psi, ConditionKind::Generalized, &sample, 1e-6).unwrap();
            prop_assert_eq!(c1.chosen, c2.chosen);
            prop_assert_eq!(c1.vertices, c2.vertices);
        }

        #[test]
        fn more_pairs_never_enlarge_the_region(
            (s, map) in random_finite(),
            keep in 1usize..30,
        ) {
            let full = PairSample::exhaustive(&s).unwrap();
            let sub = PairSample::explicit(
                full.pairs.iter().take(keep.min(full.len())).cloned().collect(),
                Evidence::Sampled,
            );
            let psi = AlteringFunction::Identity;
            let k = ConditionKind::Generalized;
            let small = feasible_region_vertices(&s, &map, &psi, k, &full, 1e-3).unwrap();
            let big_planes = pair_half_planes(&s, &map, &psi, k, &sub).unwrap();
            let mut region = admissible_region(1e-3, false);
            region.extend(big_planes);
            for v in small {
                prop_assert!(region.iter().all(|h| h.contains(v.0, v.1, 1e-9)));
            }
        }

        #[test]
        fn feasible_certificates_recheck(
            (s, map) in random_finite(),
        ) {
            let sample = PairSample::exhaustive(&s).unwrap();
            let psi = AlteringFunction::power(2.0).unwrap();
            let cert = certify(&s, &map, &psi, ConditionKind::Generalized, &sample, 1e-6).unwrap();
            if let Some((a, b)) = cert.chosen {
                prop_assert!(a >= 1e-6 && b >= 0.0 && a + b <= 1.0 - 1e-6 + 1e-15);
                let cond = ContractionCondition::new(ConditionKind::Generalized, psi, a, b).unwrap();
                for (x, y) in &sample.pairs {
                    let c = check_inequality(&cond, &s, &map, x, y).unwrap();
                    prop_assert!(c.slack >= -DEFAULT_NUM_TOL, "slack {}", c.slack);
                }
            }
        }

        #[test]
        fn m_vanishes_exactly_at_fixed_second_argument((s, map) in random_finite()) {
            for x in 0..s.len() {
                for y in 0..s.len() {
                    let m = evaluate_m(&s, &map, &x, &y).unwrap();
                    prop_assert_eq!(m == 0.0, map.apply(&y).unwrap() == y);
                }
            }
        }
    }
}
