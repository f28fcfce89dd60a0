//! Concrete metric spaces and self-maps.
//!
//! Two kinds of space are supported: finite spaces given by an explicit
//! distance matrix, and closed axis-aligned boxes in `R^n` with the Euclidean
//! metric. Both are complete. Self-maps are either lookup tables (finite
//! spaces) or members of a small set of parametric families whose
//! "maps the box into itself" property can be checked analytically.

use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Default tolerance for point equality on continuous spaces (Euclidean).
pub const DEFAULT_POINT_TOL: f64 = 1e-9;

/// Relative slack allowed in the triangle check, so that matrices derived
/// from floating-point coordinates are not rejected for rounding noise.
const TRIANGLE_REL_TOL: f64 = 1e-12;

/// Deterministic RNG used everywhere randomness is needed.
pub type SeededRng = ChaCha8Rng;

/// A metric space whose distance function can be evaluated pointwise.
pub trait MetricSpace {
    type Point: Clone + fmt::Debug + PartialEq;

    /// `d(x, y)`. Fails if either point does not belong to the space.
    fn distance(&self, x: &Self::Point, y: &Self::Point) -> Result<f64>;

    fn contains(&self, x: &Self::Point) -> bool;

    /// Point equality: exact on finite spaces, within the point tolerance on
    /// continuous ones.
    fn same_point(&self, x: &Self::Point, y: &Self::Point) -> bool;

    /// An exact identity key for the point. Only finite spaces return `Some`.
    fn exact_key(&self, _x: &Self::Point) -> Option<usize> {
        None
    }

    /// Every point of the space, when the space is finite.
    fn all_points(&self) -> Option<Vec<Self::Point>>;

    /// A deterministic low-discrepancy set of about `count` points. Finite
    /// spaces return all their points regardless of `count`.
    fn grid_points(&self, count: usize) -> Vec<Self::Point>;

    fn random_point(&self, rng: &mut SeededRng) -> Self::Point;
}

/// A map `S` from a space to itself.
pub trait SelfMap {
    type Point;

    /// `S x`. Fails if `x` is not a point of the map's domain.
    fn apply(&self, x: &Self::Point) -> Result<Self::Point>;

    /// `S^n` for `n >= 1`.
    fn compose(&self, n: usize) -> Result<Self>
    where
        Self: Sized;
}

/// A metric-axiom violation found by [`validate_space`], with the indices
/// that witness it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AxiomViolation {
    /// `d(i,i) != 0`, or `d(i,j) <= 0` for `i != j`.
    Identity { i: usize, j: usize },
    /// `d(i,j) != d(j,i)`.
    Symmetry { i: usize, j: usize },
    /// `d(i,k) > d(i,j) + d(j,k)`.
    Triangle { i: usize, j: usize, k: usize },
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            AxiomViolation::Identity { i, j } => {
                write!(f, "identity of indiscernibles violated at ({i},{j})")
            }
            AxiomViolation::Symmetry { i, j } => write!(f, "symmetry violated at ({i},{j})"),
            AxiomViolation::Triangle { i, j, k } => {
                write!(f, "triangle inequality violated at ({i},{j},{k})")
            }
        }
    }
}

/// Checks the three metric axioms on a distance matrix.
///
/// Returns an empty list iff all axioms hold. Fails with a format error when
/// the matrix is not square or contains non-finite entries.
pub fn validate_space(dist: &[Vec<f64>]) -> Result<Vec<AxiomViolation>> {
    let n = dist.len();
    for (i, row) in dist.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Format(format!(
                "distance matrix is not square: row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
        if let Some(j) = row.iter().position(|v| !v.is_finite()) {
            return Err(Error::Format(format!("non-finite distance at ({i},{j})")));
        }
    }

    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let bad = if i == j {
                dist[i][j] != 0.0
            } else {
                dist[i][j] <= 0.0
            };
            if bad {
                out.push(AxiomViolation::Identity { i, j });
            }
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if dist[i][j] != dist[j][i] {
                out.push(AxiomViolation::Symmetry { i, j });
            }
        }
    }
    for i in 0..n {
        for k in (i + 1)..n {
            for j in 0..n {
                if j == i || j == k {
                    continue;
                }
                let via = dist[i][j] + dist[j][k];
                if dist[i][k] > via * (1.0 + TRIANGLE_REL_TOL) {
                    out.push(AxiomViolation::Triangle { i, j, k });
                }
            }
        }
    }
    Ok(out)
}

/// A finite metric space stored as a dense distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    names: Vec<String>,
    dist: Vec<Vec<f64>>,
}

impl FiniteMetricSpace {
    /// Builds a space from point names and a distance matrix. The matrix must
    /// satisfy every metric axiom.
    pub fn new(names: Vec<String>, dist: Vec<Vec<f64>>) -> Result<Self> {
        if names.len() != dist.len() {
            return Err(Error::Format(format!(
                "{} point names for a {}x{} distance matrix",
                names.len(),
                dist.len(),
                dist.len()
            )));
        }
        if dist.is_empty() {
            return Err(Error::Format(
                "a metric space needs at least one point".into(),
            ));
        }
        let violations = validate_space(&dist)?;
        if !violations.is_empty() {
            return Err(Error::Metric(violations));
        }
        Ok(Self { names, dist })
    }

    /// Builds a space with points named `p0, p1, ...`.
    pub fn from_matrix(dist: Vec<Vec<f64>>) -> Result<Self> {
        let names = (0..dist.len()).map(|i| format!("p{i}")).collect();
        Self::new(names, dist)
    }

    /// The metric induced on a finite set of reals by `|x - y|`.
    pub fn from_reals(xs: &[f64]) -> Result<Self> {
        let dist = xs
            .iter()
            .map(|x| xs.iter().map(|y| (x - y).abs()).collect())
            .collect();
        Self::from_matrix(dist)
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.dist
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::domain(format!("unknown point `{name}`")))
    }

    fn check(&self, x: usize) -> Result<()> {
        if x < self.len() {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "point index {x} outside a {}-point space",
                self.len()
            )))
        }
    }
}

impl MetricSpace for FiniteMetricSpace {
    type Point = usize;

    fn distance(&self, x: &usize, y: &usize) -> Result<f64> {
        self.check(*x)?;
        self.check(*y)?;
        Ok(self.dist[*x][*y])
    }

    fn contains(&self, x: &usize) -> bool {
        *x < self.len()
    }

    fn same_point(&self, x: &usize, y: &usize) -> bool {
        x == y
    }

    fn exact_key(&self, x: &usize) -> Option<usize> {
        Some(*x)
    }

    fn all_points(&self) -> Option<Vec<usize>> {
        Some((0..self.len()).collect())
    }

    fn grid_points(&self, _count: usize) -> Vec<usize> {
        (0..self.len()).collect()
    }

    fn random_point(&self, rng: &mut SeededRng) -> usize {
        rng.random_range(0..self.len())
    }
}

/// A closed box `[lower, upper]` in `R^n` with the Euclidean metric.
#[derive(Debug, Clone, PartialEq)]
pub struct RealBoxSpace {
    lower: Vec<f64>,
    upper: Vec<f64>,
    point_tol: f64,
}

impl RealBoxSpace {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::domain("box dimension must be positive"));
        }
        if lower.len() != upper.len() {
            return Err(Error::domain(format!(
                "box bounds have different dimensions ({} vs {})",
                lower.len(),
                upper.len()
            )));
        }
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() || lo > hi {
                return Err(Error::domain(format!(
                    "box coordinate {i}: need finite lower <= upper, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self {
            lower,
            upper,
            point_tol: DEFAULT_POINT_TOL,
        })
    }

    /// The interval `[lo, hi]` as a one-dimensional box.
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo], vec![hi])
    }

    pub fn with_point_tol(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::domain(format!(
                "point tolerance must be positive, got {tol}"
            )));
        }
        self.point_tol = tol;
        Ok(self)
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn point_tol(&self) -> f64 {
        self.point_tol
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dimension() {
            return Err(Error::domain(format!(
                "point has dimension {}, space has dimension {}",
                x.len(),
                self.dimension()
            )));
        }
        if !self.contains_slice(x) {
            return Err(Error::domain(format!("point {x:?} lies outside the box")));
        }
        Ok(())
    }

    fn contains_slice(&self, x: &[f64]) -> bool {
        x.len() == self.dimension()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| *v >= lo - self.point_tol && *v <= hi + self.point_tol)
    }

    /// The `2^n` corners of the box (all of them, so keep `n` small).
    pub fn corners(&self) -> Vec<Vec<f64>> {
        let n = self.dimension();
        (0..1usize << n)
            .map(|mask| {
                (0..n)
                    .map(|i| {
                        if mask & (1 << i) == 0 {
                            self.lower[i]
                        } else {
                            self.upper[i]
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

impl MetricSpace for RealBoxSpace {
    type Point = Vec<f64>;

    fn distance(&self, x: &Vec<f64>, y: &Vec<f64>) -> Result<f64> {
        self.check(x)?;
        self.check(y)?;
        Ok(euclidean(x, y))
    }

    fn contains(&self, x: &Vec<f64>) -> bool {
        self.contains_slice(x)
    }

    fn same_point(&self, x: &Vec<f64>, y: &Vec<f64>) -> bool {
        x.len() == y.len() && euclidean(x, y) <= self.point_tol
    }

    fn all_points(&self) -> Option<Vec<Vec<f64>>> {
        None
    }

    /// Evenly spaced points (endpoints included) in one dimension; a Halton
    /// sequence in higher dimensions.
    fn grid_points(&self, count: usize) -> Vec<Vec<f64>> {
        let n = self.dimension();
        if count == 0 {
            return Vec::new();
        }
        if n == 1 {
            let (lo, hi) = (self.lower[0], self.upper[0]);
            if count == 1 {
                return vec![vec![0.5 * (lo + hi)]];
            }
            let step = (hi - lo) / (count - 1) as f64;
            return (0..count)
                .map(|i| {
                    if i + 1 == count {
                        vec![hi]
                    } else {
                        vec![lo + step * i as f64]
                    }
                })
                .collect();
        }
        let bases = first_primes(n);
        (1..=count)
            .map(|idx| {
                bases
                    .iter()
                    .enumerate()
                    .map(|(i, &b)| {
                        let u = radical_inverse(idx as u64, b);
                        self.lower[i] + u * (self.upper[i] - self.lower[i])
                    })
                    .collect()
            })
            .collect()
    }

    fn random_point(&self, rng: &mut SeededRng) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&lo, &hi)| {
                if lo == hi {
                    lo
                } else {
                    rng.random_range(lo..=hi)
                }
            })
            .collect()
    }
}

pub(crate) fn euclidean(x: &[f64], y: &[f64]) -> f64 {
    if x.len() == 1 {
        return (x[0] - y[0]).abs();
    }
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut out = 0.0;
    while i > 0 {
        out += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    out
}

fn first_primes(n: usize) -> Vec<u64> {
    let mut primes = Vec::with_capacity(n);
    let mut c = 2u64;
    while primes.len() < n {
        if primes
            .iter()
            .take_while(|&&p| p * p <= c)
            .all(|&p| !c.is_multiple_of(p))
        {
            primes.push(c);
        }
        c += 1;
    }
    primes
}

/// A self-map of a finite space given as a lookup table `i -> table[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableMap {
    table: Vec<usize>,
}

impl TableMap {
    /// The table must send every index in `0..table.len()` back into that
    /// range.
    pub fn new(table: Vec<usize>) -> Result<Self> {
        let n = table.len();
        if let Some((i, &j)) = table.iter().enumerate().find(|(_, &j)| j >= n) {
            return Err(Error::domain(format!(
                "map sends point {i} to {j}, outside a {n}-point space"
            )));
        }
        Ok(Self { table })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            table: (0..n).collect(),
        }
    }

    pub fn constant(n: usize, c: usize) -> Result<Self> {
        Self::new(vec![c; n])
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }
}

impl SelfMap for TableMap {
    type Point = usize;

    fn apply(&self, x: &usize) -> Result<usize> {
        self.table.get(*x).copied().ok_or_else(|| {
            Error::domain(format!(
                "point index {x} outside a {}-point space",
                self.table.len()
            ))
        })
    }

    fn compose(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("composition power must be at least 1"));
        }
        let table = (0..self.table.len())
            .map(|mut x| {
                for _ in 0..n {
                    x = self.table[x];
                }
                x
            })
            .collect();
        Ok(Self { table })
    }
}

/// The parametric families admitted as self-maps of a box.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `x -> A x + c`.
    Affine {
        matrix: Vec<Vec<f64>>,
        offset: Vec<f64>,
    },
    /// `x -> x / (1 + x)`, componentwise.
    Rational,
    /// `x -> c`.
    Constant(Vec<f64>),
    /// `base` applied `times` times; produced by [`SelfMap::compose`].
    Iterated { base: Box<Family>, times: usize },
}

impl Family {
    /// One-dimensional affine map `x -> slope * x + offset`.
    pub fn affine_1d(slope: f64, offset: f64) -> Self {
        Family::Affine {
            matrix: vec![vec![slope]],
            offset: vec![offset],
        }
    }

    fn eval(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Family::Affine { matrix, offset } => matrix
                .iter()
                .zip(offset)
                .map(|(row, c)| row.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() + c)
                .collect(),
            Family::Rational => x.iter().map(|v| v / (1.0 + v)).collect(),
            Family::Constant(c) => c.clone(),
            Family::Iterated { base, times } => {
                let mut y = x.to_vec();
                for _ in 0..*times {
                    y = base.eval(&y);
                }
                y
            }
        }
    }

    /// Interval image of the box under the family, when it has a closed form.
    fn image_bounds(&self, lower: &[f64], upper: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        match self {
            Family::Affine { matrix, offset } => {
                let mut lo = Vec::with_capacity(offset.len());
                let mut hi = Vec::with_capacity(offset.len());
                for (row, c) in matrix.iter().zip(offset) {
                    let (mut l, mut h) = (*c, *c);
                    for (a, (xl, xh)) in row.iter().zip(lower.iter().zip(upper)) {
                        let (p, q) = (a * xl, a * xh);
                        l += p.min(q);
                        h += p.max(q);
                    }
                    lo.push(l);
                    hi.push(h);
                }
                Ok((lo, hi))
            }
            Family::Rational => {
                if let Some(i) = lower.iter().position(|&l| l <= -1.0) {
                    return Err(Error::domain(format!(
                        "x/(1+x) is undefined or not monotone on coordinate {i} (lower bound {} <= -1)",
                        lower[i]
                    )));
                }
                // increasing on (-1, inf)
                Ok((
                    lower.iter().map(|v| v / (1.0 + v)).collect(),
                    upper.iter().map(|v| v / (1.0 + v)).collect(),
                ))
            }
            Family::Constant(c) => Ok((c.clone(), c.clone())),
            Family::Iterated { base, times } => {
                let (mut lo, mut hi) = (lower.to_vec(), upper.to_vec());
                for _ in 0..*times {
                    (lo, hi) = base.image_bounds(&lo, &hi)?;
                }
                Ok((lo, hi))
            }
        }
    }

    fn check_shape(&self, dim: usize) -> Result<()> {
        match self {
            Family::Affine { matrix, offset } => {
                if matrix.len() != dim || offset.len() != dim {
                    return Err(Error::domain(format!(
                        "affine map needs a {dim}x{dim} matrix and a length-{dim} offset"
                    )));
                }
                if let Some(i) = matrix.iter().position(|r| r.len() != dim) {
                    return Err(Error::domain(format!(
                        "affine matrix row {i} has {} entries, expected {dim}",
                        matrix[i].len()
                    )));
                }
                if matrix
                    .iter()
                    .flatten()
                    .chain(offset)
                    .any(|v| !v.is_finite())
                {
                    return Err(Error::domain("affine parameters must be finite"));
                }
                Ok(())
            }
            Family::Rational => Ok(()),
            Family::Constant(c) => {
                if c.len() != dim || c.iter().any(|v| !v.is_finite()) {
                    return Err(Error::domain(format!(
                        "constant map needs a finite length-{dim} value"
                    )));
                }
                Ok(())
            }
            Family::Iterated { base, times } => {
                if *times == 0 {
                    return Err(Error::domain("iteration count must be at least 1"));
                }
                base.check_shape(dim)
            }
        }
    }
}

/// A parametric self-map of a [`RealBoxSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyMap {
    domain: RealBoxSpace,
    family: Family,
}

/// Interior sample points used to double-check the analytic image test.
const FAMILY_SAMPLE_POINTS: usize = 64;
const MAX_CORNER_DIM: usize = 12;

impl FamilyMap {
    /// Builds the map and verifies that it sends the box into itself, first
    /// from the closed-form image bounds, then on corners and a grid sample.
    pub fn new(domain: RealBoxSpace, family: Family) -> Result<Self> {
        let dim = domain.dimension();
        family.check_shape(dim)?;
        let (lo, hi) = family.image_bounds(domain.lower(), domain.upper())?;
        let tol = domain.point_tol();
        for i in 0..dim {
            if lo[i] < domain.lower()[i] - tol || hi[i] > domain.upper()[i] + tol {
                return Err(Error::domain(format!(
                    "map does not send the box into itself: coordinate {i} of the image spans [{}, {}], box is [{}, {}]",
                    lo[i],
                    hi[i],
                    domain.lower()[i],
                    domain.upper()[i]
                )));
            }
        }
        let map = Self { domain, family };
        let mut probes = map.domain.grid_points(FAMILY_SAMPLE_POINTS);
        if dim <= MAX_CORNER_DIM {
            probes.extend(map.domain.corners());
        }
        for p in &probes {
            let y = map.family.eval(p);
            if !map.domain.contains(&y) {
                return Err(Error::domain(format!(
                    "map sends sample point {p:?} to {y:?}, outside the box"
                )));
            }
        }
        Ok(map)
    }

    pub fn domain(&self) -> &RealBoxSpace {
        &self.domain
    }

    pub fn family(&self) -> &Family {
        &self.family
    }
}

impl SelfMap for FamilyMap {
    type Point = Vec<f64>;

    fn apply(&self, x: &Vec<f64>) -> Result<Vec<f64>> {
        self.domain.check(x)?;
        Ok(self.family.eval(x))
    }

    fn compose(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("composition power must be at least 1"));
        }
        if n == 1 {
            return Ok(self.clone());
        }
        let family = match &self.family {
            Family::Iterated { base, times } => Family::Iterated {
                base: base.clone(),
                times: times * n,
            },
            other => Family::Iterated {
                base: Box::new(other.clone()),
                times: n,
            },
        };
        Ok(Self {
            domain: self.domain.clone(),
            family,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;

    #[test]
    fn distance_examples() {
        let s = FiniteMetricSpace::from_matrix(vec![
            vec![0.0, 2.0, 3.0],
            vec![2.0, 0.0, 1.5],
            vec![3.0, 1.5, 0.0],
        ])
        .unwrap();
        assert_eq!(s.distance(&1, &1).unwrap(), 0.0);
        assert_eq!(s.distance(&0, &1).unwrap(), 2.0);
        assert!(matches!(s.distance(&0, &3), Err(Error::Domain(_))));

        let b = RealBoxSpace::interval(0.0, 1.0).unwrap();
        assert_eq!(b.distance(&vec![0.0], &vec![1.0]).unwrap(), 1.0);
        assert!(b.distance(&vec![0.0], &vec![1.5]).is_err());
        assert!(b.distance(&vec![0.0, 0.0], &vec![1.0]).is_err());
    }

    #[test]
    fn apply_examples() {
        let b = RealBoxSpace::interval(0.0, 4.0).unwrap();
        let m = FamilyMap::new(b.clone(), Family::affine_1d(0.5, 1.0)).unwrap();
        assert_eq!(m.apply(&vec![0.0]).unwrap(), vec![1.0]);

        let t = TableMap::constant(3, 2).unwrap();
        for x in 0..3 {
            assert_eq!(t.apply(&x).unwrap(), 2);
        }
        let cyc = TableMap::new(vec![1, 2, 0]).unwrap();
        assert_eq!(cyc.apply(&2).unwrap(), 0);
        assert!(cyc.apply(&3).is_err());
    }

    #[test]
    fn family_maps_outside_box_are_rejected() {
        let b = RealBoxSpace::interval(0.0, 1.0).unwrap();
        assert!(FamilyMap::new(b.clone(), Family::affine_1d(0.5, 1.0)).is_err());
        assert!(FamilyMap::new(b.clone(), Family::Constant(vec![2.0])).is_err());
        assert!(FamilyMap::new(b.clone(), Family::Constant(vec![0.5, 0.5])).is_err());
        assert!(FamilyMap::new(b.clone(), Family::Rational).is_ok());
        let shifted = RealBoxSpace::interval(1.0, 2.0).unwrap();
        assert!(FamilyMap::new(shifted, Family::Rational).is_err());
        let neg = RealBoxSpace::interval(-2.0, 0.0).unwrap();
        assert!(FamilyMap::new(neg, Family::Rational).is_err());
        // rotation by 90 degrees around the centre of [-1,1]^2 stays inside
        let sq = RealBoxSpace::new(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        let rot = Family::Affine {
            matrix: vec![vec![0.0, -1.0], vec![1.0, 0.0]],
            offset: vec![0.0, 0.0],
        };
        assert!(FamilyMap::new(sq.clone(), rot).is_ok());
        let shear = Family::Affine {
            matrix: vec![vec![1.0, 1.0], vec![0.0, 1.0]],
            offset: vec![0.0, 0.0],
        };
        assert!(FamilyMap::new(sq, shear).is_err());
    }

    #[test]
    fn compose_examples() {
        let b = RealBoxSpace::interval(0.0, 8.0).unwrap();
        let half = FamilyMap::new(b, Family::affine_1d(0.5, 0.0)).unwrap();
        let h3 = half.compose(3).unwrap();
        assert_eq!(h3.apply(&vec![8.0]).unwrap(), vec![1.0]);
        assert_eq!(half.compose(1).unwrap(), half);
        assert!(half.compose(0).is_err());
        // nested compositions multiply
        assert_eq!(
            h3.compose(2).unwrap().apply(&vec![8.0]).unwrap(),
            vec![8.0 / 64.0]
        );

        let cyc = TableMap::new(vec![1, 2, 0]).unwrap();
        assert_eq!(cyc.compose(3).unwrap(), TableMap::identity(3));
        assert_eq!(cyc.compose(1).unwrap(), cyc);
        assert!(cyc.compose(0).is_err());
    }

    #[test]
    fn validate_space_examples() {
        assert!(validate_space(&[vec![0.0, 1.0], vec![1.0, 0.0]])
            .unwrap()
            .is_empty());
        assert_eq!(
            validate_space(&[vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap(),
            vec![AxiomViolation::Symmetry { i: 0, j: 1 }]
        );
        let tri = vec![
            vec![0.0, 1.0, 5.0],
            vec![1.0, 0.0, 1.0],
            vec![5.0, 1.0, 0.0],
        ];
        assert_eq!(
            validate_space(&tri).unwrap(),
            vec![AxiomViolation::Triangle { i: 0, j: 1, k: 2 }]
        );
        assert!(matches!(
            validate_space(&[vec![0.0, 1.0], vec![1.0]]),
            Err(Error::Format(_))
        ));
        assert_eq!(
            validate_space(&[vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap(),
            vec![
                AxiomViolation::Identity { i: 0, j: 1 },
                AxiomViolation::Identity { i: 1, j: 0 }
            ]
        );
        let err = FiniteMetricSpace::from_matrix(tri).unwrap_err();
        assert!(err
            .to_string()
            .contains("triangle inequality violated at (0,1,2)"));
    }

    #[test]
    fn grid_points_cover_the_box() {
        let b = RealBoxSpace::interval(0.0, 1.0).unwrap();
        let g = b.grid_points(201);
        assert_eq!(g.len(), 201);
        assert_eq!(g[0], vec![0.0]);
        assert_eq!(g[200], vec![1.0]);
        let sq = RealBoxSpace::new(vec![0.0, -1.0], vec![1.0, 1.0]).unwrap();
        let h = sq.grid_points(50);
        assert_eq!(h.len(), 50);
        assert!(h.iter().all(|p| sq.contains(p)));
    }

    fn euclidean_space() -> impl Strategy<Value = FiniteMetricSpace> {
        prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 1..10).prop_filter_map(
            "coincident points",
            |pts| {
                let d: Vec<Vec<f64>> = pts
                    .iter()
                    .map(|p| {
                        pts.iter()
                            .map(|q| euclidean(&[p.0, p.1], &[q.0, q.1]))
                            .collect()
                    })
                    .collect();
                FiniteMetricSpace::from_matrix(d).ok()
            },
        )
    }

    proptest! {
        #[test]
        fn box_distance_is_a_metric(
            xs in prop::collection::vec(-5.0f64..5.0, 3),
            ys in prop::collection::vec(-5.0f64..5.0, 3),
            zs in prop::collection::vec(-5.0f64..5.0, 3),
        ) {
            let b = RealBoxSpace::new(vec![-5.0; 3], vec![5.0; 3]).unwrap();
            let dxy = b.distance(&xs, &ys).unwrap();
            prop_assert_eq!(dxy, b.distance(&ys, &xs).unwrap());
            prop_assert_eq!(b.distance(&xs, &xs).unwrap(), 0.0);
            let via = b.distance(&xs, &zs).unwrap() + b.distance(&zs, &ys).unwrap();
            prop_assert!(dxy <= via + 1e-12);
        }

        #[test]
        fn constructed_spaces_validate(space in euclidean_space()) {
            prop_assert!(validate_space(space.matrix()).unwrap().is_empty());
        }

        #[test]
        fn compose_matches_repeated_apply(
            table in prop::collection::vec(0usize..12, 12),
            n in 1usize..=8,
        ) {
            let map = TableMap::new(table).unwrap();
            let composed = map.compose(n).unwrap();
            for x in 0..map.len() {
                let mut y = x;
                for _ in 0..n {
                    y = map.apply(&y).unwrap();
                }
                prop_assert_eq!(composed.apply(&x).unwrap(), y);
            }
        }
    }

    #[test]
    fn random_points_stay_in_box() {
        let b = RealBoxSpace::new(vec![0.0, 2.0], vec![1.0, 2.0]).unwrap();
        let mut rng = SeededRng::seed_from_u64(3);
        for _ in 0..100 {
            assert!(b.contains(&b.random_point(&mut rng)));
        }
    }
}
