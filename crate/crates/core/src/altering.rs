//! Altering distance functions.
//!
//! An altering distance function `psi: [0, inf) -> [0, inf)` vanishes exactly
//! at zero, is non-decreasing and continuous. The built-in kinds satisfy all
//! three properties by construction; tables are user data and can be checked
//! on a grid with [`check_psi_properties`]. Continuity can only be refuted by
//! sampling, never established, and the report says so.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_QUAD_TOL: f64 = 1e-9;
const DEFAULT_MAX_PANELS: usize = 1 << 22;

/// Nonnegative densities `phi` on `[0, inf)` with `int_0^eps phi > 0` for
/// every `eps > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Density {
    /// `phi(t) = k`
    Constant { k: f64 },
    /// `phi(t) = k t`
    Linear { k: f64 },
    /// `phi(t) = k t^p`
    Power { k: f64, p: f64 },
}

impl Density {
    pub fn constant(k: f64) -> Result<Self> {
        positive("density constant k", k)?;
        Ok(Density::Constant { k })
    }

    pub fn linear(k: f64) -> Result<Self> {
        positive("density slope k", k)?;
        Ok(Density::Linear { k })
    }

    pub fn power(k: f64, p: f64) -> Result<Self> {
        positive("density scale k", k)?;
        positive("density exponent p", p)?;
        Ok(Density::Power { k, p })
    }

    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Density::Constant { k } => k,
            Density::Linear { k } => k * t,
            Density::Power { k, p } => k * t.powf(p),
        }
    }
}

impl fmt::Display for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Density::Constant { k } => write!(f, "constant(k={k})"),
            Density::Linear { k } => write!(f, "linear(k={k})"),
            Density::Power { k, p } => write!(f, "power(k={k}, p={p})"),
        }
    }
}

fn positive(what: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "{what} must be positive and finite, got {v}"
        )))
    }
}

/// Composite Simpson settings for integral-type functions.
///
/// The panel count starts at 2 and doubles until the Richardson estimate
/// `|S_2n - S_n| / 15` is within `abs_tol` (or a few ulps of the result,
/// whichever is larger).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            abs_tol: DEFAULT_QUAD_TOL,
            max_panels: DEFAULT_MAX_PANELS,
        }
    }
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..panels {
        let x = a + h * i as f64;
        if i % 2 == 1 {
            odd += f(x);
        } else {
            even += f(x);
        }
    }
    h / 3.0 * (f(a) + 4.0 * odd + 2.0 * even + f(b))
}

/// `int_0^t phi` by composite Simpson with panel doubling.
pub fn integrate_density(phi: &Density, t: f64, settings: &QuadratureSettings) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    let f = |x: f64| phi.value(x);
    let mut panels = 2;
    let mut coarse = simpson(f, 0.0, t, panels);
    loop {
        panels *= 2;
        let fine = simpson(f, 0.0, t, panels);
        let tol = settings.abs_tol.max(64.0 * f64::EPSILON * fine.abs());
        if (fine - coarse).abs() / 15.0 <= tol {
            return Ok(fine);
        }
        if panels >= settings.max_panels {
            return Err(Error::domain(format!(
                "quadrature of {phi} on [0, {t}] did not reach tolerance {} within {} panels",
                settings.abs_tol, settings.max_panels
            )));
        }
        coarse = fine;
    }
}

/// An altering distance function.
#[derive(Debug, Clone, PartialEq)]
pub enum AlteringFunction {
    Identity,
    /// `t^p` with `p >= 1`.
    Power(f64),
    /// `t -> int_0^t phi`.
    Integral {
        density: Density,
        settings: QuadratureSettings,
    },
    /// Piecewise-linear interpolation of `(t, psi(t))` samples, clamped to the
    /// first and last sample outside their range.
    Table(Vec<(f64, f64)>),
}

impl AlteringFunction {
    pub fn power(p: f64) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::domain(format!(
                "power exponent must be >= 1, got {p}"
            )));
        }
        Ok(AlteringFunction::Power(p))
    }

    /// Samples must have strictly increasing nonnegative abscissae. Values
    /// are not checked here; see [`check_psi_properties`].
    pub fn table(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::domain("table needs at least one sample"));
        }
        for (i, &(t, v)) in samples.iter().enumerate() {
            if !t.is_finite() || !v.is_finite() || t < 0.0 {
                return Err(Error::domain(format!(
                    "table sample {i} = ({t}, {v}) must be finite with t >= 0"
                )));
            }
            if i > 0 && t <= samples[i - 1].0 {
                return Err(Error::domain(format!(
                    "table abscissae must be strictly increasing (sample {i})"
                )));
            }
        }
        Ok(AlteringFunction::Table(samples))
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, AlteringFunction::Identity)
    }

    pub fn is_integral(&self) -> bool {
        matches!(self, AlteringFunction::Integral { .. })
    }

    /// `psi(t)` for `t >= 0`.
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::domain(format!(
                "psi is defined on [0, inf), got {t}"
            )));
        }
        match self {
            AlteringFunction::Identity => Ok(t),
            AlteringFunction::Power(p) => Ok(t.powf(*p)),
            AlteringFunction::Integral { density, settings } => {
                integrate_density(density, t, settings)
            }
            AlteringFunction::Table(samples) => Ok(interpolate(samples, t)),
        }
    }
}

impl fmt::Display for AlteringFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlteringFunction::Identity => write!(f, "identity"),
            AlteringFunction::Power(p) => write!(f, "power(p={p})"),
            AlteringFunction::Integral { density, .. } => write!(f, "integral({density})"),
            AlteringFunction::Table(s) => write!(f, "table({} samples)", s.len()),
        }
    }
}

fn interpolate(samples: &[(f64, f64)], t: f64) -> f64 {
    let first = samples[0];
    let last = samples[samples.len() - 1];
    if t <= first.0 {
        return first.1;
    }
    if t >= last.0 {
        return last.1;
    }
    // first index with abscissa > t; guaranteed in 1..len
    let hi = samples.partition_point(|s| s.0 <= t);
    let (t0, v0) = samples[hi - 1];
    let (t1, v1) = samples[hi];
    v0 + (v1 - v0) * (t - t0) / (t1 - t0)
}

/// `psi(t)`; the free-function form of [`AlteringFunction::evaluate`].
pub fn evaluate_psi(psi: &AlteringFunction, t: f64) -> Result<f64> {
    psi.evaluate(t)
}

/// The integral-type function `psi_0(t) = int_0^t phi`.
pub fn make_integral_psi(
    density: Density,
    settings: QuadratureSettings,
) -> Result<AlteringFunction> {
    positive("quadrature tolerance", settings.abs_tol)?;
    if settings.max_panels < 4 {
        return Err(Error::domain("quadrature needs at least 4 panels"));
    }
    Ok(AlteringFunction::Integral { density, settings })
}

/// A point or adjacent pair of grid samples witnessing a failed property.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PsiWitness {
    Point { t: f64, value: f64 },
    Pair { t1: f64, v1: f64, t2: f64, v2: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum PsiCheck {
    Pass,
    Fail { witness: PsiWitness },
}

impl PsiCheck {
    pub fn passed(&self) -> bool {
        matches!(self, PsiCheck::Pass)
    }
}

/// Sampled continuity outcome. Sampling can only find violations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ContinuityCheck {
    NoViolationFound,
    JumpExceedsBound { witness: PsiWitness, jump: f64 },
}

impl fmt::Display for ContinuityCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContinuityCheck::NoViolationFound => write!(f, "no violation found"),
            ContinuityCheck::JumpExceedsBound { jump, witness } => {
                write!(f, "jump of {jump} between adjacent samples at {witness:?}")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsiReport {
    /// `psi(0) = 0` and `psi(t) > 0` at every positive grid point.
    pub vanishes_only_at_zero: PsiCheck,
    pub non_decreasing: PsiCheck,
    pub continuity: ContinuityCheck,
}

impl PsiReport {
    pub fn all_pass(&self) -> bool {
        self.vanishes_only_at_zero.passed()
            && self.non_decreasing.passed()
            && self.continuity == ContinuityCheck::NoViolationFound
    }
}

/// Checks the three altering-function properties on a grid starting at 0.
///
/// Monotonicity and continuity are scanned over adjacent samples and the
/// first offending pair is reported; for monotonicity an adjacent scan finds
/// a violation iff a pairwise scan does.
pub fn check_psi_properties(
    psi: &AlteringFunction,
    grid: &[f64],
    modulus_bound: f64,
) -> Result<PsiReport> {
    if grid.is_empty() {
        return Err(Error::domain("grid must be nonempty"));
    }
    if grid[0] != 0.0 {
        return Err(Error::domain(format!(
            "grid must start at 0, starts at {}",
            grid[0]
        )));
    }
    if let Some(i) = grid.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::domain(format!(
            "grid is not strictly increasing at index {}",
            i + 1
        )));
    }
    if !(modulus_bound > 0.0) {
        return Err(Error::domain(format!(
            "modulus bound must be positive, got {modulus_bound}"
        )));
    }
    let values = grid
        .iter()
        .map(|&t| psi.evaluate(t))
        .collect::<Result<Vec<_>>>()?;

    let vanishes_only_at_zero = if values[0] != 0.0 {
        PsiCheck::Fail {
            witness: PsiWitness::Point {
                t: 0.0,
                value: values[0],
            },
        }
    } else {
        match (1..grid.len()).find(|&i| !(values[i] > 0.0)) {
            Some(i) => PsiCheck::Fail {
                witness: PsiWitness::Point {
                    t: grid[i],
                    value: values[i],
                },
            },
            None => PsiCheck::Pass,
        }
    };

    let pair = |i: usize| PsiWitness::Pair {
        t1: grid[i],
        v1: values[i],
        t2: grid[i + 1],
        v2: values[i + 1],
    };
    let non_decreasing = match values.windows(2).position(|w| w[1] < w[0]) {
        Some(i) => PsiCheck::Fail { witness: pair(i) },
        None => PsiCheck::Pass,
    };
    let continuity = match values
        .windows(2)
        .position(|w| (w[1] - w[0]).abs() > modulus_bound)
    {
        Some(i) => ContinuityCheck::JumpExceedsBound {
            witness: pair(i),
            jump: (values[i + 1] - values[i]).abs(),
        },
        None => ContinuityCheck::NoViolationFound,
    };

    Ok(PsiReport {
        vanishes_only_at_zero,
        non_decreasing,
        continuity,
    })
}
