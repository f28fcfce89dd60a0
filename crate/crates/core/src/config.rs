//! Run configuration documents.
//!
//! A run is described by a TOML document. Unknown keys are rejected and every
//! block is validated by building the objects it describes, so a document
//! that parses is ready to run. Example:
//!
//! ```toml
//! seed = 7
//!
//! [space]
//! type = "box"
//! lower = [0.0]
//! upper = [4.0]
//! map = { family = "affine", matrix = [[0.5]], offset = [1.0] }
//!
//! [psi]
//! kind = "identity"
//!
//! [condition]
//! kind = "generalized"
//! grid_points = 201
//!
//! [iteration]
//! x0 = [0.0]
//! fix_tol = 1e-8
//! ```

use serde::{Deserialize, Serialize};

use crate::altering::{make_integral_psi, AlteringFunction, Density, QuadratureSettings};
use crate::contraction::{check_constants, ConditionKind, DEFAULT_MARGIN};
use crate::error::{Error, Result};
use crate::picard::{BoundConstants, DEFAULT_FIX_TOL, DEFAULT_MAX_ITERS};
use crate::spaces::{
    Family, FamilyMap, FiniteMetricSpace, MetricSpace, RealBoxSpace, TableMap, DEFAULT_POINT_TOL,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Seeds every random choice of the run.
    #[serde(default)]
    pub seed: u64,
    pub space: SpaceConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<PsiConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<ConditionConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iteration: Option<IterationConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub property_p: Option<PropertyPConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceConfig {
    Finite {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        names: Option<Vec<String>>,
        dist: Vec<Vec<f64>>,
        /// `map[i]` is the index of `S(i)`.
        map: Vec<usize>,
    },
    Box {
        lower: Vec<f64>,
        upper: Vec<f64>,
        #[serde(default = "default_point_tol")]
        point_tol: f64,
        map: FamilyConfig,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilyConfig {
    Affine {
        matrix: Vec<Vec<f64>>,
        offset: Vec<f64>,
    },
    Rational,
    Constant {
        value: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PsiConfig {
    Identity,
    Power {
        p: f64,
    },
    Integral {
        density: DensityConfig,
        #[serde(default = "default_quad_tol")]
        tolerance: f64,
    },
    Table {
        samples: Vec<[f64; 2]>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DensityConfig {
    Constant { k: f64 },
    Linear { k: f64 },
    Power { k: f64, p: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionConfig {
    pub kind: ConditionKind,
    #[serde(default = "default_margin")]
    pub margin: f64,
    /// Grid size for pair sampling on boxes; finite spaces always use every
    /// pair.
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    #[serde(default)]
    pub random_pairs: usize,
    /// Fixed constants; when present they are used for bounds and chains
    /// instead of certified ones.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<ConstantsConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsConfig {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointConfig {
    Index(usize),
    /// A coordinate of a one-dimensional box.
    Scalar(f64),
    Coords(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IterationConfig {
    pub x0: PointConfig,
    #[serde(default = "default_fix_tol")]
    pub fix_tol: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropertyPConfig {
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default = "default_starts")]
    pub grid_starts: usize,
    #[serde(default = "default_starts")]
    pub random_starts: usize,
}

impl Default for PropertyPConfig {
    fn default() -> Self {
        Self {
            n_max: default_n_max(),
            grid_starts: default_starts(),
            random_starts: default_starts(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessConfig {
    pub eps0: f64,
    pub horizon: usize,
    /// Orbit length when no explicit sequence is given.
    #[serde(default = "default_orbit_length")]
    pub length: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sequence: Option<Vec<PointConfig>>,
}

fn default_point_tol() -> f64 {
    DEFAULT_POINT_TOL
}
fn default_quad_tol() -> f64 {
    QuadratureSettings::default().abs_tol
}
fn default_margin() -> f64 {
    DEFAULT_MARGIN
}
fn default_grid_points() -> usize {
    201
}
fn default_fix_tol() -> f64 {
    DEFAULT_FIX_TOL
}
fn default_max_iters() -> usize {
    DEFAULT_MAX_ITERS
}
fn default_n_max() -> usize {
    8
}
fn default_starts() -> usize {
    16
}
fn default_orbit_length() -> usize {
    10_000
}

/// A space together with its self-map, built from a [`SpaceConfig`].
#[derive(Debug, Clone, PartialEq)]
pub enum Scenario {
    Finite {
        space: FiniteMetricSpace,
        map: TableMap,
    },
    Box {
        space: RealBoxSpace,
        map: FamilyMap,
    },
}

impl Scenario {
    pub fn is_finite(&self) -> bool {
        matches!(self, Scenario::Finite { .. })
    }
}

fn at<T>(field: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Config { .. } => e,
        Error::Domain(m) | Error::Format(m) => Error::config(field, m),
        Error::Metric(_) => Error::config(field, e.to_string()),
    })
}

impl SpaceConfig {
    pub fn build(&self) -> Result<Scenario> {
        match self {
            SpaceConfig::Finite { names, dist, map } => {
                let names = names
                    .clone()
                    .unwrap_or_else(|| (0..dist.len()).map(|i| format!("p{i}")).collect());
                let space = at("space.dist", FiniteMetricSpace::new(names, dist.clone()))?;
                if map.len() != space.len() {
                    return Err(Error::config(
                        "space.map",
                        format!("{} entries for a {}-point space", map.len(), space.len()),
                    ));
                }
                let map = at("space.map", TableMap::new(map.clone()))?;
                Ok(Scenario::Finite { space, map })
            }
            SpaceConfig::Box {
                lower,
                upper,
                point_tol,
                map,
            } => {
                let space = at(
                    "space",
                    RealBoxSpace::new(lower.clone(), upper.clone())
                        .and_then(|s| s.with_point_tol(*point_tol)),
                )?;
                let family = match map {
                    FamilyConfig::Affine { matrix, offset } => Family::Affine {
                        matrix: matrix.clone(),
                        offset: offset.clone(),
                    },
                    FamilyConfig::Rational => Family::Rational,
                    FamilyConfig::Constant { value } => Family::Constant(value.clone()),
                };
                let map = at("space.map", FamilyMap::new(space.clone(), family))?;
                Ok(Scenario::Box { space, map })
            }
        }
    }
}

impl PsiConfig {
    pub fn build(&self) -> Result<AlteringFunction> {
        let r = match self {
            PsiConfig::Identity => Ok(AlteringFunction::Identity),
            PsiConfig::Power { p } => AlteringFunction::power(*p),
            PsiConfig::Integral { density, tolerance } => {
                let density = match *density {
                    DensityConfig::Constant { k } => Density::constant(k),
                    DensityConfig::Linear { k } => Density::linear(k),
                    DensityConfig::Power { k, p } => Density::power(k, p),
                };
                density.and_then(|d| {
                    make_integral_psi(
                        d,
                        QuadratureSettings {
                            abs_tol: *tolerance,
                            ..Default::default()
                        },
                    )
                })
            }
            PsiConfig::Table { samples } => {
                AlteringFunction::table(samples.iter().map(|s| (s[0], s[1])).collect())
            }
        };
        at("psi", r)
    }
}

impl PointConfig {
    pub fn to_index(&self, space: &FiniteMetricSpace, field: &str) -> Result<usize> {
        match self {
            PointConfig::Index(i) if space.contains(i) => Ok(*i),
            other => Err(Error::config(
                field,
                format!(
                    "{other:?} is not a point of the {}-point space",
                    space.len()
                ),
            )),
        }
    }

    pub fn to_coords(&self, space: &RealBoxSpace, field: &str) -> Result<Vec<f64>> {
        let v = match self {
            PointConfig::Coords(v) => v.clone(),
            PointConfig::Index(i) if space.dimension() == 1 => vec![*i as f64],
            PointConfig::Scalar(x) if space.dimension() == 1 => vec![*x],
            PointConfig::Index(_) | PointConfig::Scalar(_) => {
                return Err(Error::config(field, "expected a coordinate array"));
            }
        };
        if space.contains(&v) {
            Ok(v)
        } else {
            Err(Error::config(field, format!("{v:?} lies outside the box")))
        }
    }
}

impl RunConfig {
    pub fn scenario(&self) -> Result<Scenario> {
        self.space.build()
    }

    pub fn psi(&self) -> Result<AlteringFunction> {
        self.psi
            .as_ref()
            .map_or(Ok(AlteringFunction::Identity), PsiConfig::build)
    }

    /// Manual constants from the condition block, if any.
    pub fn manual_constants(&self) -> Result<Option<BoundConstants>> {
        let Some(cond) = &self.condition else {
            return Ok(None);
        };
        match cond.constants {
            Some(c) => Ok(Some(at(
                "condition.constants",
                BoundConstants::new(c.a, c.b, self.psi()?),
            )?)),
            None => Ok(None),
        }
    }

    fn validate(&self) -> Result<()> {
        let scenario = self.scenario()?;
        let psi = self.psi()?;

        if let Some(c) = &self.condition {
            if !(c.margin > 0.0 && c.margin < 0.5) {
                return Err(Error::config(
                    "condition.margin",
                    format!("must lie in (0, 0.5), got {}", c.margin),
                ));
            }
            if c.grid_points == 0 && c.random_pairs == 0 && !scenario.is_finite() {
                return Err(Error::config(
                    "condition.grid_points",
                    "a box needs at least one sampled pair",
                ));
            }
            at("condition.kind", c.kind.check_psi(&psi))?;
            if let Some(k) = c.constants {
                at("condition.constants", check_constants(k.a, k.b))?;
                if c.kind == ConditionKind::BanachKhan && k.b != 0.0 {
                    return Err(Error::config(
                        "condition.constants.b",
                        format!("banach_khan requires b = 0, got {}", k.b),
                    ));
                }
            }
        }

        if let Some(it) = &self.iteration {
            self.start_point_check(&scenario, &it.x0, "iteration.x0")?;
            if !(it.fix_tol > 0.0) {
                return Err(Error::config("iteration.fix_tol", "must be positive"));
            }
            if it.max_iters == 0 {
                return Err(Error::config("iteration.max_iters", "must be at least 1"));
            }
        }

        if let Some(p) = &self.property_p {
            if p.n_max < 2 {
                return Err(Error::config(
                    "property_p.n_max",
                    format!("must be at least 2, got {}", p.n_max),
                ));
            }
        }

        if let Some(w) = &self.witness {
            if !(w.eps0 > 0.0) {
                return Err(Error::config("witness.eps0", "must be positive"));
            }
            if w.horizon == 0 {
                return Err(Error::config("witness.horizon", "must be at least 1"));
            }
            match &w.sequence {
                Some(seq) => {
                    if seq.len() <= w.horizon {
                        return Err(Error::config(
                            "witness.sequence",
                            "sequence must extend past the horizon",
                        ));
                    }
                    for (i, p) in seq.iter().enumerate() {
                        self.start_point_check(&scenario, p, &format!("witness.sequence[{i}]"))?;
                    }
                }
                None => {
                    if w.length <= w.horizon {
                        return Err(Error::config(
                            "witness.length",
                            "orbit length must exceed the horizon",
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    fn start_point_check(&self, scenario: &Scenario, p: &PointConfig, field: &str) -> Result<()> {
        match scenario {
            Scenario::Finite { space, .. } => p.to_index(space, field).map(|_| ()),
            Scenario::Box { space, .. } => p.to_coords(space, field).map(|_| ()),
        }
    }

    /// Canonical TOML rendering; parsing it yields an identical config.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configs always serialize")
    }
}

/// Parses and validates a configuration document.
pub fn parse_config(document: &str) -> Result<RunConfig> {
    let config: RunConfig = toml::from_str(document).map_err(|e| {
        let field = e
            .span()
            .map(|s| {
                let prefix = &document[..s.start.min(document.len())];
                let line = prefix.matches('\n').count() + 1;
                let col = prefix.len() - prefix.rfind('\n').map_or(0, |i| i + 1) + 1;
                format!("line {line}, column {col}")
            })
            .unwrap_or_else(|| "document".into());
        Error::config(field, e.message().trim().to_string())
    })?;
    config.validate()?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[space]
type = "finite"
dist = [[0, 1], [1, 0]]
map = [0, 0]

[psi]
kind = "identity"

[condition]
kind = "das_gupta"
"#;

    #[test]
    fn minimal_document_parses() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.seed, 0);
        let cond = c.condition.as_ref().unwrap();
        assert_eq!(cond.kind, ConditionKind::DasGupta);
        assert_eq!(cond.margin, DEFAULT_MARGIN);
        assert!(c.scenario().unwrap().is_finite());
    }

    #[test]
    fn asymmetric_matrix_names_symmetry_and_indices() {
        let doc = MINIMAL.replace("[[0, 1], [1, 0]]", "[[0, 1], [2, 0]]");
        let err = parse_config(&doc).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("space.dist"), "{msg}");
        assert!(msg.contains("symmetry violated at (0,1)"), "{msg}");
    }

    #[test]
    fn constants_out_of_range() {
        let doc = format!("{MINIMAL}\n[condition.constants]\na = 0.6\nb = 0.4\n");
        let err = parse_config(&doc).unwrap_err();
        assert!(matches!(err, Error::Config { ref field, .. } if field == "condition.constants"));
        assert!(err.to_string().contains("a + b < 1"));
    }

    #[test]
    fn unknown_keys_and_families_are_rejected() {
        let doc = MINIMAL.replace("map = [0, 0]", "map = [0, 0]\ncolour = 3");
        let err = parse_config(&doc).unwrap_err().to_string();
        assert!(err.contains("line 2") && err.contains("colour"), "{err}");

        let bad_family = r#"
[space]
type = "box"
lower = [0.0]
upper = [1.0]
map = { family = "logistic" }
"#;
        let err = parse_config(bad_family).unwrap_err().to_string();
        assert!(err.contains("logistic"), "{err}");
    }

    #[test]
    fn validation_errors_are_field_addressed() {
        let cases = [
            (
                "[space]\ntype=\"box\"\nlower=[0.0]\nupper=[1.0]\nmap={family=\"affine\", matrix=[[0.5]], offset=[1.0]}\n",
                "space.map",
            ),
            (
                "[space]\ntype=\"finite\"\ndist=[[0,1],[1,0]]\nmap=[0,2]\n",
                "space.map",
            ),
            (
                "[space]\ntype=\"finite\"\ndist=[[0,1],[1,0]]\nmap=[0,0]\n[iteration]\nx0=5\n",
                "iteration.x0",
            ),
            (
                "[space]\ntype=\"finite\"\ndist=[[0,1],[1,0]]\nmap=[0,0]\n[psi]\nkind=\"power\"\np=2.0\n[condition]\nkind=\"das_gupta\"\n",
                "condition.kind",
            ),
            (
                "[space]\ntype=\"finite\"\ndist=[[0,1],[1,0]]\nmap=[0,0]\n[property_p]\nn_max=1\n",
                "property_p.n_max",
            ),
            (
                "[space]\ntype=\"finite\"\ndist=[[0,1],[1,0]]\nmap=[0,0]\n[condition]\nkind=\"generalized\"\nmargin=0.7\n",
                "condition.margin",
            ),
        ];
        for (doc, field) in cases {
            match parse_config(doc) {
                Err(Error::Config { field: f, .. }) => assert_eq!(f, field, "{doc}"),
                other => panic!("expected config error for {field}, got {other:?}"),
            }
        }
    }

    #[test]
    fn round_trip_is_identity() {
        let doc = r#"
seed = 42
[space]
type = "box"
lower = [0.0, 0.0]
upper = [1.0, 2.0]
map = { family = "affine", matrix = [[0.5, 0.0], [0.1, 0.25]], offset = [0.1, 0.3] }
[psi]
kind = "integral"
density = { kind = "power", k = 3.0, p = 2.0 }
[condition]
kind = "integral"
margin = 1e-6
grid_points = 30
random_pairs = 100
constants = { a = 0.5, b = 0.1 }
[iteration]
x0 = [0.3, 1.9]
fix_tol = 1e-12
[property_p]
n_max = 5
[witness]
eps0 = 0.5
horizon = 10
sequence = [[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5], [0.1, 0.1], [0.2, 0.2], [0.3, 0.3], [0.4, 0.4], [0.5, 0.5], [0.6, 0.6], [0.7, 0.7], [0.8, 0.8]]
"#;
        let a = parse_config(doc).unwrap();
        let b = parse_config(&a.to_toml()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_toml(), b.to_toml());
        let m = parse_config(MINIMAL).unwrap();
        assert_eq!(parse_config(&m.to_toml()).unwrap(), m);
    }
}
