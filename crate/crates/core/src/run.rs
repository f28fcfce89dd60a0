//! Subcommand orchestration: config in, [`Report`] out.

use sha2::{Digest, Sha256};

use crate::altering::AlteringFunction;
use crate::config::{ConditionConfig, PointConfig, RunConfig, Scenario};
use crate::contraction::{certify, ContractionCertificate, PairSample};
use crate::error::{Error, Result};
use crate::fixedset::{check_property_p, refute_periodic_chain, SearchOptions};
use crate::picard::{
    find_cauchy_witness, iterate, iters_to_tolerance, BoundConstants, DEFAULT_FIX_TOL,
};
use crate::report::{
    ChainRow, ConstantsSource, ConstantsUsed, Outcome, PropertyPSection, Report, SequenceSource,
    SpaceSummary, Subcommand, ToReportPoint, TraceSection, WitnessSection, SCHEMA, TOOL_VERSION,
};
use crate::spaces::{FiniteMetricSpace, MetricSpace, RealBoxSpace, SelfMap};

/// Exit status for a run that failed before producing a report.
pub fn error_exit_code(err: &Error) -> i32 {
    match err {
        Error::Config { .. } => 2,
        _ => 1,
    }
}

/// Hex SHA-256 of the canonical TOML form of `config`.
pub fn config_digest(config: &RunConfig) -> String {
    Sha256::digest(config.to_toml().as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Runs one analysis. Deterministic given the config: every random choice is
/// seeded from `config.seed`.
pub fn run(config: &RunConfig, sub: Subcommand) -> Result<Report> {
    let required = match sub {
        Subcommand::Certify => Some(("condition", config.condition.is_none())),
        Subcommand::Solve => Some(("iteration", config.iteration.is_none())),
        Subcommand::Witness => Some(("witness", config.witness.is_none())),
        Subcommand::PropertyP => None,
    };
    if let Some((block, true)) = required {
        return Err(Error::config(
            block,
            format!("`{}` needs a [{block}] block", sub.as_str()),
        ));
    }

    let psi = config.psi()?;
    let ctx = Context {
        config,
        psi,
        sub,
        digest: config_digest(config),
    };
    match config.scenario()? {
        Scenario::Finite { space, map } => ctx.run_on(&space, &map, finite_summary(&space)),
        Scenario::Box { space, map } => ctx.run_on(&space, &map, box_summary(&space)),
    }
}

fn finite_summary(space: &FiniteMetricSpace) -> SpaceSummary {
    SpaceSummary::Finite {
        size: space.len(),
        names: space.names().to_vec(),
    }
}

fn box_summary(space: &RealBoxSpace) -> SpaceSummary {
    SpaceSummary::Box {
        dimension: space.dimension(),
        lower: space.lower().to_vec(),
        upper: space.upper().to_vec(),
        point_tol: space.point_tol(),
    }
}

/// What the front end needs from a space beyond [`MetricSpace`].
trait FrontSpace: MetricSpace<Point: ToReportPoint> {
    fn pair_sample(&self, cond: &ConditionConfig, seed: u64) -> Result<PairSample<Self::Point>>;
    fn point(&self, p: &PointConfig, field: &str) -> Result<Self::Point>;
    /// Residual tolerance for fixed-point search; limits must be resolved
    /// more finely than points are told apart.
    fn search_tol(&self) -> f64;
}

impl FrontSpace for FiniteMetricSpace {
    fn pair_sample(&self, _: &ConditionConfig, _: u64) -> Result<PairSample<usize>> {
        PairSample::exhaustive(self)
    }

    fn point(&self, p: &PointConfig, field: &str) -> Result<usize> {
        p.to_index(self, field)
    }

    fn search_tol(&self) -> f64 {
        DEFAULT_FIX_TOL
    }
}

impl FrontSpace for RealBoxSpace {
    fn pair_sample(&self, cond: &ConditionConfig, seed: u64) -> Result<PairSample<Vec<f64>>> {
        Ok(PairSample::sampled(
            self,
            cond.grid_points,
            cond.random_pairs,
            seed,
        ))
    }

    fn point(&self, p: &PointConfig, field: &str) -> Result<Vec<f64>> {
        p.to_coords(self, field)
    }

    fn search_tol(&self) -> f64 {
        DEFAULT_FIX_TOL.min(self.point_tol() / 10.0)
    }
}

struct Context<'a> {
    config: &'a RunConfig,
    psi: AlteringFunction,
    sub: Subcommand,
    digest: String,
}

struct Sections {
    certificate: Option<ContractionCertificate>,
    trace: Option<TraceSection>,
    property_p: Option<PropertyPSection>,
    witness: Option<WitnessSection>,
    outcome: Outcome,
}

impl Context<'_> {
    fn run_on<S, M>(&self, space: &S, map: &M, summary: SpaceSummary) -> Result<Report>
    where
        S: FrontSpace,
        M: SelfMap<Point = S::Point>,
    {
        let s = match self.sub {
            Subcommand::Certify => self.certify_section(space, map)?,
            Subcommand::Solve => self.solve_section(space, map)?,
            Subcommand::PropertyP => self.property_p_section(space, map)?,
            Subcommand::Witness => self.witness_section(space, map)?,
        };
        Ok(Report {
            schema: SCHEMA,
            tool: "ratfix",
            tool_version: TOOL_VERSION,
            subcommand: self.sub,
            config_sha256: self.digest.clone(),
            seed: self.config.seed,
            space: summary,
            psi: self.psi.to_string(),
            certificate: s.certificate,
            trace: s.trace,
            property_p: s.property_p,
            witness: s.witness,
            outcome: s.outcome,
            exit_code: s.outcome.exit_code(),
        })
    }

    fn certificate<S, M>(&self, space: &S, map: &M) -> Result<Option<ContractionCertificate>>
    where
        S: FrontSpace,
        M: SelfMap<Point = S::Point>,
    {
        let Some(cond) = &self.config.condition else {
            return Ok(None);
        };
        let sample = space.pair_sample(cond, self.config.seed)?;
        certify(space, map, &self.psi, cond.kind, &sample, cond.margin).map(Some)
    }

    /// Manual constants win over certified ones.
    fn constants(&self, cert: Option<&ContractionCertificate>) -> Result<Option<ConstantsUsed>> {
        let used = |c: &BoundConstants, source| ConstantsUsed {
            a: c.a,
            b: c.b,
            ratio: c.ratio(),
            source,
        };
        if let Some(c) = self.config.manual_constants()? {
            return Ok(Some(used(&c, ConstantsSource::Manual)));
        }
        match cert.and_then(|c| c.chosen) {
            Some((a, b)) => {
                let c = BoundConstants::new(a, b, self.psi.clone())?;
                Ok(Some(used(&c, ConstantsSource::Certified)))
            }
            None => Ok(None),
        }
    }

    fn certify_section<S, M>(&self, space: &S, map: &M) -> Result<Sections>
    where
        S: FrontSpace,
        M: SelfMap<Point = S::Point>,
    {
        let cert = self.certificate(space, map)?;
        let feasible = cert.as_ref().is_some_and(|c| c.feasible);
        Ok(Sections {
            certificate: cert,
            trace: None,
            property_p: None,
            witness: None,
            outcome: if feasible {
                Outcome::Ok
            } else {
                Outcome::Infeasible
            },
        })
    }

    fn solve_section<S, M>(&self, space: &S, map: &M) -> Result<Sections>
    where
        S: FrontSpace,
        M: SelfMap<Point = S::Point>,
    {
        let it = self.config.iteration.as_ref().expect("checked by run");
        let cert = self.certificate(space, map)?;
        let constants = self.constants(cert.as_ref())?;
        let bound = constants
            .as_ref()
            .map(|c| BoundConstants::new(c.a, c.b, self.psi.clone()))
            .transpose()?;

        let x0 = space.point(&it.x0, "iteration.x0")?;
        let trace = iterate(space, map, &x0, it.fix_tol, it.max_iters, bound.as_ref())?;
        let predicted = match (&bound, trace.step_d.first()) {
            (Some(c), Some(&d01)) => {
                Some(iters_to_tolerance(c.a, c.b, &self.psi, d01, it.fix_tol)?)
            }
            _ => None,
        };
        let outcome = if trace.converged() {
            Outcome::Ok
        } else {
            Outcome::NotConverged
        };
        let section = TraceSection::new(
            &trace,
            it.fix_tol,
            it.max_iters,
            constants,
            &self.psi,
            predicted,
        )?;
        Ok(Sections {
            certificate: cert,
            trace: Some(section),
            property_p: None,
            witness: None,
            outcome,
        })
    }

    fn property_p_section<S, M>(&self, space: &S, map: &M) -> Result<Sections>
    where
        S: FrontSpace,
        M: SelfMap<Point = S::Point>,
    {
        let p = self.config.property_p.clone().unwrap_or_default();
        let opts = SearchOptions {
            grid_starts: p.grid_starts,
            random_starts: p.random_starts,
            seed: self.config.seed,
            fix_tol: space.search_tol(),
            ..SearchOptions::default()
        };
        let report = check_property_p(space, map, p.n_max, &opts)?;

        let cert = self.certificate(space, map)?;
        let constants = self.constants(cert.as_ref())?;
        let mut chains = Vec::new();
        if let Some(c) = &constants {
            for w in &report.witnesses {
                let chain =
                    refute_periodic_chain(space, map, &w.point, w.period, c.a, c.b, &self.psi)?;
                chains.push(ChainRow {
                    point: w.point.to_report_point(),
                    period: w.period,
                    chain,
                });
            }
        }
        let outcome = match report.status {
            crate::fixedset::PropertyPStatus::Holds => Outcome::Ok,
            crate::fixedset::PropertyPStatus::Fails => Outcome::PropertyPFails,
            crate::fixedset::PropertyPStatus::Undefined => Outcome::PropertyPUndefined,
        };
        Ok(Sections {
            certificate: cert,
            trace: None,
            property_p: Some(PropertyPSection {
                report: PropertyPSection::convert(&report),
                constants,
                chains,
            }),
            witness: None,
            outcome,
        })
    }

    fn witness_section<S, M>(&self, space: &S, map: &M) -> Result<Sections>
    where
        S: FrontSpace,
        M: SelfMap<Point = S::Point>,
    {
        let w = self.config.witness.as_ref().expect("checked by run");
        let (seq, source) = match &w.sequence {
            Some(points) => {
                let seq = points
                    .iter()
                    .enumerate()
                    .map(|(i, p)| space.point(p, &format!("witness.sequence[{i}]")))
                    .collect::<Result<Vec<_>>>()?;
                (seq, SequenceSource::Explicit)
            }
            None => {
                let it = self.config.iteration.as_ref().ok_or_else(|| {
                    Error::config(
                        "iteration",
                        "an orbit witness needs [iteration] x0 when no sequence is given",
                    )
                })?;
                let mut seq = vec![space.point(&it.x0, "iteration.x0")?];
                for k in 1..w.length {
                    let next = map.apply(&seq[k - 1])?;
                    seq.push(next);
                }
                (seq, SequenceSource::Orbit)
            }
        };
        let witness = find_cauchy_witness(space, &seq, w.eps0, w.horizon)?;
        Ok(Sections {
            certificate: None,
            trace: None,
            property_p: None,
            witness: Some(WitnessSection {
                eps0: w.eps0,
                horizon: w.horizon,
                source,
                sequence_length: seq.len(),
                found: witness.is_some(),
                witness,
            }),
            outcome: Outcome::Ok,
        })
    }
}
