//! Run reports and their two renderings.
//!
//! The machine rendering is one JSON document tagged with [`SCHEMA`]. Every
//! float is written as `{:.16e}` (17 significant digits, so parsing it back
//! yields the same `f64`); non-finite values become `null`. The human
//! rendering prints numbers with the same formatting, so any number shown to
//! a reader can be found verbatim in the JSON.

use std::fmt::Write as _;
use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::altering::AlteringFunction;
use crate::contraction::ContractionCertificate;
use crate::fixedset::{ChainReport, PeriodicWitness, PowerRow, PropertyPReport, PropertyPStatus};
use crate::picard::{CauchyWitness, IterationTrace, Verdict};

pub const SCHEMA: &str = "ratfix.report/v1";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Trace rows shown at each end of the human rendering.
const TEXT_HEAD_ROWS: usize = 20;
const TEXT_TAIL_ROWS: usize = 5;

/// A point as it appears in a report: an index into a finite space or box
/// coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ReportPoint {
    Index(usize),
    Coords(Vec<f64>),
}

pub trait ToReportPoint {
    fn to_report_point(&self) -> ReportPoint;
}

impl ToReportPoint for usize {
    fn to_report_point(&self) -> ReportPoint {
        ReportPoint::Index(*self)
    }
}

impl ToReportPoint for Vec<f64> {
    fn to_report_point(&self) -> ReportPoint {
        ReportPoint::Coords(self.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Subcommand {
    Certify,
    Solve,
    PropertyP,
    Witness,
}

impl Subcommand {
    pub fn as_str(&self) -> &'static str {
        match self {
            Subcommand::Certify => "certify",
            Subcommand::Solve => "solve",
            Subcommand::PropertyP => "property-p",
            Subcommand::Witness => "witness",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Ok,
    Infeasible,
    NotConverged,
    PropertyPFails,
    PropertyPUndefined,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Ok => 0,
            Outcome::Infeasible => 3,
            Outcome::NotConverged => 4,
            Outcome::PropertyPFails | Outcome::PropertyPUndefined => 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SpaceSummary {
    Finite {
        size: usize,
        names: Vec<String>,
    },
    Box {
        dimension: usize,
        lower: Vec<f64>,
        upper: Vec<f64>,
        point_tol: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantsSource {
    Manual,
    Certified,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantsUsed {
    pub a: f64,
    pub b: f64,
    /// `a / (1 - b)`
    pub ratio: f64,
    pub source: ConstantsSource,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub n: usize,
    pub x: ReportPoint,
    /// `d(x_n, x_{n+1})`
    pub step_d: f64,
    /// `(a / (1 - b))^n psi(d(x_0, x_1))`
    pub bound: Option<f64>,
    /// `psi(step_d)`, the quantity the bound controls.
    pub psi_step: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceSection {
    pub x0: ReportPoint,
    pub fix_tol: f64,
    pub max_iters: usize,
    pub iterations: usize,
    pub constants: Option<ConstantsUsed>,
    /// Steps after which the bound alone guarantees `psi(step) <= psi(fix_tol)`.
    pub predicted_iterations: Option<usize>,
    pub verdict: Verdict<ReportPoint>,
    pub rows: Vec<TraceRow>,
}

impl TraceSection {
    pub fn new<P: ToReportPoint>(
        trace: &IterationTrace<P>,
        fix_tol: f64,
        max_iters: usize,
        constants: Option<ConstantsUsed>,
        psi: &AlteringFunction,
        predicted_iterations: Option<usize>,
    ) -> crate::Result<Self> {
        let mut rows = Vec::with_capacity(trace.step_d.len());
        for (n, &step_d) in trace.step_d.iter().enumerate() {
            let bound = trace.bounds.as_ref().map(|b| b[n]);
            let psi_step = match bound {
                Some(_) => Some(psi.evaluate(step_d)?),
                None => None,
            };
            rows.push(TraceRow {
                n,
                x: trace.points[n].to_report_point(),
                step_d,
                bound,
                psi_step,
            });
        }
        let verdict = match &trace.verdict {
            Verdict::Converged {
                n,
                fixed_point,
                residual,
            } => Verdict::Converged {
                n: *n,
                fixed_point: fixed_point.to_report_point(),
                residual: *residual,
            },
            Verdict::MaxIters => Verdict::MaxIters,
            Verdict::CycleDetected { period, entry } => Verdict::CycleDetected {
                period: *period,
                entry: *entry,
            },
        };
        Ok(Self {
            x0: trace.points[0].to_report_point(),
            fix_tol,
            max_iters,
            iterations: trace.iterations(),
            constants,
            predicted_iterations,
            verdict,
            rows,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainRow {
    pub point: ReportPoint,
    pub period: usize,
    pub chain: ChainReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyPSection {
    #[serde(flatten)]
    pub report: PropertyPReport<ReportPoint>,
    /// Periodic-chain evaluations at each witness, when constants are known.
    pub constants: Option<ConstantsUsed>,
    pub chains: Vec<ChainRow>,
}

impl PropertyPSection {
    pub fn convert<P: ToReportPoint>(r: &PropertyPReport<P>) -> PropertyPReport<ReportPoint> {
        let pts = |v: &[P]| v.iter().map(ToReportPoint::to_report_point).collect();
        PropertyPReport {
            n_max: r.n_max,
            evidence: r.evidence,
            fixed: pts(&r.fixed),
            rows: r
                .rows
                .iter()
                .map(|row| PowerRow {
                    n: row.n,
                    fixed: pts(&row.fixed),
                    equal: row.equal,
                })
                .collect(),
            witnesses: r
                .witnesses
                .iter()
                .map(|w| PeriodicWitness {
                    point: w.point.to_report_point(),
                    period: w.period,
                })
                .collect(),
            status: r.status,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceSource {
    Explicit,
    Orbit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessSection {
    pub eps0: f64,
    pub horizon: usize,
    pub source: SequenceSource,
    pub sequence_length: usize,
    pub found: bool,
    pub witness: Option<CauchyWitness>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub subcommand: Subcommand,
    /// SHA-256 of the canonical TOML form of the config that was run.
    pub config_sha256: String,
    pub seed: u64,
    pub space: SpaceSummary,
    pub psi: String,
    pub certificate: Option<ContractionCertificate>,
    pub trace: Option<TraceSection>,
    pub property_p: Option<PropertyPSection>,
    pub witness: Option<WitnessSection>,
    pub outcome: Outcome,
    pub exit_code: i32,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut buf = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, ReportFormatter::default());
        self.serialize(&mut ser).expect("reports always serialize");
        let mut s = String::from_utf8(buf).expect("serde_json writes UTF-8");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        self.write_text(&mut out)
            .expect("writing to a String cannot fail");
        out
    }

    fn write_text(&self, o: &mut String) -> std::fmt::Result {
        writeln!(
            o,
            "ratfix {} {}",
            self.tool_version,
            self.subcommand.as_str()
        )?;
        writeln!(o, "schema      {}", self.schema)?;
        writeln!(o, "config      sha256:{}", self.config_sha256)?;
        writeln!(o, "seed        {}", self.seed)?;
        match &self.space {
            SpaceSummary::Finite { size, names } => {
                writeln!(o, "space       finite, {size} points: {}", names.join(", "))?;
            }
            SpaceSummary::Box {
                lower,
                upper,
                point_tol,
                ..
            } => {
                writeln!(
                    o,
                    "space       box {} x {}, point tolerance {}",
                    fmt_vec(lower),
                    fmt_vec(upper),
                    num(*point_tol)
                )?;
            }
        }
        writeln!(o, "psi         {}", self.psi)?;

        if let Some(c) = &self.certificate {
            write_certificate(o, c)?;
        }
        if let Some(t) = &self.trace {
            write_trace(o, t)?;
        }
        if let Some(p) = &self.property_p {
            write_property_p(o, p)?;
        }
        if let Some(w) = &self.witness {
            write_witness(o, w)?;
        }
        writeln!(o)?;
        writeln!(
            o,
            "outcome     {} (exit {})",
            outcome_str(self.outcome),
            self.exit_code
        )
    }
}

fn outcome_str(o: Outcome) -> &'static str {
    match o {
        Outcome::Ok => "ok",
        Outcome::Infeasible => "infeasible certificate",
        Outcome::NotConverged => "iteration did not converge",
        Outcome::PropertyPFails => "property P fails",
        Outcome::PropertyPUndefined => "property P undefined (no fixed points)",
    }
}

fn write_certificate(o: &mut String, c: &ContractionCertificate) -> std::fmt::Result {
    writeln!(o, "\n== certificate ==")?;
    writeln!(o, "condition   {}", c.kind.as_str())?;
    writeln!(o, "margin      {}", num(c.margin))?;
    let evidence = match c.sample.evidence {
        crate::contraction::Evidence::Exhaustive => "exhaustive",
        crate::contraction::Evidence::Sampled => "sampled",
    };
    write!(o, "pairs       {} ({evidence}", c.sample.pair_count)?;
    if let Some(seed) = c.sample.seed {
        write!(o, ", seed {seed}")?;
    }
    writeln!(o, ")")?;
    match c.chosen {
        Some((a, b)) => {
            writeln!(o, "feasible    yes")?;
            writeln!(o, "a           {}", num(a))?;
            writeln!(o, "b           {}", num(b))?;
            if let Some(j) = c.justification {
                let j = serde_json::to_value(j).expect("unit enum");
                writeln!(o, "invokes     {}", j.as_str().unwrap_or_default())?;
            }
            if let Some(s) = c.min_slack {
                writeln!(o, "min slack   {}", num(s))?;
            }
            writeln!(o, "region vertices (counterclockwise):")?;
            for (a, b) in &c.vertices {
                writeln!(o, "  ({}, {})", num(*a), num(*b))?;
            }
        }
        None => {
            writeln!(o, "feasible    no")?;
            let shown: Vec<String> = c
                .violating_pairs
                .iter()
                .take(10)
                .map(|i| i.to_string())
                .collect();
            let more = if c.violating_pairs.len() > shown.len() {
                ", ..."
            } else {
                ""
            };
            writeln!(o, "violating pair indices: {}{more}", shown.join(", "))?;
        }
    }
    Ok(())
}

fn write_trace(o: &mut String, t: &TraceSection) -> std::fmt::Result {
    writeln!(o, "\n== trace ==")?;
    writeln!(o, "x0          {}", fmt_point(&t.x0))?;
    writeln!(o, "tolerance   {}", num(t.fix_tol))?;
    writeln!(o, "iterations  {} (limit {})", t.iterations, t.max_iters)?;
    if let Some(c) = &t.constants {
        let src = match c.source {
            ConstantsSource::Manual => "manual",
            ConstantsSource::Certified => "certified",
        };
        writeln!(
            o,
            "constants   a = {}, b = {}, ratio = {} ({src})",
            num(c.a),
            num(c.b),
            num(c.ratio)
        )?;
    }
    if let Some(p) = t.predicted_iterations {
        writeln!(o, "bound reaches tolerance after {p} steps")?;
    }
    match &t.verdict {
        Verdict::Converged {
            n,
            fixed_point,
            residual,
        } => writeln!(
            o,
            "verdict     converged at step {n} to {} (residual {})",
            fmt_point(fixed_point),
            num(*residual)
        )?,
        Verdict::MaxIters => writeln!(o, "verdict     iteration limit reached")?,
        Verdict::CycleDetected { period, entry } => writeln!(
            o,
            "verdict     cycle of period {period} entered at step {entry}"
        )?,
    }
    let bounded = t.constants.is_some();
    if bounded {
        writeln!(
            o,
            "{:>6}  {:<28} {:<24} {:<24} {:<24}",
            "n", "x_n", "step", "psi(step)", "bound"
        )?;
    } else {
        writeln!(o, "{:>6}  {:<28} {:<24}", "n", "x_n", "step")?;
    }
    let len = t.rows.len();
    for (i, row) in t.rows.iter().enumerate() {
        if len > TEXT_HEAD_ROWS + TEXT_TAIL_ROWS && i == TEXT_HEAD_ROWS {
            writeln!(o, "{:>6}", "...")?;
        }
        if len > TEXT_HEAD_ROWS + TEXT_TAIL_ROWS && i >= TEXT_HEAD_ROWS && i < len - TEXT_TAIL_ROWS
        {
            continue;
        }
        write!(
            o,
            "{:>6}  {:<28} {:<24}",
            row.n,
            fmt_point(&row.x),
            num(row.step_d)
        )?;
        if let (Some(ps), Some(bd)) = (row.psi_step, row.bound) {
            write!(o, " {:<24} {:<24}", num(ps), num(bd))?;
        }
        writeln!(o)?;
    }
    Ok(())
}

fn write_property_p(o: &mut String, p: &PropertyPSection) -> std::fmt::Result {
    let r = &p.report;
    writeln!(o, "\n== property P ==")?;
    let evidence = match r.evidence {
        crate::contraction::Evidence::Exhaustive => "exhaustive",
        crate::contraction::Evidence::Sampled => "sampled evidence",
    };
    writeln!(o, "evidence    {evidence}")?;
    writeln!(o, "F(S)        {}", fmt_points(&r.fixed))?;
    for row in &r.rows {
        let mark = if row.equal { "=" } else { "!=" };
        writeln!(o, "F(S^{}) {mark} F(S)  {}", row.n, fmt_points(&row.fixed))?;
    }
    if r.witnesses.is_empty() {
        writeln!(o, "periodic witnesses: none")?;
    } else {
        writeln!(o, "periodic witnesses:")?;
        writeln!(o, "{:>8}  point", "period")?;
        for w in &r.witnesses {
            writeln!(o, "{:>8}  {}", w.period, fmt_point(&w.point))?;
        }
    }
    for c in &p.chains {
        writeln!(
            o,
            "chain at {} (period {}): lhs {} vs factor {} * lhs = {} -> {}",
            fmt_point(&c.point),
            c.period,
            num(c.chain.lhs),
            num(c.chain.factor),
            num(c.chain.rhs),
            if c.chain.holds { "holds" } else { "violated" }
        )?;
    }
    let status = match r.status {
        PropertyPStatus::Holds => "holds",
        PropertyPStatus::Fails => "fails",
        PropertyPStatus::Undefined => "undefined: F(S) is empty",
    };
    writeln!(o, "status      {status}")
}

fn write_witness(o: &mut String, w: &WitnessSection) -> std::fmt::Result {
    writeln!(o, "\n== Cauchy-violation witness ==")?;
    writeln!(o, "eps0        {}", num(w.eps0))?;
    writeln!(o, "horizon     {}", w.horizon)?;
    let src = match w.source {
        SequenceSource::Explicit => "explicit sequence",
        SequenceSource::Orbit => "orbit",
    };
    writeln!(o, "sequence    {src} of length {}", w.sequence_length)?;
    match &w.witness {
        None => writeln!(o, "no witness within the horizon"),
        Some(cw) => {
            writeln!(o, "{:>6} {:>8} {:>8}", "k", "n(k)", "m(k)")?;
            let len = cw.indices.len();
            for (i, ix) in cw.indices.iter().enumerate() {
                if len > TEXT_HEAD_ROWS + TEXT_TAIL_ROWS
                    && i >= TEXT_HEAD_ROWS
                    && i < len - TEXT_TAIL_ROWS
                {
                    if i == TEXT_HEAD_ROWS {
                        writeln!(o, "{:>6}", "...")?;
                    }
                    continue;
                }
                writeln!(o, "{:>6} {:>8} {:>8}", ix.k, ix.n, ix.m)?;
            }
            let l = cw.limits;
            writeln!(o, "at the largest k:")?;
            writeln!(o, "  d(x_(m-1), x_(n+1)) = {}", num(l.prev_to_next))?;
            writeln!(o, "  d(x_m, x_n)         = {}", num(l.at_indices))?;
            writeln!(o, "  d(x_(m-1), x_n)     = {}", num(l.prev_to_n))?;
            writeln!(o, "  d(x_(m+1), x_(n+1)) = {}", num(l.shifted))
        }
    }
}

/// Formats a float exactly as the JSON rendering does.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| num(*x)).collect();
    format!("[{}]", parts.join(", "))
}

fn fmt_point(p: &ReportPoint) -> String {
    match p {
        ReportPoint::Index(i) => format!("[{i}]"),
        ReportPoint::Coords(v) => fmt_vec(v),
    }
}

fn fmt_points(ps: &[ReportPoint]) -> String {
    if ps.is_empty() {
        return "{}".to_string();
    }
    let parts: Vec<String> = ps.iter().map(fmt_point).collect();
    format!("{{{}}}", parts.join(", "))
}

/// Pretty JSON with floats at 17 significant digits.
#[derive(Default)]
struct ReportFormatter {
    pretty: PrettyFormatter<'static>,
}

impl Formatter for ReportFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.pretty.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.pretty.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_object_value(w)
    }
}
