//! Runs the checks of a scenario and renders the results.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use derivlab_core::calculus::{check_trace, symmetrize_linearity, symmetrize_power_pair, PointFunction};
use derivlab_core::fields::{fmt_rational, mobius_split_normalized, FieldElement, SPLIT_ANCHOR};
use derivlab_core::maps::{check_additivity, is_derivation_on_samples, is_linear_on_samples};
use derivlab_core::report::{Status, VerdictReport};
use derivlab_core::samples::SampleSet;
use derivlab_core::theorems::{self as th, phi_power_function};
use serde::Serialize;

use crate::scenario::{Check, CheckSpec, Expectation, SampleSpec, Scenario};

pub const TOOL: &str = "derivlab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const DEFAULT_SAMPLES: usize = 20;

/// Trials per slot for the symmetrization checks.
const SYM_TRIALS: usize = 32;
const SYM_SEED: u64 = 0x5eed_0021;

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    /// Seconds since the Unix epoch to stamp into JSON output.
    pub timestamp: Option<u64>,
    /// Bundled scenario name, if any.
    pub scenario: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub index: usize,
    pub line: usize,
    pub check: String,
    pub params: BTreeMap<String, String>,
    pub expect: &'static str,
    pub status: Status,
    pub met: bool,
    pub report: VerdictReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub checks: usize,
    pub met: usize,
    pub violated: usize,
    pub pass: usize,
    pub fail: usize,
    pub error: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SamplesInfo {
    pub source: String,
    pub size: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub tool: &'static str,
    pub version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anchor: Option<String>,
    pub tower: String,
    pub assumptions: Vec<String>,
    pub samples: SamplesInfo,
    pub checks: Vec<CheckOutcome>,
    pub summary: Summary,
}

impl RunReport {
    /// 0 when every expectation is met, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.summary.violated == 0 {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.tool, self.version);
        if let Some(s) = &self.scenario {
            let _ = writeln!(out, "scenario:    {s}");
        }
        if let Some(t) = &self.title {
            let _ = writeln!(out, "title:       {t}");
        }
        if let Some(a) = &self.anchor {
            let _ = writeln!(out, "anchor:      {a}");
        }
        let _ = writeln!(out, "tower:       {}", self.tower);
        let _ = writeln!(out, "samples:     {} ({})", self.samples.size, self.samples.source);
        for a in &self.assumptions {
            let _ = writeln!(out, "assumption:  {a}");
        }
        out.push('\n');
        let header = ["#", "line", "check", "status", "expect", "met", "samples"];
        let rows: Vec<[String; 7]> = self
            .checks
            .iter()
            .map(|c| {
                [
                    c.index.to_string(),
                    c.line.to_string(),
                    c.check.clone(),
                    c.status.as_str().to_string(),
                    c.expect.to_string(),
                    if c.met { "yes" } else { "NO" }.to_string(),
                    c.report.samples_tested.to_string(),
                ]
            })
            .collect();
        let mut widths = header.map(|h| h.len());
        for r in &rows {
            for (w, cell) in widths.iter_mut().zip(r) {
                *w = (*w).max(cell.len());
            }
        }
        let line = |cells: &[String]| {
            let parts: Vec<String> = cells.iter().zip(widths).map(|(c, w)| format!("{c:<w$}")).collect();
            parts.join("  ").trim_end().to_string()
        };
        let _ = writeln!(out, "{}", line(&header.map(String::from)));
        let _ = writeln!(out, "{}", line(&widths.map(|w| "-".repeat(w))));
        for r in &rows {
            let _ = writeln!(out, "{}", line(r));
        }
        for c in &self.checks {
            if c.status == Status::Pass && c.report.notes.is_empty() {
                continue;
            }
            let _ = writeln!(out, "\n[{}] {} (line {})", c.index, c.check, c.line);
            if !c.params.is_empty() {
                let ps: Vec<String> = c.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                let _ = writeln!(out, "    params:  {}", ps.join(" "));
            }
            let _ = writeln!(out, "    anchor:  {}", c.report.anchor);
            if let Some(e) = &c.report.error {
                let _ = writeln!(out, "    error:   {e}");
            }
            if let Some(w) = &c.report.witness {
                let inputs: Vec<String> = w.inputs.iter().map(|i| format!("{} = {}", i.name, i.value)).collect();
                let _ = writeln!(out, "    witness: {}", inputs.join(", "));
                let _ = writeln!(out, "    lhs:     {}", w.lhs);
                let _ = writeln!(out, "    rhs:     {}", w.rhs);
            }
            for s in &c.report.sub_verdicts {
                let _ = writeln!(out, "    {:<8} {}", s.status.as_str(), s.check);
            }
            for n in &c.report.notes {
                let _ = writeln!(out, "    note:    {n}");
            }
        }
        let s = &self.summary;
        let _ = writeln!(
            out,
            "\n{} checks: {} expectations met, {} violated ({} PASS, {} FAIL, {} ERROR, {} SKIPPED)",
            s.checks, s.met, s.violated, s.pass, s.fail, s.error, s.skipped
        );
        out
    }
}

/// Builds the sample set for a scenario under the given options.
pub fn samples_for(s: &Scenario, opts: &RunOptions) -> (SampleSet, String) {
    let k = &s.tower;
    match &s.samples {
        SampleSpec::List(xs) => (SampleSet::new(xs.clone()), "list".into()),
        SampleSpec::Default { size } => {
            let n = opts.samples.or(*size).unwrap_or(DEFAULT_SAMPLES);
            match opts.seed {
                Some(seed) => (SampleSet::random(k, n, seed), format!("random, seed {seed}")),
                None => (SampleSet::default_sized(k, n), "default".into()),
            }
        }
        SampleSpec::Random { size, seed } => {
            let n = opts.samples.unwrap_or(*size);
            let seed = opts.seed.unwrap_or(*seed);
            (SampleSet::random(k, n, seed), format!("random, seed {seed}"))
        }
    }
}

pub fn run_scenario(s: &Scenario, opts: &RunOptions) -> RunReport {
    let (samples, source) = samples_for(s, opts);
    let assumptions = s.tower.assumptions().to_vec();
    let mut checks = Vec::new();
    for (i, c) in s.checks.iter().enumerate() {
        let report = match run_check(c, &samples) {
            Ok(r) => r,
            Err(e) => VerdictReport::from_error(c.kind, anchor_of(c.kind), &e),
        }
        .with_assumptions(&assumptions);
        let met = match c.expect {
            Expectation::Pass => report.status == Status::Pass,
            Expectation::Fail => report.status == Status::Fail,
        };
        checks.push(CheckOutcome {
            index: i + 1,
            line: c.pos.line,
            check: c.kind.to_string(),
            params: c.params.clone(),
            expect: c.expect.as_str(),
            status: report.status,
            met,
            report,
        });
    }
    let count = |st: Status| checks.iter().filter(|c| c.status == st).count();
    let met = checks.iter().filter(|c| c.met).count();
    let summary = Summary {
        checks: checks.len(),
        met,
        violated: checks.len() - met,
        pass: count(Status::Pass),
        fail: count(Status::Fail),
        error: count(Status::Error),
        skipped: count(Status::Skipped),
    };
    RunReport {
        schema: 1,
        tool: TOOL,
        version: VERSION,
        timestamp: opts.timestamp,
        scenario: opts.scenario.clone(),
        title: s.title.clone(),
        anchor: s.anchor.clone(),
        tower: s.tower.descriptor(),
        assumptions,
        samples: SamplesInfo { source, size: samples.len() },
        checks,
        summary,
    }
}

/// Anchor formula for each check kind, used when a check errors before producing a report.
pub fn anchor_of(kind: &str) -> &'static str {
    use derivlab_core::calculus::TRACE_MATCH_ANCHOR;
    use derivlab_core::maps::{ADDITIVE_ANCHOR, LEIBNIZ_ANCHOR, LINEAR_ANCHOR};
    match kind {
        "power_rule" => th::POWER_RULE_ANCHOR,
        "reciprocal" => th::JURKAT_KUREPA_ANCHOR,
        "nishiyama" => th::NISHIYAMA_ANCHOR,
        "kannappan_kurepa" => th::KANNAPPAN_KUREPA_ANCHOR,
        "phi_power" => th::PHI_POWER_ANCHOR,
        "chi_identity" => th::CHI_ANCHOR,
        "composite" => th::COMPOSITE_ANCHOR,
        "linearity" => th::LINEARITY_ANCHOR,
        "homogeneity" => th::HOMOGENEITY_ANCHOR,
        "rational_power" => th::RATIONAL_POWER_ANCHOR,
        "mobius_forward" => th::MOBIUS_ANCHOR,
        "star" => th::STAR_ANCHOR,
        "triangle" => th::TRIANGLE_ANCHOR,
        "derivation" => LEIBNIZ_ANCHOR,
        "linear" => LINEAR_ANCHOR,
        "additive" => ADDITIVE_ANCHOR,
        "symmetrize_power" | "symmetrize_linearity" => TRACE_MATCH_ANCHOR,
        "split_identity" => SPLIT_ANCHOR,
        _ => "",
    }
}

fn run_check(c: &Check, s: &SampleSet) -> derivlab_core::Result<VerdictReport> {
    match &c.spec {
        CheckSpec::PowerRule { f, k } => th::check_power_rule(&f.map, *k, s),
        CheckSpec::Reciprocal { f } => th::check_jurkat_kurepa(&f.map, s),
        CheckSpec::Nishiyama { f, c, n, m, k } => th::check_nishiyama(&f.map, c, *n, *m, *k, s),
        CheckSpec::KannappanKurepa { f, g, n, m } => th::check_kannappan_kurepa(&f.map, &g.map, *n, *m, s),
        CheckSpec::PhiPower { f, g, n, m } => th::verify_phi_power(&f.map, &g.map, *n, *m, s),
        CheckSpec::Chi { f, g } => th::chi_transform_identity(&f.map, &g.map, s),
        CheckSpec::Composite { f, kappa, n, m } => th::composite_power_identity(&f.map, kappa, *n, *m, s),
        CheckSpec::Linearity { f, n } => th::check_linearity_theorem(&f.map, *n, s),
        CheckSpec::Homogeneity { f, g, n, m, alpha, rs } => {
            let phi = phi_power_function(&f.map, &g.map, *n, *m);
            th::q_homogeneity_check(&phi, *alpha, &s.clone().nonzero(), rs)
        }
        CheckSpec::RationalPower { f, p, q } => th::verify_rational_power(&f.map, *p, *q, s),
        CheckSpec::MobiusForward { f, alpha, beta, n, mat, g_factor } => {
            th::verify_mobius_forward(&f.map, alpha, beta, *n, mat, s, g_factor.as_ref())
        }
        CheckSpec::Star { f, g, n, mat } => th::check_star(&f.map, &g.map, *n, mat, s),
        CheckSpec::Triangle { f, g, n, mat } => th::check_triangle(&f.map, &g.map, *n, mat, s),
        CheckSpec::Derivation { f } => is_derivation_on_samples(&f.map, s),
        CheckSpec::Linear { f } => is_linear_on_samples(&f.map, s),
        CheckSpec::Additive { f, rs } => check_additivity(&f.map, s, rs),
        CheckSpec::SymmetrizePower { f, g, n, m } => {
            let phi = symmetrize_power_pair(&f.map, &g.map, *n, *m)?;
            let target = phi_power_function(&f.map, &g.map, *n as i64, *m as i64);
            symmetrization_report("symmetrize_power", &phi, &target, s)
        }
        CheckSpec::SymmetrizeLinearity { f, n } => {
            let phi = symmetrize_linearity(&f.map, *n)?;
            let map = f.map.clone();
            let k = *n as i64;
            let target = PointFunction::new(&format!("f(x^{k}) - f(x)^{k}"), move |x| {
                map.eval(&x.pow(k)?)?.sub(&map.eval(x)?.pow(k)?)
            });
            symmetrization_report("symmetrize_linearity", &phi, &target, s)
        }
        CheckSpec::Split { d, det, n } => {
            let xs: Vec<FieldElement> = s
                .iter()
                .filter(|x| !x.is_zero() && x.pow(*n).map(|p| !p.add_rational(d).is_zero()).unwrap_or(false))
                .cloned()
                .collect();
            let mut tested = 0;
            for x in &xs {
                let r = mobius_split_normalized(d, det, *n, x)?;
                tested += 1;
                if !r.passed() {
                    let mut r = r;
                    r.samples_tested = tested;
                    return Ok(r);
                }
            }
            let mut r = VerdictReport::new("mobius_split_identity", SPLIT_ANCHOR)
                .with_value("d", fmt_rational(d))
                .with_value("D", fmt_rational(det))
                .with_value("n", n);
            r.samples_tested = tested;
            Ok(r)
        }
    }
}

fn symmetrization_report(
    name: &str,
    phi: &derivlab_core::calculus::MultiAdditiveMap,
    target: &PointFunction,
    s: &SampleSet,
) -> derivlab_core::Result<VerdictReport> {
    let sym = phi.check_symmetry(s, SYM_TRIALS, SYM_SEED)?;
    let slot = phi.check_slot_additivity(s, SYM_TRIALS, SYM_SEED)?;
    let trace = check_trace(phi, target, s)?;
    Ok(VerdictReport::new(name, derivlab_core::calculus::TRACE_MATCH_ANCHOR)
        .with_sub_verdicts(vec![sym, slot, trace])
        .with_value("map", phi.name())
        .with_value("arity", phi.arity()))
}
