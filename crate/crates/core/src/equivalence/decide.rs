use std::fmt;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::diffop::OperatorFamily;
use crate::error::Result;
use crate::quantize::InvariantSpec;
use crate::symexpr::{Rat, Q};

use super::chart::{battery_values, build_chart, eval_base, fmt_point, from_f64, natural_chart, to_f64, Chart, Domain};
use super::matching::{match_point, NewtonResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Equivalent,
    NotEquivalent,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Equivalent => "equivalent",
            Verdict::NotEquivalent => "not_equivalent",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Why a pair was declared inequivalent.
#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    /// An invariant disagrees at corresponding points.
    Signature { invariant: String, y0: Q, y0b: Q, x: Vec<Q>, xb: Vec<f64>, value_a: f64, value_b: f64, residual: f64 },
    /// The correspondence changes with the fiber value.
    FiberDependence { x: Vec<Q>, psi: Vec<f64>, psi_other: Vec<f64>, y0s: (Q, Q), residual: f64 },
    /// Two charts of an atlas induce different correspondences on their overlap.
    Overlap { charts: (usize, usize), x: Vec<Q>, psi: Vec<f64>, psi_other: Vec<f64>, residual: f64 },
}

impl Witness {
    pub fn to_json(&self) -> Value {
        match self {
            Witness::Signature { invariant, y0, y0b, x, xb, value_a, value_b, residual } => json!({
                "kind": "signature", "invariant": invariant, "y0": y0.to_string(), "y0b": y0b.to_string(),
                "x": qs(x), "xb": xb, "value_a": value_a, "value_b": value_b, "residual": residual,
            }),
            Witness::FiberDependence { x, psi, psi_other, y0s, residual } => json!({
                "kind": "fiber_dependence", "x": qs(x), "psi": psi, "psi_other": psi_other,
                "y0": [y0s.0.to_string(), y0s.1.to_string()], "residual": residual,
            }),
            Witness::Overlap { charts, x, psi, psi_other, residual } => json!({
                "kind": "overlap", "charts": [charts.0, charts.1], "x": qs(x), "psi": psi,
                "psi_other": psi_other, "residual": residual,
            }),
        }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Signature { invariant, y0, x, xb, value_a, value_b, residual, .. } => write!(
                f,
                "{invariant} differs at x = {} ↔ {:?} (y0 = {y0}): {value_a} vs {value_b}, residual {residual:e}",
                fmt_point(x),
                xb
            ),
            Witness::FiberDependence { x, psi, psi_other, y0s, residual } => write!(
                f,
                "correspondence depends on y0 at x = {}: {psi:?} (y0 = {}) vs {psi_other:?} (y0 = {}), residual {residual:e}",
                fmt_point(x),
                y0s.0,
                y0s.1
            ),
            Witness::Overlap { charts, x, psi, psi_other, residual } => write!(
                f,
                "charts {} and {} disagree at x = {}: {psi:?} vs {psi_other:?}, residual {residual:e}",
                charts.0,
                charts.1,
                fmt_point(x)
            ),
        }
    }
}

fn qs(x: &[Q]) -> Vec<String> {
    x.iter().map(|v| v.to_string()).collect()
}

/// Parameters of the decision procedure.
#[derive(Clone, Debug)]
pub struct EquivConfig {
    /// Invariants used as chart coordinates (one per dimension).
    pub chart: Vec<InvariantSpec>,
    /// Invariants compared at matched points.
    pub battery: Vec<InvariantSpec>,
    pub grid: usize,
    pub tol: f64,
    pub domain_a: Domain,
    /// Where the grid seeds for `B` live; defaults to `domain_a`.
    pub domain_b: Option<Domain>,
    /// Offset of the second fiber sample (`ỹ0 = y0 + offset`).
    pub second_offset: Q,
}

impl EquivConfig {
    pub fn default_chart(dim: usize) -> Vec<InvariantSpec> {
        let s = if dim == 1 { "I0" } else { "I1,THETA:3" };
        InvariantSpec::parse_list(s).expect("valid list")
    }

    pub fn default_battery(dim: usize) -> Vec<InvariantSpec> {
        // the torsion vanishes on a line, so I1 carries nothing there
        let s = if dim == 1 { "I0,DA0:2,DA0:3,TRESSE:DA0:2;I0" } else { "I0,I1,BOX:I1,TRESSE:BOX:I1;I1,I2" };
        InvariantSpec::parse_list(s).expect("valid list")
    }

    /// Defaults: chart `I1, THETA:3` (`I0` on a line), the standard battery for `dim`, grid 5, tol 1e-9,
    /// domain `[1, 2]^dim`, second fiber sample at `y0 + 1`.
    pub fn new(dim: usize) -> Self {
        EquivConfig {
            chart: Self::default_chart(dim),
            battery: Self::default_battery(dim),
            grid: 5,
            tol: 1e-9,
            domain_a: Domain::cube(dim, Q::from_integer(1.into()), Q::from_integer(2.into())),
            domain_b: None,
            second_offset: Q::from_integer(1.into()),
        }
    }
}

/// A matched grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct MatchRow {
    pub x: Vec<Q>,
    pub xb: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquivReport {
    pub verdict: Verdict,
    pub reason: Option<String>,
    pub witness: Option<Witness>,
    pub y0s: Vec<(Q, Q)>,
    pub chart: Vec<String>,
    pub battery: Vec<String>,
    /// Correspondence at the first fiber sample.
    pub correspondence: Vec<MatchRow>,
    pub skipped: Vec<(Vec<Q>, String)>,
    pub max_residual: f64,
}

impl EquivReport {
    fn new(cfg: &EquivConfig, y0s: Vec<(Q, Q)>, dim: usize) -> Self {
        EquivReport {
            verdict: Verdict::Inconclusive,
            reason: None,
            witness: None,
            y0s,
            chart: cfg.chart.iter().map(|s| s.to_string()).collect(),
            battery: cfg.battery.iter().flat_map(|s| s.component_names(dim)).collect(),
            correspondence: Vec::new(),
            skipped: Vec::new(),
            max_residual: 0.0,
        }
    }

    fn inconclusive(mut self, reason: String) -> Self {
        self.verdict = Verdict::Inconclusive;
        self.reason = Some(reason);
        self
    }

    pub fn to_json(&self) -> Value {
        json!({
            "verdict": self.verdict.to_string(),
            "reason": self.reason,
            "witness": self.witness.as_ref().map(Witness::to_json),
            "y0": self.y0s.iter().map(|(a, b)| json!([a.to_string(), b.to_string()])).collect::<Vec<_>>(),
            "chart": self.chart,
            "battery": self.battery,
            "max_residual": self.max_residual,
            "correspondence": self.correspondence.iter().map(|r| json!({
                "x": qs(&r.x), "xb": r.xb, "residual": r.residual, "iterations": r.iterations,
            })).collect::<Vec<_>>(),
            "skipped": self.skipped.iter().map(|(x, e)| json!({"x": qs(x), "reason": e})).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for EquivReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "verdict: {}", self.verdict)?;
        if let Some(r) = &self.reason {
            writeln!(f, "reason: {r}")?;
        }
        if let Some(w) = &self.witness {
            writeln!(f, "witness: {w}")?;
        }
        writeln!(f, "chart: {}", self.chart.join(", "))?;
        writeln!(f, "matched points: {} (max residual {:e})", self.correspondence.len(), self.max_residual)?;
        for r in &self.correspondence {
            writeln!(f, "  {} -> {:?}", fmt_point(&r.x), r.xb)?;
        }
        for (x, e) in &self.skipped {
            writeln!(f, "  skipped {}: {e}", fmt_point(x))?;
        }
        Ok(())
    }
}

struct Sample {
    chart_a: Chart,
    chart_b: Chart,
    rows: Vec<MatchRow>,
}

fn scaled(tol: f64, v: &[f64]) -> f64 {
    tol * (1.0 + v.iter().fold(0.0f64, |m, a| m.max(a.abs())))
}

/// Charts for one fiber sample and the grid correspondence between them.
fn match_sample(a: &OperatorFamily, b: &OperatorFamily, ya: &Q, yb: &Q, cfg: &EquivConfig) -> Result<std::result::Result<Sample, String>> {
    let dom_b = cfg.domain_b.clone().unwrap_or_else(|| cfg.domain_a.clone());
    let chart_a = match natural_chart(a, ya, &cfg.chart, &cfg.domain_a, cfg.grid) {
        Ok(c) => c,
        Err(e) if e.is_mathematical() => return Ok(Err(format!("chart of A at y0 = {ya}: {e}"))),
        Err(e) => return Err(e),
    };
    // B's grid only supplies Newton seeds, so it is not required to be regular everywhere
    let chart_b = match build_chart(b, yb, &cfg.chart, &dom_b, cfg.grid) {
        Ok(c) => c,
        Err(e) if e.is_mathematical() => return Ok(Err(format!("chart of B at y0 = {yb}: {e}"))),
        Err(e) => return Err(e),
    };
    let seeds: Vec<(Vec<f64>, Vec<f64>)> = dom_b
        .grid(cfg.grid)
        .iter()
        .filter(|x| chart_b.check_point(x).is_ok())
        .map(|x| (x.iter().map(to_f64).collect(), chart_b.eval(x).expect("checked").iter().map(to_f64).collect()))
        .collect();
    if seeds.is_empty() {
        return Ok(Err(format!("chart of B at y0 = {yb} is singular at every grid point of {dom_b}")));
    }
    let pts = cfg.domain_a.grid(cfg.grid);
    let found: Vec<(Vec<Q>, Option<NewtonResult>)> = pts
        .into_par_iter()
        .map(|x| {
            let target: Vec<f64> = chart_a.eval(&x).expect("checked").iter().map(to_f64).collect();
            let m = match_point(&chart_b, &seeds, &target, cfg.tol, 4, Some(&dom_b));
            (x, m)
        })
        .collect();
    let mut rows = Vec::with_capacity(found.len());
    for (x, m) in found {
        match m {
            Some(r) => rows.push(MatchRow { x, xb: r.x, residual: r.residual, iterations: r.iterations }),
            None => {
                return Ok(Err(format!("no Newton convergence for the chart point of x = {} (y0 = {ya})", fmt_point(&x))))
            }
        }
    }
    Ok(Ok(Sample { chart_a, chart_b, rows }))
}

/// Compares the battery at matched points; `Ok(None)` when all agree.
fn compare_battery(s: &Sample, cfg: &EquivConfig, report: &mut EquivReport) -> Result<Option<Witness>> {
    let (names, va) = battery_values(&s.chart_a.op, &cfg.battery)?;
    let (_, vb) = battery_values(&s.chart_b.op, &cfg.battery)?;
    let outcomes: Vec<std::result::Result<Option<Witness>, String>> = s
        .rows
        .par_iter()
        .map(|row| {
            let xbq: Vec<Q> = row.xb.iter().map(|&v| from_f64(v).expect("finite")).collect();
            for (k, name) in names.iter().enumerate() {
                let a = eval_base(&s.chart_a.op, &va[k], &row.x).map_err(|e| e.to_string())?;
                let b = eval_base(&s.chart_b.op, &vb[k], &xbq).map_err(|e| e.to_string())?;
                let (fa, fb) = (to_f64(&a), to_f64(&b));
                let res = (fa - fb).abs();
                if !(res <= scaled(cfg.tol, &[fa])) {
                    return Ok(Some(Witness::Signature {
                        invariant: name.clone(),
                        y0: s.chart_a.y0.clone(),
                        y0b: s.chart_b.y0.clone(),
                        x: row.x.clone(),
                        xb: row.xb.clone(),
                        value_a: fa,
                        value_b: fb,
                        residual: res,
                    }));
                }
            }
            Ok(None)
        })
        .collect();
    let mut compared = 0;
    for (row, o) in s.rows.iter().zip(outcomes) {
        match o {
            Ok(Some(w)) => return Ok(Some(w)),
            Ok(None) => compared += 1,
            Err(e) => report.skipped.push((row.x.clone(), format!("y0 = {}: {e}", s.chart_a.y0))),
        }
    }
    if compared == 0 {
        report.reason = Some("every grid point was skipped".into());
    }
    Ok(None)
}

/// Decides whether two families are equivalent under diffeomorphisms of the
/// base, by matching natural charts and comparing invariant signatures.
///
/// Usage errors (wrong dimension, malformed battery) are returned as `Err`;
/// mathematical obstacles produce an inconclusive report.
pub fn equivalence_test(a: &OperatorFamily, b: &OperatorFamily, y0: &Q, y0b: &Q, cfg: &EquivConfig) -> Result<EquivReport> {
    let dim = a.dim();
    if b.dim() != dim {
        return Err(crate::error::Error::Invalid("the two families live in different dimensions".into()));
    }
    let y0s = vec![(y0.clone(), y0b.clone()), (y0 + &cfg.second_offset, y0b + &cfg.second_offset)];
    let mut report = EquivReport::new(cfg, y0s.clone(), dim);
    let mut samples = Vec::with_capacity(2);
    for (ya, yb) in &y0s {
        match match_sample(a, b, ya, yb, cfg)? {
            Ok(s) => samples.push(s),
            Err(reason) => return Ok(report.inconclusive(reason)),
        }
    }
    report.correspondence = samples[0].rows.clone();
    report.max_residual = samples.iter().flat_map(|s| s.rows.iter().map(|r| r.residual)).fold(0.0, f64::max);

    // the correspondence must not depend on the fiber value
    for (r0, r1) in samples[0].rows.iter().zip(&samples[1].rows) {
        let res = r0.xb.iter().zip(&r1.xb).fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
        if !(res <= scaled(cfg.tol, &r0.xb)) {
            report.verdict = Verdict::NotEquivalent;
            report.witness = Some(Witness::FiberDependence {
                x: r0.x.clone(),
                psi: r0.xb.clone(),
                psi_other: r1.xb.clone(),
                y0s: (y0s[0].0.clone(), y0s[1].0.clone()),
                residual: res,
            });
            return Ok(report);
        }
    }
    for s in &samples {
        let w = match compare_battery(s, cfg, &mut report) {
            Ok(w) => w,
            Err(e) if e.is_mathematical() => return Ok(report.inconclusive(format!("battery: {e}"))),
            Err(e) => return Err(e),
        };
        if let Some(w) = w {
            report.verdict = Verdict::NotEquivalent;
            report.witness = Some(w);
            return Ok(report);
        }
        if report.reason.is_some() {
            return Ok(report);
        }
    }
    report.verdict = Verdict::Equivalent;
    Ok(report)
}

/// One chart of an atlas: coordinate invariants and where they are used.
#[derive(Clone, Debug)]
pub struct AtlasChart {
    pub chart: Vec<InvariantSpec>,
    pub domain: Domain,
}

#[derive(Clone, Debug)]
pub struct AtlasReport {
    pub verdict: Verdict,
    pub per_chart: Vec<EquivReport>,
    pub witness: Option<Witness>,
    pub reason: Option<String>,
}

/// Runs the test per chart and requires the induced correspondences to agree
/// on overlapping domains.
pub fn atlas_test(a: &OperatorFamily, b: &OperatorFamily, y0: &Q, y0b: &Q, charts: &[AtlasChart], cfg: &EquivConfig) -> Result<AtlasReport> {
    let mut per_chart = Vec::with_capacity(charts.len());
    for c in charts {
        let mut local = cfg.clone();
        local.chart = c.chart.clone();
        local.domain_a = c.domain.clone();
        per_chart.push(equivalence_test(a, b, y0, y0b, &local)?);
    }
    let verdicts: Vec<Verdict> = per_chart.iter().map(|r| r.verdict).collect();
    let mut out = AtlasReport { verdict: Verdict::Equivalent, per_chart, witness: None, reason: None };
    if let Some(k) = verdicts.iter().position(|v| *v == Verdict::NotEquivalent) {
        out.verdict = Verdict::NotEquivalent;
        out.witness = out.per_chart[k].witness.clone();
        return Ok(out);
    }
    if let Some(k) = verdicts.iter().position(|v| *v == Verdict::Inconclusive) {
        out.verdict = Verdict::Inconclusive;
        out.reason = Some(format!("chart {k}: {}", out.per_chart[k].reason.clone().unwrap_or_default()));
        return Ok(out);
    }
    let dom_b = cfg.domain_b.clone().unwrap_or_else(|| cfg.domain_a.clone());
    for i in 0..charts.len() {
        for j in i + 1..charts.len() {
            let Some(ov) = charts[i].domain.intersect(&charts[j].domain) else { continue };
            let mut maps = Vec::with_capacity(2);
            for k in [i, j] {
                let mut local = cfg.clone();
                local.chart = charts[k].chart.clone();
                local.domain_a = ov.clone();
                local.domain_b = Some(dom_b.clone());
                match match_sample(a, b, y0, y0b, &local)? {
                    Ok(s) => maps.push(s.rows),
                    Err(reason) => {
                        out.verdict = Verdict::Inconclusive;
                        out.reason = Some(format!("overlap of charts {i} and {j}: {reason}"));
                        return Ok(out);
                    }
                }
            }
            for (r0, r1) in maps[0].iter().zip(&maps[1]) {
                let res = r0.xb.iter().zip(&r1.xb).fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
                if !(res <= scaled(cfg.tol, &r0.xb)) {
                    out.verdict = Verdict::NotEquivalent;
                    out.witness = Some(Witness::Overlap {
                        charts: (i, j),
                        x: r0.x.clone(),
                        psi: r0.xb.clone(),
                        psi_other: r1.xb.clone(),
                        residual: res,
                    });
                    return Ok(out);
                }
            }
        }
    }
    Ok(out)
}

/// `Rat` helper kept for callers that want exact chart values.
pub fn chart_values(chart: &Chart, x: &[Q]) -> Result<Vec<Rat>> {
    let vars = chart.op.vars();
    chart.eval(x).map(|v| v.into_iter().map(|q| Rat::constant(vars, q)).collect())
}
