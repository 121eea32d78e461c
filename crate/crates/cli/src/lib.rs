//! The `tresse` command line: argument parsing, file I/O and reports.
//!
//! [`run`] does all the work and returns the exit code with both output
//! streams, so tests can drive the exact code path of the binary.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use tresse_core::descent::{descend, oracle_1d, oracle_1d_pairs, pair_invariants, OracleReport, PairSource, Seed};
use tresse_core::diffop::{Operator, OperatorFile};
use tresse_core::equivalence::{equivalence_test, parse_q, Domain, EquivConfig};
use tresse_core::geometry::{classify, classify_at, curvature, symbol3, torsion_form, wagner_connection, SymTensor};
use tresse_core::quantize::{total_symbol, Evaluator, InvariantSpec};
use tresse_core::{Error, Q};

/// Version of the JSON report layout.
pub const SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "tresse", version, about = "Natural invariants and equivalence of third-order operators")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Discriminant and type of the cubic symbol (two variables).
    Classify {
        op: PathBuf,
        /// Evaluate at a point: one rational per variable, comma-separated.
        #[arg(long)]
        at: Option<String>,
    },
    /// The connection making the symbol parallel, its curvature and torsion form.
    Connection { op: PathBuf },
    /// The total symbol σ₃, σ₂, σ₁, σ₀.
    Symbols { op: PathBuf },
    /// Values of named invariants.
    Invariants {
        op: PathBuf,
        /// Comma-separated invariant names (default: the standard battery).
        #[arg(long)]
        invariants: Option<String>,
        /// Freeze the fiber variable of a family.
        #[arg(long, allow_hyphen_values = true)]
        y0: Option<String>,
    },
    /// Relations among invariants of related pairs, with the jets eliminated.
    Descend {
        /// A family file; omit with --generic.
        op: Option<PathBuf>,
        /// Use the generic family of this dimension (symbolic coefficient jets).
        #[arg(long, conflicts_with = "op")]
        generic: Option<usize>,
        /// Seed invariant, optionally prefixed by `NABLA:`; repeatable.
        #[arg(long = "seed")]
        seeds: Vec<String>,
        /// Jet variables to eliminate (default: those that occur).
        #[arg(long, value_delimiter = ',')]
        eliminate: Option<Vec<String>>,
    },
    /// Decide equivalence of two families.
    Equiv {
        #[arg(long = "op-a")]
        op_a: PathBuf,
        #[arg(long = "op-b")]
        op_b: PathBuf,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        y0: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        y0b: String,
        /// Battery compared at matched points.
        #[arg(long)]
        invariants: Option<String>,
        /// Chart invariants, one per dimension.
        #[arg(long)]
        chart: Option<String>,
        #[arg(long, default_value_t = 5)]
        grid: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// `lo1,hi1[,lo2,hi2]`; default `[1,2]^dim`.
        #[arg(long = "domain-a", allow_hyphen_values = true)]
        domain_a: Option<String>,
        /// Box searched in B; defaults to the domain of A.
        #[arg(long = "domain-b", allow_hyphen_values = true)]
        domain_b: Option<String>,
        /// Also write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Closed forms of the one-dimensional case against the pipeline.
    Oracle1d {
        op: Option<PathBuf>,
        /// The related-pair invariants of the generic family instead.
        #[arg(long, conflicts_with = "op")]
        pairs: bool,
    },
}

/// Exit code and captured output of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Usage(String),
    Math(String),
    /// A mathematical failure after part of the report was produced.
    Partial(Report, String),
}

impl Failure {
    fn core(context: &str, e: Error) -> Failure {
        let msg = if context.is_empty() { e.to_string() } else { format!("{context}: {e}") };
        if e.is_mathematical() {
            Failure::Math(msg)
        } else {
            Failure::Usage(msg)
        }
    }
}

type Res<T> = std::result::Result<T, Failure>;

trait Context<T> {
    fn ctx(self, c: &str) -> Res<T>;
}

impl<T> Context<T> for tresse_core::Result<T> {
    fn ctx(self, c: &str) -> Res<T> {
        self.map_err(|e| Failure::core(c, e))
    }
}

struct Report {
    json: Map<String, Value>,
    text: String,
}

impl Report {
    fn new(command: &str) -> Self {
        let mut json = Map::new();
        json.insert("schema".into(), json!(SCHEMA));
        json.insert("command".into(), json!(command));
        Report { json, text: String::new() }
    }

    fn set(&mut self, k: &str, v: Value) {
        self.json.insert(k.into(), v);
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text.clone(),
            Format::Json => pretty(&Value::Object(self.json.clone())),
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// Parses `args` (including the program name) and executes the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: 2, stdout: String::new(), stderr: text }
            } else {
                Outcome { code: 0, stdout: text, stderr: String::new() }
            };
        }
    };
    match execute(&cli.command) {
        Ok(r) => Outcome { code: 0, stdout: r.render(cli.format), stderr: String::new() },
        Err(f) => {
            let (code, kind, msg, partial) = match f {
                Failure::Usage(m) => (2, "usage", m, None),
                Failure::Math(m) => (1, "mathematical", m, None),
                Failure::Partial(r, m) => (1, "mathematical", m, Some(r)),
            };
            let error = json!({"kind": kind, "message": msg});
            let stdout = match (cli.format, partial) {
                (Format::Json, Some(mut r)) => {
                    r.set("error", error);
                    r.render(Format::Json)
                }
                (Format::Json, None) => pretty(&json!({"schema": SCHEMA, "error": error})),
                (Format::Text, Some(r)) => r.text,
                (Format::Text, None) => String::new(),
            };
            Outcome { code, stdout, stderr: format!("error: {msg}\n") }
        }
    }
}

fn read_operator(path: &Path) -> Res<Operator> {
    let p = path.display();
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{p}: {e}")))?;
    OperatorFile::from_json(&text).and_then(|f| f.build()).ctx(&p.to_string())
}

fn parse_specs(s: &str) -> Res<Vec<InvariantSpec>> {
    InvariantSpec::parse_list(s).ctx(&format!("invariant list `{s}`"))
}

fn parse_rational(name: &str, s: &str) -> Res<Q> {
    parse_q(s).ctx(&format!("--{name}"))
}

fn default_battery(dim: usize) -> Vec<InvariantSpec> {
    EquivConfig::default_battery(dim)
}

fn execute(cmd: &Command) -> Res<Report> {
    match cmd {
        Command::Classify { op, at } => cmd_classify(op, at.as_deref()),
        Command::Connection { op } => cmd_connection(op),
        Command::Symbols { op } => cmd_symbols(op),
        Command::Invariants { op, invariants, y0 } => cmd_invariants(op, invariants.as_deref(), y0.as_deref()),
        Command::Descend { op, generic, seeds, eliminate } => cmd_descend(op.as_deref(), *generic, seeds, eliminate.as_deref()),
        Command::Equiv { op_a, op_b, y0, y0b, invariants, chart, grid, tol, domain_a, domain_b, report } => {
            let args = EquivArgs {
                op_a,
                op_b,
                y0,
                y0b,
                invariants: invariants.as_deref(),
                chart: chart.as_deref(),
                grid: *grid,
                tol: *tol,
                domain_a: domain_a.as_deref(),
                domain_b: domain_b.as_deref(),
                report: report.as_deref(),
            };
            cmd_equiv(&args)
        }
        Command::Oracle1d { op, pairs } => cmd_oracle(op.as_deref(), *pairs),
    }
}

fn cmd_classify(path: &Path, at: Option<&str>) -> Res<Report> {
    let op = read_operator(path)?;
    let lin = op.linear();
    if lin.dim() != 2 {
        return Err(Failure::Usage(format!("{}: classify needs a two-dimensional operator", path.display())));
    }
    let sigma = symbol3(lin);
    let mut r = Report::new("classify");
    let (class, delta) = match at {
        Some(pt) => {
            let vals = pt.split(',').map(|t| parse_rational("at", t.trim())).collect::<Res<Vec<Q>>>()?;
            if vals.len() != lin.vars().len() {
                return Err(Failure::Usage(format!(
                    "--at needs {} values ({})",
                    lin.vars().len(),
                    lin.vars().names().join(", ")
                )));
            }
            let (c, d) = classify_at(&sigma, &vals).ctx(&format!("at ({pt})"))?;
            r.set("point", json!(vals.iter().map(|v| v.to_string()).collect::<Vec<_>>()));
            (c, d.to_string())
        }
        None => {
            let (c, d) = classify(&sigma).ctx(&path.display().to_string())?;
            (c, d.to_string())
        }
    };
    r.set("class", json!(class.to_string()));
    r.set("discriminant", json!(delta));
    r.line(format!("{class}, Δ = {delta}"));
    Ok(r)
}

fn index_label(k: usize, i: usize, j: usize) -> String {
    format!("{}{}{}", k + 1, i + 1, j + 1)
}

fn cmd_connection(path: &Path) -> Res<Report> {
    let op = read_operator(path)?;
    let lin = op.linear();
    let p = path.display().to_string();
    let conn = wagner_connection(lin.frame(), &symbol3(lin)).ctx(&p)?;
    let curv = curvature(&conn).ctx(&p)?;
    let theta = torsion_form(&conn);
    let mut r = Report::new("connection");
    let mut gamma = Vec::new();
    for ((k, i, j), g) in conn.entries().into_iter().filter(|(_, g)| !g.is_zero()) {
        r.line(format!("Γ^{}_{}{} = {g}", k + 1, i + 1, j + 1));
        gamma.push(json!({"index": index_label(k, i, j), "value": g.to_string()}));
    }
    if gamma.is_empty() {
        r.line("Γ = 0");
    }
    r.set("gamma", Value::Array(gamma));
    let flat = curv.is_zero();
    r.set("curvature_zero", json!(flat));
    if flat {
        r.line("curvature: zero");
    } else {
        let nz: Vec<Value> = curv
            .nonzero()
            .into_iter()
            .map(|((k, m, i, j), v)| {
                r.line(format!("R^{}_{}{}{} = {v}", k + 1, m + 1, i + 1, j + 1));
                json!({"index": format!("{}{}{}{}", k + 1, m + 1, i + 1, j + 1), "value": v.to_string()})
            })
            .collect();
        r.set("curvature", Value::Array(nz));
    }
    let comps: Vec<String> = theta.comps().iter().map(|c| c.to_string()).collect();
    let form: Vec<String> = comps.iter().enumerate().map(|(i, c)| format!("({c})*dx{}", i + 1)).collect();
    r.line(format!("θ = {}", form.join(" + ")));
    r.set("torsion", json!(comps));
    Ok(r)
}

fn tensor_json(t: &SymTensor) -> Value {
    Value::Object(t.comps().iter().map(|(a, c)| (a.to_string(), json!(c.to_string()))).collect())
}

fn cmd_symbols(path: &Path) -> Res<Report> {
    let op = read_operator(path)?;
    let ts = total_symbol(op.linear()).ctx(&path.display().to_string())?;
    let mut r = Report::new("symbols");
    for k in (0..4).rev() {
        r.line(format!("sigma{k} = {}", ts.get(k)));
        r.set(&format!("sigma{k}"), tensor_json(ts.get(k)));
    }
    Ok(r)
}

fn cmd_invariants(path: &Path, list: Option<&str>, y0: Option<&str>) -> Res<Report> {
    let op = read_operator(path)?;
    let p = path.display().to_string();
    let specs = match list {
        Some(s) => parse_specs(s)?,
        None => default_battery(op.dim()),
    };
    let lin = match (y0, &op) {
        (Some(v), Operator::Family(f)) => f.at_y(&parse_rational("y0", v)?).ctx(&p)?,
        (Some(_), Operator::Linear(_)) => return Err(Failure::Usage(format!("{p}: --y0 needs a family"))),
        (None, _) => op.linear().clone(),
    };
    let mut ev = Evaluator::new(&lin);
    let mut r = Report::new("invariants");
    let mut vals = Vec::new();
    let mut failed = Vec::new();
    for s in &specs {
        match ev.values(s) {
            Ok(v) => {
                for (name, x) in s.component_names(lin.dim()).into_iter().zip(v) {
                    r.line(format!("{name} = {x}"));
                    vals.push(json!({"name": name, "value": x.to_string()}));
                }
            }
            // the rest of the battery is still worth reporting
            Err(e) if e.is_mathematical() => {
                r.line(format!("{s}: {e}"));
                vals.push(json!({"name": s.to_string(), "error": e.to_string()}));
                failed.push(format!("{s}: {e}"));
            }
            Err(e) => return Err(Failure::core(&format!("{p}: {s}"), e)),
        }
    }
    r.set("values", Value::Array(vals));
    if !failed.is_empty() {
        return Err(Failure::Partial(r, format!("{p}: {}", failed.join("; "))));
    }
    Ok(r)
}

fn cmd_descend(path: Option<&Path>, generic: Option<usize>, seeds: &[String], eliminate: Option<&[String]>) -> Res<Report> {
    let source = match (path, generic) {
        (_, Some(d)) if d == 1 || d == 2 => PairSource::Generic(d),
        (_, Some(d)) => return Err(Failure::Usage(format!("--generic must be 1 or 2, got {d}"))),
        (Some(p), None) => match read_operator(p)? {
            Operator::Family(f) => PairSource::Concrete(f),
            Operator::Linear(_) => return Err(Failure::Usage(format!("{}: descend needs a family (\"family\": true)", p.display()))),
        },
        (None, None) => return Err(Failure::Usage("descend needs an operator file or --generic".into())),
    };
    let seeds: Vec<Seed> = if seeds.is_empty() {
        vec![Seed::parse("DA0:2").expect("valid"), Seed::parse("DA0:3").expect("valid")]
    } else {
        seeds.iter().map(|s| Seed::parse(s).ctx(&format!("seed `{s}`"))).collect::<Res<_>>()?
    };
    let pairs = pair_invariants(&seeds, &source).ctx("seeds")?;
    let vars = pairs[0].value.vars().clone();
    let work = match eliminate {
        None => None,
        Some(names) => Some(
            names
                .iter()
                .map(|n| vars.require(n.trim()).ctx("--eliminate"))
                .collect::<Res<Vec<usize>>>()?,
        ),
    };
    let d = descend(&pairs, work.as_deref()).ctx("descend")?;
    let mut r = Report::new("descend");
    let names = d.ideal.x_names();
    for (x, s) in names.iter().zip(&seeds) {
        r.line(format!("{x} := {s}"));
    }
    r.set("seeds", json!(names.iter().zip(&seeds).map(|(x, s)| json!({"name": x, "seed": s.to_string()})).collect::<Vec<_>>()));
    r.line(format!("eliminated: {}", d.eliminated.join(", ")));
    r.set("eliminated", json!(d.eliminated));
    r.set("params", json!(d.params.names()));
    let mut rels = Vec::new();
    for rel in &d.relations {
        r.line(format!("{} = 0", rel.poly));
        let coeffs: Vec<Value> = rel
            .coefficients
            .iter()
            .map(|(m, c)| {
                let name = d.monomial_name(m);
                r.line(format!("  [{name}] {c}"));
                json!({"monomial": name, "value": c.to_string()})
            })
            .collect();
        rels.push(json!({"polynomial": rel.poly.to_string(), "coefficients": coeffs}));
    }
    r.set("relations", Value::Array(rels));
    r.set("invariants", json!(d.invariants().iter().map(|c| c.to_string()).collect::<Vec<_>>()));
    Ok(r)
}

struct EquivArgs<'a> {
    op_a: &'a Path,
    op_b: &'a Path,
    y0: &'a str,
    y0b: &'a str,
    invariants: Option<&'a str>,
    chart: Option<&'a str>,
    grid: usize,
    tol: f64,
    domain_a: Option<&'a str>,
    domain_b: Option<&'a str>,
    report: Option<&'a Path>,
}

fn cmd_equiv(a: &EquivArgs) -> Res<Report> {
    let fa = read_operator(a.op_a)?.to_family().ctx(&a.op_a.display().to_string())?;
    let fb = read_operator(a.op_b)?.to_family().ctx(&a.op_b.display().to_string())?;
    let dim = fa.dim();
    let mut cfg = EquivConfig::new(dim);
    if let Some(s) = a.invariants {
        cfg.battery = parse_specs(s)?;
    }
    if let Some(s) = a.chart {
        cfg.chart = parse_specs(s)?;
    }
    if a.grid == 0 {
        return Err(Failure::Usage("--grid must be positive".into()));
    }
    if !(a.tol > 0.0) {
        return Err(Failure::Usage("--tol must be positive".into()));
    }
    cfg.grid = a.grid;
    cfg.tol = a.tol;
    if let Some(s) = a.domain_a {
        cfg.domain_a = Domain::parse(s).ctx("--domain-a")?;
    }
    if let Some(s) = a.domain_b {
        cfg.domain_b = Some(Domain::parse(s).ctx("--domain-b")?);
    }
    let y0 = parse_rational("y0", a.y0)?;
    let y0b = parse_rational("y0b", a.y0b)?;
    let rep = equivalence_test(&fa, &fb, &y0, &y0b, &cfg).ctx("equiv")?;
    let mut r = Report::new("equiv");
    if let Value::Object(m) = rep.to_json() {
        for (k, v) in m {
            r.set(&k, v);
        }
    }
    r.text = rep.to_string();
    if let Some(path) = a.report {
        let body = pretty(&Value::Object(r.json.clone()));
        fs::write(path, body).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    }
    Ok(r)
}

fn oracle_json(rep: &OracleReport) -> Value {
    Value::Array(
        rep.items
            .iter()
            .map(|i| {
                json!({
                    "name": i.name, "printed": i.printed.to_string(), "computed": i.computed.to_string(),
                    "factor": i.factor.to_string(), "agrees": i.agrees,
                })
            })
            .collect(),
    )
}

fn cmd_oracle(path: Option<&Path>, pairs: bool) -> Res<Report> {
    let rep = if pairs {
        oracle_1d_pairs().ctx("related pairs")?
    } else {
        let p = path.ok_or_else(|| Failure::Usage("oracle1d needs an operator file or --pairs".into()))?;
        let op = read_operator(p)?;
        if op.dim() != 1 {
            return Err(Failure::Usage(format!("{}: oracle1d needs a one-dimensional operator", p.display())));
        }
        oracle_1d(op.linear()).ctx(&p.display().to_string())?
    };
    let mut r = Report::new("oracle1d");
    r.set("items", oracle_json(&rep));
    r.set("discrepancies", json!(rep.discrepancies().iter().map(|i| i.name.clone()).collect::<Vec<_>>()));
    r.text = rep.to_string();
    Ok(r)
}
