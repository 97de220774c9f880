//! `charpoly`: invariants, preparation, blowing ups and polygons from the command line.

mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use charpoly::algebra::{parse_input, HypersurfaceState};
use charpoly::blowup::blowup_chart;
use charpoly::driver::{resolve_omega0, resolve_step, run_trace, BranchPolicy, ScriptStep};
use charpoly::invariants::{analyze, graded_name, validate_conditions};
use charpoly::polygon::{project_polygon, staircase_hull, two_prepare, PolygonMode, PrepareStatus};
use charpoly::polyhedron::{fmt_point, fmt_q, polyhedron, Q};
use charpoly::prepare::{minimize, Lift, MinimizeStatus, DEFAULT_BUDGET};
use charpoly::Error;

const EXIT_VALIDATION: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_PARSE: u8 = 4;

#[derive(Parser)]
#[command(name = "charpoly", version, about = "Characteristic polyhedra and resolution invariants of degree-p hypersurfaces")]
struct Cli {
    /// One JSON object per line instead of `key: value` text.
    #[arg(long, global = true)]
    json: bool,
    /// Iteration budget for vertex dissolution and polygon preparation.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    max_iter: usize,
    /// Treat failed conditions and assertions as errors.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Star,
    Doublestar,
    Maxcontact,
}

impl ModeArg {
    fn mode(self) -> PolygonMode {
        match self {
            ModeArg::Star => PolygonMode::Star,
            ModeArg::Doublestar => PolygonMode::DoubleStar,
            ModeArg::Maxcontact => PolygonMode::MaxContact,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Origin,
    Rational,
}

#[derive(Subcommand)]
enum Cmd {
    /// Invariants, vertices and conditions at the origin.
    Analyze { input: PathBuf },
    /// Conditions (G), (E), (E′) and the initial-form condition.
    Validate { input: PathBuf },
    /// Dissolves solvable vertices; with --mode also prepares the polygon.
    Prepare {
        input: PathBuf,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
    /// Blows up a coordinate center and reports one chart point.
    Blowup {
        input: PathBuf,
        /// Comma-separated center coordinates.
        #[arg(long, value_delimiter = ',', required = true)]
        center: Vec<String>,
        /// Coordinate whose ideal becomes the exceptional divisor.
        #[arg(long)]
        chart: String,
        /// `var=value` translation of the chart point, repeatable.
        #[arg(long)]
        translate: Vec<String>,
    },
    /// Projected polygon and its invariants.
    Project {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "star")]
        mode: ModeArg,
    },
    /// The ω = 0 resolution tree with its δ certificate.
    Resolve0 {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "origin")]
        policy: PolicyArg,
    },
    /// Runs a JSON-lines script of blowing ups.
    Trace { input: PathBuf, script: PathBuf },
    /// Writes an SVG of Δ projected to two coordinates, or of a polygon.
    Plot {
        input: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
        /// Two coordinate names for the Δ projection.
        #[arg(long, value_delimiter = ',')]
        coords: Vec<String>,
        /// Plot the prepared polygon of this mode instead of Δ.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
}

/// A failed command with its exit code.
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn new(code: u8, msg: impl Into<String>) -> Self {
        Failure { code, msg: msg.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } => EXIT_PARSE,
            Error::Condition(_) | Error::NotPermissible(_) => EXIT_VALIDATION,
            _ => 1,
        };
        Failure::new(code, e.to_string())
    }
}

/// Output records plus the exit code they imply.
struct Report {
    lines: Vec<Value>,
    code: u8,
}

impl Report {
    fn one(v: Value) -> Self {
        Report { lines: vec![v], code: 0 }
    }
}

fn load(path: &Path) -> Result<HypersurfaceState, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::new(1, format!("{}: {e}", path.display())))?;
    parse_input(&text).map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("records serialize")
}

fn minimal(state: &HypersurfaceState, max_iter: usize) -> Result<(HypersurfaceState, MinimizeStatus), Failure> {
    let m = minimize(state, max_iter)?;
    Ok((m.state, m.status))
}

fn vertex_strings(state: &HypersurfaceState) -> Result<Vec<String>, Failure> {
    match polyhedron(state) {
        Ok(d) => Ok(d.vertices.iter().map(|v| fmt_point(v)).collect()),
        Err(Error::EmptyPolyhedron) => Ok(vec![]),
        Err(e) => Err(e.into()),
    }
}

fn cmd_analyze(cli: &Cli, input: &Path) -> Result<Report, Failure> {
    let (s, status) = minimal(&load(input)?, cli.max_iter)?;
    let cond = validate_conditions(&s)?;
    let a = analyze(&s)?;
    let mut code = if status == MinimizeStatus::BudgetExceeded { EXIT_BUDGET } else { 0 };
    if cli.strict && !cond.all_pass() && code == 0 {
        code = EXIT_VALIDATION;
    }
    Ok(Report {
        lines: vec![json!({
            "h": s.h_string(),
            "status": status.as_str(),
            "invariants": to_value(&a.record(&s)),
            "vertices": vertex_strings(&s)?,
            "conditions": to_value(&cond),
        })],
        code,
    })
}

fn cmd_validate(input: &Path) -> Result<Report, Failure> {
    let s = load(input)?;
    let cond = validate_conditions(&s)?;
    let code = if cond.all_pass() { 0 } else { EXIT_VALIDATION };
    Ok(Report { lines: vec![json!({ "conditions": to_value(&cond), "pass": cond.all_pass() })], code })
}

fn cmd_prepare(cli: &Cli, input: &Path, mode: Option<ModeArg>) -> Result<Report, Failure> {
    let s = load(input)?;
    let m = minimize(&s, cli.max_iter)?;
    let k = &s.field;
    let mut lines = vec![];
    let mut cur = s.clone();
    for (i, w) in m.steps.iter().enumerate() {
        cur = charpoly::prepare::dissolve(&cur, w)?;
        let lift = match &w.lift {
            Lift::Poly(phi) => phi.fmt_with(k, &cur.vars),
            Lift::Int(n) => n.to_string(),
        };
        lines.push(json!({
            "step": i + 1,
            "vertex": w.vertex,
            "lambda": k.fmt_elem(&w.lambda),
            "translation": lift,
            "vertices": vertex_strings(&cur)?,
        }));
    }
    let mut code = if m.status == MinimizeStatus::BudgetExceeded { EXIT_BUDGET } else { 0 };
    let mut summary = json!({ "status": m.status.as_str(), "h": m.state.h_string(), "vertices": vertex_strings(&m.state)? });
    if let (Some(mode), 0) = (mode, code) {
        let tp = two_prepare(&m.state, mode.mode(), cli.max_iter)?;
        for (i, st) in tp.steps.iter().enumerate() {
            lines.push(json!({
                "u3_step": i + 1,
                "vertex": format!("({}, {})", fmt_q(&st.vertex.0), fmt_q(&st.vertex.1)),
                "exponent": st.exponent,
                "c": k.fmt_elem(&st.c),
            }));
        }
        if tp.status == PrepareStatus::BudgetExceeded {
            code = EXIT_BUDGET;
        }
        summary = json!({
            "status": if tp.status == PrepareStatus::Prepared { "prepared" } else { "budget_exceeded" },
            "h": tp.state.h_string(),
            "vertices": vertex_strings(&tp.state)?,
            "polygon": to_value(&tp.polygon.record(k)),
        });
    }
    lines.push(summary);
    Ok(Report { lines, code })
}

fn cmd_blowup(cli: &Cli, input: &Path, center: &[String], chart: &str, translate: &[String]) -> Result<Report, Failure> {
    let (s, _) = minimal(&load(input)?, cli.max_iter)?;
    let mut tr = std::collections::BTreeMap::new();
    for t in translate {
        let (v, c) = t.split_once('=').ok_or_else(|| Failure::new(EXIT_PARSE, format!("expected var=value, got {t}")))?;
        tr.insert(v.trim().to_string(), c.trim().to_string());
    }
    let step = ScriptStep { center: center.to_vec(), chart: chart.to_string(), translate: tr, assertions: vec![] };
    let (js, ch) = resolve_step(&s, &step)?;
    let out = blowup_chart(&s, &js, &ch)?;
    let mut code = 0;
    if cli.strict && (out.monotone() == Some(false) || out.h_check == Some(false) || out.origin_check == Some(false)) {
        code = EXIT_VALIDATION;
    }
    Ok(Report {
        lines: vec![json!({
            "center": to_value(&out.center.record(&s)),
            "h_before": s.h_string(),
            "h_after": out.state.h_string(),
            "exceptional_after": out.state.vars[..out.state.e].to_vec(),
            "extension": out.extension,
            "iota_before": to_value(&out.iota_before),
            "iota_after": out.iota_after.as_ref().map(to_value),
            "in_pc": out.in_pc,
            "origin_check": out.origin_check,
            "h_check": out.h_check,
            "monotone": out.monotone(),
            "after": out.after.as_ref().map(to_value),
            "after_error": out.after_error,
        })],
        code,
    })
}

fn cmd_project(cli: &Cli, input: &Path, mode: ModeArg) -> Result<Report, Failure> {
    let (s, _) = minimal(&load(input)?, cli.max_iter)?;
    let poly = project_polygon(&s, mode.mode())?;
    Ok(Report::one(json!({ "h": s.h_string(), "polygon": to_value(&poly.record(&s.field)) })))
}

fn cmd_resolve0(cli: &Cli, input: &Path, policy: PolicyArg) -> Result<Report, Failure> {
    let s = load(input)?;
    let policy = match policy {
        PolicyArg::Origin => BranchPolicy::AllOriginCharts,
        PolicyArg::Rational => BranchPolicy::RationalPoints,
    };
    let tree = resolve_omega0(&s, policy, cli.max_iter)?;
    let mut lines: Vec<Value> = tree.records().iter().map(to_value).collect();
    let certified = tree.certified();
    lines.push(json!({ "certified": certified, "nodes": tree.nodes.len(), "depth": tree.max_depth() }));
    let budget = tree.leaves().any(|l| l.status == charpoly::driver::NodeStatus::Budget);
    let code = if budget {
        EXIT_BUDGET
    } else if !certified && cli.strict {
        EXIT_VALIDATION
    } else {
        0
    };
    Ok(Report { lines, code })
}

fn cmd_trace(cli: &Cli, input: &Path, script: &Path) -> Result<Report, Failure> {
    let s = load(input)?;
    let text = std::fs::read_to_string(script).map_err(|e| Failure::new(1, format!("{}: {e}", script.display())))?;
    let mut steps = vec![];
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let st: ScriptStep = serde_json::from_str(line)
            .map_err(|e| Failure::new(EXIT_PARSE, format!("{}:{}: {e}", script.display(), i + 1)))?;
        steps.push(st);
    }
    let trace = run_trace(&s, &steps, cli.strict)?;
    let failed = trace.iter().any(|t| t.failed());
    let code = if failed && cli.strict { EXIT_VALIDATION } else { 0 };
    Ok(Report { lines: trace.iter().map(to_value).collect(), code })
}

fn cmd_plot(cli: &Cli, input: &Path, out: &Path, coords: &[String], mode: Option<ModeArg>) -> Result<Report, Failure> {
    let (s, _) = minimal(&load(input)?, cli.max_iter)?;
    let fig = match mode {
        Some(mode) => {
            let tp = two_prepare(&s, mode.mode(), cli.max_iter)?;
            let poly = &tp.polygon;
            let rec = poly.record(&s.field);
            svg::Figure {
                title: format!("{} polygon, class {}", rec.class, s.h_string()),
                axes: rec.axes.clone(),
                vertices: poly.vertex_points(),
                shaded: poly.plus_points(),
                points: poly.vertex_points().into_iter().map(|y| {
                    let l = format!("({}, {})", fmt_q(&y.0), fmt_q(&y.1));
                    (y, l)
                }).collect(),
                marker: Some(((poly.apex[poly.plane[0]].clone(), poly.apex[poly.plane[1]].clone()), format!("apex {}", rec.apex))),
            }
        }
        None => {
            if coords.len() != 2 {
                return Err(Failure::new(EXIT_PARSE, "--coords needs exactly two coordinate names"));
            }
            let idx = |v: &str| s.vars.iter().position(|x| x == v).ok_or_else(|| Failure::new(EXIT_PARSE, format!("unknown variable {v}")));
            let (i, j) = (idx(&coords[0])?, idx(&coords[1])?);
            let d = polyhedron(&s).map_err(|_| Failure::new(1, "nothing to plot"))?;
            let pts: Vec<(Q, Q)> = d.vertices.iter().map(|v| (v[i].clone(), v[j].clone())).collect();
            svg::Figure {
                title: format!("Δ of {}", s.h_string()),
                axes: [graded_name(&s.vars[i]), graded_name(&s.vars[j])],
                vertices: staircase_hull(&pts),
                shaded: vec![],
                points: pts.into_iter().zip(&d.vertices).map(|(y, v)| (y, fmt_point(v))).collect(),
                marker: None,
            }
        }
    };
    let text = svg::render(&fig).map_err(|e| Failure::new(1, e))?;
    std::fs::write(out, text).map_err(|e| Failure::new(1, format!("{}: {e}", out.display())))?;
    Ok(Report::one(json!({ "written": out.display().to_string(), "labeled": fig.points.len() })))
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<String>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        Value::Array(a) if a.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        Value::Array(a) => {
            let parts: Vec<String> = a.iter().map(scalar).collect();
            out.push(format!("{prefix}: [{}]", parts.join(", ")));
        }
        _ => out.push(format!("{prefix}: {}", scalar(v))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

fn print(report: &Report, json: bool) {
    for (i, v) in report.lines.iter().enumerate() {
        if json {
            println!("{v}");
        } else {
            if i > 0 {
                println!();
            }
            let mut out = vec![];
            flatten("", v, &mut out);
            for l in out {
                println!("{l}");
            }
        }
    }
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    match &cli.cmd {
        Cmd::Analyze { input } => cmd_analyze(cli, input),
        Cmd::Validate { input } => cmd_validate(input),
        Cmd::Prepare { input, mode } => cmd_prepare(cli, input, *mode),
        Cmd::Blowup { input, center, chart, translate } => cmd_blowup(cli, input, center, chart, translate),
        Cmd::Project { input, mode } => cmd_project(cli, input, *mode),
        Cmd::Resolve0 { input, policy } => cmd_resolve0(cli, input, *policy),
        Cmd::Trace { input, script } => cmd_trace(cli, input, script),
        Cmd::Plot { input, out, coords, mode } => cmd_plot(cli, input, out, coords, *mode),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(report) => {
            print(&report, cli.json);
            ExitCode::from(report.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
