//! `klsheaf`: command-line front-end. [`dispatch`] runs one invocation against
//! arbitrary output streams and returns the process exit status.

use std::cell::RefCell;
use std::collections::HashMap;
use std::io::Write;
use std::path::PathBuf;
use std::rc::Rc;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use kl_sheaves::bmsheaf::{build_bm, BMSheaf};
use kl_sheaves::conjectures::{
    any_fails, check_dcon, check_klcon, check_pcon, check_pcon_all, check_pdimone_hl,
    genmaps_sample, CenterConvention, Conjecture, ConjectureReport, GenericMapProblem,
    GenmapsParams, Verdict,
};
use kl_sheaves::coxeter::{enumerate_ball, Ball, CoxeterSystem, ElementId, MatrixFile};
use kl_sheaves::hecke::HeckeAlgebra;
use kl_sheaves::io::{kl_table, sheaf_to_json, SheafCache};
use kl_sheaves::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILS: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "klsheaf", version, about = "Braden-MacPherson sheaves and Kazhdan-Lusztig checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the elements of the ball of radius --max-length.
    Enumerate(Common),
    /// The Bruhat graph of [e, x].
    Graph(Common),
    /// Kazhdan-Lusztig basis element C'_x.
    Kl(Common),
    /// Build the sheaf B(x).
    Sheaf(Common),
    /// Graded character of B(x) in the normalized standard basis.
    Character(Common),
    /// Run one checker.
    Check {
        #[arg(value_enum)]
        which: Check,
        #[command(flatten)]
        common: Common,
    },
    /// Run dcon, klcon, pcon, pdimone and hl on every --x.
    Report(Common),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Check {
    Dcon,
    Klcon,
    Pcon,
    Pdimone,
    Hl,
    Genmaps,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Center {
    Literal,
    Shifted,
    Both,
}

impl Center {
    fn conventions(self) -> Vec<CenterConvention> {
        match self {
            Center::Literal => vec![CenterConvention::Literal],
            Center::Shifted => vec![CenterConvention::Shifted],
            Center::Both => CenterConvention::ALL.to_vec(),
        }
    }
}

#[derive(Args, Debug)]
struct Common {
    /// Coxeter matrix file: {"generators": [...], "m": [[...]]}, 0 = infinity.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Apex word, generators separated by spaces; repeatable.
    #[arg(long = "x")]
    x: Vec<String>,
    /// Restrict a check to one lower vertex.
    #[arg(long)]
    y: Option<String>,
    /// Ball radius; defaults to the longest --x word.
    #[arg(long)]
    max_length: Option<usize>,
    #[arg(long, default_value_t = kl_sheaves::bmsheaf::DEFAULT_CAP_MARGIN)]
    cap_margin: u32,
    /// Centre for the torsion-shape and Lefschetz checks.
    #[arg(long, value_enum, default_value_t = Center::Shifted)]
    center: Center,
    #[arg(long, default_value_t = 0)]
    line_seed: u64,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Truncation parameter for pcon; all m when omitted.
    #[arg(long)]
    m: Option<u32>,
    /// Degree cap for pcon; defaults to 2 l(x) + 4.
    #[arg(long)]
    cap: Option<i32>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// genmaps: base shift l.
    #[arg(long, default_value_t = 1)]
    l: i32,
    /// genmaps: comma-separated shifts k_i.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    ks: Vec<u32>,
    /// genmaps: number of polynomial variables.
    #[arg(long, default_value_t = 1)]
    vars: usize,
    /// genmaps: coefficients are drawn from [-range, range].
    #[arg(long, default_value_t = 10)]
    coeff_range: i64,
    /// genmaps: smallest satisfied fraction counted as holding.
    #[arg(long, default_value_t = 0.9)]
    min_fraction: f64,
}

struct Session {
    ball: Arc<Ball>,
    algebra: HeckeAlgebra,
    apexes: Vec<ElementId>,
    cache: Option<SheafCache>,
    built: RefCell<HashMap<(ElementId, u32), Rc<BMSheaf>>>,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}

impl Session {
    fn open(c: &Common, warn: &mut dyn Write) -> Result<Session> {
        let path = c.matrix.as_ref().ok_or_else(|| usage("--matrix is required"))?;
        let file: MatrixFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        let sys = CoxeterSystem::from_file(&file)?;
        let words = c
            .x
            .iter()
            .map(|w| sys.parse_word(w))
            .collect::<Result<Vec<_>>>()?;
        let radius = c
            .max_length
            .unwrap_or_else(|| words.iter().map(Vec::len).max().unwrap_or(0));
        let ball = Arc::new(enumerate_ball(&sys, radius));
        let mut apexes = Vec::new();
        for (text, w) in c.x.iter().zip(&words) {
            let x = ball.from_word(w)?;
            if ball.length(x) != w.len() {
                let _ = writeln!(warn, "warning: {text:?} is not reduced; using {:?}", ball.format(x));
            }
            apexes.push(x);
        }
        let cache = c.cache_dir.as_ref().map(SheafCache::new).transpose()?;
        Ok(Session {
            algebra: HeckeAlgebra::new(ball.clone()),
            ball,
            apexes,
            cache,
            built: RefCell::default(),
        })
    }

    fn require_x(&self) -> Result<&[ElementId]> {
        if self.apexes.is_empty() {
            return Err(usage("at least one --x is required"));
        }
        Ok(&self.apexes)
    }

    fn sheaf(&self, x: ElementId, margin: u32) -> Result<Rc<BMSheaf>> {
        if let Some(s) = self.built.borrow().get(&(x, margin)) {
            return Ok(s.clone());
        }
        let sheaf = Rc::new(match &self.cache {
            Some(c) => c.load_or_build(&self.ball, x, margin)?.0,
            None => build_bm(&self.ball, x, margin)?,
        });
        self.built.borrow_mut().insert((x, margin), sheaf.clone());
        Ok(sheaf)
    }

    /// Graph positions of `--y` (or every vertex below the apex).
    fn lower_vertices(&self, sheaf: &BMSheaf, y: Option<&str>) -> Result<Vec<usize>> {
        let g = sheaf.graph();
        match y {
            Some(w) => {
                let id = self.ball.parse(w)?;
                let p = g
                    .position(id)
                    .ok_or_else(|| usage(format!("{w:?} is not below {}", self.ball.format(sheaf.x()))))?;
                Ok(vec![p])
            }
            None => Ok((0..g.len().saturating_sub(1)).collect()),
        }
    }
}

/// Output of one invocation, before formatting.
enum Output {
    Json(Value),
    Text(String),
    Reports(Vec<ConjectureReport>),
}

fn report_line(r: &ConjectureReport) -> String {
    let mut s = format!("{} x={}", r.conjecture.name(), r.x.as_deref().unwrap_or("-"));
    if let Some(y) = &r.y {
        s.push_str(&format!(" y={y}"));
    }
    for (k, v) in &r.params {
        if k != "line" {
            s.push_str(&format!(" {k}={v}"));
        }
    }
    s.push_str(&format!(": {}", r.verdict.as_str()));
    if let Some(w) = &r.witness {
        s.push_str(&format!(" witness={w}"));
    }
    s
}

fn run_checks(which: Check, c: &Common, s: &Session) -> Result<Vec<ConjectureReport>> {
    let mut out = Vec::new();
    for &x in s.require_x()? {
        let sheaf = s.sheaf(x, c.cap_margin)?;
        let cap = c.cap.unwrap_or(2 * s.ball.length(x) as i32 + 4);
        match which {
            Check::Dcon => {
                let ys = s.lower_vertices(&sheaf, c.y.as_deref())?;
                out.extend(check_dcon(&sheaf)?.into_iter().enumerate().filter(|(i, _)| ys.contains(i)).map(|(_, r)| r));
            }
            Check::Klcon => out.push(check_klcon(&sheaf, &s.algebra)?),
            Check::Pcon => {
                for y in s.lower_vertices(&sheaf, c.y.as_deref())? {
                    match c.m {
                        Some(m) => out.push(check_pcon(&sheaf, y, m, cap)?),
                        None => out.extend(check_pcon_all(&sheaf, y, cap)?),
                    }
                }
            }
            Check::Pdimone | Check::Hl => {
                let want = if matches!(which, Check::Hl) { Conjecture::Hl } else { Conjecture::Pdimone };
                for y in s.lower_vertices(&sheaf, c.y.as_deref())? {
                    let survey = check_pdimone_hl(&sheaf, y, c.line_seed, &c.center.conventions())?;
                    out.extend(survey.reports.into_iter().filter(|r| r.conjecture == want));
                }
            }
            Check::Genmaps => unreachable!("handled without a sheaf"),
        }
    }
    Ok(out)
}

fn genmaps(c: &Common) -> Result<ConjectureReport> {
    if !(0.0..=1.0).contains(&c.min_fraction) {
        return Err(usage("--min-fraction must lie in [0, 1]"));
    }
    let params = GenmapsParams {
        problem: GenericMapProblem { l: c.l, ks: c.ks.clone(), r: c.vars },
        trials: c.trials,
        seed: c.line_seed,
        coeff_range: c.coeff_range,
    };
    let rep = genmaps_sample(&params)?;
    let holds = rep.fraction >= c.min_fraction;
    let witness = (!holds).then(|| {
        json!({
            "fraction": rep.fraction,
            "not_injective": rep.not_injective,
            "truncation_failures": rep.truncation_failures,
            "first_failed_trials": rep.failed_trials.iter().take(10).collect::<Vec<_>>(),
        })
    });
    let mut r = ConjectureReport {
        conjecture: Conjecture::Genmaps,
        x: None,
        y: None,
        params: Default::default(),
        verdict: Verdict::from_bool(holds),
        witness,
    };
    for (k, v) in [
        ("l", json!(c.l)),
        ("ks", json!(c.ks)),
        ("vars", json!(c.vars)),
        ("trials", json!(c.trials)),
        ("seed", json!(c.line_seed)),
        ("coeff_range", json!(c.coeff_range)),
        ("min_fraction", json!(c.min_fraction)),
        ("satisfied", json!(rep.satisfied)),
        ("fraction", json!(rep.fraction)),
    ] {
        r.params.insert(k.to_string(), v);
    }
    Ok(r)
}

fn run(cli: Cli, warn: &mut dyn Write) -> Result<(Output, Format)> {
    let (common, out) = match &cli.command {
        Command::Check { which: Check::Genmaps, common } => (common, Output::Reports(vec![genmaps(common)?])),
        Command::Enumerate(c) => {
            let s = Session::open(c, warn)?;
            let rows: Vec<Value> = s
                .ball
                .ids()
                .map(|w| json!({"id": w.index(), "length": s.ball.length(w), "word": s.ball.format(w)}))
                .collect();
            (c, Output::Json(json!({"max_length": s.ball.max_length(), "complete": s.ball.is_complete(), "elements": rows})))
        }
        Command::Graph(c) => {
            let s = Session::open(c, warn)?;
            let mut graphs = Vec::new();
            let mut dot = String::new();
            for &x in s.require_x()? {
                let g = kl_sheaves::coxeter::interval_graph(&s.ball, x)?;
                dot.push_str(&g.to_dot(&s.ball));
                graphs.push(json!({
                    "x": s.ball.format(x),
                    "vertices": g.vertices.iter().map(|&v| s.ball.format(v)).collect::<Vec<_>>(),
                    "edges": g.edges.iter().map(|e| json!({
                        "lower": s.ball.format(g.vertices[e.lower]),
                        "upper": s.ball.format(g.vertices[e.upper]),
                        "label": e.label.to_string(),
                    })).collect::<Vec<_>>(),
                }));
            }
            if c.format == Format::Dot {
                return Ok((Output::Text(dot), Format::Dot));
            }
            (c, Output::Json(single_or_list(graphs)))
        }
        Command::Kl(c) => {
            let s = Session::open(c, warn)?;
            let tables = s
                .require_x()?
                .iter()
                .map(|&x| Ok(serde_json::to_value(kl_table(&s.algebra, x)?)?))
                .collect::<Result<Vec<_>>>()?;
            (c, Output::Json(single_or_list(tables)))
        }
        Command::Sheaf(c) => {
            let s = Session::open(c, warn)?;
            let sheaves = s
                .require_x()?
                .iter()
                .map(|&x| Ok(serde_json::to_value(sheaf_to_json(&*s.sheaf(x, c.cap_margin)?)?)?))
                .collect::<Result<Vec<_>>>()?;
            (c, Output::Json(single_or_list(sheaves)))
        }
        Command::Character(c) => {
            let s = Session::open(c, warn)?;
            let mut items = Vec::new();
            for &x in s.require_x()? {
                let h = s.sheaf(x, c.cap_margin)?.graded_character();
                let mut ys: Vec<ElementId> = h.support().collect();
                ys.sort_by_key(|&y| (s.ball.length(y), y));
                items.push(json!({
                    "x": s.ball.format(x),
                    "character": s.algebra.format(&h),
                    "terms": ys.iter().map(|&y| json!({"y": s.ball.format(y), "coefficient": h.coefficient(y).to_string()})).collect::<Vec<_>>(),
                }));
            }
            (c, Output::Json(single_or_list(items)))
        }
        Command::Check { which, common } => {
            let s = Session::open(common, warn)?;
            (common, Output::Reports(run_checks(*which, common, &s)?))
        }
        Command::Report(c) => {
            let s = Session::open(c, warn)?;
            let mut all = Vec::new();
            for which in [Check::Dcon, Check::Klcon, Check::Pcon] {
                all.extend(run_checks(which, c, &s)?);
            }
            for &x in s.require_x()? {
                let sheaf = s.sheaf(x, c.cap_margin)?;
                for y in s.lower_vertices(&sheaf, c.y.as_deref())? {
                    all.extend(check_pdimone_hl(&sheaf, y, c.line_seed, &c.center.conventions())?.reports);
                }
            }
            (c, Output::Reports(all))
        }
    };
    Ok((out, common.format))
}

fn single_or_list(mut v: Vec<Value>) -> Value {
    if v.len() == 1 {
        v.pop().unwrap()
    } else {
        Value::Array(v)
    }
}

fn render(out: &Output, format: Format) -> Result<(String, bool)> {
    Ok(match out {
        Output::Text(t) => (t.clone(), false),
        Output::Json(v) => {
            let text = if format == Format::Text { text_of(v) } else { serde_json::to_string_pretty(v)? + "\n" };
            (text, false)
        }
        Output::Reports(rs) => {
            let text = match format {
                Format::Text => rs.iter().map(|r| report_line(r) + "\n").collect(),
                _ => serde_json::to_string_pretty(rs)? + "\n",
            };
            (text, any_fails(rs))
        }
    })
}

fn text_of(v: &Value) -> String {
    match v {
        Value::Array(items) => items.iter().map(text_of).collect(),
        Value::Object(map) if map.contains_key("character") => {
            format!("{}: {}\n", map["x"].as_str().unwrap_or(""), map["character"].as_str().unwrap_or(""))
        }
        Value::Object(map) if map.contains_key("rows") => {
            let mut s = format!("C'[{}]\n", map["x"].as_str().unwrap_or(""));
            for r in map["rows"].as_array().into_iter().flatten() {
                s.push_str(&format!("  {:<24} h = {:<20} P = {}\n", r["y"].as_str().unwrap_or(""), r["h"].as_str().unwrap_or(""), r["p"]));
            }
            s
        }
        Value::Object(map) if map.contains_key("elements") => map["elements"]
            .as_array()
            .into_iter()
            .flatten()
            .map(|e| format!("{}\t{}\n", e["length"], e["word"].as_str().unwrap_or("")))
            .collect(),
        other => serde_json::to_string_pretty(other).unwrap_or_default() + "\n",
    }
}

/// Runs one command line (including the program name). Returns 0 on success,
/// 2 if any verdict fails and 1 on usage or validation errors.
pub fn dispatch<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let result = run(cli, err).and_then(|(o, f)| render(&o, f));
    match result {
        Ok((text, fails)) => {
            if out.write_all(text.as_bytes()).is_err() {
                return EXIT_USAGE;
            }
            if fails {
                EXIT_FAILS
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}
