use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use motive_series::blowup::{auto_resolve, BlowupScript, DivisorialOracle, Modification};
use motive_series::curve::{valuation, Curve, HilbertOracle, DEFAULT_MAX_JET};
use motive_series::filtration::{series, HilbertFunction, SeriesKind};
use motive_series::formulas::{theorem1_series, theorem2_series, theorem3_series};
use motive_series::graph::{build_intersection, determinant, DualGraph};
use motive_series::rational::QPoly;
use motive_series::verify::{run_all, RemarkReading};
use motive_series::{Error, ExpVec, MSeries};

#[derive(Parser)]
#[command(name = "motive", version, about = "Poincare series of curve and divisorial filtrations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Embedded resolution of a plane curve.
    Resolve {
        #[arg(long)]
        curve: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Dual graph with its intersection matrices.
    Graph {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        out: Output,
    },
    /// A windowed Poincare-type series.
    Poincare {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "Pg")]
        kind: String,
        #[arg(long, value_enum)]
        filtration: Option<Filtration>,
        /// Upper corner of the window, e.g. "6,6".
        #[arg(long)]
        bound: String,
        #[arg(long, default_value_t = DEFAULT_MAX_JET)]
        max_jet: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Value of the Hilbert function.
    Hilbert {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        at: String,
        #[arg(long, default_value_t = DEFAULT_MAX_JET)]
        max_jet: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Valuations of a polynomial: branch orders for a curve, divisorial
    /// multiplicities for a script.
    Multiplicity {
        #[command(flatten)]
        input: Input,
        /// Polynomial such as "y^2 - x^3" or "x1 - x3".
        #[arg(long)]
        poly: String,
        /// Report only this 1-based component or branch.
        #[arg(long)]
        at: Option<usize>,
        #[command(flatten)]
        out: Output,
    },
    /// Cross-checks on the built-in fixtures.
    Verify {
        /// Only report checks whose name contains this string.
        #[arg(long)]
        only: Option<String>,
        /// Reading of the Hilbert series identity to test.
        #[arg(long, value_enum, default_value_t = Reading::Whole)]
        remark_reading: Reading,
        #[arg(long, default_value_t = DEFAULT_MAX_JET)]
        max_jet: u64,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Input {
    #[arg(long)]
    curve: Option<PathBuf>,
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long)]
    script: Option<PathBuf>,
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Pretty,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Reading {
    Whole,
    Literal,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Filtration {
    Curve,
    Divisorial,
}

enum Source {
    Curve(Curve),
    Graph(DualGraph),
    Script(Modification),
}

enum Failure {
    Lib(Error),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Run = Result<String, Failure>;

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn load(input: &Input) -> Result<Source, Error> {
    if let Some(p) = &input.curve {
        return Curve::from_json(&read(p)?).map(Source::Curve);
    }
    if let Some(p) = &input.graph {
        return DualGraph::from_json(&read(p)?).map(Source::Graph);
    }
    let p = input.script.as_ref().expect("clap enforces one input");
    Modification::from_script(&BlowupScript::from_json(&read(p)?)?).map(Source::Script)
}

fn render(doc: Value, pretty: String, format: Format) -> String {
    match format {
        Format::Json => doc.to_string(),
        Format::Pretty => pretty,
    }
}

fn matrix(rows: &[Vec<i64>]) -> String {
    rows.iter()
        .map(|r| r.iter().map(|x| format!("{x:>4}")).collect::<String>())
        .collect::<Vec<_>>()
        .join("\n")
}

fn series_output(s: &MSeries, kind: SeriesKind, format: Format) -> String {
    match format {
        Format::Json => s.to_json(),
        Format::Pretty => s.display(kind.in_q()),
    }
}

fn bound(s: &str) -> Result<ExpVec, Error> {
    let b = ExpVec::parse_list(s)?;
    if !b.is_nonneg() {
        return Err(Error::InvalidInput(format!("bound {b} has a negative entry")));
    }
    Ok(b)
}

fn resolve(path: &Path, format: Format) -> Run {
    let c = Curve::from_json(&read(path)?)?;
    let r = auto_resolve(&c)?;
    let attach: Vec<usize> = r.attach.iter().map(|i| i + 1).collect();
    let doc = json!({
        "graph": r.graph.to_doc(),
        "script": r.modification.script().to_doc(),
        "attach": attach,
    });
    let pretty = format!(
        "self-intersections: {:?}\nedges: {:?}\narrows on: {:?}\nscript: {}",
        r.graph.self_ints(),
        r.graph.edges().iter().map(|(i, j)| (i + 1, j + 1)).collect::<Vec<_>>(),
        attach,
        r.modification.script().to_json()
    );
    Ok(render(doc, pretty, format))
}

fn graph(input: &Input, format: Format) -> Run {
    let g = match load(input)? {
        Source::Graph(g) => g,
        Source::Script(m) => m.graph()?,
        Source::Curve(c) => auto_resolve(&c)?.graph,
    };
    let d = build_intersection(&g)?;
    let doc = json!({
        "graph": g.to_doc(),
        "a": d.a(),
        "m": d.m(),
        "det": determinant(&d),
    });
    let pretty = format!("A =\n{}\nM =\n{}\ndet A = {}", matrix(d.a()), matrix(d.m()), determinant(&d));
    Ok(render(doc, pretty, format))
}

fn oracle_series(o: &dyn HilbertFunction, kind: SeriesKind, hi: &ExpVec) -> Result<MSeries, Error> {
    series(o, kind, hi)
}

fn poincare(input: &Input, kind: &str, filtration: Option<Filtration>, hi: &str, max_jet: u64, format: Format) -> Run {
    let kind: SeriesKind = kind.parse()?;
    let hi = bound(hi)?;
    let src = load(input)?;
    let filtration = filtration.unwrap_or(match src {
        Source::Curve(_) => Filtration::Curve,
        Source::Graph(ref g) if g.num_arrows() > 0 => Filtration::Curve,
        _ => Filtration::Divisorial,
    });
    let unsupported = |what: &str| {
        Error::InvalidInput(format!("series {kind} is not available for {what}; use a curve or a script"))
    };
    let s = match (src, filtration) {
        (Source::Curve(c), Filtration::Curve) => oracle_series(&HilbertOracle::with_max_jet(c, max_jet), kind, &hi)?,
        (Source::Curve(c), Filtration::Divisorial) => {
            let m = auto_resolve(&c)?.modification;
            oracle_series(&DivisorialOracle::with_max_jet(m, max_jet)?, kind, &hi)?
        }
        (Source::Script(m), Filtration::Divisorial) => {
            oracle_series(&DivisorialOracle::with_max_jet(m, max_jet)?, kind, &hi)?
        }
        (Source::Script(_), Filtration::Curve) => {
            return Err(Error::InvalidInput("a script carries no curve; pass --curve".into()).into())
        }
        (Source::Graph(g), Filtration::Curve) => match kind {
            SeriesKind::Pg => theorem1_series(&g, &hi)?,
            SeriesKind::P => theorem1_series(&g, &hi)?.eval_one(),
            _ => return Err(unsupported("a resolution graph").into()),
        },
        (Source::Graph(g), Filtration::Divisorial) => match kind {
            SeriesKind::Pg => theorem2_series(&g, &hi)?,
            SeriesKind::P => theorem2_series(&g, &hi)?.eval_one(),
            SeriesKind::Phat => theorem3_series(&g, &hi)?,
            _ => return Err(unsupported("a graph").into()),
        },
    };
    Ok(series_output(&s, kind, format))
}

fn hilbert(input: &Input, at: &str, max_jet: u64, format: Format) -> Run {
    let v = ExpVec::parse_list(at)?;
    let h = match load(input)? {
        Source::Curve(c) => HilbertOracle::with_max_jet(c, max_jet).h(&v)?,
        Source::Script(m) => DivisorialOracle::with_max_jet(m, max_jet)?.h(&v)?,
        Source::Graph(_) => {
            return Err(Error::InvalidInput("the Hilbert function needs a curve or a script".into()).into())
        }
    };
    Ok(render(json!({ "at": v.0, "h": h }), h.to_string(), format))
}

fn pick<T: Clone>(values: Vec<T>, at: Option<usize>) -> Result<Vec<T>, Error> {
    match at {
        None => Ok(values),
        Some(k) => values
            .get(k.wrapping_sub(1))
            .cloned()
            .map(|v| vec![v])
            .ok_or_else(|| Error::InvalidInput(format!("index {k} out of range 1..={}", values.len()))),
    }
}

fn multiplicity(input: &Input, poly: &str, at: Option<usize>, format: Format) -> Run {
    match load(input)? {
        Source::Script(m) => {
            let g = QPoly::parse(poly, 2)?;
            let w = pick(m.multiplicities(&g)?.0, at)?;
            let pretty = w.iter().map(i64::to_string).collect::<Vec<_>>().join(",");
            Ok(render(json!({ "w": w }), pretty, format))
        }
        Source::Curve(c) => {
            let g = QPoly::parse(poly, c.ambient_dim())?;
            let (v, _) = valuation(&c, &g)?;
            let v = pick(v, at)?;
            let doc: Vec<Value> = v.iter().map(|x| x.map_or(json!("inf"), |n| json!(n))).collect();
            let pretty = v
                .iter()
                .map(|x| x.map_or("inf".to_string(), |n| n.to_string()))
                .collect::<Vec<_>>()
                .join(",");
            Ok(render(json!({ "v": doc }), pretty, format))
        }
        Source::Graph(_) => Err(Error::InvalidInput("multiplicities need a curve or a script".into()).into()),
    }
}

fn verify(only: Option<&str>, reading: Reading, max_jet: u64, format: Format) -> Run {
    let reading = match reading {
        Reading::Whole => RemarkReading::Whole,
        Reading::Literal => RemarkReading::Literal,
    };
    let checks: Vec<_> = run_all(max_jet, reading)?
        .into_iter()
        .filter(|c| only.is_none_or(|o| c.name.contains(o)))
        .collect();
    let doc: Vec<Value> = checks
        .iter()
        .map(|c| json!({ "check": c.name, "fixture": c.fixture, "pass": c.passed(), "detail": c.failure }))
        .collect();
    let pretty = checks.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("\n");
    let text = render(Value::Array(doc), pretty, format);
    if checks.iter().all(|c| c.passed()) {
        Ok(text)
    } else {
        Err(Failure::Verification(text))
    }
}

fn run(cli: Cli) -> Run {
    match cli.command {
        Command::Resolve { curve, out } => resolve(&curve, out.format),
        Command::Graph { input, out } => graph(&input, out.format),
        Command::Poincare { input, kind, filtration, bound, max_jet, out } => {
            poincare(&input, &kind, filtration, &bound, max_jet, out.format)
        }
        Command::Hilbert { input, at, max_jet, out } => hilbert(&input, &at, max_jet, out.format),
        Command::Multiplicity { input, poly, at, out } => multiplicity(&input, &poly, at, out.format),
        Command::Verify { only, remark_reading, max_jet, out } => {
            verify(only.as_deref(), remark_reading, max_jet, out.format)
        }
    }
}

fn threads() -> Result<(), Error> {
    let Ok(n) = std::env::var("MOTIVE_SERIES_THREADS") else {
        return Ok(());
    };
    let n: usize = n
        .parse()
        .map_err(|_| Error::InvalidInput(format!("MOTIVE_SERIES_THREADS must be a number, got {n:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::InternalInconsistency(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match threads().map_err(Failure::from).and_then(|_| run(cli)) {
        Ok(text) => {
            println!("{text}");
            ExitCode::SUCCESS
        }
        Err(Failure::Verification(text)) => {
            println!("{text}");
            ExitCode::from(4)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::PrecisionExhausted(_) => 3,
                e if e.is_validation() => 2,
                _ => 1,
            })
        }
    }
}
