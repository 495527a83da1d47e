use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use dehn_core::bending::{self, AmalgamSpec, HnnSpec};
use dehn_core::census::{self, ScenarioSpec, TriangleTriple};
use dehn_core::fillings::{self, CensusFile};
use dehn_core::graphs::{self, Case, Constraint, CountingCase, GraphParams};
use dehn_core::prodcurves::{self, CurveId};
use dehn_core::psl2::GroupWord;
use dehn_core::slope::{self, BasisChange, Slope};
use dehn_core::{Error, Result};

#[derive(Parser)]
#[command(name = "dehn", version, about = "Dehn filling distance-bound toolkit")]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Slope arithmetic.
    #[command(subcommand)]
    Slope(SlopeCmd),
    /// Character curves of Z/p * Z/q.
    #[command(subcommand)]
    Curves(CurvesCmd),
    /// Bending families and their ideal points.
    #[command(subcommand)]
    Bend(BendCmd),
    /// Character and dihedral-quotient censuses, distance bounds.
    #[command(subcommand)]
    Census(CensusCmd),
    /// Intersection-graph enumeration and certificates.
    #[command(subcommand)]
    Graphs(GraphsCmd),
    /// Filling-census distance analysis.
    #[command(subcommand)]
    Fillings(FillingsCmd),
}

#[derive(Subcommand)]
enum SlopeCmd {
    /// Distance |ps - qr| between two slopes (`p/q`, `p`, or `inf`).
    Distance {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Slope at distance one from the given slope.
    Dual {
        #[arg(allow_hyphen_values = true)]
        a: String,
    },
    /// Image under an integral basis change `[[a b] [c d]]`.
    Transform {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(long, num_args = 4, allow_hyphen_values = true, value_names = ["A", "B", "C", "D"])]
        matrix: Vec<i64>,
    },
}

#[derive(Subcommand)]
enum CurvesCmd {
    /// The curves `(j, k)` for given `p, q`.
    List {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        q: u32,
    },
    /// Points of curve `(p,q,j,k)` where `ab` has trace `2cos(pi l/d)`.
    Solve {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        q: u32,
        #[arg(long)]
        j: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        l: u32,
    },
}

#[derive(Args)]
struct WordArg {
    /// Probe word, e.g. `a b^-1 t`; defaults to the standard probe list.
    #[arg(long, allow_hyphen_values = true)]
    word: Option<String>,
}

#[derive(Subcommand)]
enum BendCmd {
    Amalgam {
        #[arg(long, num_args = 2, value_names = ["P", "Q"])]
        plus: Vec<u32>,
        #[arg(long, num_args = 2, value_names = ["P", "Q"])]
        minus: Vec<u32>,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        s: u32,
        #[command(flatten)]
        word: WordArg,
    },
    Hnn {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        s: u32,
        #[command(flatten)]
        word: WordArg,
    },
}

#[derive(Subcommand)]
enum CensusCmd {
    /// Irreducible characters of the triangle group.
    Triangle { a: u32, b: u32, c: u32 },
    /// Dihedral quotient orders up to `--nmax`, with semifibre distance rows.
    Dihedral {
        a: u32,
        b: u32,
        c: u32,
        #[arg(long)]
        nmax: Option<u32>,
    },
    /// Distance bound for a scenario file `{"triple": [a,b,c], "curves": [{"s_lower": s, "allowed": [...]}]}`.
    Bound {
        #[arg(long)]
        spec: PathBuf,
    },
}

#[derive(Subcommand)]
enum GraphsCmd {
    /// Exhaustive certificate for one lemma grid.
    Verify {
        #[arg(long)]
        lemma: String,
        #[arg(long, num_args = 1.., value_parser = parse_constraint)]
        disable: Vec<Constraint>,
    },
    /// Admissible graphs for one parameter point.
    Enumerate {
        #[arg(long = "case", value_parser = parse_case)]
        case: Case,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: usize,
        #[arg(long, num_args = 1.., value_parser = parse_constraint)]
        disable: Vec<Constraint>,
        /// Emit witnesses in dot format instead.
        #[arg(long)]
        dot: bool,
    },
    /// Edge-weight counting inequality over all `(k, k0)`.
    Counting {
        #[arg(long = "case", value_parser = parse_counting_case)]
        case: CountingCase,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: usize,
    },
    /// Zero-curvature vertex profiles with face sizes up to `--max-face`.
    Curvature {
        #[arg(long, default_value_t = 60)]
        max_face: usize,
    },
}

#[derive(Subcommand)]
enum FillingsCmd {
    /// Maximal compatible groups and their slot-0 distances.
    Analyze {
        /// Census file; the bundled fixture when omitted.
        file: Option<PathBuf>,
    },
    /// Groups at distance >= `--min`; exits with status 2 when any exist.
    Threshold {
        file: Option<PathBuf>,
        #[arg(long)]
        min: u64,
    },
    /// Exceptional slope table for a named manifold.
    Table { id: Option<String> },
}

fn parse_constraint(s: &str) -> std::result::Result<Constraint, String> {
    Constraint::parse(s).map_err(|e| e.to_string())
}

fn parse_case(s: &str) -> std::result::Result<Case, String> {
    Case::parse(s).map_err(|e| e.to_string())
}

fn parse_counting_case(s: &str) -> std::result::Result<CountingCase, String> {
    CountingCase::parse(s).map_err(|e| e.to_string())
}

fn parse_slope(s: &str) -> Result<Slope> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("inf") || t == "∞" {
        return Ok(Slope::meridian());
    }
    let bad = || Error::Parse(format!("slope `{s}`"));
    let (p, q) = match t.split_once('/') {
        Some((p, q)) => (p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?),
        None => (t.parse().map_err(|_| bad())?, 1),
    };
    Slope::new(p, q)
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn census_file(path: &Option<PathBuf>) -> Result<CensusFile> {
    match path {
        Some(p) => CensusFile::from_json(&read(p)?),
        None => Ok(fillings::bundled_fixture()),
    }
}

fn triple(a: u32, b: u32, c: u32) -> Result<TriangleTriple> {
    TriangleTriple::new(a, b, c)
}

fn probe_words(f: &bending::BentFamily, word: &WordArg) -> Result<Vec<GroupWord>> {
    match &word.word {
        Some(w) => Ok(vec![GroupWord::parse(w)?]),
        None => Ok(bending::probe_words(f)),
    }
}

fn bend_report(f: &bending::BentFamily, word: &WordArg) -> Result<Value> {
    let words = probe_words(f, word)?;
    let mut traces = Vec::new();
    for w in &words {
        let tr = bending::laurent_trace(f, w)?;
        let bound = bending::s_lower_bound(f, w).ok();
        traces.push(json!({ "word": w.to_string(), "laurent": tr, "s_lower_bound": bound }));
    }
    Ok(json!({
        "family": f.kind,
        "base": f.base,
        "axis": f.axis,
        "ideal_points": bending::ideal_points(f)?,
        "strict": bending::strict_nontriviality(f)?,
        "traces": traces,
    }))
}

/// What a subcommand produced: a JSON payload, its plain-text rendering, and the exit status.
struct Output {
    value: Value,
    text: String,
    code: u8,
}

fn out<T: Serialize>(v: &T, text: String) -> Result<Output> {
    Ok(Output { value: serde_json::to_value(v).map_err(|e| Error::Invalid(e.to_string()))?, text, code: 0 })
}

fn run(cmd: Cmd) -> Result<Output> {
    match cmd {
        Cmd::Slope(c) => match c {
            SlopeCmd::Distance { a, b } => {
                let (a, b) = (parse_slope(&a)?, parse_slope(&b)?);
                let d = slope::distance(a, b)?;
                out(&json!({ "a": a, "b": b, "distance": d }), format!("Δ({a}, {b}) = {d}"))
            }
            SlopeCmd::Dual { a } => {
                let a = parse_slope(&a)?;
                let d = slope::dual_slope(a)?;
                out(&json!({ "slope": a, "dual": d }), format!("{d}"))
            }
            SlopeCmd::Transform { a, matrix } => {
                let a = parse_slope(&a)?;
                let m = BasisChange::new([[matrix[0], matrix[1]], [matrix[2], matrix[3]]])?;
                let t = slope::transform(a, &m)?;
                out(&json!({ "slope": a, "matrix": m, "image": t }), format!("{t}"))
            }
        },
        Cmd::Curves(c) => match c {
            CurvesCmd::List { p, q } => {
                let ids = CurveId::all(p, q);
                let text = ids.iter().map(|c| format!("(j,k) = ({},{})", c.j, c.k)).collect::<Vec<_>>().join("\n");
                out(&ids, text)
            }
            CurvesCmd::Solve { p, q, j, k, d, l } => {
                let id = CurveId::new(p, q, j, k)?;
                let roots = prodcurves::solve_boundary_order(&id, d, l)?;
                let text = roots
                    .iter()
                    .map(|r| format!("z = {:.9}{:+.9}i  irreducible={}  order={:?}", r.z[0], r.z[1], r.irreducible, r.realized_order))
                    .collect::<Vec<_>>()
                    .join("\n");
                out(&json!({ "curve": id, "d": d, "l": l, "roots": roots }), text)
            }
        },
        Cmd::Bend(c) => {
            let v = match c {
                BendCmd::Amalgam { plus, minus, d, s, word } => {
                    let f = bending::build_amalgam(AmalgamSpec::new((plus[0], plus[1]), (minus[0], minus[1]), d, s)?)?;
                    bend_report(&f, &word)?
                }
                BendCmd::Hnn { d, n, s, word } => {
                    let f = bending::build_hnn(HnnSpec::new(d, n, s)?)?;
                    bend_report(&f, &word)?
                }
            };
            let text = format!("ideal points: {}\nstrict: {}", v["ideal_points"], v["strict"]);
            out(&v, text)
        }
        Cmd::Census(c) => match c {
            CensusCmd::Triangle { a, b, c } => {
                let t = triple(a, b, c)?;
                let recs = census::irreducible_characters(t)?;
                let text = recs
                    .iter()
                    .map(|r| format!("{}  dihedral={}  orders={:?}", r.image, r.dihedral, r.orders))
                    .collect::<Vec<_>>()
                    .join("\n");
                out(&json!({ "triple": t, "count": recs.len(), "characters": recs }), text)
            }
            CensusCmd::Dihedral { a, b, c, nmax } => {
                let t = triple(a, b, c)?;
                let q = match nmax {
                    Some(m) => census::dihedral_quotients(t, m)?,
                    None => census::all_dihedral_quotients(t),
                };
                let rows = census::semifibre_rows(t);
                out(&json!({ "triple": t, "orders": q, "semifibre_rows": rows }), format!("{t}: {q:?}"))
            }
            CensusCmd::Bound { spec } => {
                let s: ScenarioSpec = serde_json::from_str(&read(&spec)?).map_err(|e| Error::Parse(e.to_string()))?;
                let r = s.evaluate()?;
                let text = format!("J={} N={} s={}  1+(2J-N)/s = {}  bound {}", r.j, r.n, r.s, r.exact, r.bound);
                out(&r, text)
            }
        },
        Cmd::Graphs(c) => match c {
            GraphsCmd::Verify { lemma, disable } => {
                let cert = graphs::verify_lemma_with(&lemma, &disable)?;
                let text = format!(
                    "{}: {} candidates over {} grid points, {} admissible ({} ms)",
                    cert.lemma,
                    cert.searched,
                    cert.grid.len(),
                    cert.admissible,
                    cert.wall_time_ms
                );
                out(&cert, text)
            }
            GraphsCmd::Enumerate { case, n, delta, disable, dot } => {
                let p = GraphParams::new(case, n, delta).without(&disable);
                let e = graphs::enumerate_with_stats(&p)?;
                let witnesses: Vec<Value> = e.graphs.iter().map(|g| g.to_rotation_json()).collect();
                let text = if dot {
                    e.graphs.iter().map(|g| g.to_dot()).collect::<Vec<_>>().join("\n")
                } else {
                    format!("{} candidates, {} admissible", e.stats.candidates, e.graphs.len())
                };
                let mut v = json!({ "params": p, "stats": e.stats, "graphs": witnesses });
                if dot {
                    v["dot"] = e.graphs.iter().map(|g| g.to_dot()).collect();
                }
                out(&v, text)
            }
            GraphsCmd::Counting { case, n, delta } => {
                let v = graphs::case_counting_bound(case, delta, n);
                let text = if v.is_feasible() { "feasible".to_string() } else { "infeasible".to_string() };
                out(&v, text)
            }
            GraphsCmd::Curvature { max_face } => {
                let profiles = graphs::zero_curvature_profiles(max_face);
                let text = profiles.iter().map(|(v, f)| format!("valency {v}: {f:?}")).collect::<Vec<_>>().join("\n");
                out(&profiles, text)
            }
        },
        Cmd::Fillings(c) => match c {
            FillingsCmd::Analyze { file } => {
                let reports = fillings::analyze(&census_file(&file)?)?;
                out(&reports, group_text(&reports))
            }
            FillingsCmd::Threshold { file, min } => {
                let reports = fillings::threshold_report(&census_file(&file)?, min)?;
                let mut o = out(&reports, group_text(&reports))?;
                o.code = if reports.is_empty() { 0 } else { 2 };
                Ok(o)
            }
            FillingsCmd::Table { id } => match id {
                Some(id) => {
                    let slopes = fillings::table_lookup(&id)?;
                    let text = slopes.iter().map(Slope::to_string).collect::<Vec<_>>().join(", ");
                    out(&json!({ "id": id, "slopes": slopes }), text)
                }
                None => {
                    let ids = fillings::table_ids();
                    out(&ids, ids.join("\n"))
                }
            },
        },
    }
}

fn group_text(reports: &[fillings::GroupReport]) -> String {
    reports
        .iter()
        .map(|g| format!("members {:?}: distance {} via {} and {}", g.members, g.distance, g.pair.0, g.pair.1))
        .collect::<Vec<_>>()
        .join("\n")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(o) => {
            let body = if cli.json { serde_json::to_string_pretty(&o.value).expect("serializable") } else { o.text };
            // A closed pipe downstream is not an error of ours.
            if !body.is_empty() {
                let _ = writeln!(std::io::stdout(), "{body}");
            }
            ExitCode::from(o.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
