use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use strata_core::nonvanish::{admissible_paths, certify_nonvanishing, RepresentationClass};
use strata_core::polygons::{contracted_parabolic, enumerate_b, hodge_polygon, newton_polygon, NewtonPoint, Polygon};
use strata_core::rational::{fmt_rat, fmt_slope_list, fmt_vector, parse_rat, Rat};
use strata_core::root_data::{build_root_datum, GroupDescriptor, RootDatum};
use strata_core::satake::{kottwitz_function, KottwitzSide, PrefactorSign, SphericalFunction, UnramifiedCharacter};
use strata_core::traces::{
    trace_truncated_principal_series, trace_truncated_steinberg, trace_truncated_trivial, Divisibility, TraceResult,
};
use strata_core::{Result, StrataError};

#[derive(Parser)]
#[command(name = "strata", version, about = "Newton strata, Kottwitz functions and truncated traces")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// List the admissible Newton points B(G, μ).
    Strata(Common),
    /// Print the Kottwitz function as a Satake polynomial.
    Kottwitz {
        #[command(flatten)]
        common: Common,
        /// Where the function lives.
        #[arg(long, value_enum, default_value_t = Side::Base)]
        side: Side,
    },
    /// Exact truncated trace against a representation, with symbolic q and z.
    Trace {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Rep::Steinberg)]
        rep: Rep,
        /// Generic symbolic unramified character, or the trivial one.
        #[arg(long, value_enum, default_value_t = Chi::Symbolic)]
        chi: Chi,
    },
    /// Produce a replayable non-vanishing certificate.
    Certify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Class::Steinberg)]
        class: Class,
    },
    /// Enumerate the admissible lattice paths of b.
    Paths(Common),
    /// Newton polygon over the Hodge polygon.
    Polygon(Common),
}

#[derive(Args)]
struct Common {
    /// Group family.
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    #[arg(long)]
    n: Option<usize>,
    /// Degree of the unramified base field.
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    g: Option<usize>,
    /// Rank, for split classical types.
    #[arg(long)]
    rank: Option<usize>,
    /// Group descriptor as inline JSON or a path to a JSON file.
    #[arg(long, conflicts_with = "family")]
    group: Option<String>,
    /// Cocharacter as comma-separated integers.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "s")]
    mu: Option<String>,
    /// Use the standard cocharacter with `s` ones per block.
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    alpha: Option<usize>,
    /// Newton point in slope-list syntax, e.g. `1/5*5,1/2*4,2/3*3`.
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    /// Sign of the exponent in the prefactor `q^{∓α⟨ρ,μ⟩}`.
    #[arg(long, value_enum, default_value_t = Sign::Negative)]
    prefactor: Sign,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Specialise q numerically for display (z set to 1).
    #[arg(long)]
    q: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    #[value(name = "GL")]
    Gl,
    #[value(name = "U")]
    U,
    #[value(name = "GSp")]
    GSp,
    A,
    B,
    C,
}

#[derive(Clone, Copy, ValueEnum)]
enum Side {
    Base,
    Extension,
}

#[derive(Clone, Copy, ValueEnum)]
enum Rep {
    Steinberg,
    Trivial,
    PrincipalSeries,
}

#[derive(Clone, Copy, ValueEnum)]
enum Chi {
    Symbolic,
    Trivial,
}

#[derive(Clone, Copy, ValueEnum)]
enum Class {
    Steinberg,
    Rb,
}

#[derive(Clone, Copy, ValueEnum)]
enum Sign {
    Negative,
    Positive,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Tsv,
    Svg,
}

impl Common {
    fn descriptor(&self) -> Result<GroupDescriptor> {
        if let Some(g) = &self.group {
            let text = if g.trim_start().starts_with('{') {
                g.clone()
            } else {
                std::fs::read_to_string(g)
                    .map_err(|e| StrataError::InvalidDescriptor(format!("cannot read {g}: {e}")))?
            };
            return GroupDescriptor::from_json_str(&text);
        }
        let family = self
            .family
            .ok_or_else(|| StrataError::InvalidDescriptor("either --family or --group is required".into()))?;
        let need = |v: Option<usize>, flag: &str| {
            v.ok_or_else(|| StrataError::InvalidDescriptor(format!("this family requires --{flag}")))
        };
        let j = match family {
            FamilyArg::Gl => json!({"family": "GL", "n": need(self.n, "n")?, "d": self.d.unwrap_or(1)}),
            FamilyArg::U => json!({"family": "U", "n": need(self.n, "n")?, "d": self.d.unwrap_or(1)}),
            FamilyArg::GSp => json!({"family": "GSp", "g": need(self.g, "g")?}),
            FamilyArg::A => json!({"family": "split", "type": "A", "rank": need(self.rank, "rank")?}),
            FamilyArg::B => json!({"family": "split", "type": "B", "rank": need(self.rank, "rank")?}),
            FamilyArg::C => json!({"family": "split", "type": "C", "rank": need(self.rank, "rank")?}),
        };
        GroupDescriptor::from_json_str(&j.to_string())
    }

    fn mu(&self, rd: &RootDatum) -> Result<Vec<Rat>> {
        if let Some(text) = &self.mu {
            return text.split(',').map(|t| parse_rat(t.trim())).collect();
        }
        match (self.s, rd.desc.is_gsp()) {
            (Some(s), _) => rd.mu_standard(s),
            (None, true) => rd.mu_standard(rd.desc.block_len() / 2),
            (None, false) => Err(StrataError::InvalidInput("--mu or --s is required".into())),
        }
    }

    fn alpha(&self) -> usize {
        self.alpha.unwrap_or(1)
    }

    fn b(&self, rd: &RootDatum) -> Result<NewtonPoint> {
        let text = self.b.as_deref().ok_or_else(|| StrataError::InvalidInput("--b is required".into()))?;
        NewtonPoint::parse(rd, text)
    }

    fn sign(&self) -> PrefactorSign {
        match self.prefactor {
            Sign::Negative => PrefactorSign::Negative,
            Sign::Positive => PrefactorSign::Positive,
        }
    }

    fn require_format(&self, allowed: &[Format]) -> Result<()> {
        if allowed.contains(&self.format) {
            Ok(())
        } else {
            Err(StrataError::InvalidInput("output format not available for this verb".into()))
        }
    }
}

fn exit_code(e: &StrataError) -> u8 {
    match e {
        StrataError::InvalidDescriptor(_) | StrataError::InvalidInput(_) | StrataError::DimensionMismatch { .. } => 2,
        StrataError::Infeasible(_) | StrataError::NonMinuscule(_) | StrataError::Unsupported(_) => 3,
        StrataError::NotAdmissible(_) => 4,
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialise")
}

fn run_strata(c: &Common) -> Result<String> {
    c.require_format(&[Format::Json, Format::Tsv])?;
    let rd = build_root_datum(&c.descriptor()?)?;
    let mu = c.mu(&rd)?;
    let points = enumerate_b(&rd, &mu)?;
    let rows: Vec<(String, bool, Vec<usize>)> = points
        .iter()
        .map(|b| (fmt_slope_list(&b.slopes), b.is_basic(&rd), contracted_parabolic(&rd, b).composition(&rd)))
        .collect();
    Ok(match c.format {
        Format::Tsv => {
            let mut out = String::from("slopes\tbasic\tlevi_blocks\n");
            for (s, basic, comp) in &rows {
                let comp: Vec<String> = comp.iter().map(|k| k.to_string()).collect();
                writeln!(out, "{s}\t{basic}\t{}", comp.join(",")).unwrap();
            }
            out
        }
        _ => {
            let rows: Vec<Value> = rows
                .into_iter()
                .map(|(s, basic, comp)| json!({"slopes": s, "basic": basic, "levi_blocks": comp}))
                .collect();
            pretty(&json!({"group": rd.desc, "mu": fmt_vector(&mu), "count": rows.len(), "rows": rows})) + "\n"
        }
    })
}

fn function_tsv(f: &SphericalFunction) -> String {
    let mut out = String::from("exponents\tcoefficient\n");
    for (e, c) in &f.terms {
        let e: Vec<String> = e.iter().map(|x| x.to_string()).collect();
        writeln!(out, "{}\t{c}", e.join(",")).unwrap();
    }
    out
}

fn run_kottwitz(c: &Common, side: Side) -> Result<String> {
    c.require_format(&[Format::Json, Format::Tsv])?;
    let rd = build_root_datum(&c.descriptor()?)?;
    let mu = c.mu(&rd)?;
    let side = match side {
        Side::Base => KottwitzSide::BaseChanged,
        Side::Extension => KottwitzSide::OverExtension,
    };
    let f = kottwitz_function(&rd, &mu, c.alpha(), side, c.sign())?;
    Ok(match c.format {
        Format::Tsv => function_tsv(&f),
        _ => {
            let mut j = f.to_json();
            j["display"] = json!(f.to_string());
            if let Some(q) = c.q {
                let total: f64 = f.terms.values().map(|p| p.approx(q)).sum();
                j["numeric_at_q_and_unit_x"] = json!(format!("{total:.12}"));
            }
            pretty(&j) + "\n"
        }
    })
}

fn run_trace(c: &Common, rep: Rep, chi: Chi) -> Result<String> {
    c.require_format(&[Format::Json])?;
    let rd = build_root_datum(&c.descriptor()?)?;
    let mu = c.mu(&rd)?;
    let b = c.b(&rd)?;
    let f = kottwitz_function(&rd, &mu, c.alpha(), KottwitzSide::BaseChanged, c.sign())?;
    let character = match chi {
        Chi::Symbolic => UnramifiedCharacter::symbolic(rd.dim),
        Chi::Trivial => UnramifiedCharacter::trivial(rd.dim),
    };
    let div = Divisibility::Unchecked;
    let t: TraceResult = match rep {
        Rep::Steinberg => trace_truncated_steinberg(&rd, &b, &f, &character, div)?,
        Rep::Trivial => trace_truncated_trivial(&rd, &b, &f, &character, div)?,
        Rep::PrincipalSeries => trace_truncated_principal_series(&rd, &b, &f, &character, div)?,
    };
    let survivors: Vec<Value> = t.survivors.iter().map(|(e, s)| json!({"exponents": e, "sign": s})).collect();
    let mut j = json!({
        "group": rd.desc,
        "mu": fmt_vector(&mu),
        "b": b.label(),
        "alpha": c.alpha(),
        "value": t.value.to_string(),
        "zero": t.is_zero(),
        "survivors": survivors,
    });
    if let Some(q) = c.q {
        j["numeric_at_q_and_unit_z"] = json!(format!("{:.12}", t.value.approx(q, &vec![1.0; rd.dim])));
    }
    Ok(pretty(&j) + "\n")
}

fn run_certify(c: &Common, class: Class) -> Result<String> {
    c.require_format(&[Format::Json])?;
    let rd = build_root_datum(&c.descriptor()?)?;
    let mu = c.mu(&rd)?;
    let b = c.b(&rd)?;
    let class = match class {
        Class::Steinberg => RepresentationClass::Steinberg,
        Class::Rb => RepresentationClass::RB,
    };
    Ok(certify_nonvanishing(&rd, &b, &mu, class, c.alpha)?.to_json() + "\n")
}

fn run_paths(c: &Common) -> Result<String> {
    c.require_format(&[Format::Json, Format::Tsv])?;
    let rd = build_root_datum(&c.descriptor()?)?;
    let mu = c.mu(&rd)?;
    let b = c.b(&rd)?;
    if !strata_core::polygons::is_admissible(&rd, &b, &mu)? {
        return Err(StrataError::NotAdmissible(b.label()));
    }
    let comp = contracted_parabolic(&rd, &b).composition(&rd);
    let paths = admissible_paths(&rd, &b, &mu)?;
    Ok(match c.format {
        Format::Tsv => {
            let mut out = String::from("path\tmonomial\n");
            for p in &paths {
                let m: Vec<String> = p.monomial.iter().map(|x| x.to_string()).collect();
                writeln!(out, "{}\t{}", p.render(&comp), m.join(",")).unwrap();
            }
            out
        }
        _ => {
            let list: Vec<Value> = paths
                .iter()
                .map(|p| json!({"path": p.render(&comp), "steps": p.steps, "monomial": p.monomial}))
                .collect();
            pretty(&json!({"group": rd.desc, "b": b.label(), "count": list.len(), "paths": list})) + "\n"
        }
    })
}

fn polygon_rows(p: &Polygon) -> Vec<(String, String)> {
    p.vertices.iter().map(|(x, y)| (fmt_rat(x), fmt_rat(y))).collect()
}

fn to_f64(r: &Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

const SCALE: f64 = 40.0;
const MARGIN: f64 = 20.0;

fn svg(newton: &Polygon, hodge: &Polygon, mirror: bool) -> String {
    let ys = newton.vertices.iter().chain(&hodge.vertices).map(|(_, y)| to_f64(y));
    let (lo, hi) = ys.fold((0.0f64, 0.0f64), |(a, b), y| (a.min(y), b.max(y)));
    let n = newton.len() as f64;
    let width = n * SCALE + 2.0 * MARGIN;
    let height = (hi - lo) * SCALE + 2.0 * MARGIN;
    let px = |x: f64| MARGIN + x * SCALE;
    let py = |y: f64| MARGIN + (hi - y) * SCALE;
    let points = |p: &Polygon| {
        p.vertices
            .iter()
            .map(|(x, y)| format!("{:.2},{:.2}", px(to_f64(x)), py(to_f64(y))))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut out = String::new();
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.2}\" height=\"{height:.2}\" viewBox=\"0 0 {width:.2} {height:.2}\">"
    )
    .unwrap();
    if mirror {
        writeln!(
            out,
            "  <line class=\"mirror\" x1=\"{x:.2}\" y1=\"0.00\" x2=\"{x:.2}\" y2=\"{height:.2}\" stroke=\"gray\" stroke-dasharray=\"1,3\"/>",
            x = px(n / 2.0)
        )
        .unwrap();
    }
    writeln!(
        out,
        "  <polyline class=\"hodge\" points=\"{}\" fill=\"none\" stroke=\"black\" stroke-dasharray=\"6,4\"/>",
        points(hodge)
    )
    .unwrap();
    writeln!(out, "  <polyline class=\"newton\" points=\"{}\" fill=\"none\" stroke=\"black\"/>", points(newton)).unwrap();
    out.push_str("</svg>\n");
    out
}

fn run_polygon(c: &Common) -> Result<String> {
    let rd = build_root_datum(&c.descriptor()?)?;
    let mu = c.mu(&rd)?;
    let b = c.b(&rd)?;
    if !strata_core::polygons::is_admissible(&rd, &b, &mu)? {
        return Err(StrataError::NotAdmissible(b.label()));
    }
    let newton = newton_polygon(&b);
    let hodge = hodge_polygon(&rd, &mu)?;
    Ok(match c.format {
        Format::Svg => svg(&newton, &hodge, rd.desc.is_unitary()),
        Format::Tsv => {
            let mut out = String::from("polygon\tx\ty\n");
            for (name, p) in [("newton", &newton), ("hodge", &hodge)] {
                for (x, y) in polygon_rows(p) {
                    writeln!(out, "{name}\t{x}\t{y}").unwrap();
                }
            }
            out
        }
        Format::Json => {
            let v = |p: &Polygon| -> Vec<Value> { polygon_rows(p).into_iter().map(|(x, y)| json!([x, y])).collect() };
            pretty(&json!({
                "group": rd.desc,
                "b": b.label(),
                "newton": v(&newton),
                "hodge": v(&hodge),
                "breakpoints": newton.breakpoints(),
            })) + "\n"
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.verb {
        Verb::Strata(c) => run_strata(c),
        Verb::Kottwitz { common, side } => run_kottwitz(common, *side),
        Verb::Trace { common, rep, chi } => run_trace(common, *rep, *chi),
        Verb::Certify { common, class } => run_certify(common, *class),
        Verb::Paths(c) => run_paths(c),
        Verb::Polygon(c) => run_polygon(c),
    };
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", json!({"error": e.kind(), "message": e.to_string()}));
            ExitCode::from(exit_code(&e))
        }
    }
}
