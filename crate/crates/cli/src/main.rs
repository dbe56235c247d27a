//! `spandescent`: run the nerve, refinement, groupoid, descent and
//! progroupoid pipelines on JSON inputs.
//!
//! Reports go to stdout as JSON. With `--out DIR` the report and a DOT
//! rendering are also written to `DIR/<command>.json` and `DIR/<command>.dot`.
//! Exit codes: 0 success, 1 mathematical failure, 2 input error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};
use serde_json::{json, Value};

use spandescent::covering::{glue, main1_forward, main2_equivalence, uncovered_pair, validate_trivialization};
use spandescent::descent::validate_u_descent;
use spandescent::dot::{nerve_dot, presentation_dot, spans_dot};
use spandescent::family::{cech_simplicial_family, condition_g_failure, validate_selfdual, SelfDualFamily};
use spandescent::fintopos::Family;
use spandescent::groupoid::{fundamental_presentation, g_fundamental_presentation, RelationOrigin, WordBudget};
use spandescent::hypercover::{
    check_epi_criteria, connected_refinement, hypercover_report, one_span_refinement, zero_span_refinement, ClassRef,
    SpanRefinement,
};
use spandescent::json::{
    class_from_json, family_from_json, family_to_json, index_from_json, nerve_to_json, parse, presentation_to_json,
    presheaf_to_json, read_cover, read_file, s_datum_to_json, ClassJson, DatumJson, IndexJson,
};
use spandescent::progroupoid::assemble;
use spandescent::simplicial::{cech_nerve, check_selfdual_groupoid_condition, validate, validate_duality};
use spandescent::Error;

#[derive(Parser)]
#[command(name = "spandescent", version, about = "Descent along span-refinement hypercovers of finite presheaf topoi")]
struct Cli {
    #[command(flatten)]
    budgets: Budgets,
    /// Also write the report and a DOT graph into this directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Budgets {
    /// Rewrite steps allowed when deciding word equality.
    #[arg(long, global = true, env = "SPANDESCENT_WORD_BUDGET", default_value_t = 10,
          value_parser = clap::value_parser!(u64).range(1..))]
    word_budget: u64,
    /// Largest carrier size for enumerated actions and descent data.
    #[arg(long, global = true, env = "SPANDESCENT_ACTION_BOUND", default_value_t = 2,
          value_parser = clap::value_parser!(u64).range(1..))]
    action_bound: u64,
    /// Size bound on connected sub-objects added to generated span classes.
    #[arg(long, global = true, env = "SPANDESCENT_SPAN_BOUND", default_value_t = 1,
          value_parser = clap::value_parser!(u64).range(1..))]
    span_bound: u64,
}

impl Budgets {
    fn words(&self) -> WordBudget {
        WordBudget { rewrite_depth: self.word_budget as usize, ..WordBudget::default() }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Cech nerve of a cover, with its validity checks.
    Nerve { cover: PathBuf },
    /// Span refinement of a cover and its hypercover verdict.
    Refine {
        cover: PathBuf,
        /// `connected`, `zero:<class-file>` or `one:<class-file>`.
        #[arg(long, default_value = "connected")]
        class: String,
    },
    /// Presentation of the fundamental groupoid of a family or cover.
    Groupoid {
        /// A family file, or a cover file (read as its Cech family).
        family: PathBuf,
        /// Present the G-fundamental groupoid instead.
        #[arg(long)]
        g: bool,
    },
    /// Descent-data pipelines on a cover.
    #[command(group(ArgGroup::new("mode").required(true).args(["glue", "check", "covproj", "main1", "main2"])))]
    Descend {
        cover: PathBuf,
        /// The descent datum; not needed for `--main2`.
        datum: Option<PathBuf>,
        #[arg(long)]
        glue: bool,
        #[arg(long)]
        check: bool,
        #[arg(long)]
        covproj: bool,
        #[arg(long)]
        main1: bool,
        #[arg(long)]
        main2: bool,
    },
    /// Transition functors and strictness over a hypercover index.
    Progroupoid { index: PathBuf },
}

/// Why a command did not succeed.
enum Failure {
    Input(String),
    Math(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Math(e.to_string())
    }
}

fn input<T>(r: Result<T, Error>) -> Result<T, Failure> {
    r.map_err(|e| Failure::Input(e.to_string()))
}

/// A report, an optional DOT graph, and whether the verdicts all hold.
struct Outcome {
    report: Value,
    dot: Option<String>,
    ok: bool,
}

fn load_cover(path: &Path) -> Result<Family, Failure> {
    input(read_file(path).and_then(|t| read_cover(&t)))
}

fn nerve(cover: &Path) -> Result<Outcome, Failure> {
    let cover = load_cover(cover)?;
    let (s, tau) = cech_nerve(&cover)?;
    let mut violations: Vec<String> = validate(&s).iter().map(ToString::to_string).collect();
    violations.extend(validate_duality(&s, &tau).iter().map(ToString::to_string));
    let groupoid_condition = check_selfdual_groupoid_condition(&s, &tau);
    let mut report = nerve_to_json(&s, Some(&tau));
    report["violations"] = json!(violations);
    report["groupoid_condition"] = json!(groupoid_condition);
    Ok(Outcome { dot: Some(nerve_dot("nerve", &s)), ok: violations.is_empty() && groupoid_condition, report })
}

fn refine(cover: &Path, class: &str, b: Budgets) -> Result<Outcome, Failure> {
    let cover = load_cover(cover)?;
    let read_class = |file: &str| -> Result<ClassJson, Failure> { input(read_file(Path::new(file)).and_then(|t| parse(&t, "class"))) };
    let (r, epi): (SpanRefinement, Option<bool>) = match class.split_once(':') {
        None if class == "connected" => (connected_refinement(&cover, b.span_bound as usize)?, None),
        Some(("zero", file)) => {
            let (vertices, _) = input(class_from_json(&cover, &read_class(file)?))?;
            let epi = check_epi_criteria(&cover, ClassRef::Vertices(&vertices))?;
            (zero_span_refinement(&cover, &vertices)?, Some(epi))
        }
        Some(("one", file)) => {
            let (_, spans) = input(class_from_json(&cover, &read_class(file)?))?;
            let epi = check_epi_criteria(&cover, ClassRef::Spans(&spans))?;
            (one_span_refinement(&cover, &spans)?, Some(epi))
        }
        _ => return Err(Failure::Input(format!("unknown class `{class}`; use connected, zero:<file> or one:<file>"))),
    };
    let f = &r.family;
    let violations: Vec<String> = validate_selfdual(f).iter().map(ToString::to_string).collect();
    let g_failure = condition_g_failure(f).map(|l| f.sset().s1[l].clone());
    let hyper = hypercover_report(&f.family, &cover)?;
    let ok = violations.is_empty() && g_failure.is_none() && hyper.holds;
    let report = json!({
        "family": family_to_json(f),
        "counts": {"S0": f.sset().s0.len(), "S1": f.sset().s1.len(), "S2": f.sset().s2.len()},
        "selfdual_violations": violations,
        "condition_g": g_failure.is_none(),
        "condition_g_failure": g_failure,
        "epi_criteria": epi,
        "hypercover": hyper,
    });
    Ok(Outcome { dot: Some(spans_dot("refinement", &f.family)), ok, report })
}

fn load_family(path: &Path) -> Result<SelfDualFamily, Failure> {
    let text = input(read_file(path))?;
    let v: Value = input(parse(&text, "family"))?;
    if v.get("sset").is_some() {
        input(parse(&text, "family").and_then(|j| family_from_json(&j)))
    } else {
        Ok(cech_simplicial_family(&input(read_cover(&text))?)?)
    }
}

fn groupoid(path: &Path, g: bool) -> Result<Outcome, Failure> {
    let f = load_family(path)?;
    let violations: Vec<String> = validate_selfdual(&f).iter().map(ToString::to_string).collect();
    let p = if g { g_fundamental_presentation(&f)? } else { fundamental_presentation(f.sset()) };
    let mut report = presentation_to_json(&p, f.sset());
    report["family_violations"] = json!(violations);
    let discrete = (0..p.generators.len()).all(|k| p.identities.contains(&Some(k)));
    report["discrete"] = json!(discrete);
    if g {
        let extra = p.relations.iter().filter(|r| matches!(r.origin, RelationOrigin::SpanMorphism(..))).count();
        report["extra_relations"] = json!(extra);
    }
    Ok(Outcome { dot: Some(presentation_dot("groupoid", &p)), ok: violations.is_empty(), report })
}

#[derive(Clone, Copy)]
enum Mode {
    Glue,
    Check,
    Covproj,
    Main1,
    Main2,
}

fn descend(cover: &Path, datum: Option<&Path>, mode: Mode, b: Budgets) -> Result<Outcome, Failure> {
    let cover = load_cover(cover)?;
    if let Mode::Main2 = mode {
        let f = spandescent::hypercover::generator_refinement(&cover, b.span_bound as usize)?;
        let r = main2_equivalence(&cover, &f.family, b.action_bound as usize)?;
        return Ok(Outcome { ok: r.holds(), report: json!({"main2": r, "holds": r.holds()}), dot: None });
    }
    let path = datum.ok_or_else(|| Failure::Input("a datum file is required for this mode".into()))?;
    let dj: DatumJson = input(read_file(path).and_then(|t| parse(&t, "datum")))?;
    let u = input(spandescent::json::datum_from_json(&cover, &dj))?;
    let violations: Vec<String> = validate_u_descent(&cover, &u).iter().map(ToString::to_string).collect();
    if !violations.is_empty() {
        return Ok(Outcome { report: json!({"valid": false, "violations": violations}), dot: None, ok: false });
    }
    Ok(match mode {
        Mode::Check => Outcome { report: json!({"valid": true, "violations": violations}), dot: None, ok: true },
        Mode::Glue => {
            let lc = glue(&cover, &u)?;
            let bad: Vec<String> = validate_trivialization(&lc).iter().map(ToString::to_string).collect();
            let report = json!({"X_size": lc.x.total_size(), "X": presheaf_to_json(&lc.x), "trivialization_violations": bad});
            Outcome { report, dot: None, ok: bad.is_empty() }
        }
        Mode::Covproj => {
            let why = uncovered_pair(&cover, &u)?;
            Outcome { report: json!({"covering_projection": why.is_none(), "uncovered": why}), dot: None, ok: why.is_none() }
        }
        Mode::Main1 => {
            let m = main1_forward(&cover, &u)?;
            let s = m.refinement.family.sset();
            let report = json!({
                "refinement": {"S0": s.s0.len(), "S1": s.s1.len(), "S2": s.s2.len()},
                "s": s_datum_to_json(s, &m.s),
                "recovered_equal": m.recovered == u,
                "residual": m.residual,
            });
            Outcome { ok: m.residual.is_empty(), report, dot: Some(spans_dot("main1", &m.refinement.family.family)) }
        }
        Mode::Main2 => unreachable!("handled above"),
    })
}

fn progroupoid(path: &Path, b: Budgets) -> Result<Outcome, Failure> {
    let j: IndexJson = input(read_file(path).and_then(|t| parse(&t, "index")))?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let index = match index_from_json(&j, dir) {
        Ok(i) => i,
        Err(e @ (Error::Parse(_) | Error::Io { .. } | Error::UnknownLabel { .. } | Error::DuplicateLabel { .. } | Error::Malformed(_))) => {
            return Err(Failure::Input(e.to_string()))
        }
        Err(e) => return Err(e.into()),
    };
    let (pro, report) = assemble(&index, b.words())?;
    let groupoids: Vec<Value> = index
        .nodes
        .iter()
        .zip(&pro.groupoids)
        .map(|(n, p)| json!({"node": n.label, "objects": p.objects.len(), "generators": p.generators.len(), "relations": p.relations.len()}))
        .collect();
    let ok = report.all_strict();
    Ok(Outcome { report: json!({"groupoids": groupoids, "strictness": report, "all_strict": ok}), dot: None, ok })
}

fn run(cli: &Cli) -> Result<(&'static str, Outcome), Failure> {
    let b = cli.budgets;
    Ok(match &cli.command {
        Command::Nerve { cover } => ("nerve", nerve(cover)?),
        Command::Refine { cover, class } => ("refine", refine(cover, class, b)?),
        Command::Groupoid { family, g } => ("groupoid", groupoid(family, *g)?),
        Command::Descend { cover, datum, glue, check, covproj, main1, .. } => {
            let mode = match (glue, check, covproj, main1) {
                (true, ..) => Mode::Glue,
                (_, true, ..) => Mode::Check,
                (_, _, true, _) => Mode::Covproj,
                (_, _, _, true) => Mode::Main1,
                _ => Mode::Main2,
            };
            ("descend", descend(cover, datum.as_deref(), mode, b)?)
        }
        Command::Progroupoid { index } => ("progroupoid", progroupoid(index, b)?),
    })
}

fn write_out(dir: &Path, name: &str, text: &str, dot: Option<&str>) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(format!("{name}.json")), text)?;
    if let Some(d) = dot {
        std::fs::write(dir.join(format!("{name}.dot")), d)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((name, o)) => {
            let text = serde_json::to_string_pretty(&o.report).expect("reports serialize") + "\n";
            print!("{text}");
            if let Some(dir) = &cli.out {
                if let Err(e) = write_out(dir, name, &text, o.dot.as_deref()) {
                    eprintln!("error: cannot write to {}: {e}", dir.display());
                    return ExitCode::from(2);
                }
            }
            if o.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Input(msg)) => {
            eprintln!("input error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Math(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
