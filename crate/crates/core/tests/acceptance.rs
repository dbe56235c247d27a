//! End-to-end acceptance suite: ten checks, each with a wall-clock limit.
//! Prints one line per check and exits nonzero if any fails.

use std::collections::HashSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use spandescent::covering::{extract_descent, glue, is_covering_projection, main1_forward, main2_equivalence, same_glued_object};
use spandescent::descent::{
    action_to_s, enumerate_h_descent, enumerate_s_descent, enumerate_u_descent, is_consistent, s_to_action, Transfer,
    UDescentDatum,
};
use spandescent::family::{cech_simplicial_family, condition_g, validate_selfdual, SelfDualFamily, Span1};
use spandescent::fintopos::{Family, Presheaf, PresheafMap};
use spandescent::fixtures::{cover_suite, full_nerve_cover, split_cover, swap_cover, swap_cover_extended, swap_datum};
use spandescent::groupoid::{
    enumerate_actions, fundamental_presentation, g_fundamental_presentation, Verdict, Word, WordBudget, WordSolver,
};
use spandescent::hypercover::{
    check_epi_criteria, connected_refinement, generator_refinement, is_hypercover, one_span_refinement, representables,
    zero_span_refinement, ClassRef, SpanClass, SpanClassSp, SpanRefinement, MAX_TWO_SPANS,
};
use spandescent::Error;
use spandescent::progroupoid::{assemble, CoverMap, HypercoverIndex, HypercoverNode, IndexEdge, Strictness};
use spandescent::simplicial::{cech_nerve, check_selfdual_groupoid_condition, validate, validate_duality, CechNerve};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// The fixture's refinement for the transfer checks. `U_2 = {b, c}` is not
/// connected, so the connected refinement is unavailable and the generator
/// refinement (same span class, no connectivity requirement) is used.
fn transfer_refinement(cover: &Family) -> Result<SpanRefinement, String> {
    generator_refinement(cover, 2).map_err(err)
}

fn c1_nerves() -> Outcome {
    let suite = cover_suite();
    ensure(suite.len() >= 10, || "fewer than 10 covers".into())?;
    for (name, cover) in &suite {
        let (s, tau) = cech_nerve(cover).map_err(err)?;
        ensure(validate(&s).is_empty(), || format!("{name}: simplicial identities"))?;
        ensure(validate_duality(&s, &tau).is_empty(), || format!("{name}: duality"))?;
        ensure(check_selfdual_groupoid_condition(&s, &tau), || format!("{name}: groupoid condition"))?;
    }
    Ok(format!("{} covers", suite.len()))
}

fn selfdual_families() -> Result<Vec<(String, SelfDualFamily)>, String> {
    let mut out = Vec::new();
    for (name, cover) in cover_suite() {
        out.push((format!("cech {name}"), cech_simplicial_family(&cover).map_err(err)?));
        if let Ok(r) = connected_refinement(&cover, 1) {
            out.push((format!("connected {name}"), r.family));
        }
    }
    Ok(out)
}

fn c2_groupoids() -> Outcome {
    let n = CechNerve::of(&full_nerve_cover()).map_err(err)?;
    let p = fundamental_presentation(&n.sset);
    let (l12, l21) = (n.pair(0, 1).unwrap(), n.pair(1, 0).unwrap());
    let budget = WordBudget { rewrite_depth: 10, ..WordBudget::default() };
    let v = spandescent::groupoid::word_equal(&p, &Word::path(1, &[l21, l12]), &Word::empty(1), budget).map_err(err)?;
    ensure(v == Verdict::Equal, || format!("(2,1)(1,2) ~ id gave {v:?}"))?;
    let mut families = 0;
    let mut generators = 0;
    for (name, f) in selfdual_families()? {
        if !condition_g(&f) {
            continue;
        }
        families += 1;
        let p = g_fundamental_presentation(&f).map_err(err)?;
        let solver = WordSolver::new(&p, budget);
        let s = f.sset();
        for l in 0..s.s1.len() {
            let i = s.src(l);
            let round = Word::path(i, &[l, f.duality.tau1[l]]);
            let v = solver.equal(&round, &Word::path(i, &[s.degen0[i]])).map_err(err)?;
            ensure(v == Verdict::Equal, || format!("{name}: l^op l ~ s0 fails at {} ({v:?})", s.s1[l]))?;
            generators += 1;
        }
    }
    Ok(format!("{families} families, {generators} generators certified"))
}

fn c3_descent_action() -> Outcome {
    let n = CechNerve::of(&full_nerve_cover()).map_err(err)?;
    let data = enumerate_s_descent(&n.sset, 2);
    let p = fundamental_presentation(&n.sset);
    let actions = enumerate_actions(&p, 2);
    ensure(data.len() == actions.len(), || format!("{} data vs {} actions", data.len(), actions.len()))?;
    for d in &data {
        let back = action_to_s(&n.sset, &s_to_action(&n.sset, d).map_err(err)?).map_err(err)?;
        ensure(back == *d, || "datum round trip".into())?;
    }
    for a in &actions {
        let back = s_to_action(&n.sset, &action_to_s(&n.sset, a).map_err(err)?).map_err(err)?;
        ensure(back == *a, || "action round trip".into())?;
    }
    Ok(format!("{} data = {} actions", data.len(), actions.len()))
}

struct TransferCase {
    cover: Family,
    refinement: SpanRefinement,
    us: Vec<UDescentDatum>,
}

fn transfer_case() -> Result<TransferCase, String> {
    let cover = swap_cover();
    let refinement = transfer_refinement(&cover)?;
    let us = enumerate_u_descent(&cover, 2).map_err(err)?;
    Ok(TransferCase { cover, refinement, us })
}

fn c4_transfer() -> Outcome {
    let TransferCase { cover, refinement, us } = transfer_case()?;
    let f = &refinement.family.family;
    let hs = enumerate_h_descent(f, 2);
    ensure(hs.len() == us.len(), || format!("{} H-data vs {} U-data", hs.len(), us.len()))?;
    let t = Transfer::new(f, &cover).map_err(err)?;
    let u_set: HashSet<&UDescentDatum> = us.iter().collect();
    for h in &hs {
        let u = t.h_to_u(f, h).map_err(err)?;
        ensure(u_set.contains(&u), || "h_to_u leaves the enumerated U-data".into())?;
        ensure(t.u_to_h(f, &u).map_err(err)? == *h, || "u_to_h . h_to_u is not the identity".into())?;
    }
    for u in &us {
        ensure(t.h_to_u(f, &t.u_to_h(f, u).map_err(err)?).map_err(err)? == *u, || "h_to_u . u_to_h is not the identity".into())?;
    }
    Ok(format!("{} H-data = {} U-data over {} 1-simplices", hs.len(), us.len(), f.sset().s1.len()))
}

fn c5_glue() -> Outcome {
    let cover = swap_cover();
    let us = enumerate_u_descent(&cover, 2).map_err(err)?;
    for u in &us {
        let lc = glue(&cover, u).map_err(err)?;
        let back = extract_descent(&lc).map_err(err)?;
        ensure(back == *u, || "extract . glue is not the identity".into())?;
        let again = glue(&cover, &back).map_err(err)?;
        ensure(same_glued_object(&lc, &again), || "glue . extract . glue differs".into())?;
    }
    let x = glue(&cover, &swap_datum().map_err(err)?).map_err(err)?.x;
    ensure(x.total_size() == 2, || format!("swap fixture gives |X| = {}", x.total_size()))?;
    Ok(format!("{} data round-tripped, |X| = 2", us.len()))
}

/// Every span `y(p) -> U_i x U_j` and the identity span of each component.
fn representable_span_class(cover: &Family) -> Result<SpanClassSp, String> {
    let us: Vec<Arc<Presheaf>> = cover.components().map_err(err)?.into_iter().map(|c| c.presheaf).collect();
    let base = cover.base().clone();
    let mut spans = Vec::new();
    for i in 0..us.len() {
        for j in 0..us.len() {
            for p in 0..base.len() {
                let y = Arc::new(Presheaf::representable(base.clone(), p));
                let leg = |x: &Presheaf, e: usize| {
                    PresheafMap::new((0..base.len()).map(|q| if base.leq(q, p) { vec![x.restrict(p, q, e)] } else { Vec::new() }).collect())
                };
                for a in 0..us[i].fiber_size(p) {
                    for b in 0..us[j].fiber_size(p) {
                        spans.push(Span1 { vertex: y.clone(), feet: [i, j], left: leg(&us[i], a), right: leg(&us[j], b) });
                    }
                }
            }
        }
        let id = PresheafMap::identity(&us[i]);
        spans.push(Span1 { vertex: us[i].clone(), feet: [i, i], left: id.clone(), right: id });
    }
    Ok(SpanClassSp(spans))
}

const NAMED_FIXTURES: [&str; 3] = ["swap", "full", "pseudocircle"];

fn c6_constructions() -> Outcome {
    let mut built = 0;
    let mut epi = 0;
    let mut over_limit = Vec::new();
    for (name, cover) in cover_suite() {
        let mut class: Vec<Arc<Presheaf>> = cover.components().map_err(err)?.into_iter().map(|c| c.presheaf).collect();
        class.extend(representables(&cover));
        let vclass = SpanClass(class);
        let sclass = representable_span_class(&cover)?;
        let zero = zero_span_refinement(&cover, &vclass);
        let one = one_span_refinement(&cover, &sclass);
        for (kind, r, class) in [("zero", zero, ClassRef::Vertices(&vclass)), ("one", one, ClassRef::Spans(&sclass))] {
            let r = match r {
                // Only the extra generated covers may be too large to build;
                // the named fixtures must always be checked.
                Err(Error::LimitExceeded(_)) if !NAMED_FIXTURES.contains(&name.as_str()) => {
                    over_limit.push(format!("{kind} {name}"));
                    continue;
                }
                other => other.map_err(|e| format!("{name} {kind}: {e}"))?,
            };
            let f = &r.family;
            let bad = validate_selfdual(f);
            ensure(bad.is_empty(), || format!("{name} {kind}: {}", bad[0]))?;
            ensure(condition_g(f), || format!("{name} {kind}: condition G"))?;
            if check_epi_criteria(&cover, class).map_err(err)? {
                epi += 1;
                ensure(is_hypercover(&f.family, &cover).map_err(err)?, || format!("{name} {kind}: epi criteria without hypercover"))?;
            }
            built += 1;
        }
    }
    let mut msg = format!("{built} refinements, {epi} with epi criteria, all hypercovers");
    if !over_limit.is_empty() {
        msg += &format!("; extra covers not built (over {MAX_TWO_SPANS} 2-spans): {}", over_limit.join(", "));
    }
    Ok(msg)
}

fn c7_main1() -> Outcome {
    let cover = swap_cover();
    let us = enumerate_u_descent(&cover, 2).map_err(err)?;
    for u in &us {
        let m = main1_forward(&cover, u).map_err(err)?;
        ensure(m.residual.is_empty(), || m.residual.join("; "))?;
        ensure(is_consistent(&m.s, &m.refinement.family.family), || "s-datum inconsistent".into())?;
        ensure(m.recovered == *u, || "induced_h_from_s . h_to_u differs from u".into())?;
    }
    Ok(format!("{} data through the pipeline", us.len()))
}

fn c8_main2() -> Outcome {
    let cover = swap_cover();
    let r = transfer_refinement(&cover)?;
    let rep = main2_equivalence(&cover, &r.family, 2).map_err(err)?;
    ensure(rep.holds(), || format!("{rep:?}"))?;
    Ok(format!(
        "{} objects, {} morphisms on both sides",
        rep.projection_objects, rep.projection_homs
    ))
}

fn c9_covering() -> Outcome {
    let mut covers = cover_suite();
    covers.push(("swap-extended".into(), swap_cover_extended()));
    let mut checked = 0;
    for (name, cover) in covers {
        for u in enumerate_u_descent(&cover, 2).map_err(err)? {
            ensure(is_covering_projection(&cover, &u).map_err(err)?, || format!("{name}: datum is not a covering projection"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} data are covering projections"))
}

fn node(label: &str, cover: Family) -> Result<HypercoverNode, String> {
    let refinement = connected_refinement(&cover, 2).map_err(err)?;
    Ok(HypercoverNode { label: label.into(), cover, refinement })
}

fn c10_strictness() -> Outcome {
    let budget = WordBudget::default();
    let fine = node("split", split_cover())?;
    let coarse = node("full", full_nerve_cover())?;
    let m = CoverMap::injective(&fine.cover, &coarse.cover, vec![0, 1, 1]).map_err(err)?;
    let chain = HypercoverIndex { nodes: vec![fine.clone(), coarse], edges: vec![IndexEdge { from: 0, to: 1, cover_map: m }] };
    let (_, report) = assemble(&chain, budget).map_err(err)?;
    ensure(report.all_strict(), || format!("chain: {:?}", report.transitions))?;
    let extra = Family::from_components(
        full_nerve_cover().base().clone(),
        &[
            ("1", &Presheaf::constant(&["a"], full_nerve_cover().base().clone())),
            ("2", &Presheaf::constant(&["b"], full_nerve_cover().base().clone())),
            ("3", &Presheaf::constant(&["d"], full_nerve_cover().base().clone())),
        ],
    )
    .map_err(err)?;
    let wide = node("wide", extra)?;
    let m = CoverMap::injective(&fine.cover, &wide.cover, vec![0, 1, 1]).map_err(err)?;
    let broken = HypercoverIndex { nodes: vec![fine, wide], edges: vec![IndexEdge { from: 0, to: 1, cover_map: m }] };
    let (_, report) = assemble(&broken, budget).map_err(err)?;
    match &report.transitions[0].verdict {
        Strictness::NotStrict { witness, .. } => {
            ensure(witness == "3", || format!("unexpected witness {witness}"))?;
            Ok("chain strict; unreachable object 3 reported".into())
        }
        v => Err(format!("expected a non-strict verdict, got {v:?}")),
    }
}

fn main() {
    let checks: [(&str, fn() -> Outcome, u64); 10] = [
        ("nerve/duality suite", c1_nerves, 1),
        ("groupoid suite", c2_groupoids, 1),
        ("descent = action", c3_descent_action, 5),
        ("transfer bijection", c4_transfer, 30),
        ("glue/extract round trip", c5_glue, 5),
        ("construction conformance", c6_constructions, 10),
        ("main1 pipeline", c7_main1, 30),
        ("main2 equivalence", c8_main2, 60),
        ("covering projections", c9_covering, 5),
        ("progroupoid strictness", c10_strictness, 10),
    ];
    let mut failed = 0;
    for (k, (name, check, limit)) in checks.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*limit);
        let (status, detail) = match (&outcome, in_time) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("{d}; over the {limit} s limit")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("criterion {:>2} {status} [{:>8.3} s / {limit} s] {name}: {detail}", k + 1, elapsed.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
