//! Locally constant objects glued from descent data, action spans, the
//! covering-projection predicate, and the two comparison pipelines between
//! covering projections and groupoid actions.

use std::collections::HashSet;
use std::sync::Arc;

use serde::Serialize;

use crate::descent::{
    consistent_to_g_action, enumerate_s_descent, g_action_to_s, induced_h_from_s, is_consistent, validate_u_descent,
    SDescentDatum, Transfer, UDescentDatum,
};
use crate::error::{Error, Result, Violation};
use crate::family::{cech_simplicial_family, validate_selfdual, SelfDualFamily, Span1};
use crate::fintopos::{coproduct, hom_enumerate, is_isomorphic, product, quotient_by_pairs, Family, Presheaf, PresheafMap};
use crate::groupoid::{all_carrier_maps, enumerate_actions, equivariant_maps, g_fundamental_presentation, CarrierMap, GroupoidAction};
use crate::hypercover::{is_hypercover, one_span_refinement, SpanClassSp, SpanRefinement};
use crate::perm::Bij;
use crate::simplicial::TruncSSet;

/// An object `X` with isomorphisms `theta_i: R_i x U_i -> X x U_i` over `U_i`.
#[derive(Debug, Clone)]
pub struct LocallyConstant {
    pub x: Presheaf,
    pub cover: Family,
    pub carriers: Vec<Vec<String>>,
    /// `R_i x U_i`, elements in product order.
    pub trivial: Vec<Presheaf>,
    /// `X x U_i`, elements in product order.
    pub local: Vec<Presheaf>,
    pub theta: Vec<PresheafMap>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionSpan {
    pub span: Span1,
    pub witness: Bij,
}

fn cover_parts(cover: &Family) -> Result<Vec<Arc<Presheaf>>> {
    Ok(cover.components()?.into_iter().map(|c| c.presheaf).collect())
}

/// Cech nerve of the cover, for indexing `sigma`.
fn nerve(cover: &Family) -> Result<TruncSSet> {
    Ok(cech_simplicial_family(cover)?.sset().clone())
}

fn pair_index(s: &TruncSSet, i: usize, j: usize) -> Option<usize> {
    (0..s.s1.len()).find(|&l| s.src(l) == i && s.tgt(l) == j)
}

/// Glues `X` as the quotient of the coproduct of `R_i x U_i` identifying
/// `(y, a)` in the `i`-th summand with `(sigma(y), b)` in the `j`-th for every
/// `(a, b)` in `U_i x U_j`.
pub fn glue(cover: &Family, u: &UDescentDatum) -> Result<LocallyConstant> {
    if let Some(v) = validate_u_descent(cover, u).first() {
        return Err(Error::Invalid(v.to_string()));
    }
    let base = cover.base().clone();
    let us = cover_parts(cover)?;
    let s = nerve(cover)?;
    let trivial: Vec<Presheaf> = us
        .iter()
        .zip(&u.carriers)
        .map(|(ui, r)| Ok(product(&Presheaf::constant(r, base.clone()), ui)?.0))
        .collect::<Result<_>>()?;
    let named: Vec<(&str, &Presheaf)> = cover.index().iter().map(String::as_str).zip(&trivial).collect();
    let (sum, inj) = coproduct(base.clone(), &named)?;
    let mut pairs = Vec::new();
    for c in 0..s.s1.len() {
        let (i, j) = (s.src(c), s.tgt(c));
        for p in 0..base.len() {
            let (ni, nj) = (us[i].fiber_size(p), us[j].fiber_size(p));
            for a in 0..ni {
                for b in 0..nj {
                    let sig = &u.sigma[c][p][a * nj + b];
                    for y in 0..u.carriers[i].len() {
                        pairs.push((p, inj[i].apply(p, y * ni + a), inj[j].apply(p, sig.apply(y) * nj + b)));
                    }
                }
            }
        }
    }
    let (x, q) = quotient_by_pairs(&sum, &pairs)?;
    let mut local = Vec::new();
    let mut theta = Vec::new();
    for i in 0..us.len() {
        local.push(product(&x, &us[i])?.0);
        theta.push(PresheafMap::new(
            (0..base.len())
                .map(|p| {
                    let ni = us[i].fiber_size(p);
                    (0..trivial[i].fiber_size(p)).map(|e| q.apply(p, inj[i].apply(p, e)) * ni + e % ni).collect()
                })
                .collect(),
        ));
    }
    Ok(LocallyConstant { x, cover: cover.clone(), carriers: u.carriers.clone(), trivial, local, theta })
}

/// The `theta_i` are natural isomorphisms over `U_i` and the descent datum
/// they induce satisfies the identity and cocycle laws.
pub fn validate_trivialization(lc: &LocallyConstant) -> Vec<Violation> {
    let mut out = Vec::new();
    let us = match cover_parts(&lc.cover) {
        Ok(us) => us,
        Err(e) => return vec![Violation::new("cover", e.to_string())],
    };
    let n = us.len();
    if lc.theta.len() != n || lc.trivial.len() != n || lc.local.len() != n || lc.carriers.len() != n {
        out.push(Violation::new("shape", "one theta per cover component"));
        return out;
    }
    for i in 0..n {
        let name = &lc.cover.index()[i];
        let theta = &lc.theta[i];
        let bad = theta.check(&lc.trivial[i], &lc.local[i]);
        if !bad.is_empty() {
            out.extend(bad.into_iter().map(|v| Violation::new(format!("theta_{name} natural"), v.to_string())));
            continue;
        }
        if !theta.is_iso(&lc.trivial[i], &lc.local[i]) {
            out.push(Violation::new("theta iso", format!("theta_{name} is not an isomorphism")));
        }
        for p in 0..lc.x.base().len() {
            let ni = us[i].fiber_size(p);
            if ni == 0 {
                continue;
            }
            for e in 0..lc.trivial[i].fiber_size(p) {
                if theta.apply(p, e) % ni != e % ni {
                    out.push(Violation::new("theta over U_i", format!("theta_{name} moves {}", lc.trivial[i].label(p, e))));
                }
            }
        }
    }
    if out.is_empty() {
        match extract_unchecked(lc) {
            Ok(u) => {
                out.extend(validate_u_descent(&lc.cover, &u).into_iter().map(|v| Violation::new("theta/sigma square", v.to_string())))
            }
            Err(e) => out.push(Violation::new("theta/sigma square", e.to_string())),
        }
    }
    out
}

/// `sigma_{j,i} = (theta_j x U_i)^-1 . (X x tau) . (theta_i x U_j)`.
pub fn extract_descent(lc: &LocallyConstant) -> Result<UDescentDatum> {
    if let Some(v) = validate_trivialization(lc).first() {
        return Err(Error::Invalid(v.to_string()));
    }
    extract_unchecked(lc)
}

fn extract_unchecked(lc: &LocallyConstant) -> Result<UDescentDatum> {
    let us = cover_parts(&lc.cover)?;
    let s = nerve(&lc.cover)?;
    let np = lc.x.base().len();
    let mut sigma = Vec::new();
    for c in 0..s.s1.len() {
        let (i, j) = (s.src(c), s.tgt(c));
        let mut per_p = Vec::new();
        for p in 0..np {
            let (ni, nj) = (us[i].fiber_size(p), us[j].fiber_size(p));
            let mut bijs = Vec::new();
            for a in 0..ni {
                for b in 0..nj {
                    let images: Option<Vec<u32>> = (0..lc.carriers[i].len())
                        .map(|y| {
                            let xi = lc.theta[i].apply(p, y * ni + a) / ni;
                            (0..lc.carriers[j].len())
                                .find(|&y2| lc.theta[j].apply(p, y2 * nj + b) / nj == xi)
                                .map(|y2| y2 as u32)
                        })
                        .collect();
                    let bij = images.and_then(Bij::from_images).filter(|b| b.len() == lc.carriers[j].len());
                    bijs.push(bij.ok_or_else(|| {
                        Error::Invalid(format!("theta does not induce a bijection over {} at {}", s.s1[c], lc.x.base().label(p)))
                    })?);
                }
            }
            per_p.push(bijs);
        }
        sigma.push(per_p);
    }
    Ok(UDescentDatum { carriers: lc.carriers.clone(), sigma })
}

/// The bijection `s` with `sigma_{j,i}(y, u(z), v(z)) = (s(y), ..)` for every
/// element `z` of the vertex, if one exists.
pub fn action_span_test(cover: &Family, span: &Span1, u: &UDescentDatum) -> Result<Option<Bij>> {
    let us = cover_parts(cover)?;
    let s = nerve(cover)?;
    let [i, j] = span.feet;
    let Some(c) = pair_index(&s, i, j) else {
        return Ok(None);
    };
    let mut witness: Option<&Bij> = None;
    for (p, z) in span.vertex.elements() {
        let (a, b) = (span.left.apply(p, z), span.right.apply(p, z));
        let sig = &u.sigma[c][p][a * us[j].fiber_size(p) + b];
        match witness {
            Some(w) if w != sig => return Ok(None),
            _ => witness = Some(sig),
        }
    }
    Ok(witness.cloned())
}

/// The span `y(p) -> U_i x U_j` picking `(a, b)` at `p`.
fn representable_span(cover: &Family, us: &[Arc<Presheaf>], feet: [usize; 2], p: usize, a: usize, b: usize) -> Span1 {
    let base = cover.base().clone();
    let vertex = Arc::new(Presheaf::representable(base.clone(), p));
    let leg = |x: &Presheaf, e: usize| {
        PresheafMap::new((0..base.len()).map(|q| if base.leq(q, p) { vec![x.restrict(p, q, e)] } else { Vec::new() }).collect())
    };
    Span1 { vertex, feet, left: leg(&us[feet[0]], a), right: leg(&us[feet[1]], b) }
}

/// Every action span with a representable vertex, in nerve order.
pub fn representable_action_spans(cover: &Family, u: &UDescentDatum) -> Result<Vec<ActionSpan>> {
    let us = cover_parts(cover)?;
    let s = nerve(cover)?;
    let mut out = Vec::new();
    for c in 0..s.s1.len() {
        let (i, j) = (s.src(c), s.tgt(c));
        for p in 0..cover.base().len() {
            for a in 0..us[i].fiber_size(p) {
                for b in 0..us[j].fiber_size(p) {
                    let span = representable_span(cover, &us, [i, j], p, a, b);
                    if let Some(witness) = action_span_test(cover, &span, u)? {
                        out.push(ActionSpan { span, witness });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Whether the representable action spans cover every `U_i x U_j`.
pub fn is_covering_projection(cover: &Family, u: &UDescentDatum) -> Result<bool> {
    Ok(uncovered_pair(cover, u)?.is_none())
}

/// The first element of some `U_i x U_j` not reached by a representable
/// action span, if any.
pub fn uncovered_pair(cover: &Family, u: &UDescentDatum) -> Result<Option<String>> {
    if let Some(v) = validate_u_descent(cover, u).first() {
        return Err(Error::Invalid(v.to_string()));
    }
    let us = cover_parts(cover)?;
    let s = nerve(cover)?;
    let spans = representable_action_spans(cover, u)?;
    let base = cover.base();
    for c in 0..s.s1.len() {
        let (i, j) = (s.src(c), s.tgt(c));
        let mut hit: HashSet<(usize, usize, usize)> = HashSet::new();
        for a in spans.iter().filter(|a| a.span.feet == [i, j]) {
            for (p, z) in a.span.vertex.elements() {
                hit.insert((p, a.span.left.apply(p, z), a.span.right.apply(p, z)));
            }
        }
        for p in 0..base.len() {
            for a in 0..us[i].fiber_size(p) {
                for b in 0..us[j].fiber_size(p) {
                    if !hit.contains(&(p, a, b)) {
                        return Ok(Some(format!(
                            "({},{}) at {} is not reached by an action span",
                            us[i].label(p, a),
                            us[j].label(p, b),
                            base.label(p)
                        )));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Whether precomposing any member with a map between member vertices gives
/// a member with the same witness.
pub fn sieve_check(cspan: &[ActionSpan]) -> bool {
    let mut vertices: Vec<Arc<Presheaf>> = Vec::new();
    for a in cspan {
        if !vertices.iter().any(|v| **v == *a.span.vertex) {
            vertices.push(a.span.vertex.clone());
        }
    }
    cspan.iter().all(|a| {
        vertices.iter().all(|w| {
            hom_enumerate(w, &a.span.vertex).into_iter().all(|phi| {
                let left = phi.then(&a.span.left);
                let right = phi.then(&a.span.right);
                cspan.iter().any(|b| {
                    *b.span.vertex == **w
                        && b.span.feet == a.span.feet
                        && b.span.left == left
                        && b.span.right == right
                        && b.witness == a.witness
                })
            })
        })
    })
}

/// Output of the forward pipeline of the first comparison theorem.
#[derive(Debug, Clone)]
pub struct Main1 {
    pub refinement: SpanRefinement,
    pub s: SDescentDatum,
    /// `h_to_u(induced_h_from_s(s))`, to be compared with the input.
    pub recovered: UDescentDatum,
    /// Everything that went wrong on the way back; empty on success.
    pub residual: Vec<String>,
}

/// Builds the 1-span refinement of all representable action spans (plus the
/// identity spans of the components) and reads `s` off the witnesses.
pub fn main1_forward(cover: &Family, u: &UDescentDatum) -> Result<Main1> {
    if let Some(why) = uncovered_pair(cover, u)? {
        return Err(Error::NotCoveringProjection(why));
    }
    let us = cover_parts(cover)?;
    let mut class: Vec<Span1> = representable_action_spans(cover, u)?.into_iter().map(|a| a.span).collect();
    for (i, ui) in us.iter().enumerate() {
        let id = PresheafMap::identity(ui);
        class.push(Span1 { vertex: ui.clone(), feet: [i, i], left: id.clone(), right: id });
    }
    let refinement = one_span_refinement(cover, &SpanClassSp(class))?;
    let f = &refinement.family;
    let sset = f.sset();
    let mut s = Vec::new();
    for l in 0..sset.s1.len() {
        let span = f.family.span_of_1simplex(l)?;
        let w = action_span_test(cover, &span, u)?
            .ok_or_else(|| Error::Invalid(format!("1-simplex {} is not an action span", sset.s1[l])))?;
        s.push(w);
    }
    let s = SDescentDatum { carriers: u.carriers.clone(), s };
    let mut residual: Vec<String> = validate_selfdual(f).into_iter().map(|v| v.to_string()).collect();
    if !crate::family::condition_g(f) {
        residual.push("condition G fails on the refinement".into());
    }
    if !is_hypercover(&f.family, cover)? {
        residual.push("refinement is not a hypercover".into());
    }
    if !is_consistent(&s, &f.family) {
        residual.push("s-datum is not consistent".into());
    }
    let h = induced_h_from_s(&s, &f.family)?;
    let recovered = Transfer::new(&f.family, cover)?.h_to_u(&f.family, &h)?;
    if recovered != *u {
        residual.push("h_to_u(induced_h_from_s(s)) differs from the input datum".into());
    }
    Ok(Main1 { refinement, s, recovered, residual })
}

/// Counts and round-trip results of the second comparison theorem.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Main2Report {
    pub bound: usize,
    pub projection_objects: usize,
    pub action_objects: usize,
    pub projection_homs: usize,
    pub action_homs: usize,
    pub objects_round_trip: bool,
    pub homs_round_trip: bool,
    pub residual: Vec<String>,
}

impl Main2Report {
    pub fn holds(&self) -> bool {
        self.projection_objects == self.action_objects
            && self.projection_homs == self.action_homs
            && self.objects_round_trip
            && self.homs_round_trip
            && self.residual.is_empty()
    }
}

/// Carrier maps commuting with every `s_l`.
fn datum_homs(s: &TruncSSet, d: &SDescentDatum, d2: &SDescentDatum) -> Vec<CarrierMap> {
    all_carrier_maps(&d.carriers, &d2.carriers)
        .into_iter()
        .filter(|m| {
            (0..s.s1.len()).all(|l| (0..d.carriers[s.src(l)].len()).all(|y| m[s.tgt(l)][d.s[l].apply(y)] == d2.s[l].apply(m[s.src(l)][y])))
        })
        .collect()
}

/// Compares trivialized covering projections with consistent data against
/// actions of the G-fundamental groupoid, on carriers of size at most `bound`.
pub fn main2_equivalence(cover: &Family, f: &SelfDualFamily, bound: usize) -> Result<Main2Report> {
    let p = g_fundamental_presentation(f)?;
    if !is_hypercover(&f.family, cover)? {
        return Err(Error::Invalid("family is not a hypercover of the cover".into()));
    }
    let s = f.sset();
    let transfer = Transfer::new(&f.family, cover)?;
    let mut residual = Vec::new();
    let data: Vec<SDescentDatum> = enumerate_s_descent(s, bound).into_iter().filter(|d| is_consistent(d, &f.family)).collect();
    for d in &data {
        let u = transfer.h_to_u(&f.family, &induced_h_from_s(d, &f.family)?)?;
        if !is_covering_projection(cover, &u)? {
            residual.push(format!("datum on carriers {:?} does not glue to a covering projection", d.carriers));
        }
        let lc = glue(cover, &u)?;
        if extract_descent(&lc)? != u {
            residual.push("glue/extract round trip fails".into());
        }
    }
    let actions = enumerate_actions(&p, bound);
    let forward: Vec<GroupoidAction> = data.iter().map(|d| consistent_to_g_action(d, f)).collect::<Result<_>>()?;
    let action_set: HashSet<&GroupoidAction> = actions.iter().collect();
    let forward_set: HashSet<&GroupoidAction> = forward.iter().collect();
    let back: Vec<SDescentDatum> = actions.iter().map(|a| g_action_to_s(a, f)).collect::<Result<_>>()?;
    let objects_round_trip = action_set == forward_set
        && forward_set.len() == forward.len()
        && back.iter().zip(&actions).all(|(d, a)| consistent_to_g_action(d, f).as_ref() == Ok(a))
        && forward.iter().zip(&data).all(|(a, d)| g_action_to_s(a, f).as_ref() == Ok(d));
    let mut projection_homs = 0;
    let mut homs_round_trip = true;
    for (d, a) in data.iter().zip(&forward) {
        for (d2, a2) in data.iter().zip(&forward) {
            let hs = datum_homs(s, d, d2);
            projection_homs += hs.len();
            // Both functors are the identity on carrier maps.
            let hs2: HashSet<CarrierMap> = equivariant_maps(&p, a, a2).into_iter().collect();
            homs_round_trip &= hs.len() == hs2.len() && hs.iter().all(|m| hs2.contains(m));
        }
    }
    let action_homs_total: usize = actions.iter().map(|a| actions.iter().map(|b| equivariant_maps(&p, a, b).len()).sum::<usize>()).sum();
    Ok(Main2Report {
        bound,
        projection_objects: data.len(),
        action_objects: actions.len(),
        projection_homs,
        action_homs: action_homs_total,
        objects_round_trip,
        homs_round_trip,
        residual,
    })
}

/// Whether two glued objects agree up to isomorphism of `X`.
pub fn same_glued_object(a: &LocallyConstant, b: &LocallyConstant) -> bool {
    is_isomorphic(&a.x, &b.x)
}
