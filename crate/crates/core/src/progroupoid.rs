//! G-fundamental groupoids of a finite diagram of hypercovers, the
//! transition functors induced by refinements, strictness of transitions and
//! the classifying category of bounded actions.

use std::collections::{HashMap, HashSet};
use std::ops::ControlFlow;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result, Violation};
use crate::family::condition_g_failure;
use crate::fintopos::{find_iso, hom_search, Family, Presheaf, PresheafMap};
use crate::groupoid::{
    enumerate_actions, equivariant_maps, g_fundamental_presentation, CarrierMap, GroupoidAction, GroupoidPresentation,
    Letter, Verdict, Word, WordBudget, WordSolver,
};
use crate::hypercover::{is_hypercover, SpanKey, SpanRefinement, TwoSpanKey};
use crate::simplicial::SimplicialMap;

/// A map of covers: an index map and component maps `U'_i -> U_{m(i)}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverMap {
    pub index: Vec<usize>,
    pub maps: Vec<PresheafMap>,
}

impl CoverMap {
    /// Picks, for each component, the first injective map into its image
    /// component.
    pub fn injective(src: &Family, tgt: &Family, index: Vec<usize>) -> Result<Self> {
        let us: Vec<Arc<Presheaf>> = src.components()?.into_iter().map(|c| c.presheaf).collect();
        let vs: Vec<Arc<Presheaf>> = tgt.components()?.into_iter().map(|c| c.presheaf).collect();
        if index.len() != us.len() || index.iter().any(|&m| m >= vs.len()) {
            return Err(Error::Malformed("cover index map has the wrong shape".into()));
        }
        let mut maps = Vec::new();
        for (i, &m) in index.iter().enumerate() {
            let mut found = None;
            let _ = hom_search(&us[i], &vs[m], true, |_, _, _| true, |f| {
                found = Some(f.clone());
                ControlFlow::Break(())
            });
            maps.push(found.ok_or_else(|| {
                Error::Invalid(format!("no injective map {} -> {}", src.index()[i], tgt.index()[m]))
            })?);
        }
        Ok(CoverMap { index, maps })
    }
}

#[derive(Debug, Clone)]
pub struct HypercoverNode {
    pub label: String,
    pub cover: Family,
    pub refinement: SpanRefinement,
}

/// A refinement `from -> to` between nodes, given on covers.
#[derive(Debug, Clone)]
pub struct IndexEdge {
    pub from: usize,
    pub to: usize,
    pub cover_map: CoverMap,
}

#[derive(Debug, Clone, Default)]
pub struct HypercoverIndex {
    pub nodes: Vec<HypercoverNode>,
    pub edges: Vec<IndexEdge>,
}

/// A morphism of span refinements over a map of covers: `alpha` on the index
/// and component isomorphisms `(H'_n)_w -> (H_n)_{alpha w}`.
#[derive(Debug, Clone)]
pub struct RefinementMap {
    pub alpha: SimplicialMap,
    pub h1: Vec<PresheafMap>,
    pub h2: Vec<PresheafMap>,
    /// Simplicial identities `alpha` fails; nonempty only when some
    /// component map is not an isomorphism.
    pub violations: Vec<Violation>,
}

/// Transports every span of `src` along the cover map and finds it among the
/// spans of `tgt`, up to isomorphism of vertices.
pub fn induced_refinement(src: &SpanRefinement, tgt: &SpanRefinement, m: &CoverMap) -> Result<RefinementMap> {
    let index1: HashMap<&SpanKey, usize> = tgt.spans1.iter().enumerate().map(|(k, s)| (s, k)).collect();
    let index2: HashMap<&TwoSpanKey, usize> = tgt.spans2.iter().enumerate().map(|(k, s)| (s, k)).collect();
    // Each source vertex: a target representative and an iso `V_t -> V_s`,
    // preferring the image of a cover component, then an equal vertex.
    let mut rep: Vec<(usize, PresheafMap)> = Vec::new();
    for (k, v) in src.vertices.iter().enumerate() {
        let via_cover = src.cover_vertex.iter().enumerate().find_map(|(i, &cv)| {
            let t = tgt.cover_vertex[m.index[i]];
            (cv == k && m.maps[i].is_iso(v, &tgt.vertices[t])).then(|| (t, m.maps[i].inverse()))
        });
        let found = via_cover
            .or_else(|| tgt.vertices.iter().position(|t| **t == **v).map(|r| (r, PresheafMap::identity(v))))
            .or_else(|| tgt.vertices.iter().enumerate().find_map(|(r, t)| find_iso(t, v).map(|phi| (r, phi))));
        rep.push(found.ok_or_else(|| Error::Invalid("a source vertex has no counterpart among the target vertices".into()))?);
    }
    let mut h1_alpha = Vec::new();
    let mut h1 = Vec::new();
    for k in &src.spans1 {
        let (r, psi) = &rep[k.vertex];
        let key = SpanKey {
            feet: [m.index[k.feet[0]], m.index[k.feet[1]]],
            vertex: *r,
            left: psi.then(&k.left).then(&m.maps[k.feet[0]]),
            right: psi.then(&k.right).then(&m.maps[k.feet[1]]),
        };
        let t = index1.get(&key).ok_or_else(|| Error::Invalid("a transported span is missing from the target".into()))?;
        h1_alpha.push(*t);
        h1.push(psi.inverse());
    }
    let mut h2_alpha = Vec::new();
    let mut h2 = Vec::new();
    for w in &src.spans2 {
        let (r, phi) = &rep[w.apex];
        let legs = [0, 1, 2].map(|e| phi.then(&w.legs[e]).then(&h1[w.edges[e]]));
        let key = TwoSpanKey { apex: *r, edges: w.edges.map(|e| h1_alpha[e]), legs };
        let t = index2.get(&key).ok_or_else(|| Error::Invalid("a transported 2-span is missing from the target".into()))?;
        h2_alpha.push(*t);
        h2.push(phi.inverse());
    }
    let alpha = SimplicialMap { h0: m.index.clone(), h1: h1_alpha, h2: h2_alpha };
    let violations = alpha.check(src.family.sset(), tgt.family.sset());
    Ok(RefinementMap { alpha, h1, h2, violations })
}

/// Object and generator images of a functor between presentations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FunctorData {
    pub object_map: Vec<usize>,
    pub generator_map: Vec<Word>,
}

impl FunctorData {
    pub fn map_word(&self, w: &Word) -> Word {
        let mut letters = Vec::new();
        for l in &w.letters {
            let img = &self.generator_map[l.gen].letters;
            if l.inverse {
                letters.extend(img.iter().rev().map(|x| x.inv()));
            } else {
                letters.extend(img.iter().copied());
            }
        }
        Word { base: self.object_map[w.base], letters }
    }
}

/// The functor `alpha_0, alpha_1`, after certifying every relation and
/// identity of the source in the target.
pub fn transition_functor(
    src: &GroupoidPresentation,
    tgt: &GroupoidPresentation,
    alpha: &SimplicialMap,
    budget: WordBudget,
) -> Result<FunctorData> {
    let fd = FunctorData {
        object_map: alpha.h0.clone(),
        generator_map: (0..src.generators.len()).map(|g| Word::path(alpha.h0[src.generators[g].src], &[alpha.h1[g]])).collect(),
    };
    for (g, gen) in src.generators.iter().enumerate() {
        let img = &tgt.generators[alpha.h1[g]];
        if img.src != alpha.h0[gen.src] || img.tgt != alpha.h0[gen.tgt] {
            return Err(Error::Invalid(format!("generator {} is sent across the wrong objects", gen.label)));
        }
    }
    let solver = WordSolver::new(tgt, budget);
    let mut pairs: Vec<(Word, Word, String)> = src
        .relations
        .iter()
        .map(|r| (r.lhs.clone(), r.rhs.clone(), format!("{} ~ {}", src.word_label(&r.lhs), src.word_label(&r.rhs))))
        .collect();
    for (o, id) in src.identities.iter().enumerate() {
        if let Some(g) = id {
            pairs.push((Word::path(o, &[*g]), Word::empty(o), format!("{} ~ id", src.generators[*g].label)));
        }
    }
    let mut seen = HashSet::new();
    for (lhs, rhs, what) in pairs {
        let (a, b) = (fd.map_word(&lhs), fd.map_word(&rhs));
        if !seen.insert((solver.normal_form(&a), solver.normal_form(&b))) {
            continue;
        }
        match solver.equal(&a, &b)? {
            Verdict::Equal => {}
            Verdict::Distinct(_) => return Err(Error::RelationNotPreserved(format!("{what} (distinct in the target)"))),
            Verdict::Unknown => return Err(Error::RelationNotPreserved(format!("{what} (budget exhausted)"))),
        }
    }
    Ok(fd)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Strictness {
    Strict,
    NotStrict { reason: String, witness: String },
    Undetermined { witness: String },
}

impl Strictness {
    pub fn is_strict(&self) -> bool {
        *self == Strictness::Strict
    }
}

/// Surjectivity on objects, on generators up to equality, and on triangles:
/// every 2-simplex of the target lifts to one of the source whose faces map
/// to words equal to its faces.
pub fn is_strict(
    fd: &FunctorData,
    src: &GroupoidPresentation,
    tgt: &GroupoidPresentation,
    triangles: (&[[usize; 3]], &[[usize; 3]]),
    budget: WordBudget,
) -> Result<Strictness> {
    let hit: HashSet<usize> = fd.object_map.iter().copied().collect();
    if let Some(o) = (0..tgt.objects.len()).find(|o| !hit.contains(o)) {
        return Ok(Strictness::NotStrict { reason: "object not in the image".into(), witness: tgt.objects[o].clone() });
    }
    let solver = WordSolver::new(tgt, budget);
    let nf = |w: &Word| (w.base, solver.normal_form(w));
    // Images of source generators, their inverses and composable pairs.
    let mut images: Vec<Word> = Vec::new();
    for img in &fd.generator_map {
        images.push(img.clone());
        images.push(img.inverse(tgt)?);
    }
    let singles = images.clone();
    for a in &singles {
        let end = tgt.target(a)?;
        for b in singles.iter().filter(|b| b.base == end) {
            images.push(Word { base: a.base, letters: a.letters.iter().chain(&b.letters).copied().collect() });
        }
    }
    let image_nf: HashSet<(usize, Vec<Letter>)> = images.iter().map(&nf).collect();
    let mut undetermined = None;
    for (g, gen) in tgt.generators.iter().enumerate() {
        let w = Word::path(gen.src, &[g]);
        let n = nf(&w);
        if n.1.is_empty() || image_nf.contains(&n) {
            continue;
        }
        let mut verdict = None;
        for cand in images.iter().filter(|c| c.base == gen.src && tgt.target(c).ok() == Some(gen.tgt)) {
            match solver.equal(&w, cand)? {
                Verdict::Equal => {
                    verdict = Some(true);
                    break;
                }
                Verdict::Unknown => verdict = verdict.or(Some(false)),
                Verdict::Distinct(_) => {}
            }
        }
        match verdict {
            Some(true) => {}
            Some(false) => undetermined = undetermined.or(Some(gen.label.clone())),
            None => return Ok(Strictness::NotStrict { reason: "generator not in the image".into(), witness: gen.label.clone() }),
        }
    }
    let (src_tri, tgt_tri) = triangles;
    let face = |p: &GroupoidPresentation, e: usize| Word::path(p.generators[e].src, &[e]);
    let lifted: HashSet<[(usize, Vec<Letter>); 3]> = src_tri
        .iter()
        .map(|faces| faces.map(|e| nf(&fd.map_word(&face(src, e)))))
        .collect();
    for (w, faces) in tgt_tri.iter().enumerate() {
        let key = faces.map(|e| nf(&face(tgt, e)));
        if lifted.contains(&key) {
            continue;
        }
        let mut verdict = None;
        for sf in src_tri {
            let mut all = Some(true);
            for k in 0..3 {
                let (a, b) = (fd.map_word(&face(src, sf[k])), face(tgt, faces[k]));
                if a.base != b.base || tgt.target(&a)? != tgt.target(&b)? {
                    all = None;
                    break;
                }
                match solver.equal(&a, &b)? {
                    Verdict::Equal => {}
                    Verdict::Unknown => all = all.and(Some(false)),
                    Verdict::Distinct(_) => {
                        all = None;
                        break;
                    }
                }
            }
            match all {
                Some(true) => {
                    verdict = Some(true);
                    break;
                }
                Some(false) => verdict = verdict.or(Some(false)),
                None => {}
            }
        }
        let label = format!("2-simplex {w}");
        match verdict {
            Some(true) => {}
            Some(false) => undetermined = undetermined.or(Some(label)),
            None => return Ok(Strictness::NotStrict { reason: "triangle does not lift".into(), witness: label }),
        }
    }
    Ok(match undetermined {
        Some(witness) => Strictness::Undetermined { witness },
        None => Strictness::Strict,
    })
}

/// Finite actions of a presentation with carriers of size at most `bound`
/// and the equivariant maps between them.
#[derive(Debug, Clone, Serialize)]
pub struct ClassifyingCategory {
    pub objects: Vec<GroupoidAction>,
    /// `homs[a][b]`: equivariant maps from object `a` to object `b`.
    pub homs: Vec<Vec<Vec<CarrierMap>>>,
}

impl ClassifyingCategory {
    pub fn hom_count(&self) -> usize {
        self.homs.iter().flatten().map(Vec::len).sum()
    }

    /// Identities exist and composites of morphisms are morphisms.
    pub fn verify(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.objects.len();
        for a in 0..n {
            let id: CarrierMap = self.objects[a].carriers.iter().map(|r| (0..r.len()).collect()).collect();
            if !self.homs[a][a].contains(&id) {
                out.push(Violation::new("identity", format!("object {a}")));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for f in &self.homs[a][b] {
                        for g in &self.homs[b][c] {
                            let gf: CarrierMap = f.iter().zip(g).map(|(fo, go)| fo.iter().map(|&x| go[x]).collect()).collect();
                            if !self.homs[a][c].contains(&gf) {
                                out.push(Violation::new("composition", format!("objects {a} -> {b} -> {c}")));
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

pub fn classifying_category(p: &GroupoidPresentation, bound: usize) -> ClassifyingCategory {
    let objects = enumerate_actions(p, bound);
    let homs = objects.iter().map(|a| objects.iter().map(|b| equivariant_maps(p, a, b)).collect()).collect();
    ClassifyingCategory { objects, homs }
}

#[derive(Debug, Clone)]
pub struct ProGroupoid {
    pub groupoids: Vec<GroupoidPresentation>,
    pub transitions: Vec<FunctorData>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransitionReport {
    pub from: String,
    pub to: String,
    pub verdict: Strictness,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StrictnessReport {
    pub nodes: Vec<String>,
    pub transitions: Vec<TransitionReport>,
}

impl StrictnessReport {
    pub fn all_strict(&self) -> bool {
        self.transitions.iter().all(|t| t.verdict.is_strict())
    }
}

/// Groupoids per node, transition functors per edge and the strictness of
/// each transition.
pub fn assemble(index: &HypercoverIndex, budget: WordBudget) -> Result<(ProGroupoid, StrictnessReport)> {
    let mut groupoids = Vec::new();
    for node in &index.nodes {
        let f = &node.refinement.family;
        if let Some(l) = condition_g_failure(f) {
            return Err(Error::ConditionG(format!("{} in node {}", f.sset().s1[l], node.label)));
        }
        if !is_hypercover(&f.family, &node.cover)? {
            return Err(Error::Invalid(format!("node {} is not a hypercover", node.label)));
        }
        groupoids.push(g_fundamental_presentation(f)?);
    }
    let mut transitions = Vec::new();
    let mut reports = Vec::new();
    for e in &index.edges {
        let (a, b) = (&index.nodes[e.from], &index.nodes[e.to]);
        let rm = induced_refinement(&a.refinement, &b.refinement, &e.cover_map)?;
        let fd = transition_functor(&groupoids[e.from], &groupoids[e.to], &rm.alpha, budget)?;
        let verdict = is_strict(
            &fd,
            &groupoids[e.from],
            &groupoids[e.to],
            (&a.refinement.family.sset().faces2, &b.refinement.family.sset().faces2),
            budget,
        )?;
        reports.push(TransitionReport { from: a.label.clone(), to: b.label.clone(), verdict });
        transitions.push(fd);
    }
    let report = StrictnessReport { nodes: index.nodes.iter().map(|n| n.label.clone()).collect(), transitions: reports };
    Ok((ProGroupoid { groupoids, transitions }, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{full_nerve_cover, split_cover};
    use crate::groupoid::Generator;
    use crate::hypercover::connected_refinement;

    fn node(label: &str, cover: Family) -> HypercoverNode {
        let refinement = connected_refinement(&cover, 2).unwrap();
        HypercoverNode { label: label.into(), cover, refinement }
    }

    #[test]
    fn identity_transition_is_strict() {
        let n = node("full", full_nerve_cover());
        let m = CoverMap::injective(&n.cover, &n.cover, vec![0, 1]).unwrap();
        let rm = induced_refinement(&n.refinement, &n.refinement, &m).unwrap();
        assert!(rm.violations.is_empty());
        assert_eq!(rm.alpha, SimplicialMap::identity(n.refinement.family.sset()));
        let index = HypercoverIndex { nodes: vec![n], edges: vec![IndexEdge { from: 0, to: 0, cover_map: m }] };
        let (_, report) = assemble(&index, WordBudget::default()).unwrap();
        assert!(report.all_strict());
    }

    #[test]
    fn split_to_full_is_strict() {
        let a = node("split", split_cover());
        let b = node("full", full_nerve_cover());
        let m = CoverMap::injective(&a.cover, &b.cover, vec![0, 1, 1]).unwrap();
        let rm = induced_refinement(&a.refinement, &b.refinement, &m).unwrap();
        assert!(rm.violations.is_empty(), "{:?}", rm.violations);
        let index = HypercoverIndex { nodes: vec![a, b], edges: vec![IndexEdge { from: 0, to: 1, cover_map: m }] };
        let (pg, report) = assemble(&index, WordBudget::default()).unwrap();
        assert_eq!(pg.groupoids.len(), 2);
        assert!(report.all_strict(), "{report:?}");
    }

    #[test]
    fn missing_object_is_not_strict() {
        let p = GroupoidPresentation {
            objects: vec!["1".into()],
            generators: Vec::new(),
            relations: Vec::new(),
            identities: vec![None],
        };
        let q = GroupoidPresentation { objects: vec!["1".into(), "2".into()], identities: vec![None, None], ..p.clone() };
        let fd = FunctorData { object_map: vec![0], generator_map: Vec::new() };
        let v = is_strict(&fd, &p, &q, (&[], &[]), WordBudget::default()).unwrap();
        assert_eq!(v, Strictness::NotStrict { reason: "object not in the image".into(), witness: "2".into() });
    }

    #[test]
    fn generator_outside_the_image() {
        let p = GroupoidPresentation { objects: vec!["1".into()], generators: Vec::new(), relations: Vec::new(), identities: vec![None] };
        let q = GroupoidPresentation {
            generators: vec![Generator { label: "g".into(), src: 0, tgt: 0 }],
            ..p.clone()
        };
        let fd = FunctorData { object_map: vec![0], generator_map: Vec::new() };
        let v = is_strict(&fd, &p, &q, (&[], &[]), WordBudget::default()).unwrap();
        assert!(matches!(v, Strictness::NotStrict { .. }), "{v:?}");
    }

    #[test]
    fn classifying_categories() {
        let trivial = GroupoidPresentation { objects: vec!["1".into()], generators: Vec::new(), relations: Vec::new(), identities: vec![None] };
        let c = classifying_category(&trivial, 2);
        assert_eq!(c.objects.len(), 3);
        // Functions between sets of sizes 0, 1, 2.
        assert_eq!(c.hom_count(), 1 + 1 + 1 + 0 + 1 + 2 + 0 + 1 + 4);
        assert!(c.verify().is_empty());
        let full = crate::groupoid::fundamental_presentation(&crate::simplicial::CechNerve::of(&full_nerve_cover()).unwrap().sset);
        let d = classifying_category(&full, 2);
        // The indiscrete groupoid on two objects is equivalent to the point:
        // objects are sets of size 0, 1, 2 (two actions on size 2, isomorphic).
        assert!(d.verify().is_empty());
        assert_eq!(d.objects.len(), 4);
        assert!(d.objects.iter().any(|a| a.sizes() == vec![0, 0]));
    }
}
