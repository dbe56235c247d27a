//! Coskeleton data, the indexed-hypercover test, and the span refinements of
//! a cover: 0-span refinements over a class of vertex objects and 1-span
//! refinements over a class of spans.

use std::collections::{BTreeSet, HashMap};
use std::ops::ControlFlow;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{assemble, ComponentData, SelfDualFamily, SimplicialFamily, Span1};
use crate::fintopos::{
    connected_components, find_iso, hom_enumerate, hom_find, hom_search, is_connected, is_isomorphic, product_n,
    Family, Presheaf, PresheafMap,
};
use crate::simplicial::{CechNerve, StrictDuality, TruncSSet};

/// The limits of the level-1 and level-2 coskeleta.
#[derive(Debug, Clone)]
pub struct CoskData {
    /// Pairs `(i, j)` of the nerve of the level-0 family.
    pub pairs: Vec<[usize; 2]>,
    /// `P_ij = (H_0)_i x (H_0)_j`, laid out as in [`product_n`].
    pub p: Vec<Arc<Presheaf>>,
    /// Composable boundaries `(l, t, r)` with `P_ltr` non-initial.
    pub t2: Vec<[usize; 3]>,
    /// `P_ltr` as a sub-presheaf of `(H_1)_l x (H_1)_t x (H_1)_r`.
    pub pt: Vec<Arc<Presheaf>>,
    /// Canonical maps `(H_1)_l -> P_ij`, with the index of the pair.
    pub h1_maps: Vec<(usize, PresheafMap)>,
    /// Canonical maps `(H_2)_w -> P_ltr`, with the index of the boundary.
    pub h2_maps: Vec<(usize, PresheafMap)>,
}

/// Builds the coskeleton limits of a simplicial family.
pub fn cosk_data(f: &SimplicialFamily) -> Result<CoskData> {
    let s = f.sset();
    let np = f.base().len();
    let level0 = f.level0_family()?;
    let nerve = CechNerve::of(&level0)?;
    let h0 = |i: usize| f.component(0, i);
    let mut p = Vec::new();
    for &[i, j] in &nerve.pairs {
        p.push(Arc::new(product_n(&[&**h0(i), &**h0(j)])?.0));
    }
    let mut h1_maps = Vec::new();
    for l in 0..s.s1.len() {
        let (i, j) = (s.src(l), s.tgt(l));
        let k = nerve.pair(i, j).ok_or_else(|| Error::Invalid(format!("1-simplex {} over an empty product", s.s1[l])))?;
        let left = f.face1_component(l, 1);
        let right = f.face1_component(l, 0);
        let m = PresheafMap::new(
            (0..np)
                .map(|q| {
                    let nj = h0(j).fiber_size(q);
                    left.component(q).iter().zip(right.component(q)).map(|(&a, &b)| a * nj + b).collect()
                })
                .collect(),
        );
        h1_maps.push((k, m));
    }
    // Boundaries are enumerated by endpoint, l: i -> j, t: i -> k, r: j -> k.
    let mut out_of: HashMap<usize, Vec<usize>> = HashMap::new();
    for l in 0..s.s1.len() {
        out_of.entry(s.src(l)).or_default().push(l);
    }
    let mut t2 = Vec::new();
    let mut pt = Vec::new();
    let mut t2_index: HashMap<[usize; 3], usize> = HashMap::new();
    let empty = Vec::new();
    for l in 0..s.s1.len() {
        let (i, j) = (s.src(l), s.tgt(l));
        for &t in out_of.get(&i).unwrap_or(&empty) {
            let k = s.tgt(t);
            for &r in out_of.get(&j).unwrap_or(&empty) {
                if s.tgt(r) != k {
                    continue;
                }
                let lim = boundary_limit(f, l, t, r)?;
                if !lim.is_initial() {
                    t2_index.insert([l, t, r], t2.len());
                    t2.push([l, t, r]);
                    pt.push(Arc::new(lim));
                }
            }
        }
    }
    let mut h2_maps = Vec::new();
    for w in 0..s.s2.len() {
        let [r, t, l] = s.faces2[w];
        let k = *t2_index
            .get(&[l, t, r])
            .ok_or_else(|| Error::Invalid(format!("2-simplex {} over an empty boundary", s.s2[w])))?;
        let (dl, dt, dr) = (f.face2_component(w, 2), f.face2_component(w, 1), f.face2_component(w, 0));
        let lim = &pt[k];
        let m = PresheafMap::new(
            (0..np)
                .map(|q| {
                    (0..f.component(2, w).fiber_size(q))
                        .map(|e| {
                            let label = tuple_label(f, q, [l, t, r], [dl.apply(q, e), dt.apply(q, e), dr.apply(q, e)]);
                            lim.element_index(q, &label).expect("a 2-simplex lies over its boundary")
                        })
                        .collect()
                })
                .collect(),
        );
        h2_maps.push((k, m));
    }
    Ok(CoskData { pairs: nerve.pairs.clone(), p, t2, pt, h1_maps, h2_maps })
}

fn tuple_label(f: &SimplicialFamily, q: usize, edges: [usize; 3], local: [usize; 3]) -> String {
    let parts: Vec<&str> = (0..3).map(|k| f.component(1, edges[k]).label(q, local[k])).collect();
    format!("({})", parts.join(","))
}

/// `P_ltr`: triples agreeing on the shared vertices.
fn boundary_limit(f: &SimplicialFamily, l: usize, t: usize, r: usize) -> Result<Presheaf> {
    let (hl, ht, hr) = (f.component(1, l), f.component(1, t), f.component(1, r));
    let (prod, proj) = product_n(&[&**hl, &**ht, &**hr])?;
    let d = |e: usize, i: usize| f.face1_component(e, i);
    let (l1, l0, t1, t0, r1, r0) = (d(l, 1), d(l, 0), d(t, 1), d(t, 0), d(r, 1), d(r, 0));
    let keep: Vec<Vec<bool>> = (0..f.base().len())
        .map(|q| {
            (0..prod.fiber_size(q))
                .map(|e| {
                    let (a, b, c) = (proj[0].apply(q, e), proj[1].apply(q, e), proj[2].apply(q, e));
                    l1.apply(q, a) == t1.apply(q, b) && l0.apply(q, a) == r1.apply(q, c) && t0.apply(q, b) == r0.apply(q, c)
                })
                .collect()
        })
        .collect();
    Ok(prod.sub(&keep)?.0)
}

/// Elements of a coskeleton limit not reached by the canonical maps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Uncovered {
    /// Label of the pair `(i,j)` or boundary `(l,t,r)`.
    pub over: String,
    pub point: String,
    pub element: String,
}

/// Coverage tables of the hypercover test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HypercoverReport {
    pub holds: bool,
    pub pairs: usize,
    pub boundaries: usize,
    pub uncovered_pairs: Vec<Uncovered>,
    pub uncovered_boundaries: Vec<Uncovered>,
}

fn uncovered(targets: &[Arc<Presheaf>], maps: &[(usize, PresheafMap)], name: impl Fn(usize) -> String) -> Vec<Uncovered> {
    let mut hit: Vec<Vec<Vec<bool>>> =
        targets.iter().map(|t| (0..t.base().len()).map(|q| vec![false; t.fiber_size(q)]).collect()).collect();
    for (k, m) in maps {
        for (q, comp) in m.components().iter().enumerate() {
            for &e in comp {
                hit[*k][q][e] = true;
            }
        }
    }
    let mut out = Vec::new();
    for (k, t) in targets.iter().enumerate() {
        for q in 0..t.base().len() {
            for e in 0..t.fiber_size(q) {
                if !hit[k][q][e] {
                    out.push(Uncovered { over: name(k), point: t.base().label(q).to_string(), element: t.label(q, e).to_string() });
                }
            }
        }
    }
    out
}

/// Whether `f` is an indexed hypercover of `cover` at levels 1 and 2, with
/// the uncovered elements of every coskeleton limit.
pub fn hypercover_report(f: &SimplicialFamily, cover: &Family) -> Result<HypercoverReport> {
    let comps = cover.components()?;
    let s = f.sset();
    if s.s0.len() != comps.len()
        || (0..comps.len()).any(|i| !is_isomorphic(&comps[i].presheaf, f.component(0, i)))
    {
        return Err(Error::Invalid("level 0 of the family is not the cover".into()));
    }
    let c = cosk_data(f)?;
    let label_of = |k: usize| s.s1[k].clone();
    let up = uncovered(&c.p, &c.h1_maps, |k| format!("({},{})", s.s0[c.pairs[k][0]], s.s0[c.pairs[k][1]]));
    let ub = uncovered(&c.pt, &c.h2_maps, |k| {
        let [l, t, r] = c.t2[k];
        format!("({},{},{})", label_of(l), label_of(t), label_of(r))
    });
    Ok(HypercoverReport {
        holds: up.is_empty() && ub.is_empty(),
        pairs: c.pairs.len(),
        boundaries: c.t2.len(),
        uncovered_pairs: up,
        uncovered_boundaries: ub,
    })
}

pub fn is_hypercover(f: &SimplicialFamily, cover: &Family) -> Result<bool> {
    Ok(hypercover_report(f, cover)?.holds)
}

/// A class of vertex objects, given by representatives.
#[derive(Debug, Clone, Default)]
pub struct SpanClass(pub Vec<Arc<Presheaf>>);

/// A class of 1-spans over the cover, given by representatives.
#[derive(Debug, Clone, Default)]
pub struct SpanClassSp(pub Vec<Span1>);

/// A 1-simplex of a span refinement: a vertex (index into
/// [`SpanRefinement::vertices`]) with legs into `U_i` and `U_j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SpanKey {
    pub feet: [usize; 2],
    pub vertex: usize,
    pub left: PresheafMap,
    pub right: PresheafMap,
}

impl SpanKey {
    pub fn dual(&self) -> SpanKey {
        SpanKey { feet: [self.feet[1], self.feet[0]], vertex: self.vertex, left: self.right.clone(), right: self.left.clone() }
    }
}

/// A 2-simplex of a span refinement: an apex with legs into the vertices of
/// its faces `[d0, d1, d2]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct TwoSpanKey {
    pub apex: usize,
    pub edges: [usize; 3],
    pub legs: [PresheafMap; 3],
}

/// A span refinement with the span data behind its simplices.
#[derive(Debug, Clone)]
pub struct SpanRefinement {
    pub family: SelfDualFamily,
    pub vertices: Vec<Arc<Presheaf>>,
    /// The vertex standing for each `U_i`.
    pub cover_vertex: Vec<usize>,
    pub spans1: Vec<SpanKey>,
    pub spans2: Vec<TwoSpanKey>,
}

struct HomCache<'a> {
    vertices: &'a [Arc<Presheaf>],
    homs: HashMap<(usize, usize), Arc<Vec<PresheafMap>>>,
}

impl<'a> HomCache<'a> {
    fn new(vertices: &'a [Arc<Presheaf>]) -> Self {
        HomCache { vertices, homs: HashMap::new() }
    }

    fn get(&mut self, a: usize, b: usize) -> Arc<Vec<PresheafMap>> {
        let vs = self.vertices;
        self.homs.entry((a, b)).or_insert_with(|| Arc::new(hom_enumerate(&vs[a], &vs[b]))).clone()
    }
}

/// Vertex representatives: the cover components first (deduplicated
/// literally), then class members not isomorphic to an earlier entry.
fn vertex_list(comps: &[Arc<Presheaf>], class: &[Arc<Presheaf>]) -> Result<(Vec<Arc<Presheaf>>, Vec<usize>)> {
    let mut vertices: Vec<Arc<Presheaf>> = Vec::new();
    let mut cover_vertex = Vec::new();
    for u in comps {
        match vertices.iter().position(|v| **v == **u) {
            Some(k) => cover_vertex.push(k),
            None => {
                cover_vertex.push(vertices.len());
                vertices.push(u.clone());
            }
        }
    }
    for c in class {
        if c.is_initial() {
            return Err(Error::Malformed("span class member is initial".into()));
        }
        if !vertices.iter().any(|v| is_isomorphic(v, c)) {
            vertices.push(c.clone());
        }
    }
    Ok((vertices, cover_vertex))
}

fn automorphisms(x: &Presheaf) -> Vec<PresheafMap> {
    let mut out = Vec::new();
    let _ = hom_search(x, x, true, |_, _, _| true, |m| {
        out.push(m.clone());
        ControlFlow::Continue(())
    });
    out
}

fn cover_parts(cover: &Family) -> Result<Vec<Arc<Presheaf>>> {
    Ok(cover.components()?.into_iter().map(|c| c.presheaf).collect())
}

/// The 0-span refinement over a class of vertex objects: every span
/// `U_i <- V -> U_j` with `V` in the class, and every commuting 2-span.
pub fn zero_span_refinement(cover: &Family, class: &SpanClass) -> Result<SpanRefinement> {
    let comps = cover_parts(cover)?;
    for (i, u) in comps.iter().enumerate() {
        if !class.0.iter().any(|c| is_isomorphic(c, u)) {
            return Err(Error::MissingCoverComponent(cover.index()[i].clone()));
        }
    }
    zero_span_unchecked(cover, &comps, &class.0)
}

fn zero_span_unchecked(cover: &Family, comps: &[Arc<Presheaf>], class: &[Arc<Presheaf>]) -> Result<SpanRefinement> {
    let (vertices, cover_vertex) = vertex_list(comps, class)?;
    let mut homs = HomCache::new(&vertices);
    let mut spans = Vec::new();
    for i in 0..comps.len() {
        for j in 0..comps.len() {
            for v in 0..vertices.len() {
                let us = homs.get(v, cover_vertex[i]);
                let vs = homs.get(v, cover_vertex[j]);
                for u in us.iter() {
                    for w in vs.iter() {
                        spans.push(SpanKey { feet: [i, j], vertex: v, left: u.clone(), right: w.clone() });
                    }
                }
            }
        }
    }
    spans.sort();
    build_refinement(cover, comps, vertices, cover_vertex, spans)
}

/// The 1-span refinement over a class of spans. The class must contain,
/// up to isomorphism of spans, the identity span of every `U_i`, the dual of
/// each member and both degenerate spans `(u, u)` and `(v, v)` of each member
/// `(u, v)`; it is then saturated under isomorphism.
pub fn one_span_refinement(cover: &Family, csp: &SpanClassSp) -> Result<SpanRefinement> {
    let comps = cover_parts(cover)?;
    let n = comps.len();
    for s in &csp.0 {
        if s.feet.iter().any(|&i| i >= n) {
            return Err(Error::Malformed("span foot outside the cover index".into()));
        }
        if !s.left.is_natural(&s.vertex, &comps[s.feet[0]]) || !s.right.is_natural(&s.vertex, &comps[s.feet[1]]) {
            return Err(Error::Malformed("span legs are not maps into the cover components".into()));
        }
    }
    let class: Vec<Arc<Presheaf>> = csp.0.iter().map(|s| s.vertex.clone()).collect();
    let (vertices, cover_vertex) = vertex_list(&comps, &class)?;
    let autos: Vec<Vec<PresheafMap>> = vertices.iter().map(|v| automorphisms(v)).collect();
    let canonical = |k: &SpanKey| -> SpanKey {
        autos[k.vertex]
            .iter()
            .map(|a| SpanKey { feet: k.feet, vertex: k.vertex, left: a.then(&k.left), right: a.then(&k.right) })
            .min()
            .expect("the identity is an automorphism")
    };
    let mut keys: BTreeSet<SpanKey> = BTreeSet::new();
    for s in &csp.0 {
        let (r, phi) = vertices
            .iter()
            .position(|v| **v == *s.vertex)
            .map(|r| (r, PresheafMap::identity(&s.vertex)))
            .or_else(|| vertices.iter().enumerate().find_map(|(r, v)| find_iso(v, &s.vertex).map(|phi| (r, phi))))
            .expect("every class vertex has a representative");
        keys.insert(canonical(&SpanKey { feet: s.feet, vertex: r, left: phi.then(&s.left), right: phi.then(&s.right) }));
    }
    let describe = |k: &SpanKey| format!("span over ({},{}) with vertex V{}", cover.index()[k.feet[0]], cover.index()[k.feet[1]], k.vertex);
    // The identity span of U_i may be present through any isomorphic vertex.
    for (i, &v) in cover_vertex.iter().enumerate() {
        let present = keys.iter().any(|k| k.feet == [i, i] && k.left == k.right && k.left.is_iso(&vertices[k.vertex], &comps[i]));
        if !present {
            return Err(Error::ClosureViolation(format!("identity span of {} missing", cover.index()[i])));
        }
        let id = PresheafMap::identity(&vertices[v]);
        keys.insert(SpanKey { feet: [i, i], vertex: v, left: id.clone(), right: id });
    }
    for k in &keys {
        if !keys.contains(&canonical(&k.dual())) {
            return Err(Error::ClosureViolation(format!("dual of {} missing", describe(k))));
        }
        for leg in [&k.left, &k.right] {
            let foot = if std::ptr::eq(leg, &k.left) { k.feet[0] } else { k.feet[1] };
            let d = SpanKey { feet: [foot, foot], vertex: k.vertex, left: leg.clone(), right: leg.clone() };
            if !keys.contains(&canonical(&d)) {
                return Err(Error::ClosureViolation(format!("degenerate span of {} missing", describe(k))));
            }
        }
    }
    let mut spans: BTreeSet<SpanKey> = BTreeSet::new();
    for k in &keys {
        for a in &autos[k.vertex] {
            spans.insert(SpanKey { feet: k.feet, vertex: k.vertex, left: a.then(&k.left), right: a.then(&k.right) });
        }
    }
    build_refinement(cover, &comps, vertices, cover_vertex, spans.into_iter().collect())
}

/// Refinements with more 2-simplices than this are refused.
pub const MAX_TWO_SPANS: usize = 200_000;

fn build_refinement(
    cover: &Family,
    comps: &[Arc<Presheaf>],
    vertices: Vec<Arc<Presheaf>>,
    cover_vertex: Vec<usize>,
    spans: Vec<SpanKey>,
) -> Result<SpanRefinement> {
    let index: HashMap<&SpanKey, usize> = spans.iter().enumerate().map(|(k, s)| (s, k)).collect();
    let n = comps.len();
    let id_of = |v: usize| PresheafMap::identity(&vertices[v]);
    let mut degen0 = Vec::new();
    for i in 0..n {
        let v = cover_vertex[i];
        let key = SpanKey { feet: [i, i], vertex: v, left: id_of(v), right: id_of(v) };
        degen0.push(*index.get(&key).ok_or_else(|| Error::ClosureViolation(format!("identity span of {} missing", cover.index()[i])))?);
    }
    let mut tau1 = Vec::new();
    for s in &spans {
        tau1.push(*index.get(&s.dual()).ok_or_else(|| Error::ClosureViolation("dual span missing".into()))?);
    }
    // 2-spans: for each apex, every pair of arrows (l, x), (t, y) agreeing on
    // U_i, completed by every (r, z) matching the remaining two vertices.
    let mut homs = HomCache::new(&vertices);
    let mut spans2: Vec<TwoSpanKey> = Vec::new();
    for apex in 0..vertices.len() {
        struct Arrow {
            edge: usize,
            leg: PresheafMap,
            src: PresheafMap,
            tgt: PresheafMap,
        }
        let mut arrows = Vec::new();
        for (l, s) in spans.iter().enumerate() {
            for x in homs.get(apex, s.vertex).iter() {
                arrows.push(Arrow { edge: l, leg: x.clone(), src: x.then(&s.left), tgt: x.then(&s.right) });
            }
        }
        let mut by_src: HashMap<(usize, &PresheafMap), Vec<usize>> = HashMap::new();
        let mut by_both: HashMap<(usize, &PresheafMap, usize, &PresheafMap), Vec<usize>> = HashMap::new();
        for (a, arr) in arrows.iter().enumerate() {
            let [i, j] = spans[arr.edge].feet;
            by_src.entry((i, &arr.src)).or_default().push(a);
            by_both.entry((i, &arr.src, j, &arr.tgt)).or_default().push(a);
        }
        let none = Vec::new();
        for x in &arrows {
            let [i, j] = spans[x.edge].feet;
            for &b in by_src.get(&(i, &x.src)).unwrap_or(&none) {
                let y = &arrows[b];
                let k = spans[y.edge].feet[1];
                for &c in by_both.get(&(j, &x.tgt, k, &y.tgt)).unwrap_or(&none) {
                    let z = &arrows[c];
                    if spans2.len() >= MAX_TWO_SPANS {
                        return Err(Error::LimitExceeded(format!("more than {MAX_TWO_SPANS} 2-spans")));
                    }
                    spans2.push(TwoSpanKey {
                        apex,
                        edges: [z.edge, y.edge, x.edge],
                        legs: [z.leg.clone(), y.leg.clone(), x.leg.clone()],
                    });
                }
            }
        }
    }
    let index2: HashMap<&TwoSpanKey, usize> = spans2.iter().enumerate().map(|(k, s)| (s, k)).collect();
    let mut degen1 = Vec::new();
    for (l, s) in spans.iter().enumerate() {
        let [i, j] = s.feet;
        let id = id_of(s.vertex);
        let s0 = TwoSpanKey { apex: s.vertex, edges: [l, l, degen0[i]], legs: [id.clone(), id.clone(), s.left.clone()] };
        let s1 = TwoSpanKey { apex: s.vertex, edges: [degen0[j], l, l], legs: [s.right.clone(), id.clone(), id] };
        degen1.push([index2[&s0], index2[&s1]]);
    }
    let mut tau2 = Vec::new();
    for w in &spans2 {
        let [r, t, l] = w.edges;
        let op = TwoSpanKey {
            apex: w.apex,
            edges: [tau1[l], tau1[t], tau1[r]],
            legs: [w.legs[2].clone(), w.legs[1].clone(), w.legs[0].clone()],
        };
        tau2.push(index2[&op]);
    }
    let mut ordinal: HashMap<[usize; 2], usize> = HashMap::new();
    let s1_labels: Vec<String> = spans
        .iter()
        .map(|s| {
            let k = ordinal.entry(s.feet).or_insert(0);
            *k += 1;
            format!("{}-{}.{}", cover.index()[s.feet[0]], cover.index()[s.feet[1]], *k - 1)
        })
        .collect();
    let sset = TruncSSet {
        s0: cover.index().to_vec(),
        s1: s1_labels,
        s2: (0..spans2.len()).map(|k| format!("w{k}")).collect(),
        faces1: spans.iter().map(|s| [s.feet[1], s.feet[0]]).collect(),
        faces2: spans2.iter().map(|w| w.edges).collect(),
        degen0: degen0.clone(),
        degen1: degen1.clone(),
    };
    let duality = StrictDuality { tau1: tau1.clone(), tau2: tau2.clone() };
    let data = ComponentData {
        h0: comps.to_vec(),
        h1: spans.iter().map(|s| vertices[s.vertex].clone()).collect(),
        h2: spans2.iter().map(|w| vertices[w.apex].clone()).collect(),
        faces1: spans.iter().map(|s| [s.right.clone(), s.left.clone()]).collect(),
        faces2: spans2.iter().map(|w| w.legs.clone()).collect(),
        degen0: comps.iter().map(|u| PresheafMap::identity(u)).collect(),
        degen1: spans.iter().map(|s| [id_of(s.vertex), id_of(s.vertex)]).collect(),
        tau1: spans.iter().map(|s| id_of(s.vertex)).collect(),
        tau2: spans2.iter().map(|w| id_of(w.apex)).collect(),
    };
    let family = assemble(sset, duality, data)?;
    Ok(SpanRefinement { family, vertices, cover_vertex, spans1: spans, spans2 })
}

/// Representables `y(p)` for every point of the base.
pub fn representables(cover: &Family) -> Vec<Arc<Presheaf>> {
    let base = cover.base();
    (0..base.len()).map(|p| Arc::new(Presheaf::representable(base.clone(), p))).collect()
}

/// Connected sub-presheaves of `x` with at most `bound` elements.
pub fn connected_subobjects(x: &Presheaf, bound: usize) -> Vec<Arc<Presheaf>> {
    let elems: Vec<(usize, usize)> = x.elements().collect();
    let pos: HashMap<(usize, usize), usize> = elems.iter().enumerate().map(|(k, &e)| (e, k)).collect();
    let base = x.base();
    let closure = |k: usize| -> BTreeSet<usize> {
        let (q, e) = elems[k];
        (0..base.len()).filter(|&p| base.leq(p, q)).map(|p| pos[&(p, x.restrict(q, p, e))]).collect()
    };
    let closures: Vec<BTreeSet<usize>> = (0..elems.len()).map(closure).collect();
    let mut seen: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    let mut frontier: Vec<BTreeSet<usize>> = closures.iter().filter(|c| c.len() <= bound).cloned().collect();
    let mut out = Vec::new();
    while let Some(set) = frontier.pop() {
        if !seen.insert(set.clone()) {
            continue;
        }
        let keep: Vec<Vec<bool>> = (0..base.len())
            .map(|p| (0..x.fiber_size(p)).map(|e| set.contains(&pos[&(p, e)])).collect())
            .collect();
        let (sub, _) = x.sub(&keep).expect("unions of down-closures are closed");
        if is_connected(&sub) {
            out.push(Arc::new(sub));
        }
        for c in &closures {
            let grown: BTreeSet<usize> = set.union(c).copied().collect();
            if grown.len() > set.len() && grown.len() <= bound && !seen.contains(&grown) {
                frontier.push(grown);
            }
        }
    }
    out
}

/// The 0-span refinement over the components and the representables, plus
/// connected sub-objects of the components up to `subobject_bound` elements.
/// No connectivity requirement is placed on the components.
pub fn generator_refinement(cover: &Family, subobject_bound: usize) -> Result<SpanRefinement> {
    let comps = cover_parts(cover)?;
    let mut class = comps.clone();
    class.extend(representables(cover));
    for u in &comps {
        class.extend(connected_subobjects(u, subobject_bound));
    }
    zero_span_unchecked(cover, &comps, &class)
}

/// [`generator_refinement`] for a cover whose components are all connected.
pub fn connected_refinement(cover: &Family, subobject_bound: usize) -> Result<SpanRefinement> {
    let parts = cover.components()?;
    for (i, c) in parts.iter().enumerate() {
        if connected_components(&c.presheaf).len() != 1 {
            return Err(Error::Disconnected(cover.index()[i].clone()));
        }
    }
    generator_refinement(cover, subobject_bound)
}

/// Whether `targets` are jointly covered by maps out of `sources`.
fn jointly_covered(sources: &[Arc<Presheaf>], target: &Presheaf) -> bool {
    target.elements().all(|(p, e)| {
        sources.iter().any(|w| {
            (0..w.fiber_size(p)).any(|x| hom_find(w, target, |q, a, b| q != p || a != x || b == e).is_some())
        })
    })
}

/// The epimorphism criteria for span refinements: every `P_ij` and every
/// non-empty boundary limit `P_ltr` is jointly covered by maps out of the
/// vertex objects. Boundaries range over 1-spans with vertices in the class
/// (for a vertex class) or over the given spans (for a span class).
pub fn check_epi_criteria(cover: &Family, class: ClassRef<'_>) -> Result<bool> {
    let comps = cover_parts(cover)?;
    let nerve = CechNerve::of(cover)?;
    let (vertices, spans, sources): (Vec<Arc<Presheaf>>, Vec<(usize, [usize; 2], PresheafMap, PresheafMap)>, Vec<Arc<Presheaf>>) =
        match class {
            ClassRef::Vertices(c) => {
                let vertices = c.0.clone();
                let mut spans = Vec::new();
                for (v, vx) in vertices.iter().enumerate() {
                    for i in 0..comps.len() {
                        for j in 0..comps.len() {
                            for u in hom_enumerate(vx, &comps[i]) {
                                for w in hom_enumerate(vx, &comps[j]) {
                                    spans.push((v, [i, j], u.clone(), w));
                                }
                            }
                        }
                    }
                }
                (vertices.clone(), spans, vertices)
            }
            ClassRef::Spans(c) => {
                let vertices: Vec<Arc<Presheaf>> = c.0.iter().map(|s| s.vertex.clone()).collect();
                let spans = c.0.iter().enumerate().map(|(v, s)| (v, s.feet, s.left.clone(), s.right.clone())).collect();
                (vertices.clone(), spans, vertices)
            }
        };
    for &[i, j] in &nerve.pairs {
        let p = product_n(&[&*comps[i], &*comps[j]])?.0;
        let covered = match class {
            ClassRef::Vertices(_) => jointly_covered(&sources, &p),
            ClassRef::Spans(_) => {
                let nj = |q: usize| comps[j].fiber_size(q);
                let mut hit: Vec<Vec<bool>> = (0..p.base().len()).map(|q| vec![false; p.fiber_size(q)]).collect();
                for (_, _, u, v) in spans.iter().filter(|s| s.1 == [i, j]) {
                    for (q, row) in hit.iter_mut().enumerate() {
                        for (&a, &b) in u.component(q).iter().zip(v.component(q)) {
                            row[a * nj(q) + b] = true;
                        }
                    }
                }
                hit.iter().all(|row| row.iter().all(|&h| h))
            }
        };
        if !covered {
            return Ok(false);
        }
    }
    let mut out_of: HashMap<usize, Vec<usize>> = HashMap::new();
    for (k, s) in spans.iter().enumerate() {
        out_of.entry(s.1[0]).or_default().push(k);
    }
    let none = Vec::new();
    for sl in &spans {
        let [i, j] = sl.1;
        for &t in out_of.get(&i).unwrap_or(&none) {
            let k = spans[t].1[1];
            for &r in out_of.get(&j).unwrap_or(&none) {
                if spans[r].1[1] != k {
                    continue;
                }
                let (vl, vt, vr) = (&vertices[sl.0], &vertices[spans[t].0], &vertices[spans[r].0]);
                let (prod, proj) = product_n(&[&**vl, &**vt, &**vr])?;
                let keep: Vec<Vec<bool>> = (0..prod.base().len())
                    .map(|q| {
                        (0..prod.fiber_size(q))
                            .map(|e| {
                                let (a, b, c) = (proj[0].apply(q, e), proj[1].apply(q, e), proj[2].apply(q, e));
                                sl.2.apply(q, a) == spans[t].2.apply(q, b)
                                    && sl.3.apply(q, a) == spans[r].2.apply(q, c)
                                    && spans[t].3.apply(q, b) == spans[r].3.apply(q, c)
                            })
                            .collect()
                    })
                    .collect();
                let lim = prod.sub(&keep)?.0;
                if !lim.is_initial() && !jointly_covered(&sources, &lim) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// The class a criterion is checked against.
#[derive(Debug, Clone, Copy)]
pub enum ClassRef<'a> {
    Vertices(&'a SpanClass),
    Spans(&'a SpanClassSp),
}
