//! Simplicial families `(H, S, zeta)`, their spans, self-dual families, the
//! Cech simplicial family of a cover and the counit into it.
//!
//! A family is stored in total form: one presheaf per level together with
//! face, degeneracy and structure maps between totals. The component
//! `(H_n)_w` over a simplex `w` is the preimage of `w` and is precomputed.

use std::sync::Arc;

use crate::error::{Error, Result, Violation};
use crate::fintopos::{coproduct, product_n, Family, Presheaf, PresheafMap};
use crate::simplicial::{validate, validate_duality, CechNerve, SimplicialMap, StrictDuality, TruncSSet};

#[derive(Debug, Clone)]
pub struct SimplicialFamily {
    sset: TruncSSet,
    levels: [Presheaf; 3],
    zeta: [Vec<Vec<usize>>; 3],
    faces1: [PresheafMap; 2],
    faces2: [PresheafMap; 3],
    degen0: PresheafMap,
    degen1: [PresheafMap; 2],
    members: [Vec<Vec<Vec<usize>>>; 3],
    local: [Vec<Vec<usize>>; 3],
    comps: [Vec<Arc<Presheaf>>; 3],
}

/// Level data of a simplicial family in total form.
#[derive(Debug, Clone)]
pub struct TotalLevels {
    pub levels: [Presheaf; 3],
    pub zeta: [Vec<Vec<usize>>; 3],
    /// `H_1 -> H_0`: `[d0, d1]`.
    pub faces1: [PresheafMap; 2],
    /// `H_2 -> H_1`: `[d0, d1, d2]`.
    pub faces2: [PresheafMap; 3],
    pub degen0: PresheafMap,
    /// `H_1 -> H_2`: `[s0, s1]`.
    pub degen1: [PresheafMap; 2],
}

fn simplex_count(s: &TruncSSet, n: usize) -> usize {
    [s.s0.len(), s.s1.len(), s.s2.len()][n]
}

impl SimplicialFamily {
    /// Indexes the components. Fails only when the data cannot be read as
    /// a family at all (shape errors, `zeta` not natural); law violations
    /// are left to [`validate_family`].
    pub fn new(sset: TruncSSet, data: TotalLevels) -> Result<Self> {
        let TotalLevels { levels, zeta, faces1, faces2, degen0, degen1 } = data;
        let base = levels[0].base().clone();
        let mut members: [Vec<Vec<Vec<usize>>>; 3] = Default::default();
        let mut local: [Vec<Vec<usize>>; 3] = Default::default();
        let mut comps: [Vec<Arc<Presheaf>>; 3] = Default::default();
        for n in 0..3 {
            let h = &levels[n];
            if !crate::fintopos::same_base(h.base(), &base) {
                return Err(Error::BaseMismatch);
            }
            let count = simplex_count(&sset, n);
            if zeta[n].len() != base.len()
                || (0..base.len()).any(|p| zeta[n][p].len() != h.fiber_size(p) || zeta[n][p].iter().any(|&w| w >= count))
            {
                return Err(Error::Malformed(format!("zeta at level {n} does not match the level presheaf")));
            }
            members[n] = vec![vec![Vec::new(); base.len()]; count];
            local[n] = (0..base.len()).map(|p| vec![0; h.fiber_size(p)]).collect();
            for p in 0..base.len() {
                for (e, &w) in zeta[n][p].iter().enumerate() {
                    local[n][p][e] = members[n][w][p].len();
                    members[n][w][p].push(e);
                }
            }
            for (p, q) in base.strict_pairs() {
                for e in 0..h.fiber_size(q) {
                    if zeta[n][p][h.restrict(q, p, e)] != zeta[n][q][e] {
                        return Err(Error::Malformed(format!("zeta at level {n} is not natural")));
                    }
                }
            }
            for w in 0..count {
                let m = &members[n][w];
                let fibers = (0..base.len()).map(|p| m[p].iter().map(|&e| h.label(p, e).to_string()).collect()).collect();
                let loc = &local[n];
                let sub = Presheaf::from_fn(base.clone(), fibers, |q, p, k| loc[p][h.restrict(q, p, m[q][k])]);
                comps[n].push(Arc::new(sub));
            }
        }
        let shapes_ok = |m: &PresheafMap, s: usize, t: usize| {
            m.components().len() == base.len()
                && (0..base.len()).all(|p| {
                    m.component(p).len() == levels[s].fiber_size(p)
                        && m.component(p).iter().all(|&x| x < levels[t].fiber_size(p))
                })
        };
        let ok = faces1.iter().all(|m| shapes_ok(m, 1, 0))
            && faces2.iter().all(|m| shapes_ok(m, 2, 1))
            && shapes_ok(&degen0, 0, 1)
            && degen1.iter().all(|m| shapes_ok(m, 1, 2));
        if !ok {
            return Err(Error::Malformed("face or degeneracy map has the wrong shape".into()));
        }
        Ok(SimplicialFamily { sset, levels, zeta, faces1, faces2, degen0, degen1, members, local, comps })
    }

    pub fn sset(&self) -> &TruncSSet {
        &self.sset
    }

    pub fn base(&self) -> &Arc<crate::fintopos::FinPoset> {
        self.levels[0].base()
    }

    pub fn level(&self, n: usize) -> &Presheaf {
        &self.levels[n]
    }

    pub fn zeta(&self, n: usize, p: usize, e: usize) -> usize {
        self.zeta[n][p][e]
    }

    /// `d_i: H_1 -> H_0`.
    pub fn face1(&self, i: usize) -> &PresheafMap {
        &self.faces1[i]
    }

    /// `d_i: H_2 -> H_1`.
    pub fn face2(&self, i: usize) -> &PresheafMap {
        &self.faces2[i]
    }

    pub fn degen0(&self) -> &PresheafMap {
        &self.degen0
    }

    /// `s_i: H_1 -> H_2`.
    pub fn degen1(&self, i: usize) -> &PresheafMap {
        &self.degen1[i]
    }

    /// The component `(H_n)_w`.
    pub fn component(&self, n: usize, w: usize) -> &Arc<Presheaf> {
        &self.comps[n][w]
    }

    /// Total indices of the elements of `(H_n)_w` at `p`, in local order.
    pub fn members(&self, n: usize, w: usize, p: usize) -> &[usize] {
        &self.members[n][w][p]
    }

    /// Position of total element `e` at `p` inside its component.
    pub fn local(&self, n: usize, p: usize, e: usize) -> usize {
        self.local[n][p][e]
    }

    /// Restriction of a total map `H_m -> H_n` to the component over `w`,
    /// as a map into the component over its image simplex `v`.
    pub fn restrict_map(&self, m: &PresheafMap, from: (usize, usize), to: usize) -> PresheafMap {
        let (lvl, w) = from;
        PresheafMap::new(
            (0..self.base().len())
                .map(|p| self.members[lvl][w][p].iter().map(|&e| self.local[to][p][m.apply(p, e)]).collect())
                .collect(),
        )
    }

    /// `(d_i)_l: (H_1)_l -> (H_0)_{d_i l}`.
    pub fn face1_component(&self, l: usize, i: usize) -> PresheafMap {
        self.restrict_map(&self.faces1[i], (1, l), 0)
    }

    /// `(d_i)_w: (H_2)_w -> (H_1)_{d_i w}`.
    pub fn face2_component(&self, w: usize, i: usize) -> PresheafMap {
        self.restrict_map(&self.faces2[i], (2, w), 1)
    }

    /// The level-0 family `(H_0, S_0, zeta_0)`.
    pub fn level0_family(&self) -> Result<Family> {
        Family::new(self.levels[0].clone(), self.sset.s0.clone(), self.zeta[0].clone())
    }

    /// The 1-span `(H_0)_i <- (H_1)_l -> (H_0)_j` of a 1-simplex.
    pub fn span_of_1simplex(&self, l: usize) -> Result<Span1> {
        if l >= self.sset.s1.len() {
            return Err(Error::UnknownLabel { label: l.to_string(), context: "1-simplices".into() });
        }
        Ok(Span1 {
            vertex: self.comps[1][l].clone(),
            feet: [self.sset.src(l), self.sset.tgt(l)],
            left: self.face1_component(l, 1),
            right: self.face1_component(l, 0),
        })
    }

    /// The 2-span of a 2-simplex with its face legs and composite legs.
    pub fn span_of_2simplex(&self, w: usize) -> Result<Span2> {
        if w >= self.sset.s2.len() {
            return Err(Error::UnknownLabel { label: w.to_string(), context: "2-simplices".into() });
        }
        let edges = self.sset.faces2[w];
        let edge_maps = [self.face2_component(w, 0), self.face2_component(w, 1), self.face2_component(w, 2)];
        let d2 = edges[2];
        let d0 = edges[0];
        let vertices = [self.sset.src(d2), self.sset.tgt(d2), self.sset.tgt(d0)];
        let vertex_maps = [
            edge_maps[2].then(&self.face1_component(d2, 1)),
            edge_maps[2].then(&self.face1_component(d2, 0)),
            edge_maps[0].then(&self.face1_component(d0, 0)),
        ];
        Ok(Span2 { apex: self.comps[2][w].clone(), edges, edge_maps, vertices, vertex_maps })
    }

    /// 1-simplices whose two face maps agree on their component.
    pub fn equal_legs(&self) -> Vec<bool> {
        (0..self.sset.s1.len())
            .map(|l| {
                self.sset.src(l) == self.sset.tgt(l)
                    && (0..self.base().len()).all(|p| {
                        self.members[1][l][p].iter().all(|&e| self.faces1[0].apply(p, e) == self.faces1[1].apply(p, e))
                    })
            })
            .collect()
    }
}

/// A 1-span with vertex `(H_1)_l` and legs into `(H_0)_i`, `(H_0)_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Span1 {
    pub vertex: Arc<Presheaf>,
    /// `[i, j]`, the indices of the feet.
    pub feet: [usize; 2],
    pub left: PresheafMap,
    pub right: PresheafMap,
}

impl Span1 {
    /// The dual span, with the legs exchanged.
    pub fn dual(&self) -> Span1 {
        Span1 { vertex: self.vertex.clone(), feet: [self.feet[1], self.feet[0]], left: self.right.clone(), right: self.left.clone() }
    }
}

/// A 2-span over a 2-simplex `w`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Span2 {
    pub apex: Arc<Presheaf>,
    /// `[d0 w, d1 w, d2 w]`.
    pub edges: [usize; 3],
    pub edge_maps: [PresheafMap; 3],
    /// `[i, j, k]`, the vertices of `w` in order.
    pub vertices: [usize; 3],
    /// Composite legs to `(H_0)_i`, `(H_0)_j`, `(H_0)_k`.
    pub vertex_maps: [PresheafMap; 3],
}

/// A simplicial family with a strict duality on its index simplicial set and
/// componentwise dualities `(tau_n)_w: (H_n)_w -> (H_n)_{w^op}` on `H`.
#[derive(Debug, Clone)]
pub struct SelfDualFamily {
    pub family: SimplicialFamily,
    pub duality: StrictDuality,
    /// Total maps `H_1 -> H_1` and `H_2 -> H_2`.
    pub tau_h: [PresheafMap; 2],
}

impl SelfDualFamily {
    pub fn sset(&self) -> &TruncSSet {
        self.family.sset()
    }

    /// `(tau_1)_l` as a map of components.
    pub fn tau1_component(&self, l: usize) -> PresheafMap {
        self.family.restrict_map(&self.tau_h[0], (1, l), 1)
    }

    /// `(tau_2)_w` as a map of components.
    pub fn tau2_component(&self, w: usize) -> PresheafMap {
        self.family.restrict_map(&self.tau_h[1], (2, w), 2)
    }
}

/// Component data from which [`assemble`] builds a self-dual family. Every
/// map is between components, indexed by the simplex of its domain.
#[derive(Debug, Clone, Default)]
pub struct ComponentData {
    pub h0: Vec<Arc<Presheaf>>,
    pub h1: Vec<Arc<Presheaf>>,
    pub h2: Vec<Arc<Presheaf>>,
    /// Per 1-simplex: `[d0, d1]`.
    pub faces1: Vec<[PresheafMap; 2]>,
    /// Per 2-simplex: `[d0, d1, d2]`.
    pub faces2: Vec<[PresheafMap; 3]>,
    pub degen0: Vec<PresheafMap>,
    /// Per 1-simplex: `[s0, s1]`.
    pub degen1: Vec<[PresheafMap; 2]>,
    pub tau1: Vec<PresheafMap>,
    pub tau2: Vec<PresheafMap>,
}

/// Lays the components out as coproducts and globalizes the component maps.
pub fn assemble(sset: TruncSSet, duality: StrictDuality, data: ComponentData) -> Result<SelfDualFamily> {
    let base = match data.h0.first() {
        Some(h) => h.base().clone(),
        None => return Err(Error::Malformed("a family needs at least one vertex".into())),
    };
    let np = base.len();
    let layout = |labels: &[String], parts: &[Arc<Presheaf>]| -> Result<(Presheaf, Vec<Vec<usize>>, Vec<Vec<usize>>)> {
        let summands: Vec<(&str, &Presheaf)> = labels.iter().map(|l| l.as_str()).zip(parts.iter().map(|p| &**p)).collect();
        let (total, inj) = coproduct(base.clone(), &summands)?;
        let mut zeta: Vec<Vec<usize>> = (0..np).map(|p| vec![0; total.fiber_size(p)]).collect();
        let mut offs = vec![vec![0; np]; parts.len()];
        for (w, m) in inj.iter().enumerate() {
            for p in 0..np {
                offs[w][p] = m.component(p).first().copied().unwrap_or(0);
                for &t in m.component(p) {
                    zeta[p][t] = w;
                }
            }
        }
        Ok((total, zeta, offs))
    };
    if data.h1.len() != sset.s1.len() || data.h2.len() != sset.s2.len() || data.h0.len() != sset.s0.len() {
        return Err(Error::Malformed("component counts do not match the simplicial set".into()));
    }
    let (t0, z0, o0) = layout(&sset.s0, &data.h0)?;
    let (t1, z1, o1) = layout(&sset.s1, &data.h1)?;
    let (t2, z2, o2) = layout(&sset.s2, &data.h2)?;
    // Globalize a family of component maps indexed by domain simplex.
    let glob = |dom: &Presheaf, dz: &[Vec<usize>], doffs: &[Vec<usize>], toffs: &[Vec<usize>], pick: &dyn Fn(usize) -> (usize, PresheafMap)| {
        let mut comps: Vec<Vec<usize>> = (0..np).map(|p| vec![0; dom.fiber_size(p)]).collect();
        let mut cache: Vec<Option<(usize, PresheafMap)>> = vec![None; doffs.len()];
        for p in 0..np {
            for e in 0..dom.fiber_size(p) {
                let w = dz[p][e];
                let (v, m) = cache[w].get_or_insert_with(|| pick(w));
                comps[p][e] = toffs[*v][p] + m.apply(p, e - doffs[w][p]);
            }
        }
        PresheafMap::new(comps)
    };
    let faces1 = [0, 1].map(|i| glob(&t1, &z1, &o1, &o0, &|l| (sset.faces1[l][i], data.faces1[l][i].clone())));
    let faces2 = [0, 1, 2].map(|i| glob(&t2, &z2, &o2, &o1, &|w| (sset.faces2[w][i], data.faces2[w][i].clone())));
    let degen0 = glob(&t0, &z0, &o0, &o1, &|v| (sset.degen0[v], data.degen0[v].clone()));
    let degen1 = [0, 1].map(|i| glob(&t1, &z1, &o1, &o2, &|l| (sset.degen1[l][i], data.degen1[l][i].clone())));
    let tau1 = glob(&t1, &z1, &o1, &o1, &|l| (duality.tau1[l], data.tau1[l].clone()));
    let tau2 = glob(&t2, &z2, &o2, &o2, &|w| (duality.tau2[w], data.tau2[w].clone()));
    let family = SimplicialFamily::new(
        sset,
        TotalLevels { levels: [t0, t1, t2], zeta: [z0, z1, z2], faces1, faces2, degen0, degen1 },
    )?;
    Ok(SelfDualFamily { family, duality, tau_h: [tau1, tau2] })
}

fn check_maps(out: &mut Vec<Violation>, name: &str, m: &PresheafMap, src: &Presheaf, tgt: &Presheaf) {
    for v in m.check(src, tgt) {
        out.push(Violation::new(v.law, format!("{name}: {}", v.detail)));
    }
}

/// All violated invariants of a simplicial family.
pub fn validate_family(f: &SimplicialFamily) -> Vec<Violation> {
    let mut out: Vec<Violation> =
        validate(&f.sset).into_iter().map(|v| Violation::new(v.law, format!("index: {}", v.detail))).collect();
    if !out.is_empty() {
        return out;
    }
    for n in 0..3 {
        for v in f.levels[n].check() {
            out.push(Violation::new(v.law, format!("H_{n}: {}", v.detail)));
        }
    }
    let [h0, h1, h2] = &f.levels;
    for i in 0..2 {
        check_maps(&mut out, &format!("d{i}: H_1 -> H_0"), &f.faces1[i], h1, h0);
        check_maps(&mut out, &format!("s{i}: H_1 -> H_2"), &f.degen1[i], h1, h2);
    }
    for i in 0..3 {
        check_maps(&mut out, &format!("d{i}: H_2 -> H_1"), &f.faces2[i], h2, h1);
    }
    check_maps(&mut out, "s0: H_0 -> H_1", &f.degen0, h0, h1);
    if !out.is_empty() {
        return out;
    }
    let s = &f.sset;
    let base = f.base().clone();
    for p in 0..base.len() {
        let at = base.label(p);
        for e in 0..h1.fiber_size(p) {
            let l = f.zeta[1][p][e];
            for i in 0..2 {
                if f.zeta[0][p][f.faces1[i].apply(p, e)] != s.faces1[l][i] {
                    out.push(Violation::new(format!("zeta d{i} = d{i} zeta"), format!("{} at {at}", h1.label(p, e))));
                }
                if f.zeta[2][p][f.degen1[i].apply(p, e)] != s.degen1[l][i] {
                    out.push(Violation::new(format!("zeta s{i} = s{i} zeta"), format!("{} at {at}", h1.label(p, e))));
                }
            }
            let checks = [
                (f.faces2[0].apply(p, f.degen1[0].apply(p, e)) == e, "d0 s0 = id"),
                (f.faces2[1].apply(p, f.degen1[0].apply(p, e)) == e, "d1 s0 = id"),
                (
                    f.faces2[2].apply(p, f.degen1[0].apply(p, e)) == f.degen0.apply(p, f.faces1[1].apply(p, e)),
                    "d2 s0 = s0 d1",
                ),
                (
                    f.faces2[0].apply(p, f.degen1[1].apply(p, e)) == f.degen0.apply(p, f.faces1[0].apply(p, e)),
                    "d0 s1 = s0 d0",
                ),
                (f.faces2[1].apply(p, f.degen1[1].apply(p, e)) == e, "d1 s1 = id"),
                (f.faces2[2].apply(p, f.degen1[1].apply(p, e)) == e, "d2 s1 = id"),
            ];
            for (ok, law) in checks {
                if !ok {
                    out.push(Violation::new(format!("H: {law}"), format!("{} at {at}", h1.label(p, e))));
                }
            }
        }
        for e in 0..h2.fiber_size(p) {
            let w = f.zeta[2][p][e];
            for i in 0..3 {
                if f.zeta[1][p][f.faces2[i].apply(p, e)] != s.faces2[w][i] {
                    out.push(Violation::new(format!("zeta d{i} = d{i} zeta"), format!("{} at {at}", h2.label(p, e))));
                }
            }
            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                let lhs = f.faces1[i].apply(p, f.faces2[j].apply(p, e));
                let rhs = f.faces1[j - 1].apply(p, f.faces2[i].apply(p, e));
                if lhs != rhs {
                    out.push(Violation::new(format!("H: d{i} d{j} = d{} d{i}", j - 1), format!("{} at {at}", h2.label(p, e))));
                }
            }
        }
        for e in 0..h0.fiber_size(p) {
            let i = f.zeta[0][p][e];
            if f.zeta[1][p][f.degen0.apply(p, e)] != s.degen0[i] {
                out.push(Violation::new("zeta s0 = s0 zeta", format!("{} at {at}", h0.label(p, e))));
            }
            let l = f.degen0.apply(p, e);
            if f.faces1[0].apply(p, l) != e || f.faces1[1].apply(p, l) != e {
                out.push(Violation::new("H: d s0 = id", format!("{} at {at}", h0.label(p, e))));
            }
            if f.degen1[0].apply(p, l) != f.degen1[1].apply(p, l) {
                out.push(Violation::new("H: s0 s0 = s1 s0", format!("{} at {at}", h0.label(p, e))));
            }
        }
    }
    for n in 0..3 {
        let names = [&s.s0, &s.s1, &s.s2][n];
        for (w, c) in f.comps[n].iter().enumerate() {
            if c.is_initial() {
                out.push(Violation::new("non-empty components", format!("(H_{n})_{} is empty", names[w])));
            }
        }
    }
    out
}

/// All violated invariants of a self-dual family.
pub fn validate_selfdual(f: &SelfDualFamily) -> Vec<Violation> {
    let mut out = validate_family(&f.family);
    let s = f.family.sset();
    out.extend(validate_duality(s, &f.duality).into_iter().map(|v| Violation::new(v.law, format!("index: {}", v.detail))));
    if !out.is_empty() {
        return out;
    }
    let fam = &f.family;
    let [h0, h1, h2] = &fam.levels;
    check_maps(&mut out, "tau_1", &f.tau_h[0], h1, h1);
    check_maps(&mut out, "tau_2", &f.tau_h[1], h2, h2);
    if !out.is_empty() {
        return out;
    }
    let base = fam.base().clone();
    let _ = h0;
    let [t1, t2] = &f.tau_h;
    for p in 0..base.len() {
        let at = base.label(p);
        for e in 0..h1.fiber_size(p) {
            let name = h1.label(p, e);
            let op = t1.apply(p, e);
            if t1.apply(p, op) != e {
                out.push(Violation::new("tau_1 involutive", format!("{name} at {at}")));
            }
            if fam.zeta[1][p][op] != f.duality.tau1[fam.zeta[1][p][e]] {
                out.push(Violation::new("zeta tau_1 = tau_1 zeta", format!("{name} at {at}")));
            }
            for i in 0..2 {
                if fam.faces1[i].apply(p, op) != fam.faces1[1 - i].apply(p, e) {
                    out.push(Violation::new(format!("d{i} tau_1 = d{}", 1 - i), format!("{name} at {at}")));
                }
                if fam.degen1[i].apply(p, op) != t2.apply(p, fam.degen1[1 - i].apply(p, e)) {
                    out.push(Violation::new(format!("s{i} tau_1 = tau_2 s{}", 1 - i), format!("{name} at {at}")));
                }
            }
        }
        for e in 0..h2.fiber_size(p) {
            let name = h2.label(p, e);
            let op = t2.apply(p, e);
            if t2.apply(p, op) != e {
                out.push(Violation::new("tau_2 involutive", format!("{name} at {at}")));
            }
            if fam.zeta[2][p][op] != f.duality.tau2[fam.zeta[2][p][e]] {
                out.push(Violation::new("zeta tau_2 = tau_2 zeta", format!("{name} at {at}")));
            }
            for i in 0..3 {
                if fam.faces2[i].apply(p, op) != t1.apply(p, fam.faces2[2 - i].apply(p, e)) {
                    out.push(Violation::new(format!("d{i} tau_2 = tau_1 d{}", 2 - i), format!("{name} at {at}")));
                }
            }
        }
        for e in 0..h0.fiber_size(p) {
            let l = fam.degen0.apply(p, e);
            if t1.apply(p, l) != l {
                out.push(Violation::new("tau_1 s0 = s0", format!("{} at {at}", h0.label(p, e))));
            }
        }
    }
    out
}

/// Whether every 1-simplex `l` has a 2-simplex `w` with `d2 w = l`,
/// `d0 w = l^op` and a middle face whose two face maps agree.
pub fn condition_g(f: &SelfDualFamily) -> bool {
    condition_g_failure(f).is_none()
}

/// The first 1-simplex without a condition G witness.
pub fn condition_g_failure(f: &SelfDualFamily) -> Option<usize> {
    let s = f.sset();
    let equal = f.family.equal_legs();
    let mut filled = vec![false; s.s1.len()];
    for w in 0..s.s2.len() {
        let [a, b, c] = s.faces2[w];
        if a == f.duality.tau1[c] && equal[b] {
            filled[c] = true;
        }
    }
    filled.iter().position(|&ok| !ok)
}

/// A 2-simplex witnessing condition G at `l`.
pub fn condition_g_witness(f: &SelfDualFamily, l: usize) -> Option<usize> {
    let s = f.sset();
    let equal = f.family.equal_legs();
    (0..s.s2.len()).find(|&w| {
        let [a, b, c] = s.faces2[w];
        c == l && a == f.duality.tau1[l] && equal[b]
    })
}

/// The Cech simplicial family of a cover: `U_n` is the coproduct over the
/// nerve of the products of components, faces are projections, degeneracies
/// diagonals and the duality reverses tuples.
pub fn cech_simplicial_family(cover: &Family) -> Result<SelfDualFamily> {
    Ok(cech_with_nerve(cover)?.0)
}

pub(crate) fn cech_with_nerve(cover: &Family) -> Result<(SelfDualFamily, CechNerve)> {
    let nerve = CechNerve::of(cover)?;
    let us: Vec<Arc<Presheaf>> = cover.components()?.into_iter().map(|c| c.presheaf).collect();
    let prod = |idx: &[usize]| -> Result<Arc<Presheaf>> {
        let factors: Vec<&Presheaf> = idx.iter().map(|&i| &*us[i]).collect();
        Ok(Arc::new(product_n(&factors)?.0))
    };
    let h1: Vec<Arc<Presheaf>> = nerve.pairs.iter().map(|p| prod(p)).collect::<Result<_>>()?;
    let h2: Vec<Arc<Presheaf>> = nerve.triples.iter().map(|t| prod(t)).collect::<Result<_>>()?;
    let sizes = |idx: &[usize], p: usize| -> Vec<usize> { idx.iter().map(|&i| us[i].fiber_size(p)).collect() };
    let np = cover.base().len();
    // The map between products sending coordinates `c` to `c[pick[k]]`.
    let tuple_map = |src: &[usize], tgt: &[usize], pick: &[usize]| -> PresheafMap {
        PresheafMap::new(
            (0..np)
                .map(|p| {
                    let ss = sizes(src, p);
                    let ts = sizes(tgt, p);
                    let total: usize = ss.iter().product();
                    (0..total)
                        .map(|idx| {
                            let c = crate::fintopos::tuple_coords(&ss, idx);
                            let t: Vec<usize> = pick.iter().map(|&k| c[k]).collect();
                            crate::fintopos::tuple_index(&ts, &t)
                        })
                        .collect()
                })
                .collect(),
        )
    };
    let mut data = ComponentData { h0: us.clone(), h1, h2, ..Default::default() };
    for &[i, j] in &nerve.pairs {
        let e = [i, j];
        data.faces1.push([tuple_map(&e, &[j], &[1]), tuple_map(&e, &[i], &[0])]);
        data.degen1.push([tuple_map(&e, &[i, i, j], &[0, 0, 1]), tuple_map(&e, &[i, j, j], &[0, 1, 1])]);
        data.tau1.push(tuple_map(&e, &[j, i], &[1, 0]));
    }
    for &[i, j, k] in &nerve.triples {
        let t = [i, j, k];
        data.faces2.push([tuple_map(&t, &[j, k], &[1, 2]), tuple_map(&t, &[i, k], &[0, 2]), tuple_map(&t, &[i, j], &[0, 1])]);
        data.tau2.push(tuple_map(&t, &[k, j, i], &[2, 1, 0]));
    }
    for i in 0..us.len() {
        data.degen0.push(tuple_map(&[i], &[i, i], &[0, 0]));
    }
    let f = assemble(nerve.sset.clone(), nerve.duality.clone(), data)?;
    Ok((f, nerve))
}

/// The canonical morphism from a simplicial family to the Cech family of its
/// level-0 family.
#[derive(Debug, Clone)]
pub struct Counit {
    pub cech: SelfDualFamily,
    pub alpha: SimplicialMap,
    /// Total maps `h_n: H_n -> U_n`.
    pub h: [PresheafMap; 3],
}

/// Builds the counit: `alpha_1(l) = (d1 l, d0 l)`, `h_1 = (d_1, d_0)`, and
/// on 2-simplices the vertices and the three composite legs.
pub fn counit(f: &SimplicialFamily) -> Result<Counit> {
    let violations = validate_family(f);
    if let Some(v) = violations.first() {
        return Err(Error::Invalid(v.to_string()));
    }
    let cover = f.level0_family()?;
    let (cech, nerve) = cech_with_nerve(&cover)?;
    let s = f.sset();
    let missing = || Error::Invalid("a component maps into an empty product".into());
    let h0_alpha: Vec<usize> = (0..s.s0.len()).collect();
    let h1_alpha: Vec<usize> =
        (0..s.s1.len()).map(|l| nerve.pair(s.src(l), s.tgt(l)).ok_or_else(missing)).collect::<Result<_>>()?;
    let verts = |w: usize| {
        let [d0, _, d2] = s.faces2[w];
        [s.src(d2), s.tgt(d2), s.tgt(d0)]
    };
    let h2_alpha: Vec<usize> = (0..s.s2.len())
        .map(|w| {
            let [i, j, k] = verts(w);
            nerve.triple(i, j, k).ok_or_else(missing)
        })
        .collect::<Result<_>>()?;
    let alpha = SimplicialMap { h0: h0_alpha, h1: h1_alpha, h2: h2_alpha };
    let np = f.base().len();
    let cf = &cech.family;
    let h0 = PresheafMap::new(
        (0..np)
            .map(|p| {
                (0..f.level(0).fiber_size(p))
                    .map(|e| cf.members(0, f.zeta(0, p, e), p)[f.local(0, p, e)])
                    .collect()
            })
            .collect(),
    );
    let u = |i: usize, p: usize| f.component(0, i).fiber_size(p);
    let h1 = PresheafMap::new(
        (0..np)
            .map(|p| {
                (0..f.level(1).fiber_size(p))
                    .map(|e| {
                        let l = f.zeta(1, p, e);
                        let j = s.tgt(l);
                        let a = f.local(0, p, f.face1(1).apply(p, e));
                        let b = f.local(0, p, f.face1(0).apply(p, e));
                        cf.members(1, alpha.h1[l], p)[a * u(j, p) + b]
                    })
                    .collect()
            })
            .collect(),
    );
    let h2 = PresheafMap::new(
        (0..np)
            .map(|p| {
                (0..f.level(2).fiber_size(p))
                    .map(|e| {
                        let w = f.zeta(2, p, e);
                        let [_, j, k] = verts(w);
                        let e2 = f.face2(2).apply(p, e);
                        let e0 = f.face2(0).apply(p, e);
                        let a = f.local(0, p, f.face1(1).apply(p, e2));
                        let b = f.local(0, p, f.face1(0).apply(p, e2));
                        let c = f.local(0, p, f.face1(0).apply(p, e0));
                        cf.members(2, alpha.h2[w], p)[(a * u(j, p) + b) * u(k, p) + c]
                    })
                    .collect()
            })
            .collect(),
    );
    Ok(Counit { cech, alpha, h: [h0, h1, h2] })
}

/// Naturality and commutation of the counit with structure maps, faces,
/// degeneracies and, for self-dual families, the dualities.
pub fn check_counit(f: &SimplicialFamily, duality: Option<(&StrictDuality, &[PresheafMap; 2])>, c: &Counit) -> Vec<Violation> {
    let mut out = c.alpha.check(f.sset(), c.cech.sset());
    let cf = &c.cech.family;
    for n in 0..3 {
        check_maps(&mut out, &format!("h_{n}"), &c.h[n], f.level(n), cf.level(n));
    }
    if !out.is_empty() {
        return out;
    }
    let alpha = [&c.alpha.h0, &c.alpha.h1, &c.alpha.h2];
    let np = f.base().len();
    for p in 0..np {
        for n in 0..3 {
            for e in 0..f.level(n).fiber_size(p) {
                if cf.zeta(n, p, c.h[n].apply(p, e)) != alpha[n][f.zeta(n, p, e)] {
                    out.push(Violation::new(format!("zeta h_{n} = alpha_{n} zeta"), f.level(n).label(p, e).to_string()));
                }
            }
        }
        for e in 0..f.level(1).fiber_size(p) {
            let img = c.h[1].apply(p, e);
            for i in 0..2 {
                if cf.face1(i).apply(p, img) != c.h[0].apply(p, f.face1(i).apply(p, e)) {
                    out.push(Violation::new(format!("h d{i} = d{i} h"), f.level(1).label(p, e).to_string()));
                }
                if cf.degen1(i).apply(p, img) != c.h[2].apply(p, f.degen1(i).apply(p, e)) {
                    out.push(Violation::new(format!("h s{i} = s{i} h"), f.level(1).label(p, e).to_string()));
                }
            }
            if let Some((_, tau)) = duality {
                if c.cech.tau_h[0].apply(p, img) != c.h[1].apply(p, tau[0].apply(p, e)) {
                    out.push(Violation::new("h tau_1 = tau_1 h", f.level(1).label(p, e).to_string()));
                }
            }
        }
        for e in 0..f.level(2).fiber_size(p) {
            let img = c.h[2].apply(p, e);
            for i in 0..3 {
                if cf.face2(i).apply(p, img) != c.h[1].apply(p, f.face2(i).apply(p, e)) {
                    out.push(Violation::new(format!("h d{i} = d{i} h"), f.level(2).label(p, e).to_string()));
                }
            }
            if let Some((_, tau)) = duality {
                if c.cech.tau_h[1].apply(p, img) != c.h[2].apply(p, tau[1].apply(p, e)) {
                    out.push(Violation::new("h tau_2 = tau_2 h", f.level(2).label(p, e).to_string()));
                }
            }
        }
        for e in 0..f.level(0).fiber_size(p) {
            if cf.degen0().apply(p, c.h[0].apply(p, e)) != c.h[1].apply(p, f.degen0().apply(p, e)) {
                out.push(Violation::new("h s0 = s0 h", f.level(0).label(p, e).to_string()));
            }
        }
    }
    if let Some((tau, _)) = duality {
        let ct = &c.cech.duality;
        for l in 0..f.sset().s1.len() {
            if ct.tau1[c.alpha.h1[l]] != c.alpha.h1[tau.tau1[l]] {
                out.push(Violation::new("alpha tau_1 = tau_1 alpha", f.sset().s1[l].clone()));
            }
        }
        for w in 0..f.sset().s2.len() {
            if ct.tau2[c.alpha.h2[w]] != c.alpha.h2[tau.tau2[w]] {
                out.push(Violation::new("alpha tau_2 = tau_2 alpha", f.sset().s2[w].clone()));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fintopos::FinPoset;

    fn fixture() -> Family {
        let pt = Arc::new(FinPoset::one_point());
        let u1 = Presheaf::constant(&["a"], pt.clone());
        let u2 = Presheaf::constant(&["b", "c"], pt.clone());
        Family::from_components(pt, &[("1", &u1), ("2", &u2)]).unwrap()
    }

    #[test]
    fn cech_family_is_valid() {
        let f = cech_simplicial_family(&fixture()).unwrap();
        assert!(validate_selfdual(&f).is_empty());
        assert_eq!(f.family.level(1).fiber_size(0), 9);
        // l = (2,1) forces w = (2,1,2), whose middle face (2,2) has distinct
        // projections on U_2 x U_2.
        let l = condition_g_failure(&f).unwrap();
        assert_eq!(f.sset().src(l), 1);
        assert!(!condition_g(&f));
    }

    #[test]
    fn singleton_cover_satisfies_condition_g() {
        let pt = Arc::new(FinPoset::one_point());
        let u = Presheaf::constant(&["a"], pt.clone());
        let f = cech_simplicial_family(&Family::from_components(pt, &[("1", &u)]).unwrap()).unwrap();
        assert!(condition_g(&f));
        assert!(condition_g_witness(&f, 0).is_some());
        for n in 0..3 {
            assert_eq!(f.family.level(n).total_size(), 1);
        }
    }

    #[test]
    fn cech_duality_is_the_symmetry() {
        let cover = fixture();
        let (f, nerve) = cech_with_nerve(&cover).unwrap();
        let l12 = nerve.pair(0, 1).unwrap();
        let l21 = nerve.pair(1, 0).unwrap();
        let tau = f.tau1_component(l12);
        // (a,b) at local 0 goes to (b,a) at local 0; (a,c) to (c,a).
        assert_eq!(tau.component(0), &[0, 1]);
        let comp21 = f.family.component(1, l21);
        assert_eq!(comp21.label(0, 1), "(2,1)/(2/c,1/a)");
    }

    #[test]
    fn spans_of_the_cech_family() {
        let (f, nerve) = cech_with_nerve(&fixture()).unwrap();
        let s = f.family.span_of_1simplex(nerve.pair(0, 1).unwrap()).unwrap();
        assert_eq!(s.feet, [0, 1]);
        assert_eq!(s.left.component(0), &[0, 0]);
        assert_eq!(s.right.component(0), &[0, 1]);
        let w = f.family.span_of_2simplex(nerve.triple(0, 1, 1).unwrap()).unwrap();
        assert_eq!(w.vertices, [0, 1, 1]);
        assert_eq!(w.vertex_maps[2].component(0), &[0, 1, 0, 1]);
        assert_eq!(w.vertex_maps[1].component(0), &[0, 0, 1, 1]);
        let d = f.family.span_of_1simplex(f.sset().degen0[0]).unwrap();
        assert_eq!(d.left, d.right);
    }

    #[test]
    fn counit_of_cech_is_identity() {
        let f = cech_simplicial_family(&fixture()).unwrap();
        let c = counit(&f.family).unwrap();
        assert!(check_counit(&f.family, Some((&f.duality, &f.tau_h)), &c).is_empty());
        assert_eq!(c.alpha, SimplicialMap::identity(f.sset()));
        for n in 0..3 {
            assert_eq!(c.h[n], PresheafMap::identity(f.family.level(n)));
        }
    }

    #[test]
    fn broken_structure_map_is_reported() {
        let f = cech_simplicial_family(&fixture()).unwrap();
        let fam = &f.family;
        let mut d0 = fam.face1(0).components().to_vec();
        // Send an element of (H_1)_(1,2) into the wrong vertex component.
        let e = fam.members(1, 1, 0)[0];
        d0[0][e] = 0;
        let broken = SimplicialFamily::new(
            fam.sset().clone(),
            TotalLevels {
                levels: [fam.level(0).clone(), fam.level(1).clone(), fam.level(2).clone()],
                zeta: [0, 1, 2].map(|n| (0..1).map(|p| (0..fam.level(n).fiber_size(p)).map(|e| fam.zeta(n, p, e)).collect()).collect()),
                faces1: [PresheafMap::new(d0), fam.face1(1).clone()],
                faces2: [fam.face2(0).clone(), fam.face2(1).clone(), fam.face2(2).clone()],
                degen0: fam.degen0().clone(),
                degen1: [fam.degen1(0).clone(), fam.degen1(1).clone()],
            },
        )
        .unwrap();
        assert!(validate_family(&broken).iter().any(|v| v.law == "zeta d0 = d0 zeta"));
    }
}
