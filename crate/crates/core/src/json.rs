//! JSON documents for posets, presheaves, covers, simplicial families, span
//! classes, descent data and hypercover indices.
//!
//! Everything is keyed by labels. The order of points, fiber elements,
//! simplices and index labels comes from the lists in the document; maps
//! are nested objects `{"point": {"element": "image"}}`.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::descent::{SDescentDatum, UDescentDatum};
use crate::error::{Error, Result};
use crate::family::{cech_simplicial_family, SelfDualFamily, SimplicialFamily, Span1, TotalLevels};
use crate::fintopos::{Family, FinPoset, Presheaf, PresheafMap};
use crate::groupoid::{GroupoidPresentation, RelationOrigin};
use crate::hypercover::{connected_refinement, generator_refinement, SpanClass, SpanClassSp};
use crate::perm::Bij;
use crate::progroupoid::{CoverMap, HypercoverIndex, HypercoverNode, IndexEdge};
use crate::simplicial::{StrictDuality, TruncSSet};

/// `{"label": "image"}`.
pub type Table = BTreeMap<String, String>;
/// A map of presheaves: `{"point": {"element": "image"}}`.
pub type MapJson = BTreeMap<String, Table>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosetJson {
    pub points: Vec<String>,
    /// Generating pairs `[p, q]` with `p <= q`.
    #[serde(default)]
    pub leq: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresheafJson {
    /// Missing points have empty fibers.
    pub fibers: BTreeMap<String, Vec<String>>,
    /// Keyed `"q>p"`; pairs that are not given are composed from given ones.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub restrictions: MapJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentJson {
    pub label: String,
    pub fibers: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub restrictions: MapJson,
}

/// A cover either in total form (`total`, `index`, `zeta`) or as a list of
/// `components`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverJson {
    pub poset: PosetJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total: Option<PresheafJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta: Option<MapJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<ComponentJson>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FacesJson {
    #[serde(rename = "1")]
    pub one: BTreeMap<String, [String; 2]>,
    #[serde(rename = "2")]
    pub two: BTreeMap<String, [String; 3]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DegeneraciesJson {
    #[serde(rename = "0")]
    pub zero: Table,
    #[serde(rename = "1")]
    pub one: BTreeMap<String, [String; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DualityJson {
    #[serde(rename = "1")]
    pub one: Table,
    #[serde(rename = "2")]
    pub two: Table,
}

/// A 2-truncated simplicial set: `d` gives `[d0, d1]` and `[d0, d1, d2]`,
/// `s` gives `s0` on vertices and `[s0, s1]` on 1-simplices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SSetJson {
    #[serde(rename = "S0")]
    pub s0: Vec<String>,
    #[serde(rename = "S1")]
    pub s1: Vec<String>,
    #[serde(rename = "S2")]
    pub s2: Vec<String>,
    pub d: FacesJson,
    pub s: DegeneraciesJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<DualityJson>,
}

/// One level of a family in total form, with `zeta` naming simplices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelJson {
    pub fibers: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub restrictions: MapJson,
    pub zeta: MapJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyJson {
    pub poset: PosetJson,
    pub sset: SSetJson,
    pub levels: [LevelJson; 3],
    pub faces1: [MapJson; 2],
    pub faces2: [MapJson; 3],
    pub degen0: MapJson,
    pub degen1: [MapJson; 2],
    /// Total dualities on `H_1` and `H_2`.
    pub tau_h: [MapJson; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpanJson {
    pub vertex: PresheafJson,
    pub feet: [String; 2],
    pub left: MapJson,
    pub right: MapJson,
}

/// A vertex class (`vertices`) or a 1-span class (`spans`) over a cover.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassJson {
    #[serde(default)]
    pub vertices: Vec<PresheafJson>,
    #[serde(default)]
    pub spans: Vec<SpanJson>,
}

/// A descent datum on a cover: either `sigma` per Cech 1-simplex, point
/// and element of `U_i x U_j`, or a constant `s` per Cech 1-simplex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatumJson {
    pub carriers: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<BTreeMap<String, BTreeMap<String, BTreeMap<String, Table>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<BTreeMap<String, Table>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeJson {
    pub label: String,
    /// A path relative to the index file, or an inline cover.
    pub cover: Value,
    /// `connected` (default) or `generator`.
    #[serde(default)]
    pub refinement: Option<String>,
    /// Size bound on connected sub-objects added to the vertex class.
    #[serde(default)]
    pub bound: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeJson {
    pub from: String,
    pub to: String,
    /// Index map of the covers, source label to target label.
    pub index: Table,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexJson {
    pub nodes: Vec<NodeJson>,
    #[serde(default)]
    pub edges: Vec<EdgeJson>,
}

/// Parses a document, reporting line and column on failure.
pub fn parse<T: DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io { path: path.display().to_string(), reason: e.to_string() })
}

fn unknown(label: &str, context: impl Into<String>) -> Error {
    Error::UnknownLabel { label: label.to_string(), context: context.into() }
}

fn position(list: &[String], label: &str, context: &str) -> Result<usize> {
    list.iter().position(|x| x == label).ok_or_else(|| unknown(label, context))
}

fn check_keys<'a>(keys: impl Iterator<Item = &'a String>, known: &[String], context: &str) -> Result<()> {
    for k in keys {
        if !known.contains(k) {
            return Err(unknown(k, context));
        }
    }
    Ok(())
}

pub fn poset_from_json(j: &PosetJson) -> Result<FinPoset> {
    let pairs: Vec<(&str, &str)> = j.leq.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    let points: Vec<&str> = j.points.iter().map(String::as_str).collect();
    FinPoset::new(&points, &pairs)
}

pub fn poset_to_json(p: &FinPoset) -> PosetJson {
    PosetJson {
        points: p.labels().to_vec(),
        leq: p.covering_pairs().into_iter().map(|(a, b)| (p.label(a).to_string(), p.label(b).to_string())).collect(),
    }
}

fn fibers_from(base: &FinPoset, fibers: &BTreeMap<String, Vec<String>>, context: &str) -> Result<Vec<Vec<String>>> {
    check_keys(fibers.keys(), base.labels(), &format!("{context}.fibers"))?;
    Ok(base.labels().iter().map(|p| fibers.get(p).cloned().unwrap_or_default()).collect())
}

fn restrictions_from(
    base: &FinPoset,
    fibers: &[Vec<String>],
    res: &MapJson,
    context: &str,
) -> Result<HashMap<(usize, usize), Vec<usize>>> {
    let mut given = HashMap::new();
    for (key, table) in res {
        let ctx = format!("{context}.restrictions");
        let (q, p) = key.split_once('>').ok_or_else(|| Error::Parse(format!("{ctx}: key `{key}` is not of the form q>p")))?;
        let (q, p) = (position(base.labels(), q, &ctx)?, position(base.labels(), p, &ctx)?);
        let ctx = format!("{ctx}.{key}");
        check_keys(table.keys(), &fibers[q], &ctx)?;
        let mut m = Vec::new();
        for e in &fibers[q] {
            let img = table.get(e).ok_or_else(|| Error::Malformed(format!("{ctx}: no image for `{e}`")))?;
            m.push(position(&fibers[p], img, &ctx)?);
        }
        given.insert((q, p), m);
    }
    Ok(given)
}

fn presheaf_parts(
    base: &Arc<FinPoset>,
    fibers: &BTreeMap<String, Vec<String>>,
    res: &MapJson,
    context: &str,
) -> Result<Presheaf> {
    let fibers = fibers_from(base, fibers, context)?;
    let given = restrictions_from(base, &fibers, res, context)?;
    Presheaf::from_restrictions(base.clone(), fibers, &given).map_err(|e| match e {
        Error::Malformed(m) => Error::Malformed(format!("{context}: {m}")),
        other => other,
    })
}

pub fn presheaf_from_json(base: &Arc<FinPoset>, j: &PresheafJson, context: &str) -> Result<Presheaf> {
    presheaf_parts(base, &j.fibers, &j.restrictions, context)
}

fn fibers_to(x: &Presheaf) -> BTreeMap<String, Vec<String>> {
    let base = x.base();
    (0..base.len()).map(|p| (base.label(p).to_string(), x.fiber(p).to_vec())).collect()
}

fn restrictions_to(x: &Presheaf) -> MapJson {
    let base = x.base();
    base.covering_pairs()
        .into_iter()
        .filter(|&(_, q)| x.fiber_size(q) > 0)
        .map(|(p, q)| {
            let t = (0..x.fiber_size(q)).map(|e| (x.label(q, e).to_string(), x.label(p, x.restrict(q, p, e)).to_string()));
            (format!("{}>{}", base.label(q), base.label(p)), t.collect())
        })
        .collect()
}

/// Restrictions are written along the covering pairs of the base only.
pub fn presheaf_to_json(x: &Presheaf) -> PresheafJson {
    PresheafJson { fibers: fibers_to(x), restrictions: restrictions_to(x) }
}

/// A natural map `src -> tgt` read from labels.
pub fn map_from_json(j: &MapJson, src: &Presheaf, tgt: &Presheaf, context: &str) -> Result<PresheafMap> {
    let base = src.base();
    check_keys(j.keys(), base.labels(), context)?;
    let mut comps = Vec::new();
    for p in 0..base.len() {
        let ctx = format!("{context}.{}", base.label(p));
        let empty = Table::new();
        let table = j.get(base.label(p)).unwrap_or(&empty);
        check_keys(table.keys(), src.fiber(p), &ctx)?;
        let mut row = Vec::new();
        for e in src.fiber(p) {
            let img = table.get(e).ok_or_else(|| Error::Malformed(format!("{ctx}: no image for `{e}`")))?;
            row.push(position(tgt.fiber(p), img, &ctx)?);
        }
        comps.push(row);
    }
    let m = PresheafMap::new(comps);
    if let Some(v) = m.check(src, tgt).first() {
        return Err(Error::Malformed(format!("{context}: {v}")));
    }
    Ok(m)
}

pub fn map_to_json(m: &PresheafMap, src: &Presheaf, tgt: &Presheaf) -> MapJson {
    let base = src.base();
    (0..base.len())
        .filter(|&p| src.fiber_size(p) > 0)
        .map(|p| {
            let t = (0..src.fiber_size(p)).map(|e| (src.label(p, e).to_string(), tgt.label(p, m.apply(p, e)).to_string()));
            (base.label(p).to_string(), t.collect())
        })
        .collect()
}

fn zeta_from(base: &FinPoset, total: &Presheaf, zeta: &MapJson, index: &[String], context: &str) -> Result<Vec<Vec<usize>>> {
    check_keys(zeta.keys(), base.labels(), context)?;
    let mut out = Vec::new();
    for p in 0..base.len() {
        let ctx = format!("{context}.{}", base.label(p));
        let empty = Table::new();
        let table = zeta.get(base.label(p)).unwrap_or(&empty);
        check_keys(table.keys(), total.fiber(p), &ctx)?;
        let mut row = Vec::new();
        for e in total.fiber(p) {
            let i = table.get(e).ok_or_else(|| Error::Malformed(format!("{ctx}: no index for `{e}`")))?;
            row.push(position(index, i, &ctx)?);
        }
        out.push(row);
    }
    Ok(out)
}

fn zeta_to(x: &Presheaf, index: &[String], zeta: impl Fn(usize, usize) -> usize) -> MapJson {
    let base = x.base();
    (0..base.len())
        .filter(|&p| x.fiber_size(p) > 0)
        .map(|p| {
            let t = (0..x.fiber_size(p)).map(|e| (x.label(p, e).to_string(), index[zeta(p, e)].clone()));
            (base.label(p).to_string(), t.collect())
        })
        .collect()
}

pub fn cover_from_json(j: &CoverJson) -> Result<Family> {
    let base = Arc::new(poset_from_json(&j.poset)?);
    match (&j.components, &j.total, &j.index, &j.zeta) {
        (Some(parts), None, None, None) => {
            let ps: Vec<Presheaf> = parts
                .iter()
                .map(|c| presheaf_parts(&base, &c.fibers, &c.restrictions, &format!("components.{}", c.label)))
                .collect::<Result<_>>()?;
            let named: Vec<(&str, &Presheaf)> = parts.iter().map(|c| c.label.as_str()).zip(&ps).collect();
            Family::from_components(base, &named)
        }
        (None, Some(total), Some(index), Some(zeta)) => {
            let total = presheaf_from_json(&base, total, "total")?;
            let z = zeta_from(&base, &total, zeta, index, "zeta")?;
            Family::new(total, index.clone(), z)
        }
        _ => Err(Error::Parse("cover: give either `components` or all of `total`, `index` and `zeta`".into())),
    }
}

/// Writes the total form.
pub fn cover_to_json(f: &Family) -> CoverJson {
    CoverJson {
        poset: poset_to_json(f.base()),
        total: Some(presheaf_to_json(f.total())),
        index: Some(f.index().to_vec()),
        zeta: Some(zeta_to(f.total(), f.index(), |p, e| f.zeta(p, e))),
        components: None,
    }
}

pub fn read_cover(text: &str) -> Result<Family> {
    cover_from_json(&parse(text, "cover")?)
}

pub fn sset_to_json(s: &TruncSSet, tau: Option<&StrictDuality>) -> SSetJson {
    let l1 = |l: usize| s.s1[l].clone();
    SSetJson {
        s0: s.s0.clone(),
        s1: s.s1.clone(),
        s2: s.s2.clone(),
        d: FacesJson {
            one: s.faces1.iter().enumerate().map(|(l, f)| (l1(l), f.map(|i| s.s0[i].clone()))).collect(),
            two: s.faces2.iter().enumerate().map(|(w, f)| (s.s2[w].clone(), f.map(l1))).collect(),
        },
        s: DegeneraciesJson {
            zero: s.degen0.iter().enumerate().map(|(i, &l)| (s.s0[i].clone(), l1(l))).collect(),
            one: s.degen1.iter().enumerate().map(|(l, d)| (l1(l), d.map(|w| s.s2[w].clone()))).collect(),
        },
        tau: tau.map(|t| DualityJson {
            one: t.tau1.iter().enumerate().map(|(l, &m)| (l1(l), l1(m))).collect(),
            two: t.tau2.iter().enumerate().map(|(w, &v)| (s.s2[w].clone(), s.s2[v].clone())).collect(),
        }),
    }
}

fn lookup<'a, V>(m: &'a BTreeMap<String, V>, key: &str, context: &str) -> Result<&'a V> {
    m.get(key).ok_or_else(|| Error::Malformed(format!("{context}: nothing given for `{key}`")))
}

pub fn sset_from_json(j: &SSetJson) -> Result<(TruncSSet, Option<StrictDuality>)> {
    check_keys(j.d.one.keys(), &j.s1, "sset.d.1")?;
    check_keys(j.d.two.keys(), &j.s2, "sset.d.2")?;
    check_keys(j.s.zero.keys(), &j.s0, "sset.s.0")?;
    check_keys(j.s.one.keys(), &j.s1, "sset.s.1")?;
    let mut s = TruncSSet { s0: j.s0.clone(), s1: j.s1.clone(), s2: j.s2.clone(), ..TruncSSet::default() };
    for l in &j.s1 {
        let f = lookup(&j.d.one, l, "sset.d.1")?;
        s.faces1.push([position(&j.s0, &f[0], "sset.d.1")?, position(&j.s0, &f[1], "sset.d.1")?]);
        let d = lookup(&j.s.one, l, "sset.s.1")?;
        s.degen1.push([position(&j.s2, &d[0], "sset.s.1")?, position(&j.s2, &d[1], "sset.s.1")?]);
    }
    for w in &j.s2 {
        let f = lookup(&j.d.two, w, "sset.d.2")?;
        let mut out = [0; 3];
        for k in 0..3 {
            out[k] = position(&j.s1, &f[k], "sset.d.2")?;
        }
        s.faces2.push(out);
    }
    for i in &j.s0 {
        s.degen0.push(position(&j.s1, lookup(&j.s.zero, i, "sset.s.0")?, "sset.s.0")?);
    }
    let tau = match &j.tau {
        None => None,
        Some(t) => {
            check_keys(t.one.keys(), &j.s1, "sset.tau.1")?;
            check_keys(t.two.keys(), &j.s2, "sset.tau.2")?;
            let tau1 = j.s1.iter().map(|l| position(&j.s1, lookup(&t.one, l, "sset.tau.1")?, "sset.tau.1")).collect::<Result<_>>()?;
            let tau2 = j.s2.iter().map(|w| position(&j.s2, lookup(&t.two, w, "sset.tau.2")?, "sset.tau.2")).collect::<Result<_>>()?;
            Some(StrictDuality { tau1, tau2 })
        }
    };
    Ok((s, tau))
}

/// The nerve document: simplices, structure maps and simplex counts.
pub fn nerve_to_json(s: &TruncSSet, tau: Option<&StrictDuality>) -> Value {
    json!({
        "counts": {"N0": s.s0.len(), "N1": s.s1.len(), "N2": s.s2.len()},
        "sset": sset_to_json(s, tau),
    })
}

fn simplex_labels(s: &TruncSSet, n: usize) -> &[String] {
    [&s.s0, &s.s1, &s.s2][n]
}

pub fn family_to_json(f: &SelfDualFamily) -> FamilyJson {
    let g = &f.family;
    let s = g.sset();
    let h = |n: usize| g.level(n);
    let level = |n: usize| LevelJson {
        fibers: fibers_to(h(n)),
        restrictions: restrictions_to(h(n)),
        zeta: zeta_to(h(n), simplex_labels(s, n), |p, e| g.zeta(n, p, e)),
    };
    FamilyJson {
        poset: poset_to_json(g.base()),
        sset: sset_to_json(s, Some(&f.duality)),
        levels: [level(0), level(1), level(2)],
        faces1: [0, 1].map(|k| map_to_json(g.face1(k), h(1), h(0))),
        faces2: [0, 1, 2].map(|k| map_to_json(g.face2(k), h(2), h(1))),
        degen0: map_to_json(g.degen0(), h(0), h(1)),
        degen1: [0, 1].map(|k| map_to_json(g.degen1(k), h(1), h(2))),
        tau_h: [map_to_json(&f.tau_h[0], h(1), h(1)), map_to_json(&f.tau_h[1], h(2), h(2))],
    }
}

/// Reads a self-dual family. Laws are not checked here; see
/// [`validate_selfdual`](crate::family::validate_selfdual).
pub fn family_from_json(j: &FamilyJson) -> Result<SelfDualFamily> {
    let base = Arc::new(poset_from_json(&j.poset)?);
    let (sset, tau) = sset_from_json(&j.sset)?;
    let duality = tau.ok_or_else(|| Error::Malformed("sset.tau is required for a family".into()))?;
    let mut levels = Vec::new();
    let mut zeta = Vec::new();
    for (n, l) in j.levels.iter().enumerate() {
        let ctx = format!("levels[{n}]");
        let x = presheaf_parts(&base, &l.fibers, &l.restrictions, &ctx)?;
        zeta.push(zeta_from(&base, &x, &l.zeta, simplex_labels(&sset, n), &format!("{ctx}.zeta"))?);
        levels.push(x);
    }
    let levels: [Presheaf; 3] = levels.try_into().expect("three levels");
    let m = |j: &MapJson, s: usize, t: usize, ctx: String| map_from_json(j, &levels[s], &levels[t], &ctx);
    let faces1 = [m(&j.faces1[0], 1, 0, "faces1[0]".into())?, m(&j.faces1[1], 1, 0, "faces1[1]".into())?];
    let faces2 = [
        m(&j.faces2[0], 2, 1, "faces2[0]".into())?,
        m(&j.faces2[1], 2, 1, "faces2[1]".into())?,
        m(&j.faces2[2], 2, 1, "faces2[2]".into())?,
    ];
    let degen0 = m(&j.degen0, 0, 1, "degen0".into())?;
    let degen1 = [m(&j.degen1[0], 1, 2, "degen1[0]".into())?, m(&j.degen1[1], 1, 2, "degen1[1]".into())?];
    let tau_h = [m(&j.tau_h[0], 1, 1, "tau_h[0]".into())?, m(&j.tau_h[1], 2, 2, "tau_h[1]".into())?];
    let zeta: [Vec<Vec<usize>>; 3] = zeta.try_into().expect("three levels");
    let family = SimplicialFamily::new(sset, TotalLevels { levels: levels.clone(), zeta, faces1, faces2, degen0, degen1 })?;
    Ok(SelfDualFamily { family, duality, tau_h })
}

/// Reads a span class over `cover`. Span legs use the element labels of the
/// components `U_i` as they appear in the cover's total presheaf.
pub fn class_from_json(cover: &Family, j: &ClassJson) -> Result<(SpanClass, SpanClassSp)> {
    let base = cover.base();
    let comps = cover.components()?;
    let vertices = j
        .vertices
        .iter()
        .enumerate()
        .map(|(k, v)| presheaf_from_json(base, v, &format!("vertices[{k}]")).map(Arc::new))
        .collect::<Result<_>>()?;
    let mut spans = Vec::new();
    for (k, s) in j.spans.iter().enumerate() {
        let ctx = format!("spans[{k}]");
        let vertex = Arc::new(presheaf_from_json(base, &s.vertex, &ctx)?);
        let i = position(cover.index(), &s.feet[0], &format!("{ctx}.feet"))?;
        let jj = position(cover.index(), &s.feet[1], &format!("{ctx}.feet"))?;
        let left = map_from_json(&s.left, &vertex, &comps[i].presheaf, &format!("{ctx}.left"))?;
        let right = map_from_json(&s.right, &vertex, &comps[jj].presheaf, &format!("{ctx}.right"))?;
        spans.push(Span1 { vertex, feet: [i, jj], left, right });
    }
    Ok((SpanClass(vertices), SpanClassSp(spans)))
}

fn carriers_from(cover: &Family, j: &BTreeMap<String, Vec<String>>) -> Result<Vec<Vec<String>>> {
    check_keys(j.keys(), cover.index(), "carriers")?;
    cover.index().iter().map(|i| lookup(j, i, "carriers").cloned()).collect()
}

fn bij_from(t: &Table, dom: &[String], cod: &[String], context: &str) -> Result<Bij> {
    check_keys(t.keys(), dom, context)?;
    let images = dom
        .iter()
        .map(|x| Ok(position(cod, lookup(t, x, context)?, context)? as u32))
        .collect::<Result<Vec<u32>>>()?;
    if dom.len() != cod.len() {
        return Err(Error::Malformed(format!("{context}: carriers of different sizes")));
    }
    Bij::from_images(images).ok_or_else(|| Error::Malformed(format!("{context}: not a bijection")))
}

fn bij_to(b: &Bij, dom: &[String], cod: &[String]) -> Table {
    dom.iter().enumerate().map(|(x, l)| (l.clone(), cod[b.apply(x)].clone())).collect()
}

/// Element keys of `sigma` drop the `simplex/` prefix of the Cech labels,
/// leaving the pair `(x,y)` of `U_i x U_j`.
fn pair_key<'a>(simplex: &str, element: &'a str) -> &'a str {
    element.strip_prefix(simplex).and_then(|r| r.strip_prefix('/')).unwrap_or(element)
}

/// Reads a descent datum on `cover`. The `s` form is expanded to a datum
/// that is constant on every `U_i x U_j`; law violations are left to
/// [`validate_u_descent`](crate::descent::validate_u_descent).
pub fn datum_from_json(cover: &Family, j: &DatumJson) -> Result<UDescentDatum> {
    let carriers = carriers_from(cover, &j.carriers)?;
    let cech = cech_simplicial_family(cover)?;
    let f = &cech.family;
    let s = f.sset();
    let base = f.base();
    match (&j.sigma, &j.s) {
        (Some(sigma), None) => {
            check_keys(sigma.keys(), &s.s1, "sigma")?;
            let mut out = Vec::new();
            for l in 0..s.s1.len() {
                let comp = f.component(1, l);
                let (dom, cod) = (&carriers[s.src(l)], &carriers[s.tgt(l)]);
                let empty = BTreeMap::new();
                let at_l = sigma.get(&s.s1[l]).unwrap_or(&empty);
                check_keys(at_l.keys(), base.labels(), &format!("sigma.{}", s.s1[l]))?;
                let mut per_point = Vec::new();
                for p in 0..base.len() {
                    let ctx = format!("sigma.{}.{}", s.s1[l], base.label(p));
                    let empty = BTreeMap::new();
                    let at_p = at_l.get(base.label(p)).unwrap_or(&empty);
                    let keys: Vec<String> = comp.fiber(p).iter().map(|e| pair_key(&s.s1[l], e).to_string()).collect();
                    check_keys(at_p.keys(), &keys, &ctx)?;
                    let row = keys
                        .iter()
                        .map(|e| bij_from(lookup(at_p, e, &ctx)?, dom, cod, &format!("{ctx}.{e}")))
                        .collect::<Result<_>>()?;
                    per_point.push(row);
                }
                out.push(per_point);
            }
            Ok(UDescentDatum { carriers, sigma: out })
        }
        (None, Some(sj)) => {
            check_keys(sj.keys(), &s.s1, "s")?;
            let bijs = (0..s.s1.len())
                .map(|l| {
                    let ctx = format!("s.{}", s.s1[l]);
                    bij_from(lookup(sj, &s.s1[l], "s")?, &carriers[s.src(l)], &carriers[s.tgt(l)], &ctx)
                })
                .collect::<Result<_>>()?;
            let bijs: Vec<Bij> = bijs;
            let sigma = (0..s.s1.len())
                .map(|l| (0..base.len()).map(|p| vec![bijs[l].clone(); f.component(1, l).fiber_size(p)]).collect())
                .collect();
            Ok(UDescentDatum { carriers, sigma })
        }
        _ => Err(Error::Parse("datum: give exactly one of `sigma` and `s`".into())),
    }
}

pub fn datum_to_json(cover: &Family, u: &UDescentDatum) -> Result<DatumJson> {
    let cech = cech_simplicial_family(cover)?;
    let f = &cech.family;
    let s = f.sset();
    let base = f.base();
    let mut sigma = BTreeMap::new();
    for l in 0..s.s1.len() {
        let comp = f.component(1, l);
        let (dom, cod) = (&u.carriers[s.src(l)], &u.carriers[s.tgt(l)]);
        let mut at_l = BTreeMap::new();
        for p in 0..base.len() {
            if comp.fiber_size(p) == 0 {
                continue;
            }
            let at_p = comp
                .fiber(p)
                .iter()
                .enumerate()
                .map(|(e, x)| (pair_key(&s.s1[l], x).to_string(), bij_to(&u.sigma[l][p][e], dom, cod)))
                .collect();
            at_l.insert(base.label(p).to_string(), at_p);
        }
        sigma.insert(s.s1[l].clone(), at_l);
    }
    Ok(DatumJson {
        carriers: cover.index().iter().cloned().zip(u.carriers.iter().cloned()).collect(),
        sigma: Some(sigma),
        s: None,
    })
}

pub fn s_datum_to_json(s: &TruncSSet, d: &SDescentDatum) -> Value {
    let carriers: BTreeMap<&str, &Vec<String>> = s.s0.iter().map(String::as_str).zip(&d.carriers).collect();
    let maps: BTreeMap<&str, Table> = (0..s.s1.len())
        .map(|l| (s.s1[l].as_str(), bij_to(&d.s[l], &d.carriers[s.src(l)], &d.carriers[s.tgt(l)])))
        .collect();
    json!({"carriers": carriers, "s": maps})
}

/// Objects, generators as `{label, src, tgt}`, identities and relations as
/// word labels with their origin.
pub fn presentation_to_json(p: &GroupoidPresentation, s: &TruncSSet) -> Value {
    let generators: Vec<Value> = p
        .generators
        .iter()
        .map(|g| json!({"label": g.label, "src": p.objects[g.src], "tgt": p.objects[g.tgt]}))
        .collect();
    let identities: BTreeMap<&str, &str> = p
        .identities
        .iter()
        .enumerate()
        .filter_map(|(o, g)| g.map(|g| (p.objects[o].as_str(), p.generators[g].label.as_str())))
        .collect();
    let relations: Vec<Value> = p
        .relations
        .iter()
        .map(|r| {
            let origin = match r.origin {
                RelationOrigin::Triangle(w) => format!("triangle {}", s.s2[w]),
                RelationOrigin::SpanMorphism(l, t) => format!("span morphism {} -> {}", s.s1[l], s.s1[t]),
            };
            json!({"lhs": p.word_label(&r.lhs), "rhs": p.word_label(&r.rhs), "origin": origin})
        })
        .collect();
    let triangles = p.relations.iter().filter(|r| matches!(r.origin, RelationOrigin::Triangle(_))).count();
    json!({
        "objects": p.objects,
        "generators": generators,
        "identities": identities,
        "relations": relations,
        "counts": {
            "objects": p.objects.len(),
            "generators": p.generators.len(),
            "relations": p.relations.len(),
            "triangle_relations": triangles,
            "span_relations": p.relations.len() - triangles,
        },
    })
}

/// Reads a hypercover index; node covers given as paths are resolved
/// against `dir`.
pub fn index_from_json(j: &IndexJson, dir: &Path) -> Result<HypercoverIndex> {
    let mut nodes = Vec::new();
    for n in &j.nodes {
        if nodes.iter().any(|m: &HypercoverNode| m.label == n.label) {
            return Err(Error::DuplicateLabel { label: n.label.clone(), context: "nodes".into() });
        }
        let cover = match &n.cover {
            Value::String(path) => read_cover(&read_file(&dir.join(path))?)?,
            v => cover_from_json(&serde_json::from_value(v.clone()).map_err(|e| Error::Parse(format!("node {}: {e}", n.label)))?)?,
        };
        let bound = n.bound.unwrap_or(1);
        let refinement = match n.refinement.as_deref().unwrap_or("connected") {
            "connected" => connected_refinement(&cover, bound)?,
            "generator" => generator_refinement(&cover, bound)?,
            other => return Err(Error::Parse(format!("node {}: unknown refinement `{other}`", n.label))),
        };
        nodes.push(HypercoverNode { label: n.label.clone(), cover, refinement });
    }
    let labels: Vec<String> = nodes.iter().map(|n| n.label.clone()).collect();
    let mut edges = Vec::new();
    for e in &j.edges {
        let from = position(&labels, &e.from, "edges.from")?;
        let to = position(&labels, &e.to, "edges.to")?;
        let (src, tgt) = (&nodes[from].cover, &nodes[to].cover);
        let ctx = format!("edges.{}->{}.index", e.from, e.to);
        check_keys(e.index.keys(), src.index(), &ctx)?;
        let index =
            src.index().iter().map(|i| position(tgt.index(), lookup(&e.index, i, &ctx)?, &ctx)).collect::<Result<_>>()?;
        edges.push(IndexEdge { from, to, cover_map: CoverMap::injective(src, tgt, index)? });
    }
    Ok(HypercoverIndex { nodes, edges })
}
