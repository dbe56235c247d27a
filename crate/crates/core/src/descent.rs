//! Descent data indexed by a simplicial set (`s`), by a simplicial family
//! (`sigma_hat`) and by a cover (`sigma_{j,i}`), with the correspondences
//! between them.
//!
//! Family-indexed data are stored pointwise: `data[l][p][e]` is the
//! bijection `R_i -> R_j` attached to the element `e` (in local order) of
//! the component `(H_1)_l` at the point `p`.

use std::collections::HashSet;

use serde::Serialize;

use crate::csp::BijCsp;
use crate::dsu::Dsu;
use crate::error::{Error, Result, Violation};
use crate::family::{cech_simplicial_family, counit, Counit, SelfDualFamily, SimplicialFamily};
use crate::fintopos::{Family, Presheaf};
use crate::groupoid::{fundamental_presentation, g_fundamental_presentation, span_morphism_pairs, validate_action, GroupoidAction};
use crate::perm::Bij;
use crate::simplicial::TruncSSet;

/// Bijections per simplex, point and local element.
pub type Pointwise = Vec<Vec<Vec<Bij>>>;

/// Carriers `{"0", .., "n-1"}` of the given sizes.
pub fn numbered_carriers(sizes: &[usize]) -> Vec<Vec<String>> {
    sizes.iter().map(|&n| (0..n).map(|k| k.to_string()).collect()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SDescentDatum {
    pub carriers: Vec<Vec<String>>,
    /// `s_l: R_{src l} -> R_{tgt l}` per 1-simplex.
    pub s: Vec<Bij>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct HDescentDatum {
    pub carriers: Vec<Vec<String>>,
    pub sigma_hat: Pointwise,
}

/// A descent datum on a cover, indexed by the 1-simplices `(i,j)` of its
/// Cech nerve; elements of `U_i x U_j` are in product order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct UDescentDatum {
    pub carriers: Vec<Vec<String>>,
    pub sigma: Pointwise,
}

fn check_bij(out: &mut Vec<Violation>, what: &str, b: &Bij, n: usize, m: usize) -> bool {
    if b.len() != n || b.len() != m {
        out.push(Violation::new("bijection", format!("{what} does not map a carrier of size {n} onto one of size {m}")));
        return false;
    }
    true
}

pub fn validate_s_descent(s: &TruncSSet, d: &SDescentDatum) -> Vec<Violation> {
    let mut out = Vec::new();
    if d.carriers.len() != s.s0.len() || d.s.len() != s.s1.len() {
        out.push(Violation::new("shape", "carriers or bijections do not match S_0 / S_1"));
        return out;
    }
    let mut shaped = true;
    for l in 0..s.s1.len() {
        let (n, m) = (d.carriers[s.src(l)].len(), d.carriers[s.tgt(l)].len());
        shaped &= check_bij(&mut out, &format!("s_{}", s.s1[l]), &d.s[l], n, m);
    }
    if !shaped {
        return out;
    }
    for (i, &l) in s.degen0.iter().enumerate() {
        if !d.s[l].is_identity() {
            out.push(Violation::new("identity", format!("s_{} is not the identity of R_{}", s.s1[l], s.s0[i])));
        }
    }
    for w in 0..s.s2.len() {
        let [d0, d1, d2] = s.faces2[w];
        if d.s[d2].then(&d.s[d0]) != d.s[d1] {
            out.push(Violation::new("cocycle", format!("w = {}", s.s2[w])));
        }
    }
    out
}

/// All valid S-descent data with carriers `{0..n-1}` of size at most
/// `bound`, by backtracking over the 1-simplices in order.
pub fn enumerate_s_descent(s: &TruncSSet, bound: usize) -> Vec<SDescentDatum> {
    let mut out = Vec::new();
    // 2-simplices become checkable once their highest face is assigned.
    let mut due: Vec<Vec<usize>> = vec![Vec::new(); s.s1.len()];
    for w in 0..s.s2.len() {
        let last = *s.faces2[w].iter().max().expect("three faces");
        due[last].push(w);
    }
    for_each_size(s.s0.len(), bound, |sizes| {
        if (0..s.s1.len()).any(|l| sizes[s.src(l)] != sizes[s.tgt(l)]) {
            return;
        }
        let choices: Vec<Vec<Bij>> = (0..s.s1.len()).map(|l| Bij::all(sizes[s.src(l)])).collect();
        let mut current: Vec<Bij> = Vec::with_capacity(s.s1.len());
        fn go(
            s: &TruncSSet,
            choices: &[Vec<Bij>],
            due: &[Vec<usize>],
            current: &mut Vec<Bij>,
            emit: &mut dyn FnMut(&[Bij]),
        ) {
            let l = current.len();
            if l == choices.len() {
                emit(current);
                return;
            }
            for b in &choices[l] {
                if s.degen0.contains(&l) && !b.is_identity() {
                    continue;
                }
                current.push(b.clone());
                let ok = due[l].iter().all(|&w| {
                    let [d0, d1, d2] = s.faces2[w];
                    current[d2].then(&current[d0]) == current[d1]
                });
                if ok {
                    go(s, choices, due, current, emit);
                }
                current.pop();
            }
        }
        let carriers = numbered_carriers(sizes);
        go(s, &choices, &due, &mut current, &mut |sol| {
            out.push(SDescentDatum { carriers: carriers.clone(), s: sol.to_vec() })
        });
    });
    out
}

fn for_each_size(k: usize, bound: usize, mut f: impl FnMut(&[usize])) {
    let mut sizes = vec![0; k];
    loop {
        f(&sizes);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            sizes[i] += 1;
            if sizes[i] <= bound {
                break;
            }
            sizes[i] = 0;
        }
    }
}

/// The action of the fundamental groupoid in which `l` acts by `s_l`.
pub fn s_to_action(s: &TruncSSet, d: &SDescentDatum) -> Result<GroupoidAction> {
    if let Some(v) = validate_s_descent(s, d).first() {
        return Err(Error::Invalid(v.to_string()));
    }
    Ok(GroupoidAction { carriers: d.carriers.clone(), gen_action: d.s.clone() })
}

pub fn action_to_s(s: &TruncSSet, a: &GroupoidAction) -> Result<SDescentDatum> {
    if let Some(v) = validate_action(&fundamental_presentation(s), a).first() {
        return Err(Error::Invalid(v.to_string()));
    }
    Ok(SDescentDatum { carriers: a.carriers.clone(), s: a.gen_action.clone() })
}

/// Identity, naturality and cocycle laws of a family-indexed datum.
fn validate_pointwise(f: &SimplicialFamily, carriers: &[Vec<String>], data: &Pointwise) -> Vec<Violation> {
    let s = f.sset();
    let np = f.base().len();
    let poset = f.base();
    let mut out = Vec::new();
    if carriers.len() != s.s0.len() || data.len() != s.s1.len() {
        out.push(Violation::new("shape", "carriers or components do not match the family"));
        return out;
    }
    for l in 0..s.s1.len() {
        let comp = f.component(1, l);
        if data[l].len() != np || (0..np).any(|p| data[l][p].len() != comp.fiber_size(p)) {
            out.push(Violation::new("shape", format!("sigma over {} does not cover its component", s.s1[l])));
            continue;
        }
        let (n, m) = (carriers[s.src(l)].len(), carriers[s.tgt(l)].len());
        for p in 0..np {
            for (e, b) in data[l][p].iter().enumerate() {
                check_bij(&mut out, &format!("sigma over {} at {}/{}", s.s1[l], poset.label(p), comp.label(p, e)), b, n, m);
            }
        }
    }
    if !out.is_empty() {
        return out;
    }
    let at = |p: usize, total: usize| -> &Bij { &data[f.zeta(1, p, total)][p][f.local(1, p, total)] };
    for l in 0..s.s1.len() {
        let comp = f.component(1, l);
        for (p, q) in poset.strict_pairs() {
            for e in 0..comp.fiber_size(q) {
                if data[l][p][comp.restrict(q, p, e)] != data[l][q][e] {
                    out.push(Violation::new(
                        "naturality",
                        format!("sigma over {} changes along {} -> {} at {}", s.s1[l], poset.label(q), poset.label(p), comp.label(q, e)),
                    ));
                }
            }
        }
    }
    for p in 0..np {
        let h0 = f.level(0);
        for x in 0..h0.fiber_size(p) {
            if !at(p, f.degen0().apply(p, x)).is_identity() {
                out.push(Violation::new("identity", format!("at {}/{}", poset.label(p), h0.label(p, x))));
            }
        }
        let h2 = f.level(2);
        for x in 0..h2.fiber_size(p) {
            let [d0, d1, d2] = [0, 1, 2].map(|k| at(p, f.face2(k).apply(p, x)));
            if d2.then(d0) != *d1 {
                out.push(Violation::new("cocycle", format!("at {}/{}", poset.label(p), h2.label(p, x))));
            }
        }
    }
    out
}

pub fn validate_h_descent(f: &SimplicialFamily, d: &HDescentDatum) -> Vec<Violation> {
    validate_pointwise(f, &d.carriers, &d.sigma_hat)
}

pub fn validate_u_descent(cover: &Family, u: &UDescentDatum) -> Vec<Violation> {
    match cech_simplicial_family(cover) {
        Ok(c) => validate_pointwise(&c.family, &u.carriers, &u.sigma),
        Err(e) => vec![Violation::new("cover", e.to_string())],
    }
}

/// Every valid pointwise datum with carriers of size at most `bound`.
///
/// A datum is natural, so it is constant on connected classes of elements
/// of each `(H_1)_l`; those classes are the variables of a bijection
/// search whose relators are the identity and cocycle laws.
fn enumerate_pointwise(f: &SimplicialFamily, bound: usize) -> Vec<(Vec<Vec<String>>, Pointwise)> {
    let s = f.sset();
    let np = f.base().len();
    let h1 = f.level(1);
    let offs: Vec<usize> = (0..np).scan(0, |acc, p| {
        let o = *acc;
        *acc += h1.fiber_size(p);
        Some(o)
    }).collect();
    let mut dsu = Dsu::new(h1.total_size());
    for (p, q) in f.base().strict_pairs() {
        for e in 0..h1.fiber_size(q) {
            dsu.union(offs[q] + e, offs[p] + h1.restrict(q, p, e));
        }
    }
    let mut var_of = vec![usize::MAX; h1.total_size()];
    let mut var_simplex = Vec::new();
    for p in 0..np {
        for e in 0..h1.fiber_size(p) {
            let r = dsu.find(offs[p] + e);
            if var_of[r] == usize::MAX {
                var_of[r] = var_simplex.len();
                var_simplex.push(f.zeta(1, p, e));
            }
            var_of[offs[p] + e] = var_of[r];
        }
    }
    let var = |p: usize, e: usize| var_of[offs[p] + e];
    let mut identities: Vec<usize> = Vec::new();
    let mut relators: HashSet<Vec<(usize, bool)>> = HashSet::new();
    for p in 0..np {
        for x in 0..f.level(0).fiber_size(p) {
            identities.push(var(p, f.degen0().apply(p, x)));
        }
        for x in 0..f.level(2).fiber_size(p) {
            let [d0, d1, d2] = [0, 1, 2].map(|k| var(p, f.face2(k).apply(p, x)));
            relators.insert(vec![(d2, false), (d0, false), (d1, true)]);
        }
    }
    identities.sort_unstable();
    identities.dedup();
    let mut relators: Vec<Vec<(usize, bool)>> = relators.into_iter().collect();
    relators.sort();
    let mut out = Vec::new();
    for_each_size(s.s0.len(), bound, |sizes| {
        let nonempty = |l: usize| (0..np).any(|p| f.component(1, l).fiber_size(p) > 0);
        if (0..s.s1.len()).any(|l| nonempty(l) && sizes[s.src(l)] != sizes[s.tgt(l)]) {
            return;
        }
        let mut csp = BijCsp::new(var_simplex.iter().map(|&l| sizes[s.src(l)]).collect());
        for &v in &identities {
            csp.add_identity(v);
        }
        for r in &relators {
            csp.add_relator(r.clone());
        }
        let carriers = numbered_carriers(sizes);
        for sol in csp.all() {
            let data: Pointwise = (0..s.s1.len())
                .map(|l| {
                    (0..np)
                        .map(|p| f.members(1, l, p).iter().map(|&e| sol[var(p, e)].clone()).collect())
                        .collect()
                })
                .collect();
            out.push((carriers.clone(), data));
        }
    });
    out
}

/// All valid H-descent data with carriers of size at most `bound`.
pub fn enumerate_h_descent(f: &SimplicialFamily, bound: usize) -> Vec<HDescentDatum> {
    enumerate_pointwise(f, bound).into_iter().map(|(carriers, sigma_hat)| HDescentDatum { carriers, sigma_hat }).collect()
}

/// All valid descent data on a cover with carriers of size at most `bound`.
pub fn enumerate_u_descent(cover: &Family, bound: usize) -> Result<Vec<UDescentDatum>> {
    let c = cech_simplicial_family(cover)?;
    Ok(enumerate_pointwise(&c.family, bound).into_iter().map(|(carriers, sigma)| UDescentDatum { carriers, sigma }).collect())
}

/// The H-datum with `sigma_hat_l` constant at `s_l`.
pub fn induced_h_from_s(d: &SDescentDatum, f: &SimplicialFamily) -> Result<HDescentDatum> {
    if let Some(v) = validate_s_descent(f.sset(), d).first() {
        return Err(Error::Invalid(v.to_string()));
    }
    let np = f.base().len();
    let sigma_hat = (0..f.sset().s1.len())
        .map(|l| (0..np).map(|p| vec![d.s[l].clone(); f.component(1, l).fiber_size(p)]).collect())
        .collect();
    Ok(HDescentDatum { carriers: d.carriers.clone(), sigma_hat })
}

/// Equal up to element labels.
fn same_shape(a: &Presheaf, b: &Presheaf) -> bool {
    let base = a.base();
    (0..base.len()).all(|p| a.fiber_size(p) == b.fiber_size(p))
        && (0..base.len()).all(|q| (0..base.len()).all(|p| a.restriction(q, p) == b.restriction(q, p)))
}

/// The counit of a refinement, matched against the Cech family of a cover.
#[derive(Debug, Clone)]
pub struct Transfer {
    counit: Counit,
    cover: Family,
}

impl Transfer {
    /// Requires the level-0 family of `f` to be the cover itself.
    pub fn new(f: &SimplicialFamily, cover: &Family) -> Result<Self> {
        let c = counit(f)?;
        let direct = cech_simplicial_family(cover)?;
        let same = c.cech.sset() == direct.sset()
            && (0..direct.sset().s0.len()).all(|i| same_shape(c.cech.family.component(0, i), direct.family.component(0, i)));
        if !same {
            return Err(Error::IncompatibleFamily("level 0 of the family is not the cover".into()));
        }
        Ok(Transfer { counit: c, cover: cover.clone() })
    }

    pub fn counit(&self) -> &Counit {
        &self.counit
    }

    /// Solves `sigma_hat_l = sigma_{j,i} . (h_1)_l` for `sigma_{j,i}`.
    pub fn h_to_u(&self, f: &SimplicialFamily, d: &HDescentDatum) -> Result<UDescentDatum> {
        if let Some(v) = validate_h_descent(f, d).first() {
            return Err(Error::Invalid(v.to_string()));
        }
        let cf = &self.counit.cech.family;
        let np = f.base().len();
        let cs = cf.sset();
        let mut sigma: Vec<Vec<Vec<Option<Bij>>>> = (0..cs.s1.len())
            .map(|c| (0..np).map(|p| vec![None; cf.component(1, c).fiber_size(p)]).collect())
            .collect();
        for p in 0..np {
            for e in 0..f.level(1).fiber_size(p) {
                let b = &d.sigma_hat[f.zeta(1, p, e)][p][f.local(1, p, e)];
                let y = self.counit.h[1].apply(p, e);
                let slot = &mut sigma[cf.zeta(1, p, y)][p][cf.local(1, p, y)];
                match slot {
                    Some(prev) if prev != b => {
                        return Err(Error::IncompatibleFamily(format!(
                            "two values at {}/{}",
                            f.base().label(p),
                            cf.level(1).label(p, y)
                        )))
                    }
                    _ => *slot = Some(b.clone()),
                }
            }
        }
        let sigma: Pointwise = sigma
            .into_iter()
            .enumerate()
            .map(|(c, per_p)| {
                per_p
                    .into_iter()
                    .enumerate()
                    .map(|(p, es)| {
                        es.into_iter()
                            .enumerate()
                            .map(|(e, b)| {
                                b.ok_or_else(|| {
                                    Error::IncompatibleFamily(format!(
                                        "no element over {} at {}/{}",
                                        cs.s1[c],
                                        f.base().label(p),
                                        cf.component(1, c).label(p, e)
                                    ))
                                })
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let u = UDescentDatum { carriers: d.carriers.clone(), sigma };
        if let Some(v) = validate_u_descent(&self.cover, &u).first() {
            return Err(Error::IncompatibleFamily(v.to_string()));
        }
        Ok(u)
    }

    /// `sigma_hat_l = sigma_{j,i} . (h_1)_l`.
    pub fn u_to_h(&self, f: &SimplicialFamily, u: &UDescentDatum) -> Result<HDescentDatum> {
        if let Some(v) = validate_u_descent(&self.cover, u).first() {
            return Err(Error::Invalid(v.to_string()));
        }
        let cf = &self.counit.cech.family;
        let np = f.base().len();
        let sigma_hat = (0..f.sset().s1.len())
            .map(|l| {
                (0..np)
                    .map(|p| {
                        f.members(1, l, p)
                            .iter()
                            .map(|&e| {
                                let y = self.counit.h[1].apply(p, e);
                                u.sigma[cf.zeta(1, p, y)][p][cf.local(1, p, y)].clone()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Ok(HDescentDatum { carriers: u.carriers.clone(), sigma_hat })
    }
}

pub fn h_to_u(d: &HDescentDatum, f: &SimplicialFamily, cover: &Family) -> Result<UDescentDatum> {
    Transfer::new(f, cover)?.h_to_u(f, d)
}

pub fn u_to_h(u: &UDescentDatum, f: &SimplicialFamily, cover: &Family) -> Result<HDescentDatum> {
    Transfer::new(f, cover)?.u_to_h(f, u)
}

/// Whether `s_l = s_t` whenever a span morphism joins `l` to `t`.
pub fn is_consistent(d: &SDescentDatum, f: &SimplicialFamily) -> bool {
    inconsistency(d, f).is_none()
}

fn inconsistency(d: &SDescentDatum, f: &SimplicialFamily) -> Option<(usize, usize)> {
    span_morphism_pairs(f).into_iter().find(|&(l, t)| d.s[l] != d.s[t])
}

/// The action of the G-fundamental groupoid determined by a consistent datum.
pub fn consistent_to_g_action(d: &SDescentDatum, f: &SelfDualFamily) -> Result<GroupoidAction> {
    let p = g_fundamental_presentation(f)?;
    if let Some(v) = validate_s_descent(f.sset(), d).first() {
        return Err(Error::Invalid(v.to_string()));
    }
    if let Some((l, t)) = inconsistency(d, &f.family) {
        let s = f.sset();
        return Err(Error::Invalid(format!("inconsistent on {} and {}", s.s1[l], s.s1[t])));
    }
    let a = GroupoidAction { carriers: d.carriers.clone(), gen_action: d.s.clone() };
    debug_assert!(validate_action(&p, &a).is_empty());
    Ok(a)
}

/// The inverse of [`consistent_to_g_action`].
pub fn g_action_to_s(a: &GroupoidAction, f: &SelfDualFamily) -> Result<SDescentDatum> {
    let p = g_fundamental_presentation(f)?;
    if let Some(v) = validate_action(&p, a).first() {
        return Err(Error::Invalid(v.to_string()));
    }
    Ok(SDescentDatum { carriers: a.carriers.clone(), s: a.gen_action.clone() })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::fintopos::FinPoset;
    use crate::groupoid::enumerate_actions;
    use crate::hypercover::generator_refinement;
    use crate::simplicial::CechNerve;

    fn pt() -> Arc<FinPoset> {
        Arc::new(FinPoset::one_point())
    }

    fn full_nerve_cover() -> Family {
        let u = Presheaf::constant(&["a"], pt());
        let v = Presheaf::constant(&["b"], pt());
        Family::from_components(pt(), &[("1", &u), ("2", &v)]).unwrap()
    }

    fn swap_cover() -> Family {
        let u1 = Presheaf::constant(&["a"], pt());
        let u2 = Presheaf::constant(&["b", "c"], pt());
        Family::from_components(pt(), &[("1", &u1), ("2", &u2)]).unwrap()
    }

    fn swap_datum(n: &CechNerve, cross2: Bij) -> SDescentDatum {
        let mut s = vec![Bij::identity(2); 4];
        s[n.pair(0, 1).unwrap()] = Bij::swap();
        s[n.pair(1, 0).unwrap()] = cross2;
        SDescentDatum { carriers: numbered_carriers(&[2, 2]), s }
    }

    #[test]
    fn s_descent_laws() {
        let n = CechNerve::of(&full_nerve_cover()).unwrap();
        let trivial = SDescentDatum { carriers: numbered_carriers(&[2, 2]), s: vec![Bij::identity(2); 4] };
        assert!(validate_s_descent(&n.sset, &trivial).is_empty());
        assert!(validate_s_descent(&n.sset, &swap_datum(&n, Bij::swap())).is_empty());
        let bad = validate_s_descent(&n.sset, &swap_datum(&n, Bij::identity(2)));
        assert!(bad.iter().any(|v| v.law == "cocycle" && v.detail.contains("(1,2,1)")), "{bad:?}");
    }

    #[test]
    fn descent_is_action() {
        let n = CechNerve::of(&full_nerve_cover()).unwrap();
        let d = swap_datum(&n, Bij::swap());
        let a = s_to_action(&n.sset, &d).unwrap();
        assert_eq!(action_to_s(&n.sset, &a).unwrap(), d);
        let data = enumerate_s_descent(&n.sset, 2);
        let actions = enumerate_actions(&fundamental_presentation(&n.sset), 2);
        assert_eq!(data.len(), actions.len());
        assert_eq!(data.len(), 4);
    }

    #[test]
    fn pointwise_counts_on_the_cech_family() {
        let cover = swap_cover();
        let us = enumerate_u_descent(&cover, 2).unwrap();
        assert_eq!(us.len(), 6);
        for u in &us {
            assert!(validate_u_descent(&cover, u).is_empty());
        }
    }

    #[test]
    fn swap_h_datum_transfers_pointwise() {
        let cover = swap_cover();
        let r = generator_refinement(&cover, 2).unwrap();
        let f = &r.family.family;
        let s = f.sset();
        // Swap across the two indices, identity within each.
        let d = SDescentDatum {
            carriers: numbered_carriers(&[2, 2]),
            s: (0..s.s1.len()).map(|l| if s.src(l) == s.tgt(l) { Bij::identity(2) } else { Bij::swap() }).collect(),
        };
        assert!(validate_s_descent(s, &d).is_empty());
        let h = induced_h_from_s(&d, f).unwrap();
        assert!(validate_h_descent(f, &h).is_empty());
        let t = Transfer::new(f, &cover).unwrap();
        let u = t.h_to_u(f, &h).unwrap();
        let cech = cech_simplicial_family(&cover).unwrap();
        let c21 = cech.sset().edge_index("(2,1)").unwrap();
        for p in &u.sigma[c21] {
            assert!(p.iter().all(|b| *b == Bij::swap()));
        }
        assert_eq!(t.u_to_h(f, &u).unwrap(), h);
    }

    #[test]
    fn h_datum_that_does_not_factor() {
        let cover = swap_cover();
        let r = generator_refinement(&cover, 2).unwrap();
        let f = &r.family.family;
        let mut h = enumerate_h_descent(f, 1).pop().unwrap();
        // Identity data on singletons always factor; breaking the shape is caught.
        h.sigma_hat[0][0].clear();
        assert!(matches!(h_to_u(&h, f, &cover), Err(Error::Invalid(_))));
    }

    #[test]
    fn consistency_on_the_refinement() {
        let cover = swap_cover();
        let r = generator_refinement(&cover, 2).unwrap();
        let f = &r.family;
        let s = f.sset();
        let datum = |cross: Bij| SDescentDatum {
            carriers: numbered_carriers(&[2, 2]),
            s: (0..s.s1.len()).map(|l| if s.src(l) == s.tgt(l) { Bij::identity(2) } else { cross.clone() }).collect(),
        };
        let d = datum(Bij::swap());
        assert!(is_consistent(&d, &f.family));
        let a = consistent_to_g_action(&d, f).unwrap();
        assert_eq!(g_action_to_s(&a, f).unwrap(), d);
    }
}
