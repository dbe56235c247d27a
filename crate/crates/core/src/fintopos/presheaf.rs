use std::collections::HashMap;
use std::sync::Arc;

use super::FinPoset;
use crate::dsu::Dsu;
use crate::error::{Error, Result, Violation};

/// A finite presheaf on a [`FinPoset`]: a finite set per point and, for each
/// `p <= q`, a restriction function `fiber(q) -> fiber(p)`.
#[derive(Debug, Clone)]
pub struct Presheaf {
    base: Arc<FinPoset>,
    fibers: Vec<Vec<String>>,
    // res[q][p] is defined exactly when p <= q; res[p][p] is the identity.
    res: Vec<Vec<Option<Vec<usize>>>>,
}

impl PartialEq for Presheaf {
    fn eq(&self, other: &Self) -> bool {
        same_base(&self.base, &other.base) && self.fibers == other.fibers && self.res == other.res
    }
}

impl Eq for Presheaf {}

pub(crate) fn same_base(a: &Arc<FinPoset>, b: &Arc<FinPoset>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A natural transformation between presheaves, stored as one function per
/// point. Domain and codomain are supplied by the caller when needed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(transparent)]
pub struct PresheafMap {
    comps: Vec<Vec<usize>>,
}

impl PresheafMap {
    pub fn new(comps: Vec<Vec<usize>>) -> Self {
        PresheafMap { comps }
    }

    pub fn identity(x: &Presheaf) -> Self {
        PresheafMap { comps: x.fibers.iter().map(|f| (0..f.len()).collect()).collect() }
    }

    /// The unique map out of `x` into a presheaf whose fibers are singletons
    /// wherever `x` is inhabited.
    pub fn constant_zero(x: &Presheaf) -> Self {
        PresheafMap { comps: x.fibers.iter().map(|f| vec![0; f.len()]).collect() }
    }

    pub fn apply(&self, p: usize, e: usize) -> usize {
        self.comps[p][e]
    }

    pub fn component(&self, p: usize) -> &[usize] {
        &self.comps[p]
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.comps
    }

    /// `self` first, then `next`.
    pub fn then(&self, next: &PresheafMap) -> PresheafMap {
        PresheafMap {
            comps: self
                .comps
                .iter()
                .zip(&next.comps)
                .map(|(a, b)| a.iter().map(|&x| b[x]).collect())
                .collect(),
        }
    }

    /// Checks shape and naturality against the given domain and codomain.
    pub fn check(&self, src: &Presheaf, tgt: &Presheaf) -> Vec<Violation> {
        let mut out = Vec::new();
        if !same_base(&src.base, &tgt.base) || self.comps.len() != src.base.len() {
            out.push(Violation::new("map shape", "base mismatch"));
            return out;
        }
        for p in 0..src.base.len() {
            if self.comps[p].len() != src.fiber_size(p) {
                out.push(Violation::new("map shape", format!("component at {} has wrong length", src.base.label(p))));
                return out;
            }
            if self.comps[p].iter().any(|&t| t >= tgt.fiber_size(p)) {
                out.push(Violation::new("map shape", format!("component at {} leaves the codomain", src.base.label(p))));
                return out;
            }
        }
        for (p, q) in src.base.strict_pairs() {
            for e in 0..src.fiber_size(q) {
                let lhs = self.comps[p][src.restrict(q, p, e)];
                let rhs = tgt.restrict(q, p, self.comps[q][e]);
                if lhs != rhs {
                    out.push(Violation::new(
                        "naturality",
                        format!(
                            "element {} at {} restricted to {}",
                            src.label(q, e),
                            src.base.label(q),
                            src.base.label(p)
                        ),
                    ));
                }
            }
        }
        out
    }

    pub fn is_natural(&self, src: &Presheaf, tgt: &Presheaf) -> bool {
        self.check(src, tgt).is_empty()
    }

    /// True when every component is a bijection onto the codomain fiber.
    pub fn is_iso(&self, src: &Presheaf, tgt: &Presheaf) -> bool {
        (0..src.base.len()).all(|p| {
            src.fiber_size(p) == tgt.fiber_size(p) && {
                let mut seen = vec![false; tgt.fiber_size(p)];
                self.comps[p].iter().all(|&t| !std::mem::replace(&mut seen[t], true))
            }
        })
    }

    pub fn inverse(&self) -> PresheafMap {
        PresheafMap {
            comps: self
                .comps
                .iter()
                .map(|c| {
                    let mut inv = vec![0; c.len()];
                    for (i, &t) in c.iter().enumerate() {
                        inv[t] = i;
                    }
                    inv
                })
                .collect(),
        }
    }
}

impl Presheaf {
    /// Builds a presheaf from fibers and a restriction rule evaluated for every
    /// strict pair `p < q`. Functoriality is not checked; see [`Presheaf::check`].
    pub fn from_fn(
        base: Arc<FinPoset>,
        fibers: Vec<Vec<String>>,
        mut restrict: impl FnMut(usize, usize, usize) -> usize,
    ) -> Self {
        let n = base.len();
        assert_eq!(fibers.len(), n, "one fiber per point");
        let mut res = vec![vec![None; n]; n];
        for q in 0..n {
            for p in 0..n {
                if p == q {
                    res[q][p] = Some((0..fibers[q].len()).collect());
                } else if base.leq(p, q) {
                    res[q][p] = Some((0..fibers[q].len()).map(|e| restrict(q, p, e)).collect());
                }
            }
        }
        Presheaf { base, fibers, res }
    }

    /// Builds a presheaf from restrictions given on some strict pairs; missing
    /// pairs are filled by composing along the covering relation. The result
    /// is checked for functoriality.
    pub fn from_restrictions(
        base: Arc<FinPoset>,
        fibers: Vec<Vec<String>>,
        given: &HashMap<(usize, usize), Vec<usize>>,
    ) -> Result<Self> {
        let n = base.len();
        if fibers.len() != n {
            return Err(Error::Malformed("one fiber per point is required".into()));
        }
        for f in &fibers {
            let mut seen = std::collections::HashSet::new();
            for l in f {
                if !seen.insert(l) {
                    return Err(Error::DuplicateLabel { label: l.clone(), context: "fiber".into() });
                }
            }
        }
        for (&(q, p), m) in given {
            if !base.lt(p, q) {
                return Err(Error::Malformed(format!(
                    "restriction {}>{} is not along a strict order pair",
                    base.label(q),
                    base.label(p)
                )));
            }
            if m.len() != fibers[q].len() || m.iter().any(|&t| t >= fibers[p].len()) {
                return Err(Error::Malformed(format!(
                    "restriction {}>{} is not a function between the fibers",
                    base.label(q),
                    base.label(p)
                )));
            }
        }
        let mut res: Vec<Vec<Option<Vec<usize>>>> = vec![vec![None; n]; n];
        for q in 0..n {
            res[q][q] = Some((0..fibers[q].len()).collect());
        }
        // Fill pairs in order of increasing distance; a missing pair (p, q) is
        // routed through a cover m of p with m <= q.
        let mut pending: Vec<(usize, usize)> = base.strict_pairs().collect();
        let covers = base.covering_pairs();
        while !pending.is_empty() {
            let before = pending.len();
            pending.retain(|&(p, q)| {
                if let Some(m) = given.get(&(q, p)) {
                    res[q][p] = Some(m.clone());
                    return false;
                }
                if fibers[q].is_empty() {
                    res[q][p] = Some(Vec::new());
                    return false;
                }
                for &(a, m) in &covers {
                    if a == p && base.leq(m, q) {
                        if let (Some(qm), Some(mp)) = (res[q][m].clone(), res[m][p].clone()) {
                            res[q][p] = Some(qm.iter().map(|&e| mp[e]).collect());
                            return false;
                        }
                    }
                }
                true
            });
            if pending.len() == before {
                let (p, q) = pending[0];
                return Err(Error::Malformed(format!(
                    "restriction {}>{} is missing and cannot be composed",
                    base.label(q),
                    base.label(p)
                )));
            }
        }
        let out = Presheaf { base, fibers, res };
        if let Some(v) = out.check().into_iter().next() {
            return Err(Error::Malformed(v.to_string()));
        }
        Ok(out)
    }

    /// Functoriality violations: `res(q,p) . res(r,q) = res(r,p)`.
    pub fn check(&self) -> Vec<Violation> {
        let n = self.base.len();
        let mut out = Vec::new();
        for r in 0..n {
            for q in 0..n {
                if !self.base.lt(q, r) {
                    continue;
                }
                for p in 0..n {
                    if !self.base.lt(p, q) {
                        continue;
                    }
                    for e in 0..self.fiber_size(r) {
                        if self.restrict(q, p, self.restrict(r, q, e)) != self.restrict(r, p, e) {
                            out.push(Violation::new(
                                "functoriality",
                                format!(
                                    "{} at {} via {} to {}",
                                    self.label(r, e),
                                    self.base.label(r),
                                    self.base.label(q),
                                    self.base.label(p)
                                ),
                            ));
                        }
                    }
                }
            }
        }
        out
    }

    /// The constant presheaf on `set`: every fiber is `set`, every restriction
    /// the identity.
    pub fn constant<S: AsRef<str>>(set: &[S], base: Arc<FinPoset>) -> Self {
        let fiber: Vec<String> = set.iter().map(|s| s.as_ref().to_string()).collect();
        let fibers = vec![fiber; base.len()];
        Presheaf::from_fn(base, fibers, |_, _, e| e)
    }

    pub fn terminal(base: Arc<FinPoset>) -> Self {
        Presheaf::constant(&["*"], base)
    }

    pub fn initial(base: Arc<FinPoset>) -> Self {
        Presheaf::constant::<&str>(&[], base)
    }

    /// The representable presheaf `y(a)`: a single element at every `p <= a`.
    pub fn representable(base: Arc<FinPoset>, a: usize) -> Self {
        let fibers = (0..base.len())
            .map(|p| if base.leq(p, a) { vec!["*".to_string()] } else { Vec::new() })
            .collect();
        Presheaf::from_fn(base, fibers, |_, _, _| 0)
    }

    pub fn base(&self) -> &Arc<FinPoset> {
        &self.base
    }

    pub fn fiber(&self, p: usize) -> &[String] {
        &self.fibers[p]
    }

    pub fn fibers(&self) -> &[Vec<String>] {
        &self.fibers
    }

    pub fn fiber_size(&self, p: usize) -> usize {
        self.fibers[p].len()
    }

    pub fn total_size(&self) -> usize {
        self.fibers.iter().map(Vec::len).sum()
    }

    pub fn label(&self, p: usize, e: usize) -> &str {
        &self.fibers[p][e]
    }

    pub fn element_index(&self, p: usize, label: &str) -> Option<usize> {
        self.fibers[p].iter().position(|l| l == label)
    }

    /// Restriction of element `e` at `q` to `p <= q`.
    pub fn restrict(&self, q: usize, p: usize, e: usize) -> usize {
        self.res[q][p].as_ref().expect("restriction along p <= q")[e]
    }

    pub fn restriction(&self, q: usize, p: usize) -> Option<&[usize]> {
        self.res[q][p].as_deref()
    }

    /// Initial means every fiber is empty.
    pub fn is_initial(&self) -> bool {
        self.fibers.iter().all(Vec::is_empty)
    }

    /// All elements as `(point, index)` pairs.
    pub fn elements(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.fibers.iter().enumerate().flat_map(|(p, f)| (0..f.len()).map(move |e| (p, e)))
    }

    fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.fibers
            .iter()
            .map(|f| {
                let o = acc;
                acc += f.len();
                o
            })
            .collect()
    }

    /// The sub-presheaf on the kept elements, with its inclusion. Fails if the
    /// kept set is not closed under restriction.
    pub fn sub(&self, keep: &[Vec<bool>]) -> Result<(Presheaf, PresheafMap)> {
        let n = self.base.len();
        let mut local = vec![Vec::new(); n];
        let mut incl = vec![Vec::new(); n];
        for p in 0..n {
            local[p] = vec![usize::MAX; self.fiber_size(p)];
            for e in 0..self.fiber_size(p) {
                if keep[p][e] {
                    local[p][e] = incl[p].len();
                    incl[p].push(e);
                }
            }
        }
        for (p, q) in self.base.strict_pairs() {
            for &e in &incl[q] {
                if !keep[p][self.restrict(q, p, e)] {
                    return Err(Error::Malformed(format!(
                        "subset not closed under restriction at {}",
                        self.label(q, e)
                    )));
                }
            }
        }
        let fibers = (0..n).map(|p| incl[p].iter().map(|&e| self.fibers[p][e].clone()).collect()).collect();
        let sub = Presheaf::from_fn(self.base.clone(), fibers, |q, p, e| local[p][self.restrict(q, p, incl[q][e])]);
        Ok((sub, PresheafMap { comps: incl }))
    }
}

/// Index of a tuple in the lexicographic enumeration of a product of sets
/// with the given sizes.
pub fn tuple_index(sizes: &[usize], coords: &[usize]) -> usize {
    coords.iter().zip(sizes).fold(0, |acc, (&c, &s)| acc * s + c)
}

/// Inverse of [`tuple_index`].
pub fn tuple_coords(sizes: &[usize], mut idx: usize) -> Vec<usize> {
    let mut out = vec![0; sizes.len()];
    for k in (0..sizes.len()).rev() {
        out[k] = idx % sizes[k];
        idx /= sizes[k];
    }
    out
}

/// Pointwise product of `factors` with its projections. Elements are tuples
/// in lexicographic order, labelled `(a,b,..)`.
pub fn product_n(factors: &[&Presheaf]) -> Result<(Presheaf, Vec<PresheafMap>)> {
    let Some(first) = factors.first() else {
        return Err(Error::Malformed("empty product".into()));
    };
    let base = first.base.clone();
    if factors.iter().any(|f| !same_base(&f.base, &base)) {
        return Err(Error::BaseMismatch);
    }
    let n = base.len();
    let sizes: Vec<Vec<usize>> = (0..n).map(|p| factors.iter().map(|f| f.fiber_size(p)).collect()).collect();
    let fibers: Vec<Vec<String>> = (0..n)
        .map(|p| {
            let total: usize = sizes[p].iter().product();
            (0..total)
                .map(|idx| {
                    let c = tuple_coords(&sizes[p], idx);
                    let parts: Vec<&str> = c.iter().zip(factors).map(|(&e, f)| f.label(p, e)).collect();
                    format!("({})", parts.join(","))
                })
                .collect()
        })
        .collect();
    let prod = Presheaf::from_fn(base.clone(), fibers, |q, p, idx| {
        let c = tuple_coords(&sizes[q], idx);
        let r: Vec<usize> = c.iter().zip(factors).map(|(&e, f)| f.restrict(q, p, e)).collect();
        tuple_index(&sizes[p], &r)
    });
    let projections = (0..factors.len())
        .map(|k| {
            PresheafMap::new(
                (0..n)
                    .map(|p| (0..prod.fiber_size(p)).map(|idx| tuple_coords(&sizes[p], idx)[k]).collect())
                    .collect(),
            )
        })
        .collect();
    Ok((prod, projections))
}

/// Binary product with its two projections.
pub fn product(x: &Presheaf, y: &Presheaf) -> Result<(Presheaf, PresheafMap, PresheafMap)> {
    let (prod, mut proj) = product_n(&[x, y])?;
    let second = proj.pop().unwrap();
    let first = proj.pop().unwrap();
    Ok((prod, first, second))
}

/// The pairing `<f, g>: w -> x * y` into the layout produced by [`product`].
pub fn pairing(f: &PresheafMap, g: &PresheafMap, y: &Presheaf) -> PresheafMap {
    PresheafMap::new(
        f.comps
            .iter()
            .zip(&g.comps)
            .enumerate()
            .map(|(p, (a, b))| a.iter().zip(b).map(|(&s, &t)| s * y.fiber_size(p) + t).collect())
            .collect(),
    )
}

/// Coproduct of `summands`, each tagged for labelling, with injections.
/// Summand elements are laid out contiguously in summand order.
pub fn coproduct(base: Arc<FinPoset>, summands: &[(&str, &Presheaf)]) -> Result<(Presheaf, Vec<PresheafMap>)> {
    if summands.iter().any(|(_, s)| !same_base(&s.base, &base)) {
        return Err(Error::BaseMismatch);
    }
    let n = base.len();
    let mut offs = vec![vec![0; n]; summands.len()];
    let mut fibers = vec![Vec::new(); n];
    for p in 0..n {
        for (k, (tag, s)) in summands.iter().enumerate() {
            offs[k][p] = fibers[p].len();
            fibers[p].extend(s.fiber(p).iter().map(|l| format!("{tag}/{l}")));
        }
    }
    let mut owner = vec![Vec::new(); n];
    for p in 0..n {
        for (k, (_, s)) in summands.iter().enumerate() {
            owner[p].extend(std::iter::repeat(k).take(s.fiber_size(p)));
        }
    }
    let total = Presheaf::from_fn(base, fibers, |q, p, e| {
        let k = owner[q][e];
        offs[k][p] + summands[k].1.restrict(q, p, e - offs[k][q])
    });
    let inj = summands
        .iter()
        .enumerate()
        .map(|(k, (_, s))| PresheafMap::new((0..n).map(|p| (0..s.fiber_size(p)).map(|e| offs[k][p] + e).collect()).collect()))
        .collect();
    Ok((total, inj))
}

/// Joint pointwise surjectivity of `maps` (each given with its domain) onto
/// `target`.
pub fn is_epi_family(target: &Presheaf, maps: &[(&Presheaf, &PresheafMap)]) -> Result<bool> {
    let n = target.base.len();
    let mut hit: Vec<Vec<bool>> = (0..n).map(|p| vec![false; target.fiber_size(p)]).collect();
    for (dom, m) in maps {
        if !same_base(&dom.base, &target.base) {
            return Err(Error::BaseMismatch);
        }
        if m.comps.len() != n {
            return Err(Error::CodomainMismatch);
        }
        for p in 0..n {
            if m.comps[p].len() != dom.fiber_size(p) {
                return Err(Error::CodomainMismatch);
            }
            for &t in &m.comps[p] {
                if t >= target.fiber_size(p) {
                    return Err(Error::CodomainMismatch);
                }
                hit[p][t] = true;
            }
        }
    }
    Ok(hit.iter().all(|h| h.iter().all(|&b| b)))
}

/// Connected components of the category of elements, each as a
/// sub-presheaf with its inclusion, ordered by their first element.
pub fn connected_components(x: &Presheaf) -> Vec<(Presheaf, PresheafMap)> {
    let n = x.base.len();
    let offs = x.offsets();
    let mut dsu = Dsu::new(x.total_size());
    for (p, q) in x.base.strict_pairs() {
        for e in 0..x.fiber_size(q) {
            dsu.union(offs[q] + e, offs[p] + x.restrict(q, p, e));
        }
    }
    let mut roots: Vec<usize> = Vec::new();
    for (p, e) in x.elements() {
        let r = dsu.find(offs[p] + e);
        if !roots.contains(&r) {
            roots.push(r);
        }
    }
    roots
        .into_iter()
        .map(|r| {
            let keep: Vec<Vec<bool>> =
                (0..n).map(|p| (0..x.fiber_size(p)).map(|e| dsu.find(offs[p] + e) == r).collect()).collect();
            x.sub(&keep).expect("components are closed under restriction")
        })
        .collect()
}

pub fn is_connected(x: &Presheaf) -> bool {
    connected_components(x).len() == 1
}

/// Quotient of `x` by the smallest equivalence containing `pairs` (each
/// `(point, e1, e2)`) that is also closed under restriction. Classes are
/// labelled by their least member.
pub fn quotient_by_pairs(x: &Presheaf, pairs: &[(usize, usize, usize)]) -> Result<(Presheaf, PresheafMap)> {
    let n = x.base.len();
    let offs = x.offsets();
    for &(p, a, b) in pairs {
        if p >= n || a >= x.fiber_size(p) || b >= x.fiber_size(p) {
            return Err(Error::Malformed("quotient pair references a missing element".into()));
        }
    }
    let mut dsu = Dsu::new(x.total_size());
    let mut work: Vec<(usize, usize, usize)> = pairs.to_vec();
    while let Some((q, a, b)) = work.pop() {
        if dsu.union(offs[q] + a, offs[q] + b) {
            for p in 0..n {
                if x.base.lt(p, q) {
                    work.push((p, x.restrict(q, p, a), x.restrict(q, p, b)));
                }
            }
        }
    }
    let mut class_of = vec![Vec::new(); n];
    let mut reps = vec![Vec::new(); n];
    for p in 0..n {
        let mut seen: HashMap<usize, usize> = HashMap::new();
        for e in 0..x.fiber_size(p) {
            let r = dsu.find(offs[p] + e);
            let c = *seen.entry(r).or_insert_with(|| {
                reps[p].push(e);
                reps[p].len() - 1
            });
            class_of[p].push(c);
        }
    }
    let fibers = (0..n).map(|p| reps[p].iter().map(|&e| x.fibers[p][e].clone()).collect()).collect();
    let quot = Presheaf::from_fn(x.base.clone(), fibers, |q, p, c| class_of[p][x.restrict(q, p, reps[q][c])]);
    Ok((quot, PresheafMap::new(class_of)))
}
