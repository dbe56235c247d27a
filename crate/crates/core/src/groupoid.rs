//! Presentations of fundamental and G-fundamental groupoids, their actions,
//! and a bounded decision procedure for equality of words.

use std::collections::{HashMap, HashSet};
use std::ops::ControlFlow;

use serde::Serialize;

use crate::csp::BijCsp;
use crate::error::{Error, Result, Violation};
use crate::family::{condition_g_failure, SelfDualFamily, SimplicialFamily};
use crate::fintopos::{hom_find, PresheafMap};
use crate::perm::Bij;
use crate::simplicial::TruncSSet;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Generator {
    pub label: String,
    pub src: usize,
    pub tgt: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Letter {
    pub gen: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(gen: usize) -> Self {
        Letter { gen, inverse: false }
    }

    pub fn inv(self) -> Self {
        Letter { gen: self.gen, inverse: !self.inverse }
    }
}

/// A composable path of generators and formal inverses starting at `base`;
/// letters are listed in the order they are traversed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Word {
    pub base: usize,
    pub letters: Vec<Letter>,
}

impl Word {
    pub fn empty(base: usize) -> Self {
        Word { base, letters: Vec::new() }
    }

    /// The path through the given generators, all positive.
    pub fn path(base: usize, gens: &[usize]) -> Self {
        Word { base, letters: gens.iter().map(|&g| Letter::new(g)).collect() }
    }

    pub fn inverse(&self, p: &GroupoidPresentation) -> Result<Word> {
        let end = p.target(self)?;
        Ok(Word { base: end, letters: self.letters.iter().rev().map(|l| l.inv()).collect() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RelationOrigin {
    /// `d1 w ~ d0 w . d2 w` for a 2-simplex.
    Triangle(usize),
    /// `l ~ t` for 1-simplices joined by a morphism of spans.
    SpanMorphism(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Relation {
    pub lhs: Word,
    pub rhs: Word,
    pub origin: RelationOrigin,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupoidPresentation {
    pub objects: Vec<String>,
    pub generators: Vec<Generator>,
    pub relations: Vec<Relation>,
    /// The generator designated as the identity of each object, if any.
    pub identities: Vec<Option<usize>>,
}

impl GroupoidPresentation {
    pub fn letter_src(&self, l: Letter) -> usize {
        let g = &self.generators[l.gen];
        if l.inverse {
            g.tgt
        } else {
            g.src
        }
    }

    pub fn letter_tgt(&self, l: Letter) -> usize {
        let g = &self.generators[l.gen];
        if l.inverse {
            g.src
        } else {
            g.tgt
        }
    }

    /// The endpoint of a word, failing if it is not composable.
    pub fn target(&self, w: &Word) -> Result<usize> {
        let mut at = w.base;
        for &l in &w.letters {
            if l.gen >= self.generators.len() || self.letter_src(l) != at {
                return Err(Error::Malformed(format!("word is not composable: {}", self.word_label(w))));
            }
            at = self.letter_tgt(l);
        }
        Ok(at)
    }

    pub fn word_label(&self, w: &Word) -> String {
        if w.letters.is_empty() {
            return format!("id_{}", self.objects.get(w.base).map(String::as_str).unwrap_or("?"));
        }
        let parts: Vec<String> = w
            .letters
            .iter()
            .map(|l| {
                let name = self.generators.get(l.gen).map(|g| g.label.as_str()).unwrap_or("?");
                if l.inverse {
                    format!("{name}^-1")
                } else {
                    name.to_string()
                }
            })
            .collect();
        parts.join(" ; ")
    }

    /// Labels of generators, for lookups.
    pub fn generator_index(&self, label: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.label == label)
    }

    /// Objects joined by generators, as a component id per object.
    pub fn object_components(&self) -> Vec<usize> {
        let mut dsu = crate::dsu::Dsu::new(self.objects.len());
        for g in &self.generators {
            dsu.union(g.src, g.tgt);
        }
        let mut ids: HashMap<usize, usize> = HashMap::new();
        (0..self.objects.len())
            .map(|o| {
                let r = dsu.find(o);
                let next = ids.len();
                *ids.entry(r).or_insert(next)
            })
            .collect()
    }
}

/// Presentation of the fundamental groupoid of a truncated simplicial set.
pub fn fundamental_presentation(s: &TruncSSet) -> GroupoidPresentation {
    let generators = (0..s.s1.len())
        .map(|l| Generator { label: s.s1[l].clone(), src: s.src(l), tgt: s.tgt(l) })
        .collect();
    let relations = (0..s.s2.len())
        .map(|w| {
            let [d0, d1, d2] = s.faces2[w];
            Relation {
                lhs: Word::path(s.src(d2), &[d2, d0]),
                rhs: Word::path(s.src(d1), &[d1]),
                origin: RelationOrigin::Triangle(w),
            }
        })
        .collect();
    GroupoidPresentation {
        objects: s.s0.clone(),
        generators,
        relations,
        identities: s.degen0.iter().map(|&l| Some(l)).collect(),
    }
}

/// A morphism of spans `(H_1)_l -> (H_1)_t` commuting with both face maps.
pub fn span_morphism(f: &SimplicialFamily, l: usize, t: usize) -> Option<PresheafMap> {
    let s = f.sset();
    if s.faces1[l] != s.faces1[t] {
        return None;
    }
    let (l1, l0) = (f.face1_component(l, 1), f.face1_component(l, 0));
    let (t1, t0) = (f.face1_component(t, 1), f.face1_component(t, 0));
    hom_find(f.component(1, l), f.component(1, t), |p, e, x| {
        t1.apply(p, x) == l1.apply(p, e) && t0.apply(p, x) == l0.apply(p, e)
    })
}

/// Ordered pairs `(l, t)` of distinct 1-simplices joined by a span morphism.
pub fn span_morphism_pairs(f: &SimplicialFamily) -> Vec<(usize, usize)> {
    let s = f.sset();
    let mut by_ends: HashMap<[usize; 2], Vec<usize>> = HashMap::new();
    for l in 0..s.s1.len() {
        by_ends.entry(s.faces1[l]).or_default().push(l);
    }
    let mut out = Vec::new();
    for l in 0..s.s1.len() {
        for &t in &by_ends[&s.faces1[l]] {
            if t != l && span_morphism(f, l, t).is_some() {
                out.push((l, t));
            }
        }
    }
    out
}

/// Presentation of the G-fundamental groupoid: the fundamental presentation
/// of the index plus `l ~ t` for every span morphism.
pub fn g_fundamental_presentation(f: &SelfDualFamily) -> Result<GroupoidPresentation> {
    if let Some(l) = condition_g_failure(f) {
        return Err(Error::ConditionG(f.sset().s1[l].clone()));
    }
    let s = f.sset();
    let mut p = fundamental_presentation(s);
    for (l, t) in span_morphism_pairs(&f.family) {
        p.relations.push(Relation {
            lhs: Word::path(s.src(l), &[l]),
            rhs: Word::path(s.src(t), &[t]),
            origin: RelationOrigin::SpanMorphism(l, t),
        });
    }
    Ok(p)
}

/// A set per object and a bijection per generator.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct GroupoidAction {
    pub carriers: Vec<Vec<String>>,
    pub gen_action: Vec<Bij>,
}

impl GroupoidAction {
    /// Carriers `{0, .., n-1}` of the given sizes.
    pub fn numbered(sizes: &[usize], gen_action: Vec<Bij>) -> Self {
        GroupoidAction {
            carriers: sizes.iter().map(|&n| (0..n).map(|k| k.to_string()).collect()).collect(),
            gen_action,
        }
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.carriers.iter().map(Vec::len).collect()
    }
}

fn act_unchecked(a: &GroupoidAction, w: &Word, x: usize) -> usize {
    w.letters.iter().fold(x, |x, l| {
        let b = &a.gen_action[l.gen];
        if l.inverse {
            b.inverse().apply(x)
        } else {
            b.apply(x)
        }
    })
}

/// All violated laws of an action.
pub fn validate_action(p: &GroupoidPresentation, a: &GroupoidAction) -> Vec<Violation> {
    let mut out = Vec::new();
    if a.carriers.len() != p.objects.len() || a.gen_action.len() != p.generators.len() {
        out.push(Violation::new("action shape", "carrier or generator count differs from the presentation"));
        return out;
    }
    for (g, gen) in p.generators.iter().enumerate() {
        let b = &a.gen_action[g];
        if b.len() != a.carriers[gen.src].len() || b.len() != a.carriers[gen.tgt].len() {
            out.push(Violation::new("bijection", format!("generator {} is not a bijection between the carriers", gen.label)));
        }
    }
    if !out.is_empty() {
        return out;
    }
    for (o, id) in p.identities.iter().enumerate() {
        if let Some(g) = id {
            if !a.gen_action[*g].is_identity() {
                out.push(Violation::new("identity", format!("{} does not act as the identity on {}", p.generators[*g].label, p.objects[o])));
            }
        }
    }
    for rel in &p.relations {
        for x in 0..a.carriers[rel.lhs.base].len() {
            if act_unchecked(a, &rel.lhs, x) != act_unchecked(a, &rel.rhs, x) {
                out.push(Violation::new(
                    "relation",
                    format!("{} ~ {} at {}", p.word_label(&rel.lhs), p.word_label(&rel.rhs), a.carriers[rel.lhs.base][x]),
                ));
                break;
            }
        }
    }
    out
}

/// `w . x`, applying the letters of `w` in order.
pub fn act(p: &GroupoidPresentation, a: &GroupoidAction, w: &Word, x: usize) -> Result<usize> {
    p.target(w)?;
    if w.base >= a.carriers.len() || x >= a.carriers[w.base].len() {
        return Err(Error::DomainMismatch);
    }
    Ok(act_unchecked(a, w, x))
}

/// Limits of the bounded word search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WordBudget {
    /// Total rewrite steps explored from both ends.
    pub rewrite_depth: usize,
    /// Cap on words visited, and on actions tried when separating.
    pub max_words: usize,
    /// Largest carrier tried when searching for a separating action.
    pub action_bound: usize,
}

impl Default for WordBudget {
    fn default() -> Self {
        WordBudget { rewrite_depth: 10, max_words: 100_000, action_bound: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Equal,
    /// Separated by the given action.
    Distinct(GroupoidAction),
    Unknown,
}

/// Equality of words by bounded rewriting, with a separating-action search.
pub fn word_equal(p: &GroupoidPresentation, w1: &Word, w2: &Word, budget: WordBudget) -> Result<Verdict> {
    WordSolver::new(p, budget).equal(w1, w2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Image {
    Identity,
    Letter(Letter),
}

/// Reusable word-problem state for one presentation.
///
/// Relations of length at most two are folded into a signed union-find on
/// generators; the remaining relators drive a bidirectional rewriting
/// search.
#[derive(Debug, Clone)]
pub struct WordSolver<'a> {
    p: &'a GroupoidPresentation,
    budget: WordBudget,
    image: Vec<Image>,
    relators: Vec<Vec<Letter>>,
    rules: HashMap<Letter, Vec<(Vec<Letter>, Vec<Letter>)>>,
    max_relator: usize,
}

struct SignedDsu {
    parent: Vec<usize>,
    flip: Vec<bool>,
    identity: Vec<bool>,
}

impl SignedDsu {
    fn find(&mut self, g: usize) -> (usize, bool) {
        let p = self.parent[g];
        if p == g {
            return (g, false);
        }
        let (r, f) = self.find(p);
        self.parent[g] = r;
        self.flip[g] ^= f;
        (r, self.flip[g])
    }

    fn letter(&mut self, l: Letter) -> Image {
        let (r, f) = self.find(l.gen);
        if self.identity[r] {
            Image::Identity
        } else {
            Image::Letter(Letter { gen: r, inverse: l.inverse ^ f })
        }
    }

    fn set_identity(&mut self, g: usize) -> bool {
        let (r, _) = self.find(g);
        !std::mem::replace(&mut self.identity[r], true)
    }

    /// Records `a = b^flip`; returns whether anything changed.
    fn union(&mut self, a: usize, b: usize, flip: bool) -> bool {
        let (ra, fa) = self.find(a);
        let (rb, fb) = self.find(b);
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        self.flip[ra] = fa ^ fb ^ flip;
        let id = self.identity[ra] || self.identity[rb];
        self.identity[rb] = id;
        true
    }
}

fn free_reduce(w: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(w.len());
    for &l in w {
        if out.last() == Some(&l.inv()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

fn cyclic_reduce(w: &[Letter]) -> Vec<Letter> {
    let mut w = free_reduce(w);
    while w.len() >= 2 && w[0] == w[w.len() - 1].inv() {
        w.pop();
        w.remove(0);
    }
    w
}

fn invert(w: &[Letter]) -> Vec<Letter> {
    w.iter().rev().map(|l| l.inv()).collect()
}

fn canonical_cycle(w: &[Letter]) -> Vec<Letter> {
    let inv = invert(w);
    let mut best = w.to_vec();
    for cand in [w, &inv[..]] {
        for k in 0..cand.len() {
            let rot: Vec<Letter> = cand[k..].iter().chain(&cand[..k]).copied().collect();
            if rot < best {
                best = rot;
            }
        }
    }
    best
}

impl<'a> WordSolver<'a> {
    pub fn new(p: &'a GroupoidPresentation, budget: WordBudget) -> Self {
        let n = p.generators.len();
        let mut dsu = SignedDsu { parent: (0..n).collect(), flip: vec![false; n], identity: vec![false; n] };
        for g in p.identities.iter().flatten() {
            dsu.set_identity(*g);
        }
        let raw: Vec<Vec<Letter>> = p
            .relations
            .iter()
            .map(|r| r.lhs.letters.iter().copied().chain(invert(&r.rhs.letters)).collect())
            .collect();
        let normalize = |dsu: &mut SignedDsu, w: &[Letter]| -> Vec<Letter> {
            let mapped: Vec<Letter> = w
                .iter()
                .filter_map(|&l| match dsu.letter(l) {
                    Image::Identity => None,
                    Image::Letter(m) => Some(m),
                })
                .collect();
            cyclic_reduce(&mapped)
        };
        let mut changed = true;
        while changed {
            changed = false;
            for r in &raw {
                let w = normalize(&mut dsu, r);
                match w.len() {
                    1 => changed |= dsu.set_identity(w[0].gen),
                    2 if w[0].gen != w[1].gen => {
                        // a b = id, so a = b^-1.
                        changed |= dsu.union(w[0].gen, w[1].gen, w[0].inverse ^ !w[1].inverse);
                    }
                    _ => {}
                }
            }
        }
        let mut seen = HashSet::new();
        let mut relators = Vec::new();
        for r in &raw {
            let w = normalize(&mut dsu, r);
            if w.is_empty() {
                continue;
            }
            if seen.insert(canonical_cycle(&w)) {
                relators.push(w);
            }
        }
        let mut rules: HashMap<Letter, Vec<(Vec<Letter>, Vec<Letter>)>> = HashMap::new();
        let mut rule_seen = HashSet::new();
        for r in &relators {
            for cand in [r.clone(), invert(r)] {
                let m = cand.len();
                for k in 0..m {
                    let rot: Vec<Letter> = cand[k..].iter().chain(&cand[..k]).copied().collect();
                    for split in 1..=m {
                        let lhs = rot[..split].to_vec();
                        let rhs = invert(&rot[split..]);
                        if rule_seen.insert((lhs.clone(), rhs.clone())) {
                            rules.entry(lhs[0]).or_default().push((lhs, rhs));
                        }
                    }
                }
            }
        }
        let max_relator = relators.iter().map(Vec::len).max().unwrap_or(0);
        let image = (0..n).map(|g| dsu.letter(Letter::new(g))).collect();
        WordSolver { p, budget, image, relators, rules, max_relator }
    }

    /// Relators that survive the union-find folding.
    pub fn relators(&self) -> &[Vec<Letter>] {
        &self.relators
    }

    /// Whether the generator is forced to act as an identity.
    pub fn is_identity(&self, g: usize) -> bool {
        self.image[g] == Image::Identity
    }

    /// The freely reduced word after folding generator identifications.
    pub fn normal_form(&self, w: &Word) -> Vec<Letter> {
        self.normalize(&w.letters)
    }

    fn normalize(&self, w: &[Letter]) -> Vec<Letter> {
        let mapped: Vec<Letter> = w
            .iter()
            .filter_map(|l| match self.image[l.gen] {
                Image::Identity => None,
                Image::Letter(m) => Some(Letter { gen: m.gen, inverse: m.inverse ^ l.inverse }),
            })
            .collect();
        free_reduce(&mapped)
    }

    fn neighbours(&self, w: &[Letter], cap: usize) -> Vec<Vec<Letter>> {
        let mut out = Vec::new();
        for s in 0..w.len() {
            if let Some(rules) = self.rules.get(&w[s]) {
                for (lhs, rhs) in rules {
                    if w.len() - s >= lhs.len() && w[s..s + lhs.len()] == lhs[..] {
                        let next: Vec<Letter> =
                            w[..s].iter().chain(rhs.iter()).chain(&w[s + lhs.len()..]).copied().collect();
                        let next = free_reduce(&next);
                        if next.len() <= cap {
                            out.push(next);
                        }
                    }
                }
            }
        }
        out
    }

    /// Decides `w1 ~ w2` within the budget.
    pub fn equal(&self, w1: &Word, w2: &Word) -> Result<Verdict> {
        let (t1, t2) = (self.p.target(w1)?, self.p.target(w2)?);
        if w1.base != w2.base || t1 != t2 {
            return Err(Error::EndpointMismatch);
        }
        let a = self.normalize(&w1.letters);
        let b = self.normalize(&w2.letters);
        if a == b {
            return Ok(Verdict::Equal);
        }
        if self.rewrite_search(a.clone(), b.clone()) {
            return Ok(Verdict::Equal);
        }
        if let Some(action) = self.separate(w1, &a, &b) {
            return Ok(Verdict::Distinct(action));
        }
        Ok(Verdict::Unknown)
    }

    fn rewrite_search(&self, a: Vec<Letter>, b: Vec<Letter>) -> bool {
        let cap = a.len().max(b.len()) + self.max_relator;
        let mut seen: [HashSet<Vec<Letter>>; 2] = [HashSet::from([a.clone()]), HashSet::from([b.clone()])];
        let mut frontier: [Vec<Vec<Letter>>; 2] = [vec![a], vec![b]];
        for _ in 0..self.budget.rewrite_depth {
            let side = if frontier[0].len() <= frontier[1].len() { 0 } else { 1 };
            let mut next = Vec::new();
            for w in &frontier[side] {
                for n in self.neighbours(w, cap) {
                    if seen[1 - side].contains(&n) {
                        return true;
                    }
                    if seen[side].insert(n.clone()) {
                        next.push(n);
                    }
                }
                if seen[0].len() + seen[1].len() > self.budget.max_words {
                    return false;
                }
            }
            if next.is_empty() && frontier[1 - side].is_empty() {
                return false;
            }
            frontier[side] = next;
        }
        false
    }

    /// An action with carriers of one size on the component of the base,
    /// empty elsewhere, acting differently on the two words.
    fn separate(&self, w: &Word, a: &[Letter], b: &[Letter]) -> Option<GroupoidAction> {
        let comps = self.p.object_components();
        let comp = comps[w.base];
        let reps: Vec<usize> = (0..self.p.generators.len())
            .filter(|&g| self.image[g] == Image::Letter(Letter::new(g)) && comps[self.p.generators[g].src] == comp)
            .collect();
        let var: HashMap<usize, usize> = reps.iter().enumerate().map(|(k, &g)| (g, k)).collect();
        let mut tried = 0usize;
        for n in 2..=self.budget.action_bound {
            let mut csp = BijCsp::new(vec![n; reps.len()]);
            for r in &self.relators {
                if r.iter().all(|l| var.contains_key(&l.gen)) {
                    csp.add_relator(r.iter().map(|l| (var[&l.gen], l.inverse)).collect());
                }
            }
            let mut found = None;
            let _ = csp.solve(|sol| {
                tried += 1;
                let run = |word: &[Letter], x: usize| {
                    word.iter().fold(x, |x, l| {
                        let bij = &sol[var[&l.gen]];
                        if l.inverse {
                            bij.inverse().apply(x)
                        } else {
                            bij.apply(x)
                        }
                    })
                };
                if (0..n).any(|x| run(a, x) != run(b, x)) {
                    found = Some(sol.to_vec());
                    return ControlFlow::Break(());
                }
                if tried >= self.budget.max_words {
                    return ControlFlow::Break(());
                }
                ControlFlow::Continue(())
            });
            if let Some(sol) = found {
                let sizes: Vec<usize> = comps.iter().map(|&c| if c == comp { n } else { 0 }).collect();
                let gen_action = (0..self.p.generators.len())
                    .map(|g| {
                        if comps[self.p.generators[g].src] != comp {
                            return Bij::identity(0);
                        }
                        match self.image[g] {
                            Image::Identity => Bij::identity(n),
                            Image::Letter(m) if m.inverse => sol[var[&m.gen]].inverse(),
                            Image::Letter(m) => sol[var[&m.gen]].clone(),
                        }
                    })
                    .collect();
                return Some(GroupoidAction::numbered(&sizes, gen_action));
            }
            if tried >= self.budget.max_words {
                break;
            }
        }
        None
    }
}

/// Every action with carriers of size at most `bound`; carriers are
/// constant along connected components of the object graph.
pub fn enumerate_actions(p: &GroupoidPresentation, bound: usize) -> Vec<GroupoidAction> {
    let comps = p.object_components();
    let ncomp = comps.iter().copied().max().map_or(0, |m| m + 1);
    // Per component and size, the solutions on the generators of that component.
    let mut per_comp: Vec<Vec<(usize, Vec<Bij>)>> = Vec::new();
    let mut gens_of: Vec<Vec<usize>> = vec![Vec::new(); ncomp];
    for (g, gen) in p.generators.iter().enumerate() {
        gens_of[comps[gen.src]].push(g);
    }
    for c in 0..ncomp {
        let var: HashMap<usize, usize> = gens_of[c].iter().enumerate().map(|(k, &g)| (g, k)).collect();
        let mut sols = Vec::new();
        for n in 0..=bound {
            let mut csp = BijCsp::new(vec![n; gens_of[c].len()]);
            for g in p.identities.iter().flatten() {
                if let Some(&v) = var.get(g) {
                    csp.add_identity(v);
                }
            }
            for rel in &p.relations {
                if comps[rel.lhs.base] != c {
                    continue;
                }
                let word: Vec<(usize, bool)> = rel
                    .lhs
                    .letters
                    .iter()
                    .map(|l| (var[&l.gen], l.inverse))
                    .chain(rel.rhs.letters.iter().rev().map(|l| (var[&l.gen], !l.inverse)))
                    .collect();
                csp.add_relator(word);
            }
            for sol in csp.all() {
                sols.push((n, sol));
            }
        }
        per_comp.push(sols);
    }
    let mut out = Vec::new();
    let mut choice = vec![0usize; ncomp];
    loop {
        let sizes: Vec<usize> = comps.iter().map(|&c| per_comp[c][choice[c]].0).collect();
        let mut gen_action = vec![Bij::identity(0); p.generators.len()];
        for c in 0..ncomp {
            for (k, &g) in gens_of[c].iter().enumerate() {
                gen_action[g] = per_comp[c][choice[c]].1[k].clone();
            }
        }
        out.push(GroupoidAction::numbered(&sizes, gen_action));
        let mut c = ncomp;
        loop {
            if c == 0 {
                return out;
            }
            c -= 1;
            choice[c] += 1;
            if choice[c] < per_comp[c].len() {
                break;
            }
            choice[c] = 0;
        }
    }
}

/// A morphism of carriers: one function per object.
pub type CarrierMap = Vec<Vec<usize>>;

/// Every family of functions between the carriers.
pub fn all_carrier_maps(src: &[Vec<String>], tgt: &[Vec<String>]) -> Vec<CarrierMap> {
    let mut out: Vec<CarrierMap> = vec![Vec::new()];
    for (r, r2) in src.iter().zip(tgt) {
        let (n, m) = (r.len(), r2.len());
        let mut funcs: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..n {
            funcs = funcs.into_iter().flat_map(|f| (0..m).map(move |y| [f.clone(), vec![y]].concat())).collect();
        }
        out = out.into_iter().flat_map(|acc| funcs.iter().map(move |f| [acc.clone(), vec![f.clone()]].concat())).collect();
    }
    out
}

/// Equivariant maps `a -> b`, checked on every generator as a word.
pub fn equivariant_maps(p: &GroupoidPresentation, a: &GroupoidAction, b: &GroupoidAction) -> Vec<CarrierMap> {
    all_carrier_maps(&a.carriers, &b.carriers)
        .into_iter()
        .filter(|m| {
            p.generators.iter().enumerate().all(|(g, gen)| {
                let w = Word::path(gen.src, &[g]);
                (0..a.carriers[gen.src].len()).all(|x| {
                    let lhs = act(p, a, &w, x).map(|y| m[gen.tgt][y]);
                    let rhs = act(p, b, &w, m[gen.src][x]);
                    lhs.is_ok() && lhs == rhs
                })
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::fintopos::{Family, FinPoset, Presheaf};
    use crate::simplicial::CechNerve;

    pub(crate) fn full_nerve() -> CechNerve {
        let pt = Arc::new(FinPoset::one_point());
        let u = Presheaf::constant(&["a"], pt.clone());
        let v = Presheaf::constant(&["b"], pt.clone());
        CechNerve::of(&Family::from_components(pt, &[("1", &u), ("2", &v)]).unwrap()).unwrap()
    }

    fn free_edge() -> GroupoidPresentation {
        GroupoidPresentation {
            objects: vec!["1".into(), "2".into()],
            generators: vec![Generator { label: "l".into(), src: 0, tgt: 1 }],
            relations: Vec::new(),
            identities: vec![None, None],
        }
    }

    #[test]
    fn full_nerve_round_trip_is_identity() {
        let n = full_nerve();
        let p = fundamental_presentation(&n.sset);
        let (a, b) = (n.pair(0, 1).unwrap(), n.pair(1, 0).unwrap());
        let w = Word::path(0, &[a, b]);
        assert_eq!(word_equal(&p, &w, &Word::empty(0), WordBudget::default()).unwrap(), Verdict::Equal);
    }

    #[test]
    fn free_generator_is_not_identity() {
        let p = GroupoidPresentation {
            objects: vec!["1".into()],
            generators: vec![Generator { label: "l".into(), src: 0, tgt: 0 }],
            relations: Vec::new(),
            identities: vec![None],
        };
        match word_equal(&p, &Word::path(0, &[0]), &Word::empty(0), WordBudget::default()).unwrap() {
            Verdict::Distinct(a) => {
                assert!(validate_action(&p, &a).is_empty());
                assert_eq!(a.gen_action[0], Bij::swap());
            }
            v => panic!("expected a separating action, got {v:?}"),
        }
        let e = word_equal(&free_edge(), &Word::path(0, &[0]), &Word::empty(0), WordBudget::default());
        assert_eq!(e, Err(Error::EndpointMismatch));
    }

    #[test]
    fn syntactic_equality() {
        let p = free_edge();
        let w = Word::path(0, &[0]);
        assert_eq!(word_equal(&p, &w, &w, WordBudget::default()).unwrap(), Verdict::Equal);
    }

    #[test]
    fn actions_on_the_full_nerve() {
        let n = full_nerve();
        let p = fundamental_presentation(&n.sset);
        let swap_all = |cross2: Bij| {
            let mut acts = vec![Bij::identity(2); 4];
            acts[n.pair(0, 1).unwrap()] = Bij::swap();
            acts[n.pair(1, 0).unwrap()] = cross2;
            GroupoidAction::numbered(&[2, 2], acts)
        };
        assert!(validate_action(&p, &swap_all(Bij::swap())).is_empty());
        let bad = validate_action(&p, &swap_all(Bij::identity(2)));
        assert!(!bad.is_empty());
        let a = swap_all(Bij::swap());
        let l = Word::path(0, &[n.pair(0, 1).unwrap()]);
        assert_eq!(act(&p, &a, &l, 0).unwrap(), 1);
        assert_eq!(act(&p, &a, &Word::empty(0), 1).unwrap(), 1);
        let back = l.inverse(&p).unwrap();
        let there_and_back = Word { base: 0, letters: l.letters.iter().chain(&back.letters).copied().collect() };
        for x in 0..2 {
            assert_eq!(act(&p, &a, &there_and_back, x).unwrap(), x);
        }
        assert_eq!(act(&p, &a, &l, 5), Err(Error::DomainMismatch));
    }

    #[test]
    fn action_counts() {
        let endo = GroupoidPresentation {
            objects: vec!["1".into()],
            generators: vec![Generator { label: "l".into(), src: 0, tgt: 0 }],
            relations: Vec::new(),
            identities: vec![None],
        };
        assert_eq!(enumerate_actions(&endo, 2).len(), 4);
        let trivial = GroupoidPresentation {
            objects: vec!["1".into(), "2".into()],
            generators: Vec::new(),
            relations: Vec::new(),
            identities: vec![None, None],
        };
        assert_eq!(enumerate_actions(&trivial, 1).len(), 4);
        let n = full_nerve();
        let p = fundamental_presentation(&n.sset);
        // Indiscrete on two objects: one carrier and one bijection.
        assert_eq!(enumerate_actions(&p, 2).len(), 1 + 1 + 2);
        for a in enumerate_actions(&p, 2) {
            assert!(validate_action(&p, &a).is_empty());
        }
    }
}
