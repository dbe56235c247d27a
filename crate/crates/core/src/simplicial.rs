//! 2-truncated simplicial sets, simplicial and contravariant maps, strict
//! dualities and the Cech nerve of a cover.
//!
//! Face and degeneracy data are index vectors: `faces1[l] = [d0, d1]`,
//! `faces2[w] = [d0, d1, d2]`, `degen0[i] = s0(i)`, `degen1[l] = [s0, s1]`.
//! A 1-simplex `l` runs from `d1(l)` to `d0(l)`.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Result, Violation};
use crate::fintopos::Family;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct TruncSSet {
    pub s0: Vec<String>,
    pub s1: Vec<String>,
    pub s2: Vec<String>,
    pub faces1: Vec<[usize; 2]>,
    pub faces2: Vec<[usize; 3]>,
    pub degen0: Vec<usize>,
    pub degen1: Vec<[usize; 2]>,
}

impl TruncSSet {
    /// The empty simplicial set.
    pub fn empty() -> Self {
        Self::default()
    }

    /// The terminal simplicial set: one simplex in each dimension.
    pub fn terminal() -> Self {
        TruncSSet {
            s0: vec!["0".into()],
            s1: vec!["00".into()],
            s2: vec!["000".into()],
            faces1: vec![[0, 0]],
            faces2: vec![[0, 0, 0]],
            degen0: vec![0],
            degen1: vec![[0, 0]],
        }
    }

    /// Source `d1(l)`.
    pub fn src(&self, l: usize) -> usize {
        self.faces1[l][1]
    }

    /// Target `d0(l)`.
    pub fn tgt(&self, l: usize) -> usize {
        self.faces1[l][0]
    }

    pub fn is_degenerate1(&self, l: usize) -> bool {
        self.degen0[self.src(l)] == l && self.src(l) == self.tgt(l)
    }

    pub fn vertex_index(&self, label: &str) -> Option<usize> {
        self.s0.iter().position(|l| l == label)
    }

    pub fn edge_index(&self, label: &str) -> Option<usize> {
        self.s1.iter().position(|l| l == label)
    }

    pub fn triangle_index(&self, label: &str) -> Option<usize> {
        self.s2.iter().position(|l| l == label)
    }

    fn shape_violations(&self) -> Vec<Violation> {
        let (n0, n1, n2) = (self.s0.len(), self.s1.len(), self.s2.len());
        let mut out = Vec::new();
        if self.faces1.len() != n1 || self.faces2.len() != n2 || self.degen0.len() != n0 || self.degen1.len() != n1 {
            out.push(Violation::new("shape", "face/degeneracy tables do not match simplex counts"));
            return out;
        }
        if self.faces1.iter().flatten().any(|&v| v >= n0)
            || self.faces2.iter().flatten().any(|&v| v >= n1)
            || self.degen0.iter().any(|&v| v >= n1)
            || self.degen1.iter().flatten().any(|&v| v >= n2)
        {
            out.push(Violation::new("shape", "face/degeneracy image out of range"));
        }
        out
    }
}

/// All truncated simplicial identities that fail.
pub fn validate(s: &TruncSSet) -> Vec<Violation> {
    let mut out = s.shape_violations();
    if !out.is_empty() {
        return out;
    }
    let d1 = |l: usize, i: usize| s.faces1[l][i];
    let d2 = |w: usize, i: usize| s.faces2[w][i];
    for i in 0..s.s0.len() {
        let l = s.degen0[i];
        for k in 0..2 {
            if d1(l, k) != i {
                out.push(Violation::new(format!("d{k} s0 = id"), format!("vertex {}", s.s0[i])));
            }
        }
        let ss = s.degen1[l];
        if ss[0] != ss[1] {
            out.push(Violation::new("s0 s0 = s1 s0", format!("vertex {}", s.s0[i])));
        }
    }
    for w in 0..s.s2.len() {
        let name = &s.s2[w];
        // d_i d_j = d_{j-1} d_i for i < j.
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            if d1(d2(w, j), i) != d1(d2(w, i), j - 1) {
                out.push(Violation::new(format!("d{i} d{j} = d{} d{i}", j - 1), format!("2-simplex {name}")));
            }
        }
    }
    for l in 0..s.s1.len() {
        let name = &s.s1[l];
        let [a, b] = s.degen1[l];
        let checks = [
            (d2(a, 0) == l, "d0 s0 = id"),
            (d2(a, 1) == l, "d1 s0 = id"),
            (d2(a, 2) == s.degen0[d1(l, 1)], "d2 s0 = s0 d1"),
            (d2(b, 0) == s.degen0[d1(l, 0)], "d0 s1 = s0 d0"),
            (d2(b, 1) == l, "d1 s1 = id"),
            (d2(b, 2) == l, "d2 s1 = id"),
        ];
        for (ok, law) in checks {
            if !ok {
                out.push(Violation::new(law, format!("1-simplex {name}")));
            }
        }
    }
    out
}

/// A strict duality `w -> w^op`, with `tau_0` the identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StrictDuality {
    pub tau1: Vec<usize>,
    pub tau2: Vec<usize>,
}

impl StrictDuality {
    pub fn op1(&self, l: usize) -> usize {
        self.tau1[l]
    }

    pub fn op2(&self, w: usize) -> usize {
        self.tau2[w]
    }
}

/// Violations of contravariance and involutivity of `tau`.
pub fn validate_duality(s: &TruncSSet, tau: &StrictDuality) -> Vec<Violation> {
    let mut out = Vec::new();
    if tau.tau1.len() != s.s1.len()
        || tau.tau2.len() != s.s2.len()
        || tau.tau1.iter().any(|&l| l >= s.s1.len())
        || tau.tau2.iter().any(|&w| w >= s.s2.len())
    {
        out.push(Violation::new("duality shape", "tau tables do not match simplex counts"));
        return out;
    }
    for l in 0..s.s1.len() {
        let op = tau.tau1[l];
        if tau.tau1[op] != l {
            out.push(Violation::new("tau1 involutive", format!("1-simplex {}", s.s1[l])));
        }
        for i in 0..2 {
            if s.faces1[op][i] != s.faces1[l][1 - i] {
                out.push(Violation::new(format!("d{i}(l^op) = d{}(l)", 1 - i), format!("1-simplex {}", s.s1[l])));
            }
        }
        for i in 0..2 {
            if s.degen1[op][i] != tau.tau2[s.degen1[l][1 - i]] {
                out.push(Violation::new(
                    format!("s{i}(l^op) = s{}(l)^op", 1 - i),
                    format!("1-simplex {}", s.s1[l]),
                ));
            }
        }
    }
    for i in 0..s.s0.len() {
        let l = s.degen0[i];
        if tau.tau1[l] != l {
            out.push(Violation::new("s0(i)^op = s0(i)", format!("vertex {}", s.s0[i])));
        }
    }
    for w in 0..s.s2.len() {
        let op = tau.tau2[w];
        if tau.tau2[op] != w {
            out.push(Violation::new("tau2 involutive", format!("2-simplex {}", s.s2[w])));
        }
        for i in 0..3 {
            if s.faces2[op][i] != tau.tau1[s.faces2[w][2 - i]] {
                out.push(Violation::new(
                    format!("d{i}(w^op) = d{}(w)^op", 2 - i),
                    format!("2-simplex {}", s.s2[w]),
                ));
            }
        }
    }
    out
}

/// A 2-simplex `w` with `d2 w = l`, `d0 w = l^op` and `d1 w = s0(d1 l)`.
pub fn groupoid_witness(s: &TruncSSet, tau: &StrictDuality, l: usize) -> Option<usize> {
    let id = s.degen0[s.src(l)];
    (0..s.s2.len()).find(|&w| s.faces2[w] == [tau.tau1[l], id, l])
}

/// Whether every 1-simplex has a [`groupoid_witness`].
pub fn check_selfdual_groupoid_condition(s: &TruncSSet, tau: &StrictDuality) -> bool {
    let mut filled = vec![false; s.s1.len()];
    for w in 0..s.s2.len() {
        let [a, b, c] = s.faces2[w];
        if a == tau.tau1[c] && b == s.degen0[s.src(c)] {
            filled[c] = true;
        }
    }
    filled.into_iter().all(|f| f)
}

/// Level maps of a covariant simplicial map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialMap {
    pub h0: Vec<usize>,
    pub h1: Vec<usize>,
    pub h2: Vec<usize>,
}

impl SimplicialMap {
    pub fn identity(s: &TruncSSet) -> Self {
        SimplicialMap { h0: (0..s.s0.len()).collect(), h1: (0..s.s1.len()).collect(), h2: (0..s.s2.len()).collect() }
    }

    /// Commutation with every face and degeneracy.
    pub fn check(&self, src: &TruncSSet, tgt: &TruncSSet) -> Vec<Violation> {
        let mut out = Vec::new();
        for l in 0..src.s1.len() {
            for i in 0..2 {
                if tgt.faces1[self.h1[l]][i] != self.h0[src.faces1[l][i]] {
                    out.push(Violation::new(format!("h d{i} = d{i} h"), format!("1-simplex {}", src.s1[l])));
                }
                if tgt.degen1[self.h1[l]][i] != self.h2[src.degen1[l][i]] {
                    out.push(Violation::new(format!("h s{i} = s{i} h"), format!("1-simplex {}", src.s1[l])));
                }
            }
        }
        for w in 0..src.s2.len() {
            for i in 0..3 {
                if tgt.faces2[self.h2[w]][i] != self.h1[src.faces2[w][i]] {
                    out.push(Violation::new(format!("h d{i} = d{i} h"), format!("2-simplex {}", src.s2[w])));
                }
            }
        }
        for v in 0..src.s0.len() {
            if tgt.degen0[self.h0[v]] != self.h1[src.degen0[v]] {
                out.push(Violation::new("h s0 = s0 h", format!("vertex {}", src.s0[v])));
            }
        }
        out
    }
}

/// Level maps of a contravariant simplicial map: faces and degeneracies are
/// reflected, `d_i h = h d_{n-i}` and `s_i h = h s_{n-1-i}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContravariantMap {
    pub h0: Vec<usize>,
    pub h1: Vec<usize>,
    pub h2: Vec<usize>,
}

impl ContravariantMap {
    pub fn from_duality(s: &TruncSSet, tau: &StrictDuality) -> Self {
        ContravariantMap { h0: (0..s.s0.len()).collect(), h1: tau.tau1.clone(), h2: tau.tau2.clone() }
    }

    pub fn check(&self, src: &TruncSSet, tgt: &TruncSSet) -> Vec<Violation> {
        let mut out = Vec::new();
        for l in 0..src.s1.len() {
            for i in 0..2 {
                if tgt.faces1[self.h1[l]][i] != self.h0[src.faces1[l][1 - i]] {
                    out.push(Violation::new(format!("d{i} h = h d{}", 1 - i), format!("1-simplex {}", src.s1[l])));
                }
                if tgt.degen1[self.h1[l]][i] != self.h2[src.degen1[l][1 - i]] {
                    out.push(Violation::new(format!("s{i} h = h s{}", 1 - i), format!("1-simplex {}", src.s1[l])));
                }
            }
        }
        for w in 0..src.s2.len() {
            for i in 0..3 {
                if tgt.faces2[self.h2[w]][i] != self.h1[src.faces2[w][2 - i]] {
                    out.push(Violation::new(format!("d{i} h = h d{}", 2 - i), format!("2-simplex {}", src.s2[w])));
                }
            }
        }
        for v in 0..src.s0.len() {
            if tgt.degen0[self.h0[v]] != self.h1[src.degen0[v]] {
                out.push(Violation::new("s0 h = h s0", format!("vertex {}", src.s0[v])));
            }
        }
        out
    }
}

/// The Cech nerve together with its tuple bookkeeping.
#[derive(Debug, Clone)]
pub struct CechNerve {
    pub sset: TruncSSet,
    pub duality: StrictDuality,
    pub pairs: Vec<[usize; 2]>,
    pub triples: Vec<[usize; 3]>,
    pair_index: HashMap<[usize; 2], usize>,
    triple_index: HashMap<[usize; 3], usize>,
}

impl CechNerve {
    /// Tuples of indices whose components have a non-initial product,
    /// ordered lexicographically.
    pub fn of(cover: &Family) -> Result<Self> {
        let comps = cover.components()?;
        let base = cover.base();
        let n = comps.len();
        let inhabited: Vec<Vec<bool>> =
            comps.iter().map(|c| (0..base.len()).map(|p| c.presheaf.fiber_size(p) > 0).collect()).collect();
        let meets = |idx: &[usize]| (0..base.len()).any(|p| idx.iter().all(|&i| inhabited[i][p]));
        let label = |idx: &[usize]| {
            let parts: Vec<&str> = idx.iter().map(|&i| cover.index()[i].as_str()).collect();
            format!("({})", parts.join(","))
        };
        let mut pairs = Vec::new();
        let mut triples = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if meets(&[i, j]) {
                    pairs.push([i, j]);
                }
                for k in 0..n {
                    if meets(&[i, j, k]) {
                        triples.push([i, j, k]);
                    }
                }
            }
        }
        let pair_index: HashMap<[usize; 2], usize> = pairs.iter().enumerate().map(|(k, &p)| (p, k)).collect();
        let triple_index: HashMap<[usize; 3], usize> = triples.iter().enumerate().map(|(k, &t)| (t, k)).collect();
        let sset = TruncSSet {
            s0: cover.index().to_vec(),
            s1: pairs.iter().map(|p| label(p)).collect(),
            s2: triples.iter().map(|t| label(t)).collect(),
            faces1: pairs.iter().map(|&[i, j]| [j, i]).collect(),
            faces2: triples
                .iter()
                .map(|&[i, j, k]| [pair_index[&[j, k]], pair_index[&[i, k]], pair_index[&[i, j]]])
                .collect(),
            degen0: (0..n).map(|i| pair_index[&[i, i]]).collect(),
            degen1: pairs.iter().map(|&[i, j]| [triple_index[&[i, i, j]], triple_index[&[i, j, j]]]).collect(),
        };
        let duality = StrictDuality {
            tau1: pairs.iter().map(|&[i, j]| pair_index[&[j, i]]).collect(),
            tau2: triples.iter().map(|&[i, j, k]| triple_index[&[k, j, i]]).collect(),
        };
        Ok(CechNerve { sset, duality, pairs, triples, pair_index, triple_index })
    }

    pub fn pair(&self, i: usize, j: usize) -> Option<usize> {
        self.pair_index.get(&[i, j]).copied()
    }

    pub fn triple(&self, i: usize, j: usize, k: usize) -> Option<usize> {
        self.triple_index.get(&[i, j, k]).copied()
    }
}

/// The Cech simplicial set of a cover with its tuple-reversing duality.
pub fn cech_nerve(cover: &Family) -> Result<(TruncSSet, StrictDuality)> {
    let n = CechNerve::of(cover)?;
    Ok((n.sset, n.duality))
}
