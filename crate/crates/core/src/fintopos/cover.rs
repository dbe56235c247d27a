use std::sync::Arc;

use super::presheaf::{coproduct, same_base, Presheaf, PresheafMap};
use super::FinPoset;
use crate::error::{Error, Result, Violation};

/// A family `(H, S, zeta)`: a total presheaf fibred over a finite index set.
///
/// The components `H_i` are the preimages of the indices and are derived on
/// demand by [`Family::components`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Family {
    total: Presheaf,
    index: Vec<String>,
    zeta: Vec<Vec<usize>>,
}

/// One component `H_i` of a family with its inclusion into the total.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub presheaf: Arc<Presheaf>,
    pub inclusion: PresheafMap,
    /// For each point, the local index of every total element in its own
    /// component.
    pub local: Vec<Vec<usize>>,
}

impl Family {
    /// Checks that `zeta` is a natural map into the constant presheaf on
    /// `index`.
    pub fn new(total: Presheaf, index: Vec<String>, zeta: Vec<Vec<usize>>) -> Result<Self> {
        let base = total.base().clone();
        if zeta.len() != base.len() {
            return Err(Error::Malformed("zeta needs one component per point".into()));
        }
        for p in 0..base.len() {
            if zeta[p].len() != total.fiber_size(p) || zeta[p].iter().any(|&i| i >= index.len()) {
                return Err(Error::Malformed(format!("zeta at {} is not a function into the index", base.label(p))));
            }
        }
        for (p, q) in base.strict_pairs() {
            for e in 0..total.fiber_size(q) {
                if zeta[p][total.restrict(q, p, e)] != zeta[q][e] {
                    return Err(Error::Malformed(format!(
                        "zeta is not natural at {} ({} to {})",
                        total.label(q, e),
                        base.label(q),
                        base.label(p)
                    )));
                }
            }
        }
        Ok(Family { total, index, zeta })
    }

    /// The family whose components are `parts`, laid out contiguously with
    /// total labels `index/element`.
    pub fn from_components(base: Arc<FinPoset>, parts: &[(&str, &Presheaf)]) -> Result<Self> {
        let (total, inj) = coproduct(base.clone(), parts)?;
        let mut zeta: Vec<Vec<usize>> = (0..base.len()).map(|p| vec![0; total.fiber_size(p)]).collect();
        for (i, m) in inj.iter().enumerate() {
            for (p, comp) in m.components().iter().enumerate() {
                for &t in comp {
                    zeta[p][t] = i;
                }
            }
        }
        Family::new(total, parts.iter().map(|(l, _)| l.to_string()).collect(), zeta)
    }

    pub fn base(&self) -> &Arc<FinPoset> {
        self.total.base()
    }

    pub fn total(&self) -> &Presheaf {
        &self.total
    }

    pub fn index(&self) -> &[String] {
        &self.index
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.iter().position(|l| l == label)
    }

    pub fn zeta(&self, p: usize, e: usize) -> usize {
        self.zeta[p][e]
    }

    pub fn zeta_map(&self) -> PresheafMap {
        PresheafMap::new(self.zeta.clone())
    }

    /// The preimage sub-presheaves `H_i`, failing if one is initial.
    pub fn components(&self) -> Result<Vec<Component>> {
        let n = self.base().len();
        (0..self.index.len())
            .map(|i| {
                let keep: Vec<Vec<bool>> =
                    (0..n).map(|p| self.zeta[p].iter().map(|&z| z == i).collect()).collect();
                let (sub, incl) = self.total.sub(&keep)?;
                if sub.is_initial() {
                    return Err(Error::EmptyComponent(self.index[i].clone()));
                }
                let mut local: Vec<Vec<usize>> = (0..n).map(|p| vec![usize::MAX; self.total.fiber_size(p)]).collect();
                for p in 0..n {
                    for (k, &e) in incl.component(p).iter().enumerate() {
                        local[p][e] = k;
                    }
                }
                Ok(Component { presheaf: Arc::new(sub), inclusion: incl, local })
            })
            .collect()
    }
}

/// `family_components` as a free function.
pub fn family_components(f: &Family) -> Result<Vec<Component>> {
    f.components()
}

/// A morphism of families: a map of totals over a map of indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyMorphism {
    pub on_total: PresheafMap,
    pub on_index: Vec<usize>,
}

impl FamilyMorphism {
    /// Naturality of `on_total` and commutativity of the square against the
    /// two structure maps.
    pub fn check(&self, src: &Family, tgt: &Family) -> Vec<Violation> {
        if !same_base(src.base(), tgt.base()) {
            return vec![Violation::new("family morphism", "base mismatch")];
        }
        let mut out = self.on_total.check(&src.total, &tgt.total);
        if !out.is_empty() {
            return out;
        }
        if self.on_index.len() != src.index.len() || self.on_index.iter().any(|&j| j >= tgt.index.len()) {
            out.push(Violation::new("family morphism", "index map has the wrong shape"));
            return out;
        }
        for (p, e) in src.total.elements() {
            if tgt.zeta[p][self.on_total.apply(p, e)] != self.on_index[src.zeta[p][e]] {
                out.push(Violation::new(
                    "family square",
                    format!("element {} at {}", src.total.label(p, e), src.base().label(p)),
                ));
            }
        }
        out
    }
}
