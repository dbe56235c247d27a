use std::ops::ControlFlow;

use super::presheaf::{same_base, Presheaf, PresheafMap};

/// Backtracking search over natural transformations `src -> tgt`.
///
/// Elements are assigned from larger points downward so that each
/// assignment is either forced by an already-assigned element restricting
/// onto it or chosen freely. `allow(p, e, t)` prunes candidate images; with
/// `injective` set each component must be injective. `visit` sees every
/// complete map and may stop the search.
pub fn hom_search<A, V>(src: &Presheaf, tgt: &Presheaf, injective: bool, allow: A, mut visit: V) -> ControlFlow<()>
where
    A: Fn(usize, usize, usize) -> bool,
    V: FnMut(&PresheafMap) -> ControlFlow<()>,
{
    if !same_base(src.base(), tgt.base()) {
        return ControlFlow::Continue(());
    }
    let base = src.base();
    let mut slots: Vec<(usize, usize)> = Vec::new();
    for &p in base.top_down() {
        for e in 0..src.fiber_size(p) {
            slots.push((p, e));
        }
    }
    let mut slot_of: Vec<Vec<usize>> = (0..base.len()).map(|p| vec![0; src.fiber_size(p)]).collect();
    for (k, &(p, e)) in slots.iter().enumerate() {
        slot_of[p][e] = k;
    }
    // For each slot, the earlier slots restricting onto it.
    let mut parents: Vec<Vec<(usize, usize)>> = vec![Vec::new(); slots.len()];
    for (k, &(q, e)) in slots.iter().enumerate() {
        for p in 0..base.len() {
            if base.lt(p, q) {
                let child = slot_of[p][src.restrict(q, p, e)];
                debug_assert!(child > k);
                parents[child].push((k, q));
            }
        }
    }
    let mut assign: Vec<usize> = vec![usize::MAX; slots.len()];
    let mut used: Vec<Vec<bool>> = (0..base.len()).map(|p| vec![false; tgt.fiber_size(p)]).collect();
    let mut comps: Vec<Vec<usize>> = (0..base.len()).map(|p| vec![0; src.fiber_size(p)]).collect();
    let mut cursor: Vec<usize> = vec![0; slots.len() + 1];

    let candidates = |k: usize, assign: &[usize]| -> (usize, usize) {
        let (p, _) = slots[k];
        match parents[k].first() {
            Some(&(par, q)) => {
                let t = tgt.restrict(q, p, assign[par]);
                (t, t + 1)
            }
            None => (0, tgt.fiber_size(p)),
        }
    };
    let consistent = |k: usize, t: usize, assign: &[usize]| -> bool {
        let (p, _) = slots[k];
        parents[k].iter().all(|&(par, q)| tgt.restrict(q, p, assign[par]) == t)
    };

    let mut k = 0usize;
    if slots.is_empty() {
        return visit(&PresheafMap::new(comps));
    }
    cursor[0] = candidates(0, &assign).0;
    loop {
        let (p, e) = slots[k];
        let (_, hi) = candidates(k, &assign);
        let mut placed = false;
        while cursor[k] < hi {
            let t = cursor[k];
            cursor[k] += 1;
            if injective && used[p][t] {
                continue;
            }
            if !allow(p, e, t) || !consistent(k, t, &assign) {
                continue;
            }
            assign[k] = t;
            comps[p][e] = t;
            if injective {
                used[p][t] = true;
            }
            placed = true;
            break;
        }
        if placed {
            if k + 1 == slots.len() {
                visit(&PresheafMap::new(comps.clone()))?;
                if injective {
                    used[p][assign[k]] = false;
                }
                assign[k] = usize::MAX;
                continue;
            }
            k += 1;
            cursor[k] = candidates(k, &assign).0;
        } else {
            if k == 0 {
                return ControlFlow::Continue(());
            }
            k -= 1;
            let (pp, _) = slots[k];
            if injective {
                used[pp][assign[k]] = false;
            }
            assign[k] = usize::MAX;
        }
    }
}

/// All natural transformations `x -> y`.
pub fn hom_enumerate(x: &Presheaf, y: &Presheaf) -> Vec<PresheafMap> {
    let mut out = Vec::new();
    let _ = hom_search(x, y, false, |_, _, _| true, |m| {
        out.push(m.clone());
        ControlFlow::Continue(())
    });
    out
}

/// Some natural transformation `x -> y` allowed by `allow`, if one exists.
pub fn hom_find(x: &Presheaf, y: &Presheaf, allow: impl Fn(usize, usize, usize) -> bool) -> Option<PresheafMap> {
    let mut found = None;
    let _ = hom_search(x, y, false, allow, |m| {
        found = Some(m.clone());
        ControlFlow::Break(())
    });
    found
}

/// An isomorphism `x -> y`, if the two are isomorphic.
pub fn find_iso(x: &Presheaf, y: &Presheaf) -> Option<PresheafMap> {
    if !same_base(x.base(), y.base()) || (0..x.base().len()).any(|p| x.fiber_size(p) != y.fiber_size(p)) {
        return None;
    }
    let mut found = None;
    let _ = hom_search(x, y, true, |_, _, _| true, |m| {
        found = Some(m.clone());
        ControlFlow::Break(())
    });
    found
}

pub fn is_isomorphic(x: &Presheaf, y: &Presheaf) -> bool {
    find_iso(x, y).is_some()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::fintopos::FinPoset;

    #[test]
    fn functions_from_a_singleton() {
        let pt = Arc::new(FinPoset::one_point());
        let x = Presheaf::constant(&["a"], pt.clone());
        let y = Presheaf::constant(&["b", "c"], pt.clone());
        assert_eq!(hom_enumerate(&x, &y).len(), 2);
        assert_eq!(hom_enumerate(&y, &Presheaf::terminal(pt.clone())).len(), 1);
        assert_eq!(hom_enumerate(&Presheaf::initial(pt.clone()), &y).len(), 1);
        assert!(hom_enumerate(&y, &Presheaf::initial(pt)).is_empty());
    }

    #[test]
    fn yoneda_by_enumeration() {
        let base = Arc::new(FinPoset::chain(&["a", "b"]).unwrap());
        let ya = Presheaf::representable(base.clone(), 0);
        let fibers = vec![vec!["u".into(), "v".into(), "w".into()], vec!["s".into()]];
        let x = Presheaf::from_fn(base.clone(), fibers, |_, _, _| 1);
        let maps = hom_enumerate(&ya, &x);
        assert_eq!(maps.len(), 3);
        let yb = Presheaf::representable(base, 1);
        assert_eq!(hom_enumerate(&yb, &x).len(), 1);
        for m in hom_enumerate(&yb, &x) {
            assert!(m.is_natural(&yb, &x));
        }
    }

    #[test]
    fn isomorphisms() {
        let pt = Arc::new(FinPoset::one_point());
        let x = Presheaf::constant(&["a", "b"], pt.clone());
        let y = Presheaf::constant(&["c", "d"], pt.clone());
        assert!(is_isomorphic(&x, &y));
        assert!(!is_isomorphic(&x, &Presheaf::constant(&["c"], pt)));
        let base = Arc::new(FinPoset::chain(&["a", "b"]).unwrap());
        let t = Presheaf::terminal(base.clone());
        let two = Presheaf::constant(&["0", "1"], base.clone());
        assert!(!is_isomorphic(&t, &Presheaf::representable(base.clone(), 0)));
        assert!(is_isomorphic(&t, &Presheaf::representable(base, 1)));
        assert_eq!(hom_enumerate(&two, &two).iter().filter(|m| m.is_iso(&two, &two)).count(), 2);
    }
}
