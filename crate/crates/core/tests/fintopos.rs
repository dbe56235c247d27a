use std::sync::Arc;

use proptest::prelude::*;
use spandescent::fintopos::{
    connected_components, coproduct, hom_enumerate, is_connected, is_epi_family, is_isomorphic, pairing, product,
    quotient_by_pairs, FinPoset, Presheaf, PresheafMap,
};

/// A poset on `n` points where `i <= j` is generated by the chosen pairs
/// with `i < j`, so the relation is acyclic.
fn poset(n: usize, edges: &[(usize, usize)]) -> Arc<FinPoset> {
    let labels: Vec<String> = (0..n).map(|k| format!("p{k}")).collect();
    let pairs: Vec<(String, String)> =
        edges.iter().filter(|(a, b)| a < b && *b < n).map(|&(a, b)| (labels[a].clone(), labels[b].clone())).collect();
    Arc::new(FinPoset::new(&labels, &pairs).unwrap())
}

/// Fibers grow upwards and restriction clamps `e` to the smaller fiber,
/// which composes correctly along any chain.
fn clamp(base: &Arc<FinPoset>, raw: &[usize], prefix: &str) -> Presheaf {
    let n = base.len();
    let mut sizes = vec![0; n];
    for q in 0..n {
        sizes[q] = (0..q).filter(|&p| base.leq(p, q)).map(|p| sizes[p]).max().unwrap_or(1).max(raw[q]);
    }
    let fibers = sizes.iter().map(|&k| (0..k).map(|e| format!("{prefix}{e}")).collect()).collect();
    Presheaf::from_fn(base.clone(), fibers, move |_, p, e| e.min(sizes[p] - 1))
}

fn arb_base(max_points: usize) -> impl Strategy<Value = Arc<FinPoset>> {
    (1..=max_points, proptest::collection::vec((0..max_points, 0..max_points), 0..6)).prop_map(|(n, e)| poset(n, &e))
}

fn arb_pair(max_points: usize, max_fiber: usize) -> impl Strategy<Value = (Presheaf, Presheaf)> {
    arb_base(max_points).prop_flat_map(move |b| {
        let n = b.len();
        (
            Just(b),
            proptest::collection::vec(1..=max_fiber, n),
            proptest::collection::vec(1..=max_fiber, n),
        )
            .prop_map(|(b, x, y)| (clamp(&b, &x, "x"), clamp(&b, &y, "y")))
    })
}

/// All natural maps by trying every family of functions.
fn brute_homs(x: &Presheaf, y: &Presheaf) -> usize {
    let n = x.base().len();
    let mut count = 0;
    let mut comps: Vec<Vec<usize>> = (0..n).map(|p| vec![0; x.fiber_size(p)]).collect();
    loop {
        if PresheafMap::new(comps.clone()).is_natural(x, y) {
            count += 1;
        }
        // Odometer over every component entry.
        let mut carried = true;
        'outer: for p in 0..n {
            for e in 0..comps[p].len() {
                comps[p][e] += 1;
                if comps[p][e] < y.fiber_size(p) {
                    carried = false;
                    break 'outer;
                }
                comps[p][e] = 0;
            }
        }
        if carried {
            return count;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_presheaves_are_functorial((x, y) in arb_pair(4, 3)) {
        prop_assert!(x.check().is_empty());
        prop_assert!(y.check().is_empty());
    }

    #[test]
    fn hom_enumeration_matches_brute_force((x, y) in arb_pair(3, 2)) {
        let homs = hom_enumerate(&x, &y);
        prop_assert_eq!(homs.len(), brute_homs(&x, &y));
        for h in &homs {
            prop_assert!(h.is_natural(&x, &y));
        }
    }

    #[test]
    fn product_has_projections_and_pairing((x, y) in arb_pair(4, 3)) {
        let (p, px, py) = product(&x, &y).unwrap();
        prop_assert!(p.check().is_empty());
        for q in 0..x.base().len() {
            prop_assert_eq!(p.fiber_size(q), x.fiber_size(q) * y.fiber_size(q));
        }
        prop_assert!(px.is_natural(&p, &x));
        prop_assert!(py.is_natural(&p, &y));
        prop_assert_eq!(pairing(&px, &py, &y), PresheafMap::identity(&p));
    }

    #[test]
    fn coproduct_injections_are_jointly_epi((x, y) in arb_pair(4, 3)) {
        let (c, inj) = coproduct(x.base().clone(), &[("x", &x), ("y", &y)]).unwrap();
        prop_assert_eq!(c.total_size(), x.total_size() + y.total_size());
        prop_assert!(inj[0].is_natural(&x, &c) && inj[1].is_natural(&y, &c));
        prop_assert!(is_epi_family(&c, &[(&x, &inj[0]), (&y, &inj[1])]).unwrap());
        prop_assert!(!is_epi_family(&c, &[(&x, &inj[0])]).unwrap());
    }

    #[test]
    fn components_partition_the_elements((x, y) in arb_pair(4, 3)) {
        let (c, _) = coproduct(x.base().clone(), &[("x", &x), ("y", &y)]).unwrap();
        let parts = connected_components(&c);
        prop_assert_eq!(parts.iter().map(|(p, _)| p.total_size()).sum::<usize>(), c.total_size());
        for (part, incl) in &parts {
            prop_assert!(is_connected(part));
            prop_assert!(incl.is_natural(part, &c));
        }
        // Over one point every element is its own component.
        if x.base().len() == 1 {
            prop_assert_eq!(parts.len(), c.total_size());
        }
        let x_parts = connected_components(&x).len();
        prop_assert!(x_parts >= 1);
        prop_assert_eq!(is_connected(&x), x_parts == 1);
    }

    #[test]
    fn trivial_quotient_is_an_isomorphism((x, _) in arb_pair(4, 3)) {
        let (q, m) = quotient_by_pairs(&x, &[]).unwrap();
        prop_assert!(m.is_iso(&x, &q));
        prop_assert!(is_isomorphic(&x, &q));
    }
}

#[test]
fn representables_satisfy_yoneda() {
    let base = poset(4, &[(0, 1), (1, 3), (2, 3)]);
    let x = clamp(&base, &[1, 2, 1, 3], "x");
    for a in 0..base.len() {
        let y = Presheaf::representable(base.clone(), a);
        assert_eq!(hom_enumerate(&y, &x).len(), x.fiber_size(a));
    }
}

#[test]
fn quotient_collapses_identified_elements() {
    let base = poset(1, &[]);
    let x = Presheaf::constant(&["a", "b", "c"], base);
    let (q, m) = quotient_by_pairs(&x, &[(0, 0, 1)]).unwrap();
    assert_eq!(q.total_size(), 2);
    assert_eq!(m.apply(0, 0), m.apply(0, 1));
}
