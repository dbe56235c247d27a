use spandescent::fixtures::{full_nerve_cover, pseudocircle_cover, singleton_cover, split_cover, swap_cover};
use spandescent::groupoid::{fundamental_presentation, g_fundamental_presentation, WordBudget};
use spandescent::hypercover::{connected_refinement, generator_refinement};
use spandescent::progroupoid::{
    assemble, classifying_category, CoverMap, HypercoverIndex, HypercoverNode, IndexEdge, Strictness,
};
use spandescent::fintopos::Family;

fn node(label: &str, cover: Family) -> HypercoverNode {
    let refinement = connected_refinement(&cover, 2).unwrap();
    HypercoverNode { label: label.into(), cover, refinement }
}

fn edge(index: &[HypercoverNode], from: usize, to: usize, map: Vec<usize>) -> IndexEdge {
    IndexEdge { from, to, cover_map: CoverMap::injective(&index[from].cover, &index[to].cover, map).unwrap() }
}

#[test]
fn chain_of_coarsenings_is_strict() {
    let nodes = vec![node("split", split_cover()), node("full", full_nerve_cover()), node("single", singleton_cover())];
    let edges = vec![edge(&nodes, 0, 1, vec![0, 1, 1]), edge(&nodes, 1, 2, vec![0, 0])];
    let index = HypercoverIndex { nodes, edges };
    let (pg, report) = assemble(&index, WordBudget::default()).unwrap();
    assert_eq!(pg.groupoids.len(), 3);
    assert_eq!(pg.transitions.len(), 2);
    assert_eq!(report.nodes, ["split", "full", "single"]);
    assert!(report.all_strict(), "{report:?}");
    for (fd, t) in pg.transitions.iter().zip(&report.transitions) {
        assert_eq!(t.verdict, Strictness::Strict);
        assert_eq!(fd.object_map.len(), pg.groupoids[index.edges.iter().position(|e| index.nodes[e.from].label == t.from).unwrap()].objects.len());
    }
}

#[test]
fn wrong_shape_cover_map_is_rejected() {
    let a = split_cover();
    let b = full_nerve_cover();
    assert!(CoverMap::injective(&a, &b, vec![0, 1]).is_err());
    assert!(CoverMap::injective(&a, &b, vec![0, 1, 2]).is_err());
}

#[test]
fn classifying_categories_are_categories() {
    for cover in [full_nerve_cover(), swap_cover(), split_cover()] {
        let f = generator_refinement(&cover, 1).unwrap();
        let p = g_fundamental_presentation(&f.family).unwrap();
        let c = classifying_category(&p, 2);
        assert!(c.verify().is_empty());
        // Every action has at least its identity.
        assert!(c.hom_count() >= c.objects.len());
    }
}

#[test]
fn pseudocircle_classifying_category_sees_the_loop() {
    let r = generator_refinement(&pseudocircle_cover(), 1).unwrap();
    let p = g_fundamental_presentation(&r.family).unwrap();
    let c = classifying_category(&p, 2);
    assert!(c.verify().is_empty());
    // Labelled actions on carriers of size 0, 1, 2: one transport per
    // component pair over each of the two loop points.
    assert_eq!(c.objects.len(), 1 + 1 + 2 * 2);
    // The Cech index alone is simply connected: one free transport at size 2.
    let s = spandescent::family::cech_simplicial_family(&pseudocircle_cover()).unwrap().sset().clone();
    let simple = classifying_category(&fundamental_presentation(&s), 2);
    assert_eq!(simple.objects.len(), 1 + 1 + 2);
}
