mod common;

use std::sync::Arc;

use proptest::prelude::*;
use spandescent::family::{cech_simplicial_family, condition_g, validate_selfdual};
use spandescent::fintopos::{is_connected, Presheaf};
use spandescent::fixtures::{cover_suite, pseudocircle_cover};
use spandescent::hypercover::{
    check_epi_criteria, connected_refinement, generator_refinement, hypercover_report, is_hypercover, one_span_refinement,
    representables, zero_span_refinement, ClassRef, SpanClass, SpanClassSp,
};
use spandescent::Error;

use common::{arb_representable_cover, representable_cover};

#[test]
fn cech_families_are_hypercovers() {
    for (name, cover) in cover_suite() {
        let f = cech_simplicial_family(&cover).unwrap();
        assert!(is_hypercover(&f.family, &cover).unwrap(), "{name}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn connected_refinements_of_representable_covers((base, points) in arb_representable_cover()) {
        let cover = representable_cover(&base, &points);
        let r = connected_refinement(&cover, 1).unwrap();
        let f = &r.family;
        prop_assert!(validate_selfdual(f).is_empty());
        prop_assert!(condition_g(f));
        for l in 0..f.sset().s1.len() {
            prop_assert!(is_connected(f.family.component(1, l)));
        }
        let mut class = r.vertices.clone();
        class.extend(representables(&cover));
        if check_epi_criteria(&cover, ClassRef::Vertices(&SpanClass(class))).unwrap() {
            prop_assert!(is_hypercover(&f.family, &cover).unwrap());
        }
    }
}

#[test]
fn representables_make_the_pseudocircle_a_hypercover() {
    let cover = pseudocircle_cover();
    let r = generator_refinement(&cover, 1).unwrap();
    let report = hypercover_report(&r.family.family, &cover).unwrap();
    assert!(report.holds, "{report:?}");
    assert_eq!(report.pairs, 4);
}

#[test]
fn starved_vertex_class_misses_the_overlap() {
    let cover = pseudocircle_cover();
    let comps: Vec<Arc<Presheaf>> = cover.components().unwrap().into_iter().map(|c| c.presheaf).collect();
    let class = SpanClass(comps);
    assert!(!check_epi_criteria(&cover, ClassRef::Vertices(&class)).unwrap());
    let r = zero_span_refinement(&cover, &class).unwrap();
    let report = hypercover_report(&r.family.family, &cover).unwrap();
    assert!(!report.holds);
    let over: Vec<&str> = report.uncovered_pairs.iter().map(|u| u.over.as_str()).collect();
    assert_eq!(over, ["(c,d)", "(c,d)", "(d,c)", "(d,c)"]);
}

#[test]
fn one_span_class_from_a_zero_span_refinement() {
    let cover = pseudocircle_cover();
    let r = generator_refinement(&cover, 1).unwrap();
    let spans: Vec<_> = (0..r.family.sset().s1.len()).map(|l| r.family.family.span_of_1simplex(l).unwrap()).collect();
    let class = SpanClassSp(spans);
    assert!(check_epi_criteria(&cover, ClassRef::Spans(&class)).unwrap());
    let one = one_span_refinement(&cover, &class).unwrap();
    assert!(validate_selfdual(&one.family).is_empty());
    assert!(condition_g(&one.family));
    assert!(is_hypercover(&one.family.family, &cover).unwrap());
    assert_eq!(one.family.sset().s1.len(), r.family.sset().s1.len());
}

#[test]
fn class_must_contain_the_components() {
    let cover = pseudocircle_cover();
    let err = zero_span_refinement(&cover, &SpanClass(representables(&cover)[..2].to_vec())).unwrap_err();
    assert!(matches!(err, Error::MissingCoverComponent(_)), "{err}");
}
