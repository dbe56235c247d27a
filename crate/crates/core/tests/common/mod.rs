#![allow(dead_code)]

use std::sync::Arc;

use proptest::prelude::*;
use spandescent::fintopos::{Family, FinPoset, Presheaf};

/// A poset on `n` points generated by the chosen pairs `i < j`.
pub fn poset(n: usize, edges: &[(usize, usize)]) -> Arc<FinPoset> {
    let labels: Vec<String> = (0..n).map(|k| format!("p{k}")).collect();
    let pairs: Vec<(String, String)> =
        edges.iter().filter(|(a, b)| a < b && *b < n).map(|&(a, b)| (labels[a].clone(), labels[b].clone())).collect();
    Arc::new(FinPoset::new(&labels, &pairs).unwrap())
}

/// The cover by the representables `y(a)` for the given points.
pub fn representable_cover(base: &Arc<FinPoset>, points: &[usize]) -> Family {
    let parts: Vec<Presheaf> = points.iter().map(|&a| Presheaf::representable(base.clone(), a)).collect();
    let labels: Vec<String> = (1..=parts.len()).map(|k| k.to_string()).collect();
    let named: Vec<(&str, &Presheaf)> = labels.iter().map(String::as_str).zip(&parts).collect();
    Family::from_components(base.clone(), &named).unwrap()
}

/// Random posets on at most four points with one to three representable
/// components.
pub fn arb_representable_cover() -> impl Strategy<Value = (Arc<FinPoset>, Vec<usize>)> {
    (1..=4usize, proptest::collection::vec((0..4usize, 0..4usize), 0..6)).prop_flat_map(|(n, e)| {
        let base = poset(n, &e);
        (Just(base), proptest::collection::vec(0..n, 1..=3))
    })
}
