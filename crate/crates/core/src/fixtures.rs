//! Small named covers and data used by the tests, the acceptance suite and
//! the command-line tool.

use std::sync::Arc;

use crate::descent::{induced_h_from_s, numbered_carriers, SDescentDatum, UDescentDatum};
use crate::error::Result;
use crate::family::cech_simplicial_family;
use crate::fintopos::{Family, FinPoset, Presheaf};
use crate::perm::Bij;

pub fn point() -> Arc<FinPoset> {
    Arc::new(FinPoset::one_point())
}

fn sets(parts: &[&[&str]]) -> Family {
    let pt = point();
    let ps: Vec<Presheaf> = parts.iter().map(|s| Presheaf::constant(s, pt.clone())).collect();
    let labels: Vec<String> = (1..=parts.len()).map(|k| k.to_string()).collect();
    let named: Vec<(&str, &Presheaf)> = labels.iter().map(String::as_str).zip(&ps).collect();
    Family::from_components(pt, &named).expect("constant components")
}

/// One point, `U_1 = {a}`, `U_2 = {b, c}`.
pub fn swap_cover() -> Family {
    sets(&[&["a"], &["b", "c"]])
}

/// One point, `U_1 = {a}`, `U_2 = {b}`: every index tuple is a simplex.
pub fn full_nerve_cover() -> Family {
    sets(&[&["a"], &["b"]])
}

pub fn singleton_cover() -> Family {
    sets(&[&["a"]])
}

/// `U_1 = {a}`, `U_2 = {b}`, `U_3 = {c}`, refining [`swap_cover`].
pub fn split_cover() -> Family {
    sets(&[&["a"], &["b"], &["c"]])
}

/// The swap cover with an extra component `U_3 = {d}`.
pub fn swap_cover_extended() -> Family {
    sets(&[&["a"], &["b", "c"], &["d"]])
}

/// The swap datum: carriers `{0, 1}`, swap across the two indices and the
/// identity within each.
pub fn swap_datum() -> Result<UDescentDatum> {
    let cover = swap_cover();
    let cech = cech_simplicial_family(&cover)?;
    let s = cech.sset();
    let d = SDescentDatum {
        carriers: numbered_carriers(&[2, 2]),
        s: (0..s.s1.len()).map(|l| if s.src(l) == s.tgt(l) { Bij::identity(2) } else { Bij::swap() }).collect(),
    };
    let h = induced_h_from_s(&d, &cech.family)?;
    Ok(UDescentDatum { carriers: h.carriers, sigma: h.sigma_hat })
}

/// The pseudocircle `a, b < c, d`.
pub fn pseudocircle() -> Arc<FinPoset> {
    Arc::new(
        FinPoset::new(&["a", "b", "c", "d"], &[("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")])
            .expect("pseudocircle is a poset"),
    )
}

/// The pseudocircle covered by `y(c)` and `y(d)`.
pub fn pseudocircle_cover() -> Family {
    let base = pseudocircle();
    let c = Presheaf::representable(base.clone(), 2);
    let d = Presheaf::representable(base.clone(), 3);
    Family::from_components(base, &[("c", &c), ("d", &d)]).expect("representable components")
}

/// A presheaf with `sizes[p]` elements at `p`, restricting `e` to
/// `min(e, sizes[p] - 1)`; sizes must not increase downwards.
pub fn clamp_presheaf(base: Arc<FinPoset>, sizes: &[usize], prefix: &str) -> Presheaf {
    let fibers = sizes.iter().map(|&n| (0..n).map(|k| format!("{prefix}{k}")).collect()).collect();
    let sizes = sizes.to_vec();
    Presheaf::from_fn(base, fibers, move |_, p, e| e.min(sizes[p].saturating_sub(1)))
}

/// A fixed suite of covers over posets with at most four points, at most
/// three components and fibers of at most three elements.
pub fn cover_suite() -> Vec<(String, Family)> {
    let mut out = vec![
        ("swap".to_string(), swap_cover()),
        ("full".to_string(), full_nerve_cover()),
        ("single".to_string(), sets(&[&["a", "b", "c"]])),
        ("three".to_string(), sets(&[&["a"], &["b", "c"], &["d", "e", "f"]])),
    ];
    let fam = |base: &Arc<FinPoset>, parts: Vec<Presheaf>| {
        let labels: Vec<String> = (1..=parts.len()).map(|k| k.to_string()).collect();
        let named: Vec<(&str, &Presheaf)> = labels.iter().map(String::as_str).zip(&parts).collect();
        Family::from_components(base.clone(), &named).expect("suite cover")
    };
    let chain2 = Arc::new(FinPoset::chain(&["0", "1"]).expect("chain"));
    out.push((
        "chain2-rep-const".into(),
        fam(&chain2, vec![Presheaf::representable(chain2.clone(), 1), Presheaf::constant(&["a", "b"], chain2.clone())]),
    ));
    out.push((
        "chain2-reps".into(),
        fam(&chain2, vec![Presheaf::representable(chain2.clone(), 0), Presheaf::representable(chain2.clone(), 1)]),
    ));
    let disc = Arc::new(FinPoset::discrete(&["p", "q"]).expect("discrete"));
    out.push((
        "discrete-reps".into(),
        fam(&disc, vec![Presheaf::representable(disc.clone(), 0), Presheaf::representable(disc.clone(), 1)]),
    ));
    out.push((
        "discrete-clamp".into(),
        fam(&disc, vec![Presheaf::constant(&["a"], disc.clone()), clamp_presheaf(disc.clone(), &[2, 1], "x")]),
    ));
    let vee = Arc::new(FinPoset::new(&["a", "b", "c"], &[("a", "c"), ("b", "c")]).expect("vee"));
    out.push((
        "vee-reps".into(),
        fam(
            &vee,
            vec![
                Presheaf::representable(vee.clone(), 2),
                Presheaf::representable(vee.clone(), 0),
                Presheaf::representable(vee.clone(), 1),
            ],
        ),
    ));
    let wedge = Arc::new(FinPoset::new(&["a", "b", "c"], &[("a", "b"), ("a", "c")]).expect("wedge"));
    out.push((
        "wedge-reps".into(),
        fam(&wedge, vec![Presheaf::representable(wedge.clone(), 1), Presheaf::representable(wedge.clone(), 2)]),
    ));
    out.push(("pseudocircle".into(), pseudocircle_cover()));
    let pc = pseudocircle();
    out.push((
        "pseudocircle-terminal".into(),
        fam(
            &pc,
            vec![
                Presheaf::representable(pc.clone(), 2),
                Presheaf::representable(pc.clone(), 3),
                Presheaf::terminal(pc.clone()),
            ],
        ),
    ));
    let chain3 = Arc::new(FinPoset::chain(&["0", "1", "2"]).expect("chain"));
    out.push((
        "chain3-clamp".into(),
        fam(&chain3, vec![clamp_presheaf(chain3.clone(), &[1, 2, 3], "x"), Presheaf::constant(&["a", "b"], chain3.clone())]),
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descent::validate_u_descent;

    #[test]
    fn suite_is_well_formed() {
        let suite = cover_suite();
        assert!(suite.len() >= 10);
        for (name, c) in &suite {
            assert!(c.base().len() <= 4, "{name}");
            let comps = c.components().unwrap();
            assert!(comps.len() <= 3, "{name}");
            for comp in comps {
                assert!(comp.presheaf.check().is_empty(), "{name}");
                assert!((0..c.base().len()).all(|p| comp.presheaf.fiber_size(p) <= 3), "{name}");
            }
        }
    }

    #[test]
    fn swap_datum_is_valid() {
        assert!(validate_u_descent(&swap_cover(), &swap_datum().unwrap()).is_empty());
    }
}
