use proptest::prelude::*;
use spandescent::family::cech_simplicial_family;
use spandescent::fixtures::{full_nerve_cover, pseudocircle_cover};
use spandescent::fintopos::{Family, FinPoset, Presheaf};
use spandescent::hypercover::generator_refinement;
use spandescent::groupoid::{
    act, enumerate_actions, equivariant_maps, fundamental_presentation, g_fundamental_presentation, validate_action,
    word_equal, GroupoidPresentation,
    Letter, Verdict, Word, WordBudget, WordSolver,
};
use std::sync::Arc;

fn presentation(cover: &Family) -> GroupoidPresentation {
    fundamental_presentation(cech_simplicial_family(cover).unwrap().sset())
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// A composable word starting at `base`, picking letters by the seeds.
fn walk(p: &GroupoidPresentation, base: usize, seeds: &[(usize, bool)]) -> Word {
    let mut at = base;
    let mut letters = Vec::new();
    for &(k, inverse) in seeds {
        let options: Vec<Letter> = (0..p.generators.len())
            .map(|g| if inverse { Letter::new(g).inv() } else { Letter::new(g) })
            .filter(|&l| p.letter_src(l) == at)
            .collect();
        if options.is_empty() {
            break;
        }
        let l = options[k % options.len()];
        at = p.letter_tgt(l);
        letters.push(l);
    }
    Word { base, letters }
}

#[test]
fn simply_connected_actions_are_counted_by_factorials() {
    let p = presentation(&full_nerve_cover());
    for bound in 0..=3 {
        let actions = enumerate_actions(&p, bound);
        assert_eq!(actions.len(), (0..=bound).map(factorial).sum::<usize>(), "bound {bound}");
        for a in &actions {
            assert!(validate_action(&p, a).is_empty());
            // An action of a simply connected groupoid is one set up to
            // transport, so its endomorphisms are all self-maps of that set.
            let n = a.carriers[0].len();
            assert_eq!(equivariant_maps(&p, a, a).len(), n.pow(n as u32));
        }
    }
}

/// The G-fundamental groupoid of the connected refinement of the
/// pseudocircle cover by `y(c)` and `y(d)`.
fn pseudocircle_g() -> GroupoidPresentation {
    g_fundamental_presentation(&generator_refinement(&pseudocircle_cover(), 1).unwrap().family).unwrap()
}

#[test]
fn the_cech_index_of_the_pseudocircle_is_simply_connected() {
    assert_eq!(enumerate_actions(&presentation(&pseudocircle_cover()), 2).len(), 1 + 1 + 2);
}

#[test]
fn the_pseudocircle_has_infinite_cyclic_monodromy() {
    let p = pseudocircle_g();
    // Actions of Z on an n-set spread over two objects: n! transports along a
    // path c -> d and n! choices for the loop.
    assert_eq!(enumerate_actions(&p, 2).len(), 1 + 1 + 4);
    let (c, d) = (0, 1);
    let to_d: Vec<usize> = (0..p.generators.len()).filter(|&g| p.generators[g].src == c && p.generators[g].tgt == d).collect();
    let mut separated = 0;
    for &g in &to_d {
        for &h in &to_d {
            let lp = Word { base: c, letters: vec![Letter::new(g), Letter::new(h).inv()] };
            match word_equal(&p, &lp, &Word::empty(c), WordBudget::default()).unwrap() {
                Verdict::Distinct(a) => {
                    assert!(validate_action(&p, &a).is_empty());
                    assert!((0..a.carriers[c].len()).any(|x| act(&p, &a, &lp, x).unwrap() != x));
                    separated += 1;
                }
                Verdict::Equal => {}
                Verdict::Unknown => panic!("undecided loop"),
            }
        }
    }
    assert!(separated > 0);
}

#[test]
fn discrete_groupoid_has_independent_carriers() {
    let base = Arc::new(FinPoset::discrete(&["x", "y"]).unwrap());
    let u1 = vec![vec!["a".to_string()], vec![]];
    let u2 = vec![vec![], vec!["b".to_string()]];
    let parts = [Presheaf::from_fn(base.clone(), u1, |_, _, e| e), Presheaf::from_fn(base.clone(), u2, |_, _, e| e)];
    let cover = Family::from_components(base, &[("1", &parts[0]), ("2", &parts[1])]).unwrap();
    let p = presentation(&cover);
    assert_eq!(enumerate_actions(&p, 2).len(), 9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn verdicts_are_sound_on_the_pseudocircle(
        base in 0..2usize,
        s1 in proptest::collection::vec((0..8usize, any::<bool>()), 0..6),
        s2 in proptest::collection::vec((0..8usize, any::<bool>()), 0..6),
    ) {
        let p = pseudocircle_g();
        let w1 = walk(&p, base, &s1);
        let w2 = walk(&p, base, &s2);
        prop_assume!(p.target(&w1).unwrap() == p.target(&w2).unwrap());
        let actions = enumerate_actions(&p, 2);
        let agree = |a: &spandescent::groupoid::GroupoidAction| {
            (0..a.carriers[base].len()).all(|x| act(&p, a, &w1, x).unwrap() == act(&p, a, &w2, x).unwrap())
        };
        match WordSolver::new(&p, WordBudget::default()).equal(&w1, &w2).unwrap() {
            Verdict::Equal => prop_assert!(actions.iter().all(agree)),
            Verdict::Distinct(a) => prop_assert!(!agree(&a)),
            Verdict::Unknown => {}
        }
    }

    #[test]
    fn cancelling_a_letter_pair_is_certified(
        seeds in proptest::collection::vec((0..8usize, any::<bool>()), 1..6),
        k in 0..8usize,
    ) {
        let p = pseudocircle_g();
        let w = walk(&p, 0, &seeds);
        let at = p.target(&w).unwrap();
        let out: Vec<Letter> = (0..p.generators.len()).map(Letter::new).filter(|&l| p.letter_src(l) == at).collect();
        let l = out[k % out.len()];
        let mut longer = w.clone();
        longer.letters.extend([l, l.inv()]);
        prop_assert_eq!(word_equal(&p, &longer, &w, WordBudget::default()).unwrap(), Verdict::Equal);
    }
}
