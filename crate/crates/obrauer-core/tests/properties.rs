use std::sync::OnceLock;

use obrauer_core::diagrams::{random_slice_word, Dir, SliceWord, Word};
use obrauer_core::expr::parse_combination;
use obrauer_core::json::{morphism_from_json, morphism_to_json, to_canonical};
use obrauer_core::quotients::ob_compose;
use obrauer_core::reps::Rep;
use obrauer_core::rewrite::Engine;
use obrauer_core::scalars::Poly;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn engine() -> &'static Engine {
    static E: OnceLock<Engine> = OnceLock::new();
    E.get_or_init(Engine::filtered)
}

fn graded() -> &'static Engine {
    static E: OnceLock<Engine> = OnceLock::new();
    E.get_or_init(Engine::graded)
}

fn word(rng: &mut ChaCha8Rng, max: usize) -> Word {
    let len = rng.gen_range(0..=max);
    Word((0..len).map(|_| if rng.gen_bool(0.5) { Dir::Up } else { Dir::Down }).collect())
}

/// Three composable slice words, lowest first.
fn chain(seed: u64, dots: usize) -> [SliceWord; 3] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = word(&mut rng, 2);
    let g = random_slice_word(&mut rng, &a, 4, dots, 3);
    let f = random_slice_word(&mut rng, &g.tgt(), 4, dots, 3);
    let e = random_slice_word(&mut rng, &f.tgt(), 4, dots, 3);
    [g, f, e]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn normal_forms_are_fixed_points(seed in any::<u64>()) {
        let [w, _, _] = chain(seed, 3);
        let nf = engine().normalize(&w).unwrap();
        let again = engine().normalize_sum(&nf.slice_terms(), &w.src, &w.tgt()).unwrap();
        prop_assert_eq!(again, nf);
    }

    #[test]
    fn normalization_respects_the_representation(seed in any::<u64>()) {
        let [w, _, _] = chain(seed, 3);
        let rep = Rep::symbolic(&[1, 2]).unwrap();
        let nf = engine().normalize(&w).unwrap();
        prop_assert_eq!(rep.eval_morphism(&nf).unwrap(), rep.eval_slices(&w).unwrap());
    }

    #[test]
    fn composition_is_associative(seed in any::<u64>()) {
        let [g, f, e] = chain(seed, 2);
        let (g, f, e) = (engine().normalize(&g).unwrap(), engine().normalize(&f).unwrap(), engine().normalize(&e).unwrap());
        let left = engine().compose(&engine().compose(&e, &f).unwrap(), &g).unwrap();
        let right = engine().compose(&e, &engine().compose(&f, &g).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn composition_matches_concatenation(seed in any::<u64>(), graded_mode in any::<bool>()) {
        let e = if graded_mode { graded() } else { engine() };
        let [g, f, _] = chain(seed, 2);
        let composed = e.compose(&e.normalize(&f).unwrap(), &e.normalize(&g).unwrap()).unwrap();
        prop_assert_eq!(composed, e.normalize(&g.then(&f)).unwrap());
    }

    #[test]
    fn interchange_law(s1 in any::<u64>(), s2 in any::<u64>()) {
        let [g1, f1, _] = chain(s1, 1);
        let [g2, f2, _] = chain(s2, 1);
        let n = |w: &SliceWord| engine().normalize(w).unwrap();
        let lhs = engine().compose(
            &engine().tensor(&n(&f1), &n(&f2)).unwrap(),
            &engine().tensor(&n(&g1), &n(&g2)).unwrap(),
        ).unwrap();
        let rhs = engine().tensor(
            &engine().compose(&n(&f1), &n(&g1)).unwrap(),
            &engine().compose(&n(&f2), &n(&g2)).unwrap(),
        ).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn loop_shortcut_agrees_with_the_engine(seed in any::<u64>()) {
        let [g, f, _] = chain(seed, 0);
        let (g, f) = (engine().normalize(&g).unwrap(), engine().normalize(&f).unwrap());
        let shortcut = ob_compose(&f, &g, &Poly::delta(1)).unwrap();
        prop_assert_eq!(shortcut, engine().compose(&f, &g).unwrap());
    }

    #[test]
    fn json_is_canonical(seed in any::<u64>()) {
        let [w, _, _] = chain(seed, 3);
        let nf = engine().normalize(&w).unwrap();
        let text = to_canonical(&morphism_to_json(&nf));
        let back = morphism_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(to_canonical(&morphism_to_json(&back)), text);
    }

    #[test]
    fn printed_generators_reparse(idx in proptest::collection::vec(0usize..10, 1..4)) {
        let names = ["c", "c'", "d", "d'", "s", "s'", "t", "t'", "x", "x'"];
        let text = idx.iter().map(|&i| names[i]).collect::<Vec<_>>().join(" * ");
        let c = parse_combination(&text).unwrap();
        prop_assert_eq!(c.terms.len(), 1);
        prop_assert_eq!(c.terms[0].0.slices.len(), idx.len());
    }
}
