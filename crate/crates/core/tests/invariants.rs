//! Property tests for the structural invariants of each module.

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mct_core::chain::{
    classify_map, factor_map, random_complex, random_map, trivial_fibration_pullback_criterion, ChainComplex,
};
use mct_core::factor::{is_retract, llp_class, rlp_class};
use mct_core::fincat::{
    check_equivalence, colimit, coproduct, enumerate_functors, limit, parallel_diagram, product, validate_category,
    Diagram,
};
use mct_core::fixtures::{self, poset};
use mct_core::format::{
    parse_category, parse_chain_map, parse_sset, parse_twocat, write_category, write_chain_map, write_sset,
    write_twocat,
};
use mct_core::hocat::{build_ho_sigma, build_q, default_replacements, HoOptions};
use mct_core::homotopy::{all_homotopies, invert, whisker_left, whisker_right};
use mct_core::model::{dual_model, validate_model, w_from_factorizations};
use mct_core::simplicial::{horn_filler_counts, nerve, nerve_map, sd, sd_standard, standard_simplex, validate_smap};
use mct_core::twocat::{is_equivalence_1cell, TwoCat};
use mct_core::{Budget, FinCat, ModelStructure, MorSet};

const NAMES: [&str; 4] = ["p", "q", "r", "s"];

/// Preorder on the first `n` names generated by the pairs in `bits`.
fn preorder(n: usize, bits: &[bool]) -> FinCat {
    let mut le = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && bits[i * 4 + j] {
                le.push((NAMES[i], NAMES[j]));
            }
        }
    }
    poset("P", &NAMES[..n], &le)
}

fn arb_preorder() -> impl Strategy<Value = FinCat> {
    (1usize..=4, prop::collection::vec(prop::bool::weighted(0.3), 16)).prop_map(|(n, b)| preorder(n, &b))
}

/// Subset of the morphisms selected by `mask` (bit `i` for morphism `i`).
fn subset(c: &FinCat, mask: u64) -> MorSet {
    c.morphisms().filter(|&f| mask >> (f % 64) & 1 == 1).collect()
}

fn small_categories() -> Vec<FinCat> {
    vec![
        fixtures::terminal(),
        fixtures::chain(2),
        fixtures::lattice_2x2(),
        fixtures::walking_iso(),
        fixtures::cyclic_group(2),
        fixtures::cyclic_group(3),
        fixtures::parallel_pair(),
        fixtures::walking_homotopy(),
        fixtures::walking_equivalence_1cat(),
    ]
}

fn isomorphic_objects(c: &FinCat, a: usize, b: usize) -> bool {
    c.hom(a, b).iter().any(|&f| c.is_iso(f).is_some())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn preorders_are_categories(c in arb_preorder()) {
        prop_assert!(validate_category(&c).is_empty());
    }

    #[test]
    fn products_are_universal(c in arb_preorder(), a in 0usize..4, b in 0usize..4) {
        let (a, b) = (a % c.num_objects(), b % c.num_objects());
        for (lim, co) in [(product(&c, a, b), false), (coproduct(&c, a, b), true)] {
            let Some(lim) = lim else { continue };
            for x in c.objects() {
                let (l, r) = if co { (c.hom(a, x), c.hom(b, x)) } else { (c.hom(x, a), c.hom(x, b)) };
                for &p in l {
                    for &q in r {
                        let cands = if co { c.hom(lim.apex, x) } else { c.hom(x, lim.apex) };
                        let n = cands.iter().filter(|&&m| if co {
                            c.compose(m, lim.legs[0]) == p && c.compose(m, lim.legs[1]) == q
                        } else {
                            c.compose(lim.legs[0], m) == p && c.compose(lim.legs[1], m) == q
                        }).count();
                        prop_assert_eq!(n, 1);
                    }
                }
            }
        }
    }

    #[test]
    fn opposite_is_an_involution(c in arb_preorder()) {
        let cc = c.opposite().opposite();
        prop_assert_eq!(write_category(&c, &BTreeMap::new()), write_category(&cc, &BTreeMap::new()));
    }

    #[test]
    fn llp_and_rlp_are_antitone(c in arb_preorder(), m1 in any::<u64>(), m2 in any::<u64>()) {
        let s = subset(&c, m1);
        let big: MorSet = s.union(&subset(&c, m2)).copied().collect();
        prop_assert!(llp_class(&c, &big).is_subset(&llp_class(&c, &s)));
        prop_assert!(rlp_class(&c, &big).is_subset(&rlp_class(&c, &s)));
    }

    #[test]
    fn lifting_classes_contain_identities_and_compose(c in arb_preorder(), m in any::<u64>()) {
        let s = subset(&c, m);
        for k in [llp_class(&c, &s), rlp_class(&c, &s)] {
            prop_assert!(c.identity_set().is_subset(&k));
            for &g in &k {
                for &f in &k {
                    if let Some(h) = c.try_compose(g, f) {
                        prop_assert!(k.contains(&h));
                    }
                }
            }
        }
    }

    #[test]
    fn lifting_is_a_galois_connection(c in arb_preorder(), m1 in any::<u64>(), m2 in any::<u64>()) {
        let (l, r) = (subset(&c, m1), subset(&c, m2));
        prop_assert_eq!(l.is_subset(&llp_class(&c, &r)), r.is_subset(&rlp_class(&c, &l)));
    }

    #[test]
    fn llp_is_closed_under_retracts(c in arb_preorder(), m in any::<u64>()) {
        let s = subset(&c, m);
        let k = llp_class(&c, &s);
        for f in c.morphisms() {
            for &g in &k {
                if is_retract(&c, f, g).is_some() {
                    prop_assert!(k.contains(&f));
                }
            }
        }
    }

    #[test]
    fn validate_model_ignores_object_order(
        perm in Just([0usize, 1, 2, 3]).prop_shuffle(),
        w in any::<u64>(), f in any::<u64>(), cof in any::<u64>(),
    ) {
        let objs = ["bot", "a", "b", "top"];
        let le = [("bot", "a"), ("bot", "b"), ("a", "top"), ("b", "top")];
        let c = poset("L", &objs, &le);
        let permuted: Vec<&str> = perm.iter().map(|&i| objs[i]).collect();
        let d = poset("L", &permuted, &le);
        let rename = |s: &MorSet| -> MorSet {
            s.iter().map(|&x| d.find_morphism(c.mor_name(x)).unwrap()).collect()
        };
        let (w, f, cof) = (subset(&c, w), subset(&c, f), subset(&c, cof));
        let m = ModelStructure::new("m", c.clone(), w.clone(), f.clone(), cof.clone());
        let n = ModelStructure::new("n", d.clone(), rename(&w), rename(&f), rename(&cof));
        let (rm, rn) = (validate_model(&m), validate_model(&n));
        for (a, b) in rm.axioms.iter().zip(&rn.axioms) {
            prop_assert_eq!(a.pass, b.pass, "{}", a.axiom);
        }
    }

    #[test]
    fn category_files_round_trip(c in arb_preorder(), m in any::<u64>()) {
        let classes = BTreeMap::from([("K".to_string(), subset(&c, m))]);
        let text = write_category(&c, &classes);
        let back = parse_category(&text).unwrap();
        prop_assert_eq!(write_category(&back.cat, &back.classes), text);
    }

    #[test]
    fn nerves_satisfy_the_simplicial_identities(c in arb_preorder()) {
        let n = nerve(&c, 3);
        prop_assert!(n.check().is_ok());
        prop_assert!(n.check_identities(3).is_ok());
        let s = sd(&nerve(&c, 2));
        prop_assert!(s.check_identities(2).is_ok());
        let text = write_sset(&n);
        prop_assert_eq!(write_sset(&parse_sset(&text).unwrap()), text);
    }

    #[test]
    fn inner_horns_of_nerves_fill_uniquely(c in arb_preorder()) {
        let b = Budget::default();
        let x = nerve(&c, 3);
        for n in 2..=3 {
            for k in 1..n {
                let counts = horn_filler_counts(&x, n, k, &b).unwrap();
                prop_assert!(counts.iter().all(|&m| m == 1), "Lambda{}_{}: {:?}", n, k, counts);
            }
        }
    }

    #[test]
    fn nerves_of_functors_are_simplicial_maps(c in arb_preorder(), d in arb_preorder(), pick in any::<prop::sample::Index>()) {
        let fs = enumerate_functors(&c, &d, &Budget::default()).unwrap();
        prop_assume!(!fs.is_empty());
        let f = &fs[pick.index(fs.len())];
        let (nc, nd) = (nerve(&c, 3), nerve(&d, 3));
        let m = nerve_map(&c, &d, f, &nc, &nd).unwrap();
        prop_assert!(validate_smap(&nc, &nd, &m).is_ok());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn boundaries_square_to_zero(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for p in [2u32, 3] {
            let c = random_complex(&mut rng, p, 4, 4);
            for k in 2..=c.top {
                prop_assert!(c.d[k - 1].mul(&c.d[k], p).is_zero());
            }
            // Adding disks changes no homology.
            let mut padded = c.clone();
            for n in 1..=c.top {
                padded = padded.direct_sum(&ChainComplex::disk(p, n, c.top).unwrap());
            }
            prop_assert_eq!(padded.betti(), c.betti());
        }
    }

    #[test]
    fn weak_equivalences_satisfy_two_out_of_three(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = if seed % 2 == 0 { 2 } else { 3 };
        let top = (seed % 4) as usize;
        let a = random_complex(&mut rng, p, top, 3);
        let b = random_complex(&mut rng, p, top, 3);
        let c = random_complex(&mut rng, p, top, 3);
        let f = random_map(&mut rng, &a, &b);
        let g = random_map(&mut rng, &b, &c);
        let gf = g.after(&f).unwrap();
        let we = [classify_map(&f).weak_equivalence, classify_map(&g).weak_equivalence, classify_map(&gf).weak_equivalence];
        prop_assert!(we.iter().filter(|&&x| x).count() != 2);
    }

    #[test]
    fn chain_criteria_and_factorizations(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = mct_core::chain::oracle_sample(&mut rng).unwrap();
        let k = classify_map(&f);
        prop_assert_eq!(trivial_fibration_pullback_criterion(&f).holds, k.epi && k.weak_equivalence);
        let fs = factor_map(&f).unwrap();
        let (a0, a1) = (classify_map(&fs.a.0), classify_map(&fs.a.1));
        prop_assert!(a0.cofibration && a1.fibration && a1.weak_equivalence);
        let (b0, b1) = (classify_map(&fs.b.0), classify_map(&fs.b.1));
        prop_assert!(b0.cofibration && b0.weak_equivalence && b1.fibration);
        let text = write_chain_map(&f);
        prop_assert_eq!(write_chain_map(&parse_chain_map(&text).unwrap()), text);
    }
}

#[test]
fn limits_and_colimits_are_exchanged_by_opposites() {
    for c in small_categories() {
        let op = c.opposite();
        for f in c.morphisms() {
            for g in c.morphisms().filter(|&g| c.parallel(f, g)) {
                let d = parallel_diagram(&c, f, g);
                let dop = Diagram::new(d.shape.opposite(), d.functor.opposite());
                let (l, r) = (limit(&c, &d), colimit(&op, &dop));
                assert_eq!(l.is_some(), r.is_some(), "{}: {} {}", c.name(), c.mor_name(f), c.mor_name(g));
                if let (Some(l), Some(r)) = (l, r) {
                    assert!(isomorphic_objects(&c, l.apex, r.apex));
                }
            }
        }
    }
}

#[test]
fn equivalences_are_bijective_on_hom_sets() {
    let b = Budget::default();
    let cats = small_categories();
    for c in &cats {
        for d in &cats {
            if c.num_morphisms() > 9 || d.num_morphisms() > 9 {
                continue;
            }
            for f in enumerate_functors(c, d, &b).unwrap() {
                if !check_equivalence(c, d, &f).is_equivalence() {
                    continue;
                }
                for x in c.objects() {
                    for y in c.objects() {
                        assert_eq!(c.hom(x, y).len(), d.hom(f.omap[x], f.omap[y]).len());
                    }
                }
            }
        }
    }
}

#[test]
fn isos_are_stable_under_identities() {
    for c in small_categories() {
        for f in c.morphisms().filter(|&f| c.is_iso(f).is_some()) {
            assert!(c.is_iso(c.compose(c.id(c.cod(f)), f)).is_some());
            assert!(c.is_iso(c.compose(f, c.id(c.dom(f)))).is_some());
        }
    }
}

#[test]
fn model_fixtures_recover_w_and_dualize() {
    for m in fixtures::valid_model_fixtures() {
        assert_eq!(w_from_factorizations(&m), m.w, "{}", m.name);
        let d = dual_model(&m);
        assert!(validate_model(&d).is_valid(), "{}: {}", d.name, validate_model(&d).summary());
    }
}

#[test]
fn homotopy_inversion_and_whiskering() {
    let c = fixtures::walking_homotopy();
    let s = fixtures::wh_sigma(&c);
    let hs = all_homotopies(&c, &s, &Budget::default()).unwrap();
    for h in &hs {
        assert_eq!(invert(&invert(h)), *h);
        for l in c.morphisms().filter(|&l| c.cod(l) == h.cyl.src) {
            for l2 in c.morphisms().filter(|&l2| c.cod(l2) == c.dom(l)) {
                let a = whisker_left(&c, &whisker_left(&c, h, l).unwrap(), l2).unwrap();
                let b = whisker_left(&c, h, c.compose(l, l2)).unwrap();
                assert_eq!(a, b);
            }
        }
        for r in c.morphisms().filter(|&r| c.dom(r) == c.cod(h.h)) {
            for r2 in c.morphisms().filter(|&r2| c.dom(r2) == c.cod(r)) {
                let a = whisker_right(&c, r2, &whisker_right(&c, r, h).unwrap()).unwrap();
                let b = whisker_right(&c, c.compose(r2, r), h).unwrap();
                assert_eq!(a, b);
            }
        }
    }
}

fn equivalences_compose(t: &TwoCat) {
    for g in 0..t.n1() {
        for f in 0..t.n1() {
            if let Some(gf) = t.c1(g, f) {
                if is_equivalence_1cell(t, g).is_some() && is_equivalence_1cell(t, f).is_some() {
                    assert!(
                        is_equivalence_1cell(t, gf).is_some(),
                        "{}: {} . {}",
                        t.name,
                        t.cells1[g].name,
                        t.cells1[f].name
                    );
                }
            }
        }
    }
}

#[test]
fn equivalence_1cells_are_closed_under_composition() {
    let c = fixtures::walking_homotopy();
    let ho = build_ho_sigma(&c, &fixtures::wh_sigma(&c), &HoOptions::default(), &Budget::default()).unwrap();
    equivalences_compose(ho.two().unwrap());
    let gpd = TwoCat::of_categories(
        "Gpd",
        &[fixtures::terminal(), fixtures::walking_iso(), fixtures::cyclic_group(2)],
        &Budget::default(),
    )
    .unwrap();
    equivalences_compose(&gpd);
}

#[test]
fn localizing_functor_inverts_w() {
    let b = Budget::default();
    for m in fixtures::valid_model_fixtures() {
        let ho = mct_core::hocat::build_ho(&m, &HoOptions::default(), &b).unwrap();
        let repl = default_replacements(&m, &b).unwrap();
        let q = build_q(&m, &repl, &ho).unwrap();
        assert_eq!(q.equivalences.len(), m.w.len(), "{}", m.name);
    }
}

#[test]
fn two_category_files_round_trip() {
    let c = fixtures::walking_homotopy();
    let ho = build_ho_sigma(&c, &fixtures::wh_sigma(&c), &HoOptions::default(), &Budget::default()).unwrap();
    let t = ho.two().unwrap();
    let text = write_twocat(t);
    let back = parse_twocat(&text).unwrap();
    assert_eq!(&back, t);
    assert_eq!(write_twocat(&back), text);
}

#[test]
fn subdivision_vertex_counts() {
    for n in 0..=4 {
        assert_eq!(sd_standard(n).count(0), (1 << (n + 1)) - 1);
        assert_eq!(sd(&standard_simplex(n)).count(0), (1 << (n + 1)) - 1);
    }
}
