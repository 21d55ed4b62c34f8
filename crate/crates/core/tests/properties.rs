use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weqlab_core::action::{product_action, toy, translation_action};
use weqlab_core::expansion::{cheeger_exact, cheeger_search};
use weqlab_core::quasirandom::conv;
use weqlab_core::wstat::{all_symbols, dist_inf, dist_mu, hausdorff, phi_convolution, w_vector};
use weqlab_core::{FiniteAction, FiniteGroup, GeneratorSet, GroupFunction, Partition, PhiTable, WVector, Q};

fn labels(size: usize, k: usize, seed: u64) -> Partition {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Partition::new(k, (0..size).map(|_| rng.random_range(0..k as u32)).collect()).unwrap()
}

/// Actions with the `+1`/`-1` symbols: a cycle or two disjoint cycles.
fn cyclic(a: usize, b: usize) -> FiniteAction {
    if b == 0 {
        toy::cycle(a)
    } else {
        toy::two_cycles(a, b)
    }
}

fn w(a: &FiniteAction, f: &Partition) -> WVector {
    w_vector(a, &all_symbols(a), f).unwrap()
}

fn alpha(n: u32) -> FiniteAction {
    let g = FiniteGroup::enumerate(2, n, 100_000).unwrap();
    translation_action(&g, &GeneratorSet::sanov()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn group_axioms(n in 2u32..8, i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>(), l in any::<prop::sample::Index>()) {
        let g = FiniteGroup::enumerate(2, n, 100_000).unwrap();
        let (i, j, l) = (i.index(g.order()), j.index(g.order()), l.index(g.order()));
        prop_assert_eq!(g.mul_index(g.mul_index(i, j), l), g.mul_index(i, g.mul_index(j, l)));
        let inv = g.inv_table()[i] as usize;
        prop_assert_eq!(g.mul_index(i, inv), g.identity_index());
        prop_assert_eq!(g.mul_index(g.identity_index(), j), j);
        let prod = g.element(i).mul(&g.element(j)).unwrap();
        prop_assert_eq!(prod.det(), 1 % n);
        prop_assert_eq!(g.index_of(&prod), Some(g.mul_index(i, j)));
    }

    #[test]
    fn w_vectors_satisfy_invariants(a in 1usize..9, b in 0usize..6, k in 1usize..5, seed in any::<u64>()) {
        let act = cyclic(a, b);
        let v = w(&act, &labels(act.size(), k, seed));
        prop_assert!(v.check_invariants().is_ok());
        for s in 0..v.num_symbols() {
            let total: Q = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).map(|(i, j)| v.entry(s, i, j)).sum();
            prop_assert_eq!(total, Q::from_integer(1));
        }
    }

    #[test]
    fn relabelling_permutes_entries(a in 2usize..9, b in 0usize..6, seed in any::<u64>(), shift in 1u32..3) {
        let act = cyclic(a, b);
        let k = 3;
        let f = labels(act.size(), k, seed);
        let g = Partition::new(k, f.labels().iter().map(|&l| (l + shift) % 3).collect()).unwrap();
        let (wf, wg) = (w(&act, &f), w(&act, &g));
        let sigma = |i: usize| (i + shift as usize) % 3;
        for s in 0..wf.num_symbols() {
            for i in 0..k {
                for j in 0..k {
                    prop_assert_eq!(wf.entry(s, i, j), wg.entry(s, sigma(i), sigma(j)));
                }
            }
        }
    }

    #[test]
    fn w_is_two_lipschitz(a in 2usize..10, b in 0usize..6, k in 1usize..4, s1 in any::<u64>(), s2 in any::<u64>()) {
        let act = cyclic(a, b);
        let (f, g) = (labels(act.size(), k, s1), labels(act.size(), k, s2));
        let d = dist_inf(&w(&act, &f), &w(&act, &g)).unwrap();
        prop_assert!(d <= Q::from_integer(2) * dist_mu(&f, &g).unwrap());
    }

    #[test]
    fn sup_distance_is_a_metric(a in 2usize..9, k in 1usize..4, s in prop::array::uniform3(any::<u64>())) {
        let act = toy::cycle(a);
        let [x, y, z] = s.map(|seed| w(&act, &labels(a, k, seed)));
        let d = |p: &WVector, q: &WVector| dist_inf(p, q).unwrap();
        prop_assert_eq!(d(&x, &x), Q::from_integer(0));
        prop_assert_eq!(d(&x, &y), d(&y, &x));
        prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z));
    }

    #[test]
    fn hausdorff_is_a_pseudometric(a in 2usize..8, seeds in prop::collection::vec(any::<u64>(), 3..9)) {
        let act = toy::cycle(a);
        let vs: Vec<WVector> = seeds.iter().map(|&s| w(&act, &labels(a, 2, s))).collect();
        let (x, rest) = vs.split_at(1);
        let (y, z) = rest.split_at(rest.len() / 2);
        let h = |p: &[WVector], q: &[WVector]| hausdorff(p, q).unwrap();
        prop_assert_eq!(h(x, x), Q::from_integer(0));
        prop_assert_eq!(h(y, z), h(z, y));
        prop_assert!(h(x, z) <= h(x, y) + h(y, z));
    }

    #[test]
    fn step_functions_convolve(a in 1usize..7, b in 0usize..5, c in 1usize..7, n in 1usize..4, k in 1usize..4, seed in any::<u64>()) {
        let (left, right) = (cyclic(a, b), toy::cycle(c));
        let g = labels(left.size(), n, seed);
        let h = labels(right.size(), n, seed.rotate_left(17));
        let phi = PhiTable::new(n, k, labels(n * n, k, seed.rotate_left(34)).labels().to_vec()).unwrap();
        let prod = product_action(&left, &right).unwrap();
        let assembled = Partition::new(
            k,
            (0..prod.size()).map(|p| phi.get(g.label(p / right.size()) as usize, h.label(p % right.size()) as usize)).collect(),
        )
        .unwrap();
        let direct = w(&prod, &assembled);
        let convolved = phi_convolution(&w(&left, &g), &w(&right, &h), &phi).unwrap();
        prop_assert!(direct.same_value(&convolved));
    }

    #[test]
    fn cheeger_search_never_beats_enumeration(a in 1usize..9, b in 0usize..9, seed in any::<u64>()) {
        let act = cyclic(a, b);
        prop_assume!(act.size() >= 2);
        let exact = cheeger_exact(&act).unwrap().ratio;
        let found = cheeger_search(&act, 2_000, seed).unwrap();
        prop_assert!(exact <= found.ratio);
        prop_assert_eq!(exact == Q::from_integer(0), !act.is_transitive());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn convolution_is_associative(n in 2u32..4, seed in any::<u64>()) {
        let g = FiniteGroup::enumerate(2, n, 100_000).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || GroupFunction::new(&g, (0..g.order()).map(|_| Q::new(rng.random_range(-4..=4), rng.random_range(1..=3))).collect()).unwrap();
        let (x, y, z) = (draw(), draw(), draw());
        let left = conv(&g, &conv(&g, &x, &y).unwrap(), &z).unwrap();
        let right = conv(&g, &x, &conv(&g, &y, &z).unwrap()).unwrap();
        prop_assert_eq!(left.values(), right.values());
    }

    #[test]
    fn translation_w_vectors_satisfy_invariants(n in prop::sample::select(vec![2u32, 3, 4]), k in 1usize..4, seed in any::<u64>()) {
        let act = alpha(n);
        prop_assert!(w(&act, &labels(act.size(), k, seed)).check_invariants().is_ok());
    }
}
