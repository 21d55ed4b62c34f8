use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::action::{product_action, toy};
use crate::expansion::cheeger_exact;
use crate::wstat::{dist_inf, dist_mu, w_vector};

fn group(n: u32) -> FiniteGroup {
    FiniteGroup::enumerate(2, n, DEFAULT_ENUMERATION_BUDGET).unwrap()
}

fn inst(n: u32, m: u32) -> Instance {
    Instance::build(&ExperimentConfig::new(n, m, 1)).unwrap()
}

fn random_labels(size: usize, rng: &mut ChaCha8Rng) -> Partition {
    Partition::new(2, (0..size).map(|_| rng.random_range(0..2)).collect()).unwrap()
}

#[test]
fn target_u_shape() {
    let s = GeneratorSet::sanov();
    let u = target_u(s.symbols(), s.inverse_pairing());
    let entries: Vec<Q> = u.rows().map(|r| r.3).collect();
    assert_eq!(entries.len(), 16);
    assert_eq!(entries.iter().filter(|&&e| e == Q::new(1, 2)).count(), 8);
    assert_eq!(entries.iter().filter(|&&e| e == Q::from_integer(0)).count(), 8);
    for g in 0..4 {
        for i in 0..2 {
            assert_eq!(u.entry(g, i, 0) + u.entry(g, i, 1), Q::new(1, 2));
        }
    }
    u.check_invariants().unwrap();
}

#[test]
fn delta_examples() {
    assert_eq!(delta(4, Q::from_integer(1)).unwrap(), Q::new(1, 128));
    assert_eq!(delta(4, crate::rational::parse("0.1").unwrap()).unwrap(), Q::new(1, 1280));
    let e = Q::new(3, 7);
    assert!((1..10).all(|s| delta(s + 1, e).unwrap() < delta(s, e).unwrap()));
    assert!(delta(4, Q::from_integer(0)).is_err());
}

#[test]
fn f_z_examples() {
    let (g3, g9) = (group(3), group(9));
    assert!(f_z(&g3, &g9, &[]).unwrap().labels().iter().all(|&l| l == 0));
    let all: Vec<usize> = (0..24).collect();
    assert!(f_z(&g3, &g9, &all).unwrap().labels().iter().all(|&l| l == 1));
    assert!(matches!(f_z(&g9, &g3, &[]), Err(Error::NotDivisible { .. })));

    let i = inst(3, 9);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..5 {
        let z: Vec<usize> = (0..24).filter(|_| rng.random_bool(0.5)).collect();
        let f = f_z(&g3, &g9, &z).unwrap();
        let d = invariance_defect(&i.an, &i.am, &f).unwrap();
        assert_eq!(d.total, Q::from_integer(0));
        let back = nearest_fz(&g3, &g9, &f).unwrap();
        assert_eq!(back.z, z);
        assert_eq!(back.dist, Q::from_integer(0));
    }
}

#[test]
fn half_size_z_realizes_u() {
    let s = GeneratorSet::sanov();
    for (n, m) in [(3, 3), (3, 9), (5, 5)] {
        let (gn, gm) = (group(n), group(m));
        let w = u_membership_witness(&gn, &gm, &s).unwrap();
        assert!(w.exact, "({n},{m})");
        assert_eq!(w.z.len(), gn.order() / 2);
    }
    // any other size moves the diagonal mass away from 1/2
    let i = inst(3, 3);
    let u = i.target();
    for size in [0, 5, 11, 13, 24] {
        let z: Vec<usize> = (0..size).collect();
        let f = f_z(&i.gn, &i.gm, &z).unwrap();
        let prod = product_action(&i.an, &i.am).unwrap();
        let w = w_vector(&prod, &all_symbols(&prod), &f).unwrap();
        assert!(!w.same_value(&u));
        assert_eq!(w.entry(0, 1, 1), Q::new(size as i128, 24));
    }
    assert!(matches!(
        u_membership_witness(&group(2), &group(2), &s),
        Err(Error::NotTransitive { .. })
    ));
}

#[test]
fn invariance_defect_matches_w_and_recount() {
    let i = inst(3, 3);
    let prod = product_action(&i.an, &i.am).unwrap();
    let symbols = all_symbols(&prod);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for trial in 0..100 {
        let f = if trial % 2 == 0 {
            random_labels(576, &mut rng)
        } else {
            let mut labels = vec![0; 576];
            labels[rng.random_range(0..576)] = 1;
            Partition::new(2, labels).unwrap()
        };
        let d = invariance_defect(&i.an, &i.am, &f).unwrap();
        let w = w_vector(&prod, &symbols, &f).unwrap();
        for s in 0..4 {
            assert_eq!(d.per_symbol[s], w.entry(s, 0, 1) + w.entry(s, 1, 0));
        }
        // recount on the materialized product
        let moved = (0..576).filter(|&p| (0..4).any(|s| f.label(prod.act(s, p)) != f.label(p))).count();
        assert_eq!(d.total, Q::new(moved as i128, 576));
        if trial % 2 == 1 {
            // one marked point: it moves under every symbol, and so do its 4 preimages
            assert_eq!(moved, 5);
        }
    }
}

#[test]
fn nearest_fz_is_majority_and_optimal() {
    let i = inst(3, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let z: Vec<usize> = vec![0, 3, 7, 20];
    let mut f = f_z(&i.gn, &i.gm, &z).unwrap().labels().to_vec();
    // flip 11 < 12 points of the orbit of element 3
    let orbit: Vec<usize> = (0..576).filter(|&p| crate::action::oz_labels(&i.gn, &i.gm, &i.gm.reduction_to(&i.gn).unwrap())[p] == 3).collect();
    for &p in orbit.iter().take(11) {
        f[p] = 0;
    }
    let r = nearest_fz(&i.gn, &i.gm, &Partition::new(2, f).unwrap()).unwrap();
    assert_eq!(r.z, z);
    assert_eq!(r.dist, Q::new(11, 576));

    for _ in 0..20 {
        let f = random_labels(576, &mut rng);
        let r = nearest_fz(&i.gn, &i.gm, &f).unwrap();
        let got = dist_mu(&f, &f_z(&i.gn, &i.gm, &r.z).unwrap()).unwrap();
        assert_eq!(got, r.dist);
        // each orbit independently: the other choice is never better
        for zz in 0..24 {
            let mut other = r.z.clone();
            match other.iter().position(|&e| e == zz) {
                Some(pos) => {
                    other.remove(pos);
                }
                None => other.push(zz),
            }
            assert!(dist_mu(&f, &f_z(&i.gn, &i.gm, &other).unwrap()).unwrap() >= r.dist);
        }
    }

    // all 2^6 subsets on the order-6 quotient
    let g2 = group(2);
    for _ in 0..20 {
        let f = random_labels(36, &mut rng);
        let r = nearest_fz(&g2, &g2, &f).unwrap();
        let best = (0u32..64)
            .map(|mask| {
                let z: Vec<usize> = (0..6).filter(|b| mask >> b & 1 == 1).collect();
                dist_mu(&f, &f_z(&g2, &g2, &z).unwrap()).unwrap()
            })
            .min()
            .unwrap();
        assert_eq!(r.dist, best);
    }

    // exact halves vote for z ∉ Z
    let mut half = vec![0; 36];
    let labels = crate::action::oz_labels(&g2, &g2, &g2.reduction_to(&g2).unwrap());
    for (p, _) in labels.iter().enumerate().filter(|(_, &z)| z == 0).take(3) {
        half[p] = 1;
    }
    assert!(nearest_fz(&g2, &g2, &Partition::new(2, half).unwrap()).unwrap().z.is_empty());
}

#[test]
fn claim3_examples() {
    let b = claim3_bound(3, 1).unwrap();
    assert_eq!(b.bound, -1.75);
    assert_eq!(b.status, BoundStatus::Vacuous);
    let b = claim3_bound(1013, 1).unwrap();
    assert!((b.bound - 0.161).abs() < 1e-3);
    assert!(b.bound > 0.125);
    assert_eq!(b.status, BoundStatus::Active);
    assert_eq!(claim3_bound(131, 1).unwrap().status, BoundStatus::Weak);
    assert_eq!(claim3_bound(2026, 1).unwrap().p, 2);
    let primes = [2u32, 3, 5, 101, 127, 131, 139, 509, 521, 1013, 2053, 4099, 8209, 32771];
    for steps in 1..5 {
        let statuses: Vec<BoundStatus> = primes.iter().map(|&p| claim3_bound(p, steps).unwrap().status).collect();
        assert!(statuses.windows(2).all(|w| w[0] <= w[1]));
        for &p in &primes {
            let c = claim3_bound(p, steps).unwrap();
            match c.status {
                BoundStatus::Vacuous => assert!(c.bound <= 1e-12),
                BoundStatus::Weak => assert!(c.bound > 0.0 && c.bound <= 0.125 + 1e-12),
                BoundStatus::Active => assert!(c.bound > 0.125),
            }
        }
    }
}

#[test]
fn constant_steps_sit_at_one_half() {
    for (n, m) in [(3, 3), (3, 9), (5, 5)] {
        let r = step_search(&ExperimentConfig::new(n, m, 1)).unwrap();
        assert!(r.exhaustive);
        assert_eq!(r.best_dist, Q::new(1, 2));
    }
}

#[test]
fn two_step_search_is_reproducible() {
    let mut cfg = ExperimentConfig::new(3, 3, 2);
    cfg.search = SearchOptions { restarts: 4, moves: 4000, seed: 9, ..Default::default() };
    let a = step_search(&cfg).unwrap();
    let b = step_search(&cfg).unwrap();
    assert_eq!(a, b);
    assert!(!a.exhaustive);
    assert!(a.best_dist >= Q::from_integer(0) && a.best_dist <= Q::new(1, 2));
    assert_eq!(a.trace.len(), 4);
    // the reported distance is that of the returned step function
    let i = inst(3, 3);
    let prod = product_action(&i.an, &i.am).unwrap();
    let w = w_vector(&prod, &all_symbols(&prod), &a.best.assemble()).unwrap();
    assert_eq!(dist_inf(&w, &i.target()).unwrap(), a.best_dist);
}

#[test]
fn exhaustive_search_matches_brute_force() {
    let pairs = [(toy::cycle(2), toy::cycle(3)), (toy::cycle(3), toy::cycle(3)), (toy::two_cycles(1, 2), toy::cycle(2))];
    for (a, b) in &pairs {
        let prod = product_action(a, b).unwrap();
        let symbols = all_symbols(a);
        let u = target_u(a.symbols(), a.inverse_pairing());
        for n in 1..3 {
            let r = search_step_functions(a, b, &symbols, &u, n, &SearchOptions::default()).unwrap();
            assert!(r.exhaustive);
            let mut best: Option<Q> = None;
            for gc in 0..n.pow(a.size() as u32) {
                for hc in 0..n.pow(b.size() as u32) {
                    for pc in 0..1usize << (n * n) {
                        let digits = |mut c: usize, len: usize, base: usize| -> Vec<u32> {
                            (0..len).map(|_| { let d = (c % base) as u32; c /= base; d }).collect()
                        };
                        let step = ProductStepFunction::new(
                            Partition::new(n, digits(gc, a.size(), n)).unwrap(),
                            Partition::new(n, digits(hc, b.size(), n)).unwrap(),
                            PhiTable::new(n, 2, digits(pc, n * n, 2)).unwrap(),
                        )
                        .unwrap();
                        let d = dist_inf(&w_vector(&prod, &symbols, &step.assemble()).unwrap(), &u).unwrap();
                        best = Some(best.map_or(d, |b| b.min(d)));
                    }
                }
            }
            assert_eq!(r.best_dist, best.unwrap());
            let w = w_vector(&prod, &symbols, &r.best.assemble()).unwrap();
            assert_eq!(dist_inf(&w, &u).unwrap(), r.best_dist);
        }
    }
}

#[test]
fn local_search_never_beats_the_optimum() {
    let (a, b) = (toy::cycle(4), toy::cycle(4));
    let symbols = all_symbols(&a);
    let u = target_u(a.symbols(), a.inverse_pairing());
    let exact = search_step_functions(&a, &b, &symbols, &u, 2, &SearchOptions::default()).unwrap();
    let local = search_step_functions(&a, &b, &symbols, &u, 2, &SearchOptions { budget: 0, restarts: 8, moves: 5000, seed: 1 }).unwrap();
    assert!(exact.exhaustive && !local.exhaustive);
    assert!(local.best_dist >= exact.best_dist);
}

#[test]
fn defect_controls_distance_to_invariant_maps() {
    // with the exact Cheeger constant h of α_3, every labelling satisfies
    // dist(f, f_Z*) ≤ defect(f) / h for the majority Z*
    let i = inst(3, 3);
    let h = cheeger_exact(&i.am).unwrap().ratio;
    assert!(h > Q::from_integer(0));
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let base = f_z(&i.gn, &i.gm, &(0..12).collect::<Vec<_>>()).unwrap();
    for trial in 0..200 {
        let f = if trial % 2 == 0 {
            random_labels(576, &mut rng)
        } else {
            let mut labels = base.labels().to_vec();
            for _ in 0..rng.random_range(1..40) {
                let p = rng.random_range(0..576);
                labels[p] ^= 1;
            }
            Partition::new(2, labels).unwrap()
        };
        let d = invariance_defect(&i.an, &i.am, &f).unwrap();
        let r = nearest_fz(&i.gn, &i.gm, &f).unwrap();
        assert!(r.dist * h <= d.total, "trial {trial}");
    }
}

#[test]
fn step_function_assembly() {
    let g = Partition::new(2, vec![0, 1, 1]).unwrap();
    let h = Partition::new(2, vec![1, 0]).unwrap();
    let phi = PhiTable::new(2, 2, vec![0, 1, 1, 0]).unwrap();
    let f = ProductStepFunction::new(g.clone(), h, phi).unwrap();
    assert_eq!(f.assemble().labels(), &[1, 0, 0, 1, 0, 1]);
    assert!(ProductStepFunction::new(g, Partition::new(3, vec![0]).unwrap(), PhiTable::new(2, 2, vec![0; 4]).unwrap()).is_err());
}

#[test]
fn small_reports() {
    let opts = ReportOptions::default();
    let r = discontinuity_report(&[5, 3, 3], 1, &opts);
    assert_eq!(r.rows.iter().map(|r| r.p).collect::<Vec<_>>(), vec![3, 5]);
    for row in &r.rows {
        assert_eq!(row.best_step_dist, Q::new(1, 2));
        assert!(row.u_member);
        assert_eq!(row.claim3.status, BoundStatus::Vacuous);
        assert!(row.lambda2.is_some());
        assert_eq!(row.at_least_delta, Some(true));
    }
    assert_eq!(r.rows[0].cheeger.kind, crate::expansion::CheegerKind::Exact);
    assert!(discontinuity_report(&[], 1, &opts).rows.is_empty());
    let bad = discontinuity_report(&[2, 3], 1, &opts);
    assert_eq!(bad.rows.len(), 1);
    assert_eq!(bad.failures.len(), 1);
    assert_eq!(bad.failures[0].p, 2);
    let records = r.csv_records();
    assert_eq!(records[0][0], "3");
    assert_eq!(records[0][4..6], ["1".to_string(), "2".to_string()]);
}
