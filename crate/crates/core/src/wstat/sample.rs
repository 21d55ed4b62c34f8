use std::collections::HashSet;

use rand::distr::weighted::WeightedIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::action::FiniteAction;
use crate::error::{Error, Result};
use crate::rational::Q;

use super::{dist_inf, subset_inverse, subset_names, Partition, WCounter, WVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleStrategy {
    Exhaustive,
    Random,
    LocalSearch,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleOptions {
    /// `Exhaustive` fails when enumeration is over budget; the other
    /// strategies switch to enumeration whenever it fits.
    pub strategy: SampleStrategy,
    /// Maximum number of labellings to enumerate.
    pub budget: u64,
    /// Target size of a non-exhaustive sample.
    pub sample_size: usize,
    pub seed: u64,
}

impl Default for SampleOptions {
    fn default() -> Self {
        Self { strategy: SampleStrategy::LocalSearch, budget: 1 << 24, sample_size: 256, seed: 0 }
    }
}

/// A finite sample of the W-set `W(α, S, k)`: distinct vectors only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WSetSample {
    pub vectors: Vec<WVector>,
    pub strategy: SampleStrategy,
    /// Set only when every labelling in `k^X` was visited.
    pub exhaustive: bool,
    pub partitions_examined: u64,
}

impl WSetSample {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn contains(&self, v: &WVector) -> bool {
        self.vectors.iter().any(|w| w.same_value(v))
    }
}

fn labellings(k: usize, free: usize) -> Option<u64> {
    (k as u64).checked_pow(u32::try_from(free).ok()?)
}

/// Visits every labelling of `points` (all other labels fixed) in odometer
/// order, calling `visit` on the counts after each step.
fn odometer(counter: &mut WCounter, points: &[usize], mut visit: impl FnMut(&WCounter)) {
    let k = counter.k() as u32;
    visit(counter);
    loop {
        let mut pos = 0;
        loop {
            if pos == points.len() {
                return;
            }
            let x = points[pos];
            let l = counter.label(x);
            if l + 1 < k {
                counter.set(x, l + 1);
                break;
            }
            counter.set(x, 0);
            pos += 1;
        }
        visit(counter);
    }
}

/// Distinct W-vectors of all labellings `X → k`, in order of first
/// occurrence. With `pin_first`, point 0 keeps label 0: this loses nothing
/// when the vectors feed φ-convolutions, since relabelling classes can be
/// absorbed into φ. Returns the vectors and the number of labellings visited.
pub fn enumerate_wset(
    a: &FiniteAction,
    symbols: &[usize],
    k: usize,
    pin_first: bool,
    budget: u64,
) -> Result<(Vec<WVector>, u64)> {
    let start = usize::from(pin_first && a.size() > 0);
    let free = a.size() - start;
    let total = labellings(k, free).filter(|&t| t <= budget).ok_or_else(|| Error::BudgetExceeded {
        what: format!("enumeration of {k}^{free} labellings"),
        budget,
    })?;
    let mut top = 0;
    while top < free && labellings(k, top).is_some_and(|c| c < 256) {
        top += 1;
    }
    let chunks = labellings(k, top).expect("small");
    let low: Vec<usize> = (start..a.size() - top).collect();
    let high: Vec<usize> = (a.size() - top..a.size()).collect();

    let per_chunk = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut labels = vec![0u32; a.size()];
            let mut rest = c;
            for &x in &high {
                labels[x] = (rest % k as u64) as u32;
                rest /= k as u64;
            }
            let mut counter = WCounter::new(a, symbols, &Partition::new(k, labels)?)?;
            let mut seen: HashSet<Box<[u64]>> = HashSet::new();
            let mut order = Vec::new();
            odometer(&mut counter, &low, |c| {
                if !seen.contains(c.counts()) {
                    let key: Box<[u64]> = c.counts().into();
                    seen.insert(key.clone());
                    order.push(key);
                }
            });
            Ok(order)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut seen: HashSet<Box<[u64]>> = HashSet::new();
    let names = subset_names(a, symbols);
    let inverse = subset_inverse(a, symbols)?;
    let mut out = Vec::new();
    for counts in per_chunk.into_iter().flatten() {
        if seen.insert(counts.clone()) {
            out.push(WVector::new(names.clone(), inverse.clone(), k, counts.into_vec(), a.size() as u64)?);
        }
    }
    Ok((out, total))
}

/// Random labelling with randomly drawn class proportions, so that samples
/// spread over unbalanced as well as balanced labellings.
pub(crate) fn random_labelling(size: usize, k: usize, rng: &mut ChaCha8Rng) -> Partition {
    let weights: Vec<f64> = (0..k).map(|_| rng.random::<f64>().powi(2) + 1e-3).collect();
    let dist = WeightedIndex::new(&weights).expect("positive weights");
    Partition { k, labels: (0..size).map(|_| dist.sample(rng) as u32).collect() }
}

fn min_dist(v: &WVector, others: impl Iterator<Item = WVector>) -> Option<Q> {
    others.map(|w| dist_inf(v, &w).expect("same shape")).min()
}

/// A finite stand-in for the closed W-set `W(α, S, k)`: every vector when
/// `k^|X|` fits the budget, otherwise random labellings, optionally spread
/// out by farthest-point selection and single-point moves.
pub fn sample_wset(a: &FiniteAction, symbols: &[usize], k: usize, opts: &SampleOptions) -> Result<WSetSample> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let fits = labellings(k, a.size()).is_some_and(|t| t <= opts.budget);
    if fits || opts.strategy == SampleStrategy::Exhaustive {
        let (vectors, examined) = enumerate_wset(a, symbols, k, false, opts.budget)?;
        return Ok(WSetSample { vectors, strategy: SampleStrategy::Exhaustive, exhaustive: true, partitions_examined: examined });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let pool_size = match opts.strategy {
        SampleStrategy::LocalSearch => 4 * opts.sample_size,
        _ => opts.sample_size,
    }
    .max(k);
    let mut pool: Vec<Partition> = (0..k as u32).map(|c| Partition { k, labels: vec![c; a.size()] }).collect();
    while pool.len() < pool_size {
        pool.push(random_labelling(a.size(), k, &mut rng));
    }
    let mut examined = pool.len() as u64;
    let mut vectors: Vec<(Partition, WVector)> = Vec::new();
    let mut seen = HashSet::new();
    for f in pool {
        let w = super::w_vector(a, symbols, &f)?;
        if seen.insert(w.counts.clone()) {
            vectors.push((f, w));
        }
    }

    if opts.strategy == SampleStrategy::Random {
        vectors.truncate(opts.sample_size.max(k));
        return Ok(WSetSample {
            vectors: vectors.into_iter().map(|p| p.1).collect(),
            strategy: SampleStrategy::Random,
            exhaustive: false,
            partitions_examined: examined,
        });
    }

    // farthest-point selection, seeded with the constants
    let target = opts.sample_size.max(k).min(vectors.len());
    let mut chosen: Vec<(Partition, WVector)> = vectors.drain(..k.min(vectors.len())).collect();
    let mut gap: Vec<Q> = vectors
        .iter()
        .map(|(_, v)| min_dist(v, chosen.iter().map(|c| c.1.clone())).expect("nonempty"))
        .collect();
    while chosen.len() < target && !vectors.is_empty() {
        let best = (0..vectors.len()).max_by(|&i, &j| gap[i].cmp(&gap[j]).then(j.cmp(&i))).expect("nonempty");
        let picked = vectors.swap_remove(best);
        gap.swap_remove(best);
        for (g, (_, v)) in gap.iter_mut().zip(&vectors) {
            *g = (*g).min(dist_inf(v, &picked.1)?);
        }
        chosen.push(picked);
    }

    // push each non-constant member away from the rest by single-point moves
    const MOVES: usize = 32;
    for idx in k.min(chosen.len())..chosen.len() {
        let others = |chosen: &[(Partition, WVector)]| -> Vec<WVector> {
            chosen.iter().enumerate().filter(|(j, _)| *j != idx).map(|(_, c)| c.1.clone()).collect()
        };
        let rest = others(&chosen);
        let mut counter = WCounter::new(a, symbols, &chosen[idx].0)?;
        let mut current = min_dist(&chosen[idx].1, rest.iter().cloned());
        for _ in 0..MOVES {
            let x = rng.random_range(0..a.size());
            let old = counter.label(x);
            let new = rng.random_range(0..k as u32);
            if new == old {
                continue;
            }
            counter.set(x, new);
            examined += 1;
            let w = counter.to_wvector(a, symbols)?;
            let d = min_dist(&w, rest.iter().cloned());
            if d > current {
                current = d;
            } else {
                counter.set(x, old);
            }
        }
        let w = counter.to_wvector(a, symbols)?;
        if !rest.iter().any(|r| r.same_value(&w)) {
            chosen[idx] = (counter.partition(), w);
        }
    }
    Ok(WSetSample {
        vectors: chosen.into_iter().map(|c| c.1).collect(),
        strategy: SampleStrategy::LocalSearch,
        exhaustive: false,
        partitions_examined: examined,
    })
}

#[cfg(test)]
mod tests {
    use super::super::tests::{alpha, random_partition};
    use super::super::{all_symbols, w_vector};
    use super::*;
    use crate::action::toy;

    /// Brute force: W of every labelling, deduplicated with a plain scan.
    fn brute(a: &FiniteAction, k: usize) -> Vec<WVector> {
        let s = all_symbols(a);
        let total = k.pow(a.size() as u32);
        let mut out: Vec<WVector> = Vec::new();
        for mut code in 0..total {
            let labels = (0..a.size())
                .map(|_| {
                    let l = (code % k) as u32;
                    code /= k;
                    l
                })
                .collect();
            let w = w_vector(a, &s, &Partition::new(k, labels).unwrap()).unwrap();
            if !out.contains(&w) {
                out.push(w);
            }
        }
        out
    }

    #[test]
    fn exhaustive_toy_examples() {
        let a = toy::cycle(3);
        let s = sample_wset(&a, &all_symbols(&a), 2, &SampleOptions::default()).unwrap();
        assert!(s.exhaustive);
        assert_eq!(s.partitions_examined, 8);
        assert!(s.len() <= 8);
        for a in [toy::cycle(3), toy::two_cycles(2, 3), toy::complete(4), toy::swap()] {
            for k in 1..4 {
                let got = sample_wset(&a, &all_symbols(&a), k, &SampleOptions::default()).unwrap();
                let want = brute(&a, k);
                assert_eq!(got.len(), want.len());
                assert!(want.iter().all(|w| got.contains(w)));
            }
        }
    }

    #[test]
    fn pinning_keeps_vectors_up_to_relabelling() {
        let a = toy::two_cycles(2, 3);
        let s = all_symbols(&a);
        let (pinned, visited) = enumerate_wset(&a, &s, 2, true, 1 << 20).unwrap();
        assert_eq!(visited, 16);
        let full = brute(&a, 2);
        let swap = |w: &WVector| {
            let counts = (0..w.num_symbols())
                .flat_map(|g| (0..2).flat_map(move |i| (0..2).map(move |j| w.count(g, 1 - i, 1 - j))))
                .collect();
            WVector::new(w.symbols().to_vec(), w.inverse().to_vec(), 2, counts, w.denom()).unwrap()
        };
        for w in &full {
            assert!(pinned.contains(w) || pinned.contains(&swap(w)));
        }
    }

    #[test]
    fn budget_controls_the_flag() {
        let a = alpha(3);
        let opts = SampleOptions { budget: 1000, sample_size: 40, ..Default::default() };
        let s = sample_wset(&a, &all_symbols(&a), 2, &opts).unwrap();
        assert!(!s.exhaustive);
        assert_eq!(s.strategy, SampleStrategy::LocalSearch);
        assert!(s.len() <= 40);
        assert_eq!(s, sample_wset(&a, &all_symbols(&a), 2, &opts).unwrap());
        let random = sample_wset(&a, &all_symbols(&a), 2, &SampleOptions { strategy: SampleStrategy::Random, ..opts.clone() }).unwrap();
        assert!(!random.exhaustive);
        let strict = SampleOptions { strategy: SampleStrategy::Exhaustive, ..opts };
        assert!(matches!(sample_wset(&a, &all_symbols(&a), 2, &strict), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn exhaustive_alpha3_contains_every_partition() {
        let a = alpha(3);
        let s = all_symbols(&a);
        let sample = sample_wset(&a, &s, 2, &SampleOptions::default()).unwrap();
        assert!(sample.exhaustive);
        assert_eq!(sample.partitions_examined, 1 << 24);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..200 {
            let w = w_vector(&a, &s, &random_partition(24, 2, &mut rng)).unwrap();
            assert!(sample.contains(&w));
        }
        for v in &sample.vectors {
            v.check_invariants().unwrap();
        }
    }
}
