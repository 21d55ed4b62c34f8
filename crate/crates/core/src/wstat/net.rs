use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::action::{product_action, FiniteAction};
use crate::error::{Error, Result};
use crate::rational::Q;

use super::sample::random_labelling;
use super::{enumerate_wset, phi_convolve_counts, sample_wset, PhiTable, SampleOptions, SampleStrategy, WVector};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetIndexOptions {
    /// Largest step complexity tried.
    pub max_n: usize,
    /// Cap on enumerated labellings, φ tables and step vectors per level.
    pub budget: u64,
    /// Size of every non-exhaustive sample.
    pub sample_size: usize,
    pub seed: u64,
    /// Vectors that must be covered besides the product's W-set sample,
    /// checked first (for instance the target `u`).
    pub extra_targets: Vec<WVector>,
}

impl Default for NetIndexOptions {
    fn default() -> Self {
        Self { max_n: 3, budget: 1 << 18, sample_size: 64, seed: 0, extra_targets: Vec::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetLevel {
    pub n: usize,
    pub left_vectors: usize,
    pub right_vectors: usize,
    pub phi_tables: usize,
    /// True when every `N`-step function was represented.
    pub exhaustive: bool,
    pub uncovered: usize,
    /// `max` over targets of the distance to the nearest step vector.
    #[serde(with = "crate::rational")]
    pub worst_distance: Q,
    /// Distance from each extra target to the nearest step vector.
    #[serde(with = "crate::rational::vec")]
    pub extra_distances: Vec<Q>,
    /// First uncovered target, extra targets first.
    pub witness: Option<WVector>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetIndexReport {
    #[serde(with = "crate::rational")]
    pub epsilon: Q,
    /// Smallest complexity whose step vectors cover every target, if any.
    pub n: Option<usize>,
    /// The target set was the full W-set and every level up to `n` was
    /// enumerated exhaustively, so `n` is the exact index.
    pub certified: bool,
    pub target_exhaustive: bool,
    pub targets: usize,
    pub levels: Vec<NetLevel>,
}

/// Distinct W-vectors of `N`-class labellings of one factor, and whether
/// they were enumerated exhaustively.
fn factor_vectors(a: &FiniteAction, symbols: &[usize], n: usize, opts: &NetIndexOptions, salt: u64) -> Result<(Vec<WVector>, bool)> {
    match enumerate_wset(a, symbols, n, true, opts.budget) {
        Ok((v, _)) => Ok((v, true)),
        Err(Error::BudgetExceeded { .. }) => {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ salt);
            let mut out: Vec<WVector> = Vec::new();
            let constant = super::Partition::constant(a.size(), n, 0)?;
            out.push(super::w_vector(a, symbols, &constant)?);
            for _ in 0..opts.sample_size {
                let w = super::w_vector(a, symbols, &random_labelling(a.size(), n, &mut rng))?;
                if !out.contains(&w) {
                    out.push(w);
                }
            }
            Ok((out, false))
        }
        Err(e) => Err(e),
    }
}

/// Estimates `N_{S,k}(α, β, ε)`: the least `N` such that the W-vectors of
/// `N`-step functions on `α × β` form an ε-net (strict `dist < ε`) for the
/// W-set of the product. Step vectors are built by φ-convolution of factor
/// vectors; labellings of each factor are enumerated with point 0 pinned to
/// class 0, which loses nothing because φ absorbs class relabellings.
pub fn net_index_estimate(
    a: &FiniteAction,
    b: &FiniteAction,
    symbols: &[usize],
    k: usize,
    epsilon: Q,
    opts: &NetIndexOptions,
) -> Result<NetIndexReport> {
    if epsilon <= Q::from_integer(0) {
        return Err(Error::InvalidArgument("ε must be positive".into()));
    }
    if opts.max_n == 0 {
        return Err(Error::InvalidArgument("max N must be at least 1".into()));
    }
    let prod = product_action(a, b)?;
    let sample_opts =
        SampleOptions { strategy: SampleStrategy::LocalSearch, budget: opts.budget, sample_size: opts.sample_size, seed: opts.seed };
    let sample = sample_wset(&prod, symbols, k, &sample_opts)?;
    let mut targets = opts.extra_targets.clone();
    if targets.iter().any(|t| !t.same_shape(&sample.vectors[0])) {
        return Err(Error::ShapeMismatch("extra targets do not match (S, k)".into()));
    }
    targets.extend(sample.vectors.iter().cloned());

    let mut levels = Vec::new();
    let mut found = None;
    let mut all_exhaustive = true;
    for n in 1..=opts.max_n {
        let (mut left, left_ex) = factor_vectors(a, symbols, n, opts, 0x5eed_0001 ^ n as u64)?;
        let (mut right, right_ex) = factor_vectors(b, symbols, n, opts, 0x5eed_0002 ^ n as u64)?;
        let mut exhaustive = left_ex && right_ex;
        let phis: Vec<PhiTable> = match PhiTable::count(n, k).filter(|&c| c <= opts.budget) {
            Some(c) => (0..c).map(|i| PhiTable::from_index(n, k, i)).collect::<Result<_>>()?,
            None => {
                exhaustive = false;
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5eed_0003 ^ n as u64);
                (0..opts.sample_size)
                    .map(|_| PhiTable::new(n, k, (0..n * n).map(|_| rng.random_range(0..k as u32)).collect()))
                    .collect::<Result<_>>()?
            }
        };
        let total = left.len() as u128 * right.len() as u128 * phis.len() as u128;
        if total > opts.budget as u128 {
            exhaustive = false;
            let per_side = ((opts.budget as f64 / phis.len() as f64).sqrt() as usize).max(1);
            left.truncate(per_side);
            right.truncate(per_side);
        }
        all_exhaustive &= exhaustive;

        let width = symbols.len() * k * k;
        let mut steps: Vec<u64> = Vec::with_capacity(left.len() * right.len() * phis.len() * width);
        let mut buf = vec![0u64; width];
        for u in &left {
            for v in &right {
                for phi in &phis {
                    phi_convolve_counts(k, n, u.counts(), v.counts(), phi.table(), &mut buf);
                    steps.extend_from_slice(&buf);
                }
            }
        }
        let step_den = (a.size() * b.size()) as i128;

        // smallest numerator over the common denominator den(t)·|X||Y|
        let nearest: Vec<i128> = targets
            .par_iter()
            .map(|t| {
                let td = t.denom() as i128;
                let mut best = i128::MAX;
                for step in steps.chunks_exact(width) {
                    let m = step
                        .iter()
                        .zip(t.counts())
                        .map(|(&c, &tc)| (c as i128 * td - tc as i128 * step_den).abs())
                        .max()
                        .unwrap_or(0);
                    best = best.min(m);
                    if best == 0 {
                        break;
                    }
                }
                best
            })
            .collect();
        let dist = |i: usize| Q::new(nearest[i], targets[i].denom() as i128 * step_den);
        let uncovered: Vec<usize> = (0..targets.len()).filter(|&i| dist(i) >= epsilon).collect();
        levels.push(NetLevel {
            n,
            left_vectors: left.len(),
            right_vectors: right.len(),
            phi_tables: phis.len(),
            exhaustive,
            uncovered: uncovered.len(),
            worst_distance: (0..targets.len()).map(dist).max().unwrap_or_else(|| Q::from_integer(0)),
            extra_distances: (0..opts.extra_targets.len()).map(dist).collect(),
            witness: uncovered.first().map(|&i| targets[i].clone()),
        });
        if uncovered.is_empty() {
            found = Some(n);
            break;
        }
    }
    Ok(NetIndexReport {
        epsilon,
        n: found,
        certified: found.is_some() && sample.exhaustive && all_exhaustive,
        target_exhaustive: sample.exhaustive,
        targets: targets.len(),
        levels,
    })
}

#[cfg(test)]
mod tests {
    use super::super::tests::alpha;
    use super::super::{all_symbols, w_vector, Partition};
    use super::*;
    use crate::action::toy;

    /// Full enumeration oracle on the materialized product: every product
    /// labelling against every step function `φ∘(g, h)`.
    fn oracle_index(a: &FiniteAction, b: &FiniteAction, k: usize, epsilon: Q, max_n: usize) -> Option<usize> {
        let prod = product_action(a, b).unwrap();
        let s = all_symbols(a);
        let labellings = |size: usize, k: usize| -> Vec<Partition> {
            (0..k.pow(size as u32))
                .map(|mut c| {
                    Partition::new(k, (0..size).map(|_| { let l = (c % k) as u32; c /= k; l }).collect()).unwrap()
                })
                .collect()
        };
        let targets: Vec<WVector> = labellings(prod.size(), k).iter().map(|f| w_vector(&prod, &s, f).unwrap()).collect();
        for n in 1..=max_n {
            let mut steps = Vec::new();
            for g in labellings(a.size(), n) {
                for h in labellings(b.size(), n) {
                    for phi in labellings(n * n, k) {
                        let f = (0..a.size())
                            .flat_map(|x| (0..b.size()).map(move |y| (x, y)))
                            .map(|(x, y)| phi.label(g.label(x) as usize * n + h.label(y) as usize))
                            .collect();
                        steps.push(w_vector(&prod, &s, &Partition::new(k, f).unwrap()).unwrap());
                    }
                }
            }
            let covered = targets
                .iter()
                .all(|t| steps.iter().any(|st| super::super::dist_inf(t, st).unwrap() < epsilon));
            if covered {
                return Some(n);
            }
        }
        None
    }

    #[test]
    fn large_epsilon_gives_one() {
        for (a, b) in [(toy::swap(), toy::swap()), (toy::cycle(3), toy::cycle(2))] {
            let r = net_index_estimate(&a, &b, &all_symbols(&a), 2, Q::new(11, 10), &NetIndexOptions::default()).unwrap();
            assert_eq!(r.n, Some(1));
            assert!(r.certified);
        }
    }

    #[test]
    fn toy_pairs_match_enumeration_oracle() {
        let eps = Q::new(1, 100);
        let cases = [(toy::swap(), toy::swap()), (toy::cycle(2), toy::cycle(3)), (toy::cycle(3), toy::cycle(3))];
        for (a, b) in &cases {
            let r = net_index_estimate(a, b, &all_symbols(a), 2, eps, &NetIndexOptions::default()).unwrap();
            assert!(r.certified, "{r:?}");
            assert_eq!(r.n, oracle_index(a, b, 2, eps, 3));
        }
        let r = net_index_estimate(&toy::swap(), &toy::swap(), &[0], 2, eps, &NetIndexOptions::default()).unwrap();
        assert_eq!(r.n, Some(2));
        assert!(r.levels[0].witness.is_some());
    }

    #[test]
    fn alpha3_reports_u_as_witness() {
        let a = alpha(3);
        let s = all_symbols(&a);
        let u = crate::steplab::target_u(a.symbols(), a.inverse_pairing());
        let delta = Q::new(1, 128);
        let opts = NetIndexOptions { max_n: 1, budget: 1 << 12, sample_size: 8, seed: 3, extra_targets: vec![u.clone()] };
        let r = net_index_estimate(&a, &a, &s, 2, delta, &opts).unwrap();
        assert_eq!(r.n, None);
        assert!(!r.certified);
        assert_eq!(r.levels[0].witness.as_ref(), Some(&u));
        assert_eq!(r.levels[0].extra_distances, vec![Q::new(1, 2)]);
        assert!(matches!(
            net_index_estimate(&a, &a, &s, 2, Q::from_integer(0), &opts),
            Err(Error::InvalidArgument(_))
        ));
    }
}
