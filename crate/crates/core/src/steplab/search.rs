//! Minimizing `dist_∞(t, W(φ∘(g, h)))` over `N`-step functions.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::action::FiniteAction;
use crate::error::{Error, Result};
use crate::rational::Q;
use crate::wstat::{phi_convolve_counts, Partition, PhiTable, WCounter, WVector};

use super::ProductStepFunction;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Enumerate every step function when `N^(|X|+|Y|)·k^(N²)` fits.
    pub budget: u64,
    pub restarts: usize,
    /// Candidate moves evaluated per restart.
    pub moves: usize,
    pub seed: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { budget: 1 << 24, restarts: 32, moves: 100_000, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub restart: usize,
    pub moves: usize,
    pub kicks: usize,
    #[serde(with = "crate::rational")]
    pub best_dist: Q,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepSearchResult {
    pub best: ProductStepFunction,
    #[serde(with = "crate::rational")]
    pub best_dist: Q,
    /// The minimum is over every step function, not a search estimate.
    pub exhaustive: bool,
    /// Local search used its whole move budget without reaching distance 0.
    pub budget_exhausted: bool,
    pub trace: Vec<TraceEntry>,
}

/// Mixes a restart index into a seed (SplitMix64 finalizer).
pub(crate) fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Exact score of a step vector against the target: the sup and the sum of
/// squares of `c·den(t) − t·|X||Y|`. The sup is the objective; the sum of
/// squares breaks ties on plateaus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Score(i128, i128);

struct Objective<'a> {
    target: &'a WVector,
    step_den: i128,
    n: usize,
    k: usize,
    buf: Vec<u64>,
}

impl Objective<'_> {
    fn score(&mut self, g: &[u64], h: &[u64], phi: &[u32]) -> Score {
        phi_convolve_counts(self.k, self.n, g, h, phi, &mut self.buf);
        let td = self.target.denom() as i128;
        let mut sup = 0;
        let mut sq = 0;
        for (&c, &t) in self.buf.iter().zip(self.target.counts()) {
            let d = (c as i128 * td - t as i128 * self.step_den).abs();
            sup = sup.max(d);
            sq += d * d;
        }
        Score(sup, sq)
    }

    fn dist(&self, s: Score) -> Q {
        Q::new(s.0, self.target.denom() as i128 * self.step_den)
    }
}

fn all_labellings(size: usize, n: usize) -> impl Iterator<Item = Vec<u32>> {
    let total = (n as u64).pow(size as u32);
    (0..total).map(move |mut c| {
        (0..size)
            .map(|_| {
                let l = (c % n as u64) as u32;
                c /= n as u64;
                l
            })
            .collect()
    })
}

/// Distinct factor W-vectors with the first labelling realizing each.
fn distinct_factor_vectors(a: &FiniteAction, symbols: &[usize], n: usize) -> Result<Vec<(Vec<u64>, Vec<u32>)>> {
    let mut seen = HashMap::new();
    let mut out = Vec::new();
    for labels in all_labellings(a.size(), n) {
        let w = crate::wstat::w_vector(a, symbols, &Partition::new(n, labels.clone())?)?;
        if seen.insert(w.counts().to_vec(), ()).is_none() {
            out.push((w.counts().to_vec(), labels));
        }
    }
    Ok(out)
}

fn exhaustive_search(
    a: &FiniteAction,
    b: &FiniteAction,
    symbols: &[usize],
    target: &WVector,
    n: usize,
    k: usize,
) -> Result<StepSearchResult> {
    let left = distinct_factor_vectors(a, symbols, n)?;
    let right = distinct_factor_vectors(b, symbols, n)?;
    let phis = PhiTable::count(n, k).expect("fits the budget");
    let mut obj = Objective { target, step_den: (a.size() * b.size()) as i128, n, k, buf: vec![0; symbols.len() * k * k] };
    let mut best: Option<(Score, usize, usize, u64)> = None;
    for (gi, (gw, _)) in left.iter().enumerate() {
        for (hi, (hw, _)) in right.iter().enumerate() {
            for pi in 0..phis {
                let phi = PhiTable::from_index(n, k, pi)?;
                let s = obj.score(gw, hw, phi.table());
                if best.is_none_or(|b| s.0 < b.0 .0) {
                    best = Some((s, gi, hi, pi));
                }
            }
        }
    }
    let (s, gi, hi, pi) = best.expect("at least one step function");
    let best = ProductStepFunction::new(
        Partition::new(n, left[gi].1.clone())?,
        Partition::new(n, right[hi].1.clone())?,
        PhiTable::from_index(n, k, pi)?,
    )?;
    Ok(StepSearchResult { best, best_dist: obj.dist(s), exhaustive: true, budget_exhausted: false, trace: Vec::new() })
}

struct Restart {
    score: Score,
    g: Vec<u32>,
    h: Vec<u32>,
    phi: Vec<u32>,
    trace: TraceEntry,
}

enum Move {
    Left(usize, u32),
    Right(usize, u32),
    Phi(usize, u32),
}

const BATCH: usize = 16;
const STALL_LIMIT: usize = 64;

/// One search instance: factors, symbols, target and step complexity.
struct Problem<'a> {
    a: &'a FiniteAction,
    b: &'a FiniteAction,
    symbols: &'a [usize],
    target: &'a WVector,
    n: usize,
    k: usize,
}

fn local_search(p: &Problem<'_>, moves: usize, restart: usize, seed: u64) -> Result<Restart> {
    let Problem { a, b, symbols, target, n, k } = *p;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, restart as u64));
    let random = |size: usize, rng: &mut ChaCha8Rng| -> Vec<u32> { (0..size).map(|_| rng.random_range(0..n as u32)).collect() };
    let g0 = random(a.size(), &mut rng);
    let h0 = random(b.size(), &mut rng);
    let mut gc = WCounter::new(a, symbols, &Partition::new(n, g0)?)?;
    let mut hc = WCounter::new(b, symbols, &Partition::new(n, h0)?)?;
    let mut phi: Vec<u32> = (0..n * n).map(|_| rng.random_range(0..k as u32)).collect();
    let mut obj = Objective { target, step_den: (a.size() * b.size()) as i128, n, k, buf: vec![0; symbols.len() * k * k] };

    let mut current = obj.score(gc.counts(), hc.counts(), &phi);
    let mut best = (current, gc.labels().to_vec(), hc.labels().to_vec(), phi.clone());
    let (nx, ny, np) = if n > 1 { (a.size(), b.size(), n * n) } else { (0, 0, n * n) };
    let mut used = 0;
    let mut stalled = 0;
    let mut kicks = 0;

    let apply = |m: &Move, gc: &mut WCounter, hc: &mut WCounter, phi: &mut Vec<u32>| -> Move {
        match *m {
            Move::Left(x, l) => {
                let old = gc.label(x);
                gc.set(x, l);
                Move::Left(x, old)
            }
            Move::Right(y, l) => {
                let old = hc.label(y);
                hc.set(y, l);
                Move::Right(y, old)
            }
            Move::Phi(e, v) => {
                let old = phi[e];
                phi[e] = v;
                Move::Phi(e, old)
            }
        }
    };

    while used < moves && current.0 > 0 {
        let mut chosen: Option<(Score, Move)> = None;
        for _ in 0..BATCH {
            let r = rng.random_range(0..nx + ny + np);
            let m = if r < nx {
                let old = gc.label(r);
                Move::Left(r, (old + rng.random_range(1..n as u32)) % n as u32)
            } else if r < nx + ny {
                let y = r - nx;
                let old = hc.label(y);
                Move::Right(y, (old + rng.random_range(1..n as u32)) % n as u32)
            } else {
                let e = r - nx - ny;
                Move::Phi(e, (phi[e] + rng.random_range(1..k.max(2) as u32)) % k as u32)
            };
            let undo = apply(&m, &mut gc, &mut hc, &mut phi);
            let s = obj.score(gc.counts(), hc.counts(), &phi);
            apply(&undo, &mut gc, &mut hc, &mut phi);
            used += 1;
            if chosen.as_ref().is_none_or(|c| s < c.0) {
                chosen = Some((s, m));
            }
        }
        let (s, m) = chosen.expect("batch is nonempty");
        if s <= current {
            apply(&m, &mut gc, &mut hc, &mut phi);
            stalled = if s < current { 0 } else { stalled + 1 };
            current = s;
            if current < best.0 {
                best = (current, gc.labels().to_vec(), hc.labels().to_vec(), phi.clone());
                stalled = 0;
            }
        } else {
            stalled += 1;
        }
        if stalled >= STALL_LIMIT && n > 1 {
            // plateau escape: relabel a few random points on each side
            for _ in 0..(a.size() / 20).max(1) {
                let x = rng.random_range(0..a.size());
                gc.set(x, rng.random_range(0..n as u32));
            }
            for _ in 0..(b.size() / 20).max(1) {
                let y = rng.random_range(0..b.size());
                hc.set(y, rng.random_range(0..n as u32));
            }
            current = obj.score(gc.counts(), hc.counts(), &phi);
            stalled = 0;
            kicks += 1;
        }
        if n == 1 && stalled >= STALL_LIMIT {
            break;
        }
    }
    Ok(Restart {
        score: best.0,
        g: best.1,
        h: best.2,
        phi: best.3,
        trace: TraceEntry { restart, moves: used, kicks, best_dist: obj.dist(best.0) },
    })
}

/// Minimizes `dist_∞(target, W(α × β, S, k, φ∘(g, h)))` over `N`-step
/// functions: exhaustively when the search space fits the budget, otherwise
/// by multi-restart local search (single-point relabellings of `g` and `h`,
/// φ-entry changes, best-of-batch descent accepting sideways moves, random
/// kicks on long plateaus). W-vectors of the product are never materialized:
/// each candidate is scored through the φ-convolution of the factor vectors.
pub fn search_step_functions(
    a: &FiniteAction,
    b: &FiniteAction,
    symbols: &[usize],
    target: &WVector,
    n: usize,
    opts: &SearchOptions,
) -> Result<StepSearchResult> {
    if n == 0 {
        return Err(Error::InvalidArgument("step complexity N must be at least 1".into()));
    }
    if a.symbols() != b.symbols() {
        return Err(Error::SymbolMismatch);
    }
    let k = target.k();
    let names: Vec<String> = symbols.iter().map(|&s| a.symbols()[s].clone()).collect();
    if names != target.symbols() {
        return Err(Error::ShapeMismatch("target symbols differ from the chosen symbols".into()));
    }
    let space = (n as u128)
        .checked_pow((a.size() + b.size()) as u32)
        .and_then(|x| x.checked_mul(PhiTable::count(n, k)? as u128));
    if space.is_some_and(|s| s <= opts.budget as u128) {
        return exhaustive_search(a, b, symbols, target, n, k);
    }
    if opts.restarts == 0 {
        return Err(Error::InvalidArgument("local search needs at least one restart".into()));
    }
    let problem = Problem { a, b, symbols, target, n, k };
    let runs = (0..opts.restarts)
        .into_par_iter()
        .map(|r| local_search(&problem, opts.moves, r, opts.seed))
        .collect::<Result<Vec<_>>>()?;
    let winner = runs
        .iter()
        .enumerate()
        .min_by(|(i, x), (j, y)| x.score.0.cmp(&y.score.0).then(i.cmp(j)))
        .map(|(i, _)| i)
        .expect("at least one restart");
    let w = &runs[winner];
    let step_den = (a.size() * b.size()) as i128;
    let best_dist = Q::new(w.score.0, target.denom() as i128 * step_den);
    let best = ProductStepFunction::new(
        Partition::new(n, w.g.clone())?,
        Partition::new(n, w.h.clone())?,
        PhiTable::new(n, k, w.phi.clone())?,
    )?;
    Ok(StepSearchResult {
        best,
        best_dist,
        exhaustive: false,
        budget_exhausted: best_dist > Q::from_integer(0),
        trace: runs.into_iter().map(|r| r.trace).collect(),
    })
}
