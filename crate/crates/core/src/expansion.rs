//! Vertex boundary, Cheeger constant and spectral diagnostics for Schreier
//! graphs of finite actions.
//!
//! The boundary is the vertex boundary `∂(A, S) = {a ∈ A : Sa ⊄ A}` and the
//! Cheeger constant is `min |∂A|/|A|` over nonempty `A` with `|A| ≤ |X|/2`.
//! Exact values come only from exhaustive enumeration; everything else is a
//! labelled bound or a floating-point diagnostic.

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::action::{orbits, translation_action, FiniteAction};
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GeneratorSet};
use crate::rational::Q;

/// Largest ground set for which [`cheeger_exact`] enumerates all subsets.
pub const EXHAUSTIVE_CHEEGER_LIMIT: usize = 26;

/// Members `x ∈ A` with some `γ·x ∉ A`, in increasing order.
pub fn boundary(a: &FiniteAction, set: &[usize]) -> Result<Vec<usize>> {
    let mut inside = vec![false; a.size()];
    for &x in set {
        if x >= a.size() {
            return Err(Error::InvalidArgument(format!("point {x} outside ground set of size {}", a.size())));
        }
        inside[x] = true;
    }
    Ok(boundary_of_mask(a, &inside))
}

pub(crate) fn boundary_of_mask(a: &FiniteAction, inside: &[bool]) -> Vec<usize> {
    (0..a.size())
        .filter(|&x| inside[x] && (0..a.num_symbols()).any(|s| !inside[a.act(s, x)]))
        .collect()
}

/// A candidate set and its exact ratio `|∂A|/|A|`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheegerWitness {
    #[serde(with = "crate::rational")]
    pub ratio: Q,
    pub set: Vec<usize>,
}

fn check_nontrivial(a: &FiniteAction) -> Result<()> {
    if a.size() < 2 {
        return Err(Error::InvalidArgument("Cheeger constant needs at least two points".into()));
    }
    Ok(())
}

/// Exact Cheeger constant by enumerating every subset of size at most
/// `|X|/2`. The witness is the lexicographically least minimizing bitmask.
pub fn cheeger_exact(a: &FiniteAction) -> Result<CheegerWitness> {
    check_nontrivial(a)?;
    let size = a.size();
    if size > EXHAUSTIVE_CHEEGER_LIMIT {
        return Err(Error::ThresholdExceeded { size, threshold: EXHAUSTIVE_CHEEGER_LIMIT });
    }
    let neighbours: Vec<u32> = (0..size)
        .map(|x| (0..a.num_symbols()).fold(0u32, |m, s| m | 1 << a.act(s, x)))
        .collect();
    let half = (size / 2) as u32;

    // (boundary, |A|, mask); smaller ratio wins, ties go to the smaller mask.
    type Best = (u64, u64, u32);
    let better = |x: Best, y: Best| -> Best {
        let lhs = x.0 * y.1;
        let rhs = y.0 * x.1;
        if lhs < rhs || (lhs == rhs && x.2 < y.2) {
            x
        } else {
            y
        }
    };
    let chunk_bits = size.saturating_sub(16) as u32;
    let chunks = 1u64 << (size as u32 - chunk_bits);
    let best = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut best: Best = (1, 0, u32::MAX);
            let lo = c << chunk_bits;
            let hi = (c + 1) << chunk_bits;
            for mask in lo.max(1)..hi {
                let mask = mask as u32;
                let k = mask.count_ones();
                if k > half {
                    continue;
                }
                let mut rest = mask;
                let mut b = 0u64;
                while rest != 0 {
                    let x = rest.trailing_zeros();
                    rest &= rest - 1;
                    if neighbours[x as usize] & !mask != 0 {
                        b += 1;
                    }
                }
                best = better(best, (b, k as u64, mask));
            }
            best
        })
        .reduce(|| (1, 0, u32::MAX), better);
    let (b, k, mask) = best;
    Ok(CheegerWitness {
        ratio: Q::new(b as i128, k as i128),
        set: (0..size).filter(|&x| mask >> x & 1 == 1).collect(),
    })
}

/// Incrementally maintained candidate set: `out[x]` counts symbols moving a
/// member `x` outside the set.
struct CutState<'a> {
    a: &'a FiniteAction,
    inv: Vec<usize>,
    inside: Vec<bool>,
    out: Vec<u32>,
    members: usize,
    boundary: usize,
}

impl<'a> CutState<'a> {
    fn new(a: &'a FiniteAction) -> Self {
        Self {
            a,
            inv: (0..a.num_symbols()).map(|s| a.inverse_of(s)).collect(),
            inside: vec![false; a.size()],
            out: vec![0; a.size()],
            members: 0,
            boundary: 0,
        }
    }

    fn clear(&mut self) {
        self.inside.iter_mut().for_each(|b| *b = false);
        self.out.iter_mut().for_each(|o| *o = 0);
        self.members = 0;
        self.boundary = 0;
    }

    fn ratio(&self) -> (u64, u64) {
        (self.boundary as u64, self.members as u64)
    }

    fn add(&mut self, v: usize) {
        debug_assert!(!self.inside[v]);
        self.inside[v] = true;
        self.members += 1;
        let mut o = 0;
        for s in 0..self.a.num_symbols() {
            if !self.inside[self.a.act(s, v)] {
                o += 1;
            }
        }
        // members u with s·u = v lose one outside neighbour each
        for s in 0..self.a.num_symbols() {
            let u = self.a.act(self.inv[s], v);
            if self.inside[u] && u != v {
                self.out[u] -= 1;
                if self.out[u] == 0 {
                    self.boundary -= 1;
                }
            }
        }
        // a fixed point v = s·v was counted as outside before insertion
        self.out[v] = o;
        if o > 0 {
            self.boundary += 1;
        }
    }

    fn remove(&mut self, v: usize) {
        debug_assert!(self.inside[v]);
        if self.out[v] > 0 {
            self.boundary -= 1;
        }
        self.out[v] = 0;
        self.inside[v] = false;
        self.members -= 1;
        for s in 0..self.a.num_symbols() {
            let u = self.a.act(self.inv[s], v);
            if self.inside[u] {
                if self.out[u] == 0 {
                    self.boundary += 1;
                }
                self.out[u] += 1;
            }
        }
    }

    fn set(&self) -> Vec<usize> {
        (0..self.inside.len()).filter(|&x| self.inside[x]).collect()
    }
}

fn less(x: (u64, u64), y: (u64, u64)) -> bool {
    x.0 * y.1 < y.0 * x.1
}

/// Heuristic upper bound on the Cheeger constant: BFS balls and spectral
/// sweep cuts, improved by single-vertex moves. `budget` caps the number of
/// set modifications. Deterministic for a given seed.
pub fn cheeger_search(a: &FiniteAction, budget: usize, seed: u64) -> Result<CheegerWitness> {
    check_nontrivial(a)?;
    let size = a.size();
    let half = size / 2;

    let orb = orbits(a);
    if orb.count > 1 {
        let smallest = (0..orb.count).min_by_key(|&o| (orb.sizes[o], o)).expect("nonempty");
        return Ok(CheegerWitness { ratio: Q::zero(), set: orb.members(smallest) });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = CutState::new(a);
    let mut spent = 0usize;
    let mut best: (u64, u64) = (1, 0);
    let mut best_set: Vec<usize> = Vec::new();

    let mut sweep = |order: &[usize], state: &mut CutState, spent: &mut usize| {
        state.clear();
        for &v in order.iter().take(half) {
            state.add(v);
            *spent += 1;
            if less(state.ratio(), best) {
                best = state.ratio();
                best_set = state.set();
            }
        }
    };

    // spectral sweep: order by an approximate second eigenvector
    let vec = second_eigenvector(a, 200, seed);
    let mut order: Vec<usize> = (0..size).collect();
    order.sort_by(|&x, &y| vec[x].total_cmp(&vec[y]).then(x.cmp(&y)));
    sweep(&order, &mut state, &mut spent);
    order.reverse();
    sweep(&order, &mut state, &mut spent);

    // BFS balls from random centres
    let starts = (budget / (4 * half.max(1))).clamp(1, 64);
    for _ in 0..starts {
        if spent >= budget / 2 {
            break;
        }
        let start = rng.random_range(0..size);
        let mut syms: Vec<usize> = (0..a.num_symbols()).collect();
        syms.shuffle(&mut rng);
        let order = bfs_order(a, start, &syms);
        sweep(&order, &mut state, &mut spent);
    }

    // local improvement from the best set found so far
    state.clear();
    for &v in &best_set {
        state.add(v);
    }
    let mut improved = true;
    while improved && spent < budget {
        improved = false;
        let mut moves: Vec<usize> = (0..size).collect();
        moves.shuffle(&mut rng);
        for v in moves {
            if spent >= budget {
                break;
            }
            spent += 1;
            if state.inside[v] {
                if state.members == 1 {
                    continue;
                }
                state.remove(v);
                if less(state.ratio(), best) {
                    best = state.ratio();
                    improved = true;
                } else {
                    state.add(v);
                }
            } else {
                if state.members == half {
                    continue;
                }
                state.add(v);
                if less(state.ratio(), best) {
                    best = state.ratio();
                    improved = true;
                } else {
                    state.remove(v);
                }
            }
        }
    }
    best_set = state.set();
    Ok(CheegerWitness { ratio: Q::new(best.0 as i128, best.1 as i128), set: best_set })
}

fn bfs_order(a: &FiniteAction, start: usize, syms: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; a.size()];
    let mut order = vec![start];
    seen[start] = true;
    let mut head = 0;
    while head < order.len() {
        let x = order[head];
        head += 1;
        for &s in syms {
            let y = a.act(s, x);
            if !seen[y] {
                seen[y] = true;
                order.push(y);
            }
        }
    }
    order
}

/// `(P v)(x) = (1/|S|) Σ_γ v(γ·x)`.
fn walk(a: &FiniteAction, v: &[f64], out: &mut [f64]) {
    let k = a.num_symbols() as f64;
    out.par_iter_mut().enumerate().for_each(|(x, o)| {
        let mut acc = 0.0;
        for s in 0..a.num_symbols() {
            acc += v[a.act(s, x)];
        }
        *o = acc / k;
    });
}

fn project_out_constants(v: &mut [f64]) {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|x| *x -= mean);
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

fn start_vector(size: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut v: Vec<f64> = (0..size).map(|_| rng.random::<f64>() - 0.5).collect();
    project_out_constants(&mut v);
    normalize(&mut v);
    v
}

fn second_eigenvector(a: &FiniteAction, iters: usize, seed: u64) -> Vec<f64> {
    let mut v = start_vector(a.size(), seed);
    let mut w = vec![0.0; a.size()];
    for _ in 0..iters {
        walk(a, &v, &mut w);
        for (wi, vi) in w.iter_mut().zip(&v) {
            *wi = 0.5 * (*wi + vi);
        }
        project_out_constants(&mut w);
        if normalize(&mut w) == 0.0 {
            break;
        }
        std::mem::swap(&mut v, &mut w);
    }
    v
}

/// Result of one deflated power iteration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenEstimate {
    pub value: f64,
    /// `‖Mv − ρv‖`; an eigenvalue lies within this distance of `value`.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Top eigenvalue of `(I + sign·P)/2` on the complement of the constants.
fn deflated_power(a: &FiniteAction, sign: f64, tol: f64, max_iter: usize) -> EigenEstimate {
    let n = a.size();
    let mut v = start_vector(n, 1);
    let mut w = vec![0.0; n];
    let mut estimate = EigenEstimate { value: 0.0, residual: f64::INFINITY, iterations: 0, converged: false };
    if n < 2 {
        return EigenEstimate { converged: true, residual: 0.0, ..estimate };
    }
    for it in 1..=max_iter {
        walk(a, &v, &mut w);
        for (wi, vi) in w.iter_mut().zip(&v) {
            *wi = 0.5 * (vi + sign * *wi);
        }
        project_out_constants(&mut w);
        let rho: f64 = v.iter().zip(&w).map(|(x, y)| x * y).sum();
        let residual = v.iter().zip(&w).map(|(x, y)| (y - rho * x).powi(2)).sum::<f64>().sqrt();
        estimate = EigenEstimate { value: rho, residual, iterations: it, converged: residual <= tol };
        if estimate.converged {
            break;
        }
        if normalize(&mut w) == 0.0 {
            // v was (numerically) in the kernel: eigenvalue 0 of (I ± P)/2
            estimate = EigenEstimate { value: 0.0, residual: 0.0, iterations: it, converged: true };
            break;
        }
        std::mem::swap(&mut v, &mut w);
    }
    estimate
}

/// Extreme nontrivial eigenvalues of the normalized adjacency operator
/// `P = (1/|S|) Σ_γ perm(γ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralGap {
    /// Largest eigenvalue on the orthogonal complement of the constants.
    pub lambda2: f64,
    /// Smallest eigenvalue of `P`.
    pub lambda_min: f64,
    /// `max(λ2, |λ_min|)`, the second largest eigenvalue in absolute value.
    pub second_by_magnitude: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// Deflated power iteration on `(I + P)/2` and `(I − P)/2`. `P` is symmetric
/// because the generator set is closed under inverses.
///
/// Fails with [`Error::NotConverged`] carrying the last eigenvalue interval
/// for `λ2` when the residual stays above `tol`.
pub fn spectral_gap(a: &FiniteAction, tol: f64, max_iter: usize) -> Result<SpectralGap> {
    let top = deflated_power(a, 1.0, tol, max_iter);
    if !top.converged {
        let l = 2.0 * top.value - 1.0;
        let r = 2.0 * top.residual;
        return Err(Error::NotConverged { iterations: top.iterations, lo: l - r, hi: l + r });
    }
    let bottom = deflated_power(a, -1.0, tol, max_iter);
    if !bottom.converged {
        let l = 1.0 - 2.0 * bottom.value;
        let r = 2.0 * bottom.residual;
        return Err(Error::NotConverged { iterations: bottom.iterations, lo: l - r, hi: l + r });
    }
    let lambda2 = 2.0 * top.value - 1.0;
    let lambda_min = 1.0 - 2.0 * bottom.value;
    Ok(SpectralGap {
        lambda2,
        lambda_min,
        second_by_magnitude: lambda2.max(lambda_min.abs()),
        iterations: top.iterations + bottom.iterations,
        residual: 2.0 * top.residual.max(bottom.residual),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheegerKind {
    Exact,
    Upper,
}

/// `{kind: exact|upper, num, den}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheegerValue {
    pub kind: CheegerKind,
    pub num: String,
    pub den: String,
}

impl CheegerValue {
    pub fn new(kind: CheegerKind, q: Q) -> Self {
        Self { kind, num: q.numer().to_string(), den: q.denom().to_string() }
    }

    pub fn value(&self) -> Q {
        Q::new(self.num.parse().expect("integer"), self.den.parse().expect("integer"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub n: u32,
    pub d: usize,
    pub order: usize,
    pub generators: String,
    pub generates: bool,
    pub cheeger: CheegerValue,
    pub lambda2: Option<f64>,
    pub lambda_min: Option<f64>,
    pub spectral_note: Option<String>,
    pub method: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    pub enumeration_budget: usize,
    pub search_budget: usize,
    pub seed: u64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            enumeration_budget: crate::group::DEFAULT_ENUMERATION_BUDGET,
            search_budget: 200_000,
            seed: 0,
            tol: 1e-9,
            max_iter: 200_000,
        }
    }
}

/// Expansion diagnostics of one translation action.
pub fn expansion_report(g: &FiniteGroup, gens: &GeneratorSet, opts: &ScanOptions) -> Result<ExpansionReport> {
    let a = translation_action(g, gens)?;
    let generates = a.generates().unwrap_or(false);
    let (cheeger, method) = if a.size() <= EXHAUSTIVE_CHEEGER_LIMIT {
        (CheegerValue::new(CheegerKind::Exact, cheeger_exact(&a)?.ratio), "exhaustive")
    } else {
        let w = cheeger_search(&a, opts.search_budget, opts.seed)?;
        (CheegerValue::new(CheegerKind::Upper, w.ratio), "search")
    };
    let (lambda2, lambda_min, spectral_note) = match spectral_gap(&a, opts.tol, opts.max_iter) {
        Ok(s) => (Some(s.lambda2), Some(s.lambda_min), None),
        Err(e) => (None, None, Some(e.to_string())),
    };
    Ok(ExpansionReport {
        n: g.modulus(),
        d: g.dim(),
        order: g.order(),
        generators: gens.describe(),
        generates,
        cheeger,
        lambda2,
        lambda_min,
        spectral_note,
        method: method.into(),
    })
}

/// One [`ExpansionReport`] per modulus, in the given order. Moduli where the
/// image of `S` does not generate are flagged (`generates = false`); these are
/// the candidate divisors of the exceptional modulus.
pub fn bv_scan(gens: &GeneratorSet, moduli: &[u32], opts: &ScanOptions) -> Result<Vec<ExpansionReport>> {
    moduli
        .iter()
        .map(|&n| {
            let g = FiniteGroup::enumerate(gens.dim(), n, opts.enumeration_budget)?;
            expansion_report(&g, gens, opts)
        })
        .collect()
}
