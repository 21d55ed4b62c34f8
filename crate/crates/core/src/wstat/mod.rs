//! W-vectors of finite actions: joint label frequencies `μ(f = i, f∘γ = j)`,
//! their metrics, φ-convolution, W-set sampling and the ε-net index.
//!
//! All statistics are exact: a [`WVector`] stores integer counts over a
//! common denominator.

mod counter;
mod net;
mod sample;

pub use counter::WCounter;
pub use net::{net_index_estimate, NetIndexOptions, NetIndexReport, NetLevel};
pub use sample::{enumerate_wset, sample_wset, SampleOptions, SampleStrategy, WSetSample};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::action::FiniteAction;
use crate::error::{Error, Result};
use crate::rational::Q;

/// A map `X → k`, i.e. a labelling of the points of a finite action.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition {
    k: usize,
    labels: Vec<u32>,
}

impl Partition {
    pub fn new(k: usize, labels: Vec<u32>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("partition needs at least one class".into()));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l as usize >= k) {
            return Err(Error::InvalidArgument(format!("label {bad} out of range for k = {k}")));
        }
        Ok(Self { k, labels })
    }

    pub fn constant(size: usize, k: usize, c: u32) -> Result<Self> {
        Self::new(k, vec![c; size])
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn label(&self, x: usize) -> u32 {
        self.labels[x]
    }

    /// Number of points in each class.
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l as usize] += 1;
        }
        sizes
    }

    fn check_on(&self, a: &FiniteAction) -> Result<()> {
        if self.size() != a.size() {
            return Err(Error::SizeMismatch { expected: a.size(), found: self.size() });
        }
        Ok(())
    }
}

/// `dist_μ(f, g) = μ(f ≠ g)` under the uniform measure.
pub fn dist_mu(f: &Partition, g: &Partition) -> Result<Q> {
    if f.size() != g.size() {
        return Err(Error::SizeMismatch { expected: f.size(), found: g.size() });
    }
    if f.size() == 0 {
        return Err(Error::EmptySample);
    }
    let diff = f.labels.iter().zip(&g.labels).filter(|(a, b)| a != b).count();
    Ok(Q::new(diff as i128, f.size() as i128))
}

/// `W(α, S, k, f)` as integer counts over a common denominator. Entry
/// `(s, i, j)` lives at `(s·k + i)·k + j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WVector {
    symbols: Vec<String>,
    inverse: Vec<Option<usize>>,
    k: usize,
    counts: Vec<u64>,
    denom: u64,
}

impl WVector {
    /// `inverse[s]` is the position of `s⁻¹` inside the symbol list when present.
    pub fn new(symbols: Vec<String>, inverse: Vec<Option<usize>>, k: usize, counts: Vec<u64>, denom: u64) -> Result<Self> {
        let len = symbols.len() * k * k;
        if counts.len() != len {
            return Err(Error::SizeMismatch { expected: len, found: counts.len() });
        }
        if inverse.len() != symbols.len() || inverse.iter().flatten().any(|&t| t >= symbols.len()) {
            return Err(Error::ShapeMismatch("inverse table does not match the symbols".into()));
        }
        if denom == 0 || counts.iter().any(|&c| c > denom) {
            return Err(Error::InvalidArgument("W-vector entries must lie in [0, 1]".into()));
        }
        Ok(Self { symbols, inverse, k, counts, denom })
    }

    /// Builds a vector from exact entries, ordered like the counts.
    pub fn from_entries(symbols: Vec<String>, inverse: Vec<Option<usize>>, k: usize, entries: &[Q]) -> Result<Self> {
        let denom = entries.iter().fold(1i128, |acc, q| num_integer::lcm(acc, *q.denom()));
        let counts = entries
            .iter()
            .map(|q| {
                let c = q.numer() * (denom / q.denom());
                u64::try_from(c).map_err(|_| Error::InvalidArgument("negative W-vector entry".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let denom = u64::try_from(denom).map_err(|_| Error::InvalidArgument("denominator overflow".into()))?;
        Self::new(symbols, inverse, k, counts, denom)
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn inverse(&self) -> &[Option<usize>] {
        &self.inverse
    }

    pub fn num_symbols(&self) -> usize {
        self.symbols.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn denom(&self) -> u64 {
        self.denom
    }

    fn idx(&self, s: usize, i: usize, j: usize) -> usize {
        (s * self.k + i) * self.k + j
    }

    pub fn count(&self, s: usize, i: usize, j: usize) -> u64 {
        self.counts[self.idx(s, i, j)]
    }

    pub fn entry(&self, s: usize, i: usize, j: usize) -> Q {
        Q::new(self.count(s, i, j) as i128, self.denom as i128)
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.k == other.k && self.symbols == other.symbols
    }

    /// Equality of the represented vectors, regardless of denominators.
    pub fn same_value(&self, other: &Self) -> bool {
        self.same_shape(other)
            && self
                .counts
                .iter()
                .zip(&other.counts)
                .all(|(&a, &b)| a as u128 * other.denom as u128 == b as u128 * self.denom as u128)
    }

    /// Checks the marginal constraints every W-vector of a labelling obeys:
    /// rows and columns sum to the class masses, independently of the
    /// symbol, and `γ⁻¹` is the transpose of `γ`.
    pub fn check_invariants(&self) -> Result<()> {
        let k = self.k;
        let fail = |msg: String| Err(Error::InvalidArgument(msg));
        if self.symbols.is_empty() {
            return Ok(());
        }
        let rows = |s: usize| (0..k).map(|i| (0..k).map(|j| self.count(s, i, j)).sum::<u64>()).collect::<Vec<_>>();
        let cols = |s: usize| (0..k).map(|j| (0..k).map(|i| self.count(s, i, j)).sum::<u64>()).collect::<Vec<_>>();
        let mass = rows(0);
        if mass.iter().sum::<u64>() != self.denom {
            return fail("entries do not sum to 1".into());
        }
        for s in 0..self.symbols.len() {
            if rows(s) != mass || cols(s) != mass {
                return fail(format!("marginals of {} differ from the class masses", self.symbols[s]));
            }
            if let Some(t) = self.inverse[s] {
                for i in 0..k {
                    for j in 0..k {
                        if self.count(t, i, j) != self.count(s, j, i) {
                            return fail(format!("{} is not the transpose of {}", self.symbols[t], self.symbols[s]));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `(symbol, i, j, entry)` rows in storage order; the entry is reduced.
    pub fn rows(&self) -> impl Iterator<Item = (&str, usize, usize, Q)> + '_ {
        (0..self.symbols.len()).flat_map(move |s| {
            (0..self.k).flat_map(move |i| (0..self.k).map(move |j| (self.symbols[s].as_str(), i, j, self.entry(s, i, j))))
        })
    }

    pub fn to_json(&self) -> WVectorJson {
        WVectorJson {
            symbols: self.symbols.clone(),
            inverse: self.inverse.clone(),
            k: self.k,
            denom: self.denom.to_string(),
            entries: self
                .rows()
                .map(|(symbol, i, j, value)| EntryJson { symbol: symbol.to_string(), i, j, value })
                .collect(),
        }
    }

    pub fn from_json(json: &WVectorJson) -> Result<Self> {
        let denom: u64 = json
            .denom
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad denominator {}", json.denom)))?;
        let d = Q::from_integer(denom as i128);
        let counts = json
            .entries
            .iter()
            .map(|e| {
                let c = e.value * d;
                if !c.is_integer() || c < Q::from_integer(0) {
                    return Err(Error::InvalidArgument("entry is not a count over the denominator".into()));
                }
                Ok(c.to_integer() as u64)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(json.symbols.clone(), json.inverse.clone(), json.k, counts, denom)
    }
}

impl Serialize for WVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for WVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let json = WVectorJson::deserialize(d)?;
        Self::from_json(&json).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntryJson {
    pub symbol: String,
    pub i: usize,
    pub j: usize,
    #[serde(with = "crate::rational")]
    pub value: Q,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WVectorJson {
    pub symbols: Vec<String>,
    pub inverse: Vec<Option<usize>>,
    pub k: usize,
    pub denom: String,
    pub entries: Vec<EntryJson>,
}

/// Positions of the symbol inverses inside a chosen subset.
fn subset_inverse(a: &FiniteAction, symbols: &[usize]) -> Result<Vec<Option<usize>>> {
    if let Some(&bad) = symbols.iter().find(|&&s| s >= a.num_symbols()) {
        return Err(Error::InvalidArgument(format!("symbol index {bad} out of range")));
    }
    Ok(symbols
        .iter()
        .map(|&s| symbols.iter().position(|&t| t == a.inverse_of(s)))
        .collect())
}

fn subset_names(a: &FiniteAction, symbols: &[usize]) -> Vec<String> {
    symbols.iter().map(|&s| a.symbols()[s].clone()).collect()
}

/// Every symbol of the action, in order.
pub fn all_symbols(a: &FiniteAction) -> Vec<usize> {
    (0..a.num_symbols()).collect()
}

/// `W(α, S, k, f)` for the symbols `S` (indices into the action's symbols).
pub fn w_vector(a: &FiniteAction, symbols: &[usize], f: &Partition) -> Result<WVector> {
    f.check_on(a)?;
    let inverse = subset_inverse(a, symbols)?;
    let k = f.k();
    let mut counts = vec![0u64; symbols.len() * k * k];
    for (si, &s) in symbols.iter().enumerate() {
        let perm = a.perm(s);
        let block = &mut counts[si * k * k..(si + 1) * k * k];
        for (&i, &gx) in f.labels.iter().zip(perm) {
            let j = f.labels[gx as usize];
            block[i as usize * k + j as usize] += 1;
        }
    }
    WVector::new(subset_names(a, symbols), inverse, k, counts, a.size() as u64)
}

/// W-vector of a labelling of the product `α × β` given pointwise, without
/// materializing the product action. Symbols must agree on both factors and
/// `f` must return labels below `k`.
pub fn w_vector_product<F>(a: &FiniteAction, b: &FiniteAction, symbols: &[usize], k: usize, f: F) -> Result<WVector>
where
    F: Fn(usize, usize) -> u32 + Sync,
{
    if a.symbols() != b.symbols() || a.inverse_pairing() != b.inverse_pairing() {
        return Err(Error::SymbolMismatch);
    }
    let inverse = subset_inverse(a, symbols)?;
    let width = symbols.len() * k * k;
    let counts = (0..a.size())
        .into_par_iter()
        .fold(
            || vec![0u64; width],
            |mut acc, x| {
                for (si, &s) in symbols.iter().enumerate() {
                    let (pa, pb) = (a.perm(s), b.perm(s));
                    let gx = pa[x] as usize;
                    for (y, &gy) in pb.iter().enumerate() {
                        let i = f(x, y) as usize;
                        let j = f(gx, gy as usize) as usize;
                        acc[(si * k + i) * k + j] += 1;
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; width],
            |mut l, r| {
                l.iter_mut().zip(r).for_each(|(x, y)| *x += y);
                l
            },
        );
    let total = (a.size() as u64) * (b.size() as u64);
    WVector::new(subset_names(a, symbols), inverse, k, counts, total)
}

/// `dist_∞(u, v) = max |u(γ,i,j) − v(γ,i,j)|`, exact.
pub fn dist_inf(u: &WVector, v: &WVector) -> Result<Q> {
    if !u.same_shape(v) {
        return Err(Error::ShapeMismatch("W-vectors over different (S, k)".into()));
    }
    let (du, dv) = (u.denom as i128, v.denom as i128);
    let num = u
        .counts
        .iter()
        .zip(&v.counts)
        .map(|(&a, &b)| (a as i128 * dv - b as i128 * du).abs())
        .max()
        .unwrap_or(0);
    Ok(Q::new(num, du * dv))
}

/// `dist_∞(v, A) = min_{a ∈ A} dist_∞(v, a)`.
pub fn dist_to_set(v: &WVector, set: &[WVector]) -> Result<Q> {
    let mut best: Option<Q> = None;
    for w in set {
        let d = dist_inf(v, w)?;
        if best.is_none_or(|b| d < b) {
            best = Some(d);
        }
    }
    best.ok_or(Error::EmptySample)
}

/// `sup_{a ∈ A} dist_∞(a, B)`: the one-sided defect of `A ⊆ Ball(B)`.
pub fn directed_hausdorff(a: &[WVector], b: &[WVector]) -> Result<Q> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    let per = a.par_iter().map(|v| dist_to_set(v, b)).collect::<Result<Vec<_>>>()?;
    Ok(per.into_iter().max().expect("nonempty"))
}

/// Hausdorff distance between two finite samples.
pub fn hausdorff(a: &[WVector], b: &[WVector]) -> Result<Q> {
    Ok(directed_hausdorff(a, b)?.max(directed_hausdorff(b, a)?))
}

/// A map `φ: N × N → k` combining two `N`-class labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PhiTable {
    n: usize,
    k: usize,
    table: Vec<u32>,
}

impl PhiTable {
    pub fn new(n: usize, k: usize, table: Vec<u32>) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(Error::InvalidArgument("φ needs N ≥ 1 and k ≥ 1".into()));
        }
        if table.len() != n * n {
            return Err(Error::SizeMismatch { expected: n * n, found: table.len() });
        }
        if table.iter().any(|&v| v as usize >= k) {
            return Err(Error::InvalidArgument(format!("φ value out of range for k = {k}")));
        }
        Ok(Self { n, k, table })
    }

    /// The `index`-th table in mixed-radix order (entry `(0,0)` varies fastest).
    pub fn from_index(n: usize, k: usize, mut index: u64) -> Result<Self> {
        let mut table = Vec::with_capacity(n * n);
        for _ in 0..n * n {
            table.push((index % k as u64) as u32);
            index /= k as u64;
        }
        Self::new(n, k, table)
    }

    /// `k^(N²)`, or `None` on overflow.
    pub fn count(n: usize, k: usize) -> Option<u64> {
        (k as u64).checked_pow(u32::try_from(n * n).ok()?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    pub fn get(&self, a: usize, b: usize) -> u32 {
        self.table[a * self.n + b]
    }

    pub fn set(&mut self, a: usize, b: usize, v: u32) {
        assert!((v as usize) < self.k);
        self.table[a * self.n + b] = v;
    }
}

/// Counts of `u ∗_φ v` over the denominator `den(u)·den(v)`, written into `out`.
pub(crate) fn phi_convolve_counts(k: usize, n: usize, u: &[u64], v: &[u64], phi: &[u32], out: &mut [u64]) {
    let blocks = u.len() / (n * n);
    out.iter_mut().for_each(|c| *c = 0);
    for s in 0..blocks {
        let ub = &u[s * n * n..(s + 1) * n * n];
        let vb = &v[s * n * n..(s + 1) * n * n];
        let ob = &mut out[s * k * k..(s + 1) * k * k];
        for a in 0..n {
            for c in 0..n {
                let uac = ub[a * n + c];
                if uac == 0 {
                    continue;
                }
                for b in 0..n {
                    let i = phi[a * n + b] as usize;
                    for d in 0..n {
                        let j = phi[c * n + d] as usize;
                        ob[i * k + j] += uac * vb[b * n + d];
                    }
                }
            }
        }
    }
}

/// `(u ∗_φ v)(γ,i,j) = Σ_{φ(a,b)=i} Σ_{φ(c,d)=j} u(γ,a,c)·v(γ,b,d)`.
pub fn phi_convolution(u: &WVector, v: &WVector, phi: &PhiTable) -> Result<WVector> {
    if !u.same_shape(v) || u.k != phi.n {
        return Err(Error::ShapeMismatch(format!(
            "φ-convolution of N = {} and N = {} vectors with a table on N = {}",
            u.k, v.k, phi.n
        )));
    }
    let k = phi.k;
    let mut counts = vec![0u64; u.symbols.len() * k * k];
    phi_convolve_counts(k, phi.n, &u.counts, &v.counts, &phi.table, &mut counts);
    let denom = u
        .denom
        .checked_mul(v.denom)
        .ok_or_else(|| Error::InvalidArgument("denominator overflow".into()))?;
    WVector::new(u.symbols.clone(), u.inverse.clone(), k, counts, denom)
}
