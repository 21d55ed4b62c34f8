use crate::action::FiniteAction;
use crate::error::Result;

use super::{subset_inverse, subset_names, Partition, WVector};

/// W-vector counts of a labelling that is edited one point at a time.
/// Relabelling a point costs `O(|S|)`.
#[derive(Clone, Debug)]
pub struct WCounter {
    k: usize,
    forward: Vec<Vec<u32>>,
    backward: Vec<Vec<u32>>,
    labels: Vec<u32>,
    counts: Vec<u64>,
}

impl WCounter {
    pub fn new(a: &FiniteAction, symbols: &[usize], f: &Partition) -> Result<Self> {
        let w = super::w_vector(a, symbols, f)?;
        let forward: Vec<Vec<u32>> = symbols.iter().map(|&s| a.perm(s).to_vec()).collect();
        let backward = forward
            .iter()
            .map(|p| {
                let mut inv = vec![0u32; p.len()];
                for (x, &y) in p.iter().enumerate() {
                    inv[y as usize] = x as u32;
                }
                inv
            })
            .collect();
        Ok(Self { k: f.k(), forward, backward, labels: f.labels().to_vec(), counts: w.counts })
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

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn label(&self, x: usize) -> u32 {
        self.labels[x]
    }

    pub fn partition(&self) -> Partition {
        Partition { k: self.k, labels: self.labels.clone() }
    }

    /// Sets the label of `x`, updating the pairs `(x, γx)` and `(γ⁻¹x, x)`.
    pub fn set(&mut self, x: usize, new: u32) {
        let old = self.labels[x];
        if old == new {
            return;
        }
        debug_assert!((new as usize) < self.k);
        let k = self.k;
        let (old, new) = (old as usize, new as usize);
        for s in 0..self.forward.len() {
            let base = s * k * k;
            let y = self.forward[s][x] as usize;
            if y == x {
                self.counts[base + old * k + old] -= 1;
                self.counts[base + new * k + new] += 1;
                continue;
            }
            let w = self.backward[s][x] as usize;
            let ly = self.labels[y] as usize;
            let lw = self.labels[w] as usize;
            self.counts[base + old * k + ly] -= 1;
            self.counts[base + new * k + ly] += 1;
            self.counts[base + lw * k + old] -= 1;
            self.counts[base + lw * k + new] += 1;
        }
        self.labels[x] = new as u32;
    }

    pub fn to_wvector(&self, a: &FiniteAction, symbols: &[usize]) -> Result<WVector> {
        WVector::new(
            subset_names(a, symbols),
            subset_inverse(a, symbols)?,
            self.k,
            self.counts.clone(),
            self.labels.len() as u64,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::{alpha, random_partition};
    use super::super::{all_symbols, w_vector};
    use super::*;
    use crate::action::toy;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn incremental_matches_recount() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for a in [alpha(3), toy::swap(), toy::cycle(1), toy::two_cycles(2, 3), toy::complete(5)] {
            let s = all_symbols(&a);
            for k in 1..4 {
                let f = random_partition(a.size(), k, &mut rng);
                let mut c = WCounter::new(&a, &s, &f).unwrap();
                for _ in 0..200 {
                    let x = rng.random_range(0..a.size());
                    c.set(x, rng.random_range(0..k as u32));
                    assert_eq!(c.to_wvector(&a, &s).unwrap(), w_vector(&a, &s, &c.partition()).unwrap());
                }
            }
        }
    }
}
