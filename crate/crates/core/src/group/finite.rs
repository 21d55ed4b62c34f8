use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::arith::factorize;
use super::matrix::{decode, encode, mul_into, ModMatrix};
use crate::error::{Error, Result};

pub const DEFAULT_ENUMERATION_BUDGET: usize = 5_000_000;

/// An explicitly enumerated `SL_d(Z/nZ)`.
///
/// Elements are indexed in lexicographic order of their row-major entry
/// vectors, so indices (and everything derived from them) are reproducible.
#[derive(Clone, Debug)]
pub struct FiniteGroup {
    d: usize,
    n: u32,
    codes: Vec<u64>,
    index: HashMap<u64, u32>,
    identity: usize,
    mul_table: OnceLock<Vec<u32>>,
    inv_table: OnceLock<Vec<u32>>,
}

impl FiniteGroup {
    /// Breadth-first closure of the identity under the elementary
    /// transvections `I + E_ij`, which generate `SL_d(Z/nZ)`.
    pub fn enumerate(d: usize, n: u32, budget: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidArgument(format!("dimension must be at least 2, got {d}")));
        }
        if n < 2 {
            return Err(Error::InvalidArgument(format!("modulus must be at least 2, got {n}")));
        }
        if (n as u64).checked_pow((d * d) as u32).is_none() {
            return Err(Error::InvalidArgument(format!("SL_{d}(Z/{n}Z) is beyond desk scale")));
        }
        let gens: Vec<Vec<u32>> = (0..d)
            .flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| ModMatrix::elementary(d, n, i, j, 1).entries().to_vec())
            .collect();

        let id = ModMatrix::identity(d, n);
        let mut seen: HashSet<u64> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(id.code());
        queue.push_back(id.code());
        let mut cur = vec![0u32; d * d];
        let mut out = vec![0u32; d * d];
        while let Some(code) = queue.pop_front() {
            decode(n, code, &mut cur);
            for g in &gens {
                mul_into(d, n, &cur, g, &mut out);
                let c = encode(n, &out);
                if seen.insert(c) {
                    if seen.len() > budget {
                        return Err(Error::BudgetExceeded {
                            what: format!("|SL_{d}(Z/{n}Z)|"),
                            budget: budget as u64,
                        });
                    }
                    queue.push_back(c);
                }
            }
        }
        let mut codes: Vec<u64> = seen.into_iter().collect();
        codes.sort_unstable();
        let index: HashMap<u64, u32> = codes.iter().enumerate().map(|(i, &c)| (c, i as u32)).collect();
        let identity = index[&id.code()] as usize;
        Ok(Self {
            d,
            n,
            codes,
            index,
            identity,
            mul_table: OnceLock::new(),
            inv_table: OnceLock::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn modulus(&self) -> u32 {
        self.n
    }

    pub fn order(&self) -> usize {
        self.codes.len()
    }

    pub fn identity_index(&self) -> usize {
        self.identity
    }

    pub fn element(&self, i: usize) -> ModMatrix {
        let mut e = vec![0u32; self.d * self.d];
        decode(self.n, self.codes[i], &mut e);
        ModMatrix::from_reduced(self.d, self.n, e)
    }

    pub fn elements(&self) -> impl Iterator<Item = ModMatrix> + '_ {
        (0..self.order()).map(|i| self.element(i))
    }

    pub fn index_of(&self, m: &ModMatrix) -> Option<usize> {
        if m.dim() != self.d || m.modulus() != self.n {
            return None;
        }
        self.index.get(&m.code()).map(|&i| i as usize)
    }

    fn index_of_entries(&self, e: &[u32]) -> usize {
        self.index[&encode(self.n, e)] as usize
    }

    /// Index of `elements[i] · elements[j]`.
    pub fn mul_index(&self, i: usize, j: usize) -> usize {
        if let Some(t) = self.mul_table.get() {
            return t[i * self.order() + j] as usize;
        }
        let (d, n) = (self.d, self.n);
        let (mut a, mut b, mut c) = (vec![0; d * d], vec![0; d * d], vec![0; d * d]);
        decode(n, self.codes[i], &mut a);
        decode(n, self.codes[j], &mut b);
        mul_into(d, n, &a, &b, &mut c);
        self.index_of_entries(&c)
    }

    /// Full Cayley table, row-major: `table[i * |G| + j] = index(g_i g_j)`.
    /// Built once on first use.
    pub fn mul_table(&self) -> &[u32] {
        self.mul_table.get_or_init(|| {
            let (d, n, ord) = (self.d, self.n, self.order());
            let mut table = vec![0u32; ord * ord];
            table.par_chunks_mut(ord).enumerate().for_each(|(i, row)| {
                let (mut a, mut b, mut c) = (vec![0; d * d], vec![0; d * d], vec![0; d * d]);
                decode(n, self.codes[i], &mut a);
                for (j, slot) in row.iter_mut().enumerate() {
                    decode(n, self.codes[j], &mut b);
                    mul_into(d, n, &a, &b, &mut c);
                    *slot = self.index_of_entries(&c) as u32;
                }
            });
            table
        })
    }

    /// `inv_table()[i]` is the index of `elements[i]⁻¹`.
    pub fn inv_table(&self) -> &[u32] {
        self.inv_table.get_or_init(|| {
            (0..self.order())
                .map(|i| self.index_of(&self.element(i).inv()).expect("closed under inverse") as u32)
                .collect()
        })
    }

    /// The permutation `x ↦ g·x` of element indices.
    pub fn left_mul_perm(&self, g: &ModMatrix) -> Result<Vec<u32>> {
        if g.dim() != self.d {
            return Err(Error::DimensionMismatch(self.d, g.dim()));
        }
        if g.modulus() != self.n {
            return Err(Error::ModulusMismatch(self.n, g.modulus()));
        }
        let (d, n) = (self.d, self.n);
        let mut x = vec![0; d * d];
        let mut out = vec![0; d * d];
        Ok(self
            .codes
            .iter()
            .map(|&c| {
                decode(n, c, &mut x);
                mul_into(d, n, g.entries(), &x, &mut out);
                self.index_of_entries(&out) as u32
            })
            .collect())
    }

    /// Index table of the reduction `π_target: self → target`.
    pub fn reduction_to(&self, target: &FiniteGroup) -> Result<Vec<u32>> {
        if target.d != self.d {
            return Err(Error::DimensionMismatch(self.d, target.d));
        }
        if !self.n.is_multiple_of(target.n) {
            return Err(Error::NotDivisible { n: target.n, m: self.n });
        }
        let mut e = vec![0; self.d * self.d];
        Ok(self
            .codes
            .iter()
            .map(|&c| {
                decode(self.n, c, &mut e);
                for x in e.iter_mut() {
                    *x %= target.n;
                }
                target.index_of_entries(&e) as u32
            })
            .collect())
    }

    /// The subgroup generated by `gens`.
    pub fn subgroup_closure(&self, gens: &[ModMatrix]) -> Result<Subgroup> {
        let gens: Vec<usize> = gens
            .iter()
            .map(|g| {
                self.index_of(g).ok_or_else(|| {
                    Error::InvalidArgument(format!("{g} is not an element of SL_{}(Z/{}Z)", self.d, self.n))
                })
            })
            .collect::<Result<_>>()?;
        let mut inside = vec![false; self.order()];
        let mut queue = VecDeque::from([self.identity]);
        inside[self.identity] = true;
        while let Some(x) = queue.pop_front() {
            for &g in &gens {
                let y = self.mul_index(x, g);
                if !inside[y] {
                    inside[y] = true;
                    queue.push_back(y);
                }
            }
        }
        let members: Vec<usize> = (0..self.order()).filter(|&i| inside[i]).collect();
        Ok(Subgroup {
            whole: members.len() == self.order(),
            members,
        })
    }

    pub fn to_json(&self) -> GroupJson {
        GroupJson {
            d: self.d,
            n: self.n,
            order: self.order(),
            elements: self.elements().map(|e| e.entries().to_vec()).collect(),
        }
    }
}

/// JSON form `{d, n, order, elements}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupJson {
    pub d: usize,
    pub n: u32,
    pub order: usize,
    pub elements: Vec<Vec<u32>>,
}

/// Sorted element indices of a subgroup.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subgroup {
    pub members: Vec<usize>,
    pub whole: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrtFactor {
    pub prime: u32,
    pub exponent: u32,
    pub modulus: u32,
    pub order: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrtReport {
    pub n: u32,
    pub order: usize,
    pub factors: Vec<CrtFactor>,
    pub product_of_orders: usize,
    pub orders_match: bool,
    pub injective: bool,
    pub pass: bool,
}

/// Checks `SL_d(Z/nZ) ≅ Π SL_d(Z/p_i^{k_i}Z)`: the orders multiply and the
/// joint reduction map is injective.
pub fn crt_check(g: &FiniteGroup, budget: usize) -> Result<CrtReport> {
    let mut factors = Vec::new();
    let mut reductions = Vec::new();
    for (p, k) in factorize(g.modulus()) {
        let q = p.pow(k);
        let gq = FiniteGroup::enumerate(g.dim(), q, budget)?;
        reductions.push(g.reduction_to(&gq)?);
        factors.push(CrtFactor { prime: p, exponent: k, modulus: q, order: gq.order() });
    }
    let product_of_orders = factors.iter().map(|f| f.order).product();
    let images: HashSet<Vec<u32>> = (0..g.order())
        .map(|i| reductions.iter().map(|r| r[i]).collect())
        .collect();
    let injective = images.len() == g.order();
    let orders_match = product_of_orders == g.order();
    Ok(CrtReport {
        n: g.modulus(),
        order: g.order(),
        factors,
        product_of_orders,
        orders_match,
        injective,
        pass: orders_match && injective,
    })
}
