//! Finite actions given as one permutation per generator symbol.

pub mod toy;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GeneratorSet};
use crate::unionfind::UnionFind;

/// Where an action came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Left translation of `SL_d(Z/nZ)` by the reduced generators.
    /// `generates` records whether `π_n(⟨S⟩) = G_n`, i.e. transitivity.
    Translation { d: usize, n: u32, generates: bool },
    Product(Box<Provenance>, Box<Provenance>),
    Toy(String),
}

/// An action of the free group on the symbols, restricted to a finite set
/// `{0, .., size-1}` with uniform measure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAction {
    size: usize,
    symbols: Vec<String>,
    inverse: Vec<usize>,
    perms: Vec<Vec<u32>>,
    provenance: Provenance,
}

impl FiniteAction {
    pub fn new(
        size: usize,
        symbols: Vec<String>,
        inverse: Vec<usize>,
        perms: Vec<Vec<u32>>,
        provenance: Provenance,
    ) -> Result<Self> {
        let k = symbols.len();
        if inverse.len() != k || perms.len() != k {
            return Err(Error::InvalidAction("symbol, pairing and permutation counts differ".into()));
        }
        for (s, p) in perms.iter().enumerate() {
            if p.len() != size {
                return Err(Error::InvalidAction(format!(
                    "permutation for {} has length {}, expected {size}",
                    symbols[s],
                    p.len()
                )));
            }
            let mut hit = vec![false; size];
            for &y in p {
                let y = y as usize;
                if y >= size || std::mem::replace(&mut hit[y], true) {
                    return Err(Error::InvalidAction(format!("{} is not a bijection", symbols[s])));
                }
            }
        }
        for (s, &t) in inverse.iter().enumerate() {
            if t >= k || inverse[t] != s {
                return Err(Error::InvalidAction(format!("inverse pairing broken at {}", symbols[s])));
            }
            if (0..size).any(|x| perms[t][perms[s][x] as usize] as usize != x) {
                return Err(Error::InvalidAction(format!(
                    "{} and {} are not mutually inverse",
                    symbols[s], symbols[t]
                )));
            }
        }
        Ok(Self { size, symbols, inverse, perms, provenance })
    }

    /// The action on `size` points where every symbol acts trivially.
    pub fn trivial(size: usize, symbols: Vec<String>, inverse: Vec<usize>) -> Result<Self> {
        let perms = vec![(0..size as u32).collect(); symbols.len()];
        Self::new(size, symbols, inverse, perms, Provenance::Toy(format!("trivial{size}")))
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn num_symbols(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn inverse_of(&self, s: usize) -> usize {
        self.inverse[s]
    }

    pub fn inverse_pairing(&self) -> &[usize] {
        &self.inverse
    }

    pub fn perm(&self, s: usize) -> &[u32] {
        &self.perms[s]
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    #[inline]
    pub fn act(&self, s: usize, x: usize) -> usize {
        self.perms[s][x] as usize
    }

    /// `π_n(⟨S⟩) = G_n` for translation actions; `None` otherwise.
    pub fn generates(&self) -> Option<bool> {
        match self.provenance {
            Provenance::Translation { generates, .. } => Some(generates),
            _ => None,
        }
    }

    pub fn is_transitive(&self) -> bool {
        orbits(self).count <= 1
    }

    /// Same action with the symbols listed in `order` (a permutation of
    /// symbol indices).
    pub fn reorder_symbols(&self, order: &[usize]) -> Result<Self> {
        let k = self.num_symbols();
        let mut pos = vec![usize::MAX; k];
        for (new, &old) in order.iter().enumerate() {
            if old >= k || pos[old] != usize::MAX {
                return Err(Error::InvalidArgument("not a permutation of the symbols".into()));
            }
            pos[old] = new;
        }
        if order.len() != k {
            return Err(Error::InvalidArgument("not a permutation of the symbols".into()));
        }
        Self::new(
            self.size,
            order.iter().map(|&o| self.symbols[o].clone()).collect(),
            order.iter().map(|&o| pos[self.inverse[o]]).collect(),
            order.iter().map(|&o| self.perms[o].clone()).collect(),
            self.provenance.clone(),
        )
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let spec: ActionJson =
            serde_json::from_str(json).map_err(|e| Error::InvalidAction(e.to_string()))?;
        let labels: Vec<String> = spec.symbols.iter().map(|s| s.label.clone()).collect();
        let inverse = spec
            .symbols
            .iter()
            .map(|s| {
                labels
                    .iter()
                    .position(|l| *l == s.inverse)
                    .ok_or_else(|| Error::InvalidAction(format!("unknown inverse label {}", s.inverse)))
            })
            .collect::<Result<_>>()?;
        let perms = spec.symbols.into_iter().map(|s| s.perm).collect();
        let name = spec.name.unwrap_or_else(|| "json".into());
        Self::new(spec.size, labels, inverse, perms, Provenance::Toy(name))
    }

    pub fn to_json(&self) -> ActionJson {
        ActionJson {
            name: match &self.provenance {
                Provenance::Toy(name) => Some(name.clone()),
                _ => None,
            },
            size: self.size,
            symbols: (0..self.num_symbols())
                .map(|s| SymbolJson {
                    label: self.symbols[s].clone(),
                    inverse: self.symbols[self.inverse[s]].clone(),
                    perm: self.perms[s].clone(),
                })
                .collect(),
        }
    }
}

/// File format for hand-built actions:
/// `{"size": 3, "symbols": [{"label": "s", "inverse": "s", "perm": [1, 0, 2]}]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ActionJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub size: usize,
    pub symbols: Vec<SymbolJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SymbolJson {
    pub label: String,
    pub inverse: String,
    pub perm: Vec<u32>,
}

/// `α_n: Γ ↷ G_n`, `γ·x = π_n(γ)x`.
pub fn translation_action(g: &FiniteGroup, gens: &GeneratorSet) -> Result<FiniteAction> {
    if gens.dim() != g.dim() {
        return Err(Error::DimensionMismatch(g.dim(), gens.dim()));
    }
    let reduced = gens.reduce(g.modulus())?;
    let perms = reduced.iter().map(|m| g.left_mul_perm(m)).collect::<Result<Vec<_>>>()?;
    let generates = g.subgroup_closure(&reduced)?.whole;
    FiniteAction::new(
        g.order(),
        gens.symbols().to_vec(),
        gens.inverse_pairing().to_vec(),
        perms,
        Provenance::Translation { d: g.dim(), n: g.modulus(), generates },
    )
}

/// `γ·(x, y) = (γ·x, γ·y)` on `X × Y`, point `(x, y)` at index `x·|Y| + y`.
pub fn product_action(a: &FiniteAction, b: &FiniteAction) -> Result<FiniteAction> {
    if a.symbols != b.symbols || a.inverse != b.inverse {
        return Err(Error::SymbolMismatch);
    }
    let (nx, ny) = (a.size, b.size);
    let size = nx.checked_mul(ny).filter(|&s| s <= u32::MAX as usize).ok_or_else(|| {
        Error::InvalidArgument(format!("product of sizes {nx} and {ny} is too large"))
    })?;
    let perms = a
        .perms
        .iter()
        .zip(&b.perms)
        .map(|(pa, pb)| {
            let mut p = Vec::with_capacity(size);
            for &x in pa {
                for &y in pb {
                    p.push(x * ny as u32 + y);
                }
            }
            p
        })
        .collect();
    FiniteAction::new(
        size,
        a.symbols.clone(),
        a.inverse.clone(),
        perms,
        Provenance::Product(Box::new(a.provenance.clone()), Box::new(b.provenance.clone())),
    )
}

/// A partition of the ground set into orbits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitPartition {
    pub ids: Vec<u32>,
    pub count: usize,
    pub sizes: Vec<usize>,
}

impl OrbitPartition {
    pub fn from_ids(ids: Vec<u32>, count: usize) -> Self {
        let mut sizes = vec![0; count];
        for &i in &ids {
            sizes[i as usize] += 1;
        }
        Self { ids, count, sizes }
    }

    /// Same ids renumbered in order of each orbit's least point.
    pub fn canonical(&self) -> Self {
        let mut map = vec![u32::MAX; self.count];
        let mut next = 0u32;
        let ids = self
            .ids
            .iter()
            .map(|&i| {
                let slot = &mut map[i as usize];
                if *slot == u32::MAX {
                    *slot = next;
                    next += 1;
                }
                *slot
            })
            .collect();
        Self::from_ids(ids, next as usize)
    }

    /// Equality as set partitions, ignoring labels.
    pub fn same_partition(&self, other: &Self) -> bool {
        self.ids.len() == other.ids.len() && self.canonical().ids == other.canonical().ids
    }

    pub fn members(&self, orbit: usize) -> Vec<usize> {
        (0..self.ids.len()).filter(|&x| self.ids[x] as usize == orbit).collect()
    }
}

/// Connected components of the Schreier graph, numbered by least point.
pub fn orbits(a: &FiniteAction) -> OrbitPartition {
    let mut uf = UnionFind::new(a.size);
    for p in &a.perms {
        for (x, &y) in p.iter().enumerate() {
            uf.union(x, y as usize);
        }
    }
    let mut root_id = vec![u32::MAX; a.size];
    let mut next = 0u32;
    let ids = (0..a.size)
        .map(|x| {
            let r = uf.find(x);
            if root_id[r] == u32::MAX {
                root_id[r] = next;
                next += 1;
            }
            root_id[r]
        })
        .collect();
    OrbitPartition::from_ids(ids, next as usize)
}

/// For each point `(x, y)` of `G_n × G_m`, the index of `z = π_n(y)⁻¹x`.
/// `red` is the reduction table `G_m → G_n`.
pub(crate) fn oz_labels(gn: &FiniteGroup, gm: &FiniteGroup, red: &[u32]) -> Vec<u32> {
    let inv = gn.inv_table();
    let table = gn.mul_table();
    let (on, om) = (gn.order(), gm.order());
    let mut labels = Vec::with_capacity(on * om);
    for x in 0..on {
        for &r in red {
            let yinv = inv[r as usize] as usize;
            labels.push(table[yinv * on + x]);
        }
    }
    labels
}

/// The partition of `G_n × G_m` into the sets `O_z = {(x, y) : x = π_n(y)z}`,
/// labelled by the index of `z`. Requires `n | m` and `π_m(⟨S⟩) = G_m`.
pub fn oz_partition(gn: &FiniteGroup, gm: &FiniteGroup, gens: &GeneratorSet) -> Result<OrbitPartition> {
    if !gm.modulus().is_multiple_of(gn.modulus()) {
        return Err(Error::NotDivisible { n: gn.modulus(), m: gm.modulus() });
    }
    if !gm.subgroup_closure(&gens.reduce(gm.modulus())?)?.whole {
        return Err(Error::NotTransitive { d: gm.dim(), n: gm.modulus() });
    }
    let red = gm.reduction_to(gn)?;
    Ok(OrbitPartition::from_ids(oz_labels(gn, gm, &red), gn.order()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::DEFAULT_ENUMERATION_BUDGET;

    fn group(n: u32) -> FiniteGroup {
        FiniteGroup::enumerate(2, n, DEFAULT_ENUMERATION_BUDGET).unwrap()
    }

    #[test]
    fn translation_examples() {
        let s = GeneratorSet::sanov();
        let a3 = translation_action(&group(3), &s).unwrap();
        assert_eq!(a3.size(), 24);
        assert_eq!(a3.generates(), Some(true));
        assert!(a3.is_transitive());

        let a2 = translation_action(&group(2), &s).unwrap();
        assert_eq!(a2.generates(), Some(false));
        for sym in 0..a2.num_symbols() {
            assert!(a2.perm(sym).iter().enumerate().all(|(x, &y)| x == y as usize));
        }
        assert_eq!(orbits(&a2).count, 6);
    }

    #[test]
    fn inverse_pairs_compose_to_identity() {
        let a = translation_action(&group(5), &GeneratorSet::sanov()).unwrap();
        for s in 0..a.num_symbols() {
            let t = a.inverse_of(s);
            assert!((0..a.size()).all(|x| a.act(t, a.act(s, x)) == x));
        }
    }

    #[test]
    fn product_with_point_is_a_copy() {
        let a = translation_action(&group(3), &GeneratorSet::sanov()).unwrap();
        let pt = FiniteAction::trivial(1, a.symbols().to_vec(), a.inverse_pairing().to_vec()).unwrap();
        let p = product_action(&a, &pt).unwrap();
        assert_eq!(p.size(), a.size());
        for s in 0..a.num_symbols() {
            assert_eq!(p.perm(s), a.perm(s));
        }
        let pp = product_action(&a, &a).unwrap();
        assert_eq!(pp.size(), 576);
        for x in (0..576).step_by(7) {
            for s in 0..4 {
                let (u, v) = (x / 24, x % 24);
                assert_eq!(pp.act(s, x), a.act(s, u) * 24 + a.act(s, v));
            }
        }
    }

    #[test]
    fn product_requires_same_symbols() {
        let a = translation_action(&group(3), &GeneratorSet::sanov()).unwrap();
        assert_eq!(product_action(&a, &toy::swap()), Err(Error::SymbolMismatch));
    }

    #[test]
    fn orbit_examples() {
        let s = GeneratorSet::sanov();
        let a5 = translation_action(&group(5), &s).unwrap();
        let o = orbits(&a5);
        assert_eq!((o.count, o.sizes.clone()), (1, vec![120]));

        let a3 = translation_action(&group(3), &s).unwrap();
        let o = orbits(&product_action(&a3, &a3).unwrap());
        assert_eq!(o.count, 24);
        assert!(o.sizes.iter().all(|&z| z == 24));

        let id = FiniteAction::trivial(10, vec!["s".into()], vec![0]).unwrap();
        assert_eq!(orbits(&id).count, 10);
    }

    #[test]
    fn oz_matches_union_find() {
        let s = GeneratorSet::sanov();
        let g3 = group(3);
        let a3 = translation_action(&g3, &s).unwrap();
        let oz = oz_partition(&g3, &g3, &s).unwrap();
        let uf = orbits(&product_action(&a3, &a3).unwrap());
        assert!(oz.same_partition(&uf));
        // the orbit of z = identity is the graph of π_n
        let e = g3.identity_index() as u32;
        for x in 0..24 {
            for y in 0..24 {
                assert_eq!(oz.ids[x * 24 + y] == e, x == y);
            }
        }
    }

    #[test]
    fn oz_preconditions() {
        let s = GeneratorSet::sanov();
        assert!(matches!(oz_partition(&group(3), &group(5), &s), Err(Error::NotDivisible { .. })));
        assert!(matches!(oz_partition(&group(2), &group(2), &s), Err(Error::NotTransitive { .. })));
    }

    #[test]
    fn orbits_ignore_symbol_order() {
        let a = product_action(&toy::cycle(4), &toy::cycle(6)).unwrap();
        let b = a.reorder_symbols(&[1, 0]).unwrap();
        assert_eq!(orbits(&a), orbits(&b));
    }

    #[test]
    fn json_round_trip_and_validation() {
        let a = toy::cycle(5);
        let json = serde_json::to_string(&a.to_json()).unwrap();
        assert_eq!(FiniteAction::from_json(&json).unwrap(), a);
        let bad = r#"{"size": 2, "symbols": [{"label": "s", "inverse": "s", "perm": [0, 0]}]}"#;
        assert!(FiniteAction::from_json(bad).is_err());
        let bad = r#"{"size": 3, "symbols": [{"label": "s", "inverse": "s", "perm": [1, 2, 0]}]}"#;
        assert!(FiniteAction::from_json(bad).is_err());
    }
}
