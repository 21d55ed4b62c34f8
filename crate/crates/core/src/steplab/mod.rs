//! Step functions on `G_n × G_m`, the invariant maps `f_Z`, the target
//! vector `u`, and the per-prime report comparing them.

mod search;

pub use search::{search_step_functions, SearchOptions, StepSearchResult, TraceEntry};

use serde::{Deserialize, Serialize};

use crate::action::{oz_labels, translation_action, FiniteAction};
use crate::error::{Error, Result};
use crate::expansion::{expansion_report, CheegerValue, ScanOptions};
use crate::group::{smallest_prime_factor, FiniteGroup, GeneratorSet, DEFAULT_ENUMERATION_BUDGET};
use crate::rational::Q;
use crate::wstat::{all_symbols, w_vector_product, Partition, PhiTable, WVector};

/// `f = φ∘(g, h)` with `g`, `h` labellings into `N` classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductStepFunction {
    g: Partition,
    h: Partition,
    phi: PhiTable,
}

impl ProductStepFunction {
    pub fn new(g: Partition, h: Partition, phi: PhiTable) -> Result<Self> {
        if g.k() != phi.n() || h.k() != phi.n() {
            return Err(Error::ShapeMismatch(format!(
                "factors with {} and {} classes for a table on N = {}",
                g.k(),
                h.k(),
                phi.n()
            )));
        }
        Ok(Self { g, h, phi })
    }

    pub fn g(&self) -> &Partition {
        &self.g
    }

    pub fn h(&self) -> &Partition {
        &self.h
    }

    pub fn phi(&self) -> &PhiTable {
        &self.phi
    }

    pub fn label(&self, x: usize, y: usize) -> u32 {
        self.phi.get(self.g.label(x) as usize, self.h.label(y) as usize)
    }

    /// The labelling of the product, point `(x, y)` at `x·|Y| + y`.
    pub fn assemble(&self) -> Partition {
        let labels = (0..self.g.size())
            .flat_map(|x| (0..self.h.size()).map(move |y| self.label(x, y)))
            .collect();
        Partition::new(self.phi.k(), labels).expect("φ values are in range")
    }
}

/// The vector with `u(γ, i, i) = 1/2` and `u(γ, i, j) = 0` for `i ≠ j`.
pub fn target_u(symbols: &[String], inverse: &[usize]) -> WVector {
    let counts = symbols.iter().flat_map(|_| [1, 0, 0, 1]).collect();
    WVector::new(symbols.to_vec(), inverse.iter().map(|&t| Some(t)).collect(), 2, counts, 2)
        .expect("valid target")
}

/// `δ = ε / (32|S|)`.
pub fn delta(num_symbols: usize, epsilon: Q) -> Result<Q> {
    if epsilon <= Q::from_integer(0) {
        return Err(Error::InvalidArgument("ε must be positive".into()));
    }
    if num_symbols == 0 {
        return Err(Error::InvalidArgument("empty generator set".into()));
    }
    Ok(epsilon / Q::from_integer(32 * num_symbols as i128))
}

fn check_divides(gn: &FiniteGroup, gm: &FiniteGroup) -> Result<()> {
    if !gm.modulus().is_multiple_of(gn.modulus()) {
        return Err(Error::NotDivisible { n: gn.modulus(), m: gm.modulus() });
    }
    Ok(())
}

fn orbit_labels(gn: &FiniteGroup, gm: &FiniteGroup) -> Result<Vec<u32>> {
    check_divides(gn, gm)?;
    Ok(oz_labels(gn, gm, &gm.reduction_to(gn)?))
}

/// `f_Z(x, y) = 1` iff `π_n(y)⁻¹x ∈ Z`, on `G_n × G_m` (point `x·|G_m| + y`).
pub fn f_z(gn: &FiniteGroup, gm: &FiniteGroup, z: &[usize]) -> Result<Partition> {
    let mut member = vec![false; gn.order()];
    for &e in z {
        *member
            .get_mut(e)
            .ok_or_else(|| Error::InvalidArgument(format!("element index {e} outside G_{}", gn.modulus())))? = true;
    }
    let labels = orbit_labels(gn, gm)?.into_iter().map(|c| member[c as usize] as u32).collect();
    Partition::new(2, labels)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UMembership {
    /// Indices of the elements of `Z`.
    pub z: Vec<usize>,
    /// `W(f_Z) = u` was verified exactly.
    pub exact: bool,
}

/// Half-size `Z` (the first `|G_n|/2` elements) and an exact check that
/// `W(α_n × α_m, S, 2, f_Z) = u`.
pub fn u_membership_witness(gn: &FiniteGroup, gm: &FiniteGroup, gens: &GeneratorSet) -> Result<UMembership> {
    check_divides(gn, gm)?;
    if !gm.subgroup_closure(&gens.reduce(gm.modulus())?)?.whole {
        return Err(Error::NotTransitive { d: gm.dim(), n: gm.modulus() });
    }
    if !gn.order().is_multiple_of(2) {
        return Err(Error::OddOrder(gn.order()));
    }
    let z: Vec<usize> = (0..gn.order() / 2).collect();
    let f = f_z(gn, gm, &z)?;
    let (an, am) = (translation_action(gn, gens)?, translation_action(gm, gens)?);
    let w = w_vector_product(&an, &am, &all_symbols(&an), 2, |x, y| f.label(x * gm.order() + y))?;
    let exact = w.same_value(&target_u(an.symbols(), an.inverse_pairing()));
    Ok(UMembership { z, exact })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvarianceDefect {
    /// `|B| / |X × Y|` with `B = ∪_γ B_γ`.
    #[serde(with = "crate::rational")]
    pub total: Q,
    /// `|B_γ| / |X × Y|`, `B_γ = {p : f(p) ≠ f(γ·p)}`, per symbol.
    #[serde(with = "crate::rational::vec")]
    pub per_symbol: Vec<Q>,
}

/// Invariance defect of a labelling `f` of the product `α × β`.
pub fn invariance_defect(a: &FiniteAction, b: &FiniteAction, f: &Partition) -> Result<InvarianceDefect> {
    if a.symbols() != b.symbols() {
        return Err(Error::SymbolMismatch);
    }
    let (nx, ny) = (a.size(), b.size());
    if f.size() != nx * ny {
        return Err(Error::SizeMismatch { expected: nx * ny, found: f.size() });
    }
    let mut per = vec![0u64; a.num_symbols()];
    let mut union = 0u64;
    for x in 0..nx {
        for y in 0..ny {
            let l = f.label(x * ny + y);
            let mut moved = false;
            for (s, count) in per.iter_mut().enumerate() {
                let image = a.act(s, x) * ny + b.act(s, y);
                if f.label(image) != l {
                    *count += 1;
                    moved = true;
                }
            }
            union += moved as u64;
        }
    }
    let total = (nx * ny) as i128;
    Ok(InvarianceDefect {
        total: Q::new(union as i128, total),
        per_symbol: per.into_iter().map(|c| Q::new(c as i128, total)).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NearestFz {
    pub z: Vec<usize>,
    #[serde(with = "crate::rational")]
    pub dist: Q,
}

/// The `f_Z` closest to `f`: `z ∈ Z` iff `f = 1` on more than half of `O_z`
/// (exact halves vote for `z ∉ Z`). Orbits are disjoint, so the per-orbit
/// majority minimizes `dist_μ(f, f_Z)`.
pub fn nearest_fz(gn: &FiniteGroup, gm: &FiniteGroup, f: &Partition) -> Result<NearestFz> {
    let labels = orbit_labels(gn, gm)?;
    if f.size() != labels.len() {
        return Err(Error::SizeMismatch { expected: labels.len(), found: f.size() });
    }
    if f.k() != 2 {
        return Err(Error::InvalidArgument("nearest f_Z needs a two-class labelling".into()));
    }
    let mut ones = vec![0u64; gn.order()];
    for (p, &z) in labels.iter().enumerate() {
        ones[z as usize] += f.label(p) as u64;
    }
    let orbit = gm.order() as u64;
    let z: Vec<usize> = (0..gn.order()).filter(|&z| 2 * ones[z] > orbit).collect();
    let wrong: u64 = ones.iter().map(|&o| o.min(orbit - o)).sum();
    Ok(NearestFz { z, dist: Q::new(wrong as i128, labels.len() as i128) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundStatus {
    /// The bound is `≤ 0`.
    Vacuous,
    /// Positive but not above `1/8`.
    Weak,
    /// Above `1/8`, strong enough for the distance argument.
    Active,
}

impl std::fmt::Display for BoundStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Vacuous => "vacuous",
            Self::Weak => "weak",
            Self::Active => "active",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Claim3Bound {
    pub p: u32,
    pub steps: usize,
    /// `1/4 − N·√(8/(p−1))`, irrational in general.
    pub bound: f64,
    /// Decided in integers: vacuous iff `p − 1 ≤ 128N²`, active iff `p − 1 > 512N²`.
    pub status: BoundStatus,
}

/// Lower bound `1/4 − N√(8/(p−1))` on the distance from an `N`-step function
/// to the invariant maps, `p` the smallest prime divisor of `n`.
pub fn claim3_bound(n: u32, steps: usize) -> Result<Claim3Bound> {
    let p = smallest_prime_factor(n).ok_or_else(|| Error::InvalidArgument(format!("modulus must be at least 2, got {n}")))?;
    if steps == 0 {
        return Err(Error::InvalidArgument("step complexity N must be at least 1".into()));
    }
    let gap = p as u128 - 1;
    let n2 = (steps as u128).pow(2);
    let status = if gap <= 128 * n2 {
        BoundStatus::Vacuous
    } else if gap > 512 * n2 {
        BoundStatus::Active
    } else {
        BoundStatus::Weak
    };
    let bound = 0.25 - steps as f64 * (8.0 / (p as f64 - 1.0)).sqrt();
    Ok(Claim3Bound { p, steps, bound, status })
}

/// Parameters of one `(n, m)` experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub d: usize,
    pub n: u32,
    pub m: u32,
    pub generators: GeneratorSet,
    pub k: usize,
    pub steps: usize,
    /// Expansion constant used for `δ`; `None` means the measured Cheeger value.
    #[serde(with = "crate::rational::option")]
    pub eps_assumed: Option<Q>,
    pub enumeration_budget: usize,
    pub search: SearchOptions,
}

impl ExperimentConfig {
    pub fn new(n: u32, m: u32, steps: usize) -> Self {
        Self {
            d: 2,
            n,
            m,
            generators: GeneratorSet::sanov(),
            k: 2,
            steps,
            eps_assumed: None,
            enumeration_budget: DEFAULT_ENUMERATION_BUDGET,
            search: SearchOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || !self.m.is_multiple_of(self.n) {
            return Err(Error::NotDivisible { n: self.n, m: self.m });
        }
        if self.steps == 0 {
            return Err(Error::InvalidArgument("step complexity N must be at least 1".into()));
        }
        if self.k != 2 {
            return Err(Error::InvalidArgument("the target u is defined for k = 2".into()));
        }
        if self.generators.dim() != self.d {
            return Err(Error::DimensionMismatch(self.d, self.generators.dim()));
        }
        if self.eps_assumed.is_some_and(|e| e <= Q::from_integer(0)) {
            return Err(Error::InvalidArgument("ε must be positive".into()));
        }
        Ok(())
    }
}

/// Groups and translation actions of one experiment.
pub struct Instance {
    pub gn: FiniteGroup,
    pub gm: FiniteGroup,
    pub an: FiniteAction,
    pub am: FiniteAction,
}

impl Instance {
    pub fn build(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let gn = FiniteGroup::enumerate(cfg.d, cfg.n, cfg.enumeration_budget)?;
        let gm = if cfg.m == cfg.n { gn.clone() } else { FiniteGroup::enumerate(cfg.d, cfg.m, cfg.enumeration_budget)? };
        let an = translation_action(&gn, &cfg.generators)?;
        let am = translation_action(&gm, &cfg.generators)?;
        Ok(Self { gn, gm, an, am })
    }

    pub fn target(&self) -> WVector {
        target_u(self.an.symbols(), self.an.inverse_pairing())
    }
}

/// Closest approach of `N`-step functions on `α_n × α_m` to `u`.
pub fn step_search(cfg: &ExperimentConfig) -> Result<StepSearchResult> {
    let inst = Instance::build(cfg)?;
    search_step_functions(&inst.an, &inst.am, &all_symbols(&inst.an), &inst.target(), cfg.steps, &cfg.search)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscontinuityRow {
    pub p: u32,
    pub order_n: usize,
    pub order_m: usize,
    pub u_member: bool,
    pub u_witness_size: usize,
    #[serde(with = "crate::rational")]
    pub best_step_dist: Q,
    pub step_search_exhaustive: bool,
    #[serde(with = "crate::rational")]
    pub invariance_defect: Q,
    #[serde(with = "crate::rational")]
    pub nearest_fz_dist: Q,
    pub claim3: Claim3Bound,
    pub lambda2: Option<f64>,
    /// Measured Cheeger constant of `α_p` (exact or a search upper bound).
    pub cheeger: CheegerValue,
    /// `ε` used for `δ`: assumed, or the measured Cheeger value.
    #[serde(with = "crate::rational::option")]
    pub epsilon: Option<Q>,
    #[serde(with = "crate::rational::option")]
    pub delta: Option<Q>,
    /// `best_step_dist ≥ δ`, relative to the ε above.
    pub at_least_delta: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowFailure {
    pub p: u32,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscontinuityReport {
    pub steps: usize,
    pub rows: Vec<DiscontinuityRow>,
    pub failures: Vec<RowFailure>,
}

impl DiscontinuityReport {
    pub const CSV_HEADER: [&'static str; 8] =
        ["p", "order_n", "order_m", "u_member", "best_step_dist_num", "best_step_dist_den", "claim3_status", "lambda2"];

    /// One record per row, matching [`Self::CSV_HEADER`]; `lambda2` is empty
    /// when the eigenvalue iteration did not converge.
    pub fn csv_records(&self) -> Vec<[String; 8]> {
        self.rows
            .iter()
            .map(|r| {
                [
                    r.p.to_string(),
                    r.order_n.to_string(),
                    r.order_m.to_string(),
                    r.u_member.to_string(),
                    r.best_step_dist.numer().to_string(),
                    r.best_step_dist.denom().to_string(),
                    r.claim3.status.to_string(),
                    r.lambda2.map(|l| format!("{l:.12}")).unwrap_or_default(),
                ]
            })
            .collect()
    }
}

/// Shared settings of a discontinuity report; `n`, `m` and `steps` of the
/// template are replaced per row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportOptions {
    pub template: ExperimentConfig,
    pub scan: ScanOptions,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self { template: ExperimentConfig::new(2, 2, 1), scan: ScanOptions::default() }
    }
}

fn report_row(p: u32, steps: usize, opts: &ReportOptions) -> Result<DiscontinuityRow> {
    let cfg = ExperimentConfig { n: p, m: p, steps, ..opts.template.clone() };
    let inst = Instance::build(&cfg)?;
    let membership = u_membership_witness(&inst.gn, &inst.gm, &cfg.generators)?;
    let search = search_step_functions(&inst.an, &inst.am, &all_symbols(&inst.an), &inst.target(), steps, &cfg.search)?;
    let best = search.best.assemble();
    let defect = invariance_defect(&inst.an, &inst.am, &best)?;
    let nearest = nearest_fz(&inst.gn, &inst.gm, &best)?;
    let expansion = expansion_report(&inst.gn, &cfg.generators, &opts.scan)?;
    let epsilon = cfg.eps_assumed.or_else(|| Some(expansion.cheeger.value())).filter(|e| *e > Q::from_integer(0));
    let delta = epsilon.map(|e| delta(inst.an.num_symbols(), e)).transpose()?;
    Ok(DiscontinuityRow {
        p,
        order_n: inst.gn.order(),
        order_m: inst.gm.order(),
        u_member: membership.exact,
        u_witness_size: membership.z.len(),
        best_step_dist: search.best_dist,
        step_search_exhaustive: search.exhaustive,
        invariance_defect: defect.total,
        nearest_fz_dist: nearest.dist,
        claim3: claim3_bound(p, steps)?,
        lambda2: expansion.lambda2,
        cheeger: expansion.cheeger,
        epsilon,
        delta,
        at_least_delta: delta.map(|d| search.best_dist >= d),
    })
}

/// Runs the `(p, p)` experiment for each modulus, sorted and deduplicated.
/// A failing row is recorded and the remaining rows still run.
pub fn discontinuity_report(primes: &[u32], steps: usize, opts: &ReportOptions) -> DiscontinuityReport {
    let mut ps = primes.to_vec();
    ps.sort_unstable();
    ps.dedup();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for p in ps {
        match report_row(p, steps, opts) {
            Ok(r) => rows.push(r),
            Err(e) => failures.push(RowFailure { p, error: e.to_string() }),
        }
    }
    DiscontinuityReport { steps, rows, failures }
}

#[cfg(test)]
mod tests;
