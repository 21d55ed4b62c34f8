use std::path::Path;

use serde::Serialize;
use weqlab_core::action::{product_action, toy, translation_action};
use weqlab_core::wstat::{
    all_symbols, net_index_estimate, sample_wset, NetIndexOptions, NetIndexReport, SampleOptions, SampleStrategy,
};
use weqlab_core::{Error, FiniteAction, WSetSample};

use super::{enumerate, generators};
use crate::config::RunConfig;
use crate::output::{emit, Report, Status, Table};
use crate::{Failure, GlobalArgs};

/// `a<n>`, a toy fixture name, or a path to an action JSON file.
fn load_action(cfg: &RunConfig, spec: &str) -> Result<FiniteAction, Failure> {
    if let Some(n) = spec.strip_prefix('a').and_then(|n| n.parse::<u32>().ok()) {
        let g = enumerate(cfg, n)?;
        return Ok(translation_action(&g, &generators(cfg)?)?);
    }
    let path = Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Invalid(format!("cannot read {spec}: {e}")))?;
        return Ok(FiniteAction::from_json(&text)?);
    }
    Ok(toy::by_name(spec)?)
}

fn resolve_symbols(a: &FiniteAction, names: Option<&[String]>) -> Result<Vec<usize>, Failure> {
    let Some(names) = names else {
        return Ok(all_symbols(a));
    };
    let mut out = Vec::with_capacity(names.len());
    for name in names {
        let s = a
            .symbols()
            .iter()
            .position(|l| l == name)
            .ok_or_else(|| Failure::Invalid(format!("unknown symbol {name:?}; the action has {}", a.symbols().join(","))))?;
        if !out.contains(&s) {
            out.push(s);
        }
    }
    if out.is_empty() {
        return Err(Failure::Invalid("--symbols is empty".into()));
    }
    Ok(out)
}

#[derive(Serialize)]
struct ActionSummary {
    size: usize,
    symbols: Vec<String>,
}

impl ActionSummary {
    fn of(a: &FiniteAction) -> Self {
        Self { size: a.size(), symbols: a.symbols().to_vec() }
    }
}

#[derive(Serialize)]
struct WsetResult {
    action: ActionSummary,
    symbols: Vec<String>,
    k: usize,
    sample: WSetSample,
}

#[derive(Serialize)]
struct NetResult {
    left: ActionSummary,
    right: ActionSummary,
    symbols: Vec<String>,
    k: usize,
    net: NetIndexReport,
}

pub fn run(cfg: &RunConfig, global: &GlobalArgs) -> Result<(), Failure> {
    let spec = cfg.action.as_deref().ok_or_else(|| Failure::Invalid("--action is required".into()))?;
    let a = load_action(cfg, spec)?;
    let b = cfg.product.as_deref().map(|p| load_action(cfg, p)).transpose()?;
    let symbols = resolve_symbols(&a, cfg.symbols.as_deref())?;
    let names: Vec<String> = symbols.iter().map(|&s| a.symbols()[s].clone()).collect();

    if let Some(epsilon) = cfg.epsilon {
        let b = b.ok_or_else(|| Failure::Invalid("--epsilon needs --product".into()))?;
        let opts = NetIndexOptions {
            max_n: cfg.max_n,
            budget: cfg.wstat_budget,
            sample_size: cfg.sample_size,
            seed: cfg.seed,
            extra_targets: Vec::new(),
        };
        let net = net_index_estimate(&a, &b, &symbols, cfg.k, epsilon, &opts)?;
        let mut table = Table::new(&["N", "exhaustive", "uncovered", "worst_num", "worst_den"]);
        for l in &net.levels {
            table.push(vec![
                l.n.to_string(),
                l.exhaustive.to_string(),
                l.uncovered.to_string(),
                l.worst_distance.numer().to_string(),
                l.worst_distance.denom().to_string(),
            ]);
        }
        let notes = vec![match net.n {
            Some(n) if net.certified => format!("net index N = {n} (certified)"),
            Some(n) => format!("net index N ≤ {n} on the sampled targets"),
            None => format!("no N ≤ {} gives an ε-net", cfg.max_n),
        }];
        let result = NetResult { left: ActionSummary::of(&a), right: ActionSummary::of(&b), symbols: names, k: cfg.k, net };
        return emit(global, cfg, "wstat", Report { result: &result, summary: table.clone(), csv: table, status: Status::Complete, notes });
    }

    let target = match &b {
        Some(b) => product_action(&a, b)?,
        None => a,
    };
    let strategy = if cfg.exhaustive { SampleStrategy::Exhaustive } else { cfg.strategy };
    let opts = SampleOptions { strategy, budget: cfg.wstat_budget, sample_size: cfg.sample_size, seed: cfg.seed };
    let mut notes = Vec::new();
    let mut status = Status::Complete;
    let sample = match sample_wset(&target, &symbols, cfg.k, &opts) {
        Ok(s) => s,
        Err(e @ Error::BudgetExceeded { .. }) if strategy == SampleStrategy::Exhaustive => {
            notes.push(format!("exhaustive enumeration stopped ({e}); the W-set below is a local-search sample"));
            status = Status::Partial;
            sample_wset(&target, &symbols, cfg.k, &SampleOptions { strategy: SampleStrategy::LocalSearch, ..opts })?
        }
        Err(e) => return Err(e.into()),
    };

    let mut summary = Table::new(&["points", "k", "vectors", "exhaustive", "labellings"]);
    summary.push(vec![
        target.size().to_string(),
        cfg.k.to_string(),
        sample.len().to_string(),
        sample.exhaustive.to_string(),
        sample.partitions_examined.to_string(),
    ]);
    let mut csv = Table::new(&["vector", "symbol", "i", "j", "num", "den"]);
    for (v, w) in sample.vectors.iter().enumerate() {
        for (s, i, j, q) in w.rows() {
            csv.push(vec![v.to_string(), s.to_string(), i.to_string(), j.to_string(), q.numer().to_string(), q.denom().to_string()]);
        }
    }
    let result = WsetResult { action: ActionSummary::of(&target), symbols: names, k: cfg.k, sample };
    emit(global, cfg, "wstat", Report { result: &result, summary, csv, status, notes })
}
