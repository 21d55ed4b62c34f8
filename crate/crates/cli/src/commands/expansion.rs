use serde::Serialize;
use weqlab_core::expansion::{expansion_report, ScanOptions};
use weqlab_core::ExpansionReport;

use super::{enumerate, generators, require_moduli};
use crate::config::RunConfig;
use crate::output::{emit, Report, Status, Table};
use crate::{Failure, GlobalArgs};

#[derive(Serialize)]
struct ModulusFailure {
    n: u32,
    error: String,
}

#[derive(Serialize)]
struct ExpansionResult {
    reports: Vec<ExpansionReport>,
    failures: Vec<ModulusFailure>,
}

pub fn scan_options(cfg: &RunConfig) -> ScanOptions {
    ScanOptions {
        enumeration_budget: cfg.enumeration_budget,
        search_budget: cfg.cheeger_budget,
        seed: cfg.seed,
        tol: cfg.tol,
        max_iter: cfg.max_iter,
    }
}

pub fn run(cfg: &RunConfig, global: &GlobalArgs) -> Result<(), Failure> {
    require_moduli(cfg, "--moduli")?;
    let gens = generators(cfg)?;
    let opts = scan_options(cfg);
    let mut result = ExpansionResult { reports: Vec::new(), failures: Vec::new() };
    for &n in &cfg.moduli {
        let attempt = enumerate(cfg, n).and_then(|g| Ok(expansion_report(&g, &gens, &opts)?));
        match attempt {
            Ok(r) => result.reports.push(r),
            Err(Failure::Runtime(error)) => result.failures.push(ModulusFailure { n, error }),
            Err(invalid) => return Err(invalid),
        }
    }

    let header = ["n", "order", "generates", "cheeger_kind", "cheeger_num", "cheeger_den", "lambda2"];
    let mut csv = Table::new(&header);
    let mut summary = Table::new(&["n", "order", "generates", "cheeger", "kind", "lambda2", "lambda_min"]);
    for r in &result.reports {
        let kind = serde_json::to_value(r.cheeger.kind).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
        let lambda2 = r.lambda2.map(|l| format!("{l:.12}")).unwrap_or_default();
        csv.push(vec![
            r.n.to_string(),
            r.order.to_string(),
            r.generates.to_string(),
            kind.clone(),
            r.cheeger.num.clone(),
            r.cheeger.den.clone(),
            lambda2,
        ]);
        summary.push(vec![
            r.n.to_string(),
            r.order.to_string(),
            r.generates.to_string(),
            format!("{}/{}", r.cheeger.num, r.cheeger.den),
            kind,
            r.lambda2.map(|l| format!("{l:.6}")).unwrap_or_else(|| "-".into()),
            r.lambda_min.map(|l| format!("{l:.6}")).unwrap_or_else(|| "-".into()),
        ]);
    }
    let notes: Vec<String> = result.failures.iter().map(|f| format!("n = {}: {}", f.n, f.error)).collect();
    let status = if notes.is_empty() { Status::Complete } else { Status::Partial };
    emit(global, cfg, "expansion", Report { result: &result, summary, csv, status, notes })
}
