use serde::Serialize;
use weqlab_core::steplab::{
    claim3_bound, discontinuity_report, invariance_defect, nearest_fz, search_step_functions, Claim3Bound, Instance,
    InvarianceDefect, NearestFz, ReportOptions, StepSearchResult,
};
use weqlab_core::wstat::all_symbols;
use weqlab_core::DiscontinuityReport;

use super::expansion::scan_options;
use super::{experiment, require_moduli};
use crate::config::RunConfig;
use crate::output::{emit, Report, Status, Table};
use crate::{Failure, GlobalArgs};

fn opt_q(q: &Option<weqlab_core::Q>) -> String {
    q.map(|q| q.to_string()).unwrap_or_else(|| "-".into())
}

pub fn report(cfg: &RunConfig, global: &GlobalArgs) -> Result<(), Failure> {
    require_moduli(cfg, "--primes")?;
    let opts = ReportOptions { template: experiment(cfg, 2, 2)?, scan: scan_options(cfg) };
    let report: DiscontinuityReport = discontinuity_report(&cfg.moduli, cfg.steps, &opts);

    let mut csv = Table::new(&DiscontinuityReport::CSV_HEADER);
    for r in report.csv_records() {
        csv.push(r.to_vec());
    }
    let mut summary =
        Table::new(&["p", "|G_p|", "u_member", "best_dist", "exhaustive", "defect", "nearest_fz", "claim3", "lambda2", "cheeger", "delta"]);
    for r in &report.rows {
        summary.push(vec![
            r.p.to_string(),
            r.order_n.to_string(),
            r.u_member.to_string(),
            r.best_step_dist.to_string(),
            r.step_search_exhaustive.to_string(),
            r.invariance_defect.to_string(),
            r.nearest_fz_dist.to_string(),
            r.claim3.status.to_string(),
            r.lambda2.map(|l| format!("{l:.6}")).unwrap_or_else(|| "-".into()),
            format!("{}/{}", r.cheeger.num, r.cheeger.den),
            opt_q(&r.delta),
        ]);
    }
    let notes: Vec<String> = report.failures.iter().map(|f| format!("p = {}: {}", f.p, f.error)).collect();
    let status = if notes.is_empty() { Status::Complete } else { Status::Partial };
    emit(global, cfg, "steplab-report", Report { result: &report, summary, csv, status, notes })
}

#[derive(Serialize)]
struct SearchOutput {
    n: u32,
    m: u32,
    search: StepSearchResult,
    invariance_defect: InvarianceDefect,
    nearest_fz: NearestFz,
    claim3: Claim3Bound,
}

pub fn search(cfg: &RunConfig, global: &GlobalArgs) -> Result<(), Failure> {
    let n = cfg.require_n()?;
    let m = cfg.m.unwrap_or(n);
    let exp = experiment(cfg, n, m)?;
    let inst = Instance::build(&exp)?;
    let search = search_step_functions(&inst.an, &inst.am, &all_symbols(&inst.an), &inst.target(), exp.steps, &exp.search)?;
    let best = search.best.assemble();
    let out = SearchOutput {
        n,
        m,
        invariance_defect: invariance_defect(&inst.an, &inst.am, &best)?,
        nearest_fz: nearest_fz(&inst.gn, &inst.gm, &best)?,
        claim3: claim3_bound(n, exp.steps)?,
        search,
    };

    let mut summary = Table::new(&["n", "m", "N", "best_dist", "exhaustive", "defect", "nearest_fz", "claim3"]);
    summary.push(vec![
        n.to_string(),
        m.to_string(),
        exp.steps.to_string(),
        out.search.best_dist.to_string(),
        out.search.exhaustive.to_string(),
        out.invariance_defect.total.to_string(),
        out.nearest_fz.dist.to_string(),
        out.claim3.status.to_string(),
    ]);
    let mut csv = Table::new(&["restart", "moves", "kicks", "best_num", "best_den"]);
    for t in &out.search.trace {
        csv.push(vec![
            t.restart.to_string(),
            t.moves.to_string(),
            t.kicks.to_string(),
            t.best_dist.numer().to_string(),
            t.best_dist.denom().to_string(),
        ]);
    }
    let notes = if out.search.budget_exhausted {
        vec!["local search used its whole move budget without reaching distance 0; best_dist is an upper bound on the minimum".to_string()]
    } else {
        Vec::new()
    };
    emit(global, cfg, "steplab-search", Report { result: &out, summary, csv, status: Status::Complete, notes })
}

pub fn claim3(cfg: &RunConfig, global: &GlobalArgs) -> Result<(), Failure> {
    require_moduli(cfg, "--primes")?;
    let bounds = cfg.moduli.iter().map(|&p| claim3_bound(p, cfg.steps)).collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&["p", "N", "bound", "status"]);
    for b in &bounds {
        table.push(vec![b.p.to_string(), b.steps.to_string(), format!("{:.12}", b.bound), b.status.to_string()]);
    }
    emit(global, cfg, "steplab-claim3", Report { result: &bounds, summary: table.clone(), csv: table, status: Status::Complete, notes: Vec::new() })
}
