use serde::Serialize;
use weqlab_core::group::{crt_check, GroupJson};

use super::enumerate;
use crate::config::RunConfig;
use crate::output::{emit, Report, Status, Table};
use crate::{Failure, GlobalArgs};

#[derive(Serialize)]
struct GroupInfo {
    d: usize,
    n: u32,
    order: usize,
    identity_index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    elements: Option<GroupJson>,
}

pub fn info(cfg: &RunConfig, global: &GlobalArgs, elements: bool) -> Result<(), Failure> {
    let n = cfg.require_n()?;
    let g = enumerate(cfg, n)?;
    let result = GroupInfo {
        d: g.dim(),
        n,
        order: g.order(),
        identity_index: g.identity_index(),
        elements: elements.then(|| g.to_json()),
    };
    let mut summary = Table::new(&["d", "n", "order"]);
    summary.push(vec![result.d.to_string(), n.to_string(), result.order.to_string()]);
    let csv = if elements {
        let mut t = Table::new(&["index", "entries"]);
        for (i, e) in g.elements().enumerate() {
            let entries: Vec<String> = e.entries().iter().map(u32::to_string).collect();
            t.push(vec![i.to_string(), entries.join(" ")]);
        }
        t
    } else {
        summary.clone()
    };
    emit(global, cfg, "group-info", Report { result: &result, summary, csv, status: Status::Complete, notes: Vec::new() })
}

pub fn crt(cfg: &RunConfig, global: &GlobalArgs) -> Result<(), Failure> {
    let n = cfg.require_n()?;
    let g = enumerate(cfg, n)?;
    let report = crt_check(&g, cfg.enumeration_budget)?;
    let mut table = Table::new(&["modulus", "prime", "exponent", "order"]);
    for f in &report.factors {
        table.push(vec![f.modulus.to_string(), f.prime.to_string(), f.exponent.to_string(), f.order.to_string()]);
    }
    table.push(vec![n.to_string(), "-".into(), "-".into(), report.order.to_string()]);
    let notes = vec![format!(
        "orders multiply: {}, reduction injective: {}, pass: {}",
        report.orders_match, report.injective, report.pass
    )];
    emit(global, cfg, "group-crt", Report { result: &report, summary: table.clone(), csv: table, status: Status::Complete, notes })
}
