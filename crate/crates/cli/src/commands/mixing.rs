use serde::Serialize;
use weqlab_core::quasirandom::{
    adversarial_mixing_ratio, mixing_check, quasirandomness_bound, triple_mixing_check, MixingReport, TripleMixingReport,
};

use super::enumerate;
use crate::config::RunConfig;
use crate::output::{emit, Report, Status, Table};
use crate::{Failure, GlobalArgs};

#[derive(Serialize)]
struct MixingResult {
    mixing: MixingReport,
    triple: TripleMixingReport,
    /// Ratio reached by alternating power iteration; not a pass/fail check.
    adversarial_ratio: f64,
}

pub fn run(cfg: &RunConfig, global: &GlobalArgs) -> Result<(), Failure> {
    let n = cfg.require_n()?;
    let m = cfg.m.unwrap_or(n);
    let gn = enumerate(cfg, n)?;
    let gm = if m == n { gn.clone() } else { enumerate(cfg, m)? };
    let bound = quasirandomness_bound(n)?;
    let result = MixingResult {
        mixing: mixing_check(&gn, bound, cfg.trials, cfg.seed)?,
        triple: triple_mixing_check(&gn, &gm, cfg.trials, cfg.seed)?,
        adversarial_ratio: adversarial_mixing_ratio(&gn, bound, cfg.rounds, cfg.seed)?,
    };

    let verdict = |pass: bool| if pass { "PASS" } else { "FAIL" }.to_string();
    let mut table = Table::new(&["check", "n", "m", "trials", "max_ratio", "verdict"]);
    table.push(vec![
        "pair".into(),
        n.to_string(),
        "-".into(),
        cfg.trials.to_string(),
        format!("{:.12}", result.mixing.max_ratio),
        verdict(result.mixing.pass),
    ]);
    table.push(vec![
        "triple".into(),
        n.to_string(),
        m.to_string(),
        cfg.trials.to_string(),
        format!("{:.12}", result.triple.max_ratio),
        verdict(result.triple.pass),
    ]);
    table.push(vec![
        "adversarial".into(),
        n.to_string(),
        "-".into(),
        cfg.rounds.to_string(),
        format!("{:.12}", result.adversarial_ratio),
        "-".into(),
    ]);
    emit(global, cfg, "mixing", Report { result: &result, summary: table.clone(), csv: table, status: Status::Complete, notes: Vec::new() })
}
