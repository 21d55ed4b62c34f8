use std::path::Path;

use serde::{Deserialize, Serialize};
use weqlab_core::wstat::SampleStrategy;
use weqlab_core::Q;

use crate::Failure;

/// Every parameter a run can depend on. Embedded in each JSON report;
/// `--config` files use the same schema, with missing fields defaulted.
/// Thread count and output paths are deliberately absent: they do not
/// change results.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: String,
    pub d: usize,
    pub n: Option<u32>,
    pub m: Option<u32>,
    /// Moduli of `expansion`, primes of `steplab report`.
    pub moduli: Vec<u32>,
    pub generators: String,
    pub action: Option<String>,
    pub product: Option<String>,
    pub symbols: Option<Vec<String>>,
    pub k: usize,
    pub steps: usize,
    #[serde(with = "weqlab_core::rational::option")]
    pub epsilon: Option<Q>,
    pub max_n: usize,
    pub trials: usize,
    pub rounds: usize,
    pub exhaustive: bool,
    pub strategy: SampleStrategy,
    pub sample_size: usize,
    pub enumeration_budget: usize,
    pub cheeger_budget: usize,
    pub wstat_budget: u64,
    pub step_budget: u64,
    pub restarts: usize,
    pub moves: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: String::new(),
            d: 2,
            n: None,
            m: None,
            moduli: Vec::new(),
            generators: "sanov".into(),
            action: None,
            product: None,
            symbols: None,
            k: 2,
            steps: 1,
            epsilon: None,
            max_n: 3,
            trials: 200,
            rounds: 4,
            exhaustive: false,
            strategy: SampleStrategy::LocalSearch,
            sample_size: 256,
            enumeration_budget: weqlab_core::group::DEFAULT_ENUMERATION_BUDGET,
            cheeger_budget: 200_000,
            wstat_budget: 1 << 24,
            step_budget: 1 << 24,
            restarts: 32,
            moves: 100_000,
            tol: 1e-9,
            max_iter: 200_000,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Invalid(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Failure::Invalid(format!("bad config {}: {e}", path.display())))
    }

    pub fn require_n(&self) -> Result<u32, Failure> {
        self.n.ok_or_else(|| Failure::Invalid("--n is required".into()))
    }

    /// Preconditions shared by every command.
    pub fn validate(&self) -> Result<(), Failure> {
        let bad = |msg: String| Err(Failure::Invalid(msg));
        if self.d < 2 {
            return bad(format!("dimension d = {} must be at least 2", self.d));
        }
        if let Some(n) = self.n {
            if n < 2 {
                return bad(format!("modulus n = {n} must be at least 2"));
            }
            if let Some(m) = self.m {
                if m % n != 0 {
                    return bad(format!("n = {n} does not divide m = {m}"));
                }
            }
        }
        if let Some(&p) = self.moduli.iter().find(|&&p| p < 2) {
            return bad(format!("modulus {p} must be at least 2"));
        }
        if self.k == 0 {
            return bad("k must be at least 1".into());
        }
        if self.steps == 0 {
            return bad("step complexity N must be at least 1".into());
        }
        if self.max_n == 0 {
            return bad("max N must be at least 1".into());
        }
        if self.epsilon.is_some_and(|e| e <= Q::from_integer(0)) {
            return bad("ε must be positive".into());
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.restarts == 0 {
            return bad("restarts must be at least 1".into());
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return bad("tolerance must be positive".into());
        }
        Ok(())
    }
}

/// Overwrites `slot` when the flag was given.
pub fn set<T>(slot: &mut T, flag: Option<T>) {
    if let Some(v) = flag {
        *slot = v;
    }
}

pub fn set_opt<T>(slot: &mut Option<T>, flag: Option<T>) {
    if flag.is_some() {
        *slot = flag;
    }
}

pub fn parse_rational(s: &str) -> Result<Q, String> {
    weqlab_core::rational::parse(s).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        assert!(RunConfig::default().validate().is_ok());
    }

    #[test]
    fn preconditions_are_named() {
        let check = |cfg: RunConfig, needle: &str| match cfg.validate() {
            Err(Failure::Invalid(msg)) => assert!(msg.contains(needle), "{msg}"),
            other => panic!("expected a validation failure, got {other:?}"),
        };
        check(RunConfig { n: Some(9), m: Some(3), ..RunConfig::default() }, "does not divide");
        check(RunConfig { steps: 0, ..RunConfig::default() }, "N must be at least 1");
        check(RunConfig { epsilon: Some(Q::new(-1, 3)), ..RunConfig::default() }, "ε must be positive");
        check(RunConfig { tol: f64::NAN, ..RunConfig::default() }, "tolerance");
        check(RunConfig { d: 1, ..RunConfig::default() }, "dimension");
    }

    #[test]
    fn partial_files_fill_in_defaults() {
        let cfg: RunConfig = serde_json::from_str(r#"{"n": 5, "epsilon": {"num": "1", "den": "8"}}"#).unwrap();
        assert_eq!(cfg.n, Some(5));
        assert_eq!(cfg.epsilon, Some(Q::new(1, 8)));
        assert_eq!(cfg.trials, RunConfig::default().trials);
        assert!(serde_json::from_str::<RunConfig>(r#"{"nn": 5}"#).is_err());
    }

    #[test]
    fn round_trips_through_json() {
        let cfg = RunConfig { moduli: vec![3, 5], epsilon: Some(Q::new(2, 7)), ..RunConfig::default() };
        let back: RunConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
    }
}
