use weqlab_core::group::GeneratorSet;
use weqlab_core::steplab::{ExperimentConfig, SearchOptions};
use weqlab_core::FiniteGroup;

use crate::config::{set, set_opt, RunConfig};
use crate::{Command, Failure, GlobalArgs, GroupArgs, GroupCommand, StepArgs, SteplabCommand};

mod expansion;
mod group;
mod mixing;
mod steplab;
mod wstat;

/// Copies every flag given on the command line over `cfg`.
pub fn apply_flags(command: &Command, cfg: &mut RunConfig) {
    let group_flags = |cfg: &mut RunConfig, g: &GroupArgs| {
        set(&mut cfg.d, g.d);
        set_opt(&mut cfg.n, g.n);
        set(&mut cfg.enumeration_budget, g.enumeration_budget);
    };
    let step_flags = |cfg: &mut RunConfig, s: &StepArgs| {
        set(&mut cfg.steps, s.step_n);
        set(&mut cfg.generators, s.gens.clone());
        set(&mut cfg.restarts, s.restarts);
        set(&mut cfg.moves, s.moves);
        set(&mut cfg.step_budget, s.step_budget);
        set(&mut cfg.enumeration_budget, s.enumeration_budget);
    };
    match command {
        Command::Group(GroupCommand::Info { group, .. }) => {
            cfg.command = "group info".into();
            group_flags(cfg, group);
        }
        Command::Group(GroupCommand::Crt { group }) => {
            cfg.command = "group crt".into();
            group_flags(cfg, group);
        }
        Command::Expansion(a) => {
            cfg.command = "expansion".into();
            set(&mut cfg.d, a.d);
            set(&mut cfg.moduli, a.moduli.clone());
            set(&mut cfg.generators, a.gens.clone());
            set(&mut cfg.enumeration_budget, a.enumeration_budget);
            set(&mut cfg.cheeger_budget, a.cheeger_budget);
            set(&mut cfg.tol, a.tol);
            set(&mut cfg.max_iter, a.max_iter);
        }
        Command::Mixing(a) => {
            cfg.command = "mixing".into();
            set(&mut cfg.d, a.d);
            set_opt(&mut cfg.n, a.n);
            set_opt(&mut cfg.m, a.m);
            set(&mut cfg.trials, a.trials);
            set(&mut cfg.rounds, a.rounds);
            set(&mut cfg.enumeration_budget, a.enumeration_budget);
        }
        Command::Wstat(a) => {
            cfg.command = "wstat".into();
            set_opt(&mut cfg.action, a.action.clone());
            set_opt(&mut cfg.product, a.product.clone());
            set(&mut cfg.d, a.d);
            set(&mut cfg.generators, a.gens.clone());
            set(&mut cfg.k, a.k);
            cfg.exhaustive |= a.exhaustive;
            set_opt(&mut cfg.symbols, a.symbols.clone());
            set(&mut cfg.strategy, a.strategy.map(Into::into));
            set(&mut cfg.sample_size, a.sample_size);
            set(&mut cfg.wstat_budget, a.budget);
            set_opt(&mut cfg.epsilon, a.epsilon);
            set(&mut cfg.max_n, a.max_n);
            set(&mut cfg.enumeration_budget, a.enumeration_budget);
        }
        Command::Steplab(SteplabCommand::Report { primes, step, epsilon, cheeger_budget }) => {
            cfg.command = "steplab report".into();
            set(&mut cfg.moduli, primes.clone());
            step_flags(cfg, step);
            set_opt(&mut cfg.epsilon, *epsilon);
            set(&mut cfg.cheeger_budget, *cheeger_budget);
        }
        Command::Steplab(SteplabCommand::Search { n, m, step }) => {
            cfg.command = "steplab search".into();
            set_opt(&mut cfg.n, *n);
            set_opt(&mut cfg.m, *m);
            step_flags(cfg, step);
        }
        Command::Steplab(SteplabCommand::Claim3 { primes, step_n }) => {
            cfg.command = "steplab claim3".into();
            set(&mut cfg.moduli, primes.clone());
            set(&mut cfg.steps, *step_n);
        }
    }
}

pub fn dispatch(command: &Command, cfg: &RunConfig, global: &GlobalArgs) -> Result<(), Failure> {
    match command {
        Command::Group(GroupCommand::Info { elements, .. }) => group::info(cfg, global, *elements),
        Command::Group(GroupCommand::Crt { .. }) => group::crt(cfg, global),
        Command::Expansion(_) => expansion::run(cfg, global),
        Command::Mixing(_) => mixing::run(cfg, global),
        Command::Wstat(_) => wstat::run(cfg, global),
        Command::Steplab(SteplabCommand::Report { .. }) => steplab::report(cfg, global),
        Command::Steplab(SteplabCommand::Search { .. }) => steplab::search(cfg, global),
        Command::Steplab(SteplabCommand::Claim3 { .. }) => steplab::claim3(cfg, global),
    }
}

fn generators(cfg: &RunConfig) -> Result<GeneratorSet, Failure> {
    let gens = GeneratorSet::parse(&cfg.generators)?;
    if gens.dim() != cfg.d {
        return Err(Failure::Invalid(format!(
            "generators {} are {}×{} but d = {}",
            cfg.generators,
            gens.dim(),
            gens.dim(),
            cfg.d
        )));
    }
    Ok(gens)
}

fn enumerate(cfg: &RunConfig, n: u32) -> Result<FiniteGroup, Failure> {
    Ok(FiniteGroup::enumerate(cfg.d, n, cfg.enumeration_budget)?)
}

fn require_moduli(cfg: &RunConfig, flag: &str) -> Result<(), Failure> {
    if cfg.moduli.is_empty() {
        return Err(Failure::Invalid(format!("{flag} is required")));
    }
    Ok(())
}

/// The `(n, m)` experiment described by `cfg`.
fn experiment(cfg: &RunConfig, n: u32, m: u32) -> Result<ExperimentConfig, Failure> {
    let exp = ExperimentConfig {
        d: cfg.d,
        n,
        m,
        generators: generators(cfg)?,
        k: cfg.k,
        steps: cfg.steps,
        eps_assumed: cfg.epsilon,
        enumeration_budget: cfg.enumeration_budget,
        search: SearchOptions { budget: cfg.step_budget, restarts: cfg.restarts, moves: cfg.moves, seed: cfg.seed },
    };
    exp.validate()?;
    Ok(exp)
}
