//! Small hand-built actions used as fixtures and exhaustive oracles.

use super::{FiniteAction, Provenance};
use crate::error::{Error, Result};

/// `Z/k` acting on itself by all nonzero translations `+s`, paired `+s ↔ +(k-s)`.
/// The Schreier graph is the complete graph on `k` vertices.
pub fn complete(k: usize) -> FiniteAction {
    assert!(k >= 2);
    let symbols = (1..k).map(|s| format!("+{s}")).collect();
    let inverse = (1..k).map(|s| k - s - 1).collect();
    let perms = (1..k)
        .map(|s| (0..k).map(|x| ((x + s) % k) as u32).collect())
        .collect();
    FiniteAction::new(k, symbols, inverse, perms, Provenance::Toy(format!("complete{k}")))
        .expect("valid toy action")
}

/// `Z/k` with the generators `+1`, `-1`.
pub fn cycle(k: usize) -> FiniteAction {
    assert!(k >= 1);
    let plus = (0..k).map(|x| ((x + 1) % k) as u32).collect();
    let minus = (0..k).map(|x| ((x + k - 1) % k) as u32).collect();
    FiniteAction::new(
        k,
        vec!["+1".into(), "-1".into()],
        vec![1, 0],
        vec![plus, minus],
        Provenance::Toy(format!("cycle{k}")),
    )
    .expect("valid toy action")
}

/// Two points swapped by one involutive symbol.
pub fn swap() -> FiniteAction {
    FiniteAction::new(2, vec!["s".into()], vec![0], vec![vec![1, 0]], Provenance::Toy("swap".into()))
        .expect("valid toy action")
}

/// Disjoint union of two cycles, with the `+1`/`-1` symbols of [`cycle`].
pub fn two_cycles(k1: usize, k2: usize) -> FiniteAction {
    let k = k1 + k2;
    let shift = |step: isize| -> Vec<u32> {
        (0..k)
            .map(|x| {
                let (base, len) = if x < k1 { (0, k1) } else { (k1, k2) };
                (base + ((x - base) as isize + step).rem_euclid(len as isize) as usize) as u32
            })
            .collect()
    };
    FiniteAction::new(
        k,
        vec!["+1".into(), "-1".into()],
        vec![1, 0],
        vec![shift(1), shift(-1)],
        Provenance::Toy(format!("two-cycles{k1}-{k2}")),
    )
    .expect("valid toy action")
}

/// Fixture by name: `swap`, `complete<k>`, `cycle<k>`, `two-cycles<a>-<b>`.
pub fn by_name(name: &str) -> Result<FiniteAction> {
    let bad = || Error::InvalidArgument(format!("unknown toy action {name:?}"));
    let num = |s: &str| s.parse::<usize>().map_err(|_| bad());
    if name == "swap" {
        Ok(swap())
    } else if let Some(k) = name.strip_prefix("complete") {
        let k = num(k)?;
        if !(2..=12).contains(&k) {
            return Err(bad());
        }
        Ok(complete(k))
    } else if let Some(rest) = name.strip_prefix("two-cycles") {
        let (a, b) = rest.split_once('-').ok_or_else(bad)?;
        let (a, b) = (num(a)?, num(b)?);
        if a == 0 || b == 0 {
            return Err(bad());
        }
        Ok(two_cycles(a, b))
    } else if let Some(k) = name.strip_prefix("cycle") {
        let k = num(k)?;
        if k == 0 {
            return Err(bad());
        }
        Ok(cycle(k))
    } else {
        Err(bad())
    }
}
