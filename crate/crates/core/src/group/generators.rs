use serde::{Deserialize, Serialize};

use super::matrix::{IntMatrix, ModMatrix};
use crate::error::{Error, Result};

/// A finite symmetric subset `S` of `SL_d(Z)` with labelled elements and an
/// explicit inverse pairing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSet {
    symbols: Vec<String>,
    matrices: Vec<IntMatrix>,
    inverse: Vec<usize>,
}

impl GeneratorSet {
    pub fn new(symbols: Vec<String>, matrices: Vec<IntMatrix>, inverse: Vec<usize>) -> Result<Self> {
        let k = symbols.len();
        if k == 0 {
            return Err(Error::InvalidGenerators("empty generator set".into()));
        }
        if matrices.len() != k || inverse.len() != k {
            return Err(Error::InvalidGenerators("symbol, matrix and pairing counts differ".into()));
        }
        let d = matrices[0].dim();
        if matrices.iter().any(|m| m.dim() != d) {
            return Err(Error::InvalidGenerators("matrices of different dimensions".into()));
        }
        for (i, &j) in inverse.iter().enumerate() {
            if j >= k || inverse[j] != i {
                return Err(Error::InvalidGenerators(format!("pairing is not an involution at {i}")));
            }
            if matrices[i].mul(&matrices[j])? != IntMatrix::identity(d) {
                return Err(Error::InvalidGenerators(format!(
                    "{} and {} are not inverse to each other",
                    symbols[i], symbols[j]
                )));
            }
        }
        for i in 0..k {
            for j in 0..i {
                if matrices[i] == matrices[j] {
                    return Err(Error::InvalidGenerators(format!("duplicate matrix {}", matrices[i])));
                }
                if symbols[i] == symbols[j] {
                    return Err(Error::InvalidGenerators(format!("duplicate symbol {}", symbols[i])));
                }
            }
        }
        Ok(Self { symbols, matrices, inverse })
    }

    /// Symmetrizes a list of named matrices: each matrix is followed by its
    /// inverse (labelled `<name>^-1`) unless the inverse is already present.
    pub fn symmetric_closure(named: Vec<(String, IntMatrix)>) -> Result<Self> {
        let mut symbols = Vec::new();
        let mut matrices: Vec<IntMatrix> = Vec::new();
        for (name, m) in named {
            if matrices.contains(&m) {
                continue;
            }
            symbols.push(name.clone());
            matrices.push(m.clone());
            let inv = m.inverse();
            if !matrices.contains(&inv) {
                symbols.push(format!("{name}^-1"));
                matrices.push(inv);
            }
        }
        let inverse = matrices
            .iter()
            .map(|m| {
                let inv = m.inverse();
                matrices.iter().position(|x| *x == inv).expect("closure contains inverses")
            })
            .collect();
        Self::new(symbols, matrices, inverse)
    }

    /// The Sanov pair `[[1,2],[0,1]]`, `[[1,0],[2,1]]` with their inverses.
    pub fn sanov() -> Self {
        let a = IntMatrix::parse("1,2;0,1").expect("valid");
        let b = IntMatrix::parse("1,0;2,1").expect("valid");
        Self::symmetric_closure(vec![("a".into(), a), ("b".into(), b)]).expect("valid")
    }

    /// `"sanov"` or matrices in `"1,2;0,1"` notation separated by `|`.
    /// Explicit matrices are symmetrized and labelled `g0, g1, ...`.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if spec.eq_ignore_ascii_case("sanov") {
            return Ok(Self::sanov());
        }
        let named = spec
            .split('|')
            .enumerate()
            .map(|(i, s)| Ok((format!("g{i}"), IntMatrix::parse(s)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::symmetric_closure(named)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.matrices[0].dim()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn matrices(&self) -> &[IntMatrix] {
        &self.matrices
    }

    pub fn inverse_of(&self, i: usize) -> usize {
        self.inverse[i]
    }

    pub fn inverse_pairing(&self) -> &[usize] {
        &self.inverse
    }

    /// `π_n(S)`, one reduced matrix per symbol.
    pub fn reduce(&self, n: u32) -> Result<Vec<ModMatrix>> {
        self.matrices.iter().map(|m| m.reduce(n)).collect()
    }

    pub fn describe(&self) -> String {
        self.symbols
            .iter()
            .zip(&self.matrices)
            .map(|(s, m)| format!("{s}=[{m}]"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sanov_is_symmetric() {
        let s = GeneratorSet::sanov();
        assert_eq!(s.len(), 4);
        assert_eq!(s.symbols(), &["a", "a^-1", "b", "b^-1"]);
        for i in 0..4 {
            let j = s.inverse_of(i);
            assert_eq!(s.inverse_of(j), i);
            assert_eq!(s.matrices()[i].mul(&s.matrices()[j]).unwrap(), IntMatrix::identity(2));
        }
    }

    #[test]
    fn involutions_pair_with_themselves() {
        let s = GeneratorSet::parse("0,1;-1,0|0,-1;1,0").unwrap();
        assert_eq!(s.len(), 2);
        let w = GeneratorSet::parse("-1,0;0,-1").unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w.inverse_of(0), 0);
    }

    #[test]
    fn rejects_bad_sets() {
        let a = IntMatrix::parse("1,2;0,1").unwrap();
        let err = GeneratorSet::new(vec!["a".into()], vec![a.clone()], vec![0]);
        assert!(err.is_err());
        let err = GeneratorSet::new(
            vec!["a".into(), "b".into()],
            vec![a.clone(), a.clone()],
            vec![1, 0],
        );
        assert!(err.is_err());
        assert!(GeneratorSet::parse("1,2;0,1|2,0;0,1").is_err());
    }

    #[test]
    fn explicit_sanov_matches_preset() {
        let s = GeneratorSet::parse("1,2;0,1|1,0;2,1").unwrap();
        assert_eq!(s.matrices(), GeneratorSet::sanov().matrices());
    }
}
