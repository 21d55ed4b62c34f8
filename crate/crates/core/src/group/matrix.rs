use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Laplace expansion is used for determinants and cofactors mod `n`.
const MAX_DIM: usize = 8;

/// A square integer matrix of determinant 1, i.e. an element of `SL_d(Z)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix {
    d: usize,
    entries: Vec<i64>,
}

impl IntMatrix {
    pub fn new(d: usize, entries: Vec<i64>) -> Result<Self> {
        check_shape(d, entries.len())?;
        let det = det_int(d, &entries);
        if det != 1 {
            return Err(Error::NotUnimodular { det });
        }
        Ok(Self { d, entries })
    }

    pub fn identity(d: usize) -> Self {
        let mut entries = vec![0; d * d];
        for i in 0..d {
            entries[i * d + i] = 1;
        }
        Self { d, entries }
    }

    /// Parses row-major `"1,2;0,1"` notation.
    pub fn parse(s: &str) -> Result<Self> {
        let rows: Vec<Vec<i64>> = s
            .split(';')
            .map(|row| {
                row.split(',')
                    .map(|e| {
                        e.trim()
                            .parse::<i64>()
                            .map_err(|_| Error::InvalidMatrix(format!("bad entry {e:?} in {s:?}")))
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidMatrix(format!("{s:?} is not square")));
        }
        Self::new(d, rows.into_iter().flatten().collect())
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch(self.d, other.d));
        }
        let d = self.d;
        let mut out = vec![0i64; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.entries[i * d + k];
                if a == 0 {
                    continue;
                }
                for j in 0..d {
                    out[i * d + j] += a * other.entries[k * d + j];
                }
            }
        }
        Ok(IntMatrix { d, entries: out })
    }

    /// The inverse, which is the adjugate since the determinant is 1.
    pub fn inverse(&self) -> IntMatrix {
        let d = self.d;
        let mut out = vec![0i64; d * d];
        let mut minor = Vec::with_capacity((d - 1) * (d - 1));
        for i in 0..d {
            for j in 0..d {
                minor_into(d, &self.entries, j, i, &mut minor);
                let c = det_int(d - 1, &minor) as i64;
                out[i * d + j] = if (i + j) % 2 == 0 { c } else { -c };
            }
        }
        IntMatrix { d, entries: out }
    }

    /// Reduction `π_n` into `SL_d(Z/nZ)`.
    pub fn reduce(&self, n: u32) -> Result<ModMatrix> {
        ModMatrix::new(self.d, n, self.entries.clone())
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_rows(f, self.d, &self.entries)
    }
}

/// An element of `SL_d(Z/nZ)` with entries reduced into `[0, n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModMatrix {
    d: usize,
    n: u32,
    entries: Vec<u32>,
}

impl ModMatrix {
    /// Reduces `entries` mod `n` and checks `det ≡ 1 (mod n)`.
    pub fn new(d: usize, n: u32, entries: Vec<i64>) -> Result<Self> {
        check_shape(d, entries.len())?;
        if n < 2 {
            return Err(Error::InvalidArgument(format!("modulus must be at least 2, got {n}")));
        }
        let entries: Vec<u32> = entries.iter().map(|&e| e.rem_euclid(n as i64) as u32).collect();
        let det = det_mod(d, n, &entries);
        if det != 1 {
            return Err(Error::NotUnimodular { det: det as i128 });
        }
        Ok(Self { d, n, entries })
    }

    pub(crate) fn from_reduced(d: usize, n: u32, entries: Vec<u32>) -> Self {
        debug_assert_eq!(det_mod(d, n, &entries), 1);
        Self { d, n, entries }
    }

    pub fn identity(d: usize, n: u32) -> Self {
        let mut entries = vec![0; d * d];
        for i in 0..d {
            entries[i * d + i] = 1;
        }
        Self { d, n, entries }
    }

    /// The transvection with `a` at position `(i, j)`, `i != j`.
    pub fn elementary(d: usize, n: u32, i: usize, j: usize, a: u32) -> Self {
        assert!(i != j && i < d && j < d);
        let mut m = Self::identity(d, n);
        m.entries[i * d + j] = a % n;
        m
    }

    pub fn parse(s: &str, n: u32) -> Result<Self> {
        let rows: Vec<Vec<i64>> = s
            .split(';')
            .map(|row| {
                row.split(',')
                    .map(|e| {
                        e.trim()
                            .parse::<i64>()
                            .map_err(|_| Error::InvalidMatrix(format!("bad entry {e:?} in {s:?}")))
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidMatrix(format!("{s:?} is not square")));
        }
        Self::new(d, n, rows.into_iter().flatten().collect())
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn modulus(&self) -> u32 {
        self.n
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn det(&self) -> u32 {
        det_mod(self.d, self.n, &self.entries)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.d, self.n)
    }

    pub fn mul(&self, other: &ModMatrix) -> Result<ModMatrix> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch(self.d, other.d));
        }
        if self.n != other.n {
            return Err(Error::ModulusMismatch(self.n, other.n));
        }
        let mut out = vec![0; self.d * self.d];
        mul_into(self.d, self.n, &self.entries, &other.entries, &mut out);
        Ok(ModMatrix { d: self.d, n: self.n, entries: out })
    }

    /// Two-sided inverse. For `d = 2` this is the swap-and-negate adjugate;
    /// in general the adjugate by cofactors, since `det = 1`.
    pub fn inv(&self) -> ModMatrix {
        let (d, n) = (self.d, self.n);
        let e = &self.entries;
        let neg = |x: u32| if x == 0 { 0 } else { n - x };
        let entries = if d == 2 {
            vec![e[3], neg(e[1]), neg(e[2]), e[0]]
        } else {
            let mut out = vec![0u32; d * d];
            let mut minor = Vec::with_capacity((d - 1) * (d - 1));
            for i in 0..d {
                for j in 0..d {
                    minor_into(d, e, j, i, &mut minor);
                    let c = det_mod(d - 1, n, &minor);
                    out[i * d + j] = if (i + j) % 2 == 0 { c } else { neg(c) };
                }
            }
            out
        };
        ModMatrix { d, n, entries }
    }

    /// Reduction `π_target` into `SL_d(Z/target Z)`; requires `target | n`.
    pub fn reduce(&self, target: u32) -> Result<ModMatrix> {
        if target < 2 || !self.n.is_multiple_of(target) {
            return Err(Error::NotDivisible { n: target, m: self.n });
        }
        Ok(ModMatrix {
            d: self.d,
            n: target,
            entries: self.entries.iter().map(|&e| e % target).collect(),
        })
    }

    /// Mixed-radix code of the entry vector; preserves lexicographic order.
    pub(crate) fn code(&self) -> u64 {
        encode(self.n, &self.entries)
    }
}

impl fmt::Display for ModMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_rows(f, self.d, &self.entries)?;
        write!(f, " (mod {})", self.n)
    }
}

fn write_rows<T: fmt::Display>(f: &mut fmt::Formatter<'_>, d: usize, entries: &[T]) -> fmt::Result {
    for i in 0..d {
        if i > 0 {
            write!(f, ";")?;
        }
        for j in 0..d {
            if j > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", entries[i * d + j])?;
        }
    }
    Ok(())
}

fn check_shape(d: usize, len: usize) -> Result<()> {
    if !(2..=MAX_DIM).contains(&d) {
        return Err(Error::InvalidMatrix(format!("dimension {d} outside 2..={MAX_DIM}")));
    }
    if len != d * d {
        return Err(Error::InvalidMatrix(format!("{len} entries for a {d}x{d} matrix")));
    }
    Ok(())
}

pub(crate) fn mul_into(d: usize, n: u32, a: &[u32], b: &[u32], out: &mut [u32]) {
    let n = n as u64;
    for i in 0..d {
        for j in 0..d {
            let mut acc = 0u64;
            for k in 0..d {
                acc += a[i * d + k] as u64 * b[k * d + j] as u64;
                if acc >= 1 << 62 {
                    acc %= n;
                }
            }
            out[i * d + j] = (acc % n) as u32;
        }
    }
}

pub(crate) fn encode(n: u32, entries: &[u32]) -> u64 {
    entries.iter().fold(0u64, |acc, &e| acc * n as u64 + e as u64)
}

pub(crate) fn decode(n: u32, mut code: u64, out: &mut [u32]) {
    for slot in out.iter_mut().rev() {
        *slot = (code % n as u64) as u32;
        code /= n as u64;
    }
}

fn minor_into<T: Copy>(d: usize, m: &[T], row: usize, col: usize, out: &mut Vec<T>) {
    out.clear();
    for i in (0..d).filter(|&i| i != row) {
        for j in (0..d).filter(|&j| j != col) {
            out.push(m[i * d + j]);
        }
    }
}

/// Exact integer determinant by fraction-free (Bareiss) elimination.
fn det_int(d: usize, m: &[i64]) -> i128 {
    if d == 0 {
        return 1;
    }
    let mut a: Vec<i128> = m.iter().map(|&x| x as i128).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..d - 1 {
        if a[k * d + k] == 0 {
            match (k + 1..d).find(|&r| a[r * d + k] != 0) {
                Some(r) => {
                    for j in 0..d {
                        a.swap(k * d + j, r * d + j);
                    }
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..d {
            for j in k + 1..d {
                a[i * d + j] = (a[i * d + j] * a[k * d + k] - a[i * d + k] * a[k * d + j]) / prev;
            }
        }
        prev = a[k * d + k];
    }
    sign * a[d * d - 1]
}

/// Determinant over `Z/nZ` by Laplace expansion along the first row.
fn det_mod(d: usize, n: u32, m: &[u32]) -> u32 {
    match d {
        0 => 1 % n,
        1 => m[0] % n,
        2 => {
            let n = n as u64;
            let pos = m[0] as u64 * m[3] as u64 % n;
            let neg = m[1] as u64 * m[2] as u64 % n;
            ((pos + n - neg) % n) as u32
        }
        _ => {
            let nn = n as u64;
            let mut acc = 0u64;
            let mut minor = Vec::with_capacity((d - 1) * (d - 1));
            for j in 0..d {
                if m[j] == 0 {
                    continue;
                }
                minor_into(d, m, 0, j, &mut minor);
                let term = m[j] as u64 * det_mod(d - 1, n, &minor) as u64 % nn;
                acc = if j % 2 == 0 { (acc + term) % nn } else { (acc + nn - term) % nn };
            }
            acc as u32
        }
    }
}
