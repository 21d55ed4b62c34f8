//! Functions on finite groups, convolution, and the mixing inequalities of
//! quasirandom groups.
//!
//! Conventions: `E ζ = (1/|G|) Σ ζ(x)` is normalized while
//! `‖ζ‖₂ = (Σ |ζ(x)|²)^{1/2}` is not.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{smallest_prime_factor, FiniteGroup};
use crate::rational::Q;

/// Value type of a [`GroupFunction`]: reals, complex numbers, or exact rationals.
pub trait Scalar:
    Copy + Send + Sync + Zero + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self>
{
    fn from_count(n: u64) -> Self;
    fn div_count(self, n: u64) -> Self;
    fn abs_sq(&self) -> f64;
}

impl Scalar for f64 {
    fn from_count(n: u64) -> Self {
        n as f64
    }
    fn div_count(self, n: u64) -> Self {
        self / n as f64
    }
    fn abs_sq(&self) -> f64 {
        self * self
    }
}

impl Scalar for Complex64 {
    fn from_count(n: u64) -> Self {
        Complex64::new(n as f64, 0.0)
    }
    fn div_count(self, n: u64) -> Self {
        self / n as f64
    }
    fn abs_sq(&self) -> f64 {
        self.norm_sqr()
    }
}

impl Scalar for Q {
    fn from_count(n: u64) -> Self {
        Q::from_integer(n as i128)
    }
    fn div_count(self, n: u64) -> Self {
        self / Q::from_integer(n as i128)
    }
    fn abs_sq(&self) -> f64 {
        crate::rational::to_f64(&(self * self))
    }
}

/// A map `G → T`, indexed by the canonical element order of `G`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupFunction<T> {
    d: usize,
    n: u32,
    values: Vec<T>,
}

impl<T: Scalar> GroupFunction<T> {
    pub fn new(g: &FiniteGroup, values: Vec<T>) -> Result<Self> {
        if values.len() != g.order() {
            return Err(Error::SizeMismatch { expected: g.order(), found: values.len() });
        }
        Ok(Self { d: g.dim(), n: g.modulus(), values })
    }

    pub fn constant(g: &FiniteGroup, c: T) -> Self {
        Self { d: g.dim(), n: g.modulus(), values: vec![c; g.order()] }
    }

    /// Indicator of the element at index `at`.
    pub fn delta(g: &FiniteGroup, at: usize) -> Self {
        let mut f = Self::constant(g, T::zero());
        f.values[at] = T::from_count(1);
        f
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn check_on(&self, g: &FiniteGroup) -> Result<()> {
        if self.d != g.dim() || self.n != g.modulus() || self.values.len() != g.order() {
            return Err(Error::ShapeMismatch(format!(
                "function on SL_{}(Z/{}Z) used on SL_{}(Z/{}Z)",
                self.d,
                self.n,
                g.dim(),
                g.modulus()
            )));
        }
        Ok(())
    }

    pub fn sum(&self) -> T {
        self.values.iter().fold(T::zero(), |acc, &v| acc + v)
    }

    pub fn expectation(&self) -> T {
        self.sum().div_count(self.values.len() as u64)
    }

    pub fn norm2_sq(&self) -> f64 {
        self.values.iter().map(|v| v.abs_sq()).sum()
    }

    pub fn norm2(&self) -> f64 {
        self.norm2_sq().sqrt()
    }

    pub fn norm_inf(&self) -> f64 {
        self.values.iter().map(|v| v.abs_sq().sqrt()).fold(0.0, f64::max)
    }

    /// `ζ − Eζ`.
    pub fn centered(&self) -> Self {
        let e = self.expectation();
        self.map(|v| v - e)
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self { d: self.d, n: self.n, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn scale(&self, c: T) -> Self {
        self.map(|v| v * c)
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        if self.d != other.d || self.n != other.n || self.len() != other.len() {
            return Err(Error::ShapeMismatch("functions on different groups".into()));
        }
        Ok(Self {
            d: self.d,
            n: self.n,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }
}

/// `(ζ ∗ η)(x) = Σ_{ab = x} ζ(a) η(b)`. Zero entries of the sparser argument
/// are skipped, so small-support inputs cost `O(|supp| · |G|)`.
pub fn conv<T: Scalar>(g: &FiniteGroup, zeta: &GroupFunction<T>, eta: &GroupFunction<T>) -> Result<GroupFunction<T>> {
    zeta.check_on(g)?;
    eta.check_on(g)?;
    let ord = g.order();
    let table = g.mul_table();
    let mut out = vec![T::zero(); ord];
    let supp_z: Vec<usize> = (0..ord).filter(|&a| !zeta.values[a].is_zero()).collect();
    let supp_e: Vec<usize> = (0..ord).filter(|&b| !eta.values[b].is_zero()).collect();
    if supp_z.len() <= supp_e.len() {
        for &a in &supp_z {
            let za = zeta.values[a];
            let row = &table[a * ord..(a + 1) * ord];
            for &b in &supp_e {
                let x = row[b] as usize;
                out[x] = out[x] + za * eta.values[b];
            }
        }
    } else {
        for &b in &supp_e {
            let eb = eta.values[b];
            for &a in &supp_z {
                let x = table[a * ord + b] as usize;
                out[x] = out[x] + zeta.values[a] * eb;
            }
        }
    }
    GroupFunction::new(g, out)
}

/// `π_* ξ` on `G_n`: `(π_* ξ)(c) = Σ_{π(b) = c} ξ(b)`. `red` is the
/// reduction table `G_m → G_n`.
pub fn pushforward<T: Scalar>(gn: &FiniteGroup, gm: &FiniteGroup, red: &[u32], xi: &GroupFunction<T>) -> Result<GroupFunction<T>> {
    xi.check_on(gm)?;
    if red.len() != gm.order() {
        return Err(Error::SizeMismatch { expected: gm.order(), found: red.len() });
    }
    let mut out = vec![T::zero(); gn.order()];
    for (b, &c) in red.iter().enumerate() {
        out[c as usize] = out[c as usize] + xi.values[b];
    }
    GroupFunction::new(gn, out)
}

/// `(ζ ⊛ ξ)(x) = Σ_{a π_n(b) = x} ζ(a) ξ(b)` for `ζ` on `G_n`, `ξ` on `G_m`,
/// computed as `ζ ∗ π_* ξ`.
pub fn circled_conv<T: Scalar>(
    gn: &FiniteGroup,
    gm: &FiniteGroup,
    zeta: &GroupFunction<T>,
    xi: &GroupFunction<T>,
) -> Result<GroupFunction<T>> {
    if !gm.modulus().is_multiple_of(gn.modulus()) {
        return Err(Error::NotDivisible { n: gn.modulus(), m: gm.modulus() });
    }
    let red = gm.reduction_to(gn)?;
    let pushed = pushforward(gn, gm, &red, xi)?;
    conv(gn, zeta, &pushed)
}

/// `max(1, (p − 1)/2)` with `p` the smallest prime divisor of `n`:
/// `SL_d(Z/nZ)` is `(p−1)/2`-quasirandom.
pub fn quasirandomness_bound(n: u32) -> Result<Q> {
    let p = smallest_prime_factor(n)
        .ok_or_else(|| Error::InvalidArgument(format!("modulus must be at least 2, got {n}")))?;
    Ok(Q::new(p as i128 - 1, 2).max(Q::from_integer(1)))
}

/// Slack allowed on the ratio side of every floating-point inequality check.
pub const MIXING_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixingReport {
    pub n: u32,
    pub order: usize,
    #[serde(with = "crate::rational")]
    pub quasirandomness: Q,
    pub trials: usize,
    /// `max ‖ζ∗η‖₂ / (√(|G|/D) ‖ζ‖₂ ‖η‖₂)` over the trials.
    pub max_ratio: f64,
    pub pass: bool,
}

fn gaussian(len: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..len).map(|_| StandardNormal.sample(rng)).collect()
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ trial as u64)
}

fn to_f64(q: &Q) -> f64 {
    crate::rational::to_f64(q)
}

/// Checks `‖ζ ∗ η‖₂ ≤ √(|G|/D) ‖ζ‖₂ ‖η‖₂` on random mean-zero pairs
/// (Gaussian entries, then centered). Trial `t` draws from the seed
/// `seed ⊕ t`, so the result does not depend on scheduling.
pub fn mixing_check(g: &FiniteGroup, quasirandomness: Q, trials: usize, seed: u64) -> Result<MixingReport> {
    if quasirandomness < Q::from_integer(1) {
        return Err(Error::InvalidArgument("quasirandomness bound must be at least 1".into()));
    }
    let scale = (g.order() as f64 / to_f64(&quasirandomness)).sqrt();
    g.mul_table();
    let ratios = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let zeta = GroupFunction::new(g, gaussian(g.order(), &mut rng))?.centered();
            let eta = GroupFunction::new(g, gaussian(g.order(), &mut rng))?.centered();
            let c = conv(g, &zeta, &eta)?;
            Ok(c.norm2() / (scale * zeta.norm2() * eta.norm2()))
        })
        .collect::<Result<Vec<f64>>>()?;
    let max_ratio = ratios.into_iter().fold(0.0, f64::max);
    Ok(MixingReport {
        n: g.modulus(),
        order: g.order(),
        quasirandomness,
        trials,
        max_ratio,
        pass: max_ratio <= 1.0 + MIXING_TOLERANCE,
    })
}

/// Pushes the mixing ratio towards its maximum by alternating power
/// iteration: with one argument fixed, the other becomes the top singular
/// vector of the (linear) convolution map on mean-zero functions. Returns
/// the normalized ratio reached; reported, not asserted.
pub fn adversarial_mixing_ratio(g: &FiniteGroup, quasirandomness: Q, rounds: usize, seed: u64) -> Result<f64> {
    let ord = g.order();
    let table = g.mul_table();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut zeta = GroupFunction::new(g, gaussian(ord, &mut rng))?.centered();
    let mut eta = GroupFunction::new(g, gaussian(ord, &mut rng))?.centered();

    // adjoints of ζ ↦ ζ∗η and η ↦ ζ∗η
    let adj_left = |eta: &GroupFunction<f64>, w: &[f64]| -> Vec<f64> {
        (0..ord)
            .map(|a| (0..ord).map(|b| eta.values[b] * w[table[a * ord + b] as usize]).sum())
            .collect()
    };
    let adj_right = |zeta: &GroupFunction<f64>, w: &[f64]| -> Vec<f64> {
        (0..ord)
            .map(|b| (0..ord).map(|a| zeta.values[a] * w[table[a * ord + b] as usize]).sum())
            .collect()
    };
    let renorm = |f: GroupFunction<f64>| -> GroupFunction<f64> {
        let c = f.centered();
        let norm = c.norm2();
        if norm > 0.0 {
            c.scale(1.0 / norm)
        } else {
            c
        }
    };
    zeta = renorm(zeta);
    eta = renorm(eta);
    for _ in 0..rounds {
        for _ in 0..8 {
            let w = conv(g, &zeta, &eta)?;
            zeta = renorm(GroupFunction::new(g, adj_left(&eta, w.values()))?);
        }
        for _ in 0..8 {
            let w = conv(g, &zeta, &eta)?;
            eta = renorm(GroupFunction::new(g, adj_right(&zeta, w.values()))?);
        }
    }
    let scale = (ord as f64 / to_f64(&quasirandomness)).sqrt();
    let c = conv(g, &zeta, &eta)?;
    Ok(c.norm2() / (scale * zeta.norm2() * eta.norm2()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripleMixingReport {
    pub n: u32,
    pub m: u32,
    pub smallest_prime: u32,
    pub trials: usize,
    /// `max LHS/RHS` over the trials (0 when every right side vanishes).
    pub max_ratio: f64,
    pub pass: bool,
}

/// Left and right sides of
/// `‖(ζ∗η)⊛ξ − (Eζ)(Eη)(Eξ)|G_n||G_m|‖_∞ ≤ √(2|G_m|/(p−1)) ‖ζ‖₂‖η‖₂‖ξ‖₂`.
pub fn triple_mixing_sides(
    gn: &FiniteGroup,
    gm: &FiniteGroup,
    zeta: &GroupFunction<f64>,
    eta: &GroupFunction<f64>,
    xi: &GroupFunction<f64>,
) -> Result<(f64, f64)> {
    let p = smallest_prime_factor(gn.modulus()).expect("modulus at least 2");
    let lhs_fn = circled_conv(gn, gm, &conv(gn, zeta, eta)?, xi)?;
    let centre = zeta.expectation() * eta.expectation() * xi.expectation() * (gn.order() * gm.order()) as f64;
    let lhs = lhs_fn.values().iter().map(|v| (v - centre).abs()).fold(0.0, f64::max);
    let rhs = (2.0 * gm.order() as f64 / (p as f64 - 1.0)).sqrt() * zeta.norm2() * eta.norm2() * xi.norm2();
    Ok((lhs, rhs))
}

/// Checks the triple-convolution inequality on random triples whose entries
/// are Gaussian with a random offset, so the means are generally nonzero.
pub fn triple_mixing_check(gn: &FiniteGroup, gm: &FiniteGroup, trials: usize, seed: u64) -> Result<TripleMixingReport> {
    if !gm.modulus().is_multiple_of(gn.modulus()) {
        return Err(Error::NotDivisible { n: gn.modulus(), m: gm.modulus() });
    }
    gn.mul_table();
    let ratios = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let mut draw = |g: &FiniteGroup| -> Result<GroupFunction<f64>> {
                let offset: f64 = StandardNormal.sample(&mut rng);
                GroupFunction::new(g, gaussian(g.order(), &mut rng).into_iter().map(|v| v + offset).collect())
            };
            let zeta = draw(gn)?;
            let eta = draw(gn)?;
            let xi = draw(gm)?;
            let (lhs, rhs) = triple_mixing_sides(gn, gm, &zeta, &eta, &xi)?;
            Ok(if rhs > 0.0 { lhs / rhs } else if lhs == 0.0 { 0.0 } else { f64::INFINITY })
        })
        .collect::<Result<Vec<f64>>>()?;
    let max_ratio = ratios.into_iter().fold(0.0, f64::max);
    Ok(TripleMixingReport {
        n: gn.modulus(),
        m: gm.modulus(),
        smallest_prime: smallest_prime_factor(gn.modulus()).expect("modulus at least 2"),
        trials,
        max_ratio,
        pass: max_ratio <= 1.0 + MIXING_TOLERANCE,
    })
}
