//! Finite quadratic modules `(T, q)` and their Gauss sums.
//!
//! For a surgery matrix `L` the torsion group is `T = ℤ^ρ / L_reg ℤ^ρ`, the linking form
//! is `λ([x],[y]) = xᵀ L_reg⁻¹ y mod 1` and the quadratic refinement is
//! `q([x]) = ½ xᵀ L_reg⁻¹ x`. All values are stored as exact exponents `e` standing for
//! `exp(2πi·e)`.
//!
//! When `L_reg` has an odd diagonal entry, `½ xᵀ L_reg⁻¹ x` moves by half-integers under
//! a change of lift, so `q` is only well defined mod ½ on classes. Here `q` is evaluated on
//! the canonical lift `Σ aᵢ gᵢ` with `0 <= aᵢ < dᵢ`. Anything multiplied by an even level
//! `k`, which covers the Gauss sum, is independent of that choice.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intlinalg::{
    cokernel, inverse_form_value, regular_decomposition, solve_rational, CokernelGroup,
    IntSymMatrix, MAX_GROUP_ORDER,
};
use crate::numeric::{ApproxComplex, Rational, UnitPhase};

pub(crate) fn check_level(k: u64) -> Result<()> {
    if k == 0 || k % 2 != 0 {
        Err(Error::InvalidLevel(k))
    } else {
        Ok(())
    }
}

/// Surgery data a module was built from, kept so `q` can be evaluated on arbitrary lifts.
#[derive(Clone, Debug)]
struct Lifting {
    regular: IntSymMatrix,
    group: CokernelGroup,
}

#[derive(Clone, Debug)]
pub struct FiniteQuadraticModule {
    orders: Vec<u64>,
    q_gen: Vec<Rational>,
    /// Symmetric, full `t × t`.
    lambda_gen: Vec<Vec<Rational>>,
    // integer form of the evaluation rule: every exponent is `num / denom`
    denom: u64,
    q_num: Vec<u64>,
    lambda_num: Vec<Vec<u64>>,
    lifting: Option<Lifting>,
}

impl FiniteQuadraticModule {
    /// Module on `⊕ ℤ/dᵢ` given by `q(gᵢ)` and `λ(gᵢ, gⱼ)` on the generators; values mod 1.
    pub fn from_generators(
        orders: Vec<u64>,
        q_gen: Vec<Rational>,
        lambda_gen: Vec<Vec<Rational>>,
    ) -> Result<Self> {
        let t = orders.len();
        if q_gen.len() != t || lambda_gen.len() != t || lambda_gen.iter().any(|r| r.len() != t) {
            return Err(Error::Parse(
                "generator data does not match the group rank".into(),
            ));
        }
        if orders.iter().any(|&d| d < 2) {
            return Err(Error::Parse("cyclic orders must be at least 2".into()));
        }
        let order = orders
            .iter()
            .try_fold(1u64, |acc, &d| acc.checked_mul(d))
            .filter(|&n| n <= MAX_GROUP_ORDER);
        if order.is_none() {
            return Err(Error::GroupTooLarge {
                order: orders
                    .iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join("*"),
                cap: MAX_GROUP_ORDER,
            });
        }
        for i in 0..t {
            for j in 0..i {
                if lambda_gen[i][j].fract_mod1() != lambda_gen[j][i].fract_mod1() {
                    return Err(Error::Parse(format!(
                        "linking values not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        let q_gen: Vec<Rational> = q_gen.iter().map(Rational::fract_mod1).collect();
        let lambda_gen: Vec<Vec<Rational>> = lambda_gen
            .iter()
            .map(|r| r.iter().map(Rational::fract_mod1).collect())
            .collect();

        let denom = q_gen
            .iter()
            .chain(lambda_gen.iter().flatten())
            .fold(BigInt::from(1), |acc, r| acc.lcm(r.denom()));
        let denom_u = denom
            .to_u64()
            .ok_or_else(|| Error::Parse("exponent denominators too large".into()))?;
        let scale = |r: &Rational| -> u64 {
            (r.numer() * (&denom / r.denom()))
                .to_u64()
                .expect("reduced numerator fits")
        };
        let q_num = q_gen.iter().map(scale).collect();
        let lambda_num = lambda_gen
            .iter()
            .map(|r| r.iter().map(scale).collect())
            .collect();
        Ok(FiniteQuadraticModule {
            orders,
            q_gen,
            lambda_gen,
            denom: denom_u,
            q_num,
            lambda_num,
            lifting: None,
        })
    }

    /// Torsion module of the surgery presentation with linking matrix `l`. Degenerate `l`
    /// is fine: only its regular block enters.
    pub fn from_surgery(l: &IntSymMatrix) -> Result<Self> {
        let regular = regular_decomposition(l).regular;
        let group = cokernel(&regular)?;
        group.enumerable_order()?;
        let t = group.rank();
        let inv_g: Vec<Vec<Rational>> = group
            .generator_reps
            .iter()
            .map(|g| {
                let rhs: Vec<Rational> = g.iter().cloned().map(Rational::from).collect();
                solve_rational(&regular, &rhs).ok_or(Error::DegenerateMatrix)
            })
            .collect::<Result<_>>()?;
        let pair = |i: usize, j: usize| -> Rational {
            group.generator_reps[i]
                .iter()
                .zip(&inv_g[j])
                .fold(Rational::zero(), |acc, (a, b)| {
                    acc + Rational::from(a.clone()) * b
                })
        };
        let half = Rational::new(1, 2);
        let q_gen = (0..t).map(|i| &half * &pair(i, i)).collect();
        let lambda_gen = (0..t)
            .map(|i| (0..t).map(|j| pair(i, j)).collect())
            .collect();
        let mut module =
            FiniteQuadraticModule::from_generators(group.orders_u64(), q_gen, lambda_gen)?;
        module.lifting = Some(Lifting { regular, group });
        Ok(module)
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn order(&self) -> u64 {
        self.orders.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.orders.is_empty()
    }

    pub fn q_generators(&self) -> &[Rational] {
        &self.q_gen
    }

    pub fn lambda_generators(&self) -> &[Vec<Rational>] {
        &self.lambda_gen
    }

    /// Cokernel data, present for modules built from surgery.
    pub fn group(&self) -> Option<&CokernelGroup> {
        self.lifting.as_ref().map(|l| &l.group)
    }

    pub fn elements(&self) -> impl Iterator<Item = Vec<u64>> + '_ {
        let total = self.order();
        (0..total).map(move |mut idx| {
            let mut t = vec![0u64; self.orders.len()];
            for (slot, &d) in t.iter_mut().zip(&self.orders).rev() {
                *slot = idx % d;
                idx /= d;
            }
            t
        })
    }

    /// Numerator of `q(Σ aᵢ gᵢ)` over `denom`, in `[0, denom)`.
    fn q_numerator(&self, a: &[u64]) -> u64 {
        let n = self.denom as u128;
        let mut acc: u128 = 0;
        for i in 0..a.len() {
            let ai = a[i] as u128 % n;
            acc = (acc + ai * ai % n * self.q_num[i] as u128) % n;
            for j in i + 1..a.len() {
                let aj = a[j] as u128 % n;
                acc = (acc + ai * aj % n * self.lambda_num[i][j] as u128) % n;
            }
        }
        acc as u64
    }

    fn lambda_numerator(&self, a: &[u64], b: &[u64]) -> u64 {
        let n = self.denom as u128;
        let mut acc: u128 = 0;
        for i in 0..a.len() {
            for j in 0..b.len() {
                let t = (a[i] as u128 % n) * (b[j] as u128 % n) % n;
                acc = (acc + t * self.lambda_num[i][j] as u128) % n;
            }
        }
        acc as u64
    }

    /// `q` on a coefficient tuple, as an exponent in `[0, 1)`.
    pub fn q(&self, a: &[u64]) -> Rational {
        Rational::new(self.q_numerator(a), self.denom)
    }

    /// `λ` on coefficient tuples, as an exponent in `[0, 1)`.
    pub fn lambda(&self, a: &[u64], b: &[u64]) -> Rational {
        Rational::new(self.lambda_numerator(a, b), self.denom)
    }

    /// Componentwise sum reduced mod the cyclic orders.
    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter()
            .zip(b)
            .zip(&self.orders)
            .map(|((x, y), d)| (x + y) % d)
            .collect()
    }

    /// `½ xᵀ L_reg⁻¹ x mod 1` for an arbitrary lift `x ∈ ℤ^ρ`. Only for modules from surgery.
    pub fn q_of_lift(&self, x: &[BigInt]) -> Result<Rational> {
        let lifting = self
            .lifting
            .as_ref()
            .ok_or_else(|| Error::Parse("module carries no surgery lift data".into()))?;
        let v = inverse_form_value(&lifting.regular, x)?;
        Ok((Rational::new(1, 2) * v).fract_mod1())
    }

    /// `Σ_{x∈T} exp(2πi·sign·k·q(x))`, unnormalized. Residues are counted exactly first.
    pub fn phase_sum(&self, k: u64, sign: i64) -> ApproxComplex {
        let n = self.denom;
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        for a in self.elements() {
            let r = (self.q_numerator(&a) as u128 * k as u128 % n as u128) as u64;
            *counts.entry(r).or_default() += 1;
        }
        counts
            .into_iter()
            .map(|(r, c)| {
                let e = if sign < 0 { (n - r) % n } else { r };
                UnitPhase::from_ratio(e as i64, n as i64)
                    .eval()
                    .scale(c as f64)
            })
            .sum()
    }
}

/// `|T|^{-1/2} Σ_{x∈T} exp(2πi·k·q(x))` for even `k`.
pub fn gauss_sum(m: &FiniteQuadraticModule, k: u64) -> Result<ApproxComplex> {
    check_level(k)?;
    Ok(m.phase_sum(k, 1).scale(1.0 / (m.order() as f64).sqrt()))
}

#[derive(Serialize, Deserialize)]
struct ModuleRepr {
    orders: Vec<u64>,
    q_gen: Vec<(usize, Rational)>,
    lambda_gen: Vec<(usize, usize, Rational)>,
}

impl Serialize for FiniteQuadraticModule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let t = self.orders.len();
        ModuleRepr {
            orders: self.orders.clone(),
            q_gen: self.q_gen.iter().cloned().enumerate().collect(),
            lambda_gen: (0..t)
                .flat_map(|i| (i..t).map(move |j| (i, j)))
                .map(|(i, j)| (i, j, self.lambda_gen[i][j].clone()))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FiniteQuadraticModule {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = ModuleRepr::deserialize(d)?;
        let t = repr.orders.len();
        let mut q_gen = vec![Rational::zero(); t];
        for (i, v) in repr.q_gen {
            *q_gen
                .get_mut(i)
                .ok_or_else(|| D::Error::custom("q_gen index out of range"))? = v;
        }
        let mut lambda = vec![vec![Rational::zero(); t]; t];
        for (i, j, v) in repr.lambda_gen {
            if i >= t || j >= t {
                return Err(D::Error::custom("lambda_gen index out of range"));
            }
            lambda[i][j] = v.clone();
            lambda[j][i] = v;
        }
        FiniteQuadraticModule::from_generators(repr.orders, q_gen, lambda).map_err(D::Error::custom)
    }
}

/// The pointed data `(ℤ_k, q_k)` with `q_k(x) = x²/(2k)` and `Ω_k(x, y) = xy/k`, as exponents.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CyclicQuadraticData {
    k: u64,
}

impl CyclicQuadraticData {
    pub fn new(k: u64) -> Result<Self> {
        check_level(k)?;
        Ok(CyclicQuadraticData { k })
    }

    pub fn level(&self) -> u64 {
        self.k
    }

    /// Twist `exp(πi x²/k)`.
    pub fn twist(&self, x: u64) -> UnitPhase {
        let x = (x % self.k) as i64;
        UnitPhase::from_ratio(x * x, 2 * self.k as i64)
    }

    pub fn omega(&self, x: u64, y: u64) -> UnitPhase {
        bicharacter(self, x, y)
    }
}

/// `Ω_k(x, y) = exp(2πi xy/k)`.
pub fn bicharacter(data: &CyclicQuadraticData, x: u64, y: u64) -> UnitPhase {
    let k = data.k;
    UnitPhase::from_ratio(((x % k) * (y % k) % k) as i64, k as i64)
}
