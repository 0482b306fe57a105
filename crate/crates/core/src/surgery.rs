//! Surgery presentations, the pointed `ℤ_k` state sum, and Kirby moves.
//!
//! A presentation is the block linking matrix
//!
//! ```text
//! [ L   B ]   L: m×m surgery components
//! [ Bᵀ  C ]   C: r×r colored insertions, colors h ∈ ℤ_kʳ
//! ```
//!
//! and the raw invariant is
//! `k^{-1/2} · A₊^{(-m-σ)/2} · A₋^{(-m+σ)/2} · Σ_{g∈ℤ_kᵐ} exp(πi/k · (gᵀLg + 2gᵀBh + hᵀCh))`
//! with `A± = √k·e^{±πi/4}`, so the prefactor is exactly `k^{-(m+1)/2} · e^{-πiσ/4}`.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intlinalg::{signature, IntMatrix, IntSymMatrix};
use crate::numeric::{approx_eq, ApproxComplex, HalfTurnTable, PolarValue, Rational, UnitPhase};
use crate::quadmod::check_level;

/// Default cap on the number of terms in any brute-force sum.
pub const DEFAULT_MAX_ENUM: u64 = 10_000_000;

/// Enumeration cap, overridable through `ABTQFT_MAX_ENUM`.
pub fn enumeration_cap() -> u64 {
    std::env::var("ABTQFT_MAX_ENUM")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_ENUM)
}

/// `base^exp`, or `EnumerationTooLarge` if it exceeds the cap.
pub(crate) fn checked_terms(base: u64, exp: usize) -> Result<u64> {
    let cap = enumeration_cap();
    let too_large = || Error::EnumerationTooLarge {
        terms: format!("{base}^{exp}"),
        cap,
    };
    let exp32 = u32::try_from(exp).map_err(|_| too_large())?;
    match base.checked_pow(exp32) {
        Some(n) if n <= cap => Ok(n),
        _ => Err(too_large()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurgeryPresentation {
    surgery: IntSymMatrix,
    insertion_mixed: IntMatrix,
    insertion_self: IntSymMatrix,
    colors: Vec<i64>,
}

impl SurgeryPresentation {
    /// Closed manifold, no insertions.
    pub fn closed(l: IntSymMatrix) -> Self {
        let m = l.dim();
        SurgeryPresentation {
            surgery: l,
            insertion_mixed: IntMatrix::zeros(m, 0),
            insertion_self: IntSymMatrix::empty(),
            colors: Vec::new(),
        }
    }

    pub fn with_insertions(
        l: IntSymMatrix,
        mixed: IntMatrix,
        insertion_self: IntSymMatrix,
        colors: Vec<i64>,
    ) -> Result<Self> {
        let (m, r) = (l.dim(), insertion_self.dim());
        // an empty JSON array cannot carry a column count
        let mixed = if mixed.rows() == 0 && mixed.cols() == 0 {
            IntMatrix::zeros(m, r)
        } else {
            mixed
        };
        if mixed.rows() != m || mixed.cols() != r {
            return Err(Error::InvalidPresentation(format!(
                "mixed block is {}x{}, expected {m}x{r}",
                mixed.rows(),
                mixed.cols()
            )));
        }
        if colors.len() != r {
            return Err(Error::InvalidPresentation(format!(
                "{} colors for {r} insertion components",
                colors.len()
            )));
        }
        Ok(SurgeryPresentation {
            surgery: l,
            insertion_mixed: mixed,
            insertion_self,
            colors,
        })
    }

    pub fn surgery_matrix(&self) -> &IntSymMatrix {
        &self.surgery
    }

    pub fn insertion_mixed(&self) -> &IntMatrix {
        &self.insertion_mixed
    }

    pub fn insertion_self(&self) -> &IntSymMatrix {
        &self.insertion_self
    }

    pub fn colors(&self) -> &[i64] {
        &self.colors
    }

    pub fn components(&self) -> usize {
        self.surgery.dim()
    }

    pub fn insertions(&self) -> usize {
        self.colors.len()
    }

    pub fn is_closed(&self) -> bool {
        self.colors.is_empty()
    }

    /// Same link with new insertion colors.
    pub fn recolored(&self, colors: Vec<i64>) -> Result<Self> {
        SurgeryPresentation::with_insertions(
            self.surgery.clone(),
            self.insertion_mixed.clone(),
            self.insertion_self.clone(),
            colors,
        )
    }

    /// Full `(m+r)×(m+r)` linking matrix of `L ⊔ L'`.
    pub fn block_matrix(&self) -> IntSymMatrix {
        let (m, r) = (self.components(), self.insertions());
        let full = IntMatrix::from_fn(m + r, m + r, |i, j| match (i < m, j < m) {
            (true, true) => self.surgery[(i, j)].clone(),
            (true, false) => self.insertion_mixed[(i, j - m)].clone(),
            (false, true) => self.insertion_mixed[(j, i - m)].clone(),
            (false, false) => self.insertion_self[(i - m, j - m)].clone(),
        });
        IntSymMatrix::new(full).expect("block matrix is symmetric")
    }
}

#[derive(Serialize, Deserialize)]
struct PresentationRepr {
    #[serde(rename = "L")]
    l: IntSymMatrix,
    #[serde(rename = "B", default = "empty_matrix")]
    b: IntMatrix,
    #[serde(rename = "C", default = "IntSymMatrix::empty")]
    c: IntSymMatrix,
    #[serde(default)]
    h: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<u64>,
}

fn empty_matrix() -> IntMatrix {
    IntMatrix::zeros(0, 0)
}

/// A presentation together with an optional level, as read from / written to JSON:
/// `{"L":[[…]],"B":[[…]],"C":[[…]],"h":[…],"k":K}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresentationFile {
    pub presentation: SurgeryPresentation,
    pub k: Option<u64>,
}

impl Serialize for PresentationFile {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let p = &self.presentation;
        PresentationRepr {
            l: p.surgery.clone(),
            b: p.insertion_mixed.clone(),
            c: p.insertion_self.clone(),
            h: p.colors.clone(),
            k: self.k,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PresentationFile {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = PresentationRepr::deserialize(d)?;
        let presentation = SurgeryPresentation::with_insertions(r.l, r.b, r.c, r.h)
            .map_err(serde::de::Error::custom)?;
        Ok(PresentationFile {
            presentation,
            k: r.k,
        })
    }
}

impl Serialize for SurgeryPresentation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PresentationFile {
            presentation: self.clone(),
            k: None,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SurgeryPresentation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(PresentationFile::deserialize(d)?.presentation)
    }
}

/// `A±(k) = Σ_{s∈ℤ_k} exp(±πi s²/k)`: brute-force value and exact closed form `√k·e^{±πi/4}`.
pub fn a_gauss(k: u64, sign: i64) -> Result<(ApproxComplex, PolarValue)> {
    check_level(k)?;
    let s = if sign < 0 { -1 } else { 1 };
    let period = 2 * k as i64;
    let brute = (0..k as i64)
        .map(|t| UnitPhase::from_ratio(s * t * t, period).eval())
        .sum();
    let closed = PolarValue::new(Rational::from(k as i64), UnitPhase::from_ratio(s, 8));
    Ok((brute, closed))
}

fn residues_of(v: &[i64], modulus: i64) -> Vec<i64> {
    v.iter().map(|x| x.rem_euclid(modulus)).collect()
}

/// Exponent data reduced mod `2k` for fast evaluation of the block quadratic form.
struct ReducedForm {
    modulus: i64,
    m: usize,
    l: Vec<i64>,
    // 2·(B h)_i and hᵀ C h, mod 2k
    linear: Vec<i64>,
    constant: i64,
}

impl ReducedForm {
    fn new(p: &SurgeryPresentation, k: u64) -> Self {
        let modulus = 2 * k as i64;
        let m = p.components();
        let r = p.insertions();
        let l = p.surgery.as_matrix().residues(modulus);
        let b = p.insertion_mixed.residues(modulus);
        let c = p.insertion_self.as_matrix().residues(modulus);
        let h = residues_of(&p.colors, modulus);
        let md = |x: i128| (x.rem_euclid(modulus as i128)) as i64;
        let linear = (0..m)
            .map(|i| {
                md(2 * (0..r)
                    .map(|j| b[i * r + j] as i128 * h[j] as i128)
                    .sum::<i128>())
            })
            .collect();
        let constant = md((0..r)
            .flat_map(|i| (0..r).map(move |j| (i, j)))
            .map(|(i, j)| h[i] as i128 * c[i * r + j] as i128 * h[j] as i128)
            .sum());
        ReducedForm {
            modulus,
            m,
            l,
            linear,
            constant,
        }
    }

    fn value(&self, g: &[i64]) -> i64 {
        let n = self.modulus as i128;
        let mut acc = self.constant as i128;
        for i in 0..self.m {
            let gi = g[i].rem_euclid(self.modulus) as i128;
            acc += gi * self.linear[i] as i128;
            for j in 0..self.m {
                acc += gi * self.l[i * self.m + j] as i128 * g[j].rem_euclid(self.modulus) as i128;
            }
            acc %= n;
        }
        acc.rem_euclid(n) as i64
    }

    /// Histogram of the form's value mod `2k` over `g ∈ ℤ_kᵐ`, by odometer with
    /// incremental updates of `Lg`.
    fn counts(&self, k: u64) -> Vec<u64> {
        let n = self.modulus;
        let m = self.m;
        let mut counts = vec![0u64; n as usize];
        let mut g = vec![0i64; m];
        let mut lg = vec![0i64; m];
        let mut q = self.constant;
        let k = k as i64;
        loop {
            counts[q as usize] += 1;
            // advance: last coordinate fastest
            let mut pos = m;
            loop {
                if pos == 0 {
                    return counts;
                }
                pos -= 1;
                let delta = if g[pos] + 1 == k { -(k - 1) } else { 1 };
                let i = pos;
                // Q(g + δeᵢ) - Q(g) = 2δ(Lg)ᵢ + δ² Lᵢᵢ + δ·linearᵢ
                let d = delta.rem_euclid(n);
                let step = 2 * d % n * lg[i] % n
                    + d * d % n * self.l[i * m + i] % n
                    + d * self.linear[i] % n;
                q = (q + step) % n;
                for (t, lt) in lg.iter_mut().enumerate() {
                    *lt = (*lt + d * self.l[t * m + i]) % n;
                }
                g[i] += delta;
                if delta == 1 {
                    break;
                }
            }
        }
    }
}

/// Pointed RT evaluation of the colored link, as the phase
/// `(gᵀLg + 2gᵀBh + hᵀCh) / (2k) mod 1`.
pub fn rt_link_eval(p: &SurgeryPresentation, g: &[i64], k: u64) -> Result<UnitPhase> {
    check_level(k)?;
    if g.len() != p.components() {
        return Err(Error::IndexOutOfRange(format!(
            "{} colors for {} surgery components",
            g.len(),
            p.components()
        )));
    }
    let form = ReducedForm::new(p, k);
    Ok(UnitPhase::from_ratio(form.value(g), 2 * k as i64))
}

/// `Σ_{g∈ℤ_kᵐ} exp(πi/k · Q(g))`, unnormalized.
pub fn rt_state_sum(p: &SurgeryPresentation, k: u64) -> Result<ApproxComplex> {
    check_level(k)?;
    checked_terms(k, p.components())?;
    let counts = ReducedForm::new(p, k).counts(k);
    Ok(HalfTurnTable::new(k).contract(&counts))
}

/// `k^{-1/2} · A₊^{(-m-σ)/2} · A₋^{(-m+σ)/2} = k^{-(m+1)/2} · e^{-πiσ/4}`, exact.
pub fn rt_normalization(l: &IntSymMatrix, k: u64) -> PolarValue {
    let m = l.dim() as i64;
    let sigma = signature(l);
    let mag2 = Rational::new(1, BigInt::from(k).pow((m + 1) as u32));
    PolarValue::new(mag2, UnitPhase::from_ratio(-sigma, 8))
}

/// The raw closed (or insertion-colored) RT invariant.
pub fn rt_raw_closed(p: &SurgeryPresentation, k: u64) -> Result<ApproxComplex> {
    let sum = rt_state_sum(p, k)?;
    Ok(rt_normalization(&p.surgery, k).to_approx() * sum)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum KirbyMove {
    /// Adjoin an unlinked unknot with framing `sign`.
    K1 { sign: i8 },
    /// Slide `source` over `target`: basis change `e_source ↦ e_source + sign·e_target`.
    K2 {
        source: usize,
        target: usize,
        sign: i8,
    },
}

/// Applies a Kirby move. K2 is the congruence `L ↦ AᵀLA`, `B ↦ AᵀB` with
/// `A = I + s·E_{target,source}`; insertions and colors are untouched.
pub fn apply_kirby(p: &SurgeryPresentation, mv: KirbyMove) -> Result<SurgeryPresentation> {
    let m = p.components();
    let r = p.insertions();
    match mv {
        KirbyMove::K1 { sign } => {
            let s = if sign < 0 { -1 } else { 1 };
            let l = p.surgery.direct_sum(&IntSymMatrix::diagonal(&[s]));
            let mixed = IntMatrix::from_fn(m + 1, r, |i, j| {
                if i < m {
                    p.insertion_mixed[(i, j)].clone()
                } else {
                    BigInt::zero()
                }
            });
            SurgeryPresentation::with_insertions(
                l,
                mixed,
                p.insertion_self.clone(),
                p.colors.clone(),
            )
        }
        KirbyMove::K2 {
            source,
            target,
            sign,
        } => {
            if source >= m || target >= m || source == target {
                return Err(Error::IndexOutOfRange(format!(
                    "handle slide {source} over {target} on {m} components"
                )));
            }
            let mut a = IntMatrix::identity(m);
            a[(target, source)] = BigInt::from(if sign < 0 { -1 } else { 1 });
            let l = p.surgery.congruence(&a);
            let mixed = a.transpose().mul(&p.insertion_mixed);
            SurgeryPresentation::with_insertions(
                l,
                mixed,
                p.insertion_self.clone(),
                p.colors.clone(),
            )
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FuzzStep {
    #[serde(rename = "move")]
    pub mv: KirbyMove,
    pub applied: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
    pub components: usize,
    pub dev: f64,
}

/// `{"seed":…,"moves":[…],"max_dev":…}`
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FuzzReport {
    pub seed: u64,
    pub k: u64,
    pub start: ApproxComplex,
    pub moves: Vec<FuzzStep>,
    pub max_dev: f64,
}

impl FuzzReport {
    pub fn applied(&self) -> usize {
        self.moves.iter().filter(|s| s.applied).count()
    }
}

/// Random walk of Kirby moves from `p`, recording `|Z(current) − Z(p)|` after each move.
///
/// Moves that would push past `max_components` or the enumeration cap are logged as
/// skipped. Deterministic for a fixed seed.
pub fn kirby_fuzz(
    p: &SurgeryPresentation,
    k: u64,
    walk_length: usize,
    seed: u64,
    max_components: usize,
) -> Result<FuzzReport> {
    let start = rt_raw_closed(p, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = p.clone();
    let mut moves = Vec::with_capacity(walk_length);
    let mut max_dev = 0.0f64;
    for _ in 0..walk_length {
        let m = current.components();
        let kinds: &[u8] = if m >= 2 { &[0, 1, 2, 2] } else { &[0, 1] };
        let mv = match kinds.choose(&mut rng).copied().unwrap_or(0) {
            0 => KirbyMove::K1 { sign: 1 },
            1 => KirbyMove::K1 { sign: -1 },
            _ => {
                let source = rng.gen_range(0..m);
                let mut target = rng.gen_range(0..m - 1);
                if target >= source {
                    target += 1;
                }
                KirbyMove::K2 {
                    source,
                    target,
                    sign: if rng.gen_bool(0.5) { 1 } else { -1 },
                }
            }
        };
        let grows = matches!(mv, KirbyMove::K1 { .. });
        let skip = if grows && m + 1 > max_components {
            Some(format!("component cap {max_components}"))
        } else if grows && checked_terms(k, m + 1).is_err() {
            Some(format!("enumeration cap {}", enumeration_cap()))
        } else {
            None
        };
        if let Some(reason) = skip {
            moves.push(FuzzStep {
                mv,
                applied: false,
                skipped: Some(reason),
                components: m,
                dev: 0.0,
            });
            continue;
        }
        current = apply_kirby(&current, mv)?;
        let z = rt_raw_closed(&current, k)?;
        let dev = (z - start).abs();
        max_dev = max_dev.max(dev);
        moves.push(FuzzStep {
            mv,
            applied: true,
            skipped: None,
            components: current.components(),
            dev,
        });
    }
    Ok(FuzzReport {
        seed,
        k,
        start,
        moves,
        max_dev,
    })
}

/// True when `|a − b| <= base·√(k^{m})` for the larger of the two presentations.
pub fn within_budget(a: ApproxComplex, b: ApproxComplex, k: u64, m: usize, base: f64) -> bool {
    let terms = (k as f64).powi(m as i32);
    approx_eq(a, b, base * terms.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> ApproxComplex {
        ApproxComplex::new(re, im)
    }

    #[test]
    fn a_gauss_examples() {
        let (b, cl) = a_gauss(2, 1).unwrap();
        assert!(approx_eq(b, c(1.0, 1.0), 1e-12));
        assert_eq!(
            cl,
            PolarValue::new(Rational::from(2), UnitPhase::from_ratio(1, 8))
        );
        assert!(approx_eq(cl.to_approx(), c(1.0, 1.0), 1e-12));
        let (b, cl) = a_gauss(4, -1).unwrap();
        let want = c(2.0 * FRAC_1_SQRT_2, -2.0 * FRAC_1_SQRT_2);
        assert!(approx_eq(b, want, 1e-12));
        assert!(approx_eq(cl.to_approx(), want, 1e-12));
        for k in (2..=64).step_by(2) {
            for s in [1, -1] {
                let (b, cl) = a_gauss(k, s).unwrap();
                assert!(approx_eq(b, cl.to_approx(), 1e-9 * (k as f64).sqrt()));
            }
        }
        assert!(a_gauss(3, 1).is_err());
    }

    #[test]
    fn rt_link_eval_examples() {
        let p = SurgeryPresentation::closed(IntSymMatrix::of(&[&[5, 1], &[1, -3]]));
        assert!(rt_link_eval(&p, &[0, 0], 6).unwrap().is_one());

        let hopf = SurgeryPresentation::with_insertions(
            IntSymMatrix::empty(),
            IntMatrix::zeros(0, 2),
            IntSymMatrix::of(&[&[0, 1], &[1, 0]]),
            vec![1, 1],
        )
        .unwrap();
        assert_eq!(
            rt_link_eval(&hopf, &[], 4).unwrap(),
            UnitPhase::from_ratio(1, 4)
        );

        let p = SurgeryPresentation::closed(IntSymMatrix::of(&[&[1]]));
        let ph = rt_link_eval(&p, &[1], 2).unwrap();
        assert_eq!(ph, UnitPhase::from_ratio(1, 4));
        assert!(approx_eq(ph.eval(), ApproxComplex::I, 1e-15));
        assert!(rt_link_eval(&p, &[1, 2], 2).is_err());
    }

    #[test]
    fn rt_raw_closed_examples() {
        for k in [2u64, 4, 6, 8] {
            let s = 1.0 / (k as f64).sqrt();
            let s3 = SurgeryPresentation::closed(IntSymMatrix::of(&[&[1]]));
            assert!(approx_eq(rt_raw_closed(&s3, k).unwrap(), c(s, 0.0), 1e-12));
            let s1s2 = SurgeryPresentation::closed(IntSymMatrix::of(&[&[0]]));
            assert!(approx_eq(
                rt_raw_closed(&s1s2, k).unwrap(),
                c(1.0, 0.0),
                1e-12
            ));
            let empty = SurgeryPresentation::closed(IntSymMatrix::empty());
            assert!(approx_eq(
                rt_raw_closed(&empty, k).unwrap(),
                c(s, 0.0),
                1e-12
            ));
        }
    }

    #[test]
    fn counts_match_direct_enumeration() {
        let p = SurgeryPresentation::with_insertions(
            IntSymMatrix::of(&[&[3, -2, 1], &[-2, 0, 4], &[1, 4, -1]]),
            IntMatrix::from_rows(&[vec![1, 0], vec![2, -1], vec![0, 3]]).unwrap(),
            IntSymMatrix::of(&[&[2, 1], &[1, -3]]),
            vec![3, 5],
        )
        .unwrap();
        for k in [2u64, 4, 6] {
            let mut direct = ApproxComplex::ZERO;
            let ki = k as i64;
            for a in 0..ki {
                for b in 0..ki {
                    for d in 0..ki {
                        direct += rt_link_eval(&p, &[a, b, d], k).unwrap().eval();
                    }
                }
            }
            assert!(approx_eq(rt_state_sum(&p, k).unwrap(), direct, 1e-9));
        }
    }

    #[test]
    fn enumeration_cap_enforced() {
        let p = SurgeryPresentation::closed(IntSymMatrix::diagonal(&[1; 9]));
        assert!(matches!(
            rt_raw_closed(&p, 8),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn apply_kirby_examples() {
        let p = SurgeryPresentation::closed(IntSymMatrix::of(&[&[0]]));
        let q = apply_kirby(&p, KirbyMove::K1 { sign: 1 }).unwrap();
        assert_eq!(q.surgery_matrix(), &IntSymMatrix::of(&[&[0, 0], &[0, 1]]));

        let p = SurgeryPresentation::closed(IntSymMatrix::diagonal(&[1, 1]));
        let q = apply_kirby(
            &p,
            KirbyMove::K2 {
                source: 0,
                target: 1,
                sign: 1,
            },
        )
        .unwrap();
        assert_eq!(q.surgery_matrix(), &IntSymMatrix::of(&[&[2, 1], &[1, 1]]));

        let p = SurgeryPresentation::closed(IntSymMatrix::of(&[&[1]]));
        let q = apply_kirby(&p, KirbyMove::K1 { sign: -1 }).unwrap();
        let (a, b) = (rt_raw_closed(&p, 4).unwrap(), rt_raw_closed(&q, 4).unwrap());
        assert!(approx_eq(a, c(0.5, 0.0), 1e-12));
        assert!(approx_eq(b, c(0.5, 0.0), 1e-12));

        assert!(matches!(
            apply_kirby(
                &p,
                KirbyMove::K2 {
                    source: 0,
                    target: 0,
                    sign: 1
                }
            ),
            Err(Error::IndexOutOfRange(_))
        ));
        assert!(apply_kirby(
            &p,
            KirbyMove::K2 {
                source: 0,
                target: 3,
                sign: 1
            }
        )
        .is_err());
    }

    #[test]
    fn kirby_moves_carry_insertions() {
        let p = SurgeryPresentation::with_insertions(
            IntSymMatrix::of(&[&[2, 1], &[1, -1]]),
            IntMatrix::from_rows(&[vec![1], vec![0]]).unwrap(),
            IntSymMatrix::of(&[&[0]]),
            vec![1],
        )
        .unwrap();
        let q = apply_kirby(
            &p,
            KirbyMove::K2 {
                source: 1,
                target: 0,
                sign: -1,
            },
        )
        .unwrap();
        let q = apply_kirby(&q, KirbyMove::K1 { sign: 1 }).unwrap();
        for k in [2u64, 4, 6] {
            let (a, b) = (rt_raw_closed(&p, k).unwrap(), rt_raw_closed(&q, k).unwrap());
            assert!(approx_eq(a, b, 1e-9), "k={k}: {a} vs {b}");
        }
    }

    #[test]
    fn kirby_fuzz_examples() {
        let p = SurgeryPresentation::closed(IntSymMatrix::of(&[&[1]]));
        let r = kirby_fuzz(&p, 2, 50, 11, 4).unwrap();
        assert_eq!(r.moves.len(), 50);
        assert!(r.max_dev < 1e-7);
        assert!(r.applied() > 0);
        assert!(r.moves.iter().all(|s| s.components <= 4));

        let r = kirby_fuzz(&p, 2, 0, 11, 4).unwrap();
        assert_eq!(r.max_dev, 0.0);
        assert!(r.moves.is_empty());

        let p = SurgeryPresentation::closed(IntSymMatrix::of(&[&[3]]));
        let r = kirby_fuzz(&p, 4, 100, 5, 4).unwrap();
        assert!(r.max_dev < 1e-7);

        let again = kirby_fuzz(&p, 4, 100, 5, 4).unwrap();
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            serde_json::to_string(&again).unwrap()
        );
    }

    #[test]
    fn presentation_json() {
        let text = r#"{"L":[[1,2],[2,0]],"B":[[1],[0]],"C":[[2]],"h":[3],"k":4}"#;
        let f: PresentationFile = serde_json::from_str(text).unwrap();
        assert_eq!(f.k, Some(4));
        assert_eq!(f.presentation.insertions(), 1);
        assert_eq!(serde_json::to_string(&f).unwrap(), text);

        let f: PresentationFile = serde_json::from_str(r#"{"L":[[0]]}"#).unwrap();
        assert!(f.presentation.is_closed());
        let f: PresentationFile =
            serde_json::from_str(r#"{"L":[],"B":[],"C":[[0,1],[1,0]],"h":[1,1]}"#).unwrap();
        assert_eq!(f.presentation.insertions(), 2);
        assert!(serde_json::from_str::<PresentationFile>(r#"{"L":[[1]],"h":[1]}"#).is_err());
    }

    #[test]
    fn k1_k2_invariance_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..500 {
            let m = rng.gen_range(1..=3);
            let k = [2u64, 4, 6, 8][rng.gen_range(0..4)];
            let p = SurgeryPresentation::closed(corpus::random_symmetric(&mut rng, m, 4));
            let z = rt_raw_closed(&p, k).unwrap();
            let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
            let q = apply_kirby(&p, KirbyMove::K1 { sign }).unwrap();
            assert!(within_budget(
                z,
                rt_raw_closed(&q, k).unwrap(),
                k,
                m + 1,
                1e-9
            ));
            if m >= 2 {
                let source = rng.gen_range(0..m);
                let target = (source + rng.gen_range(1..m)) % m;
                let q = apply_kirby(
                    &p,
                    KirbyMove::K2 {
                        source,
                        target,
                        sign,
                    },
                )
                .unwrap();
                assert!(within_budget(
                    z,
                    rt_raw_closed(&q, k).unwrap(),
                    k,
                    m + 1,
                    1e-9
                ));
            }
        }
    }

    #[test]
    fn connected_sum_and_orientation() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..100 {
            let k = [2u64, 4, 6][rng.gen_range(0..3)];
            let m1 = rng.gen_range(1..=2);
            let l1 = corpus::random_symmetric(&mut rng, m1, 4);
            let m2 = rng.gen_range(1..=2);
            let l2 = corpus::random_symmetric(&mut rng, m2, 4);
            let z = |l: &IntSymMatrix| {
                rt_raw_closed(&SurgeryPresentation::closed(l.clone()), k).unwrap()
            };
            let rhs = (z(&l1) * z(&l2)).scale((k as f64).sqrt());
            assert!(approx_eq(z(&l1.direct_sum(&l2)), rhs, 1e-9));
            assert!(approx_eq(z(&l1.neg()), z(&l1).conj(), 1e-9));
        }
    }

    #[test]
    fn insertion_colors_live_in_z_k() {
        let p = SurgeryPresentation::with_insertions(
            IntSymMatrix::of(&[&[3, 1], &[1, 2]]),
            IntMatrix::from_rows(&[vec![1, 2], vec![-1, 0]]).unwrap(),
            IntSymMatrix::of(&[&[1, 1], &[1, -2]]),
            vec![1, 2],
        )
        .unwrap();
        for k in [2u64, 4, 6, 8] {
            let z = rt_raw_closed(&p, k).unwrap();
            let shifted = p
                .recolored(vec![1 + 3 * k as i64, 2 - 5 * k as i64])
                .unwrap();
            assert!(approx_eq(z, rt_raw_closed(&shifted, k).unwrap(), 1e-12));
        }
    }

    fn symmetric(entries: &[i64], n: usize) -> IntSymMatrix {
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| entries[i.min(j) * 4 + i.max(j)]).collect())
            .collect();
        IntSymMatrix::from_rows(&rows).unwrap()
    }

    proptest::proptest! {
        #[test]
        fn presentation_json_round_trip(
            m in 0usize..4,
            r in 0usize..3,
            entries in proptest::collection::vec(-6i64..7, 16),
            mixed in proptest::collection::vec(-3i64..4, 12),
            colors in proptest::collection::vec(-9i64..10, 3),
        ) {
            let l = symmetric(&entries, m);
            let c = symmetric(&entries[8..], r);
            let b: Vec<Vec<i64>> = (0..m).map(|i| mixed[i * 3..i * 3 + r].to_vec()).collect();
            let b = if m == 0 { IntMatrix::zeros(0, r) } else { IntMatrix::from_rows(&b).unwrap() };
            let p = SurgeryPresentation::with_insertions(l, b, c, colors[..r].to_vec()).unwrap();
            let text = serde_json::to_string(&p).unwrap();
            let back: SurgeryPresentation = serde_json::from_str(&text).unwrap();
            proptest::prop_assert_eq!(back, p);
        }

        #[test]
        fn blow_up_preserves_value(
            m in 1usize..3,
            entries in proptest::collection::vec(-3i64..4, 16),
            sign in proptest::prop_oneof![proptest::strategy::Just(1i8), proptest::strategy::Just(-1i8)],
            half_k in 1u64..4,
        ) {
            let k = 2 * half_k;
            let p = SurgeryPresentation::closed(symmetric(&entries, m));
            let moved = apply_kirby(&p, KirbyMove::K1 { sign }).unwrap();
            let (a, b) = (rt_raw_closed(&p, k).unwrap(), rt_raw_closed(&moved, k).unwrap());
            proptest::prop_assert!(approx_eq(a, b, 1e-9 * (k as f64).powi(m as i32 + 1).sqrt()));
        }
    }
}
