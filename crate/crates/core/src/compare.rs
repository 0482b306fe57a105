//! The Chern–Simons side of the closed comparison, Gauss-sum reciprocity checks, and the
//! empirically frozen phase table relating the two closed invariants.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::corpus::{self, CorpusEntry};
use crate::error::{Error, Result};
use crate::intlinalg::{regular_decomposition, signature, IntSymMatrix};
use crate::numeric::{ApproxComplex, Rational, UnitPhase};
use crate::quadmod::{check_level, FiniteQuadraticModule};
use crate::surgery::{checked_terms, rt_raw_closed, rt_state_sum, SurgeryPresentation};

/// Below this magnitude a Chern–Simons value counts as a vanishing Gauss sum.
pub const VANISHING_TOL: f64 = 1e-9;

/// Agreement required inside one signature class of the phase table.
pub const PHASE_TOL: f64 = 1e-7;

/// Which exponential the torsion Gauss sum uses: `exp(+2πik·q)` or `exp(−2πik·q)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CsSign {
    Plus,
    #[default]
    Minus,
}

impl CsSign {
    fn as_i64(self) -> i64 {
        match self {
            CsSign::Plus => 1,
            CsSign::Minus => -1,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CsClosedResult {
    /// `(b₁ − 1) / 2`
    pub m_exponent: Rational,
    pub torsion_order: u64,
    /// `|T|^{-1/2} Σ_{x∈T} exp(±2πik·q(x))`
    pub gauss: ApproxComplex,
    /// `k^{m_exponent} · gauss`
    pub value: ApproxComplex,
}

/// Closed Chern–Simons value with the default sign.
pub fn cs_closed(l: &IntSymMatrix, k: u64) -> Result<CsClosedResult> {
    cs_closed_with_sign(l, k, CsSign::default())
}

pub fn cs_closed_with_sign(l: &IntSymMatrix, k: u64, sign: CsSign) -> Result<CsClosedResult> {
    check_level(k)?;
    let nu = regular_decomposition(l).nullity as i64;
    let module = FiniteQuadraticModule::from_surgery(l)?;
    let order = module.order();
    let gauss = module
        .phase_sum(k, sign.as_i64())
        .scale(1.0 / (order as f64).sqrt());
    let m_exponent = Rational::new(nu - 1, 2);
    let value = gauss.scale((k as f64).powf(m_exponent.to_f64()));
    Ok(CsClosedResult {
        m_exponent,
        torsion_order: order,
        gauss,
        value,
    })
}

/// `rt_raw_closed / cs_closed` together with `σ(L_reg)`.
pub fn equivalence_ratio(l: &IntSymMatrix, k: u64) -> Result<(ApproxComplex, i64)> {
    equivalence_ratio_with_sign(l, k, CsSign::default())
}

pub fn equivalence_ratio_with_sign(
    l: &IntSymMatrix,
    k: u64,
    sign: CsSign,
) -> Result<(ApproxComplex, i64)> {
    let cs = cs_closed_with_sign(l, k, sign)?;
    if cs.value.abs() < VANISHING_TOL {
        return Err(Error::ZeroDenominator(format!(
            "Gauss sum vanishes for L = {l:?} at k = {k}"
        )));
    }
    let rt = rt_raw_closed(&SurgeryPresentation::closed(l.clone()), k)?;
    let ratio = rt.checked_div(cs.value).ok_or_else(|| {
        Error::ZeroDenominator(format!("Chern–Simons value is zero for L = {l:?}"))
    })?;
    let sigma_reg = signature(&regular_decomposition(l).regular);
    Ok((ratio, sigma_reg))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkippedEntry {
    #[serde(flatten)]
    pub entry: CorpusEntry,
    pub reason: String,
}

/// Universal phase per class of `σ(L_reg) mod 8`.
///
/// JSON: `{"sigma_mod_8":{"0":"0/1",…},"corpus_size":n,"skipped":s,"max_dev":x}` with each
/// phase written as its angle in turns.
#[derive(Clone, Debug)]
pub struct PhaseTable {
    pub entries: BTreeMap<u8, UnitPhase>,
    pub corpus_size: usize,
    pub skipped: Vec<SkippedEntry>,
    pub max_dev: f64,
}

#[derive(Serialize, Deserialize)]
struct PhaseTableRepr {
    sigma_mod_8: BTreeMap<String, Rational>,
    corpus_size: usize,
    skipped: usize,
    max_dev: f64,
}

impl Serialize for PhaseTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PhaseTableRepr {
            sigma_mod_8: self
                .entries
                .iter()
                .map(|(c, p)| (c.to_string(), p.angle().clone()))
                .collect(),
            corpus_size: self.corpus_size,
            skipped: self.skipped.len(),
            max_dev: self.max_dev,
        }
        .serialize(s)
    }
}

/// Deserialized tables carry only the count of skipped entries, not the entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseTableFile {
    pub sigma_mod_8: BTreeMap<String, Rational>,
    pub corpus_size: usize,
    pub skipped: usize,
    pub max_dev: f64,
}

impl PhaseTableFile {
    pub fn entries(&self) -> Result<BTreeMap<u8, UnitPhase>> {
        self.sigma_mod_8
            .iter()
            .map(|(c, a)| {
                let class: u8 = c
                    .parse()
                    .ok()
                    .filter(|c| *c < 8)
                    .ok_or_else(|| Error::Parse(format!("bad signature class {c:?}")))?;
                Ok((class, UnitPhase::new(a.clone())))
            })
            .collect()
    }

    /// Same classes, phases and corpus size as `table`.
    pub fn matches(&self, table: &PhaseTable) -> bool {
        self.corpus_size == table.corpus_size && self.entries().is_ok_and(|e| e == table.entries)
    }
}

impl PhaseTable {
    pub fn to_file(&self) -> PhaseTableFile {
        let json = serde_json::to_value(self).expect("phase table serializes");
        serde_json::from_value(json).expect("phase table round-trips")
    }

    pub fn phase(&self, sigma: i64) -> Option<&UnitPhase> {
        self.entries.get(&(sigma.rem_euclid(8) as u8))
    }
}

fn nearest_eighth(z: ApproxComplex) -> UnitPhase {
    let eighths = (z.arg() / (2.0 * PI) * 8.0).round() as i64;
    UnitPhase::from_ratio(eighths, 8)
}

/// Phase table for the default sign.
pub fn build_phase_table(corpus: &[CorpusEntry]) -> Result<PhaseTable> {
    build_phase_table_with_sign(corpus, CsSign::default())
}

/// Computes every equivalence ratio, checks unit magnitude and agreement within each
/// signature class, and snaps each class to the nearest eighth root of unity.
/// Vanishing Gauss sums are skipped and recorded.
pub fn build_phase_table_with_sign(corpus: &[CorpusEntry], sign: CsSign) -> Result<PhaseTable> {
    let mut classes: BTreeMap<u8, Vec<(ApproxComplex, &CorpusEntry)>> = BTreeMap::new();
    let mut skipped = Vec::new();
    for entry in corpus {
        match equivalence_ratio_with_sign(&entry.l, entry.k, sign) {
            Ok((ratio, sigma)) => classes
                .entry(sigma.rem_euclid(8) as u8)
                .or_default()
                .push((ratio, entry)),
            Err(Error::ZeroDenominator(reason)) => skipped.push(SkippedEntry {
                entry: entry.clone(),
                reason,
            }),
            Err(e) => return Err(e),
        }
    }
    let mut entries = BTreeMap::new();
    let mut max_dev = 0.0f64;
    for (class, ratios) in classes {
        let (first, first_entry) = ratios[0];
        for &(ratio, entry) in &ratios {
            let modulus_dev = (ratio.abs() - 1.0).abs();
            if modulus_dev > PHASE_TOL {
                return Err(Error::InconsistentPhase {
                    class,
                    detail: format!(
                        "|ratio| = {} for {:?} at k = {}",
                        ratio.abs(),
                        entry.l,
                        entry.k
                    ),
                });
            }
            let spread = (ratio - first).abs();
            if spread > PHASE_TOL {
                return Err(Error::InconsistentPhase {
                    class,
                    detail: format!(
                        "ratio {ratio} for {:?} at k = {} disagrees with {first} for {:?} at k = {}",
                        entry.l, entry.k, first_entry.l, first_entry.k
                    ),
                });
            }
        }
        let snapped = nearest_eighth(first);
        let target = snapped.eval();
        for &(ratio, _) in &ratios {
            let dev = (ratio - target).abs();
            if dev > PHASE_TOL {
                return Err(Error::InconsistentPhase {
                    class,
                    detail: format!("ratio {ratio} is not an eighth root of unity"),
                });
            }
            max_dev = max_dev.max(dev);
        }
        entries.insert(class, snapped);
    }
    Ok(PhaseTable {
        entries,
        corpus_size: corpus.len(),
        skipped,
        max_dev,
    })
}

/// The committed phase table for [`standard_corpus`].
pub const FROZEN_PHASE_TABLE: &str = include_str!("../fixtures/phase_table.json");

pub fn frozen_phase_table() -> Result<PhaseTableFile> {
    serde_json::from_str(FROZEN_PHASE_TABLE).map_err(|e| Error::Parse(e.to_string()))
}

/// Seed of the standard equivalence corpus.
pub const STANDARD_CORPUS_SEED: u64 = 0x00ab_e11a;

/// Number of random entries in the standard corpus.
pub const STANDARD_CORPUS_RANDOM: usize = 400;

/// Hand-picked entries reaching large `|σ|` followed by seeded random ones. Vanishing
/// Gauss sums are left in; the table builder skips them.
pub fn standard_corpus() -> Vec<CorpusEntry> {
    let named = [
        IntSymMatrix::of(&[&[1]]),
        IntSymMatrix::of(&[&[-1]]),
        IntSymMatrix::of(&[&[0]]),
        IntSymMatrix::diagonal(&[1, 1]),
        IntSymMatrix::e8(),
        IntSymMatrix::e8().neg(),
        IntSymMatrix::diagonal(&[1, 1, 1, 1, 1]),
        IntSymMatrix::diagonal(&[-1, -1, -1, -1, -1, -1]),
        IntSymMatrix::diagonal(&[1, 1, 1, 1, 1, 1, 1]),
        IntSymMatrix::diagonal(&[1, 1, 1]),
        IntSymMatrix::diagonal(&[1, 1, 1, 1]),
        IntSymMatrix::diagonal(&[-1, -1, -1, -1]),
        IntSymMatrix::diagonal(&[-1, -1, -1, -1, -1]),
        IntSymMatrix::diagonal(&[3, 1, 1]),
        IntSymMatrix::of(&[&[2, -1, 0], &[-1, 2, -1], &[0, -1, 2]]),
        IntSymMatrix::of(&[
            &[2, -1, 0, 0],
            &[-1, 2, -1, 0],
            &[0, -1, 2, -1],
            &[0, 0, -1, 2],
        ]),
        IntSymMatrix::of(&[
            &[-2, 1, 0, 0],
            &[1, -2, 1, 0],
            &[0, 1, -2, 1],
            &[0, 0, 1, -2],
        ]),
    ];
    let mut out: Vec<CorpusEntry> = named
        .iter()
        .flat_map(|l| {
            [2u64, 4]
                .into_iter()
                .map(move |k| CorpusEntry { l: l.clone(), k })
        })
        .collect();
    out.extend(corpus::random_entries(
        STANDARD_CORPUS_SEED,
        STANDARD_CORPUS_RANDOM,
    ));
    out
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ReciprocityCheck {
    pub lhs: ApproxComplex,
    pub rhs: ApproxComplex,
    pub ok: bool,
}

fn det_u64(l: &IntSymMatrix) -> Result<u64> {
    let det = l.det().abs();
    if det == BigInt::from(0) {
        return Err(Error::DegenerateMatrix);
    }
    det.to_u64().ok_or_else(|| Error::GroupTooLarge {
        order: det.to_string(),
        cap: crate::intlinalg::MAX_GROUP_ORDER,
    })
}

/// `r^{m/2} · e^{πiσ/4} · |det L|^{-1/2} · Σ_{l∈ℤᵐ/Lℤᵐ} exp(−πir·lᵀL⁻¹l)` for nondegenerate `L`.
fn dt_right_side(l: &IntSymMatrix, r: u64) -> Result<ApproxComplex> {
    if l.dim() == 0 {
        return Ok(ApproxComplex::ONE);
    }
    let det = det_u64(l)?;
    let module = FiniteQuadraticModule::from_surgery(l)?;
    // exp(−πir·lᵀL⁻¹l) = exp(−2πir·q(l))
    let sum = module.phase_sum(r, -1);
    let scale = (r as f64).powf(l.dim() as f64 / 2.0) / (det as f64).sqrt();
    Ok(UnitPhase::from_ratio(signature(l), 8).eval() * sum.scale(scale))
}

fn reciprocity_tol(r: u64, m: usize) -> f64 {
    1e-9 * (r as f64).powf(m as f64 / 2.0)
}

/// Deloup–Turaev reciprocity for nondegenerate `L` at even `r`.
pub fn verify_reciprocity_dt(l: &IntSymMatrix, r: u64) -> Result<ReciprocityCheck> {
    check_level(r)?;
    det_u64(l)?;
    checked_terms(r, l.dim())?;
    let lhs = rt_state_sum(&SurgeryPresentation::closed(l.clone()), r)?;
    let rhs = dt_right_side(l, r)?;
    let ok = (lhs - rhs).abs() <= reciprocity_tol(r, l.dim());
    Ok(ReciprocityCheck { lhs, rhs, ok })
}

/// Exponent `d` of the null-direction factor `r^d` in degenerate reciprocity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NullExponentMode {
    /// `d = ν / 2`
    PaperHalf,
    /// `d = ν`
    FullNullity,
}

impl NullExponentMode {
    pub fn exponent(self, nullity: usize) -> f64 {
        match self {
            NullExponentMode::PaperHalf => nullity as f64 / 2.0,
            NullExponentMode::FullNullity => nullity as f64,
        }
    }
}

/// Reciprocity for arbitrary symmetric `L`: the direct sum against `r^d` times the
/// Deloup–Turaev right side of `L_reg`.
pub fn verify_reciprocity_degenerate(
    l: &IntSymMatrix,
    r: u64,
    mode: NullExponentMode,
) -> Result<ReciprocityCheck> {
    check_level(r)?;
    checked_terms(r, l.dim())?;
    let dec = regular_decomposition(l);
    let lhs = rt_state_sum(&SurgeryPresentation::closed(l.clone()), r)?;
    let rhs = dt_right_side(&dec.regular, r)?.scale((r as f64).powf(mode.exponent(dec.nullity)));
    let ok = (lhs - rhs).abs() <= reciprocity_tol(r, l.dim());
    Ok(ReciprocityCheck { lhs, rhs, ok })
}

/// `|det|` of `L_reg` through cokernel enumeration: counts classes of `ℤ^ρ / L_reg ℤ^ρ`.
pub fn torsion_order(l: &IntSymMatrix) -> Result<u64> {
    Ok(FiniteQuadraticModule::from_surgery(l)?.order())
}
