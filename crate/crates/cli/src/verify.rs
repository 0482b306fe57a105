use std::path::Path;

use abtqft_core::compare::{
    build_phase_table, equivalence_ratio, frozen_phase_table, standard_corpus,
    verify_reciprocity_degenerate, verify_reciprocity_dt, NullExponentMode, PHASE_TOL,
};
use abtqft_core::corpus::{
    degenerate_from, random_nondegenerate, random_symmetric, CorpusEntry, CORPUS_LEVELS,
};
use abtqft_core::extended::{anomaly_check, maslov_index, random_lagrangian};
use abtqft_core::intlinalg::IntSymMatrix;
use abtqft_core::numeric::{Tolerance, UnitPhase};
use abtqft_core::surgery::{kirby_fuzz, SurgeryPresentation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::{to_json, CliError, Outcome, Suite};

#[derive(Serialize)]
struct Case {
    id: usize,
    label: String,
    dev: f64,
    ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

#[derive(Serialize)]
struct VerifyReport {
    suite: &'static str,
    seed: u64,
    passed: bool,
    checks: usize,
    failures: usize,
    max_dev: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    first_failure: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    phase_table: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fixture_match: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    notes: Vec<String>,
    cases: Vec<Case>,
}

impl VerifyReport {
    fn new(suite: &'static str, seed: u64) -> Self {
        VerifyReport {
            suite,
            seed,
            passed: true,
            checks: 0,
            failures: 0,
            max_dev: 0.0,
            first_failure: None,
            phase_table: None,
            fixture_match: None,
            notes: Vec::new(),
            cases: Vec::new(),
        }
    }

    fn push(&mut self, label: String, dev: f64, ok: bool, note: Option<String>) {
        let id = self.cases.len();
        self.checks += 1;
        if dev.is_finite() {
            self.max_dev = self.max_dev.max(dev);
        }
        if !ok {
            self.failures += 1;
            self.passed = false;
            if self.first_failure.is_none() {
                self.first_failure = Some(format!("case {id}: {label}"));
            }
        }
        self.cases.push(Case {
            id,
            label,
            dev,
            ok,
            note,
        });
    }

    fn fail(&mut self, detail: String) {
        self.passed = false;
        self.failures += 1;
        if self.first_failure.is_none() {
            self.first_failure = Some(detail);
        }
    }

    fn text(&self) -> String {
        let mut out = format!(
            "suite {}: {} ({} checks, {} failures, max_dev {:.3e})",
            self.suite,
            if self.passed { "PASS" } else { "FAIL" },
            self.checks,
            self.failures,
            self.max_dev
        );
        if let Some(m) = self.fixture_match {
            out.push_str(&format!(
                "\nfixture {}",
                if m { "matches" } else { "DIFFERS" }
            ));
        }
        for n in &self.notes {
            out.push_str(&format!("\nnote: {n}"));
        }
        if let Some(f) = &self.first_failure {
            out.push_str(&format!("\nfirst failure: {f}"));
        }
        out
    }
}

pub fn load_corpus(spec: &str) -> Result<Vec<CorpusEntry>, CliError> {
    if spec == "default" {
        return Ok(standard_corpus());
    }
    let text = crate::read_file(Path::new(spec))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("corpus: {e}")))
}

fn label(l: &IntSymMatrix, k: u64) -> String {
    format!("L={} k={k}", serde_json::to_string(l).expect("json"))
}

fn kirby(seed: u64, cases: usize, tol: f64) -> Result<VerifyReport, CliError> {
    let mut report = VerifyReport::new("kirby", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_components = 4;
    for _ in 0..cases {
        let m = rng.gen_range(1..=3);
        let k = CORPUS_LEVELS[rng.gen_range(0..CORPUS_LEVELS.len())];
        let l = random_symmetric(&mut rng, m, 4);
        let walk_seed = rng.gen();
        let fuzz = kirby_fuzz(
            &SurgeryPresentation::closed(l.clone()),
            k,
            8,
            walk_seed,
            max_components,
        )?;
        let budget = Tolerance::new(tol).for_terms((k as f64).powi(max_components as i32));
        let skipped = fuzz.moves.len() - fuzz.applied();
        let note = (skipped > 0).then(|| format!("{skipped} moves skipped"));
        report.push(label(&l, k), fuzz.max_dev, fuzz.max_dev <= budget, note);
    }
    Ok(report)
}

fn reciprocity(seed: u64, cases: usize, tol: f64) -> Result<VerifyReport, CliError> {
    let mut report = VerifyReport::new("reciprocity", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..cases {
        let m = rng.gen_range(1..=3);
        let r = [2u64, 4, 6][rng.gen_range(0..3)];
        let l = random_nondegenerate(&mut rng, m, 4);
        let res = verify_reciprocity_dt(&l, r)?;
        let dev = (res.lhs - res.rhs).abs();
        let budget = Tolerance::new(tol).for_terms((r as f64).powi(m as i32));
        report.push(format!("dt {}", label(&l, r)), dev, dev <= budget, None);
    }
    for _ in 0..cases.div_ceil(2) {
        let rho = rng.gen_range(0..=2);
        let nu = rng.gen_range(1..=2);
        let reg = if rho == 0 {
            IntSymMatrix::empty()
        } else {
            random_nondegenerate(&mut rng, rho, 3)
        };
        let l = degenerate_from(&mut rng, &reg, nu);
        let r = [2u64, 4, 6][rng.gen_range(0..3)];
        let res = verify_reciprocity_degenerate(&l, r, NullExponentMode::FullNullity)?;
        let dev = (res.lhs - res.rhs).abs();
        let budget = Tolerance::new(tol).for_terms((r as f64).powi(l.dim() as i32));
        report.push(
            format!("full_nullity {}", label(&l, r)),
            dev,
            dev <= budget,
            None,
        );
    }
    let half =
        verify_reciprocity_degenerate(&IntSymMatrix::of(&[&[0]]), 2, NullExponentMode::PaperHalf)?;
    report.notes.push(format!(
        "paper_half exponent on L=[[0]], r=2: lhs {} vs rhs {} (not counted)",
        half.lhs, half.rhs
    ));
    Ok(report)
}

fn equivalence(corpus: &str) -> Result<VerifyReport, CliError> {
    let mut report = VerifyReport::new("equivalence", 0);
    let entries = load_corpus(corpus)?;
    let table = match build_phase_table(&entries) {
        Ok(t) => t,
        Err(e @ abtqft_core::Error::InconsistentPhase { .. }) => {
            report.fail(e.to_string());
            return Ok(report);
        }
        Err(e) => return Err(e.into()),
    };
    for e in &entries {
        match equivalence_ratio(&e.l, e.k) {
            Ok((ratio, sigma)) => {
                let phase = table.phase(sigma).cloned().unwrap_or_else(UnitPhase::one);
                let dev = (ratio - phase.eval()).abs();
                let unit = (ratio.abs() - 1.0).abs();
                report.push(
                    label(&e.l, e.k),
                    dev,
                    dev <= PHASE_TOL && unit <= PHASE_TOL,
                    None,
                );
            }
            Err(abtqft_core::Error::ZeroDenominator(_)) => {
                report.push(
                    label(&e.l, e.k),
                    0.0,
                    true,
                    Some("vanishing Gauss sum, skipped".into()),
                );
            }
            Err(err) => return Err(err.into()),
        }
    }
    if corpus == "default" {
        let frozen = frozen_phase_table()?;
        let matches = frozen.matches(&table);
        report.fixture_match = Some(matches);
        if !matches {
            report.fail("phase table differs from the committed fixture".into());
        }
    }
    report.phase_table = Some(to_json(&table));
    Ok(report)
}

fn modular(kmax: u64, tol: f64) -> Result<VerifyReport, CliError> {
    let mut report = VerifyReport::new("modular", 0);
    let expected = UnitPhase::from_ratio(1, 8).eval();
    for k in (2..=kmax).step_by(2) {
        let a = anomaly_check(k)?;
        let dev = (a.phase - expected).abs();
        report.push(format!("k={k}"), dev, a.ok && dev <= tol, None);
    }
    Ok(report)
}

fn maslov(seed: u64, cases: usize) -> Result<VerifyReport, CliError> {
    let mut report = VerifyReport::new("maslov", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..cases {
        let g = rng.gen_range(1..=3);
        let l: Vec<_> = (0..4).map(|_| random_lagrangian(&mut rng, g, 3)).collect();
        let mu = |a: usize, b: usize, c: usize| maslov_index(&l[a], &l[b], &l[c]);
        let cocycle = mu(0, 1, 2)? - mu(0, 1, 3)? + mu(0, 2, 3)? - mu(1, 2, 3)?;
        let antisym = mu(0, 1, 2)? + mu(1, 0, 2)?;
        let repeat = mu(0, 0, 1)?;
        let defect = (cocycle.abs() + antisym.abs() + repeat.abs()) as f64;
        report.push(
            format!("g={g} mu={}", mu(0, 1, 2)?),
            defect,
            defect == 0.0,
            None,
        );
    }
    Ok(report)
}

pub fn run(
    suite: Suite,
    seed: u64,
    cases: Option<usize>,
    kmax: u64,
    corpus: &str,
    tol: f64,
) -> Result<Outcome, CliError> {
    let report = match suite {
        Suite::Kirby => kirby(seed, cases.unwrap_or(100), tol)?,
        Suite::Reciprocity => reciprocity(seed, cases.unwrap_or(200), tol)?,
        Suite::Equivalence => equivalence(corpus)?,
        Suite::Modular => modular(kmax, tol)?,
        Suite::Maslov => maslov(seed, cases.unwrap_or(100))?,
    };
    Ok(Outcome {
        text: report.text(),
        json: to_json(&report),
        passed: report.passed,
    })
}
