use std::path::Path;

use abtqft_core::compare::{cs_closed, VANISHING_TOL};
use abtqft_core::intlinalg::{regular_decomposition, signature, JsonInt};
use abtqft_core::numeric::{approx_eq, ApproxComplex, PolarValue, Rational, Tolerance};
use abtqft_core::surgery::{rt_raw_closed, PresentationFile, SurgeryPresentation};
use num_traits::Signed;
use serde::Serialize;

use crate::catalog::Catalog;
use crate::{to_json, CliError, Outcome, Side};

#[derive(Serialize)]
struct InvariantReport {
    source: String,
    k: u64,
    components: usize,
    insertions: usize,
    sigma_reg: i64,
    b1: usize,
    torsion_order: JsonInt,
    m_exponent: Rational,
    #[serde(skip_serializing_if = "Option::is_none")]
    rt: Option<ApproxComplex>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cs: Option<ApproxComplex>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ratio: Option<ApproxComplex>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ratio_skipped: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    expected: Option<PolarValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    expected_match: Option<bool>,
}

fn resolve(
    catalog: &Catalog,
    source: &str,
) -> Result<
    (
        SurgeryPresentation,
        Option<u64>,
        Option<crate::catalog::CatalogEntry>,
    ),
    CliError,
> {
    if let Some(entry) = catalog.get(source) {
        return Ok((entry.presentation.clone(), None, Some(entry.clone())));
    }
    let text = if source.trim_start().starts_with('{') {
        source.to_string()
    } else if Path::new(source).is_file() {
        crate::read_file(Path::new(source))?
    } else {
        return Err(CliError::Usage(format!(
            "{source:?} is neither a catalog entry nor a presentation file"
        )));
    };
    let file: PresentationFile =
        serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("presentation: {e}")))?;
    Ok((file.presentation, file.k, None))
}

pub fn run(
    catalog: &Catalog,
    source: &str,
    k: Option<u64>,
    side: Side,
    tol: f64,
) -> Result<Outcome, CliError> {
    let (p, file_k, entry) = resolve(catalog, source)?;
    let k = k.or(file_k).ok_or_else(|| {
        CliError::Usage("no level given: pass --k or set \"k\" in the file".into())
    })?;
    if k == 0 || k % 2 == 1 {
        return Err(abtqft_core::Error::InvalidLevel(k).into());
    }
    let side = match side {
        Side::Cs if !p.is_closed() => {
            return Err(CliError::Usage(
                "the Chern-Simons side needs a presentation without insertions; use --side rt"
                    .into(),
            ))
        }
        Side::Both if !p.is_closed() => Side::Rt,
        s => s,
    };
    let l = p.surgery_matrix();
    let dec = regular_decomposition(l);
    let rt = match side {
        Side::Cs => None,
        _ => Some(rt_raw_closed(&p, k)?),
    };
    let cs = match side {
        Side::Rt => None,
        _ => Some(cs_closed(l, k)?.value),
    };
    let (ratio, ratio_skipped) = match (rt, cs) {
        (Some(_), Some(b)) if b.abs() < VANISHING_TOL => {
            (None, Some("vanishing Gauss sum".to_string()))
        }
        (Some(a), Some(b)) => (a.checked_div(b), None),
        _ => (None, None),
    };
    let expected = entry.as_ref().and_then(|e| e.expected_at(k)).cloned();
    let budget = Tolerance::new(tol).for_terms((k as f64).powi(p.components() as i32));
    let expected_match = match (&expected, rt, cs) {
        (Some(want), Some(got), _) | (Some(want), None, Some(got)) => {
            Some(approx_eq(got, want.to_approx(), budget))
        }
        _ => None,
    };
    let report = InvariantReport {
        source: source.to_string(),
        k,
        components: p.components(),
        insertions: p.insertions(),
        sigma_reg: signature(&dec.regular),
        b1: dec.nullity,
        torsion_order: JsonInt(dec.regular.det().abs()),
        m_exponent: Rational::new(dec.nullity as i64 - 1, 2),
        rt,
        cs,
        ratio,
        ratio_skipped,
        expected,
        expected_match,
    };
    let mut lines = vec![
        format!("source        {}", report.source),
        format!("k             {}", report.k),
        format!("sigma_reg     {}", report.sigma_reg),
        format!("b1            {}", report.b1),
        format!("torsion       {}", report.torsion_order.0),
        format!("m_M           {}", report.m_exponent),
    ];
    if let Some(v) = rt {
        lines.push(format!("rt            {v}"));
    }
    if let Some(v) = cs {
        lines.push(format!("cs            {v}"));
    }
    if let Some(v) = ratio {
        lines.push(format!("ratio         {v}"));
    }
    if let Some(why) = &report.ratio_skipped {
        lines.push(format!("ratio         skipped ({why})"));
    }
    if let Some(ok) = expected_match {
        lines.push(format!(
            "expected      {}",
            if ok { "match" } else { "MISMATCH" }
        ));
    }
    Ok(Outcome {
        text: lines.join("\n"),
        json: to_json(&report),
        passed: expected_match.unwrap_or(true),
    })
}
