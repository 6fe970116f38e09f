use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use powres::ap_sources::{
    cm_curve_form, load_ap_table, provider_ap, tau_series_bounded, Answer, ApProvider,
    EllipticCurve, DEFAULT_TAU_BOUND,
};
use powres::arith::{sieve_range, PrimeRange};
use powres::classfield::{check_inertia, sample_inertia_primes, InertiaCheck};
use powres::cmforms::{ap_cm, CMFormSpec, CmValue};
use powres::density::{
    crosscheck_cm, estimate_many, predict_delta, CebotarevFilter, DeltaPrediction, DensityReport,
};
use powres::quadfield::{make_field, SplitType};
use powres::residue::pipibar_two_ways;

use crate::{parse, ApArgs, CliError, DensityArgs, Format, SourceArgs, Theorem, VerifyArgs};

/// What a command produced: text on stdout, and whether every check passed.
pub struct Outcome {
    pub stdout: String,
    pub pass: bool,
}

fn domain(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

enum Source {
    Cm(CMFormSpec),
    Other(ApProvider),
}

fn source(args: &SourceArgs) -> Result<Source, CliError> {
    if let Some(s) = &args.cm {
        return Ok(Source::Cm(parse::cm_spec(s)?));
    }
    if let Some(s) = &args.curve {
        let curve: EllipticCurve = s.parse().map_err(|e| CliError::Usage(format!("{e}")))?;
        return Ok(Source::Other(ApProvider::Elliptic(curve)));
    }
    if let Some(path) = &args.table {
        let table = load_ap_table(path).map_err(|e| CliError::Usage(e.to_string()))?;
        return Ok(Source::Other(ApProvider::File(Arc::new(table))));
    }
    // an explicit --delta-bound is the opt-in for tables past the default cap
    let n = match &args.delta_bound {
        Some(b) => parse::integer(b)? as usize,
        None => DEFAULT_TAU_BOUND,
    };
    let table = tau_series_bounded(n, n.max(DEFAULT_TAU_BOUND)).map_err(domain)?;
    Ok(Source::Other(ApProvider::Delta(Arc::new(table))))
}

impl Source {
    fn provider(&self) -> ApProvider {
        match self {
            Source::Cm(spec) => ApProvider::Cm(*spec),
            Source::Other(p) => p.clone(),
        }
    }
}

#[derive(Serialize)]
struct ApRow {
    p: u64,
    a_p: Option<i128>,
    status: &'static str,
}

pub fn cmd_ap(args: &ApArgs, format: Format) -> Result<Outcome, CliError> {
    let src = source(&args.source)?;
    let primes = match (&args.p, &args.range) {
        (Some(p), None) => {
            let p = parse::integer(p)?;
            if !powres::arith::is_prime(p) {
                return Err(CliError::Usage(format!("{p} is not prime")));
            }
            vec![p]
        }
        (None, Some(r)) => sieve_range(parse::range(r)?),
        _ => {
            return Err(CliError::Usage(
                "give exactly one of --p and --range".into(),
            ))
        }
    };
    let rows: Vec<ApRow> = primes
        .par_iter()
        .map(|&p| -> Result<ApRow, CliError> {
            let (a_p, status) = match &src {
                Source::Cm(spec) => match ap_cm(spec, p).map_err(domain)? {
                    CmValue::Value(v) => (Some(v), "value"),
                    CmValue::Zero => (Some(0), "zero"),
                    CmValue::Skip => (None, "skip"),
                },
                Source::Other(provider) => match provider_ap(provider, p).map_err(domain)? {
                    Answer::Value(v) => (Some(v), "value"),
                    Answer::Zero => (Some(0), "zero"),
                    Answer::ValueModP(_) => unreachable!("only CM providers reduce mod p"),
                    Answer::Skip => (None, "skip"),
                    Answer::Missing => (None, "missing"),
                },
            };
            Ok(ApRow { p, a_p, status })
        })
        .collect::<Result<_, _>>()?;
    let mut out = String::new();
    match format {
        Format::Text => {
            for r in &rows {
                let v = r
                    .a_p
                    .map_or_else(|| r.status.to_string(), |a| a.to_string());
                writeln!(out, "{} {}", r.p, v).expect("write to string");
            }
        }
        Format::Csv => {
            out.push_str("p,a_p,status\n");
            for r in &rows {
                let v = r.a_p.map_or_else(String::new, |a| a.to_string());
                writeln!(out, "{},{},{}", r.p, v, r.status).expect("write to string");
            }
        }
        Format::Json => {
            out = serde_json::to_string_pretty(&rows).expect("serializable") + "\n";
        }
    }
    Ok(Outcome {
        stdout: out,
        pass: true,
    })
}

/// Conjectural reference value `1/m` used when no theorem applies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reference {
    pub value: String,
    pub conjectural: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityRow {
    pub report: DensityReport,
    pub predicted: Option<DeltaPrediction>,
    pub reference: Option<Reference>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityOutput {
    pub source: String,
    pub rows: Vec<DensityRow>,
}

impl DensityRow {
    fn predicted_columns(&self) -> (String, String) {
        match (&self.predicted, &self.reference) {
            (Some(p), _) => (format!("{:.4}", p.value_f64()), p.source.to_string()),
            (None, Some(_)) => (
                format!("{:.4}", 1.0 / self.report.m as f64),
                "conjecture".into(),
            ),
            (None, None) => (String::new(), String::new()),
        }
    }
}

pub fn density_output(args: &DensityArgs) -> Result<DensityOutput, CliError> {
    let src = source(&args.source)?;
    let ms = parse::orders(&args.m)?;
    let range = parse::range(&args.range)?;
    let filter = CebotarevFilter::and(
        args.filter
            .iter()
            .map(|f| parse::filter(f))
            .collect::<Result<_, _>>()?,
    );
    let provider = src.provider();
    let reports = estimate_many(&provider, &ms, range, &filter).map_err(domain)?;
    let rows = reports
        .into_iter()
        .map(|report| {
            let predicted = match &src {
                Source::Cm(spec) if filter.is_all() => predict_delta(spec, report.m).ok(),
                _ => None,
            };
            // 1/m is only conjectured for forms without CM
            let reference = matches!(src, Source::Other(_)).then(|| Reference {
                value: format!("1/{}", report.m),
                conjectural: true,
            });
            DensityRow {
                report,
                predicted,
                reference,
            }
        })
        .collect();
    Ok(DensityOutput {
        source: provider.to_string(),
        rows,
    })
}

pub fn render_density(out: &DensityOutput, format: Format) -> String {
    let mut s = String::new();
    match format {
        Format::Text => {
            writeln!(s, "# {}", out.source).expect("write to string");
            writeln!(
                s,
                "{:>4} {:>12} {:>12} {:>8} {:>9}  source",
                "m", "numerator", "denominator", "ratio", "predicted"
            )
            .expect("write to string");
            for row in &out.rows {
                let (pred, src) = row.predicted_columns();
                let r = &row.report;
                writeln!(
                    s,
                    "{:>4} {:>12} {:>12} {:>8} {:>9}  {}",
                    r.m,
                    r.numerator,
                    r.denominator,
                    r.ratio_display(),
                    pred,
                    src
                )
                .expect("write to string");
            }
        }
        Format::Csv => {
            writeln!(s, "{}", DensityReport::CSV_HEADER).expect("write to string");
            for row in &out.rows {
                let (pred, src) = row.predicted_columns();
                let r = &row.report;
                writeln!(
                    s,
                    "{},{},{},{},{},{},{},{}",
                    r.m,
                    r.range.lo(),
                    r.range.hi(),
                    r.numerator,
                    r.denominator,
                    r.ratio_display(),
                    pred,
                    src
                )
                .expect("write to string");
            }
        }
        Format::Json => s = serde_json::to_string_pretty(out).expect("serializable") + "\n",
    }
    s
}

pub fn cmd_density(args: &DensityArgs, format: Format) -> Result<Outcome, CliError> {
    let out = density_output(args)?;
    let rendered = render_density(&out, format);
    let stdout = match &args.output {
        Some(path) => {
            std::fs::write(path, &rendered)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            let mut summary = String::new();
            for row in &out.rows {
                writeln!(summary, "{}", row.report).expect("write to string");
            }
            summary
        }
        None => rendered,
    };
    Ok(Outcome { stdout, pass: true })
}

/// Machine-readable result of `verify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub theorem: String,
    pub params: String,
    pub pass: bool,
    pub checked: u64,
    pub mismatches: u64,
    pub first_mismatch: Option<u64>,
    pub empirical: Option<f64>,
    pub predicted: Option<String>,
    pub tolerance: Option<f64>,
}

fn spec_from(args: &VerifyArgs, forced_d: Option<u64>) -> Result<CMFormSpec, CliError> {
    let d = match (forced_d, args.d) {
        (Some(f), Some(d)) if f != d => {
            return Err(CliError::Usage(format!(
                "this check only applies to d = {f}"
            )));
        }
        (Some(f), _) => f,
        (None, Some(d)) => d,
        (None, None) => return Err(CliError::Usage("--d is required".into())),
    };
    let alpha = parse::rational(args.alpha.as_deref().unwrap_or("1"))?;
    parse::cm_from_parts(d, args.k.unwrap_or(2), alpha)
}

fn verify_range(args: &VerifyArgs, default: &str) -> Result<PrimeRange, CliError> {
    parse::range(args.range.as_deref().unwrap_or(default))
}

fn identity_verdict(
    theorem: Theorem,
    params: String,
    checked: u64,
    mismatches: u64,
    first: Option<u64>,
) -> Verdict {
    Verdict {
        theorem: theorem.name().into(),
        params,
        pass: mismatches == 0 && checked > 0,
        checked,
        mismatches,
        first_mismatch: first,
        empirical: None,
        predicted: None,
        tolerance: None,
    }
}

pub fn verdict(args: &VerifyArgs) -> Result<Verdict, CliError> {
    let th = args.theorem;
    match th {
        Theorem::Pipibar => {
            let d = args
                .d
                .ok_or_else(|| CliError::Usage("--d is required".into()))?;
            let field = make_field(d).map_err(domain)?;
            let range = verify_range(args, "5:1e5")?;
            let results: Vec<(u64, bool)> = sieve_range(range)
                .into_par_iter()
                .filter_map(|p| match field.split_type(p) {
                    SplitType::Split(sp) => Some(pipibar_two_ways(&sp).map(|(a, b)| (p, a == b))),
                    _ => None,
                })
                .collect::<Result<_, _>>()
                .map_err(domain)?;
            let bad: Vec<u64> = results.iter().filter(|r| !r.1).map(|r| r.0).collect();
            Ok(identity_verdict(
                th,
                format!("d={d} {range}"),
                results.len() as u64,
                bad.len() as u64,
                bad.first().copied(),
            ))
        }
        Theorem::PropSqr | Theorem::PropCube => {
            let (m, forced) = if th == Theorem::PropSqr {
                (2, None)
            } else {
                (3, Some(3))
            };
            let spec = spec_from(args, forced)?;
            let range = verify_range(args, "5:1e5")?;
            let c = crosscheck_cm(&spec, m, range).map_err(domain)?;
            Ok(identity_verdict(
                th,
                format!("{spec} m={m} {range}"),
                c.checked,
                c.mismatches,
                c.first_mismatch,
            ))
        }
        Theorem::ThmSqrs | Theorem::ThmCube | Theorem::ThmHigh => {
            let (spec, m) = match th {
                Theorem::ThmSqrs => (spec_from(args, None)?, 2),
                Theorem::ThmCube => (spec_from(args, Some(3))?, 3),
                _ => (
                    spec_from(args, None)?,
                    args.m
                        .ok_or_else(|| CliError::Usage("--m is required".into()))?,
                ),
            };
            let range = verify_range(args, "5:1e6")?;
            let tol = args.tol;
            let pred = predict_delta(&spec, m).map_err(domain)?;
            let rep = estimate_many(&ApProvider::Cm(spec), &[m], range, &CebotarevFilter::All)
                .map_err(domain)?
                .pop()
                .expect("one report");
            let emp = rep.ratio_f64();
            let pass = emp.is_some_and(|e| (e - pred.value_f64()).abs() <= tol);
            Ok(Verdict {
                theorem: th.name().into(),
                params: format!("{spec} m={m} {range}"),
                pass,
                checked: rep.denominator,
                mismatches: 0,
                first_mismatch: None,
                empirical: emp,
                predicted: Some(pred.to_string()),
                tolerance: Some(tol),
            })
        }
        Theorem::Ravi => {
            let d = args
                .d
                .ok_or_else(|| CliError::Usage("--d is required".into()))?;
            let m = args
                .m
                .ok_or_else(|| CliError::Usage("--m is required".into()))?;
            let (curve, spec) = cm_curve_form(d).ok_or_else(|| {
                CliError::Domain(format!("no class-number-one CM curve for d = {d}"))
            })?;
            let field = spec.field();
            let range = verify_range(args, "5:1e4")?;
            let primes = sample_inertia_primes(&curve, field, m, range, args.samples, args.seed);
            let checks: Vec<InertiaCheck> = primes
                .par_iter()
                .map(|&p| check_inertia(&curve, field, m, p))
                .collect::<Result<_, _>>()
                .map_err(domain)?;
            let bad: Vec<u64> = checks
                .iter()
                .filter(|c| !c.agrees)
                .map(|c| c.profile.p)
                .collect();
            Ok(identity_verdict(
                th,
                format!("d={d} m={m} curve=[{curve}] {range}"),
                checks.len() as u64,
                bad.len() as u64,
                bad.first().copied(),
            ))
        }
    }
}

pub fn render_verdict(v: &Verdict, format: Format) -> String {
    let status = if v.pass { "PASS" } else { "FAIL" };
    match format {
        Format::Text => match (v.empirical, &v.predicted) {
            (emp, Some(pred)) => format!(
                "{status} {} {}: empirical {} predicted {} tol {}\n",
                v.theorem,
                v.params,
                emp.map_or_else(|| "-".into(), |e| format!("{e:.4}")),
                pred,
                v.tolerance.unwrap_or_default()
            ),
            _ => format!(
                "{status} {} {}: {} checked, {} mismatches{}\n",
                v.theorem,
                v.params,
                v.checked,
                v.mismatches,
                v.first_mismatch.map_or_else(String::new, |p| format!(" (first at p={p})"))
            ),
        },
        Format::Csv => format!(
            "theorem,params,pass,checked,mismatches,empirical,predicted,tolerance\n{},\"{}\",{},{},{},{},\"{}\",{}\n",
            v.theorem,
            v.params,
            v.pass,
            v.checked,
            v.mismatches,
            v.empirical.map_or_else(String::new, |e| format!("{e:.4}")),
            v.predicted.clone().unwrap_or_default(),
            v.tolerance.map_or_else(String::new, |t| t.to_string())
        ),
        Format::Json => serde_json::to_string_pretty(v).expect("serializable") + "\n",
    }
}

pub fn cmd_verify(args: &VerifyArgs, format: Format) -> Result<Outcome, CliError> {
    let v = verdict(args)?;
    Ok(Outcome {
        stdout: render_verdict(&v, format),
        pass: v.pass,
    })
}
