use std::io::{self, Write};

use anticirc::classifier::{Certificate, VerifyReport};
use anticirc::combinatorics::{fmt_pattern, SignFactReport, SumSigns};
use anticirc::oracle::{MatrixPsd, MinimizerSource, SphereMinResult};
use anticirc::{Status, Verdict};

use crate::VerdictDocument;

/// Shortest round-trip form, in exponent notation outside `[1e-4, 1e15)`.
pub(crate) fn num(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && !(1e-4..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

pub(crate) fn tuple(x: &[f64]) -> String {
    let parts: Vec<String> = x.iter().map(|&v| num(v)).collect();
    format!("({})", parts.join(", "))
}

fn status(s: Status) -> &'static str {
    match s {
        Status::Psd => "PSD",
        Status::NotPsd => "NotPSD",
        Status::Uncovered => "Uncovered",
    }
}

fn mark(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

pub(crate) fn verdict(out: &mut dyn Write, doc: &VerdictDocument) -> io::Result<()> {
    let v = &doc.verdict;
    writeln!(out, "status: {}", status(v.status))?;
    if let Some(case) = v.case_tag {
        let name = serde_json::to_value(case).ok().and_then(|c| c.as_str().map(str::to_owned)).unwrap_or_default();
        writeln!(out, "case: {name}")?;
    }
    for c in &v.certificates {
        match c {
            Certificate::PowerSum { v0, t } => writeln!(
                out,
                "certificate: f(x) = {t} * {v0} * (x_1 + .. + x_n)^m + {} * {v0} * (x_1 - x_2 + ..)^m  [t = {t}]",
                1.0 - t
            )?,
            Certificate::StrongHankel { size, matrix_eigen_floor, passed } => writeln!(
                out,
                "certificate: {size}x{size} Hankel matrix, min eigenvalue {matrix_eigen_floor:.3e} ({})",
                if *passed { "PSD" } else { "not PSD" }
            )?,
        }
    }
    if let Some(w) = &v.witness {
        writeln!(out, "witness: x = {} [{}]", tuple(&w.witness.x), w.witness.label)?;
        writeln!(out, "witness value: f(x) = {}, f(x/|x|) = {}", num(w.value), num(w.unit_value))?;
    }
    if let Some(ev) = &v.evidence {
        writeln!(
            out,
            "oracle minimum: {} at {} over {} starts (not a certificate)",
            num(ev.min_value),
            tuple(&ev.argmin),
            ev.starts
        )?;
    }
    for note in &v.notes {
        writeln!(out, "note: {note}")?;
    }
    writeln!(out, "oracle seed: {} ({} starts)", doc.oracle_seed, doc.oracle_starts)?;
    if let Some(report) = &doc.verification {
        checks(out, report)?;
        writeln!(out, "verification: {}", mark(report.passed()))?;
    }
    Ok(())
}

fn checks(out: &mut dyn Write, report: &VerifyReport) -> io::Result<()> {
    for c in &report.checks {
        writeln!(out, "{} {}: {}", mark(c.passed), c.name, c.detail)?;
    }
    Ok(())
}

pub(crate) fn certification(out: &mut dyn Write, v: &Verdict, report: &VerifyReport) -> io::Result<()> {
    writeln!(out, "status: {}", status(v.status))?;
    checks(out, report)?;
    if v.status == Status::Uncovered {
        writeln!(out, "nothing to certify: no closed-form criterion covers this tensor")?;
    }
    writeln!(out, "certification: {}", mark(report.passed()))
}

pub(crate) fn sign_facts(out: &mut dyn Write, report: &SignFactReport) -> io::Result<()> {
    for fact in &report.facts {
        let t = &fact.table;
        writeln!(
            out,
            "{} m={:<2} {:<10} {:<26} S = ({}, {}, {})",
            mark(fact.passed),
            t.order,
            fmt_pattern(&t.pattern),
            fact.expectation.to_string(),
            t.sums[0],
            t.sums[1],
            t.sums[2]
        )?;
    }
    let failed = report.failures().count();
    writeln!(out, "{} facts, {failed} failed", report.facts.len())
}

pub(crate) fn sphere_min(out: &mut dyn Write, res: &SphereMinResult) -> io::Result<()> {
    writeln!(out, "min value: {}", num(res.min_value))?;
    writeln!(out, "argmin: {}", tuple(&res.argmin))?;
    let source = match &res.source {
        MinimizerSource::RandomStart { start } => format!("random start {start}"),
        MinimizerSource::Candidate { label } => format!("candidate {label}"),
        MinimizerSource::PolishedCandidate { label } => format!("polished candidate {label}"),
    };
    writeln!(out, "source: {source}")?;
    writeln!(
        out,
        "starts: {} ({} converged), candidates: {}, seed: {}",
        res.starts, res.converged_starts, res.candidates, res.seed
    )
}

pub(crate) fn signs(s: SumSigns) -> &'static str {
    match s {
        SumSigns::ForcedConstant => "ForcedConstant (all sums share a sign; the sequence is constant)",
        SumSigns::MixedSigns => "MixedSigns (some D_i < 0 and some D_j > 0)",
    }
}

pub(crate) fn matrix(out: &mut dyn Write, rows: &[Vec<f64>], psd: &MatrixPsd) -> io::Result<()> {
    for row in rows {
        let cells: Vec<String> = row.iter().map(|a| format!("{a:>10}")).collect();
        writeln!(out, "{}", cells.join(" "))?;
    }
    let eig: Vec<String> = psd.eigenvalues.iter().map(|e| format!("{e:.6e}")).collect();
    writeln!(out, "eigenvalues: {}", eig.join(", "))?;
    writeln!(
        out,
        "PSD: {} (min eigenvalue {:.3e}, floor -{:.1e})",
        if psd.passed { "yes" } else { "no" },
        psd.min_eigenvalue,
        psd.floor
    )
}
