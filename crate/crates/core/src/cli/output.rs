use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use super::{RunConfig, SymbolRow, VERSION};
use crate::analysis::{Analysis, AnalysisConfig, AnalysisError};
use crate::bounds::{self, Verdict};
use crate::dtn::SpectrumTable;

/// 15 significant digits.
fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.14e}")
    }
}

fn quoted(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

fn sign(s: Option<i8>) -> String {
    s.map_or("none".into(), |v| format!("{v:+}"))
}

pub(super) fn header(cfg: &RunConfig) -> String {
    let mut h = format!("# ite {VERSION}\n");
    for line in cfg.echo() {
        let _ = writeln!(h, "# {line}");
    }
    h
}

fn spectra_csv(header: &str, tables: [&SpectrumTable; 2]) -> String {
    let mut s = format!("{header}lambda,mode,multiplicity,family\n");
    for t in tables {
        for e in &t.entries {
            let _ = writeln!(s, "{},{},{},{}", num(e.lambda), e.mode, e.multiplicity, t.family.tag());
        }
    }
    s
}

fn ites_csv(header: &str, out: &Analysis) -> String {
    let mut s = format!("{header}lambda,mode,multiplicity,source,n_t,n_t_positive\n");
    let (mut total, mut positive) = (0, 0);
    for r in &out.ites.roots {
        total += r.multiplicity;
        if r.lambda > 0.0 {
            positive += r.multiplicity;
        }
        let _ = writeln!(s, "{},{},{},{},{total},{positive}", num(r.lambda), r.mode, r.multiplicity, r.source.tag());
    }
    s
}

fn events_csv(header: &str, out: &Analysis) -> String {
    let mut s = format!("{header}lambda,mode,kind,delta_n1,delta_n2,mu_left,mu_right\n");
    for e in &out.ledger.events {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            num(e.lambda),
            e.mode,
            e.kind.tag(),
            e.delta_n1,
            e.delta_n2,
            num(e.mu_left),
            num(e.mu_right)
        );
    }
    s
}

fn bounds_csv(header: &str, out: &Analysis) -> String {
    let mut s = format!("{header}id,verdict,lhs,rhs,tolerance,detail\n");
    for r in &out.reports {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            r.id.tag(),
            r.verdict.tag(),
            num(r.lhs),
            num(r.rhs),
            num(r.tolerance),
            quoted(&r.detail)
        );
    }
    s
}

fn summary(header: &str, ac: &AnalysisConfig, out: &Analysis) -> String {
    let lmax = ac.lambda_max;
    let mut s = header.to_string();
    let _ = writeln!(s, "\nstatus: {}", if out.all_hold() { "ok" } else { "bound violated" });
    let _ = writeln!(s, "\n[gates]");
    let _ = writeln!(s, "elliptic = {}", out.verdict.elliptic);
    let _ = writeln!(s, "discrete = {}", out.verdict.discrete_ok);
    let _ = writeln!(s, "sigma = {:+}", out.sigma);
    let _ = writeln!(s, "gamma = {}", num(bounds::gamma(&ac.media, &ac.domain)));
    let _ = writeln!(s, "\n[flow]");
    let _ = writeln!(s, "mode_cap = {}", out.ledger.mode_cap);
    let _ = writeln!(s, "n_minus_0 = {}", out.ledger.n_minus_0);
    let _ = writeln!(s, "n1(lambda_max) = {}", out.ledger.n1(f64::INFINITY));
    let _ = writeln!(s, "n2(lambda_max) = {}", out.ledger.n2(f64::INFINITY));
    let (up, down, touch) = out.ledger.zero_counts(f64::INFINITY);
    let _ = writeln!(s, "zero events (up, down, touch) = ({up}, {down}, {touch})");
    let singular = out.pole_jumps.iter().filter(|j| j.is_singular_candidate()).count();
    let _ = writeln!(s, "pole jumps checked = {}, singular candidates = {singular}", out.pole_jumps.len());
    let _ = writeln!(s, "density refinements = {}", out.refinements_used);
    let _ = writeln!(s, "\n[counts at lambda_max]");
    let _ = writeln!(s, "N = {}", out.laplace.count_unchecked(lmax));
    let _ = writeln!(s, "N_A = {}", out.medium.count_unchecked(lmax));
    let _ = writeln!(s, "N_T = {}", out.ites.counting(lmax));
    let _ = writeln!(s, "N_T (positive only) = {}", out.ites.counting_positive(lmax));
    let first = out.ites.first_positive().map_or("none".into(), num);
    let _ = writeln!(s, "first positive ITE = {first}");
    for r in &out.reports {
        let _ = writeln!(s, "\n[{}]", r.id.tag());
        let _ = writeln!(s, "verdict = {}", r.verdict.tag());
        if r.verdict != Verdict::NotApplicable {
            let _ = writeln!(s, "lhs = {}", num(r.lhs));
            let _ = writeln!(s, "rhs = {}", num(r.rhs));
            let _ = writeln!(s, "tolerance = {}", num(r.tolerance));
        }
        let _ = writeln!(s, "detail = {}", r.detail);
    }
    s
}

pub(super) fn write_all(dir: &Path, header: &str, ac: &AnalysisConfig, out: &Analysis) -> io::Result<()> {
    fs::write(dir.join("spectra.csv"), spectra_csv(header, [&out.laplace, &out.medium]))?;
    fs::write(dir.join("ites.csv"), ites_csv(header, out))?;
    fs::write(dir.join("flow_events.csv"), events_csv(header, out))?;
    fs::write(dir.join("bounds_report.csv"), bounds_csv(header, out))?;
    fs::write(dir.join("summary.txt"), summary(header, ac, out))
}

pub(super) fn write_failure(dir: &Path, header: &str, err: &AnalysisError) -> io::Result<()> {
    let text = format!("{header}\nstatus: failed (exit {})\nerror: {err}\n", err.exit_code());
    fs::write(dir.join("summary.txt"), text)
}

pub(super) fn symbols_csv(header: &str, rows: &[SymbolRow]) -> String {
    let mut s = format!("{header}sample,line,d,elliptic,sigma,sampled_sigma,discrete_ok,gap_det\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            r.index,
            r.line,
            r.d,
            r.elliptic,
            sign(r.sigma),
            sign(r.sampled_sigma),
            r.discrete_ok,
            num(r.gap_det)
        );
    }
    s
}
