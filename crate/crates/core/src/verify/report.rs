//! Text serialisation of reports: one `key = value` document per check and
//! an aggregate CSV summary.

use std::io::Write;

use super::VerificationReport;
use crate::error::Result;
use crate::radial::io::fmt_f64;

pub const SUMMARY_HEADER: &str = "kind,params_hash,verdict,worst_violation,where_r,where_t,wall_ms";

pub fn write_report<W: Write>(mut w: W, rep: &VerificationReport) -> Result<()> {
    writeln!(w, "kind = {}", rep.kind.label())?;
    writeln!(w, "params = {}", rep.params)?;
    writeln!(w, "params_hash = {}", rep.params_hash)?;
    writeln!(w, "tolerance = {}", fmt_f64(rep.tolerance))?;
    writeln!(w, "verdict = {}", rep.verdict.label())?;
    writeln!(w, "worst_violation = {}", fmt_f64(rep.worst_violation))?;
    writeln!(w, "where_r = {}", fmt_f64(rep.location.0))?;
    writeln!(w, "where_t = {}", fmt_f64(rep.location.1))?;
    writeln!(w, "steps = {}", rep.stats.steps)?;
    writeln!(w, "snapshots = {}", rep.stats.snapshots)?;
    writeln!(w, "evaluated = {}", rep.stats.evaluated)?;
    writeln!(w, "skipped = {}", rep.stats.skipped)?;
    for (k, v) in &rep.details {
        writeln!(w, "{k} = {}", fmt_f64(*v))?;
    }
    writeln!(w, "wall_ms = {}", rep.wall_ms)?;
    Ok(())
}

pub fn summary_row(rep: &VerificationReport) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        rep.kind.label(),
        rep.params_hash,
        rep.verdict.label(),
        fmt_f64(rep.worst_violation),
        fmt_f64(rep.location.0),
        fmt_f64(rep.location.1),
        rep.wall_ms
    )
}

pub fn write_summary<'a, W: Write>(
    mut w: W,
    reports: impl IntoIterator<Item = &'a VerificationReport>,
) -> Result<()> {
    writeln!(w, "{SUMMARY_HEADER}")?;
    for rep in reports {
        writeln!(w, "{}", summary_row(rep))?;
    }
    Ok(())
}
