//! Long-form snapshot CSV (`t,r,u`) and the trajectory metadata report.
//!
//! Numbers are written with 17 significant digits, so reading a file back
//! reproduces every value bit for bit.

use std::io::{BufRead, Write};

use super::field::Field;
use super::grid::RadialGrid;
use super::solver::Trajectory;
use crate::error::{Error, Result};

pub const SNAPSHOT_HEADER: &str = "t,r,u";

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_snapshots<W: Write>(mut w: W, snapshots: &[Field]) -> Result<()> {
    writeln!(w, "{SNAPSHOT_HEADER}")?;
    for f in snapshots {
        let t = fmt_f64(f.time);
        for (r, u) in f.grid.nodes().zip(&f.values) {
            writeln!(w, "{t},{},{}", fmt_f64(r), fmt_f64(*u))?;
        }
    }
    Ok(())
}

/// Reads a snapshot CSV back into fields on a grid of dimension `dim`.
/// Rows sharing a `t` value form one snapshot.
pub fn read_snapshots<R: BufRead>(r: R, dim: usize) -> Result<Vec<Field>> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .transpose()?
        .ok_or_else(|| Error::Parse("empty snapshot file".into()))?;
    if header.trim() != SNAPSHOT_HEADER {
        return Err(Error::Parse(format!("expected header `{SNAPSHOT_HEADER}`, got `{header}`")));
    }
    let mut groups: Vec<(f64, Vec<f64>, Vec<f64>)> = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parse = |s: Option<&str>| -> Result<f64> {
            s.ok_or_else(|| Error::Parse(format!("line {}: missing column", i + 2)))?
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", i + 2)))
        };
        let mut cols = line.split(',');
        let (t, r, u) = (parse(cols.next())?, parse(cols.next())?, parse(cols.next())?);
        match groups.last_mut() {
            Some((gt, rs, us)) if *gt == t => {
                rs.push(r);
                us.push(u);
            }
            _ => groups.push((t, vec![r], vec![u])),
        }
    }
    groups
        .into_iter()
        .map(|(t, rs, us)| {
            let radius = *rs.last().ok_or_else(|| Error::Parse("empty snapshot".into()))?;
            let grid = RadialGrid::new(radius, rs.len() - 1, dim)
                .map_err(|e| Error::Parse(format!("snapshot at t = {t}: {e}")))?;
            Field::new(grid, us, t)
        })
        .collect()
}

/// Key–value metadata of a run.
pub fn write_trajectory_report<W: Write>(mut w: W, traj: &Trajectory) -> Result<()> {
    let opt = |v: Option<f64>| v.map_or_else(|| "none".to_string(), fmt_f64);
    writeln!(w, "snapshots = {}", traj.snapshots.len())?;
    writeln!(w, "final_time = {}", fmt_f64(traj.last().time))?;
    writeln!(w, "extinction_time = {}", opt(traj.extinction_time))?;
    writeln!(
        w,
        "extinct_node = {}",
        traj.extinct_node.map_or_else(|| "none".to_string(), |j| j.to_string())
    )?;
    writeln!(w, "extinct_nodes = {}", traj.stats.extinct_nodes)?;
    writeln!(w, "steps = {}", traj.stats.steps)?;
    writeln!(w, "dt_min = {}", fmt_f64(traj.stats.dt_min))?;
    writeln!(w, "dt_max = {}", fmt_f64(traj.stats.dt_max))?;
    Ok(())
}
