//! CSV emission. Floats are written with 17 significant digits
//! (`{:.16e}`), which round-trips every `f64` exactly.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::network::EDGE_LIST_HEADER;
use crate::trace::RunTrace;

use super::sweep::SweepRow;

pub const TRACE_HEADER: &str =
    "run_id,round,agent_id,quality_label,signal,belief,indiv_error,in_degree,out_edges";
pub const METRICS_HEADER: &str = "run_id,round,truth,wc_error,wdn_error,centralization,shock_flag";
pub const SUMMARY_HEADER: &str =
    "lambda,rho,eta,replication_count,mean_wdn,mean_wc,p05_wdn,p95_wdn,normalized_wdn";

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_trace_rows<W: Write>(trace: &RunTrace, out: &mut W) -> io::Result<()> {
    for r in &trace.rounds {
        let in_degree = r.graph.as_ref().map(|g| g.in_degree());
        for i in 0..r.beliefs.len() {
            let edges = r.graph.as_ref().map(|g| g.format_out_edges(i)).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                trace.run_id,
                r.round,
                i,
                r.world.quality_of[i],
                fmt_f64(r.signals[i]),
                fmt_f64(r.beliefs[i]),
                fmt_f64(r.metrics.individual_errors[i]),
                in_degree.as_ref().map_or(0, |d| d[i]),
                edges,
            )?;
        }
    }
    Ok(())
}

pub fn write_metric_rows<W: Write>(trace: &RunTrace, out: &mut W) -> io::Result<()> {
    for r in &trace.rounds {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            trace.run_id,
            r.round,
            fmt_f64(r.world.truth),
            fmt_f64(r.metrics.wc_error),
            fmt_f64(r.metrics.wdn_error),
            r.metrics.centralization.map(fmt_f64).unwrap_or_default(),
            u8::from(r.shock_after),
        )?;
    }
    Ok(())
}

/// `round,src,dst,shares` for every round that had a network; the run id
/// is not part of this schema, so write one run per file.
pub fn write_edge_rows<W: Write>(trace: &RunTrace, out: &mut W) -> io::Result<()> {
    for r in &trace.rounds {
        if let Some(g) = &r.graph {
            g.write_edge_rows(r.round, out)?;
        }
    }
    Ok(())
}

fn write_file(path: &Path, header: &str, body: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>) -> Result<()> {
    let io_err = |source| Error::Io { path: path.to_path_buf(), source };
    let mut out = BufWriter::new(File::create(path).map_err(io_err)?);
    writeln!(out, "{header}").map_err(io_err)?;
    body(&mut out).map_err(io_err)?;
    out.flush().map_err(io_err)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceFiles {
    pub trace: PathBuf,
    pub metrics: PathBuf,
}

/// Write `trace.csv` and `metrics.csv` for all `traces` into `dir`.
pub fn emit_trace(traces: &[RunTrace], dir: &Path) -> Result<TraceFiles> {
    fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.to_path_buf(), source })?;
    let files = TraceFiles { trace: dir.join("trace.csv"), metrics: dir.join("metrics.csv") };
    write_file(&files.trace, TRACE_HEADER, |out| traces.iter().try_for_each(|t| write_trace_rows(t, out)))?;
    write_file(&files.metrics, METRICS_HEADER, |out| traces.iter().try_for_each(|t| write_metric_rows(t, out)))?;
    Ok(files)
}

pub fn emit_edges(trace: &RunTrace, path: &Path) -> Result<()> {
    write_file(path, EDGE_LIST_HEADER, |out| write_edge_rows(trace, out))
}

pub fn emit_summary(rows: &[SweepRow], path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.to_path_buf(), source })?;
    }
    write_file(path, SUMMARY_HEADER, |out| {
        for r in rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.lambda,
                r.rho,
                fmt_f64(r.eta),
                r.replication_count,
                fmt_f64(r.mean_wdn),
                fmt_f64(r.mean_wc),
                fmt_f64(r.p05_wdn),
                fmt_f64(r.p95_wdn),
                fmt_f64(r.normalized_wdn),
            )?;
        }
        Ok(())
    })
}
