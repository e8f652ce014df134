//! CSV serialization in full round-trip precision.
//!
//! Every writer takes a list of comment lines, written first with a `# `
//! prefix, so callers can record provenance ahead of the header row.

use std::io::{self, Write};

use crate::averaging::DecompositionTrace;
use crate::dynamics::WorldLine;
use crate::floquet::{PhiSample, StabilityZones};

/// Format with 17 significant digits.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write comments, a header row, then `rows` of preformatted cells.
pub fn write_table<W, I>(w: &mut W, comments: &[String], header: &[&str], rows: I) -> io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = Vec<String>>,
{
    for c in comments {
        writeln!(w, "# {c}")?;
    }
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

fn reals(values: &[f64]) -> Vec<String> {
    values.iter().map(|&v| fmt_real(v)).collect()
}

/// Columns `tau, t, x, dt_dtau, dx_dtau`, plus `y, z` when the transverse
/// displacement has been recovered.
pub fn write_world_line<W: Write>(w: &mut W, line: &WorldLine, comments: &[String]) -> io::Result<()> {
    let mut header = vec!["tau", "t", "x", "dt_dtau", "dx_dtau"];
    if line.transverse.is_some() {
        header.extend(["y", "z"]);
    }
    let rows = line.samples.iter().enumerate().map(|(i, s)| {
        let mut row = vec![s.tau, s.t, s.x, s.dt_dtau, s.dx_dtau];
        if let Some(tr) = &line.transverse {
            row.extend(tr[i]);
        }
        reals(&row)
    });
    write_table(w, comments, &header, rows)
}

/// Columns `eta, phi, abs_phi_minus_1, stable_flag`.
pub fn write_phi_scan<W: Write>(w: &mut W, samples: &[PhiSample], comments: &[String]) -> io::Result<()> {
    let rows = samples.iter().map(|s| {
        let mut row = reals(&[s.eta, s.phi, s.abs_phi_minus_1()]);
        row.push(u8::from(s.is_stable()).to_string());
        row
    });
    write_table(w, comments, &["eta", "phi", "abs_phi_minus_1", "stable_flag"], rows)
}

/// Columns `zone_index, kind, eta_left, eta_right`; an unbounded right edge is `inf`.
pub fn write_zones<W: Write>(w: &mut W, zones: &StabilityZones, comments: &[String]) -> io::Result<()> {
    let rows = zones.zones.iter().map(|z| {
        vec![
            z.index.to_string(),
            z.kind.name().to_string(),
            fmt_real(z.left),
            fmt_real(z.right),
        ]
    });
    write_table(w, comments, &["zone_index", "kind", "eta_left", "eta_right"], rows)
}

pub const TRACE_HEADER: [&str; 13] = [
    "T", "Jx", "dJx", "X", "dX", "xi", "dxi", "Xbar", "Xp", "xip", "env_VB7", "env_VD9", "env_VE4",
];

/// Decomposition trace; `xip` is evaluated with the Landau center `X`.
pub fn write_trace<W: Write>(w: &mut W, trace: &DecompositionTrace, comments: &[String]) -> io::Result<()> {
    let rows = (0..trace.len()).map(|i| {
        reals(&[
            trace.times[i],
            trace.jx[i],
            trace.djx[i],
            trace.x[i],
            trace.dx[i],
            trace.xi[i],
            trace.dxi[i],
            trace.x_bar[i],
            trace.x_p[i],
            trace.xi_p[i],
            trace.env_jacobi[i],
            trace.env_landau[i],
            trace.env_pondero[i],
        ])
    });
    write_table(w, comments, &TRACE_HEADER, rows)
}
