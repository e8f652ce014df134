//! One function per subcommand. Each returns the CSV body plus a JSON
//! summary; [`dispatch`] adds the echoed config and routes the output.

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use planargeo::averaging::{self, DecompositionTrace};
use planargeo::dynamics::{self, IntegrationOptions};
use planargeo::floquet::{self, ScanConfig};
use planargeo::output::{self, fmt_real};
use planargeo::{LongitudinalState, QuadratureSolution, ScalarField2D};

use crate::config::RawConfig;
use crate::{CliError, Command};

/// Largest relative deviation for the plane-wave quadrature cross-check.
pub const QUADRATURE_CHECK_TOL: f64 = 1e-8;

/// Default curvature grid size per axis.
pub const DEFAULT_GRID: usize = 100;

/// Cycles used by `resonance` when `cycles` is not set.
pub const RESONANCE_CYCLES: f64 = 30.0;

/// Products of one command run.
#[derive(Debug)]
pub struct Report {
    pub csv: Vec<u8>,
    /// Extra CSV files written next to `--out`, keyed by file suffix.
    pub extra: Vec<(&'static str, Vec<u8>)>,
    pub summary: Value,
}

pub fn dispatch(command: Command, cfg: &RawConfig, out: Option<&Path>) -> Result<(), CliError> {
    let mut header = cfg.echo_lines().join("\n");
    header.push('\n');
    let report = execute(command, cfg)?;
    let mut summary = report.summary;
    summary["command"] = json!(command.name());

    match out {
        Some(path) => {
            write_file(path, &header, &report.csv)?;
            for (suffix, body) in &report.extra {
                let extra = sibling(path, suffix);
                write_file(&extra, &header, body)?;
                summary["files"][*suffix] = json!(extra.display().to_string());
            }
            let text = serde_json::to_string_pretty(&summary).map_err(|e| CliError::Runtime(e.to_string()))?;
            std::fs::write(path.with_extension("json"), text + "\n")?;
            eprintln!("{}", summary_line(&summary));
        }
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(header.as_bytes())?;
            stdout.write_all(&report.csv)?;
            stdout.flush()?;
            eprintln!("{summary}");
        }
    }
    Ok(())
}

pub fn execute(command: Command, cfg: &RawConfig) -> Result<Report, CliError> {
    match command {
        Command::Orbit => orbit(cfg),
        Command::Curvature => curvature(cfg),
        Command::Floquet => floquet_scan(cfg, true),
        Command::Zones => floquet_scan(cfg, false),
        Command::Jacobi => jacobi(cfg),
        Command::Landau => landau(cfg),
        Command::Pondero => pondero(cfg),
        Command::Resonance => resonance(cfg),
    }
}

fn write_file(path: &Path, header: &str, body: &[u8]) -> Result<(), CliError> {
    let mut bytes = header.as_bytes().to_vec();
    bytes.extend_from_slice(body);
    std::fs::write(path, bytes).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

/// `dir/stem.suffix.csv` next to `path`.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}.csv"))
}

fn summary_line(summary: &Value) -> String {
    let Some(map) = summary.as_object() else {
        return summary.to_string();
    };
    map.iter()
        .filter(|(_, v)| v.is_number() || v.is_boolean() || v.is_string())
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn buffer(f: impl FnOnce(&mut Vec<u8>) -> io::Result<()>) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

/// JSON number, or null for non-finite values.
fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn options(cfg: &RawConfig, default_tol: f64) -> Result<IntegrationOptions, CliError> {
    Ok(IntegrationOptions::with_tol(cfg.tol(default_tol)?).samples_per_cycle(cfg.samples_per_cycle()?))
}

fn cycles(cfg: &RawConfig, default: f64) -> Result<f64, CliError> {
    let c: f64 = cfg.get_or("cycles", default)?;
    if !(c.is_finite() && c >= 0.0) {
        return Err(CliError::usage(format!("`cycles` must be finite and >= 0, got {c}")));
    }
    Ok(c)
}

fn jacobi_initial(cfg: &RawConfig) -> Result<[f64; 2], CliError> {
    Ok([cfg.get_or("j0", 1.0)?, cfg.get_or("dj0", 0.0)?])
}

fn orbit(cfg: &RawConfig) -> Result<Report, CliError> {
    let sc = cfg.scenario()?;
    let field = ScalarField2D::new(sc.model(), sc.momenta);
    let opts = IntegrationOptions::with_tol(sc.tol).samples_per_cycle(sc.samples_per_cycle);
    let initial = LongitudinalState::on_shell(&field, sc.t0, sc.x0, sc.dx_dtau0);
    let tau_end = sc.cycles * sc.params.optical_cycle();
    let line = dynamics::integrate_longitudinal(&field, initial, tau_end, &opts)?;
    let line = dynamics::recover_transverse(&field, &line)?;
    let residual = line.max_hamiltonian_residual(&field);

    let mut summary = json!({
        "kind": sc.kind.name(),
        "eta": num(sc.params.eta()),
        "samples": line.len(),
        "tau_end": num(tau_end),
        "max_hamiltonian_residual": num(residual),
    });
    if sc.kind == planargeo::ModelKind::PlaneWaveElliptic {
        let sol = QuadratureSolution::new(sc.params, sc.momenta, &initial)?;
        let taus: Vec<f64> = line.samples.iter().map(|s| s.tau).collect();
        let reference = sol.sample(&taus);
        let deviation = line
            .samples
            .iter()
            .zip(&reference.samples)
            .flat_map(|(a, b)| {
                [(a.t, b.t), (a.x, b.x), (a.dt_dtau, b.dt_dtau), (a.dx_dtau, b.dx_dtau)]
            })
            .map(|(a, b)| (a - b).abs() / a.abs().max(b.abs()).max(1.0))
            .fold(0.0, f64::max);
        summary["quadrature_max_rel_deviation"] = num(deviation);
        summary["quadrature_check_passed"] = json!(deviation < QUADRATURE_CHECK_TOL);
    }
    let csv = buffer(|w| output::write_world_line(w, &line, &["orbit".into()]))?;
    Ok(Report { csv, extra: Vec::new(), summary })
}

fn curvature(cfg: &RawConfig) -> Result<Report, CliError> {
    let model = cfg.field_model()?;
    let field = ScalarField2D::new(model, cfg.momenta()?);
    let cycle = field.params().optical_cycle();
    let n: usize = cfg.get_or("grid", DEFAULT_GRID)?;
    if n == 0 {
        return Err(CliError::usage("`grid` must be positive"));
    }
    let range = |lo: &str, hi: &str| -> Result<(f64, f64), CliError> {
        let a: f64 = cfg.get_or(lo, 0.0)?;
        let b: f64 = cfg.get_or(hi, cycle)?;
        if !(a.is_finite() && b.is_finite() && b >= a) {
            return Err(CliError::usage(format!("need finite `{lo}` <= `{hi}`, got {a}, {b}")));
        }
        Ok((a, b))
    };
    let (t_min, t_max) = range("t_min", "t_max")?;
    let (x_min, x_max) = range("x_min", "x_max")?;
    // n points per axis covering [min, max) so one cycle is not sampled twice.
    let axis = |lo: f64, hi: f64| -> Vec<f64> { (0..n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect() };
    let (ts, xs) = (axis(t_min, t_max), axis(x_min, x_max));

    let mut rows = Vec::with_capacity(n * n);
    let mut worst: f64 = 0.0;
    for &t in &ts {
        for &x in &xs {
            let k = field.gaussian_curvature(t, x);
            worst = worst.max(k.abs());
            rows.push(vec![fmt_real(t), fmt_real(x), fmt_real(k)]);
        }
    }
    let csv = buffer(|w| output::write_table(w, &["curvature".into()], &["t", "x", "K"], rows))?;
    let summary = json!({
        "kind": field.model().kind().name(),
        "eta": num(field.params().eta()),
        "grid": n,
        "max_abs_curvature": num(worst),
    });
    Ok(Report { csv, extra: Vec::new(), summary })
}

fn floquet_scan(cfg: &RawConfig, with_phi: bool) -> Result<Report, CliError> {
    let defaults = ScanConfig::default();
    let scan_cfg = ScanConfig {
        eta_min: cfg.get_or("eta_min", defaults.eta_min)?,
        eta_max: cfg.get_or("eta_max", defaults.eta_max)?,
        step: cfg.get_or("step", defaults.step)?,
        refine_tol: cfg.get_or("refine_tol", defaults.refine_tol)?,
        p_y: cfg.get_or("p_y", 0.0)?,
        tol: cfg.tol(defaults.tol)?,
    };
    let scan = floquet::scan(&scan_cfg)?;
    let zones = buffer(|w| output::write_zones(w, &scan.zones, &["zones".into()]))?;
    let summary = json!({
        "eta_min": num(scan_cfg.eta_min),
        "eta_max": num(scan_cfg.eta_max),
        "step": num(scan_cfg.step),
        "rows": scan.samples.len(),
        "all_stable": scan.samples.iter().all(|s| s.is_stable()),
        "first_boundary": scan.zones.boundaries().first().map_or(Value::Null, |&b| num(b)),
        "boundaries": scan.zones.boundaries().into_iter().map(num).collect::<Vec<_>>(),
        "zones": serde_json::to_value(&scan.zones.zones).map_err(|e| CliError::Runtime(e.to_string()))?,
    });
    if !with_phi {
        return Ok(Report { csv: zones, extra: Vec::new(), summary });
    }
    let csv = buffer(|w| output::write_phi_scan(w, &scan.samples, &["floquet".into()]))?;
    Ok(Report { csv, extra: vec![("zones", zones)], summary })
}

fn jacobi(cfg: &RawConfig) -> Result<Report, CliError> {
    let eta = cfg.eta()?;
    let p_y: f64 = cfg.get_or("p_y", 0.0)?;
    let opts = options(cfg, floquet::MONODROMY_TOL)?;
    let initial = jacobi_initial(cfg)?;
    let series = floquet::integrate_jacobi(eta, p_y, initial, cycles(cfg, 10.0)?, &opts)?;
    let mono = floquet::monodromy(eta, p_y, opts.tol.rtol)?;
    let rows = (0..series.times.len()).map(|i| {
        vec![fmt_real(series.times[i]), fmt_real(series.j[i]), fmt_real(series.dj[i])]
    });
    let csv = buffer(|w| output::write_table(w, &["jacobi".into()], &["T", "Jx", "dJx"], rows))?;
    let summary = json!({
        "eta": num(eta),
        "p_y": num(p_y),
        "phi": num(mono.phi),
        "mu": num(mono.exponent),
        "stable": mono.is_stable(),
        "determinant": num(mono.determinant()),
        "sign_changes": series.sign_changes(),
    });
    Ok(Report { csv, extra: Vec::new(), summary })
}

/// Largest pairwise gap among `J^x`, `X`, `X̄` and `X_p`.
fn mutual_deviation(trace: &DecompositionTrace) -> f64 {
    (0..trace.len())
        .map(|i| {
            let v = [trace.jx[i], trace.x[i], trace.x_bar[i], trace.x_p[i]];
            let hi = v.iter().copied().fold(f64::MIN, f64::max);
            let lo = v.iter().copied().fold(f64::MAX, f64::min);
            hi - lo
        })
        .fold(0.0, f64::max)
}

fn rates_json(trace: &DecompositionTrace) -> Value {
    match averaging::divergence_rate(trace) {
        Ok(r) => json!({
            "alpha": num(r.alpha),
            "beta": num(r.beta),
            "jacobi": num(r.jacobi),
            "cycles": r.cycles,
        }),
        Err(_) => Value::Null,
    }
}

fn truncated(mut trace: DecompositionTrace) -> DecompositionTrace {
    for v in [
        &mut trace.times,
        &mut trace.jx,
        &mut trace.djx,
        &mut trace.x,
        &mut trace.dx,
        &mut trace.xi,
        &mut trace.dxi,
        &mut trace.x_bar,
        &mut trace.x_p,
        &mut trace.xi_p,
        &mut trace.xi_p_pondero,
        &mut trace.env_jacobi,
        &mut trace.env_landau,
        &mut trace.env_pondero,
    ] {
        v.clear();
    }
    trace
}

fn landau_trace(cfg: &RawConfig, default_cycles: f64) -> Result<(f64, DecompositionTrace), CliError> {
    let eta = cfg.eta()?;
    let opts = options(cfg, floquet::MONODROMY_TOL)?;
    let trace = averaging::integrate_landau(eta, jacobi_initial(cfg)?, cycles(cfg, default_cycles)?, &opts)?;
    Ok((eta, trace))
}

fn landau(cfg: &RawConfig) -> Result<Report, CliError> {
    let (eta, mut trace) = landau_trace(cfg, 10.0)?;
    if cycles(cfg, 10.0)? == 0.0 {
        // A zero-length run has no time series, only the header.
        trace = truncated(trace);
    }
    let csv = buffer(|w| output::write_trace(w, &trace, &["landau".into()]))?;
    let last_cycle = |v: &[f64]| {
        averaging::per_cycle_max(&trace.times, v).last().copied().map_or(Value::Null, num)
    };
    let summary = json!({
        "eta": num(eta),
        "samples": trace.len(),
        "identity_residual": num(trace.identity_residual()),
        "max_mutual_deviation": num(mutual_deviation(&trace)),
        "last_cycle_max_jx": last_cycle(&trace.jx),
        "last_cycle_max_x": last_cycle(&trace.x),
        "last_cycle_max_xi": last_cycle(&trace.xi),
        "rates": rates_json(&trace),
    });
    Ok(Report { csv, extra: Vec::new(), summary })
}

fn pondero(cfg: &RawConfig) -> Result<Report, CliError> {
    let eta = cfg.eta()?;
    let opts = options(cfg, floquet::MONODROMY_TOL)?;
    let s = averaging::ponderomotive_center(eta, jacobi_initial(cfg)?, cycles(cfg, 10.0)?, &opts)?;
    let rows = (0..s.times.len()).map(|i| {
        [s.times[i], s.x[i], s.x_bar[i], s.x_p[i], s.xi[i], s.xi_p[i], s.xi_p_pondero[i]]
            .iter()
            .map(|&v| fmt_real(v))
            .collect()
    });
    let header = ["T", "X", "Xbar", "Xp", "xi", "xip", "xip_pondero"];
    let csv = buffer(|w| output::write_table(w, &["pondero".into()], &header, rows))?;
    let gap = s.x.iter().zip(&s.x_p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let summary = json!({
        "eta": num(eta),
        "averaged_frequency": num(averaging::averaged_frequency(eta)),
        "ponderomotive_frequency": num(averaging::ponderomotive_frequency(eta)),
        "cross_average": num(averaging::ponderomotive_cross_average(eta)),
        "max_center_gap": num(gap),
    });
    Ok(Report { csv, extra: Vec::new(), summary })
}

fn resonance(cfg: &RawConfig) -> Result<Report, CliError> {
    let (eta, trace) = landau_trace(cfg, RESONANCE_CYCLES)?;
    let max_of = |v: &[f64]| averaging::per_cycle_max(&trace.times, v);
    let (mj, mx, mxi) = (max_of(&trace.jx), max_of(&trace.x), max_of(&trace.xi));
    let gap = averaging::ponderomotive_gap(&trace);
    let rows = (0..mj.len()).map(|k| {
        let mut row = vec![k.to_string()];
        row.extend([mj[k], mx[k], mxi[k], gap[k]].iter().map(|&v| fmt_real(v)));
        row
    });
    let header = ["cycle", "max_Jx", "max_X", "max_xi", "max_X_minus_Xp"];
    let csv = buffer(|w| output::write_table(w, &["resonance".into()], &header, rows))?;
    let mono = floquet::monodromy(eta, 0.0, trace.tol.rtol)?;
    let summary = json!({
        "eta": num(eta),
        "phi": num(mono.phi),
        "mu": num(mono.exponent),
        "cycles": mj.len(),
        "rates": rates_json(&trace),
        "gap_monotone": gap.windows(2).all(|w| w[1] >= w[0]),
    });
    Ok(Report { csv, extra: Vec::new(), summary })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> RawConfig {
        RawConfig::parse(text).unwrap()
    }

    #[test]
    fn sibling_names() {
        assert_eq!(sibling(Path::new("/a/scan.csv"), "zones"), PathBuf::from("/a/scan.zones.csv"));
    }

    #[test]
    fn empty_landau_run_is_header_only() {
        let r = execute(Command::Landau, &cfg("eta = 0.2\ncycles = 0")).unwrap();
        let text = String::from_utf8(r.csv).unwrap();
        assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1);
    }

    #[test]
    fn bad_step_is_a_usage_error() {
        let err = execute(Command::Floquet, &cfg("step = 0")).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn jacobi_reports_characteristic_value() {
        let r = execute(Command::Jacobi, &cfg("eta = 0.5\ncycles = 1")).unwrap();
        let phi = r.summary["phi"].as_f64().unwrap();
        assert!(phi.abs() < 1.0);
        assert_eq!(r.summary["stable"], json!(true));
    }
}
