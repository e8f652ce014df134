//! Averaging of the Hill-form Jacobi equation, the Landau decomposition
//! `J = X + xi` into oscillation center and rapid oscillation, and the
//! ponderomotive approximation of the center.
//!
//! Time `T` is measured in optical cycles and `P_y = 0` throughout. Initial
//! data are given as `(value, d/dT value)` at `T = 0`; the Landau pair starts
//! from the compatibility condition `X = J`, `X' = J'`, `xi = xi' = 0`.
//!
//! The error envelopes are the Gronwall bounds of the averaged systems with
//! identified initial data (zero initial error). They are tight to first
//! order at `T = 0`, so comparisons allow [`ENVELOPE_SLACK`] of absolute
//! integration noise.

use std::f64::consts::{PI, SQRT_2};

use serde::Serialize;

use crate::dynamics::IntegrationOptions;
use crate::error::{invalid, Error, Result};
use crate::floquet::cycle_grid;
use crate::integrator::{uniform_grid, DormandPrince, Tolerances};

/// Absolute allowance for integration noise in envelope comparisons.
pub const ENVELOPE_SLACK: f64 = 1e-10;
/// Default epsilon values for the windowed envelope checks.
pub const DEFAULT_EPSILONS: [f64; 3] = [0.1, 0.5, 1.0];
/// Minimum trace length, in optical cycles, for exponent fits.
pub const MIN_FIT_TRACE_CYCLES: usize = 20;
/// Minimum number of cycles in the trailing fit window.
pub const MIN_FIT_CYCLES: usize = 10;

/// `sin(w T) / w`, continued to `T` at `w = 0`.
fn sin_over(w: f64, t: f64) -> f64 {
    let x = w * t;
    if x.abs() < 1e-8 {
        t * (1.0 - x * x / 6.0)
    } else {
        x.sin() / w
    }
}

/// `(e^{r T} - 1) / r`, continued to `T` at `r = 0`.
fn expm1_over(r: f64, t: f64) -> f64 {
    if r == 0.0 {
        t
    } else {
        (r * t).exp_m1() / r
    }
}

/// `a cos(w T) + b sin(w T) / w`: the harmonic with value `a` and slope `b` at `T = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Harmonic {
    pub value0: f64,
    pub slope0: f64,
    /// Angular frequency per optical cycle.
    pub frequency: f64,
}

impl Harmonic {
    pub fn value(&self, t: f64) -> f64 {
        self.value0 * (self.frequency * t).cos() + self.slope0 * sin_over(self.frequency, t)
    }

    pub fn slope(&self, t: f64) -> f64 {
        let w = self.frequency;
        -self.value0 * w * (w * t).sin() + self.slope0 * (w * t).cos()
    }
}

/// Angular frequency `sqrt(2) pi eta` of the averaged Jacobi and Landau systems.
pub fn averaged_frequency(eta: f64) -> f64 {
    SQRT_2 * PI * eta
}

/// Angular frequency `sqrt(2 + eta²/8) pi eta` of the ponderomotive center.
pub fn ponderomotive_frequency(eta: f64) -> f64 {
    (2.0 + eta * eta / 8.0).sqrt() * PI * eta
}

/// Cycle average of `(-eta²/8 cos 4 pi T) sin² 2 pi T`, the cross term of the
/// ponderomotive force, evaluated by quadrature over one optical cycle.
pub fn ponderomotive_cross_average(eta: f64) -> f64 {
    crate::quadrature::integrate(
        |t| -eta * eta / 8.0 * (4.0 * PI * t).cos() * (2.0 * PI * t).sin().powi(2),
        0.0,
        1.0,
        1e-14,
    )
    .value
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta.is_finite() && eta >= 0.0) {
        return Err(invalid("eta", format!("must be finite and >= 0, got {eta}")));
    }
    Ok(())
}

/// Closed-form solution of the averaged system `J̄' = 2 pi eta Ā J̄`,
/// `Ā = [[0, 1], [-1/2, 0]]`, in the scaled vector form
/// `J = (J^x, (2 pi eta)^{-1} dJ^x/dT)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AveragedJacobi {
    pub eta: f64,
    /// `(J̄1, J̄2)` at `T = 0`.
    pub initial: [f64; 2],
}

impl AveragedJacobi {
    pub fn new(eta: f64, initial: [f64; 2]) -> Result<Self> {
        check_eta(eta)?;
        Ok(Self { eta, initial })
    }

    /// Averaged system with initial data identified with `(J^x, dJ^x/dT)`.
    pub fn from_jacobi_data(eta: f64, initial: [f64; 2]) -> Result<Self> {
        check_eta(eta)?;
        if eta == 0.0 {
            return Err(invalid("eta", "the scaled Jacobi vector needs eta > 0"));
        }
        Ok(Self {
            eta,
            initial: [initial[0], initial[1] / (2.0 * PI * eta)],
        })
    }

    /// `exp(2 pi eta Ā T)`.
    pub fn propagator(&self, t: f64) -> [[f64; 2]; 2] {
        let th = averaged_frequency(self.eta) * t;
        let (s, c) = th.sin_cos();
        [[c, SQRT_2 * s], [-s / SQRT_2, c]]
    }

    pub fn at(&self, t: f64) -> [f64; 2] {
        let m = self.propagator(t);
        let [a, b] = self.initial;
        [m[0][0] * a + m[0][1] * b, m[1][0] * a + m[1][1] * b]
    }

    /// `(cos, sin)` coefficients of `J̄^x = J̄1`.
    pub fn jx_coefficients(&self) -> [f64; 2] {
        [self.initial[0], SQRT_2 * self.initial[1]]
    }

    pub fn series(&self, times: &[f64]) -> Vec<[f64; 2]> {
        times.iter().map(|&t| self.at(t)).collect()
    }
}

/// Averaged Jacobi vector `J̄(T)` on `[0, t_end]` cycles from the scaled
/// initial vector `(J̄10, J̄20)`.
pub fn averaged_jacobi(
    eta: f64,
    initial: [f64; 2],
    t_end: f64,
    samples_per_cycle: usize,
) -> Result<(Vec<f64>, Vec<[f64; 2]>)> {
    let avg = AveragedJacobi::new(eta, initial)?;
    let times = cycle_grid(t_end, samples_per_cycle)?;
    let values = avg.series(&times);
    Ok((times, values))
}

/// Averaged oscillation center `X̄(T) = X(0) cos(sqrt2 pi eta T) + X'(0) sin(sqrt2 pi eta T) / (sqrt2 pi eta)`.
///
/// The averaged rapid components are pinned to zero, so `X̄` is the whole
/// averaged Landau state.
pub fn averaged_center(eta: f64, initial: [f64; 2]) -> Result<Harmonic> {
    check_eta(eta)?;
    Ok(Harmonic {
        value0: initial[0],
        slope0: initial[1],
        frequency: averaged_frequency(eta),
    })
}

/// `X̄` on `[0, t_end]` cycles, after checking it coincides with the
/// averaged Jacobi component `J̄^x` under identified initial data.
pub fn averaged_landau(
    eta: f64,
    initial: [f64; 2],
    t_end: f64,
    samples_per_cycle: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let center = averaged_center(eta, initial)?;
    if eta > 0.0 {
        let jbar = AveragedJacobi::from_jacobi_data(eta, initial)?;
        let [c, s] = jbar.jx_coefficients();
        let w = center.frequency;
        let same = (c - center.value0).abs() <= 1e-15 * c.abs().max(1.0)
            && (s - center.slope0 / w).abs() <= 1e-14 * s.abs().max(1.0);
        debug_assert!(same, "averaged center and averaged Jacobi field disagree");
    }
    let times = cycle_grid(t_end, samples_per_cycle)?;
    let values = times.iter().map(|&t| center.value(t)).collect();
    Ok((times, values))
}

/// Ponderomotive center `X_p`, the harmonic at [`ponderomotive_frequency`]
/// with the initial data of `X`.
pub fn ponderomotive_harmonic(eta: f64, initial: [f64; 2]) -> Result<Harmonic> {
    check_eta(eta)?;
    Ok(Harmonic {
        value0: initial[0],
        slope0: initial[1],
        frequency: ponderomotive_frequency(eta),
    })
}

/// Ponderomotive rapid oscillation `xi_p = -(eta²/8) cos(4 pi T) X`.
pub fn ponderomotive_oscillation(eta: f64, t: f64, center: f64) -> f64 {
    -eta * eta / 8.0 * (4.0 * PI * t).cos() * center
}

/// Gronwall bound on `||J - J̄||` (scaled vector norm) with zero initial error.
pub fn envelope_jacobi(eta: f64, initial: [f64; 2], t: f64) -> f64 {
    let r = 2.0 * PI * eta;
    0.5 * initial[0].abs() * (r * t).exp_m1() + 0.5 * SQRT_2 * initial[1].abs() * expm1_over(r, t)
}

/// Gronwall bound on `||K - K̄||` for the Landau system with zero initial error.
pub fn envelope_landau(eta: f64, initial: [f64; 2], t: f64) -> f64 {
    let w = averaged_frequency(eta);
    let r = 2.0 * w;
    0.5 * initial[0].abs() * (r * t).exp_m1() + initial[1].abs() * expm1_over(r, t)
}

/// Mean-value bound on `|X̄ - X_p|`.
pub fn envelope_ponderomotive(eta: f64, initial: [f64; 2], t: f64) -> f64 {
    2.0 * (2.0 + eta * eta / 8.0).sqrt() * initial[0].abs() * PI * eta * t
        + 2.0 * initial[1].abs() * t
}

/// Sampled Landau decomposition with its averaged and ponderomotive
/// counterparts and the error envelopes.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionTrace {
    pub eta: f64,
    pub initial: [f64; 2],
    pub tol: Tolerances,
    pub times: Vec<f64>,
    pub jx: Vec<f64>,
    pub djx: Vec<f64>,
    pub x: Vec<f64>,
    pub dx: Vec<f64>,
    pub xi: Vec<f64>,
    pub dxi: Vec<f64>,
    pub x_bar: Vec<f64>,
    pub x_p: Vec<f64>,
    /// `xi_p` evaluated with the Landau center `X`.
    pub xi_p: Vec<f64>,
    /// `xi_p` evaluated with the ponderomotive center `X_p`.
    pub xi_p_pondero: Vec<f64>,
    pub env_jacobi: Vec<f64>,
    pub env_landau: Vec<f64>,
    pub env_pondero: Vec<f64>,
}

impl DecompositionTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest `|J - X - xi|` over the trace.
    pub fn identity_residual(&self) -> f64 {
        (0..self.len())
            .map(|i| (self.jx[i] - self.x[i] - self.xi[i]).abs())
            .fold(0.0, f64::max)
    }
}

fn landau_rhs(eta: f64) -> impl Fn(f64, &[f64; 6]) -> [f64; 6] {
    let k = 2.0 * PI * PI * eta * eta;
    move |t, y| {
        let s2 = (2.0 * PI * t).sin().powi(2);
        let c4 = (4.0 * PI * t).cos();
        [
            y[1],
            -k * (y[0] + 2.0 * s2 * y[2]),
            y[3],
            k * c4 * y[0],
            y[5],
            -2.0 * k * s2 * y[4],
        ]
    }
}

/// Integrate the Landau pair `(X, xi)` together with the Hill equation for
/// `J^x` from `initial = (J^x(0), dJ^x/dT(0))`, checking `J = X + xi` at every
/// sample to `100 * rtol` relative to the sample's magnitude.
pub fn integrate_landau(
    eta: f64,
    initial: [f64; 2],
    t_end: f64,
    opts: &IntegrationOptions,
) -> Result<DecompositionTrace> {
    check_eta(eta)?;
    let times = cycle_grid(t_end, opts.samples_per_cycle)?;
    let y0 = [initial[0], initial[1], 0.0, 0.0, initial[0], initial[1]];
    let out = DormandPrince::new(opts.tol).solve(&landau_rhs(eta), 0.0, y0, &times)?;

    let limit = 100.0 * opts.tol.rtol;
    for (t, y) in times.iter().zip(&out) {
        let scale = y[0].abs().max(y[2].abs()).max(y[4].abs()).max(1.0);
        let residual = (y[4] - y[0] - y[2]).abs();
        if !(residual <= limit * scale) {
            return Err(Error::DecompositionIdentityViolated { at: *t, residual });
        }
    }

    let center = averaged_center(eta, initial)?;
    let pondero = ponderomotive_harmonic(eta, initial)?;
    let col = |i: usize| out.iter().map(|y| y[i]).collect::<Vec<_>>();
    let x = col(0);
    let x_p: Vec<f64> = times.iter().map(|&t| pondero.value(t)).collect();
    Ok(DecompositionTrace {
        eta,
        initial,
        tol: opts.tol,
        x_bar: times.iter().map(|&t| center.value(t)).collect(),
        xi_p: times
            .iter()
            .zip(&x)
            .map(|(&t, &xv)| ponderomotive_oscillation(eta, t, xv))
            .collect(),
        xi_p_pondero: times
            .iter()
            .zip(&x_p)
            .map(|(&t, &xv)| ponderomotive_oscillation(eta, t, xv))
            .collect(),
        env_jacobi: times.iter().map(|&t| envelope_jacobi(eta, initial, t)).collect(),
        env_landau: times.iter().map(|&t| envelope_landau(eta, initial, t)).collect(),
        env_pondero: times
            .iter()
            .map(|&t| envelope_ponderomotive(eta, initial, t))
            .collect(),
        jx: col(4),
        djx: col(5),
        dx: col(1),
        xi: col(2),
        dxi: col(3),
        x,
        x_p,
        times,
    })
}

/// Ponderomotive center and rapid oscillation series.
#[derive(Debug, Clone, PartialEq)]
pub struct PonderomotiveSeries {
    pub times: Vec<f64>,
    pub x: Vec<f64>,
    pub x_bar: Vec<f64>,
    pub x_p: Vec<f64>,
    pub xi: Vec<f64>,
    pub xi_p: Vec<f64>,
    pub xi_p_pondero: Vec<f64>,
}

pub fn ponderomotive_center(
    eta: f64,
    initial: [f64; 2],
    t_end: f64,
    opts: &IntegrationOptions,
) -> Result<PonderomotiveSeries> {
    let trace = integrate_landau(eta, initial, t_end, opts)?;
    Ok(PonderomotiveSeries {
        times: trace.times,
        x: trace.x,
        x_bar: trace.x_bar,
        x_p: trace.x_p,
        xi: trace.xi,
        xi_p: trace.xi_p,
        xi_p_pondero: trace.xi_p_pondero,
    })
}

/// Measured deviations of a trace from its averaged and ponderomotive
/// approximations, paired with the corresponding envelopes.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeSeries {
    pub times: Vec<f64>,
    pub measured_jacobi: Vec<f64>,
    pub bound_jacobi: Vec<f64>,
    pub measured_landau: Vec<f64>,
    pub bound_landau: Vec<f64>,
    pub measured_pondero: Vec<f64>,
    pub bound_pondero: Vec<f64>,
}

/// `(||J - J̄||, ||K - K̄||, |X̄ - X_p|)` at sample `i` of a trace.
fn measured_errors(trace: &DecompositionTrace, i: usize) -> [f64; 3] {
    let eta = trace.eta;
    let t = trace.times[i];
    let gap = (trace.x_bar[i] - trace.x_p[i]).abs();
    if eta == 0.0 {
        return [0.0, 0.0, gap];
    }
    let center = averaged_center(eta, trace.initial).expect("eta checked by the trace");
    let jbar = center.value(t);
    let djbar = center.slope(t);
    let sj = 2.0 * PI * eta;
    let ej = (trace.jx[i] - jbar).hypot((trace.djx[i] - djbar) / sj);
    let sk = averaged_frequency(eta);
    let ek = ((trace.x[i] - jbar).powi(2)
        + ((trace.dx[i] - djbar) / sk).powi(2)
        + trace.xi[i].powi(2)
        + (trace.dxi[i] / sk).powi(2))
    .sqrt();
    [ej, ek, gap]
}

/// Envelope series over `[0, t_end]` cycles.
pub fn error_envelopes(
    eta: f64,
    initial: [f64; 2],
    t_end: f64,
    opts: &IntegrationOptions,
) -> Result<EnvelopeSeries> {
    let trace = integrate_landau(eta, initial, t_end, opts)?;
    let measured: Vec<[f64; 3]> = (0..trace.len()).map(|i| measured_errors(&trace, i)).collect();
    Ok(EnvelopeSeries {
        measured_jacobi: measured.iter().map(|m| m[0]).collect(),
        measured_landau: measured.iter().map(|m| m[1]).collect(),
        measured_pondero: measured.iter().map(|m| m[2]).collect(),
        bound_jacobi: trace.env_jacobi,
        bound_landau: trace.env_landau,
        bound_pondero: trace.env_pondero,
        times: trace.times,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeKind {
    /// `||J - J̄|| <= (|J̄10| + sqrt2 |J̄20|)(e^{2 pi eta T} - 1)/2` on `T <= ln(1+eps)/(2 pi eta)`.
    JacobiAverage,
    /// `||K - K̄|| <= (|K̄10| + |K̄20|)(e^{2 sqrt2 pi eta T} - 1)/2` on `T <= ln(1+eps)/(2 sqrt2 pi eta)`.
    LandauAverage,
    /// `|xi| <= (|J(0)| + |J'(0)|/(sqrt2 pi eta)) eps` on the Landau window.
    RapidOscillation,
    /// `|X̄ - X_p|` mean-value bound on `T <= eps/(2 pi eta)`.
    PonderomotiveAverage,
    /// `|X - X_p|` combined bound on the smaller of the Landau and ponderomotive windows.
    CenterVsPonderomotive,
}

impl EnvelopeKind {
    pub const ALL: [EnvelopeKind; 5] = [
        Self::JacobiAverage,
        Self::LandauAverage,
        Self::RapidOscillation,
        Self::PonderomotiveAverage,
        Self::CenterVsPonderomotive,
    ];

    /// Length of the validity window in optical cycles.
    pub fn window(self, eta: f64, eps: f64) -> f64 {
        let landau = (1.0 + eps).ln() / (2.0 * SQRT_2 * PI * eta);
        let pondero = eps / (2.0 * PI * eta);
        match self {
            Self::JacobiAverage => (1.0 + eps).ln() / (2.0 * PI * eta),
            Self::LandauAverage | Self::RapidOscillation => landau,
            Self::PonderomotiveAverage => pondero,
            Self::CenterVsPonderomotive => landau.min(pondero),
        }
    }
}

/// Outcome of comparing one envelope with the measured error on its window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeCheck {
    pub kind: EnvelopeKind,
    pub eta: f64,
    pub initial: [f64; 2],
    pub epsilon: f64,
    pub window: f64,
    pub samples: usize,
    /// Largest `measured - bound` over the window.
    pub worst_excess: f64,
    pub violations: usize,
}

impl EnvelopeCheck {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Check every [`EnvelopeKind`] for each `epsilon` on `samples + 1` points of
/// its window. Requires `eta > 0`.
pub fn check_envelopes(
    eta: f64,
    initial: [f64; 2],
    epsilons: &[f64],
    samples: usize,
    tol: Tolerances,
) -> Result<Vec<EnvelopeCheck>> {
    check_eta(eta)?;
    if eta == 0.0 {
        return Err(invalid("eta", "envelope windows need eta > 0"));
    }
    let w = averaged_frequency(eta);
    let rapid_scale = initial[0].abs() + initial[1].abs() / w;
    let combined_scale = (0.5 + (2.0 + eta * eta / 8.0).sqrt()) * initial[0].abs()
        + (0.5 / SQRT_2 + 1.0) * initial[1].abs() / (PI * eta);

    let mut checks = Vec::new();
    for &eps in epsilons {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(invalid("epsilon", format!("must be finite and > 0, got {eps}")));
        }
        for kind in EnvelopeKind::ALL {
            let window = kind.window(eta, eps);
            let times = uniform_grid(0.0, window, samples.max(1));
            let trace = landau_on(eta, initial, &times, tol)?;
            let mut worst = f64::NEG_INFINITY;
            let mut violations = 0;
            for i in 0..times.len() {
                let t = times[i];
                let [ej, ek, ep] = measured_errors(&trace, i);
                let (measured, bound) = match kind {
                    EnvelopeKind::JacobiAverage => (ej, envelope_jacobi(eta, initial, t)),
                    EnvelopeKind::LandauAverage => (ek, envelope_landau(eta, initial, t)),
                    EnvelopeKind::RapidOscillation => (trace.xi[i].abs(), rapid_scale * eps),
                    EnvelopeKind::PonderomotiveAverage => {
                        (ep, envelope_ponderomotive(eta, initial, t))
                    }
                    EnvelopeKind::CenterVsPonderomotive => {
                        ((trace.x[i] - trace.x_p[i]).abs(), combined_scale * eps)
                    }
                };
                worst = worst.max(measured - bound);
                if measured > bound + ENVELOPE_SLACK {
                    violations += 1;
                }
            }
            checks.push(EnvelopeCheck {
                kind,
                eta,
                initial,
                epsilon: eps,
                window,
                samples: times.len(),
                worst_excess: worst,
                violations,
            });
        }
    }
    Ok(checks)
}

/// Landau trace sampled at arbitrary times (used for the envelope windows).
fn landau_on(eta: f64, initial: [f64; 2], times: &[f64], tol: Tolerances) -> Result<DecompositionTrace> {
    let y0 = [initial[0], initial[1], 0.0, 0.0, initial[0], initial[1]];
    let out = DormandPrince::new(tol).solve(&landau_rhs(eta), 0.0, y0, times)?;
    let center = averaged_center(eta, initial)?;
    let pondero = ponderomotive_harmonic(eta, initial)?;
    let col = |i: usize| out.iter().map(|y| y[i]).collect::<Vec<_>>();
    let empty = || vec![0.0; times.len()];
    Ok(DecompositionTrace {
        eta,
        initial,
        tol,
        times: times.to_vec(),
        jx: col(4),
        djx: col(5),
        x: col(0),
        dx: col(1),
        xi: col(2),
        dxi: col(3),
        x_bar: times.iter().map(|&t| center.value(t)).collect(),
        x_p: times.iter().map(|&t| pondero.value(t)).collect(),
        xi_p: empty(),
        xi_p_pondero: empty(),
        env_jacobi: empty(),
        env_landau: empty(),
        env_pondero: empty(),
    })
}

/// Per-cycle maxima of `|values|` over `[k, k + 1]`, `k = 0, 1, ...`, for
/// every complete optical cycle covered by `times`.
pub fn per_cycle_max(times: &[f64], values: &[f64]) -> Vec<f64> {
    let Some(&t_last) = times.last() else {
        return Vec::new();
    };
    let cycles = (t_last + 1e-9).floor() as usize;
    let mut maxima = vec![0.0f64; cycles];
    for (&t, &v) in times.iter().zip(values) {
        let k = t.floor() as usize;
        for c in [k.wrapping_sub(1), k] {
            if c < cycles && t >= c as f64 - 1e-9 && t <= c as f64 + 1.0 + 1e-9 {
                maxima[c] = maxima[c].max(v.abs());
            }
        }
    }
    maxima
}

/// Least-squares slope of `ln(maxima[k])` against `k` over the trailing half
/// of the cycles (at least [`MIN_FIT_CYCLES`]).
pub fn fit_log_slope(maxima: &[f64]) -> Result<f64> {
    let n = maxima.len();
    if n < MIN_FIT_CYCLES {
        return Err(Error::InsufficientData(format!(
            "{n} cycles available, at least {MIN_FIT_CYCLES} needed"
        )));
    }
    let len = (n / 2).max(MIN_FIT_CYCLES);
    let start = n - len;
    let pts: Vec<(f64, f64)> = (start..n)
        .map(|k| (k as f64, maxima[k].max(f64::MIN_POSITIVE).ln()))
        .collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Fitted exponential growth rates per optical cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DivergenceRates {
    /// Rate of the oscillation center `X`.
    pub alpha: f64,
    /// Rate of the rapid oscillation `xi`.
    pub beta: f64,
    /// Rate of the Jacobi field `J^x`.
    pub jacobi: f64,
    pub cycles: usize,
}

/// Growth rates of `X`, `xi` and `J^x` from their per-cycle maxima.
pub fn divergence_rate(trace: &DecompositionTrace) -> Result<DivergenceRates> {
    let cycles = trace
        .times
        .last()
        .map(|t| (t + 1e-9).floor() as usize)
        .unwrap_or(0);
    if cycles < MIN_FIT_TRACE_CYCLES {
        return Err(Error::InsufficientData(format!(
            "trace covers {cycles} optical cycles, at least {MIN_FIT_TRACE_CYCLES} needed"
        )));
    }
    let rate = |v: &[f64]| fit_log_slope(&per_cycle_max(&trace.times, v));
    Ok(DivergenceRates {
        alpha: rate(&trace.x)?,
        beta: rate(&trace.xi)?,
        jacobi: rate(&trace.jx)?,
        cycles,
    })
}

/// Per-cycle maxima of `|X - X_p|`.
pub fn ponderomotive_gap(trace: &DecompositionTrace) -> Vec<f64> {
    let gap: Vec<f64> = trace.x.iter().zip(&trace.x_p).map(|(a, b)| a - b).collect();
    per_cycle_max(&trace.times, &gap)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn averaged_jacobi_examples() {
        let a = AveragedJacobi::new(0.2, [1.0, 0.0]).unwrap();
        for &t in &[0.0, 0.7, 3.3] {
            assert!((a.at(t)[0] - (SQRT_2 * PI * 0.2 * t).cos()).abs() < 1e-15);
        }
        let half = 1.0 / (SQRT_2 * 0.2);
        let v = a.at(half);
        assert!((v[0] + 1.0).abs() < 1e-14 && v[1].abs() < 1e-14);

        let zero = AveragedJacobi::new(0.4, [0.0, 0.0]).unwrap();
        assert!(zero.series(&[0.0, 1.0, 5.0]).iter().all(|v| *v == [0.0, 0.0]));
    }

    #[test]
    fn propagator_is_symplectic() {
        let a = AveragedJacobi::new(0.3, [1.0, 0.0]).unwrap();
        for &t in &[0.1, 2.0, 9.0] {
            let m = a.propagator(t);
            assert!((m[0][0] * m[1][1] - m[0][1] * m[1][0] - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn averaged_center_examples() {
        let eta = 0.2;
        let c = averaged_center(eta, [0.0, 1.0]).unwrap();
        let w = SQRT_2 * PI * eta;
        for &t in &[0.5, 4.0] {
            assert!((c.value(t) - (w * t).sin() / w).abs() < 1e-15);
        }
        let tiny = averaged_center(1e-12, [0.0, 1.0]).unwrap();
        assert!((tiny.value(3.0) - 3.0).abs() < 1e-12);
        let zero = averaged_center(0.0, [0.0, 1.0]).unwrap();
        assert_eq!(zero.value(2.5), 2.5);
    }

    #[test]
    fn averaged_center_equals_averaged_jacobi_component() {
        for &eta in &[0.05, 0.2, 0.9] {
            for init in [[1.0, 0.0], [0.0, 1.0], [0.3, -0.7]] {
                let c = averaged_center(eta, init).unwrap();
                let j = AveragedJacobi::from_jacobi_data(eta, init).unwrap();
                let [cc, cs] = j.jx_coefficients();
                assert_eq!(cc, c.value0);
                assert!((cs - c.slope0 / c.frequency).abs() < 1e-15);
                for &t in &[0.0, 0.4, 7.5] {
                    assert!((c.value(t) - j.at(t)[0]).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn ponderomotive_examples() {
        let p = ponderomotive_harmonic(0.2, [1.0, 0.0]).unwrap();
        let w = (2.0f64 + 0.005).sqrt() * PI * 0.2;
        assert!((p.value(3.0) - (w * 3.0).cos()).abs() < 1e-15);
        let still = ponderomotive_harmonic(0.0, [1.0, 0.0]).unwrap();
        assert_eq!(still.value(8.0), 1.0);
    }

    #[test]
    fn ponderomotive_force_coefficient() {
        for &eta in &[0.1, 0.5, 1.2] {
            let avg = ponderomotive_cross_average(eta);
            assert!((avg - eta * eta / 32.0).abs() < 1e-15);
            // -2 pi² eta² - 4 pi² eta² avg = -(pi eta)² (2 + eta²/8)
            let k = 2.0 * PI * PI * eta * eta + 4.0 * PI * PI * eta * eta * avg;
            assert!((k - PI * PI * eta.powi(4) / 8.0 - 2.0 * PI * PI * eta * eta).abs() < 1e-12);
            assert!((k.sqrt() - ponderomotive_frequency(eta)).abs() < 1e-12);
        }
    }

    #[test]
    fn envelopes_vanish_at_origin() {
        for init in [[1.0, 0.0], [0.0, 1.0]] {
            assert_eq!(envelope_jacobi(0.2, init, 0.0), 0.0);
            assert_eq!(envelope_landau(0.2, init, 0.0), 0.0);
            assert_eq!(envelope_ponderomotive(0.2, init, 0.0), 0.0);
        }
    }

    #[test]
    fn window_lengths() {
        let w = EnvelopeKind::JacobiAverage.window(0.2, 0.5);
        assert!((w - 1.5f64.ln() / (2.0 * PI * 0.2)).abs() < 1e-15);
        assert!((w - 0.3227).abs() < 1e-4);
    }

    #[test]
    fn zero_field_decomposition() {
        let tr = integrate_landau(0.0, [1.0, 0.0], 3.0, &IntegrationOptions::default()).unwrap();
        assert!(tr.x.iter().all(|&x| x == 1.0));
        assert!(tr.xi.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn empty_trace_for_zero_length() {
        let tr = integrate_landau(0.2, [1.0, 0.0], 0.0, &IntegrationOptions::default()).unwrap();
        assert_eq!(tr.len(), 1);
        assert_eq!(tr.times, vec![0.0]);
    }

    #[test]
    fn per_cycle_max_groups_by_cycle() {
        let times = uniform_grid(0.0, 3.0, 12);
        let vals: Vec<f64> = times.iter().map(|t| t * 2.0).collect();
        let m = per_cycle_max(&times, &vals);
        assert_eq!(m, vec![2.0, 4.0, 6.0]);
    }

    #[test]
    fn log_slope_recovers_exponential() {
        let maxima: Vec<f64> = (0..30).map(|k| 3.0 * (0.7 * k as f64).exp()).collect();
        assert!((fit_log_slope(&maxima).unwrap() - 0.7).abs() < 1e-12);
        assert!(matches!(fit_log_slope(&maxima[..5]), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn short_trace_is_insufficient() {
        let tr = integrate_landau(0.2, [1.0, 0.0], 10.0, &IntegrationOptions::default()).unwrap();
        assert!(matches!(divergence_rate(&tr), Err(Error::InsufficientData(_))));
    }
}
