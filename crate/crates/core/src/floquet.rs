//! Jacobi fields along the spatially constant standing-wave orbits, the Hill
//! equation they obey, and its Floquet theory.
//!
//! Along `x = n pi / omega` (with `P_z = 0`) the transverse Jacobi component
//! satisfies, in optical cycles `T = omega t / 2 pi`,
//!
//! ```text
//! J'' + (2 pi eta sin 2 pi T)^2 / (1 + P_y^2) J = 0,
//! ```
//!
//! a Hill equation of period 1/2. Stability is decided by the characteristic
//! function `phi = tr(M) / 2` of its monodromy matrix `M`.
//!
//! Floquet exponents are reported per optical cycle: a multiplier `rho` over
//! the half-cycle period corresponds to a growth rate `mu = 2 ln|rho|`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::IntegrationOptions;
use crate::error::{invalid, Error, Result};
use crate::fields::{Jet, ModelKind, ScalarField2D};
use crate::integrator::{uniform_grid, DormandPrince, Tolerances};

/// Integrator tolerance for the fundamental solutions.
pub const MONODROMY_TOL: f64 = 1e-12;
/// `||phi| - 1|` below which the monodromy is treated as parabolic.
pub const PARABOLIC_TOL: f64 = 1e-9;
/// Default zone-scan grid spacing in `eta`.
pub const DEFAULT_SCAN_STEP: f64 = 1e-3;
/// Default bisection tolerance for zone boundaries.
pub const DEFAULT_REFINE_TOL: f64 = 1e-8;

/// Hill equation `J'' + c(T) J = 0` with `c(T) = (2 pi eta sin 2 pi T)^2 / (1 + P_y^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HillSystem {
    pub eta: f64,
    pub p_y: f64,
}

impl HillSystem {
    /// Period in optical cycles.
    pub const PERIOD: f64 = 0.5;

    pub fn new(eta: f64, p_y: f64) -> Result<Self> {
        if !(eta.is_finite() && eta >= 0.0) {
            return Err(invalid("eta", format!("must be finite and >= 0, got {eta}")));
        }
        if !p_y.is_finite() {
            return Err(invalid("p_y", "must be finite"));
        }
        Ok(Self { eta, p_y })
    }

    pub fn coefficient(&self, cycles: f64) -> f64 {
        let s = 2.0 * PI * self.eta * (2.0 * PI * cycles).sin();
        s * s / (1.0 + self.p_y * self.p_y)
    }

    fn rhs2(&self) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] + '_ {
        move |t, y| [y[1], -self.coefficient(t) * y[0]]
    }

    /// Both fundamental solutions (`J1(0) = 1, J1'(0) = 0` and
    /// `J2(0) = 0, J2'(0) = 1`) at each time in `times`, as
    /// `[J1, J1', J2, J2']`.
    pub fn fundamental_solutions(&self, times: &[f64], tol: Tolerances) -> Result<Vec<[f64; 4]>> {
        let rhs = |t: f64, y: &[f64; 4]| {
            let c = self.coefficient(t);
            [y[1], -c * y[0], y[3], -c * y[2]]
        };
        DormandPrince::new(tol).solve(&rhs, 0.0, [1.0, 0.0, 0.0, 1.0], times)
    }
}

/// Fundamental matrix over one period with its spectral data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonodromyResult {
    pub eta: f64,
    pub p_y: f64,
    /// `[[J1, J2], [J1', J2']]` at `T = 1/2`.
    pub matrix: [[f64; 2]; 2],
    pub phi: f64,
    #[serde(skip)]
    pub multipliers: [Complex64; 2],
    /// Growth rate per optical cycle; zero unless `|phi| > 1`.
    pub exponent: f64,
    pub tol: f64,
}

impl MonodromyResult {
    pub fn determinant(&self) -> f64 {
        let m = &self.matrix;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn is_stable(&self) -> bool {
        self.phi.abs() < 1.0
    }

    pub fn is_parabolic(&self) -> bool {
        (self.phi.abs() - 1.0).abs() <= PARABOLIC_TOL
    }
}

/// Multipliers `phi ± sqrt(phi² - 1)`, larger modulus first.
fn multipliers(phi: f64) -> [Complex64; 2] {
    let disc = phi * phi - 1.0;
    if disc >= 0.0 {
        let r = disc.sqrt();
        let big = phi.signum() * (phi.abs() + r);
        // The product of the multipliers is one.
        [Complex64::new(big, 0.0), Complex64::new(1.0 / big, 0.0)]
    } else {
        let r = (-disc).sqrt();
        [Complex64::new(phi, r), Complex64::new(phi, -r)]
    }
}

/// Floquet growth rate per optical cycle for a characteristic value `phi`.
pub fn exponent_from_phi(phi: f64) -> f64 {
    if phi.abs() > 1.0 {
        2.0 * (phi.abs() + (phi * phi - 1.0).sqrt()).ln()
    } else {
        0.0
    }
}

/// Monodromy of the Hill equation at impulse factor `eta`, integrated with
/// relative tolerance `tol`.
pub fn monodromy(eta: f64, p_y: f64, tol: f64) -> Result<MonodromyResult> {
    let hill = HillSystem::new(eta, p_y)?;
    let end = hill.fundamental_solutions(&[HillSystem::PERIOD], Tolerances::relative(tol))?[0];
    let matrix = [[end[0], end[2]], [end[1], end[3]]];
    let phi = 0.5 * (end[0] + end[3]);
    Ok(MonodromyResult {
        eta,
        p_y,
        matrix,
        phi,
        multipliers: multipliers(phi),
        exponent: exponent_from_phi(phi),
        tol,
    })
}

/// Characteristic function `phi(eta)` at `P_y = 0` and the default tolerance.
pub fn characteristic(eta: f64) -> Result<f64> {
    Ok(monodromy(eta, 0.0, MONODROMY_TOL)?.phi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeKind {
    /// `|phi| > 1`: one growing and one decaying Bloch mode.
    Hyperbolic,
    /// `|phi| < 1`: bounded rotation; the sampled data are the fundamental solutions.
    Elliptic,
}

/// Bloch–Floquet decomposition sampled over one optical cycle.
///
/// For hyperbolic monodromy the mode solutions are `e^{±mu T} K_i(T)` with
/// `K_i(T + 1/2) = half_period_sign * K_i(T)`; the sign is that of the
/// multipliers, so the factors always repeat after one optical cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct FloquetModes {
    pub kind: ModeKind,
    pub exponent: f64,
    /// Rotation angle per half-cycle period (`acos phi`), zero when hyperbolic.
    pub rotation: f64,
    pub half_period_sign: f64,
    /// Initial data `(J(0), J'(0))` of the growing and decaying modes.
    pub eigenvectors: [[f64; 2]; 2],
    pub times: Vec<f64>,
    pub factors: [Vec<f64>; 2],
}

fn eigenvector(m: &[[f64; 2]; 2], rho: f64) -> [f64; 2] {
    let a = [m[0][1], rho - m[0][0]];
    let b = [rho - m[1][1], m[1][0]];
    let na = a[0].hypot(a[1]);
    let nb = b[0].hypot(b[1]);
    let (v, n) = if na >= nb { (a, na) } else { (b, nb) };
    let v = [v[0] / n, v[1] / n];
    if v[0] < 0.0 || (v[0] == 0.0 && v[1] < 0.0) {
        [-v[0], -v[1]]
    } else {
        v
    }
}

/// Decompose the monodromy into Bloch–Floquet modes, sampling the periodic
/// factors on `samples + 1` points covering one optical cycle.
pub fn floquet_modes(result: &MonodromyResult, samples: usize) -> Result<FloquetModes> {
    if result.is_parabolic() {
        return Err(Error::DegenerateMonodromy {
            phi: result.phi,
            tol: PARABOLIC_TOL,
        });
    }
    let hill = HillSystem::new(result.eta, result.p_y)?;
    let times = uniform_grid(0.0, 1.0, samples.max(1));
    let fund = hill.fundamental_solutions(&times, Tolerances::relative(result.tol))?;

    if result.is_stable() {
        return Ok(FloquetModes {
            kind: ModeKind::Elliptic,
            exponent: 0.0,
            rotation: result.phi.acos(),
            half_period_sign: 1.0,
            eigenvectors: [[1.0, 0.0], [0.0, 1.0]],
            factors: [
                fund.iter().map(|y| y[0]).collect(),
                fund.iter().map(|y| y[2]).collect(),
            ],
            times,
        });
    }

    let rho = result.multipliers[0].re;
    let mu = result.exponent;
    let vecs = [
        eigenvector(&result.matrix, rho),
        eigenvector(&result.matrix, 1.0 / rho),
    ];
    let mode = |v: &[f64; 2], y: &[f64; 4]| v[0] * y[0] + v[1] * y[2];
    let grow: Vec<f64> = times
        .iter()
        .zip(&fund)
        .map(|(t, y)| (-mu * t).exp() * mode(&vecs[0], y))
        .collect();
    let decay: Vec<f64> = times
        .iter()
        .zip(&fund)
        .map(|(t, y)| (mu * t).exp() * mode(&vecs[1], y))
        .collect();
    Ok(FloquetModes {
        kind: ModeKind::Hyperbolic,
        exponent: mu,
        rotation: 0.0,
        half_period_sign: rho.signum(),
        eigenvectors: vecs,
        times,
        factors: [grow, decay],
    })
}

/// Time series of a Hill-equation solution.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiSeries {
    pub eta: f64,
    pub p_y: f64,
    pub times: Vec<f64>,
    pub j: Vec<f64>,
    pub dj: Vec<f64>,
}

impl JacobiSeries {
    /// Number of strict sign changes of `J` between consecutive samples.
    pub fn sign_changes(&self) -> usize {
        let mut count = 0;
        let mut last = 0.0f64;
        for &v in &self.j {
            if v != 0.0 {
                if last != 0.0 && v.signum() != last.signum() {
                    count += 1;
                }
                last = v;
            }
        }
        count
    }
}

/// Solve the Hill equation from `initial = (J, dJ/dT)` at `T = 0` to `t_end`
/// optical cycles, sampled at `opts.samples_per_cycle` per cycle.
pub fn integrate_jacobi(
    eta: f64,
    p_y: f64,
    initial: [f64; 2],
    t_end: f64,
    opts: &IntegrationOptions,
) -> Result<JacobiSeries> {
    let hill = HillSystem::new(eta, p_y)?;
    let times = cycle_grid(t_end, opts.samples_per_cycle)?;
    let out = DormandPrince::new(opts.tol).solve(&hill.rhs2(), 0.0, initial, &times)?;
    Ok(JacobiSeries {
        eta,
        p_y,
        j: out.iter().map(|y| y[0]).collect(),
        dj: out.iter().map(|y| y[1]).collect(),
        times,
    })
}

/// Grid over `[0, t_end]` cycles with `per_cycle` samples per optical cycle.
pub(crate) fn cycle_grid(t_end: f64, per_cycle: usize) -> Result<Vec<f64>> {
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(invalid("t_end", format!("must be finite and >= 0, got {t_end}")));
    }
    if per_cycle == 0 {
        return Err(invalid("samples_per_cycle", "must be positive"));
    }
    let n = (t_end * per_cycle as f64).round() as usize;
    let n = if t_end > 0.0 { n.max(1) } else { 0 };
    Ok(uniform_grid(0.0, t_end, n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitClass {
    /// `x = n pi / omega` (nodes of the potential, `sin omega x = 0`).
    Node(i64),
    /// `x = (n + 1/2) pi / omega`.
    AntiNode(i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Parametrization {
    Affine,
    ProperTime,
    LabTime,
}

/// Reduced Jacobi system along a spatially constant orbit,
/// `d²J/dλ² + damping(λ) dJ/dλ + stiffness(λ) J = 0`, for the chosen
/// parameter `λ`. The orbit starts at lab time zero with `λ = 0`.
#[derive(Debug, Clone)]
pub struct JacobiEquation {
    field: ScalarField2D,
    pub x: f64,
    pub parametrization: Parametrization,
    /// `exp(sigma)` on the orbit, constant there.
    pub lapse: f64,
}

impl JacobiEquation {
    /// Lab time at parameter value `lambda`.
    pub fn lab_time(&self, lambda: f64) -> f64 {
        match self.parametrization {
            Parametrization::LabTime => lambda,
            Parametrization::ProperTime => self.lapse * lambda,
            Parametrization::Affine => lambda / self.lapse,
        }
    }

    fn sigma(&self, lambda: f64) -> Jet {
        self.field.sigma_derivatives(self.lab_time(lambda), self.x)
    }

    /// Coefficient of `dJ/dλ` (identical for both components).
    pub fn damping(&self, lambda: f64) -> f64 {
        let dsigma_dt = self.sigma(lambda).d_t;
        match self.parametrization {
            Parametrization::LabTime => dsigma_dt,
            Parametrization::ProperTime => 0.0,
            Parametrization::Affine => 2.0 * dsigma_dt / self.lapse,
        }
    }

    /// Coefficient matrix acting on `(J^t, J^x)`.
    pub fn stiffness(&self, lambda: f64) -> [[f64; 2]; 2] {
        let s = self.sigma(lambda);
        let k = match self.parametrization {
            Parametrization::LabTime => 1.0,
            Parametrization::ProperTime => (2.0 * s.value).exp(),
            Parametrization::Affine => (-2.0 * s.value).exp(),
        };
        [[k * s.d_tt, k * s.d_tx], [k * s.d_tx, k * s.d_xx]]
    }

    /// Coefficient of `J^x` in its own equation.
    pub fn x_coefficient(&self, lambda: f64) -> f64 {
        self.stiffness(lambda)[1][1]
    }

    /// The same equation in optical cycles with the impulse factor scaled out.
    pub fn hill_system(&self) -> HillSystem {
        let p = self.field.params();
        HillSystem {
            eta: p.eta().abs(),
            p_y: self.field.momenta().p_y,
        }
    }
}

/// Jacobi system along the spatially constant orbit `orbit` of a standing wave.
pub fn jacobi_equation_on_orbit(
    field: &ScalarField2D,
    orbit: OrbitClass,
    parametrization: Parametrization,
) -> Result<JacobiEquation> {
    let kind = field.model().kind();
    if kind != ModelKind::StandingWaveLinear {
        return Err(Error::WrongModelKind {
            expected: ModelKind::StandingWaveLinear.name(),
            found: kind.name(),
        });
    }
    if field.momenta().p_z != 0.0 {
        return Err(invalid(
            "p_z",
            "spatially constant orbits require P_z = 0",
        ));
    }
    let n = match orbit {
        OrbitClass::Node(n) => n,
        OrbitClass::AntiNode(_) => return Err(Error::UnsupportedOrbitClass),
    };
    let x = n as f64 * PI / field.params().omega;
    let lapse = (1.0 + 2.0 * field.scalar_potential(0.0, x)).sqrt();
    Ok(JacobiEquation {
        field: field.clone(),
        x,
        parametrization,
        lapse,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZoneKind {
    Stable,
    Unstable,
}

impl ZoneKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Stable => "stable",
            Self::Unstable => "unstable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Zone {
    pub index: usize,
    pub kind: ZoneKind,
    pub left: f64,
    pub right: f64,
}

impl Zone {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.left + self.right)
    }
}

/// Alternating stability and instability zones over a scanned `eta` range,
/// ordered by left endpoint. The outermost endpoints are the scan limits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityZones {
    pub zones: Vec<Zone>,
}

impl StabilityZones {
    pub fn stable(&self) -> impl Iterator<Item = &Zone> {
        self.zones.iter().filter(|z| z.kind == ZoneKind::Stable)
    }

    pub fn unstable(&self) -> impl Iterator<Item = &Zone> {
        self.zones.iter().filter(|z| z.kind == ZoneKind::Unstable)
    }

    /// Interior zone boundaries in increasing order.
    pub fn boundaries(&self) -> Vec<f64> {
        self.zones.iter().skip(1).map(|z| z.left).collect()
    }
}

/// One grid point of a characteristic-function scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhiSample {
    pub eta: f64,
    pub phi: f64,
}

impl PhiSample {
    pub fn abs_phi_minus_1(&self) -> f64 {
        self.phi.abs() - 1.0
    }

    pub fn is_stable(&self) -> bool {
        self.phi.abs() < 1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    pub eta_min: f64,
    pub eta_max: f64,
    pub step: f64,
    pub refine_tol: f64,
    pub p_y: f64,
    pub tol: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            eta_min: 0.0,
            eta_max: 2.0,
            step: DEFAULT_SCAN_STEP,
            refine_tol: DEFAULT_REFINE_TOL,
            p_y: 0.0,
            tol: MONODROMY_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZoneScan {
    pub samples: Vec<PhiSample>,
    pub zones: StabilityZones,
}

/// Zone scan over `(0, eta_max]` at `P_y = 0` with grid spacing `resolution`.
pub fn scan_zones(eta_max: f64, resolution: f64, refine_tol: f64) -> Result<StabilityZones> {
    let cfg = ScanConfig {
        eta_max,
        step: resolution,
        refine_tol,
        ..ScanConfig::default()
    };
    Ok(scan(&cfg)?.zones)
}

/// Sample `phi` on the grid of `cfg` (in parallel), bracket the sign changes
/// of `|phi| - 1` and bisect each to `cfg.refine_tol`.
pub fn scan(cfg: &ScanConfig) -> Result<ZoneScan> {
    if !(cfg.eta_min.is_finite() && cfg.eta_min >= 0.0) {
        return Err(invalid("eta_min", format!("must be finite and >= 0, got {}", cfg.eta_min)));
    }
    if !(cfg.eta_max.is_finite() && cfg.eta_max > cfg.eta_min) {
        return Err(invalid(
            "eta_max",
            format!("must exceed eta_min = {}, got {}", cfg.eta_min, cfg.eta_max),
        ));
    }
    if !(cfg.step.is_finite() && cfg.step > 0.0) {
        return Err(invalid("step", format!("must be finite and > 0, got {}", cfg.step)));
    }
    if !(cfg.refine_tol.is_finite() && cfg.refine_tol > 0.0) {
        return Err(invalid("refine_tol", "must be finite and > 0"));
    }

    let n = ((cfg.eta_max - cfg.eta_min) / cfg.step).ceil() as usize;
    // eta = 0 is parabolic (phi = 1, J = T), so a scan from zero starts one step in.
    let first = usize::from(cfg.eta_min == 0.0);
    let grid: Vec<f64> = (first..=n)
        .map(|i| (cfg.eta_min + i as f64 * cfg.step).min(cfg.eta_max))
        .collect();
    let samples = grid
        .par_iter()
        .map(|&eta| monodromy(eta, cfg.p_y, cfg.tol).map(|m| PhiSample { eta, phi: m.phi }))
        .collect::<Result<Vec<_>>>()?;

    let g = |eta: f64| -> Result<f64> { Ok(monodromy(eta, cfg.p_y, cfg.tol)?.phi.abs() - 1.0) };
    let informative: Vec<&PhiSample> = samples
        .iter()
        .filter(|s| s.abs_phi_minus_1().abs() > PARABOLIC_TOL)
        .collect();

    let mut zones = Vec::new();
    let mut left = cfg.eta_min;
    for pair in informative.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if a.is_stable() == b.is_stable() {
            continue;
        }
        let boundary = bisect(&g, a.eta, b.eta, a.abs_phi_minus_1(), cfg.refine_tol)?;
        zones.push(Zone {
            index: zones.len(),
            kind: kind_of(a),
            left,
            right: boundary,
        });
        left = boundary;
    }
    if let Some(last) = informative.last() {
        zones.push(Zone {
            index: zones.len(),
            kind: kind_of(last),
            left,
            right: cfg.eta_max,
        });
    }
    Ok(ZoneScan {
        samples,
        zones: StabilityZones { zones },
    })
}

fn kind_of(s: &PhiSample) -> ZoneKind {
    if s.is_stable() {
        ZoneKind::Stable
    } else {
        ZoneKind::Unstable
    }
}

fn bisect<F>(g: &F, mut a: f64, mut b: f64, mut ga: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    while b - a > tol {
        let m = 0.5 * (a + b);
        let gm = g(m)?;
        if (gm < 0.0) == (ga < 0.0) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}
