//! Reduced longitudinal dynamics and its geodesic reformulation.
//!
//! The longitudinal pair `(t, x)` obeys `d²x^A/dτ² = -η^{AB} Φ_{,B}` with
//! `η = diag(-1, 1)`; the transverse coordinates are cyclic and are recovered
//! afterwards by quadrature of `dx^a/dτ = P_a - (q/m) A_a`. The mass-shell
//! constraint `H = (-(dt/dτ)² + (dx/dτ)²)/2 + Φ = -1/2` is monitored but never
//! projected back onto.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{FieldParams, ModelKind, ScalarField2D, TransverseMomenta};
use crate::integrator::{uniform_grid, DormandPrince, Tolerances};

/// Default output cadence, in samples per optical cycle.
pub const DEFAULT_SAMPLES_PER_CYCLE: usize = 256;

/// Phase point of the reduced longitudinal motion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LongitudinalState {
    pub tau: f64,
    pub t: f64,
    pub x: f64,
    pub dt_dtau: f64,
    pub dx_dtau: f64,
}

impl LongitudinalState {
    /// State at `tau = 0` with `dt/dτ` fixed by the mass-shell constraint.
    pub fn on_shell(field: &ScalarField2D, t: f64, x: f64, dx_dtau: f64) -> Self {
        let g = field.conformal_factor(t, x);
        Self {
            tau: 0.0,
            t,
            x,
            dt_dtau: (g + dx_dtau * dx_dtau).sqrt(),
            dx_dtau,
        }
    }

    /// Particle with vanishing longitudinal velocity at `(t, x)`.
    pub fn at_rest(field: &ScalarField2D, t: f64, x: f64) -> Self {
        Self::on_shell(field, t, x, 0.0)
    }

    fn to_array(self) -> [f64; 4] {
        [self.t, self.x, self.dt_dtau, self.dx_dtau]
    }

    fn from_array(tau: f64, y: [f64; 4]) -> Self {
        Self {
            tau,
            t: y[0],
            x: y[1],
            dt_dtau: y[2],
            dx_dtau: y[3],
        }
    }
}

/// `H(state) + 1/2`, zero on physical orbits.
pub fn hamiltonian_residual(field: &ScalarField2D, state: &LongitudinalState) -> f64 {
    let kinetic = 0.5 * (state.dx_dtau * state.dx_dtau - state.dt_dtau * state.dt_dtau);
    kinetic + field.scalar_potential(state.t, state.x) + 0.5
}

/// Identifies the field and momenta a world line was computed with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitSignature {
    pub kind: ModelKind,
    pub params: FieldParams,
    pub momenta: TransverseMomenta,
}

impl OrbitSignature {
    pub fn of(field: &ScalarField2D) -> Self {
        Self {
            kind: field.model().kind(),
            params: *field.params(),
            momenta: field.momenta(),
        }
    }
}

/// Proper-time samples of an orbit, optionally with transverse positions.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldLine {
    pub signature: OrbitSignature,
    pub samples: Vec<LongitudinalState>,
    /// `(y, z)` per sample, present once transverse motion has been recovered.
    pub transverse: Option<Vec<[f64; 2]>>,
}

impl WorldLine {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn max_hamiltonian_residual(&self, field: &ScalarField2D) -> f64 {
        self.samples
            .iter()
            .map(|s| hamiltonian_residual(field, s).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationOptions {
    pub tol: Tolerances,
    pub samples_per_cycle: usize,
}

impl IntegrationOptions {
    /// Relative tolerance `tol`, absolute tolerance `tol / 100`.
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol: Tolerances::relative(tol),
            ..Self::default()
        }
    }

    pub fn samples_per_cycle(mut self, n: usize) -> Self {
        self.samples_per_cycle = n;
        self
    }
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self {
            tol: Tolerances::default(),
            samples_per_cycle: DEFAULT_SAMPLES_PER_CYCLE,
        }
    }
}

fn sample_grid(start: f64, end: f64, cycle: f64, per_cycle: usize) -> Result<Vec<f64>> {
    if !(end.is_finite() && end >= start) {
        return Err(crate::error::invalid(
            "end",
            format!("integration end {end} must be finite and >= start {start}"),
        ));
    }
    if per_cycle == 0 {
        return Err(crate::error::invalid("samples_per_cycle", "must be positive"));
    }
    let n = ((end - start) / cycle * per_cycle as f64).round() as usize;
    let n = if end > start { n.max(1) } else { 0 };
    Ok(uniform_grid(start, end, n))
}

fn check_constraint(field: &ScalarField2D, initial: &LongitudinalState, rtol: f64) -> Result<()> {
    let residual = hamiltonian_residual(field, initial).abs();
    let limit = 10.0 * rtol;
    if !(residual <= limit) {
        return Err(Error::InitialConstraintViolated { residual, limit });
    }
    Ok(())
}

/// Integrate the longitudinal equations from `initial.tau` to `tau_end`,
/// sampling at the configured cadence per optical cycle of proper time.
pub fn integrate_longitudinal(
    field: &ScalarField2D,
    initial: LongitudinalState,
    tau_end: f64,
    opts: &IntegrationOptions,
) -> Result<WorldLine> {
    let cycle = field.params().optical_cycle();
    let taus = sample_grid(initial.tau, tau_end, cycle, opts.samples_per_cycle)?;
    let samples = integrate_longitudinal_at(field, initial, &taus, opts.tol)?;
    Ok(WorldLine {
        signature: OrbitSignature::of(field),
        samples,
        transverse: None,
    })
}

/// Integrate the longitudinal equations and return the state at each proper
/// time in `taus` (non-decreasing, starting at or after `initial.tau`).
pub fn integrate_longitudinal_at(
    field: &ScalarField2D,
    initial: LongitudinalState,
    taus: &[f64],
    tol: Tolerances,
) -> Result<Vec<LongitudinalState>> {
    check_constraint(field, &initial, tol.rtol)?;
    let rhs = |_tau: f64, y: &[f64; 4]| {
        let phi = field.phi_jet(y[0], y[1]);
        [y[2], y[3], phi.d_t, -phi.d_x]
    };
    let out = DormandPrince::new(tol).solve(&rhs, initial.tau, initial.to_array(), taus)?;
    Ok(taus
        .iter()
        .zip(out)
        .map(|(&tau, y)| LongitudinalState::from_array(tau, y))
        .collect())
}

/// Recover `(y, z)` along a world line by quadrature of
/// `dx^a/dτ = P_a - (q/m) A_a(t, x)`, starting from `y = z = 0`.
///
/// Each interval uses the endpoint-corrected trapezoid rule
/// `h (f0 + f1)/2 + h² (f0' - f1')/12`, exact for cubics, with `f'` taken
/// from the chain rule along the sampled velocity.
pub fn recover_transverse(
    field: &ScalarField2D,
    world_line: &WorldLine,
) -> Result<WorldLine> {
    if OrbitSignature::of(field) != world_line.signature {
        return Err(Error::ModelMismatch);
    }
    let p = field.momenta();
    let model = field.model();
    let rate = |s: &LongitudinalState| {
        let [ay, az] = model.scaled_potential(s.t, s.x);
        let vy = p.p_y - ay.value;
        let vz = p.p_z - az.value;
        let ay_dot = ay.d_t * s.dt_dtau + ay.d_x * s.dx_dtau;
        let az_dot = az.d_t * s.dt_dtau + az.d_x * s.dx_dtau;
        ([vy, vz], [-ay_dot, -az_dot])
    };

    let mut positions = Vec::with_capacity(world_line.len());
    let mut pos = [0.0, 0.0];
    let mut prev: Option<(f64, [f64; 2], [f64; 2])> = None;
    for s in &world_line.samples {
        let (f, df) = rate(s);
        if let Some((tau0, f0, df0)) = prev {
            let h = s.tau - tau0;
            for i in 0..2 {
                pos[i] += 0.5 * h * (f0[i] + f[i]) + h * h / 12.0 * (df0[i] - df[i]);
            }
        }
        positions.push(pos);
        prev = Some((s.tau, f, df));
    }
    Ok(WorldLine {
        signature: world_line.signature,
        samples: world_line.samples.clone(),
        transverse: Some(positions),
    })
}

/// Point on a geodesic in null coordinates `u = t - x`, `v = t + x` with its
/// affine tangent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullTangent {
    pub u: f64,
    pub v: f64,
    pub du_ds: f64,
    pub dv_ds: f64,
}

impl NullTangent {
    /// Affine tangent of a longitudinal state, using `ds/dτ = exp(2 sigma)`.
    pub fn from_state(field: &ScalarField2D, s: &LongitudinalState) -> Self {
        let inv = 1.0 / field.conformal_factor(s.t, s.x);
        Self {
            u: s.t - s.x,
            v: s.t + s.x,
            du_ds: (s.dt_dtau - s.dx_dtau) * inv,
            dv_ds: (s.dt_dtau + s.dx_dtau) * inv,
        }
    }
}

/// Geodesic sample in null coordinates together with the accumulated proper time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineSample {
    pub s: f64,
    pub tau: f64,
    pub u: f64,
    pub v: f64,
    pub du_ds: f64,
    pub dv_ds: f64,
}

impl AffineSample {
    pub fn t(&self) -> f64 {
        0.5 * (self.u + self.v)
    }

    pub fn x(&self) -> f64 {
        0.5 * (self.v - self.u)
    }
}

/// Integrate the geodesic equations `u'' + 2 σ_u u'² = 0`, `v'' + 2 σ_v v'² = 0`
/// in the affine parameter `s ∈ [0, s_end]`, with `τ(s)` from `dτ/ds = exp(-2σ)`.
pub fn integrate_geodesic_affine(
    field: &ScalarField2D,
    initial: NullTangent,
    s_end: f64,
    opts: &IntegrationOptions,
) -> Result<Vec<AffineSample>> {
    let t0 = 0.5 * (initial.u + initial.v);
    let x0 = 0.5 * (initial.v - initial.u);
    // g(k, k) = exp(2σ) η_AB k^A k^B = -exp(2σ) u' v'
    let norm = -field.conformal_factor(t0, x0) * initial.du_ds * initial.dv_ds;
    if !(norm < 0.0) || initial.du_ds + initial.dv_ds <= 0.0 {
        return Err(Error::NonTimelikeInitial { norm });
    }

    let cycle = field.params().optical_cycle();
    let grid = sample_grid(0.0, s_end, cycle, opts.samples_per_cycle)?;
    let rhs = |_s: f64, y: &[f64; 5]| {
        let t = 0.5 * (y[0] + y[1]);
        let x = 0.5 * (y[1] - y[0]);
        let sig = field.sigma_derivatives(t, x);
        let sigma_u = 0.5 * (sig.d_t - sig.d_x);
        let sigma_v = 0.5 * (sig.d_t + sig.d_x);
        [
            y[2],
            y[3],
            -2.0 * sigma_u * y[2] * y[2],
            -2.0 * sigma_v * y[3] * y[3],
            (-2.0 * sig.value).exp(),
        ]
    };
    let y0 = [initial.u, initial.v, initial.du_ds, initial.dv_ds, 0.0];
    let out = DormandPrince::new(opts.tol).solve(&rhs, 0.0, y0, &grid)?;
    Ok(grid
        .iter()
        .zip(out)
        .map(|(&s, y)| AffineSample {
            s,
            tau: y[4],
            u: y[0],
            v: y[1],
            du_ds: y[2],
            dv_ds: y[3],
        })
        .collect())
}
