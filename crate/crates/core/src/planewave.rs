//! Closed-form (quadrature) orbits in elliptically polarized plane waves.
//!
//! For a plane wave every potential depends on `u = t - x` alone, so the
//! conformal factor splits as `sigma = U(u)` and the curvature vanishes. The
//! light-front rate `du/dτ = dt/dτ - dx/dτ` is then conserved, and the mass
//! shell gives `dv/dτ = (1 + 2 Phi(u)) / (du/dτ)`. The orbit follows from
//!
//! ```text
//! v(u) - v0 = ∫_{u0}^{u} (1 + 2 Phi(u')) du' / C²,   C = du/dτ,
//! ```
//!
//! and the transverse motion from `dx^a/dτ = P_a - (q/m) A_a(u)`.

use crate::dynamics::{
    hamiltonian_residual, IntegrationOptions, LongitudinalState, OrbitSignature, WorldLine,
};
use crate::error::{Error, Result};
use crate::fields::{FieldModel, FieldParams, ModelKind, ScalarField2D, TransverseMomenta};
use crate::integrator::uniform_grid;
use crate::quadrature;

/// Gauss–Kronrod tolerance for the light-front quadratures.
pub const QUADRATURE_TOL: f64 = 1e-12;

/// Largest accepted `|H + 1/2|` of the initial data.
const SHELL_TOL: f64 = 1e-8;

/// Quadrature representation of one plane-wave orbit, anchored at its initial data.
#[derive(Debug, Clone)]
pub struct QuadratureSolution {
    field: ScalarField2D,
    /// Conserved light-front rate `du/dτ`.
    pub null_rate: f64,
    pub tau0: f64,
    pub u0: f64,
    pub v0: f64,
}

impl QuadratureSolution {
    pub fn new(
        params: FieldParams,
        momenta: TransverseMomenta,
        initial: &LongitudinalState,
    ) -> Result<Self> {
        let field = ScalarField2D::new(FieldModel::plane_wave(params)?, momenta);
        let null_rate = initial.dt_dtau - initial.dx_dtau;
        if !(null_rate > 0.0) || !(initial.dt_dtau > 0.0) {
            let speed2 = initial.dx_dtau.powi(2) - initial.dt_dtau.powi(2);
            return Err(Error::NonTimelikeInitial {
                norm: field.conformal_factor(initial.t, initial.x) * speed2,
            });
        }
        let residual = hamiltonian_residual(&field, initial).abs();
        if !(residual <= SHELL_TOL) {
            return Err(Error::InitialConstraintViolated {
                residual,
                limit: SHELL_TOL,
            });
        }
        Ok(Self {
            field,
            null_rate,
            tau0: initial.tau,
            u0: initial.t - initial.x,
            v0: initial.t + initial.x,
        })
    }

    pub fn field(&self) -> &ScalarField2D {
        &self.field
    }

    /// `exp(2 U(u)) = 1 + 2 Phi(u)`.
    pub fn conformal_factor(&self, u: f64) -> f64 {
        self.field.conformal_factor(u, 0.0)
    }

    pub fn u_at(&self, tau: f64) -> f64 {
        self.u0 + self.null_rate * (tau - self.tau0)
    }

    pub fn tau_at(&self, u: f64) -> f64 {
        self.tau0 + (u - self.u0) / self.null_rate
    }

    /// `∫ (1 + 2 Phi) du` from `a` to `b`.
    fn light_front_integral(&self, a: f64, b: f64) -> f64 {
        quadrature::integrate(|u| self.conformal_factor(u), a, b, QUADRATURE_TOL).value
    }

    /// `∫ (P - (q/m) A(u)) du` for both transverse components from `a` to `b`.
    fn transverse_integral(&self, a: f64, b: f64) -> [f64; 2] {
        let p = self.field.momenta();
        let model = self.field.model();
        let y = quadrature::integrate(
            |u| p.p_y - model.scaled_potential(u, 0.0)[0].value,
            a,
            b,
            QUADRATURE_TOL,
        );
        let z = quadrature::integrate(
            |u| p.p_z - model.scaled_potential(u, 0.0)[1].value,
            a,
            b,
            QUADRATURE_TOL,
        );
        [y.value, z.value]
    }

    pub fn v_at(&self, u: f64) -> f64 {
        self.v0 + self.light_front_integral(self.u0, u) / (self.null_rate * self.null_rate)
    }

    /// Affine parameter with `ds/dτ = exp(2 sigma)` and `s(u0) = 0`.
    pub fn s_at(&self, u: f64) -> f64 {
        self.light_front_integral(self.u0, u) / self.null_rate
    }

    fn state_at(&self, tau: f64, u: f64, v: f64) -> LongitudinalState {
        let dv = self.conformal_factor(u) / self.null_rate;
        LongitudinalState {
            tau,
            t: 0.5 * (u + v),
            x: 0.5 * (v - u),
            dt_dtau: 0.5 * (dv + self.null_rate),
            dx_dtau: 0.5 * (dv - self.null_rate),
        }
    }

    /// Sample the orbit at the given proper times (non-decreasing, from `tau0`).
    /// The quadratures accumulate interval by interval.
    pub fn sample(&self, taus: &[f64]) -> WorldLine {
        let mut samples = Vec::with_capacity(taus.len());
        let mut transverse = Vec::with_capacity(taus.len());
        let mut u_prev = self.u0;
        let mut v_acc = 0.0;
        let mut yz = [0.0, 0.0];
        let c = self.null_rate;
        for &tau in taus {
            let u = self.u_at(tau);
            v_acc += self.light_front_integral(u_prev, u);
            let d = self.transverse_integral(u_prev, u);
            yz[0] += d[0] / c;
            yz[1] += d[1] / c;
            u_prev = u;
            samples.push(self.state_at(tau, u, self.v0 + v_acc / (c * c)));
            transverse.push(yz);
        }
        WorldLine {
            signature: OrbitSignature::of(&self.field),
            samples,
            transverse: Some(transverse),
        }
    }
}

/// World line, with transverse motion, from the light-front quadratures up to
/// `u = u_end`, sampled at the cadence of `opts` in proper time.
pub fn plane_wave_orbit(
    params: FieldParams,
    momenta: TransverseMomenta,
    initial: &LongitudinalState,
    u_end: f64,
    opts: &IntegrationOptions,
) -> Result<WorldLine> {
    let sol = QuadratureSolution::new(params, momenta, initial)?;
    if !(u_end.is_finite() && u_end >= sol.u0) {
        return Err(crate::error::invalid(
            "u_end",
            format!("must be finite and >= u0 = {}, got {u_end}", sol.u0),
        ));
    }
    if opts.samples_per_cycle == 0 {
        return Err(crate::error::invalid("samples_per_cycle", "must be positive"));
    }
    let tau_end = sol.tau_at(u_end);
    let span = tau_end - sol.tau0;
    let n = (span / params.optical_cycle() * opts.samples_per_cycle as f64).round() as usize;
    let n = if span > 0.0 { n.max(1) } else { 0 };
    Ok(sol.sample(&uniform_grid(sol.tau0, tau_end, n)))
}

/// Maximum `|K|` over a `sample_count × sample_count` grid covering one
/// optical cycle in both `t` and `x`. Only plane-wave models are accepted.
pub fn verify_flatness(
    model: &FieldModel,
    momenta: TransverseMomenta,
    sample_count: usize,
) -> Result<f64> {
    if model.kind() != ModelKind::PlaneWaveElliptic {
        return Err(Error::WrongModelKind {
            expected: ModelKind::PlaneWaveElliptic.name(),
            found: model.kind().name(),
        });
    }
    let field = ScalarField2D::new(model.clone(), momenta);
    let cycle = model.params().optical_cycle();
    let n = sample_count.max(1);
    let h = cycle / n as f64;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max(field.gaussian_curvature(i as f64 * h, j as f64 * h).abs());
        }
    }
    Ok(worst)
}
