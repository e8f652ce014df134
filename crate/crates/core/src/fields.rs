//! Planar-symmetric field models and the scalar quantities derived from them.
//!
//! Lab time is measured in light-travel length (`t = c * t_conv`), so the
//! angular frequency `omega` has inverse-length units. Vector potentials are
//! handled in the scaled form `a = (q/m) A`, which is dimensionless; the plane
//! wave and standing wave then reduce to amplitudes proportional to the impulse
//! factor `eta = q E / (m omega)`.
//!
//! The reduced longitudinal motion is geodesic flow for the conformally flat
//! metric `g = exp(2 sigma) diag(-1, 1)` on the `(t, x)` plane, with
//! `exp(2 sigma) = 1 + 2 Phi` on the mass shell `H = -1/2`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Amplitude, frequency, polarization and charge-to-mass ratio of a field.
///
/// The impulse factor is always derived from its factors, see [`FieldParams::eta`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldParams {
    pub amplitude: f64,
    pub omega: f64,
    pub delta: f64,
    pub charge_mass_ratio: f64,
}

impl FieldParams {
    pub fn new(amplitude: f64, omega: f64, delta: f64, charge_mass_ratio: f64) -> Result<Self> {
        let params = Self {
            amplitude,
            omega,
            delta,
            charge_mass_ratio,
        };
        params.validate()?;
        Ok(params)
    }

    /// Parameters with unit charge-to-mass ratio and the amplitude chosen so
    /// that the impulse factor equals `eta`.
    pub fn from_eta(eta: f64, omega: f64, delta: f64) -> Result<Self> {
        if !(eta.is_finite() && eta >= 0.0) {
            return Err(invalid("eta", format!("must be finite and >= 0, got {eta}")));
        }
        Self::new(eta * omega, omega, delta, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(invalid("omega", format!("must be finite and > 0, got {}", self.omega)));
        }
        if !(self.amplitude.is_finite() && self.amplitude >= 0.0) {
            return Err(invalid(
                "amplitude",
                format!("must be finite and >= 0, got {}", self.amplitude),
            ));
        }
        if !self.charge_mass_ratio.is_finite() {
            return Err(invalid("charge_mass_ratio", "must be finite"));
        }
        if !self.delta.is_finite() {
            return Err(invalid("delta", "must be finite"));
        }
        Ok(())
    }

    /// Impulse factor `q E / (m omega)`.
    pub fn eta(&self) -> f64 {
        self.charge_mass_ratio * self.amplitude / self.omega
    }

    /// Length of one optical cycle, `2 pi / omega`, in lab-time units.
    pub fn optical_cycle(&self) -> f64 {
        2.0 * PI / self.omega
    }
}

/// Conserved canonical transverse momenta (dimensionless).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TransverseMomenta {
    pub p_y: f64,
    pub p_z: f64,
}

impl TransverseMomenta {
    pub const ZERO: Self = Self { p_y: 0.0, p_z: 0.0 };

    pub fn new(p_y: f64, p_z: f64) -> Self {
        Self { p_y, p_z }
    }
}

/// Value and partial derivatives up to second order of a function of `(t, x)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub d_t: f64,
    pub d_x: f64,
    pub d_tt: f64,
    pub d_tx: f64,
    pub d_xx: f64,
}

impl Jet {
    pub fn scaled(self, k: f64) -> Self {
        Self {
            value: k * self.value,
            d_t: k * self.d_t,
            d_x: k * self.d_x,
            d_tt: k * self.d_tt,
            d_tx: k * self.d_tx,
            d_xx: k * self.d_xx,
        }
    }

    /// Jet of `f(u)` with `u = t - x`, given `f`, `f'` and `f''` at `u`.
    fn of_retarded(f: f64, df: f64, ddf: f64) -> Self {
        Self {
            value: f,
            d_t: df,
            d_x: -df,
            d_tt: ddf,
            d_tx: -ddf,
            d_xx: ddf,
        }
    }
}

/// Caller-supplied transverse vector potential `A_y(t, x)`, `A_z(t, x)` with
/// analytic first and second partial derivatives, in unscaled field units.
pub trait PlanarPotential: Send + Sync + fmt::Debug {
    fn a_y(&self, t: f64, x: f64) -> Jet;
    fn a_z(&self, t: f64, x: f64) -> Jet;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    PlaneWaveElliptic,
    StandingWaveLinear,
    CustomPlanar,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::PlaneWaveElliptic => "plane_wave_elliptic",
            Self::StandingWaveLinear => "standing_wave_linear",
            Self::CustomPlanar => "custom_planar",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Planar-symmetric vector potential: `A_t = A_x = 0`, `A_y` and `A_z`
/// depending on `(t, x)` only.
#[derive(Debug, Clone)]
pub enum FieldModel {
    /// `A_y = (E delta / omega) cos(omega u)`, `A_z = (E sqrt(1 - delta^2) / omega) sin(omega u)`, `u = t - x`.
    PlaneWaveElliptic(FieldParams),
    /// `A_z = (E / omega) sin(omega t) sin(omega x)`, `A_y = 0`.
    StandingWaveLinear(FieldParams),
    CustomPlanar {
        params: FieldParams,
        potential: Arc<dyn PlanarPotential>,
    },
}

impl FieldModel {
    pub fn plane_wave(params: FieldParams) -> Result<Self> {
        params.validate()?;
        if params.delta.abs() > 1.0 {
            return Err(Error::InvalidPolarization(params.delta));
        }
        Ok(Self::PlaneWaveElliptic(params))
    }

    pub fn standing_wave(params: FieldParams) -> Result<Self> {
        params.validate()?;
        Ok(Self::StandingWaveLinear(params))
    }

    pub fn custom(params: FieldParams, potential: Arc<dyn PlanarPotential>) -> Result<Self> {
        params.validate()?;
        Ok(Self::CustomPlanar { params, potential })
    }

    /// A field-free model (`E = 0`) with unit frequency.
    pub fn vacuum() -> Self {
        Self::StandingWaveLinear(FieldParams {
            amplitude: 0.0,
            omega: 1.0,
            delta: 0.0,
            charge_mass_ratio: 1.0,
        })
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            Self::PlaneWaveElliptic(_) => ModelKind::PlaneWaveElliptic,
            Self::StandingWaveLinear(_) => ModelKind::StandingWaveLinear,
            Self::CustomPlanar { .. } => ModelKind::CustomPlanar,
        }
    }

    pub fn params(&self) -> &FieldParams {
        match self {
            Self::PlaneWaveElliptic(p) | Self::StandingWaveLinear(p) => p,
            Self::CustomPlanar { params, .. } => params,
        }
    }

    /// Scaled transverse potentials `[(q/m) A_y, (q/m) A_z]` with derivatives.
    pub fn scaled_potential(&self, t: f64, x: f64) -> [Jet; 2] {
        match self {
            Self::PlaneWaveElliptic(p) => {
                let eta = p.eta();
                let w = p.omega;
                let (s, c) = (w * (t - x)).sin_cos();
                let ky = eta * p.delta;
                let kz = eta * (1.0 - p.delta * p.delta).max(0.0).sqrt();
                [
                    Jet::of_retarded(ky * c, -ky * w * s, -ky * w * w * c),
                    Jet::of_retarded(kz * s, kz * w * c, -kz * w * w * s),
                ]
            }
            Self::StandingWaveLinear(p) => {
                let eta = p.eta();
                let w = p.omega;
                let (st, ct) = (w * t).sin_cos();
                let (sx, cx) = (w * x).sin_cos();
                let az = Jet {
                    value: eta * st * sx,
                    d_t: eta * w * ct * sx,
                    d_x: eta * w * st * cx,
                    d_tt: -eta * w * w * st * sx,
                    d_tx: eta * w * w * ct * cx,
                    d_xx: -eta * w * w * st * sx,
                };
                [Jet::default(), az]
            }
            Self::CustomPlanar { params, potential } => {
                let k = params.charge_mass_ratio;
                [potential.a_y(t, x).scaled(k), potential.a_z(t, x).scaled(k)]
            }
        }
    }
}

/// `Phi = ((P_y - (q/m) A_y)^2 + (P_z - (q/m) A_z)^2) / 2`.
pub fn scalar_potential(model: &FieldModel, momenta: TransverseMomenta, t: f64, x: f64) -> f64 {
    let [ay, az] = model.scaled_potential(t, x);
    let wy = momenta.p_y - ay.value;
    let wz = momenta.p_z - az.value;
    0.5 * (wy * wy + wz * wz)
}

/// Evaluator for `Phi`, `sigma` and the Gaussian curvature of one field model
/// at fixed transverse momenta.
#[derive(Debug, Clone)]
pub struct ScalarField2D {
    model: FieldModel,
    momenta: TransverseMomenta,
}

impl ScalarField2D {
    pub fn new(model: FieldModel, momenta: TransverseMomenta) -> Self {
        Self { model, momenta }
    }

    pub fn model(&self) -> &FieldModel {
        &self.model
    }

    pub fn momenta(&self) -> TransverseMomenta {
        self.momenta
    }

    pub fn params(&self) -> &FieldParams {
        self.model.params()
    }

    pub fn scalar_potential(&self, t: f64, x: f64) -> f64 {
        scalar_potential(&self.model, self.momenta, t, x)
    }

    /// Conformal factor `exp(2 sigma) = 1 + 2 Phi`.
    pub fn conformal_factor(&self, t: f64, x: f64) -> f64 {
        1.0 + 2.0 * self.scalar_potential(t, x)
    }

    /// `Phi` with its first and second partial derivatives.
    pub fn phi_jet(&self, t: f64, x: f64) -> Jet {
        let pot = self.model.scaled_potential(t, x);
        let p = [self.momenta.p_y, self.momenta.p_z];
        let mut jet = Jet::default();
        for (a, p) in pot.iter().zip(p) {
            let w = p - a.value;
            jet.value += 0.5 * w * w;
            jet.d_t -= w * a.d_t;
            jet.d_x -= w * a.d_x;
            jet.d_tt += a.d_t * a.d_t - w * a.d_tt;
            jet.d_tx += a.d_t * a.d_x - w * a.d_tx;
            jet.d_xx += a.d_x * a.d_x - w * a.d_xx;
        }
        jet
    }

    /// `sigma = ln(1 + 2 Phi) / 2` with its first and second partial derivatives.
    pub fn sigma_derivatives(&self, t: f64, x: f64) -> Jet {
        let phi = self.phi_jet(t, x);
        let g = 1.0 + 2.0 * phi.value;
        let g2 = g * g;
        Jet {
            value: 0.5 * g.ln(),
            d_t: phi.d_t / g,
            d_x: phi.d_x / g,
            d_tt: phi.d_tt / g - 2.0 * phi.d_t * phi.d_t / g2,
            d_tx: phi.d_tx / g - 2.0 * phi.d_t * phi.d_x / g2,
            d_xx: phi.d_xx / g - 2.0 * phi.d_x * phi.d_x / g2,
        }
    }

    /// Gaussian curvature `K = -exp(-2 sigma) (sigma_xx - sigma_tt)` of the
    /// metric `exp(2 sigma) diag(-1, 1)`.
    pub fn gaussian_curvature(&self, t: f64, x: f64) -> f64 {
        let s = self.sigma_derivatives(t, x);
        -(-2.0 * s.value).exp() * (s.d_xx - s.d_tt)
    }
}
