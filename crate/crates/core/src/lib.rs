//! Charged-particle motion in planar electromagnetic waves, treated as
//! geodesic flow on a conformally flat two-dimensional surface.
//!
//! Lab time is measured in length units (`t_lab = c t`), so angular
//! frequencies carry inverse-length units and one optical cycle lasts
//! `2 pi / omega`. Fields enter only through the scaled potential
//! `a = (q/m) A` and the dimensionless amplitude `eta = q E / (m omega)`.
//!
//! - [`fields`]: field models, the scalar potential and conformal factor.
//! - [`dynamics`]: reduced longitudinal orbits and affine geodesics.
//! - [`planewave`]: the integrable plane-wave case by quadrature.
//! - [`floquet`]: the Hill-form Jacobi equation, monodromy and stability zones.
//! - [`averaging`]: averaged systems, Landau decomposition, ponderomotive center.

pub mod averaging;
pub mod dynamics;
pub mod error;
pub mod fields;
pub mod floquet;
pub mod integrator;
pub mod output;
pub mod planewave;
pub mod quadrature;

pub use averaging::{
    AveragedJacobi, DecompositionTrace, DivergenceRates, EnvelopeCheck, EnvelopeKind, EnvelopeSeries,
    Harmonic, PonderomotiveSeries,
};
pub use dynamics::{
    AffineSample, IntegrationOptions, LongitudinalState, NullTangent, OrbitSignature, WorldLine,
};
pub use error::{Error, Result};
pub use fields::{
    FieldModel, FieldParams, Jet, ModelKind, PlanarPotential, ScalarField2D, TransverseMomenta,
};
pub use floquet::{
    FloquetModes, HillSystem, JacobiEquation, JacobiSeries, ModeKind, MonodromyResult, OrbitClass,
    Parametrization, PhiSample, ScanConfig, StabilityZones, Zone, ZoneKind, ZoneScan,
};
pub use integrator::{DormandPrince, OdeSystem, Tolerances};
pub use planewave::QuadratureSolution;
