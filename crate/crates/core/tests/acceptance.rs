//! Acceptance checks. Each criterion prints one PASS/FAIL line; the test
//! fails if any criterion fails.

mod common;

use std::f64::consts::{PI, SQRT_2};
use std::time::Instant;

use rand::Rng;

use common::*;
use planargeo::averaging::{
    self, check_envelopes, divergence_rate, integrate_landau, ponderomotive_gap, EnvelopeKind,
    DEFAULT_EPSILONS,
};
use planargeo::dynamics::{integrate_longitudinal, recover_transverse};
use planargeo::floquet::{self, characteristic, exponent_from_phi, integrate_jacobi, monodromy};
use planargeo::planewave::{verify_flatness, QuadratureSolution};
use planargeo::{
    FieldModel, FieldParams, IntegrationOptions, LongitudinalState, ScalarField2D, Tolerances,
    TransverseMomenta,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn phi_reproduction() -> Outcome {
    let start = Instant::now();
    let cases = [(0.2, 0.902673), (0.5, 0.435131), (1.2, -1.084503)];
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (eta, expected) in cases {
        let phi = characteristic(eta).unwrap();
        worst = worst.max((phi - expected).abs());
        parts.push(format!("phi({eta}) = {phi:.7}"));
    }
    let elapsed = start.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-4 && elapsed < 1.0,
        format!("{}; max error {worst:.2e}; {elapsed:.3} s", parts.join(", ")),
    )
}

fn first_zone_boundary() -> Outcome {
    let start = Instant::now();
    let zones = floquet::scan_zones(2.0, floquet::DEFAULT_SCAN_STEP, floquet::DEFAULT_REFINE_TOL).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let Some(&first) = zones.boundaries().first() else {
        return outcome(false, "no boundary found in [0, 2]");
    };
    outcome(
        (first - 1.147179).abs() <= 1e-4 && elapsed < 30.0,
        format!("eta_1^- = {first:.7}; {elapsed:.3} s"),
    )
}

fn borg_bound() -> Outcome {
    let edge = 2.0 * SQRT_2 / PI;
    let mut etas: Vec<f64> = (1..=900).map(|k| k as f64 * 1e-3).collect();
    etas.push(edge);
    let mut worst: f64 = 0.0;
    let violations = etas
        .iter()
        .filter(|&&eta| {
            let phi = characteristic(eta).unwrap();
            worst = worst.max(phi.abs());
            phi.abs() >= 1.0
        })
        .count();
    outcome(
        violations == 0,
        format!("{} samples up to {edge:.6}; max |phi| = {worst:.6}; {violations} violations", etas.len()),
    )
}

fn plane_wave_flatness() -> Outcome {
    let mut r = rng(4);
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let eta = r.gen_range(0.1..5.0);
        let delta = r.gen_range(-1.0..=1.0);
        let p = TransverseMomenta::new(r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0));
        let model = FieldModel::plane_wave(FieldParams::from_eta(eta, r.gen_range(0.5..2.0), delta).unwrap()).unwrap();
        worst = worst.max(verify_flatness(&model, p, 100).unwrap());
    }
    outcome(worst < 1e-10, format!("max |K| = {worst:.3e} over 5 draws of 100x100"))
}

fn integrability_oracle() -> Outcome {
    let mut r = rng(5);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let params = FieldParams::from_eta(r.gen_range(0.1..3.0), r.gen_range(0.5..2.0), r.gen_range(-1.0..=1.0)).unwrap();
        let p = TransverseMomenta::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
        let field = ScalarField2D::new(FieldModel::plane_wave(params).unwrap(), p);
        let init = LongitudinalState::on_shell(&field, r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-0.5..0.5));
        let opts = IntegrationOptions::with_tol(1e-12);
        let ode = integrate_longitudinal(&field, init, 10.0 * params.optical_cycle(), &opts).unwrap();
        let taus: Vec<f64> = ode.samples.iter().map(|s| s.tau).collect();
        let quad = QuadratureSolution::new(params, p, &init).unwrap().sample(&taus);
        for (a, b) in ode.samples.iter().zip(&quad.samples) {
            let va = [a.t, a.x, a.dt_dtau, a.dx_dtau];
            let vb = [b.t, b.x, b.dt_dtau, b.dx_dtau];
            let diff = va.iter().zip(vb).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            let scale = va.iter().map(|x| x.abs()).fold(1.0, f64::max);
            worst = worst.max(diff / scale);
        }
    }
    outcome(worst < 1e-8, format!("max relative deviation {worst:.3e} over 10 draws x 10 cycles"))
}

fn conservation() -> Outcome {
    let mut worst: f64 = 0.0;
    let cases = [
        (0.5, 1.0, 0.0, 0.3, 0.0),
        (1.2, 1.0, 0.4, 1.0, 0.2),
        (0.2, 2.0, -0.7, 0.25, -0.1),
        (2.0, 0.7, 0.0, 2.0, 0.5),
    ];
    for (eta, omega, p_y, x0, v0) in cases {
        let params = FieldParams::from_eta(eta, omega, 0.0).unwrap();
        let field = ScalarField2D::new(FieldModel::standing_wave(params).unwrap(), TransverseMomenta::new(p_y, 0.0));
        let init = LongitudinalState::on_shell(&field, 0.0, x0, v0);
        let line = integrate_longitudinal(&field, init, 100.0 * params.optical_cycle(), &IntegrationOptions::with_tol(1e-10)).unwrap();
        worst = worst.max(line.max_hamiltonian_residual(&field));
    }
    outcome(worst < 1e-8, format!("max |H + 1/2| = {worst:.3e} over 4 orbits x 100 cycles"))
}

fn reduction_deviation<O: Oracle>(oracle: &O, model: FieldModel, p: [f64; 2], x0: f64, v0: f64) -> f64 {
    let omega = model.params().omega;
    let cycle = 2.0 * PI / omega;
    let field = ScalarField2D::new(model, TransverseMomenta::new(p[0], p[1]));
    let per_cycle = 256;
    let refine = 16;
    let init = LongitudinalState::on_shell(&field, 0.0, x0, v0);
    let opts = IntegrationOptions::with_tol(1e-12).samples_per_cycle(per_cycle);
    let reduced = recover_transverse(&field, &integrate_longitudinal(&field, init, 10.0 * cycle, &opts).unwrap()).unwrap();
    let h = cycle / (per_cycle * refine) as f64;
    let full = lorentz_rk4(oracle, lorentz_initial(oracle, 0.0, x0, v0, p), h, 10 * per_cycle * refine, refine);
    let tr = reduced.transverse.as_ref().unwrap();
    let mut worst: f64 = 0.0;
    for (i, s) in reduced.samples.iter().enumerate() {
        let f = full[i];
        for d in [s.t - f[0], s.x - f[1], tr[i][0] - f[2], tr[i][1] - f[3]] {
            worst = worst.max(d.abs());
        }
    }
    worst
}

fn reduction_equivalence() -> Outcome {
    let mut standing: f64 = 0.0;
    // Weakly sensitive orbits only: at eta = 1.5 a 1e-12 change in x0 grows by ~4e7
    // within 10 cycles, so no pair of integrators agrees pointwise there.
    for (eta, omega, p, x0, v0) in [(0.8, 1.0, [0.3, 0.0], 0.4, 0.1), (1.0, 1.0, [0.2, 0.2], 0.7, 0.1)] {
        let model = FieldModel::standing_wave(FieldParams::from_eta(eta, omega, 0.0).unwrap()).unwrap();
        standing = standing.max(reduction_deviation(&StandingOracle { eta, omega }, model, p, x0, v0));
    }
    let mut plane: f64 = 0.0;
    for (eta, omega, delta, p, x0, v0) in [(0.8, 1.0, 0.3, [0.2, -0.1], 0.0, 0.1), (1.5, 0.7, 1.0, [0.0, 0.5], 0.5, 0.0)] {
        let model = FieldModel::plane_wave(FieldParams::from_eta(eta, omega, delta).unwrap()).unwrap();
        plane = plane.max(reduction_deviation(&PlaneOracle { eta, omega, delta }, model, p, x0, v0));
    }
    outcome(
        standing < 1e-6 && plane < 1e-6,
        format!("max deviation standing {standing:.3e}, plane {plane:.3e} over 10 cycles"),
    )
}

fn averaging_frequency() -> Outcome {
    let eta = 0.2;
    let series = integrate_jacobi(eta, 0.0, [1.0, 0.0], 40.0, &IntegrationOptions::default()).unwrap();
    let Some(spacing) = mean_zero_spacing(&series.times, &series.j) else {
        return outcome(false, "fewer than two zero crossings in 40 cycles");
    };
    let period = 2.0 * spacing;
    let expected = SQRT_2 / eta;
    let rel = (period - expected).abs() / expected;
    outcome(rel < 0.03, format!("period {period:.4} cycles vs {expected:.4}; relative gap {rel:.4}"))
}

fn gronwall_envelopes() -> Outcome {
    let mut checked = 0;
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    for eta in [0.05, 0.1, 0.2, 0.5] {
        for init in [[1.0, 0.0], [0.0, 1.0]] {
            let checks = check_envelopes(eta, init, &DEFAULT_EPSILONS, 400, Tolerances::relative(1e-12)).unwrap();
            for c in checks
                .iter()
                .filter(|c| matches!(c.kind, EnvelopeKind::JacobiAverage | EnvelopeKind::LandauAverage))
            {
                checked += 1;
                violations += c.violations;
                worst = worst.max(c.worst_excess);
            }
        }
    }
    outcome(
        violations == 0,
        format!("{checked} windows; {violations} violations; max (measured - bound) = {worst:.3e}"),
    )
}

fn resonance_divergence() -> Outcome {
    let eta = 1.2;
    let mu = exponent_from_phi(characteristic(eta).unwrap());
    let trace = integrate_landau(eta, [1.0, 0.0], 30.0, &IntegrationOptions::default()).unwrap();
    let rates = divergence_rate(&trace).unwrap();
    let fit_tol = 0.05 * mu;
    let rate_ok = (rates.jacobi - mu).abs() <= fit_tol;
    let order_ok = rates.alpha >= rates.jacobi - fit_tol && rates.beta >= rates.jacobi - fit_tol;
    let gap = ponderomotive_gap(&trace);
    let monotone = gap[5..].windows(2).all(|w| w[1] > w[0]);
    let amplitude = trace.initial[0].hypot(trace.initial[1] / averaging::ponderomotive_frequency(eta));
    let bounded = trace.x_p.iter().all(|v| v.abs() <= amplitude * (1.0 + 1e-12));
    outcome(
        rate_ok && order_ok && monotone && bounded,
        format!(
            "mu = {mu:.5}; rates J {:.5}, X {:.5}, xi {:.5}; |X - X_p| monotone after cycle 5: {monotone}; X_p bounded: {bounded}",
            rates.jacobi, rates.alpha, rates.beta
        ),
    )
}

fn property_suites() -> Outcome {
    let mut det_dev: f64 = 0.0;
    for k in 0..=1000 {
        let m = monodromy(k as f64 * 1e-2, 0.0, floquet::MONODROMY_TOL).unwrap();
        det_dev = det_dev.max((m.determinant() - 1.0).abs());
    }

    let opts = IntegrationOptions::with_tol(1e-10);
    let mut identity_ok = true;
    for eta in [0.0, 0.05, 0.2, 0.5, 1.2, 2.0] {
        for init in [[1.0, 0.0], [0.0, 1.0], [0.4, -0.3]] {
            let tr = integrate_landau(eta, init, 20.0, &opts).unwrap();
            identity_ok &= (0..tr.len()).all(|i| {
                let scale = tr.jx[i].abs().max(tr.x[i].abs()).max(tr.xi[i].abs()).max(1.0);
                (tr.jx[i] - tr.x[i] - tr.xi[i]).abs() <= 100.0 * opts.tol.rtol * scale
            });
        }
    }

    let mut avg_dev: f64 = 0.0;
    for eta in [0.05, 0.2, 0.5, 1.2] {
        for init in [[1.0, 0.0], [0.0, 1.0], [0.4, -0.3]] {
            let center = averaging::averaged_center(eta, init).unwrap();
            let jbar = averaging::AveragedJacobi::from_jacobi_data(eta, init).unwrap();
            for k in 0..=400 {
                let t = k as f64 * 0.05;
                avg_dev = avg_dev.max((center.value(t) - jbar.at(t)[0]).abs());
            }
        }
    }

    let mut r = rng(11);
    let mut fd_dev: f64 = 0.0;
    for _ in 0..100 {
        let eta = r.gen_range(0.1..2.0);
        let omega = r.gen_range(0.5..2.0);
        let model = if r.gen_bool(0.5) {
            FieldModel::standing_wave(FieldParams::from_eta(eta, omega, 0.0).unwrap()).unwrap()
        } else {
            FieldModel::plane_wave(FieldParams::from_eta(eta, omega, r.gen_range(-1.0..=1.0)).unwrap()).unwrap()
        };
        let field = ScalarField2D::new(model, TransverseMomenta::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)));
        let (t, x) = (r.gen_range(-5.0..5.0), r.gen_range(-5.0..5.0));
        let s = field.sigma_derivatives(t, x);
        let fd = fd_jet(|t, x| 0.5 * field.conformal_factor(t, x).ln(), t, x, 1e-3);
        for (a, b) in [s.d_t, s.d_x, s.d_tt, s.d_tx, s.d_xx].iter().zip(fd) {
            fd_dev = fd_dev.max((a - b).abs() / b.abs().max(1.0));
        }
    }

    outcome(
        det_dev <= 1e-8 && identity_ok && avg_dev <= 1e-14 && fd_dev <= 1e-6,
        format!(
            "max |det - 1| = {det_dev:.2e}; identity within 100 tol: {identity_ok}; max |Xbar - Jbar_x| = {avg_dev:.2e}; max sigma FD deviation {fd_dev:.2e}"
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

/// Custom harness so the per-criterion lines always reach the test log.
fn main() {
    let criteria: [Criterion; 11] = [
        ("characteristic function values", phi_reproduction),
        ("first stability-zone boundary", first_zone_boundary),
        ("Borg bound", borg_bound),
        ("plane-wave flatness", plane_wave_flatness),
        ("plane-wave quadrature vs ODE", integrability_oracle),
        ("mass-shell conservation", conservation),
        ("4D vs reduced dynamics", reduction_equivalence),
        ("averaged oscillation frequency", averaging_frequency),
        ("Gronwall envelopes", gronwall_envelopes),
        ("resonance divergence", resonance_divergence),
        ("property suites", property_suites),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} [{:>2}] {name}: {}", i + 1, o.detail);
        if !o.pass {
            failed.push(i + 1);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
