//! Independent oracles shared by the integration tests.
//!
//! Nothing here calls into the library's field or integrator code: the
//! potentials are written out in closed form and the 4D Lorentz equations
//! are stepped with classical fixed-step RK4.

#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Scaled transverse potential value with its `t` and `x` derivatives.
#[derive(Debug, Clone, Copy, Default)]
pub struct Pot {
    pub a: f64,
    pub a_t: f64,
    pub a_x: f64,
}

/// Closed-form scaled potentials `(a_y, a_z)` of a field.
pub trait Oracle {
    fn potentials(&self, t: f64, x: f64) -> [Pot; 2];
}

/// `a_y = eta delta cos w(t - x)`, `a_z = eta sqrt(1 - delta²) sin w(t - x)`.
pub struct PlaneOracle {
    pub eta: f64,
    pub omega: f64,
    pub delta: f64,
}

impl Oracle for PlaneOracle {
    fn potentials(&self, t: f64, x: f64) -> [Pot; 2] {
        let w = self.omega;
        let (s, c) = (w * (t - x)).sin_cos();
        let ky = self.eta * self.delta;
        let kz = self.eta * (1.0 - self.delta * self.delta).sqrt();
        [
            Pot { a: ky * c, a_t: -ky * w * s, a_x: ky * w * s },
            Pot { a: kz * s, a_t: kz * w * c, a_x: -kz * w * c },
        ]
    }
}

/// `a_y = 0`, `a_z = eta sin(w t) sin(w x)`.
pub struct StandingOracle {
    pub eta: f64,
    pub omega: f64,
}

impl Oracle for StandingOracle {
    fn potentials(&self, t: f64, x: f64) -> [Pot; 2] {
        let w = self.omega;
        let (st, ct) = (w * t).sin_cos();
        let (sx, cx) = (w * x).sin_cos();
        [
            Pot::default(),
            Pot {
                a: self.eta * st * sx,
                a_t: self.eta * w * ct * sx,
                a_x: self.eta * w * st * cx,
            },
        ]
    }
}

/// Lorentz force in proper time for `y = (t, x, y, z, gamma, u_x, u_y, u_z)`
/// with `E = -dA/dt` and `B = curl A`, `A = (0, 0, A_y(t, x), A_z(t, x))`.
fn lorentz<O: Oracle>(o: &O, s: &[f64; 8]) -> [f64; 8] {
    let [py, pz] = o.potentials(s[0], s[1]);
    let (g, ux, uy, uz) = (s[4], s[5], s[6], s[7]);
    let (ey, ez) = (-py.a_t, -pz.a_t);
    let (by, bz) = (-pz.a_x, py.a_x);
    [
        g,
        ux,
        uy,
        uz,
        uy * ey + uz * ez,
        uy * bz - uz * by,
        g * ey - ux * bz,
        g * ez + ux * by,
    ]
}

/// 4D state from a longitudinal start `(t, x, dx/dτ)` with canonical momenta `(P_y, P_z)`.
pub fn lorentz_initial<O: Oracle>(o: &O, t: f64, x: f64, ux: f64, p: [f64; 2]) -> [f64; 8] {
    let [ay, az] = o.potentials(t, x);
    let uy = p[0] - ay.a;
    let uz = p[1] - az.a;
    let g = (1.0 + ux * ux + uy * uy + uz * uz).sqrt();
    [t, x, 0.0, 0.0, g, ux, uy, uz]
}

/// Fixed-step RK4 from `tau = 0`, returning the state at every multiple of
/// `stride * h` up to `steps * h`.
pub fn lorentz_rk4<O: Oracle>(o: &O, y0: [f64; 8], h: f64, steps: usize, stride: usize) -> Vec<[f64; 8]> {
    let mut y = y0;
    let mut out = vec![y];
    let add = |y: &[f64; 8], k: &[f64; 8], c: f64| {
        let mut r = *y;
        for i in 0..8 {
            r[i] += c * k[i];
        }
        r
    };
    for n in 1..=steps {
        let k1 = lorentz(o, &y);
        let k2 = lorentz(o, &add(&y, &k1, 0.5 * h));
        let k3 = lorentz(o, &add(&y, &k2, 0.5 * h));
        let k4 = lorentz(o, &add(&y, &k3, h));
        for i in 0..8 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if n % stride == 0 {
            out.push(y);
        }
    }
    out
}

/// Fourth-order central first derivative.
pub fn d1<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

/// Fourth-order central second derivative.
pub fn d2<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (-f(x - 2.0 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) - f(x + 2.0 * h))
        / (12.0 * h * h)
}

/// Finite-difference `(s_t, s_x, s_tt, s_tx, s_xx)` of a function of `(t, x)`.
pub fn fd_jet<F: Fn(f64, f64) -> f64>(f: F, t: f64, x: f64, h: f64) -> [f64; 5] {
    [
        d1(|s| f(s, x), t, h),
        d1(|s| f(t, s), x, h),
        d2(|s| f(s, x), t, h),
        d1(|s| d1(|r| f(s, r), x, h), t, h),
        d2(|s| f(t, s), x, h),
    ]
}

/// Mean spacing of the linearly interpolated zero crossings of `values`.
pub fn mean_zero_spacing(times: &[f64], values: &[f64]) -> Option<f64> {
    let mut zeros = Vec::new();
    for i in 1..values.len() {
        let (a, b) = (values[i - 1], values[i]);
        if a == 0.0 {
            zeros.push(times[i - 1]);
        } else if a * b < 0.0 {
            zeros.push(times[i - 1] + (times[i] - times[i - 1]) * a / (a - b));
        }
    }
    if zeros.len() < 2 {
        return None;
    }
    Some((zeros[zeros.len() - 1] - zeros[0]) / (zeros.len() - 1) as f64)
}
