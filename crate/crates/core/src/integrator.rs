//! Adaptive Dormand–Prince 5(4) integrator with PI step-size control.
//!
//! The stepper never interpolates: every requested output time is hit by a
//! (possibly shortened) step, so output samples carry the full step accuracy.
//! A shortened step does not feed back into the controller's step proposal.

use crate::error::{Error, Result};

/// Right-hand side of a first-order system `y' = f(t, y)` of fixed dimension.
pub trait OdeSystem<const N: usize> {
    fn rhs(&self, t: f64, y: &[f64; N]) -> [f64; N];
}

impl<F, const N: usize> OdeSystem<N> for F
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    fn rhs(&self, t: f64, y: &[f64; N]) -> [f64; N] {
        self(t, y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Tolerances {
    pub const fn new(rtol: f64, atol: f64) -> Self {
        Self { rtol, atol }
    }

    /// Relative tolerance `tol` with an absolute floor two decades below it.
    pub fn relative(tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol * 1e-2,
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
        }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// PI controller constants (Hairer, Nørsett & Wanner, DOPRI5).
const BETA: f64 = 0.04;
const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

#[derive(Debug, Clone)]
pub struct DormandPrince {
    tol: Tolerances,
    max_steps: usize,
}

impl DormandPrince {
    pub fn new(tol: Tolerances) -> Self {
        Self {
            tol,
            max_steps: 50_000_000,
        }
    }

    pub fn with_max_steps(mut self, max_steps: usize) -> Self {
        self.max_steps = max_steps;
        self
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tol
    }

    /// Integrate from `t0` to `t1 >= t0` and return the final state.
    pub fn solve_to<S, const N: usize>(
        &self,
        sys: &S,
        t0: f64,
        y0: [f64; N],
        t1: f64,
    ) -> Result<[f64; N]>
    where
        S: OdeSystem<N> + ?Sized,
    {
        let out = self.solve(sys, t0, y0, &[t1])?;
        Ok(out[0])
    }

    /// Integrate forward from `t0`, returning the state at every time in
    /// `outputs`. Output times must be non-decreasing and not precede `t0`.
    pub fn solve<S, const N: usize>(
        &self,
        sys: &S,
        t0: f64,
        y0: [f64; N],
        outputs: &[f64],
    ) -> Result<Vec<[f64; N]>>
    where
        S: OdeSystem<N> + ?Sized,
    {
        if let Some(bad) = outputs.windows(2).find(|w| w[1] < w[0]) {
            return Err(crate::error::invalid(
                "outputs",
                format!("output times must be non-decreasing ({} after {})", bad[1], bad[0]),
            ));
        }
        if let Some(&first) = outputs.first() {
            if first < t0 {
                return Err(crate::error::invalid(
                    "outputs",
                    format!("output time {first} precedes the initial time {t0}"),
                ));
            }
        }

        let mut result = Vec::with_capacity(outputs.len());
        let mut t = t0;
        let mut y = y0;
        let mut k1 = sys.rhs(t, &y);
        let mut h = match outputs.last() {
            Some(&t_last) if t_last > t0 => self.initial_step(sys, t, &y, &k1, t_last - t0),
            _ => 0.0,
        };
        let mut fac_old: f64 = 1e-4;
        let mut last_rejected = false;
        let mut steps = 0usize;

        for &target in outputs {
            while t < target {
                steps += 1;
                if steps > self.max_steps {
                    return Err(Error::StepFailure { at: t, step: h });
                }
                let h_min = 16.0 * f64::EPSILON * t.abs().max(1.0);
                if h < h_min {
                    return Err(Error::StepFailure { at: t, step: h });
                }

                let remaining = target - t;
                let clipped = h >= remaining;
                let h_step = if clipped { remaining } else { h };

                let (y_new, k7, err) = self.step(sys, t, &y, &k1, h_step);
                if !err.is_finite() {
                    h *= FAC_MIN;
                    last_rejected = true;
                    continue;
                }

                let fac11 = err.powf(0.2 - BETA * 0.75);
                if err <= 1.0 {
                    let fac = (fac11 / fac_old.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
                    let mut h_new = h_step / fac;
                    if last_rejected {
                        h_new = h_new.min(h_step);
                    }
                    fac_old = err.max(1e-4);
                    last_rejected = false;

                    t = if clipped { target } else { t + h_step };
                    y = y_new;
                    k1 = k7;
                    // A step shortened to land on an output keeps the previous proposal.
                    h = if clipped { h.max(h_new) } else { h_new };
                } else {
                    h = h_step / (fac11 / SAFETY).min(1.0 / FAC_MIN);
                    last_rejected = true;
                }
            }
            result.push(y);
        }
        Ok(result)
    }

    fn step<S, const N: usize>(
        &self,
        sys: &S,
        t: f64,
        y: &[f64; N],
        k1: &[f64; N],
        h: f64,
    ) -> ([f64; N], [f64; N], f64)
    where
        S: OdeSystem<N> + ?Sized,
    {
        let stage = |coeffs: &[(f64, &[f64; N])]| -> [f64; N] {
            let mut out = *y;
            for (c, k) in coeffs {
                for i in 0..N {
                    out[i] += h * c * k[i];
                }
            }
            out
        };

        let k2 = sys.rhs(t + C2 * h, &stage(&[(A21, k1)]));
        let k3 = sys.rhs(t + C3 * h, &stage(&[(A31, k1), (A32, &k2)]));
        let k4 = sys.rhs(t + C4 * h, &stage(&[(A41, k1), (A42, &k2), (A43, &k3)]));
        let k5 = sys.rhs(
            t + C5 * h,
            &stage(&[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = sys.rhs(
            t + h,
            &stage(&[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y_new = stage(&[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = sys.rhs(t + h, &y_new);

        let mut acc = 0.0;
        for i in 0..N {
            let e = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = self.tol.atol + self.tol.rtol * y[i].abs().max(y_new[i].abs());
            acc += (e / sc) * (e / sc);
        }
        (y_new, k7, (acc / N as f64).sqrt())
    }

    fn initial_step<S, const N: usize>(
        &self,
        sys: &S,
        t: f64,
        y: &[f64; N],
        f0: &[f64; N],
        span: f64,
    ) -> f64
    where
        S: OdeSystem<N> + ?Sized,
    {
        let scale = |i: usize| self.tol.atol + self.tol.rtol * y[i].abs();
        let rms = |v: &dyn Fn(usize) -> f64| -> f64 {
            ((0..N).map(|i| v(i) * v(i)).sum::<f64>() / N as f64).sqrt()
        };
        let d0 = rms(&|i| y[i] / scale(i));
        let d1 = rms(&|i| f0[i] / scale(i));
        let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h0 = h0.min(span);

        let mut y1 = *y;
        for i in 0..N {
            y1[i] += h0 * f0[i];
        }
        let f1 = sys.rhs(t + h0, &y1);
        let d2 = rms(&|i| (f1[i] - f0[i]) / scale(i)) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(span)
    }
}

impl Default for DormandPrince {
    fn default() -> Self {
        Self::new(Tolerances::default())
    }
}

/// `n + 1` equally spaced points covering `[start, end]`, with the endpoint exact.
pub fn uniform_grid(start: f64, end: f64, n: usize) -> Vec<f64> {
    if n == 0 {
        return vec![start];
    }
    let h = (end - start) / n as f64;
    (0..=n)
        .map(|i| if i == n { end } else { start + i as f64 * h })
        .collect()
}
