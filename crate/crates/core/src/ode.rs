//! Embedded Dormand-Prince 5(4) stepper with PI step-size control.
//!
//! The right-hand side may fail (e.g. a stencil or metric evaluation leaving
//! its domain); a failed evaluation is treated like an oversized error
//! estimate and the step is retried smaller, so integrations approach
//! horizons and singular points gracefully instead of panicking.

use crate::error::{Error, Result};

// Dormand-Prince 5(4) tableau.
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
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Error coefficients (5th-order weights minus the embedded 4th-order ones).
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MAX_GROWTH: f64 = 5.0;
const MIN_SHRINK: f64 = 0.2;
const MAX_REJECTS_PER_STEP: usize = 60;

/// Tolerances and step bounds for one integration.
#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
}

impl StepControl {
    pub fn new(rel_tol: f64, abs_tol: f64, max_step: f64) -> Result<Self> {
        for (name, v) in [("rel_tol", rel_tol), ("abs_tol", abs_tol)] {
            if !(v > 0.0 && v <= 1e-2) {
                return Err(Error::Config(format!(
                    "{name} must lie in (0, 1e-2], got {v}"
                )));
            }
        }
        if !(max_step > 0.0) {
            return Err(Error::Config(format!(
                "max_step must be positive, got {max_step}"
            )));
        }
        Ok(Self {
            rel_tol,
            abs_tol,
            max_step,
        })
    }
}

/// One accepted step.
#[derive(Debug, Clone, Copy)]
pub struct Accepted<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
}

/// Outcome of asking the stepper to advance.
#[derive(Debug, Clone, Copy)]
pub enum StepOutcome<const N: usize> {
    Accepted(Accepted<N>),
    /// Step size underflowed (or the RHS kept failing); the integration
    /// cannot continue past the current state.
    Underflow,
}

/// Adaptive stepper state. Direction is the sign of `h`.
pub struct Stepper<const N: usize> {
    control: StepControl,
    h: f64,
    err_prev: f64,
}

impl<const N: usize> Stepper<N> {
    /// `h0` sets both the initial trial step and the direction.
    pub fn new(control: StepControl, h0: f64) -> Self {
        let h = h0.signum() * h0.abs().min(control.max_step);
        Self {
            control,
            h,
            err_prev: 1.0,
        }
    }

    pub fn direction(&self) -> f64 {
        self.h.signum()
    }

    /// Current trial step (signed).
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Clamp the next trial step so it does not overshoot `t_end`. The
    /// clamped step may still be rejected and shrunk, so arrival must be
    /// judged from the accepted position (see [`reached`]).
    pub fn clip_to(&mut self, t: f64, t_end: f64) {
        let remaining = t_end - t;
        if remaining.abs() <= self.h.abs() {
            self.h = remaining;
        }
    }

    /// Attempt steps until one is accepted or the step size underflows.
    pub fn step<F>(&mut self, f: &F, t: f64, y: &[f64; N]) -> Result<StepOutcome<N>>
    where
        F: Fn(f64, &[f64; N]) -> Result<[f64; N]>,
    {
        let k1 = match f(t, y) {
            Ok(k) => k,
            Err(_) => return Ok(StepOutcome::Underflow),
        };
        let scale = self.control.abs_tol.max(1e-300);

        for _ in 0..MAX_REJECTS_PER_STEP {
            let h = self.h;
            if h == 0.0 || t + h == t {
                return Ok(StepOutcome::Underflow);
            }

            match self.try_step(f, t, y, &k1, h) {
                Some((y_new, err)) => {
                    if err <= 1.0 {
                        // PI controller (Hairer's beta = 0.08 variant).
                        let fac = SAFETY
                            * err.max(1e-10).powf(-0.7 / 5.0)
                            * self.err_prev.max(1e-10).powf(0.4 / 5.0);
                        let fac = fac.clamp(MIN_SHRINK, MAX_GROWTH);
                        self.err_prev = err.max(1e-10);
                        self.h = h.signum() * (h.abs() * fac).min(self.control.max_step);
                        return Ok(StepOutcome::Accepted(Accepted { t: t + h, y: y_new }));
                    }
                    let fac = (SAFETY * err.powf(-0.2)).clamp(0.1, 0.7);
                    self.h = h * fac;
                }
                // RHS failed inside the trial interval: shrink and retry.
                None => self.h = h * 0.5,
            }

            if self.h.abs() < 1e-14 * (t.abs().max(1.0)) || self.h.abs() < 1e-280 / scale {
                return Ok(StepOutcome::Underflow);
            }
        }
        Ok(StepOutcome::Underflow)
    }

    fn try_step<F>(
        &self,
        f: &F,
        t: f64,
        y: &[f64; N],
        k1: &[f64; N],
        h: f64,
    ) -> Option<([f64; N], f64)>
    where
        F: Fn(f64, &[f64; N]) -> Result<[f64; N]>,
    {
        let stage = |coeffs: &[(f64, &[f64; N])]| -> [f64; N] {
            let mut out = *y;
            for (i, slot) in out.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (c, k) in coeffs {
                    acc += c * k[i];
                }
                *slot += h * acc;
            }
            out
        };

        let k2 = f(t + h / 5.0, &stage(&[(A21, k1)])).ok()?;
        let k3 = f(t + 3.0 * h / 10.0, &stage(&[(A31, k1), (A32, &k2)])).ok()?;
        let k4 = f(
            t + 4.0 * h / 5.0,
            &stage(&[(A41, k1), (A42, &k2), (A43, &k3)]),
        )
        .ok()?;
        let k5 = f(
            t + 8.0 * h / 9.0,
            &stage(&[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        )
        .ok()?;
        let k6 = f(
            t + h,
            &stage(&[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        )
        .ok()?;
        let y_new = stage(&[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = f(t + h, &y_new).ok()?;

        let mut err_sq = 0.0;
        for i in 0..N {
            let e =
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let tol = self.control.abs_tol + self.control.rel_tol * y[i].abs().max(y_new[i].abs());
            err_sq += (e / tol) * (e / tol);
        }
        let err = (err_sq / N as f64).sqrt();
        if !err.is_finite() {
            return None;
        }
        Some((y_new, err))
    }
}

/// True when an accepted position has landed on `t_end` (to rounding).
/// A clipped, unrejected step lands within one ulp of the target.
pub fn reached(t: f64, t_end: f64) -> bool {
    (t_end - t).abs() <= 4.0 * f64::EPSILON * t.abs().max(t_end.abs()).max(1.0)
}

/// A crude but safe initial step size from the RHS magnitude at the start.
pub fn initial_step<const N: usize>(
    control: &StepControl,
    y: &[f64; N],
    dydt: &[f64; N],
    direction: f64,
) -> f64 {
    let y_norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    let f_norm = dydt.iter().map(|v| v * v).sum::<f64>().sqrt();
    let scale = if f_norm > 1e-12 {
        0.01 * (y_norm.max(1.0)) / f_norm
    } else {
        0.1
    };
    direction.signum() * scale.min(control.max_step).max(1e-8)
}
