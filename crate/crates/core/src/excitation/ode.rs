//! Dormand–Prince 5(4) with proportional-integral step control.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
/// Difference between the fifth- and fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dp5Options {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Dp5Options {
    pub fn new(tol: f64) -> Self {
        Dp5Options {
            rtol: tol,
            atol: tol,
            h_max: f64::INFINITY,
            max_steps: 10_000_000,
        }
    }
}

/// Counters carried across consecutive [`Dp5::integrate`] calls.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dp5Stats {
    pub steps: usize,
    pub rejected: usize,
    /// Largest accepted normalized error estimate.
    pub max_error: f64,
}

/// Integrator state: the step size and controller memory persist between
/// segments so that restarting at a breakpoint is cheap.
#[derive(Debug, Clone)]
pub struct Dp5 {
    pub opts: Dp5Options,
    pub stats: Dp5Stats,
    h: Option<f64>,
    err_prev: f64,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

impl Dp5 {
    pub fn new(opts: Dp5Options) -> Self {
        Dp5 {
            opts,
            stats: Dp5Stats::default(),
            h: None,
            err_prev: 1e-4,
        }
    }

    /// Advances `y` from `t0` to `t1 > t0`, calling `observe` after every
    /// accepted step.
    pub fn integrate<const N: usize>(
        &mut self,
        f: impl Fn(f64, &[f64; N]) -> [f64; N],
        t0: f64,
        t1: f64,
        y0: [f64; N],
        mut observe: impl FnMut(f64, &[f64; N]),
    ) -> Result<[f64; N]> {
        let span = t1 - t0;
        if !(span > 0.0) {
            return if span == 0.0 {
                Ok(y0)
            } else {
                Err(Error::invalid("integration interval must be increasing"))
            };
        }
        let mut t = t0;
        let mut y = y0;
        let mut k1 = f(t, &y);
        let mut h = self
            .h
            .unwrap_or_else(|| self.initial_step(&y, &k1, span))
            .min(self.opts.h_max)
            .min(span);
        loop {
            if self.stats.steps >= self.opts.max_steps {
                return Err(Error::Integration {
                    t,
                    reason: format!("exceeded {} steps", self.opts.max_steps),
                });
            }
            let proposed = h;
            // Stretch slightly rather than leave a roundoff-sized remainder.
            let last = t + h * 1.001 >= t1;
            if last {
                h = t1 - t;
            }
            if h <= 1e-14 * t.abs().max(1.0) {
                return Err(Error::Integration {
                    t,
                    reason: format!("step size underflow (h = {h:e})"),
                });
            }
            let k2 = f(t + C[1] * h, &axpy(&y, h, &[(A2[0], &k1)]));
            let k3 = f(t + C[2] * h, &axpy(&y, h, &[(A3[0], &k1), (A3[1], &k2)]));
            let k4 = f(
                t + C[3] * h,
                &axpy(&y, h, &[(A4[0], &k1), (A4[1], &k2), (A4[2], &k3)]),
            );
            let k5 = f(
                t + C[4] * h,
                &axpy(
                    &y,
                    h,
                    &[(A5[0], &k1), (A5[1], &k2), (A5[2], &k3), (A5[3], &k4)],
                ),
            );
            let k6 = f(
                t + C[5] * h,
                &axpy(
                    &y,
                    h,
                    &[
                        (A6[0], &k1),
                        (A6[1], &k2),
                        (A6[2], &k3),
                        (A6[3], &k4),
                        (A6[4], &k5),
                    ],
                ),
            );
            let t_new = if last { t1 } else { t + h };
            let y_new = axpy(
                &y,
                h,
                &[
                    (B[0], &k1),
                    (B[2], &k3),
                    (B[3], &k4),
                    (B[4], &k5),
                    (B[5], &k6),
                ],
            );
            let k7 = f(t_new, &y_new);
            let ks = [&k1, &k2, &k3, &k4, &k5, &k6, &k7];
            let mut err: f64 = 0.0;
            for i in 0..N {
                let e: f64 = h * ks.iter().zip(E).map(|(k, c)| c * k[i]).sum::<f64>();
                let scale = self.opts.atol + self.opts.rtol * y[i].abs().max(y_new[i].abs());
                err = err.max(e.abs() / scale);
            }
            if !err.is_finite() {
                return Err(Error::Integration {
                    t,
                    reason: "non-finite error estimate".into(),
                });
            }
            if err <= 1.0 {
                let fac =
                    (0.9 * err.max(1e-10).powf(-0.14) * self.err_prev.powf(0.08)).clamp(0.2, 5.0);
                self.err_prev = err.max(1e-4);
                self.stats.steps += 1;
                self.stats.max_error = self.stats.max_error.max(err);
                t = t_new;
                y = y_new;
                k1 = k7;
                observe(t, &y);
                let next = (h * fac).min(self.opts.h_max);
                if last {
                    // A step clipped at the segment end says little about
                    // the next segment; keep the unclipped proposal.
                    self.h = Some(if h < proposed { proposed } else { next });
                    return Ok(y);
                }
                h = next;
            } else {
                self.stats.rejected += 1;
                h *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
            }
        }
    }

    fn initial_step<const N: usize>(&self, y: &[f64; N], dy: &[f64; N], span: f64) -> f64 {
        let ymax = y.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let dmax = dy.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let tol = self.opts.atol + self.opts.rtol * ymax;
        let h = if dmax > 0.0 {
            0.01 * ymax.max(tol) / dmax
        } else {
            span
        };
        h.min(span).max(span * 1e-12)
    }
}
